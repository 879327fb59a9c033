use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Inverted dropout with an owned generator: each unit is kept with
/// probability `1 - rate` and kept units are scaled by `1 / (1 - rate)`.
#[derive(Clone, Debug)]
pub struct Dropout {
    rate: f64,
    rng: ChaCha8Rng,
}

impl Dropout {
    pub fn new(rate: f64, seed: u64) -> Self {
        assert!((0.0..1.0).contains(&rate), "dropout rate must be in [0, 1)");
        Dropout {
            rate,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Per-unit multipliers: `0` for dropped units, `1 / (1 - rate)` for kept.
    pub fn mask(&mut self, len: usize) -> Vec<f64> {
        if self.rate == 0.0 {
            return vec![1.0; len];
        }
        let keep = 1.0 / (1.0 - self.rate);
        (0..len)
            .map(|_| if self.rng.gen::<f64>() < self.rate { 0.0 } else { keep })
            .collect()
    }
}

/// Applies dropout to `x`; identity when inactive or `rate == 0`.
pub fn dropout(x: &[f64], rate: f64, seed: u64, active: bool) -> Vec<f64> {
    if !active || rate == 0.0 {
        return x.to_vec();
    }
    let mask = Dropout::new(rate, seed).mask(x.len());
    x.iter().zip(mask).map(|(v, m)| v * m).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inactive_and_zero_rate_are_identity() {
        let x = [1.0, -2.0, 3.5];
        assert_eq!(dropout(&x, 0.5, 1, false), x.to_vec());
        assert_eq!(dropout(&x, 0.0, 1, true), x.to_vec());
    }

    #[test]
    fn seeded_mask_replays() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let out = dropout(&x, 0.5, 42, true);
        // Replay the generator independently.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let want: Vec<f64> = x
            .iter()
            .map(|v| if rng.gen::<f64>() < 0.5 { 0.0 } else { v * 2.0 })
            .collect();
        assert_eq!(out, want);
        assert_eq!(out, dropout(&x, 0.5, 42, true));
        for (o, v) in out.iter().zip(x) {
            assert!(*o == 0.0 || *o == 2.0 * v);
        }
    }

    #[test]
    fn expectation_preserved() {
        let x = vec![1.0; 200_000];
        let out = dropout(&x, 0.5, 7, true);
        let mean = out.iter().sum::<f64>() / out.len() as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
    }
}
