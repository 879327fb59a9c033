use crate::{Error, Result};

/// Aligned partner step for step `t` (1-based) of a sequence of length
/// `len_self` paired with one of length `len_partner`.
///
/// When the partner is at least as long, the stride rule
/// `t* = t · ⌈len_partner / len_self⌉` applies, clamped to `len_partner`.
/// When the partner is shorter the stride rule would overshoot, so steps are
/// mapped proportionally: `t* = ⌈t · len_partner / len_self⌉`. The result is
/// always in `1..=len_partner`.
pub fn align_step(t: usize, len_self: usize, len_partner: usize) -> Result<usize> {
    if len_self == 0 || len_partner == 0 {
        return Err(Error::EmptySequence("alignment needs non-empty sequences".into()));
    }
    if t == 0 || t > len_self {
        return Err(Error::Index { t, len: len_self });
    }
    let aligned = if len_self <= len_partner {
        t * len_partner.div_ceil(len_self)
    } else {
        (t * len_partner).div_ceil(len_self)
    };
    Ok(aligned.min(len_partner))
}

/// Zero-based partner index for every zero-based step of `len_self`.
pub fn alignment(len_self: usize, len_partner: usize) -> Result<Vec<usize>> {
    (1..=len_self)
        .map(|t| align_step(t, len_self, len_partner).map(|s| s - 1))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn stride_rule() {
        assert_eq!(align_step(2, 5, 10).unwrap(), 4);
        assert_eq!(align_step(3, 7, 7).unwrap(), 3);
        assert_eq!(align_step(4, 4, 10).unwrap(), 10);
        assert_eq!(align_step(1, 4, 10).unwrap(), 3);
    }

    #[test]
    fn down_map_when_partner_shorter() {
        assert_eq!(alignment(10, 5).unwrap(), vec![0, 0, 1, 1, 2, 2, 3, 3, 4, 4]);
        assert_eq!(align_step(1, 3, 1).unwrap(), 1);
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(align_step(0, 3, 3), Err(Error::Index { t: 0, len: 3 })));
        assert!(matches!(align_step(4, 3, 3), Err(Error::Index { t: 4, len: 3 })));
        assert!(align_step(1, 0, 3).is_err());
    }

    proptest! {
        #[test]
        fn total_and_in_range(ls in 1usize..200, lp in 1usize..200, frac in 0.0f64..1.0) {
            let t = 1 + ((ls - 1) as f64 * frac) as usize;
            let a = align_step(t, ls, lp).unwrap();
            prop_assert!((1..=lp).contains(&a));
        }

        #[test]
        fn monotone_in_t(ls in 1usize..100, lp in 1usize..100) {
            let a = alignment(ls, lp).unwrap();
            prop_assert!(a.windows(2).all(|w| w[0] <= w[1]));
            prop_assert_eq!(*a.last().unwrap() + 1 <= lp, true);
        }
    }
}
