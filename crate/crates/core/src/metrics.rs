//! Ranking metrics over per-query candidate groups, and TREC run files.
//!
//! Candidates are ranked by score, highest first; equal scores keep their
//! original order. Groups without any relevant candidate stay in the average
//! and contribute 0.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub doc_id: String,
    pub score: f64,
    pub label: u8,
}

/// One query's candidates in their original order.
#[derive(Clone, Debug, PartialEq)]
pub struct RankingGroup {
    pub query_id: String,
    candidates: Vec<Candidate>,
}

impl RankingGroup {
    pub fn new(query_id: impl Into<String>, candidates: Vec<Candidate>) -> Result<Self> {
        let query_id = query_id.into();
        if candidates.is_empty() {
            return Err(Error::Metric(format!("query {query_id} has no candidates")));
        }
        for c in &candidates {
            if c.label > 1 {
                return Err(Error::Label(format!("{} for {}", c.label, c.doc_id)));
            }
            if !c.score.is_finite() {
                return Err(Error::NonFinite(format!("score of {}", c.doc_id)));
            }
        }
        Ok(RankingGroup { query_id, candidates })
    }

    /// Builds a group from `(score, label)` pairs, naming candidates by index.
    pub fn from_scores(query_id: impl Into<String>, scored: &[(f64, u8)]) -> Result<Self> {
        let query_id = query_id.into();
        let candidates = scored
            .iter()
            .enumerate()
            .map(|(i, &(score, label))| Candidate {
                doc_id: format!("{query_id}-{i}"),
                score,
                label,
            })
            .collect();
        RankingGroup::new(query_id, candidates)
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    /// Candidate indices from best to worst, stable on ties.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.candidates.len()).collect();
        order.sort_by(|&a, &b| {
            self.candidates[b]
                .score
                .partial_cmp(&self.candidates[a].score)
                .expect("scores are finite")
        });
        order
    }

    /// Labels in ranked order.
    pub fn ranked_labels(&self) -> Vec<u8> {
        self.ranking().into_iter().map(|i| self.candidates[i].label).collect()
    }
}

fn reciprocal_rank(labels: &[u8]) -> f64 {
    labels
        .iter()
        .position(|&l| l == 1)
        .map_or(0.0, |r| 1.0 / (r + 1) as f64)
}

fn average_precision(labels: &[u8]) -> f64 {
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, &l) in labels.iter().enumerate() {
        if l == 1 {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    if hits == 0 {
        0.0
    } else {
        sum / hits as f64
    }
}

fn mean_over(groups: &[RankingGroup], f: impl Fn(&[u8]) -> f64) -> Result<f64> {
    if groups.is_empty() {
        return Err(Error::Metric("no query groups".into()));
    }
    let total: f64 = groups.iter().map(|g| f(&g.ranked_labels())).sum();
    Ok(total / groups.len() as f64)
}

pub fn p_at_1(groups: &[RankingGroup]) -> Result<f64> {
    mean_over(groups, |l| if l[0] == 1 { 1.0 } else { 0.0 })
}

pub fn mrr(groups: &[RankingGroup]) -> Result<f64> {
    mean_over(groups, reciprocal_rank)
}

pub fn map(groups: &[RankingGroup]) -> Result<f64> {
    mean_over(groups, average_precision)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricSet {
    pub p_at_1: f64,
    pub mrr: f64,
    pub map: f64,
}

impl MetricSet {
    pub fn compute(groups: &[RankingGroup]) -> Result<Self> {
        Ok(MetricSet {
            p_at_1: p_at_1(groups)?,
            mrr: mrr(groups)?,
            map: map(groups)?,
        })
    }

    pub fn get(&self, which: DevMetric) -> f64 {
        match which {
            DevMetric::P1 => self.p_at_1,
            DevMetric::Mrr => self.mrr,
            DevMetric::Map => self.map,
        }
    }
}

impl fmt::Display for MetricSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P@1={:.4}, MRR={:.4}, MAP={:.4}", self.p_at_1, self.mrr, self.map)
    }
}

/// The metric used for model selection during training.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DevMetric {
    #[default]
    Map,
    Mrr,
    P1,
}

impl fmt::Display for DevMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DevMetric::Map => "map",
            DevMetric::Mrr => "mrr",
            DevMetric::P1 => "p1",
        })
    }
}

impl FromStr for DevMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "map" => Ok(DevMetric::Map),
            "mrr" => Ok(DevMetric::Mrr),
            "p1" | "p@1" => Ok(DevMetric::P1),
            other => Err(Error::config("dev_metric", format!("unknown metric `{other}`"))),
        }
    }
}

/// Groups parallel `(query_id, score, label)` rows by query, in order of
/// first appearance. Candidates are named `{query_id}-{ordinal}`.
pub fn group_by_query<'a>(rows: impl IntoIterator<Item = (&'a str, f64, u8)>) -> Result<Vec<RankingGroup>> {
    let mut order: Vec<String> = Vec::new();
    let mut members: std::collections::HashMap<String, Vec<(f64, u8)>> = Default::default();
    for (q, s, l) in rows {
        let entry = members.entry(q.to_string()).or_insert_with(|| {
            order.push(q.to_string());
            Vec::new()
        });
        entry.push((s, l));
    }
    order
        .into_iter()
        .map(|q| {
            let scored = &members[&q];
            RankingGroup::from_scores(q, scored)
        })
        .collect()
}

/// Writes `query_id Q0 doc_id rank score run_tag` lines, ranks from 1,
/// scores with six decimals.
pub fn write_trec_run<W: Write>(w: &mut W, groups: &[RankingGroup], run_tag: &str) -> io::Result<()> {
    for g in groups {
        for (rank, i) in g.ranking().into_iter().enumerate() {
            let c = &g.candidates[i];
            writeln!(w, "{} Q0 {} {} {:.6} {}", g.query_id, c.doc_id, rank + 1, c.score, run_tag)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn group(scored: &[(f64, u8)]) -> RankingGroup {
        RankingGroup::from_scores("q", scored).unwrap()
    }

    #[test]
    fn hand_cases() {
        let top = group(&[(0.9, 1), (0.1, 0)]);
        assert_eq!(p_at_1(&[top.clone()]).unwrap(), 1.0);
        let second = group(&[(0.9, 0), (0.5, 1)]);
        assert_eq!(mrr(&[second.clone()]).unwrap(), 0.5);
        assert_eq!(p_at_1(&[top.clone(), second]).unwrap(), 0.5);

        let fourth = group(&[(4.0, 0), (3.0, 0), (2.0, 0), (1.0, 1)]);
        assert_eq!(mrr(&[top, fourth]).unwrap(), 0.625);

        let ap = map(&[group(&[(3.0, 0), (2.0, 1), (1.0, 1)])]).unwrap();
        assert!((ap - (0.5 + 2.0 / 3.0) / 2.0).abs() < 1e-12);
        assert_eq!(map(&[group(&[(1.0, 1), (0.9, 1), (0.1, 0)])]).unwrap(), 1.0);
    }

    #[test]
    fn no_positive_scores_zero() {
        let g = group(&[(0.3, 0), (0.2, 0)]);
        let m = MetricSet::compute(&[g]).unwrap();
        assert_eq!((m.p_at_1, m.mrr, m.map), (0.0, 0.0, 0.0));
    }

    #[test]
    fn ties_keep_original_order() {
        let g = group(&[(0.5, 0), (0.5, 1)]);
        assert_eq!(g.ranked_labels(), vec![0, 1]);
    }

    #[test]
    fn empty_group_set() {
        assert!(matches!(map(&[]), Err(Error::Metric(_))));
        assert!(RankingGroup::new("q", vec![]).is_err());
    }

    #[test]
    fn run_file_lines() {
        let g = RankingGroup::from_scores("q7", &[(0.25, 0), (0.75, 1)]).unwrap();
        let mut buf = Vec::new();
        write_trec_run(&mut buf, &[g], "tag").unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "q7 Q0 q7-1 1 0.750000 tag\nq7 Q0 q7-0 2 0.250000 tag\n"
        );
    }

    #[test]
    fn grouping_preserves_first_appearance() {
        let groups = group_by_query([("b", 0.1, 1), ("a", 0.2, 0), ("b", 0.3, 0)]).unwrap();
        assert_eq!(groups[0].query_id, "b");
        assert_eq!(groups[0].candidates().len(), 2);
    }

    fn arb_groups() -> impl Strategy<Value = Vec<Vec<(f64, u8)>>> {
        prop::collection::vec(
            prop::collection::vec((-5.0f64..5.0, 0u8..=1), 1..10),
            1..8,
        )
    }

    proptest! {
        #[test]
        fn monotone_transform_invariance(raw in arb_groups()) {
            let gs: Vec<_> = raw.iter().map(|g| group(g)).collect();
            let tr: Vec<_> = raw
                .iter()
                .map(|g| group(&g.iter().map(|&(s, l)| (s.exp() * 3.0 + 1.0, l)).collect::<Vec<_>>()))
                .collect();
            prop_assert_eq!(MetricSet::compute(&gs).unwrap(), MetricSet::compute(&tr).unwrap());
        }

        #[test]
        fn group_order_invariance(raw in arb_groups()) {
            let gs: Vec<_> = raw.iter().map(|g| group(g)).collect();
            let mut rev = gs.clone();
            rev.reverse();
            let (a, b) = (MetricSet::compute(&gs).unwrap(), MetricSet::compute(&rev).unwrap());
            prop_assert!((a.map - b.map).abs() < 1e-12);
            prop_assert!((a.mrr - b.mrr).abs() < 1e-12);
            prop_assert!((a.p_at_1 - b.p_at_1).abs() < 1e-12);
        }

        #[test]
        fn p1_never_exceeds_mrr(raw in arb_groups()) {
            let gs: Vec<_> = raw.iter().map(|g| group(g)).collect();
            prop_assert!(p_at_1(&gs).unwrap() <= mrr(&gs).unwrap());
        }
    }
}
