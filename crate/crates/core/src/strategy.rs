//! Sparse mixed strategies.
//!
//! A [`MixedStrategy`] lists only its nonzero entries. Player I strategies
//! are keyed by row index (`usize`); Player II strategies are keyed by
//! [`PureResponse`](crate::PureResponse), since the column set is usually
//! far too large to index densely.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sum-to-one tolerance for distributions.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// A probability distribution in sparse form, sorted by key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MixedStrategy<K> {
    entries: Vec<(K, f64)>,
}

impl<K: Ord + Clone> MixedStrategy<K> {
    /// Builds a strategy from entries that must already satisfy the
    /// invariants: positive finite weights, distinct keys, unit sum.
    pub fn new(mut entries: Vec<(K, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        for (_, w) in &entries {
            if !w.is_finite() || *w <= 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "weight {w} is not strictly positive"
                )));
            }
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        if entries.windows(2).any(|p| p[0].0 == p[1].0) {
            return Err(Error::InvalidDistribution("duplicate key".into()));
        }
        let total: f64 = entries.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self { entries })
    }

    pub fn point(key: K) -> Self {
        Self {
            entries: vec![(key, 1.0)],
        }
    }

    pub fn entries(&self) -> &[(K, f64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, f64)> {
        self.entries.iter().map(|(k, w)| (k, *w))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Probability of `key`, zero when it is not in the support.
    pub fn weight(&self, key: &K) -> f64 {
        self.entries
            .binary_search_by(|(k, _)| k.cmp(key))
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0.0)
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.entries.iter().map(|(k, _)| k)
    }

    pub fn map_keys<K2: Ord + Clone>(&self, f: impl Fn(&K) -> K2) -> Result<MixedStrategy<K2>> {
        normalize(self.entries.iter().map(|(k, w)| (f(k), *w)))
    }
}

impl MixedStrategy<usize> {
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDistribution("no strategies".into()));
        }
        normalize((0..n).map(|i| (i, 1.0)))
    }

    /// Builds a strategy from a dense weight vector (any nonnegative scale).
    pub fn from_dense(weights: &[f64]) -> Result<Self> {
        normalize(weights.iter().copied().enumerate())
    }

    /// Dense length-`n` view; fails if an index is out of range.
    pub fn to_dense(&self, n: usize) -> Result<Vec<f64>> {
        let mut dense = vec![0.0; n];
        for &(i, w) in &self.entries {
            if i >= n {
                return Err(Error::ContractViolation(format!(
                    "strategy index {i} out of range for n = {n}"
                )));
            }
            dense[i] = w;
        }
        Ok(dense)
    }
}

/// Turns nonnegative weights into a distribution: zero entries are dropped,
/// repeated keys are merged, and the rest is divided by the total.
pub fn normalize<K: Ord + Clone>(
    weights: impl IntoIterator<Item = (K, f64)>,
) -> Result<MixedStrategy<K>> {
    let mut merged: BTreeMap<K, f64> = BTreeMap::new();
    for (k, w) in weights {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "weight {w} is negative or not finite"
            )));
        }
        if w > 0.0 {
            *merged.entry(k).or_insert(0.0) += w;
        }
    }
    let total: f64 = merged.values().sum();
    if merged.is_empty() || total <= 0.0 || !total.is_finite() {
        return Err(Error::InvalidDistribution(
            "no strictly positive weight".into(),
        ));
    }
    let entries = merged
        .into_iter()
        .map(|(k, w)| (k, w / total))
        .filter(|(_, w)| *w > 0.0)
        .collect();
    Ok(MixedStrategy { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_equal_weights() {
        let s = normalize(vec![(0usize, 2.0), (1, 2.0)]).unwrap();
        assert_eq!(s.entries(), &[(0, 0.5), (1, 0.5)]);
    }

    #[test]
    fn normalize_drops_zero_entries() {
        let s = normalize(vec![(0usize, 3.0), (1, 0.0)]).unwrap();
        assert_eq!(s.entries(), &[(0, 1.0)]);
    }

    #[test]
    fn normalize_sum_four() {
        let s = normalize(vec![(0usize, 1.0), (1, 2.0), (2, 1.0)]).unwrap();
        assert_eq!(s.entries(), &[(0, 0.25), (1, 0.5), (2, 0.25)]);
    }

    #[test]
    fn normalize_rejects_bad_input() {
        assert!(matches!(
            normalize(vec![(0usize, 0.0), (1, 0.0)]),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(matches!(
            normalize(vec![(0usize, 1.0), (1, -0.5)]),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(normalize(vec![(0usize, f64::NAN)]).is_err());
        assert!(normalize(Vec::<(usize, f64)>::new()).is_err());
    }

    #[test]
    fn normalize_merges_repeated_keys() {
        let s = normalize(vec![(1usize, 1.0), (0, 1.0), (1, 2.0)]).unwrap();
        assert_eq!(s.entries(), &[(0, 0.25), (1, 0.75)]);
    }

    #[test]
    fn new_checks_invariants() {
        assert!(MixedStrategy::new(vec![(0usize, 0.5), (1, 0.5)]).is_ok());
        assert!(MixedStrategy::new(vec![(0usize, 0.5), (0, 0.5)]).is_err());
        assert!(MixedStrategy::new(vec![(0usize, 0.5), (1, 0.4)]).is_err());
        assert!(MixedStrategy::new(vec![(0usize, 1.0), (1, 0.0)]).is_err());
    }

    #[test]
    fn dense_round_trip_checks_range() {
        let s = MixedStrategy::from_dense(&[0.0, 1.0, 3.0]).unwrap();
        assert_eq!(s.to_dense(3).unwrap(), vec![0.0, 0.25, 0.75]);
        assert!(s.to_dense(2).is_err());
        assert_eq!(s.weight(&0), 0.0);
        assert_eq!(s.weight(&2), 0.75);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn normalize_is_idempotent(ws in prop::collection::vec(0.0f64..100.0, 1..12)) {
                prop_assume!(ws.iter().any(|w| *w > 0.0));
                let once = normalize(ws.iter().copied().enumerate()).unwrap();
                let twice = normalize(once.entries().iter().cloned()).unwrap();
                prop_assert_eq!(once.len(), twice.len());
                for ((k1, w1), (k2, w2)) in once.entries().iter().zip(twice.entries()) {
                    prop_assert_eq!(k1, k2);
                    prop_assert!((w1 - w2).abs() <= 1e-15);
                }
                let total: f64 = once.entries().iter().map(|(_, w)| w).sum();
                prop_assert!((total - 1.0).abs() <= SUM_TOLERANCE);
            }
        }
    }
}
