//! Finite banks of basis tuples on which identities are verified.
//!
//! Every identity checked in this crate is multilinear, so vanishing on all
//! basis tuples of a window proves vanishing on the span of that window.

use std::ops::RangeInclusive;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::operator::Tuple;
use crate::space::{BasisIndex, GradedSpace};

#[derive(Debug, Clone, Default)]
pub struct TupleBank {
    tuples: Vec<Tuple>,
}

impl TupleBank {
    /// All basis tuples with length in `lengths`. For monomial spaces only
    /// tuples whose total polynomial degree stays within the space's cap
    /// are kept, so every product along the way stays inside the window.
    pub fn full(space: &Arc<GradedSpace>, lengths: RangeInclusive<usize>) -> Self {
        Self::with_weight(space, lengths, space.weight_cap())
    }

    pub fn with_weight(space: &Arc<GradedSpace>, lengths: RangeInclusive<usize>, weight_cap: Option<u32>) -> Self {
        let basis = space.basis();
        let weights: Vec<u32> = basis.iter().map(|b| space.weight_of(b)).collect();
        let cap = weight_cap.unwrap_or(u32::MAX);
        let mut tuples = Vec::new();
        for len in lengths {
            let mut cur = Tuple::new();
            fill(&basis, &weights, len, cap, &mut cur, &mut tuples);
        }
        TupleBank { tuples }
    }

    pub fn from_tuples(tuples: impl IntoIterator<Item = Vec<BasisIndex>>) -> Self {
        TupleBank { tuples: tuples.into_iter().map(Tuple::from_vec).collect() }
    }

    /// A reproducible subsample of at most `n` tuples, kept in bank order.
    pub fn sample(&self, n: usize, seed: u64) -> Self {
        if n >= self.tuples.len() {
            return self.clone();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx = sample(&mut rng, self.tuples.len(), n).into_vec();
        idx.sort_unstable();
        TupleBank { tuples: idx.into_iter().map(|i| self.tuples[i].clone()).collect() }
    }

    /// Tuples of exactly this length.
    pub fn of_length(&self, len: usize) -> Self {
        self.filter(|t| t.len() == len)
    }

    pub fn filter(&self, mut keep: impl FnMut(&[BasisIndex]) -> bool) -> Self {
        TupleBank { tuples: self.tuples.iter().filter(|t| keep(t)).cloned().collect() }
    }

    pub fn tuples(&self) -> impl Iterator<Item = &[BasisIndex]> + '_ {
        self.tuples.iter().map(|t| t.as_slice())
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

fn fill(basis: &[BasisIndex], weights: &[u32], len: usize, budget: u32, cur: &mut Tuple, out: &mut Vec<Tuple>) {
    if cur.len() == len {
        out.push(cur.clone());
        return;
    }
    for (b, &w) in basis.iter().zip(weights) {
        if w <= budget {
            cur.push(*b);
            fill(basis, weights, len, budget - w, cur, out);
            cur.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ParameterContext;
    use crate::space::{BasisKind, Component, TruncationPolicy};

    #[test]
    fn weight_capped_counts() {
        let sp = GradedSpace::new(
            "w",
            ParameterContext::empty(),
            vec![
                Component {
                    tag: "alg".into(),
                    degree: -1,
                    basis: BasisKind::Monomials { vars: vec!["x".into(), "y".into()], cap: 4 },
                },
                Component {
                    tag: "mod".into(),
                    degree: 0,
                    basis: BasisKind::Monomials { vars: vec!["x".into(), "y".into()], cap: 4 },
                },
            ],
            TruncationPolicy::Error,
        )
        .unwrap();
        // monomial tuples of total degree ≤ 4 in 2n variables: C(2n+4, 4)
        let bank = TupleBank::full(&sp, 1..=3);
        assert_eq!(bank.of_length(1).len(), 15 * 2);
        assert_eq!(bank.of_length(2).len(), 70 * 4);
        assert_eq!(bank.of_length(3).len(), 210 * 8);
        let s = bank.sample(100, 1);
        assert_eq!(s.len(), 100);
        assert_eq!(s.tuples().collect::<Vec<_>>(), bank.sample(100, 1).tuples().collect::<Vec<_>>());
    }
}
