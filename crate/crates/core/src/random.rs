//! Seeded random operators for identity testing.

use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHasher;

use crate::error::Result;
use crate::operator::{MultiOperator, Support};
use crate::scalar::{MultiSeries, ParameterContext, Rational};
use crate::space::{BasisIndex, BasisKind, Component, GradedElement, GradedSpace, TruncationPolicy};

/// Four atoms of degrees −1, 0, 0, 1 and no parameters.
pub fn small_test_space() -> Arc<GradedSpace> {
    small_test_space_with(ParameterContext::empty())
}

pub fn small_test_space_with(ctx: Arc<ParameterContext>) -> Arc<GradedSpace> {
    let atoms = [("e", -1), ("f", 0), ("g", 0), ("h", 1)];
    GradedSpace::new(
        "atoms4",
        ctx,
        atoms
            .iter()
            .map(|(n, d)| Component { tag: n.to_string(), degree: *d, basis: BasisKind::Atoms(vec!["1".into()]) })
            .collect(),
        TruncationPolicy::Error,
    )
    .expect("valid test space")
}

/// A random tabulated operator of the given degree on a finite space.
/// Each arity in `arities` is populated; each admissible output coefficient
/// is a small integer, zero with probability `1 - density`.
pub fn random_table_operator(
    space: &Arc<GradedSpace>,
    rng: &mut impl Rng,
    degree: i64,
    arities: &[usize],
    density: f64,
) -> Result<MultiOperator> {
    let basis = space.basis();
    let ctx = space.context();
    let mut entries = Vec::new();
    for &a in arities {
        let mut tuples: Vec<Vec<BasisIndex>> = vec![Vec::new()];
        for _ in 0..a {
            tuples =
                tuples.into_iter().flat_map(|t| basis.iter().map(move |b| [t.as_slice(), &[*b]].concat())).collect();
        }
        for t in tuples {
            let target = degree + t.iter().map(|i| space.degree_of(i)).sum::<i64>();
            let mut terms = Vec::new();
            for b in basis.iter().filter(|b| space.degree_of(b) == target) {
                if rng.gen_bool(density) {
                    let c: i64 = rng.gen_range(-3..=3);
                    terms.push((*b, MultiSeries::constant(ctx, Rational::from_int(c))));
                }
            }
            entries.push((t, GradedElement::from_terms(space, terms)));
        }
    }
    MultiOperator::table(space, degree, arities.iter().copied(), entries)
}

/// Draws a random homogeneous operator with degree in `degrees` and a
/// random non-empty subset of `0..=max_arity` as arities.
pub fn random_operator(
    space: &Arc<GradedSpace>,
    rng: &mut impl Rng,
    degrees: std::ops::RangeInclusive<i64>,
    max_arity: usize,
) -> Result<MultiOperator> {
    let degree = rng.gen_range(degrees);
    let mut arities: Vec<usize> = (0..=max_arity).filter(|_| rng.gen_bool(0.5)).collect();
    if arities.is_empty() {
        arities.push(rng.gen_range(1..=max_arity));
    }
    random_table_operator(space, rng, degree, &arities, 0.7)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random procedural operator on a space of monomial components that
/// never raises the total polynomial degree of its inputs, so evaluation
/// on capped tuples never leaves the window.
///
/// On each tuple the output lies in the component of the correct degree (if
/// any); it combines the product of the input monomials with a copy lowered
/// in one variable, both with small integer coefficients.
pub fn random_monomial_operator(space: &Arc<GradedSpace>, seed: u64, degree: i64, arities: &[usize]) -> MultiOperator {
    let sp = space.clone();
    MultiOperator::procedural(space, degree, Support::from_arities(arities.iter().copied(), 0), move |t| {
        let mut h = FxHasher::default();
        seed.hash(&mut h);
        t.hash(&mut h);
        let mut rng = ChaCha8Rng::seed_from_u64(h.finish());
        let target = degree + t.iter().map(|i| sp.degree_of(i)).sum::<i64>();
        let Some(comp) = sp.components().iter().position(|c| c.degree == target) else {
            return Ok(GradedElement::zero(&sp));
        };
        let nvars = match &sp.components()[comp].basis {
            BasisKind::Monomials { vars, .. } => vars.len(),
            BasisKind::Atoms(_) => return Ok(GradedElement::zero(&sp)),
        };
        let mut exps = [0u8; crate::space::MAX_VARS];
        for i in t {
            for (e, k) in exps.iter_mut().zip(i.key.iter()) {
                *e += k;
            }
        }
        let ctx = sp.context();
        let mut terms = Vec::new();
        let c: i64 = rng.gen_range(-2..=2);
        if let Some(idx) = sp.monomial(comp as u8, &exps[..nvars])? {
            terms.push((idx, MultiSeries::constant(ctx, Rational::from_int(c))));
        }
        let v = rng.gen_range(0..nvars);
        if exps[v] > 0 {
            exps[v] -= 1;
            let c: i64 = rng.gen_range(-2..=2);
            if let Some(idx) = sp.monomial(comp as u8, &exps[..nvars])? {
                terms.push((idx, MultiSeries::constant(ctx, Rational::from_int(c))));
            }
        }
        Ok(GradedElement::from_terms(&sp, terms))
    })
}
