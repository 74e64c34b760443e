//! Closed-form structure maps of the minimal deformation at `t = 0`.
//!
//! `f_{n+1}(a_1,…,a_n)` is the sum over [`PartitionTerm`]s of
//! `a_1 ⋆_{k_1} B_1 ⋆_{k_2} B_2 ⋯ ⋆_{k_p} B_p`, where `B_j` is the next run
//! of `l_j` arguments joined by the plain product. Every operation is
//! performed from left to right: the accumulated value meets the first
//! argument of a block through `⋆_{k_j}` and the rest of the block through
//! the plain product. The only nonzero maps are
//!
//! * `m_n(a, b, u_3, …, u_n) = s^{n−2} f_n(a, b, u_3, …, u_{n−1})·u_n` in `alg`,
//! * `m_n(a, u_2, …, u_n) = s^{n−2} f_n(a, u_2, …, u_{n−1})·u_n` in `mod`,
//! * `m_n(u_1, b, u_3, …, u_n) = −s^{n−2} f_n(u_1, b, u_3, …, u_{n−1})·u_n` in `mod`,
//!
//! where `a, b` live in `alg` and the `u_i` in `mod`.

use crate::error::Result;
use crate::models::poly::{Poly, PolyAlgebra};
use crate::models::weyl::{WeylModel, ALG, MOD};
use crate::operator::{MultiOperator, Support};
use crate::scalar::{Exponents, MultiSeries, Rational};
use crate::space::{BasisIndex, ElementBuilder, GradedElement};

/// One summand of `f_{n+1}`: `p` blocks of sizes `l` joined by `⋆_{k_j}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PartitionTerm {
    pub p: usize,
    pub l: Vec<usize>,
    pub k: Vec<usize>,
}

/// Compositions of `total` into `parts` positive parts, lexicographically.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All terms of `f_{n+1}` for `n` arguments: `Σl = Σk = n − 1`, all parts
/// positive, and `l_j + ⋯ + l_p ≥ k_j + ⋯ + k_p` for every `j ≥ 2`.
/// Ordered lexicographically in `(p, l, k)`.
pub fn partition_terms(n_args: usize) -> Vec<PartitionTerm> {
    let total = n_args.saturating_sub(1);
    if total == 0 {
        return vec![PartitionTerm { p: 0, l: vec![], k: vec![] }];
    }
    let mut out = Vec::new();
    for p in 1..=total {
        let ls = compositions(total, p);
        let ks = compositions(total, p);
        for l in &ls {
            for k in &ks {
                let ok = (1..p).all(|j| l[j..].iter().sum::<usize>() >= k[j..].iter().sum::<usize>());
                if ok {
                    out.push(PartitionTerm { p, l: l.clone(), k: k.clone() });
                }
            }
        }
    }
    out
}

/// `f_{n+1}(a_1,…,a_n)`.
pub fn closed_form_f(poly: &PolyAlgebra, args: &[Poly]) -> Poly {
    let mut out = Poly::zero();
    if args.is_empty() {
        return out;
    }
    for term in partition_terms(args.len()) {
        let mut acc = args[0].clone();
        let mut pos = 1;
        for (l, k) in term.l.iter().zip(&term.k) {
            acc = poly.star_k(&acc, &args[pos], *k as u32);
            for a in &args[pos + 1..pos + l] {
                acc = acc.mul(a);
            }
            pos += l;
            if acc.is_zero() {
                break;
            }
        }
        out = out.add(&acc);
    }
    out
}

/// Which of the three nonzero input patterns a tuple has.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotPattern {
    /// `(alg, alg, mod, …)`, output in `alg`.
    AlgAlg,
    /// `(alg, mod, mod, …)`, output in `mod`.
    AlgMod,
    /// `(mod, alg, mod, …)`, output in `mod` with a minus sign.
    ModAlg,
}

impl SlotPattern {
    pub fn classify(tuple: &[BasisIndex]) -> Option<SlotPattern> {
        if tuple.len() < 2 || tuple[2..].iter().any(|v| v.comp != MOD) {
            return None;
        }
        match (tuple[0].comp, tuple[1].comp) {
            (ALG, ALG) => Some(SlotPattern::AlgAlg),
            (ALG, MOD) => Some(SlotPattern::AlgMod),
            (MOD, ALG) => Some(SlotPattern::ModAlg),
            _ => None,
        }
    }

    fn output(self) -> (u8, bool) {
        match self {
            SlotPattern::AlgAlg => (ALG, false),
            SlotPattern::AlgMod => (MOD, false),
            SlotPattern::ModAlg => (MOD, true),
        }
    }
}

/// The arity-`n` map `m_n` (`n ≥ 2`) of the closed-form structure.
pub fn closed_form_m(model: &WeylModel, n: usize) -> MultiOperator {
    let me = model.clone();
    let s = model.s;
    let support = Support::from_arities([n], 1 << s.0);
    MultiOperator::procedural(&model.space.clone(), 1, support, move |tuple| {
        let ctx = me.space.context();
        let Some(pattern) = SlotPattern::classify(tuple) else {
            return Ok(GradedElement::zero(&me.space));
        };
        let (comp, negate) = pattern.output();
        let polys: Vec<Poly> = tuple.iter().map(|i| me.to_poly(i)).collect();
        let value = closed_form_f(&me.poly, &polys[..n - 1]).mul(&polys[n - 1]);
        let sn = MultiSeries::monomial(ctx, Exponents::single(s, (n - 2) as u8), Rational::sign(negate));
        let mut b = ElementBuilder::new(&me.space);
        for (e, q) in value.terms() {
            if let Some(idx) = me.space.monomial(comp, &e[..me.nvars()])? {
                b.add(idx, &sn.scale(q));
            }
        }
        Ok(b.finish())
    })
}

/// `Σ_{n=2}^{max_arity} m_n`.
pub fn closed_form_structure(model: &WeylModel, max_arity: usize) -> Result<MultiOperator> {
    let ctx = model.space.context();
    let terms = (2..=max_arity).map(|n| (MultiSeries::one(ctx), closed_form_m(model, n)));
    MultiOperator::linear_combination(&model.space, 1, terms)
}
