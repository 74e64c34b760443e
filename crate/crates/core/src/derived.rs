//! The derived A∞-structure `M` on `W = Hom(T(V), V)`, the cup product, and
//! cochain-level verifiers for the identities they satisfy.
//!
//! For a structure `m` of degree 1:
//! `M_1(A) = m∘A − (−1)^{|A|} A∘m` and `M_k(A_1,…,A_k) = m{A_1,…,A_k}` for
//! `k ≥ 2`. All checks evaluate an explicit residual operator on a tuple bank.

use crate::bank::TupleBank;
use crate::error::{Error, Result};
use crate::operator::MultiOperator;
use crate::report::{check_vanishes, Report};
use crate::scalar::MultiSeries;

fn one(op: &MultiOperator) -> MultiSeries {
    MultiSeries::one(op.space().context())
}

fn signed(op: &MultiOperator, parity: bool) -> (MultiSeries, MultiOperator) {
    (one(op).signed(parity), op.clone())
}

fn combination(like: &MultiOperator, degree: i64, terms: Vec<(MultiSeries, MultiOperator)>) -> Result<MultiOperator> {
    MultiOperator::linear_combination(like.space(), degree, terms)
}

fn require_structure(m: &MultiOperator) -> Result<()> {
    if m.degree() != 1 {
        return Err(Error::DegreeMismatch { expected: 1, found: m.degree() });
    }
    Ok(())
}

/// `M_1(A) = m∘A − (−1)^{|A|} A∘m`.
pub fn derived_m1(m: &MultiOperator, a: &MultiOperator) -> Result<MultiOperator> {
    require_structure(m)?;
    combination(
        m,
        a.degree() + 1,
        vec![signed(&MultiOperator::compose(m, a)?, false), signed(&MultiOperator::compose(a, m)?, !a.parity())],
    )
}

/// `M_k(A_1,…,A_k)` of the flat derived structure: zero for `k = 0`,
/// [`derived_m1`] for `k = 1` and `m{A_1,…,A_k}` otherwise.
pub fn derived_mk(m: &MultiOperator, ops: &[MultiOperator]) -> Result<MultiOperator> {
    require_structure(m)?;
    match ops.len() {
        0 => Ok(MultiOperator::zero(m.space(), 1)),
        1 => derived_m1(m, &ops[0]),
        _ => MultiOperator::brace(m, ops),
    }
}

/// The non-flat variant `M_k(A_1,…,A_k) = m{A_1,…,A_k}` for all `k ≥ 0`.
pub fn derived_m_nonflat(m: &MultiOperator, ops: &[MultiOperator]) -> Result<MultiOperator> {
    require_structure(m)?;
    MultiOperator::brace(m, ops)
}

/// `(M∘M)(A_1,…,A_n) = Σ_{i≤j} (−1)^{|A_1|+…+|A_{i−1}|} M(A_1,…,M(A_i,…,A_j),…,A_n)`,
/// including the empty inner block (`M_0`) when `flat` is false.
pub fn derived_mm(m: &MultiOperator, ops: &[MultiOperator], flat: bool) -> Result<MultiOperator> {
    let big_m = |xs: &[MultiOperator]| if flat { derived_mk(m, xs) } else { derived_m_nonflat(m, xs) };
    let n = ops.len();
    let degree = 2 + ops.iter().map(|o| o.degree()).sum::<i64>();
    let mut terms = Vec::new();
    let mut prefix = false;
    for i in 0..=n {
        let lo = if flat { i + 1 } else { i };
        for j in lo..=n {
            let inner = big_m(&ops[i..j])?;
            let mut args: Vec<MultiOperator> = ops[..i].to_vec();
            args.push(inner);
            args.extend_from_slice(&ops[j..]);
            terms.push(signed(&big_m(&args)?, prefix));
        }
        if i < n {
            prefix ^= ops[i].parity();
        }
    }
    combination(m, degree, terms)
}

/// Residual `m∘m` of the Stasheff identities.
pub fn stasheff_check(m: &MultiOperator, bank: &TupleBank) -> Result<Report> {
    require_structure(m)?;
    check_vanishes("stasheff", &MultiOperator::compose(m, m)?, bank)
}

/// Residual `(M∘M)(A_1,…,A_n)` of the flat derived structure.
pub fn getzler_check(m: &MultiOperator, ops: &[MultiOperator], bank: &TupleBank) -> Result<Report> {
    check_vanishes("getzler", &derived_mm(m, ops, true)?, bank)
}

/// `A ∪ B = (−1)^{|A|−1} M_2(A, B)`.
pub fn cup(m: &MultiOperator, a: &MultiOperator, b: &MultiOperator) -> Result<MultiOperator> {
    let m2 = derived_mk(m, &[a.clone(), b.clone()])?;
    combination(m, m2.degree(), vec![signed(&m2, !a.parity())])
}

/// `D(A,B) + M_2(A,B) + (−1)^{|A||B|} M_2(B,A)` where
/// `D(A,B) = M_1(A∘B) − M_1(A)∘B − (−1)^{|A|} A∘M_1(B)`.
pub fn cup_comm_residual(m: &MultiOperator, a: &MultiOperator, b: &MultiOperator) -> Result<MultiOperator> {
    let degree = a.degree() + b.degree() + 1;
    let m1 = |x: &MultiOperator| derived_m1(m, x);
    let terms = vec![
        signed(&m1(&MultiOperator::compose(a, b)?)?, false),
        signed(&MultiOperator::compose(&m1(a)?, b)?, true),
        signed(&MultiOperator::compose(a, &m1(b)?)?, !a.parity()),
        signed(&derived_mk(m, &[a.clone(), b.clone()])?, false),
        signed(&derived_mk(m, &[b.clone(), a.clone()])?, a.parity() && b.parity()),
    ];
    combination(m, degree, terms)
}

pub fn cup_comm_check(m: &MultiOperator, a: &MultiOperator, b: &MultiOperator, bank: &TupleBank) -> Result<Report> {
    check_vanishes("cup_comm", &cup_comm_residual(m, a, b)?, bank)
}

/// `(M_2∘M_2 + [M_1, M_3])(A, B, C)`.
pub fn cup_assoc_residual(
    m: &MultiOperator,
    a: &MultiOperator,
    b: &MultiOperator,
    c: &MultiOperator,
) -> Result<MultiOperator> {
    let mk = |xs: &[MultiOperator]| derived_mk(m, xs);
    let m1 = |x: &MultiOperator| derived_m1(m, x);
    let (pa, pb) = (a.parity(), b.parity());
    let degree = a.degree() + b.degree() + c.degree() + 2;
    let terms = vec![
        // M_2∘M_2
        signed(&mk(&[mk(&[a.clone(), b.clone()])?, c.clone()])?, false),
        signed(&mk(&[a.clone(), mk(&[b.clone(), c.clone()])?])?, pa),
        // M_1∘M_3 + M_3∘M_1
        signed(&m1(&mk(&[a.clone(), b.clone(), c.clone()])?)?, false),
        signed(&mk(&[m1(a)?, b.clone(), c.clone()])?, false),
        signed(&mk(&[a.clone(), m1(b)?, c.clone()])?, pa),
        signed(&mk(&[a.clone(), b.clone(), m1(c)?])?, pa ^ pb),
    ];
    combination(m, degree, terms)
}

pub fn cup_assoc_check(
    m: &MultiOperator,
    a: &MultiOperator,
    b: &MultiOperator,
    c: &MultiOperator,
    bank: &TupleBank,
) -> Result<Report> {
    check_vanishes("cup_assoc", &cup_assoc_residual(m, a, b, c)?, bank)
}

/// `M_1(M_2(A,B)) + M_2(M_1(A),B) + (−1)^{|A|} M_2(A,M_1(B))`.
pub fn m12_residual(m: &MultiOperator, a: &MultiOperator, b: &MultiOperator) -> Result<MultiOperator> {
    let mk = |xs: &[MultiOperator]| derived_mk(m, xs);
    let m1 = |x: &MultiOperator| derived_m1(m, x);
    let degree = a.degree() + b.degree() + 2;
    let terms = vec![
        signed(&m1(&mk(&[a.clone(), b.clone()])?)?, false),
        signed(&mk(&[m1(a)?, b.clone()])?, false),
        signed(&mk(&[a.clone(), m1(b)?])?, a.parity()),
    ];
    combination(m, degree, terms)
}

pub fn m12_check(m: &MultiOperator, a: &MultiOperator, b: &MultiOperator, bank: &TupleBank) -> Result<Report> {
    check_vanishes("m12", &m12_residual(m, a, b)?, bank)
}

/// The graded Poisson relation residual
/// `[A,M_2(B,C)] − (−1)^{|A|}M_2([A,B],C) − (−1)^{|A|(|B|+1)}M_2(B,[A,C])
///  − (−1)^{|A|}(M_1(A{B,C}) − M_1(A){B,C} − (−1)^{|A|}A{M_1(B),C} − (−1)^{|A|+|B|}A{B,M_1(C)})`.
pub fn poisson_residual(
    m: &MultiOperator,
    a: &MultiOperator,
    b: &MultiOperator,
    c: &MultiOperator,
) -> Result<MultiOperator> {
    let mk = |xs: &[MultiOperator]| derived_mk(m, xs);
    let m1 = |x: &MultiOperator| derived_m1(m, x);
    let br = MultiOperator::bracket;
    let brace = MultiOperator::brace;
    let (pa, pb) = (a.parity(), b.parity());
    let degree = a.degree() + b.degree() + c.degree() + 1;
    let terms = vec![
        signed(&br(a, &mk(&[b.clone(), c.clone()])?)?, false),
        signed(&mk(&[br(a, b)?, c.clone()])?, !pa),
        signed(&mk(&[b.clone(), br(a, c)?])?, !(pa && !pb)),
        signed(&m1(&brace(a, &[b.clone(), c.clone()])?)?, !pa),
        signed(&brace(&m1(a)?, &[b.clone(), c.clone()])?, pa),
        signed(&brace(a, &[m1(b)?, c.clone()])?, false),
        signed(&brace(a, &[b.clone(), m1(c)?])?, pb),
    ];
    combination(m, degree, terms)
}

pub fn poisson_check(
    m: &MultiOperator,
    a: &MultiOperator,
    b: &MultiOperator,
    c: &MultiOperator,
    bank: &TupleBank,
) -> Result<Report> {
    check_vanishes("poisson", &poisson_residual(m, a, b, c)?, bank)
}
