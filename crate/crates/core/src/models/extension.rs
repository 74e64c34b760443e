//! Trivial extensions `A ⊕ M` with the differential induced by a bimodule
//! map `h: M → A`, and the passage from DGAs to A∞-structures.
//!
//! Carrier grading: a vector of DGA degree `d` sits in carrier degree `d−1`,
//! so the algebra summand has carrier degree −1 and the module summand 0.
//! The DGA product then has carrier map degree +1 and the differential −1.

use std::sync::Arc;

use crate::bank::TupleBank;
use crate::derived::stasheff_check;
use crate::error::{Error, Result};
use crate::operator::{MultiOperator, Support};
use crate::report::{check_equal, check_vanishes};
use crate::scalar::{MultiSeries, ParamId};
use crate::space::{ElementBuilder, GradedElement, GradedSpace};

/// A DGA written on its carrier space: an unsigned associative product and
/// a differential of degree −1.
#[derive(Clone)]
pub struct Dga {
    pub product: MultiOperator,
    pub differential: MultiOperator,
}

impl Dga {
    pub fn space(&self) -> &Arc<GradedSpace> {
        self.product.space()
    }

    /// DGA degree parity of a carrier basis vector.
    fn dga_parity(space: &GradedSpace, idx: &crate::space::BasisIndex) -> bool {
        !space.parity_of(idx)
    }
}

/// Sum of arity-2 operators assumed to act on disjoint component pairs.
fn product_from_parts(parts: &[&MultiOperator]) -> Result<MultiOperator> {
    let space = parts[0].space();
    let one = MultiSeries::one(space.context());
    MultiOperator::linear_combination(space, 1, parts.iter().map(|p| (one.clone(), (*p).clone())))
}

/// A trivial extension `A ⊕ M` together with its DGA structure.
#[derive(Clone)]
pub struct TrivialExtension {
    pub dga: Dga,
    pub h: MultiOperator,
}

/// Assembles `(a_1,m_1)(a_2,m_2) = (a_1a_2, a_1m_2 + m_1a_2)` and the
/// differential `h̃(a, m) = (h(m), 0)` from its pieces and checks on `bank`
/// that the result is a DGA: associativity (which packages the bimodule
/// axioms), `h̃² = 0`, and the graded Leibniz rule for `h̃`. On mixed pairs
/// the Leibniz rule says that `h` is a bimodule map; on module pairs it is
/// `h(m_1)·m_2 = m_1·h(m_2)`. All inputs are unsigned DGA operations on the
/// two-component carrier space; `h` has carrier degree −1.
pub fn build_trivial_extension(
    mult: &MultiOperator,
    left: &MultiOperator,
    right: &MultiOperator,
    h: &MultiOperator,
    bank: &TupleBank,
) -> Result<TrivialExtension> {
    let product = product_from_parts(&[mult, left, right])?;
    if h.degree() != -1 {
        return Err(Error::DegreeMismatch { expected: -1, found: h.degree() });
    }
    let dga = Dga { product, differential: h.clone() };
    let fail = |what: &str| Error::Precondition(format!("trivial extension: {what} fails"));

    // associativity (x y) z = x (y z), unsigned
    let p = &dga.product;
    let lhs = unsigned_compose(p, 0)?;
    let rhs = unsigned_compose(p, 1)?;
    if !check_equal("associativity", &lhs, &rhs, &bank.of_length(3))?.is_ok() {
        return Err(fail("associativity"));
    }
    // h̃ is a degree −1 derivation: h̃(xy) = h̃(x)y + (−1)^{|x|} x h̃(y)
    let leibniz = leibniz_residual(&dga)?;
    if !check_vanishes("leibniz", &leibniz, &bank.of_length(2))?.is_ok() {
        return Err(fail("Leibniz rule"));
    }
    // h̃ ∘ h̃ = 0
    let sq = MultiOperator::compose(h, h)?;
    if !check_vanishes("square", &sq, &bank.of_length(1))?.is_ok() {
        return Err(fail("h̃² = 0"));
    }
    Ok(TrivialExtension { dga, h: h.clone() })
}

/// `(x, y, z) ↦ (xy)z` for `slot = 0` and `x(yz)` for `slot = 1`, without
/// Koszul signs (the DGA product has even DGA degree).
fn unsigned_compose(p: &MultiOperator, slot: usize) -> Result<MultiOperator> {
    let space = p.space().clone();
    let p = p.clone();
    Ok(MultiOperator::procedural(&space.clone(), 2, Support::from_arities([3], 0), move |t| {
        let basis = |i: usize| GradedElement::basis(&space, t[i]);
        if slot == 0 {
            let xy = p.eval(&[basis(0), basis(1)])?;
            p.eval(&[xy, basis(2)])
        } else {
            let yz = p.eval(&[basis(1), basis(2)])?;
            p.eval(&[basis(0), yz])
        }
    }))
}

fn leibniz_residual(dga: &Dga) -> Result<MultiOperator> {
    let space = dga.space().clone();
    let (p, d) = (dga.product.clone(), dga.differential.clone());
    Ok(MultiOperator::procedural(&space.clone(), 0, Support::from_arities([2], 0), move |t| {
        let x = GradedElement::basis(&space, t[0]);
        let y = GradedElement::basis(&space, t[1]);
        let lhs = d.eval(&[p.eval(&[x.clone(), y.clone()])?])?;
        let a = p.eval(&[d.eval(std::slice::from_ref(&x))?, y.clone()])?;
        let b = p.eval(&[x, d.eval(&[y])?])?.signed(Dga::dga_parity(&space, &t[0]));
        lhs.checked_sub(&a)?.checked_sub(&b)
    }))
}

/// The A∞-structure `m = m_2 + u·∂` of a DGA, with
/// `m_2(v_1, v_2) = (−1)^{|v_1|−1} v_1·v_2` (carrier degrees) and the
/// differential multiplied by the degree-2 parameter `u`. Fails unless the
/// Stasheff identities hold on `bank`.
pub fn dga_to_ainfty(dga: &Dga, u: ParamId, bank: &TupleBank) -> Result<MultiOperator> {
    let space = dga.space().clone();
    let ctx = space.context().clone();
    ctx.check(u)?;
    if ctx.get(u).degree != 2 {
        return Err(Error::InvalidParameter { name: ctx.get(u).name.clone(), reason: "must have degree 2".into() });
    }
    let m2 = signed_product(&dga.product);
    let u_series = MultiSeries::param(&ctx, u)?;
    let m1 = dga.differential.scale(&u_series)?;
    let m = m2.add(&m1)?;
    let report = stasheff_check(&m, bank)?;
    if !report.is_ok() {
        return Err(Error::Precondition(format!(
            "Stasheff identities fail: {}",
            report.to_json_lines().lines().next().unwrap_or_default()
        )));
    }
    Ok(m)
}

/// `m_2(v_1, v_2) = (−1)^{|v_1|−1} v_1·v_2`.
pub fn signed_product(product: &MultiOperator) -> MultiOperator {
    let space = product.space().clone();
    let p = product.clone();
    MultiOperator::procedural(&space.clone(), product.degree(), product.support().clone(), move |t| {
        let v = p.eval_basis(t)?;
        let mut b = ElementBuilder::new(&space);
        b.add_element(&v, None, !space.parity_of(&t[0]));
        Ok(b.finish())
    })
}
