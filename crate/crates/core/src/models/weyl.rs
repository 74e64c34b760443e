//! The trivial extension `A_t ⊕ A_t` of the Weyl algebra with `h = id`, its
//! A∞-structure `m = m_2 + u∂`, the cocycles `Δ_n`, and the minimal
//! deformation obtained by flowing along `Δ_1`.
//!
//! Carrier space: two monomial components `alg` (degree −1) and `mod`
//! (degree 0) in the same variables with a common degree cap. Context
//! parameters: `t` (degree 0, the star-product parameter), `u` (degree 2),
//! `s` (degree 0, the flow parameter) and `g` (degree 0, for gauge runs).

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::bank::TupleBank;
use crate::deformation::{eval_cup_word, integrate_flow, CupWord, Family, FlowSeries};
use crate::error::{Error, Result};
use crate::models::extension::{dga_to_ainfty, Dga};
use crate::models::poly::{Poly, PolyAlgebra};
use crate::operator::{MultiOperator, Support};
use crate::report::{check_vanishes, Report};
use crate::scalar::{Exponents, MultiSeries, ParamId, Parameter, ParameterContext, Rational};
use crate::space::{BasisIndex, BasisKind, Component, ElementBuilder, GradedElement, GradedSpace, TruncationPolicy};

pub const ALG: u8 = 0;
pub const MOD: u8 = 1;

/// Tuples used for the consistency checks run while building a model.
const BUILD_CHECK_TUPLES: usize = 2000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylConfig {
    pub vars: usize,
    pub degree_cap: u32,
    /// Defaults to the standard symplectic form.
    pub omega: Option<Vec<Vec<Rational>>>,
    pub t_cap: Option<u32>,
    pub u_cap: u32,
    pub s_cap: u32,
    pub g_cap: u32,
    pub policy: TruncationPolicy,
}

impl Default for WeylConfig {
    fn default() -> Self {
        WeylConfig {
            vars: 2,
            degree_cap: 4,
            omega: None,
            t_cap: None,
            u_cap: 2,
            s_cap: 3,
            g_cap: 2,
            policy: TruncationPolicy::Error,
        }
    }
}

/// Polynomial coefficients of powers of `t`.
type TPoly = BTreeMap<u32, Poly>;

#[derive(Clone)]
pub struct WeylModel {
    pub config: WeylConfig,
    pub poly: PolyAlgebra,
    pub space: Arc<GradedSpace>,
    pub t: ParamId,
    pub u: ParamId,
    pub s: ParamId,
    pub g: ParamId,
    pub dga: Dga,
    /// `m = m_2 + u·∂`.
    pub m: MultiOperator,
    /// The signed star product `m_2` alone.
    pub m2: MultiOperator,
    pub family: Family,
}

fn var_names(n: usize) -> Vec<String> {
    if n == 2 {
        vec!["x".into(), "y".into()]
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

impl WeylModel {
    pub fn new(config: WeylConfig) -> Result<Self> {
        let poly = match &config.omega {
            Some(w) => {
                if w.len() != config.vars {
                    return Err(Error::InvalidParameter {
                        name: "omega".into(),
                        reason: format!("expected a {0}×{0} matrix", config.vars),
                    });
                }
                PolyAlgebra::new(w.clone(), config.degree_cap)?
            }
            None => {
                if config.vars == 0 || !config.vars.is_multiple_of(2) {
                    return Err(Error::InvalidParameter {
                        name: "vars".into(),
                        reason: "must be even and positive".into(),
                    });
                }
                PolyAlgebra::standard(config.vars, config.degree_cap)?
            }
        };
        let ctx = ParameterContext::new(vec![
            Parameter::new("t", 0, config.t_cap.unwrap_or(config.degree_cap)),
            Parameter::new("u", 2, config.u_cap),
            Parameter::new("s", 0, config.s_cap),
            Parameter::new("g", 0, config.g_cap),
        ])?;
        let vars = var_names(config.vars);
        let comp = |tag: &str, degree| Component {
            tag: tag.into(),
            degree,
            basis: BasisKind::Monomials { vars: vars.clone(), cap: config.degree_cap },
        };
        let id = format!("weyl{}d{}", config.vars, config.degree_cap);
        let space = GradedSpace::new(id, ctx.clone(), vec![comp("alg", -1), comp("mod", 0)], config.policy)?;
        let (t, u, s, g) = (ParamId(0), ParamId(1), ParamId(2), ParamId(3));

        let product = star_operator(&space, &poly, t, product_component);
        let differential = MultiOperator::procedural(&space.clone(), -1, Support::from_arities([1], 0), {
            let space = space.clone();
            move |tuple| {
                let v = tuple[0];
                Ok(if v.comp == MOD {
                    GradedElement::basis(&space, BasisIndex { comp: ALG, key: v.key })
                } else {
                    GradedElement::zero(&space)
                })
            }
        });
        let dga = Dga { product, differential };
        let full = TupleBank::full(&space, 1..=3);
        let bank = if full.len() > BUILD_CHECK_TUPLES { full.sample(BUILD_CHECK_TUPLES, 0) } else { full };
        let m = dga_to_ainfty(&dga, u, &bank)?;
        let m2 = m.eval_zero(u)?;
        let family = Family::new(m.clone(), vec![t, u])?;
        Ok(WeylModel { config, poly, space, t, u, s, g, dga, m, m2, family })
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    pub fn to_poly(&self, idx: &BasisIndex) -> Poly {
        Poly::monomial(idx.key, Rational::one())
    }

    /// Adds `coeff · p` placed in component `comp`.
    fn push_poly(&self, b: &mut ElementBuilder, comp: u8, p: &Poly, coeff: &MultiSeries) -> Result<()> {
        push_poly(&self.space, self.nvars(), b, comp, p, coeff)
    }

    fn t_power(&self, k: u32) -> Result<MultiSeries> {
        t_power(&self.space, self.t, k)
    }

    /// The cup word `[t, u, …, u]` with `n` copies of `u`.
    pub fn delta_word(&self, n: usize) -> CupWord {
        let mut idx = vec![self.t];
        idx.extend(std::iter::repeat_n(self.u, n));
        CupWord::monomial(self.space.context(), idx)
    }

    /// `Δ_n = m_{(t)} ∪ m_{(u)} ∪ ⋯ ∪ m_{(u)}`.
    pub fn delta_n(&self, n: usize) -> Result<MultiOperator> {
        eval_cup_word(&self.delta_word(n), &self.family)
    }

    /// `v_1, …, v_{n+2} ↦ σ(v_1)·((v_1∗′v_2) ∗ ∂v_3 ∗ ⋯ ∗ ∂v_{n+2})` where
    /// `∗′ = Σ k t^{k−1} ⋆_k` is the `t`-derivative of the star product and
    /// `σ = +1` on `alg`, `−1` on `mod`.
    pub fn first_order_cocycle(&self, n: usize) -> MultiOperator {
        let me = self.clone();
        let support = Support::from_arities([n + 2], 1 << self.t.0);
        MultiOperator::procedural(&self.space.clone(), 1, support, move |tuple| {
            let zero = GradedElement::zero(&me.space);
            let Some(out) = product_component(tuple[0].comp, tuple[1].comp) else {
                return Ok(zero);
            };
            if tuple[2..].iter().any(|v| v.comp != MOD) {
                return Ok(zero);
            }
            let (a, b) = (me.to_poly(&tuple[0]), me.to_poly(&tuple[1]));
            let mut acc = TPoly::new();
            for (k, p) in me.poly.weyl_star(&a, &b) {
                if k > 0 {
                    acc.insert(k - 1, p.scale(&Rational::from_int(k as i64)));
                }
            }
            for v in &tuple[2..] {
                acc = star_tpoly(&me.poly, &acc, &me.to_poly(v));
            }
            let mut bld = ElementBuilder::new(&me.space);
            let sign = Rational::sign(tuple[0].comp == MOD);
            for (k, p) in &acc {
                let c = me.t_power(*k)?.scale(&sign);
                me.push_poly(&mut bld, out, p, &c)?;
            }
            Ok(bld.finish())
        })
    }

    /// Residual of the Hochschild cocycle identity for `X = first_order_cocycle(n)`:
    ///
    /// `−a_0·X(a_1,…) − Σ_{k=0}^{n+1} (−1)^{|a_0|+⋯+|a_k|} X(…, a_k·a_{k+1}, …)
    ///  + (−1)^{|a_0|+⋯+|a_{n+1}|} X(a_0,…,a_{n+1})·a_{n+2}`,
    ///
    /// with the unsigned product `·` and carrier degrees `|a_i|`.
    pub fn hochschild_residual(&self, n: usize) -> MultiOperator {
        let x = self.first_order_cocycle(n);
        let dot = self.dga.product.clone();
        let space = self.space.clone();
        let support = Support::from_arities([n + 3], 1 << self.t.0);
        MultiOperator::procedural(&self.space.clone(), 2, support, move |tuple| {
            let a: Vec<GradedElement> = tuple.iter().map(|i| GradedElement::basis(&space, *i)).collect();
            let deg: Vec<bool> = tuple.iter().map(|i| space.parity_of(i)).collect();
            let mut b = ElementBuilder::new(&space);
            b.add_element(&dot.eval(&[a[0].clone(), x.eval(&a[1..])?])?, None, true);
            let mut prefix = false;
            for k in 0..=n + 1 {
                prefix ^= deg[k];
                let inner = dot.eval(&a[k..k + 2])?;
                let mut args = a[..k].to_vec();
                args.push(inner);
                args.extend_from_slice(&a[k + 2..]);
                b.add_element(&x.eval(&args)?, None, !prefix);
            }
            let last = dot.eval(&[x.eval(&a[..n + 2])?, a[n + 2].clone()])?;
            b.add_element(&last, None, prefix);
            Ok(b.finish())
        })
    }

    pub fn hochschild_check(&self, n: usize, bank: &TupleBank) -> Result<Report> {
        check_vanishes(&format!("hochschild[{n}]"), &self.hochschild_residual(n), bank)
    }

    /// Flows the family along `Δ_1` up to `s^{s_cap}` and sets `u = 0`.
    /// Fails unless the result is minimal.
    pub fn minimal_weyl_structure(&self) -> Result<FlowSeries> {
        let flow = integrate_flow(&self.family, &self.delta_word(1), self.s, self.config.s_cap as usize)?;
        let bar = flow.restrict_zero(self.u)?;
        if bar.orders().iter().any(|o| o.support().contains(0) || o.support().contains(1)) {
            return Err(Error::Precondition("restricted flow is not minimal".into()));
        }
        Ok(bar)
    }

    /// The flow along `Δ_1` before restricting to `u = 0`.
    pub fn delta1_flow(&self) -> Result<FlowSeries> {
        integrate_flow(&self.family, &self.delta_word(1), self.s, self.config.s_cap as usize)
    }

    /// All weight-capped tuples of the given lengths.
    pub fn bank(&self, lengths: std::ops::RangeInclusive<usize>) -> TupleBank {
        TupleBank::full(&self.space, lengths)
    }

    /// The module element `mod:p` for a monomial `p`.
    pub fn module_monomial(&self, exps: &[u8]) -> Result<GradedElement> {
        let idx = self
            .space
            .monomial(MOD, exps)?
            .ok_or(Error::Truncation { cap: self.config.degree_cap, degree: exps.iter().map(|&e| e as u32).sum() })?;
        Ok(GradedElement::basis(&self.space, idx))
    }
}

/// Output component of the trivial-extension product, if nonzero.
pub fn product_component(a: u8, b: u8) -> Option<u8> {
    match (a, b) {
        (ALG, ALG) => Some(ALG),
        (MOD, MOD) => None,
        _ => Some(MOD),
    }
}

fn t_power(space: &Arc<GradedSpace>, t: ParamId, k: u32) -> Result<MultiSeries> {
    let cap = space.context().get(t).cap;
    if k > cap {
        return match space.policy() {
            TruncationPolicy::Error => Err(Error::Truncation { cap, degree: k }),
            TruncationPolicy::Drop => Ok(MultiSeries::zero(space.context())),
        };
    }
    Ok(MultiSeries::monomial(space.context(), Exponents::single(t, k as u8), Rational::one()))
}

fn push_poly(
    space: &Arc<GradedSpace>,
    nvars: usize,
    b: &mut ElementBuilder,
    comp: u8,
    p: &Poly,
    coeff: &MultiSeries,
) -> Result<()> {
    for (e, q) in p.terms() {
        if let Some(idx) = space.monomial(comp, &e[..nvars])? {
            b.add(idx, &coeff.scale(q));
        }
    }
    Ok(())
}

fn star_tpoly(poly: &PolyAlgebra, acc: &TPoly, b: &Poly) -> TPoly {
    let mut out = TPoly::new();
    for (i, p) in acc {
        for (k, q) in poly.weyl_star(p, b) {
            let e = out.entry(i + k).or_default();
            *e = e.add(&q);
        }
    }
    out.retain(|_, p| !p.is_zero());
    out
}

/// The unsigned star product `v_1 ∗ v_2` on the components selected by `rule`.
pub fn star_operator(
    space: &Arc<GradedSpace>,
    poly: &PolyAlgebra,
    t: ParamId,
    rule: fn(u8, u8) -> Option<u8>,
) -> MultiOperator {
    let sp = space.clone();
    let poly = poly.clone();
    MultiOperator::procedural(space, 1, Support::from_arities([2], 1 << t.0), move |tuple| {
        let mut b = ElementBuilder::new(&sp);
        if let Some(out) = rule(tuple[0].comp, tuple[1].comp) {
            let a = Poly::monomial(tuple[0].key, Rational::one());
            let c = Poly::monomial(tuple[1].key, Rational::one());
            for (k, p) in poly.weyl_star(&a, &c) {
                push_poly(&sp, poly.nvars(), &mut b, out, &p, &t_power(&sp, t, k)?)?;
            }
        }
        Ok(b.finish())
    })
}
