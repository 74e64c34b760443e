//! Families of A∞-structures, cup words in their parameter derivatives, the
//! inner-deformation flow, gauge transformations, local finiteness and
//! Maurer–Cartan element flows.

use std::collections::HashMap;
use std::sync::Arc;

use crate::bank::TupleBank;
use crate::derived::derived_m1;
use crate::error::{Error, Result};
use crate::operator::MultiOperator;
use crate::report::{check_vanishes, Report};
use crate::scalar::{factorial, MultiSeries, ParamId, Rational};
use crate::space::{ElementDegree, GradedElement, GradedSpace};

/// A structure `m` whose coefficients depend on the parameters `params`.
#[derive(Clone)]
pub struct Family {
    m: MultiOperator,
    params: Vec<ParamId>,
}

impl Family {
    pub fn new(m: MultiOperator, params: Vec<ParamId>) -> Result<Self> {
        if m.degree() != 1 {
            return Err(Error::DegreeMismatch { expected: 1, found: m.degree() });
        }
        for p in &params {
            m.space().context().check(*p)?;
        }
        Ok(Family { m, params })
    }

    pub fn m(&self) -> &MultiOperator {
        &self.m
    }

    pub fn params(&self) -> &[ParamId] {
        &self.params
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        self.m.space()
    }

    fn require(&self, p: ParamId) -> Result<()> {
        if self.params.contains(&p) {
            Ok(())
        } else {
            Err(Error::UnknownParameter(self.space().context().get(p).name.clone()))
        }
    }

    /// `m_{(i_1…i_k)} = ∂^k m / ∂t_{i_1}⋯∂t_{i_k}`.
    pub fn partial(&self, indices: &[ParamId]) -> Result<MultiOperator> {
        let mut op = self.m.clone();
        for &p in indices {
            self.require(p)?;
            op = op.partial(p)?;
        }
        Ok(op)
    }

    /// The undeformed structure: all family parameters set to zero.
    pub fn at_zero(&self) -> Result<MultiOperator> {
        let mut op = self.m.clone();
        for &p in &self.params {
            op = op.eval_zero(p)?;
        }
        Ok(op)
    }
}

pub fn family_partial(family: &Family, p: ParamId) -> Result<MultiOperator> {
    family.partial(&[p])
}

/// Residual of `M_1(m_{(i)}) = [m, m_{(i)}]`.
pub fn cocycle_check(family: &Family, p: ParamId, bank: &TupleBank) -> Result<Report> {
    let mi = family.partial(&[p])?;
    check_vanishes("cocycle", &derived_m1(family.m(), &mi)?, bank)
}

/// Residual of `[m_{(i)}, m_{(j)}] + M_1(m_{(ij)})`.
pub fn bracket_triviality_check(family: &Family, i: ParamId, j: ParamId, bank: &TupleBank) -> Result<Report> {
    let br = MultiOperator::bracket(&family.partial(&[i])?, &family.partial(&[j])?)?;
    let m1 = derived_m1(family.m(), &family.partial(&[i, j])?)?;
    check_vanishes("bracket_triviality", &br.add(&m1)?, bank)
}

/// A polynomial in cup products of parameter derivatives:
/// `Σ c · m_{(i_1)} ∪ ⋯ ∪ m_{(i_l)}`, nested to the left.
#[derive(Clone, Debug)]
pub struct CupWord {
    pub terms: Vec<(MultiSeries, Vec<ParamId>)>,
}

impl CupWord {
    /// A single monomial with coefficient one.
    pub fn monomial(ctx: &Arc<crate::scalar::ParameterContext>, indices: Vec<ParamId>) -> Self {
        CupWord { terms: vec![(MultiSeries::one(ctx), indices)] }
    }

    /// Total operator degree `2l − 1 − Σ|t_{i_j}| + |c|`, common to all terms:
    /// each `m_{(i)}` has degree `1 − |t_i|` and each cup adds one.
    pub fn degree(&self, ctx: &crate::scalar::ParameterContext) -> Result<i64> {
        let mut out = None;
        for (c, idx) in &self.terms {
            if idx.is_empty() {
                return Err(Error::Precondition("empty cup monomial".into()));
            }
            for p in idx {
                ctx.check(*p)?;
            }
            let Some(cd) = c.degree() else {
                if c.is_zero() {
                    continue;
                }
                return Err(Error::Inhomogeneous);
            };
            let d = 2 * idx.len() as i64 - 1 - idx.iter().map(|p| ctx.get(*p).degree).sum::<i64>() + cd;
            match out {
                None => out = Some(d),
                Some(e) if e != d => return Err(Error::Inhomogeneous),
                _ => {}
            }
        }
        out.ok_or_else(|| Error::Precondition("zero cup word".into()))
    }

    fn is_zero(&self) -> bool {
        self.terms.iter().all(|(c, _)| c.is_zero())
    }
}

/// `W_1 = F_1`, `W_j = (−1)^{|W_{j−1}|−1} O_{j−1}{W_{j−1}, F_j}`: the left-nested
/// cup product `F_1 ∪ ⋯ ∪ F_l` where the `j`-th cup is taken with respect to
/// the structure `O_j`.
pub fn cup_chain(outers: &[MultiOperator], factors: &[MultiOperator]) -> Result<MultiOperator> {
    if factors.is_empty() || outers.len() + 1 != factors.len() {
        return Err(Error::Precondition("cup chain needs l factors and l−1 structures".into()));
    }
    let mut w = factors[0].clone();
    for (o, f) in outers.iter().zip(&factors[1..]) {
        let b = MultiOperator::brace(o, &[w.clone(), f.clone()])?;
        w = if w.parity() { b } else { b.neg() };
    }
    Ok(w)
}

/// `Δ[m] = Σ c · m_{(i_1)} ∪ ⋯ ∪ m_{(i_l)}`.
pub fn eval_cup_word(word: &CupWord, family: &Family) -> Result<MultiOperator> {
    let ctx = family.space().context();
    let degree = word.degree(ctx)?;
    let mut terms = Vec::new();
    for (c, idx) in &word.terms {
        let factors = idx.iter().map(|p| family.partial(&[*p])).collect::<Result<Vec<_>>>()?;
        let outers = vec![family.m().clone(); idx.len() - 1];
        terms.push((c.clone(), cup_chain(&outers, &factors)?));
    }
    MultiOperator::linear_combination(family.space(), degree, terms)
}

/// All weak compositions of `total` into `parts` non-negative parts.
fn weak_compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in weak_compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The solution `m̃ = Σ_k s^k m_(k)` of `∂m̃/∂s = Δ[m̃]`, `m̃|_{s=0} = m`.
#[derive(Clone)]
pub struct FlowSeries {
    family: Family,
    word: CupWord,
    flow: ParamId,
    orders: Vec<MultiOperator>,
}

impl FlowSeries {
    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn word(&self) -> &CupWord {
        &self.word
    }

    pub fn flow(&self) -> ParamId {
        self.flow
    }

    /// `m_(0), …, m_(cap)`.
    pub fn orders(&self) -> &[MultiOperator] {
        &self.orders
    }

    pub fn order_cap(&self) -> usize {
        self.orders.len() - 1
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        self.family.space()
    }

    /// `Σ_k s^k m_(k)` as a single operator.
    pub fn assemble(&self) -> Result<MultiOperator> {
        let ctx = self.space().context();
        let terms = self
            .orders
            .iter()
            .enumerate()
            .map(|(k, op)| Ok((MultiSeries::param(ctx, self.flow)?.pow(k as u32), op.clone())))
            .collect::<Result<Vec<_>>>()?;
        MultiOperator::linear_combination(self.space(), 1, terms)
    }

    /// Sets a family parameter to zero in every order, e.g. `m̄ = m̃|_{u=0}`.
    pub fn restrict_zero(&self, p: ParamId) -> Result<FlowSeries> {
        let orders = self.orders.iter().map(|o| o.eval_zero(p)).collect::<Result<Vec<_>>>()?;
        let m = self.family.m.eval_zero(p)?;
        let params = self.family.params.iter().copied().filter(|q| *q != p).collect();
        Ok(FlowSeries { family: Family { m, params }, word: self.word.clone(), flow: self.flow, orders })
    }
}

/// Taylor recursion `m_(k+1) = (1/(k+1)) · [s^k] Δ[m̃_{≤k}]`.
///
/// The flow parameter must have degree `1 − |Δ|`, be even, and not occur in
/// the family or in the word's coefficients.
pub fn integrate_flow(family: &Family, word: &CupWord, flow: ParamId, order_cap: usize) -> Result<FlowSeries> {
    let space = family.space().clone();
    let ctx = space.context().clone();
    ctx.check(flow)?;
    let name = ctx.get(flow).name.clone();
    if family.params.contains(&flow) || !family.m.support().depending_on(flow.0).is_empty() {
        return Err(Error::InvalidParameter { name, reason: "the family already depends on it".into() });
    }
    if order_cap < 1 {
        return Err(Error::InvalidParameter { name, reason: "order cap must be at least 1".into() });
    }
    if (order_cap as u32) > ctx.get(flow).cap {
        return Err(Error::InvalidParameter { name, reason: "order cap exceeds the parameter cap".into() });
    }
    let mut orders = vec![family.m.clone()];
    if word.is_zero() {
        orders.resize(order_cap + 1, MultiOperator::zero(&space, 1));
        return Ok(FlowSeries { family: family.clone(), word: word.clone(), flow, orders });
    }
    let wd = word.degree(&ctx)?;
    if ctx.get(flow).degree != 1 - wd {
        return Err(Error::InvalidParameter { name, reason: format!("degree must be 1 − |Δ| = {}", 1 - wd) });
    }
    for (c, idx) in &word.terms {
        if c.terms().iter().any(|(e, _)| e.get(flow) > 0) {
            return Err(Error::InvalidParameter { name, reason: "cup word coefficients depend on it".into() });
        }
        for p in idx {
            family.require(*p)?;
        }
    }
    let mut partials: HashMap<(ParamId, usize), MultiOperator> = HashMap::new();
    for k in 0..order_cap {
        let mut terms = Vec::new();
        for (c, idx) in &word.terms {
            let l = idx.len();
            for comp in weak_compositions(k, 2 * l - 1) {
                // comp[..l−1] are structure orders, comp[l−1..] factor orders
                let outers: Vec<MultiOperator> = comp[..l - 1].iter().map(|&o| orders[o].clone()).collect();
                let mut factors = Vec::with_capacity(l);
                for (p, &f) in idx.iter().zip(&comp[l - 1..]) {
                    let key = (*p, f);
                    if let std::collections::hash_map::Entry::Vacant(e) = partials.entry(key) {
                        e.insert(orders[f].partial(*p)?);
                    }
                    factors.push(partials[&key].clone());
                }
                terms.push((c.clone(), cup_chain(&outers, &factors)?));
            }
        }
        let sum = MultiOperator::linear_combination(&space, 1, terms)?;
        orders.push(sum.scale_rational(Rational::new(1, k as i64 + 1)));
    }
    Ok(FlowSeries { family: family.clone(), word: word.clone(), flow, orders })
}

/// Residual of `m̃∘m̃` at each order `s^k`, i.e. `Σ_{i+j=k} m_(i)∘m_(j)`,
/// evaluated on `bank_for(k)`.
pub fn flow_mc_check(series: &FlowSeries, bank_for: impl Fn(usize) -> TupleBank) -> Result<Report> {
    let mut report = Report::new();
    let o = series.orders();
    for k in 0..o.len() {
        let terms = (0..=k)
            .map(|i| Ok((MultiSeries::one(series.space().context()), MultiOperator::compose(&o[i], &o[k - i])?)))
            .collect::<Result<Vec<_>>>()?;
        let res = MultiOperator::linear_combination(series.space(), 2, terms)?;
        report.merge(check_vanishes(&format!("flow_mc[s^{k}]"), &res, &bank_for(k))?);
    }
    Ok(report)
}

/// `e^{g·ad_w} m = Σ_{n ≤ cap} (g^n/n!) ad_w^n(m)` with `ad_w = [w, ·]`.
/// The result is a family in the old parameters plus `g`.
pub fn gauge_transform(family: &Family, w: &MultiOperator, g: ParamId, order_cap: u32) -> Result<Family> {
    let ctx = family.space().context().clone();
    ctx.check(g)?;
    if w.degree() != 0 {
        return Err(Error::DegreeMismatch { expected: 0, found: w.degree() });
    }
    let gp = ctx.get(g);
    if gp.degree != 0 {
        return Err(Error::InvalidParameter {
            name: gp.name.clone(),
            reason: "gauge parameter must have degree 0".into(),
        });
    }
    if family.params.contains(&g) || !family.m.support().depending_on(g.0).is_empty() {
        return Err(Error::InvalidParameter {
            name: gp.name.clone(),
            reason: "the family already depends on it".into(),
        });
    }
    let mut term = family.m.clone();
    let mut terms = vec![(MultiSeries::one(&ctx), term.clone())];
    let gs = MultiSeries::param(&ctx, g)?;
    for n in 1..=order_cap {
        term = MultiOperator::bracket(w, &term)?;
        let c = gs.pow(n).scale(&factorial(n).recip());
        terms.push((c, term.clone()));
    }
    let m = MultiOperator::linear_combination(family.space(), 1, terms)?;
    let mut params = family.params.clone();
    params.push(g);
    Family::new(m, params)
}

/// Arity bounds of one Taylor coefficient at the origin of parameter space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitenessEntry {
    pub label: String,
    /// Largest arity in the declared support after setting parameters to zero.
    pub structural: Option<usize>,
    /// Largest arity on which a nonzero value was found in the bank.
    pub witnessed: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FinitenessReport {
    pub entries: Vec<FinitenessEntry>,
}

impl FinitenessReport {
    /// True when every coefficient has a finite declared arity bound.
    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|e| e.structural.is_some() || e.witnessed.is_none())
    }
}

fn finiteness_entry(label: String, op: &MultiOperator, zero: &[ParamId], bank: &TupleBank) -> Result<FinitenessEntry> {
    let mut op = op.clone();
    for p in zero {
        op = op.eval_zero(*p)?;
    }
    let structural = op.support().max_arity();
    let mut witnessed = None;
    let mut arities: Vec<usize> = op.support().arities().collect();
    arities.reverse();
    'outer: for a in arities {
        for t in bank.tuples().filter(|t| t.len() == a) {
            if !op.eval_basis(t)?.is_zero() {
                witnessed = Some(a);
                break 'outer;
            }
        }
    }
    Ok(FinitenessEntry { label, structural, witnessed })
}

/// For each flow order `k ≤ k_max`: the arity bounds of `m_(k)` at the point
/// where all family parameters vanish.
pub fn local_finiteness_report(series: &FlowSeries, k_max: usize, bank: &TupleBank) -> Result<FinitenessReport> {
    let mut entries = Vec::new();
    for (k, op) in series.orders().iter().enumerate().take(k_max + 1) {
        let name = &series.space().context().get(series.flow).name;
        entries.push(finiteness_entry(format!("{name}^{k}"), op, series.family().params(), bank)?);
    }
    Ok(FinitenessReport { entries })
}

/// For each multi-index of total order `≤ k_max`: the arity bounds of the
/// corresponding derivative of the family at the origin.
pub fn family_finiteness_report(family: &Family, k_max: usize, bank: &TupleBank) -> Result<FinitenessReport> {
    let ctx = family.space().context();
    let mut entries = Vec::new();
    let mut words: Vec<Vec<ParamId>> = vec![vec![]];
    for _ in 0..=k_max {
        let mut next = Vec::new();
        for w in &words {
            let op = family.partial(w)?;
            let label = if w.is_empty() {
                "m".to_string()
            } else {
                format!("m_({})", w.iter().map(|p| ctx.get(*p).name.as_str()).collect::<Vec<_>>().join(""))
            };
            entries.push(finiteness_entry(label, &op, family.params(), bank)?);
            // non-decreasing index sequences enumerate each mixed partial once
            let last = w.last().map_or(0, |p| family.params().iter().position(|q| q == p).unwrap());
            for p in &family.params()[last..] {
                let mut v = w.clone();
                v.push(*p);
                next.push(v);
            }
        }
        words = next;
    }
    Ok(FinitenessReport { entries })
}

/// `Σ_{n≥1} m_n(a,…,a)` over the arity support of `m`, for `a` of total degree 0.
pub fn mc_residual(m: &MultiOperator, a: &GradedElement) -> Result<GradedElement> {
    match a.degree() {
        ElementDegree::Zero | ElementDegree::Homogeneous(0) => {}
        ElementDegree::Homogeneous(d) => return Err(Error::DegreeMismatch { expected: 0, found: d }),
        ElementDegree::Inhomogeneous => return Err(Error::Inhomogeneous),
    }
    if m.support().contains(0) {
        return Err(Error::Precondition("the structure has a curvature term".into()));
    }
    let mut acc = GradedElement::zero(m.space());
    for n in m.support().arities() {
        acc = acc.checked_add(&m.eval(&vec![a.clone(); n])?)?;
    }
    Ok(acc)
}

/// A Maurer–Cartan element transported along a flow: `ā = Σ_k s^k a_k`.
#[derive(Clone)]
pub struct McFlow {
    pub orders: Vec<GradedElement>,
    pub element: GradedElement,
    /// The structure `ā` solves: the flow with the gate parameters set to zero.
    pub structure: MultiOperator,
}

/// Integrates `D_s a = −Σ (−1)^l c · Δ(D_{i_1}, m̃_{(i_2)}, …, m̃_{(i_l)})(a)`
/// order by order from `a_0`.
///
/// The parameters in `gate` are set to zero in `m̃` and in each derivative
/// `m̃_{(i)}` after differentiating; `a_0` must solve the MC equation of the
/// gated structure at `s = 0`.
pub fn integrate_mc_flow(series: &FlowSeries, a0: &GradedElement, gate: &[ParamId]) -> Result<McFlow> {
    let space = series.space().clone();
    let ctx = space.context().clone();
    let s = series.flow();
    let gated = |op: &MultiOperator| -> Result<MultiOperator> {
        let mut op = op.clone();
        for p in gate {
            op = op.eval_zero(*p)?;
        }
        Ok(op)
    };
    let full = series.assemble()?;
    let structure = gated(&full)?;
    if a0.terms().iter().any(|(_, c)| c.terms().iter().any(|(e, _)| e.get(s) > 0)) {
        return Err(Error::Precondition("initial element depends on the flow parameter".into()));
    }
    let initial = mc_residual(&gated(&series.orders()[0])?, a0)?;
    if !initial.is_zero() {
        return Err(Error::Precondition(format!("initial element is not a Maurer–Cartan element: residual {initial}")));
    }

    // the operator R with D_s a = R(a)
    let mut terms = Vec::new();
    for (c, idx) in &series.word().terms {
        let l = idx.len();
        let mut factors = vec![MultiOperator::param_derivative(&space, idx[0])?];
        for p in &idx[1..] {
            factors.push(gated(&full.partial(*p)?)?);
        }
        let chain = cup_chain(&vec![structure.clone(); l - 1], &factors)?;
        terms.push((c.clone().signed(l % 2 == 0), chain));
    }
    let r = MultiOperator::linear_combination(&space, 0, terms)?;

    let sp = MultiSeries::param(&ctx, s)?;
    let mut orders = vec![a0.clone()];
    let mut element = a0.clone();
    for k in 0..series.order_cap() {
        let mut value = GradedElement::zero(&space);
        for n in r.support().arities() {
            value = value.checked_add(&r.eval(&vec![element.clone(); n])?)?;
        }
        let next = value.map_coeffs(|c| c.coefficient_of(s, k as u8))?.scale_rational(&Rational::new(1, k as i64 + 1));
        element = element.checked_add(&next.scale(&sp.pow(k as u32 + 1))?)?;
        orders.push(next);
    }
    Ok(McFlow { orders, element, structure })
}
