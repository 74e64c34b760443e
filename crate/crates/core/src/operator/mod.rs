//! Multilinear operators `Hom(T(V), V)` with composition, the Gerstenhaber
//! bracket and brace operations.
//!
//! Degrees follow the convention `|f(v_1,…,v_n)| = |f| + Σ|v_i|`. The degree
//! stored on an operator is its total degree (map degree plus coefficient
//! degree); since every parameter has even degree, its parity is the parity
//! of the map degree, which is all the sign rules need.

mod dump;
mod placement;
mod prejacobi;
mod support;

use std::fmt;
use std::sync::Arc;

use parking_lot::RwLock;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::{MultiSeries, ParamId};
use crate::space::{ElementBuilder, GradedElement, GradedSpace};

pub use crate::space::BasisIndex;
pub use dump::{parse_dump, parse_element, DumpEntry};
pub(crate) use placement::{for_each_placement, prefix_parities, Slot};
pub use prejacobi::{prejacobi_rhs, verify_prejacobi};
pub use support::Support;

/// A basis tuple, used as evaluation argument and memo key.
pub type Tuple = SmallVec<[BasisIndex; 6]>;

type ProcFn = dyn Fn(&[BasisIndex]) -> Result<GradedElement> + Send + Sync;

/// A degree-homogeneous element of `Hom(T(V), V)` with finite arity support.
///
/// Cloning is cheap; operators are immutable and share structure.
#[derive(Clone)]
pub struct MultiOperator(Arc<Inner>);

struct Inner {
    space: Arc<GradedSpace>,
    degree: i64,
    support: Support,
    /// Linear over the parameter ring. Only operators built from
    /// [`MultiOperator::param_derivative`] are not.
    linear: bool,
    kind: Kind,
    memo: Option<RwLock<FxHashMap<Tuple, Arc<GradedElement>>>>,
    zero: Arc<GradedElement>,
}

enum Kind {
    Table(FxHashMap<Tuple, Arc<GradedElement>>),
    Proc(Box<ProcFn>),
    Sum(Vec<(MultiSeries, MultiOperator)>),
    Brace { outer: MultiOperator, inserts: Vec<MultiOperator> },
    Partial { op: MultiOperator, param: ParamId },
    EvalZero { op: MultiOperator, param: ParamId },
    ParamDerivative(ParamId),
}

fn same_space(a: &Arc<GradedSpace>, b: &Arc<GradedSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn series_mask(s: &MultiSeries) -> u8 {
    s.terms().iter().fold(0u8, |acc, (e, _)| {
        acc | e.0.iter().enumerate().fold(0u8, |m, (i, &k)| if k > 0 { m | (1 << i) } else { m })
    })
}

/// Arity support of `A{A_1,…,A_m}` from the supports of its pieces.
fn brace_support(outer: &Support, inserts: &[&Support]) -> Support {
    let m = inserts.len();
    let mut support = Support::empty();
    for &(a, mask) in outer.entries() {
        if a < m {
            continue;
        }
        // all combinations of insert arities
        let mut combos: Vec<(usize, u8)> = vec![(a - m, mask)];
        for s in inserts {
            let mut next = Vec::new();
            for &(n, msk) in &combos {
                for &(r, rm) in s.entries() {
                    next.push((n + r, msk | rm));
                }
            }
            combos = next;
        }
        for (n, msk) in combos {
            support.insert(n, msk);
        }
    }
    support
}

/// A superset of the arity support of `∂op/∂p`, tighter than the masks
/// alone: sums and braces are differentiated by the Leibniz rule.
fn partial_support(op: &MultiOperator, p: ParamId) -> Support {
    let bit = 1u8 << p.0;
    match &op.0.kind {
        Kind::Sum(terms) => {
            let mut s = Support::empty();
            for (c, o) in terms {
                let cm = series_mask(c);
                if cm & bit != 0 {
                    let dm = c.partial(p).map(|d| series_mask(&d)).unwrap_or(cm);
                    s = s.union(o.support(), dm);
                }
                s = s.union(&partial_support(o, p), cm);
            }
            s
        }
        Kind::Brace { outer, inserts } => {
            let partials: Vec<Support> = inserts.iter().map(|o| partial_support(o, p)).collect();
            let base: SmallVec<[&Support; 4]> = inserts.iter().map(|o| o.support()).collect();
            let mut s = brace_support(&partial_support(outer, p), &base);
            for (i, d) in partials.iter().enumerate() {
                let mut ins = base.clone();
                ins[i] = d;
                s = s.union(&brace_support(outer.support(), &ins), 0);
            }
            s
        }
        Kind::EvalZero { op: inner, param } => partial_support(inner, p).without(param.0),
        _ => op.support().depending_on(p.0),
    }
}

fn element_mask(e: &GradedElement) -> u8 {
    e.terms().iter().fold(0, |acc, (_, c)| acc | series_mask(c))
}

impl MultiOperator {
    fn build(space: &Arc<GradedSpace>, degree: i64, support: Support, linear: bool, kind: Kind, memo: bool) -> Self {
        MultiOperator(Arc::new(Inner {
            space: space.clone(),
            degree,
            support,
            linear,
            kind,
            memo: memo.then(|| RwLock::new(FxHashMap::default())),
            zero: Arc::new(GradedElement::zero(space)),
        }))
    }

    /// The zero operator of the given degree.
    pub fn zero(space: &Arc<GradedSpace>, degree: i64) -> Self {
        Self::build(space, degree, Support::empty(), true, Kind::Sum(Vec::new()), false)
    }

    /// A tabulated operator. Every entry must be homogeneous of degree
    /// `degree + Σ|v_i|`; missing tuples evaluate to zero.
    pub fn table(
        space: &Arc<GradedSpace>,
        degree: i64,
        arities: impl IntoIterator<Item = usize>,
        entries: impl IntoIterator<Item = (Vec<BasisIndex>, GradedElement)>,
    ) -> Result<Self> {
        let mut support = Support::from_arities(arities, 0);
        let mut map = FxHashMap::default();
        for (tuple, value) in entries {
            if !same_space(value.space(), space) {
                return Err(Error::SpaceMismatch(space.id().into(), value.space().id().into()));
            }
            if value.is_zero() {
                continue;
            }
            if !support.contains(tuple.len()) {
                return Err(Error::Precondition(format!("arity {} outside declared support", tuple.len())));
            }
            let expected = degree + tuple.iter().map(|i| space.degree_of(i)).sum::<i64>();
            check_degree(&value, expected)?;
            support.insert(tuple.len(), element_mask(&value));
            map.insert(Tuple::from_vec(tuple), Arc::new(value));
        }
        Ok(Self::build(space, degree, support, true, Kind::Table(map), false))
    }

    /// An operator computed on demand by `f` and memoized per basis tuple.
    /// `f` is only called on tuples whose length lies in `support`.
    pub fn procedural(
        space: &Arc<GradedSpace>,
        degree: i64,
        support: Support,
        f: impl Fn(&[BasisIndex]) -> Result<GradedElement> + Send + Sync + 'static,
    ) -> Self {
        Self::build(space, degree, support, true, Kind::Proc(Box::new(f)), true)
    }

    /// `Σ c_i · f_i`. All terms must share one total degree `degree`.
    pub fn linear_combination(
        space: &Arc<GradedSpace>,
        degree: i64,
        terms: impl IntoIterator<Item = (MultiSeries, MultiOperator)>,
    ) -> Result<Self> {
        let mut support = Support::empty();
        let mut linear = true;
        let mut kept = Vec::new();
        for (c, op) in terms {
            if !same_space(op.space(), space) {
                return Err(Error::SpaceMismatch(space.id().into(), op.space().id().into()));
            }
            if c.is_zero() || op.is_structurally_zero() {
                continue;
            }
            let cdeg = c.degree().ok_or(Error::Inhomogeneous)?;
            if op.degree() + cdeg != degree {
                return Err(Error::DegreeMismatch { expected: degree, found: op.degree() + cdeg });
            }
            support = support.union(op.support(), series_mask(&c));
            linear &= op.is_linear();
            kept.push((c, op));
        }
        if kept.is_empty() {
            return Ok(Self::zero(space, degree));
        }
        if kept.len() == 1 && kept[0].0.is_one() {
            return Ok(kept.pop().unwrap().1);
        }
        Ok(Self::build(space, degree, support, linear, Kind::Sum(kept), true))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let one = MultiSeries::one(self.space().context());
        Self::linear_combination(self.space(), self.degree(), [(one.clone(), self.clone()), (one, other.clone())])
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let ctx = self.space().context();
        Self::linear_combination(
            self.space(),
            self.degree(),
            [(MultiSeries::one(ctx), self.clone()), (-MultiSeries::one(ctx), other.clone())],
        )
    }

    /// `s · f`; `s` must be homogeneous.
    pub fn scale(&self, s: &MultiSeries) -> Result<Self> {
        if s.is_zero() {
            return Ok(Self::zero(self.space(), self.degree()));
        }
        let d = s.degree().ok_or(Error::Inhomogeneous)?;
        Self::linear_combination(self.space(), self.degree() + d, [(s.clone(), self.clone())])
    }

    pub fn scale_rational(&self, q: crate::scalar::Rational) -> Self {
        let s = MultiSeries::constant(self.space().context(), q);
        self.scale(&s).expect("constants are homogeneous")
    }

    pub fn neg(&self) -> Self {
        self.scale_rational(crate::scalar::Rational::from_int(-1))
    }

    /// `A{A_1,…,A_m}`: the signed sum over non-overlapping, order-preserving
    /// insertions. `A{}` is `A` itself.
    pub fn brace(outer: &Self, inserts: &[Self]) -> Result<Self> {
        if inserts.is_empty() {
            return Ok(outer.clone());
        }
        let space = outer.space();
        for op in inserts {
            if !same_space(op.space(), space) {
                return Err(Error::SpaceMismatch(space.id().into(), op.space().id().into()));
            }
        }
        let degree = outer.degree() + inserts.iter().map(|o| o.degree()).sum::<i64>();
        if inserts.iter().any(|o| o.is_structurally_zero()) {
            return Ok(Self::zero(space, degree));
        }
        let ins: SmallVec<[&Support; 4]> = inserts.iter().map(|o| o.support()).collect();
        let support = brace_support(outer.support(), &ins);
        if support.is_empty() {
            return Ok(Self::zero(space, degree));
        }
        let linear = outer.is_linear() && inserts.iter().all(|o| o.is_linear());
        let kind = Kind::Brace { outer: outer.clone(), inserts: inserts.to_vec() };
        Ok(Self::build(space, degree, support, linear, kind, true))
    }

    /// The composition product `f ∘ g = f{g}`.
    pub fn compose(f: &Self, g: &Self) -> Result<Self> {
        Self::brace(f, std::slice::from_ref(g))
    }

    /// The Gerstenhaber bracket `[f,g] = f∘g − (−1)^{|f||g|} g∘f`.
    pub fn bracket(f: &Self, g: &Self) -> Result<Self> {
        let ctx = f.space().context();
        let sign = (f.degree() & g.degree() & 1) == 1;
        Self::linear_combination(
            f.space(),
            f.degree() + g.degree(),
            [
                (MultiSeries::one(ctx), Self::compose(f, g)?),
                (MultiSeries::one(ctx).signed(!sign), Self::compose(g, f)?),
            ],
        )
    }

    /// Coefficient-wise partial derivative by `p`.
    pub fn partial(&self, p: ParamId) -> Result<Self> {
        let ctx = self.space().context();
        ctx.check(p)?;
        if !self.is_linear() {
            return Err(Error::Precondition("derivative of a non-linear operator".into()));
        }
        let degree = self.degree() - ctx.get(p).degree;
        let support = partial_support(self, p);
        if support.is_empty() {
            return Ok(Self::zero(self.space(), degree));
        }
        Ok(Self::build(self.space(), degree, support, true, Kind::Partial { op: self.clone(), param: p }, false))
    }

    /// Coefficient-wise evaluation at `p = 0`.
    pub fn eval_zero(&self, p: ParamId) -> Result<Self> {
        self.space().context().check(p)?;
        if !self.is_linear() {
            return Err(Error::Precondition("evaluation of a non-linear operator".into()));
        }
        if self.is_structurally_zero() || self.support().depending_on(p.0).is_empty() {
            return Ok(self.clone());
        }
        if let Kind::Sum(terms) = &self.0.kind {
            let mut kept = Vec::with_capacity(terms.len());
            for (c, op) in terms {
                kept.push((c.eval_zero(p)?, op.eval_zero(p)?));
            }
            return Self::linear_combination(self.space(), self.degree(), kept);
        }
        let support = self.support().without(p.0);
        Ok(Self::build(
            self.space(),
            self.degree(),
            support,
            true,
            Kind::EvalZero { op: self.clone(), param: p },
            false,
        ))
    }

    /// The arity-1 operator `a ↦ ∂a/∂p` acting on coefficients. It is linear
    /// over the ground field but not over the parameter ring.
    pub fn param_derivative(space: &Arc<GradedSpace>, p: ParamId) -> Result<Self> {
        let ctx = space.context();
        ctx.check(p)?;
        let degree = -ctx.get(p).degree;
        Ok(Self::build(space, degree, Support::from_arities([1], 0), false, Kind::ParamDerivative(p), false))
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.0.space
    }

    /// Total degree.
    pub fn degree(&self) -> i64 {
        self.0.degree
    }

    pub fn parity(&self) -> bool {
        self.0.degree & 1 == 1
    }

    pub fn support(&self) -> &Support {
        &self.0.support
    }

    pub fn is_linear(&self) -> bool {
        self.0.linear
    }

    /// True when the operator is zero by construction.
    pub fn is_structurally_zero(&self) -> bool {
        self.0.support.is_empty()
    }

    /// Drops all memoized values held by this node.
    pub fn clear_memo(&self) {
        if let Some(m) = &self.0.memo {
            m.write().clear();
        }
    }

    /// Value on a basis tuple.
    pub fn eval_basis(&self, tuple: &[BasisIndex]) -> Result<Arc<GradedElement>> {
        if !self.0.support.contains(tuple.len()) {
            return Ok(self.0.zero.clone());
        }
        if let Some(memo) = &self.0.memo {
            if let Some(v) = memo.read().get(tuple) {
                return Ok(v.clone());
            }
            let v = self.compute(tuple)?;
            let v = if v.is_zero() { self.0.zero.clone() } else { Arc::new(v) };
            memo.write().insert(Tuple::from_slice(tuple), v.clone());
            return Ok(v);
        }
        if let Kind::Table(map) = &self.0.kind {
            return Ok(map.get(tuple).cloned().unwrap_or_else(|| self.0.zero.clone()));
        }
        Ok(Arc::new(self.compute(tuple)?))
    }

    fn compute(&self, tuple: &[BasisIndex]) -> Result<GradedElement> {
        let space = self.space();
        match &self.0.kind {
            Kind::Table(map) => Ok(map.get(tuple).map(|v| (**v).clone()).unwrap_or_else(|| GradedElement::zero(space))),
            Kind::Proc(f) => {
                let v = f(tuple)?;
                if !same_space(v.space(), space) {
                    return Err(Error::SpaceMismatch(space.id().into(), v.space().id().into()));
                }
                Ok(v)
            }
            Kind::Sum(terms) => {
                let mut b = ElementBuilder::new(space);
                for (c, op) in terms {
                    let v = op.eval_basis(tuple)?;
                    b.add_element(&v, Some(c), false);
                }
                Ok(b.finish())
            }
            Kind::Brace { outer, inserts } => self.brace_on_basis(outer, inserts, tuple),
            Kind::Partial { op, param } => op.eval_basis(tuple)?.map_coeffs(|c| c.partial(*param)),
            Kind::EvalZero { op, param } => op.eval_basis(tuple)?.map_coeffs(|c| c.eval_zero(*param)),
            Kind::ParamDerivative(_) => Ok(GradedElement::zero(space)),
        }
    }

    fn brace_on_basis(&self, outer: &Self, inserts: &[Self], tuple: &[BasisIndex]) -> Result<GradedElement> {
        let space = self.space();
        let prefix = prefix_parities(tuple.iter().map(|i| space.parity_of(i)));
        let ins: SmallVec<[(&Support, bool); 4]> = inserts.iter().map(|o| (o.support(), o.parity())).collect();
        let mut b = ElementBuilder::new(space);
        let mut values: SmallVec<[Option<Arc<GradedElement>>; 8]> = SmallVec::new();
        for_each_placement(outer.support(), &ins, &prefix, &mut |slots, sign| {
            values.clear();
            for s in slots {
                match *s {
                    Slot::Input(_) => values.push(None),
                    Slot::Insert { which, start, len } => {
                        let v = inserts[which].eval_basis(&tuple[start..start + len])?;
                        if v.is_zero() {
                            return Ok(());
                        }
                        values.push(Some(v));
                    }
                }
            }
            let mut buf = Tuple::new();
            expand_outer(outer, slots, &values, tuple, 0, &mut buf, None, sign, &mut b)
        })?;
        Ok(b.finish())
    }

    /// Multilinear evaluation on elements. Coefficients are pulled out front;
    /// operators containing a parameter-derivative slot are evaluated
    /// structurally instead.
    pub fn eval(&self, args: &[GradedElement]) -> Result<GradedElement> {
        let space = self.space();
        for a in args {
            if !same_space(a.space(), space) {
                return Err(Error::SpaceMismatch(space.id().into(), a.space().id().into()));
            }
        }
        if !self.0.support.contains(args.len()) || args.iter().any(|a| a.is_zero()) {
            return Ok(GradedElement::zero(space));
        }
        if self.is_linear() {
            let mut b = ElementBuilder::new(space);
            let mut buf = Tuple::new();
            self.expand_args(args, &mut buf, None, &mut b)?;
            return Ok(b.finish());
        }
        // structural path: signs need parity-homogeneous arguments
        if let Some(k) = args.iter().position(|a| a.parity().is_none()) {
            let (even, odd) = args[k].split_parity();
            let mut v = args.to_vec();
            v[k] = even;
            let x = self.eval(&v)?;
            v[k] = odd;
            return x.checked_add(&self.eval(&v)?);
        }
        self.eval_structural(args)
    }

    fn expand_args(
        &self,
        args: &[GradedElement],
        buf: &mut Tuple,
        coeff: Option<&MultiSeries>,
        b: &mut ElementBuilder,
    ) -> Result<()> {
        let k = buf.len();
        if k == args.len() {
            let v = self.eval_basis(buf)?;
            b.add_element(&v, coeff, false);
            return Ok(());
        }
        for (idx, c) in args[k].terms() {
            buf.push(*idx);
            let c = match coeff {
                None => c.clone(),
                Some(x) => x * c,
            };
            let c = if c.is_one() { None } else { Some(&c) };
            self.expand_args(args, buf, c, b)?;
            buf.pop();
        }
        Ok(())
    }

    fn eval_structural(&self, args: &[GradedElement]) -> Result<GradedElement> {
        let space = self.space();
        match &self.0.kind {
            Kind::Sum(terms) => {
                let mut b = ElementBuilder::new(space);
                for (c, op) in terms {
                    b.add_element(&op.eval(args)?, Some(c), false);
                }
                Ok(b.finish())
            }
            Kind::ParamDerivative(p) => args[0].map_coeffs(|c| c.partial(*p)),
            Kind::Brace { outer, inserts } => {
                let prefix = prefix_parities(args.iter().map(|a| a.parity().unwrap_or(false)));
                let ins: SmallVec<[(&Support, bool); 4]> = inserts.iter().map(|o| (o.support(), o.parity())).collect();
                let mut b = ElementBuilder::new(space);
                for_each_placement(outer.support(), &ins, &prefix, &mut |slots, sign| {
                    let mut outer_args = Vec::with_capacity(slots.len());
                    for s in slots {
                        match *s {
                            Slot::Input(j) => outer_args.push(args[j].clone()),
                            Slot::Insert { which, start, len } => {
                                let v = inserts[which].eval(&args[start..start + len])?;
                                if v.is_zero() {
                                    return Ok(());
                                }
                                outer_args.push(v);
                            }
                        }
                    }
                    b.add_element(&outer.eval(&outer_args)?, None, sign);
                    Ok(())
                })?;
                Ok(b.finish())
            }
            _ => unreachable!("tables, procedures, derivatives and evaluations are linear"),
        }
    }

    /// Evaluates on every tuple of the bank whose length is in the support.
    pub fn values<'a>(
        &'a self,
        bank: &'a crate::bank::TupleBank,
    ) -> impl Iterator<Item = Result<(&'a [BasisIndex], Arc<GradedElement>)>> + 'a {
        bank.tuples().filter(|t| self.support().contains(t.len())).map(move |t| self.eval_basis(t).map(|v| (t, v)))
    }
}

#[allow(clippy::too_many_arguments)]
fn expand_outer(
    outer: &MultiOperator,
    slots: &[Slot],
    values: &[Option<Arc<GradedElement>>],
    tuple: &[BasisIndex],
    k: usize,
    buf: &mut Tuple,
    coeff: Option<&MultiSeries>,
    sign: bool,
    b: &mut ElementBuilder,
) -> Result<()> {
    if k == slots.len() {
        let v = outer.eval_basis(buf)?;
        b.add_element(&v, coeff, sign);
        return Ok(());
    }
    match (&slots[k], &values[k]) {
        (Slot::Input(j), _) => {
            buf.push(tuple[*j]);
            expand_outer(outer, slots, values, tuple, k + 1, buf, coeff, sign, b)?;
            buf.pop();
        }
        (_, Some(v)) => {
            for (idx, c) in v.terms() {
                buf.push(*idx);
                let c = match coeff {
                    None => c.clone(),
                    Some(x) => x * c,
                };
                let c = if c.is_one() { None } else { Some(&c) };
                expand_outer(outer, slots, values, tuple, k + 1, buf, c, sign, b)?;
                buf.pop();
            }
        }
        _ => unreachable!(),
    }
    Ok(())
}

fn check_degree(value: &GradedElement, expected: i64) -> Result<()> {
    use crate::space::ElementDegree;
    match value.degree() {
        ElementDegree::Zero => Ok(()),
        ElementDegree::Homogeneous(d) if d == expected => Ok(()),
        ElementDegree::Homogeneous(d) => Err(Error::DegreeMismatch { expected, found: d }),
        ElementDegree::Inhomogeneous => Err(Error::Inhomogeneous),
    }
}

impl fmt::Debug for MultiOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.0.kind {
            Kind::Table(_) => "table",
            Kind::Proc(_) => "procedural",
            Kind::Sum(_) => "sum",
            Kind::Brace { .. } => "brace",
            Kind::Partial { .. } => "partial",
            Kind::EvalZero { .. } => "eval-zero",
            Kind::ParamDerivative(_) => "param-derivative",
        };
        write!(f, "MultiOperator({kind}, degree {}, arities {:?})", self.degree(), self.support())
    }
}
