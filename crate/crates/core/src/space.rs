//! ℤ-graded vector spaces with explicit bases, their elements, and Koszul
//! sign bookkeeping.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{monomial_degree, MultiSeries, ParameterContext, Rational};

/// Maximum number of polynomial variables in a monomial basis.
pub const MAX_VARS: usize = 8;

/// A basis vector: a component tag plus either an atom position or a
/// monomial exponent vector.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    pub comp: u8,
    pub key: [u8; MAX_VARS],
}

impl BasisIndex {
    pub fn atom(comp: u8, pos: u8) -> Self {
        let mut key = [0; MAX_VARS];
        key[0] = pos;
        BasisIndex { comp, key }
    }

    pub fn monomial(comp: u8, exps: &[u8]) -> Self {
        let mut key = [0; MAX_VARS];
        key[..exps.len()].copy_from_slice(exps);
        BasisIndex { comp, key }
    }

    /// Total polynomial degree of a monomial payload (atom position for atoms).
    pub fn weight(&self) -> u32 {
        self.key.iter().map(|&x| x as u32).sum()
    }
}

impl Ord for BasisIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.comp
            .cmp(&other.comp)
            .then_with(|| self.weight().cmp(&other.weight()))
            .then_with(|| other.key.cmp(&self.key))
    }
}

impl PartialOrd for BasisIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}{:?}", self.comp, self.key)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisKind {
    Atoms(Vec<String>),
    /// All monomials in `vars` of total degree at most `cap`.
    Monomials {
        vars: Vec<String>,
        cap: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub tag: String,
    /// Intrinsic degree of every basis vector of this component.
    pub degree: i64,
    pub basis: BasisKind,
}

/// What happens when a product leaves the capped monomial window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TruncationPolicy {
    #[default]
    Error,
    Drop,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSpace {
    id: String,
    ctx: Arc<ParameterContext>,
    components: Vec<Component>,
    policy: TruncationPolicy,
}

impl GradedSpace {
    pub fn new(
        id: impl Into<String>,
        ctx: Arc<ParameterContext>,
        components: Vec<Component>,
        policy: TruncationPolicy,
    ) -> Result<Arc<Self>> {
        if components.is_empty() || components.len() > u8::MAX as usize {
            return Err(Error::Precondition("a space needs 1..=255 components".into()));
        }
        for (i, c) in components.iter().enumerate() {
            if c.tag.is_empty() || c.tag.contains(':') || components[..i].iter().any(|d| d.tag == c.tag) {
                return Err(Error::Precondition(format!("bad component tag `{}`", c.tag)));
            }
            match &c.basis {
                BasisKind::Atoms(names) => {
                    if names.is_empty() || names.len() > u8::MAX as usize {
                        return Err(Error::Precondition("atom basis needs 1..=255 atoms".into()));
                    }
                }
                BasisKind::Monomials { vars, cap } => {
                    if vars.is_empty() || vars.len() > MAX_VARS || *cap > u8::MAX as u32 {
                        return Err(Error::Precondition("monomial basis out of range".into()));
                    }
                }
            }
        }
        Ok(Arc::new(GradedSpace { id: id.into(), ctx, components, policy }))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn context(&self) -> &Arc<ParameterContext> {
        &self.ctx
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn policy(&self) -> TruncationPolicy {
        self.policy
    }

    pub fn component(&self, tag: &str) -> Result<u8> {
        self.components
            .iter()
            .position(|c| c.tag == tag)
            .map(|i| i as u8)
            .ok_or_else(|| Error::UnknownBasis(tag.to_string()))
    }

    pub fn degree_of(&self, idx: &BasisIndex) -> i64 {
        self.components[idx.comp as usize].degree
    }

    /// Parity of the basis vector's degree (`true` = odd).
    pub fn parity_of(&self, idx: &BasisIndex) -> bool {
        self.degree_of(idx) & 1 == 1
    }

    /// Polynomial weight used by tuple banks (0 for atoms).
    pub fn weight_of(&self, idx: &BasisIndex) -> u32 {
        match self.components[idx.comp as usize].basis {
            BasisKind::Atoms(_) => 0,
            BasisKind::Monomials { .. } => idx.weight(),
        }
    }

    /// The largest monomial cap among components, if any component is monomial.
    pub fn weight_cap(&self) -> Option<u32> {
        self.components
            .iter()
            .filter_map(|c| match c.basis {
                BasisKind::Monomials { cap, .. } => Some(cap),
                BasisKind::Atoms(_) => None,
            })
            .max()
    }

    /// Monomial `x^exps` in component `comp`; `Ok(None)` when it exceeds the
    /// cap under [`TruncationPolicy::Drop`].
    pub fn monomial(&self, comp: u8, exps: &[u8]) -> Result<Option<BasisIndex>> {
        match &self.components[comp as usize].basis {
            BasisKind::Monomials { vars, cap } => {
                if exps.len() > vars.len() {
                    return Err(Error::Precondition("too many exponents".into()));
                }
                let degree: u32 = exps.iter().map(|&x| x as u32).sum();
                if degree > *cap {
                    return match self.policy {
                        TruncationPolicy::Error => Err(Error::Truncation { cap: *cap, degree }),
                        TruncationPolicy::Drop => Ok(None),
                    };
                }
                Ok(Some(BasisIndex::monomial(comp, exps)))
            }
            BasisKind::Atoms(_) => Err(Error::Precondition("component has an atom basis".into())),
        }
    }

    /// All basis vectors of one component, in canonical order.
    pub fn basis_of(&self, comp: u8) -> Vec<BasisIndex> {
        let mut out = match &self.components[comp as usize].basis {
            BasisKind::Atoms(names) => (0..names.len()).map(|i| BasisIndex::atom(comp, i as u8)).collect(),
            BasisKind::Monomials { vars, cap } => {
                let mut out = Vec::new();
                let mut cur = vec![0u8; vars.len()];
                enumerate_monomials(&mut cur, 0, *cap, &mut |e| out.push(BasisIndex::monomial(comp, e)));
                out
            }
        };
        out.sort();
        out
    }

    /// The whole basis, in canonical order.
    pub fn basis(&self) -> Vec<BasisIndex> {
        (0..self.components.len() as u8).flat_map(|c| self.basis_of(c)).collect()
    }

    pub fn format_index(&self, idx: &BasisIndex) -> String {
        let c = &self.components[idx.comp as usize];
        match &c.basis {
            BasisKind::Atoms(names) => format!("{}:{}", c.tag, names[idx.key[0] as usize]),
            BasisKind::Monomials { vars, .. } => {
                let factors: Vec<String> = vars
                    .iter()
                    .zip(idx.key.iter())
                    .filter(|(_, &k)| k > 0)
                    .map(|(v, &k)| if k == 1 { v.clone() } else { format!("{v}^{k}") })
                    .collect();
                if factors.is_empty() {
                    format!("{}:1", c.tag)
                } else {
                    format!("{}:{}", c.tag, factors.join(" "))
                }
            }
        }
    }

    /// Parses `tag:x^a y^b`, `tag:1` or `tag:atomName`.
    pub fn parse_index(&self, text: &str) -> Result<BasisIndex> {
        let bad = || Error::UnknownBasis(text.to_string());
        let (tag, payload) = text.trim().split_once(':').ok_or_else(bad)?;
        let comp = self.component(tag)?;
        match &self.components[comp as usize].basis {
            BasisKind::Atoms(names) => {
                names.iter().position(|n| n == payload.trim()).map(|i| BasisIndex::atom(comp, i as u8)).ok_or_else(bad)
            }
            BasisKind::Monomials { vars, .. } => {
                let mut exps = vec![0u8; vars.len()];
                let payload = payload.trim();
                if payload != "1" {
                    for f in payload.split_whitespace() {
                        let (v, k) = match f.split_once('^') {
                            Some((v, k)) => (v, k.parse::<u8>().map_err(|_| bad())?),
                            None => (f, 1),
                        };
                        let i = vars.iter().position(|x| x == v).ok_or_else(bad)?;
                        exps[i] = exps[i].checked_add(k).ok_or_else(bad)?;
                    }
                }
                self.monomial(comp, &exps)?.ok_or_else(bad)
            }
        }
    }
}

fn enumerate_monomials(cur: &mut Vec<u8>, pos: usize, budget: u32, f: &mut impl FnMut(&[u8])) {
    if pos == cur.len() {
        f(cur);
        return;
    }
    for k in 0..=budget {
        cur[pos] = k as u8;
        enumerate_monomials(cur, pos + 1, budget - k, f);
    }
    cur[pos] = 0;
}

/// Parity of `Σ |x|·|y|`: `true` means the sign `(-1)^ε` is negative.
pub fn koszul_exponent(pairs: &[(i64, i64)]) -> bool {
    pairs.iter().fold(false, |acc, (x, y)| acc ^ ((x & 1) & (y & 1) == 1))
}

/// Degree information of an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementDegree {
    Zero,
    Homogeneous(i64),
    Inhomogeneous,
}

/// A finite combination of basis vectors with series coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct GradedElement {
    space: Arc<GradedSpace>,
    terms: Vec<(BasisIndex, MultiSeries)>,
}

fn same_space(a: &Arc<GradedSpace>, b: &Arc<GradedSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl GradedElement {
    pub fn zero(space: &Arc<GradedSpace>) -> Self {
        GradedElement { space: space.clone(), terms: Vec::new() }
    }

    pub fn basis(space: &Arc<GradedSpace>, idx: BasisIndex) -> Self {
        Self::term(space, idx, MultiSeries::one(space.context()))
    }

    pub fn term(space: &Arc<GradedSpace>, idx: BasisIndex, coeff: MultiSeries) -> Self {
        let terms = if coeff.is_zero() { Vec::new() } else { vec![(idx, coeff)] };
        GradedElement { space: space.clone(), terms }
    }

    pub fn from_terms(space: &Arc<GradedSpace>, terms: impl IntoIterator<Item = (BasisIndex, MultiSeries)>) -> Self {
        let mut b = ElementBuilder::new(space);
        for (i, c) in terms {
            b.add(i, &c);
        }
        b.finish()
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    pub fn terms(&self) -> &[(BasisIndex, MultiSeries)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, idx: &BasisIndex) -> MultiSeries {
        self.terms
            .binary_search_by(|(i, _)| i.cmp(idx))
            .map(|k| self.terms[k].1.clone())
            .unwrap_or_else(|_| MultiSeries::zero(self.space.context()))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        Ok(self.combine(other, false))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        Ok(self.combine(other, true))
    }

    fn check_space(&self, other: &Self) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch(self.space.id.clone(), other.space.id.clone()))
        }
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let mut b = ElementBuilder::new(&self.space);
        b.add_element(self, None, false);
        b.add_element(other, None, negate);
        b.finish()
    }

    pub fn scale(&self, s: &MultiSeries) -> Result<Self> {
        if !Arc::ptr_eq(s.context(), self.space.context()) && **s.context() != **self.space.context() {
            return Err(Error::ContextMismatch);
        }
        let mut b = ElementBuilder::new(&self.space);
        b.add_element(self, Some(s), false);
        Ok(b.finish())
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero(&self.space);
        }
        GradedElement { space: self.space.clone(), terms: self.terms.iter().map(|(i, c)| (*i, c.scale(q))).collect() }
    }

    pub fn neg(&self) -> Self {
        self.scale_rational(&Rational::from_int(-1))
    }

    pub fn signed(self, parity: bool) -> Self {
        if parity {
            self.neg()
        } else {
            self
        }
    }

    /// Applies `f` to every coefficient, dropping terms that become zero.
    pub fn map_coeffs(&self, mut f: impl FnMut(&MultiSeries) -> Result<MultiSeries>) -> Result<Self> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (i, c) in &self.terms {
            let c = f(c)?;
            if !c.is_zero() {
                terms.push((*i, c));
            }
        }
        Ok(GradedElement { space: self.space.clone(), terms })
    }

    /// Total degree (basis degree plus coefficient degree), if uniform.
    pub fn degree(&self) -> ElementDegree {
        let ctx = self.space.context();
        let mut found = None;
        for (i, c) in &self.terms {
            for (e, _) in c.terms() {
                let d = self.space.degree_of(i) + monomial_degree(e, ctx);
                match found {
                    None => found = Some(d),
                    Some(f) if f != d => return ElementDegree::Inhomogeneous,
                    _ => {}
                }
            }
        }
        match found {
            None => ElementDegree::Zero,
            Some(d) => ElementDegree::Homogeneous(d),
        }
    }

    /// Parity of the element if all its terms agree (scalars are even).
    pub fn parity(&self) -> Option<bool> {
        let mut it = self.terms.iter().map(|(i, _)| self.space.parity_of(i));
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    /// Splits into (even part, odd part).
    pub fn split_parity(&self) -> (Self, Self) {
        let (odd, even): (Vec<_>, Vec<_>) = self.terms.iter().cloned().partition(|(i, _)| self.space.parity_of(i));
        (
            GradedElement { space: self.space.clone(), terms: even },
            GradedElement { space: self.space.clone(), terms: odd },
        )
    }
}

impl fmt::Debug for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `idx => series` pairs in canonical index order, separated by `; `.
impl fmt::Display for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (i, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{} => {}", self.space.format_index(i), c)?;
        }
        Ok(())
    }
}

/// Accumulates a linear combination of basis vectors.
pub struct ElementBuilder {
    space: Arc<GradedSpace>,
    acc: BTreeMap<BasisIndex, MultiSeries>,
}

impl ElementBuilder {
    pub fn new(space: &Arc<GradedSpace>) -> Self {
        ElementBuilder { space: space.clone(), acc: BTreeMap::new() }
    }

    pub fn add(&mut self, idx: BasisIndex, c: &MultiSeries) {
        if c.is_zero() {
            return;
        }
        match self.acc.get_mut(&idx) {
            Some(x) => *x = &*x + c,
            None => {
                self.acc.insert(idx, c.clone());
            }
        }
    }

    /// Adds `±scale·e`.
    pub fn add_element(&mut self, e: &GradedElement, scale: Option<&MultiSeries>, negate: bool) {
        for (i, c) in &e.terms {
            let mut c = match scale {
                Some(s) => s * c,
                None => c.clone(),
            };
            if negate {
                c = -c;
            }
            self.add(*i, &c);
        }
    }

    pub fn finish(self) -> GradedElement {
        GradedElement { space: self.space, terms: self.acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }
}
