use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::Rational;
use crate::error::{Error, Result};

/// Maximum number of formal parameters in one context.
pub const MAX_PARAMS: usize = 8;

/// A formal deformation parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Parameter {
    pub name: String,
    /// ℤ-degree of the variable; always even.
    pub degree: i64,
    /// Largest exponent kept; higher powers are silently dropped.
    pub cap: u32,
}

impl Parameter {
    pub fn new(name: impl Into<String>, degree: i64, cap: u32) -> Self {
        Parameter { name: name.into(), degree, cap }
    }
}

/// Position of a parameter inside its [`ParameterContext`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamId(pub usize);

/// The ordered list of parameters shared by every series of a computation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParameterContext {
    params: Vec<Parameter>,
}

impl ParameterContext {
    pub fn new(params: Vec<Parameter>) -> Result<Arc<Self>> {
        if params.len() > MAX_PARAMS {
            return Err(Error::Precondition(format!("at most {MAX_PARAMS} parameters per context")));
        }
        for (i, p) in params.iter().enumerate() {
            let invalid = |reason: &str| Error::InvalidParameter { name: p.name.clone(), reason: reason.to_string() };
            if p.degree % 2 != 0 {
                return Err(invalid("degree must be even"));
            }
            if p.cap > u8::MAX as u32 {
                return Err(invalid("cap must be at most 255"));
            }
            if p.name.is_empty() || !p.name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(invalid("name must be a non-empty identifier"));
            }
            if params[..i].iter().any(|q| q.name == p.name) {
                return Err(invalid("duplicate name"));
            }
        }
        Ok(Arc::new(ParameterContext { params }))
    }

    /// The empty context: series are plain rationals.
    pub fn empty() -> Arc<Self> {
        Arc::new(ParameterContext { params: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn params(&self) -> &[Parameter] {
        &self.params
    }

    pub fn get(&self, id: ParamId) -> &Parameter {
        &self.params[id.0]
    }

    pub fn id(&self, name: &str) -> Result<ParamId> {
        self.params
            .iter()
            .position(|p| p.name == name)
            .map(ParamId)
            .ok_or_else(|| Error::UnknownParameter(name.to_string()))
    }

    pub fn check(&self, id: ParamId) -> Result<()> {
        if id.0 < self.params.len() {
            Ok(())
        } else {
            Err(Error::UnknownParameter(format!("#{}", id.0)))
        }
    }

    fn within_caps(&self, e: &Exponents) -> bool {
        self.params.iter().zip(e.0.iter()).all(|(p, &x)| x as u32 <= p.cap)
    }
}

/// Exponent vector of a monomial in the parameters, in context order.
///
/// Ordered graded-lexicographically: lower total degree first, then
/// larger exponents of earlier parameters first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Exponents(pub [u8; MAX_PARAMS]);

impl Exponents {
    pub fn zero() -> Self {
        Exponents([0; MAX_PARAMS])
    }

    pub fn single(id: ParamId, power: u8) -> Self {
        let mut e = Self::zero();
        e.0[id.0] = power;
        e
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|&x| x as u32).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn get(&self, id: ParamId) -> u8 {
        self.0[id.0]
    }

    fn checked_add(&self, other: &Self) -> Option<Self> {
        let mut out = [0u8; MAX_PARAMS];
        for i in 0..MAX_PARAMS {
            out[i] = self.0[i].checked_add(other.0[i])?;
        }
        Some(Exponents(out))
    }
}

impl Ord for Exponents {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total().cmp(&other.total()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Exponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// `Σ eᵢ·|tᵢ|`, the ℤ-degree of a parameter monomial.
pub fn monomial_degree(e: &Exponents, ctx: &ParameterContext) -> i64 {
    ctx.params.iter().zip(e.0.iter()).map(|(p, &x)| p.degree * x as i64).sum()
}

type Terms = SmallVec<[(Exponents, Rational); 1]>;

/// A truncated multivariate power series over ℚ.
///
/// Terms are stored sorted in canonical order with no zero coefficients;
/// every exponent respects its parameter's cap.
#[derive(Clone)]
pub struct MultiSeries {
    ctx: Arc<ParameterContext>,
    terms: Terms,
}

fn same_ctx(a: &Arc<ParameterContext>, b: &Arc<ParameterContext>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl MultiSeries {
    pub fn zero(ctx: &Arc<ParameterContext>) -> Self {
        MultiSeries { ctx: ctx.clone(), terms: Terms::new() }
    }

    pub fn one(ctx: &Arc<ParameterContext>) -> Self {
        Self::constant(ctx, Rational::one())
    }

    pub fn constant(ctx: &Arc<ParameterContext>, c: Rational) -> Self {
        Self::monomial(ctx, Exponents::zero(), c)
    }

    /// `c · t^e`, or zero when `e` exceeds a cap.
    pub fn monomial(ctx: &Arc<ParameterContext>, e: Exponents, c: Rational) -> Self {
        let mut s = Self::zero(ctx);
        if !c.is_zero() && ctx.within_caps(&e) {
            s.terms.push((e, c));
        }
        s
    }

    /// The series consisting of the single variable `p`.
    pub fn param(ctx: &Arc<ParameterContext>, p: ParamId) -> Result<Self> {
        ctx.check(p)?;
        Ok(Self::monomial(ctx, Exponents::single(p, 1), Rational::one()))
    }

    /// Builds a series from arbitrary terms: merges duplicates, drops zeros
    /// and anything beyond the caps.
    pub fn from_terms(ctx: &Arc<ParameterContext>, terms: impl IntoIterator<Item = (Exponents, Rational)>) -> Self {
        let mut v: Terms = terms.into_iter().filter(|(e, c)| !c.is_zero() && ctx.within_caps(e)).collect();
        normalize(&mut v);
        MultiSeries { ctx: ctx.clone(), terms: v }
    }

    pub fn context(&self) -> &Arc<ParameterContext> {
        &self.ctx
    }

    pub fn terms(&self) -> &[(Exponents, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_zero() && self.terms[0].1.is_one()
    }

    pub fn constant_term(&self) -> Rational {
        match self.terms.first() {
            Some((e, c)) if e.is_zero() => c.clone(),
            _ => Rational::zero(),
        }
    }

    pub fn coeff(&self, e: &Exponents) -> Rational {
        self.terms.binary_search_by(|(x, _)| x.cmp(e)).map(|i| self.terms[i].1.clone()).unwrap_or_default()
    }

    /// Degree of the series if all its monomials share one degree.
    /// The zero series reports `None`.
    pub fn degree(&self) -> Option<i64> {
        let mut it = self.terms.iter().map(|(e, _)| monomial_degree(e, &self.ctx));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if !same_ctx(&self.ctx, &other.ctx) {
            return Err(Error::ContextMismatch);
        }
        Ok(self.add_unchecked(other, false))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        if !same_ctx(&self.ctx, &other.ctx) {
            return Err(Error::ContextMismatch);
        }
        Ok(self.add_unchecked(other, true))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if !same_ctx(&self.ctx, &other.ctx) {
            return Err(Error::ContextMismatch);
        }
        Ok(self.mul_unchecked(other))
    }

    /// `self^n`, truncated like any product.
    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one(&self.ctx);
        for _ in 0..n {
            out = out.mul_unchecked(self);
        }
        out
    }

    fn add_unchecked(&self, other: &Self, negate: bool) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { -other } else { other.clone() };
        }
        let mut out = Terms::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        MultiSeries { ctx: self.ctx.clone(), terms: out }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.ctx);
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let mut v = Terms::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                if let Some(e) = ea.checked_add(eb) {
                    if self.ctx.within_caps(&e) {
                        v.push((e, ca * cb));
                    }
                }
            }
        }
        normalize(&mut v);
        MultiSeries { ctx: self.ctx.clone(), terms: v }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero(&self.ctx);
        }
        if q.is_one() {
            return self.clone();
        }
        MultiSeries { ctx: self.ctx.clone(), terms: self.terms.iter().map(|(e, c)| (*e, c * q)).collect() }
    }

    /// Multiplies by `(-1)^parity`.
    pub fn signed(self, parity: bool) -> Self {
        if parity {
            -self
        } else {
            self
        }
    }

    /// Formal partial derivative `∂/∂p`.
    pub fn partial(&self, p: ParamId) -> Result<Self> {
        self.ctx.check(p)?;
        let terms = self.terms.iter().filter_map(|(e, c)| {
            let k = e.get(p);
            (k > 0).then(|| {
                let mut e2 = *e;
                e2.0[p.0] -= 1;
                (e2, c * &Rational::from_int(k as i64))
            })
        });
        Ok(Self::from_terms(&self.ctx, terms))
    }

    /// Sets `p = 0`: drops every term with a positive `p`-exponent.
    pub fn eval_zero(&self, p: ParamId) -> Result<Self> {
        self.ctx.check(p)?;
        Ok(MultiSeries {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().filter(|(e, _)| e.get(p) == 0).cloned().collect(),
        })
    }

    /// Coefficient of `p^k`, as a series no longer depending on `p`.
    pub fn coefficient_of(&self, p: ParamId, k: u8) -> Result<Self> {
        self.ctx.check(p)?;
        let terms = self.terms.iter().filter(|(e, _)| e.get(p) == k).map(|(e, c)| {
            let mut e2 = *e;
            e2.0[p.0] = 0;
            (e2, c.clone())
        });
        Ok(Self::from_terms(&self.ctx, terms))
    }

    /// Re-expresses the series in a context with the same parameters but
    /// possibly smaller caps.
    pub fn restrict(&self, ctx: &Arc<ParameterContext>) -> Result<Self> {
        let compatible = ctx.len() == self.ctx.len()
            && ctx.params.iter().zip(&self.ctx.params).all(|(a, b)| a.name == b.name && a.degree == b.degree);
        if !compatible {
            return Err(Error::ContextMismatch);
        }
        Ok(Self::from_terms(ctx, self.terms.iter().cloned()))
    }

    /// Parses the textual form produced by `Display`.
    pub fn parse(ctx: &Arc<ParameterContext>, text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "0" {
            return Ok(Self::zero(ctx));
        }
        let mut terms = Vec::new();
        // Split on top-level " + " / " - " separators; the first term may carry a leading '-'.
        let mut rest = text;
        let mut negative = false;
        if let Some(r) = rest.strip_prefix('-') {
            negative = true;
            rest = r;
        }
        loop {
            let cut = [rest.find(" + "), rest.find(" - ")].into_iter().flatten().min();
            let (term, next) = match cut {
                Some(i) => (&rest[..i], Some((&rest[i + 3..], &rest[i + 1..i + 2] == "-"))),
                None => (rest, None),
            };
            let (e, mut c) = parse_term(ctx, term)?;
            if negative {
                c = -c;
            }
            terms.push((e, c));
            match next {
                Some((r, neg)) => {
                    rest = r;
                    negative = neg;
                }
                None => break,
            }
        }
        Ok(Self::from_terms(ctx, terms))
    }
}

/// A term is a product of factors separated by `*` or whitespace; each
/// factor is a rational or `name^k`.
fn parse_term(ctx: &ParameterContext, term: &str) -> Result<(Exponents, Rational)> {
    let bad = || Error::Parse(format!("invalid series term `{term}`"));
    let mut c = Rational::one();
    let mut e = Exponents::zero();
    let mut any = false;
    for factor in term.split(|ch: char| ch == '*' || ch.is_whitespace()).filter(|f| !f.is_empty()) {
        any = true;
        if factor.starts_with(|ch: char| ch.is_ascii_digit() || ch == '-') {
            let q: Rational = factor.parse()?;
            c = &c * &q;
            continue;
        }
        let (name, pow) = match factor.split_once('^') {
            Some((n, p)) => (n, p.parse::<u8>().map_err(|_| bad())?),
            None => (factor, 1),
        };
        let id = ctx.id(name)?;
        e.0[id.0] = e.0[id.0].checked_add(pow).ok_or_else(bad)?;
    }
    if !any {
        return Err(bad());
    }
    Ok((e, c))
}

fn normalize(v: &mut Terms) {
    if v.len() <= 1 {
        v.retain(|(_, c)| !c.is_zero());
        return;
    }
    v.sort_by_key(|a| a.0);
    let mut out = Terms::with_capacity(v.len());
    for (e, c) in v.drain(..) {
        match out.last_mut() {
            Some((le, lc)) if *le == e => *lc = &*lc + &c,
            _ => out.push((e, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    *v = out;
}

impl PartialEq for MultiSeries {
    fn eq(&self, other: &Self) -> bool {
        same_ctx(&self.ctx, &other.ctx) && self.terms == other.terms
    }
}

impl Eq for MultiSeries {}

impl std::hash::Hash for MultiSeries {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        for (e, c) in &self.terms {
            e.hash(state);
            c.hash(state);
        }
    }
}

impl fmt::Debug for MultiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `p/q * t^a u^b` terms joined by ` + ` / ` - `, canonical order.
impl fmt::Display for MultiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let mag = if i == 0 {
                c.clone()
            } else if c.is_negative() {
                write!(f, " - ")?;
                c.abs()
            } else {
                write!(f, " + ")?;
                c.clone()
            };
            write!(f, "{mag}")?;
            if !e.is_zero() {
                write!(f, " *")?;
                for (p, &k) in self.ctx.params.iter().zip(e.0.iter()) {
                    match k {
                        0 => {}
                        1 => write!(f, " {}", p.name)?,
                        k => write!(f, " {}^{k}", p.name)?,
                    }
                }
            }
        }
        Ok(())
    }
}

/// Panics on context mismatch; use [`MultiSeries::checked_add`] where the
/// contexts are not known to agree.
impl Add for &MultiSeries {
    type Output = MultiSeries;
    fn add(self, rhs: &MultiSeries) -> MultiSeries {
        debug_assert!(same_ctx(&self.ctx, &rhs.ctx), "context mismatch");
        self.add_unchecked(rhs, false)
    }
}

impl Sub for &MultiSeries {
    type Output = MultiSeries;
    fn sub(self, rhs: &MultiSeries) -> MultiSeries {
        debug_assert!(same_ctx(&self.ctx, &rhs.ctx), "context mismatch");
        self.add_unchecked(rhs, true)
    }
}

impl Mul for &MultiSeries {
    type Output = MultiSeries;
    fn mul(self, rhs: &MultiSeries) -> MultiSeries {
        debug_assert!(same_ctx(&self.ctx, &rhs.ctx), "context mismatch");
        self.mul_unchecked(rhs)
    }
}

impl Neg for &MultiSeries {
    type Output = MultiSeries;
    fn neg(self) -> MultiSeries {
        MultiSeries { ctx: self.ctx.clone(), terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl Neg for MultiSeries {
    type Output = MultiSeries;
    fn neg(mut self) -> MultiSeries {
        for (_, c) in self.terms.iter_mut() {
            *c = -&*c;
        }
        self
    }
}
