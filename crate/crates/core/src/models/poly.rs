//! Polynomial algebras `k[x^1,…,x^{2m}]` with the Weyl–Moyal star product.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::{factorial, Rational};
use crate::space::MAX_VARS;

pub type Monomial = [u8; MAX_VARS];

/// A polynomial with rational coefficients; zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Poly(BTreeMap<Monomial, Rational>);

impl Poly {
    pub fn zero() -> Self {
        Poly(BTreeMap::new())
    }

    pub fn monomial(e: Monomial, c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(e, &c);
        p
    }

    pub fn one() -> Self {
        Self::monomial([0; MAX_VARS], Rational::one())
    }

    /// The single variable `x^i`.
    pub fn var(i: usize) -> Self {
        let mut e = [0; MAX_VARS];
        e[i] = 1;
        Self::monomial(e, Rational::one())
    }

    pub fn add_term(&mut self, e: Monomial, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.0.entry(e).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.0.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.0 {
            out.add_term(*e, c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&Rational::from_int(-1)))
    }

    pub fn scale(&self, q: &Rational) -> Poly {
        if q.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|(e, c)| (*e, c * q)).collect())
    }

    /// Commutative product.
    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ea, ca) in &self.0 {
            for (eb, cb) in &other.0 {
                out.add_term(add_exps(ea, eb), &(ca * cb));
            }
        }
        out
    }

    /// Maximal total degree of a term (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.0.keys().map(|e| e.iter().map(|&x| x as u32).sum()).max().unwrap_or(0)
    }
}

pub fn add_exps(a: &Monomial, b: &Monomial) -> Monomial {
    let mut e = *a;
    for (x, y) in e.iter_mut().zip(b) {
        *x += y;
    }
    e
}

/// `k[x^1,…,x^{2m}]` equipped with a constant skew, non-degenerate form `ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyAlgebra {
    nvars: usize,
    degree_cap: u32,
    omega: Vec<Vec<Rational>>,
}

impl PolyAlgebra {
    /// Validates `ω` (square, even size, skew, invertible).
    pub fn new(omega: Vec<Vec<Rational>>, degree_cap: u32) -> Result<Self> {
        let n = omega.len();
        let bad = |why: &str| Error::InvalidParameter { name: "omega".into(), reason: why.into() };
        if n == 0 || !n.is_multiple_of(2) || n > MAX_VARS {
            return Err(bad("size must be even and between 2 and 8"));
        }
        if omega.iter().any(|r| r.len() != n) {
            return Err(bad("matrix must be square"));
        }
        for i in 0..n {
            for j in 0..n {
                if omega[i][j] != -&omega[j][i] {
                    return Err(bad("matrix must be skew-symmetric"));
                }
            }
        }
        if determinant(&omega).is_zero() {
            return Err(bad("matrix must be non-degenerate"));
        }
        Ok(PolyAlgebra { nvars: n, degree_cap, omega })
    }

    /// The standard form with `ω^{i,i+m} = 1 = −ω^{i+m,i}` on `2m` variables.
    pub fn standard(nvars: usize, degree_cap: u32) -> Result<Self> {
        let m = nvars / 2;
        let mut omega = vec![vec![Rational::zero(); nvars]; nvars];
        for i in 0..m {
            omega[i][i + m] = Rational::one();
            omega[i + m][i] = Rational::from_int(-1);
        }
        Self::new(omega, degree_cap)
    }

    /// Parses a row-major matrix of rationals, one row per line.
    pub fn parse_omega(text: &str) -> Result<Vec<Vec<Rational>>> {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.split_whitespace().map(|x| x.parse::<Rational>()).collect())
            .collect()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn omega(&self) -> &[Vec<Rational>] {
        &self.omega
    }

    /// `a ⋆_k b = (1/k!) ω^{i_1j_1}⋯ω^{i_kj_k} ∂^k a/∂x^{i_1}⋯∂x^{i_k} · ∂^k b/∂x^{j_1}⋯∂x^{j_k}`.
    pub fn star_k(&self, a: &Poly, b: &Poly, k: u32) -> Poly {
        let mut out = Poly::zero();
        for (ea, ca) in a.terms() {
            for (eb, cb) in b.terms() {
                let c = ca * cb;
                for (e, q) in self.star_k_monomials(ea, eb, k).terms() {
                    out.add_term(*e, &(&c * q));
                }
            }
        }
        out
    }

    /// `⋆_k` on two monomials, by applying the bidifferential operator
    /// `Σ ω^{ij} ∂_i ⊗ ∂_j` `k` times.
    pub fn star_k_monomials(&self, ea: &Monomial, eb: &Monomial, k: u32) -> Poly {
        let mut pairs: BTreeMap<(Monomial, Monomial), Rational> = BTreeMap::new();
        pairs.insert((*ea, *eb), Rational::one());
        for _ in 0..k {
            let mut next: BTreeMap<(Monomial, Monomial), Rational> = BTreeMap::new();
            for ((x, y), c) in &pairs {
                for i in 0..self.nvars {
                    if x[i] == 0 {
                        continue;
                    }
                    for j in 0..self.nvars {
                        let w = &self.omega[i][j];
                        if w.is_zero() || y[j] == 0 {
                            continue;
                        }
                        let (mut x2, mut y2) = (*x, *y);
                        x2[i] -= 1;
                        y2[j] -= 1;
                        let q = c * w * Rational::from_int(x[i] as i64 * y[j] as i64);
                        let e = next.entry((x2, y2)).or_insert_with(Rational::zero);
                        *e += &q;
                    }
                }
            }
            next.retain(|_, c| !c.is_zero());
            pairs = next;
        }
        let inv = factorial(k).recip();
        let mut out = Poly::zero();
        for ((x, y), c) in pairs {
            out.add_term(add_exps(&x, &y), &(&c * &inv));
        }
        out
    }

    /// The star product `a ∗ b = a·b + Σ_{k≥1} t^k (a ⋆_k b)` as the list of
    /// its non-zero `t`-coefficients `(k, a ⋆_k b)`. The sum is finite.
    pub fn weyl_star(&self, a: &Poly, b: &Poly) -> Vec<(u32, Poly)> {
        let top = a.degree().min(b.degree());
        (0..=top).map(|k| (k, self.star_k(a, b, k))).filter(|(_, p)| !p.is_zero()).collect()
    }
}

/// Exact determinant by Gaussian elimination over ℚ.
fn determinant(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= &a[col][col];
        let p = a[col][col].recip();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &p;
            for c in col..n {
                let v = &f * &a[col][c];
                a[r][c] -= &v;
            }
        }
    }
    det
}
