//! The first-order cocycle `Δ_1` of the Weyl model against a direct
//! evaluation and a checked-in dump.

use std::collections::BTreeMap;

use ainfty::models::weyl::{WeylConfig, WeylModel, ALG, MOD};
use ainfty::operator::parse_dump;
use ainfty::report::check_equal;
use ainfty::scalar::{Exponents, MultiSeries, Rational};
use ainfty::space::{BasisIndex, GradedElement};

/// `Σ c · t^k x^i y^j`, keyed by `(k, i, j)`.
type TPoly = BTreeMap<(u32, u8, u8), Rational>;

fn binom(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

fn falling(n: u8, k: u32) -> i64 {
    (0..k).map(|i| n as i64 - i as i64).product()
}

/// `x^a y^b ⋆_k x^c y^d` for `ω^{xy} = 1`, expanded from
/// `(∂_x ⊗ ∂_y − ∂_y ⊗ ∂_x)^k / k!`.
fn star_k(a: (u8, u8), b: (u8, u8), k: u32) -> Option<(Rational, (u8, u8))> {
    let mut total = 0i64;
    let mut out = None;
    for j in 0..=k {
        // ∂_x^j ∂_y^{k−j} on the left, ∂_y^j ∂_x^{k−j} on the right
        let l = falling(a.0, j) * falling(a.1, k - j);
        let r = falling(b.1, j) * falling(b.0, k - j);
        if l == 0 || r == 0 {
            continue;
        }
        let sign = if (k - j).is_multiple_of(2) { 1 } else { -1 };
        total += sign * binom(k, j) * l * r;
        out = Some((a.0 + b.0 - k as u8, a.1 + b.1 - k as u8));
    }
    let kf: i64 = (1..=k as i64).product();
    out.filter(|_| total != 0).map(|e| (Rational::new(total, kf), e))
}

/// The full product `Σ t^k ⋆_k`.
fn star(p: &TPoly, q: &TPoly) -> TPoly {
    let mut out = TPoly::new();
    for (&(k1, a, b), c1) in p {
        for (&(k2, c, d), c2) in q {
            for k in 0..=(a + b).min(c + d) as u32 {
                if let Some((c, e)) = star_k((a, b), (c, d), k) {
                    *out.entry((k1 + k2 + k, e.0, e.1)).or_default() += &(&(c1 * c2) * &c);
                }
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn mono(e: &BasisIndex) -> TPoly {
    TPoly::from([((0, e.key[0], e.key[1]), Rational::one())])
}

/// `∂_t` of the full product.
fn star_prime(p: &TPoly, q: &TPoly) -> TPoly {
    star(p, q)
        .into_iter()
        .filter(|((k, _, _), _)| *k > 0)
        .map(|((k, i, j), c)| ((k - 1, i, j), &c * &Rational::from_int(k as i64)))
        .collect()
}

/// `Δ_1(a, b, c) = (−1)^{|a|+|b|} m_2(m_{(t)}(a, b), ∂c)` where the only
/// arity-3 insertion pattern places `m_{(t)}` first and `∂` last.
fn delta1_oracle(w: &WeylModel, t: &[BasisIndex]) -> GradedElement {
    let sp = &w.space;
    let zero = GradedElement::zero(sp);
    if t[2].comp != MOD {
        return zero;
    }
    let sigma = |comp: u8| if comp == ALG { 1 } else { -1 };
    let mid = match (t[0].comp, t[1].comp) {
        (ALG, ALG) => ALG,
        (MOD, MOD) => return zero,
        _ => MOD,
    };
    // carrier parities: alg is odd, mod even
    let koszul = if (t[0].comp == ALG) ^ (t[1].comp == ALG) { -1 } else { 1 };
    let sign = koszul * sigma(t[0].comp) * sigma(mid);
    let value = star(&star_prime(&mono(&t[0]), &mono(&t[1])), &mono(&t[2]));
    let ctx = sp.context();
    let mut terms = Vec::new();
    for ((k, i, j), c) in value {
        let idx = sp.monomial(mid, &[i, j]).unwrap().expect("within the window");
        let series = MultiSeries::monomial(ctx, Exponents::single(w.t, k as u8), &c * &Rational::from_int(sign));
        terms.push((idx, series));
    }
    GradedElement::from_terms(sp, terms)
}

fn model() -> WeylModel {
    WeylModel::new(WeylConfig { degree_cap: 3, ..WeylConfig::default() }).unwrap()
}

#[test]
fn delta1_matches_direct_evaluation() {
    let w = model();
    let delta = w.delta_n(1).unwrap();
    assert_eq!(delta.degree(), 1);
    let bank = w.bank(3..=3);
    let mut nonzero = 0;
    for t in bank.tuples() {
        let v = delta.eval_basis(t).unwrap();
        nonzero += usize::from(!v.is_zero());
        assert_eq!(*v, delta1_oracle(&w, t), "{t:?}");
    }
    assert!(nonzero > 30);
    for n in [0, 1, 2, 4] {
        assert!(w.bank(n..=n).tuples().all(|t| delta.eval_basis(t).unwrap().is_zero()));
    }
}

#[test]
fn delta1_dump_is_stable() {
    let w = model();
    let delta = w.delta_n(1).unwrap();
    let bank = w.bank(3..=3);
    let text = delta.dump(&bank).unwrap();
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/delta1_weyl2d3.txt");
    if std::env::var_os("AINFTY_BLESS").is_some() {
        std::fs::write(path, &text).unwrap();
    }
    let golden = std::fs::read_to_string(path).unwrap();
    assert_eq!(text, golden);
    let table = parse_dump(&w.space, &golden).unwrap();
    assert!(check_equal("golden", &table, &delta, &bank).unwrap().is_ok());
}
