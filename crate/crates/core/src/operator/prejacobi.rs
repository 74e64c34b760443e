use super::MultiOperator;
use crate::bank::TupleBank;
use crate::error::Result;
use crate::report::{check_equal, Report};
use crate::scalar::MultiSeries;

/// Right-hand side of the pre-Jacobi identity for `A{A_1,…,A_m}{B_1,…,B_n}`:
/// the sum over all ways of distributing the `B`s, in order, either directly
/// into `A` (before, between or after the `A_i`) or into the braces of the
/// `A_i`, each term signed by `Σ_i |A_i|·(Σ |B_j| over B's placed before A_i)`.
pub fn prejacobi_rhs(a: &MultiOperator, inner: &[MultiOperator], outer: &[MultiOperator]) -> Result<MultiOperator> {
    let space = a.space();
    let m = inner.len();
    let n = outer.len();
    let degree = a.degree() + inner.iter().chain(outer).map(|o| o.degree()).sum::<i64>();
    let ctx = space.context();
    let mut terms = Vec::new();
    // group sizes: direct_0, in_1, direct_1, …, in_m, direct_m
    let mut sizes = vec![0usize; 2 * m + 1];
    compositions(n, &mut sizes, 0, &mut |sizes| {
        let mut list = Vec::new();
        let mut next = 0;
        let mut parity_before = false;
        let mut sign = false;
        for (g, &size) in sizes.iter().enumerate() {
            let group = &outer[next..next + size];
            next += size;
            if g % 2 == 0 {
                list.extend(group.iter().cloned());
            } else {
                let ai = &inner[g / 2];
                sign ^= ai.parity() && parity_before;
                list.push(MultiOperator::brace(ai, group)?);
            }
            parity_before ^= group.iter().fold(false, |p, b| p ^ b.parity());
        }
        let term = MultiOperator::brace(a, &list)?;
        terms.push((MultiSeries::one(ctx).signed(sign), term));
        Ok(())
    })?;
    MultiOperator::linear_combination(space, degree, terms)
}

fn compositions(n: usize, sizes: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize]) -> Result<()>) -> Result<()> {
    if k + 1 == sizes.len() {
        sizes[k] = n;
        return f(sizes);
    }
    for x in 0..=n {
        sizes[k] = x;
        compositions(n - x, sizes, k + 1, f)?;
    }
    Ok(())
}

/// Residuals of `A{A_1,…,A_m}{B_1,…,B_n}` minus its shuffle expansion on
/// every bank tuple.
pub fn verify_prejacobi(
    a: &MultiOperator,
    inner: &[MultiOperator],
    outer: &[MultiOperator],
    bank: &TupleBank,
) -> Result<Report> {
    let lhs = MultiOperator::brace(&MultiOperator::brace(a, inner)?, outer)?;
    let rhs = prejacobi_rhs(a, inner, outer)?;
    check_equal("prejacobi", &lhs, &rhs, bank)
}
