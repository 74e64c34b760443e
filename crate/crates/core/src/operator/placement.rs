//! Enumeration of non-overlapping, order-preserving insertions.

use smallvec::SmallVec;

use super::Support;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Slot {
    /// The outer operator reads input `j` directly.
    Input(usize),
    /// Insert `which` reads inputs `start..start + len`.
    Insert { which: usize, start: usize, len: usize },
}

/// Calls `f(slots, sign)` for every way of inserting operators with the
/// given supports and parities into an outer operator, over `n` inputs whose
/// prefix parities are `prefix` (`prefix[j]` = parity of `|v_0|+…+|v_{j-1}|`).
///
/// `sign` is the parity of `Σ |A_i| · (|v_0|+…+|v_{k_i - 1}|)` where `k_i`
/// is the first input read by insert `i`.
pub(crate) fn for_each_placement(
    outer: &Support,
    inserts: &[(&Support, bool)],
    prefix: &[bool],
    f: &mut dyn FnMut(&[Slot], bool) -> Result<()>,
) -> Result<()> {
    let n = prefix.len() - 1;
    let m = inserts.len();
    let mut slots: SmallVec<[Slot; 8]> = SmallVec::new();
    for a in outer.arities() {
        if a < m || a > n + m {
            continue;
        }
        let mut st = State { a, n, inserts, prefix, slots: &mut slots, f: &mut *f };
        st.go(0, 0, false)?;
    }
    Ok(())
}

struct State<'a> {
    a: usize,
    n: usize,
    inserts: &'a [(&'a Support, bool)],
    prefix: &'a [bool],
    slots: &'a mut SmallVec<[Slot; 8]>,
    f: &'a mut dyn FnMut(&[Slot], bool) -> Result<()>,
}

impl State<'_> {
    fn go(&mut self, i: usize, j: usize, sign: bool) -> Result<()> {
        let s = self.slots.len();
        let m = self.inserts.len();
        if s == self.a {
            if i == m && j == self.n {
                (self.f)(self.slots, sign)?;
            }
            return Ok(());
        }
        if self.a - s > m - i && j < self.n {
            self.slots.push(Slot::Input(j));
            self.go(i, j + 1, sign)?;
            self.slots.pop();
        }
        if i < m {
            let (support, odd) = self.inserts[i];
            let sign = sign ^ (odd && self.prefix[j]);
            for r in support.arities() {
                if j + r > self.n {
                    break;
                }
                self.slots.push(Slot::Insert { which: i, start: j, len: r });
                self.go(i + 1, j + r, sign)?;
                self.slots.pop();
            }
        }
        Ok(())
    }
}

/// Prefix parities of a sequence of parities.
pub(crate) fn prefix_parities(parities: impl IntoIterator<Item = bool>) -> SmallVec<[bool; 9]> {
    let mut out = SmallVec::new();
    let mut acc = false;
    out.push(acc);
    for p in parities {
        acc ^= p;
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(outer: &[usize], inserts: &[&[usize]], n: usize) -> usize {
        let outer = Support::from_arities(outer.iter().copied(), 0);
        let sup: Vec<Support> = inserts.iter().map(|a| Support::from_arities(a.iter().copied(), 0)).collect();
        let ins: Vec<(&Support, bool)> = sup.iter().map(|s| (s, false)).collect();
        let prefix = vec![false; n + 1];
        let mut c = 0;
        for_each_placement(&outer, &ins, &prefix, &mut |_, _| {
            c += 1;
            Ok(())
        })
        .unwrap();
        c
    }

    #[test]
    fn single_insertion_counts() {
        // f of arity 3 with g of arity 2: three positions on 4 inputs.
        assert_eq!(count(&[3], &[&[2]], 4), 3);
        // arity-0 insert: one placement per slot.
        assert_eq!(count(&[2], &[&[0]], 1), 2);
    }

    #[test]
    fn double_insertion_counts() {
        // outer arity 2 with two unary inserts: only one placement.
        assert_eq!(count(&[2], &[&[1], &[1]], 2), 1);
        // outer arity 3, two unary inserts on 3 inputs: C(3,2) = 3.
        assert_eq!(count(&[3], &[&[1], &[1]], 3), 3);
        // too few slots.
        assert_eq!(count(&[1], &[&[1], &[1]], 2), 0);
    }
}
