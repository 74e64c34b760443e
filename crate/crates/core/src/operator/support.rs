use std::fmt;

use smallvec::SmallVec;

/// Finite arity support of an operator.
///
/// Each arity carries a bitmask over the parameter context: bit `i` is set
/// when the coefficients of that component may depend on parameter `i`. The
/// masks are conservative and let derivatives drop components that cannot
/// survive differentiation.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Support(SmallVec<[(usize, u8); 4]>);

impl Support {
    pub fn empty() -> Self {
        Support(SmallVec::new())
    }

    pub fn from_arities(arities: impl IntoIterator<Item = usize>, mask: u8) -> Self {
        let mut s = Support::empty();
        for a in arities {
            s.insert(a, mask);
        }
        s
    }

    pub fn insert(&mut self, arity: usize, mask: u8) {
        match self.0.binary_search_by_key(&arity, |(a, _)| *a) {
            Ok(i) => self.0[i].1 |= mask,
            Err(i) => self.0.insert(i, (arity, mask)),
        }
    }

    pub fn union(&self, other: &Support, extra_mask: u8) -> Support {
        let mut s = self.clone();
        for &(a, m) in &other.0 {
            s.insert(a, m | extra_mask);
        }
        s
    }

    pub fn arities(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|(a, _)| *a)
    }

    pub fn entries(&self) -> &[(usize, u8)] {
        &self.0
    }

    pub fn contains(&self, arity: usize) -> bool {
        self.0.binary_search_by_key(&arity, |(a, _)| *a).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_arity(&self) -> Option<usize> {
        self.0.last().map(|(a, _)| *a)
    }

    /// Components that may depend on parameter `bit`.
    pub(crate) fn depending_on(&self, bit: usize) -> Support {
        Support(self.0.iter().copied().filter(|(_, m)| m & (1 << bit) != 0).collect())
    }

    pub(crate) fn without(&self, bit: usize) -> Support {
        Support(self.0.iter().map(|&(a, m)| (a, m & !(1 << bit))).collect())
    }
}

impl fmt::Debug for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.arities()).finish()
    }
}
