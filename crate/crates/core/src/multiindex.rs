//! Multi-indices `I = (i_1, ..., i_N)` for monomials `z^I`.

use std::fmt;

/// Exponent vector of a monomial in `N` variables. Ordering is
/// lexicographic (inherited from `Vec<u32>`), which fixes the iteration
/// order of every coefficient map in the crate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    /// The zero index (constant monomial) in `nvars` variables.
    pub fn zero(nvars: usize) -> Self {
        MultiIndex(vec![0; nvars])
    }

    /// The unit index `e_var` (0-based variable).
    pub fn unit(nvars: usize, var: usize) -> Self {
        assert!(var < nvars, "variable index out of range");
        let mut e = vec![0; nvars];
        e[var] = 1;
        MultiIndex(e)
    }

    /// Monomial `z_var^exp`.
    pub fn single(nvars: usize, var: usize, exp: u32) -> Self {
        assert!(var < nvars, "variable index out of range");
        let mut e = vec![0; nvars];
        e[var] = exp;
        MultiIndex(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.0[var]
    }

    /// Total degree `|I|`.
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.len(), other.len());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Decrement component `var` by one; `None` if it is already zero.
    pub fn checked_dec(&self, var: usize) -> Option<MultiIndex> {
        if self.0[var] == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[var] -= 1;
        Some(MultiIndex(e))
    }

    /// Increment component `var` by one.
    pub fn inc(&self, var: usize) -> MultiIndex {
        let mut e = self.0.clone();
        e[var] += 1;
        MultiIndex(e)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_order() {
        let a = MultiIndex::new(vec![0, 2]);
        let b = MultiIndex::new(vec![1, 0]);
        assert!(a < b);
    }

    #[test]
    fn degree_and_shift() {
        let i = MultiIndex::new(vec![2, 0, 1]);
        assert_eq!(i.total_degree(), 3);
        assert_eq!(i.checked_dec(1), None);
        assert_eq!(i.checked_dec(0), Some(MultiIndex::new(vec![1, 0, 1])));
        assert_eq!(i.inc(2), MultiIndex::new(vec![2, 0, 2]));
    }
}
