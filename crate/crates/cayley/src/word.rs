//! Words over the variable alphabet: the monomials of the free algebra.
//!
//! A word is an ordered sequence of variables; `x1*x2` and `x2*x1` are
//! different words.  The derived `Ord` is lexicographic on variable ids and
//! gives polynomials a stable term order.

use crate::vars::VarId;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Word(Vec<VarId>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn single(v: VarId) -> Self {
        Word(vec![v])
    }

    pub fn from_letters(letters: Vec<VarId>) -> Self {
        Word(letters)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[VarId] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.0.len() + other.0.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn push(&mut self, v: VarId) {
        self.0.push(v);
    }

    /// First `k` letters.
    pub fn prefix(&self, k: usize) -> Word {
        Word(self.0[..k].to_vec())
    }

    /// Letters from position `k` (0-based) to the end.
    pub fn suffix_from(&self, k: usize) -> Word {
        Word(self.0[k..].to_vec())
    }

    /// Contiguous letters `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }
}

impl FromIterator<VarId> for Word {
    fn from_iter<T: IntoIterator<Item = VarId>>(iter: T) -> Self {
        Word(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concat_and_slices() {
        let (a, b, c) = (VarId(0), VarId(1), VarId(2));
        let w = Word::from_letters(vec![a, b, c]);
        assert_eq!(w.len(), 3);
        assert_eq!(w.prefix(2), Word::from_letters(vec![a, b]));
        assert_eq!(w.suffix_from(1), Word::from_letters(vec![b, c]));
        assert_eq!(w.slice(1, 2), Word::single(b));
        assert_eq!(w.prefix(2).concat(&w.suffix_from(2)), w);
        assert_eq!(Word::empty().concat(&w), w);
        assert_ne!(
            Word::from_letters(vec![a, b]),
            Word::from_letters(vec![b, a])
        );
    }
}
