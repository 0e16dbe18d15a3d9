//! Sparse non-commutative polynomials over the rationals.
//!
//! An [`NcPoly`] maps words to nonzero coefficients; the zero polynomial has
//! an empty support.  Multiplication concatenates words, so the algebra is
//! genuinely non-commutative.  The JSON form used by the command-line tools
//! is a list of `{"word": [names...], "coeff": "num/den"}` terms sorted by
//! the rendered variable names.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num::traits::Zero;
use serde_json::{json, Value};

use crate::rational::{format_rational, parse_rational, Rational};
use crate::vars::{VarId, VarTable};
use crate::word::Word;

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct NcPoly {
    terms: BTreeMap<Word, Rational>,
}

impl NcPoly {
    pub fn zero() -> Self {
        NcPoly::default()
    }

    pub fn one() -> Self {
        NcPoly::constant(Rational::from_integer(1.into()))
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = NcPoly::zero();
        p.add_term(Word::empty(), c);
        p
    }

    pub fn var(v: VarId) -> Self {
        NcPoly::monomial(Word::single(v), Rational::from_integer(1.into()))
    }

    pub fn monomial(w: Word, c: Rational) -> Self {
        let mut p = NcPoly::zero();
        p.add_term(w, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of words with nonzero coefficient.
    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.terms.iter()
    }

    /// Coefficient of `w`, zero if absent.
    pub fn coeff(&self, w: &Word) -> Rational {
        self.terms.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    /// Adds `c * w`, dropping the term if the total cancels to zero.
    pub fn add_term(&mut self, w: Word, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> NcPoly {
        if c.is_zero() {
            return NcPoly::zero();
        }
        NcPoly {
            terms: self
                .terms
                .iter()
                .map(|(w, q)| (w.clone(), q * c))
                .collect(),
        }
    }

    /// Coefficient-wise product: words present in both survive with the
    /// product of their coefficients.
    pub fn hadamard(&self, other: &NcPoly) -> NcPoly {
        let (small, large) = if self.support_size() <= other.support_size() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = NcPoly::zero();
        for (w, c) in small.terms() {
            if let Some(d) = large.terms.get(w) {
                out.add_term(w.clone(), c * d);
            }
        }
        out
    }

    /// Largest word length in the support; zero for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    /// If every word in the support has the same length, returns it.
    /// The zero polynomial is vacuously homogeneous of degree zero.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut lens = self.terms.keys().map(Word::len);
        let first = match lens.next() {
            None => return Some(0),
            Some(l) => l,
        };
        lens.all(|l| l == first).then_some(first)
    }

    /// All variables occurring in the support.
    pub fn vars(&self) -> std::collections::BTreeSet<VarId> {
        self.terms
            .keys()
            .flat_map(|w| w.letters().iter().copied())
            .collect()
    }

    pub fn to_json(&self, table: &VarTable) -> Value {
        let mut rendered: Vec<(Vec<&str>, String)> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let names: Vec<&str> = w.letters().iter().map(|&v| table.name(v)).collect();
                (names, format_rational(c))
            })
            .collect();
        rendered.sort();
        Value::Array(
            rendered
                .into_iter()
                .map(|(word, coeff)| json!({ "word": word, "coeff": coeff }))
                .collect(),
        )
    }

    pub fn from_json(value: &Value, table: &mut VarTable) -> Result<NcPoly, String> {
        let arr = value
            .as_array()
            .ok_or("polynomial JSON must be an array of terms")?;
        let mut p = NcPoly::zero();
        for term in arr {
            let obj = term.as_object().ok_or("each term must be an object")?;
            let word_val = obj.get("word").ok_or("term missing `word`")?;
            let names = word_val
                .as_array()
                .ok_or("`word` must be an array of variable names")?;
            let mut w = Word::empty();
            for n in names {
                let name = n.as_str().ok_or("variable names must be strings")?;
                w.push(table.intern(name));
            }
            let coeff = obj
                .get("coeff")
                .and_then(Value::as_str)
                .ok_or("term missing string `coeff`")?;
            p.add_term(w, parse_rational(coeff)?);
        }
        Ok(p)
    }
}

impl Add for &NcPoly {
    type Output = NcPoly;
    fn add(self, rhs: &NcPoly) -> NcPoly {
        let mut out = self.clone();
        for (w, c) in rhs.terms() {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl Sub for &NcPoly {
    type Output = NcPoly;
    fn sub(self, rhs: &NcPoly) -> NcPoly {
        let mut out = self.clone();
        for (w, c) in rhs.terms() {
            out.add_term(w.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &NcPoly {
    type Output = NcPoly;
    fn neg(self) -> NcPoly {
        NcPoly {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), -c.clone()))
                .collect(),
        }
    }
}

/// Free-algebra product: words concatenate in order.
impl Mul for &NcPoly {
    type Output = NcPoly;
    fn mul(self, rhs: &NcPoly) -> NcPoly {
        let mut out = NcPoly::zero();
        for (u, a) in self.terms() {
            for (v, b) in rhs.terms() {
                out.add_term(u.concat(v), a * b);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn xy() -> (VarTable, NcPoly, NcPoly) {
        let mut t = VarTable::new();
        let x = NcPoly::var(t.intern("x"));
        let y = NcPoly::var(t.intern("y"));
        (t, x, y)
    }

    #[test]
    fn product_does_not_commute() {
        let (_, x, y) = xy();
        let xy = &x * &y;
        let yx = &y * &x;
        assert_ne!(xy, yx);
        // (x + y)^2 = xx + xy + yx + yy, with xy and yx distinct words.
        let s = &x + &y;
        let sq = &s * &s;
        assert_eq!(sq.support_size(), 4);
        assert_eq!(sq.coeff(&xy.terms().next().unwrap().0.clone()), int(1));
    }

    #[test]
    fn cancellation_drops_terms() {
        let (_, x, y) = xy();
        let p = &(&x + &y) - &y;
        assert_eq!(p, x);
        let q = &x - &x;
        assert!(q.is_zero());
        assert_eq!(q.support_size(), 0);
        assert!((&x * &q).is_zero());
        assert_eq!(x.scale(&int(0)), NcPoly::zero());
    }

    #[test]
    fn constants_are_the_empty_word() {
        let (_, x, _) = xy();
        let two = NcPoly::constant(int(2));
        assert_eq!(&two * &x, x.scale(&int(2)));
        assert_eq!(&x * &two, x.scale(&int(2)));
        assert_eq!(&NcPoly::one() * &x, x);
        assert_eq!(two.degree(), 0);
    }

    #[test]
    fn hadamard_keeps_common_words_only() {
        let (_, x, y) = xy();
        let f = &(&x * &y).scale(&rat(2, 3)) + &(&y * &x);
        let g = &(&x * &y).scale(&int(3)) + &(&x * &x);
        let h = f.hadamard(&g);
        assert_eq!(h, (&x * &y).scale(&int(2)));
        // Pointwise, so it commutes even though * does not.
        assert_eq!(f.hadamard(&g), g.hadamard(&f));
        // Hadamard with a "word indicator" picks out one coefficient.
        let ind = &x * &y;
        assert_eq!(f.hadamard(&ind), (&x * &y).scale(&rat(2, 3)));
    }

    #[test]
    fn degree_and_homogeneity() {
        let (_, x, y) = xy();
        assert_eq!(NcPoly::zero().degree(), 0);
        assert_eq!(NcPoly::zero().homogeneous_degree(), Some(0));
        let f = &(&x * &y) + &(&y * &x);
        assert_eq!(f.degree(), 2);
        assert_eq!(f.homogeneous_degree(), Some(2));
        let g = &f + &x;
        assert_eq!(g.homogeneous_degree(), None);
    }

    #[test]
    fn json_round_trip_sorted_by_name() {
        let mut t = VarTable::new();
        let b = t.intern("beta");
        let a = t.intern("alpha");
        let mut p = NcPoly::zero();
        p.add_term(Word::from_letters(vec![b, a]), rat(1, 2));
        p.add_term(Word::from_letters(vec![a, b]), int(-3));
        let v = p.to_json(&t);
        let s = serde_json::to_string(&v).unwrap();
        // alpha-beta term first even though beta was interned first.
        assert!(s.find("alpha\",\"beta").unwrap() < s.find("beta\",\"alpha").unwrap());
        let mut t2 = VarTable::new();
        let q = NcPoly::from_json(&v, &mut t2).unwrap();
        assert_eq!(q.support_size(), 2);
        let w = Word::from_letters(vec![t2.lookup("alpha").unwrap(), t2.lookup("beta").unwrap()]);
        assert_eq!(q.coeff(&w), int(-3));
    }
}
