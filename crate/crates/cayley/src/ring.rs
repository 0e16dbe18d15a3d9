//! Evaluation domains for branching programs and circuits.
//!
//! A [`Ring`] value describes the domain (and, for matrices, the fixed
//! dimension); elements are plain values.  Evaluators are generic over this
//! trait so the same walk computes a rational number, a matrix product, or a
//! symbolic expansion in the free algebra.

use crate::matrix::RatMatrix;
use crate::poly::NcPoly;
use crate::rational::Rational;
use num::traits::{One, Zero};

pub trait Ring {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale(&self, a: &Self::Elem, c: &Rational) -> Self::Elem;

    fn from_rational(&self, c: &Rational) -> Self::Elem {
        self.scale(&self.one(), c)
    }

    /// Shape check for values supplied from outside (dimension uniformity).
    fn accepts(&self, _e: &Self::Elem) -> bool {
        true
    }
}

pub struct RationalRing;

impl Ring for RationalRing {
    type Elem = Rational;

    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn scale(&self, a: &Rational, c: &Rational) -> Rational {
        a * c
    }
}

/// Square matrices of one fixed dimension.
pub struct MatrixRing {
    pub dim: usize,
}

impl Ring for MatrixRing {
    type Elem = RatMatrix;

    fn zero(&self) -> RatMatrix {
        RatMatrix::zeros(self.dim, self.dim)
    }
    fn one(&self) -> RatMatrix {
        RatMatrix::identity(self.dim)
    }
    fn add(&self, a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
        a.add(b)
    }
    fn mul(&self, a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
        a.mul(b)
    }
    fn scale(&self, a: &RatMatrix, c: &Rational) -> RatMatrix {
        a.scale(c)
    }
    fn accepts(&self, e: &RatMatrix) -> bool {
        e.rows() == self.dim && e.cols() == self.dim
    }
}

/// The free algebra itself: evaluating a variable at its own generator
/// yields symbolic expansion.
pub struct FreeAlgebra;

impl Ring for FreeAlgebra {
    type Elem = NcPoly;

    fn zero(&self) -> NcPoly {
        NcPoly::zero()
    }
    fn one(&self) -> NcPoly {
        NcPoly::one()
    }
    fn add(&self, a: &NcPoly, b: &NcPoly) -> NcPoly {
        a + b
    }
    fn mul(&self, a: &NcPoly, b: &NcPoly) -> NcPoly {
        a * b
    }
    fn scale(&self, a: &NcPoly, c: &Rational) -> NcPoly {
        a.scale(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::vars::VarTable;

    #[test]
    fn ring_identities() {
        let rr = RationalRing;
        assert_eq!(rr.add(&rr.zero(), &int(5)), int(5));
        assert_eq!(rr.from_rational(&rat(2, 3)), rat(2, 3));

        let mr = MatrixRing { dim: 2 };
        assert_eq!(mr.mul(&mr.one(), &mr.one()), RatMatrix::identity(2));
        assert!(mr.accepts(&RatMatrix::identity(2)));
        assert!(!mr.accepts(&RatMatrix::identity(3)));
        assert_eq!(mr.from_rational(&int(3))[(1, 1)], int(3));

        let fa = FreeAlgebra;
        let mut t = VarTable::new();
        let x = NcPoly::var(t.intern("x"));
        assert_eq!(fa.mul(&fa.one(), &x), x);
        assert_eq!(fa.scale(&x, &int(0)), NcPoly::zero());
    }
}
