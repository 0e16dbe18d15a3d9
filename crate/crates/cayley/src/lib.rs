//! Exact-arithmetic toolkit for computing with non-commutative polynomials.
//!
//! The free algebra over the rationals is represented sparsely
//! ([`poly::NcPoly`]), and several machine models that compute such
//! polynomials are provided: layered algebraic branching programs
//! ([`abp::Abp`]), arithmetic circuits ([`circuit::Circuit`]), and iterated
//! 2x2 matrix products ([`sat::ProductProgram`]).  On top of these sit
//! permanent-style graph polynomials in row order ([`graph`]), rank-based
//! width lower bounds ([`nisan`]), #SAT counting through block-structured
//! permanents ([`sat`]), and non-commutative symmetric polynomial families
//! ([`sym`]).
//!
//! All arithmetic is exact: coefficients are arbitrary-precision rationals
//! kept in lowest terms, and matrix ranks are computed by fraction-free
//! elimination.

pub mod abp;
pub mod circuit;
pub mod graph;
pub mod matrix;
pub mod nisan;
pub mod poly;
pub mod rational;
pub mod ring;
pub mod sat;
pub mod sym;
pub mod vars;
pub mod word;

pub use matrix::RatMatrix;
pub use poly::NcPoly;
pub use rational::Rational;
pub use vars::{VarId, VarTable};
pub use word::Word;
