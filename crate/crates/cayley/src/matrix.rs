//! Dense matrices of exact rationals.
//!
//! Rank is computed by Bareiss fraction-free elimination on an integer
//! matrix obtained by clearing denominators row by row, so no floating-point
//! tolerance is involved anywhere.  Mixed-dimension arithmetic panics rather
//! than broadcasting; callers that accept user input validate shapes first.

use std::fmt;
use std::ops::{Index, IndexMut};

use num::bigint::BigInt;
use num::integer::Integer;
use num::traits::{One, Zero};

use crate::rational::{format_rational, Rational};

#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(
            rows.iter().all(|row| row.len() == c),
            "ragged rows: matrix rows must all have length {c}"
        );
        RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Convenience constructor from small integers.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        RatMatrix::from_rows(
            rows.iter()
                .map(|row| {
                    row.iter()
                        .map(|&v| Rational::from_integer(BigInt::from(v)))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn add(&self, rhs: &RatMatrix) -> RatMatrix {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "dimension mismatch in matrix addition: {}x{} + {}x{}",
            self.rows,
            self.cols,
            rhs.rows,
            rhs.cols
        );
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &RatMatrix) -> RatMatrix {
        assert!(
            self.cols == rhs.rows,
            "dimension mismatch in matrix product: {}x{} * {}x{}",
            self.rows,
            self.cols,
            rhs.rows,
            rhs.cols
        );
        let mut out = RatMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        let prod = a * b;
                        out[(i, j)] += prod;
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    /// Kronecker product; the right factor's index varies fastest.
    pub fn tensor(&self, rhs: &RatMatrix) -> RatMatrix {
        let mut out = RatMatrix::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for p in 0..rhs.rows {
                    for q in 0..rhs.cols {
                        let b = &rhs[(p, q)];
                        if !b.is_zero() {
                            out[(i * rhs.rows + p, j * rhs.cols + q)] = a * b;
                        }
                    }
                }
            }
        }
        out
    }

    /// Exact rank by fraction-free (Bareiss) elimination over the integers.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        // Scaling a row by a nonzero constant preserves rank, so clear each
        // row's denominators independently to get an integer matrix.
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let mut lcm = BigInt::one();
                for j in 0..self.cols {
                    lcm = lcm.lcm(self[(i, j)].denom());
                }
                (0..self.cols)
                    .map(|j| {
                        let q = &self[(i, j)];
                        q.numer() * (&lcm / q.denom())
                    })
                    .collect()
            })
            .collect();

        let mut rank = 0;
        let mut prev_pivot = BigInt::one();
        let mut row = 0;
        for col in 0..self.cols {
            // Pick the smallest nonzero pivot in this column to keep the
            // intermediate integers modest.
            let pivot_row = (row..self.rows)
                .filter(|&i| !m[i][col].is_zero())
                .min_by_key(|&i| m[i][col].magnitude().clone());
            let Some(p) = pivot_row else { continue };
            m.swap(row, p);
            for i in row + 1..self.rows {
                for j in col + 1..self.cols {
                    let t = &m[row][col] * &m[i][j] - &m[i][col] * &m[row][j];
                    debug_assert!((&t % &prev_pivot).is_zero());
                    m[i][j] = t / &prev_pivot;
                }
                m[i][col] = BigInt::zero();
            }
            prev_pivot = m[row][col].clone();
            rank += 1;
            row += 1;
            if row == self.rows {
                break;
            }
        }
        rank
    }

    /// Exact inverse of a square matrix, or `None` if singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&i| !a[(i, col)].is_zero())?;
            for j in 0..n {
                a.data.swap(col * n + j, pivot * n + j);
                inv.data.swap(col * n + j, pivot * n + j);
            }
            let p = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] = &a[(col, j)] / &p;
                inv[(col, j)] = &inv[(col, j)] / &p;
            }
            for i in 0..n {
                if i == col || a[(i, col)].is_zero() {
                    continue;
                }
                let f = a[(i, col)].clone();
                for j in 0..n {
                    let av = &a[(col, j)] * &f;
                    a[(i, j)] -= av;
                    let iv = &inv[(col, j)] * &f;
                    inv[(i, j)] -= iv;
                }
            }
        }
        Some(inv)
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| format_rational(&self[(i, j)]))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}
