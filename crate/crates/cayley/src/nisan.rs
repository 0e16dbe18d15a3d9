//! Rank-based branching-program complexity for homogeneous polynomials.
//!
//! Splitting a degree-`d` polynomial at position `k` yields a coefficient
//! matrix indexed by (prefix, suffix) pairs; the sum of the ranks over all
//! splits is exactly the minimum node count of any layered branching
//! program computing the polynomial.  That makes the quantity computed by
//! [`abp_complexity`] an unconditional lower bound to compare against any
//! constructed program.
//!
//! The module also generates the involution families whose permanent
//! polynomials exhibit the two extremes — pairings aligned with the vertex
//! order (complexity linear in `n`) and the maximally stretched pairing
//! `i ↔ i + n/2` (middle rank `2^{n/2}`) — plus a seeded uniform sampler
//! for measuring how common the hard case is.

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{cut, Involution};
use crate::matrix::RatMatrix;
use crate::poly::NcPoly;
use crate::word::Word;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum NisanError {
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("the zero polynomial has no branching-program complexity")]
    ZeroPolynomial,
    #[error("split position {k} out of range 0..={d}")]
    SplitOutOfRange { k: usize, d: usize },
    #[error("fixed-point-free involutions need an even domain, got {0}")]
    OddSize(usize),
}

/// Coefficient matrix of a homogeneous polynomial split at one position,
/// restricted to prefixes and suffixes that actually occur in the support.
/// Dropped rows and columns are identically zero, so the rank is that of
/// the full matrix.
#[derive(Clone, Debug)]
pub struct NisanMatrix {
    pub k: usize,
    pub rows: Vec<Word>,
    pub cols: Vec<Word>,
    pub matrix: RatMatrix,
}

/// Builds the split-at-`k` matrix: entry `(u, v)` is the coefficient of
/// the concatenation `u·v`.
pub fn nisan_matrix(f: &NcPoly, k: usize) -> Result<NisanMatrix, NisanError> {
    let d = f.homogeneous_degree().ok_or(NisanError::NotHomogeneous)?;
    if k > d {
        return Err(NisanError::SplitOutOfRange { k, d });
    }
    let mut row_set = BTreeSet::new();
    let mut col_set = BTreeSet::new();
    for (w, _) in f.terms() {
        row_set.insert(w.prefix(k));
        col_set.insert(w.suffix_from(k));
    }
    let rows: Vec<Word> = row_set.into_iter().collect();
    let cols: Vec<Word> = col_set.into_iter().collect();
    let row_index: HashMap<&Word, usize> = rows.iter().zip(0..).collect();
    let col_index: HashMap<&Word, usize> = cols.iter().zip(0..).collect();
    let mut matrix = RatMatrix::zeros(rows.len(), cols.len());
    for (w, c) in f.terms() {
        let i = row_index[&w.prefix(k)];
        let j = col_index[&w.suffix_from(k)];
        matrix[(i, j)] = c.clone();
    }
    Ok(NisanMatrix {
        k,
        rows,
        cols,
        matrix,
    })
}

/// Rank of the split matrix at every position `0..=d`.
pub fn nisan_ranks(f: &NcPoly) -> Result<Vec<usize>, NisanError> {
    if f.is_zero() {
        return Err(NisanError::ZeroPolynomial);
    }
    let d = f.homogeneous_degree().ok_or(NisanError::NotHomogeneous)?;
    (0..=d).map(|k| Ok(nisan_matrix(f, k)?.matrix.rank())).collect()
}

/// Minimum node count of any layered branching program computing `f`: the
/// sum of the split-matrix ranks.
pub fn abp_complexity(f: &NcPoly) -> Result<usize, NisanError> {
    Ok(nisan_ranks(f)?.iter().sum())
}

/// The involution pairing `i` with `i + n/2`, whose permanent is maximally
/// hard for branching programs: every transposition interval crosses the
/// middle, so the middle split has rank `2^{n/2}`.
pub fn hard_involution(n: usize) -> Result<Involution, NisanError> {
    if n % 2 != 0 {
        return Err(NisanError::OddSize(n));
    }
    let half = (n / 2) as u32;
    Involution::from_pairs((1..=half).map(|i| (i, i + half)).collect())
        .map_err(|_| NisanError::OddSize(n))
}

/// Uniformly random fixed-point-free involution: repeatedly match the
/// smallest unpaired element with a uniformly random other unpaired one.
pub fn random_involution(n: usize, rng: &mut impl Rng) -> Result<Involution, NisanError> {
    if n % 2 != 0 {
        return Err(NisanError::OddSize(n));
    }
    let mut unpaired: Vec<u32> = (1..=n as u32).collect();
    let mut pairs = Vec::with_capacity(n / 2);
    while !unpaired.is_empty() {
        let a = unpaired.remove(0);
        let b = unpaired.remove(rng.gen_range(0..unpaired.len()));
        pairs.push((a, b));
    }
    Involution::from_pairs(pairs).map_err(|_| NisanError::OddSize(n))
}

/// Outcome of sampling random involutions and counting how many have a
/// crossing number at least `n/3 − n^{3/4}`.
#[derive(Clone, Debug, Serialize)]
pub struct CutExperiment {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub threshold: f64,
    pub hits: usize,
    pub fraction: f64,
    pub min_cut: usize,
    pub max_cut: usize,
}

/// Runs the seeded experiment behind the average-case claim: most random
/// involutions are nearly as hard as [`hard_involution`].
pub fn cut_experiment(n: usize, samples: usize, seed: u64) -> Result<CutExperiment, NisanError> {
    if n % 2 != 0 {
        return Err(NisanError::OddSize(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let threshold = n as f64 / 3.0 - (n as f64).powf(0.75);
    let mut hits = 0;
    let mut min_cut = usize::MAX;
    let mut max_cut = 0;
    for _ in 0..samples {
        let inv = random_involution(n, &mut rng)?;
        let c = cut(&inv);
        min_cut = min_cut.min(c);
        max_cut = max_cut.max(c);
        if c as f64 >= threshold {
            hits += 1;
        }
    }
    Ok(CutExperiment {
        n,
        samples,
        seed,
        threshold,
        hits,
        fraction: if samples == 0 {
            0.0
        } else {
            hits as f64 / samples as f64
        },
        min_cut: if samples == 0 { 0 } else { min_cut },
        max_cut,
    })
}
