//! Non-commutative elementary symmetric polynomials and the
//! Hadamard-product route from them to permanents of variable matrices.
//!
//! Three variants of the degree-`d` elementary symmetric polynomial in
//! non-commuting variables: the position-ordered sum over increasing index
//! sequences, the relabeling-invariant sum over all orderings of all
//! `d`-subsets, and the signed sum over full permutations.  The
//! relabeling-invariant one at `d = n` equals the row-ordered permanent of
//! the rank-one matrix `A[i,j] = x_j`, and Hadamard-multiplying it (with
//! every argument replaced by `(Σ x_{i,j})·y_j`) against the product
//! branching program `Π_i Σ_j x_{i,j}y_j` filters out exactly one
//! interleaved monomial per permutation, recovering the permanent of a
//! full variable matrix.

use std::collections::HashMap;

use thiserror::Error;

use crate::abp::{hadamard_abp, Abp, AbpError, Edge, EdgeLabel, NodeId};
use crate::graph::{cperm_brute, EdgeWeight, LabeledDigraph};
use crate::poly::NcPoly;
use crate::rational::{int, Rational};
use crate::vars::{VarId, VarTable};
use crate::word::Word;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SymError {
    #[error("degree must satisfy 1 <= d <= n, got n = {n}, d = {d}")]
    DegreeRange { n: usize, d: usize },
    #[error("the signed variant needs d = n, got n = {n}, d = {d}")]
    SignedDegree { n: usize, d: usize },
    #[error("n = {n} exceeds the size guard of {max}")]
    SizeGuard { n: usize, max: usize },
    #[error(transparent)]
    Abp(#[from] AbpError),
}

/// Which reading of the elementary symmetric polynomial to generate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymVariant {
    /// Increasing index sequences only; ordered, not relabeling-invariant.
    Cayley,
    /// Every ordering of every `d`-subset; relabeling-invariant.
    Nc,
    /// Full permutations weighted by sign; defined for `d = n` only.
    Snc,
}

fn intern_unary(n: usize, table: &mut VarTable) -> Vec<VarId> {
    (1..=n).map(|i| table.intern(&format!("x{i}"))).collect()
}

fn subsets(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(start: usize, n: usize, d: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == d {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, d, current, out);
            current.pop();
        }
    }
    rec(0, n, d, &mut current, &mut out);
    out
}

fn injective_sequences(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    let mut used = vec![false; n];
    fn rec(
        n: usize,
        d: usize,
        current: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == d {
            out.push(current.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                current.push(i);
                rec(n, d, current, used, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    rec(n, d, &mut current, &mut used, &mut out);
    out
}

fn inversion_sign(seq: &[usize]) -> Rational {
    let mut inversions = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        int(1)
    } else {
        int(-1)
    }
}

/// Degree-`d` elementary symmetric polynomial in `n` non-commuting
/// variables `x1..xn` (interned into `table`), per `variant`.
pub fn gen_sym(
    variant: SymVariant,
    n: usize,
    d: usize,
    table: &mut VarTable,
) -> Result<NcPoly, SymError> {
    if d < 1 || d > n {
        return Err(SymError::DegreeRange { n, d });
    }
    if variant == SymVariant::Snc && d != n {
        return Err(SymError::SignedDegree { n, d });
    }
    let xs = intern_unary(n, table);
    let mut poly = NcPoly::zero();
    let term = |seq: &[usize]| Word::from_letters(seq.iter().map(|&i| xs[i]).collect());
    match variant {
        SymVariant::Cayley => {
            for seq in subsets(n, d) {
                poly.add_term(term(&seq), int(1));
            }
        }
        SymVariant::Nc => {
            for seq in injective_sequences(n, d) {
                poly.add_term(term(&seq), int(1));
            }
        }
        SymVariant::Snc => {
            for seq in injective_sequences(n, n) {
                poly.add_term(term(&seq), inversion_sign(&seq));
            }
        }
    }
    Ok(poly)
}

/// Branching program expanding to `Π_{i=1..n} (Σ_j x_{i,j}·y_j)`: each
/// product of a matrix entry with its column marker is a pair of
/// consecutive edges through a dedicated middle node.  Node count is
/// `n² + n + 1 ≤ 2n² + 2n`.
pub fn hammon_abp(n: usize, table: &mut VarTable) -> Abp {
    let xg = XGrid::new(n, table);
    let ys: Vec<VarId> = (1..=n).map(|j| table.intern(&format!("y_{j}"))).collect();
    let hub = |i: usize| i as NodeId;
    let mid = |i: usize, j: usize| (n + 1 + (i - 1) * n + (j - 1)) as NodeId;
    let mut layers = vec![vec![hub(0)]];
    let mut edges = Vec::new();
    for i in 1..=n {
        layers.push((1..=n).map(|j| mid(i, j)).collect());
        layers.push(vec![hub(i)]);
        for j in 1..=n {
            edges.push(Edge {
                from: hub(i - 1),
                to: mid(i, j),
                coeff: int(1),
                label: EdgeLabel::Var(xg.at(i, j)),
            });
            edges.push(Edge {
                from: mid(i, j),
                to: hub(i),
                coeff: int(1),
                label: EdgeLabel::Var(ys[j - 1]),
            });
        }
    }
    Abp::new(layers, edges, hub(0), hub(n)).expect("fan construction is layered")
}

/// The `n × n` grid of entry variables `x_i_j`.
struct XGrid {
    n: usize,
    ids: Vec<VarId>,
}

impl XGrid {
    fn new(n: usize, table: &mut VarTable) -> Self {
        let ids = (1..=n)
            .flat_map(|i| (1..=n).map(move |j| (i, j)))
            .map(|(i, j)| table.intern(&format!("x_{i}_{j}")))
            .collect();
        XGrid { n, ids }
    }

    fn at(&self, i: usize, j: usize) -> VarId {
        self.ids[(i - 1) * self.n + (j - 1)]
    }
}

/// Complete digraph on `n` vertices, self-loops included, edge `i -> j`
/// labeled `x_i_j`; its cycle covers are exactly the permutations.
pub fn complete_graph(n: usize, table: &mut VarTable) -> LabeledDigraph {
    let xg = XGrid::new(n, table);
    let mut g = LabeledDigraph::new(n);
    for i in 1..=n {
        for j in 1..=n {
            g.add_edge(i as u32, j as u32, EdgeWeight::Var(xg.at(i, j)))
                .expect("grid edges are in range and distinct");
        }
    }
    g
}

/// Branching program for the degree-`n` symmetric polynomial applied to
/// the arguments `(Σ_{a,b} x_a_b)·y_1, …, (Σ_{a,b} x_a_b)·y_n`: a
/// subset-tracking lattice where each step fans out over all grid
/// variables in parallel and then consumes one unused column marker.  With
/// `signed` the marker edge carries the sign the chosen column adds to the
/// permutation being built.
pub fn sym_fan_abp(n: usize, signed: bool, table: &mut VarTable) -> Abp {
    let xg = XGrid::new(n, table);
    let ys: Vec<VarId> = (1..=n).map(|j| table.intern(&format!("y_{j}"))).collect();
    let full: u32 = (1 << n) - 1;
    let mut next_id: NodeId = 0;
    let mut subset_node: HashMap<(usize, u32), NodeId> = HashMap::new();
    let mut fan_node: HashMap<(usize, u32, usize), NodeId> = HashMap::new();
    let mut layers: Vec<Vec<NodeId>> = Vec::new();
    let mut subsets_by_size: Vec<Vec<u32>> = vec![Vec::new(); n + 1];
    for s in 0..=full {
        subsets_by_size[s.count_ones() as usize].push(s);
    }
    subsets_by_size[0] = vec![0];
    for (k, subs) in subsets_by_size.iter().enumerate() {
        let mut layer = Vec::new();
        for &s in subs {
            subset_node.insert((k, s), next_id);
            layer.push(next_id);
            next_id += 1;
        }
        layers.push(layer);
        if k == n {
            break;
        }
        let mut fans = Vec::new();
        for &s in subs {
            for j in 0..n {
                if s >> j & 1 == 0 {
                    fan_node.insert((k, s, j), next_id);
                    fans.push(next_id);
                    next_id += 1;
                }
            }
        }
        layers.push(fans);
    }
    // Interleave: subset layers sit at even positions, fans at odd.
    let mut ordered = Vec::new();
    for k in 0..=n {
        ordered.push(layers[2 * k].clone());
        if k < n {
            ordered.push(layers[2 * k + 1].clone());
        }
    }
    let mut edges = Vec::new();
    for k in 0..n {
        for &s in &subsets_by_size[k] {
            let from = subset_node[&(k, s)];
            for j in 0..n {
                if s >> j & 1 == 1 {
                    continue;
                }
                let mid = fan_node[&(k, s, j)];
                for i in 1..=n {
                    for c in 1..=n {
                        edges.push(Edge {
                            from,
                            to: mid,
                            coeff: int(1),
                            label: EdgeLabel::Var(xg.at(i, c)),
                        });
                    }
                }
                let mut coeff = int(1);
                if signed {
                    let later = (s >> (j + 1)).count_ones();
                    if later % 2 == 1 {
                        coeff = int(-1);
                    }
                }
                edges.push(Edge {
                    from: mid,
                    to: subset_node[&(k + 1, s | 1 << j)],
                    coeff,
                    label: EdgeLabel::Var(ys[j]),
                });
            }
        }
    }
    let source = subset_node[&(0, 0)];
    let sink = subset_node[&(n, full)];
    Abp::new(ordered, edges, source, sink).expect("subset lattice is layered")
}

const HADAMARD_PIPELINE_MAX: usize = 5;

/// The Hadamard product of [`sym_fan_abp`] with [`hammon_abp`], before any
/// substitution: its expansion keeps, for each permutation `σ`, exactly
/// the interleaved monomial `x_1_σ(1) y_σ(1) … x_n_σ(n) y_σ(n)`.
pub fn hadamard_pipeline_abp(
    n: usize,
    signed: bool,
    table: &mut VarTable,
) -> Result<Abp, SymError> {
    if n > HADAMARD_PIPELINE_MAX {
        return Err(SymError::SizeGuard {
            n,
            max: HADAMARD_PIPELINE_MAX,
        });
    }
    let fan = sym_fan_abp(n, signed, table);
    let product = hammon_abp(n, table);
    Ok(hadamard_abp(&fan, &product))
}

/// Permanent (or, `signed`, determinant) of the full `n × n` variable
/// matrix in row order, obtained by expanding [`hadamard_pipeline_abp`]
/// and erasing the column markers via `y_j ↦ 1`.
pub fn perm_via_hadamard(
    n: usize,
    signed: bool,
    table: &mut VarTable,
) -> Result<NcPoly, SymError> {
    let pipeline = hadamard_pipeline_abp(n, signed, table)?;
    let ones: HashMap<VarId, Rational> = (1..=n)
        .map(|j| (table.intern(&format!("y_{j}")), int(1)))
        .collect();
    Ok(pipeline.substitute(&ones).expand()?)
}

const RANK_ONE_MAX: usize = 6;

/// The permanent of the rank-one matrix `A[i,j] = x_j` against the
/// relabeling-invariant symmetric polynomial of full degree: returns both
/// polynomials (they are equal).  Every rational substitution collapses
/// `A` to identical rows, which the construction checks on a few probes.
pub fn rank_one_cperm(
    n: usize,
    table: &mut VarTable,
) -> Result<(NcPoly, NcPoly), SymError> {
    if n > RANK_ONE_MAX {
        return Err(SymError::SizeGuard {
            n,
            max: RANK_ONE_MAX,
        });
    }
    let xs = intern_unary(n, table);
    let mut g = LabeledDigraph::new(n);
    for i in 1..=n as u32 {
        for j in 1..=n as u32 {
            g.add_edge(i, j, EdgeWeight::Var(xs[j as usize - 1]))
                .expect("complete graph edges are valid");
        }
    }
    let permanent = cperm_brute(&g, false);
    let symmetric = gen_sym(SymVariant::Nc, n, n, table)?;
    for probe in [
        |j: usize| int(j as i64),
        |j: usize| int(-(j as i64) * (j as i64)),
        |j: usize| int(((j * j + 3) % 7) as i64),
    ] {
        let row: Vec<Rational> = (1..=n).map(probe).collect();
        let matrix = crate::matrix::RatMatrix::from_rows(vec![row; n]);
        assert!(matrix.rank() <= 1);
    }
    Ok((permanent, symmetric))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(table: &mut VarTable, names: &[&str]) -> Word {
        Word::from_letters(names.iter().map(|s| table.intern(s)).collect())
    }

    fn poly(table: &mut VarTable, terms: &[(&[&str], i64)]) -> NcPoly {
        let mut p = NcPoly::zero();
        for (names, c) in terms {
            p.add_term(word(table, names), int(*c));
        }
        p
    }

    #[test]
    fn small_definitions() {
        let mut t = VarTable::new();
        let nc = gen_sym(SymVariant::Nc, 2, 2, &mut t).unwrap();
        assert_eq!(nc, poly(&mut t, &[(&["x1", "x2"], 1), (&["x2", "x1"], 1)]));

        let cayley = gen_sym(SymVariant::Cayley, 3, 2, &mut t).unwrap();
        assert_eq!(
            cayley,
            poly(
                &mut t,
                &[(&["x1", "x2"], 1), (&["x1", "x3"], 1), (&["x2", "x3"], 1)]
            )
        );

        let snc = gen_sym(SymVariant::Snc, 2, 2, &mut t).unwrap();
        assert_eq!(snc, poly(&mut t, &[(&["x1", "x2"], 1), (&["x2", "x1"], -1)]));
    }

    #[test]
    fn preconditions() {
        let mut t = VarTable::new();
        assert!(matches!(
            gen_sym(SymVariant::Nc, 3, 0, &mut t),
            Err(SymError::DegreeRange { .. })
        ));
        assert!(matches!(
            gen_sym(SymVariant::Nc, 3, 4, &mut t),
            Err(SymError::DegreeRange { .. })
        ));
        assert!(matches!(
            gen_sym(SymVariant::Snc, 3, 2, &mut t),
            Err(SymError::SignedDegree { .. })
        ));
        assert!(matches!(
            perm_via_hadamard(6, false, &mut t),
            Err(SymError::SizeGuard { .. })
        ));
        assert!(matches!(
            rank_one_cperm(7, &mut t),
            Err(SymError::SizeGuard { .. })
        ));
    }

    fn binomial(n: usize, d: usize) -> usize {
        let mut num = 1usize;
        let mut den = 1usize;
        for i in 0..d {
            num *= n - i;
            den *= i + 1;
        }
        num / den
    }

    #[test]
    fn term_counts() {
        let mut t = VarTable::new();
        for n in 1..=4 {
            for d in 1..=n {
                let factorial: usize = (1..=d).product();
                let cayley = gen_sym(SymVariant::Cayley, n, d, &mut t).unwrap();
                assert_eq!(cayley.support_size(), binomial(n, d));
                let nc = gen_sym(SymVariant::Nc, n, d, &mut t).unwrap();
                assert_eq!(nc.support_size(), binomial(n, d) * factorial);
            }
        }
    }

    #[test]
    fn nc_is_relabeling_invariant() {
        for n in 1..=4usize {
            for d in 1..=n {
                let mut t = VarTable::new();
                let xs = intern_unary(n, &mut t);
                let p = gen_sym(SymVariant::Nc, n, d, &mut t).unwrap();
                for perm in injective_sequences(n, n) {
                    let mut relabeled = NcPoly::zero();
                    for (w, c) in p.terms() {
                        let letters = w
                            .letters()
                            .iter()
                            .map(|v| {
                                let pos = xs.iter().position(|x| x == v).unwrap();
                                xs[perm[pos]]
                            })
                            .collect();
                        relabeled.add_term(Word::from_letters(letters), c.clone());
                    }
                    assert_eq!(relabeled, p);
                }
            }
        }
    }

    #[test]
    fn cayley_terms_are_increasing() {
        let mut t = VarTable::new();
        let xs = intern_unary(5, &mut t);
        let p = gen_sym(SymVariant::Cayley, 5, 3, &mut t).unwrap();
        for (w, _) in p.terms() {
            let positions: Vec<usize> = w
                .letters()
                .iter()
                .map(|v| xs.iter().position(|x| x == v).unwrap())
                .collect();
            assert!(positions.windows(2).all(|ab| ab[0] < ab[1]));
        }
    }

    #[test]
    fn product_program_expansions() {
        let mut t = VarTable::new();
        let one = hammon_abp(1, &mut t);
        assert_eq!(
            one.expand().unwrap(),
            poly(&mut t, &[(&["x_1_1", "y_1"], 1)])
        );

        let mut t = VarTable::new();
        let two = hammon_abp(2, &mut t);
        assert_eq!(
            two.expand().unwrap(),
            poly(
                &mut t,
                &[
                    (&["x_1_1", "y_1", "x_2_1", "y_1"], 1),
                    (&["x_1_1", "y_1", "x_2_2", "y_2"], 1),
                    (&["x_1_2", "y_2", "x_2_1", "y_1"], 1),
                    (&["x_1_2", "y_2", "x_2_2", "y_2"], 1),
                ]
            )
        );
    }

    #[test]
    fn product_program_node_count() {
        for n in 1..=6 {
            let mut t = VarTable::new();
            let abp = hammon_abp(n, &mut t);
            assert!(abp.size() <= 2 * n * n + 2 * n);
        }
        let mut t = VarTable::new();
        assert!(hammon_abp(4, &mut t).size() <= 40);
    }

    #[test]
    fn fan_program_matches_symmetric_polynomial_shape() {
        // Substituting every grid variable and marker by 1 counts the
        // injective sequences: n! · n^n (each step also picks one of n²
        // grid variables... the fan contributes n² per step).
        let n = 3usize;
        let mut t = VarTable::new();
        let fan = sym_fan_abp(n, false, &mut t);
        let ones: HashMap<VarId, Rational> =
            t.ids().map(|v| (v, int(1))).collect();
        let value = fan.substitute(&ones).expand().unwrap();
        let factorial: i64 = (1..=n as i64).product();
        let expect = factorial * (n as i64).pow(2 * n as u32);
        assert_eq!(value, NcPoly::constant(int(expect)));
        // Signed: the signs cancel pairwise for n ≥ 2.
        let fan = sym_fan_abp(n, true, &mut t);
        let value = fan.substitute(&ones).expand().unwrap();
        assert!(value.is_zero());
    }

    #[test]
    fn pipeline_keeps_only_interleaved_monomials() {
        for n in 2..=3usize {
            for signed in [false, true] {
                let mut t = VarTable::new();
                let pipeline = hadamard_pipeline_abp(n, signed, &mut t).unwrap();
                let got = pipeline.expand().unwrap();
                let mut expect = NcPoly::zero();
                for perm in injective_sequences(n, n) {
                    let mut names = Vec::new();
                    for (i, &j) in perm.iter().enumerate() {
                        names.push(format!("x_{}_{}", i + 1, j + 1));
                        names.push(format!("y_{}", j + 1));
                    }
                    let letters = names.iter().map(|s| t.intern(s)).collect();
                    let coeff = if signed { inversion_sign(&perm) } else { int(1) };
                    expect.add_term(Word::from_letters(letters), coeff);
                }
                assert_eq!(got, expect, "n = {n}, signed = {signed}");
            }
        }
    }

    #[test]
    fn pipeline_equals_brute_force_cover_sum() {
        for n in 2..=3usize {
            for signed in [false, true] {
                let mut t = VarTable::new();
                let got = perm_via_hadamard(n, signed, &mut t).unwrap();
                let expect = cperm_brute(&complete_graph(n, &mut t), signed);
                assert_eq!(got, expect, "n = {n}, signed = {signed}");
            }
        }
        let mut t = VarTable::new();
        let two = perm_via_hadamard(2, false, &mut t).unwrap();
        assert_eq!(
            two,
            poly(
                &mut t,
                &[(&["x_1_1", "x_2_2"], 1), (&["x_1_2", "x_2_1"], 1)]
            )
        );
        let two = perm_via_hadamard(2, true, &mut t).unwrap();
        assert_eq!(
            two,
            poly(
                &mut t,
                &[(&["x_1_1", "x_2_2"], 1), (&["x_1_2", "x_2_1"], -1)]
            )
        );
    }

    #[test]
    fn rank_one_identity() {
        let mut t = VarTable::new();
        let (p, s) = rank_one_cperm(1, &mut t).unwrap();
        assert_eq!(p, s);
        assert_eq!(p, poly(&mut t, &[(&["x1"], 1)]));

        let (p, s) = rank_one_cperm(2, &mut t).unwrap();
        assert_eq!(p, s);
        assert_eq!(p, poly(&mut t, &[(&["x1", "x2"], 1), (&["x2", "x1"], 1)]));

        let (p, s) = rank_one_cperm(3, &mut t).unwrap();
        assert_eq!(p, s);
        assert_eq!(p.support_size(), 6);
    }
}
