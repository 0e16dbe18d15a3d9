//! Digraphs with labeled edges and their row-ordered permanent polynomials.
//!
//! The central object is the Cayley permanent of a labeled digraph `G` on
//! vertices `1..=n`: the sum over all cycle covers (permutations `σ` with
//! every edge `(v, σ(v))` present) of the product of edge labels taken in
//! row order `(1, σ(1)), (2, σ(2)), ...`.  Because labels need not commute,
//! the factor order matters.  The signed variant weights each cover by the
//! permutation sign, giving the Cayley determinant.
//!
//! [`cperm_brute`] enumerates covers directly and is the reference
//! implementation.  [`build_cperm_abp`] compiles the same polynomial into a
//! layered branching program whose width is controlled by how far any
//! strongly connected component stretches across the vertex order (the
//! [`near`] parameter), staying polynomial whenever components are small and
//! nearly aligned with the numbering.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::abp::{Abp, AbpError, Edge, EdgeLabel, NodeId};
use crate::poly::NcPoly;
use crate::rational::{int, Rational};
use crate::vars::{VarId, VarTable};
use crate::word::Word;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EdgeWeight {
    Var(VarId),
    Const(Rational),
}

/// Digraph on vertices `1..=n` with at most one labeled edge per ordered
/// pair; self-loops are allowed.
#[derive(Clone, Debug, Default)]
pub struct LabeledDigraph {
    n: usize,
    edges: BTreeMap<(u32, u32), EdgeWeight>,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} out of range 1..={1}")]
    VertexRange(u32, usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(u32, u32),
    #[error("graph text line {line}: {expected}")]
    Parse { line: usize, expected: String },
    #[error("component {{{0}}} has {1} vertices, above the cap of {2}")]
    ComponentTooLarge(u32, usize, usize),
    #[error("variable #{0} labels more than one edge")]
    RepeatedVariable(u32),
    #[error("not a fixed-point-free involution: {0}")]
    BadInvolution(String),
    #[error(transparent)]
    Abp(#[from] AbpError),
}

impl LabeledDigraph {
    pub fn new(n: usize) -> Self {
        LabeledDigraph {
            n,
            edges: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, from: u32, to: u32, weight: EdgeWeight) -> Result<(), GraphError> {
        for v in [from, to] {
            if v < 1 || v as usize > self.n {
                return Err(GraphError::VertexRange(v, self.n));
            }
        }
        if self.edges.contains_key(&(from, to)) {
            return Err(GraphError::DuplicateEdge(from, to));
        }
        self.edges.insert((from, to), weight);
        Ok(())
    }

    pub fn weight(&self, from: u32, to: u32) -> Option<&EdgeWeight> {
        self.edges.get(&(from, to))
    }

    pub fn edges(&self) -> impl Iterator<Item = (&(u32, u32), &EdgeWeight)> {
        self.edges.iter()
    }

    pub fn out_neighbors(&self, from: u32) -> impl Iterator<Item = u32> + '_ {
        self.edges
            .range((from, 1)..=(from, u32::MAX))
            .map(|(&(_, to), _)| to)
    }

    /// Text format: first line is the vertex count, then one edge per line,
    /// either `i j name` for a variable label or `i j = num/den` for a
    /// rational constant.  Blank lines and `#` comments are skipped.
    pub fn parse_text(src: &str, table: &mut VarTable) -> Result<Self, GraphError> {
        let mut lines = src
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (first_no, first) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            expected: "vertex count on the first line".into(),
        })?;
        let n: usize = first.parse().map_err(|_| GraphError::Parse {
            line: first_no,
            expected: format!("vertex count, found `{first}`"),
        })?;
        let mut g = LabeledDigraph::new(n);
        for (line, l) in lines {
            let fields: Vec<&str> = l.split_whitespace().collect();
            let parse_vertex = |s: &str| -> Result<u32, GraphError> {
                s.parse().map_err(|_| GraphError::Parse {
                    line,
                    expected: format!("vertex number, found `{s}`"),
                })
            };
            match fields.as_slice() {
                [i, j, "=", q] => {
                    let w = crate::rational::parse_rational(q).map_err(|e| GraphError::Parse {
                        line,
                        expected: e,
                    })?;
                    g.add_edge(parse_vertex(i)?, parse_vertex(j)?, EdgeWeight::Const(w))?;
                }
                [i, j, name] => {
                    let v = table.intern(name);
                    g.add_edge(parse_vertex(i)?, parse_vertex(j)?, EdgeWeight::Var(v))?;
                }
                _ => {
                    return Err(GraphError::Parse {
                        line,
                        expected: "`i j name` or `i j = num/den`".into(),
                    })
                }
            }
        }
        Ok(g)
    }
}

/// Strongly connected components, each sorted ascending, ordered by their
/// smallest vertex.  Iterative Kosaraju, so deep graphs cannot overflow the
/// stack.
pub fn scc_sorted(g: &LabeledDigraph) -> Vec<Vec<u32>> {
    let n = g.n;
    let mut order: Vec<u32> = Vec::with_capacity(n);
    let mut visited = vec![false; n + 1];
    for start in 1..=n as u32 {
        if visited[start as usize] {
            continue;
        }
        // Post-order DFS with an explicit stack of (vertex, neighbor list).
        let mut stack: Vec<(u32, Vec<u32>)> = vec![(start, g.out_neighbors(start).collect())];
        visited[start as usize] = true;
        while let Some((v, todo)) = stack.last_mut() {
            match todo.pop() {
                Some(w) if !visited[w as usize] => {
                    visited[w as usize] = true;
                    stack.push((w, g.out_neighbors(w).collect()));
                }
                Some(_) => {}
                None => {
                    order.push(*v);
                    stack.pop();
                }
            }
        }
    }
    let mut reverse: HashMap<u32, Vec<u32>> = HashMap::new();
    for (&(from, to), _) in g.edges() {
        reverse.entry(to).or_default().push(from);
    }
    let mut comp_of = vec![usize::MAX; n + 1];
    let mut comps: Vec<Vec<u32>> = Vec::new();
    for &start in order.iter().rev() {
        if comp_of[start as usize] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut members = vec![start];
        comp_of[start as usize] = id;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in reverse.get(&v).into_iter().flatten() {
                if comp_of[w as usize] == usize::MAX {
                    comp_of[w as usize] = id;
                    members.push(w);
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        comps.push(members);
    }
    comps.sort_by_key(|c| c[0]);
    comps
}

/// Maximum stretch `|i - j|` of two vertices sharing a strongly connected
/// component.  Zero for the empty graph.
pub fn near(g: &LabeledDigraph) -> usize {
    scc_sorted(g)
        .iter()
        .map(|c| (c[c.len() - 1] - c[0]) as usize)
        .max()
        .unwrap_or(0)
}

/// A fixed-point-free involution on `1..=n`, stored as its transpositions
/// `(a, b)` with `a < b`, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Involution {
    pairs: Vec<(u32, u32)>,
}

impl Involution {
    /// Accepts the one-line permutation form `pi(1) pi(2) ... pi(n)`.
    pub fn from_permutation(pi: &[u32]) -> Result<Self, GraphError> {
        let n = pi.len();
        let bad = |m: String| GraphError::BadInvolution(m);
        if n % 2 != 0 {
            return Err(bad(format!("odd domain size {n}")));
        }
        let mut pairs = Vec::with_capacity(n / 2);
        for (i0, &img) in pi.iter().enumerate() {
            let i = (i0 + 1) as u32;
            if img < 1 || img as usize > n {
                return Err(bad(format!("pi({i}) = {img} out of range")));
            }
            if img == i {
                return Err(bad(format!("fixed point at {i}")));
            }
            let back = pi[(img - 1) as usize];
            if back != i {
                return Err(bad(format!("pi(pi({i})) = {back}, expected {i}")));
            }
            if i < img {
                pairs.push((i, img));
            }
        }
        if pairs.len() != n / 2 {
            return Err(bad("not a bijection".into()));
        }
        Ok(Involution { pairs })
    }

    pub fn from_pairs(mut pairs: Vec<(u32, u32)>) -> Result<Self, GraphError> {
        for p in &mut pairs {
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
        }
        pairs.sort_unstable();
        let perm = Involution { pairs };
        // Round-trip through the permutation form to validate.
        Involution::from_permutation(&perm.as_permutation())
    }

    pub fn n(&self) -> usize {
        self.pairs.len() * 2
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn as_permutation(&self) -> Vec<u32> {
        let n = self.n();
        let mut pi = vec![0u32; n];
        for &(a, b) in &self.pairs {
            if a >= 1 && (b as usize) <= n {
                pi[(a - 1) as usize] = b;
                pi[(b - 1) as usize] = a;
            }
        }
        pi
    }

    /// The associated digraph: each transposition becomes a 2-cycle, and
    /// every vertex gets a self-loop; all edges carry distinct variables
    /// named `x_i_j`.
    pub fn to_graph(&self, table: &mut VarTable) -> LabeledDigraph {
        let n = self.n();
        let mut g = LabeledDigraph::new(n);
        let var_edge = |g: &mut LabeledDigraph, i: u32, j: u32, table: &mut VarTable| {
            let v = table.intern(&format!("x_{i}_{j}"));
            g.add_edge(i, j, EdgeWeight::Var(v)).unwrap();
        };
        for i in 1..=n as u32 {
            var_edge(&mut g, i, i, table);
        }
        for &(a, b) in &self.pairs {
            var_edge(&mut g, a, b, table);
            var_edge(&mut g, b, a, table);
        }
        g
    }
}

/// Maximum, over positions `k`, of the number of transpositions `(a, b)`
/// with `a <= k <= b`.
pub fn cut(inv: &Involution) -> usize {
    let n = inv.n();
    (1..=n as u32)
        .map(|k| {
            inv.pairs()
                .iter()
                .filter(|&&(a, b)| a <= k && k <= b)
                .count()
        })
        .max()
        .unwrap_or(0)
}

/// Number of intersecting transposition pairs, viewing each transposition
/// `(a, b)` as the interval `[a, b]`.
pub fn interval_edges(inv: &Involution) -> usize {
    let pairs = inv.pairs();
    let mut count = 0;
    for (i, &(a1, b1)) in pairs.iter().enumerate() {
        for &(a2, b2) in &pairs[i + 1..] {
            if a1.max(a2) <= b1.min(b2) {
                count += 1;
            }
        }
    }
    count
}

fn weight_factor(w: &EdgeWeight) -> (Rational, Option<VarId>) {
    match w {
        EdgeWeight::Var(v) => (int(1), Some(*v)),
        EdgeWeight::Const(q) => (q.clone(), None),
    }
}

/// Reference Cayley permanent/determinant: enumerate cycle covers row by
/// row, pruning branches with no remaining successor, and multiply labels
/// in row order.
pub fn cperm_brute(g: &LabeledDigraph, signed: bool) -> NcPoly {
    let n = g.n;
    let mut out = NcPoly::zero();
    let mut used = vec![false; n + 1];
    let mut succ = vec![0u32; n + 1];
    fn sign_of(succ: &[u32], n: usize) -> i64 {
        let mut seen = vec![false; n + 1];
        let mut cycles = 0usize;
        for start in 1..=n {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut v = start;
            while !seen[v] {
                seen[v] = true;
                v = succ[v] as usize;
            }
        }
        if (n - cycles) % 2 == 0 {
            1
        } else {
            -1
        }
    }
    fn rec(
        g: &LabeledDigraph,
        row: u32,
        used: &mut Vec<bool>,
        succ: &mut Vec<u32>,
        signed: bool,
        out: &mut NcPoly,
    ) {
        let n = g.n;
        if row as usize > n {
            let mut coeff = int(1);
            let mut word = Word::empty();
            for i in 1..=n as u32 {
                let (c, v) = weight_factor(g.weight(i, succ[i as usize]).unwrap());
                coeff *= c;
                if let Some(v) = v {
                    word.push(v);
                }
            }
            if signed {
                coeff *= int(sign_of(succ, n));
            }
            out.add_term(word, coeff);
            return;
        }
        for to in g.out_neighbors(row) {
            if used[to as usize] {
                continue;
            }
            used[to as usize] = true;
            succ[row as usize] = to;
            rec(g, row + 1, used, succ, signed, out);
            used[to as usize] = false;
        }
    }
    rec(g, 1, &mut used, &mut succ, signed, &mut out);
    out
}

/// All cycle covers of one strongly connected component, each as the list
/// of successors aligned with the ascending member list, plus the sign of
/// the restricted permutation.
fn component_covers(g: &LabeledDigraph, members: &[u32]) -> Vec<(Vec<u32>, i64)> {
    let k = members.len();
    let pos: HashMap<u32, usize> = members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut covers = Vec::new();
    let mut succ = vec![0u32; k];
    let mut used = vec![false; k];
    fn rec(
        g: &LabeledDigraph,
        members: &[u32],
        pos: &HashMap<u32, usize>,
        idx: usize,
        succ: &mut Vec<u32>,
        used: &mut Vec<bool>,
        covers: &mut Vec<(Vec<u32>, i64)>,
    ) {
        if idx == members.len() {
            // Sign from the cycle structure of the restriction.
            let mut seen = vec![false; members.len()];
            let mut cycles = 0;
            for s in 0..members.len() {
                if seen[s] {
                    continue;
                }
                cycles += 1;
                let mut v = s;
                while !seen[v] {
                    seen[v] = true;
                    v = pos[&succ[v]];
                }
            }
            let sign = if (members.len() - cycles) % 2 == 0 {
                1
            } else {
                -1
            };
            covers.push((succ.clone(), sign));
            return;
        }
        for to in g.out_neighbors(members[idx]) {
            let Some(&ti) = pos.get(&to) else { continue };
            if used[ti] {
                continue;
            }
            used[ti] = true;
            succ[idx] = to;
            rec(g, members, pos, idx + 1, succ, used, covers);
            used[ti] = false;
        }
    }
    rec(g, members, &pos, 0, &mut succ, &mut used, &mut covers);
    covers
}

/// Default bound on strongly-connected-component size for
/// [`build_cperm_abp`].
pub const DEFAULT_COMPONENT_CAP: usize = 6;

/// Compiles the Cayley permanent (or determinant, when `signed`) of `g`
/// into a layered branching program that emits the row-`pos` label at layer
/// `pos`.
///
/// Cycles never leave a strongly connected component, so a cover is an
/// independent choice of cover per component.  Walking positions `1..=n` in
/// order, a component's cover is guessed wholesale when the position first
/// enters it, and the chosen successors of not-yet-emitted vertices are
/// carried as pending state; programs states with equal pending choices
/// merge.  The node count is at most `(n+1) * (cap+1)^(near(g)+cap)`, and
/// in signed mode each component's sign is folded into the coefficient of
/// its first emitted edge.
///
/// Requires every variable label to be distinct and every component to have
/// at most `cap` vertices.
pub fn build_cperm_abp(g: &LabeledDigraph, signed: bool, cap: usize) -> Result<Abp, GraphError> {
    let n = g.n;
    {
        let mut seen = HashMap::new();
        for (&(i, j), w) in g.edges() {
            if let EdgeWeight::Var(v) = w {
                if let Some(prev) = seen.insert(*v, (i, j)) {
                    let _ = prev;
                    return Err(GraphError::RepeatedVariable(v.0));
                }
            }
        }
    }
    let comps = scc_sorted(g);
    for c in &comps {
        if c.len() > cap {
            return Err(GraphError::ComponentTooLarge(c[0], c.len(), cap));
        }
    }
    let covers: Vec<Vec<(Vec<u32>, i64)>> =
        comps.iter().map(|c| component_covers(g, c)).collect();
    let comp_at_min: HashMap<u32, usize> = comps
        .iter()
        .enumerate()
        .map(|(i, c)| (c[0], i))
        .collect();

    // Pending state: chosen successor for each guessed-but-unemitted vertex.
    type Pending = BTreeMap<u32, u32>;
    let mut next_id: NodeId = 0;
    let mut fresh = || {
        let id = next_id;
        next_id += 1;
        id
    };
    let mut layers: Vec<Vec<NodeId>> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();

    let mut states: Vec<Pending> = vec![Pending::new()];
    let mut ids: Vec<NodeId> = vec![fresh()];
    layers.push(ids.clone());
    let mut dead = false;

    for pos in 1..=n as u32 {
        if dead {
            let id = fresh();
            layers.push(vec![id]);
            ids = vec![id];
            continue;
        }
        let mut next_states: Vec<Pending> = Vec::new();
        let mut next_index: HashMap<Pending, usize> = HashMap::new();
        let mut next_ids: Vec<NodeId> = Vec::new();
        for (state, &from_id) in states.iter().zip(&ids) {
            // Either pos was already chosen for by an earlier guess, or it
            // opens the next component.
            let choices: Vec<(u32, Rational, Pending)> = if let Some(&to) = state.get(&pos) {
                let mut rest = state.clone();
                rest.remove(&pos);
                vec![(to, int(1), rest)]
            } else {
                let ci = *comp_at_min
                    .get(&pos)
                    .expect("position must open a component when not pending");
                let members = &comps[ci];
                covers[ci]
                    .iter()
                    .map(|(succ, sign)| {
                        let mut pending = state.clone();
                        for (&v, &s) in members.iter().zip(succ) {
                            pending.insert(v, s);
                        }
                        let to = pending.remove(&pos).unwrap();
                        let coeff = if signed { int(*sign) } else { int(1) };
                        (to, coeff, pending)
                    })
                    .collect()
            };
            for (to, sign_coeff, pending) in choices {
                let (base_coeff, label) = match g.weight(pos, to).unwrap() {
                    EdgeWeight::Var(v) => (int(1), EdgeLabel::Var(*v)),
                    EdgeWeight::Const(q) => (q.clone(), EdgeLabel::Const),
                };
                let idx = match next_index.get(&pending) {
                    Some(&i) => i,
                    None => {
                        let i = next_states.len();
                        next_index.insert(pending.clone(), i);
                        next_states.push(pending);
                        next_ids.push(fresh());
                        i
                    }
                };
                edges.push(Edge {
                    from: from_id,
                    to: next_ids[idx],
                    coeff: base_coeff * sign_coeff,
                    label,
                });
            }
        }
        if next_states.is_empty() {
            // Some component admits no cover: the polynomial is zero.  The
            // layering must stay well formed, so thread a single edgeless
            // placeholder node through the remaining positions.
            dead = true;
            let id = fresh();
            layers.push(vec![id]);
            ids = vec![id];
            states = vec![Pending::new()];
            continue;
        }
        layers.push(next_ids.clone());
        states = next_states;
        ids = next_ids;
    }
    debug_assert!(states.iter().all(Pending::is_empty));
    let source = layers[0][0];
    // A dead end can leave several (empty) terminal states only when no
    // cover exists at all; normalize to a single sink.
    let sink = ids[0];
    debug_assert_eq!(ids.len(), 1);
    let abp = Abp::new(layers, edges, source, sink)?;
    debug_assert!(abp.size() <= (n + 1) * (cap + 1).pow((near(g) + cap) as u32));
    Ok(abp)
}
