//! Fan-in-two arithmetic circuits over non-commuting variables, with
//! coefficient extraction.
//!
//! Multiplication gates keep their (left, right) order, so a circuit
//! denotes an element of the free algebra.  Besides expansion and
//! evaluation, the module implements three coefficient algorithms that
//! avoid expanding the (possibly exponential-support) polynomial:
//!
//! * [`Circuit::mcoeff`] — the coefficient of one word, by a dynamic
//!   program over the word's contiguous subwords;
//! * [`Circuit::pcoeff_circuit`] — a circuit for the prefix quotient
//!   `Σ_{m' = m·m''} coeff(m')·m''`;
//! * [`Circuit::pc_circuit`] — a circuit over indicator variables
//!   `y_{row, x}` that evaluates to `mcoeff(w)` at the one-hot encoding of
//!   any word `w` up to a degree bound.

use std::collections::{BTreeMap, HashMap};

use num::traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::RatMatrix;
use crate::poly::NcPoly;
use crate::rational::{format_rational, int, parse_rational, Rational};
use crate::vars::{VarId, VarTable};
use crate::word::Word;

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Var(VarId),
    Const(Rational),
    /// Matrix constants support evaluation only; every coefficient
    /// operation rejects them.
    MatConst(RatMatrix),
    Add(usize, usize),
    Mul(usize, usize),
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("circuit has no gates")]
    Empty,
    #[error("gate {gate} references child {child}, which does not precede it")]
    BadChild { gate: usize, child: usize },
    #[error("output gate {0} out of range")]
    BadOutput(usize),
    #[error("formal degree {degree} exceeds the bound {cap}")]
    DegreeTooLarge { degree: usize, cap: usize },
    #[error("variable #{0} has no assigned value")]
    Unassigned(u32),
    #[error("matrix constants support evaluation only, not coefficient extraction or expansion")]
    MatrixCoefficients,
    #[error("gate {gate} expects a {expected}x{expected} matrix, found {rows}x{cols}")]
    DimensionMismatch {
        gate: usize,
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("circuit json: {0}")]
    Json(String),
}

/// Gate list in topological order (children precede parents) plus a
/// designated output gate.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    gates: Vec<Gate>,
    output: usize,
}

/// Append-only constructor; child indices are valid by construction.
#[derive(Default, Debug)]
pub struct CircuitBuilder {
    gates: Vec<Gate>,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, g: Gate) -> usize {
        if let Gate::Add(l, r) | Gate::Mul(l, r) = g {
            assert!(l < self.gates.len() && r < self.gates.len());
        }
        self.gates.push(g);
        self.gates.len() - 1
    }

    pub fn var(&mut self, v: VarId) -> usize {
        self.push(Gate::Var(v))
    }

    pub fn constant(&mut self, q: Rational) -> usize {
        self.push(Gate::Const(q))
    }

    pub fn mat_const(&mut self, m: RatMatrix) -> usize {
        self.push(Gate::MatConst(m))
    }

    pub fn add(&mut self, l: usize, r: usize) -> usize {
        self.push(Gate::Add(l, r))
    }

    pub fn mul(&mut self, l: usize, r: usize) -> usize {
        self.push(Gate::Mul(l, r))
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn finish(self, output: usize) -> Circuit {
        Circuit::from_parts(self.gates, output).expect("builder produced an invalid circuit")
    }
}

fn opt_add(b: &mut CircuitBuilder, l: Option<usize>, r: Option<usize>) -> Option<usize> {
    match (l, r) {
        (None, x) | (x, None) => x,
        (Some(l), Some(r)) => Some(b.add(l, r)),
    }
}

fn opt_mul(b: &mut CircuitBuilder, l: Option<usize>, r: Option<usize>) -> Option<usize> {
    match (l, r) {
        (Some(l), Some(r)) => Some(b.mul(l, r)),
        _ => None,
    }
}

impl Circuit {
    pub fn from_parts(gates: Vec<Gate>, output: usize) -> Result<Self, CircuitError> {
        if gates.is_empty() {
            return Err(CircuitError::Empty);
        }
        for (i, g) in gates.iter().enumerate() {
            if let Gate::Add(l, r) | Gate::Mul(l, r) = g {
                for &c in [l, r] {
                    if c >= i {
                        return Err(CircuitError::BadChild { gate: i, child: c });
                    }
                }
            }
        }
        if output >= gates.len() {
            return Err(CircuitError::BadOutput(output));
        }
        Ok(Circuit { gates, output })
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    fn reachable(&self) -> Vec<bool> {
        let mut reach = vec![false; self.gates.len()];
        let mut stack = vec![self.output];
        reach[self.output] = true;
        while let Some(i) = stack.pop() {
            if let Gate::Add(l, r) | Gate::Mul(l, r) = self.gates[i] {
                for c in [l, r] {
                    if !reach[c] {
                        reach[c] = true;
                        stack.push(c);
                    }
                }
            }
        }
        reach
    }

    fn formal_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            deg[i] = match g {
                Gate::Var(_) => 1,
                Gate::Const(_) | Gate::MatConst(_) => 0,
                Gate::Add(l, r) => deg[*l].max(deg[*r]),
                Gate::Mul(l, r) => deg[*l].saturating_add(deg[*r]),
            };
        }
        deg
    }

    /// Formal degree of the output gate (an upper bound on the degree of
    /// the computed polynomial).
    pub fn formal_degree(&self) -> usize {
        self.formal_degrees()[self.output]
    }

    /// Distinct variables reachable from the output, ascending.
    pub fn vars(&self) -> Vec<VarId> {
        let reach = self.reachable();
        let mut vs: Vec<VarId> = self
            .gates
            .iter()
            .zip(&reach)
            .filter_map(|(g, &r)| match g {
                Gate::Var(v) if r => Some(*v),
                _ => None,
            })
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    fn check_rational_only(&self) -> Result<(), CircuitError> {
        let reach = self.reachable();
        for (g, r) in self.gates.iter().zip(&reach) {
            if *r && matches!(g, Gate::MatConst(_)) {
                return Err(CircuitError::MatrixCoefficients);
            }
        }
        Ok(())
    }

    /// Symbolic expansion into the free algebra; the oracle every
    /// coefficient algorithm is tested against.
    pub fn expand(&self, cap: usize) -> Result<NcPoly, CircuitError> {
        self.check_rational_only()?;
        let degree = self.formal_degree();
        if degree > cap {
            return Err(CircuitError::DegreeTooLarge { degree, cap });
        }
        let reach = self.reachable();
        let mut polys: Vec<Option<NcPoly>> = vec![None; self.gates.len()];
        for i in 0..self.gates.len() {
            if !reach[i] {
                continue;
            }
            let p = match &self.gates[i] {
                Gate::Var(v) => NcPoly::var(*v),
                Gate::Const(q) => NcPoly::constant(q.clone()),
                Gate::MatConst(_) => unreachable!(),
                Gate::Add(l, r) => polys[*l].as_ref().unwrap() + polys[*r].as_ref().unwrap(),
                Gate::Mul(l, r) => polys[*l].as_ref().unwrap() * polys[*r].as_ref().unwrap(),
            };
            polys[i] = Some(p);
        }
        Ok(polys[self.output].take().unwrap())
    }

    pub fn eval_rational(
        &self,
        assign: &HashMap<VarId, Rational>,
    ) -> Result<Rational, CircuitError> {
        self.check_rational_only()?;
        let reach = self.reachable();
        let mut vals: Vec<Option<Rational>> = vec![None; self.gates.len()];
        for i in 0..self.gates.len() {
            if !reach[i] {
                continue;
            }
            let v = match &self.gates[i] {
                Gate::Var(x) => assign
                    .get(x)
                    .cloned()
                    .ok_or(CircuitError::Unassigned(x.0))?,
                Gate::Const(q) => q.clone(),
                Gate::MatConst(_) => unreachable!(),
                Gate::Add(l, r) => vals[*l].as_ref().unwrap() + vals[*r].as_ref().unwrap(),
                Gate::Mul(l, r) => vals[*l].as_ref().unwrap() * vals[*r].as_ref().unwrap(),
            };
            vals[i] = Some(v);
        }
        Ok(vals[self.output].take().unwrap())
    }

    /// Evaluation in the algebra of `dim`×`dim` matrices; rational
    /// constants embed as multiples of the identity.
    pub fn eval_matrix(
        &self,
        assign: &HashMap<VarId, RatMatrix>,
        dim: usize,
    ) -> Result<RatMatrix, CircuitError> {
        let reach = self.reachable();
        let check = |i: usize, m: &RatMatrix| -> Result<(), CircuitError> {
            if m.rows() != dim || m.cols() != dim {
                return Err(CircuitError::DimensionMismatch {
                    gate: i,
                    expected: dim,
                    rows: m.rows(),
                    cols: m.cols(),
                });
            }
            Ok(())
        };
        let mut vals: Vec<Option<RatMatrix>> = vec![None; self.gates.len()];
        for i in 0..self.gates.len() {
            if !reach[i] {
                continue;
            }
            let v = match &self.gates[i] {
                Gate::Var(x) => {
                    let m = assign.get(x).ok_or(CircuitError::Unassigned(x.0))?;
                    check(i, m)?;
                    m.clone()
                }
                Gate::Const(q) => RatMatrix::identity(dim).scale(q),
                Gate::MatConst(m) => {
                    check(i, m)?;
                    m.clone()
                }
                Gate::Add(l, r) => vals[*l].as_ref().unwrap().add(vals[*r].as_ref().unwrap()),
                Gate::Mul(l, r) => vals[*l].as_ref().unwrap().mul(vals[*r].as_ref().unwrap()),
            };
            vals[i] = Some(v);
        }
        Ok(vals[self.output].take().unwrap())
    }

    /// Per-gate tables of the coefficients of every contiguous subword
    /// `m[s..e]`, flattened as `s*(d+1)+e`, plus the count of ring
    /// operations spent.
    fn subword_tables(&self, m: &Word) -> Result<(Vec<Option<Vec<Rational>>>, u64), CircuitError> {
        self.check_rational_only()?;
        let d = m.len();
        let stride = d + 1;
        let idx = |s: usize, e: usize| s * stride + e;
        let reach = self.reachable();
        let mut tables: Vec<Option<Vec<Rational>>> = vec![None; self.gates.len()];
        let mut ops: u64 = 0;
        for i in 0..self.gates.len() {
            if !reach[i] {
                continue;
            }
            let mut t = vec![Rational::zero(); stride * stride];
            match &self.gates[i] {
                Gate::Var(v) => {
                    for s in 0..d {
                        if m.letters()[s] == *v {
                            t[idx(s, s + 1)] = int(1);
                        }
                    }
                }
                Gate::Const(q) => {
                    for s in 0..=d {
                        t[idx(s, s)] = q.clone();
                    }
                }
                Gate::MatConst(_) => unreachable!(),
                Gate::Add(l, r) => {
                    let (lt, rt) = (tables[*l].as_ref().unwrap(), tables[*r].as_ref().unwrap());
                    for s in 0..=d {
                        for e in s..=d {
                            let (a, b) = (&lt[idx(s, e)], &rt[idx(s, e)]);
                            if a.is_zero() {
                                t[idx(s, e)] = b.clone();
                            } else if b.is_zero() {
                                t[idx(s, e)] = a.clone();
                            } else {
                                ops += 1;
                                t[idx(s, e)] = a + b;
                            }
                        }
                    }
                }
                Gate::Mul(l, r) => {
                    let (lt, rt) = (tables[*l].as_ref().unwrap(), tables[*r].as_ref().unwrap());
                    for s in 0..=d {
                        for e in s..=d {
                            let mut acc = Rational::zero();
                            for split in s..=e {
                                let (a, b) = (&lt[idx(s, split)], &rt[idx(split, e)]);
                                if a.is_zero() || b.is_zero() {
                                    continue;
                                }
                                ops += 1;
                                let term = a * b;
                                if acc.is_zero() {
                                    acc = term;
                                } else {
                                    ops += 1;
                                    acc += term;
                                }
                            }
                            t[idx(s, e)] = acc;
                        }
                    }
                }
            }
            tables[i] = Some(t);
        }
        Ok((tables, ops))
    }

    /// Coefficient of the word `m` in the computed polynomial.  The empty
    /// word yields the constant term.
    pub fn mcoeff(&self, m: &Word) -> Result<Rational, CircuitError> {
        Ok(self.mcoeff_counted(m)?.0)
    }

    /// [`Circuit::mcoeff`] plus the number of ring operations performed;
    /// the count stays within `64·d³·size` on any reasonably sized input.
    pub fn mcoeff_counted(&self, m: &Word) -> Result<(Rational, u64), CircuitError> {
        let d = m.len();
        let (tables, ops) = self.subword_tables(m)?;
        let t = tables[self.output].as_ref().unwrap();
        Ok((t[d].clone(), ops))
    }

    /// Circuit for the prefix quotient `Σ_{m' = m·m''} coeff(m')·m''` of
    /// the computed polynomial.
    pub fn pcoeff_circuit(&self, m: &Word) -> Result<Circuit, CircuitError> {
        let (tables, _) = self.subword_tables(m)?;
        let d = m.len();
        let stride = d + 1;
        let reach = self.reachable();
        let mut b = CircuitBuilder {
            gates: self.gates.clone(),
        };
        // quot[v][i] computes the quotient of gate v's polynomial by the
        // suffix m[i..]; None is the zero polynomial.  The whole-gate case
        // i = d reuses the embedded original gate.
        let mut quot: Vec<Option<Vec<Option<usize>>>> = vec![None; self.gates.len()];
        for v in 0..self.gates.len() {
            if !reach[v] {
                continue;
            }
            let mut row: Vec<Option<usize>> = vec![None; stride];
            row[d] = Some(v);
            for i in (0..d).rev() {
                row[i] = match &self.gates[v] {
                    Gate::Var(x) => (i + 1 == d && m.letters()[i] == *x)
                        .then(|| b.constant(int(1))),
                    Gate::Const(_) => None,
                    Gate::MatConst(_) => unreachable!(),
                    Gate::Add(l, r) => {
                        let (lq, rq) = (
                            quot[*l].as_ref().unwrap()[i],
                            quot[*r].as_ref().unwrap()[i],
                        );
                        opt_add(&mut b, lq, rq)
                    }
                    Gate::Mul(l, r) => {
                        // Splits where the left factor contributes a proper
                        // prefix m[i..t] exactly, plus the split where the
                        // whole suffix lands in the left factor.
                        let mut acc = None;
                        for t in i..d {
                            let mc = &tables[*l].as_ref().unwrap()[i * stride + t];
                            if mc.is_zero() {
                                continue;
                            }
                            let Some(hq) = quot[*r].as_ref().unwrap()[t] else {
                                continue;
                            };
                            let c = b.constant(mc.clone());
                            let term = b.mul(c, hq);
                            acc = opt_add(&mut b, acc, Some(term));
                        }
                        let lq = quot[*l].as_ref().unwrap()[i];
                        let full = opt_mul(&mut b, lq, Some(*r));
                        opt_add(&mut b, acc, full)
                    }
                };
            }
            quot[v] = Some(row);
        }
        let out = match quot[self.output].as_ref().unwrap()[0] {
            Some(g) => g,
            None => b.constant(int(0)),
        };
        Ok(b.finish(out))
    }

    /// A circuit over the indicator grid `y_{row, x}` whose value at the
    /// one-hot encoding of a word `w` (rows `1..=|w|` one-hot, later rows
    /// zero) is `mcoeff(w)`, for every `w` of length `1..=d`.  Grids with
    /// two ones in a row evaluate to zero.
    pub fn pc_circuit(
        &self,
        d: usize,
        table: &mut VarTable,
    ) -> Result<(Circuit, YGrid), CircuitError> {
        self.check_rational_only()?;
        let degree = self.formal_degree();
        if degree > d {
            return Err(CircuitError::DegreeTooLarge { degree, cap: d });
        }
        let xs = self.vars();
        let grid = YGrid::mint(d, xs.clone(), table);
        let reach = self.reachable();
        let degs = self.formal_degrees();
        let mut b = CircuitBuilder::new();
        let mut y_gates: HashMap<(usize, VarId), usize> = HashMap::new();
        for row in 1..=d {
            for &x in &xs {
                let g = b.var(grid.y(row, x));
                y_gates.insert((row, x), g);
            }
        }
        let one = b.constant(int(1));
        let neg = b.constant(int(-1));
        let one_minus = |b: &mut CircuitBuilder, g: usize| {
            let n = b.mul(neg, g);
            b.add(one, n)
        };
        // window[v][a*(d+1)+b]: the sum over words u of length b-a of
        // mcoeff(p_v, u) times the row-(a+1)..row-b indicator monomial of u.
        let stride = d + 1;
        let mut window: Vec<Option<Vec<Option<usize>>>> = vec![None; self.gates.len()];
        for v in 0..self.gates.len() {
            if !reach[v] {
                continue;
            }
            let mut w: Vec<Option<usize>> = vec![None; stride * stride];
            for a in 0..=d {
                for z in a..=d {
                    if z - a > degs[v] {
                        continue;
                    }
                    w[a * stride + z] = match &self.gates[v] {
                        Gate::Var(x) => {
                            (z == a + 1).then(|| y_gates[&(z, *x)])
                        }
                        Gate::Const(q) => {
                            (z == a && !q.is_zero()).then(|| b.constant(q.clone()))
                        }
                        Gate::MatConst(_) => unreachable!(),
                        Gate::Add(l, r) => {
                            let (lw, rw) = (
                                window[*l].as_ref().unwrap()[a * stride + z],
                                window[*r].as_ref().unwrap()[a * stride + z],
                            );
                            opt_add(&mut b, lw, rw)
                        }
                        Gate::Mul(l, r) => {
                            let mut acc = None;
                            for t in a..=z {
                                let lw = window[*l].as_ref().unwrap()[a * stride + t];
                                let rw = window[*r].as_ref().unwrap()[t * stride + z];
                                let term = opt_mul(&mut b, lw, rw);
                                acc = opt_add(&mut b, acc, term);
                            }
                            acc
                        }
                    };
                }
            }
            window[v] = Some(w);
        }
        // Row factors: within the used rows, kill grids with two ones in a
        // row; past them, demand an all-zero row so longer encodings never
        // pick up shorter components.
        let mut pair_guard: Vec<Option<usize>> = vec![None; d + 1];
        let mut zero_guard: Vec<Option<usize>> = vec![None; d + 1];
        for row in 1..=d {
            let mut pg = None;
            for (i, &xi) in xs.iter().enumerate() {
                for &xj in &xs[i + 1..] {
                    let prod = b.mul(y_gates[&(row, xi)], y_gates[&(row, xj)]);
                    let fac = one_minus(&mut b, prod);
                    pg = opt_mul_or(&mut b, pg, fac);
                }
            }
            pair_guard[row] = pg;
            let mut zg = None;
            for &x in &xs {
                let fac = one_minus(&mut b, y_gates[&(row, x)]);
                zg = opt_mul_or(&mut b, zg, fac);
            }
            zero_guard[row] = zg;
        }
        let mut total = None;
        for comp in 1..=d.min(degree) {
            let Some(mut part) = window[self.output].as_ref().unwrap()[comp] else {
                continue;
            };
            for row in 1..=comp {
                if let Some(g) = pair_guard[row] {
                    part = b.mul(part, g);
                }
            }
            for row in comp + 1..=d {
                if let Some(g) = zero_guard[row] {
                    part = b.mul(part, g);
                }
            }
            total = opt_add(&mut b, total, Some(part));
        }
        let out = match total {
            Some(g) => g,
            None => b.constant(int(0)),
        };
        Ok((b.finish(out), grid))
    }

    pub fn to_json(&self, table: &VarTable) -> Result<String, CircuitError> {
        let gates = self
            .gates
            .iter()
            .enumerate()
            .map(|(id, g)| {
                let mut j = GateJson {
                    id,
                    kind: String::new(),
                    var: None,
                    value: None,
                    left: None,
                    right: None,
                };
                match g {
                    Gate::Var(v) => {
                        j.kind = "var".into();
                        j.var = Some(table.name(*v).to_string());
                    }
                    Gate::Const(q) => {
                        j.kind = "const".into();
                        j.value = Some(format_rational(q));
                    }
                    Gate::MatConst(_) => return Err(CircuitError::MatrixCoefficients),
                    Gate::Add(l, r) => {
                        j.kind = "add".into();
                        j.left = Some(*l);
                        j.right = Some(*r);
                    }
                    Gate::Mul(l, r) => {
                        j.kind = "mul".into();
                        j.left = Some(*l);
                        j.right = Some(*r);
                    }
                }
                Ok(j)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let doc = CircuitJson {
            gates,
            output: self.output,
        };
        Ok(serde_json::to_string_pretty(&doc).expect("circuit serialization cannot fail"))
    }

    /// Accepts the schema produced by [`Circuit::to_json`]; gates must be
    /// listed with children before parents, ids arbitrary but unique.
    pub fn from_json(src: &str, table: &mut VarTable) -> Result<Self, CircuitError> {
        let doc: CircuitJson =
            serde_json::from_str(src).map_err(|e| CircuitError::Json(e.to_string()))?;
        let mut index: HashMap<usize, usize> = HashMap::new();
        let mut gates = Vec::with_capacity(doc.gates.len());
        for (pos, g) in doc.gates.iter().enumerate() {
            if index.insert(g.id, pos).is_some() {
                return Err(CircuitError::Json(format!("duplicate gate id {}", g.id)));
            }
            let child = |c: Option<usize>| -> Result<usize, CircuitError> {
                let c = c.ok_or_else(|| {
                    CircuitError::Json(format!("gate {} is missing a child", g.id))
                })?;
                index
                    .get(&c)
                    .filter(|&&p| p < pos)
                    .copied()
                    .ok_or(CircuitError::BadChild { gate: pos, child: c })
            };
            let gate = match g.kind.as_str() {
                "var" => {
                    let name = g.var.as_ref().ok_or_else(|| {
                        CircuitError::Json(format!("var gate {} needs a name", g.id))
                    })?;
                    Gate::Var(table.intern(name))
                }
                "const" => {
                    let v = g.value.as_ref().ok_or_else(|| {
                        CircuitError::Json(format!("const gate {} needs a value", g.id))
                    })?;
                    Gate::Const(parse_rational(v).map_err(CircuitError::Json)?)
                }
                "add" => Gate::Add(child(g.left)?, child(g.right)?),
                "mul" => Gate::Mul(child(g.left)?, child(g.right)?),
                other => {
                    return Err(CircuitError::Json(format!("unknown gate kind `{other}`")))
                }
            };
            gates.push(gate);
        }
        let output = *index
            .get(&doc.output)
            .ok_or(CircuitError::BadOutput(doc.output))?;
        Circuit::from_parts(gates, output)
    }
}

fn opt_mul_or(b: &mut CircuitBuilder, acc: Option<usize>, g: usize) -> Option<usize> {
    match acc {
        None => Some(g),
        Some(a) => Some(b.mul(a, g)),
    }
}

/// The indicator-variable grid minted by [`Circuit::pc_circuit`]: one
/// fresh variable `y_{row, x}` per row `1..=d` and circuit variable `x`.
#[derive(Clone, Debug)]
pub struct YGrid {
    d: usize,
    xs: Vec<VarId>,
    grid: BTreeMap<(usize, VarId), VarId>,
}

impl YGrid {
    fn mint(d: usize, xs: Vec<VarId>, table: &mut VarTable) -> Self {
        let mut grid = BTreeMap::new();
        for row in 1..=d {
            for &x in &xs {
                let base = format!("y_{row}_{}", table.name(x));
                let mut name = base.clone();
                let mut tick = 1;
                while table.lookup(&name).is_some() {
                    tick += 1;
                    name = format!("{base}_{tick}");
                }
                grid.insert((row, x), table.intern(&name));
            }
        }
        YGrid { d, xs, grid }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn xs(&self) -> &[VarId] {
        &self.xs
    }

    pub fn y(&self, row: usize, x: VarId) -> VarId {
        self.grid[&(row, x)]
    }

    /// One-hot assignment encoding `w`: `y_{row, x} = 1` exactly when `w`
    /// has `x` at position `row`.  `None` if `w` is too long or mentions a
    /// variable outside the grid.
    pub fn encode(&self, w: &Word) -> Option<HashMap<VarId, Rational>> {
        if w.len() > self.d || w.letters().iter().any(|v| !self.xs.contains(v)) {
            return None;
        }
        let mut assign: HashMap<VarId, Rational> = self
            .grid
            .values()
            .map(|&y| (y, Rational::zero()))
            .collect();
        for (i, &x) in w.letters().iter().enumerate() {
            assign.insert(self.y(i + 1, x), Rational::one());
        }
        Some(assign)
    }

    /// Arbitrary 0/1 grid values by (row, x) position; entries absent from
    /// `ones` are zero.
    pub fn assignment_with_ones(&self, ones: &[(usize, VarId)]) -> HashMap<VarId, Rational> {
        let mut assign: HashMap<VarId, Rational> = self
            .grid
            .values()
            .map(|&y| (y, Rational::zero()))
            .collect();
        for &(row, x) in ones {
            assign.insert(self.y(row, x), Rational::one());
        }
        assign
    }
}

#[derive(Serialize, Deserialize)]
struct GateJson {
    id: usize,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    var: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    left: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    right: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    gates: Vec<GateJson>,
    output: usize,
}
