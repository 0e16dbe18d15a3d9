//! Layered algebraic branching programs.
//!
//! An [`Abp`] is a layered DAG with a single source in the first layer and a
//! single sink in the last; every edge crosses exactly one layer boundary
//! and carries a rational coefficient times either a variable or the
//! constant 1.  The program computes the sum over all source-to-sink paths
//! of the ordered product of edge labels — a non-commutative polynomial.
//!
//! Everything here works layer by layer; nothing ever enumerates paths.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num::traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::poly::NcPoly;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::ring::{FreeAlgebra, Ring};
use crate::vars::{VarId, VarTable};

pub type NodeId = u32;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EdgeLabel {
    /// Coefficient times the constant 1.
    Const,
    /// Coefficient times a variable.
    Var(VarId),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub coeff: Rational,
    pub label: EdgeLabel,
}

#[derive(Clone, Debug)]
pub struct Abp {
    layers: Vec<Vec<NodeId>>,
    edges: Vec<Edge>,
    source: NodeId,
    sink: NodeId,
    layer_of: HashMap<NodeId, usize>,
    edges_from_layer: Vec<Vec<usize>>,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum AbpError {
    #[error("branching program needs at least one layer")]
    NoLayers,
    #[error("layer {0} is empty")]
    EmptyLayer(usize),
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("source must be the sole node of the first layer")]
    BadSource,
    #[error("sink must be the sole node of the last layer")]
    BadSink,
    #[error("edge references unknown node {0}")]
    UnknownNode(NodeId),
    #[error("edge {from}->{to} must go from one layer to the next")]
    EdgeSkipsLayers { from: NodeId, to: NodeId },
    #[error("no value assigned for variable #{0}")]
    Unassigned(u32),
    #[error("value for variable #{0} has the wrong shape for the evaluation ring")]
    BadShape(u32),
    #[error("symbolic expansion exceeded the {0}-term support guard")]
    SupportGuard(usize),
    #[error("certificate has {cuts} cuts but {vars} block variables")]
    CutVarMismatch { cuts: usize, vars: usize },
    #[error("cut positions must be strictly increasing and at most the layer count")]
    BadCuts,
    #[error("certificate assigns summation variable #{0} to more than one block")]
    DuplicateBlockVar(u32),
    #[error("edge in layer step {step} of block {block} carries foreign summation variable #{var}")]
    ForeignBlockVar { step: usize, block: usize, var: u32 },
    #[error("edge in layer step {step} after the last cut carries summation variable #{var}")]
    TailSummationVar { step: usize, var: u32 },
    #[error("invalid branching program JSON: {0}")]
    Json(String),
}

/// Term-count ceiling for symbolic expansion.
pub const EXPAND_SUPPORT_GUARD: usize = 1 << 20;

impl Abp {
    /// Validates layering and drops edges whose coefficient is zero.
    pub fn new(
        layers: Vec<Vec<NodeId>>,
        edges: Vec<Edge>,
        source: NodeId,
        sink: NodeId,
    ) -> Result<Abp, AbpError> {
        if layers.is_empty() {
            return Err(AbpError::NoLayers);
        }
        let mut layer_of = HashMap::new();
        for (l, nodes) in layers.iter().enumerate() {
            if nodes.is_empty() {
                return Err(AbpError::EmptyLayer(l));
            }
            for &n in nodes {
                if layer_of.insert(n, l).is_some() {
                    return Err(AbpError::DuplicateNode(n));
                }
            }
        }
        if layers[0] != [source] {
            return Err(AbpError::BadSource);
        }
        if *layers.last().unwrap() != [sink] {
            return Err(AbpError::BadSink);
        }
        let edges: Vec<Edge> = edges
            .into_iter()
            .filter(|e| !e.coeff.is_zero())
            .collect();
        let mut edges_from_layer = vec![Vec::new(); layers.len().saturating_sub(1)];
        for (i, e) in edges.iter().enumerate() {
            let lf = *layer_of.get(&e.from).ok_or(AbpError::UnknownNode(e.from))?;
            let lt = *layer_of.get(&e.to).ok_or(AbpError::UnknownNode(e.to))?;
            if lt != lf + 1 {
                return Err(AbpError::EdgeSkipsLayers {
                    from: e.from,
                    to: e.to,
                });
            }
            edges_from_layer[lf].push(i);
        }
        Ok(Abp {
            layers,
            edges,
            source,
            sink,
            layer_of,
            edges_from_layer,
        })
    }

    pub fn layers(&self) -> &[Vec<NodeId>] {
        &self.layers
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn sink(&self) -> NodeId {
        self.sink
    }

    /// Number of layer transitions (one less than the number of layers).
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    /// Total node count.
    pub fn size(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn layer_of(&self, n: NodeId) -> usize {
        self.layer_of[&n]
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.edges
            .iter()
            .filter_map(|e| match e.label {
                EdgeLabel::Var(v) => Some(v),
                EdgeLabel::Const => None,
            })
            .collect()
    }

    /// Evaluates the program over `ring`, with `assign` giving a value for
    /// every variable that occurs.  Runs one layer at a time.
    pub fn eval<R: Ring>(
        &self,
        ring: &R,
        assign: &HashMap<VarId, R::Elem>,
    ) -> Result<R::Elem, AbpError> {
        for v in self.vars() {
            match assign.get(&v) {
                None => return Err(AbpError::Unassigned(v.0)),
                Some(e) if !ring.accepts(e) => return Err(AbpError::BadShape(v.0)),
                _ => {}
            }
        }
        let zero = ring.zero();
        let mut vals: HashMap<NodeId, R::Elem> = HashMap::new();
        vals.insert(self.source, ring.one());
        for layer_edges in &self.edges_from_layer {
            let mut next: HashMap<NodeId, R::Elem> = HashMap::new();
            for &i in layer_edges {
                let e = &self.edges[i];
                let Some(v) = vals.get(&e.from) else { continue };
                if *v == zero {
                    continue;
                }
                let step = match e.label {
                    EdgeLabel::Var(x) => ring.scale(&assign[&x], &e.coeff),
                    EdgeLabel::Const => ring.from_rational(&e.coeff),
                };
                let contrib = ring.mul(v, &step);
                match next.entry(e.to) {
                    std::collections::hash_map::Entry::Vacant(slot) => {
                        slot.insert(contrib);
                    }
                    std::collections::hash_map::Entry::Occupied(mut slot) => {
                        let sum = ring.add(slot.get(), &contrib);
                        *slot.get_mut() = sum;
                    }
                }
            }
            vals = next;
        }
        Ok(vals.remove(&self.sink).unwrap_or(zero))
    }

    /// Expands the program into an explicit polynomial by evaluating each
    /// variable at itself.  Errors out if the running support ever exceeds
    /// [`EXPAND_SUPPORT_GUARD`] terms.
    pub fn expand(&self) -> Result<NcPoly, AbpError> {
        let fa = FreeAlgebra;
        let mut vals: HashMap<NodeId, NcPoly> = HashMap::new();
        vals.insert(self.source, NcPoly::one());
        for layer_edges in &self.edges_from_layer {
            let mut next: HashMap<NodeId, NcPoly> = HashMap::new();
            for &i in layer_edges {
                let e = &self.edges[i];
                let Some(v) = vals.get(&e.from) else { continue };
                if v.is_zero() {
                    continue;
                }
                let step = match e.label {
                    EdgeLabel::Var(x) => NcPoly::var(x).scale(&e.coeff),
                    EdgeLabel::Const => NcPoly::constant(e.coeff.clone()),
                };
                let contrib = fa.mul(v, &step);
                match next.entry(e.to) {
                    std::collections::hash_map::Entry::Vacant(slot) => {
                        slot.insert(contrib);
                    }
                    std::collections::hash_map::Entry::Occupied(mut slot) => {
                        let sum = fa.add(slot.get(), &contrib);
                        *slot.get_mut() = sum;
                    }
                }
            }
            let support: usize = next.values().map(NcPoly::support_size).sum();
            if support > EXPAND_SUPPORT_GUARD {
                return Err(AbpError::SupportGuard(EXPAND_SUPPORT_GUARD));
            }
            vals = next;
        }
        Ok(vals.remove(&self.sink).unwrap_or_else(NcPoly::zero))
    }

    /// Replaces each mapped variable by a rational constant.  Substituting 0
    /// deletes the edge; any other value folds into the coefficient.
    pub fn substitute(&self, map: &HashMap<VarId, Rational>) -> Abp {
        let edges = self
            .edges
            .iter()
            .map(|e| match e.label {
                EdgeLabel::Var(v) => match map.get(&v) {
                    Some(c) => Edge {
                        from: e.from,
                        to: e.to,
                        coeff: &e.coeff * c,
                        label: EdgeLabel::Const,
                    },
                    None => e.clone(),
                },
                EdgeLabel::Const => e.clone(),
            })
            .collect();
        Abp::new(self.layers.clone(), edges, self.source, self.sink)
            .expect("substitution preserves layering")
    }

    pub fn to_json(&self, table: &VarTable) -> Value {
        json!({
            "layers": self.layers,
            "edges": self.edges.iter().map(|e| {
                let var = match e.label {
                    EdgeLabel::Var(v) => Value::String(table.name(v).to_string()),
                    EdgeLabel::Const => Value::Null,
                };
                json!({
                    "from": e.from,
                    "to": e.to,
                    "coeff": format_rational(&e.coeff),
                    "var": var,
                })
            }).collect::<Vec<_>>(),
            "source": self.source,
            "sink": self.sink,
        })
    }

    pub fn from_json(value: &Value, table: &mut VarTable) -> Result<Abp, AbpError> {
        let err = |m: &str| AbpError::Json(m.to_string());
        let obj = value.as_object().ok_or_else(|| err("expected an object"))?;
        let get_u32 = |v: &Value, what: &str| -> Result<u32, AbpError> {
            v.as_u64()
                .and_then(|n| u32::try_from(n).ok())
                .ok_or_else(|| err(&format!("{what} must be a small non-negative integer")))
        };
        let layers_v = obj
            .get("layers")
            .and_then(Value::as_array)
            .ok_or_else(|| err("missing `layers` array"))?;
        let mut layers = Vec::new();
        for lv in layers_v {
            let nodes = lv
                .as_array()
                .ok_or_else(|| err("each layer must be an array of node ids"))?;
            let mut layer = Vec::new();
            for n in nodes {
                layer.push(get_u32(n, "node id")?);
            }
            layers.push(layer);
        }
        let edges_v = obj
            .get("edges")
            .and_then(Value::as_array)
            .ok_or_else(|| err("missing `edges` array"))?;
        let mut edges = Vec::new();
        for ev in edges_v {
            let eo = ev
                .as_object()
                .ok_or_else(|| err("each edge must be an object"))?;
            let from = get_u32(eo.get("from").ok_or_else(|| err("edge missing `from`"))?, "from")?;
            let to = get_u32(eo.get("to").ok_or_else(|| err("edge missing `to`"))?, "to")?;
            let coeff_s = eo
                .get("coeff")
                .and_then(Value::as_str)
                .ok_or_else(|| err("edge missing string `coeff`"))?;
            let coeff = parse_rational(coeff_s).map_err(AbpError::Json)?;
            let label = match eo.get("var") {
                None | Some(Value::Null) => EdgeLabel::Const,
                Some(Value::String(name)) => EdgeLabel::Var(table.intern(name)),
                Some(_) => return Err(err("edge `var` must be a name or null")),
            };
            edges.push(Edge {
                from,
                to,
                coeff,
                label,
            });
        }
        let source = get_u32(obj.get("source").ok_or_else(|| err("missing `source`"))?, "source")?;
        let sink = get_u32(obj.get("sink").ok_or_else(|| err("missing `sink`"))?, "sink")?;
        Abp::new(layers, edges, source, sink)
    }
}

/// Witness that a program reads its summation variables in disjoint blocks
/// of consecutive layers: cut positions `0 = i_0 < i_1 < ... < i_m <= L`
/// (stored without the leading 0) and the one summation variable allowed in
/// each block.  Layers past the last cut must be free of summation
/// variables entirely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReadOnceCertificate {
    pub cuts: Vec<usize>,
    pub block_vars: Vec<VarId>,
}

impl ReadOnceCertificate {
    /// Checks the certificate against a program and reports the first
    /// violation with its block and layer step.
    pub fn validate(&self, abp: &Abp) -> Result<(), AbpError> {
        if self.cuts.len() != self.block_vars.len() {
            return Err(AbpError::CutVarMismatch {
                cuts: self.cuts.len(),
                vars: self.block_vars.len(),
            });
        }
        let mut prev = 0usize;
        for &c in &self.cuts {
            if c <= prev || c > abp.depth() {
                return Err(AbpError::BadCuts);
            }
            prev = c;
        }
        let yset: BTreeSet<VarId> = self.block_vars.iter().copied().collect();
        if yset.len() != self.block_vars.len() {
            let mut seen = BTreeSet::new();
            for v in &self.block_vars {
                if !seen.insert(*v) {
                    return Err(AbpError::DuplicateBlockVar(v.0));
                }
            }
        }
        for e in abp.edges() {
            let EdgeLabel::Var(v) = e.label else { continue };
            if !yset.contains(&v) {
                continue;
            }
            let step = abp.layer_of(e.from);
            match self.block_of_step(step) {
                Some(block) => {
                    if self.block_vars[block] != v {
                        return Err(AbpError::ForeignBlockVar {
                            step,
                            block: block + 1,
                            var: v.0,
                        });
                    }
                }
                None => {
                    return Err(AbpError::TailSummationVar { step, var: v.0 });
                }
            }
        }
        Ok(())
    }

    /// Block index (0-based) owning the layer step `from -> from+1`, or
    /// `None` if the step lies after the last cut.
    fn block_of_step(&self, step: usize) -> Option<usize> {
        let mut lo = 0usize;
        for (j, &hi) in self.cuts.iter().enumerate() {
            if step >= lo && step < hi {
                return Some(j);
            }
            lo = hi;
        }
        None
    }
}

/// Sums a certified program over all 0/1 assignments to its summation
/// variables, eliminating them.
///
/// Each block is replaced by the merged union of its 0-substitution (which
/// deletes the block variable's edges) and its 1-substitution (which turns
/// them into constant edges); boundary layers are shared between the two
/// copies, so the result has at most twice as many nodes as the input.
pub fn exp_sum_readonce(abp: &Abp, cert: &ReadOnceCertificate) -> Result<Abp, AbpError> {
    cert.validate(abp)?;
    #[derive(Clone, Copy, PartialEq)]
    enum LayerKind {
        Shared,
        Doubled,
    }
    let kind_of = |layer: usize| -> LayerKind {
        if layer == 0 || layer > *cert.cuts.last().unwrap_or(&0) {
            return LayerKind::Shared;
        }
        if cert.cuts.contains(&layer) {
            LayerKind::Shared
        } else {
            LayerKind::Doubled
        }
    };

    let mut next_id: NodeId = 0;
    let mut fresh = || {
        let id = next_id;
        next_id += 1;
        id
    };
    // (old node, copy) -> new id; shared layers only use copy 0.
    let mut remap: HashMap<(NodeId, u8), NodeId> = HashMap::new();
    let mut layers: Vec<Vec<NodeId>> = Vec::with_capacity(abp.layers().len());
    for (l, nodes) in abp.layers().iter().enumerate() {
        let mut layer = Vec::new();
        match kind_of(l) {
            LayerKind::Shared => {
                for &n in nodes {
                    let id = fresh();
                    remap.insert((n, 0), id);
                    layer.push(id);
                }
            }
            LayerKind::Doubled => {
                for copy in 0u8..2 {
                    for &n in nodes {
                        let id = fresh();
                        remap.insert((n, copy), id);
                        layer.push(id);
                    }
                }
            }
        }
        layers.push(layer);
    }

    let endpoint = |remap: &HashMap<(NodeId, u8), NodeId>, n: NodeId, l: usize, copy: u8| {
        match kind_of(l) {
            LayerKind::Shared => remap[&(n, 0)],
            LayerKind::Doubled => remap[&(n, copy)],
        }
    };

    let mut edges = Vec::new();
    for e in abp.edges() {
        let step = abp.layer_of(e.from);
        match cert.block_of_step(step) {
            None => {
                edges.push(Edge {
                    from: endpoint(&remap, e.from, step, 0),
                    to: endpoint(&remap, e.to, step + 1, 0),
                    coeff: e.coeff.clone(),
                    label: e.label.clone(),
                });
            }
            Some(block) => {
                let y = cert.block_vars[block];
                for copy in 0u8..2 {
                    let label = match e.label {
                        EdgeLabel::Var(v) if v == y => {
                            if copy == 0 {
                                continue; // y := 0 deletes the edge
                            }
                            EdgeLabel::Const // y := 1 keeps a constant edge
                        }
                        ref other => other.clone(),
                    };
                    edges.push(Edge {
                        from: endpoint(&remap, e.from, step, copy),
                        to: endpoint(&remap, e.to, step + 1, copy),
                        coeff: e.coeff.clone(),
                        label,
                    });
                }
            }
        }
    }

    let source = remap[&(abp.source(), 0)];
    let sink_layer = abp.depth();
    let sink = endpoint(&remap, abp.sink(), sink_layer, 0);
    debug_assert!(kind_of(0) == LayerKind::Shared && kind_of(sink_layer) == LayerKind::Shared);
    Abp::new(layers, edges, source, sink)
}

/// Hadamard (coefficient-wise) product of two programs.
///
/// The second program is simulated inside the first as a weighted automaton:
/// constant edges of `b` are folded into a closure matrix `E`, each variable
/// `x` gets a transition matrix `W_x = E * V_x`, and the trailing closure
/// into `b`'s sink is absorbed into the edges entering the final layer.  The
/// result has at most `size(a) * size(b)` nodes and expands to the
/// coefficient-wise product of the two polynomials.
pub fn hadamard_abp(a: &Abp, b: &Abp) -> Abp {
    // Global order on b's nodes.
    let bnodes: Vec<NodeId> = b.layers().iter().flatten().copied().collect();
    let bindex: HashMap<NodeId, usize> = bnodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let nb = bnodes.len();

    // Closure over constant edges: paths using only constant labels.
    // Processing layers back to front makes each row depend only on later rows.
    let mut closure: Vec<Vec<Rational>> = (0..nb)
        .map(|i| {
            let mut row = vec![Rational::zero(); nb];
            row[i] = Rational::one();
            row
        })
        .collect();
    for layer_nodes in b.layers().iter().rev() {
        for &n in layer_nodes {
            let p = bindex[&n];
            for e in b.edges() {
                if e.from != n || e.label != EdgeLabel::Const {
                    continue;
                }
                let q = bindex[&e.to];
                let prop: Vec<(usize, Rational)> = closure[q]
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(j, c)| (j, &e.coeff * c))
                    .collect();
                for (j, c) in prop {
                    closure[p][j] += c;
                }
            }
        }
    }

    // One-letter transition matrices, closure applied on the left.
    let mut step: BTreeMap<VarId, Vec<Vec<Rational>>> = BTreeMap::new();
    for x in b.vars() {
        let mut v = vec![vec![Rational::zero(); nb]; nb];
        for e in b.edges() {
            if e.label == EdgeLabel::Var(x) {
                v[bindex[&e.from]][bindex[&e.to]] += e.coeff.clone();
            }
        }
        let mut w = vec![vec![Rational::zero(); nb]; nb];
        for (i, ci) in closure.iter().enumerate() {
            for (k, c) in ci.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (j, vkj) in v[k].iter().enumerate() {
                    if !vkj.is_zero() {
                        let t = c * vkj;
                        w[i][j] += t;
                    }
                }
            }
        }
        step.insert(x, w);
    }
    let into_sink: Vec<Rational> = (0..nb)
        .map(|p| closure[p][bindex[&b.sink()]].clone())
        .collect();

    // Degenerate first factor: a single node computes the constant 1, so the
    // product is the constant term of `b`.
    if a.depth() == 0 {
        let c0 = into_sink[bindex[&b.source()]].clone();
        if c0.is_one() {
            return Abp::new(vec![vec![0]], Vec::new(), 0, 0).unwrap();
        }
        return Abp::new(
            vec![vec![0], vec![1]],
            vec![Edge {
                from: 0,
                to: 1,
                coeff: c0,
                label: EdgeLabel::Const,
            }],
            0,
            1,
        )
        .unwrap();
    }

    // Forward construction over pairs (a-node, b-state).
    let mut next_id: NodeId = 0;
    let mut fresh = |layer: &mut Vec<NodeId>| {
        let id = next_id;
        next_id += 1;
        layer.push(id);
        id
    };
    let mut layers: Vec<Vec<NodeId>> = Vec::new();
    let mut pair_id: HashMap<(NodeId, usize), NodeId> = HashMap::new();

    let mut first = Vec::new();
    let src = fresh(&mut first);
    pair_id.insert((a.source(), bindex[&b.source()]), src);
    layers.push(first);

    let mut edges: Vec<Edge> = Vec::new();
    let last_step = a.depth() - 1;
    for stepno in 0..=last_step {
        let mut layer: Vec<NodeId> = Vec::new();
        let final_step = stepno == last_step;
        let mut sink_id: Option<NodeId> = None;
        // Pairs discovered in the previous layer, in insertion order.
        let prev: Vec<((NodeId, usize), NodeId)> = {
            let mut v: Vec<_> = pair_id
                .iter()
                .filter(|((n, _), _)| a.layer_of(*n) == stepno)
                .map(|(&k, &id)| (k, id))
                .collect();
            v.sort_by_key(|&(_, id)| id);
            v
        };
        for ((an, bp), from_id) in prev {
            for e in a.edges() {
                if e.from != an {
                    continue;
                }
                match (&e.label, final_step) {
                    (EdgeLabel::Const, false) => {
                        let to_id = *pair_id
                            .entry((e.to, bp))
                            .or_insert_with(|| fresh(&mut layer));
                        edges.push(Edge {
                            from: from_id,
                            to: to_id,
                            coeff: e.coeff.clone(),
                            label: EdgeLabel::Const,
                        });
                    }
                    (EdgeLabel::Var(x), false) => {
                        let Some(w) = step.get(x) else { continue };
                        for (q, wq) in w[bp].iter().enumerate() {
                            if wq.is_zero() {
                                continue;
                            }
                            let to_id = *pair_id
                                .entry((e.to, q))
                                .or_insert_with(|| fresh(&mut layer));
                            edges.push(Edge {
                                from: from_id,
                                to: to_id,
                                coeff: &e.coeff * wq,
                                label: EdgeLabel::Var(*x),
                            });
                        }
                    }
                    (EdgeLabel::Const, true) => {
                        let c = &e.coeff * &into_sink[bp];
                        if c.is_zero() {
                            continue;
                        }
                        let to_id = *sink_id.get_or_insert_with(|| fresh(&mut layer));
                        edges.push(Edge {
                            from: from_id,
                            to: to_id,
                            coeff: c,
                            label: EdgeLabel::Const,
                        });
                    }
                    (EdgeLabel::Var(x), true) => {
                        let Some(w) = step.get(x) else { continue };
                        let mut c = Rational::zero();
                        for (q, wq) in w[bp].iter().enumerate() {
                            if !wq.is_zero() && !into_sink[q].is_zero() {
                                c += wq * &into_sink[q];
                            }
                        }
                        let c = &e.coeff * &c;
                        if c.is_zero() {
                            continue;
                        }
                        let to_id = *sink_id.get_or_insert_with(|| fresh(&mut layer));
                        edges.push(Edge {
                            from: from_id,
                            to: to_id,
                            coeff: c,
                            label: EdgeLabel::Var(*x),
                        });
                    }
                }
            }
        }
        if layer.is_empty() {
            // No pair is reachable here; keep the layering well formed with
            // a disconnected placeholder (the product is zero).
            fresh(&mut layer);
        }
        layers.push(layer);
    }
    let sink = *layers.last().unwrap().first().unwrap();
    Abp::new(layers, edges, src, sink).expect("pair construction preserves layering")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::RatMatrix;
    use crate::rational::{int, rat};
    use crate::ring::{MatrixRing, RationalRing};

    struct Builder {
        layers: Vec<Vec<NodeId>>,
        edges: Vec<Edge>,
        next: NodeId,
    }

    impl Builder {
        fn new() -> Self {
            Builder {
                layers: Vec::new(),
                edges: Vec::new(),
                next: 0,
            }
        }
        fn layer(&mut self, count: usize) -> Vec<NodeId> {
            let ids: Vec<NodeId> = (self.next..self.next + count as u32).collect();
            self.next += count as u32;
            self.layers.push(ids.clone());
            ids
        }
        fn var(&mut self, from: NodeId, to: NodeId, v: VarId) {
            self.edge(from, to, int(1), EdgeLabel::Var(v));
        }
        fn edge(&mut self, from: NodeId, to: NodeId, coeff: Rational, label: EdgeLabel) {
            self.edges.push(Edge {
                from,
                to,
                coeff,
                label,
            });
        }
        fn finish(self) -> Abp {
            let source = self.layers[0][0];
            let sink = *self.layers.last().unwrap().last().unwrap();
            Abp::new(self.layers, self.edges, source, sink).unwrap()
        }
    }

    fn two_vars() -> (VarTable, VarId, VarId) {
        let mut t = VarTable::new();
        let x1 = t.intern("x1");
        let x2 = t.intern("x2");
        (t, x1, x2)
    }

    /// x1*x2 + x2*x1 as a diamond.
    fn diamond(x1: VarId, x2: VarId) -> Abp {
        let mut b = Builder::new();
        let s = b.layer(1)[0];
        let mid = b.layer(2);
        let t = b.layer(1)[0];
        b.var(s, mid[0], x1);
        b.var(s, mid[1], x2);
        b.var(mid[0], t, x2);
        b.var(mid[1], t, x1);
        b.finish()
    }

    #[test]
    fn eval_sums_parallel_paths() {
        let (_, x1, x2) = two_vars();
        let mut b = Builder::new();
        let s = b.layer(1)[0];
        let t = b.layer(1)[0];
        b.var(s, t, x1);
        b.var(s, t, x2);
        let abp = b.finish();
        let mut assign = HashMap::new();
        assign.insert(x1, int(2));
        assign.insert(x2, int(3));
        assert_eq!(abp.eval(&RationalRing, &assign).unwrap(), int(5));
    }

    #[test]
    fn eval_respects_matrix_order() {
        let (_, x1, x2) = two_vars();
        let mut b = Builder::new();
        let s = b.layer(1)[0];
        let m = b.layer(1)[0];
        let t = b.layer(1)[0];
        b.var(s, m, x1);
        b.var(m, t, x2);
        let abp = b.finish();
        let sm = RatMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        let rm = RatMatrix::from_i64(&[&[0, -1], &[1, -1]]);
        let ring = MatrixRing { dim: 2 };
        let mut assign = HashMap::new();
        assign.insert(x1, sm.clone());
        assign.insert(x2, rm.clone());
        let forward = abp.eval(&ring, &assign).unwrap();
        assert_eq!(forward, sm.mul(&rm));
        let mut swapped = HashMap::new();
        swapped.insert(x1, rm.clone());
        swapped.insert(x2, sm.clone());
        let backward = abp.eval(&ring, &swapped).unwrap();
        assert_eq!(backward, rm.mul(&sm));
        assert_ne!(forward, backward);
    }

    #[test]
    fn eval_errors() {
        let (_, x1, x2) = two_vars();
        let abp = diamond(x1, x2);
        let mut assign = HashMap::new();
        assign.insert(x1, int(1));
        assert_eq!(
            abp.eval(&RationalRing, &assign),
            Err(AbpError::Unassigned(x2.0))
        );
        let ring = MatrixRing { dim: 2 };
        let mut massign = HashMap::new();
        massign.insert(x1, RatMatrix::identity(2));
        massign.insert(x2, RatMatrix::identity(3));
        assert_eq!(abp.eval(&ring, &massign), Err(AbpError::BadShape(x2.0)));
    }

    #[test]
    fn single_node_program_computes_one() {
        let abp = Abp::new(vec![vec![0]], Vec::new(), 0, 0).unwrap();
        assert_eq!(abp.expand().unwrap(), NcPoly::one());
        assert_eq!(abp.eval(&RationalRing, &HashMap::new()).unwrap(), int(1));
        assert_eq!(abp.size(), 1);
    }

    #[test]
    fn expand_diamond() {
        let (_, x1, x2) = two_vars();
        let abp = diamond(x1, x2);
        let p = abp.expand().unwrap();
        let expected = &(&NcPoly::var(x1) * &NcPoly::var(x2))
            + &(&NcPoly::var(x2) * &NcPoly::var(x1));
        assert_eq!(p, expected);
        // Evaluating the expansion agrees with evaluating the program.
        let mut assign = HashMap::new();
        assign.insert(x1, rat(1, 2));
        assign.insert(x2, int(6));
        assert_eq!(abp.eval(&RationalRing, &assign).unwrap(), int(6));
    }

    #[test]
    fn expand_folds_constant_edges() {
        let (_, x1, _) = two_vars();
        let mut b = Builder::new();
        let s = b.layer(1)[0];
        let m = b.layer(1)[0];
        let t = b.layer(1)[0];
        b.edge(s, m, rat(2, 3), EdgeLabel::Const);
        b.var(m, t, x1);
        let abp = b.finish();
        assert_eq!(abp.expand().unwrap(), NcPoly::var(x1).scale(&rat(2, 3)));
    }

    #[test]
    fn substitute_zero_deletes_edge() {
        let (_, x1, x2) = two_vars();
        let abp = diamond(x1, x2);
        let mut map = HashMap::new();
        map.insert(x2, int(0));
        let sub = abp.substitute(&map);
        assert!(sub.expand().unwrap().is_zero());
        let mut map1 = HashMap::new();
        map1.insert(x2, int(1));
        let sub1 = abp.substitute(&map1);
        assert_eq!(
            sub1.expand().unwrap(),
            &NcPoly::var(x1) + &NcPoly::var(x1)
        );
    }

    #[test]
    fn layering_violations_are_rejected() {
        let bad = Abp::new(
            vec![vec![0], vec![1], vec![2]],
            vec![Edge {
                from: 0,
                to: 2,
                coeff: int(1),
                label: EdgeLabel::Const,
            }],
            0,
            2,
        );
        assert_eq!(
            bad.unwrap_err(),
            AbpError::EdgeSkipsLayers { from: 0, to: 2 }
        );
        assert_eq!(
            Abp::new(vec![vec![0, 1], vec![2]], Vec::new(), 0, 2).unwrap_err(),
            AbpError::BadSource
        );
        assert_eq!(
            Abp::new(vec![vec![0], vec![]], Vec::new(), 0, 0).unwrap_err(),
            AbpError::EmptyLayer(1)
        );
        assert_eq!(
            Abp::new(vec![vec![0], vec![0]], Vec::new(), 0, 0).unwrap_err(),
            AbpError::DuplicateNode(0)
        );
    }

    fn y_cert(vars: &[VarId], cuts: &[usize]) -> ReadOnceCertificate {
        ReadOnceCertificate {
            cuts: cuts.to_vec(),
            block_vars: vars.to_vec(),
        }
    }

    #[test]
    fn exp_sum_single_block() {
        // x1 * y1 summed over y1 in {0,1} gives x1.
        let mut t = VarTable::new();
        let x = t.intern("x1");
        let y = t.intern("y1");
        let mut b = Builder::new();
        let s = b.layer(1)[0];
        let m = b.layer(1)[0];
        let tk = b.layer(1)[0];
        b.var(s, m, x);
        b.var(m, tk, y);
        let abp = b.finish();
        let cert = y_cert(&[y], &[2]);
        let out = exp_sum_readonce(&abp, &cert).unwrap();
        assert_eq!(out.expand().unwrap(), NcPoly::var(x));
        assert!(out.size() <= 2 * abp.size());
        assert!(out.vars().iter().all(|&v| v != y));
    }

    #[test]
    fn exp_sum_two_blocks() {
        // y1 * y2 over both assignments sums to 1 (only y1=y2=1 survives).
        let mut t = VarTable::new();
        let y1 = t.intern("y1");
        let y2 = t.intern("y2");
        let mut b = Builder::new();
        let s = b.layer(1)[0];
        let m = b.layer(1)[0];
        let tk = b.layer(1)[0];
        b.var(s, m, y1);
        b.var(m, tk, y2);
        let abp = b.finish();
        let out = exp_sum_readonce(&abp, &y_cert(&[y1, y2], &[1, 2])).unwrap();
        assert_eq!(out.expand().unwrap(), NcPoly::one());
        assert!(out.size() <= 2 * abp.size());
    }

    #[test]
    fn exp_sum_counts_absent_variable_twice() {
        // Block variable that never occurs: both substitutions agree, so the
        // sum doubles the polynomial.
        let mut t = VarTable::new();
        let x = t.intern("x1");
        let y = t.intern("y1");
        let mut b = Builder::new();
        let s = b.layer(1)[0];
        let tk = b.layer(1)[0];
        b.var(s, tk, x);
        let abp = b.finish();
        let out = exp_sum_readonce(&abp, &y_cert(&[y], &[1])).unwrap();
        assert_eq!(out.expand().unwrap(), NcPoly::var(x).scale(&int(2)));
    }

    #[test]
    fn certificate_violations() {
        let mut t = VarTable::new();
        let y1 = t.intern("y1");
        let y2 = t.intern("y2");
        let mut b = Builder::new();
        let s = b.layer(1)[0];
        let m = b.layer(1)[0];
        let tk = b.layer(1)[0];
        b.var(s, m, y2); // y2 sits in block 1
        b.var(m, tk, y1); // y1 sits in block 2
        let abp = b.finish();
        let swapped = y_cert(&[y1, y2], &[1, 2]);
        assert_eq!(
            swapped.validate(&abp).unwrap_err(),
            AbpError::ForeignBlockVar {
                step: 0,
                block: 1,
                var: y2.0
            }
        );
        // y1 is a declared block variable but occurs past the last cut.
        let tail = y_cert(&[y1], &[1]);
        assert_eq!(
            tail.validate(&abp).unwrap_err(),
            AbpError::TailSummationVar { step: 1, var: y1.0 }
        );
        assert_eq!(
            y_cert(&[y1, y2], &[2, 2]).validate(&abp).unwrap_err(),
            AbpError::BadCuts
        );
        assert_eq!(
            y_cert(&[y1, y1], &[1, 2]).validate(&abp).unwrap_err(),
            AbpError::DuplicateBlockVar(y1.0)
        );
        assert_eq!(
            y_cert(&[y1], &[1, 2]).validate(&abp).unwrap_err(),
            AbpError::CutVarMismatch { cuts: 2, vars: 1 }
        );
    }

    #[test]
    fn hadamard_matches_polynomial_hadamard() {
        let (_, x1, x2) = two_vars();
        let a = diamond(x1, x2);
        // b computes 2*x1*x2 via a single path.
        let mut bb = Builder::new();
        let s = bb.layer(1)[0];
        let m = bb.layer(1)[0];
        let t = bb.layer(1)[0];
        bb.edge(s, m, int(2), EdgeLabel::Var(x1));
        bb.var(m, t, x2);
        let b = bb.finish();
        let h = hadamard_abp(&a, &b);
        assert_eq!(
            h.expand().unwrap(),
            a.expand().unwrap().hadamard(&b.expand().unwrap())
        );
        assert!(h.size() <= a.size() * b.size());
    }

    #[test]
    fn hadamard_with_constant_edges() {
        let (_, x1, x2) = two_vars();
        // a = 3*x1 + x2 with a constant stretch; b = x1 + 5 (degree mix).
        let mut ab = Builder::new();
        let s = ab.layer(1)[0];
        let m = ab.layer(2);
        let t = ab.layer(1)[0];
        ab.edge(s, m[0], int(3), EdgeLabel::Var(x1));
        ab.var(s, m[1], x2);
        ab.edge(m[0], t, int(1), EdgeLabel::Const);
        ab.edge(m[1], t, int(1), EdgeLabel::Const);
        let a = ab.finish();

        let mut bb = Builder::new();
        let s = bb.layer(1)[0];
        let t = bb.layer(1)[0];
        bb.var(s, t, x1);
        bb.edge(s, t, int(5), EdgeLabel::Const);
        let b = bb.finish();

        let h = hadamard_abp(&a, &b);
        assert_eq!(
            h.expand().unwrap(),
            a.expand().unwrap().hadamard(&b.expand().unwrap())
        );
        assert!(h.size() <= a.size() * b.size());
    }

    #[test]
    fn hadamard_degenerate_factors() {
        let (_, x1, _) = two_vars();
        let unit = Abp::new(vec![vec![0]], Vec::new(), 0, 0).unwrap();
        let mut bb = Builder::new();
        let s = bb.layer(1)[0];
        let t = bb.layer(1)[0];
        bb.var(s, t, x1);
        bb.edge(s, t, rat(7, 2), EdgeLabel::Const);
        let b = bb.finish();
        // 1 ⊙ (x1 + 7/2) keeps only the constant term.
        let h = hadamard_abp(&unit, &b);
        assert_eq!(h.expand().unwrap(), NcPoly::constant(rat(7, 2)));
        let h2 = hadamard_abp(&b, &unit);
        assert_eq!(h2.expand().unwrap(), NcPoly::constant(rat(7, 2)));
        let hu = hadamard_abp(&unit, &unit);
        assert_eq!(hu.expand().unwrap(), NcPoly::one());
    }

    #[test]
    fn json_round_trip() {
        let (t, x1, x2) = two_vars();
        let abp = diamond(x1, x2);
        let v = abp.to_json(&t);
        let mut t2 = VarTable::new();
        let back = Abp::from_json(&v, &mut t2).unwrap();
        assert_eq!(back.size(), abp.size());
        assert_eq!(back.depth(), abp.depth());
        let p = back.expand().unwrap();
        assert_eq!(p.support_size(), 2);
        assert!(Abp::from_json(&json!({"layers": []}), &mut t2).is_err());
        let bad = json!({
            "layers": [[0], [1]],
            "edges": [{"from": 0, "to": 1, "coeff": "1/0", "var": null}],
            "source": 0,
            "sink": 1
        });
        assert!(Abp::from_json(&bad, &mut t2).is_err());
    }
}
