#![allow(dead_code)]

use std::collections::HashMap;

use rand::Rng;

use cayley::abp::{Abp, Edge, EdgeLabel, NodeId, ReadOnceCertificate};
use cayley::circuit::{Circuit, CircuitBuilder};
use cayley::graph::{EdgeWeight, Involution, LabeledDigraph};
use cayley::rational::{int, rat, Rational};
use cayley::sat::{Cnf, Literal};
use cayley::{VarId, VarTable, Word};

/// Every fixed-point-free involution on `1..=n` (empty for odd `n`).
pub fn all_involutions(n: usize) -> Vec<Involution> {
    fn rec(free: &mut Vec<u32>, pairs: &mut Vec<(u32, u32)>, out: &mut Vec<Involution>) {
        if free.is_empty() {
            out.push(Involution::from_pairs(pairs.clone()).unwrap());
            return;
        }
        let a = free.remove(0);
        for idx in 0..free.len() {
            let b = free.remove(idx);
            pairs.push((a, b));
            rec(free, pairs, out);
            pairs.pop();
            free.insert(idx, b);
        }
        free.insert(0, a);
    }
    if n % 2 != 0 {
        return Vec::new();
    }
    let mut free: Vec<u32> = (1..=n as u32).collect();
    let mut out = Vec::new();
    rec(&mut free, &mut Vec::new(), &mut out);
    out
}

/// Random digraph whose strongly connected components have at most
/// `comp_cap` vertices: in-group edges are free-form, cross-group edges
/// only point forward.  Every edge carries a fresh variable.
pub fn random_component_graph(
    rng: &mut impl Rng,
    max_n: usize,
    comp_cap: usize,
    table: &mut VarTable,
) -> LabeledDigraph {
    let n = rng.gen_range(2..=max_n);
    let mut groups: Vec<Vec<u32>> = Vec::new();
    let mut v = 1u32;
    while (v as usize) <= n {
        let take = rng.gen_range(1..=comp_cap.min(n - v as usize + 1));
        groups.push((v..v + take as u32).collect());
        v += take as u32;
    }
    let mut g = LabeledDigraph::new(n);
    let add = |g: &mut LabeledDigraph, from: u32, to: u32, table: &mut VarTable| {
        let var = table.intern(&format!("e{from}_{to}"));
        g.add_edge(from, to, EdgeWeight::Var(var)).unwrap();
    };
    for (gi, group) in groups.iter().enumerate() {
        for &a in group {
            for &b in group {
                if rng.gen_bool(0.7) {
                    add(&mut g, a, b, table);
                }
            }
        }
        for later in &groups[gi + 1..] {
            for &a in group {
                for &b in later {
                    if rng.gen_bool(0.25) {
                        add(&mut g, a, b, table);
                    }
                }
            }
        }
    }
    g
}

/// A layered program with its summation-variable certificate: `m` blocks
/// of one or two layer steps each, whose block variable may appear only on
/// its own steps, followed by a block-variable-free tail.
pub fn random_certified_abp(
    rng: &mut impl Rng,
    table: &mut VarTable,
) -> (Abp, ReadOnceCertificate, Vec<VarId>) {
    let m = rng.gen_range(1..=6);
    let xs: Vec<VarId> = (1..=3).map(|i| table.intern(&format!("x{i}"))).collect();
    let ys: Vec<VarId> = (1..=m).map(|k| table.intern(&format!("y{k}"))).collect();
    let mut widths = vec![1usize];
    let mut cuts = Vec::new();
    for _ in 0..m {
        for _ in 0..rng.gen_range(1..=2) {
            widths.push(rng.gen_range(1..=2));
        }
        cuts.push(widths.len() - 1);
    }
    if rng.gen_bool(0.5) {
        widths.push(rng.gen_range(1..=2));
    }
    widths.push(1);

    let mut layers: Vec<Vec<NodeId>> = Vec::new();
    let mut next: NodeId = 0;
    for &w in &widths {
        layers.push((next..next + w as NodeId).collect());
        next += w as NodeId;
    }
    let block_of_step = |step: usize| -> Option<usize> {
        let mut lo = 0;
        for (k, &hi) in cuts.iter().enumerate() {
            if step >= lo && step < hi {
                return Some(k);
            }
            lo = hi;
        }
        None
    };
    let mut edges = Vec::new();
    for step in 0..widths.len() - 1 {
        for &from in &layers[step] {
            for &to in &layers[step + 1] {
                let coeff = int(*[-2, -1, 1, 2][..].get(rng.gen_range(0..4)).unwrap());
                let label = match block_of_step(step) {
                    Some(k) if rng.gen_bool(0.5) => EdgeLabel::Var(ys[k]),
                    _ => {
                        if rng.gen_bool(0.5) {
                            EdgeLabel::Var(xs[rng.gen_range(0..xs.len())])
                        } else {
                            EdgeLabel::Const
                        }
                    }
                };
                edges.push(Edge {
                    from,
                    to,
                    coeff,
                    label,
                });
            }
        }
    }
    let source = layers[0][0];
    let sink = *layers.last().unwrap().last().unwrap();
    let abp = Abp::new(layers, edges, source, sink).unwrap();
    let cert = ReadOnceCertificate {
        cuts,
        block_vars: ys.clone(),
    };
    (abp, cert, ys)
}

/// Random circuit over at most three variables with formal degree capped
/// at `max_deg` and at most `max_size` gates.
pub fn random_circuit(
    rng: &mut impl Rng,
    max_size: usize,
    max_deg: usize,
    table: &mut VarTable,
) -> Circuit {
    let xs: Vec<VarId> = (1..=3).map(|i| table.intern(&format!("x{i}"))).collect();
    let mut b = CircuitBuilder::new();
    let mut degs: Vec<usize> = Vec::new();
    for &x in &xs {
        b.var(x);
        degs.push(1);
    }
    for c in [int(1), int(-1), int(2), rat(1, 2)] {
        b.constant(c);
        degs.push(0);
    }
    let target = rng.gen_range(degs.len() + 2..=max_size);
    while b.len() < target {
        // Chain through the previous gate most of the time so the output
        // gate reaches a substantial part of the circuit.
        let l = if rng.gen_bool(0.7) {
            b.len() - 1
        } else {
            rng.gen_range(0..b.len())
        };
        let r = rng.gen_range(0..b.len());
        if rng.gen_bool(0.5) && degs[l] + degs[r] <= max_deg {
            b.mul(l, r);
            degs.push(degs[l] + degs[r]);
        } else {
            b.add(l, r);
            degs.push(degs[l].max(degs[r]));
        }
    }
    let output = b.len() - 1;
    b.finish(output)
}

/// All words over `alphabet` of length `0..=max_len`.
pub fn all_words(alphabet: &[VarId], max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut frontier = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for &x in alphabet {
                let mut extended = w.clone();
                extended.push(x);
                out.push(extended.clone());
                next.push(extended);
            }
        }
        frontier = next;
    }
    out
}

/// Random CNF with at most `max_vars` variables and `max_clauses` clauses
/// of width one or two, no variable occurring in more than three clauses.
pub fn random_bounded_cnf(rng: &mut impl Rng, max_vars: u32, max_clauses: usize) -> Cnf {
    let m = rng.gen_range(1..=max_vars);
    let k = rng.gen_range(0..=max_clauses);
    let mut budget: HashMap<u32, usize> = (1..=m).map(|v| (v, 3)).collect();
    let mut clauses = Vec::new();
    for _ in 0..k {
        let available: Vec<u32> = budget
            .iter()
            .filter(|(_, &left)| left > 0)
            .map(|(&v, _)| v)
            .collect();
        if available.is_empty() {
            break;
        }
        let width = rng.gen_range(1..=2.min(available.len()));
        let mut vars = Vec::new();
        while vars.len() < width {
            let v = available[rng.gen_range(0..available.len())];
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        let clause: Vec<Literal> = vars
            .into_iter()
            .map(|var| {
                *budget.get_mut(&var).unwrap() -= 1;
                Literal {
                    var,
                    positive: rng.gen_bool(0.5),
                }
            })
            .collect();
        clauses.push(clause);
    }
    Cnf { m, clauses }
}

/// Substitutes 0/1 values for `ys` per the bits of `mask` and fully
/// expands.
pub fn expand_at(abp: &Abp, ys: &[VarId], mask: u64) -> cayley::NcPoly {
    let assign: HashMap<VarId, Rational> = ys
        .iter()
        .enumerate()
        .map(|(k, &y)| (y, int((mask >> k & 1) as i64)))
        .collect();
    abp.substitute(&assign).expand().unwrap()
}
