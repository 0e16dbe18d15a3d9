//! Per-verb oracle corpora behind `--selftest`.  Each function runs its
//! verb's module against an independent reference (brute force, direct
//! enumeration, or frozen hand-computed values) and returns the number of
//! cases checked; any mismatch is an error, which the caller turns into a
//! nonzero exit code.

use std::collections::HashMap;

use anyhow::{ensure, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cayley::abp::{exp_sum_readonce, hadamard_abp, Abp, Edge, EdgeLabel, NodeId, ReadOnceCertificate};
use cayley::circuit::{Circuit, CircuitBuilder};
use cayley::graph::{
    build_cperm_abp, cperm_brute, cut, interval_edges, near, EdgeWeight, Involution,
    LabeledDigraph, DEFAULT_COMPONENT_CAP,
};
use cayley::nisan::{abp_complexity, cut_experiment, hard_involution, nisan_ranks, random_involution};
use cayley::rational::{int, rat, Rational};
use cayley::sat::{count_sat, naive_count, Cnf, Literal};
use cayley::sym::{complete_graph, gen_sym, perm_via_hadamard, rank_one_cperm, SymVariant};
use cayley::{NcPoly, VarId, VarTable, Word};

fn all_involutions(n: usize) -> Vec<Involution> {
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

fn adjacent_involution(k: usize) -> Involution {
    Involution::from_pairs((0..k).map(|i| (2 * i as u32 + 1, 2 * i as u32 + 2)).collect())
        .unwrap()
}

fn edge_var(g: &LabeledDigraph, from: u32, to: u32) -> VarId {
    match g.weight(from, to).expect("edge exists") {
        EdgeWeight::Var(v) => *v,
        EdgeWeight::Const(_) => panic!("expected a variable label"),
    }
}

/// A layered program with a summation-variable certificate, mirrored from
/// the library's own test corpus: each of `m` blocks spans one or two
/// layer steps and owns variable `y_k`; an optional tail is y-free.
fn random_certified_abp(
    rng: &mut impl Rng,
    table: &mut VarTable,
) -> (Abp, ReadOnceCertificate, Vec<VarId>) {
    let m = rng.gen_range(1..=5);
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
                let coeff = int([-2, -1, 1, 2][rng.gen_range(0..4)]);
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
                edges.push(Edge { from, to, coeff, label });
            }
        }
    }
    let source = layers[0][0];
    let sink = *layers.last().unwrap().last().unwrap();
    let abp = Abp::new(layers, edges, source, sink).unwrap();
    let cert = ReadOnceCertificate { cuts, block_vars: ys.clone() };
    (abp, cert, ys)
}

fn expand_at(abp: &Abp, ys: &[VarId], mask: u64) -> NcPoly {
    let assign: HashMap<VarId, Rational> = ys
        .iter()
        .enumerate()
        .map(|(k, &y)| (y, int((mask >> k & 1) as i64)))
        .collect();
    abp.substitute(&assign).expand().unwrap()
}

fn random_circuit(rng: &mut impl Rng, max_size: usize, max_deg: usize, table: &mut VarTable) -> Circuit {
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
        let l = if rng.gen_bool(0.7) { b.len() - 1 } else { rng.gen_range(0..b.len()) };
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

fn all_words(alphabet: &[VarId], max_len: usize) -> Vec<Word> {
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

const EXPAND_CAP: usize = 1 << 20;

/// Product-form expansions of adjacent transposition graphs for k = 1..3
/// plus brute force against the compiled program on every n = 4 involution.
pub fn graph_polynomial(signed: bool) -> Result<usize> {
    let mut cases = 0;
    for k in 1..=3usize {
        let mut table = VarTable::new();
        let g = adjacent_involution(k).to_graph(&mut table);
        let got = cperm_brute(&g, signed);
        let mut expected = NcPoly::zero();
        for mask in 0u32..1 << k {
            let mut letters = Vec::new();
            for i in 0..k as u32 {
                let (a, b) = (2 * i + 1, 2 * i + 2);
                if mask >> i & 1 == 1 {
                    letters.push(edge_var(&g, a, b));
                    letters.push(edge_var(&g, b, a));
                } else {
                    letters.push(edge_var(&g, a, a));
                    letters.push(edge_var(&g, b, b));
                }
            }
            let sign = if signed && mask.count_ones() % 2 == 1 { int(-1) } else { int(1) };
            expected.add_term(Word::from_letters(letters), sign);
        }
        ensure!(got == expected, "product form mismatch at k = {k}");
        ensure!(got.support_size() == 1 << k, "expected {} terms", 1 << k);
        cases += 1;
    }
    for inv in all_involutions(4) {
        let mut table = VarTable::new();
        let g = inv.to_graph(&mut table);
        let brute = cperm_brute(&g, signed);
        let abp = build_cperm_abp(&g, signed, DEFAULT_COMPONENT_CAP)?;
        ensure!(abp.expand()? == brute, "program expansion disagrees with brute force");
        cases += 1;
    }
    Ok(cases)
}

/// Compiled-program expansion equals brute force on all involutions with
/// n = 4 and n = 6 (both parities) and on graphs without any cycle cover.
pub fn abp_build() -> Result<usize> {
    let mut cases = 0;
    for n in [4usize, 6] {
        for inv in all_involutions(n) {
            for signed in [false, true] {
                let mut table = VarTable::new();
                let g = inv.to_graph(&mut table);
                let abp = build_cperm_abp(&g, signed, DEFAULT_COMPONENT_CAP)?;
                ensure!(
                    abp.expand()? == cperm_brute(&g, signed),
                    "expansion disagrees with brute force at n = {n}"
                );
                cases += 1;
            }
        }
    }
    for src in ["3\n1 2 a\n2 1 b\n", "4\n1 2 a\n2 1 b\n2 4 c\n4 2 d\n3 3 e\n"] {
        let mut table = VarTable::new();
        let g = LabeledDigraph::parse_text(src, &mut table)?;
        let abp = build_cperm_abp(&g, false, DEFAULT_COMPONENT_CAP)?;
        ensure!(abp.expand()? == cperm_brute(&g, false), "coverless graph mismatch");
        cases += 1;
    }
    Ok(cases)
}

/// JSON round-trips: polynomial preserved and re-serialization
/// byte-identical.
pub fn abp_expand() -> Result<usize> {
    let mut programs = Vec::new();
    for inv in all_involutions(4) {
        let mut table = VarTable::new();
        let g = inv.to_graph(&mut table);
        programs.push((build_cperm_abp(&g, false, DEFAULT_COMPONENT_CAP)?, table));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..3 {
        let mut table = VarTable::new();
        let (abp, _, _) = random_certified_abp(&mut rng, &mut table);
        programs.push((abp, table));
    }
    let mut cases = 0;
    for (abp, table) in &programs {
        let json = serde_json::to_string(&abp.to_json(table))?;
        let mut fresh = VarTable::new();
        let back = Abp::from_json(&serde_json::from_str(&json)?, &mut fresh)?;
        let rendered = |p: &NcPoly, t: &VarTable| serde_json::to_string(&p.to_json(t)).unwrap();
        ensure!(
            rendered(&abp.expand()?, table) == rendered(&back.expand()?, &fresh),
            "round-tripped program expands differently"
        );
        ensure!(
            serde_json::to_string(&back.to_json(&fresh))? == json,
            "re-serialization is not byte-identical"
        );
        cases += 1;
    }
    Ok(cases)
}

/// Read-once summation equals the sum over all 0/1 assignments of the
/// certified variables, at no more than double the size.
pub fn abp_expsum() -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut cases = 0;
    for _ in 0..10 {
        let mut table = VarTable::new();
        let (abp, cert, ys) = random_certified_abp(&mut rng, &mut table);
        let summed = exp_sum_readonce(&abp, &cert)?;
        let mut oracle = NcPoly::zero();
        for mask in 0u64..1 << ys.len() {
            oracle = &oracle + &expand_at(&abp, &ys, mask);
        }
        ensure!(summed.expand()? == oracle, "summation disagrees with assignment enumeration");
        ensure!(summed.size() <= 2 * abp.size(), "summed program more than doubled");
        cases += 1;
    }
    Ok(cases)
}

/// Structural coefficient-wise product equals the polynomial-level one.
pub fn abp_hadamard() -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut cases = 0;
    for _ in 0..5 {
        let mut table = VarTable::new();
        let (a, _, _) = random_certified_abp(&mut rng, &mut table);
        let (b, _, _) = random_certified_abp(&mut rng, &mut table);
        let product = hadamard_abp(&a, &b);
        ensure!(
            product.expand()? == a.expand()?.hadamard(&b.expand()?),
            "coefficient-wise product mismatch"
        );
        ensure!(product.size() <= a.size() * b.size(), "product exceeds the size bound");
        cases += 1;
    }
    Ok(cases)
}

/// Monomial coefficients against full expansion on all words of length
/// up to three.
pub fn mcoeff() -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut cases = 0;
    for _ in 0..10 {
        let mut table = VarTable::new();
        let circuit = random_circuit(&mut rng, 12, 3, &mut table);
        let expansion = circuit.expand(EXPAND_CAP)?;
        for w in all_words(&circuit.vars(), 3) {
            ensure!(circuit.mcoeff(&w)? == expansion.coeff(&w), "coefficient mismatch");
        }
        cases += 1;
    }
    Ok(cases)
}

fn prefix_quotient(p: &NcPoly, w: &Word) -> NcPoly {
    let mut out = NcPoly::zero();
    for (u, c) in p.terms() {
        if u.len() >= w.len() && u.prefix(w.len()) == *w {
            out.add_term(u.suffix_from(w.len()), c.clone());
        }
    }
    out
}

/// Quotient circuits against the directly-computed prefix quotient on all
/// words of length up to two.
pub fn pcoeff() -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut cases = 0;
    for _ in 0..5 {
        let mut table = VarTable::new();
        let circuit = random_circuit(&mut rng, 11, 3, &mut table);
        let expansion = circuit.expand(EXPAND_CAP)?;
        for w in all_words(&circuit.vars(), 2) {
            let quotient = circuit.pcoeff_circuit(&w)?;
            ensure!(
                quotient.expand(EXPAND_CAP)? == prefix_quotient(&expansion, &w),
                "prefix quotient mismatch"
            );
        }
        cases += 1;
    }
    Ok(cases)
}

/// Indicator-grid circuit evaluated at encoded words equals direct
/// coefficient extraction, on and off the support.
pub fn pc_check() -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut cases = 0;
    for _ in 0..5 {
        let mut table = VarTable::new();
        let circuit = random_circuit(&mut rng, 11, 3, &mut table);
        let expansion = circuit.expand(EXPAND_CAP)?;
        let d = expansion.degree().max(1);
        let (pc, grid) = circuit.pc_circuit(d, &mut table)?;
        for w in all_words(&circuit.vars(), d) {
            if w.is_empty() {
                continue;
            }
            let assign = grid.encode(&w).expect("word fits the grid");
            ensure!(
                pc.eval_rational(&assign)? == expansion.coeff(&w),
                "grid evaluation disagrees with the coefficient"
            );
        }
        cases += 1;
    }
    Ok(cases)
}

/// Frozen split-rank profiles: a single transposition, two adjacent
/// transpositions, and the maximal-overlap involution on four points.
pub fn nisan() -> Result<usize> {
    let expect = |inv: &Involution, ranks: &[usize], b: usize| -> Result<()> {
        let mut table = VarTable::new();
        let f = cperm_brute(&inv.to_graph(&mut table), false);
        ensure!(nisan_ranks(&f)? == ranks, "rank profile mismatch");
        ensure!(abp_complexity(&f)? == b, "rank sum mismatch");
        Ok(())
    };
    expect(&Involution::from_permutation(&[2, 1])?, &[1, 2, 1], 4)?;
    expect(&adjacent_involution(2), &[1, 2, 1, 2, 1], 7)?;
    expect(&hard_involution(4)?, &[1, 2, 4, 2, 1], 10)?;
    Ok(3)
}

/// Frozen cut values plus the two interval lemmas on random involutions.
pub fn cut_lemmas() -> Result<usize> {
    ensure!(cut(&Involution::from_permutation(&[2, 1])?) == 1, "single transposition");
    ensure!(cut(&adjacent_involution(2)) == 1, "adjacent pairs overlap nothing");
    ensure!(cut(&hard_involution(4)?) == 2, "maximal overlap on four points");
    let mut cases = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let n = 2 * rng.gen_range(1..=15usize);
        let inv = random_involution(n, &mut rng)?;
        let mut table = VarTable::new();
        let g = inv.to_graph(&mut table);
        let c = cut(&inv);
        ensure!(c <= near(&g), "cut exceeds the component stretch");
        ensure!(c * n >= interval_edges(&inv), "cut below crossings / n");
        cases += 1;
    }
    Ok(cases)
}

/// Component label stretch on hand-built graphs.
pub fn near_values() -> Result<usize> {
    let mut table = VarTable::new();
    ensure!(near(&hard_involution(8)?.to_graph(&mut table)) == 4, "shift by four");
    ensure!(near(&adjacent_involution(4).to_graph(&mut table)) == 1, "adjacent pairs");
    let g = LabeledDigraph::parse_text("5\n1 3 a\n3 1 b\n4 5 c\n5 4 d\n", &mut table)?;
    ensure!(near(&g) == 2, "stretch of the {{1,3}} component");
    Ok(3)
}

/// The maximal-overlap involution pairs i with i + n/2 and has cut n/2.
pub fn hard() -> Result<usize> {
    for n in [2usize, 4, 6] {
        let inv = hard_involution(n)?;
        let expected: Vec<u32> = (1..=n as u32)
            .map(|i| if i <= (n / 2) as u32 { i + (n / 2) as u32 } else { i - (n / 2) as u32 })
            .collect();
        ensure!(inv.as_permutation() == expected, "wrong pairing at n = {n}");
        ensure!(cut(&inv) == n / 2, "wrong cut at n = {n}");
    }
    ensure!(hard_involution(5).is_err(), "odd n must be rejected");
    Ok(4)
}

/// Seeded runs are reproducible and internally consistent.
pub fn experiment() -> Result<usize> {
    let a = cut_experiment(20, 50, 1)?;
    let b = cut_experiment(20, 50, 1)?;
    ensure!(
        serde_json::to_value(&a)? == serde_json::to_value(&b)?,
        "same seed produced different reports"
    );
    ensure!(a.hits <= a.samples, "more hits than samples");
    ensure!(a.min_cut <= a.max_cut, "inverted cut range");
    ensure!((a.fraction - a.hits as f64 / a.samples as f64).abs() < 1e-12, "fraction mismatch");
    Ok(4)
}

fn clause_universe_two_vars() -> Vec<Vec<Literal>> {
    let lits: Vec<Literal> = (1..=2u32)
        .flat_map(|var| [true, false].into_iter().map(move |positive| Literal { var, positive }))
        .collect();
    let mut out: Vec<Vec<Literal>> = lits.iter().map(|&l| vec![l]).collect();
    for &a in &lits {
        for &b in &lits {
            if a.var < b.var {
                out.push(vec![a, b]);
            }
        }
    }
    out
}

/// Block-permanent model counts against the naive counter on every CNF
/// with at most two clauses from the two-variable universe, plus two
/// frozen instances.
pub fn satcount() -> Result<usize> {
    let universe = clause_universe_two_vars();
    let mut instances: Vec<Cnf> = vec![Cnf { m: 2, clauses: vec![] }];
    for i in 0..universe.len() {
        instances.push(Cnf { m: 2, clauses: vec![universe[i].clone()] });
        for j in i + 1..universe.len() {
            instances.push(Cnf { m: 2, clauses: vec![universe[i].clone(), universe[j].clone()] });
        }
    }
    let mut cases = 0;
    for cnf in &instances {
        ensure!(
            count_sat(cnf)? == naive_count(cnf)?,
            "block permanent disagrees with the naive counter"
        );
        cases += 1;
    }
    let or_clause = Cnf::parse_dimacs("p cnf 2 1\n1 2 0\n")?;
    ensure!(count_sat(&or_clause)? == 3, "x1 or x2 has three models");
    let contradiction = Cnf::parse_dimacs("p cnf 1 2\n1 0\n-1 0\n")?;
    ensure!(count_sat(&contradiction)? == 0, "x1 and not x1 has no model");
    Ok(cases + 2)
}

/// Pipeline and rank-one identities plus frozen symmetric polynomials.
pub fn sym() -> Result<usize> {
    let mut cases = 0;
    for n in [2usize, 3] {
        for signed in [false, true] {
            let mut table = VarTable::new();
            let pipeline = perm_via_hadamard(n, signed, &mut table)?;
            let brute = cperm_brute(&complete_graph(n, &mut table), signed);
            ensure!(pipeline == brute, "pipeline disagrees with brute force at n = {n}");
            cases += 1;
        }
    }
    for n in 1..=3usize {
        let mut table = VarTable::new();
        let (permanent, symmetric) = rank_one_cperm(n, &mut table)?;
        ensure!(permanent == symmetric, "rank-one identity fails at n = {n}");
        cases += 1;
    }

    let mut table = VarTable::new();
    let xs: Vec<VarId> = (1..=3).map(|i| table.intern(&format!("x{i}"))).collect();
    let word = |ids: &[VarId]| Word::from_letters(ids.to_vec());
    let mut cayley_expected = NcPoly::zero();
    for pair in [[xs[0], xs[1]], [xs[0], xs[2]], [xs[1], xs[2]]] {
        cayley_expected.add_term(word(&pair), int(1));
    }
    ensure!(
        gen_sym(SymVariant::Cayley, 3, 2, &mut table)? == cayley_expected,
        "ordered symmetric polynomial mismatch"
    );
    let nc = gen_sym(SymVariant::Nc, 3, 2, &mut table)?;
    ensure!(nc.support_size() == 6, "free symmetric polynomial has 3 * 2 terms");
    let mut snc_expected = NcPoly::zero();
    snc_expected.add_term(word(&[xs[0], xs[1]]), int(1));
    snc_expected.add_term(word(&[xs[1], xs[0]]), int(-1));
    ensure!(
        gen_sym(SymVariant::Snc, 2, 2, &mut table)? == snc_expected,
        "signed symmetric polynomial mismatch"
    );
    Ok(cases + 3)
}
