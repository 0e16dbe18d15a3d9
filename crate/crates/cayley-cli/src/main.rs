//! `cayley` — exact non-commutative permanents, branching programs,
//! coefficient extraction, rank lower bounds, and model counting.
//!
//! Machine-readable JSON goes to standard output; short human summaries go
//! to standard error.  Every report embeds the SHA-256 of each input file.
//! Exit code 0 means the computation succeeded and, for checking verbs,
//! the verdict was positive.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use cayley::abp::{exp_sum_readonce, hadamard_abp, Abp, ReadOnceCertificate};
use cayley::circuit::Circuit;
use cayley::graph::{
    build_cperm_abp, cperm_brute, cut, interval_edges, near, scc_sorted, Involution,
    LabeledDigraph, DEFAULT_COMPONENT_CAP,
};
use cayley::nisan::{abp_complexity, cut_experiment, hard_involution, nisan_ranks};
use cayley::rational::format_rational;
use cayley::sat::{barber_matrix, cnf_program, count_sat, Cnf};
use cayley::sym::{complete_graph, perm_via_hadamard, rank_one_cperm};
use cayley::{NcPoly, VarTable, Word};

mod selftest;

#[derive(Parser)]
#[command(name = "cayley", version, about = "Exact toolkit for ordered permanents, branching programs, and model counting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Row-ordered permanent of a labeled digraph, as a polynomial.
    Cperm(GraphArgs),
    /// Row-ordered determinant (covers weighted by permutation sign).
    Cdet(GraphArgs),
    /// Compile a digraph into a layered branching program.
    AbpBuild(AbpBuildArgs),
    /// Expand a branching program into its polynomial.
    AbpExpand(AbpFileArgs),
    /// Sum a certified program over all 0/1 assignments of its summation variables.
    AbpExpsum(ExpsumArgs),
    /// Coefficient-wise product of two branching programs.
    AbpHadamard(HadamardArgs),
    /// Coefficient of one word in a circuit's polynomial.
    Mcoeff(WordArgs),
    /// Quotient of a circuit's polynomial by a prefix word.
    Pcoeff(WordArgs),
    /// Verify the indicator-grid coefficient circuit against direct extraction.
    PcCheck(PcCheckArgs),
    /// Split-rank profile of a transposition graph's permanent.
    Nisan(InvolutionArgs),
    /// Interval statistics of a fixed-point-free involution.
    Cut(InvolutionArgs),
    /// Largest label stretch inside any strongly connected component.
    Near(GraphArgs),
    /// The maximal-overlap involution i <-> i + n/2.
    HardInvolution(HardArgs),
    /// Sample random involutions and report how many clear the cut threshold.
    InvolutionExperiment(ExperimentArgs),
    /// Exact model count of a CNF via the block-matrix permanent.
    Satcount(SatArgs),
    /// Check the symmetric-polynomial permanent identities.
    SymCheck(SymArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Graph file: vertex count, then `i j name` or `i j = num/den` lines.
    #[arg(long, required_unless_present = "selftest")]
    graph: Option<PathBuf>,
    /// Run this verb's oracle corpus instead of reading inputs.
    #[arg(long)]
    selftest: bool,
}

#[derive(Args)]
struct AbpBuildArgs {
    #[arg(long, required_unless_present = "selftest")]
    graph: Option<PathBuf>,
    /// Weight covers by permutation sign.
    #[arg(long)]
    signed: bool,
    /// Largest allowed strongly connected component.
    #[arg(long, default_value_t = DEFAULT_COMPONENT_CAP)]
    cap: usize,
    #[arg(long)]
    selftest: bool,
}

#[derive(Args)]
struct AbpFileArgs {
    /// Branching program JSON file.
    #[arg(long, required_unless_present = "selftest")]
    abp: Option<PathBuf>,
    #[arg(long)]
    selftest: bool,
}

#[derive(Args)]
struct ExpsumArgs {
    #[arg(long, required_unless_present = "selftest")]
    abp: Option<PathBuf>,
    /// Certificate JSON file: {"cuts": [...], "block_vars": [...]}.
    #[arg(long, required_unless_present = "selftest")]
    cert: Option<PathBuf>,
    #[arg(long)]
    selftest: bool,
}

#[derive(Args)]
struct HadamardArgs {
    #[arg(long, required_unless_present = "selftest")]
    left: Option<PathBuf>,
    #[arg(long, required_unless_present = "selftest")]
    right: Option<PathBuf>,
    #[arg(long)]
    selftest: bool,
}

#[derive(Args)]
struct WordArgs {
    /// Circuit JSON file.
    #[arg(long, required_unless_present = "selftest")]
    circuit: Option<PathBuf>,
    /// Query word: whitespace-separated variable names ("" for the empty word).
    #[arg(long, required_unless_present = "selftest")]
    word: Option<String>,
    #[arg(long)]
    selftest: bool,
}

#[derive(Args)]
struct PcCheckArgs {
    #[arg(long, required_unless_present = "selftest")]
    circuit: Option<PathBuf>,
    /// Word-length bound for the indicator grid (default: the formal degree).
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    selftest: bool,
}

#[derive(Args)]
struct InvolutionArgs {
    /// One-line permutation, e.g. "2 1 4 3".
    #[arg(long, required_unless_present = "selftest")]
    involution: Option<String>,
    #[arg(long)]
    selftest: bool,
}

#[derive(Args)]
struct HardArgs {
    #[arg(long, required_unless_present = "selftest")]
    n: Option<usize>,
    #[arg(long)]
    selftest: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, required_unless_present = "selftest")]
    n: Option<usize>,
    #[arg(long, required_unless_present = "selftest")]
    samples: Option<usize>,
    /// Random seed (required: runs are reproducible by construction).
    #[arg(long, required_unless_present = "selftest")]
    seed: Option<u64>,
    #[arg(long)]
    selftest: bool,
}

#[derive(Args)]
struct SatArgs {
    /// DIMACS CNF file.
    #[arg(long, required_unless_present = "selftest")]
    cnf: Option<PathBuf>,
    #[arg(long)]
    selftest: bool,
}

#[derive(Args)]
struct SymArgs {
    /// Which identity to check.
    #[arg(long, value_parser = ["hadamard", "rank-one"], required_unless_present = "selftest")]
    mode: Option<String>,
    #[arg(long, required_unless_present = "selftest")]
    n: Option<usize>,
    /// Use the sign-weighted variant (hadamard mode only).
    #[arg(long)]
    signed: bool,
    #[arg(long)]
    selftest: bool,
}

/// JSON report, one-line human summary, verdict.
type Report = (Value, String, bool);

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((value, summary, ok)) => {
            println!("{}", serde_json::to_string_pretty(&value).expect("report serializes"));
            eprintln!("{summary}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<Report> {
    match command {
        Command::Cperm(a) => graph_polynomial("cperm", false, a),
        Command::Cdet(a) => graph_polynomial("cdet", true, a),
        Command::AbpBuild(a) => abp_build(a),
        Command::AbpExpand(a) => abp_expand(a),
        Command::AbpExpsum(a) => abp_expsum(a),
        Command::AbpHadamard(a) => abp_hadamard_cmd(a),
        Command::Mcoeff(a) => mcoeff_cmd(a),
        Command::Pcoeff(a) => pcoeff_cmd(a),
        Command::PcCheck(a) => pc_check(a),
        Command::Nisan(a) => nisan_cmd(a),
        Command::Cut(a) => cut_cmd(a),
        Command::Near(a) => near_cmd(a),
        Command::HardInvolution(a) => hard_cmd(a),
        Command::InvolutionExperiment(a) => experiment_cmd(a),
        Command::Satcount(a) => satcount_cmd(a),
        Command::SymCheck(a) => sym_check(a),
    }
}

fn selftest_report(command: &str, cases: usize) -> Report {
    let value = json!({ "command": command, "selftest": true, "cases": cases, "ok": true });
    (value, format!("{command} selftest: {cases} cases ok"), true)
}

struct Input {
    text: String,
    meta: Value,
}

fn read_input(path: &Path) -> Result<Input> {
    let bytes =
        fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let digest = Sha256::digest(&bytes);
    let text = String::from_utf8(bytes)
        .with_context(|| format!("{} is not valid UTF-8", path.display()))?;
    Ok(Input {
        text,
        meta: json!({
            "path": path.display().to_string(),
            "sha256": format!("{digest:x}"),
        }),
    })
}

fn load_graph(path: &Path, table: &mut VarTable) -> Result<(LabeledDigraph, Value)> {
    let input = read_input(path)?;
    let g = LabeledDigraph::parse_text(&input.text, table)
        .with_context(|| format!("parsing graph {}", path.display()))?;
    Ok((g, input.meta))
}

fn load_abp(path: &Path, table: &mut VarTable) -> Result<(Abp, Value)> {
    let input = read_input(path)?;
    let value: Value = serde_json::from_str(&input.text)
        .with_context(|| format!("parsing JSON in {}", path.display()))?;
    let abp = Abp::from_json(&value, table)
        .with_context(|| format!("validating branching program {}", path.display()))?;
    Ok((abp, input.meta))
}

fn load_circuit(path: &Path, table: &mut VarTable) -> Result<(Circuit, Value)> {
    let input = read_input(path)?;
    let circuit = Circuit::from_json(&input.text, table)
        .with_context(|| format!("validating circuit {}", path.display()))?;
    Ok((circuit, input.meta))
}

fn parse_involution(s: &str) -> Result<Involution> {
    let values: Vec<u32> = s
        .split_whitespace()
        .map(|tok| {
            tok.parse()
                .with_context(|| format!("involution entry `{tok}` is not a positive integer"))
        })
        .collect::<Result<_>>()?;
    Ok(Involution::from_permutation(&values)?)
}

fn parse_word(s: &str, table: &mut VarTable) -> Word {
    Word::from_letters(s.split_whitespace().map(|name| table.intern(name)).collect())
}

fn poly_json(p: &NcPoly, table: &VarTable) -> Value {
    p.to_json(table)
}

fn graph_polynomial(command: &str, signed: bool, args: GraphArgs) -> Result<Report> {
    if args.selftest {
        return Ok(selftest_report(command, selftest::graph_polynomial(signed)?));
    }
    let path = args.graph.unwrap();
    let mut table = VarTable::new();
    let (g, meta) = load_graph(&path, &mut table)?;
    let p = cperm_brute(&g, signed);
    let value = json!({
        "command": command,
        "input": meta,
        "n": g.n(),
        "edge_count": g.edges().count(),
        "terms": p.support_size(),
        "polynomial": poly_json(&p, &table),
    });
    let summary = format!(
        "{command}: {} vertices, {} cover terms",
        g.n(),
        p.support_size()
    );
    Ok((value, summary, true))
}

fn abp_build(args: AbpBuildArgs) -> Result<Report> {
    if args.selftest {
        return Ok(selftest_report("abp-build", selftest::abp_build()?));
    }
    let path = args.graph.unwrap();
    let mut table = VarTable::new();
    let (g, meta) = load_graph(&path, &mut table)?;
    let abp = build_cperm_abp(&g, args.signed, args.cap)?;
    let value = json!({
        "command": "abp-build",
        "input": meta,
        "signed": args.signed,
        "cap": args.cap,
        "nodes": abp.size(),
        "depth": abp.depth(),
        "edge_count": abp.edges().len(),
        "abp": abp.to_json(&table),
    });
    let summary = format!(
        "abp-build: {} nodes, {} edges, depth {}",
        abp.size(),
        abp.edges().len(),
        abp.depth()
    );
    Ok((value, summary, true))
}

fn abp_expand(args: AbpFileArgs) -> Result<Report> {
    if args.selftest {
        return Ok(selftest_report("abp-expand", selftest::abp_expand()?));
    }
    let path = args.abp.unwrap();
    let mut table = VarTable::new();
    let (abp, meta) = load_abp(&path, &mut table)?;
    let p = abp.expand()?;
    let value = json!({
        "command": "abp-expand",
        "input": meta,
        "nodes": abp.size(),
        "terms": p.support_size(),
        "polynomial": poly_json(&p, &table),
    });
    let summary = format!("abp-expand: {} terms from {} nodes", p.support_size(), abp.size());
    Ok((value, summary, true))
}

fn load_certificate(path: &Path, table: &mut VarTable) -> Result<(ReadOnceCertificate, Value)> {
    let input = read_input(path)?;
    let value: Value = serde_json::from_str(&input.text)
        .with_context(|| format!("parsing JSON in {}", path.display()))?;
    let cuts = value
        .get("cuts")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("{}: missing `cuts` array", path.display()))?
        .iter()
        .map(|v| {
            v.as_u64()
                .map(|c| c as usize)
                .ok_or_else(|| anyhow!("{}: cuts must be non-negative integers", path.display()))
        })
        .collect::<Result<Vec<_>>>()?;
    let block_vars = value
        .get("block_vars")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("{}: missing `block_vars` array", path.display()))?
        .iter()
        .map(|v| {
            v.as_str()
                .map(|name| table.intern(name))
                .ok_or_else(|| anyhow!("{}: block_vars must be names", path.display()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((ReadOnceCertificate { cuts, block_vars }, input.meta))
}

fn abp_expsum(args: ExpsumArgs) -> Result<Report> {
    if args.selftest {
        return Ok(selftest_report("abp-expsum", selftest::abp_expsum()?));
    }
    let mut table = VarTable::new();
    let (abp, abp_meta) = load_abp(&args.abp.unwrap(), &mut table)?;
    let (cert, cert_meta) = load_certificate(&args.cert.unwrap(), &mut table)?;
    let summed = exp_sum_readonce(&abp, &cert)?;
    let value = json!({
        "command": "abp-expsum",
        "input": abp_meta,
        "certificate": cert_meta,
        "blocks": cert.cuts.len(),
        "input_nodes": abp.size(),
        "output_nodes": summed.size(),
        "abp": summed.to_json(&table),
    });
    let summary = format!(
        "abp-expsum: {} blocks eliminated, {} -> {} nodes",
        cert.cuts.len(),
        abp.size(),
        summed.size()
    );
    Ok((value, summary, true))
}

fn abp_hadamard_cmd(args: HadamardArgs) -> Result<Report> {
    if args.selftest {
        return Ok(selftest_report("abp-hadamard", selftest::abp_hadamard()?));
    }
    let mut table = VarTable::new();
    let (a, left_meta) = load_abp(&args.left.unwrap(), &mut table)?;
    let (b, right_meta) = load_abp(&args.right.unwrap(), &mut table)?;
    let product = hadamard_abp(&a, &b);
    let value = json!({
        "command": "abp-hadamard",
        "left": left_meta,
        "right": right_meta,
        "left_nodes": a.size(),
        "right_nodes": b.size(),
        "nodes": product.size(),
        "abp": product.to_json(&table),
    });
    let summary = format!(
        "abp-hadamard: {} x {} -> {} nodes",
        a.size(),
        b.size(),
        product.size()
    );
    Ok((value, summary, true))
}

fn mcoeff_cmd(args: WordArgs) -> Result<Report> {
    if args.selftest {
        return Ok(selftest_report("mcoeff", selftest::mcoeff()?));
    }
    let mut table = VarTable::new();
    let (circuit, meta) = load_circuit(&args.circuit.unwrap(), &mut table)?;
    let word = parse_word(&args.word.unwrap(), &mut table);
    let (coefficient, ops) = circuit.mcoeff_counted(&word)?;
    let value = json!({
        "command": "mcoeff",
        "input": meta,
        "word": word.letters().iter().map(|&v| table.name(v)).collect::<Vec<_>>(),
        "coefficient": format_rational(&coefficient),
        "ops": ops,
    });
    let summary = format!("mcoeff: {} ({} ring ops)", format_rational(&coefficient), ops);
    Ok((value, summary, true))
}

fn pcoeff_cmd(args: WordArgs) -> Result<Report> {
    if args.selftest {
        return Ok(selftest_report("pcoeff", selftest::pcoeff()?));
    }
    let mut table = VarTable::new();
    let (circuit, meta) = load_circuit(&args.circuit.unwrap(), &mut table)?;
    let word = parse_word(&args.word.unwrap(), &mut table);
    let quotient = circuit.pcoeff_circuit(&word)?;
    let expansion = quotient.expand(1 << 20)?;
    let value = json!({
        "command": "pcoeff",
        "input": meta,
        "word": word.letters().iter().map(|&v| table.name(v)).collect::<Vec<_>>(),
        "quotient_gates": quotient.size(),
        "terms": expansion.support_size(),
        "polynomial": poly_json(&expansion, &table),
    });
    let summary = format!(
        "pcoeff: quotient has {} terms ({} gates)",
        expansion.support_size(),
        quotient.size()
    );
    Ok((value, summary, true))
}

fn pc_check(args: PcCheckArgs) -> Result<Report> {
    if args.selftest {
        return Ok(selftest_report("pc-check", selftest::pc_check()?));
    }
    let mut table = VarTable::new();
    let (circuit, meta) = load_circuit(&args.circuit.unwrap(), &mut table)?;
    let degree = args.degree.unwrap_or_else(|| circuit.formal_degree().max(1));
    let (pc, grid) = circuit.pc_circuit(degree, &mut table)?;
    let expansion = circuit.expand(1 << 20)?;
    let mut checked = 0usize;
    let mut equal = true;
    for (w, c) in expansion.terms() {
        if w.is_empty() || w.len() > degree {
            continue;
        }
        let assign = grid
            .encode(w)
            .ok_or_else(|| anyhow!("support word uses a variable outside the grid"))?;
        checked += 1;
        if pc.eval_rational(&assign)? != *c {
            equal = false;
        }
    }
    // Adversarial probe: two markers in one row must kill the value.
    let xs = grid.xs().to_vec();
    if xs.len() >= 2 {
        let doubled = grid.assignment_with_ones(&[(1, xs[0]), (1, xs[1])]);
        checked += 1;
        if pc.eval_rational(&doubled)? != cayley::rational::int(0) {
            equal = false;
        }
    }
    let value = json!({
        "command": "pc-check",
        "input": meta,
        "degree": degree,
        "pc_gates": pc.size(),
        "checked_words": checked,
        "equal": equal,
    });
    let summary = format!(
        "pc-check: {} words checked against the grid circuit, equal: {equal}",
        checked
    );
    Ok((value, summary, equal))
}

fn nisan_cmd(args: InvolutionArgs) -> Result<Report> {
    if args.selftest {
        return Ok(selftest_report("nisan", selftest::nisan()?));
    }
    let spec = args.involution.unwrap();
    let inv = parse_involution(&spec)?;
    let mut table = VarTable::new();
    let g = inv.to_graph(&mut table);
    let f = cperm_brute(&g, false);
    let ranks = nisan_ranks(&f)?;
    let b = abp_complexity(&f)?;
    let value = json!({
        "command": "nisan",
        "involution": inv.as_permutation(),
        "n": inv.n(),
        "cut": cut(&inv),
        "near": near(&g),
        "ranks": ranks,
        "B": b,
        "log2_B": (b as f64).log2(),
    });
    let summary = format!("nisan: rank sum {b} across {} splits", ranks.len());
    Ok((value, summary, true))
}

fn cut_cmd(args: InvolutionArgs) -> Result<Report> {
    if args.selftest {
        return Ok(selftest_report("cut", selftest::cut_lemmas()?));
    }
    let spec = args.involution.unwrap();
    let inv = parse_involution(&spec)?;
    let mut table = VarTable::new();
    let g = inv.to_graph(&mut table);
    let value = json!({
        "command": "cut",
        "involution": inv.as_permutation(),
        "n": inv.n(),
        "cut": cut(&inv),
        "interval_edges": interval_edges(&inv),
        "near": near(&g),
    });
    let summary = format!("cut: {} (near {})", cut(&inv), near(&g));
    Ok((value, summary, true))
}

fn near_cmd(args: GraphArgs) -> Result<Report> {
    if args.selftest {
        return Ok(selftest_report("near", selftest::near_values()?));
    }
    let path = args.graph.unwrap();
    let mut table = VarTable::new();
    let (g, meta) = load_graph(&path, &mut table)?;
    let components: Vec<usize> = scc_sorted(&g).iter().map(Vec::len).collect();
    let value = json!({
        "command": "near",
        "input": meta,
        "n": g.n(),
        "component_sizes": components,
        "near": near(&g),
    });
    let summary = format!("near: {}", near(&g));
    Ok((value, summary, true))
}

fn hard_cmd(args: HardArgs) -> Result<Report> {
    if args.selftest {
        return Ok(selftest_report("hard-involution", selftest::hard()?));
    }
    let n = args.n.unwrap();
    let inv = hard_involution(n)?;
    let value = json!({
        "command": "hard-involution",
        "n": n,
        "permutation": inv.as_permutation(),
        "cut": cut(&inv),
    });
    let summary = format!("hard-involution: n = {n}, cut = {}", cut(&inv));
    Ok((value, summary, true))
}

fn experiment_cmd(args: ExperimentArgs) -> Result<Report> {
    if args.selftest {
        return Ok(selftest_report(
            "involution-experiment",
            selftest::experiment()?,
        ));
    }
    let (n, samples, seed) = (args.n.unwrap(), args.samples.unwrap(), args.seed.unwrap());
    let report = cut_experiment(n, samples, seed)?;
    let mut value = serde_json::to_value(&report)?;
    value
        .as_object_mut()
        .expect("experiment serializes to an object")
        .insert("command".into(), json!("involution-experiment"));
    let summary = format!(
        "involution-experiment: {}/{} samples at or above the threshold",
        report.hits, report.samples
    );
    Ok((value, summary, true))
}

fn satcount_cmd(args: SatArgs) -> Result<Report> {
    if args.selftest {
        return Ok(selftest_report("satcount", selftest::satcount()?));
    }
    let path = args.cnf.unwrap();
    let input = read_input(&path)?;
    let cnf = Cnf::parse_dimacs(&input.text)
        .with_context(|| format!("parsing CNF {}", path.display()))?;
    let count = count_sat(&cnf)?;
    let pp = cnf_program(&cnf);
    let bbm = barber_matrix(&pp, false);
    let value = json!({
        "command": "satcount",
        "input": input.meta,
        "variables": cnf.m,
        "clauses": cnf.clauses.len(),
        "count": count,
        "program_length": pp.len(),
        "block_order": bbm.order(),
        "max_cycle_len": bbm.max_cycle_len(),
    });
    let summary = format!(
        "satcount: {count} models ({}-instruction program, order-{} block matrix)",
        pp.len(),
        bbm.order()
    );
    Ok((value, summary, true))
}

fn sym_check(args: SymArgs) -> Result<Report> {
    if args.selftest {
        return Ok(selftest_report("sym-check", selftest::sym()?));
    }
    let mode = args.mode.unwrap();
    let n = args.n.unwrap();
    let mut table = VarTable::new();
    let (left_name, left, right_name, right) = match mode.as_str() {
        "hadamard" => {
            let pipeline = perm_via_hadamard(n, args.signed, &mut table)?;
            let brute = cperm_brute(&complete_graph(n, &mut table), args.signed);
            ("pipeline", pipeline, "brute", brute)
        }
        "rank-one" => {
            if args.signed {
                bail!("--signed applies to hadamard mode only");
            }
            let (permanent, symmetric) = rank_one_cperm(n, &mut table)?;
            ("permanent", permanent, "symmetric", symmetric)
        }
        other => bail!("unknown mode `{other}`"),
    };
    let equal = left == right;
    let value = json!({
        "command": "sym-check",
        "mode": mode,
        "n": n,
        "signed": args.signed,
        (left_name): poly_json(&left, &table),
        (right_name): poly_json(&right, &table),
        "equal": equal,
    });
    let summary = format!("sym-check {mode}: n = {n}, equal: {equal}");
    Ok((value, summary, equal))
}
