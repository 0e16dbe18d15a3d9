//! Exact #SAT through matrix product programs and block cyclic matrices.
//!
//! A CNF compiles to a straight-line "product program" over 2×2 rational
//! matrices: each instruction names an input bit and a pair of matrices,
//! and the program's value on an assignment is the ordered product of the
//! selected matrices.  Clause programs take values in a subgroup
//! isomorphic to the symmetric group on three letters (identity when the
//! clause is satisfied, a fixed 3-cycle `r` otherwise); sandwiching them
//! between idempotent projections `t` makes the whole program evaluate to
//! `t` exactly on satisfying assignments and to zero otherwise.
//!
//! Summing program values over all assignments is then a cycle-cover sum:
//! arrange the instructions as the diagonal of a matrix and add, per input
//! bit, one cycle through that bit's instructions.  Every cycle cover
//! picks, independently per bit, either the diagonal (bit = 0) or the
//! cycle (bit = 1), so the row-ordered block permanent equals the sum over
//! assignments, and the satisfying-assignment count sits in entry (1,1).

use std::collections::{BTreeMap, HashMap};

use num::traits::ToPrimitive;
use thiserror::Error;

use crate::matrix::RatMatrix;
use crate::rational::int;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SatError {
    #[error("cnf line {line}: expected {expected}")]
    ParseDimacs { line: usize, expected: String },
    #[error("bit {0} has no assigned value")]
    MissingBit(u32),
    #[error("{0} bit blocks would need 2^{0} cycle covers, above the cap of 2^24; use the naive counter")]
    TooManyBlocks(usize),
    #[error("assignment enumeration over {0} variables is too large")]
    TooManyVariables(u32),
}

/// A literal: variable index (1-based) and polarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Literal {
    pub var: u32,
    pub positive: bool,
}

impl Literal {
    pub fn satisfied_by(&self, value: bool) -> bool {
        value == self.positive
    }
}

/// Clauses are disjunctions of literals; an empty clause is unsatisfiable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    pub m: u32,
    pub clauses: Vec<Vec<Literal>>,
}

impl Cnf {
    /// Parses DIMACS text: a `p cnf <vars> <clauses>` header, then
    /// zero-terminated clauses; `c` lines are comments.
    pub fn parse_dimacs(src: &str) -> Result<Cnf, SatError> {
        let mut header: Option<(u32, usize)> = None;
        let mut clauses: Vec<Vec<Literal>> = Vec::new();
        let mut current: Vec<Literal> = Vec::new();
        let mut clause_open = false;
        let mut last_line = 0;
        for (line0, raw) in src.lines().enumerate() {
            let line = line0 + 1;
            last_line = line;
            let text = raw.trim();
            if text.is_empty() || text.starts_with('c') {
                continue;
            }
            if text.starts_with('p') {
                if header.is_some() {
                    return Err(SatError::ParseDimacs {
                        line,
                        expected: "a single `p cnf` header".into(),
                    });
                }
                let fields: Vec<&str> = text.split_whitespace().collect();
                match fields.as_slice() {
                    ["p", "cnf", m, k] => {
                        let m = m.parse().map_err(|_| SatError::ParseDimacs {
                            line,
                            expected: format!("variable count, found `{m}`"),
                        })?;
                        let k = k.parse().map_err(|_| SatError::ParseDimacs {
                            line,
                            expected: format!("clause count, found `{k}`"),
                        })?;
                        header = Some((m, k));
                    }
                    _ => {
                        return Err(SatError::ParseDimacs {
                            line,
                            expected: "`p cnf <vars> <clauses>`".into(),
                        })
                    }
                }
                continue;
            }
            let Some((m, _)) = header else {
                return Err(SatError::ParseDimacs {
                    line,
                    expected: "the `p cnf` header before any clause".into(),
                });
            };
            for tok in text.split_whitespace() {
                let lit: i64 = tok.parse().map_err(|_| SatError::ParseDimacs {
                    line,
                    expected: format!("integer literal, found `{tok}`"),
                })?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                    clause_open = false;
                    continue;
                }
                let var = lit.unsigned_abs() as u32;
                if var > m {
                    return Err(SatError::ParseDimacs {
                        line,
                        expected: format!("variable index at most {m}, found {lit}"),
                    });
                }
                current.push(Literal {
                    var,
                    positive: lit > 0,
                });
                clause_open = true;
            }
        }
        if clause_open {
            return Err(SatError::ParseDimacs {
                line: last_line,
                expected: "terminating 0 for the final clause".into(),
            });
        }
        let (m, k) = header.ok_or(SatError::ParseDimacs {
            line: last_line.max(1),
            expected: "a `p cnf` header".into(),
        })?;
        if clauses.len() != k {
            return Err(SatError::ParseDimacs {
                line: last_line.max(1),
                expected: format!("{k} clauses per the header, found {}", clauses.len()),
            });
        }
        Ok(Cnf { m, clauses })
    }

    pub fn satisfied_by(&self, bits: u64) -> bool {
        self.clauses.iter().all(|clause| {
            clause
                .iter()
                .any(|l| l.satisfied_by(bits >> (l.var - 1) & 1 == 1))
        })
    }
}

/// Brute-force model counter, the oracle for [`count_sat`].
pub fn naive_count(cnf: &Cnf) -> Result<u64, SatError> {
    if cnf.m > 30 {
        return Err(SatError::TooManyVariables(cnf.m));
    }
    Ok((0..1u64 << cnf.m)
        .filter(|&bits| cnf.satisfied_by(bits))
        .count() as u64)
}

/// The concrete 2×2 matrices generating a copy of the symmetric group on
/// three letters (`r` of order 3, `s` of order 2), plus the idempotent
/// projection `t` onto the first coordinate.
pub struct S3Elems {
    pub r: RatMatrix,
    pub s: RatMatrix,
    pub t: RatMatrix,
    pub id: RatMatrix,
}

impl S3Elems {
    pub fn new() -> Self {
        S3Elems {
            r: RatMatrix::from_i64(&[&[0, -1], &[1, -1]]),
            s: RatMatrix::from_i64(&[&[0, 1], &[1, 0]]),
            t: RatMatrix::from_i64(&[&[1, 0], &[0, 0]]),
            id: RatMatrix::identity(2),
        }
    }
}

impl Default for S3Elems {
    fn default() -> Self {
        Self::new()
    }
}

/// One step of a product program: consult `bit` and multiply `on_zero` or
/// `on_one`.
#[derive(Clone, Debug, PartialEq)]
pub struct Instruction {
    pub bit: u32,
    pub on_zero: RatMatrix,
    pub on_one: RatMatrix,
}

/// A start element and a sequence of bit-indexed matrix choices.  Bits
/// `1..=real_bits` are genuine inputs; higher indices are dummies carrying
/// constant factors (both branches equal), each used by exactly one
/// instruction.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductProgram {
    pub start: RatMatrix,
    pub instructions: Vec<Instruction>,
    pub real_bits: u32,
}

impl ProductProgram {
    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }
}

/// Ordered product selected by `bits`; dummy instructions (equal branches)
/// need no assignment.
pub fn eval_program(
    pp: &ProductProgram,
    bits: &HashMap<u32, bool>,
) -> Result<RatMatrix, SatError> {
    let mut acc = pp.start.clone();
    for ins in &pp.instructions {
        let chosen = match bits.get(&ins.bit) {
            Some(true) => &ins.on_one,
            Some(false) => &ins.on_zero,
            None if ins.on_zero == ins.on_one => &ins.on_zero,
            None => return Err(SatError::MissingBit(ins.bit)),
        };
        acc = acc.mul(chosen);
    }
    Ok(acc)
}

fn invert(m: &RatMatrix) -> RatMatrix {
    m.inverse().expect("program matrices are group elements")
}

/// Compiles a disjunction into a program of length `2^d + 2^{d-1} - 2`
/// over the group elements of [`S3Elems`], evaluating to the identity on
/// satisfying assignments and to `r` otherwise.  Negated literals swap the
/// branch pair.  The empty clause yields the instruction-free constant-`r`
/// program.
pub fn clause_program(clause: &[Literal]) -> ProductProgram {
    let g = S3Elems::new();
    let real_bits = clause.iter().map(|l| l.var).max().unwrap_or(0);
    if clause.is_empty() {
        return ProductProgram {
            start: g.r,
            instructions: Vec::new(),
            real_bits,
        };
    }
    // Peel literals from the back: the last literal conjugates the program
    // for the rest, doubling the length plus two.
    let mut instructions = vec![branch(clause[0], g.r.clone(), g.id.clone())];
    for &lit in &clause[1..] {
        let inner = instructions.clone();
        let inverse: Vec<Instruction> = inner
            .iter()
            .map(|i| Instruction {
                bit: i.bit,
                on_zero: invert(&i.on_zero),
                on_one: invert(&i.on_one),
            })
            .collect();
        let guard = branch(lit, g.s.clone(), g.id.clone());
        let mut next = vec![guard.clone()];
        next.extend(inner);
        next.push(guard);
        next.extend(inverse);
        instructions = next;
    }
    ProductProgram {
        start: g.id,
        instructions,
        real_bits,
    }
}

fn branch(lit: Literal, when_false: RatMatrix, when_true: RatMatrix) -> Instruction {
    let (on_zero, on_one) = if lit.positive {
        (when_false, when_true)
    } else {
        (when_true, when_false)
    };
    Instruction {
        bit: lit.var,
        on_zero,
        on_one,
    }
}

/// Glues clause programs with `t`-projections: the program computes `t`
/// exactly on satisfying assignments and the zero matrix otherwise.  Each
/// `t` (and the `r` of an empty clause) becomes a constant instruction on
/// a fresh dummy bit above `cnf.m`.
pub fn cnf_program(cnf: &Cnf) -> ProductProgram {
    let g = S3Elems::new();
    let mut instructions = Vec::new();
    let mut next_dummy = cnf.m;
    let mut dummy = |m: &RatMatrix| {
        next_dummy += 1;
        Instruction {
            bit: next_dummy,
            on_zero: m.clone(),
            on_one: m.clone(),
        }
    };
    for clause in &cnf.clauses {
        instructions.push(dummy(&g.t));
        if clause.is_empty() {
            instructions.push(dummy(&g.r));
        } else {
            instructions.extend(clause_program(clause).instructions);
        }
    }
    instructions.push(dummy(&g.t));
    ProductProgram {
        start: g.id,
        instructions,
        real_bits: cnf.m,
    }
}

/// Square matrix of 2×2 blocks: instruction `i`'s `on_zero` sits on the
/// diagonal and its `on_one` at the next position (cyclically) among the
/// instructions sharing its bit, so cycle covers choose one branch per
/// bit.  In signed mode the first shifted cell of each block carries
/// `(-1)^{len-1}`, cancelling the cover's permutation sign.
#[derive(Clone, Debug)]
pub struct BlockBarberMatrix {
    diag: Vec<RatMatrix>,
    shift: Vec<RatMatrix>,
    pi1: Vec<usize>,
    blocks: Vec<(u32, Vec<usize>)>,
    signed: bool,
    real_bits: u32,
}

/// Arranges a program's instructions into a [`BlockBarberMatrix`],
/// padding every bit's instruction set to size at least two.  Real bits
/// pad with identity branches (one pad for a singleton, two for an unread
/// bit, preserving both assignments of the bit); dummy singletons pad with
/// an identity diagonal and a zero cycle branch, so the constant is
/// counted exactly once.
pub fn barber_matrix(pp: &ProductProgram, signed: bool) -> BlockBarberMatrix {
    let mut instructions = pp.instructions.clone();
    let mut occurrences: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, ins) in instructions.iter().enumerate() {
        occurrences.entry(ins.bit).or_default().push(i);
    }
    for bit in 1..=pp.real_bits {
        occurrences.entry(bit).or_default();
    }
    let id = RatMatrix::identity(2);
    let zero = RatMatrix::zeros(2, 2);
    let pad = |instructions: &mut Vec<Instruction>, bit: u32, on_one: &RatMatrix| {
        instructions.push(Instruction {
            bit,
            on_zero: id.clone(),
            on_one: on_one.clone(),
        });
        instructions.len() - 1
    };
    for (&bit, members) in occurrences.iter_mut() {
        if bit <= pp.real_bits {
            while members.len() < 2 {
                members.push(pad(&mut instructions, bit, &id));
            }
        } else if members.len() < 2 {
            members.push(pad(&mut instructions, bit, &zero));
        }
    }
    let n = instructions.len();
    let mut pi1: Vec<usize> = (0..n).collect();
    let mut diag = Vec::with_capacity(n);
    let mut shift: Vec<RatMatrix> = instructions.iter().map(|i| i.on_one.clone()).collect();
    for ins in &instructions {
        diag.push(ins.on_zero.clone());
    }
    let blocks: Vec<(u32, Vec<usize>)> = occurrences.into_iter().collect();
    for (_, members) in &blocks {
        for (k, &i) in members.iter().enumerate() {
            pi1[i] = members[(k + 1) % members.len()];
        }
        if signed {
            let sign = if (members.len() - 1) % 2 == 0 {
                int(1)
            } else {
                int(-1)
            };
            let first = members[0];
            shift[first] = shift[first].scale(&sign);
        }
    }
    BlockBarberMatrix {
        diag,
        shift,
        pi1,
        blocks,
        signed,
        real_bits: pp.real_bits,
    }
}

impl BlockBarberMatrix {
    /// Number of 2×2 blocks per side.
    pub fn order(&self) -> usize {
        self.diag.len()
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    /// Per-bit instruction groups, ascending by bit, padding included.
    pub fn blocks(&self) -> &[(u32, Vec<usize>)] {
        &self.blocks
    }

    /// The block at row `i`, column `j` (zero where the pattern has no
    /// entry).
    pub fn entry(&self, i: usize, j: usize) -> RatMatrix {
        let mut out = RatMatrix::zeros(2, 2);
        if j == self.pi1[i] {
            out = out.add(&self.shift[i]);
        }
        if i == j {
            out = out.add(&self.diag[i]);
        }
        out
    }

    pub fn max_cycle_len(&self) -> usize {
        self.blocks.iter().map(|(_, m)| m.len()).max().unwrap_or(0)
    }

    /// Longest cycle among genuine input bits (dummies always have
    /// length 2).
    pub fn max_real_cycle_len(&self) -> usize {
        self.blocks
            .iter()
            .filter(|(bit, _)| *bit <= self.real_bits)
            .map(|(_, m)| m.len())
            .max()
            .unwrap_or(0)
    }

    fn cover_sum(&self, signed_covers: bool) -> Result<RatMatrix, SatError> {
        if self.blocks.len() > 24 {
            return Err(SatError::TooManyBlocks(self.blocks.len()));
        }
        let mut block_of = vec![0usize; self.order()];
        for (b, (_, members)) in self.blocks.iter().enumerate() {
            for &i in members {
                block_of[i] = b;
            }
        }
        let mut total = RatMatrix::zeros(2, 2);
        for choice in 0u32..1 << self.blocks.len() {
            let mut product = RatMatrix::identity(2);
            for i in 0..self.order() {
                let shifted = choice >> block_of[i] & 1 == 1;
                let factor = if shifted { &self.shift[i] } else { &self.diag[i] };
                if factor.is_zero() {
                    product = RatMatrix::zeros(2, 2);
                    break;
                }
                product = product.mul(factor);
            }
            if signed_covers {
                let mut sign = int(1);
                for (b, (_, members)) in self.blocks.iter().enumerate() {
                    if choice >> b & 1 == 1 && (members.len() - 1) % 2 == 1 {
                        sign = -sign;
                    }
                }
                product = product.scale(&sign);
            }
            total = total.add(&product);
        }
        Ok(total)
    }

    /// Row-ordered permanent: the sum over all cycle covers of the ordered
    /// block products.
    pub fn block_cperm(&self) -> Result<RatMatrix, SatError> {
        self.cover_sum(false)
    }

    /// Row-ordered determinant: covers additionally weighted by their
    /// permutation sign.
    pub fn block_cdet(&self) -> Result<RatMatrix, SatError> {
        self.cover_sum(true)
    }
}

/// Exact model count: compile the CNF, arrange the blocks, take the
/// permanent, and read entry (1,1).
pub fn count_sat(cnf: &Cnf) -> Result<u64, SatError> {
    let pp = cnf_program(cnf);
    let bbm = barber_matrix(&pp, false);
    let total = pp.start.mul(&bbm.block_cperm()?);
    let count = total[(0, 0)].clone();
    debug_assert!(count.is_integer());
    Ok(count
        .to_integer()
        .to_u64()
        .expect("satisfying-assignment count fits in 64 bits"))
}

/// Sums `eval_program` over all assignments of the real bits — the
/// definitional left side of the permanent identity.
pub fn assignment_sum(pp: &ProductProgram) -> Result<RatMatrix, SatError> {
    if pp.real_bits > 24 {
        return Err(SatError::TooManyVariables(pp.real_bits));
    }
    let mut total = RatMatrix::zeros(pp.start.rows(), pp.start.cols());
    for e in 0u64..1 << pp.real_bits {
        let bits: HashMap<u32, bool> =
            (1..=pp.real_bits).map(|b| (b, e >> (b - 1) & 1 == 1)).collect();
        total = total.add(&eval_program(pp, &bits)?);
    }
    Ok(total)
}
