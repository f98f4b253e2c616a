//! Dense state-vector simulation of the NOT / CONTROL-NOT gate set plus the
//! block operators used by the particle-propagation circuit.
//!
//! Qubits are numbered from 0. Qubit 0 is the most significant bit of the
//! amplitude index, so the basis state of the word `x_0 x_1 .. x_{n-1}` has
//! index `word_to_index(x)`. The text gate-list format uses 1-based qubit
//! numbers.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::bits::{self, Bit};
use crate::error::{Error, Result};
use crate::operator::{Operator, SparseOperator, C64, ONE, ZERO};

/// Largest register held as a dense amplitude vector.
pub const MAX_QUBITS: usize = 24;

/// Default limit for [`circuit_matrix`].
pub const DENSE_MATRIX_QUBITS: usize = 14;

/// Amplitudes over `n` qubits. Not necessarily normalized: block resets and
/// the transition operator do not preserve the norm.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::AmplitudeLength {
                expected: 1 << n_qubits,
                found: amps.len(),
            });
        }
        Ok(StateVector { n_qubits, amps })
    }

    /// The zero vector (not a state, but the result of annihilation).
    pub fn zero_vector(n_qubits: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        Ok(StateVector {
            n_qubits,
            amps: vec![ZERO; 1 << n_qubits],
        })
    }

    pub fn from_index(n_qubits: usize, index: usize) -> Result<Self> {
        let mut s = StateVector::zero_vector(n_qubits)?;
        if index >= s.amps.len() {
            return Err(Error::Invalid(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        s.amps[index] = ONE;
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        assert_eq!(self.n_qubits, other.n_qubits, "qubit count mismatch");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `alpha · self + beta · other`.
    pub fn combine(&self, alpha: C64, other: &StateVector, beta: C64) -> StateVector {
        assert_eq!(self.n_qubits, other.n_qubits, "qubit count mismatch");
        StateVector {
            n_qubits: self.n_qubits,
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        }
    }

    pub fn scaled(&self, s: C64) -> StateVector {
        StateVector {
            n_qubits: self.n_qubits,
            amps: self.amps.iter().map(|a| a * s).collect(),
        }
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        assert_eq!(self.n_qubits, other.n_qubits, "qubit count mismatch");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Indices with a nonzero amplitude, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.amps.len()).filter(|&i| self.amps[i] != ZERO).collect()
    }

    /// The basis index when the state is exactly one basis vector with
    /// amplitude 1.
    pub fn as_basis_index(&self) -> Option<usize> {
        let i = self.amps.iter().position(|&a| a != ZERO)?;
        let rest_zero = self.amps[i + 1..].iter().all(|&a| a == ZERO);
        (self.amps[i] == ONE && rest_zero).then_some(i)
    }

    /// One `index re im` line per nonzero amplitude, ascending index.
    pub fn to_export_text(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.amps.iter().enumerate() {
            if *a != ZERO {
                writeln!(out, "{i} {:.16e} {:.16e}", a.re, a.im).unwrap();
            }
        }
        out
    }

    pub fn apply_not(&self, q: usize) -> Result<StateVector> {
        let mut s = self.clone();
        s.apply_not_in_place(q)?;
        Ok(s)
    }

    pub fn apply_cn(&self, control: usize, target: usize) -> Result<StateVector> {
        let mut s = self.clone();
        s.apply_cn_in_place(control, target)?;
        Ok(s)
    }

    pub fn apply_collective_cn(
        &self,
        control_start: usize,
        target_start: usize,
        len: usize,
    ) -> Result<StateVector> {
        let mut s = self.clone();
        s.apply_collective_cn_in_place(control_start, target_start, len)?;
        Ok(s)
    }

    pub fn apply_block_reset(
        &self,
        start: usize,
        len: usize,
        variant: ResetVariant,
    ) -> Result<StateVector> {
        let mut s = self.clone();
        s.apply_block_reset_in_place(start, len, variant)?;
        Ok(s)
    }

    pub fn apply_circuit(&self, circuit: &Circuit) -> Result<StateVector> {
        let mut s = self.clone();
        s.apply_circuit_in_place(circuit)?;
        Ok(s)
    }

    pub fn apply_not_in_place(&mut self, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        let stride = self.mask(q);
        for chunk in self.amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = chunk.split_at_mut(stride);
            lo.swap_with_slice(hi);
        }
        Ok(())
    }

    pub fn apply_cn_in_place(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::SameControlTarget(control));
        }
        let cmask = self.mask(control);
        let tmask = self.mask(target);
        let (m1, m2) = if cmask < tmask { (cmask, tmask) } else { (tmask, cmask) };
        for k in 0..self.amps.len() / 4 {
            let base = insert_zero_bit(insert_zero_bit(k, m1), m2) | cmask;
            self.amps.swap(base, base | tmask);
        }
        Ok(())
    }

    pub fn apply_collective_cn_in_place(
        &mut self,
        control_start: usize,
        target_start: usize,
        len: usize,
    ) -> Result<()> {
        check_blocks(self.n_qubits, control_start, target_start, len)?;
        // one permutation pass: |c, t⟩ -> |c, t ^ c⟩
        let block = (1usize << len) - 1;
        let cshift = self.n_qubits - control_start - len;
        let tshift = self.n_qubits - target_start - len;
        for i in 0..self.amps.len() {
            let c = (i >> cshift) & block;
            let j = i ^ (c << tshift);
            if i < j {
                self.amps.swap(i, j);
            }
        }
        Ok(())
    }

    /// Collective CNs from one control block onto several target blocks,
    /// fused into a single pass. Equal to applying them one after another in
    /// any order.
    pub fn apply_fanout_in_place(
        &mut self,
        control_start: usize,
        target_starts: &[usize],
        len: usize,
    ) -> Result<()> {
        for &t in target_starts {
            check_blocks(self.n_qubits, control_start, t, len)?;
        }
        let block = (1usize << len) - 1;
        let cshift = self.n_qubits - control_start - len;
        let flips: Vec<usize> = (0..=block)
            .map(|c| {
                target_starts
                    .iter()
                    .fold(0, |acc, &t| acc ^ (c << (self.n_qubits - t - len)))
            })
            .collect();
        for i in 0..self.amps.len() {
            let j = i ^ flips[(i >> cshift) & block];
            if i < j {
                self.amps.swap(i, j);
            }
        }
        Ok(())
    }

    /// Overwrites the state with the basis vector `index`.
    pub fn set_basis(&mut self, index: usize) -> Result<()> {
        if index >= self.amps.len() {
            return Err(Error::Invalid(format!("basis index {index} out of range")));
        }
        self.amps.fill(ZERO);
        self.amps[index] = ONE;
        Ok(())
    }

    pub fn apply_block_reset_in_place(
        &mut self,
        start: usize,
        len: usize,
        variant: ResetVariant,
    ) -> Result<()> {
        check_block(self.n_qubits, start, len)?;
        let shift = self.n_qubits - start - len;
        let block_mask = ((1usize << len) - 1) << shift;
        let first = match variant {
            ResetVariant::PaperLiteral => 1,
            ResetVariant::Extended => 0,
        };
        for base in 0..self.amps.len() {
            if base & block_mask != 0 {
                continue;
            }
            let mut sum = ZERO;
            for b in first..1usize << len {
                let i = base | (b << shift);
                sum += self.amps[i];
                self.amps[i] = ZERO;
            }
            self.amps[base] = sum;
        }
        Ok(())
    }

    pub fn apply_op_in_place(&mut self, op: &GateOp) -> Result<()> {
        match *op {
            GateOp::Not(q) => self.apply_not_in_place(q),
            GateOp::Cn { control, target } => self.apply_cn_in_place(control, target),
            GateOp::CollectiveCn {
                control_start,
                target_start,
                len,
            } => self.apply_collective_cn_in_place(control_start, target_start, len),
            GateOp::BlockReset {
                start,
                len,
                variant,
            } => self.apply_block_reset_in_place(start, len, variant),
        }
    }

    pub fn apply_circuit_in_place(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits != self.n_qubits {
            return Err(Error::QubitCountMismatch {
                expected: circuit.n_qubits,
                found: self.n_qubits,
            });
        }
        for op in &circuit.ops {
            self.apply_op_in_place(op)?;
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    #[inline]
    fn mask(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }
}

/// Inserts a zero at the single set bit of `mask`, shifting higher bits up.
#[inline]
fn insert_zero_bit(k: usize, mask: usize) -> usize {
    let low = k & (mask - 1);
    ((k ^ low) << 1) | low
}

fn check_qubit_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Invalid("a register needs at least one qubit".into()));
    }
    if n > MAX_QUBITS {
        return Err(Error::DimensionTooLarge {
            n_qubits: n,
            limit: MAX_QUBITS,
        });
    }
    Ok(())
}

fn check_block(n_qubits: usize, start: usize, len: usize) -> Result<()> {
    if len == 0 {
        return Err(Error::EmptyBlock);
    }
    if start + len > n_qubits {
        return Err(Error::QubitOutOfRange {
            qubit: start + len - 1,
            n_qubits,
        });
    }
    Ok(())
}

fn check_blocks(n_qubits: usize, control: usize, target: usize, len: usize) -> Result<()> {
    check_block(n_qubits, control, len)?;
    check_block(n_qubits, target, len)?;
    if control < target + len && target < control + len {
        return Err(Error::OverlappingBlocks {
            control,
            target,
            len,
        });
    }
    Ok(())
}

/// Computational basis vector of a bit word (first bit most significant).
pub fn basis_state(word: &[Bit]) -> Result<StateVector> {
    if word.is_empty() {
        return Err(Error::Invalid("empty bit sequence".into()));
    }
    StateVector::from_index(word.len(), bits::word_to_index(word))
}

/// Equal-weight superposition of every nonzero basis word, with unit norm
/// (coefficient `1 / sqrt(2^n - 1)`).
pub fn uniform_superposition_nonnull(n_qubits: usize) -> Result<StateVector> {
    let mut s = StateVector::zero_vector(n_qubits)?;
    let c = C64::new(1.0 / ((s.dim() - 1) as f64).sqrt(), 0.0);
    for a in s.amps.iter_mut().skip(1) {
        *a = c;
    }
    Ok(s)
}

/// Which terms the block reset keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResetVariant {
    /// `Σ_{x ≠ 0} |0⟩⟨x|`: a block that is already null is annihilated.
    PaperLiteral,
    /// `Σ_x |0⟩⟨x|`: a null block is left alone.
    Extended,
}

impl ResetVariant {
    pub fn name(&self) -> &'static str {
        match self {
            ResetVariant::PaperLiteral => "literal",
            ResetVariant::Extended => "extended",
        }
    }
}

impl FromStr for ResetVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(ResetVariant::PaperLiteral),
            "extended" => Ok(ResetVariant::Extended),
            other => Err(Error::Invalid(format!("unknown reset variant {other:?}"))),
        }
    }
}

impl fmt::Display for ResetVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One circuit instruction. Qubit and block-start indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateOp {
    Not(usize),
    Cn {
        control: usize,
        target: usize,
    },
    /// Qubit-wise CN from the block at `control_start` onto the block at
    /// `target_start`.
    CollectiveCn {
        control_start: usize,
        target_start: usize,
        len: usize,
    },
    BlockReset {
        start: usize,
        len: usize,
        variant: ResetVariant,
    },
}

impl GateOp {
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let qubit = |q: usize| {
            if q >= n_qubits {
                Err(Error::QubitOutOfRange { qubit: q, n_qubits })
            } else {
                Ok(())
            }
        };
        match *self {
            GateOp::Not(q) => qubit(q),
            GateOp::Cn { control, target } => {
                qubit(control)?;
                qubit(target)?;
                if control == target {
                    return Err(Error::SameControlTarget(control));
                }
                Ok(())
            }
            GateOp::CollectiveCn {
                control_start,
                target_start,
                len,
            } => check_blocks(n_qubits, control_start, target_start, len),
            GateOp::BlockReset { start, len, .. } => check_block(n_qubits, start, len),
        }
    }

    /// Same gate with every qubit index moved by `k`.
    pub fn shifted(&self, k: usize) -> GateOp {
        match *self {
            GateOp::Not(q) => GateOp::Not(q + k),
            GateOp::Cn { control, target } => GateOp::Cn {
                control: control + k,
                target: target + k,
            },
            GateOp::CollectiveCn {
                control_start,
                target_start,
                len,
            } => GateOp::CollectiveCn {
                control_start: control_start + k,
                target_start: target_start + k,
                len,
            },
            GateOp::BlockReset {
                start,
                len,
                variant,
            } => GateOp::BlockReset {
                start: start + k,
                len,
                variant,
            },
        }
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(self, GateOp::BlockReset { .. })
    }

    fn max_qubit(&self) -> usize {
        match *self {
            GateOp::Not(q) => q,
            GateOp::Cn { control, target } => control.max(target),
            GateOp::CollectiveCn {
                control_start,
                target_start,
                len,
            } => control_start.max(target_start) + len.max(1) - 1,
            GateOp::BlockReset { start, len, .. } => start + len.max(1) - 1,
        }
    }
}

impl fmt::Display for GateOp {
    /// Gate-list line, 1-based.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GateOp::Not(q) => write!(f, "X {}", q + 1),
            GateOp::Cn { control, target } => write!(f, "CN {} {}", control + 1, target + 1),
            GateOp::CollectiveCn {
                control_start,
                target_start,
                len,
            } => write!(f, "CCN {} {} {}", control_start + 1, target_start + 1, len),
            GateOp::BlockReset {
                start,
                len,
                variant,
            } => write!(f, "RESET {} {} {}", start + 1, len, variant),
        }
    }
}

/// Gates applied in order, first element first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(n_qubits: usize, ops: Vec<GateOp>) -> Result<Self> {
        for op in &ops {
            op.validate(n_qubits)?;
        }
        Ok(Circuit { n_qubits, ops })
    }

    pub fn empty(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            ops: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.validate(self.n_qubits)?;
        self.ops.push(op);
        Ok(())
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Circuit) -> Result<Circuit> {
        if next.n_qubits != self.n_qubits {
            return Err(Error::QubitCountMismatch {
                expected: self.n_qubits,
                found: next.n_qubits,
            });
        }
        let mut ops = self.ops.clone();
        ops.extend_from_slice(&next.ops);
        Ok(Circuit {
            n_qubits: self.n_qubits,
            ops,
        })
    }

    pub fn is_unitary(&self) -> bool {
        self.ops.iter().all(GateOp::is_unitary)
    }
}

/// Matrix of `circuit`, built by applying it to every basis vector.
pub fn circuit_matrix(circuit: &Circuit) -> Result<Operator> {
    circuit_matrix_with_limit(circuit, DENSE_MATRIX_QUBITS)
}

pub fn circuit_matrix_with_limit(circuit: &Circuit, limit: usize) -> Result<Operator> {
    let n = circuit.n_qubits;
    if n > limit {
        return Err(Error::DimensionTooLarge { n_qubits: n, limit });
    }
    let dim = 1usize << n;
    let mut m = nalgebra::DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let out = StateVector::from_index(n, col)?.apply_circuit(circuit)?;
        for (row, a) in out.amps.iter().enumerate() {
            m[(row, col)] = *a;
        }
    }
    Operator::from_matrix(m)
}

/// `op · state` for a dense operator.
pub fn apply_operator(op: &Operator, state: &StateVector) -> Result<StateVector> {
    if op.dim() != state.dim() {
        return Err(Error::DimensionMismatch(op.dim(), state.dim()));
    }
    let v = nalgebra::DVector::from_column_slice(state.amplitudes());
    let out = op.matrix() * v;
    StateVector::new(state.n_qubits, out.as_slice().to_vec())
}

/// `op · state` for a sparse operator.
pub fn apply_sparse(op: &SparseOperator, state: &StateVector) -> Result<StateVector> {
    if op.dim() != state.dim() {
        return Err(Error::DimensionMismatch(op.dim(), state.dim()));
    }
    let mut out = vec![ZERO; state.dim()];
    for &(i, j, v) in op.entries() {
        out[i] += v * state.amps[j];
    }
    StateVector::new(state.n_qubits, out)
}

/// Parses a gate list, taking the register size from the largest qubit
/// referenced.
pub fn parse_gatelist(text: &str) -> Result<Circuit> {
    let ops = parse_ops(text)?;
    let n = ops.iter().map(|(_, op)| op.max_qubit() + 1).max().unwrap_or(1);
    build_checked(n, ops)
}

/// Parses a gate list for a register of `n_qubits`.
pub fn parse_gatelist_with_qubits(text: &str, n_qubits: usize) -> Result<Circuit> {
    build_checked(n_qubits, parse_ops(text)?)
}

fn build_checked(n_qubits: usize, ops: Vec<(usize, GateOp)>) -> Result<Circuit> {
    for (line, op) in &ops {
        op.validate(n_qubits)
            .map_err(|e| Error::parse(*line, e.to_string()))?;
    }
    Ok(Circuit {
        n_qubits,
        ops: ops.into_iter().map(|(_, op)| op).collect(),
    })
}

fn parse_ops(text: &str) -> Result<Vec<(usize, GateOp)>> {
    let mut ops = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let index = |k: usize| -> Result<usize> {
            let s = toks
                .get(k)
                .ok_or_else(|| Error::parse(line_no, "missing operand"))?;
            match s.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(Error::parse(line_no, format!("bad qubit index {s:?}"))),
            }
        };
        let count = |k: usize| -> Result<usize> {
            let s = toks
                .get(k)
                .ok_or_else(|| Error::parse(line_no, "missing operand"))?;
            s.parse::<usize>()
                .map_err(|_| Error::parse(line_no, format!("bad length {s:?}")))
        };
        let arity = |n: usize| -> Result<()> {
            if toks.len() != n + 1 {
                return Err(Error::parse(
                    line_no,
                    format!("{} takes {n} operands", toks[0]),
                ));
            }
            Ok(())
        };
        let op = match toks[0].to_ascii_uppercase().as_str() {
            "X" => {
                arity(1)?;
                GateOp::Not(index(1)?)
            }
            "CN" => {
                arity(2)?;
                GateOp::Cn {
                    control: index(1)?,
                    target: index(2)?,
                }
            }
            "CCN" => {
                arity(3)?;
                GateOp::CollectiveCn {
                    control_start: index(1)?,
                    target_start: index(2)?,
                    len: count(3)?,
                }
            }
            "RESET" => {
                arity(3)?;
                GateOp::BlockReset {
                    start: index(1)?,
                    len: count(2)?,
                    variant: toks[3]
                        .parse()
                        .map_err(|e: Error| Error::parse(line_no, e.to_string()))?,
                }
            }
            other => return Err(Error::parse(line_no, format!("unknown gate {other:?}"))),
        };
        ops.push((line_no, op));
    }
    Ok(ops)
}

/// One gate per line in canonical spelling.
pub fn emit_gatelist(circuit: &Circuit) -> String {
    let mut out = String::new();
    for op in &circuit.ops {
        writeln!(out, "{op}").unwrap();
    }
    out
}
