//! Block circuit that carries a qubit particle `|A^1 .. A^L O .. O⟩` to
//! `|O .. O A^1 .. A^L⟩`.
//!
//! Stage `m` applies collective CNs from block `m` onto each of the next
//! `L` blocks (nearest first) and then resets block `m`. On basis inputs
//! with block `m` equal to `B`, the stage writes `O, B^C_1, .., B^C_L` over
//! blocks `m, m+1, .., m+L`. Block indices are 0-based.

use std::fmt::Write as _;

use rand::Rng;

use crate::bits;
use crate::error::{Error, Result};
use crate::operator::C64;
use crate::qstate::{Circuit, GateOp, ResetVariant, StateVector};
use crate::sca::{BasicString, Particle, Rule};

/// A register of `n_blocks` blocks of `r + 1` qubits each.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockRegister {
    rule: Rule,
    n_blocks: usize,
    state: StateVector,
}

impl BlockRegister {
    pub fn new(rule: Rule, n_blocks: usize, state: StateVector) -> Result<Self> {
        let expected = n_blocks * rule.block_len();
        if state.n_qubits() != expected {
            return Err(Error::QubitCountMismatch {
                expected,
                found: state.n_qubits(),
            });
        }
        Ok(BlockRegister {
            rule,
            n_blocks,
            state,
        })
    }

    /// Basis register holding `blocks` in order.
    pub fn from_blocks(rule: Rule, blocks: &[BasicString]) -> Result<Self> {
        let word: Vec<u8> = blocks.iter().flat_map(|b| b.bits().iter().copied()).collect();
        let state = crate::qstate::basis_state(&word)?;
        BlockRegister::new(rule, blocks.len(), state)
    }

    pub fn rule(&self) -> Rule {
        self.rule
    }

    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    /// Overwrites the register with the basis state holding `blocks`.
    pub fn set_blocks(&mut self, blocks: &[BasicString]) -> Result<()> {
        if blocks.len() != self.n_blocks {
            return Err(Error::QubitCountMismatch {
                expected: self.n_blocks,
                found: blocks.len(),
            });
        }
        if blocks.iter().any(|b| b.bits().len() != self.rule.block_len()) {
            return Err(Error::InvalidParticle(format!(
                "blocks must have {} bits",
                self.rule.block_len()
            )));
        }
        let word: Vec<u8> = blocks.iter().flat_map(|b| b.bits().iter().copied()).collect();
        self.state.set_basis(bits::word_to_index(&word))
    }

    /// First qubit of block `index`.
    pub fn block_start(&self, index: usize) -> usize {
        index * self.rule.block_len()
    }

    /// Block contents when the register holds a single basis state with
    /// amplitude 1.
    pub fn basis_blocks(&self) -> Option<Vec<BasicString>> {
        self.state.as_basis_index().map(|i| self.decode(i))
    }

    fn decode(&self, index: usize) -> Vec<BasicString> {
        let k = self.rule.block_len();
        let word = bits::index_to_word(index, self.n_blocks * k);
        word.chunks(k)
            .map(|c| BasicString::new(self.rule, c.to_vec()).expect("block length"))
            .collect()
    }

    /// `alpha · self + beta · other`.
    pub fn superpose(&self, alpha: C64, other: &BlockRegister, beta: C64) -> Result<Self> {
        if other.n_blocks != self.n_blocks || other.rule != self.rule {
            return Err(Error::QubitCountMismatch {
                expected: self.state.n_qubits(),
                found: other.state.n_qubits(),
            });
        }
        BlockRegister::new(self.rule, self.n_blocks, self.state.combine(alpha, &other.state, beta))
    }

    /// Listing of the blocks, `O` for a null block. Superpositions list each
    /// basis term with its amplitude.
    pub fn describe(&self) -> String {
        if let Some(blocks) = self.basis_blocks() {
            return format_blocks(&blocks);
        }
        let support = self.state.support();
        if support.is_empty() {
            return "0".into();
        }
        let mut s = format!("superposition of {} terms", support.len());
        for i in support {
            let a = self.state.amplitude(i);
            write!(s, "\n  {:+.16e} {:+.16e} | {}", a.re, a.im, format_blocks(&self.decode(i))).unwrap();
        }
        s
    }
}

pub fn format_blocks(blocks: &[BasicString]) -> String {
    blocks
        .iter()
        .map(|b| if b.is_null() { "O".to_string() } else { b.to_string() })
        .collect::<Vec<_>>()
        .join(" ")
}

/// `|A^1 .. A^L O^padding⟩`.
pub fn make_particle_state(rule: Rule, blocks: &[BasicString], padding: usize) -> Result<BlockRegister> {
    if padding == 0 {
        return Err(Error::Invalid("padding must be at least one block".into()));
    }
    if blocks.iter().any(|b| b.bits().len() != rule.block_len()) {
        return Err(Error::InvalidParticle(format!(
            "blocks must have {} bits",
            rule.block_len()
        )));
    }
    Particle::new(0, blocks.to_vec())?;
    let mut all = blocks.to_vec();
    all.extend(std::iter::repeat_n(BasicString::null(rule), padding));
    BlockRegister::from_blocks(rule, &all)
}

/// The gate lists of every stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrtStagePlan {
    pub particle_len: usize,
    pub padding: usize,
    pub block_len: usize,
    pub stages: Vec<Vec<GateOp>>,
}

impl FrtStagePlan {
    pub fn new(rule: Rule, particle_len: usize, padding: usize, variant: ResetVariant) -> Self {
        let stages = (0..padding)
            .map(|m| stage_ops(rule, m, particle_len, variant))
            .collect();
        FrtStagePlan {
            particle_len,
            padding,
            block_len: rule.block_len(),
            stages,
        }
    }

    pub fn n_qubits(&self) -> usize {
        (self.particle_len + self.padding) * self.block_len
    }

    /// All stages as one circuit.
    pub fn to_circuit(&self) -> Result<Circuit> {
        Circuit::new(self.n_qubits(), self.stages.concat())
    }
}

fn stage_ops(rule: Rule, m: usize, particle_len: usize, variant: ResetVariant) -> Vec<GateOp> {
    let k = rule.block_len();
    let mut ops: Vec<GateOp> = (1..=particle_len)
        .map(|j| GateOp::CollectiveCn {
            control_start: m * k,
            target_start: (m + j) * k,
            len: k,
        })
        .collect();
    ops.push(GateOp::BlockReset {
        start: m * k,
        len: k,
        variant,
    });
    ops
}

/// One stage with control block `m`.
pub fn frt_stage(
    reg: &BlockRegister,
    m: usize,
    particle_len: usize,
    variant: ResetVariant,
) -> Result<BlockRegister> {
    let mut next = reg.clone();
    frt_stage_in_place(&mut next, m, particle_len, variant)?;
    Ok(next)
}

/// [`frt_stage`] without copying the register.
pub fn frt_stage_in_place(
    reg: &mut BlockRegister,
    m: usize,
    particle_len: usize,
    variant: ResetVariant,
) -> Result<()> {
    if m + particle_len >= reg.n_blocks {
        return Err(Error::Invalid(format!(
            "stage {m} needs blocks up to {}, register has {}",
            m + particle_len,
            reg.n_blocks
        )));
    }
    apply_stage_in_place(&mut reg.state, reg.rule, m, particle_len, variant)
}

/// The CNs of a stage share their control block, so they run as one fused
/// pass before the reset.
fn apply_stage_in_place(
    state: &mut StateVector,
    rule: Rule,
    m: usize,
    particle_len: usize,
    variant: ResetVariant,
) -> Result<()> {
    let k = rule.block_len();
    let targets: Vec<usize> = (1..=particle_len).map(|j| (m + j) * k).collect();
    state.apply_fanout_in_place(m * k, &targets, k)?;
    state.apply_block_reset_in_place(m * k, k, variant)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrtRunReport {
    pub particle_len: usize,
    pub padding: usize,
    pub variant: ResetVariant,
    /// Register before the first stage and after each stage.
    pub states: Vec<BlockRegister>,
    /// Final blocks predicted by the XOR bookkeeping. `None` for
    /// registers not built from a particle.
    pub expected_final: Option<Vec<BasicString>>,
    /// Final state equals `expected_final`.
    pub final_matches: bool,
    /// Final state is `|O^padding A^1 .. A^L⟩`. Holds when `padding = L + 1`.
    pub transported: bool,
}

impl FrtRunReport {
    pub fn final_state(&self) -> &BlockRegister {
        self.states.last().expect("initial state is always recorded")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, reg) in self.states.iter().enumerate() {
            writeln!(s, "stage {k}: {}", reg.describe()).unwrap();
        }
        writeln!(
            s,
            "final {}",
            if self.final_matches { "matches" } else { "differs" }
        )
        .unwrap();
        writeln!(s, "transported {}", if self.transported { "yes" } else { "no" }).unwrap();
        s
    }
}

/// Runs `padding` stages on `|A^1 .. A^L O^padding⟩`. With `padding = L + 1`
/// the particle ends up shifted by `L + 1` blocks.
pub fn run_frt(
    rule: Rule,
    blocks: &[BasicString],
    padding: usize,
    variant: ResetVariant,
) -> Result<FrtRunReport> {
    let reg = make_particle_state(rule, blocks, padding)?;
    let mut report = run_frt_register(&reg, blocks.len(), padding, variant)?;
    let masks = symbolic_stages(blocks.len(), padding);
    let expected = evaluate_masks(rule, masks.last().unwrap(), blocks);
    let mut shifted = vec![BasicString::null(rule); padding];
    shifted.extend_from_slice(blocks);
    let actual = report.final_state().basis_blocks();
    report.final_matches = actual.as_deref() == Some(&expected[..]);
    report.transported = actual.as_deref() == Some(&shifted[..]);
    report.expected_final = Some(expected);
    Ok(report)
}

/// Runs `padding` stages on an arbitrary register.
pub fn run_frt_register(
    reg: &BlockRegister,
    particle_len: usize,
    padding: usize,
    variant: ResetVariant,
) -> Result<FrtRunReport> {
    if particle_len + padding > reg.n_blocks() {
        return Err(Error::Invalid(format!(
            "{particle_len} particle blocks and {padding} padding blocks exceed {} blocks",
            reg.n_blocks()
        )));
    }
    let mut states = vec![reg.clone()];
    for m in 0..padding {
        let next = frt_stage(states.last().unwrap(), m, particle_len, variant)?;
        states.push(next);
    }
    Ok(FrtRunReport {
        particle_len,
        padding,
        variant,
        states,
        expected_final: None,
        final_matches: false,
        transported: false,
    })
}

/// Block contents as sets of particle blocks: bit `i` of a mask stands for
/// `A^{i+1}`. Entry `k` of the result holds the masks after `k` stages.
pub fn symbolic_stages(particle_len: usize, padding: usize) -> Vec<Vec<u32>> {
    let n = particle_len + padding;
    let mut masks: Vec<u32> = (0..n)
        .map(|i| if i < particle_len { 1 << i } else { 0 })
        .collect();
    let mut out = vec![masks.clone()];
    for m in 0..padding {
        let control = masks[m];
        for j in 1..=particle_len {
            masks[m + j] ^= control;
        }
        masks[m] = 0;
        out.push(masks.clone());
    }
    out
}

/// XOR of the blocks selected by each mask.
pub fn evaluate_masks(rule: Rule, masks: &[u32], blocks: &[BasicString]) -> Vec<BasicString> {
    masks
        .iter()
        .map(|&mask| {
            blocks
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .fold(BasicString::null(rule), |acc, (_, b)| acc.xor(b))
        })
        .collect()
}

/// Every block sequence of length `len` with nonzero first and last blocks.
pub fn all_particles(rule: Rule, len: usize) -> Vec<Vec<BasicString>> {
    let k = rule.block_len();
    let n_words = 1usize << k;
    let total = n_words.pow(len as u32);
    (0..total)
        .map(|mut code| {
            (0..len)
                .map(|_| {
                    let w = code % n_words;
                    code /= n_words;
                    BasicString::new(rule, bits::index_to_word(w, k)).unwrap()
                })
                .collect::<Vec<_>>()
        })
        .filter(|b: &Vec<BasicString>| !b[0].is_null() && !b[len - 1].is_null())
        .collect()
}

/// A uniformly random block sequence with nonzero first and last blocks.
pub fn random_particle<R: Rng + ?Sized>(rule: Rule, len: usize, rng: &mut R) -> Vec<BasicString> {
    let k = rule.block_len();
    loop {
        let blocks: Vec<BasicString> = (0..len)
            .map(|_| {
                BasicString::new(rule, bits::index_to_word(rng.gen_range(0..1usize << k), k)).unwrap()
            })
            .collect();
        if !blocks[0].is_null() && !blocks[len - 1].is_null() {
            return blocks;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageIdentityReport {
    pub particle_len: usize,
    pub padding: usize,
    pub instances: usize,
    pub exhaustive: bool,
    /// Per stage (index 0 = input), instances where the state-vector run
    /// disagreed with the symbolic prediction.
    pub mismatches: Vec<usize>,
}

impl StageIdentityReport {
    pub fn passed(&self) -> bool {
        self.mismatches.iter().all(|&m| m == 0)
    }
}

/// Checks every stage of the `padding = L + 1` run against the symbolic
/// XOR prediction, exhaustively when there are at most `samples` particles
/// and on `samples` random particles otherwise. Uses the extended reset.
pub fn stage_identity_check<R: Rng + ?Sized>(
    rule: Rule,
    particle_len: usize,
    rng: &mut R,
    samples: usize,
) -> Result<StageIdentityReport> {
    if particle_len == 0 {
        return Err(Error::InvalidParticle("no blocks".into()));
    }
    let padding = particle_len + 1;
    let exhaustive_count = (1usize << rule.block_len()).checked_pow(particle_len as u32);
    let (instances, exhaustive) = match exhaustive_count {
        Some(c) if c <= samples => (all_particles(rule, particle_len), true),
        _ => (
            (0..samples)
                .map(|_| random_particle(rule, particle_len, rng))
                .collect(),
            false,
        ),
    };
    let symbolic = symbolic_stages(particle_len, padding);
    let mut mismatches = vec![0; padding + 1];
    let null = BasicString::null(rule);
    let mut work = BlockRegister::from_blocks(rule, &vec![null.clone(); particle_len + padding])?;
    for blocks in &instances {
        Particle::new(0, blocks.clone())?;
        let mut input = blocks.clone();
        input.extend(std::iter::repeat_n(null.clone(), padding));
        work.set_blocks(&input)?;
        for (k, masks) in symbolic.iter().enumerate() {
            if k > 0 {
                frt_stage_in_place(&mut work, k - 1, particle_len, ResetVariant::Extended)?;
            }
            let predicted = evaluate_masks(rule, masks, blocks);
            if work.basis_blocks().as_deref() != Some(&predicted[..]) {
                mismatches[k] += 1;
            }
        }
    }
    Ok(StageIdentityReport {
        particle_len,
        padding,
        instances: instances.len(),
        exhaustive,
        mismatches,
    })
}

/// Norm of the final register, for reporting.
pub fn final_norm(report: &FrtRunReport) -> f64 {
    report.final_state().state().norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule(r: usize) -> Rule {
        Rule::new(r).unwrap()
    }

    fn bs(r: usize, s: &str) -> BasicString {
        BasicString::parse(rule(r), s).unwrap()
    }

    #[test]
    fn particle_state_layout() {
        let reg = make_particle_state(rule(1), &[bs(1, "11")], 1).unwrap();
        assert_eq!(reg.state(), &crate::qstate::basis_state(&[1, 1, 0, 0]).unwrap());
        assert_eq!(reg.state().n_qubits(), 4);
        assert!(make_particle_state(rule(1), &[bs(1, "00")], 1).is_err());
        assert!(make_particle_state(rule(1), &[bs(1, "10")], 0).is_err());
        let reg = make_particle_state(rule(2), &[bs(2, "100"), bs(2, "000"), bs(2, "011")], 4).unwrap();
        assert_eq!(reg.state().n_qubits(), 21);
    }

    #[test]
    fn stage_on_null_leading_block() {
        let r = rule(1);
        let blocks = [bs(1, "00"), bs(1, "10"), bs(1, "01")];
        let reg = BlockRegister::from_blocks(r, &blocks).unwrap();
        let ext = frt_stage(&reg, 0, 2, ResetVariant::Extended).unwrap();
        assert_eq!(ext, reg);
        let lit = frt_stage(&reg, 0, 2, ResetVariant::PaperLiteral).unwrap();
        assert_eq!(lit.state().norm(), 0.0);
        assert_eq!(lit.describe(), "0");
    }

    #[test]
    fn stage_range_checked() {
        let reg = make_particle_state(rule(1), &[bs(1, "10")], 1).unwrap();
        assert!(frt_stage(&reg, 1, 1, ResetVariant::Extended).is_err());
    }

    #[test]
    fn symbolic_matches_first_stage_formula() {
        let s = symbolic_stages(3, 4);
        // O, A1^A2, A1^A3, A1, O, O, O
        assert_eq!(s[1], vec![0, 0b011, 0b101, 0b001, 0, 0, 0]);
        assert_eq!(s[4], vec![0, 0, 0, 0, 0b001, 0b010, 0b100]);
    }

    #[test]
    fn plan_ordering() {
        let plan = FrtStagePlan::new(rule(2), 3, 4, ResetVariant::Extended);
        assert_eq!(plan.stages.len(), 4);
        let first = &plan.stages[0];
        assert_eq!(
            first[0],
            GateOp::CollectiveCn { control_start: 0, target_start: 3, len: 3 }
        );
        assert_eq!(
            first[2],
            GateOp::CollectiveCn { control_start: 0, target_start: 9, len: 3 }
        );
        assert!(matches!(first[3], GateOp::BlockReset { start: 0, len: 3, .. }));
        assert_eq!(plan.to_circuit().unwrap().n_qubits(), 21);
    }

    #[test]
    fn run_text_layout() {
        let rep = run_frt(rule(1), &[bs(1, "10"), bs(1, "11")], 3, ResetVariant::Extended).unwrap();
        assert_eq!(
            rep.to_text(),
            "stage 0: 10 11 O O O\nstage 1: O 01 10 O O\nstage 2: O O 11 01 O\n\
             stage 3: O O O 10 11\nfinal matches\ntransported yes\n"
        );
        let short = run_frt(rule(1), &[bs(1, "10"), bs(1, "11")], 2, ResetVariant::Extended).unwrap();
        assert!(short.final_matches);
        assert!(!short.transported);
    }

    #[test]
    fn fused_stage_equals_gate_list() {
        use rand::SeedableRng;
        let r = rule(1);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let amps: Vec<C64> = (0..1 << 8)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let state = StateVector::new(8, amps).unwrap();
        for variant in [ResetVariant::Extended, ResetVariant::PaperLiteral] {
            for m in 0..2 {
                let reg = BlockRegister::new(r, 4, state.clone()).unwrap();
                let fused = frt_stage(&reg, m, 2, variant).unwrap();
                let mut listed = state.clone();
                for op in stage_ops(r, m, 2, variant) {
                    listed.apply_op_in_place(&op).unwrap();
                }
                assert!(fused.state().max_abs_diff(&listed) < 1e-15);
            }
        }
    }

    #[test]
    fn exhaustive_count() {
        // 3 nonzero choices for each end block, 4 for the middle
        assert_eq!(all_particles(rule(1), 3).len(), 3 * 4 * 3);
    }
}
