//! The invariant suite behind `qsca check`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits;
use crate::error::Result;
use crate::frt_quantum;
use crate::operator::Operator;
use crate::qstate::{self, StateVector};
use crate::quantize::{self, StepMode};
use crate::sca::{self, BasicString, Particle, Rule};
use crate::spin_chain::{self, GeneratorVariant};
use crate::unitary_compile;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for SuiteCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub seed: u64,
    pub checks: Vec<SuiteCheck>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("seed {}\n", self.seed);
        for c in &self.checks {
            s.push_str(&c.to_string());
            s.push('\n');
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        s.push_str(&format!("{} checks, {} failed\n", self.checks.len(), failed));
        s
    }
}

/// Random particles whose first block starts with a 1, so that parsing the
/// rendered configuration gives back the same blocks. Only particles that
/// stay single until their return are kept. Returns the kept particles and
/// the number of draws.
pub fn sample_frt_particles<R: Rng + ?Sized>(
    rule: Rule,
    max_len: usize,
    count: usize,
    max_draws: usize,
    rng: &mut R,
) -> (Vec<(Particle, sca::FrtReport)>, usize) {
    let mut kept = Vec::new();
    let mut draws = 0;
    while kept.len() < count && draws < max_draws {
        draws += 1;
        let len = rng.gen_range(1..=max_len);
        let mut blocks = frt_quantum::random_particle(rule, len, rng);
        let mut first = blocks[0].bits().to_vec();
        first[0] = 1;
        blocks[0] = BasicString::new(rule, first).expect("block length");
        let particle = Particle::new(0, blocks).expect("nonzero end blocks");
        let report = sca::frt_check(rule, &particle, 0);
        if report.condition_held {
            kept.push((particle, report));
        }
    }
    (kept, draws)
}

/// Left-to-right update of a finite chain whose outside cells stay 0.
fn truncated_step(rule: Rule, word: &[u8]) -> Vec<u8> {
    let r = rule.radius() as i64;
    let n = word.len() as i64;
    let mut new = word.to_vec();
    for i in 0..n {
        let at = |v: &[u8], s: i64| if (0..n).contains(&s) { v[s as usize] } else { 0 };
        let left: u32 = (i - r..i).map(|s| at(&new, s) as u32).sum();
        let right: u32 = (i + 1..=i + r).map(|s| at(word, s) as u32).sum();
        let total = left + right + word[i as usize] as u32;
        new[i as usize] = if total == 0 { 0 } else { 1 ^ (total & 1) as u8 };
    }
    new
}

fn check(name: &'static str, passed: bool, detail: String) -> SuiteCheck {
    SuiteCheck { name, passed, detail }
}

pub fn run_suite(seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    // update map is a bijection onto all words but a0
    let mut bijective = true;
    for r in 1..=4 {
        let rule = Rule::new(r)?;
        let n = rule.window_len();
        let mut seen = vec![false; 1 << n];
        for x in 1..1usize << n {
            let y = bits::word_to_index(&sca::f_window(rule, &bits::index_to_word(x, n))?);
            bijective &= !seen[y];
            seen[y] = true;
        }
        let a0 = bits::word_to_index(&sca::null_preimage(rule));
        bijective &= !seen[a0] && seen.iter().filter(|&&s| !s).count() == 1;
    }
    checks.push(check("update-bijection", bijective, "radii 1..4".into()));

    let mut worst: f64 = 0.0;
    for r in 1..=3 {
        let rep = quantize::check_partial_isometry(&quantize::build_uf_matrix(r)?);
        worst = worst.max(rep.range_residual).max(rep.domain_residual);
    }
    checks.push(check("partial-isometry", worst == 0.0, format!("radii 1..3, max residual {worst:e}")));

    let u2 = quantize::build_uf_matrix(2)?;
    let partition = quantize::partition_basis(2)?;
    let form = quantize::block_form(&quantize::represent_blocked(&u2, &partition)?, &partition);
    checks.push(check(
        "block-form",
        form.is_expected_shape(),
        format!("radius 2, blocks {}+{}", form.invariant_size, form.flipped_size),
    ));

    let mut fact_ok = true;
    for r in 1..=3 {
        let c = qstate::circuit_matrix(&quantize::window_circuit(r)?)?;
        fact_ok &= quantize::project_out_null(&c) == quantize::build_uf_matrix(r)?.to_dense()?;
    }
    checks.push(check("circuit-factorization", fact_ok, "radii 1..3, exact".into()));

    let mut eq_bad = 0;
    for r in 1..=3 {
        eq_bad += quantize::equivariance_violations(&quantize::build_uf_matrix(r)?)?.len();
    }
    checks.push(check("classical-equivariance", eq_bad == 0, format!("{eq_bad} violations")));

    // partial-isometry step fixes the vacuum and tracks the classical step
    let n_sites = 6;
    let op = match quantize::total_step(1, n_sites, StepMode::PartialIsometry)? {
        quantize::TotalStep::Operator(op) => op,
        quantize::TotalStep::Circuit(_) => unreachable!("partial-isometry mode yields an operator"),
    };
    let mut step_bad = 0;
    for _ in 0..16 {
        let x = rng.gen_range(0..1usize << n_sites);
        let word = bits::index_to_word(x, n_sites);
        let out = qstate::apply_sparse(&op, &qstate::basis_state(&word)?)?;
        let expected = truncated_step(Rule::new(1)?, &word);
        if out != qstate::basis_state(&expected)? {
            step_bad += 1;
        }
    }
    let vacuum = StateVector::from_index(n_sites, 0)?;
    let vac_ok = qstate::apply_sparse(&op, &vacuum)? == vacuum;
    checks.push(check(
        "total-step",
        step_bad == 0 && vac_ok,
        format!("radius 1, {n_sites} sites, 16 random words, {step_bad} mismatches"),
    ));

    let g = spin_chain::check_generators(GeneratorVariant::Verified)?;
    let gl = spin_chain::check_generators(GeneratorVariant::PaperLiteral)?;
    checks.push(check(
        "generators",
        g.not_distance <= 1e-10 && g.cn_distance <= 1e-10 && gl.cn_identity_distance <= 1e-10,
        format!(
            "verified NOT {:.1e}, CN {:.1e}; literal CN vs identity {:.1e}",
            g.not_distance, g.cn_distance, gl.cn_identity_distance
        ),
    ));

    let h = spin_chain::build_chain_hamiltonian(6, 2, GeneratorVariant::Verified)?;
    let herm = spin_chain::to_dense(&h)?.hermiticity_residual();
    checks.push(check(
        "hamiltonian",
        herm <= 1e-12 && h.max_span() <= 2 * 2 + 1,
        format!("6 sites, radius 2, {} terms, span {}", h.terms.len(), h.max_span()),
    ));

    let p = quantize::parallelism_demo(2)?;
    checks.push(check(
        "parallelism",
        p.output_support.len() == 31 && p.amplitude_error <= 1e-12 && (p.output_norm - 1.0).abs() <= 1e-12,
        format!("{} image words, norm {:.15}", p.output_support.len(), p.output_norm),
    ));

    let exhaustive = frt_quantum::stage_identity_check(Rule::new(1)?, 2, &mut rng, 1 << 10)?;
    let sampled = frt_quantum::stage_identity_check(Rule::new(2)?, 3, &mut rng, 100)?;
    checks.push(check(
        "quantum-frt",
        exhaustive.passed() && exhaustive.exhaustive && sampled.passed(),
        format!(
            "radius 1 L 2: {} particles; radius 2 L 3: {} samples",
            exhaustive.instances, sampled.instances
        ),
    ));

    let (kept, draws) = sample_frt_particles(Rule::new(2)?, 3, 50, 10_000, &mut rng);
    let matched = kept.iter().filter(|(_, rep)| rep.all_matched()).count();
    checks.push(check(
        "classical-frt",
        kept.len() == 50 && matched == kept.len(),
        format!("radius 2, {matched}/{} matched from {draws} draws", kept.len()),
    ));

    let mut reck_err: f64 = 0.0;
    for &n in &[2usize, 4, 8, 16] {
        for _ in 0..3 {
            let u = unitary_compile::random_unitary(n, &mut rng);
            let plan = unitary_compile::reck_decompose(&u, 1e-10)?;
            reck_err = reck_err.max(unitary_compile::reck_reconstruct(&plan).max_abs_diff(&u));
        }
    }
    let c1: Operator = qstate::circuit_matrix(&quantize::window_circuit(1)?)?;
    let plan = unitary_compile::reck_decompose(&c1, 1e-10)?;
    reck_err = reck_err.max(unitary_compile::reck_reconstruct(&plan).max_abs_diff(&c1));
    checks.push(check("reck-round-trip", reck_err <= 1e-9, format!("max error {reck_err:.1e}")));

    Ok(SuiteReport { seed, checks })
}
