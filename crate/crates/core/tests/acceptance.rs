//! Acceptance criteria, run in order with one result line each.
//!
//! Runs without the libtest harness so the timing budgets are measured
//! with nothing else competing for the CPU.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qsca_core::frt_quantum::{self, BlockRegister};
use qsca_core::qstate::{self, Circuit, GateOp, ResetVariant, StateVector};
use qsca_core::quantize;
use qsca_core::sca::{BasicString, Rule};
use qsca_core::spin_chain::{self, GeneratorVariant, HamiltonianSum};
use qsca_core::suite;
use qsca_core::unitary_compile;
use qsca_core::Operator;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn budget(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    ensure(
        elapsed.as_secs_f64() < limit_s,
        format!("took {:.3}s, budget {limit_s}s", elapsed.as_secs_f64()),
    )
}

// ---- independent oracles ----

fn bits_of(x: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((x >> (n - 1 - i)) & 1) as u8).collect()
}

fn index_of(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

/// Center update as printed: one plus the XOR of the whole window.
fn printed_center(window: &[u8]) -> u8 {
    1 ^ window.iter().fold(0, |a, &b| a ^ b)
}

/// Center update of the automaton: zero on the null window.
fn rule_center(window: &[u8]) -> u8 {
    if window.iter().all(|&b| b == 0) {
        0
    } else {
        printed_center(window)
    }
}

fn ket(bits: &[u8]) -> DMatrix<C> {
    bits.iter().fold(DMatrix::from_element(1, 1, C::new(1.0, 0.0)), |acc, &b| {
        let mut e = DMatrix::zeros(2, 1);
        e[(b as usize, 0)] = C::new(1.0, 0.0);
        acc.kronecker(&e)
    })
}

/// `Σ_x |x with center replaced⟩⟨x|` as a sum of Kronecker outer products.
fn kron_transition(r: usize, include_null: bool) -> DMatrix<C> {
    let n = 2 * r + 1;
    let dim = 1 << n;
    let mut u = DMatrix::zeros(dim, dim);
    for x in 0..dim {
        if x == 0 && !include_null {
            continue;
        }
        let w = bits_of(x, n);
        let mut y = w.clone();
        y[r] = printed_center(&w);
        u += ket(&y) * ket(&w).adjoint();
    }
    u
}

fn single_qubit_embed(n: usize, q: usize, g: &DMatrix<C>) -> DMatrix<C> {
    let id = DMatrix::<C>::identity(2, 2);
    (0..n).fold(DMatrix::from_element(1, 1, C::new(1.0, 0.0)), |acc, i| {
        acc.kronecker(if i == q { g } else { &id })
    })
}

fn cn_kron(n: usize, c: usize, t: usize) -> DMatrix<C> {
    let one = C::new(1.0, 0.0);
    let p0 = DMatrix::from_row_slice(2, 2, &[one, C::default(), C::default(), C::default()]);
    let p1 = DMatrix::from_row_slice(2, 2, &[C::default(), C::default(), C::default(), one]);
    let x = DMatrix::from_row_slice(2, 2, &[C::default(), one, one, C::default()]);
    let id = DMatrix::<C>::identity(2, 2);
    let build = |pc: &DMatrix<C>, xt: bool| {
        (0..n).fold(DMatrix::from_element(1, 1, one), |acc, i| {
            let f = if i == c {
                pc
            } else if i == t && xt {
                &x
            } else {
                &id
            };
            acc.kronecker(f)
        })
    };
    build(&p0, false) + build(&p1, true)
}

fn x_kron(n: usize, q: usize) -> DMatrix<C> {
    let one = C::new(1.0, 0.0);
    single_qubit_embed(n, q, &DMatrix::from_row_slice(2, 2, &[C::default(), one, one, C::default()]))
}

// ---- criteria ----

fn block_form() -> Outcome {
    let t0 = Instant::now();
    let u = quantize::build_uf_matrix(2).map_err(|e| e.to_string())?.to_sparse();
    let partition = quantize::partition_basis(2).map_err(|e| e.to_string())?;
    let order = partition.order();
    let mut sorted = order.clone();
    sorted.sort_unstable();
    ensure(sorted == (0..32).collect::<Vec<_>>(), "partition is not a permutation of the basis")?;
    // the displayed matrix: identity on 16 invariant words, then a 16x16
    // antidiagonal block (1, .., 1, 0)
    let mut expected = DMatrix::<C>::zeros(32, 32);
    for i in 0..16 {
        expected[(i, i)] = C::new(1.0, 0.0);
    }
    for i in 0..15 {
        expected[(16 + i, 31 - i)] = C::new(1.0, 0.0);
    }
    let permuted = DMatrix::from_fn(32, 32, |i, j| u.get(order[i], order[j]));
    ensure(permuted == expected, "permuted matrix differs from diag(1_16, antidiag(1..1,0))")?;
    let lib = quantize::represent_blocked(&quantize::build_uf_matrix(2).unwrap(), &partition)
        .map_err(|e| e.to_string())?
        .to_dense();
    ensure(lib.matrix() == &expected, "represent_blocked disagrees with the permutation")?;
    let elapsed = t0.elapsed();
    budget(elapsed, 1.0)?;
    Ok(format!("16+16 blocks, entry-exact, {:.3}s", elapsed.as_secs_f64()))
}

fn partial_isometry() -> Outcome {
    let t0 = Instant::now();
    let mut details = Vec::new();
    for r in 1..=3 {
        let op = quantize::build_uf_matrix(r).map_err(|e| e.to_string())?;
        let dense = op.to_dense().map_err(|e| e.to_string())?;
        let oracle = kron_transition(r, false);
        ensure(dense.matrix() == &oracle, format!("r={r}: U_f differs from the Kronecker sum"))?;
        let dim = oracle.nrows();
        let a0 = 1 << r;
        let mut range = DMatrix::<C>::identity(dim, dim);
        range[(a0, a0)] = C::default();
        let mut domain = DMatrix::<C>::identity(dim, dim);
        domain[(0, 0)] = C::default();
        let uu = &oracle * oracle.adjoint();
        let uu2 = oracle.adjoint() * &oracle;
        ensure(uu == range && uu2 == domain, format!("r={r}: identities fail in the oracle"))?;
        let rep = quantize::check_partial_isometry(&op);
        ensure(
            rep.range_residual == 0.0 && rep.domain_residual == 0.0,
            format!("r={r}: residuals {} {}", rep.range_residual, rep.domain_residual),
        )?;
        details.push(format!("dim {dim}"));
    }
    // the printed formula summed over every word, null included, is the
    // unitary gate product rather than U_f
    let all = kron_transition(2, true);
    let circuit = qstate::circuit_matrix(&quantize::window_circuit(2).unwrap()).unwrap();
    ensure(circuit.matrix() == &all, "all-word sum differs from the circuit matrix")?;
    let elapsed = t0.elapsed();
    budget(elapsed, 1.0)?;
    Ok(format!("residuals 0 at {}, {:.3}s", details.join(", "), elapsed.as_secs_f64()))
}

fn factorization() -> Outcome {
    let t0 = Instant::now();
    for r in 1..=3 {
        let n = 2 * r + 1;
        let dim = 1 << n;
        let circuit = quantize::build_uf_circuit(r, r, n).map_err(|e| e.to_string())?;
        let lib = qstate::circuit_matrix(&circuit).map_err(|e| e.to_string())?;
        // gate product from Kronecker factors, later gates on the left
        let mut oracle = DMatrix::<C>::identity(dim, dim);
        for k in 1..=r {
            oracle = cn_kron(n, r - k, r) * oracle;
        }
        for k in 1..=r {
            oracle = cn_kron(n, r + k, r) * oracle;
        }
        oracle = x_kron(n, r) * oracle;
        ensure(lib.matrix() == &oracle, format!("r={r}: circuit matrix differs from the gate product"))?;
        let mut proj = DMatrix::<C>::identity(dim, dim);
        proj[(0, 0)] = C::default();
        let uf = quantize::build_uf_matrix(r).unwrap().to_dense().unwrap();
        ensure(&(lib.matrix() * proj) == uf.matrix(), format!("r={r}: circuit·(I-|O><O|) != U_f"))?;
    }
    let elapsed = t0.elapsed();
    budget(elapsed, 2.0)?;
    Ok(format!("r=1..3 exact, {:.3}s", elapsed.as_secs_f64()))
}

/// Block contents after each stage as sets of particle blocks (bit i = A^{i+1}),
/// transcribed from the displayed state chain.
fn displayed_chain(l: usize) -> Vec<Vec<u32>> {
    match l {
        2 => vec![
            vec![1, 2, 0, 0, 0],
            vec![0, 3, 1, 0, 0],
            vec![0, 0, 2, 3, 0],
            vec![0, 0, 0, 1, 2],
        ],
        3 => vec![
            vec![1, 2, 4, 0, 0, 0, 0],
            vec![0, 3, 5, 1, 0, 0, 0],
            vec![0, 0, 6, 2, 3, 0, 0],
            vec![0, 0, 0, 4, 5, 6, 0],
            vec![0, 0, 0, 0, 1, 2, 4],
        ],
        _ => unreachable!(),
    }
}

fn xor_blocks(rule: Rule, mask: u32, blocks: &[BasicString]) -> BasicString {
    let k = rule.block_len();
    let mut bits = vec![0u8; k];
    for (i, b) in blocks.iter().enumerate() {
        if mask & (1 << i) != 0 {
            for (x, y) in bits.iter_mut().zip(b.bits()) {
                *x ^= y;
            }
        }
    }
    BasicString::new(rule, bits).unwrap()
}

fn run_chain(rule: Rule, reg: &mut BlockRegister, blocks: &[BasicString]) -> Result<(), String> {
    let l = blocks.len();
    let chain = displayed_chain(l);
    let mut input = blocks.to_vec();
    input.extend(std::iter::repeat_n(BasicString::null(rule), l + 1));
    reg.set_blocks(&input).map_err(|e| e.to_string())?;
    for (stage, masks) in chain.iter().enumerate() {
        if stage > 0 {
            frt_quantum::frt_stage_in_place(reg, stage - 1, l, ResetVariant::Extended)
                .map_err(|e| e.to_string())?;
        }
        let expected: Vec<BasicString> = masks.iter().map(|&m| xor_blocks(rule, m, blocks)).collect();
        let got = reg.basis_blocks();
        if got.as_deref() != Some(&expected[..]) {
            return Err(format!(
                "particle {} stage {stage}: expected {}, got {}",
                frt_quantum::format_blocks(blocks),
                frt_quantum::format_blocks(&expected),
                reg.describe()
            ));
        }
    }
    Ok(())
}

fn quantum_frt() -> Outcome {
    let t0 = Instant::now();
    let r1 = Rule::new(1).unwrap();
    let mut reg = BlockRegister::from_blocks(r1, &vec![BasicString::null(r1); 5]).unwrap();
    let mut exhaustive = 0;
    for a in 1..4usize {
        for b in 1..4usize {
            let blocks = [
                BasicString::new(r1, bits_of(a, 2)).unwrap(),
                BasicString::new(r1, bits_of(b, 2)).unwrap(),
            ];
            run_chain(r1, &mut reg, &blocks)?;
            exhaustive += 1;
        }
    }
    let r2 = Rule::new(2).unwrap();
    let mut reg = BlockRegister::from_blocks(r2, &vec![BasicString::null(r2); 7]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x51ca);
    for _ in 0..100 {
        let blocks = frt_quantum::random_particle(r2, 3, &mut rng);
        run_chain(r2, &mut reg, &blocks)?;
    }
    let elapsed = t0.elapsed();
    budget(elapsed, 10.0)?;
    Ok(format!(
        "{exhaustive} exhaustive r=1 pairs, 100 random r=2 L=3 particles, {:.3}s",
        elapsed.as_secs_f64()
    ))
}

fn generators() -> Outcome {
    let id2 = Operator::identity(2);
    let id4 = Operator::identity(4);
    let two = qsca_core::C64::new(2.0, 0.0);
    let v = spin_chain::check_generators(GeneratorVariant::Verified).map_err(|e| e.to_string())?;
    ensure(v.not_distance <= 1e-10, format!("NOT distance {}", v.not_distance))?;
    ensure(v.cn_distance <= 1e-10, format!("CN distance {}", v.cn_distance))?;
    // projector generators: exp(iπG) = I − 2G
    let gn = spin_chain::generator_not(GeneratorVariant::Verified);
    let gc = spin_chain::generator_cn(GeneratorVariant::Verified, true);
    ensure(gn.mul(&gn) == gn && gc.mul(&gc) == gc, "verified generators are not projectors")?;
    ensure(id2.sub(&gn.scale(two)) == spin_chain::not_matrix(), "I - 2G_N != X")?;
    ensure(id4.sub(&gc.scale(two)) == spin_chain::cn_matrix(true), "I - 2G_CN != CN")?;
    let lit = spin_chain::check_generators(GeneratorVariant::PaperLiteral).map_err(|e| e.to_string())?;
    ensure(
        lit.cn_identity_distance <= 1e-10,
        format!("literal CN exponential is {} from I", lit.cn_identity_distance),
    )?;
    Ok(format!(
        "verified NOT {:.1e}, CN {:.1e}; literal NOT distance {:.3}, CN distance {:.3}, exp(iπG_CN) = I to {:.1e}",
        v.not_distance, v.cn_distance, lit.not_distance, lit.cn_distance, lit.cn_identity_distance
    ))
}

fn hamiltonian() -> Outcome {
    let mut worst_herm: f64 = 0.0;
    for r in 1..=3 {
        for n in [1usize, 2, 3, 5, 7, 9, 12] {
            let h = spin_chain::build_chain_hamiltonian(n, r, GeneratorVariant::Verified)
                .map_err(|e| e.to_string())?;
            let dense = spin_chain::to_dense(&h).map_err(|e| e.to_string())?;
            worst_herm = worst_herm.max(dense.hermiticity_residual());
            for site in 0..n {
                let hs = spin_chain::build_site_hamiltonian(site, r, n, GeneratorVariant::Verified)
                    .map_err(|e| e.to_string())?;
                for t in &hs.terms {
                    ensure(
                        t.sites().iter().all(|&s| s.abs_diff(site) <= r),
                        format!("term {t} of site {site} reaches beyond radius {r}"),
                    )?;
                }
                if site >= r && site + 1 + r < n {
                    let next = spin_chain::build_site_hamiltonian(site + 1, r, n, GeneratorVariant::Verified)
                        .unwrap()
                        .simplified();
                    let shifted = HamiltonianSum {
                        n_sites: n,
                        radius: r,
                        terms: hs.terms.iter().map(|t| t.shifted(1)).collect(),
                    }
                    .simplified();
                    ensure(
                        shifted.to_text() == next.to_text(),
                        format!("site {site} terms do not shift onto site {}", site + 1),
                    )?;
                }
            }
        }
    }
    ensure(worst_herm <= f64::EPSILON, format!("hermiticity residual {worst_herm:e}"))?;
    let mut gaps = Vec::new();
    for (n, r) in [(5usize, 1usize), (8, 1), (8, 2)] {
        let g = spin_chain::generation_gap(n, r, GeneratorVariant::Verified).map_err(|e| e.to_string())?;
        ensure(g.site_gap <= 1e-10, format!("site exponential differs from site circuit by {}", g.site_gap))?;
        ensure(
            g.product_vs_circuit <= 1e-10,
            format!("product of site exponentials differs from total step by {}", g.product_vs_circuit),
        )?;
        gaps.push(format!("n={n} r={r} gap {:.3}", g.chain_gap));
    }
    Ok(format!("Hermitian to {worst_herm:.1e} for n<=12, r<=3; local; shift-covariant; {}", gaps.join(", ")))
}

fn parallelism() -> Outcome {
    let rep = quantize::parallelism_demo(2).map_err(|e| e.to_string())?;
    let amp = 1.0 / 31f64.sqrt();
    // oracle: the Kronecker-sum matrix applied to the same superposition
    let u = kron_transition(2, false);
    let mut input = nalgebra::DVector::<C>::from_element(32, C::new(amp, 0.0));
    input[0] = C::default();
    let out = u * input;
    let a0 = 0b00100;
    for i in 0..32 {
        let want = if i == a0 { 0.0 } else { amp };
        ensure((out[i] - C::new(want, 0.0)).norm() <= 1e-15, format!("oracle amplitude {i}"))?;
    }
    ensure(rep.missing_words == vec![a0], format!("missing words {:?}", rep.missing_words))?;
    ensure(rep.output_support.len() == 31, format!("{} image words", rep.output_support.len()))?;
    ensure(rep.amplitude_error <= 1e-12, format!("amplitude error {}", rep.amplitude_error))?;
    ensure((rep.output_norm - 1.0).abs() <= 1e-12, format!("norm {}", rep.output_norm))?;
    ensure(rep.operator_applications == 1, "more than one application")?;
    Ok(format!("31 words at 1/sqrt(31), norm {:.15}", rep.output_norm))
}

/// Straightforward simulation on a fixed array wide enough for the run.
fn simulate(r: usize, initial: &[u8], steps: usize) -> Result<Vec<Vec<u8>>, String> {
    let margin = 8 * (steps + 4) * (r + 1);
    let width = initial.len() + 2 * margin;
    let mut cur = vec![0u8; width];
    cur[margin..margin + initial.len()].copy_from_slice(initial);
    let mut out = vec![cur.clone()];
    for _ in 0..steps {
        let mut next = vec![0u8; width];
        for i in r..width - r {
            let mut window = next[i - r..i].to_vec();
            window.extend_from_slice(&cur[i..=i + r]);
            next[i] = rule_center(&window);
        }
        if next[width - 2 * r..].iter().any(|&b| b != 0) {
            return Err("simulation ran into the array edge".into());
        }
        out.push(next.clone());
        cur = next;
    }
    Ok(out)
}

fn trim(v: &[u8]) -> &[u8] {
    match (v.iter().position(|&b| b != 0), v.iter().rposition(|&b| b != 0)) {
        (Some(a), Some(b)) => &v[a..=b],
        _ => &[],
    }
}

fn classical_frt() -> Outcome {
    let rule = Rule::new(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (kept, draws) = suite::sample_frt_particles(rule, 3, 60, 20_000, &mut rng);
    ensure(kept.len() >= 50, format!("only {} particles passed the detector", kept.len()))?;
    for (particle, report) in &kept {
        let blocks = particle.blocks();
        let l = blocks.len();
        // l-counts and predicted patterns computed here from the blocks
        let null = BasicString::null(rule);
        let mut a = vec![null.clone()];
        a.extend(blocks.iter().cloned());
        let mut counts = vec![a[1].weight()];
        for i in 1..l {
            counts.push(a[i].xor(&a[i + 1]).weight());
        }
        counts.push(a[l].weight());
        let times: Vec<usize> = counts
            .iter()
            .scan(0, |s, &c| {
                *s += c;
                Some(*s)
            })
            .collect();
        let initial: Vec<u8> = blocks.iter().flat_map(|b| b.bits().to_vec()).collect();
        let history = simulate(2, &initial, *times.last().unwrap())?;
        for m in 0..=l {
            let predicted: Vec<u8> = if m == l {
                initial.clone()
            } else {
                let order: Vec<usize> = (m + 2..=l).chain([0]).chain(1..=m).collect();
                order.iter().flat_map(|&i| a[m + 1].xor(&a[i]).bits().to_vec()).collect()
            };
            let got = &history[times[m]];
            ensure(
                trim(got) == trim(&predicted),
                format!("particle {} differs from the prediction at t_{m} = {}", particle.to_configuration().to_text().trim(), times[m]),
            )?;
        }
        ensure(report.all_matched(), "library check disagrees with the oracle")?;
    }
    Ok(format!("{} detector-passing particles from {draws} draws, all matched", kept.len()))
}

fn reck() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in [2usize, 4, 8, 16, 32] {
        for _ in 0..20 {
            let u = unitary_compile::random_unitary(n, &mut rng);
            ensure(u.unitarity_residual() < 1e-12, "test matrix is not unitary")?;
            let plan = unitary_compile::reck_decompose(&u, 1e-10).map_err(|e| e.to_string())?;
            plan.validate().map_err(|e| e.to_string())?;
            worst = worst.max(unitary_compile::reck_reconstruct(&plan).max_abs_diff(&u));
            count += 1;
        }
    }
    for r in [1usize, 2] {
        let u = qstate::circuit_matrix(&quantize::window_circuit(r).unwrap()).unwrap();
        let plan = unitary_compile::reck_decompose(&u, 1e-10).map_err(|e| e.to_string())?;
        worst = worst.max(unitary_compile::reck_reconstruct(&plan).max_abs_diff(&u));
        count += 1;
    }
    let uf = quantize::build_uf_matrix(1).unwrap().to_dense().unwrap();
    ensure(unitary_compile::reck_decompose(&uf, 1e-10).is_err(), "U_f itself was accepted")?;
    ensure(worst <= 1e-9, format!("reconstruction error {worst:e}"))?;
    Ok(format!("{count} unitaries, max error {worst:.2e}"))
}

fn random_circuit(rng: &mut ChaCha8Rng, n: usize, len: usize) -> Circuit {
    let mut ops = Vec::with_capacity(len);
    while ops.len() < len {
        let op = match rng.gen_range(0..3) {
            0 => GateOp::Not(rng.gen_range(0..n)),
            1 => {
                let c = rng.gen_range(0..n);
                let t = rng.gen_range(0..n);
                if c == t {
                    continue;
                }
                GateOp::Cn { control: c, target: t }
            }
            _ => {
                let k = rng.gen_range(1..=3);
                let c = rng.gen_range(0..=n - k);
                let t = rng.gen_range(0..=n - k);
                if c < t + k && t < c + k {
                    continue;
                }
                GateOp::CollectiveCn { control_start: c, target_start: t, len: k }
            }
        };
        ops.push(op);
    }
    Circuit::new(n, ops).unwrap()
}

fn classical_run(circuit: &Circuit, bits: &mut [u8]) {
    for op in circuit.ops() {
        match *op {
            GateOp::Not(q) => bits[q] ^= 1,
            GateOp::Cn { control, target } => bits[target] ^= bits[control],
            GateOp::CollectiveCn { control_start, target_start, len } => {
                for k in 0..len {
                    bits[target_start + k] ^= bits[control_start + k];
                }
            }
            GateOp::BlockReset { .. } => unreachable!(),
        }
    }
}

fn performance() -> Outcome {
    let n = 20;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let circuit = random_circuit(&mut rng, n, 1000);
    let amps: Vec<qsca_core::C64> = (0..1usize << n)
        .map(|_| qsca_core::C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let mut state = StateVector::new(n, amps.iter().map(|a| a / norm).collect()).unwrap();
    let t0 = Instant::now();
    state.apply_circuit_in_place(&circuit).map_err(|e| e.to_string())?;
    let gates = t0.elapsed();
    ensure((state.norm() - 1.0).abs() < 1e-9, "norm drifted")?;
    budget(gates, 5.0)?;
    // correctness against a bit-level run
    let x = rng.gen_range(0..1usize << n);
    let mut bits = bits_of(x, n);
    classical_run(&circuit, &mut bits);
    let out = StateVector::from_index(n, x).unwrap().apply_circuit(&circuit).unwrap();
    ensure(out.as_basis_index() == Some(index_of(&bits)), "circuit disagrees with the bit-level run")?;

    let t1 = Instant::now();
    let op = quantize::build_uf_matrix(3).map_err(|e| e.to_string())?;
    let rep = quantize::check_partial_isometry(&op);
    let uf = t1.elapsed();
    ensure(rep.is_partial_isometry(), "r=3 check failed")?;
    budget(uf, 1.0)?;
    Ok(format!(
        "1000 gates on 20 qubits in {:.3}s; U_f r=3 built and checked in {:.4}s",
        gates.as_secs_f64(),
        uf.as_secs_f64()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("block form r=2", block_form),
        ("partial-isometry identities", partial_isometry),
        ("gate factorization", factorization),
        ("quantum fast rule circuit", quantum_frt),
        ("generators", generators),
        ("chain Hamiltonian", hamiltonian),
        ("quantum parallelism", parallelism),
        ("classical fast rule", classical_frt),
        ("unitary decomposition round trip", reck),
        ("performance", performance),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
