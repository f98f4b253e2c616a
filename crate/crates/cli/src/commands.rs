use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qsca_core::frt_quantum::{self, FrtStagePlan};
use qsca_core::qstate::{self, ResetVariant};
use qsca_core::sca::{self, BasicString, Configuration, Rule};
use qsca_core::spin_chain::{self, GeneratorVariant};
use qsca_core::{quantize, suite, unitary_compile, Error, SparseOperator};

/// Text to emit and whether every check it reports passed.
#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub passed: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, passed: true }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(
                Error::StepDiverged { .. }
                | Error::DimensionTooLarge { .. }
                | Error::NotUnitary(_)
                | Error::NotHermitian(_),
            ) => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn in_file(path: &Path, e: Error) -> CliError {
    CliError::Usage(format!("{}: {e}", path.display()))
}

/// The requested format, or the first allowed one when none was given.
fn pick_format<'a>(requested: Option<&'a str>, allowed: &[&'a str]) -> Result<&'a str> {
    match requested {
        None => Ok(allowed[0]),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => Err(CliError::Usage(format!(
            "unsupported format `{f}`, expected one of: {}",
            allowed.join(", ")
        ))),
    }
}

pub fn emit(output: &Output, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, &output.text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => io::stdout()
            .write_all(output.text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "stdout".into(),
                source,
            }),
    }
}

pub fn evolve(
    radius: usize,
    config: &Path,
    steps: usize,
    bound: Option<usize>,
    fmt: Option<&str>,
) -> Result<Output> {
    let fmt = pick_format(fmt, &["ascii", "pbm"])?;
    let rule = Rule::new(radius)?;
    let start: Configuration = read(config)?.parse().map_err(|e| in_file(config, e))?;
    let history = match bound {
        None => sca::evolve(rule, &start, steps)?,
        Some(b) => {
            let mut h = vec![start];
            for t in 0..steps {
                let next = sca::step_with_bound(rule, &h[t], b).map_err(|e| match e {
                    Error::StepDiverged { bound, .. } => Error::StepDiverged {
                        bound,
                        at_time: Some(t),
                    },
                    other => other,
                })?;
                h.push(next);
            }
            h
        }
    };
    Ok(Output::ok(match fmt {
        "pbm" => sca::diagram_pbm(&history),
        _ => sca::diagram_ascii(&history),
    }))
}

pub fn uf_export(radius: usize, fmt: Option<&str>) -> Result<Output> {
    let fmt = pick_format(fmt, &["triplets", "csv"])?;
    let op = quantize::build_uf_matrix(radius)?;
    Ok(Output::ok(match fmt {
        "csv" => op.to_dense()?.to_integer_csv()?,
        _ => op.to_sparse().to_triplet_text(),
    }))
}

pub fn uf_check(radius: usize, fmt: Option<&str>) -> Result<Output> {
    pick_format(fmt, &["text"])?;
    let op = quantize::build_uf_matrix(radius)?;
    let rep = quantize::check_partial_isometry(&op);
    let text = format!(
        "radius {radius}, dimension {}\nrange residual {:e}\ndomain residual {:e}\n",
        op.dim(),
        rep.range_residual,
        rep.domain_residual
    );
    Ok(Output {
        text,
        passed: rep.is_partial_isometry(),
    })
}

/// Largest radius whose blocked matrix is printed in full.
const BLOCKFORM_PRINT_RADIUS: usize = 3;

pub fn uf_blockform(radius: usize, fmt: Option<&str>) -> Result<Output> {
    pick_format(fmt, &["text"])?;
    let op = quantize::build_uf_matrix(radius)?;
    let partition = quantize::partition_basis(radius)?;
    let blocked = quantize::represent_blocked(&op, &partition)?;
    let form = quantize::block_form(&blocked, &partition);
    let mut text = String::new();
    if radius <= BLOCKFORM_PRINT_RADIUS {
        text.push_str(&quantize::format_blocked(&blocked, form.invariant_size));
    }
    let shape = form.is_expected_shape();
    writeln!(
        text,
        "blocks {}+{}\nidentity block {}\nantidiagonal (1,..,1,0) {}\nstray entries {}",
        form.invariant_size,
        form.flipped_size,
        yes_no(form.identity_block),
        yes_no(shape),
        form.stray_entries
    )
    .unwrap();
    let passed = shape && (radius != 2 || (form.invariant_size == 16 && form.flipped_size == 16));
    Ok(Output { text, passed })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn circuit(
    radius: usize,
    site: Option<usize>,
    qubits: Option<usize>,
    total: Option<usize>,
    fmt: Option<&str>,
) -> Result<Output> {
    pick_format(fmt, &["gates"])?;
    let c = match (site, total) {
        (_, Some(n)) => quantize::total_step_circuit(radius, n)?,
        (Some(s), None) => {
            if s == 0 {
                return Err(CliError::Usage("sites are numbered from 1".into()));
            }
            let n = qubits.unwrap_or(2 * radius + 1);
            quantize::build_uf_circuit(radius, s - 1, n)?
        }
        (None, None) => quantize::window_circuit(radius)?,
    };
    Ok(Output::ok(qstate::emit_gatelist(&c)))
}

pub fn hamiltonian(radius: usize, sites: usize, variant: &str, gap: bool, fmt: Option<&str>) -> Result<Output> {
    pick_format(fmt, &["terms"])?;
    let variant: GeneratorVariant = variant.parse()?;
    let h = spin_chain::build_chain_hamiltonian(sites, radius, variant)?.simplified();
    let mut text = h.to_text();
    if gap {
        let g = spin_chain::generation_gap(sites, radius, variant)?;
        writeln!(text, "# chain gap {:.6e}", g.chain_gap).unwrap();
        writeln!(text, "# site gap {:.6e}", g.site_gap).unwrap();
        writeln!(text, "# product vs circuit {:.6e}", g.product_vs_circuit).unwrap();
    }
    Ok(Output::ok(text))
}

pub fn frt_classical(
    radius: usize,
    seed: u64,
    particle: Option<&Path>,
    random: Option<usize>,
    max_blocks: usize,
    horizon: usize,
    fmt: Option<&str>,
) -> Result<Output> {
    pick_format(fmt, &["text"])?;
    let rule = Rule::new(radius)?;
    if let Some(path) = particle {
        let config: Configuration = read(path)?.parse().map_err(|e| in_file(path, e))?;
        let parts = sca::parse_particles(rule, &config);
        if parts.len() != 1 {
            return Err(CliError::Usage(format!(
                "{}: expected one particle, found {}",
                path.display(),
                parts.len()
            )));
        }
        let rep = sca::frt_check(rule, &parts[0], horizon);
        return Ok(Output {
            passed: !rep.condition_held || rep.all_matched(),
            text: rep.to_text(),
        });
    }
    let count = random.ok_or_else(|| CliError::Usage("give --particle or --random".into()))?;
    if max_blocks == 0 {
        return Err(CliError::Usage("--max-blocks must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (kept, draws) = suite::sample_frt_particles(rule, max_blocks, count, count * 1000, &mut rng);
    let mut text = String::new();
    let mut matched = 0;
    for (p, rep) in &kept {
        let blocks: Vec<String> = p.blocks().iter().map(|b| b.to_string()).collect();
        let ok = rep.all_matched();
        matched += usize::from(ok);
        let shift = rep.return_shift.map_or("-".to_string(), |s| s.to_string());
        writeln!(
            text,
            "{} period {} return shift {shift} {}",
            blocks.join(" "),
            rep.prediction.period,
            if ok { "matched" } else { "MISMATCHED" }
        )
        .unwrap();
    }
    writeln!(text, "{matched}/{} matched, {draws} draws", kept.len()).unwrap();
    Ok(Output {
        text,
        passed: matched == kept.len() && kept.len() == count,
    })
}

pub struct FrtQuantumArgs<'a> {
    pub blocks: Option<&'a Path>,
    pub padding: Option<usize>,
    pub reset: &'a str,
    pub gates: bool,
    pub check_len: Option<usize>,
    pub samples: usize,
}

fn read_blocks(rule: Rule, path: &Path) -> Result<Vec<BasicString>> {
    let text = read(path)?;
    let blocks = text
        .lines()
        .map(|l| l.split('#').next().unwrap())
        .flat_map(str::split_whitespace)
        .map(|tok| BasicString::parse(rule, tok).map_err(|e| in_file(path, e)))
        .collect::<Result<Vec<_>>>()?;
    if blocks.is_empty() {
        return Err(CliError::Usage(format!("{}: no blocks", path.display())));
    }
    Ok(blocks)
}

pub fn frt_quantum(radius: usize, seed: u64, args: FrtQuantumArgs<'_>, fmt: Option<&str>) -> Result<Output> {
    let rule = Rule::new(radius)?;
    let variant: ResetVariant = args.reset.parse()?;
    let blocks = args.blocks.map(|p| read_blocks(rule, p)).transpose()?;
    let len = match (&blocks, args.check_len) {
        (Some(b), _) => b.len(),
        (None, Some(l)) if l > 0 => l,
        _ => return Err(CliError::Usage("give --blocks or --check-len".into())),
    };
    let padding = args.padding.unwrap_or(len + 1);
    if args.gates {
        pick_format(fmt, &["gates"])?;
        let plan = FrtStagePlan::new(rule, len, padding, variant);
        return Ok(Output::ok(qstate::emit_gatelist(&plan.to_circuit()?)));
    }
    pick_format(fmt, &["text"])?;
    match blocks {
        Some(b) => {
            let rep = frt_quantum::run_frt(rule, &b, padding, variant)?;
            Ok(Output {
                text: rep.to_text(),
                passed: rep.final_matches,
            })
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rep = frt_quantum::stage_identity_check(rule, len, &mut rng, args.samples)?;
            let mut text = format!(
                "{} particles of {} blocks ({}), padding {}\n",
                rep.instances,
                rep.particle_len,
                if rep.exhaustive { "exhaustive" } else { "random" },
                rep.padding
            );
            for (k, m) in rep.mismatches.iter().enumerate() {
                writeln!(text, "stage {k}: {m} mismatches").unwrap();
            }
            Ok(Output {
                text,
                passed: rep.passed(),
            })
        }
    }
}

pub fn parallelism(radius: usize, fmt: Option<&str>) -> Result<Output> {
    pick_format(fmt, &["text"])?;
    let rep = quantize::parallelism_demo(radius)?;
    Ok(Output {
        passed: rep.amplitude_error <= 1e-12 && (rep.output_norm - 1.0).abs() <= 1e-12,
        text: rep.to_text(),
    })
}

#[allow(clippy::too_many_arguments)]
pub fn reck(
    radius: usize,
    seed: u64,
    matrix: Option<&Path>,
    dim: Option<usize>,
    random: Option<usize>,
    circuit: bool,
    tol: f64,
    fmt: Option<&str>,
) -> Result<Output> {
    pick_format(fmt, &["plan"])?;
    let u = match (matrix, random, circuit) {
        (Some(path), _, _) => {
            let dim = dim.ok_or_else(|| CliError::Usage("--matrix needs --dim".into()))?;
            SparseOperator::from_triplet_text(dim, &read(path)?)
                .map_err(|e| in_file(path, e))?
                .to_dense()
        }
        (None, Some(n), _) => {
            if n == 0 {
                return Err(CliError::Usage("dimension must be positive".into()));
            }
            unitary_compile::random_unitary(n, &mut ChaCha8Rng::seed_from_u64(seed))
        }
        (None, None, true) => qstate::circuit_matrix(&quantize::window_circuit(radius)?)?,
        (None, None, false) => return Err(CliError::Usage("give --matrix, --random or --circuit".into())),
    };
    let plan = unitary_compile::reck_decompose(&u, tol)?;
    let err = unitary_compile::reck_reconstruct(&plan).max_abs_diff(&u);
    let mut text = format!(
        "# dimension {}, rotations {}, reconstruction error {:.3e}\n",
        plan.dim,
        plan.rotations.len(),
        err
    );
    text.push_str(&plan.to_text());
    Ok(Output {
        text,
        passed: err <= (plan.dim as f64 * tol).max(1e-12),
    })
}

pub fn check(seed: u64, fmt: Option<&str>) -> Result<Output> {
    pick_format(fmt, &["text"])?;
    let rep = suite::run_suite(seed)?;
    Ok(Output {
        passed: rep.passed(),
        text: rep.to_text(),
    })
}
