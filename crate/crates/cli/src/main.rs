use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

use commands::{CliError, Output};

/// Quantized soliton cellular automata: experiments and verification.
#[derive(Debug, Parser)]
#[command(name = "qsca", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Global {
    /// Automaton radius r.
    #[arg(long, short = 'r', global = true, default_value_t = 2)]
    radius: usize,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; the accepted values depend on the subcommand.
    #[arg(long, global = true)]
    format: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Space-time diagram of a configuration file.
    Evolve {
        config: PathBuf,
        #[arg(long, default_value_t = 32)]
        steps: usize,
        /// Sites scanned past the old support before a step is declared divergent.
        #[arg(long)]
        bound: Option<usize>,
    },
    /// The transition matrix U_f of one window.
    Uf {
        #[arg(value_enum)]
        action: UfAction,
    },
    /// Gate list of a site circuit or of a whole time step; with no
    /// options, the window circuit on 2r+1 qubits.
    Circuit {
        /// Updated site (1-based).
        #[arg(long, conflicts_with = "total")]
        site: Option<usize>,
        /// Register size for `--site`; defaults to 2r+1.
        #[arg(long, requires = "site")]
        qubits: Option<usize>,
        /// Emit the full step over this many sites.
        #[arg(long)]
        total: Option<usize>,
    },
    /// Pauli-term expansion of the chain Hamiltonian.
    Hamiltonian {
        #[arg(long, default_value_t = 6)]
        sites: usize,
        #[arg(long, default_value = "verified")]
        variant: String,
        /// Also report how far exp(iπH) is from the gate-level step (up to 8 sites).
        #[arg(long)]
        gap: bool,
    },
    /// Check the fast rule on a particle or on random particles.
    FrtClassical {
        /// Configuration file holding a single particle.
        #[arg(long, conflicts_with = "random")]
        particle: Option<PathBuf>,
        /// Number of random detector-passing particles to check.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 3)]
        max_blocks: usize,
        /// Extra steps to simulate beyond the period.
        #[arg(long, default_value_t = 0)]
        horizon: usize,
    },
    /// Run the block circuit that moves a qubit particle.
    FrtQuantum {
        /// File of whitespace-separated blocks A^1 .. A^L.
        #[arg(long)]
        blocks: Option<PathBuf>,
        /// Padding blocks; defaults to L+1.
        #[arg(long)]
        padding: Option<usize>,
        #[arg(long, default_value = "extended")]
        reset: String,
        /// Print the stage gate list instead of running it.
        #[arg(long)]
        gates: bool,
        /// Compare every stage with the XOR prediction for particles of this length.
        #[arg(long, conflicts_with = "blocks")]
        check_len: Option<usize>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Apply U_f once to the superposition of all nonzero words.
    Parallelism,
    /// Decompose a unitary into embedded 2x2 rotations and phases.
    Reck {
        /// Sparse-triplet matrix file (needs --dim).
        #[arg(long, requires = "dim", conflicts_with_all = ["random", "circuit"])]
        matrix: Option<PathBuf>,
        #[arg(long)]
        dim: Option<usize>,
        /// Seeded random unitary of this dimension.
        #[arg(long, conflicts_with = "circuit")]
        random: Option<usize>,
        /// The window circuit unitary at --radius.
        #[arg(long)]
        circuit: bool,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Run the invariant suite.
    Check,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum UfAction {
    Export,
    Check,
    Blockform,
}

fn run(cli: Cli) -> Result<Output, CliError> {
    let g = &cli.global;
    let fmt = g.format.as_deref();
    match cli.command {
        Command::Evolve { config, steps, bound } => commands::evolve(g.radius, &config, steps, bound, fmt),
        Command::Uf { action } => match action {
            UfAction::Export => commands::uf_export(g.radius, fmt),
            UfAction::Check => commands::uf_check(g.radius, fmt),
            UfAction::Blockform => commands::uf_blockform(g.radius, fmt),
        },
        Command::Circuit { site, qubits, total } => commands::circuit(g.radius, site, qubits, total, fmt),
        Command::Hamiltonian { sites, variant, gap } => commands::hamiltonian(g.radius, sites, &variant, gap, fmt),
        Command::FrtClassical {
            particle,
            random,
            max_blocks,
            horizon,
        } => commands::frt_classical(g.radius, g.seed, particle.as_deref(), random, max_blocks, horizon, fmt),
        Command::FrtQuantum {
            blocks,
            padding,
            reset,
            gates,
            check_len,
            samples,
        } => commands::frt_quantum(
            g.radius,
            g.seed,
            commands::FrtQuantumArgs {
                blocks: blocks.as_deref(),
                padding,
                reset: &reset,
                gates,
                check_len,
                samples,
            },
            fmt,
        ),
        Command::Parallelism => commands::parallelism(g.radius, fmt),
        Command::Reck {
            matrix,
            dim,
            random,
            circuit,
            tol,
        } => commands::reck(g.radius, g.seed, matrix.as_deref(), dim, random, circuit, tol, fmt),
        Command::Check => commands::check(g.seed, fmt),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // help and version requests are not errors
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let out = cli.global.out.clone();
    match run(cli).and_then(|o| commands::emit(&o, out.as_deref()).map(|_| o)) {
        Ok(o) if o.passed => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(2),
        Err(e) => {
            eprintln!("qsca: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
