//! `latlab`: runs one experiment and writes a structured report.
//!
//! Exit codes: 0 on success, 2 on a precondition or config error, 3 when the
//! outcome is numerically borderline.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ConfigError, ExperimentConfig, Format};
use report::Report;

#[derive(Parser)]
#[command(name = "latlab", version, about = "Experiments on lattices in locally compact groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Named group or element (sl2z, sl2z-T, cusp-model, cyclic-hyperbolic(0.05), octagon-genus2, z2, p2).
    #[arg(long, global = true)]
    preset: Option<String>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Word-ball radius L.
    #[arg(long, global = true)]
    word_ball: Option<usize>,
    /// Ball radius R (nerve cover radius for `presentation`).
    #[arg(long, global = true)]
    radius: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// `key = value` lines; settings here override flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Command parameter, e.g. `--set primes=5,7,11`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Classify an isometry (`--set matrix=a,b,c,d` or a preset).
    Classify,
    /// Thick-thin decomposition of a Fuchsian preset.
    Thickthin,
    /// Check that psi and its gradient vanish together.
    PsiCheck,
    /// Presentation from the nerve of an epsilon-net (space=torus|octagon).
    Presentation,
    /// Count presentations N(c, v) and the growth ratio.
    CountPresentations,
    /// Chabauty limit of a named family of subgroups of R^n.
    Chabauty,
    /// Convergent subsequence of lattices with bounded covolume and systole.
    Mahler,
    /// Covolumes and certificate for the non-uniform solvable lattice.
    Solvable,
    /// Reduce a Heisenberg element into the unit cube.
    Heisenberg,
    /// Commutator contraction near the identity.
    Zassenhaus,
    /// Abelian subgroup of bounded index in a finite linear group.
    Jordan,
    /// Translation lattice and point group of a crystallographic group.
    Crystallo,
    /// Recurrence of powers into a neighborhood of the lattice.
    Recurrence,
    /// Dimension of the linear span of a word ball.
    Span,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Thickthin => "thickthin",
            Command::PsiCheck => "psi-check",
            Command::Presentation => "presentation",
            Command::CountPresentations => "count-presentations",
            Command::Chabauty => "chabauty",
            Command::Mahler => "mahler",
            Command::Solvable => "solvable",
            Command::Heisenberg => "heisenberg",
            Command::Zassenhaus => "zassenhaus",
            Command::Jordan => "jordan",
            Command::Crystallo => "crystallo",
            Command::Recurrence => "recurrence",
            Command::Span => "span",
        }
    }
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::new(cli.command.name());
    cfg.preset = cli.preset.clone();
    cfg.epsilon = cli.epsilon;
    cfg.word_ball = cli.word_ball;
    cfg.radius = cli.radius;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    for kv in &cli.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| ConfigError(format!("--set expects KEY=VALUE, got '{kv}'")))?;
        cfg.set(k, v)?;
    }
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        cfg.apply_file(&text)?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("latlab: config error: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match commands::run(&mut cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("latlab {}: {e}", cfg.command);
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = Report::new(&cfg, &outcome.result).render(outcome.table.as_ref());
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("latlab: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}
