use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cll_cli::{
    append_record, exit_code, read_manifest, regression_suite, run, to_csv, write_atomic, Command, ExperimentConfig,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "cll", version, about = "Central extensions, lifting invariants, Hurwitz counts and random group models")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Worker threads; `CLL_THREADS` takes precedence when set.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Append the record as a JSON line to this file.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Also write the record as a CSV row to this file.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// ℓ-part of the Schur multiplier.
    Schur {
        #[arg(long)]
        group: String,
        #[arg(long)]
        ell: u64,
    },
    /// ℓ-Schur cover.
    Cover {
        #[arg(long)]
        group: String,
        #[arg(long)]
        ell: u64,
    },
    /// Lifting invariant of a product-one generating tuple.
    LiftingInvariant {
        #[arg(long)]
        group: String,
        #[arg(long)]
        ell: u64,
        #[arg(long, value_delimiter = ',')]
        tuple: Vec<usize>,
    },
    /// Component count b(G, c, q, n).
    HurwitzB {
        #[arg(long)]
        group: String,
        #[arg(long)]
        cset: String,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u64,
    },
    /// Frobenius-fixed vectors with every class used at least `min` times.
    HurwitzFixed {
        #[arg(long)]
        group: String,
        #[arg(long)]
        cset: String,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        min: u64,
    },
    /// Coefficient matrix of a relator in the commutator layer.
    RelatorMatrix {
        #[arg(long)]
        relator: String,
        #[arg(long, default_value_t = 0)]
        gens: usize,
        #[arg(long, default_value_t = 3)]
        ell: u64,
    },
    /// Pairing values of a central relator image.
    PairingImage {
        #[arg(long)]
        group: String,
        #[arg(long, value_delimiter = ',')]
        gens: Vec<usize>,
        #[arg(long)]
        relator: String,
        #[arg(long)]
        modulus: u64,
    },
    /// Moment of the fixed-quotient model.
    MomentY {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 2)]
        class: u8,
        #[arg(long = "H")]
        h: String,
        #[arg(long, value_delimiter = ',', default_value = "")]
        delta: Vec<String>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Moment of the three-manifold model.
    MomentZ {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ell: u64,
        #[arg(long, default_value_t = 2)]
        class: u8,
        #[arg(long = "H")]
        h: String,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Transitivity of automorphisms on surjections with a fixed invariant.
    OrbitCheck {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        q: u64,
        #[arg(long = "H")]
        h: String,
        #[arg(long, value_delimiter = ',', default_value = "")]
        delta: Vec<String>,
        /// Random pairs with constructed witnesses; all pairs when omitted.
        #[arg(long)]
        pairs: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a stored configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Rerun a manifest and compare with its expectations.
    Regress {
        #[arg(long)]
        manifest: PathBuf,
        /// Write the machine-readable report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn coords(v: &[String]) -> Result<Vec<u64>, String> {
    v.iter().filter(|s| !s.is_empty()).map(|s| s.trim().parse().map_err(|_| format!("bad coordinate {s:?}"))).collect()
}

fn threads(flag: Option<usize>) -> Result<Option<usize>, String> {
    match std::env::var("CLL_THREADS") {
        Ok(v) if !v.is_empty() => v.parse().map(Some).map_err(|_| format!("CLL_THREADS={v:?} is not a thread count")),
        _ => Ok(flag),
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn fail(code: i32, kind: &str, message: String, config: Option<&ExperimentConfig>) -> ExitCode {
    eprintln!("{}", json!({ "error": kind, "message": message, "config": config }));
    ExitCode::from(code as u8)
}

fn command(cmd: Cmd) -> Result<Command, String> {
    Ok(match cmd {
        Cmd::Schur { group, ell } => Command::Schur { group, ell },
        Cmd::Cover { group, ell } => Command::Cover { group, ell },
        Cmd::LiftingInvariant { group, ell, tuple } => Command::LiftingInvariant { group, ell, tuple },
        Cmd::HurwitzB { group, cset, q, n } => Command::HurwitzB { group, cset, q, n },
        Cmd::HurwitzFixed { group, cset, q, n, min } => Command::HurwitzFixed { group, cset, q, n, min },
        Cmd::RelatorMatrix { relator, gens, ell } => Command::RelatorMatrix { relator, gens, ell },
        Cmd::PairingImage { group, gens, relator, modulus } => Command::PairingImage { group, gens, relator, modulus },
        Cmd::MomentY { n, ell, q, class, h, delta, samples, seed } => {
            Command::MomentY { n, ell, q, class, h, delta: coords(&delta)?, samples, seed }
        }
        Cmd::MomentZ { n, ell, class, h, samples, seed } => Command::MomentZ { n, ell, class, h, samples, seed },
        Cmd::OrbitCheck { n, ell, q, h, delta, pairs, seed } => Command::OrbitCheck { n, ell, q, h, delta: coords(&delta)?, pairs, seed },
        Cmd::Run { .. } | Cmd::Regress { .. } => unreachable!("handled by the caller"),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let threads = match threads(cli.common.threads) {
        Ok(t) => t,
        Err(m) => return fail(1, "usage", m, None),
    };
    if let Cmd::Regress { manifest, report } = &cli.cmd {
        let m = match read_manifest(manifest) {
            Ok(m) => m,
            Err(e) => return fail(1, "manifest", e.to_string(), None),
        };
        let rep = regression_suite(&m, threads);
        let text = serde_json::to_string_pretty(&rep).expect("reports serialize");
        emit(&text);
        if let Some(path) = report {
            if let Err(e) = write_atomic(path, text.as_bytes()) {
                return fail(2, "io", e.to_string(), None);
            }
        }
        return ExitCode::from(if rep.all_pass() { 0 } else { 3 });
    }
    let mut cfg = match cli.cmd {
        Cmd::Run { config } => match std::fs::read(&config).map_err(|e| e.to_string()).and_then(|b| serde_json::from_slice::<ExperimentConfig>(&b).map_err(|e| e.to_string())) {
            Ok(c) => c,
            Err(m) => return fail(1, "config", m, None),
        },
        other => match command(other) {
            Ok(c) => ExperimentConfig::new(c),
            Err(m) => return fail(1, "usage", m, None),
        },
    };
    cfg.threads = threads.or(cfg.threads);
    cfg.output = cli.common.output.or(cfg.output);
    let rec = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            let code = exit_code(&e);
            return fail(code, if code == 1 { "input" } else { "computation" }, e.to_string(), Some(&cfg));
        }
    };
    emit(&serde_json::to_string_pretty(&rec).expect("records serialize"));
    if let Some(path) = &cfg.output {
        if let Err(e) = append_record(path, &rec) {
            return fail(2, "io", e.to_string(), Some(&cfg));
        }
    }
    if let Some(path) = &cli.common.csv {
        let written = to_csv(std::slice::from_ref(&rec)).and_then(|text| write_atomic(path, text.as_bytes()));
        if let Err(e) = written {
            return fail(2, "io", e.to_string(), Some(&cfg));
        }
    }
    ExitCode::SUCCESS
}
