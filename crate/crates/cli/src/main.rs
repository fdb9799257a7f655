use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use chiralkit_core::cohomology::{cohomology_dims, ComputeOptions, Ring, T_LIMIT};
use chiralkit_core::lattice::{enum_graded_k, enum_graded_kdual, pair_int, pairing, LatticeEnv, DIM};
use chiralkit_core::model::{ModelError, ModelFile};
use chiralkit_core::oracle::{dense_cohomology_dims, jacobian_dims};
use chiralkit_core::sample::{random_model, rng};
use chiralkit_core::Model;
use chiralkit_vertex::checks::{self, CheckError, CheckReport, GeneralAnsatz};

const LONG_VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "\nmodel format: chiralkit-model-v1\nansatz format: chiralkit-ansatz-v1"
);

#[derive(Parser)]
#[command(name = "chiralkit", version, long_version = LONG_VERSION)]
#[command(about = "Chiral de Rham computations for (0,2) quintic models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lattice data of the quintic.
    Lattice {
        #[command(subcommand)]
        what: LatticeCmd,
    },
    /// Checks that the model's differential squares to zero.
    CheckDiff {
        #[arg(long)]
        model: Option<PathBuf>,
        /// A general ansatz file to check instead of (or besides) a model.
        #[arg(long)]
        general: Option<PathBuf>,
    },
    /// Graded dimensions of the chiral ring.
    Chiral {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "A")]
        ring: Ring,
        #[arg(long, default_value_t = 4)]
        tmax: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write tab-separated `t w dim` rows instead of JSON.
        #[arg(long)]
        tsv: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Graded dimensions of the quotient by `R^0..R^4` where `F^i = x_i R^i`.
    Jacobian {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 16)]
        dmax: u32,
    },
    /// Sparse tables against the dense rational oracle.
    OracleCompare {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 3)]
        tmax: u32,
        #[arg(long)]
        ring: Option<Ring>,
    },
    /// Runs one scripted identity check.
    Verify {
        #[arg(long)]
        check: CheckId,
        /// Base dimension for the hypersurface checks.
        #[arg(long, default_value_t = 2)]
        dim: u8,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random models for `prop3.4` and `d-squared`.
        #[arg(long, default_value_t = 3)]
        models: usize,
        /// Top cochain degree for `d-squared`.
        #[arg(long, default_value_t = 4)]
        ttop: u32,
    },
}

#[derive(Subcommand)]
enum LatticeCmd {
    Info,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckId {
    #[value(name = "prop3.4")]
    Prop34,
    #[value(name = "prop3.5")]
    Prop35,
    #[value(name = "lemma4.6")]
    Lemma46,
    #[value(name = "lemma4.8")]
    Lemma48,
    #[value(name = "remark-beta")]
    RemarkBeta,
    #[value(name = "vertop")]
    Vertop,
    #[value(name = "d-squared")]
    DSquared,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Model { path: PathBuf, source: ModelError },
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error("{0}")]
    Usage(String),
}

/// Whether a command's claim held.
enum Outcome {
    Pass,
    Fail,
}

impl From<bool> for Outcome {
    fn from(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, s: &str) -> Result<(), CliError> {
    std::fs::write(path, s).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a model; `strict` also enforces `x_i | F^i`.
fn load_model(path: &Path, strict: bool) -> Result<Model, CliError> {
    let file = ModelFile::from_json_str(&read(path)?);
    let model = file.and_then(|f| if strict { f.into_model() } else { f.into_model_unchecked() });
    model.map_err(|source| CliError::Model {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(report: &CheckReport) -> Outcome {
    print!("{}", report.to_json());
    report.pass.into()
}

fn lattice_info() -> Outcome {
    let env = LatticeEnv::quintic();
    let duality: Vec<Vec<String>> = (0..DIM)
        .map(|i| {
            (0..DIM)
                .map(|j| pairing(&env.dual_basis[i], &env.vertices[j]).to_string())
                .collect()
        })
        .collect();
    let info = json!({
        "graded_k": (0..=3).map(|k| enum_graded_k(k).len()).collect::<Vec<_>>(),
        "graded_kdual": (0..=3).map(|l| enum_graded_kdual(l).len()).collect::<Vec<_>>(),
        "delta_dual": env.delta_dual_points().iter().map(|n| n.to_string()).collect::<Vec<_>>(),
        "duality_m_i_v_j": duality,
        "deg_v_i": env.vertices.iter().map(|v| pair_int(&env.deg, v)).collect::<Vec<_>>(),
    });
    println!("{}", serde_json::to_string_pretty(&info).expect("info serializes"));
    Outcome::Pass
}

fn check_diff(model: Option<&Path>, general: Option<&Path>) -> Result<Outcome, CliError> {
    if model.is_none() && general.is_none() {
        return Err(CliError::Usage("check-diff needs --model or --general".into()));
    }
    let mut ok = true;
    if let Some(p) = model {
        let m = load_model(p, false)?;
        ok &= matches!(emit(&checks::check_differential_quintic(&m)), Outcome::Pass);
    }
    if let Some(p) = general {
        let a = GeneralAnsatz::from_json_str(&read(p)?).map_err(CheckError::from)?;
        ok &= matches!(emit(&checks::check_differential_general(&a)?), Outcome::Pass);
    }
    Ok(ok.into())
}

fn check_t_max(t_max: u32) -> Result<(), CliError> {
    if !(2..=T_LIMIT).contains(&t_max) {
        return Err(CliError::Usage(format!("--tmax must be in 2..={T_LIMIT}, got {t_max}")));
    }
    Ok(())
}

fn chiral(
    model: &Path,
    ring: Ring,
    t_max: u32,
    out: Option<&Path>,
    tsv: bool,
    threads: Option<usize>,
) -> Result<Outcome, CliError> {
    check_t_max(t_max)?;
    let m = load_model(model, true)?;
    let table = cohomology_dims(&m, ring, t_max, &ComputeOptions { threads })
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let text = if tsv { table.to_tsv() } else { table.to_json() };
    match out {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    Ok(Outcome::Pass)
}

fn jacobian(model: &Path, d_max: u32) -> Result<Outcome, CliError> {
    let m = load_model(model, true)?;
    let r = m.f.r_polys().map_err(|source| CliError::Model {
        path: model.to_path_buf(),
        source,
    })?;
    let report = jacobian_dims(&r, d_max);
    let dims: Vec<_> = report
        .dims
        .iter()
        .enumerate()
        .map(|(d, n)| json!({"d": d, "dim": n}))
        .collect();
    println!("{}", serde_json::to_string_pretty(&json!({ "dims": dims })).expect("serializes"));
    Ok(Outcome::Pass)
}

fn oracle_compare(model: &Path, t_max: u32, ring: Option<Ring>) -> Result<Outcome, CliError> {
    check_t_max(t_max)?;
    let m = load_model(model, true)?;
    let rings = ring.map_or(vec![Ring::A, Ring::B], |r| vec![r]);
    let mut ok = true;
    let mut rows = Vec::new();
    for ring in rings {
        let sparse = cohomology_dims(&m, ring, t_max, &ComputeOptions::default())
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let dense = dense_cohomology_dims(&m, ring, t_max).map_err(|e| CliError::Usage(e.to_string()))?;
        let equal = sparse == dense;
        ok &= equal;
        rows.push(json!({
            "ring": ring.to_string(),
            "equal": equal,
            "sparse_totals": sparse.totals().into_values().collect::<Vec<_>>(),
            "dense_totals": dense.totals().into_values().collect::<Vec<_>>(),
        }));
    }
    println!("{}", serde_json::to_string_pretty(&rows).expect("serializes"));
    Ok(ok.into())
}

fn sample_models(seed: u64, count: usize) -> Vec<Model> {
    let mut r = rng(seed);
    std::iter::once(Model::fermat())
        .chain((0..count).map(|_| random_model(&mut r)))
        .collect()
}

fn verify(check: CheckId, dim: u8, seed: u64, models: usize, t_top: u32) -> Result<Outcome, CliError> {
    let report = match check {
        CheckId::Prop34 => checks::verify_prop34(&sample_models(seed, models))?,
        CheckId::Prop35 => checks::verify_lj_descend()?,
        CheckId::Lemma46 => checks::verify_hat_fields(dim)?,
        CheckId::Lemma48 => checks::verify_hat_lj(dim)?,
        CheckId::RemarkBeta => checks::verify_remark_beta(dim)?,
        CheckId::Vertop => checks::verify_vertop(seed)?,
        CheckId::DSquared => checks::verify_d_squared(&sample_models(seed, models), t_top)?,
    };
    Ok(emit(&report))
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Lattice { what: LatticeCmd::Info } => Ok(lattice_info()),
        Command::CheckDiff { model, general } => check_diff(model.as_deref(), general.as_deref()),
        Command::Chiral {
            model,
            ring,
            tmax,
            out,
            tsv,
            threads,
        } => chiral(&model, ring, tmax, out.as_deref(), tsv, threads),
        Command::Jacobian { model, dmax } => jacobian(&model, dmax),
        Command::OracleCompare { model, tmax, ring } => oracle_compare(&model, tmax, ring),
        Command::Verify {
            check,
            dim,
            seed,
            models,
            ttop,
        } => verify(check, dim, seed, models, ttop),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn version_lists_current_formats() {
        assert!(LONG_VERSION.contains(chiralkit_core::model::MODEL_FORMAT));
        assert!(LONG_VERSION.contains(checks::differential::ANSATZ_FORMAT));
    }

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
