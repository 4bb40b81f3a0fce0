//! Command-line front end, representation files and report documents.
//!
//! Exit codes: 0 success, 1 a catalog verification failed, 2 the solver did
//! not converge, 64 usage error, 65 bad input data, 74 output could not be
//! written.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::info;
use nalgebra::Complex;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::catalog::{self, Parity};
use crate::error::Error;
use crate::liegroup::{CMatrix, GroupElement, GroupSpec, C64};
use crate::strata::{self, CensusConfig, PointClassification};
use crate::surface::{generator_name, BundleData, Representation};
use crate::tolerance::Tolerances;
use crate::variety::{self, SolverConfig};

pub const REP_SCHEMA: &str = "ymstrata/representation";
pub const REPORT_SCHEMA: &str = "ymstrata/report";
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT_FAILED: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_IO: i32 = 74;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: msg.into(),
        }
    }

    fn data(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_DATA,
            message: msg.into(),
        }
    }

    fn io(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_IO,
            message: msg.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoConvergence { .. } => EXIT_NO_CONVERGENCE,
            _ => EXIT_DATA,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "ymstrata",
    version,
    about = "Orbit-type strata of surface-group representation varieties"
)]
pub struct Cli {
    /// Override a tolerance, e.g. `--tolerance rank=1e-9` (group, num, rank, branch, rep).
    #[arg(long = "tolerance", global = true, value_name = "NAME=VALUE")]
    pub tolerances: Vec<String>,
    /// Increase log verbosity on standard error.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find a point of the representation variety.
    Solve {
        #[command(flatten)]
        bundle: BundleArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        max_iters: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify the point stored in a representation file.
    Classify {
        rep_file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the variety and tabulate orbit types.
    Census {
        #[command(flatten)]
        bundle: BundleArgs,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, default_value_t = 50)]
        density_trials: usize,
        /// Skip the catalog representatives of lower strata.
        #[arg(long)]
        no_targeted: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named catalog construction.
    Catalog {
        /// One of genus1-torus, su2-strata, so3-covering, u2-parity,
        /// o2-variety, o3-splitting, ramanathan.
        name: String,
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        genus: Option<usize>,
        #[arg(long)]
        parity: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        phi: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct BundleArgs {
    /// SU2, SO3, U2, O2, O3 or Tk (k-torus).
    #[arg(long)]
    pub group: String,
    #[arg(long, default_value_t = 2)]
    pub genus: usize,
    /// `I`, `-I`, or `phase=θ` for the scalar `e^{iθ}I` (U2, tori).
    #[arg(long, default_value = "I", allow_hyphen_values = true)]
    pub central: String,
    /// Component signs per generator for O2/O3, e.g. `-1,1,1,1`.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,
}

fn parse_group(s: &str) -> CliResult<GroupSpec> {
    s.parse().map_err(|e: Error| CliError::usage(e.to_string()))
}

fn parse_phi(s: &str) -> CliResult<Vec<i8>> {
    s.split(',')
        .map(|t| match t.trim() {
            "1" | "+1" => Ok(1),
            "-1" => Ok(-1),
            other => Err(CliError::usage(format!(
                "component sign {other:?} is not ±1"
            ))),
        })
        .collect()
}

fn parse_central(spec: GroupSpec, s: &str) -> CliResult<GroupElement> {
    let s = s.trim();
    let scalar = match s {
        "I" | "1" => return Ok(spec.identity()),
        "-I" | "-1" => C64::new(-1.0, 0.0),
        _ => {
            let theta: f64 = s
                .strip_prefix("phase=")
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| {
                    CliError::usage(format!("central target {s:?} is not I, -I or phase=θ"))
                })?;
            Complex::from_polar(1.0, theta)
        }
    };
    let g = spec.scalar(scalar);
    GroupElement::new(spec, g.into_matrix()).map_err(|e| CliError::usage(e.to_string()))
}

impl BundleArgs {
    pub fn bundle(&self) -> CliResult<BundleData> {
        let spec = parse_group(&self.group)?;
        let central = parse_central(spec, &self.central)?;
        let phi = match (&self.phi, spec.is_connected()) {
            (Some(p), _) => Some(parse_phi(p)?),
            (None, false) => Some(crate::surface::default_phi(self.genus)),
            (None, true) => None,
        };
        BundleData::new(spec, self.genus, central, phi).map_err(|e| CliError::usage(e.to_string()))
    }
}

/// Matrix with separate real and imaginary parts, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixData {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixData {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let rows = |f: fn(&C64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        MatrixData {
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    pub fn to_matrix(&self) -> CliResult<CMatrix> {
        let n = self.re.len();
        let square = |rows: &[Vec<f64>]| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if n == 0 || !square(&self.re) || !square(&self.im) {
            return Err(CliError::data(
                "matrix must be square with matching real and imaginary parts",
            ));
        }
        Ok(CMatrix::from_fn(n, n, |i, j| {
            C64::new(self.re[i][j], self.im[i][j])
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CentralData {
    Named(String),
    Matrix(MatrixData),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolonomyData {
    pub generator: String,
    #[serde(flatten)]
    pub matrix: MatrixData,
}

/// Serialized representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepFile {
    pub schema: String,
    pub version: u32,
    pub group: GroupSpec,
    pub genus: usize,
    pub central: CentralData,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<i8>>,
    pub holonomies: Vec<HolonomyData>,
    pub residual: f64,
}

impl RepFile {
    pub fn from_representation(rho: &Representation) -> Self {
        let bundle = rho.bundle();
        let spec = bundle.spec();
        let c = bundle.central();
        let central = if *c == spec.identity() {
            CentralData::Named("I".into())
        } else if *c == spec.scalar(C64::new(-1.0, 0.0)) {
            CentralData::Named("-I".into())
        } else {
            CentralData::Matrix(MatrixData::from_matrix(c.matrix()))
        };
        RepFile {
            schema: REP_SCHEMA.into(),
            version: SCHEMA_VERSION,
            group: spec,
            genus: bundle.genus(),
            central,
            phi: bundle.phi().map(|p| p.to_vec()),
            holonomies: rho
                .holonomies()
                .iter()
                .enumerate()
                .map(|(i, g)| HolonomyData {
                    generator: generator_name(i),
                    matrix: MatrixData::from_matrix(g.matrix()),
                })
                .collect(),
            residual: rho.residual(),
        }
    }

    /// Rebuild and validate the representation.
    pub fn to_representation(&self) -> CliResult<Representation> {
        if self.schema != REP_SCHEMA || self.version != SCHEMA_VERSION {
            return Err(CliError::data(format!(
                "unsupported document {}@{} (expected {REP_SCHEMA}@{SCHEMA_VERSION})",
                self.schema, self.version
            )));
        }
        let spec = self.group;
        let central = match &self.central {
            CentralData::Named(s) => {
                parse_central(spec, s).map_err(|e| CliError::data(e.message))?
            }
            CentralData::Matrix(m) => GroupElement::new(spec, m.to_matrix()?)?,
        };
        let bundle = BundleData::new(spec, self.genus, central, self.phi.clone())?;
        let holonomies = self
            .holonomies
            .iter()
            .map(|h| Ok(GroupElement::new(spec, h.matrix.to_matrix()?)?))
            .collect::<CliResult<Vec<_>>>()?;
        Ok(Representation::new(bundle, holonomies)?)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
    }
}

/// Output document of every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema: String,
    pub version: u32,
    pub tool_version: String,
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub tolerances: Tolerances,
    pub result: Value,
}

impl ReportFile {
    fn new(command: &str, inputs: BTreeMap<String, Value>, result: Value) -> Self {
        ReportFile {
            schema: REPORT_SCHEMA.into(),
            version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            inputs,
            tolerances: Tolerances::current(),
            result,
        }
    }
}

/// Serializable view of a point classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub label: String,
    pub identity_dim: usize,
    pub components: usize,
    pub h0: usize,
    pub h1: usize,
    pub h2: usize,
    pub stratum_dim: usize,
    pub irreducible: bool,
    pub nonsingular: bool,
    pub top: bool,
    pub action_defect: f64,
    pub stabilizer_algebra: Vec<Vec<f64>>,
    pub component_generators: Vec<MatrixData>,
}

impl From<&PointClassification> for PointSummary {
    fn from(c: &PointClassification) -> Self {
        PointSummary {
            label: c.label.to_string(),
            identity_dim: c.label.identity_dim,
            components: c.label.components,
            h0: c.h.0,
            h1: c.h.1,
            h2: c.h.2,
            stratum_dim: c.stratum_dim,
            irreducible: c.irreducible,
            nonsingular: c.nonsingular,
            top: c.top,
            action_defect: c.action_defect,
            stabilizer_algebra: c.stabilizer_algebra.iter().map(|x| x.coords()).collect(),
            component_generators: c
                .component_generators
                .iter()
                .map(|g| MatrixData::from_matrix(g.matrix()))
                .collect(),
        }
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

fn bundle_inputs(b: &BundleArgs) -> BTreeMap<String, Value> {
    let mut m = BTreeMap::new();
    m.insert("group".into(), json!(b.group));
    m.insert("genus".into(), json!(b.genus));
    m.insert("central".into(), json!(b.central));
    m.insert("phi".into(), json!(b.phi));
    m
}

/// Output of one command: the document plus its exit code.
pub struct Outcome {
    pub document: String,
    pub out: Option<PathBuf>,
    pub code: i32,
}

pub fn cmd_solve(bundle: &BundleArgs, seed: u64, max_iters: usize) -> CliResult<(String, i32)> {
    let b = bundle.bundle()?;
    let cfg = SolverConfig {
        seed,
        max_iters,
        ..SolverConfig::default()
    };
    let rho = variety::solve(&b, &cfg, None)?;
    info!("converged with residual {:.3e}", rho.residual());
    Ok((render(&RepFile::from_representation(&rho)), EXIT_OK))
}

pub fn cmd_classify(rep_file: &Path) -> CliResult<(String, i32)> {
    let file = RepFile::load(rep_file)?;
    let rho = file.to_representation()?;
    let class = strata::classify_point(&rho)?;
    let mut inputs = BTreeMap::new();
    inputs.insert("rep_file".into(), json!(rep_file.display().to_string()));
    inputs.insert("group".into(), json!(file.group));
    inputs.insert("genus".into(), json!(file.genus));
    let result = json!({
        "residual": rho.residual(),
        "classification": to_value(&PointSummary::from(&class)),
    });
    Ok((
        render(&ReportFile::new("classify", inputs, result)),
        EXIT_OK,
    ))
}

pub fn cmd_census(
    bundle: &BundleArgs,
    samples: usize,
    seed: u64,
    threads: usize,
    density_trials: usize,
    targeted: bool,
) -> CliResult<(String, i32)> {
    let b = bundle.bundle()?;
    let cfg = CensusConfig {
        solver: SolverConfig::with_seed(seed),
        threads,
        include_targeted: targeted,
        density_trials,
        ..CensusConfig::default()
    };
    let report = strata::census(&b, samples, &cfg);
    let mut inputs = bundle_inputs(bundle);
    inputs.insert("samples".into(), json!(samples));
    inputs.insert("seed".into(), json!(seed));
    inputs.insert("threads".into(), json!(threads));
    inputs.insert("density_trials".into(), json!(density_trials));
    inputs.insert("targeted".into(), json!(targeted));
    Ok((
        render(&ReportFile::new("census", inputs, to_value(&report))),
        EXIT_OK,
    ))
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_catalog(
    name: &str,
    group: Option<&str>,
    genus: Option<usize>,
    parity: Option<&str>,
    phi: Option<&str>,
    samples: Option<usize>,
    seed: u64,
) -> CliResult<(String, i32)> {
    let phi = phi.map(parse_phi).transpose()?;
    let record = match name {
        "genus1-torus" => {
            let spec = parse_group(group.unwrap_or("SU2"))?;
            catalog::genus1_torus_model(spec, samples.unwrap_or(500), seed)
        }
        "su2-strata" => catalog::su2_strata(genus.unwrap_or(2), seed),
        "so3-covering" => catalog::so3_covering(genus.unwrap_or(2), seed),
        "u2-parity" => {
            let parity: Parity = parity
                .unwrap_or("even")
                .parse()
                .map_err(|e: Error| CliError::usage(e.to_string()))?;
            let default_n = if parity == Parity::Even { 20 } else { 100 };
            catalog::u2_parity(
                genus.unwrap_or(2),
                parity,
                samples.unwrap_or(default_n),
                seed,
            )
        }
        "o2-variety" => catalog::o2_variety(genus.unwrap_or(2), phi, samples.unwrap_or(20), seed),
        "o3-splitting" => {
            catalog::o3_splitting(genus.unwrap_or(2), phi, samples.unwrap_or(20), seed)
        }
        "ramanathan" => catalog::ramanathan_example(),
        other => {
            return Err(CliError::usage(format!(
                "unknown catalog entry {other:?}; expected one of {}",
                catalog::CATALOG_NAMES.join(", ")
            )))
        }
    }
    .map_err(|e| match e {
        Error::InvalidInput(m) | Error::UnsupportedGroup { detail: m, .. } => CliError::usage(m),
        other => other.into(),
    })?;
    let mut inputs = BTreeMap::new();
    inputs.insert("name".into(), json!(name));
    inputs.insert("seed".into(), json!(seed));
    let code = if record.passed {
        EXIT_OK
    } else {
        EXIT_VERDICT_FAILED
    };
    let result = json!({"verdict": if record.passed { "pass" } else { "fail" }, "record": to_value(&record)});
    Ok((render(&ReportFile::new("catalog", inputs, result)), code))
}

fn render<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

fn install_tolerances(overrides: &[String]) -> CliResult<()> {
    if overrides.is_empty() {
        return Ok(());
    }
    let mut t = Tolerances::DEFAULT;
    for o in overrides {
        t = t.with_override(o).map_err(CliError::usage)?;
    }
    if !Tolerances::install(t) {
        return Err(CliError::usage(
            "tolerances were already fixed for this process",
        ));
    }
    Ok(())
}

/// Execute a parsed command line.
pub fn execute(cli: Cli) -> CliResult<Outcome> {
    install_tolerances(&cli.tolerances)?;
    let (out, result) = match cli.command {
        Command::Solve {
            bundle,
            seed,
            max_iters,
            out,
        } => (out, cmd_solve(&bundle, seed, max_iters)),
        Command::Classify { rep_file, out } => (out, cmd_classify(&rep_file)),
        Command::Census {
            bundle,
            samples,
            seed,
            threads,
            density_trials,
            no_targeted,
            out,
        } => (
            out,
            cmd_census(
                &bundle,
                samples,
                seed,
                threads,
                density_trials,
                !no_targeted,
            ),
        ),
        Command::Catalog {
            name,
            group,
            genus,
            parity,
            phi,
            samples,
            seed,
            out,
        } => (
            out,
            cmd_catalog(
                &name,
                group.as_deref(),
                genus,
                parity.as_deref(),
                phi.as_deref(),
                samples,
                seed,
            ),
        ),
    };
    let (document, code) = result?;
    Ok(Outcome {
        document,
        out,
        code,
    })
}

fn write_outcome(o: &Outcome) -> CliResult<()> {
    match &o.out {
        Some(path) => fs::write(path, &o.document)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(o.document.as_bytes())
            .map_err(|e| CliError::io(e.to_string())),
    }
}

/// Parse arguments, run, write output; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .try_init();
    match execute(cli).and_then(|o| write_outcome(&o).map(|_| o.code)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(group: &str, central: &str) -> BundleArgs {
        BundleArgs {
            group: group.into(),
            genus: 2,
            central: central.into(),
            phi: None,
        }
    }

    #[test]
    fn rep_file_round_trip_is_exact() {
        let rho = variety::solve(
            &BundleData::flat(GroupSpec::U2, 2).unwrap(),
            &SolverConfig::with_seed(3),
            None,
        )
        .unwrap();
        let file = RepFile::from_representation(&rho);
        let text = serde_json::to_string(&file).unwrap();
        let back: RepFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_representation().unwrap(), rho);
    }

    #[test]
    fn bundle_parsing() {
        assert!(
            args("SU2", "-I")
                .bundle()
                .unwrap()
                .central()
                .distance_to_identity()
                > 1.0
        );
        assert_eq!(args("Lie", "I").bundle().unwrap_err().code, EXIT_USAGE);
        assert_eq!(args("SO3", "-I").bundle().unwrap_err().code, EXIT_USAGE);
        assert!(args("U2", "phase=0.5").bundle().is_ok());
        assert_eq!(
            args("O2", "I").bundle().unwrap().phi(),
            Some(&[-1, 1, 1, 1][..])
        );
    }

    #[test]
    fn solve_exit_codes() {
        let (doc, code) = cmd_solve(&args("SU2", "I"), 42, 500).unwrap();
        assert_eq!(code, 0);
        let file: RepFile = serde_json::from_str(&doc).unwrap();
        assert!(file.residual <= 1e-12);
        let err = cmd_solve(&args("T1", "phase=1.0"), 0, 50).unwrap_err();
        assert_eq!(err.code, EXIT_NO_CONVERGENCE);
    }

    #[test]
    fn catalog_dispatch() {
        let (doc, code) = cmd_catalog("ramanathan", None, None, None, None, None, 0).unwrap();
        assert_eq!(code, 0);
        assert!(doc.contains("\"verdict\": \"pass\""));
        assert_eq!(
            cmd_catalog("nope", None, None, None, None, None, 0)
                .unwrap_err()
                .code,
            EXIT_USAGE
        );
    }

    #[test]
    fn corrupted_matrix_is_a_data_error() {
        let rho = variety::solve(
            &BundleData::flat(GroupSpec::Su2, 2).unwrap(),
            &SolverConfig::with_seed(1),
            None,
        )
        .unwrap();
        let mut file = RepFile::from_representation(&rho);
        file.holonomies[0].matrix.re[0][0] += 0.1;
        assert_eq!(file.to_representation().unwrap_err().code, EXIT_DATA);
    }
}
