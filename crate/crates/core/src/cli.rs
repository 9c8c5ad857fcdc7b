//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage or input error,
//! 3 internal invariant breach. Every failure prints one line to stderr
//! starting with `error[<class>]:` or `fail[validate]:`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::forward::{project_fan, project_parallel_with_radius, rebin_to_parallel};
use crate::geometry::FanGeometry;
use crate::image::Image;
use crate::io::{self, RunManifest, Sinogram};
use crate::phantom::Phantom;
use crate::recon::{
    evaluate_metrics, reconstruct_fan, reconstruct_parallel, ReconConfig, ReconDiagnostics,
};
use crate::validate::{run_suite, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "fanbeam",
    version,
    about = "Fan-beam tomography: phantoms, projection, reconstruction, checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a phantom spec and write it back normalized.
    Phantom(PhantomArgs),
    /// Simulate fan intensities or parallel line integrals.
    Project(ProjectArgs),
    /// Reconstruct an image from a sinogram.
    Reconstruct(ReconstructArgs),
    /// Run numerical checks of the inversion formulas.
    Validate(ValidateArgs),
    /// Compare an image with a reference image or phantom.
    Evaluate(EvaluateArgs),
}

#[derive(Args, Debug)]
struct PhantomArgs {
    /// Phantom JSON: {"R": .., "disks": [{"cx", "cy", "a", "mu"}, ..]}
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProjectMode {
    Fan,
    Parallel,
}

#[derive(Args, Debug)]
struct ProjectArgs {
    #[arg(long)]
    phantom: PathBuf,
    /// Geometry JSON: {"D", "L", "R", "K", "n_alpha", "n_tau"}
    #[arg(long)]
    geometry: PathBuf,
    #[arg(long, value_enum, default_value = "fan")]
    mode: ProjectMode,
    /// Output base path; writes <out>.bin, <out>.json, <out>.manifest.json
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    n_alpha: Option<usize>,
    #[arg(long)]
    n_tau: Option<usize>,
    /// Parallel mode: offsets across [-R, R] (default n_alpha)
    #[arg(long)]
    n_eta: Option<usize>,
    /// Parallel mode: line angles over [0, 2 pi) (default n_tau)
    #[arg(long)]
    n_sigma: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Fan,
    Parallel,
    RebinParallel,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Fan => "fan",
            Method::Parallel => "parallel",
            Method::RebinParallel => "rebin-parallel",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Toggle {
    On,
    Off,
}

impl From<Toggle> for bool {
    fn from(t: Toggle) -> bool {
        matches!(t, Toggle::On)
    }
}

#[derive(Args, Debug)]
struct ReconstructArgs {
    /// Sinogram base path (or its .bin / .json)
    #[arg(long)]
    sino: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    /// Output base path; writes <out>.bin, <out>.json, <out>.pgm, <out>.manifest.json
    #[arg(long)]
    out: PathBuf,
    /// ReconConfig JSON; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_enum)]
    pole_correction: Option<Toggle>,
    #[arg(long, value_enum)]
    jacobian_correction: Option<Toggle>,
    /// rebin-parallel: offsets of the intermediate grid (default 2 n_alpha - 1)
    #[arg(long)]
    n_eta: Option<usize>,
    /// rebin-parallel: angles of the intermediate grid (default n_tau)
    #[arg(long)]
    n_sigma: Option<usize>,
    /// PGM window as lo,hi (default 0,max)
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<[f64; 2]>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    FourierSlice,
    Lemma,
    UniformPhi,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::FourierSlice => Suite::FourierSlice,
            SuiteArg::Lemma => Suite::Lemma,
            SuiteArg::UniformPhi => Suite::UniformPhi,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    /// Also write the report here (plus a manifest)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[arg(long)]
    image: PathBuf,
    /// Reference image (base, .bin or sidecar) or phantom JSON
    #[arg(long)]
    reference: PathBuf,
    /// Metrics JSON path
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.7)]
    interior_fraction: f64,
}

fn parse_window(s: &str) -> std::result::Result<[f64; 2], String> {
    let (lo, hi) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("lo: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("hi: {e}"))?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(format!("need finite lo < hi, got {lo},{hi}"));
    }
    Ok([lo, hi])
}

/// Outcome of a command that did not fail outright.
enum Outcome {
    Done,
    ValidationFailed(String),
}

fn exit_code(err: &Error) -> (i32, &'static str) {
    match err {
        Error::Internal(_) => (EXIT_INTERNAL, "internal"),
        Error::Usage(_) => (EXIT_USAGE, "usage"),
        _ => (EXIT_USAGE, "input"),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let text = e.to_string();
            let first = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("bad arguments")
                .trim_start_matches("error: ");
            eprintln!("error[usage]: {first}");
            return EXIT_USAGE;
        }
    };
    let result = match cli.command {
        Command::Phantom(a) => cmd_phantom(&a),
        Command::Project(a) => cmd_project(&a),
        Command::Reconstruct(a) => cmd_reconstruct(&a),
        Command::Validate(a) => cmd_validate(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
    };
    match result {
        Ok(Outcome::Done) => EXIT_OK,
        Ok(Outcome::ValidationFailed(record)) => {
            eprintln!("fail[validate]: {record}");
            EXIT_VALIDATION
        }
        Err(err) => {
            let (code, class) = exit_code(&err);
            let line = err.to_string().replace('\n', " ");
            eprintln!("error[{class}]: {line}");
            code
        }
    }
}

fn manifest(
    command: &str,
    inputs: &[&Path],
    outputs: Vec<PathBuf>,
    config: Value,
    start: Instant,
    warnings: Vec<String>,
) -> RunManifest {
    RunManifest {
        command: command.to_string(),
        inputs: inputs.iter().map(|p| p.to_path_buf()).collect(),
        outputs,
        config,
        duration_seconds: start.elapsed().as_secs_f64(),
        warnings,
    }
}

fn cmd_phantom(a: &PhantomArgs) -> Result<Outcome> {
    let start = Instant::now();
    let phantom: Phantom = io::read_json(&a.spec)?;
    io::write_json(&a.out, &phantom)?;
    let m = manifest(
        "phantom",
        &[&a.spec],
        vec![a.out.clone()],
        json!({}),
        start,
        vec![],
    );
    io::write_manifest(&io::base_path(&a.out), &m)?;
    Ok(Outcome::Done)
}

fn cmd_project(a: &ProjectArgs) -> Result<Outcome> {
    let start = Instant::now();
    let phantom: Phantom = io::read_json(&a.phantom)?;
    let geometry: FanGeometry = io::read_json(&a.geometry)?;
    let geometry = geometry.with_counts(
        a.n_alpha.unwrap_or(geometry.n_alpha()),
        a.n_tau.unwrap_or(geometry.n_tau()),
    )?;
    let base = io::base_path(&a.out);

    let (sino, config) = match a.mode {
        ProjectMode::Fan => (
            Sinogram::Fan(project_fan(&phantom, &geometry)?),
            json!({ "mode": "fan", "geometry": geometry }),
        ),
        ProjectMode::Parallel => {
            if phantom.radius() > geometry.support_radius() {
                return Err(Error::Usage(format!(
                    "phantom support R = {} exceeds scanner support R = {}",
                    phantom.radius(),
                    geometry.support_radius()
                )));
            }
            let n_eta = a.n_eta.unwrap_or(geometry.n_alpha());
            let n_sigma = a.n_sigma.unwrap_or(geometry.n_tau());
            let radius = geometry.support_radius();
            (
                Sinogram::Parallel(project_parallel_with_radius(
                    &phantom, radius, n_eta, n_sigma,
                )?),
                json!({ "mode": "parallel", "R": radius, "n_eta": n_eta, "n_sigma": n_sigma }),
            )
        }
    };
    let outputs = io::write_sinogram(&base, &sino)?;
    let m = manifest(
        "project",
        &[&a.phantom, &a.geometry],
        outputs,
        config,
        start,
        vec![],
    );
    io::write_manifest(&base, &m)?;
    Ok(Outcome::Done)
}

fn diagnostics_warnings(d: &ReconDiagnostics) -> Vec<String> {
    let mut w = Vec::new();
    if d.clamped_intensities > 0 {
        w.push(format!(
            "{} intensities raised to the floor before the logarithm",
            d.clamped_intensities
        ));
    }
    if d.clipped_poles > 0 {
        w.push(format!(
            "{} inner integrals had their pole window clipped by the axis end",
            d.clipped_poles
        ));
    }
    if d.outside_poles > 0 {
        w.push(format!(
            "{} inner integrals had their pole outside the sampled axis",
            d.outside_poles
        ));
    }
    w
}

fn cmd_reconstruct(a: &ReconstructArgs) -> Result<Outcome> {
    let start = Instant::now();
    let mut cfg = match &a.config {
        Some(path) => io::read_json::<ReconConfig>(path)?,
        None => ReconConfig::default(),
    };
    if let Some(n) = a.grid {
        cfg.grid_n = n;
    }
    if a.epsilon.is_some() {
        cfg.epsilon = a.epsilon;
    }
    if let Some(t) = a.pole_correction {
        cfg.pole_correction = t.into();
    }
    if let Some(t) = a.jacobian_correction {
        cfg.jacobian_correction = t.into();
    }

    let sino = io::read_sinogram(&a.sino)?;
    let mut resolved = json!({ "method": a.method.name(), "recon": cfg });
    let rec = match (a.method, &sino) {
        (Method::Fan, Sinogram::Fan(s)) => reconstruct_fan(s, &cfg)?,
        (Method::Parallel, Sinogram::Parallel(s)) => reconstruct_parallel(s, &cfg)?,
        (Method::RebinParallel, Sinogram::Fan(s)) => {
            let g = s.geometry();
            let n_eta = a.n_eta.unwrap_or(2 * g.n_alpha() - 1);
            let n_sigma = a.n_sigma.unwrap_or(g.n_tau());
            let (par, clamped) = rebin_to_parallel(s, n_eta, n_sigma, cfg.intensity_floor)?;
            resolved["n_eta"] = json!(n_eta);
            resolved["n_sigma"] = json!(n_sigma);
            let mut rec = reconstruct_parallel(&par, &cfg)?;
            rec.diagnostics.clamped_intensities = clamped;
            rec
        }
        (method, s) => {
            return Err(Error::Usage(format!(
                "method {} cannot take a {} sinogram",
                method.name(),
                s.kind()
            )))
        }
    };
    if !rec.image.all_finite() {
        return Err(Error::Internal(
            "non-finite value in reconstructed image".into(),
        ));
    }
    let window = a.window.unwrap_or_else(|| io::default_window(&rec.image));
    resolved["window"] = json!(window);
    let base = io::base_path(&a.out);
    let outputs = io::write_image(&base, &rec.image, Some(window))?;
    let m = manifest(
        "reconstruct",
        &[&a.sino],
        outputs,
        resolved,
        start,
        diagnostics_warnings(&rec.diagnostics),
    );
    io::write_manifest(&base, &m)?;
    Ok(Outcome::Done)
}

fn cmd_validate(a: &ValidateArgs) -> Result<Outcome> {
    let start = Instant::now();
    let suite: Suite = a.suite.into();
    let records = run_suite(suite);
    let report =
        serde_json::to_string_pretty(&records).map_err(|e| Error::Internal(e.to_string()))?;
    println!("{report}");
    if let Some(out) = &a.out {
        io::write_json(out, &records)?;
        let m = manifest(
            "validate",
            &[],
            vec![out.clone()],
            json!({ "suite": suite }),
            start,
            vec![],
        );
        io::write_manifest(&io::base_path(out), &m)?;
    }
    match records.iter().find(|r| !r.pass) {
        Some(r) => Ok(Outcome::ValidationFailed(
            serde_json::to_string(r).map_err(|e| Error::Internal(e.to_string()))?,
        )),
        None => Ok(Outcome::Done),
    }
}

/// Loads a reference as an image, or rasterizes a phantom onto `like`'s grid.
fn load_reference(path: &Path, like: &Image) -> Result<Image> {
    let is_phantom = path.extension().is_some_and(|e| e == "json")
        && io::read_json::<Value>(path)?.get("kind").is_none();
    if !is_phantom {
        return Ok(io::read_image(path)?.0);
    }
    let phantom: Phantom = io::read_json(path)?;
    if phantom.radius() != like.radius() {
        return Err(Error::Usage(format!(
            "phantom support R = {} differs from the image extent R = {}",
            phantom.radius(),
            like.radius()
        )));
    }
    phantom.raster(like.n())
}

fn cmd_evaluate(a: &EvaluateArgs) -> Result<Outcome> {
    let start = Instant::now();
    if !(a.interior_fraction > 0.0 && a.interior_fraction <= 1.0) {
        return Err(Error::Usage(format!(
            "interior fraction {} must lie in (0, 1]",
            a.interior_fraction
        )));
    }
    let (img, _) = io::read_image(&a.image)?;
    let reference = load_reference(&a.reference, &img)?;
    let metrics = evaluate_metrics(&img, &reference, a.interior_fraction)?;
    io::write_json(&a.out, &metrics)?;
    let m = manifest(
        "evaluate",
        &[&a.image, &a.reference],
        vec![a.out.clone()],
        json!({ "interior_fraction": a.interior_fraction }),
        start,
        vec![],
    );
    io::write_manifest(&io::base_path(&a.out), &m)?;
    Ok(Outcome::Done)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_parsing() {
        assert_eq!(parse_window("0,2.5"), Ok([0.0, 2.5]));
        assert_eq!(parse_window("-1, 1"), Ok([-1.0, 1.0]));
        assert!(parse_window("2,1").is_err());
        assert!(parse_window("1").is_err());
    }

    #[test]
    fn bad_flags_exit_with_usage_code() {
        assert_eq!(run(["fanbeam", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["fanbeam", "validate", "--suite", "nope"]), EXIT_USAGE);
        assert_eq!(run(["fanbeam", "--help"]), EXIT_OK);
    }

    #[test]
    fn error_classes() {
        assert_eq!(exit_code(&Error::Internal("x".into())).0, EXIT_INTERNAL);
        assert_eq!(exit_code(&Error::Data("x".into())), (EXIT_USAGE, "input"));
        assert_eq!(exit_code(&Error::Usage("x".into())), (EXIT_USAGE, "usage"));
    }
}
