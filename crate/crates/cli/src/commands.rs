use std::path::Path;

use coneglow::conemaps::{DEFAULT_POWER_ITER, DEFAULT_POWER_TOL};
use coneglow::lp::solve_linear;
use coneglow::{
    detect_eigenvector, detect_fixed_point_smooth, detect_fixed_point_sup, halfspace_polytope, localize_eigenvectors,
    localize_fixed_points, power_iteration, presets, DetectionConfig, DetectionKind, DetectionReport, MapSpec, NormId,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{self, Summary, TrialRow};
use crate::spec_file::{self, AffineSpec, SpecFile};
use crate::{CliError, Format, RunArgs, EXIT_UNDETERMINED};

/// Sample counts reported for the Schoen-composition experiment:
/// (min, max, mean, median).
const REFERENCE_ROW: (u64, u64, f64, f64) = (10, 303, 54.4, 39.0);

fn run_trial(spec: &SpecFile, cfg: &DetectionConfig) -> Result<DetectionReport, CliError> {
    Ok(match spec {
        SpecFile::Cone(s) => detect_eigenvector(s, cfg)?,
        SpecFile::Affine(a) if a.norm == NormId::Sup => detect_fixed_point_sup(|x: &[f64]| a.apply(x), a.dim(), cfg)?,
        SpecFile::Affine(a) => detect_fixed_point_smooth(|x: &[f64]| a.apply(x), a.dim(), cfg)?,
    })
}

fn run_trials(spec: &SpecFile, cfg: &DetectionConfig, trials: u64) -> Result<Vec<DetectionReport>, CliError> {
    if trials == 0 {
        return Err(CliError::Invalid("--trials must be at least 1".into()));
    }
    cfg.validate()?;
    (0..trials).into_par_iter().map(|k| run_trial(spec, &cfg.for_trial(k))).collect()
}

#[derive(Serialize)]
struct Batch<'a> {
    command: &'a str,
    config: DetectionConfig,
    trials: u64,
    reports: &'a [DetectionReport],
}

pub fn detect(spec_path: &Path, trials: u64, format: Format, args: &RunArgs) -> Result<u8, CliError> {
    let spec = spec_file::load(spec_path)?;
    let cfg = args.config();
    let reports = run_trials(&spec, &cfg, trials)?;
    let rows: Vec<TrialRow> = reports.iter().enumerate().map(|(k, r)| TrialRow::from_report(k as u64, r)).collect();
    let bytes = match format {
        Format::Json if trials == 1 => output::json(&reports[0])?,
        Format::Json => output::json(&Batch { command: "detect", config: cfg, trials, reports: &reports })?,
        Format::Csv => output::trials_csv(&output::config_comments("detect", &cfg, trials), &rows)?,
    };
    output::emit(args.out.as_deref(), &bytes)?;

    let s = Summary::of(&rows);
    for r in &reports {
        log::info!("seed {}: {:?}, {} of {} targets after {} samples", r.seed, r.status, r.subsets_covered, r.total_subsets, r.samples_used);
    }
    eprintln!("confirmed {}/{} trial(s); samples min {}, max {}, mean {}", s.confirmed, s.trials, s.min, s.max, s.mean);
    Ok(if s.confirmed == s.trials { 0 } else { EXIT_UNDETERMINED })
}

#[derive(Serialize)]
struct Located<T: Serialize> {
    #[serde(flatten)]
    region: T,
    seed: u64,
    config: DetectionConfig,
}

#[derive(Serialize)]
struct Polytope {
    rows: Vec<coneglow::localize::Halfspace>,
    bounded: bool,
}

fn read_report(path: &Path) -> Result<DetectionReport, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))
}

/// Exact fixed point of `x ↦ A x + b`, when `I - A` is invertible.
fn affine_fixed_point(a: &AffineSpec) -> Option<Vec<f64>> {
    let n = a.dim();
    let i_minus_a: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j)) - a.matrix[i][j]).collect()).collect();
    solve_linear(&i_minus_a, &a.offset)
}

pub fn localize(spec_path: &Path, report_path: &Path, out: Option<&Path>) -> Result<u8, CliError> {
    let spec = spec_file::load(spec_path)?;
    let report = read_report(report_path)?;
    if !report.confirmed() {
        return Err(CliError::Invalid("nothing to localize: the report is Undetermined".into()));
    }
    if report.dim != spec.dim() {
        return Err(CliError::Invalid(format!("report has dimension {} but the spec has dimension {}", report.dim, spec.dim())));
    }
    let witnesses = report.witness_points();
    let located = |bytes: Vec<u8>| -> Result<u8, CliError> {
        output::emit(out, &bytes)?;
        Ok(0)
    };
    match (&spec, report.kind) {
        (SpecFile::Cone(map), DetectionKind::Eigenvector) => {
            let ball = localize_eigenvectors(&witnesses, report.dim)?;
            check_eigenvector(map, &ball)?;
            located(output::json(&Located { region: ball, seed: report.seed, config: report.config })?)
        }
        (SpecFile::Affine(a), DetectionKind::SupFixedPoint) if a.norm == NormId::Sup => {
            let ball = localize_fixed_points(&witnesses, NormId::Sup)?;
            if let Some(p) = affine_fixed_point(a) {
                let inside = ball.contains(&p)?;
                eprintln!("fixed point {p:?}: sup distance to center {} (radius {})", ball.distance_to(&p)?, ball.radius);
                if !inside {
                    return Err(CliError::Invalid("the exact fixed point lies outside the bounding ball".into()));
                }
            }
            located(output::json(&Located { region: ball, seed: report.seed, config: report.config })?)
        }
        (SpecFile::Affine(a), DetectionKind::SmoothFixedPoint) if a.norm == NormId::Euclid => {
            let (poly, bounded) = halfspace_polytope(|x: &[f64]| a.apply(x), &witnesses)?;
            if let Some(p) = affine_fixed_point(a) {
                eprintln!("fixed point {p:?}: inside polytope = {}", poly.contains(&p));
                if !poly.contains(&p) {
                    return Err(CliError::Invalid("the exact fixed point lies outside the half-space polytope".into()));
                }
            }
            let region = Polytope { rows: poly.rows, bounded };
            located(output::json(&Located { region, seed: report.seed, config: report.config })?)
        }
        (_, kind) => Err(CliError::Invalid(format!("a {kind:?} report does not match this spec"))),
    }
}

fn check_eigenvector(map: &MapSpec, ball: &coneglow::BoundingBall) -> Result<(), CliError> {
    let eig = power_iteration(map, &vec![1.0; ball.center.len()], DEFAULT_POWER_TOL, DEFAULT_POWER_ITER)?;
    let d = ball.distance_to(&eig.vector)?;
    eprintln!(
        "power-iteration eigenvector {:?} (eigenvalue {}, converged = {}): Hilbert distance to center {d} (radius {})",
        &*eig.vector, eig.eigenvalue, eig.converged, ball.radius
    );
    if !ball.contains(&eig.vector)? {
        return Err(CliError::Invalid("the power-iteration eigenvector lies outside the bounding ball".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct Reference {
    min: u64,
    max: u64,
    mean: f64,
    median: f64,
}

#[derive(Serialize)]
struct Experiment<'a> {
    command: &'a str,
    config: DetectionConfig,
    trials: u64,
    rows: &'a [TrialRow],
    summary: Summary,
    reference: Reference,
}

pub fn reproduce_example54(trials: u64, format: Format, args: &RunArgs) -> Result<u8, CliError> {
    let cfg = args.config();
    let spec = SpecFile::Cone(presets::schoen_composition());
    let reports = run_trials(&spec, &cfg, trials)?;
    let rows: Vec<TrialRow> = reports.iter().enumerate().map(|(k, r)| TrialRow::from_report(k as u64, r)).collect();
    let summary = Summary::of(&rows);
    let (rmin, rmax, rmean, rmedian) = REFERENCE_ROW;
    let bytes = match format {
        Format::Csv => {
            let mut comments = output::config_comments("reproduce-example54", &cfg, trials);
            comments.push(("reference".into(), format!("min {rmin} max {rmax} mean {rmean} median {rmedian}")));
            output::trials_csv(&comments, &rows)?
        }
        Format::Json => output::json(&Experiment {
            command: "reproduce-example54",
            config: cfg,
            trials,
            rows: &rows,
            summary,
            reference: Reference { min: rmin, max: rmax, mean: rmean, median: rmedian },
        })?,
    };
    output::emit(args.out.as_deref(), &bytes)?;
    eprintln!("confirmed {}/{} trials", summary.confirmed, summary.trials);
    eprintln!("            {:>6} {:>6} {:>8} {:>8}", "min", "max", "mean", "median");
    eprintln!("observed    {:>6} {:>6} {:>8.2} {:>8}", summary.min, summary.max, summary.mean, summary.median);
    eprintln!("reference   {rmin:>6} {rmax:>6} {rmean:>8.2} {rmedian:>8}");
    eprintln!(
        "difference  {:>+6} {:>+6} {:>+8.2} {:>+8}",
        summary.min as i64 - rmin as i64,
        summary.max as i64 - rmax as i64,
        summary.mean - rmean,
        summary.median - rmedian
    );
    Ok(0)
}
