use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use sparsezeros::basis::{OrthoBasis, WeightedSetSpec};
use sparsezeros::ensembles::{sample_system, CoefficientLaw, PolynomialSystem};
use sparsezeros::extremal::{bergman_convergence, ExtremalEvaluator};
use sparsezeros::measures::{
    angular_uniformity, kac_concentration, region_mass_estimate, EmpiricalMeasure, MassEstimate,
};
use sparsezeros::numeric::{mean_and_sem, wilson_interval};
use sparsezeros::polytope::{mixed_volume, IntegralPolytope};
use sparsezeros::solver::{amoeba_sample, roots_univariate, solve_bivariate, verify_count, CountReport, ZeroSet};

use crate::config::{build_basis, parse_polytope_list, ExperimentConfig};
use crate::output::{coefficient_rows, zero_header, zero_rows, RunDir, StreamId, COEFF_HEADER};
use crate::{CliError, CliResult};

/// Fresh draws allowed per trial after a numerical failure.
pub const RESAMPLE_CAP: u64 = 3;
/// Tolerance for the moment-map and Legendre routes to agree on a grid.
pub const DUAL_ROUTE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    MixedVolume,
    LatticePoints,
    Sample,
    BkVerify,
    Figures,
    Bergman,
    Amoeba,
    Kac,
    Uniformity,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::MixedVolume,
        Command::LatticePoints,
        Command::Sample,
        Command::BkVerify,
        Command::Figures,
        Command::Bergman,
        Command::Amoeba,
        Command::Kac,
        Command::Uniformity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::MixedVolume => "mixed-volume",
            Command::LatticePoints => "lattice-points",
            Command::Sample => "sample",
            Command::BkVerify => "bk-verify",
            Command::Figures => "figures",
            Command::Bergman => "bergman",
            Command::Amoeba => "amoeba",
            Command::Kac => "kac",
            Command::Uniformity => "uniformity",
        }
    }
}

impl FromStr for Command {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown command {s:?}")))
    }
}

/// JSON summary printed to stdout and, for data-producing commands, the
/// run directory.
#[derive(Debug)]
pub struct Outcome {
    pub summary: serde_json::Value,
    pub dir: Option<PathBuf>,
}

pub fn run(cmd: Command, cfg: ExperimentConfig, threads: Option<usize>) -> CliResult<Outcome> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| match cmd {
        Command::MixedVolume => cmd_mixed_volume(&cfg),
        Command::LatticePoints => cmd_lattice_points(&cfg),
        Command::Sample => cmd_sample(cfg),
        Command::BkVerify => cmd_bk_verify(cfg),
        Command::Figures => cmd_figures(cfg),
        Command::Bergman => cmd_bergman(cfg),
        Command::Amoeba => cmd_amoeba(cfg),
        Command::Kac => cmd_kac(cfg),
        Command::Uniformity => cmd_uniformity(cfg),
    })
}

fn out_root(cfg: &ExperimentConfig) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from("runs"))
}

fn open_run(cmd: Command, cfg: &ExperimentConfig) -> CliResult<RunDir> {
    RunDir::create(&out_root(cfg), cmd.name(), &cfg.canonical(cmd.name()))
}

/// Experiment id of a degree and resample attempt.
pub fn experiment_id(n: u32, attempt: u64) -> u64 {
    (attempt << 32) | n as u64
}

fn law_slug(law: &CoefficientLaw) -> String {
    match law {
        CoefficientLaw::ComplexGaussianStd => "gaussian".into(),
        CoefficientLaw::RealGaussianStd => "real-gaussian".into(),
        CoefficientLaw::ParetoModulus { alpha } => format!("pareto{alpha}"),
        CoefficientLaw::SphereUniform => "sphere".into(),
        CoefficientLaw::CustomIid(c) => c.name.clone(),
    }
}

fn default_polytopes(cfg: &mut ExperimentConfig, names: &str) {
    if cfg.polytopes.is_empty() {
        cfg.polytopes = parse_polytope_list(names);
    }
}

fn default_ns(cfg: &mut ExperimentConfig, ns: &[u32]) {
    if cfg.ns.is_empty() {
        cfg.ns = ns.to_vec();
    }
}

pub fn cmd_mixed_volume(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let ps = cfg.resolve_polytopes()?;
    let report = mixed_volume(&ps)?;
    Ok(Outcome {
        summary: serde_json::to_value(report)?,
        dir: None,
    })
}

pub fn cmd_lattice_points(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let ps = cfg.resolve_polytopes()?;
    let ns = if cfg.ns.is_empty() { vec![1] } else { cfg.require_ns()?.to_vec() };
    let mut rows = Vec::new();
    for (r, p) in cfg.polytopes.iter().zip(&ps) {
        for &n in &ns {
            let count = p.dilate(n as i64)?.lattice_points().len();
            rows.push(json!({ "polytope": r, "n": n, "count": count }));
        }
    }
    Ok(Outcome {
        summary: json!(rows),
        dir: None,
    })
}

/// Polytopes, one basis per system component, for every degree.
struct Setup {
    polytopes: Vec<IntegralPolytope>,
    specs: Vec<(u32, Vec<(Arc<OrthoBasis>, CoefficientLaw)>)>,
}

fn setup(cfg: &ExperimentConfig, set: &WeightedSetSpec, law: &CoefficientLaw) -> CliResult<Setup> {
    let polytopes = cfg.resolve_polytopes()?;
    let m = polytopes[0].dim();
    if polytopes.len() != m || polytopes.iter().any(|p| p.dim() != m) {
        return Err(CliError::Config(format!(
            "need {m} polytopes in dimension {m} for a square system, got {}",
            polytopes.len()
        )));
    }
    if m > 2 {
        return Err(CliError::Config("systems are supported for m = 1, 2".into()));
    }
    law.validate()?;
    let mut specs = Vec::new();
    for &n in cfg.require_ns()? {
        let comps = polytopes
            .iter()
            .map(|p| Ok((build_basis(set, p, n)?, law.clone())))
            .collect::<CliResult<Vec<_>>>()?;
        specs.push((n, comps));
    }
    Ok(Setup { polytopes, specs })
}

fn solve_system(sys: &PolynomialSystem) -> sparsezeros::Result<ZeroSet> {
    match sys.components.as_slice() {
        [f] => roots_univariate(f),
        [f, g] => solve_bivariate(f, g),
        _ => Err(sparsezeros::Error::UnsupportedDimension(sys.components.len())),
    }
}

struct TrialResult {
    experiment: u64,
    zeros: ZeroSet,
}

/// Samples and solves one trial, redrawing on numerical failure.
fn solve_trial(
    specs: &[(Arc<OrthoBasis>, CoefficientLaw)],
    seed: u64,
    n: u32,
    trial: u64,
) -> CliResult<TrialResult> {
    let mut last = String::new();
    for attempt in 0..=RESAMPLE_CAP {
        let experiment = experiment_id(n, attempt);
        let sys = sample_system(specs, seed, experiment, trial)?;
        match solve_system(&sys) {
            Ok(zeros) => return Ok(TrialResult { experiment, zeros }),
            Err(e) => match CliError::from(e) {
                CliError::Numeric(msg) => last = msg,
                other => return Err(other),
            },
        }
    }
    Err(CliError::Numeric(format!(
        "trial {trial} at N = {n}: resample cap {RESAMPLE_CAP} exceeded ({last})"
    )))
}

fn solve_trials(
    specs: &[(Arc<OrthoBasis>, CoefficientLaw)],
    seed: u64,
    n: u32,
    trials: usize,
) -> CliResult<Vec<TrialResult>> {
    // collect keeps trial order regardless of completion order
    (0..trials as u64)
        .into_par_iter()
        .map(|t| solve_trial(specs, seed, n, t))
        .collect()
}

fn streams(label: &str, seed: u64, results: &[TrialResult]) -> Vec<StreamId> {
    results
        .iter()
        .enumerate()
        .map(|(t, r)| StreamId {
            label: label.to_string(),
            seed,
            experiment: r.experiment,
            trial: t as u64,
        })
        .collect()
}

pub fn cmd_sample(mut cfg: ExperimentConfig) -> CliResult<Outcome> {
    let seed = cfg.require_seed()?;
    default_polytopes(&mut cfg, "square,square");
    default_ns(&mut cfg, &[1]);
    let set = cfg.weighted_set_or(WeightedSetSpec::TorusK);
    cfg.weighted_set = Some(set.clone());
    let s = setup(&cfg, &set, &cfg.law)?;
    let mut dir = open_run(Command::Sample, &cfg)?;
    dir.phase("sample");
    let mut files = Vec::new();
    for (n, specs) in &s.specs {
        let systems: Vec<PolynomialSystem> = (0..cfg.trials as u64)
            .into_par_iter()
            .map(|t| sample_system(specs, seed, experiment_id(*n, 0), t))
            .collect::<sparsezeros::Result<_>>()?;
        let mut rows = Vec::new();
        for (t, sys) in systems.iter().enumerate() {
            for (i, f) in sys.components.iter().enumerate() {
                rows.extend(coefficient_rows(t as u64, i, &f.a));
            }
        }
        dir.add_streams((0..cfg.trials as u64).map(|t| StreamId {
            label: format!("N{n}"),
            seed,
            experiment: experiment_id(*n, 0),
            trial: t,
        }));
        let name = format!("coefficients_N{n}.csv");
        dir.write_csv(&name, &COEFF_HEADER, &rows)?;
        files.push(name);
    }
    let path = dir.finish()?;
    Ok(Outcome {
        summary: json!({ "files": files, "dir": path }),
        dir: Some(path),
    })
}

#[derive(Debug, Serialize)]
pub struct BkSummary {
    pub n: u32,
    pub expected: u64,
    pub trials: usize,
    pub matched: usize,
    pub match_rate: f64,
    pub match_interval: (f64, f64),
    pub max_residual: f64,
    pub regions: Vec<MassEstimate>,
}

pub fn cmd_bk_verify(mut cfg: ExperimentConfig) -> CliResult<Outcome> {
    let seed = cfg.require_seed()?;
    let set = cfg.weighted_set_or(WeightedSetSpec::TorusK);
    cfg.weighted_set = Some(set.clone());
    let s = setup(&cfg, &set, &cfg.law)?;
    let mut dir = open_run(Command::BkVerify, &cfg)?;
    let m = s.polytopes.len();
    let mut summary = Vec::new();
    for (n, specs) in &s.specs {
        dir.phase(&format!("solve N={n}"));
        let results = solve_trials(specs, seed, *n, cfg.trials)?;
        dir.add_streams(streams(&format!("N{n}"), seed, &results));
        let mut count_rows = Vec::new();
        let mut zero_data = Vec::new();
        let mut reports: Vec<CountReport> = Vec::new();
        let mut measure = EmpiricalMeasure::new(m, m, *n);
        let mut max_residual: f64 = 0.0;
        for (t, r) in results.iter().enumerate() {
            let rep = verify_count(&r.zeros, &s.polytopes, *n)?;
            count_rows.push(vec![
                t.to_string(),
                (r.experiment >> 32).to_string(),
                rep.found.to_string(),
                rep.expected.to_string(),
                rep.matched.to_string(),
                rep.discarded.to_string(),
                rep.suspects.to_string(),
            ]);
            zero_data.extend(zero_rows(t as u64, &r.zeros));
            max_residual = r.zeros.residuals.iter().copied().fold(max_residual, f64::max);
            measure.add_trial(r.zeros.points.iter().cloned());
            reports.push(rep);
        }
        dir.write_csv(
            &format!("counts_N{n}.csv"),
            &["trial", "resamples", "found", "expected", "match", "discarded", "suspects"],
            &count_rows,
        )?;
        let header = zero_header(m);
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        dir.write_csv(&format!("zeros_N{n}.csv"), &header, &zero_data)?;
        let matched = reports.iter().filter(|r| r.matched).count();
        let expected = match reports.first() {
            Some(r) => r.expected,
            None => verify_count(&ZeroSet::default(), &s.polytopes, *n)?.expected,
        };
        summary.push(BkSummary {
            n: *n,
            expected,
            trials: reports.len(),
            matched,
            match_rate: if reports.is_empty() { 0.0 } else { matched as f64 / reports.len() as f64 },
            match_interval: wilson_interval(matched, reports.len()),
            max_residual,
            regions: cfg.regions.iter().map(|rg| region_mass_estimate(&measure, rg)).collect(),
        });
    }
    dir.write_json("summary.json", &summary)?;
    let path = dir.finish()?;
    Ok(Outcome {
        summary: json!({ "summary": summary, "dir": path }),
        dir: Some(path),
    })
}

/// Point clouds of simultaneous zeros, one CSV per coefficient law.
pub fn cmd_figures(mut cfg: ExperimentConfig) -> CliResult<Outcome> {
    let seed = cfg.require_seed()?;
    default_polytopes(&mut cfg, "trapezoid5,trapezoid5");
    default_ns(&mut cfg, &[10]);
    if cfg.laws.is_empty() {
        cfg.laws = vec![
            CoefficientLaw::ComplexGaussianStd,
            CoefficientLaw::ParetoModulus { alpha: 3.0 },
        ];
    }
    let set = cfg.weighted_set_or(WeightedSetSpec::Sphere3);
    cfg.weighted_set = Some(set.clone());
    let setups = cfg
        .laws
        .iter()
        .map(|law| setup(&cfg, &set, law))
        .collect::<CliResult<Vec<_>>>()?;
    let mut dir = open_run(Command::Figures, &cfg)?;
    let m = setups[0].polytopes.len();
    let header = zero_header(m);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut count_rows = Vec::new();
    let mut files = Vec::new();
    for (law, s) in cfg.laws.iter().zip(&setups) {
        let slug = law_slug(law);
        for (n, specs) in &s.specs {
            dir.phase(&format!("{slug} N={n}"));
            let results = solve_trials(specs, seed, *n, cfg.trials)?;
            dir.add_streams(streams(&format!("{slug} N{n}"), seed, &results));
            let mut rows = Vec::new();
            for (t, r) in results.iter().enumerate() {
                let rep = verify_count(&r.zeros, &s.polytopes, *n)?;
                count_rows.push(vec![
                    slug.clone(),
                    n.to_string(),
                    t.to_string(),
                    rep.found.to_string(),
                    rep.expected.to_string(),
                ]);
                rows.extend(zero_rows(t as u64, &r.zeros));
            }
            let name = if s.specs.len() == 1 {
                format!("figure_{slug}.csv")
            } else {
                format!("figure_{slug}_N{n}.csv")
            };
            dir.write_csv(&name, &header, &rows)?;
            files.push(name);
        }
    }
    dir.write_csv("figure_counts.csv", &["law", "n", "trial", "found", "expected"], &count_rows)?;
    let path = dir.finish()?;
    Ok(Outcome {
        summary: json!({ "files": files, "counts": count_rows, "dir": path }),
        dir: Some(path),
    })
}

fn to_points(grid: &[Vec<[f64; 2]>]) -> Vec<Vec<Complex64>> {
    grid.iter()
        .map(|z| z.iter().map(|c| Complex64::new(c[0], c[1])).collect())
        .collect()
}

/// Default grid: `|z_i| ∈ {1/2, 2}` on the torus; on `C^m` the preimages
/// under `μ_p` of a 5-point-per-axis grid inside `P`.
fn default_grid(p: &IntegralPolytope, set: &WeightedSetSpec) -> Vec<Vec<[f64; 2]>> {
    let m = p.dim();
    match set {
        WeightedSetSpec::FubiniStudy { p: deg } => {
            let (lo, hi) = p.bounding_box();
            let mut out = Vec::new();
            let steps: Vec<f64> = (0..5).map(|k| 0.1 + 0.2 * k as f64).collect();
            let mut idx = vec![0usize; m];
            'outer: loop {
                let x: Vec<f64> = (0..m)
                    .map(|i| lo[i] as f64 + (hi[i] - lo[i]) as f64 * steps[idx[i]])
                    .collect();
                let rest = *deg as f64 - x.iter().sum::<f64>();
                if p.contains_interior(&x, 1e-9) && rest > 0.0 {
                    out.push(x.iter().map(|v| [(v / rest).sqrt(), 0.0]).collect());
                }
                for i in 0..m {
                    idx[i] += 1;
                    if idx[i] < 5 {
                        continue 'outer;
                    }
                    idx[i] = 0;
                }
                break;
            }
            out
        }
        _ => {
            let mut out = vec![vec![]];
            for _ in 0..m {
                out = out
                    .into_iter()
                    .flat_map(|z: Vec<[f64; 2]>| {
                        [0.5, 2.0].map(|r| {
                            let mut z = z.clone();
                            z.push([r, 0.0]);
                            z
                        })
                    })
                    .collect();
            }
            out
        }
    }
}

pub fn cmd_bergman(mut cfg: ExperimentConfig) -> CliResult<Outcome> {
    default_polytopes(&mut cfg, "interval1");
    default_ns(&mut cfg, &[5, 10, 20, 40]);
    let set = cfg.weighted_set_or(WeightedSetSpec::TorusK);
    cfg.weighted_set = Some(set.clone());
    let poly = cfg.resolve_polytopes()?.remove(0);
    let ns = cfg.require_ns()?.to_vec();
    if cfg.grid.is_empty() {
        cfg.grid = default_grid(&poly, &set);
    }
    let grid = to_points(&cfg.grid);
    if grid.iter().any(|z| z.len() != poly.dim()) {
        return Err(CliError::Config("grid points must match the polytope dimension".into()));
    }
    let (ev, spec) = match &set {
        WeightedSetSpec::TorusK => (ExtremalEvaluator::TorusClosedForm { polytope: poly.clone() }, "torus"),
        WeightedSetSpec::FubiniStudy { p } => {
            let a = ExtremalEvaluator::FsMomentMap { polytope: poly.clone(), p: *p };
            let b = ExtremalEvaluator::FsLegendreDual { polytope: poly.clone(), p: *p };
            a.validate()?;
            for z in &grid {
                let (va, vb) = (a.eval(z)?, b.eval(z)?);
                if (va - vb).abs() > DUAL_ROUTE_TOL {
                    return Err(CliError::Numeric(format!(
                        "dual routes disagree at {z:?}: {va} vs {vb}"
                    )));
                }
            }
            (a, "fubini-study")
        }
        other => {
            return Err(CliError::Config(format!("no closed-form extremal function for {other:?}")))
        }
    };
    let family = |n: u32| -> sparsezeros::Result<OrthoBasis> {
        build_basis(&set, &poly, n)
            .map(|b| (*b).clone())
            .map_err(|e| sparsezeros::Error::InvalidArgument(e.to_string()))
    };
    let mut dir = open_run(Command::Bergman, &cfg)?;
    dir.phase("bergman");
    let report = bergman_convergence(&family, &ev, &grid, &ns, spec)?;
    dir.write_json("report.json", &report)?;
    let path = dir.finish()?;
    Ok(Outcome {
        summary: serde_json::to_value(&report)?,
        dir: Some(path),
    })
}

pub fn cmd_amoeba(mut cfg: ExperimentConfig) -> CliResult<Outcome> {
    let seed = cfg.require_seed()?;
    default_polytopes(&mut cfg, "square");
    default_ns(&mut cfg, &[4]);
    if cfg.moduli.is_empty() {
        cfg.moduli = (0..31).map(|k| 10f64.powf(-1.5 + 0.1 * k as f64)).collect();
    }
    let set = cfg.weighted_set_or(WeightedSetSpec::TorusK);
    cfg.weighted_set = Some(set.clone());
    cfg.law.validate()?;
    let poly = cfg.resolve_polytopes()?.remove(0);
    if poly.dim() != 2 {
        return Err(CliError::Config("amoeba needs a planar polytope".into()));
    }
    if cfg.moduli.iter().any(|r| !(*r > 0.0)) || cfg.angles == 0 {
        return Err(CliError::Config("moduli must be positive and angles nonzero".into()));
    }
    let ns = cfg.require_ns()?.to_vec();
    let bases = ns
        .iter()
        .map(|&n| build_basis(&set, &poly, n))
        .collect::<CliResult<Vec<_>>>()?;
    let mut dir = open_run(Command::Amoeba, &cfg)?;
    dir.phase("amoeba");
    let mut rows = Vec::new();
    for (n, b) in ns.iter().zip(&bases) {
        let specs = [(b.clone(), cfg.law.clone())];
        let per_trial: Vec<Vec<[f64; 2]>> = (0..cfg.trials as u64)
            .into_par_iter()
            .map(|t| {
                let sys = sample_system(&specs, seed, experiment_id(*n, 0), t)?;
                amoeba_sample(&sys.components[0], &cfg.moduli, cfg.angles)
            })
            .collect::<sparsezeros::Result<_>>()?;
        for (t, pts) in per_trial.iter().enumerate() {
            for p in pts {
                rows.push(vec![n.to_string(), t.to_string(), p[0].to_string(), p[1].to_string()]);
            }
        }
    }
    dir.write_csv("amoeba.csv", &["n", "trial", "log1", "log2"], &rows)?;
    let path = dir.finish()?;
    Ok(Outcome {
        summary: json!({ "points": rows.len(), "dir": path }),
        dir: Some(path),
    })
}

#[derive(Debug, Serialize)]
pub struct KacSummary {
    pub law: String,
    pub n: u32,
    pub trials: usize,
    pub mean_fraction: f64,
    pub sem: f64,
}

/// Concentration of univariate zeros near the unit circle.
pub fn cmd_kac(mut cfg: ExperimentConfig) -> CliResult<Outcome> {
    let seed = cfg.require_seed()?;
    default_polytopes(&mut cfg, "interval1");
    default_ns(&mut cfg, &[200]);
    if cfg.laws.is_empty() {
        cfg.laws = vec![cfg.law.clone()];
    }
    let set = cfg.weighted_set_or(WeightedSetSpec::TorusK);
    cfg.weighted_set = Some(set.clone());
    if !(cfg.eps > 0.0) {
        return Err(CliError::Config("eps must be positive".into()));
    }
    let setups = cfg
        .laws
        .iter()
        .map(|law| setup(&cfg, &set, law))
        .collect::<CliResult<Vec<_>>>()?;
    if setups[0].polytopes[0].dim() != 1 {
        return Err(CliError::Config("kac needs a one-dimensional polytope".into()));
    }
    let mut dir = open_run(Command::Kac, &cfg)?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (law, s) in cfg.laws.iter().zip(&setups) {
        let slug = law_slug(law);
        for (n, specs) in &s.specs {
            dir.phase(&format!("{slug} N={n}"));
            let results = solve_trials(specs, seed, *n, cfg.trials)?;
            dir.add_streams(streams(&format!("{slug} N{n}"), seed, &results));
            let mut fr = Vec::new();
            for (t, r) in results.iter().enumerate() {
                let mut me = EmpiricalMeasure::new(1, 1, *n);
                me.add_trial(r.zeros.points.iter().cloned());
                let f = kac_concentration(&me, cfg.eps)?;
                rows.push(vec![slug.clone(), n.to_string(), t.to_string(), r.zeros.len().to_string(), f.to_string()]);
                fr.push(f);
            }
            let (mean_fraction, sem) = mean_and_sem(&fr);
            summary.push(KacSummary { law: slug.clone(), n: *n, trials: fr.len(), mean_fraction, sem });
        }
    }
    dir.write_csv("kac.csv", &["law", "n", "trial", "roots", "fraction"], &rows)?;
    dir.write_json("summary.json", &summary)?;
    let path = dir.finish()?;
    Ok(Outcome {
        summary: json!({ "summary": summary, "dir": path }),
        dir: Some(path),
    })
}

/// Angular statistics of pooled zeros of torus-invariant systems.
pub fn cmd_uniformity(mut cfg: ExperimentConfig) -> CliResult<Outcome> {
    let seed = cfg.require_seed()?;
    default_polytopes(&mut cfg, "square,square");
    default_ns(&mut cfg, &[6]);
    let set = cfg.weighted_set_or(WeightedSetSpec::TorusK);
    cfg.weighted_set = Some(set.clone());
    let s = setup(&cfg, &set, &cfg.law)?;
    let m = s.polytopes.len();
    let mut dir = open_run(Command::Uniformity, &cfg)?;
    let mut reports = Vec::new();
    for (n, specs) in &s.specs {
        dir.phase(&format!("solve N={n}"));
        let results = solve_trials(specs, seed, *n, cfg.trials)?;
        dir.add_streams(streams(&format!("N{n}"), seed, &results));
        let mut measure = EmpiricalMeasure::new(m, m, *n);
        let mut rows = Vec::new();
        for (t, r) in results.iter().enumerate() {
            measure.add_trial(r.zeros.points.iter().cloned());
            rows.extend(zero_rows(t as u64, &r.zeros));
        }
        let header = zero_header(m);
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        dir.write_csv(&format!("zeros_N{n}.csv"), &header, &rows)?;
        let rep = angular_uniformity(&measure)?;
        reports.push(json!({ "n": n, "report": rep }));
    }
    dir.write_json("uniformity.json", &reports)?;
    let path = dir.finish()?;
    Ok(Outcome {
        summary: json!({ "reports": reports, "dir": path }),
        dir: Some(path),
    })
}
