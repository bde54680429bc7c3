use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sparsezeros::basis::{fs_basis, sphere3_basis, torus_basis, OrthoBasis, WeightedSetSpec};
use sparsezeros::ensembles::CoefficientLaw;
use sparsezeros::measures::RegionSpec;
use sparsezeros::polytope::{IntegralPolytope, LatticePoint};

use crate::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// A polytope given by name (`square`, `simplex2`, `trapezoid5`, …) or
/// by its vertex list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolytopeRef {
    Named(String),
    Vertices { vertices: Vec<Vec<i64>> },
}

impl PolytopeRef {
    pub fn resolve(&self) -> CliResult<IntegralPolytope> {
        match self {
            PolytopeRef::Named(name) => named_polytope(name),
            PolytopeRef::Vertices { vertices } => {
                let pts: Vec<LatticePoint> = vertices.iter().cloned().map(LatticePoint::new).collect();
                Ok(IntegralPolytope::hull(&pts)?)
            }
        }
    }
}

fn suffix_number(name: &str, prefix: &str) -> Option<i64> {
    name.strip_prefix(prefix)?.parse().ok()
}

/// Resolves `square`, `cube<m>`, `simplex<m>`, `trapezoid<T>` and
/// `interval<n>` (the segment `[0, n]`).
pub fn named_polytope(name: &str) -> CliResult<IntegralPolytope> {
    let bad = || CliError::Config(format!("unknown polytope name {name:?}"));
    let p = if name == "square" {
        IntegralPolytope::unit_cube(2)
    } else if let Some(m) = suffix_number(name, "cube") {
        IntegralPolytope::unit_cube(usize::try_from(m).map_err(|_| bad())?)
    } else if let Some(m) = suffix_number(name, "simplex") {
        IntegralPolytope::simplex(usize::try_from(m).map_err(|_| bad())?)
    } else if let Some(t) = suffix_number(name, "trapezoid") {
        IntegralPolytope::trapezoid(t)
    } else if let Some(n) = suffix_number(name, "interval") {
        IntegralPolytope::interval(0, n)
    } else {
        return Err(bad());
    };
    p.map_err(|e| CliError::Config(format!("{name}: {e}")))
}

/// Parses a comma-separated polytope list.
pub fn parse_polytope_list(s: &str) -> Vec<PolytopeRef> {
    s.split(',')
        .map(|t| PolytopeRef::Named(t.trim().to_string()))
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    pub seed: Option<u64>,
    #[serde(default)]
    pub polytopes: Vec<PolytopeRef>,
    /// Defaults per command (torus for most, `Sphere3` for figures).
    pub weighted_set: Option<WeightedSetSpec>,
    #[serde(default = "default_law")]
    pub law: CoefficientLaw,
    /// Laws compared side by side (figures); defaults to Gaussian and Pareto(3).
    #[serde(default)]
    pub laws: Vec<CoefficientLaw>,
    #[serde(default)]
    pub ns: Vec<u32>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub regions: Vec<RegionSpec>,
    /// Distance to the unit circle counted as concentrated (kac).
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Grid for bergman, as `[[re, im], …]` per point.
    #[serde(default)]
    pub grid: Vec<Vec<[f64; 2]>>,
    /// Moduli of the `z_1` circles for amoeba.
    #[serde(default)]
    pub moduli: Vec<f64>,
    #[serde(default = "default_angles")]
    pub angles: usize,
    pub out: Option<PathBuf>,
}

fn default_version() -> u32 {
    SCHEMA_VERSION
}
fn default_law() -> CoefficientLaw {
    CoefficientLaw::ComplexGaussianStd
}
fn default_trials() -> usize {
    1
}
fn default_eps() -> f64 {
    0.1
}
fn default_angles() -> usize {
    64
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub polytopes: Option<Vec<PolytopeRef>>,
    pub ns: Option<Vec<u32>>,
    pub trials: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if c.version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "unsupported config version {} (expected {SCHEMA_VERSION})",
                c.version
            )));
        }
        Ok(c)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.seed = Some(s);
        }
        if let Some(d) = &o.out {
            self.out = Some(d.clone());
        }
        if let Some(p) = &o.polytopes {
            self.polytopes = p.clone();
        }
        if let Some(n) = &o.ns {
            self.ns = n.clone();
        }
        if let Some(t) = o.trials {
            self.trials = t;
        }
    }

    pub fn require_seed(&self) -> CliResult<u64> {
        self.seed
            .ok_or_else(|| CliError::Config("a seed is required (config \"seed\" or --seed)".into()))
    }

    pub fn resolve_polytopes(&self) -> CliResult<Vec<IntegralPolytope>> {
        if self.polytopes.is_empty() {
            return Err(CliError::Config("no polytopes given".into()));
        }
        self.polytopes.iter().map(PolytopeRef::resolve).collect()
    }

    pub fn require_ns(&self) -> CliResult<&[u32]> {
        if self.ns.is_empty() || self.ns.contains(&0) {
            return Err(CliError::Config("ns must be a non-empty list of positive degrees".into()));
        }
        Ok(&self.ns)
    }

    pub fn weighted_set_or(&self, default: WeightedSetSpec) -> WeightedSetSpec {
        self.weighted_set.clone().unwrap_or(default)
    }

    pub fn validate_law(&self) -> CliResult<()> {
        self.law.validate()?;
        self.laws.iter().try_for_each(|l| l.validate())?;
        Ok(())
    }

    /// Canonical JSON of the fields that determine the data, excluding the
    /// output location.
    pub fn canonical(&self, command: &str) -> String {
        let mut c = self.clone();
        c.out = None;
        serde_json::json!({ "command": command, "config": c }).to_string()
    }
}

/// Orthonormal basis of `Poly(NP)` for the configured weighted set.
pub fn build_basis(spec: &WeightedSetSpec, p: &IntegralPolytope, n: u32) -> CliResult<Arc<OrthoBasis>> {
    let b = match spec {
        WeightedSetSpec::TorusK => torus_basis(p, n)?,
        WeightedSetSpec::Sphere3 => sphere3_basis(p, n)?,
        WeightedSetSpec::FubiniStudy { p: deg } => fs_basis(p, n, *deg)?,
        WeightedSetSpec::CustomQuadrature { label } => {
            return Err(CliError::Config(format!(
                "custom quadrature {label:?} is not available from a config file"
            )))
        }
    };
    Ok(Arc::new(b))
}
