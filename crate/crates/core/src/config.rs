//! Experiment configuration: a TOML tree, validated before any work starts.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::enumeration::PlaceRole;
use crate::error::{Error, Result};
use crate::number_field::{IdealZBasis, TotallyRealField};
use crate::quadrature::Tolerance;
use crate::quaternion::QuaternionAlgebra;

pub const FORMAT_VERSION: u32 = 1;

/// The shipped default, also embedded so the binary runs without a file.
pub const DEFAULT_CONFIG: &str = include_str!("../config/default.toml");

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub format_version: u32,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// 0 means one worker per core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
    #[serde(default = "default_cache")]
    pub cache_dir: PathBuf,
    pub field: FieldSpec,
    pub algebra: AlgebraSpec,
    /// Generators (power-basis coordinates) and exponents.
    pub ideals: Vec<IdealSpec>,
    pub counting: CountingSpec,
    pub harmonic: HarmonicSpec,
    pub groups: GroupSpec,
    pub bounds: BoundsSpec,
    pub acceptance: AcceptanceSpec,
}

fn default_seed() -> u64 {
    1
}
fn default_budget() -> u64 {
    crate::enumeration::DEFAULT_BUDGET as u64
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}
fn default_cache() -> PathBuf {
    PathBuf::from("cache")
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    /// `c_0, ..., c_n`, monic.
    pub min_poly: Vec<i128>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub p: Vec<i128>,
    pub q: Vec<i128>,
    pub d: usize,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IdealSpec {
    pub gen: Vec<i128>,
    #[serde(default = "one")]
    pub power: u32,
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, tag = "role", rename_all = "snake_case")]
pub enum RoleSpec {
    Cap { cap: f64 },
    NormWindow { k: f64 },
    TraceWindow { eta: f64, cap: f64 },
}

impl RoleSpec {
    pub fn to_role(&self) -> PlaceRole {
        match *self {
            RoleSpec::Cap { cap } => PlaceRole::Cap { cap },
            RoleSpec::NormWindow { k } => PlaceRole::NormWindow { k },
            RoleSpec::TraceWindow { eta, cap } => PlaceRole::TraceWindow { eta, cap },
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CountingSpec {
    /// The x-grid is `e^lo, ..., e^hi`.
    pub x_exp: (i32, i32),
    /// Roles for split places `2..=d`; empty means `Cap { cap }` everywhere.
    #[serde(default)]
    pub roles: Vec<RoleSpec>,
    pub cap: f64,
    pub eps: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HarmonicSpec {
    pub enabled: bool,
    pub tol_abs: f64,
    pub tol_rel: f64,
    pub phi_m: Vec<i64>,
    pub bump_radius: f64,
    pub convolution_nodes: usize,
    pub decay_radii: Vec<f64>,
    pub decay_samples: usize,
    pub orbital_m: Vec<i64>,
    pub orbital_theta_over_pi: Vec<f64>,
    pub phi_mass_m: Vec<i64>,
    pub phi_mass_rho: f64,
}

impl HarmonicSpec {
    pub fn tolerance(&self) -> Tolerance {
        Tolerance::new(self.tol_abs, self.tol_rel)
    }
}

/// One finite quotient: a field (minimal polynomial) and a principal ideal.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GroupCase {
    pub label: String,
    pub min_poly: Vec<i128>,
    pub gen: Vec<i128>,
    #[serde(default = "one")]
    pub power: u32,
    /// Residue field size, when the quotient is `PSL(2, F_q)`.
    #[serde(default)]
    pub residue_field: Option<u64>,
    /// Compute character degrees (needs order <= 10^4).
    #[serde(default = "yes")]
    pub degrees: bool,
}

fn yes() -> bool {
    true
}

impl GroupCase {
    pub fn ideal(&self) -> Result<IdealZBasis> {
        let f = TotallyRealField::new(&self.min_poly)?;
        Ok(IdealZBasis::principal(&f, &f.element(&self.gen)?)?.power(self.power))
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub budget: u64,
    pub cases: Vec<GroupCase>,
    /// Generators of the discriminant ideal; empty means `(2pq)` times index primes.
    #[serde(default)]
    pub discriminant: Vec<Vec<i128>>,
    pub mlb_eps: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BoundsSpec {
    #[serde(default)]
    pub t_grid: Vec<f64>,
    #[serde(default)]
    pub v_grid: Vec<f64>,
    #[serde(default)]
    pub p_grid: Vec<f64>,
    #[serde(default)]
    pub c_grid: Vec<f64>,
    pub eps: Vec<f64>,
    pub delta: Vec<f64>,
}

/// Sizes of the randomized acceptance checks.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AcceptanceSpec {
    pub lemma_box_instances: usize,
    pub oracle_queries: usize,
    pub oracle_x_max: f64,
    /// Criterion 5 ideals, as generators.
    pub scaling_ideals: Vec<IdealSpec>,
    pub scaling_x_exp: (i32, i32),
    pub invariant_x: f64,
    pub plancherel_r_max: f64,
    pub plancherel_n: usize,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn default_config() -> Self {
        Self::from_toml(DEFAULT_CONFIG).expect("shipped default config is valid")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.format_version != FORMAT_VERSION {
            return bad(format!(
                "format_version {} not supported (expected {FORMAT_VERSION})",
                self.format_version
            ));
        }
        let alg = self.algebra().map_err(|e| Error::Config(format!("algebra: {e}")))?;
        for s in &self.ideals {
            self.ideal(s).map_err(|e| Error::Config(format!("ideal {:?}: {e}", s.gen)))?;
        }
        let (lo, hi) = self.counting.x_exp;
        if lo > hi {
            return bad(format!("counting.x_exp ({lo}, {hi}) is empty"));
        }
        if !self.counting.roles.is_empty() && self.counting.roles.len() + 1 != alg.split_places() {
            return bad(format!(
                "counting.roles has {} entries, need d - 1 = {}",
                self.counting.roles.len(),
                alg.split_places() - 1
            ));
        }
        let h = &self.harmonic;
        if !(h.tol_abs > 0.0 && h.tol_rel > 0.0) {
            return bad("harmonic tolerances must be positive".into());
        }
        if h.phi_m.iter().chain(&h.orbital_m).any(|&m| m == 0) {
            return bad("harmonic weights must be nonzero".into());
        }
        if !(h.bump_radius > 0.0) || h.decay_radii.iter().any(|r| !(*r > 0.0)) {
            return bad("radii must be positive".into());
        }
        for c in &self.groups.cases {
            c.ideal().map_err(|e| Error::Config(format!("group case {}: {e}", c.label)))?;
        }
        let b = &self.bounds;
        if b.t_grid.iter().chain(&b.v_grid).any(|x| !(*x >= 1.0)) {
            return bad("bounds T and V grids need values >= 1".into());
        }
        if b.p_grid.iter().any(|p| !(*p > 2.0)) || b.c_grid.iter().any(|c| !(*c > 0.0)) {
            return bad("bounds grids need p > 2 and c > 0".into());
        }
        if self.acceptance.plancherel_n % 2 != 0 {
            return bad("acceptance.plancherel_n must be even".into());
        }
        Ok(())
    }

    pub fn field(&self) -> Result<TotallyRealField> {
        TotallyRealField::new(&self.field.min_poly)
    }

    pub fn algebra(&self) -> Result<QuaternionAlgebra> {
        let f = self.field()?;
        QuaternionAlgebra::new(&f, f.element(&self.algebra.p)?, f.element(&self.algebra.q)?, Some(self.algebra.d))
    }

    pub fn ideal(&self, s: &IdealSpec) -> Result<IdealZBasis> {
        let f = self.field()?;
        Ok(IdealZBasis::principal(&f, &f.element(&s.gen)?)?.power(s.power))
    }

    pub fn roles(&self) -> Result<Vec<PlaceRole>> {
        let d = self.algebra()?.split_places();
        if self.counting.roles.is_empty() {
            Ok(vec![PlaceRole::Cap { cap: self.counting.cap }; d - 1])
        } else {
            Ok(self.counting.roles.iter().map(RoleSpec::to_role).collect())
        }
    }

    pub fn discriminant(&self, alg: &QuaternionAlgebra) -> Result<IdealZBasis> {
        if self.groups.discriminant.is_empty() {
            return crate::congruence_groups::default_discriminant(alg);
        }
        let f = alg.field();
        let gens = self
            .groups
            .discriminant
            .iter()
            .map(|g| f.element(g))
            .collect::<Result<Vec<_>>>()?;
        IdealZBasis::generated_by(f, &gens)
    }
}
