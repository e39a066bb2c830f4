use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};
use suctopp::contact::{load_cup, ContactModel};
use suctopp::dynamics::{load_object, load_robot, KinematicLimits, RigidBodyParams, SerialChain};
use suctopp::parameterize::RetimeOptions;

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileRef {
    file: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LimitsSection {
    v_max_radps: Vec<f64>,
    a_max_radps2: Vec<f64>,
    q_min_rad: Option<Vec<f64>>,
    q_max_rad: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToppSettings {
    pub gridpoints: usize,
    pub x_start: f64,
    pub x_end: f64,
    pub rate_hz: f64,
    pub refine_tol: f64,
    pub max_refinements: usize,
    pub checks_per_interval: usize,
}

impl Default for ToppSettings {
    fn default() -> Self {
        let r = RetimeOptions::default();
        ToppSettings {
            gridpoints: r.gridpoints,
            x_start: r.x_start,
            x_end: r.x_end,
            rate_hz: 125.0,
            refine_tol: r.refine_tol,
            max_refinements: r.max_refinements,
            checks_per_interval: r.checks_per_interval,
        }
    }
}

impl ToppSettings {
    pub fn retime_options(&self) -> RetimeOptions {
        RetimeOptions {
            gridpoints: self.gridpoints,
            x_start: self.x_start,
            x_end: self.x_end,
            refine_tol: self.refine_tol,
            max_refinements: self.max_refinements,
            checks_per_interval: self.checks_per_interval,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ApproxSettings {
    pub max_vertices: usize,
    pub n_guides: usize,
}

impl Default for ApproxSettings {
    fn default() -> Self {
        ApproxSettings {
            max_vertices: 60,
            n_guides: 5000,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchSettings {
    pub n_paths: usize,
    pub min_vias: usize,
    pub max_vias: usize,
    /// Waypoints must hold statically under this multiple of gravity.
    pub waypoint_gravity_factor: f64,
    /// Every point of the path spline must hold statically under this
    /// multiple of gravity.
    pub path_gravity_factor: f64,
    pub max_attempts: usize,
}

impl Default for BenchSettings {
    fn default() -> Self {
        BenchSettings {
            n_paths: 20,
            min_vias: 1,
            max_vias: 3,
            waypoint_gravity_factor: 1.5,
            path_gravity_factor: 1.2,
            max_attempts: 5000,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConeSettings {
    pub max_facets: usize,
}

impl Default for ConeSettings {
    fn default() -> Self {
        ConeSettings { max_facets: 500_000 }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    seed: u64,
    output_dir: Option<PathBuf>,
    robot: FileRef,
    object: FileRef,
    cup: FileRef,
    limits: LimitsSection,
    #[serde(default)]
    topp: ToppSettings,
    #[serde(default)]
    approx: ApproxSettings,
    #[serde(default)]
    bench: BenchSettings,
    #[serde(default)]
    cone: ConeSettings,
}

/// A loaded and validated configuration.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub chain: SerialChain,
    pub object: RigidBodyParams,
    pub cup: ContactModel,
    pub limits: KinematicLimits,
    pub topp: ToppSettings,
    pub approx: ApproxSettings,
    pub bench: BenchSettings,
    pub cone: ConeSettings,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// SHA-256 of the config file bytes, hex.
    pub config_hash: String,
}

fn cfg<E: std::fmt::Display>(what: &str) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Config(format!("{what}: {e}"))
}

pub fn hash_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario, CliError> {
        let bytes = std::fs::read(path).map_err(cfg(&path.display().to_string()))?;
        let text = String::from_utf8(bytes.clone()).map_err(cfg(&path.display().to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base, hash_hex(&bytes))
    }

    /// Parse config text; relative file references resolve against `base`.
    pub fn parse(text: &str, base: &Path, config_hash: String) -> Result<Scenario, CliError> {
        let f: ConfigFile = toml::from_str(text).map_err(cfg("config"))?;
        let resolve = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base.join(p) };
        let chain = load_robot(&resolve(&f.robot.file)).map_err(cfg("robot"))?;
        let object = load_object(&resolve(&f.object.file)).map_err(cfg("object"))?;
        let cup = load_cup(&resolve(&f.cup.file)).map_err(cfg("cup"))?;
        let l = f.limits;
        let n = chain.n();
        let limits = KinematicLimits::with_positions(
            l.v_max_radps,
            l.a_max_radps2,
            l.q_min_rad.unwrap_or_else(|| vec![-std::f64::consts::PI; n]),
            l.q_max_rad.unwrap_or_else(|| vec![std::f64::consts::PI; n]),
        )
        .map_err(cfg("limits"))?;
        if limits.n() != n {
            return Err(CliError::Config(format!("limits cover {} joints, robot has {n}", limits.n())));
        }
        if limits.v_max.iter().chain(&limits.a_max).any(|v| *v <= 0.0) {
            return Err(CliError::Config("limits must be strictly positive".into()));
        }
        if f.topp.gridpoints < 2 || !(f.topp.rate_hz > 0.0) {
            return Err(CliError::Config("topp needs gridpoints >= 2 and rate_hz > 0".into()));
        }
        if f.approx.max_vertices < 7 {
            return Err(CliError::Config("approx.max_vertices must be at least 7".into()));
        }
        if f.bench.min_vias > f.bench.max_vias {
            return Err(CliError::Config("bench.min_vias exceeds bench.max_vias".into()));
        }
        Ok(Scenario {
            chain,
            object,
            cup,
            limits,
            topp: f.topp,
            approx: f.approx,
            bench: f.bench,
            cone: f.cone,
            seed: f.seed,
            output_dir: f.output_dir.map(|p| resolve(&p)).unwrap_or_else(|| PathBuf::from("out")),
            config_hash,
        })
    }
}
