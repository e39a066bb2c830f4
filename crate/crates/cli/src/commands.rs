use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use suctopp::contact::{
    approximate_cone, exact_wrench_cone_with, sample_guiding_wrenches, ConeOptions, WrenchCone,
};
use suctopp::parameterize::{
    build_path, parse_path_file, parse_trajectory_csv, retime as retime_path, sample_trajectory,
    validate_trajectory, write_trajectory_csv, GraspModel, ParamError,
};

use crate::bench::PathGenerator;
use crate::config::Scenario;
use crate::error::{io_err, CliError};

pub const TOOL: &str = "suctopp";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Where a command writes its files, plus the run-level overrides.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub scenario: Scenario,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl RunContext {
    pub fn new(scenario: Scenario, seed: Option<u64>, out: Option<PathBuf>) -> Self {
        RunContext {
            seed: seed.unwrap_or(scenario.seed),
            out_dir: out.unwrap_or_else(|| scenario.output_dir.clone()),
            scenario,
        }
    }

    fn header(&self, command: &str) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("tool".into(), json!(TOOL));
        m.insert("version".into(), json!(VERSION));
        m.insert("command".into(), json!(command));
        m.insert("config_hash".into(), json!(self.scenario.config_hash));
        m.insert("seed".into(), json!(self.seed));
        m
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.out_dir).map_err(|e| io_err(&self.out_dir, e))?;
        let p = self.out_dir.join(name);
        std::fs::write(&p, contents).map_err(|e| io_err(&p, e))?;
        Ok(p)
    }

    /// Reports are deterministic for a fixed config and seed; wall-clock
    /// numbers go to a sibling `.timing.json`.
    fn finish(&self, name: &str, report: Map<String, Value>, timing: Value) -> Result<Value, CliError> {
        let report = Value::Object(report);
        self.write(&format!("{name}.json"), &(pretty(&report) + "\n"))?;
        self.write(&format!("{name}.timing.json"), &(pretty(&timing) + "\n"))?;
        Ok(report)
    }

    fn cone_options(&self) -> ConeOptions {
        ConeOptions {
            max_facets: self.scenario.cone.max_facets,
            ..ConeOptions::default()
        }
    }

    /// The cone from `file`, or the exact cone of the configured cup.
    fn cone(&self, file: Option<&Path>) -> Result<WrenchCone, CliError> {
        match file {
            Some(p) => Ok(WrenchCone::load(p)?),
            None => Ok(exact_wrench_cone_with(&self.scenario.cup, &self.cone_options())?),
        }
    }

    fn grasp(&self, cone: &WrenchCone) -> GraspModel {
        GraspModel::new(self.scenario.chain.clone(), self.scenario.object.clone(), cone)
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values always serialize")
}

fn cone_summary(cone: &WrenchCone) -> Value {
    json!({
        "kind": format!("{:?}", cone.kind).to_lowercase(),
        "facets": cone.nrows(),
        "simplicial_rows": cone.simplicial_rows(),
        "vertices": cone.vertices.as_ref().map(|v| v.vertices.len()),
    })
}

pub fn cone_build(ctx: &RunContext) -> Result<Value, CliError> {
    let t0 = Instant::now();
    let cone = exact_wrench_cone_with(&ctx.scenario.cup, &ctx.cone_options())?;
    let build_s = t0.elapsed().as_secs_f64();
    let file = ctx.write("exact.cone", &cone.to_text())?;
    let cup = &ctx.scenario.cup;
    let mut r = ctx.header("cone build");
    r.insert(
        "cup".into(),
        json!({
            "contact_points": cup.m(),
            "mu": cup.mu,
            "facets_per_cone": cup.facets_per_cone,
            "normal_force_cap_n": cup.normal_force_cap,
        }),
    );
    r.insert("cone".into(), cone_summary(&cone));
    r.insert("file".into(), json!(file.display().to_string()));
    ctx.finish("cone_build", r, json!({ "build_s": build_s }))
}

pub fn cone_approx(ctx: &RunContext, exact_file: &Path) -> Result<Value, CliError> {
    let exact = WrenchCone::load(exact_file)?;
    let sc = &ctx.scenario;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let t0 = Instant::now();
    let guides = sample_guiding_wrenches(&sc.chain, &sc.object, &sc.limits, &exact, sc.approx.n_guides, &mut rng)?;
    let sample_s = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let (cone, rep) = approximate_cone(&exact, &guides, sc.approx.max_vertices, ctx.seed)?;
    let approx_s = t1.elapsed().as_secs_f64();
    let file = ctx.write("approx.cone", &cone.to_text())?;
    let iterations: Vec<Value> = rep
        .iterations
        .iter()
        .map(|s| {
            json!({
                "iteration": s.iteration,
                "points": s.points,
                "hull_vertices": s.hull_vertices,
                "facets": s.facets,
                "covered": s.covered,
                "coverage": s.coverage,
            })
        })
        .collect();
    let mut r = ctx.header("cone approx");
    r.insert("exact".into(), cone_summary(&exact));
    r.insert("guides".into(), json!({ "drawn": guides.drawn, "retained": guides.len() }));
    r.insert("max_vertices".into(), json!(sc.approx.max_vertices));
    r.insert("seed_attempts".into(), json!(rep.seed_attempts));
    r.insert("no_progress_faces".into(), json!(rep.no_progress));
    r.insert("final_coverage".into(), json!(rep.final_coverage()));
    r.insert("cone".into(), cone_summary(&cone));
    r.insert(
        "simplicial_ratio".into(),
        json!(exact.simplicial_rows() as f64 / cone.simplicial_rows().max(1) as f64),
    );
    r.insert("iterations".into(), Value::Array(iterations));
    r.insert("file".into(), json!(file.display().to_string()));
    ctx.finish("cone_approx", r, json!({ "sample_s": sample_s, "approx_s": approx_s }))
}

fn read(p: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(p).map_err(|e| io_err(p, e))
}

pub fn retime(ctx: &RunContext, path_file: &Path, cone_file: Option<&Path>, no_scc: bool) -> Result<Value, CliError> {
    let sc = &ctx.scenario;
    let waypoints = parse_path_file(&read(path_file)?)?;
    if let Some(w) = waypoints.first() {
        if w.len() != sc.chain.n() {
            return Err(ParamError::DimensionMismatch { expected: sc.chain.n(), got: w.len() }.into());
        }
    }
    let path = build_path(&waypoints)?;
    let grasp = if no_scc { None } else { Some(ctx.grasp(&ctx.cone(cone_file)?)) };
    let opts = sc.topp.retime_options();
    let res = retime_path(&path, &sc.limits, grasp.as_ref(), &opts)?;
    let traj = sample_trajectory(&res.param, &path, sc.topp.rate_hz);
    let file = ctx.write("trajectory.csv", &write_trajectory_csv(&traj))?;
    let mut r = ctx.header("retime");
    r.insert("scc".into(), json!(!no_scc));
    r.insert("waypoints".into(), json!(waypoints.len()));
    r.insert("gridpoints".into(), json!(res.param.grid.len()));
    r.insert("rows_per_stage".into(), json!(res.rows_per_stage));
    r.insert("duration_s".into(), json!(res.param.duration));
    r.insert(
        "duration_no_scc_s".into(),
        json!(res.reference.as_ref().map_or(res.param.duration, |p| p.duration)),
    );
    r.insert("extension_pct".into(), json!(res.extension_pct()));
    r.insert("refinements".into(), json!(res.refinements));
    r.insert("intersample_violation".into(), json!(res.intersample_violation));
    r.insert("samples".into(), json!(traj.len()));
    r.insert("rate_hz".into(), json!(sc.topp.rate_hz));
    r.insert("file".into(), json!(file.display().to_string()));
    ctx.finish(
        "retime",
        r,
        json!({ "discretize_s": res.discretize_s, "solve_s": res.solve_s }),
    )
}

/// Checks a sampled trajectory, optionally sped up by `kappa`, against the
/// grasp constraint. The report is written either way; a violation beyond
/// `tol` is returned as [`CliError::ValidationFailed`].
pub fn validate(
    ctx: &RunContext,
    traj_file: &Path,
    cone_file: Option<&Path>,
    kappa: f64,
    tol: f64,
) -> Result<Value, CliError> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(CliError::Config(format!("speed scale must be positive, got {kappa}")));
    }
    let traj = parse_trajectory_csv(&read(traj_file)?)?;
    if traj.dof() != ctx.scenario.chain.n() {
        return Err(ParamError::DimensionMismatch { expected: ctx.scenario.chain.n(), got: traj.dof() }.into());
    }
    let traj = traj.time_scaled(kappa);
    let grasp = ctx.grasp(&ctx.cone(cone_file)?);
    let rep = validate_trajectory(&traj, &grasp, tol)?;
    let mut r = ctx.header("validate");
    r.insert("speed_scale".into(), json!(kappa));
    r.insert("passed".into(), json!(rep.passed()));
    r.insert("validation".into(), serde_json::to_value(&rep).expect("report serializes"));
    let v = ctx.finish("validate", r, json!({}))?;
    if rep.passed() {
        Ok(v)
    } else {
        Err(CliError::ValidationFailed(rep.max_violation.unwrap_or(f64::NAN)))
    }
}

pub fn bench(ctx: &RunContext, cone_file: Option<&Path>, n_paths: Option<usize>) -> Result<Value, CliError> {
    let sc = &ctx.scenario;
    let n = n_paths.unwrap_or(sc.bench.n_paths);
    let cone = ctx.cone(cone_file)?;
    let grasp = ctx.grasp(&cone);
    let gen = PathGenerator::new(&grasp, &sc.limits, &sc.bench);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let paths = gen.paths(n, &mut rng)?;
    let opts = sc.topp.retime_options();
    let mut rows = Vec::new();
    let mut timing = Vec::new();
    let mut ext = Vec::new();
    let mut infeasible = 0;
    for (i, (wps, path)) in paths.iter().enumerate() {
        match retime_path(path, &sc.limits, Some(&grasp), &opts) {
            Ok(res) => {
                let t_kin = res.reference.as_ref().map_or(res.param.duration, |p| p.duration);
                let e = res.extension_pct();
                if let Some(e) = e {
                    ext.push(e);
                }
                rows.push(json!({
                    "path": i,
                    "waypoints": wps.len(),
                    "t_kin_s": t_kin,
                    "t_scc_s": res.param.duration,
                    "extension_pct": e,
                    "refinements": res.refinements,
                    "intersample_violation": res.intersample_violation,
                }));
                timing.push(json!({ "path": i, "discretize_s": res.discretize_s, "solve_s": res.solve_s }));
            }
            Err(ParamError::Infeasible(k)) => {
                infeasible += 1;
                rows.push(json!({ "path": i, "waypoints": wps.len(), "infeasible_at": k }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let mean = if ext.is_empty() { None } else { Some(ext.iter().sum::<f64>() / ext.len() as f64) };
    let mut r = ctx.header("bench");
    r.insert("cone".into(), cone_summary(&cone));
    r.insert("n_paths".into(), json!(n));
    r.insert("infeasible".into(), json!(infeasible));
    r.insert("positive_extensions".into(), json!(ext.iter().filter(|e| **e > 0.0).count()));
    r.insert("mean_extension_pct".into(), json!(mean));
    r.insert("min_extension_pct".into(), json!(ext.iter().copied().reduce(f64::min)));
    r.insert("max_extension_pct".into(), json!(ext.iter().copied().reduce(f64::max)));
    r.insert("paths".into(), Value::Array(rows));
    ctx.finish("bench", r, json!({ "paths": timing }))
}
