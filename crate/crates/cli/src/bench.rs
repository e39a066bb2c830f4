use rand::Rng;
use suctopp::dynamics::KinematicLimits;
use suctopp::parameterize::{build_path, GeometricPath, GraspModel};

use crate::config::BenchSettings;
use crate::error::CliError;

/// Samples along the spline checked against the path gravity factor.
pub const PATH_CHECKS: usize = 200;

fn scaled(model: &GraspModel, factor: f64) -> GraspModel {
    GraspModel {
        object: model.object.clone().with_gravity(model.object.gravity * factor),
        ..model.clone()
    }
}

fn holds_static(model: &GraspModel, q: &[f64]) -> bool {
    let zero = vec![0.0; q.len()];
    match model.residual(q, &zero, &zero) {
        Ok(r) => r.iter().all(|v| *v <= 0.0),
        Err(_) => false,
    }
}

/// Draws random waypoint sequences (start, 1..=3 vias, goal) inside the joint
/// position limits. A waypoint is kept when the grasp holds statically under
/// `waypoint_gravity_factor` g; a path is kept when every one of
/// [`PATH_CHECKS`] spline samples holds under `path_gravity_factor` g.
pub struct PathGenerator<'a> {
    heavy: GraspModel,
    mid: GraspModel,
    limits: &'a KinematicLimits,
    settings: &'a BenchSettings,
}

impl<'a> PathGenerator<'a> {
    pub fn new(model: &GraspModel, limits: &'a KinematicLimits, settings: &'a BenchSettings) -> Self {
        PathGenerator {
            heavy: scaled(model, settings.waypoint_gravity_factor),
            mid: scaled(model, settings.path_gravity_factor),
            limits,
            settings,
        }
    }

    fn waypoint<R: Rng>(&self, rng: &mut R, budget: &mut usize) -> Option<Vec<f64>> {
        while *budget > 0 {
            *budget -= 1;
            let q: Vec<f64> = (0..self.limits.n())
                .map(|j| rng.gen_range(self.limits.q_min[j]..=self.limits.q_max[j]))
                .collect();
            if holds_static(&self.heavy, &q) {
                return Some(q);
            }
        }
        None
    }

    /// One accepted path, or `None` once `max_attempts` joint draws are spent.
    pub fn next_path<R: Rng>(&self, rng: &mut R) -> Option<(Vec<Vec<f64>>, GeometricPath)> {
        let mut budget = self.settings.max_attempts;
        loop {
            let vias = rng.gen_range(self.settings.min_vias..=self.settings.max_vias);
            let mut wps = Vec::with_capacity(vias + 2);
            for _ in 0..vias + 2 {
                wps.push(self.waypoint(rng, &mut budget)?);
            }
            let Ok(path) = build_path(&wps) else { continue };
            let ok = (0..=PATH_CHECKS).all(|k| {
                let s = path.s_end() * k as f64 / PATH_CHECKS as f64;
                holds_static(&self.mid, &path.eval(s).q)
            });
            if ok {
                return Some((wps, path));
            }
        }
    }

    pub fn paths<R: Rng>(&self, n: usize, rng: &mut R) -> Result<Vec<(Vec<Vec<f64>>, GeometricPath)>, CliError> {
        (0..n)
            .map(|i| {
                self.next_path(rng).ok_or_else(|| {
                    CliError::Config(format!(
                        "path {i}: no statically feasible path within {} draws",
                        self.settings.max_attempts
                    ))
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use suctopp::contact::{exact_wrench_cone, ContactModel};
    use suctopp::dynamics::{desk_limits, desk_robot, notebook};

    #[test]
    fn generated_paths_respect_limits_and_hold() {
        let cup = ContactModel::circular(0.3, 30e3, 0.0125, 3, 4, Some(10.0)).unwrap();
        let cone = exact_wrench_cone(&cup).unwrap();
        let model = GraspModel::new(desk_robot(), notebook(), &cone);
        let l = desk_limits();
        let limits = KinematicLimits::with_positions(
            l.v_max,
            l.a_max,
            vec![-1.5, -1.0, 0.2, -0.3, -1.8, -1.5],
            vec![1.5, 0.3, 1.8, 0.3, 0.0, 1.5],
        )
        .unwrap();
        let settings = BenchSettings::default();
        let gen = PathGenerator::new(&model, &limits, &settings);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let paths = gen.paths(3, &mut rng).unwrap();
        for (wps, path) in &paths {
            assert!((3..=5).contains(&wps.len()));
            for q in wps {
                assert!(q.iter().enumerate().all(|(j, v)| *v >= limits.q_min[j] && *v <= limits.q_max[j]));
                assert!(holds_static(&model, q));
            }
            assert!(holds_static(&model, &path.eval(path.s_end() * 0.37).q));
        }
        let mut again = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let repeat = gen.paths(3, &mut again).unwrap();
        assert_eq!(paths[2].0, repeat[2].0);
    }
}
