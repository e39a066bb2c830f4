use nalgebra::Vector6;
use rand::Rng;

use super::cone::WrenchCone;
use super::ContactError;
use crate::dynamics::{object_wrench, KinematicLimits, RigidBodyParams, SerialChain};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleSource {
    Simulation,
    Dataset,
}

/// Wrenches in {c} that guide the approximation towards the region the
/// task actually uses.
#[derive(Debug, Clone, PartialEq)]
pub struct GuidingSampleSet {
    pub samples: Vec<Vector6<f64>>,
    pub source: SampleSource,
    /// Number of candidates drawn before filtering.
    pub drawn: usize,
}

impl GuidingSampleSet {
    /// Keep the dataset wrenches that lie in `cone`.
    pub fn from_dataset(wrenches: &[Vector6<f64>], cone: &WrenchCone) -> Result<Self, ContactError> {
        let samples: Vec<_> = wrenches.iter().copied().filter(|w| cone.contains(w, 0.0)).collect();
        if samples.len() < 8 {
            return Err(ContactError::TooFewRetained(samples.len()));
        }
        Ok(GuidingSampleSet {
            samples,
            source: SampleSource::Dataset,
            drawn: wrenches.len(),
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.gen_range(lo..=hi)
    } else {
        lo
    }
}

/// Draw `n` states uniformly within `limits`, map each to the object wrench
/// in {c} and keep those inside `cone`.
pub fn sample_guiding_wrenches<R: Rng>(
    chain: &SerialChain,
    object: &RigidBodyParams,
    limits: &KinematicLimits,
    cone: &WrenchCone,
    n: usize,
    rng: &mut R,
) -> Result<GuidingSampleSet, ContactError> {
    if n < 100 {
        return Err(ContactError::InvalidParameter(format!("need at least 100 samples, got {n}")));
    }
    if limits.n() != chain.n() {
        return Err(ContactError::InvalidParameter(format!(
            "limits cover {} joints, chain has {}",
            limits.n(),
            chain.n()
        )));
    }
    let all = limits.v_max.iter().chain(&limits.a_max).chain(&limits.q_min).chain(&limits.q_max);
    if all.clone().any(|x| !x.is_finite()) {
        return Err(ContactError::InvalidParameter("limits must be finite".into()));
    }
    let g_cb = object.g_cb();
    let dof = chain.n();
    let mut samples = Vec::new();
    for _ in 0..n {
        let q: Vec<f64> = (0..dof).map(|i| uniform(rng, limits.q_min[i], limits.q_max[i])).collect();
        let qd: Vec<f64> = (0..dof).map(|i| uniform(rng, -limits.v_max[i], limits.v_max[i])).collect();
        let qdd: Vec<f64> = (0..dof).map(|i| uniform(rng, -limits.a_max[i], limits.a_max[i])).collect();
        let w = g_cb * object_wrench(chain, object, &q, &qd, &qdd)?;
        if cone.contains(&w, 0.0) {
            samples.push(w);
        }
    }
    if samples.len() < 8 {
        return Err(ContactError::TooFewRetained(samples.len()));
    }
    Ok(GuidingSampleSet {
        samples,
        source: SampleSource::Simulation,
        drawn: n,
    })
}
