use std::f64::consts::PI;
use std::path::Path;

use nalgebra::{Matrix3, Rotation3, Vector3};
use serde::Deserialize;

use super::ContactError;

/// A rigid frame inside the cup frame {c}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    pub p: Vector3<f64>,
    pub r: Matrix3<f64>,
}

impl LocalFrame {
    pub fn identity() -> Self {
        LocalFrame {
            p: Vector3::zeros(),
            r: Matrix3::identity(),
        }
    }
}

/// Suction cup contact: `m` point contacts with linearized friction plus
/// one fixed suction force.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactModel {
    pub mu: f64,
    /// Magnitude of the negative pressure, Pa.
    pub pressure: f64,
    /// Suction area, m^2.
    pub area: f64,
    pub contact_points: Vec<LocalFrame>,
    /// Frame {0} of the suction force. Its z axis points from the object
    /// into the cup, so the pull acts along -z of {c}.
    pub suction_frame: LocalFrame,
    pub facets_per_cone: usize,
    /// Per-point normal force cap f_max, N.
    pub normal_force_cap: f64,
}

pub(crate) fn check_rotation(r: &Matrix3<f64>) -> Result<(), ContactError> {
    let err = (r.transpose() * r - Matrix3::identity()).norm();
    if err > 1e-9 || (r.determinant() - 1.0).abs() > 1e-9 {
        return Err(ContactError::InvalidRotation(err));
    }
    Ok(())
}

impl ContactModel {
    /// `m` contacts equally spaced on a circle of radius `radius`, normals
    /// along the cup axis. `cap` defaults to `3 P A / m`.
    pub fn circular(
        mu: f64,
        pressure: f64,
        radius: f64,
        m: usize,
        facets_per_cone: usize,
        cap: Option<f64>,
    ) -> Result<Self, ContactError> {
        let area = PI * radius * radius;
        Self::ring(mu, pressure, area, radius, m, facets_per_cone, cap)
    }

    /// Like [`ContactModel::circular`] with the area given separately from the
    /// contact ring radius.
    pub fn ring(
        mu: f64,
        pressure: f64,
        area: f64,
        radius: f64,
        m: usize,
        facets_per_cone: usize,
        cap: Option<f64>,
    ) -> Result<Self, ContactError> {
        let contact_points = (0..m)
            .map(|i| {
                let th = 2.0 * PI * i as f64 / m.max(1) as f64;
                LocalFrame {
                    p: Vector3::new(radius * th.cos(), radius * th.sin(), 0.0),
                    r: Matrix3::identity(),
                }
            })
            .collect();
        let cap = cap.unwrap_or(3.0 * pressure * area / m.max(1) as f64);
        let model = ContactModel {
            mu,
            pressure,
            area,
            contact_points,
            suction_frame: LocalFrame {
                p: Vector3::zeros(),
                r: *Rotation3::from_axis_angle(&Vector3::x_axis(), PI).matrix(),
            },
            facets_per_cone,
            normal_force_cap: cap,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn m(&self) -> usize {
        self.contact_points.len()
    }

    pub fn validate(&self) -> Result<(), ContactError> {
        let bad = |what: &str| Err(ContactError::InvalidParameter(what.to_string()));
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return bad("mu must be positive");
        }
        if !(self.pressure > 0.0 && self.pressure.is_finite()) {
            return bad("pressure must be positive");
        }
        if !(self.area > 0.0 && self.area.is_finite()) {
            return bad("area must be positive");
        }
        if self.m() < 3 {
            return bad("at least 3 contact points are required");
        }
        if !(self.normal_force_cap > 0.0 && self.normal_force_cap.is_finite()) {
            return bad("normal force cap must be positive");
        }
        if self.facets_per_cone < 4 || self.facets_per_cone % 2 != 0 {
            return bad("facets per cone must be an even integer >= 4");
        }
        for f in self.contact_points.iter().chain([&self.suction_frame]) {
            check_rotation(&f.r)?;
        }
        Ok(())
    }
}

/// Cup description file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CupFile {
    pub mu: f64,
    pub pressure_pa: f64,
    pub area_m2: Option<f64>,
    pub radius_m: Option<f64>,
    pub num_points: usize,
    #[serde(default = "default_facets")]
    pub facets_per_cone: usize,
    pub normal_force_cap_n: Option<f64>,
}

fn default_facets() -> usize {
    4
}

impl CupFile {
    pub fn into_model(self) -> Result<ContactModel, ContactError> {
        match (self.area_m2, self.radius_m) {
            (_, Some(r)) => {
                let area = self.area_m2.unwrap_or(PI * r * r);
                ContactModel::ring(
                    self.mu,
                    self.pressure_pa,
                    area,
                    r,
                    self.num_points,
                    self.facets_per_cone,
                    self.normal_force_cap_n,
                )
            }
            (Some(a), None) => {
                let r = (a / PI).sqrt();
                ContactModel::ring(
                    self.mu,
                    self.pressure_pa,
                    a,
                    r,
                    self.num_points,
                    self.facets_per_cone,
                    self.normal_force_cap_n,
                )
            }
            (None, None) => Err(ContactError::InvalidParameter(
                "cup file needs area_m2 or radius_m".into(),
            )),
        }
    }
}

pub fn parse_cup(text: &str) -> Result<ContactModel, ContactError> {
    let f: CupFile = toml::from_str(text).map_err(|e| ContactError::Parse(e.to_string()))?;
    f.into_model()
}

pub fn load_cup(path: &Path) -> Result<ContactModel, ContactError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ContactError::Io(format!("{}: {e}", path.display())))?;
    parse_cup(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_cap_and_layout() {
        let m = ContactModel::circular(0.3, 30e3, 0.0125, 6, 4, None).unwrap();
        let pa = 30e3 * PI * 0.0125f64.powi(2);
        assert!((m.normal_force_cap - pa / 2.0).abs() < 1e-12);
        for f in &m.contact_points {
            assert!((f.p.norm() - 0.0125).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ContactModel::circular(0.3, 30e3, 0.0125, 2, 4, None).is_err());
        assert!(ContactModel::circular(0.3, 30e3, 0.0125, 3, 5, None).is_err());
        assert!(ContactModel::circular(0.0, 30e3, 0.0125, 3, 4, None).is_err());
        assert!(ContactModel::circular(0.3, 30e3, 0.0125, 3, 4, Some(-1.0)).is_err());
    }

    #[test]
    fn cup_file() {
        let m = parse_cup(
            "mu = 0.3\npressure_pa = 30000.0\nradius_m = 0.0125\nnum_points = 6\nfacets_per_cone = 4\n",
        )
        .unwrap();
        assert_eq!(m.m(), 6);
        assert!(parse_cup("mu = 0.3\npressure_pa = 1.0\nnum_points = 3\n").is_err());
        assert!(parse_cup("mu = 0.3\npressure_pa = 1.0\nradius_m = 0.01\nnum_points = 3\nbogus = 1\n").is_err());
    }
}
