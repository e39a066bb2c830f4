use std::path::Path;

use nalgebra::{DMatrix, DVector, Vector3, Vector6};

use super::friction::{linearize_friction_cone, suction_force, wrench_transform};
use super::model::{ContactModel, LocalFrame};
use super::ContactError;
use crate::polytope::format;
use crate::polytope::{
    convex_hull_with, pulling_simplex_counts, vertex_enumeration_with, EnumOptions, HRep,
    PolytopeError, VRep,
};

/// Axis order of every wrench in this crate: torque about the frame
/// origin first, then force.
pub const WRENCH_UNITS: &str = "Nm,Nm,Nm,N,N,N";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeKind {
    Exact,
    Approximate,
}

impl ConeKind {
    fn as_str(self) -> &'static str {
        match self {
            ConeKind::Exact => "exact",
            ConeKind::Approximate => "approximate",
        }
    }
}

/// Grasp stability constraint `F w <= g` on torque-first wrenches in {c}.
#[derive(Debug, Clone)]
pub struct WrenchCone {
    /// Irredundant rows (unit norm); equality rows when the wrench set is flat.
    pub h: HRep,
    pub kind: ConeKind,
    /// Extreme wrenches of the set.
    pub vertices: Option<VRep>,
    /// Per-row number of boundary simplices in a pulling triangulation.
    /// Empty when not computed.
    pub simplex_counts: Vec<usize>,
}

impl WrenchCone {
    pub fn f(&self) -> &DMatrix<f64> {
        &self.h.a
    }

    pub fn g(&self) -> &DVector<f64> {
        &self.h.b
    }

    pub fn nrows(&self) -> usize {
        self.h.nrows()
    }

    /// Row count of the triangulated boundary (the count reported by hull
    /// codes that emit one row per simplex).
    pub fn simplicial_rows(&self) -> usize {
        if self.simplex_counts.is_empty() {
            self.nrows()
        } else {
            self.simplex_counts.iter().sum()
        }
    }

    /// The same set written with one row per boundary simplex.
    pub fn simplicial_hrep(&self) -> HRep {
        if self.simplex_counts.is_empty() {
            self.h.clone()
        } else {
            self.h.repeat_rows(&self.simplex_counts)
        }
    }

    /// All constraints as inequalities, equalities split into two rows.
    pub fn inequalities(&self) -> (DMatrix<f64>, DVector<f64>) {
        stack_inequalities(&self.h)
    }

    pub fn violation(&self, w: &Vector6<f64>) -> f64 {
        self.h.violation(&DVector::from_column_slice(w.as_slice()))
    }

    pub fn contains(&self, w: &Vector6<f64>, tol: f64) -> bool {
        self.h.contains(&DVector::from_column_slice(w.as_slice()), tol)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("# suction cup grasp wrench set in frame {c}\n");
        s.push_str(&format!("kind: {}\n", self.kind.as_str()));
        s.push_str(&format!("units: {WRENCH_UNITS}\n"));
        s.push_str(&format!("simplicial_rows: {}\n", self.simplicial_rows()));
        if !self.simplex_counts.is_empty() {
            let c: Vec<String> = self.simplex_counts.iter().map(|c| c.to_string()).collect();
            s.push_str(&format!("simplex_counts: {}\n", c.join(" ")));
        }
        format::write_hrep(&mut s, &self.h);
        if let Some(v) = &self.vertices {
            format::write_vrep(&mut s, v);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, ContactError> {
        let doc = format::parse_document(text)?;
        let kind = match doc.meta("kind") {
            Some("exact") => ConeKind::Exact,
            Some("approximate") => ConeKind::Approximate,
            other => {
                return Err(ContactError::Parse(format!("unknown cone kind {other:?}")));
            }
        };
        if let Some(u) = doc.meta("units") {
            if u.replace(' ', "") != WRENCH_UNITS {
                return Err(ContactError::Parse(format!(
                    "unsupported axis order `{u}`, expected {WRENCH_UNITS}"
                )));
            }
        }
        let h = doc
            .hrep()
            .cloned()
            .ok_or_else(|| ContactError::Parse("cone file has no hrep block".into()))?;
        if h.dim() != 6 {
            return Err(ContactError::Parse(format!("cone dimension {} != 6", h.dim())));
        }
        let simplex_counts = match doc.meta("simplex_counts") {
            Some(s) => s
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ContactError::Parse(format!("simplex_counts: {e}")))?,
            None => Vec::new(),
        };
        if !simplex_counts.is_empty() && simplex_counts.len() != h.nrows() {
            return Err(ContactError::Parse("simplex_counts length differs from row count".into()));
        }
        Ok(WrenchCone {
            h,
            kind,
            vertices: doc.vrep().cloned(),
            simplex_counts,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), ContactError> {
        std::fs::write(path, self.to_text())
            .map_err(|e| ContactError::Io(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self, ContactError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ContactError::Io(format!("{}: {e}", path.display())))?;
        Self::from_text(&text)
    }
}

pub(crate) fn stack_inequalities(h: &HRep) -> (DMatrix<f64>, DVector<f64>) {
    let (n, e, d) = (h.nrows(), h.neq(), h.dim());
    let mut a = DMatrix::zeros(n + 2 * e, d);
    let mut b = DVector::zeros(n + 2 * e);
    a.rows_mut(0, n).copy_from(&h.a);
    b.rows_mut(0, n).copy_from(&h.b);
    for i in 0..e {
        a.set_row(n + 2 * i, &h.c.row(i));
        b[n + 2 * i] = h.d[i];
        a.set_row(n + 2 * i + 1, &(-h.c.row(i)));
        b[n + 2 * i + 1] = -h.d[i];
    }
    (a, b)
}

/// Construction settings for [`exact_wrench_cone`].
#[derive(Debug, Clone, Copy)]
pub struct ConeOptions {
    /// Refuse to return more facets than this.
    pub max_facets: usize,
    /// Refuse to enumerate more stacked-force vertices than this.
    pub max_force_vertices: usize,
    /// Compute the pulling-triangulation simplex counts.
    pub triangulate: bool,
    pub enumeration: EnumOptions,
}

impl Default for ConeOptions {
    fn default() -> Self {
        ConeOptions {
            max_facets: 500_000,
            max_force_vertices: 2_000_000,
            triangulate: true,
            enumeration: EnumOptions::default(),
        }
    }
}

pub fn exact_wrench_cone(model: &ContactModel) -> Result<WrenchCone, ContactError> {
    exact_wrench_cone_with(model, &ConeOptions::default())
}

pub fn exact_wrench_cone_with(model: &ContactModel, opts: &ConeOptions) -> Result<WrenchCone, ContactError> {
    model.validate()?;
    let offset = suction_wrench(model);
    wrench_cone_from_contacts(
        &model.contact_points,
        model.mu,
        model.facets_per_cone,
        model.normal_force_cap,
        &offset,
        opts,
    )
}

/// The four-step construction for arbitrary contact frames (no minimum
/// point count): stacked force polytope, its vertices, their wrenches
/// under the contact map plus the fixed `offset` wrench, and the hull.
pub fn wrench_cone_from_contacts(
    contacts: &[LocalFrame],
    mu: f64,
    k: usize,
    cap: f64,
    offset: &Vector6<f64>,
    opts: &ConeOptions,
) -> Result<WrenchCone, ContactError> {
    let m = contacts.len();
    if m == 0 {
        return Err(ContactError::InvalidParameter("no contact points".into()));
    }
    let expected = ((k + 1) as f64).powi(m as i32);
    if expected > opts.max_force_vertices as f64 {
        return Err(ContactError::ScaleError(format!(
            "stacked force set would have about {expected:.0} vertices (limit {})",
            opts.max_force_vertices
        )));
    }

    let fhat = stacked_force_set(m, mu, k, cap)?;
    let verts = vertex_enumeration_with(&fhat, &opts.enumeration).map_err(|e| match e {
        PolytopeError::EmptySet => ContactError::EmptySet,
        e => ContactError::Polytope(e),
    })?;
    if !verts.rays.is_empty() {
        return Err(ContactError::InvalidParameter("stacked force set is unbounded".into()));
    }

    let maps: Vec<_> = contacts
        .iter()
        .map(|c| wrench_transform(&c.p, &c.r))
        .collect::<Result<_, _>>()?;
    let wrenches: Vec<DVector<f64>> = verts
        .vertices
        .iter()
        .map(|f| {
            let mut w = *offset;
            for (i, g) in maps.iter().enumerate() {
                w += g * Vector3::new(f[3 * i], f[3 * i + 1], f[3 * i + 2]);
            }
            DVector::from_column_slice(w.as_slice())
        })
        .collect();

    let hull = convex_hull_with(&wrenches, &opts.enumeration)?;
    if hull.h.nrows() > opts.max_facets {
        return Err(ContactError::ScaleError(format!(
            "{} facets exceed the ceiling of {}",
            hull.h.nrows(),
            opts.max_facets
        )));
    }
    let simplex_counts = if opts.triangulate {
        pulling_simplex_counts(&hull)
    } else {
        Vec::new()
    };
    let vertices = VRep::from_points(
        &hull.vertices.iter().map(|&i| wrenches[i].clone()).collect::<Vec<_>>(),
    )?;
    Ok(WrenchCone {
        h: hull.h,
        kind: ConeKind::Exact,
        vertices: Some(vertices),
        simplex_counts,
    })
}

/// H-representation of the stacked contact forces `(f_1, .., f_m)` in
/// their local frames: linearized friction plus the normal force cap.
pub fn stacked_force_set(m: usize, mu: f64, k: usize, cap: f64) -> Result<HRep, ContactError> {
    let cone = linearize_friction_cone(mu, k)?;
    let per = k + 1;
    let mut a = DMatrix::zeros(m * per, 3 * m);
    let mut b = DVector::zeros(m * per);
    for i in 0..m {
        for j in 0..k {
            for c in 0..3 {
                a[(i * per + j, 3 * i + c)] = cone.a[(j, c)];
            }
        }
        a[(i * per + k, 3 * i + 2)] = 1.0;
        b[i * per + k] = cap;
    }
    Ok(HRep::new(a, b)?)
}

/// Net wrench of individual contact forces (local frames) plus the offset.
pub fn contact_wrench(
    contacts: &[LocalFrame],
    forces: &[Vector3<f64>],
    offset: &Vector6<f64>,
) -> Result<Vector6<f64>, ContactError> {
    let mut w = *offset;
    for (c, f) in contacts.iter().zip(forces) {
        w += wrench_transform(&c.p, &c.r)? * f;
    }
    Ok(w)
}

/// Wrench of the suction force about the origin of {c}.
pub fn suction_wrench(model: &ContactModel) -> Vector6<f64> {
    let s: Vector3<f64> = model.suction_frame.r * suction_force(model);
    let mut w = Vector6::zeros();
    w.fixed_rows_mut::<3>(0).copy_from(&model.suction_frame.p.cross(&s));
    w.fixed_rows_mut::<3>(3).copy_from(&s);
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use minilp::{ComparisonOp, OptimizationDirection, Problem};

    fn small_model() -> ContactModel {
        ContactModel::circular(0.3, 30e3, 0.0125, 3, 4, Some(20.0)).unwrap()
    }

    /// Oracle: is `w` reachable as offset + sum of G_i f_i with each f_i
    /// in its capped friction pyramid? Decided by an LP over the forces.
    fn decomposable(model: &ContactModel, w: &Vector6<f64>) -> bool {
        let mut p = Problem::new(OptimizationDirection::Minimize);
        let m = model.m();
        let vars: Vec<_> = (0..3 * m)
            .map(|_| p.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
            .collect();
        let mu = model.mu;
        for i in 0..m {
            let (x, y, z) = (vars[3 * i], vars[3 * i + 1], vars[3 * i + 2]);
            for (sx, sy) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                p.add_constraint(&[(x, sx), (y, sy), (z, -mu)], ComparisonOp::Le, 0.0);
            }
            p.add_constraint(&[(z, 1.0)], ComparisonOp::Le, model.normal_force_cap);
        }
        let off = suction_wrench(model);
        for row in 0..6 {
            let mut expr = Vec::new();
            for (i, c) in model.contact_points.iter().enumerate() {
                let g = wrench_transform(&c.p, &c.r).unwrap();
                for col in 0..3 {
                    if g[(row, col)] != 0.0 {
                        expr.push((vars[3 * i + col], g[(row, col)]));
                    }
                }
            }
            p.add_constraint(expr, ComparisonOp::Eq, w[row] - off[row]);
        }
        p.solve().is_ok()
    }

    #[test]
    fn pure_pull_is_inside_and_full_suction_on_boundary() {
        let model = small_model();
        let cone = exact_wrench_cone(&model).unwrap();
        let pa = suction_force(&model).z;
        let half = Vector6::new(0.0, 0.0, 0.0, 0.0, 0.0, -0.5 * pa);
        assert!(cone.violation(&half) < -1e-3);
        // with zero contact force the net wrench is exactly the suction pull,
        // which is a vertex of the set
        let full = Vector6::new(0.0, 0.0, 0.0, 0.0, 0.0, -pa);
        assert!(cone.violation(&full).abs() < 1e-9);
    }

    #[test]
    fn tangential_force_against_lp_oracle() {
        let model = small_model();
        let cone = exact_wrench_cone(&model).unwrap();
        let pa = suction_force(&model).z;
        let capacity = model.m() as f64 * model.normal_force_cap;
        let t = 0.5 * model.mu * capacity;
        // contacts pressing at their cap leave a normal surplus of capacity - PA
        let inside = Vector6::new(0.0, 0.0, 0.0, t, 0.0, capacity - pa);
        assert!(decomposable(&model, &inside));
        assert!(cone.contains(&inside, 1e-8));
        // twice the tangential load with zero normal surplus
        let outside = Vector6::new(0.0, 0.0, 0.0, 2.0 * t, 0.0, 0.0);
        assert!(!decomposable(&model, &outside));
        assert!(!cone.contains(&outside, 1e-8));
    }

    #[test]
    fn random_wrenches_agree_with_oracle() {
        use rand::{Rng, SeedableRng};
        let model = small_model();
        let cone = exact_wrench_cone(&model).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut disagreements = 0;
        for _ in 0..200 {
            let w = Vector6::new(
                rng.gen_range(-0.3..0.3),
                rng.gen_range(-0.3..0.3),
                rng.gen_range(-0.2..0.2),
                rng.gen_range(-15.0..15.0),
                rng.gen_range(-15.0..15.0),
                rng.gen_range(-20.0..50.0),
            );
            let margin = cone.violation(&w);
            if margin.abs() < 1e-6 {
                continue;
            }
            if (margin < 0.0) != decomposable(&model, &w) {
                disagreements += 1;
            }
        }
        assert_eq!(disagreements, 0);
    }

    #[test]
    fn six_point_cone_agrees_with_oracle() {
        // highly degenerate hull input (symmetric ring, 15625 force vertices)
        use rand::{Rng, SeedableRng};
        let model = ContactModel::circular(0.3, 30e3, 0.0125, 6, 4, None).unwrap();
        let cone = exact_wrench_cone(&model).unwrap();
        let verts = &cone.vertices.as_ref().unwrap().vertices;
        for v in verts {
            assert!(cone.violation(&Vector6::from_column_slice(v.as_slice())) < 1e-9);
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let mut checked = 0;
        for _ in 0..100 {
            let a = &verts[rng.gen_range(0..verts.len())];
            let b = &verts[rng.gen_range(0..verts.len())];
            let t = rng.gen_range(0.0..1.0);
            let mut w = Vector6::from_column_slice((a * t + b * (1.0 - t)).as_slice());
            for i in 0..6 {
                w[i] += rng.gen_range(-1.0..1.0) * if i < 3 { 0.01 } else { 0.5 };
            }
            let margin = cone.violation(&w);
            if margin.abs() < 1e-6 {
                continue;
            }
            checked += 1;
            assert_eq!(margin < 0.0, decomposable(&model, &w), "{w:?}");
        }
        assert!(checked > 80);
    }

    #[test]
    fn single_point_is_a_shifted_friction_cone() {
        let (mu, cap, pull) = (0.3, 5.0, 2.0);
        let contacts = [LocalFrame::identity()];
        let offset = Vector6::new(0.0, 0.0, 0.0, 0.0, 0.0, -pull);
        let cone =
            wrench_cone_from_contacts(&contacts, mu, 4, cap, &offset, &ConeOptions::default()).unwrap();
        // torque pinned to zero
        assert_eq!(cone.h.neq(), 3);
        let pyramid = stacked_force_set(1, mu, 4, cap).unwrap();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let f = DVector::from_vec(vec![
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-1.0..6.0),
            ]);
            let w = Vector6::new(0.0, 0.0, 0.0, f[0], f[1], f[2] - pull);
            let m1 = pyramid.violation(&f);
            if m1.abs() < 1e-9 {
                continue;
            }
            assert_eq!(m1 < 0.0, cone.contains(&w, 1e-12));
        }
    }

    #[test]
    fn text_round_trip() {
        let cone = exact_wrench_cone(&small_model()).unwrap();
        let back = WrenchCone::from_text(&cone.to_text()).unwrap();
        assert_eq!(back.h, cone.h);
        assert_eq!(back.simplex_counts, cone.simplex_counts);
        assert_eq!(back.kind, ConeKind::Exact);
        assert!(cone.to_text().contains("units: Nm,Nm,Nm,N,N,N"));
    }

    #[test]
    fn permuting_contacts_keeps_the_set() {
        let model = small_model();
        let mut perm = model.clone();
        perm.contact_points.reverse();
        let a = exact_wrench_cone(&model).unwrap();
        let b = exact_wrench_cone(&perm).unwrap();
        assert_eq!(a.nrows(), b.nrows());
        for v in &b.vertices.as_ref().unwrap().vertices {
            assert!(a.h.contains(v, 1e-9));
        }
        for v in &a.vertices.as_ref().unwrap().vertices {
            assert!(b.h.contains(v, 1e-9));
        }
    }

    #[test]
    fn scale_ceiling() {
        let opts = ConeOptions {
            max_facets: 10,
            ..Default::default()
        };
        let err = exact_wrench_cone_with(&small_model(), &opts).unwrap_err();
        assert!(matches!(err, ContactError::ScaleError(_)));
    }
}
