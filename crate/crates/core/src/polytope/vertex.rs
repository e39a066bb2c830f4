use nalgebra::DVector;
use num_rational::BigRational;

use super::dd::{DdError, DoubleDescription};
use super::field::Field;
use super::{lp, EnumOptions, HRep, PolytopeError, VRep};

/// Extreme rays of `{y | row_k . y >= 0}` as unit f64 vectors, together
/// with the indices of input rows each ray is tight on (within `tol`).
pub(crate) fn cone_rays(
    dim: usize,
    rows: &[Vec<f64>],
    order: &[usize],
    opts: &EnumOptions,
) -> Result<Vec<Vec<f64>>, DdError> {
    if opts.exact {
        let exact: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| <BigRational as Field>::from_f64(x).unwrap()).collect())
            .collect();
        run::<BigRational>(dim, &exact, order, 0.0)
    } else {
        run::<f64>(dim, rows, order, opts.tol)
    }
}

fn run<T: Field>(
    dim: usize,
    rows: &[Vec<T>],
    order: &[usize],
    tol: f64,
) -> Result<Vec<Vec<f64>>, DdError> {
    let (mut dd, used) = DoubleDescription::start(dim, rows, order, tol)?;
    for &i in order {
        if !used.contains(&i) {
            dd.add_row(rows[i].clone());
        }
        if dd.ray_count() == 0 {
            break;
        }
    }
    Ok(dd
        .rays()
        .map(|r| {
            let mut v: Vec<f64> = r.v.iter().map(Field::to_f64).collect();
            Field::normalize(&mut v);
            v
        })
        .collect())
}

/// H -> V conversion. See [`vertex_enumeration_with`].
pub fn vertex_enumeration(h: &HRep) -> Result<VRep, PolytopeError> {
    vertex_enumeration_with(h, &EnumOptions::default())
}

/// H -> V conversion by double description on the homogenized cone
/// `{(t, x) | b t - A x >= 0, t >= 0}`.
///
/// Variables that never share a row are solved as independent blocks and
/// recombined as a Cartesian product, which keeps product-structured inputs
/// (one friction cone per contact point, say) cheap.
pub fn vertex_enumeration_with(h: &HRep, opts: &EnumOptions) -> Result<VRep, PolytopeError> {
    let dim = h.dim();
    let blocks = variable_blocks(h);
    let mut parts = Vec::with_capacity(blocks.len());
    let mut not_pointed = false;
    for vars in &blocks {
        match enumerate_block(h, vars, opts) {
            Ok(p) => parts.push((vars.clone(), p)),
            Err(PolytopeError::NotPointed) => not_pointed = true,
            Err(e) => return Err(e),
        }
    }
    if not_pointed {
        // A line through the set, or an empty set hiding behind one.
        return Err(if lp::feasible_point(h).is_none() {
            PolytopeError::EmptySet
        } else {
            PolytopeError::NotPointed
        });
    }

    let mut vertices = vec![DVector::zeros(dim)];
    let mut rays = Vec::new();
    for (vars, (bv, br)) in &parts {
        let mut next = Vec::with_capacity(vertices.len() * bv.len());
        for base in &vertices {
            for local in bv {
                let mut x: DVector<f64> = base.clone();
                for (k, &j) in vars.iter().enumerate() {
                    x[j] = local[k];
                }
                next.push(x);
            }
        }
        vertices = next;
        for local in br {
            let mut r = DVector::zeros(dim);
            for (k, &j) in vars.iter().enumerate() {
                r[j] = local[k];
            }
            rays.push(r);
        }
    }

    let worst = vertices
        .iter()
        .map(|x| h.violation(x))
        .fold(f64::NEG_INFINITY, f64::max);
    if worst > 1e3 * opts.tol.max(1e-12) {
        return Err(PolytopeError::NumericalDegeneracy(format!(
            "enumerated vertex violates the input rows by {worst:.3e}"
        )));
    }
    VRep::new(vertices, rays)
}

type BlockResult = (Vec<Vec<f64>>, Vec<Vec<f64>>);

fn enumerate_block(h: &HRep, vars: &[usize], opts: &EnumOptions) -> Result<BlockResult, PolytopeError> {
    let k = vars.len();
    let local = |row: nalgebra::DVectorView<f64>| -> Vec<f64> { vars.iter().map(|&j| row[j]).collect() };
    let touches = |row: nalgebra::DVectorView<f64>| vars.iter().any(|&j| row[j] != 0.0);

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for i in 0..h.neq() {
        let c = h.c.row(i).transpose();
        if !touches(c.as_view()) {
            continue;
        }
        let a = local(c.as_view());
        let mut pos = vec![h.d[i]];
        pos.extend(a.iter().map(|v| -v));
        let neg: Vec<f64> = pos.iter().map(|v| -v).collect();
        rows.push(pos);
        rows.push(neg);
    }
    let mut t_row = vec![0.0; k + 1];
    t_row[0] = 1.0;
    rows.push(t_row);
    for i in 0..h.nrows() {
        let a = h.a.row(i).transpose();
        if !touches(a.as_view()) {
            continue;
        }
        let mut r = vec![h.b[i]];
        r.extend(local(a.as_view()).iter().map(|v| -v));
        rows.push(r);
    }
    for r in rows.iter_mut() {
        Field::normalize(r.as_mut_slice());
    }
    let order: Vec<usize> = (0..rows.len()).collect();
    let rays = cone_rays(k + 1, &rows, &order, opts).map_err(|e| match e {
        DdError::NotPointed => PolytopeError::NotPointed,
    })?;

    let mut verts = Vec::new();
    let mut dirs = Vec::new();
    for r in rays {
        let t = r[0];
        if t > opts.tol {
            verts.push(r[1..].iter().map(|x| x / t).collect());
        } else {
            let mut d = r[1..].to_vec();
            Field::normalize(d.as_mut_slice());
            dirs.push(d);
        }
    }
    if verts.is_empty() {
        return Err(PolytopeError::EmptySet);
    }
    Ok((verts, dirs))
}

/// Connected components of the "appear in a common row" relation.
fn variable_blocks(h: &HRep) -> Vec<Vec<usize>> {
    let dim = h.dim();
    let mut parent: Vec<usize> = (0..dim).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let rows = h.a.row_iter().chain(h.c.row_iter());
    for row in rows {
        let mut first = None;
        for j in 0..dim {
            if row[j] != 0.0 {
                match first {
                    None => first = Some(j),
                    Some(f) => {
                        let (ra, rb) = (find(&mut parent, f), find(&mut parent, j));
                        parent[ra] = rb;
                    }
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; dim];
    for j in 0..dim {
        let r = find(&mut parent, j);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(j);
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::rep::tests_support::cube;

    fn sorted(mut pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        for p in pts.iter_mut() {
            for x in p.iter_mut() {
                *x = (*x * 1e9).round() / 1e9;
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts
    }

    #[test]
    fn cube_vertices() {
        let v = vertex_enumeration(&cube(3)).unwrap();
        assert_eq!(v.vertices.len(), 8);
        assert!(v.rays.is_empty());
        for x in &v.vertices {
            assert!(x.iter().all(|c| (c.abs() - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn capped_friction_pyramid() {
        let mu = 0.3;
        let rows = vec![
            (vec![-1.0, -1.0, -mu], 0.0),
            (vec![-1.0, 1.0, -mu], 0.0),
            (vec![1.0, 1.0, -mu], 0.0),
            (vec![1.0, -1.0, -mu], 0.0),
            (vec![0.0, 0.0, 1.0], 1.0),
        ];
        let h = HRep::from_rows(3, &rows).unwrap();
        let v = vertex_enumeration(&h).unwrap();
        let got = sorted(v.vertices.iter().map(|x| x.iter().copied().collect()).collect());
        // |fx| + |fy| <= mu fz, fz <= 1: apex plus the four cap corners on the axes
        let want = sorted(vec![
            vec![0.0, 0.0, 0.0],
            vec![0.3, 0.0, 1.0],
            vec![-0.3, 0.0, 1.0],
            vec![0.0, 0.3, 1.0],
            vec![0.0, -0.3, 1.0],
        ]);
        assert_eq!(got, want);
    }

    #[test]
    fn infeasible_is_empty() {
        let h = HRep::from_rows(1, &[(vec![1.0], -1.0), (vec![-1.0], -1.0)]).unwrap();
        assert_eq!(vertex_enumeration(&h).unwrap_err(), PolytopeError::EmptySet);
    }

    #[test]
    fn halfplane_strip_is_not_pointed() {
        let h = HRep::from_rows(2, &[(vec![1.0, 0.0], 1.0), (vec![-1.0, 0.0], 1.0)]).unwrap();
        assert_eq!(vertex_enumeration(&h).unwrap_err(), PolytopeError::NotPointed);
    }

    #[test]
    fn unbounded_quadrant_has_rays() {
        let h = HRep::from_rows(2, &[(vec![-1.0, 0.0], 0.0), (vec![0.0, -1.0], 0.0)]).unwrap();
        let v = vertex_enumeration(&h).unwrap();
        assert_eq!(v.vertices.len(), 1);
        assert_eq!(v.rays.len(), 2);
    }

    #[test]
    fn equality_slices_cube() {
        let mut h = cube(3);
        h = HRep::with_equalities(
            h.a,
            h.b,
            nalgebra::DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]),
            DVector::from_vec(vec![0.0]),
        )
        .unwrap();
        let v = vertex_enumeration(&h).unwrap();
        // x + y + z = 0 cuts the cube in a regular hexagon
        assert_eq!(v.vertices.len(), 6);
    }

    #[test]
    fn blocks_multiply() {
        // a square times a segment, sharing no variables
        let rows = vec![
            (vec![1.0, 0.0, 0.0], 1.0),
            (vec![-1.0, 0.0, 0.0], 1.0),
            (vec![0.0, 1.0, 0.0], 1.0),
            (vec![0.0, -1.0, 0.0], 1.0),
            (vec![0.0, 0.0, 1.0], 2.0),
            (vec![0.0, 0.0, -1.0], 0.0),
        ];
        let h = HRep::from_rows(3, &rows).unwrap();
        assert_eq!(variable_blocks(&h).len(), 3);
        assert_eq!(vertex_enumeration(&h).unwrap().vertices.len(), 8);
    }

    #[test]
    fn exact_mode_agrees() {
        let opts = EnumOptions {
            exact: true,
            ..EnumOptions::default()
        };
        let h = HRep::with_equalities(
            cube(3).a,
            cube(3).b,
            nalgebra::DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]),
            DVector::from_vec(vec![0.0]),
        )
        .unwrap();
        let v = vertex_enumeration_with(&h, &opts).unwrap();
        assert_eq!(v.vertices.len(), 6);
    }
}
