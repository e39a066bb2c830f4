//! Plain-text matrix format.
//!
//! ```text
//! # comment
//! key: value
//! hrep <rows> <dim>
//! a_11 .. a_1d b_1
//! eq <rows>
//! c_11 .. c_1d d_1
//! vrep <nverts> <nrays> <dim>
//! u_11 .. u_1d
//! ```
//!
//! Numbers are written with 17 significant digits, which round-trips every
//! f64 exactly.

use nalgebra::{DMatrix, DVector};

use super::{HRep, PolytopeError, VRep};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_row(out: &mut String, vals: impl Iterator<Item = f64>) {
    let parts: Vec<String> = vals.map(fmt_f64).collect();
    out.push_str(&parts.join(" "));
    out.push('\n');
}

pub fn write_hrep(out: &mut String, h: &HRep) {
    out.push_str(&format!("hrep {} {}\n", h.nrows(), h.dim()));
    for i in 0..h.nrows() {
        write_row(out, h.a.row(i).iter().copied().chain([h.b[i]]));
    }
    if h.neq() > 0 {
        out.push_str(&format!("eq {}\n", h.neq()));
        for i in 0..h.neq() {
            write_row(out, h.c.row(i).iter().copied().chain([h.d[i]]));
        }
    }
}

pub fn write_vrep(out: &mut String, v: &VRep) {
    out.push_str(&format!(
        "vrep {} {} {}\n",
        v.vertices.len(),
        v.rays.len(),
        v.dim()
    ));
    for x in v.vertices.iter().chain(&v.rays) {
        write_row(out, x.iter().copied());
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    H(HRep),
    V(VRep),
}

/// Parsed file: `key: value` metadata lines plus representation blocks in
/// file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Document {
    pub meta: Vec<(String, String)>,
    pub blocks: Vec<Block>,
}

impl Document {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn hrep(&self) -> Option<&HRep> {
        self.blocks.iter().find_map(|b| match b {
            Block::H(h) => Some(h),
            _ => None,
        })
    }

    pub fn vrep(&self) -> Option<&VRep> {
        self.blocks.iter().find_map(|b| match b {
            Block::V(v) => Some(v),
            _ => None,
        })
    }
}

struct Lines<'a> {
    it: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<&'a str> {
        for (i, raw) in self.it.by_ref() {
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            self.line = i + 1;
            return Some(t);
        }
        None
    }

    fn err(&self, msg: impl Into<String>) -> PolytopeError {
        PolytopeError::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn numbers(&mut self, want: usize) -> Result<Vec<f64>, PolytopeError> {
        let t = self.next().ok_or_else(|| self.err("unexpected end of file"))?;
        let vals: Result<Vec<f64>, _> = t.split_whitespace().map(str::parse::<f64>).collect();
        let vals = vals.map_err(|e| self.err(format!("bad number: {e}")))?;
        if vals.len() != want {
            return Err(self.err(format!("expected {want} values, found {}", vals.len())));
        }
        Ok(vals)
    }
}

fn header_ints(l: &Lines, parts: &[&str], n: usize) -> Result<Vec<usize>, PolytopeError> {
    if parts.len() != n + 1 {
        return Err(l.err(format!("`{}` header needs {n} integers", parts[0])));
    }
    parts[1..]
        .iter()
        .map(|p| p.parse::<usize>().map_err(|e| l.err(format!("bad count: {e}"))))
        .collect()
}

pub fn parse_document(text: &str) -> Result<Document, PolytopeError> {
    let mut l = Lines {
        it: text.lines().enumerate(),
        line: 0,
    };
    let mut doc = Document::default();
    let mut pending: Option<&str> = None;
    loop {
        let Some(t) = pending.take().or_else(|| l.next()) else {
            break;
        };
        let parts: Vec<&str> = t.split_whitespace().collect();
        match parts[0] {
            "hrep" => {
                let n = header_ints(&l, &parts, 2)?;
                let (rows, dim) = (n[0], n[1]);
                let mut a = DMatrix::zeros(rows, dim);
                let mut b = DVector::zeros(rows);
                for i in 0..rows {
                    let v = l.numbers(dim + 1)?;
                    for j in 0..dim {
                        a[(i, j)] = v[j];
                    }
                    b[i] = v[dim];
                }
                let mut c = DMatrix::zeros(0, dim);
                let mut d = DVector::zeros(0);
                if let Some(next) = l.next() {
                    let p: Vec<&str> = next.split_whitespace().collect();
                    if p[0] == "eq" {
                        let m = header_ints(&l, &p, 1)?[0];
                        c = DMatrix::zeros(m, dim);
                        d = DVector::zeros(m);
                        for i in 0..m {
                            let v = l.numbers(dim + 1)?;
                            for j in 0..dim {
                                c[(i, j)] = v[j];
                            }
                            d[i] = v[dim];
                        }
                    } else {
                        pending = Some(next);
                    }
                }
                let h = HRep::with_equalities(a, b, c, d)
                    .map_err(|e| l.err(format!("invalid rows: {e}")))?;
                doc.blocks.push(Block::H(h));
            }
            "vrep" => {
                let n = header_ints(&l, &parts, 3)?;
                let (nv, nr, dim) = (n[0], n[1], n[2]);
                let mut verts = Vec::with_capacity(nv);
                let mut rays = Vec::with_capacity(nr);
                for k in 0..nv + nr {
                    let v = DVector::from_vec(l.numbers(dim)?);
                    if k < nv {
                        verts.push(v);
                    } else {
                        rays.push(v);
                    }
                }
                let v = VRep::new(verts, rays).map_err(|e| l.err(format!("invalid generators: {e}")))?;
                doc.blocks.push(Block::V(v));
            }
            _ => match t.split_once(':') {
                Some((k, v)) => doc.meta.push((k.trim().to_string(), v.trim().to_string())),
                None => return Err(l.err(format!("unrecognized line `{t}`"))),
            },
        }
    }
    Ok(doc)
}
