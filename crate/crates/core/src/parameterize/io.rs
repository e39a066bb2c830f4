use std::fmt::Write as _;

use super::trajectory::Trajectory;
use super::ParamError;
use crate::polytope::format::fmt_f64;

/// Waypoints, one per line, whitespace separated, with a `# dof: n` header.
pub fn parse_path_file(text: &str) -> Result<Vec<Vec<f64>>, ParamError> {
    let mut dof: Option<usize> = None;
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(v) = rest.trim().strip_prefix("dof:") {
                let n = v.trim().parse().map_err(|_| ParamError::Parse {
                    line: ln + 1,
                    msg: format!("bad dof header {:?}", v.trim()),
                })?;
                dof = Some(n);
            }
            continue;
        }
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>().map_err(|_| ParamError::Parse {
                    line: ln + 1,
                    msg: format!("bad number {t:?}"),
                })
            })
            .collect::<Result<_, _>>()?;
        let n = dof.ok_or_else(|| ParamError::Parse {
            line: ln + 1,
            msg: "missing `# dof: n` header".into(),
        })?;
        if row.len() != n {
            return Err(ParamError::Parse {
                line: ln + 1,
                msg: format!("expected {n} values, got {}", row.len()),
            });
        }
        out.push(row);
    }
    if out.is_empty() {
        return Err(ParamError::Parse {
            line: 0,
            msg: "no waypoints".into(),
        });
    }
    Ok(out)
}

pub fn write_path_file(waypoints: &[Vec<f64>]) -> String {
    let dof = waypoints.first().map_or(0, Vec::len);
    let mut s = format!("# dof: {dof}\n");
    for w in waypoints {
        let cells: Vec<String> = w.iter().map(|v| fmt_f64(*v)).collect();
        s.push_str(&cells.join(" "));
        s.push('\n');
    }
    s
}

pub fn trajectory_header(dof: usize) -> String {
    let mut h = vec!["t".to_string()];
    for prefix in ["q", "qd", "qdd"] {
        for j in 1..=dof {
            h.push(format!("{prefix}{j}"));
        }
    }
    h.join(",")
}

pub fn write_trajectory_csv(traj: &Trajectory) -> String {
    let mut s = trajectory_header(traj.dof());
    s.push('\n');
    for k in 0..traj.len() {
        s.push_str(&fmt_f64(traj.t[k]));
        for v in traj.q[k].iter().chain(&traj.qd[k]).chain(&traj.qdd[k]) {
            let _ = write!(s, ",{}", fmt_f64(*v));
        }
        s.push('\n');
    }
    s
}

pub fn parse_trajectory_csv(text: &str) -> Result<Trajectory, ParamError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| ParamError::Parse {
        line: 0,
        msg: "empty trajectory file".into(),
    })?;
    let cols = header.split(',').count();
    if cols < 4 || (cols - 1) % 3 != 0 {
        return Err(ParamError::Parse {
            line: 1,
            msg: format!("unexpected column count {cols}"),
        });
    }
    let dof = (cols - 1) / 3;
    if header.trim() != trajectory_header(dof) {
        return Err(ParamError::Parse {
            line: 1,
            msg: "header must be t,q1..qn,qd1..qdn,qdd1..qddn".into(),
        });
    }
    let mut tr = Trajectory {
        t: Vec::new(),
        q: Vec::new(),
        qd: Vec::new(),
        qdd: Vec::new(),
    };
    for (ln, line) in lines {
        let vals: Vec<f64> = line
            .split(',')
            .map(|c| {
                c.trim().parse::<f64>().map_err(|_| ParamError::Parse {
                    line: ln + 1,
                    msg: format!("bad number {c:?}"),
                })
            })
            .collect::<Result<_, _>>()?;
        if vals.len() != cols {
            return Err(ParamError::Parse {
                line: ln + 1,
                msg: format!("expected {cols} columns, got {}", vals.len()),
            });
        }
        tr.t.push(vals[0]);
        tr.q.push(vals[1..1 + dof].to_vec());
        tr.qd.push(vals[1 + dof..1 + 2 * dof].to_vec());
        tr.qdd.push(vals[1 + 2 * dof..].to_vec());
    }
    Ok(tr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_file_round_trip() {
        let w = vec![vec![0.1, -0.2], vec![1.0 / 3.0, 2.0]];
        assert_eq!(parse_path_file(&write_path_file(&w)).unwrap(), w);
        assert!(parse_path_file("0.1 0.2\n").is_err());
        assert!(parse_path_file("# dof: 2\n0.1\n").is_err());
    }

    #[test]
    fn csv_round_trip() {
        let tr = Trajectory {
            t: vec![0.0, 0.1],
            q: vec![vec![1.0 / 7.0, 2.0], vec![3.0, 4.0]],
            qd: vec![vec![0.5, 0.25], vec![1e-300, -2.0]],
            qdd: vec![vec![std::f64::consts::PI, 0.0], vec![1.0, 1.0]],
        };
        let text = write_trajectory_csv(&tr);
        assert!(text.starts_with("t,q1,q2,qd1,qd2,qdd1,qdd2\n"));
        assert_eq!(parse_trajectory_csv(&text).unwrap(), tr);
        assert!(parse_trajectory_csv("t,q1\n").is_err());
    }
}
