//! Solution files and number formatting for CSV output.

use thiserror::Error;

use crate::graph::{cost_unchecked, EdgeLabeling, Instance, Partition};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolutionError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: edge ({i},{j}) is not in the instance")]
    UnknownEdge { line: usize, i: usize, j: usize },
    #[error("edge ({i},{j}) has no value")]
    MissingEdge { i: usize, j: usize },
    #[error("line {line}: node {node} out of range")]
    NodeOutOfRange { line: usize, node: usize },
}

/// Contents of a solution file. Labels and cost are optional so that
/// fractional labelings (only `x` lines) can be read as well.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub cost: Option<f64>,
    pub partition: Option<Partition>,
    pub x: EdgeLabeling,
}

/// Real number with 6 significant digits, `%g` style.
pub fn format_real(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_solution(inst: &Instance, x: &EdgeLabeling, partition: &Partition) -> String {
    let mut out = format!("cost {}\n", cost_unchecked(inst, &x.values));
    for (v, c) in partition.component_id.iter().enumerate() {
        out.push_str(&format!("l {v} {c}\n"));
    }
    for (e, &val) in inst.edges().iter().zip(&x.values) {
        out.push_str(&format!("x {} {} {}\n", e.i, e.j, val));
    }
    out
}

pub fn read_solution(inst: &Instance, text: &str) -> Result<Solution, SolutionError> {
    let mut cost = None;
    let mut labels: Vec<Option<usize>> = vec![None; inst.node_count()];
    let mut any_label = false;
    let mut values: Vec<Option<f64>> = vec![None; inst.edge_count()];
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| SolutionError::Malformed { line, msg: msg.to_string() };
        let fields: Vec<&str> = t.split_whitespace().collect();
        match fields.as_slice() {
            ["cost", v] => cost = Some(v.parse::<f64>().map_err(|_| bad("bad cost"))?),
            ["l", v, c] => {
                let v: usize = v.parse().map_err(|_| bad("bad node id"))?;
                let c: usize = c.parse().map_err(|_| bad("bad component id"))?;
                if v >= inst.node_count() {
                    return Err(SolutionError::NodeOutOfRange { line, node: v });
                }
                labels[v] = Some(c);
                any_label = true;
            }
            ["x", i, j, v] => {
                let i: usize = i.parse().map_err(|_| bad("bad node id"))?;
                let j: usize = j.parse().map_err(|_| bad("bad node id"))?;
                let v: f64 = v.parse().map_err(|_| bad("bad edge value"))?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(bad("edge value outside [0,1]"));
                }
                let k = inst.edge_index(i, j).ok_or(SolutionError::UnknownEdge { line, i, j })?;
                if values[k].replace(v).is_some() {
                    return Err(bad("edge listed twice"));
                }
            }
            _ => return Err(bad("unrecognized line")),
        }
    }
    let mut x = Vec::with_capacity(values.len());
    for (k, v) in values.into_iter().enumerate() {
        let e = inst.edge(k);
        x.push(v.ok_or(SolutionError::MissingEdge { i: e.i, j: e.j })?);
    }
    let partition = if any_label {
        let ids: Option<Vec<usize>> = labels.into_iter().collect();
        let ids = ids.ok_or(SolutionError::Malformed { line: 0, msg: "labels missing for some nodes".into() })?;
        Some(Partition::from_labels(&ids))
    } else {
        None
    };
    Ok(Solution { cost, partition, x: EdgeLabeling::new(x) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::t1;

    #[test]
    fn significant_digits() {
        assert_eq!(format_real(0.0), "0");
        assert_eq!(format_real(1.0), "1");
        assert_eq!(format_real(-2.5), "-2.5");
        assert_eq!(format_real(1.0 / 3.0), "0.333333");
        assert_eq!(format_real(123456.7), "123457");
        assert_eq!(format_real(1234567.0), "1.23457e+06");
        assert_eq!(format_real(0.0001234567), "0.000123457");
        assert_eq!(format_real(0.00001234567), "1.23457e-05");
        assert_eq!(format_real(999999.6), "1e+06");
        assert_eq!(format_real(f64::INFINITY), "inf");
    }

    #[test]
    fn solution_round_trip() {
        let t = t1();
        let x = EdgeLabeling::new(vec![1.0, 0.0, 1.0]);
        let p = Partition::from_labels(&[0, 1, 1]);
        let text = write_solution(&t, &x, &p);
        assert_eq!(text, "cost 1\nl 0 0\nl 1 1\nl 2 1\nx 0 1 1\nx 1 2 0\nx 0 2 1\n");
        let s = read_solution(&t, &text).unwrap();
        assert_eq!(s.x, x);
        assert_eq!(s.partition, Some(p));
        assert_eq!(s.cost, Some(1.0));
    }

    #[test]
    fn malformed_solutions() {
        let t = t1();
        assert!(matches!(read_solution(&t, "x 0 1 1\n"), Err(SolutionError::MissingEdge { .. })));
        assert!(matches!(read_solution(&t, "y 1\n"), Err(SolutionError::Malformed { line: 1, .. })));
        assert!(matches!(read_solution(&t, "x 0 3 1\n"), Err(SolutionError::UnknownEdge { .. })));
        let frac = read_solution(&t, "x 0 1 0.5\nx 1 2 0.25\nx 0 2 1\n").unwrap();
        assert_eq!(frac.x.values, vec![0.5, 0.25, 1.0]);
        assert_eq!(frac.partition, None);
    }
}
