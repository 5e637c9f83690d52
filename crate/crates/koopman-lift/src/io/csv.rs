//! CSV serialization of trajectories and numeric matrices, plus the
//! observable-order file format used to reorder models.
//!
//! All files use LF line endings and 17-significant-digit reals, so a
//! written file re-reads to bit-identical values and identical runs
//! produce byte-identical output.

use ndarray::Array2;
use thiserror::Error;

use super::format::fmt_g17;
use crate::poly::Monomial;
use crate::sim::Trajectory;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CsvError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("trajectory file has no data rows")]
    Empty,
    #[error("{got} channel names for dimension {expected}")]
    NameCount { expected: usize, got: usize },
}

fn malformed(line: usize, message: impl Into<String>) -> CsvError {
    CsvError::Malformed {
        line,
        message: message.into(),
    }
}

/// Render a trajectory with a `t` column and one named column per
/// coordinate.
pub fn write_trajectory(traj: &Trajectory, names: &[String]) -> Result<String, CsvError> {
    if names.len() != traj.dim() {
        return Err(CsvError::NameCount {
            expected: traj.dim(),
            got: names.len(),
        });
    }
    let mut out = String::with_capacity(traj.len() * (names.len() + 1) * 20);
    out.push('t');
    for name in names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (k, sample) in traj.samples().iter().enumerate() {
        out.push_str(&fmt_g17(traj.time(k)));
        for v in sample {
            out.push(',');
            out.push_str(&fmt_g17(*v));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Channel names, time grid, and one value row per sample.
pub type SampleTable = (Vec<String>, Vec<f64>, Vec<Vec<f64>>);

/// Parse a CSV with a leading `t` column into channel names, the time
/// grid, and one value row per sample. No uniformity is required, so
/// this also reads externally produced input-signal files.
pub fn read_samples(text: &str) -> Result<SampleTable, CsvError> {
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(CsvError::Empty);
    };
    let mut columns = header.split(',');
    if columns.next() != Some("t") {
        return Err(malformed(1, "header must start with a `t` column"));
    }
    let names: Vec<String> = columns.map(str::to_string).collect();

    let mut times = Vec::new();
    let mut samples = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let t_field = fields.next().expect("split yields at least one field");
        let t: f64 = t_field
            .parse()
            .map_err(|_| malformed(idx + 1, format!("bad time value {t_field:?}")))?;
        let row: Vec<f64> = fields
            .map(|f| {
                f.parse()
                    .map_err(|_| malformed(idx + 1, format!("bad value {f:?}")))
            })
            .collect::<Result<_, _>>()?;
        if row.len() != names.len() {
            return Err(malformed(
                idx + 1,
                format!("{} values, header names {}", row.len(), names.len()),
            ));
        }
        times.push(t);
        samples.push(row);
    }
    if samples.is_empty() {
        return Err(CsvError::Empty);
    }
    Ok((names, times, samples))
}

/// Parse a trajectory CSV back into names and data. The step is taken
/// from the first two `t` values (zero for single-sample files).
pub fn read_trajectory(text: &str) -> Result<(Vec<String>, Trajectory), CsvError> {
    let (names, times, samples) = read_samples(text)?;
    let t0 = times[0];
    let h = if times.len() > 1 {
        times[1] - times[0]
    } else {
        0.0
    };
    Ok((names, Trajectory::new(t0, h, samples)))
}

/// Plain comma-separated matrix, one row per line.
pub fn write_matrix(m: &Array2<f64>) -> String {
    let mut out = String::new();
    for row in m.rows() {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            first = false;
            out.push_str(&fmt_g17(*v));
        }
        out.push('\n');
    }
    out
}

/// Parse an observable-order file: one observable per line as a full
/// exponent vector over the `n_x` states, separated by spaces or commas.
/// Blank lines and `#` comments are skipped.
pub fn parse_order(text: &str, n_x: usize) -> Result<Vec<Monomial>, CsvError> {
    let mut order = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let exps: Vec<u32> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|_| malformed(idx + 1, format!("bad exponent {s:?}")))
            })
            .collect::<Result<_, _>>()?;
        if exps.len() != n_x {
            return Err(malformed(
                idx + 1,
                format!("{} exponents, system has {} states", exps.len(), n_x),
            ));
        }
        order.push(Monomial::from_exponents(exps));
    }
    Ok(order)
}

/// Render an observable list in the order-file format, one exponent
/// vector per line with the observable spelled out as a comment.
pub fn write_order(observables: &[Monomial]) -> String {
    let mut out = String::new();
    for m in observables {
        let exps: Vec<String> = m.exponents().iter().map(u32::to_string).collect();
        out.push_str(&exps.join(" "));
        out.push_str("  # ");
        out.push_str(&m.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn m(exps: &[u32]) -> Monomial {
        Monomial::from_exponents(exps.to_vec())
    }

    #[test]
    fn trajectory_writes_header_and_rows() {
        let traj = Trajectory::new(0.0, 0.5, vec![vec![1.0, 2.0], vec![3.0, 4.5]]);
        let csv = write_trajectory(&traj, &["x1".into(), "x2".into()]).unwrap();
        assert_eq!(csv, "t,x1,x2\n0,1,2\n0.5,3,4.5\n");
    }

    #[test]
    fn trajectory_round_trips_bit_exactly() {
        let samples: Vec<Vec<f64>> = (0..50)
            .map(|k| {
                vec![
                    (k as f64 * 0.1).sin(),
                    (k as f64).exp() / 1e6,
                    -0.1 * k as f64,
                ]
            })
            .collect();
        let traj = Trajectory::new(0.0, 1e-3, samples);
        let names = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let csv = write_trajectory(&traj, &names).unwrap();
        let (read_names, read) = read_trajectory(&csv).unwrap();
        assert_eq!(read_names, names);
        assert_eq!(read.len(), traj.len());
        assert_eq!(read.h().to_bits(), {
            let t1: f64 = fmt_g17(traj.time(1)).parse().unwrap();
            t1.to_bits()
        });
        for (a, b) in traj.samples().iter().zip(read.samples()) {
            for (x, y) in a.iter().zip(b) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn write_is_deterministic() {
        let traj = Trajectory::new(0.0, 0.125, vec![vec![0.1], vec![0.2]]);
        let names = vec!["x1".to_string()];
        assert_eq!(
            write_trajectory(&traj, &names).unwrap(),
            write_trajectory(&traj, &names).unwrap()
        );
    }

    #[test]
    fn name_count_must_match() {
        let traj = Trajectory::new(0.0, 0.5, vec![vec![1.0, 2.0]]);
        assert_eq!(
            write_trajectory(&traj, &["x1".into()]).unwrap_err(),
            CsvError::NameCount {
                expected: 2,
                got: 1
            }
        );
    }

    #[test]
    fn bad_rows_are_located() {
        let err = read_trajectory("t,x1\n0,1\n0.1,oops\n").unwrap_err();
        assert_eq!(
            err,
            CsvError::Malformed {
                line: 3,
                message: "bad value \"oops\"".into()
            }
        );
        let err = read_trajectory("t,x1\n0,1,2\n").unwrap_err();
        assert!(matches!(err, CsvError::Malformed { line: 2, .. }));
        assert_eq!(read_trajectory("t,x1\n").unwrap_err(), CsvError::Empty);
    }

    #[test]
    fn matrix_rows_are_comma_separated() {
        let m = array![[1.0, -0.5], [0.0, 2.5e-300]];
        assert_eq!(write_matrix(&m), "1,-0.5\n0,2.5e-300\n");
    }

    #[test]
    fn order_files_round_trip() {
        let list = vec![m(&[1, 0]), m(&[0, 1]), m(&[3, 0])];
        let text = write_order(&list);
        assert_eq!(parse_order(&text, 2).unwrap(), list);
    }

    #[test]
    fn order_accepts_commas_and_comments() {
        let text = "# states first\n1,0\n0 1\n\n3 0  # cube\n";
        assert_eq!(
            parse_order(text, 2).unwrap(),
            vec![m(&[1, 0]), m(&[0, 1]), m(&[3, 0])]
        );
    }

    #[test]
    fn order_errors_carry_line_numbers() {
        assert_eq!(
            parse_order("1 0\n2 x\n", 2).unwrap_err(),
            CsvError::Malformed {
                line: 2,
                message: "bad exponent \"x\"".into()
            }
        );
        assert!(matches!(
            parse_order("1 0 0\n", 2).unwrap_err(),
            CsvError::Malformed { line: 1, .. }
        ));
    }
}
