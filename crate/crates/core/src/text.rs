//! Plain-text matrix format: comma-separated values, one row per line.
//!
//! Numbers are written with the shortest representation that parses back to
//! the identical `f64`. Blank lines and lines starting with `#` are ignored
//! on input.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn write_matrix(m: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|&x| format_number(x)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|field| {
                let field = field.trim();
                field.parse::<f64>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("not a number: {field:?}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::Parse {
                line: idx + 1,
                msg: "non-finite value".into(),
            });
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected {} columns, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "no matrix rows".into(),
        });
    }
    Matrix::from_rows(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_with_comments_and_whitespace() {
        let m = parse_matrix("# J\n1, 2\n\n 4 ,8\n").unwrap();
        assert_eq!(m, Matrix::from_rows(&[[1.0, 2.0], [4.0, 8.0]]).unwrap());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_matrix("1,2\n3\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_matrix("1,x\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(parse_matrix("1,NaN\n"), Err(Error::Parse { .. })));
        assert!(parse_matrix("\n# nothing\n").is_err());
    }

    #[test]
    fn formats_compactly() {
        assert_eq!(format_number(0.25), "0.25");
        assert_eq!(format_number(-0.0), "-0");
        assert_eq!(format_number(1e-7), "1e-7");
        assert_eq!(format_number(3.0), "3");
    }

    proptest! {
        #[test]
        fn round_trips_bit_exactly(
            data in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 1..24),
            cols in 1usize..5,
        ) {
            let rows = data.len() / cols;
            prop_assume!(rows > 0);
            let m = Matrix::from_row_slice(rows, cols, &data[..rows * cols]).unwrap();
            let back = parse_matrix(&write_matrix(&m)).unwrap();
            prop_assert!(m.as_slice().iter().zip(back.as_slice()).all(|(a, b)| a.to_bits() == b.to_bits()));
        }
    }
}
