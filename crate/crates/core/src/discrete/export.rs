//! Plain-text matrix format: a header line `rows cols`, then one `re im` pair per line in
//! row-major order. Lines starting with `#` are comments.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

pub fn matrix_to_text(m: &CMatrix<f64>) -> String {
    let mut out = format!("# complex matrix, row-major, one entry per line\n{} {}\n", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            out.push_str(&format!("{:.17e} {:.17e}\n", z.re, z.im));
        }
    }
    out
}

pub fn matrix_from_text(text: &str) -> Result<CMatrix<f64>> {
    let bad = |reason: String| Error::Schema { path: "matrix".into(), reason };
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| bad("missing header".into()))?;
    let dims: Vec<usize> = header.split_whitespace().map(str::parse).collect::<std::result::Result<_, _>>().map_err(|e| bad(format!("header: {e}")))?;
    let [rows, cols] = dims[..] else { return Err(bad(format!("header must hold two dimensions, got {header:?}"))) };
    let mut data = Vec::with_capacity(rows * cols);
    for (k, line) in lines.enumerate() {
        let parts: Vec<f64> = line.split_whitespace().map(str::parse).collect::<std::result::Result<_, _>>().map_err(|e| bad(format!("entry {k}: {e}")))?;
        let [re, im] = parts[..] else { return Err(bad(format!("entry {k} must hold two numbers"))) };
        data.push(Complex64::new(re, im));
    }
    if data.len() != rows * cols {
        return Err(bad(format!("expected {} entries, found {}", rows * cols, data.len())));
    }
    Ok(CMatrix::from_row_slice(rows, cols, &data))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let m = CMatrix::from_fn(3, 2, |i, j| Complex64::new(1.0 / (1 + i + j) as f64, -(i as f64).sqrt() * 1e-300));
        let text = matrix_to_text(&m);
        assert_eq!(matrix_from_text(&text).unwrap(), m);
        assert!(text.lines().nth(1) == Some("3 2"));
    }

    #[test]
    fn rejects_short_input() {
        assert!(matches!(matrix_from_text("2 2\n1 0\n"), Err(Error::Schema { .. })));
        assert!(matrix_from_text("").is_err());
    }
}
