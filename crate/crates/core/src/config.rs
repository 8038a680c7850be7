//! JSON operator configs and run parameters.
//!
//! ```json
//! {"order": 2, "system_size": 1, "base_dim": 0, "geometry": "strip_hyperbolic", "weight_c": 0,
//!  "fibre": {"type": "interval", "length": 1.0},
//!  "coefficients": [{"k": 2, "alpha": 0, "beta": 0, "poly": [[0, 0, 1.0, 0.0]]}]}
//! ```
//!
//! Each `poly` row is `[x_deg, z_deg, re, im]`. A coefficient is that scalar polynomial times the
//! identity, unless the record carries `"entry": [row, col]`, in which case it fills that single
//! matrix entry; records with the same key add up.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::model::{Fibre, GeometryTag, ModelOperator, XzPoly};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaViolation {
    pub path: String,
    pub reason: String,
}

impl From<SchemaViolation> for Error {
    fn from(v: SchemaViolation) -> Self {
        Error::Schema { path: v.path, reason: v.reason }
    }
}

struct Checker {
    found: Vec<SchemaViolation>,
}

impl Checker {
    fn fail(&mut self, path: &str, reason: impl Into<String>) {
        self.found.push(SchemaViolation { path: path.to_string(), reason: reason.into() });
    }

    fn uint(&mut self, obj: &Map<String, Value>, key: &str, path: &str) -> Option<usize> {
        let p = format!("{path}.{key}");
        match obj.get(key) {
            None => {
                self.fail(&p, "missing");
                None
            }
            Some(v) => match v.as_u64() {
                Some(n) => Some(n as usize),
                None => {
                    self.fail(&p, "expected a nonnegative integer");
                    None
                }
            },
        }
    }
}

/// Every schema violation in `text`, or the operator it describes.
pub fn validate(text: &str) -> std::result::Result<ModelOperator<f64>, Vec<SchemaViolation>> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| vec![SchemaViolation { path: "$".into(), reason: format!("invalid JSON: {e}") }])?;
    let Some(obj) = root.as_object() else {
        return Err(vec![SchemaViolation { path: "$".into(), reason: "expected an object".into() }]);
    };
    let mut ck = Checker { found: Vec::new() };
    let order = ck.uint(obj, "order", "$");
    let n = ck.uint(obj, "system_size", "$");
    let base_dim = ck.uint(obj, "base_dim", "$");
    if base_dim.is_some_and(|b| b > 1) {
        ck.fail("$.base_dim", "at most one base variable is supported");
    }
    if n == Some(0) {
        ck.fail("$.system_size", "must be positive");
    }
    let weight_c = match obj.get("weight_c") {
        None => 0,
        Some(v) => match v.as_i64() {
            Some(c) => c as i32,
            None => {
                ck.fail("$.weight_c", "expected an integer");
                0
            }
        },
    };
    let geometry = match obj.get("geometry").and_then(Value::as_str) {
        Some(s) => GeometryTag::parse(s).or_else(|| {
            ck.fail("$.geometry", format!("unknown geometry {s:?}"));
            None
        }),
        None => {
            ck.fail("$.geometry", "missing or not a string");
            None
        }
    };
    let fibre = parse_fibre(obj.get("fibre"), &mut ck);
    match (geometry, fibre) {
        (Some(GeometryTag::StripHyperbolic), Some(Fibre::Point)) => ck.fail("$.fibre", "strip geometry needs an interval fibre"),
        (Some(GeometryTag::HalfLineToy | GeometryTag::ExteriorToy), Some(Fibre::Interval { .. })) => {
            ck.fail("$.fibre", "point-fibre geometry with an interval fibre")
        }
        _ => {}
    }
    let (Some(order), Some(n), Some(base_dim), Some(geometry), Some(fibre)) = (order, n, base_dim, geometry, fibre) else {
        return Err(ck.found);
    };
    let mut op = ModelOperator::new(order, n, base_dim, fibre, geometry);
    op.weight_c = weight_c;
    match obj.get("coefficients").and_then(Value::as_array) {
        None => ck.fail("$.coefficients", "missing or not an array"),
        Some(list) => {
            for (idx, rec) in list.iter().enumerate() {
                let path = format!("$.coefficients[{idx}]");
                if let Some((key, poly)) = parse_coefficient(rec, n, &path, &mut ck) {
                    if let Err(e) = op.add_coefficient(key, poly) {
                        ck.fail(&path, e.to_string());
                    }
                }
            }
        }
    }
    if ck.found.is_empty() && op.check_leading().is_err() {
        ck.fail("$.coefficients", "leading coefficient missing or singular at x = 0");
    }
    if ck.found.is_empty() {
        Ok(op)
    } else {
        Err(ck.found)
    }
}

fn parse_fibre(v: Option<&Value>, ck: &mut Checker) -> Option<Fibre> {
    let Some(obj) = v.and_then(Value::as_object) else {
        ck.fail("$.fibre", "missing or not an object");
        return None;
    };
    match obj.get("type").and_then(Value::as_str) {
        Some("point") => Some(Fibre::Point),
        Some("interval") => match obj.get("length").and_then(Value::as_f64) {
            Some(l) if l > 0.0 && l.is_finite() => Some(Fibre::Interval { length: l }),
            _ => {
                ck.fail("$.fibre.length", "expected a positive number");
                None
            }
        },
        _ => {
            ck.fail("$.fibre.type", "expected \"point\" or \"interval\"");
            None
        }
    }
}

fn parse_coefficient(rec: &Value, n: usize, path: &str, ck: &mut Checker) -> Option<((usize, usize, usize), XzPoly<f64>)> {
    let Some(obj) = rec.as_object() else {
        ck.fail(path, "expected an object");
        return None;
    };
    let k = ck.uint(obj, "k", path);
    let alpha = ck.uint(obj, "alpha", path);
    let beta = ck.uint(obj, "beta", path);
    let entry = match obj.get("entry") {
        None => None,
        Some(v) => match v.as_array().map(|a| a.iter().map(Value::as_u64).collect::<Option<Vec<_>>>()) {
            Some(Some(rc)) if rc.len() == 2 && (rc[0] as usize) < n && (rc[1] as usize) < n => {
                Some((rc[0] as usize, rc[1] as usize))
            }
            _ => {
                ck.fail(&format!("{path}.entry"), format!("expected [row, col] below {n}"));
                return None;
            }
        },
    };
    let Some(rows) = obj.get("poly").and_then(Value::as_array) else {
        ck.fail(&format!("{path}.poly"), "missing or not an array");
        return None;
    };
    let mut poly = XzPoly::zero(n);
    for (t, row) in rows.iter().enumerate() {
        let tp = format!("{path}.poly[{t}]");
        let cells = row.as_array().filter(|r| r.len() == 4);
        let parsed = cells.and_then(|r| Some((r[0].as_u64()?, r[1].as_u64()?, r[2].as_f64()?, r[3].as_f64()?)));
        let Some((xd, zd, re, im)) = parsed else {
            ck.fail(&tp, "expected [x_deg, z_deg, re, im]");
            continue;
        };
        let c = Complex64::new(re, im);
        let mat = match entry {
            None => CMatrix::identity(n, n) * c,
            Some((r, s)) => {
                let mut m = CMatrix::zeros(n, n);
                m[(r, s)] = c;
                m
            }
        };
        poly.add(xd as usize, zd as usize, mat);
    }
    Some(((k?, alpha?, beta?), poly))
}

/// The operator described by `text`; the first violation becomes the error.
pub fn parse_config(text: &str) -> Result<ModelOperator<f64>> {
    validate(text).map_err(|mut v| v.remove(0).into())
}

/// Serializes an operator to the config format. Coefficients that are multiples of the
/// identity are written without `entry`.
pub fn to_json(op: &ModelOperator<f64>) -> String {
    let n = op.system_size;
    let mut coeffs = Vec::new();
    for (&(k, a, b), poly) in op.coefficients() {
        let scalar = poly.terms().all(|(_, m)| {
            let d = m[(0, 0)];
            (0..n).all(|r| (0..n).all(|c| m[(r, c)] == if r == c { d } else { Complex64::new(0.0, 0.0) }))
        });
        if scalar {
            let rows: Vec<Value> = poly.terms().map(|(&(x, z), m)| json!([x, z, m[(0, 0)].re, m[(0, 0)].im])).collect();
            coeffs.push(json!({"k": k, "alpha": a, "beta": b, "poly": rows}));
            continue;
        }
        for r in 0..n {
            for c in 0..n {
                let rows: Vec<Value> = poly
                    .terms()
                    .filter(|(_, m)| m[(r, c)] != Complex64::new(0.0, 0.0))
                    .map(|(&(x, z), m)| json!([x, z, m[(r, c)].re, m[(r, c)].im]))
                    .collect();
                if !rows.is_empty() {
                    coeffs.push(json!({"k": k, "alpha": a, "beta": b, "entry": [r, c], "poly": rows}));
                }
            }
        }
    }
    let fibre = match op.fibre {
        Fibre::Point => json!({"type": "point"}),
        Fibre::Interval { length } => json!({"type": "interval", "length": length}),
    };
    let doc = json!({
        "order": op.order,
        "system_size": n,
        "base_dim": op.base_dim,
        "geometry": op.geometry.name(),
        "weight_c": op.weight_c,
        "fibre": fibre,
        "coefficients": coeffs,
    });
    serde_json::to_string_pretty(&doc).expect("JSON values serialize")
}

/// Numeric parameters of a run; every field has a default so that configs may be partial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunParams {
    pub seed: u64,
    pub n_s: usize,
    pub n_z: usize,
    pub s_max: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_steps: usize,
    pub xi: f64,
    pub bump_height: f64,
    /// Replaces every suite tolerance when set.
    pub tol_override: Option<f64>,
}

impl Default for RunParams {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            n_s: 64,
            n_z: 64,
            s_max: 12.0,
            tau_min: 0.25,
            tau_max: 4.0,
            tau_steps: 16,
            xi: 8.0,
            bump_height: 1.0,
            tol_override: None,
        }
    }
}

impl RunParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |path: &str, reason: &str| Err(Error::Schema { path: path.into(), reason: reason.into() });
        if let Some(t) = self.tol_override {
            if !(t > 0.0 && t.is_finite()) {
                return bad("tol_override", "tolerances must be positive");
            }
        }
        if self.s_max < 4.0 {
            return bad("s_max", "truncation below 4");
        }
        if self.n_s < 16 || self.n_z < 16 {
            return bad("n_s", "fewer than 16 nodes");
        }
        if self.tau_steps == 0 || self.tau_max < self.tau_min {
            return bad("tau_steps", "empty τ range");
        }
        Ok(())
    }

    /// `tau_steps` evenly spaced values from `tau_min` to `tau_max`.
    pub fn taus(&self) -> Vec<f64> {
        if self.tau_steps == 1 {
            return vec![self.tau_min];
        }
        (0..self.tau_steps)
            .map(|k| self.tau_min + (self.tau_max - self.tau_min) * k as f64 / (self.tau_steps - 1) as f64)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const STRIP: &str = r#"{
        "order": 2, "system_size": 1, "base_dim": 0, "geometry": "strip_hyperbolic",
        "fibre": {"type": "interval", "length": 1.0},
        "coefficients": [
            {"k": 2, "alpha": 0, "beta": 0, "poly": [[0, 0, 1.0, 0.0]]},
            {"k": 0, "alpha": 0, "beta": 2, "poly": [[0, 0, 1.0, 0.0]]}
        ]
    }"#;

    #[test]
    fn strip_round_trip() {
        let op = parse_config(STRIP).unwrap();
        assert_eq!(op.geometry, GeometryTag::StripHyperbolic);
        let want = ModelOperator::<f64>::strip_laplacian(1.0);
        let again = parse_config(&to_json(&op)).unwrap();
        for key in [(2, 0, 0), (0, 0, 2)] {
            assert_eq!(again.coefficient(key), want.coefficient(key));
        }
        assert_eq!(to_json(&again), to_json(&op));
    }

    #[test]
    fn missing_leading_coefficient() {
        let text = STRIP.replace(r#"{"k": 2, "alpha": 0, "beta": 0, "poly": [[0, 0, 1.0, 0.0]]},"#, "");
        match parse_config(&text) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "$.coefficients"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn weight_is_recorded() {
        let text = STRIP.replace("\"base_dim\": 0,", "\"base_dim\": 0, \"weight_c\": 2,");
        assert_eq!(parse_config(&text).unwrap().weight_c, 2);
    }

    #[test]
    fn violations_carry_paths() {
        let text = r#"{"order": -1, "system_size": 1, "base_dim": 0, "geometry": "torus",
            "fibre": {"type": "interval", "length": 0}, "coefficients": []}"#;
        let paths: Vec<String> = validate(text).unwrap_err().into_iter().map(|v| v.path).collect();
        assert_eq!(paths, vec!["$.order", "$.geometry", "$.fibre.length"]);
        assert!(matches!(parse_config("{"), Err(Error::Schema { .. })));
    }

    #[test]
    fn matrix_entries() {
        let text = r#"{"order": 2, "system_size": 2, "base_dim": 0, "geometry": "halfline_toy",
            "fibre": {"type": "point"},
            "coefficients": [
                {"k": 2, "alpha": 0, "beta": 0, "poly": [[0, 0, 1.0, 0.0]]},
                {"k": 0, "alpha": 0, "beta": 0, "entry": [0, 1], "poly": [[1, 0, 0.5, 0.0]]}
            ]}"#;
        let op = parse_config(text).unwrap();
        let q = op.coefficient((0, 0, 0)).unwrap().eval(2.0, 0.0);
        assert_eq!(q[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(q[(1, 0)], Complex64::new(0.0, 0.0));
        let again = parse_config(&to_json(&op)).unwrap();
        assert_eq!(again.coefficient((0, 0, 0)), op.coefficient((0, 0, 0)));
    }

    #[test]
    fn run_params() {
        let p: RunParams = serde_json::from_str(r#"{"n_s": 32}"#).unwrap();
        assert_eq!(p.n_s, 32);
        assert!(p.validate().is_ok());
        let bad = RunParams { tol_override: Some(0.0), ..RunParams::default() };
        assert!(bad.validate().is_err());
        assert_eq!(RunParams { tau_steps: 3, tau_min: 1.0, tau_max: 2.0, ..RunParams::default() }.taus(), vec![1.0, 1.5, 2.0]);
    }
}
