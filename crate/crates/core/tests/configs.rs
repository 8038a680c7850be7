use std::path::PathBuf;

use phi_calderon::config::{parse_config, to_json, validate};
use phi_calderon::model::{GeometryTag, ModelOperator};

fn shipped(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn same_operator(a: &ModelOperator<f64>, b: &ModelOperator<f64>) {
    assert_eq!(a.order, b.order);
    assert_eq!(a.system_size, b.system_size);
    assert_eq!(a.base_dim, b.base_dim);
    assert_eq!(a.fibre, b.fibre);
    assert_eq!(a.geometry, b.geometry);
    let keys = |op: &ModelOperator<f64>| op.coefficients().map(|(k, _)| *k).collect::<Vec<_>>();
    assert_eq!(keys(a), keys(b));
    for (k, p) in a.coefficients() {
        for (x, z) in [(0.0, 0.0), (0.3, 0.7), (1.0, 0.2)] {
            assert!((p.eval(x, z) - b.coefficient(*k).unwrap().eval(x, z)).norm() < 1e-15, "{k:?}");
        }
    }
}

#[test]
fn shipped_configs_match_builtin_operators() {
    same_operator(&parse_config(&shipped("strip_laplacian.json")).unwrap(), &ModelOperator::strip_laplacian(1.0));
    same_operator(&parse_config(&shipped("halfline_toy.json")).unwrap(), &ModelOperator::halfline_toy(1.0));
    same_operator(&parse_config(&shipped("exterior_toy.json")).unwrap(), &ModelOperator::exterior_toy(1.0));
}

#[test]
fn shipped_configs_round_trip() {
    for name in ["strip_laplacian.json", "halfline_toy.json", "exterior_toy.json"] {
        let op = parse_config(&shipped(name)).unwrap();
        let again = parse_config(&to_json(&op)).unwrap();
        same_operator(&op, &again);
    }
}

#[test]
fn weight_is_recorded() {
    let text = shipped("strip_laplacian.json").replace("\"weight_c\": 0", "\"weight_c\": 2");
    let op = parse_config(&text).unwrap();
    assert_eq!(op.weight_c, 2);
    assert_eq!(op.geometry, GeometryTag::StripHyperbolic);
}

#[test]
fn violations_carry_paths() {
    let text = shipped("halfline_toy.json").replace("\"k\": 2", "\"k\": -2").replace("\"point\"", "\"disc\"");
    let errs = validate(&text).unwrap_err();
    let paths: Vec<&str> = errs.iter().map(|v| v.path.as_str()).collect();
    assert!(paths.contains(&"$.fibre.type"), "{paths:?}");
    assert!(validate("{ not json").is_err());
}
