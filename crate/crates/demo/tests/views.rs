use serde_json::Value;
use slicegeom_demo::{midpoint_json, preset, slice_json, spikes_json, PRESETS};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn presets_load() {
    for p in PRESETS {
        assert_eq!(preset(p).unwrap().dim(), 2);
    }
    assert!(preset("l7").is_err());
}

#[test]
fn square_edge_slice() {
    let v = parse(slice_json("linf", 0.0, 0.2).unwrap());
    assert_eq!(v["diameter"], 2.0);
    assert_eq!(v["certified"], true);
    assert_eq!(v["outline"].as_array().unwrap().len(), 240);
    assert!(slice_json("linf", 0.0, 3.0).is_err());
}

#[test]
fn disc_midpoint_distance() {
    let v = parse(midpoint_json("l2", 0.3, 2, 1.0).unwrap());
    let d = v["distance"].as_f64().unwrap();
    assert!((d - (1.0 - 0.75f64.sqrt())).abs() < 1e-4, "{d}");
    assert!(!v["cloud"].as_array().unwrap().is_empty());
}

#[test]
fn square_corner_distance_is_exact() {
    let v = parse(midpoint_json("linf", std::f64::consts::FRAC_PI_4, 2, 2.0).unwrap());
    assert!((v["distance"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(v["exact"], true);
}

#[test]
fn spike_rows() {
    let v = parse(spikes_json(0.5, 2).unwrap());
    assert_eq!(v[0]["value"], 1.0);
    assert_eq!(v[1]["value"], 0.5);
    assert!(spikes_json(0.3, 2).is_err());
}
