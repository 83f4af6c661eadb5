use klcone_web::{cone_json, profile_json, wgraph_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn wgraph_has_vertices_and_dot() {
    let v = parse(wgraph_json("3,2").unwrap());
    assert_eq!(v["vertices"].as_array().unwrap().len(), 5);
    assert!(v["dot"].as_str().unwrap().starts_with("graph"));
}

#[test]
fn cone_reports_failure_for_four_four_one() {
    let v = parse(cone_json("4,4,1").unwrap());
    assert_eq!(v["status"], "failed");
    let v = parse(cone_json("3,2").unwrap());
    assert_eq!(v["status"], "verified_minimal");
}

#[test]
fn profile_runs_between_the_two_optima() {
    let v = parse(profile_json("2,1", 4).unwrap());
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts.len(), 5);
    assert!((pts[0]["objective"].as_f64().unwrap() - 3.5).abs() < 1e-12);
    assert!((pts[4]["objective"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    // the segment lies in the feasible interval [-1, -1/2]
    assert!(pts.iter().all(|p| p["residual"].as_f64().unwrap() <= 1e-12));
    assert_eq!(v["seminormal"]["objective"], "7/2");
}

#[test]
fn rejects_bad_and_large_shapes() {
    assert!(wgraph_json("2,3").is_err());
    assert!(cone_json("5,5").is_err());
    assert!(profile_json("4,4", 10).is_err());
}
