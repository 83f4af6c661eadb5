//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! Each operation takes λ as text ("3,2") and returns JSON. The plain
//! functions are usable from Rust; the `#[wasm_bindgen]` wrappers turn errors
//! into JS exceptions.

use klcone::cones::{minimal_cone_strategy, StrategyOptions};
use klcone::hecke::{wgraph, WGraphMethod};
use klcone::optimize::{feasibility, objective, objective_exact};
use klcone::rational::{rational_to_string, to_f64};
use klcone::specht::SpechtBundle;
use klcone::tableaux::Partition;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Shapes above this size make the page unresponsive.
pub const MAX_N: usize = 9;

fn shape(lambda: &str) -> Result<Partition, String> {
    let p = Partition::parse(lambda).map_err(|e| e.to_string())?;
    if p.n() > MAX_N {
        return Err(format!("n = {} is above the demo limit {MAX_N}", p.n()));
    }
    Ok(p)
}

/// Γ^λ as `{lambda, vertices, edges}` plus a `dot` field.
pub fn wgraph_json(lambda: &str) -> Result<String, String> {
    let g = wgraph(&shape(lambda)?, WGraphMethod::Parabolic).map_err(|e| e.to_string())?;
    let mut v = g.to_json();
    v["dot"] = json!(g.to_dot());
    Ok(v.to_string())
}

/// The minimal-cone strategy report.
pub fn cone_json(lambda: &str) -> Result<String, String> {
    let r = minimal_cone_strategy(&shape(lambda)?, StrategyOptions::default()).map_err(|e| e.to_string())?;
    Ok(r.to_json().to_string())
}

/// Tr(AᵗGA) and the feasibility residual along A(t) = (1−t)A_sn + tA_kl,
/// t = 0, 1/steps, …, 1.
pub fn profile_json(lambda: &str, steps: usize) -> Result<String, String> {
    let steps = steps.clamp(1, 400);
    let p = shape(lambda)?;
    if p.n() > 7 {
        return Err("the profile is limited to n <= 7".into());
    }
    let b = SpechtBundle::new(&p).map_err(|e| e.to_string())?;
    let g = b.gram.to_f64();
    let ops: Vec<_> = b.ops.iter().map(|m| m.to_f64()).collect();
    let (sn, kl) = (b.a_sn.to_f64(), b.a_kl.to_f64());
    let mut points = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = k as f64 / steps as f64;
        let a = &sn * (1.0 - t) + &kl * t;
        let res = feasibility(&a, &ops).map_err(|e| e.to_string())?.residual;
        points.push(json!({"t": t, "objective": objective(&a, &g), "residual": res}));
    }
    let f_sn = objective_exact(&b.a_sn, &b.gram);
    let f_kl = objective_exact(&b.a_kl, &b.gram);
    Ok(json!({
        "lambda": p.to_string(),
        "dim": b.dim(),
        "seminormal": {"objective": rational_to_string(&f_sn), "value": to_f64(&f_sn)},
        "kl": {"objective": rational_to_string(&f_kl), "value": to_f64(&f_kl)},
        "points": points,
    })
    .to_string())
}

#[wasm_bindgen(js_name = wgraph)]
pub fn wgraph_js(lambda: &str) -> Result<String, JsError> {
    wgraph_json(lambda).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = cone)]
pub fn cone_js(lambda: &str) -> Result<String, JsError> {
    cone_json(lambda).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = profile)]
pub fn profile_js(lambda: &str, steps: usize) -> Result<String, JsError> {
    profile_json(lambda, steps).map_err(|e| JsError::new(&e))
}
