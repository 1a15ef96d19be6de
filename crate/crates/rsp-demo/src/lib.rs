//! Browser bindings for the replicator-dynamics toolkit.
//!
//! Exposes a handful of JSON-speaking entry points used by the static page in
//! `www/`: a parameter-plane classification grid, the stability indices at
//! one parameter point, and a downsampled trajectory with its itinerary.
//! Every function returns a JSON string — either a `"version": 1` document or
//! an `{"error": "..."}` object — so the page needs no bindings beyond
//! `JSON.parse`.
//!
//! The grid is evaluated with a plain loop rather than the parallel sweep of
//! the core crate, keeping the wasm build free of threads.

use serde_json::json;
use wasm_bindgen::prelude::*;

use rsp_dynamics::flow;
use rsp_dynamics::game::{GameState, PayoffParams};
use rsp_dynamics::harness::grid_center;
use rsp_dynamics::network::CycleId;
use rsp_dynamics::stability::{classify, Classification};

fn error_json(message: &str) -> String {
    json!({ "error": message }).to_string()
}

fn parse_params(eps_x: f64, eps_y: f64) -> Result<PayoffParams, String> {
    PayoffParams::new(eps_x, eps_y).map_err(|e| e.to_string())
}

/// Classification tags of all five cycles on a `resolution`-per-axis grid of
/// cell centres over the open parameter square.  Tags are row-major with the
/// first axis fastest, matching the CSV artefact of the core crate.
#[wasm_bindgen]
pub fn classify_grid(resolution: u32) -> String {
    let resolution = resolution as usize;
    if !(11..=401).contains(&resolution) {
        return error_json("resolution must lie in 11..=401");
    }
    let mut classes: Vec<Vec<&'static str>> =
        CycleId::ALL.iter().map(|_| Vec::with_capacity(resolution * resolution)).collect();
    for j in 0..resolution {
        let eps_y = grid_center(resolution, j);
        for i in 0..resolution {
            let eps_x = grid_center(resolution, i);
            let params = PayoffParams::new(eps_x, eps_y).expect("cell centres are interior");
            for (slot, cycle) in classes.iter_mut().zip(CycleId::ALL) {
                slot.push(classify(cycle, &params).classification.tag());
            }
        }
    }
    let by_cycle: serde_json::Map<String, serde_json::Value> = CycleId::ALL
        .iter()
        .zip(classes)
        .map(|(cycle, tags)| (cycle.name().to_string(), json!(tags)))
        .collect();
    json!({
        "version": 1,
        "resolution": resolution,
        "classes": by_cycle,
    })
    .to_string()
}

/// Stability indices and classification of every cycle at one parameter
/// point, via the closed-form route.
#[wasm_bindgen]
pub fn indices_json(eps_x: f64, eps_y: f64) -> String {
    let params = match parse_params(eps_x, eps_y) {
        Ok(p) => p,
        Err(msg) => return error_json(&msg),
    };
    let results: Vec<serde_json::Value> = CycleId::ALL
        .iter()
        .map(|&cycle| {
            let report = classify(cycle, &params);
            let sigma: serde_json::Map<String, serde_json::Value> =
                if report.classification == Classification::Boundary {
                    serde_json::Map::new()
                } else {
                    report
                        .sigma
                        .iter()
                        .map(|(n, v)| {
                            (
                                n.name().to_string(),
                                serde_json::to_value(v).expect("index serialises"),
                            )
                        })
                        .collect()
                };
            json!({
                "cycle": cycle.name(),
                "classification": report.classification.tag(),
                "sigma": sigma,
            })
        })
        .collect();
    json!({
        "version": 1,
        "eps_x": eps_x,
        "eps_y": eps_y,
        "results": results,
    })
    .to_string()
}

/// Integrate the flow and return every `stride`-th sample together with the
/// itinerary of vertex visits.  `initial` is the six-component state
/// `(x1, x2, x3, y1, y2, y3)`.
#[wasm_bindgen]
pub fn simulate_trajectory(
    eps_x: f64,
    eps_y: f64,
    initial: &[f64],
    t_max: f64,
    dt: f64,
    stride: u32,
) -> String {
    let params = match parse_params(eps_x, eps_y) {
        Ok(p) => p,
        Err(msg) => return error_json(&msg),
    };
    if initial.len() != 6 {
        return error_json("initial state needs six components");
    }
    let state = match GameState::from_array([
        initial[0], initial[1], initial[2], initial[3], initial[4], initial[5],
    ]) {
        Ok(s) => s,
        Err(e) => return error_json(&e.to_string()),
    };
    if !(t_max > 0.0 && t_max.is_finite() && t_max <= 2000.0) {
        return error_json("t_max must lie in (0, 2000]");
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return error_json("dt must be positive");
    }
    let stride = (stride as usize).max(1);
    let traj = match flow::integrate(&state, &params, t_max, dt) {
        Ok(t) => t,
        Err(e) => return error_json(&e.to_string()),
    };
    let itin = flow::itinerary(&traj, flow::DEFAULT_NEAR_THRESHOLD);
    let times: Vec<f64> = traj.times().iter().copied().step_by(stride).collect();
    let states: Vec<[f64; 6]> =
        traj.states().iter().map(|s| s.as_array()).step_by(stride).collect();
    let visits: Vec<serde_json::Value> = itin
        .visits
        .iter()
        .map(|v| json!({ "label": v.node.name(), "entry": v.entry, "exit": v.exit }))
        .collect();
    json!({
        "version": 1,
        "times": times,
        "states": states,
        "itinerary": visits,
    })
    .to_string()
}
