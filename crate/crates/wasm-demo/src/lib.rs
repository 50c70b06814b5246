//! Browser bindings: curve information, one pairing with a bilinearity
//! check, and a small parameter search.  Every entry point returns JSON text.

use hyperpair::curve::{classify, frobenius_charpoly, jacobian_order, CurveParams};
use hyperpair::field::FieldDescriptor;
use hyperpair::io::{divisor_to_json, element_to_json};
use hyperpair::jacobian::scalar_mul_u64;
use hyperpair::pairings::{PairingContext, PairingParams, PAIRING_NAMES};
use hyperpair::pfsearch::{embedding_degree, search as run_search, SearchConfig};
use hyperpair::verify::default_vercauteren_expansion;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Search results beyond this many records are truncated.
const MAX_SEARCH_RECORDS: usize = 200;
/// Random quintics examined per prime by the demo search.
const SEARCH_SAMPLE: usize = 2000;

fn parse_curve(p: u64, f: &str) -> Result<CurveParams, String> {
    let coeffs = f
        .split(',')
        .map(|c| c.trim().parse::<i64>().map_err(|_| format!("'{c}' is not an integer")))
        .collect::<Result<Vec<_>, _>>()?;
    let field = FieldDescriptor::prime(p).map_err(|e| e.to_string())?;
    CurveParams::with_f(&field, 2, &coeffs).map_err(|e| e.to_string())
}

pub fn curve_info_json(p: u64, f: &str) -> Result<String, String> {
    let curve = parse_curve(p, f)?;
    let cp = frobenius_charpoly(&curve).map_err(|e| e.to_string())?;
    let order = jacobian_order(&cp, 1);
    let n = u64::try_from(&order).map_err(|_| "group order too large".to_string())?;
    let candidates: Vec<_> = hyperpair::arith::factor(n, Default::default())
        .map_err(|_| "could not factor the group order".to_string())?
        .into_iter()
        .filter(|&(r, _)| r != p && r > 2)
        .map(|(r, _)| json!({ "r": r, "k": embedding_degree(curve.q(), r).ok() }))
        .collect();
    Ok(json!({
        "charpoly": cp.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "jac_order": order.to_string(),
        "class": classify(&cp, p).to_string(),
        "candidates": candidates,
    })
    .to_string())
}

/// Evaluates `e(D2, D1)` (or `e(D1, D2)` for twisted_ate) on sampled inputs
/// and checks `e(a X, Y) = e(X, Y)^a` for a random `a`.
pub fn pairing_demo_json(p: u64, f: &str, r: u64, pairing: &str, seed: u64) -> Result<String, String> {
    if !PAIRING_NAMES.contains(&pairing) || pairing == "hv" {
        return Err(format!("unsupported pairing '{pairing}'"));
    }
    let curve = parse_curve(p, f)?;
    let ctx = PairingContext::new(&curve, r).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let err = |e: hyperpair::Error| e.to_string();
    let g1 = ctx.sample_g1(&mut rng).map_err(err)?;
    let g2 = ctx.sample_g2(&mut rng).map_err(err)?;
    let (x, y) = if pairing == "twisted_ate" { (g1, g2) } else { (g2, g1) };
    let params = PairingParams {
        ate_j: Some(1),
        vercauteren: Some(default_vercauteren_expansion(&ctx)),
        rate: Some((1, 2)),
        twist_e: Some(if ctx.k % 2 == 0 { ctx.k as u64 / 2 } else { ctx.k as u64 }),
        ..Default::default()
    };
    let out = ctx.pairing_dispatch(pairing, &x, &y, &params).map_err(err)?;
    let a = rng.gen_range(2..r);
    let ax = scalar_mul_u64(&ctx.curve_k, &x, a).map_err(err)?;
    let scaled = ctx.pairing_dispatch(pairing, &ax, &y, &params).map_err(err)?;
    Ok(json!({
        "k": ctx.k,
        "pairing": pairing,
        "first": divisor_to_json(&ctx, &x).map_err(err)?,
        "second": divisor_to_json(&ctx, &y).map_err(err)?,
        "value": element_to_json(&out.value),
        "loop_bits": out.loop_bits,
        "final_exp": out.final_exp,
        "a": a,
        "bilinear": scaled.value == out.value.pow(&BigInt::from(a).magnitude().clone()),
    })
    .to_string())
}

pub fn search_json(p: u64, max_k: u64, min_r_bits: u32, seed: u64) -> Result<String, String> {
    let cfg = SearchConfig {
        p_min: p,
        p_max: p,
        max_k,
        min_r_bits,
        sample_all: false,
        sample_size: SEARCH_SAMPLE,
        dedup: true,
        seed,
    };
    let out = run_search(&cfg).map_err(|e| e.to_string())?;
    let records: Vec<_> = out.records.iter().take(MAX_SEARCH_RECORDS).collect();
    serde_json::to_string(&records).map_err(|e| e.to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn curve_info(p: u64, f: &str) -> Result<String, JsValue> {
    js(curve_info_json(p, f))
}

#[wasm_bindgen]
pub fn pairing_demo(p: u64, f: &str, r: u64, pairing: &str, seed: u64) -> Result<String, JsValue> {
    js(pairing_demo_json(p, f, r, pairing, seed))
}

#[wasm_bindgen]
pub fn search(p: u64, max_k: u64, min_r_bits: u32, seed: u64) -> Result<String, JsValue> {
    js(search_json(p, max_k, min_r_bits, seed))
}
