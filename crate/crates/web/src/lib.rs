//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each export is a thin wrapper over a plain function so the numerics can be
//! exercised natively.

use wasm_bindgen::prelude::*;

use bergman_lab::geometry::make_lattice;
use bergman_lab::operators::{assemble_volterra_in, singular_values, Space};
use bergman_lab::series::{SymbolSpec, DEFAULT_TRUNCATION};
use bergman_lab::Weight;

/// Largest truncation the page may request; keeps the SVD interactive.
pub const MAX_DEMO_N: usize = 256;

fn space(weight: &str) -> Result<Space, String> {
    if weight == "hardy" {
        return Ok(Space::Hardy);
    }
    Weight::parse(weight).map(Space::Bergman).map_err(|e| e.to_string())
}

/// Singular values of the truncated `T_g^{n,k}` matrix, descending.
pub fn spectrum(symbol: &str, weight: &str, n: usize, k: usize, big_n: usize) -> Result<Vec<f64>, String> {
    if big_n > MAX_DEMO_N {
        return Err(format!("N is capped at {MAX_DEMO_N} in the demo"));
    }
    let g = SymbolSpec::parse(symbol).and_then(|s| s.build(DEFAULT_TRUNCATION)).map_err(|e| e.to_string())?;
    let m = assemble_volterra_in(&g, &space(weight)?, n, k, big_n).map_err(|e| e.to_string())?;
    singular_values(&m).map_err(|e| e.to_string())
}

/// Doubling ratios `ω̂(1-2^{-m}) / ω̂(1-2^{-m-1})` and the verdict, as JSON.
pub fn doubling(weight: &str, depth: usize) -> Result<String, String> {
    let w = Weight::parse(weight).map_err(|e| e.to_string())?;
    let prof = w.doubling_profile(depth.min(40)).map_err(|e| e.to_string())?;
    serde_json::to_string(&prof).map_err(|e| e.to_string())
}

/// Interleaved `re, im` coordinates of the first `limit` lattice points.
pub fn lattice(r: f64, limit: usize) -> Result<Vec<f64>, String> {
    let lat = make_lattice(r).map_err(|e| e.to_string())?;
    Ok(lat.points().take(limit).flat_map(|(_, p)| [p.re, p.im]).collect())
}

#[wasm_bindgen(js_name = volterraSpectrum)]
pub fn volterra_spectrum(symbol: &str, weight: &str, n: usize, k: usize, big_n: usize) -> Result<Vec<f64>, JsError> {
    spectrum(symbol, weight, n, k, big_n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = doublingProfile)]
pub fn doubling_profile(weight: &str, depth: usize) -> Result<String, JsError> {
    doubling(weight, depth).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = latticePoints)]
pub fn lattice_points(r: f64, limit: usize) -> Result<Vec<f64>, JsError> {
    lattice(r, limit).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_of_the_shift() {
        let s = spectrum("poly:0,1", "std:alpha=0", 1, 0, 32).unwrap();
        assert_eq!(s.len(), 33);
        assert!((s[0] - 0.5f64.sqrt()).abs() < 1e-14);
        let h = spectrum("poly:0,1", "hardy", 1, 0, 16).unwrap();
        assert!((h[3] - 0.25).abs() < 1e-14);
        assert!(spectrum("poly:0,1", "std:alpha=0", 1, 0, 10_000).is_err());
        assert!(spectrum("bogus", "std:alpha=0", 1, 0, 8).is_err());
    }

    #[test]
    fn doubling_json() {
        let js = doubling("std:alpha=1", 12).unwrap();
        assert!(js.contains("\"verdict\":\"doubling-like\""));
        assert!(doubling("exp:c=1", 12).unwrap().contains("non-doubling"));
    }

    #[test]
    fn lattice_coordinates() {
        let pts = lattice(1.0, 50).unwrap();
        assert_eq!(pts.len(), 100);
        assert_eq!((pts[0], pts[1]), (0.0, 0.0));
        assert!(pts.chunks(2).all(|c| c[0].hypot(c[1]) < 1.0));
    }
}
