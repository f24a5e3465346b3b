//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function returns a flat `Float64Array`; the page slices it.
//! The plain-Rust versions are kept separate so they can be tested natively.

use hfb_core::bogoliubov::{BogoliubovMap, Generator};
use hfb_core::fock_oracle::{adaptive_state_vector, DEFAULT_DIM_CAP};
use hfb_core::variational::{minimize, oracle_compare, residuals, Mode, Options, Status};
use hfb_core::wick_poly::{Statistics, WickPolynomial};
use hfb_core::{CMatrix, CVector, C64};
use wasm_bindgen::prelude::*;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `ω a*a + λ (a*a* + aa)`.
pub fn squeezed(omega: f64, lambda: f64) -> WickPolynomial {
    WickPolynomial::number_operator(1, Statistics::Bose)
        .expect("one mode")
        .scaled(re(omega))
        .with_term(&[0, 0], &[], re(lambda))
        .and_then(|h| h.with_term(&[], &[0, 0], re(lambda)))
        .expect("valid indices")
}

/// `ε (a*_1 a_1 + a*_2 a_2) + Δ (a*_1 a*_2 + a_2 a_1)`.
pub fn pairing(eps: f64, delta: f64) -> WickPolynomial {
    WickPolynomial::number_operator(2, Statistics::Fermi)
        .expect("two modes")
        .scaled(re(eps))
        .with_term(&[0, 1], &[], re(delta))
        .and_then(|h| h.with_term(&[], &[1, 0], re(delta)))
        .expect("valid indices")
}

/// Energy of `e^{iA}Ω` with `A = ½(θ a*a* + θ̄ aa)` over the square
/// `|Re θ|, |Im θ| ≤ radius`, row-major with `Im θ` along rows. NaN marks
/// points where the map could not be built.
pub fn landscape(omega: f64, lambda: f64, radius: f64, samples: usize) -> Vec<f64> {
    let h = squeezed(omega, lambda);
    let samples = samples.max(2);
    let at = |k: usize| -radius + 2.0 * radius * k as f64 / (samples - 1) as f64;
    let mut out = Vec::with_capacity(samples * samples);
    for row in 0..samples {
        for col in 0..samples {
            let theta = CMatrix::from_element(1, 1, C64::new(at(col), at(row)));
            let energy = Generator::new(Statistics::Bose, theta, CVector::zeros(1))
                .and_then(|g| BogoliubovMap::from_generator(&g))
                .and_then(|u| residuals(&h, &u))
                .map(|b| b.energy())
                .unwrap_or(f64::NAN);
            out.push(energy);
        }
    }
    out
}

fn minimize_quietly(h: &WickPolynomial, mode: Mode) -> Result<hfb_core::variational::MinimizationResult, String> {
    let r = minimize(h, mode, &Options::default()).map_err(|e| e.to_string())?;
    match r.status {
        Status::Converged => Ok(r),
        Status::UnboundedBelow => Err("energy is unbounded below".into()),
        Status::MaxIterations => Err("minimizer did not converge".into()),
    }
}

/// `[energy, D, Re c, Im c]` for the optimal squeezed vacuum, where `c` is
/// the pair amplitude in `N exp(½ c a*a*) Ω`.
pub fn minimum(omega: f64, lambda: f64) -> Result<Vec<f64>, String> {
    let r = minimize_quietly(&squeezed(omega, lambda), Mode::BoseEven)?;
    let c = r.map.chart().map_err(|e| e.to_string())?.c[(0, 0)];
    Ok(vec![r.energy, r.d_spectrum[0], c.re, c.im])
}

/// Rows of `[Δ, energy, exact ground energy, E_1, E_2]` for Δ from 0 to
/// `delta_max`. The exact value comes from diagonalizing in Fock space.
pub fn pairing_sweep(eps: f64, delta_max: f64, samples: usize) -> Result<Vec<f64>, String> {
    let samples = samples.max(2);
    let mut out = Vec::with_capacity(5 * samples);
    for k in 0..samples {
        let delta = delta_max * k as f64 / (samples - 1) as f64;
        let h = pairing(eps, delta);
        let r = minimize_quietly(&h, Mode::FermiEven)?;
        let exact = oracle_compare(&h, &r.map, 1, 1e-10, DEFAULT_DIM_CAP).map_err(|e| e.to_string())?;
        out.extend([delta, r.energy, exact.ground_energy, r.d_spectrum[0], r.d_spectrum[1]]);
    }
    Ok(out)
}

/// Photon-number distribution `|⟨n|ψ⟩|²`, `n = 0..=max_n`, of the optimal
/// squeezed vacuum.
pub fn occupations(omega: f64, lambda: f64, max_n: usize) -> Result<Vec<f64>, String> {
    let r = minimize_quietly(&squeezed(omega, lambda), Mode::BoseEven)?;
    let v = adaptive_state_vector(&r.map, max_n.max(1), 1e-10, DEFAULT_DIM_CAP).map_err(|e| e.to_string())?;
    let amps = &v.vector.amplitudes;
    Ok((0..=max_n).map(|n| amps.get(n).map_or(0.0, |z| z.norm_sqr())).collect())
}

#[wasm_bindgen]
pub fn squeezed_landscape(omega: f64, lambda: f64, radius: f64, samples: usize) -> Vec<f64> {
    landscape(omega, lambda, radius, samples)
}

#[wasm_bindgen]
pub fn squeezed_minimum(omega: f64, lambda: f64) -> Result<Vec<f64>, JsValue> {
    minimum(omega, lambda).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn bcs_sweep(eps: f64, delta_max: f64, samples: usize) -> Result<Vec<f64>, JsValue> {
    pairing_sweep(eps, delta_max, samples).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn squeezed_occupations(omega: f64, lambda: f64, max_n: usize) -> Result<Vec<f64>, JsValue> {
    occupations(omega, lambda, max_n).map_err(|e| JsValue::from_str(&e))
}
