//! Ohmic harmonic-oscillator bath and its half-sided correlation transform.
//!
//! `Γ(B) = ∫₀^∞ dτ e^{2iBτ} C(τ)` with
//! `C(τ) = ∫₀^Ω dω J(ω) [coth(ω/2kT) cos ωτ − i sin ωτ]`. The real part has a
//! closed form; the imaginary part is a principal-value integral that is
//! evaluated by quadrature with an antisymmetrized window around the pole.
//! Units: energies and frequencies in GHz (ħ = 1, k absorbed into kT).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    /// Dimensionless coupling strength.
    pub lambda: f64,
    /// Spectral cutoff Ω (GHz).
    pub omega_c: f64,
    /// Temperature in energy units (GHz).
    pub kt: f64,
}

impl BathSpec {
    pub fn new(lambda: f64, omega_c: f64, kt: f64) -> Result<Self> {
        let spec = Self { lambda, omega_c, kt };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.omega_c.is_finite() && self.kt.is_finite()) {
            return Err(Error::NonFinite);
        }
        if self.lambda < 0.0 {
            return Err(Error::InvalidInput(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if self.omega_c <= 0.0 {
            return Err(Error::InvalidInput(format!("omega_c must be > 0, got {}", self.omega_c)));
        }
        if self.kt < 0.0 {
            return Err(Error::InvalidInput(format!("kT must be >= 0, got {}", self.kt)));
        }
        Ok(())
    }

    pub fn with_kt(self, kt: f64) -> Self {
        Self { kt, ..self }
    }

    fn key(&self, b: f64) -> [u64; 4] {
        [b.to_bits(), self.lambda.to_bits(), self.omega_c.to_bits(), self.kt.to_bits()]
    }
}

/// `J(ω) = λ ω / (1 + ω²/Ω²)`, odd in ω.
pub fn ohmic_j(omega: f64, bath: &BathSpec) -> f64 {
    let r = omega / bath.omega_c;
    bath.lambda * omega / (1.0 + r * r)
}

pub(crate) fn coth(x: f64) -> f64 {
    if x.abs() > 30.0 {
        x.signum()
    } else {
        1.0 / x.tanh()
    }
}

/// `x coth x`, regular at the origin.
fn x_coth_x(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 3.0
    } else {
        x * coth(x)
    }
}

/// `J(ω) coth(ω / 2kT)` for ω ≥ 0, finite as ω → 0 when kT > 0.
fn j_coth(omega: f64, bath: &BathSpec) -> f64 {
    if bath.kt == 0.0 {
        return ohmic_j(omega, bath);
    }
    let r = omega / bath.omega_c;
    bath.lambda / (1.0 + r * r) * 2.0 * bath.kt * x_coth_x(omega / (2.0 * bath.kt))
}

/// `Re Γ(B) = (π/2) J(2B) (coth(B/kT) + 1)`, including its B → 0 and
/// kT = 0 limits.
pub fn gamma_real(b: f64, bath: &BathSpec) -> f64 {
    let jb = ohmic_j(2.0 * b, bath);
    if bath.kt == 0.0 {
        return if b > 0.0 { PI * jb } else { 0.0 };
    }
    // J(2B)(coth x + 1) = λ/(1+4B²/Ω²) · 2kT · x(coth x + 1) with x = B/kT
    let r = 2.0 * b / bath.omega_c;
    0.5 * PI * bath.lambda / (1.0 + r * r) * 2.0 * bath.kt * x_coth_plus_x(b / bath.kt)
}

/// `x (coth x + 1) = 2x / (1 − e^{−2x})`, without cancellation for x < 0.
fn x_coth_plus_x(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else if x.abs() > 30.0 {
        x * (coth(x) + 1.0)
    } else {
        -2.0 * x / (-2.0 * x).exp_m1()
    }
}

/// Default quadrature accuracy for the principal-value part.
pub fn default_tolerance(bath: &BathSpec) -> Tolerance {
    Tolerance {
        abs: 1e-11 * bath.lambda * bath.omega_c,
        rel: 1e-13,
        max_intervals: 4000,
    }
}

/// `Im Γ(B) = P∫₀^Ω dω J(ω)(2B coth(ω/2kT) + ω)/(4B² − ω²)`.
pub fn gamma_imag(b: f64, bath: &BathSpec, tol: Tolerance) -> Result<f64> {
    if bath.lambda == 0.0 {
        return Ok(0.0);
    }
    let omega_c = bath.omega_c;
    let numerator = |w: f64| 2.0 * b * j_coth(w, bath) + w * ohmic_j(w, bath);
    let s = 2.0 * b.abs();

    if s == 0.0 {
        // N(ω) = ω J(ω), so the integrand reduces to −J(ω)/ω.
        let f = |w: f64| {
            let r = w / omega_c;
            -bath.lambda / (1.0 + r * r)
        };
        return Ok(quad::integrate(f, 0.0, omega_c, tol)?.value);
    }
    if (s - omega_c).abs() <= 1e-12 * omega_c {
        return Err(Error::SingularRate { b, omega_c });
    }
    let f = |w: f64| numerator(w) / ((s - w) * (s + w));
    if s > omega_c {
        return Ok(quad::integrate(f, 0.0, omega_c, tol)?.value);
    }

    let delta = b.abs().min(omega_c - s).min(0.1 * omega_c) / 2.0;
    let h = |w: f64| numerator(w) / (s + w);
    // PV over [s−δ, s+δ] folded onto [0, δ]: the integrand is regular at u = 0.
    let window = |u: f64| (h(s - u) - h(s + u)) / u;
    let piece_tol = Tolerance { abs: tol.abs / 3.0, ..tol };
    let left = quad::integrate(f, 0.0, s - delta, piece_tol)?;
    let mid = quad::integrate(window, 0.0, delta, piece_tol)?;
    let right = quad::integrate(f, s + delta, omega_c, piece_tol)?;
    Ok(left.value + mid.value + right.value)
}

/// Γ(B) without the memo cache, at an explicit quadrature tolerance.
pub fn gamma_uncached(b: f64, bath: &BathSpec, tol: Tolerance) -> Result<Complex64> {
    if !b.is_finite() {
        return Err(Error::NonFinite);
    }
    bath.validate()?;
    Ok(Complex64::new(gamma_real(b, bath), gamma_imag(b, bath, tol)?))
}

fn cache() -> &'static Mutex<HashMap<[u64; 4], Complex64>> {
    static CACHE: OnceLock<Mutex<HashMap<[u64; 4], Complex64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Γ(B), memoized per (B, bath). Safe to call from many threads; a value
/// computed twice by racing workers is identical.
pub fn gamma(b: f64, bath: &BathSpec) -> Result<Complex64> {
    let key = bath.key(b);
    if let Some(v) = cache().lock().expect("gamma cache poisoned").get(&key) {
        return Ok(*v);
    }
    let value = gamma_uncached(b, bath, default_tolerance(bath))?;
    cache().lock().expect("gamma cache poisoned").insert(key, value);
    Ok(value)
}

/// The rate combinations of one field magnitude B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSet {
    pub b: f64,
    /// Γ(B)
    pub gamma_plus: Complex64,
    /// Γ(−B)
    pub gamma_minus: Complex64,
    /// μ₊(B) = Γ(B) + Γ*(B)
    pub mu_plus: Complex64,
    /// μ₋(B) = Γ(B) − Γ*(B)
    pub mu_minus: Complex64,
    /// ξ₊(B) = Γ(−B) + Γ*(B)
    pub xi_plus: Complex64,
    /// ξ₋(B) = Γ(−B) − Γ*(B)
    pub xi_minus: Complex64,
}

pub fn rate_set(b: f64, bath: &BathSpec) -> Result<RateSet> {
    let gp = gamma(b, bath)?;
    let gm = gamma(-b, bath)?;
    Ok(RateSet {
        b,
        gamma_plus: gp,
        gamma_minus: gm,
        mu_plus: gp + gp.conj(),
        mu_minus: gp - gp.conj(),
        xi_plus: gm + gp.conj(),
        xi_minus: gm - gp.conj(),
    })
}

/// μ₊(B) = 2 Re Γ(B), no quadrature needed.
pub fn mu_plus(b: f64, bath: &BathSpec) -> f64 {
    2.0 * gamma_real(b, bath)
}
