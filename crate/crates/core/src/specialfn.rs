//! Normalized Hermite functions and log-space factorial weights.
//!
//! Hermite functions are generated by the prenormalized three-term recurrence
//!
//! ```text
//! φ₀(u)     = π^(-1/4) e^(-u²/2)
//! φ_{k+1}(u) = √(2/(k+1)) u φ_k(u) − √(k/(k+1)) φ_{k-1}(u)
//! φₙ'(u)    = √(2n) φ_{n-1}(u) − u φₙ(u)
//! ```
//!
//! so no raw Hermite polynomial (which overflows near `n ≈ 150`) is ever
//! formed. The Gaussian envelope is applied at the end through a running log
//! scale, which keeps the recurrence finite even where `e^(-u²/2)` alone would
//! underflow.

use crate::{Error, Result};
use core::f64::consts::PI;

/// `π^(-1/4)`, the peak of the ground-state Hermite function.
pub const PI_POW_NEG_QUARTER: f64 = 0.751_125_544_464_942_5;

/// Rescale threshold for the running recurrence values.
const RESCALE_ABOVE: f64 = 1e150;

/// One evaluated Hermite function with its derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteEval {
    pub n: u32,
    pub u: f64,
    pub value: f64,
    pub derivative: f64,
}

/// Evaluates `φₙ(u)` and `φₙ'(u)`.
pub fn hermite_function(n: u32, u: f64) -> HermiteEval {
    let len = n as usize + 1;
    let mut values = alloc::vec![0.0; len];
    let mut derivs = alloc::vec![0.0; len];
    fill_hermite(u, &mut values, &mut derivs);
    HermiteEval {
        n,
        u,
        value: values[n as usize],
        derivative: derivs[n as usize],
    }
}

/// Fills `values[k] = φ_k(u)` and `derivs[k] = φ_k'(u)` for every `k` below
/// `values.len()`.
///
/// # Panics
///
/// Panics if the two slices have different lengths.
pub fn fill_hermite(u: f64, values: &mut [f64], derivs: &mut [f64]) {
    assert_eq!(values.len(), derivs.len(), "value/derivative length mismatch");
    let len = values.len();
    if len == 0 {
        return;
    }

    // Run the recurrence on the polynomial part only; the envelope
    // π^(-1/4) e^(-u²/2) is folded into `log_scale` and applied per entry.
    let envelope_log = -0.5 * u * u;
    let mut log_scale = 0.0_f64;
    let mut prev = 0.0_f64;
    let mut curr = 1.0_f64;
    values[0] = finish(curr, log_scale, envelope_log);
    for k in 1..len {
        let kf = (k - 1) as f64;
        let next = libm::sqrt(2.0 / (kf + 1.0)) * u * curr - libm::sqrt(kf / (kf + 1.0)) * prev;
        prev = curr;
        curr = next;
        if libm::fabs(curr) > RESCALE_ABOVE {
            prev /= RESCALE_ABOVE;
            curr /= RESCALE_ABOVE;
            log_scale += libm::log(RESCALE_ABOVE);
        }
        values[k] = finish(curr, log_scale, envelope_log);
    }

    derivs[0] = -u * values[0];
    for k in 1..len {
        derivs[k] = libm::sqrt(2.0 * k as f64) * values[k - 1] - u * values[k];
    }
}

fn finish(scaled: f64, log_scale: f64, envelope_log: f64) -> f64 {
    if scaled == 0.0 {
        return 0.0;
    }
    let log_mag = libm::log(libm::fabs(scaled)) + log_scale + envelope_log;
    libm::copysign(PI_POW_NEG_QUARTER * libm::exp(log_mag), scaled)
}

fn check_omega(omega: f64) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            what: "oscillator frequency",
            value: omega,
        })
    }
}

/// One-dimensional oscillator eigenfunction `ψₙ(x) = ω^(1/4) φₙ(√ω x)`.
pub fn psi_1d(n: u32, omega: f64, x: f64) -> Result<f64> {
    check_omega(omega)?;
    let s = libm::sqrt(omega);
    Ok(libm::sqrt(s) * hermite_function(n, s * x).value)
}

/// Fills oscillator eigenfunctions and their `x`-derivatives for all
/// quantum numbers below `values.len()` at position `x`.
pub fn fill_psi_1d(omega: f64, x: f64, values: &mut [f64], derivs: &mut [f64]) -> Result<()> {
    check_omega(omega)?;
    let s = libm::sqrt(omega);
    fill_hermite(s * x, values, derivs);
    let amp = libm::sqrt(s);
    for v in values.iter_mut() {
        *v *= amp;
    }
    for d in derivs.iter_mut() {
        *d *= amp * s;
    }
    Ok(())
}

/// `ln n!` through the log-gamma function.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        0.0
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::InvalidIndex {
            what: "binomial lower index",
            value: k as i64,
        });
    }
    Ok(ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k))
}

/// `ln[(qN)! / ((pK)! (q(N−K))!)]`, the squared coefficient weight of the
/// ket `|pK, q(N−K)⟩` in an anisotropic projected state.
pub fn log_weight(n: u32, k: u32, p: u32, q: u32) -> Result<f64> {
    if k > n {
        return Err(Error::InvalidIndex {
            what: "subspace index K",
            value: k as i64,
        });
    }
    if p == 0 || q == 0 {
        return Err(Error::InvalidIndex {
            what: "frequency multiplier",
            value: 0,
        });
    }
    let (n, k, p, q) = (n as u64, k as u64, p as u64, q as u64);
    Ok(ln_factorial(q * n) - ln_factorial(p * k) - ln_factorial(q * (n - k)))
}

/// `ln Σᵢ exp(xᵢ)` with the maximum shifted out.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = xs.iter().map(|&x| libm::exp(x - max)).sum();
    max + libm::log(sum)
}

/// Square root of π, exposed for callers assembling Gaussian prefactors.
pub fn sqrt_pi() -> f64 {
    libm::sqrt(PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h4(u: f64) -> f64 {
        16.0 * u.powi(4) - 48.0 * u * u + 12.0
    }

    #[test]
    fn ground_state_peak() {
        let e = hermite_function(0, 0.0);
        assert_eq!(e.value, PI_POW_NEG_QUARTER);
        assert_eq!(e.derivative, 0.0);
        assert!((PI_POW_NEG_QUARTER - PI.powf(-0.25)).abs() < 1e-16);
    }

    #[test]
    fn first_excited_at_origin() {
        let e = hermite_function(1, 0.0);
        assert_eq!(e.value, 0.0);
        assert!((e.derivative - 2f64.sqrt() * PI_POW_NEG_QUARTER).abs() < 1e-15);
    }

    #[test]
    fn matches_closed_form_h4() {
        let u = 1.3;
        // H₄ e^{-u²/2} / √(2⁴ 4! √π)
        let norm = (16.0 * 24.0 * PI.sqrt()).sqrt();
        let expected = h4(u) * (-u * u / 2.0).exp() / norm;
        let got = hermite_function(4, u).value;
        assert!(((got - expected) / expected).abs() <= 1e-13, "{got} vs {expected}");
    }

    #[test]
    fn ground_state_exact_off_origin() {
        for &u in &[-3.0f64, -0.5, 0.25, 2.0, 7.5] {
            let expected = PI_POW_NEG_QUARTER * (-u * u / 2.0).exp();
            let got = hermite_function(0, u).value;
            assert!(((got - expected) / expected).abs() < 1e-15);
        }
    }

    #[test]
    fn finite_at_extremes() {
        for &u in &[-30.0, -12.0, 0.0, 0.1, 29.9, 30.0] {
            let mut v = [0.0; 201];
            let mut d = [0.0; 201];
            fill_hermite(u, &mut v, &mut d);
            assert!(v.iter().chain(d.iter()).all(|x| x.is_finite()));
            assert!(v.iter().all(|x| x.abs() <= 0.76));
        }
    }

    #[test]
    fn far_tail_does_not_underflow_prematurely() {
        // e^{-u²/2} underflows at u = 40, yet φ₂₀₀(40) is representable.
        let e = hermite_function(200, 40.0);
        assert!(e.value.is_finite() && e.value != 0.0);
    }

    #[test]
    fn psi_1d_rejects_bad_frequency() {
        assert!(psi_1d(0, 0.0, 1.0).is_err());
        assert!(psi_1d(0, -1.0, 1.0).is_err());
        assert!(psi_1d(0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn psi_1d_ground_state() {
        assert_eq!(psi_1d(0, 1.0, 0.0).unwrap(), PI_POW_NEG_QUARTER);
    }

    #[test]
    fn log_weight_trivial_cases() {
        assert_eq!(log_weight(7, 0, 1, 1).unwrap(), 0.0);
        assert!((log_weight(2, 1, 1, 1).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(log_weight(3, 4, 1, 1).is_err());
    }

    #[test]
    fn log_sum_exp_shifts_large_values() {
        let v = log_sum_exp(&[1000.0, 1000.0]);
        assert!((v - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }
}
