//! Coefficient vectors of quantum Lissajous states.
//!
//! A state with parameters `(N, p, q)` lives in the degenerate subspace
//! spanned by the `N + 1` Fock kets `|pK, q(N−K)⟩`, `K = 0..=N`, all with
//! energy `ω₀(Npq + (q+p)/2)`. Coefficients are always stored in ascending
//! `K`; every downstream module relies on that ordering.
//!
//! Projecting the two-mode coherent state `|α, β⟩` onto such a subspace
//! gives, after normalization,
//!
//! ```text
//! c_K = N_{N,p,q} [(qN)! / ((pK)! (q(N−K))!)]^(1/2) ξ^K,   ξ = α^p / β^q
//! ```
//!
//! which reduces to the SU(2) coherent state with `ζ = α/β` for `p = q = 1`.
//! All weights are assembled in log space and shifted by their maximum
//! before exponentiation: at `N = 20, q = 6` the raw factorials overflow.

use crate::classical::gcd;
use crate::specialfn::{ln_binomial, log_sum_exp, log_weight};
use crate::{Error, Result};
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use num_complex::Complex64;

/// Frequency ratio of the oscillator, `ω_x = q ω₀`, `ω_y = p ω₀`, with the
/// coprime reduction `p = m p₀`, `q = m q₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    pub p: u32,
    pub q: u32,
    pub omega0: f64,
    pub p0: u32,
    pub q0: u32,
    pub m: u32,
}

impl OscillatorParams {
    pub fn new(p: u32, q: u32, omega0: f64) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidIndex { what: "p", value: 0 });
        }
        if q == 0 {
            return Err(Error::InvalidIndex { what: "q", value: 0 });
        }
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(Error::InvalidParameter {
                what: "omega0",
                value: omega0,
            });
        }
        let m = gcd(p as u64, q as u64) as u32;
        Ok(Self {
            p,
            q,
            omega0,
            p0: p / m,
            q0: q / m,
            m,
        })
    }

    pub fn isotropic(omega0: f64) -> Result<Self> {
        Self::new(1, 1, omega0)
    }

    pub fn omega_x(&self) -> f64 {
        self.q as f64 * self.omega0
    }

    pub fn omega_y(&self) -> f64 {
        self.p as f64 * self.omega0
    }

    pub fn is_fundamental(&self) -> bool {
        self.m == 1
    }

    /// Parameters of the fundamental states a higher harmonic splits into:
    /// `(p₀, q₀)` at base frequency `m ω₀`.
    pub fn fundamental(&self) -> Self {
        Self {
            p: self.p0,
            q: self.q0,
            omega0: self.omega0 * self.m as f64,
            p0: self.p0,
            q0: self.q0,
            m: 1,
        }
    }
}

/// Amplitudes of the two-mode coherent state before projection:
/// `α` real and nonnegative, `β = |β| e^{iφ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePair {
    pub alpha: f64,
    pub beta_abs: f64,
    pub phi: f64,
}

impl AmplitudePair {
    pub fn new(alpha: f64, beta_abs: f64, phi: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter {
                what: "alpha",
                value: alpha,
            });
        }
        if !(beta_abs >= 0.0 && beta_abs.is_finite()) {
            return Err(Error::InvalidParameter {
                what: "|beta|",
                value: beta_abs,
            });
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParameter { what: "phi", value: phi });
        }
        Ok(Self { alpha, beta_abs, phi })
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.alpha, 0.0)
    }

    pub fn beta(&self) -> Complex64 {
        Complex64::from_polar(self.beta_abs, self.phi)
    }

    /// `ζ = α/β = (|α|/|β|) e^{−iφ}`.
    pub fn zeta(&self) -> Ratio {
        self.xi(1, 1)
    }

    /// `ξ_{pq} = α^p / β^q = (|α|^p/|β|^q) e^{−iqφ}`.
    pub fn xi(&self, p: u32, q: u32) -> Ratio {
        if self.beta_abs == 0.0 {
            return if self.alpha == 0.0 {
                Ratio::Undefined
            } else {
                Ratio::Infinite
            };
        }
        if self.alpha == 0.0 {
            return Ratio::Finite(Complex64::new(0.0, 0.0));
        }
        let ln_mag = p as f64 * libm::log(self.alpha) - q as f64 * libm::log(self.beta_abs);
        Ratio::from_log_polar(ln_mag, -(q as f64) * self.phi)
    }
}

/// Amplitude ratio `ζ` or `ξ` of a projected state. `Infinite` is the
/// `β → 0` limit, realized as the single ket `K = N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Finite(Complex64),
    Infinite,
    /// Both amplitudes vanish; no state can be built.
    Undefined,
}

impl Ratio {
    /// `e^{ln_mag + i·arg}`, staying finite-or-infinite without NaNs.
    pub fn from_log_polar(ln_mag: f64, arg: f64) -> Self {
        let mag = libm::exp(ln_mag);
        if mag.is_infinite() {
            Ratio::Infinite
        } else {
            Ratio::Finite(Complex64::from_polar(mag, arg))
        }
    }

    /// Multiplies a finite ratio by `e^{i·delta}`.
    pub fn rotate(self, delta: f64) -> Self {
        match self {
            Ratio::Finite(z) => Ratio::Finite(z * Complex64::from_polar(1.0, delta)),
            other => other,
        }
    }
}

impl From<Complex64> for Ratio {
    fn from(z: Complex64) -> Self {
        if z.re.is_infinite() || z.im.is_infinite() {
            Ratio::Infinite
        } else {
            Ratio::Finite(z)
        }
    }
}

/// How a state was constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    IsoFundamental,
    AnisoFundamental,
    HigherHarmonic,
    Oracle,
    Su2Bloch,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::IsoFundamental => "iso-fundamental",
            Provenance::AnisoFundamental => "aniso-fundamental",
            Provenance::HigherHarmonic => "higher-harmonic",
            Provenance::Oracle => "oracle",
            Provenance::Su2Bloch => "su2-bloch",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "iso-fundamental" => Provenance::IsoFundamental,
            "aniso-fundamental" => Provenance::AnisoFundamental,
            "higher-harmonic" => Provenance::HigherHarmonic,
            "oracle" => Provenance::Oracle,
            "su2-bloch" => Provenance::Su2Bloch,
            _ => return None,
        })
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Amplitude of one Fock ket `|nx, ny⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockCoefficient {
    pub nx: u32,
    pub ny: u32,
    pub c: Complex64,
}

/// Normalized state in the degenerate subspace `(N, p, q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LissajousState {
    pub params: OscillatorParams,
    pub n: u32,
    /// `N + 1` entries in ascending `K`, ket `|pK, q(N−K)⟩`.
    pub coeffs: Vec<FockCoefficient>,
    pub energy: f64,
    pub provenance: Provenance,
}

impl LissajousState {
    /// Assembles a state from raw amplitudes in ascending `K`, normalizing them.
    pub fn from_amplitudes(
        params: OscillatorParams,
        n: u32,
        amplitudes: &[Complex64],
        provenance: Provenance,
    ) -> Result<Self> {
        if amplitudes.len() != n as usize + 1 {
            return Err(Error::InvalidIndex {
                what: "coefficient count",
                value: amplitudes.len() as i64,
            });
        }
        let scale = amplitudes.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::EmptyProjection);
        }
        let norm = libm::sqrt(amplitudes.iter().map(|c| (c / scale).norm_sqr()).sum::<f64>()) * scale;
        let coeffs = amplitudes
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let (nx, ny) = ket(&params, n, k as u32);
                FockCoefficient { nx, ny, c: c / norm }
            })
            .collect();
        Ok(Self {
            params,
            n,
            coeffs,
            energy: state_energy(n, params.p, params.q, params.omega0),
            provenance,
        })
    }

    pub fn amplitudes(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|f| f.c).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|f| f.c.norm_sqr()).sum()
    }

    /// Largest occupied quantum number on each axis.
    pub fn max_quanta(&self) -> (u32, u32) {
        self.coeffs
            .iter()
            .filter(|f| f.c != Complex64::new(0.0, 0.0))
            .fold((0, 0), |(mx, my), f| (mx.max(f.nx), my.max(f.ny)))
    }

    /// Same state times a global phase `e^{iθ}`.
    pub fn with_global_phase(&self, theta: f64) -> Self {
        let w = Complex64::from_polar(1.0, theta);
        let mut out = self.clone();
        for f in &mut out.coeffs {
            f.c *= w;
        }
        out
    }
}

/// Ket `|pK, q(N−K)⟩`.
pub fn ket(params: &OscillatorParams, n: u32, k: u32) -> (u32, u32) {
    (params.p * k, params.q * (n - k))
}

/// `ω₀ (N p q + (q + p)/2)`.
pub fn state_energy(n: u32, p: u32, q: u32, omega0: f64) -> f64 {
    omega0 * (n as f64 * p as f64 * q as f64 + 0.5 * (q as f64 + p as f64))
}

/// Unnormalized log magnitudes `½ ln w_K + K ln|ξ|` for a finite nonzero ratio.
fn log_magnitudes(n: u32, p: u32, q: u32, ln_abs: f64) -> Result<Vec<f64>> {
    (0..=n)
        .map(|k| Ok(0.5 * log_weight(n, k, p, q)? + k as f64 * ln_abs))
        .collect()
}

/// `ln N_{N,p,q} = −½ ln Σ_L w_L |ξ|^{2L}` for a finite ratio.
pub fn log_norm_constant(n: u32, p: u32, q: u32, ratio: Ratio) -> Result<f64> {
    match ratio {
        Ratio::Finite(xi) => {
            if xi.norm() == 0.0 {
                return Ok(-0.5 * log_weight(n, 0, p, q)?);
            }
            let lm = log_magnitudes(n, p, q, libm::log(xi.norm()))?;
            let doubled: Vec<f64> = lm.iter().map(|l| 2.0 * l).collect();
            Ok(-0.5 * log_sum_exp(&doubled))
        }
        Ratio::Infinite => Ok(f64::NEG_INFINITY),
        Ratio::Undefined => Err(Error::EmptyProjection),
    }
}

/// Normalized coefficients `c_K ∝ √w_K ξ^K`, `K = 0..=N`.
fn projected_coefficients(n: u32, p: u32, q: u32, ratio: Ratio) -> Result<Vec<Complex64>> {
    let zero = Complex64::new(0.0, 0.0);
    let mut out = alloc::vec![zero; n as usize + 1];
    match ratio {
        Ratio::Undefined => return Err(Error::EmptyProjection),
        Ratio::Infinite => out[n as usize] = Complex64::new(1.0, 0.0),
        Ratio::Finite(xi) if xi.norm() == 0.0 => out[0] = Complex64::new(1.0, 0.0),
        Ratio::Finite(xi) => {
            let lm = log_magnitudes(n, p, q, libm::log(xi.norm()))?;
            let doubled: Vec<f64> = lm.iter().map(|l| 2.0 * l).collect();
            let ln_norm = 0.5 * log_sum_exp(&doubled);
            let arg = xi.arg();
            for (k, (slot, l)) in out.iter_mut().zip(&lm).enumerate() {
                *slot = Complex64::from_polar(libm::exp(l - ln_norm), k as f64 * arg);
            }
        }
    }
    Ok(out)
}

/// Fundamental isotropic state, the SU(2) coherent state
/// `(1+|ζ|²)^(−N/2) Σ_K C(N,K)^(1/2) ζ^K |K, N−K⟩`.
pub fn build_isotropic(n: u32, zeta: impl Into<Ratio>) -> Result<LissajousState> {
    build_isotropic_at(n, zeta, 1.0)
}

/// [`build_isotropic`] at base frequency `omega0`.
pub fn build_isotropic_at(n: u32, zeta: impl Into<Ratio>, omega0: f64) -> Result<LissajousState> {
    let params = OscillatorParams::isotropic(omega0)?;
    let zeta = zeta.into();
    let zero = Complex64::new(0.0, 0.0);
    let amps = match zeta {
        Ratio::Undefined => return Err(Error::EmptyProjection),
        Ratio::Infinite => {
            let mut v = alloc::vec![zero; n as usize + 1];
            v[n as usize] = Complex64::new(1.0, 0.0);
            v
        }
        Ratio::Finite(z) if z.norm() == 0.0 => {
            let mut v = alloc::vec![zero; n as usize + 1];
            v[0] = Complex64::new(1.0, 0.0);
            v
        }
        Ratio::Finite(z) => {
            // Binomial form, independent of the general factorial weights.
            let r = z.norm();
            let ln_norm = -0.5 * n as f64 * libm::log1p(r * r);
            (0..=n)
                .map(|k| {
                    let ln_mag = ln_norm + 0.5 * ln_binomial(n as u64, k as u64)? + k as f64 * libm::log(r);
                    Ok(Complex64::from_polar(libm::exp(ln_mag), k as f64 * z.arg()))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    LissajousState::from_amplitudes(params, n, &amps, Provenance::IsoFundamental)
}

/// Projected state for arbitrary `(p, q)`; fundamental when coprime.
pub fn build_anisotropic(n: u32, p: u32, q: u32, xi: impl Into<Ratio>) -> Result<LissajousState> {
    build_anisotropic_at(n, OscillatorParams::new(p, q, 1.0)?, xi)
}

/// [`build_anisotropic`] with explicit oscillator parameters.
pub fn build_anisotropic_at(
    n: u32,
    params: OscillatorParams,
    xi: impl Into<Ratio>,
) -> Result<LissajousState> {
    let amps = projected_coefficients(n, params.p, params.q, xi.into())?;
    let provenance = if !params.is_fundamental() {
        Provenance::HigherHarmonic
    } else if params.p == 1 && params.q == 1 {
        Provenance::IsoFundamental
    } else {
        Provenance::AnisoFundamental
    };
    LissajousState::from_amplitudes(params, n, &amps, provenance)
}

/// Projects the coherent state `|α, β⟩` onto subspace `(N, p, q)` with the
/// closed-form builders.
pub fn build_from_amplitudes(
    amp: &AmplitudePair,
    n: u32,
    params: OscillatorParams,
) -> Result<LissajousState> {
    build_anisotropic_at(n, params, amp.xi(params.p, params.q))
}

/// A higher-harmonic state split into `m` fundamental states.
#[derive(Debug, Clone, PartialEq)]
pub struct HigherHarmonic {
    /// Parameters of the composite state, `(m p₀, m q₀)` at `ω₀`.
    pub params: OscillatorParams,
    pub n: u32,
    /// `(1/m) N_{N,p,q} / N_{mN,p₀,q₀}`.
    pub weight: Complex64,
    /// Fundamental states `|ξ₀ e^{−i2πn/m}, mN, p₀, q₀⟩` at base frequency `m ω₀`.
    pub terms: Vec<LissajousState>,
}

impl HigherHarmonic {
    /// `weight · Σ terms` over the `mN + 1` kets of the fundamental subspace.
    pub fn weighted_sum(&self) -> Vec<FockCoefficient> {
        let mut out = self.terms[0].coeffs.clone();
        for f in &mut out {
            f.c = Complex64::new(0.0, 0.0);
        }
        for term in &self.terms {
            for (acc, f) in out.iter_mut().zip(&term.coeffs) {
                acc.c += f.c;
            }
        }
        for f in &mut out {
            f.c *= self.weight;
        }
        out
    }

    /// Folds the weighted sum back onto the `N + 1` kets of the composite
    /// subspace. Also returns the largest magnitude left on kets outside it,
    /// which the roots-of-unity cancellation should drive to zero.
    pub fn reconstruct(&self) -> Result<(LissajousState, f64)> {
        let m = self.params.m as usize;
        let sum = self.weighted_sum();
        let mut leakage: f64 = 0.0;
        let mut amps = Vec::with_capacity(self.n as usize + 1);
        for (k, f) in sum.iter().enumerate() {
            if k % m == 0 {
                amps.push(f.c);
            } else {
                leakage = leakage.max(f.c.norm());
            }
        }
        let mut state =
            LissajousState::from_amplitudes(self.params, self.n, &amps, Provenance::HigherHarmonic)?;
        // Keep the amplitudes exactly as summed; from_amplitudes only rescales
        // by a norm that is 1 up to rounding.
        for (f, c) in state.coeffs.iter_mut().zip(&amps) {
            f.c = *c;
        }
        Ok((state, leakage))
    }
}

/// Splits the `(m p₀, m q₀)` state built from `amp` into `m` fundamental
/// `(p₀, q₀)` states with `mN` quanta whose amplitudes differ by the
/// `m`-th roots of unity.
pub fn higher_harmonic_decomposition(
    n: u32,
    m: u32,
    p0: u32,
    q0: u32,
    amp: &AmplitudePair,
) -> Result<HigherHarmonic> {
    higher_harmonic_decomposition_at(n, m, p0, q0, amp, 1.0)
}

pub fn higher_harmonic_decomposition_at(
    n: u32,
    m: u32,
    p0: u32,
    q0: u32,
    amp: &AmplitudePair,
    omega0: f64,
) -> Result<HigherHarmonic> {
    if m < 2 {
        return Err(Error::InvalidIndex {
            what: "harmonic order m",
            value: m as i64,
        });
    }
    if p0 == 0 || q0 == 0 || gcd(p0 as u64, q0 as u64) != 1 {
        return Err(Error::NotCoprime { p0, q0 });
    }
    let params = OscillatorParams::new(m * p0, m * q0, omega0)?;
    let fundamental = params.fundamental();
    let mn = m * n;
    let xi0 = amp.xi(p0, q0);

    let weight = match xi0 {
        Ratio::Undefined => return Err(Error::EmptyProjection),
        // Every term collapses onto |p₀mN, 0⟩ with unit phase.
        Ratio::Infinite => 1.0 / m as f64,
        Ratio::Finite(z) => {
            let xi = amp.xi(params.p, params.q);
            let xi = match xi {
                Ratio::Finite(_) => xi,
                // |ξ₀|^m overflowed while |ξ₀| did not; rebuild from ξ₀.
                _ => Ratio::from_log_polar(m as f64 * libm::log(z.norm()), m as f64 * z.arg()),
            };
            let ln_w = log_norm_constant(n, params.p, params.q, xi)?
                - log_norm_constant(mn, p0, q0, xi0)?
                - libm::log(m as f64);
            libm::exp(ln_w)
        }
    };

    let terms = (0..m)
        .map(|j| {
            let ratio = xi0.rotate(-2.0 * PI * j as f64 / m as f64);
            let mut state = build_anisotropic_at(mn, fundamental, ratio)?;
            state.provenance = if p0 == 1 && q0 == 1 {
                Provenance::IsoFundamental
            } else {
                Provenance::AnisoFundamental
            };
            Ok(state)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(HigherHarmonic {
        params,
        n,
        weight: Complex64::new(weight, 0.0),
        terms,
    })
}

/// Per-mode cutoff `⌈|a|² + 12|a| + 30⌉` of the coherent-state series.
pub fn coherent_cutoff(abs_amp: f64) -> usize {
    libm::ceil(abs_amp * abs_amp + 12.0 * abs_amp + 30.0) as usize
}

/// Single-mode coherent amplitudes `e^{−|a|²/2} aⁿ/√n!` for `n ≤ n_max`,
/// with the exact Poisson mass beyond `n_max` summed term by term.
pub fn coherent_amplitudes(a: Complex64, n_max: usize) -> (Vec<Complex64>, f64) {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut c = Complex64::new(libm::exp(-0.5 * a.norm_sqr()), 0.0);
    out.push(c);
    for n in 1..=n_max {
        c = c * a / libm::sqrt(n as f64);
        out.push(c);
    }
    // Neglected mass Σ_{n > n_max} |c_n|², terms decay monotonically once n > |a|².
    let mut tail = 0.0;
    let mut term = c.norm_sqr();
    let r2 = a.norm_sqr();
    let mut n = n_max;
    loop {
        n += 1;
        term *= r2 / n as f64;
        tail += term;
        if term <= tail * 1e-17 || term == 0.0 || (n > 4 * n_max + 100) {
            break;
        }
    }
    (out, tail)
}

/// Brute-force projection: builds the full truncated two-mode coherent
/// coefficient box `αⁿ βᵐ / √(n! m!)`, keeps the entries `(pK, q(N−K))` and
/// renormalizes. Shares no code with the closed-form builders.
pub fn project_coherent_oracle(
    amp: &AmplitudePair,
    n: u32,
    p: u32,
    q: u32,
    tail_tol: f64,
) -> Result<LissajousState> {
    if !(tail_tol > 0.0) {
        return Err(Error::InvalidParameter {
            what: "tail tolerance",
            value: tail_tol,
        });
    }
    let params = OscillatorParams::new(p, q, 1.0)?;
    let series = |a: Complex64, needed: usize| -> Result<Vec<Complex64>> {
        let mut n_max = coherent_cutoff(a.norm()).max(needed);
        loop {
            let (c, tail) = coherent_amplitudes(a, n_max);
            if tail < tail_tol {
                return Ok(c);
            }
            if n_max > 100_000 {
                return Err(Error::InvalidParameter {
                    what: "coherent amplitude (tail tolerance unreachable)",
                    value: a.norm(),
                });
            }
            n_max *= 2;
        }
    };
    let xs = series(amp.alpha(), (p * n) as usize)?;
    let ys = series(amp.beta(), (q * n) as usize)?;

    let boxed: Vec<Vec<Complex64>> = xs.iter().map(|&cx| ys.iter().map(|&cy| cx * cy).collect()).collect();
    let selected: Vec<Complex64> = (0..=n)
        .map(|k| {
            let (nx, ny) = ket(&params, n, k);
            boxed[nx as usize][ny as usize]
        })
        .collect();
    if selected.iter().all(|c| c.norm() == 0.0) {
        return Err(Error::EmptyProjection);
    }
    LissajousState::from_amplitudes(params, n, &selected, Provenance::Oracle)
}

/// Isotropic state at Bloch-sphere polar angle `θ` (from the south pole)
/// and azimuth `φ`: `ζ = tan(θ/2) e^{−iφ}`; `θ = π` gives `|N, 0⟩`.
pub fn su2_from_bloch(n: u32, theta: f64, phi: f64) -> Result<LissajousState> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::InvalidParameter {
            what: "polar angle",
            value: theta,
        });
    }
    let zeta = if theta == PI {
        Ratio::Infinite
    } else {
        Ratio::Finite(Complex64::from_polar(libm::tan(0.5 * theta), -phi))
    };
    let mut state = build_isotropic(n, zeta)?;
    state.provenance = Provenance::Su2Bloch;
    Ok(state)
}

/// Half-integer stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(pub i64);

impl HalfInt {
    pub fn from_twice(twice: i64) -> Self {
        HalfInt(twice)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// State in the `|J, M⟩` basis, `M` ascending from `−J` to `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularMomentumState {
    pub j: HalfInt,
    pub coeffs: Vec<(HalfInt, Complex64)>,
}

/// Relabels an isotropic state with `J = N/2`, `M = K − J`.
pub fn fock_to_angular(state: &LissajousState) -> Result<AngularMomentumState> {
    let (p, q) = (state.params.p, state.params.q);
    if p != 1 || q != 1 {
        return Err(Error::NotIsotropic { p, q });
    }
    let n = state.n as i64;
    Ok(AngularMomentumState {
        j: HalfInt(n),
        coeffs: state
            .coeffs
            .iter()
            .map(|f| (HalfInt(2 * f.nx as i64 - n), f.c))
            .collect(),
    })
}

/// Inverse of [`fock_to_angular`]: `N = 2J`, `K = J + M`.
pub fn angular_to_fock(
    state: &AngularMomentumState,
    omega0: f64,
    provenance: Provenance,
) -> Result<LissajousState> {
    let n2 = state.j.twice();
    if n2 < 0 || state.coeffs.len() as i64 != n2 + 1 {
        return Err(Error::InvalidIndex {
            what: "2J",
            value: n2,
        });
    }
    let n = n2 as u32;
    let params = OscillatorParams::isotropic(omega0)?;
    let mut coeffs = Vec::with_capacity(state.coeffs.len());
    for (idx, &(mm, c)) in state.coeffs.iter().enumerate() {
        let k2 = n2 + mm.twice();
        if k2 != 2 * idx as i64 {
            return Err(Error::InvalidIndex {
                what: "2M",
                value: mm.twice(),
            });
        }
        let k = (k2 / 2) as u32;
        coeffs.push(FockCoefficient { nx: k, ny: n - k, c });
    }
    Ok(LissajousState {
        params,
        n,
        coeffs,
        energy: state_energy(n, 1, 1, omega0),
        provenance,
    })
}

/// SU(2) coherent state written directly in the angular-momentum basis,
/// `(1+|ζ|²)^(−J) Σ_M C(2J, J+M)^(1/2) ζ^(J+M) |J, M⟩`.
pub fn su2_angular(j: HalfInt, zeta: Complex64) -> Result<AngularMomentumState> {
    let n2 = j.twice();
    if n2 < 0 {
        return Err(Error::InvalidIndex { what: "2J", value: n2 });
    }
    let r2 = zeta.norm_sqr();
    let prefactor = libm::pow(1.0 + r2, -0.5 * n2 as f64);
    let coeffs = (0..=n2)
        .map(|k| {
            let binom = libm::exp(ln_binomial(n2 as u64, k as u64)?);
            let mm = HalfInt(2 * k - n2);
            Ok((mm, zeta.powi(k as i32) * (prefactor * libm::sqrt(binom))))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AngularMomentumState { j, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn params_reduce_to_coprime() {
        let p = OscillatorParams::new(4, 6, 1.0).unwrap();
        assert_eq!((p.p0, p.q0, p.m), (2, 3, 2));
        assert!(!p.is_fundamental());
        let f = p.fundamental();
        assert_eq!((f.p, f.q, f.omega0), (2, 3, 2.0));
        assert!(OscillatorParams::new(0, 1, 1.0).is_err());
        assert!(OscillatorParams::new(1, 1, 0.0).is_err());
    }

    #[test]
    fn isotropic_n1_equal_weights() {
        let s = build_isotropic(1, c(1.0, 0.0)).unwrap();
        let h = core::f64::consts::FRAC_1_SQRT_2;
        assert_eq!((s.coeffs[0].nx, s.coeffs[0].ny), (0, 1));
        assert_eq!((s.coeffs[1].nx, s.coeffs[1].ny), (1, 0));
        assert!((s.coeffs[0].c - c(h, 0.0)).norm() < 1e-15);
        assert!((s.coeffs[1].c - c(h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_ratio_puts_all_quanta_in_y() {
        let s = build_isotropic(7, c(0.0, 0.0)).unwrap();
        assert_eq!(s.coeffs[0].c, c(1.0, 0.0));
        assert_eq!((s.coeffs[0].nx, s.coeffs[0].ny), (0, 7));
        let s = build_anisotropic(1, 1, 2, c(0.0, 0.0)).unwrap();
        assert_eq!((s.coeffs[0].nx, s.coeffs[0].ny, s.coeffs[0].c), (0, 2, c(1.0, 0.0)));
    }

    #[test]
    fn infinite_ratio_puts_all_quanta_in_x() {
        let s = build_anisotropic(3, 2, 3, Ratio::Infinite).unwrap();
        assert_eq!(s.coeffs[3].c, c(1.0, 0.0));
        assert_eq!((s.coeffs[3].nx, s.coeffs[3].ny), (6, 0));
        let amp = AmplitudePair::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(amp.zeta(), Ratio::Infinite);
        assert_eq!(AmplitudePair::new(0.0, 0.0, 0.0).unwrap().zeta(), Ratio::Undefined);
        assert!(build_isotropic(3, Ratio::Undefined).is_err());
    }

    #[test]
    fn energies() {
        assert_eq!(state_energy(1, 1, 1, 1.0), 2.0);
        assert_eq!(state_energy(20, 2, 3, 1.0), 122.5);
        assert_eq!(state_energy(9, 1, 1, 0.5), 0.5 * 10.0);
    }

    #[test]
    fn degeneracy_constraint_holds() {
        let s = build_anisotropic(6, 2, 3, c(0.3, -0.8)).unwrap();
        assert_eq!(s.coeffs.len(), 7);
        for f in &s.coeffs {
            assert_eq!(3 * f.nx + 2 * f.ny, 6 * 2 * 3);
        }
        assert_eq!(s.provenance, Provenance::AnisoFundamental);
        assert_eq!(build_anisotropic(6, 2, 4, c(1.0, 0.0)).unwrap().provenance, Provenance::HigherHarmonic);
    }

    #[test]
    fn large_factorials_stay_finite() {
        let s = build_anisotropic(20, 1, 6, c(1.0, 0.0)).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-13);
        assert!(s.coeffs.iter().all(|f| f.c.re.is_finite()));
        let s = build_anisotropic(20, 3, 6, c(1e40, 0.0)).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn bloch_poles_and_equator() {
        let s = su2_from_bloch(5, 0.0, 1.3).unwrap();
        assert_eq!(s.coeffs[0].c, c(1.0, 0.0));
        assert_eq!(s.provenance, Provenance::Su2Bloch);
        let s = su2_from_bloch(5, PI, 0.0).unwrap();
        assert_eq!(s.coeffs[5].c, c(1.0, 0.0));
        let s = su2_from_bloch(4, PI / 2.0, 0.0).unwrap();
        let b = build_isotropic(4, c(1.0, 0.0)).unwrap();
        for (x, y) in s.coeffs.iter().zip(&b.coeffs) {
            assert!((x.c - y.c).norm() < 1e-15);
        }
        assert!(su2_from_bloch(4, -0.1, 0.0).is_err());
        assert!(su2_from_bloch(4, 3.2, 0.0).is_err());
    }

    #[test]
    fn angular_index_map() {
        let s = build_isotropic(2, c(0.4, 0.2)).unwrap();
        let a = fock_to_angular(&s).unwrap();
        assert_eq!(a.j, HalfInt(2));
        assert_eq!(a.coeffs[1].0, HalfInt(0));
        assert_eq!(a.coeffs[0].0, HalfInt(-2));
        let back = angular_to_fock(&a, 1.0, s.provenance).unwrap();
        assert_eq!(back, s);
        let odd = fock_to_angular(&build_isotropic(3, c(1.0, 0.0)).unwrap()).unwrap();
        assert_eq!(odd.j.to_string(), "3/2");
        assert!(fock_to_angular(&build_anisotropic(2, 1, 2, c(1.0, 0.0)).unwrap()).is_err());
    }

    #[test]
    fn decomposition_rejects_bad_input() {
        let amp = AmplitudePair::new(1.0, 1.0, 0.0).unwrap();
        assert_eq!(
            higher_harmonic_decomposition(3, 2, 2, 4, &amp),
            Err(Error::NotCoprime { p0: 2, q0: 4 })
        );
        assert!(higher_harmonic_decomposition(3, 1, 1, 1, &amp).is_err());
    }

    #[test]
    fn decomposition_cat_state_ratios() {
        let amp = AmplitudePair::new(1.0, 1.0, 0.0).unwrap();
        let hh = higher_harmonic_decomposition(4, 2, 1, 1, &amp).unwrap();
        assert_eq!(hh.terms.len(), 2);
        // ζ = 1 and ζ = e^{-iπ}: K = 1 amplitudes flip sign between terms.
        let a = hh.terms[0].coeffs[1].c;
        let b = hh.terms[1].coeffs[1].c;
        assert!((a + b).norm() < 1e-15);
        assert_eq!(hh.terms[0].params.omega0, 2.0);
        assert_eq!(hh.terms[0].n, 8);
    }

    #[test]
    fn oracle_trivial_cases() {
        let amp = AmplitudePair::new(1.0, 1.0, 0.0).unwrap();
        let s = project_coherent_oracle(&amp, 1, 1, 1, 1e-14).unwrap();
        let h = core::f64::consts::FRAC_1_SQRT_2;
        assert!((s.coeffs[0].c - c(h, 0.0)).norm() < 1e-15);
        let amp = AmplitudePair::new(0.0, 1.0, 0.4).unwrap();
        let s = project_coherent_oracle(&amp, 3, 2, 3, 1e-14).unwrap();
        assert!((s.coeffs[0].c.norm() - 1.0).abs() < 1e-15);
        assert_eq!((s.coeffs[0].nx, s.coeffs[0].ny), (0, 9));
        assert!(project_coherent_oracle(&amp, 3, 2, 3, 0.0).is_err());
        let vacuum = AmplitudePair::new(0.0, 0.0, 0.0).unwrap();
        assert_eq!(project_coherent_oracle(&vacuum, 2, 1, 1, 1e-12), Err(Error::EmptyProjection));
    }

    #[test]
    fn coherent_tail_is_small_at_default_cutoff() {
        for &a in &[0.0, 0.5, 1.0, 2.0, 4.0] {
            let (_, tail) = coherent_amplitudes(Complex64::new(a, 0.0), coherent_cutoff(a));
            assert!(tail < 1e-16, "a = {a}: tail {tail}");
        }
    }
}
