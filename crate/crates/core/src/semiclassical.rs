//! Time-dependent two-mode coherent states.
//!
//! `|α e^{−iω_x t}⟩ ⊗ |β e^{−iω_y t}⟩` in configuration space, with the
//! zero-point phase `e^{−i(ω_x+ω_y)t/2}` dropped. The reference evaluation is
//! the truncated Fock series; [`eval_semiclassical_closed`] uses the
//! generating-function form
//!
//! ```text
//! Ψ(x, y, t) = (ω_x ω_y)^{1/4} / √π · e^{−(|α|² + |β|²)/2}
//!            · exp(−ω_x x²/2 + √(2ω_x) a x − a²/2)
//!            · exp(−ω_y y²/2 + √(2ω_y) b y − b²/2),
//! a = α e^{−iω_x t},  b = β e^{−iω_y t}.
//! ```
//!
//! Both factorize into a function of `x` times a function of `y`.

use crate::classical::ClassicalCurve;
use crate::fields::{quadrature, FieldGrid, WaveField};
use crate::specialfn::fill_psi_1d;
use crate::states::{coherent_amplitudes, coherent_cutoff, AmplitudePair, OscillatorParams};
use crate::{Error, Result};
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

/// Default number of snapshot times per period.
pub const DEFAULT_TIMES: usize = 32;

/// Series terms with `|c_n| / max |c| ` below this are ignored by the
/// resolution guard.
const NEGLIGIBLE_TERM: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SemiclassicalConfig {
    pub amp: AmplitudePair,
    pub params: OscillatorParams,
    pub times: Vec<f64>,
}

impl SemiclassicalConfig {
    pub fn new(amp: AmplitudePair, params: OscillatorParams, times: Vec<f64>) -> Result<Self> {
        if let Some(&t) = times.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter { what: "time", value: t });
        }
        Ok(Self { amp, params, times })
    }

    /// `n` uniform times over one period `2π/ω₀`, the endpoint excluded.
    pub fn uniform(amp: AmplitudePair, params: OscillatorParams, n: usize) -> Self {
        let period = 2.0 * PI / params.omega0;
        let times = (0..n).map(|k| period * k as f64 / n as f64).collect();
        Self { amp, params, times }
    }

    /// Complex amplitudes `(α e^{−iω_x t}, β e^{−iω_y t})`.
    pub fn amplitudes_at(&self, t: f64) -> (Complex64, Complex64) {
        let a = self.amp.alpha() * Complex64::from_polar(1.0, -self.params.omega_x() * t);
        let b = self.amp.beta() * Complex64::from_polar(1.0, -self.params.omega_y() * t);
        (a, b)
    }

    /// Classical path followed by the centroid.
    pub fn classical_curve(&self) -> ClassicalCurve {
        ClassicalCurve {
            a: libm::sqrt(2.0 / self.params.omega_x()) * self.amp.alpha,
            b: libm::sqrt(2.0 / self.params.omega_y()) * self.amp.beta_abs,
            q: self.params.q as f64,
            p: self.params.p as f64,
            phi: self.amp.phi,
            omega0: self.params.omega0,
        }
    }
}

/// One axis factor `Σ_n c_n ψ_n(x)` and its derivative at every grid point.
fn series_axis(a: Complex64, omega: f64, points: &[f64], axis: char) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let n_max = coherent_cutoff(a.norm());
    let (coeffs, _) = coherent_amplitudes(a, n_max);

    let largest = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let significant = coeffs
        .iter()
        .rposition(|c| c.norm() > NEGLIGIBLE_TERM * largest)
        .unwrap_or(0);
    if points.len() > 1 {
        let spacing = libm::fabs(points[1] - points[0]);
        let limit = crate::fields::nyquist_spacing(significant as u32, omega);
        if spacing > limit {
            return Err(Error::UnderResolved { axis, spacing, limit });
        }
    }

    let mut v = alloc::vec![0.0; n_max + 1];
    let mut d = alloc::vec![0.0; n_max + 1];
    let mut values = Vec::with_capacity(points.len());
    let mut derivs = Vec::with_capacity(points.len());
    for &x in points {
        fill_psi_1d(omega, x, &mut v, &mut d)?;
        let mut f = Complex64::new(0.0, 0.0);
        let mut g = Complex64::new(0.0, 0.0);
        for (n, c) in coeffs.iter().enumerate() {
            f += c * v[n];
            g += c * d[n];
        }
        values.push(f);
        derivs.push(g);
    }
    Ok((values, derivs))
}

/// One axis factor of the closed form and its derivative.
fn closed_axis(a: Complex64, omega: f64, points: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let root = libm::sqrt(2.0 * omega);
    let norm = libm::sqrt(libm::sqrt(omega / PI));
    let mut values = Vec::with_capacity(points.len());
    let mut derivs = Vec::with_capacity(points.len());
    for &x in points {
        let exponent = -0.5 * a.norm_sqr() - 0.5 * omega * x * x + root * x * a - 0.5 * a * a;
        let f = exponent.exp() * norm;
        values.push(f);
        derivs.push(f * (root * a - omega * x));
    }
    (values, derivs)
}

fn assemble(
    grid: &FieldGrid,
    (fx, dfx): (Vec<Complex64>, Vec<Complex64>),
    (fy, dfy): (Vec<Complex64>, Vec<Complex64>),
) -> Result<WaveField> {
    let n = grid.len();
    let mut psi = Vec::with_capacity(n);
    let mut gx = Vec::with_capacity(n);
    let mut gy = Vec::with_capacity(n);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            psi.push(fx[i] * fy[j]);
            gx.push(dfx[i] * fy[j]);
            gy.push(fx[i] * dfy[j]);
        }
    }
    WaveField::from_parts(*grid, psi, gx, gy)
}

/// Coherent-state wavefunction at time `t` from the truncated Fock series.
pub fn eval_semiclassical(cfg: &SemiclassicalConfig, t: f64, grid: &FieldGrid) -> Result<WaveField> {
    let (a, b) = cfg.amplitudes_at(t);
    let x = series_axis(a, cfg.params.omega_x(), &grid.xs(), 'x')?;
    let y = series_axis(b, cfg.params.omega_y(), &grid.ys(), 'y')?;
    assemble(grid, x, y)
}

/// Coherent-state wavefunction at time `t` from the generating-function
/// closed form.
pub fn eval_semiclassical_closed(cfg: &SemiclassicalConfig, t: f64, grid: &FieldGrid) -> Result<WaveField> {
    let (a, b) = cfg.amplitudes_at(t);
    let x = closed_axis(a, cfg.params.omega_x(), &grid.xs());
    let y = closed_axis(b, cfg.params.omega_y(), &grid.ys());
    assemble(grid, x, y)
}

/// The closed form with the constants as commonly misprinted: `exp(−(a² + b²))`
/// in place of `exp(−(a² + b²)/2)` and prefactor `√(ω_x ω_y)/π` in place of
/// `(ω_x ω_y)^{1/4}/√π`. Only useful for quantifying that discrepancy.
pub fn eval_printed_closed(cfg: &SemiclassicalConfig, t: f64, grid: &FieldGrid) -> Result<Vec<Complex64>> {
    let (a, b) = cfg.amplitudes_at(t);
    let (wx, wy) = (cfg.params.omega_x(), cfg.params.omega_y());
    let pre = libm::sqrt(wx * wy) / PI * libm::exp(-0.5 * (a.norm_sqr() + b.norm_sqr()));
    let mut out = Vec::with_capacity(grid.len());
    for j in 0..grid.ny {
        let y = grid.y(j);
        for i in 0..grid.nx {
            let x = grid.x(i);
            let e = -0.5 * (wx * x * x + wy * y * y) + libm::sqrt(2.0 * wx) * x * a
                + libm::sqrt(2.0 * wy) * y * b
                - (a * a + b * b);
            out.push(e.exp() * pre);
        }
    }
    Ok(out)
}

/// Extent covering the whole orbit of the centroid plus Gaussian tails of
/// `margin` widths `1/√ω` on each side.
pub fn semiclassical_extent(cfg: &SemiclassicalConfig, margin: f64, nx: usize, ny: usize) -> Result<FieldGrid> {
    let curve = cfg.classical_curve();
    let hx = curve.a + margin / libm::sqrt(cfg.params.omega_x());
    let hy = curve.b + margin / libm::sqrt(cfg.params.omega_y());
    FieldGrid::symmetric(hx, hy, nx, ny)
}

/// `(⟨x⟩, ⟨y⟩)` by trapezoid quadrature of `x ρ` and `y ρ`.
pub fn centroid(field: &WaveField) -> (f64, f64) {
    let g = &field.grid;
    let mut xr = Vec::with_capacity(g.len());
    let mut yr = Vec::with_capacity(g.len());
    for j in 0..g.ny {
        for i in 0..g.nx {
            let r = field.rho[g.index(i, j)];
            xr.push(g.x(i) * r);
            yr.push(g.y(j) * r);
        }
    }
    (quadrature(&xr, g), quadrature(&yr, g))
}

/// One row of an Ehrenfest comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub x_mean: f64,
    pub y_mean: f64,
    pub x_classical: f64,
    pub y_classical: f64,
    /// Integrated density, a check on the grid extent.
    pub norm: f64,
}

impl TrajectoryPoint {
    pub fn deviation(&self) -> f64 {
        libm::hypot(self.x_mean - self.x_classical, self.y_mean - self.y_classical)
    }
}

/// Centroid and classical position at each configured time.
pub fn trajectory(cfg: &SemiclassicalConfig, grid: &FieldGrid) -> Result<Vec<TrajectoryPoint>> {
    let curve = cfg.classical_curve();
    cfg.times
        .iter()
        .map(|&t| {
            let field = eval_semiclassical(cfg, t, grid)?;
            let (x_mean, y_mean) = centroid(&field);
            let (x_classical, y_classical) = curve.point(t);
            Ok(TrajectoryPoint {
                t,
                x_mean,
                y_mean,
                x_classical,
                y_classical,
                norm: quadrature(&field.rho, grid),
            })
        })
        .collect()
}

/// Largest centroid distance from the classical trajectory over `n_times`
/// uniform times in one period.
pub fn ehrenfest_report(cfg: &SemiclassicalConfig, n_times: usize, grid: &FieldGrid) -> Result<f64> {
    if n_times < 8 {
        return Err(Error::InvalidIndex {
            what: "number of times",
            value: n_times as i64,
        });
    }
    let sampled = SemiclassicalConfig::uniform(cfg.amp, cfg.params, n_times);
    Ok(trajectory(&sampled, grid)?
        .iter()
        .map(TrajectoryPoint::deviation)
        .fold(0.0, f64::max))
}
