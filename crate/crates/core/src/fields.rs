//! Wavefunctions, densities and probability currents on rectangular grids.
//!
//! A state `Σ_K c_K |nx_K, ny_K⟩` is evaluated as the separable sum
//! `Ψ(x, y) = Σ_K c_K ψ_{nx_K}(x; ω_x) ψ_{ny_K}(y; ω_y)` from per-axis tables
//! of oscillator eigenfunctions. Gradients come from the analytic Hermite
//! derivative, so `J = Im[Ψ* ∇Ψ]` carries no finite-difference error.
//!
//! Field arrays are row-major: node `(i, j)` sits at index `j * nx + i`,
//! with `i` running along `x`.

use crate::specialfn::fill_psi_1d;
use crate::states::{HigherHarmonic, LissajousState};
use crate::{Error, Result};
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

/// Minimum node count per axis.
pub const MIN_NODES: usize = 16;

/// Default relative density floor for phase-based analysis.
pub const DEFAULT_DENSITY_FLOOR: f64 = 1e-6;

/// Default node count per axis.
pub const DEFAULT_NODES: usize = 512;

/// Margin, in units of `1/√ω`, added beyond the outermost turning point by
/// [`default_extent`]. Keeps the neglected probability below `1e-9`.
pub const EXTENT_MARGIN: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl FieldGrid {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> Result<Self> {
        if nx < MIN_NODES || ny < MIN_NODES {
            return Err(Error::InvalidGrid("at least 16 nodes per axis are required"));
        }
        if !(x_max > x_min) || !(y_max > y_min) || !(x_max - x_min).is_finite() || !(y_max - y_min).is_finite() {
            return Err(Error::InvalidGrid("extent must be finite with max > min"));
        }
        Ok(Self { x_min, x_max, y_min, y_max, nx, ny })
    }

    /// Grid centered on the origin.
    pub fn symmetric(half_x: f64, half_y: f64, nx: usize, ny: usize) -> Result<Self> {
        Self::new(-half_x, half_x, -half_y, half_y, nx, ny)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_min + j as f64 * self.dy()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny).map(|j| self.y(j)).collect()
    }

    /// Same extent, different node counts.
    pub fn resampled(&self, nx: usize, ny: usize) -> Result<Self> {
        Self::new(self.x_min, self.x_max, self.y_min, self.y_max, nx, ny)
    }

    /// Index of the node lying on coordinate `v` along an axis, if any.
    fn node_on(min: f64, step: f64, n: usize, v: f64) -> Option<usize> {
        let k = libm::round((v - min) / step);
        if k < 0.0 || k >= n as f64 {
            return None;
        }
        (libm::fabs(min + k * step - v) <= 1e-9 * step).then_some(k as usize)
    }
}

/// What to do when a grid is too coarse for the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Resolution {
    /// Fail with [`Error::UnderResolved`].
    #[default]
    Strict,
    /// Evaluate anyway and mark the field as under-resolved.
    Permissive,
}

/// Largest grid spacing that still places two nodes per local wavelength of
/// the eigenfunction `n` at frequency `ω`; the local wavenumber peaks at
/// `√(ω(2n+1))` at the origin.
pub fn nyquist_spacing(n: u32, omega: f64) -> f64 {
    PI / libm::sqrt(omega * (2.0 * n as f64 + 1.0))
}

/// Sampled wavefunction with its derived density and current.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub grid: FieldGrid,
    pub psi: Vec<Complex64>,
    pub grad_x: Vec<Complex64>,
    pub grad_y: Vec<Complex64>,
    pub rho: Vec<f64>,
    pub jx: Vec<f64>,
    pub jy: Vec<f64>,
    /// False when evaluated permissively on a grid below the Nyquist limit.
    pub resolved: bool,
}

impl WaveField {
    /// Fills `ρ = |Ψ|²` and `J = Im[Ψ* ∇Ψ]` from the stored samples.
    pub fn from_parts(
        grid: FieldGrid,
        psi: Vec<Complex64>,
        grad_x: Vec<Complex64>,
        grad_y: Vec<Complex64>,
    ) -> Result<Self> {
        let n = grid.len();
        if psi.len() != n || grad_x.len() != n || grad_y.len() != n {
            return Err(Error::InvalidGrid("sample count does not match grid"));
        }
        let rho = psi.iter().map(|z| z.norm_sqr()).collect();
        let jx = psi.iter().zip(&grad_x).map(|(z, g)| (z.conj() * g).im).collect();
        let jy = psi.iter().zip(&grad_y).map(|(z, g)| (z.conj() * g).im).collect();
        Ok(Self {
            grid,
            psi,
            grad_x,
            grad_y,
            rho,
            jx,
            jy,
            resolved: true,
        })
    }

    pub fn max_rho(&self) -> f64 {
        self.rho.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_current(&self) -> f64 {
        self.jx
            .iter()
            .zip(&self.jy)
            .map(|(a, b)| libm::hypot(*a, *b))
            .fold(0.0, f64::max)
    }

    /// Angular-momentum density `x J_y − y J_x` per node.
    pub fn circulation(&self) -> Vec<f64> {
        let g = &self.grid;
        (0..g.ny)
            .flat_map(|j| (0..g.nx).map(move |i| (i, j)))
            .map(|(i, j)| {
                let k = g.index(i, j);
                g.x(i) * self.jy[k] - g.y(j) * self.jx[k]
            })
            .collect()
    }
}

/// Per-axis eigenfunction tables for one state on one grid. Rows can be
/// filled independently, so callers may evaluate them on any number of
/// workers and still get bitwise-identical fields.
#[derive(Debug, Clone)]
pub struct FieldEvaluator {
    grid: FieldGrid,
    coeffs: Vec<Complex64>,
    /// `x_vals[k][i] = ψ_{nx_k}(x_i)`.
    x_vals: Vec<Vec<f64>>,
    x_ders: Vec<Vec<f64>>,
    y_vals: Vec<Vec<f64>>,
    y_ders: Vec<Vec<f64>>,
    resolved: bool,
}

impl FieldEvaluator {
    pub fn new(state: &LissajousState, grid: FieldGrid, policy: Resolution) -> Result<Self> {
        let terms: Vec<(u32, u32, Complex64)> = state.coeffs.iter().map(|f| (f.nx, f.ny, f.c)).collect();
        Self::from_terms(&terms, state.params.omega_x(), state.params.omega_y(), grid, policy)
    }

    /// Evaluator for an arbitrary expansion `Σ c |nx, ny⟩` in a basis with
    /// axis frequencies `omega_x`, `omega_y`.
    pub fn from_terms(
        terms: &[(u32, u32, Complex64)],
        omega_x: f64,
        omega_y: f64,
        grid: FieldGrid,
        policy: Resolution,
    ) -> Result<Self> {
        let zero = Complex64::new(0.0, 0.0);
        let active: Vec<&(u32, u32, Complex64)> = terms.iter().filter(|t| t.2 != zero).collect();
        let max_nx = active.iter().map(|t| t.0).max().unwrap_or(0);
        let max_ny = active.iter().map(|t| t.1).max().unwrap_or(0);

        let mut resolved = true;
        for (axis, n, omega, spacing) in [('x', max_nx, omega_x, grid.dx()), ('y', max_ny, omega_y, grid.dy())] {
            let limit = nyquist_spacing(n, omega);
            if spacing > limit {
                if policy == Resolution::Strict {
                    return Err(Error::UnderResolved { axis, spacing, limit });
                }
                resolved = false;
            }
        }

        let x_table = axis_table(omega_x, max_nx, &grid.xs())?;
        let y_table = axis_table(omega_y, max_ny, &grid.ys())?;
        let pick = |table: &(Vec<Vec<f64>>, Vec<Vec<f64>>), n: u32| {
            (table.0[n as usize].clone(), table.1[n as usize].clone())
        };
        let mut out = Self {
            grid,
            coeffs: Vec::with_capacity(active.len()),
            x_vals: Vec::with_capacity(active.len()),
            x_ders: Vec::with_capacity(active.len()),
            y_vals: Vec::with_capacity(active.len()),
            y_ders: Vec::with_capacity(active.len()),
            resolved,
        };
        for &&(nx, ny, c) in &active {
            let (xv, xd) = pick(&x_table, nx);
            let (yv, yd) = pick(&y_table, ny);
            out.coeffs.push(c);
            out.x_vals.push(xv);
            out.x_ders.push(xd);
            out.y_vals.push(yv);
            out.y_ders.push(yd);
        }
        Ok(out)
    }

    pub fn grid(&self) -> &FieldGrid {
        &self.grid
    }

    pub fn resolved(&self) -> bool {
        self.resolved
    }

    /// Fills row `j` (fixed `y`) of `Ψ`, `∂Ψ/∂x` and `∂Ψ/∂y`.
    pub fn fill_row(&self, j: usize, psi: &mut [Complex64], gx: &mut [Complex64], gy: &mut [Complex64]) {
        let zero = Complex64::new(0.0, 0.0);
        psi.fill(zero);
        gx.fill(zero);
        gy.fill(zero);
        for (k, &c) in self.coeffs.iter().enumerate() {
            let a = c * self.y_vals[k][j];
            let b = c * self.y_ders[k][j];
            let xv = &self.x_vals[k];
            let xd = &self.x_ders[k];
            for i in 0..psi.len() {
                psi[i] += a * xv[i];
                gx[i] += a * xd[i];
                gy[i] += b * xv[i];
            }
        }
    }

    /// Serial evaluation of the whole grid.
    pub fn evaluate(&self) -> Result<WaveField> {
        let n = self.grid.len();
        let nx = self.grid.nx;
        let zero = Complex64::new(0.0, 0.0);
        let mut psi = alloc::vec![zero; n];
        let mut gx = alloc::vec![zero; n];
        let mut gy = alloc::vec![zero; n];
        for (j, ((p, x), y)) in psi
            .chunks_mut(nx)
            .zip(gx.chunks_mut(nx))
            .zip(gy.chunks_mut(nx))
            .enumerate()
        {
            self.fill_row(j, p, x, y);
        }
        let mut field = WaveField::from_parts(self.grid, psi, gx, gy)?;
        field.resolved = self.resolved;
        Ok(field)
    }
}

/// `(values[n][i], derivs[n][i])` for all `n ≤ n_max` at the given points.
fn axis_table(omega: f64, n_max: u32, points: &[f64]) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let len = n_max as usize + 1;
    let mut values = alloc::vec![alloc::vec![0.0; points.len()]; len];
    let mut derivs = alloc::vec![alloc::vec![0.0; points.len()]; len];
    let mut v = alloc::vec![0.0; len];
    let mut d = alloc::vec![0.0; len];
    for (i, &x) in points.iter().enumerate() {
        fill_psi_1d(omega, x, &mut v, &mut d)?;
        for n in 0..len {
            values[n][i] = v[n];
            derivs[n][i] = d[n];
        }
    }
    Ok((values, derivs))
}

/// Evaluates `Ψ`, its analytic gradient, `ρ` and `J` for `state` on `grid`.
pub fn eval_state(state: &LissajousState, grid: &FieldGrid) -> Result<WaveField> {
    eval_state_with(state, grid, Resolution::Strict)
}

pub fn eval_state_with(state: &LissajousState, grid: &FieldGrid, policy: Resolution) -> Result<WaveField> {
    FieldEvaluator::new(state, *grid, policy)?.evaluate()
}

/// Sum with a fixed pairwise tree, so the result depends only on the input
/// order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

fn trapezoid_weight(k: usize, n: usize, h: f64) -> f64 {
    if k == 0 || k + 1 == n {
        0.5 * h
    } else {
        h
    }
}

/// Two-dimensional trapezoid rule over the full grid.
///
/// # Panics
///
/// Panics if `values` does not have one entry per grid node.
pub fn quadrature(values: &[f64], grid: &FieldGrid) -> f64 {
    assert_eq!(values.len(), grid.len(), "one value per grid node expected");
    let (dx, dy) = (grid.dx(), grid.dy());
    let weighted: Vec<f64> = (0..grid.ny)
        .flat_map(|j| (0..grid.nx).map(move |i| (i, j)))
        .map(|(i, j)| {
            trapezoid_weight(i, grid.nx, dx) * trapezoid_weight(j, grid.ny, dy) * values[grid.index(i, j)]
        })
        .collect();
    pairwise_sum(&weighted)
}

/// Centered grid whose half-width on each axis reaches
/// `(√(2 n_max + 1) + EXTENT_MARGIN) / √ω_axis`, where `n_max` is the largest
/// occupied quantum number on that axis: the outermost classical turning
/// point plus a margin wide enough for the Gaussian and Airy tails.
pub fn default_extent(state: &LissajousState, nx: usize, ny: usize) -> Result<FieldGrid> {
    let (mx, my) = state.max_quanta();
    extent_for(mx, my, state.params.omega_x(), state.params.omega_y(), nx, ny)
}

/// [`default_extent`] for explicit per-axis quantum numbers and frequencies.
pub fn extent_for(max_nx: u32, max_ny: u32, omega_x: f64, omega_y: f64, nx: usize, ny: usize) -> Result<FieldGrid> {
    let half = |n: u32, w: f64| (libm::sqrt(2.0 * n as f64 + 1.0) + EXTENT_MARGIN) / libm::sqrt(w);
    FieldGrid::symmetric(half(max_nx, omega_x), half(max_ny, omega_y), nx, ny)
}

/// Residual of `∇·J = 0` from central differences of the stored current.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceResidual {
    /// `max |∇·J|` over interior nodes.
    pub max_abs: f64,
    /// `max |∂ₓJₓ| + |∂ᵧJᵧ|` over the same nodes, the size of the terms
    /// that have to cancel.
    pub scale: f64,
    /// `max_abs / scale`; zero when the current vanishes.
    pub normalized: f64,
}

fn central_differences(field: &WaveField, mut f: impl FnMut(f64, f64)) {
    let g = &field.grid;
    let (dx, dy) = (g.dx(), g.dy());
    for j in 1..g.ny - 1 {
        for i in 1..g.nx - 1 {
            let djx = (field.jx[g.index(i + 1, j)] - field.jx[g.index(i - 1, j)]) / (2.0 * dx);
            let djy = (field.jy[g.index(i, j + 1)] - field.jy[g.index(i, j - 1)]) / (2.0 * dy);
            f(djx, djy);
        }
    }
}

/// Central-difference divergence at interior nodes, row-major over
/// `(nx − 2) × (ny − 2)`.
pub fn divergence(field: &WaveField) -> Vec<f64> {
    let g = &field.grid;
    let mut out = Vec::with_capacity((g.nx - 2) * (g.ny - 2));
    central_differences(field, |a, b| out.push(a + b));
    out
}

pub fn divergence_residual(field: &WaveField) -> DivergenceResidual {
    let (mut max_abs, mut scale) = (0.0f64, 0.0f64);
    central_differences(field, |a, b| {
        max_abs = max_abs.max(libm::fabs(a + b));
        scale = scale.max(libm::fabs(a) + libm::fabs(b));
    });
    let normalized = if scale > 0.0 { max_abs / scale } else { 0.0 };
    DivergenceResidual { max_abs, scale, normalized }
}

/// Phase singularity localized to one plaquette.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vortex {
    /// Plaquette center.
    pub x: f64,
    pub y: f64,
    /// Net phase winding around the plaquette in units of `2π`,
    /// counter-clockwise positive.
    pub winding: i32,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VortexSet {
    pub vortices: Vec<Vortex>,
    pub positive: usize,
    pub negative: usize,
}

impl VortexSet {
    pub fn len(&self) -> usize {
        self.vortices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vortices.is_empty()
    }

    pub fn total_winding(&self) -> i64 {
        self.vortices.iter().map(|v| v.winding as i64).sum()
    }
}

fn wrap_phase(d: f64) -> f64 {
    let mut d = libm::fmod(d + PI, 2.0 * PI);
    if d < 0.0 {
        d += 2.0 * PI;
    }
    d - PI
}

/// Finds plaquettes whose four corners all carry density above
/// `density_floor · max ρ` and around which `arg Ψ` winds by a nonzero
/// multiple of `2π`.
pub fn detect_vortices(field: &WaveField, density_floor: f64) -> Result<VortexSet> {
    if !(density_floor > 0.0 && density_floor < 1.0) {
        return Err(Error::InvalidParameter {
            what: "density floor",
            value: density_floor,
        });
    }
    let g = &field.grid;
    let cutoff = density_floor * field.max_rho();
    let phase: Vec<f64> = field.psi.iter().map(|z| z.arg()).collect();
    let mut set = VortexSet::default();
    for j in 0..g.ny - 1 {
        for i in 0..g.nx - 1 {
            // Counter-clockwise loop.
            let corners = [g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1), g.index(i, j + 1)];
            if corners.iter().any(|&k| field.rho[k] <= cutoff) {
                continue;
            }
            let total: f64 = (0..4)
                .map(|s| wrap_phase(phase[corners[(s + 1) % 4]] - phase[corners[s]]))
                .sum();
            let winding = libm::round(total / (2.0 * PI)) as i32;
            if winding != 0 {
                if winding > 0 {
                    set.positive += 1;
                } else {
                    set.negative += 1;
                }
                set.vortices.push(Vortex {
                    x: g.x(i) + 0.5 * g.dx(),
                    y: g.y(j) + 0.5 * g.dy(),
                    winding,
                });
            }
        }
    }
    Ok(set)
}

/// Local wavelength `2π / k_max` of the fastest eigenfunction in the state,
/// with `k_max = √(ω (2n + 1))` maximized over both axes. The natural
/// smoothing length for [`detect_circulation_cells`].
pub fn local_wavelength(state: &LissajousState) -> f64 {
    let (mx, my) = state.max_quanta();
    let k = |n: u32, w: f64| libm::sqrt(w * (2.0 * n as f64 + 1.0));
    2.0 * PI / k(mx, state.params.omega_x()).max(k(my, state.params.omega_y()))
}

/// Current below `STATIC_CURRENT · max ρ / h` everywhere counts as no flow.
const STATIC_CURRENT: f64 = 1e-10;

/// Separable Gaussian smoothing with standard deviations `sx`, `sy` in
/// nodes, truncated at four deviations, zero outside the grid.
fn gaussian_smooth(values: &[f64], nx: usize, ny: usize, sx: f64, sy: f64) -> Vec<f64> {
    fn kernel(s: f64) -> Vec<f64> {
        let half = libm::ceil(4.0 * s) as usize;
        let mut k: Vec<f64> = (0..=2 * half)
            .map(|i| {
                let d = i as f64 - half as f64;
                libm::exp(-0.5 * d * d / (s * s))
            })
            .collect();
        let total: f64 = k.iter().sum();
        k.iter_mut().for_each(|v| *v /= total);
        k
    }
    let (kx, ky) = (kernel(sx), kernel(sy));
    let (hx, hy) = (kx.len() / 2, ky.len() / 2);
    let mut tmp = alloc::vec![0.0; values.len()];
    for j in 0..ny {
        let row = &values[j * nx..(j + 1) * nx];
        for i in 0..nx {
            let lo = i.saturating_sub(hx);
            let hi = (i + hx).min(nx - 1);
            tmp[j * nx + i] = (lo..=hi).map(|s| kx[s + hx - i] * row[s]).sum();
        }
    }
    let mut out = alloc::vec![0.0; values.len()];
    for j in 0..ny {
        let lo = j.saturating_sub(hy);
        let hi = (j + hy).min(ny - 1);
        for i in 0..nx {
            out[j * nx + i] = (lo..=hi).map(|s| ky[s + hy - j] * tmp[s * nx + i]).sum();
        }
    }
    out
}

/// Circulation cells of the probability current: centers of the flow after
/// the current has been averaged over `smoothing` (a length, typically
/// [`local_wavelength`]).
///
/// Averaging removes the interference-fringe structure, whose phase
/// singularities come in closely spaced groups of both signs, and leaves
/// the large-scale circulation around the enclosed regions of the
/// underlying Lissajous figure. A cell is a plaquette of positive
/// Poincaré index of the averaged current inside the region where the
/// averaged density exceeds `density_floor · max`, or an enclosed region
/// below that floor around which the averaged current turns with positive
/// index. `winding` is the sense of circulation, counter-clockwise
/// positive.
pub fn detect_circulation_cells(field: &WaveField, density_floor: f64, smoothing: f64) -> Result<VortexSet> {
    if !(density_floor > 0.0 && density_floor < 1.0) {
        return Err(Error::InvalidParameter {
            what: "density floor",
            value: density_floor,
        });
    }
    if !(smoothing > 0.0 && smoothing.is_finite()) {
        return Err(Error::InvalidParameter {
            what: "smoothing length",
            value: smoothing,
        });
    }
    let g = &field.grid;
    let (nx, ny) = (g.nx, g.ny);
    let (dx, dy) = (g.dx(), g.dy());
    let (sx, sy) = (smoothing / dx, smoothing / dy);
    let jx = gaussian_smooth(&field.jx, nx, ny, sx, sy);
    let jy = gaussian_smooth(&field.jy, nx, ny, sx, sy);
    let rho = gaussian_smooth(&field.rho, nx, ny, sx, sy);

    let max_rho = rho.iter().copied().fold(0.0, f64::max);
    let max_j = jx.iter().zip(&jy).map(|(a, b)| libm::hypot(*a, *b)).fold(0.0, f64::max);
    let mut set = VortexSet::default();
    if max_j <= STATIC_CURRENT * max_rho / dx.min(dy) {
        return Ok(set);
    }

    let cutoff = density_floor * max_rho;
    let theta: Vec<f64> = jx.iter().zip(&jy).map(|(a, b)| libm::atan2(*b, *a)).collect();
    let (px, py) = (nx - 1, ny - 1);
    let mut index = alloc::vec![0i32; px * py];
    let mut circulation = alloc::vec![0.0; px * py];
    let mut valid = alloc::vec![false; px * py];
    for j in 0..py {
        for i in 0..px {
            let c = [g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1), g.index(i, j + 1)];
            let turn: f64 = (0..4).map(|s| wrap_phase(theta[c[(s + 1) % 4]] - theta[c[s]])).sum();
            let k = j * px + i;
            index[k] = libm::round(turn / (2.0 * PI)) as i32;
            circulation[k] = 0.5 * dx * (jx[c[0]] + jx[c[1]]) + 0.5 * dy * (jy[c[1]] + jy[c[2]])
                - 0.5 * dx * (jx[c[2]] + jx[c[3]])
                - 0.5 * dy * (jy[c[3]] + jy[c[0]]);
            valid[k] = c.iter().all(|&n| rho[n] > cutoff);
        }
    }

    let sense = |c: f64| if c >= 0.0 { 1 } else { -1 };
    let push = |set: &mut VortexSet, x: f64, y: f64, circ: f64| {
        let winding = sense(circ);
        if winding > 0 {
            set.positive += 1;
        } else {
            set.negative += 1;
        }
        set.vortices.push(Vortex { x, y, winding });
    };

    for j in 0..py {
        for i in 0..px {
            let k = j * px + i;
            if valid[k] && index[k] > 0 {
                push(&mut set, g.x(i) + 0.5 * dx, g.y(j) + 0.5 * dy, circulation[k]);
            }
        }
    }

    // Enclosed low-density regions: the summed index telescopes to the
    // turning of the current along the region's rim, where it is resolved.
    let mut seen = alloc::vec![false; px * py];
    let mut stack = Vec::new();
    for start in 0..px * py {
        if valid[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let (mut total, mut circ, mut count, mut cx, mut cy) = (0i64, 0.0, 0usize, 0.0, 0.0);
        let mut open = false;
        while let Some(k) = stack.pop() {
            let (i, j) = (k % px, k / px);
            total += index[k] as i64;
            circ += circulation[k];
            count += 1;
            cx += g.x(i) + 0.5 * dx;
            cy += g.y(j) + 0.5 * dy;
            open |= i == 0 || j == 0 || i + 1 == px || j + 1 == py;
            let neighbours = [
                (i > 0).then(|| k - 1),
                (i + 1 < px).then(|| k + 1),
                (j > 0).then(|| k - px),
                (j + 1 < py).then(|| k + px),
            ];
            for n in neighbours.into_iter().flatten() {
                if !valid[n] && !seen[n] {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
        if !open && total > 0 {
            let n = count as f64;
            for _ in 0..total {
                push(&mut set, cx / n, cy / n, circ);
            }
        }
    }
    Ok(set)
}

/// Density split of a higher-harmonic superposition into the individual
/// term densities and their interference.
#[derive(Debug, Clone, PartialEq)]
pub struct Interference {
    /// `|w Σ_j Ψ_j|²`.
    pub rho_total: Vec<f64>,
    /// `|w|² Σ_j |Ψ_j|²`.
    pub rho_diagonal: Vec<f64>,
    /// `|w|² Σ_{j≠k} Ψ_j* Ψ_k`.
    pub rho_cross: Vec<f64>,
    /// `(1/m) Σ_j |Ψ_j|²`, the incoherent mixture of the normalized terms.
    pub rho_incoherent: Vec<f64>,
}

pub fn interference_decomposition(hh: &HigherHarmonic, grid: &FieldGrid) -> Result<Interference> {
    interference_from_terms(hh.weight, &hh.terms, grid)
}

pub fn interference_from_terms(weight: Complex64, terms: &[LissajousState], grid: &FieldGrid) -> Result<Interference> {
    if terms.is_empty() {
        return Err(Error::IncompatibleStates);
    }
    let psis: Vec<Vec<Complex64>> = terms
        .iter()
        .map(|t| eval_state_with(t, grid, Resolution::Permissive).map(|f| f.psi))
        .collect::<Result<_>>()?;
    let w2 = weight.norm_sqr();
    let m = terms.len() as f64;
    let n = grid.len();
    let mut out = Interference {
        rho_total: Vec::with_capacity(n),
        rho_diagonal: Vec::with_capacity(n),
        rho_cross: Vec::with_capacity(n),
        rho_incoherent: Vec::with_capacity(n),
    };
    for node in 0..n {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut diag = 0.0;
        let mut cross = 0.0;
        for (a, pa) in psis.iter().enumerate() {
            sum += pa[node];
            diag += pa[node].norm_sqr();
            for pb in &psis[a + 1..] {
                cross += 2.0 * (pa[node].conj() * pb[node]).re;
            }
        }
        out.rho_total.push((weight * sum).norm_sqr());
        out.rho_diagonal.push(w2 * diag);
        out.rho_cross.push(w2 * cross);
        out.rho_incoherent.push(diag / m);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Strict local maxima of `ρ` along the positive half of a coordinate axis,
/// ignoring values at or below `density_floor · max ρ`.
pub fn axis_extrema_count(field: &WaveField, axis: Axis, density_floor: f64) -> Result<usize> {
    let profile = axis_profile(field, axis)?;
    let cutoff = density_floor * field.max_rho();
    let count = profile
        .windows(3)
        .filter(|w| w[1] > cutoff && w[1] > w[0] && w[1] > w[2])
        .count();
    Ok(count)
}

/// `ρ` sampled on the nonnegative half of the chosen axis, starting at the origin.
pub fn axis_profile(field: &WaveField, axis: Axis) -> Result<Vec<f64>> {
    let g = &field.grid;
    let missing = Error::InvalidGrid("coordinate axis does not lie on grid nodes");
    Ok(match axis {
        Axis::X => {
            let j = FieldGrid::node_on(g.y_min, g.dy(), g.ny, 0.0).ok_or(missing)?;
            let i0 = FieldGrid::node_on(g.x_min, g.dx(), g.nx, 0.0).ok_or(Error::InvalidGrid("origin is not a grid node"))?;
            (i0..g.nx).map(|i| field.rho[g.index(i, j)]).collect()
        }
        Axis::Y => {
            let i = FieldGrid::node_on(g.x_min, g.dx(), g.nx, 0.0).ok_or(missing)?;
            let j0 = FieldGrid::node_on(g.y_min, g.dy(), g.ny, 0.0).ok_or(Error::InvalidGrid("origin is not a grid node"))?;
            (j0..g.ny).map(|j| field.rho[g.index(i, j)]).collect()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{build_isotropic, OscillatorParams};

    #[test]
    fn grid_rejects_bad_shapes() {
        assert!(FieldGrid::new(0.0, 1.0, 0.0, 1.0, 15, 16).is_err());
        assert!(FieldGrid::new(1.0, 1.0, 0.0, 1.0, 16, 16).is_err());
        assert!(FieldGrid::new(0.0, f64::INFINITY, 0.0, 1.0, 16, 16).is_err());
        let g = FieldGrid::new(-1.0, 1.0, 0.0, 3.0, 21, 31).unwrap();
        assert!((g.dx() - 0.1).abs() < 1e-15);
        assert!((g.x(20) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quadrature_constant_and_odd() {
        let g = FieldGrid::new(0.0, 1.0, 0.0, 1.0, 33, 17).unwrap();
        assert!((quadrature(&alloc::vec![1.0; g.len()], &g) - 1.0).abs() < 1e-15);
        let g = FieldGrid::symmetric(2.0, 1.0, 64, 40).unwrap();
        let odd: Vec<f64> = (0..g.ny)
            .flat_map(|j| (0..g.nx).map(move |i| (i, j)))
            .map(|(i, j)| g.x(i).powi(3) * (1.0 + g.y(j) * g.y(j)))
            .collect();
        assert!(quadrature(&odd, &g).abs() < 1e-14);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_integers() {
        let v: Vec<f64> = (0..1000).map(|k| k as f64).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
    }

    #[test]
    fn ground_state_peak_and_norm() {
        let s = build_isotropic(0, Complex64::new(0.0, 0.0)).unwrap();
        let grid = default_extent(&s, 129, 129).unwrap();
        let f = eval_state(&s, &grid).unwrap();
        let centre = grid.index(64, 64);
        assert!((f.psi[centre].re - 1.0 / PI.sqrt()).abs() < 1e-15);
        assert!((quadrature(&f.rho, &grid) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn nyquist_guard() {
        let s = build_isotropic(20, Complex64::new(1.0, 0.0)).unwrap();
        let coarse = FieldGrid::symmetric(12.0, 12.0, 20, 20).unwrap();
        assert!(matches!(eval_state(&s, &coarse), Err(Error::UnderResolved { .. })));
        let f = eval_state_with(&s, &coarse, Resolution::Permissive).unwrap();
        assert!(!f.resolved);
    }

    #[test]
    fn default_extent_grows_with_quanta() {
        let mut last = 0.0;
        for n in [0u32, 5, 10, 20, 40] {
            let s = build_isotropic(n, Complex64::new(1.0, 0.0)).unwrap();
            let g = default_extent(&s, 64, 64).unwrap();
            assert!(g.x_max > last);
            last = g.x_max;
        }
        let p = OscillatorParams::new(1, 2, 1.0).unwrap();
        assert_eq!(p.omega_x(), 2.0);
    }

    #[test]
    fn wrap_phase_range() {
        for &d in &[0.0, 3.0, -3.0, 3.5, -3.5, 7.0, -7.0] {
            let w = wrap_phase(d);
            assert!((-PI..PI).contains(&w));
            assert!(((d - w) / (2.0 * PI) - ((d - w) / (2.0 * PI)).round()).abs() < 1e-12);
        }
    }

    #[test]
    fn detect_vortices_rejects_bad_floor() {
        let s = build_isotropic(0, Complex64::new(0.0, 0.0)).unwrap();
        let f = eval_state(&s, &default_extent(&s, 32, 32).unwrap()).unwrap();
        assert!(detect_vortices(&f, 0.0).is_err());
        assert!(detect_vortices(&f, 1.0).is_err());
        assert!(detect_vortices(&f, 1e-6).unwrap().is_empty());
    }

    #[test]
    fn smoothing_preserves_constants_in_the_interior() {
        let (nx, ny) = (40, 30);
        let v = alloc::vec![2.5; nx * ny];
        let out = gaussian_smooth(&v, nx, ny, 2.0, 1.5);
        assert!((out[15 * nx + 20] - 2.5).abs() < 1e-14);
        assert!(out[0] < 2.5);
    }

    #[test]
    fn wavelength_shrinks_with_quanta() {
        let a = local_wavelength(&build_isotropic(5, Complex64::new(1.0, 0.0)).unwrap());
        let b = local_wavelength(&build_isotropic(20, Complex64::new(1.0, 0.0)).unwrap());
        assert!(b < a);
        assert!((a - 2.0 * PI / 11f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn single_ring_is_one_counterclockwise_cell() {
        // β = iα, ζ = −i: a single ring of counter-clockwise flow.
        let s = build_isotropic(8, Complex64::new(0.0, -1.0)).unwrap();
        let g = default_extent(&s, 129, 129).unwrap();
        let f = eval_state(&s, &g).unwrap();
        let cells = detect_circulation_cells(&f, 1e-6, local_wavelength(&s)).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells.positive, 1);
        let v = cells.vortices[0];
        assert!(v.x.abs() < 2.0 * g.dx() && v.y.abs() < 2.0 * g.dy());
        assert!(detect_circulation_cells(&f, 1e-6, 0.0).is_err());
    }

    #[test]
    fn static_state_has_no_cells() {
        let s = build_isotropic(8, Complex64::new(1.0, 0.0)).unwrap();
        let f = eval_state(&s, &default_extent(&s, 129, 129).unwrap()).unwrap();
        assert!(detect_circulation_cells(&f, 1e-6, local_wavelength(&s)).unwrap().is_empty());
    }

    #[test]
    fn divergence_of_rotation_is_small() {
        let s = build_isotropic(4, Complex64::new(0.0, 1.0)).unwrap();
        let f = eval_state(&s, &default_extent(&s, 129, 129).unwrap()).unwrap();
        let d = divergence_residual(&f);
        assert!(d.scale > 0.0);
        assert!(d.normalized < 1e-2);
    }
}
