//! Classical Lissajous curves.
//!
//! Convention, shared with the quantum modules: `q` multiplies the `x`
//! frequency, `p` the `y` frequency, and the phase subtracts in `y`:
//!
//! ```text
//! x(t) = A cos(q ω₀ t)
//! y(t) = B cos(p ω₀ t − φ)
//! ```

use crate::{Error, Result};
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Largest denominator accepted when recognizing a rational frequency ratio.
pub const MAX_DENOMINATOR: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalCurve {
    /// `x` amplitude.
    pub a: f64,
    /// `y` amplitude.
    pub b: f64,
    /// `x` frequency multiplier.
    pub q: f64,
    /// `y` frequency multiplier.
    pub p: f64,
    /// Phase on `y`, radians.
    pub phi: f64,
    pub omega0: f64,
}

impl ClassicalCurve {
    pub fn new(a: f64, b: f64, q: f64, p: f64, phi: f64, omega0: f64) -> Result<Self> {
        for (what, v) in [("x amplitude", a), ("y amplitude", b)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter { what, value: v });
            }
        }
        for (what, v) in [("q", q), ("p", p), ("omega0", omega0)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter { what, value: v });
            }
        }
        Ok(Self { a, b, q, p, phi, omega0 })
    }

    /// Unit amplitudes, unit base frequency.
    pub fn unit(q: f64, p: f64, phi: f64) -> Self {
        Self { a: 1.0, b: 1.0, q, p, phi, omega0: 1.0 }
    }

    pub fn point(&self, t: f64) -> (f64, f64) {
        curve_point(self, t)
    }

    /// Closed-orbit period `2π / (ω₀ gcd(q, p))` for integer multipliers.
    pub fn period(&self) -> Option<f64> {
        let (q, p) = (as_integer(self.q)?, as_integer(self.p)?);
        Some(2.0 * PI / (self.omega0 * gcd(q, p) as f64))
    }
}

pub fn curve_point(curve: &ClassicalCurve, t: f64) -> (f64, f64) {
    let w = curve.omega0 * t;
    (
        curve.a * libm::cos(curve.q * w),
        curve.b * libm::cos(curve.p * w - curve.phi),
    )
}

/// `n` uniformly spaced samples `(t, x, y)` over `[t0, t1]`, endpoints included.
pub fn sample_curve(curve: &ClassicalCurve, t0: f64, t1: f64, n: usize) -> Vec<(f64, f64, f64)> {
    let step = if n > 1 { (t1 - t0) / (n - 1) as f64 } else { 0.0 };
    (0..n)
        .map(|k| {
            let t = t0 + step * k as f64;
            let (x, y) = curve_point(curve, t);
            (t, x, y)
        })
        .collect()
}

/// Residual of the general Lissajous ellipse,
/// `B²x² − 2ABxy cos φ + A²y² − A²B² sin² φ`; zero on the 1:1 curve.
pub fn ellipse_residual(x: f64, y: f64, a: f64, b: f64, phi: f64) -> f64 {
    let s = libm::sin(phi);
    b * b * x * x - 2.0 * a * b * x * y * libm::cos(phi) + a * a * y * y - a * a * b * b * s * s
}

/// Outcome of [`closure_analysis`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Closure {
    pub commensurate: bool,
    pub p0: Option<u64>,
    pub q0: Option<u64>,
    /// Common factor, reported when both multipliers are integers.
    pub m: Option<u64>,
    /// Range of `φ` after which the curve shape repeats, `2π/q₀`.
    pub phase_period: Option<f64>,
}

/// Decides whether `q/p` is rational (within `tol`, denominators up to
/// [`MAX_DENOMINATOR`]) via its continued-fraction convergents.
pub fn closure_analysis(q: f64, p: f64, tol: f64) -> Result<Closure> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::InvalidParameter { what: "q", value: q });
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter { what: "p", value: p });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter { what: "tolerance", value: tol });
    }

    let open = Closure {
        commensurate: false,
        p0: None,
        q0: None,
        m: None,
        phase_period: None,
    };

    let ratio = q / p;
    let Some((num, den)) = rational_approximation(ratio, tol, MAX_DENOMINATOR) else {
        return Ok(open);
    };
    let (q0, p0) = (num, den);
    let m = match (as_integer(q), as_integer(p)) {
        (Some(qi), Some(pi)) => Some(gcd(qi, pi)),
        _ => None,
    };
    Ok(Closure {
        commensurate: true,
        p0: Some(p0),
        q0: Some(q0),
        m,
        phase_period: Some(2.0 * PI / q0 as f64),
    })
}

/// First continued-fraction convergent `h/k` of `x` with `|x − h/k| ≤ tol·max(1, x)`
/// and `k ≤ max_den`.
fn rational_approximation(x: f64, tol: f64, max_den: u64) -> Option<(u64, u64)> {
    let scale = if x > 1.0 { x } else { 1.0 };
    let (mut h_prev, mut h) = (1u64, libm::floor(x) as u64);
    let (mut k_prev, mut k) = (0u64, 1u64);
    let mut frac = x - libm::floor(x);
    loop {
        if libm::fabs(x - h as f64 / k as f64) <= tol * scale {
            return (h > 0).then_some((h, k));
        }
        if frac <= f64::EPSILON {
            return None;
        }
        let inv = 1.0 / frac;
        let a = libm::floor(inv);
        frac = inv - a;
        let a = a as u64;
        let h_next = a.checked_mul(h)?.checked_add(h_prev)?;
        let k_next = a.checked_mul(k)?.checked_add(k_prev)?;
        if k_next > max_den {
            return None;
        }
        (h_prev, h, k_prev, k) = (h, h_next, k, k_next);
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn as_integer(v: f64) -> Option<u64> {
    let r = libm::round(v);
    (r >= 1.0 && libm::fabs(v - r) <= 1e-12 * r).then_some(r as u64)
}

/// Whether the curve is traversed back and forth along an open arc.
///
/// For coprime integer multipliers this happens exactly when `q φ / π` is an
/// integer: the motion is then symmetric under a time reversal about an
/// extremum, so turning points that land on the same spot are met twice per
/// period and count as two extrema.
pub fn retraces(curve: &ClassicalCurve) -> bool {
    let (Some(q), Some(p)) = (as_integer(curve.q), as_integer(curve.p)) else {
        return false;
    };
    let q0 = q / gcd(q, p);
    let k = curve.phi * q0 as f64 / PI;
    libm::fabs(k - libm::round(k)) < 1e-9
}

/// Extrema counts of [`axis_extrema_count`].
#[derive(Debug, Clone, PartialEq)]
pub struct AxisExtrema {
    /// Distinct parameter values per period where `x = +A`.
    pub on_x: usize,
    /// Distinct parameter values per period where `y = +B`.
    pub on_y: usize,
    /// Curve points of the `x` extrema.
    pub x_points: Vec<(f64, f64)>,
    /// Curve points of the `y` extrema.
    pub y_points: Vec<(f64, f64)>,
    /// True when the curve retraces itself, so coincident extrema were kept
    /// as separate counts.
    pub retraced: bool,
}

/// Counts turning points of a closed curve by dense sampling over one period.
///
/// An extremum "on the x-axis" is a parameter value where the curve touches
/// its bounding line `x = A`; likewise `y = B` for the y-axis. Extrema closer
/// than `2π/(1024 q p)` in phase are merged. Coincident points reached at
/// distinct parameters are counted separately.
pub fn axis_extrema_count(curve: &ClassicalCurve, samples: usize) -> Result<AxisExtrema> {
    let (Some(q), Some(p)) = (as_integer(curve.q), as_integer(curve.p)) else {
        return Err(Error::NotCommensurate);
    };
    let needed = 16 * q as usize * p as usize;
    if samples < needed {
        return Err(Error::InvalidIndex {
            what: "sample count",
            value: samples as i64,
        });
    }
    let period = curve.period().ok_or(Error::NotCommensurate)?;
    let dt = period / samples as f64;
    let merge = 2.0 * PI / (1024.0 * (q * p) as f64) / curve.omega0;

    let pts: Vec<(f64, f64)> = (0..samples).map(|k| curve_point(curve, dt * k as f64)).collect();
    let find = |coord: &dyn Fn(&(f64, f64)) -> f64, amp: f64, mult: f64| -> Vec<usize> {
        // Bound on the drop of cos over half a sample step.
        let slack = 0.5 * (mult * curve.omega0 * dt) * (mult * curve.omega0 * dt) * 1.01;
        let threshold = amp * (1.0 - slack);
        let n = pts.len();
        let mut hits: Vec<usize> = (0..n)
            .filter(|&k| {
                let c = coord(&pts[k]);
                let before = coord(&pts[(k + n - 1) % n]);
                let after = coord(&pts[(k + 1) % n]);
                c >= threshold && c >= before && c > after
            })
            .collect();
        hits.dedup_by(|b, a| (*b - *a) as f64 * dt < merge);
        if hits.len() > 1 {
            let first = hits[0] as f64 * dt;
            let last = hits[hits.len() - 1] as f64 * dt;
            if first + period - last < merge {
                hits.pop();
            }
        }
        hits
    };
    let xs = find(&|pt| pt.0, curve.a, q as f64);
    let ys = find(&|pt| pt.1, curve.b, p as f64);
    Ok(AxisExtrema {
        on_x: xs.len(),
        on_y: ys.len(),
        x_points: xs.iter().map(|&k| pts[k]).collect(),
        y_points: ys.iter().map(|&k| pts[k]).collect(),
        retraced: retraces(curve),
    })
}

/// Symmetric Hausdorff distance between two point sets, by brute force.
pub fn hausdorff_distance(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    fn directed(from: &[(f64, f64)], to: &[(f64, f64)]) -> f64 {
        from.iter()
            .map(|&(x, y)| {
                to.iter()
                    .map(|&(u, v)| (x - u) * (x - u) + (y - v) * (y - v))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
    libm::sqrt(directed(a, b).max(directed(b, a)))
}
