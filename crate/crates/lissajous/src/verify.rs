//! Self-check suites run by `lissajous verify`.

use crate::parallel;
use lissajous_core::classical::{axis_extrema_count, hausdorff_distance, sample_curve, ClassicalCurve};
use lissajous_core::fields::*;
use lissajous_core::semiclassical::*;
use lissajous_core::states::*;
use lissajous_core::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Parameter sets `(p, q, α, |β|, φ)` of the N = 20 density figures.
pub const FIGURE_CONFIGS: [(u32, u32, f64, f64, f64); 23] = [
    (1, 1, 1.0, 1.0, 0.0),
    (1, 1, 1.0, 1.0, PI / 2.0),
    (1, 1, 1.0, 1.0, PI / 12.0),
    (1, 1, 1.0, 1.0, PI / 8.0),
    (1, 1, 1.0, 1.0, PI / 6.0),
    (1, 1, 1.0, 1.0, PI / 4.0),
    (1, 1, 1.0, 1.0, 5.0 * PI / 12.0),
    (1, 1, 3.732_050_807_568_877, 1.0, 0.0),
    (1, 1, 3.732_050_807_568_877, 1.0, PI / 2.0),
    (1, 2, 1.0, 1.0, 0.0),
    (1, 2, 1.0, 1.0, PI / 8.0),
    (1, 2, 1.0, 1.0, PI / 4.0),
    (2, 3, 1.0, 1.0, 0.0),
    (2, 3, 1.0, 1.0, PI / 12.0),
    (2, 3, 1.0, 1.0, PI / 6.0),
    (2, 2, 1.0, 1.0, 0.0),
    (2, 2, 1.0, 1.0, PI / 2.0),
    (2, 2, 1.0, 1.0, PI / 7.0),
    (3, 3, 1.0, 1.0, 0.0),
    (3, 3, 1.0, 1.0, PI / 6.0),
    (2, 4, 1.0, 1.0, 0.0),
    (2, 4, 1.0, 1.0, PI / 6.0),
    (3, 6, 1.0, 1.0, PI / 8.0),
];

/// Caption vortex counts at N = 20, `(p, q, φ, count)`.
pub const CAPTION_VORTICES: [(u32, u32, f64, usize); 5] = [
    (1, 2, PI / 4.0, 2),
    (2, 3, PI / 6.0, 6),
    (2, 2, PI / 7.0, 4),
    (3, 3, PI / 6.0, 9),
    (2, 4, PI / 6.0, 8),
];

pub const SUITES: [&str; 11] = [
    "identities",
    "normalization",
    "static",
    "vortices",
    "continuity",
    "ehrenfest",
    "interference",
    "localization",
    "classical",
    "semiclassical",
    "all",
];

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check {
        name: name.to_string(),
        passed,
        detail,
    }
}

fn n20(p: u32, q: u32, alpha: f64, beta: f64, phi: f64) -> LissajousState {
    let amp = AmplitudePair::new(alpha, beta, phi).expect("amplitudes");
    build_from_amplitudes(&amp, 20, OscillatorParams::new(p, q, 1.0).expect("params")).expect("state")
}

fn field(state: &LissajousState, n: usize) -> WaveField {
    let g = default_extent(state, n, n).expect("grid");
    parallel::eval_state(state, &g, Resolution::Strict).expect("field")
}

fn phase_free_diff(a: &LissajousState, b: &LissajousState, q: u32, phi: f64) -> f64 {
    let phase = Complex64::from_polar(1.0, -phi * (q * a.n) as f64);
    a.coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(x, y)| (x.c * phase - y.c).norm())
        .fold(0.0, f64::max)
}

pub fn identities() -> Vec<Check> {
    let mut worst_oracle: f64 = 0.0;
    let mut worst_binomial: f64 = 0.0;
    for n in [1u32, 2, 5, 10, 20, 30] {
        for k in 0..6 {
            let z = Complex64::from_polar([0.4, 1.0, 1.6][k % 3], 1.1 * k as f64 - 2.0);
            let iso = build_isotropic(n, z).expect("iso");
            let aniso = build_anisotropic(n, 1, 1, z).expect("aniso");
            let amp = AmplitudePair::new(z.norm(), 1.0, -z.arg()).expect("amp");
            let oracle = project_coherent_oracle(&amp, n, 1, 1, 1e-30).expect("oracle");
            worst_oracle = worst_oracle.max(phase_free_diff(&oracle, &iso, 1, amp.phi));
            worst_binomial = worst_binomial.max(phase_free_diff(&aniso, &iso, 1, 0.0));
        }
    }
    let mut worst_sum: f64 = 0.0;
    for &(m, p0, q0) in &[(2u32, 1u32, 1u32), (3, 1, 1), (4, 1, 1), (2, 1, 2), (3, 1, 2), (2, 2, 3)] {
        for n in 1..=10 {
            let amp = AmplitudePair::new(1.0, 1.0, PI / 7.0).expect("amp");
            let direct =
                build_from_amplitudes(&amp, n, OscillatorParams::new(m * p0, m * q0, 1.0).expect("params")).expect("state");
            let (rebuilt, leak) = higher_harmonic_decomposition(n, m, p0, q0, &amp)
                .and_then(|h| h.reconstruct())
                .expect("harmonic");
            worst_sum = worst_sum.max(leak).max(phase_free_diff(&direct, &rebuilt, 1, 0.0));
        }
    }
    vec![
        check("su2 vs projection", worst_oracle <= 1e-12, format!("max |Δc| = {worst_oracle:.2e}")),
        check("binomial reduction", worst_binomial <= 1e-12, format!("max |Δc| = {worst_binomial:.2e}")),
        check("roots-of-unity sum", worst_sum <= 1e-12, format!("max |Δc| = {worst_sum:.2e}")),
    ]
}

pub fn normalization() -> Vec<Check> {
    let worst = FIGURE_CONFIGS
        .iter()
        .map(|&(p, q, a, b, phi)| {
            let s = n20(p, q, a, b, phi);
            let f = field(&s, 512);
            (quadrature(&f.rho, &f.grid) - 1.0).abs()
        })
        .fold(0.0, f64::max);
    vec![check(
        "figure normalization",
        worst <= 1e-6,
        format!("{} configs, max |∫ρ − 1| = {worst:.2e}", FIGURE_CONFIGS.len()),
    )]
}

pub fn static_limits() -> Vec<Check> {
    let cases = [(1, 1, 0.0), (1, 2, 0.0), (2, 3, 0.0), (2, 2, 0.0), (2, 2, PI / 2.0), (3, 3, 0.0), (2, 4, 0.0)];
    let worst = cases
        .iter()
        .map(|&(p, q, phi)| {
            let f = field(&n20(p, q, 1.0, 1.0, phi), 256);
            f.max_current() / f.max_rho()
        })
        .fold(0.0, f64::max);
    vec![check("static currents", worst <= 1e-12, format!("max |J| / max ρ = {worst:.2e}"))]
}

pub fn vortices() -> Vec<Check> {
    let mut out = Vec::new();
    for &(p, q, phi, want) in &CAPTION_VORTICES {
        let s = n20(p, q, 1.0, 1.0, phi);
        let f = field(&s, 512);
        let cells = detect_circulation_cells(&f, DEFAULT_DENSITY_FLOOR, local_wavelength(&s)).expect("cells");
        out.push(check(
            &format!("cells {p}:{q}"),
            cells.len() == want,
            format!("{} cells (+{}/−{}), expected {want}", cells.len(), cells.positive, cells.negative),
        ));
    }
    let f = field(&n20(1, 1, 1.0, 1.0, PI / 2.0), 512);
    let cutoff = 1e-3 * f.max_rho();
    let worst = f
        .circulation()
        .iter()
        .zip(&f.rho)
        .filter(|(_, r)| **r > cutoff)
        .map(|(c, _)| *c)
        .fold(f64::INFINITY, f64::min);
    out.push(check("counter-clockwise ring", worst >= 0.0, format!("min x·Jy − y·Jx = {worst:.3e}")));
    out
}

pub fn continuity() -> Vec<Check> {
    let s = n20(1, 1, 1.0, 1.0, PI / 2.0);
    let coarse = divergence_residual(&field(&s, 256));
    let fine = divergence_residual(&field(&s, 512));
    let ratio = coarse.normalized / fine.normalized;
    vec![
        check("second-order convergence", (3.0..=5.0).contains(&ratio), format!("ratio {ratio:.3}")),
        check("residual at 512²", fine.normalized <= 1e-3, format!("{:.3e}", fine.normalized)),
    ]
}

pub fn ehrenfest() -> Vec<Check> {
    let configs = [
        (1, 1, 0.0),
        (1, 1, PI / 4.0),
        (1, 1, PI / 2.0),
        (1, 2, 0.0),
        (1, 2, PI / 8.0),
        (1, 2, PI / 4.0),
    ];
    let worst = configs
        .iter()
        .map(|&(p, q, phi)| {
            let amp = AmplitudePair::new(1.0, 1.0, phi).expect("amp");
            let cfg = SemiclassicalConfig::uniform(amp, OscillatorParams::new(p, q, 1.0).expect("params"), DEFAULT_TIMES);
            let g = semiclassical_extent(&cfg, 9.0, 160, 160).expect("grid");
            ehrenfest_report(&cfg, DEFAULT_TIMES, &g).expect("trajectory")
        })
        .fold(0.0, f64::max);
    vec![check("centroid on classical path", worst <= 1e-6, format!("sup deviation {worst:.2e}"))]
}

/// Coherent-minus-incoherent gap of the 2:2 state with α = β = 1, as a
/// fraction of max ρ, measured on the default 512² grid.
pub const PINNED_INTERFERENCE_GAP: f64 = 0.4997;

pub fn interference() -> Vec<Check> {
    let amp = AmplitudePair::new(1.0, 1.0, 0.0).expect("amp");
    let hh = higher_harmonic_decomposition(20, 2, 1, 1, &amp).expect("harmonic");
    let s = build_from_amplitudes(&amp, 20, hh.params).expect("state");
    let g = default_extent(&s, 512, 512).expect("grid");
    let parts = interference_decomposition(&hh, &g).expect("split");
    let split = (0..g.len())
        .map(|k| (parts.rho_total[k] - parts.rho_diagonal[k] - parts.rho_cross[k]).abs())
        .fold(0.0, f64::max);
    let max = parts.rho_total.iter().copied().fold(0.0, f64::max);
    let gap = (0..g.len())
        .map(|k| (parts.rho_total[k] - parts.rho_incoherent[k]).abs())
        .fold(0.0, f64::max)
        / max;
    vec![
        check("density split", split <= 1e-14, format!("max residual {split:.2e}")),
        check(
            "coherence visible",
            gap >= 0.05 && (gap - PINNED_INTERFERENCE_GAP).abs() <= 2e-3,
            format!("gap {gap:.5} of max ρ (pinned {PINNED_INTERFERENCE_GAP})"),
        ),
    ]
}

/// Probability within `|r − √N| ≤ half_width` for the (1,1,π/2) ring.
pub fn ring_tube_mass(n: u32, half_width: f64) -> f64 {
    let amp = AmplitudePair::new(1.0, 1.0, PI / 2.0).expect("amp");
    let s = build_from_amplitudes(&amp, n, OscillatorParams::isotropic(1.0).expect("params")).expect("state");
    let f = field(&s, 512);
    let g = f.grid;
    let r0 = (n as f64).sqrt();
    let masked: Vec<f64> = (0..g.len())
        .map(|k| {
            let r = g.x(k % g.nx).hypot(g.y(k / g.nx));
            if (r - r0).abs() <= half_width {
                f.rho[k]
            } else {
                0.0
            }
        })
        .collect();
    quadrature(&masked, &g)
}

/// Tube half-width `3/√(N_ref ω₀)` with the reference `N_ref = 20`.
pub fn tube_half_width() -> f64 {
    3.0 / 20f64.sqrt()
}

pub fn localization() -> Vec<Check> {
    let masses: Vec<f64> = [5, 10, 20, 40].iter().map(|&n| ring_tube_mass(n, tube_half_width())).collect();
    let rising = masses.windows(2).all(|w| w[1] > w[0]);
    vec![check("tube mass increases with N", rising, format!("{masses:.5?}"))]
}

pub fn classical() -> Vec<Check> {
    let mut ok = true;
    let mut seen = Vec::new();
    for &(q, p) in &[(1u32, 1u32), (2, 1), (3, 2)] {
        let e = axis_extrema_count(&ClassicalCurve::unit(q as f64, p as f64, 0.3), 20_000).expect("extrema");
        ok &= (e.on_x, e.on_y) == (q as usize, p as usize);
        seen.push(format!("{p}:{q}→({},{})", e.on_x, e.on_y));
    }
    let path = |c: ClassicalCurve| -> Vec<(f64, f64)> {
        sample_curve(&c, 0.0, c.period().expect("closed"), 4001)
            .into_iter()
            .map(|(_, x, y)| (x, y))
            .collect()
    };
    let d = hausdorff_distance(
        &path(ClassicalCurve::unit(3.0, 2.0, PI / 6.0)),
        &path(ClassicalCurve::unit(6.0, 4.0, PI / 6.0)),
    );
    vec![
        check("axis extrema", ok, seen.join(" ")),
        check("4:6 traces 2:3", d <= 1e-9, format!("Hausdorff {d:.2e}")),
    ]
}

pub fn semiclassical() -> Vec<Check> {
    let amp = AmplitudePair::new(1.0, 1.0, PI / 4.0).expect("amp");
    let cfg = SemiclassicalConfig::uniform(amp, OscillatorParams::new(1, 2, 1.0).expect("params"), 8);
    let g = semiclassical_extent(&cfg, 6.0, 128, 128).expect("grid");
    let mut worst: f64 = 0.0;
    let mut printed_norm: f64 = 0.0;
    for &t in &cfg.times {
        let a = eval_semiclassical(&cfg, t, &g).expect("series");
        let b = eval_semiclassical_closed(&cfg, t, &g).expect("closed");
        let scale = a.psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
        worst = worst.max(a.psi.iter().zip(&b.psi).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale);
        let printed = eval_printed_closed(&cfg, t, &g).expect("printed");
        let rho: Vec<f64> = printed.iter().map(|z| z.norm_sqr()).collect();
        printed_norm = printed_norm.max((quadrature(&rho, &g) - 1.0).abs());
    }
    vec![
        check("closed form vs series", worst <= 1e-10, format!("max relative {worst:.2e}")),
        check(
            "printed constants deviate",
            printed_norm > 0.1,
            format!("printed form has |∫ρ − 1| up to {printed_norm:.3}"),
        ),
    ]
}

/// Runs one named suite, or every suite for `"all"`.
pub fn run_suite(name: &str) -> Option<Vec<Check>> {
    let out = match name {
        "identities" => identities(),
        "normalization" => normalization(),
        "static" => static_limits(),
        "vortices" => vortices(),
        "continuity" => continuity(),
        "ehrenfest" => ehrenfest(),
        "interference" => interference(),
        "localization" => localization(),
        "classical" => classical(),
        "semiclassical" => semiclassical(),
        "all" => SUITES[..SUITES.len() - 1]
            .iter()
            .flat_map(|s| run_suite(s).unwrap_or_default())
            .collect(),
        _ => return None,
    };
    Some(out)
}
