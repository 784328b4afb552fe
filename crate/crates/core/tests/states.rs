use lissajous_core::states::*;
use lissajous_core::Complex64;
use num_bigint::BigUint;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn binomial(n: u64, k: u64) -> f64 {
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc.to_string().parse().unwrap()
}

fn max_diff(a: &LissajousState, b: &LissajousState) -> f64 {
    assert_eq!(a.coeffs.len(), b.coeffs.len());
    a.coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(x, y)| {
            assert_eq!((x.nx, x.ny), (y.nx, y.ny));
            (x.c - y.c).norm()
        })
        .fold(0.0, f64::max)
}

fn zeta_samples() -> Vec<Complex64> {
    (0..12)
        .map(|k| {
            let r = [0.3, 0.8, 1.0, 1.7][k % 4];
            Complex64::from_polar(r, 2.0 * PI * k as f64 / 12.0 + 0.1)
        })
        .collect()
}

// The raw projection carries the global phase of β^{qN}; the builders factor
// it out.
fn strip_phase(mut s: LissajousState, amp: &AmplitudePair, q: u32) -> LissajousState {
    let phase = Complex64::from_polar(1.0, -amp.phi * (q * s.n) as f64);
    for f in &mut s.coeffs {
        f.c *= phase;
    }
    s
}

#[test]
fn isotropic_matches_binomial_form() {
    for n in 1..=30u32 {
        for z in zeta_samples() {
            let s = build_isotropic(n, z).unwrap();
            let pre = (1.0 + z.norm_sqr()).powf(-0.5 * n as f64);
            for f in &s.coeffs {
                let want = z.powi(f.nx as i32) * (pre * binomial(n as u64, f.nx as u64).sqrt());
                assert!((f.c - want).norm() < 1e-12, "n={n} z={z} K={}", f.nx);
            }
        }
    }
}

#[test]
fn isotropic_matches_projection_oracle() {
    for n in [1u32, 5, 12, 20, 30] {
        for z in zeta_samples() {
            // ζ = α/β with α = |ζ|, β = e^{−i arg ζ}.
            let amp = AmplitudePair::new(z.norm(), 1.0, -z.arg()).unwrap();
            let direct = build_isotropic(n, z).unwrap();
            let oracle = strip_phase(project_coherent_oracle(&amp, n, 1, 1, 1e-30).unwrap(), &amp, 1);
            assert!(max_diff(&direct, &oracle) < 1e-12, "n={n} z={z}");
        }
    }
}

#[test]
fn anisotropic_matches_projection_oracle() {
    for &(p, q) in &[(1u32, 2u32), (2, 3), (3, 2), (2, 4), (3, 6)] {
        for &(alpha, beta, phi) in &[(1.0, 1.0, 0.0), (1.0, 1.0, PI / 6.0), (0.7, 1.3, 1.0)] {
            let amp = AmplitudePair::new(alpha, beta, phi).unwrap();
            let direct = build_from_amplitudes(&amp, 10, OscillatorParams::new(p, q, 1.0).unwrap()).unwrap();
            let oracle = strip_phase(project_coherent_oracle(&amp, 10, p, q, 1e-30).unwrap(), &amp, q);
            assert!(max_diff(&direct, &oracle) < 1e-12, "{p}:{q} {phi}");
        }
    }
}

#[test]
fn anisotropic_builder_reduces_to_binomial() {
    for z in zeta_samples() {
        let a = build_anisotropic(15, 1, 1, z).unwrap();
        let b = build_isotropic(15, z).unwrap();
        assert!(max_diff(&a, &b) < 1e-13);
    }
}

#[test]
fn kets_and_energy() {
    let s = build_anisotropic(4, 2, 3, c(1.0, 0.0)).unwrap();
    let kets: Vec<_> = s.coeffs.iter().map(|f| (f.nx, f.ny)).collect();
    assert_eq!(kets, vec![(0, 12), (2, 9), (4, 6), (6, 3), (8, 0)]);
    // ω_x n_x + ω_y n_y with ω_x = 3, ω_y = 2 is 24 on every ket, plus (3+2)/2.
    assert!((s.energy - 26.5).abs() < 1e-12);
    assert!((s.norm_sqr() - 1.0).abs() < 1e-14);
}

#[test]
fn extreme_ratios_stay_finite() {
    for r in [1e-8, 1e8] {
        let s = build_anisotropic(20, 2, 3, c(r, 0.0)).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(s.coeffs.iter().all(|f| f.c.re.is_finite() && f.c.im.is_finite()));
    }
    let s = build_isotropic(5, Ratio::Infinite).unwrap();
    assert_eq!(s.coeffs[5].c, c(1.0, 0.0));
    assert!(build_isotropic(5, Ratio::Undefined).is_err());
}

#[test]
fn superposition_identities() {
    let cases = [(2u32, 1u32, 1u32), (3, 1, 1), (4, 1, 1), (2, 1, 2), (3, 1, 2), (2, 2, 3)];
    for &(m, p0, q0) in &cases {
        for n in 1..=10u32 {
            for &phi in &[0.0, PI / 7.0, 1.0] {
                let amp = AmplitudePair::new(1.0, 1.0, phi).unwrap();
                let direct =
                    build_from_amplitudes(&amp, n, OscillatorParams::new(m * p0, m * q0, 1.0).unwrap()).unwrap();
                let hh = higher_harmonic_decomposition(n, m, p0, q0, &amp).unwrap();
                assert_eq!(hh.terms.len(), m as usize);
                let (rebuilt, leakage) = hh.reconstruct().unwrap();
                assert!(leakage < 1e-12, "leak {leakage}");
                assert!(max_diff(&direct, &rebuilt) < 1e-12, "m={m} {p0}:{q0} n={n}");
            }
        }
    }
}

#[test]
fn higher_harmonic_rejects_m_below_two() {
    let amp = AmplitudePair::new(1.0, 1.0, 0.0).unwrap();
    assert!(higher_harmonic_decomposition(5, 1, 1, 1, &amp).is_err());
}

#[test]
fn bloch_and_angular_momentum_views_agree() {
    for n in [1u32, 2, 7, 20] {
        for &(theta, phi) in &[(0.3, 0.0), (PI / 2.0, PI / 2.0), (2.5, -1.2)] {
            let s = su2_from_bloch(n, theta, phi).unwrap();
            let z = Complex64::from_polar((theta / 2.0).tan(), -phi);
            let direct = su2_angular(HalfInt::from_twice(n as i64), z).unwrap();
            let mapped = fock_to_angular(&s).unwrap();
            assert_eq!(mapped.j, direct.j);
            for ((ma, ca), (mb, cb)) in mapped.coeffs.iter().zip(&direct.coeffs) {
                assert_eq!(ma, mb);
                assert!((ca - cb).norm() < 1e-12);
            }
            let back = angular_to_fock(&mapped, 1.0, Provenance::Su2Bloch).unwrap();
            assert!(max_diff(&back, &s) < 1e-15);
        }
    }
    assert!(fock_to_angular(&build_anisotropic(3, 1, 2, c(1.0, 0.0)).unwrap()).is_err());
}

#[test]
fn global_phase_only_rotates_coefficients() {
    let s = build_anisotropic(6, 1, 2, c(0.5, 0.5)).unwrap();
    let t = s.with_global_phase(1.3);
    for (a, b) in s.coeffs.iter().zip(&t.coeffs) {
        assert!((a.c * Complex64::from_polar(1.0, 1.3) - b.c).norm() < 1e-15);
    }
}

#[test]
fn parameters_are_validated() {
    assert!(OscillatorParams::new(0, 1, 1.0).is_err());
    assert!(OscillatorParams::new(1, 1, -1.0).is_err());
    assert!(AmplitudePair::new(-1.0, 1.0, 0.0).is_err());
    let p = OscillatorParams::new(4, 6, 1.0).unwrap();
    assert_eq!((p.p0, p.q0, p.m), (2, 3, 2));
    assert!(!p.is_fundamental());
}
