use lissajous_core::fields::*;
use lissajous_core::states::*;
use lissajous_core::{Complex64, Error};
use std::f64::consts::PI;

fn state(p: u32, q: u32, phi: f64, n: u32) -> LissajousState {
    let amp = AmplitudePair::new(1.0, 1.0, phi).unwrap();
    build_from_amplitudes(&amp, n, OscillatorParams::new(p, q, 1.0).unwrap()).unwrap()
}

#[test]
fn density_is_nonnegative_and_normalized() {
    for &(p, q, phi) in &[(1, 1, 0.0), (1, 2, PI / 4.0), (2, 3, PI / 6.0)] {
        let s = state(p, q, phi, 10);
        let g = default_extent(&s, 200, 200).unwrap();
        let f = eval_state(&s, &g).unwrap();
        assert!(f.rho.iter().all(|&r| r >= 0.0));
        assert!((quadrature(&f.rho, &g) - 1.0).abs() < 1e-8);
    }
}

#[test]
fn global_phase_leaves_observables_unchanged() {
    let s = state(1, 2, PI / 4.0, 8);
    let t = s.with_global_phase(2.1);
    let g = default_extent(&s, 96, 96).unwrap();
    let (a, b) = (eval_state(&s, &g).unwrap(), eval_state(&t, &g).unwrap());
    for k in 0..g.len() {
        assert!((a.rho[k] - b.rho[k]).abs() <= 1e-14 * a.max_rho());
        assert!((a.jx[k] - b.jx[k]).abs() <= 1e-13 * a.max_current());
        assert!((a.jy[k] - b.jy[k]).abs() <= 1e-13 * a.max_current());
    }
}

#[test]
fn real_coefficients_carry_no_current() {
    for &(p, q, phi) in &[(1, 1, 0.0), (1, 2, 0.0), (2, 3, 0.0), (2, 2, PI / 2.0), (3, 3, 0.0)] {
        let s = state(p, q, phi, 12);
        let g = default_extent(&s, 128, 128).unwrap();
        let f = eval_state(&s, &g).unwrap();
        assert!(f.max_current() <= 1e-12 * f.max_rho(), "{p}:{q}");
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let s = state(2, 3, PI / 6.0, 6);
    let g = default_extent(&s, 64, 64).unwrap();
    let f = eval_state(&s, &g).unwrap();
    let (i, j) = (27, 35);
    let (x, y) = (g.x(i), g.y(j));
    let h = 1e-5;
    let probe = |x0: f64, y0: f64| {
        let small = FieldGrid::new(x0, x0 + 1.0, y0, y0 + 1.0, 16, 16).unwrap();
        eval_state_with(&s, &small, Resolution::Permissive).unwrap().psi[0]
    };
    let fx = (probe(x + h, y) - probe(x - h, y)) / (2.0 * h);
    let fy = (probe(x, y + h) - probe(x, y - h)) / (2.0 * h);
    let k = g.index(i, j);
    assert!((fx - f.grad_x[k]).norm() < 1e-7);
    assert!((fy - f.grad_y[k]).norm() < 1e-7);
}

#[test]
fn continuity_residual_converges_at_second_order() {
    let s = state(1, 1, PI / 2.0, 10);
    let coarse = default_extent(&s, 128, 128).unwrap();
    let fine = coarse.resampled(255, 255).unwrap();
    let a = divergence_residual(&eval_state(&s, &coarse).unwrap());
    let b = divergence_residual(&eval_state(&s, &fine).unwrap());
    let ratio = a.normalized / b.normalized;
    assert!((3.0..5.0).contains(&ratio), "{ratio}");
}

#[test]
fn vortex_ring_has_one_charge_n_singularity() {
    // ζ = −i is the angular-momentum eigenstate (x + iy)^N e^{−r²/2}: one
    // singularity of winding N at the origin, which a plaquette at the
    // centre sees as winding N.
    let s = build_isotropic(3, Complex64::new(0.0, -1.0)).unwrap();
    let g = FieldGrid::symmetric(6.0, 6.0, 64, 64).unwrap();
    let f = eval_state(&s, &g).unwrap();
    let v = detect_vortices(&f, 1e-12).unwrap();
    assert_eq!(v.total_winding(), 3);
}

#[test]
fn caption_cell_counts() {
    for &(p, q, k, want) in &[(1u32, 2u32, 4.0, 2usize), (2, 3, 6.0, 6)] {
        let s = state(p, q, PI / k, 20);
        let g = default_extent(&s, 512, 512).unwrap();
        let f = eval_state(&s, &g).unwrap();
        let cells = detect_circulation_cells(&f, 1e-6, local_wavelength(&s)).unwrap();
        assert_eq!(cells.len(), want, "{p}:{q}");
        // Counter-rotating pairs.
        assert_eq!(cells.positive, cells.negative);
    }
}

#[test]
fn interference_split_is_exact() {
    let amp = AmplitudePair::new(1.0, 1.0, 0.0).unwrap();
    let hh = higher_harmonic_decomposition(6, 2, 1, 1, &amp).unwrap();
    let s = build_from_amplitudes(&amp, 6, hh.params).unwrap();
    let g = default_extent(&s, 96, 96).unwrap();
    let parts = interference_decomposition(&hh, &g).unwrap();
    let direct = eval_state(&s, &g).unwrap();
    for k in 0..g.len() {
        let sum = parts.rho_diagonal[k] + parts.rho_cross[k];
        assert!((parts.rho_total[k] - sum).abs() <= 1e-14);
        assert!((parts.rho_total[k] - direct.rho[k]).abs() <= 1e-12);
    }
    assert!((quadrature(&parts.rho_incoherent, &g) - 1.0).abs() < 1e-8);
}

#[test]
fn axis_profile_needs_nodes_on_the_axes() {
    let s = state(1, 1, PI / 2.0, 20);
    let even = default_extent(&s, 512, 512).unwrap();
    let f = eval_state(&s, &even).unwrap();
    assert!(matches!(axis_profile(&f, Axis::X), Err(Error::InvalidGrid(_))));
    let odd = default_extent(&s, 513, 513).unwrap();
    let f = eval_state(&s, &odd).unwrap();
    assert_eq!(axis_extrema_count(&f, Axis::X, 1e-6).unwrap(), 1);
    assert_eq!(axis_extrema_count(&f, Axis::Y, 1e-6).unwrap(), 1);
}
