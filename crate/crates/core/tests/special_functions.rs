use lissajous_core::fields::{quadrature, FieldGrid};
use lissajous_core::specialfn::*;
use num_bigint::BigUint;

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, k| acc * k)
}

// ln of an exact big integer ratio, via its leading digits.
fn ln_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 52 {
        return (v.iter_u64_digits().next().unwrap_or(0) as f64).ln();
    }
    let shift = bits - 52;
    let top: BigUint = v >> shift;
    (top.iter_u64_digits().next().unwrap() as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

#[test]
fn log_weight_matches_exact_factorials() {
    for &(n, p, q) in &[(20u32, 1u32, 1u32), (20, 1, 2), (20, 2, 3), (40, 3, 6), (60, 1, 1), (7, 5, 2)] {
        for k in 0..=n {
            let num = factorial((q * n) as u64);
            let den = factorial((p * k) as u64) * factorial((q * (n - k)) as u64);
            let exact = ln_big(&num) - ln_big(&den);
            let got = log_weight(n, k, p, q).unwrap();
            assert!((got - exact).abs() <= 1e-12 * exact.abs().max(1.0), "{n} {k} {p} {q}: {got} vs {exact}");
        }
    }
}

#[test]
fn log_weight_rejects_degenerate_indices() {
    assert!(log_weight(3, 4, 1, 1).is_err());
    assert!(log_weight(3, 1, 0, 1).is_err());
}

#[test]
fn binomial_small_cases_exact() {
    assert_eq!(ln_binomial(10, 0).unwrap(), 0.0);
    assert!((ln_binomial(10, 3).unwrap() - 120f64.ln()).abs() < 1e-13);
    assert!(ln_binomial(3, 4).is_err());
}

// Physicists' Hermite polynomials from the explicit sum, exact in rationals
// up to moderate order.
fn hermite_explicit(n: u32, u: f64) -> f64 {
    let mut s = 0.0;
    for m in 0..=n / 2 {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let c = (ln_factorial(n as u64) - ln_factorial(m as u64) - ln_factorial((n - 2 * m) as u64)).exp();
        s += sign * c * (2.0 * u).powi((n - 2 * m) as i32);
    }
    s
}

#[test]
fn hermite_functions_match_explicit_polynomials() {
    for n in 0..=12u32 {
        for &u in &[-2.5f64, -1.0, -0.3, 0.0, 0.7, 1.9, 3.1] {
            let norm = (2f64.powi(n as i32) * (ln_factorial(n as u64)).exp() * std::f64::consts::PI.sqrt()).sqrt();
            let want = hermite_explicit(n, u) * (-u * u / 2.0).exp() / norm;
            let got = hermite_function(n, u).value;
            assert!((got - want).abs() < 1e-12, "n={n} u={u}: {got} vs {want}");
        }
    }
}

#[test]
fn orthonormal_to_n_40() {
    let nmax = 40usize;
    let omega = 1.7f64;
    let grid = FieldGrid::symmetric(14.0 / omega.sqrt(), 1.0, 4001, 16).unwrap();
    let xs = grid.xs();
    let mut table = vec![vec![0.0; xs.len()]; nmax + 1];
    let (mut v, mut d) = (vec![0.0; nmax + 1], vec![0.0; nmax + 1]);
    for (i, &x) in xs.iter().enumerate() {
        fill_psi_1d(omega, x, &mut v, &mut d).unwrap();
        for n in 0..=nmax {
            table[n][i] = v[n];
        }
    }
    // Integrate along x only: replicate rows so the 2D trapezoid reduces to 1D.
    let height = grid.y_max - grid.y_min;
    for a in (0..=nmax).step_by(3) {
        for b in a..=nmax {
            let row: Vec<f64> = table[a].iter().zip(&table[b]).map(|(p, q)| p * q).collect();
            let full: Vec<f64> = (0..grid.ny).flat_map(|_| row.iter().copied()).collect();
            let ip = quadrature(&full, &grid) / height;
            let want = if a == b { 1.0 } else { 0.0 };
            assert!((ip - want).abs() < 1e-10, "<{a}|{b}> = {ip}");
        }
    }
}

#[test]
fn derivatives_match_finite_differences() {
    let omega = 2.0;
    let h = 1e-5;
    let n = 30;
    let (mut v0, mut d0) = (vec![0.0; n + 1], vec![0.0; n + 1]);
    let (mut vp, mut dp) = (vec![0.0; n + 1], vec![0.0; n + 1]);
    let (mut vm, mut dm) = (vec![0.0; n + 1], vec![0.0; n + 1]);
    for &x in &[-3.0, -0.4, 0.0, 1.1, 2.6] {
        fill_psi_1d(omega, x, &mut v0, &mut d0).unwrap();
        fill_psi_1d(omega, x + h, &mut vp, &mut dp).unwrap();
        fill_psi_1d(omega, x - h, &mut vm, &mut dm).unwrap();
        for k in 0..=n {
            let fd = (vp[k] - vm[k]) / (2.0 * h);
            assert!((fd - d0[k]).abs() < 1e-7 * (1.0 + d0[k].abs()), "n={k} x={x}");
        }
    }
}

#[test]
fn far_tails_underflow_cleanly() {
    let (mut v, mut d) = (vec![0.0; 101], vec![0.0; 101]);
    fill_psi_1d(1.0, 60.0, &mut v, &mut d).unwrap();
    assert!(v.iter().chain(&d).all(|x| x.is_finite()));
    assert!(v[100].abs() < 1e-300);
}

#[test]
fn log_sum_exp_is_stable() {
    assert!((log_sum_exp(&[1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
}
