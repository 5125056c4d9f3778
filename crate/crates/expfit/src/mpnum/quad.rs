//! Gauss–Legendre nodes and weights at arbitrary precision.
//!
//! Nodes are found by Newton iteration on the Legendre recurrence starting
//! from the Chebyshev-angle estimates; shared by the quadratures in the
//! analysis and pde modules.

use super::real::Real;

/// Nodes and weights on [-1, 1] for an n-point rule.
pub fn gauss_legendre(prec: u32, n: usize) -> (Vec<Real>, Vec<Real>) {
    assert!(n >= 1);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let pi = Real::pi(prec);
    let n_real = Real::from_u32(prec, n as u32);
    let two = Real::from_u32(prec, 2);

    for k in 0..n {
        // Chebyshev-angle initial guess
        let arg = &(&pi * &Real::from_f64(prec, k as f64 + 0.75)) / &(&n_real + &Real::from_f64(prec, 0.5));
        let mut x = arg.cos();
        // Newton iteration on P_n(x) = 0
        for _ in 0..(40 + prec as usize / 16) {
            let (p, dp) = legendre_with_derivative(prec, n, &x);
            let step = &p / &dp;
            x = &x - &step;
            if step.abs() <= Real::from_f64(prec, 0.5).powi(prec as i32 - 8) {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(prec, n, &x);
        let w = &two / &(&(&Real::one(prec) - &x.square()) * &dp.square());
        nodes.push(x);
        weights.push(w);
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre_with_derivative(prec: u32, n: usize, x: &Real) -> (Real, Real) {
    let mut p0 = Real::one(prec);
    let mut p1 = x.clone();
    if n == 0 {
        return (p0, Real::zero(prec));
    }
    for k in 2..=n {
        let kf = Real::from_u32(prec, k as u32);
        let a = &(&Real::from_u32(prec, (2 * k - 1) as u32) * x) * &p1;
        let b = &Real::from_u32(prec, (k - 1) as u32) * &p0;
        let p2 = &(&a - &b) / &kf;
        p0 = p1;
        p1 = p2;
    }
    // P_n'(x) = n (x P_n - P_{n-1}) / (x² - 1)
    let num = &Real::from_u32(prec, n as u32) * &(&(x * &p1) - &p0);
    let den = &x.square() - &Real::one(prec);
    (p1.clone(), &num / &den)
}

/// ∫_a^b f(x) dx on one panel with an n-point rule.
pub fn integrate_panel(
    a: &Real,
    b: &Real,
    nodes: &[Real],
    weights: &[Real],
    mut f: impl FnMut(&Real) -> Real,
) -> Real {
    let prec = a.prec().max(b.prec());
    let half = Real::from_f64(prec, 0.5);
    let mid = &(a + b) * &half;
    let rad = &(b - a) * &half;
    let mut s = Real::zero(prec);
    for (x, w) in nodes.iter().zip(weights.iter()) {
        let t = &mid + &(&rad * x);
        s = &s + &(w * &f(&t));
    }
    &s * &rad
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let prec = 256;
        let (nodes, weights) = gauss_legendre(prec, 8);
        // ∫_0^1 x^7 dx = 1/8; 8-point rule is exact through degree 15
        let v = integrate_panel(
            &Real::zero(prec),
            &Real::one(prec),
            &nodes,
            &weights,
            |x| x.powi(7),
        );
        assert!((v.to_f64() - 0.125).abs() < 1e-60);
    }

    #[test]
    fn integrates_sine_over_period() {
        let prec = 256;
        let (nodes, weights) = gauss_legendre(prec, 32);
        let pi = Real::pi(prec);
        // ∫_0^π sin = 2
        let v = integrate_panel(&Real::zero(prec), &pi, &nodes, &weights, |x| x.sin());
        assert!((v.to_f64() - 2.0).abs() < 1e-40);
    }
}
