//! Matrix exponential by scaling-and-squaring with the degree-13 Padé
//! approximant. The scaling depth is precision-aware: the scaled norm is
//! pushed low enough that the Padé truncation error falls below the target
//! precision, never above the classical 0.5 ceiling.

use super::real::Real;
use super::vec::RealMatrix;

/// Integer numerator coefficients of the [13/13] Padé approximant to exp.
const PADE13: [u64; 14] = [
    64764752532480000,
    32382376266240000,
    7771770303897600,
    1187353796428800,
    129060195264000,
    10559470521600,
    670442572800,
    33522128640,
    1323241920,
    40840800,
    960960,
    16380,
    182,
    1,
];

/// e^(A·t) for square `A`.
pub fn matrix_exp(a: &RealMatrix, t: &Real) -> RealMatrix {
    assert!(a.is_square(), "matrix_exp requires a square matrix");
    let n = a.rows();
    let prec = a.prec().max(t.prec());
    let at = a.scale(t).with_prec(prec);

    // Truncation of Padé-13 behaves like C27·x^27 with C27 ≈ 8.8e-36;
    // choose the scaled norm ceiling so that this is below 2^(−prec−8),
    // capped at 0.5.
    let log2_c27 = -116.4; // log2(8.83e-36)
    let log2_xmax = ((-(prec as f64) - 8.0 - log2_c27) / 27.0).min(-1.0);
    let norm = at.norm_inf();
    let s: u32 = if norm.is_zero() {
        0
    } else {
        let log2_norm = norm.exp2_estimate().unwrap_or(0) as f64;
        (log2_norm - log2_xmax).ceil().max(0.0) as u32
    };

    let scale = Real::from_f64(prec, 0.5).powi(s as i32);
    let x = at.scale(&scale);

    // Padé-13: split into even/odd parts so only x, x², x⁴, x⁶ are needed.
    let x2 = x.matmul(&x);
    let x4 = x2.matmul(&x2);
    let x6 = x4.matmul(&x2);

    let c = |k: usize| Real::from_str_prec(prec, &PADE13[k].to_string()).unwrap();
    let eye = RealMatrix::identity(prec, n);

    // u = x·(x6·(c13 x6 + c11 x4 + c9 x2) + c7 x6 + c5 x4 + c3 x2 + c1 I)
    let w1 = x6
        .scale(&c(13))
        .add(&x4.scale(&c(11)))
        .add(&x2.scale(&c(9)));
    let w2 = x6
        .scale(&c(7))
        .add(&x4.scale(&c(5)))
        .add(&x2.scale(&c(3)))
        .add(&eye.scale(&c(1)));
    let u = x.matmul(&x6.matmul(&w1).add(&w2));

    // v = x6·(c12 x6 + c10 x4 + c8 x2) + c6 x6 + c4 x4 + c2 x2 + c0 I
    let w3 = x6
        .scale(&c(12))
        .add(&x4.scale(&c(10)))
        .add(&x2.scale(&c(8)));
    let w4 = x6
        .scale(&c(6))
        .add(&x4.scale(&c(4)))
        .add(&x2.scale(&c(2)))
        .add(&eye.scale(&c(0)));
    let v = x6.matmul(&w3).add(&w4);

    // (v - u) r = (v + u)
    let vm = v.sub(&u);
    let vp = v.add(&u);
    let lu = super::linalg::lu_factor(&vm).expect("Padé denominator must be nonsingular");
    let mut r = RealMatrix::zeros(prec, n, n);
    for j in 0..n {
        let col = lu.solve(&vp.col(j));
        for i in 0..n {
            r[(i, j)] = col[i].clone();
        }
    }

    // undo the scaling by repeated squaring
    let mut e = r;
    for _ in 0..s {
        e = e.matmul(&e);
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpnum::linalg::jacobi_symmetric_eig;

    #[test]
    fn diagonal_is_elementwise_exp() {
        let prec = 256;
        let mut a = RealMatrix::zeros(prec, 2, 2);
        a[(0, 0)] = Real::from_f64(prec, -1.0);
        a[(1, 1)] = Real::from_f64(prec, -2.0);
        let e = matrix_exp(&a, &Real::one(prec));
        let e1 = Real::from_f64(prec, -1.0).exp();
        let e2 = Real::from_f64(prec, -2.0).exp();
        assert!((&e[(0, 0)] - &e1).abs().to_f64() < 1e-70);
        assert!((&e[(1, 1)] - &e2).abs().to_f64() < 1e-70);
        assert!(e[(0, 1)].abs().to_f64() < 1e-70);
    }

    #[test]
    fn nilpotent_two_by_two() {
        let prec = 128;
        let a = RealMatrix::from_rows_f64(prec, &[&[0.0, 1.0], &[0.0, 0.0]]);
        let e = matrix_exp(&a, &Real::one(prec));
        assert!((e[(0, 0)].to_f64() - 1.0).abs() < 1e-30);
        assert!((e[(0, 1)].to_f64() - 1.0).abs() < 1e-30);
        assert!(e[(1, 0)].to_f64().abs() < 1e-30);
        assert!((e[(1, 1)].to_f64() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn tridiagonal_matches_eigendecomposition() {
        // second-difference operator on 5 interior uniform nodes, t = 0.01
        let prec = 512;
        let n = 5;
        let h2 = Real::from_f64(prec, 36.0); // h = 1/6
        let a = RealMatrix::from_fn(n, n, |i, j| {
            let v = if i == j {
                -2.0
            } else if i.abs_diff(j) == 1 {
                1.0
            } else {
                0.0
            };
            &Real::from_f64(prec, v) * &h2
        });
        let t = Real::from_f64(prec, 0.01);
        let e = matrix_exp(&a, &t);

        // oracle: E = V diag(exp(λ t)) Vᵀ from the symmetric eigensolver
        let (vals, vecs) = jacobi_symmetric_eig(&a);
        let mut oracle = RealMatrix::zeros(prec, n, n);
        for k in 0..n {
            let ek = (&vals[k] * &t).exp();
            for i in 0..n {
                for j in 0..n {
                    oracle[(i, j)] =
                        &oracle[(i, j)] + &(&(&vecs[(i, k)] * &vecs[(j, k)]) * &ek);
                }
            }
        }
        let scale = oracle.norm_inf();
        let diff = e.sub(&oracle).norm_inf();
        let rel = (&diff / &scale).to_f64();
        assert!(rel < 1e-30, "relative deviation {rel:e}");
    }

    #[test]
    fn semigroup_property() {
        let prec = 384;
        let a = RealMatrix::from_rows_f64(
            prec,
            &[&[-1.0, 0.3, 0.0], &[0.3, -2.0, 0.1], &[0.0, 0.1, -0.5]],
        );
        let s = Real::from_f64(prec, 0.4);
        let t = Real::from_f64(prec, 1.1);
        let st = &s + &t;
        let lhs = matrix_exp(&a, &s).matmul(&matrix_exp(&a, &t));
        let rhs = matrix_exp(&a, &st);
        let rel = (&lhs.sub(&rhs).norm_inf() / &rhs.norm_inf()).to_f64();
        let bound = 2f64.powi(-(prec as i32) / 3);
        assert!(rel < bound, "relative deviation {rel:e} vs {bound:e}");
    }

    #[test]
    fn exp_zero_is_identity() {
        let prec = 128;
        let a = RealMatrix::zeros(prec, 3, 3);
        let e = matrix_exp(&a, &Real::one(prec));
        let d = e.sub(&RealMatrix::identity(prec, 3)).norm_inf();
        assert!(d.to_f64() == 0.0 || d.to_f64() < 1e-35);
    }
}
