//! Dense linear algebra at arbitrary precision: partial-pivot LU,
//! one-sided Jacobi SVD least squares, a Jacobi eigensolver for symmetric
//! matrices, and shifted inverse iteration for single eigenvalues.

use super::real::Real;
use super::vec::{RealMatrix, RealVec};
use super::MpError;

/// LU factorization with partial pivoting, kept for repeated solves.
pub struct LuFactors {
    lu: RealMatrix,
    perm: Vec<usize>,
    /// Magnitude of the smallest pivot over the largest, as a rank indicator.
    pub pivot_ratio: Real,
}

/// Factor a square matrix; fails when a pivot falls under
/// 2^(−prec/2)·‖A‖∞.
pub fn lu_factor(a: &RealMatrix) -> Result<LuFactors, MpError> {
    let prec = a.prec();
    lu_factor_with_pivot_floor(a, prec / 2)
}

/// Factor with the pivot tolerance at the rounding floor 2^(−prec+64)·‖A‖∞
/// instead of half precision: the graded Hankel/Vandermonde systems of the
/// escalated Prony path carry genuinely tiny pivots that are still far
/// above the noise of a deep solve.
pub fn lu_factor_floor(a: &RealMatrix) -> Result<LuFactors, MpError> {
    let prec = a.prec();
    lu_factor_with_pivot_floor(a, prec.saturating_sub(64))
}

fn lu_factor_with_pivot_floor(a: &RealMatrix, floor_bits: u32) -> Result<LuFactors, MpError> {
    assert!(a.is_square(), "lu_factor requires a square matrix");
    let n = a.rows();
    let prec = a.prec();
    let norm = a.norm_inf();
    let threshold = &Real::from_f64(prec, 0.5).powi(floor_bits.max(8) as i32) * &norm;

    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut min_pivot: Option<Real> = None;
    let mut max_pivot: Option<Real> = None;

    for k in 0..n {
        // pivot search on column k
        let mut p = k;
        let mut best = lu[(k, k)].abs();
        for i in k + 1..n {
            let v = lu[(i, k)].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best <= threshold {
            return Err(MpError::SingularMatrix);
        }
        if p != k {
            for j in 0..n {
                let tmp = lu[(k, j)].clone();
                lu[(k, j)] = lu[(p, j)].clone();
                lu[(p, j)] = tmp;
            }
            perm.swap(k, p);
        }
        min_pivot = Some(match min_pivot {
            Some(m) => m.min_ref(&best),
            None => best.clone(),
        });
        max_pivot = Some(match max_pivot {
            Some(m) => m.max_ref(&best),
            None => best.clone(),
        });

        let inv = lu[(k, k)].recip();
        for i in k + 1..n {
            let lik = &lu[(i, k)] * &inv;
            lu[(i, k)] = lik.clone();
            if lik.is_zero() {
                continue;
            }
            for j in k + 1..n {
                lu[(i, j)] = &lu[(i, j)] - &(&lik * &lu[(k, j)]);
            }
        }
    }

    let pivot_ratio = match (min_pivot, max_pivot) {
        (Some(mn), Some(mx)) if !mx.is_zero() => &mn / &mx,
        _ => Real::one(prec),
    };
    Ok(LuFactors {
        lu,
        perm,
        pivot_ratio,
    })
}

impl LuFactors {
    pub fn solve(&self, b: &RealVec) -> RealVec {
        let n = self.lu.rows();
        assert_eq!(b.len(), n);
        let prec = self.lu.prec().max(b.prec());
        // forward substitution on permuted rhs
        let mut y = RealVec::from_fn(n, |i| b[self.perm[i]].with_prec(prec));
        for i in 0..n {
            for j in 0..i {
                let t = &self.lu[(i, j)] * &y[j];
                y[i] = &y[i] - &t;
            }
        }
        // back substitution
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = &self.lu[(i, j)] * &y[j];
                y[i] = &y[i] - &t;
            }
            y[i] = &y[i] / &self.lu[(i, i)];
        }
        y
    }
}

/// Solve a square nonsingular system by partial-pivot LU.
///
/// Post: ‖Ax−b‖∞ ≤ 2^(−prec/2)·(‖A‖∞‖x‖∞+‖b‖∞).
pub fn solve_square(a: &RealMatrix, b: &RealVec) -> Result<RealVec, MpError> {
    Ok(lu_factor(a)?.solve(b))
}

/// Result of an SVD-backed least-squares solve.
#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub solution: RealVec,
    /// Set when the smallest retained singular value fell under
    /// 2^(−prec/3)·σ_max; truncated directions are dropped (min-norm fill).
    pub rank_deficient: bool,
    pub sigma_max: Real,
    pub sigma_min: Real,
    pub rank: usize,
}

/// One-sided Jacobi SVD least squares for rows ≥ cols.
///
/// Columns of `A` are orthogonalized by plane rotations accumulated in V;
/// then x = V Σ⁺ Uᵀ b with singular values under the truncation threshold
/// treated as zero (minimum-norm solution).
pub fn solve_least_squares(a: &RealMatrix, b: &RealVec) -> Result<LeastSquares, MpError> {
    let m = a.rows();
    let n = a.cols();
    if m < n {
        return Err(MpError::ShapeMismatch {
            what: "least squares needs rows >= cols",
        });
    }
    assert_eq!(b.len(), m);
    let prec = a.prec().max(b.prec());

    // Work on columns of A; accumulate V.
    let mut u: Vec<RealVec> = (0..n).map(|j| a.col(j).with_prec(prec)).collect();
    let mut v: Vec<RealVec> = (0..n)
        .map(|j| {
            let mut e = RealVec::zeros(prec, n);
            e[j] = Real::one(prec);
            e
        })
        .collect();

    let tol = Real::from_f64(prec, 0.5).powi(prec as i32 - 8);
    let max_sweeps = 30 + (prec as usize / 64);
    for _sweep in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = u[p].dot(&u[p]);
                let beta = u[q].dot(&u[q]);
                let gamma = u[p].dot(&u[q]);
                if gamma.is_zero() {
                    continue;
                }
                // convergence test: |gamma| <= tol*sqrt(alpha*beta)
                let bound = &tol * &(&alpha * &beta).sqrt();
                if gamma.abs() <= bound {
                    continue;
                }
                rotated = true;
                // Jacobi rotation zeroing the (p,q) Gram entry
                let two = Real::from_u32(prec, 2);
                let zeta = &(&beta - &alpha) / &(&two * &gamma);
                let t = {
                    // t = sign(zeta)/(|zeta| + sqrt(1+zeta^2))
                    let az = zeta.abs();
                    let denom = &az + &(&Real::one(prec) + &zeta.square()).sqrt();
                    let mag = denom.recip();
                    if zeta.is_sign_negative() {
                        -&mag
                    } else {
                        mag
                    }
                };
                let c = (&Real::one(prec) + &t.square()).sqrt().recip();
                let s = &c * &t;
                for vecs in [&mut u, &mut v] {
                    let (left, right) = vecs.split_at_mut(q);
                    let up = &mut left[p];
                    let uq = &mut right[0];
                    for i in 0..up.len() {
                        let xp = up[i].clone();
                        let xq = uq[i].clone();
                        up[i] = &(&c * &xp) - &(&s * &xq);
                        uq[i] = &(&s * &xp) + &(&c * &xq);
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Singular values and solve.
    let sigmas: Vec<Real> = u.iter().map(RealVec::norm_2).collect();
    let mut sigma_max = Real::zero(prec);
    for s in &sigmas {
        if *s > sigma_max {
            sigma_max = s.clone();
        }
    }
    let trunc = &Real::from_f64(prec, 0.5).powi(prec as i32 / 3) * &sigma_max;

    let bx = b.with_prec(prec);
    let mut x = RealVec::zeros(prec, n);
    let mut rank = 0usize;
    let mut sigma_min_retained = sigma_max.clone();
    for j in 0..n {
        if sigmas[j].is_zero() || sigmas[j] <= trunc {
            continue;
        }
        rank += 1;
        if sigmas[j] < sigma_min_retained {
            sigma_min_retained = sigmas[j].clone();
        }
        // coefficient = (u_j/σ_j)·b / σ_j
        let coef = &u[j].dot(&bx) / &sigmas[j].square();
        for i in 0..n {
            x[i] = &x[i] + &(&coef * &v[j][i]);
        }
    }
    let rank_deficient = rank < n;
    Ok(LeastSquares {
        solution: x,
        rank_deficient,
        sigma_max,
        sigma_min: sigma_min_retained,
        rank,
    })
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Returns eigenvalues ascending with matching eigenvectors as columns.
pub fn jacobi_symmetric_eig(a: &RealMatrix) -> (RealVec, RealMatrix) {
    assert!(a.is_square());
    let n = a.rows();
    let prec = a.prec();
    let mut m = a.clone();
    let mut v = RealMatrix::identity(prec, n);
    let tol = Real::from_f64(prec, 0.5).powi(prec as i32 - 8);
    let max_sweeps = 40 + prec as usize / 32;

    for _ in 0..max_sweeps {
        // off-diagonal magnitude
        let mut off = Real::zero(prec);
        for i in 0..n {
            for j in i + 1..n {
                off = &off + &m[(i, j)].square();
            }
        }
        let scale = m.norm_inf();
        if off.sqrt() <= &tol * &scale || scale.is_zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[(p, q)].is_zero() {
                    continue;
                }
                let theta = &(&m[(q, q)] - &m[(p, p)]) / &(&Real::from_u32(prec, 2) * &m[(p, q)]);
                let t = {
                    let at = theta.abs();
                    let denom = &at + &(&Real::one(prec) + &theta.square()).sqrt();
                    let mag = denom.recip();
                    if theta.is_sign_negative() {
                        -&mag
                    } else {
                        mag
                    }
                };
                let c = (&Real::one(prec) + &t.square()).sqrt().recip();
                let s = &c * &t;
                // rotate rows/cols p,q of m
                for k in 0..n {
                    let mkp = m[(k, p)].clone();
                    let mkq = m[(k, q)].clone();
                    m[(k, p)] = &(&c * &mkp) - &(&s * &mkq);
                    m[(k, q)] = &(&s * &mkp) + &(&c * &mkq);
                }
                for k in 0..n {
                    let mpk = m[(p, k)].clone();
                    let mqk = m[(q, k)].clone();
                    m[(p, k)] = &(&c * &mpk) - &(&s * &mqk);
                    m[(q, k)] = &(&s * &mpk) + &(&c * &mqk);
                }
                for k in 0..n {
                    let vkp = v[(k, p)].clone();
                    let vkq = v[(k, q)].clone();
                    v[(k, p)] = &(&c * &vkp) - &(&s * &vkq);
                    v[(k, q)] = &(&s * &vkp) + &(&c * &vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap());
    let vals = RealVec::from_fn(n, |k| m[(order[k], order[k])].clone());
    let vecs = RealMatrix::from_fn(n, n, |i, k| v[(i, order[k])].clone());
    (vals, vecs)
}

/// Eigenvalue of `a` nearest to `seed`, by shifted inverse iteration with
/// Rayleigh-quotient refinement. Works for real-spectrum matrices (here:
/// collocation operators similar to self-adjoint ones).
pub fn nearest_eigenvalue(a: &RealMatrix, seed: &Real, max_iters: usize) -> Result<Real, MpError> {
    assert!(a.is_square());
    let n = a.rows();
    let prec = a.prec().max(seed.prec());
    let mut shift = seed.with_prec(prec);
    let mut v = RealVec::from_fn(n, |i| {
        // deterministic spread start vector
        Real::from_f64(prec, 0.5 + ((i * 2654435761) % 1000) as f64 / 2000.0)
    });
    let nv = v.norm_2();
    v = v.scale(&nv.recip());

    let tol = Real::from_f64(prec, 0.5).powi(prec as i32 / 2);
    let mut rho = shift.clone();
    let mut factors: Option<(Real, LuFactors)> = None;
    for iter in 0..max_iters {
        let needs_refactor = match &factors {
            Some((s, _)) => *s != shift,
            None => true,
        };
        if needs_refactor {
            let shifted = {
                let mut s = a.with_prec(prec);
                for i in 0..n {
                    s[(i, i)] = &s[(i, i)] - &shift;
                }
                s
            };
            match lu_factor(&shifted) {
                Ok(f) => factors = Some((shift.clone(), f)),
                // shift landed on the eigenvalue to working precision
                Err(MpError::SingularMatrix) => return Ok(shift),
                Err(e) => return Err(e),
            }
        }
        let w = factors.as_ref().expect("factored").1.solve(&v);
        let nw = w.norm_2();
        if nw.is_zero() {
            return Err(MpError::NoConvergence {
                what: "inverse iteration produced zero vector",
            });
        }
        v = w.scale(&nw.recip());
        // Rayleigh quotient
        let av = a.matvec(&v);
        rho = v.dot(&av);
        let residual = av.sub(&v.scale(&rho)).norm_inf();
        let scale = a.norm_inf();
        if residual <= &tol * &scale {
            return Ok(rho);
        }
        // refresh the shift every other step for quadratic convergence
        if iter % 2 == 1 {
            shift = rho.clone();
        }
    }
    // Accept the Rayleigh quotient if it is at least consistent.
    let av = a.matvec(&v);
    let residual = av.sub(&v.scale(&rho)).norm_inf();
    let loose = Real::from_f64(prec, 0.5).powi(prec as i32 / 4);
    if residual <= &loose * &a.norm_inf() {
        Ok(rho)
    } else {
        Err(MpError::NoConvergence {
            what: "inverse iteration stalled",
        })
    }
}
