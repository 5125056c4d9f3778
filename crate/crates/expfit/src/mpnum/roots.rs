//! Simultaneous polynomial root finding (Aberth–Ehrlich).
//!
//! Prony polynomials in this crate carry real roots spread over hundreds of
//! orders of magnitude, so initial guesses come from the Newton polygon of
//! the coefficient magnitudes (one circle of guesses per upper-convex-hull
//! segment). Roots are frozen individually once the Horner residual sinks
//! under its running error bound or the Aberth step is negligible relative
//! to the root.

use rug::ops::CompleteRound;
use rug::{Complex, Float};

use super::poly::Poly;
use super::real::{ComplexVal, Real};
use super::vec::ComplexVec;
use super::MpError;

/// All complex roots of `p`, with multiplicity. Iteration cap 200·degree.
pub fn poly_roots(p: &Poly) -> Result<ComplexVec, MpError> {
    let p = p.clone().normalize();
    let deg = p.degree();
    if deg < 1 {
        return Err(MpError::InvalidInput {
            what: "poly_roots requires degree >= 1",
        });
    }
    let prec = p.prec();
    let monic = p.monic();

    if deg == 1 {
        let root = -&(&monic.coeffs[0] / &monic.coeffs[1]);
        return Ok(vec![ComplexVal::from_real(root)]);
    }

    let coeffs: Vec<Complex> = monic
        .coeffs
        .iter()
        .map(|c| Complex::with_val(prec, c.as_float()))
        .collect();
    let dcoeffs: Vec<Complex> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| Complex::with_val(prec, c * k as u32))
        .collect();

    let mut z = initial_guesses(&coeffs, prec);
    let mut frozen = vec![false; deg];
    let cap = 200 * deg;
    // Step-based stop: relative step below 2^(-prec/2) (the coefficients
    // seldom support more than working accuracy anyway; the residual test
    // below catches the rest).
    let step_tol = Float::with_val(32, Float::exp2(Float::with_val(32, -(prec as f64) / 2.0)));

    let mut iters = 0usize;
    while iters < cap {
        iters += 1;
        let mut all_frozen = true;
        for i in 0..deg {
            if frozen[i] {
                continue;
            }
            let (val, bound) = horner_with_bound(&coeffs, &z[i], prec);
            let vabs = val.abs_ref().complete((prec, prec)).real().clone();
            if vabs <= bound {
                frozen[i] = true;
                continue;
            }
            let dval = horner(&dcoeffs, &z[i], prec);
            let newton = if dval.is_zero() {
                // perturb off a critical point
                Complex::with_val(prec, (1e-3f64, 1e-3f64))
            } else {
                Complex::with_val(prec, &val / &dval)
            };
            // Aberth repulsion from all other iterates
            let mut repulse = Complex::new(prec);
            for j in 0..deg {
                if j == i {
                    continue;
                }
                let diff = Complex::with_val(prec, &z[i] - &z[j]);
                if diff.is_zero() {
                    continue;
                }
                repulse += diff.recip();
            }
            let denom = Complex::with_val(prec, 1u32) - Complex::with_val(prec, &newton * &repulse);
            let step = if denom.is_zero() {
                newton
            } else {
                Complex::with_val(prec, &newton / &denom)
            };
            let znew = Complex::with_val(prec, &z[i] - &step);
            let step_abs = step.abs_ref().complete((prec, prec)).real().clone();
            let z_abs = znew.abs_ref().complete((prec, prec)).real().clone();
            let rel_ok = !z_abs.is_zero() && step_abs <= Float::with_val(prec, &z_abs * &step_tol);
            z[i] = znew;
            if rel_ok {
                frozen[i] = true;
            } else {
                all_frozen = false;
            }
        }
        if all_frozen {
            break;
        }
    }

    if std::env::var_os("EXPFIT_ROOTS_DEBUG").is_some() {
        eprintln!(
            "aberth: deg={} prec={} sweeps={} frozen={}",
            deg,
            prec,
            iters,
            frozen.iter().filter(|f| **f).count()
        );
    }
    if iters >= cap && frozen.iter().any(|f| !f) {
        return Err(MpError::NoConvergence {
            what: "Aberth iteration hit its cap",
        });
    }

    let mut out: ComplexVec = z
        .into_iter()
        .map(|c| {
            let (re, im) = c.into_real_imag();
            ComplexVal::new(Real::from_float(re), Real::from_float(im))
        })
        .collect();
    // deterministic order: by real part, then imaginary
    out.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(out)
}

fn horner(coeffs: &[Complex], z: &Complex, prec: u32) -> Complex {
    let mut acc = Complex::new(prec);
    for c in coeffs.iter().rev() {
        acc = Complex::with_val(prec, &acc * z) + c;
    }
    acc
}

/// Horner value plus a running bound on its rounding error:
/// err ≤ (2·deg+1)·2^(1−prec)·Σ|cᵢ||z|ⁱ.
fn horner_with_bound(coeffs: &[Complex], z: &Complex, prec: u32) -> (Complex, Float) {
    let zabs = z.abs_ref().complete((prec, prec)).real().clone();
    let mut acc = Complex::new(prec);
    let mut mag = Float::new(prec);
    for c in coeffs.iter().rev() {
        acc = Complex::with_val(prec, &acc * z) + c;
        let cabs = c.abs_ref().complete((prec, prec)).real().clone();
        mag = Float::with_val(prec, &mag * &zabs) + cabs;
    }
    let factor = Float::with_val(
        prec,
        (2 * coeffs.len() as u32 + 2) as f64,
    ) * Float::with_val(32, Float::exp2(Float::with_val(32, 3.0 - prec as f64)));
    let bound = Float::with_val(prec, &mag * &factor);
    (acc, bound)
}

/// Newton-polygon initial guesses: one circle of starting points per upper
/// convex hull segment of (k, log2|c_k|), radius derived from the segment
/// slope. Degenerates to a single circle for flat coefficient profiles.
fn initial_guesses(coeffs: &[Complex], prec: u32) -> Vec<Complex> {
    let deg = coeffs.len() - 1;
    // binary exponents of |c_k| (i64::MIN marks a vanishing coefficient)
    let exps: Vec<Option<i64>> = coeffs
        .iter()
        .map(|c| {
            let a = c.abs_ref().complete((64, 64)).real().clone();
            if a.is_zero() {
                None
            } else {
                a.get_exp().map(|e| e as i64)
            }
        })
        .collect();

    // upper convex hull over points (k, e_k), from k=0 to k=deg
    let pts: Vec<(i64, i64)> = exps
        .iter()
        .enumerate()
        .filter_map(|(k, e)| e.map(|e| (k as i64, e)))
        .collect();
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // keep hull upper-convex: drop b if it lies under segment a-pt
            let lhs = (b.1 - a.1) as i128 * (pt.0 - a.0) as i128;
            let rhs = (pt.1 - a.1) as i128 * (b.0 - a.0) as i128;
            if lhs <= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }

    let two_pi = Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
    let mut guesses = Vec::with_capacity(deg);
    let mut placed = 0usize;
    for w in hull.windows(2) {
        let (k1, e1) = w[0];
        let (k2, e2) = w[1];
        let count = (k2 - k1) as usize;
        // radius = 2^((e1-e2)/(k2-k1)); note roots of smaller magnitude
        // correspond to lower-degree hull segments
        let slope = (e1 - e2) as f64 / (k2 - k1) as f64;
        let radius = Float::with_val(prec, Float::exp2(Float::with_val(64, slope)));
        for j in 0..count {
            // golden-ratio angle spread, offset off the real axis
            let frac = (placed as f64 * 0.618_033_988_749_894_9 + 0.25
                + j as f64 / count as f64)
                % 1.0;
            let angle = Float::with_val(prec, &two_pi * &Float::with_val(prec, frac));
            let (sin, cos) = angle.sin_cos(Float::new(prec));
            let re = Float::with_val(prec, &radius * &cos);
            let im = Float::with_val(prec, &radius * &sin);
            guesses.push(Complex::with_val(prec, (re, im)));
            placed += 1;
        }
    }
    // pad if leading/trailing zero coefficients left us short
    while guesses.len() < deg {
        let frac = (guesses.len() as f64 * 0.618_033_988_749_894_9 + 0.125) % 1.0;
        let angle = Float::with_val(prec, &two_pi * &Float::with_val(prec, frac));
        let (sin, cos) = angle.sin_cos(Float::new(prec));
        guesses.push(Complex::with_val(prec, (cos, sin)));
    }
    guesses.truncate(deg);
    guesses
}
