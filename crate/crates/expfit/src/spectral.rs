//! Spectral models and structured-noise measurement traces.
//!
//! A model holds strictly increasing positive eigenvalues λₙ with amplitudes
//! yₙ, a split index N₁, a tail length N₂, a noise intensity ε and a
//! sampling step Δ. Traces are the 2N₁ equispaced samples
//! y(t_k) = Σ_{n≤N₁} yₙφₙᵏ + ε Σ_{n>N₁} yₙφₙᵏ with φₙ = e^(−λₙΔ).
//!
//! Sign convention: eigenvalues are positive and increasing so the modes
//! e^(−λₙt) decay; generators quoted with negative eigenvalues are mapped
//! onto this canonical form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mpnum::{MpError, Real, RealVec};
use crate::pde::{self, Potential};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("eigenvalues must be strictly increasing and positive")]
    BadEigenvalues,
    #[error("model shape mismatch: {what}")]
    BadShape { what: &'static str },
    #[error("bracketing failed: found {found} sign changes, needed {needed}")]
    BracketingFailed { found: usize, needed: usize },
    #[error(transparent)]
    Numeric(#[from] MpError),
}

/// The object of the recovery problem: eigenvalues, amplitudes, split index,
/// tail length, noise intensity and sampling step.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralModel {
    pub lambdas: RealVec,
    pub amplitudes: RealVec,
    pub n1: usize,
    pub n2: usize,
    pub epsilon: Real,
    pub delta: Real,
}

impl SpectralModel {
    pub fn new(
        lambdas: RealVec,
        amplitudes: RealVec,
        n1: usize,
        n2: usize,
        epsilon: Real,
        delta: Real,
    ) -> Result<Self, SpectralError> {
        if lambdas.len() != n1 + n2 || amplitudes.len() != n1 + n2 {
            return Err(SpectralError::BadShape {
                what: "lambdas/amplitudes length must equal n1+n2",
            });
        }
        for i in 0..lambdas.len() {
            if lambdas[i] <= Real::zero(8) {
                return Err(SpectralError::BadEigenvalues);
            }
            if i > 0 && lambdas[i] <= lambdas[i - 1] {
                return Err(SpectralError::BadEigenvalues);
            }
        }
        for n in 0..n1 {
            if amplitudes[n].is_zero() {
                return Err(SpectralError::BadShape {
                    what: "main-part amplitudes must be nonzero",
                });
            }
        }
        if epsilon.is_sign_negative() || delta <= Real::zero(8) {
            return Err(SpectralError::BadShape {
                what: "epsilon must be >= 0 and delta > 0",
            });
        }
        Ok(SpectralModel {
            lambdas,
            amplitudes,
            n1,
            n2,
            epsilon,
            delta,
        })
    }

    /// Convenience constructor: λₙ = c·nᵖ, constant amplitudes 1, over
    /// n = 1..n1+n2.
    pub fn powerlaw(
        prec: u32,
        c: f64,
        p: f64,
        n1: usize,
        n2: usize,
        epsilon: f64,
        delta: f64,
    ) -> Self {
        let lambdas = powerlaw_eigenvalues(
            &Real::from_f64(prec, c),
            &Real::from_f64(prec, p),
            n1 + n2,
        );
        let amplitudes = RealVec(vec![Real::one(prec); n1 + n2]);
        SpectralModel::new(
            lambdas,
            amplitudes,
            n1,
            n2,
            Real::from_f64(prec, epsilon),
            Real::from_f64(prec, delta),
        )
        .expect("powerlaw model is always valid")
    }

    pub fn prec(&self) -> u32 {
        self.lambdas
            .prec()
            .max(self.amplitudes.prec())
            .max(self.epsilon.prec())
            .max(self.delta.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        SpectralModel {
            lambdas: self.lambdas.with_prec(prec),
            amplitudes: self.amplitudes.with_prec(prec),
            n1: self.n1,
            n2: self.n2,
            epsilon: self.epsilon.with_prec(prec),
            delta: self.delta.with_prec(prec),
        }
    }

    /// Nodes φₙ = e^(−λₙΔ), decreasing in n, all in (0,1) for λₙ > 0.
    pub fn nodes(&self) -> RealVec {
        RealVec(
            self.lambdas
                .iter()
                .map(|l| (-&(l * &self.delta)).exp())
                .collect(),
        )
    }

    /// Check Assumption-1-style amplitude bounds for given (ℓ, M_y).
    pub fn check_amplitude_bounds(&self, ell: &Real, m_y: &Real) -> bool {
        let inv = ell.recip();
        for n in 0..self.n1 {
            let a = self.amplitudes[n].abs();
            if a < inv || a > *ell {
                return false;
            }
        }
        for n in self.n1..self.n1 + self.n2 {
            let an = self.amplitudes[n].abs();
            for k in 0..self.n1 {
                if &an / &self.amplitudes[k].abs() > *m_y {
                    return false;
                }
            }
        }
        true
    }
}

/// Where a trace came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceSource {
    Synthetic,
    PdePoint,
    PdeIntegral,
}

/// 2N₁ equispaced samples plus their step and provenance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasurementTrace {
    pub delta: Real,
    pub samples: RealVec,
    pub source: TraceSource,
}

impl MeasurementTrace {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Empirical two-sided quadratic-growth constants for an eigenvalue list:
/// υ(m²−n²) ≤ λ_m−λₙ ≤ Υ(m²−n²).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GrowthBounds {
    pub upsilon: Real,
    pub upsilon_cap: Real,
}

/// λₙ = c·nᵖ for n = 1..count.
pub fn powerlaw_eigenvalues(c: &Real, p: &Real, count: usize) -> RealVec {
    let prec = c.prec().max(p.prec());
    RealVec::from_fn(count, |i| {
        let n = Real::from_u32(prec, (i + 1) as u32);
        // n^p = exp(p ln n)
        c * &(p * &n.ln()).exp()
    })
}

/// Extract υ = min and Υ = max of (λ_m−λₙ)/(m²−n²) over all pairs
/// (capped at the first 200 eigenvalues).
pub fn estimate_growth_bounds(lambdas: &RealVec) -> GrowthBounds {
    let prec = lambdas.prec();
    let count = lambdas.len().min(200);
    let mut lo: Option<Real> = None;
    let mut hi: Option<Real> = None;
    for m in 1..count {
        for n in 0..m {
            let dn = (m + 1) * (m + 1) - (n + 1) * (n + 1);
            let r = &(&lambdas[m] - &lambdas[n]) / &Real::from_u32(prec, dn as u32);
            lo = Some(match lo {
                Some(v) => v.min_ref(&r),
                None => r.clone(),
            });
            hi = Some(match hi {
                Some(v) => v.max_ref(&r),
                None => r,
            });
        }
    }
    let one = Real::one(prec);
    GrowthBounds {
        upsilon: lo.unwrap_or_else(|| one.clone()),
        upsilon_cap: hi.unwrap_or(one),
    }
}

/// Samples of the structured-noise exponential sum for k = 0..2N₁−1.
pub fn synthesize_trace(model: &SpectralModel) -> MeasurementTrace {
    let prec = model.prec();
    let nodes = model.nodes();
    let count = 2 * model.n1;
    let mut powers: Vec<Real> = vec![Real::one(prec); nodes.len()];
    let mut samples = Vec::with_capacity(count);
    for _k in 0..count {
        let mut main = Real::zero(prec);
        for n in 0..model.n1 {
            main = &main + &(&model.amplitudes[n] * &powers[n]);
        }
        let mut tail = Real::zero(prec);
        for n in model.n1..model.n1 + model.n2 {
            tail = &tail + &(&model.amplitudes[n] * &powers[n]);
        }
        samples.push(&main + &(&model.epsilon * &tail));
        for (p, node) in powers.iter_mut().zip(nodes.iter()) {
            *p = &*p * node;
        }
    }
    MeasurementTrace {
        delta: model.delta.clone(),
        samples: RealVec(samples),
        source: TraceSource::Synthetic,
    }
}

/// Boundary value y(1;λ) of y'' = (q(x) − λ)y, y(0)=0, y'(0)=1, by RK4
/// with the fixed step 1/2000 shared with the inverse module.
pub fn shoot_once(q: &Potential, lambda: &Real, prec: u32) -> Real {
    crate::inverse::shoot_boundary_value_potential(q, lambda, prec)
}

/// First `count` Dirichlet eigenvalues of −∂ₓₓ−q on (0,1) by scanning
/// y(1;λ) for sign changes and bisecting each bracket down to |y(1)| ≤ tol.
pub fn shooting_eigenvalues(
    q: &Potential,
    count: usize,
    tol: &Real,
) -> Result<RealVec, SpectralError> {
    let prec = tol.prec().max(256);
    // scan ceiling 1.5·π²·(count+2)²
    let pi2 = Real::pi(prec).square();
    let ceiling = &(&pi2 * &Real::from_f64(prec, 1.5)) * &Real::from_u32(prec, ((count + 2) * (count + 2)) as u32);
    // grid fine enough to separate consecutive eigenvalues (~ spacing π²(2n+1),
    // smallest gap ~ 3π² near the bottom; potential shifts are bounded)
    let steps = (8 * (count + 2) * (count + 2)).max(64);
    let mut brackets: Vec<(Real, Real, Real, Real)> = Vec::new();
    let h = &ceiling / &Real::from_u32(prec, steps as u32);
    let mut lam_prev = &Real::zero(prec) - &pi2; // start below λ₁ even for negative shifts
    let mut val_prev = shoot_once(q, &lam_prev, prec);
    for k in 1..=steps {
        if brackets.len() >= count {
            break;
        }
        let lam = &(&h * &Real::from_u32(prec, k as u32)) - &pi2;
        let val = shoot_once(q, &lam, prec);
        if (val_prev.is_sign_negative() && !val.is_sign_negative())
            || (!val_prev.is_sign_negative() && val.is_sign_negative())
        {
            brackets.push((lam_prev.clone(), lam.clone(), val_prev.clone(), val.clone()));
        }
        lam_prev = lam;
        val_prev = val;
    }
    if brackets.len() < count {
        return Err(SpectralError::BracketingFailed {
            found: brackets.len(),
            needed: count,
        });
    }

    let mut out = Vec::with_capacity(count);
    for (mut lo, mut hi, mut flo, _fhi) in brackets.into_iter().take(count) {
        // bisection to |y(1)| <= tol, with a hard iteration floor on width
        let mut mid = &(&lo + &hi) * &Real::from_f64(prec, 0.5);
        for _ in 0..(prec as usize) {
            mid = &(&lo + &hi) * &Real::from_f64(prec, 0.5);
            let fmid = shoot_once(q, &mid, prec);
            if fmid.abs() <= *tol {
                break;
            }
            if fmid.is_sign_negative() == flo.is_sign_negative() {
                lo = mid.clone();
                flo = fmid;
            } else {
                hi = mid.clone();
            }
            if (&hi - &lo).abs() <= Real::from_f64(prec, 0.5).powi(prec as i32 / 2) {
                break;
            }
        }
        out.push(mid);
    }
    Ok(RealVec(out))
}

/// JSON-facing descriptor for building models from configuration files.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaGen {
    Powerlaw { c: f64, p: f64 },
    Explicit { values: Vec<f64> },
    Shooting { potential: Potential },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub lambda_gen: LambdaGen,
    /// Explicit amplitudes, or empty for all-ones.
    #[serde(default)]
    pub amplitudes: Vec<f64>,
    pub n1: usize,
    pub n2: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub prec_bits: u32,
}

impl ModelDescriptor {
    pub fn build(&self) -> Result<SpectralModel, SpectralError> {
        let prec = self.prec_bits;
        let count = self.n1 + self.n2;
        let lambdas = match &self.lambda_gen {
            LambdaGen::Powerlaw { c, p } => powerlaw_eigenvalues(
                &Real::from_f64(prec, *c),
                &Real::from_f64(prec, *p),
                count,
            ),
            LambdaGen::Explicit { values } => {
                if values.len() < count {
                    return Err(SpectralError::BadShape {
                        what: "explicit eigenvalue list shorter than n1+n2",
                    });
                }
                RealVec::from_f64s(prec, &values[..count])
            }
            LambdaGen::Shooting { potential } => {
                let tol = Real::from_f64(prec, 1e-12);
                shooting_eigenvalues(potential, count, &tol)?
            }
        };
        let amplitudes = if self.amplitudes.is_empty() {
            RealVec(vec![Real::one(prec); count])
        } else {
            if self.amplitudes.len() < count {
                return Err(SpectralError::BadShape {
                    what: "amplitude list shorter than n1+n2",
                });
            }
            RealVec::from_f64s(prec, &self.amplitudes[..count])
        };
        SpectralModel::new(
            lambdas,
            amplitudes,
            self.n1,
            self.n2,
            Real::from_f64(prec, self.epsilon),
            Real::from_f64(prec, self.delta),
        )
    }
}

/// Eigenvalues of the discrete interior operator −(D₂+diag q) used by the
/// pde module, refined from shooting seeds by inverse iteration. Serves as
/// the collocation-side route of the dual eigenvalue check.
pub fn discrete_operator_eigenvalues(
    q: &Potential,
    n_x: usize,
    count: usize,
    prec: u32,
) -> Result<RealVec, SpectralError> {
    let op = pde::interior_operator(q, n_x, prec);
    let neg = op.scale(&-Real::one(prec));
    let tol = Real::from_f64(prec, 1e-9);
    let seeds = shooting_eigenvalues(q, count, &tol)?;
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let lam = crate::mpnum::nearest_eigenvalue(&neg, &seeds[k], 80)?;
        out.push(lam);
    }
    Ok(RealVec(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powerlaw_quadratic() {
        let v = powerlaw_eigenvalues(&Real::from_f64(128, 1.0), &Real::from_f64(128, 2.0), 3);
        assert!((v[0].to_f64() - 1.0).abs() < 1e-25);
        assert!((v[1].to_f64() - 4.0).abs() < 1e-25);
        assert!((v[2].to_f64() - 9.0).abs() < 1e-25);
    }

    #[test]
    fn powerlaw_linear_and_cubic() {
        let lin = powerlaw_eigenvalues(&Real::from_f64(128, 1.0), &Real::from_f64(128, 1.0), 3);
        assert!((lin[2].to_f64() - 3.0).abs() < 1e-25);
        let cub = powerlaw_eigenvalues(&Real::from_f64(128, 2.0), &Real::from_f64(128, 3.0), 2);
        assert!((cub[0].to_f64() - 2.0).abs() < 1e-25);
        assert!((cub[1].to_f64() - 16.0).abs() < 1e-25);
    }

    #[test]
    fn growth_bounds_exact_for_quadratic() {
        let lam = powerlaw_eigenvalues(&Real::from_f64(256, 1.0), &Real::from_f64(256, 2.0), 30);
        let gb = estimate_growth_bounds(&lam);
        assert!((gb.upsilon.to_f64() - 1.0).abs() < 1e-40);
        assert!((gb.upsilon_cap.to_f64() - 1.0).abs() < 1e-40);

        let lam2 = powerlaw_eigenvalues(&Real::from_f64(256, 2.0), &Real::from_f64(256, 2.0), 30);
        let gb2 = estimate_growth_bounds(&lam2);
        assert!((gb2.upsilon.to_f64() - 2.0).abs() < 1e-40);
        assert!((gb2.upsilon_cap.to_f64() - 2.0).abs() < 1e-40);
    }

    #[test]
    fn trace_single_mode() {
        let model = SpectralModel::powerlaw(256, 1.0, 2.0, 1, 0, 0.0, 1.0);
        let model = SpectralModel::new(
            model.lambdas.clone(),
            RealVec::from_f64s(256, &[2.0]),
            1,
            0,
            Real::zero(256),
            Real::one(256),
        )
        .unwrap();
        let tr = synthesize_trace(&model);
        assert_eq!(tr.len(), 2);
        assert!((tr.samples[0].to_f64() - 2.0).abs() < 1e-40);
        let expect = 2.0 * (-1.0f64).exp();
        assert!((tr.samples[1].to_f64() - expect).abs() < 1e-15);
    }

    #[test]
    fn epsilon_zero_matches_tailless_model() {
        let with_tail = SpectralModel::powerlaw(256, 1.0, 2.0, 3, 2, 0.0, 0.25);
        let without = SpectralModel::powerlaw(256, 1.0, 2.0, 3, 0, 0.0, 0.25);
        let a = synthesize_trace(&with_tail);
        let b = synthesize_trace(&without);
        for k in 0..a.len() {
            assert_eq!(a.samples[k], b.samples[k]);
        }
    }

    #[test]
    fn trace_matches_reversed_summation_oracle() {
        // independent oracle: per-term summation in reversed mode order
        let prec = 512;
        let model = SpectralModel::powerlaw(prec, 1.0, 2.0, 2, 1, 1e-6, 0.1);
        let tr = synthesize_trace(&model);
        let nodes = model.nodes();
        for k in 0..tr.len() {
            let ku = k as u32;
            let mut acc = Real::zero(prec);
            for n in (0..3).rev() {
                let term = &model.amplitudes[n] * &nodes[n].powi(ku as i32);
                let term = if n >= model.n1 {
                    &term * &model.epsilon
                } else {
                    term
                };
                acc = &acc + &term;
            }
            let diff = (&acc - &tr.samples[k]).abs();
            let scale = tr.samples[k].abs();
            let bound = &scale * &Real::from_f64(prec, 0.5).powi(prec as i32 / 2);
            assert!(diff <= bound, "sample {k} deviates");
        }
    }

    #[test]
    fn trace_positive_for_positive_amplitudes() {
        let model = SpectralModel::powerlaw(256, 1.0, 2.0, 4, 2, 1e-3, 0.2);
        let tr = synthesize_trace(&model);
        for s in tr.samples.iter() {
            assert!(*s > Real::zero(8));
        }
    }

    #[test]
    fn shooting_bracketing_fails_above_scan_ceiling() {
        // a strongly negative potential pushes the spectrum past the scan
        // ceiling 1.5·pi²·(count+2)²
        let q = crate::pde::Potential::FourierCosine {
            coeffs: vec![-400.0],
        };
        let tol = Real::from_f64(256, 1e-8);
        match shooting_eigenvalues(&q, 1, &tol) {
            Err(SpectralError::BracketingFailed { found, needed }) => {
                assert_eq!(needed, 1);
                assert_eq!(found, 0);
            }
            other => panic!("expected bracketing failure, got {other:?}"),
        }
    }

    #[test]
    fn model_descriptor_json_round_trip() {
        let json = r#"{
            "lambda_gen": {"powerlaw": {"c": 1.0, "p": 2.0}},
            "amplitudes": [],
            "n1": 3,
            "n2": 1,
            "epsilon": 1e-6,
            "delta": 0.5,
            "prec_bits": 256
        }"#;
        let desc: ModelDescriptor = serde_json::from_str(json).unwrap();
        let model = desc.build().unwrap();
        assert_eq!(model.n1, 3);
        assert_eq!(model.lambdas.len(), 4);
        assert!((model.lambdas[3].to_f64() - 16.0).abs() < 1e-30);
        assert!((model.amplitudes[0].to_f64() - 1.0).abs() < 1e-30);

        let explicit = r#"{
            "lambda_gen": {"explicit": {"values": [1.0, 3.5, 9.0]}},
            "amplitudes": [2.0, -1.0, 0.5],
            "n1": 2,
            "n2": 1,
            "epsilon": 0.0,
            "delta": 1.0,
            "prec_bits": 128
        }"#;
        let model2: SpectralModel = serde_json::from_str::<ModelDescriptor>(explicit)
            .unwrap()
            .build()
            .unwrap();
        assert!((model2.lambdas[1].to_f64() - 3.5).abs() < 1e-25);
        assert!((model2.amplitudes[1].to_f64() + 1.0).abs() < 1e-25);
    }

    #[test]
    fn model_validation_rejects_nonincreasing() {
        let lam = RealVec::from_f64s(64, &[1.0, 1.0]);
        let amp = RealVec::from_f64s(64, &[1.0, 1.0]);
        let r = SpectralModel::new(lam, amp, 1, 1, Real::zero(64), Real::one(64));
        assert!(matches!(r, Err(SpectralError::BadEigenvalues)));
    }

    #[test]
    fn amplitude_bound_check() {
        let model = SpectralModel::powerlaw(128, 1.0, 2.0, 3, 1, 1e-6, 0.5);
        let ell = Real::from_f64(128, 2.0);
        let my = Real::from_f64(128, 1.5);
        assert!(model.check_amplitude_bounds(&ell, &my));
        let tight = Real::from_f64(128, 0.5);
        assert!(!model.check_amplitude_bounds(&tight, &my));
    }
}
