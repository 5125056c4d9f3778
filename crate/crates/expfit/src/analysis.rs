//! Computable appendix machinery: the quadratic-gap sum Ψ, the decay
//! kernel 𝔤 and its integral 𝒢, θ-sums with their sandwich bounds, the
//! L²ₙ node identity, elementary symmetric means and the MacLaurin chain,
//! the imaginary error function, the separation constant τ, the two
//! evaluation routes for the unperturbed Prony determinant, and the
//! explicit single-tail discrepancy expansion checked against a direct
//! determinant difference.

use thiserror::Error;

use crate::condnum::{lagrange_eval, CondError};
use crate::mpnum::{Real, RealMatrix, RealVec};
use crate::prony::bareiss_determinant;
use crate::spectral::{estimate_growth_bounds, GrowthBounds, SpectralModel};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("index {idx} out of range 1..={max}")]
    IndexOutOfRange { idx: usize, max: usize },
    #[error("eta must lie strictly inside (0,1), got {value}")]
    EtaOutOfRange { value: f64 },
    #[error("argument must be positive, got {value}")]
    NonpositiveArgument { value: f64 },
    #[error("bad integration interval")]
    BadInterval,
    #[error("k = {k} outside 1..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("negative value passed where nonnegative required")]
    NegativeValue,
    #[error("size cap exceeded: {what}")]
    SizeCap { what: &'static str },
    #[error("discrepancy expansion requires a single tail mode (N₂ = 1)")]
    UnsupportedTail,
    #[error(transparent)]
    Cond(#[from] CondError),
}

/// Shared context for the θ-sum and L² identities.
#[derive(Clone, Debug)]
pub struct AnalysisContext {
    pub lambdas: RealVec,
    pub delta: Real,
    pub n1: usize,
    pub growth: GrowthBounds,
    pub tau: Real,
}

impl AnalysisContext {
    /// Growth bounds come from an exhaustive pair scan; τ from the stated
    /// closed form at Δ★ = Δ.
    pub fn new(lambdas: RealVec, delta: Real, n1: usize) -> Self {
        let growth = estimate_growth_bounds(&lambdas);
        let tau = separation_tau(&delta, &growth.upsilon).expect("positive inputs");
        AnalysisContext {
            lambdas,
            delta,
            n1,
            growth,
            tau,
        }
    }

    fn nodes(&self) -> RealVec {
        RealVec(
            self.lambdas
                .iter()
                .map(|l| (-&(l * &self.delta)).exp())
                .collect(),
        )
    }
}

/// θ¹, θ², θ³ for one mode index.
#[derive(Clone, Debug)]
pub struct ThetaTriple {
    pub theta1: Real,
    pub theta2: Real,
    pub theta3: Real,
}

/// Ψ(n; N₁) = Σ_{j=n+1}^{N₁} (j²−n²); Ψ(N₁;N₁) = 0 by the empty-sum
/// convention.
pub fn psi(n: usize, n1: usize) -> Result<u64, AnalysisError> {
    if n == 0 || n > n1 {
        return Err(AnalysisError::IndexOutOfRange { idx: n, max: n1 });
    }
    let mut acc = 0u64;
    for j in n + 1..=n1 {
        acc += (j * j - n * n) as u64;
    }
    Ok(acc)
}

/// a(η) = 1/6 + η³/3 − η²/2, the cubic controlling Ψ(⌊ηN₁⌋;N₁) ≥ a(η)N₁³.
pub fn eta_cubic_coefficient(eta: &Real) -> Result<Real, AnalysisError> {
    let prec = eta.prec();
    if *eta <= Real::zero(8) || *eta >= Real::one(8) {
        return Err(AnalysisError::EtaOutOfRange { value: eta.to_f64() });
    }
    let sixth = Real::from_u32(prec, 6).recip();
    let third = Real::from_u32(prec, 3).recip();
    let half = Real::from_f64(prec, 0.5);
    Ok(&(&sixth + &(&third * &eta.powi(3))) - &(&half * &eta.square()))
}

/// 𝔤(x) = −ln(1−e^(−x)) for x > 0; strictly decreasing and positive.
pub fn g_function(x: &Real) -> Result<Real, AnalysisError> {
    if *x <= Real::zero(8) {
        return Err(AnalysisError::NonpositiveArgument { value: x.to_f64() });
    }
    // 1−e^(−x) = −expm1(−x), accurate for small x
    let one_minus = -&(-x).exp_m1();
    Ok(-&one_minus.ln())
}

/// 𝒢_{w1,w2}(ζ) = ∫_{w1}^{w2} 𝔤(ζx) dx, w2 = None meaning ∞.
///
/// Near the left endpoint the integrand has the log singularity
/// 𝔤(y) ~ −ln y; that part is integrated in closed form plus a smooth
/// remainder h(y) = 𝔤(y)+ln(y); the exponential tail is integrated on
/// doubling panels of 64-node Gauss–Legendre and truncated once
/// 𝔤(ζx) < 2^(−prec).
pub fn cal_g(w1: &Real, w2: Option<&Real>, zeta: &Real) -> Result<Real, AnalysisError> {
    let prec = w1.prec().max(zeta.prec());
    if *zeta <= Real::zero(8) || w1.is_sign_negative() {
        return Err(AnalysisError::BadInterval);
    }
    if let Some(w2) = w2 {
        if w2 <= w1 {
            return Err(AnalysisError::BadInterval);
        }
    }
    let (gl_nodes, gl_weights) = crate::mpnum::gauss_legendre(prec, 64);
    // truncate the improper tail where 𝔤(ζx) ≈ e^(−ζx) dies
    let cutoff_arg = Real::from_u32(prec, prec + 64) * Real::from_f64(prec, std::f64::consts::LN_2);
    let x_cut = &cutoff_arg / zeta;
    let w2_eff = match w2 {
        Some(w2) => w2.min_ref(&x_cut),
        None => x_cut.clone(),
    };
    if w2_eff <= *w1 {
        // pure tail beyond the cutoff: use one panel of the analytic bound
        // 𝔤(y) ≤ 2e^{-y} — negligible at this precision
        return Ok(Real::zero(prec));
    }

    // split point where ζx reaches 1 (log regime to the left)
    let split = {
        let s = zeta.recip();
        if s <= *w1 {
            w1.clone()
        } else {
            s.min_ref(&w2_eff)
        }
    };

    let mut total = Real::zero(prec);
    if split > *w1 {
        // ∫ −ln(ζx) dx = x(1 − ln(ζx)) evaluated on [w1, split]
        let log_part = {
            let at = |x: &Real| -> Real {
                if x.is_zero() {
                    Real::zero(prec)
                } else {
                    x * &(&Real::one(prec) - &(zeta * x).ln())
                }
            };
            &at(&split) - &at(w1)
        };
        total = &total + &log_part;
        // smooth remainder h(ζx) = 𝔤(ζx) + ln(ζx), h(0) = 0
        let h = |x: &Real| -> Real {
            if x.is_zero() {
                return Real::zero(prec);
            }
            let y = zeta * x;
            let g = g_function(&y).expect("positive argument");
            &g + &y.ln()
        };
        total = &total
            + &crate::mpnum::integrate_panel(w1, &split, &gl_nodes, &gl_weights, |x| h(x));
    }

    // exponential regime: doubling panels from split to w2_eff
    let mut a = split;
    while a < w2_eff {
        let doubled = &a * &Real::from_u32(prec, 2);
        let b = if doubled <= a {
            // a == 0 cannot happen here (split ≥ 1/ζ > 0)
            w2_eff.clone()
        } else {
            doubled.min_ref(&w2_eff)
        };
        total = &total
            + &crate::mpnum::integrate_panel(&a, &b, &gl_nodes, &gl_weights, |x| {
                g_function(&(zeta * x)).expect("positive argument")
            });
        a = b;
    }
    Ok(total)
}

/// The three θ-sums of one mode:
/// θ¹ = Σ_{j≤N₁, j≠n} 𝔤(Δ(λ_{N₁+1}−λⱼ)), θ² = Σ_{j<n} 𝔤(Δ(λₙ−λⱼ)),
/// θ³ = Σ_{j=n+1}^{N₁} 𝔤(Δ(λⱼ−λₙ)).
pub fn theta_sums(ctx: &AnalysisContext, n: usize) -> Result<ThetaTriple, AnalysisError> {
    let n1 = ctx.n1;
    if n == 0 || n > n1 {
        return Err(AnalysisError::IndexOutOfRange { idx: n, max: n1 });
    }
    if ctx.lambdas.len() < n1 + 1 {
        return Err(AnalysisError::IndexOutOfRange {
            idx: n1 + 1,
            max: ctx.lambdas.len(),
        });
    }
    let prec = ctx.lambdas.prec().max(ctx.delta.prec());
    let lam = &ctx.lambdas;
    let d = &ctx.delta;

    let mut t1 = Real::zero(prec);
    for j in 0..n1 {
        if j == n - 1 {
            continue;
        }
        t1 = &t1 + &g_function(&(d * &(&lam[n1] - &lam[j])))?;
    }
    let mut t2 = Real::zero(prec);
    for j in 0..n - 1 {
        t2 = &t2 + &g_function(&(d * &(&lam[n - 1] - &lam[j])))?;
    }
    let mut t3 = Real::zero(prec);
    for j in n..n1 {
        t3 = &t3 + &g_function(&(d * &(&lam[j] - &lam[n - 1])))?;
    }
    Ok(ThetaTriple {
        theta1: t1,
        theta2: t2,
        theta3: t3,
    })
}

/// Sandwich bounds for the θ-sums built from 𝒢 and 𝔤 at the context's
/// empirical (υ, Υ). Lower bounds for θ² (resp. θ³) apply for n > 1
/// (resp. n < N₁), matching the defining ranges.
pub struct ThetaBounds {
    pub theta1: (Real, Real),
    pub theta2: (Real, Real),
    pub theta3: (Real, Real),
}

pub fn theta_bounds(ctx: &AnalysisContext, n: usize) -> Result<ThetaBounds, AnalysisError> {
    let n1 = ctx.n1;
    if n == 0 || n > n1 {
        return Err(AnalysisError::IndexOutOfRange { idx: n, max: n1 });
    }
    let prec = ctx.lambdas.prec().max(ctx.delta.prec());
    let d = &ctx.delta;
    let ups = &ctx.growth.upsilon;
    let cap = &ctx.growth.upsilon_cap;
    let r = |v: usize| Real::from_u32(prec, v as u32);

    // θ¹: 𝒢₁,₂(ΔΥ(2N₁+1)) − 𝔤(ΔΥ(N₁+1−n)(2N₁+1)) ≤ θ¹
    //     θ¹ ≤ 𝒢₀,∞(ΔυN₁) − 𝔤(Δυ(N₁+1−n)(N₁+1))
    let one = Real::one(prec);
    let two = r(2);
    let lo1 = {
        let g_term = g_function(&(&(d * cap) * &(&r(n1 + 1 - n) * &r(2 * n1 + 1))))?;
        &cal_g(&one, Some(&two), &(&(d * cap) * &r(2 * n1 + 1)))? - &g_term
    };
    let hi1 = {
        let g_term = g_function(&(&(d * ups) * &(&r(n1 + 1 - n) * &r(n1 + 1))))?;
        &cal_g(&Real::zero(prec), None, &(&(d * ups) * &r(n1)))? - &g_term
    };
    // θ²: 𝒢₁,₂(ΔΥ(2n−1)) ≤ θ² ≤ 𝒢₀,∞(Δυ(n+1))
    let lo2 = cal_g(&one, Some(&two), &(&(d * cap) * &r(2 * n - 1)))?;
    let hi2 = cal_g(&Real::zero(prec), None, &(&(d * ups) * &r(n + 1)))?;
    // θ³: 𝒢₁,₂(ΔΥ(N₁+n+1)) ≤ θ³ ≤ 𝒢₀,∞(Δυ(2n+1))
    let lo3 = cal_g(&one, Some(&two), &(&(d * cap) * &r(n1 + n + 1)))?;
    let hi3 = cal_g(&Real::zero(prec), None, &(&(d * ups) * &r(2 * n + 1)))?;

    Ok(ThetaBounds {
        theta1: (lo1, hi1),
        theta2: (lo2, hi2),
        theta3: (lo3, hi3),
    })
}

/// Both routes to L²ₙ(φ_{N₁+1}): the direct Lagrange square and the
/// case-split exponential identity built from the θ-sums.
pub struct LsquaredPair {
    pub direct: Real,
    pub formula: Real,
}

pub fn lsquared_identity(ctx: &AnalysisContext, n: usize) -> Result<LsquaredPair, AnalysisError> {
    let n1 = ctx.n1;
    if n == 0 || n > n1 {
        return Err(AnalysisError::IndexOutOfRange { idx: n, max: n1 });
    }
    let prec = ctx.lambdas.prec().max(ctx.delta.prec());
    let nodes_all = ctx.nodes();
    let main = RealVec::from_fn(n1, |i| nodes_all[i].clone());
    let ln_val = lagrange_eval(&main, n, &nodes_all[n1])?;
    let direct = ln_val.square();

    let th = theta_sums(ctx, n)?;
    let two = Real::from_u32(prec, 2);
    let formula = if n == n1 {
        // e^(−2θ¹ + 2θ²)
        (&(&th.theta2 - &th.theta1) * &two).exp()
    } else {
        // −2Δ Σ_{j>n}(λⱼ−λₙ) − 2θ¹ (+ 2θ² when n>1) + 2θ³
        let mut gap = Real::zero(prec);
        for j in n..n1 {
            gap = &gap + &(&ctx.lambdas[j] - &ctx.lambdas[n - 1]);
        }
        let mut expo = -&(&(&ctx.delta * &gap) * &two);
        expo = &expo - &(&th.theta1 * &two);
        if n > 1 {
            expo = &expo + &(&th.theta2 * &two);
        }
        expo = &expo + &(&th.theta3 * &two);
        expo.exp()
    };
    Ok(LsquaredPair { direct, formula })
}

/// Elementary symmetric polynomial S_k and mean M_k = S_k/C(len,k),
/// accumulated by the one-pass per-element update.
pub struct SymmetricMeans {
    pub s_k: Real,
    pub m_k: Real,
}

pub fn symmetric_means(values: &RealVec, k: usize) -> Result<SymmetricMeans, AnalysisError> {
    let len = values.len();
    if k == 0 || k > len {
        return Err(AnalysisError::KOutOfRange { k, max: len });
    }
    let prec = values.prec();
    let s = elementary_symmetric(values, k);
    let binom = binomial(prec, len, k);
    Ok(SymmetricMeans {
        m_k: &s / &binom,
        s_k: s,
    })
}

/// All S_0..S_k in one pass: e[j] += v·e[j−1] per element, descending j.
fn elementary_symmetric_all(values: &RealVec, k: usize) -> Vec<Real> {
    let prec = values.prec();
    let mut e = vec![Real::zero(prec); k + 1];
    e[0] = Real::one(prec);
    for v in values.iter() {
        for j in (1..=k).rev() {
            e[j] = &e[j] + &(v * &e[j - 1]);
        }
    }
    e
}

pub fn elementary_symmetric(values: &RealVec, k: usize) -> Real {
    elementary_symmetric_all(values, k).pop().unwrap()
}

fn binomial(prec: u32, n: usize, k: usize) -> Real {
    let mut acc = Real::one(prec);
    for i in 0..k {
        acc = &(&acc * &Real::from_u32(prec, (n - i) as u32)) / &Real::from_u32(prec, (i + 1) as u32);
    }
    acc
}

/// MacLaurin chain M₁ ≥ M₂^(1/2) ≥ … ≥ M_len^(1/len) for nonnegative
/// values, checked through the cross-power form M_ℓ^k ≤ M_k^ℓ.
pub fn maclaurin_check(values: &RealVec) -> Result<bool, AnalysisError> {
    for v in values.iter() {
        if v.is_sign_negative() && !v.is_zero() {
            return Err(AnalysisError::NegativeValue);
        }
    }
    let len = values.len();
    let prec = values.prec();
    let all = elementary_symmetric_all(values, len);
    let means: Vec<Real> = (1..=len)
        .map(|k| &all[k] / &binomial(prec, len, k))
        .collect();
    // tolerate rounding at the equality case
    let slack = Real::from_f64(prec, 0.5).powi(prec as i32 / 2);
    for k in 1..=len {
        for l in k..=len {
            let lhs = means[l - 1].powi(k as i32);
            let rhs = means[k - 1].powi(l as i32);
            let bound = &rhs + &(&slack * &rhs.abs());
            if lhs > bound {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Imaginary error function ℰ(x) = (2/√π)∫₀ˣ e^(t²) dt by its globally
/// convergent Taylor series, truncated once a term falls below
/// 2^(−prec)·partial-sum.
pub fn erfi(x: &Real) -> Real {
    let prec = x.prec();
    if x.is_zero() {
        return Real::zero(prec);
    }
    let x2 = x.square();
    let mut term = x.clone(); // x^(2k+1)/k! at k=0
    let mut sum = term.clone(); // term/(2k+1) accumulated; k=0: x/1
    let cutoff = Real::from_f64(prec, 0.5).powi(prec as i32);
    let mut k = 1u32;
    loop {
        term = &(&term * &x2) / &Real::from_u32(prec, k);
        let contrib = &term / &Real::from_u32(prec, 2 * k + 1);
        sum = &sum + &contrib;
        if contrib.abs() <= &cutoff * &sum.abs() {
            break;
        }
        k += 1;
        if k > 100_000 {
            break;
        }
    }
    let two_over_sqrt_pi = &Real::from_u32(prec, 2) / &Real::pi(prec).sqrt();
    &two_over_sqrt_pi * &sum
}

/// τ = (1−e^(−3Δ★υ))/3 ∈ (0, 1/3): a uniform relative node-separation
/// constant for all Δ ≥ Δ★.
pub fn separation_tau(delta_star: &Real, upsilon: &Real) -> Result<Real, AnalysisError> {
    if *delta_star <= Real::zero(8) {
        return Err(AnalysisError::NonpositiveArgument {
            value: delta_star.to_f64(),
        });
    }
    if *upsilon <= Real::zero(8) {
        return Err(AnalysisError::NonpositiveArgument {
            value: upsilon.to_f64(),
        });
    }
    let prec = delta_star.prec().max(upsilon.prec());
    let three = Real::from_u32(prec, 3);
    let arg = &(&three * delta_star) * upsilon;
    let one_minus = -&(-&arg).exp_m1();
    Ok(&one_minus / &three)
}

/// Unperturbed moments m_k = Σ yₙφₙᵏ for k = 0..2N₁−1 (ε forced to 0).
fn unperturbed_moments(model: &SpectralModel) -> Vec<Real> {
    let prec = model.prec();
    let nodes = model.nodes();
    let count = 2 * model.n1;
    let mut powers = vec![Real::one(prec); model.n1];
    let mut m = Vec::with_capacity(count);
    for _ in 0..count {
        let mut s = Real::zero(prec);
        for n in 0..model.n1 {
            s = &s + &(&model.amplitudes[n] * &powers[n]);
        }
        m.push(s);
        for (p, node) in powers.iter_mut().zip(nodes.iter()) {
            *p = &*p * node;
        }
    }
    m
}

/// Perturbed moments m̃_k including the ε-tail.
fn perturbed_moments(model: &SpectralModel) -> Vec<Real> {
    crate::spectral::synthesize_trace(model).samples.0
}

fn prony_det_matrix(moments: &[Real], n1: usize, z: &Real, prec: u32) -> RealMatrix {
    RealMatrix::from_fn(n1 + 1, n1 + 1, |i, j| {
        if i == 0 {
            z.with_prec(prec).powi(j as i32)
        } else {
            moments[(i - 1) + j].clone()
        }
    })
}

/// The two routes to the unperturbed homogeneous Prony polynomial:
/// det 𝔓(z) against the closed product form
/// (Πyₖ)·(Π_{s<t}(φ_t−φ_s)²)·(Π_s(φ_s−z)), equivalently
/// (−1)^{N₁}(Πyₖ)(Π(φ_t−φ_s)²)(Π_s(z−φ_s)); the two sign factors cancel,
/// as the N₁ = 1 determinant m₁ − m₀z = y₁(φ₁−z) pins down.
pub struct PbarPair {
    pub det_form: Real,
    pub product_form: Real,
}

pub fn pbar_two_ways(model: &SpectralModel, z: &Real) -> Result<PbarPair, AnalysisError> {
    if model.n1 > 8 {
        return Err(AnalysisError::SizeCap {
            what: "pbar determinant route capped at N₁ ≤ 8",
        });
    }
    let prec = model.prec().max(z.prec());
    let m = unperturbed_moments(model);
    let det_form = bareiss_determinant(&prony_det_matrix(&m, model.n1, z, prec));

    let nodes = model.nodes();
    let mut prod = Real::one(prec);
    for k in 0..model.n1 {
        prod = &prod * &model.amplitudes[k];
    }
    for t in 0..model.n1 {
        for s in 0..t {
            prod = &prod * &(&nodes[t] - &nodes[s]).square();
        }
    }
    for s in 0..model.n1 {
        prod = &prod * &(&nodes[s] - z);
    }
    Ok(PbarPair {
        det_form,
        product_form: prod,
    })
}

/// Entry bookkeeping of the combinatorial discrepancy expansion for a
/// single tail mode. `formula` is the triple sum over (γ, β∋1, ω);
/// `oracle` is det 𝔔(z) − det 𝔓(z) computed directly.
pub struct DiscrepancyPair {
    pub formula: Real,
    pub oracle: Real,
}

pub fn discrepancy_formula(model: &SpectralModel, z: &Real) -> Result<DiscrepancyPair, AnalysisError> {
    if model.n2 != 1 {
        return Err(AnalysisError::UnsupportedTail);
    }
    let n1 = model.n1;
    if !(2..=4).contains(&n1) {
        return Err(AnalysisError::SizeCap {
            what: "discrepancy expansion implemented for N₁ in {2,3,4}",
        });
    }
    let prec = model.prec().max(z.prec());
    let nodes = model.nodes();
    let phi_tail = nodes[n1].clone();
    let y_tail = model.amplitudes[n1].clone();

    let mut total = Real::zero(prec);
    // γ^c ranges over [N₁+1]; β^c over [N₁+1]\{1}; ω^c over [N₁]
    for gamma_c in 1..=n1 + 1 {
        let gamma: Vec<usize> = (1..=n1 + 1).filter(|&q| q != gamma_c).collect();
        let i1 = gamma[0];
        for beta_c in 2..=n1 + 1 {
            let beta: Vec<usize> = (1..=n1 + 1).filter(|&q| q != beta_c).collect();
            let j1 = beta[1]; // β = (1, j₁, …)
            let a_pow = i1 - 1;
            let b_pow = (j1 - 2) + (i1 - 1);
            let sign_exp: usize = gamma.iter().sum::<usize>() + beta.iter().sum::<usize>();
            let sign = if sign_exp.is_multiple_of(2) { 1i32 } else { -1i32 };

            for omega_c in 1..=n1 {
                let omega: Vec<usize> = (1..=n1).filter(|&q| q != omega_c).collect();
                let phi_omega: Vec<Real> =
                    omega.iter().map(|&q| nodes[q - 1].clone()).collect();

                let mut term = &y_tail * &phi_tail.powi((beta_c + gamma_c) as i32 - 3);
                if sign < 0 {
                    term = -&term;
                }
                for &q in &omega {
                    term = &term * &model.amplitudes[q - 1];
                }
                term = &term * &z.with_prec(prec).powi(a_pow as i32);
                for p in &phi_omega {
                    term = &term * &p.powi(b_pow as i32);
                }
                for p in &phi_omega {
                    term = &term * &(p - z);
                }
                // 𝔐: symmetric polynomial in (z, φ_ω) unless γ^c ∈ {1, N₁+1}
                if gamma_c != 1 && gamma_c != n1 + 1 {
                    let mut vals = vec![z.with_prec(prec)];
                    vals.extend(phi_omega.iter().cloned());
                    term = &term * &elementary_symmetric(&RealVec(vals), n1 + 1 - gamma_c);
                }
                // 𝔑: symmetric polynomial in φ_ω unless β^c ∈ {2, N₁+1}
                if beta_c != 2 && beta_c != n1 + 1 {
                    term = &term
                        * &elementary_symmetric(&RealVec(phi_omega.clone()), n1 + 1 - beta_c);
                }
                for t in 0..phi_omega.len() {
                    for s in 0..t {
                        term = &term * &(&phi_omega[t] - &phi_omega[s]).square();
                    }
                }
                total = &total + &term;
            }
        }
    }
    let formula = &total * &model.epsilon;

    let m0 = unperturbed_moments(model);
    let m1 = perturbed_moments(model);
    let det_p = bareiss_determinant(&prony_det_matrix(&m0, n1, z, prec));
    let det_q = bareiss_determinant(&prony_det_matrix(&m1, n1, z, prec));
    Ok(DiscrepancyPair {
        formula,
        oracle: &det_q - &det_p,
    })
}

/// Higher-order adjugate entries per the row/column-deletion definition:
/// [adj_r(L)]_{ζ,ξ} = (−1)^(Σζ+Σξ)·det(L with rows ξ and columns ζ deleted),
/// over lexicographic r-subsets. Returned as a flat matrix of entries.
pub fn higher_order_adjugate(l: &RealMatrix, order: usize) -> Vec<Vec<Real>> {
    let n = l.rows();
    assert!(l.is_square() && order <= n);
    let subsets = k_subsets(n, order);
    let prec = l.prec();
    subsets
        .iter()
        .map(|zeta| {
            subsets
                .iter()
                .map(|xi| {
                    let keep_rows: Vec<usize> =
                        (1..=n).filter(|q| !xi.contains(q)).collect();
                    let keep_cols: Vec<usize> =
                        (1..=n).filter(|q| !zeta.contains(q)).collect();
                    let sub = RealMatrix::from_fn(keep_rows.len(), keep_cols.len(), |i, j| {
                        l[(keep_rows[i] - 1, keep_cols[j] - 1)].clone()
                    });
                    let det = if keep_rows.is_empty() {
                        Real::one(prec)
                    } else {
                        bareiss_determinant(&sub)
                    };
                    let s: usize =
                        zeta.iter().sum::<usize>() + xi.iter().sum::<usize>();
                    if s.is_multiple_of(2) {
                        det
                    } else {
                        -&det
                    }
                })
                .collect()
        })
        .collect()
}

/// All k-subsets of {1..n} in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..=n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(1, n, k, &mut cur, &mut out);
    out
}

/// The rank-one tail matrix D of the single-tail expansion: a zero first
/// row, then rows φ^{i−1+j} scaled by y_tail.
pub fn tail_matrix(model: &SpectralModel) -> Result<RealMatrix, AnalysisError> {
    if model.n2 != 1 {
        return Err(AnalysisError::UnsupportedTail);
    }
    let n1 = model.n1;
    let prec = model.prec();
    let nodes = model.nodes();
    let phi = &nodes[n1];
    let y = &model.amplitudes[n1];
    Ok(RealMatrix::from_fn(n1 + 1, n1 + 1, |i, j| {
        if i == 0 {
            Real::zero(prec)
        } else {
            y * &phi.powi((i - 1 + j) as i32)
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn quadratic_ctx(prec: u32, n1: usize, delta: f64) -> AnalysisContext {
        let lambdas = RealVec::from_fn(n1 + 1, |i| {
            Real::from_u32(prec, (((i + 1) * (i + 1)) as u32).max(1))
        });
        AnalysisContext::new(lambdas, Real::from_f64(prec, delta), n1)
    }

    #[test]
    fn psi_values() {
        assert_eq!(psi(3, 3).unwrap(), 0);
        assert_eq!(psi(1, 3).unwrap(), 11);
        assert_eq!(psi(2, 4).unwrap(), 17);
        assert!(psi(0, 3).is_err());
        assert!(psi(4, 3).is_err());
    }

    #[test]
    fn psi_monotone_decreasing_in_n() {
        for n1 in 2..=100usize {
            let mut prev = psi(1, n1).unwrap();
            for n in 2..=n1 {
                let cur = psi(n, n1).unwrap();
                assert!(cur <= prev, "Ψ({n};{n1}) increased");
                prev = cur;
            }
        }
    }

    #[test]
    fn psi_cubic_lower_bound_scan() {
        // Ψ(⌊ηN₁⌋;N₁) ≥ a(η)N₁³ for all N₁ in [N₀(η), 200]
        let prec = 128;
        for eta in [0.3f64, 0.5, 0.7] {
            let a = eta_cubic_coefficient(&Real::from_f64(prec, eta))
                .unwrap()
                .to_f64();
            let mut n0 = None;
            for start in (1..=200usize).rev() {
                let n = ((eta * start as f64).floor() as usize).max(1);
                let lhs = psi(n, start).unwrap() as f64;
                if lhs < a * (start as f64).powi(3) {
                    n0 = Some(start + 1);
                    break;
                }
            }
            let n0 = n0.unwrap_or(1);
            assert!(n0 <= 10, "η={eta}: bound only holds from N₀={n0}");
            println!("psi cubic bound: eta={eta} holds for N₁ ≥ {n0}");
        }
    }

    #[test]
    fn eta_cubic_values() {
        let prec = 256;
        let v = eta_cubic_coefficient(&Real::from_f64(prec, 0.5)).unwrap();
        assert!((v.to_f64() - 1.0 / 12.0).abs() < 1e-40);
        let near0 = eta_cubic_coefficient(&Real::from_f64(prec, 1e-9)).unwrap();
        assert!((near0.to_f64() - 1.0 / 6.0).abs() < 1e-9);
        let near1 = eta_cubic_coefficient(&Real::from_f64(prec, 1.0 - 1e-9)).unwrap();
        assert!(near1.to_f64().abs() < 1e-8);
        assert!(eta_cubic_coefficient(&Real::from_f64(prec, 1.0)).is_err());
    }

    #[test]
    fn g_function_values() {
        let prec = 256;
        // 𝔤(ln 2) = ln 2
        let ln2 = Real::from_u32(prec, 2).ln();
        let v = g_function(&ln2).unwrap();
        assert!((&v - &ln2).abs().to_f64() < 1e-60);
        // strictly decreasing instance
        assert!(g_function(&Real::from_f64(prec, 10.0)).unwrap()
            < g_function(&Real::one(prec)).unwrap());
        // small-argument value vs the log series: 𝔤(1e−3) ≈ 6.9083
        let small = g_function(&Real::from_f64(prec, 1e-3)).unwrap();
        // series: −ln(x − x²/2 + x³/6 − x⁴/24 + …)
        let x = Real::from_f64(prec, 1e-3);
        let series_arg = &(&(&x - &(&x.square() * &Real::from_f64(prec, 0.5)))
            + &(&x.powi(3) / &Real::from_u32(prec, 6)))
            - &(&x.powi(4) / &Real::from_u32(prec, 24));
        let oracle = -&series_arg.ln();
        assert!((&small - &oracle).abs().to_f64() < 1e-12);
        assert!((small.to_f64() - 6.9083).abs() < 1e-3);
        assert!(g_function(&Real::zero(prec)).is_err());
    }

    #[test]
    fn g_strictly_decreasing_sampled() {
        let prec = 128;
        let mut prev: Option<Real> = None;
        for i in 1..=40 {
            let x = Real::from_f64(prec, 0.05 * i as f64);
            let v = g_function(&x).unwrap();
            if let Some(p) = prev {
                assert!(v < p);
            }
            prev = Some(v);
        }
    }

    #[test]
    fn cal_g_domain_and_zeta_monotonicity() {
        let prec = 256;
        let one = Real::one(prec);
        let two = Real::from_u32(prec, 2);
        let z = Real::from_f64(prec, 1.5);
        let g12 = cal_g(&one, Some(&two), &z).unwrap();
        let g1inf = cal_g(&one, None, &z).unwrap();
        assert!(g12 < g1inf);
        // decreasing in ζ on a sampled grid
        let mut prev: Option<Real> = None;
        for i in 1..=10 {
            let zeta = Real::from_f64(prec, 0.4 * i as f64);
            let v = cal_g(&one, None, &zeta).unwrap();
            if let Some(p) = prev {
                assert!(v < p, "𝒢 must decrease in ζ");
            }
            prev = Some(v);
        }
        // large-ζ collapse: 𝒢₁,∞(50) < 1e−20
        let big = cal_g(&one, None, &Real::from_f64(prec, 50.0)).unwrap();
        assert!(big < Real::from_f64(prec, 1e-20));
        assert!(cal_g(&two, Some(&one), &z).is_err());
    }

    #[test]
    fn cal_g_matches_dilogarithm_series_oracle() {
        // independent route: ∫ 𝔤(ζx) dx = (1/ζ)[Li₂(e^(−ζw₁)) − Li₂(e^(−ζw₂))]
        // from the termwise-integrated series 𝔤(y) = Σ_k e^(−ky)/k
        let prec = 512;
        let li2 = |x: &Real| -> Real {
            // Li₂ on [0,1]; Li₂(1) = π²/6 exactly, else a geometric series
            if (x - &Real::one(prec)).abs().to_f64() < 1e-30 {
                return &Real::pi(prec).square() / &Real::from_u32(prec, 6);
            }
            let cutoff = Real::from_f64(prec, 0.5).powi(prec as i32 + 16);
            let mut acc = Real::zero(prec);
            let mut pow = Real::one(prec);
            for k in 1..500_000u32 {
                pow = &pow * x;
                let term = &pow / &Real::from_u32(prec, k * k);
                acc = &acc + &term;
                if term.abs() <= cutoff {
                    break;
                }
            }
            acc
        };
        let li2_diff = |w1: f64, w2: Option<f64>, zeta: f64| -> Real {
            let zr = Real::from_f64(prec, zeta);
            let a1 = (-&(&zr * &Real::from_f64(prec, w1))).exp();
            let v1 = li2(&a1);
            let v2 = match w2 {
                Some(w2) => li2(&(-&(&zr * &Real::from_f64(prec, w2))).exp()),
                None => Real::zero(prec),
            };
            &(&v1 - &v2) / &zr
        };
        let cases: &[(f64, Option<f64>, f64)] =
            &[(0.0, Some(1.0), 1.0), (1.0, None, 2.0), (0.5, Some(3.0), 0.7)];
        for &(w1, w2, zeta) in cases {
            let got = cal_g(
                &Real::from_f64(prec, w1),
                w2.map(|v| Real::from_f64(prec, v)).as_ref(),
                &Real::from_f64(prec, zeta),
            )
            .unwrap();
            let oracle = li2_diff(w1, w2, zeta);
            let err = (&got - &oracle).abs().to_f64();
            assert!(err < 1e-20, "case ({w1},{w2:?},{zeta}): err {err:e}");
        }
    }

    #[test]
    fn theta_trivial_zeros_and_hand_expansion() {
        let prec = 256;
        let ctx = quadratic_ctx(prec, 4, 1.0);
        let t_first = theta_sums(&ctx, 1).unwrap();
        assert!(t_first.theta2.is_zero());
        let t_last = theta_sums(&ctx, 4).unwrap();
        assert!(t_last.theta3.is_zero());
        // λₙ = n², Δ = 1, N₁ = 4, n = 2: θ³ = 𝔤(5) + 𝔤(12)
        let t2 = theta_sums(&ctx, 2).unwrap();
        let oracle = &g_function(&Real::from_u32(prec, 5)).unwrap()
            + &g_function(&Real::from_u32(prec, 12)).unwrap();
        assert!((&t2.theta3 - &oracle).abs().to_f64() < 1e-60);
    }

    #[test]
    fn theta_sandwich_bounds_quadratic() {
        // λₙ = n² (υ = Υ = 1): every θ lies inside its 𝒢/𝔤 sandwich
        let prec = 320;
        for n1 in [5usize, 12, 20] {
            for delta in [0.1f64, 1.0] {
                let ctx = quadratic_ctx(prec, n1, delta);
                for n in 1..=n1 {
                    let th = theta_sums(&ctx, n).unwrap();
                    let b = theta_bounds(&ctx, n).unwrap();
                    assert!(
                        th.theta1 >= b.theta1.0 && th.theta1 <= b.theta1.1,
                        "θ¹ out of sandwich at n={n} N₁={n1} Δ={delta}"
                    );
                    if n > 1 {
                        assert!(
                            th.theta2 >= b.theta2.0 && th.theta2 <= b.theta2.1,
                            "θ² out of sandwich at n={n} N₁={n1} Δ={delta}"
                        );
                    }
                    if n < n1 {
                        assert!(
                            th.theta3 >= b.theta3.0 && th.theta3 <= b.theta3.1,
                            "θ³ out of sandwich at n={n} N₁={n1} Δ={delta}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn lsquared_direct_equals_formula() {
        let prec = 256;
        // N₁=2, n=2, λ = {1,4,9}, Δ = 1
        let ctx = quadratic_ctx(prec, 2, 1.0);
        let pair = lsquared_identity(&ctx, 2).unwrap();
        let rel = (&(&pair.direct - &pair.formula).abs() / &pair.direct.abs()).to_f64();
        assert!(rel < 1e-30, "rel = {rel:e}");
        // N₁ = 1: direct = 1 (empty product), formula = e^0 = 1
        let ctx1 = quadratic_ctx(prec, 1, 0.7);
        let p1 = lsquared_identity(&ctx1, 1).unwrap();
        assert!((p1.direct.to_f64() - 1.0).abs() < 1e-40);
        assert!((p1.formula.to_f64() - 1.0).abs() < 1e-40);
    }

    #[test]
    fn lsquared_sweep_self_check() {
        let prec = 256;
        let digits = crate::mpnum::decimal_digits(prec) as i32;
        let bound = Real::from_f64(prec, 10.0).powi(-(digits - 10));
        let ctx = quadratic_ctx(prec, 10, 0.1);
        for n in 1..=10 {
            let pair = lsquared_identity(&ctx, n).unwrap();
            let rel = &(&pair.direct - &pair.formula).abs() / &pair.direct.abs();
            assert!(rel <= bound, "n={n}: rel {:?}", rel.to_f64());
        }
    }

    #[test]
    fn symmetric_means_cases() {
        let prec = 256;
        let vals = RealVec::from_f64s(prec, &[1.0, 2.0, 3.0]);
        let sm = symmetric_means(&vals, 2).unwrap();
        assert!((sm.s_k.to_f64() - 11.0).abs() < 1e-40);
        assert!((sm.m_k.to_f64() - 11.0 / 3.0).abs() < 1e-40);
        let m1 = symmetric_means(&vals, 1).unwrap();
        assert!((m1.m_k.to_f64() - 2.0).abs() < 1e-40);
        let mlen = symmetric_means(&vals, 3).unwrap();
        assert!((mlen.s_k.to_f64() - 6.0).abs() < 1e-40);
        assert!(symmetric_means(&vals, 0).is_err());
        assert!(symmetric_means(&vals, 4).is_err());
    }

    #[test]
    fn maclaurin_chain_examples() {
        let prec = 256;
        assert!(maclaurin_check(&RealVec::from_f64s(prec, &[1.0, 2.0, 3.0])).unwrap());
        assert!(maclaurin_check(&RealVec::from_f64s(prec, &[2.0, 2.0, 2.0, 2.0])).unwrap());
        assert!(maclaurin_check(&RealVec::from_f64s(prec, &[-1.0, 2.0])).is_err());
    }

    #[test]
    fn maclaurin_thousand_random_vectors() {
        let prec = 192;
        let mut rng = SplitMix64::new(2024);
        for _ in 0..1000 {
            let len = 2 + (rng.next_u64() % 11) as usize;
            let vals = RealVec::from_fn(len, |_| rng.uniform_real(prec, 0.0, 10.0));
            assert!(maclaurin_check(&vals).unwrap());
        }
    }

    #[test]
    fn erfi_values() {
        let prec = 512;
        assert!(erfi(&Real::zero(prec)).is_zero());
        assert!(erfi(&Real::one(prec)) < erfi(&Real::from_u32(prec, 2)));
        // asymptotic check at x = 10 against a quadrature oracle
        let x = Real::from_f64(prec, 10.0);
        let series = erfi(&x);
        let (nodes, weights) = crate::mpnum::gauss_legendre(prec, 64);
        // ∫₀¹⁰ e^(t²) dt on 40 panels
        let mut integral = Real::zero(prec);
        for p in 0..40 {
            let a = Real::from_f64(prec, 0.25 * p as f64);
            let b = Real::from_f64(prec, 0.25 * (p + 1) as f64);
            integral = &integral
                + &crate::mpnum::integrate_panel(&a, &b, &nodes, &weights, |t| t.square().exp());
        }
        let oracle = &(&Real::from_u32(prec, 2) / &Real::pi(prec).sqrt()) * &integral;
        let rel = (&(&series - &oracle).abs() / &oracle).to_f64();
        assert!(rel < 1e-40, "rel {rel:e}");
        // e^(−x²)ℰ(x) ≈ 0.056701 at x = 10
        let scaled = &(-&x.square()).exp() * &series;
        assert!((scaled.to_f64() - 0.056701).abs() < 1e-5);
    }

    #[test]
    fn separation_tau_values() {
        let prec = 256;
        let tau = separation_tau(&Real::from_f64(prec, 0.1), &Real::one(prec)).unwrap();
        assert!((tau.to_f64() - (1.0 - (-0.3f64).exp()) / 3.0).abs() < 1e-15);
        assert!((tau.to_f64() - 0.086394).abs() < 1e-5);
        // limit 1/3 for large Δ★υ
        let big = separation_tau(&Real::from_f64(prec, 100.0), &Real::one(prec)).unwrap();
        assert!((big.to_f64() - 1.0 / 3.0).abs() < 1e-40);
        assert!(separation_tau(&Real::zero(prec), &Real::one(prec)).is_err());
    }

    #[test]
    fn separation_tau_pairwise_gap_check() {
        // λₙ = n², Δ = 0.1, N₁ = 30: min relative node gap ≥ 2τ
        let prec = 512;
        let n1 = 30;
        let delta = Real::from_f64(prec, 0.1);
        let tau = separation_tau(&delta, &Real::one(prec)).unwrap();
        let nodes: Vec<Real> = (1..=n1)
            .map(|n| (-&(&delta * &Real::from_u32(prec, (n * n) as u32))).exp())
            .collect();
        let two_tau = &tau * &Real::from_u32(prec, 2);
        for n in 0..n1 as usize {
            for j in 0..n1 as usize {
                if j == n {
                    continue;
                }
                let gap = &(&nodes[j] - &nodes[n]).abs() / &nodes[n];
                assert!(gap >= two_tau, "gap at (n={}, j={})", n + 1, j + 1);
            }
        }
    }

    #[test]
    fn pbar_routes_agree() {
        let prec = 512;
        // N₁ = 1 hand case: det [[1, z],[m₀, m₁]] = m₁ − m₀z = −y₁(z−φ₁)
        let m1 = SpectralModel::powerlaw(prec, 1.0, 2.0, 1, 0, 0.0, 0.4);
        let z = Real::from_f64(prec, 0.3);
        let p1 = pbar_two_ways(&m1, &z).unwrap();
        let rel = (&(&p1.det_form - &p1.product_form).abs()
            / &p1.product_form.abs())
            .to_f64();
        assert!(rel < 1e-100);
        // N₁ = 2 random-ish model
        let m2 = SpectralModel::new(
            RealVec::from_f64s(prec, &[0.8, 2.3]),
            RealVec::from_f64s(prec, &[1.4, -0.6]),
            2,
            0,
            Real::zero(prec),
            Real::from_f64(prec, 0.9),
        )
        .unwrap();
        let p2 = pbar_two_ways(&m2, &z).unwrap();
        let rel2 = (&(&p2.det_form - &p2.product_form).abs()
            / &p2.product_form.abs())
            .to_f64();
        assert!(rel2 < 1e-40, "rel {rel2:e}");
        // z at a node: both vanish
        let node = m2.nodes()[0].clone();
        let p3 = pbar_two_ways(&m2, &node).unwrap();
        assert!(p3.product_form.is_zero() || p3.product_form.abs().to_f64() < 1e-100);
        assert!(p3.det_form.abs().to_f64() < 1e-100);
    }

    #[test]
    fn discrepancy_matches_determinant_difference() {
        let prec = 512;
        let model = SpectralModel::powerlaw(prec, 1.0, 2.0, 2, 1, 1e-3, 1.0);
        let z = Real::from_f64(prec, 0.2);
        let pair = discrepancy_formula(&model, &z).unwrap();
        let rel = (&(&pair.formula - &pair.oracle).abs() / &pair.oracle.abs()).to_f64();
        assert!(rel < 1e-60, "rel {rel:e}");
    }

    #[test]
    fn discrepancy_zero_at_zero_epsilon_and_linear_in_epsilon() {
        let prec = 384;
        let base = SpectralModel::powerlaw(prec, 1.0, 2.0, 3, 1, 0.0, 0.8);
        let z = Real::from_f64(prec, 0.4);
        let p0 = discrepancy_formula(&base, &z).unwrap();
        assert!(p0.formula.is_zero());
        assert!(p0.oracle.abs().to_f64() < 1e-90);
        // linearity: formula(2ε)/formula(ε) = 2 exactly
        let m1 = SpectralModel::powerlaw(prec, 1.0, 2.0, 3, 1, 1e-5, 0.8);
        let m2 = SpectralModel::powerlaw(prec, 1.0, 2.0, 3, 1, 2e-5, 0.8);
        let f1 = discrepancy_formula(&m1, &z).unwrap().formula;
        let f2 = discrepancy_formula(&m2, &z).unwrap().formula;
        let ratio = (&f2 / &f1).to_f64();
        assert!((ratio - 2.0).abs() < 1e-60);
    }

    #[test]
    fn discrepancy_guards() {
        let prec = 128;
        let bad_tail = SpectralModel::powerlaw(prec, 1.0, 2.0, 3, 2, 1e-3, 0.5);
        assert!(matches!(
            discrepancy_formula(&bad_tail, &Real::from_f64(prec, 0.5)),
            Err(AnalysisError::UnsupportedTail)
        ));
        let too_big = SpectralModel::powerlaw(prec, 1.0, 2.0, 5, 1, 1e-3, 0.5);
        assert!(matches!(
            discrepancy_formula(&too_big, &Real::from_f64(prec, 0.5)),
            Err(AnalysisError::SizeCap { .. })
        ));
    }

    #[test]
    fn tail_matrix_adjugates_vanish() {
        // rank-1 D: all adjugates of order ≤ N₁−1 vanish identically
        let prec = 256;
        for n1 in 2..=4usize {
            let model = SpectralModel::powerlaw(prec, 1.0, 2.0, n1, 1, 1e-4, 0.6);
            let d = tail_matrix(&model).unwrap();
            for order in 0..n1 {
                let adj = higher_order_adjugate(&d, order);
                for row in &adj {
                    for v in row {
                        assert!(
                            v.abs().to_f64() < 1e-60,
                            "adj_{order} entry {:e} at N₁={n1}",
                            v.to_f64()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn tail_matrix_order_n1_entries_closed_form() {
        // s = 1 layer: [adj_{N₁}(D)]_{γ,β} = ±y φ^(β^c+γ^c−3) when 1 ∈ β
        let prec = 256;
        let n1 = 3usize;
        let model = SpectralModel::powerlaw(prec, 1.0, 2.0, n1, 1, 1e-4, 0.6);
        let d = tail_matrix(&model).unwrap();
        let adj = higher_order_adjugate(&d, n1);
        let subsets = k_subsets(n1 + 1, n1);
        let phi = model.nodes()[n1].clone();
        let y = model.amplitudes[n1].clone();
        for (zi, zeta) in subsets.iter().enumerate() {
            for (xi_i, xi) in subsets.iter().enumerate() {
                let got = &adj[zi][xi_i];
                if !xi.contains(&1) {
                    assert!(got.abs().to_f64() < 1e-70, "should vanish without 1∈β");
                    continue;
                }
                let beta_c: usize = (1..=n1 + 1).find(|q| !xi.contains(q)).unwrap();
                let gamma_c: usize = (1..=n1 + 1).find(|q| !zeta.contains(q)).unwrap();
                let s: usize = zeta.iter().sum::<usize>() + xi.iter().sum::<usize>();
                let mut expect = &y * &phi.powi((beta_c + gamma_c) as i32 - 3);
                if !s.is_multiple_of(2) {
                    expect = -&expect;
                }
                let err = (got - &expect).abs().to_f64();
                assert!(err < 1e-60, "entry (ζ={zeta:?}, ξ={xi:?}): {err:e}");
            }
        }
    }

    #[test]
    fn vandermonde_symmetric_function_identity() {
        // det of the column-deleted Vandermonde = 𝔖_{m−k}·Π(χⱼ−χᵢ)
        let prec = 320;
        let mut rng = SplitMix64::new(31);
        for m in 2..=5usize {
            let chi = RealVec::from_fn(m, |i| {
                Real::from_f64(prec, 0.1 + 0.17 * i as f64 + 0.05 * rng.next_f64())
            });
            for k in 1..=m {
                // m×m matrix: columns χ^0..χ^m with column k deleted
                let mat = RealMatrix::from_fn(m, m, |i, j| {
                    let pow = if j < k { j } else { j + 1 };
                    chi[i].powi(pow as i32)
                });
                let det = bareiss_determinant(&mat);
                let mut vand = Real::one(prec);
                for j in 0..m {
                    for i in 0..j {
                        vand = &vand * &(&chi[j] - &chi[i]);
                    }
                }
                let sym = elementary_symmetric(&chi, m - k);
                let expect = &sym * &vand;
                let err = (&det - &expect).abs().to_f64();
                let scale = expect.abs().to_f64().max(1e-300);
                assert!(err / scale < 1e-60, "m={m} k={k}: rel {:e}", err / scale);
            }
        }
    }
}
