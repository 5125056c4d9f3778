//! First-order condition numbers of the structured-noise recovery problem:
//! the analytic Hermite-basis expressions, their empirical Prony
//! counterparts, regime sweeps with decay-slope fits, and the Gautschi
//! Vandermonde-inverse diagnostic.
//!
//! Empirical condition numbers divide a recovered-minus-true parameter by
//! the noise intensity. Measuring decays like e^(−cN₁³) demands that both
//! the synthesized trace and the Prony solve carry enough headroom beyond
//! the reporting precision; the sweep derives that headroom from the model
//! (≈ Δ·Σλⱼ·log₂e extra bits) and rounds results back, so the reported
//! precision governs the data while rounding noise stays below the signal.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mpnum::{MpError, Real, RealVec};
use crate::prony::{self, PronyError};
use crate::spectral::{synthesize_trace, SpectralModel};

#[derive(Debug, Error)]
pub enum CondError {
    #[error("duplicate interpolation nodes")]
    DuplicateNodes,
    #[error("index {idx} out of range 1..={max}")]
    IndexOutOfRange { idx: usize, max: usize },
    #[error("empirical condition numbers require epsilon > 0")]
    EpsilonZero,
    #[error("kappa value outside (0,1): {value}")]
    KappaOutOfRange { value: f64 },
    #[error("slope fit needs at least 4 points, got {got}")]
    TooFewPoints { got: usize },
    #[error("recovery lost mode {n} during matching")]
    RecoveryFailed { n: usize },
    #[error(transparent)]
    Prony(#[from] PronyError),
    #[error(transparent)]
    Numeric(#[from] MpError),
}

/// Lₙ(x) = Π_{j≠n} (x−χⱼ)/(χₙ−χⱼ), with 1-based `n`.
pub fn lagrange_eval(nodes: &RealVec, n: usize, x: &Real) -> Result<Real, CondError> {
    check_nodes(nodes)?;
    if n == 0 || n > nodes.len() {
        return Err(CondError::IndexOutOfRange {
            idx: n,
            max: nodes.len(),
        });
    }
    let prec = nodes.prec().max(x.prec());
    let xn = &nodes[n - 1];
    let mut acc = Real::one(prec);
    for (j, xj) in nodes.iter().enumerate() {
        if j == n - 1 {
            continue;
        }
        acc = &acc * &(&(x - xj) / &(xn - xj));
    }
    Ok(acc)
}

/// L′ₙ(χₙ) = Σ_{k≠n} 1/(χₙ−χ_k).
pub fn lagrange_deriv_at_node(nodes: &RealVec, n: usize) -> Result<Real, CondError> {
    check_nodes(nodes)?;
    if n == 0 || n > nodes.len() {
        return Err(CondError::IndexOutOfRange {
            idx: n,
            max: nodes.len(),
        });
    }
    let prec = nodes.prec();
    let xn = &nodes[n - 1];
    let mut acc = Real::zero(prec);
    for (k, xk) in nodes.iter().enumerate() {
        if k == n - 1 {
            continue;
        }
        acc = &acc + &(xn - xk).recip();
    }
    Ok(acc)
}

/// Hermite basis pair at x: Hₙ = [1 − 2(x−χₙ)L′ₙ(χₙ)]·Lₙ(x)²,
/// H̃ₙ = (x−χₙ)·Lₙ(x)².
pub fn hermite_eval(nodes: &RealVec, n: usize, x: &Real) -> Result<(Real, Real), CondError> {
    let ln = lagrange_eval(nodes, n, x)?;
    let dln = lagrange_deriv_at_node(nodes, n)?;
    let prec = ln.prec();
    let dx = x - &nodes[n - 1];
    let l2 = ln.square();
    let h = &(&Real::one(prec) - &(&(&Real::from_u32(prec, 2) * &dx) * &dln)) * &l2;
    let ht = &dx * &l2;
    Ok((h, ht))
}

fn check_nodes(nodes: &RealVec) -> Result<(), CondError> {
    for i in 0..nodes.len() {
        for j in 0..i {
            if nodes[i] == nodes[j] {
                return Err(CondError::DuplicateNodes);
            }
        }
    }
    Ok(())
}

/// Which pipeline produced a condition report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    Analytic,
    PronyEmpirical,
}

/// Per-mode first-order condition numbers for n = 1..⌊ηN₁⌋.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionReport {
    pub kind: ReportKind,
    pub per_n: Vec<ConditionEntry>,
    pub n1: usize,
    pub n2: usize,
    pub delta: Real,
    pub epsilon: Real,
    pub eta: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionEntry {
    pub n: usize,
    pub k_lambda: Real,
    pub k_y: Real,
}

impl ConditionReport {
    pub fn max_abs_k_lambda(&self) -> Real {
        let prec = self.delta.prec();
        let mut m = Real::zero(prec);
        for e in &self.per_n {
            let a = e.k_lambda.abs();
            if a > m {
                m = a;
            }
        }
        m
    }

    pub fn max_abs_k_y(&self) -> Real {
        let prec = self.delta.prec();
        let mut m = Real::zero(prec);
        for e in &self.per_n {
            let a = e.k_y.abs();
            if a > m {
                m = a;
            }
        }
        m
    }
}

/// Analytic first-order condition numbers:
/// K_y(n) = Σ_m y_m Hₙ(φ_m), K_λ(n) = −Σ_m y_m H̃ₙ(φ_m)/(Δ yₙ φₙ),
/// summing tail modes m = N₁+1..N₁+N₂ with the Hermite basis on the main
/// nodes. Independent of model.epsilon by construction.
pub fn analytic_condition_numbers(
    model: &SpectralModel,
    eta: f64,
) -> Result<ConditionReport, CondError> {
    assert!(eta > 0.0 && eta <= 1.0, "eta must lie in (0,1]");
    let prec = model.prec();
    let nodes_all = model.nodes();
    let main_nodes = RealVec::from_fn(model.n1, |i| nodes_all[i].clone());
    let n_max = ((eta * model.n1 as f64).floor() as usize).clamp(1, model.n1);

    let mut per_n = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut ky = Real::zero(prec);
        let mut klam = Real::zero(prec);
        for m in model.n1..model.n1 + model.n2 {
            let (h, ht) = hermite_eval(&main_nodes, n, &nodes_all[m])?;
            let ym = &model.amplitudes[m];
            ky = &ky + &(ym * &h);
            klam = &klam + &(ym * &ht);
        }
        let denom = &(&model.delta * &model.amplitudes[n - 1]) * &main_nodes[n - 1];
        klam = -&(&klam / &denom);
        per_n.push(ConditionEntry {
            n,
            k_lambda: klam,
            k_y: ky,
        });
    }
    Ok(ConditionReport {
        kind: ReportKind::Analytic,
        per_n,
        n1: model.n1,
        n2: model.n2,
        delta: model.delta.clone(),
        epsilon: model.epsilon.clone(),
        eta,
    })
}

/// Which Prony solver backs the empirical measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmpiricalSolver {
    Classical,
    Filtered,
}

/// Empirical condition numbers: run the chosen Prony solver on the ε-trace,
/// match recovered modes to the model, and return K̂(n) = |x̂ₙ−xₙ|/ε.
pub fn empirical_condition_numbers(
    model: &SpectralModel,
    eta: f64,
    solver: EmpiricalSolver,
) -> Result<ConditionReport, CondError> {
    if model.epsilon.is_zero() || model.epsilon.is_sign_negative() {
        return Err(CondError::EpsilonZero);
    }
    let prec = model.prec();

    let internal = prec + trace_headroom_bits(model) + 512;

    let deep_model = model.with_prec(internal);
    let trace = synthesize_trace(&deep_model);
    let result = match solver {
        EmpiricalSolver::Classical => prony::classical_prony(&trace.samples, model.n1)?,
        EmpiricalSolver::Filtered => {
            let thr = Real::from_f64(internal, 1e-30);
            let digits = crate::mpnum::decimal_digits(internal);
            let rtol = Real::from_f64(internal, 10.0).powi(-((digits / 4) as i32));
            prony::filtered_prony(&trace.samples, model.n1, &thr, &rtol)?
        }
    }
    .with_delta(&trace.delta);

    let n_max = ((eta * model.n1 as f64).floor() as usize).clamp(1, model.n1);
    let truth_lam = RealVec::from_fn(model.n1, |i| deep_model.lambdas[i].clone());
    let pairs = prony::match_to_truth(&result.exponents, &truth_lam);

    // invert the pairing: for each true mode n, find its recovered partner
    let mut by_truth: Vec<Option<usize>> = vec![None; model.n1];
    for (ri, tj) in pairs {
        by_truth[tj] = Some(ri);
    }
    let mut per_n = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let ri = by_truth[n - 1].ok_or(CondError::RecoveryFailed { n })?;
        let dl = (&result.exponents[ri] - &truth_lam[n - 1]).abs();
        let dy = (&result.amplitudes[ri] - &deep_model.amplitudes[n - 1]).abs();
        per_n.push(ConditionEntry {
            n,
            k_lambda: (&dl / &deep_model.epsilon).with_prec(prec),
            k_y: (&dy / &deep_model.epsilon).with_prec(prec),
        });
    }
    Ok(ConditionReport {
        kind: ReportKind::PronyEmpirical,
        per_n,
        n1: model.n1,
        n2: model.n2,
        delta: model.delta.clone(),
        epsilon: model.epsilon.clone(),
        eta,
    })
}

/// Trace rounding at P bits perturbs recovered node n by roughly
/// 2^(−P)·m₀/(φₙ·p′(φₙ)²): the Lagrange row norm contributes one 1/|p′|
/// and the root division another. The headroom is the worst such exponent
/// over all modes, evaluated in log space from the eigenvalues (so nothing
/// underflows), with the first tail node standing in for the rest.
pub fn trace_headroom_bits(model: &SpectralModel) -> u32 {
    let log2e = std::f64::consts::LOG2_E;
    let d = model.delta.to_f64();
    let count = model.n1 + model.n2.min(1);
    let lam: Vec<f64> = (0..count).map(|i| model.lambdas[i].to_f64()).collect();
    let log2_phi: Vec<f64> = lam.iter().map(|l| -d * l * log2e).collect();
    let mut worst = 0f64;
    for n in 0..count {
        // log2 |p'(φₙ)| = Σ_{j≠n} log2|φₙ−φⱼ|, with
        // log2|φₙ−φⱼ| = log2 φ_min(n,j) + log2(1−e^(−Δ|λₙ−λⱼ|)) computed
        // stably via expm1
        let mut log2_dp = 0f64;
        for j in 0..count {
            if j == n {
                continue;
            }
            let gap = d * (lam[n] - lam[j]).abs();
            // |φₙ−φⱼ| = φ_larger·(1−e^(−Δ|λₙ−λⱼ|)); the larger node is the
            // one with the smaller eigenvalue
            let base = log2_phi[if lam[n] < lam[j] { n } else { j }];
            log2_dp += base + (-(-gap).exp_m1()).log2();
        }
        let need = -(log2_phi[n] + 2.0 * log2_dp);
        if need > worst {
            worst = need;
        }
    }
    worst.max(0.0).ceil() as u32
}

/// Least-squares line through (ln axisᵢ, ln(−ln κᵢ)).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
}

pub fn fit_decay_exponent(axis: &RealVec, kappas: &RealVec) -> Result<DecayFit, CondError> {
    if axis.len() < 4 || kappas.len() != axis.len() {
        return Err(CondError::TooFewPoints { got: axis.len() });
    }
    let mut xs = Vec::with_capacity(axis.len());
    let mut ys = Vec::with_capacity(axis.len());
    for (a, k) in axis.iter().zip(kappas.iter()) {
        if *k <= Real::zero(8) || *k >= Real::one(8) {
            return Err(CondError::KappaOutOfRange { value: k.to_f64() });
        }
        // ln(−ln κ) at full precision, then squashed to f64 for the fit
        let neglog = -&k.ln();
        xs.push(a.ln().to_f64());
        ys.push(neglog.ln().to_f64());
    }
    Ok(linear_fit(&xs, &ys))
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> DecayFit {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let residual = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum::<f64>()
        .sqrt();
    DecayFit {
        slope,
        intercept,
        residual,
    }
}

/// Asymptotic regimes for the sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// fixed Δ, N₁ → ∞
    R1,
    /// fixed N₁, Δ → ∞
    R2,
    /// fixed T = N₁Δ, N₁ → ∞
    R3,
}

/// Sweep configuration. `grid` is N₁ values for R1/R3 and Δ values for R2.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepConfig {
    pub regime: Regime,
    pub grid: Vec<f64>,
    /// λₙ = c·nᵖ
    pub lambda_c: f64,
    pub lambda_p: f64,
    /// fixed Δ for R1, fixed N₁ for R2 (as f64), horizon T for R3
    pub fixed: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub n2: usize,
    pub prec_bits: u32,
}

impl SweepConfig {
    /// Built-in reference grids per regime.
    pub fn default_for(regime: Regime, prec_bits: u32) -> Self {
        match regime {
            Regime::R1 => SweepConfig {
                regime,
                grid: vec![25.0, 35.0, 45.0, 55.0, 65.0],
                lambda_c: 1.0,
                lambda_p: 2.0,
                fixed: 0.1,
                eta: 0.5,
                epsilon: 1e-6,
                n2: 1,
                prec_bits,
            },
            Regime::R2 => SweepConfig {
                regime,
                grid: vec![0.1, 0.5, 1.0, 1.5, 2.0, 2.5],
                lambda_c: 1.0,
                lambda_p: 2.0,
                fixed: 10.0,
                eta: 0.5,
                epsilon: 0.1,
                n2: 1,
                prec_bits,
            },
            Regime::R3 => SweepConfig {
                regime,
                grid: vec![10.0, 20.0, 30.0, 40.0, 50.0, 65.0],
                lambda_c: 1.0,
                lambda_p: 2.0,
                fixed: 2.0,
                eta: 0.5,
                epsilon: 1e-6,
                n2: 1,
                prec_bits,
            },
        }
    }

    pub fn model_at(&self, grid_value: f64) -> SpectralModel {
        let (n1, delta) = match self.regime {
            Regime::R1 => (grid_value as usize, self.fixed),
            Regime::R2 => (self.fixed as usize, grid_value),
            Regime::R3 => (grid_value as usize, self.fixed / grid_value),
        };
        SpectralModel::powerlaw(
            self.prec_bits,
            self.lambda_c,
            self.lambda_p,
            n1,
            self.n2,
            self.epsilon,
            delta,
        )
    }
}

/// One sweep point: max|K| over n ≤ ⌊ηN₁⌋ for both kinds, plus the
/// full-recovery (η = 1) maxima used by the flatness check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepPoint {
    pub axis: f64,
    pub n1: usize,
    pub analytic_k_lambda: Real,
    pub analytic_k_y: Real,
    pub empirical_k_lambda: Real,
    pub empirical_k_y: Real,
    pub eta1_analytic_k_lambda: Real,
    pub eta1_analytic_k_y: Real,
    pub eta1_empirical_k_lambda: Real,
    pub eta1_empirical_k_y: Real,
    /// κ under the precision floor 2^(−prec+64); excluded from fits.
    pub excluded: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepResult {
    pub regime: Regime,
    pub eta: f64,
    pub prec_bits: u32,
    pub points: Vec<SweepPoint>,
    /// (kind, metric) → fit over non-excluded points; None when fewer than
    /// 4 usable points remain (e.g. non-decaying κ for sub-quadratic rates).
    pub slopes: Vec<SlopeEntry>,
    /// Per-point full per-mode reports (analytic, empirical) at η = 1;
    /// in-process consumers only.
    #[serde(skip)]
    pub full_reports: Vec<(ConditionReport, ConditionReport)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SlopeEntry {
    pub kind: ReportKind,
    pub metric: String,
    pub fit: Option<DecayFit>,
    pub points_used: usize,
}

fn max_abs_upto(report: &ConditionReport, n_max: usize, lambda: bool) -> Real {
    let prec = report.delta.prec();
    let mut m = Real::zero(prec);
    for e in &report.per_n {
        if e.n > n_max {
            continue;
        }
        let a = if lambda {
            e.k_lambda.abs()
        } else {
            e.k_y.abs()
        };
        if a > m {
            m = a;
        }
    }
    m
}

/// Run a full sweep: per grid point compute analytic and empirical reports
/// over all modes, aggregate max|K| at the configured η and at η = 1,
/// exclude under-floor values, and fit decay slopes per (kind, metric).
pub fn regime_sweep(cfg: &SweepConfig) -> Result<SweepResult, CondError> {
    let prec = cfg.prec_bits;
    let floor = Real::from_f64(prec, 0.5).powi(prec as i32 - 64);
    let mut points = Vec::with_capacity(cfg.grid.len());
    let mut full_reports = Vec::with_capacity(cfg.grid.len());

    for &g in &cfg.grid {
        let model = cfg.model_at(g);
        let analytic = analytic_condition_numbers(&model, 1.0)?;
        let empirical = empirical_condition_numbers(&model, 1.0, EmpiricalSolver::Classical)?;
        let n_eta = ((cfg.eta * model.n1 as f64).floor() as usize).clamp(1, model.n1);
        let ak = max_abs_upto(&analytic, n_eta, true);
        let ay = max_abs_upto(&analytic, n_eta, false);
        let ek = max_abs_upto(&empirical, n_eta, true);
        let ey = max_abs_upto(&empirical, n_eta, false);
        let excluded = ak <= floor || ay <= floor || ek <= floor || ey <= floor;
        points.push(SweepPoint {
            axis: g,
            n1: model.n1,
            analytic_k_lambda: ak,
            analytic_k_y: ay,
            empirical_k_lambda: ek,
            empirical_k_y: ey,
            eta1_analytic_k_lambda: max_abs_upto(&analytic, model.n1, true),
            eta1_analytic_k_y: max_abs_upto(&analytic, model.n1, false),
            eta1_empirical_k_lambda: max_abs_upto(&empirical, model.n1, true),
            eta1_empirical_k_y: max_abs_upto(&empirical, model.n1, false),
            excluded,
        });
        full_reports.push((analytic, empirical));
    }

    let mut slopes = Vec::new();
    for (kind, metric, pick) in [
        (
            ReportKind::Analytic,
            "lambda",
            Box::new(|p: &SweepPoint| p.analytic_k_lambda.clone())
                as Box<dyn Fn(&SweepPoint) -> Real>,
        ),
        (
            ReportKind::Analytic,
            "y",
            Box::new(|p: &SweepPoint| p.analytic_k_y.clone()),
        ),
        (
            ReportKind::PronyEmpirical,
            "lambda",
            Box::new(|p: &SweepPoint| p.empirical_k_lambda.clone()),
        ),
        (
            ReportKind::PronyEmpirical,
            "y",
            Box::new(|p: &SweepPoint| p.empirical_k_y.clone()),
        ),
    ] {
        let mut axis = Vec::new();
        let mut kappa = Vec::new();
        for p in &points {
            if p.excluded {
                continue;
            }
            let v = pick(p);
            if v > Real::zero(8) && v < Real::one(8) {
                axis.push(Real::from_f64(prec, p.axis));
                kappa.push(v);
            }
        }
        let used = axis.len();
        let fit = if used >= 4 {
            Some(fit_decay_exponent(&RealVec(axis), &RealVec(kappa))?)
        } else {
            None
        };
        slopes.push(SlopeEntry {
            kind,
            metric: metric.to_string(),
            fit,
            points_used: used,
        });
    }

    Ok(SweepResult {
        regime: cfg.regime,
        eta: cfg.eta,
        prec_bits: prec,
        points,
        slopes,
        full_reports,
    })
}

/// Gautschi's Vandermonde-inverse bound max_i Π_{j≠i} (1+|φⱼ|)/|φᵢ−φⱼ|.
pub fn gautschi_bound(nodes: &RealVec) -> Result<Real, CondError> {
    check_nodes(nodes)?;
    let prec = nodes.prec();
    let mut best = Real::zero(prec);
    for i in 0..nodes.len() {
        let mut prod = Real::one(prec);
        for j in 0..nodes.len() {
            if j == i {
                continue;
            }
            let num = &Real::one(prec) + &nodes[j].abs();
            let den = (&nodes[i] - &nodes[j]).abs();
            prod = &prod * &(&num / &den);
        }
        if prod > best {
            best = prod;
        }
    }
    if nodes.len() == 1 {
        best = Real::one(prec);
    }
    Ok(best)
}

/// CSV rows for a sweep (decimal strings at `sig` significant digits).
pub fn sweep_to_csv(result: &SweepResult, sig: u32) -> String {
    let mut out = String::from("regime,axis,n_max,kind,metric,kappa,excluded\n");
    let regime = format!("{:?}", result.regime);
    for p in &result.points {
        let n_max = ((result.eta * p.n1 as f64).floor() as usize).max(1);
        for (kind, metric, v) in [
            ("analytic", "lambda", &p.analytic_k_lambda),
            ("analytic", "y", &p.analytic_k_y),
            ("prony_empirical", "lambda", &p.empirical_k_lambda),
            ("prony_empirical", "y", &p.empirical_k_y),
        ] {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                regime,
                p.axis,
                n_max,
                kind,
                metric,
                v.to_decimal(sig),
                p.excluded
            ));
        }
    }
    out
}
