//! Experiment front door: batch configuration in, CSV/JSON data out.
//!
//! Subcommands: `sweep` (condition-number regime sweeps), `pde-gen`
//! (reaction-diffusion trace generation), `recover` (trace → potential),
//! `fit` (one-shot filtered Prony on a trace file), and
//! `analysis-selftest` (appendix identity checks).
//!
//! Every run is driven by one JSON config file; outputs embed the working
//! precision, the seed, and a hash of the config so identical inputs can be
//! recognized from the artifacts alone.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use expfit::analysis;
use expfit::condnum::{self, Regime, SweepConfig};
use expfit::inverse::{self, GroundTruth, OptOptions};
use expfit::mpnum::{decimal_digits, Real, RealVec};
use expfit::pde::{self, MeasurementKernel, Potential};
use expfit::prony;
use expfit::rng::SplitMix64;
use expfit::spectral::{self, MeasurementTrace, TraceSource};

#[derive(Parser)]
#[command(name = "expfit", version, about = "exponential-fitting laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Condition-number sweep over one asymptotic regime.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Serialize κ values with full precision instead of 50 digits.
        #[arg(long)]
        full_precision: bool,
    },
    /// Solve the reaction-diffusion problem and write a measurement trace.
    PdeGen {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Recover a potential from a trace file (two-step pipeline).
    Recover {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Run the convergence study over these n_prony values.
        #[arg(long, value_delimiter = ',')]
        sweep_m: Vec<usize>,
    },
    /// One-shot filtered Prony fit of a trace file.
    Fit {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run the appendix identity suite and report pass/fail per check.
    AnalysisSelftest {
        #[arg(long, default_value_t = 256)]
        prec_bits: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sweep {
            config,
            out_dir,
            full_precision,
        } => cmd_sweep(&config, &out_dir, full_precision),
        Command::PdeGen { config, out_dir } => cmd_pde_gen(&config, &out_dir),
        Command::Recover {
            config,
            out_dir,
            sweep_m,
        } => cmd_recover(&config, &out_dir, &sweep_m),
        Command::Fit { config, out_dir } => cmd_fit(&config, &out_dir),
        Command::AnalysisSelftest { prec_bits } => cmd_analysis_selftest(prec_bits),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

/// FNV-1a 64-bit over the raw config bytes.
fn config_hash(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

fn read_config<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<(T, String), ExitCode> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: cannot read config {}: {e}", path.display());
            return Err(ExitCode::from(2));
        }
    };
    match serde_json::from_slice::<T>(&bytes) {
        Ok(cfg) => Ok((cfg, config_hash(&bytes))),
        Err(e) => {
            eprintln!("error: config schema: {e}");
            Err(ExitCode::from(2))
        }
    }
}

// ---------------------------------------------------------------- sweep

#[derive(Debug, Serialize, Deserialize)]
struct SweepFileConfig {
    regime: String,
    #[serde(default)]
    grid: Vec<f64>,
    #[serde(default = "default_one")]
    lambda_c: f64,
    #[serde(default = "default_two")]
    lambda_p: f64,
    /// Extra eigenvalue growth exponents to sweep for rate comparisons.
    #[serde(default)]
    lambda_p_variants: Vec<f64>,
    fixed: Option<f64>,
    #[serde(default = "default_eta")]
    eta: f64,
    epsilon: Option<f64>,
    #[serde(default = "default_n2")]
    n2: usize,
    prec_bits: u32,
    #[serde(default)]
    rng_seed: u64,
}

fn default_one() -> f64 {
    1.0
}
fn default_two() -> f64 {
    2.0
}
fn default_eta() -> f64 {
    0.5
}
fn default_n2() -> usize {
    1
}

fn cmd_sweep(config: &Path, out_dir: &Path, full_precision: bool) -> Result<ExitCode> {
    let (cfg, hash) = match read_config::<SweepFileConfig>(config) {
        Ok(v) => v,
        Err(code) => return Ok(code),
    };
    let regime = match cfg.regime.as_str() {
        "R1" => Regime::R1,
        "R2" => Regime::R2,
        "R3" => Regime::R3,
        other => {
            eprintln!("error: config schema: unknown regime {other:?}");
            return Ok(ExitCode::from(2));
        }
    };
    if !(cfg.eta > 0.0 && cfg.eta <= 1.0) {
        eprintln!("error: config schema: eta must lie in (0,1]");
        return Ok(ExitCode::from(2));
    }
    fs::create_dir_all(out_dir)?;

    let defaults = SweepConfig::default_for(regime, cfg.prec_bits);
    let mut ps = vec![cfg.lambda_p];
    ps.extend(cfg.lambda_p_variants.iter().copied());
    let many = ps.len() > 1;

    for p in ps {
        let sweep_cfg = SweepConfig {
            regime,
            grid: if cfg.grid.is_empty() {
                defaults.grid.clone()
            } else {
                cfg.grid.clone()
            },
            lambda_c: cfg.lambda_c,
            lambda_p: p,
            fixed: cfg.fixed.unwrap_or(defaults.fixed),
            eta: cfg.eta,
            epsilon: cfg.epsilon.unwrap_or(defaults.epsilon),
            n2: cfg.n2,
            prec_bits: cfg.prec_bits,
        };
        let result = condnum::regime_sweep(&sweep_cfg).context("sweep failed")?;

        let digits = decimal_digits(cfg.prec_bits);
        let sig = if full_precision {
            digits + 2
        } else {
            digits.min(50)
        };
        let suffix = if many {
            format!("_p{}", p)
        } else {
            String::new()
        };
        let mut csv = format!(
            "# prec_bits={} seed={} config={}\n",
            cfg.prec_bits, cfg.rng_seed, hash
        );
        csv.push_str(&condnum::sweep_to_csv(&result, sig));
        fs::write(out_dir.join(format!("sweep{suffix}.csv")), csv)?;

        let slopes_json = serde_json::json!({
            "prec_bits": cfg.prec_bits,
            "seed": cfg.rng_seed,
            "config": hash,
            "regime": cfg.regime,
            "eta": cfg.eta,
            "lambda_p": p,
            "slopes": result.slopes,
        });
        fs::write(
            out_dir.join(format!("slopes{suffix}.json")),
            serde_json::to_string_pretty(&slopes_json)?,
        )?;
        println!(
            "sweep{}: {} points, slopes {}",
            suffix,
            result.points.len(),
            result
                .slopes
                .iter()
                .map(|s| match &s.fit {
                    Some(f) => format!("{}/{}={:.3}", kind_tag(s.kind), s.metric, f.slope),
                    None => format!("{}/{}=n/a", kind_tag(s.kind), s.metric),
                })
                .collect::<Vec<_>>()
                .join(" "),
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn kind_tag(kind: condnum::ReportKind) -> &'static str {
    match kind {
        condnum::ReportKind::Analytic => "analytic",
        condnum::ReportKind::PronyEmpirical => "prony",
    }
}

// -------------------------------------------------------------- pde-gen

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum PotentialSpec {
    FourierCosine { coeffs: Vec<f64> },
    Triangle,
    Tabulated { points: Vec<(f64, f64)> },
    /// a₀ fixed, a₁..a_{m−1} uniform in [lo, hi] from the run seed.
    RandomFourier { m: usize, a0: f64, lo: f64, hi: f64 },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum KernelSpec {
    Sine { coeffs: Vec<f64> },
    /// m coefficients uniform in [lo, hi] from the run seed.
    RandomSine { m: usize, lo: f64, hi: f64 },
}

#[derive(Debug, Serialize, Deserialize)]
struct PdeGenConfig {
    potential: PotentialSpec,
    /// Integral measurement kernel; omit for a point measurement.
    kernel: Option<KernelSpec>,
    /// Point-measurement location; used when `kernel` is absent.
    x0: Option<f64>,
    delta: f64,
    t_final: f64,
    n_x: usize,
    n_t: usize,
    /// Number of Prony samples to emit is 2·n_samples.
    n_samples: usize,
    #[serde(default = "default_ic_terms")]
    ic_terms: usize,
    /// Ground-truth eigenvalues recorded in the metadata.
    #[serde(default = "default_truth_modes")]
    truth_modes: usize,
    prec_bits: u32,
    rng_seed: u64,
}

fn default_ic_terms() -> usize {
    60
}
fn default_truth_modes() -> usize {
    16
}

fn resolve_potential(spec: &PotentialSpec, rng: &mut SplitMix64) -> Potential {
    match spec {
        PotentialSpec::FourierCosine { coeffs } => Potential::FourierCosine {
            coeffs: coeffs.clone(),
        },
        PotentialSpec::Triangle => Potential::Triangle,
        PotentialSpec::Tabulated { points } => Potential::Tabulated {
            points: points.clone(),
        },
        PotentialSpec::RandomFourier { m, a0, lo, hi } => {
            let mut coeffs = vec![*a0];
            for _ in 1..*m {
                coeffs.push(rng.uniform(*lo, *hi));
            }
            Potential::FourierCosine { coeffs }
        }
    }
}

fn cmd_pde_gen(config: &Path, out_dir: &Path) -> Result<ExitCode> {
    let (cfg, hash) = match read_config::<PdeGenConfig>(config) {
        Ok(v) => v,
        Err(code) => return Ok(code),
    };
    if cfg.t_final <= 0.0 {
        eprintln!("error: config schema: t_final must be positive");
        return Ok(ExitCode::from(2));
    }
    if cfg.delta <= 0.0 || cfg.n_samples == 0 {
        eprintln!("error: config schema: delta and n_samples must be positive");
        return Ok(ExitCode::from(2));
    }
    if cfg.delta * (2 * cfg.n_samples - 1) as f64 > cfg.t_final * (1.0 + 1e-12) {
        eprintln!("error: config schema: sample times exceed t_final");
        return Ok(ExitCode::from(2));
    }
    fs::create_dir_all(out_dir)?;

    let prec = cfg.prec_bits;
    let mut rng = SplitMix64::new(cfg.rng_seed);
    let q = resolve_potential(&cfg.potential, &mut rng);
    let kernel = cfg.kernel.as_ref().map(|k| match k {
        KernelSpec::Sine { coeffs } => MeasurementKernel {
            sine_coeffs: coeffs.clone(),
        },
        KernelSpec::RandomSine { m, lo, hi } => MeasurementKernel {
            sine_coeffs: (0..*m).map(|_| rng.uniform(*lo, *hi)).collect(),
        },
    });

    let f = pde::default_initial_condition(cfg.ic_terms);
    let t_final = Real::from_f64(prec, cfg.t_final);
    let sol = pde::forward_solve(&q, &f, &t_final, cfg.n_x, cfg.n_t, prec)
        .context("forward solve failed")?;
    let times = RealVec::from_fn(2 * cfg.n_samples, |k| {
        &Real::from_f64(prec, cfg.delta) * &Real::from_u32(prec, k as u32)
    });
    let trace = match (&kernel, cfg.x0) {
        (Some(kern), _) => pde::integral_trace(&sol, kern, &times)?,
        (None, Some(x0)) => pde::point_trace(&sol, &Real::from_f64(prec, x0), &times)?,
        (None, None) => {
            eprintln!("error: config schema: need either kernel or x0");
            return Ok(ExitCode::from(2));
        }
    };

    // ground truth spectrum of the discrete operator
    let truth = spectral::discrete_operator_eigenvalues(&q, cfg.n_x, cfg.truth_modes, prec)
        .context("ground-truth spectrum failed")?;

    let digits = decimal_digits(prec).min(50);
    let mut csv = format!(
        "# prec_bits={} seed={} config={}\nt,y\n",
        prec, cfg.rng_seed, hash
    );
    for (k, s) in trace.samples.iter().enumerate() {
        let t = cfg.delta * k as f64;
        csv.push_str(&format!("{t},{}\n", s.to_decimal(digits)));
    }
    fs::write(out_dir.join("trace.csv"), csv)?;

    let meta = serde_json::json!({
        "prec_bits": prec,
        "seed": cfg.rng_seed,
        "config": hash,
        "source": trace.source,
        "delta": cfg.delta,
        "t_final": cfg.t_final,
        "n_x": cfg.n_x,
        "n_t": cfg.n_t,
        "potential": q,
        "kernel": kernel.map(|k| k.sine_coeffs),
        "x0": cfg.x0,
        "truth_lambdas": truth.iter().map(|l| l.to_decimal(digits)).collect::<Vec<_>>(),
    });
    fs::write(
        out_dir.join("meta.json"),
        serde_json::to_string_pretty(&meta)?,
    )?;
    println!(
        "pde-gen: wrote {} samples, {} ground-truth modes",
        trace.samples.len(),
        truth.len()
    );
    Ok(ExitCode::SUCCESS)
}

// -------------------------------------------------------------- recover

#[derive(Debug, Serialize, Deserialize)]
struct RecoverConfig {
    trace: PathBuf,
    /// Metadata file with ground truth; enables error metrics.
    meta: Option<PathBuf>,
    n_prony: usize,
    m: usize,
    #[serde(default = "default_threshold")]
    amp_threshold: f64,
    #[serde(default = "default_restarts")]
    restarts: usize,
    #[serde(default = "default_max_iters")]
    max_iters: usize,
    #[serde(default = "default_grad_step")]
    grad_step: f64,
    #[serde(default)]
    rng_seed: u64,
    prec_bits: u32,
}

fn default_threshold() -> f64 {
    1e-6
}
fn default_restarts() -> usize {
    5
}
fn default_max_iters() -> usize {
    500
}
fn default_grad_step() -> f64 {
    1e-8
}

fn load_trace(path: &Path, prec: u32) -> Result<MeasurementTrace> {
    let body = fs::read_to_string(path)
        .with_context(|| format!("cannot read trace {}", path.display()))?;
    let mut times = Vec::new();
    let mut samples = Vec::new();
    for line in body.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("t,") {
            continue;
        }
        let (t, y) = line
            .split_once(',')
            .with_context(|| format!("bad trace row: {line}"))?;
        times.push(t.trim().parse::<f64>().context("bad time value")?);
        samples.push(
            Real::from_str_prec(prec, y.trim())
                .map_err(|e| anyhow::anyhow!("bad sample value {y:?}: {e}"))?,
        );
    }
    if samples.len() < 2 {
        bail!("trace needs at least two samples");
    }
    let delta = Real::from_f64(prec, times[1] - times[0]);
    Ok(MeasurementTrace {
        delta,
        samples: RealVec(samples),
        source: TraceSource::Synthetic,
    })
}

#[derive(Debug, Deserialize)]
struct MetaTruth {
    truth_lambdas: Vec<String>,
    potential: Potential,
}

fn load_truth(path: &Path, prec: u32) -> Result<GroundTruth> {
    let body = fs::read_to_string(path)
        .with_context(|| format!("cannot read metadata {}", path.display()))?;
    let meta: MetaTruth = serde_json::from_str(&body).context("metadata schema")?;
    let lambdas = meta
        .truth_lambdas
        .iter()
        .map(|s| Real::from_str_prec(prec, s).map_err(|e| anyhow::anyhow!("bad eigenvalue: {e}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(GroundTruth {
        lambdas: RealVec(lambdas),
        potential: meta.potential,
    })
}

fn cmd_recover(config: &Path, out_dir: &Path, sweep_m: &[usize]) -> Result<ExitCode> {
    let (cfg, hash) = match read_config::<RecoverConfig>(config) {
        Ok(v) => v,
        Err(code) => return Ok(code),
    };
    if !cfg.trace.exists() {
        eprintln!("error: trace file {} does not exist", cfg.trace.display());
        return Ok(ExitCode::from(2));
    }
    fs::create_dir_all(out_dir)?;
    let prec = cfg.prec_bits;
    let trace = load_trace(&cfg.trace, prec)?;
    let truth = match &cfg.meta {
        Some(p) => Some(load_truth(p, prec)?),
        None => None,
    };
    let opt = OptOptions {
        restarts: cfg.restarts,
        max_iters: cfg.max_iters,
        grad_step: cfg.grad_step,
        seed: cfg.rng_seed,
    };
    let threshold = Real::from_f64(prec, cfg.amp_threshold);

    // written only after every step succeeds, so failures leave no partial
    // outputs behind
    let mut outputs: Vec<(PathBuf, String)> = Vec::new();

    let report = inverse::end_to_end_recover(
        &trace,
        cfg.n_prony,
        cfg.m,
        &threshold,
        &opt,
        truth.as_ref(),
    )
    .context("recovery failed")?;
    let report_json = serde_json::json!({
        "prec_bits": prec,
        "seed": cfg.rng_seed,
        "config": hash,
        "report": report,
    });
    outputs.push((
        out_dir.join("report.json"),
        serde_json::to_string_pretty(&report_json)?,
    ));

    if !sweep_m.is_empty() {
        let Some(gt) = truth.as_ref() else {
            eprintln!("error: --sweep-m needs ground-truth metadata");
            return Ok(ExitCode::from(2));
        };
        let mut csv = format!(
            "# prec_bits={} seed={} config={}\nm,n_modes,eig_rel_err_max,coeff_abs_err_max,potential_l2_err\n",
            prec, cfg.rng_seed, hash
        );
        for &m_val in sweep_m {
            let rep =
                inverse::end_to_end_recover(&trace, m_val, cfg.m, &threshold, &opt, Some(gt))
                    .with_context(|| format!("convergence study failed at m={m_val}"))?;
            let metrics = rep.metrics.as_ref().expect("metrics present with truth");
            let eig_max = metrics.eig_rel_err.norm_inf();
            let coeff_max = metrics.coeff_abs_err.norm_inf();
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                m_val,
                rep.recovered_lambdas.len(),
                eig_max.to_decimal(20),
                coeff_max.to_decimal(20),
                metrics.potential_l2_err.to_decimal(20)
            ));
        }
        outputs.push((out_dir.join("metrics.csv"), csv));
    }

    for (path, body) in outputs {
        fs::write(&path, body)?;
    }
    println!(
        "recover: {} modes, loss {:.3e}",
        report.recovered_lambdas.len(),
        report.loss_final.to_f64()
    );
    Ok(ExitCode::SUCCESS)
}

// ------------------------------------------------------------------ fit

#[derive(Debug, Serialize, Deserialize)]
struct FitConfig {
    trace: PathBuf,
    n_prony: usize,
    #[serde(default = "default_threshold")]
    amp_threshold: f64,
    prec_bits: u32,
    #[serde(default)]
    rng_seed: u64,
}

fn cmd_fit(config: &Path, out_dir: &Path) -> Result<ExitCode> {
    let (cfg, hash) = match read_config::<FitConfig>(config) {
        Ok(v) => v,
        Err(code) => return Ok(code),
    };
    if !cfg.trace.exists() {
        eprintln!("error: trace file {} does not exist", cfg.trace.display());
        return Ok(ExitCode::from(2));
    }
    fs::create_dir_all(out_dir)?;
    let prec = cfg.prec_bits;
    let trace = load_trace(&cfg.trace, prec)?;
    let digits = decimal_digits(prec);
    let threshold = Real::from_f64(prec, cfg.amp_threshold);
    let realness = Real::from_f64(prec, 10.0).powi(-((digits / 4) as i32));
    let fit = prony::filtered_prony(&trace.samples, cfg.n_prony, &threshold, &realness)
        .context("prony fit failed")?
        .with_delta(&trace.delta);
    let out = serde_json::json!({
        "prec_bits": prec,
        "seed": cfg.rng_seed,
        "config": hash,
        "delta": trace.delta,
        "nodes": fit.nodes,
        "exponents": fit.exponents,
        "amplitudes": fit.amplitudes,
        "diagnostics": fit.diagnostics,
    });
    fs::write(
        out_dir.join("fit.json"),
        serde_json::to_string_pretty(&out)?,
    )?;
    println!("fit: recovered {} modes", fit.n_recovered);
    Ok(ExitCode::SUCCESS)
}

// -------------------------------------------------------- analysis-selftest

fn cmd_analysis_selftest(prec: u32) -> Result<ExitCode> {
    let mut failures = 0usize;
    let mut check = |name: &str, ok: bool| {
        println!("{} {}", if ok { "PASS" } else { "FAIL" }, name);
        if !ok {
            failures += 1;
        }
    };

    // Ψ values and monotonicity
    check(
        "psi empty-sum and hand values",
        analysis::psi(3, 3).ok() == Some(0)
            && analysis::psi(1, 3).ok() == Some(11)
            && analysis::psi(2, 4).ok() == Some(17),
    );
    let mut mono = true;
    for n1 in 2..=60usize {
        let mut prev = analysis::psi(1, n1).unwrap();
        for n in 2..=n1 {
            let cur = analysis::psi(n, n1).unwrap();
            if cur > prev {
                mono = false;
            }
            prev = cur;
        }
    }
    check("psi monotone decreasing", mono);

    // 𝔤 and 𝒢
    let ln2 = Real::from_u32(prec, 2).ln();
    let g_ln2 = analysis::g_function(&ln2).unwrap();
    check("g(ln 2) = ln 2", (&g_ln2 - &ln2).abs().to_f64() < 1e-30);
    let one = Real::one(prec);
    let g_small = analysis::cal_g(&one, None, &Real::from_f64(prec, 50.0)).unwrap();
    check("calG vanishes for large zeta", g_small.to_f64() < 1e-20);

    // θ sandwich on the quadratic model
    let mut sandwich_ok = true;
    for n1 in [6usize, 12] {
        let lambdas =
            RealVec::from_fn(n1 + 1, |i| Real::from_u32(prec, ((i + 1) * (i + 1)) as u32));
        let ctx = analysis::AnalysisContext::new(lambdas, Real::from_f64(prec, 0.5), n1);
        for n in 1..=n1 {
            let th = analysis::theta_sums(&ctx, n).unwrap();
            let b = analysis::theta_bounds(&ctx, n).unwrap();
            if th.theta1 < b.theta1.0 || th.theta1 > b.theta1.1 {
                sandwich_ok = false;
            }
            if n > 1 && (th.theta2 < b.theta2.0 || th.theta2 > b.theta2.1) {
                sandwich_ok = false;
            }
            if n < n1 && (th.theta3 < b.theta3.0 || th.theta3 > b.theta3.1) {
                sandwich_ok = false;
            }
        }
    }
    check("theta sandwich bounds", sandwich_ok);

    // L² identity
    let mut lsq_ok = true;
    let lambdas = RealVec::from_fn(11, |i| Real::from_u32(prec, ((i + 1) * (i + 1)) as u32));
    let ctx = analysis::AnalysisContext::new(lambdas, Real::from_f64(prec, 0.1), 10);
    for n in 1..=10 {
        let pair = analysis::lsquared_identity(&ctx, n).unwrap();
        let rel = (&(&pair.direct - &pair.formula).abs() / &pair.direct.abs()).to_f64();
        if rel > 1e-50 {
            lsq_ok = false;
        }
    }
    check("L^2 identity dual routes", lsq_ok);

    // MacLaurin on deterministic pseudorandom vectors
    let mut rng = SplitMix64::new(7);
    let mut mac_ok = true;
    for _ in 0..200 {
        let len = 2 + (rng.next_u64() % 9) as usize;
        let vals = RealVec::from_fn(len, |_| rng.uniform_real(prec, 0.0, 5.0));
        if !analysis::maclaurin_check(&vals).unwrap() {
            mac_ok = false;
        }
    }
    check("MacLaurin chain", mac_ok);

    // erfi asymptotics
    let x = Real::from_f64(prec, 10.0);
    let scaled = &(-&x.square()).exp() * &analysis::erfi(&x);
    check(
        "erfi asymptotic value at 10",
        (scaled.to_f64() - 0.056701).abs() < 1e-4,
    );

    // discrepancy formula vs determinant difference
    let model =
        expfit::spectral::SpectralModel::powerlaw(prec.max(512), 1.0, 2.0, 3, 1, 1e-4, 0.9);
    let z = Real::from_f64(prec.max(512), 0.35);
    let pair = analysis::discrepancy_formula(&model, &z).unwrap();
    let rel = (&(&pair.formula - &pair.oracle).abs() / &pair.oracle.abs()).to_f64();
    check("discrepancy expansion vs determinants", rel < 1e-30);

    // adjugate vanishing
    let mut adj_ok = true;
    for n1 in 2..=4usize {
        let m = expfit::spectral::SpectralModel::powerlaw(prec, 1.0, 2.0, n1, 1, 1e-4, 0.6);
        let d = analysis::tail_matrix(&m).unwrap();
        for order in 0..n1 {
            for row in analysis::higher_order_adjugate(&d, order) {
                for v in row {
                    if v.abs().to_f64() > 1e-40 {
                        adj_ok = false;
                    }
                }
            }
        }
    }
    check("tail-matrix adjugates vanish", adj_ok);

    if failures == 0 {
        println!("analysis-selftest: all checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("analysis-selftest: {failures} checks failed");
        Ok(ExitCode::from(1))
    }
}
