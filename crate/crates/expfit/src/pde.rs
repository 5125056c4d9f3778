//! Forward solver and measurement generation for the reaction-diffusion
//! problem z_t = z_xx + q(x)z on (0,1) with Dirichlet walls.
//!
//! Space is discretized by Chebyshev–Gauss–Lobatto collocation mapped to
//! [0,1]; time stepping applies the matrix exponential of the interior
//! operator. Traces are read off by barycentric interpolation (point
//! measurements) or fixed-panel Gauss–Legendre quadrature against a sine
//! kernel (integral measurements).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mpnum::{self, Real, RealMatrix, RealVec};
use crate::spectral::{MeasurementTrace, TraceSource};

#[derive(Debug, Error)]
pub enum PdeError {
    #[error("need at least 4 collocation nodes, got {got}")]
    TooFewNodes { got: usize },
    #[error("sample time {t} outside the solved span [0, {t_final}]")]
    TimeOutOfRange { t: f64, t_final: f64 },
    #[error("invalid input: {what}")]
    InvalidInput { what: &'static str },
}

/// The inverse-problem unknown: a 1-D potential on [0,1].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Potential {
    /// q(x) = Σ a_k cos(2πkx)
    FourierCosine { coeffs: Vec<f64> },
    /// q(x) = 1 − |x−0.5| − 0.75 (zero mean on [0,1])
    Triangle,
    /// piecewise-linear table of (x, v) pairs
    Tabulated { points: Vec<(f64, f64)> },
}

impl Potential {
    pub fn eval(&self, x: &Real) -> Real {
        let prec = x.prec();
        match self {
            Potential::FourierCosine { coeffs } => {
                let two_pi = &Real::pi(prec) * &Real::from_u32(prec, 2);
                let mut s = Real::zero(prec);
                for (k, a) in coeffs.iter().enumerate() {
                    if *a == 0.0 {
                        continue;
                    }
                    let ak = Real::from_f64(prec, *a);
                    if k == 0 {
                        s = &s + &ak;
                    } else {
                        let arg = &(&two_pi * &Real::from_u32(prec, k as u32)) * x;
                        s = &s + &(&ak * &arg.cos());
                    }
                }
                s
            }
            Potential::Triangle => {
                let half = Real::from_f64(prec, 0.5);
                let one = Real::one(prec);
                let q0 = Real::from_f64(prec, 0.75);
                &(&one - &(x - &half).abs()) - &q0
            }
            Potential::Tabulated { points } => {
                let xf = x.to_f64();
                if points.is_empty() {
                    return Real::zero(prec);
                }
                if xf <= points[0].0 {
                    return Real::from_f64(prec, points[0].1);
                }
                for w in points.windows(2) {
                    let (x0, v0) = w[0];
                    let (x1, v1) = w[1];
                    if xf <= x1 {
                        let t = if x1 > x0 { (xf - x0) / (x1 - x0) } else { 0.0 };
                        return Real::from_f64(prec, v0 + t * (v1 - v0));
                    }
                }
                Real::from_f64(prec, points.last().unwrap().1)
            }
        }
    }

    /// Fourier-cosine coefficient vector when available (zero-padded view).
    pub fn cosine_coeffs(&self) -> Option<Vec<f64>> {
        match self {
            Potential::FourierCosine { coeffs } => Some(coeffs.clone()),
            _ => None,
        }
    }
}

/// Measurement kernel c(x) = Σ c_k sin(πkx).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasurementKernel {
    pub sine_coeffs: Vec<f64>,
}

impl MeasurementKernel {
    pub fn eval(&self, x: &Real) -> Real {
        let prec = x.prec();
        let pi = Real::pi(prec);
        let mut s = Real::zero(prec);
        for (k, c) in self.sine_coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            let arg = &(&pi * &Real::from_u32(prec, (k + 1) as u32)) * x;
            s = &s + &(&Real::from_f64(prec, *c) * &arg.sin());
        }
        s
    }
}

/// Dense forward solution on the collocation grid.
#[derive(Clone, Debug)]
pub struct ForwardSolution {
    /// All collocation nodes in [0,1], increasing, endpoints included.
    pub x_nodes: RealVec,
    /// Equispaced solve times including t = 0.
    pub t_nodes: RealVec,
    /// grid[(i, j)] = z(xᵢ, tⱼ); boundary rows are identically zero.
    pub grid: RealMatrix,
}

/// Chebyshev–Gauss–Lobatto nodes on [0,1] (increasing) with the
/// second-derivative collocation matrix for that grid.
pub fn cheb_diff2(n_x: usize, prec: u32) -> Result<(RealVec, RealMatrix), PdeError> {
    if n_x < 4 {
        return Err(PdeError::TooFewNodes { got: n_x });
    }
    let n = n_x - 1; // polynomial degree
    let pi = Real::pi(prec);
    let one = Real::one(prec);
    let two = Real::from_u32(prec, 2);

    // standard CGL nodes cos(jπ/n) on [-1,1], then mapped to [0,1] increasing
    let u: Vec<Real> = (0..=n)
        .map(|j| (&(&pi * &Real::from_u32(prec, j as u32)) / &Real::from_u32(prec, n as u32)).cos())
        .collect();

    let c = |j: usize| -> Real {
        let base = if j == 0 || j == n { two.clone() } else { one.clone() };
        if j.is_multiple_of(2) {
            base
        } else {
            -&base
        }
    };

    // first-derivative matrix on [-1,1]
    let mut d = RealMatrix::zeros(prec, n_x, n_x);
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                d[(i, j)] = &(&c(i) / &c(j)) / &(&u[i] - &u[j]);
            }
        }
    }
    // negative-sum trick for the diagonal
    for i in 0..=n {
        let mut s = Real::zero(prec);
        for j in 0..=n {
            if j != i {
                s = &s + &d[(i, j)];
            }
        }
        d[(i, i)] = -&s;
    }

    // map u ∈ [-1,1] → x = (1−u)/2 ∈ [0,1] (increasing with j reversed);
    // d/dx = −2 d/du, so D2_x = 4·D·D with rows/cols reordered to match
    // ascending x.
    let d2u = d.matmul(&d);
    let four = Real::from_u32(prec, 4);
    let mut nodes = Vec::with_capacity(n_x);
    for j in (0..=n).rev() {
        nodes.push(&(&one - &u[j]) / &two);
    }
    let d2 = RealMatrix::from_fn(n_x, n_x, |i, j| {
        // ascending index i corresponds to original index n−i
        &d2u[(n - i, n - j)] * &four
    });
    Ok((RealVec(nodes), d2))
}

/// Interior operator M = D2_interior + diag(q(xᵢ)) over the interior nodes,
/// so that z_t = Mz propagates decaying modes e^(−λₙt) with λₙ the
/// eigenvalues of −∂ₓₓ−q.
pub fn interior_operator(q: &Potential, n_x: usize, prec: u32) -> RealMatrix {
    let (nodes, d2) = cheb_diff2(n_x, prec).expect("n_x checked by caller");
    let m = n_x - 2;
    RealMatrix::from_fn(m, m, |i, j| {
        let v = d2[(i + 1, j + 1)].clone();
        if i == j {
            &v + &q.eval(&nodes[i + 1])
        } else {
            v
        }
    })
}

/// Initial condition as a sine series Σ b_k sin(πkx).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InitialCondition {
    pub sine_coeffs: Vec<f64>,
}

impl InitialCondition {
    pub fn eval(&self, x: &Real) -> Real {
        let prec = x.prec();
        let pi = Real::pi(prec);
        let mut s = Real::zero(prec);
        for (k, b) in self.sine_coeffs.iter().enumerate() {
            if *b == 0.0 {
                continue;
            }
            let arg = &(&pi * &Real::from_u32(prec, (k + 1) as u32)) * x;
            s = &s + &(&Real::from_f64(prec, *b) * &arg.sin());
        }
        s
    }
}

/// f(x) = Σ_{k=1}^{n_terms} (−1)^(k+1) k^(−3) sin(πkx): smooth initial
/// state with rapidly decaying coefficients.
pub fn default_initial_condition(n_terms: usize) -> InitialCondition {
    InitialCondition {
        sine_coeffs: (1..=n_terms)
            .map(|k| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign / (k as f64).powi(3)
            })
            .collect(),
    }
}

/// Propagate the initial condition over `n_t` equispaced times in
/// [0, t_final] (t = 0 included) with one matrix exponential per step.
pub fn forward_solve(
    q: &Potential,
    f: &InitialCondition,
    t_final: &Real,
    n_x: usize,
    n_t: usize,
    prec: u32,
) -> Result<ForwardSolution, PdeError> {
    if *t_final <= Real::zero(8) {
        return Err(PdeError::InvalidInput {
            what: "t_final must be positive",
        });
    }
    if n_t < 2 {
        return Err(PdeError::InvalidInput {
            what: "need at least two time slices",
        });
    }
    let (nodes, _) = cheb_diff2(n_x, prec)?;
    let op = interior_operator(q, n_x, prec);
    let m = n_x - 2;

    let t_step = t_final / &Real::from_u32(prec, (n_t - 1) as u32);
    let e_step = mpnum::matrix_exp(&op, &t_step);

    let mut grid = RealMatrix::zeros(prec, n_x, n_t);
    let mut z = RealVec::from_fn(m, |i| f.eval(&nodes[i + 1]));
    for j in 0..n_t {
        if j > 0 {
            z = e_step.matvec(&z);
        }
        for i in 0..m {
            grid[(i + 1, j)] = z[i].clone();
        }
    }
    let t_nodes = RealVec::from_fn(n_t, |j| &t_step * &Real::from_u32(prec, j as u32));
    Ok(ForwardSolution {
        x_nodes: nodes,
        t_nodes,
        grid,
    })
}

impl ForwardSolution {
    pub fn prec(&self) -> u32 {
        self.grid.prec()
    }

    fn t_final(&self) -> &Real {
        &self.t_nodes[self.t_nodes.len() - 1]
    }

    /// Barycentric weights for the CGL grid (ascending-x order).
    fn bary_weights(&self) -> Vec<Real> {
        let prec = self.prec();
        let n = self.x_nodes.len() - 1;
        (0..=n)
            .map(|i| {
                let mut w = if i % 2 == 0 {
                    Real::one(prec)
                } else {
                    -Real::one(prec)
                };
                if i == 0 || i == n {
                    w = &w * &Real::from_f64(prec, 0.5);
                }
                w
            })
            .collect()
    }

    /// Interpolate the stored slice `j` at spatial point `x0`.
    pub fn interp_slice(&self, j: usize, x0: &Real) -> Real {
        let prec = self.prec().max(x0.prec());
        let weights = self.bary_weights();
        let mut num = Real::zero(prec);
        let mut den = Real::zero(prec);
        for i in 0..self.x_nodes.len() {
            let dx = x0 - &self.x_nodes[i];
            if dx.is_zero() {
                return self.grid[(i, j)].clone();
            }
            let t = &weights[i] / &dx;
            num = &num + &(&t * &self.grid[(i, j)]);
            den = &den + &t;
        }
        &num / &den
    }

    /// z(x0, t) with linear interpolation in t between stored slices when
    /// `t` is off-grid.
    pub fn value_at(&self, x0: &Real, t: &Real) -> Result<Real, PdeError> {
        let prec = self.prec().max(t.prec());
        let tf = self.t_final();
        let slack = &Real::from_f64(prec, 1e-12) * tf;
        if t < &(-&slack) || *t > (tf + &slack) {
            return Err(PdeError::TimeOutOfRange {
                t: t.to_f64(),
                t_final: tf.to_f64(),
            });
        }
        let n_t = self.t_nodes.len();
        let step = &self.t_nodes[1] - &self.t_nodes[0];
        let pos = (t / &step).to_f64();
        let j0 = (pos.floor().max(0.0) as usize).min(n_t - 1);
        let frac = t - &self.t_nodes[j0];
        if frac.abs() <= &Real::from_f64(prec, 1e-14) * &step || j0 + 1 >= n_t {
            return Ok(self.interp_slice(j0, x0));
        }
        let w = &frac / &step;
        let a = self.interp_slice(j0, x0);
        let b = self.interp_slice(j0 + 1, x0);
        Ok(&a + &(&w * &(&b - &a)))
    }
}

/// Trace of point measurements z(x0, t_k).
pub fn point_trace(
    sol: &ForwardSolution,
    x0: &Real,
    sample_times: &RealVec,
) -> Result<MeasurementTrace, PdeError> {
    let samples = sample_times
        .iter()
        .map(|t| sol.value_at(x0, t))
        .collect::<Result<Vec<_>, _>>()?;
    let delta = if sample_times.len() >= 2 {
        &sample_times[1] - &sample_times[0]
    } else {
        Real::one(sol.prec())
    };
    Ok(MeasurementTrace {
        delta,
        samples: RealVec(samples),
        source: TraceSource::PdePoint,
    })
}

/// Trace of integral measurements y(t) = ∫₀¹ c(x) z(x,t) dx via 64-panel
/// Gauss–Legendre over the barycentric interpolant of each slice.
pub fn integral_trace(
    sol: &ForwardSolution,
    kernel: &MeasurementKernel,
    sample_times: &RealVec,
) -> Result<MeasurementTrace, PdeError> {
    let prec = sol.prec();
    let (gl_nodes, gl_weights) = mpnum::gauss_legendre(prec, 8);
    let panels = 64usize;
    let t_final = sol.t_final().clone();
    let step = &sol.t_nodes[1] - &sol.t_nodes[0];

    let mut samples = Vec::with_capacity(sample_times.len());
    for t in sample_times.iter() {
        let slack = &Real::from_f64(prec, 1e-12) * &t_final;
        if t < &(-&slack) || *t > (&t_final + &slack) {
            return Err(PdeError::TimeOutOfRange {
                t: t.to_f64(),
                t_final: t_final.to_f64(),
            });
        }
        // quadrature needs many point evaluations per slice; interpolate in
        // t only once per sample by fixing the two bracketing slices
        let pos = (t / &step).to_f64();
        let n_t = sol.t_nodes.len();
        let j0 = (pos.floor().max(0.0) as usize).min(n_t - 1);
        let frac = t - &sol.t_nodes[j0];
        let on_grid =
            frac.abs() <= &Real::from_f64(prec, 1e-14) * &step || j0 + 1 >= n_t;
        let w = if on_grid {
            Real::zero(prec)
        } else {
            &frac / &step
        };

        let mut total = Real::zero(prec);
        for p in 0..panels {
            let a = Real::from_f64(prec, p as f64 / panels as f64);
            let b = Real::from_f64(prec, (p + 1) as f64 / panels as f64);
            let val = mpnum::integrate_panel(&a, &b, &gl_nodes, &gl_weights, |x| {
                let z = if on_grid {
                    sol.interp_slice(j0, x)
                } else {
                    let za = sol.interp_slice(j0, x);
                    let zb = sol.interp_slice(j0 + 1, x);
                    &za + &(&w * &(&zb - &za))
                };
                &kernel.eval(x) * &z
            });
            total = &total + &val;
        }
        samples.push(total);
    }
    let delta = if sample_times.len() >= 2 {
        &sample_times[1] - &sample_times[0]
    } else {
        Real::one(prec)
    };
    Ok(MeasurementTrace {
        delta,
        samples: RealVec(samples),
        source: TraceSource::PdeIntegral,
    })
}
