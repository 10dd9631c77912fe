//! Simulation of the memory-augmented consensus dynamics and empirical
//! convergence measurements.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scheme::MemoryScheme;

/// Minimum number of usable error samples for [`empirical_rate`].
pub const MIN_RATE_SAMPLES: usize = 20;
/// Horizon used by [`default_horizon`] when the scheme does not contract.
pub const FALLBACK_HORIZON: usize = 1000;

/// Recorded states `x(0), …, x(K)` of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    states: Vec<Vec<f64>>,
    average: f64,
}

impl Trajectory {
    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k]
    }

    /// Number of recorded steps `K` (there are `K + 1` states).
    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.states[0].len()
    }

    /// The consensus value `x̄ = (1/N) Σ x_j(0)`.
    pub fn average(&self) -> f64 {
        self.average
    }

    /// `‖x(k) − x̄1‖∞`.
    pub fn error_inf(&self, k: usize) -> f64 {
        self.states[k]
            .iter()
            .map(|v| (v - self.average).abs())
            // f64::max would swallow NaN from an overflowed state
            .fold(
                0.0,
                |m: f64, e| if m.is_nan() || e.is_nan() { f64::NAN } else { m.max(e) },
            )
    }

    /// `‖x(k) − x̄1‖₂`.
    pub fn error_l2(&self, k: usize) -> f64 {
        self.states[k]
            .iter()
            .map(|v| (v - self.average).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn mean(&self, k: usize) -> f64 {
        self.states[k].iter().sum::<f64>() / self.node_count() as f64
    }

    /// CSV dump with header `k,x_0,…,x_{N-1},err_inf`.
    pub fn to_csv(&self) -> String {
        let n = self.node_count();
        let mut out = String::from("k");
        for i in 0..n {
            let _ = write!(out, ",x_{i}");
        }
        out.push_str(",err_inf\n");
        for (k, x) in self.states.iter().enumerate() {
            let _ = write!(out, "{k}");
            for v in x {
                let _ = write!(out, ",{v:?}");
            }
            let _ = writeln!(out, ",{:?}", self.error_inf(k));
        }
        out
    }
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

struct Stepper<'a> {
    adjacency: Vec<Vec<(usize, f64)>>,
    scheme: &'a MemoryScheme,
    /// `history[m]` is `x(k − m)`.
    history: Vec<Vec<f64>>,
    /// `lx_history[m]` is `L x(k − m)`.
    lx_history: Vec<Vec<f64>>,
}

impl<'a> Stepper<'a> {
    fn new(g: &Graph, scheme: &'a MemoryScheme, x0: &[f64]) -> Result<Self> {
        if x0.len() != g.node_count() {
            return Err(Error::DimensionMismatch {
                expected: g.node_count(),
                got: x0.len(),
            });
        }
        let adjacency = g.adjacency_lists();
        let lx0 = apply_laplacian(&adjacency, x0);
        let taps = scheme.depth() + 1;
        Ok(Self {
            adjacency,
            scheme,
            history: vec![x0.to_vec(); taps],
            lx_history: vec![lx0; taps],
        })
    }

    /// `x(k+1) = x(k) + Σ_m θ_m x(k−m) − ε_m L x(k−m)`.
    fn step(&mut self) -> Vec<f64> {
        let n = self.history[0].len();
        let mut next = self.history[0].clone();
        for (m, (&eps, &theta)) in self.scheme.eps().iter().zip(self.scheme.theta()).enumerate() {
            let x = &self.history[m];
            let lx = &self.lx_history[m];
            for i in 0..n {
                next[i] += theta * x[i] - eps * lx[i];
            }
        }
        next
    }

    fn push(&mut self, x: Vec<f64>) {
        let lx = apply_laplacian(&self.adjacency, &x);
        self.history.rotate_right(1);
        self.lx_history.rotate_right(1);
        self.history[0] = x;
        self.lx_history[0] = lx;
    }
}

fn apply_laplacian(adjacency: &[Vec<(usize, f64)>], x: &[f64]) -> Vec<f64> {
    adjacency
        .iter()
        .enumerate()
        .map(|(i, nbrs)| nbrs.iter().map(|&(j, w)| w * (x[i] - x[j])).sum())
        .collect()
}

/// Runs the protocol for `steps` iterations with the history
/// `x(−M) = … = x(−1) = x(0)`.
pub fn simulate(g: &Graph, scheme: &MemoryScheme, x0: &[f64], steps: usize) -> Result<Trajectory> {
    let mut stepper = Stepper::new(g, scheme, x0)?;
    let mut states = Vec::with_capacity(steps + 1);
    states.push(x0.to_vec());
    for _ in 0..steps {
        let next = stepper.step();
        states.push(next.clone());
        stepper.push(next);
    }
    Ok(Trajectory {
        states,
        average: mean(x0),
    })
}

/// Runs the same recurrence on the disagreement vector `x(k) − x̄1`.
///
/// The component along `1` is removed after every step. In exact
/// arithmetic it stays zero, so this only discards rounding drift, but it
/// lets the error decay far below the resolution of the absolute states.
/// The returned trajectory holds disagreement vectors and has average 0.
pub fn simulate_disagreement(g: &Graph, scheme: &MemoryScheme, x0: &[f64], steps: usize) -> Result<Trajectory> {
    let avg = if x0.is_empty() { 0.0 } else { mean(x0) };
    let mut d0: Vec<f64> = x0.iter().map(|v| v - avg).collect();
    if !d0.is_empty() {
        let drift = mean(&d0);
        d0.iter_mut().for_each(|v| *v -= drift);
    }
    let mut stepper = Stepper::new(g, scheme, &d0)?;
    let mut states = Vec::with_capacity(steps + 1);
    states.push(d0);
    for _ in 0..steps {
        let mut next = stepper.step();
        let drift = mean(&next);
        next.iter_mut().for_each(|v| *v -= drift);
        states.push(next.clone());
        stepper.push(next);
    }
    Ok(Trajectory { states, average: 0.0 })
}

/// ε-convergence time: the smallest `k*` with
/// `‖x(k) − x̄1‖∞ / ‖x(0) − x̄1‖∞ ≤ epsilon` for every recorded `k ≥ k*`.
///
/// `Ok(None)` means the ratio is still above `epsilon` at the end of the
/// horizon; the horizon stands in for "all subsequent steps".
pub fn convergence_time(traj: &Trajectory, epsilon: f64) -> Result<Option<usize>> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let e0 = traj.error_inf(0);
    let scale = traj.average().abs().max(f64::MIN_POSITIVE);
    if !(e0 > 64.0 * f64::EPSILON * scale) {
        return Err(Error::UndefinedRatio);
    }
    let last_bad = (0..=traj.steps()).rev().find(|&k| !(traj.error_inf(k) / e0 <= epsilon));
    Ok(match last_bad {
        None => Some(0),
        Some(k) if k == traj.steps() => None,
        Some(k) => Some(k + 1),
    })
}

/// Per-step decay factor estimated from the trajectory.
///
/// Takes the leading run of steps whose 2-norm error is resolvable above
/// floating-point noise, then fits `ln ‖x(k) − x̄1‖₂` by least squares over
/// the trailing half of that run and returns `exp(slope)`. The trailing
/// half skips the transient, including the `k·rᵏ` terms produced by
/// repeated roots.
pub fn empirical_rate(traj: &Trajectory) -> Result<f64> {
    let noise = 1e3 * f64::EPSILON * (traj.node_count() as f64).sqrt();
    let mut samples: Vec<(f64, f64)> = Vec::new();
    for k in 0..=traj.steps() {
        let err = traj.error_l2(k);
        let magnitude = traj.state(k).iter().fold(traj.average().abs(), |m, v| m.max(v.abs()));
        if !(err.is_finite() && err > 1e-250 && err > noise * magnitude) {
            break;
        }
        samples.push((k as f64, err.ln()));
    }
    if samples.len() < MIN_RATE_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "{} usable error samples, need {MIN_RATE_SAMPLES}",
            samples.len()
        )));
    }
    let tail = &samples[samples.len() / 2..];
    let count = tail.len() as f64;
    let mean_k = tail.iter().map(|s| s.0).sum::<f64>() / count;
    let mean_e = tail.iter().map(|s| s.1).sum::<f64>() / count;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(k, e) in tail {
        sxy += (k - mean_k) * (e - mean_e);
        sxx += (k - mean_k) * (k - mean_k);
    }
    Ok((sxy / sxx).exp())
}

/// `10 · ⌈ln ε / ln r⌉` steps for a contracting rate, [`FALLBACK_HORIZON`] otherwise.
pub fn default_horizon(rate: f64, epsilon: f64) -> usize {
    if rate > 0.0 && rate < 1.0 && epsilon > 0.0 && epsilon < 1.0 {
        (10.0 * (epsilon.ln() / rate.ln()).ceil()).max(10.0) as usize
    } else if rate == 0.0 {
        10
    } else {
        FALLBACK_HORIZON
    }
}

/// Initial states drawn uniformly from `[−10, 10]`.
pub fn uniform_initial_state(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-10.0..=10.0)).collect()
}
