//! Exhaustive grid search over memory-scheme gains.
//!
//! The search is an oracle: it does not derive optima, it checks that no
//! point of a finite grid beats a closed-form design. The free parameters
//! are `ε₀..ε_M` followed by `θ₀..θ_{M−1}`; `θ_M` is always fixed to
//! `−Σ θ_m` so every candidate reaches average consensus.

use std::cmp::Ordering;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scheme::MemoryScheme;
use crate::stability::{lambda_grid, radius_at, CONNECTIVITY_TOLERANCE};

/// Default cap on grid points times eigenvalues evaluated per point.
pub const DEFAULT_BUDGET: u128 = 100_000_000;
pub const DEFAULT_TOP_K: usize = 10;

/// Grid points per parallel work unit.
const CHUNK: u128 = 4096;

/// One searched parameter: the values `lo, lo + step, …` not exceeding `hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    lo: f64,
    hi: f64,
    step: f64,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidParameter(format!("empty search bounds [{lo}, {hi}]")));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid step must be positive, got {step}"
            )));
        }
        Ok(Self { lo, hi, step })
    }

    /// Axis with `2·half_steps + 1` points centred exactly on `center`.
    pub fn centered(center: f64, half_steps: usize, step: f64) -> Result<Self> {
        let reach = half_steps as f64 * step;
        Self::new(center - reach, center + reach, step)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn value(&self, i: usize) -> f64 {
        self.lo + self.step * i as f64
    }
}

/// What a candidate scheme is scored on.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    /// Maximum radius over the given nonzero eigenvalues.
    Spectrum(Vec<f64>),
    /// Worst-case radius over a uniform grid on `[alpha, beta]`.
    Interval { alpha: f64, beta: f64, grid_points: usize },
}

impl Objective {
    /// Evaluation points, extremes first so that pruning bites early.
    fn lambdas(&self) -> Result<Vec<f64>> {
        let mut ls = match self {
            Objective::Spectrum(ls) => {
                let mut ls = ls.clone();
                if ls.is_empty() {
                    return Err(Error::InvalidParameter("empty spectrum objective".into()));
                }
                if let Some(&bad) = ls.iter().find(|&&l| !(l > CONNECTIVITY_TOLERANCE && l.is_finite())) {
                    return Err(Error::Disconnected(bad));
                }
                ls.sort_by(f64::total_cmp);
                ls.dedup();
                ls
            }
            Objective::Interval {
                alpha,
                beta,
                grid_points,
            } => lambda_grid(*alpha, *beta, *grid_points)?,
        };
        if ls.len() > 1 {
            let last = ls.pop().expect("len > 1");
            ls.insert(1, last);
        }
        Ok(ls)
    }

    /// Largest eigenvalue considered, used for default gain bounds.
    pub fn upper(&self) -> f64 {
        match self {
            Objective::Spectrum(ls) => ls.iter().copied().fold(0.0, f64::max),
            Objective::Interval { beta, .. } => *beta,
        }
    }
}

/// A finite grid of schemes of one depth together with its objective.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpec {
    depth: usize,
    axes: Vec<Axis>,
    objective: Objective,
    budget: u128,
    top_k: usize,
}

impl SearchSpec {
    /// `axes` lists `ε₀..ε_M` then `θ₀..θ_{M−1}`, i.e. `2M + 1` entries.
    pub fn new(depth: usize, axes: Vec<Axis>, objective: Objective) -> Result<Self> {
        if axes.len() != 2 * depth + 1 {
            return Err(Error::InvalidParameter(format!(
                "depth {depth} needs {} search axes, got {}",
                2 * depth + 1,
                axes.len()
            )));
        }
        objective.lambdas()?;
        Ok(Self {
            depth,
            axes,
            objective,
            budget: DEFAULT_BUDGET,
            top_k: DEFAULT_TOP_K,
        })
    }

    /// `ε_m ∈ [0, 4(M+1)/λ_N]` and `θ_m ∈ [−1, 1]`, all with the same step.
    pub fn with_default_bounds(depth: usize, objective: Objective, step: f64) -> Result<Self> {
        let eps_hi = 4.0 * (depth + 1) as f64 / objective.upper();
        let mut axes = Vec::with_capacity(2 * depth + 1);
        for _ in 0..=depth {
            axes.push(Axis::new(0.0, eps_hi, step)?);
        }
        for _ in 0..depth {
            axes.push(Axis::new(-1.0, 1.0, step)?);
        }
        Self::new(depth, axes, objective)
    }

    /// Box of `±half_steps` grid steps around the free parameters of `center`.
    pub fn around(center: &MemoryScheme, half_steps: usize, step: f64, objective: Objective) -> Result<Self> {
        let axes = free_parameters(center)
            .into_iter()
            .map(|c| Axis::centered(c, half_steps, step))
            .collect::<Result<Vec<_>>>()?;
        Self::new(center.depth(), axes, objective)
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_top_k(mut self, top_k: usize) -> Self {
        self.top_k = top_k.max(1);
        self
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn grid_size(&self) -> u128 {
        self.axes.iter().map(|a| a.count() as u128).product()
    }

    /// Worst-case number of radius evaluations: grid size × eigenvalues.
    pub fn required_evaluations(&self) -> u128 {
        let lambdas = self.objective.lambdas().map_or(0, |l| l.len()) as u128;
        self.grid_size() * lambdas
    }

    /// Scheme for a free-parameter vector.
    pub fn scheme(&self, params: &[f64]) -> Result<MemoryScheme> {
        let (eps, theta) = params.split_at(self.depth + 1);
        MemoryScheme::with_balanced_theta(eps.to_vec(), theta)
    }

    fn point(&self, mut index: u128, out: &mut [f64]) {
        for (slot, axis) in out.iter_mut().zip(&self.axes).rev() {
            let n = axis.count() as u128;
            *slot = axis.value((index % n) as usize);
            index /= n;
        }
    }
}

/// `ε₀..ε_M, θ₀..θ_{M−1}` of a scheme.
pub fn free_parameters(scheme: &MemoryScheme) -> Vec<f64> {
    let mut p = scheme.eps().to_vec();
    p.extend_from_slice(&scheme.theta()[..scheme.depth()]);
    p
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub params: Vec<f64>,
    pub rate: f64,
}

impl Candidate {
    /// Ascending rate, ties broken by the lexicographically smaller parameter vector.
    fn order(&self, other: &Self) -> Ordering {
        self.rate.total_cmp(&other.rate).then_with(|| {
            self.params
                .iter()
                .zip(&other.params)
                .map(|(a, b)| a.total_cmp(b))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    /// Best candidates in ascending order of rate.
    pub top: Vec<Candidate>,
    pub scheme: MemoryScheme,
    pub rate: f64,
    pub grid_size: u128,
}

impl SearchResult {
    pub fn best(&self) -> &Candidate {
        &self.top[0]
    }
}

struct TopK {
    k: usize,
    items: Vec<Candidate>,
}

impl TopK {
    fn new(k: usize) -> Self {
        Self {
            k,
            items: Vec::with_capacity(k + 1),
        }
    }

    /// Rates strictly above this cannot enter the list.
    fn threshold(&self) -> f64 {
        if self.items.len() < self.k {
            f64::INFINITY
        } else {
            self.items[self.k - 1].rate
        }
    }

    fn insert(&mut self, c: Candidate) {
        let pos = self.items.partition_point(|x| x.order(&c) == Ordering::Less);
        if pos < self.k {
            self.items.insert(pos, c);
            self.items.truncate(self.k);
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for c in other.items {
            self.insert(c);
        }
        self
    }
}

/// Objective value of one scheme, abandoning the evaluation as soon as the
/// running maximum exceeds `cutoff`. Returns `None` when pruned.
fn score(scheme: &MemoryScheme, lambdas: &[f64], cutoff: f64) -> Result<Option<f64>> {
    let mut worst = 0.0_f64;
    for &l in lambdas {
        let r = radius_at(scheme, l)?;
        if r.is_nan() {
            return Ok(None);
        }
        worst = worst.max(r);
        if worst > cutoff {
            return Ok(None);
        }
    }
    Ok(Some(worst))
}

/// Objective value of a single scheme under `objective`.
pub fn evaluate(scheme: &MemoryScheme, objective: &Objective) -> Result<f64> {
    Ok(score(scheme, &objective.lambdas()?, f64::INFINITY)?.unwrap_or(f64::NAN))
}

/// Exhaustive search of every grid point in `spec`.
///
/// Points are pruned only when provably worse than `top_k` candidates
/// already found, so the result does not depend on how the grid is split
/// across threads.
pub fn grid_search(spec: &SearchSpec) -> Result<SearchResult> {
    let required = spec.required_evaluations();
    if required > spec.budget {
        return Err(Error::BudgetExceeded {
            required,
            budget: spec.budget,
        });
    }
    let lambdas = spec.objective.lambdas()?;
    let total = spec.grid_size();
    let chunks = total.div_ceil(CHUNK);
    let dims = spec.axes.len();

    let top = (0..chunks as u64)
        .into_par_iter()
        .try_fold(
            || TopK::new(spec.top_k),
            |mut top, chunk| -> Result<TopK> {
                let start = chunk as u128 * CHUNK;
                let end = (start + CHUNK).min(total);
                let mut params = vec![0.0; dims];
                for index in start..end {
                    spec.point(index, &mut params);
                    let scheme = spec.scheme(&params)?;
                    if let Some(rate) = score(&scheme, &lambdas, top.threshold())? {
                        top.insert(Candidate {
                            params: params.clone(),
                            rate,
                        });
                    }
                }
                Ok(top)
            },
        )
        .try_reduce(|| TopK::new(spec.top_k), |a, b| Ok(a.merge(b)))?;

    finish(spec, top.items)
}

fn finish(spec: &SearchSpec, top: Vec<Candidate>) -> Result<SearchResult> {
    let best = top
        .first()
        .ok_or_else(|| Error::InvalidParameter("no grid point produced a finite rate".into()))?;
    Ok(SearchResult {
        scheme: spec.scheme(&best.params)?,
        rate: best.rate,
        grid_size: spec.grid_size(),
        top,
    })
}

/// Re-searches a grid recentred on `best` with every step and width scaled
/// by `shrink`.
///
/// The point count per axis is kept (rounded down to an odd number so that
/// `best` itself is a grid point), and `best` is always scored, so the
/// returned rate never exceeds the rate of `best`.
pub fn refine(best: &MemoryScheme, spec: &SearchSpec, shrink: f64) -> Result<SearchResult> {
    if !(shrink > 0.0 && shrink <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "shrink must lie in (0, 1], got {shrink}"
        )));
    }
    if best.depth() != spec.depth {
        return Err(Error::WrongDepth {
            expected: spec.depth,
            got: best.depth(),
        });
    }
    let centre = free_parameters(best);
    let axes = spec
        .axes
        .iter()
        .zip(&centre)
        .map(|(a, &c)| Axis::centered(c, (a.count() - 1) / 2, a.step * shrink))
        .collect::<Result<Vec<_>>>()?;
    let refined = SearchSpec { axes, ..spec.clone() };
    let mut result = grid_search(&refined)?;
    let centre_rate = evaluate(best, &spec.objective)?;
    if centre_rate < result.rate {
        let mut top = TopK::new(spec.top_k);
        for c in result.top.drain(..) {
            top.insert(c);
        }
        top.insert(Candidate {
            params: centre,
            rate: centre_rate,
        });
        result = finish(&refined, top.items)?;
    }
    Ok(result)
}

/// CSV of the top candidates: `rank,eps_0..eps_M,theta_0..theta_M,rate`.
pub fn candidates_csv(result: &SearchResult, depth: usize) -> String {
    let mut out = String::from("rank");
    for m in 0..=depth {
        let _ = write!(out, ",eps_{m}");
    }
    for m in 0..=depth {
        let _ = write!(out, ",theta_{m}");
    }
    out.push_str(",rate\n");
    for (rank, c) in result.top.iter().enumerate() {
        let _ = write!(out, "{}", rank + 1);
        for v in &c.params[..=depth] {
            let _ = write!(out, ",{v:?}");
        }
        let free = &c.params[depth + 1..];
        for v in free {
            let _ = write!(out, ",{v:?}");
        }
        let _ = writeln!(out, ",{:?},{:?}", -free.iter().sum::<f64>(), c.rate);
    }
    out
}
