//! Sequential minimal optimization for the soft-margin SVM dual
//!
//! ```text
//! maximize   sum(a) - 1/2 sum_ij a_i a_j y_i y_j K(x_i, x_j)
//! subject to 0 <= a_i <= C,  sum(a_i y_i) = 0
//! ```
//!
//! Each step picks the maximal violating pair and solves the two-variable
//! subproblem analytically. The solver stops when the largest KKT violation gap
//! drops below the tolerance.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::Kernel;
use crate::error::{Error, Result};

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub c: f64,
    pub kkt_tolerance: f64,
    /// Consecutive steps that leave both multipliers unchanged before giving up.
    pub max_passes_without_change: usize,
    pub max_iterations: usize,
    /// Kernel cache size, in matrix entries.
    pub kernel_cache_budget: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            c: 1000.0,
            kkt_tolerance: 1e-3,
            max_passes_without_change: 10,
            max_iterations: 1_000_000,
            kernel_cache_budget: 4_000_000,
        }
    }
}

impl TrainConfig {
    pub fn with_c(c: f64) -> Self {
        Self { c, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidParameter(format!("C must be positive, got {}", self.c)));
        }
        if !(self.kkt_tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "KKT tolerance must be positive, got {}",
                self.kkt_tolerance
            )));
        }
        Ok(())
    }
}

/// LRU cache of kernel matrix rows.
struct KernelCache<'a> {
    x: &'a [Vec<f64>],
    kernel: Kernel,
    rows: Vec<Option<Vec<f64>>>,
    recency: VecDeque<usize>,
    capacity: usize,
}

impl<'a> KernelCache<'a> {
    fn new(x: &'a [Vec<f64>], kernel: Kernel, budget: usize) -> Self {
        let n = x.len();
        Self {
            x,
            kernel,
            rows: vec![None; n],
            recency: VecDeque::new(),
            capacity: (budget / n.max(1)).clamp(2, n.max(2)),
        }
    }

    fn ensure(&mut self, i: usize) -> Result<()> {
        if self.rows[i].is_some() {
            if let Some(pos) = self.recency.iter().position(|&r| r == i) {
                self.recency.remove(pos);
            }
            self.recency.push_back(i);
            return Ok(());
        }
        if self.recency.len() >= self.capacity {
            if let Some(old) = self.recency.pop_front() {
                self.rows[old] = None;
            }
        }
        let xi = &self.x[i];
        let row = self
            .x
            .iter()
            .map(|xj| self.kernel.eval(xi, xj))
            .collect::<Result<Vec<_>>>()?;
        self.rows[i] = Some(row);
        self.recency.push_back(i);
        Ok(())
    }

    fn row(&self, i: usize) -> &[f64] {
        self.rows[i].as_deref().expect("row loaded by ensure")
    }
}

/// Full solution of one dual problem.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    /// Dual objective value at `alpha`.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn in_up(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a < c) || (y < 0.0 && a > 0.0)
}

fn in_low(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a > 0.0) || (y < 0.0 && a < c)
}

/// Dual objective `sum(a) - 1/2 a' Q a` with `Q_ij = y_i y_j K(x_i, x_j)`.
pub fn dual_objective(x: &[Vec<f64>], y: &[f64], alpha: &[f64], kernel: &Kernel) -> Result<f64> {
    let mut quad = 0.0;
    for i in 0..x.len() {
        if alpha[i] == 0.0 {
            continue;
        }
        for j in 0..x.len() {
            if alpha[j] != 0.0 {
                quad += alpha[i] * alpha[j] * y[i] * y[j] * kernel.eval(&x[i], &x[j])?;
            }
        }
    }
    Ok(alpha.iter().sum::<f64>() - 0.5 * quad)
}

fn check_problem(x: &[Vec<f64>], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InvalidTrainingData(format!(
            "need at least 2 rows, got {}",
            x.len()
        )));
    }
    if let Some(v) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidTrainingData(format!("labels must be +1/-1, got {v}")));
    }
    if !(y.contains(&1.0) && y.contains(&-1.0)) {
        return Err(Error::InvalidTrainingData("both classes must be present".into()));
    }
    let dim = x[0].len();
    if let Some(row) = x.iter().find(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: row.len(),
        });
    }
    Ok(())
}

/// Solve the dual with SMO, returning every multiplier.
pub fn solve_dual(x: &[Vec<f64>], y: &[f64], kernel: &Kernel, config: &TrainConfig) -> Result<DualSolution> {
    check_problem(x, y)?;
    kernel.validate()?;
    config.validate()?;

    let n = x.len();
    let c = config.c;
    let diag = x
        .iter()
        .map(|xi| kernel.eval(xi, xi))
        .collect::<Result<Vec<_>>>()?;
    let mut cache = KernelCache::new(x, *kernel, config.kernel_cache_budget);
    let mut alpha = vec![0.0; n];
    // gradient of 1/2 a'Qa - sum(a)
    let mut grad = vec![-1.0; n];
    let mut iterations = 0;
    let mut unchanged = 0;

    let converged = loop {
        let mut i = None;
        let mut g_max = f64::NEG_INFINITY;
        let mut j = None;
        let mut g_min = f64::INFINITY;
        for t in 0..n {
            let v = -y[t] * grad[t];
            if in_up(y[t], alpha[t], c) && v > g_max {
                g_max = v;
                i = Some(t);
            }
            if in_low(y[t], alpha[t], c) && v < g_min {
                g_min = v;
                j = Some(t);
            }
        }
        let (Some(i), Some(j)) = (i, j) else { break true };
        if g_max - g_min < config.kkt_tolerance {
            break true;
        }
        if iterations >= config.max_iterations {
            break false;
        }
        iterations += 1;

        cache.ensure(i)?;
        cache.ensure(j)?;
        let k_ij = cache.row(i)[j];
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let (mut ai, mut aj) = (old_i, old_j);

        if y[i] != y[j] {
            let quad = (diag[i] + diag[j] - 2.0 * k_ij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let quad = (diag[i] + diag[j] - 2.0 * k_ij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        alpha[i] = ai;
        alpha[j] = aj;

        let (d_i, d_j) = (ai - old_i, aj - old_j);
        if d_i == 0.0 && d_j == 0.0 {
            unchanged += 1;
            if unchanged >= config.max_passes_without_change {
                break false;
            }
            continue;
        }
        unchanged = 0;
        let (row_i, row_j) = (cache.row(i), cache.row(j));
        for t in 0..n {
            grad[t] += y[t] * (y[i] * row_i[t] * d_i + y[j] * row_j[t] * d_j);
        }
    };

    if !converged {
        log::warn!("SMO stopped after {iterations} iterations without meeting the KKT tolerance");
    }

    // bias: average over unbounded support vectors, else midpoint of the feasible range
    let free: Vec<f64> = (0..n)
        .filter(|&t| alpha[t] > 0.0 && alpha[t] < c)
        .map(|t| -y[t] * grad[t])
        .collect();
    let bias = if free.is_empty() {
        let up = (0..n)
            .filter(|&t| in_up(y[t], alpha[t], c))
            .map(|t| -y[t] * grad[t])
            .fold(f64::NEG_INFINITY, f64::max);
        let low = (0..n)
            .filter(|&t| in_low(y[t], alpha[t], c))
            .map(|t| -y[t] * grad[t])
            .fold(f64::INFINITY, f64::min);
        match (up.is_finite(), low.is_finite()) {
            (true, true) => 0.5 * (up + low),
            (true, false) => up,
            (false, true) => low,
            (false, false) => 0.0,
        }
    } else {
        free.iter().sum::<f64>() / free.len() as f64
    };
    let objective = 0.5 * alpha.iter().zip(&grad).map(|(a, g)| a * (1.0 - g)).sum::<f64>();

    Ok(DualSolution {
        alpha,
        bias,
        objective,
        iterations,
        converged,
    })
}

/// A trained binary classifier. Only rows with a non-zero multiplier are kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarySvmModel {
    pub support_vectors: Vec<Vec<f64>>,
    /// `alpha_i * y_i` per support vector.
    pub dual_weights: Vec<f64>,
    pub bias: f64,
    pub kernel: Kernel,
    pub converged: bool,
}

impl BinarySvmModel {
    pub fn dim(&self) -> Option<usize> {
        self.support_vectors.first().map(Vec::len)
    }

    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        let mut sum = self.bias;
        for (sv, w) in self.support_vectors.iter().zip(&self.dual_weights) {
            sum += w * self.kernel.eval(sv, x)?;
        }
        Ok(sum)
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        Ok(if self.decision_value(x)? > 0.0 { 1.0 } else { -1.0 })
    }
}

/// Train a binary SVM on labels in {-1, +1}.
pub fn train_binary(x: &[Vec<f64>], y: &[f64], kernel: &Kernel, config: &TrainConfig) -> Result<BinarySvmModel> {
    let sol = solve_dual(x, y, kernel, config)?;
    let mut support_vectors = Vec::new();
    let mut dual_weights = Vec::new();
    for (t, &a) in sol.alpha.iter().enumerate() {
        if a > 0.0 {
            support_vectors.push(x[t].clone());
            dual_weights.push(a * y[t]);
        }
    }
    Ok(BinarySvmModel {
        support_vectors,
        dual_weights,
        bias: sol.bias,
        kernel: *kernel,
        converged: sol.converged,
    })
}
