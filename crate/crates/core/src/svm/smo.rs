//! Sequential minimal optimization for the C-SVM dual
//!
//! ```text
//! min ½ αᵀQα − eᵀα   s.t.  0 ≤ α ≤ C,  yᵀα = 0,   Q_ij = y_i y_j K(x_i, x_j)
//! ```
//!
//! Each step picks the maximal-violating `i` and the `j` giving the largest
//! second-order decrease of the objective, then solves the two-variable
//! subproblem analytically. Selection is deterministic: ties go to the highest
//! index.

use serde::{Deserialize, Serialize};

use super::kernel::KernelSpec;
use crate::error::{Error, Result};

const TAU: f64 = 1e-12;
const DEFAULT_MIN_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmoParams {
    /// Box constraint.
    pub c: f64,
    /// Stopping tolerance on the maximal KKT violation.
    pub tol: f64,
    /// Iteration cap; `None` means 50 per training row but at least 10⁶.
    pub max_iterations: Option<usize>,
}

impl Default for SmoParams {
    fn default() -> Self {
        SmoParams {
            c: 1.0,
            tol: 1e-3,
            max_iterations: None,
        }
    }
}

impl SmoParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidConfig(format!("C must be positive, got {}", self.c)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iterations == Some(0) {
            return Err(Error::InvalidConfig("iteration cap must be positive".into()));
        }
        Ok(())
    }

    pub fn iteration_cap(&self, n: usize) -> usize {
        self.max_iterations
            .unwrap_or((50 * n).max(DEFAULT_MIN_ITERATIONS))
            .max(1)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Solution {
    pub alpha: Vec<f64>,
    pub rho: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Maximal KKT violation `m(α) − M(α)` at exit.
    pub gap: f64,
    /// Dual objective `eᵀα − ½αᵀQα` after every iteration, when requested.
    pub trace: Option<Vec<f64>>,
}

pub(crate) fn gram(kernel: &KernelSpec, rows: &[Vec<f64>]) -> Vec<f64> {
    let n = rows.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = kernel.eval_unchecked(&rows[i], &rows[j]);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    k
}

fn dual_objective(alpha: &[f64], grad: &[f64]) -> f64 {
    // with G = Qα − e:  eᵀα − ½αᵀQα = −½ Σ α_i (G_i − 1)
    -0.5 * alpha.iter().zip(grad).map(|(a, g)| a * (g - 1.0)).sum::<f64>()
}

/// Solves the dual for labels `y ∈ {±1}` given the row-major Gram matrix.
pub(crate) fn solve(k: &[f64], y: &[f64], params: &SmoParams, trace: bool) -> Solution {
    let n = y.len();
    let c = params.c;
    let cap = params.iteration_cap(n);
    let kk = |i: usize, j: usize| k[i * n + j];

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut trace = trace.then(Vec::new);
    let mut iterations = 0;
    let mut converged = false;
    let mut gap;

    loop {
        // i: argmax of -y_t G_t over I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            let in_up = if y[t] > 0.0 { alpha[t] < c } else { alpha[t] > 0.0 };
            if in_up && -y[t] * grad[t] >= gmax {
                gmax = -y[t] * grad[t];
                i_sel = Some(t);
            }
        }
        // j: over I_low, largest second-order decrease
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = None;
        let mut best = f64::INFINITY;
        if let Some(i) = i_sel {
            for t in 0..n {
                let in_low = if y[t] > 0.0 { alpha[t] > 0.0 } else { alpha[t] < c };
                if !in_low {
                    continue;
                }
                let v = y[t] * grad[t];
                gmax2 = gmax2.max(v);
                let b = gmax + v;
                if b > 0.0 {
                    let mut a = kk(i, i) + kk(t, t) - 2.0 * kk(i, t);
                    if a <= 0.0 {
                        a = TAU;
                    }
                    let obj = -b * b / a;
                    if obj <= best {
                        best = obj;
                        j_sel = Some(t);
                    }
                }
            }
        }
        gap = gmax + gmax2;
        let (i, j) = match (i_sel, j_sel) {
            (Some(i), Some(j)) if gap >= params.tol => (i, j),
            _ => {
                converged = true;
                break;
            }
        };
        if iterations >= cap {
            break;
        }
        iterations += 1;

        let (old_ai, old_aj) = (alpha[i], alpha[j]);
        let (mut ai, mut aj) = (old_ai, old_aj);
        if y[i] != y[j] {
            let mut quad = kk(i, i) + kk(j, j) - 2.0 * kk(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
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
            let mut quad = kk(i, i) + kk(j, j) - 2.0 * kk(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
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

        let (di, dj) = (ai - old_ai, aj - old_aj);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * kk(i, t) * di + y[j] * kk(j, t) * dj);
        }
        if let Some(tr) = trace.as_mut() {
            tr.push(dual_objective(&alpha, &grad));
        }
    }

    let rho = bias_offset(&alpha, &grad, y, c);
    Solution {
        alpha,
        rho,
        iterations,
        converged,
        gap,
        trace,
    }
}

/// Offset `ρ` (decision = Σ α_i y_i K − ρ): mean of `y_i G_i` over free
/// vectors, else the midpoint of the feasible interval.
fn bias_offset(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut free = 0usize;
    let mut sum = 0.0;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum += yg;
        }
    }
    if free > 0 {
        sum / free as f64
    } else {
        (ub + lb) / 2.0
    }
}
