use super::{CostMatrix, SinkhornConfig, Stabilization, TransportPlan};
use crate::error::Result;
use nalgebra::{DMatrix, DVector};

/// Sinkhorn-Knopp scaling of `K = exp(-C / mu)`.
///
/// Starting from `u = 1/N`, `v = 1/M`, alternates
/// `u = 1 / (K v + eps)` and `v = 1 / (K^T u + eps)` until both vectors move
/// by at most `tol` (absolute, elementwise) or `max_iter` sweeps have run.
/// The log-domain variant performs the same sweeps on `log u`, `log v` with
/// log-sum-exp and applies the same stopping rule to the exponentiated
/// iterates; it omits `eps`. For square problems it then finishes with Newton
/// steps on the scalings, landing on the fixed point where every row and
/// column of `P` sums to 1. Plain sweeps approach that point sublinearly when
/// `P` has tiny but non-negligible off-plan mass, and a plan that misses it
/// can cost less than any permutation. `converged` then means the marginals
/// are within `tol`, and `iterations` counts sweeps plus Newton steps.
pub fn sinkhorn_plan(c: &CostMatrix, cfg: &SinkhornConfig) -> Result<TransportPlan> {
    cfg.validate()?;
    Ok(match cfg.stabilization {
        Stabilization::Naive => naive(c, cfg),
        Stabilization::LogDomain => log_domain(c, cfg),
    })
}

fn all_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| x == y || (x - y).abs() <= tol)
}

fn naive(c: &CostMatrix, cfg: &SinkhornConfig) -> TransportPlan {
    let (n, m) = (c.rows(), c.cols());
    let k: Vec<f64> = c.as_slice().iter().map(|&x| (-(x / cfg.mu)).exp()).collect();
    let mut u = vec![1.0 / n as f64; n];
    let mut v = vec![1.0 / m as f64; m];
    let mut u_prev = u.clone();
    let mut v_prev = v.clone();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iter {
        iterations += 1;
        u_prev.copy_from_slice(&u);
        v_prev.copy_from_slice(&v);
        for (i, ui) in u.iter_mut().enumerate() {
            let row = &k[i * m..(i + 1) * m];
            let kv: f64 = row.iter().zip(&v).map(|(a, b)| a * b).sum();
            *ui = 1.0 / (kv + cfg.epsilon);
        }
        for (j, vj) in v.iter_mut().enumerate() {
            let ktu: f64 = (0..n).map(|i| k[i * m + j] * u[i]).sum();
            *vj = 1.0 / (ktu + cfg.epsilon);
        }
        if all_close(&u, &u_prev, cfg.tol) && all_close(&v, &v_prev, cfg.tol) {
            converged = true;
            break;
        }
    }

    let mut data = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            data.push(u[i] * k[i * m + j] * v[j]);
        }
    }
    TransportPlan { rows: n, cols: m, data, converged, iterations }
}

fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// `|exp(a) - exp(b)| <= tol`, evaluated without overflowing where possible.
fn exp_close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    let hi = a.max(b);
    let gap = (a - b).abs();
    hi.exp() * -(-gap).exp_m1() <= tol
}

/// Sweeps stop early and hand over to Newton once the marginals are this close.
const NEWTON_SWITCH: f64 = 0.1;
const NEWTON_MAX_STEPS: usize = 100;
const NEWTON_TARGET: f64 = 1e-13;

fn log_domain(c: &CostMatrix, cfg: &SinkhornConfig) -> TransportPlan {
    let (n, m) = (c.rows(), c.cols());
    let log_k: Vec<f64> = c.as_slice().iter().map(|&x| -(x / cfg.mu)).collect();
    let mut lu = vec![-(n as f64).ln(); n];
    let mut lv = vec![-(m as f64).ln(); m];
    let mut lu_prev = lu.clone();
    let mut lv_prev = lv.clone();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iter {
        iterations += 1;
        lu_prev.copy_from_slice(&lu);
        lv_prev.copy_from_slice(&lv);
        for (i, lui) in lu.iter_mut().enumerate() {
            let row = &log_k[i * m..(i + 1) * m];
            *lui = -log_sum_exp(row.iter().zip(&lv).map(|(a, b)| a + b));
        }
        for (j, lvj) in lv.iter_mut().enumerate() {
            *lvj = -log_sum_exp((0..n).map(|i| log_k[i * m + j] + lu[i]));
        }
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| exp_close(*x, *y, cfg.tol));
        if close(&lu, &lu_prev) && close(&lv, &lv_prev) {
            converged = true;
            break;
        }
        if n == m && max_abs(&marginal_residual(&scaled_plan(&log_k, &lu, &lv), n, m)) <= NEWTON_SWITCH {
            break;
        }
    }

    if n == m {
        iterations += newton_polish(&log_k, &mut lu, &mut lv);
        converged = max_abs(&marginal_residual(&scaled_plan(&log_k, &lu, &lv), n, m)) <= cfg.tol;
    }
    TransportPlan { rows: n, cols: m, data: scaled_plan(&log_k, &lu, &lv), converged, iterations }
}

fn scaled_plan(log_k: &[f64], lu: &[f64], lv: &[f64]) -> Vec<f64> {
    let m = lv.len();
    let mut data = Vec::with_capacity(log_k.len());
    for (i, lui) in lu.iter().enumerate() {
        for (j, lvj) in lv.iter().enumerate() {
            data.push((lui + log_k[i * m + j] + lvj).exp());
        }
    }
    data
}

/// Row sums minus 1 followed by column sums minus 1.
fn marginal_residual(p: &[f64], n: usize, m: usize) -> Vec<f64> {
    let mut r = vec![-1.0; n + m];
    for i in 0..n {
        for j in 0..m {
            r[i] += p[i * m + j];
            r[n + j] += p[i * m + j];
        }
    }
    r
}

fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Newton's method on the marginal equations in `(log u, log v)`, with a
/// backtracking search on the largest residual. The Jacobian is
/// `[[diag(rows), P], [P^T, diag(cols)]]`, positive semidefinite with the
/// null direction `(1, -1)`; a small ridge makes it definite. Returns the
/// number of accepted steps.
fn newton_polish(log_k: &[f64], lu: &mut [f64], lv: &mut [f64]) -> usize {
    let (n, m) = (lu.len(), lv.len());
    let k = n + m;
    let mut steps = 0;
    while steps < NEWTON_MAX_STEPS {
        let p = scaled_plan(log_k, lu, lv);
        let residual = marginal_residual(&p, n, m);
        let norm = max_abs(&residual);
        if norm.is_nan() || norm <= NEWTON_TARGET {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(k, k);
        for i in 0..n {
            for j in 0..m {
                let x = p[i * m + j];
                jac[(i, i)] += x;
                jac[(n + j, n + j)] += x;
                jac[(i, n + j)] = x;
                jac[(n + j, i)] = x;
            }
        }
        let ridge = 1e-12 * jac.diagonal().max();
        for i in 0..k {
            jac[(i, i)] += ridge;
        }
        let Some(chol) = jac.cholesky() else { break };
        let r = chol.solve(&DVector::from_vec(residual));
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let tu: Vec<f64> = lu.iter().zip(&r).map(|(a, d)| a - t * d).collect();
            let tv: Vec<f64> = lv.iter().zip(r.iter().skip(n)).map(|(a, d)| a - t * d).collect();
            if max_abs(&marginal_residual(&scaled_plan(log_k, &tu, &tv), n, m)) < norm {
                lu.copy_from_slice(&tu);
                lv.copy_from_slice(&tv);
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        steps += 1;
    }
    steps
}
