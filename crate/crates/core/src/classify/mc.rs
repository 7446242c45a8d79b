//! Regularized latent-factor matrix completion and its threshold test.
//!
//! Known-strong cells supply their exact gains and inferred-weak cells a
//! pseudo-observation at the weak target; the solver minimizes the squared
//! error over those cells plus Frobenius regularization of both factors.
//! Two solvers share the objective: fixed-step alternating full-gradient
//! descent (the reference parameterization) and exact alternating ridge
//! least squares, which guarantees a non-increasing objective.

use nalgebra::{DMatrix, DVector};
use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::omega::ObservationSets;
use crate::error::Error;
use crate::Result;

/// Solver used by [`mc_fit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMode {
    /// Fixed-step alternating full-gradient descent.
    Gradient,
    /// Exact alternating ridge least-squares block updates.
    Als,
}

/// Completion hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct McParams {
    /// Frobenius regularization weight on both factors.
    pub regularization: f64,
    /// Latent rank.
    pub rank: usize,
    /// Gradient step size (gradient mode only).
    pub step_size: f64,
    pub max_iters: usize,
    /// Stop once the normalized training error drops to this bound.
    pub stop_error: f64,
    /// Pseudo-observation value for inferred-weak cells, dB.
    pub weak_target_db: f64,
    pub solver: SolverMode,
}

impl Default for McParams {
    fn default() -> Self {
        McParams {
            regularization: 20.0,
            rank: 200,
            step_size: 5e-5,
            max_iters: 1000,
            stop_error: 1e-2,
            weak_target_db: -18.0,
            solver: SolverMode::Als,
        }
    }
}

impl McParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.regularization > 0.0) {
            return Err(Error::config("mc regularization must be > 0"));
        }
        if self.rank == 0 {
            return Err(Error::config("mc rank must be >= 1"));
        }
        if !(self.step_size > 0.0) {
            return Err(Error::config("mc step_size must be > 0"));
        }
        if self.max_iters == 0 {
            return Err(Error::config("mc max_iters must be >= 1"));
        }
        if !(self.stop_error > 0.0) {
            return Err(Error::config("mc stop_error must be > 0"));
        }
        if !self.weak_target_db.is_finite() {
            return Err(Error::config("mc weak_target_db must be finite"));
        }
        Ok(())
    }
}

/// The two latent-factor matrices; their product estimates the gain matrix
/// on unobserved cells (dB scale).
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    /// Sector factors, `sectors x rank`.
    pub row_factors: Array2<f64>,
    /// Device factors, `devices x rank`.
    pub col_factors: Array2<f64>,
}

impl FactorPair {
    pub fn rank(&self) -> usize {
        self.row_factors.ncols()
    }

    /// Predicted dB gain of one cell.
    pub fn predict(&self, sector: usize, device: usize) -> f64 {
        let a = self.row_factors.row(sector);
        let b = self.col_factors.row(device);
        a.dot(&b)
    }

    /// Full predicted matrix.
    pub fn predicted(&self) -> Array2<f64> {
        self.row_factors.dot(&self.col_factors.t())
    }
}

/// Seeded random initialization: i.i.d. zero-mean Gaussian entries with
/// standard deviation `0.1 / sqrt(rank)`, row factors drawn first.
pub fn initial_factors(
    sectors: usize,
    devices: usize,
    rank: usize,
    rng: &mut impl Rng,
) -> FactorPair {
    let normal = Normal::new(0.0, 0.1 / (rank as f64).sqrt()).expect("valid std");
    let mut draw = |n: usize| {
        let data: Vec<f64> = (0..n * rank).map(|_| normal.sample(rng)).collect();
        Array2::from_shape_vec((n, rank), data).expect("shape")
    };
    let row_factors = draw(sectors);
    let col_factors = draw(devices);
    FactorPair { row_factors, col_factors }
}

/// One point of the solver trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitTracePoint {
    pub iter: usize,
    /// Data term plus regularization.
    pub objective: f64,
    /// Training error normalized by the energy of the targets.
    pub normalized_error: f64,
}

/// Fit result: factors plus the per-iteration trace.
#[derive(Debug, Clone)]
pub struct McFit {
    pub factors: FactorPair,
    pub trace: Vec<FitTracePoint>,
    /// True when the stop bound was reached before `max_iters`.
    pub converged: bool,
}

struct Problem {
    /// Per sector: observed `(device, target)` pairs.
    rows: Vec<Vec<(u32, f64)>>,
    /// Per device: observed `(sector, target)` pairs.
    cols: Vec<Vec<(u32, f64)>>,
    /// Energy of the targets, the denominator of the normalized error.
    target_energy: f64,
}

fn build_problem(obs: &ObservationSets, weak_target_db: f64) -> Problem {
    let (sectors, devices) = obs.dims();
    let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); sectors];
    let mut cols: Vec<Vec<(u32, f64)>> = vec![Vec::new(); devices];
    let mut target_energy = 0.0;
    for (i, j, gain) in obs.strong_entries() {
        rows[i].push((j as u32, gain));
        target_energy += gain * gain;
    }
    for (i, j) in obs.weak_entries() {
        rows[i].push((j as u32, weak_target_db));
        target_energy += weak_target_db * weak_target_db;
    }
    for (i, list) in rows.iter_mut().enumerate() {
        list.sort_unstable_by_key(|(j, _)| *j);
        for &(j, y) in list.iter() {
            cols[j as usize].push((i as u32, y));
        }
    }
    Problem { rows, cols, target_energy }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Sum of squared residuals over the observed cells.
fn training_sse(problem: &Problem, theta: &Array2<f64>, x: &Array2<f64>) -> f64 {
    let rank = theta.ncols();
    let xs = x.as_slice().expect("standard layout");
    let ts = theta.as_slice().expect("standard layout");
    let mut sse = 0.0;
    for (i, list) in problem.rows.iter().enumerate() {
        let trow = &ts[i * rank..(i + 1) * rank];
        for &(j, y) in list {
            let xrow = &xs[j as usize * rank..(j as usize + 1) * rank];
            let r = y - dot(trow, xrow);
            sse += r * r;
        }
    }
    sse
}

/// Exact ridge update of every row of `target` against the fixed `other`
/// factor. Rows are independent and solved in parallel; each row is written
/// only by its own task, so results do not depend on scheduling.
fn als_half_sweep(
    target: &mut Array2<f64>,
    lists: &[Vec<(u32, f64)>],
    other: &Array2<f64>,
    lambda: f64,
) {
    let rank = target.ncols();
    let m = other.nrows();
    let full_gram = other.t().dot(other);
    let gram_slice = full_gram.as_slice().expect("standard layout");
    let other_slice = other.as_slice().expect("standard layout");

    target
        .as_slice_mut()
        .expect("standard layout")
        .par_chunks_mut(rank)
        .enumerate()
        .for_each(|(i, row)| {
            let list = &lists[i];
            if list.is_empty() {
                row.fill(0.0);
                return;
            }
            // Normal matrix in a flat upper-triangular buffer. When most of
            // the row is observed it is cheaper to start from the full Gram
            // matrix and subtract the unobserved contributions.
            let use_complement = 2 * list.len() > m;
            let mut gram: Vec<f64>;
            let mut rhs = vec![0.0; rank];
            if use_complement {
                gram = gram_slice.to_vec();
                let mut observed = vec![false; m];
                for &(j, y) in list {
                    observed[j as usize] = true;
                    let xrow = &other_slice[j as usize * rank..(j as usize + 1) * rank];
                    for (acc, &xv) in rhs.iter_mut().zip(xrow) {
                        *acc += y * xv;
                    }
                }
                for (j, seen) in observed.iter().enumerate() {
                    if !seen {
                        let xrow = &other_slice[j * rank..(j + 1) * rank];
                        for p in 0..rank {
                            let v = xrow[p];
                            let dst = &mut gram[p * rank + p..p * rank + rank];
                            for (q, g) in dst.iter_mut().enumerate() {
                                *g -= v * xrow[p + q];
                            }
                        }
                    }
                }
            } else {
                gram = vec![0.0; rank * rank];
                for &(j, y) in list {
                    let xrow = &other_slice[j as usize * rank..(j as usize + 1) * rank];
                    for p in 0..rank {
                        let v = xrow[p];
                        let dst = &mut gram[p * rank + p..p * rank + rank];
                        for (q, g) in dst.iter_mut().enumerate() {
                            *g += v * xrow[p + q];
                        }
                        rhs[p] += y * v;
                    }
                }
            }

            let a = DMatrix::from_fn(rank, rank, |p, q| {
                let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
                let base = gram[lo * rank + hi];
                if p == q {
                    base + lambda
                } else {
                    base
                }
            });
            let b = DVector::from_column_slice(&rhs);
            let solution = match a.clone().cholesky() {
                Some(chol) => chol.solve(&b),
                None => a.lu().solve(&b).unwrap_or_else(|| DVector::zeros(rank)),
            };
            row.copy_from_slice(solution.as_slice());
        });
}

/// Fixed-step full-gradient update of every row of `target`.
fn gradient_half_sweep(
    target: &mut Array2<f64>,
    lists: &[Vec<(u32, f64)>],
    other: &Array2<f64>,
    lambda: f64,
    step: f64,
) {
    let rank = target.ncols();
    let other_slice = other.as_slice().expect("standard layout");
    target
        .as_slice_mut()
        .expect("standard layout")
        .par_chunks_mut(rank)
        .enumerate()
        .for_each(|(i, row)| {
            let mut acc = vec![0.0; rank];
            for &(j, y) in &lists[i] {
                let xrow = &other_slice[j as usize * rank..(j as usize + 1) * rank];
                let residual = y - dot(row, xrow);
                for (a, &xv) in acc.iter_mut().zip(xrow) {
                    *a += residual * xv;
                }
            }
            let shrink = 1.0 - 2.0 * step * lambda;
            for (rv, a) in row.iter_mut().zip(acc) {
                *rv = *rv * shrink + 2.0 * step * a;
            }
        });
}

/// Fit the latent factors starting from the given initialization.
pub fn mc_fit_with(
    obs: &ObservationSets,
    params: &McParams,
    mut factors: FactorPair,
) -> Result<McFit> {
    params.validate()?;
    if obs.known_count() == 0 {
        return Err(Error::EmptyObservations);
    }
    let problem = build_problem(obs, params.weak_target_db);
    let lambda = params.regularization;

    let objective = |theta: &Array2<f64>, x: &Array2<f64>| -> (f64, f64) {
        let sse = training_sse(&problem, theta, x);
        let reg: f64 = theta.iter().map(|v| v * v).sum::<f64>()
            + x.iter().map(|v| v * v).sum::<f64>();
        let norm = if problem.target_energy > 0.0 { sse / problem.target_energy } else { sse };
        (sse + lambda * reg, norm)
    };

    let mut trace = Vec::with_capacity(params.max_iters + 1);
    let (obj0, err0) = objective(&factors.row_factors, &factors.col_factors);
    trace.push(FitTracePoint { iter: 0, objective: obj0, normalized_error: err0 });

    let mut converged = false;
    for iter in 1..=params.max_iters {
        match params.solver {
            SolverMode::Als => {
                als_half_sweep(&mut factors.row_factors, &problem.rows, &factors.col_factors, lambda);
                als_half_sweep(&mut factors.col_factors, &problem.cols, &factors.row_factors, lambda);
            }
            SolverMode::Gradient => {
                gradient_half_sweep(
                    &mut factors.row_factors,
                    &problem.rows,
                    &factors.col_factors,
                    lambda,
                    params.step_size,
                );
                gradient_half_sweep(
                    &mut factors.col_factors,
                    &problem.cols,
                    &factors.row_factors,
                    lambda,
                    params.step_size,
                );
            }
        }
        let (obj, err) = objective(&factors.row_factors, &factors.col_factors);
        trace.push(FitTracePoint { iter, objective: obj, normalized_error: err });
        if !obj.is_finite() {
            return Err(Error::SolverDiverged { step: params.step_size });
        }
        if err <= params.stop_error {
            converged = true;
            break;
        }
    }
    Ok(McFit { factors, trace, converged })
}

/// Fit with a fresh seeded initialization.
pub fn mc_fit(obs: &ObservationSets, params: &McParams, rng: &mut impl Rng) -> Result<McFit> {
    let (sectors, devices) = obs.dims();
    let factors = initial_factors(sectors, devices, params.rank, rng);
    mc_fit_with(obs, params, factors)
}

/// Threshold test on the completed matrix: known cells pass through, and an
/// unknown cell is declared strong iff its prediction reaches `beta`.
pub fn mc_classify(factors: &FactorPair, obs: &ObservationSets, beta: f64) -> Array2<u8> {
    let (sectors, devices) = obs.dims();
    let predicted = factors.predicted();
    Array2::from_shape_fn((sectors, devices), |(i, j)| {
        if obs.strong(i, j).is_some() {
            1
        } else if obs.is_weak(i, j) {
            0
        } else {
            u8::from(predicted[[i, j]] >= beta)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use approx::assert_relative_eq;

    fn rank_one_observations(sectors: usize, devices: usize) -> (ObservationSets, Array2<f64>) {
        // Outer product with dB values in [-30, 0].
        let u: Vec<f64> = (0..sectors).map(|i| 3.0 + 2.0 * (i as f64 / sectors as f64)).collect();
        let w: Vec<f64> = (0..devices).map(|j| -6.0 + 5.0 * (j as f64 / devices as f64)).collect();
        let truth = Array2::from_shape_fn((sectors, devices), |(i, j)| u[i] * w[j]);
        let mut obs = ObservationSets::new(sectors, devices);
        for ((i, j), g) in truth.indexed_iter() {
            obs.insert_strong(i, j, *g);
        }
        (obs, truth)
    }

    #[test]
    fn rank_one_reconstruction() {
        let (obs, truth) = rank_one_observations(20, 10);
        let params = McParams {
            regularization: 1e-6,
            rank: 2,
            stop_error: 1e-300,
            max_iters: 60,
            ..McParams::default()
        };
        let fit = mc_fit(&obs, &params, &mut substream(1, "mc-init", 0)).unwrap();
        let predicted = fit.factors.predicted();
        let num: f64 = (&predicted - &truth).iter().map(|v| v * v).sum::<f64>();
        let den: f64 = truth.iter().map(|v| v * v).sum::<f64>();
        let rel = (num / den).sqrt();
        assert!(rel <= 1e-3, "relative Frobenius error {rel}");
    }

    #[test]
    fn empty_observations_cannot_fit() {
        let obs = ObservationSets::new(5, 4);
        let err = mc_fit(&obs, &McParams::default(), &mut substream(1, "mc-init", 0)).unwrap_err();
        assert!(matches!(err, Error::EmptyObservations));
    }

    fn random_instance(
        sectors: usize,
        devices: usize,
        seed: u64,
    ) -> ObservationSets {
        use rand::Rng;
        let mut rng = substream(seed, "mc-instance", 0);
        let mut obs = ObservationSets::new(sectors, devices);
        for i in 0..sectors {
            for j in 0..devices {
                let roll: f64 = rng.gen();
                if roll < 0.35 {
                    obs.insert_strong(i, j, -rng.gen::<f64>() * 17.0);
                } else if roll < 0.7 {
                    obs.insert_weak(i, j);
                }
            }
        }
        obs
    }

    #[test]
    fn als_objective_never_increases() {
        let obs = random_instance(20, 15, 5);
        let params = McParams {
            regularization: 0.5,
            rank: 4,
            stop_error: 1e-300,
            max_iters: 40,
            ..McParams::default()
        };
        let fit = mc_fit(&obs, &params, &mut substream(2, "mc-init", 0)).unwrap();
        assert_eq!(fit.trace.len(), 41);
        for pair in fit.trace.windows(2) {
            let tol = 1e-9 * pair[0].objective.abs().max(1.0);
            assert!(
                pair[1].objective <= pair[0].objective + tol,
                "objective rose from {} to {}",
                pair[0].objective,
                pair[1].objective
            );
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        // Finite-difference oracle on an 8x6, rank-3 instance. One gradient
        // iteration with a tiny step recovers the analytic gradients of the
        // objective at the initial factors (for the sector half-step) and at
        // the updated sector factors (for the device half-step).
        let obs = random_instance(8, 6, 7);
        let weak_target = -18.0;
        let lambda = 0.7;
        let step = 1e-7;
        let rank = 3;
        let init = initial_factors(8, 6, rank, &mut substream(3, "mc-init", 0));

        let objective = |theta: &Array2<f64>, x: &Array2<f64>| -> f64 {
            let mut sse = 0.0;
            for (i, j, g) in obs.strong_entries() {
                let p = theta.row(i).dot(&x.row(j));
                sse += (g - p) * (g - p);
            }
            for (i, j) in obs.weak_entries() {
                let p = theta.row(i).dot(&x.row(j));
                sse += (weak_target - p) * (weak_target - p);
            }
            sse + lambda
                * (theta.iter().map(|v| v * v).sum::<f64>()
                    + x.iter().map(|v| v * v).sum::<f64>())
        };

        let params = McParams {
            regularization: lambda,
            rank,
            step_size: step,
            max_iters: 1,
            stop_error: 1e-300,
            weak_target_db: weak_target,
            solver: SolverMode::Gradient,
        };
        let fit = mc_fit_with(&obs, &params, init.clone()).unwrap();

        let h = 1e-5;
        // Sector-factor gradient at (theta0, x0).
        for &(p, q) in &[(0usize, 0usize), (3, 1), (7, 2), (5, 0)] {
            let analytic = (init.row_factors[[p, q]] - fit.factors.row_factors[[p, q]]) / step;
            let mut plus = init.clone();
            plus.row_factors[[p, q]] += h;
            let mut minus = init.clone();
            minus.row_factors[[p, q]] -= h;
            let fd = (objective(&plus.row_factors, &plus.col_factors)
                - objective(&minus.row_factors, &minus.col_factors))
                / (2.0 * h);
            assert_relative_eq!(analytic, fd, max_relative = 1e-5, epsilon = 1e-7);
        }
        // Device-factor gradient at (theta1, x0).
        for &(p, q) in &[(0usize, 0usize), (2, 2), (5, 1), (4, 0)] {
            let analytic = (init.col_factors[[p, q]] - fit.factors.col_factors[[p, q]]) / step;
            let mut plus = init.col_factors.clone();
            plus[[p, q]] += h;
            let mut minus = init.col_factors.clone();
            minus[[p, q]] -= h;
            let fd = (objective(&fit.factors.row_factors, &plus)
                - objective(&fit.factors.row_factors, &minus))
                / (2.0 * h);
            assert_relative_eq!(analytic, fd, max_relative = 1e-5, epsilon = 1e-7);
        }
    }

    #[test]
    fn huge_step_diverges_with_named_step() {
        let obs = random_instance(12, 10, 9);
        let params = McParams {
            rank: 3,
            step_size: 10.0,
            solver: SolverMode::Gradient,
            stop_error: 1e-300,
            max_iters: 200,
            ..McParams::default()
        };
        let err = mc_fit(&obs, &params, &mut substream(4, "mc-init", 0)).unwrap_err();
        match err {
            Error::SolverDiverged { step } => assert_relative_eq!(step, 10.0),
            other => panic!("expected divergence, got {other}"),
        }
    }

    #[test]
    fn classify_endpoints_and_monotonicity() {
        let obs = random_instance(10, 8, 11);
        let params = McParams {
            regularization: 0.5,
            rank: 3,
            max_iters: 20,
            stop_error: 1e-300,
            ..McParams::default()
        };
        let fit = mc_fit(&obs, &params, &mut substream(5, "mc-init", 0)).unwrap();
        let predicted = fit.factors.predicted();
        let unknown: Vec<(usize, usize)> = predicted
            .indexed_iter()
            .filter(|((i, j), _)| !obs.is_known(*i, *j))
            .map(|(idx, _)| idx)
            .collect();
        assert!(!unknown.is_empty());
        let lo = unknown.iter().map(|&(i, j)| predicted[[i, j]]).fold(f64::INFINITY, f64::min);
        let hi = unknown.iter().map(|&(i, j)| predicted[[i, j]]).fold(f64::NEG_INFINITY, f64::max);

        // Below the minimum everything unknown flips to 1; above the maximum
        // everything unknown is 0.
        let all_on = mc_classify(&fit.factors, &obs, lo - 1.0);
        let all_off = mc_classify(&fit.factors, &obs, hi + 1.0);
        for &(i, j) in &unknown {
            assert_eq!(all_on[[i, j]], 1);
            assert_eq!(all_off[[i, j]], 0);
        }

        // Raising beta never flips a cell from 0 to 1, and known cells never
        // move at all.
        let betas = [lo - 1.0, lo + 0.3 * (hi - lo), lo + 0.7 * (hi - lo), hi + 1.0];
        let mut prev: Option<Array2<u8>> = None;
        for &beta in &betas {
            let chat = mc_classify(&fit.factors, &obs, beta);
            for (i, j, g) in obs.strong_entries() {
                assert_eq!(chat[[i, j]], 1, "strong cell ({i},{j}) gain {g}");
            }
            for (i, j) in obs.weak_entries() {
                assert_eq!(chat[[i, j]], 0);
            }
            if let Some(p) = prev {
                for ((i, j), v) in chat.indexed_iter() {
                    assert!(*v <= p[[i, j]], "raising beta flipped ({i},{j}) on");
                }
            }
            prev = Some(chat);
        }
    }

    #[test]
    fn seeded_fit_is_reproducible() {
        let obs = random_instance(10, 8, 13);
        let params = McParams { rank: 3, max_iters: 10, stop_error: 1e-300, ..McParams::default() };
        let a = mc_fit(&obs, &params, &mut substream(6, "mc-init", 0)).unwrap();
        let b = mc_fit(&obs, &params, &mut substream(6, "mc-init", 0)).unwrap();
        assert_eq!(a.factors, b.factors);
    }
}
