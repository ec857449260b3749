//! Multistart local maximization of OPT and OPT-ineq.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    dirichlet_point, ineq_violation, marginals, objective_unchecked, quadratic_forms, r_pairs, random_ineq_point,
    repair_ineq, s_pairs, t_pairs, OptPoint, Problem, FOUR_27, IDENTITY_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::rng::{self, SeededRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Projected gradient ascent with Armijo backtracking.
    ProjectedGradient,
    /// Nelder–Mead with every vertex projected back onto the simplex.
    NelderMead,
    /// Simulated annealing over mass transfers between two types.
    Annealing,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "projected-gradient" | "pgd" => Ok(Method::ProjectedGradient),
            "nelder-mead" | "nm" => Ok(Method::NelderMead),
            "annealing" | "sa" => Ok(Method::Annealing),
            _ => Err(Error::invalid(format!(
                "unknown method \"{s}\" (expected projected-gradient, nelder-mead or annealing)"
            ))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ProjectedGradient => "projected-gradient",
            Method::NelderMead => "nelder-mead",
            Method::Annealing => "annealing",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaximizeConfig {
    pub problem: Problem,
    pub method: Method,
    /// Number of random starts.
    pub starts: usize,
    pub seed: u64,
    /// Slack for declaring the optimum reached or exceeded.
    pub tolerance: f64,
    pub max_iters: usize,
    /// Also run from the known optimal point, as start number `starts`.
    pub witness_start: bool,
}

impl MaximizeConfig {
    pub fn new(problem: Problem) -> Self {
        MaximizeConfig {
            problem,
            method: Method::ProjectedGradient,
            starts: 200,
            seed: 0,
            tolerance: 1e-6,
            max_iters: 5000,
            witness_start: false,
        }
    }
}

/// Outcome of one start.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StartTrace {
    pub start: usize,
    pub seed: u64,
    pub initial_value: f64,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Anomaly {
    pub start: usize,
    pub value: f64,
    pub point: OptPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaximizeReport {
    pub problem: Problem,
    pub method: Method,
    pub starts: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub best_value: f64,
    pub best_start: usize,
    pub best_point: OptPoint,
    /// `best_value ≥ 4/27 − tolerance`.
    pub reached_optimum: bool,
    /// Final points above `4/27 + tolerance`.
    pub anomalies: Vec<Anomaly>,
    pub trace: Vec<StartTrace>,
}

/// Runs `config.starts` seeded local searches in parallel.
///
/// Start `i` draws a Dirichlet(1) point from `derive_seed(seed, i)` (repaired
/// onto `R ≤ T`, `S ≤ T` for OPT-ineq) and the best result is chosen by
/// value, ties going to the lower start index, so the report is independent
/// of the thread count.
pub fn maximize(config: &MaximizeConfig) -> Result<MaximizeReport> {
    if config.starts == 0 && !config.witness_start {
        return Err(Error::invalid("need at least one start"));
    }
    if !(config.tolerance >= 0.0) {
        return Err(Error::invalid("tolerance must be nonnegative"));
    }
    let total = config.starts + usize::from(config.witness_start);
    let runs: Vec<(StartTrace, OptPoint)> = (0..total)
        .into_par_iter()
        .map(|i| {
            let seed = rng::derive_seed(config.seed, i as u64);
            let mut r = rng::seeded(seed);
            let start = if i == config.starts {
                OptPoint::witness()
            } else {
                match config.problem {
                    Problem::Opt => dirichlet_point(&mut r),
                    Problem::OptIneq => random_ineq_point(&mut r, dirichlet_point),
                }
            };
            run_from(config, i, seed, &start, &mut r)
        })
        .collect();
    let (best_idx, _) = runs
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, (t, _))| if t.value > bv { (i, t.value) } else { (bi, bv) });
    let anomalies = runs
        .iter()
        .filter(|(t, _)| t.value > FOUR_27 + config.tolerance)
        .map(|(t, p)| Anomaly {
            start: t.start,
            value: t.value,
            point: p.clone(),
        })
        .collect();
    let best_value = runs[best_idx].0.value;
    Ok(MaximizeReport {
        problem: config.problem,
        method: config.method,
        starts: config.starts,
        seed: config.seed,
        tolerance: config.tolerance,
        best_value,
        best_start: best_idx,
        best_point: runs[best_idx].1.clone(),
        reached_optimum: best_value >= FOUR_27 - config.tolerance,
        anomalies,
        trace: runs.into_iter().map(|(t, _)| t).collect(),
    })
}

/// One local search from `start` with the configured method.
fn run_from(config: &MaximizeConfig, index: usize, seed: u64, start: &OptPoint, r: &mut SeededRng) -> (StartTrace, OptPoint) {
    let problem = config.problem;
    let initial_value = objective_unchecked(start.values(), problem);
    let (x, iterations, converged) = match config.method {
        Method::ProjectedGradient => projected_gradient(problem, *start.values(), config.max_iters),
        Method::NelderMead => nelder_mead(problem, *start.values(), config.max_iters),
        Method::Annealing => annealing(problem, *start.values(), config.max_iters, r),
    };
    let value = objective_unchecked(&x, problem);
    (
        StartTrace {
            start: index,
            seed,
            initial_value,
            value,
            iterations,
            converged,
        },
        OptPoint::from_raw(x),
    )
}

fn add_form_grad(x: &[f64; 27], pairs: &[(usize, usize)], coef: f64, g: &mut [f64; 27]) {
    if coef == 0.0 {
        return;
    }
    for &(i, j) in pairs {
        g[i] += coef * x[j];
        g[j] += coef * x[i];
    }
}

/// Smoothed minimum `−μ·log(e^{−u/μ} + e^{−v/μ})` and its weight on `u`.
/// With `μ = 0` it is the exact minimum, ties taking `u`.
fn soft_min(u: f64, v: f64, mu: f64) -> (f64, f64) {
    if mu == 0.0 {
        return if u <= v { (u, 1.0) } else { (v, 0.0) };
    }
    let w = 1.0 / (1.0 + ((u - v) / mu).exp());
    (u.min(v) - mu * (-(u - v).abs() / mu).exp().ln_1p(), w)
}

/// Value and gradient of `x·T + a·min_μ(T,R) + b·min_μ(T,S)` (OPT with
/// smoothed minima) or of the OPT-ineq objective. At `μ = 0` and `T = R`
/// or `T = S` the `T` branch is taken.
fn value_and_grad(x: &[f64; 27], problem: Problem, mu: f64) -> (f64, [f64; 27]) {
    let (a, b, xx) = marginals(x);
    let (t, r, s) = quadratic_forms(x);
    let mut g = [0.0; 27];
    let (value, ma, mb, ct, cr, cs) = match problem {
        Problem::Opt => {
            let (ma, wr) = soft_min(t, r, mu);
            let (mb, ws) = soft_min(t, s, mu);
            let ct = xx + a * wr + b * ws;
            (xx * t + a * ma + b * mb, ma, mb, ct, a * (1.0 - wr), b * (1.0 - ws))
        }
        Problem::OptIneq => (xx * t + a * r + b * s, r, s, xx, a, b),
    };
    for (i, gi) in g.iter_mut().enumerate() {
        *gi = match i / 9 {
            0 => ma,
            1 => mb,
            _ => t,
        };
    }
    add_form_grad(x, t_pairs(), ct, &mut g);
    add_form_grad(x, r_pairs(), cr, &mut g);
    add_form_grad(x, s_pairs(), cs, &mut g);
    (value, g)
}

/// Euclidean projection onto the probability simplex.
pub(crate) fn project_simplex(v: &[f64; 27]) -> [f64; 27] {
    let mut u = *v;
    u.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        css += uj;
        let t = (css - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    let mut out = v.map(|vi| (vi - theta).max(0.0));
    // clean up rounding so the sum is 1 to machine precision
    let sum: f64 = out.iter().sum();
    out.iter_mut().for_each(|o| *o /= sum);
    out
}

/// Maps an arbitrary vector to a feasible point of `problem`.
fn feasible(problem: Problem, v: &[f64; 27]) -> Option<[f64; 27]> {
    let p = OptPoint::from_raw(project_simplex(v));
    match problem {
        Problem::Opt => Some(*p.values()),
        Problem::OptIneq => repair_ineq(&p, 64).ok().flatten().map(|q| *q.values()),
    }
}

/// Smoothing levels for the minima, ending with the exact objective.
const SMOOTHING: [f64; 7] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-8, 0.0];

/// Projected gradient ascent on OPT with smoothed minima, tightening the
/// smoothing stage by stage. For OPT-ineq the ascent runs on the same
/// function, which equals the OPT-ineq objective wherever `R ≤ T` and
/// `S ≤ T` and is smaller elsewhere, and the end point is repaired onto the
/// feasible set (the repair never lowers the OPT value).
fn projected_gradient(problem: Problem, start: [f64; 27], max_iters: usize) -> ([f64; 27], usize, bool) {
    let per_stage = (max_iters / SMOOTHING.len()).max(1);
    let mut x = start;
    let mut used = 0;
    let mut converged = true;
    for mu in SMOOTHING {
        let (y, iters, ok) = ascend(Problem::Opt, x, per_stage, mu);
        x = y;
        used += iters;
        converged = ok;
    }
    if problem == Problem::OptIneq {
        match repair_ineq(&OptPoint::from_raw(x), 64) {
            Ok(Some(p)) => x = *p.values(),
            _ => return (start, used, false),
        }
    }
    (x, used, converged)
}

fn ascend(problem: Problem, mut x: [f64; 27], max_iters: usize, mu: f64) -> ([f64; 27], usize, bool) {
    let value = |y: &[f64; 27]| value_and_grad(y, problem, mu).0;
    let mut step = 1.0;
    for it in 0..max_iters {
        let (f, g) = value_and_grad(&x, problem, mu);
        let mut moved = false;
        while step > 1e-14 {
            let trial: [f64; 27] = std::array::from_fn(|i| x[i] + step * g[i]);
            let y = project_simplex(&trial);
            let fy = value(&y);
            let slope: f64 = (0..27).map(|i| g[i] * (y[i] - x[i])).sum();
            if fy >= f + 1e-4 * slope && fy >= f {
                let dist: f64 = (0..27).map(|i| (y[i] - x[i]).abs()).sum();
                if fy - f <= 1e-16 && dist <= 1e-13 {
                    return (y, it + 1, true);
                }
                x = y;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            return (x, it + 1, true);
        }
        step = (step * 2.0).min(1e3);
    }
    (x, max_iters, false)
}

fn nelder_mead(problem: Problem, start: [f64; 27], max_iters: usize) -> ([f64; 27], usize, bool) {
    let eval = |v: &[f64; 27]| -> Option<([f64; 27], f64)> {
        feasible(problem, v).map(|y| (y, objective_unchecked(&y, problem)))
    };
    let mut simplex: Vec<([f64; 27], f64)> = Vec::with_capacity(28);
    simplex.push((start, objective_unchecked(&start, problem)));
    for i in 0..27 {
        let mut v = start;
        v[i] += 0.1;
        simplex.push(eval(&v).unwrap_or(simplex[0]));
    }
    let worse = |a: &([f64; 27], f64), b: &([f64; 27], f64)| b.1.total_cmp(&a.1);
    for it in 0..max_iters {
        simplex.sort_by(worse);
        let (best, worst) = (simplex[0].1, simplex[27].1);
        if best - worst <= 1e-14 {
            return (simplex[0].0, it, true);
        }
        let centroid: [f64; 27] = std::array::from_fn(|i| simplex[..27].iter().map(|v| v.0[i]).sum::<f64>() / 27.0);
        let along = |c: f64| -> [f64; 27] { std::array::from_fn(|i| centroid[i] + c * (simplex[27].0[i] - centroid[i])) };
        let reflected = eval(&along(-1.0));
        match reflected {
            Some(rf) if rf.1 > best => {
                let expanded = eval(&along(-2.0));
                simplex[27] = match expanded {
                    Some(ex) if ex.1 > rf.1 => ex,
                    _ => rf,
                };
            }
            Some(rf) if rf.1 > simplex[26].1 => simplex[27] = rf,
            _ => {
                let contracted = eval(&along(0.5));
                match contracted {
                    Some(c) if c.1 > worst => simplex[27] = c,
                    _ => {
                        let head = simplex[0].0;
                        for v in simplex.iter_mut().skip(1) {
                            let shrunk: [f64; 27] = std::array::from_fn(|i| head[i] + 0.5 * (v.0[i] - head[i]));
                            if let Some(s) = eval(&shrunk) {
                                *v = s;
                            }
                        }
                    }
                }
            }
        }
    }
    simplex.sort_by(worse);
    (simplex[0].0, max_iters, false)
}

/// Simulated annealing on the OPT objective; for OPT-ineq the best point
/// is repaired onto the feasible set afterwards, as in [`projected_gradient`].
fn annealing(problem: Problem, start: [f64; 27], max_iters: usize, r: &mut SeededRng) -> ([f64; 27], usize, bool) {
    let mut x = start;
    let mut fx = objective_unchecked(&x, Problem::Opt);
    let (mut best, mut fbest) = (x, fx);
    let iters = max_iters.max(1);
    for it in 0..iters {
        let frac = it as f64 / iters as f64;
        let temp = 1e-2 * (1e-8f64).powf(frac);
        let width = 0.2 * (1e-5f64).powf(frac);
        let i = r.random_range(0..27);
        let j = (i + r.random_range(1..27)) % 27;
        let delta = x[i].min(width * r.random::<f64>());
        if delta <= 0.0 {
            continue;
        }
        let mut y = x;
        y[i] -= delta;
        y[j] += delta;
        let fy = objective_unchecked(&y, Problem::Opt);
        if fy >= fx || r.random::<f64>() < ((fy - fx) / temp).exp() {
            x = y;
            fx = fy;
            if fx > fbest {
                best = x;
                fbest = fx;
            }
        }
    }
    if problem == Problem::OptIneq {
        match repair_ineq(&OptPoint::from_raw(best), 64) {
            Ok(Some(p)) => best = *p.values(),
            _ => return (start, iters, false),
        }
    }
    (best, iters, true)
}

/// Weak compositions of `total` into 27 parts, in the order of the
/// Nijenhuis–Wilf successor rule.
pub fn simplex_grid(total: u32) -> impl Iterator<Item = [u32; 27]> {
    let mut state: Option<([u32; 27], u32, usize)> = None;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let (r, t, h) = match state.take() {
            None => {
                let mut r = [0; 27];
                r[0] = total;
                (r, total, 0)
            }
            Some((mut r, mut t, mut h)) => {
                if t > 1 {
                    h = 0;
                }
                h += 1;
                t = r[h - 1];
                r[h - 1] = 0;
                r[0] = t - 1;
                r[h] += 1;
                (r, t, h)
            }
        };
        if r[26] == total {
            done = true;
        }
        state = Some((r, t, h));
        Some(r)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridMax {
    pub problem: Problem,
    pub denominator: u32,
    pub points: u64,
    /// Grid points feasible for the problem.
    pub feasible: u64,
    pub best_value: f64,
    pub best_point: OptPoint,
    /// Feasible grid points above `4/27 + tolerance`.
    pub above_optimum: u64,
}

/// Exhaustive evaluation over all points of the simplex with coordinates
/// in `(1/d)ℤ`.
pub fn grid_max(problem: Problem, denominator: u32, tolerance: f64) -> Result<GridMax> {
    if denominator == 0 {
        return Err(Error::invalid("grid denominator must be positive"));
    }
    let d = denominator as f64;
    let mut out = GridMax {
        problem,
        denominator,
        points: 0,
        feasible: 0,
        best_value: f64::NEG_INFINITY,
        best_point: OptPoint::from_raw([0.0; 27]),
        above_optimum: 0,
    };
    for c in simplex_grid(denominator) {
        out.points += 1;
        let x = c.map(|v| v as f64 / d);
        let p = OptPoint::from_raw(x);
        if problem == Problem::OptIneq && ineq_violation(&p, IDENTITY_TOLERANCE).is_some() {
            continue;
        }
        out.feasible += 1;
        let v = objective_unchecked(&x, problem);
        if v > FOUR_27 + tolerance {
            out.above_optimum += 1;
        }
        if v > out.best_value {
            out.best_value = v;
            out.best_point = p;
        }
    }
    Ok(out)
}
