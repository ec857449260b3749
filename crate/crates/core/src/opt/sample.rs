//! Random points for optimizer starts and property sweeps.

use rand::seq::index;
use rand::Rng;
use rand_distr::Exp1;

use super::{repair_ineq, OptPoint, StrangeArgs};

/// Uniform point of the simplex (symmetric Dirichlet(1)).
pub fn dirichlet_point<R: Rng>(rng: &mut R) -> OptPoint {
    let mut x = [0.0; 27];
    for v in x.iter_mut() {
        *v = rng.sample::<f64, _>(Exp1);
    }
    normalized(x)
}

/// Dirichlet(1) on a uniformly chosen support of `1..=max_support` types.
/// Optima sit on sparse faces, which uniform draws almost never reach.
pub fn sparse_dirichlet_point<R: Rng>(rng: &mut R, max_support: usize) -> OptPoint {
    let k = rng.random_range(1..=max_support.clamp(1, 27));
    let mut x = [0.0; 27];
    for i in index::sample(rng, 27, k) {
        x[i] = rng.sample::<f64, _>(Exp1);
    }
    normalized(x)
}

fn normalized(mut x: [f64; 27]) -> OptPoint {
    let sum: f64 = x.iter().sum();
    if sum <= 0.0 {
        x = [0.0; 27];
        x[26] = 1.0;
    } else {
        x.iter_mut().for_each(|v| *v /= sum);
    }
    OptPoint::from_raw(x)
}

const REPAIR_ROUNDS: usize = 64;
const MAX_DRAWS: usize = 1000;

/// A point satisfying `R ≤ T` and `S ≤ T`: a draw from `draw` repaired by
/// the minimum-removing rescaling, redrawn if repair does not settle.
pub fn random_ineq_point<R: Rng>(rng: &mut R, mut draw: impl FnMut(&mut R) -> OptPoint) -> OptPoint {
    for _ in 0..MAX_DRAWS {
        let p = draw(rng);
        if let Ok(Some(q)) = repair_ineq(&p, REPAIR_ROUNDS) {
            return q;
        }
    }
    // all-X is always feasible
    OptPoint::from_entries([("XXX", 1.0)]).expect("valid point")
}

/// A point satisfying `R ≤ T`, `S ≤ T` and `x ≤ min(a, b)`. The rescaling
/// keeps `a`, `b`, `x`, so draws violating the last condition are rejected
/// before repair.
pub fn random_chain_point<R: Rng>(rng: &mut R, mut draw: impl FnMut(&mut R) -> OptPoint) -> OptPoint {
    loop {
        let p = random_ineq_point(rng, &mut draw);
        let (a, b, x) = p.marginals();
        if x <= a.min(b) {
            return p;
        }
    }
}

/// Arguments satisfying the preconditions of the six-term inequality, with
/// the sums `a1 + a2 = a` etc. tight half of the time.
pub fn sample_strange_args<R: Rng>(rng: &mut R) -> StrangeArgs {
    let a: f64 = rng.random();
    let b: f64 = rng.random();
    let x = a.min(b) * if rng.random_bool(0.25) { 1.0 } else { rng.random::<f64>() };
    let mut split = |total: f64| {
        let first = total * rng.random::<f64>();
        let rest = total - first;
        let second = if rng.random_bool(0.5) { rest } else { rest * rng.random::<f64>() };
        (first, second)
    };
    let (a1, a2) = split(a);
    let (b1, b2) = split(b);
    let (x1, x2) = split(x);
    StrangeArgs {
        a1,
        a2,
        b1,
        b2,
        x1,
        x2,
        a,
        b,
        x,
    }
}
