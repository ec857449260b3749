//! Seeded property sweeps over random feasible points.

use rayon::prelude::*;
use serde::Serialize;

use super::{
    dirichlet_point, proof_chain_check, random_chain_point, sample_strange_args, sparse_dirichlet_point,
    strange_inequality_holds, CheckStatus, OptPoint, StrangeArgs,
};
use crate::error::Result;
use crate::rng;

/// Outcome counts for one inequality of the chain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckTally {
    pub name: &'static str,
    pub pass: u64,
    pub fail: u64,
    pub skipped: u64,
    /// Largest `lhs − rhs` among evaluated samples.
    pub max_excess: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainFailure {
    pub sample: u64,
    pub point: OptPoint,
    pub checks: Vec<&'static str>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainSweep {
    pub samples: u64,
    pub seed: u64,
    pub failures: u64,
    pub tallies: Vec<CheckTally>,
    /// Failing sample with the smallest index.
    pub first_failure: Option<ChainFailure>,
}

impl ChainSweep {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn merge(mut self, other: ChainSweep) -> ChainSweep {
        if self.tallies.is_empty() {
            return ChainSweep {
                samples: self.samples + other.samples,
                failures: self.failures + other.failures,
                ..other
            };
        }
        self.samples += other.samples;
        self.failures += other.failures;
        for (a, b) in self.tallies.iter_mut().zip(other.tallies) {
            a.pass += b.pass;
            a.fail += b.fail;
            a.skipped += b.skipped;
            a.max_excess = a.max_excess.max(b.max_excess);
        }
        self.first_failure = match (self.first_failure, other.first_failure) {
            (Some(a), Some(b)) => Some(if a.sample <= b.sample { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }
}

/// Sample `i` is drawn from `derive_seed(seed, i)`: even samples start from a
/// uniform simplex point, odd ones from a point with at most six nonzero
/// types. Both are repaired to `R ≤ T`, `S ≤ T` and filtered to
/// `x ≤ min(a, b)`.
pub fn chain_sample(seed: u64, i: u64) -> OptPoint {
    let mut r = rng::seeded(rng::derive_seed(seed, i));
    if i % 2 == 0 {
        random_chain_point(&mut r, dirichlet_point)
    } else {
        random_chain_point(&mut r, |r| sparse_dirichlet_point(r, 6))
    }
}

/// Runs [`proof_chain_check`] on `samples` seeded feasible points. The
/// result does not depend on the number of threads.
pub fn sweep_chain(samples: u64, seed: u64) -> Result<ChainSweep> {
    let empty = ChainSweep {
        samples: 0,
        seed,
        failures: 0,
        tallies: Vec::new(),
        first_failure: None,
    };
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let p = chain_sample(seed, i);
            let report = proof_chain_check(&p)?;
            let tallies = report
                .checks
                .iter()
                .map(|c| CheckTally {
                    name: c.name,
                    pass: (c.status == CheckStatus::Pass) as u64,
                    fail: (c.status == CheckStatus::Fail) as u64,
                    skipped: (c.status == CheckStatus::Skipped) as u64,
                    max_excess: if c.status == CheckStatus::Skipped {
                        f64::NEG_INFINITY
                    } else {
                        c.lhs - c.rhs
                    },
                })
                .collect();
            let failed: Vec<_> = report.failures().map(|c| c.name).collect();
            Ok(ChainSweep {
                samples: 1,
                seed,
                failures: (!failed.is_empty()) as u64,
                tallies,
                first_failure: (!failed.is_empty()).then(|| ChainFailure {
                    sample: i,
                    point: p,
                    checks: failed,
                }),
            })
        })
        .try_reduce(|| empty.clone(), |a, b| Ok(a.merge(b)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrangeSweep {
    pub samples: u64,
    pub seed: u64,
    pub failures: u64,
    /// Largest `lhs − rhs` seen.
    pub max_excess: f64,
    pub first_failure: Option<(u64, StrangeArgs)>,
}

impl StrangeSweep {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Checks the six-term inequality on `samples` seeded argument draws.
pub fn sweep_strange(samples: u64, seed: u64) -> Result<StrangeSweep> {
    let empty = StrangeSweep {
        samples: 0,
        seed,
        failures: 0,
        max_excess: f64::NEG_INFINITY,
        first_failure: None,
    };
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::seeded(rng::derive_seed(seed, i));
            let args = sample_strange_args(&mut r);
            let ok = strange_inequality_holds(&args)?;
            Ok(StrangeSweep {
                samples: 1,
                seed,
                failures: (!ok) as u64,
                max_excess: args.lhs() - args.rhs(),
                first_failure: (!ok).then_some((i, args)),
            })
        })
        .try_reduce(
            || empty.clone(),
            |a, b| {
                Ok(StrangeSweep {
                    samples: a.samples + b.samples,
                    seed,
                    failures: a.failures + b.failures,
                    max_excess: a.max_excess.max(b.max_excess),
                    first_failure: match (a.first_failure, b.first_failure) {
                        (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
                        (x, y) => x.or(y),
                    },
                })
            },
        )
}
