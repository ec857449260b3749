//! The inequalities bounding OPT-ineq by 4/27.

use serde::Serialize;

use super::{ineq_violation, require_normalized, DerivedQuantities, OptPoint, FOUR_27, IDENTITY_TOLERANCE};
use crate::error::{Error, Result};

/// Slack allowed in every inequality of the chain.
pub const CHAIN_TOLERANCE: f64 = 1e-10;

/// Arguments of the six-term inequality
/// `a1·b2 + a1·x2 + b1·a2 + b1·x2 + x1·a2 + x1·b2 ≤ ab + x·max(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StrangeArgs {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub x1: f64,
    pub x2: f64,
    pub a: f64,
    pub b: f64,
    pub x: f64,
}

impl StrangeArgs {
    pub fn lhs(&self) -> f64 {
        let s = self;
        s.a1 * s.b2 + s.a1 * s.x2 + s.b1 * s.a2 + s.b1 * s.x2 + s.x1 * s.a2 + s.x1 * s.b2
    }

    pub fn rhs(&self) -> f64 {
        self.a * self.b + self.x * self.a.max(self.b)
    }
}

/// Whether the six-term inequality holds (with slack 10⁻¹²).
///
/// Requires nonnegative arguments with `x1 + x2 ≤ x`, `a1 + a2 ≤ a`,
/// `b1 + b2 ≤ b` and `x ≤ min(a, b)`, each up to 10⁻¹².
pub fn strange_inequality_holds(args: &StrangeArgs) -> Result<bool> {
    let s = args;
    let all = [s.a1, s.a2, s.b1, s.b2, s.x1, s.x2, s.a, s.b, s.x];
    if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::invalid("arguments must be nonnegative reals"));
    }
    let tol = IDENTITY_TOLERANCE;
    if s.x1 + s.x2 > s.x + tol {
        return Err(Error::invalid(format!("x1 + x2 = {} exceeds x = {}", s.x1 + s.x2, s.x)));
    }
    if s.a1 + s.a2 > s.a + tol {
        return Err(Error::invalid(format!("a1 + a2 = {} exceeds a = {}", s.a1 + s.a2, s.a)));
    }
    if s.b1 + s.b2 > s.b + tol {
        return Err(Error::invalid(format!("b1 + b2 = {} exceeds b = {}", s.b1 + s.b2, s.b)));
    }
    if s.x > s.a.min(s.b) + tol {
        return Err(Error::invalid(format!("x = {} exceeds min(a, b) = {}", s.x, s.a.min(s.b))));
    }
    Ok(s.lhs() <= s.rhs() + tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The case split that the inequality relies on does not apply.
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub status: CheckStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub quantities: DerivedQuantities,
    pub checks: Vec<ChainCheck>,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ChainCheck> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

/// `a²b + 2abx + (a+b)x²/4`.
pub fn goal_expression(a: f64, b: f64, x: f64) -> f64 {
    a * a * b + 2.0 * a * b * x + (a + b) * x * x / 4.0
}

/// Evaluates every inequality of the bound `xT + aR + bS ≤ 4/27` at `p`.
///
/// Unconditional checks: `T ≤ ab`, `R − R' ≤ x²/4`, `S − S' ≤ x²/4` and
/// `R' + S' ≤ a1·b2 + a1·x2 + b1·a2 + b1·x2 + x1·a2 + x1·b2`. When
/// `x ≤ min(a, b)`: `R' + S' ≤ ab + x·max(a, b)`, the combined bound
/// `xT + aR + bS ≤ 2abx + max(a,b)·ab + (a+b)x²/4` and the scalar bound on
/// its right side. Otherwise only `xT + aR + bS ≤ ab` and `ab ≤ 1/8` are checked and
/// the others are reported as skipped.
pub fn proof_chain_check(p: &OptPoint) -> Result<ChainReport> {
    require_normalized(p)?;
    if let Some(msg) = ineq_violation(p, IDENTITY_TOLERANCE) {
        return Err(Error::Infeasible(msg));
    }
    let q = p.derived();
    let (a, b, x) = (q.a, q.b, q.x);
    let value = x * q.t + a * q.r + b * q.s;
    let small_x = x <= a.min(b);
    let mut checks = Vec::new();
    let mut check = |name, lhs: f64, rhs: f64, applies: bool| {
        let status = if !applies {
            CheckStatus::Skipped
        } else if lhs <= rhs + CHAIN_TOLERANCE {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        checks.push(ChainCheck { name, lhs, rhs, status });
    };
    check("T <= ab", q.t, a * b, true);
    check("R - R' <= x^2/4", q.r - q.r_prime, x * x / 4.0, true);
    check("S - S' <= x^2/4", q.s - q.s_prime, x * x / 4.0, true);
    let six = StrangeArgs {
        a1: q.a1,
        a2: q.a2,
        b1: q.b1,
        b2: q.b2,
        x1: q.x1,
        x2: q.x2,
        a,
        b,
        x,
    };
    check("R' + S' <= six-term sum", q.r_prime + q.s_prime, six.lhs(), true);
    check("x >= min(a,b): xT + aR + bS <= ab", value, a * b, !small_x);
    check("x >= min(a,b): ab <= 1/8", a * b, 0.125, !small_x);
    check("R' + S' <= ab + x max(a,b)", q.r_prime + q.s_prime, six.rhs(), small_x);
    let trs = 2.0 * a * b * x + a.max(b) * a * b + (a + b) * x * x / 4.0;
    check("xT + aR + bS <= 2abx + max(a,b)ab + (a+b)x^2/4", value, trs, small_x);
    check("scalar bound <= 4/27", goal_expression(a.max(b), a.min(b), x), FOUR_27, small_x);
    Ok(ChainReport { quantities: q, checks })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GoalGridMax {
    pub value: f64,
    pub a: f64,
    pub b: f64,
    pub x: f64,
    pub points: u64,
}

/// Maximum of `a²b + 2abx + (a+b)x²/4` over the grid of step `step` on
/// `{a + b + x = 1, 0 ≤ x ≤ b ≤ a}`.
pub fn goal_grid_max(step: f64) -> Result<GoalGridMax> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::invalid(format!("grid step {step} outside (0, 1]")));
    }
    let n = (1.0 / step).round() as u64;
    if ((n as f64) * step - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("grid step {step} must divide 1")));
    }
    let mut best = GoalGridMax {
        value: f64::NEG_INFINITY,
        a: 0.0,
        b: 0.0,
        x: 0.0,
        points: 0,
    };
    for i in 0..=n {
        for j in i..=n {
            // x = i/n ≤ b = j/n ≤ a = 1 − x − b
            if i + 2 * j > n {
                break;
            }
            let (x, b) = (i as f64 / n as f64, j as f64 / n as f64);
            let a = (n - i - j) as f64 / n as f64;
            best.points += 1;
            let v = goal_expression(a, b, x);
            if v > best.value {
                best = GoalGridMax { value: v, a, b, x, points: best.points };
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(v: [f64; 9]) -> StrangeArgs {
        StrangeArgs {
            a1: v[0],
            a2: v[1],
            b1: v[2],
            b2: v[3],
            x1: v[4],
            x2: v[5],
            a: v[6],
            b: v[7],
            x: v[8],
        }
    }

    #[test]
    fn strange_examples() {
        assert!(strange_inequality_holds(&args([0.0; 9])).unwrap());
        let eq = args([1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(eq.lhs(), 2.0);
        assert_eq!(eq.rhs(), 2.0);
        assert!(strange_inequality_holds(&eq).unwrap());
        let half = args([0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 1.0, 1.0, 1.0]);
        assert_eq!(half.lhs(), 1.5);
        assert!(strange_inequality_holds(&half).unwrap());
    }

    #[test]
    fn strange_preconditions() {
        assert!(strange_inequality_holds(&args([0.6, 0.6, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0])).is_err());
        assert!(strange_inequality_holds(&args([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.5, 0.6])).is_err());
        assert!(strange_inequality_holds(&args([-0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0])).is_err());
    }

    #[test]
    fn witness_chain_passes() {
        let r = proof_chain_check(&OptPoint::witness()).unwrap();
        assert!(r.passed(), "{r:?}");
        // the witness has x = 0, so the small-x branch applies
        assert_eq!(r.checks.iter().filter(|c| c.status == CheckStatus::Skipped).count(), 2);
    }

    #[test]
    fn large_x_branch() {
        let p = OptPoint::from_entries([("XXX", 0.5), ("AAX", 0.3), ("BBX", 0.2)]).unwrap();
        let r = proof_chain_check(&p).unwrap();
        assert!(r.passed());
        assert_eq!(r.checks.iter().filter(|c| c.status == CheckStatus::Skipped).count(), 3);
    }

    #[test]
    fn goal_at_the_optimum() {
        // a = 2/3, b = 1/3, x = 0 attains 4/27
        assert!((goal_expression(2.0 / 3.0, 1.0 / 3.0, 0.0) - FOUR_27).abs() < 1e-16);
        let g = goal_grid_max(0.01).unwrap();
        assert!(g.value <= FOUR_27 + 1e-12);
        assert!(g.value > FOUR_27 - 1e-3);
        assert!(goal_grid_max(0.3).is_err());
        assert!(goal_grid_max(0.0).is_err());
    }
}
