//! Removing the minima of OPT by shifting mass to `X` coordinates.

use serde::Serialize;

use super::{ineq_violation, require_normalized, OptPoint, Symbol, TypeTriple, IDENTITY_TOLERANCE};
use crate::error::Result;

/// Which minimum of the OPT objective to eliminate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Minimum {
    /// `min(T, R)`: scale types `κAκ_B` and move the rest to `κXκ_B`.
    First,
    /// `min(T, S)`: scale types `κκ_AA` and move the rest to `κκ_AX`.
    Second,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rescale {
    pub point: OptPoint,
    /// Scaling factor; 1 when the map is the identity.
    pub xi: f64,
    pub weighted_before: f64,
    pub weighted_after: f64,
}

/// Total mass on `X` symbols, counted once per coordinate.
pub fn weighted_xs(p: &OptPoint) -> f64 {
    TypeTriple::all()
        .map(|t| {
            let count = [t.0, t.1, t.2].iter().filter(|&&s| s == Symbol::X).count();
            count as f64 * p.get(t)
        })
        .sum()
}

/// Applies the rescaling for one minimum.
///
/// For [`Minimum::First`] with `R > T`, sets `ξ = T/R`, replaces every
/// `x_{κAκ_B}` by `ξ·x_{κAκ_B}` and adds `(1−ξ)·x_{κAκ_B}` to `x_{κXκ_B}`.
/// Afterwards `R` equals the old `T`, `T` does not decrease and the first
/// coordinate marginals are unchanged. When `R ≤ T` the map is the identity.
/// [`Minimum::Second`] does the same on the third coordinate with `S`.
pub fn nomin_rescale(p: &OptPoint, which: Minimum) -> Result<Rescale> {
    require_normalized(p)?;
    let (t, r, s) = p.forms();
    let other = match which {
        Minimum::First => r,
        Minimum::Second => s,
    };
    let before = weighted_xs(p);
    if other <= t {
        return Ok(Rescale {
            point: p.clone(),
            xi: 1.0,
            weighted_before: before,
            weighted_after: before,
        });
    }
    let xi = t / other;
    let mut x = *p.values();
    for ty in TypeTriple::all() {
        let (from, to) = match which {
            Minimum::First if ty.1 == Symbol::A => (ty, TypeTriple(ty.0, Symbol::X, ty.2)),
            Minimum::Second if ty.2 == Symbol::A => (ty, TypeTriple(ty.0, ty.1, Symbol::X)),
            _ => continue,
        };
        let v = x[from.index()];
        x[from.index()] = xi * v;
        x[to.index()] += (1.0 - xi) * v;
    }
    let point = OptPoint::from_raw(x);
    let after = weighted_xs(&point);
    Ok(Rescale {
        point,
        xi,
        weighted_before: before,
        weighted_after: after,
    })
}

/// Alternates both rescalings until the point satisfies `R ≤ T` and `S ≤ T`
/// (within 10⁻¹²), giving up after `max_rounds`.
pub fn repair_ineq(p: &OptPoint, max_rounds: usize) -> Result<Option<OptPoint>> {
    let mut cur = p.clone();
    for _ in 0..max_rounds {
        if ineq_violation(&cur, IDENTITY_TOLERANCE).is_none() {
            return Ok(Some(cur));
        }
        cur = nomin_rescale(&cur, Minimum::First)?.point;
        cur = nomin_rescale(&cur, Minimum::Second)?.point;
    }
    Ok(ineq_violation(&cur, IDENTITY_TOLERANCE).is_none().then_some(cur))
}
