//! The 27-variable optimization problem over vertex types.
//!
//! Types are triples `κ κ_A κ_B` over the alphabet `{A, B, X}`. The relation
//! `→` says which left/right type pairs may share an edge; the quadratic
//! forms `T`, `R`, `S` sum `x_s x_t` over related pairs whose first, second
//! or third coordinates are `(A, B)`. Problem OPT maximizes
//! `x·T + a·min(T,R) + b·min(T,S)` over the simplex (`a`, `b`, `x` being the
//! masses with first coordinate `A`, `B`, `X`); OPT-ineq maximizes
//! `x·T + a·R + b·S` subject additionally to `R ≤ T` and `S ≤ T`. Both
//! optima equal 4/27.

mod chain;
mod maximize;
mod rescale;
mod sample;
mod sweep;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;
use std::sync::OnceLock;

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use chain::{
    goal_expression, goal_grid_max, proof_chain_check, strange_inequality_holds, ChainCheck, ChainReport,
    CheckStatus, GoalGridMax, StrangeArgs, CHAIN_TOLERANCE,
};
pub use maximize::{
    grid_max, maximize, simplex_grid, Anomaly, GridMax, MaximizeConfig, MaximizeReport, Method, StartTrace,
};
pub use rescale::{nomin_rescale, repair_ineq, weighted_xs, Minimum, Rescale};
pub use sample::{dirichlet_point, random_chain_point, random_ineq_point, sample_strange_args, sparse_dirichlet_point};
pub use sweep::{chain_sample, sweep_chain, sweep_strange, ChainFailure, ChainSweep, CheckTally, StrangeSweep};

/// Exact value of both optima.
pub fn four_27() -> Rational {
    Rational::new(4, 27)
}

pub const FOUR_27: f64 = 4.0 / 27.0;

/// Tolerance for identities such as the simplex sum.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

pub type Rational = Ratio<i128>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Symbol {
    A,
    B,
    X,
}

impl Symbol {
    pub const ALL: [Symbol; 3] = [Symbol::A, Symbol::B, Symbol::X];

    fn index(self) -> usize {
        self as usize
    }

    fn from_char(c: char) -> Option<Symbol> {
        match c {
            'A' => Some(Symbol::A),
            'B' => Some(Symbol::B),
            'X' => Some(Symbol::X),
            _ => None,
        }
    }
}

/// Whether `(κ, λ)` is one of the six coordinate pairs allowed in an edge.
pub fn allowed_pair(k: Symbol, l: Symbol) -> bool {
    use Symbol::*;
    matches!((k, l), (A, B) | (A, X) | (B, X) | (X, A) | (X, B) | (X, X))
}

/// A type `κ κ_A κ_B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeTriple(pub Symbol, pub Symbol, pub Symbol);

impl TypeTriple {
    /// All 27 types in the order `AAA, AAB, AAX, ABA, …, XXX`.
    pub fn all() -> impl Iterator<Item = TypeTriple> {
        (0..27).map(TypeTriple::from_index)
    }

    pub fn from_index(i: usize) -> TypeTriple {
        assert!(i < 27, "type index {i} out of range");
        let s = Symbol::ALL;
        TypeTriple(s[i / 9], s[(i / 3) % 3], s[i % 3])
    }

    pub fn index(self) -> usize {
        9 * self.0.index() + 3 * self.1.index() + self.2.index()
    }
}

impl fmt::Display for TypeTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{:?}{:?}", self.0, self.1, self.2)
    }
}

impl FromStr for TypeTriple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let syms: Vec<Symbol> = s.chars().map(Symbol::from_char).collect::<Option<_>>().unwrap_or_default();
        match syms.as_slice() {
            &[k, ka, kb] => Ok(TypeTriple(k, ka, kb)),
            _ => Err(Error::invalid(format!("\"{s}\" is not a type over {{A,B,X}}^3"))),
        }
    }
}

/// `κκ_Aκ_B → λλ_Aλ_B`.
pub fn arrow(s: TypeTriple, t: TypeTriple) -> bool {
    allowed_pair(s.0, t.0) && allowed_pair(s.1, t.1) && allowed_pair(s.2, t.2) && !(s.2 == Symbol::A && t.1 == Symbol::B)
}

/// All related ordered pairs, as type indices.
pub fn related_pairs() -> &'static [(usize, usize)] {
    &relation().all
}

struct Relation {
    all: Vec<(usize, usize)>,
    t: Vec<(usize, usize)>,
    r: Vec<(usize, usize)>,
    s: Vec<(usize, usize)>,
}

fn relation() -> &'static Relation {
    static REL: OnceLock<Relation> = OnceLock::new();
    REL.get_or_init(|| {
        let mut rel = Relation {
            all: Vec::new(),
            t: Vec::new(),
            r: Vec::new(),
            s: Vec::new(),
        };
        for s in TypeTriple::all() {
            for t in TypeTriple::all() {
                if !arrow(s, t) {
                    continue;
                }
                let p = (s.index(), t.index());
                rel.all.push(p);
                if (s.0, t.0) == (Symbol::A, Symbol::B) {
                    rel.t.push(p);
                }
                if (s.1, t.1) == (Symbol::A, Symbol::B) {
                    rel.r.push(p);
                }
                if (s.2, t.2) == (Symbol::A, Symbol::B) {
                    rel.s.push(p);
                }
            }
        }
        rel
    })
}

/// Related pairs summed by `T` (first coordinates `(A, B)`).
pub fn t_pairs() -> &'static [(usize, usize)] {
    &relation().t
}

/// Related pairs summed by `R` (second coordinates `(A, B)`).
pub fn r_pairs() -> &'static [(usize, usize)] {
    &relation().r
}

/// Related pairs summed by `S` (third coordinates `(A, B)`).
pub fn s_pairs() -> &'static [(usize, usize)] {
    &relation().s
}

fn pair_sum<V: Copy + Zero + Add<Output = V> + Mul<Output = V>>(x: &[V; 27], pairs: &[(usize, usize)]) -> V {
    pairs.iter().fold(V::zero(), |acc, &(i, j)| acc + x[i] * x[j])
}

/// `(T, R, S)` in any commutative arithmetic.
pub fn quadratic_forms<V: Copy + Zero + Add<Output = V> + Mul<Output = V>>(x: &[V; 27]) -> (V, V, V) {
    (pair_sum(x, t_pairs()), pair_sum(x, r_pairs()), pair_sum(x, s_pairs()))
}

/// Masses `(a, b, x)` of types with first coordinate `A`, `B`, `X`.
pub fn marginals<V: Copy + Zero + Add<Output = V>>(x: &[V; 27]) -> (V, V, V) {
    let sum = |r: std::ops::Range<usize>| x[r].iter().fold(V::zero(), |acc, &v| acc + v);
    (sum(0..9), sum(9..18), sum(18..27))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    Opt,
    OptIneq,
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "opt" => Ok(Problem::Opt),
            "opt-ineq" | "opt_ineq" | "ineq" => Ok(Problem::OptIneq),
            _ => Err(Error::invalid(format!("unknown problem \"{s}\" (expected opt or opt-ineq)"))),
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::Opt => "opt",
            Problem::OptIneq => "opt-ineq",
        })
    }
}

/// 27 nonnegative reals indexed by type.
///
/// Normalized points lie on the simplex (sum 1 within 10⁻¹²). Unnormalized
/// points only need a total mass bounded by `1 + 27ε`, as for degree
/// estimates that are close to, but not exactly, a distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint", into = "RawPoint")]
pub struct OptPoint {
    x: [f64; 27],
    normalized: bool,
}

#[derive(Serialize, Deserialize)]
struct RawPoint {
    x: BTreeMap<String, f64>,
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    normalized: bool,
}

fn default_true() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

impl TryFrom<RawPoint> for OptPoint {
    type Error = Error;

    fn try_from(raw: RawPoint) -> Result<Self> {
        let mut x = [0.0; 27];
        for (k, v) in raw.x {
            x[k.parse::<TypeTriple>()?.index()] = v;
        }
        if raw.normalized {
            OptPoint::new(x)
        } else {
            OptPoint::unnormalized(x, f64::INFINITY)
        }
    }
}

impl From<OptPoint> for RawPoint {
    fn from(p: OptPoint) -> Self {
        RawPoint {
            x: TypeTriple::all()
                .filter(|t| p.x[t.index()] != 0.0)
                .map(|t| (t.to_string(), p.x[t.index()]))
                .collect(),
            normalized: p.normalized,
        }
    }
}

fn check_nonnegative(x: &[f64; 27]) -> Result<()> {
    if let Some(i) = x.iter().position(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::invalid(format!(
            "x_{} = {} must be a nonnegative real",
            TypeTriple::from_index(i),
            x[i]
        )));
    }
    Ok(())
}

impl OptPoint {
    /// A point of the simplex.
    pub fn new(x: [f64; 27]) -> Result<Self> {
        check_nonnegative(&x)?;
        let sum: f64 = x.iter().sum();
        if (sum - 1.0).abs() > IDENTITY_TOLERANCE {
            return Err(Error::invalid(format!("values sum to {sum}, not 1")));
        }
        Ok(OptPoint { x, normalized: true })
    }

    /// Nonnegative values with sum at most `1 + 27ε`.
    pub fn unnormalized(x: [f64; 27], eps: f64) -> Result<Self> {
        check_nonnegative(&x)?;
        let sum: f64 = x.iter().sum();
        if sum > 1.0 + 27.0 * eps {
            return Err(Error::invalid(format!("values sum to {sum}, above 1 + 27ε")));
        }
        Ok(OptPoint { x, normalized: false })
    }

    /// Builds a point from `(type, value)` entries; unlisted types are zero.
    pub fn from_entries<'a>(entries: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self> {
        let mut x = [0.0; 27];
        for (k, v) in entries {
            x[k.parse::<TypeTriple>()?.index()] += v;
        }
        Self::new(x)
    }

    /// `x_AAX = 2/3`, `x_BBX = 1/3`.
    pub fn witness() -> Self {
        Self::from_entries([("AAX", 2.0 / 3.0), ("BBX", 1.0 / 3.0)]).expect("valid witness")
    }

    /// The witness in exact arithmetic.
    pub fn witness_exact() -> [Rational; 27] {
        let mut x = [Rational::zero(); 27];
        x["AAX".parse::<TypeTriple>().expect("type").index()] = Rational::new(2, 3);
        x["BBX".parse::<TypeTriple>().expect("type").index()] = Rational::new(1, 3);
        x
    }

    pub fn values(&self) -> &[f64; 27] {
        &self.x
    }

    pub fn get(&self, t: TypeTriple) -> f64 {
        self.x[t.index()]
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Rescales an unnormalized point onto the simplex.
    pub fn normalize(&self) -> Result<Self> {
        let sum: f64 = self.x.iter().sum();
        if sum <= 0.0 {
            return Err(Error::invalid("cannot normalize the zero point"));
        }
        Ok(OptPoint {
            x: self.x.map(|v| v / sum),
            normalized: true,
        })
    }

    pub(crate) fn from_raw(x: [f64; 27]) -> Self {
        OptPoint { x, normalized: true }
    }

    pub fn forms(&self) -> (f64, f64, f64) {
        quadratic_forms(&self.x)
    }

    pub fn marginals(&self) -> (f64, f64, f64) {
        marginals(&self.x)
    }

    /// All derived quantities used by the bounding argument.
    pub fn derived(&self) -> DerivedQuantities {
        DerivedQuantities::of(&self.x)
    }
}

/// Sum of `x[t]` over the named types.
fn group(x: &[f64; 27], names: &[&str]) -> f64 {
    names
        .iter()
        .map(|n| x[n.parse::<TypeTriple>().expect("type name").index()])
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DerivedQuantities {
    pub a: f64,
    pub b: f64,
    /// Mass of types with first coordinate `X`.
    #[serde(rename = "xX")]
    pub x: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "S")]
    pub s: f64,
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub x1: f64,
    pub x2: f64,
    /// `R` without the pairs whose first coordinates are both `X`.
    #[serde(rename = "R_prime")]
    pub r_prime: f64,
    /// `S` without the pairs whose first coordinates are both `X`.
    #[serde(rename = "S_prime")]
    pub s_prime: f64,
}

impl DerivedQuantities {
    pub fn of(x: &[f64; 27]) -> Self {
        let (a, b, xx) = marginals(x);
        let (t, r, s) = quadratic_forms(x);
        let both_x = |&&(i, j): &&(usize, usize)| i >= 18 && j >= 18;
        let r_xx: f64 = r_pairs().iter().filter(both_x).map(|&(i, j)| x[i] * x[j]).sum();
        let s_xx: f64 = s_pairs().iter().filter(both_x).map(|&(i, j)| x[i] * x[j]).sum();
        DerivedQuantities {
            a,
            b,
            x: xx,
            t,
            r,
            s,
            a1: group(x, &["AAA", "ABA", "ABB", "ABX", "AXA"]),
            a2: group(x, &["AAB", "AAX", "AXB"]),
            b1: group(x, &["BAA", "BBA", "BBB", "BBX", "BXA"]),
            b2: group(x, &["BAB", "BAX", "BXB"]),
            x1: group(x, &["XAA", "XBA", "XBB", "XBX", "XXA"]),
            x2: group(x, &["XAB", "XAX", "XXB"]),
            r_prime: r - r_xx,
            s_prime: s - s_xx,
        }
    }
}

fn require_normalized(p: &OptPoint) -> Result<()> {
    if !p.normalized {
        return Err(Error::invalid("objective needs a normalized point"));
    }
    Ok(())
}

/// Which constraint of OPT-ineq fails, if any.
pub fn ineq_violation(p: &OptPoint, tol: f64) -> Option<String> {
    let (t, r, s) = p.forms();
    if r > t + tol {
        Some(format!("R ≤ T violated (R = {r}, T = {t})"))
    } else if s > t + tol {
        Some(format!("S ≤ T violated (S = {s}, T = {t})"))
    } else {
        None
    }
}

/// Objective value. OPT-ineq on a point with `R > T` or `S > T` (beyond
/// 10⁻¹²) is a feasibility error.
pub fn objective(p: &OptPoint, problem: Problem) -> Result<f64> {
    require_normalized(p)?;
    if problem == Problem::OptIneq {
        if let Some(msg) = ineq_violation(p, IDENTITY_TOLERANCE) {
            return Err(Error::Infeasible(msg));
        }
    }
    Ok(objective_unchecked(&p.x, problem))
}

pub(crate) fn objective_unchecked(x: &[f64; 27], problem: Problem) -> f64 {
    let (a, b, xx) = marginals(x);
    let (t, r, s) = quadratic_forms(x);
    match problem {
        Problem::Opt => xx * t + a * t.min(r) + b * t.min(s),
        Problem::OptIneq => xx * t + a * r + b * s,
    }
}

/// Exact objective value.
pub fn objective_exact(x: &[Rational; 27], problem: Problem) -> Result<Rational> {
    if x.iter().any(|v| *v < Rational::zero()) {
        return Err(Error::invalid("values must be nonnegative"));
    }
    let sum = x.iter().fold(Rational::zero(), |acc, v| acc + v);
    if sum != Rational::new(1, 1) {
        return Err(Error::invalid(format!("values sum to {sum}, not 1")));
    }
    let (a, b, xx) = marginals(x);
    let (t, r, s) = quadratic_forms(x);
    match problem {
        Problem::Opt => Ok(xx * t + a * t.min(r) + b * t.min(s)),
        Problem::OptIneq => {
            if r > t || s > t {
                return Err(Error::Infeasible(format!("R = {r}, S = {s} must not exceed T = {t}")));
            }
            Ok(xx * t + a * r + b * s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tt(s: &str) -> TypeTriple {
        s.parse().unwrap()
    }

    #[test]
    fn type_indexing() {
        for (i, t) in TypeTriple::all().enumerate() {
            assert_eq!(t.index(), i);
            assert_eq!(t.to_string().parse::<TypeTriple>().unwrap(), t);
        }
        assert_eq!(tt("AAA").index(), 0);
        assert_eq!(tt("XXX").index(), 26);
        assert!("AAY".parse::<TypeTriple>().is_err());
        assert!("AA".parse::<TypeTriple>().is_err());
    }

    #[test]
    fn arrow_examples() {
        assert!(arrow(tt("AAX"), tt("BBX")));
        assert!(!arrow(tt("AAA"), tt("BBB")));
        assert!(!arrow(tt("AAA"), tt("AAA")));
        assert!(arrow(tt("XXX"), tt("XXX")));
    }

    #[test]
    fn relation_counts() {
        assert_eq!(related_pairs().len(), 192);
        assert_eq!(t_pairs().len(), 32);
        assert_eq!(r_pairs().len(), 24);
        assert_eq!(s_pairs().len(), 24);
    }

    #[test]
    fn witness_forms() {
        let w = OptPoint::witness_exact();
        let (t, r, s) = quadratic_forms(&w);
        assert_eq!(t, Rational::new(2, 9));
        assert_eq!(r, Rational::new(2, 9));
        assert_eq!(s, Rational::zero());
        assert_eq!(objective_exact(&w, Problem::Opt).unwrap(), four_27());
        assert_eq!(objective_exact(&w, Problem::OptIneq).unwrap(), four_27());
        let p = OptPoint::witness();
        assert!((objective(&p, Problem::Opt).unwrap() - FOUR_27).abs() < 1e-15);
        assert!((objective(&p, Problem::OptIneq).unwrap() - FOUR_27).abs() < 1e-15);
    }

    #[test]
    fn all_x_mass() {
        let p = OptPoint::from_entries([("XXX", 1.0)]).unwrap();
        assert_eq!(p.forms(), (0.0, 0.0, 0.0));
        assert_eq!(objective(&p, Problem::Opt).unwrap(), 0.0);
        assert_eq!(objective(&p, Problem::OptIneq).unwrap(), 0.0);
    }

    #[test]
    fn infeasible_ineq_point() {
        // all mass on types with second coordinate A or B but first coordinate X
        let p = OptPoint::from_entries([("XAX", 0.5), ("XBX", 0.5)]).unwrap();
        let (t, r, _) = p.forms();
        assert_eq!(t, 0.0);
        assert!(r > 0.0);
        match objective(&p, Problem::OptIneq) {
            Err(Error::Infeasible(msg)) => assert!(msg.contains("R ≤ T")),
            other => panic!("expected infeasible, got {other:?}"),
        }
        assert_eq!(objective(&p, Problem::Opt).unwrap(), 0.0);
    }

    #[test]
    fn point_validation() {
        let mut x = [0.0; 27];
        x[0] = 0.5;
        assert!(OptPoint::new(x).is_err());
        assert!(OptPoint::unnormalized(x, 0.0).is_ok());
        x[0] = 1.0 + 1e-3;
        assert!(OptPoint::unnormalized(x, 1e-5).is_err());
        assert!(OptPoint::unnormalized(x, 1e-4).is_ok());
        x[1] = -0.1;
        assert!(OptPoint::unnormalized(x, 1.0).is_err());
        let u = OptPoint::unnormalized([0.02; 27], 0.0).unwrap();
        assert!(objective(&u, Problem::Opt).is_err());
        assert!((u.normalize().unwrap().values().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn point_json() {
        let p = OptPoint::from_entries([("AAX", 0.25), ("BBX", 0.75)]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"x":{"AAX":0.25,"BBX":0.75}}"#);
        assert_eq!(serde_json::from_str::<OptPoint>(&s).unwrap(), p);
        let u: OptPoint = serde_json::from_str(r#"{"x":{"AAA":0.5},"normalized":false}"#).unwrap();
        assert!(!u.is_normalized());
        assert!(serde_json::from_str::<OptPoint>(r#"{"x":{"AAA":0.5}}"#).is_err());
    }

    #[test]
    fn canonical_groupings_partition_marginals() {
        let mut x = [0.0; 27];
        for (i, v) in x.iter_mut().enumerate() {
            *v = (i + 1) as f64 / 378.0;
        }
        let d = DerivedQuantities::of(&x);
        // each grouping misses exactly the type ending in XX
        assert!((d.a - d.a1 - d.a2 - x[tt("AXX").index()]).abs() < 1e-15);
        assert!((d.b - d.b1 - d.b2 - x[tt("BXX").index()]).abs() < 1e-15);
        assert!((d.x - d.x1 - d.x2 - x[tt("XXX").index()]).abs() < 1e-15);
    }
}
