//! Explicit tight-cycle embedding schedules and their symbolic verification.
//!
//! A schedule lists indices `a_1, …, a_ℓ` and vertices `v_t ∈ V_{a_t a_{t+1}}`.
//! It realizes a tight cycle when, for every cyclic `t`, some guaranteed fact
//! puts `v_t` and `v_{t+1}` in a common edge of the triad on
//! `{a_t, a_{t+1}, a_{t+2}}`. Indices are affine in `(m, n)` and every check
//! is done after evaluating them for concrete `m` and `n`.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Vertex families of the four structural cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Alpha,
    Beta,
    Gamma0,
    Gamma,
    Gamma1,
    Gamma2,
    Omega,
    AlphaOmega,
    BetaOmega,
    GammaOmega,
    AlphaStar,
    BetaStar,
    Alpha1,
    Beta1,
    Alpha2,
    Beta2,
    AlphaPrime,
    BetaPrime,
    GammaBullet,
    /// `α•_{ijkst} ∈ V_{ks}`.
    AlphaBullet,
    /// `β•_{ijkst} ∈ V_{jk}`.
    BetaBullet,
    AlphaSpecial,
    BetaSpecial,
}

impl Family {
    pub fn symbol(self) -> &'static str {
        use Family::*;
        match self {
            Alpha => "α",
            Beta => "β",
            Gamma0 => "γ⁰",
            Gamma => "γ",
            Gamma1 => "γ¹",
            Gamma2 => "γ²",
            Omega => "ω",
            AlphaOmega => "α^ω",
            BetaOmega => "β^ω",
            GammaOmega => "γ^ω",
            AlphaStar => "α*",
            BetaStar => "β*",
            Alpha1 => "α¹",
            Beta1 => "β¹",
            Alpha2 => "α²",
            Beta2 => "β²",
            AlphaPrime => "α'",
            BetaPrime => "β'",
            GammaBullet => "γ•",
            AlphaBullet => "α•",
            BetaBullet => "β•",
            AlphaSpecial => "α-special",
            BetaSpecial => "β-special",
        }
    }

    /// Number of subscripts.
    pub fn arity(self) -> usize {
        match self {
            Family::AlphaBullet | Family::BetaBullet => 5,
            _ => 2,
        }
    }

    /// Positions of the subscripts naming the part the vertex lies in.
    pub fn part_positions(self) -> (usize, usize) {
        match self {
            Family::AlphaBullet => (2, 3),
            Family::BetaBullet => (1, 2),
            _ => (0, 1),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Concrete values of the schedule parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Params {
    pub m: i64,
    pub n: i64,
}

/// `n = 3m`, the smallest multiple of `m` for which every schedule fits in `[4n]`.
pub fn default_n(m: i64) -> i64 {
    3 * m
}

/// `p·m + q·n + c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Affine {
    pub m: i64,
    pub n: i64,
    pub c: i64,
}

impl Affine {
    pub const fn new(m: i64, n: i64, c: i64) -> Self {
        Affine { m, n, c }
    }

    pub const fn constant(c: i64) -> Self {
        Affine { m: 0, n: 0, c }
    }

    /// `p·m + c`.
    pub const fn in_m(p: i64, c: i64) -> Self {
        Affine { m: p, n: 0, c }
    }

    /// `q·n + c`.
    pub const fn in_n(q: i64, c: i64) -> Self {
        Affine { m: 0, n: q, c }
    }

    pub fn eval(&self, p: Params) -> i64 {
        self.m * p.m + self.n * p.n + self.c
    }

    pub fn shifted(&self, by: i64) -> Self {
        Affine { c: self.c + by, ..*self }
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (coef, var) in [(self.m, "m"), (self.n, "n")] {
            if coef == 0 {
                continue;
            }
            if coef < 0 {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            if coef.abs() != 1 {
                out.push_str(&coef.abs().to_string());
            }
            out.push_str(var);
        }
        if self.c != 0 || out.is_empty() {
            if self.c > 0 && !out.is_empty() {
                out.push('+');
            }
            out.push_str(&self.c.to_string());
        }
        f.write_str(&out)
    }
}

impl Serialize for Affine {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn write_vertex(f: &mut fmt::Formatter<'_>, family: Family, subscript: &[impl fmt::Display]) -> fmt::Result {
    write!(f, "{family}_{{")?;
    for (i, s) in subscript.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{s}")?;
    }
    f.write_str("}")
}

/// A vertex whose subscripts are affine expressions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolicVertex {
    pub family: Family,
    pub subscript: Vec<Affine>,
}

impl SymbolicVertex {
    pub fn new(family: Family, subscript: Vec<Affine>) -> Result<Self> {
        if subscript.len() != family.arity() {
            return Err(Error::invalid(format!(
                "{family} takes {} subscripts, got {}",
                family.arity(),
                subscript.len()
            )));
        }
        Ok(SymbolicVertex { family, subscript })
    }

    fn pair(family: Family, i: Affine, j: Affine) -> Self {
        SymbolicVertex {
            family,
            subscript: vec![i, j],
        }
    }

    pub fn eval(&self, p: Params) -> Vertex {
        Vertex {
            family: self.family,
            subscript: self.subscript.iter().map(|a| a.eval(p)).collect(),
        }
    }
}

impl fmt::Display for SymbolicVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_vertex(f, self.family, &self.subscript)
    }
}

impl Serialize for SymbolicVertex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A vertex with concrete subscripts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub family: Family,
    pub subscript: Vec<i64>,
}

impl Vertex {
    /// The pair `(i, j)` of the part containing the vertex.
    pub fn part(&self) -> (i64, i64) {
        let (a, b) = self.family.part_positions();
        (self.subscript[a], self.subscript[b])
    }

    pub fn increasing(&self) -> bool {
        self.subscript.windows(2).all(|w| w[0] < w[1])
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_vertex(f, self.family, &self.subscript)
    }
}

/// One vertex of a universally quantified edge pattern; `vars` index into
/// the increasing tuple of quantified indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternVertex {
    pub family: Family,
    pub vars: Vec<usize>,
}

impl PatternVertex {
    fn part(&self) -> (usize, usize) {
        let (a, b) = self.family.part_positions();
        (self.vars[a], self.vars[b])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactKind {
    /// For all increasing `arity`-tuples of indices, the three vertices
    /// (left, right, top) form an edge of the triad on `triad`.
    EdgePattern {
        arity: usize,
        triad: [usize; 3],
        vertices: [PatternVertex; 3],
    },
    /// The two vertices lie in a common edge of the triad on `triad`.
    PairCoOccurrence {
        triad: [Affine; 3],
        pair: [SymbolicVertex; 2],
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuaranteedFact {
    pub label: String,
    pub kind: FactKind,
}

const VARS: [&str; 5] = ["i", "j", "k", "s", "t"];

impl GuaranteedFact {
    fn pattern(arity: usize, triad: [usize; 3], vertices: [(Family, &[usize]); 3]) -> Self {
        let vertices = vertices.map(|(family, vars)| PatternVertex {
            family,
            vars: vars.to_vec(),
        });
        let names = |vars: &[usize]| vars.iter().map(|&v| VARS[v]).collect::<String>();
        let body = vertices
            .iter()
            .map(|v| format!("{}_{}", v.family, names(&v.vars)))
            .collect::<Vec<_>>()
            .join(", ");
        let label = if arity == 3 {
            format!("{{{body}}}")
        } else {
            format!("{{{body}}} in ({})", triad.map(|v| VARS[v]).join(","))
        };
        GuaranteedFact {
            label,
            kind: FactKind::EdgePattern { arity, triad, vertices },
        }
    }

    fn pair(label: String, triad: [Affine; 3], pair: [SymbolicVertex; 2]) -> Self {
        GuaranteedFact {
            label,
            kind: FactKind::PairCoOccurrence { triad, pair },
        }
    }

    /// Whether each pattern vertex sits in the part its triad role demands.
    pub fn roles_consistent(&self) -> bool {
        match &self.kind {
            FactKind::EdgePattern { triad, vertices, arity } => {
                let [p, q, r] = *triad;
                let ok_vars = vertices
                    .iter()
                    .all(|v| v.vars.len() == v.family.arity() && v.vars.iter().all(|&x| x < *arity));
                ok_vars && vertices[0].part() == (p, q) && vertices[1].part() == (q, r) && vertices[2].part() == (p, r)
            }
            FactKind::PairCoOccurrence { triad, pair } => {
                let [p, q, r] = *triad;
                pair.iter().all(|v| {
                    let (a, b) = v.family.part_positions();
                    let part = (v.subscript[a], v.subscript[b]);
                    part == (p, q) || part == (q, r) || part == (p, r)
                })
            }
        }
    }

    /// Whether the fact puts `u` and `v` in a common edge of the triad on
    /// the sorted indices `triad`, with all quantified indices increasing
    /// inside `[1, 4n]`.
    pub fn certifies(&self, u: &Vertex, v: &Vertex, triad: [i64; 3], p: Params) -> bool {
        match &self.kind {
            FactKind::EdgePattern {
                arity,
                triad: slots,
                vertices,
            } => {
                let mut base = vec![None; *arity];
                for (slot, value) in slots.iter().zip(triad) {
                    base[*slot] = Some(value);
                }
                (0..3).any(|x| {
                    (0..3).any(|y| {
                        if x == y {
                            return false;
                        }
                        let mut b = base.clone();
                        unify(&vertices[x], u, &mut b) && unify(&vertices[y], v, &mut b) && fillable(&b, 1, 4 * p.n)
                    })
                })
            }
            FactKind::PairCoOccurrence { triad: t, pair } => {
                let mut fixed = t.map(|a| a.eval(p));
                fixed.sort_unstable();
                if fixed != triad {
                    return false;
                }
                let (a, b) = (pair[0].eval(p), pair[1].eval(p));
                (&a == u && &b == v) || (&a == v && &b == u)
            }
        }
    }
}

fn unify(pat: &PatternVertex, v: &Vertex, bind: &mut [Option<i64>]) -> bool {
    if pat.family != v.family || pat.vars.len() != v.subscript.len() {
        return false;
    }
    for (&var, &val) in pat.vars.iter().zip(&v.subscript) {
        match bind[var] {
            Some(b) if b != val => return false,
            Some(_) => {}
            None => bind[var] = Some(val),
        }
    }
    true
}

/// Whether the unbound entries can be filled so the tuple is strictly
/// increasing within `[lo, hi]`.
fn fillable(bind: &[Option<i64>], lo: i64, hi: i64) -> bool {
    let mut prev = lo - 1;
    let mut gap = 0;
    for b in bind {
        match b {
            None => gap += 1,
            Some(v) => {
                if *v - prev - 1 < gap {
                    return false;
                }
                prev = *v;
                gap = 0;
            }
        }
    }
    hi - prev >= gap
}

/// The structural theorem whose four cases supply the facts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Hypothesis {
    #[serde(rename = "base")]
    Base,
    /// Same as [`Hypothesis::Base`] with `γ¹` and `γ²` exchanged in the
    /// special facts of case 4.
    #[serde(rename = "base-swap")]
    BaseSwap,
}

impl FromStr for Hypothesis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "base" => Ok(Hypothesis::Base),
            "base-swap" => Ok(Hypothesis::BaseSwap),
            _ => Err(Error::invalid(format!("unknown hypothesis \"{s}\" (expected base or base-swap)"))),
        }
    }
}

/// Which family of cycles a schedule embeds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EmbeddingTheorem {
    /// `C_{3m+2}`.
    #[serde(rename = "embed-2mod")]
    TwoMod,
    /// `C_{3m+4}`.
    #[serde(rename = "embed-1mod")]
    OneMod,
}

impl EmbeddingTheorem {
    pub fn length(self, m: i64) -> i64 {
        match self {
            EmbeddingTheorem::TwoMod => 3 * m + 2,
            EmbeddingTheorem::OneMod => 3 * m + 4,
        }
    }

    /// The hypothesis and case whose facts the schedule of `case` uses.
    /// The first two `C_{3m+4}` schedules draw on each other's case.
    pub fn hypotheses_for(self, case: u8) -> (Hypothesis, u8) {
        match (self, case) {
            (EmbeddingTheorem::TwoMod, c) => (Hypothesis::Base, c),
            (EmbeddingTheorem::OneMod, 1) => (Hypothesis::BaseSwap, 2),
            (EmbeddingTheorem::OneMod, 2) => (Hypothesis::BaseSwap, 1),
            (EmbeddingTheorem::OneMod, c) => (Hypothesis::BaseSwap, c),
        }
    }
}

impl fmt::Display for EmbeddingTheorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EmbeddingTheorem::TwoMod => "embed-2mod",
            EmbeddingTheorem::OneMod => "embed-1mod",
        })
    }
}

impl FromStr for EmbeddingTheorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "embed-2mod" => Ok(EmbeddingTheorem::TwoMod),
            "embed-1mod" => Ok(EmbeddingTheorem::OneMod),
            _ => Err(Error::invalid(format!("unknown theorem \"{s}\" (expected embed-2mod or embed-1mod)"))),
        }
    }
}

fn check_case(case: u8) -> Result<()> {
    if (1..=4).contains(&case) {
        Ok(())
    } else {
        Err(Error::invalid(format!("case must be in 1..=4, got {case}")))
    }
}

/// The guaranteed facts of one case of a structural theorem.
pub fn case_hypotheses(theorem: Hypothesis, case: u8) -> Result<Vec<GuaranteedFact>> {
    use Family::*;
    check_case(case)?;
    const IJ: &[usize] = &[0, 1];
    const JK: &[usize] = &[1, 2];
    const IK: &[usize] = &[0, 2];
    let tri = |a, b, c| GuaranteedFact::pattern(3, [0, 1, 2], [(a, IJ), (b, JK), (c, IK)]);
    let facts = match case {
        1 => vec![
            tri(Alpha, Beta, Gamma0),
            tri(Omega, Beta, GammaOmega),
            tri(AlphaOmega, Omega, Gamma0),
        ],
        2 => vec![
            tri(Alpha, Beta, Gamma0),
            tri(Alpha, Omega, GammaOmega),
            tri(Omega, BetaOmega, Gamma0),
        ],
        3 => {
            const IJKST: &[usize] = &[0, 1, 2, 3, 4];
            vec![
                tri(Alpha, Beta, Gamma0),
                GuaranteedFact::pattern(5, [0, 1, 2], [(AlphaPrime, IJ), (BetaBullet, IJKST), (Gamma0, IK)]),
                GuaranteedFact::pattern(5, [1, 2, 3], [(BetaBullet, IJKST), (AlphaBullet, IJKST), (GammaBullet, &[1, 3])]),
                GuaranteedFact::pattern(5, [2, 3, 4], [(AlphaBullet, IJKST), (BetaPrime, &[3, 4]), (Gamma0, &[2, 4])]),
            ]
        }
        _ => {
            let n = |q, c| Affine::in_n(q, c);
            let (left_of, right_of) = match theorem {
                Hypothesis::Base => (Gamma2, Gamma1),
                Hypothesis::BaseSwap => (Gamma1, Gamma2),
            };
            let alpha = SymbolicVertex::pair(AlphaSpecial, n(2, 0), n(2, 1));
            let beta = SymbolicVertex::pair(BetaSpecial, n(2, 1), n(2, 2));
            let top_a = SymbolicVertex::pair(left_of, n(2, 0), n(3, 1));
            let top_b = SymbolicVertex::pair(right_of, n(1, 0), n(2, 2));
            vec![
                tri(Gamma1, BetaStar, Gamma),
                tri(AlphaStar, Gamma2, Gamma),
                tri(Alpha1, Beta1, Gamma1),
                tri(Alpha2, Beta2, Gamma2),
                GuaranteedFact::pair(
                    format!("{alpha} is a left neighbour of {top_a}"),
                    [n(2, 0), n(2, 1), n(3, 1)],
                    [alpha.clone(), top_a],
                ),
                GuaranteedFact::pair(
                    format!("{beta} is a right neighbour of {top_b}"),
                    [n(1, 0), n(2, 1), n(2, 2)],
                    [beta.clone(), top_b],
                ),
                GuaranteedFact::pair(
                    format!("{alpha} and {beta} share an edge"),
                    [n(2, 0), n(2, 1), n(2, 2)],
                    [alpha, beta],
                ),
            ]
        }
    };
    Ok(facts)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Schedule {
    pub theorem: EmbeddingTheorem,
    pub case: u8,
    pub m: i64,
    pub n: i64,
    pub indices: Vec<Affine>,
    pub vertices: Vec<SymbolicVertex>,
}

impl Schedule {
    pub fn params(&self) -> Params {
        Params { m: self.m, n: self.n }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// The same schedule checked against the index range `[4n]`.
    pub fn with_n(mut self, n: i64) -> Self {
        self.n = n;
        self
    }

    pub fn hypotheses(&self) -> Result<Vec<GuaranteedFact>> {
        let (h, c) = self.theorem.hypotheses_for(self.case);
        case_hypotheses(h, c)
    }
}

/// The explicit index and vertex lists of one case, with the repeated middle
/// segments expanded for the given `m`; `n` is set to [`default_n`].
pub fn build_schedule(theorem: EmbeddingTheorem, case: u8, m: i64) -> Result<Schedule> {
    use Family::*;
    check_case(case)?;
    if m < 1 {
        return Err(Error::invalid(format!("m must be at least 1, got {m}")));
    }
    let mm = |p, c| Affine::in_m(p, c);
    let k = |c| Affine::constant(c);
    let nn = |q, c| Affine::in_n(q, c);
    let v = |f, a: Affine, b: Affine| SymbolicVertex::pair(f, a, b);
    let mut idx = Vec::new();
    let mut vtx = Vec::new();
    match (theorem, case) {
        (EmbeddingTheorem::TwoMod, 1 | 2) => {
            for i in 1..=m {
                idx.extend([k(i), mm(1, 1 + i), mm(2, 2 + i)]);
                vtx.push(v(Alpha, k(i), mm(1, 1 + i)));
                vtx.push(v(Beta, mm(1, 1 + i), mm(2, 2 + i)));
                if i < m {
                    vtx.push(v(Gamma0, k(i + 1), mm(2, 2 + i)));
                }
            }
            idx.extend([mm(1, 1), mm(2, 2)]);
            if case == 1 {
                vtx.push(v(GammaOmega, mm(1, 1), mm(3, 2)));
                vtx.push(v(Omega, mm(1, 1), mm(2, 2)));
                vtx.push(v(Gamma0, k(1), mm(2, 2)));
            } else {
                vtx.push(v(Gamma0, mm(1, 1), mm(3, 2)));
                vtx.push(v(Omega, mm(1, 1), mm(2, 2)));
                vtx.push(v(GammaOmega, k(1), mm(2, 2)));
            }
        }
        (EmbeddingTheorem::TwoMod, 3) => {
            // Shifted up by two so the closing quintuple fact has room for
            // the two indices below its triad.
            let s = 2;
            for i in 1..m {
                idx.extend([k(i + s), mm(1, i + s), mm(2, i + s)]);
                vtx.push(v(Alpha, k(i + s), mm(1, i + s)));
                vtx.push(v(Beta, mm(1, i + s), mm(2, i + s)));
                vtx.push(v(Gamma0, k(i + 1 + s), mm(2, i + s)));
            }
            idx.extend([mm(1, s), mm(2, s), mm(3, s), mm(3, 1 + s), mm(3, 2 + s)]);
            let five = vec![mm(1, s), mm(2, s), mm(3, s), mm(3, 1 + s), mm(3, 2 + s)];
            vtx.push(v(AlphaPrime, mm(1, s), mm(2, s)));
            vtx.push(SymbolicVertex {
                family: BetaBullet,
                subscript: five.clone(),
            });
            vtx.push(SymbolicVertex {
                family: AlphaBullet,
                subscript: five,
            });
            vtx.push(v(BetaPrime, mm(3, 1 + s), mm(3, 2 + s)));
            vtx.push(v(Gamma0, k(1 + s), mm(3, 2 + s)));
        }
        (EmbeddingTheorem::TwoMod, _) => {
            idx.extend([nn(1, 0), nn(2, 2), nn(2, 1), nn(2, 0), nn(3, 1)]);
            vtx.push(v(Gamma1, nn(1, 0), nn(2, 2)));
            vtx.push(v(BetaSpecial, nn(2, 1), nn(2, 2)));
            vtx.push(v(AlphaSpecial, nn(2, 0), nn(2, 1)));
            vtx.push(v(Gamma2, nn(2, 0), nn(3, 1)));
            push_case4_triples(&mut idx, &mut vtx, m, [Beta2, Alpha2, Gamma2]);
            vtx.push(v(Gamma, nn(1, 0), *idx.last().expect("nonempty")));
        }
        (EmbeddingTheorem::OneMod, 1..=3) => {
            idx.extend(if case == 3 {
                [mm(2, 2), mm(3, 4), k(3), mm(3, 3), k(2), mm(3, 2), k(1)]
            } else {
                [mm(2, 2), mm(3, 4), k(2), k(3), mm(3, 2), mm(3, 3), k(1)]
            });
            let five = |a: Affine, b, c, d, e| vec![a, b, c, d, e];
            vtx.push(v(Beta, mm(2, 2), mm(3, 4)));
            match case {
                1 => vtx.extend([
                    v(Gamma0, k(2), mm(3, 4)),
                    v(Alpha, k(2), k(3)),
                    v(Omega, k(3), mm(3, 2)),
                    v(BetaOmega, mm(3, 2), mm(3, 3)),
                    v(Gamma0, k(1), mm(3, 3)),
                ]),
                2 => vtx.extend([
                    v(Gamma0, k(2), mm(3, 4)),
                    v(AlphaOmega, k(2), k(3)),
                    v(Omega, k(3), mm(3, 2)),
                    v(Beta, mm(3, 2), mm(3, 3)),
                    v(Gamma0, k(1), mm(3, 3)),
                ]),
                _ => vtx.extend([
                    v(Gamma0, k(3), mm(3, 4)),
                    SymbolicVertex {
                        family: AlphaBullet,
                        subscript: five(k(1), k(2), k(3), mm(3, 3), mm(3, 4)),
                    },
                    v(GammaBullet, k(2), mm(3, 3)),
                    SymbolicVertex {
                        family: BetaBullet,
                        subscript: five(k(1), k(2), mm(3, 2), mm(3, 3), mm(3, 4)),
                    },
                    v(Gamma0, k(1), mm(3, 2)),
                ]),
            }
            vtx.push(v(Alpha, k(1), mm(1, 3)));
            for i in 1..m {
                idx.extend([mm(1, 2 + i), mm(2, 2 + i), k(3 + i)]);
                vtx.push(v(Beta, mm(1, 2 + i), mm(2, 2 + i)));
                vtx.push(v(Gamma0, k(3 + i), mm(2, 2 + i)));
                vtx.push(v(Alpha, k(3 + i), mm(1, 3 + i)));
            }
        }
        (EmbeddingTheorem::OneMod, _) => {
            idx.extend([nn(1, -1), nn(1, 0), nn(2, 2), nn(2, 1), nn(2, 0), nn(3, 1)]);
            vtx.push(v(AlphaStar, nn(1, -1), nn(1, 0)));
            vtx.push(v(Gamma2, nn(1, 0), nn(2, 2)));
            vtx.push(v(BetaSpecial, nn(2, 1), nn(2, 2)));
            vtx.push(v(AlphaSpecial, nn(2, 0), nn(2, 1)));
            vtx.push(v(Gamma1, nn(2, 0), nn(3, 1)));
            push_case4_triples(&mut idx, &mut vtx, m, [Beta1, Alpha1, Gamma1]);
            let last = *idx.last().expect("nonempty");
            idx.push(last.shifted(1));
            vtx.push(v(BetaStar, last, last.shifted(1)));
            vtx.push(v(Gamma, nn(1, -1), last.shifted(1)));
        }
    }
    Ok(Schedule {
        theorem,
        case,
        m,
        n: default_n(m),
        indices: idx,
        vertices: vtx,
    })
}

/// Triples `3n+3r, 3n+3r−1, 3n+3r+4` for `r = 0..m−2` with vertices
/// `β_{3n+3r,3n+3r+1}, α_{3n+3r−1,3n+3r}, γ_{3n+3r−1,3n+3r+4}`.
fn push_case4_triples(idx: &mut Vec<Affine>, vtx: &mut Vec<SymbolicVertex>, m: i64, [b, a, g]: [Family; 3]) {
    for r in 0..m - 1 {
        let at = |c| Affine::in_n(3, 3 * r + c);
        idx.extend([at(0), at(-1), at(4)]);
        vtx.push(SymbolicVertex::pair(b, at(0), at(1)));
        vtx.push(SymbolicVertex::pair(a, at(-1), at(0)));
        vtx.push(SymbolicVertex::pair(g, at(-1), at(4)));
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PositionCheck {
    /// 1-based cyclic position `t`.
    pub position: usize,
    /// `a_t, a_{t+1}, a_{t+2}`.
    pub indices: [i64; 3],
    pub vertex: String,
    pub next: String,
    /// Label of the first fact that certifies the pair, if any.
    pub certified_by: Option<String>,
    pub problems: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScheduleReport {
    pub theorem: EmbeddingTheorem,
    pub case: u8,
    pub m: i64,
    pub n: i64,
    pub length: usize,
    pub indices: Vec<i64>,
    pub valid: bool,
    pub positions: Vec<PositionCheck>,
    pub failures: Vec<String>,
}

/// Checks that the schedule realizes a tight cycle under `facts`.
///
/// Global checks: the length is `3m+2` or `3m+4`, the index and vertex
/// lists have equal length, indices are pairwise distinct and lie in
/// `[1, 4n]`. For every cyclic position `t`: `a_t, a_{t+1}, a_{t+2}` are
/// distinct, `v_t` has increasing subscripts and lies in the part of
/// `{a_t, a_{t+1}}`, and some fact places `v_t, v_{t+1}` in a common edge of
/// the triad on `{a_t, a_{t+1}, a_{t+2}}`.
pub fn verify_schedule(s: &Schedule, facts: &[GuaranteedFact]) -> ScheduleReport {
    let p = s.params();
    let indices: Vec<i64> = s.indices.iter().map(|a| a.eval(p)).collect();
    let vertices: Vec<Vertex> = s.vertices.iter().map(|v| v.eval(p)).collect();
    let len = indices.len();
    let mut failures = Vec::new();
    let expected = s.theorem.length(s.m);
    if len as i64 != expected {
        failures.push(format!("schedule has {len} indices, expected {expected}"));
    }
    if vertices.len() != len {
        failures.push(format!("{} vertices for {len} indices", vertices.len()));
    }
    for (t, &a) in indices.iter().enumerate() {
        if !(1..=4 * s.n).contains(&a) {
            failures.push(format!("a_{} = {a} outside [1, {}]", t + 1, 4 * s.n));
        }
        if let Some(u) = indices[..t].iter().position(|&b| b == a) {
            failures.push(format!("a_{} = a_{} = {a}", u + 1, t + 1));
        }
    }
    let mut positions = Vec::new();
    if len >= 3 && vertices.len() == len {
        for t in 0..len {
            let tri = [indices[t], indices[(t + 1) % len], indices[(t + 2) % len]];
            let (u, w) = (&vertices[t], &vertices[(t + 1) % len]);
            let mut problems = Vec::new();
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                problems.push(format!("indices {tri:?} are not distinct"));
            }
            if !u.increasing() {
                problems.push(format!("{u} has non-increasing subscripts"));
            }
            let pair = (tri[0].min(tri[1]), tri[0].max(tri[1]));
            if u.part() != pair {
                problems.push(format!("{u} is not in V_{{{},{}}}", pair.0, pair.1));
            }
            let mut sorted = tri;
            sorted.sort_unstable();
            let certified_by = facts
                .iter()
                .find(|f| f.certifies(u, w, sorted, p))
                .map(|f| f.label.clone());
            if certified_by.is_none() {
                problems.push(format!(
                    "no fact puts {u} and {w} in an edge of the ({},{},{}) triad",
                    sorted[0], sorted[1], sorted[2]
                ));
            }
            for msg in &problems {
                failures.push(format!("position {}: {msg}", t + 1));
            }
            positions.push(PositionCheck {
                position: t + 1,
                indices: tri,
                vertex: u.to_string(),
                next: w.to_string(),
                certified_by,
                problems,
            });
        }
    }
    ScheduleReport {
        theorem: s.theorem,
        case: s.case,
        m: s.m,
        n: s.n,
        length: len,
        indices,
        valid: failures.is_empty(),
        positions,
        failures,
    }
}

/// Builds and verifies one schedule against its own hypotheses.
pub fn verify_case(theorem: EmbeddingTheorem, case: u8, m: i64) -> Result<ScheduleReport> {
    let s = build_schedule(theorem, case, m)?;
    Ok(verify_schedule(&s, &s.hypotheses()?))
}
