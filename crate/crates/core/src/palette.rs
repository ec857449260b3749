//! Host hypergraphs from pair colourings and a palette.
//!
//! Given `k` and `P ⊆ [k]^3`, a colouring `φ` of the pairs of `[n]` defines a
//! host on `[n]` in which `a < b < c` is an edge iff
//! `(φ(ab), φ(bc), φ(ac)) ∈ P`. If every such host is `F`-free, the uniform
//! Turán density of `F` is at least `|P| / k^3`.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{pairs, triples, Hypergraph3};
use crate::rng;

/// Default cap on the number of colourings examined in exhaustive mode.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPalette", into = "RawPalette")]
pub struct Palette {
    k: usize,
    triples: BTreeSet<[usize; 3]>,
}

#[derive(Serialize, Deserialize)]
struct RawPalette {
    k: usize,
    triples: Vec<[usize; 3]>,
}

impl TryFrom<RawPalette> for Palette {
    type Error = Error;

    fn try_from(raw: RawPalette) -> Result<Self> {
        let len = raw.triples.len();
        let p = Palette::new(raw.k, raw.triples)?;
        if p.triples.len() != len {
            return Err(Error::invalid("palette lists a triple twice"));
        }
        Ok(p)
    }
}

impl From<Palette> for RawPalette {
    fn from(p: Palette) -> Self {
        RawPalette {
            k: p.k,
            triples: p.triples.into_iter().collect(),
        }
    }
}

impl Palette {
    pub fn new(k: usize, triples: impl IntoIterator<Item = [usize; 3]>) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("a palette needs at least one colour"));
        }
        let triples: BTreeSet<_> = triples.into_iter().collect();
        if let Some(t) = triples.iter().find(|t| t.iter().any(|&c| c == 0 || c > k)) {
            return Err(Error::invalid(format!("palette triple {t:?} leaves [{k}]")));
        }
        Ok(Palette { k, triples })
    }

    /// Every triple of `[k]^3`.
    pub fn full(k: usize) -> Result<Self> {
        let all = (1..=k).flat_map(|a| (1..=k).flat_map(move |b| (1..=k).map(move |c| [a, b, c])));
        Self::new(k, all)
    }

    /// `k = 3`, `P = {(1,3,1), (1,3,2), (2,3,1), (2,3,2)}`: hosts avoid every
    /// tight cycle whose length is not divisible by three.
    pub fn lower_bound() -> Self {
        Self::new(3, [[1, 3, 1], [1, 3, 2], [2, 3, 1], [2, 3, 2]]).expect("valid palette")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn triples(&self) -> &BTreeSet<[usize; 3]> {
        &self.triples
    }

    pub fn contains(&self, t: [usize; 3]) -> bool {
        self.triples.contains(&t)
    }

    /// Exact `|P| / k^3`.
    pub fn density(&self) -> Ratio<u64> {
        Ratio::new(self.triples.len() as u64, (self.k as u64).pow(3))
    }
}

/// A colouring of the pairs of `[n]` with colours `1..=k`.
///
/// Colours are stored in lexicographic pair order `12, 13, …, 1n, 23, …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawColoring", into = "RawColoring")]
pub struct PairColoring {
    n: usize,
    colors: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawColoring {
    n: usize,
    colors: BTreeMap<String, usize>,
}

impl TryFrom<RawColoring> for PairColoring {
    type Error = Error;

    fn try_from(raw: RawColoring) -> Result<Self> {
        let mut colors = vec![0; raw.n * raw.n.saturating_sub(1) / 2];
        for (key, c) in raw.colors {
            let [a, b] = parse_pair(&key)?;
            if a >= b || b > raw.n || a == 0 {
                return Err(Error::invalid(format!("pair \"{key}\" is not a < b within [{}]", raw.n)));
            }
            colors[pair_index(raw.n, a, b)] = c;
        }
        PairColoring::new(raw.n, colors)
    }
}

impl From<PairColoring> for RawColoring {
    fn from(c: PairColoring) -> Self {
        RawColoring {
            n: c.n,
            colors: pairs(c.n)
                .zip(&c.colors)
                .map(|([a, b], &col)| (format!("{a},{b}"), col))
                .collect(),
        }
    }
}

pub(crate) fn parse_pair(key: &str) -> Result<[usize; 2]> {
    let parts: Vec<_> = key.split(',').map(|s| s.trim().parse::<usize>()).collect();
    match parts.as_slice() {
        [Ok(a), Ok(b)] => Ok([*a, *b]),
        _ => Err(Error::invalid(format!("cannot parse pair key \"{key}\""))),
    }
}

/// Position of the pair `a < b` in lexicographic order over `[n]`.
fn pair_index(n: usize, a: usize, b: usize) -> usize {
    (a - 1) * (2 * n - a) / 2 + (b - a - 1)
}

impl PairColoring {
    /// `colors` lists the colour of every pair in lexicographic order; each
    /// colour must be positive.
    pub fn new(n: usize, colors: Vec<usize>) -> Result<Self> {
        if colors.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::invalid(format!(
                "a colouring of [{n}] needs {} colours, got {}",
                n * n.saturating_sub(1) / 2,
                colors.len()
            )));
        }
        if colors.iter().any(|&c| c == 0) {
            return Err(Error::invalid("every pair needs a colour ≥ 1"));
        }
        Ok(PairColoring { n, colors })
    }

    pub fn constant(n: usize, color: usize) -> Result<Self> {
        Self::new(n, vec![color; n * n.saturating_sub(1) / 2])
    }

    /// The `index`-th colouring in base-`k` counter order (first pair is the
    /// most significant digit), i.e. lexicographic order of colour sequences.
    pub fn from_index(n: usize, k: usize, mut index: u128) -> Self {
        let len = n * n.saturating_sub(1) / 2;
        let mut colors = vec![1; len];
        for slot in colors.iter_mut().rev() {
            *slot = (index % k as u128) as usize + 1;
            index /= k as u128;
        }
        PairColoring { n, colors }
    }

    pub fn random<R: Rng>(n: usize, k: usize, rng: &mut R) -> Self {
        let len = n * n.saturating_sub(1) / 2;
        PairColoring {
            n,
            colors: (0..len).map(|_| rng.random_range(1..=k)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Colour of the unordered pair `{a, b}`.
    pub fn color(&self, a: usize, b: usize) -> usize {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.colors[pair_index(self.n, a, b)]
    }

    pub fn set_color(&mut self, a: usize, b: usize, color: usize) {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let i = pair_index(self.n, a, b);
        self.colors[i] = color;
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }
}

/// The host on `[n]`: `a < b < c` is an edge iff `(φ(ab), φ(bc), φ(ac)) ∈ P`.
pub fn host_from_coloring(coloring: &PairColoring, palette: &Palette) -> Result<Hypergraph3> {
    if let Some(&c) = coloring.colors.iter().find(|&&c| c > palette.k) {
        return Err(Error::invalid(format!(
            "colour {c} exceeds the palette's k = {}",
            palette.k
        )));
    }
    Ok(host_unchecked(coloring, palette))
}

fn host_unchecked(coloring: &PairColoring, palette: &Palette) -> Hypergraph3 {
    let edges = triples(coloring.n).filter(|&[a, b, c]| {
        palette.contains([coloring.color(a, b), coloring.color(b, c), coloring.color(a, c)])
    });
    Hypergraph3::new(coloring.n.max(1), edges).expect("triples are valid edges")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum FreenessMode {
    /// Every colouring, in lexicographic order.
    Exhaustive,
    /// `count` colourings; colouring `i` is drawn from a stream seeded by
    /// `(seed, i)`.
    Sampled { count: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreenessReport {
    pub free: bool,
    /// First colouring whose host contains the forbidden hypergraph.
    pub counterexample: Option<PairColoring>,
    /// The copy found in that host (forbidden vertex `i` ↦ `copy[i-1]`).
    pub copy: Option<Vec<usize>>,
    /// Number of colourings in the examined space.
    pub colorings: u128,
}

/// Checks whether every host built from `palette` on `[n]` avoids `forbidden`.
///
/// In exhaustive mode the space has `k^{C(n,2)}` colourings and must fit
/// within `budget`; the reported counterexample is the lexicographically
/// first failing colouring. Work is spread over the current rayon pool; the
/// result does not depend on the number of threads.
pub fn verify_freeness(
    palette: &Palette,
    forbidden: &Hypergraph3,
    n: usize,
    mode: FreenessMode,
    budget: u128,
) -> Result<FreenessReport> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let k = palette.k;
    let npairs = (n * (n - 1) / 2) as u32;
    let check = |coloring: PairColoring| -> Option<(PairColoring, Vec<usize>)> {
        let host = host_unchecked(&coloring, palette);
        host.contains_copy(forbidden).map(|copy| (coloring, copy))
    };
    let (colorings, hit) = match mode {
        FreenessMode::Exhaustive => {
            let total = (k as u128)
                .checked_pow(npairs)
                .filter(|&t| t <= budget)
                .ok_or_else(|| {
                    Error::budget(
                        format!("exhaustive check of {k}^{npairs} colourings"),
                        (k as u128).checked_pow(npairs),
                        budget,
                    )
                })?;
            let total_usize = usize::try_from(total)
                .map_err(|_| Error::budget("colouring space", Some(total), usize::MAX as u128))?;
            let hit = (0..total_usize)
                .into_par_iter()
                .map(|i| check(PairColoring::from_index(n, k, i as u128)))
                .find_first(Option::is_some)
                .flatten();
            (total, hit)
        }
        FreenessMode::Sampled { count, seed } => {
            let count_usize = usize::try_from(count).expect("sample count fits in usize");
            let hit = (0..count_usize)
                .into_par_iter()
                .map(|i| {
                    let mut r = rng::seeded(rng::derive_seed(seed, i as u64));
                    check(PairColoring::random(n, k, &mut r))
                })
                .find_first(Option::is_some)
                .flatten();
            (count as u128, hit)
        }
    };
    Ok(match hit {
        Some((coloring, copy)) => FreenessReport {
            free: false,
            counterexample: Some(coloring),
            copy: Some(copy),
            colorings,
        },
        None => FreenessReport {
            free: true,
            counterexample: None,
            copy: None,
            colorings,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_bound_palette_shape() {
        let p = Palette::lower_bound();
        assert_eq!(p.k(), 3);
        assert_eq!(
            p.triples().iter().copied().collect::<Vec<_>>(),
            vec![[1, 3, 1], [1, 3, 2], [2, 3, 1], [2, 3, 2]]
        );
        assert!(p.triples().iter().all(|t| t[1] == 3));
        assert_eq!(p.density(), Ratio::new(4, 27));
    }

    #[test]
    fn density_extremes() {
        assert_eq!(Palette::new(2, []).unwrap().density(), Ratio::new(0, 1));
        assert_eq!(Palette::full(2).unwrap().density(), Ratio::new(1, 1));
    }

    #[test]
    fn single_triple_host() {
        let mut phi = PairColoring::constant(3, 1).unwrap();
        phi.set_color(2, 3, 3);
        let host = host_from_coloring(&phi, &Palette::lower_bound()).unwrap();
        assert_eq!(host.edges(), &[[1, 2, 3]]);
    }

    #[test]
    fn empty_and_full_palettes() {
        let mut r = rng::seeded(3);
        let phi = PairColoring::random(6, 2, &mut r);
        let empty = host_from_coloring(&phi, &Palette::new(2, []).unwrap()).unwrap();
        assert_eq!(empty.edge_count(), 0);
        let full = host_from_coloring(&phi, &Palette::full(2).unwrap()).unwrap();
        assert_eq!(full, Hypergraph3::complete(6).unwrap());
    }

    #[test]
    fn out_of_range_colour() {
        let phi = PairColoring::constant(4, 4).unwrap();
        assert!(matches!(
            host_from_coloring(&phi, &Palette::lower_bound()),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn counter_order_is_lexicographic() {
        let first = PairColoring::from_index(3, 3, 0);
        assert_eq!(first.colors(), &[1, 1, 1]);
        let second = PairColoring::from_index(3, 3, 1);
        assert_eq!(second.colors(), &[1, 1, 2]);
        let last = PairColoring::from_index(3, 3, 26);
        assert_eq!(last.colors(), &[3, 3, 3]);
        assert_eq!(PairColoring::from_index(3, 3, 9).colors(), &[2, 1, 1]);
    }

    #[test]
    fn full_palette_k1_contains_k4() {
        let report = verify_freeness(
            &Palette::full(1).unwrap(),
            &Hypergraph3::complete(4).unwrap(),
            4,
            FreenessMode::Exhaustive,
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(!report.free);
        assert_eq!(report.counterexample, Some(PairColoring::constant(4, 1).unwrap()));
        assert_eq!(report.colorings, 1);
    }

    #[test]
    fn budget_is_enforced() {
        let err = verify_freeness(
            &Palette::lower_bound(),
            &Hypergraph3::tight_cycle(7).unwrap(),
            7,
            FreenessMode::Exhaustive,
            DEFAULT_BUDGET,
        )
        .unwrap_err();
        match err {
            Error::Budget { required, .. } => assert_eq!(required, Some(3u128.pow(21))),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn c5_free_exhaustive() {
        let report = verify_freeness(
            &Palette::lower_bound(),
            &Hypergraph3::tight_cycle(5).unwrap(),
            5,
            FreenessMode::Exhaustive,
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(report.free);
        assert_eq!(report.colorings, 59049);
    }

    #[test]
    fn coloring_json() {
        let mut phi = PairColoring::constant(3, 1).unwrap();
        phi.set_color(2, 3, 3);
        let s = serde_json::to_string(&phi).unwrap();
        assert_eq!(s, r#"{"n":3,"colors":{"1,2":1,"1,3":1,"2,3":3}}"#);
        assert_eq!(serde_json::from_str::<PairColoring>(&s).unwrap(), phi);
        assert!(serde_json::from_str::<PairColoring>(r#"{"n":3,"colors":{"1,2":1}}"#).is_err());
    }
}
