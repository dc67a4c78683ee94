//! Iterated function systems of similarities on the line.
//!
//! A system is a finite family of contractions `φ_i(x) = r_i·x + t_i` that map
//! an ambient interval `V` into itself. Words over the alphabet `{0, …, d−1}`
//! index compositions of the maps. Two orders matter:
//!
//! * [`IfsSystem::compose`] gives `φ_{i₁}∘…∘φ_{iₙ}`, the order used by the
//!   coding map (a word is a prefix of a point's address).
//! * [`IfsSystem::compose_reversed`] gives `φ_{iₙ}∘…∘φ_{i₁}`, the order produced
//!   by iterating the skew product `(ω, x) ↦ (σω, φ_{ω₁}(x))`. Every overlap
//!   count is phrased in this order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative gap below which neighbouring cover intervals are coalesced.
pub const COALESCE_GAP: f64 = 1e-12;

/// Default cap on the number of intervals produced at one cover level.
pub const DEFAULT_COVER_BUDGET: u64 = 1 << 20;

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::InvalidSystem(format!(
                "[{lo}, {hi}] is not an interval"
            )));
        }
        Ok(Interval { lo, hi })
    }

    #[inline]
    pub fn diam(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `x` lies within `slack` of the interval.
    #[inline]
    pub fn contains_with_slack(&self, x: f64, slack: f64) -> bool {
        self.lo - slack <= x && x <= self.hi + slack
    }

    pub fn contains_interval(&self, other: &Interval, slack: f64) -> bool {
        self.lo - slack <= other.lo && other.hi <= self.hi + slack
    }
}

/// One contraction `x ↦ ratio·x + translation`.
///
/// The sign of `ratio` is the isometry part (orientation) and `|ratio|` the
/// contraction factor. The identity is representable through
/// [`SimilarityMap::identity`] only; it is the image of the empty word.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMap {
    ratio: f64,
    translation: f64,
}

impl SimilarityMap {
    pub fn new(ratio: f64, translation: f64) -> Result<Self> {
        if !ratio.is_finite() || !translation.is_finite() {
            return Err(Error::InvalidMap(format!(
                "non-finite coefficients ({ratio}, {translation})"
            )));
        }
        let r = ratio.abs();
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidMap(format!(
                "|ratio| must lie in (0, 1), got {ratio}"
            )));
        }
        Ok(SimilarityMap { ratio, translation })
    }

    pub const fn identity() -> Self {
        SimilarityMap {
            ratio: 1.0,
            translation: 0.0,
        }
    }

    #[inline]
    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Contraction factor `|ratio|`, which is also `|φ'|` everywhere.
    #[inline]
    pub fn scale(&self) -> f64 {
        self.ratio.abs()
    }

    #[inline]
    pub fn reverses_orientation(&self) -> bool {
        self.ratio < 0.0
    }

    #[inline]
    pub fn translation(&self) -> f64 {
        self.translation
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        self.ratio * x + self.translation
    }

    #[inline]
    pub fn invert(&self, y: f64) -> f64 {
        (y - self.translation) / self.ratio
    }

    /// `self ∘ inner`.
    #[inline]
    pub fn after(&self, inner: &SimilarityMap) -> SimilarityMap {
        SimilarityMap {
            ratio: self.ratio * inner.ratio,
            translation: self.ratio * inner.translation + self.translation,
        }
    }

    pub fn image(&self, iv: &Interval) -> Interval {
        let a = self.apply(iv.lo);
        let b = self.apply(iv.hi);
        Interval {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    /// The unique fixed point `t / (1 − r)`.
    pub fn fixed_point(&self) -> f64 {
        self.translation / (1.0 - self.ratio)
    }
}

/// A finite word `i₁…iₙ` over the alphabet of a system.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(symbols: Vec<usize>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn push(&mut self, symbol: usize) {
        self.0.push(symbol);
    }

    /// Word with index `index` in the lexicographic order of `alphabetⁿ`.
    pub fn from_index(mut index: u64, len: usize, alphabet: usize) -> Word {
        let mut symbols = vec![0; len];
        for slot in symbols.iter_mut().rev() {
            *slot = (index % alphabet as u64) as usize;
            index /= alphabet as u64;
        }
        Word(symbols)
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Merged outer cover of the limit set by the images `φ_w(V)`, `|w| = depth`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalCover {
    pub depth: usize,
    /// Sorted, pairwise disjoint.
    pub intervals: Vec<Interval>,
    /// Largest diameter of a single depth-`depth` cylinder image.
    pub max_diameter: f64,
}

impl IntervalCover {
    /// Whether `x` is within `slack` of the cover.
    pub fn contains(&self, x: f64, slack: f64) -> bool {
        // first interval whose right end reaches x - slack
        let k = self.intervals.partition_point(|iv| iv.hi + slack < x);
        match self.intervals.get(k) {
            Some(iv) => iv.lo - slack <= x,
            None => false,
        }
    }

    pub fn contains_interval(&self, other: &Interval, slack: f64) -> bool {
        let k = self
            .intervals
            .partition_point(|iv| iv.hi + slack < other.lo);
        self.intervals
            .get(k)
            .is_some_and(|iv| iv.contains_interval(other, slack))
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(Interval::diam).sum()
    }

    pub fn hull(&self) -> Interval {
        Interval {
            lo: self.intervals[0].lo,
            hi: self.intervals[self.intervals.len() - 1].hi,
        }
    }
}

/// A finite IFS of similarities on an ambient interval.
#[derive(Debug, Clone, PartialEq)]
pub struct IfsSystem {
    maps: Vec<SimilarityMap>,
    ambient: Interval,
}

impl IfsSystem {
    /// Builds a system, checking `d ≥ 2` and `φ_i(V) ⊆ V`.
    pub fn new(maps: Vec<SimilarityMap>, ambient: Interval) -> Result<Self> {
        if maps.len() < 2 {
            return Err(Error::InvalidSystem(format!(
                "need at least two maps, got {}",
                maps.len()
            )));
        }
        if !(ambient.diam() > 0.0) {
            return Err(Error::InvalidSystem(
                "ambient interval must have nonempty interior".into(),
            ));
        }
        let tol = COALESCE_GAP * ambient.diam();
        for (i, m) in maps.iter().enumerate() {
            let img = m.image(&ambient);
            if !ambient.contains_interval(&img, tol) {
                return Err(Error::InvalidSystem(format!(
                    "map {i} sends [{}, {}] to [{}, {}], which leaves the ambient interval",
                    ambient.lo, ambient.hi, img.lo, img.hi
                )));
            }
        }
        Ok(IfsSystem { maps, ambient })
    }

    /// Builds a system on the smallest interval mapped into itself by all maps.
    pub fn with_hull(maps: Vec<SimilarityMap>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidSystem("no maps".into()));
        }
        let ambient = attractor_hull(&maps);
        Self::new(maps, ambient)
    }

    /// `φ₁(x) = λx − 1`, `φ₂(x) = λx + 1` on `[−1/(1−λ), 1/(1−λ)]`.
    pub fn bernoulli_convolution(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::Domain {
                value: lambda,
                domain: "(0, 1)".into(),
            });
        }
        let half = 1.0 / (1.0 - lambda);
        Self::new(
            vec![
                SimilarityMap::new(lambda, -1.0)?,
                SimilarityMap::new(lambda, 1.0)?,
            ],
            Interval::new(-half, half)?,
        )
    }

    /// Middle-thirds Cantor system on `[0, 1]`.
    pub fn cantor_middle_thirds() -> Self {
        Self::new(
            vec![
                SimilarityMap::new(1.0 / 3.0, 0.0).unwrap(),
                SimilarityMap::new(1.0 / 3.0, 2.0 / 3.0).unwrap(),
            ],
            Interval { lo: 0.0, hi: 1.0 },
        )
        .unwrap()
    }

    pub fn alphabet_size(&self) -> usize {
        self.maps.len()
    }

    pub fn maps(&self) -> &[SimilarityMap] {
        &self.maps
    }

    pub fn map(&self, i: usize) -> &SimilarityMap {
        &self.maps[i]
    }

    pub fn ambient(&self) -> Interval {
        self.ambient
    }

    pub fn max_scale(&self) -> f64 {
        self.maps
            .iter()
            .map(SimilarityMap::scale)
            .fold(0.0, f64::max)
    }

    pub fn min_scale(&self) -> f64 {
        self.maps
            .iter()
            .map(SimilarityMap::scale)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        let d = self.alphabet_size();
        match w.symbols().iter().position(|&s| s >= d) {
            Some(position) => Err(Error::InvalidWord {
                symbol: w.symbols()[position],
                position,
                alphabet: d,
            }),
            None => Ok(()),
        }
    }

    /// `φ_{i₁}∘…∘φ_{iₙ}`; the empty word gives the identity.
    pub fn compose(&self, w: &Word) -> Result<SimilarityMap> {
        self.check_word(w)?;
        Ok(w.symbols()
            .iter()
            .fold(SimilarityMap::identity(), |acc, &i| {
                acc.after(&self.maps[i])
            }))
    }

    /// `φ_{iₙ}∘…∘φ_{i₁}`.
    pub fn compose_reversed(&self, w: &Word) -> Result<SimilarityMap> {
        self.check_word(w)?;
        Ok(w.symbols()
            .iter()
            .fold(SimilarityMap::identity(), |acc, &i| {
                self.maps[i].after(&acc)
            }))
    }

    /// Truncated coding map: `φ_{i₁…iₙ}(base)` and the bound `|∏ r_{i_k}|·diam(V)`
    /// on its distance to `π(ω)` for every `ω` extending the prefix.
    pub fn pi_point(&self, prefix: &Word, base: f64) -> Result<(f64, f64)> {
        if !self.ambient.contains(base) {
            return Err(Error::Domain {
                value: base,
                domain: format!("[{}, {}]", self.ambient.lo, self.ambient.hi),
            });
        }
        if prefix.is_empty() {
            return Err(Error::InvalidParameter("prefix must be nonempty".into()));
        }
        let m = self.compose(prefix)?;
        Ok((m.apply(base), m.scale() * self.ambient.diam()))
    }

    /// Whether the first-level images `φ_i(V)` are pairwise disjoint.
    pub fn strongly_separated(&self) -> bool {
        let mut imgs: Vec<Interval> = self.maps.iter().map(|m| m.image(&self.ambient)).collect();
        imgs.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        imgs.windows(2).all(|w| w[0].hi < w[1].lo)
    }

    pub fn limit_set_cover(&self, depth: usize) -> Result<IntervalCover> {
        self.limit_set_cover_with_budget(depth, DEFAULT_COVER_BUDGET)
    }

    /// Merged union of the depth-`depth` cylinder images of `V`.
    ///
    /// Built level by level: `cover(n+1) = merge(∪_i φ_i(cover(n)))`. `budget`
    /// bounds the number of intervals at any level before merging.
    pub fn limit_set_cover_with_budget(&self, depth: usize, budget: u64) -> Result<IntervalCover> {
        let gap = COALESCE_GAP * self.ambient.diam();
        let mut intervals = vec![self.ambient];
        for level in 1..=depth {
            let needed = (intervals.len() as u64).saturating_mul(self.maps.len() as u64);
            if needed > budget {
                return Err(Error::CoverBudget {
                    depth: level,
                    needed,
                    budget,
                });
            }
            let mut next: Vec<Interval> = Vec::with_capacity(needed as usize);
            for m in &self.maps {
                next.extend(intervals.iter().map(|iv| m.image(iv)));
            }
            intervals = merge_intervals(next, gap);
        }
        Ok(IntervalCover {
            depth,
            intervals,
            max_diameter: self.max_scale().powi(depth as i32) * self.ambient.diam(),
        })
    }
}

/// Sorts and coalesces intervals whose gap is below `gap`.
pub fn merge_intervals(mut v: Vec<Interval>, gap: f64) -> Vec<Interval> {
    v.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut out: Vec<Interval> = Vec::with_capacity(v.len());
    for iv in v {
        match out.last_mut() {
            Some(last) if iv.lo - last.hi < gap => last.hi = last.hi.max(iv.hi),
            _ => out.push(iv),
        }
    }
    out
}

/// Smallest interval `H` with `φ_i(H) ⊆ H` for all `i`, by iterating
/// `H ← hull(∪ φ_i(H))` from the hull of the fixed points.
pub fn attractor_hull(maps: &[SimilarityMap]) -> Interval {
    let fps = maps.iter().map(SimilarityMap::fixed_point);
    let mut lo = fps.clone().fold(f64::INFINITY, f64::min);
    let mut hi = fps.fold(f64::NEG_INFINITY, f64::max);
    let max_scale = maps.iter().map(SimilarityMap::scale).fold(0.0, f64::max);
    // Iterates grow monotonically towards the hull; the remaining distance
    // after a step of size δ is at most δ·r/(1−r).
    for _ in 0..100_000 {
        let cur = Interval { lo, hi };
        let (mut nlo, mut nhi) = (lo, hi);
        for m in maps {
            let img = m.image(&cur);
            nlo = nlo.min(img.lo);
            nhi = nhi.max(img.hi);
        }
        let step = (lo - nlo).max(nhi - hi);
        lo = nlo;
        hi = nhi;
        if step <= 1e-12 * (hi - lo).max(1.0) {
            let pad = step * max_scale / (1.0 - max_scale);
            return Interval {
                lo: lo - pad,
                hi: hi + pad,
            };
        }
    }
    Interval { lo, hi }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> IfsSystem {
        IfsSystem::bernoulli_convolution(0.5).unwrap()
    }

    #[test]
    fn compose_single_symbol() {
        let m = half().compose(&Word::new(vec![0])).unwrap();
        assert_eq!(m.ratio(), 0.5);
        assert_eq!(m.translation(), -1.0);
    }

    #[test]
    fn compose_empty_is_identity() {
        let m = half().compose(&Word::empty()).unwrap();
        assert_eq!(m, SimilarityMap::identity());
        assert_eq!(half().compose_reversed(&Word::empty()).unwrap(), m);
    }

    #[test]
    fn compose_two_symbols_by_hand() {
        let sys = half();
        let w = Word::new(vec![0, 1]);
        let m = sys.compose(&w).unwrap();
        assert_eq!((m.ratio(), m.translation()), (0.25, -0.5));
        let r = sys.compose_reversed(&w).unwrap();
        assert_eq!((r.ratio(), r.translation()), (0.25, 0.5));
        // pointwise: φ₁(φ₂(x)) = (x/2 + 1)/2 − 1, φ₂(φ₁(x)) = (x/2 − 1)/2 + 1
        for k in 0..10 {
            let x = -2.0 + 0.4 * k as f64;
            assert!((m.apply(x) - ((x / 2.0 + 1.0) / 2.0 - 1.0)).abs() < 1e-15);
            assert!((r.apply(x) - ((x / 2.0 - 1.0) / 2.0 + 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn invalid_symbol_rejected() {
        let err = half().compose(&Word::new(vec![0, 2])).unwrap_err();
        assert_eq!(
            err,
            Error::InvalidWord {
                symbol: 2,
                position: 1,
                alphabet: 2
            }
        );
        assert!(half().compose_reversed(&Word::new(vec![5])).is_err());
    }

    #[test]
    fn rejects_non_contractions() {
        assert!(SimilarityMap::new(1.0, 0.0).is_err());
        assert!(SimilarityMap::new(0.0, 0.0).is_err());
        assert!(SimilarityMap::new(-1.2, 0.0).is_err());
        assert!(SimilarityMap::new(-0.5, 0.0).is_ok());
    }

    #[test]
    fn rejects_maps_leaving_ambient() {
        let maps = vec![
            SimilarityMap::new(0.5, 0.0).unwrap(),
            SimilarityMap::new(0.5, 0.75).unwrap(),
        ];
        assert!(IfsSystem::new(maps.clone(), Interval::new(0.0, 1.0).unwrap()).is_err());
        let sys = IfsSystem::with_hull(maps).unwrap();
        assert!((sys.ambient().lo - 0.0).abs() < 1e-10);
        assert!((sys.ambient().hi - 1.5).abs() < 1e-10);
    }

    #[test]
    fn single_map_rejected() {
        let maps = vec![SimilarityMap::new(0.5, 0.0).unwrap()];
        assert!(IfsSystem::new(maps, Interval::new(-1.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn hull_with_reflection() {
        // φ₁(x) = −x/2, φ₂(x) = x/2 + 1: hull is [−1, 2]... solve by iteration
        let maps = vec![
            SimilarityMap::new(-0.5, 0.0).unwrap(),
            SimilarityMap::new(0.5, 1.0).unwrap(),
        ];
        let h = attractor_hull(&maps);
        // lo = −hi/2, hi = hi/2 + 1 ⟹ hi = 2, lo = −1
        assert!((h.lo + 1.0).abs() < 1e-10, "{h:?}");
        assert!((h.hi - 2.0).abs() < 1e-10, "{h:?}");
        assert!(IfsSystem::new(maps, h).is_ok());
    }

    #[test]
    fn pi_point_fixed_point() {
        let sys = half();
        let w = Word::new(vec![1; 20]);
        let (p, err) = sys.pi_point(&w, 0.0).unwrap();
        assert_eq!(err, 0.5f64.powi(20) * 4.0);
        assert!((p - 2.0).abs() <= err);
        assert!(sys.pi_point(&w, 3.0).is_err());
        assert!(sys.pi_point(&Word::empty(), 0.0).is_err());
    }

    #[test]
    fn cover_depth_zero_and_one() {
        let c = IfsSystem::cantor_middle_thirds();
        assert_eq!(c.limit_set_cover(0).unwrap().intervals, vec![c.ambient()]);
        let c1 = c.limit_set_cover(1).unwrap();
        assert_eq!(c1.intervals.len(), 2);
        assert!((c1.intervals[0].hi - 1.0 / 3.0).abs() < 1e-15);
        assert!((c1.intervals[1].lo - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(c1.intervals[1].hi, 1.0);
        assert!(c1.contains(0.2, 0.0));
        assert!(!c1.contains(0.5, 0.0));
        assert!(c1.contains(0.34, 0.01));
    }

    #[test]
    fn bernoulli_convolution_cover_is_interval() {
        let lambda = 0.7;
        let sys = IfsSystem::bernoulli_convolution(lambda).unwrap();
        let half = 1.0 / (1.0 - lambda);
        for depth in 0..12 {
            let cov = sys.limit_set_cover(depth).unwrap();
            assert_eq!(cov.intervals.len(), 1, "depth {depth}");
            assert!((cov.intervals[0].lo + half).abs() < 1e-12);
            assert!((cov.intervals[0].hi - half).abs() < 1e-12);
        }
    }

    #[test]
    fn cover_budget() {
        let c = IfsSystem::cantor_middle_thirds();
        assert_eq!(c.limit_set_cover(20).unwrap().intervals.len(), 1 << 20);
        assert!(matches!(
            c.limit_set_cover(21),
            Err(Error::CoverBudget { depth: 21, .. })
        ));
        assert!(c.limit_set_cover_with_budget(5, 16).is_err());
    }

    #[test]
    fn strong_separation() {
        assert!(IfsSystem::cantor_middle_thirds().strongly_separated());
        assert!(!half().strongly_separated());
        assert!(!IfsSystem::bernoulli_convolution(0.8)
            .unwrap()
            .strongly_separated());
        assert!(IfsSystem::bernoulli_convolution(0.4)
            .unwrap()
            .strongly_separated());
    }

    #[test]
    fn word_index_roundtrip() {
        assert_eq!(Word::from_index(6, 3, 2).symbols(), &[1, 1, 0]);
        assert_eq!(Word::from_index(0, 2, 3).symbols(), &[0, 0]);
        assert_eq!(Word::new(vec![0, 1, 2]).to_string(), "0.1.2");
    }
}
