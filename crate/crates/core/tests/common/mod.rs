//! Test-only oracles, independent of the library's search code.
#![allow(dead_code)]

use ifsdim::{IfsSystem, Interval, SimilarityMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GAP: f64 = 1e-12;

/// Affine map as a plain `(ratio, translation)` pair.
#[derive(Clone, Copy)]
struct Affine(f64, f64);

impl Affine {
    fn apply(self, x: f64) -> f64 {
        self.0 * x + self.1
    }
    /// `self ∘ inner`
    fn after(self, inner: Affine) -> Affine {
        Affine(self.0 * inner.0, self.0 * inner.1 + self.1)
    }
}

/// Brute-force overlap count: enumerates every `η ∈ Iⁿ`, forms the forward
/// image `φ_{ηₙ}∘…∘φ_{η₁}(J)` of each cover interval `J` and tests whether
/// `z` lies within the slack of one of them.
pub fn exhaustive_count(
    sys: &IfsSystem,
    cover: &[Interval],
    word: &[usize],
    base: f64,
    base_error: f64,
    tau: Option<f64>,
    probs: Option<&[f64]>,
) -> u64 {
    let maps: Vec<Affine> = sys
        .maps()
        .iter()
        .map(|m| Affine(m.ratio(), m.translation()))
        .collect();
    let d = maps.len();
    let n = word.len();
    let diam = sys.ambient().hi - sys.ambient().lo;

    let mut z = base;
    let mut word_scale = 1.0;
    for &s in word {
        z = maps[s].apply(z);
        word_scale *= maps[s].0.abs();
    }
    let magnitude = sys.ambient().lo.abs().max(sys.ambient().hi.abs());
    let slack =
        word_scale * (base_error + GAP * diam) + 4.0 * (n + 1) as f64 * f64::EPSILON * magnitude;

    let filter = match (tau, probs) {
        (Some(t), Some(p)) if t.is_finite() && t > 0.0 => {
            let h: f64 = -p.iter().map(|q| q * q.ln()).sum::<f64>();
            Some((t, h, p.iter().map(|q| q.ln()).collect::<Vec<_>>()))
        }
        _ => None,
    };

    let total = (d as u64).pow(n as u32);
    let mut count = 0;
    let mut eta = vec![0usize; n];
    for idx in 0..total {
        let mut rest = idx;
        for slot in eta.iter_mut().rev() {
            *slot = (rest % d as u64) as usize;
            rest /= d as u64;
        }
        if let Some((t, h, lp)) = &filter {
            let mean: f64 = eta.iter().map(|&s| lp[s]).sum::<f64>() / n as f64;
            if eta != word && (mean + h).abs() >= *t {
                continue;
            }
        }
        // φ_{ηₙ} ∘ … ∘ φ_{η₁}: η₁ innermost
        let m = eta
            .iter()
            .fold(Affine(1.0, 0.0), |acc, &s| maps[s].after(acc));
        // images of a sorted cover are sorted, reversed when the ratio is negative
        let image = |k: usize| {
            let iv = if m.0 > 0.0 {
                cover[k]
            } else {
                cover[cover.len() - 1 - k]
            };
            let (a, b) = (m.apply(iv.lo), m.apply(iv.hi));
            (a.min(b), a.max(b))
        };
        let k = partition(cover.len(), |k| image(k).1 + slack < z);
        let hit = k < cover.len() && image(k).0 - slack <= z;
        if hit {
            count += 1;
        }
    }
    count
}

/// First index in `0..len` where `before` turns false.
fn partition(len: usize, before: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, len);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if before(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Random two-map system with ratios of random sign and size in [0.3, 0.85].
pub fn random_system(rng: &mut ChaCha8Rng) -> IfsSystem {
    loop {
        let maps: Vec<SimilarityMap> = (0..2)
            .map(|_| {
                let r =
                    rng.random_range(0.3..0.85) * if rng.random_bool(0.25) { -1.0 } else { 1.0 };
                SimilarityMap::new(r, rng.random_range(-2.0..2.0)).unwrap()
            })
            .collect();
        if let Ok(sys) = IfsSystem::with_hull(maps) {
            if sys.ambient().hi - sys.ambient().lo > 1e-3 {
                return sys;
            }
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
