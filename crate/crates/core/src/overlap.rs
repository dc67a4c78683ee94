//! Counting order-`n` overlaps and estimating the folding entropy.
//!
//! For a reference pair `(ω, x)` put `z = φ_{ωₙ…ω₁}(x)`. The overlap count
//! `b_n` is the number of words `η ∈ Iⁿ` with `z ∈ φ_{ηₙ…η₁}(Λ)`, optionally
//! restricted to words whose empirical log-likelihood `(1/n) Σ log p_{η_k}`
//! lies within `τ` of `Σ p_i log p_i`.
//!
//! Membership in `φ_{ηₙ…η₁}(Λ)` is decided against a finite outer cover `C` of
//! `Λ`, dilated by a slack that absorbs the truncation error of `x`. Because
//! the composition is order reversed, the search peels the **last** symbol
//! first: `z ∈ φ_{ηₙ}(φ_{ηₙ₋₁…η₁}(C))` iff `φ_{ηₙ}⁻¹(z) ∈ φ_{ηₙ₋₁…η₁}(C)`, and
//! since `φ_i(C) ⊆ C` every intermediate preimage must itself lie in `C`.
//! That necessary condition is the pruning rule; the leaf test (all `n`
//! symbols peeled) is the exact one.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ifs::{IfsSystem, IntervalCover, Word, COALESCE_GAP};
use crate::measures::{depth_for_resolution, sample_point, BernoulliSpec};
use crate::rng::{Purpose, SampleStream};
use crate::stats::{fit_line, mean_and_stderr};

/// Default cap on DFS node expansions per query.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// Rounding allowance per inversion, in units of `ε·max|V|`.
pub const ROUNDING_ULPS: f64 = 4.0;

/// Genericity tolerances used for non-uniform measures when none are given.
pub const DEFAULT_TAU_GRID: [Option<f64>; 4] = [None, Some(0.5), Some(0.2), Some(0.1)];

/// Normalises a tolerance: `0`, negative, infinite or absent mean "no filter".
pub fn effective_tau(tau: Option<f64>) -> Option<f64> {
    tau.filter(|t| t.is_finite() && *t > 0.0)
}

/// Arguments of one overlap count.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapQuery {
    /// Reference word `ω₁…ωₙ`.
    pub word: Word,
    /// Base point `x`, an approximation of a point of `Λ`.
    pub base_point: f64,
    /// Distance bound between `base_point` and `Λ` (e.g. a truncation error).
    pub base_error: f64,
    pub tau: Option<f64>,
    pub cover_depth: usize,
}

/// Result of one overlap count.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapCount {
    pub b_n: u64,
    /// DFS nodes expanded.
    pub nodes: u64,
    /// Accepted words `η₁…ηₙ`, when requested.
    pub witnesses: Option<Vec<Word>>,
}

/// Reusable counter bound to one system, cover and measure.
#[derive(Debug, Clone)]
pub struct OverlapCounter<'a> {
    sys: &'a IfsSystem,
    cover: IntervalCover,
    probs: Option<&'a BernoulliSpec>,
    node_budget: u64,
    collect_witnesses: bool,
}

struct Frame {
    point: f64,
    slack: f64,
    /// Symbols still to peel.
    remaining: usize,
    log_prob: f64,
    on_reference: bool,
    symbol: usize,
}

impl<'a> OverlapCounter<'a> {
    pub fn new(
        sys: &'a IfsSystem,
        cover_depth: usize,
        probs: Option<&'a BernoulliSpec>,
    ) -> Result<Self> {
        if let Some(p) = probs {
            if p.len() != sys.alphabet_size() {
                return Err(Error::AlphabetMismatch {
                    system: sys.alphabet_size(),
                    probs: p.len(),
                });
            }
        }
        Ok(OverlapCounter {
            sys,
            cover: sys.limit_set_cover(cover_depth)?,
            probs,
            node_budget: DEFAULT_NODE_BUDGET,
            collect_witnesses: false,
        })
    }

    pub fn with_node_budget(mut self, budget: u64) -> Self {
        self.node_budget = budget;
        self
    }

    pub fn with_witnesses(mut self, collect: bool) -> Self {
        self.collect_witnesses = collect;
        self
    }

    pub fn cover(&self) -> &IntervalCover {
        &self.cover
    }

    /// Slack at the reference point `z` of a length-`n` word, in `z`
    /// coordinates: the pushed-forward base slack plus a rounding allowance
    /// for the `n` inversions, which amplify absolute errors by `1/|r|`.
    pub fn slack_at_image(&self, word_scale: f64, base_error: f64, n: usize) -> f64 {
        let v = self.sys.ambient();
        let magnitude = v.lo.abs().max(v.hi.abs());
        word_scale * (base_error + COALESCE_GAP * v.diam())
            + ROUNDING_ULPS * (n + 1) as f64 * f64::EPSILON * magnitude
    }

    /// Counts `b_n` for reference word `word` and base point `base`.
    pub fn count(
        &self,
        word: &Word,
        base: f64,
        base_error: f64,
        tau: Option<f64>,
    ) -> Result<OverlapCount> {
        let n = word.len();
        if n == 0 {
            return Err(Error::InvalidParameter(
                "reference word must be nonempty".into(),
            ));
        }
        if !(base_error >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "base error {base_error} must be >= 0"
            )));
        }
        let reference = self.sys.compose_reversed(word)?;
        let base_slack = base_error + COALESCE_GAP * self.sys.ambient().diam();
        if !self.cover.contains(base, base_slack) {
            return Err(Error::Domain {
                value: base,
                domain: format!("depth-{} cover of the limit set", self.cover.depth),
            });
        }

        let filter = match (effective_tau(tau), self.probs) {
            (Some(t), Some(p)) => Some(GenericityFilter::new(p, t, n)),
            _ => None,
        };

        let maps = self.sys.maps();
        let d = maps.len();
        let inv_scales: Vec<f64> = maps.iter().map(|m| 1.0 / m.scale()).collect();
        let symbols = word.symbols();

        let mut path = vec![0usize; n];
        let mut witnesses = self.collect_witnesses.then(Vec::new);
        let mut count: u64 = 0;
        let mut nodes: u64 = 0;
        let mut stack = vec![Frame {
            point: reference.apply(base),
            slack: self.slack_at_image(reference.scale(), base_error, n),
            remaining: n,
            log_prob: 0.0,
            on_reference: true,
            symbol: usize::MAX,
        }];

        while let Some(frame) = stack.pop() {
            if nodes >= self.node_budget {
                stack.push(frame);
                let upper = stack.iter().fold(count, |acc, f| {
                    acc.saturating_add((d as u64).saturating_pow(f.remaining as u32))
                });
                return Err(Error::NodeBudget {
                    budget: self.node_budget,
                    lower: count,
                    upper,
                });
            }
            nodes += 1;
            let level = n - frame.remaining;
            if level > 0 {
                path[level - 1] = frame.symbol;
            }
            if frame.remaining == 0 {
                // the geometric test already passed when the frame was pushed
                let generic =
                    frame.on_reference || filter.as_ref().is_none_or(|f| f.accepts(frame.log_prob));
                if generic {
                    count += 1;
                    if let Some(w) = witnesses.as_mut() {
                        w.push(Word::new(path.iter().rev().copied().collect()));
                    }
                }
                continue;
            }
            let ref_symbol = symbols[frame.remaining - 1];
            // push in reverse so symbol 0 is expanded first
            for j in (0..d).rev() {
                let point = maps[j].invert(frame.point);
                let slack = frame.slack * inv_scales[j];
                if !self.cover.contains(point, slack) {
                    continue;
                }
                let on_reference = frame.on_reference && j == ref_symbol;
                let log_prob = match &filter {
                    Some(f) => {
                        let lp = frame.log_prob + f.log_probs[j];
                        if !on_reference && !f.reachable(lp, frame.remaining - 1) {
                            continue;
                        }
                        lp
                    }
                    None => 0.0,
                };
                stack.push(Frame {
                    point,
                    slack,
                    remaining: frame.remaining - 1,
                    log_prob,
                    on_reference,
                    symbol: j,
                });
            }
        }
        Ok(OverlapCount {
            b_n: count,
            nodes,
            witnesses,
        })
    }
}

/// `|(1/n) Σ log p_{η_k} − Σ p_i log p_i| < τ`, with a reachability bound for
/// partial sums.
struct GenericityFilter {
    log_probs: Vec<f64>,
    min_lp: f64,
    max_lp: f64,
    target: f64,
    tau: f64,
    n: f64,
}

impl GenericityFilter {
    fn new(p: &BernoulliSpec, tau: f64, n: usize) -> Self {
        let log_probs = p.log_probs();
        GenericityFilter {
            min_lp: log_probs.iter().copied().fold(f64::INFINITY, f64::min),
            max_lp: log_probs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            log_probs,
            target: -p.entropy(),
            tau,
            n: n as f64,
        }
    }

    fn accepts(&self, log_prob: f64) -> bool {
        (log_prob / self.n - self.target).abs() < self.tau
    }

    /// Some completion of the partial sum with `remaining` symbols can pass.
    fn reachable(&self, partial: f64, remaining: usize) -> bool {
        let lo = (partial + remaining as f64 * self.min_lp) / self.n;
        let hi = (partial + remaining as f64 * self.max_lp) / self.n;
        lo < self.target + self.tau && hi > self.target - self.tau
    }
}

/// One-shot count for a query.
pub fn count_overlaps(
    sys: &IfsSystem,
    q: &OverlapQuery,
    p: Option<&BernoulliSpec>,
) -> Result<OverlapCount> {
    OverlapCounter::new(sys, q.cover_depth, p)?
        .with_witnesses(true)
        .count(&q.word, q.base_point, q.base_error, q.tau)
}

/// Parameters of an overlap series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesParams {
    pub n_min: usize,
    pub n_max: usize,
    pub n_samples: usize,
    pub cover_depth: usize,
    pub node_budget: u64,
    /// Truncation error of sampled base points, relative to `diam(V)`.
    pub base_resolution: f64,
}

impl Default for SeriesParams {
    fn default() -> Self {
        SeriesParams {
            n_min: 2,
            n_max: 18,
            n_samples: 200,
            cover_depth: 10,
            node_budget: DEFAULT_NODE_BUDGET,
            base_resolution: 1e-9,
        }
    }
}

impl SeriesParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_min < 2 {
            return Err(Error::InvalidParameter(format!(
                "n_min must be >= 2, got {}",
                self.n_min
            )));
        }
        if self.n_max < self.n_min + 3 {
            return Err(Error::InvalidParameter(format!(
                "n_max must be >= n_min + 3, got n_min = {}, n_max = {}",
                self.n_min, self.n_max
            )));
        }
        if self.n_max >= 64 {
            return Err(Error::InvalidParameter(format!(
                "n_max must be < 64, got {}",
                self.n_max
            )));
        }
        if self.n_samples < 10 {
            return Err(Error::InvalidParameter(format!(
                "n_samples must be >= 10, got {}",
                self.n_samples
            )));
        }
        if self.node_budget == 0 {
            return Err(Error::InvalidParameter(
                "node budget must be positive".into(),
            ));
        }
        if !(self.base_resolution > 0.0 && self.base_resolution < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "base resolution must lie in (0, 1), got {}",
                self.base_resolution
            )));
        }
        Ok(())
    }
}

/// A sample whose count exceeded the node budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BudgetFailure {
    pub n: usize,
    pub sample: usize,
    pub lower: u64,
    pub upper: u64,
}

/// Monte Carlo statistics of `log b_n` over a range of `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapSeries {
    /// `None` means no genericity filter.
    pub tau: Option<f64>,
    pub n_values: Vec<usize>,
    pub mean_log_b: Vec<f64>,
    pub stderr: Vec<f64>,
    pub samples_ok: Vec<usize>,
    pub samples_failed: Vec<usize>,
    /// Growth rate clamped to `[0, log d]`.
    pub rate_estimate: f64,
    /// Unclamped least-squares slope.
    pub rate_raw: f64,
    pub rate_stderr: f64,
    pub rate_method: String,
    pub failures: Vec<BudgetFailure>,
    pub alphabet_size: usize,
}

impl OverlapSeries {
    pub fn total_failed(&self) -> usize {
        self.samples_failed.iter().sum()
    }

    pub fn rate_clamped(&self) -> bool {
        self.rate_raw != self.rate_estimate
    }
}

/// Draws the reference pair for `(n, sample)`: `ω` from `ν_p` and `x` from
/// `π_*ν_p` on independent streams.
///
/// Streams are indexed by `sample` alone, so for a fixed sample the words for
/// increasing `n` are prefixes of one sequence and `x` is shared: the queries
/// follow a single orbit `Φⁿ(ω, x)` of the skew product.
pub fn sample_query(
    sys: &IfsSystem,
    p: &BernoulliSpec,
    seed: u64,
    n: usize,
    sample: usize,
    base_depth: usize,
) -> (Word, f64, f64) {
    let mut word_stream = SampleStream::new(seed, Purpose::OverlapWord, sample as u64);
    let word = Word::new((0..n).map(|_| word_stream.next_symbol(p)).collect());
    let mut base_stream = SampleStream::new(seed, Purpose::OverlapBase, sample as u64);
    let base = sample_point(sys, p, &mut base_stream, base_depth);
    (word, base.point, base.error_bound)
}

/// Per-`n` statistics of `log b_n` and the extrapolated growth rate.
///
/// The rate is the least-squares slope of `mean_log_b` against `n` over the
/// upper half of the `n` range, which cancels additive constants in
/// `log b_n`.
pub fn overlap_series(
    sys: &IfsSystem,
    p: &BernoulliSpec,
    tau: Option<f64>,
    params: &SeriesParams,
    seed: u64,
) -> Result<OverlapSeries> {
    let mut grid = overlap_grid(sys, p, &[tau], params, seed)?;
    Ok(grid.series.remove(0))
}

/// Series for several tolerances over the same sampled queries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapGrid {
    pub series: Vec<OverlapSeries>,
    /// Index of the series used for the headline overlap number.
    pub headline: usize,
    /// Whether the headline tolerance met the stabilisation rule.
    pub stabilized: bool,
}

impl OverlapGrid {
    pub fn headline(&self) -> &OverlapSeries {
        &self.series[self.headline]
    }
}

/// Runs every tolerance in `taus` on one shared set of sampled queries.
///
/// The headline series is the unfiltered one for the uniform measure.
/// Otherwise tolerances are visited from largest to smallest and the headline
/// is the smallest `τ` whose rate differs from the previous tolerance's rate
/// by less than its own slope standard error.
pub fn overlap_grid(
    sys: &IfsSystem,
    p: &BernoulliSpec,
    taus: &[Option<f64>],
    params: &SeriesParams,
    seed: u64,
) -> Result<OverlapGrid> {
    params.validate()?;
    if taus.is_empty() {
        return Err(Error::InvalidParameter("empty tolerance grid".into()));
    }
    let counter =
        OverlapCounter::new(sys, params.cover_depth, Some(p))?.with_node_budget(params.node_budget);
    let base_depth = depth_for_resolution(sys, params.base_resolution * sys.ambient().diam());
    let n_values: Vec<usize> = (params.n_min..=params.n_max).collect();
    let cells: Vec<(usize, usize)> = n_values
        .iter()
        .flat_map(|&n| (0..params.n_samples).map(move |s| (n, s)))
        .collect();

    // one result per (cell, tau); collect preserves cell order
    let results: Vec<Vec<Result<u64>>> = cells
        .par_iter()
        .map(|&(n, s)| {
            let (word, base, err) = sample_query(sys, p, seed, n, s, base_depth);
            taus.iter()
                .map(|&tau| counter.count(&word, base, err, tau).map(|c| c.b_n))
                .collect()
        })
        .collect();

    let mut series = Vec::with_capacity(taus.len());
    for (t, &tau) in taus.iter().enumerate() {
        // log_b[k][s] for n = n_values[k], sample s; None when over budget
        let mut log_b = Vec::with_capacity(n_values.len());
        let mut failures = Vec::new();
        for (k, &n) in n_values.iter().enumerate() {
            let row = &results[k * params.n_samples..(k + 1) * params.n_samples];
            let mut logs = Vec::with_capacity(params.n_samples);
            for (s, r) in row.iter().enumerate() {
                match &r[t] {
                    Ok(b) => logs.push(Some((*b as f64).ln())),
                    Err(Error::NodeBudget { lower, upper, .. }) => {
                        failures.push(BudgetFailure {
                            n,
                            sample: s,
                            lower: *lower,
                            upper: *upper,
                        });
                        logs.push(None);
                    }
                    Err(e) => return Err(e.clone()),
                }
            }
            log_b.push(logs);
        }
        series.push(finish_series(
            tau,
            n_values.clone(),
            &log_b,
            failures,
            sys.alphabet_size(),
            params.node_budget,
        )?);
    }

    let (headline, stabilized) = select_headline(taus, &series, p.is_uniform());
    Ok(OverlapGrid {
        series,
        headline,
        stabilized,
    })
}

/// Aggregates per-`n` statistics and fits the rate.
///
/// The rate standard error comes from per-sample slopes, since one sample
/// contributes to every `n`.
fn finish_series(
    tau: Option<f64>,
    n_values: Vec<usize>,
    log_b: &[Vec<Option<f64>>],
    failures: Vec<BudgetFailure>,
    alphabet_size: usize,
    node_budget: u64,
) -> Result<OverlapSeries> {
    let mut mean_log_b = Vec::with_capacity(n_values.len());
    let mut stderr = Vec::with_capacity(n_values.len());
    let mut samples_ok = Vec::with_capacity(n_values.len());
    let mut samples_failed = Vec::with_capacity(n_values.len());
    for row in log_b {
        let ok: Vec<f64> = row.iter().flatten().copied().collect();
        let (m, se) = mean_and_stderr(&ok);
        mean_log_b.push(m);
        stderr.push(se);
        samples_ok.push(ok.len());
        samples_failed.push(row.len() - ok.len());
    }

    let upper_half = n_values.len() / 2;
    let usable: Vec<usize> = (upper_half..n_values.len())
        .filter(|&k| samples_ok[k] >= 2)
        .collect();
    let xs: Vec<f64> = usable.iter().map(|&k| n_values[k] as f64).collect();
    let ys: Vec<f64> = usable.iter().map(|&k| mean_log_b[k]).collect();
    let fit = fit_line(&xs, &ys).ok_or_else(|| Error::NodeBudget {
        budget: node_budget,
        lower: failures.iter().map(|f| f.lower).min().unwrap_or(0),
        upper: failures.iter().map(|f| f.upper).max().unwrap_or(0),
    })?;

    let n_samples = log_b.first().map_or(0, Vec::len);
    let per_sample: Vec<f64> = (0..n_samples)
        .filter_map(|s| {
            let ys: Option<Vec<f64>> = usable.iter().map(|&k| log_b[k][s]).collect();
            fit_line(&xs, &ys?).map(|f| f.slope)
        })
        .collect();
    let (_, rate_stderr) = mean_and_stderr(&per_sample);

    let log_d = (alphabet_size as f64).ln();
    let rate_raw = fit.slope;
    Ok(OverlapSeries {
        tau: effective_tau(tau),
        rate_estimate: rate_raw.clamp(0.0, log_d),
        rate_raw,
        rate_stderr,
        rate_method: format!(
            "least-squares slope of mean log b_n over n = {}..={}",
            xs.first().copied().unwrap_or(f64::NAN),
            xs.last().copied().unwrap_or(f64::NAN)
        ),
        n_values,
        mean_log_b,
        stderr,
        samples_ok,
        samples_failed,
        failures,
        alphabet_size,
    })
}

fn select_headline(taus: &[Option<f64>], series: &[OverlapSeries], uniform: bool) -> (usize, bool) {
    let unfiltered = taus.iter().position(|t| effective_tau(*t).is_none());
    if uniform {
        if let Some(k) = unfiltered {
            return (k, true);
        }
    }
    // visit from largest tolerance (no filter counts as +∞) to smallest
    let key = |k: usize| effective_tau(taus[k]).unwrap_or(f64::INFINITY);
    let mut order: Vec<usize> = (0..taus.len()).collect();
    order.sort_by(|&a, &b| key(b).total_cmp(&key(a)));
    let mut best = None;
    for pair in order.windows(2) {
        let (prev, cur) = (&series[pair[0]], &series[pair[1]]);
        if (cur.rate_estimate - prev.rate_estimate).abs() < cur.rate_stderr {
            best = Some(pair[1]);
        }
    }
    match best {
        Some(k) => (k, true),
        None => (*order.last().unwrap(), order.len() == 1),
    }
}

/// Folding entropy `F = log o` read off a series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FoldingEntropy {
    pub entropy: f64,
    pub overlap_number: f64,
}

pub fn folding_entropy(series: &OverlapSeries) -> FoldingEntropy {
    FoldingEntropy {
        entropy: series.rate_estimate,
        overlap_number: series.rate_estimate.exp(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_word_always_counted() {
        let sys = IfsSystem::bernoulli_convolution(0.75).unwrap();
        let p = BernoulliSpec::uniform(2).unwrap();
        let counter = OverlapCounter::new(&sys, 0, Some(&p))
            .unwrap()
            .with_witnesses(true);
        let w = Word::new(vec![0, 1, 1, 0, 1]);
        let c = counter.count(&w, 0.3, 0.0, None).unwrap();
        assert!(c.b_n >= 1);
        assert!(c.witnesses.unwrap().contains(&w));
    }

    #[test]
    fn empty_word_rejected() {
        let sys = IfsSystem::cantor_middle_thirds();
        let counter = OverlapCounter::new(&sys, 3, None).unwrap();
        assert!(counter.count(&Word::empty(), 0.0, 0.0, None).is_err());
    }

    #[test]
    fn base_outside_cover_rejected() {
        let sys = IfsSystem::cantor_middle_thirds();
        let counter = OverlapCounter::new(&sys, 3, None).unwrap();
        let w = Word::new(vec![0, 1]);
        assert!(matches!(
            counter.count(&w, 0.5, 0.0, None),
            Err(Error::Domain { .. })
        ));
        assert!(counter.count(&w, 0.5, 0.2, None).is_ok());
    }

    #[test]
    fn full_collapse_counts_everything() {
        // both maps share the interval image up to the slack: φ₁ = φ₂ up to 1e-15
        let sys = IfsSystem::new(
            vec![
                crate::ifs::SimilarityMap::new(0.5, 0.0).unwrap(),
                crate::ifs::SimilarityMap::new(0.5, 1e-15).unwrap(),
            ],
            crate::ifs::Interval::new(-1.0, 1.0).unwrap(),
        )
        .unwrap();
        let counter = OverlapCounter::new(&sys, 0, None).unwrap();
        let c = counter
            .count(&Word::new(vec![0; 8]), 0.1, 0.0, None)
            .unwrap();
        assert_eq!(c.b_n, 256);
    }

    #[test]
    fn node_budget_brackets() {
        let sys = IfsSystem::bernoulli_convolution(0.95).unwrap();
        let counter = OverlapCounter::new(&sys, 0, None)
            .unwrap()
            .with_node_budget(50);
        let w = Word::new(vec![0; 16]);
        match counter.count(&w, 0.0, 0.0, None) {
            Err(Error::NodeBudget {
                lower,
                upper,
                budget,
            }) => {
                assert_eq!(budget, 50);
                assert!(lower <= upper);
                let exact = OverlapCounter::new(&sys, 0, None)
                    .unwrap()
                    .count(&w, 0.0, 0.0, None)
                    .unwrap()
                    .b_n;
                assert!(lower <= exact && exact <= upper, "{lower} {exact} {upper}");
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn tau_normalisation() {
        assert_eq!(effective_tau(None), None);
        assert_eq!(effective_tau(Some(0.0)), None);
        assert_eq!(effective_tau(Some(f64::INFINITY)), None);
        assert_eq!(effective_tau(Some(0.2)), Some(0.2));
    }

    #[test]
    fn series_param_validation() {
        let ok = SeriesParams::default();
        assert!(ok.validate().is_ok());
        assert!(SeriesParams {
            n_min: 1,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(SeriesParams {
            n_max: 4,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(SeriesParams {
            n_samples: 9,
            ..ok.clone()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn folding_entropy_trivial() {
        let s = OverlapSeries {
            tau: None,
            n_values: vec![],
            mean_log_b: vec![],
            stderr: vec![],
            samples_ok: vec![],
            samples_failed: vec![],
            rate_estimate: 0.0,
            rate_raw: 0.0,
            rate_stderr: 0.0,
            rate_method: String::new(),
            failures: vec![],
            alphabet_size: 2,
        };
        let f = folding_entropy(&s);
        assert_eq!((f.entropy, f.overlap_number), (0.0, 1.0));
        let f = folding_entropy(&OverlapSeries {
            rate_estimate: 2f64.ln(),
            ..s
        });
        assert!((f.overlap_number - 2.0).abs() < 1e-15);
    }
}
