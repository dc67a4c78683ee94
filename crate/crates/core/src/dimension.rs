//! Pointwise-dimension formulas and an empirical ball-count estimator.
//!
//! For a Bernoulli measure with entropy `h`, Lyapunov exponent `χ < 0` and
//! folding entropy `F = log o`, the pointwise dimension of the projected
//! measure is `(h − F)/|χ|` and its projection entropy is `h − log o`, so
//! `h_π / |χ|` reproduces the dimension exactly.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ifs::IfsSystem;
use crate::measures::{depth_for_resolution, sample_points, BernoulliSpec};
use crate::overlap::{folding_entropy, overlap_grid, OverlapGrid, SeriesParams, DEFAULT_TAU_GRID};
use crate::rng::Purpose;
use crate::stats::{fit_line, mean_and_stderr};

/// Raw dimensions above `1 + OVER_UNITY_TOL` are flagged.
pub const OVER_UNITY_TOL: f64 = 1e-9;

/// Clamps a folding entropy estimate into `[0, h]`; the flag reports clamping.
pub fn clamp_folding_entropy(h: f64, f: f64) -> (f64, bool) {
    let c = f.clamp(0.0, h);
    (c, c != f)
}

/// `(h − F)/|χ|`, with `F` clamped into `[0, h]`.
pub fn dimension_formula(h: f64, folding: f64, chi_s: f64) -> Result<f64> {
    if !(chi_s < 0.0) {
        return Err(Error::InvalidExponent(chi_s));
    }
    let (f, _) = clamp_folding_entropy(h, folding);
    Ok((h - f) / -chi_s)
}

/// `h − log o`, for `o ∈ [1, d]`.
pub fn projection_entropy(h: f64, o: f64, alphabet_size: usize) -> Result<f64> {
    let max = alphabet_size as f64;
    if !(o >= 1.0 && o <= max) {
        return Err(Error::InvalidOverlap { value: o, max });
    }
    Ok(h - o.ln())
}

/// Dimension of a Bernoulli convolution from its overlap number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BcDimension {
    pub raw: f64,
    pub clamped: f64,
    pub over_unity: bool,
}

/// `log(2/o)/|log λ|` for `λ ∈ (½, 1)`, `o ∈ [1, 2]`.
pub fn bernoulli_convolution_dimension(lambda: f64, o: f64) -> Result<BcDimension> {
    if !(lambda > 0.5 && lambda < 1.0) {
        return Err(Error::Domain {
            value: lambda,
            domain: "(0.5, 1)".into(),
        });
    }
    if !(1.0..=2.0).contains(&o) {
        return Err(Error::InvalidOverlap { value: o, max: 2.0 });
    }
    let raw = (2.0 / o).ln() / lambda.ln().abs();
    Ok(BcDimension {
        raw,
        clamped: raw.min(1.0),
        over_unity: raw > 1.0 + OVER_UNITY_TOL,
    })
}

/// Geometric grid of radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusGrid {
    pub r_lo: f64,
    pub r_hi: f64,
    pub count: usize,
}

impl RadiusGrid {
    /// 16 points over two decades ending at `diam(V)/50`.
    pub fn default_for(sys: &IfsSystem) -> Self {
        let r_hi = sys.ambient().diam() / 50.0;
        RadiusGrid {
            r_lo: r_hi / 100.0,
            r_hi,
            count: 16,
        }
    }

    pub fn radii(&self) -> Vec<f64> {
        let ratio = (self.r_hi / self.r_lo).ln();
        (0..self.count)
            .map(|k| self.r_lo * (ratio * k as f64 / (self.count - 1) as f64).exp())
            .collect()
    }

    /// Checks `0 < r_lo < r_hi ≤ diam(V)/10` and `count ≥ 2`.
    pub fn validate(&self, sys: &IfsSystem) -> Result<()> {
        let cap = sys.ambient().diam() / 10.0;
        if !(self.r_lo > 0.0 && self.r_lo < self.r_hi && self.r_hi <= cap) {
            return Err(Error::InvalidParameter(format!(
                "radius grid must satisfy 0 < r_lo < r_hi <= diam(V)/10 = {cap}, got [{}, {}]",
                self.r_lo, self.r_hi
            )));
        }
        if self.count < 2 {
            return Err(Error::InvalidParameter(
                "radius grid needs at least 2 points".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalParams {
    pub n_points: usize,
    pub n_centers: usize,
    pub grid: RadiusGrid,
}

impl EmpiricalParams {
    pub fn default_for(sys: &IfsSystem) -> Self {
        EmpiricalParams {
            n_points: 1_000_000,
            n_centers: 200,
            grid: RadiusGrid::default_for(sys),
        }
    }

    pub fn validate(&self, sys: &IfsSystem) -> Result<()> {
        if self.n_points < 10_000 {
            return Err(Error::InvalidParameter(format!(
                "n_points must be >= 10^4, got {}",
                self.n_points
            )));
        }
        if self.n_centers < 30 {
            return Err(Error::InvalidParameter(format!(
                "n_centers must be >= 30, got {}",
                self.n_centers
            )));
        }
        self.grid.validate(sys)
    }

    /// Sampling depth that keeps truncation error below `r_lo / 10`.
    pub fn sample_depth(&self, sys: &IfsSystem) -> usize {
        depth_for_resolution(sys, self.grid.r_lo / 10.0)
    }
}

/// Ball counts around one center.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenterProfile {
    pub center: f64,
    pub counts: Vec<u64>,
    /// Regression slope of `log ν(B(x, r))` against `log r`.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalDimension {
    pub mean_dim: f64,
    /// Half-width of the 95% interval, `1.96·sd/√centers`.
    pub ci: f64,
    pub radii: Vec<f64>,
    pub n_points: usize,
    pub profiles: Vec<CenterProfile>,
}

/// Number of points of the sorted sample within `r` of `x`.
pub fn ball_count(sorted: &[f64], x: f64, r: f64) -> u64 {
    let lo = sorted.partition_point(|&p| p < x - r);
    let hi = sorted.partition_point(|&p| p <= x + r);
    (hi - lo) as u64
}

/// Slope estimate from a sorted sample, centers and radii.
pub fn local_dimension_from_sample(
    sorted: &[f64],
    centers: &[f64],
    radii: &[f64],
) -> Result<EmpiricalDimension> {
    let n = sorted.len() as f64;
    let log_r: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let profiles: Vec<(f64, Vec<u64>)> = centers
        .par_iter()
        .map(|&x| (x, radii.iter().map(|&r| ball_count(sorted, x, r)).collect()))
        .collect();

    let empty = profiles.iter().filter(|(_, c)| c[0] == 0).count();
    let empty_fraction = empty as f64 / centers.len() as f64;
    if empty_fraction > 0.1 {
        // smallest radius at which at most 10% of balls are empty
        let suggested = (0..radii.len())
            .find(|&k| profiles.iter().filter(|(_, c)| c[k] == 0).count() * 10 <= centers.len())
            .map_or(radii[radii.len() - 1], |k| radii[k]);
        return Err(Error::GridTooFine {
            r_lo: radii[0],
            empty_fraction,
            suggested_r_lo: suggested,
        });
    }

    let profiles: Vec<CenterProfile> = profiles
        .into_iter()
        .filter_map(|(center, counts)| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = counts
                .iter()
                .zip(&log_r)
                .filter(|(c, _)| **c > 0)
                .map(|(c, lr)| (*lr, (*c as f64 / n).ln()))
                .unzip();
            fit_line(&xs, &ys).map(|fit| CenterProfile {
                center,
                counts,
                slope: fit.slope,
            })
        })
        .collect();
    let slopes: Vec<f64> = profiles.iter().map(|p| p.slope).collect();
    let (mean_dim, se) = mean_and_stderr(&slopes);
    Ok(EmpiricalDimension {
        mean_dim,
        ci: 1.96 * se,
        radii: radii.to_vec(),
        n_points: sorted.len(),
        profiles,
    })
}

/// Empirical local dimension of `π_*ν_p` from `n_points` samples and
/// `n_centers` independent centers.
pub fn empirical_local_dimension(
    sys: &IfsSystem,
    p: &BernoulliSpec,
    params: &EmpiricalParams,
    seed: u64,
) -> Result<EmpiricalDimension> {
    params.validate(sys)?;
    let depth = params.sample_depth(sys);
    let mut points = sample_points(
        sys,
        p,
        seed,
        Purpose::EmpiricalPoints,
        params.n_points,
        depth,
    )?;
    points.par_sort_unstable_by(f64::total_cmp);
    let centers = sample_points(
        sys,
        p,
        seed,
        Purpose::EmpiricalCenters,
        params.n_centers,
        depth,
    )?;
    local_dimension_from_sample(&points, &centers, &params.grid.radii())
}

/// Everything a full run needs besides the system and measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportParams {
    pub series: SeriesParams,
    /// Tolerance grid; `None` entries mean no filter.
    pub taus: Vec<Option<f64>>,
    pub empirical: EmpiricalParams,
    pub seed: u64,
}

impl ReportParams {
    /// Defaults: unfiltered only for the uniform measure, the standard grid otherwise.
    pub fn default_for(sys: &IfsSystem, p: &BernoulliSpec) -> Self {
        ReportParams {
            series: SeriesParams::default(),
            taus: if p.is_uniform() {
                vec![None]
            } else {
                DEFAULT_TAU_GRID.to_vec()
            },
            empirical: EmpiricalParams::default_for(sys),
            seed: 0,
        }
    }

    pub fn validate(&self, sys: &IfsSystem) -> Result<()> {
        self.series.validate()?;
        self.empirical.validate(sys)?;
        if self.taus.is_empty() {
            return Err(Error::InvalidParameter("empty tolerance grid".into()));
        }
        Ok(())
    }
}

/// All quantities of one dimension run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionReport {
    pub entropy: f64,
    pub chi_s: f64,
    pub folding_entropy: f64,
    pub overlap_number: f64,
    /// `(h − log o)/|χ|`, unclamped above.
    pub formula_dimension: f64,
    pub empirical: EmpiricalDimension,
    pub projection_entropy: f64,
    /// `|h_π/|χ| − formula_dimension|`.
    pub feng_hu_residual: f64,
    pub consistent: bool,
    pub flags: Vec<String>,
    pub overlaps: OverlapGrid,
    pub params: ReportParams,
}

impl DimensionReport {
    pub fn formula_dimension_clamped(&self) -> f64 {
        self.formula_dimension.min(1.0)
    }
}

/// Cross-estimator agreement `|formula − empirical| ≤ max(0.1, 3·ci)`.
pub fn estimators_agree(formula: f64, empirical: f64, ci: f64) -> bool {
    (formula - empirical).abs() <= f64::max(0.1, 3.0 * ci)
}

pub fn full_report(
    sys: &IfsSystem,
    p: &BernoulliSpec,
    params: &ReportParams,
) -> Result<DimensionReport> {
    params.validate(sys)?;
    let h = p.entropy();
    let chi_s = p.lyapunov_exact(sys)?;
    let overlaps = overlap_grid(sys, p, &params.taus, &params.series, params.seed)?;
    let folding = folding_entropy(overlaps.headline());
    let o = folding.overlap_number;
    let log_o = o.ln();

    let mut flags = Vec::new();
    if overlaps.headline().rate_clamped() {
        flags.push(format!(
            "overlap rate {} clamped to {}",
            overlaps.headline().rate_raw,
            overlaps.headline().rate_estimate
        ));
    }
    if !overlaps.stabilized {
        flags.push("genericity tolerance did not stabilize".to_string());
    }
    let failed = overlaps.headline().total_failed();
    if failed > 0 {
        flags.push(format!("{failed} overlap samples exceeded the node budget"));
    }
    let (_, f_clamped) = clamp_folding_entropy(h, log_o);
    if f_clamped {
        flags.push(format!("folding entropy {log_o} clamped into [0, h]"));
    }

    let formula_dimension = dimension_formula(h, log_o, chi_s)?;
    let projection_entropy = projection_entropy(h, o, sys.alphabet_size())?;
    let feng_hu_residual = (projection_entropy / chi_s.abs() - formula_dimension).abs();
    if formula_dimension > 1.0 + OVER_UNITY_TOL {
        flags.push(format!("formula dimension {formula_dimension} exceeds 1"));
    }

    let empirical = empirical_local_dimension(sys, p, &params.empirical, params.seed)?;
    if empirical.mean_dim > 1.0 + OVER_UNITY_TOL {
        flags.push(format!(
            "empirical dimension {} exceeds 1",
            empirical.mean_dim
        ));
    }
    let consistent = estimators_agree(formula_dimension, empirical.mean_dim, empirical.ci);
    if !consistent {
        flags.push("formula and empirical dimensions disagree".to_string());
    }

    Ok(DimensionReport {
        entropy: h,
        chi_s,
        folding_entropy: log_o,
        overlap_number: o,
        formula_dimension,
        empirical,
        projection_entropy,
        feng_hu_residual,
        consistent,
        flags,
        overlaps,
        params: params.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_formula() {
        let d = dimension_formula(2f64.ln(), 0.0, -(3f64.ln())).unwrap();
        assert!((d - 2f64.ln() / 3f64.ln()).abs() < 1e-15);
        assert!((d - 0.630930).abs() < 1e-6);
    }

    #[test]
    fn full_collapse_and_half() {
        let h = 2f64.ln();
        assert_eq!(dimension_formula(h, h, -1.0).unwrap(), 0.0);
        assert_eq!(dimension_formula(h, 0.0, 0.5f64.ln()).unwrap(), 1.0);
    }

    #[test]
    fn nonnegative_exponent_rejected() {
        assert!(matches!(
            dimension_formula(1.0, 0.0, 0.0),
            Err(Error::InvalidExponent(_))
        ));
        assert!(dimension_formula(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn folding_entropy_clamped() {
        let h = 2f64.ln();
        assert_eq!(dimension_formula(h, -1e-3, -1.0).unwrap(), h);
        assert_eq!(dimension_formula(h, h + 1e-3, -1.0).unwrap(), 0.0);
    }

    #[test]
    fn projection_entropy_values() {
        let h = 2f64.ln();
        assert_eq!(projection_entropy(h, 1.0, 2).unwrap(), h);
        assert_eq!(projection_entropy(h, 2.0, 2).unwrap(), 0.0);
        assert!(projection_entropy(h, 0.9, 2).is_err());
        assert!(projection_entropy(h, 2.1, 2).is_err());
    }

    #[test]
    fn bernoulli_convolution_values() {
        let v = bernoulli_convolution_dimension(0.75, 1.0).unwrap();
        assert!((v.raw - 2f64.ln() / 0.75f64.ln().abs()).abs() < 1e-15);
        assert!(v.over_unity);
        assert_eq!(v.clamped, 1.0);
        // λ → ½⁺ with o = 1 tends to 1
        let near = bernoulli_convolution_dimension(0.5 + 1e-9, 1.0).unwrap();
        assert!((near.raw - 1.0).abs() < 1e-8);
        assert!(bernoulli_convolution_dimension(0.5, 1.0).is_err());
        assert!(bernoulli_convolution_dimension(1.0, 1.0).is_err());
        assert!(bernoulli_convolution_dimension(0.7, 2.5).is_err());
    }

    #[test]
    fn bernoulli_convolution_matches_general_formula() {
        for &(lambda, o) in &[(0.6, 1.1), (0.75, 1.4), (0.9, 1.79)] {
            let bc = bernoulli_convolution_dimension(lambda, o).unwrap().raw;
            let general = dimension_formula(2f64.ln(), f64::ln(o), f64::ln(lambda)).unwrap();
            assert!((bc - general).abs() < 1e-12);
        }
    }

    #[test]
    fn ball_count_matches_naive() {
        let mut pts: Vec<f64> = (0..1000)
            .map(|k| ((k * 7919) % 1000) as f64 / 1000.0)
            .collect();
        pts.sort_by(f64::total_cmp);
        for &(x, r) in &[(0.5, 0.1), (0.0, 0.05), (0.999, 0.3), (0.25, 0.0005)] {
            let naive = pts.iter().filter(|&&p| (p - x).abs() <= r).count() as u64;
            assert_eq!(ball_count(&pts, x, r), naive);
        }
    }

    #[test]
    fn radius_grid() {
        let g = RadiusGrid {
            r_lo: 0.01,
            r_hi: 1.0,
            count: 3,
        };
        let r = g.radii();
        assert!((r[0] - 0.01).abs() < 1e-15);
        assert!((r[1] - 0.1).abs() < 1e-15);
        assert!((r[2] - 1.0).abs() < 1e-14);
        let sys = IfsSystem::bernoulli_convolution(0.5).unwrap();
        assert!(RadiusGrid::default_for(&sys).validate(&sys).is_ok());
        assert!(RadiusGrid {
            r_hi: 0.5,
            ..RadiusGrid::default_for(&sys)
        }
        .validate(&sys)
        .is_err());
    }

    #[test]
    fn grid_too_fine() {
        let pts: Vec<f64> = (0..100).map(|k| k as f64).collect();
        let centers: Vec<f64> = (0..40).map(|k| k as f64 + 0.5).collect();
        let err = local_dimension_from_sample(&pts, &centers, &[0.1, 0.3, 1.0]).unwrap_err();
        match err {
            Error::GridTooFine { suggested_r_lo, .. } => assert_eq!(suggested_r_lo, 1.0),
            e => panic!("{e:?}"),
        }
    }
}
