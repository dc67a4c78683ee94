//! Bernoulli measures on the shift space and their images on the limit set.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ifs::{IfsSystem, SimilarityMap};
use crate::rng::{Purpose, SampleStream};
use crate::stats::{mean_and_stderr, pairwise_sum};

/// Tolerance on `Σ p_i = 1` before renormalisation.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// A fully supported probability vector over the alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliSpec {
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl BernoulliSpec {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidProbabilities(format!(
                "need at least two entries, got {}",
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::InvalidProbabilities(format!(
                "entries must be strictly positive, got {p}"
            )));
        }
        let total = pairwise_sum(&probs);
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidProbabilities(format!(
                "entries sum to {total}, not 1"
            )));
        }
        let probs: Vec<f64> = probs.iter().map(|p| p / total).collect();
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        // the last bucket must absorb every u < 1
        *cumulative.last_mut().unwrap() = f64::INFINITY;
        Ok(BernoulliSpec { probs, cumulative })
    }

    /// Measure of maximal entropy on `d` symbols.
    pub fn uniform(d: usize) -> Result<Self> {
        Self::new(vec![1.0 / d as f64; d])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_uniform(&self) -> bool {
        let first = self.probs[0];
        self.probs.iter().all(|&p| p == first)
    }

    pub fn log_probs(&self) -> Vec<f64> {
        self.probs.iter().map(|p| p.ln()).collect()
    }

    /// Symbol selected by a uniform draw `u ∈ [0, 1)`.
    #[inline]
    pub fn symbol_for(&self, u: f64) -> usize {
        self.cumulative.partition_point(|&c| c <= u)
    }

    /// Shannon entropy `−Σ p_i log p_i` in nats.
    pub fn entropy(&self) -> f64 {
        let terms: Vec<f64> = self.probs.iter().map(|p| -p * p.ln()).collect();
        pairwise_sum(&terms)
    }

    fn check_alphabet(&self, sys: &IfsSystem) -> Result<()> {
        if sys.alphabet_size() != self.len() {
            return Err(Error::AlphabetMismatch {
                system: sys.alphabet_size(),
                probs: self.len(),
            });
        }
        Ok(())
    }

    /// Lyapunov exponent `Σ p_i log|r_i|`; negative.
    pub fn lyapunov_exact(&self, sys: &IfsSystem) -> Result<f64> {
        self.check_alphabet(sys)?;
        let terms: Vec<f64> = self
            .probs
            .iter()
            .zip(sys.maps())
            .map(|(p, m)| p * m.scale().ln())
            .collect();
        Ok(pairwise_sum(&terms))
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

/// Birkhoff averages `(1/n) Σ log|φ'_{ω_k}|` along sampled sequences.
pub fn lyapunov_birkhoff(
    sys: &IfsSystem,
    p: &BernoulliSpec,
    seed: u64,
    n_steps: usize,
    n_samples: usize,
) -> Result<Estimate> {
    p.check_alphabet(sys)?;
    if n_steps < 1 {
        return Err(Error::InvalidParameter("n_steps must be at least 1".into()));
    }
    if n_samples < 2 {
        return Err(Error::InvalidParameter(
            "n_samples must be at least 2".into(),
        ));
    }
    let log_scales: Vec<f64> = sys.maps().iter().map(|m| m.scale().ln()).collect();
    let averages: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut stream = SampleStream::new(seed, Purpose::Birkhoff, i);
            let terms: Vec<f64> = (0..n_steps)
                .map(|_| log_scales[stream.next_symbol(p)])
                .collect();
            pairwise_sum(&terms) / n_steps as f64
        })
        .collect();
    let (mean, stderr) = mean_and_stderr(&averages);
    Ok(Estimate { mean, stderr })
}

/// Smallest depth at which every cylinder image has diameter `≤ resolution`.
pub fn depth_for_resolution(sys: &IfsSystem, resolution: f64) -> usize {
    let diam = sys.ambient().diam();
    if resolution >= diam {
        return 1;
    }
    let depth = ((resolution / diam).ln() / sys.max_scale().ln()).ceil();
    (depth as usize).max(1)
}

/// A sampled limit-set point with its truncation error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledPoint {
    pub point: f64,
    pub error_bound: f64,
}

/// Draws `ω ~ ν_p` up to `depth` and returns `φ_{ω₁…ω_depth}(center of V)`.
pub fn sample_point(
    sys: &IfsSystem,
    p: &BernoulliSpec,
    stream: &mut SampleStream,
    depth: usize,
) -> SampledPoint {
    let map = (0..depth).fold(SimilarityMap::identity(), |acc, _| {
        acc.after(sys.map(stream.next_symbol(p)))
    });
    let v = sys.ambient();
    SampledPoint {
        point: map.apply(v.center()),
        error_bound: map.scale() * v.diam(),
    }
}

/// `n` independent points from `π_*ν_p`, point `i` drawn from stream `i`.
pub fn sample_points(
    sys: &IfsSystem,
    p: &BernoulliSpec,
    seed: u64,
    purpose: Purpose,
    n: usize,
    depth: usize,
) -> Result<Vec<f64>> {
    p.check_alphabet(sys)?;
    Ok((0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut stream = SampleStream::new(seed, purpose, i);
            sample_point(sys, p, &mut stream, depth).point
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_uniform_two() {
        let p = BernoulliSpec::uniform(2).unwrap();
        assert_eq!(p.entropy(), std::f64::consts::LN_2);
    }

    #[test]
    fn entropy_near_degenerate() {
        let eps = 1e-9;
        let p = BernoulliSpec::new(vec![1.0 - eps, eps]).unwrap();
        // direct evaluation: −(1−ε)log(1−ε) − ε log ε ≈ ε(1 − log ε) ≈ 2.17e−8
        let direct = -(1.0 - eps) * (1.0f64 - eps).ln() - eps * eps.ln();
        assert!((p.entropy() - direct).abs() < 1e-20);
        assert!(p.entropy() < 2.2e-8);
    }

    #[test]
    fn entropy_bounds() {
        for d in 2..8 {
            let u = BernoulliSpec::uniform(d).unwrap();
            assert!((u.entropy() - (d as f64).ln()).abs() <= 4.0 * f64::EPSILON * (d as f64).ln());
        }
        let p = BernoulliSpec::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert!(p.entropy() > 0.0 && p.entropy() < 3f64.ln());
    }

    #[test]
    fn rejects_bad_vectors() {
        assert!(BernoulliSpec::new(vec![1.0, 0.0]).is_err());
        assert!(BernoulliSpec::new(vec![0.6, 0.6]).is_err());
        assert!(BernoulliSpec::new(vec![1.0]).is_err());
        assert!(BernoulliSpec::new(vec![0.5, f64::NAN]).is_err());
        // within tolerance, renormalised
        let p = BernoulliSpec::new(vec![0.5 + 4e-13, 0.5]).unwrap();
        assert!((p.probs().iter().sum::<f64>() - 1.0).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn lyapunov_exact_values() {
        let bc = IfsSystem::bernoulli_convolution(0.7).unwrap();
        let u = BernoulliSpec::uniform(2).unwrap();
        assert!((u.lyapunov_exact(&bc).unwrap() - 0.7f64.ln()).abs() < 1e-15);
        let cantor = IfsSystem::cantor_middle_thirds();
        assert!((u.lyapunov_exact(&cantor).unwrap() + 3f64.ln()).abs() < 1e-15);

        let sys = IfsSystem::with_hull(vec![
            SimilarityMap::new(0.5, 0.0).unwrap(),
            SimilarityMap::new(0.25, 0.75).unwrap(),
        ])
        .unwrap();
        let p = BernoulliSpec::new(vec![2.0 / 3.0, 1.0 / 3.0]).unwrap();
        let expected = (2.0 / 3.0) * 0.5f64.ln() + (1.0 / 3.0) * 0.25f64.ln();
        let got = p.lyapunov_exact(&sys).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!((got + 0.92420).abs() < 1e-5);

        let p3 = BernoulliSpec::uniform(3).unwrap();
        assert!(matches!(
            p3.lyapunov_exact(&sys),
            Err(Error::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn birkhoff_deterministic() {
        let sys = IfsSystem::with_hull(vec![
            SimilarityMap::new(0.5, 0.0).unwrap(),
            SimilarityMap::new(-0.3, 1.0).unwrap(),
        ])
        .unwrap();
        let p = BernoulliSpec::new(vec![0.4, 0.6]).unwrap();
        let a = lyapunov_birkhoff(&sys, &p, 11, 500, 50).unwrap();
        let b = lyapunov_birkhoff(&sys, &p, 11, 500, 50).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
        assert!(lyapunov_birkhoff(&sys, &p, 11, 0, 50).is_err());
        assert!(lyapunov_birkhoff(&sys, &p, 11, 10, 1).is_err());
    }

    #[test]
    fn birkhoff_near_deterministic_stream() {
        let sys = IfsSystem::with_hull(vec![
            SimilarityMap::new(0.5, 0.0).unwrap(),
            SimilarityMap::new(0.3, 1.0).unwrap(),
        ])
        .unwrap();
        let p = BernoulliSpec::new(vec![1.0 - 1e-9, 1e-9]).unwrap();
        let est = lyapunov_birkhoff(&sys, &p, 3, 1000, 100).unwrap();
        assert!((est.mean - 0.5f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn resolution_depth() {
        let sys = IfsSystem::bernoulli_convolution(0.5).unwrap();
        let d = depth_for_resolution(&sys, 1e-6);
        assert!(0.5f64.powi(d as i32) * 4.0 <= 1e-6);
        assert!(0.5f64.powi(d as i32 - 1) * 4.0 > 1e-6);
    }

    #[test]
    fn sampled_points_stay_in_attractor() {
        let sys = IfsSystem::bernoulli_convolution(0.5).unwrap();
        let p = BernoulliSpec::uniform(2).unwrap();
        let pts = sample_points(&sys, &p, 5, Purpose::Generic, 1000, 40).unwrap();
        assert!(pts.iter().all(|x| (-2.0..=2.0).contains(x)));
    }
}
