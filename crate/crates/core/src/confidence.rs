//! Per-frame entropy as an acoustic confidence measure.
//!
//! Includes the closed-form entropy of an idealized output layer where
//! `N_H` nodes sit at activity `o_H` and `N_L` nodes at `o_L`, and a
//! maximum-likelihood accept/reject rule fitted on entropy histograms of
//! correctly and incorrectly classified frames. Logarithms are natural.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hmm::PosteriorFrame;

#[derive(Debug, Error, PartialEq)]
pub enum ConfidenceError {
    #[error("all activities are zero")]
    ZeroMass,
    #[error("invalid entropy model: {0}")]
    InvalidModel(String),
    #[error("empty sample")]
    EmptySample,
    #[error("sample contains a non-finite entropy")]
    NonFinite,
    #[error("histogram needs at least one bin")]
    NoBins,
}

/// Entropy of a vector of nonnegative activities after normalization.
pub fn entropy(values: &[f64]) -> Result<f64, ConfidenceError> {
    let sum: f64 = values.iter().sum();
    if !(sum > 0.0) {
        return Err(ConfidenceError::ZeroMass);
    }
    Ok(values
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| {
            let p = v / sum;
            -p * p.ln()
        })
        .sum())
}

pub fn frame_entropy(frame: &PosteriorFrame) -> f64 {
    entropy(frame.values()).expect("posterior frames have positive mass")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyModel {
    pub n_high: usize,
    pub n_low: usize,
    pub o_high: f64,
    pub o_low: f64,
}

impl EntropyModel {
    pub fn new(n_high: usize, n_low: usize, o_high: f64, o_low: f64) -> Result<Self, ConfidenceError> {
        if o_high == 0.0 && o_low == 0.0 {
            return Err(ConfidenceError::ZeroMass);
        }
        if n_high == 0 {
            return Err(ConfidenceError::InvalidModel("N_H must be at least 1".into()));
        }
        if !(0.0 <= o_low && o_low < o_high && o_high <= 1.0) {
            return Err(ConfidenceError::InvalidModel(format!(
                "need 0 <= o_L < o_H <= 1, got o_L={o_low}, o_H={o_high}"
            )));
        }
        Ok(Self {
            n_high,
            n_low,
            o_high,
            o_low,
        })
    }

    /// Targets `(1 - eps, eps)`.
    pub fn symmetric(n_high: usize, n_low: usize, eps: f64) -> Result<Self, ConfidenceError> {
        Self::new(n_high, n_low, 1.0 - eps, eps)
    }

    fn mass(&self) -> f64 {
        self.n_high as f64 * self.o_high + self.n_low as f64 * self.o_low
    }

    pub fn b_high(&self) -> f64 {
        self.o_high / self.mass()
    }

    pub fn b_low(&self) -> f64 {
        self.o_low / self.mass()
    }

    pub fn entropy(&self) -> f64 {
        let term = |n: usize, b: f64| if n == 0 || b == 0.0 { 0.0 } else { -(n as f64) * b * b.ln() };
        term(self.n_high, self.b_high()) + term(self.n_low, self.b_low())
    }

    /// The explicit activity vector: `N_H` high values followed by `N_L` low ones.
    pub fn activities(&self) -> Vec<f64> {
        let mut v = vec![self.o_high; self.n_high];
        v.extend(std::iter::repeat_n(self.o_low, self.n_low));
        v
    }
}

pub fn simulated_entropy(n_high: usize, n_low: usize, o_high: f64, o_low: f64) -> Result<f64, ConfidenceError> {
    Ok(EntropyModel::new(n_high, n_low, o_high, o_low)?.entropy())
}

/// Closed form for symmetric targets `(eps, 1 - eps)`:
/// `ln(N_H(1-e) + N_L e) - (N_H(1-e) ln(1-e) + N_L e ln e) / (N_H(1-e) + N_L e)`.
pub fn symmetric_entropy(n_high: usize, n_low: usize, eps: f64) -> Result<f64, ConfidenceError> {
    EntropyModel::symmetric(n_high, n_low, eps)?;
    let hi = n_high as f64 * (1.0 - eps);
    let lo = n_low as f64 * eps;
    let xlogx = |n: f64, x: f64| if n == 0.0 || x == 0.0 { 0.0 } else { n * x * x.ln() };
    let mass = hi + lo;
    Ok(mass.ln() - (xlogx(n_high as f64, 1.0 - eps) + xlogx(n_low as f64, eps)) / mass)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DecisionKind {
    /// Accept iff the correct-class density is at least the incorrect-class
    /// density in the entropy's bin.
    Histogram { lo: f64, width: f64, accept: Vec<bool> },
    /// Accept iff entropy is at or below the threshold.
    Threshold { threshold: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRule {
    pub kind: DecisionKind,
    /// Set when the samples could not support a histogram and the midpoint
    /// threshold was used instead.
    pub degenerate: bool,
}

impl DecisionRule {
    pub fn accepts(&self, h: f64) -> bool {
        match &self.kind {
            DecisionKind::Histogram { lo, width, accept } => {
                let pos = ((h - lo) / width).floor();
                let idx = if pos <= 0.0 { 0 } else { (pos as usize).min(accept.len() - 1) };
                accept[idx]
            }
            DecisionKind::Threshold { threshold } => h <= *threshold,
        }
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Fits the equal-prior maximum-likelihood rule on a shared equal-width
/// binning of both samples.
pub fn fit_ml_decision(correct: &[f64], incorrect: &[f64], bins: usize) -> Result<DecisionRule, ConfidenceError> {
    if correct.is_empty() || incorrect.is_empty() {
        return Err(ConfidenceError::EmptySample);
    }
    if bins == 0 {
        return Err(ConfidenceError::NoBins);
    }
    if correct.iter().chain(incorrect).any(|h| !h.is_finite()) {
        return Err(ConfidenceError::NonFinite);
    }
    let lo = correct.iter().chain(incorrect).copied().fold(f64::INFINITY, f64::min);
    let hi = correct.iter().chain(incorrect).copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return Ok(DecisionRule {
            kind: DecisionKind::Threshold {
                threshold: 0.5 * (mean(correct) + mean(incorrect)),
            },
            degenerate: true,
        });
    }
    let width = (hi - lo) / bins as f64;
    let bin_of = |h: f64| (((h - lo) / width).floor() as usize).min(bins - 1);
    let mut hc = vec![0usize; bins];
    let mut hi_ = vec![0usize; bins];
    for &h in correct {
        hc[bin_of(h)] += 1;
    }
    for &h in incorrect {
        hi_[bin_of(h)] += 1;
    }
    let nc = correct.len() as f64;
    let ni = incorrect.len() as f64;
    let accept = hc
        .iter()
        .zip(&hi_)
        .map(|(&c, &i)| c as f64 / nc >= i as f64 / ni)
        .collect();
    Ok(DecisionRule {
        kind: DecisionKind::Histogram { lo, width, accept },
        degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceReport {
    pub correct_accept: f64,
    pub correct_reject: f64,
    pub false_accept: f64,
    pub false_reject: f64,
}

impl ConfidenceReport {
    pub fn total_error(&self) -> f64 {
        self.false_accept + self.false_reject
    }
}

/// Splits `(entropy, correct)` pairs into the four decision outcomes, as
/// fractions of all frames.
pub fn confusion_rates(rule: &DecisionRule, eval: &[(f64, bool)]) -> Result<ConfidenceReport, ConfidenceError> {
    if eval.is_empty() {
        return Err(ConfidenceError::EmptySample);
    }
    let (mut ca, mut cr, mut fa, mut fr) = (0usize, 0usize, 0usize, 0usize);
    for &(h, correct) in eval {
        match (rule.accepts(h), correct) {
            (true, true) => ca += 1,
            (false, false) => cr += 1,
            (true, false) => fa += 1,
            (false, true) => fr += 1,
        }
    }
    let n = eval.len() as f64;
    Ok(ConfidenceReport {
        correct_accept: ca as f64 / n,
        correct_reject: cr as f64 / n,
        false_accept: fa as f64 / n,
        false_reject: fr as f64 / n,
    })
}

/// `frame,entropy,correct` CSV for plotting conditional distributions.
pub fn entropy_trace_csv(rows: &[(usize, f64, bool)]) -> String {
    let mut out = String::from("frame,entropy,correct\n");
    for (frame, h, correct) in rows {
        let _ = writeln!(out, "{frame},{h},{}", u8::from(*correct));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn frame_entropy_examples() {
        let one_hot = PosteriorFrame::new(vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(frame_entropy(&one_hot), 0.0);
        let uniform = PosteriorFrame::new(vec![0.02; 50]).unwrap();
        assert!((frame_entropy(&uniform) - 50f64.ln()).abs() < 1e-12);
        let mut v = vec![0.1; 50];
        v[0] = 0.9;
        let h = frame_entropy(&PosteriorFrame::new(v).unwrap());
        // direct evaluation, frozen
        assert!((h - 3.719_494_369_235_627).abs() < 1e-12);
        assert!((h - simulated_entropy(1, 49, 0.9, 0.1).unwrap()).abs() < 1e-12);
        assert_eq!(entropy(&[0.0, 0.0]), Err(ConfidenceError::ZeroMass));
    }

    #[test]
    fn simulated_entropy_examples() {
        for nh in [1usize, 2, 10, 50] {
            let h = simulated_entropy(nh, 50 - nh, 1.0 - 1e-12, 1e-12).unwrap();
            assert!((h - (nh as f64).ln()).abs() < 1e-6, "N_H={nh}: {h}");
        }
        assert_eq!(simulated_entropy(1, 49, 1.0, 0.0).unwrap(), 0.0);
        for o in [0.3, 0.9, 1.0] {
            assert!((simulated_entropy(50, 0, o, 0.0).unwrap() - 50f64.ln()).abs() < 1e-12);
        }
        assert_eq!(simulated_entropy(1, 1, 0.0, 0.0), Err(ConfidenceError::ZeroMass));
        assert!(simulated_entropy(0, 1, 0.9, 0.1).is_err());
        assert!(simulated_entropy(1, 1, 0.1, 0.9).is_err());
    }

    #[test]
    fn symmetric_formula_matches_general_form() {
        for eps in [0.0, 0.03, 0.1, 0.25] {
            for nh in 1..=50 {
                let a = simulated_entropy(nh, 50 - nh, 1.0 - eps, eps).unwrap();
                let b = symmetric_entropy(nh, 50 - nh, eps).unwrap();
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn entropy_range_narrows_with_eps() {
        let curve = |eps: f64| -> Vec<f64> {
            (1..=50)
                .map(|nh| simulated_entropy(nh, 50 - nh, 1.0 - eps, eps).unwrap())
                .collect()
        };
        let c0 = curve(0.0);
        assert!(c0.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(c0[0], 0.0);
        let mut prev_min = 0.0;
        // with eps > 0 the many low nodes dominate at small N_H, so each
        // curve first dips, then rises monotonically to ln N
        for (eps, argmin) in [(0.03, 3), (0.1, 8)] {
            let c = curve(eps);
            let min = c.iter().copied().fold(f64::INFINITY, f64::min);
            assert_eq!(c[argmin], min);
            assert!(c[argmin..].windows(2).all(|w| w[1] > w[0]));
            // every curve ends at the uniform distribution
            assert!((c[49] - 50f64.ln()).abs() < 1e-12);
            assert!(min > prev_min, "eps={eps}");
            prev_min = min;
        }
    }

    #[test]
    fn explicit_vectors_match_model() {
        for eps in [0.0, 0.03, 0.1] {
            for nh in 1..=50 {
                let m = EntropyModel::symmetric(nh, 50 - nh, eps).unwrap();
                let h = entropy(&m.activities()).unwrap();
                assert!((h - m.entropy()).abs() < 1e-12);
                assert!((nh as f64 * m.b_high() + (50 - nh) as f64 * m.b_low() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn separated_samples_are_perfectly_classified() {
        let c: Vec<f64> = (0..100).map(|i| i as f64 * 0.01).collect();
        let i: Vec<f64> = (0..100).map(|i| 2.0 + i as f64 * 0.01).collect();
        let rule = fit_ml_decision(&c, &i, 50).unwrap();
        let eval: Vec<(f64, bool)> = c.iter().map(|&h| (h, true)).chain(i.iter().map(|&h| (h, false))).collect();
        let r = confusion_rates(&rule, &eval).unwrap();
        assert_eq!(r.total_error(), 0.0);
        assert_eq!(r.correct_accept + r.correct_reject, 1.0);
    }

    #[test]
    fn identical_distributions_give_chance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let d = Normal::new(1.0, 0.3).unwrap();
        let fit_c: Vec<f64> = (0..4000).map(|_| d.sample(&mut rng)).collect();
        let fit_i: Vec<f64> = (0..4000).map(|_| d.sample(&mut rng)).collect();
        let rule = fit_ml_decision(&fit_c, &fit_i, 50).unwrap();
        let eval: Vec<(f64, bool)> = (0..20000).map(|k| (d.sample(&mut rng), k % 2 == 0)).collect();
        let r = confusion_rates(&rule, &eval).unwrap();
        assert!((r.total_error() - 0.5).abs() < 0.02, "{r:?}");
    }

    #[test]
    fn overlapping_gaussians_reach_bayes_error() {
        // N(1, 0.5) vs N(2, 0.5), equal priors: Bayes error = Phi(-1)
        let bayes = 0.158_655_253_931_457_05;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let dc = Normal::new(1.0, 0.5).unwrap();
        let di = Normal::new(2.0, 0.5).unwrap();
        let fit_c: Vec<f64> = (0..20000).map(|_| dc.sample(&mut rng)).collect();
        let fit_i: Vec<f64> = (0..20000).map(|_| di.sample(&mut rng)).collect();
        let rule = fit_ml_decision(&fit_c, &fit_i, 50).unwrap();
        let mut eval: Vec<(f64, bool)> = (0..20000).map(|_| (dc.sample(&mut rng), true)).collect();
        eval.extend((0..20000).map(|_| (di.sample(&mut rng), false)));
        let r = confusion_rates(&rule, &eval).unwrap();
        assert!((r.total_error() - bayes).abs() < 0.03, "{r:?}");
    }

    #[test]
    fn degenerate_samples_fall_back_to_threshold() {
        let rule = fit_ml_decision(&[1.0, 1.0], &[1.0], 10).unwrap();
        assert!(rule.degenerate);
        assert!(rule.accepts(1.0));
        assert!(!rule.accepts(1.5));
        assert_eq!(fit_ml_decision(&[], &[1.0], 10), Err(ConfidenceError::EmptySample));
    }

    #[test]
    fn confusion_rate_edge_cases() {
        let always = DecisionRule {
            kind: DecisionKind::Threshold { threshold: f64::INFINITY },
            degenerate: false,
        };
        let eval = [(0.1, true), (0.5, false), (2.0, false), (1.0, true)];
        let r = confusion_rates(&always, &eval).unwrap();
        assert_eq!((r.correct_reject, r.false_reject), (0.0, 0.0));
        assert_eq!(r.correct_accept + r.false_accept, 1.0);
        assert!(confusion_rates(&always, &[]).is_err());
    }

    #[test]
    fn trace_csv_layout() {
        let csv = entropy_trace_csv(&[(0, 0.5, true), (1, 1.25, false)]);
        assert_eq!(csv, "frame,entropy,correct\n0,0.5,1\n1,1.25,0\n");
    }
}
