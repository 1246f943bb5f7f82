//! One-way ANOVA and Tukey HSD multiple comparison.
//!
//! F tail probabilities come from the regularized incomplete beta function
//! (via `statrs`). The studentized range distribution is evaluated here by
//! nested adaptive Gauss-Kronrod quadrature and inverted numerically for
//! the critical value.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("need at least 2 groups, got {0}")]
    TooFewGroups(usize),
    #[error("group {0:?} needs at least 2 samples")]
    TooFewSamples(String),
    #[error("sample in group {0:?} is not finite")]
    NonFinite(String),
    #[error("confidence level {0} outside (0, 1)")]
    InvalidLevel(f64),
    #[error(
        "quadrature did not converge on [{a}, {b}]: estimate {estimate}, error {error} after {intervals} intervals"
    )]
    Quadrature {
        a: f64,
        b: f64,
        estimate: f64,
        error: f64,
        intervals: usize,
    },
    #[error("could not bracket the studentized range quantile for p={p}, k={k}, df={df}")]
    Bracket { p: f64, k: usize, df: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupedSamples {
    groups: Vec<(String, Vec<f64>)>,
}

impl GroupedSamples {
    pub fn new(groups: Vec<(String, Vec<f64>)>) -> Result<Self, StatsError> {
        if groups.len() < 2 {
            return Err(StatsError::TooFewGroups(groups.len()));
        }
        for (label, xs) in &groups {
            if xs.len() < 2 {
                return Err(StatsError::TooFewSamples(label.clone()));
            }
            if xs.iter().any(|x| !x.is_finite()) {
                return Err(StatsError::NonFinite(label.clone()));
            }
        }
        Ok(Self { groups })
    }

    pub fn groups(&self) -> &[(String, Vec<f64>)] {
        &self.groups
    }

    pub fn means(&self) -> Vec<f64> {
        self.groups.iter().map(|(_, xs)| mean(xs)).collect()
    }

    fn total_len(&self) -> usize {
        self.groups.iter().map(|(_, xs)| xs.len()).sum()
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anova {
    pub f: f64,
    pub df1: usize,
    pub df2: usize,
    pub p: f64,
    pub ss_between: f64,
    pub ss_within: f64,
    pub ms_within: f64,
    /// Zero within-group variance with unequal means.
    pub degenerate: bool,
}

pub fn anova_oneway(data: &GroupedSamples) -> Anova {
    let n = data.total_len();
    let k = data.groups.len();
    let grand = data.groups.iter().flat_map(|(_, xs)| xs).sum::<f64>() / n as f64;
    let mut ssb = 0.0;
    let mut ssw = 0.0;
    for (_, xs) in &data.groups {
        let m = mean(xs);
        ssb += xs.len() as f64 * (m - grand).powi(2);
        ssw += xs.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    }
    let df1 = k - 1;
    let df2 = n - k;
    let msb = ssb / df1 as f64;
    let msw = ssw / df2 as f64;
    // rounding leaves ssb ~1e-30 for equal means; treat as zero relative to data scale
    let scale = data.groups.iter().flat_map(|(_, xs)| xs).map(|x| x * x).sum::<f64>();
    let ssb_zero = ssb <= 1e-24 * scale.max(f64::MIN_POSITIVE);
    let (f, p, degenerate) = if ssw == 0.0 {
        if ssb_zero {
            (0.0, 1.0, false)
        } else {
            (f64::INFINITY, 0.0, true)
        }
    } else {
        let f = msb / msw;
        let p = FisherSnedecor::new(df1 as f64, df2 as f64)
            .map(|d| d.sf(f))
            .unwrap_or(f64::NAN);
        (f, p.clamp(0.0, 1.0), false)
    };
    Anova {
        f,
        df1,
        df2,
        p,
        ss_between: ssb,
        ss_within: ssw,
        ms_within: msw,
        degenerate,
    }
}

// Gauss-Kronrod 7/15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

const MAX_INTERVALS: usize = 4000;

/// Globally adaptive Gauss-Kronrod integration of `f` over `[a, b]`
/// starting from `initial` equal pieces.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    initial: usize,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64, StatsError> {
    let initial = initial.max(1);
    let step = (b - a) / initial as f64;
    let mut parts: Vec<(f64, f64, f64, f64)> = (0..initial)
        .map(|i| {
            let lo = a + step * i as f64;
            let hi = if i + 1 == initial { b } else { lo + step };
            let (v, e) = gk15(&f, lo, hi);
            (lo, hi, v, e)
        })
        .collect();
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(StatsError::Quadrature {
                a,
                b,
                estimate: total,
                error: err,
                intervals: parts.len(),
            });
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Upper tail of the standard normal.
fn norm_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// `Phi(z) - Phi(z - w)` without cancellation in either tail.
fn norm_band(z: f64, w: f64) -> f64 {
    if z > 0.0 {
        norm_sf(z - w) - norm_sf(z)
    } else {
        norm_sf(-z) - norm_sf(w - z)
    }
}

const REL_TOL: f64 = 1e-6;

/// `P(range of k iid standard normals <= w)`.
pub fn normal_range_cdf(w: f64, k: usize) -> Result<f64, StatsError> {
    if w <= 0.0 {
        return Ok(0.0);
    }
    let kf = k as f64;
    let integrand = |z: f64| {
        let band = norm_band(z, w);
        if band <= 0.0 {
            0.0
        } else {
            norm_pdf(z) * band.powi(k as i32 - 1)
        }
    };
    let v = integrate(integrand, -8.5, 8.5, 8, REL_TOL * 1e-2, 1e-14)?;
    Ok((kf * v).clamp(0.0, 1.0))
}

/// CDF of the studentized range `q` for `k` means and `df` error degrees of
/// freedom: the normal range CDF at `q s`, averaged over the distribution
/// of `s = sqrt(chi2_df / df)`.
pub fn studentized_range_cdf(q: f64, k: usize, df: f64) -> Result<f64, StatsError> {
    if q <= 0.0 {
        return Ok(0.0);
    }
    if df.is_infinite() || df > 1e7 {
        return normal_range_cdf(q, k);
    }
    let half = 0.5 * df;
    let log_norm = half * half.ln() + std::f64::consts::LN_2 - ln_gamma(half);
    let log_density = move |s: f64| log_norm + (df - 1.0) * s.ln() - df * s * s / 2.0;
    let sigma = (0.5 / df).sqrt();
    let lo = (1.0 - 10.0 * sigma).max(0.0);
    let hi = 1.0 + 10.0 * sigma;
    let failure = std::cell::RefCell::new(None);
    let integrand = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        let dens = log_density(s).exp();
        if dens == 0.0 {
            return 0.0;
        }
        match normal_range_cdf(q * s, k) {
            Ok(v) => dens * v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let v = integrate(integrand, lo, hi, 16, REL_TOL, 1e-13)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(v.clamp(0.0, 1.0))
}

/// Smallest `q` with `studentized_range_cdf(q, k, df) >= p`.
pub fn studentized_range_quantile(p: f64, k: usize, df: f64) -> Result<f64, StatsError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(StatsError::InvalidLevel(p));
    }
    let mut lo = 0.0;
    let mut hi = 2.0;
    let mut tries = 0;
    while studentized_range_cdf(hi, k, df)? < p {
        lo = hi;
        hi *= 2.0;
        tries += 1;
        if tries > 12 {
            return Err(StatsError::Bracket { p, k, df });
        }
    }
    while hi - lo > 1e-9 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if studentized_range_cdf(mid, k, df)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Significance {
    Positive,
    Negative,
    None,
}

impl Significance {
    pub fn symbol(self) -> char {
        match self {
            Significance::Positive => '+',
            Significance::Negative => '-',
            Significance::None => 'n',
        }
    }
}

impl fmt::Display for Significance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// One comparison `x - y`: the change in mean going from `y` to `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TukeyPair {
    pub x: String,
    pub y: String,
    pub diff: f64,
    pub lower: f64,
    pub upper: f64,
    pub sign: Significance,
}

impl TukeyPair {
    pub fn label(&self) -> String {
        format!("{}-{}", self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TukeyResult {
    pub level: f64,
    pub q_critical: f64,
    pub pairs: Vec<TukeyPair>,
}

/// Tukey HSD (Tukey-Kramer for unequal sizes) family-wise intervals.
///
/// Pairs come in the order `g1-g0, g2-g0, ..., g2-g1, ...`: every later
/// group against each earlier one, grouped by the earlier one.
pub fn tukey_hsd(data: &GroupedSamples, level: f64) -> Result<TukeyResult, StatsError> {
    if !(level > 0.0 && level < 1.0) {
        return Err(StatsError::InvalidLevel(level));
    }
    let anova = anova_oneway(data);
    let q = studentized_range_quantile(level, data.groups.len(), anova.df2 as f64)?;
    Ok(tukey_with_critical(data, &anova, level, q))
}

fn tukey_with_critical(data: &GroupedSamples, anova: &Anova, level: f64, q: f64) -> TukeyResult {
    let k = data.groups.len();
    let means = data.means();
    let mut pairs = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in i + 1..k {
            let (ref ly, ref ys) = data.groups[i];
            let (ref lx, ref xs) = data.groups[j];
            let diff = means[j] - means[i];
            let half = q * (anova.ms_within / 2.0 * (1.0 / xs.len() as f64 + 1.0 / ys.len() as f64)).sqrt();
            let (lower, upper) = (diff - half, diff + half);
            let sign = if lower > 0.0 {
                Significance::Positive
            } else if upper < 0.0 {
                Significance::Negative
            } else {
                Significance::None
            };
            pairs.push(TukeyPair {
                x: lx.clone(),
                y: ly.clone(),
                diff,
                lower,
                upper,
                sign,
            });
        }
    }
    TukeyResult {
        level,
        q_critical: q,
        pairs,
    }
}

/// One score observation: a condition value, a factor level (look-ahead)
/// and the per-utterance score.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelScore {
    pub condition: String,
    pub level: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionRow {
    pub condition: String,
    pub means: Vec<f64>,
    pub anova: Anova,
    pub tukey: TukeyResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionSummary {
    pub levels: Vec<usize>,
    pub pair_labels: Vec<String>,
    pub rows: Vec<ConditionRow>,
    /// Conditions left out, with the reason.
    pub skipped: Vec<(String, String)>,
}

/// ANOVA and Tukey grid for each condition over its factor levels.
///
/// `conditions` fixes the row order; conditions not listed follow in
/// lexical order.
pub fn summarize_conditions(
    scores: &[LevelScore],
    conditions: &[String],
    level: f64,
) -> Result<ConditionSummary, StatsError> {
    let levels: Vec<usize> = scores.iter().map(|s| s.level).collect::<BTreeSet<_>>().into_iter().collect();
    let mut cells: BTreeMap<&str, BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    for s in scores {
        cells
            .entry(s.condition.as_str())
            .or_default()
            .entry(s.level)
            .or_default()
            .push(s.value);
    }
    let mut order: Vec<String> = conditions.iter().filter(|c| cells.contains_key(c.as_str())).cloned().collect();
    for c in cells.keys() {
        if !order.iter().any(|o| o == c) {
            order.push(c.to_string());
        }
    }
    let mut pair_labels = Vec::new();
    for i in 0..levels.len() {
        for j in i + 1..levels.len() {
            pair_labels.push(format!("{}-{}", levels[j], levels[i]));
        }
    }

    if !(level > 0.0 && level < 1.0) {
        return Err(StatsError::InvalidLevel(level));
    }
    let mut critical: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for cond in order {
        let by_level = &cells[cond.as_str()];
        let missing: Vec<String> = levels
            .iter()
            .filter(|l| by_level.get(l).is_none_or(|v| v.len() < 2))
            .map(|l| l.to_string())
            .collect();
        if !missing.is_empty() {
            skipped.push((cond, format!("missing or undersized cells at levels {}", missing.join(","))));
            continue;
        }
        let groups = levels
            .iter()
            .map(|l| (l.to_string(), by_level[l].clone()))
            .collect();
        let data = match GroupedSamples::new(groups) {
            Ok(d) => d,
            Err(e) => {
                skipped.push((cond, e.to_string()));
                continue;
            }
        };
        let anova = anova_oneway(&data);
        let key = (levels.len(), anova.df2);
        let q = match critical.get(&key) {
            Some(&q) => q,
            None => {
                let q = studentized_range_quantile(level, key.0, key.1 as f64)?;
                critical.insert(key, q);
                q
            }
        };
        let tukey = tukey_with_critical(&data, &anova, level, q);
        rows.push(ConditionRow {
            condition: cond,
            means: data.means(),
            anova,
            tukey,
        });
    }
    Ok(ConditionSummary {
        levels,
        pair_labels,
        rows,
        skipped,
    })
}

impl ConditionSummary {
    /// Plain-text grid: one row per condition, one `+`/`-`/`n` column per
    /// level pair.
    pub fn sign_table(&self, condition_header: &str) -> String {
        let mut out = String::new();
        let _ = write!(out, "{condition_header:<8}");
        for l in &self.pair_labels {
            let _ = write!(out, "{l:>6}");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{:<8}", row.condition);
            for p in &row.tukey.pairs {
                let _ = write!(out, "{:>6}", p.sign.symbol());
            }
            out.push('\n');
        }
        for (c, why) in &self.skipped {
            let _ = writeln!(out, "# skipped {c}: {why}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use statrs::distribution::StudentsT;

    fn groups(gs: &[&[f64]]) -> GroupedSamples {
        GroupedSamples::new(
            gs.iter()
                .enumerate()
                .map(|(i, g)| (format!("g{i}"), g.to_vec()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn anova_hand_case() {
        let a = anova_oneway(&groups(&[&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]]));
        assert_eq!(a.f, 1.5);
        assert_eq!((a.df1, a.df2), (1, 4));
        assert!(a.p > 0.0 && a.p < 1.0);
    }

    #[test]
    fn anova_identical_groups() {
        let a = anova_oneway(&groups(&[&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]]));
        assert_eq!(a.f, 0.0);
        assert_eq!(a.p, 1.0);
        let a = anova_oneway(&groups(&[&[2.0, 2.0], &[2.0, 2.0]]));
        assert_eq!((a.f, a.p, a.degenerate), (0.0, 1.0, false));
    }

    #[test]
    fn anova_zero_variance_unequal_means() {
        let a = anova_oneway(&groups(&[&[1.0, 1.0], &[2.0, 2.0]]));
        assert!(a.degenerate);
        assert_eq!((a.f, a.p), (f64::INFINITY, 0.0));
    }

    #[test]
    fn anova_f_matches_pooled_t() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n1 = rng.random_range(2..20);
            let n2 = rng.random_range(2..20);
            let x: Vec<f64> = (0..n1).map(|_| rng.random::<f64>() * 10.0).collect();
            let y: Vec<f64> = (0..n2).map(|_| rng.random::<f64>() * 10.0 + 1.0).collect();
            let (mx, my) = (mean(&x), mean(&y));
            let ss = x.iter().map(|v| (v - mx).powi(2)).sum::<f64>() + y.iter().map(|v| (v - my).powi(2)).sum::<f64>();
            let sp2 = ss / (n1 + n2 - 2) as f64;
            let t = (mx - my) / (sp2 * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
            let a = anova_oneway(&groups(&[&x, &y]));
            assert!((a.f - t * t).abs() <= 1e-9 * (1.0 + a.f), "{} vs {}", a.f, t * t);
        }
    }

    #[test]
    fn anova_invariant_under_affine_maps() {
        let base = groups(&[&[1.0, 2.5, 3.0], &[2.0, 3.5, 4.5], &[0.5, 1.0, 2.0]]);
        let f0 = anova_oneway(&base).f;
        for (shift, scale) in [(10.0, 1.0), (0.0, 3.0), (-2.0, 0.25)] {
            let g: Vec<(String, Vec<f64>)> = base
                .groups()
                .iter()
                .map(|(l, xs)| (l.clone(), xs.iter().map(|x| x * scale + shift).collect()))
                .collect();
            let f = anova_oneway(&GroupedSamples::new(g).unwrap()).f;
            assert!((f - f0).abs() < 1e-9 * f0);
        }
    }

    #[test]
    fn p_value_decreases_in_f() {
        let d = FisherSnedecor::new(4.0, 50.0).unwrap();
        let ps: Vec<f64> = [0.0, 0.5, 1.0, 2.0, 5.0, 20.0].iter().map(|&f| d.sf(f)).collect();
        assert!(ps.windows(2).all(|w| w[1] < w[0]));
        assert!(ps.iter().all(|p| (0.0..=1.0).contains(p)));
    }

    #[test]
    fn grouped_samples_validation() {
        assert_eq!(
            GroupedSamples::new(vec![("a".into(), vec![1.0, 2.0])]),
            Err(StatsError::TooFewGroups(1))
        );
        assert!(GroupedSamples::new(vec![("a".into(), vec![1.0]), ("b".into(), vec![1.0, 2.0])]).is_err());
    }

    #[test]
    fn quadrature_reproduces_known_integrals() {
        let v = integrate(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1, 1e-12, 0.0).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        let v = integrate(norm_pdf, -8.5, 8.5, 4, 1e-12, 0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_group_q_is_scaled_t() {
        for df in [5.0, 10.0, 30.0] {
            let q = studentized_range_quantile(0.95, 2, df).unwrap();
            let t = StudentsT::new(0.0, 1.0, df).unwrap().inverse_cdf(0.975);
            assert!((q - std::f64::consts::SQRT_2 * t).abs() < 1e-4, "df={df}: {q}");
        }
    }

    #[test]
    fn q_three_groups_ten_df() {
        // independent numerical integration reference
        let q = studentized_range_quantile(0.95, 3, 10.0).unwrap();
        assert!((q - 3.876_776_750_013_158).abs() < 1e-3, "{q}");
    }

    #[test]
    fn q_large_df_approaches_normal_range() {
        let q = studentized_range_quantile(0.95, 5, 20745.0).unwrap();
        let q_inf = studentized_range_quantile(0.95, 5, f64::INFINITY).unwrap();
        // table value for k=5, df=inf is 3.858
        assert!((q_inf - 3.858).abs() < 2e-3, "{q_inf}");
        assert!(q > q_inf && q - q_inf < 2e-3, "{q} vs {q_inf}");
    }

    #[test]
    fn tukey_identical_groups_insignificant() {
        let d = groups(&[&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]]);
        let t = tukey_hsd(&d, 0.95).unwrap();
        assert!(t.pairs.iter().all(|p| p.sign == Significance::None));
        let labels: Vec<String> = t.pairs.iter().map(TukeyPair::label).collect();
        assert_eq!(labels, vec!["g1-g0", "g2-g0", "g2-g1"]);
    }

    #[test]
    fn tukey_signs_follow_intervals() {
        let d = groups(&[&[1.0, 1.1, 0.9, 1.05], &[5.0, 5.1, 4.9, 5.0], &[0.0, 0.1, -0.1, 0.05]]);
        let t = tukey_hsd(&d, 0.95).unwrap();
        let signs: Vec<char> = t.pairs.iter().map(|p| p.sign.symbol()).collect();
        assert_eq!(signs, vec!['+', '-', '-']);
        for p in &t.pairs {
            assert!(p.lower <= p.diff && p.diff <= p.upper);
        }
    }

    #[test]
    fn condition_summary_grid() {
        let mut scores = Vec::new();
        for l in [1usize, 3, 5, 10, 20] {
            for i in 0..6 {
                let v = (i % 3) as f64 * 0.01;
                scores.push(LevelScore { condition: "flat".into(), level: l, value: 0.5 + v });
                scores.push(LevelScore { condition: "steep".into(), level: l, value: l as f64 + v });
            }
        }
        scores.push(LevelScore { condition: "broken".into(), level: 1, value: 0.3 });
        let s = summarize_conditions(&scores, &["steep".to_string(), "flat".to_string()], 0.95).unwrap();
        assert_eq!(
            s.pair_labels,
            vec!["3-1", "5-1", "10-1", "20-1", "5-3", "10-3", "20-3", "10-5", "20-5", "20-10"]
        );
        assert_eq!(s.rows[0].condition, "steep");
        assert!(s.rows[0].tukey.pairs.iter().all(|p| p.sign == Significance::Positive));
        assert!(s.rows[1].tukey.pairs.iter().all(|p| p.sign == Significance::None));
        assert_eq!(s.skipped.len(), 1);
        let table = s.sign_table("cond");
        assert!(table.lines().next().unwrap().contains("3-1   5-1"));
        assert!(table.contains("# skipped broken"));
    }
}
