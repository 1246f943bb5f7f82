//! Factorial experiments: per-utterance language models, streaming decodes
//! over several look-ahead values, scoring, and aggregated reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::decoder::{decode_streaming, DecodeConfig, TieBreak};
use crate::hmm::{posteriors_to_likelihoods, PhoneModelSet, TransitionNetwork, DEFAULT_FLOOR};
use crate::scoring::{align_edit, collapse_to_segments, frame_correct_rate, EditCosts};
use crate::stats::{summarize_conditions, ConditionSummary, LevelScore};
use crate::synth::{self, Corpus, Preset, Utterance};
use crate::topology::{alpha_mix, phone_loop, word_loop, AlphaMixSpec, Transcription, WordLoopSpec};

pub const DEFAULT_LOOK_AHEADS: [usize; 5] = [1, 3, 5, 10, 20];
pub const DEFAULT_ALPHAS: [f64; 7] = [0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0];
pub const DEFAULT_WORD_LENGTHS: [usize; 7] = [1, 2, 3, 4, 5, 6, 7];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Design {
    Wordlen,
    Alpha,
    PhoneLoop,
}

impl Design {
    pub fn name(self) -> &'static str {
        match self {
            Design::Wordlen => "wordlen",
            Design::Alpha => "alpha",
            Design::PhoneLoop => "phone-loop",
        }
    }

    pub fn default_conditions(self) -> Vec<Condition> {
        match self {
            Design::Wordlen => DEFAULT_WORD_LENGTHS.iter().map(|&n| Condition::WordLen(n)).collect(),
            Design::Alpha => DEFAULT_ALPHAS.iter().map(|&a| Condition::Alpha(a)).collect(),
            Design::PhoneLoop => vec![Condition::Loop(LoopScope::Transcription)],
        }
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Design {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wordlen" => Ok(Design::Wordlen),
            "alpha" => Ok(Design::Alpha),
            "phone-loop" | "pl" => Ok(Design::PhoneLoop),
            _ => bail!("unknown design {s:?} (expected wordlen, alpha or phone-loop)"),
        }
    }
}

/// Which phones a free phone loop ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoopScope {
    /// The distinct phones of the utterance's transcription.
    Transcription,
    /// The whole phone set.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Condition {
    WordLen(usize),
    Alpha(f64),
    Loop(LoopScope),
}

impl Condition {
    pub fn design(&self) -> Design {
        match self {
            Condition::WordLen(_) => Design::Wordlen,
            Condition::Alpha(_) => Design::Alpha,
            Condition::Loop(_) => Design::PhoneLoop,
        }
    }

    pub fn parse(design: Design, s: &str) -> Result<Self> {
        let c = match design {
            Design::Wordlen => Condition::WordLen(s.parse().with_context(|| format!("bad word length {s:?}"))?),
            Design::Alpha => Condition::Alpha(s.parse().with_context(|| format!("bad alpha {s:?}"))?),
            Design::PhoneLoop => match s {
                "transcription" => Condition::Loop(LoopScope::Transcription),
                "full" => Condition::Loop(LoopScope::Full),
                _ => bail!("phone-loop condition must be transcription or full, got {s:?}"),
            },
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Condition::WordLen(0) => bail!("word length must be positive"),
            Condition::Alpha(a) if !(0.0..=1.0).contains(&a) => bail!("alpha {a} outside [0, 1]"),
            _ => Ok(()),
        }
    }

    /// Builds the utterance's network for this condition.
    pub fn network(&self, transcription: &Transcription, models: &PhoneModelSet) -> Result<TransitionNetwork> {
        Ok(match *self {
            Condition::WordLen(n) => {
                // words cannot be longer than the utterance
                let n = n.min(transcription.len());
                word_loop(&WordLoopSpec::new(n, transcription.clone())?, models)?
            }
            Condition::Alpha(a) => alpha_mix(&AlphaMixSpec::new(a, transcription.clone())?, models)?,
            Condition::Loop(LoopScope::Transcription) => phone_loop(&transcription.distinct_phones(), models)?,
            Condition::Loop(LoopScope::Full) => {
                let all = (0..models.num_classes() as u32).map(crate::hmm::PhoneId).collect();
                phone_loop(&all, models)?
            }
        })
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::WordLen(n) => write!(f, "{n}"),
            Condition::Alpha(a) => write!(f, "{a}"),
            Condition::Loop(LoopScope::Transcription) => f.write_str("transcription"),
            Condition::Loop(LoopScope::Full) => f.write_str("full"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecodeOptions {
    pub tie_break: TieBreak,
    pub floor: f64,
}

impl Default for DecodeOptions {
    fn default() -> Self {
        Self {
            tie_break: TieBreak::LowestStateId,
            floor: DEFAULT_FLOOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub design: Design,
    pub conditions: Vec<Condition>,
    pub look_aheads: Vec<usize>,
    pub presets: Vec<Preset>,
    pub decode: DecodeOptions,
}

impl ExperimentSpec {
    pub fn new(design: Design, presets: Vec<Preset>) -> Self {
        Self {
            design,
            conditions: design.default_conditions(),
            look_aheads: DEFAULT_LOOK_AHEADS.to_vec(),
            presets,
            decode: DecodeOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.conditions.is_empty() || self.look_aheads.is_empty() || self.presets.is_empty() {
            bail!("experiment needs at least one condition, look-ahead and preset");
        }
        for c in &self.conditions {
            if c.design() != self.design {
                bail!("condition {c} does not belong to design {}", self.design);
            }
            c.validate()?;
        }
        if self.look_aheads.contains(&0) {
            bail!("look-ahead values must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub preset: String,
    pub design: String,
    pub condition: String,
    pub look_ahead: usize,
    pub utterance: String,
    pub frames: usize,
    pub frame_rate: Option<f64>,
    pub accuracy: Option<f64>,
    pub percent_correct: Option<f64>,
    pub status: String,
}

impl ResultRow {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultsTable {
    pub rows: Vec<ResultRow>,
}

impl ResultsTable {
    pub fn failed(&self) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(|r| !r.ok())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let rows = r.deserialize().collect::<Result<Vec<ResultRow>, _>>()?;
        Ok(Self { rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_csv(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

fn failed_row(preset: Preset, cond: &Condition, l: usize, u: &Utterance, msg: String) -> ResultRow {
    ResultRow {
        preset: preset.to_string(),
        design: cond.design().to_string(),
        condition: cond.to_string(),
        look_ahead: l,
        utterance: u.id().to_string(),
        frames: u.labels.len(),
        frame_rate: None,
        accuracy: None,
        percent_correct: None,
        status: format!("failed: {msg}"),
    }
}

/// Decodes and scores one utterance under one condition for every look-ahead.
pub fn evaluate_utterance(
    u: &Utterance,
    corpus: &Corpus,
    models: &PhoneModelSet,
    preset: Preset,
    cond: &Condition,
    look_aheads: &[usize],
    opts: DecodeOptions,
) -> Vec<ResultRow> {
    let prepared = cond
        .network(&u.transcription, models)
        .and_then(|net| Ok((net, posteriors_to_likelihoods(&u.posteriors, &corpus.priors, opts.floor)?)));
    let (net, stream) = match prepared {
        Ok(p) => p,
        Err(e) => {
            return look_aheads
                .iter()
                .map(|&l| failed_row(preset, cond, l, u, format!("{e:#}")))
                .collect()
        }
    };
    look_aheads
        .iter()
        .map(|&l| {
            let config = match DecodeConfig::new(l) {
                Ok(c) => c.with_tie_break(opts.tie_break),
                Err(e) => return failed_row(preset, cond, l, u, e.to_string()),
            };
            let decided = match decode_streaming(&net, &stream, config) {
                Ok(d) => d.phones(),
                Err(e) => return failed_row(preset, cond, l, u, e.to_string()),
            };
            let frame = frame_correct_rate(u.id(), &decided, &u.labels);
            let edit = align_edit(&u.transcription.phones, &collapse_to_segments(&decided), EditCosts::default());
            match (frame, edit) {
                (Ok(f), Ok(e)) => ResultRow {
                    preset: preset.to_string(),
                    design: cond.design().to_string(),
                    condition: cond.to_string(),
                    look_ahead: l,
                    utterance: u.id().to_string(),
                    frames: u.labels.len(),
                    frame_rate: Some(f.rate),
                    accuracy: Some(e.accuracy()),
                    percent_correct: Some(e.percent_correct()),
                    status: "ok".into(),
                },
                (Err(e), _) => failed_row(preset, cond, l, u, e.to_string()),
                (_, Err(e)) => failed_row(preset, cond, l, u, e.to_string()),
            }
        })
        .collect()
}

pub fn decoding_models(corpus: &Corpus) -> Result<PhoneModelSet> {
    Ok(PhoneModelSet::uniform(
        corpus.config.num_phones,
        corpus.config.states_per_phone,
        corpus.config.self_loop,
    )?)
}

/// All rows for one preset's corpus, in (condition, look-ahead, utterance) order.
pub fn evaluate_corpus(corpus: &Corpus, preset: Preset, spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let models = decoding_models(corpus)?;
    let per_utt: Vec<Vec<(usize, ResultRow)>> = corpus
        .utterances
        .par_iter()
        .map(|u| {
            spec.conditions
                .iter()
                .enumerate()
                .flat_map(|(ci, c)| {
                    evaluate_utterance(u, corpus, &models, preset, c, &spec.look_aheads, spec.decode)
                        .into_iter()
                        .map(move |r| (ci, r))
                })
                .collect()
        })
        .collect();
    let mut rows: Vec<(usize, ResultRow)> = per_utt.into_iter().flatten().collect();
    rows.sort_by(|(ca, a), (cb, b)| {
        (ca, a.look_ahead, &a.utterance).cmp(&(cb, b.look_ahead, &b.utterance))
    });
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

pub fn preset_dir(corpus_root: &Path, preset: Preset) -> PathBuf {
    corpus_root.join(preset.name())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub spec: ExperimentSpec,
    /// Corpus hash per preset.
    pub corpora: BTreeMap<String, String>,
    pub rows: usize,
    pub failed: usize,
    pub results_sha256: String,
}

pub const RESULTS_FILE: &str = "results.csv";
pub const RUN_MANIFEST: &str = "run.json";

/// Runs the experiment over the per-preset corpora under `corpus_root` and
/// writes `results.csv` and `run.json` into `out`.
pub fn run_experiment(spec: &ExperimentSpec, corpus_root: &Path, out: &Path) -> Result<ResultsTable> {
    spec.validate()?;
    let mut table = ResultsTable::default();
    let mut corpora = BTreeMap::new();
    for &preset in &spec.presets {
        let dir = preset_dir(corpus_root, preset);
        let corpus = synth::load_corpus(&dir).with_context(|| format!("loading corpus {}", dir.display()))?;
        let manifest = synth::read_manifest(&dir)?;
        corpora.insert(preset.to_string(), manifest.hash);
        table.rows.extend(evaluate_corpus(&corpus, preset, spec)?);
    }
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let csv = table.to_csv()?;
    let path = out.join(RESULTS_FILE);
    fs::write(&path, &csv).with_context(|| format!("writing {}", path.display()))?;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        spec: spec.clone(),
        corpora,
        rows: table.rows.len(),
        failed: table.failed().count(),
        results_sha256: hex::encode(Sha256::digest(csv.as_bytes())),
    };
    let path = out.join(RUN_MANIFEST);
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(table)
}

/// Sample quantile with linear interpolation between order statistics
/// (`h = (n - 1) p`). `sorted` must be ascending and nonempty.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    /// Whiskers span the full data range.
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl BoxStats {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Self {
            min: v[0],
            q1: quantile_sorted(&v, 0.25),
            median: quantile_sorted(&v, 0.5),
            q3: quantile_sorted(&v, 0.75),
            max: v[v.len() - 1],
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    FrameRate,
    Accuracy,
    PercentCorrect,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::FrameRate, Metric::Accuracy, Metric::PercentCorrect];

    pub fn name(self) -> &'static str {
        match self {
            Metric::FrameRate => "frame_rate",
            Metric::Accuracy => "accuracy",
            Metric::PercentCorrect => "percent_correct",
        }
    }

    pub fn of(self, row: &ResultRow) -> Option<f64> {
        match self {
            Metric::FrameRate => row.frame_rate,
            Metric::Accuracy => row.accuracy,
            Metric::PercentCorrect => row.percent_correct,
        }
    }
}

/// One point of a per-condition curve: the mean over utterances, its
/// standard error and the box-plot statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub preset: String,
    pub design: String,
    pub condition: String,
    pub metric: Metric,
    pub look_ahead: usize,
    pub n: usize,
    pub mean: f64,
    pub se: Option<f64>,
    pub spread: BoxStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsBlock {
    pub preset: String,
    pub design: String,
    pub metric: Metric,
    pub summary: ConditionSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub curves: Vec<CurvePoint>,
    pub stats: Vec<StatsBlock>,
    pub warnings: Vec<String>,
}

pub fn mean_and_se(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Some((var / n).sqrt()))
}

type CellKey = (String, String, String, usize);

/// Condition means (the average of per-utterance scores), spreads, and the
/// ANOVA/Tukey comparison of look-ahead values within each condition.
pub fn summarize(table: &ResultsTable, level: f64) -> Result<Summary> {
    let mut warnings = Vec::new();
    for r in table.failed() {
        warnings.push(format!(
            "failed row {}/{}/{} L={} {}: {}",
            r.preset, r.design, r.condition, r.look_ahead, r.utterance, r.status
        ));
    }

    // condition order as first seen in the table
    let mut cond_order: Vec<(String, String, String)> = Vec::new();
    let mut cells: BTreeMap<CellKey, Vec<&ResultRow>> = BTreeMap::new();
    for r in &table.rows {
        let key = (r.preset.clone(), r.design.clone(), r.condition.clone());
        if !cond_order.contains(&key) {
            cond_order.push(key);
        }
        if r.ok() {
            cells
                .entry((r.preset.clone(), r.design.clone(), r.condition.clone(), r.look_ahead))
                .or_default()
                .push(r);
        }
    }
    let all_levels: BTreeSet<usize> = table.rows.iter().map(|r| r.look_ahead).collect();
    let all_utts: BTreeSet<&str> = table.rows.iter().map(|r| r.utterance.as_str()).collect();
    for (p, d, c) in &cond_order {
        for &l in &all_levels {
            let n = cells.get(&(p.clone(), d.clone(), c.clone(), l)).map_or(0, Vec::len);
            if n < all_utts.len() {
                warnings.push(format!(
                    "incomplete cell {p}/{d}/{c} L={l}: {n} of {} utterances",
                    all_utts.len()
                ));
            }
        }
    }

    let mut curves = Vec::new();
    for metric in Metric::ALL {
        for (p, d, c) in &cond_order {
            for &l in &all_levels {
                let Some(rows) = cells.get(&(p.clone(), d.clone(), c.clone(), l)) else {
                    continue;
                };
                let values: Vec<f64> = rows.iter().filter_map(|r| metric.of(r)).collect();
                let Some(spread) = BoxStats::from_values(&values) else {
                    continue;
                };
                let (mean, se) = mean_and_se(&values);
                curves.push(CurvePoint {
                    preset: p.clone(),
                    design: d.clone(),
                    condition: c.clone(),
                    metric,
                    look_ahead: l,
                    n: values.len(),
                    mean,
                    se,
                    spread,
                });
            }
        }
    }

    let mut blocks: Vec<(String, String)> = Vec::new();
    for (p, d, _) in &cond_order {
        if !blocks.contains(&(p.clone(), d.clone())) {
            blocks.push((p.clone(), d.clone()));
        }
    }
    let mut stats = Vec::new();
    for (p, d) in blocks {
        let conditions: Vec<String> = cond_order
            .iter()
            .filter(|(cp, cd, _)| *cp == p && *cd == d)
            .map(|(_, _, c)| c.clone())
            .collect();
        for metric in Metric::ALL {
            let scores: Vec<LevelScore> = table
                .rows
                .iter()
                .filter(|r| r.ok() && r.preset == p && r.design == d)
                .filter_map(|r| {
                    metric.of(r).map(|value| LevelScore {
                        condition: r.condition.clone(),
                        level: r.look_ahead,
                        value,
                    })
                })
                .collect();
            if all_levels.len() < 2 {
                warnings.push(format!("{p}/{d}: fewer than 2 look-ahead values, no comparison"));
                break;
            }
            let summary = summarize_conditions(&scores, &conditions, level)?;
            for (c, why) in &summary.skipped {
                warnings.push(format!("{p}/{d}/{c} {}: skipped, {why}", metric.name()));
            }
            stats.push(StatsBlock {
                preset: p.clone(),
                design: d.clone(),
                metric,
                summary,
            });
        }
    }
    warnings.dedup();
    Ok(Summary { curves, stats, warnings })
}

impl Summary {
    /// Plot data: one row per (series, look-ahead) with mean, standard
    /// error and box-plot statistics.
    pub fn curves_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "preset", "design", "condition", "metric", "look_ahead", "n", "mean", "se", "min", "q1", "median", "q3", "max",
        ])?;
        for c in &self.curves {
            let b = &c.spread;
            w.write_record([
                c.preset.as_str(),
                &c.design,
                &c.condition,
                c.metric.name(),
                &c.look_ahead.to_string(),
                &c.n.to_string(),
                &c.mean.to_string(),
                &c.se.map_or_else(String::new, |s| s.to_string()),
                &b.min.to_string(),
                &b.q1.to_string(),
                &b.median.to_string(),
                &b.q3.to_string(),
                &b.max.to_string(),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn tukey_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["preset", "design", "metric", "condition", "pair", "diff", "lower", "upper", "sign"])?;
        for b in &self.stats {
            for row in &b.summary.rows {
                for pair in &row.tukey.pairs {
                    w.write_record([
                        b.preset.as_str(),
                        &b.design,
                        b.metric.name(),
                        &row.condition,
                        &pair.label(),
                        &pair.diff.to_string(),
                        &pair.lower.to_string(),
                        &pair.upper.to_string(),
                        &pair.sign.to_string(),
                    ])?;
                }
            }
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn anova_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["preset", "design", "metric", "condition", "f", "df1", "df2", "p", "q_critical"])?;
        for b in &self.stats {
            for row in &b.summary.rows {
                w.write_record([
                    b.preset.as_str(),
                    &b.design,
                    b.metric.name(),
                    &row.condition,
                    &row.anova.f.to_string(),
                    &row.anova.df1.to_string(),
                    &row.anova.df2.to_string(),
                    &row.anova.p.to_string(),
                    &row.tukey.q_critical.to_string(),
                ])?;
            }
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    /// Human-readable report: mean curves and Tukey sign grids.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let mut last_block = None;
        for c in self.curves.iter().filter(|c| c.metric == Metric::FrameRate) {
            let block = (&c.preset, &c.design, &c.condition);
            if last_block != Some(block) {
                let _ = writeln!(out, "\n{} {} {}: mean frame rate by look-ahead", c.preset, c.design, c.condition);
                last_block = Some(block);
            }
            let se = c.se.map_or_else(|| "-".to_string(), |s| format!("{:.4}", s));
            let _ = writeln!(out, "  L={:<3} n={:<5} mean={:.4} se={se} median={:.4}", c.look_ahead, c.n, c.mean, c.spread.median);
        }
        for b in &self.stats {
            let _ = writeln!(out, "\n{} {} {}: Tukey HSD sign grid", b.preset, b.design, b.metric.name());
            out.push_str(&b.summary.sign_table(&b.design));
        }
        if !self.warnings.is_empty() {
            out.push_str("\nwarnings:\n");
            for w in &self.warnings {
                let _ = writeln!(out, "  {w}");
            }
        }
        out
    }

    pub fn write(&self, out: &Path) -> Result<()> {
        fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        for (name, body) in [
            ("curves.csv", self.curves_csv()?),
            ("anova.csv", self.anova_csv()?),
            ("tukey.csv", self.tukey_csv()?),
            ("report.txt", self.report()),
        ] {
            let path = out.join(name);
            fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }
}
