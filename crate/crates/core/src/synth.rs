//! Seeded synthetic corpora: reference label sequences sampled from
//! generator HMMs, and posterior streams shaped to behave like the output
//! of frame classifiers with or without temporal context.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::hmm::{PhoneId, PhoneSet, PosteriorFrame, PriorVector};
use crate::topology::Transcription;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("unknown preset {0:?} (expected static, dyn-short, dyn-long or clean)")]
    UnknownPreset(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> SynthError + '_ {
    move |source| SynthError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// How reference labels are turned into a posterior stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorParams {
    /// Softmax gain on the smeared label evidence. `None` takes the hard
    /// argmax (the infinite-gain limit).
    pub sharpness: Option<f64>,
    /// Output activities are mapped into `[eps, 1 - eps]` before normalizing.
    pub eps: f64,
    /// Half-width of the triangular label smear, in frames.
    pub window: usize,
    /// Fraction of frames whose peak moves to another class.
    pub error_rate: f64,
    /// Mean length in frames of a run of displaced frames; 1 displaces
    /// frames independently.
    pub burst: f64,
    /// Standard deviation of Gaussian noise added to the softmax logits.
    pub noise: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// No temporal context; noisy, with errors that persist for a few frames.
    Static,
    /// Short context, moderate errors.
    DynShort,
    /// Long context, few errors, trained on hard targets.
    DynLong,
    /// Exact one-hot streams.
    Clean,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Static, Preset::DynShort, Preset::DynLong, Preset::Clean];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Static => "static",
            Preset::DynShort => "dyn-short",
            Preset::DynLong => "dyn-long",
            Preset::Clean => "clean",
        }
    }

    pub fn params(self) -> PosteriorParams {
        match self {
            Preset::Static => PosteriorParams {
                sharpness: Some(4.0),
                eps: 0.1,
                window: 0,
                error_rate: 0.45,
                burst: 3.0,
                noise: 1.0,
            },
            Preset::DynShort => PosteriorParams {
                sharpness: Some(6.0),
                eps: 0.1,
                window: 2,
                error_rate: 0.25,
                burst: 1.0,
                noise: 2.0,
            },
            Preset::DynLong => PosteriorParams {
                sharpness: Some(8.0),
                eps: 0.0,
                window: 5,
                error_rate: 0.05,
                burst: 1.0,
                noise: 2.5,
            },
            Preset::Clean => PosteriorParams {
                sharpness: None,
                eps: 0.0,
                window: 0,
                error_rate: 0.0,
                burst: 1.0,
                noise: 0.0,
            },
        }
    }
}

impl std::fmt::Display for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| SynthError::UnknownPreset(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub num_phones: usize,
    pub states_per_phone: usize,
    pub self_loop: f64,
    pub min_phones: usize,
    pub max_phones: usize,
    pub posterior: PosteriorParams,
}

impl GeneratorConfig {
    pub fn new(num_phones: usize, posterior: PosteriorParams) -> Result<Self, SynthError> {
        let c = Self {
            num_phones,
            states_per_phone: 3,
            self_loop: 0.5,
            min_phones: 8,
            max_phones: 16,
            posterior,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn preset(num_phones: usize, preset: Preset) -> Result<Self, SynthError> {
        Self::new(num_phones, preset.params())
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidConfig(m));
        let p = &self.posterior;
        if self.num_phones < 2 {
            return bad(format!("need at least 2 phones, got {}", self.num_phones));
        }
        if self.states_per_phone == 0 {
            return bad("states per phone must be positive".into());
        }
        if !(0.0..1.0).contains(&self.self_loop) {
            return bad(format!("self-loop {} outside [0, 1)", self.self_loop));
        }
        if self.min_phones == 0 || self.min_phones > self.max_phones {
            return bad(format!("bad phone count range {}..={}", self.min_phones, self.max_phones));
        }
        if !(0.0..0.5).contains(&p.eps) {
            return bad(format!("eps {} outside [0, 0.5)", p.eps));
        }
        if !(0.0..1.0).contains(&p.error_rate) {
            return bad(format!("error rate {} outside [0, 1)", p.error_rate));
        }
        if !(p.burst >= 1.0 && p.burst.is_finite()) {
            return bad(format!("burst length {} must be at least 1", p.burst));
        }
        if p.sharpness.is_some_and(|b| !(b > 0.0 && b.is_finite())) {
            return bad("sharpness must be positive and finite".into());
        }
        if !(p.noise >= 0.0 && p.noise.is_finite()) {
            return bad(format!("noise {} must be nonnegative", p.noise));
        }
        Ok(())
    }
}

/// SplitMix64 step; derives independent per-utterance seeds.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Frames spent by one phone: each state lasts `1 + Geometric(1 - self_loop)`.
fn sample_duration(config: &GeneratorConfig, rng: &mut impl Rng) -> usize {
    let mut frames = 0;
    for _ in 0..config.states_per_phone {
        frames += 1;
        while rng.random::<f64>() < config.self_loop {
            frames += 1;
        }
    }
    frames
}

/// Samples a transcription and its frame labels. Consecutive phones are
/// always distinct, so every phone boundary is visible in the labels.
pub fn sample_utterance(
    config: &GeneratorConfig,
    id: &str,
    seed: u64,
) -> Result<(Transcription, Vec<PhoneId>), SynthError> {
    config.validate()?;
    let mut rng = rng_for(seed, 0);
    let n = rng.random_range(config.min_phones..=config.max_phones);
    let k = config.num_phones as u32;
    let mut phones: Vec<PhoneId> = Vec::with_capacity(n);
    for _ in 0..n {
        let p = match phones.last() {
            None => rng.random_range(0..k),
            Some(prev) => {
                let p = rng.random_range(0..k - 1);
                if p >= prev.0 {
                    p + 1
                } else {
                    p
                }
            }
        };
        phones.push(PhoneId(p));
    }
    let mut labels = Vec::new();
    for &p in &phones {
        let d = sample_duration(config, &mut rng);
        labels.extend(std::iter::repeat_n(p, d));
    }
    let tr = Transcription::new(id, phones).expect("at least one phone");
    Ok((tr, labels))
}

/// Posterior stream for `labels` with `k` classes.
///
/// Each frame starts from the (possibly displaced) one-hot label, is
/// averaged with its neighbours under a triangular window, pushed through a
/// noisy softmax, then mapped into `[eps, 1 - eps]` and renormalized.
pub fn emit_posteriors(
    labels: &[PhoneId],
    k: usize,
    params: &PosteriorParams,
    rng: &mut impl Rng,
) -> Vec<PosteriorFrame> {
    let n = labels.len();
    let displace = |l: usize, rng: &mut dyn rand::RngCore| {
        let o = rng.random_range(0..k - 1);
        if o >= l {
            o + 1
        } else {
            o
        }
    };
    let mut observed = Vec::with_capacity(n);
    if params.burst <= 1.0 {
        for l in labels {
            let l = l.index();
            let hit = params.error_rate > 0.0 && rng.random::<f64>() < params.error_rate;
            observed.push(if hit { displace(l, rng) } else { l });
        }
    } else {
        // alternating clean/displaced runs; displaced runs are geometric
        // with mean `burst`, clean runs are sized to keep the overall rate
        let start = params.error_rate / (params.burst * (1.0 - params.error_rate));
        let stay = 1.0 - 1.0 / params.burst;
        let mut current: Option<(usize, usize)> = None;
        for l in labels {
            let l = l.index();
            current = match current {
                Some((ref_l, c)) => {
                    if rng.random::<f64>() >= stay {
                        None
                    } else if ref_l == l || c != l {
                        Some((l, c))
                    } else {
                        // the reference moved onto the displaced class
                        Some((l, displace(l, rng)))
                    }
                }
                None if params.error_rate > 0.0 && rng.random::<f64>() < start => Some((l, displace(l, rng))),
                None => None,
            };
            observed.push(current.map_or(l, |(_, c)| c));
        }
    }
    let w = params.window as isize;
    let mut frames = Vec::with_capacity(n);
    let mut evidence = vec![0.0; k];
    for t in 0..n as isize {
        evidence.iter_mut().for_each(|e| *e = 0.0);
        let mut total = 0.0;
        for d in -w..=w {
            let s = t + d;
            if s < 0 || s >= n as isize {
                continue;
            }
            let weight = (w + 1 - d.abs()) as f64;
            evidence[observed[s as usize]] += weight;
            total += weight;
        }
        evidence.iter_mut().for_each(|e| *e /= total);
        if params.noise > 0.0 {
            for e in evidence.iter_mut() {
                let z: f64 = StandardNormal.sample(rng);
                *e += params.noise * z / params.sharpness.unwrap_or(1.0);
            }
        }
        let p = match params.sharpness {
            None => {
                let best = crate::hmm::argmax_first(&evidence);
                let mut p = vec![0.0; k];
                p[best] = 1.0;
                p
            }
            Some(beta) => softmax(&evidence, beta),
        };
        let eps = params.eps;
        let mut o: Vec<f64> = p.iter().map(|v| eps + (1.0 - 2.0 * eps) * v).collect();
        let sum: f64 = o.iter().sum();
        o.iter_mut().for_each(|v| *v /= sum);
        frames.push(PosteriorFrame::new(o).expect("clamped frame is a distribution"));
    }
    frames
}

fn softmax(v: &[f64], beta: f64) -> Vec<f64> {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = v.iter().map(|x| (beta * (x - m)).exp()).collect();
    let s: f64 = out.iter().sum();
    out.iter_mut().for_each(|x| *x /= s);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Utterance {
    pub transcription: Transcription,
    pub labels: Vec<PhoneId>,
    pub posteriors: Vec<PosteriorFrame>,
}

impl Utterance {
    pub fn id(&self) -> &str {
        &self.transcription.id
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub config: GeneratorConfig,
    pub seed: u64,
    pub phones: PhoneSet,
    pub priors: PriorVector,
    pub utterances: Vec<Utterance>,
}

pub fn utterance_id(i: usize) -> String {
    format!("utt{i:05}")
}

/// Generates `n` utterances in memory. Utterance `i` depends only on
/// `(config, seed, i)`.
pub fn generate(config: &GeneratorConfig, n: usize, seed: u64) -> Result<Corpus, SynthError> {
    config.validate()?;
    let k = config.num_phones;
    let utterances: Vec<Utterance> = (0..n)
        .into_par_iter()
        .map(|i| {
            let useed = derive_seed(seed, i as u64);
            let (transcription, labels) = sample_utterance(config, &utterance_id(i), useed)?;
            let mut rng = rng_for(useed, 1);
            let posteriors = emit_posteriors(&labels, k, &config.posterior, &mut rng);
            Ok(Utterance {
                transcription,
                labels,
                posteriors,
            })
        })
        .collect::<Result<_, SynthError>>()?;
    let priors = PriorVector::from_labels(utterances.iter().flat_map(|u| u.labels.iter().copied()), k);
    Ok(Corpus {
        config: config.clone(),
        seed,
        phones: PhoneSet::numbered(k),
        priors,
        utterances,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub tool: String,
    pub version: String,
    pub config: GeneratorConfig,
    pub seed: u64,
    pub phones: PhoneSet,
    pub priors: PriorVector,
    pub utterances: Vec<String>,
    /// SHA-256 over every data file, in utterance order.
    pub hash: String,
}

pub const MANIFEST: &str = "manifest.json";

fn format_posteriors(frames: &[PosteriorFrame]) -> String {
    let mut out = String::new();
    for f in frames {
        let line: Vec<String> = f.values().iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

fn utterance_files(u: &Utterance, phones: &PhoneSet) -> [(String, String); 3] {
    let id = u.id();
    let label = |p: &PhoneId| phones.label(*p).to_string();
    let tr: Vec<String> = u.transcription.phones.iter().map(label).collect();
    let lab: String = u.labels.iter().map(|p| label(p) + "\n").collect();
    [
        (format!("{id}.phn"), tr.join(" ") + "\n"),
        (format!("{id}.lab"), lab),
        (format!("{id}.post"), format_posteriors(&u.posteriors)),
    ]
}

/// Generates a corpus and writes it under `dir`.
pub fn make_corpus(config: &GeneratorConfig, n: usize, seed: u64, dir: &Path) -> Result<Corpus, SynthError> {
    let corpus = generate(config, n, seed)?;
    write_corpus(&corpus, dir)?;
    Ok(corpus)
}

pub fn write_corpus(corpus: &Corpus, dir: &Path) -> Result<CorpusManifest, SynthError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut hasher = Sha256::new();
    for u in &corpus.utterances {
        for (name, body) in utterance_files(u, &corpus.phones) {
            hasher.update(name.as_bytes());
            hasher.update([0u8]);
            hasher.update(body.as_bytes());
            let path = dir.join(&name);
            fs::write(&path, body).map_err(io_err(&path))?;
        }
    }
    let manifest = CorpusManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: corpus.config.clone(),
        seed: corpus.seed,
        phones: corpus.phones.clone(),
        priors: corpus.priors.clone(),
        utterances: corpus.utterances.iter().map(|u| u.id().to_string()).collect(),
        hash: hex::encode(hasher.finalize()),
    };
    let path = dir.join(MANIFEST);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, json + "\n").map_err(io_err(&path))?;
    Ok(manifest)
}

pub fn read_manifest(dir: &Path) -> Result<CorpusManifest, SynthError> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    serde_json::from_str(&text).map_err(|e| SynthError::Format {
        path,
        msg: e.to_string(),
    })
}

pub fn load_corpus(dir: &Path) -> Result<Corpus, SynthError> {
    let m = read_manifest(dir)?;
    let k = m.phones.len();
    let mut utterances = Vec::with_capacity(m.utterances.len());
    for id in &m.utterances {
        let read = |ext: &str| -> Result<(PathBuf, String), SynthError> {
            let path = dir.join(format!("{id}.{ext}"));
            let text = fs::read_to_string(&path).map_err(io_err(&path))?;
            Ok((path, text))
        };
        let parse_phones = |path: &Path, text: &str| -> Result<Vec<PhoneId>, SynthError> {
            text.split_whitespace()
                .map(|l| {
                    m.phones.id_of(l).map_err(|e| SynthError::Format {
                        path: path.to_path_buf(),
                        msg: e.to_string(),
                    })
                })
                .collect()
        };
        let (p, text) = read("phn")?;
        let phones = parse_phones(&p, &text)?;
        let transcription = Transcription::new(id.clone(), phones).map_err(|e| SynthError::Format {
            path: p.clone(),
            msg: e.to_string(),
        })?;
        let (p, text) = read("lab")?;
        let labels = parse_phones(&p, &text)?;
        let (p, text) = read("post")?;
        let fmt_err = |msg: String| SynthError::Format { path: p.clone(), msg };
        let mut posteriors = Vec::with_capacity(labels.len());
        for (i, line) in text.lines().enumerate() {
            let values: Vec<f64> = line
                .split_whitespace()
                .map(|v| v.parse::<f64>().map_err(|e| fmt_err(format!("line {}: {e}", i + 1))))
                .collect::<Result<_, _>>()?;
            if values.len() != k {
                return Err(fmt_err(format!("line {}: {} columns, expected {k}", i + 1, values.len())));
            }
            posteriors.push(PosteriorFrame::new(values).map_err(|e| fmt_err(format!("line {}: {e}", i + 1)))?);
        }
        if posteriors.len() != labels.len() {
            return Err(fmt_err(format!("{} frames but {} labels", posteriors.len(), labels.len())));
        }
        utterances.push(Utterance {
            transcription,
            labels,
            posteriors,
        });
    }
    Ok(Corpus {
        config: m.config,
        seed: m.seed,
        phones: m.phones,
        priors: m.priors,
        utterances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::confidence::{frame_entropy, simulated_entropy};
    use proptest::prelude::*;

    fn cfg(preset: Preset) -> GeneratorConfig {
        GeneratorConfig::preset(10, preset).unwrap()
    }

    #[test]
    fn zero_self_loop_gives_fixed_durations() {
        let mut c = cfg(Preset::Clean);
        c.self_loop = 0.0;
        let (tr, labels) = sample_utterance(&c, "u", 5).unwrap();
        assert_eq!(labels.len(), 3 * tr.len());
        for (i, chunk) in labels.chunks(3).enumerate() {
            assert!(chunk.iter().all(|&p| p == tr.phones[i]));
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let c = cfg(Preset::Static);
        assert_eq!(sample_utterance(&c, "u", 9).unwrap(), sample_utterance(&c, "u", 9).unwrap());
        assert_ne!(sample_utterance(&c, "u", 9).unwrap().1, sample_utterance(&c, "u", 10).unwrap().1);
    }

    #[test]
    fn mean_phone_duration_is_geometric_mean() {
        let c = cfg(Preset::Clean);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 10_000;
        let total: usize = (0..n).map(|_| sample_duration(&c, &mut rng)).sum();
        let mean = total as f64 / n as f64;
        let expected = c.states_per_phone as f64 / (1.0 - c.self_loop);
        assert!((mean - expected).abs() / expected < 0.02, "{mean} vs {expected}");
    }

    #[test]
    fn clean_stream_is_one_hot_on_reference() {
        let c = cfg(Preset::Clean);
        let (_, labels) = sample_utterance(&c, "u", 2).unwrap();
        let post = emit_posteriors(&labels, 10, &c.posterior, &mut ChaCha8Rng::seed_from_u64(0));
        for (f, l) in post.iter().zip(&labels) {
            assert_eq!(f.argmax(), *l);
            assert_eq!(f.values()[l.index()], 1.0);
        }
        // a finite gain without noise or smear keeps the argmax
        let soft = PosteriorParams {
            sharpness: Some(3.0),
            ..c.posterior
        };
        let post = emit_posteriors(&labels, 10, &soft, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(post.iter().zip(&labels).all(|(f, l)| f.argmax() == *l));
    }

    #[test]
    fn eps_clamp_bounds_entropy_from_below() {
        let c = cfg(Preset::Static);
        let floor = simulated_entropy(1, 9, 0.9, 0.1).unwrap();
        let (_, labels) = sample_utterance(&c, "u", 4).unwrap();
        let post = emit_posteriors(&labels, 10, &c.posterior, &mut ChaCha8Rng::seed_from_u64(4));
        for f in &post {
            assert!(frame_entropy(f) >= floor - 1e-9);
        }
    }

    #[test]
    fn corruption_rate_sets_map_accuracy() {
        let params = PosteriorParams {
            sharpness: Some(5.0),
            eps: 0.0,
            window: 0,
            error_rate: 0.3,
            burst: 1.0,
            noise: 0.0,
        };
        let labels: Vec<PhoneId> = (0..10_000).map(|i| PhoneId((i / 7 % 10) as u32)).collect();
        let post = emit_posteriors(&labels, 10, &params, &mut ChaCha8Rng::seed_from_u64(8));
        let correct = post.iter().zip(&labels).filter(|(f, l)| f.argmax() == **l).count();
        let rate = correct as f64 / labels.len() as f64;
        assert!((rate - 0.7).abs() < 0.02 * 0.7, "{rate}");
    }

    #[test]
    fn bursts_keep_the_error_rate_and_lengthen_runs() {
        let labels: Vec<PhoneId> = (0..20_000).map(|i| PhoneId((i / 7 % 10) as u32)).collect();
        let mut runs = Vec::new();
        for burst in [1.0, 3.0] {
            let params = PosteriorParams {
                sharpness: Some(5.0),
                eps: 0.0,
                window: 0,
                error_rate: 0.3,
                burst,
                noise: 0.0,
            };
            let post = emit_posteriors(&labels, 10, &params, &mut ChaCha8Rng::seed_from_u64(2));
            let wrong: Vec<bool> = post.iter().zip(&labels).map(|(f, l)| f.argmax() != *l).collect();
            let rate = wrong.iter().filter(|&&w| w).count() as f64 / wrong.len() as f64;
            assert!((rate - 0.3).abs() < 0.02, "burst {burst}: {rate}");
            let starts = wrong.windows(2).filter(|w| !w[0] && w[1]).count();
            runs.push(wrong.iter().filter(|&&w| w).count() as f64 / starts as f64);
        }
        assert!(runs[1] > 2.0 * runs[0], "{runs:?}");
    }

    #[test]
    fn smear_hurts_boundaries_more_than_centres() {
        let c = cfg(Preset::DynShort);
        let corpus = generate(&c, 60, 3).unwrap();
        let (mut near, mut near_ok, mut mid, mut mid_ok) = (0usize, 0usize, 0usize, 0usize);
        for u in &corpus.utterances {
            let n = u.labels.len();
            for t in 0..n {
                let boundary = (t > 0 && u.labels[t - 1] != u.labels[t]) || (t + 1 < n && u.labels[t + 1] != u.labels[t]);
                let ok = u.posteriors[t].argmax() == u.labels[t];
                if boundary {
                    near += 1;
                    near_ok += ok as usize;
                } else {
                    mid += 1;
                    mid_ok += ok as usize;
                }
            }
        }
        assert!((near_ok as f64 / near as f64) < (mid_ok as f64 / mid as f64));
    }

    #[test]
    fn priors_are_near_uniform_on_large_corpus() {
        let corpus = generate(&cfg(Preset::Clean), 2000, 1).unwrap();
        for &p in corpus.priors.values() {
            assert!((p - 0.1).abs() / 0.1 < 0.05, "{p}");
        }
    }

    #[test]
    fn written_corpus_round_trips_and_is_reproducible() {
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a"), dir.path().join("b"));
        let c = cfg(Preset::DynShort);
        let corpus = make_corpus(&c, 5, 77, &a).unwrap();
        make_corpus(&c, 5, 77, &b).unwrap();
        for entry in fs::read_dir(&a).unwrap() {
            let name = entry.unwrap().file_name();
            assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap());
        }
        assert_eq!(load_corpus(&a).unwrap(), corpus);
    }

    #[test]
    fn empty_corpus_has_valid_manifest() {
        let dir = tempfile::tempdir().unwrap();
        make_corpus(&cfg(Preset::Static), 0, 1, dir.path()).unwrap();
        let m = read_manifest(dir.path()).unwrap();
        assert!(m.utterances.is_empty());
        assert_eq!(m.priors.len(), 10);
    }

    #[test]
    fn preset_names_parse() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("fast".parse::<Preset>().is_err());
    }

    proptest! {
        #[test]
        fn frames_are_clamped_distributions(seed in any::<u64>(), preset in 0usize..4) {
            let c = cfg(Preset::ALL[preset]);
            let (_, labels) = sample_utterance(&c, "u", seed).unwrap();
            let post = emit_posteriors(&labels, 10, &c.posterior, &mut ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(post.len(), labels.len());
            let eps = c.posterior.eps;
            let mass = 10.0 * eps + 1.0 - 2.0 * eps;
            for f in &post {
                prop_assert!((f.values().iter().sum::<f64>() - 1.0).abs() < 1e-9);
                for &v in f.values() {
                    let raw = v * mass;
                    prop_assert!(raw >= eps - 1e-12 && raw <= 1.0 - eps + 1e-12);
                }
            }
        }
    }
}
