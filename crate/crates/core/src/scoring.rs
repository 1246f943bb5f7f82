//! Frame-level correct rate and symbol-level accuracy / percent correct.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScoringError {
    #[error("length mismatch: hypothesis {hyp}, reference {reference}")]
    LengthMismatch { hyp: usize, reference: usize },
    #[error("empty reference")]
    EmptyReference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameScore {
    pub utterance: String,
    pub correct_frames: usize,
    pub total_frames: usize,
    pub rate: f64,
}

/// Fraction of positions where `hyp` and `reference` carry the same label.
pub fn frame_correct_rate<T: PartialEq>(
    utterance: &str,
    hyp: &[T],
    reference: &[T],
) -> Result<FrameScore, ScoringError> {
    if hyp.len() != reference.len() {
        return Err(ScoringError::LengthMismatch {
            hyp: hyp.len(),
            reference: reference.len(),
        });
    }
    let correct = hyp.iter().zip(reference).filter(|(h, r)| h == r).count();
    let total = reference.len();
    Ok(FrameScore {
        utterance: utterance.to_string(),
        correct_frames: correct,
        total_frames: total,
        rate: if total == 0 { 0.0 } else { correct as f64 / total as f64 },
    })
}

/// Run-length collapse of a frame label sequence into symbols.
pub fn collapse_to_segments<T: PartialEq + Clone>(labels: &[T]) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for l in labels {
        if out.last() != Some(l) {
            out.push(l.clone());
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditCosts {
    pub substitution: u32,
    pub deletion: u32,
    pub insertion: u32,
}

impl Default for EditCosts {
    /// HTK alignment penalties.
    fn default() -> Self {
        Self {
            substitution: 10,
            deletion: 7,
            insertion: 7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EditScore {
    pub hits: usize,
    pub deletions: usize,
    pub substitutions: usize,
    pub insertions: usize,
    pub ref_len: usize,
}

impl EditScore {
    pub fn percent_correct(&self) -> f64 {
        self.hits as f64 / self.ref_len as f64
    }

    pub fn accuracy(&self) -> f64 {
        (self.hits as f64 - self.insertions as f64) / self.ref_len as f64
    }

    pub fn cost(&self, costs: EditCosts) -> u64 {
        self.substitutions as u64 * costs.substitution as u64
            + self.deletions as u64 * costs.deletion as u64
            + self.insertions as u64 * costs.insertion as u64
    }
}

/// Minimum-cost alignment of `hyp` against `reference`.
///
/// Traceback prefers, among equally cheap moves, a match, then a
/// substitution, then a deletion, then an insertion.
pub fn align_edit<T: PartialEq>(
    reference: &[T],
    hyp: &[T],
    costs: EditCosts,
) -> Result<EditScore, ScoringError> {
    if reference.is_empty() {
        return Err(ScoringError::EmptyReference);
    }
    let n = reference.len();
    let m = hyp.len();
    let w = m + 1;
    let mut dp = vec![0u64; (n + 1) * w];
    for j in 1..=m {
        dp[j] = j as u64 * costs.insertion as u64;
    }
    for i in 1..=n {
        dp[i * w] = i as u64 * costs.deletion as u64;
        for j in 1..=m {
            let diag = dp[(i - 1) * w + j - 1]
                + if reference[i - 1] == hyp[j - 1] { 0 } else { costs.substitution as u64 };
            let del = dp[(i - 1) * w + j] + costs.deletion as u64;
            let ins = dp[i * w + j - 1] + costs.insertion as u64;
            dp[i * w + j] = diag.min(del).min(ins);
        }
    }

    let mut score = EditScore {
        hits: 0,
        deletions: 0,
        substitutions: 0,
        insertions: 0,
        ref_len: n,
    };
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = dp[i * w + j];
        if i > 0 && j > 0 {
            let same = reference[i - 1] == hyp[j - 1];
            let step = if same { 0 } else { costs.substitution as u64 };
            if dp[(i - 1) * w + j - 1] + step == here {
                if same {
                    score.hits += 1;
                } else {
                    score.substitutions += 1;
                }
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && dp[(i - 1) * w + j] + costs.deletion as u64 == here {
            score.deletions += 1;
            i -= 1;
        } else {
            score.insertions += 1;
            j -= 1;
        }
    }
    Ok(score)
}
