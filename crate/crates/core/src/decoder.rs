//! Full and truncated (bounded look-ahead) Viterbi decoding.
//!
//! Accumulators live in the log domain. Zero-weight arcs and entries are
//! `-inf` and never win a max. The streaming decoder keeps only the last
//! `L + 1` trellis columns: when frame `n + L` arrives it backtracks `L`
//! steps from the best state and emits its decision for frame `n`. At the
//! end of the utterance the remaining frames are read off the best complete
//! path.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hmm::{
    posterior_to_likelihood, HmmError, LikelihoodFrame, PhoneId, PosteriorFrame, PriorVector,
    StateId, TransitionNetwork, DEFAULT_FLOOR,
};

const NO_STATE: u32 = u32::MAX;

#[derive(Debug, Error, PartialEq)]
pub enum DecodeError {
    #[error("empty likelihood stream")]
    EmptyStream,
    #[error("frame {frame}: expected {expected} classes, got {got}")]
    Dimension {
        frame: usize,
        expected: usize,
        got: usize,
    },
    #[error("frame {frame}: likelihood is NaN or +inf")]
    InvalidFrame { frame: usize },
    #[error("frame {frame}: no state has a finite score")]
    NoSurvivingPath { frame: usize },
    #[error("look-ahead must be at least 1")]
    ZeroLookAhead,
    #[error("frame {t_end} with depth {depth} not covered by buffered frames {first}..{next}")]
    OutOfRange {
        t_end: usize,
        depth: usize,
        first: usize,
        next: usize,
    },
    #[error(transparent)]
    Hmm(#[from] HmmError),
}

/// Which state wins when scores are exactly equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    #[default]
    LowestStateId,
    HighestStateId,
}

impl TieBreak {
    #[inline]
    fn prefers(self, candidate: f64, incumbent: f64) -> bool {
        match self {
            TieBreak::LowestStateId => candidate > incumbent,
            TieBreak::HighestStateId => candidate >= incumbent,
        }
    }

    fn argmax(self, values: &[f64]) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, &v) in values.iter().enumerate() {
            if v == f64::NEG_INFINITY {
                continue;
            }
            match best {
                Some(b) if !self.prefers(v, values[b]) => {}
                _ => best = Some(i),
            }
        }
        best
    }
}

impl std::str::FromStr for TieBreak {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lowest" | "lowest-state-id" => Ok(TieBreak::LowestStateId),
            "highest" | "highest-state-id" => Ok(TieBreak::HighestStateId),
            other => Err(format!("unknown tie-break rule {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecodeConfig {
    pub look_ahead: usize,
    pub tie_break: TieBreak,
    pub floor: f64,
}

impl DecodeConfig {
    pub fn new(look_ahead: usize) -> Result<Self, DecodeError> {
        if look_ahead == 0 {
            return Err(DecodeError::ZeroLookAhead);
        }
        Ok(Self {
            look_ahead,
            tie_break: TieBreak::default(),
            floor: DEFAULT_FLOOR,
        })
    }

    pub fn with_tie_break(mut self, tie_break: TieBreak) -> Self {
        self.tie_break = tie_break;
        self
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self
    }
}

/// Ring buffer of trellis columns. Column `t` holds `delta_t(j)` and the
/// backpointer into column `t - 1` for every state `j`.
#[derive(Debug, Clone)]
pub struct Trellis {
    num_states: usize,
    capacity: usize,
    delta: Vec<f64>,
    psi: Vec<u32>,
    next: usize,
    tie_break: TieBreak,
    scratch_delta: Vec<f64>,
    scratch_psi: Vec<u32>,
}

impl Trellis {
    pub fn new(num_states: usize, capacity: usize, tie_break: TieBreak) -> Self {
        let capacity = capacity.max(1);
        Self {
            num_states,
            capacity,
            delta: vec![f64::NEG_INFINITY; capacity * num_states],
            psi: vec![NO_STATE; capacity * num_states],
            next: 0,
            tie_break,
            scratch_delta: vec![f64::NEG_INFINITY; num_states],
            scratch_psi: vec![NO_STATE; num_states],
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Number of accumulator and backpointer cells held, independent of how
    /// many frames have been pushed.
    pub fn cells(&self) -> usize {
        self.delta.len()
    }

    /// Frames pushed so far.
    pub fn frames(&self) -> usize {
        self.next
    }

    /// First frame still buffered.
    pub fn first_buffered(&self) -> usize {
        self.next.saturating_sub(self.capacity)
    }

    fn slot(&self, t: usize) -> usize {
        (t % self.capacity) * self.num_states
    }

    pub fn delta(&self, t: usize) -> Option<&[f64]> {
        if t >= self.next || t < self.first_buffered() {
            return None;
        }
        let s = self.slot(t);
        Some(&self.delta[s..s + self.num_states])
    }

    fn psi(&self, t: usize) -> &[u32] {
        let s = self.slot(t);
        &self.psi[s..s + self.num_states]
    }

    /// Runs one step of the recursion and stores the new column.
    ///
    /// `log_entry` seeds the first column; later columns take the best
    /// predecessor over the network's incoming arcs.
    pub fn advance(
        &mut self,
        net: &TransitionNetwork,
        log_entry: &[f64],
        frame: &LikelihoodFrame,
    ) -> Result<(), DecodeError> {
        let t = self.next;
        let k = net.num_classes();
        if frame.len() != k {
            return Err(DecodeError::Dimension {
                frame: t,
                expected: k,
                got: frame.len(),
            });
        }
        let logb = frame.log_values();
        if logb.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(DecodeError::InvalidFrame { frame: t });
        }
        let phones = net.state_phones();
        let mut any_finite = false;
        if t == 0 {
            for j in 0..self.num_states {
                let d = log_entry[j] + logb[phones[j].index()];
                self.scratch_delta[j] = d;
                self.scratch_psi[j] = NO_STATE;
                any_finite |= d.is_finite();
            }
        } else {
            let prev_slot = self.slot(t - 1);
            let prev = &self.delta[prev_slot..prev_slot + self.num_states];
            for j in 0..self.num_states {
                let mut best = f64::NEG_INFINITY;
                let mut arg = NO_STATE;
                for &(i, logw) in net.incoming(j) {
                    let d = prev[i as usize];
                    if d == f64::NEG_INFINITY {
                        continue;
                    }
                    let cand = d + logw;
                    if arg == NO_STATE || self.tie_break.prefers(cand, best) {
                        best = cand;
                        arg = i;
                    }
                }
                let d = if arg == NO_STATE {
                    f64::NEG_INFINITY
                } else {
                    best + logb[phones[j].index()]
                };
                self.scratch_delta[j] = d;
                self.scratch_psi[j] = if d == f64::NEG_INFINITY { NO_STATE } else { arg };
                any_finite |= d.is_finite();
            }
        }
        if !any_finite {
            return Err(DecodeError::NoSurvivingPath { frame: t });
        }
        let s = self.slot(t);
        self.delta[s..s + self.num_states].copy_from_slice(&self.scratch_delta);
        self.psi[s..s + self.num_states].copy_from_slice(&self.scratch_psi);
        self.next += 1;
        Ok(())
    }

    /// Best state in column `t` under the tie rule.
    pub fn argmax(&self, t: usize) -> Option<StateId> {
        self.delta(t)
            .and_then(|d| self.tie_break.argmax(d))
            .map(|j| StateId(j as u32))
    }

    /// Follows backpointers `depth` steps back from the best state at
    /// `t_end`. The returned path covers frames `t_end - depth ..= t_end`.
    pub fn backtrack_at(&self, t_end: usize, depth: usize) -> Result<Vec<StateId>, DecodeError> {
        let first = self.first_buffered();
        if t_end >= self.next || depth > t_end || t_end - depth < first {
            return Err(DecodeError::OutOfRange {
                t_end,
                depth,
                first,
                next: self.next,
            });
        }
        let mut state = self
            .argmax(t_end)
            .ok_or(DecodeError::NoSurvivingPath { frame: t_end })?;
        let mut path = vec![state; depth + 1];
        for back in 0..depth {
            let t = t_end - back;
            let prev = self.psi(t)[state.index()];
            debug_assert_ne!(prev, NO_STATE);
            state = StateId(prev);
            path[depth - back - 1] = state;
        }
        Ok(path)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViterbiPath {
    pub states: Vec<StateId>,
    pub log_score: f64,
}

impl ViterbiPath {
    pub fn phones(&self, net: &TransitionNetwork) -> Vec<PhoneId> {
        self.states.iter().map(|&s| net.phone_of(s)).collect()
    }
}

/// Exact Viterbi over the whole stream.
pub fn viterbi_full(
    net: &TransitionNetwork,
    stream: &[LikelihoodFrame],
    tie_break: TieBreak,
) -> Result<ViterbiPath, DecodeError> {
    if stream.is_empty() {
        return Err(DecodeError::EmptyStream);
    }
    let trellis = full_trellis(net, stream, tie_break)?;
    let last = stream.len() - 1;
    let states = trellis.backtrack_at(last, last)?;
    let end = states[last];
    let log_score = trellis.delta(last).map(|d| d[end.index()]).unwrap_or(f64::NEG_INFINITY);
    Ok(ViterbiPath { states, log_score })
}

/// Trellis holding every column of `stream`, for inspection and tests.
pub fn full_trellis(
    net: &TransitionNetwork,
    stream: &[LikelihoodFrame],
    tie_break: TieBreak,
) -> Result<Trellis, DecodeError> {
    let log_entry = net.log_entry_weights();
    let mut trellis = Trellis::new(net.num_states(), stream.len(), tie_break);
    for frame in stream {
        trellis.advance(net, &log_entry, frame)?;
    }
    Ok(trellis)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decision {
    pub frame: usize,
    pub phone: PhoneId,
    pub state: StateId,
    /// Frames received after `frame` before this decision was emitted.
    pub latency: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DecisionStream {
    pub decisions: Vec<Decision>,
}

impl DecisionStream {
    pub fn len(&self) -> usize {
        self.decisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decisions.is_empty()
    }

    pub fn phones(&self) -> Vec<PhoneId> {
        self.decisions.iter().map(|d| d.phone).collect()
    }

    pub fn states(&self) -> Vec<StateId> {
        self.decisions.iter().map(|d| d.state).collect()
    }
}

/// Frame-synchronous truncated Viterbi decoder for one utterance.
#[derive(Debug)]
pub struct StreamingDecoder<'n> {
    net: &'n TransitionNetwork,
    config: DecodeConfig,
    log_entry: Vec<f64>,
    trellis: Trellis,
    emitted: usize,
}

impl<'n> StreamingDecoder<'n> {
    pub fn new(net: &'n TransitionNetwork, config: DecodeConfig) -> Result<Self, DecodeError> {
        if config.look_ahead == 0 {
            return Err(DecodeError::ZeroLookAhead);
        }
        Ok(Self {
            net,
            config,
            log_entry: net.log_entry_weights(),
            trellis: Trellis::new(net.num_states(), config.look_ahead + 1, config.tie_break),
            emitted: 0,
        })
    }

    pub fn trellis(&self) -> &Trellis {
        &self.trellis
    }

    /// Feeds one frame. Once `L` further frames have been seen, the decision
    /// for the frame `L` steps back is returned.
    pub fn push(&mut self, frame: &LikelihoodFrame) -> Result<Option<Decision>, DecodeError> {
        self.trellis.advance(self.net, &self.log_entry, frame)?;
        let t = self.trellis.frames() - 1;
        let l = self.config.look_ahead;
        if t < l {
            return Ok(None);
        }
        let path = self.trellis.backtrack_at(t, l)?;
        let state = path[0];
        let d = Decision {
            frame: t - l,
            phone: self.net.phone_of(state),
            state,
            latency: l,
        };
        self.emitted += 1;
        Ok(Some(d))
    }

    /// Decisions for the frames still pending, taken from the best path at
    /// the last frame.
    pub fn finalize(self) -> Result<Vec<Decision>, DecodeError> {
        let n = self.trellis.frames();
        if n == 0 {
            return Err(DecodeError::EmptyStream);
        }
        let last = n - 1;
        let depth = last - self.emitted;
        let path = self.trellis.backtrack_at(last, depth)?;
        Ok(path
            .into_iter()
            .enumerate()
            .map(|(offset, state)| {
                let frame = self.emitted + offset;
                Decision {
                    frame,
                    phone: self.net.phone_of(state),
                    state,
                    latency: last - frame,
                }
            })
            .collect())
    }
}

/// Streams `stream` through a [`StreamingDecoder`] and finalizes.
pub fn decode_streaming(
    net: &TransitionNetwork,
    stream: &[LikelihoodFrame],
    config: DecodeConfig,
) -> Result<DecisionStream, DecodeError> {
    if stream.is_empty() {
        return Err(DecodeError::EmptyStream);
    }
    let mut dec = StreamingDecoder::new(net, config)?;
    let mut decisions = Vec::with_capacity(stream.len());
    for frame in stream {
        decisions.extend(dec.push(frame)?);
    }
    decisions.extend(dec.finalize()?);
    Ok(DecisionStream { decisions })
}

/// Scales posteriors by `priors` (using the config floor) and decodes.
pub fn decode_posteriors(
    net: &TransitionNetwork,
    posteriors: &[PosteriorFrame],
    priors: &PriorVector,
    config: DecodeConfig,
) -> Result<DecisionStream, DecodeError> {
    let stream = posteriors
        .iter()
        .map(|p| posterior_to_likelihood(p, priors, config.floor))
        .collect::<Result<Vec<_>, _>>()?;
    decode_streaming(net, &stream, config)
}
