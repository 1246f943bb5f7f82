//! Core data model: phonetic classes, phone models, transition networks and
//! posterior/likelihood frames.
//!
//! Networks are plain weighted graphs of emitting states. Each state belongs
//! to one phonetic class; the decoder scores a state with the likelihood of
//! its class. Outgoing weights are not required to sum to one, so a network
//! is a weighted grammar rather than a stochastic one.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used for probability-sum checks.
const SUM_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum HmmError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid prior at class {index}: {value}")]
    InvalidPrior { index: usize, value: f64 },
    #[error("priors sum to {0}, expected 1")]
    PriorSum(f64),
    #[error("invalid posterior frame: {0}")]
    InvalidPosterior(String),
    #[error("floor must be positive, got {0}")]
    InvalidFloor(f64),
    #[error("self-loop probability {0} leaves no way out of the state")]
    DeadEnd(f64),
    #[error("invalid probability {0}")]
    InvalidProbability(f64),
    #[error("phone model needs at least one state")]
    NoStates,
    #[error("duplicate phone label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown phone label {0:?}")]
    UnknownLabel(String),
    #[error("state {0} out of range")]
    StateOutOfRange(usize),
    #[error("class {0} out of range")]
    ClassOutOfRange(usize),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Dense index of a phonetic class, `0..K`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct PhoneId(pub u32);

impl PhoneId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PhoneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Index of an emitting state inside a [`TransitionNetwork`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhoneClass {
    pub id: PhoneId,
    pub label: String,
}

/// The inventory of phonetic classes. Ids are dense and labels unique.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct PhoneSet {
    labels: Vec<String>,
}

impl PhoneSet {
    pub fn new<I, S>(labels: I) -> Result<Self, HmmError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(HmmError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { labels })
    }

    /// `p00`, `p01`, ... for synthetic inventories.
    pub fn numbered(k: usize) -> Self {
        let width = if k > 100 { 3 } else { 2 };
        Self {
            labels: (0..k).map(|i| format!("p{i:0width$}")).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, id: PhoneId) -> &str {
        &self.labels[id.index()]
    }

    pub fn id_of(&self, label: &str) -> Result<PhoneId, HmmError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| PhoneId(i as u32))
            .ok_or_else(|| HmmError::UnknownLabel(label.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = PhoneId> + '_ {
        (0..self.labels.len()).map(|i| PhoneId(i as u32))
    }

    pub fn classes(&self) -> impl Iterator<Item = PhoneClass> + '_ {
        self.labels.iter().enumerate().map(|(i, l)| PhoneClass {
            id: PhoneId(i as u32),
            label: l.clone(),
        })
    }
}

impl TryFrom<Vec<String>> for PhoneSet {
    type Error = HmmError;
    fn try_from(v: Vec<String>) -> Result<Self, Self::Error> {
        PhoneSet::new(v)
    }
}

impl From<PhoneSet> for Vec<String> {
    fn from(p: PhoneSet) -> Self {
        p.labels
    }
}

/// Left-to-right chain of emitting states for one phone.
///
/// State `i` loops on itself with `self_loop[i]` and advances with
/// `forward[i]`. The last state's forward mass leaves the model; network
/// builders decide where it goes.
#[derive(Debug, Clone, PartialEq)]
pub struct PhoneModel {
    pub phone: PhoneId,
    self_loop: Vec<f64>,
    forward: Vec<f64>,
}

impl PhoneModel {
    pub fn num_states(&self) -> usize {
        self.self_loop.len()
    }

    pub fn self_loop(&self, state: usize) -> f64 {
        self.self_loop[state]
    }

    pub fn forward(&self, state: usize) -> f64 {
        self.forward[state]
    }

    /// Expected number of frames spent in the model (sum of geometric means).
    pub fn expected_duration(&self) -> f64 {
        self.forward.iter().map(|f| 1.0 / f).sum()
    }

    /// Minimum number of frames needed to traverse the model.
    pub fn min_duration(&self) -> usize {
        self.num_states()
    }
}

/// Builds a left-to-right chain where every state self-loops with
/// `self_loop` and advances with `1 - self_loop`.
pub fn build_phone_model(
    phone: PhoneId,
    num_states: usize,
    self_loop: f64,
) -> Result<PhoneModel, HmmError> {
    if num_states == 0 {
        return Err(HmmError::NoStates);
    }
    if self_loop == 1.0 {
        return Err(HmmError::DeadEnd(self_loop));
    }
    if !(0.0..1.0).contains(&self_loop) {
        return Err(HmmError::InvalidProbability(self_loop));
    }
    Ok(PhoneModel {
        phone,
        self_loop: vec![self_loop; num_states],
        forward: vec![1.0 - self_loop; num_states],
    })
}

/// One [`PhoneModel`] per class of a phone set, indexed by [`PhoneId`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhoneModelSet {
    models: Vec<PhoneModel>,
}

impl PhoneModelSet {
    pub fn uniform(num_classes: usize, num_states: usize, self_loop: f64) -> Result<Self, HmmError> {
        let models = (0..num_classes)
            .map(|i| build_phone_model(PhoneId(i as u32), num_states, self_loop))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { models })
    }

    pub fn from_models(models: Vec<PhoneModel>) -> Result<Self, HmmError> {
        for (i, m) in models.iter().enumerate() {
            if m.phone.index() != i {
                return Err(HmmError::ClassOutOfRange(m.phone.index()));
            }
        }
        Ok(Self { models })
    }

    pub fn num_classes(&self) -> usize {
        self.models.len()
    }

    pub fn get(&self, phone: PhoneId) -> Result<&PhoneModel, HmmError> {
        self.models
            .get(phone.index())
            .ok_or(HmmError::ClassOutOfRange(phone.index()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub from: StateId,
    pub to: StateId,
    pub weight: f64,
}

/// Weighted directed graph of emitting states.
///
/// Construction only checks indices; semantic defects such as unreachable
/// states or infinite weights are left for [`validate_network`] to report.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionNetwork {
    num_classes: usize,
    state_phones: Vec<PhoneId>,
    arcs: Vec<Arc>,
    entries: Vec<(StateId, f64)>,
    exits: Vec<StateId>,
    // predecessor lists sorted by source id, log weights, zero weights dropped
    incoming: Vec<Vec<(u32, f64)>>,
}

impl TransitionNetwork {
    pub fn new(
        num_classes: usize,
        state_phones: Vec<PhoneId>,
        arcs: Vec<Arc>,
        entries: Vec<(StateId, f64)>,
        exits: Vec<StateId>,
    ) -> Result<Self, HmmError> {
        let n = state_phones.len();
        if let Some(p) = state_phones.iter().find(|p| p.index() >= num_classes) {
            return Err(HmmError::ClassOutOfRange(p.index()));
        }
        let check = |s: StateId| {
            if s.index() < n {
                Ok(())
            } else {
                Err(HmmError::StateOutOfRange(s.index()))
            }
        };
        for a in &arcs {
            check(a.from)?;
            check(a.to)?;
        }
        for (s, _) in &entries {
            check(*s)?;
        }
        for s in &exits {
            check(*s)?;
        }
        let arcs = dedup_arcs(arcs);
        let mut incoming: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        for a in &arcs {
            if a.weight > 0.0 {
                incoming[a.to.index()].push((a.from.0, a.weight.ln()));
            }
        }
        for preds in &mut incoming {
            preds.sort_by_key(|&(from, _)| from);
        }
        let mut entries = entries;
        entries.sort_by_key(|(s, _)| *s);
        entries.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 = a.1.max(b.1);
                true
            } else {
                false
            }
        });
        let mut exits = exits;
        exits.sort();
        exits.dedup();
        Ok(Self {
            num_classes,
            state_phones,
            arcs,
            entries,
            exits,
            incoming,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn num_states(&self) -> usize {
        self.state_phones.len()
    }

    pub fn phone_of(&self, state: StateId) -> PhoneId {
        self.state_phones[state.index()]
    }

    pub fn state_phones(&self) -> &[PhoneId] {
        &self.state_phones
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn entries(&self) -> &[(StateId, f64)] {
        &self.entries
    }

    pub fn exits(&self) -> &[StateId] {
        &self.exits
    }

    /// Log-weight predecessors of `state`, ascending by source id.
    pub fn incoming(&self, state: usize) -> &[(u32, f64)] {
        &self.incoming[state]
    }

    pub fn outgoing(&self, state: StateId) -> impl Iterator<Item = &Arc> {
        self.arcs.iter().filter(move |a| a.from == state)
    }

    pub fn weight(&self, from: StateId, to: StateId) -> Option<f64> {
        self.arcs
            .binary_search_by_key(&(from, to), |a| (a.from, a.to))
            .ok()
            .map(|i| self.arcs[i].weight)
    }

    /// Log entry weight of every state (`-inf` for non-entries).
    pub fn log_entry_weights(&self) -> Vec<f64> {
        let mut w = vec![f64::NEG_INFINITY; self.num_states()];
        for &(s, p) in &self.entries {
            w[s.index()] = if p > 0.0 { p.ln() } else { f64::NEG_INFINITY };
        }
        w
    }

    /// Text serialization with one record per line. Weights carry 17
    /// significant digits so they round-trip bit-exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "network 1");
        let _ = writeln!(out, "classes {}", self.num_classes);
        let _ = writeln!(out, "states {}", self.num_states());
        for (i, p) in self.state_phones.iter().enumerate() {
            let _ = writeln!(out, "state {i} {p}");
        }
        for a in &self.arcs {
            let _ = writeln!(out, "arc {} {} {}", a.from, a.to, fmt_weight(a.weight));
        }
        for (s, w) in &self.entries {
            let _ = writeln!(out, "entry {s} {}", fmt_weight(*w));
        }
        for s in &self.exits {
            let _ = writeln!(out, "exit {s}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, HmmError> {
        let mut num_classes = None;
        let mut declared_states = None;
        let mut state_phones: Vec<Option<PhoneId>> = Vec::new();
        let mut arcs = Vec::new();
        let mut entries = Vec::new();
        let mut exits = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let err = |msg: &str| HmmError::Parse {
                line,
                msg: msg.to_string(),
            };
            let fields: Vec<&str> = raw.split_whitespace().collect();
            let Some((&kind, rest)) = fields.split_first() else {
                continue;
            };
            let num = |i: usize| -> Result<usize, HmmError> {
                rest.get(i)
                    .ok_or_else(|| err("missing field"))?
                    .parse::<usize>()
                    .map_err(|e| err(&e.to_string()))
            };
            let float = |i: usize| -> Result<f64, HmmError> {
                rest.get(i)
                    .ok_or_else(|| err("missing field"))?
                    .parse::<f64>()
                    .map_err(|e| err(&e.to_string()))
            };
            match kind {
                "network" => {
                    if rest.first() != Some(&"1") {
                        return Err(err("unsupported version"));
                    }
                }
                "classes" => num_classes = Some(num(0)?),
                "states" => {
                    let n = num(0)?;
                    declared_states = Some(n);
                    state_phones = vec![None; n];
                }
                "state" => {
                    let id = num(0)?;
                    let phone = num(1)?;
                    let slot = state_phones
                        .get_mut(id)
                        .ok_or_else(|| err("state id beyond declared count"))?;
                    *slot = Some(PhoneId(phone as u32));
                }
                "arc" => arcs.push(Arc {
                    from: StateId(num(0)? as u32),
                    to: StateId(num(1)? as u32),
                    weight: float(2)?,
                }),
                "entry" => entries.push((StateId(num(0)? as u32), float(1)?)),
                "exit" => exits.push(StateId(num(0)? as u32)),
                _ => return Err(err("unknown record")),
            }
        }
        let num_classes = num_classes.ok_or(HmmError::Parse {
            line: 0,
            msg: "missing classes record".into(),
        })?;
        if declared_states.is_none() {
            return Err(HmmError::Parse {
                line: 0,
                msg: "missing states record".into(),
            });
        }
        let state_phones = state_phones
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                p.ok_or(HmmError::Parse {
                    line: 0,
                    msg: format!("state {i} not defined"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(num_classes, state_phones, arcs, entries, exits)
    }
}

fn fmt_weight(w: f64) -> String {
    if w.is_finite() {
        format!("{w:.16e}")
    } else {
        format!("{w}")
    }
}

/// Sorts arcs by `(from, to)` and merges parallel arcs, keeping the larger
/// weight (the only one a max-product decoder can use).
fn dedup_arcs(mut arcs: Vec<Arc>) -> Vec<Arc> {
    arcs.sort_by_key(|a| (a.from, a.to));
    let mut out: Vec<Arc> = Vec::with_capacity(arcs.len());
    for a in arcs {
        match out.last_mut() {
            Some(last) if last.from == a.from && last.to == a.to => {
                if a.weight > last.weight || a.weight.is_nan() {
                    last.weight = a.weight;
                }
            }
            _ => out.push(a),
        }
    }
    out
}

/// Incremental network construction used by the topology builders.
#[derive(Debug, Default)]
pub(crate) struct NetworkBuilder {
    state_phones: Vec<PhoneId>,
    arcs: Vec<Arc>,
    entries: Vec<(StateId, f64)>,
    exits: Vec<StateId>,
}

impl NetworkBuilder {
    pub(crate) fn add_state(&mut self, phone: PhoneId) -> StateId {
        self.state_phones.push(phone);
        StateId((self.state_phones.len() - 1) as u32)
    }

    pub(crate) fn add_arc(&mut self, from: StateId, to: StateId, weight: f64) {
        self.arcs.push(Arc { from, to, weight });
    }

    pub(crate) fn add_entry(&mut self, state: StateId, weight: f64) {
        self.entries.push((state, weight));
    }

    pub(crate) fn add_exit(&mut self, state: StateId) {
        self.exits.push(state);
    }

    /// Instantiates a phone chain and returns `(first, last)` states.
    pub(crate) fn add_phone(&mut self, model: &PhoneModel) -> (StateId, StateId) {
        let first = StateId(self.state_phones.len() as u32);
        let n = model.num_states();
        for _ in 0..n {
            self.add_state(model.phone);
        }
        for i in 0..n {
            let s = StateId(first.0 + i as u32);
            self.add_arc(s, s, model.self_loop(i));
            if i + 1 < n {
                self.add_arc(s, StateId(s.0 + 1), model.forward(i));
            }
        }
        (first, StateId(first.0 + n as u32 - 1))
    }

    pub(crate) fn build(self, num_classes: usize) -> Result<TransitionNetwork, HmmError> {
        TransitionNetwork::new(
            num_classes,
            self.state_phones,
            self.arcs,
            self.entries,
            self.exits,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NetworkIssue {
    Unreachable(StateId),
    DeadEnd(StateId),
    BadWeight { from: StateId, to: StateId, weight: f64 },
    BadEntryWeight { state: StateId, weight: f64 },
    NoEntries,
}

impl fmt::Display for NetworkIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetworkIssue::Unreachable(s) => write!(f, "state {s} unreachable from any entry"),
            NetworkIssue::DeadEnd(s) => write!(f, "state {s} has no outgoing arc and is not an exit"),
            NetworkIssue::BadWeight { from, to, weight } => {
                write!(f, "arc {from}->{to} has invalid weight {weight}")
            }
            NetworkIssue::BadEntryWeight { state, weight } => {
                write!(f, "entry {state} has invalid weight {weight}")
            }
            NetworkIssue::NoEntries => write!(f, "network has no entry states"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub issues: Vec<NetworkIssue>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.issues.is_empty()
    }
}

fn valid_weight(w: f64) -> bool {
    w.is_finite() && w >= 0.0
}

/// Reports unreachable states, dead ends and nonfinite or negative weights.
pub fn validate_network(net: &TransitionNetwork) -> ValidationReport {
    let mut issues = Vec::new();
    let n = net.num_states();
    if net.entries().is_empty() && n > 0 {
        issues.push(NetworkIssue::NoEntries);
    }
    for &(state, weight) in net.entries() {
        if !valid_weight(weight) {
            issues.push(NetworkIssue::BadEntryWeight { state, weight });
        }
    }
    for a in net.arcs() {
        if !valid_weight(a.weight) {
            issues.push(NetworkIssue::BadWeight {
                from: a.from,
                to: a.to,
                weight: a.weight,
            });
        }
    }

    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut has_out = vec![false; n];
    for a in net.arcs() {
        if a.weight > 0.0 {
            adjacency[a.from.index()].push(a.to.index());
            has_out[a.from.index()] = true;
        }
    }
    let mut reached = vec![false; n];
    let mut queue: VecDeque<usize> = net
        .entries()
        .iter()
        .filter(|(_, w)| *w > 0.0)
        .map(|(s, _)| s.index())
        .collect();
    for &s in &queue {
        reached[s] = true;
    }
    while let Some(s) = queue.pop_front() {
        for &t in &adjacency[s] {
            if !reached[t] {
                reached[t] = true;
                queue.push_back(t);
            }
        }
    }
    let exits: std::collections::HashSet<usize> = net.exits().iter().map(|s| s.index()).collect();
    for s in 0..n {
        let id = StateId(s as u32);
        if !reached[s] {
            issues.push(NetworkIssue::Unreachable(id));
        }
        if !has_out[s] && !exits.contains(&s) {
            issues.push(NetworkIssue::DeadEnd(id));
        }
    }
    ValidationReport { issues }
}

/// Class priors `P(x_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PriorVector {
    values: Vec<f64>,
}

impl PriorVector {
    pub fn new(values: Vec<f64>) -> Result<Self, HmmError> {
        for (index, &value) in values.iter().enumerate() {
            if !(value > 0.0 && value <= 1.0) {
                return Err(HmmError::InvalidPrior { index, value });
            }
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(HmmError::PriorSum(sum));
        }
        Ok(Self { values })
    }

    pub fn uniform(k: usize) -> Self {
        Self {
            values: vec![1.0 / k as f64; k],
        }
    }

    /// Relative frequencies with add-one smoothing, so unseen classes keep a
    /// positive prior.
    pub fn from_counts(counts: &[u64]) -> Self {
        let total: f64 = counts.iter().map(|&c| c as f64 + 1.0).sum();
        Self {
            values: counts.iter().map(|&c| (c as f64 + 1.0) / total).collect(),
        }
    }

    pub fn from_labels(labels: impl IntoIterator<Item = PhoneId>, k: usize) -> Self {
        let mut counts = vec![0u64; k];
        for l in labels {
            counts[l.index()] += 1;
        }
        Self::from_counts(&counts)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl TryFrom<Vec<f64>> for PriorVector {
    type Error = HmmError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        PriorVector::new(v)
    }
}

impl From<PriorVector> for Vec<f64> {
    fn from(p: PriorVector) -> Self {
        p.values
    }
}

/// Per-frame class activities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorFrame {
    values: Vec<f64>,
}

impl PosteriorFrame {
    pub fn new(values: Vec<f64>) -> Result<Self, HmmError> {
        if values.is_empty() {
            return Err(HmmError::InvalidPosterior("empty frame".into()));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(HmmError::InvalidPosterior(format!("value {v} outside [0,1]")));
        }
        let sum: f64 = values.iter().sum();
        if sum <= 0.0 {
            return Err(HmmError::InvalidPosterior("frame sums to zero".into()));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn normalized(&self) -> Self {
        let sum: f64 = self.values.iter().sum();
        Self {
            values: self.values.iter().map(|v| v / sum).collect(),
        }
    }

    /// Index of the largest activity (lowest index on ties).
    pub fn argmax(&self) -> PhoneId {
        PhoneId(argmax_first(&self.values) as u32)
    }
}

pub(crate) fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Scaled likelihoods, stored as natural logarithms.
#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodFrame {
    log_values: Vec<f64>,
}

impl LikelihoodFrame {
    pub fn from_log(log_values: Vec<f64>) -> Self {
        Self { log_values }
    }

    pub fn from_linear(values: &[f64]) -> Self {
        Self {
            log_values: values.iter().map(|v| v.ln()).collect(),
        }
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    pub fn values(&self) -> Vec<f64> {
        self.log_values.iter().map(|v| v.exp()).collect()
    }

    pub fn len(&self) -> usize {
        self.log_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_values.is_empty()
    }

    /// Same frame with `c` added to every log value.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            log_values: self.log_values.iter().map(|v| v + c).collect(),
        }
    }
}

pub const DEFAULT_FLOOR: f64 = 1e-6;

/// Divides floored posteriors by class priors. The class-independent
/// observation term is omitted since it cannot change any decision.
pub fn posterior_to_likelihood(
    frame: &PosteriorFrame,
    priors: &PriorVector,
    floor: f64,
) -> Result<LikelihoodFrame, HmmError> {
    if frame.len() != priors.len() {
        return Err(HmmError::Dimension {
            expected: priors.len(),
            got: frame.len(),
        });
    }
    if !(floor > 0.0) {
        return Err(HmmError::InvalidFloor(floor));
    }
    for (index, &value) in priors.values().iter().enumerate() {
        if !(value > 0.0) {
            return Err(HmmError::InvalidPrior { index, value });
        }
    }
    let log_values = frame
        .values()
        .iter()
        .zip(priors.values())
        .map(|(&p, &prior)| (p.max(floor) / prior).ln())
        .collect();
    Ok(LikelihoodFrame { log_values })
}

/// Converts a whole posterior stream.
pub fn posteriors_to_likelihoods(
    frames: &[PosteriorFrame],
    priors: &PriorVector,
    floor: f64,
) -> Result<Vec<LikelihoodFrame>, HmmError> {
    frames
        .iter()
        .map(|f| posterior_to_likelihood(f, priors, floor))
        .collect()
}
