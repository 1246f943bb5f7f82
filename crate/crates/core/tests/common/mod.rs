#![allow(dead_code)]

use phonolat::hmm::{Arc, LikelihoodFrame, PhoneId, StateId, TransitionNetwork};
use rand::Rng;

pub struct Instance {
    pub net: TransitionNetwork,
    pub stream: Vec<LikelihoodFrame>,
}

/// Random network with up to `max_states` states and a random stream of up
/// to `max_frames` frames. Arcs, entries and likelihoods are all random.
pub fn random_instance(rng: &mut impl Rng, max_states: usize, max_frames: usize) -> Instance {
    let s = rng.random_range(1..=max_states);
    let k = rng.random_range(1..=3);
    let phones: Vec<PhoneId> = (0..s).map(|_| PhoneId(rng.random_range(0..k as u32))).collect();
    let mut arcs = Vec::new();
    for from in 0..s {
        for to in 0..s {
            if rng.random::<f64>() < 0.6 {
                arcs.push(Arc {
                    from: StateId(from as u32),
                    to: StateId(to as u32),
                    weight: rng.random_range(0.05..1.0),
                });
            }
        }
    }
    let mut entries: Vec<(StateId, f64)> = Vec::new();
    for i in 0..s {
        if rng.random::<f64>() < 0.5 {
            entries.push((StateId(i as u32), rng.random_range(0.05..1.0)));
        }
    }
    if entries.is_empty() {
        entries.push((StateId(rng.random_range(0..s as u32)), 1.0));
    }
    let net = TransitionNetwork::new(k, phones, arcs, entries, vec![]).unwrap();
    let t = rng.random_range(1..=max_frames);
    let stream = (0..t)
        .map(|_| LikelihoodFrame::from_log((0..k).map(|_| rng.random_range(-5.0..0.0)).collect()))
        .collect();
    Instance { net, stream }
}

fn log_weight(net: &TransitionNetwork, from: usize, to: usize) -> Option<f64> {
    net.weight(StateId(from as u32), StateId(to as u32))
        .filter(|&w| w > 0.0)
        .map(f64::ln)
}

/// Log score of a complete state path, or `None` if it uses a missing arc.
pub fn path_score(net: &TransitionNetwork, stream: &[LikelihoodFrame], path: &[usize]) -> Option<f64> {
    let entry = net.entries().iter().find(|(s, _)| s.index() == path[0])?.1;
    if entry <= 0.0 {
        return None;
    }
    let emit = |t: usize, s: usize| stream[t].log_values()[net.phone_of(StateId(s as u32)).index()];
    let mut score = entry.ln() + emit(0, path[0]);
    for t in 1..path.len() {
        score += log_weight(net, path[t - 1], path[t])? + emit(t, path[t]);
    }
    Some(score)
}

/// Every admissible path with its score, by depth-first enumeration.
pub fn enumerate_paths(net: &TransitionNetwork, stream: &[LikelihoodFrame]) -> Vec<(Vec<usize>, f64)> {
    let n = net.num_states();
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(stream.len());
    fn go(
        net: &TransitionNetwork,
        stream: &[LikelihoodFrame],
        n: usize,
        path: &mut Vec<usize>,
        out: &mut Vec<(Vec<usize>, f64)>,
    ) {
        if path.len() == stream.len() {
            if let Some(s) = path_score(net, stream, path) {
                out.push((path.clone(), s));
            }
            return;
        }
        for next in 0..n {
            let ok = match path.last() {
                None => net.entries().iter().any(|(s, w)| s.index() == next && *w > 0.0),
                Some(&prev) => log_weight(net, prev, next).is_some(),
            };
            if ok {
                path.push(next);
                go(net, stream, n, path, out);
                path.pop();
            }
        }
    }
    go(net, stream, n, &mut path, &mut out);
    out
}

/// Best score and every path reaching it within `tol`.
pub fn exhaustive_best(net: &TransitionNetwork, stream: &[LikelihoodFrame], tol: f64) -> Option<(f64, Vec<Vec<usize>>)> {
    let all = enumerate_paths(net, stream);
    let best = all.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return None;
    }
    let winners = all.into_iter().filter(|p| p.1 >= best - tol).map(|p| p.0).collect();
    Some((best, winners))
}
