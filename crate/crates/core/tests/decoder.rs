mod common;

use common::{exhaustive_best, path_score, random_instance};
use phonolat::decoder::{decode_streaming, viterbi_full, DecodeConfig, DecodeError, TieBreak};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn full_viterbi_agrees_with_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..150 {
        let inst = random_instance(&mut rng, 4, 6);
        let oracle = exhaustive_best(&inst.net, &inst.stream, 1e-9);
        match (viterbi_full(&inst.net, &inst.stream, TieBreak::LowestStateId), oracle) {
            (Ok(path), Some((best, winners))) => {
                assert!((path.log_score - best).abs() < 1e-9);
                let states: Vec<usize> = path.states.iter().map(|s| s.index()).collect();
                assert!(winners.contains(&states));
                let rescored = path_score(&inst.net, &inst.stream, &states).unwrap();
                assert!((rescored - path.log_score).abs() < 1e-9);
            }
            (Err(DecodeError::NoSurvivingPath { .. }), None) => {}
            (got, want) => panic!("decoder {got:?} vs oracle {want:?}"),
        }
    }
}

#[test]
fn streaming_emits_each_frame_once_within_latency() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 100 {
        let inst = random_instance(&mut rng, 4, 7);
        if exhaustive_best(&inst.net, &inst.stream, 0.0).is_none() {
            continue;
        }
        checked += 1;
        for l in 1..4 {
            let d = decode_streaming(&inst.net, &inst.stream, DecodeConfig::new(l).unwrap()).unwrap();
            assert_eq!(d.len(), inst.stream.len());
            for (t, dec) in d.decisions.iter().enumerate() {
                assert_eq!(dec.frame, t);
                assert!(dec.latency <= l);
            }
        }
    }
}

#[test]
fn long_look_ahead_reproduces_full_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for _ in 0..100 {
        let inst = random_instance(&mut rng, 5, 10);
        let Ok(full) = viterbi_full(&inst.net, &inst.stream, TieBreak::LowestStateId) else {
            continue;
        };
        let l = inst.stream.len().max(2) - 1;
        let d = decode_streaming(&inst.net, &inst.stream, DecodeConfig::new(l).unwrap()).unwrap();
        assert_eq!(d.states(), full.states);
    }
}

mod props {
    use super::common::{random_instance, Instance};
    use phonolat::decoder::{decode_streaming, viterbi_full, DecodeConfig, TieBreak};
    use phonolat::hmm::{Arc, LikelihoodFrame, PhoneId, StateId, TransitionNetwork};
    use rand::Rng;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn distinct_phone_instance(rng: &mut ChaCha8Rng) -> Instance {
        let s = rng.random_range(1..=5usize);
        let phones = (0..s as u32).map(PhoneId).collect();
        let mut arcs = Vec::new();
        for from in 0..s as u32 {
            for to in 0..s as u32 {
                if rng.random::<f64>() < 0.6 {
                    arcs.push(Arc { from: StateId(from), to: StateId(to), weight: rng.random_range(0.05..1.0) });
                }
            }
        }
        let entries = (0..s as u32).map(|i| (StateId(i), rng.random_range(0.05..1.0))).collect();
        let net = TransitionNetwork::new(s, phones, arcs, entries, vec![]).unwrap();
        let t = rng.random_range(1..=12);
        let stream = (0..t)
            .map(|_| LikelihoodFrame::from_log((0..s).map(|_| rng.random_range(-5.0..0.0)).collect()))
            .collect();
        Instance { net, stream }
    }

    proptest! {
        #[test]
        fn frame_constant_never_changes_decisions(seed in any::<u64>(), shifts in prop::collection::vec(-50.0f64..50.0, 12)) {
            // one phone per state keeps exact ties out of the picture
            let inst = distinct_phone_instance(&mut ChaCha8Rng::seed_from_u64(seed));
            let shifted: Vec<LikelihoodFrame> = inst.stream.iter().zip(&shifts).map(|(f, &c)| f.shifted(c)).collect();
            for l in [1usize, 2, 4] {
                let cfg = DecodeConfig::new(l).unwrap();
                match (decode_streaming(&inst.net, &inst.stream, cfg), decode_streaming(&inst.net, &shifted, cfg)) {
                    (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                    (Err(_), Err(_)) => {}
                    (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
                }
            }
        }
    }

    #[test]
    fn decisions_settled_at_ten_and_twenty_stay_settled() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut checked = 0usize;
        let mut tried = 0;
        while tried < 60 {
            let inst = random_instance(&mut rng, 5, 60);
            let Ok(full) = viterbi_full(&inst.net, &inst.stream, TieBreak::LowestStateId) else {
                continue;
            };
            tried += 1;
            let at = |l: usize| decode_streaming(&inst.net, &inst.stream, DecodeConfig::new(l).unwrap()).unwrap().states();
            let (d10, d20) = (at(10), at(20));
            let longer: Vec<Vec<_>> = [25, 30, 40].iter().map(|&l| at(l)).collect();
            for n in 0..inst.stream.len() {
                if d10[n] == full.states[n] && d20[n] == full.states[n] {
                    checked += 1;
                    for d in &longer {
                        assert_eq!(d[n], full.states[n], "frame {n}");
                    }
                }
            }
        }
        assert!(checked > 500);
    }
}
