use phonolat::decoder::{decode_streaming, DecodeConfig};
use phonolat::hmm::{validate_network, LikelihoodFrame, PhoneId, PhoneModelSet, TransitionNetwork};
use phonolat::topology::{
    alpha_mix, forced_alignment_net, phone_loop, word_loop, AlphaMixSpec, Transcription, WordLoopSpec,
};
use proptest::prelude::*;

const K: usize = 6;
const SELF_LOOP: f64 = 0.6;

fn models() -> PhoneModelSet {
    PhoneModelSet::uniform(K, 3, SELF_LOOP).unwrap()
}

fn transcription() -> impl Strategy<Value = Transcription> {
    prop::collection::vec(0..K as u32, 1..9)
        .prop_map(|p| Transcription::new("u", p.into_iter().map(PhoneId).collect()).unwrap())
}

fn stream() -> impl Strategy<Value = Vec<LikelihoodFrame>> {
    prop::collection::vec(prop::collection::vec(-6.0f64..0.0, K), 1..40)
        .prop_map(|frames| frames.into_iter().map(LikelihoodFrame::from_log).collect())
}

fn same_output(a: &TransitionNetwork, b: &TransitionNetwork, s: &[LikelihoodFrame]) -> bool {
    [1usize, 2, 5, 40].iter().all(|&l| {
        let cfg = DecodeConfig::new(l).unwrap();
        match (decode_streaming(a, s, cfg), decode_streaming(b, s, cfg)) {
            (Ok(x), Ok(y)) => x == y,
            (Err(x), Err(y)) => x.to_string() == y.to_string(),
            _ => false,
        }
    })
}

proptest! {
    #[test]
    fn wordlen_one_is_a_phone_loop(tr in transcription(), s in stream()) {
        let m = models();
        let wl = word_loop(&WordLoopSpec::new(1, tr.clone()).unwrap(), &m).unwrap();
        let pl = phone_loop(&tr.distinct_phones(), &m).unwrap();
        prop_assert!(same_output(&wl, &pl, &s));
    }

    #[test]
    fn alpha_endpoints_are_pure_builders(tr in transcription(), s in stream()) {
        let m = models();
        let a0 = alpha_mix(&AlphaMixSpec::new(0.0, tr.clone()).unwrap(), &m).unwrap();
        let a1 = alpha_mix(&AlphaMixSpec::new(1.0, tr.clone()).unwrap(), &m).unwrap();
        prop_assert!(same_output(&a0, &phone_loop(&tr.distinct_phones(), &m).unwrap(), &s));
        prop_assert!(same_output(&a1, &forced_alignment_net(&tr, &m).unwrap(), &s));
    }

    #[test]
    fn built_networks_validate_and_use_only_known_weights(tr in transcription(), alpha in 0.0f64..=1.0) {
        let m = models();
        let p = tr.distinct_phones().len() as f64;
        let mut nets = vec![
            phone_loop(&tr.distinct_phones(), &m).unwrap(),
            forced_alignment_net(&tr, &m).unwrap(),
            alpha_mix(&AlphaMixSpec::new(alpha, tr.clone()).unwrap(), &m).unwrap(),
        ];
        for n in 1..=tr.len() {
            nets.push(word_loop(&WordLoopSpec::new(n, tr.clone()).unwrap(), &m).unwrap());
        }
        for net in &nets {
            let report = validate_network(net);
            prop_assert!(report.passed(), "{:?}", report.issues);
            for a in net.arcs() {
                let w = a.weight;
                let known = [SELF_LOOP, 1.0 - SELF_LOOP, 1.0 / p];
                // a one-phone loop merges its re-entry arc into the self-loop
                prop_assert!(known.iter().any(|k| (w - k).abs() < 1e-15) || (p == 1.0 && w == 1.0), "weight {w}");
            }
        }
    }
}
