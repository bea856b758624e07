use ghz_anon::keygraph::{all_graphs, KeySharingGraph};
use ghz_anon::lab::{
    all_key_assignments, anonymity_verdict, dcnet_round, exact_transcript_distribution, posterior_table, trace_attack,
    traceless_verdict, DcNetInstance, Mode, Prob, RunFamily, Target, VerdictOptions,
};

/// Every connected graph on up to 5 nodes, every key assignment, every sender.
#[test]
fn trace_attack_exhaustive_small_graphs() {
    for n in 2..=5 {
        for g in all_graphs(n).filter(|g| g.is_connected()) {
            for keys in all_key_assignments(&g) {
                for sender in 0..n {
                    for d in 0..2u8 {
                        let inst = DcNetInstance::new(g.clone(), keys.clone(), sender, d).unwrap();
                        let round = dcnet_round(&inst).unwrap();
                        assert_eq!(round.decoded, d);
                        let found = trace_attack(&g, &round.announcements, &keys, d);
                        assert_eq!(found, (d == 1).then_some(sender));
                    }
                }
            }
        }
    }
}

/// ANON's transcript law is uniform over the strings of parity `d`, whoever sends.
#[test]
fn anon_distribution_is_the_parity_class() {
    for n in 3..=7 {
        for d in 0..2u8 {
            let family = RunFamily::Anon { n, d };
            let mut expected = std::collections::BTreeMap::new();
            for x in 0..1usize << n {
                if x.count_ones() as u8 % 2 != d {
                    continue;
                }
                let key = {
                    let mut k = String::from("C=");
                    for p in 0..n {
                        k.push_str(&format!("{p}:{},", (x >> (n - 1 - p)) & 1));
                    }
                    for p in 0..n {
                        k.push_str(&format!(";G{p}={}.", (x >> (n - 1 - p)) & 1));
                    }
                    k
                };
                expected.insert(key, Prob::new(1, 1 << (n - 1)));
            }
            for sender in 0..n {
                assert_eq!(exact_transcript_distribution(&family, sender, None).unwrap(), expected);
            }
        }
    }
}

/// Colluders learn their own outcomes and nothing about who among the rest sent.
#[test]
fn colluders_gain_nothing_in_anon() {
    for n in 3..=6 {
        for t in 0..=n - 2 {
            let corrupted: Vec<usize> = (0..t)
                .map(|i| (i * 2) % n)
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
            let table = posterior_table(&RunFamily::Anon { n, d: 1 }, Target::Sender, &corrupted, false).unwrap();
            let uniform = Prob::new(1, (n - corrupted.len()) as i128);
            for row in table.rows.values() {
                assert!(row.iter().all(|&p| p == uniform));
            }
        }
    }
}

#[test]
fn ae_and_anonq_hide_both_ends() {
    let opts = VerdictOptions::default();
    for target in [Target::Sender, Target::Receiver] {
        for corrupted in [&[][..], &[2][..], &[0, 3][..]] {
            let ae = traceless_verdict(&RunFamily::Ae { n: 5 }, target, corrupted, &opts).unwrap();
            assert!(ae.verdict, "{ae:?}");
            let q = traceless_verdict(
                &RunFamily::Anonq { n: 4 },
                target,
                &corrupted[..corrupted.len().min(2)],
                &opts,
            )
            .unwrap();
            assert!(q.verdict, "{q:?}");
        }
    }
}

#[test]
fn dcnet_partitioned_graph_exposes_sender() {
    // cutting node 1 out of the path isolates node 0
    let family = RunFamily::DcNet {
        graph: KeySharingGraph::path(4),
        d: 1,
    };
    let v = anonymity_verdict(&family, Target::Sender, &[1], &VerdictOptions::default()).unwrap();
    assert!(!v.verdict);
    let cycle = RunFamily::DcNet {
        graph: KeySharingGraph::cycle(5),
        d: 1,
    };
    assert!(
        anonymity_verdict(&cycle, Target::Sender, &[1], &VerdictOptions::default())
            .unwrap()
            .verdict
    );
}

#[test]
fn verdict_json_has_expected_fields() {
    let opts = VerdictOptions {
        mode: Mode::Sampled,
        trials: 2_000,
        seed: 11,
        ..VerdictOptions::default()
    };
    let v = anonymity_verdict(&RunFamily::Anon { n: 4, d: 1 }, Target::Sender, &[0], &opts).unwrap();
    let json: serde_json::Value = serde_json::from_str(&v.to_json()).unwrap();
    for field in [
        "protocol",
        "n",
        "t",
        "target",
        "mode",
        "posterior_max",
        "baseline",
        "verdict",
        "trials",
        "seed",
    ] {
        assert!(json.get(field).is_some(), "missing {field}");
    }
    assert_eq!(json["mode"], "sampled");
    assert_eq!(json["t"], 1);
}
