use std::f64::consts::FRAC_1_SQRT_2;

use ghz_anon::keygraph::{is_partitioning_set, key_lower_bound, min_degree, tolerance, KeyBound, KeySharingGraph};
use ghz_anon::lab::{
    anonymity_verdict, dcnet_round, trace_attack, traceless_verdict, worst_case_verdict, AnonymityVerdict,
    DcNetInstance, Mode, RunFamily, Target, VerdictOptions,
};
use ghz_anon::protocols::{
    ae_establish, aloha_schedule, anon_run, anonq_send, anonymous_key_exchange, collision_detect,
    elect_sender_receiver, Behavior, PlayerConfig, RunRecord, DEFAULT_ALOHA_CAP,
};
use ghz_anon::RngStream;
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{Protocol, RunConfig};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Aborted,
    VerdictFailed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Aborted => 3,
            Status::VerdictFailed => 4,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphReport {
    pub nodes: usize,
    pub edges: usize,
    pub connected: bool,
    pub min_degree: usize,
    pub requirement_met: bool,
    pub tolerance: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partitioning: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub config: RunConfig,
    pub status: Status,
    /// The human-readable summary, one `key=value` line each.
    pub summary: Vec<String>,
    pub records: Vec<RunRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<AnonymityVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key_bound: Option<KeyBound>,
}

impl Report {
    fn new(config: &RunConfig) -> Self {
        Self {
            tool: "ghz-anon",
            config: config.clone(),
            status: Status::Ok,
            summary: Vec::new(),
            records: Vec::new(),
            verdict: None,
            graph: None,
            key_bound: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Default file name when writing into the output directory.
    pub fn file_name(&self) -> String {
        let c = &self.config;
        let mut name = c.protocol.name().to_owned();
        if let Some(n) = c.n {
            name.push_str(&format!("-n{n}"));
        }
        if let Some(seed) = c.seed {
            name.push_str(&format!("-seed{seed}"));
        }
        name + ".json"
    }
}

/// `complete:N`, `cycle:N`, `path:N`, `star:N`, or a file holding an edge
/// list or adjacency JSON.
pub fn parse_graph(spec: &str) -> Result<KeySharingGraph, CliError> {
    if let Some((kind, size)) = spec.split_once(':') {
        if let Ok(n) = size.parse::<usize>() {
            return match kind {
                "complete" => Ok(KeySharingGraph::complete(n)),
                "cycle" => Ok(KeySharingGraph::cycle(n)),
                "path" => Ok(KeySharingGraph::path(n)),
                "star" => Ok(KeySharingGraph::star(n)),
                other => Err(CliError::Config(format!("unknown graph family {other:?}"))),
            };
        }
    }
    let text = std::fs::read_to_string(spec).map_err(|e| CliError::Config(format!("graph {spec}: {e}")))?;
    let g = if text.trim_start().starts_with('{') {
        KeySharingGraph::from_adjacency_json(&text)?
    } else {
        KeySharingGraph::from_edge_list(&text)?
    };
    Ok(g)
}

fn seed(config: &RunConfig) -> u64 {
    config.seed.unwrap_or(0)
}

/// Runs one configuration. Trial `i` draws from stream `i` of the seed.
pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    config.validate()?;
    let mut report = Report::new(config);
    match config.protocol {
        Protocol::Anon => run_anon(config, &mut report)?,
        Protocol::Ae => run_ae(config, &mut report)?,
        Protocol::Anonq => run_anonq(config, &mut report)?,
        Protocol::Collision => run_collision(config, &mut report)?,
        Protocol::Dcnet => run_dcnet(config, &mut report)?,
        Protocol::Keygraph => run_keygraph(config, &mut report)?,
        Protocol::Verdict => run_verdict(config, &mut report)?,
        Protocol::Aloha => run_aloha(config, &mut report)?,
        Protocol::Elect => run_elect(config, &mut report)?,
        Protocol::Keyx => run_keyx(config, &mut report)?,
    }
    Ok(report)
}

fn trial_rng(config: &RunConfig, trial: usize) -> RngStream {
    RngStream::new(seed(config), trial as u64)
}

fn run_anon(config: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let n = config.n.unwrap_or(0);
    let sender = config.sender.unwrap_or(0);
    let d = config.d.unwrap_or(0);
    let players: Vec<PlayerConfig> = (0..n)
        .map(|i| {
            let p = if i == sender {
                PlayerConfig::sender(i, d)
            } else {
                PlayerConfig::bystander(i)
            };
            if config.withhold.contains(&i) {
                p.with_behavior(Behavior::Withhold)
            } else {
                p
            }
        })
        .collect();
    let mut decoded = Vec::new();
    for trial in 0..config.trials {
        let out = anon_run(&players, &mut trial_rng(config, trial))?;
        let record = RunRecord::new("anon", n, out.transcript, out.ledger);
        let record = match out.decoded {
            Some(bit) => {
                decoded.push(bit);
                record.with_verdict("decoded", bit)
            }
            None => record.with_verdict("decoded", serde_json::Value::Null),
        };
        report.records.push(record);
    }
    if decoded.len() < config.trials {
        report.status = Status::Aborted;
        report
            .summary
            .push(format!("aborted={}", config.trials - decoded.len()));
    }
    if config.trials == 1 {
        if let Some(bit) = decoded.first() {
            report.summary.push(format!("decoded={bit}"));
        }
    } else {
        let ones = decoded.iter().filter(|&&b| b == 1).count();
        report.summary.push(format!(
            "trials={} decoded_one={ones} decoded_zero={}",
            config.trials,
            decoded.len() - ones
        ));
    }
    Ok(())
}

fn run_ae(config: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let (n, s, r) = (
        config.n.unwrap_or(0),
        config.sender.unwrap_or(0),
        config.receiver.unwrap_or(0),
    );
    let mut exact = 0;
    for trial in 0..config.trials {
        let out = ae_establish(n, s, r, &mut trial_rng(config, trial))?;
        let phase = out.epr.phase_numerator();
        exact += usize::from(phase == 0);
        report
            .records
            .push(RunRecord::new("ae", n, out.transcript, out.ledger).with_verdict("epr_phase_numerator", phase));
    }
    report.summary.push(format!("epr_exact={exact}/{}", config.trials));
    Ok(())
}

fn run_anonq(config: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let (n, s, r) = (
        config.n.unwrap_or(0),
        config.sender.unwrap_or(0),
        config.receiver.unwrap_or(0),
    );
    let input = match config.qubit {
        Some([[ar, ai], [br, bi]]) => (Complex64::new(ar, ai), Complex64::new(br, bi)),
        None => (Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(FRAC_1_SQRT_2, 0.0)),
    };
    let mut worst: f64 = 1.0;
    for trial in 0..config.trials {
        let out = anonq_send(n, s, r, input, &mut trial_rng(config, trial))?;
        worst = worst.min(out.fidelity);
        let record = RunRecord::new("anonq", n, out.transcript, out.ledger)
            .with_verdict("fidelity", out.fidelity)
            .with_verdict(
                "received",
                vec![
                    out.received.0.re,
                    out.received.0.im,
                    out.received.1.re,
                    out.received.1.im,
                ],
            );
        report.records.push(record);
    }
    report.summary.push(format!("fidelity={worst:.12}"));
    Ok(())
}

fn run_collision(config: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let n = config.n.unwrap_or(0);
    for trial in 0..config.trials {
        let run = collision_detect(n, &config.wishers, &mut trial_rng(config, trial))?;
        let v = run.verdict;
        if trial == 0 {
            let first = v.first_odd_round.map_or("none".to_owned(), |j| j.to_string());
            report.summary.push(format!(
                "verdict={}",
                serde_json::to_value(v.verdict).unwrap().as_str().unwrap_or("")
            ));
            report.summary.push(format!("first_odd_round={first}"));
            report.summary.push(format!("rounds={}", run.transcript.rounds.len()));
        }
        let record = RunRecord::new("collision", n, run.transcript, run.ledger)
            .with_verdict("verdict", serde_json::to_value(v.verdict).unwrap())
            .with_verdict("first_odd_round", v.first_odd_round)
            .with_verdict("parities", v.parities);
        report.records.push(record);
    }
    Ok(())
}

fn run_dcnet(config: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let graph = parse_graph(config.graph.as_deref().unwrap_or_default())?;
    let n = graph.node_count();
    let sender = config.sender.unwrap_or(0);
    if sender >= n {
        return Err(CliError::Config(format!("sender {sender} out of range for {n} nodes")));
    }
    let d = config.d.unwrap_or(0);
    let mut traced = 0;
    for trial in 0..config.trials {
        let inst = DcNetInstance::random(graph.clone(), sender, d, &mut trial_rng(config, trial))?;
        let round = dcnet_round(&inst)?;
        let found = trace_attack(&graph, &round.announcements, &inst.keys, d);
        traced += usize::from(found == Some(sender));
        if trial == 0 {
            report.summary.push(format!("decoded={}", round.decoded));
        }
        let record = RunRecord::new("dcnet", n, round.transcript(), inst.ledger())
            .with_verdict("decoded", round.decoded)
            .with_verdict("trace_attack", found);
        report.records.push(record);
    }
    report.summary.push(format!("traced={traced}/{}", config.trials));
    Ok(())
}

fn run_keygraph(config: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    if let Some(spec) = &config.graph {
        let g = parse_graph(spec)?;
        let deg = min_degree(&g);
        let partitioning = config
            .colluders
            .as_ref()
            .map(|c| is_partitioning_set(&g, c))
            .transpose()?;
        let gr = GraphReport {
            nodes: g.node_count(),
            edges: g.edge_count(),
            connected: g.is_connected(),
            min_degree: deg.min_degree,
            requirement_met: deg.requirement_met,
            tolerance: tolerance(&g),
            partitioning,
        };
        report.summary.push(format!("nodes={} edges={}", gr.nodes, gr.edges));
        report.summary.push(format!(
            "min_degree={} requirement_met={}",
            gr.min_degree, gr.requirement_met
        ));
        report.summary.push(format!("tolerance={}", gr.tolerance));
        if let Some(p) = partitioning {
            report.summary.push(format!("partitioning={p}"));
        }
        report.graph = Some(gr);
    }
    if let Some(t) = config.t {
        let n = config.n.or(report.graph.as_ref().map(|g| g.nodes)).unwrap_or(0);
        let bound = key_lower_bound(n, t)?;
        report.summary.push(format!(
            "key_lower_bound={} source={}",
            bound.keys,
            serde_json::to_value(bound.source).unwrap().as_str().unwrap_or("")
        ));
        report.key_bound = Some(bound);
    }
    Ok(())
}

fn family_of(config: &RunConfig) -> Result<RunFamily, CliError> {
    let d = config.d.unwrap_or(1);
    let n = config.n.unwrap_or(0);
    Ok(match config.family.unwrap_or(Protocol::Anon) {
        Protocol::Anon => RunFamily::Anon { n, d },
        Protocol::Ae => RunFamily::Ae { n },
        Protocol::Anonq => RunFamily::Anonq { n },
        Protocol::Dcnet => RunFamily::DcNet {
            graph: parse_graph(config.graph.as_deref().unwrap_or_default())?,
            d,
        },
        other => {
            return Err(CliError::Config(format!(
                "verdicts are defined for anon, ae, anonq and dcnet, not {}",
                other.name()
            )))
        }
    })
}

fn run_verdict(config: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let family = family_of(config)?;
    let target = config.target.unwrap_or(Target::Sender);
    let opts = VerdictOptions {
        mode: config.mode.unwrap_or(Mode::Exact),
        trials: if config.trials > 1 {
            config.trials
        } else {
            VerdictOptions::default().trials
        },
        seed: seed(config),
        ..VerdictOptions::default()
    };
    let v = match &config.colluders {
        Some(set) if config.traceless => traceless_verdict(&family, target, set, &opts)?,
        Some(set) => anonymity_verdict(&family, target, set, &opts)?,
        None => worst_case_verdict(&family, target, config.t.unwrap_or(0), config.traceless, &opts)?,
    };
    report.summary.push(format!(
        "posterior_max={} baseline={} {}",
        v.posterior_max,
        v.baseline,
        if v.verdict { "PASS" } else { "FAIL" }
    ));
    if let Some(tv) = v.tv_distance {
        report.summary.push(format!("tv_distance={tv}"));
    }
    if !v.verdict {
        report.status = Status::VerdictFailed;
    }
    report.verdict = Some(v);
    Ok(())
}

fn run_aloha(config: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let n = config.n.unwrap_or(0);
    let sched = aloha_schedule(
        n,
        &config.wishers,
        config.max_backoff.unwrap_or(4),
        config.max_rounds.unwrap_or(DEFAULT_ALOHA_CAP),
        &mut trial_rng(config, 0),
    )?;
    report.summary.push(format!(
        "rounds={} transmissions={} completed={}",
        sched.rounds(),
        sched.transmissions.len(),
        sched.completed
    ));
    let record = RunRecord::new("aloha", n, sched.transcript.clone(), sched.ledger.clone())
        .with_verdict("transmissions", serde_json::to_value(&sched.transmissions).unwrap())
        .with_verdict("completed", sched.completed);
    report.records.push(record);
    Ok(())
}

fn run_elect(config: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let n = config.n.unwrap_or(0);
    let e = elect_sender_receiver(n, &config.wishers, &config.receiver_wishers, &mut trial_rng(config, 0))?;
    report.summary.push(match e.pair {
        Some((s, r)) => format!("pair={s},{r}"),
        None => "pair=none".into(),
    });
    for (role, run) in [("sender", e.sender_run), ("receiver", e.receiver_run)] {
        let record = RunRecord::new("collision", n, run.transcript, run.ledger)
            .with_verdict("election", role)
            .with_verdict("verdict", serde_json::to_value(run.verdict.verdict).unwrap());
        report.records.push(record);
    }
    Ok(())
}

fn run_keyx(config: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let n = config.n.unwrap_or(0);
    let (i, j) = (config.sender.unwrap_or(0), config.receiver.unwrap_or(0));
    let kx = anonymous_key_exchange(n, i, j, config.key_len.unwrap_or(32), &mut trial_rng(config, 0))?;
    report
        .summary
        .push(format!("kept={} agree={}", kx.kept.len(), kx.key_i == kx.key_j));
    let announcements: Vec<[u8; 2]> = kx.announcements.iter().map(|&(a, b)| [a, b]).collect();
    let record = RunRecord::new("keyx", n, kx.transcript, kx.ledger)
        .with_verdict("announcements", serde_json::to_value(announcements).unwrap())
        .with_verdict("kept", serde_json::to_value(&kx.kept).unwrap());
    report.records.push(record);
    Ok(())
}
