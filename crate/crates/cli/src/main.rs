use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ghz_anon::lab::{Mode, Target};
use ghz_anon_cli::output::{resolve, write_atomic};
use ghz_anon_cli::sweep::{sweep, SweepKind, SweepOptions};
use ghz_anon_cli::{run, CliError, Protocol, RunConfig};

#[derive(Parser)]
#[command(name = "ghz-anon", version, about = "Anonymous transmission over shared GHZ states")]
struct Cli {
    /// Write the JSON report here (default: $GHZ_ANON_OUT_DIR/<name>.json when set).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the JSON report on stdout instead of the summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Common {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Send one bit anonymously.
    Anon {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sender: usize,
        #[arg(long, default_value_t = 0)]
        d: u8,
        /// Players who withhold their broadcast (forces an abort).
        #[arg(long, value_delimiter = ',')]
        withhold: Vec<usize>,
    },
    /// Establish anonymous entanglement.
    Ae {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sender: usize,
        #[arg(long)]
        receiver: usize,
    },
    /// Send a qubit anonymously.
    Anonq {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sender: usize,
        #[arg(long)]
        receiver: usize,
        /// Input amplitudes `re_a,im_a,re_b,im_b`.
        #[arg(long, value_delimiter = ',')]
        qubit: Option<Vec<f64>>,
    },
    /// Decide whether exactly one player wants to send.
    Collision {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        wishers: Vec<usize>,
    },
    /// One round of a classical DC-net, with the trace-back attack.
    Dcnet {
        #[command(flatten)]
        common: Common,
        /// `complete:N`, `cycle:N`, `path:N`, `star:N` or a graph file.
        #[arg(long)]
        graph: String,
        #[arg(long)]
        sender: usize,
        #[arg(long, default_value_t = 1)]
        d: u8,
    },
    /// Audit a key-sharing graph and/or report the key-count bound for `(n, t)`.
    Keygraph {
        #[arg(long)]
        graph: Option<String>,
        #[arg(long, value_delimiter = ',')]
        colluders: Option<Vec<usize>>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
    },
    /// Anonymity or tracelessness verdict for a protocol.
    Verdict {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "anon")]
        protocol: Protocol,
        #[arg(long, value_enum, default_value = "sender")]
        target: TargetArg,
        /// Worst case over all colluder sets of this size.
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        colluders: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        /// Give the adversary every player's randomness after the run.
        #[arg(long)]
        traceless: bool,
        #[arg(long)]
        d: Option<u8>,
        #[arg(long)]
        graph: Option<String>,
    },
    /// Slotted ALOHA scheduling on top of collision detection.
    Aloha {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        wishers: Vec<usize>,
        #[arg(long)]
        max_backoff: Option<u64>,
        #[arg(long)]
        max_rounds: Option<usize>,
    },
    /// Elect a sender and a receiver.
    Elect {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        senders: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        receivers: Vec<usize>,
    },
    /// Anonymous pairwise key exchange.
    Keyx {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        #[arg(long)]
        len: Option<usize>,
    },
    /// Run a parameter grid and write one CSV row per cell.
    Sweep {
        #[arg(value_enum)]
        kind: SweepKind,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum TargetArg {
    Sender,
    Receiver,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModeArg {
    Exact,
    Sampled,
}

fn base(protocol: Protocol, common: Common) -> RunConfig {
    let mut c = RunConfig::new(protocol);
    c.n = common.n;
    c.seed = common.seed;
    c.trials = common.trials;
    c
}

fn to_config(command: Command) -> Result<RunConfig, CliError> {
    let c = match command {
        Command::Run { config } => {
            let text =
                std::fs::read_to_string(&config).map_err(|e| CliError::Config(format!("{}: {e}", config.display())))?;
            RunConfig::from_json(&text)?
        }
        Command::Anon {
            common,
            sender,
            d,
            withhold,
        } => RunConfig {
            sender: Some(sender),
            d: Some(d),
            withhold,
            ..base(Protocol::Anon, common)
        },
        Command::Ae {
            common,
            sender,
            receiver,
        } => RunConfig {
            sender: Some(sender),
            receiver: Some(receiver),
            ..base(Protocol::Ae, common)
        },
        Command::Anonq {
            common,
            sender,
            receiver,
            qubit,
        } => RunConfig {
            sender: Some(sender),
            receiver: Some(receiver),
            qubit: match qubit.as_deref() {
                None => None,
                Some(&[ar, ai, br, bi]) => Some([[ar, ai], [br, bi]]),
                Some(q) => return Err(CliError::Config(format!("--qubit takes 4 numbers, got {}", q.len()))),
            },
            ..base(Protocol::Anonq, common)
        },
        Command::Collision { common, wishers } => RunConfig {
            wishers,
            ..base(Protocol::Collision, common)
        },
        Command::Dcnet {
            common,
            graph,
            sender,
            d,
        } => RunConfig {
            graph: Some(graph),
            sender: Some(sender),
            d: Some(d),
            ..base(Protocol::Dcnet, common)
        },
        Command::Keygraph { graph, colluders, n, t } => RunConfig {
            graph,
            colluders,
            n,
            t,
            ..RunConfig::new(Protocol::Keygraph)
        },
        Command::Verdict {
            common,
            protocol,
            target,
            t,
            colluders,
            mode,
            traceless,
            d,
            graph,
        } => RunConfig {
            family: Some(protocol),
            target: Some(match target {
                TargetArg::Sender => Target::Sender,
                TargetArg::Receiver => Target::Receiver,
            }),
            t,
            colluders,
            mode: Some(match mode {
                ModeArg::Exact => Mode::Exact,
                ModeArg::Sampled => Mode::Sampled,
            }),
            traceless,
            d,
            graph,
            ..base(Protocol::Verdict, common)
        },
        Command::Aloha {
            common,
            wishers,
            max_backoff,
            max_rounds,
        } => RunConfig {
            wishers,
            max_backoff,
            max_rounds,
            ..base(Protocol::Aloha, common)
        },
        Command::Elect {
            common,
            senders,
            receivers,
        } => RunConfig {
            wishers: senders,
            receiver_wishers: receivers,
            ..base(Protocol::Elect, common)
        },
        Command::Keyx { common, i, j, len } => RunConfig {
            sender: Some(i),
            receiver: Some(j),
            key_len: len,
            ..base(Protocol::Keyx, common)
        },
        Command::Sweep { .. } => unreachable!("sweeps do not build a run config"),
    };
    Ok(c)
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    if let Command::Sweep {
        kind,
        seed,
        n_min,
        n_max,
        trials,
    } = cli.command
    {
        let table = sweep(&SweepOptions {
            kind,
            seed,
            n_min,
            n_max,
            trials,
        })?;
        let csv = table.to_csv()?;
        let name = format!("sweep-{}-seed{seed}.csv", format!("{kind:?}").to_lowercase());
        match resolve(cli.out.as_deref(), &name) {
            Some(path) => {
                write_atomic(&path, &csv)?;
                println!("cells={} mismatches={}", table.rows.len(), table.mismatches);
                println!("wrote={}", path.display());
            }
            None => print!("{}", String::from_utf8_lossy(&csv)),
        }
        return Ok(0);
    }

    let mut config = to_config(cli.command)?;
    if cli.out.is_some() {
        config.output = cli.out;
    }
    let report = run(&config)?;
    let json = report.to_json();
    if let Some(path) = resolve(config.output.as_deref(), &report.file_name()) {
        write_atomic(&path, json.as_bytes())?;
    }
    if cli.json {
        print!("{json}");
    } else {
        for line in &report.summary {
            println!("{line}");
        }
    }
    Ok(report.status.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let message: Vec<&str> = text
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:"))
                .filter(|l| !l.is_empty())
                .collect();
            let err = CliError::Config(message.join(" ").trim_start_matches("error: ").to_owned());
            eprintln!("{}", err.to_json());
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
