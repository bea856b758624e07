use std::path::PathBuf;

use ghz_anon::lab::{Mode, Target};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Anon,
    Ae,
    Anonq,
    Collision,
    Dcnet,
    Keygraph,
    Verdict,
    Aloha,
    Elect,
    Keyx,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::Anon => "anon",
            Protocol::Ae => "ae",
            Protocol::Anonq => "anonq",
            Protocol::Collision => "collision",
            Protocol::Dcnet => "dcnet",
            Protocol::Keygraph => "keygraph",
            Protocol::Verdict => "verdict",
            Protocol::Aloha => "aloha",
            Protocol::Elect => "elect",
            Protocol::Keyx => "keyx",
        }
    }
}

/// One invocation, as read from a JSON config file or assembled from flags.
///
/// Graphs are given as `complete:N`, `cycle:N`, `path:N`, `star:N` or a path
/// to an edge-list or adjacency-JSON file. For `keyx` the two nodes are
/// `sender` and `receiver`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub protocol: Protocol,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sender: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receiver: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub wishers: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub receiver_wishers: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colluders: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u8>,
    /// Input qubit `[[re α, im α], [re β, im β]]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubit: Option<[[f64; 2]; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
    /// Protocol analysed by `verdict`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Protocol>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Target>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub traceless: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub withhold: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_backoff: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rounds: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key_len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn one() -> usize {
    1
}

impl RunConfig {
    pub fn new(protocol: Protocol) -> Self {
        Self {
            protocol,
            n: None,
            seed: None,
            trials: 1,
            sender: None,
            receiver: None,
            wishers: Vec::new(),
            receiver_wishers: Vec::new(),
            colluders: None,
            t: None,
            d: None,
            qubit: None,
            graph: None,
            family: None,
            target: None,
            mode: None,
            traceless: false,
            withhold: Vec::new(),
            max_backoff: None,
            max_rounds: None,
            key_len: None,
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    fn is_stochastic(&self) -> bool {
        match self.protocol {
            Protocol::Keygraph => false,
            Protocol::Verdict => self.mode == Some(Mode::Sampled),
            _ => true,
        }
    }

    /// Structural checks that need no graph parsing: required fields,
    /// index ranges and the mandatory seed.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.is_stochastic() && self.seed.is_none() {
            return bad(format!("{} is stochastic and needs --seed", self.protocol.name()));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if let Some(d) = self.d {
            if d > 1 {
                return bad(format!("d must be 0 or 1, got {d}"));
            }
        }
        let needs_n = !matches!(self.protocol, Protocol::Keygraph | Protocol::Dcnet)
            && !(self.protocol == Protocol::Verdict && self.family == Some(Protocol::Dcnet));
        if needs_n && self.n.is_none() {
            return bad(format!("{} needs --n", self.protocol.name()));
        }
        let needs_graph = self.protocol == Protocol::Dcnet
            || (self.protocol == Protocol::Verdict && self.family == Some(Protocol::Dcnet))
            || (self.protocol == Protocol::Keygraph && self.t.is_none());
        if needs_graph && self.graph.is_none() {
            return bad(format!("{} needs --graph", self.protocol.name()));
        }
        let required: &[(&str, Option<usize>)] = match self.protocol {
            Protocol::Anon => &[("sender", self.sender)],
            Protocol::Ae | Protocol::Anonq | Protocol::Keyx => &[("sender", self.sender), ("receiver", self.receiver)],
            Protocol::Dcnet => &[("sender", self.sender)],
            _ => &[],
        };
        for (name, value) in required {
            if value.is_none() {
                return bad(format!("{} needs --{name}", self.protocol.name()));
            }
        }
        if let Some(n) = self.n {
            let singles = [("sender", self.sender), ("receiver", self.receiver)];
            for (name, v) in singles {
                if let Some(v) = v {
                    if v >= n {
                        return bad(format!("{name} {v} out of range for n = {n}"));
                    }
                }
            }
            let lists = [
                ("wishers", &self.wishers),
                ("receiver-wishers", &self.receiver_wishers),
                ("withhold", &self.withhold),
            ];
            for (name, list) in lists
                .into_iter()
                .chain(self.colluders.as_ref().map(|c| ("colluders", c)))
            {
                if let Some(&v) = list.iter().find(|&&v| v >= n) {
                    return bad(format!("{name} entry {v} out of range for n = {n}"));
                }
            }
        }
        if self.protocol == Protocol::Verdict && self.colluders.is_some() && self.t.is_some() {
            return bad("give either --t or --colluders, not both".into());
        }
        Ok(())
    }
}
