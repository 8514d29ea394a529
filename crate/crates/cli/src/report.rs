use serde::Serialize;
use serde_json::Value;

use crate::config::{ExperimentConfig, Format};

/// What each subcommand exercises.
pub const ANCHORS: &[(&str, &str)] = &[
    ("classify", "isometry trichotomy: elliptic, parabolic and hyperbolic elements of PSL(2,R) and PSL(2,C)"),
    ("thickthin", "thick-thin decomposition: thin parts are cusps or tubes around short closed geodesics"),
    ("psi-check", "main lemma on psi: psi and its gradient vanish together"),
    ("presentation", "nerve presentations: every relation has length at most 3"),
    ("count-presentations", "presentation counting: v^(av) <= N(c, v) <= v^(bv)"),
    ("chabauty", "Chabauty topology: convergence of closed subgroups of R^n"),
    ("mahler", "Mahler compactness: bounded covolume and systole give a convergent subsequence"),
    ("solvable", "non-uniform lattice in (prod F_p^*) x| (sum F_p): vol(G_m/Gamma_m) = prod p_n/(p_n - 1)"),
    ("heisenberg", "H(Z) is a uniform lattice in the Heisenberg group with fundamental domain [0,1)^3"),
    ("zassenhaus", "Zassenhaus neighborhood: ||[a,b] - 1|| <= 8 ||a - 1|| ||b - 1||"),
    ("jordan", "Jordan's theorem: finite linear groups have abelian subgroups of bounded index"),
    ("crystallo", "Bieberbach: crystallographic groups are finitely covered by a torus"),
    ("recurrence", "recurrence: Omega^-1 g^n Omega meets the lattice for infinitely many n"),
    ("span", "Borel density: a lattice spans the full matrix algebra"),
];

pub fn anchor(command: &str) -> &'static str {
    ANCHORS.iter().find(|(c, _)| *c == command).map(|(_, a)| *a).expect("every command has an anchor")
}

/// A table for sweeps, written when CSV output is requested.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// Result of one subcommand.
pub struct Outcome {
    pub result: Value,
    pub table: Option<Table>,
}

impl Outcome {
    pub fn new(result: impl Serialize) -> Self {
        Self { result: serde_json::to_value(result).expect("results serialize"), table: None }
    }

    pub fn with_table(mut self, t: Table) -> Self {
        self.table = Some(t);
        self
    }
}

#[derive(Serialize)]
pub struct Report<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub verifies: &'static str,
    pub config: &'a ExperimentConfig,
    pub result: &'a Value,
}

impl<'a> Report<'a> {
    pub fn new(config: &'a ExperimentConfig, result: &'a Value) -> Self {
        Self {
            tool: "latlab",
            version: env!("CARGO_PKG_VERSION"),
            command: &config.command,
            verifies: anchor(&config.command),
            config,
            result,
        }
    }

    pub fn render(&self, table: Option<&Table>) -> String {
        match self.config.format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Csv => self.render_csv(table),
        }
    }

    /// Comment lines with the command, anchor and config, then the sweep
    /// table, or the flattened result when the command has none.
    fn render_csv(&self, table: Option<&Table>) -> String {
        let mut out = format!("# latlab {} {}\n# verifies: {}\n", self.version, self.command, self.verifies);
        let mut cfg = Vec::new();
        flatten("", &serde_json::to_value(self.config).expect("config serializes"), &mut cfg);
        for (k, v) in cfg {
            out.push_str(&format!("# config.{k} = {v}\n"));
        }
        let flat;
        let table = match table {
            Some(t) => t,
            None => {
                let mut pairs = Vec::new();
                flatten("", self.result, &mut pairs);
                flat = Table {
                    header: vec!["key".into(), "value".into()],
                    rows: pairs.into_iter().map(|(k, v)| vec![k, v]).collect(),
                };
                &flat
            }
        };
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&table.header).expect("in-memory write");
        for r in &table.rows {
            w.write_record(r).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields"));
        out
    }
}

/// Dotted paths to every scalar of a JSON value.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}
