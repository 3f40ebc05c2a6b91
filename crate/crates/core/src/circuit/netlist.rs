//! Netlist export and the optional external synthesizer adapter.

use std::io::Write;
use std::process::Command;

use serde::Serialize;
use thiserror::Error;

use super::{CircuitDag, GateOp, Signal};

/// Environment variable holding the external command template.
pub const EXT_SYNTH_ENV: &str = "STARC_EXT_SYNTH";

/// BLIF-compatible netlist with binary gates `g0, g1, …`, inputs
/// `v0 … v{n-1}` and a single output `out`. N-ary gates are chained left
/// to right.
pub fn export_netlist(c: &CircuitDag) -> String {
    let c = c.compact();
    let mut out = String::from(".model star\n.inputs");
    for i in 0..c.n() {
        out.push_str(&format!(" v{i}"));
    }
    out.push_str("\n.outputs out\n");
    let mut names: Vec<String> = Vec::with_capacity(c.gates().len());
    let mut next = 0usize;
    let name = |s: Signal, names: &[String]| match s {
        Signal::Input(i) => format!("v{i}"),
        Signal::Gate(g) => names[g as usize].clone(),
    };
    for g in c.gates() {
        let mut acc = name(g.children[0], &names);
        for &ch in &g.children[1..] {
            let b = name(ch, &names);
            let k = format!("g{next}");
            next += 1;
            let body = match g.op {
                GateOp::And => "11 1\n",
                GateOp::Or => "1- 1\n-1 1\n",
            };
            out.push_str(&format!(".names {acc} {b} {k}\n{body}"));
            acc = k;
        }
        names.push(acc);
    }
    out.push_str(&format!(".names {} out\n1 1\n.end\n", name(c.output(), &names)));
    out
}

/// First integer after `and =`, or failing that after `nd =`.
pub fn parse_gate_count(log: &str) -> Option<usize> {
    let after = |key: &str| -> Option<usize> {
        let rest = &log[log.find(key)? + key.len()..];
        let digits: String = rest.trim_start().chars().take_while(|c| c.is_ascii_digit()).collect();
        digits.parse().ok()
    };
    after("and =").or_else(|| after("nd ="))
}

#[derive(Debug, Clone, Serialize)]
pub struct ExternalReport {
    pub count: usize,
    pub command: String,
    pub log: String,
}

#[derive(Debug, Error)]
pub enum ExternalError {
    #[error("could not write netlist: {0}")]
    Io(#[from] std::io::Error),
    #[error("external command exited with {status}: {log}")]
    Failed { status: String, log: String },
    #[error("no gate count found in external output: {log}")]
    Unparseable { log: String },
}

/// Writes `c` to a fresh temporary netlist, runs `template` through `sh -c`
/// with `{in}` replaced by its path, and parses the optimized count.
pub fn external_optimize(c: &CircuitDag, template: &str) -> Result<ExternalReport, ExternalError> {
    let mut file = tempfile::Builder::new().prefix("starc-").suffix(".blif").tempfile()?;
    file.write_all(export_netlist(c).as_bytes())?;
    file.flush()?;
    let command = template.replace("{in}", &file.path().display().to_string());
    let output = Command::new("sh").arg("-c").arg(&command).output()?;
    let log = format!(
        "{}{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    if !output.status.success() {
        return Err(ExternalError::Failed {
            status: output.status.to_string(),
            log,
        });
    }
    match parse_gate_count(&log) {
        Some(count) => Ok(ExternalReport { count, command, log }),
        None => Err(ExternalError::Unparseable { log }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;

    #[test]
    fn golden_and() {
        let mut b = CircuitBuilder::new(3);
        let o = b.and(vec![Signal::Input(0), Signal::Input(1)]);
        let c = b.finish(o).unwrap();
        assert_eq!(
            export_netlist(&c),
            ".model star\n.inputs v0 v1 v2\n.outputs out\n.names v0 v1 g0\n11 1\n.names g0 out\n1 1\n.end\n"
        );
    }

    #[test]
    fn nary_or_is_chained() {
        let mut b = CircuitBuilder::new(3);
        let o = b.or(vec![Signal::Input(0), Signal::Input(1), Signal::Input(2)]);
        let c = b.finish(o).unwrap();
        assert_eq!(
            export_netlist(&c),
            ".model star\n.inputs v0 v1 v2\n.outputs out\n\
             .names v0 v1 g0\n1- 1\n-1 1\n.names g0 v2 g1\n1- 1\n-1 1\n.names g1 out\n1 1\n.end\n"
        );
    }

    #[test]
    fn input_output() {
        let c = CircuitDag::input(2, 1).unwrap();
        assert!(export_netlist(&c).ends_with(".names v1 out\n1 1\n.end\n"));
    }

    #[test]
    fn stats_parsing() {
        assert_eq!(
            parse_gate_count("star : i/o = 5/ 1  lat = 0  and =      6  lev =  3"),
            Some(6)
        );
        assert_eq!(parse_gate_count("nd = 12 edge = 30"), Some(12));
        assert_eq!(parse_gate_count("nothing here"), None);
    }

    #[test]
    fn adapter_failures_are_reported() {
        let c = CircuitDag::input(2, 1).unwrap();
        assert!(matches!(
            external_optimize(&c, "definitely-not-a-synth-tool-xyz {in}"),
            Err(ExternalError::Failed { .. })
        ));
        assert!(matches!(
            external_optimize(&c, "echo hello"),
            Err(ExternalError::Unparseable { .. })
        ));
        let r = external_optimize(&c, "test -s {in} && echo 'and = 4'").unwrap();
        assert_eq!(r.count, 4);
    }
}
