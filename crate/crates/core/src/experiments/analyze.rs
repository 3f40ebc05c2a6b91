use std::fmt::Write as _;

use serde::Serialize;

use super::ExperimentError;
use crate::automorphism::aut_order;
use crate::circuit::{star_upper_opt, ExternalReport, OptimizeConfig};
use crate::edgespace::EdgeSet;
use crate::greedy::{Method, TraceStep};
use crate::ibc::{complexity_from, ComplexityValue};
use crate::rpn::{find_witness, EnumOptions, FindOutcome, MAX_SEARCH_N};

#[derive(Debug, Clone, Default)]
pub struct AnalyzeConfig {
    pub optimize: OptimizeConfig,
    pub exact_max_ops: Option<usize>,
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub n: usize,
    pub edges: usize,
    pub aut_order: String,
    pub complexity: ComplexityValue,
    pub star_greedy: Option<usize>,
    pub greedy_method: Option<Method>,
    pub greedy_trace: Vec<TraceStep>,
    pub star_opt: Option<usize>,
    pub opt_circuit: Option<String>,
    pub bound_note: Option<String>,
    pub star_exact: Option<usize>,
    pub exact_witness: Option<String>,
    pub exact_note: Option<String>,
    pub star_ext: Option<usize>,
    pub ext_note: Option<String>,
}

pub fn analyze(g: &EdgeSet, cfg: &AnalyzeConfig) -> Result<AnalyzeReport, ExperimentError> {
    let aut = aut_order(g);
    let mut report = AnalyzeReport {
        n: g.n(),
        edges: g.len(),
        aut_order: aut.group_order.to_string(),
        complexity: complexity_from(g, &aut),
        star_greedy: None,
        greedy_method: None,
        greedy_trace: Vec::new(),
        star_opt: None,
        opt_circuit: None,
        bound_note: None,
        star_exact: None,
        exact_witness: None,
        exact_note: None,
        star_ext: None,
        ext_note: None,
    };
    match star_upper_opt(g, &cfg.optimize) {
        Ok(opt) => {
            let greedy = crate::greedy::star_upper_greedy(g)?;
            report.star_greedy = Some(greedy.op_count);
            report.greedy_method = Some(greedy.method);
            report.greedy_trace = greedy.trace;
            report.star_opt = Some(opt.count);
            report.opt_circuit = Some(opt.circuit.to_string());
            if g.is_empty() {
                report.bound_note = Some("empty graph: S0 ∩ S1 ∩ S2 convention".into());
            }
            match opt.external {
                Some(Ok(ExternalReport { count, .. })) => report.star_ext = Some(count),
                Some(Err(e)) => report.ext_note = Some(e),
                None => {}
            }
        }
        Err(e) => report.bound_note = Some(e.to_string()),
    }
    if let Some(max) = cfg.exact_max_ops {
        if g.n() > MAX_SEARCH_N {
            report.exact_note = Some(format!("exact search supports n <= {MAX_SEARCH_N}"));
        } else {
            match find_witness(g, max, cfg.budget, EnumOptions::default())? {
                FindOutcome::Found { program, ops } => {
                    report.star_exact = Some(ops);
                    report.exact_witness = Some(program.to_string());
                }
                FindOutcome::NotFound => {
                    report.exact_note = Some(format!("no program with at most {max} operations"));
                }
                FindOutcome::BudgetExceeded { visited } => {
                    report.exact_note = Some(format!("budget exceeded after {visited} programs"));
                }
            }
        }
    }
    Ok(report)
}

impl AnalyzeReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let opt = |v: Option<usize>| v.map_or("-".to_string(), |x| x.to_string());
        let _ = writeln!(s, "n: {}", self.n);
        let _ = writeln!(s, "edges: {}", self.edges);
        let _ = writeln!(s, "aut_order: {}", self.aut_order);
        let _ = writeln!(s, "log2_aut: {:.6}", self.complexity.log2_aut);
        let _ = writeln!(s, "kappa: {}", self.complexity.kappa);
        let _ = writeln!(s, "log2_omega: {:.6}", self.complexity.log2_omega);
        let _ = writeln!(s, "c_bits: {:.6}", self.complexity.c_bits);
        let _ = writeln!(s, "star_greedy: {}", opt(self.star_greedy));
        if let Some(m) = self.greedy_method {
            let _ = writeln!(s, "greedy_method: {m:?}");
        }
        for t in &self.greedy_trace {
            let _ = writeln!(s, "  trace: {t:?}");
        }
        let _ = writeln!(s, "star_opt: {}", opt(self.star_opt));
        if let Some(c) = &self.opt_circuit {
            for line in c.lines() {
                let _ = writeln!(s, "  {line}");
            }
        }
        if let Some(n) = &self.bound_note {
            let _ = writeln!(s, "bound_note: {n}");
        }
        if self.star_exact.is_some() || self.exact_note.is_some() {
            let _ = writeln!(s, "star_exact: {}", opt(self.star_exact));
        }
        if let Some(w) = &self.exact_witness {
            let _ = writeln!(s, "exact_witness: {w}");
        }
        if let Some(n) = &self.exact_note {
            let _ = writeln!(s, "exact_note: {n}");
        }
        if self.star_ext.is_some() || self.ext_note.is_some() {
            let _ = writeln!(s, "star_ext: {}", opt(self.star_ext));
        }
        if let Some(n) = &self.ext_note {
            let _ = writeln!(s, "ext_note: {n}");
        }
        s
    }
}
