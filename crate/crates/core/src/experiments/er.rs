use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::circuit::{star_upper_opt, ExternalReport, OptimizeConfig};
use crate::edgespace::{er_random, graph_rng, GraphUniverse};
use crate::ibc::complexity_c;
use crate::rpn::{find_witness, EnumOptions, FindOutcome, MAX_SEARCH_N};

#[derive(Debug, Clone)]
pub struct ErConfig {
    pub n: usize,
    pub count: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub seed: u64,
    pub optimize: OptimizeConfig,
    /// Exact search bound; only used when `n` is small enough to search.
    pub exact_max_ops: Option<usize>,
    pub exact_budget: Option<u64>,
}

impl Default for ErConfig {
    fn default() -> Self {
        ErConfig {
            n: 100,
            count: 200,
            p_min: 0.02,
            p_max: 0.98,
            seed: 1,
            optimize: OptimizeConfig::default(),
            exact_max_ops: None,
            exact_budget: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub id: usize,
    pub n: usize,
    pub p: Option<f64>,
    pub edges: usize,
    pub c_bits: f64,
    pub kappa: f64,
    pub log2_aut: f64,
    pub star_greedy: usize,
    pub star_opt: usize,
    pub star_ext: Option<usize>,
    pub star_exact: Option<usize>,
    pub seed: u64,
}

/// Generates `count` graphs, graph `id` drawing first its edge probability
/// and then its edges from stream `id` of the master seed. Rows come back in
/// id order whatever the thread count.
pub fn run_er(cfg: &ErConfig) -> Result<Vec<ResultRow>, ExperimentError> {
    if !(0.0..=1.0).contains(&cfg.p_min) || !(cfg.p_min..=1.0).contains(&cfg.p_max) {
        return Err(ExperimentError::Config(format!(
            "need 0 <= p_min <= p_max <= 1, got {}..{}",
            cfg.p_min, cfg.p_max
        )));
    }
    let universe = GraphUniverse::new(cfg.n)?;
    (0..cfg.count)
        .into_par_iter()
        .map(|id| {
            let mut rng = graph_rng(cfg.seed, id as u64);
            let p = cfg.p_min + (cfg.p_max - cfg.p_min) * rng.gen::<f64>();
            let g = er_random(&universe, p, &mut rng)?;
            let c = complexity_c(&g);
            let opt = star_upper_opt(&g, &cfg.optimize)?;
            let star_ext = match &opt.external {
                Some(Ok(ExternalReport { count, .. })) => Some(*count),
                _ => None,
            };
            let star_exact = match cfg.exact_max_ops {
                Some(max) if cfg.n <= MAX_SEARCH_N => {
                    match find_witness(&g, max, cfg.exact_budget, EnumOptions::default())? {
                        FindOutcome::Found { ops, .. } => Some(ops),
                        _ => None,
                    }
                }
                _ => None,
            };
            Ok(ResultRow {
                id,
                n: cfg.n,
                p: Some(p),
                edges: g.len(),
                c_bits: c.c_bits,
                kappa: c.kappa,
                log2_aut: c.log2_aut,
                star_greedy: opt.greedy_count,
                star_opt: opt.count,
                star_ext,
                star_exact,
                seed: cfg.seed,
            })
        })
        .collect()
}

pub fn write_rows(rows: &[ResultRow], path: &Path) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record([
            "id",
            "n",
            "p",
            "edges",
            "c_bits",
            "kappa",
            "log2_aut",
            "star_greedy",
            "star_opt",
            "star_ext",
            "star_exact",
            "seed",
        ])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>, ExperimentError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// Violations of `star_exact <= star_opt <= star_greedy` (native columns).
pub fn audit_rows(rows: &[ResultRow]) -> Vec<String> {
    let mut out = Vec::new();
    for r in rows {
        if r.star_opt > r.star_greedy {
            out.push(format!(
                "row {}: star_opt {} > star_greedy {}",
                r.id, r.star_opt, r.star_greedy
            ));
        }
        if let Some(e) = r.star_exact {
            if e > r.star_opt {
                out.push(format!("row {}: star_exact {} > star_opt {}", r.id, e, r.star_opt));
            }
        }
    }
    out
}
