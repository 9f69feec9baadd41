//! Elegance-versus-reward analysis over a set of episode logs.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{
    friedman, spearman, wilcoxon_signed_rank, Alternative, FriedmanResult, PairedSample, StatsError, WilcoxonResult,
};
use crate::evolution::EpisodeLog;
use crate::metrics::Elegance;

/// Spearman correlation between the stars given to candidates presented
/// under `reward` and those candidates' `elegance` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCell {
    pub reward: Elegance,
    pub elegance: Elegance,
    pub n: usize,
    pub rho: Option<f64>,
    pub p_two_tailed: Option<f64>,
    /// Why the cell could not be computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Sixteen cells, rows by reward measure, columns by elegance measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub interactions: usize,
    pub cells: Vec<CorrelationCell>,
}

impl CorrelationMatrix {
    pub fn cell(&self, reward: Elegance, elegance: Elegance) -> &CorrelationCell {
        &self.cells[reward.index() * 4 + elegance.index()]
    }

    /// Tab-separated table: one coefficient row, one significance row and one
    /// count row per reward measure.
    pub fn to_tsv(&self) -> String {
        let fmt = |v: Option<f64>, digits: usize| match v {
            Some(x) => format!("{x:.digits$}"),
            None => "n/a".to_string(),
        };
        let mut out = String::from("reward\tstatistic");
        for e in Elegance::ALL {
            write!(out, "\t{} Elegance", e.label()).unwrap();
        }
        out.push('\n');
        for r in Elegance::ALL {
            let row = |label: &str, f: &dyn Fn(&CorrelationCell) -> String| {
                let mut line = format!(
                    "{}\t{label}",
                    if label == "Correlation Coefficient" {
                        format!("{} Reward", r.label())
                    } else {
                        String::new()
                    }
                );
                for e in Elegance::ALL {
                    write!(line, "\t{}", f(self.cell(r, e))).unwrap();
                }
                line.push('\n');
                line
            };
            out.push_str(&row("Correlation Coefficient", &|c| fmt(c.rho, 3)));
            out.push_str(&row("Sig. (2-tailed)", &|c| fmt(c.p_two_tailed, 3)));
            out.push_str(&row("N", &|c| c.n.to_string()));
        }
        out
    }
}

pub fn correlate_logs(logs: &[EpisodeLog]) -> Result<CorrelationMatrix, StatsError> {
    let interactions: Vec<_> = logs.iter().flat_map(|l| l.interactions()).collect();
    if interactions.len() < 3 {
        return Err(StatsError::TooFewObservations {
            needed: 3,
            got: interactions.len(),
        });
    }
    let mut cells = Vec::with_capacity(16);
    for reward in Elegance::ALL {
        let rows: Vec<_> = interactions.iter().filter(|i| i.chosen_measure == reward).collect();
        for elegance in Elegance::ALL {
            let stars: Vec<f64> = rows.iter().map(|i| f64::from(i.stars.get())).collect();
            let values: Vec<f64> = rows.iter().map(|i| i.candidate_metrics.elegance(elegance)).collect();
            let n = rows.len();
            let outcome = if n < 3 {
                Err(format!("only {n} interactions"))
            } else {
                PairedSample::new(stars, values)
                    .and_then(|s| spearman(&s))
                    .map_err(|e| e.to_string())
            };
            cells.push(match outcome {
                Ok(r) => CorrelationCell {
                    reward,
                    elegance,
                    n,
                    rho: Some(r.rho),
                    p_two_tailed: r.p_two_tailed,
                    note: None,
                },
                Err(note) => CorrelationCell {
                    reward,
                    elegance,
                    n,
                    rho: None,
                    p_two_tailed: None,
                    note: Some(note),
                },
            });
        }
    }
    Ok(CorrelationMatrix {
        interactions: interactions.len(),
        cells,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseWilcoxon {
    pub first: Elegance,
    pub second: Elegance,
    /// `None` when every paired difference is zero.
    pub result: Option<WilcoxonResult>,
}

/// Do the best-of-population elegance values at halt differ across the four
/// measures? One block per log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalEleganceComparison {
    pub episodes: usize,
    pub mean_best: [f64; 4],
    pub friedman: FriedmanResult,
    pub pairwise: Vec<PairwiseWilcoxon>,
}

pub fn compare_final_elegance(logs: &[EpisodeLog]) -> Result<FinalEleganceComparison, StatsError> {
    let blocks: Vec<Vec<f64>> = logs
        .iter()
        .filter_map(|l| l.halt())
        .map(|h| {
            let b = h.final_population_summary.best;
            Elegance::ALL.iter().map(|&e| b.elegance(e)).collect()
        })
        .collect();
    let friedman = friedman(&blocks)?;
    let n = blocks.len() as f64;
    let mut mean_best = [0.0; 4];
    for (j, m) in mean_best.iter_mut().enumerate() {
        *m = blocks.iter().map(|b| b[j]).sum::<f64>() / n;
    }
    let mut pairwise = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let sample = PairedSample::new(
                blocks.iter().map(|b| b[i]).collect(),
                blocks.iter().map(|b| b[j]).collect(),
            )?;
            let result = match wilcoxon_signed_rank(&sample, Alternative::TwoSided) {
                Ok(r) => Some(r),
                Err(StatsError::NoEffect) => None,
                Err(e) => return Err(e),
            };
            pairwise.push(PairwiseWilcoxon {
                first: Elegance::ALL[i],
                second: Elegance::ALL[j],
                result,
            });
        }
    }
    Ok(FinalEleganceComparison {
        episodes: blocks.len(),
        mean_best,
        friedman,
        pairwise,
    })
}
