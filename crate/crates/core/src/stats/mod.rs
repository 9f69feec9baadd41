//! Rank-based statistics: tie-averaged ranks, Spearman correlation, the
//! Friedman test and the Wilcoxon matched-pairs signed-rank test.
//!
//! p-values come from the usual large-sample approximations (Student t for
//! Spearman, chi-square for Friedman, normal for Wilcoxon), except that the
//! Wilcoxon test switches to the exact permutation distribution when at most
//! [`WILCOXON_EXACT_MAX_N`] non-zero differences remain.

mod correlate;

pub use correlate::{
    compare_final_elegance, correlate_logs, CorrelationCell, CorrelationMatrix, FinalEleganceComparison,
    PairwiseWilcoxon,
};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal, StudentsT};
use thiserror::Error;

pub const WILCOXON_EXACT_MAX_N: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("non-finite value in sample")]
    NonFinite,
    #[error("correlation undefined: a variable has zero rank variance")]
    ZeroVariance,
    #[error("all paired differences are zero; the test is undefined")]
    NoEffect,
    #[error("rows of the block matrix differ in length")]
    Ragged,
}

/// Two equally long, finite samples with at least two pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl PairedSample {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, StatsError> {
        if x.len() != y.len() {
            return Err(StatsError::LengthMismatch(x.len(), y.len()));
        }
        if x.len() < 2 {
            return Err(StatsError::TooFewObservations {
                needed: 2,
                got: x.len(),
            });
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
        Ok(Self { x, y })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }
}

/// Ascending ranks starting at 1; tied values share the mean of their span.
pub fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j
        let rank = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            out[k] = rank;
        }
        i = j;
    }
    out
}

/// Sizes of the groups of tied values.
fn tie_groups(values: &[f64]) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut groups = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        groups.push(j - i);
        i = j;
    }
    groups
}

fn tie_term(values: &[f64]) -> f64 {
    tie_groups(values)
        .into_iter()
        .map(|t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpearmanResult {
    pub rho: f64,
    /// Two-tailed; `None` below three pairs.
    pub p_two_tailed: Option<f64>,
    pub n: usize,
}

/// Pearson correlation of the tie-averaged ranks.
pub fn spearman(sample: &PairedSample) -> Result<SpearmanResult, StatsError> {
    let rx = ranks(sample.x());
    let ry = ranks(sample.y());
    let n = rx.len();
    let nf = n as f64;
    let mx = rx.iter().sum::<f64>() / nf;
    let my = ry.iter().sum::<f64>() / nf;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let rho = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let p_two_tailed = (n >= 3).then(|| {
        let df = nf - 2.0;
        if 1.0 - rho * rho <= 0.0 {
            return 0.0;
        }
        let t = rho * (df / (1.0 - rho * rho)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
        (2.0 * dist.sf(t.abs())).min(1.0)
    });
    Ok(SpearmanResult { rho, p_two_tailed, n })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FriedmanResult {
    pub chi2: f64,
    pub df: usize,
    pub p: f64,
}

/// Friedman test on a blocks x treatments matrix, ranking within each block
/// and correcting for ties.
pub fn friedman(blocks: &[Vec<f64>]) -> Result<FriedmanResult, StatsError> {
    let n = blocks.len();
    if n < 2 {
        return Err(StatsError::TooFewObservations { needed: 2, got: n });
    }
    let k = blocks[0].len();
    if k < 2 {
        return Err(StatsError::TooFewObservations { needed: 2, got: k });
    }
    if blocks.iter().any(|b| b.len() != k) {
        return Err(StatsError::Ragged);
    }
    if blocks.iter().flatten().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }

    let mut rank_sums = vec![0.0; k];
    let mut ties = 0.0;
    for block in blocks {
        for (sum, r) in rank_sums.iter_mut().zip(ranks(block)) {
            *sum += r;
        }
        ties += tie_term(block);
    }
    let (nf, kf) = (n as f64, k as f64);
    let df = k - 1;
    let correction = 1.0 - ties / (nf * (kf * kf * kf - kf));
    if correction <= 0.0 {
        return Ok(FriedmanResult { chi2: 0.0, df, p: 1.0 });
    }
    let ss: f64 = rank_sums.iter().map(|r| r * r).sum();
    let raw = 12.0 / (nf * kf * (kf + 1.0)) * ss - 3.0 * nf * (kf + 1.0);
    let chi2 = (raw / correction).max(0.0);
    let p = ChiSquared::new(df as f64).expect("df >= 1").sf(chi2);
    Ok(FriedmanResult { chi2, df, p })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    TwoSided,
    /// x tends to be smaller than y.
    Less,
    /// x tends to be larger than y.
    Greater,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// min(W+, W-)
    pub w: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    pub n_effective: usize,
    pub p: f64,
    pub alternative: Alternative,
    pub exact: bool,
}

/// Wilcoxon matched-pairs signed-rank test on `x - y`. Zero differences are
/// dropped before ranking.
pub fn wilcoxon_signed_rank(sample: &PairedSample, alternative: Alternative) -> Result<WilcoxonResult, StatsError> {
    let diffs: Vec<f64> = sample
        .x()
        .iter()
        .zip(sample.y())
        .map(|(a, b)| a - b)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    if n == 0 {
        return Err(StatsError::NoEffect);
    }
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let r = ranks(&magnitudes);
    let w_plus: f64 = diffs.iter().zip(&r).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let w_minus: f64 = diffs.iter().zip(&r).filter(|(d, _)| **d < 0.0).map(|(_, r)| r).sum();

    let exact = n <= WILCOXON_EXACT_MAX_N;
    let p = if exact {
        exact_signed_rank_p(&r, w_plus, alternative)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term(&magnitudes) / 48.0;
        let z = (w_plus - mean) / var.sqrt();
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        match alternative {
            Alternative::TwoSided => (2.0 * normal.sf(z.abs())).min(1.0),
            Alternative::Less => normal.cdf(z),
            Alternative::Greater => normal.sf(z),
        }
    };

    Ok(WilcoxonResult {
        w: w_plus.min(w_minus),
        w_plus,
        w_minus,
        n_effective: n,
        p,
        alternative,
        exact,
    })
}

/// Null distribution of W+ by dynamic programming over the (doubled, hence
/// integral) ranks: each rank joins the positive sum with probability 1/2.
fn exact_signed_rank_p(ranks: &[f64], w_plus: f64, alternative: Alternative) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &d in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + d] += counts[s];
            }
        }
        reach += d;
    }
    let all = 2f64.powi(ranks.len() as i32);
    let observed = (w_plus * 2.0).round() as usize;
    let lower: f64 = counts[..=observed].iter().sum::<f64>() / all;
    let upper: f64 = counts[observed..].iter().sum::<f64>() / all;
    match alternative {
        Alternative::TwoSided => (2.0 * lower.min(upper)).min(1.0),
        Alternative::Less => lower,
        Alternative::Greater => upper,
    }
}
