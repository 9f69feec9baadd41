//! Fitness of a candidate design: external coupling and four elegance
//! measures. All five are minimised.
//!
//! Every elegance measure is a population standard deviation (divide by the
//! number of classes) of some per-class count:
//!
//! * NAC: mean of the deviations of attribute counts and of method counts.
//! * EC: external couples incident to each class. A use whose method and
//!   attribute live in different classes counts once for each of the two.
//! * IU: uses with both ends inside the class.
//! * ATMR: attributes per method, with the method count clamped to at least 1.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::genome::DesignSolution;
use crate::problem::DesignProblem;

/// One of the four elegance measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Elegance {
    Nac,
    Ec,
    Iu,
    Atmr,
}

impl Elegance {
    pub const ALL: [Elegance; 4] = [Self::Nac, Self::Ec, Self::Iu, Self::Atmr];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Nac => "nac",
            Self::Ec => "ec",
            Self::Iu => "iu",
            Self::Atmr => "atmr",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Nac => "NAC",
            Self::Ec => "EC",
            Self::Iu => "IU",
            Self::Atmr => "ATMR",
        }
    }
}

impl fmt::Display for Elegance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Elegance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nac" => Ok(Self::Nac),
            "ec" => Ok(Self::Ec),
            "iu" => Ok(Self::Iu),
            "atmr" => Ok(Self::Atmr),
            other => Err(format!(
                "unknown elegance measure `{other}` (expected nac, ec, iu or atmr)"
            )),
        }
    }
}

/// Any of the five selection objectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    Coupling,
    Elegance(Elegance),
}

impl Objective {
    pub const ALL: [Objective; 5] = [
        Self::Coupling,
        Self::Elegance(Elegance::Nac),
        Self::Elegance(Elegance::Ec),
        Self::Elegance(Elegance::Iu),
        Self::Elegance(Elegance::Atmr),
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricVector {
    pub coupling: f64,
    pub nac: f64,
    pub ec: f64,
    pub iu: f64,
    pub atmr: f64,
}

impl MetricVector {
    pub fn get(&self, objective: Objective) -> f64 {
        match objective {
            Objective::Coupling => self.coupling,
            Objective::Elegance(e) => self.elegance(e),
        }
    }

    pub fn elegance(&self, measure: Elegance) -> f64 {
        match measure {
            Elegance::Nac => self.nac,
            Elegance::Ec => self.ec,
            Elegance::Iu => self.iu,
            Elegance::Atmr => self.atmr,
        }
    }

    /// Field-wise combination of a non-empty set of vectors.
    fn fold(vectors: &[MetricVector], f: impl Fn(&[f64]) -> f64) -> MetricVector {
        let column = |g: fn(&MetricVector) -> f64| f(&vectors.iter().map(g).collect::<Vec<_>>());
        MetricVector {
            coupling: column(|v| v.coupling),
            nac: column(|v| v.nac),
            ec: column(|v| v.ec),
            iu: column(|v| v.iu),
            atmr: column(|v| v.atmr),
        }
    }

    /// Per-field minimum. Panics on an empty slice.
    pub fn best_of(vectors: &[MetricVector]) -> MetricVector {
        assert!(!vectors.is_empty());
        Self::fold(vectors, |xs| xs.iter().copied().fold(f64::INFINITY, f64::min))
    }

    /// Per-field arithmetic mean. Panics on an empty slice.
    pub fn mean_of(vectors: &[MetricVector]) -> MetricVector {
        assert!(!vectors.is_empty());
        Self::fold(vectors, |xs| xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

/// Per-class tallies every metric is derived from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassProfile {
    pub attributes: Vec<usize>,
    pub methods: Vec<usize>,
    pub internal_uses: Vec<usize>,
    /// External uses touching the class (counted at both ends).
    pub external_couples: Vec<usize>,
    pub external_uses: usize,
    pub total_uses: usize,
}

impl ClassProfile {
    pub fn of(problem: &DesignProblem, solution: &DesignSolution) -> Self {
        debug_assert!(solution.is_bound_to(problem));
        let k = solution.class_count();
        let mut profile = ClassProfile {
            attributes: vec![0; k],
            methods: vec![0; k],
            internal_uses: vec![0; k],
            external_couples: vec![0; k],
            external_uses: 0,
            total_uses: problem.uses().len(),
        };
        for a in 0..problem.attribute_count() {
            profile.attributes[solution.attribute_class(a)] += 1;
        }
        for m in 0..problem.method_count() {
            profile.methods[solution.method_class(m)] += 1;
        }
        for u in problem.uses() {
            let mc = solution.method_class(u.method);
            let ac = solution.attribute_class(u.attribute);
            if mc == ac {
                profile.internal_uses[mc] += 1;
            } else {
                profile.external_uses += 1;
                profile.external_couples[mc] += 1;
                profile.external_couples[ac] += 1;
            }
        }
        profile
    }

    pub fn coupling(&self) -> f64 {
        self.external_uses as f64 / self.total_uses as f64
    }

    pub fn nac(&self) -> f64 {
        (population_std_counts(&self.attributes) + population_std_counts(&self.methods)) / 2.0
    }

    pub fn ec(&self) -> f64 {
        population_std_counts(&self.external_couples)
    }

    pub fn iu(&self) -> f64 {
        population_std_counts(&self.internal_uses)
    }

    pub fn atmr(&self) -> f64 {
        let ratios: Vec<f64> = self
            .attributes
            .iter()
            .zip(&self.methods)
            .map(|(&a, &m)| a as f64 / m.max(1) as f64)
            .collect();
        population_std(&ratios)
    }

    pub fn metrics(&self) -> MetricVector {
        MetricVector {
            coupling: self.coupling(),
            nac: self.nac(),
            ec: self.ec(),
            iu: self.iu(),
            atmr: self.atmr(),
        }
    }
}

/// Population standard deviation. Zero for an empty slice.
pub fn population_std(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / n).sqrt()
}

fn population_std_counts(counts: &[usize]) -> f64 {
    let values: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    population_std(&values)
}

pub fn coupling(problem: &DesignProblem, solution: &DesignSolution) -> f64 {
    ClassProfile::of(problem, solution).coupling()
}

pub fn nac_elegance(problem: &DesignProblem, solution: &DesignSolution) -> f64 {
    ClassProfile::of(problem, solution).nac()
}

pub fn ec_elegance(problem: &DesignProblem, solution: &DesignSolution) -> f64 {
    ClassProfile::of(problem, solution).ec()
}

pub fn iu_elegance(problem: &DesignProblem, solution: &DesignSolution) -> f64 {
    ClassProfile::of(problem, solution).iu()
}

pub fn atmr_elegance(problem: &DesignProblem, solution: &DesignSolution) -> f64 {
    ClassProfile::of(problem, solution).atmr()
}

/// All five objectives from a single pass over the problem.
pub fn evaluate(problem: &DesignProblem, solution: &DesignSolution) -> MetricVector {
    ClassProfile::of(problem, solution).metrics()
}
