//! Designer reward bookkeeping and the selection weights derived from it.
//!
//! Each elegance measure keeps the full history of star ratings it received.
//! Its mean reward is the plain arithmetic mean of that history (zero before
//! any rating) and its selection weight is `mean * 0.04`, so a perfect
//! five-star record maps to 0.2. Coupling takes whatever weight is left.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{Elegance, Objective};

/// Maps the 1..=5 star scale onto elegance weights in [0, 0.2].
pub const REWARD_SCALE: f64 = 0.04;
pub const MAX_ELEGANCE_WEIGHT: f64 = 0.2;
pub const MIN_COUPLING_WEIGHT: f64 = 0.2;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("star rating {0} outside 1..=5")]
pub struct InvalidStars(pub i64);

/// A star rating, always in 1..=5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct Stars(u8);

impl Stars {
    pub fn new(value: i64) -> Result<Self, InvalidStars> {
        if (1..=5).contains(&value) {
            Ok(Self(value as u8))
        } else {
            Err(InvalidStars(value))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl TryFrom<i64> for Stars {
    type Error = InvalidStars;

    fn try_from(value: i64) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<Stars> for u8 {
    fn from(s: Stars) -> u8 {
        s.0
    }
}

impl fmt::Display for Stars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Selection weights in the order `[nac, ec, iu, atmr, coupling]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 5]", into = "[f64; 5]")]
pub struct Weights {
    pub elegance: [f64; 4],
    pub coupling: f64,
}

impl Weights {
    pub fn coupling_only() -> Self {
        Self {
            elegance: [0.0; 4],
            coupling: 1.0,
        }
    }

    pub fn get(&self, objective: Objective) -> f64 {
        match objective {
            Objective::Coupling => self.coupling,
            Objective::Elegance(e) => self.elegance[e.index()],
        }
    }

    pub fn sum(&self) -> f64 {
        self.coupling + self.elegance.iter().sum::<f64>()
    }
}

impl From<[f64; 5]> for Weights {
    fn from(w: [f64; 5]) -> Self {
        Self {
            elegance: [w[0], w[1], w[2], w[3]],
            coupling: w[4],
        }
    }
}

impl From<Weights> for [f64; 5] {
    fn from(w: Weights) -> Self {
        [w.elegance[0], w.elegance[1], w.elegance[2], w.elegance[3], w.coupling]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewardState {
    ratings: [Vec<Stars>; 4],
}

impl RewardState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, measure: Elegance, stars: Stars) {
        self.ratings[measure.index()].push(stars);
    }

    pub fn ratings(&self, measure: Elegance) -> &[Stars] {
        &self.ratings[measure.index()]
    }

    pub fn total_ratings(&self) -> usize {
        self.ratings.iter().map(Vec::len).sum()
    }

    /// Arithmetic mean of all ratings for the measure; zero when unrated.
    pub fn mean_reward(&self, measure: Elegance) -> f64 {
        let r = &self.ratings[measure.index()];
        if r.is_empty() {
            return 0.0;
        }
        let sum: u64 = r.iter().map(|s| u64::from(s.get())).sum();
        sum as f64 / r.len() as f64
    }

    pub fn mean_rewards(&self) -> [f64; 4] {
        Elegance::ALL.map(|e| self.mean_reward(e))
    }

    pub fn weights(&self) -> Weights {
        let elegance = self.mean_rewards().map(|r| r * REWARD_SCALE);
        let spent: f64 = elegance.iter().sum();
        // Exact arithmetic keeps coupling at or above 0.2; rounding in the sum
        // above can land one ulp under it when every measure is at 5 stars.
        let coupling = (1.0 - spent).clamp(MIN_COUPLING_WEIGHT, 1.0);
        Weights { elegance, coupling }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stars(n: i64) -> Stars {
        Stars::new(n).unwrap()
    }

    #[test]
    fn initial_weights_are_coupling_only() {
        let r = RewardState::new();
        assert_eq!(r.weights(), Weights::coupling_only());
        assert_eq!(r.mean_rewards(), [0.0; 4]);
    }

    #[test]
    fn first_five_star_rating() {
        let mut r = RewardState::new();
        r.record(Elegance::Nac, stars(5));
        let w = r.weights();
        assert_eq!(r.mean_reward(Elegance::Nac), 5.0);
        assert_eq!(w.elegance[0], 0.2);
        assert_eq!(w.coupling, 0.8);
    }

    #[test]
    fn two_ratings_average() {
        let mut r = RewardState::new();
        r.record(Elegance::Ec, stars(2));
        r.record(Elegance::Ec, stars(3));
        assert_eq!(r.mean_reward(Elegance::Ec), 2.5);
        assert_eq!(r.weights().elegance[1], 0.1);
    }

    #[test]
    fn all_measures_saturated() {
        let mut r = RewardState::new();
        for e in Elegance::ALL {
            r.record(e, stars(5));
        }
        let w = r.weights();
        assert_eq!(w.elegance, [0.2; 4]);
        assert_eq!(w.coupling, 0.2);
        assert!((w.sum() - 1.0).abs() <= f64::EPSILON);
    }

    #[test]
    fn constant_three_everywhere() {
        let mut r = RewardState::new();
        for e in Elegance::ALL {
            r.record(e, stars(3));
            r.record(e, stars(3));
        }
        let w = r.weights();
        for x in w.elegance {
            assert!((x - 0.12).abs() < 1e-15);
        }
        assert!((w.coupling - 0.52).abs() < 1e-15);
    }

    #[test]
    fn stars_range() {
        assert!(Stars::new(0).is_err());
        assert!(Stars::new(6).is_err());
        assert_eq!(Stars::new(4).unwrap().get(), 4);
        assert!(serde_json::from_str::<Stars>("7").is_err());
        assert_eq!(serde_json::from_str::<Stars>("2").unwrap(), stars(2));
    }

    #[test]
    fn weights_serialize_as_five_numbers() {
        let w = Weights {
            elegance: [0.1, 0.2, 0.0, 0.04],
            coupling: 0.66,
        };
        assert_eq!(serde_json::to_string(&w).unwrap(), "[0.1,0.2,0.0,0.04,0.66]");
    }
}
