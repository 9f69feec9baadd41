//! Simulated designers used in place of a human for headless episodes.
//!
//! Profiles are written as `constant:3`, `random:SEED` or `purist:nac`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::evolution::Stars;
use crate::metrics::{Elegance, MetricVector};

/// Anything that turns a presented candidate into a star rating.
pub trait Designer: Send {
    fn rate(&mut self, candidate: &MetricVector, presented: Elegance) -> Stars;
}

/// Always gives the same rating.
#[derive(Debug, Clone)]
pub struct ConstantDesigner {
    stars: Stars,
}

impl ConstantDesigner {
    pub fn new(stars: Stars) -> Self {
        Self { stars }
    }
}

impl Designer for ConstantDesigner {
    fn rate(&mut self, _: &MetricVector, _: Elegance) -> Stars {
        self.stars
    }
}

/// Uniform ratings from its own seeded stream.
#[derive(Debug, Clone)]
pub struct RandomDesigner {
    rng: ChaCha8Rng,
}

impl RandomDesigner {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Designer for RandomDesigner {
    fn rate(&mut self, _: &MetricVector, _: Elegance) -> Stars {
        Stars::new(self.rng.gen_range(1..=5)).expect("1..=5")
    }
}

/// Cares about one elegance measure only, whatever was used to pick the
/// candidate. Values are scored against the running range seen so far: the
/// lowest value seen earns 5 stars, the highest 1.
#[derive(Debug, Clone)]
pub struct PuristDesigner {
    target: Elegance,
    range: Option<(f64, f64)>,
}

impl PuristDesigner {
    pub fn new(target: Elegance) -> Self {
        Self { target, range: None }
    }

    pub fn target(&self) -> Elegance {
        self.target
    }

    /// Observed (min, max) of the target measure.
    pub fn range(&self) -> Option<(f64, f64)> {
        self.range
    }

    /// Stars for `value` against a fixed range, without updating it.
    pub fn score(value: f64, min: f64, max: f64) -> Stars {
        if max <= min {
            return Stars::new(3).expect("3");
        }
        let scaled = 1.0 + (4.0 * (max - value) / (max - min)).round();
        Stars::new(scaled.clamp(1.0, 5.0) as i64).expect("clamped")
    }
}

impl Designer for PuristDesigner {
    fn rate(&mut self, candidate: &MetricVector, _: Elegance) -> Stars {
        let v = candidate.elegance(self.target);
        match self.range {
            None => {
                self.range = Some((v, v));
                Stars::new(3).expect("3")
            }
            Some((lo, hi)) => {
                let (lo, hi) = (lo.min(v), hi.max(v));
                self.range = Some((lo, hi));
                Self::score(v, lo, hi)
            }
        }
    }
}

/// Parsed designer profile string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignerSpec {
    Constant(Stars),
    Random(u64),
    Purist(Elegance),
}

impl DesignerSpec {
    pub fn build(self) -> Box<dyn Designer> {
        match self {
            Self::Constant(s) => Box::new(ConstantDesigner::new(s)),
            Self::Random(seed) => Box::new(RandomDesigner::new(seed)),
            Self::Purist(m) => Box::new(PuristDesigner::new(m)),
        }
    }
}

impl FromStr for DesignerSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| format!("designer `{s}` must look like constant:N, random:SEED or purist:MEASURE"))?;
        match kind {
            "constant" => {
                let n: i64 = arg.parse().map_err(|_| format!("bad star count `{arg}`"))?;
                Stars::new(n).map(Self::Constant).map_err(|e| e.to_string())
            }
            "random" => arg.parse().map(Self::Random).map_err(|_| format!("bad seed `{arg}`")),
            "purist" => arg.parse().map(Self::Purist),
            other => Err(format!("unknown designer kind `{other}`")),
        }
    }
}

impl fmt::Display for DesignerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(s) => write!(f, "constant:{s}"),
            Self::Random(seed) => write!(f, "random:{seed}"),
            Self::Purist(m) => write!(f, "purist:{}", m.as_str()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nac(v: f64) -> MetricVector {
        MetricVector {
            coupling: 0.5,
            nac: v,
            ec: 9.0,
            iu: 9.0,
            atmr: 9.0,
        }
    }

    #[test]
    fn constant_is_constant() {
        let mut d = ConstantDesigner::new(Stars::new(3).unwrap());
        for m in Elegance::ALL {
            assert_eq!(d.rate(&nac(1.0), m).get(), 3);
        }
    }

    #[test]
    fn purist_reference_trace() {
        let mut d = PuristDesigner::new(Elegance::Nac);
        let got: Vec<u8> = [2.0, 0.0, 1.0]
            .iter()
            .map(|&v| d.rate(&nac(v), Elegance::Iu).get())
            .collect();
        assert_eq!(got, vec![3, 5, 3]);
        assert_eq!(d.range(), Some((0.0, 2.0)));
    }

    #[test]
    fn purist_degenerate_range() {
        let mut d = PuristDesigner::new(Elegance::Atmr);
        let m = MetricVector {
            coupling: 0.1,
            nac: 0.0,
            ec: 0.0,
            iu: 0.0,
            atmr: 0.7,
        };
        for _ in 0..10 {
            assert_eq!(d.rate(&m, Elegance::Nac).get(), 3);
        }
    }

    #[test]
    fn purist_half_rounds_up() {
        // 4 * (1 - 0.375) / 1 = 2.5 -> 3, plus one
        assert_eq!(PuristDesigner::score(0.375, 0.0, 1.0).get(), 4);
    }

    #[test]
    fn random_frequencies() {
        let mut d = RandomDesigner::new(17);
        let mut counts = [0usize; 5];
        for _ in 0..10_000 {
            counts[d.rate(&nac(0.0), Elegance::Nac).get() as usize - 1] += 1;
        }
        let sd = (10_000.0f64 * 0.2 * 0.8).sqrt();
        for c in counts {
            assert!((c as f64 - 2_000.0).abs() <= 3.0 * sd, "{counts:?}");
        }
    }

    #[test]
    fn spec_strings() {
        assert_eq!(
            "constant:3".parse::<DesignerSpec>().unwrap(),
            DesignerSpec::Constant(Stars::new(3).unwrap())
        );
        assert_eq!("random:42".parse::<DesignerSpec>().unwrap(), DesignerSpec::Random(42));
        assert_eq!(
            "purist:atmr".parse::<DesignerSpec>().unwrap(),
            DesignerSpec::Purist(Elegance::Atmr)
        );
        for bad in [
            "constant:0",
            "constant:x",
            "random:-1",
            "purist:foo",
            "oracle:1",
            "purist",
        ] {
            assert!(bad.parse::<DesignerSpec>().is_err(), "{bad}");
        }
        for s in ["constant:5", "random:7", "purist:ec"] {
            assert_eq!(s.parse::<DesignerSpec>().unwrap().to_string(), s);
        }
    }
}
