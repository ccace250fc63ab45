use std::fmt;
use std::str::FromStr;

use super::sampler::ChainSet;
use crate::error::{Error, Result};

/// Minimum number of retained draws for an interval.
pub const MIN_DRAWS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntervalKind {
    EqualTailed,
    /// Shortest interval holding a fraction `ρ` of the sorted draws.
    Hpd,
}

impl IntervalKind {
    pub fn name(self) -> &'static str {
        match self {
            IntervalKind::EqualTailed => "equal_tailed",
            IntervalKind::Hpd => "hpd",
        }
    }
}

impl fmt::Display for IntervalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IntervalKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal_tailed" | "equal-tailed" | "et" => Ok(IntervalKind::EqualTailed),
            "hpd" => Ok(IntervalKind::Hpd),
            _ => Err(Error::InvalidArgument(format!("unknown interval kind '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CredibleSet {
    pub level: f64,
    pub kind: IntervalKind,
    pub intervals: Vec<Interval>,
}

/// Linear-interpolation empirical quantile of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn interval_from_draws(draws: &[f64], level: f64, kind: IntervalKind) -> Result<Interval> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!("credible level {level} outside (0, 1)")));
    }
    if draws.len() < MIN_DRAWS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_DRAWS} draws for a credible interval, got {}",
            draws.len()
        )));
    }
    let mut sorted = draws.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(match kind {
        IntervalKind::EqualTailed => Interval {
            lower: quantile_sorted(&sorted, (1.0 - level) / 2.0),
            upper: quantile_sorted(&sorted, (1.0 + level) / 2.0),
        },
        IntervalKind::Hpd => {
            let n = sorted.len();
            let k = ((level * n as f64).ceil() as usize).clamp(1, n);
            let best = (0..=n - k)
                .min_by(|&a, &b| {
                    (sorted[a + k - 1] - sorted[a]).total_cmp(&(sorted[b + k - 1] - sorted[b]))
                })
                .unwrap_or(0);
            Interval {
                lower: sorted[best],
                upper: sorted[best + k - 1],
            }
        }
    })
}

/// Per-parameter intervals from the pooled retained draws.
pub fn credible_sets(chains: &ChainSet, level: f64, kind: IntervalKind) -> Result<CredibleSet> {
    let intervals = (0..chains.dim())
        .map(|j| interval_from_draws(&chains.pooled(j), level, kind))
        .collect::<Result<Vec<_>>>()?;
    Ok(CredibleSet { level, kind, intervals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn normal_equal_tailed() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws: Vec<f64> = (0..200_000).map(|_| rng.sample(StandardNormal)).collect();
        let iv = interval_from_draws(&draws, 0.95, IntervalKind::EqualTailed).unwrap();
        // quantile sd ≈ √(q(1−q)/N)/φ(1.96) ≈ 0.0084
        assert!((iv.lower + 1.959964).abs() < 0.035);
        assert!((iv.upper - 1.959964).abs() < 0.035);
        let hpd = interval_from_draws(&draws, 0.95, IntervalKind::Hpd).unwrap();
        assert!((hpd.lower - iv.lower).abs() < 0.05 && (hpd.upper - iv.upper).abs() < 0.05);
        let mass = draws.iter().filter(|&&v| hpd.contains(v)).count() as f64 / draws.len() as f64;
        assert!((mass - 0.95).abs() <= 1.0 / (draws.len() as f64).sqrt());
    }

    #[test]
    fn uniform_half_hpd_width() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws: Vec<f64> = (0..20_000).map(|_| rng.random::<f64>()).collect();
        let iv = interval_from_draws(&draws, 0.5, IntervalKind::Hpd).unwrap();
        assert!((iv.width() - 0.5).abs() < 0.02, "{}", iv.width());
    }

    #[test]
    fn hpd_is_shortest_on_skewed_draws() {
        let draws: Vec<f64> = (1..=1000).map(|k| (k as f64 / 1001.0).powi(3)).collect();
        let et = interval_from_draws(&draws, 0.8, IntervalKind::EqualTailed).unwrap();
        let hpd = interval_from_draws(&draws, 0.8, IntervalKind::Hpd).unwrap();
        assert!(hpd.width() < et.width());
        assert_eq!(hpd.lower, draws[0]);
    }

    #[test]
    fn rejects_bad_input() {
        let draws = vec![0.0; 150];
        assert!(interval_from_draws(&draws, 1.0, IntervalKind::Hpd).is_err());
        assert!(interval_from_draws(&draws, 0.0, IntervalKind::EqualTailed).is_err());
        assert!(interval_from_draws(&draws[..99], 0.9, IntervalKind::Hpd).is_err());
    }
}
