//! Sampling sets with multiplicity: separation, layer sets, weighted lower
//! Beurling density and an epsilon-matching discrepancy.

use crate::error::{Error, Result};

/// A separated set `Lambda` with multiplicity function `m`.
///
/// Points are strictly increasing; for periodic sets they live in `[0, L)`
/// and the set is understood as `Lambda + L Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiSet {
    points: Vec<f64>,
    mults: Vec<usize>,
    period: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityMode {
    /// `(sum of multiplicities) / L` for periodic sets.
    ExactPeriodic,
    /// Finite-radius surrogate: minimum over a grid of window centres of the
    /// weighted count in `[x - r, x + r]`, divided by `2 r`.
    Windowed { r_max: f64 },
}

/// Nested sets `Lambda^1 ⊇ Lambda^2 ⊇ ...`, `Lambda^k = { m >= k }`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSets {
    pub layers: Vec<MultiSet>,
}

impl MultiSet {
    pub fn new(points: Vec<f64>, mults: Vec<usize>) -> Result<Self> {
        Self::build(points, mults, None)
    }

    pub fn periodic(points: Vec<f64>, mults: Vec<usize>, period: f64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidSet(format!("period {period} must be positive")));
        }
        Self::build(points, mults, Some(period))
    }

    /// All points with multiplicity one.
    pub fn simple(points: Vec<f64>) -> Result<Self> {
        let n = points.len();
        Self::new(points, vec![1; n])
    }

    /// `alpha Z` with constant multiplicity, realised with integer period
    /// `L = alpha * count`.
    pub fn lattice(alpha: f64, count: usize, mult: usize) -> Result<Self> {
        let points = (0..count).map(|i| i as f64 * alpha).collect();
        Self::periodic(points, vec![mult; count], alpha * count as f64)
    }

    fn build(points: Vec<f64>, mults: Vec<usize>, period: Option<f64>) -> Result<Self> {
        if points.len() != mults.len() {
            return Err(Error::InvalidSet(format!(
                "{} points but {} multiplicities",
                points.len(),
                mults.len()
            )));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidSet(format!("non-finite point {p}")));
        }
        if mults.contains(&0) {
            return Err(Error::InvalidSet("multiplicities must be >= 1".into()));
        }
        if let Some(w) = points.windows(2).find(|w| w[1] <= w[0]) {
            let msg = if w[1] == w[0] {
                format!("duplicate point {} (merge multiplicities before constructing)", w[0])
            } else {
                format!("points not increasing at {} -> {}", w[0], w[1])
            };
            return Err(Error::InvalidSet(msg));
        }
        if let Some(l) = period {
            if points.iter().any(|&p| !(0.0..l).contains(&p)) {
                return Err(Error::InvalidSet(format!("periodic points must lie in [0, {l})")));
            }
        }
        Ok(MultiSet { points, mults, period })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn mults(&self) -> &[usize] {
        &self.mults
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn height(&self) -> usize {
        self.mults.iter().copied().max().unwrap_or(0)
    }

    pub fn total_mult(&self) -> usize {
        self.mults.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        self.points.iter().copied().zip(self.mults.iter().copied())
    }

    /// Same points, multiplicities replaced by `m`.
    pub fn with_constant_mult(&self, m: usize) -> Result<Self> {
        Self::build(self.points.clone(), vec![m; self.len()], self.period)
    }

    /// `Lambda + t`; periodic sets are wrapped back into `[0, L)`.
    pub fn translate(&self, t: f64) -> Self {
        match self.period {
            None => MultiSet {
                points: self.points.iter().map(|p| p + t).collect(),
                mults: self.mults.clone(),
                period: None,
            },
            Some(l) => {
                let mut pairs: Vec<(f64, usize)> = self
                    .iter()
                    .map(|(p, m)| {
                        let q = (p + t).rem_euclid(l);
                        // rem_euclid can round up to exactly l
                        (if q >= l { 0.0 } else { q }, m)
                    })
                    .collect();
                pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                MultiSet {
                    points: pairs.iter().map(|p| p.0).collect(),
                    mults: pairs.iter().map(|p| p.1).collect(),
                    period: Some(l),
                }
            }
        }
    }

    /// Minimal gap between distinct points (wrap-around gap included for
    /// periodic sets); `+inf` with fewer than two points.
    pub fn separation(&self) -> f64 {
        let mut sep = self
            .points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        if let (Some(l), Some(first), Some(last)) = (self.period, self.points.first(), self.points.last()) {
            if self.points.len() >= 2 {
                sep = sep.min(l - (last - first));
            } else {
                // a single point per period is still separated by the period
                sep = sep.min(l);
            }
        }
        sep
    }

    /// Weighted count of points in the closed interval `[lo, hi]`, with
    /// periodic repetition taken into account.
    pub fn weighted_count(&self, lo: f64, hi: f64) -> usize {
        if hi < lo {
            return 0;
        }
        match self.period {
            None => self.count_in_base(lo, hi),
            Some(l) => {
                let first = (lo / l).floor() as i64 - 1;
                let last = (hi / l).floor() as i64 + 1;
                (first..=last)
                    .map(|n| {
                        let off = n as f64 * l;
                        self.count_in_base(lo - off, hi - off)
                    })
                    .sum()
            }
        }
    }

    fn count_in_base(&self, lo: f64, hi: f64) -> usize {
        let a = self.points.partition_point(|&p| p < lo);
        let b = self.points.partition_point(|&p| p <= hi);
        self.mults[a..b.max(a)].iter().sum()
    }

    pub fn lower_density(&self, mode: DensityMode) -> Result<f64> {
        match mode {
            DensityMode::ExactPeriodic => {
                let l = self.period.ok_or(Error::NotPeriodic)?;
                Ok(self.total_mult() as f64 / l)
            }
            DensityMode::Windowed { r_max } => {
                if !(r_max > 0.0) {
                    return Err(Error::InvalidSet(format!("window radius {r_max} must be positive")));
                }
                if self.is_empty() {
                    return Ok(0.0);
                }
                let step = (self.separation() / 4.0).max(0.01);
                let (start, end) = match self.period {
                    Some(l) => (self.points[0], self.points[0] + l),
                    None => {
                        let lo = self.points[0] + r_max;
                        let hi = self.points[self.len() - 1] - r_max;
                        if hi < lo {
                            return Err(Error::InvalidSet(format!(
                                "window radius {r_max} exceeds half the set's extent"
                            )));
                        }
                        (lo, hi)
                    }
                };
                let n = ((end - start) / step).floor() as usize;
                let min_count = (0..=n)
                    .map(|i| {
                        let x = start + i as f64 * step;
                        self.weighted_count(x - r_max, x + r_max)
                    })
                    .min()
                    .unwrap_or(0);
                Ok(min_count as f64 / (2.0 * r_max))
            }
        }
    }

    pub fn layers(&self) -> LayerSets {
        let layers = (1..=self.height())
            .map(|k| {
                let points: Vec<f64> = self.iter().filter(|&(_, m)| m >= k).map(|(p, _)| p).collect();
                let n = points.len();
                MultiSet { points, mults: vec![1; n], period: self.period }
            })
            .collect();
        LayerSets { layers }
    }

    fn points_in_open(&self, a: f64, b: f64) -> Vec<(f64, usize)> {
        match self.period {
            None => self.iter().filter(|&(p, _)| p > a && p < b).collect(),
            Some(l) => {
                let first = (a / l).floor() as i64 - 1;
                let last = (b / l).floor() as i64 + 1;
                (first..=last)
                    .flat_map(|n| self.iter().map(move |(p, m)| (p + n as f64 * l, m)))
                    .filter(|&(p, _)| p > a && p < b)
                    .collect()
            }
        }
    }
}

/// True iff every point of either set inside `(a, b)` has a point of the
/// other set within distance `< eps` carrying at least its multiplicity.
pub fn weak_discrepancy(lhs: &MultiSet, rhs: &MultiSet, interval: (f64, f64), eps: f64) -> bool {
    let (a, b) = interval;
    let covered = |from: &MultiSet, to: &MultiSet| {
        let candidates = to.points_in_open(a - eps, b + eps);
        from.points_in_open(a, b)
            .iter()
            .all(|&(p, m)| candidates.iter().any(|&(q, mq)| (p - q).abs() < eps && mq >= m))
    };
    covered(lhs, rhs) && covered(rhs, lhs)
}
