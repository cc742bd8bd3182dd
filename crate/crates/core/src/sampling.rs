//! Sample domains and deterministic point sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::jetcalc::Point;
use crate::{Error, Result};

/// A coordinate box with optional periodicity per axis. For a periodic axis
/// the box is half-open and its length equals the period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleDomain {
    pub bounds: [[f64; 2]; 3],
    pub periods: [Option<f64>; 3],
}

impl SampleDomain {
    pub fn new(bounds: [[f64; 2]; 3], periods: [Option<f64>; 3]) -> Result<Self> {
        let d = SampleDomain { bounds, periods };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        for axis in 0..3 {
            let [lo, hi] = self.bounds[axis];
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(Error::Construction(format!(
                    "empty sample box along axis {axis}: [{lo}, {hi}]"
                )));
            }
            if let Some(period) = self.periods[axis] {
                if (period - (hi - lo)).abs() > 1e-12 * period.abs().max(1.0) {
                    return Err(Error::Construction(format!(
                        "period {period} along axis {axis} does not match box length {}",
                        hi - lo
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn periodic(&self, axis: usize) -> bool {
        self.periods[axis].is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    /// Regular grid with the given counts per axis.
    Grid([usize; 3]),
    /// Shifted Halton sequence with the given number of points.
    Random(usize),
}

impl Strategy {
    pub const DEFAULT_GRID: Strategy = Strategy::Grid([8, 8, 16]);

    pub fn count(&self) -> usize {
        match self {
            Strategy::Grid(n) => n[0] * n[1] * n[2],
            Strategy::Random(n) => *n,
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Strategy::Grid([a, b, c]) => write!(f, "grid {a}x{b}x{c}"),
            Strategy::Random(n) => write!(f, "random {n}"),
        }
    }
}

fn grid_coordinate(domain: &SampleDomain, axis: usize, i: usize, n: usize) -> f64 {
    let [lo, hi] = domain.bounds[axis];
    let h = (hi - lo) / n as f64;
    if domain.periodic(axis) {
        // The seam hi ≡ lo is represented once, by lo.
        lo + i as f64 * h
    } else {
        lo + (i as f64 + 0.5) * h
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut acc = 0.0;
    while i > 0 {
        acc += (i % base) as f64 * scale;
        i /= base;
        scale *= inv;
    }
    acc
}

/// Points of `domain` for the given strategy. The grid ignores `seed`; the
/// quasi-random set is a Halton sequence (bases 2, 3, 5) under a
/// Cranley-Patterson shift drawn from `seed`.
pub fn sample_points(domain: &SampleDomain, strategy: Strategy, seed: u64) -> Result<Vec<Point>> {
    domain.validate()?;
    match strategy {
        Strategy::Grid(n) => {
            if n.contains(&0) {
                return Err(Error::Construction("grid dimensions must be positive".into()));
            }
            let mut out = Vec::with_capacity(strategy.count());
            for i in 0..n[0] {
                for j in 0..n[1] {
                    for k in 0..n[2] {
                        out.push([
                            grid_coordinate(domain, 0, i, n[0]),
                            grid_coordinate(domain, 1, j, n[1]),
                            grid_coordinate(domain, 2, k, n[2]),
                        ]);
                    }
                }
            }
            Ok(out)
        }
        Strategy::Random(n) => {
            if n == 0 {
                return Err(Error::Construction("sample count must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let shift: [f64; 3] = std::array::from_fn(|_| rng.random::<f64>());
            Ok((1..=n as u64)
                .map(|i| {
                    std::array::from_fn(|axis| {
                        let u = (radical_inverse(i, [2, 3, 5][axis]) + shift[axis]).fract();
                        let [lo, hi] = domain.bounds[axis];
                        lo + u * (hi - lo)
                    })
                })
                .collect())
        }
    }
}

/// Generator for the random test vectors used at point `index`; independent
/// of evaluation order.
pub fn point_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// A vector with components uniform in [−1, 1].
pub fn random_vector(rng: &mut ChaCha8Rng) -> [f64; 3] {
    std::array::from_fn(|_| rng.random_range(-1.0..=1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn torus() -> SampleDomain {
        SampleDomain::new([[0.0, PI]; 3], [Some(PI); 3]).unwrap()
    }

    #[test]
    fn grid_excludes_the_seam() {
        let pts = sample_points(&torus(), Strategy::Grid([2, 2, 2]), 0).unwrap();
        assert_eq!(pts.len(), 8);
        assert!(pts.iter().all(|p| p.iter().all(|&c| (0.0..PI).contains(&c))));
        assert!(pts.iter().any(|p| p[2] == 0.0));
        assert!(pts.iter().any(|p| p[2] == PI / 2.0));
    }

    #[test]
    fn non_periodic_grid_uses_cell_centres() {
        let d = SampleDomain::new([[-1.0, 1.0]; 3], [None; 3]).unwrap();
        let pts = sample_points(&d, Strategy::Grid([2, 1, 1]), 0).unwrap();
        assert_eq!(pts, vec![[-0.5, 0.0, 0.0], [0.5, 0.0, 0.0]]);
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_points(&torus(), Strategy::Random(100), 42).unwrap();
        let b = sample_points(&torus(), Strategy::Random(100), 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].map(f64::to_bits), b[0].map(f64::to_bits));
        let c = sample_points(&torus(), Strategy::Random(100), 43).unwrap();
        assert_ne!(a, c);
        assert!(a.iter().all(|p| p.iter().all(|&c| (0.0..PI).contains(&c))));
    }

    #[test]
    fn invalid_domains_are_rejected() {
        assert!(SampleDomain::new([[1.0, 1.0], [0.0, 1.0], [0.0, 1.0]], [None; 3]).is_err());
        assert!(SampleDomain::new([[0.0, 1.0]; 3], [Some(2.0), None, None]).is_err());
        assert!(sample_points(&torus(), Strategy::Random(0), 1).is_err());
        assert!(sample_points(&torus(), Strategy::Grid([0, 1, 1]), 1).is_err());
    }

    #[test]
    fn radical_inverse_values() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(5, 3) - (2.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-15);
    }
}
