//! Conic domains in the tangent bundle of a single chart.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A point `(x, y)` of a chart of the tangent bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Point {
    pub fn new(x: impl Into<Vec<f64>>, y: impl Into<Vec<f64>>) -> Self {
        Point {
            x: x.into(),
            y: y.into(),
        }
    }
}

pub type Membership = Arc<dyn Fn(&[f64], &[f64]) -> bool + Send + Sync>;
pub type ConePredicate = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;
pub type PointMap = Arc<dyn Fn(&Point) -> Option<Point> + Send + Sync>;

/// How sample points are drawn.
#[derive(Clone)]
pub enum SamplerSpec {
    /// `x` uniform in a box, `y` with uniform direction and `|y|` uniform in
    /// `[r_min, r_max]`; directions hitting any excluded cone are redrawn.
    Box {
        x_box: Vec<(f64, f64)>,
        y_radii: (f64, f64),
        excluded: Vec<ConePredicate>,
    },
    /// Samples of another domain pushed through a point map; points the map
    /// rejects are redrawn.
    PushForward {
        base: Arc<ConicDomain>,
        map: PointMap,
    },
}

/// Open conic subset of `TU` for one chart `U`.
#[derive(Clone)]
pub struct ConicDomain {
    name: String,
    dim: usize,
    membership: Membership,
    sampler: SamplerSpec,
}

impl fmt::Debug for ConicDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConicDomain")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .finish()
    }
}

const MAX_ATTEMPTS_PER_SAMPLE: usize = 10_000;

impl ConicDomain {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        membership: impl Fn(&[f64], &[f64]) -> bool + Send + Sync + 'static,
        sampler: SamplerSpec,
    ) -> Self {
        ConicDomain {
            name: name.into(),
            dim,
            membership: Arc::new(membership),
            sampler,
        }
    }

    /// `U × (R^n \ 0)` with `U` the given box.
    pub fn slit(name: impl Into<String>, x_box: Vec<(f64, f64)>, y_radii: (f64, f64)) -> Self {
        let dim = x_box.len();
        ConicDomain::new(
            name,
            dim,
            |_, y| y.iter().any(|&v| v != 0.0),
            SamplerSpec::Box {
                x_box,
                y_radii,
                excluded: Vec::new(),
            },
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sampler(&self) -> &SamplerSpec {
        &self.sampler
    }

    pub fn membership(&self) -> &Membership {
        &self.membership
    }

    pub fn contains(&self, x: &[f64], y: &[f64]) -> bool {
        x.len() == self.dim
            && y.len() == self.dim
            && y.iter().any(|&v| v != 0.0)
            && y.iter().chain(x).all(|v| v.is_finite())
            && (self.membership)(x, y)
    }

    pub fn check(&self, x: &[f64], y: &[f64]) -> Result<()> {
        if self.contains(x, y) {
            Ok(())
        } else {
            Err(Error::Domain {
                domain: self.name.clone(),
                x: x.to_vec(),
                y: y.to_vec(),
            })
        }
    }

    /// `count` reproducible samples for the given seed.
    pub fn samples(&self, count: usize, seed: u64) -> Result<Vec<Point>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.draw(count, &mut rng)
    }

    fn draw(&self, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Point>> {
        let mut out = Vec::with_capacity(count);
        let budget = count.max(1) * MAX_ATTEMPTS_PER_SAMPLE;
        let mut attempts = 0;
        while out.len() < count {
            attempts += 1;
            if attempts > budget {
                return Err(Error::Sampler(self.name.clone()));
            }
            let candidate = match &self.sampler {
                SamplerSpec::Box {
                    x_box,
                    y_radii,
                    excluded,
                } => {
                    let x: Vec<f64> = x_box
                        .iter()
                        .map(|&(lo, hi)| {
                            if hi > lo {
                                rng.random_range(lo..hi)
                            } else {
                                lo
                            }
                        })
                        .collect();
                    let dir = random_direction(self.dim, rng);
                    if excluded.iter().any(|cone| cone(&dir)) {
                        continue;
                    }
                    let (r0, r1) = *y_radii;
                    let r = if r1 > r0 {
                        rng.random_range(r0..r1)
                    } else {
                        r0
                    };
                    Point {
                        x,
                        y: dir.iter().map(|d| d * r).collect(),
                    }
                }
                SamplerSpec::PushForward { base, map } => {
                    let p = base.draw(1, rng)?.remove(0);
                    match map(&p) {
                        Some(q) => q,
                        None => continue,
                    }
                }
            };
            if self.contains(&candidate.x, &candidate.y) {
                out.push(candidate);
            }
        }
        Ok(out)
    }
}

fn random_direction(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-3 && norm <= 1.0 {
            return v.iter().map(|a| a / norm).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_reproducible_and_inside() {
        let d = ConicDomain::slit("plane", vec![(-1.0, 1.0); 2], (0.5, 2.0));
        let a = d.samples(50, 3).unwrap();
        let b = d.samples(50, 3).unwrap();
        assert_eq!(a, b);
        for p in &a {
            assert!(d.contains(&p.x, &p.y));
            let r = p.y.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((0.5..=2.0).contains(&r));
        }
        assert_ne!(a, d.samples(50, 4).unwrap());
    }

    #[test]
    fn conic_membership_is_scale_invariant_on_samples() {
        let d = ConicDomain::new(
            "timelike-ish",
            2,
            |_, y| y[1] * y[1] > y[0] * y[0],
            SamplerSpec::Box {
                x_box: vec![(0.0, 1.0); 2],
                y_radii: (1.0, 1.5),
                excluded: vec![],
            },
        );
        for p in d.samples(100, 11).unwrap() {
            for lambda in [0.5, 2.0] {
                let y: Vec<f64> = p.y.iter().map(|v| v * lambda).collect();
                assert!(d.contains(&p.x, &y));
            }
        }
    }

    #[test]
    fn zero_direction_is_rejected() {
        let d = ConicDomain::slit("plane", vec![(-1.0, 1.0); 2], (0.5, 2.0));
        assert!(matches!(
            d.check(&[0.0, 0.0], &[0.0, 0.0]),
            Err(Error::Domain { .. })
        ));
    }
}
