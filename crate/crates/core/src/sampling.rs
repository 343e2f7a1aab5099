//! Seeded pseudo-random sampling of points, directions and phases.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::potential::ComplexVector;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point in the disc `|w| <= radius`.
pub fn disc_point<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
}

pub fn unit_phase<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Uniform direction on the unit sphere of `C^n`.
pub fn unit_direction<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
            .collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Points drawn uniformly from the polydisc `|z_j| <= radius`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolydiscSampler {
    pub radius: f64,
    pub points: usize,
    pub seed: u64,
}

impl PolydiscSampler {
    pub fn new(radius: f64, points: usize, seed: u64) -> Self {
        Self { radius, points, seed }
    }

    pub fn points(&self, n: usize) -> Vec<ComplexVector> {
        let mut rng = rng(self.seed);
        (0..self.points)
            .map(|_| {
                let coords = (0..n).map(|_| disc_point(&mut rng, self.radius)).collect();
                ComplexVector::new(coords).expect("finite sample")
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampler_is_deterministic_and_bounded() {
        let s = PolydiscSampler::new(5.0, 50, 11);
        let a = s.points(3);
        assert_eq!(a, s.points(3));
        assert!(a.iter().flat_map(|z| z.as_slice()).all(|c| c.norm() <= 5.0));
        assert_ne!(a, PolydiscSampler::new(5.0, 50, 12).points(3));
    }

    #[test]
    fn directions_are_unit() {
        let mut r = rng(3);
        for _ in 0..20 {
            let v = unit_direction(&mut r, 4);
            let n: f64 = v.iter().map(|c| c.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-14);
        }
    }
}
