//! Seeded random states and operators for property scans.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hilbert::{Axis, GridState, HermitianOperator};
use crate::Result;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent generator for draw `index` of a scan seeded with `seed`, so
/// parallel scans do not depend on scheduling.
pub fn rng_for(seed: u64, index: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

pub fn standard_normal<R: Rng>(r: &mut R) -> f64 {
    r.sample(StandardNormal)
}

pub fn complex_normal<R: Rng>(r: &mut R) -> C64 {
    C64::new(standard_normal(r), standard_normal(r)) / 2f64.sqrt()
}

/// Haar-random normalised vector on a Fock axis of dimension `dim`.
pub fn random_state<R: Rng>(r: &mut R, dim: usize, hbar: f64) -> Result<GridState> {
    let ax = Axis::fock(dim)?;
    let amps = (0..dim).map(|_| complex_normal(r)).collect();
    GridState::new(ax, amps, hbar)?.normalized()
}

/// GUE-like random Hermitian matrix `(G + G^dagger) / 2`.
pub fn random_hermitian<R: Rng>(r: &mut R, dim: usize) -> Result<HermitianOperator> {
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_normal(r));
    HermitianOperator::dense(Axis::fock(dim)?, (&g + g.adjoint()).scale(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let a = random_state(&mut rng_for(7, 3), 5, 1.0).unwrap();
        let b = random_state(&mut rng_for(7, 3), 5, 1.0).unwrap();
        let c = random_state(&mut rng_for(7, 4), 5, 1.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!((a.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normal_moments() {
        let mut r = rng(1);
        let xs: Vec<f64> = (0..20000).map(|_| standard_normal(&mut r)).collect();
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!(m.abs() < 0.03 && (v - 1.0).abs() < 0.05);
    }
}
