use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::{Effect, Povm};
use crate::hilbert::{Axis, GridState, HermitianOperator};
use crate::{Result, TempusError};

/// Covariant phase observable of the oscillator `H = N + 1/2` (`hbar = 1`)
/// on the Fock levels `0..=nmax`.
#[derive(Debug, Clone)]
pub struct OscillatorPhase {
    pub nmax: usize,
    pub basis: Axis,
    pub hamiltonian: HermitianOperator,
    /// `T0 = ∫_0^{2pi} t F(dt)`.
    pub t0: DMatrix<C64>,
}

/// `(2pi)^-1 ∫_a^b e^{i k t} dt`.
fn phase_integral(k: i64, a: f64, b: f64) -> C64 {
    if k == 0 {
        return C64::new((b - a) / (2.0 * PI), 0.0);
    }
    let k = k as f64;
    (C64::from_polar(1.0, k * b) - C64::from_polar(1.0, k * a)) / C64::new(0.0, 2.0 * PI * k)
}

impl OscillatorPhase {
    pub fn new(nmax: usize) -> Result<Self> {
        if nmax < 8 {
            return Err(TempusError::Parameter(format!(
                "nmax must be at least 8, got {nmax}"
            )));
        }
        let basis = Axis::fock(nmax + 1)?;
        let hamiltonian = HermitianOperator::multiplication(basis, |n| n + 0.5)?;
        let t0 = DMatrix::from_fn(nmax + 1, nmax + 1, |n, m| {
            if n == m {
                C64::new(PI, 0.0)
            } else {
                C64::new(1.0, 0.0) / C64::new(0.0, n as f64 - m as f64)
            }
        });
        Ok(Self {
            nmax,
            basis,
            hamiltonian,
            t0,
        })
    }

    pub fn dim(&self) -> usize {
        self.nmax + 1
    }

    /// `F(Z)` for `Z = [a, b]`.
    pub fn effect(&self, a: f64, b: f64) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim(), self.dim(), |n, m| {
            phase_integral(n as i64 - m as i64, a, b)
        })
    }

    /// `∫_0^{2pi} t^2 F(dt)`.
    pub fn second_moment(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim(), self.dim(), |n, m| {
            if n == m {
                C64::new(4.0 * PI * PI / 3.0, 0.0)
            } else {
                let k = n as f64 - m as f64;
                C64::new(2.0 / (k * k), 0.0) + C64::new(0.0, -2.0 * PI / k)
            }
        })
    }

    /// `T0 - t I + 2 pi F([0, t])`.
    pub fn shifted(&self, t: f64) -> DMatrix<C64> {
        let n = self.dim();
        &self.t0 - DMatrix::<C64>::identity(n, n) * C64::new(t, 0.0)
            + self.effect(0.0, t) * C64::new(2.0 * PI, 0.0)
    }

    /// `e^{itH} T0 e^{-itH}`.
    pub fn conjugated(&self, t: f64) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim(), self.dim(), |n, m| {
            self.t0[(n, m)] * C64::from_polar(1.0, t * (n as f64 - m as f64))
        })
    }

    /// Largest entry of `shifted(t) - conjugated(t)` on levels `0..=nmax/2`.
    pub fn shift_defect(&self, t: f64) -> f64 {
        let k = self.nmax / 2 + 1;
        let d = self.shifted(t) - self.conjugated(t);
        d.view((0, 0), (k, k))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Family over `bins` equal bins of `[0, 2pi)`, periodic and normalised.
    pub fn povm(&self, bins: usize) -> Result<Povm> {
        let w = 2.0 * PI / bins as f64;
        let edges: Vec<(f64, f64)> = (0..bins)
            .map(|k| (k as f64 * w, (k + 1) as f64 * w))
            .collect();
        let effects = crate::par::map(&edges, |&(a, b)| Effect::Dense(self.effect(a, b)));
        Ok(
            Povm::new(self.basis, edges, effects, (0.0, 2.0 * PI), true)?
                .with_periodic()
                .with_moments(
                    Effect::Dense(self.t0.clone()),
                    Effect::Dense(self.second_moment()),
                ),
        )
    }

    /// `|<psi|[H, T0]|psi> - i|` for a normalised state on levels up to
    /// `nmax/2`. Exactly `|sum_n psi_n|^2`, the overlap with the phase
    /// vector at `t = 0`, where the commutation relation breaks.
    pub fn commutator_defect(&self, psi: &GridState) -> Result<f64> {
        self.check_interior(psi)?;
        let psi = psi.normalized()?;
        let v = DVector::from_column_slice(&psi.amplitudes);
        let hv = DVector::from_iterator(
            self.dim(),
            v.iter().enumerate().map(|(n, z)| z * (n as f64 + 0.5)),
        );
        let tv = &self.t0 * &v;
        let cross = (hv.adjoint() * tv)[(0, 0)];
        Ok((C64::new(0.0, 2.0 * cross.im) - C64::new(0.0, 1.0)).norm())
    }

    fn check_interior(&self, psi: &GridState) -> Result<()> {
        if !psi.axis.compatible(&self.basis, 1e-9) {
            return Err(TempusError::Domain(
                "state is not on the oscillator's Fock basis".into(),
            ));
        }
        let total: f64 = psi.amplitudes.iter().map(|z| z.norm_sqr()).sum();
        let outer: f64 = psi.amplitudes[self.nmax / 2 + 1..]
            .iter()
            .map(|z| z.norm_sqr())
            .sum();
        if outer > 1e-12 * total {
            return Err(TempusError::Boundary(format!(
                "test vector has weight {:.3e} above level {}",
                outer / total,
                self.nmax / 2
            )));
        }
        Ok(())
    }

    /// Phase-localised packet on levels `2..=nmax/2`: Gaussian weights
    /// centred at `nmax/4` with spread `nmax/16`, phase `e^{i n pi}` so the
    /// packet sits opposite the cut at `t = 0`.
    pub fn test_vector(&self) -> Result<GridState> {
        let centre = self.nmax as f64 / 4.0;
        let spread = self.nmax as f64 / 16.0;
        let amps = (0..self.dim())
            .map(|n| {
                if n < 2 || n > self.nmax / 2 {
                    C64::new(0.0, 0.0)
                } else {
                    let x = n as f64 - centre;
                    C64::from_polar((-x * x / (4.0 * spread * spread)).exp(), n as f64 * PI)
                }
            })
            .collect();
        GridState::new(self.basis, amps, 1.0)?.normalized()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timepovm::{check_covariance, finite_dimension_check, time_statistics};

    #[test]
    fn povm_axioms() {
        let osc = OscillatorPhase::new(16).unwrap();
        let p = osc.povm(24).unwrap();
        let ax = p.axioms();
        assert!(ax.min_eigenvalue >= -1e-10);
        assert!(ax.normalization_defect <= 1e-12);
        let full = osc.effect(0.0, 2.0 * PI);
        assert!((full - DMatrix::<C64>::identity(17, 17)).norm() < 1e-12);
    }

    #[test]
    fn covariance_mod_two_pi() {
        let osc = OscillatorPhase::new(12).unwrap();
        let p = osc.povm(16).unwrap();
        let w = 2.0 * PI / 16.0;
        let r =
            check_covariance(&p, &osc.hamiltonian, 1.0, &[w, 5.0 * w, -3.0 * w, 17.0 * w]).unwrap();
        assert!(r.max_defect <= 1e-8 && !r.interpolated, "{r:?}");
    }

    #[test]
    fn shifted_family_matches_conjugation() {
        let osc = OscillatorPhase::new(20).unwrap();
        for t in [0.3, 1.7, 4.0] {
            assert!(osc.shift_defect(t) < 1e-12);
        }
    }

    #[test]
    fn commutator_entries() {
        let osc = OscillatorPhase::new(10).unwrap();
        let h = osc.hamiltonian.to_dense();
        let c = &h * &osc.t0 - &osc.t0 * &h;
        for n in 0..11 {
            for m in 0..11 {
                let want = if n == m {
                    C64::new(0.0, 0.0)
                } else {
                    C64::new(0.0, -1.0)
                };
                assert!((c[(n, m)] - want).norm() < 1e-12);
            }
        }
        let f = finite_dimension_check(&h, &osc.t0, 1.0);
        assert!(f.holds() && f.trace_im.abs() < 1e-12);
    }

    #[test]
    fn commutator_defect_decays_with_truncation() {
        let sizes = [16usize, 32, 48, 64];
        let d: Vec<f64> = sizes
            .iter()
            .map(|&n| {
                let osc = OscillatorPhase::new(n).unwrap();
                osc.commutator_defect(&osc.test_vector().unwrap()).unwrap()
            })
            .collect();
        let x: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
        let slope = crate::abm::loglog_slope(&x, &d).unwrap();
        assert!(slope < 0.0, "{d:?}");
        assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    }

    #[test]
    fn edge_vector_rejected() {
        let osc = OscillatorPhase::new(8).unwrap();
        let s = GridState::basis(osc.basis, 1.0, 8).unwrap();
        assert!(matches!(
            osc.commutator_defect(&s),
            Err(TempusError::Boundary(_))
        ));
    }

    #[test]
    fn number_state_has_uniform_phase() {
        let osc = OscillatorPhase::new(10).unwrap();
        let p = osc.povm(8).unwrap();
        let s = GridState::basis(osc.basis, 1.0, 3).unwrap();
        for q in p.distribution(&s).unwrap() {
            assert!((q - 1.0 / 8.0).abs() < 1e-12);
        }
        let st = time_statistics(&p, &s, &osc.hamiltonian).unwrap();
        assert!((st.operator.variance - 4.0 * PI * PI / 12.0).abs() < 1e-10);
        assert!(!st.uncertainty.asserted);
    }
}
