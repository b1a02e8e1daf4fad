use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{CovarianceReport, Effect, Povm};
use crate::hilbert::{Axis, AxisKind, GridDft, GridState, HermitianOperator, TrigInterpolant};
use crate::{Result, TempusError};

/// Relative weight allowed in the outer cells of a test state.
pub const BOUNDARY_TOLERANCE: f64 = 1e-10;
const BOUNDARY_CELLS: usize = 4;

/// Particle in a uniform field, `H = P^2/2m - m g Q`, on a centred
/// momentum grid. The canonical time is `T = -P/(m g)`.
///
/// With this Hamiltonian `dP/dt = +m g`, so `<T>` decreases with unit
/// slope along the evolution.
pub struct FallingParticle {
    pub m: f64,
    pub g: f64,
    pub hbar: f64,
    pub axis: Axis,
    dft: GridDft,
}

/// Drift of `<T>` under the evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeDrift {
    pub slope: f64,
    /// `|slope| - 1`.
    pub defect: f64,
}

impl std::fmt::Debug for FallingParticle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FallingParticle")
            .field("m", &self.m)
            .field("g", &self.g)
            .field("hbar", &self.hbar)
            .field("axis", &self.axis)
            .finish()
    }
}

impl FallingParticle {
    pub fn new(m: f64, g: f64, axis: Axis, hbar: f64) -> Result<Self> {
        if !(m > 0.0 && g > 0.0 && hbar > 0.0) {
            return Err(TempusError::Parameter(
                "m, g and hbar must be positive".into(),
            ));
        }
        if axis.kind != AxisKind::Momentum {
            return Err(TempusError::Domain(
                "falling particle needs a momentum axis".into(),
            ));
        }
        let position = axis.conjugate(hbar)?;
        let dft = GridDft::new(position, hbar)?;
        if !dft.p_axis.compatible(&axis, 1e-9) {
            return Err(TempusError::Domain(
                "momentum axis must be centred (Axis::centered)".into(),
            ));
        }
        Ok(Self {
            m,
            g,
            hbar,
            axis,
            dft,
        })
    }

    fn mg(&self) -> f64 {
        self.m * self.g
    }

    pub fn time_operator(&self) -> Result<HermitianOperator> {
        let mg = self.mg();
        HermitianOperator::multiplication(self.axis, |p| -p / mg)
    }

    /// `H psi` with `Q` applied in the position representation.
    pub fn apply_hamiltonian(&self, psi: &[C64]) -> Vec<C64> {
        let mut x = self.dft.inverse(psi);
        for (i, z) in x.iter_mut().enumerate() {
            *z *= self.dft.x_axis.value(i);
        }
        let q = self.dft.forward(&x);
        psi.iter()
            .zip(q)
            .enumerate()
            .map(|(i, (z, qz))| z * (self.axis.value(i).powi(2) / (2.0 * self.m)) - qz * self.mg())
            .collect()
    }

    /// Dense `H` on the grid (column `j` is `H e_j`).
    pub fn hamiltonian(&self) -> Result<HermitianOperator> {
        let n = self.axis.count;
        let cols = crate::par::map_range(n, |j| {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[j] = C64::new(1.0, 0.0);
            self.apply_hamiltonian(&e)
        });
        let mut m = DMatrix::from_fn(n, n, |r, c| cols[c][r]);
        m = (&m + m.adjoint()).scale(0.5);
        HermitianOperator::dense(self.axis, m)
    }

    fn check_state(&self, psi: &GridState) -> Result<()> {
        if !psi.axis.compatible(&self.axis, 1e-9) {
            return Err(TempusError::Domain(
                "state is not on the particle's momentum grid".into(),
            ));
        }
        let w = psi.boundary_weight(BOUNDARY_CELLS);
        if w > BOUNDARY_TOLERANCE {
            return Err(TempusError::Boundary(format!(
                "state has boundary weight {w:.3e}"
            )));
        }
        Ok(())
    }

    /// Exact evolution `exp(-i t H / hbar)`:
    /// `psi(p - m g t) exp(-i (p^3 - (p - m g t)^3) / (6 m^2 g hbar))`,
    /// with the shifted amplitude taken from the band-limited interpolant.
    pub fn propagate(&self, psi: &GridState, t: f64) -> Result<GridState> {
        self.check_state(psi)?;
        if t == 0.0 {
            return Ok(psi.clone());
        }
        let out = self.propagate_raw(&TrigInterpolant::new(psi)?, t);
        let s = GridState::new(self.axis, out, self.hbar)?;
        self.check_state(&s)?;
        Ok(s)
    }

    fn propagate_raw(&self, interp: &TrigInterpolant, t: f64) -> Vec<C64> {
        let d = self.mg() * t;
        let k = 6.0 * self.m * self.m * self.g * self.hbar;
        (0..self.axis.count)
            .map(|i| {
                let p = self.axis.value(i);
                let cube = 3.0 * p * p * d - 3.0 * p * d * d + d * d * d;
                interp.amplitude(p - d) * C64::from_polar(1.0, -cube / k)
            })
            .collect()
    }

    /// Strang split-step evolution, used as an independent check of
    /// [`FallingParticle::propagate`]; agrees with it up to a global phase.
    pub fn propagate_split_step(&self, psi: &GridState, t: f64, steps: usize) -> Result<GridState> {
        self.check_state(psi)?;
        let steps = steps.max(1);
        let tau = t / steps as f64;
        let half: Vec<C64> = self
            .dft
            .x_axis
            .values()
            .iter()
            .map(|x| C64::from_polar(1.0, tau * self.mg() * x / (2.0 * self.hbar)))
            .collect();
        let kin: Vec<C64> = self
            .axis
            .values()
            .iter()
            .map(|p| C64::from_polar(1.0, -tau * p * p / (2.0 * self.m * self.hbar)))
            .collect();
        let mut v = psi.amplitudes.clone();
        for _ in 0..steps {
            let mut x = self.dft.inverse(&v);
            x.iter_mut().zip(&half).for_each(|(z, f)| *z *= f);
            v = self.dft.forward(&x);
            v.iter_mut().zip(&kin).for_each(|(z, f)| *z *= f);
            let mut x = self.dft.inverse(&v);
            x.iter_mut().zip(&half).for_each(|(z, f)| *z *= f);
            v = self.dft.forward(&x);
        }
        GridState::new(self.axis, v, self.hbar)
    }

    /// `exp(i h T / hbar) psi`.
    pub fn energy_shift(&self, psi: &[C64], h: f64) -> Vec<C64> {
        let mg = self.mg();
        psi.iter()
            .enumerate()
            .map(|(i, z)| z * C64::from_polar(1.0, -h * self.axis.value(i) / (mg * self.hbar)))
            .collect()
    }

    /// Largest `||e^{itH} e^{ihT} psi - e^{-ith} e^{ihT} e^{itH} psi||` over the
    /// lattice `ts x hs` (all exponents divided by `hbar`).
    pub fn weyl_defect(&self, psi: &GridState, ts: &[f64], hs: &[f64]) -> Result<f64> {
        self.check_state(psi)?;
        let psi = psi.normalized()?;
        let mut worst: f64 = 0.0;
        for &t in ts {
            let evolved = self.propagate(&psi, -t)?;
            for &h in hs {
                let kicked =
                    GridState::new(self.axis, self.energy_shift(&psi.amplitudes, h), self.hbar)?;
                let lhs = self.propagate(&kicked, -t)?;
                let phase = C64::from_polar(1.0, -t * h / self.hbar);
                let rhs = self.energy_shift(&evolved.amplitudes, h);
                let d: f64 = lhs
                    .amplitudes
                    .iter()
                    .zip(&rhs)
                    .map(|(a, b)| (a - b * phase).norm_sqr())
                    .sum::<f64>()
                    * self.axis.step;
                worst = worst.max(d.sqrt());
            }
        }
        Ok(worst)
    }

    /// Least-squares slope of `<T>(t)` along the evolution.
    pub fn time_drift(&self, psi: &GridState, times: &[f64]) -> Result<TimeDrift> {
        let mg = self.mg();
        let mut means = Vec::with_capacity(times.len());
        for &t in times {
            let s = self.propagate(psi, t)?.normalized()?;
            let d = s.density();
            means.push(
                d.iter()
                    .enumerate()
                    .map(|(i, w)| -w * self.axis.value(i) / mg)
                    .sum::<f64>()
                    * self.axis.step,
            );
        }
        let n = times.len() as f64;
        let mt = times.iter().sum::<f64>() / n;
        let mm = means.iter().sum::<f64>() / n;
        let sxy: f64 = times
            .iter()
            .zip(&means)
            .map(|(t, v)| (t - mt) * (v - mm))
            .sum();
        let sxx: f64 = times.iter().map(|t| (t - mt).powi(2)).sum();
        let slope = sxy / sxx;
        Ok(TimeDrift {
            slope,
            defect: (slope.abs() - 1.0).abs(),
        })
    }

    /// Width of one momentum cell in time units.
    pub fn cell_time(&self) -> f64 {
        self.axis.step / self.mg()
    }

    /// Contiguous time bins of `cells` momentum cells each, covering the grid.
    pub fn uniform_bins(&self, cells: usize) -> Vec<(f64, f64)> {
        let cells = cells.max(1);
        let w = cells as f64 * self.cell_time();
        let t0 = -(self.axis.end() + 0.5 * self.axis.step) / self.mg();
        let nb = self.axis.count.div_ceil(cells);
        (0..nb)
            .map(|k| (t0 + k as f64 * w, t0 + (k + 1) as f64 * w))
            .collect()
    }

    /// Spectral measure of `T`: `E^T(Z) = E^P(-m g Z)`, one projection per
    /// time bin `[a, b)`.
    pub fn povm(&self, bins: &[(f64, f64)]) -> Result<Povm> {
        super::check_bins(bins)?;
        let mg = self.mg();
        let ts: Vec<f64> = self.axis.values().iter().map(|p| -p / mg).collect();
        let effects: Vec<Effect> = bins
            .iter()
            .map(|&(a, b)| {
                Effect::Diagonal(
                    ts.iter()
                        .map(|t| if *t >= a && *t < b { 1.0 } else { 0.0 })
                        .collect(),
                )
            })
            .collect();
        let covered = ts
            .iter()
            .all(|t| bins.iter().any(|&(a, b)| *t >= a && *t < b));
        let domain = (bins[0].0, bins[bins.len() - 1].1);
        let first = Effect::Diagonal(ts.clone());
        let second = Effect::Diagonal(ts.iter().map(|t| t * t).collect());
        Ok(
            Povm::new(self.axis, bins.to_vec(), effects, domain, covered)?
                .with_line_like()
                .with_moments(first, second),
        )
    }

    /// Covariance of a diagonal family under the exact evolution, which
    /// moves momentum by `m g t`. Shifts must be whole numbers of momentum
    /// cells for an exact comparison; entries whose source falls off the
    /// grid are skipped.
    pub fn covariance(&self, povm: &Povm, shifts: &[f64]) -> Result<CovarianceReport> {
        let n = self.axis.count;
        let nb = povm.len();
        let width = povm.bins[0].1 - povm.bins[0].0;
        let mut report = CovarianceReport {
            max_defect: 0.0,
            interpolated: false,
            compared: 0,
        };
        let diag = |e: &Effect| match e {
            Effect::Diagonal(d) => Ok(d.clone()),
            Effect::Dense(_) => Err(TempusError::Domain("expected a diagonal family".into())),
        };
        let eff: Vec<Vec<f64>> = povm.effects.iter().map(diag).collect::<Result<_>>()?;
        for &t in shifts {
            let cells = t / self.cell_time();
            let bins = t / width;
            if (cells - cells.round()).abs() > 1e-9 || (bins - bins.round()).abs() > 1e-9 {
                report.interpolated = true;
                continue;
            }
            let (c, s) = (cells.round() as i64, bins.round() as i64);
            for i in 0..nb {
                let j = i as i64 - s;
                if !(0..nb as i64).contains(&j) {
                    continue;
                }
                let mut d: f64 = 0.0;
                for k in 0..n as i64 {
                    let src = k - c;
                    if (0..n as i64).contains(&src) {
                        d = d.max((eff[i][src as usize] - eff[j as usize][k as usize]).abs());
                    }
                }
                report.max_defect = report.max_defect.max(d);
                report.compared += 1;
            }
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timepovm::time_statistics;

    fn particle(n: usize, dp: f64) -> FallingParticle {
        let ax = Axis::centered(AxisKind::Momentum, dp, n).unwrap();
        FallingParticle::new(1.0, 2.0, ax, 1.0).unwrap()
    }

    fn packet(fp: &FallingParticle, p0: f64, sigma: f64) -> GridState {
        GridState::gaussian(fp.axis, 1.0, p0, sigma * std::f64::consts::SQRT_2, 0.0).unwrap()
    }

    #[test]
    fn exact_and_split_step_agree() {
        let fp = particle(256, 0.05);
        let psi = packet(&fp, -1.0, 0.4);
        let a = fp.propagate(&psi, 0.7).unwrap();
        let b = fp.propagate_split_step(&psi, 0.7, 50).unwrap();
        let ov = a.inner(&b).unwrap();
        assert!((ov.norm() - 1.0).abs() < 1e-9, "{}", ov.norm());
        // d<P>/dt = +mg
        let mean = |s: &GridState| {
            s.density()
                .iter()
                .enumerate()
                .map(|(i, w)| w * s.axis.value(i))
                .sum::<f64>()
                * s.axis.step
        };
        assert!((mean(&a) - mean(&psi) - 2.0 * 0.7).abs() < 1e-9);
    }

    #[test]
    fn weyl_relation() {
        let fp = particle(256, 0.05);
        let psi = packet(&fp, 0.0, 0.5);
        assert_eq!(fp.weyl_defect(&psi, &[0.0], &[0.3, -0.2]).unwrap(), 0.0);
        assert_eq!(fp.weyl_defect(&psi, &[0.4], &[0.0]).unwrap(), 0.0);
        let d = fp
            .weyl_defect(&psi, &[-0.3, 0.2, 0.5], &[-0.4, 0.1, 0.3])
            .unwrap();
        assert!(d < 1e-6, "{d}");
    }

    #[test]
    fn time_decreases_with_unit_slope() {
        let fp = particle(256, 0.05);
        let psi = packet(&fp, 1.0, 0.4);
        let dr = fp.time_drift(&psi, &[0.0, 0.2, 0.4, 0.6]).unwrap();
        assert!((dr.slope + 1.0).abs() < 1e-9);
    }

    #[test]
    fn boundary_weight_is_rejected() {
        let fp = particle(64, 0.05);
        let psi = packet(&fp, 1.4, 0.3);
        assert!(matches!(
            fp.propagate(&psi, 0.1),
            Err(TempusError::Boundary(_))
        ));
    }

    #[test]
    fn povm_is_covariant_projection_family() {
        let fp = particle(128, 0.05);
        let povm = fp.povm(&fp.uniform_bins(4)).unwrap();
        let ax = povm.axioms();
        assert!(ax.min_eigenvalue >= 0.0 && ax.normalization_defect == 0.0);
        let w = 4.0 * fp.cell_time();
        let r = fp.covariance(&povm, &[w, 2.0 * w, -3.0 * w]).unwrap();
        assert!(r.max_defect <= 1e-8 && r.compared > 0 && !r.interpolated);
    }

    #[test]
    fn gaussian_uncertainty_product() {
        let fp = particle(128, 0.1);
        let (p0, s) = (0.5, 0.6);
        let psi = packet(&fp, p0, s);
        let povm = fp.povm(&fp.uniform_bins(1)).unwrap();
        let st = time_statistics(&povm, &psi, &fp.hamiltonian().unwrap()).unwrap();
        assert!(st.uncertainty.asserted && st.uncertainty.pass);
        // closed forms for a real Gaussian in momentum space
        let m = 1.0;
        let mg = 2.0;
        let var_h =
            (4.0 * p0 * p0 * s * s + 2.0 * s.powi(4)) / (4.0 * m * m) + mg * mg / (4.0 * s * s);
        assert!(
            (st.delta_h - var_h.sqrt()).abs() < 1e-8,
            "{} {}",
            st.delta_h,
            var_h.sqrt()
        );
        assert!((st.delta_t - s / mg).abs() < 1e-10);
        assert!(st.operator.commutator_defect < 1e-8);
    }
}
