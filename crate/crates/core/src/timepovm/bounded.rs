use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{bf_povm_from_effect, time_statistics, Effect, Povm};
use crate::hilbert::{Axis, AxisKind, GridState, HermitianOperator};
use crate::report::BoundReport;
use crate::sampling::{complex_normal, rng};
use crate::{Result, TempusError, C64};

/// Largest tolerated `|P(window) - I|` before the window counts as too short.
pub const WINDOW_TOLERANCE: f64 = 1e-3;

/// `H = h` on `[0, 2pi]`, sampled at `h_j = (j + 1/2) dh`, `dh = 2pi/n`, with
/// `hbar = 1`. The time POVM is `P(X) = ∫_X |phi_t><phi_t| dt`,
/// `phi_t(h) = e^{iht}/sqrt(2pi)`; on the grid it is periodic in `t` with
/// period `n`.
#[derive(Debug, Clone)]
pub struct BoundedSpectrum {
    pub n: usize,
    pub step: f64,
    pub basis: Axis,
    pub hamiltonian: HermitianOperator,
    /// Time window the POVM is assembled on.
    pub window: (f64, f64),
}

/// `∫_a^b t^k e^{i d t} dt` for `k = 0, 1, 2`.
fn moment_integral(k: usize, d: f64, a: f64, b: f64) -> C64 {
    if d == 0.0 {
        let p = (k + 1) as i32;
        return C64::new((b.powi(p) - a.powi(p)) / p as f64, 0.0);
    }
    let i = C64::new(0.0, 1.0);
    let antiderivative = |t: f64| -> C64 {
        let e = C64::from_polar(1.0, d * t);
        match k {
            0 => e / (i * d),
            1 => e * (t / (i * d) + 1.0 / (d * d)),
            _ => e * (t * t / (i * d) + 2.0 * t / (d * d) - 2.0 / (i * d * d * d)),
        }
    };
    antiderivative(b) - antiderivative(a)
}

impl BoundedSpectrum {
    /// Grid of `n` energies; the window defaults to the period
    /// `[-n/2 - 1/2, n/2 - 1/2)`, whose unit bins are centred on the integers.
    pub fn new(n: usize) -> Result<Self> {
        if n < 16 {
            return Err(TempusError::Parameter(format!(
                "need at least 16 energy points, got {n}"
            )));
        }
        let step = 2.0 * PI / n as f64;
        let basis = Axis::new(AxisKind::Energy, 0.5 * step, step, n)?;
        let hamiltonian = HermitianOperator::multiplication(basis, |h| h)?;
        let half = n as f64 / 2.0;
        Ok(Self {
            n,
            step,
            basis,
            hamiltonian,
            window: (-half - 0.5, half - 0.5),
        })
    }

    pub fn with_window(mut self, a: f64, b: f64) -> Result<Self> {
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(TempusError::Parameter(format!("bad window [{a}, {b}]")));
        }
        self.window = (a, b);
        Ok(self)
    }

    fn energy(&self, j: usize) -> f64 {
        self.basis.value(j)
    }

    fn kernel(&self, k: usize, a: f64, b: f64) -> DMatrix<C64> {
        let c = self.step / (2.0 * PI);
        DMatrix::from_fn(self.n, self.n, |r, s| {
            moment_integral(k, self.energy(r) - self.energy(s), a, b) * c
        })
    }

    /// `P([a, b])`.
    pub fn effect(&self, a: f64, b: f64) -> DMatrix<C64> {
        self.kernel(0, a, b)
    }

    /// `∫_window t P(dt)`.
    pub fn first_moment(&self) -> DMatrix<C64> {
        self.kernel(1, self.window.0, self.window.1)
    }

    /// `∫_window t^2 P(dt)`.
    pub fn second_moment(&self) -> DMatrix<C64> {
        self.kernel(2, self.window.0, self.window.1)
    }

    /// Largest entry of `P(window) - I`. Plancherel makes it vanish once the
    /// window covers a whole period.
    pub fn normalization_defect(&self) -> f64 {
        let d =
            self.effect(self.window.0, self.window.1) - DMatrix::<C64>::identity(self.n, self.n);
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `bins` equal bins over the window.
    pub fn povm(&self, bins: usize) -> Result<Povm> {
        let defect = self.normalization_defect();
        if defect > WINDOW_TOLERANCE {
            return Err(TempusError::Window(format!(
                "window [{}, {}] leaves normalization defect {defect:.3e}",
                self.window.0, self.window.1
            )));
        }
        let (a, b) = self.window;
        let w = (b - a) / bins.max(1) as f64;
        let edges: Vec<(f64, f64)> = (0..bins.max(1))
            .map(|k| (a + k as f64 * w, a + (k + 1) as f64 * w))
            .collect();
        let effects = crate::par::map(&edges, |&(x, y)| Effect::Dense(self.effect(x, y)));
        let mut p = Povm::new(self.basis, edges, effects, self.window, true)?.with_moments(
            Effect::Dense(self.first_moment()),
            Effect::Dense(self.second_moment()),
        );
        let period = (b - a) / self.n as f64;
        if (period - period.round()).abs() < 1e-9 && period.round() >= 1.0 {
            p = p.with_periodic().with_line_like();
        }
        Ok(p)
    }

    /// Central-difference `-i d/dh` with `psi(2pi) = c psi(0)`; `c = 0`
    /// gives the Dirichlet operator `T^(0)`.
    pub fn twisted_operator(&self, c: C64) -> DMatrix<C64> {
        let n = self.n;
        let k = C64::new(0.0, -0.5 / self.step);
        let mut t = DMatrix::<C64>::zeros(n, n);
        for j in 0..n - 1 {
            t[(j, j + 1)] = k;
            t[(j + 1, j)] = -k;
        }
        t[(n - 1, 0)] = k * c;
        t[(0, n - 1)] = -k * c.conj();
        t
    }

    /// Grid state `e^{i kappa h} / sqrt(2pi)`.
    pub fn plane_wave(&self, kappa: f64) -> Result<GridState> {
        GridState::from_fn(self.basis, 1.0, |h| {
            C64::from_polar(1.0 / (2.0 * PI).sqrt(), kappa * h)
        })
    }

    /// The uniform-energy state `phi_0`.
    pub fn uniform_state(&self) -> Result<GridState> {
        self.plane_wave(0.0)
    }

    /// `A = |phi_0><phi_0|` as a matrix on grid coefficients.
    pub fn bf_effect(&self) -> DMatrix<C64> {
        DMatrix::from_element(self.n, self.n, C64::new(self.step / (2.0 * PI), 0.0))
    }

    /// `|| (e^{iH tau} T e^{-iH tau} - T + tau) psi ||` for a normalised `psi`.
    pub fn covariance_defect(&self, t: &DMatrix<C64>, psi: &GridState, tau: f64) -> Result<f64> {
        let psi = psi.normalized()?;
        let v = DVector::from_iterator(
            self.n,
            psi.amplitudes.iter().map(|z| z * psi.axis.step.sqrt()),
        );
        let moved = DMatrix::from_fn(self.n, self.n, |r, s| {
            t[(r, s)] * C64::from_polar(1.0, tau * (self.energy(r) - self.energy(s)))
        });
        let d = (moved - t) * &v + &v * C64::new(tau, 0.0);
        Ok(d.norm())
    }

    /// Smooth state vanishing to machine precision at both ends of the
    /// spectrum: a Gaussian of width `width` at `centre`, translated in time
    /// by `t0`.
    pub fn interior_state(&self, centre: f64, width: f64, t0: f64) -> Result<GridState> {
        GridState::from_fn(self.basis, 1.0, |h| {
            let x = (h - centre) / width;
            C64::from_polar((-0.5 * x * x).exp(), -h * t0)
        })?
        .normalized()
    }
}

/// Spectrum of `T^(c)` against `m + arg(c)/2pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumReport {
    /// Modes `|kappa| <= this` were compared.
    pub max_kappa: f64,
    /// Largest distance from `kappa` to the nearest eigenvalue.
    pub max_defect: f64,
    /// `kappa^3 dh^2 / 6` at the largest compared mode.
    pub bound: f64,
    /// Largest `|| T v - (sin(kappa dh)/dh) v ||` over the plane waves.
    pub eigenvector_residual: f64,
    pub pass: bool,
}

/// Covariance `e^{iH tau} T e^{-iH tau} = T - tau` on test vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftReport {
    pub tau: f64,
    /// `T^(0)` on a smooth interior state.
    pub dirichlet_defect: f64,
    /// Leading-order estimate `dh^2 (tau |psi''| + tau^2 |psi'|) / 2`.
    pub dirichlet_estimate: f64,
    /// `T^(c)` on a plane wave touching both ends; recorded only.
    pub twisted_defect: f64,
    /// `|e^{2 pi i tau} - 1|`.
    pub phase_reference: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundedSpectrumReports {
    pub spectrum: SpectrumReport,
    pub covariance: ShiftReport,
    /// `||B(J) - P(J)||` with `A = |phi_0><phi_0|`.
    pub bf_distance: f64,
    pub bf_interval: (f64, f64),
    /// `min Delta T >= 1/(4 pi)` over the sampled states.
    pub variance: BoundReport,
    pub states_tested: usize,
    /// `min Delta T <H>` over the sampled states.
    pub bf_constant: f64,
    /// Smallest slack of `Delta T Delta H >= 1/2` over the interior states.
    pub interior_uncertainty: BoundReport,
}

impl BoundedSpectrumReports {
    pub fn pass(&self) -> bool {
        self.spectrum.pass
            && self.covariance.pass
            && self.bf_distance <= 1e-6
            && self.variance.pass
            && self.interior_uncertainty.pass
    }
}

/// Modes compared in the `T^(c)` spectrum check, as a fraction of `n`.
const LOW_MODE_FRACTION: f64 = 1.0 / 16.0;
/// Slack on the leading-order estimate of the Dirichlet covariance defect.
const DIRICHLET_SLACK: f64 = 1.25;

fn spectrum_report(bs: &BoundedSpectrum, t: &DMatrix<C64>, c: C64) -> Result<SpectrumReport> {
    let eig = t.clone().symmetric_eigenvalues();
    let theta = c.arg() / (2.0 * PI);
    let max_kappa = (LOW_MODE_FRACTION * bs.n as f64).floor();
    let mut max_defect = 0.0f64;
    let mut residual = 0.0f64;
    let mut largest = 0.0f64;
    let m_max = max_kappa as i64;
    for m in -m_max..=m_max {
        let kappa = m as f64 + theta;
        if kappa.abs() > max_kappa {
            continue;
        }
        largest = largest.max(kappa.abs());
        let nearest = eig
            .iter()
            .map(|e| (e - kappa).abs())
            .fold(f64::INFINITY, f64::min);
        max_defect = max_defect.max(nearest);
        let v = bs.plane_wave(kappa)?;
        let v = DVector::from_iterator(bs.n, v.amplitudes.iter().map(|z| z * bs.step.sqrt()));
        let lambda = (kappa * bs.step).sin() / bs.step;
        residual = residual.max((t * &v - &v * C64::new(lambda, 0.0)).norm() / v.norm());
    }
    let bound = largest.powi(3) * bs.step * bs.step / 6.0;
    Ok(SpectrumReport {
        max_kappa,
        max_defect,
        bound,
        eigenvector_residual: residual,
        pass: max_defect <= bound * (1.0 + 1e-6) + 1e-10 && residual <= 1e-9,
    })
}

fn random_states(bs: &BoundedSpectrum, count: usize, seed: u64) -> Result<Vec<GridState>> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let amps = (0..bs.n).map(|_| complex_normal(&mut r)).collect();
            GridState::new(bs.basis, amps, 1.0)?.normalized()
        })
        .collect()
}

fn interior_states(bs: &BoundedSpectrum) -> Result<Vec<GridState>> {
    let mut out = Vec::new();
    for (centre, width) in [(PI, 0.4), (PI, 0.25), (2.5, 0.3), (3.8, 0.35)] {
        for t0 in [-3.0, 0.0, 2.0, 7.5] {
            out.push(bs.interior_state(centre, width, t0)?);
        }
    }
    Ok(out)
}

/// Builds the POVM on `bins` bins over one period and the operator `T^(c)`,
/// and runs the four checks: `T^(c)` spectrum, shift covariance, the
/// equality `B(J) = P(J)` for `A = |phi_0><phi_0|`, and the variance floor
/// `Delta T >= 1/(4 pi)` over `random` random states plus smooth interior
/// states.
pub fn bounded_spectrum(
    n: usize,
    c: C64,
    bins: usize,
    random: usize,
    seed: u64,
) -> Result<(BoundedSpectrum, Povm, DMatrix<C64>, BoundedSpectrumReports)> {
    if (c.norm() - 1.0).abs() > 1e-12 {
        return Err(TempusError::Parameter(format!(
            "|c| must be 1, got {}",
            c.norm()
        )));
    }
    let bs = BoundedSpectrum::new(n)?;
    let povm = bs.povm(bins)?;
    let t = bs.twisted_operator(c);
    let spectrum = spectrum_report(&bs, &t, c)?;

    let tau = 0.3;
    let dirichlet = bs.twisted_operator(C64::new(0.0, 0.0));
    let width = 0.4;
    let dirichlet_defect =
        bs.covariance_defect(&dirichlet, &bs.interior_state(PI, width, 0.0)?, tau)?;
    // Gaussian amplitude exp(-x^2/2w^2): |psi'| = 1/(sqrt2 w), |psi''| = sqrt3/(2w^2).
    let dirichlet_estimate = 0.5
        * bs.step
        * bs.step
        * (tau * 3f64.sqrt() / (2.0 * width * width) + tau * tau / (2f64.sqrt() * width));
    let twisted_defect = bs.covariance_defect(&t, &bs.plane_wave(c.arg() / (2.0 * PI))?, tau)?;
    let covariance = ShiftReport {
        tau,
        dirichlet_defect,
        dirichlet_estimate,
        twisted_defect,
        phase_reference: (C64::from_polar(1.0, 2.0 * PI * tau) - 1.0).norm(),
        pass: dirichlet_defect <= DIRICHLET_SLACK * dirichlet_estimate,
    };

    let bf_interval = (-1.5, 2.0);
    let b = bf_povm_from_effect(&bs.bf_effect(), &bs.hamiltonian, 1.0, bf_interval)?;
    let p = bs.effect(bf_interval.0, bf_interval.1);
    let bf_distance = (b.operator - p)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);

    let mut states = random_states(&bs, random, seed)?;
    let interior = interior_states(&bs)?;
    states.extend(interior.iter().cloned());
    let stats = crate::par::map(&states, |s| time_statistics(&povm, s, &bs.hamiltonian));
    let mut min_dt = f64::INFINITY;
    let mut bf_constant = f64::INFINITY;
    let mut worst_interior: Option<BoundReport> = None;
    for (k, s) in stats.into_iter().enumerate() {
        let s = s?;
        min_dt = min_dt.min(s.delta_t);
        let (mean_h, _) = crate::hilbert::moments(&bs.hamiltonian, &states[k])?;
        bf_constant = bf_constant.min(s.delta_t * mean_h);
        if k >= random {
            let r = s.uncertainty.clone();
            if worst_interior.as_ref().is_none_or(|w| r.slack < w.slack) {
                worst_interior = Some(r);
            }
        }
    }
    let variance = BoundReport::new("bs-var", min_dt, 1.0 / (4.0 * PI), 1e-9);
    let reports = BoundedSpectrumReports {
        spectrum,
        covariance,
        bf_distance,
        bf_interval,
        variance,
        states_tested: states.len(),
        bf_constant,
        interior_uncertainty: worst_interior.expect("interior states are non-empty"),
    };
    Ok((bs, povm, t, reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timepovm::check_covariance;

    #[test]
    fn moment_integrals_match_quadrature() {
        let gl = crate::quad::GaussLegendre::new(16);
        for k in 0..3 {
            for d in [0.0, 0.7, -2.3] {
                let re = gl.integrate(-1.3, 2.1, 8, |t| t.powi(k as i32) * (d * t).cos());
                let im = gl.integrate(-1.3, 2.1, 8, |t| t.powi(k as i32) * (d * t).sin());
                assert!((moment_integral(k, d, -1.3, 2.1) - C64::new(re, im)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn period_window_is_normalised_and_short_window_rejected() {
        let bs = BoundedSpectrum::new(32).unwrap();
        assert!(bs.normalization_defect() < 1e-12);
        let p = bs.povm(32).unwrap();
        let ax = p.axioms();
        assert!(ax.min_eigenvalue >= -1e-10 && ax.normalization_defect < 1e-8);
        assert!(p.periodic && p.line_like);
        let short = BoundedSpectrum::new(32)
            .unwrap()
            .with_window(-4.0, 4.0)
            .unwrap();
        assert!(matches!(short.povm(8), Err(TempusError::Window(_))));
    }

    #[test]
    fn povm_is_covariant() {
        let bs = BoundedSpectrum::new(32).unwrap();
        let p = bs.povm(64).unwrap();
        let r = check_covariance(&p, &bs.hamiltonian, 1.0, &[0.5, 1.5, -3.0, 20.0]).unwrap();
        assert!(r.max_defect < 1e-10 && !r.interpolated, "{r:?}");
    }

    #[test]
    fn eigenvector_distribution_peaks_at_its_eigenvalue() {
        let bs = BoundedSpectrum::new(64).unwrap();
        let p = bs.povm(64).unwrap();
        let v = bs.plane_wave(3.0).unwrap();
        let d = p.distribution(&v).unwrap();
        let best = d
            .iter()
            .enumerate()
            .fold(0, |b, (i, x)| if *x > d[b] { i } else { b });
        let (a, b) = p.bins[best];
        assert!(a <= 3.0 && 3.0 < b, "{a} {b}");
        let t = bs.twisted_operator(C64::new(1.0, 0.0));
        let psi = DVector::from_iterator(64, v.amplitudes.iter().map(|z| z * bs.step.sqrt()));
        let lambda = (3.0 * bs.step).sin() / bs.step;
        assert!((&t * &psi - &psi * C64::new(lambda, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn uniform_state_has_zero_mean_time() {
        let bs = BoundedSpectrum::new(64)
            .unwrap()
            .with_window(-32.0, 32.0)
            .unwrap();
        let p = bs.povm(64).unwrap();
        let s = time_statistics(&p, &bs.uniform_state().unwrap(), &bs.hamiltonian).unwrap();
        assert!(s.operator.mean.abs() < 1e-10, "{}", s.operator.mean);
    }

    #[test]
    fn twisted_spectrum_error_is_second_order() {
        let c = C64::from_polar(1.0, 1.1);
        let kappa = 2.0 + 1.1 / (2.0 * PI);
        let err = |n: usize| {
            let bs = BoundedSpectrum::new(n).unwrap();
            let eig = bs.twisted_operator(c).symmetric_eigenvalues();
            eig.iter()
                .map(|e| (e - kappa).abs())
                .fold(f64::INFINITY, f64::min)
        };
        let ratio = err(64) / err(128);
        assert!((ratio - 4.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn dirichlet_covariance_is_second_order() {
        let d = |n: usize| {
            let bs = BoundedSpectrum::new(n).unwrap();
            let t = bs.twisted_operator(C64::new(0.0, 0.0));
            bs.covariance_defect(&t, &bs.interior_state(PI, 0.4, 0.0).unwrap(), 0.3)
                .unwrap()
        };
        let ratio = d(64) / d(128);
        assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
    }

    #[test]
    fn bf_degenerate_cases() {
        let bs = BoundedSpectrum::new(16).unwrap();
        let zero = bf_povm_from_effect(&bs.bf_effect(), &bs.hamiltonian, 1.0, (0.4, 0.4)).unwrap();
        assert_eq!(zero.operator.norm(), 0.0);
        let id = DMatrix::<C64>::identity(16, 16);
        let b = bf_povm_from_effect(&id, &bs.hamiltonian, 1.0, (0.0, 2.5)).unwrap();
        assert!((b.operator - id * C64::new(2.5, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn full_report() {
        let (_, _, _, r) = bounded_spectrum(128, C64::from_polar(1.0, 0.7), 128, 200, 7).unwrap();
        assert!(r.spectrum.pass, "{:?}", r.spectrum);
        assert!(r.covariance.pass, "{:?}", r.covariance);
        assert!(r.covariance.twisted_defect > 10.0 * r.covariance.dirichlet_defect);
        assert!(r.bf_distance <= 1e-6, "{}", r.bf_distance);
        assert!(r.variance.pass, "{:?}", r.variance);
        assert!(r.interior_uncertainty.pass, "{:?}", r.interior_uncertainty);
        assert_eq!(r.states_tested, 216);
        assert!(r.bf_constant > 0.0);
        assert!(r.pass());
    }

    #[test]
    fn rejects_non_unimodular_twist() {
        assert!(matches!(
            bounded_spectrum(32, C64::new(1.1, 0.0), 8, 1, 0),
            Err(TempusError::Parameter(_))
        ));
    }
}
