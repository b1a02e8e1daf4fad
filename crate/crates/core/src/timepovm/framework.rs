use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{Effect, Povm};
use crate::hilbert::{moments, GridState, HermitianOperator};
use crate::quad::GaussLegendre;
use crate::report::BoundReport;
use crate::{Result, TempusError};

/// Detection probabilities below this are treated as zero.
pub const DETECTION_FLOOR: f64 = 1e-12;

/// Largest `|defect|` of `U_t F(Z) U_t^-1 = F(Z - t)` over bins and shifts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovarianceReport {
    pub max_defect: f64,
    /// Some shift was not a whole number of bins; the shifted effect was
    /// interpolated between neighbours and the defect is only indicative.
    pub interpolated: bool,
    /// Number of (bin, shift) pairs compared.
    pub compared: usize,
}

fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    let h = (m + m.adjoint()).scale(0.5);
    h.symmetric_eigenvalues()
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
}

/// Covariance check with `U_t = exp(-i t H / hbar)`.
///
/// Bins must be uniform. The shifted effect `F(Z - t)` is found by moving
/// `t / width` bins, circularly for periodic families; pairs that fall
/// off a finite domain are skipped.
pub fn check_covariance(
    povm: &Povm,
    h: &HermitianOperator,
    hbar: f64,
    shifts: &[f64],
) -> Result<CovarianceReport> {
    if !h.basis().compatible(&povm.basis, 1e-9) {
        return Err(TempusError::Domain(
            "operator and POVM on different bases".into(),
        ));
    }
    check_covariance_with(povm, shifts, |t| h.unitary(t, hbar))
}

/// [`check_covariance`] with a caller-supplied propagator `t -> U_t`.
pub fn check_covariance_with<U>(
    povm: &Povm,
    shifts: &[f64],
    propagator: U,
) -> Result<CovarianceReport>
where
    U: Fn(f64) -> DMatrix<C64>,
{
    let n = povm.len();
    let (a0, b0) = povm.bins[0];
    let width = b0 - a0;
    if !width.is_finite() {
        return Err(TempusError::Partition(
            "covariance check needs finite bins".into(),
        ));
    }
    for (i, (a, b)) in povm.bins.iter().enumerate() {
        let expect = a0 + i as f64 * width;
        if (a - expect).abs() > 1e-9 * width || (b - a - width).abs() > 1e-9 * width {
            return Err(TempusError::Partition(
                "covariance check needs uniform contiguous bins".into(),
            ));
        }
    }
    let dense: Vec<DMatrix<C64>> = povm.effects.iter().map(|e| e.to_dense()).collect();
    let mut report = CovarianceReport {
        max_defect: 0.0,
        interpolated: false,
        compared: 0,
    };
    for &t in shifts {
        let u = propagator(t);
        let s = t / width;
        let k0 = s.floor();
        let theta = s - k0;
        let exact = theta.abs() < 1e-9 || (1.0 - theta).abs() < 1e-9;
        let (k0, theta) = if exact { (s.round(), 0.0) } else { (k0, theta) };
        report.interpolated |= !exact;
        let index = |j: i64| -> Option<usize> {
            if povm.periodic {
                Some(j.rem_euclid(n as i64) as usize)
            } else if (0..n as i64).contains(&j) {
                Some(j as usize)
            } else {
                None
            }
        };
        let defects: Vec<Option<f64>> = crate::par::map_range(n, |i| {
            let j0 = index(i as i64 - k0 as i64)?;
            let target = if theta == 0.0 {
                dense[j0].clone()
            } else {
                let j1 = index(i as i64 - k0 as i64 - 1)?;
                &dense[j0] * C64::new(1.0 - theta, 0.0) + &dense[j1] * C64::new(theta, 0.0)
            };
            let moved = &u * &dense[i] * u.adjoint();
            Some(spectral_norm(&(moved - target)))
        });
        for d in defects.into_iter().flatten() {
            report.max_defect = report.max_defect.max(d);
            report.compared += 1;
        }
    }
    Ok(report)
}

/// First-moment operator and temporal spread for one state.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeOperatorReport {
    /// `T = ∫ t F(dt)`.
    pub first_moment: Effect,
    /// `tr[rho T] / tr[rho F(Z0)]`.
    pub mean: f64,
    pub variance: f64,
    pub detection_probability: f64,
    /// `|<psi|[H, T]|psi> - i hbar|` for the normalised state.
    pub commutator_defect: f64,
    /// Filled in by the caller from a covariance check, when one was run.
    pub covariance_defect: Option<f64>,
}

/// Time statistics and the `Delta T Delta H >= hbar/2` report.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeStatistics {
    pub operator: TimeOperatorReport,
    pub delta_t: f64,
    pub delta_h: f64,
    /// Tag `pov-ur`; asserted only for line-like families.
    pub uncertainty: BoundReport,
}

fn apply_effect(e: &Effect, psi: &[C64]) -> Vec<C64> {
    match e {
        Effect::Diagonal(d) => psi.iter().zip(d).map(|(z, x)| z * x).collect(),
        Effect::Dense(m) => (m * DVector::from_column_slice(psi))
            .iter()
            .cloned()
            .collect(),
    }
}

/// Mean and variance of the event time in `state`, with the variance
/// normalised by the detection probability `tr[rho F(Z0)]`.
pub fn time_statistics(
    povm: &Povm,
    state: &GridState,
    h: &HermitianOperator,
) -> Result<TimeStatistics> {
    if !povm.basis.compatible(&state.axis, 1e-9) || !h.basis().compatible(&state.axis, 1e-9) {
        return Err(TempusError::Domain(
            "state, POVM and Hamiltonian must share a basis".into(),
        ));
    }
    let psi = state.normalized()?;
    let step = psi.axis.step;
    let total = povm.total();
    let p0 = total.expectation(&psi.amplitudes, step);
    if !(p0 > DETECTION_FLOOR) {
        return Err(TempusError::Conditioning(format!(
            "detection probability {p0:.3e} is zero"
        )));
    }
    let first = povm.first_moment()?;
    let m1 = first.expectation(&psi.amplitudes, step);
    let mean = m1 / p0;
    let variance = match &povm.moments {
        Some(m) => (m.1.expectation(&psi.amplitudes, step) / p0 - mean * mean).max(0.0),
        None => {
            let probs = povm.distribution(&psi)?;
            let mut v = 0.0;
            for ((a, b), p) in povm.bins.iter().zip(&probs) {
                if *p <= DETECTION_FLOOR * 1e-2 {
                    continue;
                }
                if !(a.is_finite() && b.is_finite()) {
                    return Err(TempusError::Moment("weight in an infinite bin".into()));
                }
                v += p * (0.5 * (a + b) - mean).powi(2);
            }
            v / p0
        }
    };
    let hbar = psi.hbar;
    let hpsi = h.apply(&psi)?;
    let tpsi = apply_effect(&first, &psi.amplitudes);
    let cross: C64 = hpsi
        .amplitudes
        .iter()
        .zip(&tpsi)
        .map(|(a, b)| a.conj() * b)
        .sum::<C64>()
        * step;
    // <[H,T]> = <H psi|T psi> - <T psi|H psi>
    let comm = C64::new(0.0, 2.0 * cross.im);
    let commutator_defect = (comm - C64::new(0.0, hbar)).norm();
    let (_, var_h) = moments(h, &psi)?;
    let delta_t = variance.sqrt();
    let delta_h = var_h.max(0.0).sqrt();
    let mut uncertainty = BoundReport::new("pov-ur", delta_t * delta_h, 0.5 * hbar, 1e-9 * hbar);
    if !povm.line_like {
        uncertainty = uncertainty.informational();
    }
    Ok(TimeStatistics {
        operator: TimeOperatorReport {
            first_moment: first,
            mean,
            variance,
            detection_probability: p0,
            commutator_defect,
            covariance_defect: None,
        },
        delta_t,
        delta_h,
        uncertainty,
    })
}

/// `[H, T]` on a finite space has zero trace, so it cannot equal `i hbar I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteDimensionCheck {
    pub dim: usize,
    pub trace_re: f64,
    pub trace_im: f64,
    /// `||[H,T] - i hbar I||_F / sqrt(dim)`.
    pub full_defect: f64,
    /// Lower bound `hbar` on `full_defect` implied by the zero trace.
    pub floor: f64,
}

impl FiniteDimensionCheck {
    pub fn holds(&self) -> bool {
        self.full_defect >= self.floor * (1.0 - 1e-12)
    }
}

pub fn finite_dimension_check(
    h: &DMatrix<C64>,
    t: &DMatrix<C64>,
    hbar: f64,
) -> FiniteDimensionCheck {
    let d = h.nrows();
    let c = h * t - t * h;
    let tr = c.trace();
    let mut dev = c;
    for i in 0..d {
        dev[(i, i)] -= C64::new(0.0, hbar);
    }
    FiniteDimensionCheck {
        dim: d,
        trace_re: tr.re,
        trace_im: tr.im,
        full_defect: dev.norm() / (d as f64).sqrt(),
        floor: hbar,
    }
}

/// `B(J) = ∫_J e^{itH/hbar} A e^{-itH/hbar} dt` by Gauss–Legendre.
#[derive(Debug, Clone, PartialEq)]
pub struct BfOperator {
    pub operator: DMatrix<C64>,
    pub min_eigenvalue: f64,
    /// Largest eigenvalue of the effect `A`.
    pub effect_norm: f64,
}

pub fn bf_povm_from_effect(
    a: &DMatrix<C64>,
    h: &HermitianOperator,
    hbar: f64,
    j: (f64, f64),
) -> Result<BfOperator> {
    let n = a.nrows();
    if a.ncols() != n || h.dim() != n {
        return Err(TempusError::Validation(
            "effect and Hamiltonian dimensions differ".into(),
        ));
    }
    if !(j.1 >= j.0) || !j.0.is_finite() || !j.1.is_finite() {
        return Err(TempusError::Parameter(format!(
            "interval [{}, {}] must be finite",
            j.0, j.1
        )));
    }
    let herm = (a + a.adjoint()).scale(0.5);
    if (a - &herm).norm() > 1e-12 * a.norm().max(1.0) {
        return Err(TempusError::Validation("effect is not Hermitian".into()));
    }
    let eig = herm.symmetric_eigenvalues();
    let lo = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let effect_norm = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lo < -1e-10 * effect_norm.abs().max(1.0) {
        return Err(TempusError::Validation(format!(
            "effect is not positive (eigenvalue {lo:.3e})"
        )));
    }
    let mut b = DMatrix::<C64>::zeros(n, n);
    if j.1 > j.0 {
        let (vals, vecs) = h.eigen();
        let radius = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let panels = ((j.1 - j.0) * radius / hbar).ceil().max(1.0) as usize;
        let a_eig = vecs.adjoint() * a * &vecs;
        let pts = GaussLegendre::new(16).composite_points(j.0, j.1, panels);
        let parts = crate::par::map(&pts, |&(t, w)| {
            DMatrix::from_fn(n, n, |r, c| {
                a_eig[(r, c)] * C64::from_polar(w, t * (vals[r] - vals[c]) / hbar)
            })
        });
        for p in parts {
            b += p;
        }
        b = &vecs * b * vecs.adjoint();
    }
    let min_eigenvalue = ((&b + b.adjoint()).scale(0.5))
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    Ok(BfOperator {
        operator: b,
        min_eigenvalue,
        effect_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::Axis;

    fn uniform_family(dim: usize, bins: usize, len: f64) -> Povm {
        let ax = Axis::fock(dim).unwrap();
        let w = len / bins as f64;
        let b: Vec<(f64, f64)> = (0..bins)
            .map(|k| (k as f64 * w, (k + 1) as f64 * w))
            .collect();
        let e = vec![Effect::Diagonal(vec![1.0 / bins as f64; dim]); bins];
        Povm::new(ax, b, e, (0.0, len), true).unwrap()
    }

    #[test]
    fn uniform_family_is_covariant() {
        let p = uniform_family(4, 8, 2.0).with_periodic();
        let h = HermitianOperator::diagonal(p.basis, vec![0.0, 1.0, 2.5, 4.0]).unwrap();
        let r = check_covariance(&p, &h, 1.0, &[0.25, 0.5, 0.6]).unwrap();
        assert!(r.max_defect < 1e-12);
        assert!(r.interpolated);
    }

    #[test]
    fn uniform_density_variance() {
        let p = uniform_family(3, 400, 6.0);
        let h = HermitianOperator::diagonal(p.basis, vec![0.0, 1.0, 2.0]).unwrap();
        let s = GridState::basis(p.basis, 1.0, 1).unwrap();
        let st = time_statistics(&p, &s, &h).unwrap();
        assert!((st.operator.mean - 3.0).abs() < 1e-12);
        // midpoint rule on a uniform density: |Z0|^2/12 minus w^2/12
        let w = 6.0 / 400.0;
        assert!((st.operator.variance - (36.0 - w * w) / 12.0).abs() < 1e-10);
        assert!(!st.uncertainty.asserted);
    }

    #[test]
    fn zero_detection_is_conditioning_error() {
        let ax = Axis::fock(2).unwrap();
        let p = Povm::new(
            ax,
            vec![(0.0, 1.0)],
            vec![Effect::Diagonal(vec![1.0, 0.0])],
            (0.0, 1.0),
            false,
        )
        .unwrap();
        let h = HermitianOperator::diagonal(ax, vec![0.0, 1.0]).unwrap();
        let s = GridState::basis(ax, 1.0, 1).unwrap();
        assert!(matches!(
            time_statistics(&p, &s, &h),
            Err(TempusError::Conditioning(_))
        ));
    }

    #[test]
    fn relabelled_bins_give_same_statistics() {
        let ax = Axis::fock(2).unwrap();
        let bins = vec![(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)];
        let eff = vec![
            Effect::Diagonal(vec![0.2, 0.5]),
            Effect::Diagonal(vec![0.3, 0.1]),
            Effect::Diagonal(vec![0.5, 0.4]),
        ];
        let a = Povm::new(ax, bins.clone(), eff.clone(), (0.0, 3.0), true).unwrap();
        let order = [2, 0, 1];
        let b = Povm::from_unsorted(
            ax,
            order.iter().map(|&i| bins[i]).collect(),
            order.iter().map(|&i| eff[i].clone()).collect(),
            (0.0, 3.0),
            true,
        )
        .unwrap();
        let h = HermitianOperator::diagonal(ax, vec![0.0, 1.0]).unwrap();
        let s = GridState::new(ax, vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)], 1.0).unwrap();
        let (x, y) = (
            time_statistics(&a, &s, &h).unwrap(),
            time_statistics(&b, &s, &h).unwrap(),
        );
        assert_eq!(x.operator.mean, y.operator.mean);
        assert_eq!(x.operator.variance, y.operator.variance);
    }

    #[test]
    fn bf_trivial_cases() {
        let ax = Axis::fock(3).unwrap();
        let h = HermitianOperator::diagonal(ax, vec![0.0, 1.0, 3.0]).unwrap();
        let id = DMatrix::<C64>::identity(3, 3);
        let z = bf_povm_from_effect(&id, &h, 1.0, (1.0, 1.0)).unwrap();
        assert_eq!(z.operator.norm(), 0.0);
        let b = bf_povm_from_effect(&id, &h, 1.0, (0.0, 2.5)).unwrap();
        assert!((b.operator - id * C64::new(2.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn trace_obstruction() {
        let mut r = crate::sampling::rng(3);
        let h = crate::sampling::random_hermitian(&mut r, 5)
            .unwrap()
            .to_dense();
        let t = crate::sampling::random_hermitian(&mut r, 5)
            .unwrap()
            .to_dense();
        let c = finite_dimension_check(&h, &t, 1.0);
        assert!(c.trace_re.abs() < 1e-12 && c.trace_im.abs() < 1e-12);
        assert!(c.holds());
    }
}
