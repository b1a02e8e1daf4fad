use num_complex::Complex64 as C64;

use super::Axis;
use crate::{Result, TempusError};

/// Complex amplitudes sampled on a uniform grid.
///
/// Inner products and norms are Riemann sums weighted by `axis.step`; on a
/// Fock axis the step is 1 and they reduce to the usual finite sums.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub axis: Axis,
    pub amplitudes: Vec<C64>,
    pub hbar: f64,
}

impl GridState {
    pub fn new(axis: Axis, amplitudes: Vec<C64>, hbar: f64) -> Result<Self> {
        if amplitudes.len() != axis.count {
            return Err(TempusError::Validation(format!(
                "{} amplitudes for an axis of {} points",
                amplitudes.len(),
                axis.count
            )));
        }
        if !(hbar > 0.0) {
            return Err(TempusError::Validation(format!(
                "hbar must be positive, got {hbar}"
            )));
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(TempusError::Validation("non-finite amplitude".into()));
        }
        Ok(Self {
            axis,
            amplitudes,
            hbar,
        })
    }

    pub fn from_fn<F: Fn(f64) -> C64>(axis: Axis, hbar: f64, f: F) -> Result<Self> {
        let amps = (0..axis.count).map(|i| f(axis.value(i))).collect();
        Self::new(axis, amps, hbar)
    }

    /// Normalised Gaussian `exp(-(x-x0)^2 / 2 width^2 + i k x / hbar)`.
    ///
    /// `width` is the amplitude width: `|psi|^2` has standard deviation
    /// `width / sqrt(2)`.
    pub fn gaussian(
        axis: Axis,
        hbar: f64,
        center: f64,
        width: f64,
        wavenumber: f64,
    ) -> Result<Self> {
        let s = Self::from_fn(axis, hbar, |x| {
            let d = x - center;
            C64::from_polar(
                (-d * d / (2.0 * width * width)).exp(),
                wavenumber * x / hbar,
            )
        })?;
        s.normalized()
    }

    /// Basis vector `|n>` on a Fock (or any) axis, with unit Riemann norm.
    pub fn basis(axis: Axis, hbar: f64, n: usize) -> Result<Self> {
        if n >= axis.count {
            return Err(TempusError::Domain(format!("basis index {n} outside axis")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); axis.count];
        amps[n] = C64::new(1.0 / axis.step.sqrt(), 0.0);
        Self::new(axis, amps, hbar)
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.axis.step
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(TempusError::Validation(
                "cannot normalise a zero state".into(),
            ));
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            axis: self.axis,
            amplitudes: self.amplitudes.iter().map(|z| z * c).collect(),
            hbar: self.hbar,
        }
    }

    /// `<self|other>` as a Riemann sum.
    pub fn inner(&self, other: &GridState) -> Result<C64> {
        self.check_same_axis(other)?;
        Ok(inner_raw(&self.amplitudes, &other.amplitudes) * self.axis.step)
    }

    pub fn check_same_axis(&self, other: &GridState) -> Result<()> {
        if !self.axis.compatible(&other.axis, 1e-9) {
            return Err(TempusError::Domain("states live on different axes".into()));
        }
        Ok(())
    }

    /// Probability density `|psi|^2` on the grid.
    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Weight carried by the first and last `cells` samples, relative to the
    /// total.
    pub fn boundary_weight(&self, cells: usize) -> f64 {
        let d = self.density();
        let total: f64 = d.iter().sum();
        if total == 0.0 {
            return 0.0;
        }
        let c = cells.min(d.len() / 2);
        let edge: f64 = d[..c].iter().sum::<f64>() + d[d.len() - c..].iter().sum::<f64>();
        edge / total
    }
}

pub(crate) fn inner_raw(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Mixed state in ensemble form: `rho = sum_i w_i |psi_i><psi_i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub members: Vec<(f64, GridState)>,
}

impl Ensemble {
    /// Members are normalised; weights must be non-negative and are rescaled
    /// to sum to one.
    pub fn new(members: Vec<(f64, GridState)>) -> Result<Self> {
        if members.is_empty() {
            return Err(TempusError::Validation("empty ensemble".into()));
        }
        let total: f64 = members.iter().map(|(w, _)| *w).sum();
        if members.iter().any(|(w, _)| *w < 0.0) || !(total > 0.0) {
            return Err(TempusError::Validation(
                "ensemble weights must be non-negative".into(),
            ));
        }
        let first = members[0].1.axis;
        let mut out = Vec::with_capacity(members.len());
        for (w, s) in members {
            if !s.axis.compatible(&first, 1e-9) {
                return Err(TempusError::Domain(
                    "ensemble members on different axes".into(),
                ));
            }
            out.push((w / total, s.normalized()?));
        }
        Ok(Self { members: out })
    }

    pub fn pure(state: GridState) -> Result<Self> {
        Self::new(vec![(1.0, state)])
    }

    pub fn axis(&self) -> Axis {
        self.members[0].1.axis
    }

    /// Diagonal of `rho` in the grid basis (a probability density).
    pub fn density(&self) -> Vec<f64> {
        let n = self.axis().count;
        let mut d = vec![0.0; n];
        for (w, s) in &self.members {
            for (di, z) in d.iter_mut().zip(&s.amplitudes) {
                *di += w * z.norm_sqr();
            }
        }
        d
    }
}
