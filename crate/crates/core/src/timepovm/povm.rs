use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::hilbert::{Axis, GridState};
use crate::{Result, TempusError};

/// One effect `F(Z)` of a POVM.
#[derive(Debug, Clone, PartialEq)]
pub enum Effect {
    /// Multiplication operator in the basis of `Povm::basis`.
    Diagonal(Vec<f64>),
    Dense(DMatrix<C64>),
}

impl Effect {
    pub fn to_dense(&self) -> DMatrix<C64> {
        match self {
            Effect::Diagonal(d) => DMatrix::from_fn(d.len(), d.len(), |i, j| {
                if i == j {
                    C64::new(d[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
            Effect::Dense(m) => m.clone(),
        }
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        match self {
            Effect::Diagonal(d) => d.iter().cloned().fold(f64::INFINITY, f64::min),
            Effect::Dense(m) => {
                let h = (m + m.adjoint()).scale(0.5);
                h.symmetric_eigenvalues()
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// `<psi| F |psi>` with Riemann weight `step`.
    pub fn expectation(&self, psi: &[C64], step: f64) -> f64 {
        match self {
            Effect::Diagonal(d) => {
                psi.iter()
                    .zip(d)
                    .map(|(z, w)| z.norm_sqr() * w)
                    .sum::<f64>()
                    * step
            }
            Effect::Dense(m) => {
                let v = nalgebra::DVector::from_column_slice(psi);
                (v.adjoint() * m * &v)[(0, 0)].re * step
            }
        }
    }

    pub fn add(&self, other: &Effect) -> Effect {
        match (self, other) {
            (Effect::Diagonal(a), Effect::Diagonal(b)) => {
                Effect::Diagonal(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            _ => Effect::Dense(self.to_dense() + other.to_dense()),
        }
    }

    /// Max-abs entry of `self - other`.
    pub fn distance(&self, other: &Effect) -> f64 {
        match (self, other) {
            (Effect::Diagonal(a), Effect::Diagonal(b)) => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
            _ => (self.to_dense() - other.to_dense())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max),
        }
    }
}

/// Effects for a list of disjoint outcome bins.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    /// State space the effects act on.
    pub basis: Axis,
    /// Outcome bins `[a, b)`, sorted; the outer ends may be infinite.
    pub bins: Vec<(f64, f64)>,
    pub effects: Vec<Effect>,
    /// Outcome domain `Z0`.
    pub domain: (f64, f64),
    /// Whether the effects are meant to sum to the identity.
    pub normalized: bool,
    /// Outcomes are read modulo the domain length.
    pub periodic: bool,
    /// The domain stands in for the whole real line (the state's
    /// distribution lies well inside it), so the uncertainty relation of a
    /// covariant observable applies.
    pub line_like: bool,
    /// Exact first and second moment operators `∫ t F(dt)`, `∫ t^2 F(dt)`,
    /// when the construction provides them.
    pub moments: Option<Box<(Effect, Effect)>>,
}

/// Result of checking positivity, additivity and normalisation.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PovmAxioms {
    pub min_eigenvalue: f64,
    /// Max-abs deviation of the total from the identity (or the excess over
    /// it, for sub-normalised families).
    pub normalization_defect: f64,
}

impl PovmAxioms {
    pub fn holds(&self, positivity_tol: f64, normalization_tol: f64) -> bool {
        self.min_eigenvalue >= -positivity_tol && self.normalization_defect <= normalization_tol
    }
}

pub fn check_bins(bins: &[(f64, f64)]) -> Result<()> {
    if bins.is_empty() {
        return Err(TempusError::Partition("no bins".into()));
    }
    for (a, b) in bins {
        if !(a < b) {
            return Err(TempusError::Partition(format!(
                "empty or reversed bin [{a}, {b})"
            )));
        }
    }
    for w in bins.windows(2) {
        if w[1].0 < w[0].1 {
            return Err(TempusError::Partition(format!(
                "bins [{}, {}) and [{}, {}) overlap",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
    }
    Ok(())
}

impl Povm {
    pub fn new(
        basis: Axis,
        bins: Vec<(f64, f64)>,
        effects: Vec<Effect>,
        domain: (f64, f64),
        normalized: bool,
    ) -> Result<Self> {
        check_bins(&bins)?;
        if bins.len() != effects.len() {
            return Err(TempusError::Validation(
                "one effect per bin required".into(),
            ));
        }
        Ok(Self {
            basis,
            bins,
            effects,
            domain,
            normalized,
            periodic: false,
            line_like: false,
            moments: None,
        })
    }

    /// Like [`Povm::new`] but accepts bins in any order.
    pub fn from_unsorted(
        basis: Axis,
        bins: Vec<(f64, f64)>,
        effects: Vec<Effect>,
        domain: (f64, f64),
        normalized: bool,
    ) -> Result<Self> {
        if bins.len() != effects.len() {
            return Err(TempusError::Validation(
                "one effect per bin required".into(),
            ));
        }
        let mut pairs: Vec<_> = bins.into_iter().zip(effects).collect();
        pairs.sort_by(|a, b| a.0 .0.total_cmp(&b.0 .0));
        let (bins, effects) = pairs.into_iter().unzip();
        Self::new(basis, bins, effects, domain, normalized)
    }

    pub fn with_periodic(mut self) -> Self {
        self.periodic = true;
        self
    }

    pub fn with_line_like(mut self) -> Self {
        self.line_like = true;
        self
    }

    pub fn with_moments(mut self, first: Effect, second: Effect) -> Self {
        self.moments = Some(Box::new((first, second)));
        self
    }

    /// First moment operator: exact when available, otherwise from bin
    /// midpoints.
    pub fn first_moment(&self) -> Result<Effect> {
        if let Some(m) = &self.moments {
            return Ok(m.0.clone());
        }
        let mut acc: Option<Effect> = None;
        for ((a, b), e) in self.bins.iter().zip(&self.effects) {
            if !(a.is_finite() && b.is_finite()) {
                return Err(TempusError::Moment(
                    "first moment over an infinite bin".into(),
                ));
            }
            let t = 0.5 * (a + b);
            let scaled = match e {
                Effect::Diagonal(d) => Effect::Diagonal(d.iter().map(|x| x * t).collect()),
                Effect::Dense(m) => Effect::Dense(m * C64::new(t, 0.0)),
            };
            acc = Some(match acc {
                None => scaled,
                Some(a) => a.add(&scaled),
            });
        }
        Ok(acc.expect("non-empty"))
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    /// `F(Z0)`: the sum of all effects.
    pub fn total(&self) -> Effect {
        let mut it = self.effects.iter();
        let first = it.next().expect("non-empty").clone();
        it.fold(first, |acc, e| acc.add(e))
    }

    /// Effect of the union of bins `range` (additivity).
    pub fn merged(&self, range: std::ops::Range<usize>) -> Effect {
        let mut acc = self.effects[range.start].clone();
        for e in &self.effects[range.start + 1..range.end] {
            acc = acc.add(e);
        }
        acc
    }

    pub fn axioms(&self) -> PovmAxioms {
        let min_eigenvalue = self
            .effects
            .iter()
            .map(|e| e.min_eigenvalue())
            .fold(f64::INFINITY, f64::min);
        let n = self.basis.count;
        let total = self.total();
        let normalization_defect = match &total {
            Effect::Diagonal(d) => d
                .iter()
                .map(|x| {
                    if self.normalized {
                        (x - 1.0).abs()
                    } else {
                        (x - 1.0).max(0.0)
                    }
                })
                .fold(0.0, f64::max),
            Effect::Dense(m) => {
                let dev = m - DMatrix::<C64>::identity(n, n);
                if self.normalized {
                    dev.iter().map(|z| z.norm()).fold(0.0, f64::max)
                } else {
                    let h = (&dev + dev.adjoint()).scale(0.5);
                    h.symmetric_eigenvalues()
                        .iter()
                        .cloned()
                        .fold(0.0, f64::max)
                }
            }
        };
        PovmAxioms {
            min_eigenvalue,
            normalization_defect,
        }
    }

    /// Outcome probabilities `<psi| F(Z_i) |psi>` for a normalised state.
    pub fn distribution(&self, state: &GridState) -> Result<Vec<f64>> {
        if !self.basis.compatible(&state.axis, 1e-9) {
            return Err(TempusError::Domain(
                "state and POVM live on different bases".into(),
            ));
        }
        let psi = state.normalized()?;
        Ok(self
            .effects
            .iter()
            .map(|e| e.expectation(&psi.amplitudes, psi.axis.step))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_overlapping_bins() {
        assert!(matches!(
            check_bins(&[(0.0, 1.0), (0.5, 2.0)]),
            Err(TempusError::Partition(_))
        ));
        assert!(check_bins(&[(f64::NEG_INFINITY, 0.0), (0.0, f64::INFINITY)]).is_ok());
    }

    #[test]
    fn uniform_family() {
        let ax = Axis::fock(3).unwrap();
        let bins: Vec<(f64, f64)> = (0..4).map(|k| (k as f64, k as f64 + 1.0)).collect();
        let effects = vec![Effect::Diagonal(vec![0.25; 3]); 4];
        let p = Povm::new(ax, bins, effects, (0.0, 4.0), true).unwrap();
        let a = p.axioms();
        assert!(a.holds(1e-12, 1e-12));
        assert_eq!(p.merged(0..2), Effect::Diagonal(vec![0.5; 3]));
    }
}
