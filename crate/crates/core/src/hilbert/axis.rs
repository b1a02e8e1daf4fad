use serde::Serialize;

use crate::{Result, TempusError};

/// Physical meaning of a grid coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisKind {
    Position,
    Momentum,
    Energy,
    Time,
    Fock,
}

/// Uniform one-dimensional grid `start + i * step`, `i = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub kind: AxisKind,
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(kind: AxisKind, start: f64, step: f64, count: usize) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(TempusError::Validation(format!(
                "axis step must be positive, got {step}"
            )));
        }
        if count < 2 {
            return Err(TempusError::Validation(format!(
                "axis needs at least 2 points, got {count}"
            )));
        }
        if !start.is_finite() {
            return Err(TempusError::Validation("axis start must be finite".into()));
        }
        if kind == AxisKind::Fock && (start != 0.0 || step != 1.0) {
            return Err(TempusError::Validation(
                "fock axis must start at 0 with unit step".into(),
            ));
        }
        Ok(Self {
            kind,
            start,
            step,
            count,
        })
    }

    /// Grid of `count` points spanning `[lo, hi]` inclusive.
    pub fn linspace(kind: AxisKind, lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count < 2 || !(hi > lo) {
            return Err(TempusError::Validation(format!(
                "bad linspace [{lo}, {hi}] x {count}"
            )));
        }
        Self::new(kind, lo, (hi - lo) / (count - 1) as f64, count)
    }

    /// Symmetric grid of `count` points with spacing `step`, containing 0 at
    /// index `count / 2`.
    pub fn centered(kind: AxisKind, step: f64, count: usize) -> Result<Self> {
        Self::new(kind, -((count / 2) as f64) * step, step, count)
    }

    /// Fock basis `|0>, ..., |dim-1>`.
    pub fn fock(dim: usize) -> Result<Self> {
        Self::new(AxisKind::Fock, 0.0, 1.0, dim)
    }

    #[inline]
    pub fn value(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }

    pub fn end(&self) -> f64 {
        self.value(self.count - 1)
    }

    /// Total extent `count * step` (cell model: every sample owns one cell).
    pub fn span(&self) -> f64 {
        self.count as f64 * self.step
    }

    /// Index of the grid point nearest to `x`, clamped to the grid.
    pub fn nearest_index(&self, x: f64) -> usize {
        let i = ((x - self.start) / self.step).round();
        i.clamp(0.0, (self.count - 1) as f64) as usize
    }

    /// Same kind, start, step and count, up to `tol` relative to the step.
    pub fn compatible(&self, other: &Axis, tol: f64) -> bool {
        self.kind == other.kind
            && self.count == other.count
            && (self.step - other.step).abs() <= tol * self.step
            && (self.start - other.start).abs() <= tol * self.step.max(1.0)
    }

    /// Discrete Fourier conjugate axis, centred on zero, with
    /// `step = 2 pi hbar / (count * self.step)`.
    pub fn conjugate(&self, hbar: f64) -> Result<Axis> {
        let kind = match self.kind {
            AxisKind::Position => AxisKind::Momentum,
            AxisKind::Momentum => AxisKind::Position,
            AxisKind::Time => AxisKind::Energy,
            AxisKind::Energy => AxisKind::Time,
            AxisKind::Fock => {
                return Err(TempusError::Domain(
                    "fock axis has no Fourier conjugate".into(),
                ))
            }
        };
        Axis::centered(
            kind,
            2.0 * std::f64::consts::PI * hbar / self.span(),
            self.count,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_axes() {
        assert!(Axis::new(AxisKind::Time, 0.0, 0.0, 10).is_err());
        assert!(Axis::new(AxisKind::Time, 0.0, 1.0, 1).is_err());
        assert!(Axis::new(AxisKind::Fock, 1.0, 1.0, 4).is_err());
        assert!(Axis::fock(4).is_ok());
    }

    #[test]
    fn centered_contains_zero() {
        let a = Axis::centered(AxisKind::Position, 0.1, 64).unwrap();
        assert_eq!(a.value(32), 0.0);
        let b = Axis::centered(AxisKind::Position, 0.1, 63).unwrap();
        assert!(b.value(31).abs() < 1e-15);
        let c = a.conjugate(1.0).unwrap();
        assert_eq!(c.kind, AxisKind::Momentum);
        assert!((c.step - 2.0 * std::f64::consts::PI / 6.4).abs() < 1e-14);
    }
}
