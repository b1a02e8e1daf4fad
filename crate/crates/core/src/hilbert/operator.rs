use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::fourier::GridDft;
use super::state::inner_raw;
use super::{Axis, Ensemble, GridState};
use crate::{Result, TempusError};

/// Storage of a self-adjoint operator.
#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    /// Real diagonal in the grid basis.
    Diagonal(Vec<f64>),
    /// Full Hermitian matrix acting on amplitude vectors.
    Dense(DMatrix<C64>),
    /// Diagonal in the discrete momentum basis conjugate to a position grid
    /// (e.g. kinetic energy). Values are ordered along the centred momentum
    /// axis returned by `Axis::conjugate`.
    ConjugateDiagonal { values: Vec<f64>, hbar: f64 },
}

/// Self-adjoint operator on the basis described by an [`Axis`].
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    basis: Axis,
    representation: Representation,
}

const HERMITIAN_TOL: f64 = 1e-12;

impl HermitianOperator {
    pub fn diagonal(basis: Axis, values: Vec<f64>) -> Result<Self> {
        if values.len() != basis.count {
            return Err(TempusError::Validation(
                "diagonal length does not match basis".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(TempusError::Validation("non-finite diagonal entry".into()));
        }
        Ok(Self {
            basis,
            representation: Representation::Diagonal(values),
        })
    }

    /// Multiplication by `f(x)` on the grid (e.g. the position operator).
    pub fn multiplication<F: Fn(f64) -> f64>(basis: Axis, f: F) -> Result<Self> {
        Self::diagonal(basis, basis.values().into_iter().map(f).collect())
    }

    pub fn dense(basis: Axis, matrix: DMatrix<C64>) -> Result<Self> {
        let n = basis.count;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(TempusError::Validation(format!(
                "{}x{} matrix on a basis of {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let scale = matrix.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for i in 0..n {
            for j in i..n {
                if (matrix[(i, j)] - matrix[(j, i)].conj()).norm() > HERMITIAN_TOL * scale {
                    return Err(TempusError::Validation(format!(
                        "matrix not hermitian at ({i},{j})"
                    )));
                }
            }
        }
        // symmetrise away the admitted rounding
        let m = (&matrix + matrix.adjoint()).scale(0.5);
        Ok(Self {
            basis,
            representation: Representation::Dense(m),
        })
    }

    /// `g(P)` on a position grid, `P` the discrete momentum.
    pub fn from_momentum_fn<F: Fn(f64) -> f64>(position: Axis, hbar: f64, g: F) -> Result<Self> {
        let p_axis = position.conjugate(hbar)?;
        let values: Vec<f64> = p_axis.values().into_iter().map(g).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(TempusError::Validation(
                "non-finite momentum function".into(),
            ));
        }
        Ok(Self {
            basis: position,
            representation: Representation::ConjugateDiagonal { values, hbar },
        })
    }

    pub fn basis(&self) -> Axis {
        self.basis
    }

    pub fn representation(&self) -> &Representation {
        &self.representation
    }

    pub fn dim(&self) -> usize {
        self.basis.count
    }

    fn check(&self, state: &GridState) -> Result<()> {
        if !self.basis.compatible(&state.axis, 1e-9) {
            return Err(TempusError::Domain(
                "operator and state live on different axes".into(),
            ));
        }
        if let Representation::ConjugateDiagonal { hbar, .. } = self.representation {
            if (hbar - state.hbar).abs() > 1e-12 * hbar {
                return Err(TempusError::Domain(
                    "operator built with a different hbar".into(),
                ));
            }
        }
        Ok(())
    }

    pub(crate) fn apply_raw(&self, v: &[C64]) -> Vec<C64> {
        match &self.representation {
            Representation::Diagonal(d) => v.iter().zip(d).map(|(z, e)| z * e).collect(),
            Representation::Dense(m) => {
                let x = nalgebra::DVector::from_column_slice(v);
                (m * x).as_slice().to_vec()
            }
            Representation::ConjugateDiagonal { values, hbar } => {
                let dft = GridDft::new(self.basis, *hbar).expect("validated axis");
                let phi: Vec<C64> = dft
                    .forward(v)
                    .into_iter()
                    .zip(values)
                    .map(|(z, e)| z * e)
                    .collect();
                dft.inverse(&phi)
            }
        }
    }

    /// `A psi`.
    pub fn apply(&self, state: &GridState) -> Result<GridState> {
        self.check(state)?;
        GridState::new(state.axis, self.apply_raw(&state.amplitudes), state.hbar)
    }

    /// Matrix of the operator in the grid basis (amplitude coordinates).
    pub fn to_dense(&self) -> DMatrix<C64> {
        let n = self.dim();
        match &self.representation {
            Representation::Diagonal(d) => DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    C64::new(d[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
            Representation::Dense(m) => m.clone(),
            Representation::ConjugateDiagonal { .. } => {
                let mut m = DMatrix::zeros(n, n);
                let mut e = vec![C64::new(0.0, 0.0); n];
                for j in 0..n {
                    e[j] = C64::new(1.0, 0.0);
                    let col = self.apply_raw(&e);
                    for i in 0..n {
                        m[(i, j)] = col[i];
                    }
                    e[j] = C64::new(0.0, 0.0);
                }
                (&m + m.adjoint()).scale(0.5)
            }
        }
    }

    /// Eigenvalues in ascending order with eigenvectors as columns.
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<C64>) {
        let n = self.dim();
        if let Representation::Diagonal(d) = &self.representation {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|a, b| d[*a].total_cmp(&d[*b]));
            let vecs = DMatrix::from_fn(n, n, |i, j| {
                if i == idx[j] {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            return (idx.iter().map(|&i| d[i]).collect(), vecs);
        }
        let eig = self.to_dense().symmetric_eigen();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]));
        let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vecs = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, idx[c])]);
        (vals, vecs)
    }

    /// `exp(-i t H / hbar)` as a dense matrix.
    pub fn unitary(&self, t: f64, hbar: f64) -> DMatrix<C64> {
        let n = self.dim();
        match &self.representation {
            Representation::Diagonal(d) => DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    C64::from_polar(1.0, -t * d[i] / hbar)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
            _ => {
                let (vals, v) = self.eigen();
                let phases = DMatrix::from_fn(n, n, |i, j| {
                    if i == j {
                        C64::from_polar(1.0, -t * vals[i] / hbar)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                &v * phases * v.adjoint()
            }
        }
    }

    /// Scalar shift `H + c I`.
    pub fn shifted(&self, c: f64) -> Self {
        let representation = match &self.representation {
            Representation::Diagonal(d) => {
                Representation::Diagonal(d.iter().map(|x| x + c).collect())
            }
            Representation::Dense(m) => {
                let mut m = m.clone();
                for i in 0..m.nrows() {
                    m[(i, i)] += c;
                }
                Representation::Dense(m)
            }
            Representation::ConjugateDiagonal { values, hbar } => {
                Representation::ConjugateDiagonal {
                    values: values.iter().map(|x| x + c).collect(),
                    hbar: *hbar,
                }
            }
        };
        Self {
            basis: self.basis,
            representation,
        }
    }
}

/// `exp(-i t H / hbar) psi`, with `hbar` taken from the state.
pub fn evolve(state: &GridState, h: &HermitianOperator, t: f64) -> Result<GridState> {
    h.check(state)?;
    if !t.is_finite() {
        return Err(TempusError::Validation(
            "evolution time must be finite".into(),
        ));
    }
    if t == 0.0 {
        return Ok(state.clone());
    }
    let hbar = state.hbar;
    let amps = match &h.representation {
        Representation::Diagonal(d) => state
            .amplitudes
            .iter()
            .zip(d)
            .map(|(z, e)| z * C64::from_polar(1.0, -t * e / hbar))
            .collect(),
        Representation::Dense(_) => {
            let (vals, v) = h.eigen();
            let x = nalgebra::DVector::from_column_slice(&state.amplitudes);
            let mut c = v.adjoint() * x;
            for (ci, e) in c.iter_mut().zip(&vals) {
                *ci *= C64::from_polar(1.0, -t * e / hbar);
            }
            (v * c).as_slice().to_vec()
        }
        Representation::ConjugateDiagonal { values, .. } => {
            let dft = GridDft::new(state.axis, hbar)?;
            let phi: Vec<C64> = dft
                .forward(&state.amplitudes)
                .into_iter()
                .zip(values)
                .map(|(z, e)| z * C64::from_polar(1.0, -t * e / hbar))
                .collect();
            dft.inverse(&phi)
        }
    };
    GridState::new(state.axis, amps, hbar)
}

/// Eigenvalues of `h` with the weights `|<E|psi>|^2` of the normalised
/// state, in the operator's own eigenbasis order.
pub fn spectral_weights(h: &HermitianOperator, state: &GridState) -> Result<(Vec<f64>, Vec<f64>)> {
    h.check(state)?;
    let n2 = state.norm_sqr();
    if !(n2 > 0.0) {
        return Err(TempusError::Validation("zero state".into()));
    }
    let step = state.axis.step;
    match &h.representation {
        Representation::Diagonal(d) => Ok((
            d.clone(),
            state
                .amplitudes
                .iter()
                .map(|z| z.norm_sqr() * step / n2)
                .collect(),
        )),
        Representation::Dense(_) => {
            let (vals, v) = h.eigen();
            let x = nalgebra::DVector::from_column_slice(&state.amplitudes);
            let c = v.adjoint() * x;
            Ok((vals, c.iter().map(|z| z.norm_sqr() * step / n2).collect()))
        }
        Representation::ConjugateDiagonal { values, .. } => {
            let dft = GridDft::new(state.axis, state.hbar)?;
            let dp = dft.p_axis.step;
            let phi = dft.forward(&state.amplitudes);
            Ok((
                values.clone(),
                phi.iter().map(|z| z.norm_sqr() * dp / n2).collect(),
            ))
        }
    }
}

/// Mean and variance of `op` in a pure state (normalised internally).
pub fn moments(op: &HermitianOperator, state: &GridState) -> Result<(f64, f64)> {
    op.check(state)?;
    let n2 = state.norm_sqr();
    if !(n2 > 0.0) {
        return Err(TempusError::Validation("zero state".into()));
    }
    let a = op.apply_raw(&state.amplitudes);
    let mean = inner_raw(&state.amplitudes, &a).re * state.axis.step / n2;
    let second = a.iter().map(|z| z.norm_sqr()).sum::<f64>() * state.axis.step / n2;
    Ok((mean, (second - mean * mean).max(0.0)))
}

/// Mean and variance of `op` in a mixed state.
pub fn ensemble_moments(op: &HermitianOperator, rho: &Ensemble) -> Result<(f64, f64)> {
    let mut mean = 0.0;
    let mut second = 0.0;
    for (w, s) in &rho.members {
        let (m, v) = moments(op, s)?;
        mean += w * m;
        second += w * (v + m * m);
    }
    Ok((mean, (second - mean * mean).max(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::AxisKind;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rejects_non_hermitian() {
        let ax = Axis::fock(2).unwrap();
        let m =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        assert!(matches!(
            HermitianOperator::dense(ax, m),
            Err(TempusError::Validation(_))
        ));
    }

    #[test]
    fn two_level_return_probability() {
        let ax = Axis::fock(2).unwrap();
        let w = 1.7;
        let h = HermitianOperator::diagonal(ax, vec![0.0, w]).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let psi = GridState::new(ax, vec![c(s, 0.0), c(s, 0.0)], 1.0).unwrap();
        for t in [0.3, PI / w, 2.0] {
            let pt = evolve(&psi, &h, t).unwrap();
            let p = psi.inner(&pt).unwrap().norm_sqr();
            assert!((p - (w * t / 2.0).cos().powi(2)).abs() < 1e-14);
        }
        // dense path gives the same answer
        let hd = HermitianOperator::dense(ax, h.to_dense()).unwrap();
        let a = evolve(&psi, &hd, 0.9).unwrap();
        let b = evolve(&psi, &h, 0.9).unwrap();
        for (x, y) in a.amplitudes.iter().zip(&b.amplitudes) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn eigenstate_only_picks_up_phase() {
        let ax = Axis::fock(3).unwrap();
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0, 0.0),
                c(0.5, 0.2),
                c(0.0, 0.0),
                c(0.5, -0.2),
                c(2.0, 0.0),
                c(0.1, 0.0),
                c(0.0, 0.0),
                c(0.1, 0.0),
                c(-1.0, 0.0),
            ],
        );
        let h = HermitianOperator::dense(ax, m).unwrap();
        let (vals, v) = h.eigen();
        let psi = GridState::new(ax, v.column(1).iter().cloned().collect(), 1.0).unwrap();
        let out = evolve(&psi, &h, 1.3).unwrap();
        let ph = C64::from_polar(1.0, -1.3 * vals[1]);
        for (x, y) in out.amplitudes.iter().zip(&psi.amplitudes) {
            assert!((x - y * ph).norm() < 1e-12);
        }
        let (_, var) = moments(&h, &psi).unwrap();
        assert!(var < 1e-12);
    }

    #[test]
    fn gaussian_position_variance() {
        let ax = Axis::centered(AxisKind::Position, 0.02, 1024).unwrap();
        let sigma = 1.3;
        let psi = GridState::gaussian(ax, 1.0, 0.0, sigma, 0.0).unwrap();
        let q = HermitianOperator::multiplication(ax, |x| x).unwrap();
        let (m, v) = moments(&q, &psi).unwrap();
        assert!(m.abs() < 1e-12);
        assert!((v - sigma * sigma / 2.0).abs() < 1e-10);
    }

    #[test]
    fn kinetic_evolution_matches_dense_and_free_spreading() {
        let ax = Axis::centered(AxisKind::Position, 0.1, 64).unwrap();
        let h = HermitianOperator::from_momentum_fn(ax, 1.0, |p| p * p / 2.0).unwrap();
        let hd = HermitianOperator::dense(ax, h.to_dense()).unwrap();
        let psi = GridState::gaussian(ax, 1.0, -0.5, 0.6, 1.0).unwrap();
        let a = evolve(&psi, &h, 0.4).unwrap();
        let b = evolve(&psi, &hd, 0.4).unwrap();
        for (x, y) in a.amplitudes.iter().zip(&b.amplitudes) {
            assert!((x - y).norm() < 1e-10);
        }
        // free Gaussian width grows as w^2 (1 + t^2 / w^4)
        let big = Axis::centered(AxisKind::Position, 0.05, 2048).unwrap();
        let hk = HermitianOperator::from_momentum_fn(big, 1.0, |p| p * p / 2.0).unwrap();
        let g = GridState::gaussian(big, 1.0, 0.0, 1.0, 0.0).unwrap();
        let q = HermitianOperator::multiplication(big, |x| x).unwrap();
        let (_, v) = moments(&q, &evolve(&g, &hk, 2.0).unwrap()).unwrap();
        assert!((v - 0.5 * (1.0 + 4.0)).abs() < 1e-9);
    }

    #[test]
    fn maximally_mixed_sigma_z() {
        let ax = Axis::fock(2).unwrap();
        let sz = HermitianOperator::diagonal(ax, vec![1.0, -1.0]).unwrap();
        let rho = Ensemble::new(vec![
            (0.5, GridState::basis(ax, 1.0, 0).unwrap()),
            (0.5, GridState::basis(ax, 1.0, 1).unwrap()),
        ])
        .unwrap();
        let (m, v) = ensemble_moments(&sz, &rho).unwrap();
        assert!(m.abs() < 1e-15 && (v - 1.0).abs() < 1e-15);
    }
}
