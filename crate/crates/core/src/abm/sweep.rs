use serde::Serialize;

use super::{
    conditional_state, confidence_function, energy_povm, energy_statistics, momentum_povm,
    AbmConfig,
};
use crate::{Result, TempusError};

/// One point of a coupling sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub g0: f64,
    pub coupling: f64,
    /// Standard deviation of the confidence function.
    pub inaccuracy: f64,
    pub distortion: f64,
    pub probe_term: f64,
    pub cross_term: f64,
    /// `Var(reading) - Var(H0)` by quadrature.
    pub energy_inaccuracy: f64,
    pub statistics_pass: bool,
    pub reproducibility: f64,
    pub near_eigenstate: bool,
    pub min_eigenvalue: f64,
    pub normalization_defect: f64,
}

/// Evaluate statistics, POVM axioms and reproducibility for each `g0` at
/// the configuration's fixed `dt`.
///
/// Reproducibility is measured for readings within two confidence widths
/// of the object's mean momentum.
pub fn coupling_sweep(cfg: &AbmConfig, g0_values: &[f64]) -> Result<Vec<SweepRow>> {
    let (p0, _) = cfg.object_momentum();
    let ax = cfg.object.axis;
    g0_values
        .iter()
        .map(|&g0| {
            let c = cfg.with_g0(g0)?;
            let cf = confidence_function(&c)?;
            let st = energy_statistics(&c)?;
            let w = cf.std();
            let cond = conditional_state(&c, (p0 - 2.0 * w, p0 + 2.0 * w))?;

            let mut edges = vec![f64::NEG_INFINITY];
            edges.extend((0..=8).map(|k| ax.start + k as f64 * ax.span() / 8.0));
            edges.push(f64::INFINITY);
            let bins: Vec<(f64, f64)> = edges.windows(2).map(|e| (e[0], e[1])).collect();
            let mp = momentum_povm(&c, &bins)?.axioms();
            let emax = ax.start.abs().max(ax.end().abs()).powi(2) / (2.0 * c.m);
            let ebins: Vec<(f64, f64)> = (0..8)
                .map(|k| {
                    (
                        k as f64 * emax / 8.0,
                        if k == 7 {
                            f64::INFINITY
                        } else {
                            (k + 1) as f64 * emax / 8.0
                        },
                    )
                })
                .collect();
            let ep = energy_povm(&c, &ebins)?.axioms();

            Ok(SweepRow {
                g0,
                coupling: c.coupling(),
                inaccuracy: w,
                distortion: st.distortion_quadrature,
                probe_term: st.probe_term_quadrature,
                cross_term: st.cross_term_quadrature,
                energy_inaccuracy: st.variance - st.object_variance,
                statistics_pass: st.reports.iter().all(|r| r.pass),
                reproducibility: cond.reproducibility,
                near_eigenstate: cond.near_eigenstate,
                min_eigenvalue: mp.min_eigenvalue.min(ep.min_eigenvalue),
                normalization_defect: mp.normalization_defect.max(ep.normalization_defect),
            })
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(TempusError::Validation(
            "need at least two matching points".into(),
        ));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(TempusError::Domain(
            "log-log slope needs positive data".into(),
        ));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abm::{gaussian_momentum_state, gaussian_probe};

    #[test]
    fn slope_of_power_law() {
        let x: Vec<f64> = (1..10).map(|k| k as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(-2.5)).collect();
        assert!((loglog_slope(&x, &y).unwrap() + 2.5).abs() < 1e-12);
    }

    #[test]
    fn short_sweep() {
        let object = gaussian_momentum_state(5.0, 0.01, 96, 1.0).unwrap();
        let cfg = AbmConfig::new(
            1.0,
            1.0,
            1.0,
            0.01,
            gaussian_probe(1.0, 1.0).unwrap(),
            object,
            1.0,
        )
        .unwrap();
        let rows = coupling_sweep(&cfg, &[1.0, 10.0, 100.0]).unwrap();
        for r in &rows {
            assert!(r.statistics_pass && r.reproducibility >= 0.99 && r.near_eigenstate);
            assert!(r.min_eigenvalue >= -1e-12 && r.normalization_defect <= 1e-8);
        }
        let g: Vec<f64> = rows.iter().map(|r| r.g0).collect();
        let d: Vec<f64> = rows.iter().map(|r| r.distortion).collect();
        assert!((loglog_slope(&g, &d).unwrap() + 2.0).abs() < 0.01);
    }
}
