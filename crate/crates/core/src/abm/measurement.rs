use serde::Serialize;

use super::{confidence_function, AbmConfig, ConfidenceFunction};
use crate::quad::GaussLegendre;
use crate::report::BoundReport;
use crate::timepovm::{check_bins, Effect, Povm};
use crate::{Result, TempusError};

/// Relative agreement required between the closed-form statistics and the
/// POVM-moment quadrature.
pub const STATISTICS_TOLERANCE: f64 = 1e-6;
const RADIAL_TOLERANCE: f64 = 1e-10;

fn check_contiguous(bins: &[(f64, f64)]) -> Result<()> {
    check_bins(bins)?;
    for w in bins.windows(2) {
        if w[0].1 != w[1].0 {
            return Err(TempusError::Partition(format!(
                "gap between {} and {}",
                w[0].1, w[1].0
            )));
        }
    }
    Ok(())
}

/// Unsharp momentum observable `E(R) = (chi_R * f)(P_x)`.
///
/// Bins must be contiguous and cover the object's momentum grid; the family
/// is normalised when the outer bins extend to ±∞.
pub fn momentum_povm(cfg: &AbmConfig, bins: &[(f64, f64)]) -> Result<Povm> {
    check_contiguous(bins)?;
    let axis = cfg.object.axis;
    let (first, last) = (bins[0].0, bins[bins.len() - 1].1);
    if first > axis.start || last < axis.end() {
        return Err(TempusError::Partition(format!(
            "bins [{first}, {last}) do not cover the momentum grid [{}, {}]",
            axis.start,
            axis.end()
        )));
    }
    let cf = confidence_function(cfg)?;
    let effects = crate::par::map(bins, |&(a, b)| {
        Effect::Diagonal(
            (0..axis.count)
                .map(|i| {
                    let p = axis.value(i);
                    cf.mass(p - b, p - a)
                })
                .collect(),
        )
    });
    let normalized = first == f64::NEG_INFINITY && last == f64::INFINITY;
    Povm::new(axis, bins.to_vec(), effects, (first, last), normalized)
}

fn energy_bins(cfg: &AbmConfig, bins: &[(f64, f64)]) -> Result<ConfidenceFunction> {
    check_contiguous(bins)?;
    if bins[0].0 < 0.0 {
        return Err(TempusError::Partition(
            "energy bins must lie in [0, inf)".into(),
        ));
    }
    let cf = confidence_function(cfg)?;
    if !cf.symmetric {
        return Err(TempusError::Precondition(
            "the smeared energy observable needs a symmetric confidence function".into(),
        ));
    }
    Ok(cf)
}

fn energy_family(cfg: &AbmConfig, bins: &[(f64, f64)], effects: Vec<Effect>) -> Result<Povm> {
    let axis = cfg.object.axis;
    let normalized = bins[0].0 == 0.0 && bins[bins.len() - 1].1 == f64::INFINITY;
    let povm = Povm::new(
        axis,
        bins.to_vec(),
        effects,
        (bins[0].0, bins[bins.len() - 1].1),
        normalized,
    )?;
    // each element must be a function of |p|
    let n = axis.count;
    for e in &povm.effects {
        let Effect::Diagonal(d) = e else {
            unreachable!()
        };
        for i in 0..n / 2 {
            let j = n - 1 - i;
            if (axis.value(i) + axis.value(j)).abs() <= 1e-9 * axis.step
                && (d[i] - d[j]).abs() > RADIAL_TOLERANCE
            {
                return Err(TempusError::Precondition(format!(
                    "energy effect differs at ±p = {}: {} vs {}",
                    axis.value(j),
                    d[i],
                    d[j]
                )));
            }
        }
    }
    Ok(povm)
}

/// Smeared kinetic energy `E(Z) = E_f^{P_x}(h^{-1}(Z))`, `h(p) = p^2/2m`.
///
/// The preimage of `[e1, e2)` is `±[sqrt(2m e1), sqrt(2m e2))`, so each
/// effect is a sum of two convolution masses.
pub fn energy_povm(cfg: &AbmConfig, bins: &[(f64, f64)]) -> Result<Povm> {
    let cf = energy_bins(cfg, bins)?;
    let axis = cfg.object.axis;
    let m = cfg.m;
    let effects = crate::par::map(bins, |&(e1, e2)| {
        let (u1, u2) = ((2.0 * m * e1).sqrt(), (2.0 * m * e2).sqrt());
        Effect::Diagonal(
            (0..axis.count)
                .map(|i| {
                    let p = axis.value(i);
                    cf.mass(p - u2, p - u1) + cf.mass(p + u1, p + u2)
                })
                .collect(),
        )
    });
    energy_family(cfg, bins, effects)
}

/// Same family from the kernel form
/// `∫_Z (m/2e)^{1/2} [f(|p| - sqrt(2me)) + f(|p| + sqrt(2me))] de`,
/// integrated by Gauss–Legendre after `e = u^2/2m` removes the `e^{-1/2}`
/// singularity. Slow; meant as an independent check of [`energy_povm`].
pub fn energy_povm_kernel(cfg: &AbmConfig, bins: &[(f64, f64)]) -> Result<Povm> {
    let cf = energy_bins(cfg, bins)?;
    let axis = cfg.object.axis;
    let m = cfg.m;
    let (qlo, qhi) = cf.support();
    let panel = cf.std() / 4.0;
    let gl = GaussLegendre::new(8);
    let branch = |a: f64, b: f64, f: &dyn Fn(f64) -> f64| -> f64 {
        if b <= a {
            return 0.0;
        }
        let panels = ((b - a) / panel).ceil() as usize;
        gl.integrate(a, b, panels, f)
    };
    let effects = crate::par::map(bins, |&(e1, e2)| {
        let (u1, u2) = ((2.0 * m * e1).sqrt(), (2.0 * m * e2).sqrt());
        Effect::Diagonal(
            (0..axis.count)
                .map(|i| {
                    let r = axis.value(i).abs();
                    // f(r - u) is non-zero for u in (r - qhi, r - qlo)
                    let minus = branch(u1.max(r - qhi), u2.min(r - qlo), &|u| cf.density(r - u));
                    let plus = branch(u1.max(qlo - r), u2.min(qhi - r), &|u| cf.density(r + u));
                    minus + plus
                })
                .collect(),
        )
    });
    energy_family(cfg, bins, effects)
}

/// Reading statistics of the smeared energy observable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyStatistics {
    /// Mean reading, by quadrature over the object and confidence grids.
    pub mean: f64,
    pub variance: f64,
    pub mean_formula: f64,
    pub variance_formula: f64,
    /// `<H0>` and `Var(H0)` in the object state.
    pub object_mean: f64,
    pub object_variance: f64,
    /// `(g0 dt)^-2 <P_y^2/2m>`.
    pub distortion: f64,
    /// `(g0 dt)^-4 Var(P_y^2/2m)`.
    pub probe_term: f64,
    /// `4 (g0 dt)^-2 <H0> <P_y^2/2m>`.
    pub cross_term: f64,
    /// The same three terms by quadrature of the confidence function.
    pub distortion_quadrature: f64,
    pub probe_term_quadrature: f64,
    pub cross_term_quadrature: f64,
    pub reports: [BoundReport; 2],
}

fn raw_moments(values: &[f64], axis: &crate::hilbert::Axis, powers: &[i32]) -> Vec<f64> {
    powers
        .iter()
        .map(|&k| {
            values
                .iter()
                .enumerate()
                .map(|(i, w)| w * axis.value(i).powi(k))
                .sum::<f64>()
                * axis.step
        })
        .collect()
}

/// Mean and variance of the smeared energy reading.
pub fn energy_statistics(cfg: &AbmConfig) -> Result<EnergyStatistics> {
    let cf = confidence_function(cfg)?;
    if !cf.symmetric {
        return Err(TempusError::Precondition(
            "the energy statistics assume a symmetric confidence function".into(),
        ));
    }
    let probe = &cfg.probe;
    let pd = probe.density();
    // fourth moment must have converged on the probe grid
    let tail = pd.len() / 10;
    let m4: Vec<f64> = pd
        .iter()
        .enumerate()
        .map(|(i, w)| w * probe.axis.value(i).powi(4))
        .collect();
    let total4: f64 = m4.iter().sum();
    let edge4: f64 = m4[..tail].iter().chain(&m4[pd.len() - tail..]).sum();
    if !(total4.is_finite() && edge4 <= 1e-6 * total4) {
        return Err(TempusError::Moment(
            "probe fourth moment has not converged on its grid".into(),
        ));
    }
    let m = cfg.m;
    let lam = cfg.coupling();
    let py = raw_moments(&pd, &probe.axis, &[2, 4]);
    let probe_energy = py[0] / (2.0 * m);
    let probe_energy_var = (py[1] - py[0] * py[0]) / (4.0 * m * m);

    let od = cfg.object.density();
    let oa = &cfg.object.axis;
    let h0: Vec<f64> = (0..oa.count)
        .map(|i| oa.value(i).powi(2) / (2.0 * m))
        .collect();
    let object_mean: f64 = od.iter().zip(&h0).map(|(w, e)| w * e).sum::<f64>() * oa.step;
    let object_variance: f64 = od
        .iter()
        .zip(&h0)
        .map(|(w, e)| w * (e - object_mean).powi(2))
        .sum::<f64>()
        * oa.step;

    let distortion = probe_energy / (lam * lam);
    let probe_term = probe_energy_var / lam.powi(4);
    let cross_term = 4.0 * object_mean * probe_energy / (lam * lam);
    let mean_formula = object_mean + distortion;
    let variance_formula = object_variance + probe_term + cross_term;

    // reading r = p - q with p ~ |phi|^2 and q ~ f
    let fa = &cf.axis;
    let fw: Vec<f64> = cf.values.iter().map(|v| v * fa.step).collect();
    let ow: Vec<f64> = od.iter().map(|v| v * oa.step).collect();
    let row_mean = crate::par::map_range(oa.count, |i| {
        let p = oa.value(i);
        fw.iter()
            .enumerate()
            .map(|(j, w)| w * (p - fa.value(j)).powi(2))
            .sum::<f64>()
            / (2.0 * m)
    });
    let mean: f64 = ow.iter().zip(&row_mean).map(|(w, r)| w * r).sum();
    let row_var = crate::par::map_range(oa.count, |i| {
        let p = oa.value(i);
        fw.iter()
            .enumerate()
            .map(|(j, w)| w * ((p - fa.value(j)).powi(2) / (2.0 * m) - mean).powi(2))
            .sum::<f64>()
    });
    let variance: f64 = ow.iter().zip(&row_var).map(|(w, r)| w * r).sum();

    let q = raw_moments(&cf.values, fa, &[2, 4]);
    let distortion_quadrature = q[0] / (2.0 * m);
    let probe_term_quadrature = (q[1] - q[0] * q[0]) / (4.0 * m * m);
    let cross_term_quadrature = 4.0 * object_mean * distortion_quadrature;

    let reports = [
        BoundReport::equality(
            "H-val",
            mean_formula,
            mean,
            STATISTICS_TOLERANCE * mean.abs(),
        ),
        BoundReport::equality(
            "H-var",
            variance_formula,
            variance,
            STATISTICS_TOLERANCE * variance.abs(),
        ),
    ];
    Ok(EnergyStatistics {
        mean,
        variance,
        mean_formula,
        variance_formula,
        object_mean,
        object_variance,
        distortion,
        probe_term,
        cross_term,
        distortion_quadrature,
        probe_term_quadrature,
        cross_term_quadrature,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abm::{gaussian_momentum_state, gaussian_probe};
    use statrs::distribution::{ContinuousCDF, Normal};

    fn config(g0: f64) -> AbmConfig {
        let object = gaussian_momentum_state(0.0, 1.0, 96, 1.0).unwrap();
        AbmConfig::new(
            1.0,
            2.0,
            g0,
            0.5,
            gaussian_probe(1.0, 1.0).unwrap(),
            object,
            1.0,
        )
        .unwrap()
    }

    fn momentum_bins() -> Vec<(f64, f64)> {
        let mut edges = vec![f64::NEG_INFINITY];
        edges.extend((-4..=4).map(|k| k as f64 * 1.5));
        edges.push(f64::INFINITY);
        edges.windows(2).map(|w| (w[0], w[1])).collect()
    }

    #[test]
    fn momentum_povm_axioms() {
        let povm = momentum_povm(&config(2.0), &momentum_bins()).unwrap();
        let ax = povm.axioms();
        assert!(ax.min_eigenvalue >= -1e-12);
        assert!(
            ax.normalization_defect <= 1e-8,
            "{}",
            ax.normalization_defect
        );
        let single = momentum_povm(&config(2.0), &[(f64::NEG_INFINITY, f64::INFINITY)]).unwrap();
        assert!(single.axioms().normalization_defect <= 1e-8);
        // additivity against a direct computation of the union
        let mut merged = momentum_bins();
        let union = (merged[3].0, merged[5].1);
        merged.splice(3..6, [union]);
        let coarse = momentum_povm(&config(2.0), &merged).unwrap();
        assert!(povm.merged(3..6).distance(&coarse.effects[3]) <= 1e-10);
    }

    #[test]
    fn half_line_effect_is_gaussian_cdf() {
        let cfg = config(3.0);
        let povm = momentum_povm(&cfg, &[(f64::NEG_INFINITY, 0.0), (0.0, f64::INFINITY)]).unwrap();
        let s = 1.0 / cfg.coupling();
        let normal = Normal::new(0.0, s).unwrap();
        let Effect::Diagonal(d) = &povm.effects[1] else {
            panic!()
        };
        for (i, v) in d.iter().enumerate() {
            let p = cfg.object.axis.value(i);
            assert!((v - normal.cdf(p)).abs() < 1e-10);
            // brute-force convolution on a fine grid
            let h = s / 200.0;
            let brute: f64 = (0..8000)
                .map(|k| -20.0 * s + (k as f64 + 0.5) * h)
                .filter(|q| p - q >= 0.0)
                .map(|q| {
                    (-q * q / (2.0 * s * s)).exp() / (s * (2.0 * std::f64::consts::PI).sqrt()) * h
                })
                .sum();
            assert!((v - brute).abs() < 1e-3);
        }
    }

    #[test]
    fn sharp_limit_approaches_projection() {
        let povm = momentum_povm(
            &config(2000.0),
            &[(f64::NEG_INFINITY, 0.0), (0.0, f64::INFINITY)],
        )
        .unwrap();
        let Effect::Diagonal(d) = &povm.effects[1] else {
            panic!()
        };
        let ax = povm.basis;
        for (i, v) in d.iter().enumerate() {
            let p = ax.value(i);
            if p.abs() > 0.1 {
                assert!((v - if p > 0.0 { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn overlapping_bins_rejected() {
        let err = momentum_povm(
            &config(1.0),
            &[(f64::NEG_INFINITY, 1.0), (0.0, f64::INFINITY)],
        );
        assert!(matches!(err, Err(TempusError::Partition(_))));
    }

    #[test]
    fn energy_paths_agree() {
        let cfg = config(1.5);
        let bins = vec![
            (0.0, 0.3),
            (0.3, 1.0),
            (1.0, 2.5),
            (2.5, 6.0),
            (6.0, f64::INFINITY),
        ];
        let a = energy_povm(&cfg, &bins).unwrap();
        let b = energy_povm_kernel(&cfg, &bins).unwrap();
        for (x, y) in a.effects.iter().zip(&b.effects) {
            assert!(x.distance(y) < 1e-6, "{}", x.distance(y));
        }
        let ax = a.axioms();
        assert!(ax.min_eigenvalue >= -1e-12 && ax.normalization_defect <= 1e-8);
    }

    #[test]
    fn asymmetric_probe_rejected_for_energy() {
        let probe = gaussian_momentum_state(0.5, 1.0, 256, 1.0).unwrap();
        let cfg = AbmConfig::new(1.0, 1.0, 1.0, 1.0, probe, config(1.0).object, 1.0).unwrap();
        assert!(matches!(
            energy_povm(&cfg, &[(0.0, f64::INFINITY)]),
            Err(TempusError::Precondition(_))
        ));
    }

    #[test]
    fn statistics_match_formulas() {
        for g0 in [0.5, 2.0, 10.0] {
            let st = energy_statistics(&config(g0)).unwrap();
            assert!(st.reports.iter().all(|r| r.pass), "{:?}", st.reports);
        }
    }

    #[test]
    fn doubling_coupling_quarters_distortion() {
        let a = energy_statistics(&config(2.0)).unwrap();
        let b = energy_statistics(&config(4.0)).unwrap();
        assert!((a.distortion / b.distortion - 4.0).abs() < 1e-10);
        assert!((a.distortion_quadrature / b.distortion_quadrature - 4.0).abs() < 1e-8);
    }

    #[test]
    fn narrow_object_variance_dominated_by_inaccuracy() {
        let object = gaussian_momentum_state(3.0, 0.01, 96, 1.0).unwrap();
        let cfg = AbmConfig::new(
            1.0,
            1.0,
            1.0,
            1.0,
            gaussian_probe(1.0, 1.0).unwrap(),
            object,
            1.0,
        )
        .unwrap();
        let st = energy_statistics(&cfg).unwrap();
        let inacc = st.variance - st.object_variance;
        assert!(inacc > 100.0 * st.object_variance);
        // Gaussian oracle: Var((p - q)^2/2) with q ~ N(0,1), p ~ N(3, 1e-4)
        let (mu, s2, t2) = (3.0_f64, 1e-4_f64, 1.0_f64);
        let v = s2 + t2;
        let exact = (2.0 * v * v + 4.0 * mu * mu * v) / 4.0;
        assert!((st.variance - exact).abs() < 1e-6 * exact);
    }
}
