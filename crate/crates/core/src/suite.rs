//! The verification suite: every relation in the crate evaluated on concrete
//! systems, grouped by theme.
//!
//! Each group returns its [`BoundReport`]s. Equalities and defect checks are
//! encoded as reports too, so a group passes iff all its asserted reports
//! pass. [`TAGS`] is the checklist of relations the suite must cover.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::Serialize;

use crate::abm::{
    conditional_state, confidence_function, coupling_sweep, energy_povm, energy_statistics,
    gaussian_momentum_state, gaussian_probe, kraus_completeness, loglog_slope, AbmConfig,
};
use crate::clock::{clock_check, clock_constant, ladder_state, EnergyDistribution, MAX_EPSILON};
use crate::dynamics::{
    decay_reference, grabowski_lifetime, mandelstam_tamm_check, property_lifetime,
    return_probability_curve, survival_curve, wigner_moments, DecayModel, SurvivalCurve,
};
use crate::hilbert::{fourier_pair, fourier_pair_centered, from_spectrum, moments, GridDft};
use crate::interference::{
    chopper_analysis, moshinsky_distribution, moshinsky_zeros, side_peaks, spectra, spectra_at,
    two_slit_momentum_amplitude, two_slit_state, ChopperConfig,
};
use crate::sampling::{complex_normal, random_hermitian, random_state, rng_for};
use crate::timepovm::{
    bounded_spectrum, check_covariance, free_evolve, time_statistics, FallingParticle, FreeArrival,
    OscillatorPhase,
};
use crate::widths::{
    check_decay_equivalent_width, check_equivalent_width_identity, check_hu_lifetime,
    check_hu_relation, check_overall_width_relation, equivalent_width, hu_rhs, HALF_TIME_RHO,
};
use crate::{Axis, AxisKind, BoundReport, GridState, HermitianOperator, Result, TempusError, C64};

/// Relations the suite must exercise with at least one asserted report.
pub const TAGS: &[&str] = &[
    "p-confid",
    "p-pov",
    "p-inacc",
    "p-reprod",
    "H-pov",
    "H-val",
    "H-var",
    "prep-ur",
    "MS-tau",
    "MT-ur",
    "MT-tau-pos",
    "pt",
    "MT-p",
    "MT-lifetime",
    "Grabo-tau",
    "Grabo-lifetime",
    "Wig-ft",
    "Wig-moments",
    "Wig-ur",
    "ft-expon",
    "f-til-E-Lor",
    "life-line-ur",
    "Wig-lifetime",
    "Wig-life-ur",
    "BM-equiv-width",
    "equiv-width-ur",
    "decay-equiv-width-ur",
    "HU-ove-width-ur",
    "HU-trans-width-ur",
    "HU-lifetime-ur",
    "MT-clock-ur",
    "HU-clock-ur",
    "time-cov",
    "time-var",
    "pov-ur",
    "H-g",
    "T-g",
    "Weyl",
    "H-cov2",
    "T-cov",
    "time-povm",
    "osc-phase",
    "GW-comm",
    "F-free",
    "Tc-spec",
    "BF-bound",
    "bs-var",
    "chopper",
    "two-slit",
];

/// Group ids with a one-line title, in run order.
pub const GROUPS: [(&str, &str); 11] = [
    ("mt", "characteristic time and the Mandelstam-Tamm relation"),
    ("survival", "survival probability and the cosine bound"),
    (
        "lifetimes",
        "lifetimes, exponential decay and Wigner moments",
    ),
    ("equivalent-width", "equivalent widths"),
    ("hu-widths", "overall and translation widths"),
    ("abm", "impulsive energy measurement"),
    ("time-povm", "covariant event-time observables"),
    ("arrival", "free arrival time"),
    ("clock", "clock resolution"),
    ("chopper", "chopped decay spectra and two slits"),
    ("moshinsky", "shutter preparation time"),
];

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Group {
    pub id: String,
    pub title: String,
    pub reports: Vec<BoundReport>,
}

impl Group {
    pub fn pass(&self) -> bool {
        self.reports.iter().filter(|r| r.asserted).all(|r| r.pass)
    }

    pub fn failures(&self) -> Vec<&BoundReport> {
        self.reports
            .iter()
            .filter(|r| r.asserted && !r.pass)
            .collect()
    }
}

pub fn run_group(id: &str, seed: u64) -> Result<Group> {
    let title = GROUPS
        .iter()
        .find(|g| g.0 == id)
        .map(|g| g.1)
        .ok_or_else(|| TempusError::Parameter(format!("unknown suite group {id}")))?;
    let reports = match id {
        "mt" => mt(seed)?,
        "survival" => survival(seed)?,
        "lifetimes" => lifetimes()?,
        "equivalent-width" => equivalent_widths()?,
        "hu-widths" => hu_widths()?,
        "abm" => abm()?,
        "time-povm" => time_povm(seed)?,
        "arrival" => arrival()?,
        "clock" => clock(seed)?,
        "chopper" => chopper()?,
        _ => moshinsky()?,
    };
    Ok(Group {
        id: id.into(),
        title: title.into(),
        reports,
    })
}

pub fn run_all(seed: u64) -> Result<Vec<Group>> {
    GROUPS.iter().map(|g| run_group(g.0, seed)).collect()
}

/// Tags in [`TAGS`] without an asserted report in `groups`.
pub fn missing_tags(groups: &[Group]) -> Vec<&'static str> {
    TAGS.iter()
        .copied()
        .filter(|t| {
            !groups
                .iter()
                .flat_map(|g| &g.reports)
                .any(|r| r.asserted && r.tag == *t)
        })
        .collect()
}

/// `value <= tol`.
fn defect(tag: &str, value: f64, tol: f64) -> BoundReport {
    BoundReport::new(tag, -value, 0.0, tol)
}

fn flag(tag: &str, ok: bool) -> BoundReport {
    BoundReport::new(tag, if ok { 1.0 } else { 0.0 }, 1.0, 0.0)
}

/// Report with the smallest relative slack.
fn worst(reports: impl IntoIterator<Item = BoundReport>) -> Option<BoundReport> {
    reports
        .into_iter()
        .min_by(|a, b| a.relative_slack().total_cmp(&b.relative_slack()))
}

fn push_worst(out: &mut Vec<BoundReport>, tag: &str, reports: Vec<BoundReport>) -> Result<()> {
    out.push(worst(reports).ok_or_else(|| TempusError::Validation(format!("no {tag} reports")))?);
    Ok(())
}

fn two_level_mt() -> Result<(HermitianOperator, HermitianOperator, GridState)> {
    let ax = Axis::fock(2)?;
    let dh = 0.7;
    let h = HermitianOperator::diagonal(ax, vec![dh, -dh])?;
    let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    let sx = HermitianOperator::dense(
        ax,
        nalgebra::DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]),
    )?;
    let psi = GridState::new(
        ax,
        vec![C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, -FRAC_1_SQRT_2)],
        1.0,
    )?;
    Ok((h, sx, psi))
}

fn mt(seed: u64) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    let mut mts = Vec::new();
    let mut derivative = 0.0f64;
    for i in 0..100u64 {
        let mut r = rng_for(seed, i);
        let dim = 2 + (i as usize % 9);
        let h = random_hermitian(&mut r, dim)?;
        let a = random_hermitian(&mut r, dim)?;
        let psi = random_state(&mut r, dim, 1.0)?;
        let (c, rep) = mandelstam_tamm_check(&a, &psi, &h)?;
        derivative = derivative.max((c.derivative - c.derivative_fd).abs() / c.derivative.abs());
        mts.push(rep);
    }
    push_worst(&mut out, "MT-ur", mts)?;
    out.push(defect("MS-tau", derivative, 1e-5));

    let (h, sx, psi) = two_level_mt()?;
    let (_, r) = mandelstam_tamm_check(&sx, &psi, &h)?;
    out.push(BoundReport::equality("MT-ur", r.lhs, r.rhs, 1e-8));

    // free packet: tau(Q) = Delta Q / |<P>/m|
    let (m, p0) = (1.5, 2.0);
    let ax = Axis::centered(AxisKind::Position, 0.05, 1024)?;
    let psi = GridState::gaussian(ax, 1.0, -3.0, 1.2, p0)?;
    let h = HermitianOperator::from_momentum_fn(ax, 1.0, |p| p * p / (2.0 * m))?;
    let q = HermitianOperator::multiplication(ax, |x| x)?;
    let (c, r) = mandelstam_tamm_check(&q, &psi, &h)?;
    let (_, var_q) = moments(&q, &psi)?;
    out.push(BoundReport::equality(
        "MT-tau-pos",
        c.tau,
        var_q.sqrt() * m / p0,
        1e-8 * c.tau,
    ));
    out.push(r);
    Ok(out)
}

fn survival(seed: u64) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    let mut cos = Vec::new();
    for i in 0..50u64 {
        let mut r = rng_for(seed ^ 0x5eed, i);
        let dim = 2 + (i as usize % 9);
        let h = random_hermitian(&mut r, dim)?;
        let psi = random_state(&mut r, dim, 1.0)?;
        let (_, var) = moments(&h, &psi)?;
        let ax = Axis::linspace(AxisKind::Time, 0.0, PI / (2.0 * var.sqrt()), 201)?;
        let c = return_probability_curve(&psi, &h, ax)?;
        cos.push(
            c.cosine_bound
                .ok_or_else(|| TempusError::Validation("no cosine bound".into()))?,
        );
    }
    push_worst(&mut out, "MT-p", cos)?;

    let dh = 0.9;
    let ax2 = Axis::fock(2)?;
    let h = HermitianOperator::diagonal(ax2, vec![0.3 - dh, 0.3 + dh])?;
    let psi = GridState::new(ax2, vec![C64::new(FRAC_1_SQRT_2, 0.0); 2], 1.0)?;
    let ax = Axis::linspace(AxisKind::Time, 0.0, PI / (2.0 * dh), 2001)?;
    let c = return_probability_curve(&psi, &h, ax)?;
    let gap = c
        .p_values
        .iter()
        .enumerate()
        .map(|(i, p)| (p - (ax.value(i) * dh).cos().powi(2)).abs())
        .fold(0.0, f64::max);
    out.push(defect("MT-p", gap, 1e-8));
    let proj = HermitianOperator::dense(
        ax2,
        nalgebra::DMatrix::from_element(2, 2, C64::new(0.5, 0.0)),
    )?;
    let c2 = survival_curve(&psi, &proj, &h, ax)?;
    let d = c
        .p_values
        .iter()
        .zip(&c2.p_values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    out.push(defect("pt", d, 1e-12));
    Ok(out)
}

fn energy_state(f: impl Fn(f64) -> f64) -> Result<(GridState, HermitianOperator)> {
    let e = Axis::centered(AxisKind::Energy, 0.01, 1201)?;
    let h = HermitianOperator::multiplication(e, |x| x)?;
    Ok((GridState::from_fn(e, 1.0, |x| C64::new(f(x), 0.0))?, h))
}

fn lifetimes() -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    let s = 0.8;
    let states = [
        energy_state(|x| (-x * x / (4.0 * s * s)).exp())?,
        energy_state(|x| (-(x - 1.0).powi(2)).exp() + 0.6 * (-(x + 1.2).powi(2) / 0.5).exp())?,
    ];
    let tax = Axis::linspace(AxisKind::Time, 0.0, 8.0, 801)?;
    for (k, (psi, h)) in states.iter().enumerate() {
        let c = return_probability_curve(psi, h, tax)?;
        out.push(property_lifetime(&c)?.1);
        let g = grabowski_lifetime(&c)?;
        if k == 0 {
            out.push(BoundReport::equality(
                "Grabo-tau",
                g.tau0,
                PI.sqrt() / (2.0 * s),
                1e-6,
            ));
        }
        out.push(g.report);
    }

    let model = DecayModel::new(1.0, 0.0, 1.0)?;
    let r = decay_reference(&model)?;
    out.extend([r.identity, r.transform, r.half_width]);
    // p(t) = exp(-Gamma t / hbar) reaches 1/2 at hbar ln2 / Gamma
    let ax = Axis::linspace(AxisKind::Time, 0.0, 6.0, 6001)?;
    let p = ax.values().iter().map(|t| model.f(*t).norm_sqr()).collect();
    let (tau_p, _) = property_lifetime(&SurvivalCurve::from_samples(ax, p, f64::INFINITY, 1.0)?)?;
    out.push(BoundReport::equality("ft-expon", tau_p, 2f64.ln(), 1e-6));

    // transform convention on e^{-t^2/2}: f~(E) = (2 pi)^{-1/2} e^{-E^2/2}
    let g = GridState::from_fn(Axis::centered(AxisKind::Time, 0.05, 1024)?, 1.0, |t| {
        C64::new((-t * t / 2.0).exp(), 0.0)
    })?;
    let pair = fourier_pair(&g)?;
    let d = pair
        .f_tilde
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let e = pair.energy_axis.value(i);
            (z - C64::new((-e * e / 2.0).exp() / (2.0 * PI).sqrt(), 0.0)).norm()
        })
        .fold(0.0, f64::max);
    out.push(defect("Wig-ft", d, 1e-10));

    let model = DecayModel::new(1.0, 2000.0, 1.0)?;
    let tax = Axis::centered(AxisKind::Time, 0.002, 1 << 20)?;
    let f = GridState::from_fn(tax, 1.0, |t| model.f(t))?;
    let w = wigner_moments(&fourier_pair_centered(&f, model.e0, 1e-8)?)?;
    out.push(BoundReport::equality("Wig-moments", w.delta_t, 1.0, 1e-5));
    out.push(BoundReport::equality("Wig-lifetime", w.delta_e, 0.5, 2e-3));
    let mut life = w.report.clone();
    life.tag = "Wig-life-ur".into();
    out.push(life);

    let e0 = 5000.0;
    let tax = Axis::centered(AxisKind::Time, 0.01, 4096)?;
    let f = GridState::from_fn(tax, 1.0, |t| {
        C64::from_polar((-(t - 10.0) * (t - 10.0) / 2.0).exp(), -(t * e0))
    })?;
    out.push(wigner_moments(&fourier_pair_centered(&f, e0, 1e-8)?)?.report);
    Ok(out)
}

fn equivalent_widths() -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    let ax = Axis::centered(AxisKind::Time, 0.02, 8192)?;
    let sech = |t: f64| 1.0 / t.cosh();
    let fns: [Box<dyn Fn(f64) -> C64>; 10] = [
        Box::new(|t| C64::new((-t * t / 2.0).exp(), 0.0)),
        Box::new(|t| C64::new((-(t - 0.3).powi(2) / 0.5).exp(), 0.0)),
        Box::new(|t| C64::from_polar((-t * t / 3.0).exp(), 1.5 * t)),
        Box::new(|t| (C64::new(-0.5, 0.25) * t * t).exp()),
        Box::new(move |t| C64::new(sech(t), 0.0)),
        Box::new(move |t| C64::new(sech(t).powi(2), 0.0)),
        Box::new(|t| C64::new((-t * t / 2.0).exp() * (2.0 * t).cos(), 0.0)),
        Box::new(|t| C64::new((1.0 + t * t) * (-t * t).exp(), 0.0)),
        Box::new(|t| {
            C64::new(
                (-(t - 1.0).powi(2)).exp() + 0.5 * (-(t + 2.0).powi(2) / 2.0).exp(),
                0.0,
            )
        }),
        Box::new(|t| C64::new((-t.powi(4)).exp(), 0.0)),
    ];
    let mut ids = Vec::new();
    for f in fns.iter() {
        let phi = GridState::from_fn(ax, 1.0, f)?;
        ids.push(check_equivalent_width_identity(&phi)?.2);
    }
    push_worst(&mut out, "equiv-width-ur", ids)?;

    let r = decay_reference(&DecayModel::new(1.0, 0.0, 1.0)?)?;
    let d = check_decay_equivalent_width(&r.amplitude)?;
    out.push(BoundReport::equality(
        "decay-equiv-width-ur",
        d.lhs,
        d.rhs,
        1e-3 * d.rhs,
    ));

    let sigma = 0.8;
    let x = Axis::centered(AxisKind::Position, 0.01, 4001)?;
    let phi: Vec<C64> = x
        .values()
        .iter()
        .map(|x| C64::new((-x * x / (2.0 * sigma * sigma)).exp(), 0.0))
        .collect();
    let w = equivalent_width(&phi, &x, 0.0)?;
    out.push(BoundReport::equality(
        "BM-equiv-width",
        w.re,
        sigma * (2.0 * PI).sqrt(),
        1e-10,
    ));
    Ok(out)
}

fn hu_widths() -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    let r = decay_reference(&DecayModel::new(1.0, 0.0, 1.0)?)?;
    out.push(check_hu_lifetime(&r.amplitude)?.2);
    out.push(BoundReport::equality(
        "HU-lifetime-ur",
        hu_rhs(0.9, HALF_TIME_RHO, 1.0)?,
        0.9,
        0.05,
    ));

    // autocorrelation amplitudes of Gaussian and two-peak energy distributions
    let e = Axis::centered(AxisKind::Energy, 0.01, 4096)?;
    let dists: [Box<dyn Fn(f64) -> f64>; 2] = [
        Box::new(|x| (-x * x / 2.0).exp()),
        Box::new(|x| (-(x - 2.0).powi(2) / 0.5).exp() + 0.7 * (-(x + 1.0).powi(2) / 0.3).exp()),
    ];
    for d in dists.iter() {
        let w: Vec<f64> = e.values().iter().map(|x| d(*x)).collect();
        let total: f64 = w.iter().sum::<f64>() * e.step;
        let f = from_spectrum(e, w.iter().map(|v| C64::new(v / total, 0.0)).collect(), 1.0)?;
        for (alpha, rho) in [(0.9, HALF_TIME_RHO), (0.75, 0.5), (0.95, 0.1)] {
            out.push(check_hu_relation(&f, alpha, rho)?);
        }
    }

    let t = Axis::centered(AxisKind::Time, 96.0 / 4096.0, 4096)?;
    let gauss = GridState::gaussian(t, 1.0, 0.0, 1.0, 0.0)?;
    let two = GridState::from_fn(t, 1.0, |x| {
        C64::new((-(x - 1.5).powi(2) / 2.0).exp(), 0.0)
            + C64::from_polar(0.6, 1.0) * (-(x + 1.5).powi(2) / 2.0).exp()
    })?
    .normalized()?;
    for chi in [&gauss, &two] {
        for alpha in [0.6, 0.75, 0.9] {
            out.push(check_overall_width_relation(chi, alpha)?);
        }
    }
    Ok(out)
}

fn abm() -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    let object = gaussian_momentum_state(5.0, 0.01, 96, 1.0)?;
    let cfg = AbmConfig::new(1.0, 1.0, 1.0, 0.01, gaussian_probe(1.0, 1.0)?, object, 1.0)?;
    let g0: Vec<f64> = (0..=6).map(|k| 10f64.powf(0.5 * k as f64)).collect();
    let rows = coupling_sweep(&cfg, &g0)?;
    let col = |f: &dyn Fn(&crate::abm::SweepRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    out.push(BoundReport::equality(
        "H-val",
        loglog_slope(&g0, &col(&|r| r.distortion))?,
        -2.0,
        0.01,
    ));
    out.push(BoundReport::equality(
        "H-var",
        loglog_slope(&g0, &col(&|r| r.cross_term))?,
        -2.0,
        0.01,
    ));
    out.push(BoundReport::equality(
        "H-var",
        loglog_slope(&g0, &col(&|r| r.probe_term))?,
        -4.0,
        0.02,
    ));
    out.push(flag("H-var", rows.iter().all(|r| r.statistics_pass)));
    out.push(BoundReport::new(
        "p-reprod",
        col(&|r| r.reproducibility).into_iter().fold(1.0, f64::min),
        0.99,
        0.0,
    ));
    out.push(BoundReport::new(
        "p-pov",
        col(&|r| r.min_eigenvalue).into_iter().fold(0.0, f64::min),
        0.0,
        1e-12,
    ));
    out.push(defect(
        "p-pov",
        col(&|r| r.normalization_defect)
            .into_iter()
            .fold(0.0, f64::max),
        1e-8,
    ));

    let c = cfg.with_g0(10.0)?;
    out.push(defect("p-pov", kraus_completeness(&c)?, 1e-8));
    let cf = confidence_function(&c)?;
    out.push(BoundReport::equality("p-confid", cf.integral(), 1.0, 1e-9));
    out.push(BoundReport::equality(
        "p-inacc",
        cf.std(),
        1.0 / c.coupling(),
        1e-9 / c.coupling(),
    ));
    out.push(BoundReport::equality(
        "p-inacc",
        cf.variance_quadrature,
        cf.variance,
        1e-6 * cf.variance,
    ));
    let (p0, _) = c.object_momentum();
    let cond = conditional_state(&c, (p0 - 2.0 * cf.std(), p0 + 2.0 * cf.std()))?;
    out.push(defect("p-reprod", cond.diagonal_defect, 1e-8));
    let emax = 6.0f64.powi(2) / 2.0;
    let bins: Vec<(f64, f64)> = (0..8)
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
    let ax = energy_povm(&c, &bins)?.axioms();
    out.push(BoundReport::new("H-pov", ax.min_eigenvalue, 0.0, 1e-12));
    out.push(defect("H-pov", ax.normalization_defect, 1e-8));
    out.extend(energy_statistics(&c)?.reports);
    Ok(out)
}

fn time_povm(seed: u64) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    let (m, g) = (1.0, 2.0);
    let fp = FallingParticle::new(m, g, Axis::centered(AxisKind::Momentum, 0.05, 256)?, 1.0)?;
    let packet =
        |p0: f64, s: f64| GridState::gaussian(fp.axis, 1.0, p0, s * std::f64::consts::SQRT_2, 0.0);
    let mean_p = |s: &GridState| {
        s.density()
            .iter()
            .enumerate()
            .map(|(i, w)| w * s.axis.value(i))
            .sum::<f64>()
            * s.axis.step
    };

    let psi = packet(-1.0, 0.4)?;
    let a = fp.propagate(&psi, 0.7)?;
    let b = fp.propagate_split_step(&psi, 0.7, 50)?;
    out.push(defect("H-g", (a.inner(&b)?.norm() - 1.0).abs(), 1e-9));
    out.push(BoundReport::equality(
        "T-g",
        mean_p(&a) - mean_p(&psi),
        m * g * 0.7,
        1e-9,
    ));

    let psi = packet(0.0, 0.5)?;
    out.push(defect(
        "Weyl",
        fp.weyl_defect(&psi, &[-0.3, 0.2, 0.5], &[-0.4, 0.1, 0.3])?,
        1e-6,
    ));
    let drift = fp.time_drift(&packet(1.0, 0.4)?, &[0.0, 0.2, 0.4, 0.6])?;
    out.push(BoundReport::equality("T-cov", drift.slope.abs(), 1.0, 1e-9));

    // e^{ihT/hbar} lowers <H> by h
    let hd = fp.hamiltonian()?;
    let (e_before, _) = moments(&hd, &psi)?;
    let shifted = GridState::new(fp.axis, fp.energy_shift(&psi.amplitudes, 0.35), 1.0)?;
    let (e_after, _) = moments(&hd, &shifted)?;
    out.push(BoundReport::equality(
        "H-cov2",
        e_before - e_after,
        0.35,
        1e-8,
    ));

    let small = FallingParticle::new(m, g, Axis::centered(AxisKind::Momentum, 0.05, 128)?, 1.0)?;
    let povm = small.povm(&small.uniform_bins(4))?;
    let w = 4.0 * small.cell_time();
    let cov = small.covariance(&povm, &[w, 2.0 * w, -3.0 * w])?;
    out.push(defect("time-cov", cov.max_defect, 1e-8));
    out.push(flag("time-cov", cov.compared > 0 && !cov.interpolated));

    let coarse = FallingParticle::new(m, g, Axis::centered(AxisKind::Momentum, 0.1, 128)?, 1.0)?;
    let (p0, s) = (0.5, 0.6);
    let psi = GridState::gaussian(coarse.axis, 1.0, p0, s * std::f64::consts::SQRT_2, 0.0)?;
    let st = time_statistics(
        &coarse.povm(&coarse.uniform_bins(1))?,
        &psi,
        &coarse.hamiltonian()?,
    )?;
    out.push(BoundReport::equality(
        "time-var",
        st.delta_t,
        s / (m * g),
        1e-10,
    ));
    out.push(st.uncertainty);

    let osc = OscillatorPhase::new(16)?;
    let ax = osc.povm(24)?.axioms();
    out.push(BoundReport::new("osc-phase", ax.min_eigenvalue, 0.0, 1e-10));
    out.push(defect("osc-phase", ax.normalization_defect, 1e-8));
    let p = osc.povm(16)?;
    let w = 2.0 * PI / 16.0;
    out.push(defect(
        "osc-phase",
        check_covariance(&p, &osc.hamiltonian, 1.0, &[w, 5.0 * w, -3.0 * w, 17.0 * w])?.max_defect,
        1e-8,
    ));
    let mut d = Vec::new();
    for n in [16usize, 32, 64] {
        let o = OscillatorPhase::new(n)?;
        d.push(o.commutator_defect(&o.test_vector()?)?);
    }
    // strictly decreasing: smallest step down must be positive
    let step = d
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::INFINITY, f64::min);
    out.push(BoundReport::new("GW-comm", step, 0.0, 0.0));

    let (bs, povm, _, r) = bounded_spectrum(128, C64::from_polar(1.0, 0.7), 128, 200, seed)?;
    let ax = povm.axioms();
    out.push(BoundReport::new("time-povm", ax.min_eigenvalue, 0.0, 1e-10));
    out.push(defect("time-povm", ax.normalization_defect, 1e-8));
    let w = (povm.domain.1 - povm.domain.0) / povm.len() as f64;
    out.push(defect(
        "time-povm",
        check_covariance(&povm, &bs.hamiltonian, 1.0, &[w, 7.0 * w, -20.0 * w])?.max_defect,
        1e-8,
    ));
    out.push(BoundReport::new(
        "Tc-spec",
        -r.spectrum.max_defect,
        -r.spectrum.bound,
        0.0,
    ));
    out.push(defect("Tc-spec", r.spectrum.eigenvector_residual, 1e-9));
    out.push(BoundReport::new(
        "Tc-spec",
        -r.covariance.dirichlet_defect,
        -1.25 * r.covariance.dirichlet_estimate,
        0.0,
    ));
    out.push(defect("BF-bound", r.bf_distance, 1e-6));
    out.push(r.variance);
    out.push(r.interior_uncertainty);
    Ok(out)
}

fn arrival() -> Result<Vec<BoundReport>> {
    let (m, p0, x0) = (1.0, 10.0, -20.0);
    let axis = gaussian_momentum_state(p0, 0.5, 256, 1.0)?.axis;
    let psi = GridState::gaussian(axis, 1.0, p0, 0.5 * std::f64::consts::SQRT_2, -x0)?;
    let f = FreeArrival::new(&psi, m)?;
    let (p, mean, _) = f.window_moments(0.0, 4.0)?;
    let classical = -x0 * m / p0;
    let s = 0.37;
    let g = FreeArrival::new(&free_evolve(&psi, s, m)?, m)?;
    let edges: Vec<f64> = (0..=40).map(|k| 0.5 + 0.075 * k as f64).collect();
    let shifted: Vec<f64> = edges.iter().map(|t| t + s).collect();
    let dist: f64 = f
        .distribution(&shifted)
        .iter()
        .zip(&g.distribution(&edges))
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok(vec![
        BoundReport::equality("F-free", p, 1.0, 1e-3),
        BoundReport::equality("F-free", mean, classical, 0.02 * classical),
        defect("F-free", dist, 1e-4),
        flag("F-free", !f.is_slow()),
    ])
}

fn clock(seed: u64) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for n in [4usize, 8, 16] {
        let omega = 2.0;
        let (psi, h) = ladder_state(n, omega, 1.0)?;
        let period = 2.0 * PI / omega;
        let r = clock_check(&psi, &h, 0.0, period)?;
        out.push(BoundReport::equality(
            "MT-clock-ur",
            r.delta_t,
            period / n as f64,
            1e-9,
        ));
        out.extend(r.reports);
    }
    let axis = Axis::fock(10)?;
    let h = HermitianOperator::multiplication(axis, |k| k)?;
    let mut reports = Vec::new();
    for i in 0..100u64 {
        let mut r = rng_for(seed ^ 0xc10c, i);
        let amps = (0..10).map(|_| complex_normal(&mut r)).collect();
        match clock_check(&GridState::new(axis, amps, 1.0)?, &h, MAX_EPSILON, 2.0 * PI) {
            Ok(rep) => reports.extend(rep.reports),
            Err(TempusError::NotAttained { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    for tag in ["MT-clock-ur", "HU-clock-ur"] {
        let these: Vec<BoundReport> = reports.iter().filter(|r| r.tag == tag).cloned().collect();
        push_worst(&mut out, tag, these)?;
    }
    let e = Axis::linspace(AxisKind::Energy, -8.0, 8.0, 801)?;
    let density: Vec<f64> = e.values().iter().map(|x| (-0.5 * x * x).exp()).collect();
    let d = EnergyDistribution::Grid { axis: e, density };
    for alpha in [0.5, 1.0] {
        out.push(BoundReport::equality(
            "HU-clock-ur",
            clock_constant(&d, alpha, 0.0)?,
            0.0,
            0.0,
        ));
    }
    Ok(out)
}

fn chopper() -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    let cfg = ChopperConfig::new(1.0, 0.0, 0.2, 1.0, None)?;
    let s = spectra(&cfg, cfg.default_axis()?, 2)?;
    let a = chopper_analysis(&cfg, &s, 2)?;
    out.push(flag("chopper", a.central_peak));
    for p in &a.side_peaks {
        out.push(flag("chopper", p.found.is_some()));
        out.push(BoundReport::new("chopper", p.coherent, p.objective, 0.0));
    }
    out.push(BoundReport::new("chopper", a.carrier_excess, 0.0, 0.0));
    out.push(flag("chopper", a.objective_unimodal));
    out.push(defect("chopper", a.plancherel_defect, 1e-6));
    out.push(defect("chopper", s.t0_refinement, 1e-4));
    out.push(a.hu.chopped.clone());
    out.push(a.hu.unchopped.clone());
    out.push(BoundReport::new(
        "chopper",
        a.hu.chopped_width,
        a.hu.unchopped_width,
        0.0,
    ));

    let open = ChopperConfig::new(1.0, 0.0, 1.0, 1.0, None)?;
    let (c, o) = spectra_at(&open, open.axis(20.0, 801)?, 0.0);
    let mut worst = 0.0f64;
    for i in 0..c.axis.count {
        let u = c.axis.value(i);
        let l = 1.0 / (0.25 + u * u);
        worst = worst
            .max((c.intensity[i] - l).abs() / l)
            .max((o.intensity[i] - l).abs() / l);
    }
    out.push(defect("chopper", worst, 1e-6));

    let mut found = true;
    for t_chop in [0.8, 1.0, 1.25, 1.5, 2.0] {
        let c = ChopperConfig::new(1.0, 0.0, 0.15 * t_chop, t_chop, None)?;
        let s = spectra(&c, c.default_axis()?, 2)?;
        found &= side_peaks(&s, t_chop, 2).iter().all(|p| p.found.is_some());
    }
    out.push(flag("chopper", found));

    let (a, big_a, hbar, h) = (0.5, 2.0, 1.0, 0.01);
    let c = Axis::centered(AxisKind::Position, h, 4096)?;
    let axis = Axis::new(AxisKind::Position, c.start + 0.5 * h, h, 4096)?;
    let dft = GridDft::new(axis, hbar)?;
    let phi = dft.forward(&two_slit_state(axis, a, big_a, hbar)?.amplitudes);
    let mut worst = 0.0f64;
    for (k, z) in phi.iter().enumerate() {
        let p = dft.p_axis.value(k);
        if p.abs() <= 40.0 {
            let u = 0.5 * p * h / hbar;
            let cell = if u == 0.0 { 1.0 } else { u.sin() / u };
            worst = worst.max(
                (z.norm() - (two_slit_momentum_amplitude(p, a, big_a, hbar) / cell).abs()).abs(),
            );
        }
    }
    out.push(defect("two-slit", worst, 1e-10));
    Ok(out)
}

fn moshinsky() -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    let e0 = 50.0;
    let grid = Axis::linspace(AxisKind::Energy, 0.01, 200.0, 40001)?;
    let times = [0.5, 1.0, 2.0, 4.0, 8.0];
    let mut widths = Vec::new();
    for t in times {
        let m = moshinsky_distribution(e0, t, grid, 1.0)?;
        let located = m.located_zeros(&moshinsky_zeros(e0, t, 1.0, 4));
        out.push(flag("prep-ur", located.iter().all(|z| z.1.is_some())));
        widths.push(m.delta_e);
        out.push(m.report);
    }
    for w in widths.windows(2) {
        out.push(BoundReport::equality("prep-ur", w[1] / w[0], 0.5, 0.025));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checklist_has_no_duplicates() {
        let mut t = TAGS.to_vec();
        t.sort();
        t.dedup();
        assert_eq!(t.len(), TAGS.len());
    }

    #[test]
    fn unknown_group_rejected() {
        assert!(matches!(
            run_group("nope", 1),
            Err(TempusError::Parameter(_))
        ));
    }

    #[test]
    fn small_groups_pass() {
        for id in ["mt", "survival", "arrival"] {
            let g = run_group(id, DEFAULT_SEED).unwrap();
            assert!(g.pass(), "{id}: {:?}", g.failures());
        }
    }
}
