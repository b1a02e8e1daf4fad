//! The experiment catalog.

use std::f64::consts::PI;

use tempus_core::abm::{
    confidence_function, coupling_sweep, energy_povm, energy_statistics, gaussian_momentum_state,
    gaussian_probe, AbmConfig,
};
use tempus_core::clock::{clock_check, clock_constant_curve, ladder_state, EnergyDistribution};
use tempus_core::dynamics::{
    decay_reference, grabowski_lifetime, property_lifetime, return_probability_curve, DecayModel,
    SurvivalCurve,
};
use tempus_core::interference::{
    chopper_analysis, moshinsky_distribution, moshinsky_zeros, spectra, ChopperConfig, HBAR_EV_S,
};
use tempus_core::sampling::{random_hermitian, random_state, rng_for};
use tempus_core::timepovm::{
    bounded_spectrum, check_covariance, time_statistics, FallingParticle, FreeArrival,
    OscillatorPhase,
};
use tempus_core::widths::{
    check_decay_equivalent_width, check_equivalent_width_identity, check_hu_lifetime,
    overall_product,
};
use tempus_core::{
    dynamics, Axis, AxisKind, BoundReport, GridState, HermitianOperator, Result, C64,
};

use crate::params::{count, real, ParamSpec, Params};

/// Columns of floats.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

/// What one run produces: data tables, one summary row, and the reports.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Output {
    pub tables: Vec<Table>,
    pub summary: Vec<(String, f64)>,
    pub reports: Vec<BoundReport>,
}

impl Output {
    fn summary(&mut self, key: &str, v: f64) {
        self.summary.push((key.into(), v));
    }
}

pub struct Experiment {
    pub name: &'static str,
    pub about: &'static str,
    /// Report tags the experiment produces.
    pub anchors: &'static [&'static str],
    pub params: &'static [ParamSpec],
    pub run: fn(&Params) -> Result<Output>,
}

pub const CATALOG: &[Experiment] = &[
    Experiment {
        name: "mt",
        about: "characteristic time of random observables in random finite systems",
        anchors: &["MT-ur", "MS-tau"],
        params: &[
            count("dim", "4", "Hilbert-space dimension"),
            count("count", "100", "number of random systems"),
        ],
        run: mt,
    },
    Experiment {
        name: "survival",
        about: "return probability of a Gaussian energy state, cosine bound and lifetimes",
        anchors: &["MT-p", "MT-lifetime", "Grabo-tau", "Grabo-lifetime"],
        params: &[
            real("sigma", "0.8", "energy spread of the state"),
            real("horizon", "8", "time window"),
            count("points", "801", "time samples"),
        ],
        run: survival,
    },
    Experiment {
        name: "decay",
        about: "exponential decay: lifetime-linewidth, Lorentzian line and width relations",
        anchors: &[
            "ft-expon",
            "f-til-E-Lor",
            "life-line-ur",
            "HU-lifetime-ur",
            "decay-equiv-width-ur",
        ],
        params: &[
            real("tau", "1", "lifetime"),
            real("hbar", "1", "reduced Planck constant in the chosen units"),
        ],
        run: decay,
    },
    Experiment {
        name: "widths",
        about: "equivalent-width identity and overall-width product of a Gaussian signal",
        anchors: &["equiv-width-ur", "HU-ove-width-ur"],
        params: &[
            real("sigma", "1", "Gaussian amplitude width"),
            count("points", "4096", "time samples"),
        ],
        run: widths,
    },
    Experiment {
        name: "abm",
        about: "impulsive momentum-coupled energy measurement",
        anchors: &[
            "p-confid", "p-pov", "p-inacc", "p-reprod", "H-pov", "H-val", "H-var",
        ],
        params: &[
            real("g0", "10", "coupling strength"),
            real("dt", "0.01", "coupling duration"),
            real("m", "1", "object mass"),
            real("big_m", "1", "probe mass"),
            real("probe_sigma", "1", "probe momentum spread"),
            real("p0", "5", "object mean momentum"),
            real("sigma", "0.01", "object momentum spread"),
            count("points", "96", "object grid points"),
        ],
        run: abm,
    },
    Experiment {
        name: "falling",
        about: "canonical time of a particle in a uniform field",
        anchors: &["H-g", "T-g", "T-cov", "Weyl", "time-var", "pov-ur"],
        params: &[
            real("m", "1", "mass"),
            real("g", "2", "field strength"),
            real("p0", "0.5", "mean momentum"),
            real("sigma", "0.6", "momentum spread"),
            real("dp", "0.1", "momentum step"),
            count("points", "128", "momentum grid points"),
        ],
        run: falling,
    },
    Experiment {
        name: "oscillator",
        about: "phase POVM of a truncated oscillator and its first-moment operator",
        anchors: &["osc-phase", "GW-comm"],
        params: &[
            count("nmax", "32", "highest Fock level"),
            count("bins", "48", "phase bins"),
        ],
        run: oscillator,
    },
    Experiment {
        name: "bounded",
        about: "covariant time POVM for a bounded equally spaced spectrum",
        anchors: &["time-povm", "Tc-spec", "BF-bound", "bs-var", "pov-ur"],
        params: &[
            count("n", "128", "number of levels"),
            real("twist", "0.7", "phase arg(c) of the boundary condition"),
            count("bins", "128", "time bins"),
            count("states", "200", "random states in the variance scan"),
        ],
        run: bounded,
    },
    Experiment {
        name: "arrival",
        about: "arrival-time distribution of a free Gaussian packet",
        anchors: &["F-free"],
        params: &[
            real("m", "1", "mass"),
            real("p0", "10", "mean momentum"),
            real("sigma", "0.5", "momentum spread"),
            real("x0", "-20", "initial position"),
            real("t_min", "0", "window start"),
            real("t_max", "4", "window end"),
            count("bins", "80", "time bins"),
        ],
        run: arrival,
    },
    Experiment {
        name: "clock",
        about: "resolution of an oscillator ladder clock",
        anchors: &["MT-clock-ur", "HU-clock-ur"],
        params: &[
            count("n", "8", "number of ladder levels"),
            real("omega", "2", "level spacing"),
            real("eps", "0", "orthogonality threshold on |<psi|psi_t>|^2"),
            count("alphas", "200", "points of the C(alpha) curve"),
        ],
        run: clock,
    },
    Experiment {
        name: "chopper",
        about: "spectra of a chopped exponential decay",
        anchors: &["chopper", "HU-trans-width-ur"],
        params: &[
            real("tau", "1", "lifetime"),
            real("e0_ev", "0", "line energy in eV (sets omega0 = E0/hbar)"),
            real("tchop", "1", "chopping period"),
            real("topen", "0.2", "open time per period"),
            count("windows", "0", "number of periods (0: cover 40 lifetimes)"),
            count("panels", "2", "t0 quadrature panels per smooth piece"),
            count("jmax", "2", "side-peak orders checked"),
        ],
        run: chopper,
    },
    Experiment {
        name: "moshinsky",
        about: "energy distribution behind a shutter opened for a finite time",
        anchors: &["prep-ur"],
        params: &[
            real("e0", "50", "incident energy"),
            real("tprep", "2", "opening time"),
            real("emax", "200", "upper end of the energy grid"),
            count("points", "40001", "energy grid points"),
            real("hbar", "1", "reduced Planck constant"),
        ],
        run: moshinsky,
    },
];

pub fn find(name: &str) -> Option<&'static Experiment> {
    CATALOG.iter().find(|e| e.name == name)
}

/// Built-in presets, by name.
pub const PRESETS: &[(&str, &str, &str)] =
    &[("hauser", "chopper", include_str!("../presets/hauser.conf"))];

fn mt(p: &Params) -> Result<Output> {
    let mut out = Output::default();
    let mut t = Table::new("mt", &["index", "tau", "delta_a", "delta_h", "product"]);
    let dim = p.n("dim");
    let mut derivative = 0.0f64;
    for i in 0..p.n("count") as u64 {
        let mut r = rng_for(p.seed, i);
        let h = random_hermitian(&mut r, dim)?;
        let a = random_hermitian(&mut r, dim)?;
        let psi = random_state(&mut r, dim, 1.0)?;
        let (c, rep) = dynamics::mandelstam_tamm_check(&a, &psi, &h)?;
        t.rows.push(vec![
            i as f64,
            c.tau,
            c.delta_a,
            c.delta_h,
            c.tau * c.delta_h,
        ]);
        derivative = derivative.max((c.derivative - c.derivative_fd).abs() / c.derivative.abs());
        out.reports.push(rep);
    }
    out.reports
        .push(BoundReport::new("MS-tau", -derivative, 0.0, 1e-5));
    let min = t.rows.iter().map(|r| r[4]).fold(f64::INFINITY, f64::min);
    out.summary("min_product", min);
    out.tables.push(t);
    Ok(out)
}

fn survival(p: &Params) -> Result<Output> {
    let mut out = Output::default();
    let s = p.f("sigma");
    let e = Axis::linspace(AxisKind::Energy, -12.0 * s, 12.0 * s, 1201)?;
    let h = HermitianOperator::multiplication(e, |x| x)?;
    let psi = GridState::from_fn(e, 1.0, |x| C64::new((-x * x / (4.0 * s * s)).exp(), 0.0))?;
    let tax = Axis::linspace(AxisKind::Time, 0.0, p.f("horizon"), p.n("points"))?;
    let c = return_probability_curve(&psi, &h, tax)?;
    let limit = PI / (2.0 * c.delta_h);
    let mut t = Table::new("survival", &["t", "p", "cos2_bound"]);
    for (i, pv) in c.p_values.iter().enumerate() {
        let time = tax.value(i);
        let bound = if time <= limit {
            (time * c.delta_h).cos().powi(2)
        } else {
            0.0
        };
        t.rows.push(vec![time, *pv, bound]);
    }
    out.tables.push(t);
    out.reports.extend(c.cosine_bound.clone());
    let (tau_p, r) = property_lifetime(&c)?;
    out.reports.push(r);
    let g = grabowski_lifetime(&c)?;
    out.reports.push(g.report.clone());
    // Gaussian energy density: tau0 = sqrt(pi) / (2 sigma)
    out.reports.push(BoundReport::equality(
        "Grabo-tau",
        g.tau0,
        PI.sqrt() / (2.0 * s),
        1e-6,
    ));
    out.summary("delta_h", c.delta_h);
    out.summary("tau_p", tau_p);
    out.summary("tau0", g.tau0);
    out.summary("tau0_tail", g.tail);
    Ok(out)
}

fn decay(p: &Params) -> Result<Output> {
    let mut out = Output::default();
    let model = DecayModel::from_lifetime(p.f("tau"), 0.0, p.f("hbar"))?;
    let r = decay_reference(&model)?;
    let a = &r.amplitude;
    let mut t = Table::new("decay_spectrum", &["detuning", "re", "im", "abs"]);
    for (i, z) in a.f_tilde.iter().enumerate() {
        let e = a.energy_axis.value(i);
        if e.abs() <= 10.0 * model.gamma {
            t.rows.push(vec![e, z.re, z.im, z.norm()]);
        }
    }
    out.tables.push(t);
    out.reports.extend([
        r.identity.clone(),
        r.transform.clone(),
        r.half_width.clone(),
    ]);
    let (t_half, w, hu) = check_hu_lifetime(a)?;
    out.reports.push(hu);
    out.reports.push(check_decay_equivalent_width(a)?);
    // p(t) = exp(-Gamma t / hbar) halves at hbar ln2 / Gamma
    let half = model.hbar * 2f64.ln() / model.gamma;
    let ax = Axis::linspace(AxisKind::Time, 0.0, 6.0 * half, 6001)?;
    let pv = ax.values().iter().map(|t| model.f(*t).norm_sqr()).collect();
    let (tau_p, _) = property_lifetime(&SurvivalCurve::from_samples(
        ax,
        pv,
        f64::INFINITY,
        model.hbar,
    )?)?;
    out.reports
        .push(BoundReport::equality("ft-expon", tau_p, half, 1e-6 * half));
    out.summary("gamma", model.gamma);
    out.summary("hwhm", r.hwhm);
    out.summary("t_half", t_half);
    out.summary("overall_width_0.9", w);
    Ok(out)
}

fn widths(p: &Params) -> Result<Output> {
    let mut out = Output::default();
    let n = p.n("points");
    let s = p.f("sigma");
    let ax = Axis::centered(AxisKind::Time, 48.0 * s / n as f64 * 2.0, n)?;
    let chi = GridState::from_fn(ax, 1.0, |x| C64::new((-x * x / (2.0 * s * s)).exp(), 0.0))?
        .normalized()?;
    let (wt, we, r) = check_equivalent_width_identity(&chi)?;
    out.reports.push(r);
    out.summary("equivalent_width_t", wt.re);
    out.summary("equivalent_width_e", we.re);
    let mut t = Table::new("overall_product", &["alpha", "product", "calibrated_bound"]);
    for k in 0..9 {
        let alpha = 0.55 + 0.05 * k as f64;
        t.rows.push(vec![
            alpha,
            overall_product(&chi, alpha)?,
            tempus_core::widths::overall_constant(alpha)?,
        ]);
        out.reports
            .push(tempus_core::widths::check_overall_width_relation(
                &chi, alpha,
            )?);
    }
    out.tables.push(t);
    Ok(out)
}

fn abm(p: &Params) -> Result<Output> {
    let mut out = Output::default();
    let object = gaussian_momentum_state(p.f("p0"), p.f("sigma"), p.n("points"), 1.0)?;
    let cfg = AbmConfig::new(
        p.f("m"),
        p.f("big_m"),
        p.f("g0"),
        p.f("dt"),
        gaussian_probe(p.f("probe_sigma"), 1.0)?,
        object,
        1.0,
    )?;
    let row = coupling_sweep(&cfg, &[cfg.g0])?.remove(0);
    let cf = confidence_function(&cfg)?;
    let mut t = Table::new("confidence", &["p", "f"]);
    for (i, v) in cf.values.iter().enumerate() {
        t.rows.push(vec![cf.axis.value(i), *v]);
    }
    out.tables.push(t);
    out.reports
        .push(BoundReport::equality("p-confid", cf.integral(), 1.0, 1e-9));
    let c = cfg.coupling();
    out.reports.push(BoundReport::equality(
        "p-inacc",
        cf.std(),
        1.0 / c,
        1e-9 / c,
    ));
    let (p0, _) = cfg.object_momentum();
    let emax = 2.0 * (p0 * p0) / (2.0 * cfg.m);
    let bins: Vec<(f64, f64)> = (0..8)
        .map(|k| {
            let hi = if k == 7 {
                f64::INFINITY
            } else {
                (k + 1) as f64 * emax / 8.0
            };
            (k as f64 * emax / 8.0, hi)
        })
        .collect();
    let ax = energy_povm(&cfg, &bins)?.axioms();
    out.reports
        .push(BoundReport::new("H-pov", ax.min_eigenvalue, 0.0, 1e-12));
    out.reports.push(BoundReport::new(
        "H-pov",
        -ax.normalization_defect,
        0.0,
        1e-8,
    ));
    out.reports.extend(energy_statistics(&cfg)?.reports);
    out.reports
        .push(BoundReport::new("p-pov", row.min_eigenvalue, 0.0, 1e-12));
    out.reports.push(BoundReport::new(
        "p-pov",
        -row.normalization_defect,
        0.0,
        1e-8,
    ));
    out.reports
        .push(BoundReport::new("p-reprod", row.reproducibility, 0.99, 0.0));
    for (k, v) in [
        ("coupling", row.coupling),
        ("inaccuracy", row.inaccuracy),
        ("distortion", row.distortion),
        ("probe_term", row.probe_term),
        ("cross_term", row.cross_term),
        ("energy_inaccuracy", row.energy_inaccuracy),
        ("reproducibility", row.reproducibility),
        (
            "near_eigenstate",
            if row.near_eigenstate { 1.0 } else { 0.0 },
        ),
    ] {
        out.summary(k, v);
    }
    Ok(out)
}

fn falling(p: &Params) -> Result<Output> {
    let mut out = Output::default();
    let (m, g) = (p.f("m"), p.f("g"));
    let fp = FallingParticle::new(
        m,
        g,
        Axis::centered(AxisKind::Momentum, p.f("dp"), p.n("points"))?,
        1.0,
    )?;
    let psi = GridState::gaussian(
        fp.axis,
        1.0,
        p.f("p0"),
        p.f("sigma") * std::f64::consts::SQRT_2,
        0.0,
    )?;
    let povm = fp.povm(&fp.uniform_bins(1))?;
    let st = time_statistics(&povm, &psi, &fp.hamiltonian()?)?;
    let mut t = Table::new("falling_time", &["t", "probability"]);
    for ((a, b), q) in povm.bins.iter().zip(povm.distribution(&psi)?) {
        t.rows.push(vec![0.5 * (a + b), q]);
    }
    out.tables.push(t);
    out.reports.push(st.uncertainty.clone());
    let (s, p0) = (p.f("sigma"), p.f("p0"));
    out.reports.push(BoundReport::equality(
        "time-var",
        st.delta_t,
        s / (m * g),
        1e-10,
    ));
    let mean_p = |s: &GridState| {
        s.density()
            .iter()
            .enumerate()
            .map(|(i, w)| w * s.axis.value(i))
            .sum::<f64>()
            * s.axis.step
    };
    let a = fp.propagate(&psi, 0.7)?;
    let b = fp.propagate_split_step(&psi, 0.7, 50)?;
    out.reports.push(BoundReport::new(
        "H-g",
        -(a.inner(&b)?.norm() - 1.0).abs(),
        0.0,
        1e-9,
    ));
    out.reports.push(BoundReport::equality(
        "T-g",
        mean_p(&a) - mean_p(&psi),
        m * g * 0.7,
        1e-9,
    ));
    out.summary("mean_p", p0);
    let ts = [-0.3, 0.2, 0.5];
    let weyl = fp.weyl_defect(&psi, &ts, &[-0.4, 0.1, 0.3])?;
    out.reports.push(BoundReport::new("Weyl", -weyl, 0.0, 1e-6));
    let drift = fp.time_drift(&psi, &[0.0, 0.2, 0.4, 0.6])?;
    out.reports
        .push(BoundReport::equality("T-cov", drift.slope.abs(), 1.0, 1e-9));
    out.summary("mean_t", st.operator.mean);
    out.summary("delta_t", st.delta_t);
    out.summary("delta_h", st.delta_h);
    out.summary("time_slope", drift.slope);
    Ok(out)
}

fn oscillator(p: &Params) -> Result<Output> {
    let mut out = Output::default();
    let osc = OscillatorPhase::new(p.n("nmax"))?;
    let povm = osc.povm(p.n("bins"))?;
    let ax = povm.axioms();
    out.reports
        .push(BoundReport::new("osc-phase", ax.min_eigenvalue, 0.0, 1e-10));
    out.reports.push(BoundReport::new(
        "osc-phase",
        -ax.normalization_defect,
        0.0,
        1e-8,
    ));
    let v = osc.test_vector()?;
    let mut t = Table::new("phase_distribution", &["phase", "probability"]);
    for ((a, b), q) in povm.bins.iter().zip(povm.distribution(&v)?) {
        t.rows.push(vec![0.5 * (a + b), q]);
    }
    out.tables.push(t);
    let w = 2.0 * PI / p.n("bins") as f64;
    let cov = check_covariance(&povm, &osc.hamiltonian, 1.0, &[w, 5.0 * w, -3.0 * w])?;
    out.reports
        .push(BoundReport::new("osc-phase", -cov.max_defect, 0.0, 1e-8));
    // the first-moment operator approaches canonical commutation as the truncation grows
    let d = osc.commutator_defect(&v)?;
    let big = OscillatorPhase::new(2 * p.n("nmax"))?;
    let d2 = big.commutator_defect(&big.test_vector()?)?;
    out.reports
        .push(BoundReport::new("GW-comm", d - d2, 0.0, 0.0));
    out.summary("commutator_defect", d);
    out.summary("commutator_defect_doubled", d2);
    Ok(out)
}

fn bounded(p: &Params) -> Result<Output> {
    let mut out = Output::default();
    let c = C64::from_polar(1.0, p.f("twist"));
    let (_, povm, tc, r) = bounded_spectrum(p.n("n"), c, p.n("bins"), p.n("states"), p.seed)?;
    let ax = povm.axioms();
    out.reports
        .push(BoundReport::new("time-povm", ax.min_eigenvalue, 0.0, 1e-10));
    out.reports.push(BoundReport::new(
        "time-povm",
        -ax.normalization_defect,
        0.0,
        1e-8,
    ));
    out.reports.push(BoundReport::new(
        "Tc-spec",
        -r.spectrum.max_defect,
        -r.spectrum.bound,
        0.0,
    ));
    out.reports
        .push(BoundReport::new("BF-bound", -r.bf_distance, 0.0, 1e-6));
    out.reports.push(r.variance.clone());
    out.reports.push(r.interior_uncertainty.clone());
    let mut eig: Vec<f64> = tc.symmetric_eigenvalues().iter().cloned().collect();
    eig.sort_by(f64::total_cmp);
    let mut t = Table::new("tc_spectrum", &["index", "eigenvalue"]);
    for (i, e) in eig.iter().enumerate() {
        t.rows.push(vec![i as f64, *e]);
    }
    out.tables.push(t);
    out.summary("bf_constant", r.bf_constant);
    out.summary("dirichlet_shift_defect", r.covariance.dirichlet_defect);
    out.summary("twisted_shift_defect", r.covariance.twisted_defect);
    Ok(out)
}

fn arrival(p: &Params) -> Result<Output> {
    let mut out = Output::default();
    let (m, p0, x0) = (p.f("m"), p.f("p0"), p.f("x0"));
    let axis = gaussian_momentum_state(p0, p.f("sigma"), 256, 1.0)?.axis;
    let psi = GridState::gaussian(axis, 1.0, p0, p.f("sigma") * std::f64::consts::SQRT_2, -x0)?;
    let f = FreeArrival::new(&psi, m)?;
    let (a, b, n) = (p.f("t_min"), p.f("t_max"), p.n("bins").max(1));
    let edges: Vec<f64> = (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
    let mut t = Table::new("arrival", &["t", "probability", "density"]);
    for (w, q) in edges.windows(2).zip(f.distribution(&edges)) {
        let mid = 0.5 * (w[0] + w[1]);
        t.rows.push(vec![mid, q, f.density(mid)]);
    }
    out.tables.push(t);
    let (prob, mean, var) = f.window_moments(a, b)?;
    out.reports
        .push(BoundReport::equality("F-free", prob, 1.0, 1e-3));
    let classical = -x0 * m / p0;
    out.reports.push(BoundReport::equality(
        "F-free",
        mean,
        classical,
        0.02 * classical.abs(),
    ));
    out.summary("probability", prob);
    out.summary("mean", mean);
    out.summary("std", var.sqrt());
    out.summary("slow", if f.is_slow() { 1.0 } else { 0.0 });
    Ok(out)
}

fn clock(p: &Params) -> Result<Output> {
    let mut out = Output::default();
    let omega = p.f("omega");
    let (psi, h) = ladder_state(p.n("n"), omega, 1.0)?;
    let r = clock_check(&psi, &h, p.f("eps"), 2.0 * PI / omega)?;
    out.reports.extend(r.reports.clone());
    let d = EnergyDistribution::of_state(&psi, &h)?;
    let mut t = Table::new("clock_constant", &["alpha", "c"]);
    for (a, c) in clock_constant_curve(&d, p.f("eps"), p.n("alphas").max(2))? {
        t.rows.push(vec![a, c]);
    }
    out.tables.push(t);
    out.summary("delta_t", r.delta_t);
    out.summary("delta_h", r.delta_h);
    out.summary("mt_bound", r.mt_bound);
    out.summary("hu_bound", r.hu.as_ref().map_or(f64::NAN, |h| h.bound));
    Ok(out)
}

fn chopper(p: &Params) -> Result<Output> {
    let mut out = Output::default();
    let windows = match p.n("windows") {
        0 => None,
        n => Some(n),
    };
    let omega0 = p.f("e0_ev") / HBAR_EV_S;
    let cfg = ChopperConfig::new(p.f("tau"), omega0, p.f("topen"), p.f("tchop"), windows)?;
    let s = spectra(&cfg, cfg.default_axis()?, p.n("panels").max(1))?;
    let a = chopper_analysis(&cfg, &s, p.n("jmax") as i32)?;
    let mut t = Table::new("chopper_spectra", &["detuning", "coherent", "objective"]);
    for i in 0..s.coherent.axis.count {
        t.rows.push(vec![
            s.coherent.axis.value(i),
            s.coherent.intensity[i],
            s.objective.intensity[i],
        ]);
    }
    out.tables.push(t);
    let mut peaks = Table::new(
        "side_peaks",
        &["j", "expected", "found", "coherent", "objective"],
    );
    for sp in &a.side_peaks {
        peaks.rows.push(vec![
            sp.j as f64,
            sp.expected,
            sp.found.unwrap_or(f64::NAN),
            sp.coherent,
            sp.objective,
        ]);
        out.reports.push(BoundReport::new(
            "chopper",
            if sp.pass() { 1.0 } else { 0.0 },
            1.0,
            0.0,
        ));
    }
    out.tables.push(peaks);
    let flag = |ok: bool| BoundReport::new("chopper", if ok { 1.0 } else { 0.0 }, 1.0, 0.0);
    out.reports.push(flag(a.central_peak));
    out.reports.push(flag(a.objective_unimodal));
    out.reports
        .push(BoundReport::new("chopper", -a.plancherel_defect, 0.0, 1e-6));
    out.reports.push(a.hu.chopped.clone());
    out.reports.push(a.hu.unchopped.clone());
    out.summary("omega0", omega0);
    out.summary("carrier_excess", a.carrier_excess);
    out.summary("t0_refinement", s.t0_refinement);
    Ok(out)
}

fn moshinsky(p: &Params) -> Result<Output> {
    let mut out = Output::default();
    let (e0, tp, hbar) = (p.f("e0"), p.f("tprep"), p.f("hbar"));
    let axis = Axis::linspace(
        AxisKind::Energy,
        p.f("emax") * 1e-4,
        p.f("emax"),
        p.n("points"),
    )?;
    let m = moshinsky_distribution(e0, tp, axis, hbar)?;
    let mut t = Table::new("moshinsky", &["e", "density"]);
    for (i, d) in m.density.iter().enumerate() {
        t.rows.push(vec![m.axis.value(i), *d]);
    }
    out.tables.push(t);
    out.reports.push(m.report.clone());
    let zeros = m.located_zeros(&moshinsky_zeros(e0, tp, hbar, 4));
    let found = zeros.iter().all(|z| z.1.is_some());
    out.reports.push(BoundReport::new(
        "prep-ur",
        if found { 1.0 } else { 0.0 },
        1.0,
        0.0,
    ));
    out.summary("delta_e", m.delta_e);
    out.summary("product", tp * m.delta_e / hbar);
    Ok(out)
}
