use std::f64::consts::PI;

use serde::Serialize;

use crate::hilbert::{from_spectrum, Axis, AxisKind};
use crate::quad::GaussLegendre;
use crate::widths::{check_hu_relation, overall_width_with, Tails, HALF_TIME_RHO};
use crate::{BoundReport, Result, TempusError, C64};

/// `hbar` in eV s.
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;
/// 57Fe Mossbauer line.
pub const HAUSER_E0_EV: f64 = 14.4e3;
pub const HAUSER_TAU: f64 = 141e-9;
/// Windows must reach this many lifetimes.
pub const MIN_LIFETIMES: f64 = 8.0;

/// Decay amplitude `f0(t) = e^{-t/2tau} e^{-i omega0 t}`, `t >= 0`, passed
/// through windows `[t0 + k T_chop, t0 + k T_chop + T_open)`.
///
/// All frequencies handled by this module are detunings `omega - omega0`;
/// `omega0` is kept for output only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChopperConfig {
    pub tau: f64,
    pub omega0: f64,
    pub t_open: f64,
    pub t_chop: f64,
    pub n_windows: usize,
}

impl ChopperConfig {
    /// `n_windows` defaults to enough windows for `40 tau`.
    pub fn new(
        tau: f64,
        omega0: f64,
        t_open: f64,
        t_chop: f64,
        n_windows: Option<usize>,
    ) -> Result<Self> {
        if !(tau > 0.0 && t_open > 0.0 && t_chop > 0.0) || !omega0.is_finite() {
            return Err(TempusError::Parameter(
                "tau, t_open and t_chop must be positive".into(),
            ));
        }
        if t_open > t_chop {
            return Err(TempusError::Parameter(format!(
                "t_open {t_open} exceeds t_chop {t_chop}"
            )));
        }
        let n_windows = n_windows.unwrap_or_else(|| (40.0 * tau / t_chop).ceil().max(1.0) as usize);
        if n_windows == 0 {
            return Err(TempusError::Parameter("need at least one window".into()));
        }
        if n_windows as f64 * t_chop < MIN_LIFETIMES * tau {
            return Err(TempusError::Truncation(format!(
                "{n_windows} windows of period {t_chop} cover less than {MIN_LIFETIMES} lifetimes"
            )));
        }
        Ok(Self {
            tau,
            omega0,
            t_open,
            t_chop,
            n_windows,
        })
    }

    /// Hauser et al. line with the given chopper timing (seconds).
    pub fn hauser(t_chop: f64, t_open: f64) -> Result<Self> {
        Self::new(HAUSER_TAU, HAUSER_E0_EV / HBAR_EV_S, t_open, t_chop, None)
    }

    pub fn always_open(&self) -> bool {
        self.t_open >= self.t_chop
    }

    /// Windows clipped to `t >= 0`, in time order; empty ones are dropped.
    /// An always-open chopper gives the single window `[0, n T_chop)`.
    pub fn windows(&self, t0: f64) -> Vec<(f64, f64)> {
        let horizon = self.n_windows as f64 * self.t_chop;
        if self.always_open() {
            return vec![(0.0, horizon)];
        }
        (-1..self.n_windows as i64)
            .filter_map(|k| {
                let a = t0 + k as f64 * self.t_chop;
                let (a, b) = (a.max(0.0), a + self.t_open);
                (b > a).then_some((a, b))
            })
            .collect()
    }

    /// Detuning grid from `-span` to `span` with `count` points (odd counts
    /// put a sample on the carrier).
    pub fn axis(&self, span: f64, count: usize) -> Result<Axis> {
        Axis::linspace(AxisKind::Energy, -span, span, count)
    }

    /// Grid covering three side peaks either side with eight points per
    /// Lorentzian half-width.
    pub fn default_axis(&self) -> Result<Axis> {
        let span = 3.5 * 2.0 * PI / self.t_chop;
        let step = 1.0 / (16.0 * self.tau);
        let half = (span / step).ceil() as usize;
        self.axis(half as f64 * step, 2 * half + 1)
    }
}

/// `∫_a^b e^{-t/2tau} e^{i u t} dt = [e^{zt}/z]_a^b`, `z = iu - 1/2tau`.
pub fn window_transform(cfg: &ChopperConfig, window: (f64, f64), u: f64) -> C64 {
    let (a, b) = window;
    if b <= a {
        return C64::new(0.0, 0.0);
    }
    let z = C64::new(-0.5 / cfg.tau, u);
    ((z * b).exp() - (z * a).exp()) / z
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SpectrumKind {
    Coherent { t0: f64 },
    Objective { t0: f64 },
    CoherentAveraged,
    ObjectiveAveraged,
}

impl SpectrumKind {
    pub fn label(&self) -> &'static str {
        match self {
            SpectrumKind::Coherent { .. } => "coherent",
            SpectrumKind::Objective { .. } => "objective",
            SpectrumKind::CoherentAveraged => "coherent_averaged",
            SpectrumKind::ObjectiveAveraged => "objective_averaged",
        }
    }
}

/// Unnormalised spectral intensity on a detuning axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub axis: Axis,
    pub intensity: Vec<f64>,
    pub kind: SpectrumKind,
}

impl Spectrum {
    pub fn peak(&self) -> f64 {
        self.intensity.iter().cloned().fold(0.0, f64::max)
    }

    fn at(&self, u: f64) -> f64 {
        self.intensity[self.axis.nearest_index(u)]
    }
}

/// `(|sum_k f~_k|^2, sum_k |f~_k|^2)` at one `t0`.
fn intensities(cfg: &ChopperConfig, axis: &Axis, t0: f64) -> (Vec<f64>, Vec<f64>) {
    let windows = cfg.windows(t0);
    let pairs = crate::par::map_range(axis.count, |i| {
        let u = axis.value(i);
        let mut sum = C64::new(0.0, 0.0);
        let mut incoherent = 0.0;
        for w in &windows {
            let f = window_transform(cfg, *w, u);
            sum += f;
            incoherent += f.norm_sqr();
        }
        (sum.norm_sqr(), incoherent)
    });
    pairs.into_iter().unzip()
}

/// Single-`t0` spectra.
pub fn spectra_at(cfg: &ChopperConfig, axis: Axis, t0: f64) -> (Spectrum, Spectrum) {
    let (c, o) = intensities(cfg, &axis, t0);
    (
        Spectrum {
            axis,
            intensity: c,
            kind: SpectrumKind::Coherent { t0 },
        },
        Spectrum {
            axis,
            intensity: o,
            kind: SpectrumKind::Objective { t0 },
        },
    )
}

/// `t0` nodes and weights (summing to one) of the average over a period.
/// The clipped first window makes the intensity kink at
/// `t0 = T_chop - T_open`, so each side gets its own Gauss–Legendre rule
/// with panels no wider than half a lifetime.
fn t0_nodes(cfg: &ChopperConfig, panels: usize) -> Vec<(f64, f64)> {
    if cfg.always_open() {
        return vec![(0.0, 1.0)];
    }
    let gl = GaussLegendre::new(8);
    let kink = cfg.t_chop - cfg.t_open;
    [(0.0, kink), (kink, cfg.t_chop)]
        .into_iter()
        .filter(|(a, b)| b > a)
        .flat_map(|(a, b)| {
            let n = panels.max(((b - a) / (0.5 * cfg.tau)).ceil() as usize);
            gl.composite_points(a, b, n)
        })
        .map(|(t, w)| (t, w / cfg.t_chop))
        .collect()
}

fn averaged(cfg: &ChopperConfig, axis: &Axis, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let mut c = vec![0.0; axis.count];
    let mut o = vec![0.0; axis.count];
    for (t0, w) in t0_nodes(cfg, panels) {
        let (ci, oi) = intensities(cfg, axis, t0);
        for i in 0..axis.count {
            c[i] += w * ci[i];
            o[i] += w * oi[i];
        }
    }
    (c, o)
}

/// Largest tolerated change of the averaged spectra (relative to their
/// peaks) when the `t0` panels are doubled.
pub const T0_AVERAGE_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChopperSpectra {
    pub coherent: Spectrum,
    pub objective: Spectrum,
    /// Panels per smooth piece of the `t0` average.
    pub t0_panels: usize,
    /// Change under doubled `t0` panels, relative to the peak.
    pub t0_refinement: f64,
}

/// `t0`-averaged coherent and objective spectra, checked against a rule
/// with twice as many panels.
pub fn spectra(cfg: &ChopperConfig, axis: Axis, t0_panels: usize) -> Result<ChopperSpectra> {
    if t0_panels == 0 {
        return Err(TempusError::Parameter("need at least one t0 panel".into()));
    }
    let (c, o) = averaged(cfg, &axis, t0_panels);
    let (c2, o2) = averaged(cfg, &axis, 2 * t0_panels);
    let rel = |a: &[f64], b: &[f64]| {
        let peak = b.iter().cloned().fold(0.0, f64::max);
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
            / peak
    };
    let t0_refinement = rel(&c, &c2).max(rel(&o, &o2));
    if t0_refinement > T0_AVERAGE_TOLERANCE {
        return Err(TempusError::Resolution(format!(
            "t0 average moves by {t0_refinement:.2e} when panels double"
        )));
    }
    Ok(ChopperSpectra {
        coherent: Spectrum {
            axis,
            intensity: c2,
            kind: SpectrumKind::CoherentAveraged,
        },
        objective: Spectrum {
            axis,
            intensity: o2,
            kind: SpectrumKind::ObjectiveAveraged,
        },
        t0_panels: 2 * t0_panels,
        t0_refinement,
    })
}

/// Side peak of order `j` (negative below the carrier).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SidePeak {
    pub j: i32,
    /// `2 pi j / T_chop`.
    pub expected: f64,
    /// Local maximum of the coherent spectrum within one grid step.
    pub found: Option<f64>,
    pub coherent: f64,
    pub objective: f64,
}

impl SidePeak {
    pub fn pass(&self) -> bool {
        self.found.is_some() && self.coherent > self.objective
    }
}

fn local_maxima(v: &[f64]) -> Vec<usize> {
    (1..v.len().saturating_sub(1))
        .filter(|&i| v[i] > v[i - 1] && v[i] >= v[i + 1])
        .collect()
}

/// Side peaks `j = ±1..=±j_max` of the averaged coherent spectrum.
pub fn side_peaks(s: &ChopperSpectra, t_chop: f64, j_max: i32) -> Vec<SidePeak> {
    let ax = s.coherent.axis;
    let maxima = local_maxima(&s.coherent.intensity);
    let mut out = Vec::new();
    for j in (-j_max..=j_max).filter(|j| *j != 0) {
        let expected = 2.0 * PI * j as f64 / t_chop;
        let found = maxima
            .iter()
            .map(|&i| ax.value(i))
            .filter(|u| (u - expected).abs() <= ax.step * (1.0 + 1e-9))
            .min_by(|a, b| (a - expected).abs().total_cmp(&(b - expected).abs()));
        let u = found.unwrap_or(expected);
        out.push(SidePeak {
            j,
            expected,
            found,
            coherent: s.coherent.at(u),
            objective: s.objective.at(u),
        });
    }
    out
}

/// Single local maximum after a moving average over `window` (in the
/// axis unit); maxima below `1e-9` of the peak are ignored. The window is
/// capped at a quarter of the axis and shrinks symmetrically near the ends,
/// so a monotone tail stays monotone.
pub fn unimodal(s: &Spectrum, window: f64) -> bool {
    let n = s.intensity.len();
    let half = ((0.5 * window / s.axis.step).round() as usize).min(n / 8);
    let v = &s.intensity;
    let mut prefix = vec![0.0; n + 1];
    for (i, x) in v.iter().enumerate() {
        prefix[i + 1] = prefix[i] + x;
    }
    let smooth: Vec<f64> = (0..n)
        .map(|i| {
            let h = half.min(i).min(n - 1 - i);
            (prefix[i + h + 1] - prefix[i - h]) / (2 * h + 1) as f64
        })
        .collect();
    let peak = smooth.iter().cloned().fold(0.0, f64::max);
    local_maxima(&smooth)
        .into_iter()
        .filter(|&i| smooth[i] > 1e-9 * peak)
        .count()
        == 1
}

/// Per-window `∫|f~_k(u)|^2 du = 2 pi ∫_{Z_k} |f0|^2 dt`, the integral done by
/// Gauss–Legendre on `|u| <= U` plus the analytic tail. Returns the largest
/// relative defect over the windows at `t0`.
pub fn plancherel_check(cfg: &ChopperConfig, t0: f64) -> f64 {
    let g = 0.5 / cfg.tau;
    let gl = GaussLegendre::new(16);
    let mut worst = 0.0f64;
    for w in cfg.windows(t0) {
        let (a, b) = w;
        let len = b - a;
        let exact = 2.0 * PI * cfg.tau * ((-a / cfg.tau).exp() - (-b / cfg.tau).exp());
        let cap = 40.0 * g.max(2.0 * PI / len);
        let width = 0.25 * g.min(PI / len);
        let panels = (2.0 * cap / width).ceil() as usize;
        let core = gl.integrate(-cap, cap, panels, |u| {
            window_transform(cfg, w, u).norm_sqr()
        });
        // |f~|^2 = (e^{-2ga} + e^{-2gb} - 2 e^{-g(a+b)} cos(uL)) / (u^2 + g^2)
        let smooth = (-2.0 * g * a).exp() + (-2.0 * g * b).exp();
        let tail_smooth = smooth * 2.0 * (0.5 * PI - (cap / g).atan()) / g;
        let tail_osc =
            -2.0 * (-g * (a + b)).exp() * 2.0 * (-(cap * len).sin() / (len * (cap * cap + g * g)));
        let total = core + tail_smooth + tail_osc;
        worst = worst.max((total - exact).abs() / exact);
    }
    worst
}

/// Translation-width/overall-width relation on the averaged spectrum and on
/// the unchopped line, with `alpha = 0.9` and the half-time `rho`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HuConsistency {
    pub chopped: BoundReport,
    pub unchopped: BoundReport,
    /// `W(spectrum, 0.9)` of the chopped and unchopped spectra.
    pub chopped_width: f64,
    pub unchopped_width: f64,
}

impl HuConsistency {
    pub fn pass(&self) -> bool {
        self.chopped.pass && self.unchopped.pass && self.chopped_width >= self.unchopped_width
    }
}

const HU_ALPHA: f64 = 0.9;

fn hu_report(s: &Spectrum) -> Result<(BoundReport, f64)> {
    let total: f64 = s.intensity.iter().sum::<f64>() * s.axis.step;
    let dist: Vec<f64> = s.intensity.iter().map(|x| x / total).collect();
    let f = from_spectrum(
        s.axis,
        dist.iter().map(|x| C64::new(*x, 0.0)).collect(),
        1.0,
    )?;
    let report = check_hu_relation(&f, HU_ALPHA, HALF_TIME_RHO)?;
    let w = overall_width_with(&dist, &s.axis, HU_ALPHA, Tails::Open)?;
    Ok((report, w))
}

pub fn hu_consistency(cfg: &ChopperConfig, s: &ChopperSpectra) -> Result<HuConsistency> {
    let (chopped, chopped_width) = hu_report(&s.coherent)?;
    let open = ChopperConfig {
        t_open: cfg.t_chop,
        ..*cfg
    };
    let (lorentz, _) = spectra_at(&open, s.coherent.axis, 0.0);
    let (unchopped, unchopped_width) = hu_report(&lorentz)?;
    Ok(HuConsistency {
        chopped,
        unchopped,
        chopped_width,
        unchopped_width,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChopperAnalysis {
    /// The coherent spectrum's largest value sits at the carrier.
    pub central_peak: bool,
    pub side_peaks: Vec<SidePeak>,
    /// Objective spectrum is unimodal after averaging over `2 pi / T_open`.
    pub objective_unimodal: bool,
    /// Coherent average exceeds the objective one at the carrier.
    pub carrier_excess: f64,
    pub plancherel_defect: f64,
    pub hu: HuConsistency,
}

impl ChopperAnalysis {
    pub fn pass(&self) -> bool {
        self.central_peak
            && self.side_peaks.iter().all(|p| p.pass())
            && self.objective_unimodal
            && self.plancherel_defect <= 1e-6
            && self.hu.pass()
    }
}

pub fn chopper_analysis(
    cfg: &ChopperConfig,
    s: &ChopperSpectra,
    j_max: i32,
) -> Result<ChopperAnalysis> {
    let c = &s.coherent;
    let imax = c
        .intensity
        .iter()
        .enumerate()
        .fold(0, |b, (i, x)| if *x > c.intensity[b] { i } else { b });
    let central_peak = c.axis.value(imax).abs() <= c.axis.step * (1.0 + 1e-9);
    let plancherel_defect = [0.0, 0.37, 0.81]
        .iter()
        .map(|f| plancherel_check(cfg, f * cfg.t_chop))
        .fold(0.0, f64::max);
    Ok(ChopperAnalysis {
        central_peak,
        side_peaks: side_peaks(s, cfg.t_chop, j_max),
        objective_unimodal: unimodal(&s.objective, 2.0 * PI / cfg.t_open),
        carrier_excess: c.at(0.0) - s.objective.at(0.0),
        plancherel_defect,
        hu: hu_consistency(cfg, s)?,
    })
}
