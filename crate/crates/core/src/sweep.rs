//! Frequency and parameter sweeps over the noise spectra, effective
//! detection frequencies, sub-threshold bandwidth and the thermal-noise
//! comparison with a single-oscillator sensor.
//!
//! Every sweep is a parallel map over independent points; results are
//! collected in input order, so output is identical for any thread count.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::model::{drift_matrix, stability_check, ParamError, StabilityReport, SystemParams};
use crate::spectra::{single_mode_reference, total_spectrum, SpectrumSample};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("grid needs start < stop with both finite (got {start}, {stop})")]
    InvalidRange { start: f64, stop: f64 },
    #[error("grid needs at least 2 points (got {0})")]
    TooFewGridPoints(usize),
    #[error("series needs at least 3 samples to locate extrema (got {0})")]
    SeriesTooShort(usize),
    #[error("unknown sweep parameter `{0}` (expected g_eff, kappa, v_hop or phi)")]
    UnknownParameter(String),
    #[error("sweep values must be non-empty, finite and strictly increasing")]
    NonIncreasingValues,
    #[error("threshold must be > 0 (got {0})")]
    InvalidThreshold(f64),
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// Linearly spaced frequencies in units of the mechanical frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    start: f64,
    stop: f64,
    points: usize,
}

impl FrequencyGrid {
    pub fn new(start: f64, stop: f64, points: usize) -> Result<Self, SweepError> {
        if !(start.is_finite() && stop.is_finite() && start < stop) {
            return Err(SweepError::InvalidRange { start, stop });
        }
        if points < 2 {
            return Err(SweepError::TooFewGridPoints(points));
        }
        Ok(Self {
            start,
            stop,
            points,
        })
    }

    pub fn start(&self) -> f64 {
        self.start
    }
    pub fn stop(&self) -> f64 {
        self.stop
    }
    pub fn points(&self) -> usize {
        self.points
    }
    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.points - 1) as f64
    }

    pub fn samples(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / n as f64
                }
            })
            .collect()
    }
}

impl Default for FrequencyGrid {
    /// `[0.95, 1.05]` with 501 points.
    fn default() -> Self {
        Self {
            start: 0.95,
            stop: 1.05,
            points: 501,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSeries {
    pub params: SystemParams,
    pub s_fex: f64,
    pub samples: Vec<SpectrumSample>,
    pub stability: StabilityReport,
    /// Frequencies where the linear solve failed; their samples are all-infinite.
    pub singular: Vec<f64>,
}

impl SpectrumSeries {
    pub fn stable(&self) -> bool {
        self.stability.stable
    }

    /// Warning text when the scenario has no stationary state.
    pub fn warning(&self) -> Option<String> {
        (!self.stability.stable).then(|| {
            format!(
                "drift matrix is unstable (max eigenvalue real part {:e}); spectra are not stationary",
                self.stability.margin
            )
        })
    }

    pub fn omegas(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.omega).collect()
    }
}

pub fn frequency_sweep(params: &SystemParams, grid: &FrequencyGrid) -> SpectrumSeries {
    frequency_sweep_with_signal(params, grid, 0.0)
}

/// Like [`frequency_sweep`] with a flat signal spectral density `s_fex`.
/// A negative or non-finite `s_fex` is treated as zero.
pub fn frequency_sweep_with_signal(
    params: &SystemParams,
    grid: &FrequencyGrid,
    s_fex: f64,
) -> SpectrumSeries {
    let s_fex = if s_fex.is_finite() && s_fex > 0.0 {
        s_fex
    } else {
        0.0
    };
    let stability = stability_check(&drift_matrix(params));
    if !stability.stable {
        log::warn!("unstable parameters, margin {:e}", stability.margin);
    }
    let evaluated: Vec<(SpectrumSample, bool)> = grid
        .samples()
        .par_iter()
        .map(|&w| match total_spectrum(params, w, s_fex) {
            Ok(s) => (s, false),
            Err(_) => (SpectrumSample::singular(w), true),
        })
        .collect();
    let singular = evaluated
        .iter()
        .filter(|(_, bad)| *bad)
        .map(|(s, _)| s.omega)
        .collect();
    SpectrumSeries {
        params: *params,
        s_fex,
        samples: evaluated.into_iter().map(|(s, _)| s).collect(),
        stability,
        singular,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    NAddMinimum,
    RmMaximum,
}

impl fmt::Display for ExtremumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtremumKind::NAddMinimum => "n_add-minimum",
            ExtremumKind::RmMaximum => "r_m-maximum",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinedExtremum {
    pub omega_eff: f64,
    /// Quantity re-evaluated at `omega_eff`.
    pub value: f64,
    pub kind: ExtremumKind,
    /// Offset of `omega_eff` from the nearest grid point.
    pub refinement: f64,
}

/// Abscissa of the vertex of the parabola through three points.
fn parabola_vertex(x: [f64; 3], f: [f64; 3]) -> Option<f64> {
    let (d0, d2) = (x[1] - x[0], x[1] - x[2]);
    let (g0, g2) = (f[1] - f[0], f[1] - f[2]);
    let den = d0 * g2 - d2 * g0;
    if den == 0.0 || !den.is_finite() {
        return None;
    }
    let vertex = x[1] - 0.5 * (d0 * d0 * g2 - d2 * d2 * g0) / den;
    (vertex.is_finite() && vertex > x[0] && vertex < x[2]).then_some(vertex)
}

fn refine_extrema(
    series: &SpectrumSeries,
    kind: ExtremumKind,
) -> Result<Vec<RefinedExtremum>, SweepError> {
    let n = series.samples.len();
    if n < 3 {
        return Err(SweepError::SeriesTooShort(n));
    }
    // minimise `sign * value` in both cases
    let (pick, sign): (fn(&SpectrumSample) -> f64, f64) = match kind {
        ExtremumKind::NAddMinimum => (|s| s.n_add, 1.0),
        ExtremumKind::RmMaximum => (|s| s.r_m, -1.0),
    };
    let values: Vec<f64> = series.samples.iter().map(|s| sign * pick(s)).collect();
    let omegas = series.omegas();
    let candidates: Vec<usize> = (1..n - 1)
        .filter(|&i| values[i - 1..=i + 1].iter().all(|v| v.is_finite()))
        .filter(|&i| values[i] < values[i - 1] && values[i] < values[i + 1])
        .collect();

    let mut out: Vec<RefinedExtremum> = candidates
        .par_iter()
        .map(|&i| {
            let x = [omegas[i - 1], omegas[i], omegas[i + 1]];
            let f = [values[i - 1], values[i], values[i + 1]];
            let fallback = RefinedExtremum {
                omega_eff: x[1],
                value: pick(&series.samples[i]),
                kind,
                refinement: 0.0,
            };
            let Some(vertex) = parabola_vertex(x, f) else {
                return fallback;
            };
            match total_spectrum(&series.params, vertex, series.s_fex) {
                Ok(s) if (sign * pick(&s)).is_finite() && sign * pick(&s) <= f[1] => {
                    RefinedExtremum {
                        omega_eff: vertex,
                        value: pick(&s),
                        kind,
                        refinement: vertex - x[1],
                    }
                }
                _ => fallback,
            }
        })
        .collect();
    out.sort_by(|a, b| a.omega_eff.total_cmp(&b.omega_eff));
    Ok(out)
}

/// Strict local minima of the added noise, refined by a 3-point parabola
/// and sorted by frequency.
pub fn find_effective_frequencies(
    series: &SpectrumSeries,
) -> Result<Vec<RefinedExtremum>, SweepError> {
    refine_extrema(series, ExtremumKind::NAddMinimum)
}

/// Strict local maxima of the mechanical response, refined the same way.
pub fn find_response_maxima(series: &SpectrumSeries) -> Result<Vec<RefinedExtremum>, SweepError> {
    refine_extrema(series, ExtremumKind::RmMaximum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParameter {
    GEff,
    Kappa,
    VHop,
    Phi,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::GEff => "g_eff",
            SweepParameter::Kappa => "kappa",
            SweepParameter::VHop => "v_hop",
            SweepParameter::Phi => "phi",
        }
    }

    pub fn apply(self, base: &SystemParams, value: f64) -> Result<SystemParams, ParamError> {
        let b = base.to_builder();
        match self {
            SweepParameter::GEff => b.g_eff(value),
            SweepParameter::Kappa => b.kappa(value),
            SweepParameter::VHop => b.v_hop(value),
            SweepParameter::Phi => b.phi(value),
        }
        .build()
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "g_eff" => Ok(SweepParameter::GEff),
            "kappa" => Ok(SweepParameter::Kappa),
            "v_hop" => Ok(SweepParameter::VHop),
            "phi" => Ok(SweepParameter::Phi),
            other => Err(SweepError::UnknownParameter(other.to_string())),
        }
    }
}

/// Which effective frequency a parameter sweep tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Highest-frequency minimum; used when `φ ≡ 0 (mod 2π)`.
    High,
    /// Lowest-frequency minimum; used when `φ ≡ π (mod 2π)`.
    Low,
    /// Deepest minimum; used for every other phase.
    Global,
}

impl Branch {
    pub fn for_phase(phi: f64) -> Branch {
        let (s, c) = phi.sin_cos();
        if s.abs() > 1e-12 {
            Branch::Global
        } else if c > 0.0 {
            Branch::High
        } else {
            Branch::Low
        }
    }

    pub fn select(self, extrema: &[RefinedExtremum]) -> Option<&RefinedExtremum> {
        match self {
            Branch::High => extrema.last(),
            Branch::Low => extrema.first(),
            // first wins ties, i.e. the lower frequency
            Branch::Global => extrema
                .iter()
                .reduce(|best, e| if e.value < best.value { e } else { best }),
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::High => "high",
            Branch::Low => "low",
            Branch::Global => "global",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub branch: Branch,
    /// `None` when the added noise has no interior minimum on the grid.
    pub omega_eff: Option<f64>,
    pub n_add: f64,
    pub r_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub grid: FrequencyGrid,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }

    /// Row with the smallest added noise at its effective frequency.
    pub fn argmin_n_add(&self) -> Option<&SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.n_add.is_finite())
            .reduce(|best, r| if r.n_add < best.n_add { r } else { best })
    }
}

fn sweep_point(
    base: &SystemParams,
    parameter: SweepParameter,
    value: f64,
    grid: &FrequencyGrid,
) -> Result<SweepRow, SweepError> {
    let params = parameter.apply(base, value)?;
    let branch = Branch::for_phase(params.phi());
    let series = frequency_sweep(&params, grid);
    let extrema = find_effective_frequencies(&series)?;
    let row = match branch.select(&extrema) {
        Some(e) => {
            let r_m = total_spectrum(&params, e.omega_eff, 0.0).map_or(f64::NAN, |s| s.r_m);
            SweepRow {
                value,
                branch,
                omega_eff: Some(e.omega_eff),
                n_add: e.value,
                r_m,
            }
        }
        None => SweepRow {
            value,
            branch,
            omega_eff: None,
            n_add: f64::NAN,
            r_m: f64::NAN,
        },
    };
    Ok(row)
}

/// Track the added noise and response at the effective frequency while
/// one parameter varies over `values`.
pub fn parameter_sweep(
    base: &SystemParams,
    parameter: SweepParameter,
    values: &[f64],
    grid: &FrequencyGrid,
) -> Result<SweepResult, SweepError> {
    let increasing = values.windows(2).all(|w| w[0] < w[1]);
    if values.is_empty() || !increasing || values.iter().any(|v| !v.is_finite()) {
        return Err(SweepError::NonIncreasingValues);
    }
    if grid.points() < 3 {
        return Err(SweepError::SeriesTooShort(grid.points()));
    }
    let rows = values
        .par_iter()
        .map(|&v| sweep_point(base, parameter, v, grid))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepResult {
        parameter,
        grid: *grid,
        rows,
    })
}

/// Closed frequency interval `[start, stop]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub stop: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.stop - self.start
    }
}

fn crossing(x0: f64, f0: f64, x1: f64, f1: f64, threshold: f64, inside_at_x1: bool) -> f64 {
    if f0.is_finite() && f1.is_finite() && f0 != f1 && threshold.is_finite() {
        x0 + (threshold - f0) / (f1 - f0) * (x1 - x0)
    } else if inside_at_x1 {
        x1
    } else {
        x0
    }
}

/// Maximal frequency intervals where the added noise stays below
/// `threshold`, with endpoints linearly interpolated between grid points.
pub fn bandwidth_metric(
    series: &SpectrumSeries,
    threshold: f64,
) -> Result<Vec<Interval>, SweepError> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(SweepError::InvalidThreshold(threshold));
    }
    let s = &series.samples;
    let below: Vec<bool> = s.iter().map(|x| x.n_add < threshold).collect();
    let mut out = Vec::new();
    let mut start = None;
    for i in 0..s.len() {
        match (start, below[i]) {
            (None, true) => {
                start = Some(if i == 0 {
                    s[0].omega
                } else {
                    crossing(
                        s[i - 1].omega,
                        s[i - 1].n_add,
                        s[i].omega,
                        s[i].n_add,
                        threshold,
                        true,
                    )
                });
            }
            (Some(lo), false) => {
                let hi = crossing(
                    s[i - 1].omega,
                    s[i - 1].n_add,
                    s[i].omega,
                    s[i].n_add,
                    threshold,
                    false,
                );
                out.push(Interval {
                    start: lo,
                    stop: hi,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let (Some(lo), Some(last)) = (start, s.last()) {
        out.push(Interval {
            start: lo,
            stop: last.omega,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalRatio {
    pub omega: f64,
    /// Two-oscillator thermal noise over the single-oscillator `n̄ + ½`.
    pub ratio: f64,
}

pub fn thermal_comparison(params: &SystemParams, grid: &FrequencyGrid) -> Vec<ThermalRatio> {
    grid.samples()
        .par_iter()
        .map(|&omega| {
            let two = total_spectrum(params, omega, 0.0).map_or(f64::INFINITY, |s| s.s_th);
            let one = single_mode_reference(params, omega, 0.0).map_or(f64::INFINITY, |s| s.s_th);
            let ratio = if two.is_finite() && one.is_finite() {
                two / one
            } else {
                f64::INFINITY
            };
            ThermalRatio { omega, ratio }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    use crate::model::SystemParamsBuilder;
    use crate::spectra::SQL;

    fn p() -> SystemParamsBuilder {
        SystemParams::builder()
    }

    fn synthetic(values: &[f64]) -> SpectrumSeries {
        let params = SystemParams::reference();
        let samples = values
            .iter()
            .enumerate()
            .map(|(i, &n)| SpectrumSample {
                omega: 0.95 + 0.01 * i as f64,
                r_m: 1.0,
                s_th: 1.0,
                n_add: n,
                s_total: 0.0,
                sql_margin: SQL - n,
            })
            .collect();
        SpectrumSeries {
            params,
            s_fex: 0.0,
            samples,
            stability: stability_check(&drift_matrix(&params)),
            singular: vec![],
        }
    }

    #[test]
    fn grid_validation_and_samples() {
        assert!(FrequencyGrid::new(1.0, 1.0, 10).is_err());
        assert!(FrequencyGrid::new(1.0, 0.5, 10).is_err());
        assert!(FrequencyGrid::new(0.5, f64::INFINITY, 10).is_err());
        assert_eq!(
            FrequencyGrid::new(0.0, 1.0, 1),
            Err(SweepError::TooFewGridPoints(1))
        );
        let g = FrequencyGrid::default();
        let s = g.samples();
        assert_eq!(s.len(), 501);
        assert_eq!(s[0], 0.95);
        assert_eq!(s[500], 1.05);
        assert!((s[250] - 1.0).abs() < 1e-15);
        assert!(s.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn parabola_vertex_exact_for_quadratics() {
        let f = |x: f64| 3.0 * (x - 1.0037).powi(2) + 0.2;
        let x = [0.99, 1.0, 1.01];
        let v = parabola_vertex(x, x.map(f)).unwrap();
        assert!((v - 1.0037).abs() < 1e-12);
        assert_eq!(parabola_vertex(x, [1.0, 1.0, 1.0]), None);
    }

    #[test]
    fn monotone_series_has_no_minimum() {
        let s = synthetic(&[5.0, 4.0, 3.0, 2.0, 1.0]);
        assert!(find_effective_frequencies(&s).unwrap().is_empty());
        assert_eq!(
            find_effective_frequencies(&synthetic(&[1.0, 2.0])),
            Err(SweepError::SeriesTooShort(2))
        );
    }

    #[test]
    fn divergences_excluded_from_extrema() {
        let s = synthetic(&[3.0, f64::INFINITY, 1.0, 2.0, 0.5, 0.7]);
        let e = find_effective_frequencies(&s).unwrap();
        assert_eq!(e.len(), 1);
        assert!((e[0].omega_eff - 0.99).abs() < 0.01);
    }

    #[test]
    fn uncoupled_minimum_at_resonance() {
        let params = p().v_hop(0.0).build().unwrap();
        let grid = FrequencyGrid::default();
        let series = frequency_sweep(&params, &grid);
        assert!(series.stable());
        assert!(series.warning().is_none());
        assert_eq!(series.samples.len(), 501);
        let e = find_effective_frequencies(&series).unwrap();
        assert_eq!(e.len(), 1);
        assert!((e[0].omega_eff - 1.0).abs() <= grid.step());
        assert_eq!(e[0].kind, ExtremumKind::NAddMinimum);
    }

    #[test]
    fn refined_minimum_not_above_neighbours() {
        for phi in [0.0, PI / 2.0, PI, 0.75 * PI] {
            let params = p().phi(phi).v_hop(0.02).build().unwrap();
            let series = frequency_sweep(&params, &FrequencyGrid::default());
            for e in find_effective_frequencies(&series).unwrap() {
                let i = series
                    .samples
                    .iter()
                    .position(|s| {
                        (s.omega - e.omega_eff).abs()
                            <= series.samples[1].omega - series.samples[0].omega
                    })
                    .unwrap();
                let again = total_spectrum(&params, e.omega_eff, 0.0).unwrap().n_add;
                assert!((again - e.value).abs() <= 1e-6 * e.value);
                let lo = series.samples[i.saturating_sub(1)]
                    .n_add
                    .min(series.samples[i + 1].n_add);
                assert!(again <= lo.max(series.samples[i].n_add));
            }
        }
    }

    #[test]
    fn branch_rules() {
        assert_eq!(Branch::for_phase(0.0), Branch::High);
        assert_eq!(Branch::for_phase(PI), Branch::Low);
        assert_eq!(Branch::for_phase(PI / 2.0), Branch::Global);
        let e = |w: f64, v: f64| RefinedExtremum {
            omega_eff: w,
            value: v,
            kind: ExtremumKind::NAddMinimum,
            refinement: 0.0,
        };
        let list = [e(0.98, 0.3), e(1.0, 0.3), e(1.02, 0.4)];
        assert_eq!(Branch::High.select(&list).unwrap().omega_eff, 1.02);
        assert_eq!(Branch::Low.select(&list).unwrap().omega_eff, 0.98);
        assert_eq!(Branch::Global.select(&list).unwrap().omega_eff, 0.98);
        assert!(Branch::Global.select(&[]).is_none());
    }

    #[test]
    fn parameter_sweep_validation() {
        let base = SystemParams::reference();
        let grid = FrequencyGrid::default();
        assert_eq!(
            "gamma".parse::<SweepParameter>(),
            Err(SweepError::UnknownParameter("gamma".into()))
        );
        assert_eq!(
            parameter_sweep(&base, SweepParameter::GEff, &[2e-3, 1e-3], &grid),
            Err(SweepError::NonIncreasingValues)
        );
        assert_eq!(
            parameter_sweep(&base, SweepParameter::GEff, &[], &grid),
            Err(SweepError::NonIncreasingValues)
        );
        assert!(matches!(
            parameter_sweep(&base, SweepParameter::Kappa, &[-1.0, 0.1], &grid),
            Err(SweepError::Param(_))
        ));
    }

    #[test]
    fn single_value_sweep_matches_direct_evaluation() {
        let base = SystemParams::reference();
        let grid = FrequencyGrid::default();
        let r = parameter_sweep(&base, SweepParameter::GEff, &[4.5e-3], &grid).unwrap();
        assert_eq!(r.rows.len(), 1);
        let series = frequency_sweep(&base, &grid);
        let e = find_effective_frequencies(&series).unwrap();
        let high = e.last().unwrap();
        assert_eq!(r.rows[0].omega_eff, Some(high.omega_eff));
        assert_eq!(r.rows[0].n_add, high.value);
        assert_eq!(r.rows[0].branch, Branch::High);
        let direct = total_spectrum(&base, high.omega_eff, 0.0).unwrap();
        assert_eq!(r.rows[0].r_m, direct.r_m);
    }

    #[test]
    fn sweep_is_deterministic() {
        let base = p().v_hop(0.02).build().unwrap();
        let grid = FrequencyGrid::new(0.95, 1.05, 201).unwrap();
        let values = [2e-3, 4e-3, 6e-3];
        let a = parameter_sweep(&base, SweepParameter::GEff, &values, &grid).unwrap();
        let b = parameter_sweep(&base, SweepParameter::GEff, &values, &grid).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values(), values.to_vec());
    }

    #[test]
    fn bandwidth_cases() {
        let s = synthetic(&[1.0, 0.4, 0.2, 0.4, 1.0, 0.3, 1.0]);
        let iv = bandwidth_metric(&s, 0.5).unwrap();
        assert_eq!(iv.len(), 2);
        // 1.0 -> 0.4 crosses 0.5 at 5/6 of the step
        assert!((iv[0].start - (0.95 + 0.01 * 5.0 / 6.0)).abs() < 1e-12);
        assert!((iv[0].stop - (0.98 + 0.01 / 6.0)).abs() < 1e-12);
        assert!(bandwidth_metric(&s, 0.1).unwrap().is_empty());
        let all = bandwidth_metric(&s, f64::INFINITY).unwrap();
        assert_eq!(
            all,
            vec![Interval {
                start: 0.95,
                stop: 1.01
            }]
        );
        assert!(bandwidth_metric(&s, 0.0).is_err());
        assert!(bandwidth_metric(&s, f64::NAN).is_err());
    }

    #[test]
    fn thermal_ratio_half_without_flux() {
        let grid = FrequencyGrid::new(0.95, 1.05, 101).unwrap();
        for params in [
            p().v_hop(0.0).build().unwrap(),
            p().phi(PI).build().unwrap(),
        ] {
            for r in thermal_comparison(&params, &grid) {
                assert!((r.ratio - 0.5).abs() < 1e-10, "{r:?}");
            }
        }
        let params = p().phi(PI / 2.0).build().unwrap();
        let ratios = thermal_comparison(&params, &grid);
        let at_resonance = ratios
            .iter()
            .find(|r| (r.omega - 1.0).abs() < 1e-9)
            .unwrap();
        assert!(at_resonance.ratio > 0.5);
    }
}
