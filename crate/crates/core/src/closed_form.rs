//! Literal closed-form homodyne coefficients and their audit against the
//! matrix-inversion path in [`crate::spectra`].
//!
//! The closed forms are transcribed as published, including two places
//! where the published text is internally inconsistent. Both readings are
//! kept as a [`ClosedFormVariant`] and adjudicated numerically; nothing is
//! silently corrected. The symbol `α` in `e5` is read as `φ`, and the
//! coupling `g` of the closed forms is the Hamiltonian coupling
//! `G = G′/√2`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::model::SystemParams;
use crate::spectra::{cavity_coefficients, output_coefficients, OutputCoefficients};

/// Pass threshold on the max relative deviation of `A1..A4`.
pub const VALIDATION_TOLERANCE: f64 = 1e-6;
/// Floor on the normalisation of relative deviations.
pub const DEVIATION_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClosedFormError {
    #[error("closed-form denominator vanishes at omega = {omega}")]
    Singular { omega: f64 },
    #[error("validation grid is empty")]
    EmptyGrid,
    #[error("validation grid contains a non-finite frequency {omega}")]
    NonFiniteFrequency { omega: f64 },
    #[error("unknown closed-form variant `{0}`")]
    UnknownVariant(String),
}

/// Sign of `e5` in the `k1` denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum E5Sign {
    /// `-e1 e2 - e3 + e4 - e5`, as printed for `k1`.
    Minus,
    /// `-e1 e2 - e3 + e4 + e5`, as printed for `k3` and `k5`.
    Plus,
}

/// Which output coefficients receive the reflected input `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TildeIndexSet {
    /// `{1, 5}` as printed.
    Printed,
    /// `{1, 6}`: X_in in X_out and P_in in P_out.
    Derived,
}

impl TildeIndexSet {
    fn indices(self) -> [usize; 2] {
        match self {
            TildeIndexSet::Printed => [0, 4],
            TildeIndexSet::Derived => [0, 5],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClosedFormVariant {
    pub e5_sign_in_k1_denominator: E5Sign,
    pub tilde_index_set: TildeIndexSet,
}

impl ClosedFormVariant {
    pub const ALL: [ClosedFormVariant; 4] = [
        ClosedFormVariant::new(E5Sign::Minus, TildeIndexSet::Printed),
        ClosedFormVariant::new(E5Sign::Minus, TildeIndexSet::Derived),
        ClosedFormVariant::new(E5Sign::Plus, TildeIndexSet::Printed),
        ClosedFormVariant::new(E5Sign::Plus, TildeIndexSet::Derived),
    ];

    pub const fn new(e5: E5Sign, tilde: TildeIndexSet) -> Self {
        Self {
            e5_sign_in_k1_denominator: e5,
            tilde_index_set: tilde,
        }
    }

    /// The phase substituted for the undefined `α` in `e5`.
    pub fn alpha_reading(&self) -> &'static str {
        "phi"
    }
}

impl fmt::Display for ClosedFormVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e5 = match self.e5_sign_in_k1_denominator {
            E5Sign::Minus => "minus",
            E5Sign::Plus => "plus",
        };
        let tilde = match self.tilde_index_set {
            TildeIndexSet::Printed => "1-5",
            TildeIndexSet::Derived => "1-6",
        };
        write!(f, "e5-{e5}/tilde-{tilde}")
    }
}

impl FromStr for ClosedFormVariant {
    type Err = ClosedFormError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|v| v.to_string() == s.trim())
            .ok_or_else(|| ClosedFormError::UnknownVariant(s.trim().to_string()))
    }
}

/// Auxiliary polynomials `e1..e6` of the closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxPolynomials {
    pub e: [Complex64; 6],
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn aux_polynomials(params: &SystemParams, omega: f64) -> AuxPolynomials {
    let i = Complex64::i();
    let d = params.delta_eff();
    let k = params.kappa();
    let gm = params.gamma();
    let v = params.v_hop();
    let g = params.g_linear();
    let phi = params.phi();
    let alpha = phi;
    let wm = 1.0;
    let w = omega;

    let kw = c(k) - i * w;
    let shifted = c(v * v) + (i * gm + w) * w; // V² + ω(iγ + ω)
    let detuned = c(v * v - w * w - wm * wm) - i * gm * w; // V² - iγω - ω² - ω_m²

    let e1 = d * d + kw * kw;
    let e2 = c(gm * gm * (v * v - 2.0 * w * w) + 2.0 * (v * v - w * w).powi(2))
        + i * (4.0 * gm * w * (-v * v + w * w));
    let e3 = shifted * (4.0 * d * g * g * wm);
    let e4 = e1 * shifted * (4.0 * wm * wm) - e1 * (2.0 * wm.powi(4));
    let e5 =
        detuned * (4.0 * d * g * g * v * alpha.cos()) + e1 * (gm * gm * v * v * (2.0 * phi).cos());
    let e6 = c(gm * gm * (v * v - 2.0 * w * w)
        + 2.0 * (v - w - wm) * (v + w - wm) * (v - w + wm) * (v + w + wm))
        - i * (4.0 * gm * w * (v * v - w * w + wm * wm));
    AuxPolynomials {
        e: [e1, e2, e3, e4, e5, e6],
    }
}

fn nonzero(z: Complex64, omega: f64) -> Result<Complex64, ClosedFormError> {
    if z.norm() == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        Err(ClosedFormError::Singular { omega })
    } else {
        Ok(z)
    }
}

/// Intracavity coefficients `k1..k8` evaluated from the closed forms.
pub fn k_coefficients(
    params: &SystemParams,
    omega: f64,
    variant: ClosedFormVariant,
) -> Result<[Complex64; 8], ClosedFormError> {
    let i = Complex64::i();
    let [e1, e2, e3, e4, e5, e6] = aux_polynomials(params, omega).e;
    let d = params.delta_eff();
    let k = params.kappa();
    let gm = params.gamma();
    let v = params.v_hop();
    let g = params.g_linear();
    let (s, cphi) = params.phi().sin_cos();
    let c2 = (2.0 * params.phi()).cos();
    let wm = 1.0;
    let w = omega;

    let base = -e1 * e2 - e3 + e4;
    let den1 = match variant.e5_sign_in_k1_denominator {
        E5Sign::Minus => base - e5,
        E5Sign::Plus => base + e5,
    };
    let den1 = nonzero(den1, omega)?;
    let den3 = nonzero(base + e5, omega)?;
    let kw = nonzero(c(k) - i * w, omega)?;

    let k1 = kw * (c(gm * gm * v * v * c2) - e6) * (2f64.sqrt() * k.sqrt()) / den1;
    let k2 = k1 * d / kw;
    let k3_num = -(c(v * v) + (i * gm + w) * w) * wm + wm.powi(3)
        - (c(gm) - i * (2.0 * w)) * (v * wm * s)
        + (c(v * v - w * w - wm * wm + gm * v * s) - i * gm * w) * (v * cphi);
    let k3 = k3_num * (2.0 * 2f64.sqrt() * d * g * gm.sqrt()) / den3;
    let k4 = k3;
    let k5_num =
        (c(v * v + w * w - wm * wm) + i * gm * w) * (4.0 * g * g * wm) + e6 * d + e6 * cphi
            - d * gm * gm * v * c2;
    let k5 = k5_num * (2f64.sqrt() * k.sqrt()) / den3;
    let k6 = k1;
    let k7 = k3 * d / kw;
    let k8 = k7;
    let out = [k1, k2, k3, k4, k5, k6, k7, k8];
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(ClosedFormError::Singular { omega });
    }
    Ok(out)
}

/// Output-field coefficients `k̃1..k̃8` for a given index set.
pub fn output_k_coefficients(
    params: &SystemParams,
    omega: f64,
    variant: ClosedFormVariant,
) -> Result<[Complex64; 8], ClosedFormError> {
    let k = k_coefficients(params, omega, variant)?;
    let sk = (2.0 * params.kappa()).sqrt();
    let mut tilde = k.map(|z| z * sk);
    for idx in variant.tilde_index_set.indices() {
        tilde[idx] -= 1.0;
    }
    Ok(tilde)
}

/// Homodyne coefficients `A_i = cos θ k̃_i + sin θ k̃_{i+4}` from the closed forms.
pub fn homodyne_coefficients_closed(
    params: &SystemParams,
    omega: f64,
    variant: ClosedFormVariant,
) -> Result<OutputCoefficients, ClosedFormError> {
    let tilde = output_k_coefficients(params, omega, variant)?;
    let (s, c) = params.theta().sin_cos();
    let mut a = [Complex64::new(0.0, 0.0); 4];
    for i in 0..4 {
        a[i] = tilde[i] * c + tilde[i + 4] * s;
    }
    Ok(OutputCoefficients::from_array(omega, a))
}

fn relative_deviation(closed: Complex64, numeric: Complex64) -> f64 {
    let d = (closed - numeric).norm() / numeric.norm().max(DEVIATION_FLOOR);
    if d.is_nan() {
        f64::INFINITY
    } else {
        d
    }
}

/// Per-frequency relative deviations of `A1..A4` for one variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationRecord {
    pub variant: ClosedFormVariant,
    pub omega: f64,
    pub deviation: [f64; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantSummary {
    pub variant: ClosedFormVariant,
    /// Max over the grid and over `A1..A4`.
    pub max_deviation: f64,
    pub per_coefficient_max: [f64; 4],
    pub worst_omega: Option<f64>,
    /// Index (0-based) of the coefficient attaining `max_deviation`.
    pub worst_coefficient: Option<usize>,
    /// Frequencies where the closed form could not be evaluated.
    pub singular: Vec<f64>,
}

/// Whether the numeric path respects the oscillator-exchange identity
/// `k4 = k3` (equivalently `A3 = A4`) that the closed forms assume.
#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeIdentityCheck {
    /// Max over the grid of `|A3 - A4| / max(|A3|, |A4|)` on the numeric path.
    pub max_numeric_asymmetry: f64,
    pub worst_omega: Option<f64>,
    /// True when the numeric asymmetry is below the validation tolerance.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub params: SystemParams,
    pub grid: Vec<f64>,
    pub tolerance: f64,
    pub variants: Vec<VariantSummary>,
    pub best_variant: Option<ClosedFormVariant>,
    pub best_deviation: f64,
    pub pass: bool,
    /// Frequencies where the numeric solve failed; skipped for all variants.
    pub numeric_singular: Vec<f64>,
    pub exchange_identity: ExchangeIdentityCheck,
    pub records: Vec<DeviationRecord>,
}

impl ValidationReport {
    pub fn variant(&self, variant: ClosedFormVariant) -> Option<&VariantSummary> {
        self.variants.iter().find(|s| s.variant == variant)
    }
}

enum PointOutcome {
    NumericSingular,
    Evaluated {
        asymmetry: f64,
        per_variant: Vec<Option<[f64; 4]>>,
    },
}

/// Evaluate every requested variant on `grid` and compare `A1..A4` with
/// the numeric path. Singular points are skipped and listed.
pub fn validate_against_numeric(
    params: &SystemParams,
    grid: &[f64],
    variants: &[ClosedFormVariant],
) -> Result<ValidationReport, ClosedFormError> {
    if grid.is_empty() {
        return Err(ClosedFormError::EmptyGrid);
    }
    if let Some(&omega) = grid.iter().find(|w| !w.is_finite()) {
        return Err(ClosedFormError::NonFiniteFrequency { omega });
    }

    let outcomes: Vec<PointOutcome> = grid
        .par_iter()
        .map(|&omega| {
            let numeric = match output_coefficients(params, omega) {
                Ok(c) => c,
                Err(_) => return PointOutcome::NumericSingular,
            };
            let asymmetry = (numeric.a3 - numeric.a4).norm()
                / numeric
                    .a3
                    .norm()
                    .max(numeric.a4.norm())
                    .max(DEVIATION_FLOOR);
            let per_variant = variants
                .iter()
                .map(|&v| {
                    homodyne_coefficients_closed(params, omega, v)
                        .ok()
                        .map(|closed| {
                            let num = numeric.as_array();
                            let cf = closed.as_array();
                            [0, 1, 2, 3].map(|i| relative_deviation(cf[i], num[i]))
                        })
                })
                .collect();
            PointOutcome::Evaluated {
                asymmetry,
                per_variant,
            }
        })
        .collect();

    let mut numeric_singular = Vec::new();
    let mut summaries: Vec<VariantSummary> = variants
        .iter()
        .map(|&variant| VariantSummary {
            variant,
            max_deviation: 0.0,
            per_coefficient_max: [0.0; 4],
            worst_omega: None,
            worst_coefficient: None,
            singular: Vec::new(),
        })
        .collect();
    let mut exchange = ExchangeIdentityCheck {
        max_numeric_asymmetry: 0.0,
        worst_omega: None,
        consistent: true,
    };
    let mut records = Vec::new();

    for (&omega, outcome) in grid.iter().zip(outcomes) {
        match outcome {
            PointOutcome::NumericSingular => numeric_singular.push(omega),
            PointOutcome::Evaluated {
                asymmetry,
                per_variant,
            } => {
                if exchange.worst_omega.is_none() || asymmetry > exchange.max_numeric_asymmetry {
                    exchange.max_numeric_asymmetry = asymmetry;
                    exchange.worst_omega = Some(omega);
                }
                for (summary, dev) in summaries.iter_mut().zip(per_variant) {
                    let Some(dev) = dev else {
                        summary.singular.push(omega);
                        continue;
                    };
                    for (i, &d) in dev.iter().enumerate() {
                        summary.per_coefficient_max[i] = summary.per_coefficient_max[i].max(d);
                        if summary.worst_omega.is_none() || d > summary.max_deviation {
                            summary.max_deviation = d;
                            summary.worst_omega = Some(omega);
                            summary.worst_coefficient = Some(i);
                        }
                    }
                    records.push(DeviationRecord {
                        variant: summary.variant,
                        omega,
                        deviation: dev,
                    });
                }
            }
        }
    }
    exchange.consistent = exchange.max_numeric_asymmetry < VALIDATION_TOLERANCE;
    // a variant that never evaluated has no evidence in its favour
    for s in summaries.iter_mut().filter(|s| s.worst_omega.is_none()) {
        s.max_deviation = f64::INFINITY;
    }
    records.sort_by(|a, b| {
        let ia = variants.iter().position(|v| *v == a.variant);
        let ib = variants.iter().position(|v| *v == b.variant);
        ia.cmp(&ib).then(a.omega.total_cmp(&b.omega))
    });

    let best = summaries
        .iter()
        .min_by(|a, b| a.max_deviation.total_cmp(&b.max_deviation));
    let best_variant = best.map(|s| s.variant);
    let best_deviation = best.map_or(f64::INFINITY, |s| s.max_deviation);
    Ok(ValidationReport {
        params: *params,
        grid: grid.to_vec(),
        tolerance: VALIDATION_TOLERANCE,
        variants: summaries,
        best_variant,
        best_deviation,
        pass: best_deviation < VALIDATION_TOLERANCE,
        numeric_singular,
        exchange_identity: exchange,
        records,
    })
}

/// Relative deviations of the closed-form `k1..k8` from the numeric ones.
pub fn k_deviation(
    params: &SystemParams,
    omega: f64,
    variant: ClosedFormVariant,
) -> Result<[f64; 8], ClosedFormError> {
    let closed = k_coefficients(params, omega, variant)?;
    let numeric = cavity_coefficients(params, omega)
        .map_err(|_| ClosedFormError::Singular { omega })?
        .k;
    Ok([0, 1, 2, 3, 4, 5, 6, 7].map(|i| relative_deviation(closed[i], numeric[i])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    use crate::model::SystemParamsBuilder;

    fn p() -> SystemParamsBuilder {
        SystemParams::builder()
    }

    fn grid(n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| 0.95 + 0.1 * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn variant_names_round_trip() {
        for v in ClosedFormVariant::ALL {
            assert_eq!(v.to_string().parse::<ClosedFormVariant>().unwrap(), v);
            assert_eq!(v.alpha_reading(), "phi");
        }
        assert!("e5-zero/tilde-1-5".parse::<ClosedFormVariant>().is_err());
    }

    #[test]
    fn printed_identities_hold() {
        let params = p().delta_eff(0.05).phi(0.9).v_hop(0.02).build().unwrap();
        for v in ClosedFormVariant::ALL {
            for &w in &[0.97, 1.0, 1.02] {
                let k = k_coefficients(&params, w, v).unwrap();
                assert_eq!(k[3], k[2]);
                assert_eq!(k[5], k[0]);
                assert_eq!(k[7], k[6]);
            }
        }
    }

    #[test]
    fn zero_detuning_kills_detuning_prefactors() {
        let params = SystemParams::reference();
        for v in ClosedFormVariant::ALL {
            let k = k_coefficients(&params, 1.01, v).unwrap();
            assert_eq!(k[1].norm(), 0.0);
            assert_eq!(k[6].norm(), 0.0);
        }
    }

    #[test]
    fn homodyne_mixing_limits() {
        let params = p().delta_eff(0.05).theta(0.0).build().unwrap();
        let v = ClosedFormVariant::ALL[1];
        let tilde = output_k_coefficients(&params, 1.0, v).unwrap();
        let a = homodyne_coefficients_closed(&params, 1.0, v)
            .unwrap()
            .as_array();
        for i in 0..4 {
            assert_eq!(a[i], tilde[i]);
        }
        let params = p().delta_eff(0.05).theta(PI / 2.0).build().unwrap();
        let tilde = output_k_coefficients(&params, 1.0, v).unwrap();
        let a = homodyne_coefficients_closed(&params, 1.0, v)
            .unwrap()
            .as_array();
        for i in 0..4 {
            assert!((a[i] - tilde[i + 4]).norm() <= 1e-15 * tilde[i + 4].norm().max(1.0));
        }
    }

    #[test]
    fn tilde_sets_differ_only_in_reflection() {
        let params = SystemParams::reference();
        let printed = output_k_coefficients(&params, 1.0, ClosedFormVariant::ALL[0]).unwrap();
        let derived = output_k_coefficients(&params, 1.0, ClosedFormVariant::ALL[1]).unwrap();
        assert_eq!(printed[4] - derived[4], Complex64::new(-1.0, 0.0));
        assert_eq!(printed[5] - derived[5], Complex64::new(1.0, 0.0));
        for i in [0, 1, 2, 3, 6, 7] {
            assert_eq!(printed[i], derived[i]);
        }
    }

    #[test]
    fn bare_cavity_amplitude_quadrature_agrees() {
        // without optomechanical coupling only the reflected amplitude
        // quadrature survives at θ = 0, and every variant reproduces it
        let params = p().g_eff(0.0).theta(0.0).build().unwrap();
        let report = validate_against_numeric(&params, &grid(41), &ClosedFormVariant::ALL).unwrap();
        for s in &report.variants {
            assert!(s.max_deviation < 1e-8, "{} {}", s.variant, s.max_deviation);
        }
        assert!(report.pass);
        // the plus sign in k1 reproduces the bare cavity up to the
        // cancellation in -e1 e2 + e4
        let k = k_deviation(&params, 0.99, ClosedFormVariant::ALL[3]).unwrap();
        assert!(k[0] < 1e-8, "{k:?}");
        // the printed k5 keeps an `e6 cos φ` term that survives without coupling
        assert!(k[4] > 1.0);
        let phase = p().g_eff(0.0).build().unwrap();
        let r = validate_against_numeric(&phase, &grid(41), &ClosedFormVariant::ALL).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn report_structure() {
        let params = SystemParams::reference();
        let g = grid(11);
        let vs = [ClosedFormVariant::ALL[1], ClosedFormVariant::ALL[3]];
        let r = validate_against_numeric(&params, &g, &vs).unwrap();
        assert_eq!(r.variants.len(), 2);
        assert_eq!(r.records.len(), 22);
        assert!(r.variants.iter().all(|s| s.max_deviation >= 0.0));
        let best = r.variant(r.best_variant.unwrap()).unwrap();
        assert!(r
            .variants
            .iter()
            .all(|s| s.max_deviation >= best.max_deviation));
        assert_eq!(r.pass, r.best_deviation < VALIDATION_TOLERANCE);
        // deterministic regardless of thread scheduling
        assert_eq!(r, validate_against_numeric(&params, &g, &vs).unwrap());
        assert!(r.exchange_identity.consistent);
    }

    #[test]
    fn broken_dark_mode_violates_exchange_identity() {
        let params = p().phi(PI / 2.0).build().unwrap();
        let r = validate_against_numeric(&params, &grid(21), &ClosedFormVariant::ALL).unwrap();
        assert!(!r.exchange_identity.consistent);
        assert!(r.exchange_identity.max_numeric_asymmetry > 1e-3);
    }

    #[test]
    fn grid_errors() {
        let params = SystemParams::reference();
        assert_eq!(
            validate_against_numeric(&params, &[], &ClosedFormVariant::ALL),
            Err(ClosedFormError::EmptyGrid)
        );
        assert!(matches!(
            validate_against_numeric(&params, &[1.0, f64::NAN], &ClosedFormVariant::ALL),
            Err(ClosedFormError::NonFiniteFrequency { .. })
        ));
    }
}
