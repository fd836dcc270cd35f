//! System parameters, the linear drift matrix of the fluctuation dynamics,
//! its stability, and the hybrid (dark/bright) mechanical mode picture.
//!
//! All rates are expressed in units of the bare mechanical frequency, so
//! `omega_m == 1` everywhere inside the model. A physical mechanical
//! frequency only enters through [`thermal_occupation`].

use std::f64::consts::{PI, SQRT_2, TAU};
use std::fmt;

use nalgebra::Matrix6;
use num_complex::Complex64;
use thiserror::Error;

/// Planck constant (J s), exact SI value.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant (J s).
pub const HBAR: f64 = PLANCK / TAU;
/// Boltzmann constant (J/K), CODATA 2018 exact value.
pub const K_B: f64 = 1.380_649e-23;

/// Mechanical frequency of the reference device, 2π × 3.6 MHz (rad/s).
pub const DEFAULT_OMEGA_M_PHYS: f64 = TAU * 3.6e6;
/// Bath temperature of the reference device (K).
pub const DEFAULT_TEMPERATURE: f64 = 0.077;

/// Relative cutoff below which a hybrid-mode coupling counts as zero.
pub const DARK_MODE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("parameter `{name}` must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("parameter `{name}` violates `{constraint}` (got {value})")]
    Constraint {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },
    #[error("thermal occupation given both directly and through a temperature")]
    ConflictingOccupation,
}

fn finite(name: &'static str, value: f64) -> Result<f64, ParamError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ParamError::NonFinite { name, value })
    }
}

/// Bose-Einstein occupation `1 / (exp(ħω/k_B T) - 1)` of a mode at
/// angular frequency `omega_m_phys` (rad/s) and temperature `temperature` (K).
pub fn thermal_occupation(temperature: f64, omega_m_phys: f64) -> Result<f64, ParamError> {
    let temperature = finite("temperature", temperature)?;
    let omega = finite("omega_m_phys", omega_m_phys)?;
    if temperature < 0.0 {
        return Err(ParamError::Constraint {
            name: "temperature",
            constraint: ">= 0",
            value: temperature,
        });
    }
    if omega <= 0.0 {
        return Err(ParamError::Constraint {
            name: "omega_m_phys",
            constraint: "> 0",
            value: omega,
        });
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega / (K_B * temperature);
    Ok(1.0 / x.exp_m1())
}

/// Reduce an angle to `[0, 2π)`.
pub fn reduce_angle(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// How the mean thermal occupation of the mechanical baths is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Occupation {
    Direct(f64),
    Thermal { temperature: f64, omega_m_phys: f64 },
}

impl Default for Occupation {
    fn default() -> Self {
        Occupation::Thermal {
            temperature: DEFAULT_TEMPERATURE,
            omega_m_phys: DEFAULT_OMEGA_M_PHYS,
        }
    }
}

/// A validated scenario. Rates are in units of the mechanical frequency.
///
/// Construct through [`SystemParams::builder`]; the builder checks every
/// physical constraint, reduces the phases and resolves the thermal
/// occupation, so a `SystemParams` value is always usable as is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    omega_m_phys: Option<f64>,
    temperature: Option<f64>,
    kappa: f64,
    gamma: f64,
    delta_eff: f64,
    g_eff: f64,
    v_hop: f64,
    phi: f64,
    theta: f64,
    n_bar: f64,
}

impl SystemParams {
    pub fn builder() -> SystemParamsBuilder {
        SystemParamsBuilder::default()
    }

    /// Reference device: κ = 0.1, γ = 1e-5, Δ′ = 0, G′ = 4.5e-3, V = 0.01,
    /// φ = 0, θ = π/2 and n̄ from T = 77 mK at 2π × 3.6 MHz.
    pub fn reference() -> Self {
        Self::builder()
            .build()
            .expect("reference parameters are valid")
    }

    /// Rebuild with a modified copy of the builder, re-running validation.
    pub fn to_builder(&self) -> SystemParamsBuilder {
        let occupation = match (self.temperature, self.omega_m_phys) {
            (Some(temperature), Some(omega_m_phys)) => Occupation::Thermal {
                temperature,
                omega_m_phys,
            },
            _ => Occupation::Direct(self.n_bar),
        };
        SystemParamsBuilder {
            kappa: self.kappa,
            gamma: self.gamma,
            delta_eff: self.delta_eff,
            g_eff: self.g_eff,
            v_hop: self.v_hop,
            phi: self.phi,
            theta: self.theta,
            occupation,
            omega_m_phys: self.omega_m_phys,
        }
    }

    pub fn omega_m_phys(&self) -> Option<f64> {
        self.omega_m_phys
    }
    pub fn temperature(&self) -> Option<f64> {
        self.temperature
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn delta_eff(&self) -> f64 {
        self.delta_eff
    }
    /// Effective optomechanical coupling G′ as it appears in the drift matrix.
    pub fn g_eff(&self) -> f64 {
        self.g_eff
    }
    /// Hamiltonian coupling G = G′/√2.
    pub fn g_linear(&self) -> f64 {
        self.g_eff / SQRT_2
    }
    pub fn v_hop(&self) -> f64 {
        self.v_hop
    }
    pub fn phi(&self) -> f64 {
        self.phi
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn n_bar(&self) -> f64 {
        self.n_bar
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::reference()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParamsBuilder {
    kappa: f64,
    gamma: f64,
    delta_eff: f64,
    g_eff: f64,
    v_hop: f64,
    phi: f64,
    theta: f64,
    occupation: Occupation,
    omega_m_phys: Option<f64>,
}

impl Default for SystemParamsBuilder {
    fn default() -> Self {
        Self {
            kappa: 0.1,
            gamma: 1e-5,
            delta_eff: 0.0,
            g_eff: 4.5e-3,
            v_hop: 0.01,
            phi: 0.0,
            theta: PI / 2.0,
            occupation: Occupation::default(),
            omega_m_phys: None,
        }
    }
}

impl SystemParamsBuilder {
    pub fn kappa(mut self, v: f64) -> Self {
        self.kappa = v;
        self
    }
    pub fn gamma(mut self, v: f64) -> Self {
        self.gamma = v;
        self
    }
    pub fn delta_eff(mut self, v: f64) -> Self {
        self.delta_eff = v;
        self
    }
    pub fn g_eff(mut self, v: f64) -> Self {
        self.g_eff = v;
        self
    }
    pub fn v_hop(mut self, v: f64) -> Self {
        self.v_hop = v;
        self
    }
    pub fn phi(mut self, v: f64) -> Self {
        self.phi = v;
        self
    }
    pub fn theta(mut self, v: f64) -> Self {
        self.theta = v;
        self
    }
    pub fn n_bar(mut self, v: f64) -> Self {
        self.occupation = Occupation::Direct(v);
        self
    }
    pub fn occupation(mut self, occupation: Occupation) -> Self {
        self.occupation = occupation;
        self
    }
    /// Physical mechanical frequency to keep alongside a direct `n_bar`.
    pub fn omega_m_phys(mut self, v: f64) -> Self {
        self.omega_m_phys = Some(v);
        self
    }

    pub fn build(self) -> Result<SystemParams, ParamError> {
        let kappa = finite("kappa", self.kappa)?;
        let gamma = finite("gamma", self.gamma)?;
        let delta_eff = finite("delta_eff", self.delta_eff)?;
        let g_eff = finite("g_eff", self.g_eff)?;
        let v_hop = finite("v_hop", self.v_hop)?;
        let phi = finite("phi", self.phi)?;
        let theta = finite("theta", self.theta)?;
        if kappa <= 0.0 {
            return Err(ParamError::Constraint {
                name: "kappa",
                constraint: "> 0",
                value: kappa,
            });
        }
        if gamma <= 0.0 {
            return Err(ParamError::Constraint {
                name: "gamma",
                constraint: "> 0",
                value: gamma,
            });
        }
        if v_hop < 0.0 {
            return Err(ParamError::Constraint {
                name: "v_hop",
                constraint: ">= 0",
                value: v_hop,
            });
        }
        let (n_bar, temperature, omega_m_phys) = match self.occupation {
            Occupation::Direct(n) => {
                let n = finite("n_bar", n)?;
                if n < 0.0 {
                    return Err(ParamError::Constraint {
                        name: "n_bar",
                        constraint: ">= 0",
                        value: n,
                    });
                }
                if let Some(w) = self.omega_m_phys {
                    finite("omega_m_phys", w)?;
                }
                (n, None, self.omega_m_phys)
            }
            Occupation::Thermal {
                temperature,
                omega_m_phys,
            } => {
                let n = thermal_occupation(temperature, omega_m_phys)?;
                (n, Some(temperature), Some(omega_m_phys))
            }
        };
        Ok(SystemParams {
            omega_m_phys,
            temperature,
            kappa,
            gamma,
            delta_eff,
            g_eff,
            v_hop,
            phi: reduce_angle(phi),
            theta: reduce_angle(theta),
            n_bar,
        })
    }
}

/// Quadrature ordering of the fluctuation vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quadrature {
    Xc = 0,
    Pc = 1,
    X1 = 2,
    X2 = 3,
    P1 = 4,
    P2 = 5,
}

impl Quadrature {
    pub const ALL: [Quadrature; 6] = [
        Quadrature::Xc,
        Quadrature::Pc,
        Quadrature::X1,
        Quadrature::X2,
        Quadrature::P1,
        Quadrature::P2,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Image under the oscillator exchange 1 <-> 2.
    pub fn exchanged(self) -> Quadrature {
        match self {
            Quadrature::X1 => Quadrature::X2,
            Quadrature::X2 => Quadrature::X1,
            Quadrature::P1 => Quadrature::P2,
            Quadrature::P2 => Quadrature::P1,
            q => q,
        }
    }
}

/// Drift matrix of the linearized fluctuations over
/// `(X_c, P_c, X_1, X_2, P_1, P_2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix(pub Matrix6<f64>);

impl DriftMatrix {
    pub fn get(&self, row: Quadrature, col: Quadrature) -> f64 {
        self.0[(row.index(), col.index())]
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.0
    }

    /// Conjugate by the permutation exchanging the two oscillators.
    pub fn exchanged(&self) -> DriftMatrix {
        let mut out = Matrix6::zeros();
        for r in Quadrature::ALL {
            for c in Quadrature::ALL {
                out[(r.exchanged().index(), c.exchanged().index())] = self.get(r, c);
            }
        }
        DriftMatrix(out)
    }
}

pub fn drift_matrix(params: &SystemParams) -> DriftMatrix {
    let k = params.kappa;
    let d = params.delta_eff;
    let g = params.g_eff;
    let gm = params.gamma;
    let (s, c) = params.phi.sin_cos();
    let vs = params.v_hop * s;
    let vc = params.v_hop * c;
    let wm = 1.0;
    #[rustfmt::skip]
    let a = Matrix6::new(
        -k,   d,   0.0,  0.0, 0.0, 0.0,
        -d,  -k,  -g,   -g,   0.0, 0.0,
        0.0, 0.0,  0.0,  vs,  wm,  vc,
        0.0, 0.0, -vs,   0.0, vc,  wm,
        -g,  0.0, -wm,  -vc, -gm,  vs,
        -g,  0.0, -vc,  -wm, -vs, -gm,
    );
    DriftMatrix(a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub eigenvalues: Vec<Complex64>,
    pub stable: bool,
    /// Largest real part over all eigenvalues.
    pub margin: f64,
}

impl fmt::Display for StabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "stable: {}", self.stable)?;
        writeln!(f, "margin: {:.16e}", self.margin)?;
        writeln!(f, "eigenvalues (re, im):")?;
        for ev in &self.eigenvalues {
            writeln!(f, "  {:.16e}, {:.16e}", ev.re, ev.im)?;
        }
        Ok(())
    }
}

pub fn stability_check(a: &DriftMatrix) -> StabilityReport {
    let scale = a.0.abs().max().max(1.0);
    let mut eigenvalues: Vec<Complex64> =
        a.0.complex_eigenvalues()
            .iter()
            .map(|ev| {
                // real parts at rounding level are exactly marginal
                if ev.re.abs() <= 64.0 * f64::EPSILON * scale {
                    Complex64::new(0.0, ev.im)
                } else {
                    *ev
                }
            })
            .collect();
    eigenvalues.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    let margin = eigenvalues
        .iter()
        .map(|ev| ev.re)
        .fold(f64::NEG_INFINITY, f64::max);
    StabilityReport {
        eigenvalues,
        stable: margin < 0.0,
        margin,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DarkLabel {
    PlusDark,
    MinusDark,
    None,
}

impl fmt::Display for DarkLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DarkLabel::PlusDark => "plus-dark",
            DarkLabel::MinusDark => "minus-dark",
            DarkLabel::None => "none",
        })
    }
}

/// Hybrid mechanical modes `B± ` of the phase-linked oscillator pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridModes {
    pub g_plus: Complex64,
    pub g_minus: Complex64,
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub dark_label: DarkLabel,
    pub force_factor_plus: Complex64,
    pub force_factor_minus: Complex64,
}

pub fn hybrid_modes(params: &SystemParams) -> HybridModes {
    let g = params.g_linear();
    let phi = params.phi;
    let one = Complex64::new(1.0, 0.0);
    let factor_plus = one + Complex64::from_polar(1.0, -phi);
    let factor_minus = one - Complex64::from_polar(1.0, phi);
    let mut g_plus = factor_plus * (g / SQRT_2);
    let mut g_minus = factor_minus * (g / SQRT_2);

    let cutoff = DARK_MODE_EPS * g.abs();
    let plus_dark = g_plus.norm() < cutoff;
    let minus_dark = g_minus.norm() < cutoff;
    // a coupling below the cutoff is an exact interference zero
    if plus_dark {
        g_plus = Complex64::new(0.0, 0.0);
    }
    if minus_dark {
        g_minus = Complex64::new(0.0, 0.0);
    }
    let dark_label = if minus_dark {
        DarkLabel::MinusDark
    } else if plus_dark {
        DarkLabel::PlusDark
    } else {
        DarkLabel::None
    };
    HybridModes {
        g_plus,
        g_minus,
        omega_plus: 1.0 + params.v_hop,
        omega_minus: 1.0 - params.v_hop,
        dark_label,
        force_factor_plus: factor_plus,
        force_factor_minus: factor_minus,
    }
}
