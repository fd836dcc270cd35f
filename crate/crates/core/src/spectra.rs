//! Frequency-domain solution of the fluctuation dynamics and the
//! homodyne output spectra.
//!
//! The detected quadrature is written as
//! `P_θ = a1 X_in + a2 P_in + a3 f_1 + a4 f_2`, from which
//!
//! * mechanical response `R_m = |a3 + a4|²`
//! * thermal noise `S_th = (n̄ + ½)(|a3|² + |a4|²) / |a3 + a4|²`
//! * added noise `N_add = ½(|a1|² + |a2|²) / |a3 + a4|²`
//!
//! and the total symmetrized output `S = R_m (S_th + N_add + S_Fex)`.
//! Points where `a3 + a4 = 0` are reported as `f64::INFINITY` rather than
//! as errors.

use nalgebra::{DMatrix, Matrix4, Matrix6};
use num_complex::Complex64;
use thiserror::Error;

use crate::model::{drift_matrix, Quadrature, SystemParams};

/// Standard quantum limit of the added noise in these units.
pub const SQL: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("susceptibility is singular at omega = {omega}")]
    Singular { omega: f64 },
    #[error("frequency must be finite, got {omega}")]
    NonFiniteFrequency { omega: f64 },
    #[error("signal spectral density must be finite and >= 0, got {value}")]
    InvalidSignal { value: f64 },
}

/// `(−iωI − A)⁻¹` together with the max-entry residual of the inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct Susceptibility {
    pub omega: f64,
    pub matrix: Matrix6<Complex64>,
    pub residual: f64,
}

impl Susceptibility {
    pub fn get(&self, row: Quadrature, col: Quadrature) -> Complex64 {
        self.matrix[(row.index(), col.index())]
    }
}

/// Invert `−iωI − A` for a real drift matrix of any size.
fn resolvent(drift: DMatrix<f64>, omega: f64) -> Result<(DMatrix<Complex64>, f64), SpectraError> {
    if !omega.is_finite() {
        return Err(SpectraError::NonFiniteFrequency { omega });
    }
    let n = drift.nrows();
    let system = DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j {
            Complex64::new(0.0, -omega)
        } else {
            Complex64::new(0.0, 0.0)
        };
        diag - drift[(i, j)]
    });
    let inverse = system
        .clone()
        .lu()
        .try_inverse()
        .ok_or(SpectraError::Singular { omega })?;
    if inverse
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(SpectraError::Singular { omega });
    }
    let check = &system * &inverse;
    let residual = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| {
            let id = if i == j { 1.0 } else { 0.0 };
            (check[(i, j)] - id).norm()
        })
        .fold(0.0, f64::max);
    Ok((inverse, residual))
}

pub fn susceptibility(params: &SystemParams, omega: f64) -> Result<Susceptibility, SpectraError> {
    let a = drift_matrix(params);
    let (inv, residual) = resolvent(DMatrix::from_iterator(6, 6, a.0.iter().copied()), omega)?;
    Ok(Susceptibility {
        omega,
        matrix: Matrix6::from_iterator(inv.iter().copied()),
        residual,
    })
}

/// Intracavity quadrature coefficients `k1..k8`:
/// `X_c = k1 X_in + k2 P_in + k3 f_1 + k4 f_2`, `P_c = k5 X_in + ... + k8 f_2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityCoefficients {
    pub omega: f64,
    pub k: [Complex64; 8],
}

pub fn cavity_coefficients(
    params: &SystemParams,
    omega: f64,
) -> Result<CavityCoefficients, SpectraError> {
    use Quadrature::*;
    let chi = susceptibility(params, omega)?;
    let sk = (2.0 * params.kappa()).sqrt();
    let sg = (2.0 * params.gamma()).sqrt();
    let row = |q: Quadrature| {
        [
            chi.get(q, Xc) * sk,
            chi.get(q, Pc) * sk,
            chi.get(q, P1) * sg,
            chi.get(q, P2) * sg,
        ]
    };
    let [k1, k2, k3, k4] = row(Xc);
    let [k5, k6, k7, k8] = row(Pc);
    Ok(CavityCoefficients {
        omega,
        k: [k1, k2, k3, k4, k5, k6, k7, k8],
    })
}

/// Homodyne coefficients of the detected quadrature at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputCoefficients {
    pub omega: f64,
    pub a1: Complex64,
    pub a2: Complex64,
    pub a3: Complex64,
    pub a4: Complex64,
}

impl OutputCoefficients {
    pub fn as_array(&self) -> [Complex64; 4] {
        [self.a1, self.a2, self.a3, self.a4]
    }

    pub fn from_array(omega: f64, a: [Complex64; 4]) -> Self {
        Self {
            omega,
            a1: a[0],
            a2: a[1],
            a3: a[2],
            a4: a[3],
        }
    }
}

/// Apply the input-output relation and mix the output quadratures at `theta`.
pub(crate) fn homodyne_mix(
    kappa: f64,
    theta: f64,
    cavity: &CavityCoefficients,
) -> OutputCoefficients {
    let sk = (2.0 * kappa).sqrt();
    let mut x_out = [0.0.into(); 4];
    let mut p_out = [0.0.into(); 4];
    for i in 0..4 {
        x_out[i] = cavity.k[i] * sk;
        p_out[i] = cavity.k[i + 4] * sk;
    }
    // reflected input: X_in in X_out, P_in in P_out
    x_out[0] -= 1.0;
    p_out[1] -= 1.0;
    let (s, c) = theta.sin_cos();
    let mut a = [Complex64::new(0.0, 0.0); 4];
    for i in 0..4 {
        a[i] = x_out[i] * c + p_out[i] * s;
    }
    OutputCoefficients::from_array(cavity.omega, a)
}

pub fn output_coefficients(
    params: &SystemParams,
    omega: f64,
) -> Result<OutputCoefficients, SpectraError> {
    let cavity = cavity_coefficients(params, omega)?;
    Ok(homodyne_mix(params.kappa(), params.theta(), &cavity))
}

fn ratio(numerator: f64, denominator: f64) -> f64 {
    if denominator == 0.0 {
        f64::INFINITY
    } else {
        numerator / denominator
    }
}

pub fn mechanical_response(c: &OutputCoefficients) -> f64 {
    (c.a3 + c.a4).norm_sqr()
}

pub fn thermal_noise(c: &OutputCoefficients, n_bar: f64) -> f64 {
    ratio(
        (n_bar + 0.5) * (c.a3.norm_sqr() + c.a4.norm_sqr()),
        mechanical_response(c),
    )
}

pub fn added_noise(c: &OutputCoefficients) -> f64 {
    ratio(
        0.5 * (c.a1.norm_sqr() + c.a2.norm_sqr()),
        mechanical_response(c),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSample {
    pub omega: f64,
    pub r_m: f64,
    pub s_th: f64,
    pub n_add: f64,
    pub s_total: f64,
    pub sql_margin: f64,
}

impl SpectrumSample {
    fn compose(omega: f64, r_m: f64, s_th: f64, n_add: f64, s_fex: f64) -> Self {
        let s_total = if r_m == 0.0 {
            0.0
        } else {
            r_m * (s_th + n_add + s_fex)
        };
        Self {
            omega,
            r_m,
            s_th,
            n_add,
            s_total,
            sql_margin: SQL - n_add,
        }
    }

    /// Placeholder for a frequency where the linear solve failed.
    pub fn singular(omega: f64) -> Self {
        Self {
            omega,
            r_m: f64::INFINITY,
            s_th: f64::INFINITY,
            n_add: f64::INFINITY,
            s_total: f64::INFINITY,
            sql_margin: f64::NEG_INFINITY,
        }
    }

    /// True when the force transduction vanishes or the solve failed here.
    pub fn is_divergent(&self) -> bool {
        !self.n_add.is_finite()
    }
}

fn check_signal(s_fex: f64) -> Result<(), SpectraError> {
    if s_fex.is_finite() && s_fex >= 0.0 {
        Ok(())
    } else {
        Err(SpectraError::InvalidSignal { value: s_fex })
    }
}

pub fn total_spectrum(
    params: &SystemParams,
    omega: f64,
    s_fex: f64,
) -> Result<SpectrumSample, SpectraError> {
    check_signal(s_fex)?;
    let c = output_coefficients(params, omega)?;
    Ok(SpectrumSample::compose(
        omega,
        mechanical_response(&c),
        thermal_noise(&c, params.n_bar()),
        added_noise(&c),
        s_fex,
    ))
}

/// Same pipeline for a conventional sensor with a single oscillator:
/// drift matrix over `(X_c, P_c, X, P)` with the same κ, γ, Δ′ and G′.
pub fn single_mode_reference(
    params: &SystemParams,
    omega: f64,
    s_fex: f64,
) -> Result<SpectrumSample, SpectraError> {
    check_signal(s_fex)?;
    let k = params.kappa();
    let d = params.delta_eff();
    let g = params.g_eff();
    let gm = params.gamma();
    #[rustfmt::skip]
    let a = Matrix4::new(
        -k,   d,   0.0, 0.0,
        -d,  -k,  -g,   0.0,
        0.0, 0.0,  0.0, 1.0,
        -g,  0.0, -1.0, -gm,
    );
    let (chi, _) = resolvent(DMatrix::from_iterator(4, 4, a.iter().copied()), omega)?;
    let sk = (2.0 * k).sqrt();
    let sg = (2.0 * gm).sqrt();
    let mut x_out = [
        chi[(0, 0)] * sk * sk,
        chi[(0, 1)] * sk * sk,
        chi[(0, 3)] * sg * sk,
    ];
    let mut p_out = [
        chi[(1, 0)] * sk * sk,
        chi[(1, 1)] * sk * sk,
        chi[(1, 3)] * sg * sk,
    ];
    x_out[0] -= 1.0;
    p_out[1] -= 1.0;
    let (s, c) = params.theta().sin_cos();
    let a: Vec<Complex64> = (0..3).map(|i| x_out[i] * c + p_out[i] * s).collect();
    let r_m = a[2].norm_sqr();
    let s_th = if r_m == 0.0 {
        f64::INFINITY
    } else {
        params.n_bar() + 0.5
    };
    let n_add = ratio(0.5 * (a[0].norm_sqr() + a[1].norm_sqr()), r_m);
    Ok(SpectrumSample::compose(omega, r_m, s_th, n_add, s_fex))
}
