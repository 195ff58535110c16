//! Fisher information over a CPI and closed-form range/angle estimation
//! bounds via 2x2 block (Schur complement) inversion.
//!
//! The parameter vector is [range, angle, Re reflection, Im reflection].
//! The carrier-phase range term is absorbed into the reflection
//! coefficient, so the range information comes solely from the frequency
//! offsets; bounds shrink as the offsets spread over a wider band.

use nalgebra::{DVector, Matrix2, Matrix4};
use num_complex::Complex64;
use thiserror::Error;

use crate::config::{SystemConfig, SPEED_OF_LIGHT};
use crate::sensing::{steering_range, steering_rx, steering_tx, SensingScenario};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CrbError {
    #[error("scenario carries no pulses")]
    NoPulses,
    #[error("reflection coefficient must be nonzero")]
    ZeroReflection,
    #[error("amplitude block of the information matrix is singular")]
    SingularAmplitudeBlock,
    #[error("Schur complement determinant is not positive: {0}")]
    NonPositiveDeterminant(f64),
}

/// Analytic derivatives of the three steering factors.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringDerivatives {
    /// d a / d angle (length M).
    pub rx: DVector<Complex64>,
    /// d c / d angle (length N).
    pub tx: DVector<Complex64>,
    /// d b / d range (length N).
    pub range: DVector<Complex64>,
}

/// Exact steering derivatives at one evaluation point.
pub fn steering_derivatives(
    angle_rad: f64,
    range_offset_m: f64,
    offsets: &[usize],
    cfg: &SystemConfig,
) -> SteeringDerivatives {
    let a = steering_rx(angle_rad, cfg);
    let c = steering_tx(angle_rad, cfg);
    let b = steering_range(range_offset_m, offsets, cfg);
    let two_pi = 2.0 * std::f64::consts::PI;
    let rx_rate = Complex64::new(
        0.0,
        two_pi * cfg.sensing_rx_spacing_m / cfg.wavelength_m() * angle_rad.cos(),
    );
    let tx_rate = Complex64::new(
        0.0,
        two_pi * cfg.tx_spacing_m / cfg.wavelength_m() * angle_rad.cos(),
    );
    let range_rate = Complex64::new(0.0, -2.0 * two_pi / SPEED_OF_LIGHT);
    SteeringDerivatives {
        rx: DVector::from_fn(a.len(), |m, _| rx_rate * m as f64 * a[m]),
        tx: DVector::from_fn(c.len(), |n, _| tx_rate * n as f64 * c[n]),
        range: DVector::from_fn(b.len(), |n, _| {
            range_rate * cfg.offset_hz(offsets[n]) * b[n]
        }),
    }
}

/// Fisher information and the derived bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct FimResult {
    /// 4x4 information matrix over [range, angle, Re xi, Im xi].
    pub fim: Matrix4<f64>,
    /// Schur complement of the amplitude block, 2x2 over [range, angle].
    pub schur: Matrix2<f64>,
    /// Range bound, m^2.
    pub crb_range: f64,
    /// Angle bound, rad^2.
    pub crb_angle: f64,
}

impl FimResult {
    pub fn root_crb_range_m(&self) -> f64 {
        self.crb_range.sqrt()
    }

    pub fn root_crb_angle_rad(&self) -> f64 {
        self.crb_angle.sqrt()
    }
}

/// Assemble the information matrix for a whole CPI and invert the target
/// block.
pub fn fim(scenario: &SensingScenario, cfg: &SystemConfig) -> Result<FimResult, CrbError> {
    if scenario.pulses() == 0 {
        return Err(CrbError::NoPulses);
    }
    let xi = scenario.reflection;
    if xi.norm_sqr() == 0.0 {
        return Err(CrbError::ZeroReflection);
    }
    let m = cfg.sensing_rx_antennas;
    let n = cfg.tx_antennas;
    let inv_noise = 1.0 / cfg.sensing_noise_power;
    let angle = scenario.target_angle_rad;
    let dr = scenario.range_offset();

    let mut g = Matrix4::<f64>::zeros();
    for offsets in &scenario.pulse_offsets {
        let a = steering_rx(angle, cfg);
        let c = steering_tx(angle, cfg);
        let b = steering_range(dr, offsets, cfg);
        let d = steering_derivatives(angle, dr, offsets, cfg);

        // Kronecker assembly of u, du/dR and du/dtheta, noise-whitened.
        let mut u = DVector::<Complex64>::zeros(m * n);
        let mut du_range = DVector::<Complex64>::zeros(m * n);
        let mut du_angle = DVector::<Complex64>::zeros(m * n);
        for row in 0..m {
            for col in 0..n {
                let i = row * n + col;
                let bc = b[col] * c[col];
                u[i] = a[row] * bc;
                du_range[i] = a[row] * d.range[col] * c[col];
                du_angle[i] = d.rx[row] * bc + a[row] * b[col] * d.tx[col];
            }
        }

        let xi2 = xi.norm_sqr();
        let rr: f64 = du_range.iter().map(|z| z.norm_sqr()).sum();
        let tt: f64 = du_angle.iter().map(|z| z.norm_sqr()).sum();
        let uu: f64 = u.iter().map(|z| z.norm_sqr()).sum();
        let rt = du_range.dotc(&du_angle);
        let ru = du_range.dotc(&u);
        let tu = du_angle.dotc(&u);

        g[(0, 0)] += inv_noise * xi2 * rr;
        g[(1, 1)] += inv_noise * xi2 * tt;
        g[(0, 1)] += inv_noise * (xi2 * rt).re;
        let cross_r = xi.conj() * ru;
        let cross_t = xi.conj() * tu;
        g[(0, 2)] += inv_noise * cross_r.re;
        g[(0, 3)] += inv_noise * (Complex64::i() * cross_r).re;
        g[(1, 2)] += inv_noise * cross_t.re;
        g[(1, 3)] += inv_noise * (Complex64::i() * cross_t).re;
        g[(2, 2)] += inv_noise * uu;
        g[(3, 3)] += inv_noise * uu;
    }
    g[(1, 0)] = g[(0, 1)];
    g[(2, 0)] = g[(0, 2)];
    g[(3, 0)] = g[(0, 3)];
    g[(2, 1)] = g[(1, 2)];
    g[(3, 1)] = g[(1, 3)];

    let prefactor = 2.0 * cfg.total_power / n as f64;
    let fim = g * prefactor;

    let target = fim.fixed_view::<2, 2>(0, 0).into_owned();
    let coupling = fim.fixed_view::<2, 2>(0, 2).into_owned();
    let coupling_t = fim.fixed_view::<2, 2>(2, 0).into_owned();
    let amplitude = fim.fixed_view::<2, 2>(2, 2).into_owned();
    let amplitude_inverse = amplitude
        .try_inverse()
        .ok_or(CrbError::SingularAmplitudeBlock)?;
    let schur = target - coupling * amplitude_inverse * coupling_t;
    let det = schur.determinant();
    if det.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(CrbError::NonPositiveDeterminant(det));
    }
    Ok(FimResult {
        fim,
        schur,
        crb_range: schur[(1, 1)] / det,
        crb_angle: schur[(0, 0)] / det,
    })
}

/// The (range, angle) bound pair, re-validated from the stored Schur
/// complement.
pub fn crb_values(result: &FimResult) -> Result<(f64, f64), CrbError> {
    let det = result.schur.determinant();
    if det.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(CrbError::NonPositiveDeterminant(det));
    }
    Ok((result.schur[(1, 1)] / det, result.schur[(0, 0)] / det))
}
