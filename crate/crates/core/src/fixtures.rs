//! Initial data and random analytic test fields.

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{Field, Grid};

/// Closed-form profiles usable as initial data.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// `a exp(-((x - c) / w)^2)`
    Gaussian {
        amplitude: f64,
        width: f64,
        center: f64,
    },
    /// `a sech((x - c) / w)`
    Sech {
        amplitude: f64,
        width: f64,
        center: f64,
    },
    /// `a sech^2((x - c) / w)`
    Sech2 {
        amplitude: f64,
        width: f64,
        center: f64,
    },
    /// spectrum `a exp(-r |xi|)`
    SyntheticSpectrum {
        amplitude: f64,
        rate: f64,
    },
    Zero,
}

impl Profile {
    pub fn field(&self, grid: &Grid) -> Result<Field> {
        match *self {
            Profile::Gaussian {
                amplitude,
                width,
                center,
            } => Field::from_fn(grid, |x| {
                let y = (x - center) / width;
                amplitude * (-y * y).exp()
            }),
            Profile::Sech {
                amplitude,
                width,
                center,
            } => Field::from_fn(grid, |x| amplitude * sech((x - center) / width)),
            Profile::Sech2 {
                amplitude,
                width,
                center,
            } => Field::from_fn(grid, |x| {
                let s = sech((x - center) / width);
                amplitude * s * s
            }),
            Profile::SyntheticSpectrum { amplitude, rate } => {
                synthetic_spectrum(grid, amplitude, rate)
            }
            Profile::Zero => Ok(Field::zeros(grid)),
        }
    }
}

pub fn sech(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

pub fn gaussian(grid: &Grid) -> Result<Field> {
    Field::from_fn(grid, |x| (-x * x).exp())
}

/// Real even field with spectrum exactly `a exp(-r |xi|)`.
pub fn synthetic_spectrum(grid: &Grid, amplitude: f64, rate: f64) -> Result<Field> {
    if !(rate > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "decay rate must be positive, got {rate}"
        )));
    }
    let spectrum = grid
        .wavenumbers()
        .iter()
        .map(|xi| Complex64::new(amplitude * (-rate * xi.abs()).exp(), 0.0))
        .collect();
    Field::from_spectrum(grid, spectrum)
}

/// Random field whose Fourier coefficients are complex Gaussians damped by
/// `exp(-r |xi|)` and supported on `|k| < N/4`, so pointwise products are
/// alias-free.
pub fn random_analytic<R: Rng + ?Sized>(
    grid: &Grid,
    rng: &mut R,
    rate: f64,
    amplitude: f64,
) -> Result<Field> {
    let n = grid.modes();
    let band = (n / 4 - 1) as i64;
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
    let scale = amplitude * grid.half_width();
    for k in 0..=band {
        let xi = k as f64 / grid.half_width();
        let damp = scale * (-rate * xi).exp();
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = if k == 0 {
            0.0
        } else {
            rng.sample(StandardNormal)
        };
        let c = Complex64::new(re, im) * damp;
        spectrum[grid.slot(k)] = c;
        if k > 0 {
            spectrum[grid.slot(-k)] = c.conj();
        }
    }
    Field::from_spectrum(grid, spectrum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_is_band_limited_and_seeded() {
        let g = Grid::new(4.0, 64).unwrap();
        let a = random_analytic(&g, &mut ChaCha8Rng::seed_from_u64(3), 1.0, 1.0).unwrap();
        let b = random_analytic(&g, &mut ChaCha8Rng::seed_from_u64(3), 1.0, 1.0).unwrap();
        assert_eq!(a.samples(), b.samples());
        for (k, c) in a.spectrum().iter().enumerate() {
            if g.signed_index(k).abs() >= 16 {
                assert_eq!(c.norm(), 0.0);
            }
        }
    }

    #[test]
    fn sech_is_stable() {
        assert_eq!(sech(0.0), 1.0);
        assert!(sech(800.0) == 0.0);
        assert!((sech(1.0) - 1.0 / 1f64.cosh()).abs() < 1e-15);
    }
}
