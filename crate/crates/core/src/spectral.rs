//! Periodic grids, fields and Fourier multipliers.
//!
//! A grid samples `[-P*pi, P*pi)` at `N` points, so the discrete wavenumbers are
//! `xi_k = k / P`. Spectra follow the continuous convention
//!
//! ```text
//! f^(xi_k) = dx * sum_j f(x_j) exp(-i xi_k x_j)
//! ```
//!
//! and are stored in FFT order (index `k >= N/2` is the wavenumber `(k - N) / P`).
//! Because `x_0 = -P*pi` each raw FFT coefficient picks up a factor `(-1)^k`.
//!
//! Sobolev norms are Riemann sums of the Fourier integral,
//!
//! ```text
//! |f|_s^2 = (2 pi)^-1 sum_k (1 + xi_k^2)^s |f^(xi_k)|^2 dxi
//! ```
//!
//! which for a band-limited periodic field is exact.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Largest derivative order a grid will materialise by default.
pub const DEFAULT_ORDER_LIMIT: usize = 16;

struct GridInner {
    half_width: f64,
    modes: usize,
    order_limit: usize,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Uniform periodic grid with cached FFT plans. Cloning is cheap.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("half_width", &self.inner.half_width)
            .field("modes", &self.inner.modes)
            .field("order_limit", &self.inner.order_limit)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.half_width == other.inner.half_width
                && self.inner.modes == other.inner.modes)
    }
}

impl Grid {
    /// Grid on `[-P*pi, P*pi)` with `modes` points.
    pub fn new(half_width: f64, modes: usize) -> Result<Self> {
        Self::with_order_limit(half_width, modes, DEFAULT_ORDER_LIMIT)
    }

    pub fn with_order_limit(half_width: f64, modes: usize, order_limit: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half width must be positive, got {half_width}"
            )));
        }
        if modes < 8 || modes % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "mode count must be even and at least 8, got {modes}"
            )));
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(modes);
        let inverse = planner.plan_fft_inverse(modes);
        let wavenumbers = (0..modes)
            .map(|k| signed_index(k, modes) as f64 / half_width)
            .collect();
        Ok(Grid {
            inner: Arc::new(GridInner {
                half_width,
                modes,
                order_limit,
                wavenumbers,
                forward,
                inverse,
            }),
        })
    }

    pub fn half_width(&self) -> f64 {
        self.inner.half_width
    }

    pub fn modes(&self) -> usize {
        self.inner.modes
    }

    pub fn order_limit(&self) -> usize {
        self.inner.order_limit
    }

    pub fn dx(&self) -> f64 {
        2.0 * PI * self.inner.half_width / self.inner.modes as f64
    }

    pub fn dxi(&self) -> f64 {
        1.0 / self.inner.half_width
    }

    /// Wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.inner.wavenumbers
    }

    pub fn max_wavenumber(&self) -> f64 {
        self.inner.modes as f64 / (2.0 * self.inner.half_width)
    }

    /// Largest |k| kept by the 2/3 rule.
    pub fn dealias_cutoff(&self) -> usize {
        self.inner.modes / 3
    }

    pub fn nyquist(&self) -> usize {
        self.inner.modes / 2
    }

    pub fn point(&self, j: usize) -> f64 {
        -PI * self.inner.half_width + j as f64 * self.dx()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.inner.modes).map(move |j| self.point(j))
    }

    pub fn signed_index(&self, k: usize) -> i64 {
        signed_index(k, self.inner.modes)
    }

    /// FFT slot of the signed mode number `k`.
    pub fn slot(&self, k: i64) -> usize {
        k.rem_euclid(self.inner.modes as i64) as usize
    }

    /// Physical samples to continuous-convention spectrum.
    pub fn forward(&self, samples: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.inner.forward.process(&mut buf);
        let dx = self.dx();
        for (k, c) in buf.iter_mut().enumerate() {
            let sign = if k % 2 == 0 { dx } else { -dx };
            *c *= sign;
        }
        buf
    }

    /// Spectrum back to physical samples (real part only).
    pub fn inverse(&self, spectrum: &[Complex64]) -> Vec<f64> {
        let n = self.inner.modes as f64;
        let dx = self.dx();
        let mut buf: Vec<Complex64> = spectrum
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c } else { -c })
            .collect();
        self.inner.inverse.process(&mut buf);
        buf.iter().map(|c| c.re / (n * dx)).collect()
    }

    fn check(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::IncompatibleGrid)
        }
    }
}

fn signed_index(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// `(1 + xi^2)^s`, with integer powers taken exactly.
#[inline]
pub fn sobolev_weight(xi: f64, s: f64) -> f64 {
    let base = 1.0 + xi * xi;
    if s.fract() == 0.0 && s.abs() <= 64.0 {
        base.powi(s as i32)
    } else {
        base.powf(s)
    }
}

#[inline]
fn times_i_xi(c: Complex64, xi: f64) -> Complex64 {
    Complex64::new(-c.im * xi, c.re * xi)
}

/// Real field on a grid, held both as samples and as a Hermitian spectrum.
#[derive(Clone, Debug)]
pub struct Field {
    grid: Grid,
    samples: Vec<f64>,
    spectrum: Vec<Complex64>,
}

impl Field {
    pub fn from_samples(grid: &Grid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.modes() {
            return Err(Error::LengthMismatch {
                expected: grid.modes(),
                got: samples.len(),
            });
        }
        if let Some(index) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        let mut spectrum = grid.forward(&samples);
        hermitian(&mut spectrum);
        Ok(Field {
            grid: grid.clone(),
            samples,
            spectrum,
        })
    }

    /// Samples `f` at the grid points.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = grid.points().map(f).collect();
        Self::from_samples(grid, samples)
    }

    /// Builds a real field from a spectrum, symmetrising it first.
    /// An already Hermitian spectrum passes through bit for bit.
    pub fn from_spectrum(grid: &Grid, mut spectrum: Vec<Complex64>) -> Result<Self> {
        if spectrum.len() != grid.modes() {
            return Err(Error::LengthMismatch {
                expected: grid.modes(),
                got: spectrum.len(),
            });
        }
        if let Some(index) = spectrum
            .iter()
            .position(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::NonFiniteSample { index });
        }
        hermitian(&mut spectrum);
        let samples = grid.inverse(&spectrum);
        Ok(Field {
            grid: grid.clone(),
            samples,
            spectrum,
        })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Field {
            grid: grid.clone(),
            samples: vec![0.0; grid.modes()],
            spectrum: vec![Complex64::new(0.0, 0.0); grid.modes()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    /// Integral over the period; the zero mode of the spectrum.
    pub fn integral(&self) -> f64 {
        self.spectrum[0].re
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.spectrum.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Applies a Fourier multiplier `m(xi)` mode by mode.
    pub fn apply_multiplier(&self, m: impl Fn(f64) -> Complex64) -> Field {
        let xi = self.grid.wavenumbers();
        let spectrum = self
            .spectrum
            .iter()
            .zip(xi)
            .map(|(&c, &x)| c * m(x))
            .collect();
        self.with_spectrum(spectrum)
    }

    fn with_spectrum(&self, spectrum: Vec<Complex64>) -> Field {
        // multipliers of real symbols keep the spectrum finite and Hermitian
        Field::from_spectrum(&self.grid, spectrum).expect("multiplier preserved the grid")
    }

    /// `j`-th derivative. The multiplier `(i xi)` is applied `j` times in turn,
    /// so repeated first derivatives agree exactly with one call.
    pub fn derivative(&self, j: usize) -> Result<Field> {
        let limit = self.grid.order_limit();
        if j > limit {
            return Err(Error::OrderOverflow { order: j, limit });
        }
        if j == 0 {
            return Ok(self.clone());
        }
        let nyq = self.grid.nyquist();
        let spectrum = self
            .spectrum
            .iter()
            .zip(self.grid.wavenumbers())
            .enumerate()
            .map(|(k, (&c, &xi))| {
                if k == nyq {
                    return Complex64::new(0.0, 0.0);
                }
                let mut c = c;
                for _ in 0..j {
                    c = times_i_xi(c, xi);
                }
                c
            })
            .collect();
        Ok(self.with_spectrum(spectrum))
    }

    /// `Lambda^-2 d^p f` with `Lambda^-2 = (1 - d^2)^-1`.
    pub fn helmholtz_inv(&self, p: usize) -> Result<Field> {
        if p > 2 {
            return Err(Error::InvalidParameter(format!(
                "Helmholtz inverse takes p in {{0, 1, 2}}, got {p}"
            )));
        }
        let nyq = self.grid.nyquist();
        let spectrum = self
            .spectrum
            .iter()
            .zip(self.grid.wavenumbers())
            .enumerate()
            .map(|(k, (&c, &xi))| {
                if p > 0 && k == nyq {
                    return Complex64::new(0.0, 0.0);
                }
                let mut c = c / (1.0 + xi * xi);
                for _ in 0..p {
                    c = times_i_xi(c, xi);
                }
                c
            })
            .collect();
        Ok(self.with_spectrum(spectrum))
    }

    /// Zeros every mode with `|k| > N/3`.
    pub fn dealiased(&self) -> Field {
        let cut = self.grid.dealias_cutoff() as i64;
        let mut spectrum = self.spectrum.clone();
        for (k, c) in spectrum.iter_mut().enumerate() {
            if self.grid.signed_index(k).abs() > cut {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        self.with_spectrum(spectrum)
    }

    pub fn norm_sq(&self, s: f64) -> f64 {
        self.deriv_norm_sq(0, s)
    }

    pub fn norm(&self, s: f64) -> f64 {
        self.norm_sq(s).sqrt()
    }

    /// `|f^(j)|_s^2` straight from the spectrum.
    pub fn deriv_norm_sq(&self, j: usize, s: f64) -> f64 {
        let nyq = self.grid.nyquist();
        let sum: f64 = self
            .spectrum
            .iter()
            .zip(self.grid.wavenumbers())
            .enumerate()
            .filter(|&(k, _)| j == 0 || k != nyq)
            .map(|(_, (c, &xi))| sobolev_weight(xi, s) * (xi * xi).powi(j as i32) * c.norm_sqr())
            .sum();
        sum * self.grid.dxi() / (2.0 * PI)
    }

    /// `|f^(j)|_s^2` for `j = 0..=max_order`.
    pub fn deriv_norms_sq(&self, max_order: usize, s: f64) -> Vec<f64> {
        let nyq = self.grid.nyquist();
        let scale = self.grid.dxi() / (2.0 * PI);
        let mut out = vec![0.0; max_order + 1];
        for (k, (c, &xi)) in self
            .spectrum
            .iter()
            .zip(self.grid.wavenumbers())
            .enumerate()
        {
            let mut w = sobolev_weight(xi, s) * c.norm_sqr() * scale;
            let x2 = xi * xi;
            for (j, slot) in out.iter_mut().enumerate() {
                if j == 0 || k != nyq {
                    *slot += w;
                }
                w *= x2;
            }
        }
        out
    }

    pub fn inner(&self, other: &Field, s: f64) -> Result<f64> {
        self.deriv_inner(other, 0, s)
    }

    /// `<f^(j), g^(j)>_s`.
    pub fn deriv_inner(&self, other: &Field, j: usize, s: f64) -> Result<f64> {
        self.grid.check(&other.grid)?;
        let nyq = self.grid.nyquist();
        let sum: f64 = self
            .spectrum
            .iter()
            .zip(&other.spectrum)
            .zip(self.grid.wavenumbers())
            .enumerate()
            .filter(|&(k, _)| j == 0 || k != nyq)
            .map(|(_, ((a, b), &xi))| {
                sobolev_weight(xi, s) * (xi * xi).powi(j as i32) * (a * b.conj()).re
            })
            .sum();
        Ok(sum * self.grid.dxi() / (2.0 * PI))
    }

    /// Pointwise product without dealiasing.
    pub fn mul(&self, other: &Field) -> Result<Field> {
        self.grid.check(&other.grid)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b)
            .collect();
        Field::from_samples(&self.grid, samples)
    }

    pub fn mul_dealiased(&self, other: &Field) -> Result<Field> {
        Ok(self.mul(other)?.dealiased())
    }

    pub fn scale(&self, c: f64) -> Field {
        Field {
            grid: self.grid.clone(),
            samples: self.samples.iter().map(|x| x * c).collect(),
            spectrum: self.spectrum.iter().map(|x| x * c).collect(),
        }
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &Field) -> Result<Field> {
        self.grid.check(&other.grid)?;
        Ok(Field {
            grid: self.grid.clone(),
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + c * b)
                .collect(),
            spectrum: self
                .spectrum
                .iter()
                .zip(&other.spectrum)
                .map(|(a, b)| a + b * c)
                .collect(),
        })
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.axpy(-1.0, other)
    }
}

/// Forces `c[-k] = conj(c[k])`, a real zero mode and a real Nyquist mode.
fn hermitian(c: &mut [Complex64]) {
    let n = c.len();
    c[0].im = 0.0;
    c[n / 2].im = 0.0;
    for k in 1..n / 2 {
        let a = c[k];
        let b = c[n - k];
        let avg = if a == b.conj() {
            a
        } else {
            (a + b.conj()) * 0.5
        };
        c[k] = avg;
        c[n - k] = avg.conj();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(4.0, 128).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(1.0, 7).is_err());
        assert!(Grid::new(1.0, 6).is_err());
        assert!(Grid::new(0.0, 16).is_err());
        assert!(Grid::new(1.0, 8).is_ok());
    }

    #[test]
    fn wavenumber_layout() {
        let g = Grid::new(2.0, 8).unwrap();
        assert_eq!(
            g.wavenumbers(),
            &[0.0, 0.5, 1.0, 1.5, -2.0, -1.5, -1.0, -0.5]
        );
        assert_eq!(g.slot(-1), 7);
        assert!((g.point(0) + 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn round_trip() {
        let g = grid();
        let f = Field::from_fn(&g, |x| (x / 4.0).sin() + 0.3 * (-x * x).exp()).unwrap();
        let back = g.inverse(f.spectrum());
        for (a, b) in back.iter().zip(f.samples()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn non_finite_rejected() {
        let g = grid();
        let mut s = vec![0.0; 128];
        s[5] = f64::NAN;
        assert!(matches!(
            Field::from_samples(&g, s),
            Err(Error::NonFiniteSample { index: 5 })
        ));
    }

    #[test]
    fn mode_norms() {
        // cos(x/P * k) has norm^2 = (1+xi^2)^s * P*pi
        let g = grid();
        let f = Field::from_fn(&g, |x| (3.0 * x / 4.0).cos()).unwrap();
        let xi: f64 = 0.75;
        let want = (1.0 + xi * xi).powi(2) * 4.0 * PI;
        assert!((f.norm_sq(2.0) - want).abs() < 1e-10 * want);
    }

    #[test]
    fn order_limit() {
        let g = Grid::with_order_limit(1.0, 16, 3).unwrap();
        let f = Field::from_fn(&g, |x| x.sin()).unwrap();
        assert!(f.derivative(3).is_ok());
        assert!(matches!(f.derivative(4), Err(Error::OrderOverflow { .. })));
    }

    #[test]
    fn grid_mismatch() {
        let a = Field::zeros(&Grid::new(1.0, 16).unwrap());
        let b = Field::zeros(&Grid::new(2.0, 16).unwrap());
        assert!(matches!(a.inner(&b, 0.0), Err(Error::IncompatibleGrid)));
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn hermitian_is_idempotent() {
        let g = grid();
        let f = Field::from_fn(&g, |x| (-(x - 0.3) * (x - 0.3)).exp()).unwrap();
        let again = Field::from_spectrum(&g, f.spectrum().to_vec()).unwrap();
        assert_eq!(again.spectrum(), f.spectrum());
    }

    #[test]
    fn deriv_norms_agree() {
        let g = grid();
        let f = Field::from_fn(&g, |x| (-x * x).exp()).unwrap();
        let all = f.deriv_norms_sq(5, 2.5);
        for (j, v) in all.iter().enumerate() {
            let one = f.deriv_norm_sq(j, 2.5);
            assert!((v - one).abs() <= 1e-12 * one.max(1e-300));
            let via = f.derivative(j).unwrap().norm_sq(2.5);
            assert!((v - via).abs() <= 1e-12 * one.max(1e-300));
        }
    }
}
