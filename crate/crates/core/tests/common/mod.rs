//! Physical-space oracles shared by the integration tests. Nothing here goes
//! through the FFT.

#![allow(dead_code)]

use chlab_core::fixtures::gaussian;
use chlab_core::{Grid, State};

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Physicists' Hermite polynomial; `d^j/dx^j e^{-x^2} = (-1)^j H_j(x) e^{-x^2}`.
pub fn hermite(j: usize, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if j == 0 {
        return h0;
    }
    for n in 1..j {
        let h2 = 2.0 * x * h1 - 2.0 * n as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// `|d^j e^{-x^2}|_0^2` by quadrature of the Hermite form.
pub fn gauss_deriv_l2_sq(j: usize) -> f64 {
    simpson(
        |x| {
            let v = hermite(j, x) * (-x * x).exp();
            v * v
        },
        -12.0,
        12.0,
        24_000,
    )
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `|d^j e^{-x^2}|_s^2` for integer `s`, via `(1+xi^2)^s = sum C(s,i) xi^{2i}`.
pub fn gauss_deriv_sq(j: usize, s: usize) -> f64 {
    (0..=s)
        .map(|i| binom(s, i) * gauss_deriv_l2_sq(j + i))
        .sum()
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

pub fn default_grid() -> Grid {
    Grid::new(16.0, 1024).unwrap()
}

pub fn gaussian_pair(grid: &Grid) -> State {
    State::new(gaussian(grid).unwrap(), gaussian(grid).unwrap()).unwrap()
}
