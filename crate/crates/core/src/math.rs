//! Float helpers that work without `std`.

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn powi(x: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..n {
        acc *= x;
    }
    acc
}

/// `1/sqrt(n)` with the pseudo-inverse convention `0` at `n = 0`.
pub(crate) fn inv_sqrt_or_zero(n: u32) -> f64 {
    if n == 0 {
        0.0
    } else {
        1.0 / sqrt(f64::from(n))
    }
}
