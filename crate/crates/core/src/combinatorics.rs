//! Exact integer combinatorics: factorials, binomials, multinomials and
//! falling factorials.
//!
//! Everything is computed in arbitrary precision and only converted to `f64`
//! at the point where it multiplies an amplitude.

use alloc::vec::Vec;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// `n!`
pub fn factorial(n: u64) -> BigUint {
    falling_factorial(n, n)
}

/// `C(n, k)`, zero when `k < 0` or `k > n`.
pub fn binomial(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    // Multiply-then-divide keeps every intermediate an exact binomial.
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `(n_1 + ... + n_d)! / (n_1! ... n_d!)`
pub fn multinomial(bottom: &[u32]) -> BigUint {
    let mut acc = BigUint::one();
    let mut partial = 0u64;
    for &n in bottom {
        partial += u64::from(n);
        acc *= binomial(partial, i64::from(n));
    }
    acc
}

/// `n (n-1) ... (n-k+1)`; `1` for `k = 0` and `0` for `k > n`.
pub fn falling_factorial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
    }
    acc
}

pub fn to_f64(value: &BigUint) -> f64 {
    value.to_f64().unwrap_or(f64::INFINITY)
}

pub fn binomial_f64(n: u64, k: i64) -> f64 {
    to_f64(&binomial(n, k))
}

pub fn factorial_f64(n: u64) -> f64 {
    to_f64(&factorial(n))
}

pub fn multinomial_f64(bottom: &[u32]) -> f64 {
    to_f64(&multinomial(bottom))
}

/// Exact product of falling factorials `prod_i (n_i)_(k_i)`.
///
/// Zero as soon as any `k_i > n_i`. Uses `u128` until it would overflow.
pub(crate) fn falling_product(pairs: impl IntoIterator<Item = (u32, u32)>) -> BigUint {
    let pairs: Vec<(u32, u32)> = pairs.into_iter().collect();
    let mut small: u128 = 1;
    let mut overflowed = false;
    'outer: for &(n, k) in &pairs {
        if k > n {
            return BigUint::zero();
        }
        for i in 0..k {
            match small.checked_mul(u128::from(n - i)) {
                Some(v) => small = v,
                None => {
                    overflowed = true;
                    break 'outer;
                }
            }
        }
    }
    if !overflowed {
        return BigUint::from(small);
    }
    let mut acc = BigUint::one();
    for (n, k) in pairs {
        acc *= falling_factorial(u64::from(n), u64::from(k));
    }
    acc
}

/// Square root of [`falling_product`], taken once at the end.
pub(crate) fn sqrt_falling_product(pairs: impl IntoIterator<Item = (u32, u32)>) -> f64 {
    crate::math::sqrt(to_f64(&falling_product(pairs)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    /// Pascal's triangle as an independent oracle.
    fn pascal(rows: usize) -> Vec<Vec<BigUint>> {
        let mut tri: Vec<Vec<BigUint>> = Vec::new();
        for n in 0..=rows {
            let mut row = alloc::vec![BigUint::one(); n + 1];
            for k in 1..n {
                row[k] = &tri[n - 1][k - 1] + &tri[n - 1][k];
            }
            tri.push(row);
        }
        tri
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(5, 2), big(10));
        assert_eq!(binomial(3, 5), big(0));
        assert_eq!(binomial(3, -1), big(0));
        assert_eq!(binomial(0, 0), big(1));
        let tri = pascal(20);
        assert_eq!(tri[20][10], big(184_756));
        assert_eq!(binomial(20, 10), tri[20][10]);
    }

    #[test]
    fn binomial_matches_pascal_up_to_60() {
        let tri = pascal(60);
        for n in 0..=60u64 {
            for k in 0..=n {
                assert_eq!(binomial(n, k as i64), tri[n as usize][k as usize], "C({n},{k})");
            }
        }
    }

    #[test]
    fn pascal_identity() {
        for n in 1..=30u64 {
            for k in -1..=(n as i64 + 1) {
                assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
            }
        }
    }

    #[test]
    fn vandermonde() {
        for m in 0..=20u64 {
            for n in 0..=20u64 {
                for q in 0..=(m + n) as i64 {
                    let lhs: BigUint = (0..=q).map(|k| binomial(m, k) * binomial(n, q - k)).sum();
                    assert_eq!(lhs, binomial(m + n, q));
                }
            }
        }
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial(&[1, 1]), big(2));
        assert_eq!(multinomial(&[2, 0, 0]), big(1));
        // 5!/(2!2!1!) via C(5,2) C(3,2) C(1,1)
        assert_eq!(multinomial(&[2, 2, 1]), binomial(5, 2) * binomial(3, 2));
        assert_eq!(multinomial(&[2, 2, 1]), big(30));
        assert_eq!(multinomial(&[]), big(1));
    }

    #[test]
    fn multinomial_is_factorial_ratio() {
        let cases: [&[u32]; 4] = [&[3, 1, 2], &[0, 4], &[6], &[1, 1, 1, 1]];
        for c in cases {
            let total: u64 = c.iter().map(|&n| u64::from(n)).sum();
            let denom: BigUint = c.iter().map(|&n| factorial(u64::from(n))).product();
            assert_eq!(multinomial(c) * denom, factorial(total));
        }
    }

    #[test]
    fn falling_factorial_examples() {
        assert_eq!(falling_factorial(4, 2), big(12));
        assert_eq!(falling_factorial(3, 0), big(1));
        assert_eq!(falling_factorial(6, 6), factorial(6));
        assert_eq!(factorial(6), big(720));
        assert_eq!(falling_factorial(2, 3), big(0));
    }

    #[test]
    fn falling_product_switches_to_bigint() {
        // 40! does not fit in u128
        let wide = falling_product([(40, 40)]);
        assert_eq!(wide, factorial(40));
        assert_eq!(falling_product([(3, 2), (2, 2)]), big(12));
        assert_eq!(falling_product([(3, 2), (1, 2)]), big(0));
        assert_eq!(falling_product([]), big(1));
    }

    #[test]
    fn large_factorials_stay_exact() {
        let f64_ = factorial(64);
        let f63 = factorial(63);
        assert_eq!(f64_, f63 * big(64));
    }
}
