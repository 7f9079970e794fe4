//! Exact factorial constants carried as reduced `u64` ratios.

use num_rational::Ratio;

use crate::error::{domain, Result};

pub type Rational = Ratio<u64>;

fn overflow() -> crate::Error {
    domain("integer overflow in exact coefficient (n too large for 64-bit ratios)")
}

pub fn factorial(m: u64) -> Result<u64> {
    (1..=m).try_fold(1u64, |acc, i| acc.checked_mul(i)).ok_or_else(overflow)
}

/// `m!!` with `(-1)!! = 0!! = 1`.
pub fn double_factorial(m: i64) -> Result<u64> {
    if m < -1 {
        return Err(domain(alloc::format!("double factorial of {m} is undefined")));
    }
    let mut acc = 1u64;
    let mut i = m;
    while i > 1 {
        acc = acc.checked_mul(i as u64).ok_or_else(overflow)?;
        i -= 2;
    }
    Ok(acc)
}

fn ratio(num: u64, den: u64) -> Rational {
    Ratio::new(num, den)
}

fn checked_prod(a: u64, b: u64) -> Result<u64> {
    a.checked_mul(b).ok_or_else(overflow)
}

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `C(n,k,i) = (2k-i-1)! (n-2k+i)! / ((n-k)! (2k-2i-1)!! i!)`, the weights
/// of the mixed symmetric functions in the general boundary operator.
pub fn coefficient_c(n: usize, k: usize, i: usize) -> Result<Rational> {
    if k == 0 {
        return Err(domain("C(n,k,i) needs k >= 1"));
    }
    if n < 2 * k {
        return Err(domain(alloc::format!("C(n,k,i) needs n >= 2k, got n={n}, k={k}")));
    }
    if i >= k {
        return Err(domain(alloc::format!("C(n,k,i) needs 0 <= i <= k-1, got i={i}, k={k}")));
    }
    let (n, k, i) = (n as u64, k as u64, i as u64);
    let num = checked_prod(factorial(2 * k - i - 1)?, factorial(n - 2 * k + i)?)?;
    let den = checked_prod(
        checked_prod(factorial(n - k)?, double_factorial((2 * k - 2 * i) as i64 - 1)?)?,
        factorial(i)?,
    )?;
    Ok(ratio(num, den))
}

/// Coefficient of `sigma_s(A^T) h^{2k-2s-1}` in the umbilic boundary
/// curvature: `(n-1-s)! / ((n-k)! (2k-2s-1)!!)`, for `0 <= s <= k-1`.
/// `s = 0` is the leading `h^{2k-1}` term.
pub fn boundary_coefficient(n: usize, k: usize, s: usize) -> Result<Rational> {
    if k == 0 || s >= k || n < k {
        return Err(domain(alloc::format!("boundary coefficient out of range: n={n}, k={k}, s={s}")));
    }
    let (n, k, s) = (n as u64, k as u64, s as u64);
    let num = factorial(n - 1 - s)?;
    let den = checked_prod(factorial(n - k)?, double_factorial((2 * k - 2 * s) as i64 - 1)?)?;
    Ok(ratio(num, den))
}

pub fn binomial(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        // exact at every step: acc * (n-i) / (i+1) is C(n, i+1)
        acc = acc.checked_mul(n - i).ok_or_else(overflow)? / (i + 1);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_factorial_conventions() {
        assert_eq!(double_factorial(-1).unwrap(), 1);
        assert_eq!(double_factorial(0).unwrap(), 1);
        assert_eq!(double_factorial(5).unwrap(), 15);
        assert_eq!(double_factorial(6).unwrap(), 48);
        assert!(double_factorial(-3).is_err());
    }

    #[test]
    fn c_examples() {
        assert_eq!(coefficient_c(4, 2, 1).unwrap(), Ratio::from_integer(1));
        assert_eq!(coefficient_c(4, 2, 0).unwrap(), Ratio::from_integer(1));
        assert!(coefficient_c(4, 2, 2).is_err());
        assert!(coefficient_c(3, 2, 0).is_err());
    }

    #[test]
    fn c_brute_force_small() {
        // direct f64 evaluation of the closed form for a grid of admissible (n,k,i)
        fn f(m: u64) -> f64 {
            (1..=m).map(|x| x as f64).product()
        }
        fn df(m: i64) -> f64 {
            let mut a = 1.0;
            let mut i = m;
            while i > 1 {
                a *= i as f64;
                i -= 2;
            }
            a
        }
        for n in 2..=12u64 {
            for k in 1..=n / 2 {
                for i in 0..k {
                    let want = f(2 * k - i - 1) * f(n - 2 * k + i)
                        / (f(n - k) * df((2 * k - 2 * i) as i64 - 1) * f(i));
                    let got = to_f64(coefficient_c(n as usize, k as usize, i as usize).unwrap());
                    assert!((got - want).abs() <= 1e-12 * want, "n={n} k={k} i={i}");
                }
            }
        }
    }

    #[test]
    fn boundary_coefficients_n4_k2() {
        assert_eq!(boundary_coefficient(4, 2, 0).unwrap(), Ratio::from_integer(1));
        assert_eq!(boundary_coefficient(4, 2, 1).unwrap(), Ratio::from_integer(1));
        // k = 1: (n-1)!/((n-1)! 1!!) = 1
        assert_eq!(boundary_coefficient(7, 1, 0).unwrap(), Ratio::from_integer(1));
    }

    #[test]
    fn overflow_is_a_domain_error() {
        assert!(factorial(21).is_err());
        assert!(factorial(20).is_ok());
        assert!(coefficient_c(40, 2, 0).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2).unwrap(), 6);
        assert_eq!(binomial(6, 3).unwrap(), 20);
        assert_eq!(binomial(8, 3).unwrap(), 56);
        assert_eq!(binomial(3, 5).unwrap(), 0);
    }
}
