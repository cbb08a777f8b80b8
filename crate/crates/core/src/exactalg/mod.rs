//! Exact integer linear algebra and sparse Laurent polynomials.

mod frobenius;
mod lattice;
mod matrix;
mod poly;
mod snf;

pub use frobenius::{frobenius_substitute, FrobeniusLiftSpec};
pub use lattice::{lattice_quotient, ElementaryDivisors, Lattice, Quotient};
pub use matrix::IntegerMatrix;
pub use poly::{LaurentPolynomial, Monomial, Ring, Variable};
pub use snf::{kernel, row_hnf, snf, solve, SmithForm};

pub(crate) use poly::mod_inverse;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// `p^k` as a big integer.
pub fn pow_big(p: u32, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

/// p-adic valuation of a nonzero integer; `u32::MAX` for zero.
pub fn p_adic_valuation(c: &BigInt, p: u32) -> u32 {
    if c.is_zero() {
        return u32::MAX;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut x = c.clone();
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

pub fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// The p-local rational `num/den` reduced into `Z/modulus`, where `modulus`
/// is a power of `p` and `den` is prime to `p` after cancelling common factors.
pub fn p_local_residue(num: &BigInt, den: &BigInt, modulus: &BigInt) -> Result<BigInt> {
    let g = num.gcd(den);
    let (num, den) = (num / &g, den / &g);
    let inv = mod_inverse(&den, modulus)
        .ok_or_else(|| Error::Dimension(format!("denominator {den} is not a unit modulo {modulus}")))?;
    Ok((num * inv).mod_floor(modulus))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations_and_binomials() {
        assert_eq!(p_adic_valuation(&BigInt::from(24), 2), 3);
        assert_eq!(p_adic_valuation(&BigInt::from(-9), 3), 2);
        assert_eq!(p_adic_valuation(&BigInt::from(5), 3), 0);
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(factorial(5), BigInt::from(120));
        assert!(is_prime(2) && is_prime(3) && is_prime(13) && !is_prime(1) && !is_prime(9));
    }

    #[test]
    fn p_local_scalars() {
        // 9/2 mod 9 = 0, 3^2/2! at p = 3
        assert_eq!(p_local_residue(&BigInt::from(9), &BigInt::from(2), &BigInt::from(9)).unwrap(), BigInt::zero());
        // 2/2 = 1
        assert_eq!(p_local_residue(&BigInt::from(2), &BigInt::from(2), &BigInt::from(8)).unwrap(), BigInt::one());
        // 1/3 mod 4 = 3
        assert_eq!(p_local_residue(&BigInt::from(1), &BigInt::from(3), &BigInt::from(4)).unwrap(), BigInt::from(3));
    }
}
