//! Closed-form bounds, evaluated exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

fn check_order(order: u128) -> Result<BigRational> {
    if order < 2 {
        return Err(Error::Precondition(format!("group order {order} is below 2")));
    }
    Ok(int(order))
}

fn choose2(n: u64) -> BigRational {
    let n = BigInt::from(n);
    int(&n * (&n - 1u32) / 2u32)
}

/// Advantage bound for a 4-oracle adversary against Ψ:
/// `(2q_c² + 4q_f q_c + 4q_g q_c + 2q_c² − 2q_c)/|G| + 2·C(q_c,2)·(2/|G| + 1/|G|²)`.
pub fn psi_bound(qc: u64, qf: u64, qg: u64, order: u128) -> Result<BigRational> {
    let n = check_order(order)?;
    let (c, f, g) = (int(qc), int(qf), int(qg));
    let two = int(2u32);
    let four = int(4u32);
    let linear = &two * &c * &c + &four * &f * &c + &four * &g * &c + &two * &c * &c - &two * &c;
    let pairs = &two * choose2(qc) * (&two / &n + BigRational::one() / (&n * &n));
    Ok(linear / &n + pairs)
}

/// The same bound in terms of the total query count `q`:
/// `2(3q² − 2q)/|G| + (q² − q)/|G|²`.
pub fn psi_bound_total_q(q: u64, order: u128) -> Result<BigRational> {
    let n = check_order(order)?;
    let q = int(q);
    let two = int(2u32);
    let three = int(3u32);
    let first = &two * (&three * &q * &q - &two * &q) / &n;
    let second = (&q * &q - &q) / (&n * &n);
    Ok(first + second)
}

/// Fraction of bad keys after `s` cipher and `t` permutation queries,
/// capped at 1: `min(1, 2st/|G|)`.
pub fn em_bad_key_bound(s: u64, t: u64, order: u128) -> Result<BigRational> {
    let n = check_order(order)?;
    let raw = int(2u32) * int(s) * int(t) / n;
    Ok(if raw > BigRational::one() { BigRational::one() } else { raw })
}

/// `2 q_g q_c / |G|`
pub fn badg_bound(qc: u64, qg: u64, order: u128) -> Result<BigRational> {
    let n = check_order(order)?;
    Ok(int(2u32) * int(qg) * int(qc) / n)
}

/// `(q_c² + 2 q_f q_c + 2·C(q_c,2)) / |G|`
pub fn bad_bound(qc: u64, qf: u64, order: u128) -> Result<BigRational> {
    let n = check_order(order)?;
    let c = int(qc);
    Ok((&c * &c + int(2u32) * int(qf) * &c + int(2u32) * choose2(qc)) / n)
}

/// `C(q_c,2) / |G|²`, for cipher answers drawn uniformly from `G²`.
pub fn inconsistency_bound(qc: u64, order: u128) -> Result<BigRational> {
    let n = check_order(order)?;
    Ok(choose2(qc) / (&n * &n))
}

/// Lossy conversion for reporting.
pub fn approx(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    if r.is_zero() {
        0.0
    } else {
        r.to_f64().unwrap_or(f64::NAN)
    }
}
