//! Dense univariate polynomial helpers over ℚ and ℤ, used for gcd and exact
//! division when reducing fractions. Coefficient vectors are stored from the
//! constant term upward with no trailing zeros; the zero polynomial is empty.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub(crate) fn trim<T: Zero>(v: &mut Vec<T>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

/// Integer polynomial with coprime coefficients and positive leading term,
/// proportional to `p`.
pub(crate) fn primitive_part(p: &[BigRational]) -> Vec<BigInt> {
    if p.is_empty() {
        return Vec::new();
    }
    let lcm = p
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    normalize_int(ints)
}

fn normalize_int(mut v: Vec<BigInt>) -> Vec<BigInt> {
    trim(&mut v);
    if v.is_empty() {
        return v;
    }
    let content = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let negative = v.last().is_some_and(|c| c.is_negative());
    for c in v.iter_mut() {
        *c = &*c / &content;
        if negative {
            *c = -&*c;
        }
    }
    v
}

/// Pseudo-remainder of `a` by `b` (both nonzero, `deg a >= deg b`).
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c = &*c * lb;
        }
        let shift = dr - db;
        for (k, bc) in b.iter().enumerate() {
            r[k + shift] -= &lr * bc;
        }
        trim(&mut r);
    }
    r
}

/// Greatest common divisor in ℚ[q], returned as a primitive integer polynomial.
pub(crate) fn gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigInt> {
    let mut x = primitive_part(a);
    let mut y = primitive_part(b);
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        if y.len() == 1 {
            return vec![BigInt::one()];
        }
        let r = normalize_int(pseudo_rem(&x, &y));
        x = y;
        y = r;
    }
    x
}

/// Exact quotient `a / b` in ℚ[q]; the caller guarantees divisibility.
pub(crate) fn div_exact(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    let mut quo = vec![BigRational::zero(); r.len().saturating_sub(db).max(1)];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let c = &r[dr] / lb;
        let shift = dr - db;
        for (k, bc) in b.iter().enumerate() {
            r[k + shift] -= &c * bc;
        }
        quo[shift] = c;
        r.pop();
        trim(&mut r);
    }
    debug_assert!(r.is_empty(), "inexact polynomial division");
    trim(&mut quo);
    quo
}

pub(crate) fn int_to_rat(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&c| BigRational::from_integer(c.into())).collect()
    }

    #[test]
    fn gcd_of_products() {
        // (1+q)(2-q) and (1+q)(3+q^2)
        let a = r(&[2, 1, -1]);
        let b = r(&[3, 3, 1, 1]);
        let g = gcd(&a, &b);
        assert_eq!(g, vec![BigInt::from(1), BigInt::from(1)]);
    }

    #[test]
    fn coprime_gives_one() {
        let g = gcd(&r(&[1, 1]), &r(&[1, -1]));
        assert_eq!(g, vec![BigInt::from(1)]);
    }

    #[test]
    fn exact_division() {
        let a = r(&[2, 1, -1]);
        let q = div_exact(&a, &r(&[1, 1]));
        assert_eq!(q, r(&[2, -1]));
    }
}
