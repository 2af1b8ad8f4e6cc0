use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::dense;
use super::laurent::{LaurentPoly, Rational};
use crate::error::{Error, Result};

/// An exact element of ℚ(q).
///
/// Canonical form: the denominator is an ordinary polynomial in `q` with
/// constant term `1`, all powers of `q` live in the numerator, and numerator
/// and denominator are coprime. Two scalars are equal as values iff their
/// representations are identical, so derived `Eq` and `Hash` are sound.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl Scalar {
    pub fn zero() -> Self {
        Self {
            num: LaurentPoly::zero(),
            den: LaurentPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_laurent(LaurentPoly::one())
    }

    pub fn q() -> Self {
        Self::q_pow(1)
    }

    pub fn q_pow(k: i64) -> Self {
        Self::from_laurent(LaurentPoly::q_pow(k))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(n.into()))
    }

    pub fn from_rational(c: Rational) -> Self {
        Self::from_laurent(LaurentPoly::constant(c))
    }

    pub fn from_laurent(p: LaurentPoly) -> Self {
        Self {
            num: p,
            den: LaurentPoly::one(),
        }
    }

    /// Reduces `num / den` to canonical form.
    pub fn from_fraction(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: LaurentPoly, den: LaurentPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (ln, dn) = num.to_dense();
        let (ld, dd) = den.to_dense();
        let shift = ln - ld;
        let (mut dn, mut dd) = if dd.len() == 1 {
            (dn, dd)
        } else {
            let g = dense::gcd(&dn, &dd);
            if g.len() > 1 {
                let g = dense::int_to_rat(&g);
                (dense::div_exact(&dn, &g), dense::div_exact(&dd, &g))
            } else {
                (dn, dd)
            }
        };
        let c0 = dd[0].clone();
        if !c0.is_one() {
            for c in dn.iter_mut().chain(dd.iter_mut()) {
                *c = &*c / &c0;
            }
        }
        Self {
            num: LaurentPoly::from_dense(shift, &dn),
            den: LaurentPoly::from_dense(0, &dd),
        }
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True when the value lies in ℚ[q, q⁻¹].
    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_laurent(&self) -> Option<&LaurentPoly> {
        self.is_laurent().then_some(&self.num)
    }

    /// Order of vanishing at `q = 0`; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        // den(0) = 1, so only the numerator contributes.
        self.num.min_exp()
    }

    /// Membership in 𝔸₀, the rational functions without a pole at `q = 0`.
    pub fn is_regular_at_zero(&self) -> bool {
        self.valuation().is_none_or(|v| v >= 0)
    }

    /// Membership in 𝔸_∞, the rational functions without a pole at `q = ∞`.
    pub fn is_regular_at_infinity(&self) -> bool {
        match (self.num.max_exp(), self.den.max_exp()) {
            (Some(n), Some(d)) => n <= d,
            _ => true,
        }
    }

    pub fn eval_at_zero(&self) -> Result<Rational> {
        if !self.is_regular_at_zero() {
            return Err(Error::PoleAtZero);
        }
        Ok(self.num.coeff(0))
    }

    /// The image under `q ↦ q⁻¹`.
    pub fn bar(&self) -> Self {
        if self.den.is_one() {
            return Self::from_laurent(self.num.bar());
        }
        Self::reduce(self.num.bar(), self.den.bar())
    }

    pub fn is_bar_invariant(&self) -> bool {
        *self == self.bar()
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(self.den.clone(), self.num.clone()))
    }

    /// Laurent-series coefficients at `q = 0` for exponents `lo..=hi`.
    pub fn series(&self, lo: i64, hi: i64) -> Vec<Rational> {
        if hi < lo {
            return Vec::new();
        }
        let len = (hi - lo + 1) as usize;
        let Some(v) = self.valuation() else {
            return vec![Rational::zero(); len];
        };
        if self.den.is_one() {
            return (lo..=hi).map(|e| self.num.coeff(e)).collect();
        }
        // 1/den as a power series up to degree hi - v.
        let need = (hi - v).max(-1) + 1;
        let (_, d) = self.den.to_dense();
        let mut inv = Vec::with_capacity(need.max(0) as usize);
        for k in 0..need.max(0) as usize {
            if k == 0 {
                inv.push(Rational::one());
                continue;
            }
            let mut acc = Rational::zero();
            for j in 1..=k.min(d.len() - 1) {
                acc -= &d[j] * &inv[k - j];
            }
            inv.push(acc);
        }
        (lo..=hi)
            .map(|t| {
                let mut acc = Rational::zero();
                for (e, c) in self.num.terms() {
                    if e > t {
                        break;
                    }
                    let k = (t - e) as usize;
                    if k < inv.len() {
                        acc += c * &inv[k];
                    }
                }
                acc
            })
            .collect()
    }

    /// A rough size measure used to choose elimination pivots.
    pub fn complexity(&self) -> usize {
        let bits = |p: &LaurentPoly| -> usize {
            p.terms()
                .map(|(_, c)| (c.numer().bits() + c.denom().bits()) as usize)
                .sum()
        };
        4 * (self.num.num_terms() + self.den.num_terms()) + bits(&self.num) + bits(&self.den) / 8
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<LaurentPoly> for Scalar {
    fn from(p: LaurentPoly) -> Self {
        Self::from_laurent(p)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(c: Rational) -> Self {
        Self::from_rational(c)
    }
}

impl fmt::Display for Scalar {
    /// Laurent polynomials print bare; proper fractions as `(num)/(den)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            if self.den.is_one() {
                return Scalar::from_laurent(&self.num + &rhs.num);
            }
            return Scalar::reduce(&self.num + &rhs.num, self.den.clone());
        }
        Scalar::reduce(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar::from_laurent(&self.num * &rhs.num);
        }
        Scalar::reduce(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    /// Panics on division by zero, like integer division.
    fn div(self, rhs: &Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division of a scalar by zero");
        if self.is_zero() {
            return Scalar::zero();
        }
        Scalar::reduce(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn regularity_at_zero() {
        assert!(s("1/(1+q)").is_regular_at_zero());
        assert!(!s("q^-1").is_regular_at_zero());
        // (q^2+q)/q reduces to q+1
        let unreduced =
            Scalar::from_fraction(s("q^2+q").as_laurent().unwrap().clone(), LaurentPoly::q_pow(1))
                .unwrap();
        assert!(unreduced.is_regular_at_zero());
        assert_eq!(unreduced, s("q+1"));
    }

    #[test]
    fn evaluation_at_zero() {
        let r = |n: i64| Rational::from_integer(n.into());
        assert_eq!(s("(1+q)/(1-q)").eval_at_zero().unwrap(), r(1));
        assert_eq!(s("q/(1+q)").eval_at_zero().unwrap(), r(0));
        // direct substitution: (2 + 0)/(1 + 0)
        assert_eq!(s("(2+q^3)/(1+2*q)").eval_at_zero().unwrap(), r(2));
        assert_eq!(s("1/q").eval_at_zero(), Err(Error::PoleAtZero));
    }

    #[test]
    fn bar_examples() {
        assert_eq!(s("q").bar(), s("q^-1"));
        assert_eq!(s("q+q^-1").bar(), s("q+q^-1"));
        // 1/(1 - q^-1) = q/(q - 1) = -q/(1 - q)
        assert_eq!(s("1/(1-q)").bar(), s("-q/(1-q)"));
    }

    #[test]
    fn normalization_is_pinned() {
        // monic-lowest-term denominator, powers of q moved to the numerator
        let x = s("(2*q^2+2)/(4*q^3+2*q)");
        assert_eq!(x.denominator().to_string(), "2*q^2+1");
        assert_eq!(x.numerator().to_string(), "q+q^-1");
        assert_eq!(x.to_string(), "(q+q^-1)/(2*q^2+1)");
    }

    #[test]
    fn series_expansion() {
        // 1/(1-q) = 1 + q + q^2 + ...
        let one = Rational::one();
        assert_eq!(s("1/(1-q)").series(-1, 2), vec![Rational::zero(), one.clone(), one.clone(), one]);
        // q^-1/(1+q) = q^-1 - 1 + q - ...
        let v = s("q^-1/(1+q)").series(-1, 1);
        assert_eq!(v, vec![Rational::one(), -Rational::one(), Rational::one()]);
    }

    #[test]
    fn regularity_at_infinity() {
        assert!(s("1/(1+q)").is_regular_at_infinity());
        assert!(!s("q").is_regular_at_infinity());
    }
}
