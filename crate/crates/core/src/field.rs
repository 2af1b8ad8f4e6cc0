//! The two exact fields the library computes over: ℚ and ℚ(q).

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::{Rational, Scalar};

/// Exact field arithmetic with owned and borrowed operands.
pub trait Field:
    Clone
    + PartialEq
    + Eq
    + Hash
    + Debug
    + Display
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + 'static
{
    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn div_ref(&self, rhs: &Self) -> Self;
    fn neg_ref(&self) -> Self;

    /// Smaller is cheaper to pivot on.
    fn complexity(&self) -> usize;

    fn from_i64(n: i64) -> Self;

    fn from_rational(c: Rational) -> Self;

    /// Name used in serialized spaces.
    const NAME: &'static str;

    fn parse(s: &str) -> crate::Result<Self>;
}

impl Field for Rational {
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div_ref(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg_ref(&self) -> Self {
        -self
    }

    fn complexity(&self) -> usize {
        if self.is_zero() {
            0
        } else {
            (self.numer().bits() + self.denom().bits()) as usize
        }
    }

    fn from_i64(n: i64) -> Self {
        Rational::from_integer(n.into())
    }

    fn from_rational(c: Rational) -> Self {
        c
    }

    const NAME: &'static str = "Q";

    fn parse(s: &str) -> crate::Result<Self> {
        let v: Scalar = s.parse()?;
        match v.as_laurent() {
            Some(p) if p.max_exp().unwrap_or(0) == 0 && p.min_exp().unwrap_or(0) == 0 => {
                Ok(p.coeff(0))
            }
            _ => Err(crate::Error::Parse(format!("'{s}' is not a rational number"))),
        }
    }
}

impl Field for Scalar {
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div_ref(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg_ref(&self) -> Self {
        -self
    }

    fn complexity(&self) -> usize {
        Scalar::complexity(self)
    }

    fn from_i64(n: i64) -> Self {
        Scalar::from_int(n)
    }

    fn from_rational(c: Rational) -> Self {
        Scalar::from_rational(c)
    }

    const NAME: &'static str = "Q(q)";

    fn parse(s: &str) -> crate::Result<Self> {
        s.parse()
    }
}
