//! Test-only helpers: forward-mode dual numbers and random exact states.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_traits::{FromPrimitive, Num, One, ToPrimitive, Zero};
use proptest::prelude::*;

use crate::flow::FlowState;
use crate::scalar::Field;
use crate::Rational;

/// `value + eps * e` with `e^2 = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub value: T,
    pub eps: T,
}

impl<T: Field> Dual<T> {
    pub fn new(value: T, eps: T) -> Self {
        Dual { value, eps }
    }

    pub fn constant(value: T) -> Self {
        Dual { value, eps: T::zero() }
    }
}

impl<T: Field> PartialOrd for Dual<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

impl<T: Field> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual::new(self.value + o.value, self.eps + o.eps)
    }
}

impl<T: Field> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual::new(self.value - o.value, self.eps - o.eps)
    }
}

impl<T: Field> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Dual::new(self.value * o.value, self.value * o.eps + self.eps * o.value)
    }
}

impl<T: Field> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let v = self.value / o.value;
        Dual::new(v, (self.eps - v * o.eps) / o.value)
    }
}

impl<T: Field> Rem for Dual<T> {
    type Output = Self;
    fn rem(self, o: Self) -> Self {
        Dual::constant(self.value % o.value)
    }
}

impl<T: Field> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual::new(-self.value, -self.eps)
    }
}

impl<T: Field> Zero for Dual<T> {
    fn zero() -> Self {
        Dual::constant(T::zero())
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero() && self.eps.is_zero()
    }
}

impl<T: Field> One for Dual<T> {
    fn one() -> Self {
        Dual::constant(T::one())
    }
}

impl<T: Field> Num for Dual<T> {
    type FromStrRadixErr = T::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        T::from_str_radix(s, radix).map(Dual::constant)
    }
}

impl<T: Field> FromPrimitive for Dual<T> {
    fn from_i64(n: i64) -> Option<Self> {
        T::from_i64(n).map(Dual::constant)
    }
    fn from_u64(n: u64) -> Option<Self> {
        T::from_u64(n).map(Dual::constant)
    }
    fn from_f64(n: f64) -> Option<Self> {
        T::from_f64(n).map(Dual::constant)
    }
}

impl<T: Field> ToPrimitive for Dual<T> {
    fn to_i64(&self) -> Option<i64> {
        self.value.to_i64()
    }
    fn to_u64(&self) -> Option<u64> {
        self.value.to_u64()
    }
    fn to_f64(&self) -> Option<f64> {
        self.value.to_f64()
    }
}

/// Nonzero rational with small numerator and denominator.
pub fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (1i128..=40, 1i128..=12, any::<bool>())
        .prop_map(|(n, d, neg)| Rational::new(if neg { -n } else { n }, d))
}

pub fn positive_rational() -> impl Strategy<Value = Rational> {
    (1i128..=40, 1i128..=12).prop_map(|(n, d)| Rational::new(n, d))
}

/// State with arbitrary nonzero (possibly negative) coefficients.
pub fn rational_state() -> impl Strategy<Value = FlowState<Rational>> {
    [nonzero_rational(), nonzero_rational(), nonzero_rational()]
        .prop_map(|[a, b, c]| FlowState::initial(a, b, c))
}

pub fn positive_rational_state() -> impl Strategy<Value = FlowState<Rational>> {
    [positive_rational(), positive_rational(), positive_rational()]
        .prop_map(|[a, b, c]| FlowState::initial(a, b, c))
}
