//! Scalar traits shared by the matrix and polynomial kernels.
//!
//! Every `num-traits` number type (`f32`, `f64`, [`Rat`](crate::Rat)) is a
//! [`Coeff`] through the blanket impl below. Tower elements implement the
//! traits by hand because their zero depends on the tower they live in.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Num, One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Rat;

/// A commutative ring element whose zero and one may depend on context.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_coeff(&self) -> bool;
    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn neg_ref(&self) -> Self;
}

/// A [`Coeff`] that can be inverted when nonzero.
pub trait FieldCoeff: Coeff {
    fn inv_ref(&self) -> Option<Self>;
}

impl<T> Coeff for T
where
    T: Num + Clone + Neg<Output = T> + fmt::Debug,
{
    fn zero_like(&self) -> Self {
        T::zero()
    }
    fn one_like(&self) -> Self {
        T::one()
    }
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self.clone() + rhs.clone()
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.clone() - rhs.clone()
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.clone() * rhs.clone()
    }
    fn neg_ref(&self) -> Self {
        -self.clone()
    }
}

impl<T> FieldCoeff for T
where
    T: Num + Clone + Neg<Output = T> + fmt::Debug,
{
    fn inv_ref(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(T::one() / self.clone())
        }
    }
}

/// `p`-adic valuation of a nonzero integer.
pub fn int_padic_val(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

/// `p`-adic valuation of a rational, `None` for zero.
pub fn rat_padic_val(x: &Rat, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(int_padic_val(x.numer(), p) - int_padic_val(x.denom(), p))
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Formats a rational as `num/den`.
pub fn rat_to_string(x: &Rat) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Short human form: `3`, `-7/4`.
pub fn rat_short(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let t = s.trim();
    let parsed = match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n
                .trim()
                .parse()
                .map_err(|_| format!("bad rational `{s}`"))?;
            let d: BigInt = d
                .trim()
                .parse()
                .map_err(|_| format!("bad rational `{s}`"))?;
            if d.is_zero() {
                return Err(format!("zero denominator in `{s}`"));
            }
            Rat::new(n, d)
        }
        None => Rat::from_integer(t.parse().map_err(|_| format!("bad rational `{s}`"))?),
    };
    Ok(parsed)
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// Denominator of a rational as `u64` (panics if it does not fit).
pub fn denom_u64(x: &Rat) -> u64 {
    u64::try_from(x.denom().clone()).expect("denominator exceeds u64")
}

/// A valuation value: a rational or `+∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Val {
    Fin(Rat),
    Inf,
}

impl Val {
    pub fn fin(&self) -> Option<&Rat> {
        match self {
            Val::Fin(r) => Some(r),
            Val::Inf => None,
        }
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, Val::Inf)
    }

    /// Sum in the extended sense (`∞ + x = ∞`).
    pub fn plus(&self, other: &Val) -> Val {
        match (self, other) {
            (Val::Fin(a), Val::Fin(b)) => Val::Fin(a + b),
            _ => Val::Inf,
        }
    }

    pub fn plus_rat(&self, r: &Rat) -> Val {
        match self {
            Val::Fin(a) => Val::Fin(a + r),
            Val::Inf => Val::Inf,
        }
    }

    pub fn scale(&self, k: &Rat) -> Val {
        match self {
            Val::Fin(a) => Val::Fin(a * k),
            Val::Inf => Val::Inf,
        }
    }

    pub fn ge_rat(&self, r: &Rat) -> bool {
        match self {
            Val::Fin(a) => a >= r,
            Val::Inf => true,
        }
    }

    pub fn gt_rat(&self, r: &Rat) -> bool {
        match self {
            Val::Fin(a) => a > r,
            Val::Inf => true,
        }
    }
}

impl PartialOrd for Val {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Val {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Val::Fin(a), Val::Fin(b)) => a.cmp(b),
            (Val::Fin(_), Val::Inf) => Ordering::Less,
            (Val::Inf, Val::Fin(_)) => Ordering::Greater,
            (Val::Inf, Val::Inf) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Fin(r) => write!(f, "{}", rat_short(r)),
            Val::Inf => write!(f, "inf"),
        }
    }
}

impl Serialize for Val {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Val::Fin(r) => s.serialize_str(&rat_to_string(r)),
            Val::Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Val {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "inf" {
            Ok(Val::Inf)
        } else {
            parse_rat(&s)
                .map(Val::Fin)
                .map_err(serde::de::Error::custom)
        }
    }
}

/// Serde adapter storing a [`Rat`] as a `"num/den"` string.
pub mod rat_serde {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rat_to_string(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

/// Same as [`rat_serde`] for `Vec<Rat>`.
pub mod rat_vec_serde {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = xs.iter().map(rat_to_string).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rat(s).map_err(serde::de::Error::custom))
            .collect()
    }
}
