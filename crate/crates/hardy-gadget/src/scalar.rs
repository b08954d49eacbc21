//! Exact arithmetic in the quadratic field ℚ(√3).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::GadgetError;

/// `a + b√3` with rational `a`, `b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct QSqrt3 {
    pub a: BigRational,
    pub b: BigRational,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl QSqrt3 {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QSqrt3 { a, b }
    }

    pub fn int(a: i64, b: i64) -> Self {
        QSqrt3 { a: rat(a), b: rat(b) }
    }

    pub fn rational(a: BigRational) -> Self {
        QSqrt3 { a, b: BigRational::zero() }
    }

    pub fn zero() -> Self {
        QSqrt3::int(0, 0)
    }

    pub fn one() -> Self {
        QSqrt3::int(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        QSqrt3 { a: self.a.clone(), b: -self.b.clone() }
    }

    /// Field norm `a² − 3b²`; zero only for zero.
    pub fn field_norm(&self) -> BigRational {
        &self.a * &self.a - rat(3) * &self.b * &self.b
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.field_norm();
        Some(QSqrt3 { a: &self.a / &n, b: -(&self.b / &n) })
    }

    /// Exact sign, by comparing `a²` with `3b²` when the parts disagree.
    pub fn signum(&self) -> i32 {
        let sa = sign(&self.a);
        let sb = sign(&self.b);
        if sa == 0 || sb == 0 || sa == sb {
            return if sa != 0 { sa } else { sb };
        }
        let lhs = &self.a * &self.a;
        let rhs = rat(3) * &self.b * &self.b;
        if lhs > rhs {
            sa
        } else {
            sb
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * 3f64.sqrt()
    }
}

fn sign(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl Add for &QSqrt3 {
    type Output = QSqrt3;
    fn add(self, o: &QSqrt3) -> QSqrt3 {
        QSqrt3 { a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl Sub for &QSqrt3 {
    type Output = QSqrt3;
    fn sub(self, o: &QSqrt3) -> QSqrt3 {
        QSqrt3 { a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl Mul for &QSqrt3 {
    type Output = QSqrt3;
    fn mul(self, o: &QSqrt3) -> QSqrt3 {
        QSqrt3 {
            a: &self.a * &o.a + rat(3) * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }
}

impl Div for &QSqrt3 {
    type Output = QSqrt3;
    /// Panics on division by zero, like the rational types it wraps.
    fn div(self, o: &QSqrt3) -> QSqrt3 {
        self * &o.inv().expect("division by zero in Q(sqrt 3)")
    }
}

impl Neg for &QSqrt3 {
    type Output = QSqrt3;
    fn neg(self) -> QSqrt3 {
        QSqrt3 { a: -self.a.clone(), b: -self.b.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QSqrt3 {
            type Output = QSqrt3;
            fn $m(self, o: QSqrt3) -> QSqrt3 {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for QSqrt3 {
    type Output = QSqrt3;
    fn neg(self) -> QSqrt3 {
        -&self
    }
}

impl fmt::Display for QSqrt3 {
    /// Always `a+b√3` or `a-b√3`, with rationals written `p/q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_negative() {
            write!(f, "{}-{}√3", self.a, -self.b.clone())
        } else {
            write!(f, "{}+{}√3", self.a, self.b)
        }
    }
}

impl FromStr for QSqrt3 {
    type Err = GadgetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GadgetError::Parse(format!("not an element of Q(sqrt 3): {s:?}"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(body) = t.strip_suffix("√3") else {
            return t.parse::<BigRational>().map(QSqrt3::rational).map_err(|_| bad());
        };
        // Split at the last sign that is not the leading one.
        let cut = body.char_indices().skip(1).filter(|(_, c)| *c == '+' || *c == '-').last();
        let (a, b) = match cut {
            Some((i, _)) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let b = b.strip_prefix('+').unwrap_or(b);
        let b = match b {
            "" => BigRational::one(),
            "-" => -BigRational::one(),
            _ => b.parse::<BigRational>().map_err(|_| bad())?,
        };
        let a = a.parse::<BigRational>().map_err(|_| bad())?;
        Ok(QSqrt3 { a, b })
    }
}

impl Serialize for QSqrt3 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QSqrt3 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A vector of `ℚ(√3)⁴`.
pub type Vec4 = [QSqrt3; 4];

pub fn vec4(v: [(i64, i64); 4]) -> Vec4 {
    v.map(|(a, b)| QSqrt3::int(a, b))
}

pub fn dot(u: &Vec4, v: &Vec4) -> QSqrt3 {
    let mut s = QSqrt3::zero();
    for i in 0..4 {
        s = &s + &(&u[i] * &v[i]);
    }
    s
}

pub fn norm2(u: &Vec4) -> QSqrt3 {
    dot(u, u)
}

pub fn is_zero_vec(u: &Vec4) -> bool {
    u.iter().all(QSqrt3::is_zero)
}

/// True when `u` and `v` span the same line (all 2×2 minors vanish).
pub fn parallel(u: &Vec4, v: &Vec4) -> bool {
    (0..4).all(|i| (i + 1..4).all(|j| (&(&u[i] * &v[j]) - &(&u[j] * &v[i])).is_zero()))
}

pub fn scale(u: &Vec4, c: &QSqrt3) -> Vec4 {
    [&u[0] * c, &u[1] * c, &u[2] * c, &u[3] * c]
}

pub fn sub(u: &Vec4, v: &Vec4) -> Vec4 {
    [&u[0] - &v[0], &u[1] - &v[1], &u[2] - &v[2], &u[3] - &v[3]]
}

/// Rescales so that the first nonzero component is 1.
pub fn normalize_leading(u: &Vec4) -> Vec4 {
    match u.iter().find(|c| !c.is_zero()) {
        Some(lead) => scale(u, &lead.inv().expect("nonzero")),
        None => u.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_operations() {
        let x = QSqrt3::int(3, 1);
        let y = QSqrt3::int(3, -1);
        assert_eq!(&x * &y, QSqrt3::int(6, 0));
        assert_eq!(&(&x / &y) * &y, x);
        assert_eq!(&x * &x.inv().unwrap(), QSqrt3::one());
        assert!(QSqrt3::zero().inv().is_none());
        assert_eq!(QSqrt3::int(0, 1).to_f64(), 3f64.sqrt());
    }

    #[test]
    fn signs_are_exact() {
        assert_eq!(QSqrt3::int(2, -1).signum(), 1);
        assert_eq!(QSqrt3::int(1, -1).signum(), -1);
        assert_eq!(QSqrt3::int(-2, 1).signum(), -1);
        assert_eq!(QSqrt3::zero().signum(), 0);
    }

    #[test]
    fn text_round_trip() {
        for x in [QSqrt3::int(-3, 1), QSqrt3::int(1, -1), QSqrt3::zero(), &QSqrt3::int(5, 0) / &QSqrt3::int(4, 2)] {
            assert_eq!(x.to_string().parse::<QSqrt3>().unwrap(), x);
        }
        assert_eq!("1/2".parse::<QSqrt3>().unwrap(), QSqrt3::rational(BigRational::new(1.into(), 2.into())));
        assert_eq!("-√3".parse::<QSqrt3>().unwrap(), QSqrt3::int(0, -1));
        assert!("x+√3".parse::<QSqrt3>().is_err());
    }
}
