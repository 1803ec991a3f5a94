//! Points of P^1(Q) in canonical integer coordinates.

use crate::arith::Rat;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// A point of P^1(Q) as `[x : y]` with gcd(|x|, y) = 1 and y >= 0.
/// The point at infinity is `[1 : 0]`; the representation is unique.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    x: BigInt,
    y: BigInt,
}

impl ProjPoint {
    /// Canonicalizes an arbitrary nonzero coordinate pair.
    pub fn new(x: BigInt, y: BigInt) -> ProjPoint {
        assert!(!(x.is_zero() && y.is_zero()), "illegal coordinates (0,0)");
        if y.is_zero() {
            return ProjPoint {
                x: BigInt::one(),
                y: BigInt::zero(),
            };
        }
        let g = x.gcd(&y);
        let (mut x, mut y) = (x / &g, y / &g);
        if y.is_negative() {
            x = -x;
            y = -y;
        }
        ProjPoint { x, y }
    }

    pub fn infinity() -> ProjPoint {
        ProjPoint {
            x: BigInt::one(),
            y: BigInt::zero(),
        }
    }

    pub fn from_rat(q: &Rat) -> ProjPoint {
        ProjPoint {
            x: q.numer().clone(),
            y: q.denom().clone(),
        }
    }

    pub fn from_int(n: i64) -> ProjPoint {
        ProjPoint::from_rat(&Rat::from_int(n))
    }

    pub fn is_infinity(&self) -> bool {
        self.y.is_zero()
    }

    /// Finite value as a rational, or `None` for infinity.
    pub fn to_rat(&self) -> Option<Rat> {
        if self.is_infinity() {
            None
        } else {
            Some(Rat::new(self.x.clone(), self.y.clone()))
        }
    }

    pub fn coords(&self) -> (&BigInt, &BigInt) {
        (&self.x, &self.y)
    }

    /// max(|x|, y); height(inf) = 1.
    pub fn height(&self) -> BigUint {
        self.x.magnitude().max(self.y.magnitude()).clone()
    }

    /// Sort key: (infinity last, height, numerator, denominator).
    pub fn order_key(&self) -> (bool, BigUint, BigInt, BigInt) {
        (
            self.is_infinity(),
            self.height(),
            self.x.clone(),
            self.y.clone(),
        )
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            write!(f, "inf")
        } else if self.y.is_one() {
            write!(f, "{}", self.x)
        } else {
            write!(f, "{}/{}", self.x, self.y)
        }
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.x, self.y)
    }
}

impl serde::Serialize for ProjPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
