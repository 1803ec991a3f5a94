//! Exact rational numbers and the integer number theory the rest of the
//! crate leans on: canonical `Rat`, integer factorization with an explicit
//! budget, divisor enumeration, and exact rational square roots.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    /// A composite cofactor survived trial division and every Pollard-rho round.
    #[error("factorization budget exceeded on cofactor {cofactor}")]
    BudgetExceeded { cofactor: BigUint },
    #[error("invalid rational literal: {0:?}")]
    BadLiteral(String),
}

/// Exact rational in lowest terms with positive denominator. Zero is `0/1`.
///
/// Backed by `num_rational::BigRational`, which maintains exactly the
/// canonical form this crate requires, so equality and hashing are structural.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(num: BigInt, den: BigInt) -> Rat {
        assert!(!den.is_zero(), "zero denominator");
        Rat(BigRational::new(num, den))
    }

    pub fn from_int(n: i64) -> Rat {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Rat {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rat(self.0.recip())
    }

    pub fn square(&self) -> Rat {
        self.clone() * self.clone()
    }

    pub fn pow(&self, e: usize) -> Rat {
        let mut acc = Rat::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// max(|num|, den); the enumeration and cutoff measure. height(0) = 1.
    pub fn height(&self) -> BigUint {
        let n = self.0.numer().magnitude();
        let d = self.0.denom().magnitude();
        n.max(d).clone()
    }

    /// Exact nonnegative square root, if `self` is the square of a rational.
    ///
    /// Works on numerator and denominator separately; never approximates.
    pub fn sqrt(&self) -> Option<Rat> {
        if self.is_negative() {
            return None;
        }
        let n = exact_usqrt(self.0.numer().magnitude())?;
        let d = exact_usqrt(self.0.denom().magnitude())?;
        Some(Rat::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn is_square(&self) -> bool {
        self.sqrt().is_some()
    }
}

/// Exact rational square root; `None` unless `q` is a square. `sqrt(0) = 0`.
pub fn rat_square_root(q: &Rat) -> Option<Rat> {
    q.sqrt()
}

fn exact_usqrt(n: &BigUint) -> Option<BigUint> {
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for Rat {
    type Err = ArithError;

    /// Accepts `p/q` or `p`, optional leading `-` on the numerator.
    fn from_str(s: &str) -> Result<Rat, ArithError> {
        let bad = || ArithError::BadLiteral(s.to_string());
        let (ns, ds) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let n = BigInt::from_str(ns.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(ds.trim()).map_err(|_| bad())?;
        if d.is_zero() || d.is_negative() {
            return Err(bad());
        }
        Ok(Rat::new(n, d))
    }
}

macro_rules! rat_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
    };
}

rat_binop!(Add, add);
rat_binop!(Sub, sub);
rat_binop!(Mul, mul);

impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero");
        Rat(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn div(self, rhs: &'a Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero");
        Rat(&self.0 / &rhs.0)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl<'a> Neg for &'a Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl serde::Serialize for Rat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Rat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Bounds for [`factorize`]: trial division limit and Pollard-rho rounds.
#[derive(Clone, Copy, Debug)]
pub struct FactorBudget {
    pub trial_limit: u64,
    pub rho_rounds: u32,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            trial_limit: 1_000_000,
            rho_rounds: 64,
        }
    }
}

/// Prime factorization of `n >= 1` with multiplicity, ascending.
/// `factorize(1)` is the empty product.
pub fn factorize(n: &BigUint, budget: &FactorBudget) -> Result<Vec<BigUint>, ArithError> {
    assert!(!n.is_zero(), "factorize requires n >= 1");
    let mut factors = Vec::new();
    let mut rest = n.clone();

    // trial division
    let one = BigUint::one();
    let mut p = BigUint::from(2u32);
    while &p * &p <= rest && p.to_u64().map_or(false, |v| v <= budget.trial_limit) {
        while (&rest % &p).is_zero() {
            factors.push(p.clone());
            rest /= &p;
        }
        p += &one;
    }
    if rest.is_one() {
        factors.sort();
        return Ok(factors);
    }
    if &p * &p > rest {
        factors.push(rest);
        factors.sort();
        return Ok(factors);
    }

    // the surviving cofactor is composite-sized; recurse with rho
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            factors.push(m);
            continue;
        }
        let d = pollard_rho(&m, budget.rho_rounds)
            .ok_or(ArithError::BudgetExceeded { cofactor: m.clone() })?;
        let q = &m / &d;
        stack.push(d);
        stack.push(q);
    }
    factors.sort();
    Ok(factors)
}

/// Deterministic Miller-Rabin below 3.3e24; fixed witness set beyond.
fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - BigUint::one();
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let a = BigUint::from(a);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard's rho (Brent variant), one seeded attempt per round.
fn pollard_rho(n: &BigUint, rounds: u32) -> Option<BigUint> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x7e7a_0313);
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    if (n % &two).is_zero() {
        return Some(two);
    }
    for _ in 0..rounds {
        let c = rng.gen_biguint_below(n);
        let mut x = rng.gen_biguint_below(n);
        let mut y = x.clone();
        let mut d = one.clone();
        let mut steps = 0u64;
        while d.is_one() {
            x = (&x * &x + &c) % n;
            y = (&y * &y + &c) % n;
            y = (&y * &y + &c) % n;
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break;
            }
            d = diff.gcd(n);
            steps += 1;
            if steps > 1 << 22 {
                break;
            }
        }
        if !d.is_one() && d != *n {
            return Some(d);
        }
    }
    None
}

/// All positive divisors of `n >= 1`, ascending, each once.
pub fn divisors(n: &BigUint, budget: &FactorBudget) -> Result<Vec<BigUint>, ArithError> {
    let factors = factorize(n, budget)?;
    let mut divs = vec![BigUint::one()];
    let mut i = 0;
    while i < factors.len() {
        let p = &factors[i];
        let mut mult = 0usize;
        while i < factors.len() && &factors[i] == p {
            mult += 1;
            i += 1;
        }
        let base = divs.clone();
        let mut pk = BigUint::one();
        for _ in 0..mult {
            pk *= p;
            for d in &base {
                divs.push(d * &pk);
            }
        }
    }
    divs.sort();
    Ok(divs)
}
