//! Exact polynomial algebra over Q: dense univariate polynomials,
//! homogeneous bivariate polynomials, exact division, and rational root
//! finding by divisor enumeration.

use crate::arith::{divisors, ArithError, FactorBudget, Rat};
use crate::point::ProjPoint;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    /// Exact division left a nonzero remainder.
    #[error("polynomial division left a remainder")]
    NotDivisible,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Dense univariate polynomial over Q, coefficients in ascending degree.
/// The zero polynomial is the empty coefficient list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QPoly {
    coeffs: Vec<Rat>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> QPoly {
        while coeffs.last().map_or(false, Rat::is_zero) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> QPoly {
        QPoly { coeffs: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of a nonzero polynomial; panics on zero.
    pub fn degree(&self) -> usize {
        assert!(!self.is_zero(), "degree of zero polynomial");
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn eval(&self, z: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + c;
        }
        acc
    }

    /// Synthetic division by (z - r); returns (quotient, remainder).
    fn div_linear(&self, r: &Rat) -> (QPoly, Rat) {
        if self.is_zero() {
            return (QPoly::zero(), Rat::zero());
        }
        let mut q = vec![Rat::zero(); self.coeffs.len() - 1];
        let mut acc = Rat::zero();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            acc = &(&acc * r) + c;
            if i > 0 {
                q[i - 1] = acc.clone();
            }
        }
        (QPoly::new(q), acc)
    }
}

impl fmt::Display for QPoly {
    /// Ascending powers of z, exact rational coefficients.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit_coeff = mag == Rat::one() && i > 0;
            if !unit_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "{}z", if unit_coeff { "" } else { "*" })?,
                _ => write!(f, "{}z^{}", if unit_coeff { "" } else { "*" }, i)?,
            }
        }
        Ok(())
    }
}

/// A root in P^1(Q) with multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootRecord {
    pub root: ProjPoint,
    pub multiplicity: usize,
}

/// Homogeneous bivariate polynomial over Q with an explicit formal degree D:
/// `coeffs[i]` is the coefficient of X^i Y^(D-i), i = 0..=D.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HomPoly {
    coeffs: Vec<Rat>,
}

impl HomPoly {
    /// `coeffs` must have length D+1; the zero polynomial keeps its degree.
    pub fn new(coeffs: Vec<Rat>) -> HomPoly {
        assert!(!coeffs.is_empty(), "formal degree must be >= 0");
        HomPoly { coeffs }
    }

    pub fn zero(formal_degree: usize) -> HomPoly {
        HomPoly {
            coeffs: vec![Rat::zero(); formal_degree + 1],
        }
    }

    pub fn constant(c: Rat) -> HomPoly {
        HomPoly { coeffs: vec![c] }
    }

    /// X (degree 1).
    pub fn var_x() -> HomPoly {
        HomPoly {
            coeffs: vec![Rat::zero(), Rat::one()],
        }
    }

    /// Y (degree 1).
    pub fn var_y() -> HomPoly {
        HomPoly {
            coeffs: vec![Rat::one(), Rat::zero()],
        }
    }

    pub fn formal_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }

    /// Degree in X alone, i.e. the degree of the dehomogenization at Y=1.
    fn x_degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn dehomogenize(&self) -> QPoly {
        QPoly::new(self.coeffs.clone())
    }

    /// Value at the canonical representative of `pt`.
    pub fn eval(&self, pt: &ProjPoint) -> Rat {
        let (x, y) = pt.coords();
        let xr = Rat::new(x.clone(), BigInt::one());
        let yr = Rat::new(y.clone(), BigInt::one());
        // Horner in X with Y-power bookkeeping
        let d = self.formal_degree();
        let mut acc = Rat::zero();
        for i in (0..=d).rev() {
            acc = &(&acc * &xr) + &(&self.coeffs[i] * &yr.pow(d - i));
        }
        acc
    }

    pub fn add(&self, other: &HomPoly) -> HomPoly {
        assert_eq!(self.formal_degree(), other.formal_degree());
        HomPoly {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &HomPoly) -> HomPoly {
        assert_eq!(self.formal_degree(), other.formal_degree());
        HomPoly {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &HomPoly) -> HomPoly {
        let d = self.formal_degree() + other.formal_degree();
        let mut out = vec![Rat::zero(); d + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        HomPoly { coeffs: out }
    }

    pub fn scale(&self, c: &Rat) -> HomPoly {
        HomPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn pow(&self, e: usize) -> HomPoly {
        let mut acc = HomPoly::constant(Rat::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitution p(F, G) for homogeneous F, G of equal degree.
    pub fn compose(&self, f: &HomPoly, g: &HomPoly) -> HomPoly {
        assert_eq!(f.formal_degree(), g.formal_degree());
        let d = self.formal_degree();
        let e = f.formal_degree();
        // power tables so each f^i, g^j is built once
        let mut f_pows = Vec::with_capacity(d + 1);
        let mut g_pows = Vec::with_capacity(d + 1);
        f_pows.push(HomPoly::constant(Rat::one()));
        g_pows.push(HomPoly::constant(Rat::one()));
        for i in 1..=d {
            f_pows.push(f_pows[i - 1].mul(f));
            g_pows.push(g_pows[i - 1].mul(g));
        }
        let mut acc = HomPoly::zero(d * e);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = f_pows[i].mul(&g_pows[d - i]).scale(c);
            acc = acc.add(&term);
        }
        acc
    }
}

/// Exact quotient `a / b` of homogeneous polynomials.
///
/// The formal degree of the quotient is deg(a) - deg(b); any nonzero
/// remainder (including an impossible Y-multiplicity) is `NotDivisible`.
pub fn exact_div(a: &HomPoly, b: &HomPoly) -> Result<HomPoly, PolyError> {
    assert!(!b.is_zero(), "division by the zero polynomial");
    if a.formal_degree() < b.formal_degree() {
        return Err(PolyError::NotDivisible);
    }
    let dq = a.formal_degree() - b.formal_degree();
    if a.is_zero() {
        return Ok(HomPoly::zero(dq));
    }
    let da = a.x_degree().expect("nonzero");
    let db = b.x_degree().expect("nonzero");
    if da < db || da - db > dq {
        // quotient would need a negative power of X or of Y
        return Err(PolyError::NotDivisible);
    }
    // univariate long division of the dehomogenizations
    let mut rem = a.coeffs.clone();
    rem.truncate(da + 1);
    let bx = &b.coeffs[..=db];
    let lead = &bx[db];
    let mut q = vec![Rat::zero(); da - db + 1];
    for i in (db..=da).rev() {
        let c = &rem[i] / lead;
        if !c.is_zero() {
            q[i - db] = c.clone();
            for (j, bc) in bx.iter().enumerate() {
                rem[i - db + j] = &rem[i - db + j] - &(&c * bc);
            }
        }
    }
    if rem[..db].iter().any(|c| !c.is_zero()) {
        return Err(PolyError::NotDivisible);
    }
    q.resize(dq + 1, Rat::zero());
    Ok(HomPoly::new(q))
}

/// All rational roots of a nonzero polynomial, with multiplicities,
/// ascending. Divisor enumeration over the primitive integer model;
/// every root is re-verified by exact evaluation before being returned.
pub fn rational_roots(p: &QPoly, budget: &FactorBudget) -> Result<Vec<(Rat, usize)>, PolyError> {
    assert!(!p.is_zero(), "roots of the zero polynomial");
    let mut roots: Vec<(Rat, usize)> = Vec::new();

    // strip the z^m factor
    let mut work = p.clone();
    let zero = Rat::zero();
    let mut zero_mult = 0usize;
    while !work.is_zero() && work.coeffs()[0].is_zero() {
        let mut c = work.coeffs().to_vec();
        c.remove(0);
        work = QPoly::new(c);
        zero_mult += 1;
    }
    if zero_mult > 0 {
        roots.push((zero, zero_mult));
    }
    if work.degree() == 0 {
        return Ok(roots);
    }

    // clear denominators to a primitive integer polynomial
    let mut lcm = BigInt::one();
    for c in work.coeffs() {
        lcm = lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = work
        .coeffs()
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    let mut content = BigInt::zero();
    for c in &ints {
        content = content.gcd(c);
    }
    let ints: Vec<BigInt> = ints.iter().map(|c| c / &content).collect();

    let a0 = ints.first().unwrap().magnitude().clone();
    let an = ints.last().unwrap().magnitude().clone();
    let num_divs = divisors(&a0, budget).map_err(PolyError::Arith)?;
    let den_divs = divisors(&an, budget).map_err(PolyError::Arith)?;

    // values at +/-1: a root p/q forces (q - p) | f(1) and (q + p) | f(-1),
    // since the primitive polynomial is divisible by qx - p over the integers
    let deg = ints.len() - 1;
    let mut f_one = BigInt::zero();
    let mut f_neg_one = BigInt::zero();
    for (i, c) in ints.iter().enumerate() {
        f_one += c;
        if i % 2 == 0 {
            f_neg_one += c;
        } else {
            f_neg_one -= c;
        }
    }

    // evaluate sum a_i p^i q^(deg-i) in pure integer arithmetic
    let int_eval = |p: &BigInt, q: &BigInt| -> BigInt {
        let mut acc = ints[deg].clone();
        let mut qpow = BigInt::one();
        for i in (0..deg).rev() {
            qpow *= q;
            acc = acc * p + &ints[i] * &qpow;
        }
        acc
    };

    let mut seen = std::collections::HashSet::new();
    for nd in &num_divs {
        for dd in &den_divs {
            if nd.gcd(dd) != BigUint::one() {
                continue;
            }
            for sign in [1i32, -1] {
                let p = BigInt::from(sign) * BigInt::from(nd.clone());
                let q = BigInt::from(dd.clone());
                let diff = &q - &p;
                if !f_one.is_zero() && !diff.is_zero() && !(&f_one % &diff).is_zero() {
                    continue;
                }
                let sum = &q + &p;
                if !f_neg_one.is_zero() && !sum.is_zero() && !(&f_neg_one % &sum).is_zero() {
                    continue;
                }
                if !int_eval(&p, &q).is_zero() {
                    continue;
                }
                let cand = Rat::new(p, q);
                if !seen.insert(cand.clone()) {
                    continue;
                }
                // multiplicity by repeated synthetic division
                let mut mult = 0usize;
                let mut q = work.clone();
                loop {
                    let (quot, rem) = q.div_linear(&cand);
                    if !rem.is_zero() {
                        break;
                    }
                    mult += 1;
                    q = quot;
                    if q.is_zero() {
                        break;
                    }
                }
                debug_assert!(mult >= 1);
                roots.push((cand, mult));
            }
        }
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(roots)
}

/// All roots of a nonzero homogeneous polynomial in P^1(Q): finite roots of
/// the Y=1 dehomogenization plus `[1:0]` with the Y-exponent multiplicity.
pub fn hom_rational_roots(
    p: &HomPoly,
    budget: &FactorBudget,
) -> Result<Vec<RootRecord>, PolyError> {
    assert!(!p.is_zero(), "roots of the zero polynomial");
    let mut out = Vec::new();
    let xd = p.x_degree().expect("nonzero");
    let inf_mult = p.formal_degree() - xd;
    let dehom = p.dehomogenize();
    if dehom.degree() > 0 {
        for (r, m) in rational_roots(&dehom, budget)? {
            out.push(RootRecord {
                root: ProjPoint::from_rat(&r),
                multiplicity: m,
            });
        }
    }
    if inf_mult > 0 {
        out.push(RootRecord {
            root: ProjPoint::infinity(),
            multiplicity: inf_mult,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    fn qp(coeffs: &[&str]) -> QPoly {
        QPoly::new(coeffs.iter().map(|s| r(s)).collect())
    }

    fn hp(coeffs: &[&str]) -> HomPoly {
        HomPoly::new(coeffs.iter().map(|s| r(s)).collect())
    }

    #[test]
    fn eval_and_display() {
        // 5z^3 - 21z^2 + 30z - 14
        let p = qp(&["-14", "30", "-21", "5"]);
        assert!(p.eval(&r("1")).is_zero());
        assert_eq!(p.to_string(), "-14 + 30*z - 21*z^2 + 5*z^3");
        assert_eq!(qp(&["0"]).to_string(), "0");
        assert_eq!(qp(&["0", "-1", "0", "1/2"]).to_string(), "-z + 1/2*z^3");
    }

    #[test]
    fn hom_eval_basic() {
        // X^2 at [1:0]
        let p = hp(&["0", "0", "1"]);
        assert_eq!(p.eval(&ProjPoint::infinity()), r("1"));
        // zero polynomial of degree 2 at any point
        let z = HomPoly::zero(2);
        assert!(z.eval(&ProjPoint::from_int(7)).is_zero());
        // X^2 - Y^2 at [3:2] -> 9 - 4
        let p = hp(&["-1", "0", "1"]);
        let pt = ProjPoint::new(BigInt::from(3), BigInt::from(2));
        assert_eq!(p.eval(&pt), r("5"));
    }

    #[test]
    fn hom_eval_matches_dehomogenization() {
        let p = hp(&["1/2", "-3", "0", "7"]);
        for z in ["0", "2", "-5/3", "7/2"] {
            let z = r(z);
            let pt = ProjPoint::from_rat(&z);
            let lhs = p.eval(&pt);
            // dehom value scaled by den^D
            let den = Rat::new(z.denom().clone(), BigInt::one());
            let rhs = &p.dehomogenize().eval(&z) * &den.pow(3);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn exact_div_examples() {
        // (X^2 - Y^2) / (X - Y) = X + Y
        let a = hp(&["-1", "0", "1"]);
        let b = hp(&["-1", "1"]);
        assert_eq!(exact_div(&a, &b).unwrap(), hp(&["1", "1"]));
        // a / a = 1 (degree 0)
        assert_eq!(exact_div(&a, &a).unwrap(), hp(&["1"]));
        // X^2 / (X*Y) is not a polynomial
        let x2 = hp(&["0", "0", "1"]);
        let xy = hp(&["0", "1", "0"]);
        assert_eq!(exact_div(&x2, &xy), Err(PolyError::NotDivisible));
        // X^2*Y / X^2 = Y
        let x2y = HomPoly::new(vec![r("0"), r("0"), r("1"), r("0")]);
        let q = exact_div(&x2y, &x2).unwrap();
        assert_eq!(q, HomPoly::var_y());
        // remainder case
        let p = hp(&["1", "0", "1"]); // X^2 + Y^2
        assert_eq!(exact_div(&p, &b), Err(PolyError::NotDivisible));
    }

    #[test]
    fn exact_div_round_trip() {
        let b = hp(&["2", "-1", "3"]);
        let q = hp(&["1/3", "0", "-2", "1"]);
        let a = b.mul(&q);
        assert_eq!(exact_div(&a, &b).unwrap(), q);
        assert_eq!(exact_div(&a, &q).unwrap(), b);
    }

    #[test]
    fn rational_roots_examples() {
        let budget = FactorBudget::default();
        // 5z^3 - 21z^2 + 30z - 14 -> z = 1 only
        let p = qp(&["-14", "30", "-21", "5"]);
        assert_eq!(rational_roots(&p, &budget).unwrap(), vec![(r("1"), 1)]);
        // z^2 - 3z + 2 -> 1, 2
        let p = qp(&["2", "-3", "1"]);
        assert_eq!(
            rational_roots(&p, &budget).unwrap(),
            vec![(r("1"), 1), (r("2"), 1)]
        );
        // z^3 - 3z^2 + 15z - 5 (map (d,k)=(5,1)) -> no rational roots
        let p = qp(&["-5", "15", "-3", "1"]);
        assert!(rational_roots(&p, &budget).unwrap().is_empty());
        // multiplicity: (z-1)^2 (2z+3)
        let p = qp(&["3", "-4", "-1", "2"]);
        assert_eq!(
            rational_roots(&p, &budget).unwrap(),
            vec![(r("-3/2"), 1), (r("1"), 2)]
        );
        // zero root: z^2(z - 1/2)
        let p = qp(&["0", "0", "-1/2", "1"]);
        assert_eq!(
            rational_roots(&p, &budget).unwrap(),
            vec![(r("0"), 2), (r("1/2"), 1)]
        );
    }

    /// Independent oracle: every rational of height <= bound, by evaluation.
    fn brute_force_roots(p: &QPoly, bound: i64) -> Vec<Rat> {
        let mut out = Vec::new();
        for den in 1..=bound {
            for num in -bound..=bound {
                if num.unsigned_abs().gcd(&den.unsigned_abs()) != 1 {
                    continue;
                }
                let cand = Rat::new(BigInt::from(num), BigInt::from(den));
                if p.eval(&cand).is_zero() {
                    out.push(cand);
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn rational_roots_complete_against_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let budget = FactorBudget::default();
        for _ in 0..120 {
            let coeffs: Vec<Rat> = (0..4)
                .map(|_| Rat::from_int(rng.gen_range(-9i64..=9)))
                .collect();
            let p = QPoly::new(coeffs);
            if p.is_zero() {
                continue;
            }
            let found: Vec<Rat> = rational_roots(&p, &budget)
                .unwrap()
                .into_iter()
                .map(|(r, _)| r)
                .collect();
            assert_eq!(found, brute_force_roots(&p, 30), "poly {p}");
        }
    }

    #[test]
    fn hom_roots_examples() {
        let budget = FactorBudget::default();
        // Y*(X - Y): roots [1:0] and [1:1]
        let p = hp(&["-1", "1"]).mul(&HomPoly::var_y());
        let mut roots = hom_rational_roots(&p, &budget).unwrap();
        roots.sort_by_key(|r| r.root.order_key());
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().any(|r| r.root == ProjPoint::infinity() && r.multiplicity == 1));
        assert!(roots.iter().any(|r| r.root == ProjPoint::from_int(1)));
        // X^2 + Y^2: no rational roots
        let p = hp(&["1", "0", "1"]);
        assert!(hom_rational_roots(&p, &budget).unwrap().is_empty());
    }
}
