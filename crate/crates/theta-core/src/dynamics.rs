//! The quadratic map theta_{d,k}(z) = (kz^2 - 2dz + dk)/(z^2 - 2kz + d):
//! validation, evaluation on P^1(Q), orbits with a wandering cutoff,
//! iterated coordinate polynomials, and the period / dynatomic /
//! generalized dynatomic polynomials.

use crate::arith::Rat;
use crate::point::ProjPoint;
use crate::poly::{exact_div, HomPoly, PolyError};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use std::collections::HashMap;
use thiserror::Error;

/// Largest iteration count the polynomial constructions accept.
pub const MAX_ITER: u32 = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("invalid map: d = 0")]
    DZero,
    #[error("invalid map: k^2 = d collapses the map to a constant")]
    KSquaredEqualsD,
}

/// A validated parameter pair (d, k) with d != 0 and k^2 != d.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ThetaMap {
    d: Rat,
    k: Rat,
}

/// Exact coordinate polynomials of the n-th iterate: `[F_n : G_n]`,
/// both of formal degree 2^n.
#[derive(Clone, Debug)]
pub struct IterPair {
    pub f: HomPoly,
    pub g: HomPoly,
    pub n: u32,
}

/// Outcome of following an orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitOutcome {
    /// The orbit repeats: tail of length `tail_m` into a cycle of length `cycle_n`.
    Preperiodic { tail_m: usize, cycle_n: usize },
    /// No repeat before the step or height cutoff.
    Wandering { steps: usize, height: BigUint },
}

#[derive(Clone, Debug)]
pub struct OrbitReport {
    /// Visited points in order, starting from the initial point. For a
    /// preperiodic orbit this covers the tail and one full cycle.
    pub points: Vec<ProjPoint>,
    pub outcome: OrbitOutcome,
}

impl OrbitReport {
    pub fn is_preperiodic(&self) -> bool {
        matches!(self.outcome, OrbitOutcome::Preperiodic { .. })
    }

    /// (tail_m, cycle_n) for a preperiodic orbit.
    pub fn preperiodic_type(&self) -> Option<(usize, usize)> {
        match self.outcome {
            OrbitOutcome::Preperiodic { tail_m, cycle_n } => Some((tail_m, cycle_n)),
            OrbitOutcome::Wandering { .. } => None,
        }
    }
}

pub const DEFAULT_MAX_STEPS: usize = 16;

/// 10^30; heights of wandering orbits blow past this within a few steps.
pub fn default_height_cutoff() -> BigUint {
    BigUint::from(10u32).pow(30)
}

impl ThetaMap {
    pub fn new(d: Rat, k: Rat) -> Result<ThetaMap, MapError> {
        if d.is_zero() {
            return Err(MapError::DZero);
        }
        if k.square() == d {
            return Err(MapError::KSquaredEqualsD);
        }
        Ok(ThetaMap { d, k })
    }

    pub fn d(&self) -> &Rat {
        &self.d
    }

    pub fn k(&self) -> &Rat {
        &self.k
    }

    /// Numerator coordinate polynomial: kX^2 - 2dXY + dkY^2.
    pub fn coord_f(&self) -> HomPoly {
        HomPoly::new(vec![
            &self.d * &self.k,
            -&(&Rat::from_int(2) * &self.d),
            self.k.clone(),
        ])
    }

    /// Denominator coordinate polynomial: X^2 - 2kXY + dY^2.
    pub fn coord_g(&self) -> HomPoly {
        HomPoly::new(vec![
            self.d.clone(),
            -&(&Rat::from_int(2) * &self.k),
            Rat::one(),
        ])
    }

    /// Image of a point; the validated parameters guarantee the coordinate
    /// pair never vanishes simultaneously.
    pub fn eval(&self, p: &ProjPoint) -> ProjPoint {
        let (x, y) = p.coords();
        let xr = Rat::new(x.clone(), BigInt::one());
        let yr = Rat::new(y.clone(), BigInt::one());
        let two = Rat::from_int(2);
        let num = &(&(&self.k * &xr.square()) - &(&(&two * &self.d) * &(&xr * &yr)))
            + &(&(&self.d * &self.k) * &yr.square());
        let den =
            &(&xr.square() - &(&(&two * &self.k) * &(&xr * &yr))) + &(&self.d * &yr.square());
        rat_pair_to_point(&num, &den)
    }

    /// d/z projectively; the unique second preimage of theta(z).
    pub fn d_over(&self, p: &ProjPoint) -> ProjPoint {
        let (x, y) = p.coords();
        ProjPoint::new(self.d.numer() * y, self.d.denom() * x)
    }

    /// Iterates until a repeat (preperiodic) or a cutoff (wandering).
    pub fn orbit(&self, start: &ProjPoint, max_steps: usize, height_cutoff: &BigUint) -> OrbitReport {
        assert!(max_steps >= 1);
        let mut points = vec![start.clone()];
        let mut index: HashMap<ProjPoint, usize> = HashMap::new();
        index.insert(start.clone(), 0);
        let mut cur = start.clone();
        for step in 1..=max_steps {
            cur = self.eval(&cur);
            if let Some(&first) = index.get(&cur) {
                return OrbitReport {
                    points,
                    outcome: OrbitOutcome::Preperiodic {
                        tail_m: first,
                        cycle_n: step - first,
                    },
                };
            }
            if cur.height() > *height_cutoff {
                let h = cur.height();
                points.push(cur);
                return OrbitReport {
                    points,
                    outcome: OrbitOutcome::Wandering { steps: step, height: h },
                };
            }
            index.insert(cur.clone(), step);
            points.push(cur.clone());
        }
        let h = cur.height();
        let steps = points.len() - 1;
        OrbitReport {
            points,
            outcome: OrbitOutcome::Wandering { steps, height: h },
        }
    }

    pub fn orbit_default(&self, start: &ProjPoint) -> OrbitReport {
        self.orbit(start, DEFAULT_MAX_STEPS, &default_height_cutoff())
    }

    /// Coordinate polynomials of theta^n; n = 0 is the identity `[X : Y]`.
    pub fn iterates(&self, n: u32) -> IterPair {
        assert!(n <= MAX_ITER, "iteration degree 2^{n} exceeds desk scale");
        let mut f = HomPoly::var_x();
        let mut g = HomPoly::var_y();
        let bf = self.coord_f();
        let bg = self.coord_g();
        for _ in 0..n {
            let nf = f.compose(&bf, &bg);
            let ng = g.compose(&bf, &bg);
            f = nf;
            g = ng;
        }
        IterPair { f, g, n }
    }

    /// n-period polynomial Y*F_n - X*G_n, formal degree 2^n + 1.
    pub fn period_poly(&self, n: u32) -> HomPoly {
        assert!((1..=MAX_ITER).contains(&n));
        let it = self.iterates(n);
        it.f.mul(&HomPoly::var_y()).sub(&it.g.mul(&HomPoly::var_x()))
    }

    /// n-th dynatomic polynomial: the Mobius-weighted product of period
    /// polynomials, with negative exponents carried out by exact division.
    ///
    /// Degree 3 at n = 1 (the full period polynomial; the usual nu_2(n)
    /// degree formula only applies for n >= 2) and nu_2(n) for n >= 2.
    pub fn dynatomic(&self, n: u32) -> Result<HomPoly, PolyError> {
        assert!((1..=MAX_ITER).contains(&n));
        let mut num = HomPoly::constant(Rat::one());
        let mut den = HomPoly::constant(Rat::one());
        for e in 1..=n {
            if n % e != 0 {
                continue;
            }
            match moebius(n / e) {
                1 => num = num.mul(&self.period_poly(e)),
                -1 => den = den.mul(&self.period_poly(e)),
                _ => {}
            }
        }
        exact_div(&num, &den)
    }

    /// Generalized (m,n)-dynatomic polynomial:
    /// dynatomic_n(F_m, G_m) / dynatomic_n(F_{m-1}, G_{m-1}).
    pub fn generalized_dynatomic(&self, m: u32, n: u32) -> Result<HomPoly, PolyError> {
        assert!(m >= 1 && n >= 1 && m + n <= MAX_ITER);
        let star = self.dynatomic(n)?;
        let hi = self.iterates(m);
        let lo = self.iterates(m - 1);
        let num = star.compose(&hi.f, &hi.g);
        let den = star.compose(&lo.f, &lo.g);
        exact_div(&num, &den)
    }

    /// All rational preimages of `p`: the roots of the homogeneous quadratic
    /// B*F(X,Y) - A*G(X,Y) for target [A:B]. At most two points; rationality
    /// decided by an exact discriminant square test. Degree drop at target
    /// w = k surfaces infinity as the root [1:0] of the same quadratic.
    pub fn preimages(&self, p: &ProjPoint) -> Vec<ProjPoint> {
        let (ai, bi) = p.coords();
        let a_t = Rat::new(ai.clone(), BigInt::one());
        let b_t = Rat::new(bi.clone(), BigInt::one());
        let two = Rat::from_int(2);
        // coefficients of X^2, XY, Y^2
        let ca = &(&b_t * &self.k) - &a_t;
        let cb = &(&two * &(&a_t * &self.k)) - &(&two * &(&b_t * &self.d));
        let cc = &(&b_t * &(&self.d * &self.k)) - &(&a_t * &self.d);

        let mut out: Vec<ProjPoint> = Vec::new();
        if ca.is_zero() {
            assert!(
                !(cb.is_zero() && cc.is_zero()),
                "degenerate preimage equation for a valid map"
            );
            out.push(ProjPoint::infinity());
            if !cb.is_zero() {
                out.push(ProjPoint::from_rat(&(&(-&cc) / &cb)));
            }
        } else {
            let disc = &cb.square() - &(&(&(&Rat::from_int(4) * &ca) * &cc));
            if let Some(s) = disc.sqrt() {
                let twoa = &two * &ca;
                out.push(ProjPoint::from_rat(&(&(&(-&cb) + &s) / &twoa)));
                out.push(ProjPoint::from_rat(&(&(&(-&cb) - &s) / &twoa)));
            }
        }
        out.sort_by_key(ProjPoint::order_key);
        out.dedup();
        out
    }
}

impl IterPair {
    /// Evaluation through the coordinate polynomials.
    pub fn eval(&self, p: &ProjPoint) -> ProjPoint {
        rat_pair_to_point(&self.f.eval(p), &self.g.eval(p))
    }
}

fn rat_pair_to_point(num: &Rat, den: &Rat) -> ProjPoint {
    // [num : den] with rational entries: cross-multiply denominators
    let x = num.numer() * den.denom();
    let y = den.numer() * num.denom();
    assert!(
        !(x.is_zero() && y.is_zero()),
        "coordinate polynomials vanished simultaneously"
    );
    ProjPoint::new(x, y)
}

/// Mobius function for the tiny arguments the dynatomic product needs.
fn moebius(n: u32) -> i32 {
    match n {
        1 => 1,
        2 | 3 | 5 | 7 => -1,
        4 => 0,
        6 => 1,
        _ => unreachable!("moebius called with n = {n} > MAX_ITER"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::FactorBudget;
    use crate::poly::{hom_rational_roots, QPoly};
    use rand::{Rng, SeedableRng};

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    fn map(d: &str, k: &str) -> ThetaMap {
        ThetaMap::new(r(d), r(k)).unwrap()
    }

    fn pt(s: &str) -> ProjPoint {
        ProjPoint::from_rat(&r(s))
    }

    #[test]
    fn make_map_validation() {
        assert!(ThetaMap::new(r("2"), r("7/5")).is_ok());
        assert_eq!(ThetaMap::new(r("1"), r("1")), Err(MapError::KSquaredEqualsD));
        assert_eq!(ThetaMap::new(r("0"), r("3")), Err(MapError::DZero));
        assert_eq!(
            ThetaMap::new(r("4/9"), r("-2/3")),
            Err(MapError::KSquaredEqualsD)
        );
    }

    #[test]
    fn eval_examples() {
        let m = map("2", "7/5");
        // 1 is the unique rational fixed point
        assert_eq!(m.eval(&pt("1")), pt("1"));
        // theta(inf) = k for any map
        assert_eq!(m.eval(&ProjPoint::infinity()), pt("7/5"));
        // d = c^2: c -> -c -> c
        let m = map("9", "2");
        assert_eq!(m.eval(&pt("3")), pt("-3"));
        assert_eq!(m.eval(&pt("-3")), pt("3"));
    }

    #[test]
    fn same_image_symmetry() {
        // theta(z) = theta(d/z) for z not in {0, inf}, z^2 != d
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let d = Rat::from_int(rng.gen_range(-20i64..=20));
            let k = Rat::from_int(rng.gen_range(-10i64..=10));
            let Ok(m) = ThetaMap::new(d, k) else { continue };
            let z = Rat::new(
                BigInt::from(rng.gen_range(-30i64..=30)),
                BigInt::from(rng.gen_range(1i64..=10)),
            );
            if z.is_zero() || z.square() == *m.d() {
                continue;
            }
            let p = ProjPoint::from_rat(&z);
            assert_eq!(m.eval(&p), m.eval(&m.d_over(&p)));
        }
    }

    #[test]
    fn orbit_examples() {
        // theta_{-1,0}, start 1: 1 -> inf -> 0 -> 0, type 1_2
        let m = map("-1", "0");
        let rep = m.orbit_default(&pt("1"));
        assert_eq!(rep.preperiodic_type(), Some((2, 1)));
        assert_eq!(rep.points[0], pt("1"));
        assert_eq!(rep.points[1], ProjPoint::infinity());
        assert_eq!(rep.points[2], pt("0"));

        // theta_{2,7/5}, start 2: 2 -> 1 -> 1, type 1_1
        let m = map("2", "7/5");
        let rep = m.orbit_default(&pt("2"));
        assert_eq!(rep.preperiodic_type(), Some((1, 1)));

        // theta_{5,1}, start 1: wandering
        let m = map("5", "1");
        let rep = m.orbit_default(&pt("1"));
        assert!(!rep.is_preperiodic());
    }

    #[test]
    fn iterates_match_repeated_eval() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let m = map("2", "7/5");
        for n in 0..=3u32 {
            let it = m.iterates(n);
            assert_eq!(it.f.formal_degree(), 1 << n);
            assert_eq!(it.g.formal_degree(), 1 << n);
            for _ in 0..20 {
                let z = Rat::new(
                    BigInt::from(rng.gen_range(-15i64..=15)),
                    BigInt::from(rng.gen_range(1i64..=6)),
                );
                let p = ProjPoint::from_rat(&z);
                let mut q = p.clone();
                for _ in 0..n {
                    q = m.eval(&q);
                }
                assert_eq!(it.eval(&p), q, "n={n} z={z}");
            }
        }
        // n = 0 is the identity
        let it = m.iterates(0);
        assert_eq!(it.f, HomPoly::var_x());
        assert_eq!(it.g, HomPoly::var_y());
    }

    #[test]
    fn period_poly_closed_form() {
        // Phi_1 dehomogenized = dk - 3dz + 3kz^2 - z^3
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let d = Rat::from_int(rng.gen_range(1i64..=20));
            let k = Rat::new(
                BigInt::from(rng.gen_range(-10i64..=10)),
                BigInt::from(rng.gen_range(1i64..=5)),
            );
            let Ok(m) = ThetaMap::new(d.clone(), k.clone()) else { continue };
            let phi1 = m.period_poly(1);
            assert_eq!(phi1.formal_degree(), 3);
            let expect = QPoly::new(vec![
                &d * &k,
                -&(&Rat::from_int(3) * &d),
                &Rat::from_int(3) * &k,
                -Rat::one(),
            ]);
            assert_eq!(phi1.dehomogenize(), expect);
        }
    }

    #[test]
    fn fixed_points_are_period_poly_roots() {
        let m = map("2", "7/5");
        let budget = FactorBudget::default();
        let roots = hom_rational_roots(&m.period_poly(1), &budget).unwrap();
        assert!(!roots.is_empty());
        for rec in roots {
            assert_eq!(m.eval(&rec.root), rec.root);
        }
    }

    #[test]
    fn dynatomic_degrees_and_divisibility() {
        let m = map("2", "7/5");
        assert_eq!(m.dynatomic(1).unwrap().formal_degree(), 3);
        assert_eq!(m.dynatomic(2).unwrap().formal_degree(), 2);
        assert_eq!(m.dynatomic(3).unwrap().formal_degree(), 6);
        assert_eq!(m.dynatomic(4).unwrap().formal_degree(), 12);
        // n=1 term is the full period polynomial
        assert_eq!(m.dynatomic(1).unwrap(), m.period_poly(1));
    }

    #[test]
    fn dynatomic_two_closed_form() {
        // Phi*_2 = -(d - k^2)(d - z^2)
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..25 {
            let d = Rat::new(
                BigInt::from(rng.gen_range(-12i64..=12)),
                BigInt::from(rng.gen_range(1i64..=4)),
            );
            let k = Rat::new(
                BigInt::from(rng.gen_range(-12i64..=12)),
                BigInt::from(rng.gen_range(1i64..=4)),
            );
            let Ok(m) = ThetaMap::new(d.clone(), k.clone()) else { continue };
            let got = m.dynatomic(2).unwrap().dehomogenize();
            let dk2 = &d - &k.square();
            let expect = QPoly::new(vec![-&(&dk2 * &d), Rat::zero(), dk2]);
            assert_eq!(got, expect, "d={d} k={k}");
        }
    }

    #[test]
    fn period_poly_reconstructs_from_dynatomics() {
        // Phi_n = prod over e|n of Phi*_e, exactly
        let m = map("3", "1/2");
        for n in 1..=6u32 {
            let mut prod = HomPoly::constant(Rat::one());
            for e in 1..=n {
                if n % e == 0 {
                    prod = prod.mul(&m.dynatomic(e).unwrap());
                }
            }
            assert_eq!(prod, m.period_poly(n), "n={n}");
        }
    }

    #[test]
    fn generalized_dynatomic_k0_forms() {
        // (1,1) for theta_{d,0}: vanishing locus of d^2 + 3dz^2
        let m = map("-3", "0"); // d = -3a^2, a=1: roots z = +-1
        let g = m.generalized_dynatomic(1, 1).unwrap().dehomogenize();
        let budget = FactorBudget::default();
        let roots: Vec<Rat> = crate::poly::rational_roots(&g, &budget)
            .unwrap()
            .into_iter()
            .map(|(root, _)| root)
            .collect();
        assert_eq!(roots, vec![r("-1"), r("1")]);
        // proportional to d^2 + 3dz^2 = 9 - 9z^2
        assert_eq!(g.degree(), 2);
        let c = &g.coeffs()[0] / &r("9");
        assert_eq!(g.coeffs()[2], &c * &r("-9"));

        // (2,1) for theta_{-a^2,0}: roots exactly +-a
        let m = map("-4", "0"); // a = 2
        let g = m.generalized_dynatomic(2, 1).unwrap().dehomogenize();
        let roots: Vec<Rat> = crate::poly::rational_roots(&g, &budget)
            .unwrap()
            .into_iter()
            .map(|(root, _)| root)
            .collect();
        assert_eq!(roots, vec![r("-2"), r("2")]);
    }

    #[test]
    fn generalized_dynatomic_roots_have_stated_type() {
        // roots of Phi*_{m,n} land on an exact-period-n point after m steps
        let budget = FactorBudget::default();
        for (d, k) in [("-1", "0"), ("-3", "0"), ("2", "7/5")] {
            let m = map(d, k);
            for (mm, nn) in [(1u32, 1u32), (2, 1)] {
                let g = m.generalized_dynatomic(mm, nn).unwrap();
                if g.is_zero() {
                    continue;
                }
                for rec in hom_rational_roots(&g, &budget).unwrap() {
                    let rep = m.orbit_default(&rec.root);
                    let (tail, cyc) = rep.preperiodic_type().expect("root must be preperiodic");
                    assert_eq!(cyc, nn as usize, "map ({d},{k}) root {}", rec.root);
                    assert!(tail <= mm as usize);
                }
            }
        }
    }

    #[test]
    fn preimage_examples() {
        // theta_{2,7/5}, target 1 -> {1, 2}
        let m = map("2", "7/5");
        assert_eq!(m.preimages(&pt("1")), vec![pt("1"), pt("2")]);
        // theta_{d,0}, target 0 -> {0, inf}
        let m = map("5", "0");
        assert_eq!(m.preimages(&pt("0")), vec![pt("0"), ProjPoint::infinity()]);
        // theta_{c^2,k}, target -c -> {c} (double root)
        let m = map("9", "1");
        assert_eq!(m.preimages(&pt("-3")), vec![pt("3")]);
    }

    #[test]
    fn preimages_complete_by_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let cutoff = default_height_cutoff();
        let _ = cutoff;
        for _ in 0..60 {
            let d = Rat::new(
                BigInt::from(rng.gen_range(-8i64..=8)),
                BigInt::from(rng.gen_range(1i64..=3)),
            );
            let k = Rat::new(
                BigInt::from(rng.gen_range(-8i64..=8)),
                BigInt::from(rng.gen_range(1i64..=3)),
            );
            let Ok(m) = ThetaMap::new(d, k) else { continue };
            let target = ProjPoint::from_rat(&Rat::new(
                BigInt::from(rng.gen_range(-6i64..=6)),
                BigInt::from(rng.gen_range(1i64..=3)),
            ));
            let found = m.preimages(&target);
            for q in &found {
                assert_eq!(m.eval(q), target);
            }
            // brute force over height <= 50
            for den in 0..=50i64 {
                for num in -50..=50i64 {
                    if num == 0 && den == 0 {
                        continue;
                    }
                    let p = ProjPoint::new(BigInt::from(num), BigInt::from(den));
                    if p.height() > BigUint::from(50u32) {
                        continue;
                    }
                    if m.eval(&p) == target {
                        assert!(found.contains(&p), "missing preimage {p}");
                    }
                }
            }
        }
    }
}
