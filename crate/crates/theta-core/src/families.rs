//! Parametrized families of maps with known preperiodic structure, and a
//! verifier that checks each promised feature by direct evaluation.

use crate::arith::{FactorBudget, Rat};
use crate::classify::{build_portrait, ClassifyError, PortraitClass};
use crate::dynamics::{MapError, ThetaMap};
use crate::point::ProjPoint;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("{family}: invalid parameters: {constraint}")]
    InvalidParams {
        family: &'static str,
        constraint: String,
    },
}

fn invalid(family: &'static str, constraint: impl Into<String>) -> FamilyError {
    FamilyError::InvalidParams {
        family,
        constraint: constraint.into(),
    }
}

/// Sign choice selecting one of the two conjugate branches of the 3-cycle
/// parametrization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn rat(self) -> Rat {
        match self {
            Sign::Plus => Rat::one(),
            Sign::Minus => -Rat::one(),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum K0Variant {
    ThreeFixedTails,
    Tail12,
    TwoCycle,
}

/// A dynamical feature a family promises, with its exact witness points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExpectedFeature {
    FixedPoint(ProjPoint),
    TwoCycle(ProjPoint, ProjPoint),
    ThreeCycle(ProjPoint, ProjPoint, ProjPoint),
    /// A strictly preperiodic point of type `cycle`_`depth`.
    Tail {
        cycle: usize,
        depth: usize,
        point: ProjPoint,
    },
}

impl ExpectedFeature {
    pub fn label(&self) -> String {
        match self {
            ExpectedFeature::FixedPoint(p) => format!("fixed point {p}"),
            ExpectedFeature::TwoCycle(a, b) => format!("2-cycle ({a}, {b})"),
            ExpectedFeature::ThreeCycle(a, b, c) => format!("3-cycle ({a}, {b}, {c})"),
            ExpectedFeature::Tail { cycle, depth, point } => {
                format!("type {cycle}_{depth} point {point}")
            }
        }
    }

    pub fn holds(&self, map: &ThetaMap) -> bool {
        match self {
            ExpectedFeature::FixedPoint(p) => map.eval(p) == *p,
            ExpectedFeature::TwoCycle(a, b) => {
                a != b && map.eval(a) == *b && map.eval(b) == *a
            }
            ExpectedFeature::ThreeCycle(a, b, c) => {
                a != b
                    && b != c
                    && a != c
                    && map.eval(a) == *b
                    && map.eval(b) == *c
                    && map.eval(c) == *a
            }
            ExpectedFeature::Tail { cycle, depth, point } => {
                map.orbit_default(point).preperiodic_type() == Some((*depth, *cycle))
            }
        }
    }
}

/// A generated map together with the features its parametrization promises
/// and the portrait classes those features produce.
#[derive(Clone, Debug)]
pub struct FamilySpec {
    pub name: &'static str,
    pub params: Vec<(&'static str, String)>,
    pub map: ThetaMap,
    pub expected: Vec<ExpectedFeature>,
    pub classes: Vec<PortraitClass>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FeatureCheck {
    pub feature: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub family: String,
    pub d: Rat,
    pub k: Rat,
    pub checks: Vec<FeatureCheck>,
    pub class: PortraitClass,
    pub class_ok: bool,
    pub pass: bool,
}

fn make_map(family: &'static str, d: Rat, k: Rat) -> Result<ThetaMap, FamilyError> {
    ThetaMap::new(d, k).map_err(|e| match e {
        MapError::DZero => invalid(family, "d = 0"),
        MapError::KSquaredEqualsD => invalid(family, "k² = d"),
    })
}

fn rint(n: i64) -> Rat {
    Rat::from_int(n)
}

/// Map with rational fixed point v: k = u, d = -(3u - v)v²/(u - 3v).
pub fn fixed_point_family(u: Rat, v: Rat) -> Result<FamilySpec, FamilyError> {
    let fam = "fixed_point";
    let denom = &u - &(&rint(3) * &v);
    if denom.is_zero() {
        return Err(invalid(fam, "u = 3v"));
    }
    let numer = &(&(&rint(3) * &u) - &v) * &v.square();
    if numer.is_zero() {
        return Err(invalid(fam, "d = 0 ((3u - v)v² = 0)"));
    }
    let d = -&(&numer / &denom);
    let map = make_map(fam, d.clone(), u.clone())?;
    let vp = ProjPoint::from_rat(&v);
    let mut expected = vec![ExpectedFeature::FixedPoint(vp.clone())];
    if v.square() != d {
        expected.push(ExpectedFeature::Tail {
            cycle: 1,
            depth: 1,
            point: map.d_over(&vp),
        });
    }
    Ok(FamilySpec {
        name: fam,
        params: vec![("u", u.to_string()), ("v", v.to_string())],
        map,
        expected,
        classes: vec![PortraitClass::I],
    })
}

/// Map with the 2-cycle (c, -c): d = c². The catalogued shape II needs a
/// rational fixed point as well, which generic draws lack, hence the bare
/// 2-cycle shape is also admissible.
pub fn period2_family(c: Rat, k: Rat) -> Result<FamilySpec, FamilyError> {
    let fam = "period2";
    if c.is_zero() {
        return Err(invalid(fam, "c = 0"));
    }
    let map = make_map(fam, c.square(), k.clone())?;
    let expected = vec![ExpectedFeature::TwoCycle(
        ProjPoint::from_rat(&c),
        ProjPoint::from_rat(&(-&c)),
    )];
    Ok(FamilySpec {
        name: fam,
        params: vec![("c", c.to_string()), ("k", k.to_string())],
        map,
        expected,
        classes: vec![PortraitClass::II, PortraitClass::TwoCycleOnly],
    })
}

/// Map with the 3-cycle through x: d = -u²/3 and
/// k = (±u⁴ + 3u³x ∓ 9u²x² - 3ux³)/(u³ ∓ 9u²x - 9ux² ± 9x³).
pub fn period3_family(x: Rat, u: Rat, sign: Sign) -> Result<FamilySpec, FamilyError> {
    let fam = "period3";
    if u.is_zero() {
        return Err(invalid(fam, "u = 0"));
    }
    let three_x = &rint(3) * &x;
    if u == three_x || u == -&three_x {
        return Err(invalid(fam, "u = ±3x"));
    }
    let e = sign.rat();
    let u2 = u.square();
    let u3 = &u2 * &u;
    let u4 = &u2 * &u2;
    let x2 = x.square();
    let x3 = &x2 * &x;
    let k_num = &(&(&e * &u4) + &(&rint(3) * &(&u3 * &x)))
        - &(&(&e * &(&rint(9) * &(&u2 * &x2))) + &(&rint(3) * &(&u * &x3)));
    let k_den = &(&u3 - &(&e * &(&rint(9) * &(&u2 * &x))))
        + &(&(&e * &(&rint(9) * &x3)) - &(&rint(9) * &(&u * &x2)));
    if k_den.is_zero() {
        return Err(invalid(fam, "k denominator u³ ∓ 9u²x - 9ux² ± 9x³ = 0"));
    }
    let k = &k_num / &k_den;
    if k.is_zero() {
        return Err(invalid(fam, "k = 0"));
    }
    let d = -&(&u2 / &rint(3));
    let map = make_map(fam, d, k)?;

    // cycle: x -> u(±u + x)/(u ∓ 3x) -> ∓u(u ∓ x)/(u ± 3x) -> x
    let second = &(&u * &(&(&e * &u) + &x)) / &(&u - &(&e * &three_x));
    let third = -&(&(&e * &(&u * &(&u - &(&e * &x)))) / &(&u + &(&e * &three_x)));
    let cycle = [
        ProjPoint::from_rat(&x),
        ProjPoint::from_rat(&second),
        ProjPoint::from_rat(&third),
    ];
    let mut expected = vec![ExpectedFeature::ThreeCycle(
        cycle[0].clone(),
        cycle[1].clone(),
        cycle[2].clone(),
    )];
    for z in &cycle {
        expected.push(ExpectedFeature::Tail {
            cycle: 3,
            depth: 1,
            point: map.d_over(z),
        });
    }
    Ok(FamilySpec {
        name: fam,
        params: vec![
            ("x", x.to_string()),
            ("u", u.to_string()),
            ("sign", sign.symbol().to_string()),
        ],
        map,
        expected,
        classes: vec![PortraitClass::V],
    })
}

/// Map with three rational fixed points (k ≠ 0 branch):
/// k = -2(3s - 5t)t/(3(s - 3t)(3s - t)), d = -(3s - 13t)²(3s - 7t)²/(2187(s - 3t)⁴).
pub fn three_fixed_family(s: Rat, t: Rat) -> Result<FamilySpec, FamilyError> {
    let fam = "three_fixed";
    let s3t = &s - &(&rint(3) * &t);
    let t3s = &(&rint(3) * &s) - &t;
    if s3t.is_zero() || t3s.is_zero() {
        return Err(invalid(fam, "s ∈ {3t, t/3}"));
    }
    let a = &(&rint(3) * &s) - &(&rint(13) * &t);
    let b = &(&rint(3) * &s) - &(&rint(7) * &t);
    let c = &(&rint(3) * &s) - &(&rint(5) * &t);
    if a.is_zero() || b.is_zero() {
        return Err(invalid(fam, "d = 0 (3s = 13t or 3s = 7t)"));
    }
    let k = &(&rint(-2) * &(&c * &t)) / &(&rint(3) * &(&s3t * &t3s));
    if k.is_zero() {
        return Err(invalid(fam, "k = 0 (t = 0 or 3s = 5t); see the k = 0 family"));
    }
    let s3t2 = s3t.square();
    let d = -&(&(&a.square() * &b.square()) / &(&rint(2187) * &s3t2.square()));
    let map = make_map(fam, d, k)?;
    let z1 = &(&a * &b) / &(&rint(9) * &(&s3t * &t3s));
    let z2 = &(&rint(-2) * &(&a * &t)) / &(&rint(27) * &s3t2);
    let z3 = -&(&(&b * &c) / &(&rint(27) * &s3t2));
    let expected = [z1, z2, z3]
        .iter()
        .map(|z| ExpectedFeature::FixedPoint(ProjPoint::from_rat(z)))
        .collect();
    Ok(FamilySpec {
        name: fam,
        params: vec![("s", s.to_string()), ("t", t.to_string())],
        map,
        expected,
        classes: vec![PortraitClass::III],
    })
}

/// Map with exactly one rational fixed point plus a 2-cycle:
/// k = (3s² - 6st + 7t²)/(2(s - 3t)(3s - t)), d = ((9s² - 42st + 61t²)/(18(s - 3t)²))².
pub fn fixed_plus_2cycle_family(s: Rat, t: Rat) -> Result<FamilySpec, FamilyError> {
    let fam = "fixed_plus_2cycle";
    let s3t = &s - &(&rint(3) * &t);
    let t3s = &(&rint(3) * &s) - &t;
    if s3t.is_zero() || t3s.is_zero() {
        return Err(invalid(fam, "s ∈ {3t, t/3}"));
    }
    let s2 = s.square();
    let t2 = t.square();
    let st = &s * &t;
    let k_num = &(&(&rint(3) * &s2) - &(&rint(6) * &st)) + &(&rint(7) * &t2);
    let k = &k_num / &(&rint(2) * &(&s3t * &t3s));
    let q = &(&(&rint(9) * &s2) - &(&rint(42) * &st)) + &(&rint(61) * &t2);
    if q.is_zero() {
        return Err(invalid(fam, "d = 0"));
    }
    let c = &q / &(&rint(18) * &s3t.square());
    let map = make_map(fam, c.square(), k)?;
    let fixed = &q / &(&rint(6) * &(&s3t * &t3s));
    let expected = vec![
        ExpectedFeature::FixedPoint(ProjPoint::from_rat(&fixed)),
        ExpectedFeature::TwoCycle(ProjPoint::from_rat(&c), ProjPoint::from_rat(&(-&c))),
    ];
    Ok(FamilySpec {
        name: fam,
        params: vec![("s", s.to_string()), ("t", t.to_string())],
        map,
        expected,
        classes: vec![PortraitClass::II],
    })
}

/// Map with a type 1₂ point:
/// d = -k²(8s - 41t)²(64s² - 272st + 97t²)²/((8s - 25t)²(64s² - 784st + 2209t²)²).
pub fn preper12_family(s: Rat, t: Rat, k: Rat) -> Result<FamilySpec, FamilyError> {
    let fam = "preper12";
    if t.is_zero() {
        return Err(invalid(fam, "t = 0"));
    }
    if k.is_zero() {
        return Err(invalid(fam, "k = 0; see the k = 0 family"));
    }
    let p = &(&rint(8) * &s) - &(&rint(25) * &t);
    if p.is_zero() {
        return Err(invalid(fam, "s = 25t/8"));
    }
    let s2 = s.square();
    let t2 = t.square();
    let st = &s * &t;
    let q = &(&(&rint(64) * &s2) - &(&rint(784) * &st)) + &(&rint(2209) * &t2);
    if q.is_zero() {
        return Err(invalid(fam, "64s² - 784st + 2209t² = 0"));
    }
    let a = &(&rint(8) * &s) - &(&rint(41) * &t);
    let m = &(&(&rint(64) * &s2) - &(&rint(272) * &st)) + &(&rint(97) * &t2);
    if a.is_zero() || m.is_zero() {
        return Err(invalid(fam, "d = 0"));
    }
    let ratio = &(&k * &(&a * &m)) / &(&p * &q);
    let d = -&ratio.square();
    let map = make_map(fam, d, k.clone())?;
    let b = &(&rint(8) * &s) - &(&rint(33) * &t);
    let z = &(&k * &(&(&a * &b) * &m)) / &(&(&rint(8) * &(&p * &t)) * &q);
    // the orbit of z ends at the fixed point -k(64s² - 272st + 97t²)
    // /(64s² - 784st + 2209t²), verified by double iteration
    let fixed = -&(&(&k * &m) / &q);
    let expected = vec![
        ExpectedFeature::Tail {
            cycle: 1,
            depth: 2,
            point: ProjPoint::from_rat(&z),
        },
        ExpectedFeature::FixedPoint(ProjPoint::from_rat(&fixed)),
    ];
    Ok(FamilySpec {
        name: fam,
        params: vec![
            ("s", s.to_string()),
            ("t", t.to_string()),
            ("k", k.to_string()),
        ],
        map,
        expected,
        classes: vec![PortraitClass::IV],
    })
}

/// Map with a type 3₁ point:
/// d = -k²(512s³ - 10944s²t + 59544st² - 17001t³)²
///     /(3(512s³ - 17088s²t + 183960st² - 640713t³)²).
pub fn preper31_family(s: Rat, t: Rat, k: Rat) -> Result<FamilySpec, FamilyError> {
    let fam = "preper31";
    if t.is_zero() {
        return Err(invalid(fam, "t = 0"));
    }
    if k.is_zero() {
        return Err(invalid(fam, "k = 0"));
    }
    let s2 = s.square();
    let s3 = &s2 * &s;
    let t2 = t.square();
    let t3 = &t2 * &t;
    let s2t = &s2 * &t;
    let st2 = &s * &t2;
    let n = &(&(&rint(512) * &s3) - &(&rint(10944) * &s2t))
        + &(&(&rint(59544) * &st2) - &(&rint(17001) * &t3));
    let m = &(&(&rint(512) * &s3) - &(&rint(17088) * &s2t))
        + &(&(&rint(183960) * &st2) - &(&rint(640713) * &t3));
    if m.is_zero() {
        return Err(invalid(fam, "512s³ - 17088s²t + 183960st² - 640713t³ = 0"));
    }
    if n.is_zero() {
        return Err(invalid(fam, "d = 0"));
    }
    let d = -&(&(&k.square() * &n.square()) / &(&rint(3) * &m.square()));
    let map = make_map(fam, d, k.clone())?;
    let a = &(&rint(8) * &s) - &(&rint(81) * &t);
    let z = &(&k * &(&a * &n)) / &(&(&rint(24) * &t) * &m);
    let expected = vec![ExpectedFeature::Tail {
        cycle: 3,
        depth: 1,
        point: ProjPoint::from_rat(&z),
    }];
    Ok(FamilySpec {
        name: fam,
        params: vec![
            ("s", s.to_string()),
            ("t", t.to_string()),
            ("k", k.to_string()),
        ],
        map,
        expected,
        classes: vec![PortraitClass::V],
    })
}

/// Map with a type 1₁ point and a 2-cycle: d = c², k = c²(c² + 3r²)/(r(3c² + r²)).
pub fn preper11_plus_period2_family(c: Rat, r: Rat) -> Result<FamilySpec, FamilyError> {
    let fam = "preper11_plus_period2";
    if r.is_zero() {
        return Err(invalid(fam, "r = 0"));
    }
    if c.is_zero() {
        return Err(invalid(fam, "c = 0 (d = 0)"));
    }
    let c2 = c.square();
    let r2 = r.square();
    let k = &(&c2 * &(&c2 + &(&rint(3) * &r2))) / &(&r * &(&(&rint(3) * &c2) + &r2));
    let map = make_map(fam, c2.clone(), k)?;
    let fixed = &c2 / &r;
    let expected = vec![
        ExpectedFeature::FixedPoint(ProjPoint::from_rat(&fixed)),
        ExpectedFeature::Tail {
            cycle: 1,
            depth: 1,
            point: ProjPoint::from_rat(&r),
        },
        ExpectedFeature::TwoCycle(ProjPoint::from_rat(&c), ProjPoint::from_rat(&(-&c))),
    ];
    Ok(FamilySpec {
        name: fam,
        params: vec![("c", c.to_string()), ("r", r.to_string())],
        map,
        expected,
        classes: vec![PortraitClass::II],
    })
}

/// The k = 0 maps θ_{d,0} = -2dz/(z² + d) with their three realizable
/// portraits: d = -3a² (three fixed points with tails), d = -a² (a depth-2
/// tail through ∞), d = c² (a 2-cycle plus the fixed point 0).
pub fn k0_family(variant: K0Variant, a: Rat) -> Result<FamilySpec, FamilyError> {
    let fam = "k0";
    if a.is_zero() {
        return Err(invalid(fam, "parameter = 0 (d = 0)"));
    }
    let zero = ProjPoint::from_int(0);
    let inf = ProjPoint::infinity();
    let pa = ProjPoint::from_rat(&a);
    let na = ProjPoint::from_rat(&(-&a));
    let (variant_name, d, expected, class) = match variant {
        K0Variant::ThreeFixedTails => {
            let d = &rint(-3) * &a.square();
            let t3a = &rint(3) * &a;
            let expected = vec![
                ExpectedFeature::FixedPoint(zero),
                ExpectedFeature::FixedPoint(ProjPoint::from_rat(&t3a)),
                ExpectedFeature::FixedPoint(ProjPoint::from_rat(&(-&t3a))),
                ExpectedFeature::Tail { cycle: 1, depth: 1, point: pa },
                ExpectedFeature::Tail { cycle: 1, depth: 1, point: na },
                ExpectedFeature::Tail { cycle: 1, depth: 1, point: inf },
            ];
            ("three_fixed_tails", d, expected, PortraitClass::III)
        }
        K0Variant::Tail12 => {
            let d = -&a.square();
            let expected = vec![
                ExpectedFeature::FixedPoint(zero),
                ExpectedFeature::Tail { cycle: 1, depth: 2, point: pa },
                ExpectedFeature::Tail { cycle: 1, depth: 2, point: na },
                ExpectedFeature::Tail { cycle: 1, depth: 1, point: inf },
            ];
            ("tail12", d, expected, PortraitClass::IV)
        }
        K0Variant::TwoCycle => {
            let d = a.square();
            let expected = vec![
                ExpectedFeature::FixedPoint(zero),
                ExpectedFeature::TwoCycle(pa, na),
                ExpectedFeature::Tail { cycle: 1, depth: 1, point: inf },
            ];
            ("two_cycle", d, expected, PortraitClass::II)
        }
    };
    let map = make_map(fam, d, Rat::zero())?;
    Ok(FamilySpec {
        name: fam,
        params: vec![
            ("variant", variant_name.to_string()),
            ("a", a.to_string()),
        ],
        map,
        expected,
        classes: vec![class],
    })
}

/// Checks every promised feature by evaluation/orbit and the portrait class
/// against the family's admissible classes. Failures are recorded, not errors.
pub fn verify_family(
    spec: &FamilySpec,
    budget: &FactorBudget,
) -> Result<FamilyReport, ClassifyError> {
    let checks: Vec<FeatureCheck> = spec
        .expected
        .iter()
        .map(|f| FeatureCheck {
            feature: f.label(),
            pass: f.holds(&spec.map),
        })
        .collect();
    let portrait = build_portrait(&spec.map, budget)?;
    let class_ok = spec.classes.contains(&portrait.class);
    let pass = class_ok && checks.iter().all(|c| c.pass);
    Ok(FamilyReport {
        family: spec.name.to_string(),
        d: spec.map.d().clone(),
        k: spec.map.k().clone(),
        checks,
        class: portrait.class,
        class_ok,
        pass,
    })
}
