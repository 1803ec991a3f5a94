//! The eight release gates, runnable from both the CLI and the test suite.
//! Each check returns pass/fail with a short diagnostic instead of
//! panicking, so callers can report every gate.

use crate::arith::{FactorBudget, Rat};
use crate::classify::{build_portrait, preperiodic_closure, PortraitClass};
use crate::conjugacy::{are_conjugate, ConjugacyBranch};
use crate::dynamics::ThetaMap;
use crate::families::{self, ExpectedFeature, FamilySpec, K0Variant, Sign};
use crate::point::ProjPoint;
use crate::sweep::{rationals_up_to_height, run_sweep, SweepConfig};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use std::collections::HashSet;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CriterionResult {
    fn pass(id: usize, name: &'static str, detail: impl Into<String>) -> Self {
        CriterionResult {
            id,
            name,
            pass: true,
            detail: detail.into(),
        }
    }

    fn fail(id: usize, name: &'static str, detail: impl Into<String>) -> Self {
        CriterionResult {
            id,
            name,
            pass: false,
            detail: detail.into(),
        }
    }
}

fn budget() -> FactorBudget {
    FactorBudget::default()
}

fn rat(s: &str) -> Rat {
    s.parse().unwrap()
}

fn map(d: &str, k: &str) -> ThetaMap {
    ThetaMap::new(rat(d), rat(k)).unwrap()
}

fn rand_rat(rng: &mut StdRng, h: i64) -> Rat {
    let n = rng.gen_range(-h..=h);
    let d = rng.gen_range(1..=h);
    Rat::new(n.into(), d.into())
}

fn rand_valid_map(rng: &mut StdRng, hd: i64, hk: i64) -> ThetaMap {
    loop {
        let d = rand_rat(rng, hd);
        let k = rand_rat(rng, hk);
        if let Ok(m) = ThetaMap::new(d, k) {
            return m;
        }
    }
}

/// Gate 1: the reference inputs classify to their published shapes.
pub fn criterion_fixture_classes() -> CriterionResult {
    let (id, name) = (1, "fixture classes");
    let mut cases: Vec<(ThetaMap, PortraitClass)> = vec![
        (map("2", "7/5"), PortraitClass::I),
        (map("49/324", "-1/2"), PortraitClass::II),
        (map("-100/2187", "-1/3"), PortraitClass::III),
        (map("-13417569/640747969", "1"), PortraitClass::IV),
        (map("-1031116321/672121026723", "1"), PortraitClass::V),
    ];
    for a in 1..=3i64 {
        let a = Rat::from_int(a);
        let d3 = &Rat::from_int(-3) * &a.square();
        cases.push((
            ThetaMap::new(d3, Rat::zero()).unwrap(),
            PortraitClass::III,
        ));
        cases.push((
            ThetaMap::new(-&a.square(), Rat::zero()).unwrap(),
            PortraitClass::IV,
        ));
    }
    for (m, expect) in cases {
        match build_portrait(&m, &budget()) {
            Ok(p) if p.class == expect => {}
            Ok(p) => {
                return CriterionResult::fail(
                    id,
                    name,
                    format!("({}, {}): got {}, expected {}", m.d(), m.k(), p.class, expect),
                )
            }
            Err(e) => return CriterionResult::fail(id, name, e.to_string()),
        }
    }
    CriterionResult::pass(id, name, "11 fixtures, exact classes")
}

fn eval_phi1(d: &Rat, k: &Rat, z: &Rat) -> Rat {
    // dk - 3dz + 3kz² - z³
    let z2 = z.square();
    &(&(d * k) - &(&Rat::from_int(3) * &(d * z)))
        + &(&(&Rat::from_int(3) * &(k * &z2)) - &(&z2 * z))
}

fn eval_phi2(d: &Rat, k: &Rat, z: &Rat) -> Rat {
    // -(d - k²)(d - z²)
    -&(&(d - &k.square()) * &(d - &z.square()))
}

fn eval_phi3(d: &Rat, k: &Rat, z: &Rat) -> Rat {
    // (d - k²)²(3d⁴ + 27d³z² + 33d²z⁴ + dz⁶
    //   + k(-24d³z - 80d²z³ - 24dz⁵) + k²(d³ + 33d²z² + 27dz⁴ + 3z⁶))
    let c = |n: i64| Rat::from_int(n);
    let z2 = z.square();
    let z3 = &z2 * z;
    let z4 = &z2 * &z2;
    let z5 = &z4 * z;
    let z6 = &z4 * &z2;
    let d2 = d.square();
    let d3 = &d2 * d;
    let d4 = &d2 * &d2;
    let t0 = &(&(&c(3) * &d4) + &(&c(27) * &(&d3 * &z2)))
        + &(&(&c(33) * &(&d2 * &z4)) + &(d * &z6));
    let t1 = &(&(&c(-24) * &(&d3 * z)) - &(&c(80) * &(&d2 * &z3))) - &(&c(24) * &(d * &z5));
    let t2 = &(&d3 + &(&c(33) * &(&d2 * &z2))) + &(&(&c(27) * &(d * &z4)) + &(&c(3) * &z6));
    let inner = &(&t0 + &(k * &t1)) + &(&k.square() * &t2);
    &(d - &k.square()).square() * &inner
}

/// Gate 2: computed dynatomic polynomials agree with the published closed
/// forms at random sample points.
pub fn criterion_formula_identities() -> CriterionResult {
    let (id, name) = (2, "formula identities");
    let mut rng = StdRng::seed_from_u64(0x0201);
    for trial in 0..60 {
        let m = rand_valid_map(&mut rng, 20, 20);
        let z = rand_rat(&mut rng, 20);
        let (d, k) = (m.d(), m.k());

        let got1 = m.period_poly(1).dehomogenize().eval(&z);
        if got1 != eval_phi1(d, k, &z) {
            return CriterionResult::fail(id, name, format!("Φ₁ mismatch at trial {trial}"));
        }
        let star2 = match m.dynatomic(2) {
            Ok(p) => p,
            Err(e) => return CriterionResult::fail(id, name, e.to_string()),
        };
        if star2.dehomogenize().eval(&z) != eval_phi2(d, k, &z) {
            return CriterionResult::fail(id, name, format!("Φ*₂ mismatch at trial {trial}"));
        }
        let star3 = match m.dynatomic(3) {
            Ok(p) => p,
            Err(e) => return CriterionResult::fail(id, name, e.to_string()),
        };
        if star3.dehomogenize().eval(&z) != eval_phi3(d, k, &z) {
            return CriterionResult::fail(id, name, format!("Φ*₃ mismatch at trial {trial}"));
        }
    }
    CriterionResult::pass(id, name, "Φ₁, Φ*₂, Φ*₃ agree at 60 random triples")
}

/// Gate 3: dynatomic degrees 3, 2, 6, 12 and exact Möbius-product division.
pub fn criterion_dynatomic_degrees() -> CriterionResult {
    let (id, name) = (3, "dynatomic degrees");
    let mut rng = StdRng::seed_from_u64(0x0301);
    for trial in 0..100 {
        let m = rand_valid_map(&mut rng, 12, 12);
        for (n, deg) in [(1u32, 3usize), (2, 2), (3, 6), (4, 12)] {
            match m.dynatomic(n) {
                Ok(p) => {
                    let got = p.dehomogenize().degree();
                    if got != deg {
                        return CriterionResult::fail(
                            id,
                            name,
                            format!(
                                "trial {trial}: deg Φ*_{n} = {got}, expected {deg} at ({}, {})",
                                m.d(),
                                m.k()
                            ),
                        );
                    }
                }
                Err(e) => {
                    return CriterionResult::fail(id, name, format!("trial {trial}: {e}"))
                }
            }
        }
    }
    CriterionResult::pass(id, name, "degrees 3/2/6/12 on 100 maps, all divisions exact")
}

fn draw_family(rng: &mut StdRng, which: usize) -> Result<FamilySpec, families::FamilyError> {
    match which {
        0 => {
            let u = rand_rat(rng, 9);
            let v = rand_rat(rng, 9);
            let spec = families::fixed_point_family(u.clone(), v.clone())?;
            // keep only generic draws: extra square classes add cycles or
            // fixed points and change the shape
            let d = spec.map.d().clone();
            let disc = &(&Rat::from_int(3) * &(&u - &(&Rat::from_int(3) * &v)))
                * &(&(&Rat::from_int(3) * &u) - &v);
            if d.sqrt().is_some()
                || (-&d).sqrt().is_some()
                || (&Rat::from_int(-3) * &d).sqrt().is_some()
                || disc.sqrt().is_some()
            {
                return Err(families::FamilyError::InvalidParams {
                    family: "fixed_point",
                    constraint: "non-generic draw".into(),
                });
            }
            Ok(spec)
        }
        1 => families::period2_family(rand_rat(rng, 9), rand_rat(rng, 9)),
        2 => {
            let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
            families::period3_family(rand_rat(rng, 7), rand_rat(rng, 7), sign)
        }
        3 => families::three_fixed_family(rand_rat(rng, 9), rand_rat(rng, 9)),
        4 => families::fixed_plus_2cycle_family(rand_rat(rng, 9), rand_rat(rng, 9)),
        5 => families::preper12_family(rand_rat(rng, 7), rand_rat(rng, 7), rand_rat(rng, 7)),
        6 => families::preper31_family(rand_rat(rng, 5), rand_rat(rng, 5), rand_rat(rng, 5)),
        7 => families::preper11_plus_period2_family(rand_rat(rng, 9), rand_rat(rng, 9)),
        _ => {
            let variant = match rng.gen_range(0..3) {
                0 => K0Variant::ThreeFixedTails,
                1 => K0Variant::Tail12,
                _ => K0Variant::TwoCycle,
            };
            families::k0_family(variant, rand_rat(rng, 9))
        }
    }
}

/// Gate 4: 200 admissible random draws per family all verify, with the
/// documented portrait class and the exclusion rules for type 1₂ maps.
pub fn criterion_family_suite() -> CriterionResult {
    let (id, name) = (4, "family suite");
    let mut rng = StdRng::seed_from_u64(0x0401);
    let fams = [
        "fixed_point",
        "period2",
        "period3",
        "three_fixed",
        "fixed_plus_2cycle",
        "preper12",
        "preper31",
        "preper11_plus_period2",
        "k0",
    ];
    for (which, fam) in fams.iter().enumerate() {
        let mut done = 0;
        let mut attempts = 0;
        while done < 200 {
            attempts += 1;
            if attempts > 20000 {
                return CriterionResult::fail(
                    id,
                    name,
                    format!("{fam}: admissible draws too rare"),
                );
            }
            let spec = match draw_family(&mut rng, which) {
                Ok(s) => s,
                Err(_) => continue,
            };
            let report = match families::verify_family(&spec, &budget()) {
                Ok(r) => r,
                Err(e) => return CriterionResult::fail(id, name, format!("{fam}: {e}")),
            };
            if !report.pass {
                return CriterionResult::fail(
                    id,
                    name,
                    format!(
                        "{fam} failed at (d, k) = ({}, {}), class {}: {:?}",
                        report.d, report.k, report.class, spec.params
                    ),
                );
            }
            if *fam == "preper12" {
                // a type 1₂ point excludes rational 2- and 3-cycles
                let inv = match crate::classify::periodic_inventory(&spec.map, &budget()) {
                    Ok(inv) => inv,
                    Err(e) => return CriterionResult::fail(id, name, e.to_string()),
                };
                if inv.two_cycle.is_some() || inv.three_cycle.is_some() {
                    return CriterionResult::fail(
                        id,
                        name,
                        format!("preper12 exclusion violated at ({}, {})", report.d, report.k),
                    );
                }
            }
            done += 1;
        }
    }
    CriterionResult::pass(id, name, "9 families × 200 draws verified")
}

/// Gate 5: the full sweep (height(d) ≤ 12, height(k) ≤ 8 plus fixtures)
/// classifies every map into the catalogue with all six shapes realized.
pub fn criterion_sweep() -> CriterionResult {
    let (id, name) = (5, "sweep properties");
    let jobs = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let cfg = SweepConfig {
        max_height_d: 12,
        max_height_k: 8,
        jobs,
        out: None,
    };
    let summary = match run_sweep(&cfg, &budget()) {
        Ok(s) => s,
        Err(e) => return CriterionResult::fail(id, name, e.to_string()),
    };
    if !summary.unresolved.is_empty() {
        return CriterionResult::fail(
            id,
            name,
            format!("{} unresolved maps", summary.unresolved.len()),
        );
    }
    for class in [
        PortraitClass::Empty,
        PortraitClass::I,
        PortraitClass::II,
        PortraitClass::III,
        PortraitClass::IV,
        PortraitClass::V,
    ] {
        if !summary.tally.contains_key(&class) {
            return CriterionResult::fail(id, name, format!("class {class} not realized"));
        }
    }
    let counts: Vec<String> = summary
        .tally
        .iter()
        .map(|(c, n)| format!("{c}: {n}"))
        .collect();
    CriterionResult::pass(
        id,
        name,
        format!("{} maps; {}", summary.maps, counts.join(", ")),
    )
}

/// Gate 6: an exhaustive orbit search over all starts of height ≤ 25 finds
/// exactly the closure's points, for 100 random maps in the sweep range.
pub fn criterion_oracle_equivalence() -> CriterionResult {
    let (id, name) = (6, "orbit oracle equivalence");
    let mut rng = StdRng::seed_from_u64(0x0601);
    let mut starts: Vec<ProjPoint> = rationals_up_to_height(25)
        .iter()
        .map(ProjPoint::from_rat)
        .collect();
    starts.push(ProjPoint::infinity());
    let height_bound: num_bigint::BigUint = 25u32.into();
    for _ in 0..100 {
        let m = rand_valid_map(&mut rng, 12, 8);
        let closure: HashSet<ProjPoint> = match preperiodic_closure(&m, &budget()) {
            Ok(c) => c.into_iter().collect(),
            Err(e) => return CriterionResult::fail(id, name, e.to_string()),
        };
        let brute: HashSet<ProjPoint> = starts
            .iter()
            .filter(|p| m.orbit_default(p).is_preperiodic())
            .cloned()
            .collect();
        let in_range: HashSet<ProjPoint> = closure
            .iter()
            .filter(|p| p.is_infinity() || p.height() <= height_bound)
            .cloned()
            .collect();
        if brute != in_range {
            return CriterionResult::fail(
                id,
                name,
                format!(
                    "mismatch at ({}, {}): brute {:?} vs closure {:?}",
                    m.d(),
                    m.k(),
                    brute,
                    in_range
                ),
            );
        }
    }
    CriterionResult::pass(id, name, "100 maps, brute-force and closure agree")
}

/// Gate 7: scaled pairs are detected conjugate with matching portraits;
/// non-square d-ratios are rejected.
pub fn criterion_conjugacy() -> CriterionResult {
    let (id, name) = (7, "conjugacy detection");
    let mut rng = StdRng::seed_from_u64(0x0701);
    let mut yes = 0;
    while yes < 100 {
        let m1 = rand_valid_map(&mut rng, 9, 9);
        if m1.k().is_zero() {
            continue;
        }
        let b = rand_rat(&mut rng, 6);
        if b.is_zero() {
            continue;
        }
        let d2 = &b.square() * m1.d();
        let k2 = &(&b * m1.d()) / m1.k();
        let Ok(m2) = ThetaMap::new(d2, k2) else {
            continue;
        };
        match are_conjugate(&m1, &m2, &budget()) {
            Ok(Some(w)) => {
                if w.branch == ConjugacyBranch::Direct && w.b != b && w.b != -&b {
                    return CriterionResult::fail(id, name, "direct witness with wrong scaling");
                }
            }
            Ok(None) => {
                return CriterionResult::fail(
                    id,
                    name,
                    format!(
                        "scaled pair not detected: ({}, {}) vs ({}, {})",
                        m1.d(),
                        m1.k(),
                        m2.d(),
                        m2.k()
                    ),
                )
            }
            Err(e) => return CriterionResult::fail(id, name, e.to_string()),
        }
        if yes < 20 {
            // portrait class must transfer across a witness
            let p1 = match build_portrait(&m1, &budget()) {
                Ok(p) => p,
                Err(e) => return CriterionResult::fail(id, name, e.to_string()),
            };
            let p2 = match build_portrait(&m2, &budget()) {
                Ok(p) => p,
                Err(e) => return CriterionResult::fail(id, name, e.to_string()),
            };
            if p1.class != p2.class || p1.vertices.len() != p2.vertices.len() {
                return CriterionResult::fail(
                    id,
                    name,
                    format!("portrait mismatch across conjugacy: {} vs {}", p1.class, p2.class),
                );
            }
        }
        yes += 1;
    }
    let mut no = 0;
    while no < 100 {
        let m1 = rand_valid_map(&mut rng, 9, 9);
        let m2 = rand_valid_map(&mut rng, 9, 9);
        if (m2.d() / m1.d()).sqrt().is_some() {
            continue;
        }
        match are_conjugate(&m1, &m2, &budget()) {
            Ok(None) => no += 1,
            Ok(Some(_)) => {
                return CriterionResult::fail(id, name, "non-square ratio accepted")
            }
            Err(e) => return CriterionResult::fail(id, name, e.to_string()),
        }
    }
    CriterionResult::pass(id, name, "100 scaled pairs yes, 100 obstructed pairs no")
}

/// Gate 8: the 3-cycle closed form closes under exact triple iteration,
/// and x = u puts ∞ on the documented tail into the cycle.
pub fn criterion_period3_closed_form() -> CriterionResult {
    let (id, name) = (8, "period-3 closed form");
    let mut rng = StdRng::seed_from_u64(0x0801);
    let mut done = 0;
    while done < 200 {
        let sign = if done % 2 == 0 { Sign::Plus } else { Sign::Minus };
        let Ok(spec) = families::period3_family(rand_rat(&mut rng, 9), rand_rat(&mut rng, 9), sign)
        else {
            continue;
        };
        let Some(ExpectedFeature::ThreeCycle(a, b, c)) = spec.expected.first() else {
            return CriterionResult::fail(id, name, "missing cycle feature");
        };
        let m = &spec.map;
        if m.eval(a) != *b || m.eval(b) != *c || m.eval(c) != *a {
            return CriterionResult::fail(
                id,
                name,
                format!("cycle does not close at ({}, {})", m.d(), m.k()),
            );
        }
        done += 1;
    }
    // x = u: the closure gains the orbit ∞ → u → -u → 0 → u. The image of
    // u is forced: θ(k) = k(k² - d)/(d - k²) = -k for every valid map, and
    // here k = u.
    for u in ["1", "2", "-3", "5/2"] {
        let u = rat(u);
        let spec = match families::period3_family(u.clone(), u.clone(), Sign::Plus) {
            Ok(s) => s,
            Err(e) => return CriterionResult::fail(id, name, e.to_string()),
        };
        let m = &spec.map;
        if m.k() != &u {
            return CriterionResult::fail(id, name, "x = u should give k = u");
        }
        let expect = [
            ProjPoint::infinity(),
            ProjPoint::from_rat(&u),
            ProjPoint::from_rat(&(-&u)),
            ProjPoint::from_rat(&Rat::zero()),
            ProjPoint::from_rat(&u),
        ];
        let mut cur = expect[0].clone();
        for next in &expect[1..] {
            cur = m.eval(&cur);
            if cur != *next {
                return CriterionResult::fail(
                    id,
                    name,
                    format!("x = u orbit broke at u = {u}: got {cur}, expected {next}"),
                );
            }
        }
        if m.orbit_default(&ProjPoint::infinity()).preperiodic_type() != Some((1, 3)) {
            return CriterionResult::fail(id, name, format!("∞ not of type 3₁ at u = {u}"));
        }
    }
    CriterionResult::pass(id, name, "200 cycles close exactly; x = u tail through ∞ verified")
}

pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion_fixture_classes(),
        criterion_formula_identities(),
        criterion_dynatomic_degrees(),
        criterion_family_suite(),
        criterion_sweep(),
        criterion_oracle_equivalence(),
        criterion_conjugacy(),
        criterion_period3_closed_form(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_criteria() {
        // the cheap gates; the full set runs as an integration test
        for result in [
            criterion_fixture_classes(),
            criterion_formula_identities(),
            criterion_period3_closed_form(),
        ] {
            assert!(result.pass, "criterion {}: {}", result.id, result.detail);
        }
    }
}
