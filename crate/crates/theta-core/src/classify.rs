//! Rational periodic points of a map, closure under rational preimages,
//! and classification of the resulting preperiodic portrait.

use crate::arith::{ArithError, FactorBudget, Rat};
use crate::dynamics::ThetaMap;
use crate::point::ProjPoint;
use crate::poly::{rational_roots, PolyError};
use serde::Serialize;
use std::collections::HashSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    /// A computed configuration contradicting one of the universal claims
    /// this crate treats as hard invariants (cycle length > 3, more than six
    /// preperiodic points, non-stabilizing pullback). Carries the offending
    /// parameters for machine-readable reporting.
    #[error("theorem violation at (d, k) = ({d}, {k}): {detail}")]
    TheoremViolation { d: Rat, k: Rat, detail: String },
    #[error(transparent)]
    Budget(#[from] ArithError),
}

impl From<PolyError> for ClassifyError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::Arith(a) => ClassifyError::Budget(a),
            PolyError::NotDivisible => ClassifyError::Budget(ArithError::BadLiteral(
                "internal dynatomic division failure".into(),
            )),
        }
    }
}

/// The rational periodic points of a map, grouped by exact period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicInventory {
    pub fixed: Vec<ProjPoint>,
    pub two_cycle: Option<(ProjPoint, ProjPoint)>,
    pub three_cycle: Option<(ProjPoint, ProjPoint, ProjPoint)>,
}

impl PeriodicInventory {
    pub fn all_points(&self) -> Vec<ProjPoint> {
        let mut out = self.fixed.clone();
        if let Some((a, b)) = &self.two_cycle {
            out.push(a.clone());
            out.push(b.clone());
        }
        if let Some((a, b, c)) = &self.three_cycle {
            out.push(a.clone());
            out.push(b.clone());
            out.push(c.clone());
        }
        out
    }
}

/// Portrait shapes realizable over Q.
///
/// `I` through `V` are the five catalogued shapes: fixed point with tail;
/// fixed-with-tail plus a 2-cycle; three fixed points with one tail each;
/// a depth-2 tail into a fixed point; a 3-cycle with one tail per cycle
/// point. `Empty` (no rational preperiodic points at all) and
/// `TwoCycleOnly` (a bare 2-cycle, no rational fixed point) also occur;
/// both fall outside the five-shape catalogue but are genuine, verified
/// outcomes. `Unexpected` marks anything else and is treated as a
/// reportable theorem violation by the sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PortraitClass {
    Empty,
    I,
    II,
    III,
    IV,
    V,
    TwoCycleOnly,
    Unexpected,
}

impl PortraitClass {
    pub const ALL: [PortraitClass; 8] = [
        PortraitClass::Empty,
        PortraitClass::I,
        PortraitClass::II,
        PortraitClass::III,
        PortraitClass::IV,
        PortraitClass::V,
        PortraitClass::TwoCycleOnly,
        PortraitClass::Unexpected,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PortraitClass::Empty => "Empty",
            PortraitClass::I => "I",
            PortraitClass::II => "II",
            PortraitClass::III => "III",
            PortraitClass::IV => "IV",
            PortraitClass::V => "V",
            PortraitClass::TwoCycleOnly => "TwoCycleOnly",
            PortraitClass::Unexpected => "Unexpected",
        }
    }
}

impl fmt::Display for PortraitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The functional graph on PrePer(theta, Q) with its classification.
/// Vertices are in canonical order: by height, then value, infinity last.
#[derive(Clone, Debug)]
pub struct Portrait {
    pub vertices: Vec<ProjPoint>,
    /// `edges[i]` is the index of the image of `vertices[i]`.
    pub edges: Vec<usize>,
    pub class: PortraitClass,
}

/// All rational fixed points, ascending; each verified by evaluation.
/// Infinity is never fixed (its image is the finite value k).
pub fn find_fixed(map: &ThetaMap, budget: &FactorBudget) -> Result<Vec<ProjPoint>, ClassifyError> {
    let phi1 = map.period_poly(1).dehomogenize();
    let mut out = Vec::new();
    for (root, _) in rational_roots(&phi1, budget)? {
        let p = ProjPoint::from_rat(&root);
        debug_assert_eq!(map.eval(&p), p, "period polynomial root not fixed");
        if map.eval(&p) == p {
            out.push(p);
        }
    }
    out.sort_by_key(ProjPoint::order_key);
    Ok(out)
}

/// The 2-cycle (c, -c) when d is a nonzero rational square; verified by
/// two evaluations.
pub fn find_two_cycle(map: &ThetaMap) -> Option<(ProjPoint, ProjPoint)> {
    let c = map.d().sqrt()?;
    if c.is_zero() {
        return None;
    }
    let p = ProjPoint::from_rat(&c);
    let q = ProjPoint::from_rat(&(-&c));
    if map.eval(&p) == q && map.eval(&q) == p {
        Some((p, q))
    } else {
        None
    }
}

/// The rational 3-cycle, if any. Requires k != 0 and -3d a rational square;
/// cycle points are then rational roots of a sign-resolved cubic obtained by
/// clearing the square root in the quadratic-in-k form of the 3rd dynatomic
/// polynomial. Falls back to a direct degree-6 root search. Every candidate
/// is confirmed by dynatomic evaluation and an exact-period-3 orbit.
pub fn find_three_cycle(
    map: &ThetaMap,
    budget: &FactorBudget,
) -> Result<Option<(ProjPoint, ProjPoint, ProjPoint)>, ClassifyError> {
    if map.k().is_zero() {
        return Ok(None);
    }
    let neg3d = &Rat::from_int(-3) * map.d();
    let Some(u) = neg3d.sqrt() else {
        return Ok(None);
    };
    debug_assert!(!u.is_zero());

    let k = map.k().clone();
    let three = Rat::from_int(3);
    let nine = Rat::from_int(9);

    let confirm = |x: &Rat| -> Result<Option<(ProjPoint, ProjPoint, ProjPoint)>, ClassifyError> {
        let p = ProjPoint::from_rat(x);
        let star3 = map.dynatomic(3)?;
        if !star3.eval(&p).is_zero() {
            return Ok(None);
        }
        let rep = map.orbit_default(&p);
        if rep.preperiodic_type() != Some((0, 3)) {
            return Ok(None);
        }
        let q = map.eval(&p);
        let r = map.eval(&q);
        Ok(Some((p, q, r)))
    };

    for sign in [Rat::one(), -Rat::one()] {
        // The cycle equation k*(u^3 - e*9u^2 x - 9u x^2 + e*9x^3) =
        // e*u^4 + 3u^3 x - e*9u^2 x^2 - 3u x^3, after substituting x = u*y
        // and dividing by u^3, collapses to A*y^3 + 9B*y^2 - A*y - B with
        // A = 9ek + 3u and B = eu - k, keeping the coefficients linear in
        // k and u instead of quartic.
        let a = &(&sign * &(&nine * &k)) + &(&three * &u);
        let b = &(&sign * &u) - &k;
        let cubic = crate::poly::QPoly::new(vec![-&b, -&a, &nine * &b, a.clone()]);
        if cubic.is_zero() {
            continue;
        }
        for (y, _) in rational_roots(&cubic, budget)? {
            let x = &u * &y;
            if let Some(cycle) = confirm(&x)? {
                return Ok(Some(cycle));
            }
        }
    }

    // No fallback search on the sextic is needed: whenever u is rational,
    // the third dynatomic polynomial factors as a constant times the product
    // of the two sign cubics (see `sign_cubics_factor_third_dynatomic`), so
    // every rational point of exact period three is a root of one of them.
    Ok(None)
}

/// Full periodic inventory with the structural dichotomies enforced.
pub fn periodic_inventory(
    map: &ThetaMap,
    budget: &FactorBudget,
) -> Result<PeriodicInventory, ClassifyError> {
    let inv = PeriodicInventory {
        fixed: find_fixed(map, budget)?,
        two_cycle: find_two_cycle(map),
        three_cycle: find_three_cycle(map, budget)?,
    };
    let violation = |detail: &str| ClassifyError::TheoremViolation {
        d: map.d().clone(),
        k: map.k().clone(),
        detail: detail.to_string(),
    };
    if ![0, 1, 3].contains(&inv.fixed.len()) {
        return Err(violation(&format!("{} rational fixed points", inv.fixed.len())));
    }
    if inv.two_cycle.is_some() && inv.three_cycle.is_some() {
        return Err(violation("coexisting 2-cycle and 3-cycle"));
    }
    if inv.fixed.len() == 3 && (inv.two_cycle.is_some() || inv.three_cycle.is_some()) {
        return Err(violation("three fixed points alongside a longer cycle"));
    }
    Ok(inv)
}

const MAX_PREPER: usize = 6;
const MAX_PULLBACK_DEPTH: usize = 8;

/// PrePer(theta, Q): the periodic points closed under iterated rational
/// preimages. Aborts with `TheoremViolation` if the closure exceeds six
/// points or the pullback fails to stabilize.
pub fn preperiodic_closure(
    map: &ThetaMap,
    budget: &FactorBudget,
) -> Result<Vec<ProjPoint>, ClassifyError> {
    let inv = periodic_inventory(map, budget)?;
    closure_from_inventory(map, &inv)
}

pub fn closure_from_inventory(
    map: &ThetaMap,
    inv: &PeriodicInventory,
) -> Result<Vec<ProjPoint>, ClassifyError> {
    let mut set: HashSet<ProjPoint> = inv.all_points().into_iter().collect();
    let mut frontier: Vec<ProjPoint> = set.iter().cloned().collect();
    let mut depth = 0usize;
    while !frontier.is_empty() {
        depth += 1;
        if depth > MAX_PULLBACK_DEPTH {
            return Err(ClassifyError::TheoremViolation {
                d: map.d().clone(),
                k: map.k().clone(),
                detail: format!("preimage pullback not stable after {MAX_PULLBACK_DEPTH} rounds"),
            });
        }
        let mut next = Vec::new();
        for p in &frontier {
            for q in map.preimages(p) {
                if set.insert(q.clone()) {
                    next.push(q);
                }
            }
        }
        if set.len() > MAX_PREPER {
            return Err(ClassifyError::TheoremViolation {
                d: map.d().clone(),
                k: map.k().clone(),
                detail: format!("more than {MAX_PREPER} rational preperiodic points"),
            });
        }
        frontier = next;
    }
    let mut out: Vec<ProjPoint> = set.into_iter().collect();
    out.sort_by_key(ProjPoint::order_key);
    Ok(out)
}

/// Per-vertex (cycle length, tail depth) of the functional graph.
fn vertex_signature(edges: &[usize]) -> Vec<(usize, usize)> {
    let n = edges.len();
    let mut sig = Vec::with_capacity(n);
    for start in 0..n {
        let mut seen = vec![usize::MAX; n];
        let mut walk = Vec::new();
        let mut cur = start;
        while seen[cur] == usize::MAX {
            seen[cur] = walk.len();
            walk.push(cur);
            cur = edges[cur];
        }
        let enter = seen[cur];
        sig.push((walk.len() - enter, enter));
    }
    sig
}

/// Structural classification of a functional graph against the catalogue
/// of realizable shapes. Only the class is inspected; vertex labels are
/// irrelevant.
pub fn classify_portrait(edges: &[usize]) -> PortraitClass {
    if edges.is_empty() {
        return PortraitClass::Empty;
    }
    if edges.len() > MAX_PREPER {
        return PortraitClass::Unexpected;
    }
    let mut sig = vertex_signature(edges);
    sig.sort_unstable();
    match sig.as_slice() {
        [(1, 0), (1, 1)] => PortraitClass::I,
        [(1, 0), (1, 1), (2, 0), (2, 0)] => PortraitClass::II,
        [(1, 0), (1, 0), (1, 0), (1, 1), (1, 1), (1, 1)] => PortraitClass::III,
        [(1, 0), (1, 1), (1, 2), (1, 2)] => PortraitClass::IV,
        [(2, 0), (2, 0)] => PortraitClass::TwoCycleOnly,
        [(3, 0), (3, 0), (3, 0), (3, 1), (3, 1), (3, 1)] => PortraitClass::V,
        _ => PortraitClass::Unexpected,
    }
}

/// Builds and classifies the portrait of a map, enforcing every structural
/// law along the way (cycle lengths, tail depths, exclusion rules).
pub fn build_portrait(map: &ThetaMap, budget: &FactorBudget) -> Result<Portrait, ClassifyError> {
    let inv = periodic_inventory(map, budget)?;
    portrait_from_inventory(map, &inv)
}

/// Same as [`build_portrait`] when the inventory is already at hand.
pub fn portrait_from_inventory(
    map: &ThetaMap,
    inv: &PeriodicInventory,
) -> Result<Portrait, ClassifyError> {
    let vertices = closure_from_inventory(map, inv)?;
    let edges: Vec<usize> = vertices
        .iter()
        .map(|p| {
            let img = map.eval(p);
            vertices
                .iter()
                .position(|q| *q == img)
                .expect("closure not closed under the map")
        })
        .collect();

    let violation = |detail: String| ClassifyError::TheoremViolation {
        d: map.d().clone(),
        k: map.k().clone(),
        detail,
    };

    let sig = vertex_signature(&edges);
    let has_tail12 = sig.iter().any(|&(c, t)| c == 1 && t == 2);
    for &(cyc, tail) in &sig {
        if cyc > 3 {
            return Err(violation(format!("cycle of length {cyc}")));
        }
        if tail >= 3 {
            return Err(violation(format!("tail of depth {tail}")));
        }
        if cyc == 2 && tail >= 1 {
            return Err(violation("tail into a 2-cycle".into()));
        }
        if cyc == 3 && tail >= 2 {
            return Err(violation("depth-2 tail into a 3-cycle".into()));
        }
    }
    if has_tail12 && (inv.two_cycle.is_some() || inv.three_cycle.is_some()) {
        return Err(violation("depth-2 tail alongside a longer cycle".into()));
    }
    // every fixed point z keeps its second preimage d/z in the closure
    for z in &inv.fixed {
        let t = map.d_over(z);
        if !vertices.contains(&t) {
            return Err(violation(format!("missing tail point {t} of fixed point {z}")));
        }
    }

    let class = classify_portrait(&edges);
    Ok(Portrait {
        vertices,
        edges,
        class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::MapError;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    fn map(d: &str, k: &str) -> ThetaMap {
        ThetaMap::new(r(d), r(k)).unwrap()
    }

    fn pt(s: &str) -> ProjPoint {
        ProjPoint::from_rat(&r(s))
    }

    fn budget() -> FactorBudget {
        FactorBudget::default()
    }

    #[test]
    fn find_fixed_examples() {
        assert_eq!(find_fixed(&map("2", "7/5"), &budget()).unwrap(), vec![pt("1")]);
        // k = 0, -3d non-square: only 0
        assert_eq!(find_fixed(&map("5", "0"), &budget()).unwrap(), vec![pt("0")]);
        // d = -3: three fixed points 0, 3, -3
        let mut fixed = find_fixed(&map("-3", "0"), &budget()).unwrap();
        fixed.sort_by_key(ProjPoint::order_key);
        assert_eq!(fixed, vec![pt("0"), pt("-3"), pt("3")]);
    }

    #[test]
    fn find_two_cycle_examples() {
        let got = find_two_cycle(&map("49/324", "-1/2")).unwrap();
        assert_eq!(got, (pt("7/18"), pt("-7/18")));
        assert!(find_two_cycle(&map("2", "7/5")).is_none());
        assert!(find_two_cycle(&map("-1", "0")).is_none());
    }

    #[test]
    fn find_three_cycle_examples() {
        // parametrized cycle {2, -3/5, 1/7} at (d,k) = (-1/3, -53/19)
        let cyc = find_three_cycle(&map("-1/3", "-53/19"), &budget())
            .unwrap()
            .unwrap();
        let set: HashSet<ProjPoint> = [cyc.0.clone(), cyc.1.clone(), cyc.2.clone()].into();
        assert_eq!(set, HashSet::from([pt("2"), pt("-3/5"), pt("1/7")]));
        // k = 0 never has a rational 3-cycle
        assert!(find_three_cycle(&map("-3", "0"), &budget()).unwrap().is_none());
        // -3d non-square
        assert!(find_three_cycle(&map("2", "7/5"), &budget()).unwrap().is_none());
    }

    #[test]
    fn sign_cubics_factor_third_dynatomic() {
        // When u = sqrt(-3d) is rational, the third dynatomic polynomial is a
        // constant multiple of the product of the two sign cubics (in the
        // original x-coordinate), so the cubic search is exhaustive.
        for (ds, ks) in [
            ("-100/2187", "-1/3"),
            ("-3/4", "5"),
            ("-12", "7/3"),
            ("-27/16", "11/5"),
        ] {
            let m = map(ds, ks);
            let u = (&Rat::from_int(-3) * m.d()).sqrt().unwrap();
            let star3 = m.dynatomic(3).unwrap().dehomogenize();
            let k = m.k().clone();
            let three = Rat::from_int(3);
            let nine = Rat::from_int(9);
            let u2 = u.square();
            let u3 = &u2 * &u;
            let u4 = &u2 * &u2;
            let cubic = |sign: &Rat| {
                let c0 = &(&k * &u3) - &(sign * &u4);
                let c1 = -&(&(sign * &(&nine * &(&k * &u2))) + &(&three * &u3));
                let c2 = &(sign * &(&nine * &u2)) - &(&nine * &(&k * &u));
                let c3 = &(sign * &(&nine * &k)) + &(&three * &u);
                crate::poly::QPoly::new(vec![c0, c1, c2, c3])
            };
            let qp = cubic(&Rat::one());
            let qm = cubic(&(-Rat::one()));
            let mut ratio: Option<Rat> = None;
            // degree 6 on both sides, so agreement at seven points is equality
            for t in 2..9i64 {
                let x = Rat::from_int(t);
                let prod = &qp.eval(&x) * &qm.eval(&x);
                assert!(!prod.is_zero(), "sample point collided with a root");
                let r = &star3.eval(&x) / &prod;
                match &ratio {
                    None => ratio = Some(r),
                    Some(r0) => assert_eq!(&r, r0, "d={ds} k={ks}"),
                }
            }
        }
    }

    #[test]
    fn closure_examples() {
        assert_eq!(
            preperiodic_closure(&map("2", "7/5"), &budget()).unwrap(),
            vec![pt("1"), pt("2")]
        );
        let got = preperiodic_closure(&map("-1", "0"), &budget()).unwrap();
        assert_eq!(
            got,
            vec![pt("-1"), pt("0"), pt("1"), ProjPoint::infinity()]
        );
        assert!(preperiodic_closure(&map("5", "1"), &budget()).unwrap().is_empty());
    }

    #[test]
    fn closure_idempotent_and_closed() {
        for (d, k) in [("2", "7/5"), ("-1", "0"), ("-3", "0"), ("49/324", "-1/2")] {
            let m = map(d, k);
            let c = preperiodic_closure(&m, &budget()).unwrap();
            let set: HashSet<_> = c.iter().cloned().collect();
            for p in &c {
                assert!(set.contains(&m.eval(p)), "not forward closed");
                for q in m.preimages(p) {
                    assert!(set.contains(&q), "not preimage closed");
                }
            }
        }
    }

    #[test]
    fn portrait_fixture_classes() {
        let cases = [
            ("2", "7/5", PortraitClass::I),
            ("49/324", "-1/2", PortraitClass::II),
            ("-100/2187", "-1/3", PortraitClass::III),
            ("-3", "0", PortraitClass::III),
            ("-1", "0", PortraitClass::IV),
            ("-1/3", "-53/19", PortraitClass::V),
            ("5", "1", PortraitClass::Empty),
            ("1", "0", PortraitClass::II),
            // a 2-cycle with no rational fixed point: a real shape the
            // five-shape catalogue does not list
            ("1", "2", PortraitClass::TwoCycleOnly),
        ];
        for (d, k, expect) in cases {
            let p = build_portrait(&map(d, k), &budget()).unwrap();
            assert_eq!(p.class, expect, "({d}, {k})");
        }
    }

    #[test]
    fn portrait_vertex_counts() {
        let p = build_portrait(&map("-3", "0"), &budget()).unwrap();
        assert_eq!(p.vertices.len(), 6);
        let expect: HashSet<ProjPoint> = [
            pt("0"),
            pt("1"),
            pt("-1"),
            pt("3"),
            pt("-3"),
            ProjPoint::infinity(),
        ]
        .into();
        assert_eq!(p.vertices.iter().cloned().collect::<HashSet<_>>(), expect);
    }

    #[test]
    fn classify_structural_shapes() {
        // a -> b, b -> b
        assert_eq!(classify_portrait(&[1, 1]), PortraitClass::I);
        // p <-> q, r -> s -> s
        assert_eq!(classify_portrait(&[1, 0, 3, 3]), PortraitClass::II);
        // three fixed with tails
        assert_eq!(classify_portrait(&[3, 4, 5, 3, 4, 5]), PortraitClass::III);
        // t -> m -> p(fix), u -> m
        assert_eq!(classify_portrait(&[1, 2, 2, 1]), PortraitClass::IV);
        // 3-cycle with one tail each
        assert_eq!(classify_portrait(&[1, 2, 0, 0, 1, 2]), PortraitClass::V);
        assert_eq!(classify_portrait(&[]), PortraitClass::Empty);
        assert_eq!(classify_portrait(&[1, 0]), PortraitClass::TwoCycleOnly);
        // bare fixed point: not realizable, hence unexpected
        assert_eq!(classify_portrait(&[0]), PortraitClass::Unexpected);
        // 4-cycle
        assert_eq!(classify_portrait(&[1, 2, 3, 0]), PortraitClass::Unexpected);
    }

    #[test]
    fn classify_invariant_under_relabeling() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let graphs: Vec<Vec<usize>> = vec![
            vec![1, 1],
            vec![1, 0, 3, 3],
            vec![3, 4, 5, 3, 4, 5],
            vec![1, 2, 2, 1],
            vec![1, 2, 0, 0, 1, 2],
        ];
        for edges in graphs {
            let base = classify_portrait(&edges);
            for _ in 0..10 {
                let n = edges.len();
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                let mut relabeled = vec![0; n];
                for i in 0..n {
                    relabeled[perm[i]] = perm[edges[i]];
                }
                assert_eq!(classify_portrait(&relabeled), base);
            }
        }
    }

    #[test]
    fn degenerate_parameters_rejected() {
        assert_eq!(ThetaMap::new(r("1"), r("-1")), Err(MapError::KSquaredEqualsD));
        assert_eq!(ThetaMap::new(r("0"), r("0")), Err(MapError::DZero));
    }
}
