//! Q-conjugacy testing for pairs of maps: d' = b²d with k' reached either
//! directly as bd/k or through a Möbius parameter γ.

use crate::arith::{ArithError, FactorBudget, Rat};
use crate::dynamics::ThetaMap;
use crate::poly::{rational_roots, QPoly};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConjugacyBranch {
    Direct,
    Cubic,
}

/// Evidence that two maps are conjugate: the scaling b with d₂ = b²d₁,
/// and either k₂ = bd₁/k₁ (Direct) or the γ realizing
/// k₂ = b(d₁²γ³ + 3d₁k₁γ² + 3d₁γ + k₁)/(d₁k₁γ³ + 3d₁γ² + 3k₁γ + 1) (Cubic).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjugacyWitness {
    pub b: Rat,
    pub branch: ConjugacyBranch,
    pub gamma: Option<Rat>,
}

fn cubic_branch(
    m1: &ThetaMap,
    m2: &ThetaMap,
    b: &Rat,
    budget: &FactorBudget,
) -> Result<Option<Rat>, ArithError> {
    let d1 = m1.d();
    let k1 = m1.k();
    let k2 = m2.k();
    let three = Rat::from_int(3);

    // cross-multiplied: k₂·(d₁k₁γ³ + 3d₁γ² + 3k₁γ + 1) − b·(d₁²γ³ + 3d₁k₁γ² + 3d₁γ + k₁) = 0
    let c3 = &(&(k2 * k1) * d1) - &(b * &d1.square());
    let c2 = &(&three * &(k2 * d1)) - &(&three * &(&(b * d1) * k1));
    let c1 = &(&three * &(k2 * k1)) - &(&three * &(b * d1));
    let c0 = k2 - &(b * k1);
    let cubic = QPoly::new(vec![c0, c1, c2, c3]);

    let accepts = |g: &Rat| -> bool {
        let g2 = g.square();
        let g3 = &g2 * g;
        let den = &(&(&(d1 * k1) * &g3) + &(&three * &(d1 * &g2)))
            + &(&(&three * &(k1 * g)) + &Rat::one());
        if den.is_zero() {
            return false;
        }
        let num = &(&(&d1.square() * &g3) + &(&three * &(&(d1 * k1) * &g2)))
            + &(&(&three * &(d1 * g)) + k1);
        *k2 == &(b * &num) / &den
    };

    if cubic.is_zero() {
        let zero = Rat::zero();
        return Ok(if accepts(&zero) { Some(zero) } else { None });
    }
    let mut roots: Vec<Rat> = rational_roots(&cubic, budget)
        .map_err(|e| match e {
            crate::poly::PolyError::Arith(a) => a,
            crate::poly::PolyError::NotDivisible => {
                unreachable!("root search performs no polynomial division")
            }
        })?
        .into_iter()
        .map(|(g, _)| g)
        .collect();
    // smallest witnesses first: by height, then by value
    roots.sort_by(|a, b| a.height().cmp(&b.height()).then(a.cmp(b)));
    Ok(roots.into_iter().find(accepts))
}

/// First witness found under the fixed priority (+b before −b, Direct
/// before Cubic, smaller γ first), or None if the maps are not conjugate.
/// Both square-root signs are tried independently on each branch.
pub fn are_conjugate(
    m1: &ThetaMap,
    m2: &ThetaMap,
    budget: &FactorBudget,
) -> Result<Option<ConjugacyWitness>, ArithError> {
    let ratio = m2.d() / m1.d();
    let Some(b0) = ratio.sqrt() else {
        return Ok(None);
    };
    debug_assert!(!b0.is_zero());
    for b in [b0.clone(), -&b0] {
        if !m1.k().is_zero() && *m2.k() == &(&b * m1.d()) / m1.k() {
            return Ok(Some(ConjugacyWitness {
                b,
                branch: ConjugacyBranch::Direct,
                gamma: None,
            }));
        }
        if let Some(gamma) = cubic_branch(m1, m2, &b, budget)? {
            return Ok(Some(ConjugacyWitness {
                b,
                branch: ConjugacyBranch::Cubic,
                gamma: Some(gamma),
            }));
        }
    }
    Ok(None)
}
