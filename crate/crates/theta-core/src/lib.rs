//! Exact-arithmetic analysis of the rational preperiodic structure of the
//! quadratic maps theta_{d,k}(z) = (kz^2 - 2dz + dk)/(z^2 - 2kz + d) over Q.
//!
//! Everything is computed in exact rational arithmetic: periodic points via
//! closed-form criteria and low-degree rational root finding, preperiodic
//! sets by pulling back under rational preimages, and portraits classified
//! against the small catalogue of realizable shapes.

pub mod acceptance;
pub mod arith;
pub mod classify;
pub mod conjugacy;
pub mod dynamics;
pub mod families;
pub mod point;
pub mod poly;
pub mod sweep;

pub use arith::{divisors, factorize, rat_square_root, ArithError, FactorBudget, Rat};
pub use classify::{
    build_portrait, classify_portrait, find_fixed, find_three_cycle, find_two_cycle,
    periodic_inventory, portrait_from_inventory, preperiodic_closure, ClassifyError,
    PeriodicInventory, Portrait, PortraitClass,
};
pub use conjugacy::{are_conjugate, ConjugacyBranch, ConjugacyWitness};
pub use dynamics::{IterPair, MapError, OrbitOutcome, OrbitReport, ThetaMap};
pub use families::{
    verify_family, ExpectedFeature, FamilyError, FamilyReport, FamilySpec, K0Variant, Sign,
};
pub use point::ProjPoint;
pub use poly::{exact_div, hom_rational_roots, rational_roots, HomPoly, PolyError, QPoly, RootRecord};
pub use sweep::{
    enumerate_maps, run_sweep, SweepConfig, SweepOutcome, SweepRecord, SweepSummary,
};
