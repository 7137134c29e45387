//! Rational points: the elliptic fiber at z = ∞, Vieta orbits, and the
//! complete integral-point solver.

pub mod ec;
pub mod integral;
pub mod orbit;

pub use ec::{seed_point, weierstrass_to_fiber, ECPoint, EcError, EllipticCurveQ};
pub use integral::{integral_points_complete, IntegralFamily, IntegralSolutionSet};
pub use orbit::{orbit_explore, vieta_involution, OrbitState, OrbitStats};
