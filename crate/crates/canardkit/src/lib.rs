//! canardkit: slow invariant manifold expansions and canard-explosion
//! location for planar fast/slow polynomial systems.
//!
//! The toolkit computes the canard expansion of a singularly perturbed
//! system eps*x' = f(x, y, mu, eps), y' = g(x, y, mu, eps) by two
//! independent symbolic routes — the geometric singular-perturbation
//! expansion of the invariance equation, and the flow-curvature
//! extraction from determinants of trajectory jets — cross-validates
//! them exactly, and checks the predicted bifurcation-parameter series
//! against direct stiff integration of the flow.

pub mod algebra;
pub mod cli;
pub mod fcm;
pub mod gspm;
pub mod numerics;
pub mod sysmodel;
