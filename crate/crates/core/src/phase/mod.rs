//! Planar traveling-wave system: integration in `z`, manifold shooting and
//! orbit bookkeeping.

mod field;
mod orbit;
mod shoot;

pub use field::{Anchor, PlanarField};
pub use orbit::{write_orbit_csv, Orbit, Sample, Terminal};
pub use shoot::{
    manifold_shoot, manifold_shoot_eps, manifold_shoot_tol, shoot_from_axis, shoot_from_axis_tol, w_at, Branch, Guards,
    HalfOrbit, Landing, Saddle, SHOT_RTOL,
};
