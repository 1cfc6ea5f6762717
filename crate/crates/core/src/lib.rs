//! Classification machinery for genus-g systems of affine primitive
//! permutation groups: permutation and group arithmetic, an affine group
//! catalog, canonical class labeling, ramification-type enumeration and
//! filtering, generating-tuple searches, braid orbits on Nielsen classes,
//! and the projection-fiber route that computes orbits in the point
//! stabilizer and lifts them back through the socle.

pub mod error;
pub mod perm;
pub mod group;
pub mod conjugacy;
pub mod cosets;
pub mod linalg;
pub mod affine;
pub mod catalog;
pub mod classes;
pub mod types;
pub mod search;
pub mod braid;
pub mod lift;
pub mod pipeline;

pub use error::Error;
pub use perm::Perm;
pub use group::PermGroup;
