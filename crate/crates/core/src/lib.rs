//! Grafted hyperbolic surfaces and their deflation to half-translation surfaces.
//!
//! The crate builds a closed hyperbolic surface from Fenchel–Nielsen data,
//! inserts flat cylinders along a weighted multicurve carried by the pants
//! decomposition, and collapses every pair of pants along its orthogeodesic
//! foliation to obtain the associated half-translation surface. Distances on
//! the grafted, hyperbolic and flat surfaces are computed with certified
//! shortest-path nets, which is what the experiments use to measure the
//! distortion of the collapsing and deflation maps.
//!
//! Module map:
//! - [`hyp2`]: upper half-plane kernel.
//! - [`pants`]: pants decompositions, Fenchel–Nielsen surfaces, pants geometry.
//! - [`graft`]: grafted complexes, the collapsing map and grafted distances.
//! - [`ortho`]: orthogeodesic spines of pairs of pants.
//! - [`deflate`]: flat complexes, the deflation map and distortion statistics.
//! - [`inflate`]: inversion of deflation and inflation rays.
//! - [`cantor`]: one-dimensional grafting along a Cantor set.

pub mod cantor;
pub mod deflate;
pub mod error;
pub mod graft;
pub mod hyp2;
pub mod inflate;
pub mod net;
pub mod ortho;
pub mod pants;
pub mod sampling;

pub use error::{GeomError, SurfaceError};
pub use hyp2::{H2Geodesic, H2Isometry, H2Point};
