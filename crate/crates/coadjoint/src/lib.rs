//! Character-formula contours for coadjoint orbits of low-rank real reductive groups.
//!
//! The crate builds, from exact root data, the contour attached to a semisimple
//! orbital parameter and a maximally real admissible polarization, integrates
//! Gaussian test densities over it, and compares the result with closed-form
//! invariant eigendistributions paired against the same densities.
//!
//! Module map, bottom-up:
//! - [`rootdata`]: exact root systems, Weyl groups, half-sums.
//! - [`realforms`]: matrix models of the catalog groups with their involutions and Cartans.
//! - [`orbits`]: orbital parameters, good range, integrality, infinitesimal character.
//! - [`polarize`]: polarizations, the canonical maximally real one, the induction scaffold.
//! - [`characters`]: Weyl denominators, j^{1/2}, character tables, pairing with densities.
//! - [`contour`]: charts, KKS form, Pfaffian volume, Fourier transforms of contours.
//! - [`cli`]: experiment configs, reports, cache and the command-line front end.

pub mod characters;
pub mod cli;
pub mod contour;
pub mod matrix;
pub mod orbits;
pub mod polarize;
pub mod quadrature;
pub mod realforms;
pub mod rootdata;

pub use characters::{GaussianDensity, InvariantEigendistribution};
pub use contour::Contour;
pub use orbits::OrbitalParameter;
pub use polarize::Polarization;
pub use realforms::{catalog, GroupCatalogEntry, GroupLabel};
pub use rootdata::{GaussQ, RootDatum, Weight};
