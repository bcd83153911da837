//! Simulation and qualitative reconstruction for electrical impedance
//! tomography in the unit disk with a Robin transmission condition on the
//! boundary of an unknown region `D`.
//!
//! The crate is `no_std` (with `alloc`) and split into:
//!
//! * [`geometry`]: points, grids, inclusion shapes, the coefficient `γ`, Fourier voltages
//! * [`greens`]: Dirichlet Green's function of the disk and the boundary probes
//! * [`series`]: exact current-gap operator for a concentric disc
//! * [`bie`]: Nyström boundary-integral forward solver, Born and point-source data
//! * [`music`]: MUSIC localization of small components
//! * [`factorization`]: regularized factorization method for extended regions
//! * [`field`] and [`contour`]: imaging fields, peaks, level sets

#![no_std]

extern crate alloc;

pub mod bie;
pub mod contour;
pub mod error;
pub mod factorization;
pub mod field;
pub mod geometry;
pub mod greens;
pub mod linalg;
pub mod music;
pub mod noise;
pub mod operator;
pub mod series;

pub use error::{Error, Result};
pub use geometry::{
    boundary_curve, harmonic_lifting, BoundaryGrid, DiscComponent, FourierBasisSet, InclusionGeometry, Point,
    RobinCoefficient, SamplingGrid, SmallDiscs, StarShape, TrigProfile,
};
pub use operator::{CurrentGapMatrix, Layout, Provenance};

pub use num_complex::Complex64;
