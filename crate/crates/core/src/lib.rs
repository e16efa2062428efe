//! Finite Alexandroff spaces, handled as finite posets.
//!
//! A finite T0 space and its specialization order determine each other:
//! open sets are down-sets. The modules build on that correspondence:
//! [`poset`] holds the order and its metric data, [`topology`] converts
//! between orders and set families, [`maps`] enumerates monotone maps and
//! their homotopy classes, [`reduction`] removes beat points, [`homotopy`]
//! decides homotopy type through cores, and [`complex`] computes integral
//! homology of order complexes.

pub mod complex;
pub mod error;
pub mod generators;
pub mod homotopy;
pub mod limits;
pub mod maps;
pub mod poset;
pub mod reduction;
pub mod topology;
