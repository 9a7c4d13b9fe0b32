//! Graphon signal processing laboratory.
//!
//! Graphons are used here as generative models for dense graphs. The crate
//! provides:
//!
//! - graphons, graphon signals and the step functions induced by graphs ([`graphon`], [`graph`]);
//! - template, weighted and stochastic graph sampling ([`sampling`]);
//! - symmetric eigendecompositions with signed eigenvalue indexing, GFT/WFT and
//!   the band constants used by the transferability bounds ([`spectral`]);
//! - polynomial graph and graphon convolutions ([`filters`]);
//! - GNN/WNN forward maps sharing one coefficient tensor, plus ADAM training ([`gnn`]);
//! - closed-form transferability bounds and Monte Carlo checks of their
//!   concentration events ([`bounds`]);
//! - homomorphism densities of small motifs ([`homdensity`]);
//! - seeded, parallel experiment sweeps with CSV/JSON reports ([`experiments`]).

pub mod bounds;
pub mod error;
pub mod experiments;
pub mod filters;
pub mod gnn;
pub mod graph;
pub mod graphon;
pub mod homdensity;
pub mod linalg;
pub mod rng;
pub mod sampling;
pub mod spectral;

pub use error::{Error, Result};
pub use filters::FilterCoeffs;
pub use gnn::{CoefficientTensor, GnnConfig, Nonlinearity};
pub use graph::{Graph, GraphSignal, Provenance};
pub use graphon::{Graphon, GraphonSignal, Kernel, DEFAULT_GRID};
pub use spectral::{Scale, SpectralDecomposition, Spectrum};
