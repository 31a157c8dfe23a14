//! Higher-dimensional Vicsek set graphs: construction, Laplacian spectra by
//! spectral decimation and by dense diagonalization, eigenfunction
//! extension/restriction, and isomorphism of Vicsek set lattices.
//!
//! The crate is organized bottom-up:
//!
//! * [`cheb`] – Chebyshev polynomials of both kinds, exact and floating.
//! * [`params`] – the `(d, n)` pair and the constants derived from it.
//! * [`roots`] – exact-sign root isolation for integer polynomials.
//! * [`decim`] – decimation polynomial, forbidden set, inverse branches and
//!   closed-form Neumann/Dirichlet spectra.
//! * [`graph`] – exact level-`m` approximating graphs and their Laplacians.
//! * [`eigoracle`] – dense symmetric eigensolver and multiplicity clustering.
//! * [`eigmap`] – extension and restriction of eigenfunctions between levels.
//! * [`lattice`] – blow-up trees, center-path metrics and the isomorphism test.
//! * [`suite`] – property suites shared by the CLI `verify` command.
//!
//! Data-parallel loops go through [`Exec`]; with the `parallel` feature
//! disabled every [`Exec::Parallel`] request runs sequentially.

pub mod cheb;
pub mod decim;
pub mod eigmap;
pub mod eigoracle;
mod error;
mod exec;
pub mod graph;
pub mod lattice;
pub mod params;
pub mod rational;
pub mod roots;
pub mod suite;

pub use error::{Error, Result};
pub use exec::Exec;
pub use params::Params;
