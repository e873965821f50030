//! Achievable-rate bounds for quantum relay channels.
//!
//! The crate evaluates and optimizes the partial decode-forward,
//! measure-forward and assist-forward rate formulas for relay channels
//! `N: A D → B E`, classifies channel structure (degraded, Hadamard,
//! orthogonal receiver components, classical-quantum) and simulates the
//! one-shot coding primitives behind them at desk scale: typical projectors,
//! square-root measurement decoding and gentle measurement.
//!
//! Modules, bottom-up:
//!
//! - [`qlin`]: labeled states, Kraus channels, POVMs.
//! - [`entropy`]: von Neumann entropy and derived information measures.
//! - [`channels`]: relay channel constructors and structural classifiers.
//! - [`bounds`]: the rate evaluators, returning every bracket term.
//! - [`optimizer`]: random-restart simplex search over ensembles.
//! - [`codesim`]: typical sets, square-root decoding, gentle measurement.
//! - [`formats`]: JSON channel and configuration files.
//! - [`presets`], [`fixtures`]: the named channels and bundled files.
//! - [`cli`]: run manifests and the commands behind the `qrelay` binary.

pub mod bounds;
pub mod channels;
pub mod cli;
pub mod codesim;
pub mod entropy;
pub mod error;
pub mod fixtures;
pub mod formats;
pub mod optimizer;
pub mod presets;
pub mod qlin;

pub use error::{Error, Result};
