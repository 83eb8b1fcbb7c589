//! Belief-function fusion over hyper-power sets.
//!
//! Propositions live in the free distributive lattice generated by a finite
//! frame. A [`Model`] forces some of them empty; masses are combined with the
//! DSm classic and hybrid rules, PCR5, or the classical Dempster, Smets, Yager
//! and Dubois–Prade rules. Interval-valued ([`intervals`]) and linguistic
//! ([`qualitative`]) masses reuse the same tuple routing.
//!
//! ```
//! use dsmt_core::{fusion, Bba, Frame, Model};
//!
//! let frame = Frame::new(["A", "B"]).unwrap();
//! let model = Model::shafer(frame.len()).unwrap();
//! let p = |s: &str| frame.parse(s).unwrap();
//! let m1 = Bba::from_masses(2, [(p("A"), 0.6), (p("A | B"), 0.4)]);
//! let m2 = Bba::from_masses(2, [(p("B"), 0.3), (p("A | B"), 0.7)]);
//! let report = fusion::pcr5(&[m1, m2], &model).unwrap();
//! assert!((report.result.mass(&p("A")) - 0.54).abs() < 1e-12);
//! ```

#![no_std]

extern crate alloc;

pub mod bba;
mod engine;
pub mod fusion;
pub mod intervals;
pub mod model;
pub mod pignistic;
pub mod proposition;
pub mod qualitative;

pub use bba::{Bba, Violation};
pub use fusion::{FusionError, FusionReport, Rule};
pub use model::{Model, ModelError};
pub use proposition::{generate, Frame, ParseError, Proposition, Term};
