//! A symbolic model of Robinson arithmetic `Q` plus the pairing axiom, built
//! from canonical tree terms, with the closure and embedding machinery and an
//! Ehrenfeucht-Fraisse game engine on top.

pub mod agents;
pub mod arith;
pub mod closure;
pub mod embedding;
pub mod error;
pub mod family;
pub mod game;
pub mod index;
pub mod lemmas;
pub mod parse;
pub mod rho;
pub mod sample;
pub mod service;
pub mod term;
pub mod transcript;

pub use arith::Element;
pub use error::{ModelError, ParseError};
pub use family::FamilySet;
pub use index::Index;
pub use term::{Kind, OrbitKey, Term};
