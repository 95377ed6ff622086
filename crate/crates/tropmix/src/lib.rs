//! Tropical polyhedra with mixed strict and non-strict constraints.
//!
//! The crate covers germ arithmetic ([`germ`]), mixed inequality systems
//! ([`system`]), Fourier-Motzkin projection ([`fm`]), emptiness and
//! implication through parametric mean payoff games ([`mpg`]), redundancy
//! elimination ([`reduce`]), conversions from and to zones ([`zones`]) and a
//! forward reachability checker for timed automata ([`timed`]).

pub mod fm;
pub mod germ;
pub mod mpg;
mod parse;
pub mod reduce;
pub mod system;
pub mod timed;
pub mod zones;

pub use germ::{Epsilon, Extended, Germ, MaxPlus, Rat};
pub use system::{MixedInequality, MixedSystem, Point};
