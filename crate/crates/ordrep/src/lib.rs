//! Order types of sets {x·a mod 1 : a ∈ A} and of shift orbits of infinite
//! words, estimated from finite truncations.

pub mod numeric;
pub mod orbits;
pub mod ordertype;
pub mod words;
pub mod constructor;
