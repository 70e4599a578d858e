//! Reversible NCT circuits: IR, simulation, synthesis, optimization, cost
//! accounting and a verified corpus of reversible flip-flops.

pub mod bits;
pub mod circuit;
pub mod sim;
pub mod synth;
pub mod opt;
pub mod cost;
pub mod corpus;
pub mod netlist;
pub mod cli;
