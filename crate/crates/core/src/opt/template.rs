//! Identity templates and the default library.
//!
//! A template is a gate sequence over parameter lines `0..width` that
//! composes to the identity. Any rotation of it, and its reversal, is also
//! the identity, so a match of more than half of its gates can be swapped
//! for the inverse of the rest.

use thiserror::Error;

use crate::circuit::{Circuit, Gate};
use crate::sim::MAX_EXHAUSTIVE_WIDTH;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("template is empty")]
    Empty,
    #[error("template width {0} is over the cap of {MAX_EXHAUSTIVE_WIDTH}")]
    TooWide(usize),
    #[error("template gate {index} ({gate}) does not fit {width} lines")]
    BadGate { index: usize, gate: Gate, width: usize },
    #[error("template gates {0} and {1} are equal and adjacent")]
    AdjacentDuplicate(usize, usize),
    #[error("template does not compose to the identity (input {input} maps to {output})")]
    NotIdentity { input: u64, output: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Template {
    width: usize,
    gates: Vec<Gate>,
}

impl Template {
    /// Checks gate validity, the adjacency rule and the identity property by
    /// exhaustive simulation. The two-gate duplicate `[g, g]` is the one
    /// template allowed to have equal neighbours.
    pub fn new(width: usize, gates: Vec<Gate>) -> Result<Self, TemplateError> {
        if gates.is_empty() {
            return Err(TemplateError::Empty);
        }
        if width > MAX_EXHAUSTIVE_WIDTH {
            return Err(TemplateError::TooWide(width));
        }
        let circuit = Circuit::new(width, gates.clone());
        if let Some(d) = circuit.validate().iter().next() {
            let index = match d.location {
                crate::circuit::Location::Gate(i) => i,
                _ => 0,
            };
            return Err(TemplateError::BadGate {
                index,
                gate: gates[index],
                width,
            });
        }
        if gates.len() > 2 {
            let m = gates.len();
            for i in 0..m {
                let j = (i + 1) % m;
                if gates[i] == gates[j] {
                    return Err(TemplateError::AdjacentDuplicate(i, j));
                }
            }
        }
        for input in 0..1u64 << width {
            let output = circuit.apply_packed(input);
            if output != input {
                return Err(TemplateError::NotIdentity { input, output });
            }
        }
        Ok(Self { width, gates })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Every rotation, forward and reversed, in a fixed order.
    pub(crate) fn orientations(&self) -> Vec<Vec<Gate>> {
        let m = self.gates.len();
        let mut out = Vec::with_capacity(2 * m);
        for reversed in [false, true] {
            let base: Vec<Gate> = if reversed {
                self.gates.iter().rev().copied().collect()
            } else {
                self.gates.clone()
            };
            for s in 0..m {
                let rotated: Vec<Gate> = base[s..].iter().chain(&base[..s]).copied().collect();
                if !out.contains(&rotated) {
                    out.push(rotated);
                }
            }
        }
        out
    }
}

/// The built-in library. Every entry passes [`Template::new`].
pub fn default_templates() -> Vec<Template> {
    let n = Gate::not;
    let c = Gate::cnot;
    let t = Gate::toffoli;
    let (a, b, x) = (0, 1, 2);
    let raw: Vec<(usize, Vec<Gate>)> = vec![
        // duplicates
        (1, vec![n(a), n(a)]),
        (2, vec![c(a, b), c(a, b)]),
        (3, vec![t(a, b, x), t(a, b, x)]),
        // commuting pairs
        (3, vec![c(a, b), c(a, x), c(a, b), c(a, x)]),
        (3, vec![c(a, x), c(b, x), c(a, x), c(b, x)]),
        (2, vec![n(b), c(a, b), n(b), c(a, b)]),
        (3, vec![n(x), t(a, b, x), n(x), t(a, b, x)]),
        (3, vec![c(a, x), t(a, b, x), c(a, x), t(a, b, x)]),
        // conjugated controls
        (2, vec![n(a), c(a, b), n(a), c(a, b), n(b)]),
        (3, vec![n(a), t(a, b, x), n(a), t(a, b, x), c(b, x)]),
        (3, vec![c(b, a), t(a, b, x), c(b, a), t(a, b, x), c(b, x)]),
        // target/control chains
        (3, vec![c(a, b), c(b, x), c(a, b), c(b, x), c(a, x)]),
        (3, vec![t(a, b, x), c(a, b), t(a, b, x), c(a, b), c(a, x)]),
    ];
    raw.into_iter()
        .map(|(w, g)| Template::new(w, g).expect("built-in template is an identity"))
        .collect()
}
