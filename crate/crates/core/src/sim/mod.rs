//! Bit-exact evaluation of NCT circuits.
//!
//! Combinational evaluation and permutation extraction live here; the
//! clocked execution model for circuits with feedback and refreshed
//! constants is in [`sequential`].

pub mod sequential;

use std::collections::HashMap;

use thiserror::Error;

use crate::bits::{mask, BitVector, BitsError};
use crate::circuit::{Circuit, CircuitError, Gate};

pub use sequential::{
    run_trace, step, Assignment, SeqError, SequentialCircuit, SequentialBuilder, StateVar,
    StepOutput, Trace,
};

/// Widest circuit for which all `2^width` vectors are enumerated.
pub const MAX_EXHAUSTIVE_WIDTH: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Bits(#[from] BitsError),
    #[error("vector width {got} does not match circuit width {expected}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("gate {gate} touches line {line} outside a {width}-bit vector")]
    GateOutOfRange { gate: Gate, line: usize, width: usize },
    #[error("width {0} is over the exhaustive-enumeration cap of {MAX_EXHAUSTIVE_WIDTH}")]
    TooWide(usize),
    #[error("rows have inconsistent widths")]
    InconsistentWidths,
    #[error("input row {0} appears more than once")]
    DuplicateInput(BitVector),
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
}

/// Target bit XORed with the AND of the controls; everything else unchanged.
pub fn apply_gate(gate: &Gate, bits: BitVector) -> Result<BitVector, SimError> {
    let width = bits.width();
    if let Some(line) = gate.lines().find(|&l| l >= width) {
        return Err(SimError::GateOutOfRange {
            gate: *gate,
            line,
            width,
        });
    }
    Ok(BitVector::new(gate.apply_packed(bits.value()), width)?)
}

/// Applies the gates in sequence order.
pub fn evaluate(circuit: &Circuit, bits: BitVector) -> Result<BitVector, SimError> {
    circuit.ensure_valid()?;
    if bits.width() != circuit.width() {
        return Err(SimError::WidthMismatch {
            expected: circuit.width(),
            got: bits.width(),
        });
    }
    Ok(BitVector::new(circuit.apply_packed(bits.value()), bits.width())?)
}

/// A bijection on `{0 .. 2^width - 1}`; `table[i]` is the image of input `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    width: usize,
    table: Vec<u64>,
}

impl Permutation {
    pub fn new(width: usize, table: Vec<u64>) -> Result<Self, SimError> {
        if width > MAX_EXHAUSTIVE_WIDTH {
            return Err(SimError::TooWide(width));
        }
        let size = 1usize << width;
        if table.len() != size {
            return Err(SimError::NotAPermutation(format!(
                "{} entries for width {width}, expected {size}",
                table.len()
            )));
        }
        let mut seen = vec![false; size];
        for (i, &v) in table.iter().enumerate() {
            if v as usize >= size {
                return Err(SimError::NotAPermutation(format!(
                    "entry {i} maps to {v}, outside the domain"
                )));
            }
            if std::mem::replace(&mut seen[v as usize], true) {
                return Err(SimError::NotAPermutation(format!(
                    "value {v} appears more than once"
                )));
            }
        }
        Ok(Self { width, table })
    }

    pub fn identity(width: usize) -> Result<Self, SimError> {
        if width > MAX_EXHAUSTIVE_WIDTH {
            return Err(SimError::TooWide(width));
        }
        Ok(Self {
            width,
            table: (0..1u64 << width).collect(),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    #[inline]
    pub fn image(&self, input: u64) -> u64 {
        self.table[input as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(i, &v)| i as u64 == v)
    }

    pub fn inverse(&self) -> Self {
        let mut table = vec![0; self.table.len()];
        for (i, &v) in self.table.iter().enumerate() {
            table[v as usize] = i as u64;
        }
        Self {
            width: self.width,
            table,
        }
    }

    /// True when the permutation is a product of an even number of transpositions.
    pub fn is_even(&self) -> bool {
        let mut seen = vec![false; self.table.len()];
        let mut transpositions = 0usize;
        for start in 0..self.table.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0usize;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.table[i] as usize;
                len += 1;
            }
            transpositions += len - 1;
        }
        transpositions.is_multiple_of(2)
    }

    /// Rows as `(input, output)` bit vectors.
    pub fn rows(&self) -> Vec<(BitVector, BitVector)> {
        self.table
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                (
                    BitVector::new(i as u64, self.width).expect("index fits width"),
                    BitVector::new(v, self.width).expect("image fits width"),
                )
            })
            .collect()
    }
}

/// `table[i] = evaluate(circuit, i)` for every input `i`.
pub fn permutation_of(circuit: &Circuit) -> Result<Permutation, SimError> {
    circuit.ensure_valid()?;
    let width = circuit.width();
    if width > MAX_EXHAUSTIVE_WIDTH {
        return Err(SimError::TooWide(width));
    }
    let table = (0..1u64 << width)
        .map(|v| circuit.apply_packed(v) & mask(width))
        .collect();
    Ok(Permutation { width, table })
}

/// Exhaustive equality of two circuits' actions.
pub fn equivalent(a: &Circuit, b: &Circuit) -> Result<bool, SimError> {
    if a.width() != b.width() {
        return Ok(false);
    }
    Ok(permutation_of(a)? == permutation_of(b)?)
}

/// Two distinct inputs sharing one output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collision {
    pub first: BitVector,
    pub second: BitVector,
    pub output: BitVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BijectivityReport {
    pub is_bijective: bool,
    pub collisions: Vec<Collision>,
}

/// Reports every pair of rows with the same output, in row order.
pub fn check_bijective(rows: &[(BitVector, BitVector)]) -> Result<BijectivityReport, SimError> {
    if let Some((i0, o0)) = rows.first() {
        if rows
            .iter()
            .any(|(i, o)| i.width() != i0.width() || o.width() != o0.width())
        {
            return Err(SimError::InconsistentWidths);
        }
    }
    let mut inputs = HashMap::with_capacity(rows.len());
    for (input, _) in rows {
        if inputs.insert(*input, ()).is_some() {
            return Err(SimError::DuplicateInput(*input));
        }
    }
    let mut by_output: HashMap<BitVector, Vec<BitVector>> = HashMap::new();
    let mut order = Vec::new();
    for (input, output) in rows {
        let bucket = by_output.entry(*output).or_default();
        if bucket.is_empty() {
            order.push(*output);
        }
        bucket.push(*input);
    }
    let mut collisions = Vec::new();
    for output in order {
        let inputs = &by_output[&output];
        for (a, first) in inputs.iter().enumerate() {
            for second in &inputs[a + 1..] {
                collisions.push(Collision {
                    first: *first,
                    second: *second,
                    output,
                });
            }
        }
    }
    Ok(BijectivityReport {
        is_bijective: collisions.is_empty(),
        collisions,
    })
}
