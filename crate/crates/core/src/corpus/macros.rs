//! NCT emulations of classical irreversible operations and of the
//! Fredkin (controlled-swap) gate.
//!
//! Each classical macro writes its result onto a preset ancilla line and
//! leaves its operand lines as they were.

use std::fmt;
use std::str::FromStr;

use crate::circuit::{Gate, Line};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MacroKind {
    Fredkin,
    Copy,
    And,
    Nand,
    Or,
    Nor,
}

impl MacroKind {
    pub const ALL: [MacroKind; 6] = [
        MacroKind::Fredkin,
        MacroKind::Copy,
        MacroKind::And,
        MacroKind::Nand,
        MacroKind::Or,
        MacroKind::Nor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MacroKind::Fredkin => "FREDKIN",
            MacroKind::Copy => "COPY",
            MacroKind::And => "AND",
            MacroKind::Nand => "NAND",
            MacroKind::Or => "OR",
            MacroKind::Nor => "NOR",
        }
    }

    /// Number of line arguments: `[c, a, b]` for Fredkin, `[a, ancilla]`
    /// for COPY, `[a, b, ancilla]` otherwise.
    pub fn arity(self) -> usize {
        match self {
            MacroKind::Copy => 2,
            _ => 3,
        }
    }

    /// Value the ancilla must hold before the macro runs.
    pub fn ancilla_preset(self) -> Option<bool> {
        match self {
            MacroKind::Fredkin => None,
            MacroKind::Nand | MacroKind::Or => Some(true),
            MacroKind::Copy | MacroKind::And | MacroKind::Nor => Some(false),
        }
    }

    /// The classical function the macro leaves on its ancilla.
    pub fn truth(self, a: bool, b: bool) -> bool {
        match self {
            MacroKind::Fredkin => false,
            MacroKind::Copy => a,
            MacroKind::And => a && b,
            MacroKind::Nand => !(a && b),
            MacroKind::Or => a || b,
            MacroKind::Nor => !(a || b),
        }
    }
}

impl fmt::Display for MacroKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MacroKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MacroKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown macro {s:?}"))
    }
}

/// Expands a macro over concrete lines. Panics if `lines` has the wrong
/// length; callers check [`MacroKind::arity`].
pub fn expand_macro(kind: MacroKind, lines: &[Line]) -> Vec<Gate> {
    assert_eq!(lines.len(), kind.arity(), "{kind} takes {} lines", kind.arity());
    match kind {
        MacroKind::Fredkin => {
            let (c, a, b) = (lines[0], lines[1], lines[2]);
            vec![Gate::cnot(b, a), Gate::toffoli(c, a, b), Gate::cnot(b, a)]
        }
        MacroKind::Copy => vec![Gate::cnot(lines[0], lines[1])],
        MacroKind::And | MacroKind::Nand => {
            vec![Gate::toffoli(lines[0], lines[1], lines[2])]
        }
        // a + b = not(not a . not b): on a 1-preset ancilla the Toffoli of
        // the complemented operands clears it exactly when both are 0
        MacroKind::Or | MacroKind::Nor => {
            let (a, b, z) = (lines[0], lines[1], lines[2]);
            vec![
                Gate::not(a),
                Gate::not(b),
                Gate::toffoli(a, b, z),
                Gate::not(a),
                Gate::not(b),
            ]
        }
    }
}
