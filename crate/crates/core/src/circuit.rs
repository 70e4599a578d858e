//! NCT circuit intermediate representation.
//!
//! A [`Circuit`] is an ordered list of NOT / CNOT / Toffoli gates over a fixed
//! number of lines. Gates and circuits can be built in malformed states (a
//! parser or a random generator may produce them); [`validate`] reports every
//! structural violation, and the operations that need a well-formed circuit
//! call it first.

use std::fmt;

use thiserror::Error;

use crate::bits::MAX_LINES;

/// Zero-based line index; bit `i` of a vector is line `i`.
pub type Line = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Not,
    Cnot,
    Toffoli,
}

impl GateKind {
    pub const ALL: [GateKind; 3] = [GateKind::Not, GateKind::Cnot, GateKind::Toffoli];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Not => 0,
            GateKind::Cnot => 1,
            GateKind::Toffoli => 2,
        }
    }

    pub fn from_arity(controls: usize) -> Option<Self> {
        match controls {
            0 => Some(GateKind::Not),
            1 => Some(GateKind::Cnot),
            2 => Some(GateKind::Toffoli),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Not => "NOT",
            GateKind::Cnot => "CNOT",
            GateKind::Toffoli => "TOFFOLI",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("an NCT gate takes at most 2 controls, got {0}")]
pub struct ArityError(pub usize);

/// One NCT gate. Toffoli controls are stored sorted, so equality is
/// structural with unordered controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gate {
    kind: GateKind,
    controls: [Line; 2],
    target: Line,
}

impl Gate {
    pub fn not(target: Line) -> Self {
        Self {
            kind: GateKind::Not,
            controls: [0, 0],
            target,
        }
    }

    pub fn cnot(control: Line, target: Line) -> Self {
        Self {
            kind: GateKind::Cnot,
            controls: [control, 0],
            target,
        }
    }

    pub fn toffoli(a: Line, b: Line, target: Line) -> Self {
        Self {
            kind: GateKind::Toffoli,
            controls: [a.min(b), a.max(b)],
            target,
        }
    }

    pub fn from_controls(controls: &[Line], target: Line) -> Result<Self, ArityError> {
        match *controls {
            [] => Ok(Self::not(target)),
            [c] => Ok(Self::cnot(c, target)),
            [a, b] => Ok(Self::toffoli(a, b, target)),
            _ => Err(ArityError(controls.len())),
        }
    }

    #[inline]
    pub fn kind(&self) -> GateKind {
        self.kind
    }

    #[inline]
    pub fn target(&self) -> Line {
        self.target
    }

    #[inline]
    pub fn controls(&self) -> &[Line] {
        &self.controls[..self.kind.arity()]
    }

    pub fn has_control(&self, line: Line) -> bool {
        self.controls().contains(&line)
    }

    /// Every line the gate touches, controls first.
    pub fn lines(&self) -> impl Iterator<Item = Line> + '_ {
        self.controls().iter().copied().chain(std::iter::once(self.target))
    }

    /// Packed mask of the control lines. Only meaningful for a valid gate.
    #[inline]
    pub fn control_mask(&self) -> u64 {
        self.controls().iter().fold(0, |m, &c| m | (1u64 << c))
    }

    /// Applies the gate to a packed vector: the target flips iff every control is 1.
    #[inline]
    pub fn apply_packed(&self, bits: u64) -> u64 {
        let m = self.control_mask();
        if bits & m == m {
            bits ^ (1u64 << self.target)
        } else {
            bits
        }
    }

    /// Renames lines through `f`; used when instantiating templates and macros.
    pub fn map_lines(&self, mut f: impl FnMut(Line) -> Line) -> Self {
        match self.kind {
            GateKind::Not => Self::not(f(self.target)),
            GateKind::Cnot => Self::cnot(f(self.controls[0]), f(self.target)),
            GateKind::Toffoli => Self::toffoli(
                f(self.controls[0]),
                f(self.controls[1]),
                f(self.target),
            ),
        }
    }

    fn check(&self, width: usize, index: usize, out: &mut Vec<Diagnostic>) {
        let at = Location::Gate(index);
        for line in self.lines() {
            if line >= width {
                out.push(Diagnostic::error(
                    at,
                    format!("line index out of range: {line} >= width {width}"),
                ));
            }
        }
        if self.has_control(self.target) {
            out.push(Diagnostic::error(at, "target in controls"));
        }
        if self.kind == GateKind::Toffoli && self.controls[0] == self.controls[1] {
            out.push(Diagnostic::error(at, "duplicate control lines"));
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GateKind::Not => write!(f, "NOT->{}", self.target),
            GateKind::Cnot => write!(f, "CNOT{{{}}}->{}", self.controls[0], self.target),
            GateKind::Toffoli => write!(
                f,
                "TOFFOLI{{{},{}}}->{}",
                self.controls[0], self.controls[1], self.target
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Gate(usize),
    Line(usize),
    Circuit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub location: Location,
}

impl Diagnostic {
    fn error(location: Location, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            message: message.into(),
            location,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match self.location {
            Location::Gate(i) => write!(f, "{sev} at gate {i}: {}", self.message),
            Location::Line(i) => write!(f, "{sev} at line {i}: {}", self.message),
            Location::Circuit => write!(f, "{sev}: {}", self.message),
        }
    }
}

/// Ordered list of structural findings; empty means the circuit is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics(Vec<Diagnostic>);

impl Diagnostics {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.0.iter().any(|d| d.severity == Severity::Error)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("invalid circuit: {0}")]
    Invalid(Diagnostics),
    #[error("circuits have different widths ({0} vs {1})")]
    WidthMismatch(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
    line_names: Vec<String>,
}

impl Circuit {
    /// Circuit with default line names `x0 .. x{width-1}`.
    pub fn new(width: usize, gates: Vec<Gate>) -> Self {
        Self {
            width,
            gates,
            line_names: default_names(width),
        }
    }

    pub fn empty(width: usize) -> Self {
        Self::new(width, Vec::new())
    }

    pub fn with_line_names(line_names: Vec<String>, gates: Vec<Gate>) -> Self {
        Self {
            width: line_names.len(),
            gates,
            line_names,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn line_names(&self) -> &[String] {
        &self.line_names
    }

    pub fn line_index(&self, name: &str) -> Option<Line> {
        self.line_names.iter().position(|n| n == name)
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    /// Same lines and names, different gate list.
    pub fn with_gates(&self, gates: Vec<Gate>) -> Self {
        Self {
            width: self.width,
            gates,
            line_names: self.line_names.clone(),
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Circuit) -> Result<Circuit, CircuitError> {
        if self.width != next.width {
            return Err(CircuitError::WidthMismatch(self.width, next.width));
        }
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&next.gates);
        Ok(self.with_gates(gates))
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind() == kind).count()
    }

    pub fn validate(&self) -> Diagnostics {
        validate(self)
    }

    pub fn ensure_valid(&self) -> Result<(), CircuitError> {
        let diags = validate(self);
        if diags.has_errors() {
            Err(CircuitError::Invalid(diags))
        } else {
            Ok(())
        }
    }

    /// Runs every gate on a packed vector. Assumes a valid circuit.
    #[inline]
    pub fn apply_packed(&self, bits: u64) -> u64 {
        self.gates.iter().fold(bits, |v, g| g.apply_packed(v))
    }
}

pub(crate) fn default_names(width: usize) -> Vec<String> {
    (0..width).map(|i| format!("x{i}")).collect()
}

/// Reports every structural violation of `circuit`. Never fails.
pub fn validate(circuit: &Circuit) -> Diagnostics {
    let mut out = Vec::new();
    if circuit.width > MAX_LINES {
        out.push(Diagnostic::error(
            Location::Circuit,
            format!("width {} exceeds the {MAX_LINES}-line limit", circuit.width),
        ));
    }
    if circuit.line_names.len() != circuit.width {
        out.push(Diagnostic::error(
            Location::Circuit,
            format!(
                "{} line names for {} lines",
                circuit.line_names.len(),
                circuit.width
            ),
        ));
    }
    for (i, name) in circuit.line_names.iter().enumerate() {
        if circuit.line_names[..i].contains(name) {
            out.push(Diagnostic::error(
                Location::Line(i),
                format!("duplicate line name {name:?}"),
            ));
        }
    }
    for (i, gate) in circuit.gates.iter().enumerate() {
        gate.check(circuit.width, i, &mut out);
    }
    Diagnostics(out)
}

/// The gate sequence reversed; since every NCT gate is self-inverse this
/// undoes `circuit`.
pub fn inverse(circuit: &Circuit) -> Result<Circuit, CircuitError> {
    circuit.ensure_valid()?;
    let mut gates = circuit.gates.clone();
    gates.reverse();
    Ok(circuit.with_gates(gates))
}
