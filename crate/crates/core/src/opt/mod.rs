//! Local rewriting passes: deletion, moving and template matching.
//!
//! Every pass keeps the circuit's permutation and never adds gates. The
//! moving rule only ever swaps gates that satisfy [`can_swap`], which is a
//! sufficient (not necessary) condition for two NCT gates to commute.

pub mod template;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate, GateKind, Line};

pub use template::{default_templates, Template, TemplateError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pass {
    Deletion,
    Moving,
    Template,
}

impl Pass {
    pub const ALL: [Pass; 3] = [Pass::Deletion, Pass::Moving, Pass::Template];

    pub fn name(self) -> &'static str {
        match self {
            Pass::Deletion => "deletion",
            Pass::Moving => "moving",
            Pass::Template => "template",
        }
    }
}

impl fmt::Display for Pass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pass {
    type Err = OptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pass::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| OptError::UnknownPass(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OptError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error("unknown pass {0:?} (expected deletion, moving or template)")]
    UnknownPass(String),
    #[error("max iterations must be at least 1")]
    ZeroIterations,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptConfig {
    passes: BTreeSet<Pass>,
    templates: Vec<Template>,
    max_iterations: usize,
}

impl OptConfig {
    pub fn new(
        passes: impl IntoIterator<Item = Pass>,
        templates: Vec<Template>,
        max_iterations: usize,
    ) -> Result<Self, OptError> {
        if max_iterations == 0 {
            return Err(OptError::ZeroIterations);
        }
        Ok(Self {
            passes: passes.into_iter().collect(),
            templates,
            max_iterations,
        })
    }

    /// Only the given passes, default templates, default iteration cap.
    pub fn with_passes(passes: impl IntoIterator<Item = Pass>) -> Self {
        Self {
            passes: passes.into_iter().collect(),
            ..Self::default()
        }
    }

    pub fn passes(&self) -> &BTreeSet<Pass> {
        &self.passes
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }

    pub fn enabled(&self, pass: Pass) -> bool {
        self.passes.contains(&pass)
    }
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            passes: Pass::ALL.into_iter().collect(),
            templates: default_templates(),
            max_iterations: 64,
        }
    }
}

/// True iff neither gate's target is a control of the other. Adjacent gates
/// meeting this condition can be exchanged without changing the circuit.
pub fn can_swap(g1: &Gate, g2: &Gate) -> bool {
    !g2.has_control(g1.target()) && !g1.has_control(g2.target())
}

/// Removes adjacent identical pairs until none remain.
pub fn deletion_pass(circuit: &Circuit) -> Circuit {
    let mut out: Vec<Gate> = Vec::with_capacity(circuit.len());
    for &g in circuit.gates() {
        if out.last() == Some(&g) {
            out.pop();
        } else {
            out.push(g);
        }
    }
    circuit.with_gates(out)
}

/// Cancels equal gates separated only by gates the first one can move past.
pub fn moving_pass(circuit: &Circuit) -> Circuit {
    let mut gates = circuit.gates().to_vec();
    let mut i = 0;
    while i < gates.len() {
        let g = gates[i];
        let partner = (i + 1..gates.len())
            .take_while(|&j| gates[j] == g || can_swap(&g, &gates[j]))
            .find(|&j| gates[j] == g);
        match partner {
            Some(j) => {
                gates.remove(j);
                gates.remove(i);
                i = i.saturating_sub(1);
            }
            None => i += 1,
        }
    }
    circuit.with_gates(gates)
}

/// Applies the first template match (scanning left to right), then restarts,
/// until nothing matches. Each application removes at least one gate.
pub fn template_pass(circuit: &Circuit, templates: &[Template]) -> Circuit {
    let mut gates = circuit.gates().to_vec();
    let oriented: Vec<(usize, Vec<Vec<Gate>>)> = templates
        .iter()
        .map(|t| (t.width(), t.orientations()))
        .collect();
    while let Some(next) = apply_first_match(&gates, &oriented) {
        debug_assert!(next.len() < gates.len());
        gates = next;
    }
    circuit.with_gates(gates)
}

/// Runs the enabled passes (deletion, moving, template) until a fixpoint or
/// the iteration cap.
pub fn optimize(circuit: &Circuit, config: &OptConfig) -> Result<Circuit, OptError> {
    circuit.ensure_valid()?;
    let mut cur = circuit.clone();
    for _ in 0..config.max_iterations {
        let mut next = cur.clone();
        if config.enabled(Pass::Deletion) {
            next = deletion_pass(&next);
        }
        if config.enabled(Pass::Moving) {
            next = moving_pass(&next);
        }
        if config.enabled(Pass::Template) {
            next = template_pass(&next, &config.templates);
        }
        if next == cur {
            break;
        }
        cur = next;
    }
    Ok(cur)
}

fn apply_first_match(gates: &[Gate], templates: &[(usize, Vec<Vec<Gate>>)]) -> Option<Vec<Gate>> {
    for q0 in 0..gates.len() {
        for (width, orientations) in templates {
            for seq in orientations {
                if let Some(rewritten) = try_match(gates, q0, seq, *width) {
                    return Some(rewritten);
                }
            }
        }
    }
    None
}

/// Partial assignment of template parameters to circuit lines.
#[derive(Clone)]
struct Binding {
    map: Vec<Option<Line>>,
}

impl Binding {
    fn bind(&mut self, param: Line, line: Line) -> bool {
        match self.map[param] {
            Some(l) => l == line,
            None => {
                if self.map.contains(&Some(line)) {
                    return false;
                }
                self.map[param] = Some(line);
                true
            }
        }
    }

    /// Every way of extending the binding so `pattern` becomes `gate`.
    fn unify(&self, pattern: &Gate, gate: &Gate) -> Vec<Binding> {
        if pattern.kind() != gate.kind() {
            return Vec::new();
        }
        let pc = pattern.controls();
        let gc = gate.controls();
        let orders: Vec<Vec<Line>> = match pattern.kind() {
            GateKind::Toffoli => vec![vec![gc[0], gc[1]], vec![gc[1], gc[0]]],
            _ => vec![gc.to_vec()],
        };
        let mut out: Vec<Binding> = Vec::new();
        for order in orders {
            let mut b = self.clone();
            let ok = b.bind(pattern.target(), gate.target())
                && pc.iter().zip(&order).all(|(&p, &l)| b.bind(p, l));
            if ok && !out.iter().any(|o| o.map == b.map) {
                out.push(b);
            }
        }
        out
    }

    fn apply(&self, pattern: &Gate) -> Option<Gate> {
        let mut missing = false;
        let g = pattern.map_lines(|p| {
            self.map[p].unwrap_or_else(|| {
                missing = true;
                0
            })
        });
        (!missing).then_some(g)
    }
}

struct Search<'a> {
    gates: &'a [Gate],
    seq: &'a [Gate],
    q0: usize,
    best: Option<(Vec<usize>, Binding)>,
}

impl Search<'_> {
    /// Extends the match of `seq[..positions.len()]`; keeps the longest
    /// match whose replacement is fully bound.
    fn extend(&mut self, positions: &mut Vec<usize>, binding: &Binding) {
        let k = positions.len();
        let m = self.seq.len();
        if 2 * k > m && self.best.as_ref().is_none_or(|(p, _)| p.len() < k) {
            let bound = self.seq[k..].iter().all(|g| binding.apply(g).is_some());
            if bound {
                self.best = Some((positions.clone(), binding.clone()));
            }
        }
        if k == m {
            return;
        }
        let last = *positions.last().expect("match starts at q0");
        for u in last + 1..self.gates.len() {
            let g = &self.gates[u];
            let options = binding.unify(&self.seq[k], g);
            if options.is_empty() {
                continue;
            }
            let movable = (self.q0 + 1..u)
                .filter(|w| !positions.contains(w))
                .all(|w| can_swap(g, &self.gates[w]));
            if !movable {
                continue;
            }
            positions.push(u);
            for b in &options {
                self.extend(positions, b);
                if self.best.as_ref().is_some_and(|(p, _)| p.len() == m) {
                    break;
                }
            }
            positions.pop();
            return;
        }
    }
}

/// Matches more than half of `seq` starting at gate `q0` and returns the
/// rewritten gate list.
fn try_match(gates: &[Gate], q0: usize, seq: &[Gate], width: usize) -> Option<Vec<Gate>> {
    let root = Binding {
        map: vec![None; width],
    };
    let mut search = Search {
        gates,
        seq,
        q0,
        best: None,
    };
    for b in root.unify(&seq[0], &gates[q0]) {
        search.extend(&mut vec![q0], &b);
    }
    let (positions, binding) = search.best?;
    let k = positions.len();
    let last = *positions.last()?;
    let mut out = Vec::with_capacity(gates.len());
    out.extend_from_slice(&gates[..q0]);
    out.extend(seq[k..].iter().rev().map(|g| binding.apply(g).expect("checked bound")));
    out.extend(
        (q0..=last)
            .filter(|w| !positions.contains(w))
            .map(|w| gates[w]),
    );
    out.extend_from_slice(&gates[last + 1..]);
    Some(out)
}
