//! Clocked execution of a reversible block with spatial feedback.
//!
//! A [`SequentialCircuit`] wraps a combinational body. Each clock step
//! assembles one input vector from the external inputs, the current state
//! bits (placed on each state variable's input-side line) and the constant
//! lines, evaluates the body once, and reads the next state from each state
//! variable's output-side line. Running `k` steps is the same as evaluating
//! `k` copies of the body cascaded in time with the state lines wired
//! through; feedback never loops back within a step.
//!
//! Constant lines are re-bound at every step. Lines listed under `refresh`
//! are a marked subset of the constants: designs that hold state without
//! feedback re-force them before each evaluation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Line};

/// Named bit values, ordered by name.
pub type Assignment = BTreeMap<String, bool>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("unknown line {0:?}")]
    UnknownLine(String),
    #[error("line {0:?} is bound more than once as input, state or constant")]
    LineBoundTwice(String),
    #[error("line {0:?} is not bound as an input, state or constant")]
    LineUnbound(String),
    #[error("state variable {0:?} declared more than once")]
    DuplicateState(String),
    #[error("feedback line {0:?} feeds more than one state variable")]
    SharedFeedback(String),
    #[error("no state variable {0:?}")]
    UnknownState(String),
    #[error("refresh line {0:?} is not a constant with the same value")]
    RefreshNotConstant(String),
    #[error("output {0:?} declared more than once")]
    DuplicateOutput(String),
    #[error("missing binding for {0:?}")]
    MissingBinding(String),
    #[error("unknown binding {0:?}")]
    UnknownBinding(String),
    #[error("malformed trace: {0}")]
    BadTrace(String),
}

/// One state bit: where it enters the body and where its next value leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateVar {
    pub input_line: Line,
    pub output_line: Line,
}

impl StateVar {
    /// True when the next value comes back on a different line.
    pub fn is_feedback(&self) -> bool {
        self.input_line != self.output_line
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequentialCircuit {
    body: Circuit,
    inputs: Vec<Line>,
    state: Vec<StateVar>,
    constants: Vec<(Line, bool)>,
    refresh: Vec<Line>,
    outputs: Vec<(String, Line)>,
    initial_state: Assignment,
}

/// Result of one clock step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutput {
    pub next_state: Assignment,
    pub outputs: Assignment,
}

impl SequentialCircuit {
    pub fn builder(body: Circuit) -> SequentialBuilder {
        SequentialBuilder {
            body,
            inputs: Vec::new(),
            state: Vec::new(),
            feedback: Vec::new(),
            constants: Vec::new(),
            refresh: Vec::new(),
            outputs: Vec::new(),
            init: Vec::new(),
        }
    }

    /// Every line is an external input and a primary output of the same name.
    pub fn combinational(body: Circuit) -> Result<Self, SeqError> {
        let names = body.line_names().to_vec();
        let mut b = Self::builder(body);
        for n in &names {
            b = b.input(n);
        }
        for n in &names {
            b = b.output(n);
        }
        b.build()
    }

    pub fn body(&self) -> &Circuit {
        &self.body
    }

    pub fn width(&self) -> usize {
        self.body.width()
    }

    pub fn line_name(&self, line: Line) -> &str {
        &self.body.line_names()[line]
    }

    pub fn input_lines(&self) -> &[Line] {
        &self.inputs
    }

    pub fn input_names(&self) -> impl Iterator<Item = &str> {
        self.inputs.iter().map(|&l| self.line_name(l))
    }

    pub fn state_vars(&self) -> &[StateVar] {
        &self.state
    }

    /// State variables are named after their input-side line.
    pub fn state_name(&self, var: &StateVar) -> &str {
        self.line_name(var.input_line)
    }

    pub fn state_names(&self) -> impl Iterator<Item = &str> {
        self.state.iter().map(|v| self.state_name(v))
    }

    pub fn constants(&self) -> &[(Line, bool)] {
        &self.constants
    }

    pub fn refresh_lines(&self) -> &[Line] {
        &self.refresh
    }

    pub fn outputs(&self) -> &[(String, Line)] {
        &self.outputs
    }

    pub fn initial_state(&self) -> &Assignment {
        &self.initial_state
    }

    pub fn has_feedback(&self) -> bool {
        self.state.iter().any(StateVar::is_feedback)
    }

    pub fn feedback_count(&self) -> usize {
        self.state.iter().filter(|v| v.is_feedback()).count()
    }

    /// Same bindings over a different body of the same lines (e.g. after optimization).
    pub fn with_body(&self, body: Circuit) -> Result<Self, SeqError> {
        if body.line_names() != self.body.line_names() {
            return Err(SeqError::Circuit(CircuitError::WidthMismatch(
                self.body.width(),
                body.width(),
            )));
        }
        body.ensure_valid()?;
        Ok(Self {
            body,
            ..self.clone()
        })
    }

    /// Packs external inputs, state and constants into one body input vector.
    pub fn assemble(&self, state: &Assignment, inputs: &Assignment) -> Result<u64, SeqError> {
        check_keys(inputs, self.input_names())?;
        check_keys(state, self.state_names())?;
        let mut v = 0u64;
        for &l in &self.inputs {
            v |= u64::from(inputs[self.line_name(l)]) << l;
        }
        for var in &self.state {
            v |= u64::from(state[self.state_name(var)]) << var.input_line;
        }
        for &(l, bit) in &self.constants {
            v |= u64::from(bit) << l;
        }
        // refresh lines are constants; forcing them last makes the override explicit
        for &l in &self.refresh {
            let bit = self
                .constants
                .iter()
                .find(|(c, _)| *c == l)
                .map(|&(_, b)| b)
                .unwrap_or(false);
            v = (v & !(1 << l)) | (u64::from(bit) << l);
        }
        Ok(v)
    }

    /// Reads next state and primary outputs off a body output vector.
    pub fn read(&self, out: u64) -> StepOutput {
        let bit = |l: Line| (out >> l) & 1 == 1;
        StepOutput {
            next_state: self
                .state
                .iter()
                .map(|var| (self.state_name(var).to_string(), bit(var.output_line)))
                .collect(),
            outputs: self
                .outputs
                .iter()
                .map(|(name, l)| (name.clone(), bit(*l)))
                .collect(),
        }
    }
}

fn check_keys<'a>(
    given: &Assignment,
    expected: impl Iterator<Item = &'a str>,
) -> Result<(), SeqError> {
    let expected: BTreeSet<&str> = expected.collect();
    if let Some(missing) = expected.iter().find(|n| !given.contains_key(**n)) {
        return Err(SeqError::MissingBinding(missing.to_string()));
    }
    if let Some(extra) = given.keys().find(|k| !expected.contains(k.as_str())) {
        return Err(SeqError::UnknownBinding(extra.clone()));
    }
    Ok(())
}

/// Name of the variable `name` is the complement of, under the `<x>n`
/// convention (`qn` pairs with `q`), if that variable exists.
pub fn complement_partner<'a>(name: &str, names: impl IntoIterator<Item = &'a str>) -> Option<&'a str> {
    let base = name.strip_suffix('n')?;
    names.into_iter().find(|n| *n == base)
}

/// Collects bindings by line name and checks the structural invariants.
pub struct SequentialBuilder {
    body: Circuit,
    inputs: Vec<String>,
    state: Vec<String>,
    feedback: Vec<(String, String)>,
    constants: Vec<(String, bool)>,
    refresh: Vec<(String, bool)>,
    outputs: Vec<(String, String)>,
    init: Vec<(String, bool)>,
}

impl SequentialBuilder {
    pub fn input(mut self, line: &str) -> Self {
        self.inputs.push(line.to_string());
        self
    }

    /// State variable held on `line`; its next value leaves on the same line
    /// unless [`feedback`](Self::feedback) rewires it.
    pub fn state(mut self, line: &str) -> Self {
        self.state.push(line.to_string());
        self
    }

    /// Output-side line `from` is fed back into state line `to` at the next step.
    pub fn feedback(mut self, from: &str, to: &str) -> Self {
        self.feedback.push((from.to_string(), to.to_string()));
        self
    }

    pub fn constant(mut self, line: &str, bit: bool) -> Self {
        self.constants.push((line.to_string(), bit));
        self
    }

    /// A constant that is explicitly re-forced every step. Implies `constant`.
    pub fn refresh(mut self, line: &str, bit: bool) -> Self {
        self.refresh.push((line.to_string(), bit));
        self
    }

    pub fn output(self, line: &str) -> Self {
        let name = line.to_string();
        self.output_as(&name, line)
    }

    pub fn output_as(mut self, name: &str, line: &str) -> Self {
        self.outputs.push((name.to_string(), line.to_string()));
        self
    }

    pub fn init(mut self, state: &str, bit: bool) -> Self {
        self.init.push((state.to_string(), bit));
        self
    }

    pub fn build(self) -> Result<SequentialCircuit, SeqError> {
        self.body.ensure_valid()?;
        let body = self.body;
        let lookup = |name: &str| {
            body.line_index(name)
                .ok_or_else(|| SeqError::UnknownLine(name.to_string()))
        };

        let mut bound = vec![false; body.width()];
        let mut bind = |l: Line| {
            if std::mem::replace(&mut bound[l], true) {
                Err(SeqError::LineBoundTwice(body.line_names()[l].clone()))
            } else {
                Ok(())
            }
        };

        let mut inputs = Vec::new();
        for n in &self.inputs {
            let l = lookup(n)?;
            bind(l)?;
            inputs.push(l);
        }

        let mut state: Vec<StateVar> = Vec::new();
        for n in &self.state {
            let l = lookup(n)?;
            if state.iter().any(|v| v.input_line == l) {
                return Err(SeqError::DuplicateState(n.clone()));
            }
            bind(l)?;
            state.push(StateVar {
                input_line: l,
                output_line: l,
            });
        }
        for (from, to) in &self.feedback {
            let out = lookup(from)?;
            let into = lookup(to)?;
            let var = state
                .iter_mut()
                .find(|v| v.input_line == into)
                .ok_or_else(|| SeqError::UnknownState(to.clone()))?;
            var.output_line = out;
        }
        for (i, v) in state.iter().enumerate() {
            if state[..i].iter().any(|w| w.output_line == v.output_line) {
                return Err(SeqError::SharedFeedback(
                    body.line_names()[v.output_line].clone(),
                ));
            }
        }

        let mut constants: Vec<(Line, bool)> = Vec::new();
        for (n, bit) in &self.constants {
            let l = lookup(n)?;
            bind(l)?;
            constants.push((l, *bit));
        }
        let mut refresh = Vec::new();
        for (n, bit) in &self.refresh {
            let l = lookup(n)?;
            match constants.iter().find(|(c, _)| *c == l) {
                Some(&(_, b)) if b == *bit => {}
                Some(_) => return Err(SeqError::RefreshNotConstant(n.clone())),
                None => {
                    bind(l)?;
                    constants.push((l, *bit));
                }
            }
            if refresh.contains(&l) {
                return Err(SeqError::LineBoundTwice(n.clone()));
            }
            refresh.push(l);
        }

        if let Some(l) = bound.iter().position(|b| !b) {
            return Err(SeqError::LineUnbound(body.line_names()[l].clone()));
        }

        let mut outputs: Vec<(String, Line)> = Vec::new();
        for (name, line) in &self.outputs {
            if outputs.iter().any(|(n, _)| n == name) {
                return Err(SeqError::DuplicateOutput(name.clone()));
            }
            outputs.push((name.clone(), lookup(line)?));
        }

        let names: Vec<&str> = state
            .iter()
            .map(|v| body.line_names()[v.input_line].as_str())
            .collect();
        let mut initial_state: Assignment = names
            .iter()
            .map(|n| {
                let complement = complement_partner(n, names.iter().copied()).is_some();
                (n.to_string(), complement)
            })
            .collect();
        for (n, bit) in &self.init {
            match initial_state.get_mut(n) {
                Some(slot) => *slot = *bit,
                None => return Err(SeqError::UnknownState(n.clone())),
            }
        }

        Ok(SequentialCircuit {
            body,
            inputs,
            state,
            constants,
            refresh,
            outputs,
            initial_state,
        })
    }
}

/// One clock step: assemble, evaluate the body once, read state and outputs.
pub fn step(
    seq: &SequentialCircuit,
    state: &Assignment,
    inputs: &Assignment,
) -> Result<StepOutput, SeqError> {
    let v = seq.assemble(state, inputs)?;
    Ok(seq.read(seq.body.apply_packed(v)))
}

/// Per-step external input bindings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<Assignment>,
}

impl Trace {
    pub fn new(steps: Vec<Assignment>) -> Self {
        Self { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// `c=1,t=0;c=0,t=1`: steps split on `;`, bindings on `,`.
impl FromStr for Trace {
    type Err = SeqError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Trace::default());
        }
        let steps = s
            .split(';')
            .enumerate()
            .map(|(i, chunk)| {
                let mut step = Assignment::new();
                for binding in chunk.split(',').map(str::trim).filter(|b| !b.is_empty()) {
                    let (k, v) = binding.split_once('=').ok_or_else(|| {
                        SeqError::BadTrace(format!("step {}: expected name=bit, got {binding:?}", i + 1))
                    })?;
                    let bit = match v.trim() {
                        "0" => false,
                        "1" => true,
                        other => {
                            return Err(SeqError::BadTrace(format!(
                                "step {}: {other:?} is not a bit",
                                i + 1
                            )))
                        }
                    };
                    if step.insert(k.trim().to_string(), bit).is_some() {
                        return Err(SeqError::BadTrace(format!(
                            "step {}: {} bound twice",
                            i + 1,
                            k.trim()
                        )));
                    }
                }
                Ok(step)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Trace { steps })
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, step) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            for (j, (k, v)) in step.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{k}={}", u8::from(*v))?;
            }
        }
        Ok(())
    }
}

/// Runs the trace from the circuit's initial state; one output map per step.
pub fn run_trace(seq: &SequentialCircuit, trace: &Trace) -> Result<Vec<Assignment>, SeqError> {
    run_trace_from(seq, seq.initial_state(), trace).map(|steps| {
        steps.into_iter().map(|s| s.outputs).collect()
    })
}

/// Like [`run_trace`] but from an explicit state, keeping every step's state.
pub fn run_trace_from(
    seq: &SequentialCircuit,
    initial: &Assignment,
    trace: &Trace,
) -> Result<Vec<StepOutput>, SeqError> {
    let mut state = initial.clone();
    let mut out = Vec::with_capacity(trace.len());
    for inputs in &trace.steps {
        let s = step(seq, &state, inputs)?;
        state = s.next_state.clone();
        out.push(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn t_d3() -> SequentialCircuit {
        let body = Circuit::with_line_names(names(&["c", "t", "q"]), vec![Gate::toffoli(0, 1, 2)]);
        SequentialCircuit::builder(body)
            .input("c")
            .input("t")
            .state("q")
            .output("q")
            .build()
            .unwrap()
    }

    fn assign(pairs: &[(&str, bool)]) -> Assignment {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn toffoli_toggles_and_holds() {
        let seq = t_d3();
        let s = step(&seq, &assign(&[("q", false)]), &assign(&[("c", true), ("t", true)])).unwrap();
        assert!(s.next_state["q"]);
        let s = step(&seq, &assign(&[("q", true)]), &assign(&[("c", false), ("t", true)])).unwrap();
        assert!(s.next_state["q"]);
    }

    #[test]
    fn missing_and_unknown_bindings() {
        let seq = t_d3();
        assert_eq!(
            step(&seq, &assign(&[("q", false)]), &assign(&[("c", true)])),
            Err(SeqError::MissingBinding("t".into()))
        );
        assert_eq!(
            step(&seq, &Assignment::new(), &assign(&[("c", true), ("t", true)])),
            Err(SeqError::MissingBinding("q".into()))
        );
        assert_eq!(
            step(
                &seq,
                &assign(&[("q", false)]),
                &assign(&[("c", true), ("t", true), ("z", true)])
            ),
            Err(SeqError::UnknownBinding("z".into()))
        );
    }

    #[test]
    fn trace_toggles_each_clocked_step() {
        let seq = t_d3();
        let trace: Trace = "c=1,t=1;c=1,t=1".parse().unwrap();
        let out = run_trace(&seq, &trace).unwrap();
        let q: Vec<bool> = out.iter().map(|o| o["q"]).collect();
        assert_eq!(q, vec![true, false]);
        assert!(run_trace(&seq, &Trace::default()).unwrap().is_empty());
    }

    #[test]
    fn trace_parse_errors() {
        assert!("c=2".parse::<Trace>().is_err());
        assert!("c".parse::<Trace>().is_err());
        assert!("c=1,c=0".parse::<Trace>().is_err());
        let t: Trace = " c=1 , t=0 ; c=0,t=1 ".parse().unwrap();
        assert_eq!(t.to_string(), "c=1,t=0;c=0,t=1");
    }

    #[test]
    fn builder_checks_partition() {
        let body = Circuit::with_line_names(names(&["a", "b"]), vec![]);
        let err = SequentialCircuit::builder(body.clone()).input("a").build();
        assert_eq!(err, Err(SeqError::LineUnbound("b".into())));
        let err = SequentialCircuit::builder(body.clone())
            .input("a")
            .state("a")
            .build();
        assert_eq!(err, Err(SeqError::LineBoundTwice("a".into())));
        let err = SequentialCircuit::builder(body.clone())
            .input("a")
            .constant("b", false)
            .refresh("b", true)
            .build();
        assert_eq!(err, Err(SeqError::RefreshNotConstant("b".into())));
        let err = SequentialCircuit::builder(body)
            .input("a")
            .constant("b", false)
            .feedback("a", "b")
            .build();
        assert_eq!(err, Err(SeqError::UnknownState("b".into())));
    }

    #[test]
    fn complement_defaults_to_one() {
        let body = Circuit::with_line_names(names(&["q", "qn", "m"]), vec![]);
        let seq = SequentialCircuit::builder(body)
            .state("q")
            .state("qn")
            .state("m")
            .init("m", true)
            .build()
            .unwrap();
        assert_eq!(
            seq.initial_state(),
            &assign(&[("q", false), ("qn", true), ("m", true)])
        );
    }

    #[test]
    fn refresh_overrides_and_feedback_rewires() {
        // q is copied onto f, then f is fed back; a is refreshed to 1
        let body = Circuit::with_line_names(
            names(&["q", "f", "a"]),
            vec![Gate::cnot(0, 1), Gate::cnot(2, 1)],
        );
        let seq = SequentialCircuit::builder(body)
            .state("q")
            .feedback("f", "q")
            .constant("f", false)
            .refresh("a", true)
            .build()
            .unwrap();
        assert!(seq.has_feedback());
        let s = step(&seq, &assign(&[("q", false)]), &Assignment::new()).unwrap();
        assert!(s.next_state["q"]);
        let s = step(&seq, &assign(&[("q", true)]), &Assignment::new()).unwrap();
        assert!(!s.next_state["q"]);
    }
}
