//! Flip-flop corpus: six families in three design styles each.
//!
//! `D1` and `D2` designs keep state through feedback lines; `D3` designs
//! write state in place and re-force their work lines every step instead.
//! Designs whose structure is fully pinned down by their description are
//! stored as-is; the others are reconstructions that meet the behavioural
//! spec exhaustively and the published gate and garbage counts as upper
//! bounds, and they pass through the optimizer when built.

pub mod macros;
pub mod reference;
pub mod spec;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::cost::{count_report, weighted_cost, CostModel, CostReport};
use crate::netlist::{parse_netlist, ParseError};
use crate::opt::{optimize, OptConfig, OptError};
use crate::sim::{
    check_bijective, permutation_of, step, Assignment, SeqError, SequentialCircuit, SimError,
    StepOutput,
};

pub use reference::{published, Column, PairCheck, Published};
pub use spec::{complement_of, flipflop_spec, Family, NextStateSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    D1,
    D2,
    D3,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::D1, Variant::D2, Variant::D3];
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::D1 => "d1",
            Variant::D2 => "d2",
            Variant::D3 => "d3",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DesignId {
    pub family: Family,
    pub variant: Variant,
}

impl DesignId {
    pub fn new(family: Family, variant: Variant) -> Self {
        Self { family, variant }
    }

    pub fn all() -> Vec<DesignId> {
        Family::ALL
            .into_iter()
            .flat_map(|f| Variant::ALL.into_iter().map(move |v| DesignId::new(f, v)))
            .collect()
    }
}

impl fmt::Display for DesignId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.family.id(), self.variant)
    }
}

impl FromStr for DesignId {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DesignId::all()
            .into_iter()
            .find(|id| id.to_string() == s.to_ascii_lowercase())
            .ok_or_else(|| CorpusError::UnknownId(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("unknown design {0:?} (expected <family>-<d1|d2|d3>, e.g. sr-d1)")]
    UnknownId(String),
    #[error("corpus netlist {id}: {source}")]
    Netlist { id: DesignId, source: ParseError },
    #[error(transparent)]
    Opt(#[from] OptError),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("design and spec disagree on names: {0}")]
    NameMismatch(String),
}

/// How a design was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Structure fixed by the design description; stored verbatim.
    Direct,
    /// Built to meet the behaviour and the published counts.
    Reconstruction,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::Direct => "direct",
            Provenance::Reconstruction => "reconstruction",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn provenance(id: DesignId) -> Provenance {
    use Family::*;
    use Variant::*;
    match (id.family, id.variant) {
        (T, D2) | (T, D3) | (D, D2) | (D, D3) | (Msd, D1) => Provenance::Direct,
        _ => Provenance::Reconstruction,
    }
}

/// Embedded netlist text for a design.
pub fn netlist_source(id: DesignId) -> &'static str {
    use Family::*;
    use Variant::*;
    match (id.family, id.variant) {
        (Sr, D1) => include_str!("designs/sr-d1.rev"),
        (Sr, D2) => include_str!("designs/sr-d2.rev"),
        (Sr, D3) => include_str!("designs/sr-d3.rev"),
        (D, D1) => include_str!("designs/d-d1.rev"),
        (D, D2) => include_str!("designs/d-d2.rev"),
        (D, D3) => include_str!("designs/d-d3.rev"),
        (Jk, D1) => include_str!("designs/jk-d1.rev"),
        (Jk, D2) => include_str!("designs/jk-d2.rev"),
        (Jk, D3) => include_str!("designs/jk-d3.rev"),
        (T, D1) => include_str!("designs/t-d1.rev"),
        (T, D2) => include_str!("designs/t-d2.rev"),
        (T, D3) => include_str!("designs/t-d3.rev"),
        (Msd, D1) => include_str!("designs/msd-d1.rev"),
        (Msd, D2) => include_str!("designs/msd-d2.rev"),
        (Msd, D3) => include_str!("designs/msd-d3.rev"),
        (Msjk, D1) => include_str!("designs/msjk-d1.rev"),
        (Msjk, D2) => include_str!("designs/msjk-d2.rev"),
        (Msjk, D3) => include_str!("designs/msjk-d3.rev"),
    }
}

pub fn build_design(id: DesignId) -> Result<SequentialCircuit, CorpusError> {
    let seq = parse_netlist(netlist_source(id))
        .map_err(|source| CorpusError::Netlist { id, source })?;
    match provenance(id) {
        Provenance::Direct => Ok(seq),
        Provenance::Reconstruction => {
            let body = optimize(seq.body(), &OptConfig::default())?;
            Ok(seq.with_body(body)?)
        }
    }
}

/// A failing case of [`verify_design`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub state: Assignment,
    pub inputs: Assignment,
    pub expected: StepOutput,
    pub actual: StepOutput,
}

fn show(a: &Assignment) -> String {
    a.iter()
        .map(|(k, v)| format!("{k}={}", u8::from(*v)))
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "state {} inputs {}: expected next {} outputs {}, got next {} outputs {}",
            show(&self.state),
            show(&self.inputs),
            show(&self.expected.next_state),
            show(&self.expected.outputs),
            show(&self.actual.next_state),
            show(&self.actual.outputs),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub pass: bool,
    pub cases: usize,
    pub failures: usize,
    pub bijective: bool,
    pub counterexample: Option<Counterexample>,
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ok = self.cases - self.failures;
        if self.pass {
            write!(f, "PASS {ok}/{}", self.cases)
        } else {
            write!(f, "FAIL {ok}/{}", self.cases)?;
            if !self.bijective {
                write!(f, "; body is not bijective")?;
            }
            if let Some(c) = &self.counterexample {
                write!(f, "; {c}")?;
            }
            Ok(())
        }
    }
}

/// Design state variable `name` expressed through the next-state spec: either a
/// variable or the complement of one.
fn resolve(name: &str, spec: &NextStateSpec) -> Option<(&'static str, bool)> {
    if let Some(&s) = spec.state_vars.iter().find(|s| **s == name) {
        return Some((s, false));
    }
    complement_of(name, &spec.state_vars).map(|b| (b, true))
}

/// Exhaustively compares the design against a next-state spec over every
/// consistent state and input combination, and checks the body is a
/// bijection.
pub fn verify_design(
    seq: &SequentialCircuit,
    spec: &NextStateSpec,
) -> Result<VerificationReport, CorpusError> {
    let mut design_inputs: Vec<&str> = seq.input_names().collect();
    design_inputs.sort_unstable();
    let mut spec_inputs = spec.inputs.clone();
    spec_inputs.sort_unstable();
    if design_inputs != spec_inputs {
        return Err(CorpusError::NameMismatch(format!(
            "inputs {design_inputs:?} vs {spec_inputs:?}"
        )));
    }
    let design_state: Vec<&str> = seq.state_names().collect();
    for s in &spec.state_vars {
        if !design_state.contains(s) {
            return Err(CorpusError::NameMismatch(format!("state {s:?} missing")));
        }
    }
    for s in &design_state {
        if resolve(s, spec).is_none() {
            return Err(CorpusError::NameMismatch(format!("state {s:?} not in spec")));
        }
    }
    let design_outputs: Vec<&str> = seq.outputs().iter().map(|(n, _)| n.as_str()).collect();
    for o in &spec.outputs {
        if !design_outputs.contains(o) {
            return Err(CorpusError::NameMismatch(format!("output {o:?} missing")));
        }
    }
    for o in &design_outputs {
        if resolve(o, spec).is_none() {
            return Err(CorpusError::NameMismatch(format!("output {o:?} not in spec")));
        }
    }

    let project = |full: &Assignment, names: &[&str]| -> Assignment {
        names
            .iter()
            .map(|n| {
                let (base, neg) = resolve(n, spec).expect("checked above");
                (n.to_string(), full[base] ^ neg)
            })
            .collect()
    };

    let mut cases = 0;
    let mut failures = 0;
    let mut counterexample = None;
    for state in spec.states() {
        let design_state_bits = project(&state, &design_state);
        for inputs in spec.input_combinations() {
            cases += 1;
            let next = spec.next(&state, &inputs);
            let expected = StepOutput {
                next_state: project(&next, &design_state),
                outputs: project(&next, &design_outputs),
            };
            let actual = step(seq, &design_state_bits, &inputs)?;
            if actual != expected {
                failures += 1;
                if counterexample.is_none() {
                    counterexample = Some(Counterexample {
                        state: design_state_bits.clone(),
                        inputs: inputs.clone(),
                        expected,
                        actual,
                    });
                }
            }
        }
    }
    let bijective = check_bijective(&permutation_of(seq.body())?.rows())?.is_bijective;
    Ok(VerificationReport {
        pass: failures == 0 && bijective,
        cases,
        failures,
        bijective,
        counterexample,
    })
}

/// One corpus design with its measured and published figures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub id: DesignId,
    pub provenance: Provenance,
    pub report: CostReport,
    pub weighted: u64,
    pub published: Published,
    pub verification: VerificationReport,
}

impl ManifestEntry {
    pub fn gates_within_published(&self) -> Option<bool> {
        self.published.gates.map(|g| self.report.total as u64 <= g)
    }

    pub fn garbage_within_published(&self) -> Option<bool> {
        self.published.garbage.map(|g| self.report.garbage as u64 <= g)
    }
}

pub fn manifest_entry(id: DesignId) -> Result<ManifestEntry, CorpusError> {
    let seq = build_design(id)?;
    let report = count_report(&seq);
    let weighted = weighted_cost(&report, CostModel::PhaseCnot);
    let verification = verify_design(&seq, &flipflop_spec(id.family))?;
    Ok(ManifestEntry {
        id,
        provenance: provenance(id),
        report,
        weighted,
        published: published(id.family, Column::Design(id.variant)),
        verification,
    })
}

pub fn manifest() -> Result<Vec<ManifestEntry>, CorpusError> {
    DesignId::all().into_iter().map(manifest_entry).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;

    #[test]
    fn ids_round_trip() {
        assert_eq!(DesignId::all().len(), 18);
        for id in DesignId::all() {
            assert_eq!(id.to_string().parse::<DesignId>().unwrap(), id);
        }
        assert!(matches!("sr-d4".parse::<DesignId>(), Err(CorpusError::UnknownId(_))));
    }

    #[test]
    fn every_design_verifies() {
        for id in DesignId::all() {
            let seq = build_design(id).unwrap();
            let r = verify_design(&seq, &flipflop_spec(id.family)).unwrap();
            assert!(r.pass, "{id}: {r}");
        }
    }

    #[test]
    fn toffoli_register_has_eight_cases() {
        let seq = build_design("t-d3".parse().unwrap()).unwrap();
        assert_eq!(seq.body().gates(), &[Gate::toffoli(0, 1, 2)]);
        let r = verify_design(&seq, &flipflop_spec(Family::T)).unwrap();
        assert_eq!((r.pass, r.cases), (true, 8));
        assert_eq!(r.to_string(), "PASS 8/8");
    }

    #[test]
    fn mutated_target_fails() {
        let seq = build_design("t-d3".parse().unwrap()).unwrap();
        let mutated = seq.with_body(seq.body().with_gates(vec![Gate::toffoli(1, 2, 0)])).unwrap();
        let r = verify_design(&mutated, &flipflop_spec(Family::T)).unwrap();
        assert!(!r.pass);
        assert!(r.counterexample.is_some());
    }

    #[test]
    fn wrong_family_is_a_name_mismatch() {
        let seq = build_design("t-d3".parse().unwrap()).unwrap();
        assert!(matches!(
            verify_design(&seq, &flipflop_spec(Family::D)),
            Err(CorpusError::NameMismatch(_))
        ));
    }
}
