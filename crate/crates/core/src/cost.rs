//! Gate counts, garbage counts and weighted costs.
//!
//! Two libraries are modelled: plain NCT counting, where every gate costs
//! 1, and a phase+CNOT library in which a Toffoli costs 5. Composite gates
//! never reach this module; they are expanded to NCT when parsed.
//!
//! A body output line is *useful* when it carries a primary output or a
//! state variable's next value, and a *restored constant* when it is bound
//! to a constant on input and provably returns that constant for every
//! input and state assignment. Every other line is garbage.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::circuit::{Circuit, GateKind, Line};
use crate::sim::{SequentialCircuit, MAX_EXHAUSTIVE_WIDTH};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CostError {
    #[error("unknown cost model {0:?} (expected nct or phase-cnot)")]
    UnknownModel(String),
    #[error("complexity estimate needs n >= 1 and l >= 1 (got n={n}, l={l})")]
    BadParameters { n: u64, l: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostModel {
    NctCount,
    PhaseCnot,
}

impl CostModel {
    pub fn weight(self, kind: GateKind) -> u64 {
        match (self, kind) {
            (CostModel::PhaseCnot, GateKind::Toffoli) => 5,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CostModel::NctCount => "nct",
            CostModel::PhaseCnot => "phase-cnot",
        }
    }
}

impl FromStr for CostModel {
    type Err = CostError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nct" => Ok(CostModel::NctCount),
            "phase-cnot" => Ok(CostModel::PhaseCnot),
            other => Err(CostError::UnknownModel(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostReport {
    pub not: usize,
    pub cnot: usize,
    pub toffoli: usize,
    pub total: usize,
    pub width: usize,
    /// Distinct lines carrying a primary output or a next-state value.
    pub useful_outputs: usize,
    pub restored_constants: usize,
    pub garbage: usize,
}

impl CostReport {
    pub fn count(&self, kind: GateKind) -> usize {
        match kind {
            GateKind::Not => self.not,
            GateKind::Cnot => self.cnot,
            GateKind::Toffoli => self.toffoli,
        }
    }
}

impl fmt::Display for CostReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gates: {}", self.total)?;
        writeln!(f, "  NOT: {}", self.not)?;
        writeln!(f, "  CNOT: {}", self.cnot)?;
        writeln!(f, "  TOFFOLI: {}", self.toffoli)?;
        writeln!(f, "lines: {}", self.width)?;
        writeln!(f, "useful outputs: {}", self.useful_outputs)?;
        writeln!(f, "restored constants: {}", self.restored_constants)?;
        write!(f, "garbage: {}", self.garbage)
    }
}

/// Gate counts of a bare circuit; every line counts as useful.
pub fn circuit_counts(circuit: &Circuit) -> CostReport {
    let not = circuit.count(GateKind::Not);
    let cnot = circuit.count(GateKind::Cnot);
    let toffoli = circuit.count(GateKind::Toffoli);
    CostReport {
        not,
        cnot,
        toffoli,
        total: not + cnot + toffoli,
        width: circuit.width(),
        useful_outputs: circuit.width(),
        restored_constants: 0,
        garbage: 0,
    }
}

pub fn count_report(seq: &SequentialCircuit) -> CostReport {
    let mut report = circuit_counts(seq.body());
    let useful: BTreeSet<Line> = seq
        .outputs()
        .iter()
        .map(|&(_, l)| l)
        .chain(seq.state_vars().iter().map(|v| v.output_line))
        .collect();
    let restored = seq
        .constants()
        .iter()
        .filter(|(l, bit)| !useful.contains(l) && is_restored(seq, *l, *bit))
        .count();
    report.useful_outputs = useful.len();
    report.restored_constants = restored;
    report.garbage = seq.width() - useful.len() - restored;
    report
}

/// Does constant line `line` leave the body holding `bit` for every
/// assignment of inputs and state? Too many free bits counts as "no".
fn is_restored(seq: &SequentialCircuit, line: Line, bit: bool) -> bool {
    let free: Vec<Line> = seq
        .input_lines()
        .iter()
        .copied()
        .chain(seq.state_vars().iter().map(|v| v.input_line))
        .collect();
    if free.len() > MAX_EXHAUSTIVE_WIDTH {
        return false;
    }
    let base = seq
        .constants()
        .iter()
        .fold(0u64, |v, &(l, b)| v | (u64::from(b) << l));
    (0..1u64 << free.len()).all(|assign| {
        let v = free
            .iter()
            .enumerate()
            .fold(base, |v, (k, &l)| v | (((assign >> k) & 1) << l));
        ((seq.body().apply_packed(v) >> line) & 1 == 1) == bit
    })
}

pub fn weighted_cost(report: &CostReport, model: CostModel) -> u64 {
    GateKind::ALL
        .iter()
        .map(|&k| model.weight(k) * report.count(k) as u64)
        .sum()
}

/// Work estimate for exact optimization: tau = 2^(2n) * n^(l*m).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityEstimate {
    pub n: u64,
    pub m: u64,
    pub l: u64,
    pub log2_tau: f64,
    /// Exact value when `log2_tau <= 63`.
    pub tau: Option<u64>,
}

pub fn exact_opt_complexity(n: u64, m: u64, l: u64) -> Result<ComplexityEstimate, CostError> {
    if n == 0 || l == 0 {
        return Err(CostError::BadParameters { n, l });
    }
    let log2_tau = 2.0 * n as f64 + (l * m) as f64 * (n as f64).log2();
    let tau = if log2_tau <= 63.0 {
        exact_tau(n, m, l)
    } else {
        None
    };
    Ok(ComplexityEstimate {
        n,
        m,
        l,
        log2_tau,
        tau,
    })
}

fn exact_tau(n: u64, m: u64, l: u64) -> Option<u64> {
    let exp = u32::try_from(l.checked_mul(m)?).ok()?;
    let base = 1u64.checked_shl(u32::try_from(2 * n).ok()?)?;
    base.checked_mul(n.checked_pow(exp)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn toffoli_register_costs() {
        let body = Circuit::with_line_names(names(&["c", "t", "q"]), vec![Gate::toffoli(0, 1, 2)]);
        let seq = SequentialCircuit::builder(body)
            .input("c")
            .input("t")
            .state("q")
            .output("q")
            .build()
            .unwrap();
        let r = count_report(&seq);
        assert_eq!((r.total, r.toffoli, r.garbage), (1, 1, 2));
        assert_eq!(weighted_cost(&r, CostModel::PhaseCnot), 5);
        assert_eq!(weighted_cost(&r, CostModel::NctCount), 1);
    }

    #[test]
    fn empty_circuit_is_all_garbage() {
        let body = Circuit::empty(3);
        let seq = SequentialCircuit::builder(body)
            .input("x0")
            .input("x1")
            .input("x2")
            .build()
            .unwrap();
        let r = count_report(&seq);
        assert_eq!((r.total, r.garbage), (0, 3));
    }

    #[test]
    fn restored_constant_is_not_garbage() {
        // a is borrowed and handed back: C(x->a) C(x->a)
        let body = Circuit::with_line_names(
            names(&["x", "a", "b"]),
            vec![Gate::cnot(0, 1), Gate::cnot(1, 2), Gate::cnot(0, 1)],
        );
        let seq = SequentialCircuit::builder(body)
            .input("x")
            .constant("a", false)
            .constant("b", true)
            .output("x")
            .build()
            .unwrap();
        let r = count_report(&seq);
        assert_eq!(r.restored_constants, 1);
        assert_eq!(r.garbage, 1);
        assert_eq!(r.garbage + r.useful_outputs + r.restored_constants, r.width);
    }

    #[test]
    fn complexity_examples() {
        let e = exact_opt_complexity(3, 1, 3).unwrap();
        assert_eq!(e.tau, Some(1728));
        assert!((e.log2_tau - 1728f64.log2()).abs() < 1e-9);
        let e = exact_opt_complexity(1, 5, 1).unwrap();
        assert_eq!((e.tau, e.log2_tau), (Some(4), 2.0));
        assert_eq!(exact_opt_complexity(4, 2, 3).unwrap().log2_tau, 20.0);
        let big = exact_opt_complexity(10, 40, 3).unwrap();
        assert_eq!(big.tau, None);
        assert!(exact_opt_complexity(0, 1, 3).is_err());
        assert!(exact_opt_complexity(3, 1, 0).is_err());
    }

    #[test]
    fn model_names_parse() {
        assert_eq!("nct".parse::<CostModel>().unwrap(), CostModel::NctCount);
        assert_eq!("phase-cnot".parse::<CostModel>().unwrap(), CostModel::PhaseCnot);
        assert!("qcost".parse::<CostModel>().is_err());
    }
}
