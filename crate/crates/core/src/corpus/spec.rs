//! Behavioural next-state functions for the six flip-flop families.
//!
//! Specs are stated over the external inputs and the independent state
//! bits only. A state or output named `<x>n` is the complement of `<x>`
//! and is derived rather than enumerated.

use std::fmt;
use std::str::FromStr;

use crate::sim::Assignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Sr,
    D,
    Jk,
    T,
    Msd,
    Msjk,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Sr,
        Family::D,
        Family::Jk,
        Family::T,
        Family::Msd,
        Family::Msjk,
    ];

    /// Lowercase identifier used in design ids and on the command line.
    pub fn id(self) -> &'static str {
        match self {
            Family::Sr => "sr",
            Family::D => "d",
            Family::Jk => "jk",
            Family::T => "t",
            Family::Msd => "msd",
            Family::Msjk => "msjk",
        }
    }

    pub fn is_master_slave(self) -> bool {
        matches!(self, Family::Msd | Family::Msjk)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id().to_uppercase())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.id() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown family {s:?} (expected sr, d, jk, t, msd or msjk)"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NextStateSpec {
    pub family: Family,
    pub inputs: Vec<&'static str>,
    /// Every state variable, complements included.
    pub state_vars: Vec<&'static str>,
    pub outputs: Vec<&'static str>,
}

pub fn flipflop_spec(family: Family) -> NextStateSpec {
    let (inputs, state_vars, outputs): (Vec<_>, Vec<_>, Vec<_>) = match family {
        Family::Sr => (vec!["c", "s", "r"], vec!["q", "qn"], vec!["q", "qn"]),
        Family::D => (vec!["c", "d"], vec!["q"], vec!["q"]),
        Family::Jk => (vec!["c", "j", "k"], vec!["q", "qn"], vec!["q", "qn"]),
        Family::T => (vec!["c", "t"], vec!["q"], vec!["q"]),
        Family::Msd => (vec!["c", "d"], vec!["m", "q"], vec!["q"]),
        Family::Msjk => (vec!["c", "j", "k"], vec!["m", "q"], vec!["q"]),
    };
    NextStateSpec {
        family,
        inputs,
        state_vars,
        outputs,
    }
}

/// The variable `name` complements, if `name` follows the `<x>n` pattern
/// and `<x>` is in `among`.
pub fn complement_of<'a>(name: &str, among: &[&'a str]) -> Option<&'a str> {
    let base = name.strip_suffix('n')?;
    among.iter().copied().find(|n| *n == base)
}

impl NextStateSpec {
    /// State variables that are not complements of another.
    pub fn independent_state(&self) -> Vec<&'static str> {
        self.state_vars
            .iter()
            .copied()
            .filter(|s| complement_of(s, &self.state_vars).is_none())
            .collect()
    }

    /// Completes an assignment of the independent bits with the complements.
    pub fn complete(&self, independent: &Assignment) -> Assignment {
        let mut out = independent.clone();
        for s in &self.state_vars {
            if let Some(base) = complement_of(s, &self.state_vars) {
                out.insert(s.to_string(), !independent[base]);
            }
        }
        out
    }

    /// Every consistent state, ordered by the binary count of the
    /// independent bits.
    pub fn states(&self) -> Vec<Assignment> {
        let ind = self.independent_state();
        (0..1u32 << ind.len())
            .map(|bits| self.complete(&assignment(&ind, bits)))
            .collect()
    }

    pub fn input_combinations(&self) -> Vec<Assignment> {
        (0..1u32 << self.inputs.len())
            .map(|bits| assignment(&self.inputs, bits))
            .collect()
    }

    /// Next value of every state variable.
    pub fn next(&self, state: &Assignment, inputs: &Assignment) -> Assignment {
        let i = |n: &str| inputs[n];
        let s = |n: &str| state[n];
        let c = i("c");
        let mut ind = Assignment::new();
        match self.family {
            Family::Sr => {
                let x = c && (i("s") ^ i("r"));
                ind.insert("q".into(), if x { i("s") } else { s("q") });
            }
            Family::D => {
                ind.insert("q".into(), if c { i("d") } else { s("q") });
            }
            Family::Jk => {
                let q = s("q");
                let q_next = if c { (i("j") && !q) || (!i("k") && q) } else { q };
                ind.insert("q".into(), q_next);
            }
            Family::T => {
                ind.insert("q".into(), s("q") ^ (c && i("t")));
            }
            Family::Msd => {
                let (m, q) = if c { (i("d"), s("q")) } else { (s("m"), s("m")) };
                ind.insert("m".into(), m);
                ind.insert("q".into(), q);
            }
            Family::Msjk => {
                let q = s("q");
                let (m, q) = if c {
                    ((i("j") && !q) || (!i("k") && q), q)
                } else {
                    (s("m"), s("m"))
                };
                ind.insert("m".into(), m);
                ind.insert("q".into(), q);
            }
        }
        self.complete(&ind)
    }

    /// Primary outputs read from a (next) state.
    pub fn outputs_of(&self, state: &Assignment) -> Assignment {
        self.outputs
            .iter()
            .map(|o| (o.to_string(), state[*o]))
            .collect()
    }
}

fn assignment(names: &[&str], bits: u32) -> Assignment {
    names
        .iter()
        .enumerate()
        .map(|(k, n)| (n.to_string(), (bits >> k) & 1 == 1))
        .collect()
}
