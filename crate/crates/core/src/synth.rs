//! Transformation-based synthesis of NCT circuits from permutations.
//!
//! Rows are fixed in ascending order. At row `i` the current image `v` of
//! `i` is driven to `i` by gates whose control pattern cannot fire on any
//! vector below `i`, so rows already fixed stay fixed. Bits that are 1 in
//! `i` but 0 in `v` are set first, then bits that are 0 in `i` but 1 in
//! `v` are cleared.
//!
//! Each flip picks the smallest control set that is legal: no controls
//! (only possible at row 0), then the lowest single line, then the
//! lexicographically lowest pair, then the highest lines greedily. Control
//! sets above two lines are decomposed into Toffolis with a borrowed
//! (dirty) line. On four or more lines NCT circuits only realize even
//! permutations, so odd targets there are rejected up front, and a gate
//! that would need every other line as control is replaced by an
//! equivalent 3-cycle built as a controlled commutator.

use thiserror::Error;

use crate::circuit::{Circuit, Gate, Line};
use crate::sim::Permutation;

/// Widest permutation accepted for synthesis.
pub const MAX_SYNTH_WIDTH: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SynthMethod {
    Unidirectional,
    Bidirectional,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("width {0} is over the synthesis cap of {MAX_SYNTH_WIDTH}")]
    TooWide(usize),
    #[error("odd permutation on {0} lines cannot be realized by NCT gates without an extra line")]
    OddPermutation(usize),
}

pub fn synthesize(perm: &Permutation, method: SynthMethod) -> Result<Circuit, SynthError> {
    match method {
        SynthMethod::Unidirectional => synth_unidirectional(perm),
        SynthMethod::Bidirectional => synth_bidirectional(perm),
    }
}

/// Output-side only: gates are appended after the target function.
pub fn synth_unidirectional(perm: &Permutation) -> Result<Circuit, SynthError> {
    run(perm, false)
}

/// Per row, the cheaper of the output side and the input side (ties go to
/// the output side).
pub fn synth_bidirectional(perm: &Permutation) -> Result<Circuit, SynthError> {
    run(perm, true)
}

fn run(perm: &Permutation, bidirectional: bool) -> Result<Circuit, SynthError> {
    let n = perm.width();
    if n > MAX_SYNTH_WIDTH {
        return Err(SynthError::TooWide(n));
    }
    if n >= 4 && !perm.is_even() {
        return Err(SynthError::OddPermutation(n));
    }
    let mut f: Vec<u64> = perm.table().to_vec();
    let mut inv = vec![0u64; f.len()];
    for (x, &y) in f.iter().enumerate() {
        inv[y as usize] = x as u64;
    }
    // Input-side gate blocks in row order, output-side gates in time order.
    let mut input_blocks: Vec<Vec<Gate>> = Vec::new();
    let mut output_gates: Vec<Gate> = Vec::new();

    for i in 0..f.len() as u64 {
        let v = f[i as usize];
        if v == i {
            continue;
        }
        let out_side = row_gates(v, i, n);
        let in_side = if bidirectional {
            Some(row_gates(inv[i as usize], i, n))
        } else {
            None
        };
        match in_side {
            Some(h) if h.len() < out_side.len() => {
                // h moves p to i, so f . h^-1 sends i to f(p) = i
                let old = f.clone();
                for (x, y) in f.iter_mut().enumerate() {
                    let hx = h.iter().rev().fold(x as u64, |acc, g| g.apply_packed(acc));
                    *y = old[hx as usize];
                }
                input_blocks.push(h);
            }
            _ => {
                for y in f.iter_mut() {
                    *y = out_side.iter().fold(*y, |acc, g| g.apply_packed(acc));
                }
                output_gates.extend(out_side);
            }
        }
        for (x, &y) in f.iter().enumerate() {
            inv[y as usize] = x as u64;
        }
        debug_assert_eq!(f[i as usize], i);
    }

    // identity = O . f . H1^-1 . H2^-1 ..., so f runs H1, H2, ... then O reversed
    let mut gates: Vec<Gate> = input_blocks.concat();
    gates.extend(output_gates.iter().rev().copied());
    Ok(Circuit::new(n, gates))
}

/// NCT gates that move `v` to `i` while fixing every vector below `i`.
fn row_gates(v: u64, i: u64, n: usize) -> Vec<Gate> {
    let mut cur = v;
    let mut gates = Vec::new();
    let flip = |cur: &mut u64, j: Line, gates: &mut Vec<Gate>| {
        let controls = choose_controls(*cur, j, i, n);
        let emitted = if n >= 4 && controls.len() == n - 1 {
            full_flip(*cur, j, n)
        } else {
            let mut out = Vec::new();
            mct(&controls, j, n, &mut out);
            out
        };
        *cur = emitted.iter().fold(*cur, |acc, g| g.apply_packed(acc));
        gates.extend(emitted);
    };
    for j in 0..n {
        if (i >> j) & 1 == 1 && (cur >> j) & 1 == 0 {
            flip(&mut cur, j, &mut gates);
        }
    }
    for j in 0..n {
        if (i >> j) & 1 == 0 && (cur >> j) & 1 == 1 {
            flip(&mut cur, j, &mut gates);
        }
    }
    debug_assert_eq!(cur, i);
    gates
}

/// Smallest legal control set for flipping bit `j` of `cur` at row `i`.
/// A set is legal when it is drawn from the 1-bits of `cur` (minus `j`)
/// and its mask is at least `i`, so no vector below `i` satisfies it.
fn choose_controls(cur: u64, j: Line, i: u64, n: usize) -> Vec<Line> {
    if i == 0 {
        return Vec::new();
    }
    let ones: Vec<Line> = (0..n).filter(|&b| b != j && (cur >> b) & 1 == 1).collect();
    if let Some(&c) = ones.iter().find(|&&c| (1u64 << c) >= i) {
        return vec![c];
    }
    for (x, &a) in ones.iter().enumerate() {
        for &b in &ones[x + 1..] {
            if (1u64 << a) | (1u64 << b) >= i {
                return vec![a, b];
            }
        }
    }
    let mut chosen = Vec::new();
    let mut mask = 0u64;
    for &c in ones.iter().rev() {
        chosen.push(c);
        mask |= 1 << c;
        if mask >= i {
            break;
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Multiple-control Toffoli expanded into NCT gates. Needs a line outside
/// `controls` and `target` once there are three or more controls.
fn mct(controls: &[Line], target: Line, n: usize, out: &mut Vec<Gate>) {
    if controls.len() <= 2 {
        out.push(Gate::from_controls(controls, target).expect("at most two controls"));
        return;
    }
    let spare = (0..n)
        .find(|l| *l != target && !controls.contains(l))
        .expect("a free line for decomposition");
    let split = controls.len().div_ceil(2);
    let (c1, c2) = controls.split_at(split);
    let mut c2a = c2.to_vec();
    c2a.push(spare);
    c2a.sort_unstable();
    // t ^= c2.a; a ^= c1; t ^= c2.a; a ^= c1  leaves a unchanged and t ^= c1.c2
    for _ in 0..2 {
        mct(&c2a, target, n, out);
        mct(c1, spare, n, out);
    }
}

/// Moves `cur` to `cur ^ 2^j` when the required control set would be every
/// other line. That single flip is an odd permutation, so a 3-cycle on
/// the vectors with all lines except `j` and `s` set is used instead.
fn full_flip(cur: u64, j: Line, n: usize) -> Vec<Gate> {
    let s = (0..n).find(|&l| l != j).expect("at least two lines");
    let rest: Vec<Line> = (0..n).filter(|&l| l != j && l != s).collect();
    let (p1, p2) = rest.split_at(rest.len() / 2);
    let mut a_controls = p1.to_vec();
    a_controls.push(j);
    a_controls.sort_unstable();
    let mut b_controls = p2.to_vec();
    b_controls.push(s);
    b_controls.sort_unstable();
    let mut a = Vec::new();
    mct(&a_controls, s, n, &mut a);
    let mut b = Vec::new();
    mct(&b_controls, j, n, &mut b);
    let run = |first: &[Gate], second: &[Gate]| {
        let mut g = Vec::new();
        for _ in 0..2 {
            g.extend_from_slice(first);
            g.extend_from_slice(second);
        }
        g
    };
    let forward = run(&a, &b);
    let target = cur ^ (1 << j);
    if forward.iter().fold(cur, |acc, g| g.apply_packed(acc)) == target {
        forward
    } else {
        run(&b, &a)
    }
}
