//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! non-zero if any criterion fails. Expected values are recomputed here
//! independently of the library wherever that is possible.

use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use revseq::bits::BitVector;
use revseq::circuit::{Circuit, Gate, GateKind};
use revseq::cli::{run_command, EXIT_PARSE};
use revseq::corpus::macros::{expand_macro, MacroKind};
use revseq::corpus::{
    build_design, flipflop_spec, manifest_entry, provenance, published, verify_design, Column,
    DesignId, Family, PairCheck, Provenance, Variant,
};
use revseq::cost::{count_report, exact_opt_complexity, weighted_cost, CostModel};
use revseq::netlist::{emit_netlist, parse_netlist};
use revseq::opt::{optimize, OptConfig};
use revseq::sim::{
    check_bijective, permutation_of, step, Assignment, Permutation, SequentialCircuit,
};
use revseq::synth::{synth_bidirectional, synth_unidirectional};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn id(family: Family, variant: Variant) -> DesignId {
    DesignId::new(family, variant)
}

fn assignment(pairs: &[(&str, bool)]) -> Assignment {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Random NCT circuit; each gate picks distinct lines uniformly.
fn random_circuit(rng: &mut ChaCha8Rng, width: usize, gates: usize) -> Circuit {
    let lines: Vec<usize> = (0..width).collect();
    let gates = (0..gates)
        .map(|_| {
            let arity = rng.gen_range(1..=width.min(3));
            let picked: Vec<usize> = lines.choose_multiple(rng, arity).copied().collect();
            Gate::from_controls(&picked[1..], picked[0]).unwrap()
        })
        .collect();
    Circuit::new(width, gates)
}

/// Truth table of a circuit by direct per-gate evaluation.
fn table_of(c: &Circuit) -> Vec<u64> {
    (0..1u64 << c.width())
        .map(|mut v| {
            for g in c.gates() {
                if g.controls().iter().all(|&l| v >> l & 1 == 1) {
                    v ^= 1 << g.target();
                }
            }
            v
        })
        .collect()
}

fn c1_t_d3_exact() -> Outcome {
    let start = Instant::now();
    let seq = build_design(id(Family::T, Variant::D3)).map_err(|e| e.to_string())?;
    let report = count_report(&seq);
    let weighted = weighted_cost(&report, CostModel::PhaseCnot);
    let verification =
        verify_design(&seq, &flipflop_spec(Family::T)).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(
        seq.body().len() == 1 && seq.body().gates()[0].kind() == GateKind::Toffoli,
        || format!("body is {:?}", seq.body().gates()),
    )?;
    ensure((report.total, report.garbage, weighted) == (1, 2, 5), || {
        format!("gates {} garbage {} weighted {weighted}", report.total, report.garbage)
    })?;
    ensure(verification.pass && verification.cases == 8, || verification.to_string())?;
    // Q+ = Q xor C.T over all eight (c, t, q).
    for bits in 0..8u8 {
        let (c, t, q) = (bits & 1 == 1, bits & 2 == 2, bits & 4 == 4);
        let out = step(&seq, &assignment(&[("q", q)]), &assignment(&[("c", c), ("t", t)]))
            .map_err(|e| e.to_string())?;
        ensure(out.next_state["q"] == q ^ (c && t), || format!("c={c} t={t} q={q}"))?;
    }
    within(elapsed, Duration::from_millis(1))?;
    Ok(format!("1 TOFFOLI, garbage 2, weighted 5, {verification}, {elapsed:?}"))
}

fn c2_direct_counts() -> Outcome {
    let start = Instant::now();
    let expected = [
        (id(Family::T, Variant::D2), 2),
        (id(Family::D, Variant::D2), 4),
        (id(Family::D, Variant::D3), 3),
        (id(Family::Msd, Variant::D1), 20),
    ];
    let mut notes = Vec::new();
    for (design, gates) in expected {
        let seq = build_design(design).map_err(|e| e.to_string())?;
        let v = verify_design(&seq, &flipflop_spec(design.family)).map_err(|e| e.to_string())?;
        ensure(provenance(design) == Provenance::Direct, || format!("{design} not direct"))?;
        ensure(seq.body().len() == gates, || format!("{design}: {} gates", seq.body().len()))?;
        ensure(
            published(design.family, Column::Design(design.variant)).gates == Some(gates as u64),
            || format!("{design}: published count differs"),
        )?;
        ensure(v.pass && v.cases <= 1 << 12, || format!("{design}: {v}"))?;
        notes.push(format!("{design}={gates}"));
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(notes.join(" "))
}

fn c3_reconstructions() -> Outcome {
    let mut exact = Vec::new();
    let mut below = Vec::new();
    for design in DesignId::all() {
        if provenance(design) != Provenance::Reconstruction {
            continue;
        }
        let e = manifest_entry(design).map_err(|e| e.to_string())?;
        ensure(e.verification.pass, || format!("{design}: {}", e.verification))?;
        ensure(e.gates_within_published() == Some(true), || {
            format!("{design}: {} gates > {:?}", e.report.total, e.published.gates)
        })?;
        ensure(e.garbage_within_published() == Some(true), || {
            format!("{design}: garbage {} > {:?}", e.report.garbage, e.published.garbage)
        })?;
        if Some(e.report.total as u64) == e.published.gates {
            exact.push(design.to_string());
        } else {
            below.push(format!("{design} {}<{}", e.report.total, e.published.gates.unwrap()));
        }
    }
    let sr = build_design(id(Family::Sr, Variant::D1)).map_err(|e| e.to_string())?;
    ensure(
        sr.body().len() == 9 && sr.body().count(GateKind::Toffoli) == 6,
        || "sr-d1 is not 9 gates with 6 Toffolis".to_string(),
    )?;
    Ok(format!("exact: {}; below: {}", exact.join(" "), below.join(", ")))
}

fn c4_cost_identity() -> Outcome {
    let identity = |c: &Circuit, weighted: u64| {
        let toffoli = c.gates().iter().filter(|g| g.controls().len() == 2).count() as u64;
        weighted == c.len() as u64 + 4 * toffoli
    };
    for design in DesignId::all() {
        let seq = build_design(design).map_err(|e| e.to_string())?;
        let w = weighted_cost(&count_report(&seq), CostModel::PhaseCnot);
        ensure(identity(seq.body(), w), || format!("{design}: weighted {w}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let width = rng.gen_range(1..=8);
        let len = rng.gen_range(0..=30);
        let c = random_circuit(&mut rng, width, len);
        let seq = SequentialCircuit::combinational(c.clone()).map_err(|e| e.to_string())?;
        let w = weighted_cost(&count_report(&seq), CostModel::PhaseCnot);
        ensure(identity(&c, w), || format!("random circuit: weighted {w}"))?;
    }
    let d = |f, v| (f, Column::Design(v));
    let consistent = [
        (d(Family::Sr, Variant::D1), 9, 33),
        (d(Family::D, Variant::D1), 10, 34),
        (d(Family::Jk, Variant::D1), 13, 45),
        (d(Family::T, Variant::D1), 14, 46),
        (d(Family::Msd, Variant::D1), 20, 68),
        (d(Family::Msjk, Variant::D1), 23, 79),
        (d(Family::Sr, Variant::D2), 15, 39),
        (d(Family::Msjk, Variant::D2), 37, 93),
        (d(Family::Msjk, Variant::D3), 33, 89),
    ];
    for ((f, c), g, w) in consistent {
        let p = published(f, c);
        ensure((p.gates, p.weighted) == (Some(g), Some(w)), || format!("{f} {c}: {p:?}"))?;
        // (w - g) / 4 Toffolis, and that many must be a whole number.
        ensure((w - g) % 4 == 0, || format!("{f} {c}: {g}->{w}"))?;
        ensure(
            p.pair_check() == PairCheck::Consistent { toffoli: (w - g) / 4 },
            || format!("{f} {c}: {:?}", p.pair_check()),
        )?;
    }
    let mut flagged = Vec::new();
    for ((f, c), g, w) in [(d(Family::Msd, Variant::D2), 9, 19), (d(Family::Msd, Variant::D3), 7, 17)] {
        let p = published(f, c);
        ensure((p.gates, p.weighted) == (Some(g), Some(w)), || format!("{f} {c}: {p:?}"))?;
        ensure((w - g) % 4 != 0, || format!("{f} {c} should be inconsistent"))?;
        ensure(p.pair_check() == PairCheck::Inconsistent, || format!("{f} {c} not flagged"))?;
        flagged.push(format!("{f}-{c} {g}->{w}"));
    }
    Ok(format!("18 designs + 1000 random; 9 pairs consistent; flagged {}", flagged.join(", ")))
}

fn c5_optimizer_soundness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let config = OptConfig::default();
    let (mut before, mut after) = (0, 0);
    for case in 0..1000 {
        let width = rng.gen_range(1..=6);
        let len = rng.gen_range(0..=20);
        let c = random_circuit(&mut rng, width, len);
        let o = optimize(&c, &config).map_err(|e| e.to_string())?;
        ensure(table_of(&o) == table_of(&c), || format!("case {case}: {c:?} -> {o:?}"))?;
        ensure(o.len() <= c.len(), || format!("case {case}: grew"))?;
        before += c.len();
        after += o.len();
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!("1000/1000 preserved, {before} -> {after} gates, {elapsed:.2?}"))
}

fn c6_synthesis() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut uni, mut bi) = (0usize, 0usize);
    for _ in 0..500 {
        let mut table: Vec<u64> = (0..8).collect();
        table.shuffle(&mut rng);
        let perm = Permutation::new(3, table.clone()).map_err(|e| e.to_string())?;
        for (name, circuit, total) in [
            ("uni", synth_unidirectional(&perm), &mut uni),
            ("bi", synth_bidirectional(&perm), &mut bi),
        ] {
            let circuit = circuit.map_err(|e| e.to_string())?;
            ensure(table_of(&circuit) == table, || format!("{name} misses {table:?}"))?;
            ensure(permutation_of(&circuit).ok().as_ref() == Some(&perm), || {
                format!("{name}: permutation_of disagrees")
            })?;
            *total += circuit.len();
        }
    }
    let elapsed = start.elapsed();
    let (mu, mb) = (uni as f64 / 500.0, bi as f64 / 500.0);
    ensure(mb <= mu, || format!("bi mean {mb} > uni mean {mu}"))?;
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!("500/500 both; mean uni {mu:.3}, bi {mb:.3}, {elapsed:.2?}"))
}

fn c7_bijectivity() -> Outcome {
    let bv = |s: &str| s.parse::<BitVector>().unwrap();
    // 0100 and 0101 both map to 0100; every other row is the identity,
    // so output 0101 is never produced.
    let rows: Vec<(BitVector, BitVector)> = (0..16u64)
        .map(|v| BitVector::new(v, 4).unwrap())
        .map(|i| {
            let o = if i == bv("0101") { bv("0100") } else { i };
            (i, o)
        })
        .collect();
    let report = check_bijective(&rows).map_err(|e| e.to_string())?;
    ensure(!report.is_bijective, || "not flagged".to_string())?;
    ensure(report.collisions.len() == 1, || format!("{:?}", report.collisions))?;
    let c = &report.collisions[0];
    let pair = [c.first.to_string(), c.second.to_string()];
    ensure(
        c.output.to_string() == "0100" && pair.contains(&"0100".into()) && pair.contains(&"0101".into()),
        || format!("{c:?}"),
    )?;
    Ok(format!("{} and {} both map to {}", pair[0], pair[1], c.output))
}

fn c8_fredkin() -> Outcome {
    let gates = expand_macro(MacroKind::Fredkin, &[0, 1, 2]);
    ensure(gates.len() == 3, || format!("{} gates", gates.len()))?;
    let c = Circuit::new(3, gates);
    // Controlled swap of lines 1 and 2 under line 0.
    let expected: Vec<u64> = (0..8u64)
        .map(|v| {
            let (ctl, a, b) = (v & 1, v >> 1 & 1, v >> 2 & 1);
            if ctl == 1 {
                ctl | b << 1 | a << 2
            } else {
                v
            }
        })
        .collect();
    ensure(table_of(&c) == expected, || format!("{:?}", table_of(&c)))?;
    Ok("3 NCT gates, 8/8 rows".to_string())
}

fn c9_complexity() -> Outcome {
    let e = exact_opt_complexity(3, 1, 3).map_err(|e| e.to_string())?;
    // 2^(2n) * n^(l*m) = 2^6 * 3^3.
    let direct = 2u64.pow(6) * 3u64.pow(3);
    ensure(direct == 1728 && e.tau == Some(direct), || format!("{e:?}"))?;
    let log2 = 6.0 + 3.0 * 3f64.log2();
    ensure((e.log2_tau - log2).abs() < 1e-9 && (e.log2_tau - 10.7549).abs() < 1e-4, || {
        format!("log2 {}", e.log2_tau)
    })?;
    let at = |n, m, l| exact_opt_complexity(n, m, l).map(|e| e.log2_tau).map_err(|e| e.to_string());
    for n in 1..=10 {
        for m in 1..=10 {
            for l in 1..=2 {
                let here = at(n, m, l)?;
                if n < 10 {
                    ensure(at(n + 1, m, l)? > here, || format!("n at ({n},{m},{l})"))?;
                }
                if m < 10 {
                    ensure(at(n, m + 1, l)? >= here, || format!("m at ({n},{m},{l})"))?;
                }
                if l < 2 {
                    ensure(at(n, m, l + 1)? >= here, || format!("l at ({n},{m},{l})"))?;
                }
            }
        }
    }
    Ok(format!("tau 1728, log2 {:.10}, monotone on 10x10x2", e.log2_tau))
}

fn c10_sr_hold() -> Outcome {
    let spec = flipflop_spec(Family::Sr);
    let inputs = assignment(&[("c", true), ("s", true), ("r", true)]);
    for q in [false, true] {
        let state = assignment(&[("q", q), ("qn", !q)]);
        ensure(spec.next(&state, &inputs) == state, || format!("spec moves from q={q}"))?;
        for v in [Variant::D1, Variant::D2, Variant::D3] {
            let design = id(Family::Sr, v);
            let seq = build_design(design).map_err(|e| e.to_string())?;
            let out = step(&seq, &state, &inputs).map_err(|e| e.to_string())?;
            ensure(out.next_state == state, || format!("{design} moves from q={q}"))?;
            ensure(out.outputs["q"] == q && out.outputs["qn"] == !q, || {
                format!("{design} outputs {:?}", out.outputs)
            })?;
        }
    }
    Ok("spec and sr-d1/d2/d3 hold q=0 and q=1".to_string())
}

fn c11_format() -> Outcome {
    for design in DesignId::all() {
        let seq = build_design(design).map_err(|e| e.to_string())?;
        let back = parse_netlist(&emit_netlist(&seq)).map_err(|e| format!("{design}: {e}"))?;
        ensure(back == seq, || format!("{design} changed"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let width = rng.gen_range(1..=10);
        let len = rng.gen_range(0..=30);
        let seq = SequentialCircuit::combinational(random_circuit(&mut rng, width, len))
            .map_err(|e| e.to_string())?;
        let back = parse_netlist(&emit_netlist(&seq)).map_err(|e| e.to_string())?;
        ensure(back == seq, || "random circuit changed".to_string())?;
    }
    let head = ".lines a b c\n.inputs a b c\n.outputs a b c\n";
    let bad: [(&str, String, usize); 9] = [
        ("unknown directive", format!("{head}.frobnicate\n.begin\n.end\n"), 4),
        ("undeclared line", format!("{head}.begin\nt2 a z\n.end\n"), 5),
        ("control/target overlap", format!("{head}.begin\nt3 a a b\n.end\n"), 5),
        ("duplicate line", ".lines a a\n.begin\n.end\n".to_string(), 1),
        ("missing .begin", head.to_string(), 3),
        ("missing .end", format!("{head}.begin\nt1 a\n"), 5),
        ("negative control", format!("{head}.begin\nt2 -a b\n.end\n"), 5),
        ("numlines mismatch", format!(".numlines 4\n{head}.begin\n.end\n"), 1),
        ("unknown gate", format!("{head}.begin\nt4 a b c\n.end\n"), 5),
    ];
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (what, text, line) in &bad {
        let path = dir.path().join("bad.rev");
        fs::write(&path, text).map_err(|e| e.to_string())?;
        let out = run_command(["revseq", "cost", path.to_str().unwrap()]);
        ensure(out.code == EXIT_PARSE, || format!("{what}: exit {}", out.code))?;
        ensure(out.stderr.contains(&format!("line {line}:")), || {
            format!("{what}: {}", out.stderr.trim())
        })?;
    }
    Ok(format!("18 designs + 100 random round trip; {} parse errors exit 2", bad.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("T-D3 exactness", c1_t_d3_exact),
        ("fully specified designs", c2_direct_counts),
        ("reconstructed designs within bounds", c3_reconstructions),
        ("cost-model identity", c4_cost_identity),
        ("optimizer soundness", c5_optimizer_soundness),
        ("synthesis round trip", c6_synthesis),
        ("bijectivity detector", c7_bijectivity),
        ("Fredkin expansion", c8_fredkin),
        ("complexity estimator", c9_complexity),
        ("SR holds on S=R=1", c10_sr_hold),
        ("format round trip", c11_format),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
