//! Command-line surface. [`run_command`] does all the work and returns the
//! exit status with captured output, so it can be driven from tests.
//!
//! Exit codes: 0 ok, 1 usage, 2 parse error, 3 verification failure,
//! 4 internal soundness abort.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::corpus::{
    self, build_design, flipflop_spec, manifest, published, verify_design, Column, DesignId,
    Family, PairCheck, Variant,
};
use crate::cost::{count_report, weighted_cost, CostModel};
use crate::netlist::{
    emit_netlist, parse_netlist_with, parse_templates, parse_truth_table, table_to_permutation,
    ParseOptions,
};
use crate::opt::{default_templates, optimize, OptConfig, Pass};
use crate::sim::{permutation_of, run_trace, SequentialCircuit, Trace, MAX_EXHAUSTIVE_WIDTH};
use crate::synth::{synthesize, SynthMethod};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;
pub const EXIT_SOUNDNESS: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "revseq", version, about = "Reversible NCT circuit toolkit")]
struct Cli {
    /// Reject composite gates (f3) instead of expanding them.
    #[arg(long, global = true)]
    keep_foreign: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Uni,
    Bi,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Nct,
    PhaseCnot,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Md,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a clocked trace and print the outputs of every step.
    Sim {
        /// Netlist path or corpus:<id>.
        file: String,
        /// Steps separated by `;`, bindings by `,`, e.g. "c=1,t=1;c=0,t=1".
        #[arg(long)]
        trace: String,
    },
    /// Optimize a netlist body and write the result.
    Opt {
        file: String,
        /// Comma-separated subset of deletion,moving,template.
        #[arg(long, default_value = "deletion,moving,template")]
        passes: String,
        /// Extra identity templates, added to the built-in set.
        #[arg(long)]
        templates: Option<PathBuf>,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Synthesize a circuit from a complete truth table.
    Synth {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, value_enum, default_value = "bi")]
        method: MethodArg,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Print gate counts, garbage and weighted cost.
    Cost {
        file: String,
        #[arg(long, value_enum, default_value = "nct")]
        model: ModelArg,
    },
    /// Check a design against a flip-flop spec over every state and input.
    Verify {
        file: String,
        /// sr, d, jk, t, msd or msjk; implied by corpus:<id>.
        #[arg(long)]
        family: Option<String>,
    },
    /// Corpus table: measured and published counts side by side.
    Report {
        #[arg(long, value_enum, default_value = "md")]
        format: FormatArg,
    },
}

/// Exit status plus everything the command printed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CommandOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutput {
    fn ok(stdout: String) -> Self {
        Self {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, message: impl Into<String>) -> Self {
        let mut stderr = message.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Self {
            code,
            stdout: String::new(),
            stderr,
        }
    }
}

type Outcome = Result<CommandOutput, CommandOutput>;

/// Parses `argv` (program name first) and runs the command.
pub fn run_command<I, S>(argv: I) -> CommandOutput
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                CommandOutput::ok(text)
            } else {
                CommandOutput::fail(code, text)
            };
        }
    };
    let options = ParseOptions {
        keep_foreign: cli.keep_foreign,
    };
    let result = match cli.command {
        Command::Sim { file, trace } => cmd_sim(&file, &trace, options),
        Command::Opt {
            file,
            passes,
            templates,
            output,
        } => cmd_opt(&file, &passes, templates.as_deref(), output.as_deref(), options),
        Command::Synth {
            table,
            method,
            output,
        } => cmd_synth(&table, method, output.as_deref()),
        Command::Cost { file, model } => cmd_cost(&file, model, options),
        Command::Verify { file, family } => cmd_verify(&file, family.as_deref(), options),
        Command::Report { format } => cmd_report(format),
    };
    result.unwrap_or_else(|e| e)
}

fn read(path: &Path) -> Result<String, CommandOutput> {
    fs::read_to_string(path)
        .map_err(|e| CommandOutput::fail(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str, summary: String) -> Outcome {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| {
                CommandOutput::fail(EXIT_USAGE, format!("cannot write {}: {e}", p.display()))
            })?;
            Ok(CommandOutput::ok(summary))
        }
        None => Ok(CommandOutput::ok(text.to_string())),
    }
}

/// A netlist path, or `corpus:<id>` for a built-in design.
fn load(source: &str, options: ParseOptions) -> Result<(SequentialCircuit, Option<DesignId>), CommandOutput> {
    if let Some(id) = source.strip_prefix("corpus:") {
        let id: DesignId = id
            .parse()
            .map_err(|e: corpus::CorpusError| CommandOutput::fail(EXIT_USAGE, e.to_string()))?;
        let seq = build_design(id).map_err(|e| CommandOutput::fail(EXIT_SOUNDNESS, e.to_string()))?;
        return Ok((seq, Some(id)));
    }
    let text = read(Path::new(source))?;
    let seq = parse_netlist_with(&text, options)
        .map_err(|e| CommandOutput::fail(EXIT_PARSE, format!("{source}: {e}")))?;
    Ok((seq, None))
}

fn cmd_sim(file: &str, trace: &str, options: ParseOptions) -> Outcome {
    let (seq, _) = load(file, options)?;
    let trace: Trace = trace
        .parse()
        .map_err(|e: crate::sim::SeqError| CommandOutput::fail(EXIT_PARSE, e.to_string()))?;
    let outputs =
        run_trace(&seq, &trace).map_err(|e| CommandOutput::fail(EXIT_PARSE, e.to_string()))?;
    let mut out = String::new();
    for (i, step) in outputs.iter().enumerate() {
        let _ = write!(out, "step {}:", i + 1);
        for (name, _) in seq.outputs() {
            let _ = write!(out, " {name}={}", u8::from(step[name]));
        }
        out.push('\n');
    }
    Ok(CommandOutput::ok(out))
}

fn cmd_opt(
    file: &str,
    passes: &str,
    templates: Option<&Path>,
    output: Option<&Path>,
    options: ParseOptions,
) -> Outcome {
    let (seq, _) = load(file, options)?;
    let passes = passes
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(str::parse::<Pass>)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CommandOutput::fail(EXIT_USAGE, e.to_string()))?;
    let mut library = default_templates();
    if let Some(path) = templates {
        let text = read(path)?;
        let extra = parse_templates(&text)
            .map_err(|e| CommandOutput::fail(EXIT_PARSE, format!("{}: {e}", path.display())))?;
        library.extend(extra);
    }
    let config = OptConfig::new(passes, library, OptConfig::default().max_iterations())
        .map_err(|e| CommandOutput::fail(EXIT_USAGE, e.to_string()))?;
    if seq.width() > MAX_EXHAUSTIVE_WIDTH {
        return Err(CommandOutput::fail(
            EXIT_USAGE,
            format!(
                "{} lines is over the {MAX_EXHAUSTIVE_WIDTH}-line cap for checked optimization",
                seq.width()
            ),
        ));
    }
    let body = optimize(seq.body(), &config)
        .map_err(|e| CommandOutput::fail(EXIT_USAGE, e.to_string()))?;
    let before = permutation_of(seq.body());
    let after = permutation_of(&body);
    if before.is_err() || before != after || body.len() > seq.body().len() {
        return Err(CommandOutput::fail(
            EXIT_SOUNDNESS,
            "optimized circuit differs from the input; nothing written",
        ));
    }
    let optimized = seq
        .with_body(body)
        .map_err(|e| CommandOutput::fail(EXIT_SOUNDNESS, e.to_string()))?;
    let summary = format!("gates: {} -> {}\n", seq.body().len(), optimized.body().len());
    write_or_print(output, &emit_netlist(&optimized), summary)
}

fn cmd_synth(table: &Path, method: MethodArg, output: Option<&Path>) -> Outcome {
    let text = read(table)?;
    let rows = parse_truth_table(&text)
        .map_err(|e| CommandOutput::fail(EXIT_PARSE, format!("{}: {e}", table.display())))?;
    let perm = table_to_permutation(&rows)
        .map_err(|e| CommandOutput::fail(EXIT_PARSE, format!("{}: {e}", table.display())))?;
    let method = match method {
        MethodArg::Uni => SynthMethod::Unidirectional,
        MethodArg::Bi => SynthMethod::Bidirectional,
    };
    let circuit =
        synthesize(&perm, method).map_err(|e| CommandOutput::fail(EXIT_USAGE, e.to_string()))?;
    if permutation_of(&circuit).ok().as_ref() != Some(&perm) {
        return Err(CommandOutput::fail(
            EXIT_SOUNDNESS,
            "synthesized circuit does not realize the table",
        ));
    }
    let seq = SequentialCircuit::combinational(circuit)
        .map_err(|e| CommandOutput::fail(EXIT_SOUNDNESS, e.to_string()))?;
    let summary = format!("gates: {}\n", seq.body().len());
    write_or_print(output, &emit_netlist(&seq), summary)
}

fn cmd_cost(file: &str, model: ModelArg, options: ParseOptions) -> Outcome {
    let (seq, _) = load(file, options)?;
    let model = match model {
        ModelArg::Nct => CostModel::NctCount,
        ModelArg::PhaseCnot => CostModel::PhaseCnot,
    };
    let report = count_report(&seq);
    let out = format!(
        "model: {}\n{report}\nweighted: {}\n",
        model.name(),
        weighted_cost(&report, model)
    );
    Ok(CommandOutput::ok(out))
}

fn cmd_verify(file: &str, family: Option<&str>, options: ParseOptions) -> Outcome {
    let (seq, id) = load(file, options)?;
    let family = match (family, id) {
        (Some(f), _) => f
            .parse::<Family>()
            .map_err(|e| CommandOutput::fail(EXIT_USAGE, e))?,
        (None, Some(id)) => id.family,
        (None, None) => {
            return Err(CommandOutput::fail(
                EXIT_USAGE,
                "--family is required for netlist files",
            ))
        }
    };
    let report = verify_design(&seq, &flipflop_spec(family))
        .map_err(|e| CommandOutput::fail(EXIT_VERIFY, e.to_string()))?;
    let text = format!("{report}\n");
    if report.pass {
        Ok(CommandOutput::ok(text))
    } else {
        Err(CommandOutput {
            code: EXIT_VERIFY,
            stdout: text,
            stderr: String::new(),
        })
    }
}

/// One row of the comparison table.
struct Row {
    family: Family,
    column: Column,
    provenance: String,
    measured: Option<[u64; 6]>, // gates, not, cnot, toffoli, garbage, weighted
    verification: String,
    pub_gates: Option<u64>,
    pub_garbage: Option<u64>,
    pub_weighted: Option<u64>,
    flags: Vec<String>,
}

fn rows() -> Result<Vec<Row>, CommandOutput> {
    let entries = manifest().map_err(|e| CommandOutput::fail(EXIT_SOUNDNESS, e.to_string()))?;
    let mut rows = Vec::new();
    for family in Family::ALL {
        for column in Column::ALL {
            let p = published(family, column);
            let mut flags = Vec::new();
            if p.pair_check() == PairCheck::Inconsistent {
                flags.push("published gates/weighted imply a fractional Toffoli count".to_string());
            }
            let entry = match column {
                Column::Design(v) => entries.iter().find(|e| e.id == DesignId::new(family, v)),
                _ => None,
            };
            let mut row = Row {
                family,
                column,
                provenance: "published only".to_string(),
                measured: None,
                verification: String::new(),
                pub_gates: p.gates,
                pub_garbage: p.garbage,
                pub_weighted: p.weighted,
                flags,
            };
            if let Some(e) = entry {
                let r = &e.report;
                let identity = e.weighted == (r.total + 4 * r.toffoli) as u64;
                if !identity {
                    row.flags.push("weighted != gates + 4 x Toffoli".to_string());
                }
                match e.gates_within_published() {
                    Some(false) => row.flags.push("gates above published".to_string()),
                    Some(true) if Some(r.total as u64) != p.gates => {
                        row.flags.push("gates below published".to_string())
                    }
                    _ => {}
                }
                if e.garbage_within_published() == Some(false) {
                    row.flags.push("garbage above published".to_string());
                }
                if family == Family::Msjk && column == Column::Design(Variant::D1) {
                    row.flags.push(format!(
                        "text states {} gates, table {}",
                        corpus::reference::MSJK_D1_TEXT_GATES,
                        p.gates.unwrap_or(0)
                    ));
                }
                row.provenance = e.provenance.to_string();
                row.measured = Some([
                    r.total as u64,
                    r.not as u64,
                    r.cnot as u64,
                    r.toffoli as u64,
                    r.garbage as u64,
                    e.weighted,
                ]);
                row.verification = e.verification.to_string();
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

fn cell(v: Option<u64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

fn cmd_report(format: FormatArg) -> Outcome {
    let rows = rows()?;
    let header = [
        "family", "column", "provenance", "gates", "not", "cnot", "toffoli", "garbage",
        "weighted", "pub_gates", "pub_garbage", "pub_weighted", "verify", "flags",
    ];
    let mut out = String::new();
    let fields = |r: &Row| -> Vec<String> {
        let m = |i: usize| cell(r.measured.map(|m| m[i]));
        vec![
            r.family.to_string(),
            r.column.to_string(),
            r.provenance.clone(),
            m(0),
            m(1),
            m(2),
            m(3),
            m(4),
            m(5),
            cell(r.pub_gates),
            cell(r.pub_garbage),
            cell(r.pub_weighted),
            r.verification.clone(),
            r.flags.join("; "),
        ]
    };
    match format {
        FormatArg::Csv => {
            out.push_str(&header.join(","));
            out.push('\n');
            for r in &rows {
                let line: Vec<String> = fields(r)
                    .into_iter()
                    .map(|f| {
                        if f.contains(',') || f.contains('"') {
                            format!("\"{}\"", f.replace('"', "\"\""))
                        } else {
                            f
                        }
                    })
                    .collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
        }
        FormatArg::Md => {
            let _ = writeln!(out, "| {} |", header.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
            for r in &rows {
                let _ = writeln!(out, "| {} |", fields(r).join(" | "));
            }
        }
    }
    let failed = rows
        .iter()
        .any(|r| r.measured.is_some() && !r.verification.starts_with("PASS"));
    if failed {
        Err(CommandOutput {
            code: EXIT_VERIFY,
            stdout: out,
            stderr: "some corpus designs failed verification\n".to_string(),
        })
    } else {
        Ok(CommandOutput::ok(out))
    }
}
