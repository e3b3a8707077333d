use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value as Json};

use edspec::bisim::{bisimilar, Side};
use edspec::characterize::{characterize, CharOptions};
use edspec::edts::Edts;
use edspec::logic::check_sentence;
use edspec::opspec::{canonical_model, enumerate_models, is_model, largest_model, parallel_compose, EnumerationLimits};
use edspec::refine::{write_model, Specification};
use edspec::sample::pick;
use edspec::syntax::{load, printer, Loaded, Universe};

#[derive(Parser)]
#[command(name = "edspec", version, about = "Check, compose and refine event/data specifications")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Integer ranges: `int=LO..HI` for unranged attributes, `NAME=LO..HI` for one attribute.
    #[arg(long, global = true, value_name = "SPEC")]
    universe: Vec<String>,
    /// Control-state bound for searching models of axiomatic specifications.
    #[arg(long, global = true, value_name = "K")]
    bound_states: Option<usize>,
    /// Seed for sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the result to FILE instead of standard output.
    #[arg(short, global = true, value_name = "FILE")]
    o: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model (JSON) against the specifications in a file.
    Check { model: PathBuf, spec: PathBuf },
    /// Decide bisimilarity of two models (JSON).
    Bisim { left: PathBuf, right: PathBuf },
    /// Parallel composition of two operational specifications.
    Compose {
        left: PathBuf,
        right: PathBuf,
        #[arg(long)]
        name: Option<String>,
    },
    /// Characterizing sentence of an operational specification.
    Characterize {
        spec: PathBuf,
        /// Use the linear closing clause where same-event guards are disjoint.
        #[arg(long)]
        simplify_disjoint: bool,
    },
    /// Largest model of an operational specification, as JSON.
    Canonical { spec: PathBuf },
    /// All models of an operational specification up to renaming.
    Enumerate {
        spec: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_states: usize,
        #[arg(long, default_value_t = 8)]
        max_data: usize,
        /// Report only N models chosen with `--seed`.
        #[arg(long, value_name = "N")]
        sample: Option<usize>,
    },
    /// Run the refinement claims of a file.
    Refine { claims: PathBuf },
    /// Print the declarations of a file in normal form.
    Export { file: PathBuf },
}

/// Failure that is not a verdict: bad input or an internal limit.
struct Fatal(String);

impl<E: std::fmt::Display> From<E> for Fatal {
    fn from(e: E) -> Self {
        Fatal(e.to_string())
    }
}

/// Text and JSON renderings of a result, plus whether it holds.
struct Outcome {
    text: String,
    json: Json,
    holds: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = universe(&cli.common.universe).and_then(|u| run(&cli, &u));
    match result {
        Ok(out) => {
            let body = if cli.common.json {
                serde_json::to_string_pretty(&out.json).expect("serializable") + "\n"
            } else {
                out.text
            };
            match &cli.common.o {
                Some(p) => {
                    if let Err(e) = fs::write(p, body) {
                        eprintln!("error: cannot write `{}`: {e}", p.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{body}"),
            }
            ExitCode::from(if out.holds { 0 } else { 1 })
        }
        Err(Fatal(msg)) => {
            eprint!("{msg}");
            if !msg.ends_with('\n') {
                eprintln!();
            }
            ExitCode::from(2)
        }
    }
}

fn universe(specs: &[String]) -> Result<Universe, Fatal> {
    let mut u = Universe::default();
    for s in specs {
        let bad = || Fatal(format!("error: bad --universe value `{s}`, expected NAME=LO..HI"));
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
        let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
        if hi < lo {
            return Err(bad());
        }
        if name.trim() == "int" {
            u.default_int = (lo, hi);
        } else {
            u.overrides.insert(name.trim().to_string(), (lo, hi));
        }
    }
    Ok(u)
}

fn load_files(paths: &[&Path], u: &Universe) -> Result<Loaded, Fatal> {
    let l = load(paths, u);
    if l.has_errors() {
        return Err(Fatal(l.render_diagnostics()));
    }
    eprint!("{}", l.render_diagnostics());
    Ok(l)
}

/// The last specification declared in root file `k`.
fn main_spec(l: &Loaded, k: usize) -> Result<&Specification, Fatal> {
    let file = l.roots[k];
    l.workspace
        .specs_in(file)
        .pop()
        .ok_or_else(|| Fatal(format!("error: `{}` declares no specification", l.sources.path(file).display())))
}

fn main_opspec(l: &Loaded, k: usize) -> Result<&edspec::opspec::OpSpec, Fatal> {
    match main_spec(l, k)? {
        Specification::Operational(o) => Ok(o),
        Specification::Axiomatic(a) => Err(Fatal(format!("error: `{}` is not an operational specification", a.name()))),
    }
}

fn read_model(p: &Path) -> Result<Edts, Fatal> {
    let text = fs::read_to_string(p).map_err(|e| Fatal(format!("error: cannot read `{}`: {e}", p.display())))?;
    Edts::from_json(&text).map_err(|e| Fatal(format!("error: `{}`: {e}", p.display())))
}

fn model_text(m: &Edts) -> String {
    let mut s = String::new();
    write_model(&mut s, m).expect("writing to a string");
    s
}

fn model_json(m: &Edts) -> Json {
    serde_json::from_str(&m.to_json()).expect("edts export is valid json")
}

fn run(cli: &Cli, u: &Universe) -> Result<Outcome, Fatal> {
    match &cli.command {
        Command::Check { model, spec } => {
            let m = read_model(model)?;
            let l = load_files(&[spec], u)?;
            let mut text = String::new();
            let mut rows = Vec::new();
            let mut holds = true;
            for s in l.workspace.specs_in(l.roots[0]) {
                if s.sig() != m.sig() {
                    continue;
                }
                match s {
                    Specification::Axiomatic(a) => {
                        for ax in a.axioms() {
                            let v = check_sentence(&m, &ax.sentence)?;
                            holds &= v.holds;
                            let mut row = json!({"spec": a.name(), "axiom": ax.label, "holds": v.holds});
                            if v.holds {
                                text += &format!("{} \"{}\": holds\n", a.name(), ax.label);
                            } else if let Some((c, trace)) = &v.failure {
                                text += &format!("{} \"{}\": fails at {c}\n", a.name(), ax.label);
                                for step in trace {
                                    text += &format!("  {step}\n");
                                }
                                row["at"] = json!(c.to_string());
                                row["trace"] = json!(trace.iter().map(|t| t.to_string()).collect::<Vec<_>>());
                            }
                            rows.push(row);
                        }
                    }
                    Specification::Operational(o) => {
                        let v = is_model(&m, o)?;
                        holds &= v.is_model;
                        match &v.violation {
                            None => text += &format!("{}: model\n", o.name()),
                            Some(x) => text += &format!("{}: not a model: {x}\n", o.name()),
                        }
                        rows.push(json!({
                            "spec": o.name(),
                            "holds": v.is_model,
                            "violation": v.violation.as_ref().map(|x| x.to_string()),
                        }));
                    }
                }
            }
            if rows.is_empty() {
                return Err(Fatal("error: no specification in the file has the model's signature".into()));
            }
            Ok(Outcome {
                text,
                json: json!(rows),
                holds,
            })
        }
        Command::Bisim { left, right } => {
            let (m1, m2) = (read_model(left)?, read_model(right)?);
            let v = bisimilar(&m1, &m2)?;
            let pairs: Vec<String> = v.relation.iter().map(|(a, b)| format!("{a} ~ {b}")).collect();
            let mut text = String::new();
            let mut js = json!({"bisimilar": v.bisimilar, "relation": pairs});
            if v.bisimilar {
                text += "bisimilar\n";
                for p in &pairs {
                    text += &format!("  {p}\n");
                }
            } else {
                text += "not bisimilar\n";
                if let Some(d) = &v.distinction {
                    let side = match d.side {
                        Side::Left => "left",
                        Side::Right => "right",
                    };
                    text += &format!("initial {} of the {side} model is unmatched\n", d.initial);
                    text += &format!("distinguishing formula: {}\n", d.formula);
                    js["distinction"] = json!({
                        "side": side,
                        "initial": d.initial.to_string(),
                        "formula": d.formula.to_string(),
                    });
                }
            }
            Ok(Outcome {
                text,
                json: js,
                holds: v.bisimilar,
            })
        }
        Command::Compose { left, right, name } => {
            let l = load_files(&[left, right], u)?;
            let (a, b) = (main_opspec(&l, 0)?, main_opspec(&l, 1)?);
            let mut o = parallel_compose(a, b)?;
            let n = name.clone().unwrap_or_else(|| format!("{}_{}", a.name(), b.name()));
            o = o.with_name(&n);
            Ok(Outcome {
                text: o.to_string(),
                json: json!({"name": n, "text": o.to_string(), "transitions": o.transitions().len()}),
                holds: true,
            })
        }
        Command::Characterize { spec, simplify_disjoint } => {
            let l = load_files(&[spec], u)?;
            let o = main_opspec(&l, 0)?;
            let opts = CharOptions {
                disjoint: *simplify_disjoint,
                ..CharOptions::default()
            };
            let c = characterize(o, &opts)?;
            let mut text = String::new();
            for e in &c.expansions {
                text += &format!("{} =\n  {}\n", e.call, e.result);
            }
            text += &format!("sentence:\n  {}\n", c.sentence);
            let steps: Vec<Json> = c
                .expansions
                .iter()
                .map(|e| json!({"call": e.call, "result": e.result}))
                .collect();
            Ok(Outcome {
                text,
                json: json!({"sentence": c.sentence.to_string(), "expansions": steps}),
                holds: true,
            })
        }
        Command::Canonical { spec } => {
            let l = load_files(&[spec], u)?;
            let o = main_opspec(&l, 0)?;
            match canonical_model(o) {
                Ok(m) => Ok(Outcome {
                    text: m.to_json() + "\n",
                    json: model_json(&m),
                    holds: true,
                }),
                Err(e) => {
                    let largest = largest_model(o)?;
                    let note = match &largest {
                        Some(_) => "a smaller model exists; it avoids the configurations above",
                        None => "the specification has no model over this universe",
                    };
                    Ok(Outcome {
                        text: format!("no canonical model: {e}\nnote: {note}\n"),
                        json: json!({
                            "error": e.to_string(),
                            "largest_model": largest.as_ref().map(model_json),
                        }),
                        holds: false,
                    })
                }
            }
        }
        Command::Enumerate {
            spec,
            max_states,
            max_data,
            sample,
        } => {
            let l = load_files(&[spec], u)?;
            let o = main_opspec(&l, 0)?;
            let limits = EnumerationLimits {
                max_ctrl_states: *max_states,
                max_data_states: *max_data,
                ..EnumerationLimits::default()
            };
            let all = if largest_model(o)?.is_none() {
                Vec::new()
            } else {
                enumerate_models(o, limits)?
            };
            let total = all.len();
            let shown: Vec<Edts> = match sample {
                Some(n) => pick(&all, *n, cli.common.seed),
                None => all,
            };
            let mut text = format!("{total} model(s)\n");
            for (i, m) in shown.iter().enumerate() {
                text += &format!("model {}:\n{}", i + 1, model_text(m));
            }
            Ok(Outcome {
                text,
                json: json!({"count": total, "models": shown.iter().map(model_json).collect::<Vec<_>>()}),
                holds: true,
            })
        }
        Command::Refine { claims } => {
            let l = load_files(&[claims], u)?;
            let mut text = String::new();
            let mut reports = Vec::new();
            let mut holds = true;
            if l.workspace.checks.is_empty() {
                return Err(Fatal(format!("error: `{}` contains no claims", claims.display())));
            }
            for check in &l.workspace.checks {
                for r in check.run(cli.common.bound_states)? {
                    holds &= r.verdict.is_verified();
                    if !text.is_empty() {
                        text.push('\n');
                    }
                    text += &r.to_string();
                    reports.push(r.to_json());
                }
            }
            Ok(Outcome {
                text,
                json: json!(reports),
                holds,
            })
        }
        Command::Export { file } => {
            let l = load_files(&[file], u)?;
            let ws = &l.workspace;
            let mut text = String::new();
            // morphisms refer to specifications by name, so they come last
            let rank = |n: &String| {
                if ws.sigs.contains_key(n) {
                    0
                } else if ws.specs.contains_key(n) {
                    1
                } else {
                    2
                }
            };
            let mut names: Vec<(u8, &edspec::syntax::Span, &String)> =
                ws.spans.iter().map(|(n, s)| (rank(n), s, n)).collect();
            names.sort();
            for (_, _, n) in names {
                let block = if let Some(s) = ws.specs.get(n) {
                    printer::print_spec(s)
                } else if let Some(s) = ws.sigs.get(n) {
                    printer::print_signature(n, s)
                } else if let Some(m) = ws.morphisms.get(n) {
                    let (src, tgt) = morphism_ends(ws, m);
                    printer::print_morphism(m, &src, &tgt)
                } else {
                    continue;
                };
                if !text.is_empty() {
                    text.push('\n');
                }
                text += &block;
            }
            Ok(Outcome {
                json: json!({"text": text}),
                text,
                holds: true,
            })
        }
    }
}

/// Names of declared signatures matching the ends of a morphism.
fn morphism_ends(ws: &edspec::syntax::Workspace, m: &edspec::syntax::Morphism) -> (String, String) {
    let (s, t) = match m {
        edspec::syntax::Morphism::Signature(x) => (&x.source, &x.target),
        edspec::syntax::Morphism::EventRefinement(x) => (&x.source, &x.target),
    };
    let find = |sig: &edspec::edts::EdSignature| {
        ws.spans
            .keys()
            .find(|n| ws.signature(n) == Some(sig))
            .cloned()
            .unwrap_or_else(|| "?".into())
    };
    (find(s), find(t))
}
