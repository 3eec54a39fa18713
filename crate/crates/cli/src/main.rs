use std::fs;
use std::io::{self, Read};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use layered_core::alternating::cobuchi_to_layered;
use layered_core::congruence::{build_congruence_automaton, CongruenceLimits};
use layered_core::decisions;
use layered_core::dot;
use layered_core::dpa::dpa_to_layered;
use layered_core::fixtures::{self, FixtureLanguage};
use layered_core::format::{self, Automaton};
use layered_core::minimize;
use layered_core::morphism::check_isomorphic;
use layered_core::semantics::{alt_member_up, build_sem, cocoa_export, layered_accept_up};
use layered_core::simulate::{simulate_run, Policy};
use layered_core::{AlternatingAutomaton, Dpa, LayeredAutomaton, UpWord};

#[derive(Parser)]
#[command(name = "layered", version, about = "Layered automata for omega-regular languages")]
struct Cli {
    /// Output style.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Exit with status 1 when a yes/no result is negative.
    #[arg(long, global = true)]
    exit_status: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    JsonLines,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Layered,
    Game,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Stage {
    Normalize,
    Safemin,
    Centralize,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    LongestSuffix,
    Random,
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::LongestSuffix => Policy::LongestSuffix,
            PolicyArg::Random => Policy::Random,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Report structural problems of a layered automaton.
    Validate { input: String },
    /// Decide consistency; prints a witness pair when inconsistent.
    Consistent { input: String },
    /// Decide emptiness of the language.
    Empty { input: String },
    /// Decide whether the language of the first automaton is included in that of the second.
    Include { left: String, right: String },
    /// Decide language equivalence.
    Equiv { left: String, right: String },
    /// Decide membership of prefix·loop^ω.
    Member {
        input: String,
        #[arg(long, default_value = "")]
        prefix: String,
        #[arg(long = "loop")]
        period: String,
        #[arg(long, value_enum, default_value_t = Engine::Both)]
        engine: Engine,
    },
    /// Convert a DPA into a layered automaton.
    FromDpa { input: String },
    /// Convert a semantically and safe deterministic, 1-saturated coBüchi automaton.
    FromCobuchi { input: String },
    /// Print the semantics automaton.
    Sem { input: String },
    /// Run one stage of the minimisation pipeline, or all of them.
    Minimize {
        input: String,
        #[arg(long, value_enum, default_value_t = Stage::All)]
        stage: Stage,
    },
    /// Canonical form: the full pipeline with post-condition checks.
    Canonical { input: String },
    /// Decide isomorphism of two safe minimal automata.
    Iso { left: String, right: String },
    /// Export the chain of coBüchi automata, one per layer.
    Cocoa { input: String },
    /// Build the canonical automaton from the congruence of a DPA.
    Congruence {
        input: String,
        #[arg(long, default_value_t = 16)]
        layer_cap: usize,
        #[arg(long, default_value_t = 20_000)]
        monoid_cap: usize,
    },
    /// Simulate runs of the semantics automaton.
    Simulate {
        input: String,
        #[arg(long, default_value = "")]
        prefix: String,
        #[arg(long = "loop")]
        period: String,
        #[arg(long, value_enum, default_value_t = PolicyArg::LongestSuffix)]
        eve: PolicyArg,
        #[arg(long, value_enum, default_value_t = PolicyArg::LongestSuffix)]
        adam: PolicyArg,
        #[arg(long, default_value_t = 1000)]
        horizon: usize,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Graphviz rendering.
    Dot { input: String },
    /// Generate an automaton.
    Gen {
        #[command(subcommand)]
        what: Generator,
    },
}

#[derive(Subcommand)]
enum Generator {
    /// One-state DPA over {1..d}; letter x loops with priority x.
    Parity { d: u32 },
    /// The two-strand layered automaton with k+1 layers.
    TwoStrand { k: usize },
    /// Random complete DPA.
    Random {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        alphabet: usize,
        #[arg(long, default_value_t = 3)]
        max_priority: u32,
    },
    /// A bundled example: L1, L1-layered, L2, L2-alt, L3, L4, inconsistent, lowering, cobuchi-cc.
    Fixture { name: String },
}

/// Result of one command: a yes/no verdict (if any), text for humans and a JSON value.
struct Outcome {
    verdict: Option<bool>,
    text: String,
    json: Value,
}

impl Outcome {
    fn verdict(v: bool, text: String, json: Value) -> Self {
        Outcome {
            verdict: Some(v),
            text,
            json,
        }
    }

    fn document(a: &Automaton) -> Self {
        let text = format::serialize(a);
        let json: Value = serde_json::from_str(&text).expect("serialized documents are JSON");
        Outcome {
            verdict: None,
            text,
            json: json!({ "document": json }),
        }
    }
}

fn read_input(path: &str) -> anyhow::Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading standard input")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn load(path: &str) -> anyhow::Result<Automaton> {
    format::parse_any(&read_input(path)?).with_context(|| format!("parsing {path}"))
}

/// A layered automaton, converting DPAs on the fly.
fn load_layered(path: &str) -> anyhow::Result<LayeredAutomaton> {
    match load(path)? {
        Automaton::Layered(a) => Ok(a),
        Automaton::Dpa(d) => Ok(dpa_to_layered(&d)),
        Automaton::Alternating(_) => bail!("{path}: expected a layered automaton or a DPA"),
    }
}

fn load_dpa(path: &str) -> anyhow::Result<Dpa> {
    match load(path)? {
        Automaton::Dpa(d) => Ok(d),
        _ => bail!("{path}: expected a DPA"),
    }
}

fn load_alternating(path: &str) -> anyhow::Result<AlternatingAutomaton> {
    match load(path)? {
        Automaton::Alternating(b) => Ok(b),
        _ => bail!("{path}: expected an alternating automaton"),
    }
}

fn parse_up(a: &layered_core::Alphabet, prefix: &str, period: &str) -> anyhow::Result<UpWord> {
    Ok(UpWord::parse(a, prefix, period)?)
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    Ok(match &cli.command {
        Command::Validate { input } => {
            let a = load_layered(input)?;
            let diags = a.validate();
            let lines: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
            let text = if lines.is_empty() { "valid".to_string() } else { lines.join("\n") };
            Outcome::verdict(diags.is_empty(), text, json!({ "valid": diags.is_empty(), "diagnostics": lines }))
        }
        Command::Consistent { input } => {
            let a = load_layered(input)?;
            let c = decisions::check_consistent(&a)?;
            match c.witness {
                None => Outcome::verdict(true, "consistent".into(), json!({ "consistent": true })),
                Some((p, q)) => Outcome::verdict(
                    false,
                    format!("inconsistent: witness ({}, {})", a.name(p), a.name(q)),
                    json!({ "consistent": false, "witness": [a.name(p), a.name(q)] }),
                ),
            }
        }
        Command::Empty { input } => {
            let e = decisions::is_empty(&load_layered(input)?)?;
            let text = if e { "empty" } else { "non-empty" };
            Outcome::verdict(e, text.into(), json!({ "empty": e }))
        }
        Command::Include { left, right } => {
            let i = decisions::is_included(&load_layered(left)?, &load_layered(right)?)?;
            let text = if i { "included" } else { "not included" };
            Outcome::verdict(i, text.into(), json!({ "included": i }))
        }
        Command::Equiv { left, right } => {
            let e = decisions::is_equivalent(&load_layered(left)?, &load_layered(right)?)?;
            let text = if e { "equivalent" } else { "not equivalent" };
            Outcome::verdict(e, text.into(), json!({ "equivalent": e }))
        }
        Command::Member {
            input,
            prefix,
            period,
            engine,
        } => member(input, prefix, period, *engine)?,
        Command::FromDpa { input } => Outcome::document(&Automaton::Layered(dpa_to_layered(&load_dpa(input)?))),
        Command::FromCobuchi { input } => {
            Outcome::document(&Automaton::Layered(cobuchi_to_layered(&load_alternating(input)?)?))
        }
        Command::Sem { input } => Outcome::document(&Automaton::Alternating(build_sem(&load_layered(input)?, None)?)),
        Command::Minimize { input, stage } => {
            let a = load_layered(input)?;
            let out = match stage {
                Stage::Normalize => minimize::normalize(&a)?,
                Stage::Safemin => minimize::safe_minimize(&a)?.0,
                Stage::Centralize => minimize::centralize(&a)?,
                Stage::All => minimize::canonicalize(&a)?.0,
            };
            Outcome::document(&Automaton::Layered(out))
        }
        Command::Canonical { input } => {
            let (c, report) = minimize::canonicalize(&load_layered(input)?)?;
            eprintln!("{report}");
            Outcome::document(&Automaton::Layered(c))
        }
        Command::Iso { left, right } => {
            let (a, b) = (load_layered(left)?, load_layered(right)?);
            match check_isomorphic(&a, &b)? {
                Some(map) => {
                    let pairs: Vec<(String, String)> = map
                        .iter()
                        .map(|(&s, &t)| (a.name(s).to_string(), b.name(t).to_string()))
                        .collect();
                    let mut text = String::from("isomorphic");
                    for (s, t) in &pairs {
                        text.push_str(&format!("\n  {s} -> {t}"));
                    }
                    Outcome::verdict(true, text, json!({ "isomorphic": true, "map": pairs }))
                }
                None => Outcome::verdict(false, "not isomorphic".into(), json!({ "isomorphic": false })),
            }
        }
        Command::Cocoa { input } => {
            let chain = cocoa_export(&load_layered(input)?)?;
            let docs: Vec<Value> = chain
                .iter()
                .map(|b| serde_json::to_value(format::to_alternating_document(b)).expect("serializable"))
                .collect();
            let mut text = serde_json::to_string_pretty(&docs)?;
            text.push('\n');
            Outcome {
                verdict: None,
                text,
                json: json!({ "chain": docs }),
            }
        }
        Command::Congruence {
            input,
            layer_cap,
            monoid_cap,
        } => {
            let limits = CongruenceLimits {
                layers: *layer_cap,
                monoid: *monoid_cap,
            };
            Outcome::document(&Automaton::Layered(build_congruence_automaton(&load_dpa(input)?, limits)?))
        }
        Command::Simulate {
            input,
            prefix,
            period,
            eve,
            adam,
            horizon,
            trials,
            seed,
        } => simulate(input, prefix, period, (*eve).into(), (*adam).into(), *horizon, *trials, *seed)?,
        Command::Dot { input } => {
            let text = match load(input)? {
                Automaton::Layered(a) => dot::layered_to_dot(&a),
                Automaton::Dpa(d) => dot::layered_to_dot(&dpa_to_layered(&d)),
                Automaton::Alternating(b) => dot::alternating_to_dot(&b),
            };
            Outcome {
                verdict: None,
                json: json!({ "dot": text }),
                text,
            }
        }
        Command::Gen { what } => Outcome::document(&generate(what)?),
    })
}

fn generate(what: &Generator) -> anyhow::Result<Automaton> {
    Ok(match what {
        Generator::Parity { d } => Automaton::Dpa(fixtures::gen_parity(*d)?),
        Generator::TwoStrand { k } => Automaton::Layered(fixtures::gen_two_strand(*k)?),
        Generator::Random {
            seed,
            states,
            alphabet,
            max_priority,
        } => Automaton::Dpa(fixtures::gen_random_dpa(*seed, *states, *alphabet, *max_priority)?),
        Generator::Fixture { name } => match name.as_str() {
            "L1-layered" => Automaton::Layered(fixtures::l1_layered()),
            "L2-alt" => Automaton::Dpa(fixtures::l2_alt_dpa()),
            "inconsistent" => Automaton::Layered(fixtures::inconsistent_fixture()),
            "lowering" => Automaton::Layered(fixtures::lowering_fixture()),
            "cobuchi-cc" => Automaton::Alternating(fixtures::cobuchi_finitely_many_cc()),
            other => Automaton::Dpa(
                FixtureLanguage::parse(other)
                    .map_err(|_| anyhow!("unknown fixture `{other}`"))?
                    .dpa(),
            ),
        },
    })
}

fn member(input: &str, prefix: &str, period: &str, engine: Engine) -> anyhow::Result<Outcome> {
    let verdict_text = |v: bool| if v { "accepted" } else { "rejected" };
    if let Automaton::Alternating(b) = load(input)? {
        if engine == Engine::Layered {
            bail!("the layered engine needs a layered automaton or a DPA");
        }
        let w = parse_up(b.alphabet(), prefix, period)?;
        let v = alt_member_up(&b, &w, None)?;
        return Ok(Outcome::verdict(v, verdict_text(v).into(), json!({ "accepted": v, "engine": "game" })));
    }
    let a = load_layered(input)?;
    let w = parse_up(a.alphabet(), prefix, period)?;
    let layered = || -> anyhow::Result<(bool, usize)> { Ok(layered_accept_up(&a, &w)?) };
    let game = || -> anyhow::Result<bool> { Ok(alt_member_up(&build_sem(&a, None)?, &w, None)?) };
    Ok(match engine {
        Engine::Layered => {
            let (v, x) = layered()?;
            Outcome::verdict(
                v,
                format!("{} (ultimately safe up to layer {x})", verdict_text(v)),
                json!({ "accepted": v, "engine": "layered", "layer": x }),
            )
        }
        Engine::Game => {
            let v = game()?;
            Outcome::verdict(v, verdict_text(v).into(), json!({ "accepted": v, "engine": "game" }))
        }
        Engine::Both => {
            let ((v, x), g) = (layered()?, game()?);
            if v != g {
                bail!("engines disagree: layered says {}, game says {}", verdict_text(v), verdict_text(g));
            }
            Outcome::verdict(
                v,
                format!("{} (layers agree)", verdict_text(v)),
                json!({ "accepted": v, "engine": "both", "layer": x }),
            )
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    input: &str,
    prefix: &str,
    period: &str,
    eve: Policy,
    adam: Policy,
    horizon: usize,
    trials: usize,
    seed: Option<u64>,
) -> anyhow::Result<Outcome> {
    let a = load_layered(input)?;
    let w = parse_up(a.alphabet(), prefix, period)?;
    if trials == 0 {
        bail!("at least one trial is needed");
    }
    let mut tails: Vec<Option<u32>> = Vec::with_capacity(trials);
    let mut lines = Vec::new();
    for i in 0..trials {
        let s = seed.map(|s| s.wrapping_add(i as u64));
        let (_, stats) = simulate_run(&a, &w, eve, adam, horizon, s)?;
        tails.push(stats.tail_min);
        if trials == 1 {
            let counts: Vec<String> = stats.priority_counts.iter().map(|(p, c)| format!("{p}:{c}")).collect();
            lines.push(format!("priority counts {}", counts.join(" ")));
        }
    }
    let mut histogram = std::collections::BTreeMap::new();
    for t in tails.iter().flatten() {
        *histogram.entry(*t).or_insert(0usize) += 1;
    }
    let even = tails.iter().flatten().filter(|t| *t % 2 == 0).count();
    let hist: Vec<String> = histogram.iter().map(|(p, c)| format!("{p}:{c}")).collect();
    lines.push(format!("tail-third minimum priority over {trials} trial(s): {}", hist.join(" ")));
    lines.push(format!("even tail minimum in {even} of {trials}"));
    Ok(Outcome {
        verdict: None,
        text: lines.join("\n"),
        json: json!({
            "trials": trials,
            "tail_min": tails,
            "even_tails": even,
        }),
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Consistent { .. } => "consistent",
        Command::Empty { .. } => "empty",
        Command::Include { .. } => "include",
        Command::Equiv { .. } => "equiv",
        Command::Member { .. } => "member",
        Command::FromDpa { .. } => "from-dpa",
        Command::FromCobuchi { .. } => "from-cobuchi",
        Command::Sem { .. } => "sem",
        Command::Minimize { .. } => "minimize",
        Command::Canonical { .. } => "canonical",
        Command::Iso { .. } => "iso",
        Command::Cocoa { .. } => "cocoa",
        Command::Congruence { .. } => "congruence",
        Command::Simulate { .. } => "simulate",
        Command::Dot { .. } => "dot",
        Command::Gen { .. } => "gen",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                OutputFormat::Text => {
                    if out.text.ends_with('\n') {
                        print!("{}", out.text);
                    } else {
                        println!("{}", out.text);
                    }
                }
                OutputFormat::JsonLines => {
                    let mut v = out.json;
                    v["command"] = json!(command_name(&cli.command));
                    println!("{v}");
                }
            }
            match (cli.exit_status, out.verdict) {
                (true, Some(false)) => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            match cli.format {
                OutputFormat::Text => eprintln!("error: {e:#}"),
                OutputFormat::JsonLines => {
                    println!("{}", json!({ "command": command_name(&cli.command), "error": format!("{e:#}") }))
                }
            }
            ExitCode::from(2)
        }
    }
}
