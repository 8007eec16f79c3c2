//! Command dispatch for the `mvk` binary and for the command lists embedded
//! in scenario files.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::birational::DEFAULT_BUDGET;
use crate::corpus;
use crate::equivariant::{check_commute, forget_action, lcm_mult, restrict_action, vol_equivariant};
use crate::error::{Error, Result};
use crate::ring::{reduce, Reduction};
use crate::scenario::{self, Loaded, Payload};
use crate::toric::{euler_number, p_class_from_cone};
use crate::volume::{
    obstruct_rational, obstruct_stable, parity_rule, specialization_check, vol, vol_bir, vol_sb,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Modulus {
    /// Quotient by `t`.
    #[value(name = "tau")]
    Tau,
    /// Specialize `t` to 1.
    #[value(name = "tau-1")]
    TauToOne,
    /// Quotient by `t*L`.
    #[value(name = "tauL")]
    TauLef,
}

impl Modulus {
    fn reduction(self) -> Reduction {
        match self {
            Modulus::Tau => Reduction::ModTau,
            Modulus::TauToOne => Reduction::TauToOne,
            Modulus::TauLef => Reduction::ModTauLef,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Modulus::Tau => "tau",
            Modulus::TauToOne => "tau-1",
            Modulus::TauLef => "tauL",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum Action {
    /// Check the scenario against every invariant.
    Validate { file: Option<PathBuf> },
    /// Motivic volume at a grade (default: the fiber dimension).
    Vol {
        file: Option<PathBuf>,
        #[arg(long)]
        grade: Option<u32>,
    },
    /// Birational volume.
    VolBir { file: Option<PathBuf> },
    /// Stable birational volume.
    VolSb { file: Option<PathBuf> },
    /// Obstruction verdicts; with no rule flag every rule runs.
    Obstruct {
        file: Option<PathBuf>,
        #[arg(long)]
        stable: bool,
        #[arg(long)]
        rational: bool,
        #[arg(long)]
        parity: bool,
        /// Compare the birational volume with the point instead of `P^n`.
        #[arg(long)]
        literal_point_target: bool,
    },
    /// Reduce the volume modulo an ideal.
    Reduce {
        file: Option<PathBuf>,
        #[arg(long = "mod", value_enum)]
        modulus: Modulus,
        #[arg(long)]
        grade: Option<u32>,
    },
    /// Face lattice, Euler number and `P` class of a cone.
    Faces { file: Option<PathBuf> },
    /// Monodromic volume of a model with covers.
    Equivariant {
        file: Option<PathBuf>,
        #[arg(long)]
        restrict: Option<u32>,
        #[arg(long)]
        forget: bool,
        #[arg(long)]
        check_commute: bool,
        #[arg(long)]
        grade: Option<u32>,
    },
    /// Run every bundled scenario and compare with the golden outputs.
    Corpus {
        /// Rewrite the golden files instead of comparing.
        #[arg(long)]
        bless: bool,
    },
}

impl Action {
    fn file(&self) -> Option<&PathBuf> {
        match self {
            Action::Validate { file }
            | Action::Vol { file, .. }
            | Action::VolBir { file }
            | Action::VolSb { file }
            | Action::Obstruct { file, .. }
            | Action::Reduce { file, .. }
            | Action::Faces { file }
            | Action::Equivariant { file, .. } => file.as_ref(),
            Action::Corpus { .. } => None,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mvk", version, about = "Graded motivic volumes and rationality obstructions")]
pub struct Cli {
    #[command(subcommand)]
    pub action: Action,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Maximum number of labels in the merge search.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
}

#[derive(Debug, Parser)]
#[command(name = "scenario-command", no_binary_name = true)]
struct Embedded {
    #[command(subcommand)]
    action: Action,
}

/// Parses one entry of a scenario's `commands` list.
pub fn parse_embedded(command: &str) -> Result<Action> {
    let parsed = Embedded::try_parse_from(command.split_whitespace())
        .map_err(|e| Error::Schema(format!("command `{command}`: {}", e.render())))?;
    if parsed.action.file().is_some() || matches!(parsed.action, Action::Corpus { .. }) {
        return Err(Error::Schema(format!("command `{command}` cannot name a file or run the corpus")));
    }
    Ok(parsed.action)
}

/// A command result in both renderings.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub json: Value,
    pub text: String,
}

fn class_output(key: &str, class: String, terms: Value) -> Output {
    Output {
        text: format!("{key} = {class}"),
        json: json!({ "class": class, "terms": terms }),
    }
}

/// Executes one action on a loaded scenario.
pub fn execute(loaded: &Loaded, action: &Action, budget: usize) -> Result<Output> {
    match action {
        Action::Validate { .. } => Ok(validate(loaded)),
        Action::Vol { grade, .. } => {
            let x = loaded.complex()?;
            let e = grade.unwrap_or(x.fiber_dim());
            let v = vol(x, e)?;
            let mut out = class_output(&format!("vol[{e}]"), v.to_string(), json!(v.to_terms_json()));
            out.json["grade"] = json!(e);
            Ok(out)
        }
        Action::VolBir { .. } => {
            let x = loaded.complex()?;
            let b = vol_bir(x)?;
            let mut out = class_output("vol_bir", b.to_string(), json!(b.to_json()));
            if let (Some(g), 1) = (&loaded.scenario.generic_fiber, x.len()) {
                let generic = g.to_label()?;
                let consistent = specialization_check(x, &loaded.store, &generic)?;
                out.json["specialization"] = json!({ "generic": generic.to_string(), "consistent": consistent });
                out.text += &format!(
                    "\nspecialization of {generic}: {}",
                    if consistent { "consistent" } else { "inconsistent" }
                );
            }
            Ok(out)
        }
        Action::VolSb { .. } => {
            let s = vol_sb(loaded.complex()?, &loaded.store)?;
            Ok(class_output("vol_sb", s.to_string(), json!(s.to_json())))
        }
        Action::Obstruct {
            stable,
            rational,
            parity,
            literal_point_target,
            ..
        } => {
            let x = loaded.complex()?;
            let all = !(*stable || *rational || *parity);
            let mut verdicts = Vec::new();
            if all || *stable {
                verdicts.push(obstruct_stable(x, &loaded.store, budget)?);
            }
            if all || *rational {
                verdicts.push(obstruct_rational(x, &loaded.store, budget, *literal_point_target)?);
            }
            if all || *parity {
                verdicts.push(parity_rule(x, &loaded.store)?);
            }
            let text = verdicts.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n");
            Ok(Output {
                json: json!({ "verdicts": verdicts }),
                text,
            })
        }
        Action::Reduce { modulus, grade, .. } => {
            let x = loaded.complex()?;
            let e = grade.unwrap_or(x.fiber_dim());
            let r = reduce(&vol(x, e)?, modulus.reduction());
            let mut out = class_output(
                &format!("vol[{e}] mod {}", modulus.as_str()),
                r.to_string(),
                json!(r.to_terms_json()),
            );
            out.json["grade"] = json!(e);
            out.json["mode"] = json!(modulus.as_str());
            Ok(out)
        }
        Action::Faces { .. } => {
            let Payload::Cone(c) = &loaded.payload else {
                return Err(Error::Usage(format!(
                    "faces needs a cone payload, scenario `{}` has a {} payload",
                    loaded.scenario.name,
                    loaded.payload.kind()
                )));
            };
            let fl = c.face_lattice();
            let euler = euler_number(fl);
            let p = if c.dim() > 0 {
                Some(p_class_from_cone(c, c.dim() as u32 - 1)?)
            } else {
                None
            };
            let mut text = format!(
                "cone of dimension {} in rank {} with {} rays\nf-vector {:?}, euler number {euler}",
                c.dim(),
                c.rank(),
                c.rays().len(),
                fl.f_vector()
            );
            for f in fl.faces() {
                text += &format!("\n  dim {}: rays {:?}", f.dim, f.rays);
            }
            if let Some(p) = &p {
                text += &format!("\nP = {p}");
            }
            Ok(Output {
                json: json!({
                    "cone": c.to_json(),
                    "lattice": fl.to_json(),
                    "euler_number": euler,
                    "p_class": p.as_ref().map(|p| json!({ "class": p.to_string(), "terms": p.to_terms_json() })),
                }),
                text,
            })
        }
        Action::Equivariant {
            restrict,
            forget,
            check_commute: commute,
            grade,
            ..
        } => {
            let Payload::Equivariant {
                model,
                base_changed,
                identify,
            } = &loaded.payload
            else {
                return Err(Error::Usage(format!(
                    "equivariant needs an equivariant payload, scenario `{}` has a {} payload",
                    loaded.scenario.name,
                    loaded.payload.kind()
                )));
            };
            let e = grade.unwrap_or(model.fiber_dim());
            let n = lcm_mult(model)?;
            let v = vol_equivariant(model, e)?;
            let mut json = json!({ "lcm": n, "grade": e, "class": v.to_string(), "terms": v.to_terms_json() });
            let mut text = format!("lcm = {n}\nvol_mu[{e}] = {v}");
            if let Some(m) = restrict {
                if *m == 0 {
                    return Err(Error::Usage("--restrict needs a positive integer".into()));
                }
                let r = restrict_action(&v, *m);
                json["restricted"] = json!({ "m": m, "class": r.to_string(), "terms": r.to_terms_json() });
                text += &format!("\nrestricted to mu^({m}) = {r}");
            }
            if *forget {
                let classes = identified_classes(base_changed.as_ref(), identify)?;
                let f = forget_action(&v, &classes);
                json["forgotten"] = json!({ "class": f.to_string(), "terms": f.to_terms_json() });
                text += &format!("\nforgotten = {f}");
            }
            if *commute {
                let x = base_changed
                    .as_ref()
                    .ok_or_else(|| Error::Usage("--check-commute needs a base_changed nerve".into()))?;
                let report = check_commute(model, x, identify)?;
                text += &format!(
                    "\ncommutes: {}",
                    match &report.first_difference {
                        None => "yes".to_string(),
                        Some(d) => format!("no, first difference at {d}"),
                    }
                );
                json["commute"] = serde_json::to_value(&report).expect("report serializes");
            }
            Ok(Output { json, text })
        }
        Action::Corpus { .. } => Err(Error::Usage("corpus is not a scenario command".into())),
    }
}

fn identified_classes(
    base_changed: Option<&crate::strata::StrataComplex>,
    identify: &BTreeMap<String, String>,
) -> Result<BTreeMap<String, crate::ring::GradedClass>> {
    let mut out = BTreeMap::new();
    if let Some(x) = base_changed {
        for (atom, id) in identify {
            let i = x.index_of(id)?;
            out.insert(atom.clone(), x.strata()[i].interior.clone());
        }
    }
    Ok(out)
}

fn validate(loaded: &Loaded) -> Output {
    let name = &loaded.scenario.name;
    let (detail, text) = match &loaded.payload {
        Payload::Strata(x) => (
            json!({ "fiber_dim": x.fiber_dim(), "strata": x.len(), "complex": x.to_json() }),
            format!("{} strata, fiber dimension {}", x.len(), x.fiber_dim()),
        ),
        Payload::Cone(c) => (
            json!({ "cone": c.to_json(), "faces": c.face_lattice().len() }),
            format!("cone of dimension {} with {} faces", c.dim(), c.face_lattice().len()),
        ),
        Payload::Equivariant {
            model, base_changed, ..
        } => (
            json!({
                "fiber_dim": model.fiber_dim(),
                "components": model.components().len(),
                "base_changed": base_changed.as_ref().map(|x| x.to_json()),
            }),
            format!(
                "equivariant model with {} components, fiber dimension {}",
                model.components().len(),
                model.fiber_dim()
            ),
        ),
    };
    Output {
        json: json!({ "valid": true, "scenario": name, "payload": loaded.payload.kind(), "detail": detail }),
        text: format!("{name}: valid ({text})"),
    }
}

fn read_scenario(path: &PathBuf) -> Result<Loaded> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    scenario::load_str(&text)
}

fn dispatch(cli: &Cli) -> Result<Output> {
    match &cli.action {
        Action::Corpus { bless } => {
            if *bless {
                let written = corpus::bless(cli.budget)?;
                return Ok(Output {
                    text: format!("wrote {} golden files", written.len()),
                    json: json!({ "written": written }),
                });
            }
            let summary = corpus::run_corpus(cli.budget)?;
            let out = Output {
                text: summary.text(),
                json: summary.to_json(),
            };
            if !summary.all_match() {
                return Err(Error::CorpusMismatch(out.text));
            }
            Ok(out)
        }
        action => {
            let path = action
                .file()
                .ok_or_else(|| Error::Usage("a scenario file is required".into()))?;
            let loaded = read_scenario(path)?;
            execute(&loaded, action, cli.budget)
        }
    }
}

/// Runs the CLI with explicit arguments and streams; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(o) => {
            let _ = if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&o.json).expect("json renders"))
            } else {
                writeln!(out, "{}", o.text)
            };
            0
        }
        Err(Error::CorpusMismatch(text)) if !cli.json => {
            let _ = writeln!(out, "{text}");
            1
        }
        Err(e) => {
            let code = e.exit_code();
            if cli.json {
                let body = match &e {
                    Error::CorpusMismatch(_) => corpus::run_corpus(cli.budget)
                        .map(|s| s.to_json())
                        .unwrap_or_else(|e| e.to_json()),
                    other => other.to_json(),
                };
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&body).expect("json renders"));
            } else {
                let _ = writeln!(err, "error: {e}");
            }
            code
        }
    }
}
