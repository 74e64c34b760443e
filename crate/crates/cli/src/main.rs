//! `ainfty`: verification suites, deformation flows, MC flows and dumps for
//! the Weyl-extension model.

mod manifest;
mod output;
mod suites;

use std::process::ExitCode;

use ainfty::bank::TupleBank;
use ainfty::deformation::{integrate_mc_flow, mc_residual};
use ainfty::models::closed_form::closed_form_structure;
use ainfty::models::weyl::WeylModel;
use ainfty::operator::{parse_element, MultiOperator};
use ainfty::report::Report;
use ainfty::space::GradedElement;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::manifest::ModelArgs;
use crate::output::Outputs;
use crate::suites::Suite;

#[derive(Debug, Parser)]
#[command(name = "ainfty", version, about = "Exact A∞ brace calculus and inner deformations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a verification suite; exits 1 if any residual is non-zero.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Flow the Weyl family along Δ₁ and dump every order in `s`.
    Flow {
        /// Set `u = 0` in every order (the minimal structure).
        #[arg(long)]
        minimal: bool,
    },
    /// Transport a Maurer–Cartan element along the Δ₁ flow (with `u = 0`).
    Mc {
        /// Initial element, e.g. `mod:x y` or `mod:x => 1; mod:y => -1/2 * t`.
        #[arg(long, default_value = "0")]
        a0: String,
    },
    /// Dump one of the model's operators.
    Export {
        #[arg(value_enum)]
        object: ExportId,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportId {
    /// The cup-word cocycle Δ₁ = m_(t) ∪ m_(u).
    Delta1,
    /// The signed star product.
    M2,
    /// The whole family m = m₂ + u∂.
    Family,
    /// The closed-form minimal structure at t = 0, up to the tuple length.
    ClosedForm,
    /// The first-order cocycle of arity 3.
    FirstOrder,
}

impl ExportId {
    fn name(self) -> &'static str {
        match self {
            ExportId::Delta1 => "delta1",
            ExportId::M2 => "m2",
            ExportId::Family => "family",
            ExportId::ClosedForm => "closed-form",
            ExportId::FirstOrder => "first-order",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Why a run did not succeed; each kind has its own exit code.
#[derive(Debug)]
pub enum Failure {
    /// A residual was non-zero or a mathematical precondition failed.
    Residual(String),
    /// Malformed flags or input files.
    Usage(String),
    /// A value left the capped window.
    Truncation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Residual(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Truncation(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Residual(m) | Failure::Usage(m) | Failure::Truncation(m) => m,
        }
    }
}

impl From<ainfty::Error> for Failure {
    fn from(e: ainfty::Error) -> Self {
        use ainfty::Error as E;
        match e {
            E::Truncation { .. } => Failure::Truncation(e.to_string()),
            E::Parse(_) | E::InvalidParameter { .. } | E::UnknownParameter(_) | E::UnknownBasis(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Residual(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Verify { suite } => verify(&cli.model, *suite),
        Command::Flow { minimal } => flow(&cli.model, *minimal),
        Command::Mc { a0 } => mc(&cli.model, a0),
        Command::Export { object, format } => export(&cli.model, *object, *format),
    }
}

fn model(config: ainfty::models::weyl::WeylConfig) -> Result<WeylModel, Failure> {
    Ok(WeylModel::new(config)?)
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

fn verify(args: &ModelArgs, suite: Suite) -> Result<(), Failure> {
    let (config, manifest) = args.resolve("verify", Some(suite.name().into()))?;
    let w = match suite {
        Suite::Braces => None,
        _ => Some(model(config)?),
    };
    let report = suites::run(suite, w.as_ref(), args.tuple_len, args.seed)?;
    let mut out = Outputs::new(args.out.clone(), manifest);
    out.add("report.json", json(&report));
    out.finish()?;
    let failures: usize = report.checks.iter().map(|c| c.failures.len()).sum();
    let evaluated: usize = report.checks.iter().map(|c| c.evaluated).sum();
    eprintln!("verify {}: {evaluated} evaluations, {failures} non-zero residuals", suite.name());
    if report.ok {
        Ok(())
    } else {
        Err(Failure::Residual(format!("{failures} non-zero residuals in suite {}", suite.name())))
    }
}

/// Text or JSON dump; a truncation error is reported with the first
/// offending tuple.
fn dump(op: &MultiOperator, bank: &TupleBank, format: Format) -> Result<String, Failure> {
    let result = match format {
        Format::Text => op.dump(bank),
        Format::Json => op.entries(bank).map(|entries| {
            let space = op.space();
            let rows: Vec<_> = entries
                .iter()
                .map(|e| {
                    serde_json::json!({
                        "tuple": e.tuple.iter().map(|i| space.format_index(i)).collect::<Vec<_>>(),
                        "value": e.value.to_string(),
                    })
                })
                .collect();
            let arities: Vec<usize> = op.support().arities().collect();
            json(&serde_json::json!({
                "space": space.id(),
                "degree": op.degree(),
                "arities": arities,
                "entries": rows,
            }))
        }),
    };
    result.map_err(|e| {
        let f = Failure::from(e);
        match f {
            Failure::Truncation(m) => {
                let space = op.space();
                let at = bank
                    .tuples()
                    .filter(|t| op.support().contains(t.len()))
                    .find(|t| op.eval_basis(t).is_err())
                    .map(|t| t.iter().map(|i| space.format_index(i)).collect::<Vec<_>>().join(", "));
                match at {
                    Some(t) => Failure::Truncation(format!("{m} at [{t}]")),
                    None => Failure::Truncation(m),
                }
            }
            other => other,
        }
    })
}

fn flow(args: &ModelArgs, minimal: bool) -> Result<(), Failure> {
    let (config, mut manifest) = args.resolve("flow", Some(if minimal { "minimal" } else { "delta1" }.into()))?;
    let w = model(config)?;
    let series = if minimal { w.minimal_weyl_structure()? } else { w.delta1_flow()? };
    let bank = w.bank(0..=args.tuple_len);
    manifest.format = Some("text".into());
    let mut out = Outputs::new(args.out.clone(), manifest);
    for (k, op) in series.orders().iter().enumerate() {
        out.add(&format!("flow_s{k}.txt"), dump(op, &bank, Format::Text)?);
    }
    out.finish()
}

#[derive(Serialize)]
struct McOutput {
    orders: Vec<String>,
    element: String,
    residual: Report,
}

fn mc(args: &ModelArgs, a0: &str) -> Result<(), Failure> {
    let (config, mut manifest) = args.resolve("mc", None)?;
    manifest.a0 = Some(a0.to_string());
    let w = model(config)?;
    let start = parse_a0(&w, a0)?;
    let series = w.delta1_flow()?;
    let flow = integrate_mc_flow(&series, &start, &[w.u])?;
    let res = mc_residual(&flow.structure, &flow.element)?;
    let mut report = Report::new();
    for k in 0..=series.order_cap() {
        let at_k = res.map_coeffs(|c| c.coefficient_of(w.s, k as u8))?;
        report.record_element(&format!("mc[s^{k}]"), &format!("s^{k}"), &at_k);
    }
    let ok = report.is_ok();
    let body = McOutput {
        orders: flow.orders.iter().map(GradedElement::to_string).collect(),
        element: flow.element.to_string(),
        residual: report,
    };
    let mut out = Outputs::new(args.out.clone(), manifest);
    out.add("mc.json", json(&body));
    out.finish()?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Residual("the transported element is not Maurer–Cartan".into()))
    }
}

/// `0`, a bare basis index (coefficient 1), or the `idx => series; …` form.
fn parse_a0(w: &WeylModel, text: &str) -> Result<GradedElement, Failure> {
    let parsed = if text.contains("=>") || text.trim() == "0" {
        parse_element(&w.space, text)
    } else {
        w.space.parse_index(text.trim()).map(|i| GradedElement::basis(&w.space, i))
    };
    parsed.map_err(|e| Failure::Usage(format!("--a0: {e}")))
}

fn export(args: &ModelArgs, object: ExportId, format: Format) -> Result<(), Failure> {
    let (config, mut manifest) = args.resolve("export", Some(object.name().into()))?;
    let w = model(config)?;
    let op = match object {
        ExportId::Delta1 => w.delta_n(1)?,
        ExportId::M2 => w.m2.clone(),
        ExportId::Family => w.m.clone(),
        ExportId::ClosedForm => closed_form_structure(&w, args.tuple_len.max(2))?,
        ExportId::FirstOrder => w.first_order_cocycle(1),
    };
    let bank = w.bank(0..=args.tuple_len);
    let ext = match format {
        Format::Text => "txt",
        Format::Json => "json",
    };
    manifest.format = Some(ext.into());
    let mut out = Outputs::new(args.out.clone(), manifest);
    out.add(&format!("{}.{ext}", object.name()), dump(&op, &bank, format)?);
    out.finish()
}
