//! `approxcat`: command-line front end for approximation computations.
//!
//! Every command prints a JSON report on stdout and, unless `--json-only` is
//! given, a short summary on stderr. Exit codes: 0 found or verified, 1 sound
//! negative, 2 input error, 3 budget exceeded or hypothesis violated.

mod workspace;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use approxcat::approx::{
    gt_left_approx, gt_left_approx_subobject_closed, left_approx, member, member_add,
    minimize_approx, right_approx_add, ApproxCertificate, Membership,
};
use approxcat::cert::{membership_document, verify_document};
use approxcat::counterex::{all_candidates, build_standard, refute, LoopQuiverConfig};
use approxcat::extfilt::{
    filt_exchange, filt_normalize, member_ext, member_filt, FiltrationCertificate,
};
use approxcat::rep::{ext1_basis, hom_basis, Budget};
use approxcat::{scenario, Error, RepMorphism};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use workspace::Workspace;

#[derive(Parser, Debug)]
#[command(
    name = "approxcat",
    version,
    about = "Approximations of quiver representations, with certificates"
)]
struct Cli {
    /// Print only the JSON report.
    #[arg(long, global = true)]
    json_only: bool,
    /// Largest number of subspace tuples or objects an exhaustive search may visit.
    #[arg(long, global = true, env = "APPROXCAT_MAX_SUBSPACES")]
    max_subspaces: Option<u128>,
    /// Largest total dimension of a representation searched exhaustively.
    #[arg(long, global = true, env = "APPROXCAT_MAX_TOTAL_DIM")]
    max_total_dim: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Ws {
    /// Workspace file; repeat to merge several over the same quiver.
    #[arg(long = "workspace", short = 'w', required = true)]
    files: Vec<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Basis of Hom(FROM, TO).
    Hom {
        #[command(flatten)]
        ws: Ws,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Basis of Ext^1(FROM, TO), as cocycles.
    Ext1 {
        #[command(flatten)]
        ws: Ws,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Left approximation of a representation into a handle.
    ApproxLeft {
        #[command(flatten)]
        ws: Ws,
        #[arg(long)]
        of: String,
        #[arg(long)]
        into: String,
        /// Drop redundant summands (add(S) handles only).
        #[arg(long)]
        minimal: bool,
    },
    /// Right approximation of a representation by an add(S) handle.
    ApproxRight {
        #[command(flatten)]
        ws: Ws,
        #[arg(long)]
        of: String,
        #[arg(long)]
        by: String,
        #[arg(long)]
        minimal: bool,
    },
    /// Left approximation into X * Y by the pushout construction.
    Gt {
        #[command(flatten)]
        ws: Ws,
        #[arg(long)]
        of: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// Treat Y as closed under subobjects instead of using projective covers.
        #[arg(long)]
        subobject_closed: bool,
    },
    /// Membership in add(S), as a direct sum or a summand.
    MemberAdd {
        #[command(flatten)]
        ws: Ws,
        #[arg(long)]
        of: String,
        #[arg(long = "in")]
        handle: String,
    },
    /// Membership in X * Y.
    MemberExt {
        #[command(flatten)]
        ws: Ws,
        #[arg(long)]
        of: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// A filtration of bounded length with factors that are sums of generators.
    MemberFilt {
        #[command(flatten)]
        ws: Ws,
        #[arg(long)]
        of: String,
        #[arg(long = "in")]
        handle: String,
        #[arg(long)]
        length: usize,
    },
    /// Swap two adjacent factors of a filtration certificate.
    Exchange {
        /// Filtration certificate file.
        #[arg(long)]
        certificate: PathBuf,
        /// Lower of the two factors, counting from 0 at the bottom.
        #[arg(long)]
        at: usize,
    },
    /// Rearrange a filtration certificate by an ordered family.
    Normalize {
        #[arg(long)]
        certificate: PathBuf,
        /// Workspace holding the family; defaults to the certificate's generators.
        #[arg(long = "workspace", short = 'w')]
        files: Vec<PathBuf>,
        #[arg(long)]
        family: Option<String>,
    },
    /// Show that morphisms out of S2 are not left approximations on a
    /// truncated loop quiver.
    Refute {
        #[command(flatten)]
        ws: Ws,
        /// Target of the candidate; must lie in add{S1} * add{M}.
        #[arg(long)]
        of: String,
        /// Candidate components as JSON, one matrix per vertex; defaults to
        /// every morphism from S2.
        #[arg(long)]
        candidate: Option<String>,
    },
    /// Run a scripted end-to-end check.
    Scenario {
        #[arg(value_parser = scenario::SCENARIOS)]
        name: String,
    },
    /// Re-check a certificate or report document.
    Verify { file: PathBuf },
}

/// A finished command: report, summary line, and whether it found what was
/// asked for.
struct Outcome {
    report: Value,
    summary: String,
    found: bool,
}

impl Outcome {
    fn found(report: Value, summary: impl Into<String>) -> Outcome {
        Outcome {
            report,
            summary: summary.into(),
            found: true,
        }
    }

    fn absent(report: Value, summary: impl Into<String>) -> Outcome {
        Outcome {
            report,
            summary: summary.into(),
            found: false,
        }
    }
}

/// Reads a certificate file. A report printed by this tool is accepted in
/// place of the bare certificate it carries.
fn read_json(path: &PathBuf) -> Result<Value, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let mut v: Value = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("{} is not JSON: {e}", path.display())))?;
    if v.get("kind").is_none() && v.get("command").is_some() {
        if let Some(inner) = v.get_mut("certificate") {
            return Ok(inner.take());
        }
    }
    Ok(v)
}

fn approx_outcome(cert: &ApproxCertificate) -> Outcome {
    let summary = format!(
        "{} approximation {:?} -> {:?}",
        cert.side.as_str(),
        cert.approximation.source().dims(),
        cert.approximation.target().dims()
    );
    Outcome::found(
        json!({ "approximant_dims": cert.approximant().dims(), "certificate": cert.to_document() }),
        summary,
    )
}

fn membership_outcome(
    ws: &Workspace,
    of: &str,
    handle: approxcat::approx::SubcatHandle,
    found: Option<Membership>,
) -> Result<Outcome, Error> {
    let m = ws.rep(of)?;
    Ok(match found {
        Some(ev) => Outcome::found(
            json!({ "member": true, "certificate": membership_document(m, &handle, &ev) }),
            format!("{of} is a member"),
        ),
        None => Outcome::absent(json!({ "member": false }), format!("{of} is not a member")),
    })
}

fn filtration_outcome(c: &FiltrationCertificate) -> Outcome {
    let dims: Vec<Vec<usize>> = c
        .filtration
        .factors()
        .iter()
        .map(|f| f.dims().to_vec())
        .collect();
    Outcome::found(
        json!({ "depth": c.depth(), "factor_dims": dims, "certificate": c.to_document() }),
        format!("filtration with {} factors {:?}", c.depth(), dims),
    )
}

fn run(cmd: Command, budget: &Budget) -> Result<Outcome, Error> {
    match cmd {
        Command::Hom { ws, from, to } => {
            let ws = Workspace::load(&ws.files)?;
            let basis = hom_basis(ws.rep(&from)?, ws.rep(&to)?)?;
            Ok(Outcome::found(
                json!({
                    "dimension": basis.len(),
                    "basis": basis.iter().map(RepMorphism::to_json_components).collect::<Vec<_>>(),
                }),
                format!("dim Hom({from}, {to}) = {}", basis.len()),
            ))
        }
        Command::Ext1 { ws, from, to } => {
            let ws = Workspace::load(&ws.files)?;
            let basis = ext1_basis(ws.rep(&from)?, ws.rep(&to)?)?;
            let cocycles: Vec<Value> = basis
                .iter()
                .map(|c| Value::Array(c.components.iter().map(|m| m.to_json()).collect()))
                .collect();
            Ok(Outcome::found(
                json!({ "dimension": basis.len(), "basis": cocycles }),
                format!("dim Ext^1({from}, {to}) = {}", basis.len()),
            ))
        }
        Command::ApproxLeft {
            ws,
            of,
            into,
            minimal,
        } => {
            let ws = Workspace::load(&ws.files)?;
            let mut cert = left_approx(ws.rep(&of)?, ws.handle(&into)?)?;
            if minimal {
                cert = minimize_approx(&cert)?;
            }
            cert.verify()?;
            Ok(approx_outcome(&cert))
        }
        Command::ApproxRight {
            ws,
            of,
            by,
            minimal,
        } => {
            let ws = Workspace::load(&ws.files)?;
            let mut cert = right_approx_add(ws.rep(&of)?, ws.add_handle(&by)?)?;
            if minimal {
                cert = minimize_approx(&cert)?;
            }
            cert.verify()?;
            Ok(approx_outcome(&cert))
        }
        Command::Gt {
            ws,
            of,
            x,
            y,
            subobject_closed,
        } => {
            let ws = Workspace::load(&ws.files)?;
            let (m, x, y) = (ws.rep(&of)?, ws.handle(&x)?, ws.handle(&y)?);
            let gt = if subobject_closed {
                gt_left_approx_subobject_closed(m, x, y, budget)?
            } else {
                gt_left_approx(m, x, y)?
            };
            gt.certificate.verify()?;
            let mut out = approx_outcome(&gt.certificate);
            out.report["steps"] = json!({
                "y_approximant_dims": gt.y_approx.approximant().dims(),
                "cover_dims": gt.cover.source().dims(),
                "kernel_dims": gt.kernel.source().dims(),
                "x_approximant_dims": gt.x_approx.approximant().dims(),
            });
            Ok(out)
        }
        Command::MemberAdd { ws, of, handle } => {
            let ws = Workspace::load(&ws.files)?;
            let s = ws.add_handle(&handle)?;
            let found = member_add(ws.rep(&of)?, s)?.map(Membership::Add);
            membership_outcome(&ws, &of, s.clone().into(), found)
        }
        Command::MemberExt { ws, of, x, y } => {
            let ws = Workspace::load(&ws.files)?;
            let (hx, hy) = (ws.handle(&x)?.clone(), ws.handle(&y)?.clone());
            let found = member_ext(ws.rep(&of)?, &hx, &hy, budget)?;
            membership_outcome(
                &ws,
                &of,
                approxcat::approx::SubcatHandle::ext(hx, hy),
                found,
            )
        }
        Command::MemberFilt {
            ws,
            of,
            handle,
            length,
        } => {
            let ws = Workspace::load(&ws.files)?;
            match member_filt(ws.rep(&of)?, ws.add_handle(&handle)?, length, budget)? {
                Some(c) => {
                    c.verify()?;
                    Ok(filtration_outcome(&c))
                }
                None => Ok(Outcome::absent(
                    json!({ "member": false }),
                    format!("{of} has no such filtration of length {length}"),
                )),
            }
        }
        Command::Exchange { certificate, at } => {
            let cert = FiltrationCertificate::from_document(&read_json(&certificate)?)?;
            cert.verify()?;
            let swapped = filt_exchange(&cert.filtration, at)?;
            let chain = &swapped.inclusions_into_top()[1..];
            let out = FiltrationCertificate::from_chain(cert.top(), chain, &cert.generators)?;
            out.verify()?;
            Ok(filtration_outcome(&out))
        }
        Command::Normalize {
            certificate,
            files,
            family,
        } => {
            let cert = FiltrationCertificate::from_document(&read_json(&certificate)?)?;
            cert.verify()?;
            let fam = match family {
                Some(name) => {
                    let ws = Workspace::load(&files)?;
                    ws.add_handle(&name)?.rebase(cert.top().quiver())?
                }
                None => cert.generators.clone(),
            };
            let out = filt_normalize(&cert, &fam)?;
            out.verify()?;
            Ok(filtration_outcome(&out))
        }
        Command::Refute { ws, of, candidate } => {
            let ws = Workspace::load(&ws.files)?;
            let cfg = LoopQuiverConfig::detect(&ws.quiver, ws.field)?;
            let v = ws.rep(&of)?;
            let Some(ev) = member(v, &cfg.z_handle(), budget)? else {
                return Err(Error::InvalidInput(format!(
                    "{of} does not lie in add{{S1}} * add{{M}}"
                )));
            };
            let candidates = match candidate {
                Some(text) => {
                    let comps: Value = serde_json::from_str(&text)
                        .map_err(|e| Error::InvalidInput(format!("candidate is not JSON: {e}")))?;
                    let s2 = build_standard(&cfg).s2;
                    vec![RepMorphism::from_json_components(&comps, &s2, v)?]
                }
                None => all_candidates(&cfg, v)?,
            };
            let witnesses = candidates
                .iter()
                .map(|phi| refute(phi, &ev, &cfg))
                .collect::<Result<Vec<_>, _>>()?;
            let escalated = witnesses.iter().any(|w| w.escalated);
            Ok(Outcome::absent(
                json!({
                    "refuted": witnesses.len(),
                    "escalated": escalated,
                    "witnesses": witnesses.iter().map(|w| w.to_document()).collect::<Vec<_>>(),
                }),
                format!(
                    "{} candidate(s) refuted: none is a left approximation{}",
                    witnesses.len(),
                    if escalated {
                        " (after adding one loop)"
                    } else {
                        ""
                    }
                ),
            ))
        }
        Command::Scenario { name } => {
            let r = scenario::run(&name, budget)?;
            let summary = r.transcript.join("\n");
            let report = r.to_document();
            Ok(if r.passed {
                Outcome::found(report, format!("{summary}\nscenario {name}: pass"))
            } else {
                Outcome::absent(report, format!("{summary}\nscenario {name}: FAIL"))
            })
        }
        Command::Verify { file } => {
            let doc = read_json(&file)?;
            match verify_document(&doc) {
                Ok(msg) => Ok(Outcome::found(json!({ "valid": true, "detail": msg }), msg)),
                Err(Error::CertificateInvalid(msg)) => Ok(Outcome::absent(
                    json!({ "valid": false, "detail": msg }),
                    format!("certificate rejected: {msg}"),
                )),
                Err(e) => Err(e),
            }
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Hom { .. } => "hom",
        Command::Ext1 { .. } => "ext1",
        Command::ApproxLeft { .. } => "approx-left",
        Command::ApproxRight { .. } => "approx-right",
        Command::Gt { .. } => "gt",
        Command::MemberAdd { .. } => "member-add",
        Command::MemberExt { .. } => "member-ext",
        Command::MemberFilt { .. } => "member-filt",
        Command::Exchange { .. } => "exchange",
        Command::Normalize { .. } => "normalize",
        Command::Refute { .. } => "refute",
        Command::Scenario { .. } => "scenario",
        Command::Verify { .. } => "verify",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut budget = Budget::default();
    if let Some(n) = cli.max_subspaces {
        budget.max_subspaces = n;
    }
    if let Some(n) = cli.max_total_dim {
        budget.max_total_dim = n;
    }
    let name = command_name(&cli.command);
    let (mut report, summary, code) = match run(cli.command, &budget) {
        Ok(o) => {
            let code = if o.found { 0 } else { 1 };
            (o.report, o.summary, code)
        }
        Err(e) => {
            let code = if e.is_input_error() { 2 } else { 3 };
            (
                json!({ "error": { "code": e.code(), "message": e.to_string() } }),
                format!("error {}: {e}", e.code()),
                code,
            )
        }
    };
    report["format"] = json!(1);
    report["command"] = json!(name);
    report["exit_code"] = json!(code);
    if !cli.json_only {
        eprintln!("{summary}");
    }
    let text = serde_json::to_string_pretty(&report).expect("serializable");
    // a closed pipe downstream is not our failure
    let _ = writeln!(std::io::stdout(), "{text}");
    ExitCode::from(code)
}
