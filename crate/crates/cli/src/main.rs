//! Command-line front end: validation, cohomology, constructions,
//! deformations, and abelian extensions over JSON system files.
//!
//! Exit codes: 0 pass, 1 semantic failure (an identity or cocycle check
//! fails, or extensions are inequivalent), 2 parse/usage error, 3 resource
//! limit exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use mdlts::cochain::Limits;
use mdlts::cohomology::{cohomology_class_with, cohomology_with, CohomologyOptions};
use mdlts::deformation::{rigidity_report_with, verify_deformation};
use mdlts::extension::{are_equivalent, build_extension, extract};
use mdlts::io::{
    exit_code_for_error, format_rational, matrix_to_strings, pair_to_json, CocycleFile,
    DeformationFile, ExtensionFile, IoError, Report, Status, SystemFile,
};
use mdlts::lts::{
    adjoint_rep, dual_rep, semidirect_product, validate_lts, validate_mdo, validate_rep, Mdlts,
    Representation, ValidationReport,
};
use mdlts::sampling::Sampler;
use mdlts::Error;

#[derive(Parser)]
#[command(name = "mdlts", version, about = "Exact computations for modified differential Lie triple systems")]
struct Cli {
    /// Emit the report as JSON (default).
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Emit the report as aligned text.
    #[arg(long, global = true)]
    text: bool,
    /// Fail instead of falling back to the strengthened cochain space.
    #[arg(long, global = true)]
    strict_space: bool,
    /// Seed for the deterministic property sampler.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the defining identities of the system in a file.
    Validate(FileArg),
    /// Cocycle, coboundary, and cohomology dimensions at an odd degree.
    Cohomology {
        file: PathBuf,
        /// Odd degree (1, 3, 5, ...).
        #[arg(long, default_value_t = 3)]
        level: usize,
    },
    /// Semidirect product of the system with its representation.
    Semidirect(FileArg),
    /// Dual of the representation in the file.
    Dual(FileArg),
    /// One-parameter deformation commands.
    #[command(subcommand)]
    Deform(DeformCommand),
    /// Abelian extension commands.
    #[command(subcommand)]
    Extend(ExtendCommand),
}

#[derive(Args)]
struct FileArg {
    file: PathBuf,
}

#[derive(Subcommand)]
enum DeformCommand {
    /// Verify a truncated deformation order by order.
    Verify {
        file: PathBuf,
        deformation_file: PathBuf,
    },
    /// Certify rigidity through the degree-3 group with adjoint
    /// coefficients.
    Rigidity { file: PathBuf },
}

#[derive(Subcommand)]
enum ExtendCommand {
    /// Build an extension from a degree-3 cocycle file.
    Build { file: PathBuf, cocycle_file: PathBuf },
    /// Decide equivalence of two extensions over the same base file.
    Equiv {
        file: PathBuf,
        ext1: PathBuf,
        ext2: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let as_text = cli.text;
    match run(&cli) {
        Ok((report, code)) => {
            if as_text {
                print!("{}", report.to_text());
            } else {
                println!("{}", report.to_json());
            }
            ExitCode::from(code as u8)
        }
        Err(CliError::Io(e)) => {
            let report = Report::new("error", Status::Error, json!({ "message": e.to_string() }));
            if as_text {
                print!("{}", report.to_text());
            } else {
                println!("{}", report.to_json());
            }
            ExitCode::from(2)
        }
        Err(CliError::Engine(e)) => {
            let report = Report::new("error", Status::Error, json!({ "message": e.to_string() }));
            if as_text {
                print!("{}", report.to_text());
            } else {
                println!("{}", report.to_json());
            }
            ExitCode::from(exit_code_for_error(&e) as u8)
        }
    }
}

enum CliError {
    Io(IoError),
    Engine(Error),
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Io(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Engine(e)
    }
}

fn read_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path)
        .map_err(|e| IoError::Parse(format!("cannot read {}: {e}", path.display())))
}

fn load_system(path: &Path) -> Result<(SystemFile, Mdlts, Option<Representation>), CliError> {
    let text = read_file(path)?;
    let file = SystemFile::parse_str(&text)?;
    let (sys, rep) = file.to_parts()?;
    Ok((file, sys, rep))
}

/// Representation from the file, defaulting to the adjoint one.
fn rep_or_adjoint(sys: &Mdlts, rep: Option<Representation>) -> (Representation, &'static str) {
    match rep {
        Some(r) => (r, "file"),
        None => (adjoint_rep(&sys.lts, &sys.mdo), "adjoint (default)"),
    }
}

fn violations_json(report: &ValidationReport) -> serde_json::Value {
    json!(report
        .violations
        .iter()
        .map(|v| {
            json!({
                "identity": v.identity.to_string(),
                "tuple": v.tuple,
                "lhs": v.lhs.iter().map(format_rational).collect::<Vec<_>>(),
                "rhs": v.rhs.iter().map(format_rational).collect::<Vec<_>>(),
            })
        })
        .collect::<Vec<_>>())
}

fn limits_from(file: &SystemFile) -> Limits {
    Limits {
        max_degree: file.options.max_degree,
        ..Limits::default()
    }
}

fn run(cli: &Cli) -> Result<(Report, i32), CliError> {
    match &cli.command {
        Command::Validate(args) => {
            let (_, sys, rep) = load_system(&args.file)?;
            let mut checks = vec![
                ("triple system", validate_lts(&sys.lts)),
                ("modified differential", validate_mdo(&sys.lts, &sys.mdo)),
            ];
            if let Some(r) = &rep {
                checks.push(("representation", validate_rep(&sys.lts, &sys.mdo, r)));
            }
            let pass = checks.iter().all(|(_, r)| r.is_pass());
            let payload = json!({
                "file": args.file.display().to_string(),
                "checks": checks.iter().map(|(name, r)| json!({
                    "component": name,
                    "pass": r.is_pass(),
                    "violations": violations_json(r),
                })).collect::<Vec<_>>(),
            });
            let status = if pass { Status::Pass } else { Status::Fail };
            Ok((
                Report::new("validate", status, payload),
                i32::from(!pass),
            ))
        }

        Command::Cohomology { file, level } => {
            let (sysfile, sys, rep) = load_system(file)?;
            let (r, rep_source) = rep_or_adjoint(&sys, rep);
            let opts = CohomologyOptions {
                strict: cli.strict_space,
                limits: limits_from(&sysfile),
                space: None,
            };
            let report = match cohomology_with(&sys.lts, &sys.mdo, &r, *level, &opts) {
                Ok(rep) => rep,
                Err(e @ Error::ClosureFailure { .. }) if cli.strict_space => {
                    let payload = json!({
                        "message": format!("closure violated: {e}"),
                        "strict_space": true,
                    });
                    return Ok((Report::new("cohomology", Status::Fail, payload), 1));
                }
                Err(e) => return Err(e.into()),
            };

            // Seeded well-definedness spot check: shifting a representative
            // by sampled coboundaries must not move its class. Degree 1 has
            // no incoming differential, so there is nothing to shift by.
            // The shift cochain is sampled through the constrained bases so
            // it lies in the complex.
            let mut sampler = Sampler::new(cli.seed);
            let mut spot_check = true;
            let level_idx = report.degree.div_ceil(2);
            if level_idx >= 2 {
                if let Some(rep0) = report.representatives.first() {
                    let base_class =
                        cohomology_class_with(&sys.lts, &sys.mdo, &r, &rep0.pair, &opts)?;
                    let lower = level_idx - 1;
                    let bf = mdlts::cochain::cochain_basis(
                        sys.dim(),
                        r.vdim(),
                        2 * lower - 1,
                        report.space,
                        &opts.limits,
                    )?;
                    let bg = if lower >= 2 {
                        Some(mdlts::cochain::cochain_basis(
                            sys.dim(),
                            r.vdim(),
                            2 * lower - 3,
                            report.space,
                            &opts.limits,
                        )?)
                    } else {
                        None
                    };
                    for _ in 0..3 {
                        let f = bf.reconstruct(&sampler.vector(bf.len()));
                        let g = bg.as_ref().map(|b| b.reconstruct(&sampler.vector(b.len())));
                        let xi = mdlts::cochain::CochainPair::new(lower, f, g);
                        let shifted =
                            rep0.pair
                                .add(&mdlts::cochain::partial(&sys.lts, &sys.mdo, &r, &xi));
                        let class = cohomology_class_with(&sys.lts, &sys.mdo, &r, &shifted, &opts)?;
                        spot_check &= class == base_class;
                    }
                }
            }

            let payload = json!({
                "file": file.display().to_string(),
                "level": report.degree,
                "representation": rep_source,
                "space": report.space.to_string(),
                "dim_cochains": report.dim_cochains,
                "dimZ": report.dim_cocycles,
                "dimB": report.dim_coboundaries,
                "dimH": report.dim_cohomology,
                "representatives": report.representatives.iter()
                    .map(|c| pair_to_json(&c.pair)).collect::<Vec<_>>(),
                "class_well_defined_spot_check": {
                    "seed": cli.seed,
                    "samples": 3,
                    "passed": spot_check,
                },
            });
            let status = if spot_check { Status::Pass } else { Status::Fail };
            Ok((Report::new("cohomology", status, payload), i32::from(!spot_check)))
        }

        Command::Semidirect(args) => {
            let (_, sys, rep) = load_system(&args.file)?;
            let (r, rep_source) = rep_or_adjoint(&sys, rep);
            let product = semidirect_product(&sys.lts, &sys.mdo, &r)?;
            let validation = product.validate();
            let pass = validation.is_pass();
            let payload = json!({
                "file": args.file.display().to_string(),
                "representation": rep_source,
                "product": SystemFile::from_parts(&product, None),
                "pass": pass,
                "violations": violations_json(&validation),
            });
            let status = if pass { Status::Pass } else { Status::Fail };
            Ok((Report::new("semidirect", status, payload), i32::from(!pass)))
        }

        Command::Dual(args) => {
            let (_, sys, rep) = load_system(&args.file)?;
            let (r, rep_source) = rep_or_adjoint(&sys, rep);
            let dual = dual_rep(&r);
            let validation = validate_rep(&sys.lts, &sys.mdo, &dual);
            let pass = validation.is_pass();
            let dual_file = SystemFile::from_parts(&sys, Some(&dual));
            let payload = json!({
                "file": args.file.display().to_string(),
                "representation": rep_source,
                "dual": dual_file.representation,
                "pass": pass,
                "violations": violations_json(&validation),
            });
            let status = if pass { Status::Pass } else { Status::Fail };
            Ok((Report::new("dual", status, payload), i32::from(!pass)))
        }

        Command::Deform(DeformCommand::Verify {
            file,
            deformation_file,
        }) => {
            let (_, sys, _) = load_system(file)?;
            let def_text = read_file(deformation_file)?;
            let def = DeformationFile::parse_str(&def_text)?.to_deformation(&sys)?;
            let report = verify_deformation(&sys, &def)?;
            let pass = report.is_pass();
            let payload = json!({
                "file": file.display().to_string(),
                "deformation": deformation_file.display().to_string(),
                "order": def.order(),
                "orders": report.orders.iter().map(|o| json!({
                    "order": o.order,
                    "pass": o.violations.is_empty(),
                    "violations": o.violations.iter().map(|v| json!({
                        "identity": v.identity.to_string(),
                        "tuple": v.tuple,
                    })).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            });
            let status = if pass { Status::Pass } else { Status::Fail };
            Ok((Report::new("deform verify", status, payload), i32::from(!pass)))
        }

        Command::Deform(DeformCommand::Rigidity { file }) => {
            let (sysfile, sys, _) = load_system(file)?;
            let opts = CohomologyOptions {
                strict: cli.strict_space,
                limits: limits_from(&sysfile),
                space: None,
            };
            let report = rigidity_report_with(&sys, &opts)?;
            let payload = json!({
                "file": file.display().to_string(),
                "dimH3": report.dim_h3,
                "rigid_certified": report.rigid_certified,
                "candidate_cocycle": report.candidate.as_ref().map(pair_to_json),
            });
            Ok((Report::new("deform rigidity", Status::Pass, payload), 0))
        }

        Command::Extend(ExtendCommand::Build { file, cocycle_file }) => {
            let (_, sys, rep) = load_system(file)?;
            let (r, rep_source) = rep_or_adjoint(&sys, rep);
            let ctext = read_file(cocycle_file)?;
            let cocycle = CocycleFile::parse_str(&ctext)?.to_cocycle(sys.dim(), r.vdim())?;
            match build_extension(&sys.lts, &sys.mdo, &r, &cocycle) {
                Ok(ext) => {
                    let payload = json!({
                        "file": file.display().to_string(),
                        "cocycle": cocycle_file.display().to_string(),
                        "representation": rep_source,
                        "extension": ExtensionFile::from_extension(&ext),
                    });
                    Ok((Report::new("extend build", Status::Pass, payload), 0))
                }
                Err(Error::NotACocycle { residual }) => {
                    let payload = json!({
                        "file": file.display().to_string(),
                        "cocycle": cocycle_file.display().to_string(),
                        "message": "rejected: the pair is not a degree-3 cocycle",
                        "residual": residual,
                    });
                    Ok((Report::new("extend build", Status::Fail, payload), 1))
                }
                Err(e) => Err(e.into()),
            }
        }

        Command::Extend(ExtendCommand::Equiv { file, ext1, ext2 }) => {
            let (_, sys, _) = load_system(file)?;
            let e1 = ExtensionFile::parse_str(&read_file(ext1)?)?.to_extension(&sys)?;
            let e2 = ExtensionFile::parse_str(&read_file(ext2)?)?.to_extension(&sys)?;
            // Surface invariant violations as semantic failures.
            e1.validate()?;
            e2.validate()?;
            let (_, c1) = extract(&e1)?;
            let (_, c2) = extract(&e2)?;
            let eq = are_equivalent(&e1, &e2)?;
            let payload = json!({
                "file": file.display().to_string(),
                "ext1": ext1.display().to_string(),
                "ext2": ext2.display().to_string(),
                "cocycle1": { "varsigma_zero": c1.varsigma.is_zero() },
                "cocycle2": { "varsigma_zero": c2.varsigma.is_zero() },
                "equivalent": eq.equivalent,
                "witness": eq.witness.as_ref().map(matrix_to_strings),
            });
            let status = if eq.equivalent { Status::Pass } else { Status::Fail };
            Ok((
                Report::new("extend equiv", status, payload),
                i32::from(!eq.equivalent),
            ))
        }
    }
}
