//! Command-line entry point: algebra checks, operator identities, exact
//! spectra and free-fermion data exports.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or guard error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use starkondo::exact_diag;
use starkondo::free_fermion::{
    bdg_spectrum, build_a, dispersion_csv, dispersion_table, ground_energy, many_body_spectrum,
    secular_roots, DEFAULT_MODE_GUARD,
};
use starkondo::hamiltonians::{
    build_kondo_fermionic, build_kondo_spin1, build_qf_spin, build_xx_spin, operator_equal,
    QFParams, XXParams,
};
use starkondo::jw::{
    spiral_quadraticity_probe, verify_car, verify_eta_relations, FamilyKind, FermionFamily,
};
use starkondo::spectrum::{spectra_match, Spectrum};
use starkondo::{Error, OperatorSum, StarLayout};

const ALGEBRA_MAX_L: usize = 5;
const KONDO_MAX_L: usize = 3;
const SPECTRUM_MAX_QUBITS: usize = 13;
const COMPARE_MAX_L: usize = 4;

#[derive(Parser, Debug)]
#[command(
    name = "starkondo",
    version,
    about = "Spin models on the three-leg star graph"
)]
struct Cli {
    /// Override the command's comparison tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Lift the size guards.
    #[arg(long, global = true)]
    force: bool,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write the primary output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    Klein,
    Aux,
    Naive,
    Spiral,
}

impl From<Family> for FamilyKind {
    fn from(f: Family) -> Self {
        match f {
            Family::Klein => FamilyKind::Klein,
            Family::Aux => FamilyKind::Aux,
            Family::Naive => FamilyKind::Naive,
            Family::Spiral => FamilyKind::Spiral,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Model {
    Xx,
    Qf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FreeFermionAction {
    Roots,
    Dispersion,
    Compare,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the anticommutation and Klein-factor relations of a JW family.
    VerifyAlgebra {
        #[arg(long = "L")]
        leg_length: usize,
        #[arg(long, value_enum, default_value_t = Family::Klein)]
        family: Family,
    },
    /// Compare the Kondo-form fermion Hamiltonian with the XX spin model.
    VerifyKondo {
        #[arg(long = "L")]
        leg_length: usize,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        rho: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        rho_im: f64,
        #[arg(long)]
        dump_operator: Option<PathBuf>,
    },
    /// Exact spectrum of a spin model.
    Spectrum(SpectrumArgs),
    /// Secular roots, dispersion data, or the free-fermion vs ED comparison.
    Freefermion {
        #[arg(value_enum)]
        action: FreeFermionAction,
        #[arg(long = "L")]
        leg_length: usize,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        a: f64,
    },
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long, value_enum)]
    model: Model,
    #[arg(long = "L")]
    leg_length: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    rho: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    rho_im: f64,
    /// Uniform vertex hopping; overridden by --a-vec.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    a_vec: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    gamma: f64,
    /// Uniform vertex pairing; overridden by --b-vec.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    b: f64,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    b_vec: Option<Vec<f64>>,
    /// Also check that the auxiliary site doubles every degeneracy.
    #[arg(long)]
    check_doubling: bool,
    #[arg(long)]
    dump_operator: Option<PathBuf>,
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::GuardExceeded { .. }
            | Error::InvalidArgument(_)
            | Error::InvalidSite(_)
            | Error::TooManySites { .. }
            | Error::LayoutMismatch(_) => Failure::Usage(e.to_string()),
            other => Failure::Verification(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Ctx {
    tol: Option<f64>,
    force: bool,
    format: Format,
    out: Option<PathBuf>,
}

impl Ctx {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn guard(&self, what: &str, requested: usize, limit: usize) -> Result<(), Failure> {
        if requested > limit && !self.force {
            return Err(Failure::Usage(format!(
                "{what} {requested} exceeds the limit {limit} (use --force to override)"
            )));
        }
        Ok(())
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.out {
            Some(path) => fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn dump(path: &Option<PathBuf>, op: &OperatorSum) -> Result<(), Failure> {
    if let Some(path) = path {
        fs::write(path, op.to_text())?;
    }
    Ok(())
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn verify_algebra(ctx: &Ctx, leg_length: usize, family: Family) -> Result<bool, Failure> {
    ctx.guard("leg length", leg_length, ALGEBRA_MAX_L)?;
    let kind = FamilyKind::from(family);
    let fam = FermionFamily::new(kind, leg_length)?;
    let mut reports = vec![verify_car(&fam)?];
    reports.push(verify_eta_relations(&StarLayout::new(leg_length, true)?)?);
    if kind == FamilyKind::Spiral && leg_length >= 2 {
        reports.push(spiral_quadraticity_probe(leg_length)?);
    }
    let ok = reports.iter().all(|r| r.all_as_expected());
    let doc = json!({
        "schema": 1,
        "command": "verify-algebra",
        "family": kind.name(),
        "L": leg_length,
        "all_as_expected": ok,
        "reports": reports,
    });
    ctx.emit(&pretty(&doc))?;
    Ok(ok)
}

fn verify_kondo(
    ctx: &Ctx,
    leg_length: usize,
    rho: Complex64,
    dump_path: &Option<PathBuf>,
) -> Result<bool, Failure> {
    ctx.guard("leg length", leg_length, KONDO_MAX_L)?;
    let tol = ctx.tol(1e-12);
    let p = XXParams::new(leg_length, rho);
    let spin = build_xx_spin(&p, true)?;
    let fermi = build_kondo_fermionic(&p)?;
    dump(dump_path, &fermi)?;
    let eq = operator_equal(&spin, &fermi, tol)?;
    let mut ok = eq.equal;
    let spin1 = if rho.im == 0.0 {
        let e = operator_equal(&build_kondo_spin1(leg_length, rho.re)?, &fermi, tol)?;
        ok &= e.equal;
        Some(e)
    } else {
        None
    };
    let text = match ctx.format {
        Format::Json => pretty(&json!({
            "schema": 1,
            "command": "verify-kondo",
            "L": leg_length,
            "rho": [rho.re, rho.im],
            "tolerance": tol,
            "kondo_vs_xx": eq,
            "spin1_vs_kondo": spin1,
            "pass": ok,
        })),
        Format::Csv => {
            let mut s = String::from("check,max_residual,pass\n");
            s.push_str(&format!(
                "kondo_vs_xx,{:.16e},{}\n",
                eq.max_residual, eq.equal
            ));
            if let Some(e) = spin1 {
                s.push_str(&format!(
                    "spin1_vs_kondo,{:.16e},{}\n",
                    e.max_residual, e.equal
                ));
            }
            s
        }
    };
    ctx.emit(&text)?;
    Ok(ok)
}

fn triple(uniform: f64, explicit: &Option<Vec<f64>>) -> Result<[Complex64; 3], Failure> {
    match explicit.as_deref() {
        Some(&[x, y, z]) => Ok([x, y, z].map(|v| Complex64::new(v, 0.0))),
        Some(v) => Err(Failure::Usage(format!(
            "expected three comma-separated values, got {}",
            v.len()
        ))),
        None => Ok([Complex64::new(uniform, 0.0); 3]),
    }
}

fn spectrum_output(ctx: &Ctx, s: &Spectrum, extra: serde_json::Value) -> String {
    match ctx.format {
        Format::Csv => s.to_csv("eigenvalue"),
        Format::Json => pretty(&json!({
            "schema": 1,
            "command": "spectrum",
            "eigenvalues": s.values(),
            "checks": extra,
        })),
    }
}

fn spectrum(ctx: &Ctx, args: &SpectrumArgs) -> Result<bool, Failure> {
    let l = args.leg_length;
    let tol = ctx.tol(starkondo::spectrum::DEFAULT_TOL);
    let (op, reference, label) = match args.model {
        Model::Xx => {
            let with_aux = args.check_doubling;
            ctx.guard("qubits", 3 * l + usize::from(with_aux), SPECTRUM_MAX_QUBITS)?;
            let p = XXParams::new(l, Complex64::new(args.rho, args.rho_im));
            let reference = if with_aux {
                Some(exact_diag::spectrum(&build_xx_spin(&p, false)?)?)
            } else {
                None
            };
            (
                build_xx_spin(&p, with_aux)?,
                reference,
                "xx without auxiliary site",
            )
        }
        Model::Qf => {
            ctx.guard("qubits", 3 * l + 1, SPECTRUM_MAX_QUBITS)?;
            let p = QFParams {
                leg_length: l,
                gamma: args.gamma,
                a: triple(args.a, &args.a_vec)?,
                b: triple(args.b, &args.b_vec)?,
            };
            let reference = if args.check_doubling {
                Some(bdg_spectrum(&p, DEFAULT_MODE_GUARD.max(3 * l))?.spectrum)
            } else {
                None
            };
            (build_qf_spin(&p)?, reference, "free-fermion spectrum")
        }
    };
    dump(&args.dump_operator, &op)?;
    let s = exact_diag::spectrum(&op)?;
    let mut ok = true;
    let mut checks = serde_json::Value::Null;
    if let Some(reference) = reference {
        let m = spectra_match(&reference, &s, 2, tol)?;
        ok = m.matched;
        eprintln!(
            "doubling check against {label}: max_dev {:.3e} ({})",
            m.max_dev,
            if m.matched { "match" } else { "MISMATCH" }
        );
        checks = json!({ "doubling": m, "reference": label });
    }
    ctx.emit(&spectrum_output(ctx, &s, checks))?;
    Ok(ok)
}

fn freefermion(
    ctx: &Ctx,
    action: FreeFermionAction,
    leg_length: usize,
    a: f64,
) -> Result<bool, Failure> {
    match action {
        FreeFermionAction::Roots => {
            let tol = ctx.tol(1e-10);
            let modes = secular_roots(leg_length, a)?;
            let eig = build_a(leg_length, a)?.eigenvalues()?;
            let dev = modes
                .lambdas()
                .iter()
                .zip(eig.values())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            let isolated = modes.isolated().len();
            eprintln!(
                "{} roots, {isolated} out of band, eig(A) max_dev {dev:.3e}",
                modes.roots.len()
            );
            let text = match ctx.format {
                Format::Csv => dispersion_csv(&modes.roots),
                Format::Json => pretty(&json!({
                    "schema": 1,
                    "command": "freefermion roots",
                    "L": leg_length,
                    "a": a,
                    "roots": modes.roots,
                    "eig_max_dev": dev,
                    "out_of_band": isolated,
                    "ground_energy": ground_energy(&modes),
                })),
            };
            ctx.emit(&text)?;
            Ok(dev <= tol)
        }
        FreeFermionAction::Dispersion => {
            let rows = dispersion_table(leg_length, a)?;
            let text = match ctx.format {
                Format::Csv => dispersion_csv(&rows),
                Format::Json => pretty(&json!({ "schema": 1, "rows": rows })),
            };
            ctx.emit(&text)?;
            Ok(true)
        }
        FreeFermionAction::Compare => {
            ctx.guard("leg length", leg_length, COMPARE_MAX_L)?;
            let tol = ctx.tol(starkondo::spectrum::DEFAULT_TOL);
            let modes = secular_roots(leg_length, a)?;
            let free = many_body_spectrum(&modes, DEFAULT_MODE_GUARD.max(3 * leg_length))?;
            let spin = build_qf_spin(&QFParams::uniform_hopping(leg_length, a))?;
            let ed = exact_diag::spectrum(&spin)?;
            let m = spectra_match(&free, &ed, 2, tol)?;
            let text = match ctx.format {
                Format::Csv => format!(
                    "L,a,states,max_dev,match,ground_energy\n{leg_length},{a:.16e},{},{:.16e},{},{:.16e}\n",
                    ed.len(),
                    m.max_dev,
                    m.matched,
                    ground_energy(&modes)
                ),
                Format::Json => pretty(&json!({
                    "schema": 1,
                    "command": "freefermion compare",
                    "L": leg_length,
                    "a": a,
                    "states": ed.len(),
                    "comparison": m,
                    "ground_energy": ground_energy(&modes),
                })),
            };
            ctx.emit(&text)?;
            Ok(m.matched)
        }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let ctx = Ctx {
        tol: cli.tol,
        force: cli.force,
        format: cli.format,
        out: cli.out,
    };
    match cli.command {
        Command::VerifyAlgebra { leg_length, family } => verify_algebra(&ctx, leg_length, family),
        Command::VerifyKondo {
            leg_length,
            rho,
            rho_im,
            dump_operator,
        } => verify_kondo(
            &ctx,
            leg_length,
            Complex64::new(rho, rho_im),
            &dump_operator,
        ),
        Command::Spectrum(args) => spectrum(&ctx, &args),
        Command::Freefermion {
            action,
            leg_length,
            a,
        } => freefermion(&ctx, action, leg_length, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Verification(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(force: bool) -> Ctx {
        Ctx {
            tol: None,
            force,
            format: Format::Csv,
            out: None,
        }
    }

    #[test]
    fn triples() {
        assert_eq!(triple(0.5, &None).unwrap(), [Complex64::new(0.5, 0.0); 3]);
        let t = triple(0.0, &Some(vec![1.0, -2.0, 3.0])).unwrap();
        assert_eq!(t[1], Complex64::new(-2.0, 0.0));
        assert!(matches!(
            triple(0.0, &Some(vec![1.0])),
            Err(Failure::Usage(_))
        ));
    }

    #[test]
    fn guards_respect_force() {
        assert!(ctx(false).guard("L", 6, 5).is_err());
        assert!(ctx(true).guard("L", 6, 5).is_ok());
        assert!(ctx(false).guard("L", 5, 5).is_ok());
    }

    #[test]
    fn library_errors_map_to_exit_classes() {
        let guard = Error::GuardExceeded {
            what: "x",
            requested: 2,
            limit: 1,
        };
        assert!(matches!(Failure::from(guard), Failure::Usage(_)));
        assert!(matches!(
            Failure::from(Error::NotHermitian { deviation: 1.0 }),
            Failure::Verification(_)
        ));
    }

    #[test]
    fn arguments_parse() {
        let cli = Cli::try_parse_from([
            "starkondo",
            "--tol",
            "1e-6",
            "freefermion",
            "roots",
            "--L",
            "3",
            "--a",
            "-0.5",
        ])
        .unwrap();
        assert_eq!(cli.tol, Some(1e-6));
        assert!(matches!(
            cli.command,
            Command::Freefermion { action: FreeFermionAction::Roots, leg_length: 3, a } if a == -0.5
        ));
    }
}
