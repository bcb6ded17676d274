mod config;
mod error;
mod render;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use morse_core::exec::Execution;
use morse_core::indexform::{self, galerkin_crossing_params};
use morse_core::jacobi;
use morse_core::suite::{self, SuiteParams};
use serde_json::json;

use config::{Cli, Command, Format, RunArgs};
use error::CliError;
use render::Report;

fn conjugate(args: &RunArgs) -> Result<Report, CliError> {
    let input = args.input()?;
    let sol = jacobi::solve_jacobi(&input.profile, input.steps)?;
    let conj = jacobi::conjugate_points(&sol, args.tol_kernel)?;
    let trace = sol.trace()?;
    Ok(render::conjugate(&input, args.settings(input.steps), &sol, &conj, &trace))
}

fn index(args: &RunArgs) -> Result<Report, CliError> {
    let input = args.input()?;
    let basis = args.basis(input.profile.dim());
    let matrix = indexform::assemble(&input.profile, 1.0, &basis)?;
    let mu = morse_core::spectral::morse_index(&matrix, args.tol_zero)?;
    Ok(render::index(&input, args.settings(input.steps), &basis, mu, &matrix.eigenvalues()))
}

fn crossings(args: &RunArgs) -> Result<Report, CliError> {
    let input = args.input()?;
    let basis = args.basis(input.profile.dim());
    let crossings = indexform::galerkin_crossings(&input.profile, &basis, &galerkin_crossing_params(Execution::default()))?;
    let sol = jacobi::solve_jacobi(&input.profile, input.steps)?;
    let conj = jacobi::conjugate_points(&sol, args.tol_kernel)?;
    let identification = indexform::identify(&crossings, &conj, 1e-6);
    let assembler = indexform::Assembler::new(basis);
    let trajectories = (0..=render::TRAJECTORY_SAMPLES)
        .map(|k| {
            let lambda = k as f64 / render::TRAJECTORY_SAMPLES as f64;
            assembler.assemble(&input.profile, lambda).map(|g| (lambda, g.eigenvalues()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(render::crossings(
        &input,
        args.settings(input.steps),
        &crossings,
        &conj,
        &identification,
        &trajectories,
    ))
}

fn verify(args: &RunArgs) -> Result<Report, CliError> {
    if let Some(trials) = args.random {
        let steps = args.steps();
        let params = SuiteParams {
            trials,
            seed: args.seed,
            fiber_dims: args.normal_dim.map_or_else(|| SuiteParams::default().fiber_dims, |n| vec![n]),
            modes: args.modes,
            quad_panels: args.panels,
            verify: args.verify_params(steps),
            ..SuiteParams::default()
        };
        let report = suite::run_suite(&params)?;
        return Ok(render::suite(&params, args.settings(steps), &report));
    }
    let input = args.input()?;
    let basis = args.basis(input.profile.dim());
    let report = indexform::verify_theorem(&input.profile, &basis, &args.verify_params(input.steps))?;
    Ok(render::verify(&input, args.settings(input.steps), &report))
}

fn run(command: &Command) -> Result<Report, CliError> {
    let args = command.args();
    args.validate()?;
    if args.random.is_some() && !matches!(command, Command::Verify(_)) {
        return Err(CliError::config("--random only applies to `verify`"));
    }
    let mut report = match command {
        Command::Conjugate(a) => conjugate(a)?,
        Command::Index(a) => index(a)?,
        Command::Crossings(a) => crossings(a)?,
        Command::Verify(a) => verify(a)?,
    };
    if let Some(obj) = report.json.as_object_mut() {
        let mut head = serde_json::Map::new();
        head.insert("schema".into(), json!(1));
        head.insert("command".into(), json!(command.name()));
        head.append(obj);
        *obj = head;
    }
    Ok(report)
}

fn emit(report: &Report, args: &RunArgs) -> Result<(), CliError> {
    let body = match args.format {
        Format::Text => report.text.clone(),
        Format::Json => render::json_string(&report.json),
        Format::Csv => report.csv.clone(),
    };
    match &args.out {
        Some(path) => std::fs::write(path, body)?,
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.category.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            return fail(&CliError::config(message.trim_end()));
        }
    };
    let report = match run(&cli.command) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    if let Err(e) = emit(&report, cli.command.args()) {
        return fail(&e);
    }
    if report.agree {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
