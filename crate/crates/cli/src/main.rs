use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use hallbounds::{run, CliError, CliResult, Command, Settings};

/// Bounds on the effective Hall coefficient of two-phase composites.
///
/// Exit status: 0 all bounds hold (or nothing to check), 1 a bound is
/// violated, 2 input error, 3 pole or degeneracy.
#[derive(Debug, Parser)]
#[command(name = "hallbounds", version)]
struct Args {
    command: Command,

    /// Tolerance applied to every residual.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,

    /// Polar quadrature order for gamma-check.
    #[arg(long)]
    quad_order: Option<usize>,

    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Job file; `-` or nothing reads standard input.
    #[arg(default_value = "-")]
    job: String,
}

fn read_job(path: &str) -> CliResult<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {path}: {e}")))
    }
}

// Write to a sibling temporary file and rename, so readers never see a partial report.
fn write_atomic(path: &Path, text: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let settings = Settings { tol: args.tol, quad_order: args.quad_order };
    let outcome = read_job(&args.job).and_then(|text| run(args.command, &text, &settings)).and_then(|out| {
        match &args.out {
            Some(p) => write_atomic(p, &out.text)?,
            None => io::stdout().write_all(out.text.as_bytes())?,
        }
        Ok(out.exit_code)
    });
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("hallbounds: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
