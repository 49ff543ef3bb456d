mod args;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use ssns_core::fields::{level_set_points, sample_grid, LevelSetOptions};
use ssns_core::io::{write_field_csv, write_level_set_csv, write_profile_csv};
use ssns_core::precision::format_sci;
use ssns_core::reduction::complete_profiles;
use ssns_core::verify::suite::{run_suite, CheckFilter, SuiteOptions};
use ssns_core::{kummer_m, kummer_u, kummer_u_deriv_n, whittaker_w, Error, KummerArgs, Result};

use args::{parse_grid, Cli, Command, EvalArgs, FieldArgs, KummerFn, LevelSetArgs, ProfileArgs, VerifyArgs};

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERIC: u8 = 2;
const EXIT_CHECKS: u8 = 3;

fn with_output<F>(path: Option<&Path>, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = PipeWriter { inner: BufWriter::new(io::stdout().lock()), closed: false };
            let r = f(&mut w).and_then(|_| w.flush().map_err(Error::from));
            if !w.closed {
                r?;
            }
        }
    }
    Ok(())
}

/// Stdout that treats a closed reader (`ssns ... | head`) as a normal end.
struct PipeWriter<W: Write> {
    inner: W,
    closed: bool,
}

impl<W: Write> PipeWriter<W> {
    fn note(&mut self, r: io::Result<usize>) -> io::Result<usize> {
        if matches!(&r, Err(e) if e.kind() == io::ErrorKind::BrokenPipe) {
            self.closed = true;
        }
        r
    }
}

impl<W: Write> Write for PipeWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let r = self.inner.write(buf);
        self.note(r)
    }

    fn flush(&mut self) -> io::Result<()> {
        let r = self.inner.flush().map(|_| 0);
        self.note(r).map(|_| ())
    }
}

fn eval_kummer(a: &EvalArgs) -> Result<()> {
    let prec = a.precision.config()?;
    let x = prec.parse(&a.a)?;
    let y = prec.parse(&a.b)?;
    let z = prec.parse(&a.z)?;
    let value = match a.function {
        KummerFn::W => whittaker_w(&x, &y, &z, &prec)?,
        f => {
            let args = KummerArgs::new(x, y, z);
            match f {
                KummerFn::M => kummer_m(&args, &prec)?,
                KummerFn::U => kummer_u(&args, &prec)?,
                KummerFn::DU => kummer_u_deriv_n(&args, 1, &prec)?,
                _ => kummer_u_deriv_n(&args, 2, &prec)?,
            }
        }
    };
    println!("{}", format_sci(&value, prec.digits));
    Ok(())
}

fn profile(a: &ProfileArgs) -> Result<()> {
    let prec = a.flow.precision.config()?;
    let p = a.flow.params(&prec)?;
    let grid = a.flow.omega_grid(&prec)?;
    let init = a.flow.init(&p, &prec)?;
    let ps = complete_profiles(&p, a.variant.into(), &init, &grid, &prec)?;
    with_output(a.out.as_deref(), |w| write_profile_csv(w, &ps, a.kernel_only, prec.digits))
}

fn field(a: &FieldArgs) -> Result<()> {
    let prec = a.flow.precision.config()?;
    let p = a.flow.params(&prec)?;
    let bbox = parse_grid(&a.grid, a.t, &prec)?;
    let grid = a.flow.omega_grid(&prec)?;
    let init = a.flow.init(&p, &prec)?;
    let ps = complete_profiles(&p, a.variant.into(), &init, &grid, &prec)?;
    let samples = sample_grid(&bbox, &ps, &prec)?;
    with_output(a.out.as_deref(), |w| write_field_csv(w, &samples, prec.digits))
}

fn level_set(a: &LevelSetArgs) -> Result<()> {
    let prec = a.flow.precision.config()?;
    let p = a.flow.params(&prec)?;
    let bbox = parse_grid(&a.grid, a.t, &prec)?;
    let grid = a.flow.omega_grid(&prec)?;
    let init = a.flow.init(&p, &prec)?;
    let ps = complete_profiles(&p, a.variant.into(), &init, &grid, &prec)?;
    let opts = LevelSetOptions::new(prec.parse(&a.level)?, a.level_includes_tail, &prec);
    let pts = level_set_points(&ps, a.t, &bbox, &opts, &prec)?;
    if pts.is_empty() {
        eprintln!("ssns: no points at level {} in the box", a.level);
    }
    with_output(a.out.as_deref(), |w| write_level_set_csv(w, &pts, prec.digits))
}

/// Runs the suite; `Ok(true)` when a gating check failed.
fn verify(a: &VerifyArgs) -> Result<bool> {
    let prec = a.flow.precision.config()?;
    let p = a.flow.params(&prec)?;
    let mut opts = SuiteOptions::new(prec.clone())?;
    opts.fd_box = parse_grid(&a.grid, a.t, &prec)?;
    opts.omega_grid = a.flow.omega_range()?;
    if a.flow.g0.is_some() || a.flow.g0_prime.is_some() {
        opts.init = Some(a.flow.init(&p, &prec)?);
    }
    if let Some(c) = &a.checks {
        opts.filter = CheckFilter::parse(c)?;
    }
    let report = run_suite(&p, &opts)?;
    with_output(a.out.as_deref(), |w| {
        w.write_all(report.to_json_string().as_bytes())?;
        Ok(())
    })?;
    for c in report.checks.iter().filter(|c| c.failed()) {
        eprintln!("ssns: check {} failed: {}", c.id, c.notes);
    }
    Ok(report.has_failures())
}

fn exit_for(e: &Error) -> ExitCode {
    eprintln!("ssns: {e}");
    ExitCode::from(if e.is_numeric_failure() { EXIT_NUMERIC } else { EXIT_USAGE })
}

fn main() -> ExitCode {
    if std::env::args_os().len() <= 1 {
        let mut cmd = <Cli as clap::CommandFactory>::command();
        eprintln!("{}", cmd.render_usage());
        eprintln!("ssns: a subcommand is required (try --help)");
        return ExitCode::from(EXIT_USAGE);
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let result = match &cli.command {
        Command::EvalKummer(a) => eval_kummer(a).map(|_| false),
        Command::Profile(a) => profile(a).map(|_| false),
        Command::Field(a) => field(a).map(|_| false),
        Command::LevelSet(a) => level_set(a).map(|_| false),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(EXIT_CHECKS),
        Err(e) => exit_for(&e),
    }
}
