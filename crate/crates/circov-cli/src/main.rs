use std::io::Write;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use circov_cli::report::write_outputs;
use circov_cli::{emit_plotdata, parse_args, resolve, CliError, PlotKind, RunMetadata};

fn run() -> Result<(), CliError> {
    let (cli, matches) = match parse_args(std::env::args_os()) {
        Ok(parsed) => parsed,
        Err(CliError::Usage(e)) if !e.use_stderr() => e.exit(),
        Err(e) => return Err(e),
    };
    let (cfg, command) = resolve(&cli, &matches)?;
    let plot_kind = match &cfg.global.plot {
        Some(_) => Some(
            PlotKind::for_command(&cfg.command)
                .ok_or_else(|| CliError::Schema(format!("{} has no plot data", cfg.command)))?,
        ),
        None => None,
    };
    if let Some(n) = cfg.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Schema(e.to_string()))?;
    }
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let report = command.run(&cfg)?;
    let body = report.render(cfg.global.format)?;
    let meta = RunMetadata {
        command: cfg.command.clone(),
        started_unix_secs: started,
        wall_clock_secs: clock.elapsed().as_secs_f64(),
        library_version: report.library_version.clone(),
    };
    match &cfg.global.out {
        Some(path) => write_outputs(path, &body, &meta)?,
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    if let (Some(path), Some(kind)) = (&cfg.global.plot, plot_kind) {
        std::fs::write(path, emit_plotdata(&report, kind)?.to_csv()?)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report = e.report();
            let body = serde_json::json!({ "error": report });
            eprintln!("{body}");
            ExitCode::from(report.exit_code as u8)
        }
    }
}
