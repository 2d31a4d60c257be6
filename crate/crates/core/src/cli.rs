//! The `tini` command line. Every subcommand writes to caller-supplied
//! streams and returns its exit code, so it can be exercised in-process.
//!
//! Exit codes: 0 done, 1 static error, 2 I/O or environment problem,
//! 3 runtime fault, 4 time cutoff.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::driver::{run_frame, RunOptions, DEFAULT_DT, DEFAULT_MAX_TIME};
use crate::interp::write_jsonl;
use crate::lang::{self, pretty_print, Diagnostic, SetupMode};
use crate::sim::{resolve_world, Simulator, WorldModel, MAX_TICK};
use crate::wire::{
    self, Outbound, ServiceConfig, ServiceCore, TimeMode, DEFAULT_SERIAL_PORT,
    DEFAULT_TELEMETRY_PORT,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_STATIC: i32 = 1;
pub const EXIT_ENV: i32 = 2;
pub const EXIT_FAULT: i32 = 3;
pub const EXIT_CUTOFF: i32 = 4;

/// Virtual seconds the REPL advances per entered line before prompting
/// again.
pub const REPL_SLICE: f64 = 60.0;

#[derive(Debug, Parser)]
#[command(
    name = "tini",
    version,
    about = "TiniScript tools: check, format, simulate and serve robot programs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a program; print diagnostics one per line.
    Check {
        /// Program file, or a literal frame such as "SI|F(5, 80)".
        input: String,
    },
    /// Print the canonical single-line form of a program.
    Fmt {
        input: String,
        /// Exit 1 instead of printing when the input is not canonical.
        #[arg(long)]
        check: bool,
    },
    /// Run a program against the simulator and print a JSON report.
    Run(RunArgs),
    /// Serve the serial protocol and the WebSocket telemetry feed.
    Serve(ServeArgs),
    /// Interactive prompt: enter frames, `:btn`, `:state` or `:quit`.
    Repl {
        #[arg(long)]
        world: Option<String>,
        #[arg(long, default_value_t = DEFAULT_DT)]
        dt: f64,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub input: String,
    /// World file or bundled world name (empty, corridor, lights).
    #[arg(long)]
    pub world: Option<String>,
    #[arg(long, default_value_t = DEFAULT_DT)]
    pub dt: f64,
    /// Virtual seconds before an unfinished program is cut off.
    #[arg(long, default_value_t = DEFAULT_MAX_TIME)]
    pub max_time: f64,
    /// Write every trace event to this JSONL file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Press the start button at this virtual time.
    #[arg(long)]
    pub button_at: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TimeModeArg {
    Realtime,
    Fast,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, default_value_t = DEFAULT_SERIAL_PORT)]
    pub serial_port: u16,
    #[arg(long, default_value_t = DEFAULT_TELEMETRY_PORT)]
    pub telemetry_port: u16,
    #[arg(long)]
    pub world: Option<String>,
    #[arg(long, value_enum, default_value_t = TimeModeArg::Realtime)]
    pub time_mode: TimeModeArg,
    #[arg(long, default_value_t = DEFAULT_DT)]
    pub dt: f64,
    /// Use stdin/stdout as the serial channel.
    #[arg(long)]
    pub stdio: bool,
}

/// Entry point for the binary.
pub fn main() -> i32 {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ENV } else { EXIT_OK };
        }
    };
    // Only the repl reads stdin here; `serve --stdio` locks it on its own
    // thread.
    let mut input: Box<dyn BufRead> = match cli.command {
        Command::Repl { .. } => Box::new(io::stdin().lock()),
        _ => Box::new(io::empty()),
    };
    execute(
        cli.command,
        &mut input,
        &mut io::stdout(),
        &mut io::stderr(),
    )
}

/// Logging is controlled by `TINI_LOG` (for example `TINI_LOG=debug`).
pub fn init_logging() {
    let env = env_logger::Env::new().filter_or("TINI_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).try_init();
}

pub fn execute(
    command: Command,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    match command {
        Command::Check { input } => cmd_check(&input, out, err),
        Command::Fmt { input, check } => cmd_fmt(&input, check, out, err),
        Command::Run(args) => cmd_run(&args, out, err),
        Command::Serve(args) => cmd_serve(&args, out, err),
        Command::Repl { world, dt } => cmd_repl(world.as_deref(), dt, input, out, err),
    }
}

/// Reads a program from a file, or takes `arg` itself as the program when
/// no such file exists and it looks like a frame.
pub fn read_program(arg: &str) -> io::Result<String> {
    let path = Path::new(arg);
    if path.is_file() {
        return fs::read_to_string(path);
    }
    if arg.contains('|') {
        return Ok(arg.to_string());
    }
    Err(io::Error::new(
        io::ErrorKind::NotFound,
        format!("{arg}: no such file"),
    ))
}

fn print_diags(diags: &[Diagnostic], w: &mut dyn Write) {
    for d in diags {
        let _ = writeln!(w, "{d}");
    }
}

fn load_source(arg: &str, err: &mut dyn Write) -> Result<String, i32> {
    read_program(arg).map_err(|e| {
        let _ = writeln!(err, "error: {e}");
        EXIT_ENV
    })
}

pub fn cmd_check(arg: &str, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let source = match load_source(arg, err) {
        Ok(s) => s,
        Err(code) => return code,
    };
    match lang::compile(&source) {
        Ok((_, warnings)) => {
            print_diags(&warnings, out);
            EXIT_OK
        }
        Err(diags) => {
            print_diags(&diags, out);
            EXIT_STATIC
        }
    }
}

pub fn cmd_fmt(arg: &str, check: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let source = match load_source(arg, err) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let frame = match lang::parse_frame(&source) {
        Ok(f) => f,
        Err(diags) => {
            print_diags(&diags, err);
            return EXIT_STATIC;
        }
    };
    let canonical = pretty_print(&frame);
    if check {
        if source.trim_end_matches(['\n', '\r']) == canonical {
            EXIT_OK
        } else {
            let _ = writeln!(err, "{arg}: not in canonical form");
            EXIT_STATIC
        }
    } else {
        let _ = writeln!(out, "{canonical}");
        EXIT_OK
    }
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if !(args.dt > 0.0 && args.dt <= MAX_TICK) {
        let _ = writeln!(err, "error: --dt must be in (0, {MAX_TICK}]");
        return EXIT_ENV;
    }
    if !(args.max_time >= 0.0 && args.max_time.is_finite()) {
        let _ = writeln!(
            err,
            "error: --max-time must be a finite, non-negative number"
        );
        return EXIT_ENV;
    }
    let source = match load_source(&args.input, err) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let frame = match lang::compile(&source) {
        Ok((frame, warnings)) => {
            print_diags(&warnings, err);
            frame
        }
        Err(diags) => {
            print_diags(&diags, err);
            return EXIT_STATIC;
        }
    };
    if frame.setup == SetupMode::Ping {
        let _ = writeln!(out, "PONG");
        return EXIT_OK;
    }
    let sim = match load_world(args.world.as_deref())
        .and_then(|w| Simulator::with_defaults(w).map_err(|e| e.to_string()))
    {
        Ok(sim) => sim,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_ENV;
        }
    };
    let options = RunOptions {
        dt: args.dt,
        max_time: args.max_time,
        button_at: args.button_at,
    };
    let mut outcome = run_frame(frame, sim, options).expect("ping frames are handled above");
    if let Some(path) = &args.trace {
        let written = fs::File::create(path)
            .and_then(|f| write_jsonl(io::BufWriter::new(f), &outcome.events));
        if let Err(e) = written {
            let _ = writeln!(err, "error: writing {}: {e}", path.display());
            return EXIT_ENV;
        }
        outcome.report.trace_path = Some(path.display().to_string());
    }
    let report = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
    let _ = writeln!(out, "{report}");
    outcome.report.exit_code
}

fn load_world(arg: Option<&str>) -> Result<WorldModel, String> {
    match arg {
        Some(a) => resolve_world(a).map_err(|e| e.to_string()),
        None => Ok(WorldModel::empty()),
    }
}

pub fn cmd_serve(args: &ServeArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let config = ServiceConfig {
        host: args.host.clone(),
        serial_port: args.serial_port,
        telemetry_port: args.telemetry_port,
        world: args.world.clone(),
        time_mode: match args.time_mode {
            TimeModeArg::Realtime => TimeMode::Realtime,
            TimeModeArg::Fast => TimeMode::Fast,
        },
        dt: args.dt,
        stdio: args.stdio,
    };
    let handle = match wire::serve(config) {
        Ok(h) => h,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_ENV;
        }
    };
    // In stdio mode stdout is the serial channel, so the banner goes to
    // stderr.
    let banner = format!(
        "tini: serial on {}, telemetry on ws://{}",
        handle
            .serial_addr()
            .map_or_else(|| "stdio".to_string(), |a| a.to_string()),
        handle.telemetry_addr()
    );
    let _ = if args.stdio {
        writeln!(err, "{banner}")
    } else {
        writeln!(out, "{banner}")
    };
    let _ = out.flush();

    let (tx, rx) = crossbeam_channel::bounded(1);
    if let Err(e) = ctrlc::set_handler(move || {
        let _ = tx.try_send(());
    }) {
        log::warn!("cannot install Ctrl-C handler: {e}");
    }
    while !handle.is_finished() {
        if rx.recv_timeout(Duration::from_millis(100)).is_ok() {
            let _ = writeln!(err, "tini: shutting down");
            break;
        }
    }
    handle.shutdown();
    EXIT_OK
}

/// One compact line describing the robot and session.
pub fn state_line(core: &ServiceCore) -> String {
    let t = core.telemetry();
    format!(
        "t={:.2} x={:.3} y={:.3} theta={:.3} motors=({:.0},{:.0}) light=({:.0},{:.0}) distance={:.1} phase={}",
        t.t, t.x, t.y, t.theta, t.ml, t.mr, t.light_l, t.light_r, t.distance, t.phase
    )
}

pub fn cmd_repl(
    world: Option<&str>,
    dt: f64,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    if !(dt > 0.0 && dt <= MAX_TICK) {
        let _ = writeln!(err, "error: --dt must be in (0, {MAX_TICK}]");
        return EXIT_ENV;
    }
    let sim = match load_world(world)
        .and_then(|w| Simulator::with_defaults(w).map_err(|e| e.to_string()))
    {
        Ok(sim) => sim,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_ENV;
        }
    };
    let mut core = ServiceCore::new(sim, dt);
    let slice = (REPL_SLICE / dt).ceil() as usize;
    let mut line = String::new();
    loop {
        let _ = write!(out, "tini> ");
        let _ = out.flush();
        line.clear();
        match input.read_line(&mut line) {
            Ok(0) => {
                let _ = writeln!(out);
                return EXIT_OK;
            }
            Ok(_) => {}
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_ENV;
            }
        }
        let entry = line.trim();
        let mut emitted = match entry {
            "" => continue,
            ":quit" | ":q" => return EXIT_OK,
            ":state" => {
                let _ = writeln!(out, "{}", state_line(&core));
                continue;
            }
            ":btn" => core.handle_line(wire::BUTTON_LINE),
            _ if entry.starts_with(':') => {
                let _ = writeln!(out, "unknown command {entry}; try :btn, :state or :quit");
                continue;
            }
            _ => core.handle_line(entry),
        };
        for _ in 0..slice {
            if !core.is_running() {
                break;
            }
            emitted.extend(core.step());
        }
        for item in emitted {
            if let Outbound::Reply(r) | Outbound::Broadcast(r) = item {
                let _ = writeln!(out, "{r}");
            }
        }
        let _ = writeln!(out, "{}", state_line(&core));
    }
}
