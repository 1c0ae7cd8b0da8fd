use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use labelrankt::graph::load_stream;
use labelrankt::{Params, SelfLoopMode};
use labelrankt_cli::commands::sweep_to_csv;
use labelrankt_cli::{
    bench, generate, run, sweep, write_run, CliError, GraphView, Mode, RunOptions,
    DEFAULT_Q_GRID,
};

#[derive(Parser)]
#[command(name = "labelrankt", version, about = "Community detection on snapshot streams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect communities in every snapshot of a stream.
    Run {
        /// Directory of NNNN.edges files, or a single edge-list file.
        input: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        view: ViewArgs,
        #[arg(long, value_enum, default_value = "incremental")]
        mode: ModeArg,
        /// Write assign.NNNN.txt files and report.csv here instead of
        /// printing the report.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report 0 ms everywhere so reports are byte-reproducible.
        #[arg(long)]
        no_timing: bool,
    },
    /// Average Q per q value, weighted+directed against binarized+undirected.
    Sweep {
        input: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        /// Comma-separated q values.
        #[arg(long = "q-values", value_delimiter = ',', default_values_t = DEFAULT_Q_GRID)]
        q_values: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Static against incremental timing and work counters.
    Bench {
        input: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Write a planted stream described by a TOML spec.
    Generate {
        spec: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long)]
    inflation: f64,
    #[arg(long, default_value_t = Params::DEFAULT_CUTOFF)]
    cutoff: f64,
    #[arg(long, default_value_t = Params::DEFAULT_Q)]
    q: f64,
    #[arg(long = "self-loop", value_enum, default_value = "unit")]
    self_loop: SelfLoopArg,
    #[arg(long = "max-iters", default_value_t = Params::DEFAULT_MAX_ITERS)]
    max_iters: usize,
    #[arg(long, default_value_t = Params::DEFAULT_STALL_ITERS)]
    stall: usize,
    /// Incremental runs: let neighbors of changed nodes update too.
    #[arg(long)]
    expand_active: bool,
}

impl ParamArgs {
    fn params(&self) -> Params {
        let self_loop = match self.self_loop {
            SelfLoopArg::Unit => SelfLoopMode::Unit,
            SelfLoopArg::Max => SelfLoopMode::MaxIncident,
            SelfLoopArg::Sum => SelfLoopMode::SumIncident,
        };
        Params {
            inflation: self.inflation,
            cutoff: self.cutoff,
            q: self.q,
            self_loop,
            max_iters: self.max_iters,
            stall_iters: self.stall,
            expand_active: self.expand_active,
        }
    }
}

#[derive(Args)]
struct ViewArgs {
    #[arg(long, overrides_with = "undirected")]
    directed: bool,
    #[arg(long, overrides_with = "directed")]
    undirected: bool,
    #[arg(long, overrides_with = "binarized")]
    weighted: bool,
    #[arg(long, overrides_with = "weighted")]
    binarized: bool,
}

impl ViewArgs {
    fn view(&self) -> GraphView {
        GraphView {
            directed: !self.undirected,
            weighted: !self.binarized,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Static,
    Incremental,
}

#[derive(Clone, Copy, ValueEnum)]
enum SelfLoopArg {
    Unit,
    Max,
    Sum,
}

fn write_out(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io {
            path: path.clone(),
            source: e,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io {
                path: "<stdout>".into(),
                source: e,
            })
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run {
            input,
            params,
            view,
            mode,
            out,
            no_timing,
        } => {
            let snapshots = load_stream(&input)?;
            let opts = RunOptions {
                mode: match mode {
                    ModeArg::Static => Mode::Static,
                    ModeArg::Incremental => Mode::Incremental,
                },
                params: params.params(),
                view: view.view(),
                timing: !no_timing,
            };
            let output = run(&snapshots, &opts)?;
            match out {
                Some(dir) => write_run(&output, &dir),
                None => write_out(None, &output.report.to_csv()?),
            }
        }
        Command::Sweep {
            input,
            params,
            q_values,
            out,
        } => {
            let snapshots = load_stream(&input)?;
            let rows = sweep(&snapshots, &params.params(), &q_values)?;
            write_out(out.as_ref(), &sweep_to_csv(&rows))
        }
        Command::Bench { input, params } => {
            let snapshots = load_stream(&input)?;
            let report = bench(&snapshots, &params.params())?;
            write_out(None, &report.to_text())
        }
        Command::Generate { spec, seed, out } => {
            let stream = generate(&spec, seed, &out)?;
            eprintln!(
                "wrote {} snapshots to {}",
                stream.snapshots.len(),
                out.display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match std::panic::catch_unwind(|| dispatch(cli.command)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => ExitCode::from(3),
    }
}
