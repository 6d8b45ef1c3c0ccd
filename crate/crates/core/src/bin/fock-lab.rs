use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use fock_lab::report::{
    cmd_husimi, cmd_limits, cmd_state, cmd_verify, CliError, HusimiArgs, Overrides, ReportBundle, RunConfig,
    StateKind, StateParams,
};

#[derive(Parser)]
#[command(name = "fock-lab", version, about = "Truncated Fock-space checks for squeezed and position states")]
struct Cli {
    /// Number of basis levels N.
    #[arg(long, global = true)]
    levels: Option<usize>,
    /// Rows/columns dropped at the truncation edge.
    #[arg(long, global = true)]
    buffer: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML config file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the operator-identity suite and write verify.json.
    Verify,
    /// Sample the Husimi Q function of |x⟩ and write husimi.csv/husimi.json.
    Husimi {
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        x: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = -4.0)]
        re_min: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 4.0)]
        re_max: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = -4.0)]
        im_min: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 4.0)]
        im_max: f64,
        #[arg(long, default_value_t = 81)]
        n_re: usize,
        #[arg(long, default_value_t = 81)]
        n_im: usize,
    },
    /// Yuen and Caves large-squeezing studies; writes yuen.csv and caves.csv.
    Limits {
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        x: f64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.5,1,1.5,2")]
        r_list: Vec<f64>,
    },
    /// Dump the amplitudes of one state as JSON.
    State {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Complex amplitude, e.g. 1, -0.5+2i.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<Complex64>,
        #[arg(long, allow_hyphen_values = true)]
        alpha_prime: Option<Complex64>,
        #[arg(long, allow_hyphen_values = true)]
        r: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        p: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Coherent,
    Yuen,
    Caves,
    Position,
    Momentum,
}

impl From<Kind> for StateKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Coherent => StateKind::Coherent,
            Kind::Yuen => StateKind::Yuen,
            Kind::Caves => StateKind::Caves,
            Kind::Position => StateKind::Position,
            Kind::Momentum => StateKind::Momentum,
        }
    }
}

fn report(bundle: &ReportBundle) -> ExitCode {
    for line in bundle.summary_lines() {
        println!("{line}");
    }
    if bundle.passed {
        ExitCode::SUCCESS
    } else {
        for name in bundle.failures() {
            eprintln!("failed: {name}");
        }
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let overrides = Overrides {
        levels: cli.levels,
        buffer: cli.buffer,
        out: cli.out,
    };
    let config = RunConfig::from_sources(cli.config.as_deref(), &overrides)?;
    match cli.command {
        Command::Verify => Ok(report(&cmd_verify(&config)?)),
        Command::Husimi {
            x,
            re_min,
            re_max,
            im_min,
            im_max,
            n_re,
            n_im,
        } => {
            let args = HusimiArgs {
                x,
                re_min,
                re_max,
                im_min,
                im_max,
                n_re,
                n_im,
            };
            Ok(report(&cmd_husimi(&config, &args)?))
        }
        Command::Limits { x, r_list } => Ok(report(&cmd_limits(&config, x, &r_list)?)),
        Command::State {
            kind,
            alpha,
            alpha_prime,
            r,
            x,
            p,
        } => {
            let params = StateParams {
                alpha,
                alpha_prime,
                r,
                x,
                p,
            };
            let path = cmd_state(&config, kind.into(), &params)?;
            println!("{}", path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
