//! `fracdelay`: run a delay-equation experiment and write CSV results.
//!
//! Exit codes: 0 success, 2 configuration error, 3 divergence or numerical
//! failure (results still written when possible), 4 I/O failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fracdelay::experiment::{parse_doc, resolve, run_experiment, RunDoc};
use fracdelay::Error;

#[derive(Debug, Parser)]
#[command(name = "fracdelay", version, about = "Fractional delay equation experiments")]
struct Args {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// ex1, ex2, ex3, ex4, ex5 or caputo-bench.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long)]
    delay: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    y0: Option<f64>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
    /// Comma-separated forcing coefficients b_0,b_1,...
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    b_coeffs: Option<Vec<f64>>,
    /// Forcing truncation degree.
    #[arg(long = "K")]
    k: Option<usize>,
    /// Comma-separated scheme labels.
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<String>>,
    /// conformable or caputo.
    #[arg(long)]
    family: Option<String>,
    /// guarded or raw.
    #[arg(long)]
    delay_indexing: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write plotdata.csv.
    #[arg(long)]
    plot_data: bool,
}

impl Args {
    fn overrides(&self) -> RunDoc {
        RunDoc {
            preset: self.preset.clone(),
            family: self.family.clone(),
            alpha: self.alpha,
            a: self.a,
            delay: self.delay,
            y0: self.y0,
            h: self.h,
            t_max: self.tmax,
            b_coeffs: self.b_coeffs.clone(),
            k: self.k,
            schemes: self.schemes.clone(),
            output_dir: self.out.clone(),
            plot_data: self.plot_data.then_some(true),
            delay_indexing: self.delay_indexing.clone(),
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parse { .. } | Error::InvalidArgument(_) | Error::Domain(_) => 2,
        Error::Io { .. } => 4,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };

    let base = match &args.config {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(source) => {
                    let e = Error::Io { path: path.clone(), source };
                    eprintln!("error: {e}");
                    return ExitCode::from(4);
                }
            };
            match parse_doc(&text) {
                Ok(d) => d,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
        }
        None => RunDoc::default(),
    };

    let config = match resolve(&base.merged(&args.overrides())) {
        Ok(c) => c,
        Err(e) => {
            report(&e);
            return ExitCode::from(exit_code(&e));
        }
    };

    match run_experiment(&config) {
        Ok(summary) => {
            print!("{}", summary.table());
            for f in &summary.files {
                println!("wrote {}", f.display());
            }
            if summary.diverged {
                for t in summary.trajectories.iter().filter(|t| t.diverged_at.is_some()) {
                    eprintln!("{} diverged at node {}", t.scheme, t.diverged_at.unwrap_or_default());
                }
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            report(&e);
            ExitCode::from(exit_code(&e))
        }
    }
}

fn report(e: &Error) {
    match e {
        Error::Config(list) => {
            eprintln!("configuration errors:");
            for item in list {
                eprintln!("  - {item}");
            }
        }
        other => eprintln!("error: {other}"),
    }
}
