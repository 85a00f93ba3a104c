use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tanflow::bench::{execute, mesh_info, verify, BenchmarkConfig};

#[derive(Parser)]
#[command(
    name = "tanflow",
    version,
    about = "Heat flow of scalar, vector and tensor fields on a curved surface"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one benchmark configuration and write the observation CSV.
    Run(Options),
    /// Print statistics of the mesh a configuration would use.
    MeshInfo(Options),
    /// Run the quick invariant suite.
    Verify,
}

/// Every flag may also be given in a `key = value` config file; flags win.
#[derive(Args)]
struct Options {
    /// Config file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// sfem or isfem.
    #[arg(long)]
    method: Option<String>,
    /// Tensor rank 0, 1 or 2.
    #[arg(long)]
    rank: Option<String>,
    /// Bump amplitude.
    #[arg(long)]
    alpha: Option<String>,
    /// Target mesh size.
    #[arg(long)]
    h: Option<String>,
    /// Time step.
    #[arg(long)]
    dt: Option<String>,
    /// Polynomial and geometry order, 1 or 2.
    #[arg(long)]
    order: Option<String>,
    /// Penalty parameter.
    #[arg(long)]
    beta: Option<String>,
    /// End time.
    #[arg(long)]
    tend: Option<String>,
    /// Radius of the initial bump.
    #[arg(long)]
    eps: Option<String>,
    /// Comma-separated observation times.
    #[arg(long)]
    obs_times: Option<String>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<String>,
    /// Integrate on the exact chart instead of the discrete surface.
    #[arg(long)]
    exact_geometry: bool,
    /// Local refinement: cx,cy,radius,levels.
    #[arg(long)]
    grade: Option<String>,
    /// Final-state VTK path.
    #[arg(long)]
    vtk: Option<String>,
    /// direct or cg.
    #[arg(long)]
    solver: Option<String>,
    /// CSV of mean and energy at the observation times.
    #[arg(long)]
    energy_out: Option<String>,
}

impl Options {
    fn into_config(self) -> tanflow::Result<BenchmarkConfig> {
        let mut cfg = BenchmarkConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_text(&std::fs::read_to_string(path)?)?;
        }
        let flags = [
            ("method", self.method),
            ("rank", self.rank),
            ("alpha", self.alpha),
            ("h", self.h),
            ("dt", self.dt),
            ("order", self.order),
            ("beta", self.beta),
            ("tend", self.tend),
            ("eps", self.eps),
            ("obs-times", self.obs_times),
            ("out", self.out),
            ("grade", self.grade),
            ("vtk", self.vtk),
            ("solver", self.solver),
            ("energy-out", self.energy_out),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.apply(key, &v)?;
            }
        }
        if self.exact_geometry {
            cfg.exact_geometry = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    faer::set_global_parallelism(faer::Par::Seq);
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(opts) => opts
            .into_config()
            .and_then(|cfg| execute(&cfg))
            .map(|_| true),
        Command::MeshInfo(opts) => opts.into_config().and_then(|cfg| mesh_info(&cfg)).map(|s| {
            print!("{s}");
            true
        }),
        Command::Verify => verify().map(|checks| {
            for c in &checks {
                println!(
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            checks.iter().all(|c| c.passed)
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("tanflow: {e}");
            ExitCode::FAILURE
        }
    }
}
