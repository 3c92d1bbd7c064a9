mod cache;
mod commands;
mod csv;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{CliError, Instance};

#[derive(Parser, Debug)]
#[command(name = "gale", version, about = "Exact g/h-polynomials, face lattices and fibers of Gale dual root polytopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// g- and h-polynomials of the polytope by one or all methods
    Compute {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = What::Both)]
        what: What,
        #[arg(long, value_enum, default_value_t = Method::Graph)]
        method: Method,
    },
    /// Face lattice: faces, cover relations and f-vector
    Faces {
        #[command(flatten)]
        common: Common,
    },
    /// Poincaré polynomial of the fiber over the stratum of one face
    Fiber {
        #[command(flatten)]
        common: Common,
        /// Face id (the count key of its core); defaults to the whole polytope
        #[arg(long)]
        face: Option<String>,
    },
    /// Smallness certificate over every stratum
    Certify {
        #[command(flatten)]
        common: Common,
    },
    /// Irreducible components of the central fiber and their intersections
    Components {
        #[command(flatten)]
        common: Common,
    },
    /// Ring presentation and Hilbert function compared with g
    Ring {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Number of vertices
    #[arg(long)]
    k: usize,
    /// Multiplicities r_12, r_13, ..., r_{k-1,k}; all ones when omitted
    #[arg(long, value_delimiter = ',')]
    r: Option<Vec<u32>>,
    /// Stability parameter summing to zero; defaults to (k-1, -1, ..., -1)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Option<Vec<i64>>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Cap on enumeration work
    #[arg(long, default_value_t = gale_core::Budget::DEFAULT.0)]
    budget: u64,
    /// Worker threads (defaults to all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Attach independent geometric checks to the output
    #[arg(long)]
    verify: bool,
    /// Neither read nor write the result cache
    #[arg(long)]
    no_cache: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum What {
    G,
    H,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Graph,
    Recursion,
    Stanley,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

fn run(cli: Cli) -> Result<String, CliError> {
    let common = match &cli.command {
        Command::Compute { common, .. }
        | Command::Faces { common }
        | Command::Fiber { common, .. }
        | Command::Certify { common }
        | Command::Components { common }
        | Command::Ring { common } => common.clone(),
    };
    if let Some(jobs) = common.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let inst = Instance::new(common.k, common.r.clone(), common.theta.clone(), common.budget)?;
    let (name, options) = match &cli.command {
        Command::Compute { what, method, .. } => ("compute", format!("{what:?}/{method:?}")),
        Command::Faces { .. } => ("faces", String::new()),
        Command::Fiber { face, .. } => ("fiber", face.clone().unwrap_or_default()),
        Command::Certify { .. } => ("certify", String::new()),
        Command::Components { .. } => ("components", String::new()),
        Command::Ring { .. } => ("ring", String::new()),
    };
    let key = cache::key(name, &inst, &options, common.verify);
    let store = if common.no_cache { None } else { cache::Store::from_env() };
    let value = match store.as_ref().and_then(|s| s.get(&key)) {
        Some(v) => v,
        None => {
            let v = match &cli.command {
                Command::Compute { what, method, .. } => commands::compute(&inst, *what, *method, common.verify)?,
                Command::Faces { .. } => commands::faces(&inst, common.verify)?,
                Command::Fiber { face, .. } => commands::fiber(&inst, face.as_deref(), common.verify)?,
                Command::Certify { .. } => commands::certify(&inst, common.verify)?,
                Command::Components { .. } => commands::components(&inst, common.verify)?,
                Command::Ring { .. } => commands::ring(&inst, common.verify)?,
            };
            if let Some(s) = &store {
                // a failed cache write only costs a recomputation later
                let _ = s.put(&key, &v);
            }
            v
        }
    };
    Ok(match common.format {
        Format::Json => serde_json::to_string_pretty(&value).expect("serializable") + "\n",
        Format::Csv => csv::render(&value),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
