//! Command-line front end: parse arguments, load the run configuration,
//! dispatch to the library runner, write outputs.

use clap::{Parser, Subcommand};

use ruelle::config::RunConfig;
use ruelle::runner::{self, RunError, RunOutput};

#[derive(Parser)]
#[command(name = "ruelle", version, about = "Dynamical determinants, resonances, and spectral experiments for model hyperbolic flows")]
struct Cli {
    /// Key/value configuration file.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Output path for the subcommand's data file.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed offset for deterministic sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the configured flow model's periodic orbits into a catalog.
    Orbits,
    /// Evaluate an orbit sum at a point.
    ZetaEval {
        #[arg(long)]
        catalog: String,
        /// Evaluation point RE,IM.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Trace/determinant order.
        #[arg(long, default_value_t = 4)]
        m: u32,
        #[arg(long, default_value = "direct")]
        mode: String,
        /// Resonance list (detm mode).
        #[arg(long)]
        resonances: Option<String>,
        /// Anchor point RE,IM with large real part (detm mode).
        #[arg(long)]
        anchor: Option<String>,
        #[arg(long, default_value_t = 1e4)]
        trunc_radius: f64,
    },
    /// Locate zeros of the catalog's determinant series in a box.
    Zeros {
        #[arg(long)]
        catalog: String,
        /// Search box re_min,re_max,im_min,im_max.
        #[arg(long = "box", allow_hyphen_values = true)]
        box_spec: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Counting function N(R) over a resonance list.
    Nr {
        #[arg(long)]
        resonances: String,
        #[arg(long = "R")]
        radius: f64,
    },
    /// Order-of-growth estimate from circle maxima.
    Order {
        /// Comma list or geometric range lo..hi:count.
        #[arg(long)]
        radii: String,
        /// Control function instead of a zeta evaluator: exp | exp2.
        #[arg(long)]
        control: Option<String>,
        #[arg(long)]
        catalog: Option<String>,
        #[arg(long)]
        resonances: Option<String>,
        #[arg(long, default_value = "10,0")]
        anchor: String,
        #[arg(long, default_value_t = 4)]
        det_order: u32,
        #[arg(long, default_value_t = 1e4)]
        trunc_radius: f64,
    },
    /// Check the trace formula: orbit sum against the spectral sum.
    TracesCheck {
        #[arg(long)]
        catalog: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value_t = 4)]
        m: u32,
        #[arg(long, default_value_t = 500)]
        j_max: u64,
    },
    /// Check the determinant factorization against the closed form.
    DetmCheck {
        #[arg(long)]
        catalog: String,
        #[arg(long)]
        resonances: String,
        #[arg(long, default_value = "10,0", allow_hyphen_values = true)]
        anchor: String,
        #[arg(long, default_value_t = 4)]
        det_order: u32,
        /// Semicolon-separated evaluation points RE,IM;RE,IM;...
        #[arg(long, default_value = "1,0;1,3;-0.5,6", allow_hyphen_values = true)]
        lambdas: String,
        #[arg(long, default_value_t = 1e4)]
        trunc_radius: f64,
    },
    /// Scan the escape function's negativity/ellipticity properties.
    EscapeCheck {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 10.0)]
        radius_min: f64,
    },
    /// Transform a test signal; writes (x, xi, re, im, abs) CSV.
    Fbi {
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 0.05)]
        h: f64,
        #[arg(long, default_value = "flat")]
        variant: String,
        #[arg(long, default_value_t = 64)]
        l_max: usize,
        #[arg(long, default_value_t = 2.5)]
        xi_max: f64,
        #[arg(long, default_value_t = 48)]
        n_xi: usize,
        /// Insert a unit jump at this point (wavefront input).
        #[arg(long, allow_hyphen_values = true)]
        jump_at: Option<f64>,
    },
    /// Decay fit over a transform CSV.
    FbiFit {
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        s: f64,
    },
    /// Wavefront scan over a transform CSV.
    FbiWf {
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
    },
    /// Stochastic-stability experiment; writes (eps, d_zH, n_eigs) CSV.
    Spectra {
        #[arg(long)]
        eps_list: String,
        #[arg(long)]
        z: f64,
        #[arg(long = "R")]
        radius: f64,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match run(&cli) {
        Ok(output) => {
            for (path, contents) in &output.files {
                if let Err(e) = std::fs::write(path, contents) {
                    let err = RunError::Io(e);
                    eprintln!("{}", err.to_json());
                    std::process::exit(err.exit_code());
                }
            }
            println!("{}", serde_json::to_string_pretty(&output.envelope).unwrap());
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: &Cli) -> Result<RunOutput, RunError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::parse(&std::fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Orbits => runner::run_orbits(&config, out),
        Command::ZetaEval { catalog, z, m, mode, resonances, anchor, trunc_radius } => {
            runner::run_zeta_eval(
                &config,
                catalog,
                z,
                mode,
                *m,
                resonances.as_deref(),
                anchor.as_deref(),
                *trunc_radius,
            )
        }
        Command::Zeros { catalog, box_spec, tol } => {
            runner::run_zeros(&config, catalog, box_spec, *tol, out)
        }
        Command::Nr { resonances, radius } => runner::run_nr(&config, resonances, *radius),
        Command::Order { radii, control, catalog, resonances, anchor, det_order, trunc_radius } => {
            runner::run_order(
                &config,
                radii,
                control.as_deref(),
                catalog.as_deref(),
                resonances.as_deref(),
                anchor,
                *det_order,
                *trunc_radius,
            )
        }
        Command::TracesCheck { catalog, z, m, j_max } => {
            runner::run_traces_check(&config, catalog, z, *m, *j_max)
        }
        Command::DetmCheck { catalog, resonances, anchor, det_order, lambdas, trunc_radius } => {
            runner::run_detm_check(
                &config,
                catalog,
                resonances,
                anchor,
                *det_order,
                lambdas,
                *trunc_radius,
            )
        }
        Command::EscapeCheck { samples, radius_min } => {
            runner::run_escape_check(&config, *samples, *radius_min)
        }
        Command::Fbi { s, c, h, variant, l_max, xi_max, n_xi, jump_at } => {
            let out = out.ok_or_else(|| RunError::Usage("fbi requires --out FILE.csv".into()))?;
            runner::run_fbi(&config, *s, *c, *h, variant, *l_max, *xi_max, *n_xi, *jump_at, out)
        }
        Command::FbiFit { input, s } => runner::run_fbi_fit(&config, input, *s),
        Command::FbiWf { input, s, threshold } => {
            runner::run_fbi_wf(&config, input, *s, *threshold)
        }
        Command::Spectra { eps_list, z, radius } => {
            let out = out.ok_or_else(|| RunError::Usage("spectra requires --out FILE.csv".into()))?;
            runner::run_spectra(&config, eps_list, *z, *radius, out)
        }
    }
}
