use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use waistlab::bodies::{check_ball_inside, mc_volume, volume_ratio, CONTAINMENT_PROBES};
use waistlab::experiments::{load_config, run_experiment, theorem_schedule};
use waistlab::measure::{cap_angles, cap_bounds, chisq_cdf, chisq_sf, gaussian_fact_check, lip_bounds, sigma_exact, sigma_mc};
use waistlab::report::emit_plot_data;
use waistlab::rng::entropy_seed;
use waistlab::verify::run_verify;
use waistlab::{BodySpec, BoundConstants, Error, SubsphereQuery};

/// Waist isoperimetry on the sphere and random intersections of convex bodies.
#[derive(Parser)]
#[command(name = "waistlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact (and optionally Monte-Carlo) measure of a subsphere neighborhood.
    Sigma {
        #[arg(long)]
        sphere_dim: usize,
        #[arg(long)]
        subsphere_dim: usize,
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
        /// Monte-Carlo samples for an independent estimate.
        #[arg(long)]
        mc: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Closed-form bounds.
    Bounds {
        #[command(subcommand)]
        which: BoundsCommand,
    },
    /// Radii, symmetry and volume of a body given as JSON (inline or a file).
    Body {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a harness from a configuration file.
    Experiment {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Also write plot.csv and plot_summary.csv.
        #[arg(long)]
        plot: bool,
    },
    /// Run the invariant suite; exits 1 if any check fails.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    TwoBodies,
    Sections,
    Core,
    HigherSphere,
    Projection,
    GlobalVr,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::TwoBodies => "two-bodies",
            Kind::Sections => "sections",
            Kind::Core => "core",
            Kind::HigherSphere => "higher-sphere",
            Kind::Projection => "projection",
            Kind::GlobalVr => "global-vr",
        }
    }
}

#[derive(Args)]
struct Consts {
    #[arg(long, default_value_t = BoundConstants::DEFAULT_C_SMALL)]
    c_small: f64,
    #[arg(long, default_value_t = BoundConstants::DEFAULT_C_BIG)]
    c_big: f64,
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// Cap lemma sides and the exact value they bracket.
    Cap {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        consts: Consts,
    },
    /// Waist lower bounds (i) and (ii).
    Lip {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        consts: Consts,
    },
    /// Chi-square CDF and tail, with the Gaussian facts when M and ε are given.
    Chisq {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        m: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        consts: Consts,
    },
    /// Parameter schedule of the two-bodies bound; exits 3 if infeasible.
    Schedule {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1.0 / 33.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        c1: f64,
        #[arg(long, default_value_t = 0.5)]
        c2: f64,
    },
}

enum Failure {
    Error(Error),
    Checks(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn print(v: serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(&v).expect("json"));
}

fn bounds(which: BoundsCommand) -> Result<(), Failure> {
    match which {
        BoundsCommand::Cap { n, k, eps, consts } => {
            let c = BoundConstants::with_cs(consts.c_small, consts.c_big);
            c.validate()?;
            let b = cap_bounds(n, k, eps, &c)?;
            let (direct, compl) = cap_angles(n, k, eps);
            let exact = sigma_exact(&SubsphereQuery::new(n - 1, n - k - 1, direct)?);
            let exact_compl = sigma_exact(&SubsphereQuery::new(n - 1, k - 1, compl)?);
            print(json!({"lower": b.lower, "upper": b.upper, "lower_compl": b.lower_compl,
                         "upper_compl": b.upper_compl, "exact": exact, "exact_compl": exact_compl}));
        }
        BoundsCommand::Lip { n, k, eps, consts } => {
            let c = BoundConstants::with_cs(consts.c_small, consts.c_big);
            c.validate()?;
            let b = lip_bounds(n, k, eps, &c)?;
            print(json!({"bound_i": b.bound_i, "bound_ii": b.bound_ii}));
        }
        BoundsCommand::Chisq { k, x, m, eps, consts } => {
            let mut v = json!({"cdf": chisq_cdf(k, x)?, "sf": chisq_sf(k, x)?});
            if let (Some(m), Some(eps)) = (m, eps) {
                let c = BoundConstants::with_cs(consts.c_small, consts.c_big);
                v["gaussian_fact"] = serde_json::to_value(gaussian_fact_check(k, m, eps, &c)?).expect("json");
            }
            print(v);
        }
        BoundsCommand::Schedule { n, k, a, c1, c2 } => {
            let c = BoundConstants { a_frac: a, c1_sched: c1, c2_sched: c2, ..Default::default() };
            print(serde_json::to_value(theorem_schedule(n, k, &c)?).expect("json"));
        }
    }
    Ok(())
}

fn body(spec: &str, samples: usize, seed: u64) -> Result<(), Failure> {
    let text = if spec.trim_start().starts_with('{') { spec.to_string() } else { std::fs::read_to_string(spec).map_err(Error::from)? };
    let spec: BodySpec = serde_json::from_str(&text).map_err(Error::from)?;
    let k = spec.build()?;
    let mut v = json!({
        "dim": k.dim(),
        "symmetric": k.is_symmetric(),
        "inner_radius": k.inner_radius(),
        "outer_radius": k.outer_radius(),
        "seed": seed,
    });
    if k.outer_radius().is_finite() {
        let vol = mc_volume(&k, samples, seed)?;
        v["volume"] = json!({"estimate": vol.estimate, "standard_error": vol.standard_error});
        if check_ball_inside(&*k, CONTAINMENT_PROBES, seed).is_ok() {
            let vr = volume_ratio(&k, samples, seed)?;
            v["volume_ratio"] = json!({"estimate": vr.ratio, "standard_error": vr.standard_error});
        }
    }
    print(v);
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Sigma { sphere_dim, subsphere_dim, theta, mc, seed } => {
            let q = SubsphereQuery::new(sphere_dim, subsphere_dim, theta)?;
            let mut v = json!({"exact": sigma_exact(&q)});
            if let Some(samples) = mc {
                let seed = seed.unwrap_or_else(entropy_seed);
                let e = sigma_mc(&q, samples, seed)?;
                v["mc"] = json!(e.estimate);
                v["se"] = json!(e.standard_error);
                v["seed"] = json!(seed);
            }
            println!("{v}");
        }
        Command::Bounds { which } => bounds(which)?,
        Command::Body { spec, samples, seed } => body(&spec, samples, seed.unwrap_or_else(entropy_seed))?,
        Command::Experiment { kind, config, seed, out, plot } => {
            let cfg = load_config(&config, kind.name())?;
            let seed = seed.unwrap_or_else(entropy_seed);
            let report = run_experiment(&cfg, seed)?;
            let (json_path, csv_path) = report.write_dir(&out)?;
            if plot {
                emit_plot_data(&report, &out.join("plot.csv"))?;
            }
            eprintln!("wrote {} and {} (seed {seed})", json_path.display(), csv_path.display());
            let failed = report.failed_checks();
            if !failed.is_empty() {
                let names: Vec<_> = failed.iter().map(|c| c.name.as_str()).collect();
                return Err(Failure::Checks(format!("checks failed: {}", names.join(", "))));
            }
        }
        Command::Verify { seed } => {
            let outcomes = run_verify(seed);
            let mut out = std::io::stdout().lock();
            for c in &outcomes {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                writeln!(out, "{tag} {} — {}", c.name, c.detail).ok();
            }
            let failed = outcomes.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(Failure::Checks(format!("{failed} of {} checks failed", outcomes.len())));
            }
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InfeasibleSchedule(_) => 3,
        Error::Domain(_)
        | Error::DimensionMismatch { .. }
        | Error::InvalidSpec { .. }
        | Error::Config(_)
        | Error::Json(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("WAISTLAB_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().ok();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks(msg)) => {
            eprintln!("waistlab: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Error(e)) => {
            eprintln!("waistlab: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
