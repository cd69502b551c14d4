use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use regfm::cli_io::{
    parse_config, read_matrix, write_atomic, write_field_csv, write_matrix, write_pgm, RunConfig,
};
use regfm::imaging::{
    jaccard, normalize_field, reconstruct_from_spectrum, threshold_mask, threshold_sweep,
    SharpSpectrum,
};
use regfm::indicator::picard_sum;
use regfm::perturb_verify::run_sweep;
use regfm::regularization::{select_alpha, FilterKind, ParamRule};
use regfm::scattering::{add_noise_with, assemble_farfield, rhs_vector};
use regfm::{Error, Result};

#[derive(Parser)]
#[command(
    name = "regfm",
    version,
    about = "Regularized factorization method for far-field data"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// key = value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides noise.seed and verify.seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Suppress progress messages on stderr
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Born far-field matrix of the configured scatterer
    Synthesize,
    /// Multiplicative noise F_ij (1 + δ E_ij)
    Perturb {
        #[arg(long)]
        input: PathBuf,
        /// Overrides noise.delta
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Indicator field as CSV plus a PGM next to it
    Reconstruct {
        #[arg(long)]
        input: PathBuf,
        /// PGM path; defaults to the CSV path with extension .pgm
        #[arg(long)]
        pgm: Option<PathBuf>,
    },
    /// Regularization parameter from the a-priori rule
    ParamSelect {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        kind: Option<String>,
    },
    /// Randomized check of the perturbation bounds
    Verify,
    /// Picard partial sums for the sampling point z
    Picard {
        #[arg(long)]
        input: PathBuf,
        /// Sampling point as `x,y`
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        z: Vec<f64>,
        /// Number of modes; defaults to all retained modes
        #[arg(long)]
        truncation: Option<usize>,
    },
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.noise_seed = seed;
        cfg.verify.seed = seed;
    }
    Ok(cfg)
}

fn require_out(common: &Common) -> Result<&Path> {
    common
        .out
        .as_deref()
        .ok_or_else(|| Error::Argument("--out is required for this subcommand".into()))
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let common = &cli.common;
    let cfg = load_config(common)?;
    let say = |msg: String| {
        if !common.quiet {
            eprintln!("{msg}");
        }
    };

    match &cli.command {
        Command::Synthesize => {
            let out = require_out(common)?;
            let g = cfg.geometry()?;
            let f = assemble_farfield(&g, &cfg.medium, &cfg.wave, &cfg.quadrature()?);
            write_matrix(&f, out)?;
            say(format!(
                "wrote {}x{} far-field matrix to {}",
                f.rows(),
                f.cols(),
                out.display()
            ));
        }
        Command::Perturb { input, delta } => {
            let out = require_out(common)?;
            let delta = delta.unwrap_or(cfg.noise_delta);
            let f = read_matrix(input)?;
            let noisy = add_noise_with(&f, delta, cfg.noise_seed, cfg.noise_norm)?;
            write_matrix(&noisy, out)?;
            say(format!("delta = {delta}, seed = {}", cfg.noise_seed));
        }
        Command::Reconstruct { input, pgm } => {
            let out = require_out(common)?;
            let f = read_matrix(input)?;
            if !f.is_square() || f.rows() != cfg.wave.num_directions {
                return Err(Error::Dimension(format!(
                    "matrix {}x{} does not match wave.directions = {}",
                    f.rows(),
                    f.cols(),
                    cfg.wave.num_directions
                )));
            }
            let spectrum = SharpSpectrum::new(&f, cfg.clamp_rel)?;
            let filter = cfg.filter_spec(spectrum.norm())?;
            let field = reconstruct_from_spectrum(&spectrum.system, &filter, &cfg.wave, &cfg.grid)?
                .with_noise(cfg.noise_delta, cfg.noise_seed);
            let field = normalize_field(&field)?;
            write_field_csv(&field, out)?;
            let pgm = pgm.clone().unwrap_or_else(|| out.with_extension("pgm"));
            write_pgm(&field, &pgm)?;

            let g = cfg.geometry()?;
            let score = jaccard(&threshold_mask(&field, cfg.output_threshold), &g, &cfg.grid)?;
            say(format!(
                "filter = {}, jaccard@{} = {score:.4}",
                filter.kind(),
                cfg.output_threshold
            ));
            if !common.quiet {
                let levels: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
                for (level, j) in threshold_sweep(&field, &g, &levels)? {
                    eprintln!("  threshold {level:.1}: jaccard {j:.4}");
                }
            }
        }
        Command::ParamSelect {
            input,
            delta,
            p,
            kind,
        } => {
            let kind = match kind {
                Some(s) => FilterKind::parse(s)
                    .ok_or_else(|| Error::Argument(format!("unknown filter kind '{s}'")))?,
                None => cfg.filter_kind,
            };
            let delta = delta.unwrap_or(cfg.noise_delta);
            let p = p.unwrap_or(cfg.filter_p);
            let f = read_matrix(input)?;
            let spectrum = SharpSpectrum::new(&f, cfg.clamp_rel)?;
            let rule = ParamRule::new(p)?.with_operator_norm(spectrum.norm());
            let alpha = select_alpha(kind, delta, &rule)?;
            let mut text =
                format!("kind = {kind}\ndelta = {delta:e}\np = {p}\nalpha = {alpha:.16e}\n");
            if kind == FilterKind::Landweber {
                let _ = writeln!(text, "sharp_norm = {:.16e}", spectrum.norm());
            }
            emit(common, &text)?;
        }
        Command::Verify => {
            let reports = run_sweep(&cfg.verify)?;
            let mut text = String::new();
            for r in &reports {
                let _ = writeln!(text, "{r}");
            }
            emit(common, &text)?;
            let failed = reports
                .iter()
                .filter(|r| !r.skipped && !r.satisfied)
                .count();
            let skipped = reports.iter().filter(|r| r.skipped).count();
            say(format!(
                "{} checks, {failed} violated, {skipped} skipped",
                reports.len()
            ));
            if failed > 0 {
                return Err(Error::Numerical(format!("{failed} bound checks violated")));
            }
        }
        Command::Picard {
            input,
            z,
            truncation,
        } => {
            let [x, y] = z[..] else {
                return Err(Error::Argument(format!(
                    "--z takes two values x,y, got {}",
                    z.len()
                )));
            };
            let f = read_matrix(input)?;
            let spectrum = SharpSpectrum::new(&f, cfg.clamp_rel)?;
            let s = &spectrum.system;
            let ell = rhs_vector([x, y], cfg.wave.k, &cfg.wave);
            let report = picard_sum(s, &ell, truncation.unwrap_or(s.len()))?;
            let mut text = String::from("n,lambda,partial_sum\n");
            for (i, sum) in report.partial_sums.iter().enumerate() {
                let _ = writeln!(text, "{},{:.16e},{:.16e}", i + 1, s.lambdas()[i], sum);
            }
            emit(common, &text)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
