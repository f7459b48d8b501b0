use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, Context};
use clap::Args;
use tiksplit::imaging::{
    gaussian_psf, phantom as make_phantom, psnr, Algorithm, DeblurOptions, DeblurProblem, DEFAULT_LEVELS,
};

use crate::error::{CliError, CliResult};
use crate::{images, log_csv};

/// Problem setup shared by `deblur` and the reference run of `gap`.
#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// Sharp source image (PGM, PNG or JPEG); height and width divisible by 8.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 9)]
    pub blur_size: usize,
    #[arg(long, default_value_t = 4.0)]
    pub blur_sigma: f64,
    #[arg(long, default_value_t = 2e-5)]
    pub lambda: f64,
    /// Standard deviation of additive Gaussian noise on the [0, 1] scale.
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

impl ProblemArgs {
    fn build(&self) -> CliResult<DeblurProblem> {
        let original = images::load(&self.input)?;
        let psf = gaussian_psf(self.blur_size, self.blur_sigma).map_err(CliError::config)?;
        DeblurProblem::synthesize(
            &original,
            &psf,
            self.lambda,
            DEFAULT_LEVELS,
            self.noise_sigma,
            self.seed,
        )
        .map_err(CliError::config)
    }
}

#[derive(Debug, Args)]
pub struct DeblurArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Where to write the recovered image.
    #[arg(long)]
    pub output: PathBuf,
    /// Where to write the CSV trace.
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Optional path for the blurred observation.
    #[arg(long)]
    pub blurred: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    /// fb-tikhonov, mann-tikhonov, dr-tikhonov, pd-fb or pd-dr.
    #[arg(long, default_value = "fb-tikhonov")]
    pub algo: String,
    /// Relaxation; 0.9 for forward-backward type schemes, 1.8 for Douglas-Rachford type.
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub trace_every: usize,
}

pub fn deblur(args: DeblurArgs) -> CliResult {
    let algo: Algorithm = args.algo.parse().map_err(CliError::config)?;
    if args.iters == 0 {
        return Err(CliError::config(anyhow!("--iters must be >= 1")));
    }
    let prob = args.problem.build()?;
    let reference = prob
        .reference()
        .expect("synthesized problems keep the original")
        .clone();
    let observed = prob.observed();
    if let Some(path) = &args.blurred {
        images::save(&observed, path)?;
    }
    let opts = DeblurOptions {
        iters: args.iters,
        theta: args.theta,
        trace_every: args.trace_every,
        ..DeblurOptions::default()
    };
    let run = prob.solve(algo, &opts).map_err(CliError::config)?;
    images::save(&run.image, &args.output)?;
    if let Some(path) = &args.log {
        log_csv::save(path, &log_csv::rows_from_trace(&run.trace))?;
    }
    // Reported on the 8-bit images as written.
    let blurred_psnr = psnr(&reference, &images::requantize(&observed)).map_err(CliError::config)?;
    let recovered_psnr = psnr(&reference, &images::requantize(&run.image)).map_err(CliError::config)?;
    let objective = prob.objective(&run.coefficients);
    println!("algorithm: {algo}");
    println!("iterations: {}", run.trace.iterations);
    println!("objective: {objective:.10e}");
    println!("blurred PSNR: {blurred_psnr:.4} dB");
    println!("recovered PSNR: {recovered_psnr:.4} dB");
    Ok(())
}

#[derive(Debug, Args)]
pub struct GapArgs {
    #[arg(long)]
    pub log_a: PathBuf,
    #[arg(long)]
    pub log_b: PathBuf,
    /// Where to write the gap table; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Use this value for F(x*) instead of running a reference solve.
    #[arg(long, conflicts_with = "input")]
    pub reference_objective: Option<f64>,
    /// Problem setup for the reference solve (same flags as `deblur`).
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 9)]
    pub blur_size: usize,
    #[arg(long, default_value_t = 4.0)]
    pub blur_sigma: f64,
    #[arg(long, default_value_t = 2e-5)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Length of the reference run as a multiple of the longest log.
    #[arg(long, default_value_t = 5)]
    pub reference_factor: usize,
}

/// Iterations the two grids have in common. One grid may extend the other.
fn common_grid(a: &[log_csv::LogRow], b: &[log_csv::LogRow]) -> CliResult<usize> {
    let len = a.len().min(b.len());
    if let Some(i) = (0..len).find(|&i| a[i].n != b[i].n) {
        return Err(CliError::config(anyhow!(
            "iteration grids differ at row {}: n = {} vs n = {}",
            i + 1,
            a[i].n,
            b[i].n
        )));
    }
    if len == 0 {
        return Err(CliError::config(anyhow!("empty log")));
    }
    Ok(len)
}

pub fn gap(args: GapArgs) -> CliResult {
    let a = log_csv::load(&args.log_a)?;
    let b = log_csv::load(&args.log_b)?;
    let len = common_grid(&a, &b)?;
    let observed_min = a
        .iter()
        .chain(&b)
        .map(|r| r.objective)
        .fold(f64::INFINITY, f64::min);
    let (f_star, source) = match (args.reference_objective, &args.input) {
        (Some(v), _) => (v.min(observed_min), "given reference value".to_string()),
        (None, Some(input)) => {
            let longest = a.iter().chain(&b).map(|r| r.n).max().unwrap_or(1);
            let iters = longest * args.reference_factor.max(1);
            let setup = ProblemArgs {
                input: input.clone(),
                blur_size: args.blur_size,
                blur_sigma: args.blur_sigma,
                lambda: args.lambda,
                noise_sigma: args.noise_sigma,
                seed: args.seed,
            };
            let prob = setup.build()?;
            let opts = DeblurOptions {
                iters,
                trace_every: iters,
                ..DeblurOptions::default()
            };
            let run = prob
                .solve(Algorithm::FbTikhonov, &opts)
                .map_err(CliError::config)?;
            let reference = prob.objective(&run.coefficients);
            (
                reference.min(observed_min),
                format!("{iters}-iteration fb-tikhonov reference run"),
            )
        }
        (None, None) => {
            return Err(CliError::config(anyhow!(
                "pass --input for a reference run or --reference-objective"
            )))
        }
    };
    let mut out: Box<dyn Write> = match &args.output {
        Some(p) => Box::new(
            std::fs::File::create(p)
                .with_context(|| format!("creating {}", p.display()))
                .map_err(CliError::io)?,
        ),
        None => Box::new(std::io::stdout().lock()),
    };
    write_gap(&mut out, &a[..len], &b[..len], f_star, &source).map_err(CliError::io)
}

fn write_gap(
    out: &mut dyn Write,
    a: &[log_csv::LogRow],
    b: &[log_csv::LogRow],
    f_star: f64,
    source: &str,
) -> anyhow::Result<()> {
    writeln!(
        out,
        "# F* = {f_star:e}: minimum objective over both logs and the {source}"
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "gap_a", "gap_b", "gap_diff"])?;
    for (ra, rb) in a.iter().zip(b) {
        let (ga, gb) = (ra.objective - f_star, rb.objective - f_star);
        w.write_record([
            ra.n.to_string(),
            ga.to_string(),
            gb.to_string(),
            (ga - gb).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Args)]
pub struct PsfArgs {
    #[arg(long, default_value_t = 9)]
    pub size: usize,
    #[arg(long, default_value_t = 4.0)]
    pub sigma: f64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn psf(args: PsfArgs) -> CliResult {
    let text = gaussian_psf(args.size, args.sigma)
        .map_err(CliError::config)?
        .to_text();
    match &args.output {
        Some(p) => std::fs::write(p, text)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(CliError::io),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Debug, Args)]
pub struct PhantomArgs {
    #[arg(long, default_value_t = 64)]
    pub height: usize,
    #[arg(long, default_value_t = 64)]
    pub width: usize,
    #[arg(long)]
    pub output: PathBuf,
}

pub fn phantom(args: PhantomArgs) -> CliResult {
    let img = make_phantom(args.height, args.width).map_err(CliError::config)?;
    images::save(&img, &args.output)
}
