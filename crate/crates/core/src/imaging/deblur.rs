//! The wavelet-domain deblurring problem
//!
//! ```text
//! min_x F(x) = ‖Ax − b‖² + λ‖x‖₁,    A = R ∘ W⁻¹,
//! ```
//!
//! where `x` holds Haar coefficients, `W` is the orthonormal transform and
//! `R` the Neumann Gaussian blur. The recovered image is `W⁻¹x`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::haar::{dwt_slice, idwt_slice};
use super::{psnr, GaussianPsf, Image, ImageDims, NeumannBlur};
use crate::error::{check_dims, invalid, Error, Result};
use crate::fixed_point::{mann_tikhonov_baseline, NonexpansiveMap};
use crate::operators::{safe_norm_bound, CocoerciveOperator, LinearOperator, Proximable};
use crate::primal_dual::{
    pd_dr_prox_solve, pd_fb_prox_solve, DrProxBlock, DualLink, FbProxDual, FbProxProblem, FbProxSystem,
};
use crate::schedule::default_schedule;
use crate::splitting::{dr_tikhonov_prox, fb_tikhonov_prox, CompositeTerm};
use crate::trace::{ProbeValues, SolveTrace, SolverConfig};
use crate::vector::{ProductVector, Vector};

pub const DEFAULT_LEVELS: usize = 3;

/// `A = R ∘ W⁻¹` on row-major coefficient arrays, with adjoint `W ∘ Rᵀ`.
pub fn compose_deblur_operator(psf: &GaussianPsf, levels: usize, dims: ImageDims) -> Result<LinearOperator> {
    dims.check_levels(levels)?;
    Ok(deblur_operator(NeumannBlur::new(psf.clone(), dims)?, levels))
}

fn deblur_operator(blur: NeumannBlur, levels: usize) -> LinearOperator {
    let dims = blur.dims();
    let back = blur.clone();
    LinearOperator::new(
        dims.len(),
        dims.len(),
        move |x| Vector::from_vec(blur.apply_slice(&idwt_slice(x.as_slice(), dims, levels))),
        move |y| Vector::from_vec(dwt_slice(&back.adjoint_slice(y.as_slice()), dims, levels)),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    FbTikhonov,
    MannTikhonov,
    DrTikhonov,
    PdFb,
    PdDr,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::FbTikhonov,
        Algorithm::MannTikhonov,
        Algorithm::DrTikhonov,
        Algorithm::PdFb,
        Algorithm::PdDr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::FbTikhonov => "fb-tikhonov",
            Algorithm::MannTikhonov => "mann-tikhonov",
            Algorithm::DrTikhonov => "dr-tikhonov",
            Algorithm::PdFb => "pd-fb",
            Algorithm::PdDr => "pd-dr",
        }
    }

    /// 0.9 for forward–backward type schemes, 1.8 for Douglas–Rachford type.
    pub fn default_theta(self) -> f64 {
        match self {
            Algorithm::DrTikhonov | Algorithm::PdDr => 1.8,
            _ => 0.9,
        }
    }

    fn theta_cap(self) -> f64 {
        match self {
            Algorithm::FbTikhonov | Algorithm::MannTikhonov => 1.0,
            _ => 2.0,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
            invalid(format!(
                "unknown algorithm {s:?} (expected one of {})",
                names.join(", ")
            ))
        })
    }
}

#[derive(Clone, Debug)]
pub struct DeblurOptions {
    pub iters: usize,
    /// Relaxation; `None` uses [`Algorithm::default_theta`].
    pub theta: Option<f64>,
    pub trace_every: usize,
    pub residual_tol: f64,
    /// Step-size override: `γ` for the splitting schemes, `τ = σ` for the
    /// primal–dual ones.
    pub step: Option<f64>,
}

impl Default for DeblurOptions {
    fn default() -> Self {
        Self {
            iters: 1000,
            theta: None,
            trace_every: 1,
            residual_tol: 0.0,
            step: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DeblurRun {
    pub algorithm: Algorithm,
    pub coefficients: Vector,
    pub image: Image,
    pub trace: SolveTrace,
}

/// Separable eigendecomposition of `R` for the exact prox of `‖A· − b‖²`.
#[derive(Debug)]
struct BlurSpectrum {
    rows: DMatrix<f64>,
    row_values: Vec<f64>,
    cols: DMatrix<f64>,
    col_values: Vec<f64>,
}

impl BlurSpectrum {
    fn new(blur: &NeumannBlur) -> Self {
        let ImageDims { height, width } = blur.dims();
        let r = SymmetricEigen::new(DMatrix::from_row_slice(width, width, &blur.axis_matrix(false)));
        let c = SymmetricEigen::new(DMatrix::from_row_slice(height, height, &blur.axis_matrix(true)));
        Self {
            rows: r.eigenvectors,
            row_values: r.eigenvalues.iter().copied().collect(),
            cols: c.eigenvectors,
            col_values: c.eigenvalues.iter().copied().collect(),
        }
    }

    /// `(I + 2γR²)⁻¹` on a row-major image.
    fn solve(&self, gamma: f64, data: &[f64]) -> Vec<f64> {
        let (h, w) = (self.col_values.len(), self.row_values.len());
        let x = DMatrix::from_row_slice(h, w, data);
        let mut modes = self.cols.transpose() * x * &self.rows;
        for i in 0..h {
            for j in 0..w {
                let lam = self.col_values[i] * self.row_values[j];
                modes[(i, j)] /= 1.0 + 2.0 * gamma * lam * lam;
            }
        }
        let out = &self.cols * modes * self.rows.transpose();
        let mut flat = Vec::with_capacity(h * w);
        for i in 0..h {
            for j in 0..w {
                flat.push(out[(i, j)]);
            }
        }
        flat
    }
}

#[derive(Clone)]
pub struct DeblurProblem {
    blur: NeumannBlur,
    levels: usize,
    op: LinearOperator,
    observed: Vector,
    lambda: f64,
    reference: Option<Image>,
    norm_bound: f64,
    spectrum: Arc<std::sync::OnceLock<BlurSpectrum>>,
}

impl fmt::Debug for DeblurProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DeblurProblem")
            .field("dims", &self.blur.dims())
            .field("psf_size", &self.blur.psf().size())
            .field("levels", &self.levels)
            .field("lambda", &self.lambda)
            .field("norm_bound", &self.norm_bound)
            .finish()
    }
}

impl DeblurProblem {
    /// Problem for an already blurred observation.
    pub fn new(observed: &Image, psf: &GaussianPsf, lambda: f64, levels: usize) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(invalid(format!("lambda must be >= 0, got {lambda}")));
        }
        let dims = observed.dims();
        dims.check_levels(levels)?;
        let blur = NeumannBlur::new(psf.clone(), dims)?;
        let op = deblur_operator(blur.clone(), levels);
        let norm_bound = safe_norm_bound(&op);
        Ok(Self {
            blur,
            levels,
            op,
            observed: observed.to_vector(),
            lambda,
            reference: None,
            norm_bound,
            spectrum: Arc::new(std::sync::OnceLock::new()),
        })
    }

    /// Blurs `original`, optionally adds seeded Gaussian noise of standard
    /// deviation `noise_sigma`, and keeps `original` as PSNR reference.
    pub fn synthesize(
        original: &Image,
        psf: &GaussianPsf,
        lambda: f64,
        levels: usize,
        noise_sigma: f64,
        seed: u64,
    ) -> Result<Self> {
        if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
            return Err(invalid(format!("noise sigma must be >= 0, got {noise_sigma}")));
        }
        original.dims().check_levels(levels)?;
        let mut blurred = NeumannBlur::new(psf.clone(), original.dims())?.apply_slice(original.pixels());
        if noise_sigma > 0.0 {
            let normal = Normal::new(0.0, noise_sigma).map_err(|e| invalid(e.to_string()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for v in &mut blurred {
                *v += normal.sample(&mut rng);
            }
        }
        let observed = Image::new(original.height(), original.width(), blurred)?;
        Ok(Self::new(&observed, psf, lambda, levels)?.with_reference(original.clone()))
    }

    pub fn with_reference(mut self, reference: Image) -> Self {
        self.reference = Some(reference);
        self
    }

    pub fn dims(&self) -> ImageDims {
        self.blur.dims()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn operator(&self) -> &LinearOperator {
        &self.op
    }

    /// Upper bound on `‖A‖` used for step sizes.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn observed(&self) -> Image {
        Image::from_vector(self.dims().height, self.dims().width, &self.observed).expect("valid dims")
    }

    pub fn reference(&self) -> Option<&Image> {
        self.reference.as_ref()
    }

    /// `F(x) = ‖Ax − b‖² + λ‖x‖₁`.
    pub fn objective(&self, x: &Vector) -> f64 {
        (&self.op.apply(x) - &self.observed).norm_sq() + self.lambda * x.norm_l1()
    }

    /// Starting point `W b`: the observation itself.
    pub fn initial_coefficients(&self) -> Vector {
        Vector::from_vec(dwt_slice(self.observed.as_slice(), self.dims(), self.levels))
    }

    /// `W⁻¹x`.
    pub fn recover_image(&self, x: &Vector) -> Image {
        let d = self.dims();
        Image::new(d.height, d.width, idwt_slice(x.as_slice(), d, self.levels)).expect("finite coefficients")
    }

    /// PSNR of `W⁻¹x`, clamped to `[0, 1]`, against the reference.
    pub fn psnr_of(&self, x: &Vector) -> Option<f64> {
        let reference = self.reference.as_ref()?;
        psnr(reference, &self.recover_image(x).clamped()).ok()
    }

    /// `x ↦ 2Aᵀ(Ax − b)`, `1/(2‖A‖²)`-cocoercive.
    pub fn data_gradient(&self) -> CocoerciveOperator {
        CocoerciveOperator::least_squares(self.op.clone(), self.observed.clone(), 2.0, self.norm_bound)
            .expect("positive norm bound")
    }

    pub fn sparsity(&self) -> Proximable {
        Proximable::l1(self.lambda).expect("validated lambda")
    }

    /// `‖A· − b‖²` with its exact prox
    /// `x = W(I + 2γR²)⁻¹(W⁻¹v + 2γRb)`.
    pub fn data_fidelity(&self) -> Proximable {
        let (blur, levels, b) = (self.blur.clone(), self.levels, self.observed.clone());
        let spectrum = self.spectrum.clone();
        let rb = blur.adjoint_slice(b.as_slice());
        let dims = blur.dims();
        let value_op = self.op.clone();
        let value_b = self.observed.clone();
        Proximable::new(move |gamma, v| {
            let eig = spectrum.get_or_init(|| BlurSpectrum::new(&blur));
            let mut img = idwt_slice(v.as_slice(), dims, levels);
            for (p, q) in img.iter_mut().zip(&rb) {
                *p += 2.0 * gamma * q;
            }
            Vector::from_vec(dwt_slice(&eig.solve(gamma, &img), dims, levels))
        })
        .with_value(move |x| (&value_op.apply(x) - &value_b).norm_sq())
    }

    /// Objective and (when a reference is set) PSNR of an iterate.
    pub fn probe(&self) -> impl Fn(&Vector) -> ProbeValues + Send + Sync + 'static {
        let me = self.clone();
        move |x| ProbeValues {
            objective: Some(me.objective(x)),
            psnr: me.psnr_of(x),
        }
    }

    /// Default step for `algo`: `γ = 1.9β` for the forward–backward schemes,
    /// `γ = 1` for Douglas–Rachford, `τ = σ = 0.95/‖A‖` and `1.9/‖A‖` for the
    /// two primal–dual schemes.
    pub fn default_step(&self, algo: Algorithm) -> f64 {
        let n = self.norm_bound;
        match algo {
            Algorithm::FbTikhonov | Algorithm::MannTikhonov => 1.9 / (2.0 * n * n),
            Algorithm::DrTikhonov => 1.0,
            Algorithm::PdFb => 0.95 / n,
            Algorithm::PdDr => 1.9 / n,
        }
    }

    pub fn solve(&self, algo: Algorithm, opts: &DeblurOptions) -> Result<DeblurRun> {
        let theta = opts.theta.unwrap_or_else(|| algo.default_theta());
        let sched = default_schedule(theta, algo.theta_cap())?;
        let cfg = SolverConfig::new(opts.iters, opts.residual_tol)?
            .with_trace_every(opts.trace_every)
            .with_probe(self.probe());
        let step = opts.step.unwrap_or_else(|| self.default_step(algo));
        if !(step > 0.0 && step.is_finite()) {
            return Err(invalid(format!("step must be positive, got {step}")));
        }
        let x1 = self.initial_coefficients();
        let (coefficients, trace) = match algo {
            Algorithm::FbTikhonov => {
                let term = CompositeTerm::new(self.sparsity(), self.data_gradient(), step);
                fb_tikhonov_prox(&term, &term, &x1, &sched, &cfg)?
            }
            Algorithm::MannTikhonov => {
                let grad = self.data_gradient();
                let limit = 2.0 * grad.beta();
                if step >= limit {
                    return Err(Error::Condition {
                        condition: "gamma < 2*beta",
                        detail: format!("gamma = {step}, 2*beta = {limit}"),
                    });
                }
                let f = self.sparsity();
                let t = NonexpansiveMap::new(move |x| f.prox(step, &x.lincomb(1.0, &grad.apply(x), -step)));
                mann_tikhonov_baseline(&t, &x1, &sched, &cfg)?
            }
            Algorithm::DrTikhonov => {
                let out = dr_tikhonov_prox(&self.sparsity(), &self.data_fidelity(), step, &x1, &sched, &cfg)?;
                (out.y, out.trace)
            }
            Algorithm::PdFb => {
                let link = DualLink::new(self.op.clone(), step).with_norm(self.norm_bound);
                let g = Proximable::squared_distance(self.observed.clone(), 2.0)?;
                let system = FbProxSystem::new(
                    self.sparsity(),
                    CocoerciveOperator::zero(),
                    vec![FbProxDual::new(g)],
                );
                let prob = FbProxProblem::new(step, vec![link], system);
                let init = ProductVector::from_parts(x1, vec![Vector::zeros(self.dims().len())]);
                let (z, trace) = pd_fb_prox_solve(&prob, &init, &sched, &cfg)?;
                (z.primal().clone(), trace)
            }
            Algorithm::PdDr => {
                let link = DualLink::new(self.op.clone(), step).with_norm(self.norm_bound);
                let g = Proximable::squared_distance(self.observed.clone(), 2.0)?;
                let init = ProductVector::from_parts(x1, vec![Vector::zeros(self.dims().len())]);
                let out = pd_dr_prox_solve(
                    &self.sparsity(),
                    &[DrProxBlock::new(link, g)],
                    step,
                    &init,
                    &sched,
                    &cfg,
                )?;
                (out.shadow.primal().clone(), out.trace)
            }
        };
        check_dims(coefficients.dim(), self.dims().len())?;
        Ok(DeblurRun {
            algorithm: algo,
            image: self.recover_image(&coefficients),
            coefficients,
            trace,
        })
    }
}
