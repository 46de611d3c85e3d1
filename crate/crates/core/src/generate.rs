//! Seeded random instances with controlled properties.

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{rank, DenseMatrix};
use crate::spectra::{check_matrix, spectrum};
use crate::transforms::{build_d_under, build_s_over, ProblemInstance};

/// Resampling budget for [`generate`].
pub const MAX_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct GenOptions {
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    /// Build `C = A X0 + X0^T B` from a random `X0`.
    pub solvable: bool,
    /// Rescale `B` so that some product `lambda_i lambda_j` of the canonical
    /// `S` lies within this distance of 1.
    pub near_reciprocal: Option<f64>,
    /// Resample until the canonical `S` has at least this reciprocal-free
    /// margin and passes the default reciprocal-free test. Ignored together
    /// with `near_reciprocal`.
    pub min_margin: Option<f64>,
}

impl GenOptions {
    pub fn new(m: usize, n: usize, seed: u64) -> Self {
        Self {
            m,
            n,
            seed,
            solvable: false,
            near_reciprocal: None,
            min_margin: None,
        }
    }

    pub fn solvable(mut self, yes: bool) -> Self {
        self.solvable = yes;
        self
    }

    pub fn near_reciprocal(mut self, delta: Option<f64>) -> Self {
        self.near_reciprocal = delta;
        self
    }

    pub fn min_margin(mut self, margin: Option<f64>) -> Self {
        self.min_margin = margin;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub instance: ProblemInstance,
    /// The planted solution when `solvable` was requested.
    pub x0: Option<DenseMatrix>,
    pub attempts: usize,
}

fn uniform(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    let dist = Uniform::new_inclusive(-1.0, 1.0).expect("valid bounds");
    let data = (0..rows * cols).map(|_| dist.sample(rng)).collect();
    DenseMatrix::from_row_major(rows, cols, data).expect("finite samples")
}

/// `S = B^T A^+` when `m >= n`, else `S = B^T D` with `D = A^+`.
pub fn canonical_s(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.rows() >= a.cols() {
        build_s_over(a, b)
    } else {
        b.transpose().matmul(&build_d_under(a)?)
    }
}

/// Draws `A` (full rank), `B` and `C` with entries uniform on `[-1, 1]`,
/// resampling up to [`MAX_ATTEMPTS`] times until the requested properties
/// hold. Identical options give bit-identical instances.
pub fn generate(opts: &GenOptions) -> Result<Generated> {
    let (m, n) = (opts.m, opts.n);
    if m == 0 || n == 0 {
        return Err(Error::Shape(format!("sizes must be positive, got {m}x{n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut last_reason = String::new();

    for attempt in 1..=MAX_ATTEMPTS {
        let a = uniform(&mut rng, m, n);
        let mut b = uniform(&mut rng, n, m);
        let x0 = uniform(&mut rng, n, m);
        let c_free = uniform(&mut rng, m, m);

        if rank(&a, None) < m.min(n) {
            last_reason = "A is rank deficient".into();
            continue;
        }

        if let Some(delta) = opts.near_reciprocal {
            let s = canonical_s(&a, &b)?;
            let sp = spectrum(&s)?;
            let lead = sp.max_modulus();
            if lead == 0.0 {
                last_reason = "S has no nonzero eigenvalue".into();
                continue;
            }
            // lambda * conj(lambda) = |lambda|^2 is real, so scaling B (and
            // with it S) by t moves that product to t^2 |lambda|^2.
            let t = (1.0 + 0.5 * delta).sqrt() / lead;
            b = b.scale(t);
            let (_, check) = check_matrix(&canonical_s(&a, &b)?, Some(delta))?;
            if check.margin() > delta {
                last_reason = format!("rescaled margin {:e} exceeds {delta:e}", check.margin());
                continue;
            }
        } else if let Some(min_margin) = opts.min_margin {
            // Also require the default gate to pass: its tolerance grows with
            // max |lambda|^2 and can exceed `min_margin`.
            let (_, check) = check_matrix(&canonical_s(&a, &b)?, None)?;
            if !check.free || check.margin() < min_margin {
                last_reason = format!("margin {:e} below {min_margin:e}", check.margin());
                continue;
            }
        }

        let (c, x0) = if opts.solvable {
            let c = a.matmul(&x0)?.try_add(&x0.transpose().matmul(&b)?)?;
            (c, Some(x0))
        } else {
            (c_free, None)
        };
        return Ok(Generated {
            instance: ProblemInstance::new(a, b, c)?,
            x0,
            attempts: attempt,
        });
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
        reason: last_reason,
    })
}

/// SplitMix64 step, used to derive independent per-instance seeds.
pub fn mix_seed(base: u64, stream: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
