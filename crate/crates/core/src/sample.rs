//! Seeded random generators for polynomials, kernels, points, and
//! structured factorizations. Everything is deterministic given the seed;
//! the randomized suites and the CLI both build on these.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cmatrix::{self, CMatrix};
use crate::factorization::{DiagonalMonomialBlock, StructuredFactorization};
use crate::kernel::HermitianKernelPoly;
use crate::multiindex::MultiIndex;
use crate::poly::MatrixPoly;
use crate::C64;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the master seed; stream prefixes do not
/// depend on how many streams a caller ends up using.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian (unit variance per component).
pub fn gaussian_c64(rng: &mut impl Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian_c64(rng))
}

/// Gaussian matrix rescaled to the requested spectral norm.
pub fn matrix_with_norm(rng: &mut impl Rng, rows: usize, cols: usize, norm: f64) -> CMatrix {
    let m = gaussian_matrix(rng, rows, cols);
    let s = cmatrix::spectral_norm(&m);
    if s == 0.0 {
        return m;
    }
    m.map(|x| x * (norm / s))
}

/// Uniform point of the disk of radius `radius`.
pub fn disk_point(rng: &mut impl Rng, radius: f64) -> C64 {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = rng.random::<f64>() * std::f64::consts::TAU;
    C64::from_polar(r, theta)
}

/// Point of the open polydisk with `|z_i| <= radius`.
pub fn random_point(rng: &mut impl Rng, nvars: usize, radius: f64) -> Vec<C64> {
    (0..nvars).map(|_| disk_point(rng, radius)).collect()
}

/// Random multi-index with total degree at most `max_deg`.
pub fn random_index(rng: &mut impl Rng, nvars: usize, max_deg: u32) -> MultiIndex {
    let mut exps = vec![0u32; nvars];
    let deg = rng.random_range(0..=max_deg);
    for _ in 0..deg {
        exps[rng.random_range(0..nvars)] += 1;
    }
    MultiIndex::new(exps)
}

/// Random matrix polynomial with a handful of Gaussian coefficients of
/// total degree at most `max_deg`.
pub fn random_poly(
    rng: &mut impl Rng,
    nvars: usize,
    rows: usize,
    cols: usize,
    max_deg: u32,
) -> MatrixPoly {
    let terms = rng.random_range(1..=(2 * max_deg as usize + 2));
    let mut p = MatrixPoly::zero(nvars, rows, cols);
    for _ in 0..terms {
        let index = random_index(rng, nvars, max_deg);
        let coeff = gaussian_matrix(rng, rows, cols);
        p = p
            .add(&MatrixPoly::monomial(nvars, index, coeff))
            .expect("matching shapes");
    }
    p
}

/// Random Hermitian-symmetric kernel polynomial (not necessarily PSD).
pub fn random_kernel(rng: &mut impl Rng, nvars: usize, size: usize, max_deg: u32) -> HermitianKernelPoly {
    let mut k = HermitianKernelPoly::zero(nvars, size);
    let terms = rng.random_range(1..=(2 * max_deg as usize + 2));
    for _ in 0..terms {
        let i = random_index(rng, nvars, max_deg);
        let j = random_index(rng, nvars, max_deg);
        let m = gaussian_matrix(rng, size, size);
        if i == j {
            k.add_to_coeff((i, j), &cmatrix::hermitize(&m));
        } else {
            k.add_to_coeff((i.clone(), j.clone()), &m);
            k.add_to_coeff((j, i), &m.adjoint());
        }
    }
    k
}

/// Size caps for [`random_factorization`].
#[derive(Clone, Copy, Debug)]
pub struct FactorizationCaps {
    pub max_nvars: usize,
    pub max_len: usize,
    pub max_block: usize,
    pub max_exp: u32,
}

impl FactorizationCaps {
    /// The randomized-suite caps: N <= 3, l <= 4, blocks <= 3x3,
    /// exponents <= 3.
    pub fn suite() -> Self {
        FactorizationCaps {
            max_nvars: 3,
            max_len: 4,
            max_block: 3,
            max_exp: 3,
        }
    }

    /// Smaller instances for the Gram feasibility search.
    pub fn small() -> Self {
        FactorizationCaps {
            max_nvars: 2,
            max_len: 2,
            max_block: 2,
            max_exp: 2,
        }
    }
}

/// Random valid structured factorization within the caps: scalar factors
/// with spectral norm in [0.15, 0.9], diagonal blocks with random variable
/// and exponents (zero exponents included).
pub fn random_factorization(rng: &mut impl Rng, caps: FactorizationCaps) -> StructuredFactorization {
    let nvars = rng.random_range(1..=caps.max_nvars);
    let len = rng.random_range(0..=caps.max_len);
    // Size chain m = s0, s1, ..., s_len, n = s_{len+1}.
    let sizes: Vec<usize> = (0..len + 2)
        .map(|_| rng.random_range(1..=caps.max_block))
        .collect();
    let mut scalars = Vec::with_capacity(len + 1);
    let mut diagonals = Vec::with_capacity(len);
    for j in 0..=len {
        let norm = 0.15 + 0.75 * rng.random::<f64>();
        scalars.push(matrix_with_norm(rng, sizes[j], sizes[j + 1], norm));
        if j < len {
            let var = rng.random_range(0..nvars);
            let exponents = (0..sizes[j + 1])
                .map(|_| rng.random_range(0..=caps.max_exp))
                .collect();
            diagonals.push(DiagonalMonomialBlock::new(var, exponents));
        }
    }
    StructuredFactorization::new(nvars, scalars, diagonals)
}
