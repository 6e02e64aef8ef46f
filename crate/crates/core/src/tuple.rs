//! Commuting tuples of strict contractions, polynomial evaluation
//! `F(T) = sum_I A_I (x) T^I`, and randomized lower-bound search for the
//! u-norm `sup ||F(T)||`.
//!
//! Tuples are generated from parameterized families that commute by
//! construction (simultaneous diagonalization, polynomials of a single
//! generator, or the upper-triangular commutant of a distinct-diagonal
//! seed). The hill climb perturbs the family parameters, never the
//! matrices, so iterates stay exactly commuting.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::cmatrix::{self, CMatrix};
use crate::error::{Error, Result};
use crate::exec;
use crate::factorization::AglerDecomposition;
use crate::poly::MatrixPoly;
use crate::sample;
use crate::C64;

/// Commutator tolerance (Frobenius) for a valid tuple.
pub const COMMUTATOR_TOL: f64 = 1e-10;
/// Strictness margin: `||T_i|| <= 1 - STRICT_MARGIN`.
pub const STRICT_MARGIN: f64 = 1e-9;
/// Spectral-norm cap for generated tuples.
pub const GENERATION_CAP: f64 = 0.95;
/// Lifted cap used by the final polish inside the u-norm search.
pub const POLISH_CAP: f64 = 1.0 - 1e-6;

/// `N` square complex matrices of a common dimension, intended to commute
/// pairwise with spectral norms below one.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutingTuple {
    matrices: Vec<CMatrix>,
    dim: usize,
}

impl CommutingTuple {
    pub fn new(matrices: Vec<CMatrix>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::invalid("a commuting tuple needs at least one matrix"));
        }
        let dim = matrices[0].nrows();
        for (i, m) in matrices.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::shape(format!(
                    "tuple entry {i} is {}x{}, expected {dim}x{dim}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(CommutingTuple { matrices, dim })
    }

    /// A point of the polydisk as a tuple of 1x1 matrices.
    pub fn from_point(z: &[C64]) -> Self {
        CommutingTuple {
            matrices: z.iter().map(|&v| cmatrix::scalar(v)).collect(),
            dim: 1,
        }
    }

    pub fn nvars(&self) -> usize {
        self.matrices.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, i: usize) -> &CMatrix {
        &self.matrices[i]
    }

    /// The tuple `(T_1 e^{i theta}, ..., T_N e^{i theta})`.
    pub fn rotate(&self, theta: f64) -> CommutingTuple {
        let phase = C64::from_polar(1.0, theta);
        CommutingTuple {
            matrices: self.matrices.iter().map(|m| m.map(|x| x * phase)).collect(),
            dim: self.dim,
        }
    }

    /// Commutator residuals and spectral norms; report-only.
    pub fn validate(&self) -> TupleValidation {
        let mut commutators = Vec::new();
        for i in 0..self.matrices.len() {
            for j in (i + 1)..self.matrices.len() {
                let comm = &self.matrices[i] * &self.matrices[j]
                    - &self.matrices[j] * &self.matrices[i];
                commutators.push(((i, j), cmatrix::frobenius_norm(&comm)));
            }
        }
        let norms = self.matrices.iter().map(cmatrix::spectral_norm).collect();
        TupleValidation { commutators, norms }
    }
}

#[derive(Clone, Debug)]
pub struct TupleValidation {
    /// `((i, j), ||T_i T_j - T_j T_i||_F)` for `i < j`.
    pub commutators: Vec<((usize, usize), f64)>,
    /// Spectral norm per matrix.
    pub norms: Vec<f64>,
}

impl TupleValidation {
    pub fn is_valid(&self) -> bool {
        self.commutators.iter().all(|&(_, r)| r <= COMMUTATOR_TOL)
            && self.norms.iter().all(|&n| n <= 1.0 - STRICT_MARGIN)
    }
}

/// `F(T) = sum_I A_I (x) T^I` with `T^I = T_1^{i_1} ... T_N^{i_N}`.
/// Result is `(rows*d) x (cols*d)`. For `d = 1` this coincides with
/// pointwise evaluation.
pub fn eval_at_tuple(f: &MatrixPoly, t: &CommutingTuple) -> Result<CMatrix> {
    eval_with_order(f, t, false)
}

fn eval_with_order(f: &MatrixPoly, t: &CommutingTuple, reversed: bool) -> Result<CMatrix> {
    if f.nvars() != t.nvars() {
        return Err(Error::shape(format!(
            "polynomial in {} variables evaluated at {}-tuple",
            f.nvars(),
            t.nvars()
        )));
    }
    let d = t.dim();
    let powers = tuple_powers(f, t);
    let mut acc = cmatrix::zeros(f.rows() * d, f.cols() * d);
    for (index, coeff) in f.iter() {
        let mut t_pow = cmatrix::identity(d);
        let order: Vec<usize> = if reversed {
            (0..t.nvars()).rev().collect()
        } else {
            (0..t.nvars()).collect()
        };
        for v in order {
            let e = index.exponent(v);
            if e > 0 {
                t_pow = &t_pow * &powers[v][&e];
            }
        }
        acc += cmatrix::kron(coeff, &t_pow);
    }
    Ok(acc)
}

/// Per-variable powers needed by `f`, each computed by repeated squaring.
fn tuple_powers(f: &MatrixPoly, t: &CommutingTuple) -> Vec<BTreeMap<u32, CMatrix>> {
    let mut needed: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); t.nvars()];
    for (index, _) in f.iter() {
        for (v, set) in needed.iter_mut().enumerate() {
            let e = index.exponent(v);
            if e > 0 {
                set.insert(e);
            }
        }
    }
    needed
        .into_iter()
        .enumerate()
        .map(|(v, exps)| {
            exps.into_iter()
                .map(|e| (e, cmatrix::matrix_power(t.matrix(v), e)))
                .collect()
        })
        .collect()
}

/// Tuple generation strategies. All three produce exactly commuting
/// families; they differ in which corner of the family they explore.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// `T_i = S diag(lambda_i) S^{-1}` with a shared random similarity.
    Diagonalizable,
    /// `T_i = p_i(M)` for one random generator and random polynomials.
    SingleGenerator,
    /// Random elements of the upper-triangular commutant of a
    /// distinct-diagonal seed, found by solving `[M, X] = 0`.
    UpperTriangular,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [
        Strategy::Diagonalizable,
        Strategy::SingleGenerator,
        Strategy::UpperTriangular,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Diagonalizable => "diagonalizable",
            Strategy::SingleGenerator => "single-generator",
            Strategy::UpperTriangular => "upper-triangular",
        }
    }

    pub fn parse(s: &str) -> Option<Strategy> {
        match s {
            "diagonalizable" => Some(Strategy::Diagonalizable),
            "single-generator" => Some(Strategy::SingleGenerator),
            "upper-triangular" => Some(Strategy::UpperTriangular),
            _ => None,
        }
    }
}

/// A commuting family parameterized linearly per variable: scaling
/// `params[i]` scales `T_i`, and any parameter values commute.
struct TupleFamily {
    nvars: usize,
    dim: usize,
    kind: FamilyKind,
    params: Vec<Vec<C64>>,
}

enum FamilyKind {
    Diag { s: CMatrix, s_inv: CMatrix },
    Generator { powers: Vec<CMatrix> },
    Commutant { basis: Vec<CMatrix> },
}

impl TupleFamily {
    fn sample(strategy: Strategy, nvars: usize, dim: usize, rng: &mut impl Rng) -> Result<Self> {
        const ATTEMPTS: usize = 32;
        for _ in 0..ATTEMPTS {
            let fam = match strategy {
                Strategy::Diagonalizable => Self::sample_diag(nvars, dim, rng),
                Strategy::SingleGenerator => Self::sample_generator(nvars, dim, rng),
                Strategy::UpperTriangular => Self::sample_commutant(nvars, dim, rng),
            };
            if let Some(fam) = fam {
                let t = fam.build(GENERATION_CAP);
                if CommutingTuple::new(t)?.validate().is_valid() {
                    return Ok(fam);
                }
            }
        }
        Err(Error::numerics(format!(
            "tuple construction failed after {ATTEMPTS} attempts (strategy {})",
            strategy.name()
        )))
    }

    fn sample_diag(nvars: usize, dim: usize, rng: &mut impl Rng) -> Option<TupleFamily> {
        let s = sample::gaussian_matrix(rng, dim, dim);
        let sv = s.clone().svd(false, false).singular_values;
        let (smax, smin) = (sv.max(), sv.min());
        if smin <= 0.02 * smax {
            return None;
        }
        let s_inv = s.clone().lu().try_inverse()?;
        let params = (0..nvars)
            .map(|_| (0..dim).map(|_| sample::disk_point(rng, 1.0)).collect())
            .collect();
        Some(TupleFamily {
            nvars,
            dim,
            kind: FamilyKind::Diag { s, s_inv },
            params,
        })
    }

    fn sample_generator(nvars: usize, dim: usize, rng: &mut impl Rng) -> Option<TupleFamily> {
        let m = sample::matrix_with_norm(rng, dim, dim, 1.0);
        let mut powers = Vec::with_capacity(dim);
        let mut p = cmatrix::identity(dim);
        for _ in 0..dim {
            powers.push(p.clone());
            p = &p * &m;
        }
        let params = (0..nvars)
            .map(|_| (0..dim).map(|_| sample::gaussian_c64(rng)).collect())
            .collect();
        Some(TupleFamily {
            nvars,
            dim,
            kind: FamilyKind::Generator { powers },
            params,
        })
    }

    fn sample_commutant(nvars: usize, dim: usize, rng: &mut impl Rng) -> Option<TupleFamily> {
        // Distinct-diagonal upper-triangular seed.
        let mut seed = cmatrix::zeros(dim, dim);
        for r in 0..dim {
            for c in r..dim {
                seed[(r, c)] = if r == c {
                    // Spread the diagonal to keep the commutant exactly
                    // d-dimensional.
                    C64::from_polar(0.3 + 0.6 * rng.random::<f64>(), std::f64::consts::TAU * (r as f64 + rng.random::<f64>() * 0.8) / dim as f64)
                } else {
                    sample::gaussian_c64(rng).scale(0.5)
                };
            }
        }
        let basis = ut_commutant_basis(&seed)?;
        let params = (0..nvars)
            .map(|_| (0..basis.len()).map(|_| sample::gaussian_c64(rng)).collect())
            .collect();
        Some(TupleFamily {
            nvars,
            dim,
            kind: FamilyKind::Commutant { basis },
            params,
        })
    }

    fn build_raw(&self, i: usize) -> CMatrix {
        let p = &self.params[i];
        match &self.kind {
            FamilyKind::Diag { s, s_inv } => {
                let lambda = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(p.clone()));
                s * lambda * s_inv
            }
            FamilyKind::Generator { powers } => {
                let mut acc = cmatrix::zeros(self.dim, self.dim);
                for (k, c) in p.iter().enumerate() {
                    acc += powers[k].map(|x| x * c);
                }
                acc
            }
            FamilyKind::Commutant { basis } => {
                let mut acc = cmatrix::zeros(self.dim, self.dim);
                for (k, c) in p.iter().enumerate() {
                    acc += basis[k].map(|x| x * c);
                }
                acc
            }
        }
    }

    /// Build the tuple with every matrix capped at spectral norm `cap`.
    fn build(&self, cap: f64) -> Vec<CMatrix> {
        (0..self.nvars)
            .map(|i| {
                let m = self.build_raw(i);
                let norm = cmatrix::spectral_norm(&m);
                if norm > cap {
                    m.map(|x| x * (cap / norm))
                } else {
                    m
                }
            })
            .collect()
    }

    /// Rescale `params[i]` so the built `T_i` sits at spectral norm `cap`.
    fn scale_var_to(&mut self, i: usize, cap: f64) {
        let norm = cmatrix::spectral_norm(&self.build_raw(i));
        if norm > 0.0 {
            let factor = C64::new(cap / norm, 0.0);
            for c in &mut self.params[i] {
                *c *= factor;
            }
        }
    }
}

/// Basis of upper-triangular solutions of `[M, X] = 0` via an SVD
/// nullspace; for a distinct-diagonal `M` this is the polynomial algebra
/// of `M` (dimension `d`).
fn ut_commutant_basis(m: &CMatrix) -> Option<Vec<CMatrix>> {
    let d = m.nrows();
    let slots: Vec<(usize, usize)> = (0..d)
        .flat_map(|r| (r..d).map(move |c| (r, c)))
        .collect();
    let mut a = cmatrix::zeros(d * d, slots.len());
    for (s, &(r, c)) in slots.iter().enumerate() {
        let mut e = cmatrix::zeros(d, d);
        e[(r, c)] = C64::new(1.0, 0.0);
        let k = m * &e - &e * m;
        for col in 0..d {
            for row in 0..d {
                a[(col * d + row, s)] = k[(row, col)];
            }
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t?;
    let smax = svd.singular_values.max();
    let mut basis = Vec::new();
    for (j, &sv) in svd.singular_values.iter().enumerate() {
        if sv <= 1e-10 * smax.max(1e-300) {
            let row = v_t.row(j).adjoint();
            let mut x = cmatrix::zeros(d, d);
            for (s, &(r, c)) in slots.iter().enumerate() {
                x[(r, c)] = row[s];
            }
            let norm = cmatrix::frobenius_norm(&x);
            basis.push(x.map(|v| v / C64::new(norm, 0.0)));
        }
    }
    // v_t only carries min(d^2, slots) rows; any remaining right-singular
    // directions past the rank are also null. For slots <= d^2 (always
    // true) the SVD above is complete, so just require a nonempty basis.
    if basis.is_empty() {
        None
    } else {
        Some(basis)
    }
}

/// Deterministic tuple generation: `(seed, strategy)` fixes the output
/// bit-for-bit.
pub fn random_commuting_tuple(
    nvars: usize,
    dim: usize,
    seed: u64,
    strategy: Strategy,
) -> Result<CommutingTuple> {
    let mut rng = sample::rng_from_seed(seed);
    let fam = TupleFamily::sample(strategy, nvars, dim, &mut rng)?;
    CommutingTuple::new(fam.build(GENERATION_CAP))
}

/// Search budget for [`estimate_u_norm`].
#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    pub restarts: usize,
    pub iters: usize,
    pub max_dim: usize,
    /// Fixed strategy, or `None` to cycle through all of them.
    pub strategy: Option<Strategy>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            restarts: 32,
            iters: 200,
            max_dim: 2,
            strategy: None,
        }
    }
}

/// Lower bound for the u-norm with the tuple that witnessed it.
#[derive(Clone, Debug)]
pub struct UNormEstimate {
    pub value: f64,
    pub witness: CommutingTuple,
    pub restart: usize,
    pub strategy: Strategy,
}

/// Randomized lower-bound search for `||F||_u`: independent restarts
/// (parallel, deterministically reduced), coordinate hill climbing on the
/// family parameters with a step annealed by halving after five straight
/// rejections, and a final polish at the lifted norm cap.
pub fn estimate_u_norm(f: &MatrixPoly, budget: &SearchBudget, seed: u64) -> Result<UNormEstimate> {
    let restarts = budget.restarts.max(1);
    let outcomes = exec::map_indexed(restarts, |r| restart_climb(f, budget, seed, r));
    reduce_restarts(outcomes)
}

/// Sequential twin of [`estimate_u_norm`]; same restart streams, same
/// reduction, same result.
pub fn estimate_u_norm_seq(
    f: &MatrixPoly,
    budget: &SearchBudget,
    seed: u64,
) -> Result<UNormEstimate> {
    let restarts = budget.restarts.max(1);
    let outcomes = exec::map_indexed_seq(restarts, |r| restart_climb(f, budget, seed, r));
    reduce_restarts(outcomes)
}

fn reduce_restarts(
    outcomes: Vec<Result<(f64, CommutingTuple, Strategy)>>,
) -> Result<UNormEstimate> {
    let mut values = Vec::with_capacity(outcomes.len());
    for outcome in &outcomes {
        match outcome {
            Ok((v, _, _)) => values.push(*v),
            Err(e) => return Err(Error::numerics(format!("restart failed: {e}"))),
        }
    }
    let (best_idx, value) = exec::max_by_value(&values).expect("at least one restart");
    let (_, witness, strategy) = outcomes[best_idx].as_ref().unwrap().clone();
    Ok(UNormEstimate {
        value,
        witness,
        restart: best_idx,
        strategy,
    })
}

fn restart_climb(
    f: &MatrixPoly,
    budget: &SearchBudget,
    seed: u64,
    restart: usize,
) -> Result<(f64, CommutingTuple, Strategy)> {
    let mut rng = sample::rng_stream(seed, restart as u64 + 1);
    let strategy = budget
        .strategy
        .unwrap_or(Strategy::ALL[restart % Strategy::ALL.len()]);
    let dim = rng.random_range(1..=budget.max_dim.max(1));
    let mut fam = TupleFamily::sample(strategy, f.nvars(), dim, &mut rng)?;

    let objective = |fam: &TupleFamily, cap: f64| -> Result<(f64, Vec<CMatrix>)> {
        let mats = fam.build(cap);
        let t = CommutingTuple::new(mats.clone())?;
        Ok((cmatrix::spectral_norm(&eval_at_tuple(f, &t)?), mats))
    };

    let (mut best, _) = objective(&fam, GENERATION_CAP)?;
    climb(f, &mut fam, &mut best, GENERATION_CAP, budget.iters, &mut rng)?;

    // Polish: push each variable to the lifted cap when that helps, then
    // climb briefly inside the lifted family.
    for i in 0..fam.nvars {
        let saved = fam.params[i].clone();
        fam.scale_var_to(i, POLISH_CAP);
        let (val, _) = objective(&fam, POLISH_CAP)?;
        if val > best {
            best = val;
        } else {
            fam.params[i] = saved;
        }
    }
    climb(f, &mut fam, &mut best, POLISH_CAP, budget.iters / 4, &mut rng)?;

    let mats = fam.build(POLISH_CAP);
    Ok((best, CommutingTuple::new(mats)?, strategy))
}

fn climb(
    f: &MatrixPoly,
    fam: &mut TupleFamily,
    best: &mut f64,
    cap: f64,
    iters: usize,
    rng: &mut impl Rng,
) -> Result<()> {
    let mut step = 0.3_f64;
    let mut rejections = 0usize;
    for _ in 0..iters {
        if step < 1e-10 {
            break;
        }
        let var = rng.random_range(0..fam.nvars);
        let k = rng.random_range(0..fam.params[var].len().max(1));
        if fam.params[var].is_empty() {
            break;
        }
        let saved = fam.params[var][k];
        let kick = sample::gaussian_c64(rng);
        let candidate = if saved.norm() < 1e-12 {
            saved + kick.scale(0.1 * step)
        } else {
            saved * (C64::new(1.0, 0.0) + kick.scale(step))
        };
        fam.params[var][k] = candidate;
        let t = CommutingTuple::new(fam.build(cap))?;
        let val = cmatrix::spectral_norm(&eval_at_tuple(f, &t)?);
        if val > *best {
            *best = val;
            rejections = 0;
        } else {
            fam.params[var][k] = saved;
            rejections += 1;
            if rejections >= 5 {
                step *= 0.5;
                rejections = 0;
            }
        }
    }
    Ok(())
}

/// Report for the norm bound `||P(T)|| <= sqrt(1 - delta)` and the
/// operator identity with the defects `I - T_i T_i*`.
#[derive(Clone, Debug)]
pub struct NormBoundReport {
    pub p_norm: f64,
    pub delta: f64,
    pub bound: f64,
    pub identity_residual: f64,
}

impl NormBoundReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.p_norm <= self.bound + tol && self.identity_residual <= tol
    }
}

/// Check `||P(T)|| <= sqrt(1 - min_eig(R))` and the operator identity
/// `I - P(T)P(T)* = R (x) I + P0(T)P0(T)*
///  + sum_i P_i(T) (I (x) (I - T_i T_i*)) P_i(T)*` in operator norm.
pub fn verify_norm_bound(
    dec: &AglerDecomposition,
    p: &MatrixPoly,
    t: &CommutingTuple,
) -> Result<NormBoundReport> {
    let d = t.dim();
    let p_t = eval_at_tuple(p, t)?;
    let p_norm = cmatrix::spectral_norm(&p_t);
    let delta = dec.delta();
    let bound = (1.0 - delta).max(0.0).sqrt();

    let lhs = cmatrix::identity(p.rows() * d) - &p_t * p_t.adjoint();
    let p0_t = eval_at_tuple(dec.p0(), t)?;
    let mut rhs = cmatrix::kron(dec.r(), &cmatrix::identity(d)) + &p0_t * p0_t.adjoint();
    for i in 0..dec.nvars() {
        let part = dec.var_part(i);
        let part_t = eval_at_tuple(part, t)?;
        let defect = cmatrix::identity(d) - t.matrix(i) * t.matrix(i).adjoint();
        let middle = cmatrix::kron(&cmatrix::identity(part.cols()), &defect);
        rhs += &part_t * middle * part_t.adjoint();
    }
    Ok(NormBoundReport {
        p_norm,
        delta,
        bound,
        identity_residual: cmatrix::spectral_norm(&(lhs - rhs)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmatrix::{from_real, max_abs, scalar, spectral_norm};
    use crate::factorization::{agler_decompose, DiagonalMonomialBlock, StructuredFactorization};
    use crate::multiindex::MultiIndex;
    use crate::sample::FactorizationCaps;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn validate_diagonal_tuple() {
        let t = CommutingTuple::new(vec![
            from_real(2, 2, &[0.3, 0.0, 0.0, 0.5]),
            from_real(2, 2, &[0.2, 0.0, 0.0, 0.1]),
        ])
        .unwrap();
        let v = t.validate();
        assert_eq!(v.commutators[0].1, 0.0);
        assert!((v.norms[0] - 0.5).abs() <= 1e-12);
        assert!((v.norms[1] - 0.2).abs() <= 1e-12);
        assert!(v.is_valid());
    }

    #[test]
    fn validate_rejects_noncommuting() {
        let t = CommutingTuple::new(vec![
            from_real(2, 2, &[0.0, 0.5, 0.0, 0.0]),
            from_real(2, 2, &[0.0, 0.0, 0.5, 0.0]),
        ])
        .unwrap();
        let v = t.validate();
        // [T1, T2] = diag(0.25, -0.25), Frobenius norm 0.25 sqrt(2).
        assert!((v.commutators[0].1 - 0.25 * 2.0_f64.sqrt()).abs() <= 1e-12);
        assert!(!v.is_valid());
    }

    #[test]
    fn validate_rejects_boundary_norm() {
        let t = CommutingTuple::new(vec![scalar(c(1.0))]).unwrap();
        assert!(!t.validate().is_valid());
    }

    #[test]
    fn eval_at_point_matches_evaluate_point() {
        let mut rng = sample::rng_from_seed(53);
        for _ in 0..10 {
            let f = sample::random_poly(&mut rng, 2, 2, 3, 3);
            let z = sample::random_point(&mut rng, 2, 0.9);
            let t = CommutingTuple::from_point(&z);
            let via_tuple = eval_at_tuple(&f, &t).unwrap();
            let direct = f.evaluate_point(&z).unwrap();
            assert!(max_abs(&(via_tuple - direct)) <= 1e-12);
        }
    }

    #[test]
    fn eval_diagonal_tuple_is_entrywise() {
        // F = z1 z2 on diagonal T: diagonal of coordinate products.
        let f = MatrixPoly::monomial(2, MultiIndex::new(vec![1, 1]), scalar(c(1.0)));
        let t = CommutingTuple::new(vec![
            from_real(2, 2, &[0.3, 0.0, 0.0, 0.5]),
            from_real(2, 2, &[0.2, 0.0, 0.0, 0.1]),
        ])
        .unwrap();
        let v = eval_at_tuple(&f, &t).unwrap();
        assert!((v[(0, 0)] - c(0.06)).norm() <= 1e-15);
        assert!((v[(1, 1)] - c(0.05)).norm() <= 1e-15);
        assert_eq!(v[(0, 1)], c(0.0));
    }

    #[test]
    fn eval_order_permutation_oracle() {
        let mut rng = sample::rng_from_seed(59);
        for _ in 0..5 {
            let f = sample::random_poly(&mut rng, 3, 2, 2, 3);
            let t = random_commuting_tuple(3, 3, rng.random(), Strategy::Diagonalizable).unwrap();
            let fwd = eval_with_order(&f, &t, false).unwrap();
            let rev = eval_with_order(&f, &t, true).unwrap();
            assert!(max_abs(&(fwd - rev)) <= 1e-10);
        }
    }

    #[test]
    fn eval_is_multiplicative() {
        let mut rng = sample::rng_from_seed(61);
        for _ in 0..5 {
            let a = sample::random_poly(&mut rng, 2, 2, 3, 2);
            let b = sample::random_poly(&mut rng, 2, 3, 2, 2);
            let prod = a.mul(&b).unwrap();
            let t = random_commuting_tuple(2, 3, rng.random(), Strategy::SingleGenerator).unwrap();
            let lhs = eval_at_tuple(&prod, &t).unwrap();
            let rhs = eval_at_tuple(&a, &t).unwrap() * eval_at_tuple(&b, &t).unwrap();
            assert!(max_abs(&(lhs - rhs)) <= 1e-9);
        }
    }

    #[test]
    fn generation_dimension_one_is_a_point() {
        for strategy in Strategy::ALL {
            let t = random_commuting_tuple(2, 1, 7, strategy).unwrap();
            assert_eq!(t.dim(), 1);
            for m in t.matrices() {
                assert!(m[(0, 0)].norm() <= GENERATION_CAP + 1e-12);
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        for strategy in Strategy::ALL {
            let a = random_commuting_tuple(3, 4, 99, strategy).unwrap();
            let b = random_commuting_tuple(3, 4, 99, strategy).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn generated_tuples_validate() {
        let mut rng = sample::rng_from_seed(67);
        for k in 0..100 {
            let strategy = Strategy::ALL[k % 3];
            let dim = 1 + (k % 6);
            let t = random_commuting_tuple(1 + (k % 3), dim, rng.random(), strategy).unwrap();
            assert!(t.validate().is_valid(), "strategy {:?} dim {dim}", strategy);
        }
    }

    #[test]
    fn estimate_reaches_unit_norm_for_coordinate() {
        let f = MatrixPoly::monomial(1, MultiIndex::unit(1, 0), scalar(c(1.0)));
        let est = estimate_u_norm(
            &f,
            &SearchBudget {
                restarts: 8,
                iters: 100,
                max_dim: 2,
                strategy: None,
            },
            5,
        )
        .unwrap();
        // The polish lifts the cap to 1 - 1e-6, so the coordinate
        // function reaches at least 0.999.
        assert!(est.value >= 0.999, "estimate {}", est.value);
        assert!(est.value <= 1.0 + 1e-9);
    }

    #[test]
    fn estimate_constant_is_exact() {
        let m = from_real(2, 2, &[0.3, 0.1, -0.2, 0.5]);
        let f = MatrixPoly::constant(2, m.clone());
        let est = estimate_u_norm(
            &f,
            &SearchBudget {
                restarts: 2,
                iters: 0,
                max_dim: 2,
                strategy: None,
            },
            1,
        )
        .unwrap();
        assert!((est.value - spectral_norm(&m)).abs() <= 1e-12);
    }

    #[test]
    fn estimate_is_monotone_in_restarts() {
        let mut rng = sample::rng_from_seed(71);
        let f = sample::random_poly(&mut rng, 2, 1, 1, 3);
        let small = estimate_u_norm(
            &f,
            &SearchBudget {
                restarts: 4,
                iters: 60,
                max_dim: 3,
                strategy: None,
            },
            13,
        )
        .unwrap();
        let large = estimate_u_norm(
            &f,
            &SearchBudget {
                restarts: 8,
                iters: 60,
                max_dim: 3,
                strategy: None,
            },
            13,
        )
        .unwrap();
        assert!(large.value >= small.value - 1e-12);
    }

    #[test]
    fn norm_bound_running_example() {
        let f = StructuredFactorization::new(
            1,
            vec![scalar(c(0.8)), scalar(c(0.8))],
            vec![DiagonalMonomialBlock::new(0, vec![1])],
        );
        let p = f.expand().unwrap();
        let dec = agler_decompose(&f).unwrap();
        for seed in 0..5u64 {
            let t = random_commuting_tuple(1, 3, seed, Strategy::ALL[seed as usize % 3]).unwrap();
            let report = verify_norm_bound(&dec, &p, &t).unwrap();
            assert!((report.bound - 0.8).abs() <= 1e-9);
            assert!(report.p_norm <= report.bound + 1e-8);
            assert!(report.identity_residual <= 1e-8);
        }
    }

    #[test]
    fn norm_bound_zero_polynomial() {
        let p = MatrixPoly::zero(1, 1, 1);
        let dec = crate::factorization::AglerDecomposition::new(
            1,
            cmatrix::identity(1),
            MatrixPoly::zero(1, 1, 0),
            vec![MatrixPoly::zero(1, 1, 0)],
        );
        let t = random_commuting_tuple(1, 2, 3, Strategy::Diagonalizable).unwrap();
        let report = verify_norm_bound(&dec, &p, &t).unwrap();
        assert_eq!(report.p_norm, 0.0);
        assert!(report.identity_residual <= 1e-10);
    }

    #[test]
    fn norm_bound_random_pairs() {
        let mut rng = sample::rng_from_seed(73);
        for _ in 0..10 {
            let f = sample::random_factorization(&mut rng, FactorizationCaps::suite());
            let p = f.expand().unwrap();
            let dec = agler_decompose(&f).unwrap();
            let t = random_commuting_tuple(f.nvars(), 1 + (rng.random::<u32>() % 4) as usize, rng.random(), Strategy::ALL[rng.random_range(0..3)]).unwrap();
            let report = verify_norm_bound(&dec, &p, &t).unwrap();
            assert!(report.p_norm <= report.bound + 1e-7, "{report:?}");
            assert!(report.identity_residual <= 1e-7, "{report:?}");
            assert!(report.p_norm.powi(2) <= 1.0 - report.delta + 1e-7);
        }
    }
}
