//! Cesaro means with Fejer weights and their norm checks.
//!
//! For `F(z) = sum_I A_I z^I` the order-`n` approximant keeps
//! `(1 - |I|/(n+1)) A_I` for `|I| <= n`. It equals the average of the
//! partial sums `S_0, ..., S_n` and never increases the u-norm or the
//! polydisk sup norm.

use crate::cmatrix;
use crate::error::Result;
use crate::exec;
use crate::poly::MatrixPoly;
use crate::tuple::{self, CommutingTuple};
use crate::C64;

/// Fejer-weighted truncation `sum_{|I| <= n} (1 - |I|/(n+1)) A_I z^I`.
pub fn cesaro(f: &MatrixPoly, n: u32) -> MatrixPoly {
    let mut out = MatrixPoly::zero(f.nvars(), f.rows(), f.cols());
    for (index, coeff) in f.iter() {
        let deg = index.total_degree();
        if deg <= n {
            let weight = 1.0 - deg as f64 / (n as f64 + 1.0);
            let term = MatrixPoly::monomial(
                f.nvars(),
                index.clone(),
                coeff.map(|x| x * weight),
            );
            out = out.add(&term).expect("shapes agree");
        }
    }
    out
}

/// Partial sum `S_k(z) = sum_{|I| <= k} A_I z^I`.
pub fn partial_sum(f: &MatrixPoly, k: u32) -> MatrixPoly {
    let mut out = MatrixPoly::zero(f.nvars(), f.rows(), f.cols());
    for (index, coeff) in f.iter() {
        if index.total_degree() <= k {
            out = out
                .add(&MatrixPoly::monomial(f.nvars(), index.clone(), coeff.clone()))
                .expect("shapes agree");
        }
    }
    out
}

/// Fejer kernel `F_n(theta) = (1/(n+1)) |sum_{k=0}^n e^{ik theta}|^2`;
/// nonnegative with mean one.
pub fn fejer_kernel_value(n: u32, theta: f64) -> f64 {
    let mut s = C64::new(0.0, 0.0);
    for k in 0..=n {
        s += C64::from_polar(1.0, k as f64 * theta);
    }
    s.norm_sqr() / (n as f64 + 1.0)
}

/// Upper bound `(sum_I ||A_I|| |I|) / (n+1)` for the sup-norm distance
/// between `F` and its order-`n` Cesaro mean on the closed polydisk.
pub fn tail_bound(f: &MatrixPoly, n: u32) -> f64 {
    let mut total = 0.0;
    for (index, coeff) in f.iter() {
        total += cmatrix::spectral_norm(coeff) * index.total_degree() as f64;
    }
    total / (n as f64 + 1.0)
}

/// Max spectral norm of `F` over the uniform `points^N` torus grid
/// (deterministic index-order reduction; parallel under the `parallel`
/// feature).
pub fn torus_grid_sup(f: &MatrixPoly, points: usize) -> f64 {
    let values = exec::map_indexed(grid_size(f.nvars(), points), |flat| {
        grid_norm_at(f, points, flat)
    });
    exec::max_by_value(&values).map(|(_, v)| v).unwrap_or(0.0)
}

/// Sequential twin of [`torus_grid_sup`] (for the benchmark suite).
pub fn torus_grid_sup_seq(f: &MatrixPoly, points: usize) -> f64 {
    let values = exec::map_indexed_seq(grid_size(f.nvars(), points), |flat| {
        grid_norm_at(f, points, flat)
    });
    exec::max_by_value(&values).map(|(_, v)| v).unwrap_or(0.0)
}

fn grid_size(nvars: usize, points: usize) -> usize {
    points.pow(nvars as u32)
}

fn grid_norm_at(f: &MatrixPoly, points: usize, flat: usize) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut rem = flat;
    let z: Vec<C64> = (0..f.nvars())
        .map(|_| {
            let k = rem % points;
            rem /= points;
            C64::from_polar(1.0, tau * k as f64 / points as f64)
        })
        .collect();
    cmatrix::spectral_norm(&f.evaluate_point(&z).expect("grid point arity"))
}

/// `max_theta ||F(T e^{i theta})||` over a uniform grid of `grid` angles.
pub fn rotated_tuple_sup(f: &MatrixPoly, t: &CommutingTuple, grid: usize) -> Result<f64> {
    let tau = std::f64::consts::TAU;
    let mut worst = 0.0_f64;
    for k in 0..grid {
        let rotated = t.rotate(tau * k as f64 / grid as f64);
        let norm = cmatrix::spectral_norm(&tuple::eval_at_tuple(f, &rotated)?);
        worst = worst.max(norm);
    }
    Ok(worst)
}

/// Both sides of the sampled-tuple contractivity inequality
/// `||cesaro(F, n)(T)|| <= max_theta ||F(T e^{i theta})||`.
pub fn tuple_contractivity(
    f: &MatrixPoly,
    n: u32,
    t: &CommutingTuple,
    grid: usize,
) -> Result<(f64, f64)> {
    let lhs = cmatrix::spectral_norm(&tuple::eval_at_tuple(&cesaro(f, n), t)?);
    let rhs = rotated_tuple_sup(f, t, grid)?;
    Ok((lhs, rhs))
}

/// Trapezoid mean `(1/2pi) integral_0^{2pi} g` with `intervals` panels.
pub fn trapezoid_mean(g: impl Fn(f64) -> f64, intervals: usize) -> f64 {
    let tau = std::f64::consts::TAU;
    let h = tau / intervals as f64;
    let mut acc = 0.5 * (g(0.0) + g(tau));
    for k in 1..intervals {
        acc += g(k as f64 * h);
    }
    acc * h / tau
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmatrix::{max_abs, scalar};
    use crate::multiindex::MultiIndex;
    use crate::sample;
    use crate::tuple::{random_commuting_tuple, Strategy};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn z1_squared() -> MatrixPoly {
        MatrixPoly::monomial(1, MultiIndex::single(1, 0, 2), scalar(c(1.0)))
    }

    #[test]
    fn cesaro_weight_on_square() {
        let p = cesaro(&z1_squared(), 2);
        let coeff = p.coeff(&MultiIndex::single(1, 0, 2)).unwrap();
        assert!((coeff[(0, 0)] - c(1.0 / 3.0)).norm() <= 1e-16);
    }

    #[test]
    fn cesaro_fixes_constants() {
        let m = cmatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let f = MatrixPoly::constant(3, m);
        for n in 0..5 {
            assert_eq!(cesaro(&f, n), f);
        }
    }

    #[test]
    fn cesaro_truncates_above_order() {
        let p = cesaro(&z1_squared(), 1);
        assert!(p.is_zero());
    }

    #[test]
    fn cesaro_equals_mean_of_partial_sums() {
        let mut rng = sample::rng_from_seed(79);
        for _ in 0..10 {
            let f = sample::random_poly(&mut rng, 2, 2, 2, 3);
            let n = 10u32;
            let mut mean = MatrixPoly::zero(2, 2, 2);
            for k in 0..=n {
                mean = mean.add(&partial_sum(&f, k)).unwrap();
            }
            let mean = mean.scale(c(1.0 / (n as f64 + 1.0)));
            let diff = cesaro(&f, n).sub(&mean).unwrap();
            let worst = diff
                .iter()
                .map(|(_, m)| max_abs(m))
                .fold(0.0_f64, f64::max);
            assert!(worst <= 1e-14);
        }
    }

    #[test]
    fn fejer_order_zero_is_one() {
        for theta in [0.0, 0.3, 2.0, 6.0] {
            assert!((fejer_kernel_value(0, theta) - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn fejer_at_zero_is_order_plus_one() {
        for n in [0u32, 1, 5, 32] {
            assert!((fejer_kernel_value(n, 0.0) - (n as f64 + 1.0)).abs() <= 1e-10);
        }
    }

    #[test]
    fn fejer_is_nonnegative() {
        let mut rng = sample::rng_from_seed(83);
        use rand::Rng;
        for _ in 0..100 {
            let theta: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            let n = rng.random_range(0..=32);
            assert!(fejer_kernel_value(n, theta) >= 0.0);
        }
    }

    #[test]
    fn fejer_mean_is_one() {
        for n in [0u32, 1, 5, 17, 32] {
            let mean = trapezoid_mean(|theta| fejer_kernel_value(n, theta), 4096);
            assert!((mean - 1.0).abs() <= 1e-10, "n = {n}: mean {mean}");
        }
    }

    #[test]
    fn tail_bound_square_example() {
        // F = z1^2, n = 2: bound 2/3 equals the actual sup of
        // |z^2/3 - z^2| on the circle.
        let f = z1_squared();
        let bound = tail_bound(&f, 2);
        assert!((bound - 2.0 / 3.0).abs() <= 1e-15);
        let diff = cesaro(&f, 2).sub(&f).unwrap();
        let sup = torus_grid_sup(&diff, 256);
        assert!((sup - 2.0 / 3.0).abs() <= 1e-12);
    }

    #[test]
    fn tail_bound_constant_is_zero() {
        let f = MatrixPoly::constant(2, cmatrix::identity(2));
        assert_eq!(tail_bound(&f, 4), 0.0);
    }

    #[test]
    fn tail_bound_dominates_grid_sup() {
        let mut rng = sample::rng_from_seed(89);
        for _ in 0..5 {
            let f = sample::random_poly(&mut rng, 2, 1, 1, 3);
            for n in [3u32, 7, 100] {
                let diff = cesaro(&f, n).sub(&f).unwrap();
                let sup = torus_grid_sup(&diff, 64);
                assert!(
                    sup <= tail_bound(&f, n) + 1e-12,
                    "sup {sup} > bound {}",
                    tail_bound(&f, n)
                );
            }
        }
    }

    #[test]
    fn grid_sup_parallel_matches_seq() {
        let mut rng = sample::rng_from_seed(97);
        let f = sample::random_poly(&mut rng, 2, 2, 2, 3);
        assert_eq!(torus_grid_sup(&f, 32), torus_grid_sup_seq(&f, 32));
    }

    #[test]
    fn cesaro_contracts_on_matched_grids() {
        // Exact on matched uniform grids once points > n + deg F.
        let mut rng = sample::rng_from_seed(101);
        for _ in 0..5 {
            let f = sample::random_poly(&mut rng, 2, 1, 2, 3);
            for n in [1u32, 4, 9] {
                let points = 32;
                assert!(points as u32 > n + f.degree());
                let lhs = torus_grid_sup(&cesaro(&f, n), points);
                let rhs = torus_grid_sup(&f, points);
                assert!(lhs <= rhs + 1e-9, "{lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn tuple_contractivity_holds() {
        let mut rng = sample::rng_from_seed(103);
        use rand::Rng;
        for k in 0..5 {
            let f = sample::random_poly(&mut rng, 2, 2, 2, 3);
            let t = random_commuting_tuple(2, 1 + k % 3, rng.random(), Strategy::ALL[k % 3]).unwrap();
            for n in [0u32, 2, 6] {
                let (lhs, rhs) = tuple_contractivity(&f, n, &t, 720).unwrap();
                assert!(lhs <= rhs + 1e-6, "order {n}: {lhs} > {rhs}");
            }
        }
    }
}
