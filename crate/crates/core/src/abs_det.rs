//! `|Det(A)|` through `B = A†A` and the telescoping product over leading
//! principal submatrices, each `e_i^T (B^(i))^{-1} e_i` obtained by gradient
//! descent folded into `O(log k)` matrix products.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{inverse_exact, principal, ComplexMatrix};
use crate::scalar::GaussRat;

type C = Complex64;

fn matmul(n: usize, a: &[C], b: &[C]) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); n * n];
    for i in 0..n {
        for l in 0..n {
            let x = a[i * n + l];
            if x == C::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += x * b[l * n + j];
            }
        }
    }
    out
}

fn identity(n: usize) -> Vec<C> {
    let mut m = vec![C::new(0.0, 0.0); n * n];
    for i in 0..n {
        m[i * n + i] = C::new(1.0, 0.0);
    }
    m
}

fn add(a: &[C], b: &[C]) -> Vec<C> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn matvec(n: usize, a: &[C], x: &[C]) -> Vec<C> {
    (0..n).map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum()).collect()
}

/// `x̃ = Σ_{i<k} α(I − αB)^i b`, with the geometric sum built by binary
/// doubling: `S_{2j} = S_j + M^j S_j`, `S_{j+1} = I + M S_j`.
pub fn gradient_descent_solve(n: usize, b_mat: &[C], b: &[C], alpha: f64, k: u64) -> Result<Vec<C>> {
    if b_mat.len() != n * n || b.len() != n {
        return Err(Error::Arity { expected: n, got: b.len() });
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Parameter(format!("step {alpha} outside (0, 1]")));
    }
    let id = identity(n);
    let m: Vec<C> = id.iter().zip(b_mat).map(|(i, x)| i - alpha * x).collect();
    let mut s = vec![C::new(0.0, 0.0); n * n];
    let mut p = id.clone();
    for bit in (0..64 - k.leading_zeros()).rev() {
        s = add(&s, &matmul(n, &p, &s));
        p = matmul(n, &p, &p);
        if (k >> bit) & 1 == 1 {
            s = add(&id, &matmul(n, &m, &s));
            p = matmul(n, &m, &p);
        }
    }
    Ok(matvec(n, &s, b).into_iter().map(|x| x * alpha).collect())
}

/// Plain iterative sum, for cross-checking the doubling.
pub fn gradient_descent_direct(n: usize, b_mat: &[C], b: &[C], alpha: f64, k: u64) -> Vec<C> {
    let mut x = vec![C::new(0.0, 0.0); n];
    let mut term: Vec<C> = b.to_vec();
    for _ in 0..k {
        for (xi, ti) in x.iter_mut().zip(&term) {
            *xi += alpha * ti;
        }
        let bt = matvec(n, b_mat, &term);
        term = term.iter().zip(&bt).map(|(t, u)| t - alpha * u).collect();
    }
    x
}

/// `⌈κ²·ln(2nκ²/ε)⌉`.
pub fn iteration_count(n: usize, epsilon: f64, kappa: f64) -> u64 {
    let k2 = kappa * kappa;
    (k2 * (2.0 * n as f64 * k2 / epsilon).ln()).ceil().max(1.0) as u64
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct AbsDetResult {
    pub estimate: f64,
    /// Approximations of `e_i^T (B^(i))^{-1} e_i`, `i = 1..n`.
    pub v: Vec<f64>,
    pub iterations: u64,
    pub alpha: f64,
}

/// Gram matrix `A†A` in row-major order.
pub fn gram(n: usize, a: &[C]) -> Vec<C> {
    let mut g = vec![C::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            g[i * n + j] = (0..n).map(|l| a[l * n + i].conj() * a[l * n + j]).sum();
        }
    }
    g
}

fn leading(n: usize, a: &[C], i: usize) -> Vec<C> {
    let mut out = Vec::with_capacity(i * i);
    for r in 0..i {
        out.extend_from_slice(&a[r * n..r * n + i]);
    }
    out
}

/// Estimate of `|Det(A)|` for `σ_max(A) ≤ 1`, `κ(A) ≤ kappa`.
pub fn abs_det_approx(a: &ComplexMatrix, epsilon: f64, kappa: f64) -> Result<AbsDetResult> {
    if !(epsilon > 0.0 && epsilon < 1.0) || kappa < 1.0 {
        return Err(Error::Parameter("need 0 < epsilon < 1 and kappa >= 1".into()));
    }
    let n = a.n;
    let b = gram(n, &a.to_c64());
    // B ⪯ I and λ_min(B) ≥ 1/κ², so a unit step contracts by 1 − 1/κ².
    let alpha = 1.0;
    let k = iteration_count(n, epsilon, kappa);
    let tol = epsilon / (2.0 * n as f64);
    let mut v = Vec::with_capacity(n);
    for i in 1..=n {
        let bi = leading(n, &b, i);
        let mut e = vec![C::new(0.0, 0.0); i];
        e[i - 1] = C::new(1.0, 0.0);
        let x = gradient_descent_solve(i, &bi, &e, alpha, k)?;
        let vi = x[i - 1].re;
        if vi < 1.0 - tol {
            return Err(Error::Precondition(format!("v_{i} = {vi} < 1: A is not normalized to sigma_max <= 1")));
        }
        v.push(vi);
    }
    let log_det_b: f64 = v.iter().map(|x| -x.ln()).sum();
    Ok(AbsDetResult { estimate: (0.5 * log_det_b).exp(), v, iterations: k, alpha })
}

/// `Π 1/(e_i^T (A^(i))^{-1} e_i)` in exact arithmetic; equals `Det(A)` for
/// positive definite `A`.
pub fn telescoping_det_exact(n: usize, a: &[GaussRat]) -> Result<GaussRat> {
    let mut acc = GaussRat::one();
    for i in 1..=n {
        let idx: Vec<usize> = (0..i).collect();
        let sub = principal(n, a, &idx);
        let inv = inverse_exact(i, &sub).ok_or_else(|| Error::Precondition(format!("leading block {i} is singular")))?;
        let vi = &inv[i * i - 1];
        acc = acc.div(vi).ok_or_else(|| Error::Precondition(format!("v_{i} is zero")))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C {
        C::new(x, 0.0)
    }

    #[test]
    fn identity_one_step() {
        let x = gradient_descent_solve(2, &identity(2), &[c(1.0), c(2.0)], 1.0, 1).unwrap();
        assert_eq!(x, vec![c(1.0), c(2.0)]);
    }

    #[test]
    fn diagonal_limit() {
        let b = vec![c(0.5), c(0.0), c(0.0), c(1.0)];
        let x = gradient_descent_solve(2, &b, &[c(1.0), c(0.0)], 0.5, 40).unwrap();
        assert!((x[0].re - 2.0).abs() < 1e-4);
        assert!(x[1].norm() < 1e-15);
    }

    #[test]
    fn doubling_matches_direct() {
        let b = vec![c(0.6), C::new(0.1, 0.2), C::new(0.1, -0.2), c(0.9)];
        let rhs = [C::new(1.0, -1.0), c(0.5)];
        for k in [1u64, 2, 3, 7, 16, 33, 64] {
            let x = gradient_descent_solve(2, &b, &rhs, 0.7, k).unwrap();
            let y = gradient_descent_direct(2, &b, &rhs, 0.7, k);
            for (p, q) in x.iter().zip(&y) {
                assert!((p - q).norm() < 1e-12, "k={k}");
            }
        }
    }

    #[test]
    fn diagonal_abs_det() {
        let a = ComplexMatrix::diag(&[GaussRat::frac(1, 2), GaussRat::frac(1, 4)]);
        let r = abs_det_approx(&a, 1e-3, 4.0).unwrap();
        assert!((r.v[0] - 4.0).abs() < 1e-3 && (r.v[1] - 16.0).abs() < 1e-3);
        assert!((r.estimate - 0.125).abs() < 1e-4);
        let r = abs_det_approx(&ComplexMatrix::identity(3), 1e-3, 1.0).unwrap();
        assert!(r.v.iter().all(|&x| (x - 1.0).abs() < 1e-12));
        assert!((r.estimate - 1.0).abs() < 1e-12);
    }

    #[test]
    fn telescoping_diagonal() {
        let d = [GaussRat::frac(1, 2), GaussRat::frac(1, 3), GaussRat::int(5)];
        let a = ComplexMatrix::diag(&d).exact_entries().unwrap();
        assert_eq!(telescoping_det_exact(3, &a).unwrap(), GaussRat::frac(5, 6));
    }
}
