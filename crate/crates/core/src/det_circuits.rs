//! Circuits for `g_A(z) = Det((1−z)I + zA)` and brute-force oracles.
//!
//! Variable layout: entry `a_ij` is variable `i·n + j`, `z` is variable `n²`.

use num_traits::{One, Signed, Zero};

use crate::circuit::{Builder, Circuit};
use crate::error::{Error, Result};
use crate::matrix::{det_exact, principal};
use crate::scalar::{factorial, GaussRat, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignMode {
    /// `g_A`.
    Plain,
    /// `g_{−A}`.
    Negated,
}

#[derive(Clone, Copy, Debug)]
pub struct InterpolationSpec {
    pub n: usize,
    pub sign: SignMode,
}

impl InterpolationSpec {
    pub fn new(n: usize, sign: SignMode) -> Self {
        InterpolationSpec { n, sign }
    }
    pub fn entry_var(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }
    pub fn z_var(&self) -> usize {
        self.n * self.n
    }
    pub fn num_vars(&self) -> usize {
        self.n * self.n + 1
    }
}

/// Division-free Samuelson–Berkowitz circuit for `g_A` (or `g_{−A}`).
///
/// The matrix is written as `M = I + z·B` with `B = ±A − I`. For each leading
/// block the characteristic polynomial is updated by a lower-triangular
/// Toeplitz matrix with first column `1, −m_rr, −RC, −RMC, −RM²C, …`; the
/// determinant is `(−1)^n` times the constant coefficient.
pub fn samuelson_berkowitz_circuit(spec: InterpolationSpec) -> Result<Circuit> {
    let n = spec.n;
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut b = Builder::new(spec.num_vars());
    let z = b.input(spec.z_var());
    let one = b.one();
    let m1 = b.constant(&GaussRat::int(-1));
    let mut m = vec![0usize; n * n];
    for i in 0..n {
        for j in 0..n {
            let a = b.input(spec.entry_var(i, j));
            let a = match spec.sign {
                SignMode::Plain => a,
                SignMode::Negated => b.mul(m1, a),
            };
            m[i * n + j] = if i == j {
                let bii = b.add(a, m1);
                let zb = b.mul(z, bii);
                b.add(one, zb)
            } else {
                b.mul(z, a)
            };
        }
    }
    // Characteristic coefficients c_1..c_r of the leading block (c_0 = 1 implicit).
    let mut c: Vec<usize> = vec![b.mul(m1, m[0])];
    for r in 1..n {
        let col: Vec<usize> = (0..r).map(|p| m[p * n + r]).collect();
        let row: Vec<usize> = (0..r).map(|k| m[r * n + k]).collect();
        // s_l = R · M_r^l · C for l = 0..r−1
        let mut s = Vec::with_capacity(r);
        let mut v = col;
        for l in 0..r {
            let prods: Vec<usize> = (0..r).map(|k| b.mul(row[k], v[k])).collect();
            s.push(b.sum(prods).expect("r ≥ 1"));
            if l + 1 < r {
                v = (0..r)
                    .map(|p| {
                        let prods: Vec<usize> = (0..r).map(|k| b.mul(m[p * n + k], v[k])).collect();
                        b.sum(prods).expect("r ≥ 1")
                    })
                    .collect();
            }
        }
        let a = m[r * n + r];
        // new c'_i = c_i − (a·c_{i−1} + Σ_l s_l·c_{i−2−l}), with c_0 = 1.
        let coef = |c: &Vec<usize>, j: usize| if j == 0 { None } else { Some(c[j - 1]) };
        let mut next = Vec::with_capacity(r + 1);
        for i in 1..=r + 1 {
            let mut terms = Vec::new();
            terms.push(match coef(&c, i - 1) {
                None => a,
                Some(g) => b.mul(a, g),
            });
            for (l, &sl) in s.iter().enumerate() {
                if i >= 2 + l {
                    terms.push(match coef(&c, i - 2 - l) {
                        None => sl,
                        Some(g) => b.mul(sl, g),
                    });
                }
            }
            let t = b.sum(terms).expect("nonempty");
            let nt = b.mul(m1, t);
            next.push(if i <= r { b.add(c[i - 1], nt) } else { nt });
        }
        c = next;
    }
    let cn = c[n - 1];
    let out = if n % 2 == 1 { b.mul(m1, cn) } else { cn };
    Ok(b.finish(vec![out]))
}

/// Exact value of `g_A^{(k)}(0) = k!·Σ_{B principal k×k} Det(B − I)`.
///
/// The sum itself is the Taylor coefficient `[z^k]g_A`; see
/// [`coefficient_oracle`].
pub fn derivative_oracle(n: usize, a: &[GaussRat], k: usize) -> GaussRat {
    coefficient_oracle(n, a, k).scale(&Q::from_integer(factorial(k)))
}

/// `Σ_{B principal k×k} Det(B − I)`, the coefficient of `z^k` in `g_A`.
pub fn coefficient_oracle(n: usize, a: &[GaussRat], k: usize) -> GaussRat {
    if k > n {
        return GaussRat::zero();
    }
    let mut shifted = a.to_vec();
    for i in 0..n {
        shifted[i * n + i] = shifted[i * n + i].sub(&GaussRat::one());
    }
    let mut acc = GaussRat::zero();
    for_each_subset(n, k, &mut |idx| {
        acc = acc.add(&det_exact(k, &principal(n, &shifted, idx)));
    });
    acc
}

fn for_each_subset(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

/// Roots `1/(1−ω)` of `g_A` for the eigenvalues `ω ≠ 1`.
pub fn root_locations(eigenvalues: &[GaussRat]) -> Vec<GaussRat> {
    eigenvalues
        .iter()
        .filter(|w| !w.is_one())
        .map(|w| GaussRat::one().sub(w).inv().expect("ω ≠ 1"))
        .collect()
}

/// Coefficients `c_0 = 1, …, c_n` of `det(λI − A)` (numeric Berkowitz, exact).
pub fn charpoly_exact(n: usize, a: &[GaussRat]) -> Vec<GaussRat> {
    let mut c = vec![GaussRat::one(), a[0].neg()];
    for r in 1..n {
        let mut v: Vec<GaussRat> = (0..r).map(|p| a[p * n + r].clone()).collect();
        let row: Vec<GaussRat> = (0..r).map(|k| a[r * n + k].clone()).collect();
        let mut col = vec![GaussRat::one(), a[r * n + r].neg()];
        for _ in 0..r {
            let s = row.iter().zip(&v).fold(GaussRat::zero(), |acc, (x, y)| acc.add(&x.mul(y)));
            col.push(s.neg());
            v = (0..r).map(|p| (0..r).fold(GaussRat::zero(), |acc, k| acc.add(&a[p * n + k].mul(&v[k])))).collect();
        }
        c = (0..=r + 1)
            .map(|i| (0..=i.min(r)).fold(GaussRat::zero(), |acc, j| acc.add(&col[i - j].mul(&c[j]))))
            .collect();
    }
    c
}

/// Distances of a root to the boundaries of the excluded regions; all
/// entries are non-negative exactly when the root is outside the region.
#[derive(Clone, Debug)]
pub struct RegionMargins {
    pub margins: Vec<f64>,
    pub ok: bool,
}

fn excl_radius(delta: &Q) -> Q {
    delta / (Q::one() + delta)
}

/// Hermitian case: outside `D(0,1/2) ∪ D(1, δ/(1+δ))` and real.
pub fn hermitian_margins(z: &GaussRat, delta: &Q) -> RegionMargins {
    let quarter = Q::new(1.into(), 4.into());
    let r = excl_radius(delta);
    let zm1 = z.sub(&GaussRat::one());
    let ok = z.norm_sqr() >= quarter && zm1.norm_sqr() >= &r * &r && z.im.is_zero();
    let zc = z.to_c64();
    RegionMargins {
        margins: vec![zc.norm() - 0.5, (zc - 1.0).norm() - crate::scalar::q_to_f64(&r)],
        ok,
    }
}

/// Hurwitz case for `g_{−A}`: `Re z ≥ 1/2`, `|z − 1/2| ≥ 1/2`, `|z − 1| ≥ δ/(1+δ)`.
pub fn hurwitz_margins(z: &GaussRat, delta: &Q) -> RegionMargins {
    let half = Q::new(1.into(), 2.into());
    let r = excl_radius(delta);
    let zh = z.sub(&GaussRat::real(half.clone()));
    let zm1 = z.sub(&GaussRat::one());
    let ok = z.re >= half && zh.norm_sqr() >= &half * &half && zm1.norm_sqr() >= &r * &r;
    let zc = z.to_c64();
    RegionMargins {
        margins: vec![zc.re - 0.5, (zc - 0.5).norm() - 0.5, (zc - 1.0).norm() - crate::scalar::q_to_f64(&r)],
        ok: ok && !z.re.is_negative(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::det_cofactor;
    use crate::scalar::q_frac;
    use rand::{Rng, SeedableRng};

    fn rand_matrix(n: usize, seed: u64) -> Vec<GaussRat> {
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n * n).map(|_| GaussRat::new(q_frac(r.gen_range(-9..=9), r.gen_range(1..=5)), q_frac(r.gen_range(-9..=9), r.gen_range(1..=5)))).collect()
    }

    fn eval_g(n: usize, sign: SignMode, a: &[GaussRat], z: GaussRat) -> GaussRat {
        let c = samuelson_berkowitz_circuit(InterpolationSpec::new(n, sign)).unwrap();
        let mut x = a.to_vec();
        x.push(z);
        c.eval_free::<GaussRat>(&x, &()).unwrap().swap_remove(0)
    }

    #[test]
    fn one_by_one() {
        let a = vec![GaussRat::frac(7, 3)];
        let z = GaussRat::frac(2, 5);
        let want = GaussRat::one().sub(&z).add(&z.mul(&a[0]));
        assert_eq!(eval_g(1, SignMode::Plain, &a, z), want);
        assert_eq!(eval_g(1, SignMode::Plain, &a, GaussRat::one()), a[0]);
    }

    #[test]
    fn identity_gives_one() {
        for n in 1..=6 {
            let a = crate::matrix::identity(n);
            assert_eq!(eval_g(n, SignMode::Plain, &a, GaussRat::new(q_frac(3, 7), q_frac(-1, 2))), GaussRat::one());
        }
    }

    #[test]
    fn endpoints_match_cofactor_oracle() {
        for n in 1..=5 {
            let a = rand_matrix(n, n as u64);
            assert_eq!(eval_g(n, SignMode::Plain, &a, GaussRat::one()), det_cofactor(n, &a));
            assert_eq!(eval_g(n, SignMode::Plain, &a, GaussRat::zero()), GaussRat::one());
            let neg: Vec<GaussRat> = a.iter().map(|x| x.neg()).collect();
            assert_eq!(eval_g(n, SignMode::Negated, &a, GaussRat::one()), det_cofactor(n, &neg));
        }
    }

    #[test]
    fn interior_points_match_direct_determinant() {
        let n = 4;
        let a = rand_matrix(n, 11);
        let z = GaussRat::new(q_frac(2, 3), q_frac(1, 5));
        let mut m = a.iter().map(|x| x.mul(&z)).collect::<Vec<_>>();
        for i in 0..n {
            m[i * n + i] = m[i * n + i].add(&GaussRat::one().sub(&z));
        }
        assert_eq!(eval_g(n, SignMode::Plain, &a, z), det_cofactor(n, &m));
    }

    #[test]
    fn oracle_examples() {
        let id = crate::matrix::identity(4);
        for k in 1..=4 {
            assert!(derivative_oracle(4, &id, k).is_zero());
        }
        let a = vec![GaussRat::frac(5, 2)];
        assert_eq!(derivative_oracle(1, &a, 1), GaussRat::frac(3, 2));
        assert!(derivative_oracle(1, &a, 2).is_zero());
        assert_eq!(derivative_oracle(3, &rand_matrix(3, 2), 0), GaussRat::one());
    }

    #[test]
    fn roots_and_charpoly() {
        assert_eq!(root_locations(&[GaussRat::int(-1)]), vec![GaussRat::frac(1, 2)]);
        assert!(root_locations(&[GaussRat::one()]).is_empty());
        let a = rand_matrix(4, 5);
        let c = charpoly_exact(4, &a);
        // det(−A) = c_4 for n = 4
        assert_eq!(c[4], det_cofactor(4, &a));
    }
}
