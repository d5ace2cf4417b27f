//! Derivatives of `f = log g` at 0 from the derivatives of `g` at 0, as
//! numbers (power-series recurrence) and as an arithmetic circuit (truncated
//! composition `h̃(g̃(z))` followed by coefficient extraction).

use num_rational::BigRational;

use crate::circuit::{Builder, Circuit, VarMap};
use crate::coeff_extract::extract_coefficients_batch;
use crate::error::{Error, Result};
use crate::scalar::{factorial, ComplexScalar, GaussRat, Q};

/// What `values[l]` means: the `l`-th derivative or the `l`-th Taylor coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    Derivative,
    Coefficient,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    OfG,
    OfF,
}

#[derive(Clone, Debug)]
pub struct DerivativeSeries {
    pub values: Vec<ComplexScalar>,
    pub convention: Convention,
    pub kind: SeriesKind,
    pub base_point: GaussRat,
}

fn inv_factorial(l: usize) -> GaussRat {
    GaussRat::real(BigRational::new(1.into(), factorial(l)))
}

fn int_factorial(l: usize) -> GaussRat {
    GaussRat::real(Q::from_integer(factorial(l)))
}

impl DerivativeSeries {
    pub fn new(values: Vec<ComplexScalar>, convention: Convention, kind: SeriesKind) -> Self {
        DerivativeSeries { values, convention, kind, base_point: GaussRat::zero() }
    }

    /// Taylor coefficients `values[l] / l!` (or the values themselves).
    pub fn coefficients(&self) -> Vec<ComplexScalar> {
        match self.convention {
            Convention::Coefficient => self.values.clone(),
            Convention::Derivative => self.values.iter().enumerate().map(|(l, v)| v.scale(&inv_factorial(l))).collect(),
        }
    }

    /// Derivatives `l! · coefficient_l` (or the values themselves).
    pub fn derivatives(&self) -> Vec<ComplexScalar> {
        match self.convention {
            Convention::Derivative => self.values.clone(),
            Convention::Coefficient => self.values.iter().enumerate().map(|(l, v)| v.scale(&int_factorial(l))).collect(),
        }
    }

    fn from_coefficients(c: Vec<ComplexScalar>, convention: Convention, kind: SeriesKind, base_point: GaussRat) -> Self {
        let s = DerivativeSeries { values: c, convention: Convention::Coefficient, kind, base_point };
        let values = match convention {
            Convention::Coefficient => s.values,
            Convention::Derivative => s.derivatives(),
        };
        DerivativeSeries { values, convention, kind: s.kind, base_point: s.base_point }
    }
}

/// `f^(0..=k)(0)` for `f = log g`, in the convention of the input; `f^(0) = 0`.
pub fn log_derivatives(g: &DerivativeSeries, k: usize) -> Result<DerivativeSeries> {
    if g.values.len() < k + 1 {
        return Err(Error::Arity { expected: k + 1, got: g.values.len() });
    }
    let mode = g.values[0].mode();
    if !g.values[0].approx_eq(&ComplexScalar::one(mode)) {
        return Err(Error::Normalization);
    }
    let c = g.coefficients();
    // n·f_n = n·c_n − Σ_{j=1}^{n−1} j·f_j·c_{n−j}
    let mut f: Vec<ComplexScalar> = vec![ComplexScalar::zero(mode)];
    for n in 1..=k {
        let mut acc = c[n].scale(&GaussRat::int(n as i64));
        for j in 1..n {
            let t = f[j].try_mul(&c[n - j])?.scale(&GaussRat::int(j as i64));
            acc = acc.try_sub(&t)?;
        }
        f.push(acc.scale(&GaussRat::frac(1, n as i64)));
    }
    Ok(DerivativeSeries::from_coefficients(f, g.convention, SeriesKind::OfF, g.base_point.clone()))
}

/// Coefficients (in the convention of the input) of `exp f` up to order `k`,
/// taking `f(0)` as 0.
pub fn exp_coefficients(f: &DerivativeSeries, k: usize) -> Result<DerivativeSeries> {
    if f.values.len() < k + 1 {
        return Err(Error::Arity { expected: k + 1, got: f.values.len() });
    }
    let mode = f.values[0].mode();
    let c = f.coefficients();
    // n·g_n = Σ_{j=1}^{n} j·f_j·g_{n−j}
    let mut g: Vec<ComplexScalar> = vec![ComplexScalar::one(mode)];
    for n in 1..=k {
        let mut acc = ComplexScalar::zero(mode);
        for j in 1..=n {
            let t = c[j].try_mul(&g[n - j])?.scale(&GaussRat::int(j as i64));
            acc = acc.try_add(&t)?;
        }
        g.push(acc.scale(&GaussRat::frac(1, n as i64)));
    }
    Ok(DerivativeSeries::from_coefficients(g, f.convention, SeriesKind::OfG, f.base_point.clone()))
}

/// Fan-in-2 circuit over inputs `g^(0)…g^(k)` (variables `0..=k`) whose
/// outputs are `f^(0)(0)…f^(k)(0)`. Output `l` has formal degree at most `l`.
pub fn log_derivative_batch_circuit(k: usize) -> Result<Circuit> {
    let z_var = k + 1;
    let mut b = Builder::new(k + 2);
    let z = b.input(z_var);
    // z^i by halving, shared across i.
    let mut zp: Vec<Option<usize>> = vec![None, Some(z)];
    for i in 2..=k {
        let (lo, hi) = (i / 2, i - i / 2);
        let p = b.mul(zp[lo].unwrap(), zp[hi].unwrap());
        zp.push(Some(p));
    }
    // y = g̃(z) − 1 = Σ g^(i)/i! · z^i
    let mut terms = Vec::with_capacity(k);
    for i in 1..=k {
        let gi = b.input(i);
        let t = b.scale(&inv_factorial(i), gi);
        terms.push(b.mul(t, zp[i].unwrap()));
    }
    let top = match b.sum(terms) {
        None => {
            let zero = b.zero();
            return b.finish(vec![zero]).with_num_free(k + 1);
        }
        Some(y) => {
            // h̃(1+y) = Σ_{i=1}^{k} (−1)^{i+1}/i · y^i, by Horner.
            let coef = |i: usize| GaussRat::frac(if i % 2 == 1 { 1 } else { -1 }, i as i64);
            let mut acc = b.constant(&coef(k));
            for i in (1..k).rev() {
                let m = b.mul(y, acc);
                let c = b.constant(&coef(i));
                acc = b.add(c, m);
            }
            b.mul(y, acc)
        }
    };
    let comp = b.finish(vec![top]);
    let coeffs = extract_coefficients_batch(&comp, z_var, k)?;
    let mut b2 = Builder::new(k + 2);
    let map = b2.copy_gates(&coeffs, &VarMap::Keep);
    let mut outs = vec![b2.zero()];
    for l in 1..=k {
        let o = map[coeffs.outputs()[l]];
        outs.push(b2.scale(&int_factorial(l), o));
    }
    let c = b2.finish(outs).with_num_free(k + 1)?;
    let deg = c.metrics().degree;
    if deg > k {
        return Err(Error::Circuit(format!("log circuit degree {deg} exceeds {k}")));
    }
    Ok(c)
}

/// Single-output circuit for `f^(k)(0)` over inputs `g^(0)…g^(k)`.
pub fn log_derivative_circuit(k: usize) -> Result<Circuit> {
    let c = log_derivative_batch_circuit(k)?.view(k);
    let deg = c.metrics().degree;
    if deg > k {
        return Err(Error::Circuit(format!("log circuit degree {deg} exceeds {k}")));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(q: GaussRat) -> ComplexScalar {
        ComplexScalar::Exact(q)
    }

    fn series(v: Vec<GaussRat>, conv: Convention) -> DerivativeSeries {
        DerivativeSeries::new(v.into_iter().map(ex).collect(), conv, SeriesKind::OfG)
    }

    #[test]
    fn log_one_plus_z() {
        let mut v = vec![GaussRat::one(), GaussRat::one()];
        v.resize(9, GaussRat::zero());
        let f = log_derivatives(&series(v, Convention::Derivative), 8).unwrap();
        assert!(f.values[0].as_exact().unwrap().is_zero());
        for k in 1..=8usize {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            let want = GaussRat::real(Q::from_integer(factorial(k - 1) * sign));
            assert_eq!(f.values[k].as_exact().unwrap(), &want, "k={k}");
        }
    }

    #[test]
    fn log_one_minus_half_z() {
        let mut v = vec![GaussRat::one(), GaussRat::frac(-1, 2)];
        v.resize(7, GaussRat::zero());
        let f = log_derivatives(&series(v, Convention::Derivative), 6).unwrap();
        for k in 1..=6usize {
            let want = GaussRat::real(-BigRational::new(factorial(k - 1), num_bigint::BigInt::from(1u64 << k)));
            assert_eq!(f.values[k].as_exact().unwrap(), &want);
        }
    }

    #[test]
    fn constant_one_gives_zero() {
        let mut v = vec![GaussRat::one()];
        v.resize(5, GaussRat::zero());
        let f = log_derivatives(&series(v, Convention::Coefficient), 4).unwrap();
        assert!(f.values.iter().all(|x| x.as_exact().unwrap().is_zero()));
    }

    #[test]
    fn normalization_is_checked() {
        let v = vec![GaussRat::int(2), GaussRat::one()];
        assert!(matches!(log_derivatives(&series(v, Convention::Derivative), 1), Err(Error::Normalization)));
    }

    #[test]
    fn circuit_matches_numeric_path() {
        for k in 0..=6usize {
            let c = log_derivative_batch_circuit(k).unwrap();
            assert!(c.is_fan_in_2());
            assert_eq!(c.num_free(), k + 1);
            for l in 0..=k {
                assert!(c.view(l).metrics().degree <= l);
            }
            let mut g = vec![GaussRat::one()];
            for i in 1..=k {
                g.push(GaussRat::new(Q::from_integer((3 * i as i64 - 7).into()), Q::new(1.into(), (i as i64 + 1).into())));
            }
            let mut assign = g.clone();
            assign.resize(c.num_vars(), GaussRat::zero());
            let out = c.eval_all::<GaussRat>(&assign, &()).unwrap();
            let num = log_derivatives(&series(g.clone(), Convention::Derivative), k).unwrap();
            for l in 0..=k {
                assert_eq!(&out[l], num.values[l].as_exact().unwrap(), "k={k} l={l}");
            }
            let back = exp_coefficients(&num, k).unwrap();
            for l in 0..=k {
                assert_eq!(back.values[l].as_exact().unwrap(), &g[l]);
            }
        }
    }

    #[test]
    fn first_derivative_circuit_is_g1() {
        let c = log_derivative_circuit(1).unwrap();
        for v in -5..5 {
            let mut a = vec![GaussRat::one(), GaussRat::frac(v, 3)];
            a.resize(c.num_vars(), GaussRat::zero());
            assert_eq!(c.eval_all::<GaussRat>(&a, &()).unwrap()[0], GaussRat::frac(v, 3));
        }
    }
}
