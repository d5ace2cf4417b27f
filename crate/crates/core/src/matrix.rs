//! Dense complex matrices, exact and big-float determinants, certified
//! generators, and the text file format.

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{parse_q, q_frac, q_int, q_to_f64, CFloat, ComplexScalar, GaussRat, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixClass {
    /// Hermitian with spectrum in `[δ,1] ∪ [−1,−δ]`.
    Hermitian,
    /// Normal with every eigenvalue in the open left half plane and `δ ≤ |λ| ≤ 1`.
    Hurwitz,
    /// Positive definite Hermitian with spectrum in `[δ,1]`.
    Psd,
    /// Singular values in `[δ,1]`, no other structure.
    General,
}

impl MatrixClass {
    pub fn tag(self) -> &'static str {
        match self {
            MatrixClass::Hermitian => "H",
            MatrixClass::Hurwitz => "S",
            MatrixClass::Psd => "psd",
            MatrixClass::General => "general",
        }
    }
    pub fn from_tag(s: &str) -> Option<Self> {
        match s {
            "H" | "h" | "hermitian" => Some(MatrixClass::Hermitian),
            "S" | "s" | "hurwitz" => Some(MatrixClass::Hurwitz),
            "psd" | "PSD" => Some(MatrixClass::Psd),
            "general" => Some(MatrixClass::General),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub class: MatrixClass,
    pub delta: Q,
    /// Eigenvalues (singular values for `General`), when known.
    pub spectrum: Option<Vec<GaussRat>>,
}

#[derive(Clone, Debug)]
pub struct ComplexMatrix {
    pub n: usize,
    /// Row-major.
    pub entries: Vec<ComplexScalar>,
    pub cert: Option<Certificate>,
}

impl ComplexMatrix {
    pub fn from_exact(n: usize, entries: Vec<GaussRat>) -> Self {
        assert_eq!(entries.len(), n * n);
        ComplexMatrix { n, entries: entries.into_iter().map(ComplexScalar::Exact).collect(), cert: None }
    }
    pub fn identity(n: usize) -> Self {
        Self::from_exact(n, identity(n))
    }
    pub fn diag(d: &[GaussRat]) -> Self {
        let n = d.len();
        let mut e = vec![GaussRat::zero(); n * n];
        for i in 0..n {
            e[i * n + i] = d[i].clone();
        }
        Self::from_exact(n, e)
    }
    pub fn with_cert(mut self, cert: Certificate) -> Self {
        self.cert = Some(cert);
        self
    }
    pub fn get(&self, i: usize, j: usize) -> &ComplexScalar {
        &self.entries[i * self.n + j]
    }
    pub fn exact_entries(&self) -> Option<Vec<GaussRat>> {
        self.entries.iter().map(|e| e.as_exact().cloned()).collect()
    }
    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(|e| e.as_exact().is_some())
    }
    pub fn to_c64(&self) -> Vec<num_complex::Complex64> {
        self.entries.iter().map(|e| e.to_c64()).collect()
    }
    pub fn negated(&self) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|e| match e {
                ComplexScalar::Exact(q) => ComplexScalar::Exact(q.neg()),
                ComplexScalar::Float(f) => ComplexScalar::Float(f.neg()),
            })
            .collect();
        ComplexMatrix { n: self.n, entries, cert: None }
    }
    /// Exact Hermitian test (float entries compared exactly too).
    pub fn is_hermitian(&self) -> bool {
        let Some(e) = self.exact_entries() else { return false };
        let n = self.n;
        (0..n).all(|i| (0..n).all(|j| e[i * n + j] == e[j * n + i].conj()))
    }
}

pub fn identity(n: usize) -> Vec<GaussRat> {
    let mut e = vec![GaussRat::zero(); n * n];
    for i in 0..n {
        e[i * n + i] = GaussRat::one();
    }
    e
}

pub fn matmul(n: usize, a: &[GaussRat], b: &[GaussRat]) -> Vec<GaussRat> {
    let mut c = vec![GaussRat::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = &a[i * n + k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                let b_kj = &b[k * n + j];
                if !b_kj.is_zero() {
                    c[i * n + j] = c[i * n + j].add(&aik.mul(b_kj));
                }
            }
        }
    }
    c
}

pub fn adjoint(n: usize, a: &[GaussRat]) -> Vec<GaussRat> {
    let mut c = vec![GaussRat::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            c[j * n + i] = a[i * n + j].conj();
        }
    }
    c
}

/// Fraction-free (Bareiss) elimination; exact.
pub fn det_exact(n: usize, a: &[GaussRat]) -> GaussRat {
    if n == 0 {
        return GaussRat::one();
    }
    // Clear denominators row by row so the elimination runs over Z[i].
    let mut m = a.to_vec();
    let mut scale = Q::one();
    for i in 0..n {
        let mut l = num_bigint::BigInt::one();
        for j in 0..n {
            let e = &m[i * n + j];
            l = num_integer::Integer::lcm(&l, e.re.denom());
            l = num_integer::Integer::lcm(&l, e.im.denom());
        }
        let lq = Q::from_integer(l);
        for j in 0..n {
            m[i * n + j] = m[i * n + j].scale(&lq);
        }
        scale *= lq;
    }
    let mut sign = false;
    let mut prev = GaussRat::one();
    for k in 0..n - 1 {
        if m[k * n + k].is_zero() {
            match (k + 1..n).find(|&r| !m[r * n + k].is_zero()) {
                Some(r) => {
                    for j in 0..n {
                        m.swap(k * n + j, r * n + j);
                    }
                    sign = !sign;
                }
                None => return GaussRat::zero(),
            }
        }
        let piv = m[k * n + k].clone();
        let pinv = prev.inv().expect("nonzero previous pivot");
        for i in k + 1..n {
            for j in k + 1..n {
                let v = piv.mul(&m[i * n + j]).sub(&m[i * n + k].mul(&m[k * n + j]));
                m[i * n + j] = v.mul(&pinv);
            }
            m[i * n + k] = GaussRat::zero();
        }
        prev = piv;
    }
    let d = m[n * n - 1].scale(&(Q::one() / scale));
    if sign {
        d.neg()
    } else {
        d
    }
}

/// Laplace expansion along the first row; for small oracles only.
pub fn det_cofactor(n: usize, a: &[GaussRat]) -> GaussRat {
    if n == 0 {
        return GaussRat::one();
    }
    if n == 1 {
        return a[0].clone();
    }
    let mut acc = GaussRat::zero();
    for j in 0..n {
        if a[j].is_zero() {
            continue;
        }
        let minor: Vec<GaussRat> = (1..n).flat_map(|r| (0..n).filter(move |&c| c != j).map(move |c| (r, c))).map(|(r, c)| a[r * n + c].clone()).collect();
        let t = a[j].mul(&det_cofactor(n - 1, &minor));
        acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
    }
    acc
}

/// LU with partial pivoting in big-float arithmetic.
pub fn det_float(n: usize, a: &[CFloat], prec: usize) -> CFloat {
    let mut m: Vec<CFloat> = a.iter().map(|x| CFloat { prec, ..x.clone() }).collect();
    let mut det = CFloat::one(prec);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&r, &s| {
                let (x, y) = (m[r * n + k].to_c64().norm(), m[s * n + k].to_c64().norm());
                x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(k);
        if m[p * n + k].is_zero() {
            return CFloat::zero(prec);
        }
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            det = det.neg();
        }
        let piv = m[k * n + k].clone();
        det = det.mul(&piv);
        for i in k + 1..n {
            let f = m[i * n + k].div(&piv);
            for j in k + 1..n {
                let t = f.mul(&m[k * n + j]);
                m[i * n + j] = m[i * n + j].sub(&t);
            }
        }
    }
    det
}

/// Exact inverse by Gauss–Jordan; `None` when singular.
pub fn inverse_exact(n: usize, a: &[GaussRat]) -> Option<Vec<GaussRat>> {
    let mut m = a.to_vec();
    let mut inv = identity(n);
    for k in 0..n {
        let p = (k..n).find(|&r| !m[r * n + k].is_zero())?;
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
                inv.swap(k * n + j, p * n + j);
            }
        }
        let pinv = m[k * n + k].inv()?;
        for j in 0..n {
            m[k * n + j] = m[k * n + j].mul(&pinv);
            inv[k * n + j] = inv[k * n + j].mul(&pinv);
        }
        for i in 0..n {
            if i == k || m[i * n + k].is_zero() {
                continue;
            }
            let f = m[i * n + k].clone();
            for j in 0..n {
                m[i * n + j] = m[i * n + j].sub(&f.mul(&m[k * n + j]));
                inv[i * n + j] = inv[i * n + j].sub(&f.mul(&inv[k * n + j]));
            }
        }
    }
    Some(inv)
}

/// Principal submatrix on the given sorted index set.
pub fn principal(n: usize, a: &[GaussRat], idx: &[usize]) -> Vec<GaussRat> {
    let _ = n;
    idx.iter().flat_map(|&i| idx.iter().map(move |&j| a[i * n + j].clone())).collect()
}

/// Default dimension limit of [`exact_det`].
pub const ORACLE_LIMIT: usize = 64;

/// Ground-truth determinant: exact for rational entries, big-float LU with
/// four times the entry precision otherwise.
pub fn exact_det(a: &ComplexMatrix) -> Result<ComplexScalar> {
    exact_det_limited(a, ORACLE_LIMIT)
}

pub fn exact_det_limited(a: &ComplexMatrix, limit: usize) -> Result<ComplexScalar> {
    if a.n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if a.n > limit {
        return Err(Error::OracleLimit { n: a.n, limit });
    }
    if let Some(e) = a.exact_entries() {
        return Ok(ComplexScalar::Exact(det_exact(a.n, &e)));
    }
    let prec = a
        .entries
        .iter()
        .map(|e| match e {
            ComplexScalar::Float(f) => f.prec,
            ComplexScalar::Exact(_) => 64,
        })
        .max()
        .unwrap_or(64);
    let wp = 4 * prec;
    let fl: Vec<CFloat> = a
        .entries
        .iter()
        .map(|e| match e {
            ComplexScalar::Float(f) => f.clone(),
            ComplexScalar::Exact(q) => CFloat::from_gauss(q, wp),
        })
        .collect();
    Ok(ComplexScalar::Float(det_float(a.n, &fl, wp)))
}

// ---------------------------------------------------------------- generators

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Number of Householder reflections composed into a random unitary.
pub const HOUSEHOLDER_FACTORS: usize = 3;

/// Exactly unitary `I − 2vv†/(v†v)` products with random Gaussian-integer `v`.
pub fn random_unitary(n: usize, r: &mut impl Rng) -> Vec<GaussRat> {
    let mut u = identity(n);
    if n == 1 {
        return u;
    }
    for _ in 0..HOUSEHOLDER_FACTORS {
        let v: Vec<GaussRat> = loop {
            let v: Vec<GaussRat> = (0..n).map(|_| GaussRat::new(q_int(r.gen_range(-3..=3)), q_int(r.gen_range(-3..=3)))).collect();
            if v.iter().any(|x| !x.is_zero()) {
                break v;
            }
        };
        let nrm: Q = v.iter().map(|x| x.norm_sqr()).fold(Q::zero(), |a, b| a + b);
        let f = q_int(-2) / nrm;
        let mut h = identity(n);
        for i in 0..n {
            for j in 0..n {
                h[i * n + j] = h[i * n + j].add(&v[i].mul(&v[j].conj()).scale(&f));
            }
        }
        u = matmul(n, &u, &h);
    }
    u
}

/// `U·diag(d)·U†` with a seeded random unitary `U`.
pub fn unitary_similarity(d: &[GaussRat], seed: u64) -> Vec<GaussRat> {
    let n = d.len();
    let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let u = random_unitary(n, &mut r);
    let mut ud = u.clone();
    for i in 0..n {
        for j in 0..n {
            ud[i * n + j] = u[i * n + j].mul(&d[j]);
        }
    }
    matmul(n, &ud, &adjoint(n, &u))
}

/// Grid resolution for sampled spectra.
const GRID: i64 = 1000;

fn sample_magnitude(delta: &Q, r: &mut impl Rng) -> Q {
    let j = r.gen_range(0..=GRID);
    delta + (Q::one() - delta) * q_frac(j, GRID)
}

pub fn delta_q(delta: f64) -> Result<Q> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!("delta must lie in (0,1), got {delta}")));
    }
    parse_q(&format!("{delta}"))
}

/// Random spectrum for `H_δ`: magnitudes uniform on `[δ,1]`, random signs.
pub fn hermitian_spectrum(n: usize, delta: &Q, seed: u64) -> Vec<GaussRat> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let m = sample_magnitude(delta, &mut r);
            GaussRat::real(if r.gen_bool(0.5) { -m } else { m })
        })
        .collect()
}

pub fn generate_with_spectrum(class: MatrixClass, spectrum: Vec<GaussRat>, delta: Q, seed: u64) -> ComplexMatrix {
    let n = spectrum.len();
    let a = unitary_similarity(&spectrum, seed);
    ComplexMatrix::from_exact(n, a).with_cert(Certificate { class, delta, spectrum: Some(spectrum) })
}

pub fn generate_hermitian(n: usize, delta: f64, seed: u64) -> Result<ComplexMatrix> {
    let d = delta_q(delta)?;
    let s = hermitian_spectrum(n, &d, seed);
    Ok(generate_with_spectrum(MatrixClass::Hermitian, s, d, seed))
}

/// Random eigenvalues with `Re(λ) < 0` and `δ ≤ |λ| ≤ 1`, on a rational grid.
pub fn hurwitz_spectrum(n: usize, delta: &Q, seed: u64) -> Vec<GaussRat> {
    let mut r = rng(seed);
    let d2 = delta * delta;
    (0..n)
        .map(|_| loop {
            let m = q_to_f64(&sample_magnitude(delta, &mut r));
            let phi = std::f64::consts::PI * r.gen_range(0.5..1.5);
            let re = q_frac((m * phi.cos() * GRID as f64).round() as i64, GRID);
            let im = q_frac((m * phi.sin() * GRID as f64).round() as i64, GRID);
            let l = GaussRat::new(re, im);
            let nn = l.norm_sqr();
            if l.re.is_negative() && nn >= d2 && nn <= Q::one() {
                break l;
            }
        })
        .collect()
}

pub fn generate_hurwitz(n: usize, delta: f64, seed: u64) -> Result<ComplexMatrix> {
    let d = delta_q(delta)?;
    let s = hurwitz_spectrum(n, &d, seed);
    Ok(generate_with_spectrum(MatrixClass::Hurwitz, s, d, seed))
}

pub fn generate_psd(n: usize, delta: f64, seed: u64) -> Result<ComplexMatrix> {
    let d = delta_q(delta)?;
    let mut r = rng(seed);
    let s: Vec<GaussRat> = (0..n).map(|_| GaussRat::real(sample_magnitude(&d, &mut r))).collect();
    Ok(generate_with_spectrum(MatrixClass::Psd, s, d, seed))
}

/// `U·diag(σ)·V†` with independent random unitaries; `κ ≤ 1/δ`.
pub fn generate_general(n: usize, delta: f64, seed: u64) -> Result<ComplexMatrix> {
    let d = delta_q(delta)?;
    let mut r = rng(seed);
    let s: Vec<GaussRat> = (0..n).map(|_| GaussRat::real(sample_magnitude(&d, &mut r))).collect();
    let u = random_unitary(n, &mut r);
    let v = random_unitary(n, &mut r);
    let mut us = u.clone();
    for i in 0..n {
        for j in 0..n {
            us[i * n + j] = u[i * n + j].mul(&s[j]);
        }
    }
    let a = matmul(n, &us, &adjoint(n, &v));
    Ok(ComplexMatrix::from_exact(n, a).with_cert(Certificate { class: MatrixClass::General, delta: d, spectrum: Some(s) }))
}

// ---------------------------------------------------------------- file format

/// Text format: optional `# class=H delta=0.3` header, a line with `n`, then
/// `n` rows of `2n` tokens with real and imaginary parts interleaved.
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let mut class = None;
    let mut delta = None;
    let mut toks: Vec<&str> = vec![];
    for line in text.lines() {
        let l = line.trim();
        if let Some(h) = l.strip_prefix('#') {
            for kv in h.split_whitespace() {
                match kv.split_once('=') {
                    Some(("class", v)) => class = Some(MatrixClass::from_tag(v).ok_or_else(|| Error::Parse(format!("unknown class `{v}`")))?),
                    Some(("delta", v)) => delta = Some(parse_q(v)?),
                    _ => {}
                }
            }
            continue;
        }
        toks.extend(l.split_whitespace());
    }
    let (first, rest) = toks.split_first().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let n: usize = first.parse().map_err(|_| Error::Parse(format!("bad dimension `{first}`")))?;
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if rest.len() != 2 * n * n {
        return Err(Error::Parse(format!("expected {} entries, found {}", 2 * n * n, rest.len())));
    }
    let mut e = Vec::with_capacity(n * n);
    for p in rest.chunks(2) {
        e.push(GaussRat::new(parse_q(p[0])?, parse_q(p[1])?));
    }
    let mut m = ComplexMatrix::from_exact(n, e);
    if let Some(class) = class {
        let delta = delta.ok_or_else(|| Error::Parse("class header without delta".into()))?;
        m.cert = Some(Certificate { class, delta, spectrum: None });
    }
    Ok(m)
}

pub fn format_matrix(m: &ComplexMatrix) -> String {
    let mut s = String::new();
    if let Some(c) = &m.cert {
        let _ = writeln!(s, "# class={} delta={}", c.class.tag(), c.delta);
    }
    let _ = writeln!(s, "{}", m.n);
    for i in 0..m.n {
        let row: Vec<String> = (0..m.n)
            .map(|j| match m.get(i, j) {
                ComplexScalar::Exact(q) => format!("{} {}", q.re, q.im),
                ComplexScalar::Float(f) => {
                    let g = f.to_gauss();
                    format!("{} {}", g.re, g.im)
                }
            })
            .collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_examples() {
        assert_eq!(exact_det(&ComplexMatrix::identity(5)).unwrap().as_exact().unwrap(), &GaussRat::one());
        let d = ComplexMatrix::diag(&[GaussRat::frac(1, 2), GaussRat::frac(1, 4)]);
        assert_eq!(exact_det(&d).unwrap().as_exact().unwrap(), &GaussRat::frac(1, 8));
        let a: Vec<GaussRat> = [2, -1, 3, 0, 4, 5, 1, -2, 7].iter().map(|&v| GaussRat::int(v)).collect();
        assert_eq!(det_exact(3, &a), det_cofactor(3, &a));
        let sing: Vec<GaussRat> = [1, 2, 2, 4].iter().map(|&v| GaussRat::int(v)).collect();
        assert!(det_exact(2, &sing).is_zero());
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let a: Vec<GaussRat> = [0, 1, 0, 1, 0, 0, 0, 0, 3].iter().map(|&v| GaussRat::int(v)).collect();
        assert_eq!(det_exact(3, &a), GaussRat::int(-3));
        let f: Vec<CFloat> = a.iter().map(|q| CFloat::from_gauss(q, 128)).collect();
        assert!((det_float(3, &f, 128).to_c64().re + 3.0).abs() < 1e-30);
    }

    #[test]
    fn householder_product_is_unitary() {
        let mut r = rng(7);
        let u = random_unitary(5, &mut r);
        assert_eq!(matmul(5, &u, &adjoint(5, &u)), identity(5));
    }

    #[test]
    fn generated_classes_carry_valid_certificates() {
        let h = generate_hermitian(6, 0.3, 1).unwrap();
        assert!(h.is_hermitian());
        let spec = h.cert.as_ref().unwrap().spectrum.clone().unwrap();
        let prod = spec.iter().fold(GaussRat::one(), |a, b| a.mul(b));
        assert_eq!(exact_det(&h).unwrap().as_exact().unwrap(), &prod);
        let s = generate_hurwitz(5, 0.3, 2).unwrap();
        for l in s.cert.unwrap().spectrum.unwrap() {
            assert!(l.re.is_negative());
        }
    }

    #[test]
    fn file_roundtrip() {
        let m = generate_hermitian(3, 0.3, 4).unwrap();
        let back = parse_matrix(&format_matrix(&m)).unwrap();
        assert_eq!(back.exact_entries(), m.exact_entries());
        assert_eq!(back.cert.unwrap().class, MatrixClass::Hermitian);
        let p = parse_matrix("# class=H delta=0.5\n1\n0.75 0\n").unwrap();
        assert_eq!(p.get(0, 0).as_exact().unwrap(), &GaussRat::frac(3, 4));
        assert!(parse_matrix("2\n1 0 0 0\n").is_err());
    }
}
