//! Scalar fields: exact Gaussian rationals, complex big-floats, complex
//! doubles, and GF(p^2) for fast exact identity testing.

use std::cell::RefCell;
use std::fmt;

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, Sign as BSign};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

pub fn q_int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses a decimal (`-0.125`, `3e-2`) or fraction (`-7/3`) token exactly.
pub fn parse_q(tok: &str) -> Result<Q> {
    let bad = || Error::Parse(format!("bad number token `{tok}`"));
    let tok = tok.trim();
    if let Some((n, d)) = tok.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    let (mant, exp) = match tok.find(['e', 'E']) {
        Some(p) => (&tok[..p], tok[p + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (tok, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    let digits = format!("{ip}{fp}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let mut v = Q::from_integer(digits.parse::<BigInt>().map_err(|_| bad())?);
    let shift = exp - fp.len() as i64;
    let ten = BigInt::from(10);
    if shift >= 0 {
        v *= Q::from_integer(num_traits::pow(ten, shift as usize));
    } else {
        v /= Q::from_integer(num_traits::pow(ten, (-shift) as usize));
    }
    Ok(if neg { -v } else { v })
}

pub fn q_to_f64(q: &Q) -> f64 {
    // Shift to keep both parts within f64 range before dividing.
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let s = nb.max(db) - 900;
    if s <= 0 {
        return q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN);
    }
    let n = (q.numer() >> (s as usize).min(nb as usize)).to_f64().unwrap_or(0.0);
    let d = (q.denom() >> (s as usize).min(db as usize)).to_f64().unwrap_or(0.0);
    let shift_n = (s as usize).min(nb as usize) as i32;
    let shift_d = (s as usize).min(db as usize) as i32;
    n / d * 2f64.powi(shift_n - shift_d)
}

/// Exact rational approximation of a finite double (exact binary value).
pub fn q_from_f64(x: f64) -> Q {
    Q::from_float(x).unwrap_or_else(Q::zero)
}

/// Gaussian rational `re + i·im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussRat {
    pub re: Q,
    pub im: Q,
}

impl GaussRat {
    pub fn new(re: Q, im: Q) -> Self {
        GaussRat { re, im }
    }
    pub fn real(re: Q) -> Self {
        GaussRat { re, im: Q::zero() }
    }
    pub fn int(v: i64) -> Self {
        Self::real(q_int(v))
    }
    pub fn frac(n: i64, d: i64) -> Self {
        Self::real(q_frac(n, d))
    }
    pub fn zero() -> Self {
        Self::default()
    }
    pub fn one() -> Self {
        Self::int(1)
    }
    pub fn i() -> Self {
        GaussRat { re: Q::zero(), im: Q::one() }
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }
    pub fn add(&self, o: &Self) -> Self {
        GaussRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }
    pub fn sub(&self, o: &Self) -> Self {
        GaussRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }
    pub fn mul(&self, o: &Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            return Self::real(&self.re * &o.re);
        }
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
    pub fn scale(&self, q: &Q) -> Self {
        GaussRat { re: &self.re * q, im: &self.im * q }
    }
    pub fn neg(&self) -> Self {
        GaussRat { re: -&self.re, im: -&self.im }
    }
    pub fn conj(&self) -> Self {
        GaussRat { re: self.re.clone(), im: -&self.im }
    }
    pub fn norm_sqr(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }
    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(GaussRat { re: &self.re / &n, im: -&self.im / &n })
    }
    pub fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|v| self.mul(&v))
    }
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(q_to_f64(&self.re), q_to_f64(&self.im))
    }
    /// Largest bit length among the four integers describing the value.
    pub fn bits(&self) -> u64 {
        [self.re.numer(), self.re.denom(), self.im.numer(), self.im.denom()]
            .iter()
            .map(|b| b.bits())
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{}{}{}i", self.re, if self.im.is_negative() { "" } else { "+" }, self.im)
        }
    }
}

pub fn bigint_to_bf(b: &BigInt, prec: usize) -> BigFloat {
    if b.is_zero() {
        return BigFloat::from_word(0, prec);
    }
    let words = b.magnitude().to_u64_digits();
    let sign = if b.sign() == BSign::Minus { Sign::Neg } else { Sign::Pos };
    let mut v = BigFloat::from_words(&words, sign, (64 * words.len()) as i32);
    // from_words keeps every input bit; round to the working precision.
    let _ = v.set_precision(prec.max(64), RM);
    v
}

pub fn q_to_bf(q: &Q, prec: usize) -> BigFloat {
    let n = bigint_to_bf(q.numer(), prec);
    if q.denom().is_one() {
        return n;
    }
    n.div(&bigint_to_bf(q.denom(), prec), prec, RM)
}

pub fn bf_to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    match x.as_raw_parts() {
        Some((m, n, s, e, _)) if n > 0 => {
            let top = *m.last().unwrap_or(&0) as f64;
            let v = top * 2f64.powi(e - 64);
            if s == Sign::Neg {
                -v
            } else {
                v
            }
        }
        _ => 0.0,
    }
}

/// Exact rational value of a finite big-float.
pub fn bf_to_q(x: &BigFloat) -> Q {
    match x.as_raw_parts() {
        Some((m, n, s, e, _)) if n > 0 => {
            let mag = num_bigint::BigUint::from_slice(
                &m.iter().flat_map(|w| [(*w & 0xffff_ffff) as u32, (*w >> 32) as u32]).collect::<Vec<_>>(),
            );
            let shift = e as i64 - 64 * m.len() as i64;
            let mut v = Q::from_integer(BigInt::from(mag));
            if shift >= 0 {
                v *= Q::from_integer(BigInt::one() << shift as usize);
            } else {
                v /= Q::from_integer(BigInt::one() << (-shift) as usize);
            }
            if s == Sign::Neg {
                -v
            } else {
                v
            }
        }
        _ => Q::zero(),
    }
}

/// Complex number with big-float parts, all operations rounded to `prec` bits.
#[derive(Clone, Debug)]
pub struct CFloat {
    pub re: BigFloat,
    pub im: BigFloat,
    pub prec: usize,
}

impl CFloat {
    pub fn from_gauss(q: &GaussRat, prec: usize) -> Self {
        CFloat { re: q_to_bf(&q.re, prec), im: q_to_bf(&q.im, prec), prec }
    }
    pub fn from_f64(re: f64, im: f64, prec: usize) -> Self {
        CFloat { re: BigFloat::from_f64(re, prec), im: BigFloat::from_f64(im, prec), prec }
    }
    pub fn zero(prec: usize) -> Self {
        Self::from_f64(0.0, 0.0, prec)
    }
    pub fn one(prec: usize) -> Self {
        Self::from_f64(1.0, 0.0, prec)
    }
    fn p(&self, o: &Self) -> usize {
        self.prec.max(o.prec)
    }
    pub fn add(&self, o: &Self) -> Self {
        let p = self.p(o);
        CFloat { re: self.re.add(&o.re, p, RM), im: self.im.add(&o.im, p, RM), prec: p }
    }
    pub fn sub(&self, o: &Self) -> Self {
        let p = self.p(o);
        CFloat { re: self.re.sub(&o.re, p, RM), im: self.im.sub(&o.im, p, RM), prec: p }
    }
    pub fn mul(&self, o: &Self) -> Self {
        let p = self.p(o);
        let (a, b, c, d) = (&self.re, &self.im, &o.re, &o.im);
        if b.is_zero() && d.is_zero() {
            return CFloat { re: a.mul(c, p, RM), im: BigFloat::from_word(0, p), prec: p };
        }
        let re = a.mul(c, p, RM).sub(&b.mul(d, p, RM), p, RM);
        let im = a.mul(d, p, RM).add(&b.mul(c, p, RM), p, RM);
        CFloat { re, im, prec: p }
    }
    pub fn neg(&self) -> Self {
        CFloat { re: self.re.neg(), im: self.im.neg(), prec: self.prec }
    }
    pub fn norm_sqr(&self) -> BigFloat {
        let p = self.prec;
        self.re.mul(&self.re, p, RM).add(&self.im.mul(&self.im, p, RM), p, RM)
    }
    pub fn abs(&self) -> BigFloat {
        self.norm_sqr().sqrt(self.prec, RM)
    }
    pub fn div(&self, o: &Self) -> Self {
        let p = self.p(o);
        let n = o.norm_sqr();
        let t = self.mul(&o.conj());
        CFloat { re: t.re.div(&n, p, RM), im: t.im.div(&n, p, RM), prec: p }
    }
    pub fn conj(&self) -> Self {
        CFloat { re: self.re.clone(), im: self.im.neg(), prec: self.prec }
    }
    pub fn exp(&self) -> Self {
        let p = self.prec;
        CONSTS.with(|cc| {
            let cc = &mut *cc.borrow_mut();
            let m = self.re.exp(p, RM, cc);
            let c = self.im.cos(p, RM, cc);
            let s = self.im.sin(p, RM, cc);
            CFloat { re: m.mul(&c, p, RM), im: m.mul(&s, p, RM), prec: p }
        })
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(bf_to_f64(&self.re), bf_to_f64(&self.im))
    }
    pub fn to_gauss(&self) -> GaussRat {
        GaussRat::new(bf_to_q(&self.re), bf_to_q(&self.im))
    }
}

pub fn bf_ln(x: &BigFloat, prec: usize) -> BigFloat {
    CONSTS.with(|cc| x.ln(prec, RM, &mut cc.borrow_mut()))
}

/// Prime used for modular identity testing; `p ≡ 3 (mod 4)` so `i` is not
/// in GF(p) and GF(p)[i] is a field.
pub const P61: u64 = (1 << 61) - 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp2 {
    pub a: u64,
    pub b: u64,
}

fn mulmod(x: u64, y: u64) -> u64 {
    let t = x as u128 * y as u128;
    let lo = (t as u64) & P61;
    let hi = (t >> 61) as u64;
    let s = lo + hi;
    if s >= P61 {
        s - P61
    } else {
        s
    }
}
fn addmod(x: u64, y: u64) -> u64 {
    let s = x + y;
    if s >= P61 {
        s - P61
    } else {
        s
    }
}
fn submod(x: u64, y: u64) -> u64 {
    if x >= y {
        x - y
    } else {
        x + P61 - y
    }
}
fn powmod(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b);
        }
        b = mulmod(b, b);
        e >>= 1;
    }
    r
}
fn bigint_mod(x: &BigInt) -> u64 {
    let m = BigInt::from(P61);
    x.mod_floor(&m).to_u64().expect("reduced residue fits u64")
}
fn q_mod(q: &Q) -> u64 {
    let d = bigint_mod(q.denom());
    assert!(d != 0, "denominator divisible by the modulus");
    mulmod(bigint_mod(q.numer()), powmod(d, P61 - 2))
}

impl Fp2 {
    pub fn new(a: u64, b: u64) -> Self {
        Fp2 { a: a % P61, b: b % P61 }
    }
    pub fn from_gauss(q: &GaussRat) -> Self {
        Fp2 { a: q_mod(&q.re), b: q_mod(&q.im) }
    }
    pub fn random<R: rand::Rng>(rng: &mut R) -> Self {
        Fp2::new(rng.gen_range(0..P61), rng.gen_range(0..P61))
    }
    pub fn add(&self, o: &Self) -> Self {
        Fp2 { a: addmod(self.a, o.a), b: addmod(self.b, o.b) }
    }
    pub fn sub(&self, o: &Self) -> Self {
        Fp2 { a: submod(self.a, o.a), b: submod(self.b, o.b) }
    }
    pub fn mul(&self, o: &Self) -> Self {
        Fp2 {
            a: submod(mulmod(self.a, o.a), mulmod(self.b, o.b)),
            b: addmod(mulmod(self.a, o.b), mulmod(self.b, o.a)),
        }
    }
    pub fn neg(&self) -> Self {
        Fp2 { a: submod(0, self.a), b: submod(0, self.b) }
    }
}

/// Arithmetic needed by circuit evaluation. `Ctx` carries what a constant
/// needs to be embedded (the precision for big-floats).
pub trait Scalar: Clone + Send + Sync + 'static {
    type Ctx: Clone + Send + Sync;
    fn embed(q: &GaussRat, ctx: &Self::Ctx) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl Scalar for GaussRat {
    type Ctx = ();
    fn embed(q: &GaussRat, _: &()) -> Self {
        q.clone()
    }
    fn add(&self, o: &Self) -> Self {
        GaussRat::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        GaussRat::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        GaussRat::mul(self, o)
    }
    fn neg(&self) -> Self {
        GaussRat::neg(self)
    }
}

impl Scalar for CFloat {
    type Ctx = usize;
    fn embed(q: &GaussRat, prec: &usize) -> Self {
        CFloat::from_gauss(q, *prec)
    }
    fn add(&self, o: &Self) -> Self {
        CFloat::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        CFloat::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        CFloat::mul(self, o)
    }
    fn neg(&self) -> Self {
        CFloat::neg(self)
    }
}

impl Scalar for Complex64 {
    type Ctx = ();
    fn embed(q: &GaussRat, _: &()) -> Self {
        q.to_c64()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Scalar for Fp2 {
    type Ctx = ();
    fn embed(q: &GaussRat, _: &()) -> Self {
        Fp2::from_gauss(q)
    }
    fn add(&self, o: &Self) -> Self {
        Fp2::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Fp2::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Fp2::mul(self, o)
    }
    fn neg(&self) -> Self {
        Fp2::neg(self)
    }
}

/// Arithmetic mode of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ArithMode {
    ExactRational,
    BigFloat { bits: usize },
}

/// A complex value in one of the two public arithmetic modes.
#[derive(Clone, Debug)]
pub enum ComplexScalar {
    Exact(GaussRat),
    Float(CFloat),
}

impl ComplexScalar {
    pub fn exact(re: Q, im: Q) -> Self {
        ComplexScalar::Exact(GaussRat::new(re, im))
    }
    pub fn mode(&self) -> ArithMode {
        match self {
            ComplexScalar::Exact(_) => ArithMode::ExactRational,
            ComplexScalar::Float(f) => ArithMode::BigFloat { bits: f.prec },
        }
    }
    /// Converts into the given mode; float to exact uses the exact binary value.
    pub fn to_mode(&self, mode: ArithMode) -> Self {
        match (self, mode) {
            (ComplexScalar::Exact(q), ArithMode::BigFloat { bits }) => ComplexScalar::Float(CFloat::from_gauss(q, bits)),
            (ComplexScalar::Float(f), ArithMode::ExactRational) => ComplexScalar::Exact(f.to_gauss()),
            (ComplexScalar::Float(f), ArithMode::BigFloat { bits }) if f.prec != bits => {
                let mut g = f.clone();
                let _ = g.re.set_precision(bits, RM);
                let _ = g.im.set_precision(bits, RM);
                g.prec = bits;
                ComplexScalar::Float(g)
            }
            _ => self.clone(),
        }
    }
    pub fn to_c64(&self) -> Complex64 {
        match self {
            ComplexScalar::Exact(q) => q.to_c64(),
            ComplexScalar::Float(f) => f.to_c64(),
        }
    }
    pub fn as_exact(&self) -> Option<&GaussRat> {
        match self {
            ComplexScalar::Exact(q) => Some(q),
            _ => None,
        }
    }
    fn bin(&self, o: &Self, fq: impl Fn(&GaussRat, &GaussRat) -> GaussRat, ff: impl Fn(&CFloat, &CFloat) -> CFloat) -> Result<Self> {
        match (self, o) {
            (ComplexScalar::Exact(a), ComplexScalar::Exact(b)) => Ok(ComplexScalar::Exact(fq(a, b))),
            (ComplexScalar::Float(a), ComplexScalar::Float(b)) => Ok(ComplexScalar::Float(ff(a, b))),
            _ => Err(Error::Mode),
        }
    }
    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.bin(o, GaussRat::add, CFloat::add)
    }
    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.bin(o, GaussRat::sub, CFloat::sub)
    }
    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.bin(o, GaussRat::mul, CFloat::mul)
    }
    /// `q` in the given mode.
    pub fn embed(q: &GaussRat, mode: ArithMode) -> Self {
        match mode {
            ArithMode::ExactRational => ComplexScalar::Exact(q.clone()),
            ArithMode::BigFloat { bits } => ComplexScalar::Float(CFloat::from_gauss(q, bits)),
        }
    }
    pub fn zero(mode: ArithMode) -> Self {
        Self::embed(&GaussRat::zero(), mode)
    }
    pub fn one(mode: ArithMode) -> Self {
        Self::embed(&GaussRat::one(), mode)
    }
    /// `q` in the mode of `self`.
    pub fn like(&self, q: &GaussRat) -> Self {
        Self::embed(q, self.mode())
    }
    /// Multiplication by an exact constant, staying in the mode of `self`.
    pub fn scale(&self, q: &GaussRat) -> Self {
        match self {
            ComplexScalar::Exact(a) => ComplexScalar::Exact(a.mul(q)),
            ComplexScalar::Float(f) => ComplexScalar::Float(f.mul(&CFloat::from_gauss(q, f.prec))),
        }
    }
    pub fn neg(&self) -> Self {
        match self {
            ComplexScalar::Exact(a) => ComplexScalar::Exact(a.neg()),
            ComplexScalar::Float(f) => ComplexScalar::Float(f.neg()),
        }
    }
    /// Absolute tolerance of the mode: zero when exact, `2^-(bits-8)` otherwise.
    pub fn tolerance(mode: ArithMode) -> f64 {
        match mode {
            ArithMode::ExactRational => 0.0,
            ArithMode::BigFloat { bits } => 2f64.powi(-(bits.saturating_sub(8).min(1000) as i32)),
        }
    }
    /// Equality up to the tolerance of the mode.
    pub fn approx_eq(&self, o: &Self) -> bool {
        match (self, o) {
            (ComplexScalar::Exact(a), ComplexScalar::Exact(b)) => a == b,
            _ => {
                let d = self.to_c64() - o.to_c64();
                let tol = Self::tolerance(self.mode()).max(Self::tolerance(o.mode())).max(1e-300);
                d.norm() <= tol
            }
        }
    }
    /// `e^self` in big-float arithmetic (an exact input is first rounded to `bits`).
    pub fn exp(&self, bits: usize) -> CFloat {
        match self {
            ComplexScalar::Exact(q) => CFloat::from_gauss(q, bits).exp(),
            ComplexScalar::Float(f) => f.exp(),
        }
    }
}

impl fmt::Display for ComplexScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexScalar::Exact(q) => write!(f, "{q}"),
            ComplexScalar::Float(x) => {
                let c = x.to_c64();
                write!(f, "{}{:+}i", c.re, c.im)
            }
        }
    }
}

/// `k!` as an exact integer.
pub fn factorial(k: usize) -> BigInt {
    (1..=k as u64).fold(BigInt::one(), |a, i| a * i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_q("0.3").unwrap(), q_frac(3, 10));
        assert_eq!(parse_q("-7/3").unwrap(), q_frac(-7, 3));
        assert_eq!(parse_q("1.5e2").unwrap(), q_int(150));
        assert_eq!(parse_q("-.25").unwrap(), q_frac(-1, 4));
        assert!(parse_q("abc").is_err());
        assert!(parse_q("1/0").is_err());
    }

    #[test]
    fn gaussian_field_ops() {
        let a = GaussRat::new(q_frac(1, 2), q_int(3));
        let b = GaussRat::new(q_int(-2), q_frac(1, 3));
        assert_eq!(a.mul(&b).div(&b).unwrap(), a);
        assert_eq!(GaussRat::i().mul(&GaussRat::i()), GaussRat::int(-1));
        assert!(GaussRat::zero().inv().is_none());
    }

    #[test]
    fn bigfloat_roundtrip_and_exp() {
        let q = GaussRat::new(q_frac(-7, 3), q_frac(5, 11));
        let f = CFloat::from_gauss(&q, 256);
        let back = f.to_gauss();
        let err = back.sub(&q).to_c64().norm();
        assert!(err < 1e-70);
        let e = CFloat::from_f64(0.0, std::f64::consts::PI, 256).exp();
        assert!((e.to_c64() - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        let big = bigint_to_bf(&(BigInt::one() << 300usize), 128);
        assert!((bf_to_f64(&big) / 2f64.powi(300) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fp2_matches_rational_arithmetic() {
        let a = GaussRat::new(q_frac(3, 7), q_frac(-2, 5));
        let b = GaussRat::new(q_frac(11, 2), q_int(4));
        let lhs = Fp2::from_gauss(&a.mul(&b).add(&a));
        let (x, y) = (Fp2::from_gauss(&a), Fp2::from_gauss(&b));
        assert_eq!(lhs, x.mul(&y).add(&x));
        assert_eq!(Fp2::from_gauss(&GaussRat::i()).mul(&Fp2::from_gauss(&GaussRat::i())), Fp2::from_gauss(&GaussRat::int(-1)));
    }

    #[test]
    fn mixed_modes_rejected() {
        let a = ComplexScalar::Exact(GaussRat::one());
        let b = ComplexScalar::Float(CFloat::one(64));
        assert_eq!(a.try_add(&b).unwrap_err(), Error::Mode);
    }
}
