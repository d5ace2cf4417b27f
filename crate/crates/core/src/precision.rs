//! Fixed-precision evaluation model: inputs rounded to `r` bits, exact
//! scaled-integer arithmetic at every gate, and bit-width accounting against
//! the value, rounding-error and depth bounds.

use astro_float::{BigFloat, RoundingMode};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::scalar::{q_to_f64, ComplexScalar, GaussRat, Q};

const RM: RoundingMode = RoundingMode::ToEven;
const BF_PREC: usize = 128;

/// Constant of the bit-width bound `B = C5·d³·h·r·⌈log₂ m⌉·⌈log₂ M⌉`.
pub const C5: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum PrecisionMode {
    PaperFaithful,
    Practical,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct PrecisionBudget {
    pub r: u64,
    /// Input-magnitude bound `M ≥ 1`.
    pub m_bound: f64,
    pub epsilon: f64,
    pub mode: PrecisionMode,
}

/// `⌈log₂ m⌉`, at least 1 (a circuit without wide sums behaves as `m = 2`).
pub fn log_fanin(m: usize) -> u64 {
    let mut l = 0u64;
    while (1usize << l) < m {
        l += 1;
    }
    l.max(1)
}

fn log2_abs_int(x: &BigInt) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.abs().to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    let top = (x.abs() >> shift as usize).to_f64().unwrap();
    top.log2() + shift as f64
}

fn log2_abs(re: &BigInt, im: &BigInt) -> f64 {
    let (a, b) = (log2_abs_int(re), log2_abs_int(im));
    let hi = a.max(b);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + 0.5 * (1.0 + 2f64.powf(2.0 * (a.min(b) - hi))).log2()
}

fn floor_scaled(q: &Q, r: u64) -> BigInt {
    let s = q * Q::from_integer(BigInt::one() << r as usize);
    s.numer().div_floor(s.denom())
}

/// `R_r(z) = ⌊2^r·z⌋/2^r`, real and imaginary parts separately.
pub fn round_input(z: &ComplexScalar, r: u64) -> GaussRat {
    let g = match z {
        ComplexScalar::Exact(q) => q.clone(),
        ComplexScalar::Float(f) => f.to_gauss(),
    };
    let den = BigInt::one() << r as usize;
    GaussRat::new(Q::new(floor_scaled(&g.re, r), den.clone()), Q::new(floor_scaled(&g.im, r), den))
}

/// Degrees with every input, pinned or not, counted as degree 1.
pub fn all_input_degrees(c: &Circuit) -> Vec<usize> {
    let mut d = Vec::with_capacity(c.size());
    for g in c.gates() {
        d.push(match g {
            Gate::Input(_) => 1,
            Gate::Add(ch) => ch.iter().map(|&x| d[x]).max().unwrap_or(0),
            Gate::Mul(a, b) => d[*a] + d[*b],
        });
    }
    d
}

/// `(2M)^{d·h·⌈log₂ m⌉+1}`, as its base-2 logarithm.
pub fn value_bound_log2(d: usize, h: usize, m: usize, big_m: f64) -> f64 {
    (d as f64 * h as f64 * log_fanin(m) as f64 + 1.0) * (2.0 * big_m).log2()
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct BitWidthReport {
    /// Largest numerator width (bits of the Gaussian integer) per depth level.
    pub per_level_max: Vec<u64>,
    pub max_bits: u64,
    /// Largest numerator width allowed by the value bound and the scale.
    pub bound_bits: u64,
    /// `bound_bits − max_bits`.
    pub margin: i64,
    /// Smallest slack, in bits, between a gate value and its value bound.
    pub value_bound_slack: f64,
    pub value_bound_ok: bool,
    /// `C5·d³·h·r·⌈log₂ m⌉·⌈log₂ M⌉` for the whole circuit.
    pub lemma_bits: f64,
    pub effective_m: f64,
}

/// Exact value `X / 2^e` with Gaussian-integer numerator.
#[derive(Clone, Debug)]
struct Fixed {
    re: BigInt,
    im: BigInt,
    e: u64,
}

impl Fixed {
    fn shift(&self, e: u64) -> (BigInt, BigInt) {
        let s = (e - self.e) as usize;
        (&self.re << s, &self.im << s)
    }
    fn to_gauss(&self) -> GaussRat {
        let den = BigInt::one() << self.e as usize;
        GaussRat::new(Q::new(self.re.clone(), den.clone()), Q::new(self.im.clone(), den))
    }
}

/// Rounds every input (pinned constants included) to `r` bits and evaluates
/// the first output in exact scaled-integer arithmetic.
pub fn booleanized_evaluate(c: &Circuit, assignment: &[ComplexScalar], budget: &PrecisionBudget) -> Result<(GaussRat, BitWidthReport)> {
    let nv = c.num_vars();
    if assignment.len() != c.num_free() && assignment.len() != nv {
        return Err(Error::Arity { expected: c.num_free(), got: assignment.len() });
    }
    let r = budget.r;
    let mut rounded: Vec<Option<Fixed>> = vec![None; nv];
    let mut eff_m = budget.m_bound.max(1.0);
    for v in 0..nv {
        let x = match c.pin(v) {
            Some(q) => ComplexScalar::Exact(q.clone()),
            None => match assignment.get(v) {
                Some(a) => a.clone(),
                None => continue,
            },
        };
        let mag = x.to_c64().norm();
        if mag > budget.m_bound * (1.0 + 1e-12) {
            return Err(Error::Magnitude { got: mag, bound: budget.m_bound });
        }
        let g = round_input(&x, r);
        eff_m = eff_m.max(g.to_c64().norm());
        let den = BigInt::one() << r as usize;
        let re = (&g.re * Q::from_integer(den.clone())).to_integer();
        let im = (&g.im * Q::from_integer(den)).to_integer();
        rounded[v] = Some(Fixed { re, im, e: r });
    }
    let degs = all_input_degrees(c);
    let depths = c.gate_depths();
    let fanin = c.metrics().max_add_fanin.max(2);
    let mut vals: Vec<Fixed> = Vec::with_capacity(c.size());
    let mut per_level: Vec<u64> = vec![0; depths.iter().copied().max().unwrap_or(0) + 1];
    let (mut max_bits, mut bound_bits) = (0u64, 0u64);
    let mut slack = f64::INFINITY;
    for (i, g) in c.gates().iter().enumerate() {
        let f = match g {
            Gate::Input(v) => rounded[*v].clone().ok_or(Error::Arity { expected: nv, got: assignment.len() })?,
            Gate::Add(ch) => {
                let e = ch.iter().map(|&x| vals[x].e).max().unwrap_or(0);
                let (mut re, mut im) = (BigInt::zero(), BigInt::zero());
                for &x in ch {
                    let (a, b) = vals[x].shift(e);
                    re += a;
                    im += b;
                }
                Fixed { re, im, e }
            }
            Gate::Mul(a, b) => {
                let (x, y) = (&vals[*a], &vals[*b]);
                Fixed { re: &x.re * &y.re - &x.im * &y.im, im: &x.re * &y.im + &x.im * &y.re, e: x.e + y.e }
            }
        };
        let bits = f.re.bits().max(f.im.bits()) + 1;
        per_level[depths[i]] = per_level[depths[i]].max(bits);
        max_bits = max_bits.max(bits);
        let vb = value_bound_log2(degs[i], depths[i], fanin, eff_m);
        let lv = log2_abs(&f.re, &f.im) - f.e as f64;
        slack = slack.min(vb - lv);
        bound_bits = bound_bits.max((vb + f.e as f64).ceil() as u64 + 2);
        vals.push(f);
    }
    let d = c.gate_degrees().iter().copied().max().unwrap_or(0).max(degs.iter().copied().max().unwrap_or(0));
    let h = c.metrics().depth;
    let lemma_bits = C5 * (d as f64).powi(3) * h as f64 * r as f64 * log_fanin(fanin) as f64 * eff_m.log2().ceil().max(1.0);
    let out = vals[c.output()].to_gauss();
    let report = BitWidthReport {
        per_level_max: per_level,
        max_bits,
        bound_bits,
        margin: bound_bits as i64 - max_bits as i64,
        value_bound_slack: slack,
        value_bound_ok: slack >= -1e-9,
        lemma_bits,
        effective_m: eff_m,
    };
    Ok((out, report))
}

/// `N·d·ε·(2M)^{2hd²⌈log m⌉+1}`.
pub fn rounding_error_bound(n: u64, d: u64, h: u64, m: usize, big_m: f64, eps_in: f64) -> BigFloat {
    if eps_in == 0.0 {
        return BigFloat::from_word(0, BF_PREC);
    }
    let e = 2 * h * d * d * log_fanin(m) + 1;
    let base = BigFloat::from_f64(2.0 * big_m, BF_PREC);
    let p = base.powi(e as usize, BF_PREC, RM);
    BigFloat::from_f64(n as f64 * d as f64 * eps_in, BF_PREC).mul(&p, BF_PREC, RM)
}

/// Base-2 logarithm of [`rounding_error_bound`] (usable for any size).
pub fn rounding_error_bound_log2(n: u64, d: u64, h: u64, m: usize, big_m: f64, eps_in_log2: f64) -> f64 {
    let e = (2 * h * d * d * log_fanin(m) + 1) as f64;
    (n as f64 * d as f64).log2() + eps_in_log2 + e * (2.0 * big_m).log2()
}

/// Smallest `r` exceeding `(10hd³⌈log m⌉+1)·log₂(4NdM/ε)`.
pub fn corollary_r(n: u64, d: u64, h: u64, m: usize, big_m: f64, eps: f64) -> u64 {
    let k = (10 * h * d * d * d * log_fanin(m) + 1) as f64;
    (k * (4.0 * n as f64 * d as f64 * big_m / eps).log2()).floor() as u64 + 1
}

/// Smallest `r` exceeding `(2hd²⌈log m⌉+1)·log₂(4NMd/ε)`, the precondition
/// of the fixed-precision error guarantee.
pub fn lemma_r(n: u64, d: u64, h: u64, m: usize, big_m: f64, eps: f64) -> u64 {
    let k = (2 * h * d * d * log_fanin(m) + 1) as f64;
    (k * (4.0 * n as f64 * d as f64 * big_m / eps).log2()).floor() as u64 + 1
}

/// `log₂` of the middle term `2^{−r+1}·N·d·(2M)^{10hd³⌈log m⌉+1}`.
pub fn corollary_middle_log2(n: u64, d: u64, h: u64, m: usize, big_m: f64, r: u64) -> f64 {
    let k = (10 * h * d * d * d * log_fanin(m) + 1) as f64;
    1.0 - r as f64 + (n as f64 * d as f64).log2() + k * (2.0 * big_m).log2()
}

/// Magnitude bound `M = max(1, |inputs|, |pinned constants|)`.
pub fn magnitude_bound(c: &Circuit, assignment: &[ComplexScalar]) -> f64 {
    let pins = c.pins().iter().flatten().map(|q| q.to_c64().norm());
    let ins = assignment.iter().map(|a| a.to_c64().norm());
    pins.chain(ins).fold(1.0, f64::max)
}

/// Modeled Boolean depth `h·⌈log₂(m·B)⌉` with `B = C5·d³·h·r·⌈log₂ m⌉·⌈log₂ M⌉`.
pub fn boolean_depth_estimate(c: &Circuit, budget: &PrecisionBudget) -> u64 {
    let m = c.metrics();
    if m.depth == 0 {
        return 0;
    }
    let fanin = m.max_add_fanin.max(2);
    let d = all_input_degrees(c).into_iter().max().unwrap_or(1) as f64;
    let b = C5 * d.powi(3) * m.depth as f64 * budget.r as f64 * log_fanin(fanin) as f64 * budget.m_bound.log2().ceil().max(1.0);
    m.depth as u64 * ((fanin as f64 * b).log2().ceil().max(1.0) as u64)
}

/// `|a − b|` for exact values, as an `f64`.
pub fn abs_diff(a: &GaussRat, b: &GaussRat) -> f64 {
    let d = a.sub(b);
    (q_to_f64(&d.re).powi(2) + q_to_f64(&d.im).powi(2)).sqrt()
}
