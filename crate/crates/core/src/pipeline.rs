//! End-to-end determinant approximation and the composed pipeline circuit.

use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;

use crate::cac::{
    algorithm_k, budget, cac_circuit, hermitian_schedule, hurwitz_schedule, practical_budget, practical_precision, run_cac, CacBudget,
    CacSchedule, ScheduleClass, PRACTICAL_M0, THETA,
};
use crate::circuit::{compose_multi, Builder, Circuit, VarMap};
use crate::coeff_extract::extract_coefficients_batch;
use crate::depth_reduce::{binarize_adds, depth_reduce};
use crate::det_circuits::{charpoly_exact, root_locations, samuelson_berkowitz_circuit, InterpolationSpec, SignMode};
use crate::error::{Error, Result};
use crate::log_transform::{log_derivative_batch_circuit, Convention, DerivativeSeries, SeriesKind};
use crate::matrix::{delta_q, det_exact, exact_det, ComplexMatrix, MatrixClass};
use crate::precision::{
    abs_diff, all_input_degrees, boolean_depth_estimate, booleanized_evaluate, corollary_r, lemma_r, magnitude_bound, rounding_error_bound_log2,
    PrecisionBudget, PrecisionMode,
};
use crate::scalar::{bf_to_f64, factorial, q_to_f64, ArithMode, CFloat, ComplexScalar, GaussRat, Q};

/// Circuit over the `n²` matrix entries computing `f̂_t^(0)`: determinant
/// circuit, `k+1` derivatives in `z`, logarithm, then the linear CAC map.
pub fn composed_circuit(n: usize, sign: SignMode, schedule: &CacSchedule, budget: &CacBudget) -> Result<Circuit> {
    let k = usize::try_from(budget.m0()).map_err(|_| Error::Parameter("m0 too large for a circuit".into()))?;
    if budget.m.len() != schedule.t() + 1 {
        return Err(Error::Parameter("budget and schedule lengths differ".into()));
    }
    let spec = InterpolationSpec::new(n, sign);
    let sb = samuelson_berkowitz_circuit(spec)?;
    let ext = extract_coefficients_batch(&sb, spec.z_var(), k)?;
    // g^(l)(0) = l!·[z^l]g
    let mut b = Builder::new(ext.num_free());
    let map = b.copy_gates(&ext, &VarMap::Keep);
    let outs: Vec<usize> = (0..=k)
        .map(|l| {
            let o = map[ext.outputs()[l]];
            b.scale(&GaussRat::real(Q::from_integer(factorial(l))), o)
        })
        .collect();
    let derivs = b.finish(outs);
    let log = log_derivative_batch_circuit(k)?;
    let cac = cac_circuit(schedule, budget)?;
    let f_of_g = compose_multi(&cac, &log)?;
    compose_multi(&f_of_g, &derivs)?.with_num_free(n * n)
}

// ---------------------------------------------------------------- end to end

/// Which root region and sign correction to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum ProblemClass {
    Hermitian,
    Hurwitz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum ParamMode {
    Paper,
    Practical,
}

#[derive(Clone, Debug)]
pub struct ApproxOptions {
    pub class: ProblemClass,
    pub param_mode: ParamMode,
    /// Initial derivative budget: practical decay from it (default 64), or in
    /// paper mode the unscaled decay from it instead of the derived `k`.
    pub m0: Option<u64>,
    /// Mantissa bits for the continuation (default `16·m0 + 128`).
    pub precision_bits: Option<usize>,
    pub verify: bool,
    /// Skip the class certificate check.
    pub unsafe_input: bool,
    /// Run the continuation even when the budget reaches `n`.
    pub force_cac: bool,
    /// Build the composed circuit at derivative order `min(m0, n)` and report
    /// its metrics before and after depth reduction.
    pub circuit_metrics: bool,
    /// When set with `circuit_metrics`, evaluate the reduced circuit with
    /// inputs rounded to this many bits.
    pub boolean_r: Option<u64>,
}

impl ApproxOptions {
    pub fn practical(class: ProblemClass) -> Self {
        ApproxOptions {
            class,
            param_mode: ParamMode::Practical,
            m0: None,
            precision_bits: None,
            verify: false,
            unsafe_input: false,
            force_cac: false,
            circuit_metrics: false,
            boolean_r: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct C64 {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for C64 {
    fn from(c: Complex64) -> Self {
        C64 { re: c.re, im: c.im }
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct CircuitReport {
    pub k: usize,
    pub size_pre: usize,
    pub size_post: usize,
    pub depth_pre: usize,
    pub depth_post: usize,
    pub mult_depth_pre: usize,
    pub mult_depth_post: usize,
    /// Fan-in-2 depth after splitting wide sums.
    pub depth_binarized: usize,
    pub degree: usize,
    /// Rounding bits sufficient for `ε` accuracy, cubic-degree bound.
    pub corollary_r: u64,
    /// Rounding bits sufficient for `ε` accuracy, quadratic-degree bound.
    pub lemma_r: u64,
    pub boolean_depth: u64,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ScheduleReport {
    pub class: ScheduleClass,
    pub points: Vec<String>,
    pub non_increasing: bool,
    pub final_certificate_ok: bool,
    /// Largest root-to-step ratio allowed by the excluded region.
    pub region_ratio_max: f64,
    /// Largest actual root-to-step ratio, when the spectrum is certified.
    pub root_ratio_max: Option<f64>,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct BitWidthSummary {
    pub max: u64,
    pub bound: u64,
    pub value_bound_ok: bool,
    pub rounding_error: f64,
    pub rounding_error_bound_log2: f64,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ApproxResult {
    pub estimate: C64,
    pub log_estimate: Option<C64>,
    pub oracle: Option<C64>,
    pub rel_error: Option<f64>,
    /// Derivative budget `k = m_0`; `None` when it overflows.
    #[serde(serialize_with = "ser_opt_u128")]
    pub k: Option<u128>,
    pub t: usize,
    pub theta: f64,
    #[serde(serialize_with = "ser_vec_u128")]
    pub m_sequence: Vec<u128>,
    /// Asymptotic rounding allocation `k^14`, as a decimal string.
    pub r_paper: Option<String>,
    pub r: Option<u64>,
    pub precision_bits: usize,
    pub circuit: Option<CircuitReport>,
    pub bitwidth: Option<BitWidthSummary>,
    pub schedule: ScheduleReport,
    pub exact_fallback: bool,
    pub wall_time_ms: u64,
}

/// JSON numbers stop at `u64`; larger values are written as strings.
fn u128_value(x: u128) -> wide::Wide {
    match u64::try_from(x) {
        Ok(v) => wide::Wide::Small(v),
        Err(_) => wide::Wide::Big(x.to_string()),
    }
}

mod wide {
    #[derive(serde::Serialize)]
    #[serde(untagged)]
    pub enum Wide {
        Small(u64),
        Big(String),
    }
}

fn ser_opt_u128<S: serde::Serializer>(x: &Option<u128>, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&x.map(u128_value), s)
}

fn ser_vec_u128<S: serde::Serializer>(x: &[u128], s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&x.iter().map(|&v| u128_value(v)).collect::<Vec<_>>(), s)
}

/// Taylor coefficients of `g_A` (or `g_{−A}`): `[z^l] Det(I + z(A − I))` is
/// `(−1)^l` times the `l`-th characteristic coefficient of `A − I`.
pub fn g_coefficients(n: usize, a: &[GaussRat], sign: SignMode) -> Vec<GaussRat> {
    let m: Vec<GaussRat> = (0..n * n)
        .map(|p| {
            let x = if sign == SignMode::Negated { a[p].neg() } else { a[p].clone() };
            if p / n == p % n {
                x.sub(&GaussRat::one())
            } else {
                x
            }
        })
        .collect();
    charpoly_exact(n, &m).into_iter().enumerate().map(|(l, c)| if l % 2 == 1 { c.neg() } else { c }).collect()
}

fn exact_entries(a: &ComplexMatrix) -> Vec<GaussRat> {
    a.entries
        .iter()
        .map(|e| match e {
            ComplexScalar::Exact(q) => q.clone(),
            ComplexScalar::Float(f) => f.to_gauss(),
        })
        .collect()
}

fn check_certificate(a: &ComplexMatrix, class: ProblemClass, delta: &Q) -> Result<()> {
    let cert = a.cert.as_ref().ok_or_else(|| Error::Precondition("matrix carries no class certificate (use --unsafe to skip)".into()))?;
    let ok = match class {
        ProblemClass::Hermitian => matches!(cert.class, MatrixClass::Hermitian | MatrixClass::Psd),
        ProblemClass::Hurwitz => cert.class == MatrixClass::Hurwitz,
    };
    if !ok {
        return Err(Error::Precondition(format!("certificate class {} does not match {class:?} mode", cert.class.tag())));
    }
    if &cert.delta < delta {
        return Err(Error::Precondition(format!("certificate delta {} is below the requested {}", q_to_f64(&cert.delta), q_to_f64(delta))));
    }
    if class == ProblemClass::Hermitian && a.is_exact() && !a.is_hermitian() {
        return Err(Error::Precondition("matrix is not Hermitian".into()));
    }
    Ok(())
}

fn schedule_report(s: &CacSchedule, a: &ComplexMatrix, sign: SignMode) -> ScheduleReport {
    let roots = a.cert.as_ref().and_then(|c| c.spectrum.as_ref()).map(|sp| {
        let w: Vec<GaussRat> = sp.iter().map(|x| if sign == SignMode::Negated { x.neg() } else { x.clone() }).collect();
        root_locations(&w).iter().map(|z| z.to_c64()).collect::<Vec<_>>()
    });
    ScheduleReport {
        class: s.class,
        points: s.points.iter().map(|p| format!("{}{:+}i", p.re, p.im)).collect(),
        non_increasing: s.is_non_increasing(),
        final_certificate_ok: s.final_certificate_ok(),
        region_ratio_max: s.region_ratios().into_iter().fold(0.0, f64::max),
        root_ratio_max: roots.map(|r| s.root_ratios(&r).into_iter().fold(0.0, f64::max)),
    }
}

fn ratio_error(est: &CFloat, oracle: &CFloat) -> f64 {
    let d = est.sub(oracle);
    bf_to_f64(&d.abs()) / bf_to_f64(&oracle.abs())
}

/// Composed circuit at order `k`, its depth-reduced form and the metrics report.
pub fn circuit_report(n: usize, sign: SignMode, schedule: &CacSchedule, k: usize, epsilon: f64) -> Result<(CircuitReport, Circuit)> {
    let budget = practical_budget(k as u64, schedule.t());
    let pre = composed_circuit(n, sign, schedule, &budget)?;
    let post = depth_reduce(&pre)?;
    let bin = binarize_adds(&post);
    let (mp, mq, mb) = (pre.metrics(), post.metrics(), bin.metrics());
    let d = all_input_degrees(&bin).into_iter().max().unwrap_or(1) as u64;
    let h = mb.depth as u64;
    let big_m = magnitude_bound(&bin, &[]);
    let inputs = bin.num_vars() as u64;
    let cor = corollary_r(inputs, d, h, 2, big_m, epsilon);
    let lem = lemma_r(inputs, d, h, 2, big_m, epsilon);
    let pb = PrecisionBudget { r: cor, m_bound: big_m, epsilon, mode: PrecisionMode::Practical };
    let report = CircuitReport {
        k,
        size_pre: mp.size,
        size_post: mq.size,
        depth_pre: mp.depth,
        depth_post: mq.depth,
        mult_depth_pre: mp.mult_depth,
        mult_depth_post: mq.mult_depth,
        depth_binarized: mb.depth,
        degree: mq.degree,
        corollary_r: cor,
        lemma_r: lem,
        boolean_depth: boolean_depth_estimate(&bin, &pb),
    };
    Ok((report, bin))
}

/// Determinant estimate by the derivative-budgeted continuation, or exactly
/// when the budget reaches `n`.
pub fn approximate_determinant(a: &ComplexMatrix, epsilon: f64, delta: f64, opts: &ApproxOptions) -> Result<ApproxResult> {
    let start = Instant::now();
    let n = a.n;
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Parameter(format!("epsilon must lie in (0,1), got {epsilon}")));
    }
    let dq = delta_q(delta)?;
    if !opts.unsafe_input {
        check_certificate(a, opts.class, &dq)?;
    }
    let sign = match opts.class {
        ProblemClass::Hermitian => SignMode::Plain,
        ProblemClass::Hurwitz => SignMode::Negated,
    };
    let schedule = match opts.class {
        ProblemClass::Hermitian => hermitian_schedule(&dq)?,
        ProblemClass::Hurwitz => hurwitz_schedule(&dq)?,
    };
    let t = schedule.t();
    let (k, budget, prec) = match opts.param_mode {
        ParamMode::Practical => {
            let m0 = opts.m0.unwrap_or(PRACTICAL_M0);
            if m0 == 0 {
                return Err(Error::Parameter("m0 must be positive".into()));
            }
            let prec = opts.precision_bits.unwrap_or_else(|| practical_precision(m0));
            (Some(m0 as u128), Some(practical_budget(m0, t)), prec)
        }
        ParamMode::Paper if opts.m0.is_some() => {
            let m0 = opts.m0.unwrap();
            let b = budget(m0 as u128, THETA, t)?;
            (Some(m0 as u128), Some(b), opts.precision_bits.unwrap_or_else(|| practical_precision(m0)))
        }
        ParamMode::Paper => match algorithm_k(n, epsilon, THETA, t) {
            Ok(k) => {
                let b = budget(k, THETA, t).ok();
                let prec = opts.precision_bits.unwrap_or_else(|| practical_precision(k.min(1 << 20) as u64));
                (Some(k), b, prec)
            }
            Err(_) => (None, None, opts.precision_bits.unwrap_or_else(|| practical_precision(PRACTICAL_M0))),
        },
    };
    let r_paper = k.map(|k| BigInt::from(k).pow(14).to_string());
    let entries = exact_entries(a);
    let fallback = k.is_none_or(|k| k >= n as u128) && !opts.force_cac;

    let (estimate, log_estimate) = if fallback {
        (CFloat::from_gauss(&det_exact(n, &entries), prec), None)
    } else {
        let budget = budget.as_ref().ok_or_else(|| Error::Budget { segment: 0, reason: "derivative budget too large to allocate".into() })?;
        let m0 = usize::try_from(budget.m0()).map_err(|_| Error::Budget { segment: 0, reason: "m0 exceeds the address space".into() })?;
        let mut c = g_coefficients(n, &entries, sign);
        c.resize(m0 + 1, GaussRat::zero());
        let g = DerivativeSeries::new(c.into_iter().map(ComplexScalar::Exact).collect(), Convention::Coefficient, SeriesKind::OfG);
        let f = run_cac(&g, &schedule, budget, ArithMode::BigFloat { bits: prec })?;
        let mut e = f.exp(prec);
        if sign == SignMode::Negated && n % 2 == 1 {
            e = e.neg();
        }
        (e, Some(C64::from(f.to_c64())))
    };

    let (oracle, rel_error) = if opts.verify {
        let o = match exact_det(a)? {
            ComplexScalar::Exact(q) => CFloat::from_gauss(&q, prec),
            ComplexScalar::Float(f) => f,
        };
        let rel = ratio_error(&estimate, &o);
        (Some(C64::from(o.to_c64())), Some(rel))
    } else {
        (None, None)
    };

    let (circuit, bitwidth, r) = if opts.circuit_metrics {
        let kc = k.map_or(n, |k| (k.min(n as u128)) as usize).max(1);
        let (rep, bin) = circuit_report(n, sign, &schedule, kc, epsilon)?;
        let bw = match opts.boolean_r {
            Some(rb) => Some(boolean_check(&bin, &entries, rb, epsilon)?),
            None => None,
        };
        let r = Some(rep.corollary_r);
        (Some(rep), bw, r)
    } else {
        (None, None, None)
    };

    Ok(ApproxResult {
        estimate: C64::from(estimate.to_c64()),
        log_estimate,
        oracle,
        rel_error,
        k,
        t,
        theta: THETA,
        m_sequence: budget.map(|b| b.m).unwrap_or_default(),
        r_paper,
        r,
        precision_bits: prec,
        circuit,
        bitwidth,
        schedule: schedule_report(&schedule, a, sign),
        exact_fallback: fallback,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

/// Booleanized evaluation of `c` on `entries` at `r` bits against exact
/// evaluation on the unrounded entries.
pub fn boolean_check(c: &Circuit, entries: &[GaussRat], r: u64, epsilon: f64) -> Result<BitWidthSummary> {
    let assign: Vec<ComplexScalar> = entries.iter().cloned().map(ComplexScalar::Exact).collect();
    let big_m = magnitude_bound(c, &assign);
    let pb = PrecisionBudget { r, m_bound: big_m, epsilon, mode: PrecisionMode::Practical };
    let (val, rep) = booleanized_evaluate(c, &assign, &pb)?;
    let mut full = entries.to_vec();
    full.resize(c.num_vars(), GaussRat::zero());
    for (v, p) in c.pins().iter().enumerate() {
        if let Some(q) = p {
            full[v] = q.clone();
        }
    }
    let exact = c.eval_all::<GaussRat>(&full, &())?[0].clone();
    let d = all_input_degrees(c).into_iter().max().unwrap_or(1) as u64;
    let h = c.metrics().depth as u64;
    let bound = rounding_error_bound_log2(c.num_vars() as u64, d, h, c.metrics().max_add_fanin.max(2), rep.effective_m, 1.0 - r as f64);
    Ok(BitWidthSummary {
        max: rep.max_bits,
        bound: rep.bound_bits,
        value_bound_ok: rep.value_bound_ok,
        rounding_error: abs_diff(&val, &exact),
        rounding_error_bound_log2: bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{generate_hermitian, generate_hurwitz, Certificate};

    fn certified(a: ComplexMatrix, class: MatrixClass) -> ComplexMatrix {
        a.with_cert(Certificate { class, delta: delta_q(0.3).unwrap(), spectrum: None })
    }

    #[test]
    fn identity_is_exact() {
        let a = certified(ComplexMatrix::identity(3), MatrixClass::Hermitian);
        let mut o = ApproxOptions::practical(ProblemClass::Hermitian);
        o.verify = true;
        let r = approximate_determinant(&a, 1e-3, 0.3, &o).unwrap();
        assert!(r.exact_fallback);
        assert_eq!(r.estimate, C64 { re: 1.0, im: 0.0 });
        o.force_cac = true;
        o.m0 = Some(16);
        let r = approximate_determinant(&a, 1e-3, 0.3, &o).unwrap();
        assert!(!r.exact_fallback);
        assert_eq!(r.estimate, C64 { re: 1.0, im: 0.0 });
        assert_eq!(r.rel_error, Some(0.0));
    }

    #[test]
    fn paper_mode_budget_overflows_into_exact_branch() {
        let a = certified(ComplexMatrix::identity(4), MatrixClass::Hermitian);
        let mut o = ApproxOptions::practical(ProblemClass::Hermitian);
        o.param_mode = ParamMode::Paper;
        let r = approximate_determinant(&a, 1e-3, 0.3, &o).unwrap();
        assert!(r.exact_fallback && r.k.is_none_or(|k| k >= 4), "{:?}", r.k);
        o.m0 = Some(100);
        assert!(matches!(approximate_determinant(&a, 1e-3, 0.3, &o), Err(Error::Budget { .. })));
    }

    #[test]
    fn minus_identity_sign() {
        for n in 1..=4 {
            let mut e = vec![GaussRat::zero(); n * n];
            for i in 0..n {
                e[i * n + i] = GaussRat::int(-1);
            }
            let a = certified(ComplexMatrix::from_exact(n, e), MatrixClass::Hurwitz);
            let mut o = ApproxOptions::practical(ProblemClass::Hurwitz);
            o.force_cac = true;
            o.m0 = Some(16);
            let r = approximate_determinant(&a, 1e-3, 0.3, &o).unwrap();
            assert_eq!(r.estimate.re, if n % 2 == 0 { 1.0 } else { -1.0 });
        }
    }

    #[test]
    fn g_coefficients_sum_to_det() {
        let a = generate_hermitian(5, 0.3, 11).unwrap();
        let e = a.exact_entries().unwrap();
        let c = g_coefficients(5, &e, SignMode::Plain);
        assert!(c[0].is_one());
        let s = c.iter().fold(GaussRat::zero(), |x, y| x.add(y));
        assert_eq!(s, det_exact(5, &e));
        let b = generate_hurwitz(4, 0.3, 2).unwrap();
        let e = b.exact_entries().unwrap();
        let c = g_coefficients(4, &e, SignMode::Negated);
        let s = c.iter().fold(GaussRat::zero(), |x, y| x.add(y));
        assert_eq!(s, det_exact(4, &e));
    }

    #[test]
    fn uncertified_input_rejected() {
        let o = ApproxOptions::practical(ProblemClass::Hermitian);
        let err = approximate_determinant(&ComplexMatrix::identity(2), 1e-3, 0.3, &o).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
        let mut o = o;
        o.unsafe_input = true;
        assert!(approximate_determinant(&ComplexMatrix::identity(2), 1e-3, 0.3, &o).is_ok());
    }

    #[test]
    fn composed_circuit_matches_cac_weights() {
        let a = generate_hermitian(3, 0.3, 5).unwrap();
        let e = a.exact_entries().unwrap();
        let s = hermitian_schedule(&delta_q(0.3).unwrap()).unwrap();
        let b = practical_budget(3, s.t());
        let c = composed_circuit(3, SignMode::Plain, &s, &b).unwrap();
        let out = c.eval_free::<GaussRat>(&e, &()).unwrap()[0].clone();
        let mut g = g_coefficients(3, &e, SignMode::Plain);
        g.resize(4, GaussRat::zero());
        let gs = DerivativeSeries::new(g.into_iter().map(ComplexScalar::Exact).collect(), Convention::Coefficient, SeriesKind::OfG);
        let num = run_cac(&gs, &s, &b, ArithMode::ExactRational).unwrap();
        assert_eq!(&out, num.as_exact().unwrap());
    }

    /// The continuation itself on a generated 8×8 instance at m0 = 64.
    #[test]
    #[ignore = "diverges at desk-scale budgets: roots sit about twice the step length from the path, so the re-expansions amplify truncation error unless m0 is far larger"]
    fn forced_cac_hermitian_8x8() {
        let a = generate_hermitian(8, 0.3, 1).unwrap();
        let mut o = ApproxOptions::practical(ProblemClass::Hermitian);
        o.force_cac = true;
        o.verify = true;
        let r = approximate_determinant(&a, 1e-3, 0.3, &o).unwrap();
        assert!(r.rel_error.unwrap() <= 1e-3, "{:?}", r.rel_error);
    }
}
