//! Computational analytic continuation: shift truncated Taylor data of
//! `f = log g` from 0 to 1 along a fixed root-avoiding path.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::circuit::{Builder, Circuit};
use crate::error::{Error, Result};
use crate::log_transform::{log_derivatives, Convention, DerivativeSeries};
use crate::scalar::{q_frac, q_to_f64, ArithMode, ComplexScalar, GaussRat, Q};

/// Safety parameter of both schedules.
pub const THETA: f64 = 0.4;

/// Practical budget: `m_{i+1} = max(PRACTICAL_FLOOR, ⌈PRACTICAL_DECAY·m_i⌉)`.
pub const PRACTICAL_DECAY: (u64, u64) = (3, 4);
pub const PRACTICAL_FLOOR: u64 = 8;
pub const PRACTICAL_M0: u64 = 64;

/// Mantissa bits used for a practical run with initial budget `m0`.
pub fn practical_precision(m0: u64) -> usize {
    16 * m0 as usize + 128
}

// ---------------------------------------------------------------- schedules

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum ScheduleClass {
    Hermitian,
    Hurwitz,
    Custom,
}

#[derive(Clone, Debug)]
pub struct CacSchedule {
    pub points: Vec<GaussRat>,
    pub theta: f64,
    pub class: ScheduleClass,
    pub delta: Q,
}

fn third_pow(e: usize) -> Q {
    Q::new(BigInt::one(), BigInt::from(3u32).pow(e as u32))
}

impl CacSchedule {
    /// Arbitrary path starting at 0.
    pub fn custom(points: Vec<GaussRat>, theta: f64) -> Result<Self> {
        if points.first().is_none_or(|p| !p.is_zero()) {
            return Err(Error::Parameter("schedule must start at 0".into()));
        }
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::Parameter(format!("theta must lie in (0,1], got {theta}")));
        }
        Ok(CacSchedule { points, theta, class: ScheduleClass::Custom, delta: Q::zero() })
    }

    pub fn t(&self) -> usize {
        self.points.len() - 1
    }
    pub fn beta(&self) -> f64 {
        self.theta.exp()
    }
    /// `Δ_1…Δ_t`.
    pub fn steps(&self) -> Vec<GaussRat> {
        self.points.windows(2).map(|w| w[1].sub(&w[0])).collect()
    }
    pub fn step_lengths(&self) -> Vec<f64> {
        self.steps().iter().map(|d| d.to_c64().norm()).collect()
    }
    /// Indices `i` (1-based) with `|Δ_i| > |Δ_{i−1}|`, compared exactly.
    pub fn increasing_steps(&self) -> Vec<usize> {
        let st = self.steps();
        (1..st.len()).filter(|&i| st[i].norm_sqr() > st[i - 1].norm_sqr()).map(|i| i + 1).collect()
    }
    pub fn is_non_increasing(&self) -> bool {
        self.increasing_steps().is_empty()
    }

    /// `dist(s_{i−1}, nearest root) / |Δ_i|` for `i = 1..=t`.
    pub fn root_ratios(&self, roots: &[Complex64]) -> Vec<f64> {
        let st = self.step_lengths();
        (0..self.t())
            .map(|i| {
                let s = self.points[i].to_c64();
                let d = roots.iter().map(|r| (r - s).norm()).fold(f64::INFINITY, f64::min);
                d / st[i]
            })
            .collect()
    }

    /// Lower bound on the ratio at every step using only the root-free
    /// region of the schedule's class (infinite for a custom schedule).
    pub fn region_ratios(&self) -> Vec<f64> {
        let st = self.step_lengths();
        let rho = q_to_f64(&(&self.delta / (Q::one() + &self.delta)));
        (0..self.t())
            .map(|i| {
                let s = self.points[i].to_c64();
                let d = match self.class {
                    ScheduleClass::Hermitian => hermitian_region_distance(s, rho),
                    ScheduleClass::Hurwitz => hurwitz_region_distance(s, rho),
                    ScheduleClass::Custom => f64::INFINITY,
                };
                d / st[i]
            })
            .collect()
    }

    /// Last hop of the Hermitian schedule: `|Δ_t| ≤ (9δ/10)/e^θ`.
    pub fn final_certificate_ok(&self) -> bool {
        let last = self.step_lengths().last().copied().unwrap_or(0.0);
        last <= 0.9 * q_to_f64(&self.delta) / self.beta()
    }

    /// One line per point: index, Re(s), Im(s), |Δ_i| (into s_i), ratio
    /// certified by the class region for the step leaving s_i.
    pub fn dump(&self) -> Vec<String> {
        let st = self.step_lengths();
        let rr = self.region_ratios();
        (0..=self.t())
            .map(|i| {
                let s = self.points[i].to_c64();
                let d = if i == 0 { 0.0 } else { st[i - 1] };
                let r = rr.get(i).copied();
                match r {
                    Some(r) => format!("{i} {:.12} {:.12} {:.12} {:.6}", s.re, s.im, d, r),
                    None => format!("{i} {:.12} {:.12} {:.12} -", s.re, s.im, d),
                }
            })
            .collect()
    }
}

/// Distance from `s` to the real set `(−∞,−1/2] ∪ [1/2, 1−ρ] ∪ [1+ρ, ∞)`.
fn hermitian_region_distance(s: Complex64, rho: f64) -> f64 {
    let mut best = f64::INFINITY;
    let mut iv = |lo: f64, hi: f64| {
        if lo <= hi {
            let x = s.re.clamp(lo, hi);
            best = best.min(((s.re - x).powi(2) + s.im * s.im).sqrt());
        }
    };
    iv(f64::NEG_INFINITY, -0.5);
    iv(0.5, 1.0 - rho);
    iv(1.0 + rho, f64::INFINITY);
    best
}

/// Distance from `s` to `{Re z ≥ 1/2} \ (D(1/2,1/2) ∪ D(1,ρ))`, by dense
/// sampling of its boundary arcs and exact treatment of the vertical rays.
fn hurwitz_region_distance(s: Complex64, rho: f64) -> f64 {
    let inside = |z: Complex64| z.re >= 0.5 && (z - 0.5).norm() >= 0.5 && (z - 1.0).norm() >= rho;
    if inside(s) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    // rays Re = 1/2, |Im| ≥ 1/2
    for sign in [1.0, -1.0] {
        let y = (sign * s.im).max(0.5) * sign;
        best = best.min((s - Complex64::new(0.5, y)).norm());
    }
    const N: usize = 20000;
    for k in 0..=N {
        let a = std::f64::consts::PI * (k as f64 / N as f64 - 0.5);
        let p = Complex64::new(0.5, 0.0) + 0.5 * Complex64::from_polar(1.0, a);
        if (p - 1.0).norm() >= rho {
            best = best.min((s - p).norm());
        }
        let a2 = 2.0 * std::f64::consts::PI * k as f64 / N as f64;
        let q = Complex64::new(1.0, 0.0) + rho * Complex64::from_polar(1.0, a2);
        if q.re >= 0.5 && (q - 0.5).norm() >= 0.5 {
            best = best.min((s - q).norm());
        }
    }
    best
}

fn check_delta(delta: &Q) -> Result<()> {
    if delta <= &Q::zero() || delta >= &Q::one() {
        return Err(Error::Parameter(format!("delta must lie in (0,1), got {delta}")));
    }
    Ok(())
}

/// Hermitian path: across to `1 + i/2` in steps of 1/4, then down to 1 with
/// steps shrinking by 3. The first descending step is split in two
/// (`1+i/2 → 1+i/3 → 1+i/6`) so that step lengths never increase.
pub fn hermitian_schedule(delta: &Q) -> Result<CacSchedule> {
    build_hermitian(delta, true)
}

/// The same path without the split: its first descending step (length 1/3)
/// is longer than the preceding steps (1/4).
pub fn hermitian_schedule_unsplit(delta: &Q) -> Result<CacSchedule> {
    build_hermitian(delta, false)
}

fn build_hermitian(delta: &Q, split: bool) -> Result<CacSchedule> {
    check_delta(delta)?;
    let h = q_frac(1, 2);
    let mut pts = vec![GaussRat::zero(), GaussRat::new(Q::zero(), q_frac(1, 4)), GaussRat::new(Q::zero(), h.clone())];
    for k in 1..=4 {
        pts.push(GaussRat::new(q_frac(k, 4), h.clone()));
    }
    if split {
        pts.push(GaussRat::new(Q::one(), q_frac(1, 3)));
    }
    let bound = delta / Q::from_integer(5.into());
    let mut j = 7;
    loop {
        let im = &h * third_pow(j - 6);
        pts.push(GaussRat::new(Q::one(), im.clone()));
        j += 1;
        let s = CacSchedule { points: pts.clone(), theta: THETA, class: ScheduleClass::Hermitian, delta: delta.clone() };
        // Im(s_{t−1}) ≤ δ/5 and the last hop certified.
        if im <= bound && {
            let mut f = s.clone();
            f.points.push(GaussRat::one());
            f.final_certificate_ok()
        } {
            break;
        }
    }
    pts.push(GaussRat::one());
    Ok(CacSchedule { points: pts, theta: THETA, class: ScheduleClass::Hermitian, delta: delta.clone() })
}

/// `t` of the (split) Hermitian schedule: `8 + ⌈log_3(5/(2δ))⌉`, which lies
/// in `⌈log_3(1/δ)⌉ + {8, 9}`.
pub fn hermitian_t(delta: &Q) -> usize {
    8 + ceil_log3(&(Q::from_integer(5.into()) / (Q::from_integer(2.into()) * delta)))
}

/// `t` of the Hurwitz schedule: `5 + ⌈log_3(5/(2δ))⌉`.
pub fn hurwitz_t(delta: &Q) -> usize {
    5 + ceil_log3(&(Q::from_integer(5.into()) / (Q::from_integer(2.into()) * delta)))
}

/// Smallest `m ≥ 0` with `3^m ≥ x`, exactly.
pub fn ceil_log3(x: &Q) -> usize {
    let mut m = 0;
    let mut p = Q::one();
    while &p < x {
        p *= Q::from_integer(3.into());
        m += 1;
    }
    m
}

/// Hurwitz path along the real axis: steps of 1/6 up to 5/6, then shrinking
/// by 3 towards 1.
pub fn hurwitz_schedule(delta: &Q) -> Result<CacSchedule> {
    check_delta(delta)?;
    let mut pts: Vec<GaussRat> = (0..=4).map(|k| GaussRat::frac(k, 6)).collect();
    let target = Q::one() - delta / Q::from_integer(5.into());
    let mut j = 5;
    loop {
        let s = q_frac(1, 2) + q_frac(1, 2) * (Q::one() - third_pow(j - 4));
        pts.push(GaussRat::real(s.clone()));
        j += 1;
        if s >= target {
            break;
        }
    }
    pts.push(GaussRat::one());
    Ok(CacSchedule { points: pts, theta: THETA, class: ScheduleClass::Hurwitz, delta: delta.clone() })
}

// ---------------------------------------------------------------- budgets

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum BudgetMode {
    PaperFaithful,
    Practical,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct CacBudget {
    pub m: Vec<u128>,
    pub mode: BudgetMode,
}

impl CacBudget {
    pub fn m0(&self) -> u128 {
        self.m[0]
    }
}

/// `m_{i+1} = ⌈θ·m_i/(2 ln m_i)⌉`, natural log.
pub fn budget(m0: u128, theta: f64, t: usize) -> Result<CacBudget> {
    if m0 < 11 {
        return Err(Error::Parameter(format!("m0 must be at least 11, got {m0}")));
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Parameter(format!("theta must lie in (0,1], got {theta}")));
    }
    let mut m = vec![m0];
    for i in 0..t {
        let mi = m[i];
        if mi <= 1 {
            return Err(Error::Budget { segment: i + 1, reason: format!("m_{i} = {mi} leaves no derivatives to shift") });
        }
        let x = mi as f64;
        let next = (theta * x / (2.0 * x.ln())).ceil().max(1.0) as u128;
        m.push(next.min(mi));
    }
    Ok(CacBudget { m, mode: BudgetMode::PaperFaithful })
}

/// `m_{i+1} = max(floor, ⌈(3/4)·m_i⌉)`, never above `m_i`.
pub fn practical_budget(m0: u64, t: usize) -> CacBudget {
    let mut m = vec![m0 as u128];
    let (a, b) = PRACTICAL_DECAY;
    for i in 0..t {
        let mi = m[i] as u64;
        let next = (a * mi).div_ceil(b).max(PRACTICAL_FLOOR).min(mi);
        m.push(next as u128);
    }
    CacBudget { m, mode: BudgetMode::Practical }
}

/// Smallest integer `m0 ≥ c·L·(c·t·(ln t + ln L))^t` with `L = ln(n/(εθ))`.
/// `c = 10` suffices for one continuation; the full estimate uses `c = 40`.
pub fn paper_m0_with(n: usize, epsilon: f64, theta: f64, t: usize, c: f64) -> Result<u128> {
    let l = (n as f64 / (epsilon * theta)).ln();
    if l.partial_cmp(&1.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Parameter("epsilon too large: logarithms must be positive".into()));
    }
    let tt = t as f64;
    let inner = c * tt * (tt.max(1.0).ln() + l.ln());
    let v = c * l * inner.powi(t as i32);
    if !v.is_finite() || v >= u128::MAX as f64 {
        return Err(Error::Parameter(format!("m0 bound {v:e} does not fit in 128 bits")));
    }
    Ok((v.ceil() as u128).max(1))
}

pub fn paper_m0(n: usize, epsilon: f64, theta: f64, t: usize) -> Result<u128> {
    paper_m0_with(n, epsilon, theta, t, 10.0)
}

/// `k` of the main algorithm (constant 40).
pub fn algorithm_k(n: usize, epsilon: f64, theta: f64, t: usize) -> Result<u128> {
    paper_m0_with(n, epsilon, theta, t, 40.0)
}

// ---------------------------------------------------------------- shifting

/// Taylor data of `f` at `s_i`, stored as coefficients `f^(l)(s_i)/l!`.
#[derive(Clone, Debug)]
pub struct CacState {
    pub i: usize,
    pub coeffs: Vec<ComplexScalar>,
}

impl CacState {
    pub fn from_series(s: &DerivativeSeries) -> Self {
        CacState { i: 0, coeffs: s.coefficients() }
    }
    pub fn m(&self) -> usize {
        self.coeffs.len() - 1
    }
    /// `f̂_i^(l)`.
    pub fn derivatives(&self) -> Vec<ComplexScalar> {
        let s = DerivativeSeries::new(self.coeffs.clone(), Convention::Coefficient, crate::log_transform::SeriesKind::OfF);
        s.derivatives()
    }
    pub fn value(&self) -> &ComplexScalar {
        &self.coeffs[0]
    }
}

fn binomials(m: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    for r in 1..=m {
        let prev = &rows[r - 1];
        let mut row = vec![BigInt::one(); r + 1];
        for k in 1..r {
            row[k] = &prev[k - 1] + &prev[k];
        }
        rows.push(row);
    }
    rows
}

/// `f̂_{i+1}^(l) = Σ_{p=0}^{m_i−l} f̂_i^(p+l)/p!·Δ^p` for `0 ≤ l ≤ m_next`, in
/// coefficient form `c'_l = Σ_p C(p+l, l)·c_{p+l}·Δ^p`.
pub fn taylor_shift(state: &CacState, delta: &ComplexScalar, m_next: usize) -> Result<CacState> {
    let m = state.m();
    if m_next > m {
        return Err(Error::Budget { segment: state.i + 1, reason: format!("m_next = {m_next} exceeds m_i = {m}") });
    }
    let mode = state.coeffs[0].mode();
    let delta = delta.to_mode(mode);
    let mut pw = vec![ComplexScalar::one(mode)];
    for p in 1..=m {
        pw.push(pw[p - 1].try_mul(&delta)?);
    }
    let binom = binomials(m);
    let mut out = Vec::with_capacity(m_next + 1);
    for l in 0..=m_next {
        let mut acc = ComplexScalar::zero(mode);
        for p in 0..=m - l {
            let w = GaussRat::real(Q::from_integer(binom[p + l][l].clone()));
            acc = acc.try_add(&state.coeffs[p + l].try_mul(&pw[p])?.scale(&w))?;
        }
        out.push(acc);
    }
    Ok(CacState { i: state.i + 1, coeffs: out })
}

fn budget_usize(b: &CacBudget) -> Result<Vec<usize>> {
    b.m.iter()
        .enumerate()
        .map(|(i, &m)| {
            usize::try_from(m)
                .ok()
                .filter(|&m| m <= 1 << 20)
                .ok_or(Error::Budget { segment: i, reason: format!("m_{i} = {m} is too large to run") })
        })
        .collect()
}

/// Runs the shifts and returns every state; the last one holds `f̂_t^(0)`.
/// `g` must start with `g(0) = 1` and carry at least `m_0 + 1` entries.
pub fn run_cac_states(g: &DerivativeSeries, schedule: &CacSchedule, budget: &CacBudget, mode: ArithMode) -> Result<Vec<CacState>> {
    if budget.m.len() != schedule.t() + 1 {
        return Err(Error::Parameter(format!("budget has {} entries, schedule needs {}", budget.m.len(), schedule.t() + 1)));
    }
    let ms = budget_usize(budget)?;
    let gm = DerivativeSeries { values: g.values.iter().map(|v| v.to_mode(mode)).collect(), ..g.clone() };
    let f = log_derivatives(&gm, ms[0])?;
    let mut states = vec![CacState::from_series(&f)];
    for (i, d) in schedule.steps().iter().enumerate() {
        let d = ComplexScalar::embed(d, mode);
        let next = taylor_shift(&states[i], &d, ms[i + 1])?;
        states.push(next);
    }
    Ok(states)
}

/// `f̂ = f̂_t^(0)`, the estimate of `log g(s_t)`.
pub fn run_cac(g: &DerivativeSeries, schedule: &CacSchedule, budget: &CacBudget, mode: ArithMode) -> Result<ComplexScalar> {
    let states = run_cac_states(g, schedule, budget, mode)?;
    Ok(states.last().expect("at least one state").value().clone())
}

/// Exact weights `w_l` with `f̂_t^(0) = Σ_l w_l·f^(l)(0)`; the shifts are linear.
pub fn cac_linear_weights(schedule: &CacSchedule, budget: &CacBudget) -> Result<Vec<GaussRat>> {
    let ms = budget_usize(budget)?;
    if ms.len() != schedule.t() + 1 {
        return Err(Error::Parameter("budget and schedule lengths differ".into()));
    }
    // Transpose of the shift: propagate the functional backwards.
    let steps = schedule.steps();
    let mut w: Vec<GaussRat> = vec![GaussRat::one()];
    w.resize(ms[schedule.t()] + 1, GaussRat::zero());
    for i in (0..schedule.t()).rev() {
        let (m, mn) = (ms[i], ms[i + 1]);
        let binom = binomials(m);
        let mut pw = vec![GaussRat::one()];
        for p in 1..=m {
            pw.push(pw[p - 1].mul(&steps[i]));
        }
        let mut prev = vec![GaussRat::zero(); m + 1];
        for (l, wl) in w.iter().enumerate().take(mn + 1) {
            if wl.is_zero() {
                continue;
            }
            for p in 0..=m - l {
                let b = GaussRat::real(Q::from_integer(binom[p + l][l].clone()));
                prev[p + l] = prev[p + l].add(&wl.mul(&pw[p]).mul(&b));
            }
        }
        w = prev;
    }
    // Coefficient weights to derivative weights: c_l = f^(l)/l!.
    Ok(w.into_iter()
        .enumerate()
        .map(|(l, x)| x.mul(&GaussRat::real(Q::new(BigInt::one(), crate::scalar::factorial(l)))))
        .collect())
}

/// Circuit over `f^(0)…f^(m_0)` (free variables) computing `f̂_t^(0)` with
/// the pinned weights of [`cac_linear_weights`].
pub fn cac_circuit(schedule: &CacSchedule, budget: &CacBudget) -> Result<Circuit> {
    let w = cac_linear_weights(schedule, budget)?;
    let mut b = Builder::new(w.len());
    let mut terms = Vec::new();
    for (l, wl) in w.iter().enumerate() {
        if wl.is_zero() {
            continue;
        }
        let x = b.input(l);
        terms.push(b.scale(wl, x));
    }
    let out = match b.sum(terms) {
        Some(o) => o,
        None => b.zero(),
    };
    Ok(b.finish(vec![out]))
}

// ---------------------------------------------------------------- estimates

fn ln_fact(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `(l+p−1)!/p! ≤ e·(p/e)^l·((p+l)/p)^{p+l}`, compared in logarithms;
/// returns the slack (right minus left).
pub fn factorial_div_slack(l: u64, p: u64) -> f64 {
    let lhs = ln_fact(l + p - 1) - ln_fact(p);
    let (lf, pf) = (l as f64, p as f64);
    let rhs = 1.0 + lf * (pf.ln() - 1.0) + (pf + lf) * ((pf + lf) / pf).ln();
    rhs - lhs
}

/// `Σ_{k≥m} β^{−k}·k^l` and the bound `m^l·β^{−m}/(1 − β^{−1}e^{l/m})`, both
/// scaled by `β^m/m^l`. Requires `m > l/ln β`.
pub fn int1_scaled(beta: f64, l: u64, m: u64) -> (f64, f64) {
    let (lf, mf) = (l as f64, m as f64);
    let ratio = (-beta.ln() + lf / mf).exp();
    let bound = 1.0 / (1.0 - ratio);
    let mut sum = 0.0;
    let mut k = m;
    loop {
        let term = (-((k - m) as f64) * beta.ln() + lf * ((k as f64) / mf).ln()).exp();
        sum += term;
        k += 1;
        // Remaining tail is at most term·r/(1−r) with r the current ratio.
        let r = (-beta.ln() + lf * ((k as f64 + 1.0) / k as f64).ln()).exp();
        if term * r / (1.0 - r) < 1e-15 * sum {
            break;
        }
    }
    (sum, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::log_transform::SeriesKind;

    fn q(x: f64) -> Q {
        crate::scalar::parse_q(&format!("{x}")).unwrap()
    }

    #[test]
    fn hermitian_points_for_delta_03() {
        let s = hermitian_schedule(&q(0.3)).unwrap();
        let c: Vec<Complex64> = s.points.iter().map(|p| p.to_c64()).collect();
        let want = [(0.0, 0.0), (0.0, 0.25), (0.0, 0.5), (0.25, 0.5), (0.5, 0.5), (0.75, 0.5), (1.0, 0.5)];
        for (k, (re, im)) in want.iter().enumerate() {
            assert_eq!(c[k], Complex64::new(*re, *im));
        }
        assert_eq!(s.t(), 10);
        assert_eq!(s.t(), hermitian_t(&q(0.3)));
        assert!(s.is_non_increasing(), "{:?}", s.step_lengths());
        assert!(s.final_certificate_ok());
        let u = hermitian_schedule_unsplit(&q(0.3)).unwrap();
        assert_eq!(u.t(), 9);
        assert_eq!(u.increasing_steps(), vec![7]);
    }

    #[test]
    fn hurwitz_points() {
        let s = hurwitz_schedule(&q(0.3)).unwrap();
        let want = ["0", "1/6", "1/3", "1/2", "2/3", "5/6", "17/18", "1"];
        let got: Vec<String> = s.points.iter().map(|p| p.re.to_string()).collect();
        assert_eq!(got, want);
        assert!(s.points.iter().all(|p| p.im.is_zero()));
        assert!(s.is_non_increasing());
        assert_eq!(s.t(), hurwitz_t(&q(0.3)));
    }

    #[test]
    fn budget_example() {
        let b = budget(100, 0.4, 2).unwrap();
        assert_eq!(b.m, vec![100, 5, 1]);
        assert!(matches!(budget(100, 0.4, 3), Err(Error::Budget { segment: 3, .. })));
        assert!(budget(10, 0.4, 1).is_err());
        let p = practical_budget(64, 10);
        assert_eq!(p.m[..5], [64, 48, 36, 27, 21]);
        assert_eq!(*p.m.last().unwrap(), 8);
    }

    #[test]
    fn shift_linear_function() {
        let st = CacState { i: 0, coeffs: vec![GaussRat::zero(), GaussRat::one(), GaussRat::zero()].into_iter().map(ComplexScalar::Exact).collect() };
        let n = taylor_shift(&st, &ComplexScalar::Exact(GaussRat::frac(1, 2)), 1).unwrap();
        assert_eq!(n.coeffs[0].as_exact().unwrap(), &GaussRat::frac(1, 2));
        assert_eq!(n.derivatives()[1].as_exact().unwrap(), &GaussRat::one());
        assert!(taylor_shift(&st, &ComplexScalar::Exact(GaussRat::zero()), 3).is_err());
    }

    #[test]
    fn single_segment_log() {
        let g = DerivativeSeries::new(
            vec![GaussRat::one(), GaussRat::frac(-1, 2), GaussRat::zero()]
                .into_iter()
                .chain(std::iter::repeat_n(GaussRat::zero(), 60))
                .map(ComplexScalar::Exact)
                .collect(),
            Convention::Coefficient,
            SeriesKind::OfG,
        );
        let s = CacSchedule::custom(vec![GaussRat::zero(), GaussRat::one()], THETA).unwrap();
        let b = CacBudget { m: vec![60, 0], mode: BudgetMode::Practical };
        let f = run_cac(&g, &s, &b, ArithMode::BigFloat { bits: 256 }).unwrap();
        assert!((f.to_c64() - Complex64::new(0.5f64.ln(), 0.0)).norm() < 1e-3);
        let w = cac_linear_weights(&s, &b).unwrap();
        let f_exact = run_cac(&g, &s, &b, ArithMode::ExactRational).unwrap();
        let fd = log_derivatives(&g, 60).unwrap();
        let via_w = w.iter().zip(fd.derivatives()).fold(GaussRat::zero(), |a, (x, y)| a.add(&x.mul(y.as_exact().unwrap())));
        assert_eq!(&via_w, f_exact.as_exact().unwrap());
    }

    #[test]
    fn factorial_and_tail_estimates() {
        for l in 1..=50 {
            for p in 1..=50 {
                assert!(factorial_div_slack(l, p) >= -1e-9);
            }
        }
        let (s, b) = int1_scaled(2.0, 3, 10);
        assert!(s <= b);
    }
}
