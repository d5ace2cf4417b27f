use num_complex::Complex64;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use detshallow::abs_det::{gradient_descent_direct, gradient_descent_solve, gram};
use detshallow::cac::{hermitian_schedule, practical_budget};
use detshallow::depth_reduce::{binarize_adds, depth_reduce};
use detshallow::det_circuits::{root_locations, SignMode};
use detshallow::matrix::{
    delta_q, det_cofactor, exact_det, generate_hermitian, generate_hurwitz, generate_psd, generate_with_spectrum, MatrixClass,
};
use detshallow::pipeline::{approximate_determinant, composed_circuit, g_coefficients, ApproxOptions, ProblemClass};
use detshallow::precision::{boolean_depth_estimate, magnitude_bound, PrecisionBudget, PrecisionMode};
use detshallow::scalar::{q_frac, ComplexScalar, GaussRat};

#[test]
fn all_ones_spectrum_gives_identity() {
    let a = generate_with_spectrum(MatrixClass::Hermitian, vec![GaussRat::one(); 4], delta_q(0.3).unwrap(), 9);
    assert_eq!(a.exact_entries().unwrap(), detshallow::matrix::identity(4));
    let b = generate_with_spectrum(MatrixClass::Hurwitz, vec![GaussRat::int(-1); 3], delta_q(0.3).unwrap(), 9);
    assert_eq!(exact_det(&b).unwrap().as_exact().unwrap(), &GaussRat::int(-1));
}

#[test]
fn certified_spectra_respect_class_bounds() {
    let d = delta_q(0.3).unwrap();
    for seed in 0..20 {
        let h = generate_hermitian(6, 0.3, seed).unwrap();
        assert!(h.is_hermitian());
        for w in h.cert.as_ref().unwrap().spectrum.as_ref().unwrap() {
            let m = w.re.abs();
            assert!(w.im == q_frac(0, 1) && m >= d && m <= q_frac(1, 1));
        }
        let s = generate_hurwitz(6, 0.3, seed).unwrap();
        let spec = s.cert.as_ref().unwrap().spectrum.clone().unwrap();
        for w in &spec {
            let n2 = w.norm_sqr();
            assert!(w.re < q_frac(0, 1) && n2 >= &d * &d && n2 <= q_frac(1, 1));
        }
        let neg: Vec<GaussRat> = spec.iter().map(|w| w.neg()).collect();
        for z in root_locations(&neg) {
            assert!(z.re >= q_frac(1, 2));
        }
    }
}

#[test]
fn spectrum_matches_characteristic_route() {
    for n in 1..=5 {
        let a = generate_hermitian(n, 0.3, 40 + n as u64).unwrap();
        let w = a.cert.as_ref().unwrap().spectrum.clone().unwrap();
        let c = g_coefficients(n, &a.exact_entries().unwrap(), SignMode::Plain);
        // every root 1/(1−ω) of g_A is a zero of the coefficient polynomial
        for z in root_locations(&w) {
            let v = c.iter().rev().fold(GaussRat::zero(), |acc, x| acc.mul(&z).add(x));
            assert!(v.is_zero(), "n={n}");
        }
    }
}

#[test]
fn exact_det_matches_cofactor_on_integers() {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let e: Vec<GaussRat> = (0..9).map(|_| GaussRat::new(q_frac(r.gen_range(-9..10), 1), q_frac(r.gen_range(-9..10), 1))).collect();
        let m = detshallow::matrix::ComplexMatrix::from_exact(3, e.clone());
        assert_eq!(exact_det(&m).unwrap().as_exact().unwrap(), &det_cofactor(3, &e));
    }
}

#[test]
fn gradient_descent_residual_bound() {
    for seed in 0..3 {
        let a = generate_psd(8, 0.3, 70 + seed).unwrap();
        let spec = a.cert.as_ref().unwrap().spectrum.clone().unwrap();
        let lmin = spec.iter().map(|w| w.to_c64().re).fold(f64::INFINITY, f64::min);
        let b = a.to_c64();
        let rhs: Vec<Complex64> = (0..8).map(|i| Complex64::new(1.0 / (i + 1) as f64, (i as f64) * 0.1)).collect();
        let bnorm = rhs.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for k in [1u64, 5, 17, 64] {
            let x = gradient_descent_solve(8, &b, &rhs, 1.0, k).unwrap();
            let y = gradient_descent_direct(8, &b, &rhs, 1.0, k);
            let res: f64 = (0..8)
                .map(|i| ((0..8).map(|j| b[i * 8 + j] * x[j]).sum::<Complex64>() - rhs[i]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res <= (1.0 - lmin).powi(k as i32) * bnorm * (1.0 + 1e-9) + 1e-12, "k={k}");
            for (p, q) in x.iter().zip(&y) {
                assert!((p - q).norm() < 1e-10);
            }
        }
        // A†A has a positive diagonal for a nonsingular A.
        let g = gram(8, &b);
        assert!((0..8).all(|i| g[i * 8 + i].re > 0.0));
    }
}

#[test]
fn estimate_is_deterministic() {
    let a = generate_hermitian(4, 0.3, 77).unwrap();
    let mut o = ApproxOptions::practical(ProblemClass::Hermitian);
    o.force_cac = true;
    o.m0 = Some(32);
    let r1 = approximate_determinant(&a, 1e-3, 0.3, &o).unwrap();
    let r2 = approximate_determinant(&a, 1e-3, 0.3, &o).unwrap();
    assert_eq!(r1.estimate.re.to_bits(), r2.estimate.re.to_bits());
    assert_eq!(r1.estimate.im.to_bits(), r2.estimate.im.to_bits());
    assert_eq!(r1.m_sequence, r2.m_sequence);
}

#[test]
fn sign_recovered_for_odd_negative_count() {
    let d = delta_q(0.3).unwrap();
    let mut r = ChaCha8Rng::seed_from_u64(50);
    for i in 0..50u64 {
        let n = 3 + (i as usize % 6);
        let negs = 1 + 2 * r.gen_range(0..=(n - 1) / 2);
        let spec: Vec<GaussRat> = (0..n)
            .map(|j| {
                let m = q_frac(r.gen_range(300..=1000), 1000);
                GaussRat::real(if j < negs { -m } else { m })
            })
            .collect();
        let a = generate_with_spectrum(MatrixClass::Hermitian, spec, d.clone(), i);
        let mut o = ApproxOptions::practical(ProblemClass::Hermitian);
        o.verify = true;
        let res = approximate_determinant(&a, 1e-3, 0.3, &o).unwrap();
        assert!(res.estimate.re < 0.0 && res.oracle.unwrap().re < 0.0, "instance {i}");
    }
}

#[test]
fn boolean_depth_tracks_log_n() {
    let s = hermitian_schedule(&delta_q(0.3).unwrap()).unwrap();
    let mut pts = vec![];
    for n in [4usize, 8, 16] {
        let c = binarize_adds(&depth_reduce(&composed_circuit(n, SignMode::Plain, &s, &practical_budget(4, s.t())).unwrap()).unwrap());
        let pb = PrecisionBudget { r: 64, m_bound: magnitude_bound(&c, &[]), epsilon: 1e-3, mode: PrecisionMode::Practical };
        pts.push(((n as f64).log2().ln(), (boolean_depth_estimate(&c, &pb) as f64).ln()));
    }
    // least-squares slope of ln(estimate) against ln(log₂ n)
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / 3.0;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / 3.0;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope - 1.0).abs() <= 0.2, "slope {slope}");
}

#[test]
fn float_entries_are_accepted() {
    let a = generate_hermitian(3, 0.3, 5).unwrap();
    let mut f = a.clone();
    f.entries = a.entries.iter().map(|e| ComplexScalar::Float(detshallow::scalar::CFloat::from_gauss(e.as_exact().unwrap(), 200))).collect();
    let mut o = ApproxOptions::practical(ProblemClass::Hermitian);
    o.verify = true;
    let r = approximate_determinant(&f, 1e-3, 0.3, &o).unwrap();
    assert!(r.rel_error.unwrap() < 1e-40);
}
