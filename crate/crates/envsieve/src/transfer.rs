//! Normalized Fourier analysis on Z_N and the transference experiment:
//! Bohr-set smoothing splits a majorized function f into an anti-uniform
//! part f1 (bounded, same mean) and a Fourier-small part f2, and the
//! three-term-progression count of f resums exactly from the eight
//! trilinear components of the split.
//!
//! Conventions: hat(f)(a) = E_{n in Z_N} f(n) e_N(an) with e_N(x) =
//! exp(2 pi i x / N), inverted by f(n) = sum_a hat(f)(a) e_N(-an).

use crate::arith;
use crate::{exec, Error, Result};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::PI;

/// Real-valued function on Z_N.
#[derive(Debug, Clone)]
pub struct CyclicFunction {
    values: Vec<f64>,
}

impl CyclicFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("a cyclic function needs N >= 1".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("cyclic function values must be finite".into()));
        }
        Ok(CyclicFunction { values })
    }

    pub fn constant(n: u64, c: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("a cyclic function needs N >= 1".into()));
        }
        CyclicFunction::new(vec![c; n as usize])
    }

    /// 0/1 indicator of the given residues.
    pub fn indicator(n: u64, members: &[u64]) -> Result<Self> {
        let mut values = vec![0.0; n as usize];
        for &m in members {
            if m >= n {
                return Err(Error::Domain(format!("residue {m} outside Z_{n}")));
            }
            values[m as usize] = 1.0;
        }
        CyclicFunction::new(values)
    }

    pub fn n(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        exec::pairwise_sum(&self.values) / self.values.len() as f64
    }
}

/// hat(f)(a) = E_n f(n) e_N(an) for a = 0..N-1.
pub fn dft(f: &CyclicFunction) -> Vec<Complex64> {
    let n = f.values.len();
    let mut buf: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    for z in &mut buf {
        *z *= scale;
    }
    buf
}

/// f(n) = sum_a hat(a) e_N(-an); inverse of `dft`.
pub fn inverse_dft(hat: &[Complex64]) -> Vec<Complex64> {
    let mut buf = hat.to_vec();
    FftPlanner::new().plan_fft_forward(hat.len()).process(&mut buf);
    buf
}

fn ensure_odd(n: u64) -> Result<()> {
    if n % 2 == 0 {
        return Err(Error::Domain(format!(
            "progression counting needs 2 invertible in Z_N; N = {n} is even"
        )));
    }
    Ok(())
}

/// E_{n,d} f(n) f(n+d) f(n+2d) evaluated on the Fourier side as
/// sum_a hat(a)^2 hat(-2a).
pub fn three_ap_count(f: &CyclicFunction) -> Result<f64> {
    ensure_odd(f.n())?;
    Ok(trilinear(&dft(f), None, None))
}

/// sum_a hat_p(a) hat_q(a) hat_r(-2a) with omitted arguments defaulting
/// to the first; the imaginary parts cancel for real inputs.
fn trilinear(p: &[Complex64], q: Option<&[Complex64]>, r: Option<&[Complex64]>) -> f64 {
    let n = p.len();
    let q = q.unwrap_or(p);
    let r = r.unwrap_or(p);
    let terms: Vec<f64> = (0..n)
        .map(|a| {
            let minus2a = (2 * (n - a)) % n;
            (p[a] * q[a] * r[minus2a]).re
        })
        .collect();
    exec::pairwise_sum(&terms)
}

const BRUTE_AP_CAP: u64 = 5_000;

/// The same count by the O(N^2) definition; oracle for small N.
pub fn three_ap_count_direct(f: &CyclicFunction) -> Result<f64> {
    ensure_odd(f.n())?;
    let n = f.values.len();
    if n as u64 > BRUTE_AP_CAP {
        return Err(Error::Budget(format!(
            "direct progression count is quadratic; N capped at {BRUTE_AP_CAP}"
        )));
    }
    let v = &f.values;
    let total = exec::sum_blocks(0, n as u64, 1 << 10, |lo, hi| {
        let rows: Vec<f64> = (lo as usize..hi as usize)
            .map(|i| {
                let inner: Vec<f64> = (0..n)
                    .map(|d| v[i] * v[(i + d) % n] * v[(i + 2 * d) % n])
                    .collect();
                exec::pairwise_sum(&inner)
            })
            .collect();
        exec::pairwise_sum(&rows)
    });
    Ok(total / (n as f64 * n as f64))
}

/// Omega = {a : |hat(f)(a)| >= eps}.
pub fn large_spectrum(f: &CyclicFunction, eps: f64) -> Result<Vec<u64>> {
    if !(eps > 0.0) {
        return Err(Error::Domain("spectrum threshold must be positive".into()));
    }
    Ok(dft(f)
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() >= eps)
        .map(|(a, _)| a as u64)
        .collect())
}

/// B(Omega, eps) = {m in Z_N : |1 - e_N(am)| <= eps for all a in Omega}.
#[derive(Debug, Clone)]
pub struct BohrSet {
    freqs: Vec<u64>,
    eps: f64,
    n: u64,
    members: Vec<u64>,
}

impl BohrSet {
    pub fn freqs(&self) -> &[u64] {
        &self.freqs
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Exhaustive membership scan; the test is the exact chord length
/// |1 - e_N(r)| = 2 sin(pi r / N), not an arc approximation.
pub fn bohr_set(freqs: &[u64], eps: f64, n: u64) -> Result<BohrSet> {
    if n == 0 {
        return Err(Error::Domain("Bohr sets live in Z_N with N >= 1".into()));
    }
    if !(eps > 0.0 && eps < 2.0) {
        return Err(Error::Domain(format!("Bohr radius must lie in (0,2), got {eps}")));
    }
    let mut fr: Vec<u64> = freqs.iter().map(|&a| a % n).collect();
    fr.sort_unstable();
    fr.dedup();
    let chunks = exec::map_blocks(0, n, exec::DEFAULT_BLOCK, |lo, hi| {
        let mut found = Vec::new();
        for m in lo..hi {
            let ok = fr.iter().all(|&a| {
                let r = (a as u128 * m as u128 % n as u128) as f64;
                2.0 * (PI * r / n as f64).sin().abs() <= eps
            });
            if ok {
                found.push(m);
            }
        }
        found
    });
    let mut members = Vec::new();
    for c in chunks {
        members.extend(c);
    }
    Ok(BohrSet {
        freqs: fr,
        eps,
        n,
        members,
    })
}

/// chi(a) = E_{m in B} e_N(-am), the normalized dual of the indicator.
fn bohr_dual(b: &BohrSet) -> Vec<Complex64> {
    let n = b.n as usize;
    let mut buf = vec![Complex64::ZERO; n];
    for &m in &b.members {
        buf[m as usize] += Complex64::new(1.0, 0.0);
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / b.members.len() as f64;
    for z in &mut buf {
        *z *= scale;
    }
    buf
}

/// Anti-uniform/uniform split: f1(n) = E_{m1,m2 in B} f(n + m1 - m2),
/// computed through hat(f1)(a) = hat(f)(a) |chi(a)|^2; f2 = f - f1.
pub fn decompose(f: &CyclicFunction, b: &BohrSet) -> Result<(CyclicFunction, CyclicFunction)> {
    if b.n != f.n() {
        return Err(Error::Domain(format!(
            "Bohr set lives in Z_{} but f lives in Z_{}",
            b.n,
            f.n()
        )));
    }
    if b.is_empty() {
        return Err(Error::Degenerate("smoothing by an empty Bohr set".into()));
    }
    let hat = dft(f);
    let chi = bohr_dual(b);
    let hat1: Vec<Complex64> = hat
        .iter()
        .zip(&chi)
        .map(|(&h, &c)| h * c.norm_sqr())
        .collect();
    let f1_values: Vec<f64> = inverse_dft(&hat1).iter().map(|z| z.re).collect();
    let f2_values: Vec<f64> = f
        .values
        .iter()
        .zip(&f1_values)
        .map(|(&v, &v1)| v - v1)
        .collect();
    Ok((CyclicFunction::new(f1_values)?, CyclicFunction::new(f2_values)?))
}

const SMOOTH_DIRECT_CAP: u64 = 500_000_000;

/// Smoothing by the defining double average; quadratic in |B|, oracle only.
pub fn smooth_direct(f: &CyclicFunction, b: &BohrSet) -> Result<CyclicFunction> {
    if b.n != f.n() {
        return Err(Error::Domain("mismatched moduli".into()));
    }
    if b.is_empty() {
        return Err(Error::Degenerate("smoothing by an empty Bohr set".into()));
    }
    let n = f.values.len() as u64;
    let k = b.members.len() as u64;
    if n.saturating_mul(k).saturating_mul(k) > SMOOTH_DIRECT_CAP {
        return Err(Error::Budget("direct smoothing costs N |B|^2".into()));
    }
    let nu = n as usize;
    let values: Vec<f64> = (0..nu)
        .map(|i| {
            let mut acc = 0.0;
            for &m1 in &b.members {
                for &m2 in &b.members {
                    let idx = (i + m1 as usize + (nu - m2 as usize)) % nu;
                    acc += f.values[idx];
                }
            }
            acc / (k * k) as f64
        })
        .collect();
    CyclicFunction::new(values)
}

/// Progression count for a bounded dense function; the classical-theorem
/// side of the transference argument.
pub fn varnavides_count(f: &CyclicFunction, delta: f64) -> Result<f64> {
    let tol = 1e-12;
    if f.values.iter().any(|&v| v < -tol || v > 1.0 + tol) {
        return Err(Error::Hypothesis("needs 0 <= f <= 1 pointwise".into()));
    }
    if f.mean() < delta - tol {
        return Err(Error::Hypothesis(format!(
            "mean {} below the claimed density {delta}",
            f.mean()
        )));
    }
    three_ap_count(f)
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentTerm {
    /// Which part (1 or 2) enters each slot of sum_a g_i(a) g_j(a) g_k(-2a).
    pub i: u8,
    pub j: u8,
    pub k: u8,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferenceReport {
    pub n: u64,
    pub delta: f64,
    pub eta: f64,
    pub m_norm: f64,
    pub q_exponent: f64,
    pub epsilon: f64,
    pub auto_epsilon: bool,
    pub omega_size: usize,
    pub bohr_size: usize,
    pub ap_count_f: f64,
    pub ap_count_f1: f64,
    /// Sum of the seven components touching f2.
    pub residual_terms: f64,
    /// Hoelder surrogate ||hat f2||_q^q ||hat f2||_inf^{3-q} for that sum.
    pub residual_surrogate: f64,
    pub f2_sup: f64,
    /// max(eps, 3 eps (1 + eta)), the two-case bound the proof gives for f2_sup.
    pub f2_sup_bound: f64,
    /// max_a (|hat f2(a)| - |hat f(a)|); nonpositive up to rounding.
    pub f2_dominated_excess: f64,
    /// |ap_count_f - sum of the eight components|.
    pub resum_defect: f64,
    pub f1_min: f64,
    pub f1_max: f64,
    /// 1 + eta N / |B|, the dominance ceiling for f1.
    pub f1_dominance_bound: f64,
    pub components: Vec<ComponentTerm>,
}

const AUTO_EPS_MAX_HALVINGS: u32 = 40;

/// Full transference experiment: measure the majorant's Fourier flatness
/// eta, split f along a Bohr set of its large spectrum, count progressions
/// in every component, and record the bounds the argument promises.
///
/// With `eps` absent, epsilon starts at (delta/(4M))^{1/(3-q)} and halves
/// until the residual surrogate M^q eps^{3-q} drops below ap_count_f1/14.
pub fn transference_run(
    f: &CyclicFunction,
    nu: &CyclicFunction,
    eps: Option<f64>,
    q_exponent: f64,
) -> Result<TransferenceReport> {
    let n = f.n();
    if nu.n() != n {
        return Err(Error::Domain("f and nu must share a modulus".into()));
    }
    if !arith::is_prime(n) {
        return Err(Error::Hypothesis(format!("transference runs take prime N, got {n}")));
    }
    if !(q_exponent > 2.0 && q_exponent < 3.0) {
        return Err(Error::Domain(format!(
            "restriction exponent must lie in (2,3), got {q_exponent}"
        )));
    }
    let tol = 1e-12;
    for (i, (&fv, &nv)) in f.values.iter().zip(&nu.values).enumerate() {
        if fv < -tol || fv > nv + tol {
            return Err(Error::Hypothesis(format!(
                "majorization 0 <= f <= nu fails at n = {i}: f = {fv}, nu = {nv}"
            )));
        }
    }

    let hat = dft(f);
    let nu_hat = dft(nu);
    let delta = hat[0].re;
    let eta = nu_hat
        .iter()
        .enumerate()
        .map(|(a, z)| {
            if a == 0 {
                (z - Complex64::new(1.0, 0.0)).norm()
            } else {
                z.norm()
            }
        })
        .fold(0.0, f64::max);
    let q_powers: Vec<f64> = hat.iter().map(|z| z.norm().powf(q_exponent)).collect();
    let m_norm = exec::pairwise_sum(&q_powers).powf(1.0 / q_exponent);
    let ap_count_f = trilinear(&hat, None, None);

    let auto = eps.is_none();
    let mut epsilon = match eps {
        Some(e) => {
            if !(e > 0.0 && e < 2.0) {
                return Err(Error::Domain(format!("epsilon must lie in (0,2), got {e}")));
            }
            e
        }
        None => (delta / (4.0 * m_norm)).powf(1.0 / (3.0 - q_exponent)).min(1.9),
    };

    let mut halvings = 0;
    let (omega, bohr, hat1, hat2, ap_f1) = loop {
        let omega: Vec<u64> = hat
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() >= epsilon)
            .map(|(a, _)| a as u64)
            .collect();
        let bohr = bohr_set(&omega, epsilon, n)?;
        let chi = bohr_dual(&bohr);
        let hat1: Vec<Complex64> = hat
            .iter()
            .zip(&chi)
            .map(|(&h, &c)| h * c.norm_sqr())
            .collect();
        let hat2: Vec<Complex64> = hat.iter().zip(&hat1).map(|(&h, &h1)| h - h1).collect();
        let ap_f1 = trilinear(&hat1, None, None);
        let surrogate = m_norm.powf(q_exponent) * epsilon.powf(3.0 - q_exponent);
        if !auto || surrogate < ap_f1 / 14.0 {
            break (omega, bohr, hat1, hat2, ap_f1);
        }
        halvings += 1;
        if halvings > AUTO_EPS_MAX_HALVINGS {
            return Err(Error::Hypothesis(
                "automatic epsilon never met the residual target; pass epsilon explicitly".into(),
            ));
        }
        epsilon /= 2.0;
    };

    let mut components = Vec::with_capacity(8);
    let mut resum = 0.0;
    let mut residual_terms = 0.0;
    for i in 1u8..=2 {
        for j in 1u8..=2 {
            for k in 1u8..=2 {
                let pick = |which: u8| if which == 1 { &hat1 } else { &hat2 };
                let value = trilinear(pick(i), Some(pick(j)), Some(pick(k)));
                resum += value;
                if (i, j, k) != (1, 1, 1) {
                    residual_terms += value;
                }
                components.push(ComponentTerm { i, j, k, value });
            }
        }
    }

    let f2_sup = hat2.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let f2_q: Vec<f64> = hat2.iter().map(|z| z.norm().powf(q_exponent)).collect();
    let residual_surrogate =
        exec::pairwise_sum(&f2_q) * f2_sup.powf(3.0 - q_exponent);
    let f2_dominated_excess = hat2
        .iter()
        .zip(&hat)
        .map(|(z2, z)| z2.norm() - z.norm())
        .fold(f64::MIN, f64::max);

    let f1_values = inverse_dft(&hat1);
    let f1_min = f1_values.iter().map(|z| z.re).fold(f64::MAX, f64::min);
    let f1_max = f1_values.iter().map(|z| z.re).fold(f64::MIN, f64::max);

    Ok(TransferenceReport {
        n,
        delta,
        eta,
        m_norm,
        q_exponent,
        epsilon,
        auto_epsilon: auto,
        omega_size: omega.len(),
        bohr_size: bohr.len(),
        ap_count_f,
        ap_count_f1: ap_f1,
        residual_terms,
        residual_surrogate,
        f2_sup,
        f2_sup_bound: epsilon.max(3.0 * epsilon * (1.0 + eta)),
        f2_dominated_excess,
        resum_defect: (ap_count_f - resum).abs(),
        f1_min,
        f1_max,
        f1_dominance_bound: 1.0 + eta * n as f64 / bohr.len() as f64,
        components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_function(n: u64, seed: u64) -> CyclicFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CyclicFunction::new((0..n).map(|_| rng.gen::<f64>()).collect()).unwrap()
    }

    fn random_indicator(n: u64, density: f64, seed: u64) -> CyclicFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CyclicFunction::new(
            (0..n)
                .map(|_| if rng.gen::<f64>() < density { 1.0 } else { 0.0 })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn dft_point_masses_and_round_trip() {
        let one = CyclicFunction::constant(32, 1.0).unwrap();
        let hat = dft(&one);
        assert!((hat[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        for z in &hat[1..] {
            assert!(z.norm() < 1e-12);
        }

        let mut point = vec![0.0; 17];
        point[0] = 17.0;
        let hat = dft(&CyclicFunction::new(point).unwrap());
        for z in &hat {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }

        let f = random_function(101, 3);
        let back = inverse_dft(&dft(&f));
        let worst = f
            .values()
            .iter()
            .zip(&back)
            .map(|(&v, z)| (z.re - v).abs().max(z.im.abs()))
            .fold(0.0, f64::max);
        assert!(worst < 1e-10, "round trip defect {worst}");
    }

    #[test]
    fn three_ap_count_closed_cases() {
        let one = CyclicFunction::constant(101, 1.0).unwrap();
        assert!((three_ap_count(&one).unwrap() - 1.0).abs() < 1e-12);

        let delta0 = CyclicFunction::indicator(101, &[0]).unwrap();
        let expect = 1.0 / (101.0f64 * 101.0);
        assert!((three_ap_count(&delta0).unwrap() - expect).abs() < 1e-12);

        let even = CyclicFunction::constant(10, 1.0).unwrap();
        assert!(three_ap_count(&even).is_err());
        assert!(three_ap_count_direct(&even).is_err());
    }

    #[test]
    fn fourier_side_equals_brute_force() {
        for n in [101u64, 257] {
            for seed in 0..5 {
                let f = random_indicator(n, 0.4, seed);
                let fourier = three_ap_count(&f).unwrap();
                let brute = three_ap_count_direct(&f).unwrap();
                assert!(
                    (fourier - brute).abs() < 1e-9,
                    "N={n}, seed={seed}: {fourier} vs {brute}"
                );
            }
            let g = random_function(n, 99);
            assert!((three_ap_count(&g).unwrap() - three_ap_count_direct(&g).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn large_spectrum_and_chebyshev() {
        let one = CyclicFunction::constant(64, 1.0).unwrap();
        assert_eq!(large_spectrum(&one, 0.5).unwrap(), vec![0]);
        assert!(large_spectrum(&one, 1.5).unwrap().is_empty());
        assert!(large_spectrum(&one, 0.0).is_err());

        let f = random_function(257, 8);
        let q = 2.5;
        let hat = dft(&f);
        let powers: Vec<f64> = hat.iter().map(|z| z.norm().powf(q)).collect();
        let m = exec::pairwise_sum(&powers).powf(1.0 / q);
        for eps in [0.05, 0.1, 0.3] {
            let omega = large_spectrum(&f, eps).unwrap();
            let bound = (m / eps).powf(q);
            assert!(
                (omega.len() as f64) <= bound,
                "eps={eps}: |Omega| = {} > {bound}",
                omega.len()
            );
        }
    }

    #[test]
    fn bohr_set_structure() {
        let all = bohr_set(&[], 0.5, 100).unwrap();
        assert_eq!(all.len(), 100, "no constraints means all of Z_N");
        let trivial = bohr_set(&[0], 0.5, 100).unwrap();
        assert_eq!(trivial.len(), 100);

        let b = bohr_set(&[1, 307], 0.8, 991).unwrap();
        assert_eq!(b.members()[0], 0);
        for &m in b.members() {
            if m != 0 {
                assert!(
                    b.members().binary_search(&(991 - m)).is_ok(),
                    "not symmetric at {m}"
                );
            }
        }
        // membership definition, re-checked independently
        for m in 0..991u64 {
            let inside = b.freqs().iter().all(|&a| {
                let z = Complex64::from_polar(1.0, 2.0 * PI * ((a * m) % 991) as f64 / 991.0);
                (Complex64::new(1.0, 0.0) - z).norm() <= 0.8
            });
            assert_eq!(inside, b.members().binary_search(&m).is_ok(), "m = {m}");
        }

        assert!(bohr_set(&[1], 0.0, 10).is_err());
        assert!(bohr_set(&[1], 2.0, 10).is_err());
    }

    #[test]
    fn bohr_pigeonhole_lower_bound() {
        let n = 4001u64;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..20 {
            let size = rng.gen_range(1..=3usize);
            let freqs: Vec<u64> = (0..size).map(|_| rng.gen_range(1..n)).collect();
            let eps = rng.gen_range(0.3..1.0);
            let b = bohr_set(&freqs, eps, n).unwrap();
            let lower = (eps / (2.0 * PI)).powi(freqs.len() as i32) * n as f64 / 2.0;
            assert!(
                b.len() as f64 >= lower,
                "trial {trial}: |B| = {} below pigeonhole bound {lower}",
                b.len()
            );
        }
    }

    #[test]
    fn decompose_limit_cases() {
        let f = random_function(101, 21);
        let all = bohr_set(&[], 1.0, 101).unwrap();
        let (f1, f2) = decompose(&f, &all).unwrap();
        for &v in f1.values() {
            assert!((v - f.mean()).abs() < 1e-10, "full smoothing is the mean");
        }
        assert!((f1.mean() + f2.mean() - f.mean()).abs() < 1e-12);

        let origin = bohr_set(&[1], 1e-3, 101).unwrap();
        assert_eq!(origin.members(), &[0]);
        let (g1, g2) = decompose(&f, &origin).unwrap();
        for (v, w) in f.values().iter().zip(g1.values()) {
            assert!((v - w).abs() < 1e-10, "singleton Bohr set smooths nothing");
        }
        for &v in g2.values() {
            assert!(v.abs() < 1e-10);
        }
    }

    #[test]
    fn smoothing_matches_direct_average_and_fourier_identity() {
        let f = random_function(101, 33);
        let b = bohr_set(&[3, 40], 0.9, 101).unwrap();
        assert!(b.len() > 1, "need a nontrivial Bohr set, got {}", b.len());
        let (f1, _) = decompose(&f, &b).unwrap();

        let direct = smooth_direct(&f, &b).unwrap();
        let worst = f1
            .values()
            .iter()
            .zip(direct.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-9, "convolution vs direct defect {worst}");

        // frequency-side identity and mean preservation
        let hat = dft(&f);
        let hat1 = dft(&f1);
        let chi = bohr_dual(&b);
        let id_worst = (0..101)
            .map(|a| (hat1[a] - hat[a] * chi[a].norm_sqr()).norm())
            .fold(0.0, f64::max);
        assert!(id_worst < 1e-9, "smoothing identity defect {id_worst}");
        assert!((f1.mean() - f.mean()).abs() < 1e-12);
    }

    #[test]
    fn varnavides_positive_on_dense_sets() {
        let one = CyclicFunction::constant(101, 1.0).unwrap();
        assert!((varnavides_count(&one, 1.0).unwrap() - 1.0).abs() < 1e-12);

        let interval = CyclicFunction::indicator(101, &(0..71).collect::<Vec<_>>()).unwrap();
        let c = varnavides_count(&interval, 0.7).unwrap();
        assert!(c > 0.0);
        let brute = three_ap_count_direct(&interval).unwrap();
        assert!((c - brute).abs() < 1e-9);

        for seed in 0..5 {
            let f = random_indicator(499, 0.6, seed);
            let c = varnavides_count(&f, 0.5).unwrap();
            assert!(c > 0.0, "seed {seed}: count {c}");
        }

        let too_big = CyclicFunction::constant(101, 1.5).unwrap();
        assert!(varnavides_count(&too_big, 0.5).is_err());
        assert!(varnavides_count(&interval, 0.9).is_err());
    }

    #[test]
    fn transference_flat_majorant() {
        let n = 1009u64;
        let f = random_indicator(n, 0.6, 17);
        let nu = CyclicFunction::constant(n, 1.0).unwrap();
        let rep = transference_run(&f, &nu, None, 2.5).unwrap();
        assert!(rep.eta < 1e-12, "flat majorant has eta = 0, got {}", rep.eta);
        assert!(rep.auto_epsilon);
        assert!(rep.ap_count_f1 > 0.0);
        assert!(rep.resum_defect < 1e-9);
        assert!(rep.f2_sup <= rep.f2_sup_bound + 1e-9);
        assert!(rep.f2_dominated_excess <= 1e-12);
        assert!(rep.f1_min >= -1e-9);
        assert!(rep.f1_max <= rep.f1_dominance_bound + 1e-9);
        assert_eq!(rep.components.len(), 8);
        let resum: f64 = rep.components.iter().map(|c| c.value).sum();
        assert!((resum - rep.ap_count_f).abs() < 1e-9);
        assert!(
            (rep.ap_count_f - rep.ap_count_f1 - rep.residual_terms).abs() < 1e-12,
            "residual is the complement of the main term"
        );
        // the surrogate the auto rule enforced
        assert!(
            rep.m_norm.powf(rep.q_exponent) * rep.epsilon.powf(3.0 - rep.q_exponent)
                < rep.ap_count_f1 / 14.0
        );
    }

    #[test]
    fn transference_explicit_epsilon_keeps_a_fat_bohr_set() {
        // structured f: interval indicator has its large spectrum near 0,
        // so an explicit moderate epsilon keeps B nontrivial and f2 alive
        let n = 1009u64;
        let members: Vec<u64> = (0..605).collect();
        let f = CyclicFunction::indicator(n, &members).unwrap();
        let nu = CyclicFunction::constant(n, 1.0).unwrap();
        let rep = transference_run(&f, &nu, Some(0.35), 2.5).unwrap();
        assert!(!rep.auto_epsilon);
        assert!(rep.bohr_size > 1, "Bohr set collapsed: {}", rep.bohr_size);
        assert!(rep.f2_sup > 1e-6, "f2 should be alive");
        assert!(rep.f2_sup <= rep.f2_sup_bound + 1e-9);
        assert!(rep.f2_dominated_excess <= 1e-12);
        assert!(rep.resum_defect < 1e-9);
        assert!(rep.f1_min >= -1e-9);
        assert!(rep.f1_max <= rep.f1_dominance_bound + 1e-9);
    }

    #[test]
    fn transference_guards() {
        let f = random_indicator(1009, 0.5, 1);
        let nu = CyclicFunction::constant(1009, 1.0).unwrap();
        assert!(transference_run(&f, &nu, None, 2.0).is_err());
        assert!(transference_run(&f, &nu, None, 3.0).is_err());
        assert!(transference_run(&f, &nu, Some(2.5), 2.5).is_err());

        let composite_f = random_indicator(1000, 0.5, 1);
        let composite_nu = CyclicFunction::constant(1000, 1.0).unwrap();
        assert!(transference_run(&composite_f, &composite_nu, None, 2.5).is_err());

        let too_big = CyclicFunction::constant(1009, 0.5).unwrap();
        let small_nu = CyclicFunction::constant(1009, 0.25).unwrap();
        let err = transference_run(&too_big, &small_nu, None, 2.5).unwrap_err();
        assert_eq!(err.exit_code(), 3, "majorization violation is a contract error");
    }

    #[test]
    fn transference_with_sieve_majorant() {
        use crate::selberg;
        let n = 1009u64;
        let r = 4u64;
        let kit = selberg::build_kit(&"n".parse().unwrap(), r).unwrap();
        // beta on 1..=N laid out on Z_N (N maps to 0)
        let table = selberg::beta_table(&kit, 1, n + 1);
        let mut nu_vals = vec![0.0; n as usize];
        for (i, &v) in table.iter().enumerate() {
            nu_vals[(i + 1) % n as usize] = v;
        }
        let nu = CyclicFunction::new(nu_vals.clone()).unwrap();
        let f = CyclicFunction::new(nu_vals.iter().map(|&v| 0.5 * v).collect()).unwrap();
        let rep = transference_run(&f, &nu, Some(0.3), 2.5).unwrap();
        assert!(rep.eta > 0.1, "a sieve majorant is not flat at this scale");
        assert!(rep.resum_defect < 1e-9);
        assert!(rep.f2_sup <= rep.f2_sup_bound + 1e-9);
        assert!(rep.f2_dominated_excess <= 1e-12);
        assert!(rep.f1_max <= rep.f1_dominance_bound + 1e-9);
    }
}
