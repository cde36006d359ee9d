//! Exponential sums h(theta) = sum_{n in X} e(n theta) over prime tuple
//! sets X = {n <= N : every a_j n + b_j is prime}, their L^p norms on the
//! circle by oversampled FFT quadrature, and empirical harnesses for the
//! restriction and extension inequalities satisfied by the majorant beta_R.
//!
//! Quadrature is exact for even integer p once the grid oversamples the
//! bandwidth (|h|^{2m} is a trigonometric polynomial of degree 2mN), which
//! is what the additive-quadruple oracle certifies at p = 4.

use crate::arith;
use crate::forms::{self, LinearSystem};
use crate::selberg::{self, SieveKit};
use crate::{exec, Error, Result};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;
use std::f64::consts::TAU;
use std::sync::Arc;

/// X(F) intersected with [1, N]: the n whose form values are all prime.
pub struct TupleSet {
    form: LinearSystem,
    n: u64,
    members: Vec<u64>,
}

impl TupleSet {
    pub fn form(&self) -> &LinearSystem {
        &self.form
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

/// Enumerate X(F) up to N by deterministic primality testing of every
/// coordinate.
pub fn enumerate_tuples(f: &LinearSystem, n: u64) -> Result<TupleSet> {
    if n < 1 {
        return Err(Error::Domain("need N >= 1".into()));
    }
    if !forms::nondegenerate(f)? {
        return Err(Error::Degenerate(format!("{f} has an empty local set")));
    }
    let bound = n as i64;
    if f.coefficients()
        .iter()
        .any(|&(a, b)| a.abs() > bound || b.abs() > bound)
    {
        return Err(Error::Hypothesis(format!(
            "tuple enumeration expects |a_j|, |b_j| <= N = {n}"
        )));
    }
    let chunks = exec::map_blocks(1, n + 1, exec::DEFAULT_BLOCK, |lo, hi| {
        let mut found = Vec::new();
        for m in lo..hi {
            let all_prime = f.factor_values(m as i64).iter().all(|&v| {
                v > 1 && arith::is_prime(v as u64)
            });
            if all_prime {
                found.push(m);
            }
        }
        found
    });
    let mut members = Vec::new();
    for c in chunks {
        members.extend(c);
    }
    Ok(TupleSet {
        form: f.clone(),
        n,
        members,
    })
}

/// Weights attached to each member in the exponential sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    /// Plain indicator: h(theta) = sum_{n in X} e(n theta).
    Unit,
    /// Product of logarithms of the prime coordinates, the von
    /// Mangoldt-style variant of the same pipeline.
    LogProduct,
}

/// h evaluated on the grid theta = j/M.
#[derive(Debug)]
pub struct Spectrum {
    n: u64,
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

const MAX_GRID: u64 = 1 << 25;

fn grid_size(n: u64, oversample: u64) -> Result<usize> {
    if oversample < 4 {
        return Err(Error::Domain("oversampling factor must be at least 4".into()));
    }
    let m = n
        .checked_next_power_of_two()
        .and_then(|t| t.checked_mul(oversample))
        .ok_or_else(|| Error::Budget("grid size overflows".into()))?;
    if m > MAX_GRID {
        return Err(Error::Budget(format!(
            "grid of {m} points exceeds the {MAX_GRID}-point memory guard"
        )));
    }
    Ok(m as usize)
}

/// Evaluate h on the M-point grid, M = oversample * next-power-of-two(N),
/// by a zero-padded transform of the (weighted) indicator of X.
pub fn exp_sum_grid_weighted(
    x: &TupleSet,
    oversample: u64,
    weighting: Weighting,
) -> Result<Spectrum> {
    let m = grid_size(x.n, oversample)?;
    let mut values = vec![Complex64::ZERO; m];
    for &member in &x.members {
        let w = match weighting {
            Weighting::Unit => 1.0,
            Weighting::LogProduct => x
                .form
                .factor_values(member as i64)
                .iter()
                .map(|&v| (v as f64).ln())
                .product(),
        };
        values[member as usize] = Complex64::new(w, 0.0);
    }
    FftPlanner::new().plan_fft_inverse(m).process(&mut values);
    Ok(Spectrum { n: x.n, values })
}

pub fn exp_sum_grid(x: &TupleSet, oversample: u64) -> Result<Spectrum> {
    exp_sum_grid_weighted(x, oversample, Weighting::Unit)
}

/// One-point oracle: h(theta) summed term by term.
pub fn direct_exp_sum(x: &TupleSet, theta: f64) -> Complex64 {
    let re: Vec<f64> = x.members.iter().map(|&n| (TAU * n as f64 * theta).cos()).collect();
    let im: Vec<f64> = x.members.iter().map(|&n| (TAU * n as f64 * theta).sin()).collect();
    Complex64::new(exec::pairwise_sum(&re), exec::pairwise_sum(&im))
}

/// ((1/M) sum_j |h(j/M)|^p)^{1/p}; p = 2 is allowed as the Parseval
/// diagnostic, the estimates of interest live at p > 2.
pub fn lp_norm(s: &Spectrum, p: f64) -> Result<f64> {
    if !(p >= 2.0) {
        return Err(Error::Domain(format!("L^p norms are tracked for p >= 2, got {p}")));
    }
    let m = s.values.len();
    let total = exec::sum_blocks(0, m as u64, exec::DEFAULT_BLOCK, |lo, hi| {
        let powers: Vec<f64> = s.values[lo as usize..hi as usize]
            .iter()
            .map(|z| z.norm().powf(p))
            .collect();
        exec::pairwise_sum(&powers)
    });
    Ok((total / m as f64).powf(1.0 / p))
}

/// Norm at the given oversampling together with the quadrature-error
/// estimate |norm - norm at doubled oversampling|.
pub fn lp_norm_with_error(x: &TupleSet, p: f64, oversample: u64) -> Result<(f64, f64)> {
    let coarse = lp_norm(&exp_sum_grid(x, oversample)?, p)?;
    let fine = lp_norm(&exp_sum_grid(x, 2 * oversample)?, p)?;
    Ok((coarse, (coarse - fine).abs()))
}

const QUADRUPLE_PAIR_CAP: u64 = 100_000_000;

/// #{(n1,n2,n3,n4) in X^4 : n1 + n2 = n3 + n4}, which is the exact value
/// of the circle integral of |h|^4: it equals sum_s r(s)^2 with
/// r(s) = #{(n1,n2) in X^2 : n1 + n2 = s}.
pub fn additive_quadruple_count(x: &TupleSet) -> Result<u64> {
    let k = x.members.len() as u64;
    if k * k > QUADRUPLE_PAIR_CAP {
        return Err(Error::Budget(format!(
            "quadruple oracle enumerates |X|^2 = {} pairs",
            k * k
        )));
    }
    let mut r = vec![0u32; 2 * x.n as usize + 1];
    for &n1 in &x.members {
        for &n2 in &x.members {
            r[(n1 + n2) as usize] += 1;
        }
    }
    Ok(r.iter().map(|&c| c as u64 * c as u64).sum())
}

/// ||h||_p divided by the target shape S_F N^{1-1/p} (log N)^{-k}.
pub fn mainthm_ratio(f: &LinearSystem, n: u64, p: f64) -> Result<f64> {
    mainthm_ratio_with(f, n, p, 8)
}

pub fn mainthm_ratio_with(f: &LinearSystem, n: u64, p: f64, oversample: u64) -> Result<f64> {
    if !(p > 2.0) {
        return Err(Error::Domain("the ratio is tracked for p > 2".into()));
    }
    let x = enumerate_tuples(f, n)?;
    let norm = lp_norm(&exp_sum_grid(&x, oversample)?, p)?;
    let sing = forms::singular_series(f, 100_000)?.value;
    if sing == 0.0 {
        return Err(Error::Degenerate(format!("{f} has vanishing singular series")));
    }
    let k = f.k() as i32;
    let shape = sing * (n as f64).powf(1.0 - 1.0 / p) * (n as f64).ln().powi(-k);
    Ok(norm / shape)
}

/// Everything a restriction trial needs: the beta table over [1, N], the
/// transform for evaluating sparse exponential sums, and E beta.
pub struct RestrictionHarness {
    n: u64,
    beta: Vec<f64>,
    mean_beta: f64,
    fft: Arc<dyn Fft<f64>>,
}

impl RestrictionHarness {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn mean_beta(&self) -> f64 {
        self.mean_beta
    }

    /// LHS/RHS of the restriction inequality for one coefficient set: the
    /// weighted energy E_{1<=n<=N} |sum_b f(b) e_N(bn)|^2 beta(n) against
    /// (sum_b |f(b)|^q)^{2/q}.
    pub fn ratio(&self, coeffs: &[(u64, Complex64)], q: f64) -> Result<f64> {
        if !(q > 1.0 && q < 2.0) {
            return Err(Error::Domain(format!("exponent q must lie in (1,2), got {q}")));
        }
        if coeffs.is_empty() {
            return Err(Error::Domain("empty coefficient set".into()));
        }
        let n = self.n as usize;
        let mut g = vec![Complex64::ZERO; n];
        for &(b, c) in coeffs {
            if b >= self.n {
                return Err(Error::Domain(format!("frequency {b} outside Z_{}", self.n)));
            }
            g[b as usize] += c;
        }
        self.fft.process(&mut g);
        let weighted: Vec<f64> = (1..=n)
            .map(|i| {
                let z = g[i % n];
                (z.re * z.re + z.im * z.im) * self.beta[i - 1]
            })
            .collect();
        let lhs = exec::pairwise_sum(&weighted) / n as f64;
        let q_sums: Vec<f64> = coeffs.iter().map(|&(_, c)| c.norm().powf(q)).collect();
        let rhs = exec::pairwise_sum(&q_sums).powf(2.0 / q);
        Ok(lhs / rhs)
    }
}

pub fn restriction_harness(f: &LinearSystem, r: u64, n: u64) -> Result<RestrictionHarness> {
    ensure_farey_separation(r, n)?;
    let kit = selberg::build_kit(f, r)?;
    let beta = selberg::beta_table(&kit, 1, n + 1);
    let mean_beta = exec::pairwise_sum(&beta) / n as f64;
    let fft = FftPlanner::new().plan_fft_inverse(n as usize);
    Ok(RestrictionHarness {
        n,
        beta,
        mean_beta,
        fft,
    })
}

fn ensure_farey_separation(r: u64, n: u64) -> Result<()> {
    let r4 = r
        .checked_pow(4)
        .ok_or_else(|| Error::Budget("R^4 overflows".into()))?;
    if 2 * r4 > n {
        return Err(Error::Hypothesis(format!(
            "Farey separation needs N >= 2 R^4 = {}, got N = {n}",
            2 * r4
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct RestrictionTrial {
    pub kind: String,
    pub support: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RestrictionReport {
    pub r: u64,
    pub n: u64,
    pub q: f64,
    pub seed: u64,
    pub trials: Vec<RestrictionTrial>,
    pub max_ratio: f64,
    pub mean_beta: f64,
}

const SUPPORT_SIZE: usize = 64;

/// Run seeded random trials of the restriction inequality: indicator
/// coefficients on random supports, random unimodular phases, and
/// arithmetic-progression supports. Reports every ratio and the maximum.
pub fn restriction_check(
    f: &LinearSystem,
    r: u64,
    n: u64,
    trials: u64,
    q: f64,
    seed: u64,
) -> Result<RestrictionReport> {
    if trials == 0 || trials > 10_000 {
        return Err(Error::Budget("trial count must lie in 1..=10000".into()));
    }
    let harness = restriction_harness(f, r, n)?;
    let idx: Vec<u64> = (0..trials).collect();
    let results = exec::map_items(&idx, |&i| -> Result<RestrictionTrial> {
        // one stream per trial keeps the runs independent of trial order
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i.wrapping_mul(0x9e3779b97f4a7c15)));
        let size = SUPPORT_SIZE.min(n as usize / 4).max(1);
        let (kind, coeffs) = match i % 3 {
            0 => {
                let support = sample(&mut rng, n as usize, size);
                let coeffs: Vec<(u64, Complex64)> = support
                    .iter()
                    .map(|b| (b as u64, Complex64::new(1.0, 0.0)))
                    .collect();
                ("indicator", coeffs)
            }
            1 => {
                let support = sample(&mut rng, n as usize, size);
                let coeffs: Vec<(u64, Complex64)> = support
                    .iter()
                    .map(|b| {
                        let phase = TAU * rng.gen::<f64>();
                        (b as u64, Complex64::from_polar(1.0, phase))
                    })
                    .collect();
                ("phases", coeffs)
            }
            _ => {
                let start = rng.gen_range(0..n);
                let step = rng.gen_range(1..=n / size as u64);
                let coeffs: Vec<(u64, Complex64)> = (0..size as u64)
                    .map(|j| ((start + j * step) % n, Complex64::new(1.0, 0.0)))
                    .collect();
                ("progression", coeffs)
            }
        };
        Ok(RestrictionTrial {
            kind: kind.into(),
            support: coeffs.len(),
            ratio: harness.ratio(&coeffs, q)?,
        })
    });
    let mut trials_out = Vec::with_capacity(results.len());
    for t in results {
        trials_out.push(t?);
    }
    let max_ratio = trials_out.iter().map(|t| t.ratio).fold(f64::MIN, f64::max);
    Ok(RestrictionReport {
        r,
        n,
        q,
        seed,
        trials: trials_out,
        max_ratio,
        mean_beta: harness.mean_beta,
    })
}

/// Coefficient sequences for the extension harness.
#[derive(Debug, Clone, Copy)]
pub enum ExtensionSequence {
    /// a_n = 0: both sides vanish.
    Zero,
    /// a_n = 1_{X and sieved}(n)/beta(n), the normalisation used to derive
    /// the tuple-set norm bound from the extension estimate.
    SievedTupleNormalized,
    /// Independent random signs with the given seed.
    RandomSign(u64),
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionReport {
    pub r: u64,
    pub n: u64,
    pub p: f64,
    pub fixed_lhs: f64,
    pub variable_lhs: f64,
    pub rhs: f64,
    pub fixed_ratio: f64,
    pub variable_ratio: f64,
}

/// Both extension functionals for one sequence: the Z_N frequency-sum
/// (sum_b |E_n a_n beta(n) e_N(-bn)|^p)^{1/p} and the circle integral
/// (int_0^1 |E_n a_n beta(n) e(n theta)|^p dtheta)^{1/p}, each against
/// the weighted-energy right side (E |a_n|^2 beta(n))^{1/2}; the circle
/// ratio carries the N^{-1/p} scaling of the variable-rotation estimate.
pub fn extension_check(
    f: &LinearSystem,
    r: u64,
    n: u64,
    p: f64,
    seq: ExtensionSequence,
) -> Result<ExtensionReport> {
    if !(p > 2.0) {
        return Err(Error::Domain("extension exponent must exceed 2".into()));
    }
    ensure_farey_separation(r, n)?;
    let kit = selberg::build_kit(f, r)?;
    let beta = selberg::beta_table(&kit, 1, n + 1);
    let a = extension_sequence(f, &kit, &beta, n, seq)?;

    let nu = n as usize;
    let weighted: Vec<f64> = (0..nu).map(|i| a[i] * a[i] * beta[i]).collect();
    let rhs = (exec::pairwise_sum(&weighted) / n as f64).sqrt();

    // frequency side over Z_N: v[n mod N] = a_n beta(n) / N, transformed
    let mut v = vec![Complex64::ZERO; nu];
    for i in 0..nu {
        v[(i + 1) % nu] += Complex64::new(a[i] * beta[i] / n as f64, 0.0);
    }
    FftPlanner::new().plan_fft_forward(nu).process(&mut v);
    let powers: Vec<f64> = v.iter().map(|z| z.norm().powf(p)).collect();
    let fixed_lhs = exec::pairwise_sum(&powers).powf(1.0 / p);

    // circle side on the oversampled grid, no wraparound
    let m = grid_size(n, 8)?;
    let mut t = vec![Complex64::ZERO; m];
    for i in 0..nu {
        t[i + 1] = Complex64::new(a[i] * beta[i] / n as f64, 0.0);
    }
    FftPlanner::new().plan_fft_inverse(m).process(&mut t);
    let tp: Vec<f64> = t.iter().map(|z| z.norm().powf(p)).collect();
    let variable_lhs = (exec::pairwise_sum(&tp) / m as f64).powf(1.0 / p);

    let ratio = |lhs: f64, scale: f64| {
        if rhs == 0.0 {
            0.0
        } else {
            lhs / (scale * rhs)
        }
    };
    Ok(ExtensionReport {
        r,
        n,
        p,
        fixed_lhs,
        variable_lhs,
        rhs,
        fixed_ratio: ratio(fixed_lhs, 1.0),
        variable_ratio: ratio(variable_lhs, (n as f64).powf(-1.0 / p)),
    })
}

fn extension_sequence(
    f: &LinearSystem,
    kit: &SieveKit,
    beta: &[f64],
    n: u64,
    seq: ExtensionSequence,
) -> Result<Vec<f64>> {
    Ok(match seq {
        ExtensionSequence::Zero => vec![0.0; n as usize],
        ExtensionSequence::SievedTupleNormalized => {
            let x = enumerate_tuples(f, n)?;
            let mut a = vec![0.0; n as usize];
            for &member in x.members() {
                if selberg::in_sieved_set(kit, member) {
                    a[(member - 1) as usize] = 1.0 / beta[(member - 1) as usize];
                }
            }
            a
        }
        ExtensionSequence::RandomSign(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect()
        }
    })
}

/// E_{1<=n<=N} beta_R(n); bounded once R^2 <= N.
pub fn beta_mean(f: &LinearSystem, r: u64, n: u64) -> Result<f64> {
    if r.saturating_mul(r) > n {
        return Err(Error::Hypothesis(format!(
            "the mean bound needs R <= sqrt(N); got R = {r}, N = {n}"
        )));
    }
    let kit = selberg::build_kit(f, r)?;
    Ok(selberg::beta_sum(&kit, 1, n + 1) / n as f64)
}

/// The same mean read off the Fourier expansion: sum over fractions of
/// w(a/q) E_{1<=n<=N} e_q(-an), each inner average in closed form. Agrees
/// with the scan up to the partial-period truncation, well within 10 R^4/N.
pub fn beta_mean_fourier(f: &LinearSystem, r: u64, n: u64) -> Result<f64> {
    if r.saturating_mul(r) > n {
        return Err(Error::Hypothesis(format!(
            "the mean bound needs R <= sqrt(N); got R = {r}, N = {n}"
        )));
    }
    let kit = selberg::build_kit(f, r)?;
    let table = selberg::build_table(&kit)?;
    let mut total = Complex64::ZERO;
    for e in table.entries() {
        if e.w == Complex64::ZERO {
            continue;
        }
        total += e.w * mean_of_character(e.a, e.q, n);
    }
    Ok(total.re)
}

/// (1/N) sum_{n=1}^N e_q(-an) by geometric summation.
fn mean_of_character(a: u64, q: u64, n: u64) -> Complex64 {
    if a == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let z = Complex64::from_polar(1.0, -TAU * a as f64 / q as f64);
    // z != 1 since 0 < a < q; sum_{n=1}^N z^n = z (z^N - 1)/(z - 1)
    let zn = Complex64::from_polar(1.0, -TAU * (a as f64) * ((n % q) as f64) / q as f64);
    z * (zn - 1.0) / (z - 1.0) / n as f64
}

/// E_{0 < n <= N/2} (#{q <= B : q | n})^m, the truncated divisor moment.
pub fn divisor_moment(b_size: u64, n: u64, m: u32) -> Result<f64> {
    if b_size < 1 || m < 1 {
        return Err(Error::Domain("need B >= 1 and m >= 1".into()));
    }
    if b_size > n {
        return Err(Error::Hypothesis("need B <= N".into()));
    }
    let half = n / 2;
    let total = exec::sum_blocks(1, half + 1, exec::DEFAULT_BLOCK, |lo, hi| {
        let len = (hi - lo) as usize;
        let mut acc = vec![0.0f64; len];
        for q in 1..=b_size.min(hi - 1) {
            let mut i = ((q - lo % q) % q) as usize;
            while i < len {
                acc[i] += 1.0;
                i += q as usize;
            }
        }
        let powers: Vec<f64> = acc.iter().map(|&d| d.powi(m as i32)).collect();
        exec::pairwise_sum(&powers)
    });
    Ok(total / half as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(s: &str) -> LinearSystem {
        s.parse().unwrap()
    }

    #[test]
    fn tuple_enumeration_examples() {
        let x = enumerate_tuples(&sys("n"), 10).unwrap();
        assert_eq!(x.members(), &[2, 3, 5, 7]);

        let twin = enumerate_tuples(&sys("n(n+2)"), 10).unwrap();
        assert_eq!(twin.members(), &[3, 5], "1 is excluded: its first coordinate is a unit");

        assert!(enumerate_tuples(&sys("n(n+1)"), 10).is_err());
        // coefficient bound
        assert!(enumerate_tuples(&sys("(3n+1)(n+5)"), 4).is_err());
        assert!(enumerate_tuples(&sys("(3n+1)(n+5)"), 100).is_ok());
    }

    #[test]
    fn tuple_count_matches_prime_counting() {
        let x = enumerate_tuples(&sys("n"), 1_000_000).unwrap();
        assert_eq!(x.len(), 78_498);
    }

    #[test]
    fn grid_agrees_with_direct_oracle() {
        let x = enumerate_tuples(&sys("n"), 100).unwrap();
        let s = exp_sum_grid(&x, 4).unwrap();
        assert!((s.values()[0].re - x.len() as f64).abs() < 1e-9);
        // theta = 1/2 sits on the grid; sum over primes of (-1)^p
        let half = s.values()[s.m() / 2];
        assert!((half - Complex64::new(-23.0, 0.0)).norm() < 1e-9);
        let oracle = direct_exp_sum(&x, 0.5);
        assert!((half - oracle).norm() < 1e-9);
        // a few off-grid angles against the oracle
        for &(j, m) in &[(3usize, 8usize), (5, 16), (1, 4)] {
            let grid = s.values()[j * s.m() / m];
            let direct = direct_exp_sum(&x, j as f64 / m as f64);
            assert!((grid - direct).norm() < 1e-9, "theta = {j}/{m}");
        }
    }

    #[test]
    fn singleton_spectrum_is_unimodular() {
        let x = TupleSet {
            form: sys("n"),
            n: 1,
            members: vec![1],
        };
        let s = exp_sum_grid(&x, 4).unwrap();
        for z in s.values() {
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }
        assert!((lp_norm(&s, 3.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((lp_norm(&s, 5.5).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parseval_on_the_grid() {
        let x = enumerate_tuples(&sys("n"), 10_000).unwrap();
        let s = exp_sum_grid(&x, 4).unwrap();
        let l2 = lp_norm(&s, 2.0).unwrap();
        let rel = (l2 * l2 - x.len() as f64).abs() / x.len() as f64;
        assert!(rel < 1e-6, "relative Parseval defect {rel}");
    }

    #[test]
    fn fourth_power_matches_quadruple_count() {
        for form in ["n", "n(n+2)"] {
            let x = enumerate_tuples(&sys(form), 2_000).unwrap();
            let s = exp_sum_grid(&x, 4).unwrap();
            let l4 = lp_norm(&s, 4.0).unwrap();
            let count = additive_quadruple_count(&x).unwrap() as f64;
            let rel = (l4.powi(4) - count).abs() / count;
            assert!(rel < 1e-3, "{form}: quadrature {} vs count {count}", l4.powi(4));
        }
    }

    #[test]
    fn quadrature_error_shrinks_with_oversampling() {
        let x = enumerate_tuples(&sys("n"), 5_000).unwrap();
        let (norm, err) = lp_norm_with_error(&x, 3.0, 4).unwrap();
        assert!(norm > 0.0 && err < 0.01 * norm, "norm {norm}, error {err}");
    }

    #[test]
    fn weighted_grid_scales_by_logs() {
        let x = enumerate_tuples(&sys("n"), 50).unwrap();
        let s = exp_sum_grid_weighted(&x, 4, Weighting::LogProduct).unwrap();
        let expected: f64 = x.members().iter().map(|&p| (p as f64).ln()).sum();
        assert!((s.values()[0].re - expected).abs() < 1e-9);
    }

    #[test]
    fn mainthm_ratio_is_positive_and_minorized() {
        let f = sys("n");
        let n = 10_000u64;
        let p = 3.0;
        let ratio = mainthm_ratio(&f, n, p).unwrap();
        assert!(ratio.is_finite() && ratio > 0.0);

        // major-arc minorant: ||h||_p >= ((c_k/N) (|X|/2)^p)^{1/p}
        let x = enumerate_tuples(&f, n).unwrap();
        let norm = lp_norm(&exp_sum_grid(&x, 8).unwrap(), p).unwrap();
        let c_k = 1.0 / (8.0 * f.k() as f64);
        let minorant = ((c_k / n as f64) * (x.len() as f64 / 2.0).powf(p)).powf(1.0 / p);
        assert!(norm >= minorant, "{norm} < {minorant}");

        let twin = sys("n(n+2)");
        let xt = enumerate_tuples(&twin, n).unwrap();
        let normt = lp_norm(&exp_sum_grid(&xt, 8).unwrap(), p).unwrap();
        let c_k2 = 1.0 / 16.0;
        let minorant2 = ((c_k2 / n as f64) * (xt.len() as f64 / 2.0).powf(p)).powf(1.0 / p);
        assert!(normt >= minorant2);
    }

    #[test]
    fn restriction_trivial_coefficients() {
        let f = sys("n");
        let h = restriction_harness(&f, 5, 10_000).unwrap();
        // single frequency: LHS = E beta, RHS = 1
        for b in [0u64, 1, 17, 9999] {
            let ratio = h.ratio(&[(b, Complex64::new(1.0, 0.0))], 5.0 / 3.0).unwrap();
            assert!(
                (ratio - h.mean_beta()).abs() < 1e-9,
                "b={b}: {ratio} vs {}",
                h.mean_beta()
            );
        }
        // scaling f(0) leaves the ratio at E beta
        let ratio = h.ratio(&[(0, Complex64::new(2.5, 0.0))], 5.0 / 3.0).unwrap();
        assert!((ratio - h.mean_beta()).abs() < 1e-9);
        assert!(h.ratio(&[(0, Complex64::new(1.0, 0.0))], 2.5).is_err());
        assert!(h.ratio(&[(10_000, Complex64::new(1.0, 0.0))], 1.5).is_err());
    }

    #[test]
    fn restriction_ratio_symmetries() {
        let f = sys("n");
        let h = restriction_harness(&f, 5, 12_000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let support: Vec<u64> = sample(&mut rng, 12_000, 40).iter().map(|b| b as u64).collect();
        let base: Vec<(u64, Complex64)> = support
            .iter()
            .map(|&b| (b, Complex64::new(1.0, 0.0)))
            .collect();
        let q = 5.0 / 3.0;
        let r0 = h.ratio(&base, q).unwrap();

        // global phase rotation
        let rot = Complex64::from_polar(1.0, 1.234);
        let rotated: Vec<(u64, Complex64)> = base.iter().map(|&(b, c)| (b, c * rot)).collect();
        assert!((h.ratio(&rotated, q).unwrap() - r0).abs() < 1e-9);

        // support translation
        let shift = 137u64;
        let translated: Vec<(u64, Complex64)> = base
            .iter()
            .map(|&(b, c)| ((b + shift) % 12_000, c))
            .collect();
        assert!((h.ratio(&translated, q).unwrap() - r0).abs() < 1e-9);
    }

    #[test]
    fn restriction_check_is_seed_deterministic() {
        let f = sys("n");
        let a = restriction_check(&f, 4, 3_000, 9, 5.0 / 3.0, 42).unwrap();
        let b = restriction_check(&f, 4, 3_000, 9, 5.0 / 3.0, 42).unwrap();
        assert_eq!(a.max_ratio, b.max_ratio);
        assert_eq!(a.trials.len(), 9);
        for (ta, tb) in a.trials.iter().zip(&b.trials) {
            assert_eq!(ta.ratio, tb.ratio);
            assert_eq!(ta.kind, tb.kind);
        }
        assert!(a.max_ratio.is_finite() && a.max_ratio > 0.0);
        let kinds: std::collections::BTreeSet<&str> =
            a.trials.iter().map(|t| t.kind.as_str()).collect();
        assert_eq!(kinds.len(), 3, "all three trial families appear");
        // hypothesis guard
        assert!(restriction_check(&f, 10, 3_000, 4, 5.0 / 3.0, 1).is_err());
    }

    #[test]
    fn extension_zero_sequence_vanishes() {
        let rep = extension_check(&sys("n"), 4, 2_000, 2.5, ExtensionSequence::Zero).unwrap();
        assert_eq!(rep.fixed_lhs, 0.0);
        assert_eq!(rep.variable_lhs, 0.0);
        assert_eq!(rep.rhs, 0.0);
        assert_eq!(rep.fixed_ratio, 0.0);
    }

    #[test]
    fn extension_random_signs_recorded() {
        let rep = extension_check(
            &sys("n"),
            4,
            2_000,
            2.5,
            ExtensionSequence::RandomSign(7),
        )
        .unwrap();
        assert!(rep.fixed_ratio.is_finite() && rep.fixed_ratio > 0.0);
        assert!(rep.variable_ratio.is_finite() && rep.variable_ratio > 0.0);
        let again = extension_check(
            &sys("n"),
            4,
            2_000,
            2.5,
            ExtensionSequence::RandomSign(7),
        )
        .unwrap();
        assert_eq!(rep.fixed_ratio, again.fixed_ratio);
    }

    #[test]
    fn extension_tuple_sequence_reproduces_tuple_norm() {
        // with a_n beta(n) = 1 on the sieved tuple set, the circle-side
        // integrand is the tuple-set exponential sum over N, so the
        // variable LHS equals that norm on the same grid
        let f = sys("n");
        let r = 4u64;
        let n = 2_000u64;
        let p = 2.5;
        let rep =
            extension_check(&f, r, n, p, ExtensionSequence::SievedTupleNormalized).unwrap();
        let kit = selberg::build_kit(&f, r).unwrap();
        let x = enumerate_tuples(&f, n).unwrap();
        let sieved: Vec<u64> = x
            .members()
            .iter()
            .copied()
            .filter(|&m| selberg::in_sieved_set(&kit, m))
            .collect();
        assert!(!sieved.is_empty());
        let xs = TupleSet {
            form: f.clone(),
            n,
            members: sieved,
        };
        let norm = lp_norm(&exp_sum_grid(&xs, 8).unwrap(), p).unwrap();
        let rel = (rep.variable_lhs * n as f64 - norm).abs() / norm;
        assert!(rel < 1e-9, "relative defect {rel}");
    }

    #[test]
    fn beta_mean_examples() {
        assert_eq!(beta_mean(&sys("n"), 2, 10_000).unwrap(), 1.0);
        for form in ["n", "n(n+2)"] {
            let v = beta_mean(&sys(form), 10, 100_000).unwrap();
            assert!((0.5..=3.0).contains(&v), "{form}: {v}");
        }
        assert!(beta_mean(&sys("n"), 10, 50).is_err());
    }

    #[test]
    fn beta_mean_fourier_side_consistency() {
        for form in ["n", "n(n+2)"] {
            let f = sys(form);
            for (r, n) in [(5u64, 20_000u64), (10, 100_000)] {
                let direct = beta_mean(&f, r, n).unwrap();
                let fourier = beta_mean_fourier(&f, r, n).unwrap();
                let tol = 10.0 * (r as f64).powi(4) / n as f64;
                assert!(
                    (direct - fourier).abs() <= tol,
                    "{form}, R={r}, N={n}: {direct} vs {fourier}, tol {tol}"
                );
            }
        }
    }

    #[test]
    fn divisor_moment_examples() {
        assert_eq!(divisor_moment(1, 1_000, 1).unwrap(), 1.0);
        assert_eq!(divisor_moment(1, 1_000, 5).unwrap(), 1.0);
        // N/2 even makes the even-density average exact
        assert_eq!(divisor_moment(2, 2_000, 1).unwrap(), 1.5);
        let v = divisor_moment(100, 1_000_000, 3).unwrap();
        assert!(v.is_finite() && v > 1.0, "recorded {v}");
        assert!(divisor_moment(10, 5, 1).is_err());
        assert!(divisor_moment(0, 5, 1).is_err());
    }

    #[test]
    fn grid_guards() {
        let x = enumerate_tuples(&sys("n"), 100).unwrap();
        assert!(exp_sum_grid(&x, 3).is_err(), "oversampling below 4");
        let big = TupleSet {
            form: sys("n"),
            n: 1 << 30,
            members: vec![2],
        };
        assert_eq!(exp_sum_grid(&big, 64).unwrap_err().exit_code(), 4);
    }
}
