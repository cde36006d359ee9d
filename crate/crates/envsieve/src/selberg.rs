//! The Selberg enveloping sieve.
//!
//! From a nondegenerate form F and level R the kit holds, as exact
//! rationals,
//!
//! * h(q) = mu^2(q) prod_{p|q} (1 - gamma(p))/gamma(p),
//! * G(R) = sum_{q <= R} h(q) and the coprime partial sums G_d(x),
//! * lambda_d = mu(d) G_d(R/d) / (gamma(d) G(R)) on squarefree d <= R,
//!
//! from which alpha_R(n) = G(R) sum_{d <= R, d | F(n)} lambda_d and the
//! majorant beta_R = alpha_R^2 / G(R). The same alpha has a Fourier shape
//! sum_{q <= R} sum_{a in Z_q^*} s(a/q) e_q(-an), and beta expands over
//! q <= R^2 with coefficients w(a/q); both identities are verified
//! numerically here and in the acceptance suite.
//!
//! w is computed by a divisor-pair reduction: on its support
//! (l1, l2 | q~, q~ | l1 l2) the inner coefficient equals mu(l1 l2 / q~),
//! giving w(a/q) = (s(a/q)/G) sum_{t <= R} h(t) S(q~, R/t) with
//! q~ = q/(q,t). The unreduced quadruple sum is kept as `w_oracle` and the
//! reduction is validated against it in the tests.

use crate::arith;
use crate::forms::{self, LinearSystem};
use crate::{exec, Error, Rat, Result};
use num::{BigInt, One, ToPrimitive, Zero};
use rustfft::num_complex::Complex64;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

/// A fraction a/q in lowest terms with 0 <= a < q; 0/1 is the zero frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ReducedFraction {
    a: u64,
    q: u64,
}

impl ReducedFraction {
    pub fn new(a: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Domain("fraction needs a positive denominator".into()));
        }
        if q == 1 {
            if a != 0 {
                return Err(Error::Domain("the only reduced fraction with q=1 is 0/1".into()));
            }
            return Ok(ReducedFraction { a: 0, q: 1 });
        }
        if a == 0 || a >= q {
            return Err(Error::Domain(format!("numerator {a} outside 1..{q}")));
        }
        if num::integer::gcd(a, q) != 1 {
            return Err(Error::Domain(format!("{a}/{q} is not reduced")));
        }
        Ok(ReducedFraction { a, q })
    }

    pub fn zero() -> Self {
        ReducedFraction { a: 0, q: 1 }
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn q(&self) -> u64 {
        self.q
    }
}

impl fmt::Display for ReducedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.a, self.q)
    }
}

impl FromStr for ReducedFraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, q) = s
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("expected a/q, got {s:?}")))?;
        let a = a.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let q = q.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        ReducedFraction::new(a, q)
    }
}

/// e(x/q) evaluated as exp(2 pi i (x mod q)/q); the reduction keeps the
/// trigonometric argument in [0, 2 pi).
pub fn e_frac(x: u64, q: u64) -> Complex64 {
    let r = (x % q) as f64 / q as f64;
    Complex64::from_polar(1.0, TAU * r)
}

/// e_q(-a n) for nonnegative a, n.
fn e_minus(a: u64, n: u64, q: u64) -> Complex64 {
    let m = (a as u128 * (n % q) as u128 % q as u128) as u64;
    e_frac((q - m) % q, q)
}

/// Exact sieve tables at level R.
pub struct SieveKit {
    form: LinearSystem,
    r: u64,
    mu: Vec<i8>,
    /// h(q) for q <= R; zero off squarefree q.
    h: Vec<Rat>,
    /// gamma(d) for d <= R.
    gamma: Vec<Rat>,
    big_g: Rat,
    /// lambda_d for squarefree d <= R; zero elsewhere.
    lambda: Vec<Rat>,
    big_g_f64: f64,
    lambda_f64: Vec<f64>,
    /// (d, lambda_d, roots of F mod d), lazily built for block scans.
    strides: OnceLock<Vec<(u64, f64, Vec<u64>)>>,
    /// s(a/q) for q <= R in (a, q, s) order, lazily built for alpha_fourier.
    s_cache: OnceLock<Vec<(u64, u64, Complex64)>>,
}

impl SieveKit {
    pub fn form(&self) -> &LinearSystem {
        &self.form
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn h(&self, q: u64) -> &Rat {
        &self.h[q as usize]
    }

    pub fn gamma(&self, d: u64) -> &Rat {
        &self.gamma[d as usize]
    }

    pub fn big_g(&self) -> &Rat {
        &self.big_g
    }

    pub fn big_g_f64(&self) -> f64 {
        self.big_g_f64
    }

    pub fn lambda(&self, d: u64) -> &Rat {
        &self.lambda[d as usize]
    }

    pub fn lambda_f64(&self) -> &[f64] {
        &self.lambda_f64
    }

    pub fn mu(&self, d: u64) -> i8 {
        self.mu[d as usize]
    }

    fn strides(&self) -> &[(u64, f64, Vec<u64>)] {
        self.strides.get_or_init(|| {
            let mut v = Vec::new();
            for d in 1..=self.r {
                if self.mu[d as usize] != 0 {
                    v.push((d, self.lambda_f64[d as usize], self.form.roots_mod(d)));
                }
            }
            v
        })
    }

    fn s_values(&self) -> &[(u64, u64, Complex64)] {
        self.s_cache.get_or_init(|| {
            let mut v = Vec::new();
            for q in 1..=self.r {
                let data = forms::local_data(&self.form, q).expect("q <= R is enumerable");
                if data.residues.is_empty() {
                    continue; // gamma(q) = 0 cannot happen for a nondegenerate form
                }
                for a in 0..q {
                    if q == 1 && a == 0 || a > 0 && num::integer::gcd(a, q) == 1 {
                        v.push((a, q, s_from_residues(&data.residues, a, q)));
                    }
                }
            }
            v
        })
    }
}

/// Build the exact tables; errors on degenerate forms.
pub fn build_kit(f: &LinearSystem, r: u64) -> Result<SieveKit> {
    if r < 1 {
        return Err(Error::Domain("level R must be at least 1".into()));
    }
    if !forms::nondegenerate(f)? {
        return Err(Error::Degenerate(format!(
            "{f} has a prime with gamma(p) = 0; no sieve kit exists"
        )));
    }
    let ru = r as usize;
    let mu = arith::mobius_sieve(ru);
    let spf = arith::spf_sieve(ru);

    // gamma(p) and the h-factor (1-gamma)/gamma at primes, then both
    // multiplicatively up to R
    let mut gamma = vec![Rat::one(); ru + 1];
    let mut h = vec![Rat::zero(); ru + 1];
    if ru >= 1 {
        h[1] = Rat::one();
    }
    let mut h_factor = vec![Rat::zero(); ru + 1];
    for d in 2..=ru {
        let p = spf[d] as usize;
        if p == d {
            let g = forms::gamma_at_prime(f, d as u64);
            debug_assert!(!g.is_zero(), "nondegenerate form with gamma(p) = 0");
            h_factor[d] = (Rat::one() - g.clone()) / g.clone();
            gamma[d] = g;
        } else {
            let m = d / p;
            gamma[d] = if m % p == 0 {
                gamma[m].clone()
            } else {
                gamma[m].clone() * gamma[p].clone()
            };
        }
    }
    for d in 2..=ru {
        if mu[d] == 0 {
            continue;
        }
        let p = spf[d] as usize;
        let m = d / p;
        h[d] = h[m].clone() * h_factor[p].clone();
    }

    let mut big_g = Rat::zero();
    for q in 1..=ru {
        big_g += h[q].clone();
    }

    let mut lambda = vec![Rat::zero(); ru + 1];
    for d in 1..=ru {
        if mu[d] == 0 {
            continue;
        }
        let x = r / d as u64;
        let mut gd = Rat::zero();
        for q in 1..=x as usize {
            if num::integer::gcd(q as u64, d as u64) == 1 {
                gd += h[q].clone();
            }
        }
        let signed = if mu[d] == 1 { gd } else { -gd };
        lambda[d] = signed / (gamma[d].clone() * big_g.clone());
    }

    let big_g_f64 = big_g.to_f64().expect("G(R) fits in f64");
    let lambda_f64 = lambda
        .iter()
        .map(|l| l.to_f64().expect("lambda fits in f64"))
        .collect();
    Ok(SieveKit {
        form: f.clone(),
        r,
        mu,
        h,
        gamma,
        big_g,
        lambda,
        big_g_f64,
        lambda_f64,
        strides: OnceLock::new(),
        s_cache: OnceLock::new(),
    })
}

/// alpha_R(n) = G(R) sum_{d <= R, d | F(n)} lambda_d, exactly.
pub fn alpha_div(kit: &SieveKit, n: i64) -> Result<Rat> {
    if kit.form.factor_values(n).iter().any(|&v| v == 0) {
        return Err(Error::Domain(format!(
            "F({n}) = 0: the divisor condition is ill-posed"
        )));
    }
    let mut sum = Rat::zero();
    for d in 1..=kit.r {
        if kit.mu[d as usize] != 0 && kit.form.eval_mod(n.rem_euclid(d as i64) as u64, d) == 0 {
            sum += kit.lambda[d as usize].clone();
        }
    }
    Ok(kit.big_g.clone() * sum)
}

/// The same alpha through its Fourier shape
/// sum_{q <= R} sum_{a in Z_q^*} s(a/q) e_q(-an).
pub fn alpha_fourier(kit: &SieveKit, n: i64) -> Complex64 {
    let mut acc = Complex64::ZERO;
    for &(a, q, s) in kit.s_values() {
        let nr = n.rem_euclid(q as i64) as u64;
        acc += s * e_minus(a, nr, q);
    }
    acc
}

/// beta_R(n) = alpha_R(n)^2 / G(R), exactly.
pub fn beta(kit: &SieveKit, n: i64) -> Result<Rat> {
    let a = alpha_div(kit, n)?;
    Ok(a.clone() * a / kit.big_g.clone())
}

/// True when F(n) is coprime to every d <= R, i.e. no prime p <= R divides
/// F(n); this is membership in X_{R!} without materializing R!.
pub fn in_sieved_set(kit: &SieveKit, n: u64) -> bool {
    arith::small_primes()
        .iter()
        .take_while(|&&p| p <= kit.r)
        .all(|&p| kit.form.eval_mod(n, p) != 0)
}

/// beta values for n in [lo, hi) as f64, by striding each squarefree d over
/// the roots of F mod d; block-parallel and deterministic.
pub fn beta_table(kit: &SieveKit, lo: u64, hi: u64) -> Vec<f64> {
    let chunks = exec::map_blocks(lo, hi, exec::DEFAULT_BLOCK, |blo, bhi| {
        beta_block(kit, blo, bhi)
    });
    let mut out = Vec::with_capacity((hi - lo) as usize);
    for c in chunks {
        out.extend_from_slice(&c);
    }
    out
}

fn beta_block(kit: &SieveKit, lo: u64, hi: u64) -> Vec<f64> {
    let len = (hi - lo) as usize;
    let mut acc = vec![0.0f64; len];
    for &(d, lam, ref roots) in kit.strides() {
        for &root in roots {
            let mut n = lo + (root + d - lo % d) % d;
            while n < hi {
                acc[(n - lo) as usize] += lam;
                n += d;
            }
        }
    }
    let g = kit.big_g_f64;
    for v in &mut acc {
        *v = g * *v * *v;
    }
    acc
}

/// Pairwise-summed beta over [lo, hi).
pub fn beta_sum(kit: &SieveKit, lo: u64, hi: u64) -> f64 {
    exec::sum_blocks(lo, hi, exec::DEFAULT_BLOCK, |blo, bhi| {
        exec::pairwise_sum(&beta_block(kit, blo, bhi))
    })
}

fn s_from_residues(residues: &[u64], a: u64, q: u64) -> Complex64 {
    // s(a/q) = (1/(q gamma(q))) sum_{n in X_q} e_q(a n), and q gamma(q) = |X_q|
    let mut acc = Complex64::ZERO;
    for &n in residues {
        acc += e_frac((a as u128 * n as u128 % q as u128) as u64, q);
    }
    acc / residues.len() as f64
}

/// Normalised Fourier coefficient of the coprime indicator, by direct
/// enumeration of X_q.
pub fn s_coeff(f: &LinearSystem, frac: &ReducedFraction) -> Result<Complex64> {
    let data = forms::local_data(f, frac.q)?;
    if data.residues.is_empty() {
        return Err(Error::Degenerate(format!(
            "gamma({}) = 0 for {f}; s is undefined",
            frac.q
        )));
    }
    Ok(s_from_residues(&data.residues, frac.a, frac.q))
}

/// s via prime-by-prime multiplicativity: for squarefree q = p_1...p_m,
/// a/q = sum_p a_p/p mod 1 with a_p = a (q/p)^{-1} mod p, and
/// s(a/q) = prod_p s(a_p/p).
pub fn s_coeff_multiplicative(f: &LinearSystem, frac: &ReducedFraction) -> Result<Complex64> {
    let q = frac.q;
    if q == 1 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let fact = arith::factor(q);
    if !fact.is_squarefree() {
        return Err(Error::Domain(format!(
            "multiplicative path needs squarefree q, got {q}"
        )));
    }
    let mut prod = Complex64::new(1.0, 0.0);
    for &(p, _) in &fact.factors {
        let cof = (q / p) % p;
        let inv = arith::pow_mod(cof, p - 2, p);
        let ap = (frac.a % p) as u128 * inv as u128 % p as u128;
        let local = if ap == 0 {
            ReducedFraction::zero()
        } else {
            ReducedFraction::new(ap as u64, p)?
        };
        prod *= s_coeff(f, &local)?;
    }
    Ok(prod)
}

/// S(q~, x): sum of mu(l1 l2 / q~) over divisor pairs l1, l2 of q~ with
/// l1, l2 <= x and q~ | l1 l2. Exactly 3^{omega(q~)} pairs are in support.
fn divisor_pair_sum(q_tilde: u64, x: u64) -> i64 {
    if q_tilde == 1 {
        return i64::from(x >= 1);
    }
    let divisors = arith::factor(q_tilde).divisors();
    let mut total = 0i64;
    for &l1 in &divisors {
        if l1 > x {
            continue;
        }
        for &l2 in &divisors {
            if l2 > x || (l1 * l2) % q_tilde != 0 {
                continue;
            }
            total += arith::factor(l1 * l2 / q_tilde).mu() as i64;
        }
    }
    total
}

/// The exact rational weight sum_{t <= R} h(t) S(q/(q,t), R/t); w(a/q) is
/// s(a/q) times this over G(R).
fn w_weight(kit: &SieveKit, q: u64) -> Rat {
    let mut total = Rat::zero();
    for t in 1..=kit.r {
        if kit.h[t as usize].is_zero() {
            continue;
        }
        let q_tilde = q / num::integer::gcd(q, t);
        let s = divisor_pair_sum(q_tilde, kit.r / t);
        if s != 0 {
            total += kit.h[t as usize].clone() * Rat::from(BigInt::from(s));
        }
    }
    total
}

fn is_squarefree(q: u64) -> bool {
    arith::factor(q).is_squarefree()
}

/// Fourier coefficient of beta at a/q for q <= R^2.
///
/// Exactly zero when q is not squarefree or when gamma(q) = 1 with q > 1
/// (both vanishing statements are theorems; the numerical path confirms
/// them in the tests).
pub fn w_coeff(kit: &SieveKit, frac: &ReducedFraction) -> Result<Complex64> {
    let q = frac.q;
    if q > kit.r * kit.r {
        return Err(Error::Domain(format!(
            "w(a/q) lives on q <= R^2 = {}, got q = {q}",
            kit.r * kit.r
        )));
    }
    if q > 1 {
        if !is_squarefree(q) {
            return Ok(Complex64::ZERO);
        }
        if forms::gamma_of(&kit.form, q)?.is_one() {
            return Ok(Complex64::ZERO);
        }
    }
    let s = s_coeff(&kit.form, frac)?;
    let ratio = (w_weight(kit, q) / kit.big_g.clone())
        .to_f64()
        .expect("weight ratio fits in f64");
    Ok(s * ratio)
}

/// Brute-force w through the unreduced quadruple sum
/// (s(a/q)/G) sum_{d1 r1 <= R, d2 r2 <= R, q | [r1, r2]}
///            mu(d1) mu(d2) gamma([r1,r2]) / (gamma(r1) gamma(r2)).
/// Test oracle only; the cost guard rejects R > 12.
pub fn w_oracle(kit: &SieveKit, frac: &ReducedFraction) -> Result<Complex64> {
    if kit.r > 12 {
        return Err(Error::Budget(format!(
            "w_oracle is a quadruple sum, guarded at R <= 12 (got {})",
            kit.r
        )));
    }
    let q = frac.q;
    if q > kit.r * kit.r {
        return Err(Error::Domain(format!(
            "w(a/q) lives on q <= R^2 = {}, got q = {q}",
            kit.r * kit.r
        )));
    }
    let r = kit.r;
    let mut pairs: Vec<(u64, i64)> = Vec::new(); // (r_i, mu(d_i)) with d_i r_i <= R
    for d in 1..=r {
        let mu = arith::factor(d).mu() as i64;
        if mu == 0 {
            continue;
        }
        for rr in 1..=r / d {
            pairs.push((rr, mu));
        }
    }
    let gamma_cached: Vec<Rat> = (0..=r * r)
        .map(|m| {
            if m == 0 {
                Rat::one()
            } else {
                forms::gamma_of(&kit.form, m).expect("positive modulus")
            }
        })
        .collect();
    let mut total = Rat::zero();
    for &(r1, mu1) in &pairs {
        for &(r2, mu2) in &pairs {
            let l = num::integer::lcm(r1, r2);
            if l % q != 0 {
                continue;
            }
            let term = gamma_cached[l as usize].clone()
                / (gamma_cached[r1 as usize].clone() * gamma_cached[r2 as usize].clone());
            let signed = Rat::from(BigInt::from(mu1 * mu2)) * term;
            total += signed;
        }
    }
    let s = s_coeff(&kit.form, frac)?;
    let ratio = (total / kit.big_g.clone()).to_f64().expect("ratio fits in f64");
    Ok(s * ratio)
}

/// All (s, w) pairs for fractions with q <= R^2, in (q, a) order.
pub struct FourierTable {
    r: u64,
    entries: Vec<TableEntry>,
}

#[derive(Debug, Clone, Copy)]
pub struct TableEntry {
    pub a: u64,
    pub q: u64,
    pub s: Complex64,
    pub w: Complex64,
}

impl FourierTable {
    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    pub fn lookup(&self, a: u64, q: u64) -> Option<&TableEntry> {
        let at = self
            .entries
            .binary_search_by_key(&(q, a), |e| (e.q, e.a))
            .ok()?;
        Some(&self.entries[at])
    }
}

const TABLE_ENTRY_CAP: u64 = 2_000_000;

/// Build the full table for q <= R^2; parallel over q, merged in q order.
pub fn build_table(kit: &SieveKit) -> Result<FourierTable> {
    let q_max = kit.r * kit.r;
    // sum of phi(q) grows like 3 q_max^2 / pi^2
    if q_max * q_max / 3 > TABLE_ENTRY_CAP {
        return Err(Error::Budget(format!(
            "Fourier table for q <= {q_max} exceeds {TABLE_ENTRY_CAP} entries"
        )));
    }
    let qs: Vec<u64> = (1..=q_max).collect();
    let per_q: Vec<Result<Vec<TableEntry>>> = exec::map_items(&qs, |&q| {
        let data = forms::local_data(&kit.form, q)?;
        if data.residues.is_empty() {
            return Err(Error::Degenerate(format!("gamma({q}) = 0")));
        }
        let squarefree = is_squarefree(q);
        let full = data.residues.len() as u64 == q; // gamma(q) = 1
        let ratio = if squarefree && !(full && q > 1) {
            (w_weight(kit, q) / kit.big_g.clone())
                .to_f64()
                .expect("weight ratio fits in f64")
        } else {
            0.0
        };
        let mut out = Vec::new();
        for a in 0..q {
            let ok = if q == 1 { a == 0 } else { a > 0 && num::integer::gcd(a, q) == 1 };
            if !ok {
                continue;
            }
            let s = s_from_residues(&data.residues, a, q);
            let w = if ratio == 0.0 { Complex64::ZERO } else { s * ratio };
            out.push(TableEntry { a, q, s, w });
        }
        Ok(out)
    });
    let mut entries = Vec::new();
    for chunk in per_q {
        entries.extend(chunk?);
    }
    Ok(FourierTable { r: kit.r, entries })
}

/// Max over n in [lo, hi] of |beta(n) - sum_{q <= R^2} sum_a w(a/q) e_q(-an)|.
pub fn verify_expansion(kit: &SieveKit, table: &FourierTable, lo: i64, hi: i64) -> Result<f64> {
    if table.r != kit.r {
        return Err(Error::Domain("table level differs from kit level".into()));
    }
    let devs = exec::map_items(
        &(lo..=hi).collect::<Vec<i64>>(),
        |&n| -> Result<f64> {
            let exact = beta(kit, n)?.to_f64().expect("beta fits in f64");
            let mut acc = Complex64::ZERO;
            for e in &table.entries {
                if e.w != Complex64::ZERO {
                    let nr = n.rem_euclid(e.q as i64) as u64;
                    acc += e.w * e_minus(e.a, nr, e.q);
                }
            }
            Ok(((acc.re - exact).powi(2) + acc.im.powi(2)).sqrt())
        },
    );
    let mut max = 0.0f64;
    for d in devs {
        max = max.max(d?);
    }
    Ok(max)
}

/// Exhaustive check of the coprime-indicator expansion
/// 1_{X_M}(n) = gamma(M) sum_{q | M} sum_{a in Z_q^*} s(a/q) e_q(-an)
/// over all n in Z_M; returns the max deviation.
pub fn indicator_expansion_check(f: &LinearSystem, m: u64) -> Result<f64> {
    if m == 0 || m > 10_000 {
        return Err(Error::Budget(format!(
            "indicator check enumerates Z_M, guarded at M <= 10^4 (got {m})"
        )));
    }
    let data_m = forms::local_data(f, m)?;
    let gamma_m = data_m.gamma.to_f64().expect("gamma fits in f64");
    let mut member = vec![false; m as usize];
    for &n in &data_m.residues {
        member[n as usize] = true;
    }
    let mut coeffs: Vec<(u64, u64, Complex64)> = Vec::new();
    for q in arith::factor(m).divisors() {
        let data = forms::local_data(f, q)?;
        if data.residues.is_empty() {
            return Err(Error::Degenerate(format!("gamma({q}) = 0")));
        }
        for a in 0..q {
            let ok = if q == 1 { a == 0 } else { a > 0 && num::integer::gcd(a, q) == 1 };
            if ok {
                coeffs.push((a, q, s_from_residues(&data.residues, a, q)));
            }
        }
    }
    let mut max = 0.0f64;
    for n in 0..m {
        let mut acc = Complex64::ZERO;
        for &(a, q, s) in &coeffs {
            acc += s * e_minus(a, n % q, q);
        }
        acc *= gamma_m;
        let lhs = if member[n as usize] { 1.0 } else { 0.0 };
        max = max.max(((acc.re - lhs).powi(2) + acc.im.powi(2)).sqrt());
    }
    Ok(max)
}

/// Empirical growth report for h: (argmax q, max of h(q) q^{1-eps}) over
/// squarefree q <= limit. Reported, never asserted.
pub fn h_growth_report(f: &LinearSystem, limit: u64, eps: f64) -> Result<(u64, f64)> {
    if !forms::nondegenerate(f)? {
        return Err(Error::Degenerate(format!("{f} is degenerate")));
    }
    let lu = limit as usize;
    let mu = arith::mobius_sieve(lu);
    let spf = arith::spf_sieve(lu);
    let mut h = vec![0.0f64; lu + 1];
    let mut factor = vec![0.0f64; lu + 1];
    h[1] = 1.0;
    for d in 2..=lu {
        let p = spf[d] as usize;
        if p == d {
            let g = forms::gamma_at_prime(f, d as u64)
                .to_f64()
                .expect("gamma fits in f64");
            factor[d] = (1.0 - g) / g;
        }
        if mu[d] != 0 {
            h[d] = h[d / p] * factor[p];
        }
    }
    let mut best = (1u64, 1.0f64);
    for q in 1..=lu {
        if mu[q] != 0 {
            let v = h[q] * (q as f64).powf(1.0 - eps);
            if v > best.1 {
                best = (q as u64, v);
            }
        }
    }
    Ok(best)
}
