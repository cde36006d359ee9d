//! Integer groundwork: segmented prime sieve with a binary on-disk cache,
//! deterministic Miller-Rabin primality and Brent-rho factorization, and
//! linear-sieve tables for the multiplicative functions mu and phi.

use crate::{Error, Result};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

/// Sorted primes up to an inclusive limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    pub limit: u64,
    pub primes: Vec<u64>,
}

impl PrimeTable {
    /// Membership by binary search; `n` must not exceed the sieved limit.
    pub fn contains(&self, n: u64) -> bool {
        assert!(n <= self.limit, "query {n} beyond sieved limit {}", self.limit);
        self.primes.binary_search(&n).is_ok()
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
}

pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    r
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

const SEGMENT_LEN: u64 = 1 << 20;

/// Segmented sieve of Eratosthenes up to `limit` inclusive.
/// Memory stays at one segment plus the output; the limit itself is guarded
/// by the scan budget (`SELBERG_BUDGET`, default 2*10^9).
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    sieve_primes_bounded(limit, crate::budget_or(2_000_000_000))
}

/// [`sieve_primes`] with an explicit budget instead of the environment's.
pub fn sieve_primes_bounded(limit: u64, budget: u64) -> Result<PrimeTable> {
    if limit > budget {
        return Err(Error::Budget(format!(
            "sieve limit {limit} exceeds budget {budget}"
        )));
    }
    if limit < 2 {
        return Ok(PrimeTable { limit, primes: Vec::new() });
    }
    let base = simple_sieve(isqrt(limit));
    let mut primes = Vec::new();
    let mut lo = 2u64;
    let mut mark = vec![false; SEGMENT_LEN as usize];
    while lo <= limit {
        let hi = (lo + SEGMENT_LEN - 1).min(limit);
        let width = (hi - lo + 1) as usize;
        mark[..width].fill(false);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut j = (p * p).max(lo.div_ceil(p) * p);
            while j <= hi {
                mark[(j - lo) as usize] = true;
                j += p;
            }
        }
        for (i, &m) in mark[..width].iter().enumerate() {
            let n = lo + i as u64;
            if !m && n >= 2 {
                primes.push(n);
            }
        }
        lo = hi + 1;
    }
    Ok(PrimeTable { limit, primes })
}

pub const CACHE_MAGIC: &[u8; 6] = b"PRIMV1";

/// Cache layout: magic `PRIMV1`, prime count as u64 LE, then each prime u64 LE.
pub fn write_prime_cache(table: &PrimeTable, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut buf = Vec::with_capacity(14 + 8 * table.primes.len());
    buf.extend_from_slice(CACHE_MAGIC);
    buf.extend_from_slice(&(table.primes.len() as u64).to_le_bytes());
    for &p in &table.primes {
        buf.extend_from_slice(&p.to_le_bytes());
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(&buf)?;
    Ok(())
}

pub fn read_prime_cache(path: &Path, limit: u64) -> Result<PrimeTable> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 14 || &bytes[..6] != CACHE_MAGIC {
        return Err(Error::Parse(format!("{}: not a PRIMV1 prime cache", path.display())));
    }
    let count = u64::from_le_bytes(bytes[6..14].try_into().unwrap()) as usize;
    if bytes.len() != 14 + 8 * count {
        return Err(Error::Parse(format!("{}: truncated prime cache", path.display())));
    }
    let mut primes = Vec::with_capacity(count);
    for chunk in bytes[14..].chunks_exact(8) {
        primes.push(u64::from_le_bytes(chunk.try_into().unwrap()));
    }
    if primes.windows(2).any(|w| w[0] >= w[1]) || primes.last().is_some_and(|&p| p > limit) {
        return Err(Error::Parse(format!("{}: cache inconsistent with limit {limit}", path.display())));
    }
    Ok(PrimeTable { limit, primes })
}

pub fn cache_path(limit: u64) -> PathBuf {
    crate::cache_dir().join(format!("primes_{limit}.bin"))
}

/// Sieve through the cache: read `primes_{limit}.bin` when valid, else sieve
/// and write it. The write is best-effort; an unwritable cache directory
/// never fails the computation.
pub fn cached_primes(limit: u64) -> Result<PrimeTable> {
    let path = cache_path(limit);
    if path.exists() {
        if let Ok(t) = read_prime_cache(&path, limit) {
            return Ok(t);
        }
    }
    let t = sieve_primes(limit)?;
    let _ = write_prime_cache(&t, &path);
    Ok(t)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin; the 12-witness base set decides all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime >= n.
pub fn next_prime(n: u64) -> u64 {
    let mut m = n.max(2);
    if m > 2 && m % 2 == 0 {
        m += 1;
    }
    while !is_prime(m) {
        m += if m == 2 { 1 } else { 2 };
    }
    m
}

const TRIAL_LIMIT: u64 = 100_000;

/// Primes up to 10^5, built once; the trial-division stage of `factor`.
pub fn small_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| simple_sieve(TRIAL_LIMIT))
}

/// Brent-variant Pollard rho with a fixed polynomial-offset schedule, so
/// repeated runs split identically.
fn rho_split(n: u64) -> u64 {
    debug_assert!(n > 1 && !is_prime(n) && n % 2 == 1);
    let gcd = num::integer::gcd::<u64>;
    for c in 1..64u64 {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut y = 2u64;
        let mut r = 1u64;
        let mut q = 1u64;
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0u64;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..128.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            g = 1;
            while g == 1 {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("rho offset schedule exhausted for {n}");
}

/// Prime factorization with multiplicities, sorted by prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn mu(&self) -> i8 {
        if self.factors.iter().any(|&(_, e)| e > 1) {
            0
        } else if self.factors.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| p.pow(e - 1) * (p - 1))
            .product()
    }

    /// Number of distinct prime divisors.
    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }

    pub fn num_divisors(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| (e + 1) as u64).product()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// All divisors, sorted.
    pub fn divisors(&self) -> Vec<u64> {
        let mut ds = vec![1u64];
        for &(p, e) in &self.factors {
            let len = ds.len();
            let mut pe = 1u64;
            for _ in 0..e {
                pe *= p;
                for i in 0..len {
                    ds.push(ds[i] * pe);
                }
            }
        }
        ds.sort_unstable();
        ds
    }
}

fn push_prime(factors: &mut Vec<(u64, u32)>, p: u64) {
    match factors.iter_mut().find(|(q, _)| *q == p) {
        Some((_, e)) => *e += 1,
        None => factors.push((p, 1)),
    }
}

fn factor_core(m: u64, factors: &mut Vec<(u64, u32)>) {
    if m == 1 {
        return;
    }
    if is_prime(m) {
        push_prime(factors, m);
        return;
    }
    let d = rho_split(m);
    factor_core(d, factors);
    factor_core(m / d, factors);
}

/// Factor `n >= 1`: trial division by primes up to 10^5, then deterministic
/// rho on any remaining cofactor.
pub fn factor(n: u64) -> Factorization {
    assert!(n >= 1, "factor is defined on positive integers");
    let mut m = n;
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for &p in small_primes() {
        if p * p > m {
            break;
        }
        while m % p == 0 {
            push_prime(&mut factors, p);
            m /= p;
        }
    }
    if m > 1 {
        if m <= TRIAL_LIMIT * TRIAL_LIMIT {
            // no prime factor up to 10^5 survived, so the cofactor is prime
            push_prime(&mut factors, m);
        } else {
            factor_core(m, &mut factors);
        }
    }
    factors.sort_unstable_by_key(|&(p, _)| p);
    Factorization { n, factors }
}

/// (mu, phi, omega) in one factorization pass.
pub fn arith_functions(n: u64) -> (i8, u64, u32) {
    let f = factor(n);
    (f.mu(), f.phi(), f.omega())
}

/// Smallest-prime-factor table by linear sieve; spf[0] = spf[1] = 0.
pub fn spf_sieve(limit: usize) -> Vec<u32> {
    assert!(limit < u32::MAX as usize);
    let mut spf = vec![0u32; limit + 1];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=limit {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        for &p in &primes {
            let ip = i * p as usize;
            if p > spf[i] || ip > limit {
                break;
            }
            spf[ip] = p;
        }
    }
    spf
}

/// Mobius table up to `limit`, from the spf sieve.
pub fn mobius_sieve(limit: usize) -> Vec<i8> {
    let spf = spf_sieve(limit);
    let mut mu = vec![0i8; limit + 1];
    if limit >= 1 {
        mu[1] = 1;
    }
    for i in 2..=limit {
        let p = spf[i] as usize;
        let m = i / p;
        mu[i] = if m % p == 0 { 0 } else { -mu[m] };
    }
    mu
}

/// Euler phi table up to `limit`, from the spf sieve.
pub fn phi_sieve(limit: usize) -> Vec<u64> {
    let spf = spf_sieve(limit);
    let mut phi = vec![0u64; limit + 1];
    if limit >= 1 {
        phi[1] = 1;
    }
    for i in 2..=limit {
        let p = spf[i] as usize;
        let m = i / p;
        phi[i] = if m % p == 0 {
            phi[m] * p as u64
        } else {
            phi[m] * (p as u64 - 1)
        };
    }
    phi
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_prime_trial(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2u64;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn sieve_small_limits() {
        assert_eq!(sieve_primes(10).unwrap().primes, vec![2, 3, 5, 7]);
        assert_eq!(sieve_primes(2).unwrap().primes, vec![2]);
        assert!(sieve_primes(1).unwrap().primes.is_empty());
    }

    #[test]
    fn sieve_crosses_segment_boundaries() {
        // limit just past one segment; compare against the simple sieve
        let limit = SEGMENT_LEN + 1000;
        let seg = sieve_primes(limit).unwrap();
        assert_eq!(seg.primes, simple_sieve(limit));
    }

    #[test]
    fn prime_count_to_1e6_matches_trial_division() {
        let table = sieve_primes(1_000_000).unwrap();
        assert_eq!(table.len(), 78_498);
        let by_trial = (2..=1_000_000u64).filter(|&n| is_prime_trial(n)).count();
        assert_eq!(table.len(), by_trial);
        assert!(table.contains(999_983));
        assert!(!table.contains(999_981));
    }

    #[test]
    fn sieve_respects_budget() {
        let err = sieve_primes_bounded(10_000, 1000).unwrap_err();
        assert_eq!(err.exit_code(), 4);
        assert!(sieve_primes_bounded(10_000, 10_000).is_ok());
    }

    #[test]
    fn cache_round_trip_and_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("primes_1000.bin");
        let table = sieve_primes(1000).unwrap();
        write_prime_cache(&table, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..6], CACHE_MAGIC);
        assert_eq!(
            u64::from_le_bytes(bytes[6..14].try_into().unwrap()),
            table.len() as u64
        );
        assert_eq!(read_prime_cache(&path, 1000).unwrap(), table);

        std::fs::write(&path, b"PRIMV2xxxxxxxxxx").unwrap();
        assert_eq!(read_prime_cache(&path, 1000).unwrap_err().exit_code(), 2);
        // a valid file whose primes exceed the claimed limit is rejected too
        write_prime_cache(&table, &path).unwrap();
        assert!(read_prime_cache(&path, 100).is_err());
    }

    #[test]
    fn miller_rabin_agrees_with_sieve_to_1e5() {
        let table = sieve_primes(100_000).unwrap();
        let mut idx = 0;
        for n in 0..=100_000u64 {
            let sieved = idx < table.len() && table.primes[idx] == n;
            if sieved {
                idx += 1;
            }
            assert_eq!(is_prime(n), sieved, "n = {n}");
        }
        assert!(is_prime(2_147_483_647)); // 2^31 - 1
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn next_prime_examples() {
        assert_eq!(next_prime(10_000), 10_007);
        assert_eq!(next_prime(2), 2);
        assert_eq!(next_prime(0), 2);
        assert_eq!(next_prime(14), 17);
    }

    #[test]
    fn factor_examples() {
        assert_eq!(factor(1).factors, vec![]);
        assert_eq!(factor(60).factors, vec![(2, 2), (3, 1), (5, 1)]);
        assert_eq!(factor(9).factors, vec![(3, 2)]);
        assert_eq!(factor(10_000_019).factors, vec![(10_000_019, 1)]);
    }

    #[test]
    fn factor_splits_large_semiprime() {
        // both primes exceed the trial-division bound, forcing the rho path
        let n = 10_000_019u64 * 10_000_079;
        let f = factor(n);
        assert_eq!(f.factors, vec![(10_000_019, 1), (10_000_079, 1)]);
        // and once more to confirm the schedule is deterministic
        assert_eq!(factor(n).factors, f.factors);
    }

    #[test]
    fn factor_round_trips_below_1e5() {
        for n in 1..=100_000u64 {
            let f = factor(n);
            let prod: u64 = f.factors.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, n);
            assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0));
        }
    }

    #[test]
    fn arith_functions_edge_and_samples() {
        assert_eq!(arith_functions(1), (1, 1, 0));
        assert_eq!(arith_functions(2), (-1, 1, 1));
        assert_eq!(arith_functions(12), (0, 4, 2));
        assert_eq!(arith_functions(30), (-1, 8, 3));
        assert_eq!(arith_functions(49), (0, 42, 1));
    }

    #[test]
    fn sieved_mu_phi_match_factorizations() {
        let mu = mobius_sieve(3000);
        let phi = phi_sieve(3000);
        for n in 1..=3000u64 {
            let f = factor(n);
            assert_eq!(mu[n as usize], f.mu(), "mu({n})");
            assert_eq!(phi[n as usize], f.phi(), "phi({n})");
        }
    }

    #[test]
    fn mobius_inversion_to_1e4() {
        // sum of mu(d) over divisors d of n vanishes except at n = 1
        let n_max = 10_000usize;
        let mu = mobius_sieve(n_max);
        let mut acc = vec![0i32; n_max + 1];
        for d in 1..=n_max {
            let mut m = d;
            while m <= n_max {
                acc[m] += mu[d] as i32;
                m += d;
            }
        }
        assert_eq!(acc[1], 1);
        assert!(acc[2..].iter().all(|&s| s == 0));
    }

    #[test]
    fn phi_is_multiplicative_on_coprime_pairs() {
        let phi = phi_sieve(1_000_000);
        for a in 2..=1000u64 {
            for b in 2..=1000u64 {
                if num::integer::gcd(a, b) == 1 {
                    assert_eq!(phi[(a * b) as usize], phi[a as usize] * phi[b as usize]);
                }
            }
        }
    }

    #[test]
    fn divisors_are_sorted_and_complete() {
        assert_eq!(factor(60).divisors(), vec![1, 2, 3, 4, 5, 6, 10, 12, 15, 20, 30, 60]);
        assert_eq!(factor(1).divisors(), vec![1]);
        assert_eq!(factor(97).divisors(), vec![1, 97]);
    }

    proptest::proptest! {
        #[test]
        fn factor_round_trips_on_random_u48(n in 1u64..(1 << 48)) {
            let f = factor(n);
            let prod: u64 = f.factors.iter().map(|&(p, e)| p.pow(e)).product();
            proptest::prop_assert_eq!(prod, n);
            for &(p, _) in &f.factors {
                proptest::prop_assert!(is_prime(p));
            }
        }
    }
}
