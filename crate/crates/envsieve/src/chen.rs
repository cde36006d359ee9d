//! Chen primes (p with p + 2 prime or a two-prime product whose factors
//! both exceed p^{3/11}), the W-trick that flattens small-prime bias, and
//! scans for three-term progressions of Chen primes, both by direct
//! enumeration and through the transference pipeline.

use crate::forms::LinearSystem;
use crate::transfer::{self, CyclicFunction, TransferenceReport};
use crate::{arith, exec, selberg, Error, Result};
use num::BigUint;
use serde::Serialize;
use std::collections::HashSet;

/// Default partner-factor exponent: both factors of a semiprime p + 2
/// must exceed p^{3/11}.
pub const DEFAULT_EXPONENT: (u32, u32) = (3, 11);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PartnerKind {
    Prime,
    Semiprime,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChenRecord {
    pub p: u64,
    pub partner_kind: PartnerKind,
    /// Prime factors of p + 2 with multiplicity (one or two entries).
    pub factors_of_p_plus_2: Vec<u64>,
    /// (numerator, denominator) of the exponent both factors must beat.
    pub exponent: (u32, u32),
}

/// f > p^{num/den}, decided exactly as f^den > p^num.
fn exceeds_power(f: u64, p: u64, (num, den): (u32, u32)) -> bool {
    BigUint::from(f).pow(den) > BigUint::from(p).pow(num)
}

fn classify(p: u64, partner_prime: bool, exponent: (u32, u32)) -> Option<ChenRecord> {
    let partner = p + 2;
    if partner_prime {
        return Some(ChenRecord {
            p,
            partner_kind: PartnerKind::Prime,
            factors_of_p_plus_2: vec![partner],
            exponent,
        });
    }
    let f = arith::factor(partner);
    let multiplicity: u32 = f.factors.iter().map(|&(_, e)| e).sum();
    if multiplicity != 2 {
        return None;
    }
    let mut factors = Vec::with_capacity(2);
    for &(q, e) in &f.factors {
        for _ in 0..e {
            factors.push(q);
        }
    }
    if factors.iter().all(|&q| exceeds_power(q, p, exponent)) {
        Some(ChenRecord {
            p,
            partner_kind: PartnerKind::Semiprime,
            factors_of_p_plus_2: factors,
            exponent,
        })
    } else {
        None
    }
}

/// Classify one prime; `None` means p is prime but not Chen.
pub fn is_chen(p: u64, exponent: (u32, u32)) -> Result<Option<ChenRecord>> {
    if exponent.1 == 0 {
        return Err(Error::Domain("exponent denominator must be positive".into()));
    }
    if !arith::is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    Ok(classify(p, arith::is_prime(p + 2), exponent))
}

const FACTOR_BUDGET_DEFAULT: u64 = 10_000_000;

fn factoring_budget(needed: u64) -> Result<u64> {
    let budget = crate::budget_or(FACTOR_BUDGET_DEFAULT);
    if needed > budget {
        return Err(Error::Budget(format!(
            "scan needs factoring up to {needed}, over the budget {budget}"
        )));
    }
    Ok(budget)
}

/// All Chen records with p <= N, ascending.
pub fn chen_records_up_to(n: u64, exponent: (u32, u32)) -> Result<Vec<ChenRecord>> {
    if exponent.1 == 0 {
        return Err(Error::Domain("exponent denominator must be positive".into()));
    }
    if n < 2 {
        return Err(Error::Domain("need N >= 2".into()));
    }
    factoring_budget(n + 2)?;
    let table = arith::cached_primes(n + 2)?;
    let chunks = exec::map_blocks(2, n + 1, exec::DEFAULT_BLOCK, |lo, hi| {
        let mut found = Vec::new();
        for p in lo..hi {
            if !table.contains(p) {
                continue;
            }
            if let Some(rec) = classify(p, table.contains(p + 2), exponent) {
                found.push(rec);
            }
        }
        found
    });
    let mut out = Vec::new();
    for c in chunks {
        out.extend(c);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct DyadicBand {
    /// Band (lo, hi].
    pub lo: u64,
    pub hi: u64,
    pub count: u64,
    /// count * ln(hi)^2 / hi, the density against the expected shape.
    pub normalized: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityScan {
    pub n: u64,
    pub exponent: (u32, u32),
    pub total: u64,
    pub bands: Vec<DyadicBand>,
}

/// Chen-prime counts per dyadic band (N/2^{j+1}, N/2^j].
pub fn chen_density_scan(n: u64, exponent: (u32, u32)) -> Result<DensityScan> {
    let records = chen_records_up_to(n, exponent)?;
    let ps: Vec<u64> = records.iter().map(|r| r.p).collect();
    let mut bands = Vec::new();
    let mut hi = n;
    while hi >= 2 {
        let lo = hi / 2;
        let count = ps.iter().filter(|&&p| p > lo && p <= hi).count() as u64;
        let ln = (hi as f64).ln();
        bands.push(DyadicBand {
            lo,
            hi,
            count,
            normalized: count as f64 * ln * ln / hi as f64,
        });
        hi = lo;
    }
    Ok(DensityScan {
        n,
        exponent,
        total: ps.len() as u64,
        bands,
    })
}

/// W = prod_{p <= t} p with the residues b where both b and b + 2 are
/// units mod W; restricting a sequence to one such class removes all
/// small-prime bias from the twin-type form (Wn+b)(Wn+b+2).
#[derive(Debug, Clone, Serialize)]
pub struct WTrick {
    t: f64,
    w: u64,
    residues: Vec<u64>,
    chosen_b: u64,
}

impl WTrick {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn w(&self) -> u64 {
        self.w
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn chosen_b(&self) -> u64 {
        self.chosen_b
    }

    /// Switch the distinguished residue; must be one of the enumerated b.
    pub fn choose(&mut self, b: u64) -> Result<()> {
        if self.residues.binary_search(&b).is_err() {
            return Err(Error::Domain(format!("{b} is not an admissible residue")));
        }
        self.chosen_b = b;
        Ok(())
    }

    /// prod_{3 <= p <= t} (p - 2): the exact size of the residue set by
    /// the Chinese remainder theorem. The naive product W prod (1 - 2/p)
    /// over odd primes only is exactly twice this, because at p = 2 the
    /// two conditions coincide (b odd) and contribute 1/2, not 1.
    pub fn corrected_count(&self) -> u64 {
        arith::small_primes()
            .iter()
            .take_while(|&&p| (p as f64) <= self.t)
            .filter(|&&p| p > 2)
            .map(|&p| p - 2)
            .product()
    }

    /// Twin-type form (Wn + b)(Wn + b + 2) at the chosen residue.
    pub fn form(&self) -> Result<LinearSystem> {
        LinearSystem::new(vec![
            (self.w as i64, self.chosen_b as i64),
            (self.w as i64, self.chosen_b as i64 + 2),
        ])
    }
}

const W_ENUMERATION_CAP: u64 = 100_000_000;

pub fn w_trick(t: f64) -> Result<WTrick> {
    if !(t >= 3.0) {
        return Err(Error::Domain(format!("the W-trick needs t >= 3, got {t}")));
    }
    if t > 31.0 {
        return Err(Error::Budget("W overflows 64 bits past t = 31".into()));
    }
    let w: u64 = arith::small_primes()
        .iter()
        .take_while(|&&p| (p as f64) <= t)
        .product();
    if w > W_ENUMERATION_CAP {
        return Err(Error::Budget(format!(
            "enumerating the residue set scans all of Z_{w}; capped at W <= {W_ENUMERATION_CAP}"
        )));
    }
    let chunks = exec::map_blocks(1, w + 1, exec::DEFAULT_BLOCK, |lo, hi| {
        let mut found = Vec::new();
        for b in lo..hi {
            if num::integer::gcd(b, w) == 1 && num::integer::gcd(b + 2, w) == 1 {
                found.push(b);
            }
        }
        found
    });
    let mut residues = Vec::new();
    for c in chunks {
        residues.extend(c);
    }
    if residues.is_empty() {
        return Err(Error::Degenerate(format!("no admissible residue mod {w}")));
    }
    let chosen_b = residues[0];
    Ok(WTrick {
        t,
        w,
        residues,
        chosen_b,
    })
}

/// Among the admissible residues, pick the b maximizing
/// |{N/4 <= m <= N/2 : Wm + b is a Chen prime}| (ties to the smallest b)
/// and return that set of m.
pub fn select_residue(n: u64, wt: &WTrick) -> Result<(u64, Vec<u64>)> {
    if n < 8 {
        return Err(Error::Domain("window [N/4, N/2] needs N >= 8".into()));
    }
    let hi_m = n / 2;
    let lo_m = n.div_ceil(4);
    let max_b = *wt.residues.last().expect("nonempty by construction");
    let top = wt
        .w
        .checked_mul(hi_m)
        .and_then(|v| v.checked_add(max_b + 2))
        .ok_or_else(|| Error::Budget("W N/2 overflows".into()))?;
    factoring_budget(top)?;
    let table = arith::cached_primes(top)?;
    let sets: Vec<Vec<u64>> = exec::map_items(&wt.residues, |&b| {
        let mut members = Vec::new();
        for m in lo_m..=hi_m {
            let p = wt.w * m + b;
            if table.contains(p) && classify(p, table.contains(p + 2), DEFAULT_EXPONENT).is_some()
            {
                members.push(m);
            }
        }
        members
    });
    let best = sets
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.len().cmp(&b.len()).then(j.cmp(i)))
        .map(|(i, _)| i)
        .expect("nonempty residue list");
    Ok((wt.residues[best], sets[best].clone()))
}

#[derive(Debug, Clone, Serialize)]
pub struct Ap3Direct {
    pub n: u64,
    pub exponent: (u32, u32),
    pub chen_count: u64,
    pub triple_count: u64,
    /// triple_count * ln(N)^6 / N^2.
    pub normalized: f64,
    /// First few triples (p1, p2, p3) with p1 + p3 = 2 p2, ascending.
    pub witnesses: Vec<[u64; 3]>,
}

const AP3_PAIR_CAP: u64 = 4_000_000_000;
const WITNESS_CAP: usize = 10;

/// Count 3-term progressions of Chen primes up to N by a midpoint scan.
pub fn chen_ap3_direct(n: u64, exponent: (u32, u32)) -> Result<Ap3Direct> {
    let records = chen_records_up_to(n, exponent)?;
    let ps: Vec<u64> = records.iter().map(|r| r.p).collect();
    let k = ps.len() as u64;
    if k * k / 2 > AP3_PAIR_CAP {
        return Err(Error::Budget(format!(
            "midpoint scan over {} Chen primes exceeds the pair cap",
            k
        )));
    }
    let mut bits = vec![0u64; (n / 64 + 1) as usize];
    for &p in &ps {
        bits[(p / 64) as usize] |= 1 << (p % 64);
    }
    let has = |v: u64| bits[(v / 64) as usize] >> (v % 64) & 1 == 1;

    let results = exec::map_blocks(0, ps.len() as u64, 1 << 10, |lo, hi| {
        let mut count = 0u64;
        let mut local: Vec<[u64; 3]> = Vec::new();
        for j in lo as usize..hi as usize {
            for i in 0..j {
                let p3 = 2 * ps[j] - ps[i];
                if p3 <= n && has(p3) {
                    count += 1;
                    if local.len() < WITNESS_CAP {
                        local.push([ps[i], ps[j], p3]);
                    }
                }
            }
        }
        (count, local)
    });
    let mut triple_count = 0u64;
    let mut witnesses = Vec::new();
    for (c, local) in results {
        triple_count += c;
        for w in local {
            if witnesses.len() < WITNESS_CAP {
                witnesses.push(w);
            }
        }
    }
    for &[p1, p2, p3] in &witnesses {
        debug_assert!(p1 < p2 && p2 < p3 && p1 + p3 == 2 * p2);
        debug_assert!(is_chen(p1, exponent)?.is_some());
        debug_assert!(is_chen(p2, exponent)?.is_some());
        debug_assert!(is_chen(p3, exponent)?.is_some());
    }
    let ln = (n as f64).ln();
    Ok(Ap3Direct {
        n,
        exponent,
        chen_count: k,
        triple_count,
        normalized: triple_count as f64 * ln.powi(6) / (n as f64 * n as f64),
        witnesses,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Ap3Transference {
    pub n: u64,
    pub t: f64,
    pub w: u64,
    pub b: u64,
    /// Prime modulus of the cyclic model, just past N/2.
    pub modulus: u64,
    pub r: u64,
    pub x_size: usize,
    /// The constant c in f = c (ln N / ln t)^2 1_X realized by the run.
    pub c_normalization: f64,
    /// Genuine integer 3-APs inside X (d = 0 excluded).
    pub direct_triples_in_x: u64,
    pub report: TransferenceReport,
}

/// Transference demonstration: W-trick the window [N/4, N/2], majorize the
/// selected Chen set by the sieve weight of (Wn+b)(Wn+b+2) on a prime
/// cyclic group just past N/2 (progressions there cannot wrap, so every
/// counted progression is genuine), and run the full decomposition.
pub fn chen_ap3_transference(n: u64, t: f64) -> Result<Ap3Transference> {
    let wt = w_trick(t)?;
    let (b, x) = select_residue(n, &wt)?;
    if x.is_empty() {
        return Err(Error::Degenerate(format!(
            "no Chen prime of the shape {}m + {b} in [N/4, N/2]",
            wt.w
        )));
    }
    let modulus = arith::next_prime(n / 2 + 1);
    let r = t.floor() as u64;
    let mut tricked = wt;
    tricked.choose(b)?;
    let kit = selberg::build_kit(&tricked.form()?, r)?;
    let beta = selberg::beta_table(&kit, 1, modulus + 1);
    let mu = modulus as usize;
    let mut nu_vals = vec![0.0; mu];
    for (i, &v) in beta.iter().enumerate() {
        nu_vals[(i + 1) % mu] = v;
    }
    let scale = kit.big_g_f64() * (1.0 - 1e-12);
    let mut f_vals = vec![0.0; mu];
    for &m in &x {
        f_vals[m as usize] = scale;
    }
    let f = CyclicFunction::new(f_vals)?;
    let nu = CyclicFunction::new(nu_vals)?;
    let report = transfer::transference_run(&f, &nu, None, 2.5)?;

    let set: HashSet<u64> = x.iter().copied().collect();
    let mut direct = 0u64;
    for (i, &m1) in x.iter().enumerate() {
        for &m2 in &x[i + 1..] {
            if set.contains(&(2 * m2 - m1)) {
                direct += 1;
            }
        }
    }
    let ln_ratio = (n as f64).ln() / t.ln();
    Ok(Ap3Transference {
        n,
        t,
        w: tricked.w(),
        b,
        modulus,
        r,
        x_size: x.len(),
        c_normalization: scale / (ln_ratio * ln_ratio),
        direct_triples_in_x: direct,
        report,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FlatnessReport {
    pub t: f64,
    pub w: u64,
    pub b: u64,
    pub r: u64,
    pub n: u64,
    /// max_a |hat(nu)(a) - delta_{a,0}|.
    pub max_deviation: f64,
    /// |hat(nu)(0) - 1| alone.
    pub a0_deviation: f64,
    /// Table entries with 1 < q <= t, all of which must carry w = 0.
    pub small_moduli_entries: usize,
    pub small_moduli_max_w: f64,
}

/// Fourier flatness of the W-tricked sieve weight on Z_N: the local
/// density of (Wn+b)(Wn+b+2) is 1 at every q in (1, t], so the weight's
/// Fourier mass at those moduli vanishes identically and the transform
/// is close to a delta at 0.
pub fn nu_fourier_flatness(wt: &WTrick, r: u64, n: u64) -> Result<FlatnessReport> {
    if r.saturating_mul(r) > n {
        return Err(Error::Hypothesis(format!(
            "flatness scan needs R^2 <= N; got R = {r}, N = {n}"
        )));
    }
    let kit = selberg::build_kit(&wt.form()?, r)?;
    let table = selberg::build_table(&kit)?;
    let mut small_moduli_entries = 0usize;
    let mut small_moduli_max_w = 0.0f64;
    for e in table.entries() {
        if e.q > 1 && (e.q as f64) <= wt.t {
            small_moduli_entries += 1;
            small_moduli_max_w = small_moduli_max_w.max(e.w.norm());
        }
    }
    let beta = selberg::beta_table(&kit, 1, n + 1);
    let mu = n as usize;
    let mut vals = vec![0.0; mu];
    for (i, &v) in beta.iter().enumerate() {
        vals[(i + 1) % mu] = v;
    }
    let hat = transfer::dft(&CyclicFunction::new(vals)?);
    let max_deviation = hat
        .iter()
        .enumerate()
        .map(|(a, z)| {
            if a == 0 {
                (z.re - 1.0).hypot(z.im)
            } else {
                z.norm()
            }
        })
        .fold(0.0, f64::max);
    Ok(FlatnessReport {
        t: wt.t(),
        w: wt.w(),
        b: wt.chosen_b(),
        r,
        n,
        max_deviation,
        a0_deviation: (hat[0].re - 1.0).hypot(hat[0].im),
        small_moduli_entries,
        small_moduli_max_w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_examples() {
        let five = is_chen(5, DEFAULT_EXPONENT).unwrap().unwrap();
        assert_eq!(five.partner_kind, PartnerKind::Prime);
        assert_eq!(five.factors_of_p_plus_2, vec![7]);

        let seven = is_chen(7, DEFAULT_EXPONENT).unwrap().unwrap();
        assert_eq!(seven.partner_kind, PartnerKind::Semiprime);
        assert_eq!(seven.factors_of_p_plus_2, vec![3, 3]);

        assert!(is_chen(43, DEFAULT_EXPONENT).unwrap().is_none(), "45 = 3*3*5");
        // boundary: 69 = 3*23 but 3^11 = 177147 < 67^3 = 300763
        assert!(is_chen(67, DEFAULT_EXPONENT).unwrap().is_none());
        let p83 = is_chen(83, DEFAULT_EXPONENT).unwrap().unwrap();
        assert_eq!(p83.factors_of_p_plus_2, vec![5, 17]);

        assert!(is_chen(9, DEFAULT_EXPONENT).is_err(), "9 is not prime");
        assert!(is_chen(5, (1, 0)).is_err());
    }

    #[test]
    fn hand_verified_list_to_100() {
        let expected = vec![
            2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 47, 53, 59, 71, 83, 89,
        ];
        let got: Vec<u64> = chen_records_up_to(100, DEFAULT_EXPONENT)
            .unwrap()
            .iter()
            .map(|r| r.p)
            .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn exponent_monotonicity() {
        // raising the exponent can only shrink the set
        let loose: Vec<u64> = chen_records_up_to(500, (1, 10))
            .unwrap()
            .iter()
            .map(|r| r.p)
            .collect();
        let default: Vec<u64> = chen_records_up_to(500, DEFAULT_EXPONENT)
            .unwrap()
            .iter()
            .map(|r| r.p)
            .collect();
        let tight: Vec<u64> = chen_records_up_to(500, (1, 2))
            .unwrap()
            .iter()
            .map(|r| r.p)
            .collect();
        assert!(default.iter().all(|p| loose.contains(p)));
        assert!(tight.iter().all(|p| default.contains(p)));
        assert!(tight.len() < default.len() && default.len() < loose.len());
    }

    #[test]
    fn density_scan_bands() {
        let scan = chen_density_scan(10, DEFAULT_EXPONENT).unwrap();
        assert_eq!(scan.bands[0].lo, 5);
        assert_eq!(scan.bands[0].hi, 10);
        // the top band is half-open, so 5 falls in (2, 5] and only 7 here
        assert_eq!(scan.bands[0].count, 1);
        assert_eq!(scan.bands[1].count, 2, "3 and 5");
        assert_eq!(scan.total, 4, "2, 3, 5, 7");

        let scan = chen_density_scan(100_000, DEFAULT_EXPONENT).unwrap();
        let band_total: u64 = scan.bands.iter().map(|b| b.count).sum();
        assert_eq!(band_total, scan.total, "dyadic bands partition (1, N]");
        assert!(scan.bands[0].normalized > 0.1 && scan.bands[0].normalized < 10.0);
    }

    #[test]
    fn w_trick_small_cases() {
        let w3 = w_trick(3.0).unwrap();
        assert_eq!(w3.w(), 6);
        assert_eq!(w3.residues(), &[5]);
        assert_eq!(w3.chosen_b(), 5);
        assert_eq!(w3.corrected_count(), 1);

        let w5 = w_trick(5.0).unwrap();
        assert_eq!(w5.w(), 30);
        assert_eq!(w5.residues(), &[11, 17, 29]);
        assert_eq!(w5.corrected_count(), 3);

        // non-prime thresholds floor to the primorial below
        assert_eq!(w_trick(6.9).unwrap().w(), 30);

        assert!(w_trick(2.9).is_err());
        assert_eq!(w_trick(32.0).unwrap_err().exit_code(), 4);
        assert_eq!(w_trick(23.0).unwrap_err().exit_code(), 4, "enumeration cap");
    }

    #[test]
    fn w_trick_count_formula_and_admissibility() {
        for t in [3.0, 5.0, 7.0, 11.0, 13.0] {
            let wt = w_trick(t).unwrap();
            assert_eq!(
                wt.residues().len() as u64,
                wt.corrected_count(),
                "t = {t}: enumeration vs product formula"
            );
            for &b in wt.residues() {
                assert_eq!(num::integer::gcd(b, wt.w()), 1);
                assert_eq!(num::integer::gcd(b + 2, wt.w()), 1);
            }
        }
    }

    #[test]
    fn residue_selection() {
        let wt = w_trick(3.0).unwrap();
        let (b, x) = select_residue(100, &wt).unwrap();
        assert_eq!(b, 5);
        assert!(!x.is_empty());
        for &m in &x {
            assert!((25..=50).contains(&m));
            assert!(is_chen(6 * m + 5, DEFAULT_EXPONENT).unwrap().is_some());
        }

        let wt5 = w_trick(5.0).unwrap();
        let (b5, x5) = select_residue(10_000, &wt5).unwrap();
        assert!(wt5.residues().contains(&b5));
        assert!(!x5.is_empty());
        // the chosen residue is the argmax
        for &other in wt5.residues() {
            let count = x5.len();
            let mut probe = wt5.clone();
            probe.choose(other).unwrap();
            let others: Vec<u64> = (2_500..=5_000)
                .filter(|&m| {
                    let p = 30 * m + other;
                    arith::is_prime(p)
                        && classify(p, arith::is_prime(p + 2), DEFAULT_EXPONENT).is_some()
                })
                .collect();
            assert!(others.len() <= count, "residue {other} beats the chosen one");
        }
    }

    #[test]
    fn ap3_direct_small() {
        let rep = chen_ap3_direct(20, DEFAULT_EXPONENT).unwrap();
        assert!(
            rep.witnesses.contains(&[5, 11, 17]),
            "expected the (5, 11, 17) progression, got {:?}",
            rep.witnesses
        );
        assert!(rep.triple_count >= 3);
        for &[p1, p2, p3] in &rep.witnesses {
            assert!(p1 < p2 && p2 < p3);
            assert_eq!(p1 + p3, 2 * p2);
            for p in [p1, p2, p3] {
                assert!(is_chen(p, DEFAULT_EXPONENT).unwrap().is_some());
            }
        }
    }

    #[test]
    fn ap3_direct_matches_cubic_brute_force() {
        let n = 300u64;
        let rep = chen_ap3_direct(n, DEFAULT_EXPONENT).unwrap();
        let ps: Vec<u64> = chen_records_up_to(n, DEFAULT_EXPONENT)
            .unwrap()
            .iter()
            .map(|r| r.p)
            .collect();
        let mut brute = 0u64;
        for i in 0..ps.len() {
            for j in i + 1..ps.len() {
                for k in j + 1..ps.len() {
                    if ps[i] + ps[k] == 2 * ps[j] {
                        brute += 1;
                    }
                }
            }
        }
        assert_eq!(rep.triple_count, brute);
    }

    #[test]
    fn ap3_transference_pipeline() {
        let rep = chen_ap3_transference(10_000, 5.0).unwrap();
        assert_eq!(rep.w, 30);
        assert!(rep.x_size > 0);
        assert!(arith::is_prime(rep.modulus) && rep.modulus > 5_000);
        assert!(rep.report.ap_count_f > 0.0, "transference count positive");
        assert!(
            rep.direct_triples_in_x > 0,
            "genuine Chen progressions inside the window"
        );
        assert!(rep.report.resum_defect < 1e-9);
        assert!(rep.report.f2_dominated_excess <= 1e-12);
        assert!(rep.c_normalization > 0.0);
    }

    #[test]
    fn flatness_vanishes_on_small_moduli_and_improves_with_t() {
        // R must reach past t, else gamma = 1 everywhere and beta is
        // identically 1 (zero deviation for every t, no trend to see)
        let r = 12u64;
        let n = 50_000u64;
        let mut last = f64::MAX;
        for t in [3.0, 5.0, 7.0] {
            let wt = w_trick(t).unwrap();
            let rep = nu_fourier_flatness(&wt, r, n).unwrap();
            assert!(rep.small_moduli_entries > 0);
            assert_eq!(
                rep.small_moduli_max_w, 0.0,
                "t = {t}: the table must vanish identically on 1 < q <= t"
            );
            assert!(
                rep.max_deviation < last,
                "t = {t}: deviation {} did not improve on {last}",
                rep.max_deviation
            );
            assert!(rep.a0_deviation < 0.2, "mean stays near 1, got {}", rep.a0_deviation);
            last = rep.max_deviation;
        }

        let wt = w_trick(3.0).unwrap();
        assert!(nu_fourier_flatness(&wt, 300, 50_000).is_err(), "R^2 > N");
    }

    #[test]
    fn flatness_a0_matches_beta_mean() {
        let wt = w_trick(5.0).unwrap();
        let r = 11u64;
        let n = 40_000u64;
        let rep = nu_fourier_flatness(&wt, r, n).unwrap();
        let mean = crate::spectra::beta_mean(&wt.form().unwrap(), r, n).unwrap();
        // hat(nu)(0) is the same average beta_mean scans, so the recorded
        // distance from 1 must agree
        assert!(
            (rep.a0_deviation - (mean - 1.0).abs()).abs() < 1e-9,
            "a0 deviation {} vs mean {}",
            rep.a0_deviation,
            mean
        );
    }
}
