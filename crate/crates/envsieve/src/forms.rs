//! Products of integer linear forms F(n) = prod_j (a_j n + b_j) and their
//! local data: the coprime residue sets X_q, the local densities
//! gamma(q) = |X_q| / q, and the singular series
//! prod_p gamma(p) / (1 - 1/p)^k.
//!
//! gamma is multiplicative over the distinct primes of q, and at a prime it
//! is 1 - (#roots of F mod p)/p, so large moduli never require enumeration.
//! All densities are exact rationals; floats appear only in the singular
//! series product.

use crate::arith;
use crate::{Error, Rat, Result};
use num::BigInt;
use num::One;
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

/// F(n) = prod_j (a_j n + b_j) with every a_j nonzero and no two factors
/// proportional (nonzero discriminant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    forms: Vec<(i64, i64)>,
}

impl LinearSystem {
    pub fn new(forms: Vec<(i64, i64)>) -> Result<Self> {
        if forms.is_empty() {
            return Err(Error::Degenerate("a form needs at least one factor".into()));
        }
        if forms.iter().any(|&(a, _)| a == 0) {
            return Err(Error::Degenerate("every factor needs a nonzero n-coefficient".into()));
        }
        let sys = LinearSystem { forms };
        if sys.discriminant()? == 0 {
            return Err(Error::Degenerate(
                "two factors are proportional (zero discriminant)".into(),
            ));
        }
        Ok(sys)
    }

    /// Number of linear factors.
    pub fn k(&self) -> usize {
        self.forms.len()
    }

    pub fn coefficients(&self) -> &[(i64, i64)] {
        &self.forms
    }

    /// prod_{i<j} (a_i b_j - a_j b_i); the empty product for one factor is 1.
    pub fn discriminant(&self) -> Result<i128> {
        let mut d: i128 = 1;
        for i in 0..self.forms.len() {
            for j in i + 1..self.forms.len() {
                let (ai, bi) = self.forms[i];
                let (aj, bj) = self.forms[j];
                let term = ai as i128 * bj as i128 - aj as i128 * bi as i128;
                d = d.checked_mul(term).ok_or_else(|| {
                    Error::Domain("discriminant overflows 128 bits".into())
                })?;
            }
        }
        Ok(d)
    }

    /// F(n) as an exact integer; errors when a factor or the product
    /// overflows 128 bits.
    pub fn eval(&self, n: i64) -> Result<i128> {
        let mut prod: i128 = 1;
        for &(a, b) in &self.forms {
            let v = a as i128 * n as i128 + b as i128;
            prod = prod
                .checked_mul(v)
                .ok_or_else(|| Error::Domain(format!("F({n}) overflows 128 bits")))?;
        }
        Ok(prod)
    }

    /// The factor values (a_j n + b_j) themselves.
    pub fn factor_values(&self, n: i64) -> Vec<i64> {
        self.forms
            .iter()
            .map(|&(a, b)| a.saturating_mul(n).saturating_add(b))
            .collect()
    }

    /// F(n) mod q without forming F(n); works for any magnitudes.
    pub fn eval_mod(&self, n: u64, q: u64) -> u64 {
        debug_assert!(q >= 1);
        let qi = q as i128;
        let nr = (n % q) as i128;
        let mut prod: i128 = 1 % qi;
        for &(a, b) in &self.forms {
            let v = ((a as i128 % qi) * nr + b as i128 % qi).rem_euclid(qi);
            prod = (prod * v) % qi;
        }
        prod as u64
    }

    /// Residues r mod m with F(r) = 0 (mod m), by direct enumeration.
    pub fn roots_mod(&self, m: u64) -> Vec<u64> {
        (0..m).filter(|&r| self.eval_mod(r, m) == 0).collect()
    }
}

impl fmt::Display for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_factor = |&(a, b): &(i64, i64)| -> String {
            let coef = match a {
                1 => String::new(),
                -1 => "-".into(),
                _ => a.to_string(),
            };
            match b.cmp(&0) {
                std::cmp::Ordering::Equal => format!("{coef}n"),
                std::cmp::Ordering::Greater => format!("{coef}n+{b}"),
                std::cmp::Ordering::Less => format!("{coef}n{b}"),
            }
        };
        if self.forms.len() == 1 {
            write!(f, "{}", one_factor(&self.forms[0]))
        } else {
            for fac in &self.forms {
                let s = one_factor(fac);
                if s == "n" {
                    write!(f, "n")?;
                } else {
                    write!(f, "({s})")?;
                }
            }
            Ok(())
        }
    }
}

fn parse_linear(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::Parse(format!("cannot read linear factor {s:?}"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let npos = t.find('n').ok_or_else(bad)?;
    if t[npos + 1..].contains('n') {
        return Err(bad());
    }
    let coef_part = t[..npos].strip_suffix('*').unwrap_or(&t[..npos]);
    let a: i64 = match coef_part {
        "" | "+" => 1,
        "-" => -1,
        c => c.parse().map_err(|_| bad())?,
    };
    let rest = &t[npos + 1..];
    let b: i64 = if rest.is_empty() {
        0
    } else if rest.starts_with('+') || rest.starts_with('-') {
        rest.parse().map_err(|_| bad())?
    } else {
        return Err(bad());
    };
    Ok((a, b))
}

impl FromStr for LinearSystem {
    type Err = Error;

    /// Accepts a single linear "a*n+b" (the `*` optional) or a juxtaposed
    /// product like "n(n+2)" or "(3n+1)(n+5)"; factors may be separated
    /// with `*`.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut factors = Vec::new();
        let bytes = t.as_bytes();
        let mut i = 0;
        let mut bare = String::new();
        // '*' adjacent to a parenthesis is a factor separator; inside a bare
        // chunk it belongs to the coefficient, as in "3*n+1"
        let flush = |bare: &mut String, factors: &mut Vec<(i64, i64)>| -> Result<()> {
            let piece = bare.trim_matches('*');
            if !piece.is_empty() {
                factors.push(parse_linear(piece)?);
            }
            bare.clear();
            Ok(())
        };
        while i < bytes.len() {
            if bytes[i] == b'(' {
                flush(&mut bare, &mut factors)?;
                let close = t[i..]
                    .find(')')
                    .ok_or_else(|| Error::Parse(format!("unbalanced parenthesis in {s:?}")))?;
                let inner = &t[i + 1..i + close];
                if inner.contains('(') {
                    return Err(Error::Parse(format!("nested parentheses in {s:?}")));
                }
                factors.push(parse_linear(inner)?);
                i += close + 1;
            } else if bytes[i] == b')' {
                return Err(Error::Parse(format!("unbalanced parenthesis in {s:?}")));
            } else {
                bare.push(bytes[i] as char);
                i += 1;
            }
        }
        flush(&mut bare, &mut factors)?;
        if factors.is_empty() {
            return Err(Error::Parse(format!("no linear factor found in {s:?}")));
        }
        LinearSystem::new(factors)
    }
}

/// The coprime residue set X_q = {n in Z_q : gcd(q, F(n)) = 1} and its
/// density gamma(q) = |X_q| / q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalData {
    pub q: u64,
    pub residues: Vec<u64>,
    pub gamma: Rat,
}

const ENUMERATION_LIMIT: u64 = 1_000_000;

/// Direct enumeration of X_q; guarded at q <= 10^6 (use [`gamma_of`] above).
pub fn local_data(f: &LinearSystem, q: u64) -> Result<LocalData> {
    if q == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    if q > ENUMERATION_LIMIT {
        return Err(Error::Budget(format!(
            "direct residue enumeration capped at q <= {ENUMERATION_LIMIT}, got {q}"
        )));
    }
    let residues: Vec<u64> = (0..q)
        .filter(|&n| num::integer::gcd(q, f.eval_mod(n, q)) == 1)
        .collect();
    let gamma = Rat::new(BigInt::from(residues.len()), BigInt::from(q));
    Ok(LocalData { q, residues, gamma })
}

/// Distinct roots of F mod a prime p, counted without enumerating Z_p:
/// each factor with p not dividing a_j contributes the single root
/// -b_j / a_j; a factor with p | a_j and p | b_j kills every residue.
fn prime_root_count(f: &LinearSystem, p: u64) -> Option<u64> {
    let pi = p as i128;
    let mut roots: BTreeSet<u64> = BTreeSet::new();
    for &(a, b) in f.coefficients() {
        let ar = (a as i128).rem_euclid(pi) as u64;
        let br = (b as i128).rem_euclid(pi) as u64;
        if ar != 0 {
            let inv = arith::pow_mod(ar, p - 2, p);
            let root = ((p - br % p) % p) as u128 * inv as u128 % p as u128;
            roots.insert(root as u64);
        } else if br == 0 {
            return None; // p divides both coefficients: F = 0 mod p identically
        }
    }
    Some(roots.len() as u64)
}

/// gamma at a prime: 1 - (#roots of F mod p)/p, exactly.
pub fn gamma_at_prime(f: &LinearSystem, p: u64) -> Rat {
    match prime_root_count(f, p) {
        None => Rat::from(BigInt::from(0)),
        Some(r) => Rat::new(BigInt::from(p - r), BigInt::from(p)),
    }
}

/// gamma(q) for any q >= 1 via multiplicativity over the distinct primes
/// dividing q; gamma(p^j) = gamma(p) because the roots of F mod p decide
/// coprimality to every power of p.
pub fn gamma_of(f: &LinearSystem, q: u64) -> Result<Rat> {
    if q == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    let mut g = Rat::one();
    for &(p, _) in &arith::factor(q).factors {
        g *= gamma_at_prime(f, p);
    }
    Ok(g)
}

/// True when gamma(p) > 0 for every prime. Only p <= k and p | disc can
/// fail: beyond those, gamma(p) = 1 - k/p > 0.
pub fn nondegenerate(f: &LinearSystem) -> Result<bool> {
    let mut suspects: BTreeSet<u64> = arith::sieve_primes(f.k() as u64)?
        .primes
        .into_iter()
        .collect();
    let disc = f.discriminant()?.unsigned_abs();
    let disc64 = u64::try_from(disc)
        .map_err(|_| Error::Domain("discriminant too large to factor".into()))?;
    for &(p, _) in &arith::factor(disc64).factors {
        suspects.insert(p);
    }
    Ok(suspects
        .iter()
        .all(|&p| prime_root_count(f, p).is_some_and(|r| r < p)))
}

/// Truncated singular series prod_{p <= P} gamma(p) / (1 - 1/p)^k with an
/// explicit tail bound.
#[derive(Debug, Clone, Serialize)]
pub struct SingularSeries {
    pub value: f64,
    pub truncation_prime: u64,
    /// Bound on |true value - value|. For p > max(2k, P+(disc)) each factor
    /// satisfies |log(gamma(p)/(1-1/p)^k)| <= k^2/p^2 * 1/(1 - k/p), and by
    /// integral comparison the log tail is below S = k^2 / ((1 - k/P) P),
    /// so the bound is value * (exp(S) - 1).
    pub tail_bound: f64,
}

pub fn singular_series(f: &LinearSystem, truncation_prime: u64) -> Result<SingularSeries> {
    let k = f.k() as u64;
    let disc = f.discriminant()?.unsigned_abs();
    let disc64 = u64::try_from(disc)
        .map_err(|_| Error::Domain("discriminant too large to factor".into()))?;
    let max_disc_prime = arith::factor(disc64)
        .factors
        .iter()
        .map(|&(p, _)| p)
        .max()
        .unwrap_or(1);
    let needed = (2 * k).max(max_disc_prime);
    if truncation_prime < needed {
        return Err(Error::Hypothesis(format!(
            "truncation prime {truncation_prime} below required {needed} \
             (2k and the discriminant's primes)"
        )));
    }
    let table = arith::sieve_primes(truncation_prime)?;
    let kf = k as i32;
    let mut value = 1.0f64;
    for &p in &table.primes {
        let gamma = match prime_root_count(f, p) {
            None => 0.0,
            Some(r) => (p - r) as f64 / p as f64,
        };
        let base = (p - 1) as f64 / p as f64;
        value *= gamma / base.powi(kf);
    }
    let pf = truncation_prime as f64;
    let kk = k as f64;
    let s = kk * kk / ((1.0 - kk / pf) * pf);
    Ok(SingularSeries {
        value,
        truncation_prime,
        tail_bound: value.abs() * (s.exp() - 1.0),
    })
}
