//! Factor and AllFactors by trial division, and the reductions between them
//! that only ever query numbers smaller than their input.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorAnswer {
    Prime,
    /// A nontrivial factor `1 < m < N`.
    Factor(u64),
    /// Every `d` with `1 < d < N` and `d | N`, increasing.
    FactorList(Vec<u64>),
}

impl fmt::Display for FactorAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorAnswer::Prime => f.write_str("prime"),
            FactorAnswer::Factor(m) => write!(f, "{m}"),
            FactorAnswer::FactorList(v) => {
                let s: Vec<String> = v.iter().map(u64::to_string).collect();
                f.write_str(&s.join(" "))
            }
        }
    }
}

fn check_domain(n: u64) -> Result<()> {
    if n < 2 {
        Err(Error::Domain(format!("factoring needs N >= 2, got {n}")))
    } else {
        Ok(())
    }
}

/// Smallest prime factor; `n` itself when prime.
pub fn smallest_prime_factor(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut d = 3;
    while d <= n / d {
        if n.is_multiple_of(d) {
            return d;
        }
        d += 2;
    }
    n
}

/// `Prime`, or the smallest nontrivial factor.
pub fn factor(n: u64) -> Result<FactorAnswer> {
    check_domain(n)?;
    let p = smallest_prime_factor(n);
    Ok(if p == n {
        FactorAnswer::Prime
    } else {
        FactorAnswer::Factor(p)
    })
}

/// `Prime`, or the sorted list of nontrivial divisors.
pub fn all_factors(n: u64) -> Result<FactorAnswer> {
    check_domain(n)?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 2;
    while d <= n / d {
        if n.is_multiple_of(d) {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    if small.is_empty() {
        return Ok(FactorAnswer::Prime);
    }
    small.extend(large.into_iter().rev());
    Ok(FactorAnswer::FactorList(small))
}

/// Every oracle query made by a reduction, in order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleTrace {
    pub queries: Vec<u64>,
}

fn divisors_from_primes(n: u64, primes: &[u64]) -> Vec<u64> {
    let mut divs = vec![1u64];
    let mut i = 0;
    while i < primes.len() {
        let p = primes[i];
        let mut e = 0;
        while i < primes.len() && primes[i] == p {
            e += 1;
            i += 1;
        }
        let base = divs.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            divs.extend(base.iter().map(|d| d * pk));
        }
    }
    divs.retain(|&d| d != 1 && d != n);
    divs.sort_unstable();
    divs
}

/// AllFactors from a Factor oracle on smaller inputs. The smallest prime
/// factor `p` is found directly. `N/p` is then split by oracle calls, each
/// on a proper divisor of `N` (so at most `N/2`), and the divisors are
/// enumerated from the prime factorization. A prime `N` needs no call.
pub fn all_factors_via_factor(
    n: u64,
    oracle: &mut dyn FnMut(u64) -> Result<FactorAnswer>,
    trace: &mut OracleTrace,
) -> Result<FactorAnswer> {
    check_domain(n)?;
    let p = smallest_prime_factor(n);
    if p == n {
        return Ok(FactorAnswer::Prime);
    }
    let mut primes = vec![p];
    let mut stack = vec![n / p];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        trace.queries.push(m);
        match oracle(m)? {
            FactorAnswer::Prime => primes.push(m),
            FactorAnswer::Factor(d) if d > 1 && d < m && m % d == 0 => {
                stack.push(d);
                stack.push(m / d);
            }
            other => {
                return Err(Error::OracleContract(format!(
                    "Factor({m}) answered `{other}`"
                )))
            }
        }
    }
    primes.sort_unstable();
    Ok(FactorAnswer::FactorList(divisors_from_primes(n, &primes)))
}

/// Factor from one AllFactors query on `N/p`, where `p` is the smallest prime
/// factor. The divisors of `N` are those of `N/p` together with `p` times
/// them; the smallest is returned. A prime `N` needs no call.
pub fn factor_via_all_factors(
    n: u64,
    oracle: &mut dyn FnMut(u64) -> Result<FactorAnswer>,
    trace: &mut OracleTrace,
) -> Result<FactorAnswer> {
    check_domain(n)?;
    let p = smallest_prime_factor(n);
    if p == n {
        return Ok(FactorAnswer::Prime);
    }
    let m = n / p;
    let sub: Vec<u64> = if m == 1 {
        Vec::new()
    } else {
        trace.queries.push(m);
        match oracle(m)? {
            FactorAnswer::Prime => Vec::new(),
            FactorAnswer::FactorList(v)
                if v.iter().all(|&d| d > 1 && d < m && m.is_multiple_of(d)) =>
            {
                v
            }
            other => {
                return Err(Error::OracleContract(format!(
                    "AllFactors({m}) answered `{other}`"
                )))
            }
        }
    };
    let mut all: Vec<u64> = std::iter::once(m)
        .chain(sub.iter().copied())
        .flat_map(|d| [d, d * p])
        .chain(std::iter::once(p))
        .filter(|&d| d > 1 && d < n)
        .collect();
    all.sort_unstable();
    all.dedup();
    Ok(FactorAnswer::Factor(all[0]))
}
