//! Segmented factorization sieves.
//!
//! Everything downstream consumes the per-integer data produced here: the
//! least prime factor, the number of prime factors counted with multiplicity,
//! the Liouville sign, and a primality flag, over an arbitrary window
//! `[start, start + len)`. Windows larger than memory are handled by the
//! callers streaming fixed-size segments; results are independent of how a
//! window is split.

use crate::error::{invalid, resource, Result};

/// Default window length for streaming segment computations (entries).
pub const DEFAULT_SEGMENT_LEN: usize = 1 << 20;

const DEFAULT_MEMORY_MIB: u64 = 4096;

/// Memory budget in bytes, configurable via the `PARITY_SIEVE_MEMORY_MIB`
/// environment variable.
pub fn memory_budget_bytes() -> u64 {
    std::env::var("PARITY_SIEVE_MEMORY_MIB")
        .ok()
        .and_then(|v| v.parse::<u64>().ok())
        .unwrap_or(DEFAULT_MEMORY_MIB)
        .saturating_mul(1024 * 1024)
}

pub(crate) fn check_budget(bytes: u64, what: &str) -> Result<()> {
    let budget = memory_budget_bytes();
    if bytes > budget {
        return Err(resource(format!(
            "{what} needs ~{bytes} bytes, budget is {budget} (PARITY_SIEVE_MEMORY_MIB)"
        )));
    }
    Ok(())
}

/// Integer square root, exact.
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    // fix up the float estimate
    while x.saturating_mul(x) > n {
        x -= 1;
    }
    while (x + 1).saturating_mul(x + 1) <= n {
        x += 1;
    }
    x
}

/// All primes `<= limit`, ascending. Odd-only bitset sieve of Eratosthenes.
pub fn sieve_primes(limit: u64) -> Result<Vec<u64>> {
    if limit < 2 {
        return Ok(Vec::new());
    }
    let est_count = if limit > 16 {
        (limit as f64 / (limit as f64).ln() * 1.2) as u64
    } else {
        8
    };
    check_budget(limit / 16 + est_count * 8, "prime sieve")?;

    // bit i represents the odd number 2i + 3
    let n_odd = ((limit - 1) / 2) as usize; // count of odd numbers in [3, limit]
    let mut composite = vec![0u64; n_odd / 64 + 1];
    let mut primes = Vec::with_capacity(est_count as usize);
    primes.push(2);
    let mut i = 0usize;
    while i < n_odd {
        if composite[i / 64] >> (i % 64) & 1 == 0 {
            let p = 2 * i as u64 + 3;
            primes.push(p);
            // first multiple worth marking is p^2
            if let Some(psq) = p.checked_mul(p) {
                if psq <= limit {
                    let mut j = ((psq - 3) / 2) as usize;
                    while j < n_odd {
                        composite[j / 64] |= 1 << (j % 64);
                        j += p as usize;
                    }
                }
            }
        }
        i += 1;
    }
    Ok(primes)
}

/// Complete multiplicative data for every integer in `[start, start + len)`.
///
/// For each `n` in the window: the least prime factor, `Ω(n)` (prime factors
/// counted with multiplicity), the Liouville sign `(-1)^Ω(n)`, and primality.
/// `n = 1` is admitted with `lpf = 1`, `Ω = 0`, sign `+1`, not prime; the
/// `is_prime(n) ⇔ lpf(n) = n` identity holds for `n ≥ 2`.
#[derive(Clone)]
pub struct FactorSegment {
    start: u64,
    lpf: Vec<u64>,
    big_omega: Vec<u8>,
    lambda: Vec<i8>,
    prime: Vec<bool>,
}

impl FactorSegment {
    /// Sieve the window, generating the base primes internally.
    pub fn compute(start: u64, len: usize) -> Result<FactorSegment> {
        let end = window_end(start, len)?;
        let base = sieve_primes(isqrt(end - 1))?;
        Self::compute_with_primes(start, len, &base)
    }

    /// Sieve the window using a caller-provided base prime list, which must
    /// cover `sqrt` of the last window element.
    pub fn compute_with_primes(start: u64, len: usize, base_primes: &[u64]) -> Result<FactorSegment> {
        if start < 1 {
            return Err(invalid("factor segment start must be >= 1"));
        }
        let end = window_end(start, len)?;
        let root = isqrt(end - 1);
        if root >= 2 && base_primes.last().copied().unwrap_or(0) < root {
            return Err(invalid(format!(
                "base primes cover up to {}, need {root}",
                base_primes.last().copied().unwrap_or(0)
            )));
        }
        // lpf + rem (u64) + omega (u8) + lambda (i8) + prime (bool)
        check_budget(len as u64 * 19, "factor segment")?;

        let mut lpf = vec![0u64; len];
        let mut big_omega = vec![0u8; len];
        let mut rem: Vec<u64> = (start..end).collect();

        for &p in base_primes {
            if p > root {
                break;
            }
            let first = start.div_ceil(p) * p;
            let mut m = first;
            while m < end {
                let idx = (m - start) as usize;
                while rem[idx] % p == 0 {
                    rem[idx] /= p;
                    big_omega[idx] += 1;
                }
                if lpf[idx] == 0 {
                    lpf[idx] = p;
                }
                m += p;
            }
        }

        let mut lambda = vec![0i8; len];
        let mut prime = vec![false; len];
        for idx in 0..len {
            let n = start + idx as u64;
            if rem[idx] > 1 {
                big_omega[idx] += 1;
                if lpf[idx] == 0 {
                    // no base prime divides n, so n itself is prime
                    lpf[idx] = rem[idx];
                    prime[idx] = true;
                }
            } else if lpf[idx] == 0 {
                // n = 1
                lpf[idx] = 1;
            }
            debug_assert!(n == 1 || lpf[idx] >= 2);
            lambda[idx] = if big_omega[idx] % 2 == 0 { 1 } else { -1 };
        }

        Ok(FactorSegment { start, lpf, big_omega, lambda, prime })
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn len(&self) -> usize {
        self.lpf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lpf.is_empty()
    }

    /// One past the last integer in the window.
    pub fn end(&self) -> u64 {
        self.start + self.lpf.len() as u64
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= self.start && n < self.end()
    }

    #[inline]
    fn idx(&self, n: u64) -> usize {
        debug_assert!(self.contains(n), "n = {n} outside [{}, {})", self.start, self.end());
        (n - self.start) as usize
    }

    /// Least prime factor of `n` (1 for `n = 1`). Panics if `n` is outside
    /// the window.
    #[inline]
    pub fn lpf(&self, n: u64) -> u64 {
        self.lpf[self.idx(n)]
    }

    /// Number of prime factors of `n` counted with multiplicity.
    #[inline]
    pub fn big_omega(&self, n: u64) -> u32 {
        self.big_omega[self.idx(n)] as u32
    }

    /// Liouville sign `(-1)^Ω(n)`, in `{+1, -1}`.
    #[inline]
    pub fn lambda(&self, n: u64) -> i8 {
        self.lambda[self.idx(n)]
    }

    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        self.prime[self.idx(n)]
    }
}

fn window_end(start: u64, len: usize) -> Result<u64> {
    if len == 0 {
        return Err(invalid("window length must be >= 1"));
    }
    start
        .checked_add(len as u64)
        .filter(|&e| e <= i64::MAX as u64)
        .ok_or_else(|| invalid("window exceeds supported integer width"))
}

/// Sieve the window `[start, start + len)`; see [`FactorSegment`].
pub fn factor_segment(start: u64, len: usize) -> Result<FactorSegment> {
    FactorSegment::compute(start, len)
}

/// True iff every prime factor of `n` exceeds `bound`.
pub fn least_prime_factor_exceeds(n: u64, bound: f64) -> Result<bool> {
    if n < 2 {
        return Err(invalid("n must be >= 2"));
    }
    if bound < 1.0 {
        return Err(invalid("bound must be >= 1"));
    }
    Ok(least_prime_factor(n) as f64 > bound)
}

/// Least prime factor by trial division; intended for isolated queries.
pub fn least_prime_factor(n: u64) -> u64 {
    debug_assert!(n >= 2);
    if n % 2 == 0 {
        return 2;
    }
    let mut p = 3;
    while p * p <= n {
        if n % p == 0 {
            return p;
        }
        p += 2;
    }
    n
}

/// Trial-division factorization `n = ∏ p^e`, pairs ascending in `p`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Euler's totient via trial-division factorization.
pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .map(|(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// Split `[start, end)` into consecutive chunks of at most `chunk_len`.
pub fn chunk_ranges(start: u64, end: u64, chunk_len: usize) -> Vec<(u64, usize)> {
    let mut out = Vec::new();
    let mut s = start;
    while s < end {
        let len = ((end - s) as usize).min(chunk_len);
        out.push((s, len));
        s += len as u64;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_prime_lists() {
        assert_eq!(sieve_primes(10).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(sieve_primes(1).unwrap(), Vec::<u64>::new());
        assert_eq!(sieve_primes(2).unwrap(), vec![2]);
        assert_eq!(
            sieve_primes(30).unwrap(),
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
        );
    }

    #[test]
    fn factor_data_by_hand() {
        let seg = factor_segment(2, 60).unwrap();
        // 12 = 2.2.3, 49 = 7.7
        assert_eq!(seg.lpf(12), 2);
        assert_eq!(seg.big_omega(12), 3);
        assert_eq!(seg.lambda(12), -1);
        assert_eq!(seg.lpf(49), 7);
        assert_eq!(seg.big_omega(49), 2);
        assert_eq!(seg.lambda(49), 1);
        assert!(seg.is_prime(53));
        assert!(!seg.is_prime(51)); // 3 * 17
        assert_eq!(seg.lpf(53), 53);
    }

    #[test]
    fn lambda_partial_sums_first_ten() {
        let seg = factor_segment(1, 10).unwrap();
        let mut sums = Vec::new();
        let mut acc = 0i64;
        for n in 1..=10 {
            acc += seg.lambda(n) as i64;
            sums.push(acc);
        }
        assert_eq!(sums, vec![1, 0, -1, 0, -1, 0, -1, -2, -1, 0]);
    }

    #[test]
    fn omega_counts_multiplicity() {
        let seg = factor_segment(2, 100).unwrap();
        assert_eq!(seg.big_omega(8), 3);
        assert_eq!(seg.big_omega(36), 4); // 2.2.3.3
        assert_eq!(seg.big_omega(97), 1);
        for n in 2..seg.end() {
            assert_eq!(seg.big_omega(n) == 1, seg.is_prime(n));
            assert!(seg.big_omega(n) >= 1);
            assert_eq!(seg.is_prime(n), seg.lpf(n) == n);
        }
    }

    #[test]
    fn segment_boundary_independence() {
        let whole = factor_segment(1000, 200).unwrap();
        let left = factor_segment(1000, 87).unwrap();
        let right = factor_segment(1087, 113).unwrap();
        for n in 1000..1200 {
            let part = if n < 1087 { &left } else { &right };
            assert_eq!(whole.lpf(n), part.lpf(n));
            assert_eq!(whole.big_omega(n), part.big_omega(n));
            assert_eq!(whole.lambda(n), part.lambda(n));
            assert_eq!(whole.is_prime(n), part.is_prime(n));
        }
    }

    #[test]
    fn lpf_bound_queries() {
        assert!(least_prime_factor_exceeds(35, 4.0).unwrap());
        assert!(!least_prime_factor_exceeds(35, 5.0).unwrap());
        assert!(least_prime_factor_exceeds(101, 100.0).unwrap());
        assert!(least_prime_factor_exceeds(97, 96.0).unwrap());
        assert!(least_prime_factor_exceeds(1, 1.0).is_err());
    }

    #[test]
    fn factorize_round_trips() {
        for n in 2u64..500 {
            let f = factorize(n);
            let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n);
        }
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
    }

    #[test]
    fn phi_small_values() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(2), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(210), 48);
    }

    #[test]
    fn overflow_guard() {
        assert!(factor_segment(u64::MAX - 10, 100).is_err());
    }
}
