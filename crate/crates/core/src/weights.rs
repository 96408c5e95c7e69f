//! Truncated divisor-sum weights.
//!
//! `lambda_r` evaluates, for one `n` at a time,
//! `(1/(k+l)!) Σ_{d | P_H(n), d <= R} μ(d) (log R/d)^{k+l}` with
//! `P_H(n) = ∏ (n + h_i)`, by depth-first enumeration of the distinct primes
//! of `P_H(n)` up to `R`. `batch_lambda_r` computes the same values for a
//! whole window by broadcasting each squarefree `d <= R` onto its residue
//! classes. The two routes are independent and are cross-checked in tests.

use crate::arith::{check_budget, sieve_primes, FactorSegment};
use crate::error::{invalid, Result};
use crate::tuples::{roots_mod_factored, Tuple};

/// Largest supported polynomial degree offset in the weight exponent.
pub const MAX_L: u32 = 8;

/// Parameters of the squared two-term weight
/// `a_n = (Λ_R(n; H, 0) + u(k+1)/log R · Λ_R(n; H, 1))^2`.
#[derive(Clone, Debug)]
pub struct WeightParams {
    pub tuple: Tuple,
    pub cutoff_r: f64,
    pub u: f64,
}

impl WeightParams {
    pub fn new(tuple: Tuple, cutoff_r: f64, u: f64) -> Result<WeightParams> {
        if !(cutoff_r > 1.0) {
            return Err(invalid("cutoff R must be > 1"));
        }
        if !u.is_finite() {
            return Err(invalid("u must be finite"));
        }
        Ok(WeightParams { tuple, cutoff_r, u })
    }
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n as u64).map(|i| i as f64).product()
}

/// Per-`n` evaluation of the truncated divisor sum.
///
/// The factored segment must cover every `n + h_i`; its least-prime-factor
/// data short-circuits the common case where no prime `<= R` divides
/// `P_H(n)` and only `d = 1` contributes.
pub fn lambda_r(n: u64, tuple: &Tuple, l: u32, cutoff_r: f64, seg: &FactorSegment) -> Result<f64> {
    if !(cutoff_r > 1.0) {
        return Err(invalid("cutoff R must be > 1"));
    }
    if l > MAX_L {
        return Err(invalid(format!("l limited to {MAX_L}")));
    }
    for &h in tuple.elements() {
        let m = n.checked_add(h).ok_or_else(|| invalid("n + h overflows"))?;
        if !seg.contains(m) {
            return Err(invalid(format!(
                "factorization unavailable for {m}: segment covers [{}, {})",
                seg.start(),
                seg.end()
            )));
        }
    }
    let kl = tuple.k() + l;
    let log_r = cutoff_r.ln();
    let all_large = tuple
        .elements()
        .iter()
        .all(|&h| n + h == 1 || seg.lpf(n + h) as f64 > cutoff_r);
    if all_large {
        return Ok(log_r.powi(kl as i32) / factorial(kl));
    }

    let r_floor = cutoff_r.floor() as u64;
    let mut divisor_primes = collect_tuple_primes(n, tuple, r_floor)?;
    divisor_primes.sort_unstable();
    let mut sum = 0.0f64;
    dfs_divisors(&divisor_primes, 0, 1, 1, cutoff_r, kl as i32, &mut sum);
    Ok(sum / factorial(kl))
}

/// Distinct primes `p <= bound` dividing some `n + h_i`.
fn collect_tuple_primes(n: u64, tuple: &Tuple, bound: u64) -> Result<Vec<u64>> {
    let primes = sieve_primes(bound)?;
    Ok(primes
        .into_iter()
        .filter(|&p| tuple.elements().iter().any(|&h| (n + h) % p == 0))
        .collect())
}

fn dfs_divisors(primes: &[u64], idx: usize, d: u64, sign: i64, cutoff_r: f64, kl: i32, sum: &mut f64) {
    *sum += sign as f64 * (cutoff_r / d as f64).ln().powi(kl);
    for (j, &p) in primes.iter().enumerate().skip(idx) {
        let next = match d.checked_mul(p) {
            Some(v) if v as f64 <= cutoff_r => v,
            _ => break, // primes ascend, so every later product overshoots too
        };
        dfs_divisors(primes, j + 1, next, -sign, cutoff_r, kl, sum);
    }
}

/// The squared two-term combination; non-negative by construction.
pub fn weight_a(n: u64, params: &WeightParams, seg: &FactorSegment) -> Result<f64> {
    let lam0 = lambda_r(n, &params.tuple, 0, params.cutoff_r, seg)?;
    let lam1 = lambda_r(n, &params.tuple, 1, params.cutoff_r, seg)?;
    let coeff = params.u * (params.tuple.k() as f64 + 1.0) / params.cutoff_r.ln();
    let combo = lam0 + coeff * lam1;
    Ok(combo * combo)
}

/// One squarefree modulus with its Möbius sign and root classes.
pub(crate) struct BatchEntry {
    pub d: u64,
    pub mu: i8,
    pub roots: Vec<u64>,
}

/// The full broadcast plan for all squarefree `d <= R`, reusable across
/// window chunks and across values of `l`.
pub(crate) struct BatchPlan {
    pub entries: Vec<BatchEntry>,
    pub cutoff_r: f64,
}

impl BatchPlan {
    pub fn build(tuple: &Tuple, cutoff_r: f64) -> Result<BatchPlan> {
        if !(cutoff_r > 1.0) {
            return Err(invalid("cutoff R must be > 1"));
        }
        let r_floor = cutoff_r.floor() as u64;
        check_budget(r_floor * 4, "squarefree modulus table")?;

        // least prime factor table up to r_floor
        let mut lpf = vec![0u32; (r_floor + 1) as usize];
        for i in 2..=r_floor as usize {
            if lpf[i] == 0 {
                for j in (i..=r_floor as usize).step_by(i) {
                    if lpf[j] == 0 {
                        lpf[j] = i as u32;
                    }
                }
            }
        }

        let mut entries = Vec::new();
        'outer: for d in 1..=r_floor {
            let mut m = d;
            let mut primes = Vec::new();
            while m > 1 {
                let p = lpf[m as usize] as u64;
                m /= p;
                if m % p == 0 {
                    continue 'outer; // not squarefree
                }
                primes.push(p);
            }
            let mu = if primes.len() % 2 == 0 { 1 } else { -1 };
            let roots = roots_mod_factored(tuple, &primes)?;
            entries.push(BatchEntry { d, mu, roots });
        }
        Ok(BatchPlan { entries, cutoff_r })
    }

    /// Add every modulus' contribution for exponent `k + l` onto `out`,
    /// which covers the window `[start, start + out.len())`.
    pub fn accumulate(&self, start: u64, out: &mut [f64], k: u32, l: u32) {
        let kl = k + l;
        let log_r = self.cutoff_r.ln();
        let norm = factorial(kl);
        for e in &self.entries {
            let w = e.mu as f64 * (log_r - (e.d as f64).ln()).powi(kl as i32) / norm;
            let rem = start % e.d;
            for &a in &e.roots {
                let mut idx = ((a + e.d - rem) % e.d) as usize;
                while idx < out.len() {
                    out[idx] += w;
                    idx += e.d as usize;
                }
            }
        }
    }
}

/// Window evaluation of the truncated divisor sum by residue-class
/// broadcast: the `d`-outer route. Returns one value per `n` in
/// `[start, start + len)`.
pub fn batch_lambda_r(start: u64, len: usize, tuple: &Tuple, l: u32, cutoff_r: f64) -> Result<Vec<f64>> {
    if l > MAX_L {
        return Err(invalid(format!("l limited to {MAX_L}")));
    }
    if len == 0 {
        return Err(invalid("window length must be >= 1"));
    }
    check_budget(len as u64 * 8, "batch weight window")?;
    let plan = BatchPlan::build(tuple, cutoff_r)?;
    let mut out = vec![0.0f64; len];
    plan.accumulate(start, &mut out, tuple.k(), l);
    Ok(out)
}
