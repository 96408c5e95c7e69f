//! Empirical witness searches: windows containing two primes in `n + H` or a
//! prime together with `λ(n + r) = -1`, per-shift tallies of primes `p` with
//! `λ(p + d) = -1` under optional almost-prime side conditions, and the
//! normalized count-shape scan across a grid of window sizes.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::arith::{chunk_ranges, isqrt, sieve_primes, FactorSegment, DEFAULT_SEGMENT_LEN};
use crate::error::{invalid, Result};
use crate::tuples::Tuple;

/// Outcome counts over one window `[N, 2N)`.
#[derive(Clone, Copy, Debug, Default, serde::Serialize)]
pub struct WindowCounts {
    /// n with at least two primes among n + H.
    pub two_prime: u64,
    /// n with at least one prime among n + H and `λ(n + r) = -1`.
    pub prime_plus_lambda: u64,
    /// n realising either outcome.
    pub either: u64,
}

fn validate_hunt(n_start: u64, tuple: &Tuple, shift: i64) -> Result<()> {
    if n_start < 2 {
        return Err(invalid("window start must be >= 2"));
    }
    if !tuple.is_admissible() {
        return Err(invalid(format!("tuple {tuple} is not admissible")));
    }
    if shift == 0 || (shift > 0 && tuple.contains(shift as u64)) {
        return Err(invalid("shift r must be nonzero and outside the tuple"));
    }
    if n_start as i64 + shift < 1 {
        return Err(invalid("n + r would leave the positive integers"));
    }
    Ok(())
}

/// Count both outcomes over `[n_start, 2 n_start)`. With `lpf_floor` set,
/// only n whose tuple product has all prime factors above the floor are
/// counted.
pub fn hunt_window_with_floor(
    n_start: u64,
    tuple: &Tuple,
    shift: i64,
    lpf_floor: Option<f64>,
) -> Result<WindowCounts> {
    validate_hunt(n_start, tuple, shift)?;
    let h_max = tuple.max();
    let end = 2 * n_start;
    let tail = h_max.max(shift.max(0) as u64);
    let base_primes = sieve_primes(isqrt(end + tail))?;
    let chunks = chunk_ranges(n_start, end, DEFAULT_SEGMENT_LEN);
    let partials: Vec<Result<WindowCounts>> = chunks
        .par_iter()
        .map(|&(start, len)| {
            let seg_lo = if shift < 0 { start - shift.unsigned_abs() } else { start };
            let seg_hi = start + len as u64 + tail;
            let seg = FactorSegment::compute_with_primes(seg_lo, (seg_hi - seg_lo) as usize, &base_primes)?;
            let mut counts = WindowCounts::default();
            for n in start..start + len as u64 {
                if let Some(z) = lpf_floor {
                    let pass = tuple.elements().iter().all(|&h| seg.lpf(n + h) as f64 > z);
                    if !pass {
                        continue;
                    }
                }
                let sp = tuple.elements().iter().filter(|&&h| seg.is_prime(n + h)).count();
                let chi = seg.lambda(n.wrapping_add_signed(shift)) == -1;
                let two = sp >= 2;
                let pl = sp >= 1 && chi;
                if two {
                    counts.two_prime += 1;
                }
                if pl {
                    counts.prime_plus_lambda += 1;
                }
                if two || pl {
                    counts.either += 1;
                }
            }
            Ok(counts)
        })
        .collect();

    let mut total = WindowCounts::default();
    for p in partials {
        let p = p?;
        total.two_prime += p.two_prime;
        total.prime_plus_lambda += p.prime_plus_lambda;
        total.either += p.either;
    }
    Ok(total)
}

/// Unrestricted window hunt.
pub fn hunt_window(n_start: u64, tuple: &Tuple, shift: i64) -> Result<WindowCounts> {
    hunt_window_with_floor(n_start, tuple, shift, None)
}

/// Almost-prime side condition: every prime factor of `p + d` must exceed
/// `p^c`. The surviving `Ω(p + d)` values are reported per tally.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct AlmostPrimeCondition {
    pub c_exponent: f64,
}

/// Per-shift tally of primes `p <= n_max` with `λ(p + d) = -1`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ShiftTally {
    pub d: i64,
    pub count: u64,
    /// Ω(p + d) value -> count; populated only under side conditions.
    /// Keys are necessarily odd.
    pub by_omega: BTreeMap<u32, u64>,
}

/// Count, for each shift, the primes `p <= n_max` with `λ(p + d) = -1`,
/// optionally filtered by the almost-prime side condition.
pub fn tally_lambda_shifts(
    n_max: u64,
    shifts: &[i64],
    side: Option<AlmostPrimeCondition>,
) -> Result<Vec<ShiftTally>> {
    if shifts.is_empty() {
        return Err(invalid("shift set must be nonempty"));
    }
    if n_max < 2 {
        return Err(invalid("N must be >= 2"));
    }
    if let Some(c) = side {
        if !(c.c_exponent > 0.0 && c.c_exponent < 0.2) {
            return Err(invalid("c exponent must lie in (0, 0.2)"));
        }
    }
    if shifts.iter().any(|&d| d.unsigned_abs() > 1_000_000) {
        return Err(invalid("|d| limited to 10^6"));
    }
    let neg = shifts.iter().map(|&d| d.min(0).unsigned_abs()).max().unwrap();
    let pos = shifts.iter().map(|&d| d.max(0) as u64).max().unwrap();
    let base_primes = sieve_primes(isqrt(n_max + pos + 1))?;

    let chunks = chunk_ranges(2, n_max + 1, DEFAULT_SEGMENT_LEN);
    let partials: Vec<Result<Vec<ShiftTally>>> = chunks
        .par_iter()
        .map(|&(start, len)| {
            let seg_lo = start.saturating_sub(neg).max(1);
            let seg_hi = start + len as u64 + pos;
            let seg = FactorSegment::compute_with_primes(seg_lo, (seg_hi - seg_lo) as usize, &base_primes)?;
            let mut tallies: Vec<ShiftTally> = shifts
                .iter()
                .map(|&d| ShiftTally { d, count: 0, by_omega: BTreeMap::new() })
                .collect();
            for p in start..start + len as u64 {
                if !seg.is_prime(p) {
                    continue;
                }
                let floor = side.map(|c| (p as f64).powf(c.c_exponent));
                for tally in tallies.iter_mut() {
                    let m = p as i64 + tally.d;
                    if m < 2 {
                        continue;
                    }
                    let m = m as u64;
                    if !seg.contains(m) {
                        continue;
                    }
                    if seg.lambda(m) != -1 {
                        continue;
                    }
                    if let Some(z) = floor {
                        if seg.lpf(m) as f64 <= z {
                            continue;
                        }
                        *tally.by_omega.entry(seg.big_omega(m)).or_insert(0) += 1;
                    }
                    tally.count += 1;
                }
            }
            Ok(tallies)
        })
        .collect();

    let mut total: Vec<ShiftTally> = shifts
        .iter()
        .map(|&d| ShiftTally { d, count: 0, by_omega: BTreeMap::new() })
        .collect();
    for part in partials {
        for (acc, p) in total.iter_mut().zip(part?) {
            acc.count += p.count;
            for (b, c) in p.by_omega {
                *acc.by_omega.entry(b).or_insert(0) += c;
            }
        }
    }
    Ok(total)
}

/// Normalized witness count at one window size.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct ShapePoint {
    pub n_start: u64,
    pub count: u64,
    /// `count * (log N)^k / N`
    pub normalized: f64,
}

/// Scan a grid of window sizes, counting restricted witnesses and
/// normalizing by `N / (log N)^k`. The restriction floor is `R^eta` with
/// `R = N^r_exponent`.
pub fn shape_check(
    tuple: &Tuple,
    n_grid: &[u64],
    shift: i64,
    r_exponent: f64,
    eta: f64,
) -> Result<Vec<ShapePoint>> {
    if n_grid.is_empty() {
        return Err(invalid("window grid must be nonempty"));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("window grid must be strictly increasing"));
    }
    if !(r_exponent > 0.0 && r_exponent <= 0.5) {
        return Err(invalid("R exponent must lie in (0, 0.5]"));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(invalid("eta must lie in (0, 1)"));
    }
    let k = tuple.k() as i32;
    n_grid
        .iter()
        .map(|&n| {
            let z = (n as f64).powf(r_exponent * eta);
            let counts = hunt_window_with_floor(n, tuple, shift, Some(z))?;
            Ok(ShapePoint {
                n_start: n,
                count: counts.either,
                normalized: counts.either as f64 * (n as f64).ln().powi(k) / n as f64,
            })
        })
        .collect()
}

/// Aggregate report emitted by the command-line hunt actions.
#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct WitnessReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuple: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_prime_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime_plus_lambda_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub either_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_d_tallies: Option<Vec<ShiftTally>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape_ratios: Option<Vec<ShapePoint>>,
}

pub const TALLY_CSV_HEADER: &[&str] = &["d", "N", "condition", "b", "count"];

/// CSV rows for a tally run: one row per shift (b empty without side
/// conditions), one row per observed Ω value with them.
pub fn tally_csv_records(n_max: u64, side: Option<AlmostPrimeCondition>, tallies: &[ShiftTally]) -> Vec<Vec<String>> {
    let cond = match side {
        Some(c) => format!("lpf>p^{};omega-odd", c.c_exponent),
        None => String::new(),
    };
    let mut out = Vec::new();
    for t in tallies {
        if t.by_omega.is_empty() {
            out.push(vec![t.d.to_string(), n_max.to_string(), cond.clone(), String::new(), t.count.to_string()]);
        } else {
            for (&b, &c) in &t.by_omega {
                out.push(vec![t.d.to_string(), n_max.to_string(), cond.clone(), b.to_string(), c.to_string()]);
            }
        }
    }
    out
}
