//! Admissible tuples: residue counts, admissibility, singular series,
//! minimal-diameter search, root sets of `∏(n + h_i)` modulo squarefree
//! moduli, and the standard small-tuple catalog.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::arith::{check_budget, factorize, sieve_primes};
use crate::error::{invalid, resource, Error, Result};

/// Largest supported tuple size; keeps root-set enumeration bounded.
pub const MAX_TUPLE_LEN: usize = 64;

/// A strictly increasing set `{h_1 < h_2 < ... < h_k}` of non-negative shifts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tuple {
    elems: Vec<u64>,
}

impl Tuple {
    /// Build from arbitrary order; duplicates are rejected.
    pub fn new(mut elems: Vec<u64>) -> Result<Tuple> {
        if elems.is_empty() {
            return Err(invalid("tuple must have at least one element"));
        }
        if elems.len() > MAX_TUPLE_LEN {
            return Err(invalid(format!("tuple size limited to {MAX_TUPLE_LEN}")));
        }
        elems.sort_unstable();
        if elems.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("tuple elements must be distinct"));
        }
        Ok(Tuple { elems })
    }

    pub fn elements(&self) -> &[u64] {
        &self.elems
    }

    pub fn k(&self) -> u32 {
        self.elems.len() as u32
    }

    pub fn diameter(&self) -> u64 {
        self.elems[self.elems.len() - 1] - self.elems[0]
    }

    pub fn max(&self) -> u64 {
        self.elems[self.elems.len() - 1]
    }

    pub fn contains(&self, h: u64) -> bool {
        self.elems.binary_search(&h).is_ok()
    }

    /// Translate so the smallest element is 0.
    pub fn translated_to_zero(&self) -> Tuple {
        let m = self.elems[0];
        Tuple { elems: self.elems.iter().map(|&h| h - m).collect() }
    }

    /// The mirror image `{max(H) - h}`, sorted ascending.
    pub fn reflected(&self) -> Tuple {
        let m = self.max();
        let mut elems: Vec<u64> = self.elems.iter().map(|&h| m - h).collect();
        elems.reverse();
        Tuple { elems }
    }

    /// Number of distinct residue classes mod `p` occupied by the tuple.
    pub fn residue_count(&self, p: u64) -> u32 {
        debug_assert!(p >= 2);
        if p <= 256 {
            let mut seen = [false; 256];
            let mut count = 0u32;
            for &h in &self.elems {
                let r = (h % p) as usize;
                if !seen[r] {
                    seen[r] = true;
                    count += 1;
                }
            }
            count
        } else {
            self.elems.iter().map(|&h| h % p).collect::<HashSet<_>>().len() as u32
        }
    }

    /// True iff the tuple avoids at least one residue class modulo every
    /// prime. Only primes `p <= k` need checking: beyond that there are more
    /// classes than elements.
    pub fn is_admissible(&self) -> bool {
        let k = self.elems.len() as u64;
        SMALL_PRIMES
            .iter()
            .take_while(|&&p| p <= k)
            .all(|&p| (self.residue_count(p) as u64) < p)
    }
}

const SMALL_PRIMES: &[u64] = &[2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61];

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, h) in self.elems.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{h}")?;
        }
        write!(f, "}}")
    }
}

impl FromStr for Tuple {
    type Err = Error;

    /// Parse the text form `{0,4,6,10,12,16}`; whitespace around entries is
    /// tolerated.
    fn from_str(s: &str) -> Result<Tuple> {
        let t = s.trim();
        let inner = t
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| invalid(format!("tuple `{s}` must be brace-delimited, e.g. {{0,2,6}}")))?;
        let mut elems = Vec::new();
        for part in inner.split(',') {
            let part = part.trim();
            if part.is_empty() {
                return Err(invalid(format!("empty entry in tuple `{s}`")));
            }
            let v: u64 = part
                .parse()
                .map_err(|_| invalid(format!("bad tuple entry `{part}` in `{s}`")))?;
            elems.push(v);
        }
        Tuple::new(elems)
    }
}

impl serde::Serialize for Tuple {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Tuple {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Tuple, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Truncated Euler product for the tuple's local-density constant, with a
/// proven bound on the discarded tail.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct SingularSeriesValue {
    pub value: f64,
    pub relative_error_bound: f64,
    pub truncation_prime: u64,
}

/// Evaluate `∏_p (1 - ν_p/p)(1 - 1/p)^{-k}`.
///
/// Local factors are exact (computed from residue counts) for all primes up
/// to `max(2k, diameter)`; past that every factor uses `ν_p = k`. The
/// truncation point is raised until the tail bound
/// `exp(k(k-1)/P) - 1` meets `target_rel_err`, with a floor of 10^7.
/// Inadmissible tuples evaluate to exactly 0 with zero error.
pub fn singular_series(h: &Tuple, target_rel_err: f64) -> Result<SingularSeriesValue> {
    if !(target_rel_err > 0.0) {
        return Err(invalid("target relative error must be > 0"));
    }
    if !h.is_admissible() {
        return Ok(SingularSeriesValue { value: 0.0, relative_error_bound: 0.0, truncation_prime: 0 });
    }
    let k = h.k() as u64;
    let tail_coeff = (k * (k - 1)) as f64;
    let exact_bound = (2 * k).max(h.diameter());
    let needed = if tail_coeff == 0.0 { 3 } else { (tail_coeff / target_rel_err).ceil() as u64 };
    if needed > 1 << 34 {
        return Err(resource(format!(
            "truncation prime {needed} for target {target_rel_err:e} is out of range"
        )));
    }
    let floor = if k >= 2 { 10_000_000 } else { 3 };
    let truncation = needed.max(floor).max(exact_bound + 1);

    let primes = sieve_primes(truncation)?;
    let kf = k as f64;
    let mut value = 1.0f64;
    for &p in &primes {
        let pf = p as f64;
        let nu = if p <= exact_bound { h.residue_count(p) as f64 } else { kf };
        value *= (1.0 - nu / pf) / (1.0 - 1.0 / pf).powi(k as i32);
    }
    let relative_error_bound = (tail_coeff / truncation as f64).exp_m1();
    Ok(SingularSeriesValue { value, relative_error_bound, truncation_prime: truncation })
}

/// Exhaustive minimal-diameter search over admissible k-tuples.
///
/// Normalizes `h_1 = 0`; all elements are then forced even (otherwise both
/// classes mod 2 are hit). Diameters are scanned upward, so the first hit
/// proves minimality; within a diameter the depth-first order returns the
/// lexicographically least witness.
pub fn min_diameter_search(k: u32) -> Result<(u64, Tuple)> {
    if !(2..=9).contains(&k) {
        return Err(invalid("minimal-diameter search supports 2 <= k <= 9"));
    }
    let odd_primes: Vec<u64> = SMALL_PRIMES
        .iter()
        .copied()
        .skip(1)
        .take_while(|&p| p <= k as u64)
        .collect();

    let mut d = 2u64;
    loop {
        let mut cover = Coverage::new(&odd_primes);
        cover.push(0);
        if cover.push(d) {
            let mut middles = Vec::with_capacity(k as usize - 2);
            if search_middles(k as usize - 2, 2, d, &mut cover, &mut middles) {
                let mut elems = vec![0];
                elems.extend_from_slice(&middles);
                elems.push(d);
                let witness = Tuple::new(elems)?;
                debug_assert!(witness.is_admissible());
                return Ok((d, witness));
            }
        }
        d += 2;
        if d > 1000 {
            return Err(invalid("minimal-diameter search runaway"));
        }
    }
}

/// Residue-coverage state per odd prime; a branch dies once some prime has
/// every class occupied.
struct Coverage {
    primes: Vec<u64>,
    counts: Vec<Vec<u32>>,
    occupied: Vec<u64>,
}

impl Coverage {
    fn new(primes: &[u64]) -> Coverage {
        Coverage {
            primes: primes.to_vec(),
            counts: primes.iter().map(|&p| vec![0u32; p as usize]).collect(),
            occupied: vec![0; primes.len()],
        }
    }

    /// Record an element; false means some prime is now fully covered.
    fn push(&mut self, h: u64) -> bool {
        let mut ok = true;
        for (i, &p) in self.primes.iter().enumerate() {
            let r = (h % p) as usize;
            self.counts[i][r] += 1;
            if self.counts[i][r] == 1 {
                self.occupied[i] += 1;
                if self.occupied[i] == p {
                    ok = false;
                }
            }
        }
        ok
    }

    fn pop(&mut self, h: u64) {
        for (i, &p) in self.primes.iter().enumerate() {
            let r = (h % p) as usize;
            self.counts[i][r] -= 1;
            if self.counts[i][r] == 0 {
                self.occupied[i] -= 1;
            }
        }
    }
}

fn search_middles(
    remaining: usize,
    lo: u64,
    d: u64,
    cover: &mut Coverage,
    acc: &mut Vec<u64>,
) -> bool {
    if remaining == 0 {
        return true;
    }
    let mut e = lo;
    // leave room for the rest of the middles below d
    while e + 2 * remaining as u64 <= d {
        if cover.push(e) {
            acc.push(e);
            if search_middles(remaining - 1, e + 2, d, cover, acc) {
                return true;
            }
            acc.pop();
        }
        cover.pop(e);
        e += 2;
    }
    false
}

/// All residues `a mod d` with `∏(a + h_i) ≡ 0 (mod d)`, for squarefree `d`.
/// Combined from the per-prime root sets by the Chinese remainder theorem;
/// the result is sorted. `d = 1` yields `{0}`.
pub fn roots_mod(h: &Tuple, d: u64) -> Result<Vec<u64>> {
    if d == 0 {
        return Err(invalid("modulus must be >= 1"));
    }
    let factors = factorize(d);
    if factors.iter().any(|&(_, e)| e > 1) {
        return Err(invalid(format!("modulus {d} is not squarefree")));
    }
    let primes: Vec<u64> = factors.into_iter().map(|(p, _)| p).collect();
    roots_mod_factored(h, &primes)
}

/// As [`roots_mod`] with the distinct prime factors already in hand.
pub(crate) fn roots_mod_factored(h: &Tuple, primes: &[u64]) -> Result<Vec<u64>> {
    let mut roots: Vec<u64> = vec![0];
    let mut modulus: u64 = 1;
    for &p in primes {
        let mut local: Vec<u64> = h.elems.iter().map(|&x| (p - x % p) % p).collect();
        local.sort_unstable();
        local.dedup();
        check_budget(roots.len() as u64 * local.len() as u64 * 8, "root-set enumeration")?;
        let m_inv = mod_inverse(modulus % p, p);
        let mut next = Vec::with_capacity(roots.len() * local.len());
        for &a in &roots {
            for &b in &local {
                // x = a (mod modulus), x = b (mod p)
                let diff = (b + p - a % p) % p;
                let t = diff as u128 * m_inv as u128 % p as u128;
                next.push(a + (modulus as u128 * t) as u64);
            }
        }
        modulus *= p;
        roots = next;
    }
    roots.sort_unstable();
    Ok(roots)
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // p prime; Fermat
    debug_assert!(p >= 2 && a % p != 0 || p == 1);
    if p == 1 {
        return 0;
    }
    let mut base = a % p;
    let mut exp = p - 2;
    let mut acc: u64 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc as u128 * base as u128 % p as u128) as u64;
        }
        base = (base as u128 * base as u128 % p as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Parametric tuple families used for generalized twin-type questions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum FamilyKind {
    /// `{0, 2d}`
    GeneralizedPair,
    /// `{0, 6m, 12m}`
    Triple6m,
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<FamilyKind> {
        match s {
            "generalized-pair" => Ok(FamilyKind::GeneralizedPair),
            "triple-6m" => Ok(FamilyKind::Triple6m),
            other => Err(invalid(format!("unknown family kind `{other}`"))),
        }
    }
}

/// Instantiate a family member, normalized to non-negative ascending order.
pub fn family_tuple(kind: FamilyKind, param: i64) -> Result<Tuple> {
    if param == 0 {
        return Err(invalid("family parameter must be nonzero"));
    }
    let m = param.unsigned_abs();
    match kind {
        FamilyKind::GeneralizedPair => Tuple::new(vec![0, 2 * m]),
        FamilyKind::Triple6m => Tuple::new(vec![0, 6 * m, 12 * m]),
    }
}

/// The minimal-diameter catalog tuple for `2 <= k <= 9`.
pub fn catalog_tuple(k: u32) -> Result<Tuple> {
    let elems: &[u64] = match k {
        2 => &[0, 2],
        3 => &[0, 2, 6],
        4 => &[0, 2, 6, 8],
        5 => &[0, 4, 6, 10, 12],
        6 => &[0, 4, 6, 10, 12, 16],
        7 => &[0, 2, 6, 8, 12, 18, 20],
        8 => &[0, 2, 6, 8, 12, 18, 20, 26],
        9 => &[0, 2, 6, 8, 12, 18, 20, 26, 30],
        _ => return Err(invalid("catalog covers 2 <= k <= 9")),
    };
    Tuple::new(elems.to_vec())
}

/// Count of distinct roots of `∏(a + h_i)` mod squarefree `d`; multiplicative
/// over the prime factors.
pub fn root_count(h: &Tuple, d: u64) -> Result<u64> {
    if d == 0 {
        return Err(invalid("modulus must be >= 1"));
    }
    let factors = factorize(d);
    if factors.iter().any(|&(_, e)| e > 1) {
        return Err(invalid(format!("modulus {d} is not squarefree")));
    }
    Ok(factors
        .iter()
        .map(|&(p, _)| h.residue_count(p) as u64)
        .product())
}

/// Lower bound for the singular series of any admissible k-tuple:
/// `∏_{p<=2k} (1/p)(1-1/p)^{-k} · ∏_{2k<p<=P} (1-k/p)(1-1/p)^{-k}`
/// evaluated at the same truncation prime `trunc`.
pub fn singular_series_floor(k: u32, trunc: u64) -> Result<f64> {
    let primes = sieve_primes(trunc)?;
    let kf = k as f64;
    let mut value = 1.0f64;
    for &p in &primes {
        let pf = p as f64;
        let local = if p <= 2 * k as u64 { 1.0 / pf } else { 1.0 - kf / pf };
        value *= local / (1.0 - 1.0 / pf).powi(k as i32);
    }
    Ok(value)
}

impl Tuple {
    /// All positive pairwise differences `h_j - h_i`, sorted, deduplicated.
    pub fn difference_set(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for i in 0..self.elems.len() {
            for j in (i + 1)..self.elems.len() {
                out.push(self.elems[j] - self.elems[i]);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(elems: &[u64]) -> Tuple {
        Tuple::new(elems.to_vec()).unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        let h: Tuple = "{0,4,6,10,12,16}".parse().unwrap();
        assert_eq!(h.elements(), &[0, 4, 6, 10, 12, 16]);
        assert_eq!(h.to_string(), "{0,4,6,10,12,16}");
        let h2: Tuple = "{ 0, 2 }".parse().unwrap();
        assert_eq!(h2.elements(), &[0, 2]);
        assert!("0,2".parse::<Tuple>().is_err());
        assert!("{0,0}".parse::<Tuple>().is_err());
        assert!("{}".parse::<Tuple>().is_err());
    }

    #[test]
    fn residue_counts_by_hand() {
        assert_eq!(t(&[0, 2]).residue_count(2), 1);
        assert_eq!(t(&[0, 2, 6]).residue_count(3), 2);
        assert_eq!(t(&[0, 4, 6, 10, 12, 16]).residue_count(5), 4);
        assert_eq!(t(&[0, 1, 2]).residue_count(2), 2);
    }

    #[test]
    fn admissibility_catalog_cases() {
        assert!(t(&[0, 4, 6, 10, 12, 16]).is_admissible());
        assert!(!t(&[0, 2, 4]).is_admissible()); // covers everything mod 3
        assert!(t(&[0, 2, 6, 8, 12, 18, 20, 26, 30]).is_admissible());
        assert!(t(&[0]).is_admissible());
        assert!(!t(&[0, 1]).is_admissible()); // covers everything mod 2
    }

    #[test]
    fn singular_series_trivial_cases() {
        let one = singular_series(&t(&[0]), 1e-9).unwrap();
        assert_eq!(one.value, 1.0);
        let zero = singular_series(&t(&[0, 2, 4]), 1e-6).unwrap();
        assert_eq!(zero.value, 0.0);
        assert_eq!(zero.relative_error_bound, 0.0);
        let twin = singular_series(&t(&[0, 2]), 1e-6).unwrap();
        // twin constant: 2 * 0.6601618...
        assert!((twin.value - 1.3203236).abs() < 1e-5, "got {}", twin.value);
        assert!(twin.relative_error_bound <= 1e-6);
    }

    #[test]
    fn min_diameter_small_k() {
        let (d2, w2) = min_diameter_search(2).unwrap();
        assert_eq!(d2, 2);
        assert_eq!(w2.elements(), &[0, 2]);
        let (d4, w4) = min_diameter_search(4).unwrap();
        assert_eq!(d4, 8);
        assert_eq!(w4.elements(), &[0, 2, 6, 8]);
        let (d6, w6) = min_diameter_search(6).unwrap();
        assert_eq!(d6, 16);
        assert_eq!(w6.elements(), &[0, 4, 6, 10, 12, 16]);
        assert!(min_diameter_search(1).is_err());
        assert!(min_diameter_search(10).is_err());
    }

    #[test]
    fn roots_mod_examples() {
        assert_eq!(roots_mod(&t(&[0, 2]), 1).unwrap(), vec![0]);
        assert_eq!(roots_mod(&t(&[0, 2]), 2).unwrap(), vec![0]);
        assert_eq!(roots_mod(&t(&[0, 4]), 15).unwrap(), vec![0, 5, 6, 11]);
        assert!(roots_mod(&t(&[0, 2]), 4).is_err());
        // spot check: 5 * 9 = 45 is divisible by 15
        let p_h = |a: u64| (a) * (a + 4);
        assert_eq!(p_h(5) % 15, 0);
        assert_eq!(p_h(6) % 15, 0);
        assert_eq!(p_h(11) % 15, 0);
    }

    #[test]
    fn family_instances() {
        assert_eq!(family_tuple(FamilyKind::GeneralizedPair, 3).unwrap().elements(), &[0, 6]);
        assert_eq!(family_tuple(FamilyKind::Triple6m, 1).unwrap().elements(), &[0, 6, 12]);
        assert_eq!(family_tuple(FamilyKind::GeneralizedPair, -2).unwrap().elements(), &[0, 4]);
        assert!(family_tuple(FamilyKind::Triple6m, 0).is_err());
        for m in 1..=100 {
            assert!(family_tuple(FamilyKind::Triple6m, m).unwrap().is_admissible());
        }
    }

    #[test]
    fn catalog_diameters() {
        let expected = [(2, 2), (3, 6), (4, 8), (5, 12), (6, 16), (7, 20), (8, 26), (9, 30)];
        for (k, d) in expected {
            let h = catalog_tuple(k).unwrap();
            assert_eq!(h.k(), k);
            assert_eq!(h.diameter(), d);
            assert!(h.is_admissible());
        }
    }

    #[test]
    fn generic_factor_beyond_diameter() {
        // For p > diameter and p not dividing any difference, nu_p = k.
        let h = t(&[0, 4, 6, 10, 12, 16]);
        for p in [17u64, 19, 23, 101] {
            assert_eq!(h.residue_count(p), 6);
        }
    }

    #[test]
    fn reflection_and_translation() {
        let h = t(&[0, 2, 6]);
        assert_eq!(h.reflected().elements(), &[0, 4, 6]);
        let shifted = Tuple::new(vec![5, 7, 11]).unwrap();
        assert_eq!(shifted.translated_to_zero().elements(), &[0, 2, 6]);
    }
}
