//! Exact feasibility analysis for the weighted-average inequality.
//!
//! For a k-tuple at distribution level θ the gain condition reads
//!
//! `m·θ·(2/(k+1) + 6u/(k+2) + 6u²(k+1)/((k+2)(k+3))) > 1 + 2u + 2u²(k+1)/(k+2)`
//!
//! with `m = k` (all components carry primes) or `m = k-1` (one component is
//! reserved for the parity condition). Everything here is done in exact
//! rational arithmetic: the solution set in `u` is a quadratic-surd interval,
//! and the critical level `θ0` is the smaller root of the discriminant
//! polynomial, located by rational bisection. An independent route computes
//! the same `θ0` as the infimum of the right/left ratio over `u`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::tuples::Tuple;

type Rat = BigRational;

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Which side of the inequality counts prime components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Variant {
    /// All k components may carry the primes.
    AllK,
    /// One component is reserved; only k-1 carry primes.
    KMinus1,
}

impl Variant {
    fn multiplier(self, k: u32) -> i64 {
        match self {
            Variant::AllK => k as i64,
            Variant::KMinus1 => k as i64 - 1,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::AllK => write!(f, "all-k"),
            Variant::KMinus1 => write!(f, "k-minus-1"),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Variant> {
        match s {
            "all-k" => Ok(Variant::AllK),
            "k-minus-1" => Ok(Variant::KMinus1),
            other => Err(invalid(format!("unknown variant `{other}`"))),
        }
    }
}

/// An exact value `rational + coeff * sqrt(radicand)` with rational parts.
/// Perfect-square radicands collapse to the rational form on construction.
#[derive(Clone, Debug)]
pub struct SurdValue {
    rational: Rat,
    coeff: Rat,
    radicand: Rat,
}

impl SurdValue {
    pub fn from_rational(r: Rat) -> SurdValue {
        SurdValue { rational: r, coeff: Rat::zero(), radicand: Rat::zero() }
    }

    fn new(rational: Rat, coeff: Rat, radicand: Rat) -> SurdValue {
        assert!(!radicand.is_negative(), "radicand must be non-negative");
        if coeff.is_zero() || radicand.is_zero() {
            return SurdValue::from_rational(rational);
        }
        if let Some(root) = exact_sqrt(&radicand) {
            return SurdValue::from_rational(rational + coeff * root);
        }
        SurdValue { rational, coeff, radicand }
    }

    pub fn is_rational(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        self.is_rational().then_some(&self.rational)
    }

    pub fn to_f64(&self) -> f64 {
        self.rational.to_f64().unwrap_or(f64::NAN)
            + self.coeff.to_f64().unwrap_or(f64::NAN)
                * self.radicand.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    /// Exact comparison; defined when the irrational parts share a radicand
    /// (or either side is rational).
    pub fn partial_cmp_exact(&self, other: &SurdValue) -> Option<Ordering> {
        if !self.coeff.is_zero() && !other.coeff.is_zero() && self.radicand != other.radicand {
            return None;
        }
        let radicand = if self.coeff.is_zero() { &other.radicand } else { &self.radicand };
        // self - other = A + B*sqrt(D); compare against 0
        let a = &self.rational - &other.rational;
        let b = &self.coeff - &other.coeff;
        Some(sign_of_surd(&a, &b, radicand))
    }

    pub fn cmp_rational(&self, x: &Rat) -> Ordering {
        let a = &self.rational - x;
        sign_of_surd(&a, &self.coeff, &self.radicand)
    }
}

/// Ordering of `A + B*sqrt(D)` against zero, exactly.
fn sign_of_surd(a: &Rat, b: &Rat, d: &Rat) -> Ordering {
    if b.is_zero() || d.is_zero() {
        return a.cmp(&Rat::zero());
    }
    if a.is_zero() {
        return b.cmp(&Rat::zero());
    }
    let a_neg = a.is_negative();
    let b_neg = b.is_negative();
    if a_neg != b_neg {
        // opposite signs: compare |A|^2 with B^2 D
        let lhs = a * a;
        let rhs = b * b * d;
        let abs_cmp = lhs.cmp(&rhs);
        return if a_neg {
            // negative rational part dominates iff |A|^2 > B^2 D
            match abs_cmp {
                Ordering::Greater => Ordering::Less,
                Ordering::Less => Ordering::Greater,
                Ordering::Equal => Ordering::Equal,
            }
        } else {
            abs_cmp
        };
    }
    // same sign: the whole expression carries that sign
    if a_neg {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

fn exact_sqrt(x: &Rat) -> Option<Rat> {
    let n = x.numer();
    let d = x.denom();
    if n.is_negative() {
        return None;
    }
    let ns = n.sqrt();
    let ds = d.sqrt();
    (&ns * &ns == *n && &ds * &ds == *d).then(|| Rat::new(ns, ds))
}

impl fmt::Display for SurdValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.rational)
        } else {
            write!(f, "{}{:+}*sqrt({})", self.rational, self.coeff, self.radicand)
        }
    }
}

/// Solution set of a strict quadratic inequality in `u`; open at every
/// endpoint.
#[derive(Clone, Debug)]
pub enum UInterval {
    Empty,
    All,
    /// `(x, +inf)`
    Above(SurdValue),
    /// `(-inf, x)`
    Below(SurdValue),
    /// `(x, y)`
    Between(SurdValue, SurdValue),
    /// `(-inf, x) ∪ (y, +inf)`
    Outside(SurdValue, SurdValue),
}

impl UInterval {
    pub fn is_empty(&self) -> bool {
        matches!(self, UInterval::Empty)
    }

    /// Exact membership test for a rational point.
    pub fn contains_rational(&self, x: &Rat) -> bool {
        match self {
            UInterval::Empty => false,
            UInterval::All => true,
            UInterval::Above(lo) => lo.cmp_rational(x) == Ordering::Less,
            UInterval::Below(hi) => hi.cmp_rational(x) == Ordering::Greater,
            UInterval::Between(lo, hi) => {
                lo.cmp_rational(x) == Ordering::Less && hi.cmp_rational(x) == Ordering::Greater
            }
            UInterval::Outside(lo, hi) => {
                lo.cmp_rational(x) == Ordering::Greater || hi.cmp_rational(x) == Ordering::Less
            }
        }
    }
}

impl fmt::Display for UInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UInterval::Empty => write!(f, "(empty)"),
            UInterval::All => write!(f, "(-inf, +inf)"),
            UInterval::Above(x) => write!(f, "({x}, +inf)"),
            UInterval::Below(x) => write!(f, "(-inf, {x})"),
            UInterval::Between(x, y) => write!(f, "({x}, {y})"),
            UInterval::Outside(x, y) => write!(f, "(-inf, {x}) u ({y}, +inf)"),
        }
    }
}

/// Coefficients `(a, b, c)` of the gain polynomial
/// `Q(u) = m·θ·L(u) - R(u)` as a quadratic in `u`.
fn gain_quadratic(k: u32, theta: &Rat, variant: Variant) -> (Rat, Rat, Rat) {
    let ki = k as i64;
    let m = rat_int(variant.multiplier(k)) * theta;
    let a = &m * rat(6 * (ki + 1), (ki + 2) * (ki + 3)) - rat(2 * (ki + 1), ki + 2);
    let b = &m * rat(6, ki + 2) - rat_int(2);
    let c = &m * rat(2, ki + 1) - rat_int(1);
    (a, b, c)
}

fn validate_k(k: u32, variant: Variant) -> Result<()> {
    let min_k = match variant {
        Variant::AllK => 2,
        Variant::KMinus1 => 3,
    };
    if k < min_k {
        return Err(invalid(format!("variant {variant} requires k >= {min_k}")));
    }
    if k > 64 {
        return Err(invalid("k limited to 64"));
    }
    Ok(())
}

/// Exact solution set in `u` of the strict gain inequality at level `theta`.
pub fn feasible_u_range(k: u32, theta: &Rat, variant: Variant) -> Result<UInterval> {
    validate_k(k, variant)?;
    if !(theta > &Rat::zero() && theta <= &Rat::from(BigInt::from(1))) {
        return Err(invalid("theta must lie in (0, 1]"));
    }
    let (a, b, c) = gain_quadratic(k, theta, variant);
    Ok(solve_strict_quadratic(&a, &b, &c))
}

/// `{u : a u² + b u + c > 0}` with exact endpoints.
fn solve_strict_quadratic(a: &Rat, b: &Rat, c: &Rat) -> UInterval {
    if a.is_zero() {
        return if b.is_zero() {
            if c > &Rat::zero() {
                UInterval::All
            } else {
                UInterval::Empty
            }
        } else {
            let root = SurdValue::from_rational(-c / b);
            if b > &Rat::zero() {
                UInterval::Above(root)
            } else {
                UInterval::Below(root)
            }
        };
    }
    let disc = b * b - rat_int(4) * a * c;
    let two_a = rat_int(2) * a;
    match disc.cmp(&Rat::zero()) {
        Ordering::Less => {
            if a > &Rat::zero() {
                UInterval::All
            } else {
                UInterval::Empty
            }
        }
        Ordering::Equal => {
            if a > &Rat::zero() {
                let root = SurdValue::from_rational(-b / &two_a);
                UInterval::Outside(root.clone(), root)
            } else {
                UInterval::Empty
            }
        }
        Ordering::Greater => {
            let base = -b / &two_a;
            let x = SurdValue::new(base.clone(), -(Rat::from(BigInt::from(1)) / &two_a), disc.clone());
            let y = SurdValue::new(base, Rat::from(BigInt::from(1)) / &two_a, disc);
            let (lo, hi) = match x.partial_cmp_exact(&y).expect("shared radicand") {
                Ordering::Greater => (y, x),
                _ => (x, y),
            };
            if a > &Rat::zero() {
                UInterval::Outside(lo, hi)
            } else {
                UInterval::Between(lo, hi)
            }
        }
    }
}

/// The discriminant of the gain quadratic as a polynomial
/// `α θ² + β θ + γ` in the level θ, exact.
pub fn theta_discriminant_poly(k: u32, variant: Variant) -> (Rat, Rat, Rat) {
    let ki = k as i64;
    let m = variant.multiplier(k);
    // a(θ) = a1 θ + a0, b(θ) = b1 θ + b0, c(θ) = c1 θ + c0
    let a1 = rat(6 * m * (ki + 1), (ki + 2) * (ki + 3));
    let a0 = rat(-2 * (ki + 1), ki + 2);
    let b1 = rat(6 * m, ki + 2);
    let b0 = rat_int(-2);
    let c1 = rat(2 * m, ki + 1);
    let c0 = rat_int(-1);
    let alpha = &b1 * &b1 - rat_int(4) * &a1 * &c1;
    let beta = rat_int(2) * &b1 * &b0 - rat_int(4) * (&a1 * &c0 + &a0 * &c1);
    let gamma = &b0 * &b0 - rat_int(4) * &a0 * &c0;
    (alpha, beta, gamma)
}

/// The critical level: the smaller root of the θ-discriminant, located by
/// bisection on the exact polynomial to below 1e-13.
pub fn theta_threshold(k: u32, variant: Variant) -> Result<f64> {
    validate_k(k, variant)?;
    let (alpha, beta, gamma) = theta_discriminant_poly(k, variant);
    debug_assert!(alpha.is_negative());
    let eval = |theta: &Rat| -> Ordering {
        (&alpha * theta * theta + &beta * theta + &gamma).cmp(&Rat::zero())
    };
    // downward parabola: negative at 0, maximal at the vertex
    let vertex = -&beta / (rat_int(2) * &alpha);
    if eval(&Rat::zero()) != Ordering::Less || eval(&vertex) != Ordering::Greater {
        return Err(invalid(format!("no positive discriminant region for k = {k}, {variant}")));
    }
    let mut lo = Rat::zero();
    let mut hi = vertex;
    for _ in 0..60 {
        let mid = (&lo + &hi) / rat_int(2);
        match eval(&mid) {
            Ordering::Less => lo = mid,
            _ => hi = mid,
        }
    }
    Ok(((&lo + &hi) / rat_int(2)).to_f64().unwrap())
}

/// Independent route to the same critical level: minimize
/// `R(u) / (m L(u))` over `u` by solving for the stationary points of the
/// ratio exactly and evaluating.
pub fn theta_by_ratio_minimization(k: u32, variant: Variant) -> Result<f64> {
    validate_k(k, variant)?;
    let kf = k as f64;
    let m = variant.multiplier(k) as f64;
    let r2 = 2.0 * (kf + 1.0) / (kf + 2.0);
    let r1 = 2.0;
    let r0 = 1.0;
    let l2 = 6.0 * (kf + 1.0) / ((kf + 2.0) * (kf + 3.0));
    let l1 = 6.0 / (kf + 2.0);
    let l0 = 2.0 / (kf + 1.0);
    // stationary points: R'L - RL' = 0, a quadratic (cubic terms cancel)
    let g2 = r2 * l1 - r1 * l2;
    let g1 = 2.0 * (r2 * l0 - r0 * l2);
    let g0 = r1 * l0 - r0 * l1;
    let disc = g1 * g1 - 4.0 * g2 * g0;
    if disc < 0.0 {
        return Err(invalid("ratio has no stationary points"));
    }
    let s = disc.sqrt();
    let ratio = |u: f64| (r2 * u * u + r1 * u + r0) / (m * (l2 * u * u + l1 * u + l0));
    let u_a = (-g1 - s) / (2.0 * g2);
    let u_b = (-g1 + s) / (2.0 * g2);
    Ok(ratio(u_a).min(ratio(u_b)))
}

/// Rule for extracting a shift bound from a tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CorollaryRule {
    /// max(diameter, max_i |r - h_i|), minimized over allowed interior r.
    C3,
    /// min over allowed r of max_i |r - h_i|.
    C4,
    /// The diameter itself (one component reserved, shifts within the tuple).
    C5,
    /// min over elements h_j of max_i |h_j - h_i|.
    C6,
}

impl FromStr for CorollaryRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<CorollaryRule> {
        match s {
            "C3" | "c3" => Ok(CorollaryRule::C3),
            "C4" | "c4" => Ok(CorollaryRule::C4),
            "C5" | "c5" => Ok(CorollaryRule::C5),
            "C6" | "c6" => Ok(CorollaryRule::C6),
            other => Err(invalid(format!("unknown corollary rule `{other}`"))),
        }
    }
}

/// Which auxiliary shifts r may be used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum RParity {
    Even,
    Any,
}

impl RParity {
    fn allows(self, r: i64) -> bool {
        match self {
            RParity::Even => r % 2 == 0,
            RParity::Any => true,
        }
    }
}

/// Derive one corollary constant from a tuple; returns `(bound, witness)`
/// where the witness is the chosen shift r (C3, C4) or element h_j (C5, C6).
pub fn corollary_constant(rule: CorollaryRule, h: &Tuple, parity: RParity) -> Result<(u64, i64)> {
    if !h.is_admissible() {
        return Err(invalid("tuple must be admissible"));
    }
    let elems: Vec<i64> = h.elements().iter().map(|&x| x as i64).collect();
    let lo = elems[0];
    let hi = elems[elems.len() - 1];
    let diameter = (hi - lo) as u64;
    let max_dist = |r: i64| -> u64 { elems.iter().map(|&x| r.abs_diff(x)).max().unwrap() };
    let allowed = |r: i64| -> bool { r != 0 && !elems.contains(&r) && parity.allows(r) };

    match rule {
        CorollaryRule::C3 => {
            // any allowed interior r realises the diameter; the witness is the
            // most central one
            let best = (lo + 1..hi)
                .filter(|&r| allowed(r))
                .min_by_key(|&r| (max_dist(r), (2 * r - lo - hi).abs(), r));
            match best {
                Some(r) => Ok((diameter.max(max_dist(r)), r)),
                None => Err(invalid("no allowed interior shift r exists")),
            }
        }
        CorollaryRule::C4 => {
            let best = (lo - hi..=2 * hi - lo)
                .filter(|&r| allowed(r))
                .min_by_key(|&r| (max_dist(r), (2 * r - lo - hi).abs(), r));
            match best {
                Some(r) => Ok((max_dist(r), r)),
                None => Err(invalid("no allowed shift r exists")),
            }
        }
        CorollaryRule::C5 => Ok((diameter, hi)),
        CorollaryRule::C6 => {
            let j = elems
                .iter()
                .copied()
                .min_by_key(|&x| (max_dist(x), x))
                .unwrap();
            Ok((max_dist(j), j))
        }
    }
}

/// One row of the derived-constants table.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ConstantRow {
    pub constant: String,
    pub k: u32,
    pub variant: String,
    pub derived_value: String,
    pub paper_value: String,
    pub witness: String,
}

/// Published levels for the threshold families.
pub fn reference_theta(k: u32, variant: Variant) -> Option<(i64, i64)> {
    let v = match variant {
        Variant::AllK => match k {
            2 => (729, 1000),
            3 => (616, 1000),
            4 => (554, 1000),
            5 => (515, 1000),
            6 => (1, 2),
            _ => return None,
        },
        Variant::KMinus1 => match k {
            3 => (924, 1000),
            4 => (739, 1000),
            5 => (643, 1000),
            6 => (584, 1000),
            7 => (544, 1000),
            8 => (516, 1000),
            9 => (1, 2),
            _ => return None,
        },
    };
    Some(v)
}

/// The full C1-C6 comparison table.
pub fn constants_table() -> Result<Vec<ConstantRow>> {
    use crate::tuples::catalog_tuple;
    let mut rows = Vec::new();
    let fmt12 = crate::report::real12;

    for k in 2..=6 {
        let (pn, pd) = reference_theta(k, Variant::AllK).unwrap();
        let root = theta_threshold(k, Variant::AllK)?;
        let interval = feasible_u_range(k, &rat(pn, pd), Variant::AllK)?;
        rows.push(ConstantRow {
            constant: "C1".into(),
            k,
            variant: Variant::AllK.to_string(),
            derived_value: fmt12(root),
            paper_value: format!("{}", pn as f64 / pd as f64),
            witness: interval.to_string(),
        });
    }
    for k in 3..=9 {
        let (pn, pd) = reference_theta(k, Variant::KMinus1).unwrap();
        let root = theta_threshold(k, Variant::KMinus1)?;
        let interval = feasible_u_range(k, &rat(pn, pd), Variant::KMinus1)?;
        rows.push(ConstantRow {
            constant: "C2".into(),
            k,
            variant: Variant::KMinus1.to_string(),
            derived_value: fmt12(root),
            paper_value: format!("{}", pn as f64 / pd as f64),
            witness: interval.to_string(),
        });
    }
    let c3_paper = [2u64, 6, 8, 12];
    let c4_paper = [1u64, 3, 4, 7];
    for (i, k) in (2..=5).enumerate() {
        let h = catalog_tuple(k)?;
        let parity = if k == 2 { RParity::Any } else { RParity::Even };
        let (bound, witness) = corollary_constant(CorollaryRule::C3, &h, parity)?;
        rows.push(ConstantRow {
            constant: "C3".into(),
            k,
            variant: Variant::AllK.to_string(),
            derived_value: bound.to_string(),
            paper_value: c3_paper[i].to_string(),
            witness: format!("r={witness}"),
        });
        let (bound, witness) = corollary_constant(CorollaryRule::C4, &h, RParity::Any)?;
        rows.push(ConstantRow {
            constant: "C4".into(),
            k,
            variant: Variant::AllK.to_string(),
            derived_value: bound.to_string(),
            paper_value: c4_paper[i].to_string(),
            witness: format!("r={witness}"),
        });
    }
    let c5_paper = [6u64, 8, 12, 16, 20, 26, 30];
    let c6_paper = [4u64, 6, 6, 10, 12, 14, 18];
    for (i, k) in (3..=9).enumerate() {
        let h = catalog_tuple(k)?;
        let (bound, witness) = corollary_constant(CorollaryRule::C5, &h, RParity::Any)?;
        rows.push(ConstantRow {
            constant: "C5".into(),
            k,
            variant: Variant::KMinus1.to_string(),
            derived_value: bound.to_string(),
            paper_value: c5_paper[i].to_string(),
            witness: format!("h_j={witness}"),
        });
        let (bound, witness) = corollary_constant(CorollaryRule::C6, &h, RParity::Any)?;
        rows.push(ConstantRow {
            constant: "C6".into(),
            k,
            variant: Variant::KMinus1.to_string(),
            derived_value: bound.to_string(),
            paper_value: c6_paper[i].to_string(),
            witness: format!("h_j={witness}"),
        });
    }
    Ok(rows)
}

/// Feasibility report for one `(k, θ, variant)` query.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ThresholdReport {
    pub k: u32,
    pub variant: String,
    pub theta: String,
    pub u_interval: String,
    pub u_interval_empty: bool,
    pub theta_root: f64,
    pub paper_constant: Option<f64>,
}

pub fn solve_report(k: u32, theta: &Rat, variant: Variant) -> Result<ThresholdReport> {
    let interval = feasible_u_range(k, theta, variant)?;
    Ok(ThresholdReport {
        k,
        variant: variant.to_string(),
        theta: theta.to_string(),
        u_interval: interval.to_string(),
        u_interval_empty: interval.is_empty(),
        theta_root: theta_threshold(k, variant)?,
        paper_constant: reference_theta(k, variant).map(|(n, d)| n as f64 / d as f64),
    })
}

/// Parse "p/q" or a decimal such as "0.729" into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| invalid(format!("bad rational `{s}`")))?;
        let d: i64 = d.trim().parse().map_err(|_| invalid(format!("bad rational `{s}`")))?;
        if d == 0 {
            return Err(invalid("rational denominator is zero"));
        }
        return Ok(rat(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| invalid(format!("bad rational `{s}`")))? };
        let digits = frac.len() as u32;
        if digits > 15 {
            return Err(invalid("decimal too long; pass p/q instead"));
        }
        let frac_v: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| invalid(format!("bad rational `{s}`")))? };
        let scale = 10i64.pow(digits.max(1));
        return Ok(rat_int(int) + rat(frac_v, scale));
    }
    let n: i64 = s.parse().map_err(|_| invalid(format!("bad rational `{s}`")))?;
    Ok(rat_int(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tuples::catalog_tuple;

    #[test]
    fn flagship_linear_cases() {
        // k = 6, θ = 1/2, all components: the quadratic degenerates and the
        // condition is exactly u > 4/7
        let iv = feasible_u_range(6, &rat(1, 2), Variant::AllK).unwrap();
        match iv {
            UInterval::Above(ref x) => assert_eq!(x.as_rational(), Some(&rat(4, 7))),
            ref other => panic!("expected a ray, got {other}"),
        }
        // k = 9, θ = 1/2, one reserved component: u > 11/10
        let iv = feasible_u_range(9, &rat(1, 2), Variant::KMinus1).unwrap();
        match iv {
            UInterval::Above(ref x) => assert_eq!(x.as_rational(), Some(&rat(11, 10))),
            ref other => panic!("expected a ray, got {other}"),
        }
    }

    #[test]
    fn empty_at_low_level() {
        let iv = feasible_u_range(2, &rat(1, 2), Variant::AllK).unwrap();
        assert!(iv.is_empty());
    }

    #[test]
    fn discriminant_poly_k2_matches_hand_computation() {
        // hand expansion gives -(3/5)θ² + (16/5)θ - 2
        let (alpha, beta, gamma) = theta_discriminant_poly(2, Variant::AllK);
        assert_eq!(alpha, rat(-3, 5));
        assert_eq!(beta, rat(16, 5));
        assert_eq!(gamma, rat(-2, 1));
    }

    #[test]
    fn threshold_roots_known_values() {
        // k = 2: (16 - sqrt(136)) / 6
        let t2 = theta_threshold(2, Variant::AllK).unwrap();
        assert!((t2 - (16.0 - 136.0f64.sqrt()) / 6.0).abs() < 1e-12);
        // k = 5: (35 - sqrt(385)) / 30
        let t5 = theta_threshold(5, Variant::AllK).unwrap();
        assert!((t5 - (35.0 - 385.0f64.sqrt()) / 30.0).abs() < 1e-12);
        // reserved-component root is the all-k root scaled by k/(k-1)
        let t3 = theta_threshold(3, Variant::AllK).unwrap();
        let t3m = theta_threshold(3, Variant::KMinus1).unwrap();
        assert!((t3m - t3 * 1.5).abs() < 1e-12);
    }

    #[test]
    fn ratio_route_agrees() {
        for variant in [Variant::AllK, Variant::KMinus1] {
            for k in 2..=9 {
                if variant == Variant::KMinus1 && k < 3 {
                    continue;
                }
                let a = theta_threshold(k, variant).unwrap();
                let b = theta_by_ratio_minimization(k, variant).unwrap();
                assert!((a - b).abs() <= 1e-9, "k={k} {variant}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn zero_u_is_infeasible_at_moderate_levels() {
        let zero = Rat::zero();
        for k in 2..=9 {
            let iv = feasible_u_range(k, &rat(55, 100), Variant::AllK).unwrap();
            assert!(!iv.contains_rational(&zero), "k={k}");
            let iv = feasible_u_range(k, &rat(1, 2), Variant::AllK).unwrap();
            assert!(!iv.contains_rational(&zero), "k={k}");
        }
    }

    #[test]
    fn vertex_feasible_just_above_threshold() {
        for k in 2..=5 {
            let root = theta_threshold(k, Variant::AllK).unwrap();
            let theta = parse_rational(&format!("{:.9}", root + 1e-4)).unwrap();
            let iv = feasible_u_range(k, &theta, Variant::AllK).unwrap();
            assert!(!iv.is_empty(), "k={k}");
            // the vertex -b/(2a) must lie inside
            let (a, b, _) = gain_quadratic(k, &theta, Variant::AllK);
            let vertex = -&b / (rat_int(2) * &a);
            assert!(iv.contains_rational(&vertex), "k={k}");
        }
    }

    #[test]
    fn corollary_values_spot_checks() {
        let h4 = catalog_tuple(4).unwrap();
        assert_eq!(corollary_constant(CorollaryRule::C3, &h4, RParity::Even).unwrap(), (8, 4));
        let h3 = catalog_tuple(3).unwrap();
        assert_eq!(corollary_constant(CorollaryRule::C5, &h3, RParity::Any).unwrap().0, 6);
        let h8 = catalog_tuple(8).unwrap();
        assert_eq!(corollary_constant(CorollaryRule::C6, &h8, RParity::Any).unwrap(), (14, 12));
        // no interior even shift exists for the twin tuple
        let h2 = catalog_tuple(2).unwrap();
        assert!(corollary_constant(CorollaryRule::C3, &h2, RParity::Even).is_err());
        assert_eq!(corollary_constant(CorollaryRule::C3, &h2, RParity::Any).unwrap(), (2, 1));
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("4/7").unwrap(), rat(4, 7));
        assert_eq!(parse_rational("0.729").unwrap(), rat(729, 1000));
        assert_eq!(parse_rational("1").unwrap(), rat(1, 1));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn surd_ordering() {
        // 1 + sqrt(2) vs 2: 2.414 > 2
        let x = SurdValue::new(rat(1, 1), rat(1, 1), rat(2, 1));
        assert_eq!(x.cmp_rational(&rat(2, 1)), Ordering::Greater);
        assert_eq!(x.cmp_rational(&rat(3, 1)), Ordering::Less);
        // perfect squares collapse
        let y = SurdValue::new(rat(0, 1), rat(1, 1), rat(9, 4));
        assert_eq!(y.as_rational(), Some(&rat(3, 2)));
    }
}
