//! Exact integer polynomials in `q` for the closed-form counts, the
//! recursive lower/upper bounds on `|P_n|`, and the crossover thresholds
//! where the upper bound drops below `|D_n|`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polynomial in `q` with arbitrary-precision integer coefficients, stored
/// densely from degree 0 upward. The zero polynomial has no coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        IntPoly::from_coeffs(vec![c.into()])
    }

    /// The indeterminate `q`.
    pub fn q() -> Self {
        IntPoly::monomial(1, 1)
    }

    pub fn monomial(c: impl Into<BigInt>, deg: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); deg + 1];
        coeffs[deg] = c.into();
        IntPoly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        IntPoly::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Builds from `(coefficient, degree)` terms.
    pub fn from_terms(terms: &[(i64, usize)]) -> Self {
        terms.iter().fold(IntPoly::zero(), |acc, &(c, d)| {
            acc + IntPoly::monomial(c, d)
        })
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `q^d` (zero beyond the degree).
    pub fn coeff(&self, d: usize) -> BigInt {
        self.coeffs.get(d).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn pow(&self, e: u32) -> IntPoly {
        let mut acc = IntPoly::constant(1);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `self(inner(q))`.
    pub fn compose(&self, inner: &IntPoly) -> IntPoly {
        self.coeffs.iter().rev().fold(IntPoly::zero(), |acc, c| {
            &(&acc * inner) + &IntPoly::constant(c.clone())
        })
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_u(&self, x: u64) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// `eval_u` for values known to be nonnegative.
    pub fn eval_count(&self, x: u64) -> BigUint {
        self.eval_u(x)
            .to_biguint()
            .expect("count polynomial evaluated negative")
    }
}

impl Add<&IntPoly> for &IntPoly {
    type Output = IntPoly;

    fn add(self, rhs: &IntPoly) -> IntPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        IntPoly::from_coeffs(coeffs)
    }
}

impl Sub<&IntPoly> for &IntPoly {
    type Output = IntPoly;

    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect();
        IntPoly::from_coeffs(coeffs)
    }
}

impl Mul<&IntPoly> for &IntPoly {
    type Output = IntPoly;

    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        IntPoly::from_coeffs(coeffs)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;

    fn neg(self) -> IntPoly {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<IntPoly> for IntPoly {
            type Output = IntPoly;
            fn $m(self, rhs: IntPoly) -> IntPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&IntPoly> for IntPoly {
            type Output = IntPoly;
            fn $m(self, rhs: &IntPoly) -> IntPoly {
                (&self).$m(rhs)
            }
        }
        impl $tr<IntPoly> for &IntPoly {
            type Output = IntPoly;
            fn $m(self, rhs: IntPoly) -> IntPoly {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag.is_one();
            match d {
                0 => write!(f, "{mag}")?,
                1 if unit => write!(f, "q")?,
                1 => write!(f, "{mag}q")?,
                _ if unit => write!(f, "q^{d}")?,
                _ => write!(f, "{mag}q^{d}")?,
            }
        }
        Ok(())
    }
}

/// Coefficient lists serialise as JSON arrays, low degree first; entries
/// outside the `i64` range become decimal strings.
impl Serialize for IntPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            match c.to_i64() {
                Some(v) => seq.serialize_element(&v)?,
                None => seq.serialize_element(&c.to_string())?,
            }
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Coef {
            Num(i64),
            Text(String),
        }
        let raw = Vec::<Coef>::deserialize(d)?;
        let coeffs = raw
            .into_iter()
            .map(|c| match c {
                Coef::Num(v) => Ok(BigInt::from(v)),
                Coef::Text(t) => t.parse::<BigInt>().map_err(serde::de::Error::custom),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(IntPoly::from_coeffs(coeffs))
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    BigInt::from_biguint(Sign::Plus, acc)
}

fn qpow(d: usize) -> IntPoly {
    IntPoly::monomial(1, d)
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

/// `|D_n| = q^(n^2) - q^(n(n-1)/2) (q^n - 1)(q^(n-1) - 1)...(q - 1)`.
pub fn poly_dn(n: usize) -> IntPoly {
    let one = IntPoly::constant(1);
    let gl = (1..=n).fold(qpow(n * (n - 1) / 2), |acc, i| acc * (qpow(i) - &one));
    qpow(n * n) - gl
}

/// `|P_2| = q^3 + q^2 - q`.
pub fn p2_poly() -> IntPoly {
    IntPoly::from_terms(&[(1, 3), (1, 2), (-1, 1)])
}

/// `|P_3| = |D_3| - q^2 (q-1)^5`, valid in odd characteristic.
pub fn poly_p3() -> IntPoly {
    let q_minus_1 = IntPoly::from_i64s(&[-1, 1]);
    poly_dn(3) - qpow(2) * q_minus_1.pow(5)
}

/// `|V^(r)_k| = q^(2(k-r)) ((q^r - 1) q^(r-1) + q^r)`, and `q^(2k)` at `r = 0`.
pub fn poly_vrk(k: usize, r: usize) -> Result<IntPoly> {
    if r > k {
        return Err(Error::RankOutOfRange { k, r });
    }
    if r == 0 {
        return Ok(qpow(2 * k));
    }
    let inner = (qpow(r) - IntPoly::constant(1)) * qpow(r - 1) + qpow(r);
    Ok(qpow(2 * (k - r)) * inner)
}

fn vrk(k: usize, r: usize) -> IntPoly {
    poly_vrk(k, r).expect("rank within range")
}

// ---------------------------------------------------------------------------
// Bounds
// ---------------------------------------------------------------------------

/// Lower and upper bound polynomials for `|P_n|`, plus the auxiliary upper
/// bounds for `|N^(0)_(n-1)|` and `|N^(1)_(n-1)|` the upper bound was built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundSet {
    pub n: usize,
    pub lower: IntPoly,
    pub upper: IntPoly,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n0: Option<IntPoly>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n1: Option<IntPoly>,
}

/// Bound polynomials for every `n` in `1..=n_max`, built bottom-up.
#[derive(Debug, Clone)]
pub struct BoundTable {
    lower: Vec<IntPoly>,
    upper: Vec<IntPoly>,
    /// `n0[m]` bounds `|N^(0)_m|`, defined for `m >= 2`.
    n0: Vec<Option<IntPoly>>,
    /// `n1[m]` bounds `|N^(1)_m|`, defined for `m >= 3`.
    n1: Vec<Option<IntPoly>>,
}

impl BoundTable {
    pub fn build(n_max: usize) -> BoundTable {
        let n_max = n_max.max(3);
        let mut lower = vec![IntPoly::zero(); n_max + 1];
        let mut upper = vec![IntPoly::zero(); n_max + 1];
        let mut n0 = vec![None; n_max + 1];
        let mut n1 = vec![None; n_max + 1];

        upper[1] = IntPoly::constant(1);
        upper[2] = p2_poly();
        lower[3] = poly_p3();
        upper[3] = poly_p3();
        n0[2] = Some(IntPoly::constant(1));

        for n in 4..=n_max {
            let m = n - 1;

            // N^(0)_(n-1): one term per size of the largest nonzero per-minor.
            let mut b0 = IntPoly::constant(1);
            for k in 1..=n - 3 {
                let s = n - k - 2;
                let c = binomial(m as u64, s as u64);
                let block = qpow(s * s) - &lower[s];
                b0 = b0 + IntPoly::constant(&c * &c) * qpow(2 * s * (k + 1)) * block;
            }

            // N^(1)_(n-1)
            let e = m * m - 1;
            let q_minus_3 = IntPoly::from_i64s(&[-3, 1]);
            let b1 = (qpow(e) - q_minus_3.pow(e as u32))
                + n0[n - 2].as_ref().expect("built earlier") * qpow(2 * (n - 2) + 1)
                + IntPoly::q() * &upper[n - 2] * vrk(n - 2, 1);

            lower[n] = (qpow(m * m) - &upper[m]) * qpow(2 * m);
            upper[n] = (qpow(m * m) - &lower[m]) * qpow(2 * m)
                + IntPoly::q() * &b0 * vrk(m, 0)
                + IntPoly::q() * &b1 * vrk(m, 1)
                + IntPoly::q() * &upper[m] * vrk(m, 2);

            n0[m] = Some(b0);
            n1[m] = Some(b1);
        }
        BoundTable {
            lower,
            upper,
            n0,
            n1,
        }
    }

    pub fn n_max(&self) -> usize {
        self.lower.len() - 1
    }

    pub fn lower(&self, n: usize) -> &IntPoly {
        &self.lower[n]
    }

    pub fn upper(&self, n: usize) -> &IntPoly {
        &self.upper[n]
    }

    /// Bound on `|N^(0)_m|`.
    pub fn n0(&self, m: usize) -> Option<&IntPoly> {
        self.n0.get(m).and_then(Option::as_ref)
    }

    /// Bound on `|N^(1)_m|`.
    pub fn n1(&self, m: usize) -> Option<&IntPoly> {
        self.n1.get(m).and_then(Option::as_ref)
    }

    pub fn bound_set(&self, n: usize) -> BoundSet {
        BoundSet {
            n,
            lower: self.lower[n].clone(),
            upper: self.upper[n].clone(),
            n0: n.checked_sub(1).and_then(|m| self.n0(m)).cloned(),
            n1: n.checked_sub(1).and_then(|m| self.n1(m)).cloned(),
        }
    }
}

/// Bound sets for `4 <= n <= n_max`.
pub fn build_bounds(n_max: usize) -> Result<Vec<BoundSet>> {
    if n_max < 4 {
        return Err(Error::PreconditionViolated(
            "build_bounds needs n_max >= 4".into(),
        ));
    }
    let table = BoundTable::build(n_max);
    Ok((4..=n_max).map(|n| table.bound_set(n)).collect())
}

// ---------------------------------------------------------------------------
// Asymptotic structure
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    /// Lower bound: `q^(n^2-1) - q^(n^2-2) + ...`
    L,
    /// Upper bound: `q^(n^2-1) + 0 q^(n^2-2) + ...`
    U,
    /// `|D_n|`: `q^(n^2-1) + q^(n^2-2) + 0 + 0 + ...`
    D,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AsymptoticReport {
    pub n: usize,
    pub kind: BoundKind,
    pub degree: Option<usize>,
    /// `(degree, expected, actual)` for each checked coefficient.
    pub checks: Vec<(usize, i64, String)>,
    pub pass: bool,
}

pub fn asymptotic_check(p: &IntPoly, n: usize, kind: BoundKind) -> AsymptoticReport {
    let top = n * n - 1;
    let expected: &[i64] = match kind {
        BoundKind::L => &[1, -1],
        BoundKind::U => &[1, 0],
        BoundKind::D => &[1, 1, 0, 0],
    };
    let mut pass = p.degree() == Some(top);
    let mut checks = Vec::new();
    for (t, &e) in expected.iter().enumerate() {
        let Some(d) = top.checked_sub(t) else { break };
        let actual = p.coeff(d);
        pass &= actual == BigInt::from(e);
        checks.push((d, e, actual.to_string()));
    }
    AsymptoticReport {
        n,
        kind,
        degree: p.degree(),
        checks,
        pass,
    }
}

// ---------------------------------------------------------------------------
// Thresholds
// ---------------------------------------------------------------------------

pub fn smallest_prime_factor(m: u64) -> Option<u64> {
    if m < 2 {
        return None;
    }
    if m.is_multiple_of(2) {
        return Some(2);
    }
    let mut d = 3;
    while d * d <= m {
        if m.is_multiple_of(d) {
            return Some(d);
        }
        d += 2;
    }
    Some(m)
}

/// `Some(p)` when `m = p^k` for a prime `p` and `k >= 1`.
pub fn prime_power_base(m: u64) -> Option<u64> {
    let p = smallest_prime_factor(m)?;
    let mut r = m;
    while r.is_multiple_of(p) {
        r /= p;
    }
    (r == 1).then_some(p)
}

/// Least `p^k >= m` with `p` an odd prime.
pub fn next_odd_prime_power(m: u64) -> u64 {
    (m.max(3)..)
        .find(|&c| prime_power_base(c).is_some_and(|p| p != 2))
        .unwrap()
}

/// Least prime power `>= m`, characteristic 2 allowed.
pub fn next_prime_power(m: u64) -> u64 {
    (m.max(2)..)
        .find(|&c| prime_power_base(c).is_some())
        .unwrap()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub n: usize,
    /// Smallest integer `i >= 2` with `U_n(j) < D_n(j)` for every `j >= i`.
    pub i: u64,
    /// Least odd-characteristic prime power `>= i`.
    pub q: u64,
    /// Least prime power of any characteristic `>= i`.
    pub q_any: u64,
    /// Root bound beyond which `D_n - U_n` has no sign change.
    pub scan_bound: u64,
}

/// Upper bound on the positive real roots of `p` (leading coefficient
/// positive): the smaller of the Cauchy bound `1 + max|a_i/a_d|` and the
/// Fujiwara bound `2 max |a_(d-t)/a_d|^(1/t)`, rounded up.
pub fn positive_root_bound(p: &IntPoly) -> u64 {
    let d = p.degree().expect("nonzero polynomial");
    let lead = p.leading().abs();
    let mut cauchy = BigInt::zero();
    let mut fujiwara = 0u64;
    for t in 1..=d {
        let c = p.coeff(d - t).abs();
        if c.is_zero() {
            continue;
        }
        let ratio_ceil = (&c + &lead - 1u32) / &lead;
        if ratio_ceil > cauchy {
            cauchy = ratio_ceil;
        }
        // least x with x^t * lead >= c
        let mut x = integer_root_ceil(&((&c + &lead - 1u32) / &lead), t as u32);
        while BigInt::from(x).pow(t as u32) * &lead < c {
            x += 1;
        }
        fujiwara = fujiwara.max(x);
    }
    let cauchy = (cauchy + 1u32).to_u64().unwrap_or(u64::MAX);
    cauchy.min(fujiwara.saturating_mul(2)).max(1)
}

fn integer_root_ceil(v: &BigInt, t: u32) -> u64 {
    if v.is_zero() {
        return 0;
    }
    let bits = v.bits();
    let approx = 2f64.powf(bits as f64 / t as f64);
    let mut x = (approx as u64).max(1);
    while x > 1 && BigInt::from(x - 1).pow(t) >= *v {
        x -= 1;
    }
    while BigInt::from(x).pow(t) < *v {
        x += 1;
    }
    x
}

/// Smallest `i >= 2` with `diff(j) > 0` for all integers `j >= i`, given a
/// polynomial with positive leading coefficient.
pub fn eventual_positivity(diff: &IntPoly) -> (u64, u64) {
    let bound = positive_root_bound(diff);
    let last_failure = (2..=bound).rev().find(|&j| !diff.eval_u(j).is_positive());
    (last_failure.map_or(2, |j| j + 1), bound)
}

pub fn find_threshold(n: usize) -> Result<ThresholdRow> {
    if !(3..=20).contains(&n) {
        return Err(Error::PreconditionViolated(format!(
            "threshold needs 3 <= n <= 20, got {n}"
        )));
    }
    let table = BoundTable::build(n);
    Ok(threshold_from(n, &table))
}

pub fn threshold_from(n: usize, table: &BoundTable) -> ThresholdRow {
    let diff = poly_dn(n) - table.upper(n);
    let (i, scan_bound) = eventual_positivity(&diff);
    ThresholdRow {
        n,
        i,
        q: next_odd_prime_power(i),
        q_any: next_prime_power(i),
        scan_bound,
    }
}

/// Threshold rows for `n_min..=n_max`, sharing one bound table.
pub fn threshold_table(n_min: usize, n_max: usize) -> Result<Vec<ThresholdRow>> {
    if !(3 <= n_min && n_min <= n_max && n_max <= 20) {
        return Err(Error::PreconditionViolated(format!(
            "threshold range {n_min}..={n_max} outside 3..=20"
        )));
    }
    let table = BoundTable::build(n_max);
    Ok((n_min..=n_max).map(|n| threshold_from(n, &table)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn arithmetic_basics() {
        let a = IntPoly::from_i64s(&[1, 1]); // q + 1
        let b = IntPoly::from_i64s(&[-1, 1]); // q - 1
        assert_eq!(&a * &b, IntPoly::from_i64s(&[-1, 0, 1]));
        assert_eq!(&a - &a, IntPoly::zero());
        assert_eq!((&a - &a).degree(), None);
        assert_eq!(a.pow(3), IntPoly::from_i64s(&[1, 3, 3, 1]));
        assert_eq!(a.compose(&b), IntPoly::q());
        assert_eq!(a.pow(3).eval(&big(2)), big(27));
        assert_eq!((-&b).eval_u(5), big(-4));
        assert_eq!(
            IntPoly::from_terms(&[(1, 3), (-2, 1), (5, 0)]).to_string(),
            "q^3 - 2q + 5"
        );
        assert_eq!(IntPoly::from_terms(&[(-1, 2)]).to_string(), "-q^2");
    }

    #[test]
    fn dn_examples() {
        assert_eq!(poly_dn(1), IntPoly::constant(1));
        assert_eq!(poly_dn(3).eval_u(3), big(8451));
        let d3 = poly_dn(3);
        assert_eq!(d3.degree(), Some(8));
        assert_eq!(d3.leading(), big(1));
        assert_eq!(poly_dn(2), p2_poly());
    }

    #[test]
    fn p3_examples() {
        let p3 = poly_p3();
        assert_eq!(p3.eval_u(3), big(8163));
        assert_eq!(p3.eval_u(5), poly_dn(3).eval_u(5) - big(25 * 1024));
        for q in 2..200u64 {
            assert!(p3.eval_u(q) < poly_dn(3).eval_u(q));
        }
    }

    #[test]
    fn vrk_examples() {
        assert_eq!(poly_vrk(2, 0).unwrap(), IntPoly::monomial(1, 4));
        assert_eq!(poly_vrk(2, 1).unwrap().eval_u(3), big(45));
        assert_eq!(poly_vrk(2, 2).unwrap().eval_u(3), big(33));
        assert_eq!(poly_vrk(2, 3), Err(Error::RankOutOfRange { k: 2, r: 3 }));
    }

    #[test]
    fn l4_and_u4_expansions() {
        let t = BoundTable::build(4);
        let l4 = IntPoly::from_terms(&[
            (1, 15),
            (-1, 14),
            (-5, 12),
            (11, 11),
            (-9, 10),
            (4, 9),
            (-1, 8),
        ]);
        let u4 = IntPoly::from_terms(&[
            (1, 15),
            (53, 13),
            (-520, 12),
            (3276, 11),
            (-12864, 10),
            (32905, 9),
            (-54445, 8),
            (55410, 7),
            (-30619, 6),
            (6561, 5),
        ]);
        assert_eq!(t.lower(4), &l4);
        assert_eq!(t.upper(4), &u4);
    }

    #[test]
    fn base_cases() {
        let t = BoundTable::build(5);
        assert_eq!(t.n0(2), Some(&IntPoly::constant(1)));
        assert_eq!(t.lower(3), t.upper(3));
        assert_eq!(t.upper(3), &poly_p3());
        assert!(build_bounds(3).is_err());
        assert_eq!(build_bounds(6).unwrap().len(), 3);
    }

    #[test]
    fn leading_terms() {
        let t = BoundTable::build(12);
        for n in 4..=12 {
            assert!(asymptotic_check(t.lower(n), n, BoundKind::L).pass, "L_{n}");
            assert!(asymptotic_check(t.upper(n), n, BoundKind::U).pass, "U_{n}");
            assert!(asymptotic_check(&poly_dn(n), n, BoundKind::D).pass, "D_{n}");
        }
        assert_eq!(poly_dn(4).coeff(14), big(1));
        assert_eq!(t.upper(4).coeff(14), big(0));
        let bad = asymptotic_check(&poly_dn(4), 4, BoundKind::U);
        assert!(!bad.pass);
    }

    #[test]
    fn odd_prime_powers() {
        assert_eq!(next_odd_prime_power(76), 79);
        assert_eq!(next_odd_prime_power(116), 121);
        assert_eq!(next_odd_prime_power(3), 3);
        assert_eq!(next_odd_prime_power(2), 3);
        assert_eq!(next_odd_prime_power(286), 289);
        assert_eq!(next_prime_power(120), 121);
        assert_eq!(next_prime_power(125), 125);
        assert_eq!(next_prime_power(126), 127);
        assert_eq!(prime_power_base(1024), Some(2));
        assert_eq!(prime_power_base(12), None);
    }

    #[test]
    fn root_bound_is_sound_on_known_roots() {
        // (q - 10)(q - 3)(q + 7) has largest positive root 10.
        let p = IntPoly::from_i64s(&[-10, 1])
            * IntPoly::from_i64s(&[-3, 1])
            * IntPoly::from_i64s(&[7, 1]);
        let b = positive_root_bound(&p);
        assert!(b >= 10, "bound {b}");
        assert_eq!(eventual_positivity(&p).0, 11);
    }

    #[test]
    fn threshold_spot_rows() {
        let rows = threshold_table(3, 5).unwrap();
        let got: Vec<(usize, u64, u64)> = rows.iter().map(|r| (r.n, r.i, r.q)).collect();
        assert_eq!(got, vec![(3, 2, 3), (4, 43, 43), (5, 76, 79)]);
        assert!(find_threshold(2).is_err());
        assert!(find_threshold(21).is_err());
    }

    #[test]
    fn serde_coefficients() {
        let p = IntPoly::from_terms(&[(1, 2), (-3, 0)]);
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v, serde_json::json!([-3, 0, 1]));
        let huge = IntPoly::monomial(BigInt::from(10).pow(30), 1);
        let text = serde_json::to_string(&huge).unwrap();
        assert_eq!(serde_json::from_str::<IntPoly>(&text).unwrap(), huge);
    }
}
