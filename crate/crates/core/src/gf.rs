//! Arithmetic in GF(p^k).
//!
//! An element is stored as its packed coefficient index `c_0 + c_1 p + ... +
//! c_{k-1} p^{k-1}`, where `c_0 + c_1 x + ...` is its residue modulo the
//! field's defining polynomial. The encoding is canonical, so `0` and `1`
//! have indices 0 and 1 in every field and element iteration is just
//! counting.
//!
//! Fields with `q <= 256` get full addition and multiplication tables.
//! Larger prime fields use machine arithmetic mod `p`; larger extension
//! fields multiply through discrete log/antilog tables.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

const TABLE_ORDER: u32 = 256;

/// A field element, as a packed coefficient index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fe(u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug, Clone)]
enum Backend {
    Tables { add: Vec<u32>, mul: Vec<u32> },
    Prime,
    Log { exp: Vec<u32>, log: Vec<u32> },
}

/// A finite field GF(p^k), immutable once built.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    backend: Backend,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl FieldCtx {
    /// Builds GF(p^k) using the lexicographically smallest monic irreducible
    /// polynomial of degree `k` (coefficients compared from degree 0 upward).
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::PreconditionViolated(
                "extension degree must be at least 1".into(),
            ));
        }
        let q = (0..k)
            .try_fold(1u64, |acc, _| acc.checked_mul(p))
            .filter(|&q| q <= MAX_ORDER as u64)
            .ok_or(Error::DegreeTooLarge { p, k })? as u32;
        let p = p as u32;

        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            smallest_irreducible(p, k as usize)
        };

        let mut ctx = FieldCtx {
            p,
            k,
            q,
            modulus,
            neg: Vec::new(),
            inv: Vec::new(),
            backend: Backend::Prime,
        };
        if k > 1 {
            ctx.backend = ctx.build_log_tables();
        }
        ctx.neg = (0..q).map(|a| ctx.slow_neg(a)).collect();
        ctx.inv = ctx.build_inverses();
        if q <= TABLE_ORDER {
            let mut add = vec![0u32; (q * q) as usize];
            let mut mul = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    add[(a * q + b) as usize] = ctx.slow_add(a, b);
                    mul[(a * q + b) as usize] = ctx.slow_mul(a, b);
                }
            }
            ctx.backend = Backend::Tables { add, mul };
        }
        Ok(ctx)
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Defining polynomial, coefficients from degree 0 upward. For prime
    /// fields this is the placeholder `x`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p as u64,
            k: self.k,
        }
    }

    /// All `q` elements, zero first.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (0..self.q).map(Fe)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (1..self.q).map(Fe)
    }

    pub fn element(&self, index: u32) -> Option<Fe> {
        (index < self.q).then_some(Fe(index))
    }

    pub fn contains(&self, a: Fe) -> bool {
        a.0 < self.q
    }

    /// Image of an integer under `Z -> GF(p^k)`.
    pub fn from_int(&self, v: i64) -> Fe {
        Fe(v.rem_euclid(self.p as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Fe> {
        if coeffs.len() > self.k as usize {
            return Err(Error::Parse(format!(
                "element has {} coefficients, field degree is {}",
                coeffs.len(),
                self.k
            )));
        }
        let mut idx = 0u32;
        for &c in coeffs.iter().rev() {
            if c >= self.p {
                return Err(Error::Parse(format!(
                    "coefficient {c} is not reduced mod {}",
                    self.p
                )));
            }
            idx = idx * self.p + c;
        }
        Ok(Fe(idx))
    }

    /// Coefficients of `a`, degree 0 first, always of length `k`.
    pub fn coeffs(&self, a: Fe) -> Vec<u32> {
        let mut v = a.0;
        (0..self.k)
            .map(|_| {
                let c = v % self.p;
                v /= self.p;
                c
            })
            .collect()
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        match &self.backend {
            Backend::Tables { add, .. } => Fe(add[(a.0 * self.q + b.0) as usize]),
            _ => Fe(self.slow_add(a.0, b.0)),
        }
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        match &self.backend {
            Backend::Tables { mul, .. } => Fe(mul[(a.0 * self.q + b.0) as usize]),
            Backend::Prime => Fe(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32),
            Backend::Log { exp, log } => {
                if a.0 == 0 || b.0 == 0 {
                    return Fe::ZERO;
                }
                let mut e = log[a.0 as usize] + log[b.0 as usize];
                if e >= self.q - 1 {
                    e -= self.q - 1;
                }
                Fe(exp[e as usize])
            }
        }
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Fe(self.inv[a.0 as usize]))
    }

    /// Inverse of a value already known to be nonzero.
    #[inline]
    pub(crate) fn inv_nonzero(&self, a: Fe) -> Fe {
        debug_assert!(!a.is_zero());
        Fe(self.inv[a.0 as usize])
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `1/2`, absent in characteristic 2.
    pub fn half(&self) -> Option<Fe> {
        (self.p != 2).then(|| self.inv_nonzero(self.from_int(2)))
    }

    /// Formats an element as an integer (prime field) or `(c0,c1,...)`.
    pub fn format(&self, a: Fe) -> String {
        if self.k == 1 {
            a.0.to_string()
        } else {
            let parts: Vec<String> = self.coeffs(a).iter().map(|c| c.to_string()).collect();
            format!("({})", parts.join(","))
        }
    }

    /// Parses an integer literal (reduced into the prime subfield) or a
    /// parenthesised coefficient tuple, lowest degree first.
    pub fn parse_element(&self, s: &str) -> Result<Fe> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let coeffs = inner
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad coefficient {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            return self.from_coeffs(&coeffs);
        }
        let v: i64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad field element {s:?}")))?;
        Ok(self.from_int(v))
    }

    fn slow_add(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.k {
            let c = (a % self.p + b % self.p) % self.p;
            out += c * place;
            place *= self.p;
            a /= self.p;
            b /= self.p;
        }
        out
    }

    fn slow_neg(&self, a: u32) -> u32 {
        let cs: Vec<u32> = self
            .coeffs(Fe(a))
            .into_iter()
            .map(|c| (self.p - c) % self.p)
            .collect();
        self.pack(&cs)
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        match &self.backend {
            Backend::Log { .. } => self.mul(Fe(a), Fe(b)).0,
            _ => ((a as u64 * b as u64) % self.p as u64) as u32,
        }
    }

    fn pack(&self, coeffs: &[u32]) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn poly_mulmod(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let k = self.k as usize;
        let p = self.p as u64;
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        // The modulus is monic: x^k = -(m_0 + ... + m_{k-1} x^{k-1}).
        for d in (k..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (t, &m) in self.modulus[..k].iter().enumerate() {
                let sub = c * m as u64 % p;
                prod[d - k + t] = (prod[d - k + t] + p - sub) % p;
            }
        }
        prod[..k].iter().map(|&c| c as u32).collect()
    }

    fn build_log_tables(&self) -> Backend {
        let order = self.q - 1;
        for g in 2..self.q {
            let gc = self.coeffs(Fe(g));
            let mut exp = vec![0u32; order as usize];
            let mut log = vec![0u32; self.q as usize];
            let mut cur = self.coeffs(Fe::ONE);
            let mut generator = true;
            for e in 0..order {
                let idx = self.pack(&cur);
                if e > 0 && idx == 1 {
                    generator = false;
                    break;
                }
                exp[e as usize] = idx;
                log[idx as usize] = e;
                cur = self.poly_mulmod(&cur, &gc);
            }
            if generator {
                return Backend::Log { exp, log };
            }
        }
        unreachable!("the multiplicative group of a finite field is cyclic")
    }

    fn build_inverses(&self) -> Vec<u32> {
        let mut inv = vec![0u32; self.q as usize];
        match &self.backend {
            Backend::Log { exp, log } => {
                let order = self.q - 1;
                for a in 1..self.q {
                    let l = log[a as usize];
                    inv[a as usize] = exp[((order - l) % order) as usize];
                }
            }
            _ => {
                for a in 1..self.q {
                    inv[a as usize] = mod_inverse(a as i64, self.p as i64) as u32;
                }
            }
        }
        inv
    }
}

fn mod_inverse(a: i64, m: i64) -> i64 {
    let (mut r0, mut r1) = (m, a.rem_euclid(m));
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let qt = r0 / r1;
        (r0, r1) = (r1, r0 - qt * r1);
        (t0, t1) = (t1, t0 - qt * t1);
    }
    t0.rem_euclid(m)
}

/// Remainder of `a` modulo monic `m` over GF(p), coefficients low degree first.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let sub = (lead as u64 * c as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
        r.pop();
    }
    r
}

/// Irreducibility by trial division against every monic polynomial of
/// degree `1..=deg/2`.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    if deg <= 1 {
        return deg == 1;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for t in 0..count {
            let mut div = Vec::with_capacity(d + 1);
            let mut v = t;
            for _ in 0..d {
                div.push((v % p as u64) as u32);
                v /= p as u64;
            }
            div.push(1);
            if poly_rem(poly, &div, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Monic irreducible of degree `k` minimising `(c_0, c_1, ..., c_{k-1})`
/// lexicographically.
fn smallest_irreducible(p: u32, k: usize) -> Vec<u32> {
    let count = (p as u64).pow(k as u32);
    for t in 0..count {
        let mut poly = vec![0u32; k + 1];
        let mut v = t;
        for i in (0..k).rev() {
            poly[i] = (v % p as u64) as u32;
            v /= p as u64;
        }
        poly[k] = 1;
        if is_irreducible(&poly, p) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// A `p` or `p^k` field designation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub k: u32,
}

impl FieldSpec {
    pub fn build(self) -> Result<FieldCtx> {
        FieldCtx::new(self.p, self.k)
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad field spec {s:?}, expected \"p\" or \"p^k\""));
        let (p, k) = match s.trim().split_once('^') {
            Some((p, k)) => (p.trim(), k.trim()),
            None => (s.trim(), "1"),
        };
        Ok(FieldSpec {
            p: p.parse().map_err(|_| bad())?,
            k: k.parse().map_err(|_| bad())?,
        })
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}^{}", self.p, self.k)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_fields() -> Vec<FieldCtx> {
        [
            (2, 1),
            (3, 1),
            (5, 1),
            (7, 1),
            (2, 2),
            (2, 3),
            (3, 2),
            (5, 2),
            (7, 2),
            (2, 5),
        ]
        .into_iter()
        .map(|(p, k)| FieldCtx::new(p, k).unwrap())
        .collect()
    }

    #[test]
    fn prime_field_elements() {
        let f = FieldCtx::new(3, 1).unwrap();
        let els: Vec<u32> = f.elements().map(Fe::index).collect();
        assert_eq!(els, vec![0, 1, 2]);
        assert_eq!(FieldCtx::new(5, 1).unwrap().elements().count(), 5);
    }

    #[test]
    fn composite_rejected() {
        assert_eq!(FieldCtx::new(4, 1), Err(Error::NotPrime(4)));
        assert_eq!(FieldCtx::new(1, 1), Err(Error::NotPrime(1)));
        assert!(matches!(
            FieldCtx::new(2, 17),
            Err(Error::DegreeTooLarge { .. })
        ));
        assert!(matches!(
            FieldCtx::new(65537, 1),
            Err(Error::DegreeTooLarge { .. })
        ));
        assert!(FieldCtx::new(2, 16).is_ok());
    }

    #[test]
    fn gf9_modulus_is_smallest_rootless_quadratic() {
        // Oracle: a monic quadratic over GF(3) is irreducible iff it has no root.
        let mut best: Option<[u32; 2]> = None;
        for c0 in 0..3u32 {
            for c1 in 0..3u32 {
                let rootless = (0..3u32).all(|x| (c0 + c1 * x + x * x) % 3 != 0);
                if rootless && best.is_none_or(|b| [c0, c1] < b) {
                    best = Some([c0, c1]);
                }
            }
        }
        let [c0, c1] = best.unwrap();
        let f = FieldCtx::new(3, 2).unwrap();
        assert_eq!(f.modulus(), &[c0, c1, 1]);
        assert_eq!(f.modulus(), &[1, 0, 1]);

        let pairs: Vec<Vec<u32>> = f.elements().map(|a| f.coeffs(a)).collect();
        assert_eq!(pairs.len(), 9);
        for c1 in 0..3 {
            for c0 in 0..3 {
                assert!(pairs.contains(&vec![c0, c1]));
            }
        }
    }

    #[test]
    fn inverse_in_gf7() {
        let f = FieldCtx::new(7, 1).unwrap();
        let by_scan = (1..7u32).find(|x| 3 * x % 7 == 1).unwrap();
        assert_eq!(by_scan, 5);
        assert_eq!(f.inv(f.from_int(3)), Ok(f.from_int(5)));
        assert_eq!(f.inv(Fe::ZERO), Err(Error::DivisionByZero));
    }

    #[test]
    fn characteristic_two() {
        let f = FieldCtx::new(2, 1).unwrap();
        assert_eq!(f.add(Fe::ONE, Fe::ONE), Fe::ZERO);
        assert_eq!(f.half(), None);
        assert!(FieldCtx::new(3, 1).unwrap().half().is_some());
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in small_fields() {
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE, "q={}", f.q());
                }
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_is_additive() {
        for f in small_fields().into_iter().filter(|f| f.k() > 1) {
            let p = f.p() as u64;
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
                }
            }
        }
    }

    #[test]
    fn large_fields_use_untabulated_paths() {
        // 3^7 = 2187 and 1009 exceed the table threshold.
        for f in [
            FieldCtx::new(3, 7).unwrap(),
            FieldCtx::new(1009, 1).unwrap(),
        ] {
            for a in f.elements().step_by(37) {
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE);
                }
                for b in f.elements().step_by(101) {
                    let c = f.element(5).unwrap();
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn construction_is_deterministic() {
        let a = FieldCtx::new(5, 2).unwrap();
        let b = FieldCtx::new(5, 2).unwrap();
        assert_eq!(a, b);
        let ea: Vec<_> = a.elements().map(|e| a.coeffs(e)).collect();
        let eb: Vec<_> = b.elements().map(|e| b.coeffs(e)).collect();
        assert_eq!(ea, eb);
    }

    #[test]
    fn field_spec_and_element_parsing() {
        assert_eq!("3".parse::<FieldSpec>().unwrap(), FieldSpec { p: 3, k: 1 });
        assert_eq!(
            "3^2".parse::<FieldSpec>().unwrap(),
            FieldSpec { p: 3, k: 2 }
        );
        assert!("x".parse::<FieldSpec>().is_err());
        let f = FieldCtx::new(3, 2).unwrap();
        let a = f.parse_element("(2,1)").unwrap();
        assert_eq!(f.coeffs(a), vec![2, 1]);
        assert_eq!(f.format(a), "(2,1)");
        assert_eq!(f.parse_element("-1").unwrap(), f.from_int(2));
        assert!(f.parse_element("(3,0)").is_err());
    }
}
