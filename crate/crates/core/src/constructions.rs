//! Explicit maps turning permanents into determinants (and back), and a
//! harness that checks their defining identities exhaustively or on random
//! inputs.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::census::{self, CensusOpts};
use crate::error::{Error, Result};
use crate::gf::{Fe, FieldCtx};
use crate::matrix::{self, FMatrix, MAX_DIM};
use crate::report::FieldInfo;

/// The 2x2 Pólya matrix `[[a11, -a12], [a21, a22]]`, whose determinant is
/// `per A`.
pub fn polya_2x2(f: &FieldCtx, a: &FMatrix) -> Result<FMatrix> {
    if a.n() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: a.n(),
        });
    }
    let mut b = a.clone();
    b.set(0, 1, f.neg(a.get(0, 1)));
    Ok(b)
}

/// Negates `a11` and `a22` of a 3x3 matrix with `a33 = 0`; on that slice
/// `per A = det Ψ(A)`.
pub fn psi33(f: &FieldCtx, a: &FMatrix) -> Result<FMatrix> {
    if a.n() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: a.n(),
        });
    }
    if !a.get(2, 2).is_zero() {
        return Err(Error::PreconditionViolated(
            "psi33 is defined only when a33 = 0".into(),
        ));
    }
    let mut b = a.clone();
    b.set(0, 0, f.neg(a.get(0, 0)));
    b.set(1, 1, f.neg(a.get(1, 1)));
    Ok(b)
}

/// `Id_(n-1) ⊕ [per A]`.
pub fn ex1_converter(f: &FieldCtx, a: &FMatrix) -> FMatrix {
    let n = a.n();
    let mut b = FMatrix::identity(n);
    b.set(n - 1, n - 1, matrix::per(f, a));
    b
}

/// `[[1, (det A - per A)/2], [1, (det A + per A)/2]] ⊕ Id_(m-2)`, which has
/// permanent `det A` and determinant `per A`. In characteristic 2 the map is
/// `A ⊕ Id_(m-n)` instead, which needs `m >= n`.
pub fn ex2_exchanger(f: &FieldCtx, a: &FMatrix, m: usize) -> Result<FMatrix> {
    if !(2..=MAX_DIM).contains(&m) {
        return Err(Error::PreconditionViolated(format!(
            "output dimension {m} outside 2..={MAX_DIM}"
        )));
    }
    let Some(half) = f.half() else {
        if m < a.n() {
            return Err(Error::EvenCharacteristic);
        }
        return Ok(pad_identity(a, m));
    };
    let p = matrix::per(f, a);
    let d = matrix::det(f, a);
    let mut b = FMatrix::identity(m);
    b.set(0, 1, f.mul(half, f.sub(d, p)));
    b.set(1, 1, f.mul(half, f.add(d, p)));
    b.set(1, 0, Fe::ONE);
    Ok(b)
}

fn pad_identity(a: &FMatrix, m: usize) -> FMatrix {
    if m == a.n() {
        a.clone()
    } else {
        a.direct_sum(&FMatrix::identity(m - a.n()))
    }
}

/// `[[α, (λ-μ)/2], [1, (λ+μ)/(2α)]] ⊕ Id_(n-2)`, a matrix with permanent
/// `λ` and determinant `μ`.
pub fn delta_family(f: &FieldCtx, n: usize, lambda: Fe, mu: Fe, alpha: Fe) -> Result<FMatrix> {
    if !(2..=MAX_DIM).contains(&n) {
        return Err(Error::PreconditionViolated(format!(
            "dimension {n} outside 2..={MAX_DIM}"
        )));
    }
    let half = f.half().ok_or(Error::EvenCharacteristic)?;
    if alpha.is_zero() {
        return Err(Error::ZeroAlpha);
    }
    let mut b = FMatrix::identity(n);
    b.set(0, 0, alpha);
    b.set(0, 1, f.mul(half, f.sub(lambda, mu)));
    b.set(1, 0, Fe::ONE);
    b.set(
        1,
        1,
        f.mul(f.mul(half, f.inv_nonzero(alpha)), f.add(lambda, mu)),
    );
    Ok(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// `per A = det Φ(A)`
    PerToDet,
    /// `per A = det Φ(A)` and `det A = per Φ(A)`
    Exchange,
}

type MapFn = dyn Fn(&FieldCtx, &FMatrix) -> Result<FMatrix> + Send + Sync;

/// A named matrix transformation together with the identity it must satisfy.
pub struct ConverterSpec {
    pub name: String,
    pub n_in: usize,
    pub n_out: usize,
    pub identity: Identity,
    /// Restrict inputs to matrices whose last entry is zero (`a_nn = 0`).
    pub last_entry_zero: bool,
    map: Box<MapFn>,
}

impl fmt::Debug for ConverterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConverterSpec")
            .field("name", &self.name)
            .field("n_in", &self.n_in)
            .field("n_out", &self.n_out)
            .field("identity", &self.identity)
            .field("last_entry_zero", &self.last_entry_zero)
            .finish()
    }
}

impl ConverterSpec {
    pub fn new<F>(
        name: impl Into<String>,
        n_in: usize,
        n_out: usize,
        identity: Identity,
        map: F,
    ) -> Self
    where
        F: Fn(&FieldCtx, &FMatrix) -> Result<FMatrix> + Send + Sync + 'static,
    {
        ConverterSpec {
            name: name.into(),
            n_in,
            n_out,
            identity,
            last_entry_zero: false,
            map: Box::new(map),
        }
    }

    pub fn apply(&self, f: &FieldCtx, a: &FMatrix) -> Result<FMatrix> {
        (self.map)(f, a)
    }

    /// `None` if the identity holds for `a`, otherwise the offending image.
    fn check(&self, f: &FieldCtx, a: &FMatrix) -> Option<Counterexample> {
        let image = match self.apply(f, a) {
            Ok(b) => b,
            Err(e) => {
                return Some(Counterexample {
                    input: a.display(f).to_string(),
                    output: format!("error: {e}"),
                    per_in: f.format(matrix::per(f, a)),
                    det_in: f.format(matrix::det(f, a)),
                    per_out: String::new(),
                    det_out: String::new(),
                })
            }
        };
        let (pa, db) = (matrix::per(f, a), matrix::det(f, &image));
        let mut ok = image.n() == self.n_out && pa == db;
        let (da, pb) = (matrix::det(f, a), matrix::per(f, &image));
        if self.identity == Identity::Exchange {
            ok &= da == pb;
        }
        (!ok).then(|| Counterexample {
            input: a.display(f).to_string(),
            output: image.display(f).to_string(),
            per_in: f.format(pa),
            det_in: f.format(da),
            per_out: f.format(pb),
            det_out: f.format(db),
        })
    }
}

pub fn polya2_spec() -> ConverterSpec {
    ConverterSpec::new("polya2", 2, 2, Identity::PerToDet, polya_2x2)
}

pub fn psi33_spec() -> ConverterSpec {
    ConverterSpec {
        last_entry_zero: true,
        ..ConverterSpec::new("psi33", 3, 3, Identity::PerToDet, psi33)
    }
}

pub fn ex1_spec(n: usize) -> ConverterSpec {
    ConverterSpec::new("ex1", n, n, Identity::PerToDet, |f, a| {
        Ok(ex1_converter(f, a))
    })
}

pub fn ex2_spec(n: usize, m: usize) -> ConverterSpec {
    ConverterSpec::new("ex2", n, m, Identity::Exchange, move |f, a| {
        ex2_exchanger(f, a, m)
    })
}

/// `A ↦ Δ_n(det A, per A; α)`: an exchanger built from the prescribed-value
/// family with a fixed `α`.
pub fn delta_spec(n: usize, alpha: Fe) -> ConverterSpec {
    ConverterSpec::new(
        format!("delta[alpha={}]", alpha.index()),
        n,
        n,
        Identity::Exchange,
        move |f, a| delta_family(f, a.n(), matrix::det(f, a), matrix::per(f, a), alpha),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive,
    Random { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub input: String,
    pub output: String,
    pub per_in: String,
    pub det_in: String,
    pub per_out: String,
    pub det_out: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub map: String,
    pub field: FieldInfo,
    pub n: usize,
    pub mode: String,
    pub checked: u64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl VerifyReport {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} over GF({}) n={} [{}]: {} ({} inputs checked)\n",
            self.map,
            self.field.q,
            self.n,
            self.mode,
            if self.pass { "pass" } else { "FAIL" },
            self.checked
        );
        if let Some(c) = &self.counterexample {
            s.push_str(&format!(
                "  counterexample A = {}\n  Φ(A) = {}\n  per A = {}, det A = {}, per Φ(A) = {}, det Φ(A) = {}\n",
                c.input, c.output, c.per_in, c.det_in, c.per_out, c.det_out
            ));
        }
        s
    }
}

fn build_input(spec: &ConverterSpec, digits: &[Fe]) -> FMatrix {
    let n = spec.n_in;
    let mut entries = digits.to_vec();
    if spec.last_entry_zero {
        entries.push(Fe::ZERO);
    }
    debug_assert_eq!(entries.len(), n * n);
    FMatrix::from_raw(n, entries)
}

/// Checks `spec`'s identity on every input (`Exhaustive`) or on uniformly
/// random inputs. The reported counterexample is the first failing input
/// in enumeration order, or in draw order for random mode.
pub fn verify_converter(
    spec: &ConverterSpec,
    f: &FieldCtx,
    mode: VerifyMode,
    opts: &CensusOpts,
) -> Result<VerifyReport> {
    let n = spec.n_in;
    if !(1..=MAX_DIM).contains(&n) {
        return Err(Error::PreconditionViolated(format!(
            "dimension {n} outside 1..={MAX_DIM}"
        )));
    }
    // A map that rejects the zero matrix rejects the whole domain (wrong
    // dimension or unsupported field); surface that as an error.
    spec.apply(f, &FMatrix::zeros(n))?;

    let digits = n * n - spec.last_entry_zero as usize;
    let (checked, failure, seed, mode_name) = match mode {
        VerifyMode::Exhaustive => {
            let (count, first) = census::enumerate(
                f,
                digits,
                opts,
                || (0u64, None::<Counterexample>),
                |st, _, e| {
                    st.0 += 1;
                    if st.1.is_none() {
                        st.1 = spec.check(f, &build_input(spec, e));
                    }
                },
                |acc, other| {
                    acc.0 += other.0;
                    if acc.1.is_none() {
                        acc.1 = other.1;
                    }
                },
            )?;
            (count, first, None, "exhaustive")
        }
        VerifyMode::Random { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut first = None;
            let mut buf = vec![Fe::ZERO; digits];
            for _ in 0..trials {
                for e in buf.iter_mut() {
                    *e = f.element(rng.gen_range(0..f.q())).unwrap();
                }
                if let Some(c) = spec.check(f, &build_input(spec, &buf)) {
                    first = Some(c);
                    break;
                }
            }
            (trials, first, Some(seed), "random")
        }
    };
    Ok(VerifyReport {
        map: spec.name.clone(),
        field: FieldInfo::of(f),
        n,
        mode: mode_name.into(),
        checked,
        pass: failure.is_none(),
        seed,
        counterexample: failure,
    })
}

/// Checks `per = λ` and `det = μ` for every `Δ_n(λ, μ; α)`.
pub fn verify_delta_family(f: &FieldCtx, n: usize) -> Result<VerifyReport> {
    let mut checked = 0;
    let mut failure = None;
    'outer: for lambda in f.elements() {
        for mu in f.elements() {
            for alpha in f.nonzero_elements() {
                let b = delta_family(f, n, lambda, mu, alpha)?;
                checked += 1;
                let (p, d) = (matrix::per(f, &b), matrix::det(f, &b));
                if p != lambda || d != mu {
                    failure = Some(Counterexample {
                        input: format!(
                            "lambda={}, mu={}, alpha={}",
                            f.format(lambda),
                            f.format(mu),
                            f.format(alpha)
                        ),
                        output: b.display(f).to_string(),
                        per_in: f.format(lambda),
                        det_in: f.format(mu),
                        per_out: f.format(p),
                        det_out: f.format(d),
                    });
                    break 'outer;
                }
            }
        }
    }
    Ok(VerifyReport {
        map: "delta-family".into(),
        field: FieldInfo::of(f),
        n,
        mode: "exhaustive".into(),
        checked,
        pass: failure.is_none(),
        seed: None,
        counterexample: failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> FieldCtx {
        FieldCtx::new(p, 1).unwrap()
    }

    fn exhaustive(spec: &ConverterSpec, f: &FieldCtx) -> VerifyReport {
        verify_converter(spec, f, VerifyMode::Exhaustive, &CensusOpts::default()).unwrap()
    }

    #[test]
    fn polya_examples() {
        let f5 = gf(5);
        let id = FMatrix::identity(2);
        assert_eq!(polya_2x2(&f5, &id).unwrap(), id);
        let ones = FMatrix::from_ints(&f5, &[&[1, 1], &[1, 1]]).unwrap();
        let b = polya_2x2(&f5, &ones).unwrap();
        assert_eq!(b, FMatrix::from_ints(&f5, &[&[1, -1], &[1, 1]]).unwrap());
        assert_eq!(matrix::det(&f5, &b), f5.from_int(2));
        assert_eq!(matrix::per(&f5, &ones), f5.from_int(2));
        assert!(matches!(
            polya_2x2(&f5, &FMatrix::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));

        let r = exhaustive(&polya2_spec(), &gf(3));
        assert!(r.pass);
        assert_eq!(r.checked, 81);
    }

    #[test]
    fn psi33_examples() {
        let f = gf(3);
        let z = FMatrix::zeros(3);
        assert_eq!(psi33(&f, &z).unwrap(), z);
        let a = FMatrix::from_ints(&f, &[&[1, 2, 0], &[2, 1, 1], &[1, 1, 0]]).unwrap();
        assert_eq!(psi33(&f, &psi33(&f, &a).unwrap()).unwrap(), a);
        let bad = FMatrix::identity(3);
        assert!(matches!(
            psi33(&f, &bad),
            Err(Error::PreconditionViolated(_))
        ));

        let r = exhaustive(&psi33_spec(), &f);
        assert!(r.pass);
        assert_eq!(r.checked, 3u64.pow(8));
    }

    #[test]
    fn ex1_examples() {
        let f = gf(7);
        let singular = FMatrix::from_ints(&f, &[&[1, 1], &[1, -1]]).unwrap();
        assert_eq!(matrix::det(&f, &ex1_converter(&f, &singular)), Fe::ZERO);
        // two different inputs with equal permanent share an image
        let a = FMatrix::from_ints(&f, &[&[1, 0], &[0, 1]]).unwrap();
        let b = FMatrix::from_ints(&f, &[&[0, 1], &[1, 0]]).unwrap();
        assert_ne!(a, b);
        assert_eq!(ex1_converter(&f, &a), ex1_converter(&f, &b));
        let r = verify_converter(
            &ex1_spec(3),
            &f,
            VerifyMode::Random {
                trials: 1000,
                seed: 3,
            },
            &CensusOpts::default(),
        )
        .unwrap();
        assert!(r.pass);
    }

    #[test]
    fn ex2_examples() {
        let f = gf(3);
        let out = ex2_exchanger(&f, &FMatrix::identity(3), 3).unwrap();
        let expected = FMatrix::from_ints(&f, &[&[1, 0], &[1, 1]])
            .unwrap()
            .direct_sum(&FMatrix::identity(1));
        assert_eq!(out, expected);
        assert_eq!(matrix::per(&f, &out), Fe::ONE);
        assert_eq!(matrix::det(&f, &out), Fe::ONE);
        assert!(exhaustive(&ex2_spec(2, 2), &f).pass);

        let f2 = gf(2);
        let a = FMatrix::from_ints(&f2, &[&[1, 1], &[0, 1]]).unwrap();
        assert_eq!(ex2_exchanger(&f2, &a, 2).unwrap(), a);
        assert_eq!(
            ex2_exchanger(&f2, &a, 3).unwrap(),
            a.direct_sum(&FMatrix::identity(1))
        );
        assert_eq!(
            ex2_exchanger(&f2, &FMatrix::identity(3), 2),
            Err(Error::EvenCharacteristic)
        );
        assert!(exhaustive(&ex2_spec(2, 3), &f2).pass);
    }

    #[test]
    fn delta_examples() {
        let f = gf(3);
        let one = Fe::ONE;
        let d = delta_family(&f, 2, one, one, one).unwrap();
        assert_eq!(d, FMatrix::from_ints(&f, &[&[1, 0], &[1, 1]]).unwrap());

        let r = verify_delta_family(&gf(5), 2).unwrap();
        assert!(r.pass);
        assert_eq!(r.checked, 100);

        let two = f.from_int(2);
        assert_ne!(
            delta_family(&f, 3, one, two, one).unwrap(),
            delta_family(&f, 3, one, two, two).unwrap()
        );
        assert_eq!(
            delta_family(&f, 2, one, one, Fe::ZERO),
            Err(Error::ZeroAlpha)
        );
        assert_eq!(
            delta_family(&gf(2), 2, one, one, one),
            Err(Error::EvenCharacteristic)
        );
        assert!(exhaustive(&delta_spec(2, two), &f).pass);
    }

    #[test]
    fn mutated_converter_is_caught() {
        // Negating a22 instead of a12 gives det = a11(-a22) - a12 a21 = -per.
        let wrong = ConverterSpec::new("wrong", 2, 2, Identity::PerToDet, |f, a| {
            let mut b = a.clone();
            b.set(1, 1, f.neg(a.get(1, 1)));
            Ok(b)
        });
        let r = exhaustive(&wrong, &gf(3));
        assert!(!r.pass);
        let c = r.counterexample.unwrap();
        assert_ne!(c.per_in, c.det_out);
        // first failure in enumeration order, last entry varying fastest
        assert_eq!(c.input, "0,1;1,0");
    }

    #[test]
    fn verification_is_worker_independent() {
        let wrong =
            || ConverterSpec::new("identity", 2, 2, Identity::PerToDet, |_, a| Ok(a.clone()));
        let f = gf(5);
        let one = exhaustive(&wrong(), &f);
        let many = verify_converter(
            &wrong(),
            &f,
            VerifyMode::Exhaustive,
            &CensusOpts::with_workers(4),
        )
        .unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn unusable_map_is_an_error() {
        let f = gf(3);
        let spec = ConverterSpec::new("polya-on-3x3", 3, 3, Identity::PerToDet, polya_2x2);
        assert!(
            verify_converter(&spec, &f, VerifyMode::Exhaustive, &CensusOpts::default()).is_err()
        );
    }
}
