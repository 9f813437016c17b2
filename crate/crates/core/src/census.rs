//! Exhaustive censuses of `M_n(GF(q))` and Monte Carlo estimates.
//!
//! Every census is a map-reduce over the index range `0..q^d` of some
//! `d`-digit q-ary odometer (`d = n^2` for matrices, `d = 2k` for vector
//! pairs). The range is cut into one contiguous chunk per worker, each
//! worker tallies into a local dense table, and the tables are summed in
//! chunk order. Summation commutes, so the result never depends on the
//! worker count.
//!
//! The odometer is row-major with the last entry as the least significant
//! digit, so index order is lexicographic order of the entry sequence.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulas;
use crate::gf::{Fe, FieldCtx};
use crate::matrix::{self, FMatrix, PerAlgo, MAX_DIM};
use crate::report::{big, big_map, FieldInfo};

/// Default enumeration budget, in evaluated tuples.
pub const DEFAULT_BUDGET: u64 = 1 << 36;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "PERMCENSUS_BUDGET";

#[derive(Debug, Clone, Copy)]
pub struct CensusOpts {
    pub workers: usize,
    pub budget: u64,
    pub per_algo: PerAlgo,
}

impl Default for CensusOpts {
    fn default() -> Self {
        CensusOpts {
            workers: 1,
            budget: DEFAULT_BUDGET,
            per_algo: PerAlgo::Auto,
        }
    }
}

impl CensusOpts {
    pub fn with_workers(workers: usize) -> Self {
        CensusOpts {
            workers,
            ..Default::default()
        }
    }
}

/// `q^digits`, or `BudgetExceeded` when that is more than `budget`.
pub fn check_budget(q: u32, digits: usize, budget: u64) -> Result<u64> {
    let total = BigUint::from(q).pow(digits as u32);
    match total.to_u64() {
        Some(t) if t <= budget => Ok(t),
        _ => Err(Error::BudgetExceeded {
            required: total,
            budget,
        }),
    }
}

/// Parallel fold over every tuple in `GF(q)^digits`.
///
/// `visit` sees the tuple index and its entries; per-chunk states are
/// combined with `merge` in chunk order.
pub fn enumerate<S, I, V, M>(
    f: &FieldCtx,
    digits: usize,
    opts: &CensusOpts,
    init: I,
    visit: V,
    mut merge: M,
) -> Result<S>
where
    S: Send,
    I: Fn() -> S + Sync,
    V: Fn(&mut S, u64, &[Fe]) + Sync,
    M: FnMut(&mut S, S),
{
    assert!(digits <= MAX_DIM * MAX_DIM);
    let total = check_budget(f.q(), digits, opts.budget)?;
    let workers = opts.workers.max(1) as u64;
    let bounds: Vec<(u64, u64)> = (0..workers)
        .map(|w| (total * w / workers, total * (w + 1) / workers))
        .filter(|(lo, hi)| lo < hi)
        .collect();

    let run = |lo: u64, hi: u64| -> S {
        let mut state = init();
        let mut buf = [Fe::ZERO; MAX_DIM * MAX_DIM];
        let tuple = &mut buf[..digits];
        let q = f.q();
        let mut rest = lo;
        for slot in tuple.iter_mut().rev() {
            *slot = f.element((rest % q as u64) as u32).unwrap();
            rest /= q as u64;
        }
        for idx in lo..hi {
            visit(&mut state, idx, tuple);
            for slot in tuple.iter_mut().rev() {
                let next = slot.index() + 1;
                if next < q {
                    *slot = f.element(next).unwrap();
                    break;
                }
                *slot = Fe::ZERO;
            }
        }
        state
    };

    let mut parts: Vec<S> = if bounds.len() <= 1 {
        bounds.iter().map(|&(lo, hi)| run(lo, hi)).collect()
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = bounds
                .iter()
                .map(|&(lo, hi)| {
                    let run = &run;
                    scope.spawn(move || run(lo, hi))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("census worker panicked"))
                .collect()
        })
    };
    if parts.is_empty() {
        return Ok(init());
    }
    let mut acc = parts.remove(0);
    for p in parts {
        merge(&mut acc, p);
    }
    Ok(acc)
}

fn tally<K>(
    f: &FieldCtx,
    digits: usize,
    opts: &CensusOpts,
    slots: usize,
    key: K,
) -> Result<Vec<u64>>
where
    K: Fn(&[Fe]) -> Option<usize> + Sync,
{
    enumerate(
        f,
        digits,
        opts,
        || vec![0u64; slots],
        |t, _, e| {
            if let Some(k) = key(e) {
                t[k] += 1;
            }
        },
        |a, b| a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
    )
}

fn to_big(v: Vec<u64>) -> Vec<BigUint> {
    v.into_iter().map(BigUint::from).collect()
}

/// Machine- and human-readable census output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub field: FieldInfo,
    pub n: usize,
    #[serde(with = "big")]
    pub total: BigUint,
    #[serde(with = "big_map")]
    pub counts: BTreeMap<String, BigUint>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty", with = "big_map")]
    pub summary: BTreeMap<String, BigUint>,
    pub elapsed_ms: u64,
    pub workers: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl CensusReport {
    /// Aligned two-column text.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "field GF({}) p={} k={}  n={}  total={}  workers={}  elapsed={} ms\n",
            self.field.q,
            self.field.p,
            self.field.k,
            self.n,
            self.total,
            self.workers,
            self.elapsed_ms
        );
        let width = self
            .counts
            .keys()
            .chain(self.summary.keys())
            .map(|k| k.len())
            .max()
            .unwrap_or(0);
        for (k, v) in &self.counts {
            out.push_str(&format!("{k:<width$}  {v:>}\n"));
        }
        if !self.summary.is_empty() {
            out.push('\n');
            for (k, v) in &self.summary {
                out.push_str(&format!("{k:<width$}  {v:>}\n"));
            }
        }
        out
    }
}

/// Exact counts of `n x n` matrices by `(per, det)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointCensus {
    pub field: FieldInfo,
    pub n: usize,
    q: usize,
    /// `cells[per * q + det]`
    cells: Vec<BigUint>,
    pub elapsed_ms: u64,
    pub workers: usize,
}

impl JointCensus {
    pub fn cell(&self, per: Fe, det: Fe) -> &BigUint {
        &self.cells[per.index() as usize * self.q + det.index() as usize]
    }

    pub fn total(&self) -> BigUint {
        self.cells.iter().sum()
    }

    /// Histogram of `per` values, indexed by element index.
    pub fn per_histogram(&self) -> Vec<BigUint> {
        (0..self.q)
            .map(|a| self.cells[a * self.q..(a + 1) * self.q].iter().sum())
            .collect()
    }

    pub fn det_histogram(&self) -> Vec<BigUint> {
        (0..self.q)
            .map(|b| (0..self.q).map(|a| &self.cells[a * self.q + b]).sum())
            .collect()
    }

    /// `|P_n|`
    pub fn per_zero(&self) -> BigUint {
        self.per_histogram().swap_remove(0)
    }

    /// `|D_n|`
    pub fn det_zero(&self) -> BigUint {
        self.det_histogram().swap_remove(0)
    }

    pub fn report(&self, f: &FieldCtx) -> CensusReport {
        let mut counts = BTreeMap::new();
        for a in f.elements() {
            for b in f.elements() {
                counts.insert(
                    format!("per={},det={}", f.format(a), f.format(b)),
                    self.cell(a, b).clone(),
                );
            }
        }
        let mut summary = BTreeMap::new();
        summary.insert(format!("P_{}", self.n), self.per_zero());
        summary.insert(format!("D_{}", self.n), self.det_zero());
        CensusReport {
            field: self.field,
            n: self.n,
            total: self.total(),
            counts,
            summary,
            elapsed_ms: self.elapsed_ms,
            workers: self.workers,
            seed: None,
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::PreconditionViolated(format!(
            "dimension {n} outside 1..={MAX_DIM}"
        )));
    }
    Ok(())
}

/// Counts every `n x n` matrix by its `(per, det)` pair.
pub fn census_joint(f: &FieldCtx, n: usize, opts: &CensusOpts) -> Result<JointCensus> {
    check_n(n)?;
    let start = Instant::now();
    let q = f.q() as usize;
    let algo = opts.per_algo;
    let cells = tally(f, n * n, opts, q * q, |a| {
        let p = matrix::per_slice(f, a, n, algo);
        let d = matrix::det_slice(f, a, n);
        Some(p.index() as usize * q + d.index() as usize)
    })?;
    Ok(JointCensus {
        field: FieldInfo::of(f),
        n,
        q,
        cells: to_big(cells),
        elapsed_ms: start.elapsed().as_millis() as u64,
        workers: opts.workers.max(1),
    })
}

/// `{A : det A = α}` and `{A : per A = α}` sizes for every `α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueClasses {
    pub n: usize,
    pub per: Vec<BigUint>,
    pub det: Vec<BigUint>,
    joint: JointCensus,
}

impl ValueClasses {
    pub fn report(&self, f: &FieldCtx) -> CensusReport {
        let mut counts = BTreeMap::new();
        for a in f.elements() {
            counts.insert(
                format!("per={}", f.format(a)),
                self.per[a.index() as usize].clone(),
            );
            counts.insert(
                format!("det={}", f.format(a)),
                self.det[a.index() as usize].clone(),
            );
        }
        CensusReport {
            counts,
            summary: BTreeMap::new(),
            ..self.joint.report(f)
        }
    }

    /// All nonzero classes of the histogram have equal size.
    pub fn nonzero_uniform(hist: &[BigUint]) -> bool {
        hist[1..].windows(2).all(|w| w[0] == w[1])
    }
}

pub fn census_value_classes(f: &FieldCtx, n: usize, opts: &CensusOpts) -> Result<ValueClasses> {
    let joint = census_joint(f, n, opts)?;
    Ok(ValueClasses {
        n,
        per: joint.per_histogram(),
        det: joint.det_histogram(),
        joint,
    })
}

/// `|N^(r)_m|` for `r = 0..=m`: zero-permanent `m x m` matrices tallied by
/// the rank of their permanental compound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NrReport {
    pub field: FieldInfo,
    pub m: usize,
    pub counts: Vec<BigUint>,
    pub elapsed_ms: u64,
    pub workers: usize,
}

impl NrReport {
    /// `Σ_r |N^(r)_m| = |P_m|`.
    pub fn per_zero(&self) -> BigUint {
        self.counts.iter().sum()
    }

    pub fn report(&self) -> CensusReport {
        let counts = self
            .counts
            .iter()
            .enumerate()
            .map(|(r, c)| (r.to_string(), c.clone()))
            .collect();
        let mut summary = BTreeMap::new();
        summary.insert(format!("P_{}", self.m), self.per_zero());
        CensusReport {
            field: self.field,
            n: self.m,
            total: BigUint::from(self.field.q).pow((self.m * self.m) as u32),
            counts,
            summary,
            elapsed_ms: self.elapsed_ms,
            workers: self.workers,
            seed: None,
        }
    }
}

pub fn census_nr(f: &FieldCtx, m: usize, opts: &CensusOpts) -> Result<NrReport> {
    check_n(m)?;
    let start = Instant::now();
    let algo = opts.per_algo;
    let counts = tally(f, m * m, opts, m + 1, |a| {
        if !matrix::per_slice(f, a, m, algo).is_zero() {
            return None;
        }
        let mut comp = [Fe::ZERO; MAX_DIM * MAX_DIM];
        matrix::per_compound_into(f, a, m, &mut comp[..m * m]);
        Some(matrix::rank_square_slice(f, &comp[..m * m], m))
    })?;
    Ok(NrReport {
        field: FieldInfo::of(f),
        m,
        counts: to_big(counts),
        elapsed_ms: start.elapsed().as_millis() as u64,
        workers: opts.workers.max(1),
    })
}

/// Number of pairs `(x, y) ∈ F^k × F^k` with `x^T A y = 0`.
pub fn census_bilinear_zeros(f: &FieldCtx, a: &FMatrix, opts: &CensusOpts) -> Result<BigUint> {
    let k = a.n();
    let entries = a.entries();
    let counts = tally(f, 2 * k, opts, 1, |xy| {
        matrix::bilinear_form(f, &xy[..k], entries, &xy[k..])
            .is_zero()
            .then_some(0)
    })?;
    Ok(BigUint::from(counts[0]))
}

/// `|V^(r)_k|` by enumeration against `I_r ⊕ 0_{k-r}`.
pub fn census_vr(f: &FieldCtx, k: usize, r: usize, opts: &CensusOpts) -> Result<BigUint> {
    check_n(k)?;
    if r > k {
        return Err(Error::RankOutOfRange { k, r });
    }
    census_bilinear_zeros(f, &FMatrix::rank_canonical(k, r), opts)
}

/// Assembles `|P_n|` from an `(n-1)`-level compound-rank census:
/// `(q^((n-1)^2) - |P_(n-1)|) q^(2(n-1)) + q Σ_r |N^(r)_(n-1)| |V^(r)_(n-1)|`.
pub fn pn_from_nr(q: u32, nr: &NrReport) -> BigUint {
    let m = nr.m;
    let qb = BigUint::from(q);
    let free = qb.pow((m * m) as u32) - nr.per_zero();
    let mut total = free * qb.pow(2 * m as u32);
    for (r, count) in nr.counts.iter().enumerate() {
        let v = formulas::poly_vrk(m, r)
            .expect("r <= m")
            .eval_u(q as u64)
            .to_biguint()
            .expect("V^(r) counts are nonnegative");
        total += &qb * count * v;
    }
    total
}

/// Exact `|P_n|` via the first-row recursion; only the `(n-1)` level is
/// enumerated.
pub fn exact_pn_by_recursion(f: &FieldCtx, n: usize, opts: &CensusOpts) -> Result<BigUint> {
    if n < 2 {
        return Err(Error::PreconditionViolated(
            "the recursion needs n >= 2".into(),
        ));
    }
    let nr = census_nr(f, n - 1, opts)?;
    Ok(pn_from_nr(f.q(), &nr))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Per,
    Det,
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per" => Ok(Statistic::Per),
            "det" => Ok(Statistic::Det),
            _ => Err(Error::Parse(format!(
                "unknown statistic {s:?}, expected per or det"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleEstimate {
    pub trials: u64,
    pub hits: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub seed: u64,
    pub workers: usize,
}

impl SampleEstimate {
    fn new(trials: u64, hits: u64, seed: u64, workers: usize) -> Self {
        let p = hits as f64 / trials as f64;
        SampleEstimate {
            trials,
            hits,
            estimate: p,
            std_error: (p * (1.0 - p) / trials as f64).sqrt(),
            seed,
            workers,
        }
    }
}

/// Monte Carlo estimate of `P(stat(A) = target)` for uniform `A ∈ M_n`.
///
/// Worker `w` draws its share of the trials from ChaCha8 seeded with `seed`
/// on stream `w`, so a run is reproducible for a fixed worker count and
/// single-worker runs are bitwise stable.
pub fn sample_prob(
    f: &FieldCtx,
    n: usize,
    stat: Statistic,
    target: Fe,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<SampleEstimate> {
    check_n(n)?;
    if trials == 0 {
        return Err(Error::PreconditionViolated(
            "trials must be at least 1".into(),
        ));
    }
    if !f.contains(target) {
        return Err(Error::PreconditionViolated(
            "target is not a field element".into(),
        ));
    }
    let workers = workers.max(1);
    let run = |w: usize| -> u64 {
        let lo = trials * w as u64 / workers as u64;
        let hi = trials * (w as u64 + 1) / workers as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(w as u64);
        let mut a = [Fe::ZERO; MAX_DIM * MAX_DIM];
        let a = &mut a[..n * n];
        let mut hits = 0;
        for _ in lo..hi {
            for e in a.iter_mut() {
                *e = f.element(rng.gen_range(0..f.q())).unwrap();
            }
            let v = match stat {
                Statistic::Per => matrix::per_slice(f, a, n, PerAlgo::Auto),
                Statistic::Det => matrix::det_slice(f, a, n),
            };
            hits += (v == target) as u64;
        }
        hits
    };
    let hits = if workers == 1 {
        run(0)
    } else {
        std::thread::scope(|s| {
            let hs: Vec<_> = (0..workers).map(|w| s.spawn(move || run(w))).collect();
            hs.into_iter()
                .map(|h| h.join().expect("sampling worker panicked"))
                .sum()
        })
    };
    Ok(SampleEstimate::new(trials, hits, seed, workers))
}

/// Exact `P(stat(A) = target)` as `(numerator, q^(n^2))` when a closed form
/// applies: always for `det`; for `per` when `n <= 3`.
pub fn exact_probability(
    f: &FieldCtx,
    n: usize,
    stat: Statistic,
    target: Fe,
) -> Option<(BigUint, BigUint)> {
    let q = f.q() as u64;
    let total = BigUint::from(q).pow((n * n) as u32);
    let zero = match stat {
        Statistic::Det => formulas::poly_dn(n).eval_u(q),
        Statistic::Per => match n {
            1 => 1.into(),
            2 => formulas::p2_poly().eval_u(q),
            3 if f.p() != 2 => formulas::poly_p3().eval_u(q),
            3 => formulas::poly_dn(3).eval_u(q),
            _ => return None,
        },
    };
    let zero = zero.to_biguint()?;
    if target.is_zero() {
        Some((zero, total))
    } else {
        let rest = &total - zero;
        debug_assert!((&rest % BigUint::from(q - 1)).is_zero());
        Some((rest / BigUint::from(q - 1), total))
    }
}
