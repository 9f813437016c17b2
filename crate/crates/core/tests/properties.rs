use permcensus::census::{census_bilinear_zeros, CensusOpts};
use permcensus::matrix::{self, per_minor_slice};
use permcensus::{FMatrix, Fe, FieldCtx};
use proptest::prelude::*;

fn field(choice: u8) -> FieldCtx {
    match choice % 4 {
        0 => FieldCtx::new(3, 1),
        1 => FieldCtx::new(5, 1),
        2 => FieldCtx::new(3, 2),
        _ => FieldCtx::new(2, 3),
    }
    .unwrap()
}

fn to_matrix(f: &FieldCtx, n: usize, raw: &[u32]) -> FMatrix {
    let entries = raw[..n * n]
        .iter()
        .map(|&x| f.element(x % f.q()).unwrap())
        .collect();
    FMatrix::new(f, n, entries).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ryser_matches_laplace(fc in any::<u8>(), n in 1usize..=6, raw in prop::collection::vec(any::<u32>(), 36)) {
        let f = field(fc);
        let a = to_matrix(&f, n, &raw);
        prop_assert_eq!(matrix::per_ryser(&f, &a), matrix::per_laplace(&f, &a));
    }

    #[test]
    fn per_is_row_multilinear(
        fc in any::<u8>(),
        n in 1usize..=5,
        raw in prop::collection::vec(any::<u32>(), 25),
        row in any::<usize>(),
        c in any::<u32>(),
    ) {
        let f = field(fc);
        let a = to_matrix(&f, n, &raw);
        let i = row % n;
        let c = f.element(c % f.q()).unwrap();
        let scaled = a.scale_row(&f, i, c);
        prop_assert_eq!(matrix::per(&f, &scaled), f.mul(c, matrix::per(&f, &a)));
        prop_assert_eq!(matrix::det(&f, &scaled), f.mul(c, matrix::det(&f, &a)));
    }

    #[test]
    fn laplace_expansion_along_any_row(fc in any::<u8>(), n in 2usize..=5, raw in prop::collection::vec(any::<u32>(), 25)) {
        let f = field(fc);
        let a = to_matrix(&f, n, &raw);
        let p = matrix::per(&f, &a);
        for i in 0..n {
            let mut s = Fe::ZERO;
            for j in 0..n {
                s = f.add(s, f.mul(a.get(i, j), per_minor_slice(&f, a.entries(), n, i, j)));
            }
            prop_assert_eq!(s, p);
        }
    }

    #[test]
    fn per_and_det_transpose_invariant(fc in any::<u8>(), n in 1usize..=5, raw in prop::collection::vec(any::<u32>(), 25)) {
        let f = field(fc);
        let a = to_matrix(&f, n, &raw);
        let t = a.transpose();
        prop_assert_eq!(matrix::per(&f, &t), matrix::per(&f, &a));
        prop_assert_eq!(matrix::det(&f, &t), matrix::det(&f, &a));
    }

    #[test]
    fn det_is_multiplicative(fc in any::<u8>(), n in 1usize..=4, ra in prop::collection::vec(any::<u32>(), 16), rb in prop::collection::vec(any::<u32>(), 16)) {
        let f = field(fc);
        let a = to_matrix(&f, n, &ra);
        let b = to_matrix(&f, n, &rb);
        prop_assert_eq!(matrix::det(&f, &a.mul(&f, &b)), f.mul(matrix::det(&f, &a), matrix::det(&f, &b)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Zero counts of x^T A y depend only on rank A.
    #[test]
    fn bilinear_zero_count_depends_on_rank(
        p in prop::sample::select(vec![3u64, 5]),
        raw in prop::collection::vec(any::<u32>(), 4),
        rp in prop::collection::vec(any::<u32>(), 4),
        rq in prop::collection::vec(any::<u32>(), 4),
    ) {
        let f = FieldCtx::new(p, 1).unwrap();
        let a = to_matrix(&f, 2, &raw);
        let r = matrix::rank(&f, &a);
        let canonical = FMatrix::rank_canonical(2, r);
        let opts = CensusOpts::default();
        let base = census_bilinear_zeros(&f, &canonical, &opts).unwrap();
        prop_assert_eq!(census_bilinear_zeros(&f, &a, &opts).unwrap(), base.clone());

        let pm = to_matrix(&f, 2, &rp);
        let qm = to_matrix(&f, 2, &rq);
        prop_assume!(!matrix::det(&f, &pm).is_zero() && !matrix::det(&f, &qm).is_zero());
        let moved = pm.mul(&f, &canonical).mul(&f, &qm);
        prop_assert_eq!(matrix::rank(&f, &moved), r);
        prop_assert_eq!(census_bilinear_zeros(&f, &moved, &opts).unwrap(), base);
    }
}
