use jacobi_core::linalg::{
    check_snf, cokernel_structure, member_solve, member_solve_snf, rational_rref, smith_normal_form, IntMatrix,
};
use jacobi_core::lincomb::{q, Q};
use jacobi_core::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn matrix(max_r: usize, max_c: usize, bound: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_r, 1..=max_c).prop_flat_map(move |(r, c)| prop::collection::vec(prop::collection::vec(-bound..=bound, c), r))
}

/// Determinant by cofactor expansion, independent of the library's elimination.
fn cofactor_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut s = BigInt::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect()).collect();
        let t = &m[0][j] * cofactor_det(&minor);
        if j % 2 == 0 {
            s += t;
        } else {
            s -= t;
        }
    }
    s
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors from determinantal divisors: dₖ = gcd of k×k minors,
/// sₖ = dₖ / dₖ₋₁.
fn invariant_factors_oracle(a: &[Vec<i64>]) -> Vec<BigInt> {
    let (r, c) = (a.len(), a[0].len());
    let mut out = Vec::new();
    let mut prev = BigInt::one();
    for k in 1..=r.min(c) {
        let mut g = BigInt::zero();
        for rows in subsets(r, k) {
            for cols in subsets(c, k) {
                let m: Vec<Vec<BigInt>> = rows.iter().map(|&i| cols.iter().map(|&j| BigInt::from(a[i][j])).collect()).collect();
                g = g.gcd(&cofactor_det(&m));
            }
        }
        if g.is_zero() {
            out.extend(std::iter::repeat(BigInt::zero()).take(r.min(c) - out.len()));
            return out;
        }
        out.push(&g / &prev);
        prev = g;
    }
    out
}

fn torsion(factors: &[BigInt]) -> Vec<BigInt> {
    let mut t: Vec<BigInt> = factors.iter().filter(|f| **f > BigInt::one()).cloned().collect();
    t.sort();
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn snf_contract_and_divisors(a in matrix(6, 6, 9)) {
        let m = IntMatrix::from_rows(&a);
        let s = smith_normal_form(&m);
        prop_assert_eq!(check_snf(&m, &s), Ok(()));
        prop_assert_eq!(s.diagonal(), invariant_factors_oracle(&a));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cokernel_invariant_under_permutation_and_redundancy(
        a in matrix(5, 6, 6),
        rs in prop::collection::vec(0usize..100, 8),
        ks in prop::collection::vec(-3i64..=3, 5),
    ) {
        let base = cokernel_structure(&IntMatrix::from_rows(&a));
        let (r, c) = (a.len(), a[0].len());
        let mut rows: Vec<usize> = (0..r).collect();
        let mut cols: Vec<usize> = (0..c).collect();
        for i in (1..r).rev() {
            rows.swap(i, rs[i % rs.len()] % (i + 1));
        }
        for j in (1..c).rev() {
            cols.swap(j, rs[(j + 3) % rs.len()] % (j + 1));
        }
        let mut b: Vec<Vec<i64>> = rows.iter().map(|&i| cols.iter().map(|&j| a[i][j]).collect()).collect();
        let extra: Vec<i64> = (0..c).map(|j| (0..r).map(|i| ks[i % ks.len()] * b[i][j]).sum()).collect();
        b.push(extra);
        let other = cokernel_structure(&IntMatrix::from_rows(&b));
        prop_assert_eq!(base.free_rank, other.free_rank);
        prop_assert_eq!(torsion(&base.factors), torsion(&other.factors));
    }

    #[test]
    fn membership_routes_agree(a in matrix(5, 5, 5), x in prop::collection::vec(-4i64..=4, 5), bump in 0i64..3) {
        let m = IntMatrix::from_rows(&a);
        let n = m.cols();
        let xs: Vec<BigInt> = x[..n].iter().map(|&v| BigInt::from(v)).collect();
        let mut b = m.mul_vec(&xs);
        b[0] += bump;
        let s1 = member_solve(&m, &b);
        let s2 = member_solve_snf(&m, &b);
        prop_assert_eq!(s1.is_some(), s2.is_some());
        for s in [s1, s2].into_iter().flatten() {
            prop_assert_eq!(m.mul_vec(&s), b.clone());
        }
        if bump == 0 {
            prop_assert!(member_solve(&m, &b).is_some());
        }
    }

    #[test]
    fn rref_solves_consistent_systems(a in matrix(5, 4, 5), x in prop::collection::vec(-4i64..=4, 4)) {
        let n = a[0].len();
        let rows: Vec<Vec<Q>> = a
            .iter()
            .map(|r| {
                let mut row: Vec<Q> = r.iter().map(|&v| Q::from_integer(v.into())).collect();
                let rhs: i64 = r.iter().zip(&x).map(|(p, q)| p * q).sum();
                row.push(Q::from_integer(rhs.into()));
                row
            })
            .collect();
        let red = rational_rref(rows.clone(), n);
        prop_assert!(red.consistent);
        if red.pivots.len() == n {
            let want: Vec<Q> = x[..n].iter().map(|&v| Q::from_integer(v.into())).collect();
            for (i, &p) in red.pivots.iter().enumerate() {
                prop_assert_eq!(&red.rows[i][n], &want[p]);
            }
        }
        for r in &red.rows {
            let lhs: Q = (0..n).map(|j| &r[j] * Q::from_integer(x[j].into())).sum();
            prop_assert_eq!(lhs, r[n].clone());
        }
    }
}

#[test]
fn displayed_matrix_and_transpose() {
    let a = vec![vec![1, 0, 0], vec![2, 1, 0], vec![0, 1, 0], vec![0, -1, 3]];
    assert_eq!(invariant_factors_oracle(&a), vec![1.into(), 1.into(), BigInt::from(3)]);
    let t = IntMatrix::from_rows(&a).transpose();
    let ck = cokernel_structure(&t);
    assert_eq!((ck.free_rank, ck.torsion.clone()), (1, vec![BigInt::from(3)]));
}

#[test]
fn trivial_presentations() {
    let z = IntMatrix::zeros(3, 2);
    let s = smith_normal_form(&z);
    assert!(s.d.is_zero());
    assert_eq!(s.u.clone().unwrap(), IntMatrix::identity(3));
    assert_eq!(s.v, IntMatrix::identity(2));
    assert_eq!(cokernel_structure(&IntMatrix::zeros(0, 2)).free_rank, 2);
    let two = cokernel_structure(&IntMatrix::from_rows(&[vec![2]]));
    assert_eq!((two.free_rank, two.torsion), (0, vec![BigInt::from(2)]));
    let id = IntMatrix::identity(3);
    let b = vec![BigInt::from(4), BigInt::from(-1), BigInt::from(7)];
    assert_eq!(member_solve(&id, &b), Some(b.clone()));
    assert_eq!(member_solve(&IntMatrix::from_rows(&[vec![2]]), &[BigInt::one()]), None);
}

#[test]
fn inconsistent_system_is_flagged() {
    let rows = vec![vec![q(1, 1), q(1, 1), q(1, 1)], vec![q(2, 1), q(2, 1), q(3, 1)]];
    let r = rational_rref(rows, 2);
    assert!(!r.consistent);
    assert_eq!(r.unique_solution(2), None);
}
