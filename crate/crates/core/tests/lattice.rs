use latvol::arith::{rat, ratio, Rational};
use latvol::lattice::{dot, norm_sq, LatticeBasis};
use latvol::matrix::IntMatrix;
use latvol::Error;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn to_q(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| rat(x)).collect()
}

/// Membership of an integer point in the lattice spanned by integer
/// vectors, via exact coordinates.
fn member(l: &LatticeBasis, x: &[i64]) -> bool {
    l.lattice_coordinates(&to_q(x)).is_ok()
}

/// Minimum squared length by scanning every integer point of the ambient
/// box `[-r, r]^n` with `r^2` the shortest basis length.
fn brute_min(vectors: &[Vec<i64>]) -> i64 {
    let l = LatticeBasis::from_integer_vectors(vectors).unwrap();
    let n = vectors[0].len();
    let start: i64 = vectors.iter().map(|v| v.iter().map(|x| x * x).sum()).min().unwrap();
    let r = (start as f64).sqrt().ceil() as i64;
    let mut best = start;
    let mut x = vec![-r; n];
    loop {
        let q: i64 = x.iter().map(|v| v * v).sum();
        if q > 0 && q < best && member(&l, &x) {
            best = q;
        }
        let mut i = 0;
        while i < n {
            x[i] += 1;
            if x[i] <= r {
                break;
            }
            x[i] = -r;
            i += 1;
        }
        if i == n {
            return best;
        }
    }
}

/// Minimum of `|a|^2 + |b|^2` over bases of a rank-2 lattice, scanning
/// coefficient pairs in a box large enough for the given bound.
fn brute_minbasis2(vectors: &[Vec<i64>]) -> Rational {
    let l = LatticeBasis::from_integer_vectors(vectors).unwrap();
    let bound = l.greedy_basis().norm_sum_sq();
    let cands: Vec<(Vec<i64>, Rational)> = l.vectors_within(&bound);
    let mut best = bound;
    for (a, na) in &cands {
        for (b, nb) in &cands {
            if (a[0] * b[1] - a[1] * b[0]).abs() == 1 && na + nb < best {
                best = na + nb;
            }
        }
    }
    best
}

fn basis_strategy(rank: usize, dim: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    proptest::collection::vec(proptest::collection::vec(-9i64..=9, dim), rank).prop_filter(
        "independent",
        |v| LatticeBasis::from_integer_vectors(v).is_ok(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn shortest_vector_matches_ambient_scan(v in basis_strategy(2, 2)) {
        let l = LatticeBasis::from_integer_vectors(&v).unwrap();
        let sv = l.shortest_vector();
        prop_assert_eq!(sv.norm_sq.clone(), rat(brute_min(&v)));
        prop_assert_eq!(l.combination(&sv.coefficients), sv.vector);
    }

    #[test]
    fn shortest_vector_rank3(v in basis_strategy(3, 3)) {
        let l = LatticeBasis::from_integer_vectors(&v).unwrap();
        prop_assert_eq!(l.min_sq(), rat(brute_min(&v)));
    }

    #[test]
    fn greedy_basis_is_a_basis(v in basis_strategy(3, 3)) {
        let l = LatticeBasis::from_integer_vectors(&v).unwrap();
        let g = l.greedy_basis();
        let coords = l.coordinate_matrix(&g.vectors).unwrap();
        prop_assert_eq!(IntMatrix::from_rows(&coords).unwrap().det().abs(), 1.into());
        // covol is the product of the alpha_i.
        let prod: Rational = g.alpha_sq.iter().product();
        prop_assert_eq!(prod, l.covol_sq());
    }

    #[test]
    fn minbasis_rank2_matches_pair_scan(v in basis_strategy(2, 2)) {
        let l = LatticeBasis::from_integer_vectors(&v).unwrap();
        prop_assert_eq!(l.minbasis_sq().unwrap(), brute_minbasis2(&v));
    }

    #[test]
    fn quotient_covolume_multiplies(v in basis_strategy(3, 3)) {
        let l = LatticeBasis::from_integer_vectors(&v).unwrap();
        let sv = l.shortest_vector();
        let q = l.quotient(&sv.vector).unwrap();
        prop_assert_eq!(q.covol_sq() * sv.norm_sq, l.covol_sq());
    }

    #[test]
    fn lifts_are_short(v in basis_strategy(3, 3), c in proptest::collection::vec(-4i64..=4, 2)) {
        let l = LatticeBasis::from_integer_vectors(&v).unwrap();
        let sv = l.shortest_vector();
        let q = l.quotient(&sv.vector).unwrap();
        let wbar = q.combination(&c);
        let w = l.minimal_lift(&sv.vector, &wbar).unwrap();
        // w lies in L, and no other lift w + t v is shorter.
        prop_assert!(l.lattice_coordinates(&w).is_ok());
        let vv = norm_sq(&sv.vector);
        prop_assert!(dot(&w, &sv.vector).abs() * rat(2) <= vv);
        prop_assert!(norm_sq(&w) <= norm_sq(&wbar) + vv / rat(4));
    }
}

#[test]
fn rational_lattices() {
    let l = LatticeBasis::new(vec![vec![ratio(1, 2), rat(0)], vec![rat(0), ratio(1, 3)]]).unwrap();
    assert_eq!(l.min_sq(), ratio(1, 9));
    assert_eq!(l.covol_sq(), ratio(1, 36));
    let s = l.scaled(&rat(6)).unwrap();
    assert_eq!(s.min_sq(), rat(4));
}

#[test]
fn coordinates_and_errors() {
    let l = LatticeBasis::from_integer_vectors(&[vec![2, 0], vec![1, 3]]).unwrap();
    assert_eq!(l.lattice_coordinates(&to_q(&[3, 3])).unwrap(), vec![1, 1]);
    assert!(matches!(l.lattice_coordinates(&to_q(&[1, 0])), Err(Error::NotInLattice)));
    assert!(matches!(l.quotient(&to_q(&[4, 0])), Err(Error::NotPrimitive)));
    assert!(l.minimal_lift(&to_q(&[2, 0]), &[Rational::zero(), rat(3)]).is_ok());
}
