use latvol::arith::{rat, ratio, Rational};
use latvol::dirichlet::{
    abelian_limit, hurwitz_zeta, riemann_zeta, riemann_zeta_with_bound, sigma_sieve,
    sigma_summatory, subgroup_zeta, tail_sum, volume_constant, DirichletSeries, PsiSeries,
};
use latvol::hnf::count_by_index;
use num_traits::Zero;
use proptest::prelude::*;

/// `zeta(s)` by a direct sum over `n < N` plus the tail integral bracket
/// `int_N^inf x^-s dx <= sum_{n >= N} n^-s <= N^-s + int_N^inf x^-s dx`.
fn zeta_bracket(s: f64, n: usize) -> (f64, f64) {
    let mut acc = 0.0;
    for i in (1..n).rev() {
        acc += (i as f64).powf(-s);
    }
    let nf = n as f64;
    let integral = nf.powf(1.0 - s) / (s - 1.0);
    (acc + integral, acc + integral + nf.powf(-s))
}

#[test]
fn zeta_within_direct_bracket() {
    for s in [2.0, 3.0, 4.0, 2.5, 7.0] {
        let (lo, hi) = zeta_bracket(s, 1_000_000);
        let z = riemann_zeta(s).unwrap();
        assert!(z >= lo - 1e-12 && z <= hi + 1e-12, "s={s}: {lo} <= {z} <= {hi}");
    }
    // Closed forms.
    let pi = std::f64::consts::PI;
    assert!((riemann_zeta(2.0).unwrap() - pi * pi / 6.0).abs() < 1e-14);
    assert!((riemann_zeta(4.0).unwrap() - pi.powi(4) / 90.0).abs() < 1e-14);
    let head: f64 = (1..=5).map(|n| (n as f64).powi(-30)).sum();
    assert!((riemann_zeta(30.0).unwrap() - head).abs() < 1e-15);
    let b = riemann_zeta_with_bound(3.0).unwrap();
    assert!(b.remainder_bound < 1e-15);
}

#[test]
fn hurwitz_shift_identity() {
    // zeta(s, q) = q^-s + zeta(s, q + 1).
    for s in [1.5, 2.0, 3.3] {
        for q in [0.5, 1.5, 2.25] {
            let lhs = hurwitz_zeta(s, q).unwrap();
            let rhs = q.powf(-s) + hurwitz_zeta(s, q + 1.0).unwrap();
            assert!((lhs - rhs).abs() < 1e-13 * lhs, "s={s} q={q}");
        }
    }
    // zeta(s, 1/2) = (2^s - 1) zeta(s).
    let s = 3.0;
    assert!((hurwitz_zeta(s, 0.5).unwrap() - 7.0 * riemann_zeta(s).unwrap()).abs() < 1e-13);
}

#[test]
fn convolution_of_zetas_is_sigma() {
    let n = 2000;
    let c = DirichletSeries::zeta(n).convolve(&DirichletSeries::shifted_zeta(1, n), n).unwrap();
    let sigma = sigma_sieve(n);
    for i in 1..=n {
        assert_eq!(c.coeff(i).unwrap(), &rat(sigma[i] as i64));
    }
    // Hyperbola form: sum_{n <= T} c_n = sum_{p <= T} a_p B(floor(T/p)).
    for t in [1u64, 7, 100, 999, 2000] {
        let lhs = c.summatory(&rat(t as i64)).unwrap();
        let direct: u128 = (1..=t).map(|d| d as u128 * (t / d) as u128).sum();
        assert_eq!(lhs, rat(direct as i64));
        assert_eq!(sigma_summatory(t), direct);
    }
}

#[test]
fn convolution_with_unit() {
    let a = DirichletSeries::new((1..=50).map(|i| ratio(i * i + 3, i + 1)).collect()).unwrap();
    assert_eq!(a.convolve(&DirichletSeries::delta(50), 50).unwrap(), a);
}

#[test]
fn weighted_summatory() {
    let s = DirichletSeries::with_weights(
        vec![rat(1), rat(2), rat(3)],
        vec![ratio(3, 2), ratio(5, 2), ratio(7, 2)],
    )
    .unwrap();
    assert_eq!(s.summatory(&rat(1)).unwrap(), Rational::zero());
    assert_eq!(s.summatory(&ratio(5, 2)).unwrap(), rat(3));
    assert_eq!(s.summatory(&rat(3)).unwrap(), rat(3));
    assert!(s.summatory(&rat(4)).is_err());
    assert!(DirichletSeries::with_weights(vec![rat(1), rat(1)], vec![rat(2), rat(1)]).is_err());
}

#[test]
fn sigma_tail_decays() {
    // sum_{T <= n <= 2T} sigma(n) n^-4 <= 2 zeta(2) T^-2 * const; checks the T^-2 rate.
    let sigma = sigma_sieve(20_001);
    let mut prev = f64::INFINITY;
    for t in [100usize, 1000, 10_000] {
        let tail = tail_sum(&sigma, 4.0, t, 2 * t).unwrap();
        let scaled = tail * (t * t) as f64;
        assert!(scaled < 1.0, "T={t}: {scaled}");
        assert!(scaled <= prev * 1.05);
        prev = scaled;
    }
}

#[test]
fn sublattice_series_matches_zeta_product() {
    // sum_n a_n(Z^2) n^-4 against zeta(4) zeta(3), with the remaining tail
    // bounded by sum_{n > N} sigma(n) n^-4 <= zeta(2) * N^-2 roughly.
    let n = 500u64;
    let mut acc = 0.0;
    for i in (1..=n).rev() {
        acc += count_by_index(2, i).unwrap() as f64 * (i as f64).powi(-4);
    }
    let target = subgroup_zeta(2, 4.0).unwrap();
    let gap = target - acc;
    assert!(gap > 0.0 && gap < 2.0 / (n * n) as f64, "gap {gap}");
}

#[test]
fn volume_constants() {
    assert_eq!(volume_constant(1).unwrap(), 1.0);
    let z2 = riemann_zeta(2.0).unwrap();
    let z3 = riemann_zeta(3.0).unwrap();
    assert!((volume_constant(2).unwrap() - z2 / 2.0).abs() < 1e-15);
    assert!((volume_constant(3).unwrap() - z2 * z3 / 3.0).abs() < 1e-15);
    assert!(subgroup_zeta(2, 2.0).is_err());
    assert!(volume_constant(0).is_err());
}

#[test]
fn abelian_limits_approach_residue() {
    let s_list = [1.5, 1.1, 1.01, 1.001, 1.0001];
    for psi in [PsiSeries::HalfShifted] {
        let rows = abelian_limit(&psi, &s_list).unwrap();
        let res = psi.residue().unwrap();
        let errs: Vec<f64> = rows.iter().map(|(_, v)| (v - res).abs()).collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
        assert!(*errs.last().unwrap() < 1e-3);
    }
    let psi = PsiSeries::SubgroupZeta(2);
    let rows = abelian_limit(&psi, &[2.1, 2.01, 2.001]).unwrap();
    let res = psi.residue().unwrap();
    assert!((rows[2].1 - res).abs() < 2e-3);
    assert!(PsiSeries::Zero.eval(0.5).is_err());
}

proptest! {
    #[test]
    fn convolution_is_commutative(
        a in proptest::collection::vec(0i64..=20, 1..40),
        b in proptest::collection::vec(0i64..=20, 1..40),
    ) {
        let n = a.len().min(b.len());
        let sa = DirichletSeries::new(a.iter().map(|&x| rat(x)).collect()).unwrap();
        let sb = DirichletSeries::new(b.iter().map(|&x| rat(x)).collect()).unwrap();
        prop_assert_eq!(sa.convolve(&sb, n).unwrap(), sb.convolve(&sa, n).unwrap());
        // Direct divisor sum.
        let c = sa.convolve(&sb, n).unwrap();
        for m in 1..=n {
            let direct: i64 = (1..=m).filter(|d| m % d == 0).map(|d| a[d - 1] * b[m / d - 1]).sum();
            prop_assert_eq!(c.coeff(m).unwrap(), &rat(direct));
        }
    }
}
