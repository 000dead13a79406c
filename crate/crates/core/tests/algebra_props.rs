use aperiodix_core::bloch::*;
use aperiodix_core::cohomology::*;
use aperiodix_core::groups::*;
use aperiodix_core::intmat::{smith_normal_form, Matrix};
use aperiodix_core::substitution::*;
use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;

fn big(rows: Vec<Vec<i64>>) -> Matrix<BigInt> {
    Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect())
}

fn arb_square(max: usize, range: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max).prop_flat_map(move |n| prop::collection::vec(prop::collection::vec(-range..=range, n), n))
}

/// Random unimodular matrix as a product of elementary operations.
fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> Matrix<BigInt> {
    let mut u = Matrix::<BigInt>::identity(n);
    for &(i, j, c) in ops {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        for col in 0..n {
            let v = &u[(j, col)] * BigInt::from(c);
            u[(i, col)] += v;
        }
    }
    u
}

proptest! {
    #[test]
    fn smith_contract(rows in (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i64..=9, c), r))) {
        let a = big(rows);
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
        prop_assert_eq!(s.u.det().abs(), BigInt::from(1));
        prop_assert_eq!(s.v.det().abs(), BigInt::from(1));
        prop_assert_eq!(s.u.mul(&s.u_inv), Matrix::identity(a.nrows()));
        let f = s.invariant_factors();
        for w in f.windows(2) {
            prop_assert!((&w[1] % &w[0]) == BigInt::from(0));
        }
        for i in 0..s.d.nrows() {
            for j in 0..s.d.ncols() {
                prop_assert!(i == j || s.d[(i, j)] == BigInt::from(0));
            }
        }
    }

    #[test]
    fn direct_limit_is_conjugation_invariant(rows in arb_square(4, 3), ops in prop::collection::vec((0usize..4, 0usize..4, -2i64..=2), 0..8)) {
        let a = big(rows);
        let n = a.nrows();
        let u = unimodular(n, &ops);
        let s = smith_normal_form(&u);
        // the inverse of a unimodular u is v · u_s where u_s · u · v = I
        let u_inv = s.v.mul(&s.u);
        prop_assert_eq!(u.mul(&u_inv), Matrix::identity(n));
        let g = direct_limit(&a);
        let h = direct_limit(&u.mul(&a).mul(&u_inv));
        prop_assert_eq!(g.recognized, h.recognized);
        prop_assert_eq!(g.free_rank, h.free_rank);
        prop_assert_eq!(&g.localized, &h.localized);
        prop_assert_eq!(g.eventual_rank(), h.eventual_rank());
        prop_assert_eq!(g.char_poly(), h.char_poly());
        if g.recognized {
            prop_assert_eq!(g.rank(), g.eventual_rank());
        }
    }

    #[test]
    fn residuals_shrink_as_bounds_grow(x in -3.0f64..3.0, which in 0usize..4) {
        let g = match which {
            0 => LabelGroup::two_gen(golden_inverse()),
            1 => LabelGroup::scaled_localized(1, 3, 2).unwrap(),
            2 => LabelGroup::Cyclic { q: 7 },
            _ => LabelGroup::scaled_localized(1, 1, 3).unwrap(),
        };
        let mut last = f64::INFINITY;
        for (coef, depth) in [(2, 2), (5, 4), (10, 6), (30, 12), (60, 16)] {
            let (_, r) = nearest_element(x, &g, &SearchBounds { coef, depth });
            prop_assert!(r <= last + 1e-15);
            last = r;
        }
    }

    #[test]
    fn elements_round_trip(p in -30i64..=30, q in -30i64..=30) {
        let g = LabelGroup::two_gen(golden_inverse());
        let v = element_value(&g, &[p, q]);
        let (e, r) = nearest_element(v, &g, &SearchBounds::default());
        prop_assert!(r < 1e-12);
        prop_assert_eq!(element_value(&g, &e.coordinates), e.value);
        let d = LabelGroup::scaled_localized(1, 3, 2).unwrap();
        let m = 2 * (p % 15) + 1;
        let n = q.unsigned_abs() % 10;
        let v = element_value(&d, &[m, n as i64]);
        let (e, r) = nearest_element(v, &d, &SearchBounds::default());
        prop_assert_eq!(r, 0.0);
        prop_assert_eq!(e.coordinates, vec![m, n as i64]);
    }
}

#[test]
fn golden_group_is_not_vacuous() {
    // Z + ρZ is dense; at |p|, |q| ≤ 30 random points still sit measurably off it
    let g = LabelGroup::two_gen(golden_inverse());
    let mut res: Vec<f64> = (0..1000)
        .map(|i| {
            let x = ((i as f64 + 0.5) * 0.754_877_666_246_692_7).fract();
            nearest_element(x, &g, &SearchBounds::default()).1
        })
        .collect();
    res.sort_by(f64::total_cmp);
    let median = res[500];
    assert!(median > 0.0);
    // the default tolerance sits an order of magnitude below the median spacing floor
    assert!(median > 10.0 * 1e-4, "median {median}");
}

#[test]
fn table_cohomology_and_traces() {
    let expect = [
        ("periodic", "Z", LabelGroup::Cyclic { q: 2 }),
        ("fibonacci", "Z^2", LabelGroup::two_gen(golden_inverse())),
        ("thue-morse", "Z ⊕ Z[1/2]", LabelGroup::scaled_localized(1, 3, 2).unwrap()),
        ("period-doubling", "Z ⊕ Z[1/2]", LabelGroup::scaled_localized(1, 3, 2).unwrap()),
        ("rudin-shapiro", "Z ⊕ Z[1/2]^3", LabelGroup::scaled_localized(1, 1, 2).unwrap()),
    ];
    for (fam, h1, trace) in expect {
        let r = SubstitutionRule::builtin(fam).unwrap();
        let h = cech_h1(&r).unwrap();
        assert!(h.group.recognized, "{fam}");
        assert_eq!(h.group.to_string(), h1, "{fam}");
        assert_eq!(h.group.rank(), h.group.eventual_rank(), "{fam}");
        let t = trace_image(&r).unwrap();
        assert_eq!(t, trace, "{fam}");
        assert_eq!(t, group_for_family(fam).unwrap(), "{fam}");
        // the total frequency 1 lies in the trace image
        assert!(contains(1.0, &t, 1e-12, &SearchBounds::default()), "{fam}");
    }
    let fib = SubstitutionRule::builtin("fibonacci").unwrap();
    assert_eq!(cech_h1(&fib).unwrap().group.free_rank, fib.size());
}

#[test]
fn trace_generators_are_frequencies() {
    for fam in BUILTIN_FAMILIES {
        let t = trace_image_detail(&SubstitutionRule::builtin(fam).unwrap()).unwrap();
        assert!(t.frequency_values.iter().all(|&f| f > 0.0), "{fam}");
        assert!((t.frequency_values.iter().sum::<f64>() - 1.0).abs() < 1e-12, "{fam}");
    }
}

#[test]
fn collared_perron_eigenvalues() {
    let tau = (1.0 + 5f64.sqrt()) / 2.0;
    for (fam, lam) in [("fibonacci", tau), ("thue-morse", 2.0)] {
        let ca = collar(&SubstitutionRule::builtin(fam).unwrap()).unwrap();
        let m = ca.matrix.map(|&x| BigInt::from(x));
        let cp = aperiodix_core::poly::IntPoly::new(aperiodix_core::intmat::char_poly(&m));
        assert!(cp.eval_f64(lam).abs() < 1e-9, "{fam}");
        let top = cp.roots().iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!((top - lam).abs() < 1e-9, "{fam}");
    }
}

#[test]
fn no_fixed_point_is_reported() {
    // first letters cycle a → b → c → d → e → a, so no power up to 4 fixes one
    let r = SubstitutionRule::new(None, &["a", "b", "c", "d", "e"], &["b", "c", "d", "e", "ab"]).unwrap();
    assert!(occurrence_matrix(&r).is_primitive());
    assert_eq!(fixed_point_seed(&r), Err(aperiodix_core::Error::NoFixedPoint(4)));
    assert_eq!(cech_h1(&r).unwrap_err(), aperiodix_core::Error::NoFixedPoint(4));
    let swap = SubstitutionRule::new(None, &["a", "b"], &["ba", "ab"]).unwrap();
    assert_eq!(fixed_point_seed(&swap).unwrap(), (2, 0));
}

#[test]
fn bloch_reports_are_reproducible_and_monotone() {
    let r = SubstitutionRule::builtin("period-doubling").unwrap();
    let mut cfg = BlochConfig::for_rule(&r);
    cfg.diffraction_orders = vec![8, 9, 10, 11];
    let a = bloch_report("period-doubling", &cfg).unwrap();
    let b = bloch_report("period-doubling", &cfg).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(a.recompute_verdicts(), a.verdicts);
    let mut last = false;
    for tol in [1e-9, 1e-6, 1e-4, 1e-3, 1e-2] {
        let mut rep = a.clone();
        rep.config.thresholds.tol = tol;
        let v = rep.recompute_verdicts().gaps_in_trace_group;
        assert!(v || !last, "tol {tol}");
        last = v;
    }
}
