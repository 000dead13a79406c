use std::f64::consts::PI;

use aperiodix_core::diffraction::*;
use aperiodix_core::geometry::positions_from_word;
use aperiodix_core::spectral::*;
use aperiodix_core::substitution::*;
use proptest::prelude::*;

fn family_word(idx: usize, n: usize) -> Vec<u8> {
    let r = SubstitutionRule::builtin(BUILTIN_FAMILIES[idx]).unwrap();
    let w = r.project(&expand_word(&r, 0, 12).unwrap());
    w[..n].to_vec()
}

proptest! {
    #[test]
    fn sturm_bisection_matches_oracle(fam in 0usize..5, n in 2usize..=12, va in -2.0f64..2.0, vb in -2.0f64..2.0) {
        let chain = build_chain(&family_word(fam, n), &Model::onsite(va, vb)).unwrap();
        let fast = eigenvalues_tridiag(&chain);
        let slow = brute_force_eigs(&chain).unwrap();
        prop_assert_eq!(fast.len(), slow.len());
        for (a, b) in fast.eigenvalues.iter().zip(&slow.eigenvalues) {
            prop_assert!((a - b).abs() < 1e-10, "{} vs {}", a, b);
        }
    }

    #[test]
    fn sturm_count_is_counting_function(fam in 0usize..5, n in 16usize..200, va in -2.0f64..2.0, vb in -2.0f64..2.0, e in -3.0f64..3.0) {
        let chain = build_chain(&family_word(fam, n), &Model::onsite(va, vb)).unwrap();
        let spec = eigenvalues_tridiag(&chain);
        // both count energies at or below e away from eigenvalues
        prop_assume!(spec.eigenvalues.iter().all(|&x| (x - e).abs() > 1e-9));
        let c = sturm_count(&chain, 2.0 * e);
        prop_assert_eq!(c as f64, (n as f64 * counting_function(&spec, e)).round());
    }

    #[test]
    fn potential_shift_moves_energies(fam in 0usize..5, n in 16usize..120, va in -2.0f64..2.0, vb in -2.0f64..2.0, c in -1.5f64..1.5) {
        let w = family_word(fam, n);
        let base = eigenvalues_tridiag(&build_chain(&w, &Model::onsite(va, vb)).unwrap());
        let moved = eigenvalues_tridiag(&build_chain(&w, &Model::onsite(va + c, vb + c)).unwrap());
        for (a, b) in base.eigenvalues.iter().zip(&moved.eigenvalues) {
            prop_assert!((b - a - c / 2.0).abs() < 1e-12, "{} {} {}", a, b, c);
        }
        let g0 = detect_gaps(&base, 10.0).unwrap();
        let g1 = detect_gaps(&moved, 10.0).unwrap();
        let ids0: Vec<usize> = g0.iter().map(|g| g.index).collect();
        let ids1: Vec<usize> = g1.iter().map(|g| g.index).collect();
        prop_assert_eq!(ids0, ids1);
    }

    #[test]
    fn eigenvalues_interlace(fam in 0usize..5, n in 3usize..=12, va in -2.0f64..2.0, vb in -2.0f64..2.0) {
        let chain = build_chain(&family_word(fam, n), &Model::onsite(va, vb)).unwrap();
        let full = brute_force_eigs(&chain).unwrap().eigenvalues;
        let sub = eigenvalues_tridiag(&chain.truncate(n - 1)).eigenvalues;
        for i in 0..n - 1 {
            prop_assert!(full[i] <= sub[i] + 1e-10 && sub[i] <= full[i + 1] + 1e-10);
        }
    }

    #[test]
    fn structure_factor_even_and_translation_invariant(
        letters in prop::collection::vec(0u8..2, 4..300),
        db in 0.5f64..2.5,
        shift in -100.0f64..100.0,
        k in 0.01f64..20.0,
    ) {
        let c = positions_from_word(&letters, &[1.0, db]).unwrap();
        let sc = Scatterers { x: c.positions.clone(), f: vec![1.0; c.len()], length: c.total_length };
        let moved = Scatterers { x: c.positions.iter().map(|x| x + shift).collect(), ..sc.clone() };
        let s = sc.structure_factor(k);
        prop_assert!((s - sc.structure_factor(-k)).abs() < 1e-10 * (1.0 + s));
        prop_assert!((s - moved.structure_factor(k)).abs() < 1e-10 * c.len() as f64);
    }
}

#[test]
fn periodic_comb() {
    let c = positions_from_word(&vec![0u8; 256], &[1.0]).unwrap();
    let sc = Scatterers::identical(&c);
    for m in 0..=4 {
        let s = sc.structure_factor(2.0 * PI * m as f64);
        assert!((s - 256.0).abs() < 1e-8, "m={m} S={s}");
    }
    // tails away from the comb: |G|² ≤ 1/sin²(k/2), so S ≤ 2 once sin²(k/2) ≥ 1/512
    for i in 0..400 {
        let k = 0.5 + i as f64 * (2.0 * PI - 1.0) / 400.0;
        assert!(sc.structure_factor(k) <= 2.0, "k={k}");
    }
}

#[test]
fn parallel_grid_matches_sequential() {
    let r = SubstitutionRule::builtin("fibonacci").unwrap();
    let sc = rule_scatterers::<f64>(&r, 14, Decoration::Auto, DEFAULT_LENGTH_CAP).unwrap();
    let spec = scatterer_grid(&sc, 0.1, 9.0, 997).unwrap();
    for (k, s) in spec.k_values.iter().zip(&spec.s) {
        assert_eq!(s.to_bits(), sc.structure_factor(*k).to_bits());
    }
}

#[test]
fn gap_labels_for_fibonacci() {
    // N = 987: bulk counting values in gaps are p + q/τ with small integers
    let r = SubstitutionRule::builtin("fibonacci").unwrap();
    let w = r.project(&expand_word(&r, 0, 14).unwrap());
    assert_eq!(w.len(), 987);
    let (_, gaps) = spectrum_and_gaps(&w, &Model::onsite(0.0, 1.0), 10.0).unwrap();
    assert!(gaps.len() >= 10);
    let g = aperiodix_core::groups::group_for_family("fibonacci").unwrap();
    for gap in &gaps {
        let (_, res) = aperiodix_core::groups::nearest_element(gap.label_value(), &g, &Default::default());
        assert!(res < 1e-4, "{gap:?}");
    }
}
