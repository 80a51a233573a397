use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qspinor::cli::suites;
use qspinor::ncalg::specs;
use qspinor::repr::{self, FactorialConvention, FormulaConvention, ReprConvention, TildePrefactor};
use qspinor::spinor::{numeric_assignment, numeric::CMat2};

fn random_matrix(rng: &mut ChaCha8Rng) -> CMat2 {
    let mut z = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    [[z(), z()], [z(), z()]]
}

/// Symmetric square in the monomial basis `x^2, xy, y^2`, written out by hand.
fn symmetric_square(t: &CMat2) -> [[Complex64; 3]; 3] {
    let [[a, b], [c, d]] = *t;
    let two = Complex64::new(2.0, 0.0);
    [
        [a * a, two * a * b, b * b],
        [a * c, a * d + b * c, b * d],
        [c * c, two * c * d, d * d],
    ]
}

#[test]
fn spin_one_at_q_one_is_the_symmetric_square() {
    let d = repr::derive_dmatrix(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let t = random_matrix(&mut rng);
        let got = repr::evaluate_at_one(&d.entries, &numeric_assignment(specs::T_NAMES, &t)).unwrap();
        let want = symmetric_square(&t);
        for r in 0..3 {
            for c in 0..3 {
                assert!((got[r][c] - want[r][c]).norm() < 1e-12, "({r},{c})");
            }
        }
    }
}

#[test]
fn numeric_symmetric_power_agrees_with_hand_square() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let t = random_matrix(&mut rng);
    let lib = repr::symmetric_power(2, &t);
    let hand = symmetric_square(&t);
    for r in 0..3 {
        for c in 0..3 {
            assert!((lib[r][c] - hand[r][c]).norm() < 1e-12);
        }
    }
}

#[test]
fn spin_one_exact_entries() {
    let d = repr::derive_dmatrix(2).unwrap();
    let spec = d.entries.spec();
    let show = |r, c| spec.render(d.entries.get(r, c));
    assert_eq!(show(0, 0), "a*a");
    assert_eq!(show(0, 1), "(q^-1 + q^-3)*a*b");
    assert_eq!(show(1, 1), "a*d + q^-1*b*c");
    assert_eq!(show(2, 1), "(1 + q^-2)*c*d");
    assert_eq!(show(2, 2), "d*d");
}

#[test]
fn coproduct_holds_through_spin_three_halves() {
    for j2 in 1..=3 {
        let (ok, detail) = suites::coproduct_residual(j2).unwrap();
        assert!(ok, "2j = {j2}: {detail}");
    }
}

#[test]
fn closed_form_matches_derivation() {
    let conv = FormulaConvention::frozen();
    for j2 in 0..=4 {
        let d = repr::derive_dmatrix(j2).unwrap();
        let f = repr::formula_dmatrix(j2, &conv).unwrap();
        assert!(repr::compare_dmatrices(&d, &f).unwrap().is_empty(), "2j = {j2}");
    }
}

#[test]
fn low_spin_invariance_holds_for_every_convention() {
    for f in FactorialConvention::ALL {
        for j2 in 0..=1 {
            let conv = ReprConvention { factorial: f, tilde: TildePrefactor::Printed };
            assert!(repr::q_invariance_residual(j2, &conv).unwrap().is_zero(), "{f} 2j = {j2}");
        }
    }
}

#[test]
fn printed_tilde_prefactor_does_not_close_at_spin_one() {
    let rep = repr::check_expansion(2, TildePrefactor::Printed).unwrap();
    assert!(rep.lemma);
    assert_eq!(rep.lines[0].closing.len(), FactorialConvention::ALL.len());
    assert_eq!(rep.lines[1].closing.len(), FactorialConvention::ALL.len());
    assert!(rep.lines[2].closing.is_empty());
    assert!(rep.resolved().is_none());
}

#[test]
fn inverted_tilde_prefactor_closes() {
    let conv = suites::corrected_reading(4).unwrap();
    assert_eq!(conv, Some(FactorialConvention::BasicInverseSquared));
}

#[test]
fn dimensions_and_norms() {
    for j2 in 0..=4 {
        let d = repr::derive_dmatrix(j2).unwrap();
        assert_eq!(d.dim(), (j2 + 1) as usize);
        assert_eq!(d.norm_sq.len(), d.dim());
        assert!(d.norm_sq.iter().all(|n| !n.is_zero()));
    }
    assert!(repr::derive_dmatrix(repr::MAX_J2 + 1).is_err());
}
