use proptest::prelude::*;

use qspinor::cli::{parse, parse_poly, print_canonical};
use qspinor::ncalg::{specs, AlgebraSpec, NCPoly, Word};
use qspinor::qcoeff::{GaussRat, LaurentScalar};
use qspinor::Error;

fn coefficient() -> impl Strategy<Value = LaurentScalar> {
    prop::collection::vec((-7i64..=7, 1i64..=5, -3i64..=3, 1i64..=2, -5i32..=5), 1..3).prop_map(|terms| {
        terms.into_iter().fold(LaurentScalar::zero(), |acc, (n, d, im, imd, e)| {
            let c = &GaussRat::from_ratio(n, d) + &(&GaussRat::from_ratio(im, imd) * &GaussRat::i());
            &acc + &LaurentScalar::monomial(c, e)
        })
    })
}

/// Degree at most 3 over `a, b, c`.
fn poly(spec: &'static AlgebraSpec) -> impl Strategy<Value = NCPoly> {
    let gens: Vec<u16> = ["a", "b", "c"].iter().map(|n| spec.index_of(n).unwrap()).collect();
    prop::collection::vec((prop::collection::vec(prop::sample::select(gens), 0..=3), coefficient()), 0..4)
        .prop_map(move |raw| spec.normal_order_terms(raw.into_iter().map(|(w, c)| (Word(w), c))).unwrap())
}

fn sl() -> &'static AlgebraSpec {
    use std::sync::OnceLock;
    static SPEC: OnceLock<AlgebraSpec> = OnceLock::new();
    SPEC.get_or_init(specs::slq2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_then_parse_is_identity(p in poly(sl())) {
        let spec = sl();
        let text = print_canonical(spec, &p);
        let back = parse_poly(spec, &text).unwrap();
        prop_assert_eq!(back, p, "{}", text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printing_is_deterministic(p in poly(sl())) {
        let spec = sl();
        prop_assert_eq!(print_canonical(spec, &p), print_canonical(spec, &p.clone()));
    }

    #[test]
    fn garbage_never_panics(s in "[a-d q i0-9+*/^() -]{0,24}") {
        let _ = parse_poly(sl(), &s);
    }
}

#[test]
fn product_order_is_kept() {
    let spec = specs::slq2();
    let ba = parse_poly(&spec, "b*a").unwrap();
    let ab = parse_poly(&spec, "a*b").unwrap();
    assert_eq!(ba, ab.scale(&LaurentScalar::q_pow(-1)));
    assert_ne!(ba, ab);
}

#[test]
fn canonical_examples() {
    let spec = specs::slq2();
    let det = parse_poly(&spec, "(a*d - q*b*c)").unwrap();
    assert_eq!(print_canonical(&spec, &det), "a*d - q*b*c");
    let da = parse_poly(&spec, "d*a").unwrap();
    assert_eq!(print_canonical(&spec, &da), "a*d + (-q + q^-1)*b*c");
    let half = parse_poly(&spec, "q^(1/2)*a*b - b*a").unwrap();
    assert_eq!(parse_poly(&spec, &print_canonical(&spec, &half)).unwrap(), half);
    assert_eq!(print_canonical(&spec, &NCPoly::zero()), "0");
}

#[test]
fn conjugate_names_parse() {
    let spec = specs::slq2_with_conjugate();
    let p = parse_poly(&spec, "dbar*abar").unwrap();
    assert_eq!(print_canonical(&spec, &p), "abar*dbar + (q - q^-1)*bbar*cbar");
}

#[test]
fn syntax_errors_report_line_and_column() {
    let cases = [
        ("a +", 1, 4),
        ("a * (b", 1, 7),
        ("a\n  * ) b", 2, 5),
        ("a $ b", 1, 3),
        ("q^(1/3)", 1, 6),
    ];
    for (src, line, column) in cases {
        match parse(src) {
            Err(Error::Syntax { line: l, column: c, .. }) => assert_eq!((l, c), (line, column), "{src:?}"),
            other => panic!("{src:?}: {other:?}"),
        }
    }
}
