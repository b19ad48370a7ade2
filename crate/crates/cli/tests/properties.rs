use lrs_cli::analyze::{analyze_input, Options};
use lrs_cli::error::CliError;
use lrs_cli::input::{load, parse_model, DomainSpec, InputDocument, Kind, Structure};
use lrs_cli::oracle::check_smith;
use lrs_cli::report::Report;
use lrs_core::kernel::{Domain, Rational};
use num_bigint::BigInt;
use proptest::prelude::*;

fn literal() -> impl Strategy<Value = String> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| {
        let d = Domain::Rationals;
        d.format(&d.from_rational(&Rational::new(BigInt::from(p), BigInt::from(q))).unwrap())
    })
}

fn ring_document() -> impl Strategy<Value = InputDocument> {
    (1usize..=3).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::vec(proptest::collection::vec(literal(), n), n), n).prop_map(
            move |table| InputDocument {
                kind: Kind::Ring,
                domain: DomainSpec::Rationals,
                summands: None,
                target_summands: None,
                basis: (0..n).map(|i| format!("b{i}")).collect(),
                table,
            },
        )
    })
}

fn tensor(input: &lrs_cli::input::ParsedInput) -> Vec<Vec<Vec<String>>> {
    let Structure::Ring(r) = &input.structure else { panic!("ring document") };
    r.multiplication()
        .tensor()
        .iter()
        .map(|row| row.iter().map(|v| v.iter().map(|s| input.domain.format(s)).collect()).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn documents_round_trip(doc in ring_document()) {
        let text = doc.serialize();
        let parsed = parse_model(&text, "doc").unwrap();
        prop_assert_eq!(&parsed, &doc);
        let input = load(&text, "doc", None).unwrap();
        prop_assert_eq!(tensor(&input), doc.table.clone());
        prop_assert_eq!(input.document.serialize(), text);
    }

    #[test]
    fn bad_literals_are_located(doc in ring_document(), pick in any::<prop::sample::Index>()) {
        let n = doc.basis.len();
        let flat = pick.index(n * n * n);
        let (i, j, k) = (flat / (n * n), (flat / n) % n, flat % n);
        let mut bad = doc.clone();
        bad.table[i][j][k] = "1/0".into();
        let text = bad.serialize();
        let offset = text.find("\"1/0\"").unwrap();
        let line = text[..offset].matches('\n').count() + 1;
        let column = offset - text[..offset].rfind('\n').map_or(0, |p| p + 1) + 1;
        match load(&text, "doc", None) {
            Err(CliError::Validation { location, invariant, .. }) => {
                prop_assert_eq!(invariant, "exact literal");
                prop_assert_eq!((location.line, location.column), (line, column));
            }
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }

    #[test]
    fn smith_forms_check_out(rows in 1usize..=4, cols in 1usize..=4, seed in proptest::collection::vec(-30i64..=30, 16)) {
        let a: Vec<Vec<i64>> = (0..rows).map(|r| seed[r * 4..r * 4 + cols].to_vec()).collect();
        prop_assert!(check_smith(&a));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn analysis_is_deterministic(doc in ring_document()) {
        let input = load(&doc.serialize(), "doc", None).unwrap();
        let render = || match analyze_input(&input, Kind::Ring, &Options::default()) {
            Ok(body) => Report::new("analyze ring doc", body).to_text(),
            Err(e) => e.to_string(),
        };
        prop_assert_eq!(render(), render());
    }
}
