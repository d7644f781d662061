//! parse(print(doc)) = doc on the fixtures and on generated documents.

use std::fs;
use std::path::PathBuf;

use hclosed_cli::model::{Item, Loc, VicinityDecl};
use hclosed_cli::{parse_model, Model, ModelDocument};
use proptest::prelude::*;

#[test]
fn fixtures_round_trip() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.file_name().unwrap().to_string_lossy() == "bad_syntax.pt" {
            continue;
        }
        let doc = parse_model(&fs::read_to_string(&path).unwrap()).unwrap();
        let printed = doc.to_string();
        assert_eq!(parse_model(&printed).unwrap(), doc, "{}", path.display());
        assert_eq!(parse_model(&printed).unwrap().to_string(), printed);
        seen += 1;
    }
    assert!(seen >= 4);
}

fn arb_space(idx: usize) -> impl Strategy<Value = Item> {
    (1usize..=4, prop::collection::vec(any::<u8>(), 4)).prop_map(move |(n, bits)| {
        let points: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let vicinities = (0..n)
            .filter(|&i| bits[i] & 1 == 1)
            .map(|i| VicinityDecl {
                point: points[i].clone(),
                set: (0..n).filter(|&j| j == i || bits[i] >> (j + 1) & 1 == 1).map(|j| points[j].clone()).collect(),
                loc: Loc::default(),
            })
            .collect();
        Item::Space { name: format!("S{idx}"), points, vicinities, loc: Loc::default() }
    })
}

fn arb_doc() -> impl Strategy<Value = ModelDocument> {
    (arb_space(0), arb_space(1), arb_space(2), any::<u16>()).prop_map(|(a, b, c, seed)| {
        let mut items = vec![a, b, c];
        let Item::Space { points: src, .. } = &items[0] else { unreachable!() };
        let Item::Space { points: dst, .. } = &items[1] else { unreachable!() };
        let pairs = src.iter().enumerate().map(|(i, p)| (p.clone(), dst[(seed as usize >> i) % dst.len()].clone(), Loc::default())).collect();
        items.push(Item::Map { name: "f".into(), source: "S0".into(), target: "S1".into(), pairs, loc: Loc::default() });
        items.push(Item::Builtin { name: "R".into(), kind: format!("discrete_ray({})", seed % 3 + 1), loc: Loc::default() });
        items.push(Item::Set { name: "T".into(), literal: "{p0} | ~{p1}".into(), loc: Loc::default() });
        ModelDocument { items }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_documents_parse_back(doc in arb_doc()) {
        let printed = doc.to_string();
        let back = parse_model(&printed).unwrap();
        prop_assert_eq!(&back, &doc);
        // generated documents are valid, and stay valid after the trip
        prop_assert!(Model::resolve(&back).is_ok());
    }
}
