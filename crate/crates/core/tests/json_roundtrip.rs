use num_bigint::BigInt;
use serde::de::DeserializeOwned;
use serde::Serialize;
use twovolc::bounds::{height_bound_fp, table1_row, HeightBound, Table1Row};
use twovolc::curve::{curve_from_j, CurveJson, EllipticCurve};
use twovolc::field::FieldSpec;
use twovolc::sstest::{bench_steps, supersingularity_test, BenchOptions, BenchRow, BoundMode, WalkConfig, WalkReport};
use twovolc::verify::{verify_cases, VerifyReport};
use twovolc::volcano::{all_components, measure_height, summarize, sweep, ComponentSummary, SweepReport, SweepMode};

fn roundtrip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(v: &T) {
    let text = serde_json::to_string(v).unwrap();
    let back: T = serde_json::from_str(&text).unwrap();
    assert_eq!(&back, v, "{text}");
}

#[test]
fn reports_reparse() {
    let hb: HeightBound = height_bound_fp(&BigInt::from(40961)).unwrap();
    roundtrip(&hb);
    let text = serde_json::to_string(&hb).unwrap();
    assert!(text.contains("\"b_p\":\""), "big integers are decimal strings: {text}");

    let f = FieldSpec::prime(101).unwrap();
    let r: WalkReport = supersingularity_test(&curve_from_j(&f, &f.from_u64(3)), &WalkConfig::new(BoundMode::ImprovedH2)).unwrap();
    roundtrip(&r);
    roundtrip(&WalkConfig::new(BoundMode::ImprovedH1Fp));

    let v: VerifyReport = verify_cases(500).unwrap();
    roundtrip(&v);
    let s: SweepReport = sweep(30, SweepMode::Fp, 0).unwrap();
    roundtrip(&s);

    let comps = all_components(&f, 0).unwrap();
    for c in comps.iter().filter(|c| !c.contains_special_j) {
        let lv = measure_height(c).ok();
        let cs: ComponentSummary = summarize(c, lv.as_ref());
        roundtrip(&cs);
    }

    let t: Table1Row = table1_row(64, 3, 0).unwrap();
    roundtrip(&t);
    let rows: Vec<BenchRow> = bench_steps(12, 2, &[BoundMode::ImprovedH2], 0, &BenchOptions::default()).unwrap();
    roundtrip(&rows);
}

#[test]
fn curves_reparse_from_their_json() {
    let f = FieldSpec::quadratic(1009).unwrap();
    let e = EllipticCurve::new(&f, f.parse("3+4*s").unwrap(), f.parse("17").unwrap()).unwrap();
    let cj: CurveJson = e.to_json();
    let text = serde_json::to_string(&cj).unwrap();
    assert!(text.contains("\"A\"") && text.contains("\"B\""));
    let back = EllipticCurve::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back.j(), e.j());
}
