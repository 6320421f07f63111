use latvol::arith::ratio;
use latvol::dirichlet::product_error_table;
use latvol::measure::{spike_demo, spike_table, volume_ratio_experiment, volume_table};
use latvol::padic::tamagawa_table;
use latvol::report::{format_float, Cell, Table};
use proptest::prelude::*;

fn sample() -> Table {
    let mut t = Table::new("sample", &["n", "q", "x", "label"]).param("k", 2);
    t.push(vec![3u64.into(), ratio(-7, 4).into(), 0.1f64.into(), "a,b".into()]);
    t.push(vec![(u128::MAX).into(), ratio(0, 1).into(), 1e-30f64.into(), "quote\"d".into()]);
    t
}

#[test]
fn csv_round_trips() {
    let t = sample();
    let text = t.to_csv();
    assert!(text.starts_with("n,q,x,label\n"));
    assert!(!text.contains('\r'));
    let back = Table::read_csv_like(&t, &text).unwrap();
    assert_eq!(back, t);
    assert_eq!(back.to_csv(), text);
}

#[test]
fn json_shape() {
    let j = sample().to_json();
    assert_eq!(j["schema"], "sample");
    assert_eq!(j["params"]["k"], "2");
    assert_eq!(j["columns"][1], "q");
    assert_eq!(j["rows"][0][0], 3);
    assert_eq!(j["rows"][0][1], "-7/4");
    // Integers past i64 are written as strings.
    assert_eq!(j["rows"][1][0], u128::MAX.to_string());
}

#[test]
fn experiment_tables_are_deterministic() {
    let a = tamagawa_table(2, 200).unwrap().to_csv();
    let b = tamagawa_table(2, 200).unwrap().to_csv();
    assert_eq!(a, b);
    let v = volume_table(2, &volume_ratio_experiment(2, &[10.0, 100.0]).unwrap());
    assert_eq!(v.to_csv().lines().next().unwrap(), "T,count,reference,ratio");
    assert_eq!(v.rows[0][1], Cell::from(87u64));
    let p = product_error_table(&[10, 100]).unwrap().table();
    assert_eq!(p.to_csv(), product_error_table(&[10, 100]).unwrap().table().to_csv());
    let s = spike_table(&spike_demo(3, &[ratio(1, 4)]).unwrap());
    assert_eq!(s.columns.len(), 8);
}

proptest! {
    #[test]
    fn floats_keep_fifteen_digits(x in prop::num::f64::NORMAL) {
        let s = format_float(x);
        let y: f64 = s.parse().unwrap();
        prop_assert!(((y - x) / x).abs() <= 5e-15, "{x} -> {s}");
        // Reformatting the printed value is stable.
        prop_assert_eq!(format_float(y), s.clone());
        let mantissa = s.split('e').next().unwrap();
        let digits = mantissa.trim_start_matches('-').trim_start_matches(['0', '.']).bytes().filter(u8::is_ascii_digit).count();
        prop_assert!(digits <= 15, "{s}");
    }
}
