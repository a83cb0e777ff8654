//! Canonical serialization: sorted-key JSON, exact rational coordinates,
//! and plain-text table/CSV renderings. Output is deterministic byte for
//! byte across runs and platforms.

#[cfg(test)]
use std::str::FromStr;

#[cfg(test)]
use num_bigint::BigInt;
#[cfg(test)]
use num_rational::BigRational;
use serde_json::{Map, Value};

use gl2rep::chars::ClassFunction;
use gl2rep::cyclo::CycNum;
use gl2rep::gl2::ClassData;

/// Exact JSON number from a decimal string (arbitrary precision).
pub fn json_num(dec: &str) -> Value {
    serde_json::from_str(dec).expect("decimal literal")
}

/// Encode a cyclotomic number as {"conductor": N, "coords": [[num, den], ..]}
/// with one [numerator, denominator] pair per power-basis coordinate.
pub fn cyc_to_json(x: &CycNum) -> Value {
    let coords: Vec<Value> = x
        .coords()
        .iter()
        .map(|r| {
            Value::Array(vec![
                json_num(&r.numer().to_string()),
                json_num(&r.denom().to_string()),
            ])
        })
        .collect();
    let mut m = Map::new();
    m.insert("conductor".into(), Value::from(x.conductor()));
    m.insert("coords".into(), Value::Array(coords));
    Value::Object(m)
}

/// Decode the output of `cyc_to_json`.
#[cfg(test)]
pub fn cyc_from_json(v: &Value) -> Option<CycNum> {
    let obj = v.as_object()?;
    let n = obj.get("conductor")?.as_u64()?;
    let pairs = obj.get("coords")?.as_array()?;
    let mut coords = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let pair = pair.as_array()?;
        if pair.len() != 2 {
            return None;
        }
        let num = BigInt::from_str(&pair[0].as_number()?.to_string()).ok()?;
        let den = BigInt::from_str(&pair[1].as_number()?.to_string()).ok()?;
        if den == BigInt::from(0) {
            return None;
        }
        coords.push(BigRational::new(num, den));
    }
    CycNum::from_coords(n, coords).ok()
}

/// One conjugacy class per line: label, size, element order (tab-separated).
pub fn classes_text(classes: &[ClassData]) -> String {
    let mut out = String::from("# label\tsize\torder\n");
    for c in classes {
        out.push_str(&format!("{}\t{}\t{}\n", c.label, c.size, c.elt_order));
    }
    out
}

fn class_labels(q: u64) -> Result<Vec<String>, gl2rep::chars::CharError> {
    Ok(gl2rep::chars::class_list(q, None)?
        .iter()
        .map(|c| c.label.clone())
        .collect())
}

/// Character table as canonical JSON.
pub fn chartable_json(q: u64, table: &[ClassFunction]) -> Result<Value, gl2rep::chars::CharError> {
    let mut rows = Vec::with_capacity(table.len());
    for chi in table {
        let mut row = Map::new();
        row.insert("degree".into(), Value::from(chi.degree()?));
        row.insert("label".into(), Value::from(chi.label()));
        row.insert(
            "values".into(),
            Value::Array(chi.values().iter().map(|v| cyc_to_json(&v.to_cyc())).collect()),
        );
        rows.push(Value::Object(row));
    }
    let mut m = Map::new();
    m.insert(
        "classes".into(),
        Value::Array(class_labels(q)?.into_iter().map(Value::from).collect()),
    );
    m.insert("q".into(), Value::from(q));
    m.insert("rows".into(), Value::Array(rows));
    Ok(Value::Object(m))
}

/// Character table as CSV (root sums rendered in the z-power notation,
/// which never contains commas).
pub fn chartable_csv(q: u64, table: &[ClassFunction]) -> Result<String, gl2rep::chars::CharError> {
    let mut out = String::from("label");
    for l in class_labels(q)? {
        out.push(',');
        out.push_str(&l);
    }
    out.push('\n');
    for chi in table {
        out.push_str(chi.label());
        for v in chi.values() {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    Ok(out)
}

/// Character table as an aligned plain-text grid.
pub fn chartable_text(q: u64, table: &[ClassFunction]) -> Result<String, gl2rep::chars::CharError> {
    let headers = class_labels(q)?;
    let mut cells: Vec<Vec<String>> = vec![];
    let mut label_w = "character".len();
    for chi in table {
        label_w = label_w.max(chi.label().len());
        cells.push(chi.values().iter().map(|v| v.to_string()).collect());
    }
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in &cells {
        for (j, cell) in row.iter().enumerate() {
            widths[j] = widths[j].max(cell.len());
        }
    }
    let mut out = format!("{:<label_w$}", "character");
    for (h, w) in headers.iter().zip(&widths) {
        out.push_str(&format!("  {h:>w$}"));
    }
    out.push('\n');
    for (chi, row) in table.iter().zip(&cells) {
        out.push_str(&format!("{:<label_w$}", chi.label()));
        for (cell, w) in row.iter().zip(&widths) {
            out.push_str(&format!("  {cell:>w$}"));
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gl2rep::meataxe::Lcg;
    use num_traits::One;

    #[test]
    fn zeta4_encoding_is_frozen() {
        let z = CycNum::zeta(4, 1);
        assert_eq!(
            serde_json::to_string(&cyc_to_json(&z)).unwrap(),
            r#"{"conductor":4,"coords":[[0,1],[1,1]]}"#
        );
    }

    #[test]
    fn codec_round_trips_random_values() {
        let mut rng = Lcg::new(0xC0DEC);
        for _ in 0..100 {
            let n = [1u64, 3, 4, 5, 8, 12, 24][rng.below(7) as usize];
            let mut x = CycNum::zero();
            for _ in 0..=rng.below(4) {
                let num = rng.below(19) as i64 - 9;
                let den = 1 + rng.below(4) as i64;
                let term = CycNum::zeta(n, rng.below(n)).scale(&BigRational::new(
                    BigInt::from(num),
                    BigInt::from(den),
                ));
                x = x.add(&term);
            }
            let back = cyc_from_json(&cyc_to_json(&x)).unwrap();
            assert_eq!(back, x);
        }
    }

    #[test]
    fn big_coordinates_survive_the_codec() {
        let big = BigRational::new(
            BigInt::from_str("123456789012345678901234567890").unwrap(),
            BigInt::one(),
        );
        let x = CycNum::zeta(3, 1).scale(&big);
        let v = cyc_to_json(&x);
        assert_eq!(cyc_from_json(&v).unwrap(), x);
        assert!(serde_json::to_string(&v)
            .unwrap()
            .contains("123456789012345678901234567890"));
    }
}
