//! Decimal formatting shared by the alignment XML and CSV writers.

/// Formats a finite value as a plain decimal with up to 10 significant
/// digits, using the shortest representation of the rounded value.
pub fn fmt_decimal(v: f64) -> String {
    debug_assert!(v.is_finite(), "non-finite values are rejected upstream");
    if v == 0.0 {
        return "0".to_string();
    }
    // {:.9e} keeps one digit before the point plus nine after: 10 significant digits.
    let rounded: f64 = format!("{v:.9e}").parse().unwrap_or(v);
    format!("{rounded}")
}

/// The value that [`fmt_decimal`] output parses back to; serialization is
/// lossless exactly for values that are fixed points of this map.
pub fn canonical_value(v: f64) -> f64 {
    fmt_decimal(v).parse().unwrap_or(v)
}
