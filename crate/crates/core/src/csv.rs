//! Numeric formatting shared by every CSV writer: 17 significant digits, so
//! each value parses back to the identical `f64`.

use crate::error::{Error, Result};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Missing values are written as empty fields.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn parse_f64(field: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Format(format!("`{field}` is not a number")))
}

pub fn parse_opt(field: &str) -> Result<Option<f64>> {
    if field.trim().is_empty() {
        Ok(None)
    } else {
        parse_f64(field).map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn missing_values_are_empty() {
        assert_eq!(fmt_opt(None), "");
        assert_eq!(parse_opt("").unwrap(), None);
        assert!(parse_f64("abc").is_err());
    }

    proptest! {
        #[test]
        fn formatting_is_lossless(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let back = parse_f64(&fmt_f64(x)).unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
