//! Helpers shared by the plain-text file formats.

/// Round-trip-safe decimal with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}
