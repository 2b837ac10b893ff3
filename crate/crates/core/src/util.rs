//! Small shared helpers.

use alloc::string::String;

/// Trim and collapse runs of whitespace to a single space.
pub fn normalize_ws(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut in_ws = true; // leading whitespace is dropped
    for c in s.chars() {
        if c.is_whitespace() {
            in_ws = true;
        } else {
            if in_ws && !out.is_empty() {
                out.push(' ');
            }
            in_ws = false;
            out.push(c);
        }
    }
    out
}

/// Lowercase + whitespace-collapse, the normalization used for surface-form
/// comparison (pruning, overlap removal, audit lookups).
pub fn normalize_surface(s: &str) -> String {
    let collapsed = normalize_ws(s);
    let mut out = String::with_capacity(collapsed.len());
    for c in collapsed.chars() {
        for lc in c.to_lowercase() {
            out.push(lc);
        }
    }
    out
}

/// Round a non-negative value half-up to 2 decimal places.
///
/// Implemented without `std` float intrinsics; valid for the percentage
/// ranges used here (0..=100).
pub fn round2(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    ((x * 100.0 + 0.5) as u64) as f64 / 100.0
}
