//! Text exports with fixed 9-significant-digit formatting, so reruns
//! produce byte-identical files on every platform.

use std::fmt::Write;

use crate::synthesis::{FieldGrid, Spectrum, Waveform};
use crate::trajectory::PointSeries;

/// Formats `x` like C's `%.9g`.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_fraction(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_fraction(mantissa.to_string()))
    }
}

fn trim_fraction(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

fn two_columns(header: &str, rows: impl Iterator<Item = (f64, f64)>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for (a, b) in rows {
        // Writing to a String cannot fail.
        let _ = writeln!(out, "{},{}", fmt_sig9(a), fmt_sig9(b));
    }
    out
}

/// `t_s,p` rows.
pub fn waveform_csv(w: &Waveform) -> String {
    two_columns(
        "t_s,p",
        w.samples
            .iter()
            .enumerate()
            .map(|(i, &p)| (w.time_at(i), p)),
    )
}

/// `f_hz,magnitude` rows.
pub fn spectrum_csv(s: &Spectrum) -> String {
    two_columns(
        "f_hz,magnitude",
        s.frequencies
            .iter()
            .copied()
            .zip(s.magnitudes.iter().copied()),
    )
}

/// `t_s,x_mm,y_mm` rows.
pub fn point_series_csv(p: &PointSeries) -> String {
    let mut out = String::from("t_s,x_mm,y_mm\n");
    for (i, q) in p.points.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_sig9(p.time_at(i)),
            fmt_sig9(q.x),
            fmt_sig9(q.y)
        );
    }
    out
}

/// `{origin_mm, spacing_mm, rows, cols, values}` with row-major values.
pub fn field_grid_json(g: &FieldGrid) -> String {
    serde_json::to_string(g).expect("field grid serializes")
}
