//! Plot-ready CSV / JSON rendering of sweep rows.

use std::io::Write;

use cdrt_core::experiments::{RowMode, SweepAxis, SweepRow};
use cdrt_core::SchemeKind;
use serde::{Deserialize, Serialize};

use crate::config::Format;

pub const CSV_HEADER: &str = "axis,scheme,mode,op_x1,se_x1,op_x2,se_x2,op_x3,se_x3,est";

const SIG_DIGITS: usize = 12;

/// Positional decimal with 12 significant digits, '.' separator, no
/// exponent. Locale plays no part in Rust formatting.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x == 0.0 { "0".into() } else { x.to_string() };
    }
    // rounding is taken from the scientific form so 0.99999999999995 lands on 1
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("integer exponent");
    let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

/// JSON mirror of one CSV line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonRow {
    pub axis: f64,
    pub scheme: SchemeKind,
    pub mode: RowMode,
    pub op_x1: f64,
    pub se_x1: Option<f64>,
    pub op_x2: f64,
    pub se_x2: Option<f64>,
    pub op_x3: f64,
    pub se_x3: Option<f64>,
    pub est: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonTable {
    pub axis_name: SweepAxis,
    pub rows: Vec<JsonRow>,
}

impl From<&SweepRow> for JsonRow {
    fn from(r: &SweepRow) -> Self {
        JsonRow {
            axis: r.axis_value,
            scheme: r.scheme,
            mode: r.mode,
            op_x1: r.op[0].p,
            se_x1: r.op[0].std_err,
            op_x2: r.op[1].p,
            se_x2: r.op[1].std_err,
            op_x3: r.op[2].p,
            se_x3: r.op[2].std_err,
            est: r.est,
        }
    }
}

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let mut fields = vec![fmt_sig(r.axis_value), r.scheme.name().into(), r.mode.name().into()];
        for cell in &r.op {
            fields.push(fmt_sig(cell.p));
            fields.push(cell.std_err.map(fmt_sig).unwrap_or_default());
        }
        fields.push(fmt_sig(r.est));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn render_json(axis: SweepAxis, rows: &[SweepRow]) -> String {
    let table = JsonTable {
        axis_name: axis,
        rows: rows.iter().map(JsonRow::from).collect(),
    };
    let mut s = serde_json::to_string_pretty(&table).expect("rows serialise");
    s.push('\n');
    s
}

pub fn render(axis: SweepAxis, rows: &[SweepRow], format: Format) -> String {
    match format {
        Format::Csv => render_csv(rows),
        Format::Json => render_json(axis, rows),
    }
}

/// Writes `rows` to `out`.
pub fn emit_table<W: Write>(
    axis: SweepAxis,
    rows: &[SweepRow],
    format: Format,
    out: &mut W,
) -> std::io::Result<()> {
    out.write_all(render(axis, rows, format).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use cdrt_core::experiments::OpCell;

    fn row(mode: RowMode) -> SweepRow {
        let se = (mode == RowMode::Mc).then_some(1.5e-4);
        SweepRow {
            axis_value: 20.0,
            scheme: SchemeKind::Mdpr,
            mode,
            op: [
                OpCell { p: 0.031_079_999_999_9, std_err: se },
                OpCell { p: 1.0 / 3.0, std_err: se },
                OpCell { p: 1.234e-9, std_err: se },
            ],
            est: 0.4,
        }
    }

    #[test]
    fn significant_digit_rendering() {
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(20.0), "20.0000000000");
        assert_eq!(fmt_sig(1.234e-9), "0.00000000123400000000");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(0.999_999_999_999_95), "1.00000000000");
        assert_eq!(fmt_sig(-2.5), "-2.50000000000");
        assert_eq!(fmt_sig(123_456_789_012_345.0), "123456789012345");
    }

    #[test]
    fn one_row_csv() {
        let csv = render_csv(&[row(RowMode::Mc)]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("20.0000000000,MDPR,mc,0.0310799999999,0.000150000000000,"), "{}", lines[1]);
        assert_eq!(lines[1].split(',').count(), 10);
    }

    #[test]
    fn analytic_rows_leave_se_empty() {
        let csv = render_csv(&[row(RowMode::Analytic)]);
        let fields: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(fields[2], "analytic");
        assert_eq!((fields[4], fields[6], fields[8]), ("", "", ""));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let rows = vec![row(RowMode::Mc), row(RowMode::Analytic)];
        let text = render_json(SweepAxis::RhoDb, &rows);
        let back: JsonTable = serde_json::from_str(&text).unwrap();
        let orig: Vec<JsonRow> = rows.iter().map(JsonRow::from).collect();
        assert_eq!(back.rows, orig);
        assert_eq!(back.axis_name, SweepAxis::RhoDb);
    }

    #[test]
    fn rendering_is_repeatable() {
        let rows = vec![row(RowMode::Mc)];
        assert_eq!(render_csv(&rows), render_csv(&rows));
    }
}
