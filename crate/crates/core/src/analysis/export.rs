use std::io::Write;

use serde::Serialize;

use crate::analysis::alpha::AlphaField;
use crate::analysis::beta::BetaGrid;
use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// Versioned envelope for JSON reports.
#[derive(Clone, Debug, Serialize)]
pub struct Document<'a, T: Serialize> {
    pub schema: &'a str,
    pub version: u32,
    pub data: &'a T,
}

pub fn write_json<T: Serialize, W: Write>(out: W, schema: &str, data: &T) -> Result<()> {
    let doc = Document {
        schema,
        version: SCHEMA_VERSION,
        data,
    };
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, &doc)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn join_ints(h: &[i64]) -> String {
    h.iter().map(i64::to_string).collect::<Vec<_>>().join(";")
}

fn period_cell(t: f64) -> String {
    if t.is_finite() {
        format!("{t}")
    } else {
        "inf".into()
    }
}

/// `c_1,…,c_n,alpha,winner_h,winner_T,channel`; holes leave the value empty.
pub fn write_alpha_csv<W: Write>(out: W, field: &AlphaField) -> Result<()> {
    let n = field.lattice.dim();
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=n).map(|k| format!("c_{k}")).collect();
    header.extend(["alpha", "winner_h", "winner_T", "channel"].map(String::from));
    w.write_record(&header)?;
    for s in &field.samples {
        let mut row: Vec<String> = s.c.iter().map(|v| format!("{v}")).collect();
        row.push(s.alpha.map(|a| format!("{a}")).unwrap_or_default());
        match &s.winner {
            Some(win) => {
                row.push(join_ints(&win.h));
                row.push(period_cell(win.period));
                row.push(win.channel.clone());
            }
            None => row.extend([String::new(), String::new(), String::new()]),
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `rho_1,…,rho_n,beta,winner_h,winner_T,channel`.
pub fn write_beta_csv<W: Write>(out: W, grid: &BetaGrid) -> Result<()> {
    let n = grid.samples.first().map_or(0, |s| s.rotation.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=n).map(|k| format!("rho_{k}")).collect();
    header.extend(["beta", "winner_h", "winner_T", "channel"].map(String::from));
    w.write_record(&header)?;
    for s in &grid.samples {
        let mut row: Vec<String> = s.rotation.iter().map(|v| format!("{v}")).collect();
        row.push(format!("{}", s.beta));
        row.push(join_ints(&s.h));
        row.push(period_cell(s.period));
        row.push(s.channel.clone());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::lattice::Lattice;

    #[test]
    fn alpha_csv_header_and_holes() {
        let l = Lattice::slice(2, 0, -1.0, 1.0, 8).unwrap();
        let f = AlphaField::from_values(l, |c| (c[0] > 0.0).then_some(c[0]));
        let mut buf = Vec::new();
        write_alpha_csv(&mut buf, &f).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("c_1,c_2,alpha,winner_h,winner_T,channel")
        );
        assert_eq!(lines.next(), Some("-1,0,,,,"));
        assert_eq!(text.lines().count(), 9);
    }
}
