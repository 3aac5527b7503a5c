use std::io::Write;

use super::RunRecord;

pub const CSV_HEADER: &str = "run_id,optimizer,dataset,seed,epoch,split,metric,value";

/// C's `%.17g`: 17 significant digits, trailing zeros dropped, exponent form
/// when the decimal exponent is below -4 or at least 17.
pub fn format_g17(x: f64) -> String {
    const P: i32 = 17;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= P {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (P - 1 - exp) as usize, x)).to_owned()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_metrics<W: Write>(out: &mut W, records: &[RunRecord]) -> std::io::Result<()> {
    write!(out, "{CSV_HEADER}\n")?;
    for r in records {
        for row in &r.rows {
            write!(
                out,
                "{},{},{},{},{},{},{},{}\n",
                r.run_id,
                r.optimizer,
                r.dataset,
                r.seed,
                row.epoch,
                row.split.name(),
                row.metric.name(),
                format_g17(row.value)
            )?;
        }
    }
    Ok(())
}

pub fn metrics_csv(records: &[RunRecord]) -> String {
    let mut buf = Vec::new();
    write_metrics(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}
