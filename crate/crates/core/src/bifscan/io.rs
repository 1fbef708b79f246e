use std::fmt::Write as _;
use std::io::Write;

use super::{BifurcationEvent, EventKind};
use crate::error::{Error, Result};

/// 17 significant digits, `null` for non-finite values.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization")
}

/// Kind-specific fields as `(name, rendered value)`.
fn kind_fields(kind: &EventKind) -> Vec<(&'static str, String)> {
    match kind {
        EventKind::HomoclinicChord { centers, vertices, alpha_star } => vec![
            ("centers", format!("[{},{}]", centers.0, centers.1)),
            ("vertices", format!("[{},{}]", vertices.0, vertices.1)),
            ("alpha_star", format_f64(*alpha_star)),
        ],
        EventKind::MultiLoop { center, loop_count } => {
            vec![("center", center.to_string()), ("loop_count", loop_count.to_string())]
        }
        EventKind::Diagnostic { message } => vec![("message", json_str(message))],
        EventKind::ParabolicDelta | EventKind::ParabolicEps0 => Vec::new(),
    }
}

fn json_line(e: &BifurcationEvent) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "{{\"kind\":{},\"k\":{},\"s\":{},\"theta\":{},\"alpha\":{}",
        json_str(e.kind.name()),
        e.k,
        format_f64(e.coords.s),
        format_f64(e.coords.theta),
        format_f64(e.coords.alpha)
    );
    for (name, v) in kind_fields(&e.kind) {
        let _ = write!(s, ",\"{name}\":{v}");
    }
    s.push_str(",\"data\":{");
    for (i, (key, v)) in e.diagnostics.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{}:{}", json_str(key), format_f64(*v));
    }
    s.push_str("}}");
    s
}

/// One JSON object per line.
pub fn to_jsonl(events: &[BifurcationEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&json_line(e));
        out.push('\n');
    }
    out
}

pub fn write_jsonl<W: Write>(mut w: W, events: &[BifurcationEvent]) -> Result<()> {
    w.write_all(to_jsonl(events).as_bytes()).map_err(io_err)
}

const CSV_HEADER: [&str; 11] =
    ["kind", "k", "s", "theta", "alpha", "center_a", "center_b", "loop_count", "alpha_star", "message", "data"];

pub fn write_csv<W: Write>(w: W, events: &[BifurcationEvent]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(CSV_HEADER).map_err(csv_err)?;
    for e in events {
        let (mut a, mut b, mut lc, mut star, mut msg) =
            (String::new(), String::new(), String::new(), String::new(), String::new());
        match &e.kind {
            EventKind::HomoclinicChord { centers, alpha_star, .. } => {
                a = centers.0.to_string();
                b = centers.1.to_string();
                star = format_f64(*alpha_star);
            }
            EventKind::MultiLoop { center, loop_count } => {
                a = center.to_string();
                lc = loop_count.to_string();
            }
            EventKind::Diagnostic { message } => msg = message.clone(),
            _ => {}
        }
        let data: Vec<String> = e.diagnostics.iter().map(|(k, v)| format!("{k}={}", format_f64(*v))).collect();
        wr.write_record([
            e.kind.name().to_string(),
            e.k.to_string(),
            format_f64(e.coords.s),
            format_f64(e.coords.theta),
            format_f64(e.coords.alpha),
            a,
            b,
            lc,
            star,
            msg,
            data.join(";"),
        ])
        .map_err(csv_err)?;
    }
    wr.flush().map_err(io_err)
}

pub fn to_csv(events: &[BifurcationEvent]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, events)?;
    String::from_utf8(buf).map_err(|e| Error::InvalidConfig(e.to_string()))
}

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidConfig(format!("write failed: {e}"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidConfig(format!("csv: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Sphere;

    fn sample() -> Vec<BifurcationEvent> {
        let mut e = BifurcationEvent::new(
            EventKind::MultiLoop { center: 1, loop_count: 2 },
            5,
            Sphere::new(0.1, 0.0, 0.0),
        );
        e.diagnostics.insert("access_angle".into(), 1.0 / 3.0);
        let d = BifurcationEvent::new(
            EventKind::Diagnostic { message: "a \"quoted\", text".into() },
            5,
            Sphere::new(0.5, 1.0, 0.0),
        );
        vec![e, d]
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(format_f64(f64::NAN), "null");
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 12345.678] {
            assert_eq!(format_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn jsonl_lines_parse() {
        let text = to_jsonl(&sample());
        let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0]["kind"], "MultiLoop");
        assert_eq!(lines[0]["loop_count"], 2);
        assert_eq!(lines[0]["data"]["access_angle"].as_f64().unwrap(), 1.0 / 3.0);
        assert_eq!(lines[1]["message"], "a \"quoted\", text");
    }

    #[test]
    fn csv_has_one_row_per_event() {
        let text = to_csv(&sample()).unwrap();
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 2);
        assert_eq!(&rows[0][0], "MultiLoop");
        assert_eq!(&rows[1][9], "a \"quoted\", text");
    }
}
