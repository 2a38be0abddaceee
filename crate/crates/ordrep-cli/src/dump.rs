use ordrep::orbits::Orbit;
use serde::{Deserialize, Serialize};

use crate::manifest::Format;
use crate::CliError;

pub const DIGITS: usize = 30;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Point {
    pub index: u64,
    pub value: String,
}

pub fn points(orbit: &Orbit) -> Vec<Point> {
    orbit
        .entries()
        .iter()
        .map(|(n, v)| Point { index: *n, value: v.value().to_decimal(DIGITS) })
        .collect()
}

/// One "index,value" line per entry after a header, or a JSON array.
pub fn dump_points(orbit: &Orbit, format: Format) -> String {
    let pts = points(orbit);
    match format {
        Format::Csv => {
            let mut out = String::from("index,value\n");
            for p in &pts {
                out.push_str(&format!("{},{}\n", p.index, p.value));
            }
            out
        }
        Format::Json => serde_json::to_string_pretty(&pts).expect("points serialize") + "\n",
    }
}

pub fn parse_points(text: &str, format: Format) -> Result<Vec<Point>, CliError> {
    match format {
        Format::Json => serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string())),
        Format::Csv => {
            let mut lines = text.lines();
            if lines.next() != Some("index,value") {
                return Err(CliError::Parse("missing csv header".into()));
            }
            lines
                .filter(|l| !l.is_empty())
                .map(|l| {
                    let (i, v) = l.split_once(',').ok_or_else(|| CliError::Parse(l.to_string()))?;
                    Ok(Point { index: i.parse().map_err(|_| CliError::Parse(l.to_string()))?, value: v.to_string() })
                })
                .collect()
        }
    }
}
