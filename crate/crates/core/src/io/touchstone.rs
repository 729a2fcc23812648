use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_sim::SPEED_OF_LIGHT;
use crate::scattering_stats::{SampleTag, Source, TwoPort};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TouchstoneFormat {
    /// Real and imaginary parts.
    Ri,
    /// Linear magnitude and angle in degrees.
    Ma,
    /// Magnitude in dB and angle in degrees.
    Db,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TouchstoneData {
    pub format: TouchstoneFormat,
    /// True when the format came from the data rather than an option line.
    pub format_guessed: bool,
    pub frequencies_hz: Vec<f64>,
    pub samples: Vec<TwoPort<f64>>,
}

fn unit_scale(u: &str) -> Option<f64> {
    match u {
        "HZ" => Some(1.0),
        "KHZ" => Some(1e3),
        "MHZ" => Some(1e6),
        "GHZ" => Some(1e9),
        _ => None,
    }
}

/// Guesses the pair format from the numbers: RI when every second member
/// of a pair lies in [−1, 1], otherwise DB if any first member is negative,
/// otherwise MA.
fn guess_format(records: &[(usize, [f64; 9])]) -> TouchstoneFormat {
    let second_small = records
        .iter()
        .all(|(_, r)| (0..4).all(|p| r[2 + 2 * p].abs() <= 1.0));
    if second_small {
        return TouchstoneFormat::Ri;
    }
    let first_negative = records
        .iter()
        .any(|(_, r)| (0..4).any(|p| r[1 + 2 * p] < 0.0));
    if first_negative {
        TouchstoneFormat::Db
    } else {
        TouchstoneFormat::Ma
    }
}

fn pair(format: TouchstoneFormat, a: f64, b: f64) -> Complex64 {
    match format {
        TouchstoneFormat::Ri => Complex64::new(a, b),
        TouchstoneFormat::Ma => Complex64::from_polar(a, b.to_radians()),
        TouchstoneFormat::Db => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
    }
}

/// Parses two-port Touchstone text (`.s2p`). Entries per frequency are in
/// the order S11 S21 S12 S22 and may wrap across lines. The spectral
/// coordinate of each sample is the vacuum wavenumber `2πf/c`.
pub fn parse_touchstone(text: &str, realization: u64) -> Result<TouchstoneData> {
    let mut scale = 1e9;
    let mut format = None;
    let mut seen_option = false;
    let mut tokens: Vec<(usize, f64)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('!').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(opts) = line.strip_prefix('#') {
            if seen_option {
                continue;
            }
            seen_option = true;
            format = Some(TouchstoneFormat::Ma);
            for w in opts.split_whitespace() {
                let w = w.to_ascii_uppercase();
                if let Some(s) = unit_scale(&w) {
                    scale = s;
                } else {
                    match w.as_str() {
                        "RI" => format = Some(TouchstoneFormat::Ri),
                        "MA" => format = Some(TouchstoneFormat::Ma),
                        "DB" => format = Some(TouchstoneFormat::Db),
                        "S" | "R" => {}
                        "Y" | "Z" | "H" | "G" => {
                            return Err(Error::Parse {
                                row: line_no,
                                reason: format!("only S parameters are supported, got {w}"),
                            })
                        }
                        _ if w.parse::<f64>().is_ok() => {}
                        _ => {
                            return Err(Error::Parse {
                                row: line_no,
                                reason: format!("unknown option {w:?}"),
                            })
                        }
                    }
                }
            }
            continue;
        }
        if line.starts_with('[') {
            return Err(Error::Parse {
                row: line_no,
                reason: "Touchstone 2.0 keywords are not supported".into(),
            });
        }
        for t in line.split_whitespace() {
            let v: f64 = t.parse().map_err(|_| Error::Parse {
                row: line_no,
                reason: format!("not a number: {t:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse { row: line_no, reason: "non-finite value".into() });
            }
            tokens.push((line_no, v));
        }
    }
    if tokens.len() % 9 != 0 {
        let row = tokens.last().map(|t| t.0).unwrap_or(0);
        return Err(Error::Parse {
            row,
            reason: format!("{} numbers do not form whole two-port records of 9", tokens.len()),
        });
    }
    if tokens.is_empty() {
        return Err(Error::Parse { row: 0, reason: "no data".into() });
    }
    let records: Vec<(usize, [f64; 9])> = tokens
        .chunks(9)
        .map(|c| (c[0].0, std::array::from_fn(|i| c[i].1)))
        .collect();
    let guessed = format.is_none();
    let format = format.unwrap_or_else(|| guess_format(&records));
    let mut freqs = Vec::with_capacity(records.len());
    let mut samples = Vec::with_capacity(records.len());
    let mut last = f64::NEG_INFINITY;
    for (index, (line, r)) in records.iter().enumerate() {
        let f = r[0] * scale;
        if !(f > 0.0) || f <= last {
            return Err(Error::Parse {
                row: *line,
                reason: "frequencies must be positive and strictly increasing".into(),
            });
        }
        last = f;
        let s11 = pair(format, r[1], r[2]);
        let s21 = pair(format, r[3], r[4]);
        let s12 = pair(format, r[5], r[6]);
        let s22 = pair(format, r[7], r[8]);
        freqs.push(f);
        samples.push(TwoPort::new(
            [[s11, s12], [s21, s22]],
            2.0 * PI * f / SPEED_OF_LIGHT,
            SampleTag { source: Source::Measured, realization, index: index as u64 },
        ));
    }
    Ok(TouchstoneData { format, format_guessed: guessed, frequencies_hz: freqs, samples })
}

pub fn read_touchstone_file(path: impl AsRef<Path>, realization: u64) -> Result<TouchstoneData> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_touchstone(&text, realization).map_err(|e| match e {
        Error::Parse { row, reason } => Error::Parse { row, reason: format!("{}: {reason}", path.display()) },
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const RI: &str = "! two-port\n# GHz S RI R 50\n3.0 0.1 0.2 0.3 0.4 0.5 0.6 0.7 0.8\n3.5 0 0 1 0\n  0 1 0 0\n";

    #[test]
    fn reads_ri_with_wrapped_record() {
        let d = parse_touchstone(RI, 7).unwrap();
        assert_eq!(d.format, TouchstoneFormat::Ri);
        assert!(!d.format_guessed);
        assert_eq!(d.samples.len(), 2);
        let s = &d.samples[0];
        // S21 is the second pair, stored at [1][0]
        assert_eq!(s.s[1][0], Complex64::new(0.3, 0.4));
        assert_eq!(s.s[0][1], Complex64::new(0.5, 0.6));
        assert_eq!(s.tag.realization, 7);
        assert!((s.coord - 2.0 * PI * 3e9 / SPEED_OF_LIGHT).abs() < 1e-9);
        assert_eq!(d.samples[1].s[0][1], Complex64::new(0.0, 1.0));
    }

    #[test]
    fn ma_and_db_agree() {
        let ma = "# MHZ S MA\n3000 0.5 90 1 0 1 180 0.1 -45\n";
        let db = format!("# MHZ S DB\n3000 {} 90 0 0 0 180 -20 -45\n", 20.0 * 0.5f64.log10());
        let a = parse_touchstone(ma, 0).unwrap().samples;
        let b = parse_touchstone(&db, 0).unwrap().samples;
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[0].s[i][j] - b[0].s[i][j]).norm() < 1e-12);
            }
        }
        assert!((a[0].s[0][0] - Complex64::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn format_is_guessed_without_option_line() {
        let d = parse_touchstone("3 0.1 0.2 0.3 0.4 0.5 0.6 0.7 0.8\n", 0).unwrap();
        assert!(d.format_guessed);
        assert_eq!(d.format, TouchstoneFormat::Ri);
        let d = parse_touchstone("3 0.5 90 1 0 1 180 0.1 -45\n", 0).unwrap();
        assert_eq!(d.format, TouchstoneFormat::Ma);
        let d = parse_touchstone("3 -6 90 0 0 0 180 -20 -45\n", 0).unwrap();
        assert_eq!(d.format, TouchstoneFormat::Db);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "# GHZ S RI\n3 0 0 0 0 0 0 0 0\n4 0 0 x 0 0 0 0 0\n";
        assert!(matches!(parse_touchstone(bad, 0), Err(Error::Parse { row: 3, .. })));
        let short = "# GHZ S RI\n3 0 0 0 0 0 0 0\n";
        assert!(matches!(parse_touchstone(short, 0), Err(Error::Parse { row: 2, .. })));
        let order = "# GHZ S RI\n4 0 0 0 0 0 0 0 0\n3 0 0 0 0 0 0 0 0\n";
        assert!(matches!(parse_touchstone(order, 0), Err(Error::Parse { row: 3, .. })));
        assert!(parse_touchstone("# GHZ Z RI\n", 0).is_err());
    }
}
