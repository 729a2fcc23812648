use std::io::Read;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scattering_stats::{KMatrix, Mat2, SampleTag, Source, TwoPort};

pub const SAMPLE_HEADER: [&str; 12] = [
    "source",
    "realization_id",
    "sample_index",
    "k",
    "s_aa_re",
    "s_aa_im",
    "s_ab_re",
    "s_ab_im",
    "s_ba_re",
    "s_ba_im",
    "s_bb_re",
    "s_bb_im",
];

pub const K_SAMPLE_HEADER: [&str; 12] = [
    "source",
    "realization_id",
    "sample_index",
    "k",
    "k_aa_re",
    "k_aa_im",
    "k_ab_re",
    "k_ab_im",
    "k_ba_re",
    "k_ba_im",
    "k_bb_re",
    "k_bb_im",
];

#[derive(Serialize, Deserialize)]
struct Row {
    source: String,
    realization_id: u64,
    sample_index: u64,
    k: f64,
    aa_re: f64,
    aa_im: f64,
    ab_re: f64,
    ab_im: f64,
    ba_re: f64,
    ba_im: f64,
    bb_re: f64,
    bb_im: f64,
}

impl Row {
    fn new(tag: &SampleTag, coord: f64, m: &Mat2<f64>) -> Self {
        Row {
            source: tag.source.as_str().to_string(),
            realization_id: tag.realization,
            sample_index: tag.index,
            k: coord,
            aa_re: m[0][0].re,
            aa_im: m[0][0].im,
            ab_re: m[0][1].re,
            ab_im: m[0][1].im,
            ba_re: m[1][0].re,
            ba_im: m[1][0].im,
            bb_re: m[1][1].re,
            bb_im: m[1][1].im,
        }
    }
}

fn to_csv(header: &[&str], rows: impl Iterator<Item = Row>) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::invalid("csv", e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    let row = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Parse { row, reason: e.to_string() }
}

pub fn samples_to_csv(samples: &[TwoPort<f64>]) -> Result<Vec<u8>> {
    to_csv(&SAMPLE_HEADER, samples.iter().map(|s| Row::new(&s.tag, s.coord, &s.s)))
}

pub fn k_samples_to_csv(ks: &[KMatrix<f64>]) -> Result<Vec<u8>> {
    to_csv(&K_SAMPLE_HEADER, ks.iter().map(|k| Row::new(&k.tag, k.coord, &k.k)))
}

/// Either kind of sample file, decided by its header.
#[derive(Debug, Clone, PartialEq)]
pub enum SampleFile {
    S(Vec<TwoPort<f64>>),
    K(Vec<KMatrix<f64>>),
}

/// Reads the S or K sample schema. Rows are numbered by file line, header = 1.
pub fn read_sample_file<R: Read>(reader: R) -> Result<SampleFile> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = r.headers().map_err(csv_err)?.clone();
    let is_k = if header.iter().eq(SAMPLE_HEADER.iter().copied()) {
        false
    } else if header.iter().eq(K_SAMPLE_HEADER.iter().copied()) {
        true
    } else {
        return Err(Error::Parse {
            row: 1,
            reason: format!("expected header {}", SAMPLE_HEADER.join(",")),
        });
    };
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(rows.len() + 2);
        let row: Row = rec.deserialize(None).map_err(|e| Error::Parse { row: line, reason: e.to_string() })?;
        let source = Source::parse(&row.source).ok_or_else(|| Error::Parse {
            row: line,
            reason: format!("unknown source {:?}", row.source),
        })?;
        let vals = [
            row.k, row.aa_re, row.aa_im, row.ab_re, row.ab_im, row.ba_re, row.ba_im, row.bb_re, row.bb_im,
        ];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse { row: line, reason: "non-finite value".into() });
        }
        let c = Complex64::new;
        let m = [
            [c(row.aa_re, row.aa_im), c(row.ab_re, row.ab_im)],
            [c(row.ba_re, row.ba_im), c(row.bb_re, row.bb_im)],
        ];
        let tag = SampleTag { source, realization: row.realization_id, index: row.sample_index };
        rows.push((m, row.k, tag));
    }
    Ok(if is_k {
        SampleFile::K(rows.into_iter().map(|(k, coord, tag)| KMatrix { k, coord, tag }).collect())
    } else {
        SampleFile::S(rows.into_iter().map(|(s, coord, tag)| TwoPort::new(s, coord, tag)).collect())
    })
}

/// Reads the S sample schema only.
pub fn read_samples<R: Read>(reader: R) -> Result<Vec<TwoPort<f64>>> {
    match read_sample_file(reader)? {
        SampleFile::S(s) => Ok(s),
        SampleFile::K(_) => Err(Error::Parse {
            row: 1,
            reason: "expected S samples, found K samples".into(),
        }),
    }
}

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse { row, reason } => Error::Parse {
            row,
            reason: format!("{}: {reason}", path.display()),
        },
        other => other,
    }
}

pub fn read_sample_file_at(path: impl AsRef<Path>) -> Result<SampleFile> {
    let path = path.as_ref();
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_sample_file(std::io::BufReader::new(f)).map_err(|e| with_path(path, e))
}

pub fn read_samples_file(path: impl AsRef<Path>) -> Result<Vec<TwoPort<f64>>> {
    let path = path.as_ref();
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_samples(std::io::BufReader::new(f)).map_err(|e| with_path(path, e))
}
