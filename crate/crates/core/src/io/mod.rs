//! File formats: sample CSVs, Touchstone two-port data, curve tables and run
//! manifests. Outputs are staged and committed with temp-file renames.

mod manifest;
mod samples;
mod table;
mod touchstone;

pub use manifest::{digest_bytes, digest_file, FileDigest, OutputSet, RunManifest};
pub use samples::{
    k_samples_to_csv, read_sample_file, read_sample_file_at, read_samples, read_samples_file,
    samples_to_csv, SampleFile, K_SAMPLE_HEADER, SAMPLE_HEADER,
};
pub use table::{read_table, Table};
pub use touchstone::{parse_touchstone, read_touchstone_file, TouchstoneFormat, TouchstoneData};
