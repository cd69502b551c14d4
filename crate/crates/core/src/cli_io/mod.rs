//! Configuration and file formats used by the command-line tool.

mod config;
mod formats;

pub use config::{parse_config, GeometrySpec, RunConfig};
pub use formats::{
    format_field_csv, format_matrix, parse_csv_metadata, parse_matrix, pgm_bytes, read_matrix,
    write_atomic, write_field_csv, write_matrix, write_pgm,
};
