//! CSV rasters and payoff matrices.

use std::io::{Read, Write};
use std::path::Path;

use vmgame_core::discrete::PayoffMatrix;
use vmgame_core::region::RegionRaster;

use crate::error::CliError;

/// Writes `x,y,plausible` rows in row-major order, coordinates in range
/// units, `plausible` as 0 or 1.
pub fn write_raster<W: Write>(raster: &RegionRaster, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "plausible"])?;
    for (centre, flag) in raster.iter() {
        w.serialize((centre.x(), centre.y(), u8::from(flag)))?;
    }
    w.flush()?;
    Ok(())
}

/// One matrix row per line, no header.
pub fn write_matrix<W: Write>(matrix: &PayoffMatrix, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    for r in 0..matrix.rows() {
        w.serialize(matrix.row(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix<R: Read>(input: R, path: &Path) -> Result<PayoffMatrix, CliError> {
    let malformed = |message: String| CliError::Matrix {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut entries = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| malformed(e.to_string()))?;
        if *cols.get_or_insert(record.len()) != record.len() {
            return Err(malformed(format!(
                "row {} has {} entries",
                line + 1,
                record.len()
            )));
        }
        for field in &record {
            entries.push(
                field
                    .parse::<f64>()
                    .map_err(|e| malformed(format!("row {}: {e}", line + 1)))?,
            );
        }
        rows += 1;
    }
    Ok(PayoffMatrix::new(rows, cols.unwrap_or(0), entries)?)
}
