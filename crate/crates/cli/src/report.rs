//! Writes rows as JSON lines or CSV. Both go through serde, so floats come
//! out in the same shortest round-trip form.

use crate::config::OutputFormat;
use anyhow::{Context, Result};
use serde::Serialize;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

pub fn open(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_rows<T: Serialize>(rows: &[T], format: OutputFormat, out: Option<&Path>) -> Result<()> {
    let mut w = open(out)?;
    match format {
        OutputFormat::Json => {
            for row in rows {
                serde_json::to_writer(&mut w, row)?;
                w.write_all(b"\n")?;
            }
        }
        OutputFormat::Csv => {
            let mut csv = csv::Writer::from_writer(&mut w);
            for row in rows {
                csv.serialize(row)?;
            }
            csv.flush()?;
        }
    }
    w.flush()?;
    Ok(())
}
