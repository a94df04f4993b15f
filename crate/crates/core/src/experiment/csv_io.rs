use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::ResultRow;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "experiment_kind,n,p,m,theta,snr_db,trial,seed,method,linf_u,frob_v,x_err_per_entry,support_f1,wall_time_ms,flags";

/// Streams rows to a CSV file. The header is written on creation, so an
/// empty sweep still yields a valid file.
pub struct CsvSink<W: Write> {
    writer: csv::Writer<W>,
    path: PathBuf,
}

impl CsvSink<File> {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_writer(file, path)
    }
}

impl<W: Write> CsvSink<W> {
    pub fn from_writer(inner: W, path: &Path) -> Result<Self> {
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(inner);
        let path = path.to_owned();
        writer
            .write_record(CSV_HEADER.split(','))
            .map_err(|source| Error::Csv { path: path.clone(), source })?;
        Ok(Self { writer, path })
    }

    pub fn write(&mut self, row: &ResultRow) -> Result<()> {
        self.writer.serialize(row).map_err(|source| Error::Csv {
            path: self.path.clone(),
            source,
        })
    }

    pub fn finish(mut self) -> Result<W> {
        self.writer.flush().map_err(|source| Error::Io {
            path: self.path.clone(),
            source,
        })?;
        self.writer.into_inner().map_err(|e| Error::Io {
            path: self.path.clone(),
            source: e.into_error(),
        })
    }
}

pub fn write_csv<'a>(rows: impl IntoIterator<Item = &'a ResultRow>, path: &Path) -> Result<()> {
    let mut sink = CsvSink::create(path)?;
    for row in rows {
        sink.write(row)?;
    }
    sink.finish().map(|_| ())
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let mut reader = csv::Reader::from_path(path).map_err(|source| Error::Csv {
        path: path.to_owned(),
        source,
    })?;
    let header = reader
        .headers()
        .map_err(|source| Error::Csv { path: path.to_owned(), source })?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != CSV_HEADER {
        return Err(Error::Config(format!(
            "{}: unexpected CSV header {header:?}",
            path.display()
        )));
    }
    reader
        .deserialize()
        .map(|r| r.map_err(|source| Error::Csv { path: path.to_owned(), source }))
        .collect()
}
