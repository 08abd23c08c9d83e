//! Record sinks: CSV with a fixed header, or JSON lines.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

enum Inner {
    Csv(csv::Writer<Box<dyn Write>>),
    Jsonl(Box<dyn Write>),
}

pub struct Sink {
    inner: Inner,
}

impl Sink {
    pub fn open(path: Option<&Path>, format: Format) -> Result<Self> {
        let w: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        let inner = match format {
            Format::Csv => Inner::Csv(csv::Writer::from_writer(w)),
            Format::Jsonl => Inner::Jsonl(w),
        };
        Ok(Self { inner })
    }

    pub fn write<T: Serialize>(&mut self, record: &T) -> Result<()> {
        match &mut self.inner {
            Inner::Csv(w) => w.serialize(record)?,
            Inner::Jsonl(w) => {
                serde_json::to_writer(&mut *w, record)?;
                w.write_all(b"\n")?;
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Result<()> {
        match self.inner {
            Inner::Csv(mut w) => w.flush()?,
            Inner::Jsonl(mut w) => w.flush()?,
        }
        Ok(())
    }
}
