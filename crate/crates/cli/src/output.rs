//! Output sink shared by the subcommands: text or JSON, to stdout or a
//! file.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use coprod_core::solvers::RenderValue;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

pub struct Output {
    pub format: Format,
    pub decimal: Option<usize>,
    sink: Box<dyn Write>,
}

impl Output {
    pub fn new(format: Format, decimal: Option<usize>, path: Option<&Path>) -> Result<Self> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
            None => Box::new(io::stdout().lock()),
        };
        Ok(Output { format, decimal, sink })
    }

    pub fn json(&self) -> bool {
        self.format == Format::Json
    }

    pub fn line(&mut self, text: impl AsRef<str>) -> Result<()> {
        writeln!(self.sink, "{}", text.as_ref())?;
        Ok(())
    }

    pub fn value(&mut self, v: &Value) -> Result<()> {
        let text = serde_json::to_string_pretty(v)?;
        self.line(text)
    }

    pub fn render<D: RenderValue>(&self, v: &D) -> String {
        v.render(self.decimal)
    }

    pub fn to_json<D: RenderValue>(&self, v: &D) -> Value {
        v.to_json(self.decimal)
    }

    pub fn finish(mut self) -> Result<()> {
        self.sink.flush()?;
        Ok(())
    }
}
