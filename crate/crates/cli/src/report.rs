use serde::Serialize;

use crate::error::CliError;

/// Fixed-width scientific form with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV document: a comment line echoing the resolved configuration, a
/// header row, data rows and optional `# key=value` footer lines.
pub struct CsvReport {
    writer: csv::Writer<Vec<u8>>,
    footer: Vec<String>,
}

impl CsvReport {
    pub fn new<P: Serialize>(command: &str, params: &P, header: &[&str]) -> Result<Self, CliError> {
        let echo = serde_json::to_string(params).map_err(|e| CliError::Output(e.to_string()))?;
        let mut head = format!("# qiplab {command} config={echo}\n").into_bytes();
        head.shrink_to_fit();
        let mut writer = csv::WriterBuilder::new().from_writer(head);
        writer.write_record(header).map_err(|e| CliError::Output(e.to_string()))?;
        Ok(Self {
            writer,
            footer: Vec::new(),
        })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer
            .write_record(fields)
            .map_err(|e| CliError::Output(e.to_string()))
    }

    pub fn footer(&mut self, key: &str, value: String) {
        self.footer.push(format!("# {key}={value}\n"));
    }

    pub fn finish(self) -> Result<String, CliError> {
        let mut bytes = self
            .writer
            .into_inner()
            .map_err(|e| CliError::Output(e.to_string()))?;
        for line in self.footer {
            bytes.extend_from_slice(line.as_bytes());
        }
        String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
    }
}
