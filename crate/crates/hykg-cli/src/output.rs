//! File emission: atomic writes and the CSV dialect (comma, `.` decimal,
//! no quoting, LF endings, shortest round-trip floats).

use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use hykg::audit::format_float;

use crate::error::CliError;

/// Writes `contents` to `dir/name` through a temporary file in the same
/// directory, so readers never observe a partial file.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    let mut tmp = tempfile::Builder::new()
        .prefix(&format!(".{name}."))
        .tempfile_in(dir)
        .map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| CliError::io(&path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(&path, e))?;
    tmp.persist(&path).map_err(|e| CliError::io(&path, e.error))?;
    Ok(path)
}

pub fn json_string<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output types serialize") + "\n"
}

/// `None` renders as an empty field.
pub fn opt_float(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv { text: header.join(",") + "\n" }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for f in fields {
            let f = f.as_ref();
            debug_assert!(!f.contains([',', '\n', '"']), "field needs quoting: {f}");
            if !first {
                self.text.push(',');
            }
            self.text.push_str(f);
            first = false;
        }
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// ANSI colour is used only on a terminal and when `HYKG_NO_COLOR` is unset.
pub fn use_color() -> bool {
    std::env::var_os("HYKG_NO_COLOR").is_none() && std::io::stdout().is_terminal()
}

pub fn paint(text: &str, ok: bool, color: bool) -> String {
    if !color {
        return text.to_string();
    }
    let code = if ok { 32 } else { 31 };
    format!("\x1b[{code}m{text}\x1b[0m")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_leaves_only_target() {
        let dir = tempfile::tempdir().unwrap();
        write_atomic(dir.path(), "a.csv", "x\n1\n").unwrap();
        write_atomic(dir.path(), "a.csv", "x\n2\n").unwrap();
        let names: Vec<_> = std::fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        assert_eq!(names, vec!["a.csv".to_string()]);
        assert_eq!(std::fs::read_to_string(dir.path().join("a.csv")).unwrap(), "x\n2\n");
    }

    #[test]
    fn csv_rows_and_empty_fields() {
        let mut c = Csv::new(&["a", "b"]);
        c.row([format_float(0.1), opt_float(None)]);
        assert_eq!(c.finish(), "a,b\n0.1,\n");
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, -0.998_071_234_567_891_2, 1e-300, 6.02e23, 1.0] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }
}
