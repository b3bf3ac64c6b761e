use serde::Serialize;

use koszulkit::exactlin::Matrix;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Window {
    pub name: String,
    pub value: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Verdict {
    pub name: String,
    pub value: String,
    /// weight or degree window the verdict is valid in
    pub window: Option<usize>,
    /// negative verdicts must come with a witness of the same name
    pub negative: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Witness {
    pub name: String,
    pub value: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub input: String,
    pub input_digest: String,
    pub field: String,
    pub truncation: usize,
    pub windows: Vec<Window>,
    pub verdicts: Vec<Verdict>,
    pub witnesses: Vec<Witness>,
    pub tables: Vec<Table>,
    /// self-checks that ran before the report was emitted
    pub checks: Vec<String>,
}

impl Report {
    pub fn new(command: &str, input: &str, digest: &str, field: &str, truncation: usize) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            input: input.to_string(),
            input_digest: digest.to_string(),
            field: field.to_string(),
            truncation,
            windows: Vec::new(),
            verdicts: Vec::new(),
            witnesses: Vec::new(),
            tables: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn window(&mut self, name: &str, value: usize) -> &mut Self {
        self.windows.push(Window { name: name.into(), value });
        self
    }

    pub fn verdict(&mut self, name: &str, value: impl Into<String>, window: Option<usize>) -> &mut Self {
        self.verdicts.push(Verdict { name: name.into(), value: value.into(), window, negative: false });
        self
    }

    pub fn negative(&mut self, name: &str, value: impl Into<String>, window: Option<usize>) -> &mut Self {
        self.verdicts.push(Verdict { name: name.into(), value: value.into(), window, negative: true });
        self
    }

    pub fn witness(&mut self, name: &str, value: impl Into<String>) -> &mut Self {
        self.witnesses.push(Witness { name: name.into(), value: value.into() });
        self
    }

    pub fn table(&mut self, name: &str, columns: &[&str], rows: Vec<Vec<String>>) -> &mut Self {
        self.tables.push(Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        });
        self
    }

    pub fn check(&mut self, name: &str) -> &mut Self {
        self.checks.push(name.into());
        self
    }

    pub fn verdict_value(&self, name: &str) -> Option<&str> {
        self.verdicts.iter().find(|v| v.name == name).map(|v| v.value.as_str())
    }

    /// Negative verdicts without a witness.
    pub fn missing_witnesses(&self) -> Vec<String> {
        self.verdicts
            .iter()
            .filter(|v| v.negative && !self.witnesses.iter().any(|w| w.name == v.name))
            .map(|v| v.name.clone())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command     {}\n", self.command));
        out.push_str(&format!("input       {} (sha256 {})\n", self.input, self.input_digest));
        out.push_str(&format!("field       {}\n", self.field));
        out.push_str(&format!("truncation  {}\n", self.truncation));
        for w in &self.windows {
            out.push_str(&format!("window      {} = {}\n", w.name, w.value));
        }
        for v in &self.verdicts {
            let win = v.window.map(|w| format!("  [window {w}]")).unwrap_or_default();
            out.push_str(&format!("verdict     {}: {}{}\n", v.name, v.value, win));
        }
        for w in &self.witnesses {
            out.push_str(&format!("witness     {}: {}\n", w.name, w.value));
        }
        for t in &self.tables {
            out.push_str(&format!("\n{}\n", t.name));
            let mut widths: Vec<usize> = t.columns.iter().map(String::len).collect();
            for r in &t.rows {
                for (i, c) in r.iter().enumerate() {
                    if i < widths.len() {
                        widths[i] = widths[i].max(c.len());
                    }
                }
            }
            // numeric columns align right, text columns left
            let numeric: Vec<bool> = (0..widths.len())
                .map(|i| t.rows.iter().all(|r| r.get(i).is_none_or(|c| c.parse::<i64>().is_ok() || c == "-")))
                .collect();
            let line = |cells: &[String]| {
                cells
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let w = widths.get(i).copied().unwrap_or(0);
                        if numeric.get(i).copied().unwrap_or(true) {
                            format!("{c:>w$}")
                        } else {
                            format!("{c:<w$}")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            out.push_str(&format!("  {}\n", line(&t.columns)));
            for r in &t.rows {
                out.push_str(&format!("  {}\n", line(r)));
            }
        }
        if !self.checks.is_empty() {
            out.push_str(&format!("\nchecks      {}\n", self.checks.join(", ")));
        }
        out
    }
}

pub fn render_matrix(m: &Matrix) -> String {
    let rows: Vec<String> = (0..m.rows)
        .map(|r| {
            let cells: Vec<String> = (0..m.cols).map(|c| m.get(r, c).render()).collect();
            format!("[{}]", cells.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

pub fn render_dims(d: &[usize]) -> String {
    format!("({})", d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}
