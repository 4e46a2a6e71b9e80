use std::cmp::Ordering;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ext_float;
use crate::error::{invalid, Error, Result};

/// Version of the JSON and CSV layouts.
pub const SCHEMA_VERSION: u32 = 1;

/// Shortest round-trip form, with an exponent for very small or large values.
fn fmt_float(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamKind {
    Int,
    Real,
    Text,
}

impl ParamKind {
    fn as_str(self) -> &'static str {
        match self {
            Self::Int => "int",
            Self::Real => "real",
            Self::Text => "text",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Column {
    pub name: String,
    pub kind: ParamKind,
}

impl Column {
    pub fn int(name: &str) -> Self {
        Self {
            name: name.into(),
            kind: ParamKind::Int,
        }
    }

    pub fn real(name: &str) -> Self {
        Self {
            name: name.into(),
            kind: ParamKind::Real,
        }
    }

    pub fn text(name: &str) -> Self {
        Self {
            name: name.into(),
            kind: ParamKind::Text,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Int(i64),
    Real(#[serde(with = "ext_float")] f64),
    Text(String),
}

impl Param {
    pub fn kind(&self) -> ParamKind {
        match self {
            Self::Int(_) => ParamKind::Int,
            Self::Real(_) => ParamKind::Real,
            Self::Text(_) => ParamKind::Text,
        }
    }

    fn rank(&self) -> u8 {
        self.kind() as u8
    }

    fn render(&self) -> String {
        match self {
            Self::Int(v) => v.to_string(),
            Self::Real(v) => fmt_float(*v),
            Self::Text(s) => s.clone(),
        }
    }

    fn parse(kind: ParamKind, s: &str) -> Result<Self> {
        Ok(match kind {
            ParamKind::Int => Self::Int(s.parse().map_err(|_| Error::Parse(format!("bad integer {s:?}")))?),
            ParamKind::Real => Self::Real(parse_float(s)?),
            ParamKind::Text => Self::Text(s.to_owned()),
        })
    }
}

impl From<usize> for Param {
    fn from(v: usize) -> Self {
        Self::Int(v as i64)
    }
}

impl From<i64> for Param {
    fn from(v: i64) -> Self {
        Self::Int(v)
    }
}

impl From<i32> for Param {
    fn from(v: i32) -> Self {
        Self::Int(v.into())
    }
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Self::Real(v)
    }
}

impl From<&str> for Param {
    fn from(v: &str) -> Self {
        Self::Text(v.into())
    }
}

impl From<String> for Param {
    fn from(v: String) -> Self {
        Self::Text(v)
    }
}

impl PartialEq for Param {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Param {}

impl PartialOrd for Param {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Param {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Self::Int(a), Self::Int(b)) => a.cmp(b),
            (Self::Real(a), Self::Real(b)) => a.total_cmp(b),
            (Self::Text(a), Self::Text(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

fn parse_float(s: &str) -> Result<f64> {
    ext_float::parse_special(s)
        .map(Ok)
        .unwrap_or_else(|| s.parse().map_err(|_| Error::Parse(format!("bad number {s:?}"))))
}

/// NaNs are stored with one bit pattern so tables compare bitwise.
fn canonical(v: f64) -> f64 {
    if v.is_nan() {
        f64::NAN
    } else {
        v
    }
}

fn same(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRow {
    pub id: String,
    pub params: Vec<Param>,
    #[serde(with = "ext_float")]
    pub measured: f64,
    #[serde(with = "ext_float")]
    pub reference: f64,
    #[serde(with = "ext_float")]
    pub ratio: f64,
    #[serde(with = "ext_float")]
    pub error: f64,
    pub flagged: bool,
    #[serde(with = "ext_float::vec")]
    pub extras: Vec<f64>,
}

impl ResultRow {
    pub fn new(id: impl Into<String>, params: Vec<Param>, measured: f64, reference: f64) -> Self {
        let ratio = if measured == 0.0 { 0.0 } else { measured / reference };
        Self {
            id: id.into(),
            params,
            measured,
            reference,
            ratio,
            error: 0.0,
            flagged: false,
            extras: Vec::new(),
        }
    }

    pub fn with_ratio(mut self, ratio: f64) -> Self {
        self.ratio = ratio;
        self
    }

    pub fn with_error(mut self, error: f64) -> Self {
        self.error = error;
        self
    }

    pub fn flag(mut self, flagged: bool) -> Self {
        self.flagged = flagged;
        self
    }

    pub fn with_extras(mut self, extras: Vec<f64>) -> Self {
        self.extras = extras;
        self
    }

    fn canonicalize(&mut self) {
        for v in [&mut self.measured, &mut self.reference, &mut self.ratio, &mut self.error] {
            *v = canonical(*v);
        }
        for v in &mut self.extras {
            *v = canonical(*v);
        }
        for p in &mut self.params {
            if let Param::Real(v) = p {
                *v = canonical(*v);
            }
        }
    }

    fn key(&self) -> (&str, &[Param]) {
        (&self.id, &self.params)
    }
}

impl PartialEq for ResultRow {
    fn eq(&self, o: &Self) -> bool {
        self.id == o.id
            && self.params == o.params
            && same(self.measured, o.measured)
            && same(self.reference, o.reference)
            && same(self.ratio, o.ratio)
            && same(self.error, o.error)
            && self.flagged == o.flagged
            && self.extras.len() == o.extras.len()
            && self.extras.iter().zip(&o.extras).all(|(a, b)| same(*a, *b))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// Hex SHA-256 of `config`.
    pub config_sha256: String,
    pub seed: u64,
    /// The canonical JSON of the configuration that produced the table.
    pub config: String,
}

impl Provenance {
    pub fn for_config(config_json: String, seed: u64) -> Self {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(config_json.as_bytes());
        let mut hex = String::with_capacity(64);
        for b in digest {
            let _ = write!(hex, "{b:02x}");
        }
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_sha256: hex,
            seed,
            config: config_json,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultTable {
    pub schema: u32,
    pub experiment: String,
    pub columns: Vec<Column>,
    pub extra_names: Vec<String>,
    pub rows: Vec<ResultRow>,
    pub provenance: Provenance,
}

const FIXED: [&str; 5] = ["measured", "reference", "ratio", "error", "flagged"];

impl ResultTable {
    pub fn new(experiment: &str, columns: Vec<Column>, extra_names: Vec<&str>, provenance: Provenance) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            experiment: experiment.into(),
            columns,
            extra_names: extra_names.into_iter().map(String::from).collect(),
            rows: Vec::new(),
            provenance,
        }
    }

    /// Appends a row after checking it against the column layout.
    pub fn push(&mut self, mut row: ResultRow) -> Result<()> {
        if row.params.len() != self.columns.len()
            || row.params.iter().zip(&self.columns).any(|(p, c)| p.kind() != c.kind)
        {
            return Err(invalid!("row {:?} does not match the table columns", row.id));
        }
        if row.extras.is_empty() && !self.extra_names.is_empty() {
            row.extras = vec![f64::NAN; self.extra_names.len()];
        }
        if row.extras.len() != self.extra_names.len() {
            return Err(invalid!("row {:?} has {} extras, expected {}", row.id, row.extras.len(), self.extra_names.len()));
        }
        row.canonicalize();
        self.rows.push(row);
        Ok(())
    }

    /// Sorts rows by `(id, parameters)`.
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| a.key().cmp(&b.key()));
    }

    pub fn rows_with_id<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a ResultRow> + 'a {
        self.rows.iter().filter(move |r| r.id == id)
    }

    fn header(&self) -> Vec<String> {
        let mut h = vec!["id".to_owned()];
        h.extend(self.columns.iter().map(|c| format!("{}:{}", c.name, c.kind.as_str())));
        h.extend(FIXED.iter().map(|s| s.to_string()));
        h.extend(self.extra_names.iter().cloned());
        h
    }

    pub fn to_csv(&self) -> String {
        let p = &self.provenance;
        let mut out = String::new();
        let _ = writeln!(out, "# tool {} {}", p.tool, p.version);
        let _ = writeln!(out, "# schema {}", self.schema);
        let _ = writeln!(out, "# experiment {}", self.experiment);
        let _ = writeln!(out, "# config-sha256 {}", p.config_sha256);
        let _ = writeln!(out, "# seed {}", p.seed);
        let _ = writeln!(out, "# config {}", p.config);
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(self.header()).expect("in-memory csv");
        for r in &self.rows {
            let mut rec = vec![r.id.clone()];
            rec.extend(r.params.iter().map(Param::render));
            rec.extend([r.measured, r.reference, r.ratio, r.error].iter().map(|v| fmt_float(*v)));
            rec.push(r.flagged.to_string());
            rec.extend(r.extras.iter().map(|v| fmt_float(*v)));
            w.write_record(&rec).expect("in-memory csv");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv"));
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut meta = std::collections::HashMap::new();
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            let Some(rest) = line.strip_prefix("# ") else { break };
            let rest = rest.trim_end_matches('\n');
            let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
            meta.insert(k.to_owned(), v.to_owned());
            body_start += line.len();
        }
        let get = |k: &str| meta.get(k).cloned().ok_or_else(|| Error::Parse(format!("missing `# {k}` line")));
        let tool = get("tool")?;
        let (tool, version) = tool.split_once(' ').unwrap_or((&tool, ""));
        let provenance = Provenance {
            tool: tool.into(),
            version: version.into(),
            config_sha256: get("config-sha256")?,
            seed: get("seed")?.parse().map_err(|_| Error::Parse("bad seed".into()))?,
            config: get("config")?,
        };
        let schema: u32 = get("schema")?.parse().map_err(|_| Error::Parse("bad schema".into()))?;
        let mut rd = csv::ReaderBuilder::new().from_reader(&text.as_bytes()[body_start..]);
        let header: Vec<String> = rd
            .headers()
            .map_err(|e| Error::Parse(e.to_string()))?
            .iter()
            .map(String::from)
            .collect();
        let fixed_at = header
            .iter()
            .position(|h| h == "measured")
            .ok_or_else(|| Error::Parse("missing measured column".into()))?;
        if header.first().map(String::as_str) != Some("id") || header.len() < fixed_at + FIXED.len() {
            return Err(Error::Parse("malformed header".into()));
        }
        let columns = header[1..fixed_at]
            .iter()
            .map(|h| {
                let (name, kind) = h.rsplit_once(':').ok_or_else(|| Error::Parse(format!("untyped column {h}")))?;
                let kind = match kind {
                    "int" => ParamKind::Int,
                    "real" => ParamKind::Real,
                    "text" => ParamKind::Text,
                    _ => return Err(Error::Parse(format!("unknown column type {kind}"))),
                };
                Ok(Column {
                    name: name.into(),
                    kind,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let extra_names = header[fixed_at + FIXED.len()..].to_vec();
        let mut table = Self {
            schema,
            experiment: get("experiment")?,
            columns,
            extra_names,
            rows: Vec::new(),
            provenance,
        };
        for rec in rd.records() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let f: Vec<&str> = rec.iter().collect();
            let params = table
                .columns
                .iter()
                .enumerate()
                .map(|(i, c)| Param::parse(c.kind, f[1 + i]))
                .collect::<Result<Vec<_>>>()?;
            let num = |i: usize| parse_float(f[i]);
            let flagged = match f[fixed_at + 4] {
                "true" => true,
                "false" => false,
                other => return Err(Error::Parse(format!("bad flag {other:?}"))),
            };
            let row = ResultRow {
                id: f[0].into(),
                params,
                measured: num(fixed_at)?,
                reference: num(fixed_at + 1)?,
                ratio: num(fixed_at + 2)?,
                error: num(fixed_at + 3)?,
                flagged,
                extras: (fixed_at + FIXED.len()..f.len()).map(num).collect::<Result<_>>()?,
            };
            table.push(row).map_err(|e| Error::Parse(e.to_string()))?;
        }
        Ok(table)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serialises");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut t: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let rows = std::mem::take(&mut t.rows);
        for r in rows {
            t.push(r).map_err(|e| Error::Parse(e.to_string()))?;
        }
        Ok(t)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn parse(text: &str, format: Format) -> Result<Self> {
        match format {
            Format::Csv => Self::from_csv(text),
            Format::Json => Self::from_json(text),
        }
    }
}

/// Writes `table` to `path` in the given format.
pub fn emit_report(table: &ResultTable, format: Format, path: &Path) -> Result<()> {
    std::fs::write(path, table.render(format)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultTable {
        let prov = Provenance::for_config(r#"{"experiment":{"kind":"x"},"seed":3}"#.into(), 3);
        let mut t = ResultTable::new(
            "demo",
            vec![Column::int("d"), Column::real("p"), Column::text("body")],
            vec!["mean"],
            prov,
        );
        t.push(ResultRow::new("b", vec![2usize.into(), 1.5.into(), "cube, open".into()], 0.1, 0.3).with_extras(vec![0.05]))
            .unwrap();
        t.push(
            ResultRow::new("a", vec![1usize.into(), f64::INFINITY.into(), "\"q\"".into()], f64::NAN, 1.0)
                .with_error(1e-300)
                .flag(true),
        )
        .unwrap();
        t.sort();
        t
    }

    #[test]
    fn csv_round_trip() {
        let t = sample();
        let text = t.to_csv();
        assert!(text.contains(&t.provenance.config_sha256));
        assert_eq!(ResultTable::from_csv(&text).unwrap(), t);
        assert_eq!(t.rows[0].id, "a");
    }

    #[test]
    fn json_round_trip() {
        let t = sample();
        let text = t.to_json();
        assert_eq!(ResultTable::from_json(&text).unwrap(), t);
    }

    #[test]
    fn empty_table_is_header_only() {
        let mut t = sample();
        t.rows.clear();
        let text = t.to_csv();
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body, vec!["id,d:int,p:real,body:text,measured,reference,ratio,error,flagged,mean"]);
        assert_eq!(ResultTable::from_csv(&text).unwrap(), t);
    }

    #[test]
    fn rejects_mismatched_rows() {
        let mut t = sample();
        assert!(t.push(ResultRow::new("c", vec![1.0.into()], 1.0, 1.0)).is_err());
    }

    #[test]
    fn hash_is_sha256() {
        let p = Provenance::for_config("abc".into(), 0);
        assert_eq!(p.config_sha256, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
