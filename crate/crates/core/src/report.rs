//! CSV/JSON output envelopes and golden-file comparison.
//!
//! JSON is written with sorted keys and two-space indentation; non-finite
//! numbers become the strings `"+inf"`, `"-inf"` and `"nan"`. Floats use the
//! shortest representation that round-trips.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::hyp::Params;
use crate::verify::InequalityReport;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Shortest round-trip text for a float, with the non-finite sentinels.
pub fn format_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        ryu::Buffer::new().format_finite(v).to_string()
    }
}

fn sentinel(s: &str) -> Option<f64> {
    match s {
        "+inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        _ => None,
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(v) => f.write_str(&format_num(*v)),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(v) => Value::String(format_num(*v)),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }

    fn from_json(v: &Value) -> Result<Cell> {
        Ok(match v {
            Value::Bool(b) => Cell::Bool(*b),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Cell::Int(i)
                } else {
                    Cell::Num(n.as_f64().unwrap_or(f64::NAN))
                }
            }
            Value::String(s) => match sentinel(s) {
                Some(x) => Cell::Num(x),
                None => Cell::Text(s.clone()),
            },
            other => return Err(Error::Parse(format!("unexpected table cell {other}"))),
        })
    }

    fn as_num(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            Cell::Text(s) => sentinel(s),
            Cell::Bool(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Precondition(format!(
                "row has {} cells, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn from_reports(reports: &[InequalityReport]) -> Self {
        let mut t = Table::new([
            "kind",
            "N",
            "p",
            "test_function_id",
            "lhs",
            "rhs",
            "slack",
            "quad_error",
            "pass",
            "log_scale",
        ]);
        for r in reports {
            t.rows.push(vec![
                r.kind.name().into(),
                r.params.n.into(),
                r.params.p.into(),
                r.test_function_id.as_str().into(),
                r.lhs.into(),
                r.rhs.into(),
                r.slack.into(),
                r.quad_error.into(),
                r.pass.into(),
                r.log_scale.into(),
            ]);
        }
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayloadKind {
    Reports,
    Constants,
    Scan,
    Curve,
    Checks,
}

impl PayloadKind {
    pub fn name(&self) -> &'static str {
        match self {
            PayloadKind::Reports => "reports",
            PayloadKind::Constants => "constants",
            PayloadKind::Scan => "scan",
            PayloadKind::Curve => "curve",
            PayloadKind::Checks => "checks",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        [
            PayloadKind::Reports,
            PayloadKind::Constants,
            PayloadKind::Scan,
            PayloadKind::Curve,
            PayloadKind::Checks,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::Parse(format!("unknown payload kind {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!("unknown format {s:?}"))),
        }
    }
}

/// A command's output: parameters echo, seed, one table and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportEnvelope {
    pub schema_version: u32,
    pub command: String,
    pub params: Option<Params>,
    pub seed: Option<u64>,
    pub payload_kind: PayloadKind,
    pub table: Table,
    pub diagnostics: Vec<String>,
    /// Never compared against golden files.
    pub timestamp: Option<String>,
}

impl ReportEnvelope {
    pub fn new(
        command: impl Into<String>,
        params: Option<Params>,
        kind: PayloadKind,
        table: Table,
    ) -> Self {
        ReportEnvelope {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            params,
            seed: None,
            payload_kind: kind,
            table,
            diagnostics: Vec::new(),
            timestamp: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn to_json_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("schema_version".into(), json!(self.schema_version));
        m.insert("command".into(), json!(self.command));
        m.insert(
            "params".into(),
            match &self.params {
                Some(p) => json!({"N": p.n, "p": Cell::Num(p.p).to_json()}),
                None => Value::Null,
            },
        );
        m.insert("seed".into(), self.seed.map_or(Value::Null, |s| json!(s)));
        m.insert("payload_kind".into(), json!(self.payload_kind.name()));
        m.insert(
            "table".into(),
            json!({
                "columns": self.table.columns,
                "rows": self.table.rows.iter()
                    .map(|r| Value::Array(r.iter().map(Cell::to_json).collect()))
                    .collect::<Vec<_>>(),
            }),
        );
        m.insert("diagnostics".into(), json!(self.diagnostics));
        if let Some(ts) = &self.timestamp {
            m.insert("timestamp".into(), json!(ts));
        }
        Value::Object(m)
    }

    pub fn to_json(&self) -> String {
        let mut s =
            serde_json::to_string_pretty(&self.to_json_value()).expect("JSON values serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let field = |k: &str| {
            v.get(k)
                .ok_or_else(|| Error::Parse(format!("missing field {k:?}")))
        };
        let schema_version = field("schema_version")?
            .as_u64()
            .ok_or_else(|| Error::Parse("schema_version is not an integer".into()))?
            as u32;
        let command = field("command")?.as_str().unwrap_or_default().to_string();
        let params = match field("params")? {
            Value::Null => None,
            pv => {
                let n = pv
                    .get("N")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| Error::Parse("params.N".into()))?;
                let p = pv
                    .get("p")
                    .map(Cell::from_json)
                    .transpose()?
                    .and_then(|c| c.as_num())
                    .ok_or_else(|| Error::Parse("params.p".into()))?;
                Some(Params { n: n as u32, p })
            }
        };
        let seed = field("seed")?.as_u64();
        let payload_kind = PayloadKind::parse(field("payload_kind")?.as_str().unwrap_or_default())?;
        let t = field("table")?;
        let columns = t
            .get("columns")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("table.columns".into()))?
            .iter()
            .map(|c| {
                c.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| Error::Parse("column name".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let rows = t
            .get("rows")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("table.rows".into()))?
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| Error::Parse("table row".into()))?
                    .iter()
                    .map(Cell::from_json)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let diagnostics = field("diagnostics")?
            .as_array()
            .map(|a| {
                a.iter()
                    .filter_map(|d| d.as_str().map(str::to_string))
                    .collect()
            })
            .unwrap_or_default();
        let timestamp = v
            .get("timestamp")
            .and_then(Value::as_str)
            .map(str::to_string);
        Ok(ReportEnvelope {
            schema_version,
            command,
            params,
            seed,
            payload_kind,
            table: Table { columns, rows },
            diagnostics,
            timestamp,
        })
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.table.columns).map_err(csv_err)?;
        for row in &self.table.rows {
            w.write_record(row.iter().map(|c| c.to_string()))
                .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        if self.table.is_empty() {
            return Err(Error::Precondition(format!(
                "{} produced an empty payload",
                self.command
            )));
        }
        match format {
            Format::Json => Ok(self.to_json()),
            Format::Csv => self.to_csv(),
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Write `env` to `destination`, or to stdout when it is `None`.
pub fn emit(env: &ReportEnvelope, format: Format, destination: Option<&Path>) -> Result<()> {
    let text = env.render(format)?;
    match destination {
        Some(path) => fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffEntry {
    /// `None` for envelope-level fields.
    pub row: Option<usize>,
    pub field: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GoldenDiff {
    pub entries: Vec<DiffEntry>,
}

impl GoldenDiff {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn nums_match(a: f64, b: f64, rel_tol: f64) -> bool {
    if a.is_nan() || b.is_nan() {
        return a.is_nan() && b.is_nan();
    }
    if a == b {
        return true;
    }
    if !a.is_finite() || !b.is_finite() {
        return false;
    }
    (a - b).abs() <= rel_tol * a.abs().max(b.abs())
}

fn cells_match(a: &Cell, b: &Cell, rel_tol: f64) -> bool {
    match (a.as_num(), b.as_num()) {
        (Some(x), Some(y)) if !matches!((a, b), (Cell::Int(_), Cell::Int(_))) => {
            nums_match(x, y, rel_tol)
        }
        _ => a == b,
    }
}

/// Compare `env` against the golden JSON file at `path`: numbers within
/// `rel_tol` relative, everything else exactly. Timestamps are ignored.
pub fn compare_golden(path: &Path, env: &ReportEnvelope, rel_tol: f64) -> Result<GoldenDiff> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let golden = ReportEnvelope::from_json(&text)?;
    compare_envelopes(&golden, env, rel_tol)
}

pub fn compare_envelopes(
    golden: &ReportEnvelope,
    env: &ReportEnvelope,
    rel_tol: f64,
) -> Result<GoldenDiff> {
    if golden.schema_version != env.schema_version {
        return Err(Error::SchemaMismatch(format!(
            "golden schema version {} differs from {}",
            golden.schema_version, env.schema_version
        )));
    }
    if golden.payload_kind != env.payload_kind {
        return Err(Error::SchemaMismatch(format!(
            "payload kind {} differs from {}",
            golden.payload_kind.name(),
            env.payload_kind.name()
        )));
    }
    if golden.table.columns != env.table.columns {
        return Err(Error::SchemaMismatch(format!(
            "columns {:?} differ from {:?}",
            golden.table.columns, env.table.columns
        )));
    }
    if golden.table.rows.len() != env.table.rows.len() {
        return Err(Error::SchemaMismatch(format!(
            "{} rows differ from {}",
            golden.table.rows.len(),
            env.table.rows.len()
        )));
    }
    let mut diff = GoldenDiff::default();
    let mut top = |field: &str, e: String, a: String| {
        if e != a {
            diff.entries.push(DiffEntry {
                row: None,
                field: field.into(),
                expected: e,
                actual: a,
            });
        }
    };
    top("command", golden.command.clone(), env.command.clone());
    top(
        "seed",
        format!("{:?}", golden.seed),
        format!("{:?}", env.seed),
    );
    top(
        "N",
        format!("{:?}", golden.params.map(|p| p.n)),
        format!("{:?}", env.params.map(|p| p.n)),
    );
    let (gp, ep) = (golden.params.map(|p| p.p), env.params.map(|p| p.p));
    let p_ok = match (gp, ep) {
        (Some(a), Some(b)) => nums_match(a, b, rel_tol),
        (a, b) => a.is_none() && b.is_none(),
    };
    if !p_ok {
        diff.entries.push(DiffEntry {
            row: None,
            field: "p".into(),
            expected: format!("{gp:?}"),
            actual: format!("{ep:?}"),
        });
    }
    for (i, (gr, er)) in golden.table.rows.iter().zip(&env.table.rows).enumerate() {
        if gr.len() != er.len() {
            return Err(Error::SchemaMismatch(format!(
                "row {i} has a different width"
            )));
        }
        for (j, (g, e)) in gr.iter().zip(er).enumerate() {
            if !cells_match(g, e, rel_tol) {
                diff.entries.push(DiffEntry {
                    row: Some(i),
                    field: golden.table.columns[j].clone(),
                    expected: g.to_string(),
                    actual: e.to_string(),
                });
            }
        }
    }
    Ok(diff)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ReportEnvelope {
        let mut t = Table::new(["r", "Hp", "is_ge_one"]);
        t.push(vec![0.5.into(), 1.25.into(), true.into()]).unwrap();
        t.push(vec![1e-300.into(), f64::INFINITY.into(), false.into()])
            .unwrap();
        t.push(vec![0.1.into(), 3u32.into(), "r_p".into()]).unwrap();
        ReportEnvelope::new(
            "figure1",
            Some(Params::new(13, 4.0).unwrap()),
            PayloadKind::Curve,
            t,
        )
        .with_seed(7)
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let a = sample().to_json();
        let b = ReportEnvelope::from_json(&a).unwrap().to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"+inf\""));
        let v: Value = serde_json::from_str(&a).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn csv_header_and_numbers() {
        let csv = sample().to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("r,Hp,is_ge_one"));
        assert_eq!(lines.next(), Some("0.5,1.25,true"));
        assert_eq!(lines.next(), Some("1e-300,+inf,false"));
        assert_eq!(sample().to_csv().unwrap(), csv);
    }

    #[test]
    fn shortest_round_trip_numbers() {
        for &x in &[0.1, 1.0 / 3.0, 1e-10, 123456789.12345679, -2.5e300] {
            assert_eq!(format_num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn empty_payload_rejected() {
        let env = ReportEnvelope::new("x", None, PayloadKind::Scan, Table::new(["a"]));
        assert!(matches!(
            env.render(Format::Json),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn golden_identical_and_perturbed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        let env = sample();
        emit(&env, Format::Json, Some(&path)).unwrap();
        assert!(compare_golden(&path, &env, 1e-9).unwrap().is_empty());

        let mut off = env.clone();
        off.table.rows[0][1] = Cell::Num(1.25 * (1.0 + 2e-9));
        let d = compare_golden(&path, &off, 1e-9).unwrap();
        assert_eq!(d.entries.len(), 1);
        assert_eq!(d.entries[0].row, Some(0));
        assert_eq!(d.entries[0].field, "Hp");

        let mut ts = env.clone();
        ts.timestamp = Some("2020-01-01".into());
        assert!(compare_golden(&path, &ts, 1e-9).unwrap().is_empty());
    }

    #[test]
    fn golden_schema_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        emit(&sample(), Format::Json, Some(&path)).unwrap();
        let mut missing = sample();
        missing.table.columns.pop();
        for r in &mut missing.table.rows {
            r.pop();
        }
        assert!(matches!(
            compare_golden(&path, &missing, 1e-9),
            Err(Error::SchemaMismatch(_))
        ));
        let mut version = sample();
        version.schema_version = 2;
        assert!(matches!(
            compare_golden(&path, &version, 1e-9),
            Err(Error::SchemaMismatch(_))
        ));
    }

    #[test]
    fn io_error_names_path() {
        let e = emit(
            &sample(),
            Format::Csv,
            Some(Path::new("/nonexistent/dir/out.csv")),
        )
        .unwrap_err();
        assert!(e.to_string().contains("/nonexistent/dir/out.csv"));
    }

    proptest::proptest! {
        #[test]
        fn numbers_round_trip_exactly(bits in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let mut t = Table::new(["x"]);
            t.push(vec![bits.into()]).unwrap();
            let env = ReportEnvelope::new("weights", None, PayloadKind::Curve, t);
            let back = ReportEnvelope::from_json(&env.to_json()).unwrap();
            proptest::prop_assert_eq!(back, env);
        }
    }
}
