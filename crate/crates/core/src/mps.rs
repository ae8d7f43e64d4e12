//! MPS reader and normalized writer.
//!
//! Free format splits data lines on whitespace; fixed format reads fields at
//! the classic column positions (2-3, 5-12, 15-22, 25-36, 40-47, 50-61), so
//! names may contain spaces. Integer markers and `BV` bounds are relaxed to
//! continuous variables. The first `N` row is the objective; further `N` rows
//! are dropped with a warning.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::error::{Error, Result};
use crate::model::{Column, GeneralFormLp, Relation, Row, Sense, SparseMatrix};

/// Values at or beyond this magnitude in `BOUNDS` are read as infinite.
pub const MPS_INFINITY: f64 = 1e30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MpsFormat {
    #[default]
    Free,
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MpsErrorKind {
    #[error("unknown section `{0}`")]
    UnknownSection(String),
    #[error("data line outside of any section")]
    DataOutsideSection,
    #[error("unknown row type `{0}`")]
    UnknownRowType(String),
    #[error("row `{0}` declared twice")]
    DuplicateRow(String),
    #[error("reference to undeclared row `{0}`")]
    UndeclaredRow(String),
    #[error("reference to undeclared column `{0}`")]
    UndeclaredColumn(String),
    #[error("duplicate entry for row `{row}` in column `{column}`")]
    DuplicateEntry { row: String, column: String },
    #[error("malformed number `{0}`")]
    MalformedNumber(String),
    #[error("unknown bound type `{0}`")]
    UnknownBoundType(String),
    #[error("missing field: {0}")]
    MissingField(&'static str),
    #[error("unknown objective sense `{0}`")]
    UnknownSense(String),
    #[error("no objective (N) row")]
    MissingObjective,
}

/// Parse failure with the 1-based line it was detected on.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct MpsError {
    pub line: usize,
    pub kind: MpsErrorKind,
}

impl MpsError {
    fn new(line: usize, kind: MpsErrorKind) -> Self {
        Self { line, kind }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Name,
    ObjSense,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
}

fn section_of(word: &str) -> Option<Section> {
    Some(match word {
        "NAME" => Section::Name,
        "OBJSENSE" => Section::ObjSense,
        "ROWS" => Section::Rows,
        "COLUMNS" => Section::Columns,
        "RHS" => Section::Rhs,
        "RANGES" => Section::Ranges,
        "BOUNDS" => Section::Bounds,
        _ => return None,
    })
}

fn parse_sense(word: &str, line: usize) -> Result<Sense, MpsError> {
    match word.to_ascii_uppercase().as_str() {
        "MIN" | "MINIMIZE" => Ok(Sense::Minimize),
        "MAX" | "MAXIMIZE" => Ok(Sense::Maximize),
        _ => Err(MpsError::new(line, MpsErrorKind::UnknownSense(word.into()))),
    }
}

fn number(s: &str, line: usize) -> Result<f64, MpsError> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(MpsError::new(line, MpsErrorKind::MalformedNumber(s.into()))),
    }
}

fn bound_number(s: &str, line: usize) -> Result<f64, MpsError> {
    match s.parse::<f64>() {
        Ok(v) if v.is_nan() => Err(MpsError::new(line, MpsErrorKind::MalformedNumber(s.into()))),
        Ok(v) if v >= MPS_INFINITY => Ok(f64::INFINITY),
        Ok(v) if v <= -MPS_INFINITY => Ok(f64::NEG_INFINITY),
        Ok(v) => Ok(v),
        Err(_) => Err(MpsError::new(line, MpsErrorKind::MalformedNumber(s.into()))),
    }
}

/// Fixed-format field `i` (0-based), trimmed; `None` when blank.
fn fixed_field(line: &str, i: usize) -> Option<&str> {
    const SPANS: [(usize, usize); 6] = [(1, 3), (4, 12), (14, 22), (24, 36), (39, 47), (49, 61)];
    let (a, b) = SPANS[i];
    let s = line.get(a.min(line.len())..b.min(line.len()))?.trim();
    (!s.is_empty()).then_some(s)
}

/// `(row, value)` pairs of an RHS or RANGES line.
struct SetLine<'a> {
    pairs: Vec<(&'a str, &'a str)>,
}

struct BoundLine<'a> {
    kind: &'a str,
    column: &'a str,
    value: Option<&'a str>,
}

fn needs_value(kind: &str) -> bool {
    !matches!(kind, "FR" | "MI" | "PL" | "BV")
}

struct Parser {
    format: MpsFormat,
    name: String,
    sense: Sense,
    objective: Option<String>,
    dropped_objectives: HashSet<String>,
    rows: Vec<Row>,
    row_index: HashMap<String, usize>,
    columns: Vec<Column>,
    column_index: HashMap<String, usize>,
    lower_set: Vec<bool>,
    entries: HashSet<(usize, usize)>,
    triplets: Vec<(usize, usize, f64)>,
    objective_set: HashSet<usize>,
    rhs_seen: HashSet<usize>,
    range_seen: HashSet<usize>,
    rhs_set: Option<String>,
    range_set: Option<String>,
    objective_constant: f64,
}

enum RowRef {
    Objective,
    Dropped,
    Row(usize),
}

impl Parser {
    fn new(format: MpsFormat) -> Self {
        Self {
            format,
            name: String::new(),
            sense: Sense::Minimize,
            objective: None,
            dropped_objectives: HashSet::new(),
            rows: Vec::new(),
            row_index: HashMap::new(),
            columns: Vec::new(),
            column_index: HashMap::new(),
            lower_set: Vec::new(),
            entries: HashSet::new(),
            triplets: Vec::new(),
            objective_set: HashSet::new(),
            rhs_seen: HashSet::new(),
            range_seen: HashSet::new(),
            rhs_set: None,
            range_set: None,
            objective_constant: 0.0,
        }
    }

    fn row_ref(&self, name: &str, line: usize) -> Result<RowRef, MpsError> {
        if self.objective.as_deref() == Some(name) {
            Ok(RowRef::Objective)
        } else if let Some(&i) = self.row_index.get(name) {
            Ok(RowRef::Row(i))
        } else if self.dropped_objectives.contains(name) {
            Ok(RowRef::Dropped)
        } else {
            Err(MpsError::new(line, MpsErrorKind::UndeclaredRow(name.into())))
        }
    }

    fn column(&self, name: &str, line: usize) -> Result<usize, MpsError> {
        self.column_index
            .get(name)
            .copied()
            .ok_or_else(|| MpsError::new(line, MpsErrorKind::UndeclaredColumn(name.into())))
    }

    fn rows_line(&mut self, line: &str, no: usize) -> Result<(), MpsError> {
        let (kind, name) = match self.format {
            MpsFormat::Free => {
                let mut t = line.split_whitespace();
                (t.next(), t.next())
            }
            MpsFormat::Fixed => (fixed_field(line, 0), fixed_field(line, 1)),
        };
        let kind = kind.ok_or(MpsError::new(no, MpsErrorKind::MissingField("row type")))?;
        let name = name.ok_or(MpsError::new(no, MpsErrorKind::MissingField("row name")))?;
        if self.row_index.contains_key(name)
            || self.objective.as_deref() == Some(name)
            || self.dropped_objectives.contains(name)
        {
            return Err(MpsError::new(no, MpsErrorKind::DuplicateRow(name.into())));
        }
        let relation = match kind.to_ascii_uppercase().as_str() {
            "N" => {
                if self.objective.is_none() {
                    self.objective = Some(name.into());
                } else {
                    log::warn!("line {no}: dropping additional objective row `{name}`");
                    self.dropped_objectives.insert(name.into());
                }
                return Ok(());
            }
            "L" => Relation::Le,
            "G" => Relation::Ge,
            "E" => Relation::Eq,
            _ => return Err(MpsError::new(no, MpsErrorKind::UnknownRowType(kind.into()))),
        };
        self.row_index.insert(name.into(), self.rows.len());
        self.rows.push(Row {
            name: name.into(),
            relation,
            rhs: 0.0,
            range: None,
        });
        Ok(())
    }

    fn columns_line(&mut self, line: &str, no: usize) -> Result<(), MpsError> {
        let (col, pairs): (&str, Vec<(&str, Option<&str>)>) = match self.format {
            MpsFormat::Free => {
                let t: Vec<&str> = line.split_whitespace().collect();
                if t.len() >= 3 && t[1].trim_matches('\'') == "MARKER" {
                    return Ok(());
                }
                if t.len() < 3 {
                    return Err(MpsError::new(no, MpsErrorKind::MissingField("column entry")));
                }
                let pairs = t[1..].chunks(2).map(|p| (p[0], p.get(1).copied())).collect();
                (t[0], pairs)
            }
            MpsFormat::Fixed => {
                if fixed_field(line, 2).map(|s| s.trim_matches('\'')) == Some("MARKER") {
                    return Ok(());
                }
                let col = fixed_field(line, 1)
                    .ok_or(MpsError::new(no, MpsErrorKind::MissingField("column name")))?;
                let row = fixed_field(line, 2)
                    .ok_or(MpsError::new(no, MpsErrorKind::MissingField("row name")))?;
                let mut pairs = vec![(row, fixed_field(line, 3))];
                if let Some(r2) = fixed_field(line, 4) {
                    pairs.push((r2, fixed_field(line, 5)));
                }
                (col, pairs)
            }
        };
        let j = match self.column_index.get(col) {
            Some(&j) => j,
            None => {
                let j = self.columns.len();
                self.column_index.insert(col.into(), j);
                self.columns.push(Column {
                    name: col.into(),
                    cost: 0.0,
                    lower: 0.0,
                    upper: f64::INFINITY,
                });
                self.lower_set.push(false);
                j
            }
        };
        for (row, value) in pairs {
            let value = value.ok_or(MpsError::new(no, MpsErrorKind::MissingField("coefficient")))?;
            let v = number(value, no)?;
            let duplicate = || {
                MpsError::new(
                    no,
                    MpsErrorKind::DuplicateEntry {
                        row: row.into(),
                        column: col.into(),
                    },
                )
            };
            match self.row_ref(row, no)? {
                RowRef::Objective => {
                    if !self.objective_set.insert(j) {
                        return Err(duplicate());
                    }
                    self.columns[j].cost = v;
                }
                RowRef::Dropped => {}
                RowRef::Row(i) => {
                    if !self.entries.insert((i, j)) {
                        return Err(duplicate());
                    }
                    if v != 0.0 {
                        self.triplets.push((i, j, v));
                    }
                }
            }
        }
        Ok(())
    }

    fn set_line<'a>(&self, line: &'a str, no: usize) -> Result<(Option<&'a str>, SetLine<'a>), MpsError> {
        match self.format {
            MpsFormat::Free => {
                let t: Vec<&str> = line.split_whitespace().collect();
                let (set, rest) = if t.len() % 2 == 1 {
                    (Some(t[0]), &t[1..])
                } else {
                    (None, &t[..])
                };
                if rest.is_empty() {
                    return Err(MpsError::new(no, MpsErrorKind::MissingField("row entry")));
                }
                let pairs = rest.chunks(2).map(|p| (p[0], p[1])).collect();
                Ok((set, SetLine { pairs }))
            }
            MpsFormat::Fixed => {
                let set = fixed_field(line, 1);
                let mut pairs = Vec::new();
                for (r, v) in [(2, 3), (4, 5)] {
                    match (fixed_field(line, r), fixed_field(line, v)) {
                        (Some(r), Some(v)) => pairs.push((r, v)),
                        (None, None) if !pairs.is_empty() => {}
                        (None, _) => return Err(MpsError::new(no, MpsErrorKind::MissingField("row name"))),
                        (Some(_), None) => {
                            return Err(MpsError::new(no, MpsErrorKind::MissingField("value")))
                        }
                    }
                }
                Ok((set, SetLine { pairs }))
            }
        }
    }

    fn rhs_line(&mut self, line: &str, no: usize) -> Result<(), MpsError> {
        let (set, data) = self.set_line(line, no)?;
        let set = set.unwrap_or("").to_string();
        match &self.rhs_set {
            None => self.rhs_set = Some(set),
            Some(s) if *s != set => {
                log::warn!("line {no}: ignoring entries of secondary RHS set `{set}`");
                return Ok(());
            }
            Some(_) => {}
        }
        for (row, value) in data.pairs {
            let v = number(value, no)?;
            let dup = MpsError::new(
                no,
                MpsErrorKind::DuplicateEntry {
                    row: row.into(),
                    column: "RHS".into(),
                },
            );
            match self.row_ref(row, no)? {
                RowRef::Objective => {
                    if !self.rhs_seen.insert(usize::MAX) {
                        return Err(dup);
                    }
                    self.objective_constant = -v;
                }
                RowRef::Dropped => {}
                RowRef::Row(i) => {
                    if !self.rhs_seen.insert(i) {
                        return Err(dup);
                    }
                    self.rows[i].rhs = v;
                }
            }
        }
        Ok(())
    }

    fn ranges_line(&mut self, line: &str, no: usize) -> Result<(), MpsError> {
        let (set, data) = self.set_line(line, no)?;
        let set = set.unwrap_or("").to_string();
        match &self.range_set {
            None => self.range_set = Some(set),
            Some(s) if *s != set => {
                log::warn!("line {no}: ignoring entries of secondary RANGES set `{set}`");
                return Ok(());
            }
            Some(_) => {}
        }
        for (row, value) in data.pairs {
            let v = number(value, no)?;
            match self.row_ref(row, no)? {
                RowRef::Objective | RowRef::Dropped => {
                    log::warn!("line {no}: ignoring range on objective row `{row}`");
                }
                RowRef::Row(i) => {
                    if !self.range_seen.insert(i) {
                        return Err(MpsError::new(
                            no,
                            MpsErrorKind::DuplicateEntry {
                                row: row.into(),
                                column: "RANGES".into(),
                            },
                        ));
                    }
                    self.rows[i].range = Some(v);
                }
            }
        }
        Ok(())
    }

    fn bound_fields<'a>(&self, line: &'a str, no: usize) -> Result<BoundLine<'a>, MpsError> {
        let missing = |what| MpsError::new(no, MpsErrorKind::MissingField(what));
        match self.format {
            MpsFormat::Free => {
                let t: Vec<&str> = line.split_whitespace().collect();
                let kind = *t.first().ok_or(missing("bound type"))?;
                let upper = kind.to_ascii_uppercase();
                let has_set = if needs_value(&upper) {
                    t.len() >= 4
                } else {
                    t.len() >= 4 || (t.len() == 3 && t[2].parse::<f64>().is_err())
                };
                let rest = if has_set { &t[2..] } else { &t[1..] };
                let column = *rest.first().ok_or(missing("bound column"))?;
                Ok(BoundLine {
                    kind,
                    column,
                    value: rest.get(1).copied(),
                })
            }
            MpsFormat::Fixed => Ok(BoundLine {
                kind: fixed_field(line, 0).ok_or(missing("bound type"))?,
                column: fixed_field(line, 2).ok_or(missing("bound column"))?,
                value: fixed_field(line, 3),
            }),
        }
    }

    fn bounds_line(&mut self, line: &str, no: usize) -> Result<(), MpsError> {
        let b = self.bound_fields(line, no)?;
        let kind = b.kind.to_ascii_uppercase();
        let known = matches!(
            kind.as_str(),
            "UP" | "LO" | "FX" | "FR" | "MI" | "PL" | "BV" | "LI" | "UI"
        );
        if !known {
            return Err(MpsError::new(no, MpsErrorKind::UnknownBoundType(b.kind.into())));
        }
        let j = self.column(b.column, no)?;
        let value = if needs_value(&kind) {
            let v = b
                .value
                .ok_or(MpsError::new(no, MpsErrorKind::MissingField("bound value")))?;
            bound_number(v, no)?
        } else {
            0.0
        };
        let col = &mut self.columns[j];
        match kind.as_str() {
            "UP" | "UI" => {
                if value < 0.0 && !self.lower_set[j] && col.lower == 0.0 {
                    log::warn!("line {no}: negative upper bound on `{}` frees its lower bound", col.name);
                    col.lower = f64::NEG_INFINITY;
                }
                col.upper = value;
            }
            "LO" | "LI" => {
                col.lower = value;
                self.lower_set[j] = true;
            }
            "FX" => {
                col.lower = value;
                col.upper = value;
                self.lower_set[j] = true;
            }
            "FR" => {
                col.lower = f64::NEG_INFINITY;
                col.upper = f64::INFINITY;
                self.lower_set[j] = true;
            }
            "MI" => {
                col.lower = f64::NEG_INFINITY;
                self.lower_set[j] = true;
            }
            "PL" => col.upper = f64::INFINITY,
            _ => {
                col.lower = 0.0;
                col.upper = 1.0;
                self.lower_set[j] = true;
            }
        }
        Ok(())
    }

    fn finish(self, last_line: usize) -> Result<GeneralFormLp, MpsError> {
        let objective_name = self
            .objective
            .ok_or(MpsError::new(last_line, MpsErrorKind::MissingObjective))?;
        let matrix = SparseMatrix::from_triplets(self.rows.len(), self.columns.len(), &self.triplets)
            .expect("entries are deduplicated and in range");
        Ok(GeneralFormLp {
            name: self.name,
            sense: self.sense,
            objective_name,
            objective_constant: self.objective_constant,
            rows: self.rows,
            columns: self.columns,
            matrix,
        })
    }
}

/// Parses free-format MPS text.
pub fn parse_mps(text: &str) -> Result<GeneralFormLp, MpsError> {
    parse_mps_with(text, MpsFormat::Free)
}

pub fn parse_mps_with(text: &str, format: MpsFormat) -> Result<GeneralFormLp, MpsError> {
    let mut p = Parser::new(format);
    let mut section: Option<Section> = None;
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        last = no;
        let line = raw.trim_end();
        if line.trim().is_empty() || line.starts_with('*') {
            continue;
        }
        if !line.starts_with(char::is_whitespace) {
            let mut words = line.split_whitespace();
            let head = words.next().unwrap_or_default();
            if head == "ENDATA" {
                break;
            }
            let s = section_of(head)
                .ok_or_else(|| MpsError::new(no, MpsErrorKind::UnknownSection(head.into())))?;
            match s {
                Section::Name => {
                    p.name = line[head.len()..].trim().to_string();
                }
                Section::ObjSense => {
                    if let Some(w) = words.next() {
                        p.sense = parse_sense(w, no)?;
                    }
                }
                _ => {}
            }
            section = Some(s);
            continue;
        }
        match section {
            None | Some(Section::Name) => {
                return Err(MpsError::new(no, MpsErrorKind::DataOutsideSection))
            }
            Some(Section::ObjSense) => p.sense = parse_sense(line.trim(), no)?,
            Some(Section::Rows) => p.rows_line(line, no)?,
            Some(Section::Columns) => p.columns_line(line, no)?,
            Some(Section::Rhs) => p.rhs_line(line, no)?,
            Some(Section::Ranges) => p.ranges_line(line, no)?,
            Some(Section::Bounds) => p.bounds_line(line, no)?,
        }
    }
    p.finish(last)
}

fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        return "1e30".into();
    }
    if v == f64::NEG_INFINITY {
        return "-1e30".into();
    }
    let plain = format!("{v}");
    let sci = format!("{v:e}");
    if plain.len() <= sci.len() {
        plain
    } else {
        sci
    }
}

/// Normalized MPS text for `lp`. Free format is used unless some name
/// contains whitespace, in which case fixed format is written; fixed format
/// fails when a name exceeds 8 characters or a number does not fit 12.
pub fn write_mps(lp: &GeneralFormLp) -> Result<String> {
    write_mps_with(lp, normalized_format(lp))
}

/// Format [`write_mps`] uses for `lp`.
pub fn normalized_format(lp: &GeneralFormLp) -> MpsFormat {
    let spaced = std::iter::once(&lp.objective_name)
        .chain(lp.rows.iter().map(|r| &r.name))
        .chain(lp.columns.iter().map(|c| &c.name))
        .any(|n| n.contains(char::is_whitespace));
    if spaced {
        MpsFormat::Fixed
    } else {
        MpsFormat::Free
    }
}

struct Writer {
    format: MpsFormat,
    out: String,
}

impl Writer {
    /// One data line: `kind`, then up to two names, then `(name, value)`
    /// pairs laid out in the remaining fields.
    fn line(&mut self, fields: [Option<&str>; 6]) -> Result<()> {
        match self.format {
            MpsFormat::Free => {
                let parts: Vec<&str> = fields.iter().flatten().copied().collect();
                self.out.push(' ');
                self.out.push_str(&parts.join(" "));
            }
            MpsFormat::Fixed => {
                const STARTS: [usize; 6] = [1, 4, 14, 24, 39, 49];
                const WIDTHS: [usize; 6] = [2, 8, 8, 12, 8, 12];
                let mut line = String::new();
                for (i, f) in fields.iter().enumerate() {
                    let Some(f) = f else { continue };
                    if f.len() > WIDTHS[i] {
                        return Err(Error::InvalidConfig(format!(
                            "`{f}` does not fit a fixed-format field"
                        )));
                    }
                    while line.len() < STARTS[i] {
                        line.push(' ');
                    }
                    line.push_str(f);
                }
                self.out.push_str(&line);
            }
        }
        self.out.push('\n');
        Ok(())
    }
}

pub fn write_mps_with(lp: &GeneralFormLp, format: MpsFormat) -> Result<String> {
    if lp.matrix.n_rows() != lp.rows.len() || lp.matrix.n_cols() != lp.columns.len() {
        return Err(Error::DimensionMismatch {
            context: "general-form matrix",
            expected: lp.rows.len() * lp.columns.len(),
            actual: lp.matrix.n_rows() * lp.matrix.n_cols(),
        });
    }
    let mut w = Writer {
        format,
        out: String::new(),
    };
    w.out.push_str(format!("NAME {}\n", lp.name).trim_end());
    w.out.push('\n');
    if lp.sense == Sense::Maximize {
        w.out.push_str("OBJSENSE\n    MAX\n");
    }
    w.out.push_str("ROWS\n");
    w.line([Some("N"), Some(&lp.objective_name), None, None, None, None])?;
    for r in &lp.rows {
        let kind = match r.relation {
            Relation::Le => "L",
            Relation::Ge => "G",
            Relation::Eq => "E",
        };
        w.line([Some(kind), Some(&r.name), None, None, None, None])?;
    }
    w.out.push_str("COLUMNS\n");
    for (j, col) in lp.columns.iter().enumerate() {
        let cost = fmt_num(col.cost);
        let entries: Vec<(usize, f64)> = lp.matrix.column(j).collect();
        if col.cost != 0.0 || entries.is_empty() {
            w.line([None, Some(&col.name), Some(&lp.objective_name), Some(&cost), None, None])?;
        }
        for (i, v) in entries {
            let v = fmt_num(v);
            w.line([None, Some(&col.name), Some(&lp.rows[i].name), Some(&v), None, None])?;
        }
    }
    w.out.push_str("RHS\n");
    if lp.objective_constant != 0.0 {
        let v = fmt_num(-lp.objective_constant);
        w.line([None, Some("RHS"), Some(&lp.objective_name), Some(&v), None, None])?;
    }
    for r in lp.rows.iter().filter(|r| r.rhs != 0.0) {
        let v = fmt_num(r.rhs);
        w.line([None, Some("RHS"), Some(&r.name), Some(&v), None, None])?;
    }
    if lp.rows.iter().any(|r| r.range.is_some()) {
        w.out.push_str("RANGES\n");
        for r in &lp.rows {
            if let Some(range) = r.range {
                let v = fmt_num(range);
                w.line([None, Some("RNG"), Some(&r.name), Some(&v), None, None])?;
            }
        }
    }
    w.out.push_str("BOUNDS\n");
    for col in &lp.columns {
        let name = Some(col.name.as_str());
        let (lo, up) = (col.lower, col.upper);
        let mut bound = |kind: &str, v: Option<f64>| {
            let v = v.map(fmt_num);
            w.line([Some(kind), Some("BND"), name, v.as_deref(), None, None])
        };
        if lo == 0.0 && up == f64::INFINITY {
            continue;
        }
        if lo == up {
            bound("FX", Some(lo))?;
        } else if lo == f64::NEG_INFINITY && up == f64::INFINITY {
            bound("FR", None)?;
        } else {
            if lo == f64::NEG_INFINITY {
                bound("MI", None)?;
            } else if lo != 0.0 || up < 0.0 {
                bound("LO", Some(lo))?;
            }
            if up != f64::INFINITY {
                bound("UP", Some(up))?;
            }
        }
    }
    w.out.push_str("ENDATA\n");
    Ok(w.out)
}
