//! Data model and ingestion: covariate matrix with treatment/outcome vectors,
//! CSV loading with missing-value tracking, median imputation with missingness
//! indicators, and the deterministic viscoelastic-assay protocol encodings.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{conv, median, Scalar};

/// Token values treated as missing in CSV cells.
fn is_missing_token(cell: &str) -> bool {
    cell.is_empty() || cell == "NA"
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeFamily {
    Binary,
    Continuous,
}

/// One covariate column; `missing[i]` marks cells whose value is a placeholder.
#[derive(Debug, Clone)]
pub struct Column<S> {
    pub name: String,
    pub values: Vec<S>,
    pub missing: Vec<bool>,
}

impl<S: Scalar> Column<S> {
    pub fn dense(name: impl Into<String>, values: Vec<S>) -> Self {
        let missing = vec![false; values.len()];
        Column { name: name.into(), values, missing }
    }

    pub fn has_missing(&self) -> bool {
        self.missing.iter().any(|&m| m)
    }
}

/// Observational dataset: covariates W, binary treatment A, outcome Y.
#[derive(Debug, Clone)]
pub struct Dataset<S> {
    columns: Vec<Column<S>>,
    treatment: Vec<u8>,
    outcome: Vec<S>,
    outcome_family: OutcomeFamily,
    treatment_name: String,
    outcome_name: String,
}

impl<S: Scalar> Dataset<S> {
    pub fn new(
        columns: Vec<Column<S>>,
        treatment: Vec<u8>,
        outcome: Vec<S>,
        outcome_family: OutcomeFamily,
        treatment_name: impl Into<String>,
        outcome_name: impl Into<String>,
    ) -> Result<Self> {
        let n = treatment.len();
        if n == 0 {
            return Err(Error::domain("dataset must contain at least one row"));
        }
        if outcome.len() != n {
            return Err(Error::domain("treatment and outcome lengths differ"));
        }
        for c in &columns {
            if c.values.len() != n || c.missing.len() != n {
                return Err(Error::domain(format!("column `{}` length differs from n={n}", c.name)));
            }
        }
        for (i, c) in columns.iter().enumerate() {
            if columns[..i].iter().any(|other| other.name == c.name) {
                return Err(Error::domain(format!("duplicate column name `{}`", c.name)));
            }
        }
        if let Some(&a) = treatment.iter().find(|&&a| a > 1) {
            return Err(Error::domain(format!("treatment value {a} outside {{0,1}}")));
        }
        if outcome_family == OutcomeFamily::Binary {
            if let Some(y) = outcome.iter().find(|&&y| y != S::zero() && y != S::one()) {
                return Err(Error::domain(format!("binary outcome value {y} outside {{0,1}}")));
            }
        }
        Ok(Dataset {
            columns,
            treatment,
            outcome,
            outcome_family,
            treatment_name: treatment_name.into(),
            outcome_name: outcome_name.into(),
        })
    }

    /// Builds a fully observed dataset from plain numeric columns.
    pub fn from_numeric_parts(
        names: Vec<String>,
        cols: Vec<Vec<S>>,
        treatment: Vec<u8>,
        outcome: Vec<S>,
        outcome_family: OutcomeFamily,
    ) -> Result<Self> {
        if names.len() != cols.len() {
            return Err(Error::domain("column name/value count mismatch"));
        }
        let columns = names
            .into_iter()
            .zip(cols)
            .map(|(name, values)| Column::dense(name, values))
            .collect();
        Dataset::new(columns, treatment, outcome, outcome_family, "a", "y")
    }

    pub fn n(&self) -> usize {
        self.treatment.len()
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column<S>] {
        &self.columns
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn column(&self, name: &str) -> Option<&Column<S>> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn column_values(&self, name: &str) -> Option<&[S]> {
        self.column(name).map(|c| c.values.as_slice())
    }

    pub fn treatment(&self) -> &[u8] {
        &self.treatment
    }

    pub fn outcome(&self) -> &[S] {
        &self.outcome
    }

    pub fn outcome_family(&self) -> OutcomeFamily {
        self.outcome_family
    }

    pub fn has_missing(&self) -> bool {
        self.columns.iter().any(Column::has_missing)
    }

    /// Serializes back to CSV with the load conventions (empty cell = missing).
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        let mut header: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        header.push(&self.treatment_name);
        header.push(&self.outcome_name);
        writeln!(out, "{}", header.join(",")).unwrap();
        for i in 0..self.n() {
            let mut cells: Vec<String> = self
                .columns
                .iter()
                .map(|c| if c.missing[i] { String::new() } else { format!("{}", c.values[i]) })
                .collect();
            cells.push(format!("{}", self.treatment[i]));
            cells.push(format!("{}", self.outcome[i]));
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }
}

/// Raw column content before numeric/categorical resolution.
enum RawColumn {
    Numeric { name: String, values: Vec<f64>, missing: Vec<bool> },
    Categorical { name: String, values: Vec<Option<String>> },
}

/// Loads a CSV file into a [`Dataset`].
///
/// Covariate columns keep file order; the treatment and outcome columns are
/// extracted by name. Categorical covariates (any non-numeric cell) expand to
/// one indicator column per level, named `<column>_<level>`. Only covariates
/// may contain missing cells (empty string or `NA`).
pub fn load_csv<S: Scalar>(
    path: impl AsRef<Path>,
    treatment_col: &str,
    outcome_col: &str,
    outcome_family: OutcomeFamily,
) -> Result<Dataset<S>> {
    let file = std::fs::File::open(path.as_ref())?;
    read_csv(file, treatment_col, outcome_col, outcome_family)
}

/// [`load_csv`] over any reader; rows are numbered from 1 in errors.
pub fn read_csv<S: Scalar, R: Read>(
    reader: R,
    treatment_col: &str,
    outcome_col: &str,
    outcome_family: OutcomeFamily,
) -> Result<Dataset<S>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();

    let t_idx = headers
        .iter()
        .position(|h| h == treatment_col)
        .ok_or_else(|| Error::domain(format!("treatment column `{treatment_col}` not found")))?;
    let y_idx = headers
        .iter()
        .position(|h| h == outcome_col)
        .ok_or_else(|| Error::domain(format!("outcome column `{outcome_col}` not found")))?;
    if t_idx == y_idx {
        return Err(Error::domain("treatment and outcome columns must differ"));
    }

    let mut rows: Vec<Vec<String>> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::parse(i + 1, e.to_string()))?;
        if record.len() != headers.len() {
            return Err(Error::parse(i + 1, "row width differs from header"));
        }
        rows.push(record.iter().map(str::to_string).collect());
    }
    if rows.is_empty() {
        return Err(Error::domain("CSV contains no data rows"));
    }
    let n = rows.len();

    let mut treatment = Vec::with_capacity(n);
    let mut outcome = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let t_cell = row[t_idx].trim();
        if is_missing_token(t_cell) {
            return Err(Error::domain(format!("missing treatment value at row {}", i + 1)));
        }
        let t: f64 = t_cell
            .parse()
            .map_err(|_| Error::parse(i + 1, format!("treatment cell `{t_cell}` is not numeric")))?;
        if t == 0.0 {
            treatment.push(0u8);
        } else if t == 1.0 {
            treatment.push(1u8);
        } else {
            return Err(Error::domain(format!("treatment value {t} outside {{0,1}} at row {}", i + 1)));
        }

        let y_cell = row[y_idx].trim();
        if is_missing_token(y_cell) {
            return Err(Error::domain(format!("missing outcome value at row {}", i + 1)));
        }
        let y: f64 = y_cell
            .parse()
            .map_err(|_| Error::parse(i + 1, format!("outcome cell `{y_cell}` is not numeric")))?;
        outcome.push(conv::<S>(y));
    }

    // Covariates: first pass decides numeric vs categorical per column.
    let mut raw_cols: Vec<RawColumn> = Vec::new();
    for (j, name) in headers.iter().enumerate() {
        if j == t_idx || j == y_idx {
            continue;
        }
        let mut numeric = true;
        for row in &rows {
            let cell = row[j].trim();
            if !is_missing_token(cell) && cell.parse::<f64>().is_err() {
                numeric = false;
                break;
            }
        }
        if numeric {
            let mut values = Vec::with_capacity(n);
            let mut missing = Vec::with_capacity(n);
            for row in &rows {
                let cell = row[j].trim();
                if is_missing_token(cell) {
                    values.push(0.0);
                    missing.push(true);
                } else {
                    values.push(cell.parse::<f64>().unwrap());
                    missing.push(false);
                }
            }
            raw_cols.push(RawColumn::Numeric { name: name.clone(), values, missing });
        } else {
            let values = rows
                .iter()
                .map(|row| {
                    let cell = row[j].trim();
                    if is_missing_token(cell) { None } else { Some(cell.to_string()) }
                })
                .collect();
            raw_cols.push(RawColumn::Categorical { name: name.clone(), values });
        }
    }

    // Second pass materializes columns; categoricals one-hot over sorted levels.
    let mut columns: Vec<Column<S>> = Vec::new();
    for raw in raw_cols {
        match raw {
            RawColumn::Numeric { name, values, missing } => {
                let values = values.into_iter().map(conv::<S>).collect();
                columns.push(Column { name, values, missing });
            }
            RawColumn::Categorical { name, values } => {
                let mut levels: Vec<&String> = values.iter().flatten().collect();
                levels.sort();
                levels.dedup();
                if levels.is_empty() {
                    return Err(Error::domain(format!("column `{name}` has no observed values")));
                }
                let levels: Vec<String> = levels.into_iter().cloned().collect();
                for level in &levels {
                    let mut ind = Vec::with_capacity(n);
                    let mut miss = Vec::with_capacity(n);
                    for v in &values {
                        match v {
                            Some(cell) => {
                                ind.push(if cell == level { S::one() } else { S::zero() });
                                miss.push(false);
                            }
                            None => {
                                ind.push(S::zero());
                                miss.push(true);
                            }
                        }
                    }
                    columns.push(Column { name: format!("{name}_{level}"), values: ind, missing: miss });
                }
            }
        }
    }

    Dataset::new(columns, treatment, outcome, outcome_family, treatment_col, outcome_col)
}

/// Replaces missing cells by the column median of observed values and appends
/// one `<name>_miss` indicator column per column that had any missing cell.
///
/// Applying it a second time is the identity: the output has no missing cells.
pub fn impute_and_flag<S: Scalar>(d: &Dataset<S>) -> Result<Dataset<S>> {
    let n = d.n();
    let mut imputed: Vec<Column<S>> = Vec::with_capacity(d.p());
    let mut indicators: Vec<Column<S>> = Vec::new();

    for col in d.columns() {
        if !col.has_missing() {
            imputed.push(col.clone());
            continue;
        }
        let observed: Vec<S> = col
            .values
            .iter()
            .zip(&col.missing)
            .filter(|&(_, &m)| !m)
            .map(|(&v, _)| v)
            .collect();
        if observed.is_empty() {
            return Err(Error::domain(format!("column `{}` is entirely missing", col.name)));
        }
        let fill = median(&observed);
        let values = col
            .values
            .iter()
            .zip(&col.missing)
            .map(|(&v, &m)| if m { fill } else { v })
            .collect();
        imputed.push(Column { name: col.name.clone(), values, missing: vec![false; n] });

        let flag_name = format!("{}_miss", col.name);
        if d.column(&flag_name).is_some() {
            return Err(Error::domain(format!("indicator name `{flag_name}` collides with an existing column")));
        }
        let flags = col.missing.iter().map(|&m| if m { S::one() } else { S::zero() }).collect();
        indicators.push(Column { name: flag_name, values: flags, missing: vec![false; n] });
    }

    imputed.extend(indicators);
    Dataset::new(
        imputed,
        d.treatment.clone(),
        d.outcome.clone(),
        d.outcome_family,
        d.treatment_name.clone(),
        d.outcome_name.clone(),
    )
}

/// One thromboelastography record plus the transfusion units received.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TegRecord {
    /// Activated clotting time, seconds.
    pub act: f64,
    /// Alpha angle, degrees.
    pub alpha: f64,
    /// Maximum amplitude, millimeters.
    pub ma: f64,
    pub plasma_units: u32,
    pub cryo_units: u32,
    pub plt_units: u32,
}

impl TegRecord {
    pub fn new(
        act: f64,
        alpha: f64,
        ma: f64,
        plasma_units: u32,
        cryo_units: u32,
        plt_units: u32,
    ) -> Result<Self> {
        if act < 0.0 || alpha < 0.0 || ma < 0.0 {
            return Err(Error::domain("TEG measures must be nonnegative"));
        }
        Ok(TegRecord { act, alpha, ma, plasma_units, cryo_units, plt_units })
    }
}

/// Which transfusion rule defines on/off-protocol status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleId {
    /// Plasma for prolonged activated clotting time (threshold 128 s).
    Plasma,
    /// Cryoprecipitate for low alpha angle (threshold 65 deg).
    Cryo,
    /// Platelets for low maximum amplitude (threshold 55 mm).
    Platelet,
}

impl FromStr for RuleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plasma" => Ok(RuleId::Plasma),
            "cryo" => Ok(RuleId::Cryo),
            "platelet" => Ok(RuleId::Platelet),
            other => Err(Error::domain(format!(
                "unknown rule `{other}` (expected plasma, cryo or platelet)"
            ))),
        }
    }
}

/// Maps continuous assay measures plus units received to on/off-protocol status.
///
/// Each rule is a four-row truth table over (measure vs threshold, units zero
/// or positive); a zero assay value counts as on-protocol when no product was
/// indicated by it. Rows not matched by any listed condition are off-protocol.
pub fn map_protocol(r: &TegRecord, rule: RuleId) -> u8 {
    match rule {
        RuleId::Plasma => {
            if r.act >= 128.0 && r.plasma_units > 0 {
                1
            } else if r.act >= 128.0 && r.plasma_units == 0 {
                0
            } else if r.act == 0.0 || (r.act < 128.0 && r.plasma_units == 0) {
                1
            } else {
                0
            }
        }
        RuleId::Cryo => {
            if r.alpha == 0.0 && r.cryo_units == 0 {
                1
            } else if r.alpha <= 65.0 && r.cryo_units > 0 {
                1
            } else if r.alpha <= 65.0 && r.cryo_units == 0 {
                0
            } else {
                0
            }
        }
        RuleId::Platelet => {
            if r.ma == 0.0 && r.plt_units == 0 {
                1
            } else if r.ma <= 55.0 && r.plt_units > 0 {
                1
            } else if r.ma <= 55.0 && r.plt_units == 0 {
                0
            } else {
                0
            }
        }
    }
}

/// Hemostasis outcome: achieved (1) iff no packed red blood cells were
/// received in the 7-12h interval.
pub fn derive_hemostasis(received_packed_rbc_7_to_12h: bool) -> u8 {
    if received_packed_rbc_7_to_12h {
        0
    } else {
        1
    }
}

/// Elementwise [`derive_hemostasis`].
pub fn derive_hemostasis_all(received: &[bool]) -> Vec<u8> {
    received.iter().map(|&r| derive_hemostasis(r)).collect()
}
