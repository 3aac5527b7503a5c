//! Datasets: CSV ingestion, bundled regression fixtures, seeded splits with
//! train-set normalization, and synthetic optimization problems.
//!
//! CSV input is UTF-8, comma separated, with a header row and `.` as the
//! decimal separator. Empty cells and `NA`/`NaN` count as missing; rows with
//! a missing value are dropped and counted in [`Dataset::dropped_rows`].
//!
//! Bundled fixtures:
//!
//! | name       | rows | features                                                        | target |
//! |------------|------|-----------------------------------------------------------------|--------|
//! | `boston`   | 506  | CRIM,ZN,INDUS,CHAS,NOX,RM,AGE,DIS,RAD,TAX,PTRATIO,B,LSTAT       | MEDV   |
//! | `diabetes` | 442  | AGE,SEX,BMI,BP,S1,S2,S3,S4,S5,S6                                | Y      |
//!
//! California Housing (20640 rows; MedInc,HouseAge,AveRooms,AveBedrms,
//! Population,AveOccup,Latitude,Longitude → MedHouseVal) is not bundled;
//! point [`load_csv`] at a local copy.

mod split;
mod synthetic;

use std::fs::File;
use std::io::Read;
use std::path::Path;

use thiserror::Error;

pub use split::{split_normalize, SplitDataset};
pub use synthetic::{
    make_blobs, make_quadratic, make_rosenbrock, Blobs, Objective, Quadratic, Rosenbrock,
    SyntheticProblem,
};

use crate::model::{Batch, Targets};
use crate::vector::Matrix;

const BOSTON_CSV: &str = include_str!("../../data/boston.csv");
const DIABETES_CSV: &str = include_str!("../../data/diabetes.csv");

#[derive(Debug, Error)]
pub enum DataError {
    #[error("file not found: {0}")]
    FileNotFound(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at row {row}, column `{column}`: `{value}`")]
    ParseError {
        /// 1-based data row (the header is row 0).
        row: usize,
        column: String,
        value: String,
    },
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("malformed CSV: {0}")]
    Malformed(String),
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("unknown bundled dataset `{0}`")]
    UnknownDataset(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub features: Matrix,
    pub targets: Targets,
    pub feature_names: Vec<String>,
    pub target_name: String,
    pub dropped_rows: usize,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.features.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn batch(&self) -> Batch {
        Batch {
            inputs: self.features.clone(),
            targets: self.targets.clone(),
        }
    }

    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            features: self.features.select_rows(indices),
            targets: self.targets.select(indices),
            feature_names: self.feature_names.clone(),
            target_name: self.target_name.clone(),
            dropped_rows: 0,
        }
    }
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "NaN" | "nan" | "N/A")
}

/// Parse CSV text whose column `target_column` becomes the regression target.
pub fn parse_csv(
    name: &str,
    reader: impl Read,
    target_column: &str,
) -> Result<Dataset, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| DataError::Malformed(e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    let target_idx = headers
        .iter()
        .position(|h| h == target_column)
        .ok_or_else(|| DataError::MissingColumn(target_column.to_owned()))?;

    let mut features = Vec::new();
    let mut targets = Vec::new();
    let mut dropped = 0;
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| DataError::Malformed(e.to_string()))?;
        if record.len() != headers.len() {
            return Err(DataError::Malformed(format!(
                "row {row} has {} fields, header has {}",
                record.len(),
                headers.len()
            )));
        }
        if record.iter().any(is_missing) {
            dropped += 1;
            continue;
        }
        let mut values = Vec::with_capacity(headers.len() - 1);
        let mut target = 0.0;
        for (j, cell) in record.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| DataError::ParseError {
                row,
                column: headers[j].clone(),
                value: cell.to_owned(),
            })?;
            if j == target_idx {
                target = value;
            } else {
                values.push(value);
            }
        }
        features.push(values);
        targets.push(target);
    }
    let mut feature_names = headers.clone();
    feature_names.remove(target_idx);
    let features = if features.is_empty() {
        Matrix::zeros(0, feature_names.len())
    } else {
        Matrix::from_rows(&features).map_err(|e| DataError::Malformed(e.to_string()))?
    };
    Ok(Dataset {
        name: name.to_owned(),
        features,
        targets: Targets::Values(Matrix::column(&targets)),
        feature_names,
        target_name: target_column.to_owned(),
        dropped_rows: dropped,
    })
}

pub fn load_csv(path: impl AsRef<Path>, target_column: &str) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => DataError::FileNotFound(path.display().to_string()),
        _ => DataError::Io(e),
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    parse_csv(&name, file, target_column)
}

pub const BUNDLED: [&str; 2] = ["boston", "diabetes"];

pub fn bundled(name: &str) -> Result<Dataset, DataError> {
    match name {
        "boston" => parse_csv("boston", BOSTON_CSV.as_bytes(), "MEDV"),
        "diabetes" => parse_csv("diabetes", DIABETES_CSV.as_bytes(), "Y"),
        other => Err(DataError::UnknownDataset(other.to_owned())),
    }
}
