//! JSON documents for tuples and second fundamental forms.
//!
//! Tuple document: `{"n": 2, "m": 2, "matrices": [[[0, 1], [1, 0]], [[1, 0], [0, -1]]]}`.
//!
//! Form document: `{"n": 2, "m": 1, "c": 0.0, "h": [[[1, 0], [0, 1]]]}`, with
//! coefficients indexed `h[r][i][j]`.
//!
//! Numbers are written in shortest round-trip form, so a document written and
//! read back reproduces every entry bit for bit.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::curvature::SecondFundamentalForm;
use crate::error::{Error, Result};
use crate::matrix::{SymMatrix, SymTuple};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleDoc {
    pub n: usize,
    pub m: usize,
    pub matrices: Vec<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormDoc {
    pub n: usize,
    pub m: usize,
    pub c: f64,
    pub h: Vec<Vec<Vec<f64>>>,
}

/// Checks shape against the declared `n`, `m` and builds the tuple, naming the
/// first offending field on failure.
fn build_members(field: &str, n: usize, m: usize, mats: &[Vec<Vec<f64>>]) -> Result<SymTuple> {
    if n == 0 {
        return Err(Error::Format("n: must be at least 1".into()));
    }
    if m == 0 {
        return Err(Error::Format("m: must be at least 1".into()));
    }
    if mats.len() != m {
        return Err(Error::Format(format!(
            "{field}: m declares {m} matrices but {} are present",
            mats.len()
        )));
    }
    let mut members = Vec::with_capacity(m);
    for (r, rows) in mats.iter().enumerate() {
        if rows.len() != n {
            return Err(Error::Format(format!(
                "{field}[{r}]: has {} rows, n declares {n}",
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Format(format!(
                    "{field}[{r}][{i}]: has {} entries, n declares {n}",
                    row.len()
                )));
            }
        }
        let member = SymMatrix::from_rows(rows).map_err(|e| Error::Format(format!("{field}[{r}]: {e}")))?;
        members.push(member);
    }
    SymTuple::new(members)
}

impl TryFrom<TupleDoc> for SymTuple {
    type Error = Error;

    fn try_from(doc: TupleDoc) -> Result<Self> {
        build_members("matrices", doc.n, doc.m, &doc.matrices)
    }
}

impl From<&SymTuple> for TupleDoc {
    fn from(t: &SymTuple) -> Self {
        TupleDoc {
            n: t.n(),
            m: t.m(),
            matrices: t.to_nested(),
        }
    }
}

impl TryFrom<FormDoc> for SecondFundamentalForm {
    type Error = Error;

    fn try_from(doc: FormDoc) -> Result<Self> {
        let h = build_members("h", doc.n, doc.m, &doc.h)?;
        SecondFundamentalForm::new(h, doc.c).map_err(|e| Error::Format(format!("c: {e}")))
    }
}

impl From<&SecondFundamentalForm> for FormDoc {
    fn from(f: &SecondFundamentalForm) -> Self {
        FormDoc {
            n: f.n(),
            m: f.m(),
            c: f.c(),
            h: f.h().to_nested(),
        }
    }
}

impl Serialize for SymTuple {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        TupleDoc::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymTuple {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = TupleDoc::deserialize(deserializer)?;
        SymTuple::try_from(doc).map_err(serde::de::Error::custom)
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Format(e.to_string())
}

pub fn parse_tuple(text: &str) -> Result<SymTuple> {
    let doc: TupleDoc = serde_json::from_str(text).map_err(json_error)?;
    SymTuple::try_from(doc)
}

pub fn parse_form(text: &str) -> Result<SecondFundamentalForm> {
    let doc: FormDoc = serde_json::from_str(text).map_err(json_error)?;
    SecondFundamentalForm::try_from(doc)
}

pub fn tuple_to_json(t: &SymTuple) -> String {
    serde_json::to_string_pretty(&TupleDoc::from(t)).expect("tuple documents serialize")
}

pub fn form_to_json(f: &SecondFundamentalForm) -> String {
    serde_json::to_string_pretty(&FormDoc::from(f)).expect("form documents serialize")
}
