//! Plain-text sample files for responses that are only known through
//! simulation or measurement.
//!
//! ```text
//! # free comment lines are allowed before the header
//! param:L,param:W,theta@phi=0:-90,theta@phi=0:-89.5,...,theta@phi=90:-90,...
//! 0.0204;0.03,0.0151;0.03,,,...
//! 0.0201,0.0149,-12.1,-12.0,...
//! ```
//!
//! Header cells are `param:<name>` followed by `theta:<deg>` or
//! `theta@<cut>:<deg>`; consecutive angle columns with the same cut label
//! form one cut. The second line holds `<nominal>;<relative tolerance>` for
//! every parameter and, optionally, the nominal response under each angle
//! (all cells of a cut filled, or all empty). Every further line is one
//! sample: the parameter values, then the responses.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angular cut of a dataset: a label and a contiguous run of grid columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub label: String,
    /// First column of the cut within the response block.
    pub start: usize,
    /// Angles in degrees.
    pub theta_deg: Vec<f64>,
    /// Nominal response, when supplied in the file.
    pub nominal: Option<Vec<f64>>,
}

impl Cut {
    pub fn len(&self) -> usize {
        self.theta_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta_deg.is_empty()
    }

    pub fn columns(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalDataset {
    pub param_names: Vec<String>,
    pub nominal: Vec<f64>,
    pub deltas: Vec<f64>,
    pub cuts: Vec<Cut>,
    pub inputs: Vec<Vec<f64>>,
    /// One row per sample, all cuts side by side.
    pub outputs: Vec<Vec<f64>>,
}

impl ExternalDataset {
    pub fn n_params(&self) -> usize {
        self.param_names.len()
    }

    pub fn n_theta(&self) -> usize {
        self.cuts.iter().map(Cut::len).sum()
    }

    pub fn n_samples(&self) -> usize {
        self.inputs.len()
    }

    /// Rows of cut `c`.
    pub fn cut_outputs(&self, c: usize) -> Vec<Vec<f64>> {
        let r = self.cuts[c].columns();
        self.outputs.iter().map(|row| row[r.clone()].to_vec()).collect()
    }

    /// `true` when both files describe the same parameters and angles.
    pub fn same_layout(&self, other: &ExternalDataset) -> bool {
        self.param_names == other.param_names
            && self.cuts.len() == other.cuts.len()
            && self
                .cuts
                .iter()
                .zip(&other.cuts)
                .all(|(a, b)| a.label == b.label && a.start == b.start && a.theta_deg == b.theta_deg)
    }

    /// Serializes to the text format; values use round-trip precision.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut head: Vec<String> = self.param_names.iter().map(|n| format!("param:{n}")).collect();
        for c in &self.cuts {
            for t in &c.theta_deg {
                head.push(if c.label.is_empty() { format!("theta:{t}") } else { format!("theta@{}:{t}", c.label) });
            }
        }
        let _ = writeln!(s, "{}", head.join(","));
        let mut meta: Vec<String> = self.nominal.iter().zip(&self.deltas).map(|(p, d)| format!("{p};{d}")).collect();
        for c in &self.cuts {
            match &c.nominal {
                Some(v) => meta.extend(v.iter().map(|x| x.to_string())),
                None => meta.extend(std::iter::repeat_n(String::new(), c.len())),
            }
        }
        let _ = writeln!(s, "{}", meta.join(","));
        for (i, o) in self.inputs.iter().zip(&self.outputs) {
            let row: Vec<String> = i.iter().chain(o).map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{}", row.join(","));
        }
        s
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path.as_ref(), self.to_text()).map_err(|e| Error::io(path, e))
    }
}

fn bad(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Dataset { line, column, message: message.into() }
}

fn number(cell: &str, line: usize, column: usize) -> Result<f64> {
    let v: f64 = cell.trim().parse().map_err(|_| bad(line, column, format!("expected a number, got {cell:?}")))?;
    if !v.is_finite() {
        return Err(bad(line, column, "non-finite value"));
    }
    Ok(v)
}

/// Reads and validates a dataset file.
pub fn ingest(path: impl AsRef<Path>) -> Result<ExternalDataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse(&text)
}

/// Parses the text format (see the module docs).
pub fn parse(text: &str) -> Result<ExternalDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = rdr.records();
    let next = |records: &mut csv::StringRecordsIter<&[u8]>| -> Result<Option<(usize, csv::StringRecord)>> {
        match records.next() {
            None => Ok(None),
            Some(r) => {
                let r = r?;
                let line = r.position().map_or(0, |p| p.line() as usize);
                Ok(Some((line, r)))
            }
        }
    };

    let (hline, header) = next(&mut records)?.ok_or_else(|| bad(1, 1, "missing header line"))?;
    let mut param_names = Vec::new();
    let mut cuts: Vec<Cut> = Vec::new();
    for (j, cell) in header.iter().enumerate() {
        if let Some(name) = cell.strip_prefix("param:") {
            if !cuts.is_empty() {
                return Err(bad(hline, j + 1, "parameter columns must precede angle columns"));
            }
            param_names.push(name.to_string());
        } else if let Some(rest) = cell.strip_prefix("theta") {
            let (label, deg) = if let Some(r) = rest.strip_prefix(':') {
                ("", r)
            } else if let Some(r) = rest.strip_prefix('@') {
                r.rsplit_once(':').ok_or_else(|| bad(hline, j + 1, "expected theta@<cut>:<deg>"))?
            } else {
                return Err(bad(hline, j + 1, format!("unrecognised header cell {cell:?}")));
            };
            let t = number(deg, hline, j + 1)?;
            let start = cuts.iter().map(Cut::len).sum();
            match cuts.last_mut() {
                Some(c) if c.label == label => c.theta_deg.push(t),
                _ => {
                    if cuts.iter().any(|c| c.label == label) {
                        return Err(bad(hline, j + 1, format!("cut {label:?} is not contiguous")));
                    }
                    cuts.push(Cut { label: label.to_string(), start, theta_deg: vec![t], nominal: None });
                }
            }
        } else {
            return Err(bad(hline, j + 1, format!("unrecognised header cell {cell:?}")));
        }
    }
    let n = param_names.len();
    let k: usize = cuts.iter().map(Cut::len).sum();
    if n == 0 {
        return Err(bad(hline, 1, "no param: columns"));
    }
    if k == 0 {
        return Err(bad(hline, n + 1, "no theta columns"));
    }
    let width = n + k;

    let (mline, meta) = next(&mut records)?.ok_or_else(|| bad(hline + 1, 1, "missing nominal/tolerance line"))?;
    if meta.len() != width {
        return Err(bad(mline, meta.len().min(width) + 1, format!("expected {width} cells, found {}", meta.len())));
    }
    let mut nominal = Vec::with_capacity(n);
    let mut deltas = Vec::with_capacity(n);
    for j in 0..n {
        let (p, d) = meta[j].split_once(';').ok_or_else(|| bad(mline, j + 1, "expected <nominal>;<tolerance>"))?;
        nominal.push(number(p, mline, j + 1)?);
        let d = number(d, mline, j + 1)?;
        if !(0.0..1.0).contains(&d) {
            return Err(bad(mline, j + 1, format!("relative tolerance must lie in [0, 1), got {d}")));
        }
        deltas.push(d);
    }
    for c in cuts.iter_mut() {
        let cells: Vec<&str> = c.columns().map(|j| &meta[n + j]).collect();
        let filled = cells.iter().filter(|s| !s.is_empty()).count();
        if filled == 0 {
            continue;
        }
        if filled != cells.len() {
            let j = n + c.start + cells.iter().position(|s| s.is_empty()).unwrap_or(0);
            return Err(bad(mline, j + 1, format!("nominal response of cut {:?} is incomplete", c.label)));
        }
        c.nominal =
            Some(cells.iter().enumerate().map(|(i, s)| number(s, mline, n + c.start + i + 1)).collect::<Result<_>>()?);
    }

    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    let mut lines = Vec::new();
    while let Some((line, rec)) = next(&mut records)? {
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != width {
            return Err(bad(line, rec.len().min(width) + 1, format!("expected {width} cells, found {}", rec.len())));
        }
        let vals: Vec<f64> = rec.iter().enumerate().map(|(j, c)| number(c, line, j + 1)).collect::<Result<_>>()?;
        inputs.push(vals[..n].to_vec());
        outputs.push(vals[n..].to_vec());
        lines.push(line);
    }
    if inputs.is_empty() {
        return Err(bad(mline + 1, 1, "no sample rows"));
    }
    for b in 1..inputs.len() {
        if let Some(a) = (0..b).find(|&a| inputs[a] == inputs[b]) {
            return Err(bad(lines[b], 1, format!("input row duplicates line {}", lines[a])));
        }
    }
    Ok(ExternalDataset { param_names, nominal, deltas, cuts, inputs, outputs })
}
