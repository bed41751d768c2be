//! Reading graphs, norms, fields and vector lists from disk.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use nlgap_core::graph::{parse_edge_list, Indexing, RegularGraph};
use nlgap_core::norms::UncondNorm;
use nlgap_core::poincare::VectorField;

pub fn read_graph(path: &Path, one_based: bool) -> Result<RegularGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading edge list {}", path.display()))?;
    let indexing = if one_based { Indexing::OneBased } else { Indexing::ZeroBased };
    parse_edge_list(&text, indexing).with_context(|| format!("parsing edge list {}", path.display()))
}

pub fn read_norm(path: &Path) -> Result<UncondNorm> {
    let text = fs::read_to_string(path).with_context(|| format!("reading norm {}", path.display()))?;
    let nm: UncondNorm = serde_json::from_str(&text)
        .with_context(|| format!("{} is not a norm expression (expected e.g. {{\"type\":\"lq\",\"q\":2}})", path.display()))?;
    nm.validate().with_context(|| format!("invalid norm in {}", path.display()))?;
    Ok(nm)
}

/// Numeric CSV rows of equal length. A first row that does not parse as
/// numbers is taken to be a header.
pub fn read_matrix(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: malformed CSV record {}", path.display(), i + 1))?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => {
                if let Some(x) = row.iter().find(|x| !x.is_finite()) {
                    bail!("{}: row {} has a non-finite entry {x}", path.display(), i + 1);
                }
                if let Some(first) = rows.first() {
                    if first.len() != row.len() {
                        bail!("{}: row {} has {} columns, expected {}", path.display(), i + 1, row.len(), first.len());
                    }
                }
                rows.push(row);
            }
            Err(_) if i == 0 => continue,
            Err(e) => bail!("{}: row {}: {e}", path.display(), i + 1),
        }
    }
    if rows.is_empty() {
        bail!("{}: no numeric rows", path.display());
    }
    Ok(rows)
}

pub fn read_field(path: &Path) -> Result<VectorField> {
    Ok(VectorField::from_rows(&read_matrix(path)?)?)
}

/// Comma-separated list, e.g. `128,256,512`. An empty string is an empty list.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|e| anyhow::anyhow!("bad list entry {t:?}: {e}")))
        .collect()
}
