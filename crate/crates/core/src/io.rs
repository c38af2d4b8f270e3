//! Reading and writing the tabular input formats.
//!
//! Square CSV files carry a header row of column labels (first cell is the
//! corner and is ignored) and one label per row. Lines starting with `#`
//! hold `key=value` metadata; the only key read back is `sentinel`, which
//! marks the value used for undefined cells.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{check_unique, CitationTable, Dissimilarity};

/// `# key=value` directives found at the top of a CSV file.
pub fn read_directives(text: &str) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for line in text.lines().filter_map(|l| l.trim_start().strip_prefix('#')) {
        for token in line.split_whitespace() {
            if let Some((k, v)) = token.split_once('=') {
                out.insert(k.to_string(), v.to_string());
            }
        }
    }
    out
}

/// Format metadata lines for the top of a CSV artifact.
pub fn directive_header(pairs: &[(&str, String)]) -> String {
    let mut s = String::new();
    for (k, v) in pairs {
        let _ = writeln!(s, "# {k}={v}");
    }
    s
}

struct LabelledTable {
    col_labels: Vec<String>,
    row_labels: Vec<String>,
    cells: Vec<Vec<String>>,
    /// 1-based file line of each data row, for diagnostics.
    lines: Vec<usize>,
}

fn read_labelled_table(path: &str, text: &str) -> Result<LabelledTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = rdr.records();
    let header = match records.next() {
        Some(r) => r?,
        None => {
            return Err(Error::Parse {
                path: path.into(),
                row: 1,
                column: 1,
                message: "file has no header row".into(),
            })
        }
    };
    let col_labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut row_labels = Vec::new();
    let mut cells = Vec::new();
    let mut lines = Vec::new();
    for rec in records {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let mut it = rec.iter();
        row_labels.push(it.next().unwrap_or_default().to_string());
        cells.push(it.map(str::to_string).collect());
        lines.push(line);
    }
    Ok(LabelledTable {
        col_labels,
        row_labels,
        cells,
        lines,
    })
}

fn parse_square<T>(path: &str, text: &str) -> Result<(Vec<String>, DMatrix<T>)>
where
    T: std::str::FromStr + nalgebra::Scalar + Default,
{
    let table = read_labelled_table(path, text)?;
    let n = table.col_labels.len();
    if n == 0 {
        return Err(Error::Parse {
            path: path.into(),
            row: 1,
            column: 2,
            message: "header lists no column labels".into(),
        });
    }
    if table.row_labels.len() != n {
        return Err(Error::Parse {
            path: path.into(),
            row: table.lines.last().copied().unwrap_or(1),
            column: 1,
            message: format!(
                "matrix is not square: {n} columns but {} rows",
                table.row_labels.len()
            ),
        });
    }
    check_unique(&table.col_labels)?;
    let mut m = DMatrix::<T>::from_element(n, n, T::default());
    for (i, row) in table.cells.iter().enumerate() {
        let line = table.lines[i];
        if table.row_labels[i] != table.col_labels[i] {
            return Err(Error::Parse {
                path: path.into(),
                row: line,
                column: 1,
                message: format!(
                    "row label `{}` does not match column label `{}`",
                    table.row_labels[i], table.col_labels[i]
                ),
            });
        }
        if row.len() != n {
            return Err(Error::Parse {
                path: path.into(),
                row: line,
                column: row.len() + 2,
                message: format!("expected {n} values, found {}", row.len()),
            });
        }
        for (j, cell) in row.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::Parse {
                    path: path.into(),
                    row: line,
                    column: j + 2,
                    message: format!(
                        "missing value for cell ({}, {})",
                        table.row_labels[i], table.col_labels[j]
                    ),
                });
            }
            m[(i, j)] = cell.parse::<T>().map_err(|_| Error::Parse {
                path: path.into(),
                row: line,
                column: j + 2,
                message: format!("`{cell}` is not a valid number"),
            })?;
        }
    }
    Ok((table.col_labels, m))
}

/// Parse a square dissimilarity CSV held in memory.
///
/// When a `# sentinel=S` directive is present, `max_rank` is the largest
/// value strictly below `S` and cells holding `S` are rewritten to
/// `max_rank + 1`; otherwise `max_rank` is the matrix maximum.
pub fn parse_dissimilarity(source_name: &str, text: &str) -> Result<Dissimilarity> {
    let (labels, m) = parse_square::<f64>(source_name, text)?;
    match read_directives(text).get("sentinel") {
        Some(s) => {
            let sentinel: f64 = s
                .parse()
                .map_err(|_| Error::InvalidInput(format!("{source_name}: sentinel `{s}` is not a number")))?;
            let max_rank = m
                .iter()
                .copied()
                .filter(|&v| v < sentinel)
                .fold(f64::NEG_INFINITY, f64::max);
            if !max_rank.is_finite() {
                return Err(Error::NoDefinedEntries);
            }
            if m.iter().any(|&v| v > sentinel) {
                return Err(Error::InvalidInput(format!(
                    "{source_name}: values exceed the declared sentinel {sentinel}"
                )));
            }
            let m = m.map(|v| if v == sentinel { max_rank + 1.0 } else { v });
            Dissimilarity::with_max_rank(labels, m, max_rank)
        }
        None => Dissimilarity::new(labels, m),
    }
}

pub fn load_dissimilarity(path: impl AsRef<Path>) -> Result<Dissimilarity> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dissimilarity(&path.display().to_string(), &text)
}

/// Render a dissimilarity matrix as CSV, preceded by the given metadata and
/// a sentinel directive.
pub fn dissimilarity_to_csv(delta: &Dissimilarity, meta: &[(&str, String)]) -> String {
    let mut s = directive_header(meta);
    let _ = writeln!(s, "# sentinel={}", fmt_num(delta.sentinel()));
    s.push_str("label");
    for l in delta.labels() {
        s.push(',');
        s.push_str(&csv_field(l));
    }
    s.push('\n');
    for (i, l) in delta.labels().iter().enumerate() {
        s.push_str(&csv_field(l));
        for j in 0..delta.len() {
            s.push(',');
            s.push_str(&fmt_num(delta.get(i, j)));
        }
        s.push('\n');
    }
    s
}

/// JSON form of a [`CitationTable`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CitationTableJson {
    pub labels: Vec<String>,
    pub cites: Vec<Vec<u64>>,
    pub papers: Vec<u64>,
    pub refs: Vec<u64>,
}

impl From<&CitationTable> for CitationTableJson {
    fn from(t: &CitationTable) -> Self {
        let n = t.len();
        Self {
            labels: t.labels().to_vec(),
            cites: (0..n)
                .map(|i| (0..n).map(|j| t.cites()[(i, j)]).collect())
                .collect(),
            papers: t.papers().to_vec(),
            refs: t.refs().to_vec(),
        }
    }
}

pub fn parse_citation_json(text: &str) -> Result<CitationTable> {
    let j: CitationTableJson = serde_json::from_str(text)?;
    CitationTable::from_rows(j.labels, &j.cites, j.papers, j.refs)
}

pub fn load_citation_json(path: impl AsRef<Path>) -> Result<CitationTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_citation_json(&text)
}

/// Parse the two-file CSV form: an `n×n` count matrix and a
/// `label,papers,refs` table (rows in any order).
pub fn parse_citation_csv(
    cites_name: &str,
    cites_text: &str,
    meta_name: &str,
    meta_text: &str,
) -> Result<CitationTable> {
    let (labels, cites) = parse_square::<u64>(cites_name, cites_text)?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(meta_text.as_bytes());
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Parse {
                path: meta_name.into(),
                row: 1,
                column: 0,
                message: format!("missing `{name}` column"),
            })
    };
    let (cl, cp, cr) = (col("label")?, col("papers")?, col("refs")?);
    let mut meta: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let field = |c: usize| -> Result<u64> {
            let raw = rec.get(c).unwrap_or("");
            raw.parse().map_err(|_| Error::Parse {
                path: meta_name.into(),
                row: line,
                column: c + 1,
                message: format!("`{raw}` is not a nonnegative integer"),
            })
        };
        let label = rec.get(cl).unwrap_or("").to_string();
        let entry = (field(cp)?, field(cr)?);
        if meta.insert(label.clone(), entry).is_some() {
            return Err(Error::DuplicateLabel(label));
        }
    }
    let mut papers = Vec::with_capacity(labels.len());
    let mut refs = Vec::with_capacity(labels.len());
    for l in &labels {
        let (p, r) = meta
            .get(l)
            .ok_or_else(|| Error::InvalidInput(format!("{meta_name}: no papers/refs row for label `{l}`")))?;
        papers.push(*p);
        refs.push(*r);
    }
    if meta.len() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{meta_name}: {} rows but the count matrix has {} labels",
            meta.len(),
            labels.len()
        )));
    }
    CitationTable::new(labels, cites, papers, refs)
}

pub fn load_citation_csv(cites: impl AsRef<Path>, meta: impl AsRef<Path>) -> Result<CitationTable> {
    let (cp, mp) = (cites.as_ref(), meta.as_ref());
    let ct = fs::read_to_string(cp).map_err(|e| Error::io(cp, e))?;
    let mt = fs::read_to_string(mp).map_err(|e| Error::io(mp, e))?;
    parse_citation_csv(&cp.display().to_string(), &ct, &mp.display().to_string(), &mt)
}

/// Shortest decimal form that round-trips; integers print without a fraction.
pub fn fmt_num(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_with_labels() {
        let d = parse_dissimilarity("t.csv", "label,a,b\na,0,1\nb,2,0\n").unwrap();
        assert_eq!(d.labels(), ["a", "b"]);
        assert_eq!(d.get(1, 0), 2.0);
        assert_eq!(d.max_rank(), 2.0);
    }

    #[test]
    fn missing_cell_named() {
        let err = parse_dissimilarity("t.csv", "label,a,b\na,0,\nb,2,0\n").unwrap_err();
        match err {
            Error::Parse {
                row, column, message, ..
            } => {
                assert_eq!((row, column), (2, 3));
                assert!(message.contains("(a, b)"), "{message}");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn non_square_rejected() {
        let err = parse_dissimilarity("t.csv", "label,a,b\na,0,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
        let err = parse_dissimilarity("t.csv", "label,a,b\na,0,1,4\nb,1,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { row: 2, .. }), "{err}");
    }

    #[test]
    fn non_numeric_rejected() {
        let err = parse_dissimilarity("t.csv", "label,a,b\na,0,x\nb,2,0\n").unwrap_err();
        assert!(
            matches!(
                err,
                Error::Parse {
                    row: 2,
                    column: 3,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn duplicate_label_rejected() {
        let err = parse_dissimilarity("t.csv", "label,a,a\na,0,1\na,2,0\n").unwrap_err();
        assert!(matches!(err, Error::DuplicateLabel(_)));
    }

    #[test]
    fn mismatched_row_label_rejected() {
        let err = parse_dissimilarity("t.csv", "label,a,b\nb,0,1\na,2,0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { column: 1, .. }));
    }

    #[test]
    fn sentinel_directive_sets_max_rank() {
        let text = "# sentinel=4\nlabel,a,b\na,1,4\nb,2.5,2.5\n";
        let d = parse_dissimilarity("t.csv", text).unwrap();
        assert_eq!(d.max_rank(), 2.5);
        assert_eq!(d.sentinel(), 3.5);
        assert_eq!(d.get(0, 1), 3.5);
        assert_eq!(d.undefined_cells(), vec![(0, 1)]);
    }

    #[test]
    fn csv_round_trip_keeps_sentinel() {
        let d = Dissimilarity::with_max_rank(
            vec!["x, y".into(), "z".into()],
            DMatrix::from_row_slice(2, 2, &[1.0, 2.5, 1.5, 1.5]),
            1.5,
        )
        .unwrap();
        let text = dissimilarity_to_csv(&d, &[("seed", "7".into())]);
        let back = parse_dissimilarity("t.csv", &text).unwrap();
        assert_eq!(back, d);
        assert_eq!(read_directives(&text)["seed"], "7");
    }

    #[test]
    fn citation_csv_pair() {
        let cites = "label,A,B\nA,5,0\nB,2,7\n";
        let meta = "label,papers,refs\nB,20,300\nA,10,100\n";
        let t = parse_citation_csv("c.csv", cites, "m.csv", meta).unwrap();
        assert_eq!(t.papers(), [10, 20]);
        assert_eq!(t.refs(), [100, 300]);
        assert_eq!(t.cites()[(1, 1)], 7);
    }

    #[test]
    fn citation_json() {
        let t =
            parse_citation_json(r#"{"labels":["A","B"],"cites":[[1,0],[0,3]],"papers":[2,3],"refs":[4,5]}"#)
                .unwrap();
        assert_eq!(t.len(), 2);
        let back = serde_json::to_string(&CitationTableJson::from(&t)).unwrap();
        assert_eq!(parse_citation_json(&back).unwrap(), t);
    }
}
