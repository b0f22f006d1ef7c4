//! Matrix Market coordinate files.
//!
//! Only sparse `coordinate` matrices are accepted. `pattern` entries read as
//! 1.0; `symmetric` and `skew-symmetric` files are expanded to both triangles
//! with the diagonal kept once. Indices are converted from 1-based to 0-based.

use std::io::{BufRead, Write};

use thiserror::Error;

use super::CooEntries;

#[derive(Debug, Error, PartialEq)]
#[error("line {line}: {message}")]
pub struct MatrixMarketError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> MatrixMarketError {
    MatrixMarketError {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

fn parse_header(line: &str) -> Result<(Field, Symmetry), MatrixMarketError> {
    let tokens: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(err(1, format!("malformed header {line:?}")));
    }
    match tokens[2].as_str() {
        "coordinate" => {}
        "array" => return Err(err(1, "dense 'array' matrices are not supported")),
        other => return Err(err(1, format!("unknown format {other:?}"))),
    }
    let field = match tokens[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(err(1, format!("unsupported field {other:?}"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(err(1, format!("unsupported symmetry {other:?}"))),
    };
    Ok((field, symmetry))
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize, MatrixMarketError> {
    tok.parse()
        .map_err(|_| err(line, format!("{what} {tok:?} is not a non-negative integer")))
}

/// Reads a Matrix Market coordinate stream into triples.
pub fn parse_matrix_market<R: BufRead>(reader: R) -> Result<CooEntries, MatrixMarketError> {
    let mut lines = reader.lines().enumerate();

    let header = match lines.next() {
        Some((_, Ok(l))) => l,
        Some((_, Err(e))) => return Err(err(1, e.to_string())),
        None => return Err(err(1, "empty input")),
    };
    let (field, symmetry) = parse_header(&header)?;

    let mut coo: Option<CooEntries> = None;
    let mut declared = 0usize;
    let mut seen = 0usize;
    let mut last_line = 1;

    for (idx, line) in lines {
        let lineno = idx + 1;
        last_line = lineno;
        let line = line.map_err(|e| err(lineno, e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();

        let Some(coo) = coo.as_mut() else {
            if toks.len() != 3 {
                return Err(err(lineno, "size line must be 'rows cols nnz'"));
            }
            let n_rows = parse_usize(toks[0], lineno, "row count")?;
            let n_cols = parse_usize(toks[1], lineno, "column count")?;
            declared = parse_usize(toks[2], lineno, "entry count")?;
            if symmetry != Symmetry::General && n_rows != n_cols {
                return Err(err(lineno, "symmetric matrix must be square"));
            }
            let mut c = CooEntries::new(n_rows, n_cols);
            c.entries.reserve(declared);
            coo = Some(c);
            continue;
        };

        if seen == declared {
            return Err(err(lineno, format!("more than the declared {declared} entries")));
        }
        let expected = if field == Field::Pattern { 2 } else { 3 };
        if toks.len() != expected {
            return Err(err(
                lineno,
                format!("expected {expected} fields, found {}", toks.len()),
            ));
        }
        let r = parse_usize(toks[0], lineno, "row index")?;
        let c = parse_usize(toks[1], lineno, "column index")?;
        if r == 0 || c == 0 || r > coo.n_rows || c > coo.n_cols {
            return Err(err(
                lineno,
                format!(
                    "index ({r}, {c}) outside declared {}x{}",
                    coo.n_rows, coo.n_cols
                ),
            ));
        }
        let v: f32 = match field {
            Field::Pattern => 1.0,
            Field::Real | Field::Integer => toks[2]
                .parse()
                .map_err(|_| err(lineno, format!("value {:?} is not numeric", toks[2])))?,
        };
        let (r, c) = ((r - 1) as u32, (c - 1) as u32);
        coo.push(r, c, v);
        if r != c {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => coo.push(c, r, v),
                Symmetry::SkewSymmetric => coo.push(c, r, -v),
            }
        }
        seen += 1;
    }

    let coo = coo.ok_or_else(|| err(last_line, "missing size line"))?;
    if seen != declared {
        return Err(err(
            last_line,
            format!("declared {declared} entries, found {seen}"),
        ));
    }
    Ok(coo)
}

/// Writes triples as a `real general` coordinate file.
///
/// Values use the shortest representation that parses back to the same
/// `f32`, so a write/parse cycle is lossless.
pub fn write_matrix_market<W: Write>(coo: &CooEntries, mut w: W) -> std::io::Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", coo.n_rows, coo.n_cols, coo.entries.len())?;
    for &(r, c, v) in &coo.entries {
        writeln!(w, "{} {} {}", r + 1, c + 1, v)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(s: &str) -> Result<CooEntries, MatrixMarketError> {
        parse_matrix_market(s.as_bytes())
    }

    #[test]
    fn single_real_entry() {
        let coo = parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 5.0\n").unwrap();
        assert_eq!((coo.n_rows, coo.n_cols), (2, 2));
        assert_eq!(coo.entries, vec![(0, 1, 5.0)]);
    }

    #[test]
    fn pattern_symmetric_is_mirrored() {
        let coo = parse("%%MatrixMarket matrix coordinate pattern symmetric\n2 2 1\n2 1\n").unwrap();
        assert_eq!(coo.entries, vec![(1, 0, 1.0), (0, 1, 1.0)]);
    }

    #[test]
    fn symmetric_diagonal_is_not_duplicated() {
        let coo = parse("%%MatrixMarket matrix coordinate real symmetric\n3 3 2\n2 2 4\n3 1 -1\n").unwrap();
        assert_eq!(coo.entries, vec![(1, 1, 4.0), (2, 0, -1.0), (0, 2, -1.0)]);
    }

    #[test]
    fn skew_symmetric_negates_mirror() {
        let coo = parse("%%MatrixMarket matrix coordinate integer skew-symmetric\n2 2 1\n2 1 3\n").unwrap();
        assert_eq!(coo.entries, vec![(1, 0, 3.0), (0, 1, -3.0)]);
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "%%MatrixMarket matrix coordinate real general\n% a comment\n\n3 3 1\n% another\n3 3 2.5\n";
        assert_eq!(parse(text).unwrap().entries, vec![(2, 2, 2.5)]);
    }

    #[test]
    fn out_of_range_row_reports_its_line() {
        let e = parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n").unwrap_err();
        assert_eq!(e.line, 3);
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert_eq!(parse("%%MatrixMarket tensor coordinate real general\n").unwrap_err().line, 1);
        assert!(parse("%%MatrixMarket matrix array real general\n2 2\n")
            .unwrap_err()
            .message
            .contains("array"));
        assert!(parse("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n").is_err());
        let e = parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n").unwrap_err();
        assert!(e.message.contains("declared 2"));
        let e = parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1\n2 2 1\n").unwrap_err();
        assert_eq!(e.line, 4);
        assert!(parse("").is_err());
    }

    proptest! {
        #[test]
        fn write_then_parse_preserves_entries(
            n_rows in 1usize..30,
            n_cols in 1usize..30,
            raw in prop::collection::vec((0u32..30, 0u32..30, any::<f32>().prop_filter("finite", |v| v.is_finite())), 0..60),
        ) {
            let entries: Vec<_> = raw
                .into_iter()
                .map(|(r, c, v)| (r % n_rows as u32, c % n_cols as u32, v))
                .collect();
            let coo = CooEntries::with_entries(n_rows, n_cols, entries);
            let mut buf = Vec::new();
            write_matrix_market(&coo, &mut buf).unwrap();
            let back = parse_matrix_market(buf.as_slice()).unwrap();
            let key = |e: &(u32, u32, f32)| (e.0, e.1, e.2.to_bits());
            let mut a: Vec<_> = coo.entries.iter().map(key).collect();
            let mut b: Vec<_> = back.entries.iter().map(key).collect();
            a.sort_unstable();
            b.sort_unstable();
            prop_assert_eq!((back.n_rows, back.n_cols), (n_rows, n_cols));
            prop_assert_eq!(a, b);
        }
    }
}
