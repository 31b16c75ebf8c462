//! CSV / JSON ingestion with per-row validation.

use super::{Article, ArticleId, Corpus, CorpusError};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::{BTreeSet, HashSet};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Csv,
    Json,
}

impl CorpusFormat {
    /// Guesses the format from the file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" | "tsv" => Some(CorpusFormat::Csv),
            "json" => Some(CorpusFormat::Json),
            _ => None,
        }
    }
}

/// Dataset column (or JSON field) names for each article field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ColumnMap {
    pub id: String,
    pub title: String,
    pub authors: String,
    pub year: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    /// Optional; rows get an empty keyword list when the column is absent.
    pub keywords: String,
    pub cite_count_a: String,
    pub cite_count_b: String,
    pub references: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            id: "id".into(),
            title: "title".into(),
            authors: "authors".into(),
            year: "year".into(),
            abstract_text: "abstract".into(),
            keywords: "keywords".into(),
            cite_count_a: "cite_count_a".into(),
            cite_count_b: "cite_count_b".into(),
            references: "references".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestConfig {
    pub columns: ColumnMap,
    /// Separator inside list-valued CSV cells (authors, references).
    pub list_delimiter: char,
    pub keyword_delimiter: char,
    /// Inclusive year filter; rows outside it are rejected.
    pub span: Option<(i32, i32)>,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            columns: ColumnMap::default(),
            list_delimiter: ';',
            keyword_delimiter: ';',
            span: None,
        }
    }
}

impl IngestConfig {
    /// Column layout of the public IEEE VIS publication export. The two
    /// citation counts default to the Aminer and Xplore counts; exports from
    /// other dates rename these columns, so override them as needed.
    pub fn vispubdata() -> Self {
        IngestConfig {
            columns: ColumnMap {
                id: "DOI".into(),
                title: "Title".into(),
                authors: "AuthorNames-Deduped".into(),
                year: "Year".into(),
                abstract_text: "Abstract".into(),
                keywords: "AuthorKeywords".into(),
                cite_count_a: "AminerCitationCount_02-2019".into(),
                cite_count_b: "XploreCitationCount - 2019-02".into(),
                references: "InternalReferences".into(),
            },
            list_delimiter: ';',
            keyword_delimiter: ',',
            span: Some((1990, 2018)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RejectedRow {
    /// 1-based data row number (header excluded).
    pub row: usize,
    pub id: Option<String>,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LoadReport {
    pub rows_read: usize,
    pub articles_loaded: usize,
    pub rejected: Vec<RejectedRow>,
    /// References to ids absent from the accepted article set.
    pub dropped_references: usize,
    pub dropped_self_references: usize,
    pub duplicate_references: usize,
}

#[derive(Debug)]
pub struct Loaded {
    pub corpus: Corpus,
    pub report: LoadReport,
}

/// One input row before validation.
#[derive(Default)]
struct RawRow {
    id: Option<String>,
    title: Option<String>,
    authors: Option<Vec<String>>,
    year: Option<String>,
    abstract_text: Option<String>,
    keywords: Vec<String>,
    cite_a: Option<String>,
    cite_b: Option<String>,
    references: Option<Vec<String>>,
}

pub fn load_corpus(
    path: &Path,
    format: CorpusFormat,
    config: &IngestConfig,
) -> Result<Loaded, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::FileUnreadable {
        path: path.to_owned(),
        source,
    })?;
    let rows = match format {
        CorpusFormat::Csv => parse_csv(&text, config)?,
        CorpusFormat::Json => parse_json(&text, config)?,
    };
    validate(rows, config)
}

fn split_list(cell: &str, delim: char) -> Vec<String> {
    cell.split(delim)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect()
}

fn required_columns(cols: &ColumnMap) -> [&str; 8] {
    [
        &cols.id,
        &cols.title,
        &cols.authors,
        &cols.year,
        &cols.abstract_text,
        &cols.cite_count_a,
        &cols.cite_count_b,
        &cols.references,
    ]
}

fn parse_csv(text: &str, config: &IngestConfig) -> Result<Vec<RawRow>, CorpusError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CorpusError::Malformed(e.to_string()))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);

    let cols = &config.columns;
    let missing: Vec<String> = required_columns(cols)
        .iter()
        .filter(|c| col(c).is_none())
        .map(|c| c.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(CorpusError::SchemaMismatch(missing));
    }
    let [id, title, authors, year, abs, ca, cb, refs] =
        required_columns(cols).map(|c| col(c).unwrap());
    let kw = col(&cols.keywords);

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CorpusError::Malformed(e.to_string()))?;
        let get = |i: usize| record.get(i).map(|s| s.trim().to_owned());
        rows.push(RawRow {
            id: get(id),
            title: get(title),
            authors: get(authors).map(|s| split_list(&s, config.list_delimiter)),
            year: get(year),
            abstract_text: get(abs),
            keywords: kw
                .and_then(get)
                .map(|s| split_list(&s, config.keyword_delimiter))
                .unwrap_or_default(),
            cite_a: get(ca),
            cite_b: get(cb),
            references: get(refs).map(|s| split_list(&s, config.list_delimiter)),
        });
    }
    Ok(rows)
}

fn parse_json(text: &str, config: &IngestConfig) -> Result<Vec<RawRow>, CorpusError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| CorpusError::Malformed(e.to_string()))?;
    let Value::Array(items) = value else {
        return Err(CorpusError::Malformed(
            "expected a JSON array of article objects".into(),
        ));
    };
    let cols = &config.columns;

    // A field missing from every object is a schema problem, not a row problem.
    if !items.is_empty() {
        let missing: Vec<String> = required_columns(cols)
            .iter()
            .filter(|c| items.iter().all(|it| it.get(**c).is_none()))
            .map(|c| c.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(CorpusError::SchemaMismatch(missing));
        }
    }

    let scalar = |v: Option<&Value>| -> Option<String> {
        match v? {
            Value::String(s) => Some(s.trim().to_owned()),
            Value::Number(n) => Some(n.to_string()),
            Value::Null => Some(String::new()),
            other => Some(other.to_string()),
        }
    };
    let list = |v: Option<&Value>, delim: char| -> Option<Vec<String>> {
        match v? {
            Value::Array(xs) => Some(
                xs.iter()
                    .filter_map(|x| match x {
                        Value::String(s) => Some(s.trim().to_owned()),
                        Value::Number(n) => Some(n.to_string()),
                        _ => None,
                    })
                    .filter(|s| !s.is_empty())
                    .collect(),
            ),
            Value::String(s) => Some(split_list(s, delim)),
            Value::Null => Some(Vec::new()),
            _ => None,
        }
    };

    Ok(items
        .iter()
        .map(|it| RawRow {
            id: scalar(it.get(&cols.id)),
            title: scalar(it.get(&cols.title)),
            authors: list(it.get(&cols.authors), config.list_delimiter),
            year: scalar(it.get(&cols.year)),
            abstract_text: scalar(it.get(&cols.abstract_text)),
            keywords: list(it.get(&cols.keywords), config.keyword_delimiter).unwrap_or_default(),
            cite_a: scalar(it.get(&cols.cite_count_a)),
            cite_b: scalar(it.get(&cols.cite_count_b)),
            references: list(it.get(&cols.references), config.list_delimiter),
        })
        .collect())
}

fn parse_count(raw: Option<String>, field: &str) -> Result<u64, String> {
    let raw = raw.ok_or_else(|| format!("missing {field}"))?;
    if raw.is_empty() {
        // Unreported citation counts are common in public exports.
        return Ok(0);
    }
    let value: f64 = raw
        .parse()
        .map_err(|_| format!("{field} is not a number: {raw:?}"))?;
    if !value.is_finite() || value < 0.0 || value.fract() != 0.0 {
        return Err(format!("{field} must be a non-negative integer, got {raw}"));
    }
    Ok(value as u64)
}

fn row_to_article(raw: RawRow, config: &IngestConfig) -> Result<Article, String> {
    let id = raw.id.filter(|s| !s.is_empty()).ok_or("missing id")?;
    let authors = raw.authors.ok_or("missing authors")?;
    if authors.is_empty() {
        return Err("no authors".into());
    }
    let year_raw = raw.year.ok_or("missing year")?;
    let year: i32 = year_raw
        .parse()
        .map_err(|_| format!("year is not an integer: {year_raw:?}"))?;
    if let Some((lo, hi)) = config.span {
        if year < lo || year > hi {
            return Err(format!("year {year} outside span {lo}-{hi}"));
        }
    }
    Ok(Article {
        id: ArticleId(id),
        title: raw.title.ok_or("missing title")?,
        authors,
        year,
        abstract_text: raw.abstract_text.ok_or("missing abstract")?,
        keywords: raw.keywords,
        cite_count_a: parse_count(raw.cite_a, "cite_count_a")?,
        cite_count_b: parse_count(raw.cite_b, "cite_count_b")?,
        references: raw
            .references
            .ok_or("missing references")?
            .into_iter()
            .map(ArticleId)
            .collect(),
    })
}

fn validate(rows: Vec<RawRow>, config: &IngestConfig) -> Result<Loaded, CorpusError> {
    let mut report = LoadReport {
        rows_read: rows.len(),
        ..Default::default()
    };
    let mut accepted: Vec<Article> = Vec::new();
    let mut seen_ids = HashSet::new();

    for (i, raw) in rows.into_iter().enumerate() {
        let row = i + 1;
        let id = raw.id.clone().filter(|s| !s.is_empty());
        match row_to_article(raw, config) {
            Ok(article) if !seen_ids.insert(article.id.clone()) => {
                report.rejected.push(RejectedRow {
                    row,
                    id,
                    reason: "duplicate id".into(),
                });
            }
            Ok(article) => accepted.push(article),
            Err(reason) => report.rejected.push(RejectedRow { row, id, reason }),
        }
    }
    if accepted.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }

    for a in &mut accepted {
        let mut kept = BTreeSet::new();
        let mut refs = Vec::with_capacity(a.references.len());
        for r in std::mem::take(&mut a.references) {
            if r == a.id {
                report.dropped_self_references += 1;
            } else if !seen_ids.contains(&r) {
                report.dropped_references += 1;
            } else if !kept.insert(r.clone()) {
                report.duplicate_references += 1;
            } else {
                refs.push(r);
            }
        }
        a.references = refs;
    }

    report.articles_loaded = accepted.len();
    let corpus = Corpus::from_articles(accepted, config.span)?;
    Ok(Loaded { corpus, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(suffix: &str, body: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
        f.write_all(body.as_bytes()).unwrap();
        f
    }

    const HEADER: &str =
        "id,title,authors,year,abstract,keywords,cite_count_a,cite_count_b,references\n";

    #[test]
    fn unknown_reference_is_dropped_and_counted() {
        let body = format!(
            "{HEADER}A1,One,Ann;Bo,2001,first text,vis,3,4,\n\
             A2,Two,Bo,2002,second text,,0,1,A1;A999\n\
             A3,Three,Cy,2003,third text,,5,0,A1;A2\n"
        );
        let f = write_tmp(".csv", &body);
        let loaded = load_corpus(f.path(), CorpusFormat::Csv, &IngestConfig::default()).unwrap();
        assert_eq!(loaded.corpus.len(), 3);
        assert_eq!(loaded.report.dropped_references, 1);
        assert!(loaded.report.rejected.is_empty());
        assert_eq!(loaded.corpus.total_references(), 3);
        assert_eq!(loaded.corpus.articles()[0].authors, vec!["Ann", "Bo"]);
    }

    #[test]
    fn header_only_file_is_empty_corpus() {
        let f = write_tmp(".csv", HEADER);
        let err = load_corpus(f.path(), CorpusFormat::Csv, &IngestConfig::default()).unwrap_err();
        assert!(matches!(err, CorpusError::EmptyCorpus));

        let f = write_tmp(".json", "[]");
        let err = load_corpus(f.path(), CorpusFormat::Json, &IngestConfig::default()).unwrap_err();
        assert!(matches!(err, CorpusError::EmptyCorpus));
    }

    #[test]
    fn missing_columns_are_listed() {
        let f = write_tmp(".csv", "id,title,authors\nA1,x,y\n");
        match load_corpus(f.path(), CorpusFormat::Csv, &IngestConfig::default()) {
            Err(CorpusError::SchemaMismatch(cols)) => {
                assert_eq!(
                    cols,
                    vec![
                        "year",
                        "abstract",
                        "cite_count_a",
                        "cite_count_b",
                        "references"
                    ]
                );
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_unreadable() {
        let err = load_corpus(
            Path::new("/nonexistent/x.csv"),
            CorpusFormat::Csv,
            &IngestConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, CorpusError::FileUnreadable { .. }));
    }

    #[test]
    fn bad_rows_are_rejected_with_reasons() {
        let body = format!(
            "{HEADER}A1,One,Ann,2001,text,,3,4,A1\n\
             A2,Two,,2002,text,,0,1,\n\
             A3,Three,Cy,19x,text,,5,0,\n\
             A4,Four,Di,2004,text,,-2,0,\n\
             A1,Dup,Ed,2004,text,,0,0,\n\
             A5,Five,Fa,1980,text,,,,A1;A1\n"
        );
        let f = write_tmp(".csv", &body);
        let cfg = IngestConfig {
            span: Some((1975, 2018)),
            ..Default::default()
        };
        let loaded = load_corpus(f.path(), CorpusFormat::Csv, &cfg).unwrap();
        let rejected: Vec<usize> = loaded.report.rejected.iter().map(|r| r.row).collect();
        assert_eq!(rejected, vec![2, 3, 4, 5]);
        assert_eq!(loaded.report.dropped_self_references, 1);
        assert_eq!(loaded.report.duplicate_references, 1);
        assert_eq!(loaded.corpus.len(), 2);
        let a5 = loaded.corpus.get(&"A5".into()).unwrap();
        assert_eq!((a5.cite_count_a, a5.cite_count_b), (0, 0));

        let narrow = IngestConfig {
            span: Some((1990, 2018)),
            ..Default::default()
        };
        let loaded = load_corpus(f.path(), CorpusFormat::Csv, &narrow).unwrap();
        assert_eq!(loaded.corpus.len(), 1);
        assert_eq!(loaded.report.dropped_references, 0);
    }

    #[test]
    fn json_input_accepts_arrays_and_delimited_strings() {
        let body = r#"[
            {"id": "A1", "title": "One", "authors": ["Ann", "Bo"], "year": 2001, "abstract": "x",
             "cite_count_a": 1, "cite_count_b": "2", "references": []},
            {"id": "A2", "title": "Two", "authors": "Bo; Cy", "year": "2002", "abstract": "y",
             "keywords": ["graphs"], "cite_count_a": 0, "cite_count_b": 0, "references": "A1;A7"}
        ]"#;
        let f = write_tmp(".json", body);
        let loaded = load_corpus(f.path(), CorpusFormat::Json, &IngestConfig::default()).unwrap();
        assert_eq!(loaded.corpus.len(), 2);
        assert_eq!(loaded.report.dropped_references, 1);
        let a2 = loaded.corpus.get(&"A2".into()).unwrap();
        assert_eq!(a2.authors, vec!["Bo", "Cy"]);
        assert_eq!(a2.references, vec![ArticleId::new("A1")]);
    }

    #[test]
    fn json_field_missing_everywhere_is_schema_mismatch() {
        let body = r#"[{"id": "A1", "title": "One", "authors": ["Ann"], "year": 2001, "abstract": "x",
                        "cite_count_a": 1, "references": []}]"#;
        let f = write_tmp(".json", body);
        match load_corpus(f.path(), CorpusFormat::Json, &IngestConfig::default()) {
            Err(CorpusError::SchemaMismatch(cols)) => assert_eq!(cols, vec!["cite_count_b"]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn vispubdata_preset_maps_columns() {
        let body = "Conference,Year,Title,DOI,Abstract,AuthorNames-Deduped,InternalReferences,AuthorKeywords,AminerCitationCount_02-2019,XploreCitationCount - 2019-02\n\
                    Vis,1995,T1,10.1/a,Some text,Ann;Bo,,\"graphs, clustering\",10,3\n\
                    Vis,1989,T0,10.1/z,Old text,Cy,,,1,1\n\
                    InfoVis,2005,T2,10.1/b,More text,Bo,10.1/a;10.1/z,,4,\n";
        let f = write_tmp(".csv", body);
        let loaded = load_corpus(f.path(), CorpusFormat::Csv, &IngestConfig::vispubdata()).unwrap();
        assert_eq!(loaded.corpus.len(), 2);
        assert_eq!(loaded.report.rejected.len(), 1);
        assert_eq!(loaded.report.dropped_references, 1);
        let a = loaded.corpus.get(&"10.1/a".into()).unwrap();
        assert_eq!(a.keywords, vec!["graphs", "clustering"]);
        assert_eq!((a.cite_count_a, a.cite_count_b), (10, 3));
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(
            CorpusFormat::from_path(Path::new("x.CSV")),
            Some(CorpusFormat::Csv)
        );
        assert_eq!(
            CorpusFormat::from_path(Path::new("x.json")),
            Some(CorpusFormat::Json)
        );
        assert_eq!(CorpusFormat::from_path(Path::new("x.txt")), None);
    }
}
