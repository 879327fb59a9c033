use std::fs;
use std::io::Write;
use std::path::Path;

use super::tokenize;
use crate::{Error, Result};

/// One labelled question-answer pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QAInstance {
    pub query_id: String,
    pub question: Vec<String>,
    pub answer: Vec<String>,
    pub label: u8,
}

/// Keeps only pairs whose question and answer token counts both fall in
/// `[min, max]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LengthFilter {
    pub min: usize,
    pub max: usize,
}

impl LengthFilter {
    /// The 5–50 token window used for community QA corpora.
    pub const COMMUNITY_QA: LengthFilter = LengthFilter { min: 5, max: 50 };

    pub fn keeps(&self, inst: &QAInstance) -> bool {
        let ok = |n: usize| (self.min..=self.max).contains(&n);
        ok(inst.question.len()) && ok(inst.answer.len())
    }
}

pub fn read_tsv(path: impl AsRef<Path>, filter: Option<LengthFilter>) -> Result<Vec<QAInstance>> {
    parse_tsv(&fs::read_to_string(path)?, filter)
}

/// Parses `query_id<TAB>label<TAB>question<TAB>answer` lines. Blank lines are
/// ignored; anything else that does not have exactly four fields is an error.
pub fn parse_tsv(text: &str, filter: Option<LengthFilter>) -> Result<Vec<QAInstance>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 4 tab-separated fields, found {}", fields.len()),
            });
        }
        let label = match fields[1].trim() {
            "0" => 0,
            "1" => 1,
            other => return Err(Error::Label(format!("`{other}` on line {line}"))),
        };
        let query_id = fields[0].trim().to_string();
        if query_id.is_empty() {
            return Err(Error::Parse {
                line,
                msg: "empty query id".into(),
            });
        }
        let inst = QAInstance {
            query_id,
            question: tokenize(fields[2]),
            answer: tokenize(fields[3]),
            label,
        };
        if inst.question.is_empty() || inst.answer.is_empty() {
            return Err(Error::Parse {
                line,
                msg: "question and answer must contain tokens".into(),
            });
        }
        if filter.map_or(true, |f| f.keeps(&inst)) {
            out.push(inst);
        }
    }
    Ok(out)
}

/// Writes instances in the format [`parse_tsv`] reads, tokens joined by
/// single spaces.
pub fn write_tsv(path: impl AsRef<Path>, instances: &[QAInstance]) -> Result<()> {
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    for inst in instances {
        writeln!(
            w,
            "{}\t{}\t{}\t{}",
            inst.query_id,
            inst.label,
            inst.question.join(" "),
            inst.answer.join(" ")
        )?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_lines_two_instances() {
        let v = parse_tsv("q1\t1\tWho won?\tThe cat won.\nq1\t0\tWho won?\tNobody\n", None).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].question, vec!["who", "won", "?"]);
        assert_eq!(v[1].label, 0);
    }

    #[test]
    fn three_fields_is_error_at_that_line() {
        let err = parse_tsv("q1\t1\ta\tb\nq2\t1\tonly three\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn non_binary_label() {
        assert!(matches!(parse_tsv("q\t2\ta\tb\n", None), Err(Error::Label(_))));
    }

    #[test]
    fn community_filter_drops_short_questions() {
        let text = "q1\t1\tone two three\ta b c d e f\nq2\t1\ta b c d e\tf g h i j\n";
        let v = parse_tsv(text, Some(LengthFilter::COMMUNITY_QA)).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].query_id, "q2");
    }

    #[test]
    fn write_then_read() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.tsv");
        let v = parse_tsv("q1\t1\tIs it? Yes.\tit is , really\n", None).unwrap();
        write_tsv(&path, &v).unwrap();
        assert_eq!(read_tsv(&path, None).unwrap(), v);
    }
}
