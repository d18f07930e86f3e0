use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::text::{Label, LabeledSentence};

pub const HEADER: [&str; 3] = ["text", "label", "time"];
const DATE_FORMAT: &str = "%Y-%m-%d";

fn parse_error(path: &Path, line: u64, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line, msg: msg.into() }
}

/// Reads `text,label,time` CSV. Every malformed row is reported with its line.
pub fn load_corpus(path: &Path) -> Result<Vec<LabeledSentence>> {
    let mut raw = String::new();
    File::open(path)?.read_to_string(&mut raw)?;
    parse_corpus(&raw, path)
}

/// [`load_corpus`] on in-memory text; `origin` only labels errors.
pub fn parse_corpus(raw: &str, origin: &Path) -> Result<Vec<LabeledSentence>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(raw.as_bytes());
    let mut records = reader.records();
    let header = match records.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => return Err(parse_error(origin, 1, e.to_string())),
        None => return Err(parse_error(origin, 1, "missing header `text,label,time`")),
    };
    if header.iter().map(str::trim).ne(HEADER) {
        return Err(parse_error(origin, 1, format!("expected header `text,label,time`, found `{}`", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut out = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(origin, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 3 {
            return Err(parse_error(origin, line, format!("expected 3 fields, found {}", rec.len())));
        }
        let label = Label::parse(rec[1].trim())
            .ok_or_else(|| parse_error(origin, line, format!("label must be F or NF, found `{}`", &rec[1])))?;
        let time = NaiveDate::parse_from_str(rec[2].trim(), DATE_FORMAT)
            .map_err(|e| parse_error(origin, line, format!("bad date `{}`: {e}", &rec[2])))?;
        let sentence = LabeledSentence::new(&rec[0], label, time).map_err(|e| parse_error(origin, line, e.to_string()))?;
        out.push(sentence);
    }
    Ok(out)
}

pub fn write_corpus<W: Write>(out: W, data: &[LabeledSentence]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(HEADER).map_err(csv_err)?;
    for s in data {
        let date = s.time().format(DATE_FORMAT).to_string();
        w.write_record([s.text(), s.label().as_str(), date.as_str()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_corpus(path: &Path, data: &[LabeledSentence]) -> Result<()> {
    write_corpus(File::create(path)?, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Vec<LabeledSentence>> {
        parse_corpus(s, Path::new("mem.csv"))
    }

    fn line_of(e: Error) -> u64 {
        match e {
            Error::Parse { line, .. } => line,
            other => panic!("not a parse error: {other}"),
        }
    }

    #[test]
    fn parses_rows() {
        let rows = parse("text,label,time\n\"revenue was overstated\",F,2015-03-01\n\"cash, and more cash\",NF,2016-01-31\n").unwrap();
        assert_eq!(rows[0].text(), "revenue was overstated");
        assert_eq!(rows[0].label(), Label::F);
        assert_eq!(rows[0].time(), NaiveDate::from_ymd_opt(2015, 3, 1).unwrap());
        assert_eq!(rows[1].text(), "cash, and more cash");
    }

    #[test]
    fn errors_name_the_line() {
        assert_eq!(line_of(parse("text,label,time\na,F,2015-03-01\nb,X,2015-03-01\n").unwrap_err()), 3);
        assert_eq!(line_of(parse("text,label,time\na,F,2015-13-01\n").unwrap_err()), 2);
        assert_eq!(line_of(parse("words,label,time\na,F,2015-03-01\n").unwrap_err()), 1);
        assert_eq!(line_of(parse("").unwrap_err()), 1);
        assert_eq!(line_of(parse("text,label,time\n\"  \",F,2015-03-01\n").unwrap_err()), 2);
        assert_eq!(line_of(parse("text,label,time\na,F\n").unwrap_err()), 2);
    }

    #[test]
    fn round_trip() {
        let d = NaiveDate::from_ymd_opt(2001, 2, 3).unwrap();
        let data = vec![
            LabeledSentence::new("quote \" and, comma", Label::NF, d).unwrap(),
            LabeledSentence::new("line\nbreak", Label::F, d).unwrap(),
        ];
        let mut buf = Vec::new();
        write_corpus(&mut buf, &data).unwrap();
        assert_eq!(parse(std::str::from_utf8(&buf).unwrap()).unwrap(), data);
    }
}
