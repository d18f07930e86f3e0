//! Reading the `text,label,time` corpus format, including a malformed row.

use std::path::Path;

use fraudtext::bench::{parse_corpus, write_corpus};

fn main() -> fraudtext::Result<()> {
    let good = "text,label,time\n\"Revenue rose, margins held\",NF,2019-03-31\nAuditor resigned abruptly,F,2020-06-30\n";
    let rows = parse_corpus(good, Path::new("inline.csv"))?;
    for r in &rows {
        println!("{:?} {} {:?}", r.label(), r.time(), r.text());
    }
    let mut out = Vec::new();
    write_corpus(&mut out, &rows)?;
    print!("{}", String::from_utf8_lossy(&out));

    let bad = "text,label,time\nfine,NF,2019-01-01\nbroken,XX,2019-01-02\n";
    if let Err(e) = parse_corpus(bad, Path::new("inline.csv")) {
        println!("rejected: {e}");
    }
    Ok(())
}
