//! ARPA text format.
//!
//! ```text
//! \data\
//! ngram 1=N1
//! ngram 2=N2
//! ngram 3=N3
//!
//! \1-grams:
//! log10prob<TAB>w<TAB>log10bow
//! ...
//! \end\
//! ```
//!
//! The backoff column is written only for n-grams that are the history of
//! some stored higher-order n-gram. Entries are sorted by their words so the
//! output is canonical: exporting an imported model reproduces the file byte
//! for byte.

use std::fmt::Write as _;

use rustc_hash::{FxHashMap, FxHashSet};

use super::{bigram_key, trigram_key, Entry, TrigramModel, WordId};
use crate::{Error, Result, BOS, EOS, UNK};

const PRECISION: usize = 7;

fn fmt_num(x: f64) -> String {
    let s = format!("{x:.PRECISION$}");
    // avoid "-0.0000000"
    if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        s.trim_start_matches('-').to_owned()
    } else {
        s
    }
}

pub fn export_arpa(model: &TrigramModel) -> String {
    let words = model.words();
    let uni = model.unigram_entries();
    let bi = model.bigram_entries();
    let tri = model.trigram_entries();

    let mut has_bi_children = vec![false; words.len()];
    for &k in bi.keys() {
        has_bi_children[(k >> 32) as usize] = true;
    }
    let tri_histories: FxHashSet<u64> =
        tri.keys().map(|&k| bigram_key((k >> 64) as WordId, (k >> 32) as WordId)).collect();

    let w = |id: u64| words[id as usize].as_str();

    let mut out = String::new();
    out.push_str("\\data\\\n");
    let _ = writeln!(out, "ngram 1={}", uni.len());
    let _ = writeln!(out, "ngram 2={}", bi.len());
    let _ = writeln!(out, "ngram 3={}", tri.len());

    out.push_str("\n\\1-grams:\n");
    let mut order: Vec<usize> = (0..words.len()).collect();
    order.sort_unstable_by(|&a, &b| words[a].cmp(&words[b]));
    for i in order {
        let e = uni[i];
        push_line(&mut out, e.prob, &words[i], has_bi_children[i].then_some(e.bow));
    }

    out.push_str("\n\\2-grams:\n");
    let mut keys: Vec<u64> = bi.keys().copied().collect();
    keys.sort_unstable_by(|&a, &b| (w(a >> 32), w(a & 0xffff_ffff)).cmp(&(w(b >> 32), w(b & 0xffff_ffff))));
    for k in keys {
        let e = bi[&k];
        let gram = format!("{} {}", w(k >> 32), w(k & 0xffff_ffff));
        push_line(&mut out, e.prob, &gram, tri_histories.contains(&k).then_some(e.bow));
    }

    out.push_str("\n\\3-grams:\n");
    let split = |k: u128| ((k >> 64) as u64, ((k >> 32) & 0xffff_ffff) as u64, (k & 0xffff_ffff) as u64);
    let mut keys: Vec<u128> = tri.keys().copied().collect();
    keys.sort_unstable_by(|&a, &b| {
        let (a0, a1, a2) = split(a);
        let (b0, b1, b2) = split(b);
        (w(a0), w(a1), w(a2)).cmp(&(w(b0), w(b1), w(b2)))
    });
    for k in keys {
        let (k0, k1, k2) = split(k);
        let gram = format!("{} {} {}", w(k0), w(k1), w(k2));
        push_line(&mut out, tri[&k], &gram, None);
    }
    out.push_str("\n\\end\\\n");
    out
}

fn push_line(out: &mut String, prob: f64, gram: &str, bow: Option<f64>) {
    out.push_str(&fmt_num(prob));
    out.push('\t');
    out.push_str(gram);
    if let Some(b) = bow {
        out.push('\t');
        out.push_str(&fmt_num(b));
    }
    out.push('\n');
}

#[derive(PartialEq)]
enum Section {
    Preamble,
    Data,
    Grams(usize),
    End,
}

/// (line number, log10 prob, words, log10 backoff)
type Row<'a> = (usize, f64, Vec<&'a str>, f64);

pub fn import_arpa(text: &str) -> Result<TrigramModel> {
    let mut section = Section::Preamble;
    let mut declared: [Option<usize>; 3] = [None; 3];
    let mut rows: [Vec<Row>; 3] = Default::default();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('\\') {
            section = match line {
                "\\data\\" if section == Section::Preamble => Section::Data,
                "\\1-grams:" | "\\2-grams:" | "\\3-grams:"
                    if section != Section::Preamble && section != Section::End =>
                {
                    let n = (line.as_bytes()[1] - b'0') as usize;
                    if declared[n - 1].is_none() {
                        return Err(Error::parse(line_no, format!("section {line} has no ngram {n}= declaration")));
                    }
                    Section::Grams(n)
                }
                "\\end\\" if matches!(section, Section::Grams(_)) => Section::End,
                _ => return Err(Error::parse(line_no, format!("unexpected section header {line:?}"))),
            };
            continue;
        }
        match section {
            Section::Preamble => continue,
            Section::Data => {
                let rest =
                    line.strip_prefix("ngram ").ok_or_else(|| Error::parse(line_no, "expected `ngram N=count`"))?;
                let (n, c) = rest.split_once('=').ok_or_else(|| Error::parse(line_no, "expected `ngram N=count`"))?;
                let n: usize = n.trim().parse().map_err(|_| Error::parse(line_no, "bad n-gram order"))?;
                let c: usize = c.trim().parse().map_err(|_| Error::parse(line_no, "bad n-gram count"))?;
                if !(1..=3).contains(&n) {
                    return Err(Error::parse(line_no, format!("unsupported order {n}")));
                }
                declared[n - 1] = Some(c);
            }
            Section::Grams(n) => {
                let fields: Vec<&str> = line.split_whitespace().collect();
                if fields.len() != n + 1 && fields.len() != n + 2 {
                    return Err(Error::parse(line_no, format!("expected {} or {} fields", n + 1, n + 2)));
                }
                let prob: f64 = fields[0].parse().map_err(|_| Error::parse(line_no, "bad probability"))?;
                let bow: f64 = match fields.get(n + 1) {
                    Some(b) => b.parse().map_err(|_| Error::parse(line_no, "bad backoff weight"))?,
                    None => 0.0,
                };
                if prob > 0.0 || !prob.is_finite() || !bow.is_finite() {
                    return Err(Error::parse(line_no, "probability must be a finite log10 value <= 0"));
                }
                rows[n - 1].push((line_no, prob, fields[1..=n].to_vec(), bow));
            }
            Section::End => return Err(Error::parse(line_no, "content after \\end\\")),
        }
    }
    if section != Section::End {
        return Err(Error::parse(text.lines().count(), "missing \\end\\"));
    }
    for n in 0..3 {
        let want = declared[n].ok_or_else(|| Error::parse(1, format!("missing ngram {}= declaration", n + 1)))?;
        if want != rows[n].len() {
            let line = rows[n].last().map_or(1, |r| r.0);
            return Err(Error::parse(
                line,
                format!("ngram {} declared {} entries, found {}", n + 1, want, rows[n].len()),
            ));
        }
    }

    let mut words: Vec<String> = Vec::with_capacity(rows[0].len());
    let mut unigrams = Vec::with_capacity(rows[0].len());
    let mut ids: FxHashMap<&str, WordId> = FxHashMap::default();
    for (line_no, prob, gram, bow) in &rows[0] {
        if ids.insert(gram[0], words.len() as WordId).is_some() {
            return Err(Error::parse(*line_no, format!("duplicate unigram {:?}", gram[0])));
        }
        words.push(gram[0].to_owned());
        unigrams.push(Entry { prob: *prob, bow: *bow });
    }
    for reserved in [BOS, EOS, UNK] {
        if !ids.contains_key(reserved) {
            return Err(Error::parse(rows[0].last().map_or(1, |r| r.0), format!("missing unigram {reserved}")));
        }
    }
    let lookup = |line_no: usize, w: &str| {
        ids.get(w).copied().ok_or_else(|| Error::parse(line_no, format!("word {w:?} has no unigram")))
    };

    let mut bigrams: FxHashMap<u64, Entry> = FxHashMap::default();
    for (line_no, prob, gram, bow) in &rows[1] {
        let k = bigram_key(lookup(*line_no, gram[0])?, lookup(*line_no, gram[1])?);
        if bigrams.insert(k, Entry { prob: *prob, bow: *bow }).is_some() {
            return Err(Error::parse(*line_no, "duplicate bigram"));
        }
    }
    let mut trigrams: FxHashMap<u128, f64> = FxHashMap::default();
    for (line_no, prob, gram, _) in &rows[2] {
        let (u, v, w) = (lookup(*line_no, gram[0])?, lookup(*line_no, gram[1])?, lookup(*line_no, gram[2])?);
        if !bigrams.contains_key(&bigram_key(u, v)) {
            return Err(Error::parse(*line_no, format!("history \"{} {}\" has no bigram", gram[0], gram[1])));
        }
        if trigrams.insert(trigram_key(u, v, w), *prob).is_some() {
            return Err(Error::parse(*line_no, "duplicate trigram"));
        }
    }
    Ok(TrigramModel::from_parts(words, unigrams, bigrams, trigrams, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lm::train;
    use crate::vocab::Vocabulary;

    fn model() -> TrigramModel {
        let c: Vec<Vec<String>> = ["the cat sat .", "the dog sat .", "a cat ran .", "the cat ran", "a dog sat down ."]
            .iter()
            .map(|l| l.split_whitespace().map(str::to_owned).collect())
            .collect();
        train(&c, &Vocabulary::from_corpus(&c).unwrap())
    }

    #[test]
    fn round_trip_preserves_logprobs_and_bytes() {
        let m = model();
        let text = export_arpa(&m);
        let back = import_arpa(&text).unwrap();
        let ids: Vec<&str> = m.words().iter().map(String::as_str).collect();
        for &u in &ids {
            for &v in &ids {
                for &w in &ids {
                    if w == BOS {
                        continue;
                    }
                    let d = (m.logprob_word((u, v), w) - back.logprob_word((u, v), w)).abs();
                    assert!(d <= 1e-4, "{u} {v} {w}: {d}");
                }
            }
        }
        assert_eq!(export_arpa(&back), text);
    }

    #[test]
    fn header_counts_match_body() {
        let text = export_arpa(&model());
        let m = model();
        let [n1, n2, n3] = m.ngram_counts();
        assert!(text.contains(&format!("ngram 1={n1}\nngram 2={n2}\nngram 3={n3}\n")));
        assert!(text.contains("-99.0000000\t<s>\t"));
    }

    #[test]
    fn count_mismatch_is_an_error() {
        let text = export_arpa(&model());
        let n1 = model().ngram_counts()[0];
        let bad = text.replace(&format!("ngram 1={n1}"), &format!("ngram 1={}", n1 + 1));
        match import_arpa(&bad) {
            Err(Error::Parse { message, .. }) => assert!(message.contains("declared"), "{message}"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_header_names_line() {
        let text = "\\data\\\nngram 1=1\n\\bogus:\n";
        assert!(matches!(import_arpa(text), Err(Error::Parse { line: 3, .. })));
        let text =
            "\\data\\\nngram 1=3\nngram 2=0\nngram 3=0\n\n\\1-grams:\n-1.0\t<s>\n-0.5\t</s>\nxyz\t<unk>\n\\end\\\n";
        assert!(matches!(import_arpa(text), Err(Error::Parse { line: 9, .. })));
    }

    #[test]
    fn missing_history_is_rejected() {
        let text = "\\data\\\nngram 1=4\nngram 2=0\nngram 3=1\n\n\\1-grams:\n-99\t<s>\n-0.5\t</s>\n-0.5\t<unk>\n-0.5\ta\n\n\\2-grams:\n\n\\3-grams:\n-0.1\t<s> <s> a\n\\end\\\n";
        assert!(matches!(import_arpa(text), Err(Error::Parse { line: 15, .. })));
    }
}
