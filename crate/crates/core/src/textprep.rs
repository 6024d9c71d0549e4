//! Sentence segmentation, tokenization and digit regularization.
//!
//! Segmentation is rule based: `?` and `!` always end a sentence, and a
//! period followed by whitespace ends one unless it closes an abbreviation,
//! a single-capital initial or a dotted abbreviation such as `U.S.`.
//!
//! Tokenization splits on whitespace and isolates punctuation to single
//! characters, with these exceptions:
//!
//! - contractions split in two, the second part keeping the apostrophe
//!   (`don't` -> `do` `n't`, `John's` -> `John` `'s`);
//! - commas and periods between digits stay inside the token (`1,234.56`);
//! - runs of periods stay together (`...`);
//! - abbreviation and initial periods stay attached (`Dr.`, `J.`, `U.S.`).
//!
//! Every token is a verbatim slice of its input, so the concatenation of
//! token surfaces equals the input with whitespace removed.

use std::collections::{HashMap, HashSet};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const DEFAULT_ABBREVIATIONS: &str = include_str!("abbreviations.txt");

/// Suffixes (after the apostrophe) that split off as a contraction part.
/// `t` is handled separately because it takes the preceding `n` along.
const CONTRACTION_SUFFIXES: [&str; 6] = ["s", "ll", "re", "ve", "d", "m"];

/// Minimum mid-sentence sightings before a period-final form is learned as
/// an abbreviation.
const LEARNED_ABBREVIATION_MIN: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Word,
    Punctuation,
    DigitClass,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub surface: String,
    pub kind: TokenKind,
}

impl Token {
    pub fn new(surface: impl Into<String>) -> Self {
        let surface = surface.into();
        let kind = classify(&surface);
        Token { surface, kind }
    }
}

fn classify(surface: &str) -> TokenKind {
    if is_digit_class(surface) {
        TokenKind::DigitClass
    } else if surface.chars().any(char::is_alphabetic) {
        TokenKind::Word
    } else if surface.chars().any(char::is_alphanumeric) {
        TokenKind::Other
    } else {
        TokenKind::Punctuation
    }
}

/// A segmented sentence with its tokens and byte span in the source document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    pub source_span: Range<usize>,
}

impl Sentence {
    pub fn surfaces(&self) -> Vec<String> {
        self.tokens.iter().map(|t| t.surface.clone()).collect()
    }
}

/// Period-stripped forms that never end a sentence (`Dr`, `Mr`, `Jan`, ...).
#[derive(Debug, Clone, Default)]
pub struct AbbrevLexicon {
    forms: HashSet<String>,
}

impl AbbrevLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// The bundled English list.
    pub fn english() -> Self {
        Self::from_list(DEFAULT_ABBREVIATIONS)
    }

    /// One form per line; blank lines and `#` comments are ignored, a
    /// trailing period is stripped.
    pub fn from_list(text: &str) -> Self {
        let forms = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.trim_end_matches('.').to_owned())
            .filter(|l| !l.is_empty())
            .collect();
        AbbrevLexicon { forms }
    }

    pub fn insert(&mut self, form: impl Into<String>) {
        self.forms.insert(form.into());
    }

    pub fn contains(&self, form: &str) -> bool {
        self.forms.contains(form)
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn extend(&mut self, other: &AbbrevLexicon) {
        self.forms.extend(other.forms.iter().cloned());
    }

    /// Learn abbreviations from a document: a whitespace chunk ending in a
    /// single period whose next chunk starts with a lowercase letter, a digit
    /// or a comma is a mid-sentence period. Forms seen that way at least twice
    /// are returned.
    pub fn learn(text: &str) -> Self {
        let chunks: Vec<&str> = text.split_whitespace().collect();
        let mut sightings: HashMap<&str, usize> = HashMap::new();
        for pair in chunks.windows(2) {
            let (chunk, next) = (pair[0], pair[1]);
            let core = chunk.trim_start_matches(is_opener);
            let Some(stem) = core.strip_suffix('.') else { continue };
            if stem.is_empty() || stem.ends_with('.') || !stem.chars().any(char::is_alphabetic) {
                continue;
            }
            if !stem.chars().all(|c| c.is_alphanumeric() || c == '.') {
                continue;
            }
            let follows_lower = next.chars().next().is_some_and(|c| c.is_lowercase() || c.is_ascii_digit() || c == ',');
            if follows_lower {
                *sightings.entry(stem).or_default() += 1;
            }
        }
        let forms = sightings
            .into_iter()
            .filter(|&(_, n)| n >= LEARNED_ABBREVIATION_MIN)
            .map(|(form, _)| form.to_owned())
            .collect();
        AbbrevLexicon { forms }
    }
}

fn is_opener(c: char) -> bool {
    matches!(c, '"' | '\'' | '(' | '[' | '{' | '\u{201C}' | '\u{2018}' | '\u{AB}')
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '}' | '\u{201D}' | '\u{2019}' | '\u{BB}')
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// `U.S`, `e.g`, `Ph.D`: two or more short letter groups joined by periods.
fn is_dotted_abbreviation(stem: &str) -> bool {
    let parts: Vec<&str> = stem.split('.').collect();
    parts.len() >= 2
        && parts.iter().all(|p| {
            let n = p.chars().count();
            (1..=3).contains(&n) && p.chars().all(char::is_alphabetic)
        })
}

fn is_initial(stem: &str) -> bool {
    let mut chars = stem.chars();
    matches!((chars.next(), chars.next()), (Some(c), None) if c.is_uppercase())
}

/// Whether `stem` followed by a single period keeps the period attached.
fn keeps_period(stem: &str, lexicon: &AbbrevLexicon) -> bool {
    !stem.is_empty() && (lexicon.contains(stem) || is_initial(stem) || is_dotted_abbreviation(stem))
}

/// Byte spans of the sentences in `doc`. Spans start and end on
/// non-whitespace characters and together cover all non-whitespace text.
pub fn segment_sentences(doc: &str, lexicon: &AbbrevLexicon) -> Result<Vec<Range<usize>>> {
    if doc.trim().is_empty() {
        return Err(Error::EmptyDocument);
    }
    let chars: Vec<(usize, char)> = doc.char_indices().collect();
    let byte_at = |i: usize| chars.get(i).map_or(doc.len(), |&(b, _)| b);

    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    let mut chunk_start = 0;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i].1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if i == 0 || chars[i - 1].1.is_whitespace() {
            chunk_start = i;
        }
        if start.is_none() {
            start = Some(i);
        }
        let boundary_end = match c {
            '?' | '!' => Some(terminal_run_end(&chars, i)),
            '.' => {
                let run_end = period_run_end(&chars, i);
                let after = closer_run_end(&chars, run_end);
                let at_chunk_end = after == chars.len() || chars[after].1.is_whitespace();
                if !at_chunk_end {
                    None
                } else if run_end - i >= 2 {
                    Some(after)
                } else {
                    let stem: String =
                        chars[chunk_start..i].iter().map(|&(_, c)| c).skip_while(|&c| is_opener(c)).collect();
                    let inter_numeric = i > 0
                        && chars[i - 1].1.is_ascii_digit()
                        && chars.get(i + 1).is_some_and(|&(_, c)| c.is_ascii_digit());
                    if keeps_period(&stem, lexicon) || inter_numeric {
                        None
                    } else {
                        Some(after)
                    }
                }
            }
            _ => None,
        };
        match boundary_end {
            Some(end) => {
                spans.push(byte_at(start.take().unwrap_or(i))..byte_at(end));
                i = end;
            }
            None => i += 1,
        }
    }
    if let Some(s) = start {
        let last = chars.iter().rposition(|&(_, c)| !c.is_whitespace()).unwrap_or(s);
        spans.push(byte_at(s)..byte_at(last + 1));
    }
    Ok(spans)
}

fn period_run_end(chars: &[(usize, char)], mut i: usize) -> usize {
    while i < chars.len() && chars[i].1 == '.' {
        i += 1;
    }
    i
}

fn terminal_run_end(chars: &[(usize, char)], mut i: usize) -> usize {
    while i < chars.len() && matches!(chars[i].1, '?' | '!' | '.') {
        i += 1;
    }
    closer_run_end(chars, i)
}

fn closer_run_end(chars: &[(usize, char)], mut i: usize) -> usize {
    while i < chars.len() && is_closer(chars[i].1) {
        i += 1;
    }
    i
}

/// Tokenize one sentence with the bundled abbreviation list.
pub fn tokenize(sentence_text: &str) -> Vec<Token> {
    tokenize_with(sentence_text, &AbbrevLexicon::english())
}

/// Tokenize one sentence.
pub fn tokenize_with(sentence_text: &str, lexicon: &AbbrevLexicon) -> Vec<Token> {
    token_spans(sentence_text, lexicon).into_iter().map(|r| Token::new(&sentence_text[r])).collect()
}

/// Byte ranges of the tokens of `text`, in order.
pub fn token_spans(text: &str, lexicon: &AbbrevLexicon) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for chunk in text.split(char::is_whitespace) {
        if !chunk.is_empty() {
            tokenize_chunk(chunk, offset, lexicon, &mut out);
        }
        offset += chunk.len() + text[offset + chunk.len()..].chars().next().map_or(0, char::len_utf8);
    }
    out
}

fn tokenize_chunk(chunk: &str, base: usize, lexicon: &AbbrevLexicon, out: &mut Vec<Range<usize>>) {
    let chars: Vec<(usize, char)> = chunk.char_indices().collect();
    let byte_at = |i: usize| base + chars.get(i).map_or(chunk.len(), |&(b, _)| b);
    let n = chars.len();
    let ch = |i: usize| chars[i].1;

    let mut i = 0;
    while i < n {
        let c = ch(i);
        if c.is_alphanumeric() {
            let start = i;
            // dotted abbreviation such as U.S. or e.g.
            if let Some(end) = dotted_abbreviation_end(&chars, i) {
                out.push(byte_at(start)..byte_at(end));
                i = end;
                continue;
            }
            let mut j = i + 1;
            while j < n {
                let d = ch(j);
                let inner_next = j + 1 < n;
                let numeric_sep =
                    (d == ',' || d == '.') && inner_next && ch(j - 1).is_ascii_digit() && ch(j + 1).is_ascii_digit();
                let inner_apostrophe =
                    is_apostrophe(d) && inner_next && ch(j - 1).is_alphanumeric() && ch(j + 1).is_alphanumeric();
                if d.is_alphanumeric() || numeric_sep || inner_apostrophe {
                    j += 1;
                } else {
                    break;
                }
            }
            let word: String = chars[start..j].iter().map(|&(_, c)| c).collect();
            // attached abbreviation / initial period
            if j < n && ch(j) == '.' && (j + 1 == n || ch(j + 1) != '.') && keeps_period(&word, lexicon) {
                out.push(byte_at(start)..byte_at(j + 1));
                i = j + 1;
                continue;
            }
            match contraction_split(&chars[start..j]) {
                Some(k) => {
                    out.push(byte_at(start)..byte_at(start + k));
                    out.push(byte_at(start + k)..byte_at(j));
                }
                None => out.push(byte_at(start)..byte_at(j)),
            }
            i = j;
        } else if c == '.' {
            let end = period_run_end(&chars, i);
            out.push(byte_at(i)..byte_at(end));
            i = end;
        } else if is_apostrophe(c) && (i == 0 || !ch(i - 1).is_alphanumeric()) {
            // a bare contraction part such as `'s` in pre-tokenized text
            let mut j = i + 1;
            while j < n && ch(j).is_alphabetic() {
                j += 1;
            }
            let suffix: String = chars[i + 1..j].iter().map(|&(_, c)| c).collect::<String>().to_lowercase();
            let ends_word = j == n || !ch(j).is_alphanumeric();
            if j > i + 1 && ends_word && CONTRACTION_SUFFIXES.contains(&suffix.as_str()) {
                out.push(byte_at(i)..byte_at(j));
                i = j;
            } else {
                out.push(byte_at(i)..byte_at(i + 1));
                i += 1;
            }
        } else {
            out.push(byte_at(i)..byte_at(i + 1));
            i += 1;
        }
    }
}

/// End index of a dotted abbreviation starting at `start` (`U.S.`, `e.g.`, `Ph.D.`).
fn dotted_abbreviation_end(chars: &[(usize, char)], start: usize) -> Option<usize> {
    let mut i = start;
    let mut groups = 0;
    loop {
        let g = i;
        while i < chars.len() && chars[i].1.is_alphabetic() {
            i += 1;
        }
        let len = i - g;
        if len == 0 || len > 3 || i >= chars.len() || chars[i].1 != '.' {
            break;
        }
        i += 1;
        groups += 1;
        if i >= chars.len() || !chars[i].1.is_alphabetic() {
            break;
        }
    }
    // the last consumed char must be a period and nothing alphanumeric may follow
    let clean_end = i == chars.len() || !chars[i].1.is_alphanumeric();
    (groups >= 2 && chars[i - 1].1 == '.' && clean_end && chars.get(i).is_none_or(|&(_, c)| c != '.')).then_some(i)
}

/// Split point (char index) inside a word, if it ends in a contraction.
fn contraction_split(word: &[(usize, char)]) -> Option<usize> {
    let apos = word.iter().rposition(|&(_, c)| is_apostrophe(c))?;
    if apos == 0 {
        return None;
    }
    let suffix: String = word[apos + 1..].iter().map(|&(_, c)| c).collect::<String>().to_lowercase();
    if suffix == "t" {
        // n't keeps its n: do|n't, ca|n't
        let n_pos = apos - 1;
        return (n_pos >= 1 && matches!(word[n_pos].1, 'n' | 'N')).then_some(n_pos);
    }
    CONTRACTION_SUFFIXES.contains(&suffix.as_str()).then_some(apos)
}

/// `<d1>` ... `<d8>`, `<d9+>`.
pub fn digit_class(len: usize) -> String {
    if len >= 9 {
        "<d9+>".to_owned()
    } else {
        format!("<d{len}>")
    }
}

fn is_digit_class(surface: &str) -> bool {
    match surface.strip_prefix("<d").and_then(|s| s.strip_suffix('>')) {
        Some("9+") => true,
        Some(n) => n.len() == 1 && matches!(n.as_bytes()[0], b'1'..=b'8'),
        None => false,
    }
}

fn regularize_surface(surface: &str) -> Option<String> {
    (!surface.is_empty() && surface.bytes().all(|b| b.is_ascii_digit())).then(|| digit_class(surface.len()))
}

/// Replace all-digit tokens with their digit-count class. Idempotent.
pub fn regularize_digits(tokens: Vec<Token>) -> Vec<Token> {
    tokens
        .into_iter()
        .map(|t| match regularize_surface(&t.surface) {
            Some(surface) => Token { surface, kind: TokenKind::DigitClass },
            None => t,
        })
        .collect()
}

/// Segment, tokenize and digit-regularize one document. The document's
/// own learned abbreviations are added to `lexicon` for this call.
pub fn prepare_document(doc: &str, lexicon: &AbbrevLexicon) -> Result<Vec<Sentence>> {
    let mut lex = lexicon.clone();
    lex.extend(&AbbrevLexicon::learn(doc));
    let spans = segment_sentences(doc, &lex)?;
    Ok(spans
        .into_iter()
        .map(|span| {
            let tokens = regularize_digits(tokenize_with(&doc[span.clone()], &lex));
            Sentence { tokens, source_span: span }
        })
        .filter(|s| !s.tokens.is_empty())
        .collect())
}

/// Split a text into documents at blank lines.
pub fn split_documents(text: &str) -> Vec<&str> {
    let mut docs = Vec::new();
    let mut start: Option<usize> = None;
    let mut end = 0;
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        if line.trim().is_empty() {
            if let Some(s) = start.take() {
                docs.push(&text[s..end]);
            }
        } else {
            start.get_or_insert(offset);
            end = offset + line.len();
        }
        offset += line.len();
    }
    if let Some(s) = start {
        docs.push(&text[s..end]);
    }
    docs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(text: &str) -> Vec<String> {
        tokenize(text).into_iter().map(|t| t.surface).collect()
    }

    fn sentences(doc: &str) -> Vec<&str> {
        segment_sentences(doc, &AbbrevLexicon::english()).unwrap().into_iter().map(|r| &doc[r]).collect()
    }

    #[test]
    fn splits_simple_sentences() {
        assert_eq!(sentences("He left. She stayed."), ["He left.", "She stayed."]);
    }

    #[test]
    fn keeps_abbreviations_and_initials() {
        assert_eq!(sentences("Dr. Smith met J. R. Jones."), ["Dr. Smith met J. R. Jones."]);
    }

    #[test]
    fn decimal_then_sentence_end() {
        assert_eq!(sentences("Pi is 3.14. Done."), ["Pi is 3.14.", "Done."]);
    }

    #[test]
    fn question_and_exclamation_always_end() {
        assert_eq!(sentences("Why? Because! ok"), ["Why?", "Because!", "ok"]);
        assert_eq!(sentences("He said \"stop.\" Then left."), ["He said \"stop.\"", "Then left."]);
    }

    #[test]
    fn empty_document_is_an_error() {
        assert!(matches!(segment_sentences("  \n\t ", &AbbrevLexicon::english()), Err(Error::EmptyDocument)));
    }

    #[test]
    fn dotted_abbreviation_does_not_split() {
        assert_eq!(sentences("The U.S. and its allies agreed. Next."), ["The U.S. and its allies agreed.", "Next."]);
    }

    #[test]
    fn contractions() {
        assert_eq!(surfaces("don't stop"), ["do", "n't", "stop"]);
        assert_eq!(surfaces("John's dog can't"), ["John", "'s", "dog", "ca", "n't"]);
        assert_eq!(
            surfaces("we'll they're I've she'd I'm"),
            ["we", "'ll", "they", "'re", "I", "'ve", "she", "'d", "I", "'m"]
        );
        assert_eq!(surfaces("O'Brien rock'n'roll"), ["O'Brien", "rock'n'roll"]);
        assert_eq!(surfaces("do n't 's"), ["do", "n't", "'s"]);
    }

    #[test]
    fn numbers_and_punctuation() {
        assert_eq!(surfaces("1,234.56 dollars,"), ["1,234.56", "dollars", ","]);
        assert_eq!(surfaces("Wait... go!"), ["Wait", "...", "go", "!"]);
        assert_eq!(surfaces("x-ray ($5)"), ["x", "-", "ray", "(", "$", "5", ")"]);
        assert_eq!(surfaces("Pi is 3.14."), ["Pi", "is", "3.14", "."]);
    }

    #[test]
    fn abbreviation_periods_stay_attached() {
        assert_eq!(surfaces("Dr. Smith met J. R. Jones."), ["Dr.", "Smith", "met", "J.", "R.", "Jones", "."]);
        assert_eq!(surfaces("the U.S. economy, e.g. jobs"), ["the", "U.S.", "economy", ",", "e.g.", "jobs"]);
    }

    #[test]
    fn quotes_are_isolated() {
        assert_eq!(surfaces("'hello' \"world\""), ["'", "hello", "'", "\"", "world", "\""]);
        assert_eq!(surfaces("dogs' bones"), ["dogs", "'", "bones"]);
    }

    #[test]
    fn digit_regularization() {
        let toks = |v: &[&str]| v.iter().map(|s| Token::new(*s)).collect::<Vec<_>>();
        let out = regularize_digits(toks(&["in", "1984"]));
        assert_eq!(out[1].surface, "<d4>");
        assert_eq!(out[1].kind, TokenKind::DigitClass);
        assert_eq!(regularize_digits(toks(&["1,234.56"]))[0].surface, "1,234.56");
        assert_eq!(regularize_digits(toks(&["007"]))[0].surface, "<d3>");
        assert_eq!(regularize_digits(toks(&["123456789012"]))[0].surface, "<d9+>");
        assert_eq!(regularize_digits(toks(&["12345678"]))[0].surface, "<d8>");
    }

    #[test]
    fn token_kinds() {
        assert_eq!(Token::new("cat").kind, TokenKind::Word);
        assert_eq!(Token::new("...").kind, TokenKind::Punctuation);
        assert_eq!(Token::new("1984").kind, TokenKind::Other);
        assert_eq!(Token::new("<d4>").kind, TokenKind::DigitClass);
        assert_eq!(Token::new("<d0>").kind, TokenKind::Word);
    }

    #[test]
    fn learns_repeated_mid_sentence_abbreviations() {
        let lex = AbbrevLexicon::learn("See approx. ten. Then approx. five. Also Fig. three.");
        assert!(lex.contains("approx"));
        assert!(!lex.contains("Fig"));
        assert!(!lex.contains("ten"));
    }

    #[test]
    fn documents_split_on_blank_lines() {
        let docs = split_documents("one a.\ntwo b.\n\n\nthree c.\n");
        assert_eq!(docs, ["one a.\ntwo b.\n", "three c.\n"]);
    }

    #[test]
    fn prepare_document_end_to_end() {
        let sents = prepare_document("In 1984 he left. Dr. Who didn't.", &AbbrevLexicon::english()).unwrap();
        assert_eq!(sents.len(), 2);
        assert_eq!(sents[0].surfaces(), ["In", "<d4>", "he", "left", "."]);
        assert_eq!(sents[1].surfaces(), ["Dr.", "Who", "did", "n't", "."]);
    }
}
