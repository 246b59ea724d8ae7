use std::collections::HashSet;
use std::fs;
use std::io;
use std::path::Path;

/// Lowercased word tokens of `text`.
///
/// Splits on anything that is neither a letter nor a digit, keeps a leading
/// `#` or `@` attached, and drops URLs, stopwords and numbers of fewer than
/// four digits.
pub fn tokenize(text: &str, stopwords: &HashSet<String>) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        if is_url(chunk) {
            continue;
        }
        let chars: Vec<char> = chunk.chars().collect();
        let mut token = String::new();
        for (i, &ch) in chars.iter().enumerate() {
            if ch.is_alphanumeric() {
                token.extend(ch.to_lowercase());
            } else {
                flush(&mut token, stopwords, &mut out);
                let next_is_word = chars.get(i + 1).is_some_and(|c| c.is_alphanumeric());
                if (ch == '#' || ch == '@') && next_is_word {
                    token.push(ch);
                }
            }
        }
        flush(&mut token, stopwords, &mut out);
    }
    out
}

fn flush(token: &mut String, stopwords: &HashSet<String>, out: &mut Vec<String>) {
    let t = std::mem::take(token);
    if t.is_empty() || stopwords.contains(&t) {
        return;
    }
    if t.chars().all(|c| c.is_ascii_digit()) && t.len() < 4 {
        return;
    }
    out.push(t);
}

fn is_url(chunk: &str) -> bool {
    let lower = chunk.to_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}

/// One stopword per line; blank lines ignored, entries lowercased.
pub fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_lowercase).collect()
}

pub fn read_stopwords(path: impl AsRef<Path>) -> io::Result<HashSet<String>> {
    Ok(parse_stopwords(&fs::read_to_string(path)?))
}
