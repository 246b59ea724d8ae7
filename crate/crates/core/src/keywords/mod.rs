//! Chi-squared keyword extraction per community.

mod docs;
mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use docs::{
    build_docs, read_tweets, read_tweets_from, window_docs, write_tweets, write_tweets_to, CapRule, TokenDoc, Tweet,
};
pub use text::{parse_stopwords, read_stopwords, tokenize};

use crate::io::{csv_error, FormatError};
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum KeywordError {
    #[error("negative count in contingency table ({a}, {b}, {c}, {d})")]
    NegativeCount { a: i64, b: i64, c: i64, d: i64 },
    #[error("{0} corpus has no tokens")]
    EmptyCorpus(Side),
    #[error("window end {t1} precedes start {t0}")]
    Window { t0: i64, t1: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Community,
    Remainder,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Community => "community",
            Side::Remainder => "remainder",
        })
    }
}

/// 2x2 chi-squared statistic without continuity correction.
///
/// `a` and `b` are the token and non-token counts in the community corpus,
/// `c` and `d` the same in the remainder. Zero when a column total is zero.
pub fn chi_squared_keyness<T: Real>(a: i64, b: i64, c: i64, d: i64) -> Result<T, KeywordError> {
    if a < 0 || b < 0 || c < 0 || d < 0 {
        return Err(KeywordError::NegativeCount { a, b, c, d });
    }
    if a + b == 0 {
        return Err(KeywordError::EmptyCorpus(Side::Community));
    }
    if c + d == 0 {
        return Err(KeywordError::EmptyCorpus(Side::Remainder));
    }
    if a + c == 0 || b + d == 0 {
        return Ok(T::zero());
    }
    let det = i128::from(a) * i128::from(d) - i128::from(b) * i128::from(c);
    let f = |x: i64| T::from_i64(x).expect("count fits");
    let det = T::from_i128(det).expect("determinant fits");
    let n = f(a + b + c + d);
    Ok(n * det * det / (f(a + b) * f(c + d) * f(a + c) * f(b + d)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Keyword<T> {
    pub token: String,
    pub chi2: T,
    pub user_fraction: T,
}

/// Ranked keywords of one community.
#[derive(Clone, Debug, PartialEq)]
pub struct KeywordResult<T> {
    pub community: usize,
    pub keywords: Vec<Keyword<T>>,
}

fn token_counts(docs: &[TokenDoc]) -> (BTreeMap<&str, i64>, i64) {
    let mut counts = BTreeMap::new();
    let mut total = 0;
    for doc in docs {
        for t in &doc.tokens {
            *counts.entry(t.as_str()).or_insert(0) += 1;
            total += 1;
        }
    }
    (counts, total)
}

/// Keywords overrepresented in `community` relative to `remainder`.
///
/// Tokens are ranked by chi-squared (ties lexicographic), cut to `top_n`,
/// then dropped if fewer than `min_user_frac` of the community's nodes used them.
pub fn extract_keywords<T: Real>(
    community_id: usize,
    community: &[TokenDoc],
    remainder: &[TokenDoc],
    top_n: usize,
    min_user_frac: T,
) -> Result<KeywordResult<T>, KeywordError> {
    let (ccounts, ctotal) = token_counts(community);
    let (rcounts, rtotal) = token_counts(remainder);
    if ctotal == 0 {
        return Err(KeywordError::EmptyCorpus(Side::Community));
    }
    if rtotal == 0 {
        return Err(KeywordError::EmptyCorpus(Side::Remainder));
    }

    let mut scored: Vec<(&str, T)> = Vec::new();
    for (&token, &a) in &ccounts {
        let c = rcounts.get(token).copied().unwrap_or(0);
        // strictly higher relative frequency in the community
        if i128::from(a) * i128::from(rtotal) <= i128::from(c) * i128::from(ctotal) {
            continue;
        }
        scored.push((token, chi_squared_keyness(a, ctotal - a, c, rtotal - c)?));
    }
    scored.sort_by(|x, y| y.1.partial_cmp(&x.1).expect("finite chi2").then(x.0.cmp(y.0)));
    scored.truncate(top_n);

    let members: BTreeSet<_> = community.iter().map(|d| d.node).collect();
    let keywords = scored
        .into_iter()
        .filter_map(|(token, chi2)| {
            let users: BTreeSet<_> =
                community.iter().filter(|d| d.tokens.iter().any(|t| t == token)).map(|d| d.node).collect();
            let frac = T::from_count(users.len()) / T::from_count(members.len());
            (frac >= min_user_frac).then(|| Keyword { token: token.to_string(), chi2, user_fraction: frac })
        })
        .collect();
    Ok(KeywordResult { community: community_id, keywords })
}

/// Runs [`extract_keywords`] for every community against the union of the
/// others. Communities without tokens are skipped.
pub fn extract_all<T: Real>(
    docs_by_community: &BTreeMap<usize, Vec<TokenDoc>>,
    top_n: usize,
    min_user_frac: T,
) -> Result<Vec<KeywordResult<T>>, KeywordError> {
    let mut out = Vec::new();
    for (&id, docs) in docs_by_community {
        if docs.iter().all(|d| d.tokens.is_empty()) {
            log::warn!("community {id} has no tokens; skipped");
            continue;
        }
        let rest: Vec<TokenDoc> =
            docs_by_community.iter().filter(|(&other, _)| other != id).flat_map(|(_, d)| d.iter().cloned()).collect();
        out.push(extract_keywords(id, docs, &rest, top_n, min_user_frac)?);
    }
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
struct Row<T> {
    community: usize,
    rank: usize,
    token: String,
    chi2: T,
    user_fraction: T,
}

/// CSV `community,rank,token,chi2,user_fraction`; ranks start at 1.
pub fn write_keywords_csv<T: Real + Serialize, W: Write>(results: &[KeywordResult<T>], w: W) -> io::Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wtr.write_record(["community", "rank", "token", "chi2", "user_fraction"])?;
    for r in results {
        for (i, k) in r.keywords.iter().enumerate() {
            wtr.serialize(Row {
                community: r.community,
                rank: i + 1,
                token: k.token.clone(),
                chi2: k.chi2,
                user_fraction: k.user_fraction,
            })?;
        }
    }
    wtr.flush()
}

pub fn read_keywords_csv<T, R>(reader: R) -> Result<Vec<KeywordResult<T>>, FormatError>
where
    T: Real + for<'de> Deserialize<'de>,
    R: Read,
{
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out: Vec<KeywordResult<T>> = Vec::new();
    for row in rdr.deserialize::<Row<T>>() {
        let row = row.map_err(csv_error)?;
        if out.last().is_none_or(|r| r.community != row.community) {
            out.push(KeywordResult { community: row.community, keywords: Vec::new() });
        }
        let current = out.last_mut().expect("pushed");
        if row.rank != current.keywords.len() + 1 {
            return Err(FormatError::Malformed {
                line: 0,
                message: format!("community {} rank {} out of sequence", row.community, row.rank),
            });
        }
        current.keywords.push(Keyword { token: row.token, chi2: row.chi2, user_fraction: row.user_fraction });
    }
    Ok(out)
}
