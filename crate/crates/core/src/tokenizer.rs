//! Typed tokenization of tweet text.
//!
//! Grammar, applied left to right at each token start:
//!
//! * url: `http://`, `https://` or `t.co/` (ASCII case-insensitive) up to the
//!   next whitespace,
//! * mention: `@` followed by 1 to 15 characters of `[A-Za-z0-9_]`,
//! * hashtag: `#` followed by letters, digits or underscores, at least one of
//!   which is not a digit,
//! * word: maximal run of letters, digits and apostrophes, with leading and
//!   trailing apostrophes trimmed.
//!
//! Everything else (punctuation, emoji, a `#` that starts no hashtag) is
//! skipped. A bare `@` followed by whitespace or punctuation is the locative
//! "at" of older tweets; it is dropped unless
//! [`TokenizerOptions::strip_location_at`] is off, in which case it becomes
//! the word `at`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::actant::{ActantClass, ActantKey};
use crate::corpus::Tweet;

/// Longest valid handle.
pub const MAX_HANDLE_LEN: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenClass {
    Hashtag,
    Mention,
    Url,
    Word,
}

impl TokenClass {
    pub fn name(self) -> &'static str {
        match self {
            TokenClass::Hashtag => "hashtag",
            TokenClass::Mention => "mention",
            TokenClass::Url => "url",
            TokenClass::Word => "word",
        }
    }

    /// Actant class of this token, if it can be one. Urls never are.
    pub fn actant_class(self) -> Option<ActantClass> {
        match self {
            TokenClass::Hashtag => Some(ActantClass::Hashtag),
            TokenClass::Mention => Some(ActantClass::Mention),
            TokenClass::Word => Some(ActantClass::Word),
            TokenClass::Url => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub class: TokenClass,
    pub canonical: String,
    /// Surface form, including the `#`/`@` marker.
    pub display: String,
    /// Byte range `[start, end)` in the source text.
    pub span: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TokenizerOptions {
    /// Count the handle in `RT @user` as a mention.
    pub treat_rt_mention_as_address: bool,
    /// Drop a bare `@` used for "at".
    pub strip_location_at: bool,
    /// Emit url tokens (they are recognized and consumed either way).
    pub keep_urls: bool,
}

impl Default for TokenizerOptions {
    fn default() -> Self {
        TokenizerOptions {
            treat_rt_mention_as_address: true,
            strip_location_at: true,
            keep_urls: false,
        }
    }
}

fn is_handle_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn is_hashtag_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\''
}

const URL_PREFIXES: [&str; 3] = ["http://", "https://", "t.co/"];

fn url_prefix_at(rest: &str) -> bool {
    URL_PREFIXES.iter().any(|p| {
        rest.len() >= p.len()
            && rest.is_char_boundary(p.len())
            && rest[..p.len()].eq_ignore_ascii_case(p)
    })
}

/// Length in bytes of the prefix of `s` made of chars satisfying `pred`.
fn run_len(s: &str, pred: impl Fn(char) -> bool) -> usize {
    s.char_indices()
        .find(|&(_, c)| !pred(c))
        .map(|(i, _)| i)
        .unwrap_or(s.len())
}

pub fn tokenize(text: &str, opts: &TokenizerOptions) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut pos = 0;
    // set right after an `RT` word when the following mention must be dropped
    let mut suppress_next_mention = false;

    while pos < text.len() {
        let rest = &text[pos..];
        let c = rest.chars().next().expect("pos is within text");

        if c.is_whitespace() {
            pos += c.len_utf8();
            continue;
        }

        if url_prefix_at(rest) {
            let len = run_len(rest, |c| !c.is_whitespace());
            if opts.keep_urls {
                let surface = &rest[..len];
                tokens.push(Token {
                    class: TokenClass::Url,
                    canonical: surface.to_string(),
                    display: surface.to_string(),
                    span: (pos, pos + len),
                });
            }
            suppress_next_mention = false;
            pos += len;
            continue;
        }

        match c {
            '@' => {
                let body = run_len(&rest[1..], is_handle_char);
                if (1..=MAX_HANDLE_LEN).contains(&body) {
                    let surface = &rest[..1 + body];
                    if !suppress_next_mention {
                        tokens.push(Token {
                            class: TokenClass::Mention,
                            canonical: surface[1..].to_ascii_lowercase(),
                            display: surface.to_string(),
                            span: (pos, pos + 1 + body),
                        });
                    }
                    suppress_next_mention = false;
                    pos += 1 + body;
                    continue;
                }
                if body == 0 && !opts.strip_location_at {
                    tokens.push(Token {
                        class: TokenClass::Word,
                        canonical: "at".into(),
                        display: "@".into(),
                        span: (pos, pos + 1),
                    });
                }
                // too-long handles fall through: the `@` is skipped and the
                // remainder is scanned as ordinary text
                suppress_next_mention = false;
                pos += 1;
            }
            '#' => {
                let body_len = run_len(&rest[1..], is_hashtag_char);
                let body = &rest[1..1 + body_len];
                if body_len > 0 && body.chars().any(|c| !c.is_numeric()) {
                    tokens.push(Token {
                        class: TokenClass::Hashtag,
                        canonical: body.to_lowercase(),
                        display: rest[..1 + body_len].to_string(),
                        span: (pos, pos + 1 + body_len),
                    });
                    pos += 1 + body_len;
                } else {
                    pos += 1;
                }
                suppress_next_mention = false;
            }
            c if is_word_char(c) => {
                let len = run_len(rest, is_word_char);
                let raw = &rest[..len];
                let lead = raw.len() - raw.trim_start_matches('\'').len();
                let word = raw.trim_matches('\'');
                suppress_next_mention = false;
                if !word.is_empty() {
                    let canonical = word.to_lowercase();
                    if !opts.treat_rt_mention_as_address && canonical == "rt" {
                        suppress_next_mention = true;
                    }
                    tokens.push(Token {
                        class: TokenClass::Word,
                        canonical,
                        display: word.to_string(),
                        span: (pos + lead, pos + lead + word.len()),
                    });
                }
                pos += len;
            }
            _ => {
                pos += c.len_utf8();
                suppress_next_mention = false;
            }
        }
    }
    tokens
}

/// Canonical form of a surface string of the given class. Idempotent.
pub fn canonicalize(class: TokenClass, surface: &str) -> String {
    match class {
        TokenClass::Hashtag => surface.trim_start_matches('#').to_lowercase(),
        TokenClass::Mention => surface.trim_start_matches('@').to_lowercase(),
        TokenClass::Url => surface.to_string(),
        TokenClass::Word => surface.to_lowercase(),
    }
}

/// The set of actants a tweet is attributed with. Authors come from the
/// tweet's author field rather than its text.
pub fn extract_actants(
    tweet: &Tweet,
    opts: &TokenizerOptions,
    classes: &[ActantClass],
) -> BTreeSet<ActantKey> {
    let mut out: BTreeSet<ActantKey> = tokenize(&tweet.text, opts)
        .into_iter()
        .filter_map(|t| {
            let class = t.class.actant_class()?;
            classes.contains(&class).then(|| ActantKey::new(class, t.canonical))
        })
        .collect();
    if classes.contains(&ActantClass::Author) && !tweet.author.is_empty() {
        out.insert(ActantKey::new(ActantClass::Author, tweet.author.clone()));
    }
    out
}

/// Like [`extract_actants`] but also returns each token's surface form,
/// counted once per occurrence, for label election.
pub(crate) fn actant_occurrences(
    tweet: &Tweet,
    opts: &TokenizerOptions,
    classes: &[ActantClass],
) -> Vec<(ActantKey, String)> {
    let mut out: Vec<(ActantKey, String)> = tokenize(&tweet.text, opts)
        .into_iter()
        .filter_map(|t| {
            let class = t.class.actant_class()?;
            classes
                .contains(&class)
                .then(|| (ActantKey::new(class, t.canonical), t.display))
        })
        .collect();
    if classes.contains(&ActantClass::Author) && !tweet.author.is_empty() {
        out.push((
            ActantKey::new(ActantClass::Author, tweet.author.clone()),
            format!("&{}", tweet.author),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{DateTime, Utc};

    fn classes_of(tokens: &[Token], class: TokenClass) -> Vec<&str> {
        tokens
            .iter()
            .filter(|t| t.class == class)
            .map(|t| t.canonical.as_str())
            .collect()
    }

    fn tweet(text: &str) -> Tweet {
        Tweet {
            id: "1".into(),
            timestamp: DateTime::<Utc>::UNIX_EPOCH,
            author: "someone".into(),
            language: "en".into(),
            text: text.into(),
        }
    }

    #[test]
    fn bird_flu_tweet() {
        let text = "Hoogpathogene H5N1 #vogelgriep vastgesteld in Frankrijk https://t.co/PdJzjwScqK #pluimvee";
        let opts = TokenizerOptions {
            keep_urls: true,
            ..Default::default()
        };
        let toks = tokenize(text, &opts);
        assert_eq!(classes_of(&toks, TokenClass::Hashtag), ["vogelgriep", "pluimvee"]);
        assert_eq!(classes_of(&toks, TokenClass::Url), ["https://t.co/PdJzjwScqK"]);
        assert_eq!(
            classes_of(&toks, TokenClass::Word),
            ["hoogpathogene", "h5n1", "vastgesteld", "in", "frankrijk"]
        );
        assert!(classes_of(&toks, TokenClass::Mention).is_empty());

        // without keep_urls the url is consumed, not split into words
        let toks = tokenize(text, &TokenizerOptions::default());
        assert!(classes_of(&toks, TokenClass::Url).is_empty());
        assert_eq!(classes_of(&toks, TokenClass::Word).len(), 5);
    }

    #[test]
    fn locative_at_is_not_a_mention() {
        let text = "RT @makower: Ted Turner @ UN Foundation dinner: \"Clean coal: Bullshit.\" #rioplus20";
        let toks = tokenize(text, &TokenizerOptions::default());
        assert_eq!(classes_of(&toks, TokenClass::Mention), ["makower"]);
        assert_eq!(classes_of(&toks, TokenClass::Hashtag), ["rioplus20"]);
        assert!(!classes_of(&toks, TokenClass::Word).contains(&"at"));

        let keep = TokenizerOptions {
            strip_location_at: false,
            ..Default::default()
        };
        let toks = tokenize(text, &keep);
        assert_eq!(classes_of(&toks, TokenClass::Mention), ["makower"]);
        assert!(classes_of(&toks, TokenClass::Word).contains(&"at"));
    }

    #[test]
    fn rt_mention_option() {
        let text = "RT @DNPPROVANT: Update @FAVV_Consument";
        let toks = tokenize(text, &TokenizerOptions::default());
        assert_eq!(classes_of(&toks, TokenClass::Mention), ["dnpprovant", "favv_consument"]);
        assert_eq!(classes_of(&toks, TokenClass::Word)[0], "rt");
        let no_rt = TokenizerOptions {
            treat_rt_mention_as_address: false,
            ..Default::default()
        };
        let toks = tokenize(text, &no_rt);
        assert_eq!(classes_of(&toks, TokenClass::Mention), ["favv_consument"]);
    }

    #[test]
    fn empty_text() {
        assert!(tokenize("", &TokenizerOptions::default()).is_empty());
    }

    #[test]
    fn numeric_hashtags_rejected() {
        let toks = tokenize("#123", &TokenizerOptions::default());
        assert!(classes_of(&toks, TokenClass::Hashtag).is_empty());
        assert_eq!(classes_of(&toks, TokenClass::Word), ["123"]);
        let toks = tokenize("#a1", &TokenizerOptions::default());
        assert_eq!(classes_of(&toks, TokenClass::Hashtag), ["a1"]);
    }

    #[test]
    fn trailing_punctuation_excluded() {
        let toks = tokenize("@FAVV_Consument: #Vogelgriep!", &TokenizerOptions::default());
        assert_eq!(toks[0].display, "@FAVV_Consument");
        assert_eq!(toks[1].display, "#Vogelgriep");
        assert_eq!(toks[1].canonical, "vogelgriep");
    }

    #[test]
    fn handle_length_limit() {
        let toks = tokenize("@abcdefghijklmno @abcdefghijklmnop", &TokenizerOptions::default());
        assert_eq!(classes_of(&toks, TokenClass::Mention), ["abcdefghijklmno"]);
        assert_eq!(classes_of(&toks, TokenClass::Word), ["abcdefghijklmnop"]);
    }

    #[test]
    fn apostrophes_inside_words() {
        let toks = tokenize("don't 'quoted' rock'n'roll", &TokenizerOptions::default());
        assert_eq!(classes_of(&toks, TokenClass::Word), ["don't", "quoted", "rock'n'roll"]);
        assert_eq!(toks[1].span, (7, 13));
    }

    #[test]
    fn at_hash_sequence() {
        let text = "RT @WWF_Australia: .@UN_Rioplus20 We want food, water & energy for all @#futurewewant #RioPlus20";
        let toks = tokenize(text, &TokenizerOptions::default());
        assert_eq!(classes_of(&toks, TokenClass::Mention), ["wwf_australia", "un_rioplus20"]);
        assert_eq!(classes_of(&toks, TokenClass::Hashtag), ["futurewewant", "rioplus20"]);
    }

    #[test]
    fn unicode_hashtags_and_case_folding() {
        let toks = tokenize("#Éénjarig #éénjarig #Vogelgriep", &TokenizerOptions::default());
        assert_eq!(toks[0].canonical, toks[1].canonical);
        assert_eq!(toks[2].canonical, "vogelgriep");
    }

    #[test]
    fn canonicalize_is_idempotent() {
        for (class, s) in [
            (TokenClass::Hashtag, "#Vogelgriep"),
            (TokenClass::Mention, "@FAVV"),
            (TokenClass::Word, "Straße"),
        ] {
            let once = canonicalize(class, s);
            assert_eq!(canonicalize(class, &once), once);
        }
    }

    #[test]
    fn extract_deduplicates_and_filters() {
        let got = extract_actants(
            &tweet("#a #a @x"),
            &TokenizerOptions::default(),
            &[ActantClass::Hashtag, ActantClass::Mention],
        );
        let want: BTreeSet<_> = [
            ActantKey::new(ActantClass::Hashtag, "a"),
            ActantKey::new(ActantClass::Mention, "x"),
        ]
        .into();
        assert_eq!(got, want);

        let got = extract_actants(
            &tweet("plain words only"),
            &TokenizerOptions::default(),
            &[ActantClass::Hashtag, ActantClass::Mention],
        );
        assert!(got.is_empty());
    }

    #[test]
    fn extract_mentions_from_retweet() {
        let t = tweet("RT @DNPPROVANT: Update vogelgriep: maatregel gaat in vanaf morgen\n @FAVV_Consument https://t.co/PVMhT9p6fX");
        let got = extract_actants(&t, &TokenizerOptions::default(), &[ActantClass::Mention]);
        let want: BTreeSet<_> = [
            ActantKey::new(ActantClass::Mention, "dnpprovant"),
            ActantKey::new(ActantClass::Mention, "favv_consument"),
        ]
        .into();
        assert_eq!(got, want);
    }

    #[test]
    fn extract_author_class() {
        let got = extract_actants(&tweet("#a"), &TokenizerOptions::default(), &[ActantClass::Author]);
        assert_eq!(got.into_iter().collect::<Vec<_>>(), [ActantKey::new(ActantClass::Author, "someone")]);
    }
}
