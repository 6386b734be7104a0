use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Node class of an actant. The declaration order is the class-major order
/// used by vocabularies and matrices: hashtags, mentions, authors, words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActantClass {
    Hashtag,
    Mention,
    Author,
    Word,
}

impl ActantClass {
    pub const ALL: [ActantClass; 4] = [
        ActantClass::Hashtag,
        ActantClass::Mention,
        ActantClass::Author,
        ActantClass::Word,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ActantClass::Hashtag => "hashtag",
            ActantClass::Mention => "mention",
            ActantClass::Author => "author",
            ActantClass::Word => "word",
        }
    }

    /// Label prefix used in exported files.
    pub fn marker(self) -> &'static str {
        match self {
            ActantClass::Hashtag => "#",
            ActantClass::Mention => "@",
            ActantClass::Author => "&",
            ActantClass::Word => "",
        }
    }

    /// Class implied by a marker-bearing label.
    pub fn from_label(label: &str) -> ActantClass {
        match label.as_bytes().first() {
            Some(b'#') => ActantClass::Hashtag,
            Some(b'@') => ActantClass::Mention,
            Some(b'&') => ActantClass::Author,
            _ => ActantClass::Word,
        }
    }
}

impl fmt::Display for ActantClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActantClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hashtag" | "hashtags" => Ok(ActantClass::Hashtag),
            "mention" | "mentions" => Ok(ActantClass::Mention),
            "author" | "authors" => Ok(ActantClass::Author),
            "word" | "words" => Ok(ActantClass::Word),
            other => Err(Error::config(format!("unknown actant class `{other}`"))),
        }
    }
}

/// Identity of an actant: its class and canonical (lowercase, marker-free) form.
/// Ordering is lexicographic on `(class, canonical)`, which is the tie-break
/// used throughout.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ActantKey {
    pub class: ActantClass,
    pub canonical: String,
}

impl ActantKey {
    pub fn new(class: ActantClass, canonical: impl Into<String>) -> Self {
        ActantKey {
            class,
            canonical: canonical.into(),
        }
    }

    /// Marker-bearing label synthesized from the canonical form.
    pub fn label(&self) -> String {
        format!("{}{}", self.class.marker(), self.canonical)
    }
}

impl fmt::Display for ActantKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.class, self.canonical)
    }
}

/// Parses a comma-separated class list such as `hashtag,mention`.
pub fn parse_class_list(s: &str) -> Result<Vec<ActantClass>, Error> {
    let mut classes: Vec<ActantClass> = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_, _>>()?;
    classes.sort();
    classes.dedup();
    if classes.is_empty() {
        return Err(Error::config("empty class list"));
    }
    Ok(classes)
}
