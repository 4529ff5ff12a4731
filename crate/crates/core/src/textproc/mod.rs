//! Text normalization and tokenization shared by every metric.

use std::fmt;

use serde::{Deserialize, Serialize};
use unicode_general_category::{get_general_category, GeneralCategory};
use unicode_normalization::UnicodeNormalization;

/// A caption exactly as supplied. Normalization only happens in [`tokenize`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RawCaption(pub String);

impl RawCaption {
    pub fn new(text: impl Into<String>) -> Self {
        RawCaption(text.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for RawCaption {
    fn from(s: &str) -> Self {
        RawCaption(s.to_owned())
    }
}

impl From<String> for RawCaption {
    fn from(s: String) -> Self {
        RawCaption(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizerOptions {
    pub lowercase: bool,
    pub strip_punctuation: bool,
    /// Canonical composition (NFC) before and after case folding.
    pub unicode_normalize: bool,
}

impl Default for TokenizerOptions {
    fn default() -> Self {
        TokenizerOptions { lowercase: true, strip_punctuation: true, unicode_normalize: true }
    }
}

/// Ordered, non-empty, whitespace-free tokens of one caption.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenizedCaption {
    tokens: Vec<String>,
}

impl TokenizedCaption {
    /// Builds a caption from tokens that are already split. Empty tokens are
    /// dropped and tokens containing whitespace are split further, so the
    /// whitespace-free invariant always holds.
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let tokens = tokens
            .into_iter()
            .flat_map(|t| t.as_ref().split_whitespace().map(str::to_owned).collect::<Vec<_>>())
            .collect();
        TokenizedCaption { tokens }
    }

    /// Splits on whitespace only; no case folding or punctuation handling.
    /// This is how pre-tokenized corpora are fed in.
    pub fn pretokenized(text: &str) -> Self {
        TokenizedCaption { tokens: text.split_whitespace().map(str::to_owned).collect() }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// The sentence length used by every length-sensitive penalty.
    pub fn length(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

impl fmt::Display for TokenizedCaption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tokens.join(" "))
    }
}

fn is_punctuation(c: char) -> bool {
    matches!(
        get_general_category(c),
        GeneralCategory::ConnectorPunctuation
            | GeneralCategory::DashPunctuation
            | GeneralCategory::OpenPunctuation
            | GeneralCategory::ClosePunctuation
            | GeneralCategory::InitialPunctuation
            | GeneralCategory::FinalPunctuation
            | GeneralCategory::OtherPunctuation
    )
}

/// Normalizes, lowercases, splits on whitespace and strips punctuation that
/// forms a whole token or sits at either end of a token. Punctuation inside a
/// word (hyphens, apostrophes) is kept, as are diacritics.
pub fn tokenize(raw: &RawCaption, opts: &TokenizerOptions) -> TokenizedCaption {
    let mut text: String = if opts.unicode_normalize { raw.0.nfc().collect() } else { raw.0.clone() };
    if opts.lowercase {
        text = text.to_lowercase();
        if opts.unicode_normalize {
            text = text.nfc().collect();
        }
    }
    let tokens = text
        .split_whitespace()
        .map(|chunk| if opts.strip_punctuation { chunk.trim_matches(is_punctuation) } else { chunk })
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect();
    TokenizedCaption { tokens }
}

/// Token count of a caption.
pub fn length(c: &TokenizedCaption) -> usize {
    c.length()
}
