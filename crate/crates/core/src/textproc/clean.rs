//! Boilerplate removal, alias rewriting, and tokenization.

use std::collections::BTreeMap;
use std::path::Path;

use regex::Regex;
use serde::Deserialize;

use super::TextError;

/// How a boilerplate pattern matches. `Prefix` strips from the start of
/// the text (repeatedly, so stacked prefixes all go), `Substring` and
/// `Regex` replace every occurrence with a space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternKind {
    Prefix,
    Substring,
    Regex,
}

#[derive(Debug, Clone)]
pub struct BoilerplatePattern {
    pub kind: PatternKind,
    pub pattern: String,
    compiled: Option<Regex>,
}

impl BoilerplatePattern {
    pub fn new(kind: PatternKind, pattern: &str) -> Result<Self, TextError> {
        let compiled = match kind {
            PatternKind::Regex => Some(
                Regex::new(pattern)
                    .map_err(|e| TextError::BadRules(format!("bad regex `{pattern}`: {e}")))?,
            ),
            _ => None,
        };
        Ok(BoilerplatePattern {
            kind,
            pattern: pattern.to_string(),
            compiled,
        })
    }
}

/// Cleaning configuration: ordered boilerplate patterns, a lowercase alias
/// map applied per token (bare and `#`-prefixed forms), and switches for
/// mention and URL stripping.
#[derive(Debug, Clone)]
pub struct CleaningRules {
    pub patterns: Vec<BoilerplatePattern>,
    pub alias_map: BTreeMap<String, String>,
    pub strip_mentions: bool,
    pub strip_urls: bool,
}

impl Default for CleaningRules {
    fn default() -> Self {
        CleaningRules {
            patterns: Vec::new(),
            alias_map: BTreeMap::new(),
            strip_mentions: true,
            strip_urls: true,
        }
    }
}

#[derive(Debug, Deserialize)]
struct RulesFile {
    #[serde(default = "default_true")]
    strip_mentions: bool,
    #[serde(default = "default_true")]
    strip_urls: bool,
    #[serde(default)]
    boilerplate: Vec<RawPattern>,
    #[serde(default)]
    alias: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
struct RawPattern {
    kind: PatternKind,
    pattern: String,
}

fn default_true() -> bool {
    true
}

impl CleaningRules {
    /// Builds validated rules. Alias keys are lowercased; rejects alias
    /// maps whose canonical forms are themselves keys, which would make
    /// rewriting non-idempotent.
    pub fn new(
        patterns: Vec<BoilerplatePattern>,
        aliases: BTreeMap<String, String>,
        strip_mentions: bool,
        strip_urls: bool,
    ) -> Result<Self, TextError> {
        let alias_map: BTreeMap<String, String> = aliases
            .into_iter()
            .map(|(k, v)| (k.to_lowercase(), v))
            .collect();
        for canonical in alias_map.values() {
            let folded = canonical.to_lowercase();
            let bare = folded.strip_prefix('#').unwrap_or(&folded);
            if alias_map.contains_key(&folded) || alias_map.contains_key(bare) {
                return Err(TextError::BadRules(format!(
                    "alias target `{canonical}` is itself an alias key"
                )));
            }
        }
        Ok(CleaningRules {
            patterns,
            alias_map,
            strip_mentions,
            strip_urls,
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self, TextError> {
        let file: RulesFile =
            toml::from_str(text).map_err(|e| TextError::BadRules(e.to_string()))?;
        let patterns = file
            .boilerplate
            .into_iter()
            .map(|p| BoilerplatePattern::new(p.kind, &p.pattern))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(patterns, file.alias, file.strip_mentions, file.strip_urls)
    }

    pub fn load(path: &Path) -> Result<Self, TextError> {
        let text = std::fs::read_to_string(path).map_err(|e| TextError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::from_toml_str(&text)
    }
}

fn is_url(token: &str) -> bool {
    let lower = token.to_lowercase();
    lower.starts_with("http://")
        || lower.starts_with("https://")
        || lower.starts_with("t.co/")
        || lower.starts_with("bit.ly/")
}

fn is_mention(token: &str) -> bool {
    token.starts_with('@') && token.len() > 1
}

fn apply_alias(token: &str, aliases: &BTreeMap<String, String>) -> Option<String> {
    let folded = token.to_lowercase();
    if let Some(canonical) = aliases.get(&folded) {
        return Some(canonical.clone());
    }
    if let Some(bare) = folded.strip_prefix('#') {
        if let Some(canonical) = aliases.get(bare) {
            return Some(format!("#{canonical}"));
        }
    }
    None
}

/// Removes boilerplate, strips the leading `RT @user` marker, mentions,
/// and URLs, rewrites aliases, and collapses whitespace. Idempotent for
/// rule sets whose patterns cannot match their own replacement output.
pub fn clean_text(text: &str, rules: &CleaningRules) -> String {
    let mut s = text.to_string();
    for p in &rules.patterns {
        match p.kind {
            PatternKind::Prefix => loop {
                let trimmed = s.trim_start();
                match trimmed.strip_prefix(p.pattern.as_str()) {
                    Some(rest) => s = rest.to_string(),
                    None => break,
                }
            },
            PatternKind::Substring => {
                s = s.replace(p.pattern.as_str(), " ");
            }
            PatternKind::Regex => {
                s = p
                    .compiled
                    .as_ref()
                    .expect("regex patterns are compiled at construction")
                    .replace_all(&s, " ")
                    .into_owned();
            }
        }
    }

    let tokens: Vec<&str> = s.split_whitespace().collect();
    let mut out: Vec<String> = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        let token = tokens[i];
        if rules.strip_mentions
            && token == "RT"
            && tokens.get(i + 1).is_some_and(|next| is_mention(next))
        {
            i += 2;
            continue;
        }
        if rules.strip_mentions && is_mention(token) {
            i += 1;
            continue;
        }
        if rules.strip_urls && is_url(token) {
            i += 1;
            continue;
        }
        match apply_alias(token, &rules.alias_map) {
            Some(canonical) => out.push(canonical),
            None => out.push(token.to_string()),
        }
        i += 1;
    }
    out.join(" ")
}

/// Lowercases and splits into tokens. Alphanumerics continue a token, `#`
/// opens one, an apostrophe survives only between alphanumerics, and every
/// other character separates. Tokens without an alphanumeric are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let flush = |current: &mut String, tokens: &mut Vec<String>| {
        if current.chars().any(char::is_alphanumeric) {
            tokens.push(std::mem::take(current));
        } else {
            current.clear();
        }
    };

    let chars: Vec<char> = text
        .chars()
        .flat_map(char::to_lowercase)
        .map(|c| if c == '\u{2019}' { '\'' } else { c })
        .collect();
    for (idx, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            current.push(c);
        } else if c == '#' {
            flush(&mut current, &mut tokens);
            current.push('#');
        } else if c == '\''
            && current.chars().last().is_some_and(char::is_alphanumeric)
            && chars.get(idx + 1).is_some_and(|n| n.is_alphanumeric())
        {
            current.push('\'');
        } else {
            flush(&mut current, &mut tokens);
        }
    }
    flush(&mut current, &mut tokens);
    tokens
}
