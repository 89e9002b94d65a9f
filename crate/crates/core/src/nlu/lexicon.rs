use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use super::normalize;
use crate::layout::{Color, Shape};

/// What a surface form means.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    Color(Color),
    Shape(Shape),
    Class(String),
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {line}: expected `surface<TAB>canonical`")]
    BadLine { line: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Maps token sequences to colors, shapes and class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    entries: BTreeMap<Vec<String>, Term>,
    longest: usize,
}

fn canonical_term(canonical: &str) -> Term {
    if let Some(c) = Color::ALL.into_iter().find(|c| c.as_str() == canonical) {
        return Term::Color(c);
    }
    if let Some(s) = Shape::ALL.into_iter().find(|s| s.as_str() == canonical) {
        return Term::Shape(s);
    }
    Term::Class(canonical.to_string())
}

fn plural(word: &str) -> String {
    if word.ends_with('s') || word.ends_with('x') || word.ends_with("ch") || word.ends_with("sh") {
        format!("{word}es")
    } else {
        format!("{word}s")
    }
}

impl Default for Lexicon {
    fn default() -> Self {
        let mut lex = Lexicon::empty();
        for c in Color::ALL {
            lex.insert(c.as_str(), Term::Color(c));
        }
        for s in Shape::ALL {
            lex.insert(s.as_str(), Term::Shape(s));
            lex.insert(&plural(s.as_str()), Term::Shape(s));
        }
        lex.insert("box", Term::Shape(Shape::Square));
        lex.insert("boxes", Term::Shape(Shape::Square));
        lex
    }
}

impl Lexicon {
    pub fn empty() -> Self {
        Lexicon { entries: BTreeMap::new(), longest: 0 }
    }

    /// Adds one entry; the surface form is normalized into tokens first.
    pub fn insert(&mut self, surface: &str, term: Term) {
        let key = normalize(surface);
        if key.is_empty() {
            return;
        }
        self.longest = self.longest.max(key.len());
        self.entries.insert(key, term);
    }

    /// Adds class labels with their plural forms.
    pub fn with_classes<S: AsRef<str>>(mut self, labels: &[S]) -> Self {
        for label in labels {
            let label = label.as_ref();
            self.insert(label, Term::Class(label.to_string()));
            let mut words: Vec<&str> = label.split_whitespace().collect();
            if let Some(last) = words.pop() {
                let pl = if last == "person" { "people".to_string() } else { plural(last) };
                words.push(&pl);
                self.insert(&words.join(" "), Term::Class(label.to_string()));
            }
        }
        self
    }

    /// Parses `surface<TAB>canonical` lines. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut lex = Lexicon::empty();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (surface, canonical) = line.split_once('\t').ok_or(LexiconError::BadLine { line: i + 1 })?;
            let (surface, canonical) = (surface.trim(), canonical.trim());
            if surface.is_empty() || canonical.is_empty() {
                return Err(LexiconError::BadLine { line: i + 1 });
            }
            lex.insert(surface, canonical_term(canonical));
        }
        Ok(lex)
    }

    /// Loads a lexicon file, falling back to the built-in defaults when it is absent.
    pub fn load_or_default(path: &Path) -> Result<Self, LexiconError> {
        match std::fs::read_to_string(path) {
            Ok(text) => Lexicon::parse(&text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Lexicon::default()),
            Err(e) => Err(e.into()),
        }
    }

    /// Longest entry starting at `tokens[at]`, with its length in tokens.
    pub fn longest_match(&self, tokens: &[String], at: usize) -> Option<(&Term, usize)> {
        let max = self.longest.min(tokens.len().saturating_sub(at));
        (1..=max).rev().find_map(|len| self.entries.get(&tokens[at..at + len]).map(|t| (t, len)))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
