//! Author-name parsing, ASCII dumb-down and blocking keys.
//!
//! Names arrive in several shapes: `Surname, Given`, `Surname, I.`,
//! `Given Surname` and `I. Surname`. [`parse_author_string`] folds all of
//! them into a [`ParsedName`]. From there [`blocking_key`] derives the
//! `(surname, first initial)` pair used both to group same-name accounts and
//! as the stem of minted author identifiers (`warner_s`).
//!
//! The dumb-down is deliberately lossy. It decomposes, strips diacritics and
//! keeps only ASCII letters, so `Müller` becomes `muller` while `Mueller`
//! stays `mueller`. Those two spellings do not unify. Scripts with no Latin
//! decomposition are dropped outright, and a name that loses every letter is
//! an error rather than an empty key.

use std::collections::HashMap;
use std::fmt;

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};
use crate::store::ReadView;

/// A personal name split into surname, optional first given name and initials.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParsedName {
    surname: String,
    given: Option<String>,
    initials: Vec<char>,
}

impl ParsedName {
    /// Builds a name from a surname and a free-text given-names field, the
    /// way user accounts store them.
    pub fn from_parts(surname: &str, given_names: &str) -> Result<Self> {
        let surname = collapse_whitespace(surname);
        if surname.is_empty() {
            return Err(Error::invalid("name", "surname is empty"));
        }
        let (given, initials) = parse_given(given_names.split_whitespace());
        Ok(ParsedName {
            surname,
            given,
            initials,
        })
    }

    /// A surname plus bare initials, e.g. `Zhang` + `['Y']`.
    pub fn with_initials(surname: &str, initials: &[char]) -> Result<Self> {
        let given: String = initials.iter().map(|c| format!("{c}. ")).collect();
        Self::from_parts(surname, &given)
    }

    pub fn surname(&self) -> &str {
        &self.surname
    }

    /// The first given name, when it was written out in full.
    pub fn given(&self) -> Option<&str> {
        self.given.as_deref()
    }

    /// Uppercase ASCII initials in written order.
    pub fn initials(&self) -> &[char] {
        &self.initials
    }

    pub fn first_initial(&self) -> Option<char> {
        self.initials.first().copied()
    }
}

impl fmt::Display for ParsedName {
    /// Natural display order: `Simeon Warner`, `S. J. Warner`, `Plato`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut rest = self.initials.iter();
        if let Some(given) = &self.given {
            write!(f, "{given} ")?;
            rest.next();
        }
        for initial in rest {
            write!(f, "{initial}. ")?;
        }
        f.write_str(&self.surname)
    }
}

fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Splits given-name tokens into the optional first full name and initials.
/// `J.R.` yields two initials; pieces with no mappable letter are skipped.
fn parse_given<'a>(tokens: impl Iterator<Item = &'a str>) -> (Option<String>, Vec<char>) {
    let mut given = None;
    let mut initials = Vec::new();
    for token in tokens {
        for piece in token.split('.').filter(|p| !p.is_empty()) {
            let Some(first) = ascii_letters(piece).next() else {
                continue;
            };
            let is_initial = piece.chars().count() == 1;
            if !is_initial && initials.is_empty() {
                given = Some(piece.to_string());
            }
            initials.push(first.to_ascii_uppercase());
        }
    }
    (given, initials)
}

fn ascii_letters(text: &str) -> impl Iterator<Item = char> + '_ {
    text.nfkd()
        .filter(|c| !is_combining_mark(*c))
        .flat_map(char::to_lowercase)
        .filter(char::is_ascii_lowercase)
}

/// Parses one author string as it appears on a paper or in a user profile.
///
/// Comma forms keep everything before the first comma as the surname, so
/// particles survive: `van der Berg, J.` has surname `van der Berg`. Space
/// forms take only the final token as the surname.
pub fn parse_author_string(raw: &str) -> Result<ParsedName> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Err(Error::invalid("author string", "empty"));
    }
    if let Some((surname, rest)) = raw.split_once(',') {
        let surname = collapse_whitespace(surname);
        if surname.is_empty() {
            return Err(Error::invalid(
                "author string",
                format!("{raw:?} has no surname"),
            ));
        }
        let (given, initials) = parse_given(rest.split(|c: char| c == ',' || c.is_whitespace()));
        return Ok(ParsedName {
            surname,
            given,
            initials,
        });
    }
    let tokens: Vec<&str> = raw.split_whitespace().collect();
    let (surname, given_tokens) = tokens.split_last().expect("non-empty after trim");
    let (given, initials) = parse_given(given_tokens.iter().copied());
    Ok(ParsedName {
        surname: surname.to_string(),
        given,
        initials,
    })
}

/// Lowercase ASCII key for a surname: `Müller` → `muller`,
/// `van der Berg` → `vanderberg`.
pub fn dumbdown_surname(surname: &str) -> Result<String> {
    let key: String = ascii_letters(surname).collect();
    if key.is_empty() {
        return Err(Error::UnmappableName(surname.to_string()));
    }
    Ok(key)
}

/// A `(surname key, first initial)` pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockingKey {
    surname_key: String,
    first_initial: char,
}

impl BlockingKey {
    pub fn surname_key(&self) -> &str {
        &self.surname_key
    }

    pub fn first_initial(&self) -> char {
        self.first_initial
    }

    /// `Zhang, Y`, the form used in the frequency table.
    pub fn table_label(&self) -> String {
        let mut chars = self.surname_key.chars();
        let head = chars.next().map(|c| c.to_ascii_uppercase());
        format!(
            "{}{}, {}",
            head.into_iter().collect::<String>(),
            chars.as_str(),
            self.first_initial.to_ascii_uppercase()
        )
    }
}

impl fmt::Display for BlockingKey {
    /// The identifier stem: `zhang_y`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.surname_key, self.first_initial)
    }
}

pub fn blocking_key(name: &ParsedName) -> Result<BlockingKey> {
    let initial = name
        .first_initial()
        .ok_or_else(|| Error::invalid("name", format!("{name} has no initials")))?;
    Ok(BlockingKey {
        surname_key: dumbdown_surname(name.surname())?,
        first_initial: initial.to_ascii_lowercase(),
    })
}

/// Blocking-key counts over every user account.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameReport {
    /// Sorted by count descending, then key ascending.
    pub entries: Vec<(BlockingKey, usize)>,
    /// Accounts whose name yields no key (no initial, or nothing mappable).
    pub unkeyed: Vec<String>,
}

impl NameReport {
    pub fn total(&self) -> usize {
        self.entries.iter().map(|(_, n)| n).sum::<usize>() + self.unkeyed.len()
    }

    /// Two aligned columns, `Lastname, Initial` and `Count`.
    pub fn to_table(&self, top: Option<usize>) -> String {
        let rows: Vec<(String, usize)> = self
            .entries
            .iter()
            .take(top.unwrap_or(usize::MAX))
            .map(|(key, n)| (key.table_label(), *n))
            .collect();
        let header = ("Lastname, Initial", "Count");
        let label_width = rows
            .iter()
            .map(|(label, _)| label.len())
            .chain([header.0.len()])
            .max()
            .unwrap_or_default();
        let count_width = rows
            .iter()
            .map(|(_, n)| n.to_string().len())
            .chain([header.1.len()])
            .max()
            .unwrap_or_default();
        let mut out = format!("{:<label_width$}  {:>count_width$}\n", header.0, header.1);
        for (label, n) in rows {
            out.push_str(&format!("{label:<label_width$}  {n:>count_width$}\n"));
        }
        out
    }
}

pub fn name_frequency_report(view: &ReadView) -> NameReport {
    let mut counts: HashMap<BlockingKey, usize> = HashMap::new();
    let mut unkeyed = Vec::new();
    for user in view.users() {
        match user.parsed_name().and_then(|name| blocking_key(&name)) {
            Ok(key) => *counts.entry(key).or_default() += 1,
            Err(_) => unkeyed.push(user.user_id.clone()),
        }
    }
    let mut entries: Vec<_> = counts.into_iter().collect();
    entries.sort_by(|(ka, na), (kb, nb)| nb.cmp(na).then_with(|| ka.cmp(kb)));
    NameReport { entries, unkeyed }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Compatibility {
    Incompatible,
    InitialCompatible,
    Exact,
}

impl Compatibility {
    pub fn is_compatible(self) -> bool {
        self != Compatibility::Incompatible
    }
}

/// How well an author string on a paper fits a known user name.
///
/// `Exact` needs equal surname keys and equal dumbed-down first given names;
/// `InitialCompatible` needs equal surname keys and equal first initials.
/// Anything unparseable is simply `Incompatible`.
pub fn name_compatibility(user: &ParsedName, author_string: &str) -> Compatibility {
    let Ok(other) = parse_author_string(author_string) else {
        return Compatibility::Incompatible;
    };
    let (Ok(ours), Ok(theirs)) = (
        dumbdown_surname(user.surname()),
        dumbdown_surname(other.surname()),
    ) else {
        return Compatibility::Incompatible;
    };
    if ours != theirs {
        return Compatibility::Incompatible;
    }
    if let (Some(a), Some(b)) = (user.given(), other.given()) {
        if ascii_letters(a).eq(ascii_letters(b)) {
            return Compatibility::Exact;
        }
    }
    match (user.first_initial(), other.first_initial()) {
        (Some(a), Some(b)) if a == b => Compatibility::InitialCompatible,
        _ => Compatibility::Incompatible,
    }
}
