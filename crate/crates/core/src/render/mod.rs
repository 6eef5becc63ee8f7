//! Serializers for the three representations of an author URI.
//!
//! All renderers are pure and byte-deterministic: the same author, paper
//! list and policy (plus `generated_at` for Atom) always give the same bytes.
//! Paper lists are expected in the order [`ReadView::papers_for_author`]
//! returns them.
//!
//! [`ReadView::papers_for_author`]: crate::store::ReadView::papers_for_author

mod atom;
mod html;
mod ore;

use std::fmt;
use std::str::FromStr;

pub use atom::render_atom;
pub use html::render_html;
pub use ore::{render_ore, OreGraph, OreRendering, Term, Triple};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suffix {
    Html,
    Atom,
    Rdf,
}

impl Suffix {
    pub const ALL: [Suffix; 3] = [Suffix::Html, Suffix::Atom, Suffix::Rdf];

    pub fn as_str(self) -> &'static str {
        match self {
            Suffix::Html => "html",
            Suffix::Atom => "atom",
            Suffix::Rdf => "rdf",
        }
    }

    /// The media type served for this suffix.
    pub fn media_type(self) -> &'static str {
        match self {
            Suffix::Html => media::HTML,
            Suffix::Atom => media::ATOM,
            Suffix::Rdf => media::RDF_XML,
        }
    }
}

impl fmt::Display for Suffix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suffix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Suffix::ALL
            .into_iter()
            .find(|suffix| suffix.as_str() == s)
            .ok_or_else(|| Error::not_found("representation", s))
    }
}

pub mod media {
    pub const HTML: &str = "text/html";
    pub const ATOM: &str = "application/atom+xml";
    pub const RDF_XML: &str = "application/rdf+xml";
    pub const N_TRIPLES: &str = "application/n-triples";
}

/// A rendered document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    pub media_type: &'static str,
    pub suffix: Suffix,
    pub body: Vec<u8>,
}

impl Representation {
    /// Value for an HTTP `Content-Type` header.
    pub fn content_type(&self) -> String {
        if self.media_type == media::HTML {
            format!("{}; charset=utf-8", self.media_type)
        } else {
            self.media_type.to_string()
        }
    }

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.body).expect("renderers emit UTF-8")
    }
}

/// Escapes text for XML/HTML content and attribute values. Characters that
/// XML 1.0 forbids outright are dropped.
pub(crate) fn escape_xml(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            '\t' | '\n' | '\r' => out.push(c),
            c if (c as u32) < 0x20 || matches!(c, '\u{FFFE}' | '\u{FFFF}') => {}
            c => out.push(c),
        }
    }
    out
}
