use std::fmt::Write;

use super::{escape_xml, media, Representation, Suffix};
use crate::minting::MintPolicy;
use crate::store::{AuthorRecord, PaperRecord};
use crate::time::Timestamp;

pub const ATOM_NS: &str = "http://www.w3.org/2005/Atom";

/// Atom 1.0 feed of an author's papers.
///
/// Feed-level `updated` is `generated_at`; everything else comes from the
/// records, so a fixed `generated_at` gives a byte-identical feed.
///
/// The entry profile (id, title, summary, authors, dates, alternate link,
/// categories) is a minimal reconstruction of a repository API entry, not a
/// copy of any published schema.
pub fn render_atom(
    author: &AuthorRecord,
    papers: &[&PaperRecord],
    policy: &MintPolicy,
    generated_at: Timestamp,
) -> Representation {
    let author_uri = format!("{}/a/{}", policy.base_url(), author.author_id);
    let name = escape_xml(&author.display_name);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n");
    let _ = writeln!(out, "<feed xmlns=\"{ATOM_NS}\">");
    let _ = writeln!(out, "  <id>{}</id>", escape_xml(&author_uri));
    let _ = writeln!(out, "  <title>Articles by {name}</title>");
    let _ = writeln!(out, "  <updated>{generated_at}</updated>");
    let _ = writeln!(out, "  <author><name>{name}</name></author>");
    let _ = writeln!(
        out,
        "  <link rel=\"self\" type=\"{}\" href=\"{}.atom\"/>",
        media::ATOM,
        escape_xml(&author_uri)
    );
    let _ = writeln!(
        out,
        "  <link rel=\"alternate\" type=\"{}\" href=\"{}.html\"/>",
        media::HTML,
        escape_xml(&author_uri)
    );
    for paper in papers {
        let abs = escape_xml(&policy.paper_uri(&paper.paper_id));
        out.push_str("  <entry>\n");
        let _ = writeln!(out, "    <id>{abs}</id>");
        let _ = writeln!(out, "    <title>{}</title>", escape_xml(&paper.title));
        let _ = writeln!(
            out,
            "    <summary>{}</summary>",
            escape_xml(&paper.abstract_text)
        );
        for author_string in &paper.author_strings {
            let _ = writeln!(
                out,
                "    <author><name>{}</name></author>",
                escape_xml(author_string)
            );
        }
        let _ = writeln!(out, "    <published>{}</published>", paper.published);
        let _ = writeln!(out, "    <updated>{}</updated>", paper.updated);
        let _ = writeln!(
            out,
            "    <link rel=\"alternate\" type=\"{}\" href=\"{abs}\"/>",
            media::HTML
        );
        for category in &paper.categories {
            let _ = writeln!(out, "    <category term=\"{}\"/>", escape_xml(category));
        }
        out.push_str("  </entry>\n");
    }
    out.push_str("</feed>\n");
    Representation {
        media_type: media::ATOM,
        suffix: Suffix::Atom,
        body: out.into_bytes(),
    }
}
