use std::fmt::Write;

use super::{escape_xml, media, Representation, Suffix};
use crate::minting::MintPolicy;
use crate::store::{AuthorRecord, PaperRecord};

/// HTML5 listing of an author's papers.
pub fn render_html(
    author: &AuthorRecord,
    papers: &[&PaperRecord],
    policy: &MintPolicy,
) -> Representation {
    let name = escape_xml(&author.display_name);
    let self_uri = escape_xml(&format!("{}/a/{}", policy.base_url(), author.author_id));
    let mut out = String::new();
    out.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\"/>\n");
    let _ = writeln!(out, "<title>Articles by {name}</title>");
    let _ = writeln!(
        out,
        "<link rel=\"alternate\" type=\"application/atom+xml\" href=\"{self_uri}.atom\"/>"
    );
    out.push_str("</head>\n<body>\n");
    let _ = writeln!(out, "<h1>Articles by {name}</h1>");
    if papers.is_empty() {
        out.push_str("<p class=\"empty\">No articles found.</p>\n");
    } else {
        out.push_str("<ol class=\"articles\">\n");
        for paper in papers {
            let href = escape_xml(&policy.paper_uri(&paper.paper_id));
            let authors = escape_xml(&paper.author_strings.join(", "));
            let _ = writeln!(
                out,
                "<li><a href=\"{href}\">{}</a>\n<div class=\"authors\">{authors}</div>\n\
                 <div class=\"updated\"><time datetime=\"{}\">{}</time></div></li>",
                escape_xml(&paper.title),
                paper.updated.to_rfc3339(),
                paper.updated.date(),
            );
        }
        out.push_str("</ol>\n");
    }
    out.push_str("</body>\n</html>\n");
    Representation {
        media_type: media::HTML,
        suffix: Suffix::Html,
        body: out.into_bytes(),
    }
}
