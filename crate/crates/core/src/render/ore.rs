//! OAI-ORE resource maps for author aggregations.
//!
//! The resource map `{author_uri}.rdf` describes an aggregation whose URI is
//! the author URI itself. The aggregation aggregates each paper, carries the
//! author's names, and points at identities in other schemes with
//! `ore:similarTo`. A foreign identity that is a URI is the object directly.
//! One that is only a string hangs off a blank node:
//!
//! ```text
//! <agg> ore:similarTo _:id1 .
//! _:id1 rdf:value "A-1637-2009" .
//! _:id1 dcterms:conformsTo "researcherid" .
//! ```

use std::collections::BTreeSet;
use std::fmt::{self, Write};

use super::{escape_xml, media, Representation, Suffix};
use crate::minting::MintPolicy;
use crate::store::{AuthorRecord, PaperRecord};

pub const ORE_NS: &str = "http://www.openarchives.org/ore/terms/";
pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const FOAF_NS: &str = "http://xmlns.com/foaf/0.1/";
pub const DCTERMS_NS: &str = "http://purl.org/dc/terms/";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(String),
    Blank(String),
    Literal(String),
}

impl fmt::Display for Term {
    /// N-Triples syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::Blank(label) => write!(f, "_:{label}"),
            Term::Literal(value) => {
                f.write_char('"')?;
                for c in value.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\r' => f.write_str("\\r")?,
                        '\t' => f.write_str("\\t")?,
                        '\u{8}' => f.write_str("\\b")?,
                        '\u{c}' => f.write_str("\\f")?,
                        c if (c as u32) < 0x20 || c == '\u{7f}' => {
                            write!(f, "\\u{:04X}", c as u32)?
                        }
                        c => f.write_char(c)?,
                    }
                }
                f.write_char('"')
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Term,
    pub predicate: String,
    pub object: Term,
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <{}> {} .", self.subject, self.predicate, self.object)
    }
}

/// The resource-map triples, in generation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OreGraph {
    resource_map: String,
    aggregation: String,
    triples: Vec<Triple>,
}

impl OreGraph {
    pub fn resource_map(&self) -> &str {
        &self.resource_map
    }

    pub fn aggregation(&self) -> &str {
        &self.aggregation
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn with_predicate<'a>(
        &'a self,
        predicate: &'a str,
    ) -> impl Iterator<Item = &'a Triple> + 'a {
        self.triples
            .iter()
            .filter(move |t| t.predicate == predicate)
    }

    /// Canonical N-Triples: blank nodes are already labelled `id1`, `id2`, …
    /// in first-use order; lines are deduplicated and sorted bytewise.
    pub fn to_ntriples(&self) -> String {
        let lines: BTreeSet<String> = self.triples.iter().map(Triple::to_string).collect();
        let mut out = String::new();
        for line in lines {
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    fn push(&mut self, subject: Term, predicate: String, object: Term) {
        self.triples.push(Triple {
            subject,
            predicate,
            object,
        });
    }
}

pub struct OreRendering {
    pub graph: OreGraph,
    pub ntriples: Representation,
    pub rdfxml: Representation,
}

fn ore(term: &str) -> String {
    format!("{ORE_NS}{term}")
}

fn rdf(term: &str) -> String {
    format!("{RDF_NS}{term}")
}

/// A string-valued identity attached through a blank node.
struct BlankIdentity<'a> {
    label: String,
    value: &'a str,
    scheme: &'static str,
}

pub fn render_ore(
    author: &AuthorRecord,
    papers: &[&PaperRecord],
    policy: &MintPolicy,
) -> OreRendering {
    let agg = format!("{}/a/{}", policy.base_url(), author.author_id);
    let rem = format!("{agg}.rdf");
    let names: Vec<&str> = std::iter::once(author.display_name.as_str())
        .chain(author.alt_names.iter().map(String::as_str))
        .collect();
    let paper_uris: Vec<String> = papers
        .iter()
        .map(|p| policy.paper_uri(&p.paper_id))
        .collect();

    let mut direct = Vec::new();
    let mut blanks = Vec::new();
    for id in &author.foreign_ids {
        if id.is_uri() {
            direct.push(id.value());
        } else {
            blanks.push(BlankIdentity {
                label: format!("id{}", blanks.len() + 1),
                value: id.value(),
                scheme: id.scheme().as_str(),
            });
        }
    }

    let mut graph = OreGraph {
        resource_map: rem.clone(),
        aggregation: agg.clone(),
        triples: Vec::new(),
    };
    let agg_term = || Term::Iri(agg.clone());
    graph.push(
        Term::Iri(rem.clone()),
        rdf("type"),
        Term::Iri(ore("ResourceMap")),
    );
    graph.push(Term::Iri(rem.clone()), ore("describes"), agg_term());
    graph.push(agg_term(), rdf("type"), Term::Iri(ore("Aggregation")));
    for name in &names {
        graph.push(
            agg_term(),
            format!("{FOAF_NS}name"),
            Term::Literal(name.to_string()),
        );
    }
    for uri in &paper_uris {
        graph.push(agg_term(), ore("aggregates"), Term::Iri(uri.clone()));
    }
    for uri in &direct {
        graph.push(agg_term(), ore("similarTo"), Term::Iri(uri.to_string()));
    }
    for blank in &blanks {
        let node = || Term::Blank(blank.label.clone());
        graph.push(agg_term(), ore("similarTo"), node());
        graph.push(node(), rdf("value"), Term::Literal(blank.value.to_string()));
        graph.push(
            node(),
            format!("{DCTERMS_NS}conformsTo"),
            Term::Literal(blank.scheme.to_string()),
        );
    }

    let ntriples = Representation {
        media_type: media::N_TRIPLES,
        suffix: Suffix::Rdf,
        body: graph.to_ntriples().into_bytes(),
    };

    let mut xml = String::new();
    xml.push_str("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n");
    let _ = writeln!(
        xml,
        "<rdf:RDF xmlns:rdf=\"{RDF_NS}\"\n         xmlns:ore=\"{ORE_NS}\"\n         \
         xmlns:foaf=\"{FOAF_NS}\"\n         xmlns:dcterms=\"{DCTERMS_NS}\">"
    );
    let _ = writeln!(
        xml,
        "  <ore:ResourceMap rdf:about=\"{}\">",
        escape_xml(&rem)
    );
    let _ = writeln!(
        xml,
        "    <ore:describes rdf:resource=\"{}\"/>",
        escape_xml(&agg)
    );
    xml.push_str("  </ore:ResourceMap>\n");
    let _ = writeln!(
        xml,
        "  <ore:Aggregation rdf:about=\"{}\">",
        escape_xml(&agg)
    );
    for name in &names {
        let _ = writeln!(xml, "    <foaf:name>{}</foaf:name>", escape_xml(name));
    }
    for uri in &paper_uris {
        let _ = writeln!(
            xml,
            "    <ore:aggregates rdf:resource=\"{}\"/>",
            escape_xml(uri)
        );
    }
    for uri in &direct {
        let _ = writeln!(
            xml,
            "    <ore:similarTo rdf:resource=\"{}\"/>",
            escape_xml(uri)
        );
    }
    for blank in &blanks {
        let _ = writeln!(xml, "    <ore:similarTo rdf:nodeID=\"{}\"/>", blank.label);
    }
    xml.push_str("  </ore:Aggregation>\n");
    for blank in &blanks {
        let _ = writeln!(xml, "  <rdf:Description rdf:nodeID=\"{}\">", blank.label);
        let _ = writeln!(
            xml,
            "    <rdf:value>{}</rdf:value>",
            escape_xml(blank.value)
        );
        let _ = writeln!(
            xml,
            "    <dcterms:conformsTo>{}</dcterms:conformsTo>",
            blank.scheme
        );
        xml.push_str("  </rdf:Description>\n");
    }
    xml.push_str("</rdf:RDF>\n");
    let rdfxml = Representation {
        media_type: media::RDF_XML,
        suffix: Suffix::Rdf,
        body: xml.into_bytes(),
    };

    OreRendering {
        graph,
        ntriples,
        rdfxml,
    }
}
