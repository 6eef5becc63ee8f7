//! Shared fixtures and independent oracles for the integration suites.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use authorid::{
    AuthorRecord, IdentityAssertion, Node, OwnershipClaim, PaperRecord, PubGraph, Scheme, Store,
    Timestamp, UserRecord,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn ts(text: &str) -> Timestamp {
    Timestamp::parse(text).unwrap()
}

pub fn user(id: &str, last: &str, first: &str, emails: &[&str]) -> UserRecord {
    UserRecord {
        user_id: id.into(),
        last_name: last.into(),
        first_name: first.into(),
        emails: emails.iter().map(|e| e.to_string()).collect(),
    }
}

pub fn paper(id: &str, title: &str, authors: &[&str], updated: &str) -> PaperRecord {
    PaperRecord {
        paper_id: id.into(),
        title: title.into(),
        abstract_text: format!("Abstract of {title}."),
        author_strings: authors.iter().map(|a| a.to_string()).collect(),
        submitter_user_id: None,
        submitter_email: None,
        published: ts("2008-01-01T00:00:00Z"),
        updated: ts(updated),
        categories: vec!["cs.DL".into()],
    }
}

pub fn accepted_claim(user: &str, paper: &str) -> OwnershipClaim {
    OwnershipClaim {
        user_id: user.into(),
        paper_id: paper.into(),
        asserts_authorship: true,
        provenance: authorid::Provenance::UserClaim,
        status: authorid::ClaimStatus::AutoAccepted,
        timestamp: ts("2009-06-01T00:00:00Z"),
    }
}

pub const COMMON_SURNAMES: [&str; 10] = [
    "Zhang", "Lee", "Wang", "Chen", "Kim", "Liu", "Li", "Smith", "Müller", "García",
];

const SYLLABLES: [&str; 24] = [
    "ka", "lo", "mi", "ra", "ten", "vu", "bor", "sel", "qui", "an", "dro", "fe", "gu", "hal", "jo",
    "nor", "pe", "stra", "ul", "wy", "xe", "zan", "ost", "ier",
];

/// A surname unlikely to repeat: three to four random syllables.
pub fn rare_surname(rng: &mut impl Rng) -> String {
    let n = rng.gen_range(3..=4);
    let mut s: String = (0..n).map(|_| *SYLLABLES.choose(rng).unwrap()).collect();
    s[..1].make_ascii_uppercase();
    s
}

pub fn given_name(rng: &mut impl Rng) -> String {
    let initial = (b'A' + rng.gen_range(0..26u8)) as char;
    if rng.gen_bool(0.3) {
        initial.to_string()
    } else {
        format!("{initial}{}", SYLLABLES.choose(rng).unwrap())
    }
}

/// `n` users; roughly `common_share` of them take a surname from a short
/// list, so blocking keys collide the way large repositories see.
pub fn synthetic_users(n: usize, common_share: f64, rng: &mut impl Rng) -> Vec<UserRecord> {
    (0..n)
        .map(|i| {
            let last = if rng.gen_bool(common_share) {
                COMMON_SURNAMES.choose(rng).unwrap().to_string()
            } else {
                rare_surname(rng)
            };
            let first = given_name(rng);
            UserRecord {
                user_id: format!("u{i:05}"),
                last_name: last,
                first_name: first,
                emails: vec![format!("user{i}@example.org")],
            }
        })
        .collect()
}

/// Text with markup-significant and non-ASCII characters mixed in.
pub fn awkward_text(rng: &mut impl Rng, words: usize) -> String {
    const WORDS: [&str; 14] = [
        "graph",
        "<b>",
        "&amp;",
        "\"quoted\"",
        "it's",
        "Müller",
        "δ-function",
        "a<b",
        "x>y",
        "naïve",
        "R&D",
        "100%",
        "日本",
        "spin",
    ];
    (0..words)
        .map(|_| *WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Components by breadth-first search over edges and assertion pairs,
/// ignoring union-find entirely.
pub fn bfs_components(
    nodes: &BTreeSet<Node>,
    edges: &[(Node, Node)],
    assertions: &[(Node, Node)],
) -> BTreeSet<BTreeSet<Node>> {
    let mut adjacency: BTreeMap<&Node, Vec<&Node>> = nodes.iter().map(|n| (n, vec![])).collect();
    for (a, b) in edges.iter().chain(assertions) {
        adjacency.get_mut(a).unwrap().push(b);
        adjacency.get_mut(b).unwrap().push(a);
    }
    let mut seen: BTreeSet<&Node> = BTreeSet::new();
    let mut out = BTreeSet::new();
    for start in nodes {
        if !seen.insert(start) {
            continue;
        }
        let mut component = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while let Some(n) = queue.pop_front() {
            for next in &adjacency[n] {
                if seen.insert(next) {
                    component.insert((*next).clone());
                    queue.push_back(next);
                }
            }
        }
        out.insert(component);
    }
    out
}

pub fn partition_of(components: &[authorid::Component]) -> BTreeSet<BTreeSet<Node>> {
    components
        .iter()
        .map(|c| c.members.iter().cloned().collect())
        .collect()
}

/// A random repository graph with `authors + papers` nodes.
pub fn random_repo_graph(
    repo: &str,
    authors: usize,
    papers: usize,
    edge_density: f64,
    rng: &mut impl Rng,
) -> (PubGraph, Vec<(Node, Node)>) {
    let mut g = PubGraph::new();
    let author_nodes: Vec<Node> = (0..authors)
        .map(|i| Node::author(repo, &format!("a{i}")))
        .collect();
    let paper_nodes: Vec<Node> = (0..papers)
        .map(|i| Node::paper(repo, &format!("p{i}")))
        .collect();
    for n in author_nodes.iter().chain(&paper_nodes) {
        g.add_node(n.clone());
    }
    let mut edges = Vec::new();
    for a in &author_nodes {
        for p in &paper_nodes {
            if rng.gen_bool(edge_density) {
                g.add_edge(a.clone(), p.clone()).unwrap();
                edges.push((a.clone(), p.clone()));
            }
        }
    }
    (g, edges)
}

/// Random same-kind cross-repository assertions.
pub fn random_assertions(
    left: &PubGraph,
    right: &PubGraph,
    count: usize,
    rng: &mut impl Rng,
) -> Vec<IdentityAssertion> {
    let l: Vec<&Node> = left.nodes().iter().collect();
    let r: Vec<&Node> = right.nodes().iter().collect();
    let mut out = Vec::new();
    if l.is_empty() || r.is_empty() {
        return out;
    }
    let mut attempts = 0;
    while out.len() < count && attempts < count * 20 {
        attempts += 1;
        let a = *l.choose(rng).unwrap();
        let b = *r.choose(rng).unwrap();
        if a.kind == b.kind {
            out.push(IdentityAssertion::new(a.clone(), b.clone(), "random").unwrap());
        }
    }
    out
}

/// Smallest two-repository join that shows components merging.
///
/// Repository 1: A1–P1, A2–P1, A2–P2, A3–P3 (components {A1,A2,P1,P2}, {A3,P3}).
/// Repository 2: A4–P4, A5–P5, A5–P6 (components {A4,P4}, {A5,P5,P6}).
pub fn two_repo_join() -> (PubGraph, PubGraph, Vec<IdentityAssertion>) {
    let mut g1 = PubGraph::new();
    for n in ["A1", "A2", "A3"] {
        g1.add_node(Node::author("repo1", n));
    }
    for n in ["P1", "P2", "P3"] {
        g1.add_node(Node::paper("repo1", n));
    }
    for (a, p) in [("A1", "P1"), ("A2", "P1"), ("A2", "P2"), ("A3", "P3")] {
        g1.add_edge(Node::author("repo1", a), Node::paper("repo1", p))
            .unwrap();
    }
    let mut g2 = PubGraph::new();
    for n in ["A4", "A5"] {
        g2.add_node(Node::author("repo2", n));
    }
    for n in ["P4", "P5", "P6"] {
        g2.add_node(Node::paper("repo2", n));
    }
    for (a, p) in [("A4", "P4"), ("A5", "P5"), ("A5", "P6")] {
        g2.add_edge(Node::author("repo2", a), Node::paper("repo2", p))
            .unwrap();
    }
    let assertions = vec![
        IdentityAssertion::new(
            Node::author("repo1", "A2"),
            Node::author("repo2", "A4"),
            "asserted",
        )
        .unwrap(),
        IdentityAssertion::new(
            Node::author("repo1", "A3"),
            Node::author("repo2", "A5"),
            "asserted",
        )
        .unwrap(),
    ];
    (g1, g2, assertions)
}

pub fn graph_edges(g: &PubGraph) -> Vec<(Node, Node)> {
    g.edges().iter().cloned().collect()
}

pub fn assertion_pairs(assertions: &[IdentityAssertion]) -> Vec<(Node, Node)> {
    assertions
        .iter()
        .map(|a| (a.left.clone(), a.right.clone()))
        .collect()
}

/// Parsed view of an Atom feed, produced by [`check_atom`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomFeed {
    pub id: String,
    pub title: String,
    pub updated: String,
    pub entries: Vec<AtomEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomEntry {
    pub id: String,
    pub title: String,
    pub summary: String,
    pub authors: Vec<String>,
    pub published: String,
    pub updated: String,
    pub alternate: String,
    pub categories: Vec<String>,
}

const ATOM: &str = "http://www.w3.org/2005/Atom";

fn is_absolute_iri(s: &str) -> bool {
    let Some((scheme, rest)) = s.split_once(':') else {
        return false;
    };
    !rest.is_empty()
        && scheme
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic())
        && scheme
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

fn is_atom_date(s: &str) -> bool {
    chrono::DateTime::parse_from_rfc3339(s).is_ok()
}

fn atom_children<'a, 'i>(
    node: roxmltree::Node<'a, 'i>,
    name: &'a str,
) -> impl Iterator<Item = roxmltree::Node<'a, 'i>> + 'a {
    node.children().filter(move |c| {
        c.is_element() && c.tag_name().namespace() == Some(ATOM) && c.tag_name().name() == name
    })
}

fn exactly_one<'a, 'i>(node: roxmltree::Node<'a, 'i>, name: &'a str) -> Result<String, String> {
    let found: Vec<_> = atom_children(node, name).collect();
    if found.len() != 1 {
        return Err(format!("expected one atom:{name}, found {}", found.len()));
    }
    Ok(found[0].text().unwrap_or_default().to_string())
}

fn person_names(node: roxmltree::Node<'_, '_>) -> Result<Vec<String>, String> {
    atom_children(node, "author")
        .map(|a| exactly_one(a, "name"))
        .collect()
}

/// Checks the RFC 4287 rules this crate's feeds must satisfy and extracts
/// their fields. Written against roxmltree only, so it shares nothing with
/// the renderer.
pub fn check_atom(xml: &str) -> Result<AtomFeed, String> {
    let doc = roxmltree::Document::parse(xml).map_err(|e| format!("not well-formed: {e}"))?;
    let feed = doc.root_element();
    if feed.tag_name().namespace() != Some(ATOM) || feed.tag_name().name() != "feed" {
        return Err("root is not atom:feed".into());
    }
    let id = exactly_one(feed, "id")?;
    let title = exactly_one(feed, "title")?;
    let updated = exactly_one(feed, "updated")?;
    if !is_absolute_iri(&id) {
        return Err(format!("feed id {id:?} is not an absolute IRI"));
    }
    if !is_atom_date(&updated) {
        return Err(format!("feed updated {updated:?} is not an RFC 3339 date"));
    }
    let feed_has_author = !person_names(feed)?.is_empty();
    for link in atom_children(feed, "link") {
        if link.attribute("href").is_none() {
            return Err("feed link without href".into());
        }
    }

    let mut entries = Vec::new();
    for entry in atom_children(feed, "entry") {
        let id = exactly_one(entry, "id")?;
        if !is_absolute_iri(&id) {
            return Err(format!("entry id {id:?} is not an absolute IRI"));
        }
        let updated = exactly_one(entry, "updated")?;
        let published = exactly_one(entry, "published")?;
        if !is_atom_date(&updated) || !is_atom_date(&published) {
            return Err(format!("entry {id} has a malformed date"));
        }
        let authors = person_names(entry)?;
        if authors.is_empty() && !feed_has_author {
            return Err(format!("entry {id} has no author"));
        }
        let alternates: Vec<_> = atom_children(entry, "link")
            .filter(|l| l.attribute("rel").unwrap_or("alternate") == "alternate")
            .collect();
        if alternates.len() != 1 {
            return Err(format!(
                "entry {id} has {} alternate links",
                alternates.len()
            ));
        }
        entries.push(AtomEntry {
            title: exactly_one(entry, "title")?,
            summary: exactly_one(entry, "summary")?,
            alternate: alternates[0]
                .attribute("href")
                .ok_or("alternate link without href")?
                .to_string(),
            categories: atom_children(entry, "category")
                .map(|c| c.attribute("term").unwrap_or_default().to_string())
                .collect(),
            id,
            authors,
            published,
            updated,
        });
    }
    Ok(AtomFeed {
        id,
        title,
        updated,
        entries,
    })
}

/// A store with `users` random accounts, `papers` random papers and an
/// author record per user. Paper author lists mix account names (in varied
/// written forms), strangers and occasional large collaborations.
pub fn random_corpus(users: usize, papers: usize, rng: &mut impl Rng) -> Store {
    let mut store = Store::new();
    let accounts = synthetic_users(users, 0.5, rng);
    for u in &accounts {
        store.insert_user(u.clone()).unwrap();
    }
    for u in &accounts {
        let name = u.parsed_name().unwrap();
        authorid::mint_author_id(&mut store, &u.user_id, &name).unwrap();
    }
    for i in 0..papers {
        let n_authors = if rng.gen_bool(0.15) {
            rng.gen_range(11..40)
        } else {
            rng.gen_range(1..6)
        };
        let authors: Vec<String> = (0..n_authors)
            .map(|_| {
                if rng.gen_bool(0.6) {
                    let u = accounts.choose(rng).unwrap();
                    match rng.gen_range(0..3) {
                        0 => format!("{}, {}", u.last_name, u.first_name),
                        1 => format!("{}. {}", &u.first_name[..1], u.last_name),
                        _ => format!("{} {}", u.first_name, u.last_name),
                    }
                } else {
                    format!("{} {}", given_name(rng), rare_surname(rng))
                }
            })
            .collect();
        let submitter_email = rng
            .gen_bool(0.3)
            .then(|| accounts.choose(rng).unwrap().emails[0].clone());
        store
            .insert_paper(PaperRecord {
                paper_id: format!("{:04}.{:05}", 900 + i % 12, i),
                title: awkward_text(rng, 5),
                abstract_text: awkward_text(rng, 12),
                author_strings: authors,
                submitter_user_id: None,
                submitter_email,
                published: Timestamp::from_unix(1_230_768_000 + i as i64 * 3600),
                updated: Timestamp::from_unix(
                    1_230_768_000 + i as i64 * 3600 + rng.gen_range(0..9_000_000),
                ),
                categories: vec!["physics.gen-ph".into()],
            })
            .unwrap();
    }
    store
}

/// Resource-map example: Ang Lee, three papers, a DAI and a ResearcherID.
pub fn lee_resource_map() -> Store {
    let mut store = Store::new();
    store.insert_user(user("u2", "Lee", "Ang", &[])).unwrap();
    store
        .insert_author(AuthorRecord {
            author_id: "lee_a_1".into(),
            owner_user_id: "u2".into(),
            display_name: "Ang Lee".into(),
            alt_names: vec!["A. Lee".into()],
            foreign_ids: vec![],
        })
        .unwrap();
    store
        .register_foreign_identity("lee_a_1", Scheme::Dai, "info:eu-repo/dai/nl/304825271")
        .unwrap();
    store
        .register_foreign_identity("lee_a_1", Scheme::ResearcherId, "A-1637-2009")
        .unwrap();
    for (id, updated) in [
        ("0901.0001", "2009-01-05T00:00:00Z"),
        ("0901.0002", "2009-03-01T12:00:00Z"),
        ("0901.0003", "2009-04-20T08:30:00Z"),
    ] {
        store
            .insert_paper(paper(id, &format!("Paper {id}"), &["A. Lee"], updated))
            .unwrap();
        store.insert_claim(accepted_claim("u2", id)).unwrap();
    }
    store
}
