//! Publication graphs and joining them across repositories.
//!
//! Each repository contributes author and paper nodes linked by authorship
//! edges. Identity assertions (`sameAs`) state that two nodes of the same
//! kind in different repositories denote the same entity. Merging is
//! logical: the node set is the plain union, and assertions induce identity
//! classes through a union-find. Components are taken under "shares an
//! authorship edge or an identity class".

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::store::ReadView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Author,
    Paper,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Author => "author",
            NodeKind::Paper => "paper",
        })
    }
}

/// A node, ordered by `(repo, kind, local_id)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Node {
    pub repo: String,
    pub kind: NodeKind,
    pub local_id: String,
}

impl Node {
    pub fn new(repo: &str, kind: NodeKind, local_id: &str) -> Self {
        Node {
            repo: repo.to_string(),
            kind,
            local_id: local_id.to_string(),
        }
    }

    pub fn author(repo: &str, local_id: &str) -> Self {
        Node::new(repo, NodeKind::Author, local_id)
    }

    pub fn paper(repo: &str, local_id: &str) -> Self {
        Node::new(repo, NodeKind::Paper, local_id)
    }
}

impl fmt::Display for Node {
    /// `repo:kind:local_id`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.repo, self.kind, self.local_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IdentityAssertion {
    pub left: Node,
    pub right: Node,
    pub source: String,
}

impl IdentityAssertion {
    pub fn new(left: Node, right: Node, source: &str) -> Result<Self> {
        if left.kind != right.kind {
            return Err(Error::invalid(
                "assertion",
                format!("{left} and {right} are of different kinds"),
            ));
        }
        if left == right {
            return Err(Error::invalid(
                "assertion",
                format!("{left} asserted equal to itself"),
            ));
        }
        Ok(IdentityAssertion {
            left,
            right,
            source: source.to_string(),
        })
    }

    fn unordered(&self) -> (&Node, &Node) {
        if self.left <= self.right {
            (&self.left, &self.right)
        } else {
            (&self.right, &self.left)
        }
    }
}

/// Disjoint sets over `0..n` with union by rank and path halving.
#[derive(Debug, Clone)]
struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Author/paper nodes, authorship edges and identity assertions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PubGraph {
    nodes: BTreeSet<Node>,
    edges: BTreeSet<(Node, Node)>,
    assertions: BTreeMap<(Node, Node), String>,
}

impl PubGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, node: Node) {
        self.nodes.insert(node);
    }

    /// Adds an authorship edge; both endpoints must already be members.
    pub fn add_edge(&mut self, author: Node, paper: Node) -> Result<()> {
        if author.kind != NodeKind::Author || paper.kind != NodeKind::Paper {
            return Err(Error::invalid(
                "edge",
                format!("{author} -> {paper} is not author -> paper"),
            ));
        }
        for node in [&author, &paper] {
            if !self.nodes.contains(node) {
                return Err(Error::invalid(
                    "edge",
                    format!("{node} is not in the graph"),
                ));
            }
        }
        self.edges.insert((author, paper));
        Ok(())
    }

    /// Adds a sameAs assertion between member nodes of distinct repositories.
    /// Re-asserting a pair (in either direction) keeps the first source.
    pub fn add_assertion(&mut self, assertion: IdentityAssertion) -> Result<()> {
        for node in [&assertion.left, &assertion.right] {
            if !self.nodes.contains(node) {
                return Err(Error::invalid(
                    "assertion",
                    format!("{node} is not in the graph"),
                ));
            }
        }
        if assertion.left.repo == assertion.right.repo {
            return Err(Error::invalid(
                "assertion",
                format!(
                    "{} and {} are in the same repository",
                    assertion.left, assertion.right
                ),
            ));
        }
        let (a, b) = assertion.unordered();
        let key = (a.clone(), b.clone());
        self.assertions.entry(key).or_insert(assertion.source);
        Ok(())
    }

    pub fn nodes(&self) -> &BTreeSet<Node> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<(Node, Node)> {
        &self.edges
    }

    /// Assertions with endpoints in ascending order.
    pub fn assertions(&self) -> impl Iterator<Item = IdentityAssertion> + '_ {
        self.assertions
            .iter()
            .map(|((l, r), source)| IdentityAssertion {
                left: l.clone(),
                right: r.clone(),
                source: source.clone(),
            })
    }

    fn indexed(&self) -> (Vec<&Node>, HashMap<&Node, usize>) {
        let nodes: Vec<&Node> = self.nodes.iter().collect();
        let index = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        (nodes, index)
    }

    fn partition<'a>(
        &'a self,
        links: impl Iterator<Item = (&'a Node, &'a Node)>,
    ) -> (Vec<&'a Node>, UnionFind) {
        let (nodes, index) = self.indexed();
        let mut sets = UnionFind::new(nodes.len());
        for (a, b) in links {
            sets.union(index[a], index[b]);
        }
        (nodes, sets)
    }

    /// Maps every node to the least node of its identity class.
    pub fn identity_classes(&self) -> BTreeMap<Node, Node> {
        let (nodes, sets) = self.partition(self.assertions.keys().map(|(a, b)| (a, b)));
        label_by_least(&nodes, sets)
    }
}

/// Maps each node to the least member of its set. `nodes` is ascending, so
/// the first member seen for a root is the least.
fn label_by_least(nodes: &[&Node], mut sets: UnionFind) -> BTreeMap<Node, Node> {
    let mut least: HashMap<usize, usize> = HashMap::new();
    let mut out = BTreeMap::new();
    for (i, node) in nodes.iter().enumerate() {
        let root = sets.find(i);
        let label = *least.entry(root).or_insert(i);
        out.insert((*node).clone(), nodes[label].clone());
    }
    out
}

/// One author node per author record, one paper node per paper, and one edge
/// per accepted authorship claim by a user who owns an author record.
pub fn build_graph(view: &ReadView, repo: &str) -> PubGraph {
    let mut graph = PubGraph::new();
    for author in view.authors() {
        graph.add_node(Node::author(repo, &author.author_id));
    }
    for paper in view.papers() {
        graph.add_node(Node::paper(repo, &paper.paper_id));
    }
    for claim in view.claims().filter(|c| c.is_accepted_authorship()) {
        if let Some(author) = view.author_for_owner(&claim.user_id) {
            graph
                .add_edge(
                    Node::author(repo, &author.author_id),
                    Node::paper(repo, &claim.paper_id),
                )
                .expect("store keeps claims referentially intact");
        }
    }
    graph
}

/// Union of two graphs plus identity assertions between them.
pub fn merge_graphs(
    left: &PubGraph,
    right: &PubGraph,
    assertions: impl IntoIterator<Item = IdentityAssertion>,
) -> Result<PubGraph> {
    let mut merged = left.clone();
    merged.nodes.extend(right.nodes.iter().cloned());
    merged.edges.extend(right.edges.iter().cloned());
    for assertion in right.assertions() {
        merged.add_assertion(assertion)?;
    }
    for assertion in assertions {
        merged.add_assertion(assertion)?;
    }
    Ok(merged)
}

/// A connected component, labeled by its least member.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Component {
    pub label: Node,
    /// Ascending.
    pub members: Vec<Node>,
}

/// Components under authorship edges and identity classes, sorted by label.
pub fn connected_components(graph: &PubGraph) -> Vec<Component> {
    let links = graph
        .edges
        .iter()
        .map(|(a, p)| (a, p))
        .chain(graph.assertions.keys().map(|(a, b)| (a, b)));
    let (nodes, sets) = graph.partition(links);
    let mut grouped: BTreeMap<Node, Vec<Node>> = BTreeMap::new();
    for (node, label) in label_by_least(&nodes, sets) {
        grouped.entry(label).or_default().push(node);
    }
    grouped
        .into_iter()
        .map(|(label, members)| Component { label, members })
        .collect()
}

/// Unordered pairs of author identity classes sharing at least one paper
/// class. Each class is named by its least node; pairs are `(lesser, greater)`.
pub fn coauthor_edges(graph: &PubGraph) -> BTreeSet<(Node, Node)> {
    let classes = graph.identity_classes();
    let mut authors_by_paper: BTreeMap<&Node, BTreeSet<&Node>> = BTreeMap::new();
    for (author, paper) in &graph.edges {
        authors_by_paper
            .entry(&classes[paper])
            .or_default()
            .insert(&classes[author]);
    }
    let mut pairs = BTreeSet::new();
    for authors in authors_by_paper.values() {
        let authors: Vec<&Node> = authors.iter().copied().collect();
        for (i, a) in authors.iter().enumerate() {
            for b in &authors[i + 1..] {
                pairs.insert(((*a).clone(), (*b).clone()));
            }
        }
    }
    pairs
}

/// Lowercases, replaces punctuation with nothing and collapses whitespace.
pub fn normalize_title(title: &str) -> String {
    let kept: String = title
        .chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .flat_map(char::to_lowercase)
        .collect();
    kept.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// A snapshot tagged with the repository label its nodes should carry.
#[derive(Debug, Clone, Copy)]
pub struct RepoView<'a> {
    pub repo: &'a str,
    pub view: &'a ReadView,
}

pub const TITLE_MATCH_SOURCE: &str = "title-match";

/// Candidate sameAs assertions for every cross-repository paper pair with
/// equal normalized titles, sorted by `(left id, right id)`.
pub fn dedup_papers(left: RepoView<'_>, right: RepoView<'_>) -> Vec<IdentityAssertion> {
    let mut by_title: HashMap<String, Vec<&str>> = HashMap::new();
    for paper in right.view.papers() {
        let title = normalize_title(&paper.title);
        if !title.is_empty() {
            by_title.entry(title).or_default().push(&paper.paper_id);
        }
    }
    let mut out = Vec::new();
    for paper in left.view.papers() {
        let Some(matches) = by_title.get(&normalize_title(&paper.title)) else {
            continue;
        };
        for right_id in matches {
            out.push(IdentityAssertion {
                left: Node::paper(left.repo, &paper.paper_id),
                right: Node::paper(right.repo, right_id),
                source: TITLE_MATCH_SOURCE.to_string(),
            });
        }
    }
    out.sort_by(|a, b| {
        (&a.left.local_id, &a.right.local_id).cmp(&(&b.left.local_id, &b.right.local_id))
    });
    out
}

/// One line of an assertions file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssertionLine {
    pub left_repo: String,
    pub left_kind: NodeKind,
    pub left_id: String,
    pub right_repo: String,
    pub right_kind: NodeKind,
    pub right_id: String,
    #[serde(default)]
    pub source: String,
}

impl AssertionLine {
    pub fn into_assertion(self) -> Result<IdentityAssertion> {
        IdentityAssertion::new(
            Node::new(&self.left_repo, self.left_kind, &self.left_id),
            Node::new(&self.right_repo, self.right_kind, &self.right_id),
            &self.source,
        )
    }
}

impl From<&IdentityAssertion> for AssertionLine {
    fn from(a: &IdentityAssertion) -> Self {
        AssertionLine {
            left_repo: a.left.repo.clone(),
            left_kind: a.left.kind,
            left_id: a.left.local_id.clone(),
            right_repo: a.right.repo.clone(),
            right_kind: a.right.kind,
            right_id: a.right.local_id.clone(),
            source: a.source.clone(),
        }
    }
}

pub fn read_assertions(path: impl AsRef<Path>) -> Result<Vec<IdentityAssertion>> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let reader = BufReader::new(File::open(path).map_err(io_err)?);
    let mut out = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<AssertionLine>(&line)
            .map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: index + 1,
                message: e.to_string(),
            })?
            .into_assertion()
            .map_err(|e| Error::AtLine {
                path: path.to_path_buf(),
                line: index + 1,
                source: Box::new(e),
            })?;
        out.push(parsed);
    }
    Ok(out)
}

/// `{"component_label": ..., "members": [...]}` as written by `join`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentLine {
    pub component_label: String,
    pub members: Vec<String>,
}

impl From<&Component> for ComponentLine {
    fn from(c: &Component) -> Self {
        ComponentLine {
            component_label: c.label.to_string(),
            members: c.members.iter().map(Node::to_string).collect(),
        }
    }
}
