//! In-memory record store with JSON-Lines ingest and snapshot reads.
//!
//! A [`Store`] is the single writer. [`Store::snapshot`] hands out a
//! [`ReadView`], an immutable, `Send + Sync` view sharing the store's data
//! through an `Arc`. The next write copies the data if any view is still
//! alive, so a view never observes later writes.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::names::ParsedName;
use crate::time::Timestamp;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserRecord {
    pub user_id: String,
    pub last_name: String,
    pub first_name: String,
    #[serde(default)]
    pub emails: Vec<String>,
}

impl UserRecord {
    pub fn parsed_name(&self) -> Result<ParsedName> {
        ParsedName::from_parts(&self.last_name, &self.first_name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub paper_id: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    #[serde(rename = "authors")]
    pub author_strings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub submitter_user_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub submitter_email: Option<String>,
    pub published: Timestamp,
    pub updated: Timestamp,
    #[serde(default)]
    pub categories: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorRecord {
    pub author_id: String,
    pub owner_user_id: String,
    pub display_name: String,
    #[serde(default)]
    pub alt_names: Vec<String>,
    #[serde(default)]
    pub foreign_ids: Vec<ForeignIdentity>,
}

/// Identifier schemes a foreign identity may belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    OpenId,
    Isni,
    Scopus,
    ResearcherId,
    Dai,
    Repec,
    Other,
}

impl Scheme {
    pub const ALL: [Scheme; 7] = [
        Scheme::OpenId,
        Scheme::Isni,
        Scheme::Scopus,
        Scheme::ResearcherId,
        Scheme::Dai,
        Scheme::Repec,
        Scheme::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::OpenId => "openid",
            Scheme::Isni => "isni",
            Scheme::Scopus => "scopus",
            Scheme::ResearcherId => "researcherid",
            Scheme::Dai => "dai",
            Scheme::Repec => "repec",
            Scheme::Other => "other",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.as_str() == s)
            .ok_or_else(|| Error::invalid("scheme", format!("{s:?} is not a registered scheme")))
    }
}

/// An identifier for the same person under another scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawForeignIdentity", into = "RawForeignIdentity")]
pub struct ForeignIdentity {
    scheme: Scheme,
    value: String,
    is_uri: bool,
}

impl ForeignIdentity {
    pub fn new(scheme: Scheme, value: &str) -> Result<Self> {
        let value = value.trim();
        if value.is_empty() {
            return Err(Error::invalid("foreign identity", "empty value"));
        }
        Ok(ForeignIdentity {
            scheme,
            value: value.to_string(),
            is_uri: is_absolute_uri(value),
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn value(&self) -> &str {
        &self.value
    }

    /// True when the value can be used directly as a URI, e.g.
    /// `info:eu-repo/dai/nl/304825271` but not `A-1637-2009`.
    pub fn is_uri(&self) -> bool {
        self.is_uri
    }
}

fn is_absolute_uri(value: &str) -> bool {
    !value.chars().any(char::is_whitespace) && url::Url::parse(value).is_ok()
}

#[derive(Serialize, Deserialize)]
struct RawForeignIdentity {
    scheme: Scheme,
    value: String,
}

impl TryFrom<RawForeignIdentity> for ForeignIdentity {
    type Error = Error;

    fn try_from(raw: RawForeignIdentity) -> Result<Self> {
        ForeignIdentity::new(raw.scheme, &raw.value)
    }
}

impl From<ForeignIdentity> for RawForeignIdentity {
    fn from(id: ForeignIdentity) -> Self {
        RawForeignIdentity {
            scheme: id.scheme,
            value: id.value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Submission,
    EmailMatch,
    UserClaim,
    Admin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimStatus {
    AutoAccepted,
    Pending,
    Rejected,
}

impl ClaimStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ClaimStatus::AutoAccepted => "auto-accepted",
            ClaimStatus::Pending => "pending",
            ClaimStatus::Rejected => "rejected",
        }
    }
}

impl fmt::Display for ClaimStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClaimStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto-accepted" => Ok(ClaimStatus::AutoAccepted),
            "pending" => Ok(ClaimStatus::Pending),
            "rejected" => Ok(ClaimStatus::Rejected),
            _ => Err(Error::invalid("claim status", format!("{s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OwnershipClaim {
    pub user_id: String,
    pub paper_id: String,
    pub asserts_authorship: bool,
    pub provenance: Provenance,
    pub status: ClaimStatus,
    pub timestamp: Timestamp,
}

impl OwnershipClaim {
    /// Accepted authorship: the only kind that lists a paper under an author.
    pub fn is_accepted_authorship(&self) -> bool {
        self.asserts_authorship && self.status == ClaimStatus::AutoAccepted
    }
}

/// Splits `warner_s_1` into its stem `warner_s` and suffix `1`.
///
/// The stem is lowercase letters and underscores; the suffix a positive
/// integer without leading zeros.
pub fn split_author_id(id: &str) -> Option<(&str, u32)> {
    let (stem, suffix) = id.rsplit_once('_')?;
    let stem_ok = !stem.is_empty()
        && !stem.starts_with('_')
        && !stem.ends_with('_')
        && stem.bytes().all(|b| b.is_ascii_lowercase() || b == b'_');
    let suffix_ok = !suffix.is_empty()
        && !suffix.starts_with('0')
        && suffix.bytes().all(|b| b.is_ascii_digit());
    if !(stem_ok && suffix_ok) {
        return None;
    }
    Some((stem, suffix.parse().ok()?))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub users: usize,
    pub papers: usize,
    pub authors: usize,
    pub claims: usize,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct StoreData {
    users: BTreeMap<String, UserRecord>,
    papers: BTreeMap<String, PaperRecord>,
    authors: BTreeMap<String, AuthorRecord>,
    author_by_owner: HashMap<String, String>,
    claims: BTreeMap<(String, String), OwnershipClaim>,
    claims_by_paper: BTreeSet<(String, String)>,
    max_suffix: HashMap<String, u32>,
}

/// An immutable snapshot of the store.
#[derive(Debug, Clone, Default)]
pub struct ReadView {
    data: Arc<StoreData>,
}

impl ReadView {
    pub fn counts(&self) -> Counts {
        Counts {
            users: self.data.users.len(),
            papers: self.data.papers.len(),
            authors: self.data.authors.len(),
            claims: self.data.claims.len(),
        }
    }

    pub fn users(&self) -> impl Iterator<Item = &UserRecord> {
        self.data.users.values()
    }

    pub fn user(&self, user_id: &str) -> Option<&UserRecord> {
        self.data.users.get(user_id)
    }

    pub fn papers(&self) -> impl Iterator<Item = &PaperRecord> {
        self.data.papers.values()
    }

    pub fn paper(&self, paper_id: &str) -> Option<&PaperRecord> {
        self.data.papers.get(paper_id)
    }

    pub fn authors(&self) -> impl Iterator<Item = &AuthorRecord> {
        self.data.authors.values()
    }

    pub fn author(&self, author_id: &str) -> Option<&AuthorRecord> {
        self.data.authors.get(author_id)
    }

    pub fn author_for_owner(&self, user_id: &str) -> Option<&AuthorRecord> {
        let id = self.data.author_by_owner.get(user_id)?;
        self.data.authors.get(id)
    }

    /// Highest suffix minted so far under an id stem such as `lee_a`.
    pub fn max_suffix(&self, stem: &str) -> Option<u32> {
        self.data.max_suffix.get(stem).copied()
    }

    pub fn claims(&self) -> impl Iterator<Item = &OwnershipClaim> {
        self.data.claims.values()
    }

    pub fn claim(&self, user_id: &str, paper_id: &str) -> Option<&OwnershipClaim> {
        self.data
            .claims
            .get(&(user_id.to_string(), paper_id.to_string()))
    }

    pub fn claims_for_user<'a>(
        &'a self,
        user_id: &'a str,
    ) -> impl Iterator<Item = &'a OwnershipClaim> + 'a {
        self.data
            .claims
            .range((user_id.to_string(), String::new())..)
            .take_while(move |((user, _), _)| user == user_id)
            .map(|(_, claim)| claim)
    }

    pub fn claims_for_paper<'a>(
        &'a self,
        paper_id: &'a str,
    ) -> impl Iterator<Item = &'a OwnershipClaim> + 'a {
        self.data
            .claims_by_paper
            .range((paper_id.to_string(), String::new())..)
            .take_while(move |(paper, _)| paper == paper_id)
            .filter_map(|(paper, user)| self.data.claims.get(&(user.clone(), paper.clone())))
    }

    /// Papers listed under an author: those carrying an accepted authorship
    /// claim by the author's owning user, most recently updated first, ties
    /// broken by ascending paper id.
    pub fn papers_for_author(&self, author_id: &str) -> Result<Vec<&PaperRecord>> {
        let author = self
            .author(author_id)
            .ok_or_else(|| Error::not_found("author", author_id))?;
        let mut papers: Vec<&PaperRecord> = self
            .claims_for_user(&author.owner_user_id)
            .filter(|claim| claim.is_accepted_authorship())
            .filter_map(|claim| self.paper(&claim.paper_id))
            .collect();
        papers.sort_by(|a, b| {
            b.updated
                .cmp(&a.updated)
                .then_with(|| a.paper_id.cmp(&b.paper_id))
        });
        Ok(papers)
    }
}

/// Which JSON-Lines file a path holds, decided by file name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum FileKind {
    Users,
    Papers,
    Authors,
    Claims,
    Foreign,
}

impl FileKind {
    const ALL: [FileKind; 5] = [
        FileKind::Users,
        FileKind::Papers,
        FileKind::Authors,
        FileKind::Claims,
        FileKind::Foreign,
    ];

    fn file_name(self) -> &'static str {
        match self {
            FileKind::Users => "users.jsonl",
            FileKind::Papers => "papers.jsonl",
            FileKind::Authors => "authors.jsonl",
            FileKind::Claims => "claims.jsonl",
            FileKind::Foreign => "foreign.jsonl",
        }
    }

    fn of(path: &Path) -> Option<Self> {
        let name = path.file_name()?.to_str()?;
        FileKind::ALL.into_iter().find(|k| k.file_name() == name)
    }
}

#[derive(Deserialize)]
struct ForeignLine {
    author_id: String,
    scheme: Scheme,
    value: String,
}

/// The single writer over the record set.
#[derive(Debug, Clone, Default)]
pub struct Store {
    data: Arc<StoreData>,
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    /// Loads JSON-Lines files named `users.jsonl`, `papers.jsonl`,
    /// `authors.jsonl`, `claims.jsonl` and `foreign.jsonl`.
    ///
    /// Files are applied in that dependency order whatever order the paths
    /// are given in, so every reference can be checked as it is read.
    pub fn load_corpus<P: AsRef<Path>>(paths: &[P]) -> Result<Store> {
        let mut classified = Vec::with_capacity(paths.len());
        for path in paths {
            let path = path.as_ref();
            let kind = FileKind::of(path).ok_or_else(|| {
                Error::invalid(
                    "corpus file",
                    format!("unrecognized file name {}", path.display()),
                )
            })?;
            classified.push((kind, path.to_path_buf()));
        }
        classified.sort_by_key(|(kind, _)| *kind);

        let mut store = Store::new();
        for (kind, path) in classified {
            match kind {
                FileKind::Users => read_lines(&path, |u| store.insert_user(u))?,
                FileKind::Papers => read_lines(&path, |p| store.insert_paper(p))?,
                FileKind::Authors => read_lines(&path, |a| store.insert_author(a))?,
                FileKind::Claims => read_lines(&path, |c| store.insert_claim(c))?,
                FileKind::Foreign => read_lines(&path, |f: ForeignLine| {
                    store
                        .register_foreign_identity(&f.author_id, f.scheme, &f.value)
                        .map(drop)
                })?,
            }
        }
        Ok(store)
    }

    /// Loads whichever of the five corpus files exist in `dir`.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Store> {
        let dir = dir.as_ref();
        if !dir.is_dir() {
            return Err(Error::Io {
                path: dir.to_path_buf(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
            });
        }
        let paths: Vec<PathBuf> = FileKind::ALL
            .iter()
            .map(|k| dir.join(k.file_name()))
            .filter(|p| p.is_file())
            .collect();
        Store::load_corpus(&paths)
    }

    /// Writes users, papers, authors (with their foreign identities) and
    /// claims back to `dir`, replacing each file atomically.
    pub fn export_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        let data = &self.data;
        write_lines(&dir.join(FileKind::Users.file_name()), data.users.values())?;
        write_lines(
            &dir.join(FileKind::Papers.file_name()),
            data.papers.values(),
        )?;
        write_lines(
            &dir.join(FileKind::Authors.file_name()),
            data.authors.values(),
        )?;
        write_lines(
            &dir.join(FileKind::Claims.file_name()),
            data.claims.values(),
        )?;
        Ok(())
    }

    pub fn snapshot(&self) -> ReadView {
        ReadView {
            data: Arc::clone(&self.data),
        }
    }

    fn data_mut(&mut self) -> &mut StoreData {
        Arc::make_mut(&mut self.data)
    }

    pub fn insert_user(&mut self, mut user: UserRecord) -> Result<()> {
        user.user_id = user.user_id.trim().to_string();
        user.last_name = user.last_name.trim().to_string();
        user.first_name = user.first_name.trim().to_string();
        if user.user_id.is_empty() {
            return Err(Error::invalid("user", "empty user_id"));
        }
        if user.last_name.is_empty() {
            return Err(Error::invalid(
                "user",
                format!("{} has an empty last_name", user.user_id),
            ));
        }
        let mut emails: Vec<String> = Vec::with_capacity(user.emails.len());
        for email in &user.emails {
            let email = normalize_email(email);
            if !email.is_empty() && !emails.contains(&email) {
                emails.push(email);
            }
        }
        user.emails = emails;
        if self.data.users.contains_key(&user.user_id) {
            return Err(Error::Duplicate {
                field: "user_id",
                id: user.user_id,
            });
        }
        self.data_mut().users.insert(user.user_id.clone(), user);
        Ok(())
    }

    pub fn insert_paper(&mut self, mut paper: PaperRecord) -> Result<()> {
        paper.paper_id = paper.paper_id.trim().to_string();
        if paper.paper_id.is_empty() {
            return Err(Error::invalid("paper", "empty paper_id"));
        }
        paper.author_strings.retain(|a| !a.trim().is_empty());
        if paper.author_strings.is_empty() {
            return Err(Error::invalid(
                "paper",
                format!("{} has no authors", paper.paper_id),
            ));
        }
        if paper.updated < paper.published {
            return Err(Error::invalid(
                "paper",
                format!("{} updated before it was published", paper.paper_id),
            ));
        }
        paper.submitter_email = paper
            .submitter_email
            .as_deref()
            .map(normalize_email)
            .filter(|e| !e.is_empty());
        if let Some(submitter) = &paper.submitter_user_id {
            if !self.data.users.contains_key(submitter) {
                return Err(Error::not_found("user", submitter));
            }
        }
        if self.data.papers.contains_key(&paper.paper_id) {
            return Err(Error::Duplicate {
                field: "paper_id",
                id: paper.paper_id,
            });
        }
        self.data_mut().papers.insert(paper.paper_id.clone(), paper);
        Ok(())
    }

    pub fn insert_author(&mut self, author: AuthorRecord) -> Result<()> {
        let Some((stem, suffix)) = split_author_id(&author.author_id) else {
            return Err(Error::invalid(
                "author_id",
                format!("{:?} is not of the form name_i_N", author.author_id),
            ));
        };
        if self.data.authors.contains_key(&author.author_id) {
            return Err(Error::Duplicate {
                field: "author_id",
                id: author.author_id,
            });
        }
        if !self.data.users.contains_key(&author.owner_user_id) {
            return Err(Error::not_found("user", &author.owner_user_id));
        }
        if let Some(existing) = self.data.author_by_owner.get(&author.owner_user_id) {
            return Err(Error::Conflict(format!(
                "user {} already owns author id {existing}",
                author.owner_user_id
            )));
        }
        let stem = stem.to_string();
        let data = self.data_mut();
        let max = data.max_suffix.entry(stem).or_default();
        *max = (*max).max(suffix);
        data.author_by_owner
            .insert(author.owner_user_id.clone(), author.author_id.clone());
        data.authors.insert(author.author_id.clone(), author);
        Ok(())
    }

    pub fn insert_claim(&mut self, claim: OwnershipClaim) -> Result<()> {
        if !self.data.users.contains_key(&claim.user_id) {
            return Err(Error::not_found("user", &claim.user_id));
        }
        if !self.data.papers.contains_key(&claim.paper_id) {
            return Err(Error::not_found("paper", &claim.paper_id));
        }
        let key = (claim.user_id.clone(), claim.paper_id.clone());
        if self.data.claims.contains_key(&key) {
            return Err(Error::Duplicate {
                field: "claim",
                id: format!("{}/{}", claim.user_id, claim.paper_id),
            });
        }
        let data = self.data_mut();
        data.claims_by_paper
            .insert((claim.paper_id.clone(), claim.user_id.clone()));
        data.claims.insert(key, claim);
        Ok(())
    }

    /// Resolves an existing claim, typically a pending one, by admin action.
    pub fn resolve_claim(
        &mut self,
        user_id: &str,
        paper_id: &str,
        status: ClaimStatus,
        at: Timestamp,
    ) -> Result<OwnershipClaim> {
        let key = (user_id.to_string(), paper_id.to_string());
        if !self.data.claims.contains_key(&key) {
            return Err(Error::not_found("claim", format!("{user_id}/{paper_id}")));
        }
        let claim = self.data_mut().claims.get_mut(&key).expect("checked above");
        claim.status = status;
        claim.provenance = Provenance::Admin;
        claim.timestamp = at;
        Ok(claim.clone())
    }

    /// Records a foreign identity on an author. Registering the same
    /// `(scheme, value)` twice leaves a single entry.
    pub fn register_foreign_identity(
        &mut self,
        author_id: &str,
        scheme: Scheme,
        value: &str,
    ) -> Result<AuthorRecord> {
        if !self.data.authors.contains_key(author_id) {
            return Err(Error::not_found("author", author_id));
        }
        let identity = ForeignIdentity::new(scheme, value)?;
        if let Some(author) = self.data.authors.get(author_id) {
            if author.foreign_ids.contains(&identity) {
                return Ok(author.clone());
            }
        }
        let author = self
            .data_mut()
            .authors
            .get_mut(author_id)
            .expect("checked above");
        author.foreign_ids.push(identity);
        Ok(author.clone())
    }
}

fn normalize_email(email: &str) -> String {
    email.trim().to_lowercase()
}

fn read_lines<T, F>(path: &Path, mut apply: F) -> Result<()>
where
    T: DeserializeOwned,
    F: FnMut(T) -> Result<()>,
{
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let reader = BufReader::new(File::open(path).map_err(io_err)?);
    for (index, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let record: T = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: index + 1,
            message: e.to_string(),
        })?;
        apply(record).map_err(|e| Error::AtLine {
            path: path.to_path_buf(),
            line: index + 1,
            source: Box::new(e),
        })?;
    }
    Ok(())
}

fn write_lines<'a, T: Serialize + 'a>(
    path: &Path,
    records: impl Iterator<Item = &'a T>,
) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let tmp = path.with_extension("jsonl.tmp");
    let mut out = BufWriter::new(File::create(&tmp).map_err(io_err)?);
    for record in records {
        serde_json::to_writer(&mut out, record).map_err(|e| io_err(e.into()))?;
        out.write_all(b"\n").map_err(io_err)?;
    }
    out.into_inner()
        .map_err(|e| io_err(e.into_error()))?
        .sync_all()
        .map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}
