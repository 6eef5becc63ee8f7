//! Minting author identifiers and deciding ownership claims.
//!
//! Identifiers take the form `{surname key}_{first initial}_{n}`, where `n`
//! counts up from 1 per stem in mint order. Claim evaluation is a
//! conservative reconstruction of repository auto-claim heuristics:
//!
//! 1. an account email equal to the paper's submitter email is accepted;
//! 2. otherwise a name-compatible author slot is accepted only on papers with
//!    at most [`MintPolicy::auto_claim_max_authors`] authors, and only while
//!    no other accepted claimant fits the same slot;
//! 3. a compatible name that fails those side conditions waits as `pending`;
//!    anything else is `rejected`.
//!
//! Pending claims are never resolved automatically.

use crate::error::{Error, Result};
use crate::names::{blocking_key, name_compatibility, ParsedName};
use crate::store::{
    split_author_id, AuthorRecord, ClaimStatus, OwnershipClaim, PaperRecord, Provenance, ReadView,
    Store, UserRecord,
};
use crate::time::Timestamp;

/// Knobs shared by minting, claiming, endorsement and rendering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MintPolicy {
    base_url: String,
    auto_claim_max_authors: usize,
    endorsement_threshold: usize,
}

impl MintPolicy {
    pub const DEFAULT_AUTO_CLAIM_MAX_AUTHORS: usize = 10;
    pub const DEFAULT_ENDORSEMENT_THRESHOLD: usize = 3;

    /// `base_url` must be an absolute http(s) URL; trailing slashes are dropped.
    pub fn new(base_url: &str) -> Result<Self> {
        let trimmed = base_url.trim().trim_end_matches('/');
        let parsed = url::Url::parse(trimmed)
            .map_err(|e| Error::invalid("base url", format!("{base_url:?}: {e}")))?;
        if !matches!(parsed.scheme(), "http" | "https") || parsed.host().is_none() {
            return Err(Error::invalid(
                "base url",
                format!("{base_url:?} is not an http(s) URL"),
            ));
        }
        Ok(MintPolicy {
            base_url: trimmed.to_string(),
            auto_claim_max_authors: Self::DEFAULT_AUTO_CLAIM_MAX_AUTHORS,
            endorsement_threshold: Self::DEFAULT_ENDORSEMENT_THRESHOLD,
        })
    }

    pub fn with_auto_claim_max_authors(mut self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid(
                "auto_claim_max_authors",
                "must be at least 1",
            ));
        }
        self.auto_claim_max_authors = n;
        Ok(self)
    }

    pub fn with_endorsement_threshold(mut self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid(
                "endorsement_threshold",
                "must be at least 1",
            ));
        }
        self.endorsement_threshold = n;
        Ok(self)
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    pub fn auto_claim_max_authors(&self) -> usize {
        self.auto_claim_max_authors
    }

    pub fn endorsement_threshold(&self) -> usize {
        self.endorsement_threshold
    }

    /// Abstract-page URL for a paper: `{base_url}/abs/{paper_id}`. Characters
    /// that may not appear in an IRI are percent-encoded; `/` is kept so
    /// old-style ids such as `hep-th/9901001` read naturally.
    pub fn paper_uri(&self, paper_id: &str) -> String {
        let mut uri = format!("{}/abs/", self.base_url);
        for c in paper_id.chars() {
            if c.is_control() || c.is_whitespace() || "<>\"{}|^`\\%#?".contains(c) {
                let mut buf = [0; 4];
                for byte in c.encode_utf8(&mut buf).bytes() {
                    uri.push_str(&format!("%{byte:02X}"));
                }
            } else {
                uri.push(c);
            }
        }
        uri
    }
}

/// Mints the next free identifier for `name` and records it against `user_id`.
pub fn mint_author_id(store: &mut Store, user_id: &str, name: &ParsedName) -> Result<String> {
    let view = store.snapshot();
    if view.user(user_id).is_none() {
        return Err(Error::not_found("user", user_id));
    }
    if let Some(existing) = view.author_for_owner(user_id) {
        return Err(Error::Conflict(format!(
            "user {user_id} already owns author id {}",
            existing.author_id
        )));
    }
    let stem = blocking_key(name)?.to_string();
    let next = view.max_suffix(&stem).unwrap_or(0) + 1;
    drop(view);

    let author_id = format!("{stem}_{next}");
    store.insert_author(AuthorRecord {
        author_id: author_id.clone(),
        owner_user_id: user_id.to_string(),
        display_name: name.to_string(),
        alt_names: Vec::new(),
        foreign_ids: Vec::new(),
    })?;
    Ok(author_id)
}

/// `{base_url}/a/{author_id}`.
pub fn author_uri(policy: &MintPolicy, author_id: &str) -> Result<String> {
    if split_author_id(author_id).is_none() {
        return Err(Error::invalid("author_id", format!("{author_id:?}")));
    }
    Ok(format!("{}/a/{author_id}", policy.base_url))
}

fn email_matches(user: &UserRecord, paper: &PaperRecord) -> bool {
    paper
        .submitter_email
        .as_ref()
        .is_some_and(|submitter| user.emails.iter().any(|e| e == submitter))
}

fn compatible_slots(user: &UserRecord, paper: &PaperRecord) -> Vec<usize> {
    let Ok(name) = user.parsed_name() else {
        return Vec::new();
    };
    paper
        .author_strings
        .iter()
        .enumerate()
        .filter(|(_, author)| name_compatibility(&name, author).is_compatible())
        .map(|(slot, _)| slot)
        .collect()
}

/// Decides what status a new claim by `user_id` on `paper_id` would get.
pub fn evaluate_claim(
    view: &ReadView,
    policy: &MintPolicy,
    user_id: &str,
    paper_id: &str,
) -> Result<ClaimStatus> {
    let user = view
        .user(user_id)
        .ok_or_else(|| Error::not_found("user", user_id))?;
    let paper = view
        .paper(paper_id)
        .ok_or_else(|| Error::not_found("paper", paper_id))?;
    if view.claim(user_id, paper_id).is_some() {
        return Err(Error::Conflict(format!(
            "user {user_id} already has a claim on {paper_id}"
        )));
    }

    if email_matches(user, paper) {
        return Ok(ClaimStatus::AutoAccepted);
    }
    let slots = compatible_slots(user, paper);
    if slots.is_empty() {
        return Ok(ClaimStatus::Rejected);
    }
    if paper.author_strings.len() > policy.auto_claim_max_authors {
        return Ok(ClaimStatus::Pending);
    }

    let mut taken = vec![false; paper.author_strings.len()];
    for claim in view.claims_for_paper(paper_id) {
        if claim.user_id == user_id || !claim.is_accepted_authorship() {
            continue;
        }
        if let Some(other) = view.user(&claim.user_id) {
            for slot in compatible_slots(other, paper) {
                taken[slot] = true;
            }
        }
    }
    if slots.iter().any(|&slot| !taken[slot]) {
        Ok(ClaimStatus::AutoAccepted)
    } else {
        Ok(ClaimStatus::Pending)
    }
}

/// Where a claim status came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimDecision {
    /// The outcome of [`evaluate_claim`] for a user-initiated claim.
    Evaluated(ClaimStatus),
    /// A status forced by an administrator.
    Admin(ClaimStatus),
}

/// Records a claim. Later snapshots see it immediately.
pub fn apply_claim(
    store: &mut Store,
    user_id: &str,
    paper_id: &str,
    decision: ClaimDecision,
    at: Timestamp,
) -> Result<OwnershipClaim> {
    let (status, provenance) = match decision {
        ClaimDecision::Evaluated(status) => (status, Provenance::UserClaim),
        ClaimDecision::Admin(status) => (status, Provenance::Admin),
    };
    let claim = OwnershipClaim {
        user_id: user_id.to_string(),
        paper_id: paper_id.to_string(),
        asserts_authorship: true,
        provenance,
        status,
        timestamp: at,
    };
    if store.snapshot().claim(user_id, paper_id).is_some() {
        return Err(Error::Conflict(format!(
            "user {user_id} already has a claim on {paper_id}"
        )));
    }
    store.insert_claim(claim.clone())?;
    Ok(claim)
}

/// Evaluates and applies a user claim in one step.
pub fn claim_paper(
    store: &mut Store,
    policy: &MintPolicy,
    user_id: &str,
    paper_id: &str,
    at: Timestamp,
) -> Result<OwnershipClaim> {
    let status = evaluate_claim(&store.snapshot(), policy, user_id, paper_id)?;
    apply_claim(
        store,
        user_id,
        paper_id,
        ClaimDecision::Evaluated(status),
        at,
    )
}

/// Whether the author has enough listed papers to endorse new users.
pub fn endorsement_eligible(view: &ReadView, policy: &MintPolicy, author_id: &str) -> Result<bool> {
    Ok(view.papers_for_author(author_id)?.len() >= policy.endorsement_threshold)
}
