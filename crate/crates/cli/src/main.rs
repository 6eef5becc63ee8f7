use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use authorid::graph::{read_assertions, ComponentLine};
use authorid::{
    apply_claim, build_graph, claim_paper, connected_components, dedup_papers,
    endorsement_eligible, merge_graphs, mint_author_id, name_frequency_report, parse_author_string,
    render_atom, render_html, render_ore, ClaimDecision, ClaimStatus, MintPolicy, RepoView,
    Resolver, Snapshot, Store, Timestamp,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "authorid",
    version,
    about = "Author identifiers for a preprint repository"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Directory holding users/papers/authors/claims/foreign .jsonl files.
    #[arg(long, global = true, env = "AUTHORID_DATA", default_value = "data")]
    data: PathBuf,
    #[arg(
        long,
        global = true,
        env = "AUTHORID_BASE_URL",
        default_value = "http://localhost:8080"
    )]
    base_url: String,
    /// Papers with more authors than this never auto-accept name-only claims.
    #[arg(
        long,
        global = true,
        env = "AUTHORID_AUTO_CLAIM_MAX_AUTHORS",
        default_value_t = 10
    )]
    auto_claim_max_authors: usize,
    #[arg(
        long,
        global = true,
        env = "AUTHORID_ENDORSEMENT_THRESHOLD",
        default_value_t = 3
    )]
    endorsement_threshold: usize,
}

impl Global {
    fn policy(&self) -> Result<MintPolicy> {
        Ok(MintPolicy::new(&self.base_url)?
            .with_auto_claim_max_authors(self.auto_claim_max_authors)?
            .with_endorsement_threshold(self.endorsement_threshold)?)
    }

    fn load(&self) -> Result<Store> {
        Store::load_dir(&self.data).with_context(|| format!("loading {}", self.data.display()))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Corpus statistics.
    Stats {
        #[command(subcommand)]
        what: Stats,
    },
    /// Mint an author id for a user and save it.
    Mint {
        #[arg(long)]
        user: String,
        /// "Last, First" or "First Last".
        #[arg(long)]
        name: String,
    },
    /// Claim a paper for a user, or force a status as an administrator.
    Claim {
        #[arg(long)]
        user: String,
        #[arg(long)]
        paper: String,
        #[arg(long, value_enum)]
        force_status: Option<StatusArg>,
    },
    /// Report whether an author may endorse new users.
    EndorseCheck {
        #[arg(long)]
        author: String,
    },
    /// Join two repositories and print connected components as JSON lines.
    Join {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        /// Repository label for the left side (default: directory name).
        #[arg(long)]
        left_repo: Option<String>,
        #[arg(long)]
        right_repo: Option<String>,
        #[arg(long)]
        assertions: Option<PathBuf>,
        /// Also assert papers with equal normalized titles.
        #[arg(long)]
        dedup: bool,
    },
    /// Print one representation of an author.
    Export {
        #[arg(long)]
        author: String,
        #[arg(long, value_enum)]
        format: Format,
        /// Feed `updated` value (RFC 3339); defaults to now.
        #[arg(long)]
        generated_at: Option<String>,
    },
    /// Run the resolver. SIGHUP reloads the data directory.
    Serve {
        #[arg(long, env = "AUTHORID_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "AUTHORID_BIND", default_value = "127.0.0.1")]
        bind: std::net::IpAddr,
    },
}

#[derive(Subcommand)]
enum Stats {
    /// Blocking-key frequency table.
    Names {
        #[arg(long)]
        top: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StatusArg {
    AutoAccepted,
    Pending,
    Rejected,
}

impl From<StatusArg> for ClaimStatus {
    fn from(s: StatusArg) -> Self {
        match s {
            StatusArg::AutoAccepted => ClaimStatus::AutoAccepted,
            StatusArg::Pending => ClaimStatus::Pending,
            StatusArg::Rejected => ClaimStatus::Rejected,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Html,
    Atom,
    Ntriples,
    Rdfxml,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Stats {
            what: Stats::Names { top },
        } => {
            let report = name_frequency_report(&g.load()?.snapshot());
            write!(out, "{}", report.to_table(top))?;
            if !report.unkeyed.is_empty() {
                eprintln!(
                    "{} account(s) without a usable name key",
                    report.unkeyed.len()
                );
            }
        }
        Command::Mint { user, name } => {
            let mut store = g.load()?;
            let parsed = parse_author_string(&name)?;
            let id = mint_author_id(&mut store, &user, &parsed)?;
            store.export_dir(&g.data)?;
            writeln!(out, "{id}\t{}", authorid::author_uri(&g.policy()?, &id)?)?;
        }
        Command::Claim {
            user,
            paper,
            force_status,
        } => {
            let mut store = g.load()?;
            let now = Timestamp::now();
            let claim = match force_status {
                Some(status) if store.snapshot().claim(&user, &paper).is_some() => {
                    store.resolve_claim(&user, &paper, status.into(), now)?
                }
                Some(status) => apply_claim(
                    &mut store,
                    &user,
                    &paper,
                    ClaimDecision::Admin(status.into()),
                    now,
                )?,
                None => claim_paper(&mut store, &g.policy()?, &user, &paper, now)?,
            };
            store.export_dir(&g.data)?;
            writeln!(out, "{}", serde_json::to_string(&claim)?)?;
        }
        Command::EndorseCheck { author } => {
            let view = g.load()?.snapshot();
            let policy = g.policy()?;
            let listed = view.papers_for_author(&author)?.len();
            let verdict = if endorsement_eligible(&view, &policy, &author)? {
                "eligible"
            } else {
                "not eligible"
            };
            writeln!(
                out,
                "{author}: {verdict} ({listed} papers, threshold {})",
                policy.endorsement_threshold()
            )?;
        }
        Command::Join {
            left,
            right,
            left_repo,
            right_repo,
            assertions,
            dedup,
        } => {
            let left_repo = left_repo.unwrap_or_else(|| dir_label(&left));
            let right_repo = right_repo.unwrap_or_else(|| dir_label(&right));
            if left_repo == right_repo {
                bail!(
                    "both repositories are labelled {left_repo:?}; pass --left-repo/--right-repo"
                );
            }
            let lv = Store::load_dir(&left)
                .with_context(|| format!("loading {}", left.display()))?
                .snapshot();
            let rv = Store::load_dir(&right)
                .with_context(|| format!("loading {}", right.display()))?
                .snapshot();
            let mut all = match &assertions {
                Some(path) => read_assertions(path)?,
                None => Vec::new(),
            };
            if dedup {
                all.extend(dedup_papers(
                    RepoView {
                        repo: &left_repo,
                        view: &lv,
                    },
                    RepoView {
                        repo: &right_repo,
                        view: &rv,
                    },
                ));
            }
            let merged = merge_graphs(
                &build_graph(&lv, &left_repo),
                &build_graph(&rv, &right_repo),
                all,
            )?;
            for component in connected_components(&merged) {
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string(&ComponentLine::from(&component))?
                )?;
            }
        }
        Command::Export {
            author,
            format,
            generated_at,
        } => {
            let view = g.load()?.snapshot();
            let policy = g.policy()?;
            let record = view
                .author(&author)
                .with_context(|| format!("unknown author {author}"))?;
            let papers = view.papers_for_author(&author)?;
            let rep = match format {
                Format::Html => render_html(record, &papers, &policy),
                Format::Atom => {
                    let at = match generated_at {
                        Some(text) => Timestamp::parse(&text).context("bad --generated-at")?,
                        None => Timestamp::now(),
                    };
                    render_atom(record, &papers, &policy, at)
                }
                Format::Ntriples => render_ore(record, &papers, &policy).ntriples,
                Format::Rdfxml => render_ore(record, &papers, &policy).rdfxml,
            };
            out.write_all(&rep.body)?;
        }
        Command::Serve { port, bind } => {
            let snapshot = Snapshot::new(g.load()?.snapshot(), g.policy()?);
            drop(out);
            serve(g, snapshot, SocketAddr::new(bind, port))?;
        }
    }
    Ok(())
}

fn dir_label(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

#[tokio::main]
async fn serve(g: &Global, snapshot: Snapshot, addr: SocketAddr) -> Result<()> {
    let resolver = Arc::new(Resolver::new(snapshot));
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .with_context(|| format!("binding {addr}"))?;
    eprintln!(
        "serving {} on http://{}",
        g.data.display(),
        listener.local_addr()?
    );
    reload_on_hangup(g, Arc::clone(&resolver))?;
    axum::serve(listener, resolver.router())
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

#[cfg(unix)]
fn reload_on_hangup(g: &Global, resolver: Arc<Resolver>) -> Result<()> {
    use tokio::signal::unix::{signal, SignalKind};
    let mut hangups = signal(SignalKind::hangup())?;
    let data = g.data.clone();
    let policy = g.policy()?;
    tokio::spawn(async move {
        while hangups.recv().await.is_some() {
            match Store::load_dir(&data) {
                Ok(store) => {
                    resolver.reload(Snapshot::new(store.snapshot(), policy.clone()));
                    eprintln!("reloaded {}", data.display());
                }
                Err(e) => eprintln!("reload failed, keeping previous snapshot: {e}"),
            }
        }
    });
    Ok(())
}

#[cfg(not(unix))]
fn reload_on_hangup(_: &Global, _: Arc<Resolver>) -> Result<()> {
    Ok(())
}
