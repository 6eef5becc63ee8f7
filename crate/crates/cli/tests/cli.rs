use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn sample() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/sample")
}

fn copy_sample() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for entry in fs::read_dir(sample()).unwrap() {
        let path = entry.unwrap().path();
        fs::copy(&path, dir.path().join(path.file_name().unwrap())).unwrap();
    }
    dir
}

fn authorid(data: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_authorid"))
        .env_clear()
        .arg("--data")
        .arg(data)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn stats_names_reports_the_planted_top_key() {
    let dir = tempfile::tempdir().unwrap();
    let mut users = String::new();
    for i in 0..100 {
        let first = ["Yi", "Yan", "Y."][i % 3];
        users += &format!(
            r#"{{"user_id":"z{i}","last_name":"Zhang","first_name":"{first}","emails":[]}}"#
        );
        users.push('\n');
    }
    for i in 0..60 {
        users +=
            &format!(r#"{{"user_id":"w{i}","last_name":"Wang","first_name":"Li","emails":[]}}"#);
        users.push('\n');
    }
    users += r#"{"user_id":"k1","last_name":"Kurtz","first_name":"Michael","emails":[]}"#;
    users.push('\n');
    fs::write(dir.path().join("users.jsonl"), users).unwrap();

    let text = stdout(&authorid(dir.path(), &["stats", "names", "--top", "2"]));
    assert_eq!(
        text,
        "Lastname, Initial  Count\n\
         Zhang, Y             100\n\
         Wang, L               60\n"
    );
    let all = stdout(&authorid(dir.path(), &["stats", "names"]));
    let total: usize = all
        .lines()
        .skip(1)
        .map(|l| l.rsplit(' ').next().unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(total, 161);
}

#[test]
fn mint_persists_and_numbers_sequentially() {
    let dir = copy_sample();
    let first = stdout(&authorid(
        dir.path(),
        &[
            "--base-url",
            "http://arxiv.org",
            "mint",
            "--user",
            "u4",
            "--name",
            "Zhang, Yi",
        ],
    ));
    assert_eq!(first, "zhang_y_1\thttp://arxiv.org/a/zhang_y_1\n");
    let second = stdout(&authorid(
        dir.path(),
        &["mint", "--user", "u5", "--name", "Yan Zhang"],
    ));
    assert!(second.starts_with("zhang_y_2\t"), "{second}");

    let again = authorid(dir.path(), &["mint", "--user", "u4", "--name", "Zhang, Yi"]);
    assert!(!again.status.success());
    assert!(String::from_utf8_lossy(&again.stderr).contains("already owns"));

    let authors = fs::read_to_string(dir.path().join("authors.jsonl")).unwrap();
    assert!(authors.contains(r#""author_id":"zhang_y_2""#));
    // Foreign ids loaded from foreign.jsonl survive the rewrite.
    assert!(authors.contains("A-1637-2009"));
}

#[test]
fn claim_then_admin_resolution() {
    let dir = copy_sample();
    // Warner is on the 12-author paper: a name-only claim waits for review.
    let pending = stdout(&authorid(
        dir.path(),
        &["claim", "--user", "u1", "--paper", "0901.0512"],
    ));
    assert!(pending.contains(r#""status":"pending""#), "{pending}");
    assert!(pending.contains(r#""provenance":"user-claim""#));

    let repeat = authorid(
        dir.path(),
        &["claim", "--user", "u1", "--paper", "0901.0512"],
    );
    assert!(!repeat.status.success());

    let resolved = stdout(&authorid(
        dir.path(),
        &[
            "claim",
            "--user",
            "u1",
            "--paper",
            "0901.0512",
            "--force-status",
            "auto-accepted",
        ],
    ));
    assert!(resolved.contains(r#""status":"auto-accepted""#));
    assert!(resolved.contains(r#""provenance":"admin""#));

    let check = stdout(&authorid(
        dir.path(),
        &["endorse-check", "--author", "warner_s_1"],
    ));
    assert_eq!(check, "warner_s_1: not eligible (2 papers, threshold 3)\n");
    let lenient = stdout(&authorid(
        dir.path(),
        &[
            "--endorsement-threshold",
            "2",
            "endorse-check",
            "--author",
            "warner_s_1",
        ],
    ));
    assert_eq!(lenient, "warner_s_1: eligible (2 papers, threshold 2)\n");

    let unknown = authorid(dir.path(), &["claim", "--user", "u3", "--paper", "x1"]);
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("unknown paper x1"));
}

#[test]
fn export_formats() {
    let data = sample();
    let nt = stdout(&authorid(
        &data,
        &[
            "--base-url",
            "http://arxiv.org",
            "export",
            "--author",
            "lee_a_1",
            "--format",
            "ntriples",
        ],
    ));
    assert_eq!(
        nt,
        fs::read_to_string(data.join("../../golden/lee_a_1.nt")).unwrap()
    );

    let atom = stdout(&authorid(
        &data,
        &[
            "export",
            "--author",
            "lee_a_1",
            "--format",
            "atom",
            "--generated-at",
            "2009-09-30T00:00:00+02:00",
        ],
    ));
    assert!(atom.contains("<updated>2009-09-29T22:00:00Z</updated>"));
    assert!(atom.contains("<id>http://localhost:8080/a/lee_a_1</id>"));

    let html = stdout(&authorid(
        &data,
        &["export", "--author", "lee_a_1", "--format", "html"],
    ));
    assert_eq!(html.matches("<li>").count(), 3);
    let rdf = stdout(&authorid(
        &data,
        &["export", "--author", "lee_a_1", "--format", "rdfxml"],
    ));
    assert!(rdf.contains("rdf:RDF"));

    let env_url = Command::new(env!("CARGO_BIN_EXE_authorid"))
        .env_clear()
        .env("AUTHORID_DATA", &data)
        .env("AUTHORID_BASE_URL", "https://example.org/")
        .args(["export", "--author", "kurtz_m_1", "--format", "html"])
        .output()
        .unwrap();
    assert!(stdout(&env_url).contains("https://example.org/abs/0902.0100"));
}

#[test]
fn join_emits_component_lines() {
    let left = copy_sample();
    let right = tempfile::tempdir().unwrap();
    fs::write(
        right.path().join("users.jsonl"),
        r#"{"user_id":"v1","last_name":"Lee","first_name":"Ang","emails":[]}"#.to_string() + "\n",
    )
    .unwrap();
    fs::write(
        right.path().join("papers.jsonl"),
        r#"{"paper_id":"oai:1","title":"ENTROPY bounds & <holography>!","abstract":"","authors":["Lee, A."],"published":"2009-01-01T00:00:00Z","updated":"2009-01-01T00:00:00Z","categories":[]}"#
            .to_string()
            + "\n",
    )
    .unwrap();
    fs::write(
        right.path().join("authors.jsonl"),
        r#"{"author_id":"lee_a_1","owner_user_id":"v1","display_name":"Ang Lee","alt_names":[],"foreign_ids":[]}"#.to_string() + "\n",
    )
    .unwrap();
    let assertions = right.path().join("sameas.jsonl");
    fs::write(
        &assertions,
        r#"{"left_repo":"arxiv","left_kind":"author","left_id":"lee_a_1","right_repo":"ads","right_kind":"author","right_id":"lee_a_1","source":"manual"}"#
            .to_string()
            + "\n",
    )
    .unwrap();
    let run = |dedup: bool| {
        let mut args = vec![
            "join".to_string(),
            "--left".into(),
            left.path().display().to_string(),
            "--right".into(),
            right.path().display().to_string(),
            "--left-repo".into(),
            "arxiv".into(),
            "--right-repo".into(),
            "ads".into(),
            "--assertions".into(),
            assertions.display().to_string(),
        ];
        if dedup {
            args.push("--dedup".into());
        }
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        stdout(&authorid(left.path(), &args))
    };
    let plain = run(false);
    let lines: Vec<serde_json::Value> = plain
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let with_lee = lines
        .iter()
        .find(|c| {
            c["members"]
                .as_array()
                .unwrap()
                .iter()
                .any(|m| m == "arxiv:author:lee_a_1")
        })
        .unwrap();
    let members = with_lee["members"].as_array().unwrap();
    assert!(members.iter().any(|m| m == "ads:author:lee_a_1"));
    // No accepted claim in the right repo, so its paper stays apart.
    assert!(!members.iter().any(|m| m == "ads:paper:oai:1"));
    let labels: Vec<&str> = lines
        .iter()
        .map(|c| c["component_label"].as_str().unwrap())
        .collect();
    assert!(labels.windows(2).all(|w| w[0] < w[1]));

    let deduped = run(true);
    assert_eq!(deduped.lines().count(), plain.lines().count() - 1);
    assert!(deduped
        .lines()
        .any(|l| l.contains("ads:paper:oai:1") && l.contains("arxiv:paper:0901.0003")));

    let clash = authorid(
        left.path(),
        &[
            "join",
            "--left",
            &left.path().display().to_string(),
            "--right",
            &left.path().display().to_string(),
        ],
    );
    assert!(!clash.status.success());
}

fn http_get(addr: &str, path: &str, accept: Option<&str>) -> String {
    let mut stream = TcpStream::connect(addr).unwrap();
    let accept = accept
        .map(|a| format!("Accept: {a}\r\n"))
        .unwrap_or_default();
    write!(
        stream,
        "GET {path} HTTP/1.1\r\nHost: {addr}\r\n{accept}Connection: close\r\n\r\n"
    )
    .unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).unwrap();
    response
}

#[test]
fn serve_answers_over_http() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_authorid"))
        .env_clear()
        .args([
            "--data",
            &sample().display().to_string(),
            "serve",
            "--port",
            "0",
        ])
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stderr = BufReader::new(child.stderr.take().unwrap());
    let mut line = String::new();
    stderr.read_line(&mut line).unwrap();
    let addr = line.trim().rsplit("http://").next().unwrap().to_string();

    let health = http_get(&addr, "/healthz", None);
    let redirect = http_get(&addr, "/a/kurtz_m_1", Some("application/atom+xml"));
    let atom = http_get(&addr, "/a/kurtz_m_1.atom", None);
    let missing = http_get(&addr, "/a/nobody_x_9", None);
    child.kill().unwrap();
    child.wait().unwrap();

    assert!(health.starts_with("HTTP/1.1 200"), "{health}");
    assert!(health.ends_with("ok"));
    assert!(redirect.starts_with("HTTP/1.1 303"), "{redirect}");
    let lower = redirect.to_ascii_lowercase();
    assert!(lower.contains("location: /a/kurtz_m_1.atom\r\n"));
    assert!(lower.contains("vary: accept\r\n"));
    assert!(atom.starts_with("HTTP/1.1 200"));
    assert!(atom
        .to_ascii_lowercase()
        .contains("content-type: application/atom+xml\r\n"));
    assert!(atom
        .to_ascii_lowercase()
        .contains("access-control-allow-origin: *\r\n"));
    assert!(missing.starts_with("HTTP/1.1 404"));
}
