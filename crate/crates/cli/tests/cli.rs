use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn lsss(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lsss"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn parse_square(text: &str) -> Vec<Vec<usize>> {
    let mut lines = text.lines();
    let n: usize = lines.next().unwrap().trim().parse().unwrap();
    let rows: Vec<Vec<usize>> = lines
        .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), n);
    rows
}

fn is_latin(rows: &[Vec<usize>]) -> bool {
    let n = rows.len();
    let perm = |v: Vec<usize>| {
        let mut v = v;
        v.sort_unstable();
        v == (0..n).collect::<Vec<_>>()
    };
    rows.iter().all(|r| perm(r.clone())) && (0..n).all(|c| perm(rows.iter().map(|r| r[c]).collect()))
}

#[test]
fn threshold_deal_and_recover() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let deal = lsss(
        dir,
        &["deal", "threshold", "--n", "3", "--t", "1", "--gen-square", "--seed", "7", "--out", "D", "--show-secret"],
    );
    assert_eq!(code(&deal), 0, "{}", stderr(&deal));
    let secret = stdout(&deal);

    let two = lsss(dir, &["recover", "--store", "D", "--share", "D/share-0.json", "--share", "D/share-1.json"]);
    assert_eq!(code(&two), 0, "{}", stderr(&two));
    let square = parse_square(&stdout(&two));
    assert_eq!(square.len(), 10);
    assert!(is_latin(&square));
    assert_eq!(stdout(&two), secret);

    let other = lsss(dir, &["recover", "--store", "D", "--share", "D/share-2.json", "--share", "D/share-1.json"]);
    assert_eq!(stdout(&other), secret);

    let one = lsss(dir, &["recover", "--store", "D", "--share", "D/share-0.json"]);
    assert_eq!(code(&one), 1);
    assert!(stderr(&one).contains("NotAuthorized"), "{}", stderr(&one));
}

#[test]
fn seeded_runs_are_byte_reproducible() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    for out in ["A", "B"] {
        let o = lsss(dir, &["deal", "threshold", "--n", "4", "--t", "2", "--gen-square", "--seed", "99", "--out", out]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    for name in ["store.json", "share-0.json", "share-3.json"] {
        assert_eq!(
            fs::read(dir.join("A").join(name)).unwrap(),
            fs::read(dir.join("B").join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn exclusion_and_verification() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    fs::write(dir.join("payload.bin"), b"family recipe").unwrap();
    let deal = lsss(
        dir,
        &[
            "deal", "threshold", "--n", "3", "--t", "1", "--payload-file", "payload.bin",
            "--exclude", "0,2", "--seed", "3", "--out", "D",
        ],
    );
    assert_eq!(code(&deal), 0, "{}", stderr(&deal));

    let excluded = lsss(dir, &["recover", "--store", "D", "--share", "D/share-0.json", "--share", "D/share-2.json"]);
    assert_eq!(code(&excluded), 1);
    assert!(stderr(&excluded).contains("NotAuthorized"));

    let ok = lsss(
        dir,
        &["recover", "--store", "D", "--share", "D/share-0.json", "--share", "D/share-1.json", "--out", "got.bin"],
    );
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    assert_eq!(stdout(&ok).trim(), hex::encode(b"family recipe"));
    assert_eq!(fs::read(dir.join("got.bin")).unwrap(), b"family recipe");

    let v = lsss(dir, &["verify", "--store", "D", "--share", "D/share-1.json"]);
    assert_eq!(code(&v), 0);
    assert!(stdout(&v).contains("verified: yes"));

    // flip one hex digit of the share's block
    let path = dir.join("D/share-1.json");
    let text = fs::read_to_string(&path).unwrap();
    let mut at = text.find("\"blocks\"").unwrap();
    at += text[at..].find('[').unwrap();
    at += text[at..].find('"').unwrap() + 1;
    let mut bytes = text.into_bytes();
    bytes[at] = if bytes[at] == b'0' { b'1' } else { b'0' };
    fs::write(&path, bytes).unwrap();
    let v = lsss(dir, &["verify", "--store", "D", "--share", "D/share-1.json"]);
    assert_eq!(code(&v), 1, "{}", stderr(&v));
}

#[test]
fn schema_violations_exit_2() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let deal = lsss(dir, &["deal", "threshold", "--n", "2", "--t", "0", "--gen-square", "--seed", "1", "--out", "D"]);
    assert_eq!(code(&deal), 0, "{}", stderr(&deal));
    let store = dir.join("D/store.json");
    let text = fs::read_to_string(&store).unwrap().replace("lsss-store-v1", "lsss-store-v0");
    fs::write(&store, text).unwrap();
    let o = lsss(dir, &["recover", "--store", "D", "--share", "D/share-0.json"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("SchemaViolation"), "{}", stderr(&o));

    let o = lsss(dir, &["recover", "--store", "missing", "--share", "D/share-0.json"]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&lsss(dir, &["deal", "threshold", "--n", "3", "--t", "3", "--gen-square", "--out", "E"])), 2);
    assert_eq!(code(&lsss(dir, &["no-such-command"])), 2);
    assert_eq!(code(&lsss(dir, &["ls", "enumerate", "--n", "6"])), 2);
}

#[test]
fn latin_square_commands() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    fs::write(dir.join("c1.txt"), "3\n0 . .\n. 2 .\n. . .\n").unwrap();
    let o = lsss(dir, &["ls", "critical", "c1.txt"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "critical: yes, strong: yes");

    let o = lsss(dir, &["ls", "complete", "c1.txt"]);
    assert_eq!(stdout(&o), "3\n0 1 2\n1 2 0\n2 0 1\n");

    fs::write(dir.join("one.txt"), "3\n0 . .\n. . .\n. . .\n").unwrap();
    let o = lsss(dir, &["ls", "critical", "one.txt"]);
    assert_eq!(stdout(&o).trim(), "critical: no, strong: no");
    let o = lsss(dir, &["ls", "count", "one.txt"]);
    assert_eq!(stdout(&o).trim(), "completions: 4");

    fs::write(dir.join("dead.txt"), "4\n0 . 3 1\n. . . .\n. . . .\n. 2 . .\n").unwrap();
    let o = lsss(dir, &["ls", "complete", "dead.txt"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("NoCompletion"));

    assert_eq!(stdout(&lsss(dir, &["ls", "enumerate", "--n", "4"])).trim(), "576");
    assert_eq!(stdout(&lsss(dir, &["ls", "bound", "--n", "10"])).trim(), "6658606584104736522240000000");

    let gen = lsss(dir, &["ls", "gen", "--n", "6", "--seed", "5"]);
    fs::write(dir.join("sq.txt"), stdout(&gen)).unwrap();
    let o = lsss(dir, &["ls", "check", "sq.txt"]);
    assert_eq!(stdout(&o).trim(), "latin: yes");
    fs::write(dir.join("bad.txt"), "2\n0 1\n0 1\n").unwrap();
    assert_eq!(code(&lsss(dir, &["ls", "check", "bad.txt"])), 1);

    fs::write(dir.join("rect.txt"), "4\n0 1 2 3\n1 0 3 2\n. . . .\n. . . .\n").unwrap();
    let o = lsss(dir, &["ls", "rect", "rect.txt"]);
    assert_eq!(code(&o), 0);
    let rows = parse_square(&stdout(&o));
    assert!(is_latin(&rows));
    assert_eq!(rows[1], vec![1, 0, 3, 2]);
}

#[test]
fn missing_seed_is_reported() {
    let tmp = TempDir::new().unwrap();
    let o = lsss(tmp.path(), &["ls", "gen", "--n", "5"]);
    assert_eq!(code(&o), 0);
    let seed: u64 = stderr(&o)
        .lines()
        .find_map(|l| l.strip_prefix("seed: "))
        .expect("seed line")
        .parse()
        .unwrap();
    let again = lsss(tmp.path(), &["ls", "gen", "--n", "5", "--seed", &seed.to_string()]);
    assert_eq!(stdout(&again), stdout(&o));
}

#[test]
fn pack_and_unpack() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let gen = lsss(dir, &["ls", "gen", "--n", "10", "--seed", "2"]);
    fs::write(dir.join("sq.txt"), stdout(&gen)).unwrap();
    let packed = stdout(&lsss(dir, &["pack", "--format", "324", "sq.txt"]));
    assert_eq!(packed.trim().len(), 96);
    let back = lsss(dir, &["unpack", "--format", "324", "--hex", packed.trim()]);
    assert_eq!(stdout(&back), stdout(&gen));

    let o = lsss(dir, &["ls", "gen", "--n", "10", "--cyclic"]);
    fs::write(dir.join("cyc.txt"), stdout(&o)).unwrap();
    let packed = stdout(&lsss(dir, &["pack", "--format", "256", "cyc.txt"]));
    let o = lsss(dir, &["unpack", "--format", "256", "--hex", packed.trim()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("NotRecoverable"));
}

#[test]
fn cgs_and_cds_round_trips() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    fs::write(dir.join("c.txt"), "3\n0 . .\n. 1 .\n. . .\n").unwrap();
    let o = lsss(dir, &["deal", "cgs", "--critical", "c.txt", "--participants", "3", "--seed", "4", "--out", "G"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = lsss(
        dir,
        &["combine", "cgs", "--share", "G/share-0.json", "--share", "G/share-1.json", "--share", "G/share-2.json"],
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("0 0 0\n1 1 1\n"), "{}", stdout(&o));

    fs::write(dir.join("l.txt"), "3\n0 1 2\n1 2 0\n2 0 1\n").unwrap();
    fs::write(dir.join("c1.txt"), "3\n0 . .\n. 2 .\n. . .\n").unwrap();
    fs::write(dir.join("c2.txt"), "3\n. . .\n. 2 .\n. . 1\n").unwrap();
    fs::write(dir.join("c3.txt"), "3\n0 . .\n. . .\n. . 1\n").unwrap();
    let o = lsss(
        dir,
        &["deal", "cds", "--square", "l.txt", "--critical", "c1.txt", "--critical", "c2.txt", "--critical", "c3.txt", "--out", "S"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = lsss(dir, &["combine", "cds", "--share", "S/share-0.json", "--share", "S/share-2.json"]);
    assert_eq!(stdout(&o), "3\n0 1 2\n1 2 0\n2 0 1\n");
    let o = lsss(dir, &["combine", "cds", "--share", "S/share-1.json"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("NotUnique"));
}

#[test]
fn hash_tools() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let o = lsss(dir, &["hash", "vector", "--digest-bits", "16", "--message", "abc"]);
    let out = stdout(&o);
    assert!(out.contains("iv: 1232"));
    assert!(out.contains("compress(0, 0000000000000000): 01d4"));
    assert!(out.contains("hash: 3539"));

    let o = lsss(dir, &["hash", "diamond-demo", "--k", "3", "--seed", "1"]);
    assert!(stdout(&o).contains("paths verified: yes"), "{}", stdout(&o));

    let commit = lsss(dir, &["hash", "nostradamus", "commit", "--k", "4", "--seed", "8", "--out", "d.json"]);
    assert_eq!(code(&commit), 0, "{}", stderr(&commit));
    let root = stdout(&commit).trim().strip_prefix("commitment: ").unwrap().to_string();
    fs::write(dir.join("result.txt"), b"WINNER:B").unwrap();
    let reveal = lsss(
        dir,
        &["hash", "nostradamus", "reveal", "--diamond", "d.json", "--prefix-file", "result.txt", "--seed", "9", "--out", "m.bin"],
    );
    assert_eq!(code(&reveal), 0, "{}", stderr(&reveal));
    let transcript = stdout(&reveal);
    assert!(transcript.contains(&format!("chain_end: {root}")));
    assert!(transcript.contains("match: yes"));
    let m = fs::read(dir.join("m.bin")).unwrap();
    assert!(m.starts_with(b"WINNER:B"));
    assert_eq!(m.len(), 8 * 6);
}
