mod common;

use std::path::PathBuf;
use std::process::{Command, Output};

use isv::format::{write_ballots, write_game, write_owners};
use isv::matching::OwnerList;
use isv::apportionment::ApprovalProfile;

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("isv-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, text: &str) -> String {
        let path = self.0.join(name);
        std::fs::write(&path, text).unwrap();
        path.to_str().unwrap().to_string()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn isv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isv")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn isv_on_triple_and_pair() {
    let dir = Scratch::new("pair_game");
    let game = dir.file("pair_game.txt", &write_game(&common::triple_and_pair()));
    let o = isv(&["isv", &game]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let players: Vec<&str> = text.lines().filter(|l| l.starts_with("player ")).collect();
    assert_eq!(players, ["player 0 1", "player 1 1", "player 2 0", "player 3 1", "player 4 0"]);
    assert!(text.ends_with("total 3\n"));
    let grants: Vec<&str> = text.lines().filter(|l| l.ends_with(" grant")).collect();
    assert_eq!(grants, ["step 5 0 grant", "step 6 1 grant", "step 7 3 grant"]);
}

#[test]
fn machine_output_carries_the_same_numbers() {
    let dir = Scratch::new("machine");
    let game = dir.file("pair_game.txt", &write_game(&common::triple_and_pair()));
    let o = isv(&["--format", "machine", "shapley", &game]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["command"], "shapley");
    assert_eq!(doc["players"], 5);
    assert_eq!(doc["values"], serde_json::json!(["2/3", "2/3", "2/3", "1/2", "1/2"]));
    assert_eq!(doc["total"], 3);
    let human = stdout(&isv(&["shapley", &game]));
    assert_eq!(human, "player 0 2/3\nplayer 1 2/3\nplayer 2 2/3\nplayer 3 1/2\nplayer 4 1/2\ntotal 3\n");
}

#[test]
fn dhondt_command() {
    let o = isv(&["dhondt", "100", "80", "30", "--seats", "8"]);
    assert_eq!(stdout(&o), "player 0 4\nplayer 1 3\nplayer 2 1\ntotal 8\n");
}

#[test]
fn check_half_game() {
    let dir = Scratch::new("half");
    let game = dir.file("half.txt", &write_game(&common::half_game()));
    let o = isv(&["check", &game, "--vector", "1/2,1/2,1/2,1/2"]);
    let text = stdout(&o);
    assert!(text.contains("convex: no\n"));
    assert!(text.contains("size-bounded: yes\n"));
    assert!(text.contains("in-core: yes\n"));
}

#[test]
fn allocate_apportion_and_coalition() {
    let dir = Scratch::new("alloc");
    let c = common::c;
    let owners = OwnerList::new(5, vec![c(&[0, 1, 2]), c(&[0, 1, 4]), c(&[2, 3]), c(&[2, 3, 4])]).unwrap();
    let path = dir.file("owners.txt", &write_owners(&owners));
    let text = stdout(&isv(&["allocate", &path]));
    assert!(text.contains("player 4 0\n"));
    assert!(text.ends_with("total 4\n"));
    assert_eq!(text.lines().filter(|l| l.contains(" -> ")).count(), 4);

    let names = ["A", "B", "C", "D", "E"].map(String::from).to_vec();
    let profile = ApprovalProfile::new(names, vec![(c(&[0, 1, 2]), 66), (c(&[3, 4]), 33)]).unwrap();
    let path = dir.file("ballots.txt", &write_ballots(&profile));
    let text = stdout(&isv(&["apportion", &path, "--seats", "3"]));
    assert!(text.contains("player 0 1\nplayer 1 1\nplayer 2 0\nplayer 3 1\nplayer 4 0\ntotal 3\n"));

    let path = dir.file("regions.txt", "parties 2 A B\nregion 3 100 80 | 30\n");
    let text = stdout(&isv(&["coalition", &path]));
    assert!(text.contains("value 0,1 3\n"));
    assert!(text.ends_with("total 3\n"));
}

#[test]
fn exit_codes() {
    let dir = Scratch::new("exit");
    let bad = dir.file("bad.txt", "players 2\n0 1\n0 oops\n");
    let o = isv(&["shapley", &bad]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("bad.txt") && err.contains("line 3"), "{err}");

    assert_eq!(isv(&["isv", "/nonexistent/file"]).status.code(), Some(1));
    assert_eq!(isv(&["frobnicate"]).status.code(), Some(1));

    let o = isv(&["sample", "3", "--oracle", "while read q; do echo nope; done", "--k", "10"]);
    assert_eq!(o.status.code(), Some(2));
    let o = isv(&["sample", "3", "--oracle", "exit 0", "--k", "10"]);
    assert_eq!(o.status.code(), Some(2));
    let o = isv(&["large", "--oracle", "while read q; do echo x1; done", "--n", "3", "--total", "2", "--k", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sample_through_the_oracle_subcommand() {
    let dir = Scratch::new("sample");
    let game = dir.file("pair_game.txt", &write_game(&common::triple_and_pair()));
    let oracle = format!("{} oracle {}", env!("CARGO_BIN_EXE_isv"), game);
    let o = isv(&["sample", "5", "--oracle", &oracle, "--exhaustive"]);
    assert_eq!(o.status.code(), Some(0));
    let values: Vec<f64> = stdout(&o)
        .lines()
        .filter_map(|l| l.strip_prefix("player "))
        .map(|l| l.split(' ').nth(1).unwrap().parse().unwrap())
        .collect();
    let exact = [2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 0.5, 0.5];
    for (a, b) in values.iter().zip(exact) {
        assert!((a - b).abs() < 1e-12);
    }
}
