use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture(rel: &str) -> String {
    fixtures().join(rel).to_string_lossy().into_owned()
}

fn udneg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_udneg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn detect_writes_one_line_per_document() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.jsonl");
    let o = udneg(&[
        "detect",
        "--in",
        &fixture("corpus/reports.conllu"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 20);
    assert_eq!(text, fs::read_to_string(fixture("corpus/expected.jsonl")).unwrap());
}

#[test]
fn detect_on_example_sentences_matches_golden_file() {
    let o = udneg(&[
        "detect",
        "--rules",
        &fixture("examples/rules.tsv"),
        "--lexicon",
        &fixture("examples/lexicon.tsv"),
        "--in",
        &fixture("examples/*.conllu"),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        fs::read_to_string(fixture("examples/expected.jsonl")).unwrap()
    );
}

#[test]
fn detect_merges_files_and_sorts_by_doc_id() {
    let o = udneg(&[
        "detect",
        "--in",
        &fixture("regression/pair.conllu"),
        "--in",
        &fixture("examples/sentences.conllu"),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let ids: Vec<String> = stdout(&o)
        .lines()
        .map(|l| l.split('"').nth(3).unwrap().to_string())
        .collect();
    assert_eq!(
        ids,
        [
            "double_negation",
            "ex_clear_of",
            "ex_no_evidence",
            "ex_not_excluded",
            "not_terribly_cooperative"
        ]
    );
}

#[test]
fn detect_without_inputs_is_a_usage_error() {
    let o = udneg(&["detect"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--in"));
    let o = udneg(&["detect", "--in", &fixture("nothing/*.conllu")]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn failed_detect_leaves_no_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conllu");
    fs::write(&bad, "1\tword\tword\tNN\tNN\t_\t7\tdep\t_\t_\n").unwrap();
    let out = dir.path().join("out.jsonl");
    fs::write(&out, "stale\n").unwrap();
    let o = udneg(&["detect", "--in", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
    assert!(stderr(&o).contains("bad.conllu"), "{}", stderr(&o));
}

#[test]
fn duplicate_documents_across_files_are_rejected() {
    let path = fixture("examples/sentences.conllu");
    let o = udneg(&["detect", "--in", &path, "--in", &path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("ex_clear_of"));
}

#[test]
fn bad_rule_pattern_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let rules = dir.path().join("rules.tsv");
    fs::write(&rules, "r1\tnegation\t{} <neg {lemma:/no/\n").unwrap();
    let o = udneg(&[
        "detect",
        "--rules",
        rules.to_str().unwrap(),
        "--in",
        &fixture("examples/sentences.conllu"),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("at byte"), "{}", stderr(&o));
}

#[test]
fn eval_prints_frozen_reports() {
    let results = fixture("corpus/expected.jsonl");
    let gold = fixture("corpus/gold.jsonl");
    let o = udneg(&["eval", "--in", &results, "--gold", &gold, "--mode", "positive"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        fs::read_to_string(fixture("corpus/expected_positive.txt")).unwrap()
    );
    assert!(stdout(&o).contains("Overall (micro)       92.3  80.0  85.7    12     1     3"));
    let o = udneg(&["eval", "--in", &results, "--gold", &gold, "--mode", "negation"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        fs::read_to_string(fixture("corpus/expected_negation.txt")).unwrap()
    );
}

#[test]
fn eval_of_gold_against_itself_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let results = fixture("corpus/expected.jsonl");
    let gold = dir.path().join("gold.jsonl");
    // gold derived from the system output itself
    let mut lines = String::new();
    for line in fs::read_to_string(&results).unwrap().lines() {
        let id = line.split('"').nth(3).unwrap();
        let labels = &line[line.find("\"labels\":{").unwrap() + 10..line.find("},\"mentions\"").unwrap()];
        let positives: Vec<String> = labels
            .split(',')
            .filter(|kv| kv.ends_with("\"positive\""))
            .map(|kv| kv.split(':').next().unwrap().to_string())
            .collect();
        lines.push_str(&format!(
            "{{\"doc_id\":\"{id}\",\"positive_findings\":[{}]}}\n",
            positives.join(",")
        ));
    }
    fs::write(&gold, lines).unwrap();
    let o = udneg(&["eval", "--in", &results, "--gold", gold.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("Overall (micro)      100.0 100.0 100.0"),
        "{}",
        stdout(&o)
    );

    // the same gold has no negation annotations
    let o = udneg(&[
        "eval",
        "--in",
        &results,
        "--gold",
        gold.to_str().unwrap(),
        "--mode",
        "negation",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn eval_reports_mismatched_ids() {
    let dir = tempfile::tempdir().unwrap();
    let gold = dir.path().join("gold.jsonl");
    let text = fs::read_to_string(fixture("corpus/gold.jsonl")).unwrap();
    fs::write(&gold, text.lines().skip(1).collect::<Vec<_>>().join("\n")).unwrap();
    let o = udneg(&[
        "eval",
        "--in",
        &fixture("corpus/expected.jsonl"),
        "--gold",
        gold.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("report01"), "{}", stderr(&o));
}

#[test]
fn match_prints_the_clear_of_binding() {
    let o = udneg(&[
        "match",
        "--pattern",
        "{} <nmod:of {lemma:/clear/}",
        "--in",
        &fixture("examples/sentences.conllu"),
        "--anchor",
        "effusion",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "ex_clear_of s1 anchor 9 (effusion)\n  0->9 1->3  scope {3,9}\n1 binding(s)\n"
    );
}

#[test]
fn match_by_index_and_trivial_pattern() {
    let path = fixture("examples/sentences.conllu");
    let o = udneg(&["match", "--pattern", "{}", "--in", &path]);
    assert!(o.status.success());
    // every vertex of the three sentences: 10 + 7 + 5
    assert!(stdout(&o).ends_with("22 binding(s)\n"), "{}", stdout(&o));
    let o = udneg(&[
        "match",
        "--pattern",
        "{} < ({lemma:/exclude/} >neg {word:/not/})",
        "--in",
        &path,
        "--anchor",
        "2",
    ]);
    assert!(o.status.success());
    assert!(
        stdout(&o).contains("ex_not_excluded s1 anchor 2 (infiltrate)\n  0->2 1->5 2->4  scope {2,4,5}\n"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn malformed_pattern_exits_two_with_offset() {
    let o = udneg(&["match", "--pattern", "{", "--in", &fixture("examples/sentences.conllu")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("at byte 0"), "{}", stderr(&o));
    let o = udneg(&[
        "match",
        "--pattern",
        "{} <nmod:of {lemma:/clear/} )",
        "--in",
        &fixture("examples/sentences.conllu"),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("at byte 28"), "{}", stderr(&o));
}

#[test]
fn unknown_flag_exits_one_and_help_exits_zero() {
    assert_eq!(udneg(&["detect", "--frobnicate"]).status.code(), Some(1));
    assert_eq!(udneg(&["--help"]).status.code(), Some(0));
    assert_eq!(udneg(&[]).status.code(), Some(1));
}
