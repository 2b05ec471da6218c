//! Frozen values on the bundled fixture corpora. Expected counts were tallied by
//! hand from the gold file, document by document (see fixtures/corpus/README.md).

use std::fs;
use std::path::PathBuf;

use udneg_core::conllu::parse_conllu_str;
use udneg_core::detector::write_results;
use udneg_core::eval::{eval_negation, eval_positive, read_gold, report, GoldDocument};
use udneg_core::lexicon::load_lexicon_str;
use udneg_core::pattern::load_rules_str;
use udneg_core::{default_engine, Category, Document, Engine, FindingMention, FindingType, Status};

fn fixture(rel: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(rel);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn corpus() -> Vec<Document> {
    parse_conllu_str(&fixture("corpus/reports.conllu"), "reports").unwrap()
}

fn gold() -> Vec<GoldDocument> {
    read_gold(fixture("corpus/gold.jsonl").as_bytes()).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12
}

#[test]
fn corpus_has_twenty_documents() {
    let docs = corpus();
    assert_eq!(docs.len(), 20);
    assert_eq!(gold().len(), 20);
}

#[test]
fn positive_findings_match_hand_count() {
    let results = default_engine().detect_corpus(&corpus());
    let e = eval_positive(&results, &gold()).unwrap();
    assert_eq!((e.overall.tp, e.overall.fp, e.overall.fn_), (12, 1, 3));
    assert!(close(e.overall.precision, 12.0 / 13.0));
    assert!(close(e.overall.recall, 0.8));
    assert!(close(e.overall.f1, 24.0 / 28.0));

    let counts = |t: FindingType| {
        let p = e.per_type[&t];
        (p.tp, p.fp, p.fn_)
    };
    assert_eq!(counts(FindingType::Cardiomegaly), (2, 0, 1));
    assert_eq!(counts(FindingType::Effusion), (2, 0, 1));
    assert_eq!(counts(FindingType::Atelectasis), (0, 0, 1));
    assert_eq!(counts(FindingType::Pneumothorax), (0, 1, 0));
    for t in [
        FindingType::Edema,
        FindingType::Emphysema,
        FindingType::Nodule,
        FindingType::Hernia,
        FindingType::Fibrosis,
        FindingType::PleuralThickening,
        FindingType::Mass,
        FindingType::Infiltration,
    ] {
        assert_eq!(counts(t), (1, 0, 0), "{t}");
    }
    assert_eq!(counts(FindingType::Consolidation), (0, 0, 0));
    assert_eq!(counts(FindingType::Pneumonia), (0, 0, 0));
    // twelve types have support; all but Atelectasis and Pneumothorax have P=1
    assert!(close(e.macro_avg.precision, 10.0 / 12.0));
}

#[test]
fn negations_match_hand_count() {
    let results = default_engine().detect_corpus(&corpus());
    let e = eval_negation(&results, &gold()).unwrap();
    assert_eq!((e.overall.tp, e.overall.fp, e.overall.fn_), (10, 1, 1));
    assert!(close(e.overall.precision, 10.0 / 11.0));
    assert!(close(e.overall.recall, 10.0 / 11.0));
    assert!(close(e.overall.f1, 10.0 / 11.0));
    let p = e.per_type[&FindingType::Effusion];
    // report06 is the false positive (double negation)
    assert_eq!((p.tp, p.fp, p.fn_), (3, 1, 0));
    let p = e.per_type[&FindingType::Pneumothorax];
    // report13 ("is not seen") is missed
    assert_eq!((p.tp, p.fp, p.fn_), (3, 0, 1));
}

#[test]
fn disabling_uncertainty_rules_trades_precision_for_recall() {
    let docs = corpus();
    let gold = gold();
    let engine = default_engine();
    let full = eval_positive(&engine.detect_corpus(&docs), &gold).unwrap().overall;
    let ablated = eval_positive(&engine.without(Category::Uncertainty).detect_corpus(&docs), &gold)
        .unwrap()
        .overall;
    assert_eq!((ablated.tp, ablated.fp, ablated.fn_), (13, 5, 2));
    assert!(ablated.precision < full.precision);
    assert!(ablated.recall >= full.recall);
    assert!(ablated.f1 < full.f1);
}

#[test]
fn detection_output_matches_golden_file() {
    let results = default_engine().detect_corpus(&corpus());
    assert_eq!(write_results(&results), fixture("corpus/expected.jsonl"));
    let positive = eval_positive(&results, &gold()).unwrap();
    assert_eq!(
        report("Positive findings", &positive),
        fixture("corpus/expected_positive.txt")
    );
    let negation = eval_negation(&results, &gold()).unwrap();
    assert_eq!(
        report("Negated mentions", &negation),
        fixture("corpus/expected_negation.txt")
    );
}

fn example_engine() -> Engine {
    Engine::new(
        load_lexicon_str(&fixture("examples/lexicon.tsv")).unwrap(),
        load_rules_str(&fixture("examples/rules.tsv")).unwrap(),
    )
}

#[test]
fn example_sentences_are_negated_by_the_example_rules() {
    let docs = parse_conllu_str(&fixture("examples/sentences.conllu"), "sentences").unwrap();
    let engine = example_engine();
    let results = engine.detect_corpus(&docs);
    let mut got = Vec::new();
    for (d, r) in docs.iter().zip(&results) {
        assert_eq!(d.doc_id, r.doc_id);
        for m in &r.mentions {
            let word = d.sentences[0].vertex(m.head).unwrap().word.clone();
            got.push((r.doc_id.clone(), word, m.status, m.matched_rule.clone()));
        }
    }
    let want = [
        ("ex_clear_of", "infiltrates", "neg_clear_of"),
        ("ex_clear_of", "effusion", "neg_clear_of"),
        ("ex_no_evidence", "disease", "neg_no_evidence_of"),
        ("ex_not_excluded", "infiltrate", "neg_not_exclude"),
    ]
    .map(|(d, w, r)| (d.to_string(), w.to_string(), Status::Negative, Some(r.to_string())));
    assert_eq!(got, want);
    assert_eq!(write_results(&results), fixture("examples/expected.jsonl"));
}

#[test]
fn example_sentences_scopes() {
    let docs = parse_conllu_str(&fixture("examples/sentences.conllu"), "sentences").unwrap();
    let engine = example_engine();
    let scope = |doc: usize, head: usize| {
        let g = &docs[doc].sentences[0];
        let m = FindingMention::new(FindingType::Infiltration, "s1", (head, head), head);
        let (rule, b) = engine.explain(g, &m).into_iter().next().expect("a rule matches");
        (rule, b.scope.into_iter().collect::<Vec<_>>())
    };
    assert_eq!(scope(0, 9), ("neg_clear_of".into(), vec![3, 9]));
    assert_eq!(scope(1, 7), ("neg_no_evidence_of".into(), vec![3, 4, 7]));
    assert_eq!(scope(2, 2), ("neg_not_exclude".into(), vec![2, 4, 5]));
}

#[test]
fn scope_of_not_stops_at_its_own_clause() {
    let docs = parse_conllu_str(&fixture("regression/pair.conllu"), "regression").unwrap();
    let g = &docs[0].sentences[0];
    assert_eq!(docs[0].doc_id, "not_terribly_cooperative");
    let engine = default_engine();
    let at = |head: usize| {
        let m = FindingMention::new(FindingType::Mass, "s1", (head, head), head);
        engine.classify(g, &m)
    };
    assert_eq!(g.vertex(22).unwrap().word, "focused");
    let focused = at(22);
    assert_eq!(focused.status, Status::Positive);
    assert!(engine.explain(g, &focused).is_empty());
    // the word that "not" actually attaches to is negated
    assert_eq!(at(15).status, Status::Negative);
}

#[test]
fn double_negation_is_a_known_false_negation() {
    let docs = parse_conllu_str(&fixture("regression/pair.conllu"), "regression").unwrap();
    assert_eq!(docs[1].doc_id, "double_negation");
    let r = default_engine().detect(&docs[1]);
    assert_eq!(r.mentions.len(), 1);
    let m = &r.mentions[0];
    assert_eq!(
        (m.finding, m.head, m.status),
        (FindingType::Effusion, 7, Status::Negative)
    );
    assert_eq!(m.matched_rule.as_deref(), Some("neg_not_exclude"));
}
