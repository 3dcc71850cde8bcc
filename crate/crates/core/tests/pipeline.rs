mod support;

use morphtag::analysis::Tag;
use morphtag::io::{GraphFile, TagsFile};
use morphtag::pipeline::{Engine, Stage};
use morphtag::relations::IS_SYN;
use std::collections::BTreeSet;
use support::fixtures::{fixture, fixture_text, render_number};

fn words(text: &str, tags: &[Tag], label: &str) -> Vec<usize> {
    let toks = morphtag::morphology::tokenize(text);
    tags.iter()
        .filter(|t| t.label == label)
        .map(|t| toks.iter().position(|w| w.index == t.index).unwrap())
        .collect()
}

#[test]
fn direction_tags_and_matches() {
    let engine = Engine::load(&fixture("direction")).unwrap();
    let text = fixture_text("direction");
    let out = engine.run(&text).unwrap();
    assert_eq!(out.document.len(), 41);
    let tags = out.word_tags();
    assert_eq!(words(&text, &tags, "P"), vec![4, 8, 14, 27, 29, 30, 35]);
    assert_eq!(words(&text, &tags, "N"), vec![5, 15, 16]);
    assert_eq!(words(&text, &tags, "R"), vec![6, 13, 25, 32, 39]);
    assert_eq!(words(&text, &tags, "U"), vec![9, 22]);
    let spans: Vec<(usize, usize)> = out.matches.iter().map(|m| (m.start(), m.end())).collect();
    assert_eq!(spans, vec![(4, 10), (29, 36)]);
}

#[test]
fn direction_graph() {
    let engine = Engine::load(&fixture("direction")).unwrap();
    let out = engine.run(&fixture_text("direction")).unwrap();
    let g = &out.graph;
    let texts: BTreeSet<&str> = g.nodes.iter().map(|n| n.text.as_str()).collect();
    assert_eq!(
        texts,
        BTreeSet::from(["برج خليفة", "بالقرب", "التقاطع الأول", "دبيّ مول", "مقربة", "المبنى"])
    );
    let edges: BTreeSet<(String, String, String)> = g.edge_texts().into_iter().collect();
    let expect: BTreeSet<(String, String, String)> = [
        ("برج خليفة", "التقاطع الأول", "next to"),
        ("دبيّ مول", "المبنى", "near"),
        ("مقربة", "دبيّ مول", "PREP"),
        ("بالقرب", "التقاطع الأول", "from"),
        ("مقربة", "المبنى", "from this"),
        ("برج خليفة", "المبنى", IS_SYN),
    ]
    .into_iter()
    .map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string()))
    .collect();
    assert_eq!(edges, expect);
}

#[test]
fn narrator_chain() {
    let engine = Engine::load(&fixture("narrator")).unwrap();
    let out = engine.run(&fixture_text("narrator")).unwrap();
    let chains: Vec<_> = out.matches.iter().filter(|m| m.rule == "nchain").collect();
    assert_eq!(chains.len(), 1);
    assert_eq!((chains[0].start(), chains[0].end()), (0, 10));
    let narrators: Vec<&str> = chains[0]
        .tree
        .walk()
        .into_iter()
        .filter(|n| n.binding.as_deref() == Some("s2"))
        .map(|n| n.text.as_str())
        .collect();
    assert_eq!(narrators, vec!["قتيبة بن سعيد", "جرير", "عمارة بن القعقاع"]);
    let edges = out.graph.edge_texts();
    assert_eq!(
        edges,
        vec![
            ("قتيبة بن سعيد".to_string(), "جرير".to_string(), "حدثنا".to_string()),
            ("جرير".to_string(), "عمارة بن القعقاع".to_string(), "عن".to_string()),
        ]
    );
}

#[test]
fn number_normalization() {
    let engine = Engine::load(&fixture("numbers")).unwrap();
    for n in [1, 11, 20, 45, 100, 345, 1000, 1100, 2500, 100100, 300005, 345321, 999999] {
        let text = format!("دفع {} درهما", render_number(n, false));
        let out = engine.run(&text).unwrap();
        let values: Vec<String> = out.env.emitted.iter().map(|a| a.value.to_string()).collect();
        assert_eq!(values, vec![n.to_string()], "{n}: {text}");
    }
}

#[test]
fn numbers_separated_by_filler() {
    let engine = Engine::load(&fixture("numbers")).unwrap();
    let text = format!(
        "بلغ {} ثم {} ثم {}",
        render_number(21, true),
        render_number(3000, false),
        render_number(7, false)
    );
    let out = engine.run(&text).unwrap();
    let values: Vec<String> = out.env.emitted.iter().map(|a| a.value.to_string()).collect();
    assert_eq!(values, vec!["21", "3000", "7"]);
}

#[test]
fn run_is_deterministic() {
    let engine = Engine::load(&fixture("direction")).unwrap();
    let text = fixture_text("direction");
    let a = engine.run(&text).unwrap();
    let b = engine.run(&text).unwrap();
    assert_eq!(a.tags_file(None, None).to_json(), b.tags_file(None, None).to_json());
    assert_eq!(a.graph_file(None).to_json(), b.graph_file(None).to_json());
}

#[test]
fn outputs_round_trip() {
    let engine = Engine::load(&fixture("direction")).unwrap();
    let out = engine.run(&fixture_text("direction")).unwrap();
    let tags = out.tags_file(Some("text.txt".into()), Some("graph.json".into()));
    let json = tags.to_json();
    assert_eq!(TagsFile::from_json(&json).unwrap(), tags);
    tags.check_document(&fixture_text("direction")).unwrap();
    assert!(tags.check_document("other").is_err());
    let graph = out.graph_file(None);
    assert_eq!(GraphFile::from_json(&graph.to_json()).unwrap(), graph);
}

#[test]
fn golden_tags_file() {
    let engine = Engine::load(&fixture("direction")).unwrap();
    let out = engine.run(&fixture_text("direction")).unwrap();
    let actual = out.tags_file(Some("text.txt".into()), None).to_json();
    let path = support::fixtures::fixture_dir("direction").join("golden.tags.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    assert_eq!(actual, expected);
}

#[test]
fn empty_document() {
    let engine = Engine::load(&fixture("direction")).unwrap();
    let out = engine.run("").unwrap();
    assert!(out.matches.is_empty() && out.graph.nodes.is_empty());
    assert!(out.tags_file(None, None).tags.is_empty());
}

#[test]
fn missing_lexicon_fails_at_load() {
    let dir = tempfile::tempdir().unwrap();
    let src = std::fs::read_to_string(fixture("direction")).unwrap();
    let path = dir.path().join("project.json");
    std::fs::write(&path, src).unwrap();
    let err = Engine::load(&path).unwrap_err();
    assert_eq!(err.stage, Stage::Load);
}

#[test]
fn step_budget() {
    let engine = Engine::load(&fixture("direction")).unwrap().with_max_steps(10);
    let err = engine.run(&fixture_text("direction")).unwrap_err();
    assert_eq!(err.stage, Stage::Simulate);
}
