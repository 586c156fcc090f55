use proptest::prelude::*;
use snlu::rules::*;
use snlu::text::Taxonomy;

fn taxonomy() -> Taxonomy {
    serde_json::from_str(
        r#"{"categories": {"Exams": ["Exam Dates", "Exam Results"], "Colleges": ["College Fees"]},
            "entity_types": ["exam", "college", "city"]}"#,
    )
    .unwrap()
}

fn toks(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

fn rule(sub: usize, cat: usize, kind: RuleKind, pattern: &str, priority: i64) -> Rule {
    Rule {
        subcategory: sub,
        applies_to_category: cat,
        kind,
        pattern: toks(pattern),
        priority,
    }
}

#[test]
fn empty_rule_list_never_matches() {
    assert_eq!(apply_rules(&toks("anything at all"), 0, &[]), None);
}

#[test]
fn keyword_on_tag_token() {
    let rules = [rule(1, 0, RuleKind::Keyword, "<exam>", 5)];
    assert_eq!(apply_rules(&toks("when is <exam> result"), 0, &rules), Some(1));
    assert_eq!(apply_rules(&toks("when is <exam> result"), 1, &rules), None);
    assert_eq!(apply_rules(&toks("when is exam result"), 0, &rules), None);
}

#[test]
fn phrase_needs_contiguous_run() {
    let rules = [rule(0, 0, RuleKind::Phrase, "exam date", 1)];
    assert_eq!(apply_rules(&toks("the exam date of <exam>"), 0, &rules), Some(0));
    assert_eq!(apply_rules(&toks("exam the date"), 0, &rules), None);
    assert_eq!(apply_rules(&toks("date exam"), 0, &rules), None);
}

#[test]
fn highest_priority_then_lowest_index_wins() {
    let rules = [
        rule(0, 0, RuleKind::Keyword, "date", 5),
        rule(1, 0, RuleKind::Keyword, "result", 9),
    ];
    assert_eq!(apply_rules(&toks("date and result"), 0, &rules), Some(1));
    let tied = [
        rule(1, 0, RuleKind::Keyword, "result", 3),
        rule(0, 0, RuleKind::Keyword, "date", 3),
    ];
    assert_eq!(apply_rules(&toks("date and result"), 0, &tied), Some(1));
}

#[test]
fn file_format_round_trips_and_validates() {
    let tax = taxonomy();
    let json = r#"[
        {"category": "Exams", "subcategory": "Exam Results", "kind": "keyword", "pattern": "<exam>", "priority": 5},
        {"category": "Colleges", "subcategory": "College Fees", "kind": "phrase", "pattern": "Fee Structure", "priority": 2}
    ]"#;
    let set = RuleSet::parse(json, &tax).unwrap();
    assert_eq!(set.rules[1].pattern, ["fee", "structure"]);
    assert_eq!(set.apply(&toks("fee structure of <college>"), 1), Some(2));
    let again = RuleSet::from_records(&set.to_records(&tax), &tax).unwrap();
    assert_eq!(again, set);

    let bad = [
        r#"[{"category": "Exams", "subcategory": "College Fees", "kind": "keyword", "pattern": "x", "priority": 1}]"#,
        r#"[{"category": "Nope", "subcategory": "Exam Dates", "kind": "keyword", "pattern": "x", "priority": 1}]"#,
        r#"[{"category": "Exams", "subcategory": "Exam Dates", "kind": "keyword", "pattern": "  ", "priority": 1}]"#,
        r#"[{"category": "Exams", "subcategory": "Exam Dates", "kind": "keyword", "pattern": "two words", "priority": 1}]"#,
        r#"[{"category": "Exams", "subcategory": "Exam Dates", "kind": "regex", "pattern": "x", "priority": 1}]"#,
    ];
    for b in bad {
        assert!(RuleSet::parse(b, &tax).is_err(), "{b}");
    }
}

fn arb_rule() -> impl Strategy<Value = Rule> {
    (0usize..3, 0usize..3, any::<bool>(), prop::collection::vec(0u8..4, 1..3), -3i64..4).prop_map(
        |(sub, cat, kw, pat, priority)| Rule {
            subcategory: sub,
            applies_to_category: cat,
            kind: if kw { RuleKind::Keyword } else { RuleKind::Phrase },
            pattern: if kw { vec![format!("t{}", pat[0])] } else { pat.iter().map(|p| format!("t{p}")).collect() },
            priority,
        },
    )
}

fn arb_query() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec((0u8..5).prop_map(|t| format!("t{t}")), 1..8)
}

proptest! {
    #[test]
    fn other_categories_never_fire(rules in prop::collection::vec(arb_rule(), 0..8), q in arb_query(), cat in 0usize..3) {
        let only_other: Vec<Rule> = rules.into_iter().filter(|r| r.applies_to_category != cat).collect();
        prop_assert_eq!(apply_rules(&q, cat, &only_other), None);
    }

    #[test]
    fn non_firing_rules_are_irrelevant(
        rules in prop::collection::vec(arb_rule(), 0..8),
        extra in arb_rule(),
        pos in 0usize..9,
        q in arb_query(),
        cat in 0usize..3,
    ) {
        prop_assume!(extra.applies_to_category != cat || !extra.fires(&q));
        let before = apply_rules(&q, cat, &rules);
        let mut with = rules.clone();
        with.insert(pos.min(rules.len()), extra);
        prop_assert_eq!(apply_rules(&q, cat, &with), before);
    }

    #[test]
    fn matches_brute_force(rules in prop::collection::vec(arb_rule(), 0..8), q in arb_query(), cat in 0usize..3) {
        let fired: Vec<(usize, &Rule)> = rules.iter().enumerate()
            .filter(|(_, r)| r.applies_to_category == cat && r.fires(&q))
            .collect();
        let expected = fired.iter()
            .max_by_key(|(i, r)| (r.priority, std::cmp::Reverse(*i)))
            .map(|(_, r)| r.subcategory);
        prop_assert_eq!(apply_rules(&q, cat, &rules), expected);
    }
}
