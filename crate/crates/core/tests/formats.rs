use autonomy_core::adjudicator::TaxCase;
use autonomy_core::court::{default_constitution, replay, run_simulation, Constitution, RequestType};
use autonomy_core::formats::{
    export_trace, parse_case_file, parse_cases, parse_constitution, parse_replay_script,
    parse_trace, serialize_cases, serialize_constitution, serialize_replay_script, ReplayScript,
    SAMPLE_CASES, REFERENCE_CONSTITUTION,
};
use autonomy_core::money::Money;
use proptest::prelude::*;

#[test]
fn reference_constitution_matches_default() {
    let (parsed, warnings) = parse_constitution(REFERENCE_CONSTITUTION).unwrap();
    assert_eq!(parsed, default_constitution());
    assert!(warnings.is_empty());
}

#[test]
fn bundled_cases_round_trip() {
    let cases = parse_cases(SAMPLE_CASES).unwrap();
    assert_eq!(cases.len(), 4);
    assert_eq!(parse_cases(&serialize_cases(&cases)).unwrap(), cases);
}

#[test]
fn case_entries_remember_their_lines() {
    let text = "# header\n\n{\"plaintiff\":\"A\",\"tax_base\":\"1\",\"tax_paid\":\"0\",\"assessed_debt\":\"0\",\"assessed_penalty\":\"0\"}\n";
    assert_eq!(parse_case_file(text).unwrap()[0].line, 3);
}

#[test]
fn malformed_inputs_name_line_and_field() {
    let good = r#"{"plaintiff":"A","tax_base":"1","tax_paid":"0","assessed_debt":"0","assessed_penalty":"0"}"#;
    let cases = [
        (r#"{"plaintiff":"A","tax_base":"1.234","tax_paid":"0","assessed_debt":"0","assessed_penalty":"0"}"#, "tax_base"),
        (r#"{"plaintiff":"A","tax_base":"1","tax_paid":"-1","assessed_debt":"0","assessed_penalty":"0"}"#, "tax_paid"),
        (r#"{"plaintiff":"A","tax_base":"1","tax_paid":"0","assessed_debt":"x","assessed_penalty":"0"}"#, "assessed_debt"),
        (r#"{"plaintiff":"A","tax_base":"1","tax_paid":"0","assessed_debt":"0","assessed_penalty":"2000000000000.00"}"#, "assessed_penalty"),
        (r#"{"plaintiff":" ","tax_base":"1","tax_paid":"0","assessed_debt":"0","assessed_penalty":"0"}"#, "plaintiff"),
        (r#"{"plaintiff":"A","tax_base":1,"tax_paid":"0","assessed_debt":"0","assessed_penalty":"0"}"#, "record"),
        (r#"{"plaintiff":"A","tax_base":"1","tax_paid":"0","assessed_debt":"0","assessed_penalty":"0","extra":"1"}"#, "record"),
        ("not json", "record"),
    ];
    for (bad, field) in cases {
        let text = format!("{good}\n# comment\n{bad}\n{good}\n");
        let err = parse_case_file(&text).unwrap_err();
        assert_eq!((err.line, err.field.as_str()), (3, field), "{bad}");
        assert!(err.to_string().starts_with("line 3: "));
    }

    let constitution_errors = [
        ("name A\nallow sysadmin deactivate sysadmin\n", 2),
        ("allow sysadmin deactivate system\npermit sysadmin deactivate program\n", 2),
        ("deny program deactivate system\n\ndeny program deactivate system\n", 3),
        ("name A\nname B\n", 2),
        ("allow sysadmin reboot system\n", 1),
    ];
    for (bad, line) in constitution_errors {
        assert_eq!(parse_constitution(bad).unwrap_err().line, line, "{bad}");
    }

    let script_errors = [
        ("knowledge allow\ncase 0\n", 1),
        ("knowledge 1 1 1 1 1 1 1 1 1 1 1 1\ncase 12\n", 2),
        ("knowledge 1 1 1 1 1 1 1 1 1 1 1 1\ncase 0\nsleep\n", 3),
        ("case 0\n", 1),
        ("knowledge 1 1 1 1 1 1 1 1 1 1 1 maybe\ncase 0\n", 1),
    ];
    for (bad, line) in script_errors {
        assert_eq!(parse_replay_script(bad).unwrap_err().line, line, "{bad}");
    }
}

#[test]
fn partial_constitution_warns_and_denies() {
    let (c, warnings) = parse_constitution("allow program uninstall program\n").unwrap();
    assert_eq!(warnings.len(), 11);
    assert_eq!(c.permissions().iter().filter(|&&a| a).count(), 1);
}

#[test]
fn trace_round_trip() {
    let trace = run_simulation(&default_constitution(), 3, 300).unwrap();
    let export = export_trace(&trace);
    assert_eq!(export.log, trace.log());
    assert_eq!(parse_trace(&export.structured).unwrap(), trace);
}

#[test]
fn tampered_trace_is_rejected() {
    let trace = run_simulation(&default_constitution(), 3, 20).unwrap();
    let structured = export_trace(&trace).structured;
    let tampered = structured.replacen("\"lawyer_correct\":true", "\"lawyer_correct\":false", 1);
    assert_ne!(tampered, structured);
    assert!(parse_trace(&tampered).is_err());
}

fn amount() -> impl Strategy<Value = Money> {
    (0i64..=100_000_000_000_000).prop_map(|c| Money::from_cents(c).unwrap())
}

fn tax_case() -> impl Strategy<Value = TaxCase> {
    ("[A-Za-z\"\\\\ .,'&é]{0,12}[A-Za-z]", amount(), amount(), amount(), amount())
        .prop_map(|(name, a, b, c, d)| TaxCase::new(name, a, b, c, d).unwrap())
}

fn constitution() -> impl Strategy<Value = Constitution> {
    ("[A-Za-z0-9()]{1,8}( [A-Za-z0-9()]{1,8}){0,3}", proptest::array::uniform12(any::<bool>()))
        .prop_map(|(name, p)| Constitution::new(name, p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn cases_round_trip(cases in proptest::collection::vec(tax_case(), 0..20)) {
        prop_assert_eq!(parse_cases(&serialize_cases(&cases)).unwrap(), cases);
    }

    #[test]
    fn constitutions_round_trip(c in constitution()) {
        let (parsed, warnings) = parse_constitution(&serialize_constitution(&c)).unwrap();
        prop_assert_eq!(parsed, c);
        prop_assert!(warnings.is_empty());
    }

    #[test]
    fn traces_round_trip(c in constitution(), seed in any::<u64>(), n in 1usize..200) {
        let trace = run_simulation(&c, seed, n).unwrap();
        prop_assert_eq!(parse_trace(&export_trace(&trace).structured).unwrap(), trace);
    }

    #[test]
    fn replay_traces_round_trip(
        c in constitution(),
        knowledge in proptest::array::uniform12(any::<bool>()),
        seq in proptest::collection::vec(0usize..12, 1..100),
    ) {
        let cases: Vec<RequestType> = seq.iter().map(|&i| RequestType::from_index(i).unwrap()).collect();
        let trace = replay(&c, knowledge, &cases).unwrap();
        prop_assert_eq!(parse_trace(&export_trace(&trace).structured).unwrap(), trace);
    }

    #[test]
    fn scripts_round_trip(
        knowledge in proptest::array::uniform12(any::<bool>()),
        seq in proptest::collection::vec(0usize..12, 1..100),
        builtin in any::<bool>(),
    ) {
        let script = ReplayScript {
            constitution: builtin.then(|| "builtin".to_string()),
            knowledge,
            cases: seq.iter().map(|&i| RequestType::from_index(i).unwrap()).collect(),
        };
        prop_assert_eq!(parse_replay_script(&serialize_replay_script(&script)).unwrap(), script);
    }
}
