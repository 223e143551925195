use gmms_core::doc::{parse_policy, serialize_policy};
use gmms_core::{
    parse_allocation, parse_instance, serialize_allocation, serialize_instance, Allocation, Error, Instance,
    TieBreakPolicy, Value,
};
use proptest::prelude::*;

fn location(e: Error) -> String {
    match e {
        Error::Parse { location, .. } => location,
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn instance_accepts_mixed_literals() {
    let inst = parse_instance(br#"{"agents":2,"goods":3,"valuations":[[1,"0.5","1/3"],[0.25,"2e-1",7]]}"#).unwrap();
    assert_eq!(*inst.value(0, 2), Value::from_ratio(1, 3));
    assert_eq!(*inst.value(1, 0), Value::from_ratio(1, 4));
    assert_eq!(*inst.value(1, 1), Value::from_ratio(1, 5));
    assert_eq!(
        serialize_instance(&inst),
        b"{\"agents\":2,\"goods\":3,\"valuations\":[[1,\"0.5\",\"1/3\"],[\"0.25\",\"0.2\",7]]}\n"
    );
}

#[test]
fn instance_errors_name_the_field() {
    let cases: [(&[u8], &str); 7] = [
        (br#"{"agents":2,"goods":1,"valuations":[[1],[-1]]}"#, "valuations[1][0]"),
        (br#"{"agents":2,"goods":2,"valuations":[[1,2],[1]]}"#, "valuations[1]"),
        (br#"{"agents":0,"goods":0,"valuations":[]}"#, "agents"),
        (br#"{"agents":1,"goods":1,"valuations":[[1]],"extra":1}"#, "extra"),
        (br#"{"agents":1,"valuations":[[1]]}"#, "goods"),
        (br#"{"agents":1,"goods":1,"valuations":[["1/0"]]}"#, "valuations[0][0]"),
        (b"{\"agents\":1,\n\"goods\":}", "line 2 column 9"),
    ];
    for (text, loc) in cases {
        assert_eq!(location(parse_instance(text).unwrap_err()), loc, "{}", String::from_utf8_lossy(text));
    }
}

#[test]
fn allocation_errors() {
    assert_eq!(location(parse_allocation(br#"{"bundles":[[0,0],[1]]}"#).unwrap_err()), "bundles[0]");
    assert!(parse_allocation(br#"{"bundles":[[0],[0]]}"#).is_err());
    assert!(parse_allocation(br#"{"bundles":[[0.5]]}"#).is_err());
    let a = parse_allocation(br#"{"bundles":[[2,0],[]]}"#).unwrap();
    assert_eq!(serialize_allocation(&a), b"{\"bundles\":[[0,2],[]]}\n");
}

#[test]
fn policy_documents() {
    let p = parse_policy(br#"{"sources":[0,1]}"#).unwrap();
    assert_eq!(p.scripted_sources(), Some(&[0usize, 1][..]));
    assert_eq!(p.scripted_goods(), None);
    assert_eq!(parse_policy(b"{}").unwrap(), TieBreakPolicy::lowest_index());
    assert!(parse_policy(br#"{"sources":[-1]}"#).is_err());
}

fn value_strategy() -> impl Strategy<Value = Value> {
    prop_oneof![
        (0u64..1000).prop_map(Value::from_integer),
        (0u64..100_000, 1u64..1000).prop_map(|(p, q)| Value::from_ratio(p, q)),
        (0u64..10_000_000).prop_map(|p| Value::from_ratio(p, 1_000_000)),
    ]
}

proptest! {
    #[test]
    fn instance_round_trip(n in 1usize..5, m in 0usize..6, seed in prop::collection::vec(value_strategy(), 30)) {
        let rows: Vec<Vec<Value>> = (0..n).map(|i| (0..m).map(|g| seed[(i * m + g) % 30].clone()).collect()).collect();
        let inst = Instance::new(n, m, rows).unwrap();
        let text = serialize_instance(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(serialize_instance(&back), text);
    }

    #[test]
    fn allocation_round_trip(n in 1usize..5, owner in prop::collection::vec(0usize..5, 0..10)) {
        let owner: Vec<usize> = owner.into_iter().map(|o| o % n).collect();
        let a = Allocation::from_assignment(n, &owner);
        prop_assert_eq!(parse_allocation(&serialize_allocation(&a)).unwrap(), a);
    }

    #[test]
    fn policy_round_trip(s in prop::option::of(prop::collection::vec(0usize..9, 0..8)), g in prop::option::of(prop::collection::vec(0usize..9, 0..8))) {
        let p = TieBreakPolicy::from_scripts(s, g);
        prop_assert_eq!(parse_policy(&serialize_policy(&p)).unwrap(), p);
    }

    #[test]
    fn value_literal_round_trip(v in value_strategy()) {
        prop_assert_eq!(v.to_ratio_string().parse::<Value>().unwrap(), v.clone());
    }

    #[test]
    fn parsers_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..64)) {
        let _ = parse_instance(&bytes);
        let _ = parse_allocation(&bytes);
        let _ = parse_policy(&bytes);
        let _ = gmms_core::parse_gen_spec(&bytes);
    }
}
