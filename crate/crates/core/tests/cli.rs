use std::path::Path;

use subsense::cli::{self, EXIT_BAD_INPUT, EXIT_OK, EXIT_UNSAT, EXIT_VERIFY_FAILED};
use subsense::format::read_instance;
use subsense::trace::parse_trace;

fn run(args: &[&str]) -> i32 {
    cli::main_with(std::iter::once("subsense").chain(args.iter().copied()))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_reduce_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("r.json");
    let out = dir.path().join("out.json");
    let trace = dir.path().join("trace.json");
    let stats = dir.path().join("stats.csv");
    let gen = [
        "gen",
        "random",
        "--n",
        "6",
        "--d",
        "4",
        "--density",
        "0.6",
        "--tightness",
        "0.7",
        "--seed",
        "3",
    ];
    assert_eq!(run(&[&gen[..], &["-o", s(&inst)]].concat()), EXIT_OK);

    let code = run(&[
        "reduce",
        s(&inst),
        "--rules",
        "ss,cns,scss",
        "-o",
        s(&out),
        "--trace",
        s(&trace),
        "--stats",
        s(&stats),
    ]);
    assert!(code == EXIT_OK || code == EXIT_UNSAT);
    assert_eq!(
        run(&["verify", s(&inst), s(&trace), "--reduced", s(&out)]),
        EXIT_OK
    );

    let (name, steps) = parse_trace(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(name, read_instance(&inst).unwrap().name());
    let mut rd = csv::Reader::from_path(&stats).unwrap();
    let head = rd.headers().unwrap().clone();
    assert_eq!(&head[7], "eliminations");
    let row = rd.records().next().unwrap().unwrap();
    assert_eq!(&row[1], "ss,cns,scss");
    assert_eq!(row[7].parse::<usize>().unwrap(), steps.len());

    // The reduced instance must not pass for the original.
    assert_eq!(
        run(&["verify", s(&inst), s(&trace), "--reduced", s(&inst)]),
        EXIT_VERIFY_FAILED
    );
}

#[test]
fn figure_fixtures_through_reduce() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let stats = dir.path().join("a.csv");
    assert_eq!(run(&["gen", "figure1a", "-o", s(&a)]), EXIT_OK);
    assert_eq!(
        run(&["reduce", s(&a), "--rules", "ss", "--stats", s(&stats)]),
        EXIT_OK
    );
    let mut rd = csv::Reader::from_path(&stats).unwrap();
    let row = rd.records().next().unwrap().unwrap();
    assert_eq!(&row[7], "4");

    let b = dir.path().join("b.json");
    let out = dir.path().join("b-out.json");
    assert_eq!(run(&["gen", "figure1b", "-o", s(&b)]), EXIT_OK);
    assert_eq!(read_instance(&b).unwrap(), subsense::generators::figure1b());
    assert_eq!(
        run(&["reduce", s(&b), "--rules", "cns,ss", "-o", s(&out)]),
        EXIT_OK
    );
    let reduced = read_instance(&out).unwrap();
    assert!((0..3).all(|i| reduced.domain_len(i) == 1));
}

#[test]
fn gen_is_byte_identical_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "gen",
        "random",
        "--n",
        "8",
        "--d",
        "4",
        "--density",
        "0.5",
        "--tightness",
        "0.6",
        "--seed",
        "7",
    ];
    let mut files = Vec::new();
    for name in ["x.json", "y.json"] {
        let path = dir.path().join(name);
        assert_eq!(run(&[&args[..], &["-o", s(&path)]].concat()), EXIT_OK);
        files.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn verify_rejects_a_tampered_trace() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("b.json");
    let trace = dir.path().join("t.json");
    assert_eq!(run(&["gen", "figure1b", "-o", s(&inst)]), EXIT_OK);
    assert_eq!(
        run(&["reduce", s(&inst), "--rules", "cns", "--trace", s(&trace)]),
        EXIT_OK
    );
    let text = std::fs::read_to_string(&trace)
        .unwrap()
        .replace("\"cns\"", "\"ns\"");
    std::fs::write(&trace, text).unwrap();
    assert_eq!(run(&["verify", s(&inst), s(&trace)]), EXIT_VERIFY_FAILED);
}

#[test]
fn solve_and_unsatisfiable_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let sat = dir.path().join("a.json");
    assert_eq!(run(&["gen", "figure1a", "-o", s(&sat)]), EXIT_OK);
    assert_eq!(run(&["solve", s(&sat), "--limit", "1"]), EXIT_OK);

    let unsat = dir.path().join("u.json");
    std::fs::write(
        &unsat,
        r#"{"name":"clash","variables":[{"id":0,"name":"a","domain":[0]},{"id":1,"name":"b","domain":[0]}],
            "constraints":[{"scope":[0,1],"allowed":[]}]}"#,
    )
    .unwrap();
    assert_eq!(run(&["solve", s(&unsat)]), EXIT_UNSAT);
    assert_eq!(run(&["reduce", s(&unsat), "--rules", "ss"]), EXIT_UNSAT);
}

#[test]
fn bad_input_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{ not json").unwrap();
    assert_eq!(run(&["reduce", s(&junk)]), EXIT_BAD_INPUT);
    assert_eq!(
        run(&["reduce", s(&dir.path().join("missing.json"))]),
        EXIT_BAD_INPUT
    );
    assert_eq!(run(&["frobnicate"]), EXIT_BAD_INPUT);

    let inst = dir.path().join("a.json");
    assert_eq!(run(&["gen", "figure1a", "-o", s(&inst)]), EXIT_OK);
    assert_eq!(
        run(&["reduce", s(&inst), "--rules", "ss,magic"]),
        EXIT_BAD_INPUT
    );
    assert_eq!(
        run(&["gen", "setcover", "--universe", "3", "--sets", "12"]),
        EXIT_BAD_INPUT
    );
}

#[test]
fn generated_families_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 6] = [
        &["gen", "figure1c"],
        &["gen", "cnsvsns", "--d", "5"],
        &["gen", "setcover", "--universe", "4", "--sets", "12,34,23"],
        &["gen", "geqchain", "--len", "4"],
        &["gen", "geqchain", "--len", "4", "--anchored"],
        &["gen", "random", "--n", "5", "--d", "3"],
    ];
    let want = [4, 2, 4, 4, 10, 5];
    for (k, args) in cases.iter().enumerate() {
        let path = dir.path().join(format!("{k}.json"));
        assert_eq!(
            run(&[args, &["-o", s(&path)][..]].concat()),
            EXIT_OK,
            "{args:?}"
        );
        assert_eq!(
            read_instance(&path).unwrap().num_vars(),
            want[k],
            "{args:?}"
        );
    }
}

#[test]
fn bench_csv_is_deterministic_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let csv = |name: &str| {
        let path = dir.path().join(name);
        let code = run(&[
            "bench",
            "--n",
            "6,8",
            "--d",
            "3,4",
            "--density",
            "0.5",
            "--tightness",
            "0.4,0.6",
            "--seeds",
            "2",
            "--rules",
            "ns,ss",
            "-o",
            s(&path),
        ]);
        assert_eq!(code, EXIT_OK);
        let text = std::fs::read_to_string(&path).unwrap();
        text.lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect::<Vec<_>>()
    };
    let a = csv("a.csv");
    assert_eq!(
        a[0],
        "family,n,d,density,tightness,seed,rule,eliminations,updates"
    );
    assert_eq!(a.len(), 1 + 2 * 2 * 2 * 2 * 2);
    assert_eq!(a, csv("b.csv"));
}
