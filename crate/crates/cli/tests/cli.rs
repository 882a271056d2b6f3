use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subseed"))
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

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap_or_else(|| panic!("no '{key}' in {text:?}"))
        .trim()
        .parse()
        .unwrap()
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("subseed-cli-{}-{name}", std::process::id()))
}

#[test]
fn sensitivity_output() {
    let o = run(&["sensitivity", "--seed", "###___##_##_##", "--model", "builtin:dt1", "--length", "64"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(field(&text, "sensitivity"), 0.4596);
    assert_eq!(field(&text, "denominator"), 1.0);

    let o = run(&[
        "sensitivity", "--seed", "#", "--alphabet", "binary", "--model", "bernoulli:1=0.5,0=0.5",
        "--length", "3", "--tsv",
    ]);
    assert_eq!(stdout(&o), "seed\tnumerator\tdenominator\tsensitivity\n#\t0.8750\t1.0000\t0.8750\n");
}

#[test]
fn zero_length_has_no_hits() {
    let o = run(&["sensitivity", "--seed", "#", "--model", "builtin:dt2", "--length", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(field(&stdout(&o), "sensitivity"), 0.0);
}

#[test]
fn dp_agrees_with_oracle_command() {
    for model in ["bernoulli:1=0.6,h=0.3,0=0.1", "builtin:nt"] {
        let o = run(&["oracle", "--seed", "#@_#", "--model", model, "--length", "7"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let brute: f64 = stdout(&o).trim().parse().unwrap();
        let o = run(&[
            "sensitivity", "--seed", "#@_#", "--model", model, "--length", "7", "--precision", "12",
        ]);
        let dp = field(&stdout(&o), "sensitivity");
        assert!((dp - brute).abs() < 1e-11, "{model}: {dp} vs {brute}");
    }
}

#[test]
fn exit_codes() {
    // usage
    assert_eq!(run(&["sensitivity", "--seed", "#"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    // data
    let o = run(&["sensitivity", "--seed", "#x#", "--model", "builtin:dt1", "--length", "8"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown glyph"));
    let o = run(&[
        "sensitivity", "--seed", "#", "--alphabet", "binary", "--model", "builtin:dt1", "--length", "8",
    ]);
    assert_eq!(o.status.code(), Some(2));
    // resource
    let o = run(&["oracle", "--seed", "#", "--model", "builtin:dt1", "--length", "30"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&[
        "design", "--weight", "12", "--span-max", "60", "--alphabet", "binary", "--model",
        "bernoulli:1=0.5,0=0.5", "--length", "64",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn automaton_exports() {
    let o = run(&["automaton", "--seed", "#__#", "--kind", "subset", "--emit", "dot"]);
    assert_eq!(o.status.code(), Some(0));
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph"));
    assert!(dot.trim_end().ends_with('}'));
    assert_eq!(dot.matches('{').count(), dot.matches('}').count());
    let states = field(&stderr(&o), "states") as usize;
    assert!(states <= 12, "{states}");

    let count = |kind: &str| {
        let o = run(&["automaton", "--seed", "#@_@#_#", "--kind", kind, "--emit", "text"]);
        assert_eq!(o.status.code(), Some(0));
        field(&stderr(&o), "states") as usize
    };
    let (s, ac, m) = (count("subset"), count("aho"), count("minimized"));
    assert!(m <= s && s <= ac, "{m} {s} {ac}");
}

#[test]
fn train_round_trip() {
    let input = temp_path("corpus.txt");
    let model = temp_path("model.txt");
    std::fs::write(&input, "111h11111\n1h0111111\n111111h11\n").unwrap();
    let train = |kind: &str| {
        run(&[
            "train", "--kind", kind, "--in", input.to_str().unwrap(), "--out", model.to_str().unwrap(),
        ])
    };
    let m = format!("{}", model.display());

    // unobserved codon contexts stay zero, so the model cannot be built
    let o = train("dt2");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("never observed"));
    let o = run(&["sensitivity", "--seed", "##", "--model", &m, "--length", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("zero marginal"));

    let o = train("dt1");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(&["sensitivity", "--seed", "##", "--model", &m, "--length", "3", "--precision", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // P('1') by codon position: 7/9, 8/9, 8/9
    let s = field(&stdout(&o), "sensitivity");
    assert!((s - 632.0 / 729.0).abs() < 1e-9, "{s}");

    let o = run(&["train", "--kind", "bernoulli", "--in", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let spec = stdout(&o);
    let o = run(&[
        "sensitivity", "--seed", "#", "--model", &format!("bernoulli:{}", spec.trim()), "--length", "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(field(&stdout(&o), "sensitivity"), 0.8519); // 23 of 27 letters are matches

    std::fs::remove_file(&input).ok();
    std::fs::remove_file(&model).ok();
}

#[test]
fn design_lists_top_seeds() {
    let o = run(&[
        "design", "--weight", "3", "--span-max", "5", "--alphabet", "binary", "--model",
        "bernoulli:1=0.7,0=0.3", "--length", "10", "--top", "3", "--jobs", "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let seeds: Vec<&str> = text.lines().skip(1).filter_map(|l| l.split('\t').nth(1)).collect();
    assert_eq!(seeds, ["##_#", "#_##", "###"], "{text}");
}
