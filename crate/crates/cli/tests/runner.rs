use std::process::Command;

use grouplab_cli::report::{from_json, to_json, write_csv, Aggregate, Rate, Report};
use grouplab_cli::{emit_report, run_experiment, CliError, Experiment, ExperimentConfig, Format};

fn run(group: &str, experiment: Experiment, trials: u64, seed: u64) -> Report {
    run_experiment(&ExperimentConfig::new(group, experiment, trials, seed)).unwrap()
}

fn body(mut r: Report) -> Report {
    r.duration_ms = 0;
    r
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

const ALL: [Experiment; 10] = [
    Experiment::Slide,
    Experiment::Feistel1,
    Experiment::Feistel2,
    Experiment::Feistel3,
    Experiment::PsiAdvantage,
    Experiment::EmAdvantage,
    Experiment::Efp,
    Experiment::Cp,
    Experiment::GameEquivalence,
    Experiment::BadEventRate,
];

fn small_group(e: Experiment) -> &'static str {
    if e == Experiment::GameEquivalence { "zmod:2" } else { "zmod:16" }
}

#[test]
fn same_config_same_body_across_thread_counts() {
    for e in ALL {
        let cfg = ExperimentConfig::new(small_group(e), e, 40, 9);
        let one = in_pool(1, || run_experiment(&cfg).unwrap());
        let four = in_pool(4, || run_experiment(&cfg).unwrap());
        let again = run_experiment(&cfg).unwrap();
        let one = body(one);
        assert_eq!(one, body(four), "{e:?}");
        assert_eq!(to_json(&one).unwrap(), to_json(&body(again)).unwrap(), "{e:?}");
    }
}

#[test]
fn different_seeds_differ() {
    let a = body(run("zmod:256", Experiment::Slide, 30, 1));
    let b = body(run("zmod:256", Experiment::Slide, 30, 2));
    assert_ne!(a.trials, b.trials);
}

#[test]
fn json_round_trips() {
    for e in ALL {
        let r = run(small_group(e), e, 12, 5);
        assert_eq!(from_json(&to_json(&r).unwrap()).unwrap(), r, "{e:?}");
    }
}

#[test]
fn json_has_fixed_top_level_fields() {
    let r = run("zmod:64", Experiment::Feistel2, 5, 1);
    let v: serde_json::Value = serde_json::from_str(&to_json(&r).unwrap()).unwrap();
    let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
    keys.sort();
    assert_eq!(keys, ["aggregate", "bound", "config", "duration_ms", "trials"]);
}

fn csv_rows(r: &Report) -> (Vec<String>, Vec<csv::StringRecord>) {
    let mut buf = Vec::new();
    write_csv(r, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let trailers = text.lines().filter(|l| l.starts_with('#')).map(String::from).collect();
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    (trailers, rd.records().map(Result::unwrap).collect())
}

#[test]
fn csv_has_header_plus_one_row_per_trial() {
    for e in ALL {
        let r = run(small_group(e), e, 17, 3);
        let (trailers, rows) = csv_rows(&r);
        assert_eq!(rows.len(), r.trials.len() + 1, "{e:?}");
        assert_eq!(&rows[0], vec!["trial", "verdict", "detail"]);
        for (row, t) in rows[1..].iter().zip(&r.trials) {
            assert_eq!(row[0].parse::<u64>().unwrap(), t.trial);
            assert_eq!(row[1].parse::<bool>().unwrap(), t.verdict);
            assert_eq!(&row[2], t.detail);
        }
        assert!(trailers.iter().any(|l| l.starts_with("# aggregate=")));
    }
}

#[test]
fn empty_trial_list_writes_valid_files() {
    let r = run("zmod:16", Experiment::Slide, 0, 1);
    assert!(r.trials.is_empty());
    let (_, rows) = csv_rows(&r);
    assert_eq!(rows.len(), 1);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.json");
    emit_report(&r, Format::Json, Some(&path)).unwrap();
    assert_eq!(from_json(&std::fs::read_to_string(&path).unwrap()).unwrap(), r);
}

#[test]
fn unwritable_path_names_the_path() {
    let r = run("zmod:16", Experiment::Slide, 1, 1);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let err = emit_report(&r, Format::Csv, Some(&path)).unwrap_err();
    assert!(matches!(err, CliError::Io { .. }));
    assert!(err.to_string().contains("out.csv"), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn aggregate_recomputes_from_trials() {
    for e in ALL {
        let r = run(small_group(e), e, 60, 8);
        let flag = |key: &str| -> Vec<bool> {
            r.trials.iter().map(|t| t.field(key).unwrap().parse().unwrap()).collect()
        };
        let verdicts: Vec<bool> = r.trials.iter().map(|t| t.verdict).collect();
        let rate = |v: &[bool]| Rate::count(v, |b| *b).unwrap();
        match &r.aggregate {
            Aggregate::SuccessRate(s) => assert_eq!(*s, rate(&verdicts), "{e:?}"),
            Aggregate::Distinguisher { cipher, random } => {
                assert_eq!(*cipher, rate(&verdicts));
                assert_eq!(*random, rate(&flag("random")));
            }
            Aggregate::Advantage { real, ideal, measured, .. } => {
                assert_eq!(*real, rate(&verdicts));
                assert_eq!(*ideal, rate(&flag("ideal")));
                assert_eq!(*measured, (real.rate - ideal.rate).abs());
            }
            Aggregate::BadEvents { badg, bad, .. } => {
                assert_eq!(*badg, rate(&flag("badg")));
                assert_eq!(*bad, rate(&flag("bad")));
            }
        }
    }
}

#[test]
fn slide_on_4096() {
    let r = run("zmod:4096", Experiment::Slide, 200, 42);
    assert_eq!(r.config.d, Some(64));
    let Aggregate::SuccessRate(s) = r.aggregate else { panic!("{:?}", r.aggregate) };
    // A slid pair exists with probability 1 − C(4032, 64)/C(4096, 64).
    let miss: f64 = (0..64).map(|i| (4096 - 64 - i) as f64 / (4096 - i) as f64).product();
    assert!((s.rate - (1.0 - miss)).abs() <= s.ci_halfwidth, "{} vs {}", s.rate, 1.0 - miss);
    assert!(r.trials.iter().all(|t| t.field("enc") == Some("64") && t.field("perm") == Some("64")));
    assert_eq!(r.bound.len(), 1);
}

#[test]
fn feistel3_always_wins_on_real_cipher() {
    let r = run("zmod:1024", Experiment::Feistel3, 500, 7);
    let Aggregate::Distinguisher { cipher, random } = r.aggregate else { panic!() };
    assert_eq!(cipher.rate, 1.0);
    assert!(random.rate <= 3.0 / 1024.0 + random.ci_halfwidth);
}

#[test]
fn advantage_reports_carry_bounds() {
    let psi = run("zmod:64", Experiment::PsiAdvantage, 50, 1);
    assert_eq!(psi.bound[0].name, "psi_bound");
    assert_eq!((psi.config.qc, psi.config.qf, psi.config.qg), (Some(3), Some(0), Some(0)));
    let em = run("zmod:64", Experiment::EmAdvantage, 50, 1);
    assert_eq!(em.bound[0].name, "em_bad_key_bound");
    assert_eq!((em.config.d, em.config.s, em.config.t), (Some(8), Some(9), Some(9)));
    // 2·9·9/64 exceeds one; the bound is reported clamped.
    assert_eq!(em.bound[0].exact, "1");
}

fn config_error(cfg: ExperimentConfig, field: &str) {
    let err = run_experiment(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 1, "{err}");
    assert!(err.to_string().contains(field), "{err}");
}

#[test]
fn invalid_configs_name_the_field() {
    config_error(ExperimentConfig::new("zmod:0", Experiment::Slide, 1, 1), "group");
    config_error(ExperimentConfig::new("quat:8", Experiment::Slide, 1, 1), "group");
    let mut c = ExperimentConfig::new("zmod:16", Experiment::PsiAdvantage, 10, 1);
    c.qc = Some(2);
    config_error(c, "qc");
    let mut c = ExperimentConfig::new("zmod:16", Experiment::Slide, 10, 1);
    c.d = Some(17);
    config_error(c, "d");
    config_error(ExperimentConfig::new("zmod:16", Experiment::EmAdvantage, 0, 1), "trials");
}

#[test]
fn capacity_errors_are_runtime_errors() {
    let err = run_experiment(&ExperimentConfig::new("zmod:64", Experiment::GameEquivalence, 5, 1)).unwrap_err();
    assert!(matches!(err, CliError::Run(grouplab::Error::Capacity { .. })), "{err}");
    assert_eq!(err.exit_code(), 2);
}

fn binary(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_grouplab")).args(args).output().unwrap()
}

#[test]
fn binary_exit_codes() {
    let ok = binary(&["--group", "zmod:16", "--experiment", "feistel1", "--trials", "3", "--seed", "1"]);
    assert_eq!(ok.status.code(), Some(0));
    let r = from_json(std::str::from_utf8(&ok.stdout).unwrap()).unwrap();
    assert_eq!(r.trials.len(), 3);

    let bad = binary(&["--group", "zmod:x", "--experiment", "slide", "--trials", "3", "--seed", "1"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("--group"));

    let missing = binary(&["--group", "zmod:16"]);
    assert_eq!(missing.status.code(), Some(1));

    let cap = binary(&["--group", "zmod:64", "--experiment", "game-equivalence", "--trials", "3", "--seed", "1"]);
    assert_eq!(cap.status.code(), Some(2));

    assert_eq!(binary(&["--help"]).status.code(), Some(0));
}

#[test]
fn binary_writes_csv_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let out = binary(&[
        "--group", "zmod:32", "--experiment", "bad-event-rate", "--trials", "25", "--seed", "4",
        "--format", "csv", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 26);
    assert!(text.contains("# bound="));
}
