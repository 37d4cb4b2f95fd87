use circov_cli::{emit_plotdata, parse_args, resolve, run_cli, ExperimentConfig, PlotKind, RunReport};

fn run(args: &[&str]) -> RunReport {
    let mut full = vec!["circov"];
    full.extend_from_slice(args);
    run_cli(full).unwrap()
}

fn resolved(args: &[&str]) -> ExperimentConfig {
    let mut full = vec!["circov"];
    full.extend_from_slice(args);
    let (cli, matches) = parse_args(full).unwrap();
    resolve(&cli, &matches).unwrap().0
}

fn temp_file(name: &str, body: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("circov-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn identical_invocations_give_identical_csv() {
    let args = ["cover-sim", "--n", "500", "--trials", "5", "--seed", "11", "--format", "csv"];
    let a = run(&args).table.to_csv().unwrap();
    let b = run(&args).table.to_csv().unwrap();
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 6);
    let other = run(&["cover-sim", "--n", "500", "--trials", "5", "--seed", "12"]).table.to_csv().unwrap();
    assert_ne!(a, other);
}

#[test]
fn json_reports_are_reproducible() {
    let args = ["tree-run", "--levels", "4..7", "--L", "1", "--trials", "3", "--seed", "5"];
    assert_eq!(run(&args).to_json().unwrap(), run(&args).to_json().unwrap());
}

#[test]
fn config_round_trip_is_idempotent() {
    let cfg = resolved(&["psi-regime", "--psi", "log:2", "--b", "3", "--seed", "9"]);
    let text = cfg.to_toml().unwrap();
    let back = ExperimentConfig::from_toml(&text, "psi-regime").unwrap();
    assert_eq!(back.to_toml().unwrap(), text);
    assert_eq!(back.global, cfg.global);
    assert_eq!(back.params, cfg.params);
}

#[test]
fn resolved_config_reruns_the_same_experiment() {
    let first = run(&["gap-profile", "--seq", "lacunary:3", "--n", "40", "--seed", "4"]);
    let path = temp_file("rerun.toml", &first.config.to_toml().unwrap());
    let again = run(&["gap-profile", "--config", path.to_str().unwrap()]);
    assert_eq!(first.config, again.config);
    assert_eq!(first.to_json().unwrap(), again.to_json().unwrap());
}

#[test]
fn flags_override_the_config_file() {
    let path = temp_file(
        "layer.toml",
        "seed = 7\ntrials = 3\n\n[tree-run]\nmass = \"4\"\nmode = \"thick\"\n",
    );
    let p = path.to_str().unwrap();
    let from_file = resolved(&["--config", p, "tree-run"]);
    assert_eq!(from_file.global.seed, 7);
    assert_eq!(from_file.global.trials, 3);
    assert_eq!(from_file.params["mass"], "4");
    assert_eq!(from_file.params["mode"], "thick");

    let overridden = resolved(&["--config", p, "tree-run", "--L", "8", "--seed", "2"]);
    assert_eq!(overridden.global.seed, 2);
    assert_eq!(overridden.global.trials, 3);
    assert_eq!(overridden.params["mass"], "8");
    assert_eq!(overridden.params["mode"], "thick");

    let before_subcommand = resolved(&["--seed", "3", "--config", p, "tree-run"]);
    assert_eq!(before_subcommand.global.seed, 3);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let path = temp_file("bad.toml", "[shepp]\nfamliy = \"harmonic:1\"\n");
    let err = run_cli(["circov", "--config", path.to_str().unwrap(), "shepp"]).unwrap_err();
    assert_eq!(err.kind(), "schema");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn library_errors_map_to_exit_codes() {
    let err = run_cli(["circov", "shepp", "--family", "nope"]).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let err = run_cli(["circov", "psi-regime", "--b", "1"]).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let body = serde_json::to_value(err.report()).unwrap();
    assert!(body["message"].as_str().is_some());
}

#[test]
fn empty_tables_render_header_only() {
    let report = run(&["cassels-search", "--mode", "chain", "--k-max", "0"]);
    let csv = report.table.to_csv().unwrap();
    assert_eq!(csv.lines().next(), Some("k,n,dist,n_times_dist"));
    let mut empty = report.clone();
    empty.table.rows.clear();
    assert_eq!(empty.table.to_csv().unwrap(), "k,n,dist,n_times_dist\r\n");
}

#[test]
fn plot_data_checks_the_report_kind() {
    let shepp = run(&["shepp", "--n", "2000"]);
    assert!(emit_plotdata(&shepp, PlotKind::Dimension).is_err());
    let decay = emit_plotdata(&shepp, PlotKind::SheppDecay).unwrap();
    assert_eq!(decay.columns, ["n", "ln_term"]);
    assert_eq!(decay.rows.len(), shepp.table.rows.len());

    let tree = run(&["tree-run", "--levels", "4..6", "--L", "1", "--trials", "2"]);
    let survival = emit_plotdata(&tree, PlotKind::Survival).unwrap();
    assert_eq!(survival.rows.len(), 3);

    let mut empty = tree.clone();
    empty.table.rows.clear();
    let t = emit_plotdata(&empty, PlotKind::Survival).unwrap();
    assert_eq!(t.to_csv().unwrap(), "level,mean_survivors,threshold\r\n");
}

#[test]
fn dimension_plot_carries_the_fit() {
    let report = run(&["dim-estimate", "--depths", "6..9", "--seeds", "2", "--seed", "3"]);
    let plot = emit_plotdata(&report, PlotKind::Dimension).unwrap();
    assert_eq!(plot.columns, ["log_inverse_scale", "ln_mean_count", "fit"]);
    assert!(plot.rows.iter().all(|r| r[2].is_number()));
}

#[test]
fn uniform_search_is_deterministic_in_the_seed() {
    let args = ["cassels-search", "--n", "5000", "--grid", "50", "--trials", "2", "--seed", "21"];
    let a = run(&args);
    assert_eq!(a.table.to_csv().unwrap(), run(&args).table.to_csv().unwrap());
    assert_eq!(a.table.rows.len(), 2);
}
