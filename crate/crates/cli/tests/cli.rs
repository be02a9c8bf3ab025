use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn crsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crsym")).args(args).current_dir(root()).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("crsym-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_spec(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

fn block(re: &str, m: usize, eps: i64) -> String {
    format!(r#"{{"lambda":{{"re":"{re}","im":"0"}},"m":{m},"epsilon":{eps}}}"#)
}

fn assert_schema(schema: &str, files: &[&Path]) {
    let out = Command::new("python3")
        .arg(root().join("schema/validate.py"))
        .arg(schema)
        .args(files)
        .output()
        .expect("python3 with jsonschema is needed to check the schemas");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn canon_prints_the_maximal_pair() {
    let dir = scratch("canon");
    let spec = write_spec(&dir, "max.json", &format!(r#"{{"blocks":[{},{}]}}"#, block("0", 2, 1), block("0", 1, 1)));
    let out = dir.join("canon.json");
    let o = crsym(&["canon", &spec, "--float", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["n"], 4);
    assert_eq!(v["valid"], true);
    assert_eq!(v["h"].as_array().unwrap().len(), 3);
    assert_eq!(v["a"].as_array().unwrap().len(), 3);
    let one = |r: usize, c: usize| v["a"][r][c]["re"].as_str().unwrap().to_owned();
    let nonzero: Vec<_> = (0..3).flat_map(|r| (0..3).map(move |c| (r, c))).filter(|&(r, c)| one(r, c) != "0").collect();
    assert_eq!(nonzero.len(), 1);
    assert_schema("canon.schema.json", &[&out]);
}

#[test]
fn invalid_inputs_exit_with_input_code() {
    let dir = scratch("invalid");
    let cases = [
        write_spec(&dir, "broken.json", "{\"blocks\": ["),
        write_spec(&dir, "negative.json", &format!(r#"{{"blocks":[{}]}}"#, block("-1", 1, 1))),
        write_spec(&dir, "empty.json", r#"{"blocks":[]}"#),
        write_spec(&dir, "zero_size.json", &format!(r#"{{"blocks":[{}]}}"#, block("1", 0, 1))),
        dir.join("missing.json").to_str().unwrap().to_owned(),
    ];
    for spec in &cases {
        for cmd in ["canon", "report"] {
            let o = crsym(&[cmd, spec]);
            assert_eq!(o.status.code(), Some(2), "{cmd} {spec}: {}", stderr(&o));
            assert!(stderr(&o).contains(spec.as_str()), "{}", stderr(&o));
            assert!(o.stdout.is_empty());
        }
    }
}

#[test]
fn bad_flags_exit_with_input_code() {
    let spec = "catalog/specs/main-0001.json";
    assert_eq!(crsym(&["report", spec, "--k-max", "0"]).status.code(), Some(2));
    assert_eq!(crsym(&["report", spec, "--denominator", "0"]).status.code(), Some(2));
    assert_eq!(crsym(&["report", spec, "--bogus"]).status.code(), Some(2));
    assert_eq!(crsym(&["verify-paper", "--filter", "nothing-matches"]).status.code(), Some(2));
    assert_eq!(crsym(&["--help"]).status.code(), Some(0));
}

#[test]
fn report_is_byte_identical_across_runs_and_validates() {
    let dir = scratch("report");
    let spec = write_spec(&dir, "nil.json", &format!(r#"{{"blocks":[{},{}]}}"#, block("0", 2, 1), block("1", 1, 1)));
    let run = |name: &str| {
        let out = dir.join(name);
        let o = crsym(&["report", &spec, "--k-max", "3", "--float", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        out
    };
    let (a, b) = (run("a.json"), run("b.json"));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_schema("report.schema.json", &[&a]);

    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(v["regular"], false);
    let data = v["search"]["data"].as_array().unwrap();
    assert!(!data.is_empty());
    assert!(data.iter().all(|d| d["g1_zero"] == true));
    assert!(data.iter().all(|d| d["bounds"].as_array().unwrap().iter().all(|b| b["pass"] == true)));
}

#[test]
fn report_to_stdout_matches_file_output() {
    let dir = scratch("stdout");
    let out = dir.join("r.json");
    let spec = "catalog/specs/main-0001.json";
    let piped = crsym(&["report", spec, "--k-max", "2"]);
    let o = crsym(&["report", spec, "--k-max", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(piped.stdout, fs::read(&out).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&piped.stdout).unwrap();
    assert_eq!(v["intersection"]["dims"]["full"], 1);
}

#[test]
fn shipped_catalog_validates() {
    let specs: Vec<PathBuf> = fs::read_dir(root().join("catalog/specs")).unwrap().map(|e| e.unwrap().path()).collect();
    let refs: Vec<&Path> = specs.iter().map(PathBuf::as_path).collect();
    assert_schema("spec.schema.json", &refs);
    assert_schema("manifest.schema.json", &[&root().join("catalog/manifest.json")]);
}

#[test]
fn gen_catalog_reproduces_the_shipped_catalog() {
    let dir = scratch("gen");
    let o = crsym(&["gen-catalog", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let shipped = root().join("catalog");
    assert_eq!(fs::read(dir.join("manifest.json")).unwrap(), fs::read(shipped.join("manifest.json")).unwrap());
    let names: Vec<_> = fs::read_dir(shipped.join("specs")).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(fs::read_dir(dir.join("specs")).unwrap().count(), names.len());
    for n in names {
        assert_eq!(fs::read(dir.join("specs").join(&n)).unwrap(), fs::read(shipped.join("specs").join(&n)).unwrap());
    }
}

#[test]
fn filter_selects_intersection_criteria_only() {
    let dir = scratch("filter");
    let json = dir.join("verify.json");
    let o = crsym(&["verify-paper", "--filter", "intersection", "--jobs", "2", "--json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}\n{}", stdout(&o), stderr(&o));
    let lines: Vec<String> = stdout(&o).lines().filter(|l| l.starts_with("criterion")).map(str::to_owned).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("criterion 2 ") && lines[1].starts_with("criterion 3 "));
    assert!(lines.iter().all(|l| l.contains("PASS")));
    assert_schema("verify.schema.json", &[&json]);
}

#[test]
fn failing_criterion_exits_with_verify_code() {
    let o = crsym(&["verify-paper", "--filter", "5"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stdout(&o).contains("criterion 5 "));
    assert!(stdout(&o).contains("FAIL"));
    assert!(stderr(&o).contains("failed criteria: 5"));
}

#[test]
fn corrupted_catalog_is_rejected_by_name() {
    let dir = scratch("corrupt");
    fs::create_dir_all(dir.join("specs")).unwrap();
    let good = fs::read_to_string(root().join("catalog/specs/main-0001.json")).unwrap();
    fs::write(dir.join("specs/ok.json"), good).unwrap();
    fs::write(dir.join("specs/broken.json"), r#"{"blocks":[{"lambda":{"re":"x","im":"0"},"m":1,"epsilon":1}]}"#).unwrap();
    let entry = |id: &str, file: &str| {
        format!(
            r#"{{"id":"{id}","path":"specs/{file}","set":"main","source":"test","expected":{{"regular":true,"nilpotent":false,"d_total":0}}}}"#
        )
    };
    let manifest = format!(r#"{{"version":1,"entries":[{},{}]}}"#, entry("ok-1", "ok.json"), entry("broken-7", "broken.json"));
    fs::write(dir.join("manifest.json"), manifest).unwrap();
    let o = crsym(&["verify-paper", "--catalog", dir.to_str().unwrap(), "--filter", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("broken-7"), "{}", stderr(&o));
    assert!(!stderr(&o).contains("ok-1"));
}
