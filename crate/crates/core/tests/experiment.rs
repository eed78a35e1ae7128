use polyent::dynamics1d::MapDescription;
use polyent::experiment::*;

fn config(map: &str, target: Target) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(MapDescription::from_json(map).unwrap(), target);
    cfg.n_list = Some(vec![16, 32, 64, 128]);
    cfg.eps_list = Some(vec![0.3]);
    cfg.resolution = Some(0.02);
    cfg
}

const HALF: &str = r#"{"space":"interval","breakpoints":[[0,0],[0.5,0.25],[1,1]]}"#;
const THREE_FIXED: &str = r#"{"space":"interval","breakpoints":[[0,0],[0.15,0.075],[0.3,0.3],[0.65,0.475],[1,1]]}"#;
const TWO_FIXED_CIRCLE: &str = r#"{"space":"circle","breakpoints":[[0,0],[0.25,0.4],[0.5,0.5],[0.75,0.6],[1,1]]}"#;

#[test]
fn base_target_by_both_routes() {
    let mut cfg = config(HALF, Target::Base);
    cfg.eps_list = Some(vec![0.2, 0.1]);
    let r = run(&cfg).unwrap();
    let sep = r.row("f", Method::Separated).unwrap();
    let cod = r.row("f", Method::Coding).unwrap();
    assert_eq!(sep.expected, Some(1));
    assert_eq!(cod.tolerance, Some(0.1));
    let counts: Vec<usize> = cod.estimate.counts.iter().map(|c| c.count).collect();
    assert_eq!(counts, vec![17, 33, 65, 129]);
    assert!(r.checks.iter().any(|c| c.name == "routes agree f"));
    assert!(r.passed, "{}", r.summary());
}

#[test]
fn reports_are_deterministic() {
    let cfg = config(HALF, Target::SymmetricK(2));
    let a = run(&cfg).unwrap();
    let b = run(&cfg).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.provenance.config_hash, cfg.content_hash());
    let mut other = cfg.clone();
    other.seed = 3;
    assert_ne!(run(&other).unwrap().to_json(), a.to_json());
}

#[test]
fn first_symmetric_product_is_the_base_map() {
    let mut cfg = config(HALF, Target::Base);
    cfg.n_list = Some(vec![8, 16, 32, 64]);
    cfg.resolution = Some(0.05);
    let r = reproduce_theorem_a(&cfg, 1).unwrap();
    for m in [Method::Separated, Method::Coding] {
        let f = r.row("f", m).unwrap();
        let s = r.row("f^*1", m).unwrap();
        assert_eq!(f.estimate.counts, s.estimate.counts, "{m:?}");
        assert_eq!(f.value, s.value);
    }
}

#[test]
fn extra_fixed_points_restrict_the_symmetric_clouds() {
    let mut cfg = config(THREE_FIXED, Target::SymmetricK(2));
    cfg.eps_list = Some(vec![0.4]);
    let r = run(&cfg).unwrap();
    assert!(r.provenance.notes.iter().any(|n| n.contains("restricted to [0, 0.3]")));
    let row = r.row("f^*2", Method::Separated).unwrap();
    // scales follow the restricted interval
    assert!((row.budget.eps_list[0] - 0.12).abs() < 1e-12);
    assert!(row.value > 1.0, "{}", r.summary());
}

#[test]
fn interval_continuum_splits_into_pieces() {
    let cfg = config(THREE_FIXED, Target::Continuum);
    let r = run(&cfg).unwrap();
    let targets: Vec<&str> = r.rows.iter().map(|r| r.target.as_str()).collect();
    assert_eq!(targets, ["C(f)", "C(f)|D11", "C(f)|D12", "C(f)|D22", "C(f)"]);
    let best = r.rows[1..4].iter().map(|r| r.value).fold(f64::MIN, f64::max);
    assert_eq!(r.rows[0].value, best);
    assert_eq!(r.eq2.len(), 1);
}

#[test]
fn circle_with_two_fixed_points_takes_the_product_path() {
    let mut cfg = config(TWO_FIXED_CIRCLE, Target::Continuum);
    cfg.method = Method::Separated;
    cfg.n_list = Some(vec![16, 32, 64]);
    let r = run(&cfg).unwrap();
    assert!(r.provenance.notes.iter().any(|n| n.starts_with("two fixed points")));
    let pieces = r.rows.iter().filter(|r| r.target.starts_with("C(f)|D")).count();
    assert_eq!(pieces, 4);
    // eps 0.3 scaled by the wandering length 0.5
    assert!((r.rows[1].budget.eps_list[0] - 0.15).abs() < 1e-12);
}

#[test]
fn reversing_maps_are_squared() {
    let map = r#"{"space":"interval","orientation":"reversing","breakpoints":[[0,1],[0.5,0.25],[1,0]]}"#;
    let mut cfg = config(map, Target::Base);
    cfg.method = Method::Coding;
    let r = run(&cfg).unwrap();
    assert_eq!(r.provenance.power, 2);
    assert!(!r.rows.is_empty());
}

#[test]
fn ladder_rows_and_check() {
    let mut cfg = config(HALF, Target::PowerLowerBounds(2));
    cfg.eps_list = Some(vec![0.4]);
    let r = run(&cfg).unwrap();
    let targets: Vec<&str> = r.rows.iter().map(|r| r.target.as_str()).collect();
    assert_eq!(targets, ["2^f>=f^*1", "2^f>=f^*2"]);
    assert!(r.rows.iter().all(|r| r.method == Method::Separated));
    assert!(r.checks.iter().any(|c| c.name == "2^f ladder"));
}

#[test]
fn local_entropy_on_request() {
    let mut cfg = config(HALF, Target::Base);
    cfg.method = Method::Coding;
    cfg.centers = Some(vec!["F:0.3".into()]);
    cfg.radii = Some(vec![0.05, 0.02]);
    let r = run(&cfg).unwrap();
    let local = r.local.expect("local entropy");
    assert_eq!(local.radii, vec![0.05, 0.02]);
    assert!(local.value > 0.5 && local.value < 1.2, "{}", local.value);
}

#[test]
fn outputs_land_in_the_directory() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(HALF, Target::Base);
    cfg.output.words = Some("words.txt".into());
    let r = run(&cfg).unwrap();
    r.write(Some(dir.path())).unwrap();
    for f in ["report.json", "counts.csv", "words.txt"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let back: Report = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(back.rows, r.rows);
    assert_eq!(back.config, cfg);
}
