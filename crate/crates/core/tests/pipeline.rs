use std::fs;

use qubofs_core::builders::{Builder, Convention};
use qubofs_core::data::{load_csv, load_svmlight, split_by_query, LabelColumn};
use qubofs_core::eval::{run_sweep, Method, SweepConfig, Task};
use qubofs_core::solvers::{solve, SampleSetFile, SolverConfig, SolverId};
use qubofs_core::{Error, QuboProblem};

const LETOR: &str = "\
2 qid:1 1:0.9 2:0.1 3:0.5 # doc a
0 qid:1 1:0.1 2:0.8 3:0.4
1 qid:1 1:0.5 2:0.3 3:0.6
1 qid:2 1:0.6 2:0.9 3:0.1
0 qid:2 1:0.2 2:0.2 3:0.7
2 qid:2 1:0.95 3:0.3
0 qid:3 1:0.05 2:0.5 3:0.5
2 qid:3 1:0.8 2:0.4 3:0.2
1 qid:4 1:0.45 2:0.6 3:0.9
0 qid:4 1:0.15 2:0.1 3:0.8
";

#[test]
fn qubo_file_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("d.csv");
    fs::write(&file, "a,b,c,label\n1,0.5,3,x\n2,0.1,1,y\n3,0.9,2,x\n4,0.2,5,y\n5,0.8,4,x\n").unwrap();
    let ds = load_csv(&file, &LabelColumn::Name("label".into())).unwrap();
    assert_eq!(ds.n_features(), 3);
    let q = Builder::Correlation {
        convention: Convention::Literal,
        use_absolute: true,
    }
    .build(&ds)
    .unwrap();
    let out = dir.path().join("q.json");
    fs::write(&out, q.to_json()).unwrap();
    let back = QuboProblem::load(&out).unwrap();
    assert_eq!(back, q);
    for m in 0..8u8 {
        let x: Vec<u8> = (0..3).map(|i| (m >> i) & 1).collect();
        assert_eq!(back.energy(&x).unwrap(), q.energy(&x).unwrap());
    }
}

#[test]
fn sample_set_file_round_trip() {
    let q = QuboProblem::from_rows(&[vec![-1.0, 2.0], vec![0.0, -1.0]]).unwrap();
    let cfg = SolverConfig::with_seed(3);
    let set = solve(&q, SolverId::Exact, &cfg).unwrap();
    let file = SampleSetFile::new(&set, SolverId::Exact, &cfg);
    let text = serde_json::to_string(&file).unwrap();
    let back: SampleSetFile = serde_json::from_str(&text).unwrap();
    assert_eq!(back, file);
    assert_eq!(back.samples.len(), 2);
    assert!(back.samples.iter().all(|s| s.energy == -1.0));
}

#[test]
fn letor_file_feeds_a_ranking_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("letor.txt");
    fs::write(&file, LETOR).unwrap();
    let ds = load_svmlight(&file).unwrap();
    assert_eq!((ds.n_samples(), ds.n_features()), (10, 3));
    assert_eq!(ds.value(5, 1), 0.0);

    let split = split_by_query(&ds, 0.5, 0.25, 9).unwrap();
    let cfg = SweepConfig {
        method: Method::Qubo(Builder::Miqubo { bins: 3 }),
        solver: SolverId::Exact,
        solver_config: SolverConfig::with_seed(1),
        penalty_strength: 1.0,
        task: Task::Rank,
        trees: 1,
        cv_folds: None,
        seed: 2,
    };
    let report = run_sweep(&ds, &split, &cfg).unwrap();
    assert_eq!(report.per_k_trace.len(), 3);
    assert!((0.0..=1.0).contains(&report.test_metric));

    let clf = SweepConfig { task: Task::Clf, ..cfg };
    assert!(matches!(run_sweep(&ds, &split, &clf), Err(Error::TaskMismatch(_))));
}

#[test]
fn parse_errors_name_the_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.svm");
    fs::write(&file, "1 qid:1 1:0.5\n0 qid:1 1:0.2 1:0.3\n").unwrap();
    let err = load_svmlight(&file).unwrap_err().to_string();
    assert!(err.contains("bad.svm:2"), "{err}");
    assert!(err.contains("duplicate"), "{err}");
}
