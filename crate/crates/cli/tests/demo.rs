use hpd_cli::demo::{run_demo, Algorithm, Demo, Settings};
use hpd_core::geometry::distance;
use hpd_core::matrix::{HpdMatrix, C64};

#[test]
fn example_32_report_gives_projection() {
    let out = run_demo(Demo::Example32, &Settings::default()).unwrap();
    let run = out.report.run("natural").unwrap();
    let u = run.final_coords.as_ref().unwrap();
    assert!(
        (u[0] - 44.721).abs() < 1e-3 && (u[1] - 35.777).abs() < 1e-3,
        "{u:?}"
    );
    assert!(out.report.comparison.is_none());
    assert_eq!(out.exit_code(), 0);
}

#[test]
fn example_41_algorithms_agree() {
    let out = run_demo(Demo::Example41, &Settings::default()).unwrap();
    let r = &out
        .trajectory(Algorithm::Riemannian)
        .unwrap()
        .last()
        .unwrap()
        .point;
    let n = &out
        .trajectory(Algorithm::Natural)
        .unwrap()
        .last()
        .unwrap()
        .point;
    assert!(distance(r, n).unwrap() <= 1e-6);
}

#[test]
fn example_42_report_matrix_matches_printed_mean() {
    let out = run_demo(Demo::Example42, &Settings::default()).unwrap();
    for run in &out.report.runs {
        let m = run.final_matrix.to_matrix().unwrap();
        let want = [
            [C64::new(2.295, 0.0), C64::new(0.980, 0.617)],
            [C64::new(0.980, -0.617), C64::new(2.295, 0.0)],
        ];
        for (i, row) in want.iter().enumerate() {
            for (j, w) in row.iter().enumerate() {
                assert!(
                    (m.get(i, j) - w).norm() <= 5e-3,
                    "{}: entry ({i},{j})",
                    run.algorithm
                );
            }
        }
        assert!(HpdMatrix::from_complex(m).is_ok());
    }
}

#[test]
fn comparison_curves_cover_each_run() {
    let dir = tempfile::TempDir::new().unwrap();
    let out = run_demo(Demo::Example31, &Settings::default()).unwrap();
    let files = out.write(dir.path()).unwrap();
    assert_eq!(files.len(), 4);
    let cmp = std::fs::read_to_string(dir.path().join("example-3.1-comparison.csv")).unwrap();
    let lines: Vec<&str> = cmp.lines().collect();
    assert_eq!(lines[0], "k,J_riemannian,J_natural");
    for (col, run) in out.report.runs.iter().enumerate() {
        let filled = lines[1..]
            .iter()
            .filter(|l| !l.split(',').nth(col + 1).unwrap_or("").is_empty())
            .count();
        assert_eq!(filled, run.iterations + 1, "{}", run.algorithm);
    }
}

#[test]
fn overrides_reach_the_solvers() {
    let settings = Settings {
        max_iter: Some(2),
        ..Settings::default()
    };
    let out = run_demo(Demo::Example41, &settings).unwrap();
    assert!(out.report.runs.iter().all(|r| r.iterations <= 2));
    assert_eq!(out.exit_code(), 2);
}
