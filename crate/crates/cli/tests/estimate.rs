//! Moment estimation from returns tables: hand cases and a Monte Carlo
//! cross-check against known population moments.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::io::Write;
use wcrisk_cli::formats::ReturnsTable;

fn table_from_csv(text: &str) -> ReturnsTable {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(text.as_bytes()).unwrap();
    ReturnsTable::from_csv(file.path()).unwrap()
}

#[test]
fn identical_rows_give_zero_covariance() {
    let t = table_from_csv("a,b\n0.01,0.02\n0.01,0.02\n");
    let mm = t.estimate_moments().unwrap();
    assert_eq!(mm.mean()[0], 0.01);
    assert_eq!(mm.mean()[1], 0.02);
    for i in 0..2 {
        for j in 0..2 {
            assert_eq!(mm.cov()[(i, j)], 0.0);
        }
    }
}

#[test]
fn two_observations_single_asset() {
    // Unbiased variance over T-1 = 1: (0-1)^2 + (2-1)^2 = 2.
    let t = table_from_csv("x\n0\n2\n");
    let mm = t.estimate_moments().unwrap();
    assert_eq!(mm.mean()[0], 1.0);
    assert_eq!(mm.cov()[(0, 0)], 2.0);
}

#[test]
fn too_few_rows_rejected() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(b"a,b\n0.1,0.2\n").unwrap();
    let err = ReturnsTable::from_csv(file.path()).unwrap_err();
    assert_eq!(err.code, 2);
}

#[test]
fn non_numeric_cell_names_row_and_column() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(b"a,b\n0.1,0.2\n0.3,oops\n").unwrap();
    let err = ReturnsTable::from_csv(file.path()).unwrap_err();
    assert_eq!(err.code, 2);
    assert!(err.message.contains("row 3"), "{}", err.message);
    assert!(err.message.contains("b"), "{}", err.message);
}

#[test]
fn monte_carlo_sample_recovers_population_moments() {
    // Sample 1000 rows of R = mu + L xi with iid standard normal xi, so the
    // population moments are exactly (mu, L L^T); the estimates must land
    // within three standard errors.
    let mu = [0.05, 0.02, -0.01];
    let l = [
        [0.10, 0.00, 0.00],
        [0.03, 0.08, 0.00],
        [-0.02, 0.01, 0.12],
    ];
    let mut cov = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            cov[i][j] = (0..3).map(|k| l[i][k] * l[j][k]).sum();
        }
    }

    let t = 1000usize;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut csv = String::from("a,b,c\n");
    for _ in 0..t {
        let xi: [f64; 3] = [
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
        ];
        let mut row = [0.0; 3];
        for i in 0..3 {
            row[i] = mu[i] + (0..3).map(|k| l[i][k] * xi[k]).sum::<f64>();
        }
        csv.push_str(&format!("{},{},{}\n", row[0], row[1], row[2]));
    }
    let table = table_from_csv(&csv);
    let mm = table.estimate_moments().unwrap();

    for i in 0..3 {
        let se_mean = cov[i][i].sqrt() / (t as f64).sqrt();
        assert!(
            (mm.mean()[i] - mu[i]).abs() <= 3.0 * se_mean,
            "mean {i}: {} vs {}",
            mm.mean()[i],
            mu[i]
        );
        for j in 0..3 {
            // Gaussian covariance estimator SE: sqrt((s_ii s_jj + s_ij^2) / (T-1)).
            let se = ((cov[i][i] * cov[j][j] + cov[i][j] * cov[i][j]) / (t as f64 - 1.0)).sqrt();
            assert!(
                (mm.cov()[(i, j)] - cov[i][j]).abs() <= 3.0 * se,
                "cov ({i},{j}): {} vs {}",
                mm.cov()[(i, j)],
                cov[i][j]
            );
        }
    }
}
