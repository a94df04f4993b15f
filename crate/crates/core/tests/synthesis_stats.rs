use householder_dict::numeric::row_sums;
use householder_dict::synthesis::{make_instance, FactorSampling, SparseModel};

#[test]
fn row_means_match_single_reflector_expectation() {
    let (n, p) = (100, 100_000);
    let model = SparseModel::with_theta(0.3).unwrap();
    let inst = make_instance(n, p, 1, &model, None, FactorSampling::default(), 2024).unwrap();
    let u = inst.v.reflectors()[0].factor().unwrap().u().to_owned();
    let c: f64 = u.sum();
    let tm = model.theta() * model.mu();

    let sums = row_sums(inst.y.view());
    let mut beyond_three = 0;
    for i in 0..n {
        let row = inst.y.row(i);
        let mean = sums[i] / p as f64;
        let var = row.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (p - 1) as f64;
        let se = (var / p as f64).sqrt();
        let z = (mean - tm * (1.0 - 2.0 * u[i] * c)) / se;
        assert!(z.abs() < 4.5, "row {i}: z = {z}");
        if z.abs() > 3.0 {
            beyond_three += 1;
        }
    }
    // with 100 rows about 0.27 exceed 3 SE by chance
    assert!(beyond_three <= 2, "{beyond_three} rows beyond 3 SE");

    let x = inst.x.to_dense();
    let xm = x.mean().unwrap();
    let xv = x.iter().map(|v| (v - xm).powi(2)).sum::<f64>() / (x.len() - 1) as f64;
    let se = (xv / x.len() as f64).sqrt();
    assert!((xm - tm).abs() <= 3.0 * se, "code mean {xm} vs {tm} (se {se})");
}
