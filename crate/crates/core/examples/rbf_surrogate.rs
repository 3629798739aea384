//! Fit a cubic RBF surrogate with a linear tail and check it off the data.

use mopls::domain::DecisionVector;
use mopls::rbf;
use mopls::sampling::{latin_hypercube, RngStream};

fn target(x: &[f64]) -> f64 {
    (3.0 * x[0]).sin() + x[1] * x[1] - 0.5 * x[0] * x[1]
}

fn main() -> mopls::Result<()> {
    let mut rng = RngStream::master(3);
    let training: Vec<(DecisionVector, f64)> = latin_hypercube(40, 2, &mut rng)
        .into_iter()
        .map(|x| {
            let y = target(&x);
            (x, y)
        })
        .collect();
    let model = rbf::fit(&training)?;
    println!("ridge used          {:e}", model.ridge());
    let worst_fit = training
        .iter()
        .map(|(x, y)| (model.predict(x).unwrap() - y).abs())
        .fold(0.0, f64::max);
    println!("max training error  {worst_fit:.2e}");

    // Several objectives share one factorization of the kernel matrix.
    let inputs: Vec<&[f64]> = training.iter().map(|(x, _)| &x[..]).collect();
    let values = vec![
        training.iter().map(|(_, y)| *y).collect(),
        training.iter().map(|(x, _)| x[0] + 2.0 * x[1]).collect(),
    ];
    let models = rbf::fit_shared(&inputs, &values)?;
    let probes = latin_hypercube(200, 2, &mut rng);
    let predictions = models.predict_batch(&probes)?;
    let mut sq = [0.0; 2];
    for (x, p) in probes.iter().zip(&predictions) {
        sq[0] += (p[0] - target(x)).powi(2);
        sq[1] += (p[1] - (x[0] + 2.0 * x[1])).powi(2);
    }
    let n = probes.len() as f64;
    println!("held-out RMSE       {:.4}", (sq[0] / n).sqrt());
    println!("affine RMSE         {:.1e}", (sq[1] / n).sqrt());
    Ok(())
}
