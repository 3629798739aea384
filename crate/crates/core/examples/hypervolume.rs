//! Exact and Monte-Carlo hypervolume, contributions and improvements.

use mopls::hypervolume::{
    hv_contributions, hv_exact, hv_improvement_exact, hv_monte_carlo, ReferenceVector,
};
use mopls::sampling::RngStream;

fn main() -> mopls::Result<()> {
    let front = vec![vec![1.0, 3.0], vec![2.0, 2.0], vec![3.0, 1.0]];
    let reference = ReferenceVector::new(vec![4.0, 4.0]);
    println!("exact 2-D volume        {}", hv_exact(&front, &reference)?);
    println!("contributions           {:?}", hv_contributions(&front, &reference)?);
    println!(
        "gain of (1.5, 1.5)      {}",
        hv_improvement_exact(&front, &[1.5, 1.5], &reference)?
    );
    println!(
        "gain of (3.5, 3.5)      {}",
        hv_improvement_exact(&front, &[3.5, 3.5], &reference)?
    );

    let cube = vec![
        vec![0.0, 1.0, 1.0],
        vec![1.0, 0.0, 1.0],
        vec![1.0, 1.0, 0.0],
    ];
    let r3 = ReferenceVector::new(vec![2.0; 3]);
    println!("exact 3-D volume        {}", hv_exact(&cube, &r3)?);

    // Four objectives fall back to sampling.
    let four = vec![vec![0.5, 1.0, 1.0, 1.0], vec![1.0, 0.5, 1.0, 1.0]];
    let r4 = ReferenceVector::new(vec![2.0; 4]);
    let mut rng = RngStream::master(1);
    let estimate = hv_monte_carlo(&four, &r4, 200_000, &mut rng)?;
    println!("Monte-Carlo 4-D volume  {estimate:.4} (exact 2)");
    Ok(())
}
