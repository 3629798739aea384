//! Pareto dominance, non-dominated sorting and the evaluation archive.

use mopls::domain::{dominates, non_dominated_sort, DecisionVector, EvaluationArchive, ObjectiveVector};

fn main() -> mopls::Result<()> {
    let points = vec![
        vec![1.0, 5.0],
        vec![2.0, 3.0],
        vec![4.0, 1.0],
        vec![3.0, 4.0],
        vec![5.0, 5.0],
        vec![2.0, 3.0],
    ];
    println!("(1,5) dominates (5,5): {}", dominates(&points[0], &points[4])?);
    println!("(2,3) dominates its copy: {}", dominates(&points[1], &points[5])?);

    for (layer, front) in non_dominated_sort(&points, None)?.iter().enumerate() {
        let members: Vec<_> = front.iter().map(|&i| &points[i]).collect();
        println!("front {layer}: {members:?}");
    }

    // The archive keeps its Pareto set current as points arrive.
    let mut archive = EvaluationArchive::new(1, 2);
    for (i, y) in points.iter().enumerate() {
        let x = DecisionVector::new(vec![i as f64 / 10.0])?;
        archive.push(x, ObjectiveVector::new(y.clone())?, 0.2)?;
        println!("after point {i}: Pareto ids {:?}", archive.pareto_ids());
    }
    archive.check_invariants().map_err(mopls::Error::Config)?;
    Ok(())
}
