//! Follow one point's search memory through repeated failures: the radius
//! halves, the point enters the tabu list, then ticks back out.

use mopls::domain::{DecisionVector, EvaluationArchive, ObjectiveVector};
use mopls::engine::{update_memory_archive, EngineParams};
use mopls::hypervolume::ReferenceVector;

fn main() -> mopls::Result<()> {
    let mut archive = EvaluationArchive::new(2, 2);
    let subject = archive.push(
        DecisionVector::new(vec![0.2, 0.2])?,
        ObjectiveVector::new(vec![1.0, 1.0])?,
        0.2,
    )?;
    let helper = archive.push(
        DecisionVector::new(vec![0.9, 0.9])?,
        ObjectiveVector::new(vec![0.5, 2.5])?,
        0.2,
    )?;
    let params = EngineParams::new(2, 1000, 1)?;
    let reference = ReferenceVector::new(vec![3.0, 3.0]);
    println!("c_thresh {}  c_tenure {}", params.c_thresh, params.c_tenure);
    println!("step  center   radius  failures  tabu  event");

    for step in 1..=10 {
        // While the subject is tabu the helper is searched instead.
        let center = if archive.is_tabu(subject) { helper } else { subject };
        let before = archive.pareto_objectives();
        // Every new point is dominated, so each step counts as a failure.
        let new_point = (
            DecisionVector::new(vec![0.3 + 0.01 * step as f64, 0.5])?,
            ObjectiveVector::new(vec![2.0, 2.0])?,
        );
        let update = update_memory_archive(
            &mut archive,
            &[center],
            vec![new_point],
            &before,
            &reference,
            &params,
        )?;
        let m = archive.points()[subject].memory;
        let event = if update.entered_tabu.contains(&subject) {
            "enters tabu"
        } else if update.released.contains(&subject) {
            "released"
        } else {
            ""
        };
        println!(
            "{step:>4}  {center:>6}  {:>7}  {:>8}  {:>4}  {event}",
            m.radius, m.failure_count, m.tabu_count
        );
    }
    Ok(())
}
