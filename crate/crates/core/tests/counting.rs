use std::time::Instant;

use mk3_core::counting::{count_points, count_points_all_axes, CheckpointConfig, CheckpointState, CountJob, Counter};
use mk3_core::forms::{FamilyParams, Mk3Form};
use mk3_core::zeta::PUBLISHED_COUNTS_P7;

fn reference() -> Mk3Form {
    FamilyParams::reference(1).expand()
}

#[test]
fn published_counts_through_degree_four_single_threaded() {
    let start = Instant::now();
    for n in 1..=4 {
        let job = CountJob::new(reference(), 7, n).with_threads(1);
        assert_eq!(count_points(&job).unwrap(), PUBLISHED_COUNTS_P7[n - 1], "n = {n}");
    }
    let elapsed = start.elapsed();
    println!("n = 1..4 single-threaded: {elapsed:?}");
    assert!(elapsed.as_secs() < 60);
}

#[test]
fn symmetry_reduction_agrees() {
    for n in 1..=3 {
        let full = count_points(&CountJob::new(reference(), 7, n)).unwrap();
        let reduced = count_points(&CountJob::new(reference(), 7, n).with_symmetry_reduction(true)).unwrap();
        assert_eq!(full, reduced, "n = {n}");
    }
}

#[test]
fn polynomial_backend_agrees_on_every_axis() {
    for (form, p, n) in [(reference(), 7, 1), (reference(), 7, 2), (Mk3Form::new(3, 1, 2, 5, 6), 11, 1), (Mk3Form::new(1, -2, 1, 4, 2), 5, 2)] {
        let table = count_points(&CountJob::new(form.clone(), p, n)).unwrap();
        assert_eq!(count_points_all_axes(&CountJob::new(form, p, n)).unwrap(), [table; 3]);
    }
}

#[test]
fn sequential_and_parallel_block_sums_match() {
    let job = CountJob::new(reference(), 7, 3);
    let counter = Counter::new(&job).unwrap();
    let rows = 0..counter.rows();
    assert_eq!(counter.block_sum(rows.clone()), counter.block_sum_sequential(rows));
}

#[test]
fn thread_count_does_not_change_the_result() {
    let counts: Vec<u64> = [1, 2, 3].iter().map(|&t| count_points(&CountJob::new(reference(), 7, 3).with_threads(t)).unwrap()).collect();
    assert!(counts.iter().all(|&c| c == PUBLISHED_COUNTS_P7[2]));
}

#[test]
fn checkpoints_resume_and_reject_foreign_jobs() {
    let dir = std::env::temp_dir().join(format!("mk3-ckpt-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("state.json");
    let mut job = CountJob::new(reference(), 7, 3);
    job.checkpoint = Some(CheckpointConfig { path: path.clone(), resume: false, every_fibers: 5_000 });
    assert_eq!(count_points(&job).unwrap(), PUBLISHED_COUNTS_P7[2]);

    // Rewind the stored state halfway and resume from it.
    let mut state = CheckpointState::load(&path).unwrap();
    assert_eq!(state.next_row, state.rows_end);
    let counter = Counter::new(&job).unwrap();
    let half = state.rows_end / 2;
    state.next_row = half;
    state.partial_sum = counter.block_sum(0..half);
    state.store(&path).unwrap();
    job.checkpoint.as_mut().unwrap().resume = true;
    assert_eq!(count_points(&job).unwrap(), PUBLISHED_COUNTS_P7[2]);

    let mut other = CountJob::new(reference(), 7, 3).with_symmetry_reduction(true);
    other.checkpoint = Some(CheckpointConfig { path: path.clone(), resume: true, every_fibers: 5_000 });
    assert!(count_points(&other).is_err());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn published_count_degree_five() {
    let start = Instant::now();
    assert_eq!(count_points(&CountJob::new(reference(), 7, 5)).unwrap(), PUBLISHED_COUNTS_P7[4]);
    let job = CountJob::new(reference(), 7, 5).with_symmetry_reduction(true);
    assert_eq!(count_points(&job).unwrap(), PUBLISHED_COUNTS_P7[4]);
    println!("n = 5, full and reduced: {:?}", start.elapsed());
}

#[test]
#[ignore = "release validation: minutes for n = 6, hours for n = 7"]
fn published_counts_degree_six_and_seven() {
    for n in [6, 7] {
        let job = CountJob::new(reference(), 7, n).with_symmetry_reduction(true);
        assert_eq!(count_points(&job).unwrap(), PUBLISHED_COUNTS_P7[n - 1], "n = {n}");
    }
}
