//! Scanning candidate lags on data where Y reacts to X two steps later.

use iacm::approx::{approximation_error, shift_for_time_lag, EmpiricalInputs};
use iacm::{CausalModelSpec, ErrorMode, ModelVariant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LAG: usize = 2;
const FLIP: f64 = 0.05;

/// `y_t = x_{t-LAG}`, flipped with probability `FLIP`; `hold` pins `x`.
fn series(n: usize, hold: Option<usize>, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let xs: Vec<usize> = (0..n).map(|_| hold.unwrap_or_else(|| rng.random_range(0..2))).collect();
    (0..n)
        .map(|t| {
            let cause = if t >= LAG { xs[t - LAG] } else { rng.random_range(0..2) };
            let y = if rng.random_bool(FLIP) { 1 - cause } else { cause };
            (xs[t], y)
        })
        .collect()
}

#[test]
fn scan_recovers_the_true_lag() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let observed = series(4000, None, &mut rng);
    let held: Vec<Vec<(usize, usize)>> = (0..2).map(|a| series(2000, Some(a), &mut rng)).collect();
    let spec = CausalModelSpec::bivariate(ModelVariant::XToY, 2, 2);

    let errors: Vec<f64> = (0..=4)
        .map(|lag| {
            let obs = shift_for_time_lag(&observed, lag).unwrap();
            let int: Vec<Vec<usize>> = held
                .iter()
                .map(|s| shift_for_time_lag(s, lag).unwrap().into_iter().map(|(_, y)| y).collect())
                .collect();
            let inputs = EmpiricalInputs::from_rows(&obs, &int, 2, 2, 0.0).unwrap();
            approximation_error(&inputs, &spec, ErrorMode::Global).unwrap()
        })
        .collect();

    let best = (0..errors.len()).min_by(|&a, &b| errors[a].total_cmp(&errors[b])).unwrap();
    assert_eq!(best, LAG, "{errors:?}");
    for (lag, e) in errors.iter().enumerate() {
        if lag != LAG {
            assert!(*e > errors[LAG] + 0.05, "{errors:?}");
        }
    }
}
