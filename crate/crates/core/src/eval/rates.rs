//! Detection and false-alarm rate estimators.

use ndarray::Array2;

/// Rates of one frame. A side is `None` when its denominator was empty
/// (no true-strong or no true-weak cells).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameRates {
    pub detection: Option<f64>,
    pub false_alarm: Option<f64>,
}

/// Per-frame estimators over all cells: detection rate is the fraction of
/// true-strong cells classified strong, false alarm the fraction of
/// true-weak cells classified strong.
pub fn rates(chat: &Array2<u8>, truth: &Array2<u8>) -> FrameRates {
    assert_eq!(chat.dim(), truth.dim(), "classifier and truth dims must match");
    let mut hits = 0usize;
    let mut strongs = 0usize;
    let mut alarms = 0usize;
    let mut weaks = 0usize;
    for (c, t) in chat.iter().zip(truth.iter()) {
        if *t == 1 {
            strongs += 1;
            hits += usize::from(*c == 1);
        } else {
            weaks += 1;
            alarms += usize::from(*c == 1);
        }
    }
    FrameRates {
        detection: (strongs > 0).then(|| hits as f64 / strongs as f64),
        false_alarm: (weaks > 0).then(|| alarms as f64 / weaks as f64),
    }
}

/// Same estimators restricted to cells where `mask` is true (used for the
/// unknown-cells-only variant).
pub fn masked_rates(chat: &Array2<u8>, truth: &Array2<u8>, mask: &Array2<bool>) -> FrameRates {
    assert_eq!(chat.dim(), truth.dim());
    assert_eq!(chat.dim(), mask.dim());
    let mut hits = 0usize;
    let mut strongs = 0usize;
    let mut alarms = 0usize;
    let mut weaks = 0usize;
    for ((c, t), m) in chat.iter().zip(truth.iter()).zip(mask.iter()) {
        if !m {
            continue;
        }
        if *t == 1 {
            strongs += 1;
            hits += usize::from(*c == 1);
        } else {
            weaks += 1;
            alarms += usize::from(*c == 1);
        }
    }
    FrameRates {
        detection: (strongs > 0).then(|| hits as f64 / strongs as f64),
        false_alarm: (weaks > 0).then(|| alarms as f64 / weaks as f64),
    }
}

/// Averages of per-frame ratios, with frames carrying an empty denominator
/// excluded from the respective side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateAverage {
    pub detection: f64,
    pub false_alarm: f64,
    pub frames_detection: usize,
    pub frames_false_alarm: usize,
    /// Frames excluded for lack of true-strong cells.
    pub skipped_detection: usize,
    /// Frames excluded for lack of true-weak cells.
    pub skipped_false_alarm: usize,
}

pub fn average_rates(per_frame: &[FrameRates]) -> RateAverage {
    let mut avg = RateAverage {
        detection: 0.0,
        false_alarm: 0.0,
        frames_detection: 0,
        frames_false_alarm: 0,
        skipped_detection: 0,
        skipped_false_alarm: 0,
    };
    for r in per_frame {
        match r.detection {
            Some(v) => {
                avg.detection += v;
                avg.frames_detection += 1;
            }
            None => avg.skipped_detection += 1,
        }
        match r.false_alarm {
            Some(v) => {
                avg.false_alarm += v;
                avg.frames_false_alarm += 1;
            }
            None => avg.skipped_false_alarm += 1,
        }
    }
    if avg.frames_detection > 0 {
        avg.detection /= avg.frames_detection as f64;
    }
    if avg.frames_false_alarm > 0 {
        avg.false_alarm /= avg.frames_false_alarm as f64;
    }
    avg
}

/// Ordinary least-squares trend of a series against its index.
/// Returns `(slope, stderr of the slope)`.
pub fn linear_trend(ys: &[f64]) -> (f64, f64) {
    let n = ys.len();
    if n < 3 {
        return (0.0, 0.0);
    }
    let nf = n as f64;
    let x_mean = (nf - 1.0) / 2.0;
    let y_mean = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (i, y) in ys.iter().enumerate() {
        let dx = i as f64 - x_mean;
        sxx += dx * dx;
        sxy += dx * (y - y_mean);
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let mut ss_res = 0.0;
    for (i, y) in ys.iter().enumerate() {
        let fit = intercept + slope * i as f64;
        ss_res += (y - fit) * (y - fit);
    }
    let var = ss_res / (nf - 2.0);
    (slope, (var / sxx).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;

    #[test]
    fn perfect_and_all_ones_classifiers() {
        let truth = array![[1u8, 0], [0, 1]];
        let perfect = rates(&truth.clone(), &truth);
        assert_relative_eq!(perfect.detection.unwrap(), 1.0);
        assert_relative_eq!(perfect.false_alarm.unwrap(), 0.0);
        let ones = rates(&array![[1u8, 1], [1, 1]], &truth);
        assert_relative_eq!(ones.detection.unwrap(), 1.0);
        assert_relative_eq!(ones.false_alarm.unwrap(), 1.0);
    }

    #[test]
    fn two_by_two_hand_count() {
        // C = [[1,0],[0,1]], Chat = [[1,1],[0,1]]: both strongs hit, one of
        // two weaks raised: detection 1, false alarm 0.5.
        let truth = array![[1u8, 0], [0, 1]];
        let chat = array![[1u8, 1], [0, 1]];
        let r = rates(&chat, &truth);
        assert_relative_eq!(r.detection.unwrap(), 1.0);
        assert_relative_eq!(r.false_alarm.unwrap(), 0.5);
    }

    #[test]
    fn empty_denominators_become_none() {
        let all_strong = array![[1u8, 1]];
        let r = rates(&array![[1u8, 0]], &all_strong);
        assert!(r.false_alarm.is_none());
        assert_relative_eq!(r.detection.unwrap(), 0.5);
        let avg = average_rates(&[r, FrameRates { detection: Some(1.0), false_alarm: Some(0.25) }]);
        assert_eq!(avg.skipped_false_alarm, 1);
        assert_eq!(avg.frames_false_alarm, 1);
        assert_relative_eq!(avg.false_alarm, 0.25);
        assert_relative_eq!(avg.detection, 0.75);
    }

    #[test]
    fn permutation_invariance() {
        use rand::seq::SliceRandom;
        use rand::Rng;
        let mut rng = crate::rng::substream(31, "rates-perm", 0);
        let truth = Array2::from_shape_fn((6, 5), |_| rng.gen_range(0..=1u8));
        let chat = Array2::from_shape_fn((6, 5), |_| rng.gen_range(0..=1u8));
        let base = rates(&chat, &truth);
        let mut rows: Vec<usize> = (0..6).collect();
        let mut cols: Vec<usize> = (0..5).collect();
        rows.shuffle(&mut rng);
        cols.shuffle(&mut rng);
        let permuted_truth =
            Array2::from_shape_fn((6, 5), |(i, j)| truth[[rows[i], cols[j]]]);
        let permuted_chat = Array2::from_shape_fn((6, 5), |(i, j)| chat[[rows[i], cols[j]]]);
        assert_eq!(rates(&permuted_chat, &permuted_truth), base);
    }

    #[test]
    fn masked_rates_ignore_known_cells() {
        let truth = array![[1u8, 0], [1, 0]];
        let chat = array![[1u8, 1], [0, 0]];
        let mask = array![[false, true], [true, false]];
        let r = masked_rates(&chat, &truth, &mask);
        // Counted cells: (0,1) weak raised, (1,0) strong missed.
        assert_relative_eq!(r.detection.unwrap(), 0.0);
        assert_relative_eq!(r.false_alarm.unwrap(), 1.0);
    }

    #[test]
    fn trend_of_flat_and_sloped_series() {
        let flat: Vec<f64> = (0..100).map(|i| 5.0 + if i % 2 == 0 { 0.1 } else { -0.1 }).collect();
        let (slope, se) = linear_trend(&flat);
        assert!(slope.abs() < 3.0 * se + 1e-9);
        let rising: Vec<f64> = (0..100).map(|i| 2.0 * i as f64).collect();
        let (slope, se) = linear_trend(&rising);
        assert_relative_eq!(slope, 2.0, epsilon = 1e-9);
        assert!(se < 1e-9);
    }
}
