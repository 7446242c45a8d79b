//! ROC curves and their area.

/// One operating point: the control value (alpha or beta) and the measured
/// rates it produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub control: f64,
    pub false_alarm: f64,
    pub detection: f64,
}

/// ROC points sorted by false-alarm rate, plus the area under them.
///
/// The curve is extended to false alarm 0 at its limiting detection value;
/// the right end is the measured maximum. Because the known cells pass
/// through both classifiers, the reachable false-alarm range usually stops
/// well short of 1; `area` is the raw trapezoid integral over the traced
/// range, and `auc` rescales it by the maximum false alarm so that curves
/// are comparable on the unit square (an exact diagonal still scores 0.5).
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    /// Trapezoid integral over the traced false-alarm range.
    pub area: f64,
    /// `area` normalized by the maximum false alarm; 0 when the curve never
    /// leaves the false-alarm origin.
    pub auc: f64,
}

impl RocCurve {
    /// Detection rate at a target false-alarm rate, linearly interpolated
    /// along the curve; clamps to the endpoints outside the measured range.
    pub fn detection_at(&self, false_alarm: f64) -> f64 {
        let pts = &self.points;
        if pts.is_empty() {
            return 0.0;
        }
        if false_alarm <= pts[0].false_alarm {
            return pts[0].detection;
        }
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if false_alarm <= b.false_alarm {
                let span = b.false_alarm - a.false_alarm;
                if span <= 0.0 {
                    return b.detection;
                }
                let t = (false_alarm - a.false_alarm) / span;
                return a.detection + t * (b.detection - a.detection);
            }
        }
        pts.last().unwrap().detection
    }
}

/// Sort points by false alarm and integrate.
pub fn roc_from_points(mut points: Vec<RocPoint>) -> RocCurve {
    points.sort_by(|a, b| {
        (a.false_alarm, a.detection)
            .partial_cmp(&(b.false_alarm, b.detection))
            .expect("finite rates")
    });
    let mut area = 0.0;
    if let Some(first) = points.first() {
        // Extension to the false-alarm origin at the limiting detection.
        area += first.false_alarm * first.detection;
    }
    for w in points.windows(2) {
        area += (w[1].false_alarm - w[0].false_alarm) * 0.5 * (w[0].detection + w[1].detection);
    }
    let span = points.last().map(|p| p.false_alarm).unwrap_or(0.0);
    let auc = if span > 0.0 { area / span } else { 0.0 };
    RocCurve { points, area, auc }
}

/// Evaluate the classifier at every control value and build the curve.
/// `eval` returns the frame-averaged `(false alarm, detection)` pair.
pub fn roc_sweep(controls: &[f64], mut eval: impl FnMut(f64) -> (f64, f64)) -> RocCurve {
    assert!(controls.len() >= 2, "a sweep needs at least two control values");
    let points = controls
        .iter()
        .map(|&c| {
            let (false_alarm, detection) = eval(c);
            RocPoint { control: c, false_alarm, detection }
        })
        .collect();
    roc_from_points(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn diagonal_auc_is_half() {
        let points: Vec<RocPoint> = (0..=100)
            .map(|i| {
                let t = i as f64 / 100.0;
                RocPoint { control: t, false_alarm: t, detection: t }
            })
            .collect();
        let curve = roc_from_points(points);
        assert_relative_eq!(curve.auc, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn left_extension_uses_limiting_detection() {
        // Two points only, neither at false alarm zero: the area includes
        // the rectangle down to the origin at the first detection level.
        let curve = roc_from_points(vec![
            RocPoint { control: 0.0, false_alarm: 0.2, detection: 0.6 },
            RocPoint { control: 1.0, false_alarm: 1.0, detection: 1.0 },
        ]);
        let expect = 0.2 * 0.6 + 0.8 * 0.5 * (0.6 + 1.0);
        assert_relative_eq!(curve.area, expect, epsilon = 1e-12);
        assert_relative_eq!(curve.auc, expect, epsilon = 1e-12);
    }

    #[test]
    fn truncated_curves_normalize_to_the_unit_range() {
        // A curve that only reaches false alarm 0.1: rescaling makes it
        // comparable with a full-range curve of the same shape.
        let curve = roc_from_points(vec![
            RocPoint { control: 0.0, false_alarm: 0.0, detection: 0.5 },
            RocPoint { control: 1.0, false_alarm: 0.1, detection: 1.0 },
        ]);
        assert_relative_eq!(curve.area, 0.1 * 0.75, epsilon = 1e-12);
        assert_relative_eq!(curve.auc, 0.75, epsilon = 1e-12);
    }

    #[test]
    fn sweep_sorts_by_false_alarm() {
        let curve = roc_sweep(&[1.0, 0.0, 0.5], |c| (c, c * c));
        let fas: Vec<f64> = curve.points.iter().map(|p| p.false_alarm).collect();
        assert_eq!(fas, vec![0.0, 0.5, 1.0]);
        // Monotone non-decreasing detection after sorting by false alarm.
        assert!(curve.points.windows(2).all(|w| w[1].detection >= w[0].detection));
        assert!(curve.auc >= 0.0 && curve.auc <= 1.0);
    }

    #[test]
    fn detection_interpolation() {
        let curve = roc_from_points(vec![
            RocPoint { control: 0.0, false_alarm: 0.0, detection: 0.4 },
            RocPoint { control: 1.0, false_alarm: 0.5, detection: 0.9 },
        ]);
        assert_relative_eq!(curve.detection_at(0.0), 0.4);
        assert_relative_eq!(curve.detection_at(0.25), 0.65);
        assert_relative_eq!(curve.detection_at(0.9), 0.9);
    }
}
