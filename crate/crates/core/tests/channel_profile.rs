//! Qualitative shape of the generated channel: strong links concentrate at
//! short distances, the strong fraction falls off with distance, and links
//! at similar distances span a broad range of gains (blockage and multipath
//! spread).

use cranra::gscm::{drop_entities, ChannelParams, GainModel, GeometryConfig};
use cranra::rng::substream;

#[test]
fn gain_distance_profile_matches_expected_shape() {
    let geometry = GeometryConfig {
        area_side: 250.0,
        rrh_count: 60,
        device_count: 300,
        scatterer_count: 300,
        blocker_count: 120,
        ..GeometryConfig::default()
    };
    let layout = drop_entities(&geometry, &mut substream(42, "layout", 0)).unwrap();
    let params = ChannelParams::default();
    let gamma_db = -18.0;
    let model = GainModel::new(layout, params.clone()).unwrap();
    let gains = model.gain_matrix();
    let layout = model.layout();

    // Distance of each (sector, device) link is the RRH-device distance.
    let s = params.sectors_per_rrh;
    let bins = [0.0, 30.0, 60.0, 90.0, 120.0];
    let mut strong = [0usize; 4];
    let mut total = [0usize; 4];
    let mut far_strong = 0usize;
    let mut far_total = 0usize;
    let mut near_gains: Vec<f64> = Vec::new();
    for v in 0..gains.sectors() {
        let rrh = layout.rrh_positions[v / s];
        for k in 0..gains.devices() {
            let d = rrh.distance(&layout.device_positions[k]);
            let g = gains.get(v, k);
            for b in 0..4 {
                if d >= bins[b] && d < bins[b + 1] {
                    total[b] += 1;
                    strong[b] += usize::from(g >= gamma_db);
                }
            }
            if d >= 150.0 {
                far_total += 1;
                far_strong += usize::from(g >= gamma_db);
            }
            if (20.0..40.0).contains(&d) {
                near_gains.push(g);
            }
        }
    }

    let fractions: Vec<f64> =
        (0..4).map(|b| strong[b] as f64 / total[b].max(1) as f64).collect();
    // Monotone decay of the strong fraction across distance bins.
    for w in fractions.windows(2) {
        assert!(w[1] < w[0], "strong-link fraction must fall with distance: {fractions:?}");
    }
    assert!(fractions[0] > 0.5, "short links should mostly be strong: {fractions:?}");
    // Strong links far beyond the pathloss horizon are rare.
    let far_fraction = far_strong as f64 / far_total.max(1) as f64;
    assert!(far_fraction < 0.02, "far strong fraction {far_fraction}");
    // Broad spread at similar distances (blockage splits the population).
    let lo = near_gains.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = near_gains.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(hi - lo > 30.0, "gain spread at 20-40 m is only {:.1} dB", hi - lo);
    println!(
        "strong fractions by distance bin: {fractions:?}; far fraction {far_fraction:.4}; 20-40 m spread {:.1} dB",
        hi - lo
    );
}
