//! Collision-dominated throughput shape on the geometric channel: for a
//! small overhead, the detection rate peaks at an interior access
//! probability and decays towards p = 1.

use cranra::eval::model_vs_sim_geometric;
use cranra::gscm::{drop_entities, ChannelParams, GainModel, GeometryConfig};
use cranra::rng::substream;

#[test]
fn detection_rate_peaks_at_interior_access_probability() {
    let geometry = GeometryConfig {
        area_side: 160.0,
        rrh_count: 25,
        device_count: 1,
        scatterer_count: 150,
        blocker_count: 60,
        ..GeometryConfig::default()
    };
    let layout = drop_entities(&geometry, &mut substream(9, "layout", 0)).unwrap();
    let model = GainModel::new(layout, ChannelParams::default()).unwrap();

    let lambda_in = 50.0;
    let theta = 0.2; // T = 10 slots
    let ps = [0.02, 0.05, 0.1, 0.2, 0.4, 0.7, 1.0];
    let cells: Vec<(f64, f64)> = ps.iter().map(|&p| (theta, p)).collect();
    let rows =
        model_vs_sim_geometric(&cells, &model, lambda_in, -18.0, 50, 15, 77).unwrap();
    let sims: Vec<f64> = rows.iter().map(|r| r.lambda_out_sim).collect();

    let (argmax, &max) = sims
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let at_one = *sims.last().unwrap();
    assert!(argmax > 0 && argmax < sims.len() - 1, "peak must be interior: {sims:?}");
    assert!(
        max > 1.2 * at_one,
        "throughput should decay towards p = 1 (collisions): {sims:?}"
    );
    println!("lambda_out over p grid {ps:?}: {sims:?} (peak at p = {})", ps[argmax]);
}
