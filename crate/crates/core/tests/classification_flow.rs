//! End-to-end classification flow on a small network: observation-set
//! soundness against ground truth, window stacking across frames, and
//! pass-through independence from the control parameters.

use cranra::classify::{
    baseline_classify, build_observation_sets, hypothesis_matrix, mc_classify, mc_fit,
    window_stack, McParams, SolverMode,
};
use cranra::gscm::{drop_infrastructure, ChannelParams, GainModel, GeometryConfig};
use cranra::ra::{run_campaign, CampaignMode, FrameRecord, RaConfig};
use cranra::rng::substream;

fn small_campaign() -> Vec<FrameRecord> {
    let geometry = GeometryConfig {
        area_side: 120.0,
        rrh_count: 16,
        device_count: 1,
        scatterer_count: 100,
        blocker_count: 40,
        ..GeometryConfig::default()
    };
    let layout = drop_infrastructure(&geometry, &mut substream(3, "layout", 0)).unwrap();
    let model = GainModel::new(layout, ChannelParams::default()).unwrap();
    let ra = RaConfig { slots: 10, access_prob: 0.25, lambda_in: 30.0, strong_threshold_db: -18.0 };
    let mut records = Vec::new();
    run_campaign(
        CampaignMode::Geometric { model: &model },
        &ra,
        4,
        4,
        11,
        &mut |record| {
            if record.frame >= 3 {
                records.push(record);
            }
        },
    )
    .unwrap();
    assert!(records.len() >= 4);
    records
}

#[test]
fn observation_sets_are_sound_and_windows_merge_correctly() {
    let records = small_campaign();
    for record in &records {
        let truth_c = hypothesis_matrix(&record.truth_db, -18.0);
        let obs = build_observation_sets(&record.view, None);
        for (i, j, gain) in obs.strong_entries() {
            assert_eq!(truth_c[[i, j]], 1);
            assert_eq!(gain, record.truth_db[[i, j]]);
        }
        for (i, j) in obs.weak_entries() {
            assert_eq!(truth_c[[i, j]], 0);
        }
    }

    // Stack consecutive frames and check every merged cell against the
    // truth of the frame that produced it (device identity keyed).
    for pair in records.windows(2) {
        let (old, cur) = (&pair[0], &pair[1]);
        let old_obs = build_observation_sets(&old.view, None);
        let cur_obs = build_observation_sets(&cur.view, None);
        let stack = window_stack(&[(&old.view, &old_obs), (&cur.view, &cur_obs)]);
        assert_eq!(stack.gain_conflicts, 0, "stationary devices cannot disagree on gains");
        for (i, col, gain) in stack.merged.strong_entries() {
            let id = stack.device_ids[col];
            let truth = cur
                .view
                .column_of(id)
                .map(|j| cur.truth_db[[i, j]])
                .or_else(|| old.view.column_of(id).map(|j| old.truth_db[[i, j]]))
                .expect("merged device must come from one of the frames");
            assert_eq!(gain, truth);
            assert!(truth >= -18.0);
        }
        // Current-frame columns map back onto the current detected order.
        for (j, &col) in stack.current_columns.iter().enumerate() {
            assert_eq!(stack.device_ids[col], cur.view.detected[j]);
        }
    }
}

#[test]
fn known_cells_ignore_the_control_parameters() {
    let records = small_campaign();
    let record = &records[0];
    let obs = build_observation_sets(&record.view, None);
    let params = McParams {
        rank: 8,
        max_iters: 15,
        stop_error: 1e-300,
        regularization: 1.0,
        ..McParams { solver: SolverMode::Als, ..Default::default() }
    };
    let fit = mc_fit(&obs, &params, &mut substream(4, "mc-init", 0)).unwrap();
    let low = mc_classify(&fit.factors, &obs, -60.0);
    let high = mc_classify(&fit.factors, &obs, 40.0);
    let alpha0 = baseline_classify(&obs, 0.0, &mut substream(5, "baseline", 0));
    let alpha1 = baseline_classify(&obs, 1.0, &mut substream(5, "baseline", 1));
    let (sectors, devices) = obs.dims();
    let mut known_cells = 0;
    for i in 0..sectors {
        for j in 0..devices {
            if obs.is_known(i, j) {
                known_cells += 1;
                let expected = u8::from(obs.strong(i, j).is_some());
                for chat in [&low, &high, &alpha0, &alpha1] {
                    assert_eq!(chat[[i, j]], expected, "known cell ({i},{j}) moved");
                }
            }
        }
    }
    assert!(known_cells > 0);
}
