//! End-to-end experiment orchestration.
//!
//! `run_experiment` executes generate -> simulate -> classify -> evaluate
//! for every configured theta and writes all artifacts into a fresh output
//! directory. Outputs are staged in a `.partial` sibling and renamed on
//! success, so failures leave no partial results. Identical configurations
//! and seeds produce byte-identical trees.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ndarray::Array2;

use crate::classify::{
    baseline_classify, build_observation_sets, hypothesis_matrix, mc_classify, mc_fit,
    window_stack, DistanceRule, McFit, ObservationSets,
};
use crate::config::ExperimentConfig;
use crate::error::Error;
use crate::eval::{average_rates, masked_rates, rates, roc_from_points, RocCurve, RocPoint};
use crate::gscm::{
    calibrate_distance_threshold, drop_infrastructure, CalibratedThreshold, GainModel,
    NetworkLayout, SectorGainMatrix,
};
use crate::io::{self, SummaryRow};
use crate::ra::{run_campaign, CampaignMode, CampaignStats, DeviceId, FrameRecord, RaConfig};
use crate::rng::{derive_seed, substream};
use crate::Result;

/// What a finished run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub dir: PathBuf,
    pub config_hash: String,
    /// Distance threshold used by the geographic rule (configured or
    /// calibrated).
    pub d_thr: f64,
    pub summary: Vec<SummaryRow>,
}

/// Infrastructure plus a static calibration device draw, with its gain
/// matrix. The calibration draw fixes the distance threshold when the
/// configuration leaves it open.
pub struct CalibrationDraw {
    pub model: GainModel,
    pub gains: SectorGainMatrix,
    pub threshold: CalibratedThreshold,
}

/// Draw the network for a configuration: infrastructure from the layout
/// stream, calibration devices from their own stream.
pub fn calibration_draw(cfg: &ExperimentConfig) -> Result<CalibrationDraw> {
    let mut layout =
        drop_infrastructure(&cfg.geometry, &mut substream(cfg.master_seed, "layout", 0))?;
    let mut device_rng = substream(cfg.master_seed, "calibration", 0);
    layout.device_positions = (0..cfg.geometry.device_count)
        .map(|_| {
            use rand::Rng;
            crate::geom::Point::new(
                device_rng.gen::<f64>() * cfg.geometry.area_side,
                device_rng.gen::<f64>() * cfg.geometry.area_side,
            )
        })
        .collect();
    let model = GainModel::new(layout, cfg.channel.clone())?;
    let gains = model.gain_matrix();
    let threshold = calibrate_distance_threshold(
        &gains,
        &model.layout().rrh_positions,
        cfg.channel.sectors_per_rrh,
        cfg.gamma_db,
    );
    Ok(CalibrationDraw { model, gains, threshold })
}

/// One evaluation frame prepared for classification.
struct EvalFrame {
    record: FrameRecord,
    obs: ObservationSets,
    truth_c: Array2<u8>,
}

/// Classification artifacts of one theta cell. The `_unknown` curves
/// restrict the rate estimators to cells outside the observation sets and
/// are produced only when the configuration asks for them.
struct ThetaArtifacts {
    stats: CampaignStats,
    baseline: RocCurve,
    baseline_unknown: Option<RocCurve>,
    mc_curves: Vec<(usize, RocCurve)>,
    mc_curves_unknown: Vec<(usize, RocCurve)>,
    /// Last single-frame fit, for the solver trace artifact.
    last_fit: Option<McFit>,
    eval_frames: Vec<EvalFrame>,
    window_frames: BTreeMap<usize, (crate::ra::CentralView, ObservationSets)>,
}

fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect()
}

/// Sweep the completion threshold over the predicted range, one point past
/// the maximum so the all-weak endpoint (zero false alarm) is included.
fn beta_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
    let mut grid = linspace(lo, hi, steps.max(2));
    grid.push(hi + 1e-9 * (1.0 + hi.abs()));
    grid
}

/// Run the campaign for one theta and evaluate both classifiers on the
/// final `cfg.frames` frames.
fn run_theta_cell(
    cfg: &ExperimentConfig,
    model: &GainModel,
    ra: &RaConfig,
    d_thr: f64,
    seed: u64,
) -> Result<ThetaArtifacts> {
    let window = cfg.window;
    let keep_from = (cfg.warmup).saturating_sub(window - 1);
    let mut kept: Vec<FrameRecord> = Vec::new();
    let stats = run_campaign(
        CampaignMode::Geometric { model },
        ra,
        cfg.frames,
        cfg.warmup,
        seed,
        &mut |record| {
            if record.frame >= keep_from {
                kept.push(record);
            }
        },
    )?;

    let rule = DistanceRule {
        rrh_positions: &model.layout().rrh_positions,
        sectors_per_rrh: cfg.channel.sectors_per_rrh,
        d_thr,
    };

    // Pre-warm-up frames kept only as window context.
    let mut window_frames: BTreeMap<usize, (crate::ra::CentralView, ObservationSets)> =
        BTreeMap::new();
    let mut eval_frames: Vec<EvalFrame> = Vec::new();
    for record in kept {
        let obs = build_observation_sets(&record.view, Some(&rule));
        if record.frame < cfg.warmup {
            window_frames.insert(record.frame, (record.view, obs));
        } else {
            let truth_c = hypothesis_matrix(&record.truth_db, cfg.gamma_db);
            eval_frames.push(EvalFrame { record, obs, truth_c });
        }
    }

    // Unknown-cell masks for the optional restricted estimators.
    let unknown_masks: Option<Vec<Array2<bool>>> = cfg.unknown_only.then(|| {
        eval_frames.iter().map(|f| f.obs.known_mask().mapv(|k| !k)).collect()
    });

    // Baseline sweep over alpha.
    let alphas = linspace(0.0, 1.0, cfg.alpha_steps);
    let mut baseline_points = Vec::with_capacity(alphas.len());
    let mut baseline_unknown_points = Vec::with_capacity(alphas.len());
    for (ai, &alpha) in alphas.iter().enumerate() {
        let chats: Vec<Array2<u8>> = eval_frames
            .iter()
            .map(|f| {
                let mut rng = substream(seed, &format!("baseline-alpha-{ai}"), f.record.frame as u64);
                baseline_classify(&f.obs, alpha, &mut rng)
            })
            .collect();
        let per_frame: Vec<_> =
            chats.iter().zip(&eval_frames).map(|(chat, f)| rates(chat, &f.truth_c)).collect();
        let avg = average_rates(&per_frame);
        baseline_points.push(RocPoint {
            control: alpha,
            false_alarm: avg.false_alarm,
            detection: avg.detection,
        });
        if let Some(masks) = &unknown_masks {
            let per_frame: Vec<_> = chats
                .iter()
                .zip(&eval_frames)
                .zip(masks)
                .map(|((chat, f), mask)| masked_rates(chat, &f.truth_c, mask))
                .collect();
            let avg = average_rates(&per_frame);
            baseline_unknown_points.push(RocPoint {
                control: alpha,
                false_alarm: avg.false_alarm,
                detection: avg.detection,
            });
        }
    }
    let baseline = roc_from_points(baseline_points);
    let baseline_unknown =
        (!baseline_unknown_points.is_empty()).then(|| roc_from_points(baseline_unknown_points));

    // Completion fits: single-frame, then windowed when configured.
    let params = cfg.mc_params();
    let mut mc_curves = Vec::new();
    let mut mc_curves_unknown = Vec::new();
    let mut last_fit: Option<McFit> = None;
    for w in window_sizes(window) {
        let mut fits: Vec<(McFit, ObservationSets, Vec<usize>)> = Vec::new();
        for frame in &eval_frames {
            let (merged, current_cols, fit) = if w == 1 {
                let fit = mc_fit(
                    &frame.obs,
                    &params,
                    &mut substream(seed, "mc-init", frame.record.frame as u64),
                )?;
                let cols = (0..frame.record.view.device_count()).collect();
                (frame.obs.clone(), cols, fit)
            } else {
                let mut stacked: Vec<(&crate::ra::CentralView, &ObservationSets)> = Vec::new();
                for past in frame.record.frame.saturating_sub(w - 1)..frame.record.frame {
                    if let Some((view, obs)) = window_frames.get(&past) {
                        stacked.push((view, obs));
                    } else if let Some(other) =
                        eval_frames.iter().find(|e| e.record.frame == past)
                    {
                        stacked.push((&other.record.view, &other.obs));
                    }
                }
                stacked.push((&frame.record.view, &frame.obs));
                let stack = window_stack(&stacked);
                let fit = mc_fit(
                    &stack.merged,
                    &params,
                    &mut substream(seed, &format!("mc-init-w{w}"), frame.record.frame as u64),
                )?;
                (stack.merged, stack.current_columns, fit)
            };
            fits.push((fit, merged, current_cols));
        }

        // Beta range across the unknown cells of every evaluated frame.
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (fit, merged, current_cols) in &fits {
            let predicted = fit.factors.predicted();
            for &col in current_cols {
                for i in 0..merged.dims().0 {
                    if !merged.is_known(i, col) {
                        lo = lo.min(predicted[[i, col]]);
                        hi = hi.max(predicted[[i, col]]);
                    }
                }
            }
        }
        if !lo.is_finite() || !hi.is_finite() {
            lo = cfg.gamma_db - 1.0;
            hi = cfg.gamma_db + 1.0;
        }

        // Restricted masks follow the window: a cell known from any frame of
        // the window passes through, so it is excluded here.
        let window_masks: Option<Vec<Array2<bool>>> = cfg.unknown_only.then(|| {
            fits.iter()
                .zip(&eval_frames)
                .map(|((_, merged, current_cols), frame)| {
                    Array2::from_shape_fn(frame.truth_c.dim(), |(i, j)| {
                        !merged.is_known(i, current_cols[j])
                    })
                })
                .collect()
        });

        let mut points = Vec::new();
        let mut unknown_points = Vec::new();
        for beta in beta_grid(lo, hi, cfg.beta_steps) {
            let chats: Vec<Array2<u8>> = fits
                .iter()
                .zip(&eval_frames)
                .map(|((fit, merged, current_cols), frame)| {
                    let merged_chat = mc_classify(&fit.factors, merged, beta);
                    Array2::from_shape_fn(frame.truth_c.dim(), |(i, j)| {
                        merged_chat[[i, current_cols[j]]]
                    })
                })
                .collect();
            let per_frame: Vec<_> =
                chats.iter().zip(&eval_frames).map(|(chat, f)| rates(chat, &f.truth_c)).collect();
            let avg = average_rates(&per_frame);
            points.push(RocPoint {
                control: beta,
                false_alarm: avg.false_alarm,
                detection: avg.detection,
            });
            if let Some(masks) = &window_masks {
                let per_frame: Vec<_> = chats
                    .iter()
                    .zip(&eval_frames)
                    .zip(masks)
                    .map(|((chat, f), mask)| masked_rates(chat, &f.truth_c, mask))
                    .collect();
                let avg = average_rates(&per_frame);
                unknown_points.push(RocPoint {
                    control: beta,
                    false_alarm: avg.false_alarm,
                    detection: avg.detection,
                });
            }
        }
        if w == 1 {
            last_fit = fits.pop().map(|(fit, _, _)| fit);
        }
        mc_curves.push((w, roc_from_points(points)));
        if !unknown_points.is_empty() {
            mc_curves_unknown.push((w, roc_from_points(unknown_points)));
        }
    }

    Ok(ThetaArtifacts {
        stats,
        baseline,
        baseline_unknown,
        mc_curves,
        mc_curves_unknown,
        last_fit,
        eval_frames,
        window_frames,
    })
}

fn window_sizes(window: usize) -> Vec<usize> {
    if window > 1 {
        vec![1, window]
    } else {
        vec![1]
    }
}

/// ROC curves of one theta cell, for callers that do not need the file
/// artifacts.
pub struct ThetaRocs {
    pub stats: CampaignStats,
    pub baseline: RocCurve,
    /// `(window, curve)` pairs: single-frame first, then the configured
    /// window when larger than 1.
    pub mc: Vec<(usize, RocCurve)>,
    /// Unknown-cell-restricted variants, present with `unknown_only`.
    pub baseline_unknown: Option<RocCurve>,
    pub mc_unknown: Vec<(usize, RocCurve)>,
    /// Solver trace of the last single-frame fit.
    pub fit_trace: Vec<crate::classify::FitTracePoint>,
}

/// Simulate one theta cell and trace both classifiers' ROC curves.
pub fn theta_rocs(
    cfg: &ExperimentConfig,
    model: &GainModel,
    theta: f64,
    d_thr: f64,
    seed: u64,
) -> Result<ThetaRocs> {
    let ra = cfg.ra_config(theta)?;
    let artifacts = run_theta_cell(cfg, model, &ra, d_thr, seed)?;
    Ok(ThetaRocs {
        stats: artifacts.stats,
        baseline: artifacts.baseline,
        baseline_unknown: artifacts.baseline_unknown,
        mc_unknown: artifacts.mc_curves_unknown,
        mc: artifacts.mc_curves,
        fit_trace: artifacts.last_fit.map(|f| f.trace).unwrap_or_default(),
    })
}

fn theta_dir_name(theta: f64) -> String {
    format!("theta-{theta}")
}

/// Execute the full pipeline into `out_dir`.
///
/// With `full_artifacts` the run also writes the layout, calibration gains,
/// campaign logs, per-frame views and ground-truth gains; otherwise only the
/// ROC tables, summary and manifest are produced.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    full_artifacts: bool,
) -> Result<RunOutput> {
    cfg.validate()?;
    if out_dir.exists() && out_dir.read_dir().map(|mut d| d.next().is_some()).unwrap_or(true) {
        return Err(Error::config(format!(
            "output directory {} already exists and is not empty",
            out_dir.display()
        )));
    }
    let staging = out_dir.with_extension("partial");
    if staging.exists() {
        std::fs::remove_dir_all(&staging)?;
    }
    std::fs::create_dir_all(&staging)?;

    let result = run_into_staging(cfg, &staging, full_artifacts);
    match result {
        Ok(mut output) => {
            if out_dir.exists() {
                std::fs::remove_dir(out_dir)?;
            }
            std::fs::rename(&staging, out_dir)?;
            output.dir = out_dir.to_path_buf();
            Ok(output)
        }
        Err(e) => {
            let _ = std::fs::remove_dir_all(&staging);
            Err(e)
        }
    }
}

fn run_into_staging(
    cfg: &ExperimentConfig,
    staging: &Path,
    full_artifacts: bool,
) -> Result<RunOutput> {
    let draw = calibration_draw(cfg)?;
    let d_thr = match cfg.d_thr {
        Some(d) => d,
        None => draw.threshold.d_thr,
    };
    if full_artifacts {
        io::write_layout(&staging.join("layout.csv"), draw.model.layout())?;
        io::write_gains(&staging.join("gains.csv"), &io::gain_matrix_entries(&draw.gains))?;
    }

    let mut summary: Vec<SummaryRow> = Vec::new();
    let mut extras: Vec<(String, String)> = vec![
        ("d_thr".to_string(), d_thr.to_string()),
        (
            "d_thr_calibration_warning".to_string(),
            draw.threshold.no_multi_rrh_strong.to_string(),
        ),
    ];

    for (ti, &theta) in cfg.thetas.iter().enumerate() {
        let ra = cfg.ra_config(theta)?;
        let seed = derive_seed(cfg.master_seed, &format!("theta-{ti}"));
        let artifacts = run_theta_cell(cfg, &draw.model, &ra, d_thr, seed)?;

        let dir = staging.join(theta_dir_name(theta));
        std::fs::create_dir_all(&dir)?;
        io::write_roc(&dir.join("roc_baseline.csv"), &artifacts.baseline)?;
        summary.push(SummaryRow {
            method: "baseline".to_string(),
            theta,
            window: 1,
            auc: artifacts.baseline.auc,
            detection_at_5pct: artifacts.baseline.detection_at(0.05),
        });
        for (w, curve) in &artifacts.mc_curves {
            io::write_roc(&dir.join(format!("roc_mc_w{w}.csv")), curve)?;
            summary.push(SummaryRow {
                method: "mc".to_string(),
                theta,
                window: *w,
                auc: curve.auc,
                detection_at_5pct: curve.detection_at(0.05),
            });
        }
        if let Some(curve) = &artifacts.baseline_unknown {
            io::write_roc(&dir.join("roc_baseline_unknown.csv"), curve)?;
            summary.push(SummaryRow {
                method: "baseline_unknown".to_string(),
                theta,
                window: 1,
                auc: curve.auc,
                detection_at_5pct: curve.detection_at(0.05),
            });
        }
        for (w, curve) in &artifacts.mc_curves_unknown {
            io::write_roc(&dir.join(format!("roc_mc_w{w}_unknown.csv")), curve)?;
            summary.push(SummaryRow {
                method: "mc_unknown".to_string(),
                theta,
                window: *w,
                auc: curve.auc,
                detection_at_5pct: curve.detection_at(0.05),
            });
        }
        if let Some(fit) = &artifacts.last_fit {
            io::write_fit_trace(&dir.join("fit_trace.csv"), &fit.trace)?;
        }
        if full_artifacts {
            io::write_campaign(&dir.join("campaign.csv"), &artifacts.stats)?;
            let mut gain_entries: BTreeMap<(usize, DeviceId), f64> = BTreeMap::new();
            for frame in &artifacts.eval_frames {
                io::write_view(
                    &dir.join(format!("view_{}.csv", frame.record.frame)),
                    &frame.record.report,
                )?;
                for (j, &id) in frame.record.view.detected.iter().enumerate() {
                    for v in 0..frame.record.truth_db.nrows() {
                        gain_entries.insert((v, id), frame.record.truth_db[[v, j]]);
                    }
                }
            }
            let entries: Vec<(usize, DeviceId, f64)> =
                gain_entries.into_iter().map(|((v, id), g)| (v, id, g)).collect();
            io::write_gains(&dir.join("gains.csv"), &entries)?;
        }
        extras.push((
            format!("coverage_holes_theta_{theta}"),
            artifacts.stats.coverage_holes.to_string(),
        ));
        drop(artifacts.window_frames);
    }

    io::write_summary(&staging.join("summary.csv"), &summary)?;
    io::write_manifest(&staging.join("manifest.txt"), cfg, &extras)?;
    Ok(RunOutput {
        dir: staging.to_path_buf(),
        config_hash: cfg.config_hash(),
        d_thr,
        summary,
    })
}

/// Simulation-only entry point behind the `simulate` subcommand.
///
/// Writes `campaign.csv`, plus the layout, per-frame views and ground-truth
/// gains of the final `emit_views` frames in geometric mode.
pub fn simulate_experiment(
    cfg: &ExperimentConfig,
    theta: f64,
    abstract_q: bool,
    emit_views: usize,
    out_dir: &Path,
) -> Result<CampaignStats> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let ra = cfg.ra_config(theta)?;
    let seed = derive_seed(cfg.master_seed, "simulate");
    if abstract_q {
        let stats = run_campaign(
            CampaignMode::AbstractQ { q: ra.access_prob },
            &ra,
            cfg.frames,
            cfg.warmup,
            seed,
            &mut |_| {},
        )?;
        io::write_campaign(&out_dir.join("campaign.csv"), &stats)?;
        return Ok(stats);
    }

    let draw = calibration_draw(cfg)?;
    io::write_layout(&out_dir.join("layout.csv"), draw.model.layout())?;
    let total = cfg.warmup + cfg.frames;
    let emit_from = total.saturating_sub(emit_views);
    let mut kept: Vec<FrameRecord> = Vec::new();
    let stats = run_campaign(
        CampaignMode::Geometric { model: &draw.model },
        &ra,
        cfg.frames,
        cfg.warmup,
        seed,
        &mut |record| {
            if record.frame >= emit_from {
                kept.push(record);
            }
        },
    )?;
    io::write_campaign(&out_dir.join("campaign.csv"), &stats)?;
    let mut gain_entries: BTreeMap<(usize, DeviceId), f64> = BTreeMap::new();
    for record in &kept {
        io::write_view(&out_dir.join(format!("view_{}.csv", record.frame)), &record.report)?;
        for (j, &id) in record.view.detected.iter().enumerate() {
            for v in 0..record.truth_db.nrows() {
                gain_entries.insert((v, id), record.truth_db[[v, j]]);
            }
        }
    }
    let entries: Vec<(usize, DeviceId, f64)> =
        gain_entries.into_iter().map(|((v, id), g)| (v, id, g)).collect();
    io::write_gains(&out_dir.join("gains.csv"), &entries)?;
    Ok(stats)
}

/// Classifier selection for [`classify_from_files`].
pub enum FileClassifyMethod {
    Baseline { alpha: f64 },
    Completion { beta: Option<f64> },
}

/// Classify previously simulated frames from their CSV artifacts.
///
/// `frames` lists the window oldest-first; the last one is classified.
/// Writes `chat_<frame>.csv` (and `fit_trace.csv` for the completion
/// method) into `out_dir`.
pub fn classify_from_files(
    cfg: &ExperimentConfig,
    in_dir: &Path,
    frames: &[usize],
    method: FileClassifyMethod,
    out_dir: &Path,
) -> Result<()> {
    cfg.validate()?;
    if frames.is_empty() {
        return Err(Error::config("at least one frame index is required"));
    }
    std::fs::create_dir_all(out_dir)?;
    let current = *frames.last().unwrap();

    let layout_path = in_dir.join("layout.csv");
    let layout: Option<NetworkLayout> =
        if layout_path.exists() { Some(io::read_layout(&layout_path)?) } else { None };

    let d_thr = match cfg.d_thr {
        Some(d) => Some(d),
        None => layout.as_ref().map(|_| -> Result<f64> {
            Ok(calibration_draw(cfg)?.threshold.d_thr)
        }).transpose()?,
    };

    let mut views = Vec::new();
    for &f in frames {
        let report = io::read_view(&in_dir.join(format!("view_{f}.csv")))?;
        views.push(crate::ra::merge_reports(&report));
    }
    let rule = match (&layout, d_thr) {
        (Some(layout), Some(d_thr)) => Some(DistanceRule {
            rrh_positions: &layout.rrh_positions,
            sectors_per_rrh: cfg.channel.sectors_per_rrh,
            d_thr,
        }),
        _ => None,
    };
    let obs: Vec<ObservationSets> =
        views.iter().map(|v| build_observation_sets(v, rule.as_ref())).collect();

    let current_view = views.last().unwrap();
    match method {
        FileClassifyMethod::Baseline { alpha } => {
            let current_obs = obs.last().unwrap();
            let mut rng = substream(cfg.master_seed, "cli-baseline", current as u64);
            let chat = baseline_classify(current_obs, alpha, &mut rng);
            io::write_chat(
                &out_dir.join(format!("chat_{current}.csv")),
                &chat,
                &current_view.detected,
                &current_obs.known_mask(),
            )?;
        }
        FileClassifyMethod::Completion { beta } => {
            let stacked: Vec<(&crate::ra::CentralView, &ObservationSets)> =
                views.iter().zip(&obs).map(|(v, o)| (v, o)).collect();
            let stack = window_stack(&stacked);
            let fit = mc_fit(
                &stack.merged,
                &cfg.mc_params(),
                &mut substream(cfg.master_seed, "cli-mc-init", current as u64),
            )?;
            let predicted = fit.factors.predicted();
            let beta = beta.unwrap_or_else(|| {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for &col in &stack.current_columns {
                    for i in 0..stack.merged.dims().0 {
                        if !stack.merged.is_known(i, col) {
                            lo = lo.min(predicted[[i, col]]);
                            hi = hi.max(predicted[[i, col]]);
                        }
                    }
                }
                if lo.is_finite() && hi.is_finite() {
                    0.5 * (lo + hi)
                } else {
                    cfg.gamma_db
                }
            });
            let merged_chat = mc_classify(&fit.factors, &stack.merged, beta);
            let sectors = stack.merged.dims().0;
            let chat = Array2::from_shape_fn(
                (sectors, stack.current_columns.len()),
                |(i, j)| merged_chat[[i, stack.current_columns[j]]],
            );
            let known = Array2::from_shape_fn((sectors, stack.current_columns.len()), |(i, j)| {
                stack.merged.is_known(i, stack.current_columns[j])
            });
            io::write_chat(
                &out_dir.join(format!("chat_{current}.csv")),
                &chat,
                &current_view.detected,
                &known,
            )?;
            io::write_fit_trace(&out_dir.join("fit_trace.csv"), &fit.trace)?;
        }
    }
    Ok(())
}
