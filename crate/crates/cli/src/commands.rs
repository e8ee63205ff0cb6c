use std::fs;
use std::path::Path;

use ldi_core::compose::{min_depth_pool, ComposeResult, DEFAULT_ALPHA_MIN};
use ldi_core::io::{load_stack, save_ldi, save_mask_png, save_rgba_depth, save_rgba_png, save_stack, StackMetadata};
use ldi_core::render::{remove_objects, synthesize_view, SynthResult};
use ldi_core::scene::{
    generate_view, overlap_filter, overlap_fraction, random_scene, render_composite, sample_perturbation,
    simulate_detections, PoseDelta, SceneSpec,
};
use ldi_core::{ldi_from_stack, Grid, Pose, Rgbad, RgbadImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::args::{ComposeArgs, GenArgs, RemoveArgs, SynthArgs};
use crate::config::{parse_pose, RunConfig, RUN_CONFIG_FILE};
use crate::error::{CliError, Result};

fn mkdir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| ldi_core::Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(())
}

fn require_dir(path: &Path) -> Result<()> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(CliError::Missing(path.to_path_buf()))
    }
}

fn display(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

/// Per-scene seeds drawn from the run seed; scene `i` does not depend on `count`.
pub fn scene_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen()).collect()
}

/// Seeds for the detection noise and the target-view perturbation of one scene.
pub fn scene_sub_seeds(scene_seed: u64) -> (u64, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(scene_seed);
    (rng.gen(), rng.gen())
}

pub fn scene_dir_name(index: usize) -> String {
    format!("scene_{index:04}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSummary {
    pub candidates: usize,
    pub accepted: Vec<String>,
}

impl GenSummary {
    pub fn ratio(&self) -> f64 {
        if self.candidates == 0 {
            0.0
        } else {
            self.accepted.len() as f64 / self.candidates as f64
        }
    }
}

pub fn gen_config(args: &GenArgs) -> Result<RunConfig> {
    let mut cfg = RunConfig::load_or_default(args.config.config.as_deref(), "gen")?;
    let g = &mut cfg.generation;
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.count {
        cfg.count = v;
    }
    if let Some(v) = args.width {
        g.width = v;
    }
    if let Some(v) = args.height {
        g.height = v;
    }
    if let Some(v) = args.min_objects {
        g.min_objects = v;
    }
    if let Some(v) = args.max_objects {
        g.max_objects = v;
    }
    if let Some(v) = args.overlap_threshold {
        g.overlap_threshold = v;
    }
    cfg.generation.validate()?;
    Ok(cfg)
}

/// Writes one directory per accepted scene: the layer stack with simulated
/// detections, its ground-truth LDI, and a target view rendered from a
/// perturbed camera whose motion is stored in the manifest.
pub fn cmd_gen(cfg: &RunConfig, out: &Path) -> Result<GenSummary> {
    let g = &cfg.generation;
    g.validate()?;
    mkdir(out)?;
    let k = g.classes.len();
    let mut accepted = Vec::new();
    for (i, &seed) in scene_seeds(cfg.seed, cfg.count).iter().enumerate() {
        let scene: SceneSpec<f64> = random_scene(g, seed)?;
        let stack = generate_view(&scene, k)?;
        if !overlap_filter(&stack, g.overlap_threshold)? {
            continue;
        }
        let (det_seed, pose_seed) = scene_sub_seeds(seed);
        let detections = simulate_detections(&stack, &g.detection_noise, k, det_seed)?;
        let delta = sample_perturbation(&g.pose_perturbation, pose_seed);
        let target = render_composite(&scene.with_pose(scene.pose.compose(&delta.to_pose())))?.image;
        let name = scene_dir_name(i);
        let dir = out.join(&name);
        let meta = StackMetadata {
            classes: g.classes.clone(),
            seed,
            overlap: overlap_fraction(&stack)?,
            target: Some(delta),
        };
        save_stack(&stack, Some(&detections), &meta, &dir)?;
        save_ldi(&ldi_from_stack(&stack)?, &dir.join("ldi.bin"))?;
        mkdir(&dir.join("target"))?;
        save_rgba_depth(&dir.join("target"), &target)?;
        accepted.push(name);
    }
    cfg.save(&out.join(RUN_CONFIG_FILE))?;
    Ok(GenSummary {
        candidates: cfg.count,
        accepted,
    })
}

pub fn run_gen(args: &GenArgs) -> Result<GenSummary> {
    let cfg = gen_config(args)?;
    let summary = cmd_gen(&cfg, &args.out)?;
    println!(
        "accepted {}/{} scenes (ratio {:.4})",
        summary.accepted.len(),
        summary.candidates,
        summary.ratio()
    );
    Ok(summary)
}

const PALETTE: [[u8; 3]; 12] = [
    [230, 25, 75],
    [60, 180, 75],
    [255, 225, 25],
    [0, 130, 200],
    [245, 130, 48],
    [145, 30, 180],
    [70, 240, 240],
    [240, 50, 230],
    [210, 245, 60],
    [250, 190, 212],
    [0, 128, 128],
    [170, 110, 40],
];

/// Instances cycle through a fixed palette, the layout is grey, empty pixels
/// are transparent.
pub fn index_colors(index: &Grid<Option<usize>>, layout_index: usize) -> RgbadImage<f64> {
    RgbadImage::from_fn(index.width(), index.height(), |x, y| {
        index.get(x, y).map(|i| {
            let c = if i == layout_index {
                [128, 128, 128]
            } else {
                PALETTE[i % PALETTE.len()]
            };
            let f = |v: u8| v as f64 / 255.0;
            Rgbad::new([f(c[0]), f(c[1]), f(c[2]), 1.0], 1.0)
        })
    })
}

pub fn cmd_compose(scene: &Path, out: &Path) -> Result<ComposeResult<f64>> {
    require_dir(scene)?;
    let loaded = load_stack::<f64>(scene)?;
    let result = min_depth_pool(&loaded.stack, DEFAULT_ALPHA_MIN)?;
    mkdir(out)?;
    save_rgba_depth(out, &result.image)?;
    save_rgba_png(
        &out.join("index.png"),
        &index_colors(&result.index_map, loaded.stack.layout_index()),
    )?;
    Ok(result)
}

pub fn run_compose(args: &ComposeArgs) -> Result<()> {
    let mut cfg = RunConfig::load_or_default(args.config.config.as_deref(), "compose")?;
    cfg.inputs = vec![display(&args.scene)];
    let r = cmd_compose(&args.scene, &args.out)?;
    cfg.save(&args.out.join(RUN_CONFIG_FILE))?;
    println!("composed {} valid pixels", r.image.valid_count());
    Ok(())
}

/// Synthesizes the scene from the camera moved by `delta` (source camera frame).
pub fn cmd_synth(scene: &Path, delta: &PoseDelta, cfg: &RunConfig, out: &Path) -> Result<SynthResult<f64>> {
    require_dir(scene)?;
    let loaded = load_stack::<f64>(scene)?;
    let ldi = ldi_from_stack(&loaded.stack)?;
    let motion: Pose<f64> = delta.to_pose();
    let result = synthesize_view(&ldi, &loaded.stack.camera, &motion.inverse(), &cfg.warp)?;
    mkdir(out)?;
    save_rgba_depth(out, &result.image)?;
    save_mask_png(&out.join("hole_mask.png"), &result.image.valid_mask().map(|v| !v))?;
    Ok(result)
}

pub fn run_synth(args: &SynthArgs) -> Result<SynthResult<f64>> {
    let mut cfg = RunConfig::load_or_default(args.config.config.as_deref(), "synth")?;
    if let Some(p) = &args.pose {
        cfg.pose = Some(parse_pose(p)?);
    }
    let delta = cfg.pose.unwrap_or_default();
    cfg.pose = Some(delta);
    cfg.inputs = vec![display(&args.scene)];
    let r = cmd_synth(&args.scene, &delta, &cfg, &args.out)?;
    cfg.save(&args.out.join(RUN_CONFIG_FILE))?;
    println!("fill ratio {:.4}", r.fill_ratio());
    Ok(r)
}

pub fn cmd_remove(scene: &Path, class: &str, out: &Path) -> Result<ComposeResult<f64>> {
    require_dir(scene)?;
    let loaded = load_stack::<f64>(scene)?;
    let table = &loaded.manifest.classes;
    let info = table.by_name(class).ok_or_else(|| CliError::UnknownClass {
        name: class.to_string(),
        available: table.classes.iter().map(|c| c.name.clone()).collect(),
    })?;
    let result = remove_objects(&loaded.stack, &[info.id], table)?;
    mkdir(out)?;
    save_rgba_depth(out, &result.image)?;
    Ok(result)
}

pub fn run_remove(args: &RemoveArgs) -> Result<()> {
    let mut cfg = RunConfig::load_or_default(args.config.config.as_deref(), "remove")?;
    if let Some(c) = &args.class {
        cfg.class = Some(c.clone());
    }
    let class = cfg
        .class
        .clone()
        .ok_or_else(|| CliError::Config("remove needs --class".into()))?;
    cfg.inputs = vec![display(&args.scene)];
    let r = cmd_remove(&args.scene, &class, &args.out)?;
    cfg.save(&args.out.join(RUN_CONFIG_FILE))?;
    println!("removed {class}; {} valid pixels remain", r.image.valid_count());
    Ok(())
}
