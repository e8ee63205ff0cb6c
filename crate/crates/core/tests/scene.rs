use ldi_core::scene::{
    generate_view, overlap_filter, overlap_fraction, perturb_pose, random_scene, render_composite,
    sample_perturbation, simulate_detections, DetectionNoise, GenerationConfig, PosePerturbation,
};
use ldi_core::{min_depth_pool, Error, Mask, SceneSpecF64};

fn small() -> GenerationConfig {
    GenerationConfig {
        width: 64,
        height: 48,
        ..GenerationConfig::default()
    }
}

fn scene(seed: u64) -> SceneSpecF64 {
    random_scene(&small(), seed).unwrap()
}

#[test]
fn pooled_stack_equals_single_pass_render() {
    for seed in 0..20 {
        let s = scene(seed);
        let stack = generate_view(&s, 9).unwrap();
        let pooled = min_depth_pool(&stack, 0.5).unwrap();
        assert_eq!(pooled.image, render_composite(&s).unwrap().image, "seed {seed}");
    }
}

#[test]
fn visibility_masks_tile_the_image() {
    for seed in 0..10 {
        let s = scene(seed);
        let stack = generate_view(&s, 9).unwrap();
        let comp = render_composite(&s).unwrap();
        let mut union = Mask::filled(64, 48, false);
        for inst in &stack.instances {
            assert!(inst.visibility_mask.any());
            assert_eq!(inst.visibility_mask.and_not(inst.image.valid_mask()).unwrap().count(), 0);
            assert_eq!(union.and(&inst.visibility_mask).unwrap().count(), 0);
            union = union.or(&inst.visibility_mask).unwrap();
            assert_eq!(inst.visibility_mask, comp.index_map.map(|&i| i == inst.object_index));
        }
        // The layout is hole-free.
        assert_eq!(stack.layout.image.valid_count(), 64 * 48);
    }
}

#[test]
fn generation_is_seeded() {
    assert_eq!(scene(5), scene(5));
    assert_ne!(scene(5), scene(6));
    let cfg = small();
    for seed in 0..10 {
        let s = scene(seed);
        let n = s.objects.len();
        assert!(n >= cfg.min_objects && n <= cfg.max_objects);
        s.validate().unwrap();
    }
}

#[test]
fn overlap_filter_thresholds() {
    let stack = generate_view(&scene(1), 9).unwrap();
    let f = overlap_fraction(&stack).unwrap();
    assert!((0.0..1.0).contains(&f));
    assert!(overlap_filter(&stack, 0.0).unwrap());
    assert!(!overlap_filter(&stack, 1.0).unwrap());
    assert!(matches!(overlap_filter(&stack, 1.5), Err(Error::Config(_))));
}

#[test]
fn perturbations_stay_in_bounds() {
    let cfg = PosePerturbation::default();
    for seed in 0..200 {
        let d = sample_perturbation(&cfg, seed);
        for t in [d.tx, d.ty, d.tz] {
            assert!(t.abs() <= 0.3);
        }
        for r in [d.rx, d.ry, d.rz] {
            assert!(r.abs() <= 10.0);
        }
    }
    let zero = PosePerturbation {
        max_translation: 0.0,
        max_rotation_deg: 0.0,
    };
    let s = scene(0);
    assert_eq!(perturb_pose(&s.pose, &zero, 3), s.pose);
}

#[test]
fn detections_are_smoothed_and_seeded() {
    let stack = generate_view(&scene(2), 9).unwrap();
    let noise = DetectionNoise::default();
    let a = simulate_detections(&stack, &noise, 9, 77).unwrap();
    let b = simulate_detections(&stack, &noise, 9, 77).unwrap();
    assert_eq!(a, b);
    for (d, inst) in a.iter().zip(&stack.instances) {
        let sum: f64 = d.class_scores.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        for (c, &s) in d.class_scores.iter().enumerate() {
            let want = if c == inst.class_id as usize { 0.9 + 0.1 / 9.0 } else { 0.1 / 9.0 };
            assert!((s - want).abs() < 1e-15);
        }
        assert!(d.confidence_mask.as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
    }
    let exact = simulate_detections(&stack, &DetectionNoise::none(), 9, 1).unwrap();
    for (d, inst) in exact.iter().zip(&stack.instances) {
        assert_eq!(d.confidence_mask, inst.confidence_mask);
        assert_eq!(d.class_scores, inst.class_scores);
    }
}

#[test]
fn f32_scenes_render() {
    let s: ldi_core::SceneSpecF32 = random_scene(&small(), 3).unwrap();
    let stack = generate_view(&s, 9).unwrap();
    let pooled = min_depth_pool(&stack, 0.5).unwrap();
    assert_eq!(pooled.image, render_composite(&s).unwrap().image);
}
