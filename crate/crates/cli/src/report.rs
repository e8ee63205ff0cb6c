use std::fs;
use std::path::{Path, PathBuf};

use ldi_core::io::{load_ldi, load_rgba_depth, load_stack};
use ldi_core::metrics::{layer_histogram, masked_errors, per_layer_eval, ssim_rgb, ErrorPair, LayerEval, Quantity, SsimParams, NOVEL_DEPTH_EPS};
use ldi_core::{first_layer, ldi_from_image, ldi_from_stack, Ldi, RgbadImage};
use serde::{Deserialize, Serialize};

use crate::args::EvalArgs;
use crate::config::RunConfig;
use crate::error::{CliError, Result};

/// One evaluated pair. Colour and depth errors cover the mutually valid pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemReport {
    pub name: String,
    pub pixels: usize,
    pub color: ErrorPair,
    pub depth: ErrorPair,
    pub ssim: f64,
    pub layers: Vec<LayerEval>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub color: ErrorPair,
    pub depth: ErrorPair,
    pub ssim: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub pred: Vec<f64>,
    pub gt: Vec<f64>,
}

/// Field order is the JSON key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Unweighted mean over items.
    pub mean: Summary,
    pub items: Vec<ItemReport>,
    pub histogram: Histogram,
    pub ssim_params: SsimParams,
    pub novel_depth_eps: f64,
}

struct EvalInput {
    ldi: Ldi<f64>,
    image: RgbadImage<f64>,
}

/// `ldi.bin` wins over a layer stack, which wins over a plain RGBA-D image.
fn load_input(dir: &Path) -> Result<Option<EvalInput>> {
    let ldi = if dir.join("ldi.bin").is_file() {
        load_ldi::<f64>(&dir.join("ldi.bin"))?
    } else if dir.join("manifest.json").is_file() {
        ldi_from_stack(&load_stack::<f64>(dir)?.stack)?
    } else if dir.join("rgba.png").is_file() {
        let image = load_rgba_depth::<f64>(dir)?;
        let ldi = ldi_from_image(&image, 0);
        return Ok(Some(EvalInput { ldi, image }));
    } else {
        return Ok(None);
    };
    Ok(Some(EvalInput {
        image: first_layer(&ldi),
        ldi,
    }))
}

fn subdirs(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let rd = fs::read_dir(dir).map_err(|source| ldi_core::Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for e in rd {
        let e = e.map_err(|source| ldi_core::Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        if e.path().is_dir() {
            out.push((e.file_name().to_string_lossy().into_owned(), e.path()));
        }
    }
    out.sort();
    Ok(out)
}

fn load_side(dir: &Path) -> Result<Vec<(String, EvalInput)>> {
    if !dir.is_dir() {
        return Err(CliError::Missing(dir.to_path_buf()));
    }
    if let Some(item) = load_input(dir)? {
        return Ok(vec![(".".to_string(), item)]);
    }
    let mut items = Vec::new();
    for (name, path) in subdirs(dir)? {
        if let Some(item) = load_input(&path)? {
            items.push((name, item));
        }
    }
    Ok(items)
}

pub fn evaluate_pair(
    name: &str,
    pred: &RgbadImage<f64>,
    pred_ldi: &Ldi<f64>,
    gt: &RgbadImage<f64>,
    gt_ldi: &Ldi<f64>,
    params: &SsimParams,
) -> Result<ItemReport> {
    let mask = pred.valid_mask().and(gt.valid_mask())?;
    let color = masked_errors(pred, gt, &mask, Quantity::Color)?;
    let depth = masked_errors(pred, gt, &mask, Quantity::Depth)?;
    // Invalid pixels are zeroed on both sides so they cannot affect SSIM.
    let ssim = ssim_rgb(&pred.masked(&mask)?, &gt.masked(&mask)?, params)?;
    let layers = per_layer_eval(pred_ldi, gt_ldi, gt_ldi.max_depth_complexity().max(1))?;
    Ok(ItemReport {
        name: name.to_string(),
        pixels: mask.count(),
        color,
        depth,
        ssim,
        layers,
    })
}

fn mean_pair(items: &[ItemReport], f: impl Fn(&ItemReport) -> ErrorPair) -> ErrorPair {
    let n = items.len() as f64;
    ErrorPair {
        mpe: items.iter().map(|i| f(i).mpe).sum::<f64>() / n,
        rmse: items.iter().map(|i| f(i).rmse).sum::<f64>() / n,
    }
}

pub fn cmd_eval(pred_dir: &Path, gt_dir: &Path, params: &SsimParams) -> Result<EvalReport> {
    let pred = load_side(pred_dir)?;
    let gt = load_side(gt_dir)?;
    if gt.is_empty() {
        return Err(CliError::Mismatch(format!("no ground truth found in {}", gt_dir.display())));
    }
    let names = |v: &[(String, EvalInput)]| v.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>();
    if names(&pred) != names(&gt) {
        return Err(CliError::Mismatch(format!(
            "prediction items {:?} vs ground truth items {:?}",
            names(&pred),
            names(&gt)
        )));
    }
    let items = pred
        .iter()
        .zip(&gt)
        .map(|((name, p), (_, g))| evaluate_pair(name, &p.image, &p.ldi, &g.image, &g.ldi, params))
        .collect::<Result<Vec<_>>>()?;
    let n = items.len() as f64;
    let pred_ldis: Vec<_> = pred.into_iter().map(|(_, i)| i.ldi).collect();
    let gt_ldis: Vec<_> = gt.into_iter().map(|(_, i)| i.ldi).collect();
    Ok(EvalReport {
        mean: Summary {
            color: mean_pair(&items, |i| i.color),
            depth: mean_pair(&items, |i| i.depth),
            ssim: items.iter().map(|i| i.ssim).sum::<f64>() / n,
        },
        items,
        histogram: Histogram {
            pred: layer_histogram(&pred_ldis),
            gt: layer_histogram(&gt_ldis),
        },
        ssim_params: *params,
        novel_depth_eps: NOVEL_DEPTH_EPS,
    })
}

pub fn run_eval(args: &EvalArgs) -> Result<EvalReport> {
    let mut cfg = RunConfig::load_or_default(args.config.config.as_deref(), "eval")?;
    cfg.inputs = vec![
        args.pred.to_string_lossy().into_owned(),
        args.gt.to_string_lossy().into_owned(),
    ];
    let report = cmd_eval(&args.pred, &args.gt, &cfg.ssim)?;
    if let Some(parent) = args.report.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| ldi_core::Error::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    ldi_core::io::write_json(&args.report, &report)?;
    cfg.save(&args.report.with_extension("run_config.json"))?;
    let m = &report.mean;
    println!(
        "color mpe {:.4} rmse {:.4} | depth mpe {:.5} rmse {:.5} | ssim {:.5}",
        m.color.mpe, m.color.rmse, m.depth.mpe, m.depth.rmse, m.ssim
    );
    Ok(report)
}
