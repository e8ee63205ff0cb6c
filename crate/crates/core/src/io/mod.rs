//! On-disk formats: layered scene directories (PNG + JSON manifest) and the
//! binary `LDI1` container.

mod container;
mod png;
mod stack;

pub use container::{decode_ldi, encode_ldi, load_ldi, save_ldi, LDI_HEADER_LEN, LDI_MAGIC, LDI_SAMPLE_LEN};
pub use png::{
    depth_to_mm, load_depth_png, load_gray_png, load_mask_png, load_rgba_depth, load_rgba_png, save_depth_png,
    save_gray_png, save_mask_png, save_rgba_depth, save_rgba_png, MAX_DEPTH_M,
};
pub use stack::{
    load_manifest, load_stack, save_stack, CameraRecord, InstanceMeta, LoadedStack, Manifest, PoseRecord,
    StackMetadata, FORMAT_VERSION,
};

use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub(crate) fn require(path: &Path) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::MissingFile(path.to_path_buf()))
    }
}

/// Writes pretty JSON with a trailing newline.
pub fn write_json<S: serde::Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    std::fs::write(path, text).map_err(io_err(path))
}

pub fn read_json<D: serde::de::DeserializeOwned>(path: &Path) -> Result<D> {
    require(path)?;
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}
