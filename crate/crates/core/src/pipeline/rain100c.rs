use std::fs;
use std::path::{Path, PathBuf};

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imageio::save_png;
use crate::rainsynth::{generate_sequence, ParamRanges, RainParams, RAIN100C_FRAMES};

pub const PARAMS_FILE: &str = "params.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackgroundManifest {
    pub name: String,
    pub index: u64,
    pub n_frames: usize,
    pub params: RainParams,
    pub frames: Vec<String>,
}

/// Renders `RAIN100C_FRAMES` continuous rain frames per background, each in
/// its own directory with a `params.toml` recording the sampled parameters.
pub fn rain100c(
    backgrounds: &[(String, RgbImage)],
    ranges: &ParamRanges,
    seed: u64,
    out_dir: &Path,
) -> Result<Vec<BackgroundManifest>> {
    let mut out = Vec::with_capacity(backgrounds.len());
    for (i, (name, bg)) in backgrounds.iter().enumerate() {
        let params = ranges.sample(seed, i as u64);
        let (frames, _) = generate_sequence::<f64>(bg, &params, RAIN100C_FRAMES).map_err(Error::stage("rainsynth"))?;
        let dir = out_dir.join(name);
        fs::create_dir_all(&dir)?;
        let mut names = Vec::with_capacity(frames.len());
        for (t, f) in frames.iter().enumerate() {
            let file = format!("rain_{t:02}.png");
            save_png(f, dir.join(&file))?;
            names.push(file);
        }
        let m = BackgroundManifest {
            name: name.clone(),
            index: i as u64,
            n_frames: frames.len(),
            params,
            frames: names,
        };
        fs::write(dir.join(PARAMS_FILE), toml::to_string(&m).expect("manifest serializes"))?;
        out.push(m);
    }
    Ok(out)
}

/// Names backgrounds after their file stems.
pub fn load_backgrounds(paths: &[PathBuf]) -> Result<Vec<(String, RgbImage)>> {
    paths
        .iter()
        .map(|p| {
            let name = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .ok_or_else(|| Error::InvalidParam(format!("no file name in {}", p.display())))?;
            Ok((name, crate::imageio::load_rgb(p)?))
        })
        .collect()
}
