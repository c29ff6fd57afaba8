//! PNG / binary PPM loading and PNG writing.

use std::path::Path;

use image::{ImageFormat, RgbImage};

use crate::error::Result;

/// Loads an 8-bit RGB image. The container (PNG or P6 PPM) is detected from
/// the file contents, falling back to the extension.
pub fn load_rgb(path: impl AsRef<Path>) -> Result<RgbImage> {
    let reader = image::ImageReader::open(path.as_ref())?.with_guessed_format()?;
    Ok(reader.decode()?.to_rgb8())
}

pub fn save_png(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    img.save_with_format(path.as_ref(), ImageFormat::Png)?;
    Ok(())
}

pub fn save_ppm(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    img.save_with_format(path.as_ref(), ImageFormat::Pnm)?;
    Ok(())
}

pub fn solid(height: u32, width: u32, rgb: [u8; 3]) -> RgbImage {
    RgbImage::from_pixel(width, height, image::Rgb(rgb))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn png_and_ppm_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let img = RgbImage::from_fn(5, 3, |x, y| image::Rgb([x as u8 * 40, y as u8 * 70, 9]));
        let png = dir.path().join("a.png");
        let ppm = dir.path().join("a.ppm");
        save_png(&img, &png).unwrap();
        save_ppm(&img, &ppm).unwrap();
        assert_eq!(load_rgb(&png).unwrap(), img);
        assert_eq!(load_rgb(&ppm).unwrap(), img);
    }
}
