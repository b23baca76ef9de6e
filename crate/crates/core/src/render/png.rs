use super::raster::RasterImage;
use crate::error::{Error, Result};

/// Encodes 8-bit RGBA (truecolor with alpha).
pub fn encode_png(img: &RasterImage) -> Result<Vec<u8>> {
    if img.width == 0 || img.height == 0 {
        return Err(Error::invalid("cannot encode an image with zero width or height"));
    }
    if img.pixels.len() != img.width as usize * img.height as usize * 4 {
        return Err(Error::invalid("pixel buffer length does not match image size"));
    }
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, img.width, img.height);
        encoder.set_color(png::ColorType::Rgba);
        encoder.set_depth(png::BitDepth::Eight);
        let mut writer = encoder.write_header().map_err(|e| Error::Png(e.to_string()))?;
        writer
            .write_image_data(&img.pixels)
            .map_err(|e| Error::Png(e.to_string()))?;
        writer.finish().map_err(|e| Error::Png(e.to_string()))?;
    }
    Ok(out)
}

/// Decodes an 8-bit RGBA PNG.
pub fn decode_png(bytes: &[u8]) -> Result<RasterImage> {
    let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(|e| Error::Png(e.to_string()))?;
    let mut buf = vec![0; reader.output_buffer_size().unwrap_or(0)];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::Png(e.to_string()))?;
    if info.color_type != png::ColorType::Rgba || info.bit_depth != png::BitDepth::Eight {
        return Err(Error::Png(format!(
            "expected 8-bit RGBA, found {:?} at {:?}",
            info.color_type, info.bit_depth
        )));
    }
    buf.truncate(info.buffer_size());
    Ok(RasterImage {
        width: info.width,
        height: info.height,
        pixels: buf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::render::Rgba;

    #[test]
    fn single_red_pixel() {
        let img = RasterImage::new(1, 1, Rgba::new(255, 0, 0, 255));
        let bytes = encode_png(&img).unwrap();
        assert_eq!(&bytes[..8], b"\x89PNG\r\n\x1a\n");
        assert_eq!(decode_png(&bytes).unwrap().get(0, 0), Rgba::new(255, 0, 0, 255));
    }

    #[test]
    fn two_by_two_round_trip() {
        let img = RasterImage {
            width: 2,
            height: 2,
            pixels: vec![1, 2, 3, 4, 255, 0, 128, 7, 9, 9, 9, 0, 0, 0, 0, 255],
        };
        assert_eq!(decode_png(&encode_png(&img).unwrap()).unwrap(), img);
    }

    #[test]
    fn empty_image_rejected() {
        let img = RasterImage::new(0, 0, Rgba::TRANSPARENT);
        assert!(matches!(encode_png(&img), Err(Error::InvalidParams(_))));
    }
}
