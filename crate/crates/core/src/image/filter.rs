use super::GrayImage;

/// Mean over a `window`×`window` neighborhood, rounded half up.
///
/// Pixels outside the image are replaced by the nearest edge pixel. `window`
/// must be odd; a window of 1 returns the image unchanged.
pub fn local_mean(image: &GrayImage, window: usize) -> GrayImage {
    assert!(window % 2 == 1, "window must be odd");
    if window == 1 {
        return image.clone();
    }
    let (w, h) = (image.width() as usize, image.height() as usize);
    let r = (window / 2) as isize;
    let area = (window * window) as u64;
    let px = image.pixels();
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;

    // horizontal pass with edge replication, then vertical
    let mut rows = vec![0u64; w * h];
    for y in 0..h {
        let line = &px[y * w..(y + 1) * w];
        for x in 0..w {
            rows[y * w + x] = (-r..=r)
                .map(|dx| line[clamp(x as isize + dx, w)] as u64)
                .sum();
        }
    }
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let sum: u64 = (-r..=r)
                .map(|dy| rows[clamp(y as isize + dy, h) * w + x])
                .sum();
            // floor(sum / area + 1/2) in integers
            out.push(((2 * sum + area) / (2 * area)) as u8);
        }
    }
    GrayImage::new(image.width(), image.height(), out).expect("same dimensions")
}
