//! C ABI over the grayfuzz library.
//!
//! Every fallible function returns a [`GfStatus`]. On failure a description
//! is available from [`gf_last_error_message`] on the calling thread.
//! Handles returned through `out` parameters are owned by the caller and must
//! be released with the matching `*_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use grayfuzz::image::{add_gaussian_noise, load_pgm, save_pgm, NoiseSpec};
use grayfuzz::metrics::compare;
use grayfuzz::pipeline::{extract, ExtractionResult, PipelineConfig};
use grayfuzz::threshold::{compute_threshold, threshold_report};
use grayfuzz::{histogram, GrayImage, ThresholdMethod};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Image = 3,
    /// The requested method found no threshold.
    Threshold = 4,
    Pipeline = 5,
    Panic = 6,
}

/// Threshold methods, numbered as accepted by the `method` parameters.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfMethod {
    Default = 0,
    Huang = 1,
    IsoData = 2,
    Li = 3,
    MaxEntropy = 4,
    Mean = 5,
    MinError = 6,
    Minimum = 7,
    Moments = 8,
    Otsu = 9,
    Percentile = 10,
    RenyiEntropy = 11,
    Shanbhag = 12,
    Triangle = 13,
    Yen = 14,
}

pub const GF_METHOD_COUNT: u32 = 15;

/// 8-bit grayscale image.
pub struct GfImage(GrayImage);

/// Result of `gf_extract`.
pub struct GfExtraction(ExtractionResult);

/// Bytes allocated by the library; release with `gf_buffer_free`.
#[repr(C)]
pub struct GfBuffer {
    pub data: *mut u8,
    pub len: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GfThresholdEntry {
    pub method: u32,
    /// Meaningful only when `converged` is nonzero.
    pub level: u8,
    pub converged: u8,
}

/// PSNR and SNR are +infinity for identical images.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GfMetrics {
    pub mae: f64,
    pub mse: f64,
    pub snr_db: f64,
    pub psnr_db: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(GfStatus, String);

impl Failure {
    fn null(what: &str) -> Self {
        Failure(GfStatus::NullPointer, format!("{what} is null"))
    }
}

type FfiResult = Result<(), Failure>;

/// Runs `f`, records any failure and converts panics into `GfStatus::Panic`.
fn guard(f: impl FnOnce() -> FfiResult) -> GfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GfStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal panic: {msg}"));
            GfStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::null(what))
}

unsafe fn slice<'a>(data: *const u8, len: usize, what: &str) -> Result<&'a [u8], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(Failure::null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> FfiResult {
    if out.is_null() {
        return Err(Failure::null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn method(index: u32) -> Result<ThresholdMethod, Failure> {
    ThresholdMethod::ALL
        .get(index as usize)
        .copied()
        .ok_or_else(|| Failure(GfStatus::InvalidArgument, format!("unknown method {index}")))
}

fn image_err(e: impl std::fmt::Display) -> Failure {
    Failure(GfStatus::Image, e.to_string())
}

fn buffer(bytes: Vec<u8>) -> GfBuffer {
    let boxed = bytes.into_boxed_slice();
    let len = boxed.len();
    GfBuffer {
        data: Box::into_raw(boxed) as *mut u8,
        len,
    }
}

/// Message of the last failure on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn gf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static name of a method, or null for an unknown index.
#[no_mangle]
pub extern "C" fn gf_method_name(method: u32) -> *const c_char {
    const NAMES: [&CStr; 15] = [
        c"Default",
        c"Huang",
        c"IsoData",
        c"Li",
        c"MaxEntropy",
        c"Mean",
        c"MinError",
        c"Minimum",
        c"Moments",
        c"Otsu",
        c"Percentile",
        c"RenyiEntropy",
        c"Shanbhag",
        c"Triangle",
        c"Yen",
    ];
    NAMES
        .get(method as usize)
        .map_or(ptr::null(), |n| n.as_ptr())
}

/// Copies `len == width * height` row-major pixels into a new image.
#[no_mangle]
pub unsafe extern "C" fn gf_image_new(
    width: u32,
    height: u32,
    pixels: *const u8,
    len: usize,
    out: *mut *mut GfImage,
) -> GfStatus {
    guard(|| {
        let px = slice(pixels, len, "pixels")?;
        let img = GrayImage::new(width, height, px.to_vec()).map_err(image_err)?;
        put(out, GfImage(img))
    })
}

/// Parses binary PGM bytes.
#[no_mangle]
pub unsafe extern "C" fn gf_image_from_pgm(
    bytes: *const u8,
    len: usize,
    out: *mut *mut GfImage,
) -> GfStatus {
    guard(|| {
        let img = load_pgm(slice(bytes, len, "bytes")?).map_err(image_err)?;
        put(out, GfImage(img))
    })
}

/// Serializes as binary PGM.
#[no_mangle]
pub unsafe extern "C" fn gf_image_to_pgm(image: *const GfImage, out: *mut GfBuffer) -> GfStatus {
    guard(|| {
        let img = deref(image, "image")?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        *out = buffer(save_pgm(&img.0));
        Ok(())
    })
}

/// Width in pixels; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn gf_image_width(image: *const GfImage) -> u32 {
    image.as_ref().map_or(0, |i| i.0.width())
}

/// Height in pixels; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn gf_image_height(image: *const GfImage) -> u32 {
    image.as_ref().map_or(0, |i| i.0.height())
}

/// Copies the pixels into `dst`, which must hold `width * height` bytes.
#[no_mangle]
pub unsafe extern "C" fn gf_image_copy_pixels(
    image: *const GfImage,
    dst: *mut u8,
    len: usize,
) -> GfStatus {
    guard(|| {
        let img = deref(image, "image")?;
        let px = img.0.pixels();
        if len != px.len() {
            return Err(Failure(
                GfStatus::InvalidArgument,
                format!("buffer holds {len} bytes, image has {}", px.len()),
            ));
        }
        if dst.is_null() && len > 0 {
            return Err(Failure::null("dst"));
        }
        ptr::copy_nonoverlapping(px.as_ptr(), dst, len);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn gf_image_free(image: *mut GfImage) {
    if !image.is_null() {
        drop(Box::from_raw(image));
    }
}

#[no_mangle]
pub unsafe extern "C" fn gf_buffer_free(buffer: GfBuffer) {
    if !buffer.data.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(
            buffer.data,
            buffer.len,
        )));
    }
}

/// Seeded additive Gaussian noise; `sigma` must be finite and non-negative.
#[no_mangle]
pub unsafe extern "C" fn gf_add_gaussian_noise(
    image: *const GfImage,
    sigma: f64,
    seed: u64,
    out: *mut *mut GfImage,
) -> GfStatus {
    guard(|| {
        let img = deref(image, "image")?;
        let spec = NoiseSpec::new(sigma, seed)
            .map_err(|e| Failure(GfStatus::InvalidArgument, e.to_string()))?;
        put(out, GfImage(add_gaussian_noise(&img.0, &spec)))
    })
}

/// Threshold level of one method on the image histogram.
#[no_mangle]
pub unsafe extern "C" fn gf_compute_threshold(
    image: *const GfImage,
    method: u32,
    level: *mut u8,
) -> GfStatus {
    guard(|| {
        let img = deref(image, "image")?;
        let m = self::method(method)?;
        if level.is_null() {
            return Err(Failure::null("level"));
        }
        let t = compute_threshold(m, &histogram(&img.0))
            .map_err(|e| Failure(GfStatus::Threshold, format!("{m}: {e}")))?;
        *level = t;
        Ok(())
    })
}

/// Fills `entries` with all fifteen methods in `GfMethod` order.
/// `capacity` must be at least `GF_METHOD_COUNT`.
#[no_mangle]
pub unsafe extern "C" fn gf_threshold_report(
    image: *const GfImage,
    entries: *mut GfThresholdEntry,
    capacity: usize,
) -> GfStatus {
    guard(|| {
        let img = deref(image, "image")?;
        if entries.is_null() {
            return Err(Failure::null("entries"));
        }
        if capacity < GF_METHOD_COUNT as usize {
            return Err(Failure(
                GfStatus::InvalidArgument,
                format!("capacity {capacity} < {GF_METHOD_COUNT}"),
            ));
        }
        let report = threshold_report(&histogram(&img.0));
        let out = std::slice::from_raw_parts_mut(entries, capacity);
        for (k, m) in ThresholdMethod::ALL.into_iter().enumerate() {
            let level = report.get(m).and_then(|e| e.level());
            out[k] = GfThresholdEntry {
                method: k as u32,
                level: level.unwrap_or(0),
                converged: u8::from(level.is_some()),
            };
        }
        Ok(())
    })
}

/// Runs the extraction pipeline. `config_json` is a JSON pipeline
/// configuration, or null for the defaults.
#[no_mangle]
pub unsafe extern "C" fn gf_extract(
    image: *const GfImage,
    config_json: *const c_char,
    out: *mut *mut GfExtraction,
) -> GfStatus {
    guard(|| {
        let img = deref(image, "image")?;
        let cfg = if config_json.is_null() {
            PipelineConfig::default()
        } else {
            let text = CStr::from_ptr(config_json)
                .to_str()
                .map_err(|e| Failure(GfStatus::InvalidArgument, e.to_string()))?;
            serde_json::from_str(text)
                .map_err(|e| Failure(GfStatus::InvalidArgument, format!("config: {e}")))?
        };
        let result =
            extract(&img.0, &cfg).map_err(|e| Failure(GfStatus::Pipeline, e.to_string()))?;
        put(out, GfExtraction(result))
    })
}

/// New image holding the extracted result.
#[no_mangle]
pub unsafe extern "C" fn gf_extraction_image(
    extraction: *const GfExtraction,
    out: *mut *mut GfImage,
) -> GfStatus {
    guard(|| {
        let ex = deref(extraction, "extraction")?;
        put(out, GfImage(ex.0.extracted.clone()))
    })
}

/// Pixels that took the fallback level; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn gf_extraction_no_rule_pixels(extraction: *const GfExtraction) -> usize {
    extraction.as_ref().map_or(0, |e| e.0.no_rule_pixels)
}

/// 1 when the input had a single intensity and was returned unchanged.
#[no_mangle]
pub unsafe extern "C" fn gf_extraction_is_degenerate(extraction: *const GfExtraction) -> u8 {
    extraction.as_ref().map_or(0, |e| u8::from(e.0.degenerate))
}

/// Learned rule base as JSON text (not NUL-terminated); `null` for
/// degenerate input.
#[no_mangle]
pub unsafe extern "C" fn gf_extraction_rulebase_json(
    extraction: *const GfExtraction,
    out: *mut GfBuffer,
) -> GfStatus {
    guard(|| {
        let ex = deref(extraction, "extraction")?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let json =
            ex.0.rulebase
                .as_ref()
                .map_or_else(|| "null".to_string(), |r| r.to_json());
        *out = buffer(json.into_bytes());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn gf_extraction_free(extraction: *mut GfExtraction) {
    if !extraction.is_null() {
        drop(Box::from_raw(extraction));
    }
}

/// Quality of `test` against `reference`; dimensions must match.
#[no_mangle]
pub unsafe extern "C" fn gf_compare(
    test: *const GfImage,
    reference: *const GfImage,
    out: *mut GfMetrics,
) -> GfStatus {
    guard(|| {
        let t = deref(test, "test")?;
        let r = deref(reference, "reference")?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let m = compare(&t.0, &r.0).map_err(image_err)?;
        *out = GfMetrics {
            mae: m.mae,
            mse: m.mse,
            snr_db: m.snr_db,
            psnr_db: m.psnr_db,
        };
        Ok(())
    })
}
