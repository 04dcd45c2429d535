use std::ffi::{CStr, CString};
use std::ptr;

use grayfuzz::image::{phantom, save_pgm};
use grayfuzz::ThresholdMethod;
use grayfuzz_ffi::*;

unsafe fn last_error() -> String {
    let p = gf_last_error_message();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

unsafe fn image(w: u32, h: u32, px: &[u8]) -> *mut GfImage {
    let mut out = ptr::null_mut();
    assert_eq!(
        gf_image_new(w, h, px.as_ptr(), px.len(), &mut out),
        GfStatus::Ok
    );
    out
}

unsafe fn pixels(img: *const GfImage) -> Vec<u8> {
    let n = (gf_image_width(img) * gf_image_height(img)) as usize;
    let mut buf = vec![0u8; n];
    assert_eq!(gf_image_copy_pixels(img, buf.as_mut_ptr(), n), GfStatus::Ok);
    buf
}

#[test]
fn method_numbering_matches_the_library() {
    for (k, m) in ThresholdMethod::ALL.into_iter().enumerate() {
        let name = unsafe { CStr::from_ptr(gf_method_name(k as u32)) };
        assert_eq!(name.to_str().unwrap(), m.name());
    }
    assert!(gf_method_name(GF_METHOD_COUNT).is_null());
    assert_eq!(GfMethod::Yen as u32 + 1, GF_METHOD_COUNT);
    assert_eq!(GfMethod::Otsu as usize, 9);
}

#[test]
fn pgm_round_trip_through_buffers() {
    unsafe {
        let bytes = save_pgm(&phantom::two_level());
        let mut img = ptr::null_mut();
        assert_eq!(
            gf_image_from_pgm(bytes.as_ptr(), bytes.len(), &mut img),
            GfStatus::Ok
        );
        assert_eq!((gf_image_width(img), gf_image_height(img)), (256, 256));
        let mut buf = GfBuffer {
            data: ptr::null_mut(),
            len: 0,
        };
        assert_eq!(gf_image_to_pgm(img, &mut buf), GfStatus::Ok);
        assert_eq!(std::slice::from_raw_parts(buf.data, buf.len), &bytes[..]);
        gf_buffer_free(buf);
        gf_image_free(img);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut img = ptr::null_mut();
        assert_eq!(
            gf_image_new(2, 2, [1u8, 2, 3].as_ptr(), 3, &mut img),
            GfStatus::Image
        );
        assert!(img.is_null());
        assert!(last_error().contains('3'));
        assert_eq!(
            gf_image_from_pgm(b"P2 1 1 255 0".as_ptr(), 12, &mut img),
            GfStatus::Image
        );
        assert_eq!(
            gf_image_new(1, 1, ptr::null(), 1, &mut img),
            GfStatus::NullPointer
        );
        assert_eq!(last_error(), "pixels is null");

        let flat = image(3, 3, &[9; 9]);
        let mut level = 0u8;
        assert_eq!(
            gf_compute_threshold(flat, GfMethod::Otsu as u32, &mut level),
            GfStatus::Threshold
        );
        assert_eq!(
            gf_compute_threshold(flat, GfMethod::Mean as u32, &mut level),
            GfStatus::Ok
        );
        assert_eq!(level, 9);
        assert_eq!(
            gf_compute_threshold(flat, 99, &mut level),
            GfStatus::InvalidArgument
        );
        let mut noisy = ptr::null_mut();
        assert_eq!(
            gf_add_gaussian_noise(flat, -1.0, 0, &mut noisy),
            GfStatus::InvalidArgument
        );
        let mut ex = ptr::null_mut();
        let bad = CString::new(r#"{"window": 2}"#).unwrap();
        assert_eq!(gf_extract(flat, bad.as_ptr(), &mut ex), GfStatus::Pipeline);
        let junk = CString::new("{").unwrap();
        assert_eq!(
            gf_extract(flat, junk.as_ptr(), &mut ex),
            GfStatus::InvalidArgument
        );
        let mut small = [GfThresholdEntry {
            method: 0,
            level: 0,
            converged: 0,
        }; 4];
        assert_eq!(
            gf_threshold_report(flat, small.as_mut_ptr(), 4),
            GfStatus::InvalidArgument
        );
        let other = image(1, 1, &[0]);
        let mut m = GfMetrics {
            mae: 0.0,
            mse: 0.0,
            snr_db: 0.0,
            psnr_db: 0.0,
        };
        assert_eq!(gf_compare(flat, other, &mut m), GfStatus::Image);
        assert_eq!(
            gf_compare(ptr::null(), other, &mut m),
            GfStatus::NullPointer
        );
        gf_image_free(other);
        gf_image_free(flat);
        gf_image_free(ptr::null_mut());
        gf_extraction_free(ptr::null_mut());
    }
}

#[test]
fn extraction_end_to_end() {
    unsafe {
        let clean_px = phantom::shapes(64, 64, 50, 190).into_pixels();
        let clean = image(64, 64, &clean_px);
        let mut noisy = ptr::null_mut();
        assert_eq!(
            gf_add_gaussian_noise(clean, 30.0, 7, &mut noisy),
            GfStatus::Ok
        );

        let mut entries = [GfThresholdEntry {
            method: 0,
            level: 0,
            converged: 0,
        }; 15];
        assert_eq!(
            gf_threshold_report(noisy, entries.as_mut_ptr(), 15),
            GfStatus::Ok
        );
        for (k, e) in entries.iter().enumerate() {
            assert_eq!(e.method as usize, k);
            if e.converged != 0 {
                let mut level = 0;
                assert_eq!(
                    gf_compute_threshold(noisy, e.method, &mut level),
                    GfStatus::Ok
                );
                assert_eq!(level, e.level);
            }
        }

        let mut ex = ptr::null_mut();
        assert_eq!(gf_extract(noisy, ptr::null(), &mut ex), GfStatus::Ok);
        assert_eq!(gf_extraction_is_degenerate(ex), 0);
        let mut restored = ptr::null_mut();
        assert_eq!(gf_extraction_image(ex, &mut restored), GfStatus::Ok);
        let (mut before, mut after) = (
            std::mem::zeroed::<GfMetrics>(),
            std::mem::zeroed::<GfMetrics>(),
        );
        assert_eq!(gf_compare(noisy, clean, &mut before), GfStatus::Ok);
        assert_eq!(gf_compare(restored, clean, &mut after), GfStatus::Ok);
        assert!(after.psnr_db > before.psnr_db);

        let mut json = GfBuffer {
            data: ptr::null_mut(),
            len: 0,
        };
        assert_eq!(gf_extraction_rulebase_json(ex, &mut json), GfStatus::Ok);
        let text = std::str::from_utf8(std::slice::from_raw_parts(json.data, json.len)).unwrap();
        grayfuzz::fuzzy::RuleBase::from_json(text).unwrap();
        gf_buffer_free(json);

        // the handle API agrees with the library
        let direct = grayfuzz::pipeline::extract(
            &grayfuzz::GrayImage::new(64, 64, pixels(noisy)).unwrap(),
            &Default::default(),
        )
        .unwrap();
        assert_eq!(pixels(restored), direct.extracted.pixels());
        assert_eq!(gf_extraction_no_rule_pixels(ex), direct.no_rule_pixels);

        gf_image_free(restored);
        gf_extraction_free(ex);
        gf_image_free(noisy);
        gf_image_free(clean);
    }
}

#[test]
fn degenerate_input_reports_null_rule_base() {
    unsafe {
        let flat = image(4, 4, &[70; 16]);
        let mut ex = ptr::null_mut();
        assert_eq!(gf_extract(flat, ptr::null(), &mut ex), GfStatus::Ok);
        assert_eq!(gf_extraction_is_degenerate(ex), 1);
        let mut json = GfBuffer {
            data: ptr::null_mut(),
            len: 0,
        };
        assert_eq!(gf_extraction_rulebase_json(ex, &mut json), GfStatus::Ok);
        assert_eq!(std::slice::from_raw_parts(json.data, json.len), b"null");
        gf_buffer_free(json);
        gf_extraction_free(ex);
        gf_image_free(flat);
    }
}
