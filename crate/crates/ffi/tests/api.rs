use std::ffi::{CStr, CString};
use std::ptr;

use fairkm_ffi::*;

fn last_error() -> String {
    let p = fairkm_last_error_message();
    assert!(!p.is_null(), "expected an error message");
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

struct Handles {
    ds: *mut FairkmDataset,
    radii: *mut FairkmRadii,
}

impl Drop for Handles {
    fn drop(&mut self) {
        unsafe {
            fairkm_radii_free(self.radii);
            fairkm_dataset_free(self.ds);
        }
    }
}

fn two_clusters(k: usize) -> Handles {
    let coords = [0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 10.0, 10.0, 11.0, 10.0, 10.0, 11.0];
    let mut h = Handles {
        ds: ptr::null_mut(),
        radii: ptr::null_mut(),
    };
    unsafe {
        assert_eq!(fairkm_dataset_new(coords.as_ptr(), 6, 2, &mut h.ds), FairkmStatus::Ok);
        assert_eq!(fairkm_radii_compute(h.ds, k, 0, 0, &mut h.radii), FairkmStatus::Ok);
    }
    h
}

#[test]
fn solve_round_trip() {
    let h = two_clusters(2);
    unsafe {
        assert_eq!(fairkm_dataset_len(h.ds), 6);
        assert_eq!(fairkm_dataset_dim(h.ds), 2);
        assert_eq!(fairkm_radii_len(h.radii), 6);
        let mut radii = [0.0; 6];
        assert_eq!(fairkm_radii_copy(h.radii, radii.as_mut_ptr(), 6), FairkmStatus::Ok);
        let s = 2f64.sqrt();
        assert_eq!(radii, [1.0, s, s, 1.0, s, s]);

        let opts = fairkm_options_default(2);
        assert_eq!(opts.gamma, 3.0);
        let mut res = ptr::null_mut();
        assert_eq!(fairkm_solve(h.ds, h.radii, &opts, &mut res), FairkmStatus::Ok);
        assert_eq!(fairkm_result_k(res), 2);
        assert_eq!(fairkm_result_dim(res), 2);
        let mut centers = [0.0; 4];
        assert_eq!(fairkm_result_centers(res, centers.as_mut_ptr(), 4), FairkmStatus::Ok);
        let mut ids = [0usize; 2];
        assert_eq!(fairkm_result_center_ids(res, ids.as_mut_ptr(), 2), FairkmStatus::Ok);
        assert!(ids.iter().any(|&i| i < 3) && ids.iter().any(|&i| i >= 3));
        // refinement reaches the two cluster means
        let mut pairs: Vec<[f64; 2]> = centers.chunks(2).map(|c| [c[0], c[1]]).collect();
        pairs.sort_by(|a, b| a[0].total_cmp(&b[0]));
        for (got, want) in pairs.iter().zip([[1.0 / 3.0, 1.0 / 3.0], [31.0 / 3.0, 31.0 / 3.0]]) {
            assert!((got[0] - want[0]).abs() < 1e-12 && (got[1] - want[1]).abs() < 1e-12);
        }
        assert!((fairkm_result_kmeans_cost(res) - 8.0 / 3.0).abs() < 1e-9);
        assert!(fairkm_result_kmedian_cost(res) > 0.0);
        assert!(fairkm_result_bound_ratio(res) <= 6.0);
        let _ = fairkm_result_accepted_swaps(res);
        fairkm_result_free(res);
    }
}

#[test]
fn deterministic_for_a_seed() {
    let h = two_clusters(2);
    let solve = |seed| unsafe {
        let mut opts = fairkm_options_default(2);
        opts.seed = seed;
        opts.refine_iterations = 0;
        let mut res = ptr::null_mut();
        assert_eq!(fairkm_solve(h.ds, h.radii, &opts, &mut res), FairkmStatus::Ok);
        let mut ids = [0usize; 2];
        fairkm_result_center_ids(res, ids.as_mut_ptr(), 2);
        let c = fairkm_result_kmeans_cost(res);
        fairkm_result_free(res);
        (ids, c)
    };
    assert_eq!(solve(7), solve(7));
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut ds = ptr::NonNull::<FairkmDataset>::dangling().as_ptr();
        assert_eq!(fairkm_dataset_new(ptr::null(), 2, 2, &mut ds), FairkmStatus::NullPointer);
        assert!(ds.is_null(), "out pointer cleared on failure");
        assert!(last_error().contains("coords"));

        let nan = [f64::NAN, 1.0];
        assert_eq!(fairkm_dataset_new(nan.as_ptr(), 2, 1, &mut ds), FairkmStatus::InvalidArgument);
        assert!(!last_error().is_empty());

        let h = two_clusters(3);
        let mut opts = fairkm_options_default(2);
        let mut res = ptr::null_mut();
        // radii for k = 3 cannot be met by two centers
        let far = [0.0, 100.0, 200.0];
        let mut line = ptr::null_mut();
        let mut tight = ptr::null_mut();
        assert_eq!(fairkm_dataset_new(far.as_ptr(), 3, 1, &mut line), FairkmStatus::Ok);
        assert_eq!(fairkm_radii_compute(line, 3, 0, 0, &mut tight), FairkmStatus::Ok);
        assert_eq!(fairkm_solve(line, tight, &opts, &mut res), FairkmStatus::Infeasible);
        assert!(res.is_null());
        assert!(last_error().contains("anchors"));

        opts.gamma = 1.5;
        assert_eq!(fairkm_solve(h.ds, h.radii, &opts, &mut res), FairkmStatus::InvalidArgument);
        opts = fairkm_options_default(0);
        assert_eq!(fairkm_solve(h.ds, h.radii, &opts, &mut res), FairkmStatus::InvalidArgument);
        assert_eq!(fairkm_solve(h.ds, ptr::null(), &opts, &mut res), FairkmStatus::NullPointer);

        // radii from a different dataset size
        assert_eq!(fairkm_solve(h.ds, tight, &fairkm_options_default(2), &mut res), FairkmStatus::InvalidArgument);

        let mut small = [0.0; 2];
        assert_eq!(fairkm_radii_copy(h.radii, small.as_mut_ptr(), 2), FairkmStatus::BufferTooSmall);

        // success clears the message
        assert_eq!(fairkm_radii_copy(tight, small.as_mut_ptr(), 2), FairkmStatus::BufferTooSmall);
        assert!(last_error().contains("3 needed"));
        let mut enough = [0.0; 6];
        assert_eq!(fairkm_radii_copy(h.radii, enough.as_mut_ptr(), 6), FairkmStatus::Ok);
        assert!(fairkm_last_error_message().is_null());

        fairkm_radii_free(tight);
        fairkm_dataset_free(line);
        // null handles are tolerated
        fairkm_dataset_free(ptr::null_mut());
        assert_eq!(fairkm_result_k(ptr::null()), 0);
        assert!(fairkm_result_kmeans_cost(ptr::null()).is_nan());
    }
}

#[test]
fn csv_loading_and_normalization() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pts.csv");
    std::fs::write(&path, "a,b,c\n1,10,x\n2,20,y\n3,30,z\n").unwrap();
    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    unsafe {
        let mut ds = ptr::null_mut();
        let cols = [0usize, 1];
        assert_eq!(fairkm_dataset_load_csv(cpath.as_ptr(), cols.as_ptr(), 2, 1, &mut ds), FairkmStatus::Ok);
        assert_eq!((fairkm_dataset_len(ds), fairkm_dataset_dim(ds)), (3, 2));
        assert_eq!(fairkm_dataset_normalize(ds), FairkmStatus::Ok);
        fairkm_dataset_free(ds);

        let mut bad = ptr::null_mut();
        assert_eq!(fairkm_dataset_load_csv(cpath.as_ptr(), ptr::null(), 0, 1, &mut bad), FairkmStatus::Parse);
        let missing = CString::new(dir.path().join("nope.csv").to_str().unwrap()).unwrap();
        assert_eq!(fairkm_dataset_load_csv(missing.as_ptr(), ptr::null(), 0, 0, &mut bad), FairkmStatus::Io);
        assert!(bad.is_null());
    }
}
