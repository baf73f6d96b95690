use std::ffi::{c_char, CStr, CString};
use std::ptr;

use polydsa_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    unsafe {
        pd_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn small_mesh() -> *mut PdMesh {
    let mut mesh = ptr::null_mut();
    let st = unsafe { pd_mesh_generate(0.0, 0.0, 1.0, 1.0, 16, 3, 5, &mut mesh) };
    assert_eq!(st, PdStatus::Ok, "{}", last_error());
    mesh
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(pd_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn mesh_round_trip_through_file() {
    let mesh = small_mesh();
    unsafe {
        assert_eq!(pd_mesh_num_cells(mesh), 16);
        assert!(pd_mesh_num_facets(mesh) > 16);
        assert!(pd_mesh_h(mesh) > 0.0);
        let mut q = PdMeshQuality::default();
        assert_eq!(pd_mesh_quality(mesh, &mut q), PdStatus::Ok);
        assert!(q.anisotropy_ratio >= 1.0 && q.facets_min >= 3);

        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().join("m.txt").to_str().unwrap()).unwrap();
        assert_eq!(pd_mesh_write(mesh, path.as_ptr()), PdStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(pd_mesh_read(path.as_ptr(), &mut back), PdStatus::Ok);
        assert_eq!(pd_mesh_num_facets(back), pd_mesh_num_facets(mesh));
        assert_eq!(pd_mesh_h(back), pd_mesh_h(mesh));
        pd_mesh_free(back);
        pd_mesh_free(mesh);
    }
}

#[test]
fn errors_are_reported_not_raised() {
    unsafe {
        let mut mesh = ptr::null_mut();
        let st = pd_mesh_generate(1.0, 0.0, 0.0, 1.0, 16, 1, 0, &mut mesh);
        assert_eq!(st, PdStatus::InvalidArgument);
        assert!(mesh.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(
            pd_mesh_quality(ptr::null(), ptr::null_mut()),
            PdStatus::NullPointer
        );
        assert!(last_error().contains("mesh"));

        let missing = CString::new("/nonexistent/dir/mesh.txt").unwrap();
        assert_eq!(pd_mesh_read(missing.as_ptr(), &mut mesh), PdStatus::Io);

        let mut rho = 0.0;
        let few = [1.0];
        assert_eq!(
            pd_empirical_rho(few.as_ptr(), 1, 1e-10, &mut rho, ptr::null_mut()),
            PdStatus::InsufficientData
        );
        // null handles are harmless to free and query
        pd_mesh_free(ptr::null_mut());
        pd_problem_free(ptr::null_mut());
        assert_eq!(pd_mesh_num_cells(ptr::null()), 0);
        assert!(pd_mesh_h(ptr::null()).is_nan());
    }
}

#[test]
fn error_message_reports_needed_length() {
    unsafe {
        pd_mesh_quality(ptr::null(), ptr::null_mut());
        let need = pd_last_error_message(ptr::null_mut(), 0);
        let mut tiny = [1 as c_char; 4];
        assert_eq!(pd_last_error_message(tiny.as_mut_ptr(), 4), need);
        assert_eq!(tiny[3], 0);
        assert_eq!(CStr::from_ptr(tiny.as_ptr()).to_bytes().len(), 3);
    }
}

#[test]
fn geometric_history_gives_its_ratio() {
    let e: Vec<f64> = (0..8).map(|k| 0.3f64.powi(k)).collect();
    let (mut rho, mut window) = (0.0, 0usize);
    let st = unsafe { pd_empirical_rho(e.as_ptr(), e.len(), 1e-10, &mut rho, &mut window) };
    assert_eq!(st, PdStatus::Ok);
    assert!((rho - 0.3).abs() < 1e-12);
    assert_eq!(window, 7);
}

#[test]
fn problem_solves_converge_to_reference() {
    let mesh = small_mesh();
    unsafe {
        let mut prob = ptr::null_mut();
        assert_eq!(
            pd_problem_new(mesh, 1, 8, 1.0, 0.9, &mut prob),
            PdStatus::Ok,
            "{}",
            last_error()
        );
        // the problem keeps the mesh alive
        pd_mesh_free(mesh);
        let n = pd_problem_num_dofs(prob);
        assert_eq!(n, 16 * 3);

        let mut flux = vec![0.0; n];
        assert_eq!(
            pd_problem_reference_flux(prob, flux.as_mut_ptr(), n - 1),
            PdStatus::InvalidArgument
        );
        assert_eq!(
            pd_problem_reference_flux(prob, flux.as_mut_ptr(), n),
            PdStatus::Ok
        );
        assert!(flux.iter().all(|v| v.is_finite()) && flux.iter().any(|v| *v != 0.0));

        let mut si = std::mem::zeroed::<PdSolveSummary>();
        assert_eq!(
            pd_problem_solve(prob, PdVariant::None, 1e-12, 500, &mut si),
            PdStatus::Ok
        );
        let mut mip = std::mem::zeroed::<PdSolveSummary>();
        assert_eq!(
            pd_problem_solve(prob, PdVariant::MipDirichlet, 1e-12, 500, &mut mip),
            PdStatus::Ok
        );
        for s in [&si, &mip] {
            assert_eq!(s.termination, PdTermination::Tolerance);
            assert!(!s.divergent && s.rho < 1.0 && s.final_error < 1e-9);
        }
        assert!(mip.iterations < si.iterations);

        let mut bad = std::mem::zeroed::<PdSolveSummary>();
        assert_eq!(
            pd_problem_solve(prob, PdVariant::SipMarshak, 0.0, 10, &mut bad),
            PdStatus::InvalidArgument
        );
        pd_problem_free(prob);
    }
}

#[test]
fn header_declares_the_api() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/polydsa.h")).unwrap();
    for name in [
        "pd_version",
        "pd_last_error_message",
        "pd_mesh_generate",
        "pd_mesh_read",
        "pd_mesh_write",
        "pd_mesh_free",
        "pd_mesh_quality",
        "pd_problem_new",
        "pd_problem_solve",
        "pd_problem_reference_flux",
        "pd_empirical_rho",
        "typedef struct PdMesh PdMesh;",
        "typedef struct PdProblem PdProblem;",
        "PD_STATUS_NULL_POINTER = 2",
        "PD_VARIANT_MIP_MARSHAK = 4",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Some(cc) = which_cc() else { return };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"polydsa.h\"\nint main(void) { PdMesh *m = 0; PdStatus s = pd_mesh_generate(0, 0, 1, 1, 4, 1, 0, &m); pd_mesh_free(m); return s == PD_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let out = std::process::Command::new(cc)
        .args([
            "-fsyntax-only",
            "-Wall",
            "-Werror",
            "-I",
            concat!(env!("CARGO_MANIFEST_DIR"), "/include"),
        ])
        .arg(&src)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn which_cc() -> Option<&'static str> {
    ["cc", "gcc", "clang"].into_iter().find(|c| {
        std::process::Command::new(c)
            .arg("--version")
            .output()
            .is_ok()
    })
}
