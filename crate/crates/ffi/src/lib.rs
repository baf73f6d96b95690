//! C interface to the polydsa solver.
//!
//! Meshes and problems are opaque handles created and destroyed through this
//! API. Every fallible function returns a [`PdStatus`]; on failure the message
//! of the last error on the calling thread is available through
//! [`pd_last_error_message`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use polydsa::dgspace::DgSpace;
use polydsa::dsa::DsaVariant;
use polydsa::geom::{Point2, Rect};
use polydsa::mesh::{
    generate_voronoi, mesh_quality, read_mesh, write_mesh, PolyMesh, VoronoiOptions,
};
use polydsa::quadrature::AngularQuadrature;
use polydsa::solver::{
    empirical_rho, reference_solution, run_scheme, IterationSettings, ReferenceOptions,
    ReferenceSolution, Scheme, Termination,
};
use polydsa::transport::{CrossSections, ManufacturedProblem, Source, TransportSystem};
use polydsa::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    Singular = 3,
    NoConvergence = 4,
    InsufficientData = 5,
    Io = 6,
    Internal = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdVariant {
    /// Unaccelerated source iteration.
    None = 0,
    SipDirichlet = 1,
    SipMarshak = 2,
    MipDirichlet = 3,
    MipMarshak = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdTermination {
    Tolerance = 0,
    Cap = 1,
    Divergence = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PdMeshQuality {
    pub anisotropy_ratio: f64,
    pub isoperimetric_min: f64,
    pub isoperimetric_mean: f64,
    pub facets_min: usize,
    pub facets_mean: f64,
    pub facets_max: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PdSolveSummary {
    /// Empirical convergence factor, NaN when too few errors lie above the floor.
    pub rho: f64,
    pub iterations: usize,
    pub divergent: bool,
    pub termination: PdTermination,
    /// Broken L² error of the final iterate against the reference.
    pub final_error: f64,
}

/// Opaque mesh handle.
pub struct PdMesh {
    mesh: Arc<PolyMesh>,
}

/// Opaque handle to an assembled manufactured-solution problem.
pub struct PdProblem {
    system: TransportSystem,
    reference: Option<ReferenceSolution>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PdStatus {
    match e {
        Error::InvalidArgument(_)
        | Error::MeshConstruction(_)
        | Error::Config(_)
        | Error::Parse { .. } => PdStatus::InvalidArgument,
        Error::SingularMatrix { .. } => PdStatus::Singular,
        Error::NoConvergence { .. } => PdStatus::NoConvergence,
        Error::InsufficientData(_) => PdStatus::InsufficientData,
        Error::Io(_) | Error::Csv(_) => PdStatus::Io,
    }
}

struct Failure(PdStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PdStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            PdStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            PdStatus::Panic
        }
    }
}

unsafe fn path_arg(path: *const c_char) -> Result<String, Failure> {
    if path.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(path)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Failure(PdStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (truncated and
/// NUL-terminated) and returns the buffer size needed for the full message.
///
/// # Safety
/// `buf` must be null or valid for writes of `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn pd_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let bytes = e.borrow();
        let bytes = bytes.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Generates a Lloyd-relaxed bounded Voronoi mesh of the rectangle `[x0, x1] × [y0, y1]`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn pd_mesh_generate(
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    n_sites: usize,
    seed: u64,
    lloyd_iterations: usize,
    out: *mut *mut PdMesh,
) -> PdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let domain = Rect::new(Point2::new(x0, y0), Point2::new(x1, y1))?;
        let opts = VoronoiOptions {
            lloyd_iterations,
            ..VoronoiOptions::default()
        };
        let mesh = generate_voronoi(&domain, n_sites, seed, opts)?;
        *out = Box::into_raw(Box::new(PdMesh {
            mesh: Arc::new(mesh),
        }));
        Ok(())
    })
}

/// Reads a mesh in the plain-text `polymesh 2d` format.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn pd_mesh_read(path: *const c_char, out: *mut *mut PdMesh) -> PdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = path_arg(path)?;
        let file = File::open(&p).map_err(Error::from)?;
        let mesh = read_mesh(BufReader::new(file))?;
        *out = Box::into_raw(Box::new(PdMesh {
            mesh: Arc::new(mesh),
        }));
        Ok(())
    })
}

/// Writes a mesh in the plain-text `polymesh 2d` format.
///
/// # Safety
/// `mesh` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pd_mesh_write(mesh: *const PdMesh, path: *const c_char) -> PdStatus {
    guard(|| {
        let m = mesh.as_ref().ok_or_else(|| null("mesh"))?;
        let p = path_arg(path)?;
        let file = File::create(&p).map_err(Error::from)?;
        write_mesh(&m.mesh, BufWriter::new(file))?;
        Ok(())
    })
}

/// Releases a mesh handle. Problems built from it stay valid.
///
/// # Safety
/// `mesh` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pd_mesh_free(mesh: *mut PdMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Number of cells, or 0 for a null handle.
///
/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pd_mesh_num_cells(mesh: *const PdMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.mesh.num_cells())
}

/// Number of facets, or 0 for a null handle.
///
/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pd_mesh_num_facets(mesh: *const PdMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.mesh.facets.len())
}

/// Largest cell diameter, or NaN for a null handle.
///
/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pd_mesh_h(mesh: *const PdMesh) -> f64 {
    mesh.as_ref().map_or(f64::NAN, |m| m.mesh.h())
}

/// # Safety
/// `mesh` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pd_mesh_quality(mesh: *const PdMesh, out: *mut PdMeshQuality) -> PdStatus {
    guard(|| {
        let m = mesh.as_ref().ok_or_else(|| null("mesh"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let q = mesh_quality(&m.mesh);
        *out = PdMeshQuality {
            anisotropy_ratio: q.anisotropy_ratio,
            isoperimetric_min: q.isoperimetric_min(),
            isoperimetric_mean: q.isoperimetric_mean(),
            facets_min: q.facets_min,
            facets_mean: q.facets_mean,
            facets_max: q.facets_max,
        };
        Ok(())
    })
}

/// Assembles the manufactured-solution transport problem on `mesh` with
/// uniform `sigma_t` and scattering ratio `c`.
///
/// # Safety
/// `mesh` must be a live handle and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn pd_problem_new(
    mesh: *const PdMesh,
    degree: usize,
    n_q: usize,
    sigma_t: f64,
    c: f64,
    out: *mut *mut PdProblem,
) -> PdStatus {
    guard(|| {
        let m = mesh.as_ref().ok_or_else(|| null("mesh"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let space = Arc::new(DgSpace::new(m.mesh.clone(), degree)?);
        let quad = AngularQuadrature::trapezoidal(n_q)?;
        let xs = CrossSections::uniform(m.mesh.num_cells(), sigma_t, c)?;
        let source = Source::Manufactured(ManufacturedProblem::new(&quad));
        let system = TransportSystem::assemble(space, xs, quad, source)?;
        *out = Box::into_raw(Box::new(PdProblem {
            system,
            reference: None,
        }));
        Ok(())
    })
}

/// # Safety
/// `problem` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pd_problem_free(problem: *mut PdProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Scalar-flux unknowns, or 0 for a null handle.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pd_problem_num_dofs(problem: *const PdProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.system.num_dofs())
}

fn ensure_reference(p: &mut PdProblem) -> Result<&ReferenceSolution, Failure> {
    if p.reference.is_none() {
        p.reference = Some(reference_solution(&p.system, &ReferenceOptions::default())?);
    }
    Ok(p.reference.as_ref().expect("just computed"))
}

/// Computes (once) the reference scalar flux and copies its coefficients into `out`.
///
/// # Safety
/// `problem` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn pd_problem_reference_flux(
    problem: *mut PdProblem,
    out: *mut f64,
    len: usize,
) -> PdStatus {
    guard(|| {
        let p = problem.as_mut().ok_or_else(|| null("problem"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let n = p.system.num_dofs();
        if len != n {
            return Err(Failure(
                PdStatus::InvalidArgument,
                format!("buffer holds {len} values, problem has {n}"),
            ));
        }
        let r = ensure_reference(p)?;
        ptr::copy_nonoverlapping(r.flux.as_ptr(), out, n);
        Ok(())
    })
}

/// Runs the outer iteration of `variant` from a zero initial guess and
/// summarises its convergence against the reference solution.
///
/// # Safety
/// `problem` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn pd_problem_solve(
    problem: *mut PdProblem,
    variant: PdVariant,
    tolerance: f64,
    max_iterations: usize,
    out: *mut PdSolveSummary,
) -> PdStatus {
    guard(|| {
        let p = problem.as_mut().ok_or_else(|| null("problem"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if !(tolerance > 0.0) || max_iterations == 0 {
            return Err(Failure(
                PdStatus::InvalidArgument,
                "tolerance and max_iterations must be positive".into(),
            ));
        }
        let scheme = match variant {
            PdVariant::None => Scheme::SourceIteration,
            PdVariant::SipDirichlet => Scheme::Dsa(DsaVariant::SipDirichlet),
            PdVariant::SipMarshak => Scheme::Dsa(DsaVariant::SipMarshak),
            PdVariant::MipDirichlet => Scheme::Dsa(DsaVariant::MipDirichlet),
            PdVariant::MipMarshak => Scheme::Dsa(DsaVariant::MipMarshak),
        };
        let reference = ensure_reference(p)?.flux.clone();
        let settings = IterationSettings {
            tolerance,
            max_iterations,
            ..IterationSettings::default()
        };
        let rep = run_scheme(&p.system, scheme, &reference, &settings, None)?;
        *out = PdSolveSummary {
            rho: rep.rho_value().unwrap_or(f64::NAN),
            iterations: rep.iterations,
            divergent: rep.divergent,
            termination: match rep.termination {
                Termination::Tolerance => PdTermination::Tolerance,
                Termination::Cap => PdTermination::Cap,
                Termination::Divergence => PdTermination::Divergence,
            },
            final_error: rep.errors.last().copied().unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Empirical convergence factor of an error history (see the Rust `empirical_rho`).
///
/// # Safety
/// `errors` must be valid for `len` reads; `rho` and `window` valid for writes
/// (`window` may be null).
#[no_mangle]
pub unsafe extern "C" fn pd_empirical_rho(
    errors: *const f64,
    len: usize,
    floor: f64,
    rho: *mut f64,
    window: *mut usize,
) -> PdStatus {
    guard(|| {
        if errors.is_null() && len > 0 {
            return Err(null("errors"));
        }
        let rho = rho.as_mut().ok_or_else(|| null("rho"))?;
        let e = if len == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(errors, len)
        };
        let r = empirical_rho(e, floor)?;
        *rho = r.rho;
        if let Some(w) = window.as_mut() {
            *w = r.window;
        }
        Ok(())
    })
}
