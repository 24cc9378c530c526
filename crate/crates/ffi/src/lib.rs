//! C ABI over the `antibp` crate.
//!
//! Objects are opaque heap handles released with the matching `_free`
//! function. Every fallible call returns an [`AbpStatus`]; on failure the
//! message is available from [`abp_last_error_message`] on the same thread.
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::CStr;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use libc::{c_char, c_double, c_int, size_t};

use antibp::ansatz::{antibp_encode, init_angles, random_layered};
use antibp::antibp::{prune, stage1, stage2, OptimizerConfig};
use antibp::gradients::adjoint_gradient;
use antibp::hamiltonian::{parse_hamiltonian, tfim, Hamiltonian};
use antibp::noise::{noisy_expectation, NoiseModel};
use antibp::sim::{expectation, run, Circuit};
use antibp::Error;

/// Opaque Pauli-sum Hamiltonian.
pub struct AbpHamiltonian(Hamiltonian);

/// Opaque parameterized circuit.
pub struct AbpCircuit(Circuit);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    Numerical = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> AbpStatus {
    match e {
        Error::BadCoefficient { .. }
        | Error::BadPauli { .. }
        | Error::LengthMismatch { .. }
        | Error::MalformedLine { .. }
        | Error::EmptyHamiltonian
        | Error::CircuitParse { .. } => AbpStatus::ParseError,
        Error::Diverged { .. } => AbpStatus::Numerical,
        _ => AbpStatus::InvalidArgument,
    }
}

struct Fail(AbpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> AbpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            AbpStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            AbpStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(AbpStatus::NullPointer, format!("{what} is null"))
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn read_text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null("text"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(AbpStatus::InvalidArgument, "text is not UTF-8".into()))
}

unsafe fn doubles<'a>(p: *const c_double, n: size_t, what: &str) -> Result<&'a [f64], Fail> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, n))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length excluding the NUL.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn abp_last_error_message(buf: *mut c_char, len: size_t) -> size_t {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Parses `<coefficient> <pauli-string>` lines.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn abp_hamiltonian_parse(
    text: *const c_char,
    out: *mut *mut AbpHamiltonian,
) -> AbpStatus {
    guard(|| {
        let slot = out_mut(out, "out")?;
        let h = parse_hamiltonian(read_text(text)?)?;
        *slot = Box::into_raw(Box::new(AbpHamiltonian(h)));
        Ok(())
    })
}

/// Open-chain transverse-field Ising model.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn abp_hamiltonian_tfim(
    n: size_t,
    coupling: c_double,
    field: c_double,
    out: *mut *mut AbpHamiltonian,
) -> AbpStatus {
    guard(|| {
        let slot = out_mut(out, "out")?;
        *slot = Box::into_raw(Box::new(AbpHamiltonian(tfim(n, coupling, field)?)));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn abp_hamiltonian_free(h: *mut AbpHamiltonian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn abp_hamiltonian_n_qubits(
    h: *const AbpHamiltonian,
    n: *mut size_t,
) -> AbpStatus {
    guard(|| {
        *out_mut(n, "n")? = as_ref(h, "hamiltonian")?.0.n_qubits();
        Ok(())
    })
}

/// Exact ground energy by dense diagonalization (at most 12 qubits).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn abp_hamiltonian_ground_energy(
    h: *const AbpHamiltonian,
    energy: *mut c_double,
) -> AbpStatus {
    guard(|| {
        *out_mut(energy, "energy")? = as_ref(h, "hamiltonian")?.0.exact_ground_energy()?;
        Ok(())
    })
}

/// Seeded random layered ansatz of `depth` layers.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn abp_circuit_random_layered(
    n: size_t,
    depth: size_t,
    seed: u64,
    out: *mut *mut AbpCircuit,
) -> AbpStatus {
    guard(|| {
        let slot = out_mut(out, "out")?;
        *slot = Box::into_raw(Box::new(AbpCircuit(random_layered(n, depth, seed)?)));
        Ok(())
    })
}

/// Parses the line-oriented circuit text format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn abp_circuit_parse(
    text: *const c_char,
    out: *mut *mut AbpCircuit,
) -> AbpStatus {
    guard(|| {
        let slot = out_mut(out, "out")?;
        let c = Circuit::from_text(read_text(text)?)?;
        *slot = Box::into_raw(Box::new(AbpCircuit(c)));
        Ok(())
    })
}

/// # Safety
/// `c` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn abp_circuit_free(c: *mut AbpCircuit) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn abp_circuit_n_slots(c: *const AbpCircuit, n: *mut size_t) -> AbpStatus {
    guard(|| {
        *out_mut(n, "n")? = as_ref(c, "circuit")?.0.n_slots();
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn abp_circuit_gate_counts(
    c: *const AbpCircuit,
    n_1q: *mut size_t,
    n_2q: *mut size_t,
) -> AbpStatus {
    guard(|| {
        let (a, b) = as_ref(c, "circuit")?.0.gate_counts();
        *out_mut(n_1q, "n_1q")? = a;
        *out_mut(n_2q, "n_2q")? = b;
        Ok(())
    })
}

/// Default angles for `c` drawn from `seed`, written to `angles[0..n_slots]`.
///
/// # Safety
/// `angles` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn abp_init_angles(
    c: *const AbpCircuit,
    seed: u64,
    angles: *mut c_double,
    len: size_t,
) -> AbpStatus {
    guard(|| {
        let c = &as_ref(c, "circuit")?.0;
        write_doubles(&init_angles(c.n_slots(), seed), angles, len)
    })
}

unsafe fn write_doubles(src: &[f64], dst: *mut c_double, len: size_t) -> Result<(), Fail> {
    if len < src.len() {
        return Err(Fail(
            AbpStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", src.len()),
        ));
    }
    if !src.is_empty() {
        if dst.is_null() {
            return Err(null("output buffer"));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    }
    Ok(())
}

/// `<psi(angles)|H|psi(angles)>` on the noiseless statevector.
///
/// # Safety
/// `angles` must point to `n_angles` doubles; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn abp_expectation(
    c: *const AbpCircuit,
    h: *const AbpHamiltonian,
    angles: *const c_double,
    n_angles: size_t,
    energy: *mut c_double,
) -> AbpStatus {
    guard(|| {
        let (c, h) = (&as_ref(c, "circuit")?.0, &as_ref(h, "hamiltonian")?.0);
        let x = doubles(angles, n_angles, "angles")?;
        *out_mut(energy, "energy")? = expectation(&run(c, x)?, h)?;
        Ok(())
    })
}

/// Exact per-slot gradient, written to `grad[0..n_slots]`.
///
/// # Safety
/// `angles` must point to `n_angles` doubles and `grad` to `grad_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn abp_adjoint_gradient(
    c: *const AbpCircuit,
    h: *const AbpHamiltonian,
    angles: *const c_double,
    n_angles: size_t,
    grad: *mut c_double,
    grad_len: size_t,
) -> AbpStatus {
    guard(|| {
        let (c, h) = (&as_ref(c, "circuit")?.0, &as_ref(h, "hamiltonian")?.0);
        let x = doubles(angles, n_angles, "angles")?;
        write_doubles(&adjoint_gradient(c, h, x)?, grad, grad_len)
    })
}

/// Trajectory estimate of the energy under per-gate depolarizing noise.
///
/// # Safety
/// `angles` must point to `n_angles` doubles; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn abp_noisy_expectation(
    c: *const AbpCircuit,
    h: *const AbpHamiltonian,
    angles: *const c_double,
    n_angles: size_t,
    p_1q: c_double,
    p_2q: c_double,
    trajectories: size_t,
    seed: u64,
    mean: *mut c_double,
    stderr: *mut c_double,
) -> AbpStatus {
    guard(|| {
        let (c, h) = (&as_ref(c, "circuit")?.0, &as_ref(h, "hamiltonian")?.0);
        let x = doubles(angles, n_angles, "angles")?;
        let nm = NoiseModel::new(p_1q, p_2q)?;
        let est = noisy_expectation(c, x, h, &nm, trajectories, seed)?;
        *out_mut(mean, "mean")? = est.mean;
        *out_mut(stderr, "stderr")? = est.stderr;
        Ok(())
    })
}

/// Noiseless gated training, pruning and fine-tuning of `c`.
/// On success `*pruned` receives a new circuit handle and `*energy` the
/// best fine-tuned energy. Zero epoch counts keep the library defaults.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn abp_antibp_run(
    c: *const AbpCircuit,
    h: *const AbpHamiltonian,
    seed: u64,
    stage1_epochs: size_t,
    stage2_epochs: size_t,
    learning_rate: c_double,
    pruned: *mut *mut AbpCircuit,
    energy: *mut c_double,
) -> AbpStatus {
    guard(|| {
        let (c, h) = (&as_ref(c, "circuit")?.0, &as_ref(h, "hamiltonian")?.0);
        let pruned = out_mut(pruned, "pruned")?;
        let energy = out_mut(energy, "energy")?;
        let base = OptimizerConfig {
            learning_rate,
            seed,
            ..OptimizerConfig::default()
        };
        let e1 = if stage1_epochs == 0 { 200 } else { stage1_epochs };
        let e2 = if stage2_epochs == 0 { base.epochs } else { stage2_epochs };
        let gc = antibp_encode(c)?;
        let (p, _) = stage1(&gc, h, &base.with_epochs(e1))?;
        let cut = prune(&gc, &p, base.prune_threshold)?;
        let r = stage2(&cut.circuit, &cut.theta0, h, &base.with_epochs(e2))?;
        *energy = r.energy;
        *pruned = Box::into_raw(Box::new(AbpCircuit(cut.circuit)));
        Ok(())
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn abp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Non-zero when `status` is [`AbpStatus::Ok`].
#[no_mangle]
pub extern "C" fn abp_status_ok(status: AbpStatus) -> c_int {
    (status == AbpStatus::Ok) as c_int
}
