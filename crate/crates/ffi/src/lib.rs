//! C ABI over `condent`.
//!
//! Spaces and partitions are opaque handles created by `*_new` style
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`CondentStatus`] and writes its result through an out pointer;
//! on failure a message is available from [`condent_last_error`] on the same
//! thread until the next call.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use condent::approximation::{best_approximation, worst_case_error};
use condent::entropy::{cond_entropy, max_cond_entropy};
use condent::martingale::{LikelihoodRatioFamily, ParametricModel};
use condent::partition::{count_partitions, join, meet, refines};
use condent::{Error, Event, FiniteSpace, Partition};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CondentStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Weights, labels or parameters were rejected.
    InvalidArgument = 2,
    /// A partition or event does not fit the space it was used with.
    SizeMismatch = 3,
    /// A size or count is outside the supported range.
    OutOfRange = 4,
    /// A numeric failure, such as a violated absolute-continuity condition.
    Numeric = 5,
    /// The library panicked; this is a bug.
    Internal = 6,
}

/// Opaque finite probability space.
pub struct CondentSpace(FiniteSpace);

/// Opaque partition of `{0, .., n-1}`.
pub struct CondentPartition(Partition);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> CondentStatus {
    match err {
        Error::SizeMismatch { .. } | Error::IndexOutOfRange { .. } => CondentStatus::SizeMismatch,
        Error::OutOfRange { .. } => CondentStatus::OutOfRange,
        Error::AbsoluteContinuity { .. }
        | Error::BoundViolated { .. }
        | Error::Unbounded
        | Error::Factorization { .. }
        | Error::DegenerateModel(_) => CondentStatus::Numeric,
        _ => CondentStatus::InvalidArgument,
    }
}

/// Runs `body`, converting errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), (CondentStatus, String)>) -> CondentStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => CondentStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CondentStatus::Internal
        }
    }
}

fn lib<T>(result: condent::Result<T>) -> Result<T, (CondentStatus, String)> {
    result.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (CondentStatus, String) {
    (CondentStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a, T>(data: *const T, len: usize, what: &str) -> Result<&'a [T], (CondentStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, (CondentStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), (CondentStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into the library from this thread.
#[no_mangle]
pub extern "C" fn condent_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn condent_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a space from `len` weights summing to one.
///
/// # Safety
/// `weights` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn condent_space_new(
    weights: *const f64,
    len: usize,
    out: *mut *mut CondentSpace,
) -> CondentStatus {
    guard(|| {
        let w = slice(weights, len, "weights")?;
        let space = lib(FiniteSpace::new(w, None))?;
        put(out, Box::into_raw(Box::new(CondentSpace(space))), "out")
    })
}

/// Uniform space on `len` outcomes.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn condent_space_uniform(len: usize, out: *mut *mut CondentSpace) -> CondentStatus {
    guard(|| {
        let space = lib(FiniteSpace::uniform(len))?;
        put(out, Box::into_raw(Box::new(CondentSpace(space))), "out")
    })
}

/// Number of outcomes, or 0 for a null handle.
///
/// # Safety
/// `space` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn condent_space_len(space: *const CondentSpace) -> usize {
    space.as_ref().map_or(0, |s| s.0.len())
}

/// Releases a space; null is ignored.
///
/// # Safety
/// `space` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn condent_space_free(space: *mut CondentSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Partition grouping outcomes with equal labels.
///
/// # Safety
/// `labels` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn condent_partition_from_labels(
    labels: *const usize,
    len: usize,
    out: *mut *mut CondentPartition,
) -> CondentStatus {
    guard(|| {
        let l = slice(labels, len, "labels")?;
        if l.is_empty() {
            return Err((CondentStatus::InvalidArgument, "a partition needs at least one outcome".into()));
        }
        put(out, Box::into_raw(Box::new(CondentPartition(Partition::from_labels(l)))), "out")
    })
}

/// Partition into singletons.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn condent_partition_points(len: usize, out: *mut *mut CondentPartition) -> CondentStatus {
    guard(|| {
        if len == 0 {
            return Err((CondentStatus::InvalidArgument, "a partition needs at least one outcome".into()));
        }
        put(out, Box::into_raw(Box::new(CondentPartition(Partition::points(len)))), "out")
    })
}

/// Partition with a single block.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn condent_partition_trivial(len: usize, out: *mut *mut CondentPartition) -> CondentStatus {
    guard(|| {
        if len == 0 {
            return Err((CondentStatus::InvalidArgument, "a partition needs at least one outcome".into()));
        }
        put(out, Box::into_raw(Box::new(CondentPartition(Partition::trivial(len)))), "out")
    })
}

/// Number of outcomes covered, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn condent_partition_size(p: *const CondentPartition) -> usize {
    p.as_ref().map_or(0, |p| p.0.size())
}

/// Number of blocks, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn condent_partition_num_blocks(p: *const CondentPartition) -> usize {
    p.as_ref().map_or(0, |p| p.0.num_blocks())
}

/// Writes the canonical block index of each outcome into `labels`, which
/// must hold exactly `condent_partition_size(p)` entries.
///
/// # Safety
/// `p` must be a live handle; `labels` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn condent_partition_labels(
    p: *const CondentPartition,
    labels: *mut usize,
    len: usize,
) -> CondentStatus {
    guard(|| {
        let p = &handle(p, "partition")?.0;
        if len != p.size() {
            return lib(Err(Error::SizeMismatch {
                expected: p.size(),
                found: len,
            }));
        }
        if labels.is_null() {
            return Err(null("labels"));
        }
        let dst = std::slice::from_raw_parts_mut(labels, len);
        dst.copy_from_slice(p.block_labels());
        Ok(())
    })
}

/// Releases a partition; null is ignored.
///
/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn condent_partition_free(p: *mut CondentPartition) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Common refinement of `xi` and `eta`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn condent_join(
    xi: *const CondentPartition,
    eta: *const CondentPartition,
    out: *mut *mut CondentPartition,
) -> CondentStatus {
    guard(|| {
        let j = lib(join(&handle(xi, "xi")?.0, &handle(eta, "eta")?.0))?;
        put(out, Box::into_raw(Box::new(CondentPartition(j))), "out")
    })
}

/// Finest common coarsening of `xi` and `eta`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn condent_meet(
    xi: *const CondentPartition,
    eta: *const CondentPartition,
    out: *mut *mut CondentPartition,
) -> CondentStatus {
    guard(|| {
        let m = lib(meet(&handle(xi, "xi")?.0, &handle(eta, "eta")?.0))?;
        put(out, Box::into_raw(Box::new(CondentPartition(m))), "out")
    })
}

/// Whether `xi <= eta` up to null outcomes of `space`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn condent_refines(
    space: *const CondentSpace,
    xi: *const CondentPartition,
    eta: *const CondentPartition,
    out: *mut bool,
) -> CondentStatus {
    guard(|| {
        let r = lib(refines(&handle(space, "space")?.0, &handle(xi, "xi")?.0, &handle(eta, "eta")?.0))?;
        put(out, r, "out")
    })
}

/// `H(xi | eta)` in nats.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn condent_cond_entropy(
    space: *const CondentSpace,
    xi: *const CondentPartition,
    eta: *const CondentPartition,
    out: *mut f64,
) -> CondentStatus {
    guard(|| {
        let r = lib(cond_entropy(&handle(space, "space")?.0, &handle(xi, "xi")?.0, &handle(eta, "eta")?.0))?;
        put(out, r.value, "out")
    })
}

/// Supremum of `H(xi | eta)` over partitions with atoms from `a`, in nats.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn condent_max_cond_entropy(
    space: *const CondentSpace,
    a: *const CondentPartition,
    eta: *const CondentPartition,
    out: *mut f64,
) -> CondentStatus {
    guard(|| {
        let r = lib(max_cond_entropy(&handle(space, "space")?.0, &handle(a, "a")?.0, &handle(eta, "eta")?.0))?;
        put(out, r.value, "out")
    })
}

/// Bell number `B_n` for `1 <= n <= 20`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn condent_bell(n: usize, out: *mut u64) -> CondentStatus {
    guard(|| {
        let (bell, _) = lib(count_partitions(n))?;
        put(out, bell, "out")
    })
}

/// Error `P(A △ B)` of the best approximation of the event with the given
/// `count` members by a union of `a_n`-blocks.
///
/// # Safety
/// Handles must be live; `members` must point to `count` readable values;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn condent_best_approximation_error(
    space: *const CondentSpace,
    members: *const usize,
    count: usize,
    a_n: *const CondentPartition,
    out: *mut f64,
) -> CondentStatus {
    guard(|| {
        let space = &handle(space, "space")?.0;
        let event = Event::new(slice(members, count, "members")?.iter().copied());
        lib(event.check(space.len()))?;
        let r = lib(best_approximation(space, &event, &handle(a_n, "a_n")?.0))?;
        put(out, r.error, "out")
    })
}

/// Largest best-approximation error over all unions of `a`-blocks.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn condent_worst_case_error(
    space: *const CondentSpace,
    a: *const CondentPartition,
    a_n: *const CondentPartition,
    out: *mut f64,
) -> CondentStatus {
    guard(|| {
        let r = lib(worst_case_error(&handle(space, "space")?.0, &handle(a, "a")?.0, &handle(a_n, "a_n")?.0))?;
        put(out, r.error, "out")
    })
}

/// `ln L_n^theta` of a 0/1 path under the Bernoulli model with true
/// parameter `theta0`. A zero factor gives negative infinity.
///
/// # Safety
/// `path` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn condent_bernoulli_log_lr(
    theta0: f64,
    theta: f64,
    path: *const usize,
    len: usize,
    out: *mut f64,
) -> CondentStatus {
    guard(|| {
        let path = slice(path, len, "path")?;
        let family = LikelihoodRatioFamily::new(lib(ParametricModel::bernoulli(theta0))?);
        let v = lib(family.log_value(&[theta], len, path))?;
        put(out, v, "out")
    })
}
