//! C interface to `rsfol`.
//!
//! Objects are opaque handles created by `*_parse`/`*_load` functions and
//! released with the matching `*_free`. Every fallible function returns an
//! [`RsfolStatus`]; on failure, [`rsfol_last_error`] describes the error for
//! the calling thread. Strings returned through out-parameters are owned by
//! the caller and must be released with [`rsfol_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rsfol::fol::{normalize, parse_query, ConjunctiveQuery};
use rsfol::geometry::{compute_gsd, GsdMetadata, PredicateContext};
use rsfol::inference::{hypothesis_count, score_query};
use rsfol::retrieval::{load_corpus, retrieve, Corpus, RankedRun, RetrieveOptions};
use rsfol::translate::offline_translate;
use rsfol::vocab::Vocabulary;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsfolStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    VocabularyError = 4,
    IoError = 5,
    SchemaError = 6,
    InferenceError = 7,
    NotFound = 8,
    InvalidArgument = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsfolVocab {
    Dota = 0,
    Flood = 1,
}

impl RsfolVocab {
    fn vocabulary(self) -> Vocabulary {
        match self {
            RsfolVocab::Dota => Vocabulary::dota(),
            RsfolVocab::Flood => Vocabulary::flood(),
        }
    }
}

/// A parsed and normalized query.
pub struct RsfolQuery(ConjunctiveQuery);

/// A loaded corpus of scenes.
pub struct RsfolCorpus(Corpus);

/// A ranking produced by [`rsfol_retrieve`].
pub struct RsfolRun(RankedRun);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

struct Failure(RsfolStatus, String);

type FfiResult<T> = Result<T, Failure>;

fn fail<T>(status: RsfolStatus, message: impl ToString) -> FfiResult<T> {
    Err(Failure(status, message.to_string()))
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> FfiResult<()>) -> RsfolStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            RsfolStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RsfolStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return fail(RsfolStatus::NullPointer, format!("`{name}` is null"));
    }
    CStr::from_ptr(p).to_str().or_else(|_| fail(RsfolStatus::InvalidUtf8, format!("`{name}` is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> FfiResult<&'a T> {
    p.as_ref().map_or_else(|| fail(RsfolStatus::NullPointer, format!("`{name}` is null")), Ok)
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> FfiResult<()> {
    if out.is_null() {
        return fail(RsfolStatus::NullPointer, format!("`{name}` is null"));
    }
    out.write(value);
    Ok(())
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

fn check_floor(floor: f64) -> FfiResult<()> {
    if (0.0..=1.0).contains(&floor) {
        Ok(())
    } else {
        fail(RsfolStatus::InvalidArgument, format!("floor {floor} is outside [0, 1]"))
    }
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn rsfol_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rsfol_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses FOL text and validates it against the vocabulary.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsfol_query_parse(text: *const c_char, vocab: RsfolVocab, out: *mut *mut RsfolQuery) -> RsfolStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let q = parse_query(text).or_else(|e| fail(RsfolStatus::ParseError, e))?;
        let q = normalize(&q, &vocab.vocabulary()).or_else(|e| fail(RsfolStatus::VocabularyError, e))?;
        write_out(out, Box::into_raw(Box::new(RsfolQuery(q))), "out")
    })
}

/// Translates a sentence with the offline pattern translator.
///
/// # Safety
/// As for [`rsfol_query_parse`].
#[no_mangle]
pub unsafe extern "C" fn rsfol_query_translate_offline(
    text: *const c_char,
    vocab: RsfolVocab,
    out: *mut *mut RsfolQuery,
) -> RsfolStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let q = offline_translate(text, &vocab.vocabulary()).or_else(|e| fail(RsfolStatus::ParseError, e))?;
        write_out(out, Box::into_raw(Box::new(RsfolQuery(q))), "out")
    })
}

/// Writes the canonical FOL text of `query` to `out`.
///
/// # Safety
/// `query` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsfol_query_render(query: *const RsfolQuery, out: *mut *mut c_char) -> RsfolStatus {
    guard(|| {
        let q = ref_arg(query, "query")?;
        write_out(out, c_string(q.0.render()), "out")
    })
}

/// Number of distinct variables, or 0 for a null handle.
///
/// # Safety
/// `query` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rsfol_query_variable_count(query: *const RsfolQuery) -> usize {
    query.as_ref().map_or(0, |q| q.0.variables().len())
}

/// # Safety
/// `query` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rsfol_query_free(query: *mut RsfolQuery) {
    if !query.is_null() {
        drop(Box::from_raw(query));
    }
}

/// Loads a scene file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsfol_corpus_load(path: *const c_char, vocab: RsfolVocab, out: *mut *mut RsfolCorpus) -> RsfolStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let corpus = load_corpus(path, &vocab.vocabulary()).map_err(|e| {
            let status = match e {
                rsfol::retrieval::RetrievalError::Io { .. } => RsfolStatus::IoError,
                _ => RsfolStatus::SchemaError,
            };
            Failure(status, e.to_string())
        })?;
        write_out(out, Box::into_raw(Box::new(RsfolCorpus(corpus))), "out")
    })
}

/// Builds a corpus from scene-file JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsfol_corpus_from_json(json: *const c_char, vocab: RsfolVocab, out: *mut *mut RsfolCorpus) -> RsfolStatus {
    guard(|| {
        let json = str_arg(json, "json")?;
        let corpus = Corpus::from_json_str(json, &vocab.vocabulary()).or_else(|e| fail(RsfolStatus::SchemaError, e))?;
        write_out(out, Box::into_raw(Box::new(RsfolCorpus(corpus))), "out")
    })
}

/// Number of scenes, or 0 for a null handle.
///
/// # Safety
/// `corpus` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rsfol_corpus_len(corpus: *const RsfolCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.0.len())
}

/// # Safety
/// `corpus` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rsfol_corpus_free(corpus: *mut RsfolCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Scores `query` against one scene and writes the probability.
///
/// # Safety
/// Handles must be live; `image_id` NUL-terminated; `out_probability` writable.
#[no_mangle]
pub unsafe extern "C" fn rsfol_score(
    query: *const RsfolQuery,
    corpus: *const RsfolCorpus,
    image_id: *const c_char,
    floor: f64,
    out_probability: *mut f64,
) -> RsfolStatus {
    guard(|| {
        let (q, c, id) = (ref_arg(query, "query")?, ref_arg(corpus, "corpus")?, str_arg(image_id, "image_id")?);
        check_floor(floor)?;
        let scene = c.0.get(id).map_or_else(|| fail(RsfolStatus::NotFound, format!("image `{id}` not in corpus")), Ok)?;
        let scored = score_query(&q.0, scene, &PredicateContext::default(), floor).or_else(|e| fail(RsfolStatus::InferenceError, e))?;
        write_out(out_probability, scored.probability, "out_probability")
    })
}

/// Like [`rsfol_score`] but writes a JSON document with the probability,
/// witness and hypothesis counts.
///
/// # Safety
/// As for [`rsfol_score`]; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsfol_score_json(
    query: *const RsfolQuery,
    corpus: *const RsfolCorpus,
    image_id: *const c_char,
    floor: f64,
    out_json: *mut *mut c_char,
) -> RsfolStatus {
    guard(|| {
        let (q, c, id) = (ref_arg(query, "query")?, ref_arg(corpus, "corpus")?, str_arg(image_id, "image_id")?);
        check_floor(floor)?;
        let scene = c.0.get(id).map_or_else(|| fail(RsfolStatus::NotFound, format!("image `{id}` not in corpus")), Ok)?;
        let scored = score_query(&q.0, scene, &PredicateContext::default(), floor).or_else(|e| fail(RsfolStatus::InferenceError, e))?;
        let counts = hypothesis_count(&q.0, scene, floor);
        let doc = serde_json::json!({
            "image_id": scored.image_id,
            "probability": scored.probability,
            "witness": scored.witness,
            "hypotheses_evaluated": scored.hypotheses_evaluated.to_string(),
            "hypotheses": {"factorized": counts.factorized.to_string(), "naive": counts.naive.to_string()},
        });
        write_out(out_json, c_string(doc.to_string()), "out_json")
    })
}

/// Ranks the corpus and keeps the best `k` scenes.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsfol_retrieve(
    query: *const RsfolQuery,
    corpus: *const RsfolCorpus,
    k: usize,
    floor: f64,
    out: *mut *mut RsfolRun,
) -> RsfolStatus {
    guard(|| {
        let (q, c) = (ref_arg(query, "query")?, ref_arg(corpus, "corpus")?);
        check_floor(floor)?;
        let opts = RetrieveOptions { k, floor, ..RetrieveOptions::default() };
        let run = retrieve("ffi", &q.0, &c.0, &opts).map_err(|e| {
            let status = match e {
                rsfol::retrieval::RetrievalError::Inference { .. } => RsfolStatus::InferenceError,
                _ => RsfolStatus::InvalidArgument,
            };
            Failure(status, e.to_string())
        })?;
        write_out(out, Box::into_raw(Box::new(RsfolRun(run))), "out")
    })
}

/// Number of ranked entries, or 0 for a null handle.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rsfol_run_len(run: *const RsfolRun) -> usize {
    run.as_ref().map_or(0, |r| r.0.ranking.len())
}

/// Writes the image id and probability of entry `index` (0 = best).
///
/// # Safety
/// `run` must be live; out-parameters must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsfol_run_entry(
    run: *const RsfolRun,
    index: usize,
    out_image_id: *mut *mut c_char,
    out_probability: *mut f64,
) -> RsfolStatus {
    guard(|| {
        let r = ref_arg(run, "run")?;
        let entry = r.0.ranking.get(index).map_or_else(|| fail(RsfolStatus::NotFound, format!("no entry {index}")), Ok)?;
        if out_image_id.is_null() || out_probability.is_null() {
            return fail(RsfolStatus::NullPointer, "output pointer is null");
        }
        write_out(out_probability, entry.probability, "out_probability")?;
        write_out(out_image_id, c_string(entry.image_id.clone()), "out_image_id")
    })
}

/// Writes the whole run, witnesses included, as JSON.
///
/// # Safety
/// `run` must be live; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsfol_run_to_json(run: *const RsfolRun, out_json: *mut *mut c_char) -> RsfolStatus {
    guard(|| {
        let r = ref_arg(run, "run")?;
        let text = serde_json::to_string(&r.0).or_else(|e| fail(RsfolStatus::InvalidArgument, e))?;
        write_out(out_json, c_string(text), "out_json")
    })
}

/// # Safety
/// `run` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rsfol_run_free(run: *mut RsfolRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Ground sample distance in meters per pixel from camera parameters
/// (altitude in m, sensor and focal length in mm, image size in px).
///
/// # Safety
/// `out_w` and `out_h` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsfol_compute_gsd(
    flight_altitude_m: f64,
    sensor_width_mm: f64,
    sensor_height_mm: f64,
    focal_length_mm: f64,
    image_width_px: f64,
    image_height_px: f64,
    out_w: *mut f64,
    out_h: *mut f64,
) -> RsfolStatus {
    guard(|| {
        let meta = GsdMetadata::Camera {
            flight_altitude_m,
            sensor_width_mm,
            sensor_height_mm,
            focal_length_mm,
            image_width_px,
            image_height_px,
        };
        let g = compute_gsd(&meta).or_else(|e| fail(RsfolStatus::InvalidArgument, e))?;
        if out_w.is_null() || out_h.is_null() {
            return fail(RsfolStatus::NullPointer, "output pointer is null");
        }
        write_out(out_w, g.w, "out_w")?;
        write_out(out_h, g.h, "out_h")
    })
}
