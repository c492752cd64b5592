//! C ABI for stance prediction.
//!
//! The interface follows the usual opaque-handle pattern: `skt_classifier_new`
//! loads a run configuration, a topic, and a trained model file, and returns a
//! pointer that later calls pass back in. Every fallible function either
//! returns a status code or a null pointer on failure, and the most recent
//! error message for the calling thread is available from `skt_last_error`.
//!
//! All strings crossing the boundary are NUL-terminated UTF-8. Returned
//! strings are either static (`skt_version`, predicted labels) or owned by the
//! calling thread's error slot; callers never free them.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use stancekit::commands::{build_normalizer, OwnedFeatureResources};
use stancekit::config::RunConfig;
use stancekit::corpus::{ParsedTweet, Source, StanceLabel, Tweet};
use stancekit::features::{featurize, FeatureConfig};
use stancekit::model::NbModel;
use stancekit::normalize::Normalizer;

/// Status codes returned by the fallible C entry points.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SktStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// An output buffer was too small; see `skt_last_error`.
    BufferTooSmall = 3,
    /// The operation failed; see `skt_last_error`.
    Failure = 4,
}

/// A loaded stance classifier: configuration, lexicons, and a trained model
/// for one topic. Create with `skt_classifier_new`, release with
/// `skt_classifier_free`.
pub struct SktClassifier {
    topic: String,
    feature_config: FeatureConfig,
    resources: OwnedFeatureResources,
    normalizer: Normalizer,
    model: NbModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: impl Into<Vec<u8>>) {
    let mut bytes = message.into();
    bytes.retain(|&b| b != 0);
    let owned = CString::new(bytes).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = owned);
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::default());
}

/// Read a required C string argument, recording an error on failure.
///
/// # Safety
/// `ptr` must be null or point to a NUL-terminated string.
unsafe fn read_str<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, SktStatus> {
    if ptr.is_null() {
        set_last_error(format!("argument `{name}` is null"));
        return Err(SktStatus::NullArgument);
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(text) => Ok(text),
        Err(_) => {
            set_last_error(format!("argument `{name}` is not valid UTF-8"));
            Err(SktStatus::InvalidUtf8)
        }
    }
}

fn build_classifier(config_path: &str, topic: &str, model_path: &str) -> stancekit::Result<SktClassifier> {
    let config = RunConfig::load(config_path)?;
    let topic_config = config.topic(topic)?;
    let feature_config = topic_config.feature_config()?;
    let (resources, _) = OwnedFeatureResources::load(
        &config.resources,
        topic_config,
        topic,
        &feature_config.families,
    )?;
    let (normalizer, _) = build_normalizer(&config.resources)?;
    let model = NbModel::load(model_path)?;
    Ok(SktClassifier {
        topic: topic.to_string(),
        feature_config,
        resources,
        normalizer,
        model,
    })
}

impl SktClassifier {
    fn predict_label(&self, text: &str) -> stancekit::Result<StanceLabel> {
        let tweet = Tweet {
            id: "ffi".to_string(),
            topic: self.topic.clone(),
            text: text.to_string(),
            stance: None,
            source: Source::Harvested,
        };
        let (tokens, arcs) = self.normalizer.fallback_parse(text);
        let parsed = ParsedTweet { tweet, tokens, arcs, fallback: true };
        let features = featurize(&parsed, &self.feature_config, &self.resources.as_refs())?;
        Ok(self.model.predict(&features))
    }
}

/// Version of the underlying library as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn skt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the calling thread's most recent failure, or an empty string
/// if the last call on this thread succeeded. The pointer stays valid until
/// the next call into this library from the same thread; never free it.
#[no_mangle]
pub extern "C" fn skt_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Load a classifier for `topic` from a run configuration and a trained model
/// file. Returns null on failure; `skt_last_error` explains why.
///
/// # Safety
/// All three arguments must be NUL-terminated strings or null.
#[no_mangle]
pub unsafe extern "C" fn skt_classifier_new(
    config_path: *const c_char,
    topic: *const c_char,
    model_path: *const c_char,
) -> *mut SktClassifier {
    clear_last_error();
    let (config_path, topic, model_path) = match (
        read_str(config_path, "config_path"),
        read_str(topic, "topic"),
        read_str(model_path, "model_path"),
    ) {
        (Ok(c), Ok(t), Ok(m)) => (c, t, m),
        _ => return std::ptr::null_mut(),
    };
    let built = catch_unwind(AssertUnwindSafe(|| build_classifier(config_path, topic, model_path)));
    match built {
        Ok(Ok(classifier)) => Box::into_raw(Box::new(classifier)),
        Ok(Err(err)) => {
            set_last_error(err.to_string());
            std::ptr::null_mut()
        }
        Err(_) => {
            set_last_error("internal panic while loading the classifier");
            std::ptr::null_mut()
        }
    }
}

/// Predict the stance of one text. Returns a static label string (`"FAVOR"`,
/// `"AGAINST"`, or `"NONE"`), or null on failure.
///
/// # Safety
/// `classifier` must come from `skt_classifier_new` and not have been freed;
/// `text` must be a NUL-terminated string or null.
#[no_mangle]
pub unsafe extern "C" fn skt_classifier_predict(
    classifier: *const SktClassifier,
    text: *const c_char,
) -> *const c_char {
    clear_last_error();
    if classifier.is_null() {
        set_last_error("argument `classifier` is null");
        return std::ptr::null();
    }
    let text = match read_str(text, "text") {
        Ok(text) => text,
        Err(_) => return std::ptr::null(),
    };
    let classifier = &*classifier;
    match catch_unwind(AssertUnwindSafe(|| classifier.predict_label(text))) {
        Ok(Ok(label)) => match label {
            StanceLabel::Favor => c"FAVOR".as_ptr(),
            StanceLabel::Against => c"AGAINST".as_ptr(),
            StanceLabel::None => c"NONE".as_ptr(),
        },
        Ok(Err(err)) => {
            set_last_error(err.to_string());
            std::ptr::null()
        }
        Err(_) => {
            set_last_error("internal panic while predicting");
            std::ptr::null()
        }
    }
}

/// Write the model's log-joint score for each of FAVOR, AGAINST, and NONE
/// (in that order) into `out_scores`. Classes absent from the trained model
/// receive negative infinity. `out_len` must be at least 3.
///
/// # Safety
/// `classifier` must come from `skt_classifier_new` and not have been freed;
/// `text` must be a NUL-terminated string or null; `out_scores` must point to
/// at least `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn skt_classifier_scores(
    classifier: *const SktClassifier,
    text: *const c_char,
    out_scores: *mut f64,
    out_len: usize,
) -> SktStatus {
    clear_last_error();
    if classifier.is_null() || out_scores.is_null() {
        set_last_error("argument `classifier` or `out_scores` is null");
        return SktStatus::NullArgument;
    }
    if out_len < StanceLabel::ALL.len() {
        set_last_error(format!(
            "out_len must be at least {}, got {out_len}",
            StanceLabel::ALL.len()
        ));
        return SktStatus::BufferTooSmall;
    }
    let text = match read_str(text, "text") {
        Ok(text) => text,
        Err(status) => return status,
    };
    let classifier = &*classifier;
    let scored = catch_unwind(AssertUnwindSafe(|| {
        let tweet = Tweet {
            id: "ffi".to_string(),
            topic: classifier.topic.clone(),
            text: text.to_string(),
            stance: None,
            source: Source::Harvested,
        };
        let (tokens, arcs) = classifier.normalizer.fallback_parse(text);
        let parsed = ParsedTweet { tweet, tokens, arcs, fallback: true };
        let features = featurize(&parsed, &classifier.feature_config, &classifier.resources.as_refs())?;
        Ok::<_, stancekit::Error>(classifier.model.scores(&features))
    }));
    match scored {
        Ok(Ok(scores)) => {
            let slice = std::slice::from_raw_parts_mut(out_scores, StanceLabel::ALL.len());
            for (slot, label) in slice.iter_mut().zip(StanceLabel::ALL) {
                let position = classifier.model.classes().iter().position(|c| *c == label);
                *slot = position.map_or(f64::NEG_INFINITY, |i| scores[i]);
            }
            SktStatus::Ok
        }
        Ok(Err(err)) => {
            set_last_error(err.to_string());
            SktStatus::Failure
        }
        Err(_) => {
            set_last_error("internal panic while scoring");
            SktStatus::Failure
        }
    }
}

/// Release a classifier created by `skt_classifier_new`. Passing null is a
/// no-op.
///
/// # Safety
/// `classifier` must be null or a pointer returned by `skt_classifier_new`
/// that has not already been freed.
#[no_mangle]
pub unsafe extern "C" fn skt_classifier_free(classifier: *mut SktClassifier) {
    if !classifier.is_null() {
        drop(Box::from_raw(classifier));
    }
}
