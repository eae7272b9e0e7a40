//! Records which library operations ran on the current thread.
//!
//! Verification runs turn recording on so a report can state which operations
//! it exercised. Recording is per thread and off by default.

use std::cell::RefCell;
use std::collections::BTreeSet;

thread_local! {
    static SEEN: RefCell<Option<BTreeSet<&'static str>>> = const { RefCell::new(None) };
}

pub(crate) fn record(op: &'static str) {
    SEEN.with(|s| {
        if let Some(set) = s.borrow_mut().as_mut() {
            set.insert(op);
        }
    });
}

/// Starts recording, discarding anything recorded before.
pub fn start() {
    SEEN.with(|s| *s.borrow_mut() = Some(BTreeSet::new()));
}

/// Stops recording and returns the operations seen since [`start`].
pub fn finish() -> BTreeSet<&'static str> {
    SEEN.with(|s| s.borrow_mut().take().unwrap_or_default())
}
