//! Minimal stderr logging controlled by the `MFIX_LOG` variable.
//!
//! Recognised values are `quiet` (the default), `info`, and `trace`; any
//! other value is treated as `quiet`. Reports go to stdout, progress notes
//! go here, so redirecting one never disturbs the other.

use std::sync::OnceLock;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    Quiet,
    Info,
    Trace,
}

pub fn level() -> Level {
    static LEVEL: OnceLock<Level> = OnceLock::new();
    *LEVEL.get_or_init(|| match std::env::var("MFIX_LOG").as_deref() {
        Ok("info") => Level::Info,
        Ok("trace") => Level::Trace,
        _ => Level::Quiet,
    })
}

pub fn info(message: impl AsRef<str>) {
    if level() >= Level::Info {
        eprintln!("[mfix] {}", message.as_ref());
    }
}

pub fn trace(message: impl AsRef<str>) {
    if level() >= Level::Trace {
        eprintln!("[mfix] {}", message.as_ref());
    }
}
