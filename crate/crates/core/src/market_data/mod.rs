//! Level-1 event model, tick file format, book state and touch volume.

pub mod book;
pub mod event;
pub mod format;
pub mod session;
pub mod touch;

pub use book::{apply_event, BookState};
pub use event::{EventKind, Level, Level1Event, Quote, Timestamp};
pub use format::{parse_event_stream, write_event_stream, EventReader, ParseError, TickWriter};
pub use session::{DescriptorError, SessionDescriptor};
pub use touch::{time_weighted_touch, TouchAccumulator, TouchError};
