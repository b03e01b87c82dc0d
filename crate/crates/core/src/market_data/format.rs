//! Canonical tick file format.
//!
//! One event per line, eight comma-separated fields:
//!
//! ```text
//! timestamp_ns,kind,trade_price,trade_size,bid_price,ask_price,bid_size,ask_size
//! 1000,T,100.01,15,,,,
//! 1000,Q,,,100.00,100.01,10,18
//! ```
//!
//! `kind` is `T` or `Q`; unused fields are left empty. A quote side with an
//! empty price and size is an empty side of the book. The header line is
//! optional and is recognised by a non-numeric first field.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use super::event::{EventKind, Level, Level1Event, Quote, Timestamp};
use crate::price::Price;

pub const HEADER: &str =
    "timestamp_ns,kind,trade_price,trade_size,bid_price,ask_price,bid_size,ask_size";
const FIELD_COUNT: usize = 8;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: malformed line: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: timestamp {timestamp} is earlier than previous timestamp {previous}")]
    NonMonotonicTimestamp {
        line: usize,
        previous: Timestamp,
        timestamp: Timestamp,
    },
    #[error("line {line}: unknown event kind `{kind}`")]
    UnknownEventKind { line: usize, kind: String },
    #[error("line {line}: quote price {price} is not a multiple of the tick size {tick}")]
    OffTickPrice {
        line: usize,
        price: Price,
        tick: Price,
    },
    #[error("read error: {0}")]
    Io(#[from] io::Error),
}

impl ParseError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::MalformedLine { line, .. }
            | ParseError::NonMonotonicTimestamp { line, .. }
            | ParseError::UnknownEventKind { line, .. }
            | ParseError::OffTickPrice { line, .. } => Some(*line),
            ParseError::Io(_) => None,
        }
    }
}

/// Streaming reader over a tick file. Yields events in file order.
pub struct EventReader<R> {
    reader: R,
    tick: Price,
    buf: Vec<u8>,
    line: usize,
    last_timestamp: Option<Timestamp>,
    seen_data: bool,
    failed: bool,
    check_order: bool,
}

impl<R: BufRead> EventReader<R> {
    pub fn new(reader: R, tick: Price) -> Self {
        EventReader {
            reader,
            tick,
            buf: Vec::with_capacity(128),
            line: 0,
            last_timestamp: None,
            seen_data: false,
            failed: false,
            check_order: true,
        }
    }

    /// Passes decreasing timestamps through instead of failing on them.
    pub fn lenient_timestamps(mut self) -> Self {
        self.check_order = false;
        self
    }

    /// Number of lines consumed so far.
    pub fn lines_read(&self) -> usize {
        self.line
    }

    fn next_event(&mut self) -> Result<Option<Level1Event>, ParseError> {
        loop {
            self.buf.clear();
            if self.reader.read_until(b'\n', &mut self.buf)? == 0 {
                return Ok(None);
            }
            self.line += 1;
            let line = trim_end(&self.buf);
            if line.is_empty() {
                continue;
            }
            if !self.seen_data {
                self.seen_data = true;
                if is_header(line) {
                    continue;
                }
            }
            let event = parse_line(line, self.line, self.tick)?;
            if let (true, Some(prev)) = (self.check_order, self.last_timestamp) {
                if event.timestamp < prev {
                    return Err(ParseError::NonMonotonicTimestamp {
                        line: self.line,
                        previous: prev,
                        timestamp: event.timestamp,
                    });
                }
            }
            self.last_timestamp = Some(event.timestamp);
            return Ok(Some(event));
        }
    }
}

impl<R: BufRead> Iterator for EventReader<R> {
    type Item = Result<Level1Event, ParseError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        match self.next_event() {
            Ok(Some(e)) => Some(Ok(e)),
            Ok(None) => None,
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}

/// Reads a whole tick stream into memory.
pub fn parse_event_stream<R: BufRead>(
    source: R,
    tick: Price,
) -> Result<Vec<Level1Event>, ParseError> {
    EventReader::new(source, tick).collect()
}

fn trim_end(line: &[u8]) -> &[u8] {
    let mut end = line.len();
    while end > 0 && line[end - 1].is_ascii_whitespace() {
        end -= 1;
    }
    &line[..end]
}

fn is_header(line: &[u8]) -> bool {
    let first = line.split(|&b| b == b',').next().unwrap_or_default();
    !first.is_empty() && !first.iter().all(|b| b.is_ascii_digit() || *b == b'-')
}

fn malformed(line: usize, reason: impl Into<String>) -> ParseError {
    ParseError::MalformedLine {
        line,
        reason: reason.into(),
    }
}

fn parse_int<T: std::str::FromStr>(field: &[u8], name: &str, line: usize) -> Result<T, ParseError> {
    std::str::from_utf8(field)
        .ok()
        .and_then(|s| s.parse::<T>().ok())
        .ok_or_else(|| {
            malformed(
                line,
                format!("unparsable {name} `{}`", String::from_utf8_lossy(field)),
            )
        })
}

fn parse_price(field: &[u8], name: &str, line: usize) -> Result<Price, ParseError> {
    Price::parse_bytes(field).map_err(|e| malformed(line, format!("{name}: {e}")))
}

fn parse_size(field: &[u8], name: &str, line: usize) -> Result<u64, ParseError> {
    let size: u64 = parse_int(field, name, line)?;
    if size == 0 {
        return Err(malformed(line, format!("{name} must be positive")));
    }
    Ok(size)
}

fn parse_side(
    price: &[u8],
    size: &[u8],
    side: &str,
    line: usize,
    tick: Price,
) -> Result<Option<Level>, ParseError> {
    match (price.is_empty(), size.is_empty()) {
        (true, true) => Ok(None),
        (false, false) => {
            let price = parse_price(price, &format!("{side}_price"), line)?;
            if !price.is_multiple_of(tick) {
                return Err(ParseError::OffTickPrice { line, price, tick });
            }
            let size = parse_size(size, &format!("{side}_size"), line)?;
            Ok(Some(Level::new(price, size)))
        }
        _ => Err(malformed(
            line,
            format!("{side} price and size must both be present or both empty"),
        )),
    }
}

fn parse_line(line: &[u8], line_no: usize, tick: Price) -> Result<Level1Event, ParseError> {
    let mut fields: [&[u8]; FIELD_COUNT] = [&[]; FIELD_COUNT];
    let mut count = 0;
    for field in line.split(|&b| b == b',') {
        if count == FIELD_COUNT {
            return Err(malformed(
                line_no,
                format!("expected {FIELD_COUNT} fields, found more"),
            ));
        }
        fields[count] = field;
        count += 1;
    }
    if count != FIELD_COUNT {
        return Err(malformed(
            line_no,
            format!("expected {FIELD_COUNT} fields, found {count}"),
        ));
    }
    let timestamp: Timestamp = parse_int(fields[0], "timestamp", line_no)?;
    let kind = match fields[1] {
        b"T" => {
            if fields[4..].iter().any(|f| !f.is_empty()) {
                return Err(malformed(line_no, "trade line has quote fields set"));
            }
            EventKind::Trade {
                price: parse_price(fields[2], "trade_price", line_no)?,
                size: parse_size(fields[3], "trade_size", line_no)?,
            }
        }
        b"Q" => {
            if !fields[2].is_empty() || !fields[3].is_empty() {
                return Err(malformed(line_no, "quote line has trade fields set"));
            }
            EventKind::Quote(Quote {
                bid: parse_side(fields[4], fields[6], "bid", line_no, tick)?,
                ask: parse_side(fields[5], fields[7], "ask", line_no, tick)?,
            })
        }
        other => {
            return Err(ParseError::UnknownEventKind {
                line: line_no,
                kind: String::from_utf8_lossy(other).into_owned(),
            })
        }
    };
    Ok(Level1Event { timestamp, kind })
}

/// Writes events in the canonical format. Prices on the tick grid are printed
/// with the tick's number of decimals, so `100.00` survives a round trip.
pub struct TickWriter<W: Write> {
    out: W,
    decimals: usize,
    line: String,
}

impl<W: Write> TickWriter<W> {
    pub fn new(out: W, tick: Price) -> Self {
        TickWriter {
            out,
            decimals: tick.decimals(),
            line: String::with_capacity(96),
        }
    }

    pub fn write_header(&mut self) -> io::Result<()> {
        writeln!(self.out, "{HEADER}")
    }

    pub fn write_event(&mut self, event: &Level1Event) -> io::Result<()> {
        use std::fmt::Write as _;
        let line = &mut self.line;
        line.clear();
        let _ = write!(line, "{}", event.timestamp);
        match event.kind {
            EventKind::Trade { price, size } => {
                line.push_str(",T,");
                price.format_with(self.decimals, line);
                let _ = write!(line, ",{size},,,,");
            }
            EventKind::Quote(q) => {
                line.push_str(",Q,,,");
                if let Some(b) = q.bid {
                    b.price.format_with(self.decimals, line);
                }
                line.push(',');
                if let Some(a) = q.ask {
                    a.price.format_with(self.decimals, line);
                }
                line.push(',');
                if let Some(b) = q.bid {
                    let _ = write!(line, "{}", b.size);
                }
                line.push(',');
                if let Some(a) = q.ask {
                    let _ = write!(line, "{}", a.size);
                }
            }
        }
        line.push('\n');
        self.out.write_all(line.as_bytes())
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

/// Serializes a whole stream, header included.
pub fn write_event_stream<W: Write>(out: W, events: &[Level1Event], tick: Price) -> io::Result<W> {
    let mut w = TickWriter::new(out, tick);
    w.write_header()?;
    for e in events {
        w.write_event(e)?;
    }
    w.flush()?;
    Ok(w.into_inner())
}
