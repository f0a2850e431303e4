//! YUV4MPEG2 ingest: a streaming parser, a matching writer, and segmentation
//! into fixed-duration chunks.
//!
//! Only 8-bit 4:2:0 streams are accepted. Chroma planes are read and
//! discarded: every downstream feature is computed on luma alone, and
//! skipping the copy keeps memory flat while still detecting truncation.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

const MAGIC: &str = "YUV4MPEG2";
const MAX_LINE: usize = 4096;

/// Colorspace tags we treat as 8-bit 4:2:0.
const C420_TAGS: [&str; 4] = ["420", "420jpeg", "420paldv", "420mpeg2"];

/// Parsed stream header. `fps` is `None` when the stream carries no `F` tag;
/// callers that need a frame rate must then supply one out of band.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Y4mHeader {
    pub width: u32,
    pub height: u32,
    pub fps: Option<(u32, u32)>,
    pub colorspace: String,
}

impl Y4mHeader {
    pub fn fps_f64(&self) -> Option<f64> {
        self.fps.map(|(n, d)| f64::from(n) / f64::from(d))
    }
}

/// One decoded frame; only the luma plane is kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub width: u32,
    pub height: u32,
    pub index: u64,
    pub luma: Vec<u8>,
}

/// Streaming Y4M reader. Iterates over frames without buffering the file.
#[derive(Debug)]
pub struct Y4mReader<R> {
    reader: R,
    header: Y4mHeader,
    luma_len: usize,
    chroma_len: usize,
    next_index: u64,
    finished: bool,
    chroma_scratch: Vec<u8>,
}

impl<R: BufRead> Y4mReader<R> {
    pub fn new(mut reader: R) -> Result<Self> {
        let line = read_line(&mut reader)?.ok_or(Error::BadMagic)?;
        let mut parts = line.split(' ').filter(|t| !t.is_empty());
        if parts.next() != Some(MAGIC) {
            return Err(Error::BadMagic);
        }

        let mut width = None;
        let mut height = None;
        let mut fps = None;
        let mut colorspace = "420".to_string();
        for tag in parts {
            let (kind, value) = tag.split_at(1);
            match kind {
                "W" => width = Some(parse_dim(value, "W")?),
                "H" => height = Some(parse_dim(value, "H")?),
                "F" => fps = Some(parse_ratio(value)?),
                "C" => {
                    if !C420_TAGS.contains(&value) {
                        return Err(Error::UnsupportedColorspace(value.to_string()));
                    }
                    colorspace = value.to_string();
                }
                // Interlacing, aspect and extension tags carry nothing we use.
                _ => {}
            }
        }

        let width = width.ok_or_else(|| Error::BadHeader("missing W tag".into()))?;
        let height = height.ok_or_else(|| Error::BadHeader("missing H tag".into()))?;
        if width % 2 != 0 || height % 2 != 0 {
            return Err(Error::BadHeader(format!(
                "dimensions {width}x{height} must be even for 4:2:0"
            )));
        }

        let luma_len = width as usize * height as usize;
        let chroma_len = luma_len / 2;
        Ok(Y4mReader {
            reader,
            header: Y4mHeader {
                width,
                height,
                fps,
                colorspace,
            },
            luma_len,
            chroma_len,
            next_index: 0,
            finished: false,
            chroma_scratch: vec![0; chroma_len],
        })
    }

    pub fn header(&self) -> &Y4mHeader {
        &self.header
    }

    fn read_frame(&mut self) -> Result<Option<Frame>> {
        let index = self.next_index;
        let line = match read_line(&mut self.reader)? {
            None => {
                self.finished = true;
                return Ok(None);
            }
            Some(line) => line,
        };
        // Frame parameters, when present, follow "FRAME" after a space.
        let ok = line == "FRAME" || line.starts_with("FRAME ");
        if !ok {
            return Err(Error::BadFrameMarker(index));
        }

        let mut luma = vec![0u8; self.luma_len];
        self.reader
            .read_exact(&mut luma)
            .map_err(|_| Error::TruncatedFrame(index))?;
        self.reader
            .read_exact(&mut self.chroma_scratch[..self.chroma_len])
            .map_err(|_| Error::TruncatedFrame(index))?;

        self.next_index += 1;
        Ok(Some(Frame {
            width: self.header.width,
            height: self.header.height,
            index,
            luma,
        }))
    }
}

impl<R: BufRead> Iterator for Y4mReader<R> {
    type Item = Result<Frame>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.finished {
            return None;
        }
        match self.read_frame() {
            Ok(Some(frame)) => Some(Ok(frame)),
            Ok(None) => None,
            Err(e) => {
                self.finished = true;
                Some(Err(e))
            }
        }
    }
}

fn parse_dim(value: &str, tag: &str) -> Result<u32> {
    let n: u32 = value
        .parse()
        .map_err(|_| Error::BadHeader(format!("bad {tag} tag `{value}`")))?;
    if n == 0 {
        return Err(Error::BadHeader(format!("{tag} must be positive")));
    }
    Ok(n)
}

fn parse_ratio(value: &str) -> Result<(u32, u32)> {
    let (num, den) = value
        .split_once(':')
        .ok_or_else(|| Error::BadHeader(format!("bad F tag `{value}`")))?;
    let num: u32 = num
        .parse()
        .map_err(|_| Error::BadHeader(format!("bad F tag `{value}`")))?;
    let den: u32 = den
        .parse()
        .map_err(|_| Error::BadHeader(format!("bad F tag `{value}`")))?;
    if num == 0 || den == 0 {
        return Err(Error::BadHeader(format!("F tag `{value}` must be positive")));
    }
    Ok((num, den))
}

/// Read bytes up to (not including) the next `\n`. Returns `None` on a clean
/// EOF before any byte; a partial final line is returned as-is so the caller
/// can report the right error.
fn read_line<R: BufRead>(reader: &mut R) -> Result<Option<String>> {
    let mut buf = Vec::new();
    loop {
        let available = reader.fill_buf()?;
        if available.is_empty() {
            return if buf.is_empty() {
                Ok(None)
            } else {
                Ok(Some(String::from_utf8_lossy(&buf).into_owned()))
            };
        }
        match available.iter().position(|&b| b == b'\n') {
            Some(pos) => {
                buf.extend_from_slice(&available[..pos]);
                reader.consume(pos + 1);
                return Ok(Some(String::from_utf8_lossy(&buf).into_owned()));
            }
            None => {
                buf.extend_from_slice(available);
                let len = available.len();
                reader.consume(len);
                if buf.len() > MAX_LINE {
                    return Err(Error::BadHeader("unterminated header line".into()));
                }
            }
        }
    }
}

/// Write frames back out as an 8-bit 4:2:0 stream. Chroma is filled with the
/// neutral value 128, so a write/read round trip preserves luma exactly.
pub fn write_y4m<W: Write>(
    mut w: W,
    width: u32,
    height: u32,
    fps: (u32, u32),
    frames: &[Frame],
) -> Result<()> {
    let luma_len = width as usize * height as usize;
    let chroma = vec![128u8; luma_len / 2];
    writeln!(
        w,
        "{MAGIC} W{width} H{height} F{}:{} Ip A1:1 C420",
        fps.0, fps.1
    )?;
    for frame in frames {
        if frame.luma.len() != luma_len {
            return Err(Error::PlaneSizeMismatch {
                expected: luma_len,
                got: frame.luma.len(),
            });
        }
        writeln!(w, "FRAME")?;
        w.write_all(&frame.luma)?;
        w.write_all(&chroma)?;
    }
    Ok(())
}

/// A run of consecutive frames covering a fixed wall-clock duration.
#[derive(Debug, Clone)]
pub struct Segment {
    pub id: String,
    pub fps: f64,
    pub frames: Vec<Frame>,
}

/// Frames per segment: `ceil(fps * seg_seconds)`, at least 1.
pub fn frames_per_segment(fps: f64, seg_seconds: f64) -> usize {
    ((fps * seg_seconds).ceil() as usize).max(1)
}

/// Groups a frame stream into fixed-duration segments. The final segment may
/// be shorter than the rest; it is kept, not dropped.
pub struct Segmenter<I> {
    frames: I,
    fps: f64,
    chunk: usize,
    prefix: String,
    next_segment: usize,
    done: bool,
}

/// Segment a frame stream into `seg_seconds`-long chunks. `fps` and
/// `seg_seconds` must be positive; segment ids are `{prefix}_s{index:03}`.
pub fn segment_stream<I>(frames: I, fps: f64, seg_seconds: f64, prefix: &str) -> Segmenter<I>
where
    I: Iterator<Item = Result<Frame>>,
{
    debug_assert!(fps > 0.0 && seg_seconds > 0.0);
    Segmenter {
        frames,
        fps,
        chunk: frames_per_segment(fps, seg_seconds),
        prefix: prefix.to_string(),
        next_segment: 0,
        done: false,
    }
}

impl<I> Iterator for Segmenter<I>
where
    I: Iterator<Item = Result<Frame>>,
{
    type Item = Result<Segment>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let mut frames = Vec::with_capacity(self.chunk);
        while frames.len() < self.chunk {
            match self.frames.next() {
                Some(Ok(frame)) => frames.push(frame),
                Some(Err(e)) => {
                    self.done = true;
                    return Some(Err(e));
                }
                None => {
                    self.done = true;
                    break;
                }
            }
        }
        if frames.is_empty() {
            return None;
        }
        let id = format!("{}_s{:03}", self.prefix, self.next_segment);
        self.next_segment += 1;
        Some(Ok(Segment {
            id,
            fps: self.fps,
            frames,
        }))
    }
}
