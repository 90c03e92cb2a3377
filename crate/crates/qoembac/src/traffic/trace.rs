use std::str::FromStr;

use super::{TrafficError, DEFAULT_REF_PSNR};

/// Video frame type within a group of pictures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameType {
    I,
    P,
    B,
}

impl FromStr for FrameType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "I" | "i" => Ok(FrameType::I),
            "P" | "p" => Ok(FrameType::P),
            "B" | "b" => Ok(FrameType::B),
            other => Err(format!("unknown frame type {other:?}")),
        }
    }
}

/// Video format of the encoded sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FormatTag {
    Cif,
    Qcif,
    #[default]
    Other,
}

/// One encoded frame of a video source.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameRecord {
    pub index: usize,
    pub frame_type: FrameType,
    /// Encoded frame size in bytes, always > 0.
    pub size: u64,
    /// Per-frame PSNR of the undamaged encode, in dB.
    pub ref_psnr: f64,
}

/// An ordered, validated VBR frame trace.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoTrace {
    frames: Vec<FrameRecord>,
    fps: f64,
    gop: usize,
    format_tag: FormatTag,
}

impl VideoTrace {
    /// Builds a trace from frame records, enforcing the structural
    /// invariants: non-empty, contiguous indices from 0, positive sizes,
    /// and an I frame at every GoP boundary.
    pub fn new(
        frames: Vec<FrameRecord>,
        fps: f64,
        gop: usize,
        format_tag: FormatTag,
    ) -> Result<Self, TrafficError> {
        if frames.is_empty() {
            return Err(TrafficError::EmptyTrace);
        }
        if fps <= 0.0 {
            return Err(TrafficError::InvalidParam(format!("fps must be > 0, got {fps}")));
        }
        if gop < 1 {
            return Err(TrafficError::InvalidParam("gop must be >= 1".into()));
        }
        for (i, f) in frames.iter().enumerate() {
            if f.index != i {
                return Err(TrafficError::Structure(format!(
                    "frame indices must increase by 1 from 0; position {i} has index {}",
                    f.index
                )));
            }
            if f.size == 0 {
                return Err(TrafficError::Structure(format!("frame {i} has size 0")));
            }
            if f.index % gop == 0 && f.frame_type != FrameType::I {
                return Err(TrafficError::Structure(format!(
                    "frame {i} starts a GoP but is {:?}, expected I",
                    f.frame_type
                )));
            }
        }
        Ok(Self { frames, fps, gop, format_tag })
    }

    pub fn frames(&self) -> &[FrameRecord] {
        &self.frames
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    pub fn gop(&self) -> usize {
        self.gop
    }

    pub fn format_tag(&self) -> FormatTag {
        self.format_tag
    }

    /// Send instant of frame `index` relative to the session start.
    pub fn frame_time(&self, index: usize) -> f64 {
        index as f64 / self.fps
    }

    /// Trace duration in seconds (one frame interval per frame).
    pub fn duration(&self) -> f64 {
        self.frames.len() as f64 / self.fps
    }

    pub fn total_bytes(&self) -> u64 {
        self.frames.iter().map(|f| f.size).sum()
    }
}

/// Parses an EvalVid-style text trace with default fps 30, GoP 30.
///
/// One frame per line, whitespace-separated columns
/// `index type size_bytes [psnr_db]`; `#` starts a comment line. A missing
/// PSNR column defaults to 38.0 dB.
pub fn load_trace(source: &str) -> Result<VideoTrace, TrafficError> {
    load_trace_with(source, 30.0, 30, FormatTag::Other)
}

/// [`load_trace`] with explicit frame rate, GoP length and format tag.
pub fn load_trace_with(
    source: &str,
    fps: f64,
    gop: usize,
    format_tag: FormatTag,
) -> Result<VideoTrace, TrafficError> {
    let mut frames = Vec::new();
    for (lineno, raw) in source.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = lineno + 1;
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() < 3 || cols.len() > 4 {
            return Err(TrafficError::Parse {
                line: lineno,
                msg: format!("expected 3 or 4 columns, got {}", cols.len()),
            });
        }
        let index: usize = cols[0].parse().map_err(|e| TrafficError::Parse {
            line: lineno,
            msg: format!("bad frame index {:?}: {e}", cols[0]),
        })?;
        let frame_type: FrameType = cols[1].parse().map_err(|msg| TrafficError::Parse {
            line: lineno,
            msg,
        })?;
        let size: u64 = cols[2].parse().map_err(|e| TrafficError::Parse {
            line: lineno,
            msg: format!("bad frame size {:?}: {e}", cols[2]),
        })?;
        let ref_psnr = match cols.get(3) {
            Some(col) => col.parse().map_err(|e| TrafficError::Parse {
                line: lineno,
                msg: format!("bad psnr {col:?}: {e}"),
            })?,
            None => DEFAULT_REF_PSNR,
        };
        frames.push(FrameRecord { index, frame_type, size, ref_psnr });
    }
    VideoTrace::new(frames, fps, gop, format_tag)
}
