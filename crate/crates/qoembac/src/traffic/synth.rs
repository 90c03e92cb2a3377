use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::trace::{FormatTag, FrameRecord, FrameType, VideoTrace};
use super::{TrafficError, DEFAULT_REF_PSNR};

/// Parameters for [`synth_trace`].
#[derive(Debug, Clone)]
pub struct SynthParams {
    /// Target long-run payload bitrate in bits/s.
    pub mean_bitrate: f64,
    /// I-frame size relative to the mean frame size; 1.0 gives a CBR
    /// trace. Must stay below the GoP length so P frames keep positive
    /// size.
    pub burstiness: f64,
    pub duration: f64,
    pub fps: f64,
    pub gop: usize,
    pub seed: u64,
}

/// Synthesizes a deterministic VBR trace. I frames are `burstiness` times
/// the mean frame size, P frames are scaled down to preserve the mean,
/// and every frame gets multiplicative jitter from the seeded generator.
/// Jitter amplitude shrinks to zero as burstiness approaches 1, so
/// burstiness 1.0 yields equal-size frames.
pub fn synth_trace(params: &SynthParams) -> Result<VideoTrace, TrafficError> {
    let SynthParams { mean_bitrate, burstiness, duration, fps, gop, seed } = *params;
    if mean_bitrate <= 0.0 || duration <= 0.0 || fps <= 0.0 {
        return Err(TrafficError::InvalidParam(
            "mean_bitrate, duration and fps must be > 0".into(),
        ));
    }
    if burstiness < 1.0 {
        return Err(TrafficError::InvalidParam("burstiness must be >= 1".into()));
    }
    if gop < 1 {
        return Err(TrafficError::InvalidParam("gop must be >= 1".into()));
    }
    let n_frames = (duration * fps).round().max(1.0) as usize;
    let mean_frame = mean_bitrate / 8.0 / fps;
    let (i_size, p_size) = if gop == 1 {
        (mean_frame, mean_frame)
    } else {
        let p = mean_frame * (gop as f64 - burstiness) / (gop as f64 - 1.0);
        if p <= 0.0 {
            return Err(TrafficError::InvalidParam(format!(
                "burstiness {burstiness} too large for gop {gop}"
            )));
        }
        (mean_frame * burstiness, p)
    };
    // Symmetric jitter keeps the expected mean; amplitude 0 at burstiness 1.
    let jitter = 0.25 * (1.0 - 1.0 / burstiness);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frames = (0..n_frames)
        .map(|index| {
            let is_i = index % gop == 0;
            let base = if is_i { i_size } else { p_size };
            let factor = if jitter > 0.0 {
                rng.gen_range(1.0 - jitter..=1.0 + jitter)
            } else {
                1.0
            };
            FrameRecord {
                index,
                frame_type: if is_i { FrameType::I } else { FrameType::P },
                size: (base * factor).round().max(1.0) as u64,
                ref_psnr: DEFAULT_REF_PSNR,
            }
        })
        .collect();
    VideoTrace::new(frames, fps, gop, FormatTag::Other)
}
