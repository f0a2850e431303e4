//! HLS master playlist generation for a retained rung set.
//!
//! Emits one `#EXT-X-STREAM-INF` entry per retained rung with BANDWIDTH,
//! RESOLUTION and CODECS attributes, grouped by codec in priority order and
//! ascending bitrate within each codec. Variant URIs follow
//! `{codec}/{height}p_{bitrate_bps}.m3u8`; rewriting them for a real origin
//! is the packager's job.

use crate::ladder::Rung;

/// RFC 6381 codec strings advertised per codec id. Unknown ids fall back to
/// the id itself so the playlist stays structurally valid.
fn rfc6381(codec: &str) -> &str {
    match codec {
        "avc" | "h264" => "avc1.640028",
        "hevc" | "h265" => "hvc1.1.6.L123.B0",
        "av1" => "av01.0.08M.08",
        "vp9" => "vp09.00.40.08",
        other => other,
    }
}

/// Build the master playlist text. `codec_order` gives the codec priority
/// order; rungs of codecs not listed are skipped.
pub fn master_playlist(retained: &[Rung], codec_order: &[String]) -> String {
    let mut out = String::from("#EXTM3U\n#EXT-X-VERSION:6\n");
    for codec in codec_order {
        let mut rungs: Vec<&Rung> = retained.iter().filter(|r| &r.codec == codec).collect();
        rungs.sort_by_key(|r| r.bitrate_bps);
        for rung in rungs {
            out.push_str(&format!(
                "#EXT-X-STREAM-INF:BANDWIDTH={},RESOLUTION={}x{},CODECS=\"{}\"\n{}/{}p_{}.m3u8\n",
                rung.bitrate_bps,
                rung.resolution.width,
                rung.resolution.height,
                rfc6381(codec),
                codec,
                rung.resolution.height,
                rung.bitrate_bps,
            ));
        }
    }
    out
}
