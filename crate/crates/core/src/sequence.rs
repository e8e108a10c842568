//! Frames, annotated sequences, and their on-disk layout.
//!
//! A sequence directory holds `NNNN.pgm` frames (binary 8-bit PGM, 0-based,
//! zero padded to four digits), `groundtruth_rect.txt` with one `x,y,w,h`
//! line per frame, and an optional `absence.txt` with one `0`/`1` line per
//! frame (`1` = target absent). Results files (`*.trk`) carry one
//! `x,y,w,h[,score]` line per frame.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geom::BBox;

pub const MIN_FRAME_SIDE: usize = 32;
pub const TRUTH_FILE: &str = "groundtruth_rect.txt";
pub const ABSENCE_FILE: &str = "absence.txt";

/// A grayscale frame with intensities in `[0, 1]`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<f32>,
    pub index: usize,
}

impl Frame {
    pub fn new(width: usize, height: usize, pixels: Vec<f32>, index: usize) -> Result<Self> {
        if width < MIN_FRAME_SIDE || height < MIN_FRAME_SIDE {
            return Err(Error::Structure(format!(
                "frame {index} is {width}x{height}, minimum side is {MIN_FRAME_SIDE}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::Structure(format!(
                "frame {index} has {} pixels, expected {}",
                pixels.len(),
                width * height
            )));
        }
        if let Some(v) = pixels.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Structure(format!(
                "frame {index} has intensity {v} outside [0, 1]"
            )));
        }
        Ok(Frame {
            width,
            height,
            pixels,
            index,
        })
    }

    pub fn filled(width: usize, height: usize, value: f32, index: usize) -> Self {
        Frame {
            width,
            height,
            pixels: vec![value; width * height],
            index,
        }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f32 {
        self.pixels[y * self.width + x]
    }

    /// Applies `f` to every intensity, clamping the result into `[0, 1]`.
    pub fn map(&self, f: impl Fn(f32) -> f32) -> Frame {
        Frame {
            pixels: self.pixels.iter().map(|&v| f(v).clamp(0.0, 1.0)).collect(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceDataset {
    pub name: String,
    pub frames: Vec<Frame>,
    pub truth: Vec<BBox>,
    pub present: Vec<bool>,
}

impl SequenceDataset {
    pub fn new(
        name: impl Into<String>,
        frames: Vec<Frame>,
        truth: Vec<BBox>,
        present: Vec<bool>,
    ) -> Result<Self> {
        let name = name.into();
        if truth.len() != frames.len() || present.len() != frames.len() {
            return Err(Error::Structure(format!(
                "sequence {name}: {} frames, {} truth boxes, {} presence flags",
                frames.len(),
                truth.len(),
                present.len()
            )));
        }
        Ok(SequenceDataset {
            name,
            frames,
            truth,
            present,
        })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frame_size(&self) -> (usize, usize) {
        self.frames
            .first()
            .map(|f| (f.width, f.height))
            .unwrap_or((0, 0))
    }
}

/// Intensity to byte: `round(v * 255)` with ties away from zero.
pub fn quantize(v: f32) -> u8 {
    (f64::from(v.clamp(0.0, 1.0)) * 255.0).round() as u8
}

pub fn dequantize(b: u8) -> f32 {
    f32::from(b) / 255.0
}

pub fn frame_file_name(index: usize) -> String {
    format!("{index:04}.pgm")
}

pub fn encode_pgm(frame: &Frame) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", frame.width, frame.height).into_bytes();
    out.extend(frame.pixels.iter().map(|&v| quantize(v)));
    out
}

pub fn decode_pgm(bytes: &[u8], path: &Path, index: usize) -> Result<Frame> {
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::parse(path, 1, "truncated PGM header"));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    if fields[0] != "P5" {
        return Err(Error::parse(path, 1, format!("expected P5 magic, found {:?}", fields[0])));
    }
    let num = |i: usize| {
        fields[i]
            .parse::<usize>()
            .map_err(|_| Error::parse(path, 1, format!("bad PGM header field {:?}", fields[i])))
    };
    let (width, height, maxval) = (num(1)?, num(2)?, num(3)?);
    if maxval != 255 {
        return Err(Error::parse(path, 1, format!("unsupported maxval {maxval}")));
    }
    let raster = bytes.get(pos..).unwrap_or(&[]);
    if raster.len() != width * height {
        return Err(Error::Structure(format!(
            "{}: raster has {} bytes, expected {}",
            path.display(),
            raster.len(),
            width * height
        )));
    }
    Frame::new(width, height, raster.iter().map(|&b| dequantize(b)).collect(), index)
}

fn parse_fields(line: &str, file: &Path, lineno: usize, min: usize, max: usize) -> Result<Vec<f64>> {
    let parts: Vec<&str> = line.split(',').map(str::trim).collect();
    if parts.len() < min || parts.len() > max {
        return Err(Error::parse(
            file,
            lineno,
            format!("expected {min}..={max} comma-separated fields, found {}", parts.len()),
        ));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(file, lineno, format!("not a finite number: {p:?}")))
        })
        .collect()
}

fn parse_box(fields: &[f64], file: &Path, lineno: usize) -> Result<BBox> {
    let b = BBox::new(fields[0], fields[1], fields[2], fields[3]);
    if !b.is_valid() {
        return Err(Error::parse(file, lineno, "box width and height must be positive"));
    }
    Ok(b)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub fn read_sequence(dir: &Path) -> Result<SequenceDataset> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut numbered: Vec<(usize, PathBuf)> = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("pgm") {
            continue;
        }
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        let n = stem.parse::<usize>().map_err(|_| {
            Error::Structure(format!("{}: frame file name is not a number", path.display()))
        })?;
        numbered.push((n, path));
    }
    numbered.sort();
    for (expected, (n, path)) in numbered.iter().enumerate() {
        if *n != expected {
            return Err(Error::Structure(format!(
                "{}: frame numbers must run 0..{} without gaps",
                path.display(),
                numbered.len()
            )));
        }
    }
    let frames = numbered
        .iter()
        .map(|(n, path)| {
            let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
            decode_pgm(&bytes, path, *n)
        })
        .collect::<Result<Vec<_>>>()?;

    let truth_path = dir.join(TRUTH_FILE);
    let truth = content_lines(&read_text(&truth_path)?)
        .map(|(n, l)| parse_box(&parse_fields(l, &truth_path, n, 4, 4)?, &truth_path, n))
        .collect::<Result<Vec<_>>>()?;

    let absence_path = dir.join(ABSENCE_FILE);
    let present = if absence_path.exists() {
        content_lines(&read_text(&absence_path)?)
            .map(|(n, l)| match l {
                "0" => Ok(true),
                "1" => Ok(false),
                other => Err(Error::parse(&absence_path, n, format!("expected 0 or 1, found {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        vec![true; frames.len()]
    };

    if truth.len() != frames.len() || present.len() != frames.len() {
        return Err(Error::Structure(format!(
            "{}: {} frames but {} truth lines and {} absence lines",
            dir.display(),
            frames.len(),
            truth.len(),
            present.len()
        )));
    }
    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    SequenceDataset::new(name, frames, truth, present)
}

/// Writes `bytes` to `path` through a sibling temp file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("")
    ));
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn format_box(b: &BBox) -> String {
    format!("{},{},{},{}", b.x, b.y, b.w, b.h)
}

pub fn write_sequence(dataset: &SequenceDataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for frame in &dataset.frames {
        write_atomic(&dir.join(frame_file_name(frame.index)), &encode_pgm(frame))?;
    }
    let truth: String = dataset.truth.iter().map(|b| format_box(b) + "\n").collect();
    write_atomic(&dir.join(TRUTH_FILE), truth.as_bytes())?;
    let absence_path = dir.join(ABSENCE_FILE);
    if dataset.present.iter().all(|&p| p) {
        if absence_path.exists() {
            fs::remove_file(&absence_path).map_err(|e| Error::io(&absence_path, e))?;
        }
    } else {
        let absence: String = dataset
            .present
            .iter()
            .map(|&p| if p { "0\n" } else { "1\n" })
            .collect();
        write_atomic(&absence_path, absence.as_bytes())?;
    }
    Ok(())
}

pub fn read_results(path: &Path) -> Result<Vec<(BBox, f64)>> {
    content_lines(&read_text(path)?)
        .map(|(n, l)| {
            let f = parse_fields(l, path, n, 4, 5)?;
            Ok((parse_box(&f, path, n)?, f.get(4).copied().unwrap_or(1.0)))
        })
        .collect()
}

pub fn format_results(rows: &[(BBox, f64)]) -> String {
    rows.iter()
        .map(|(b, s)| format!("{},{}\n", format_box(b), s))
        .collect()
}

pub fn write_results(rows: &[(BBox, f64)], path: &Path) -> Result<()> {
    write_atomic(path, format_results(rows).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tiny_dataset(n: usize) -> SequenceDataset {
        let frames = (0..n)
            .map(|i| {
                let px = (0..32 * 32).map(|k| dequantize(((k + i) % 256) as u8)).collect();
                Frame::new(32, 32, px, i).unwrap()
            })
            .collect();
        let truth = (0..n).map(|i| BBox::new(i as f64, 2.5, 10.0, 12.25)).collect();
        let mut present = vec![true; n];
        if n > 1 {
            present[1] = false;
        }
        SequenceDataset::new("tiny", frames, truth, present).unwrap()
    }

    #[test]
    fn quantization_endpoints() {
        assert_eq!(quantize(1.0), 255);
        assert_eq!(quantize(0.0), 0);
        assert_eq!(quantize(0.5), 128);
        assert_eq!(dequantize(128), 128.0 / 255.0);
        assert_eq!(dequantize(quantize(1.0)), 1.0);
    }

    #[test]
    fn sequence_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let seq_dir = dir.path().join("tiny");
        let d = tiny_dataset(3);
        write_sequence(&d, &seq_dir).unwrap();
        let back = read_sequence(&seq_dir).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back, d);
        assert!(!back.present[1]);
    }

    #[test]
    fn truth_line_maps_to_box() {
        let dir = tempfile::tempdir().unwrap();
        let d = tiny_dataset(1);
        write_sequence(&d, dir.path()).unwrap();
        fs::write(dir.path().join(TRUTH_FILE), "10,20,30,40\n").unwrap();
        let back = read_sequence(dir.path()).unwrap();
        assert_eq!(back.truth[0], BBox::new(10.0, 20.0, 30.0, 40.0));
        assert!(back.present[0]);
    }

    #[test]
    fn absence_flag_at_frame_five() {
        let dir = tempfile::tempdir().unwrap();
        let d = tiny_dataset(7);
        write_sequence(&d, dir.path()).unwrap();
        let absence: String = (0..7).map(|i| if i == 5 { "1\n" } else { "0\n" }).collect();
        fs::write(dir.path().join(ABSENCE_FILE), absence).unwrap();
        let back = read_sequence(dir.path()).unwrap();
        assert!(!back.present[5]);
        assert_eq!(back.present.iter().filter(|p| !**p).count(), 1);
    }

    #[test]
    fn malformed_truth_names_file_and_line() {
        let dir = tempfile::tempdir().unwrap();
        write_sequence(&tiny_dataset(2), dir.path()).unwrap();
        fs::write(dir.path().join(TRUTH_FILE), "1,2,3,4\n1,2,x,4\n").unwrap();
        match read_sequence(dir.path()) {
            Err(Error::Parse { file, line, .. }) => {
                assert!(file.ends_with(TRUTH_FILE));
                assert_eq!(line, 2);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn frame_count_mismatch_is_structural() {
        let dir = tempfile::tempdir().unwrap();
        write_sequence(&tiny_dataset(3), dir.path()).unwrap();
        fs::write(dir.path().join(TRUTH_FILE), "1,2,3,4\n").unwrap();
        assert!(matches!(read_sequence(dir.path()), Err(Error::Structure(_))));
    }

    #[test]
    fn results_parsing() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.trk");
        fs::write(&p, "1,2,3,4,0.9\n1,2,3,4\n").unwrap();
        let r = read_results(&p).unwrap();
        assert_eq!(r[0], (BBox::new(1.0, 2.0, 3.0, 4.0), 0.9));
        assert_eq!(r[1], (BBox::new(1.0, 2.0, 3.0, 4.0), 1.0));
        fs::write(&p, "").unwrap();
        assert!(read_results(&p).unwrap().is_empty());
        fs::write(&p, "1,2,3\n").unwrap();
        assert!(matches!(read_results(&p), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn bad_pgm_is_diagnosed() {
        let p = Path::new("0000.pgm");
        assert!(matches!(decode_pgm(b"P6\n32 32\n255\n", p, 0), Err(Error::Parse { .. })));
        assert!(matches!(decode_pgm(b"P5\n32 32\n255\n\x00", p, 0), Err(Error::Structure(_))));
        assert!(decode_pgm(b"P5", p, 0).is_err());
    }

    proptest! {
        #[test]
        fn results_round_trip(rows in proptest::collection::vec(
            (-1e3..1e3f64, -1e3..1e3f64, 0.01..1e3f64, 0.01..1e3f64, -1.0..1.0f64), 0..20)) {
            let dir = tempfile::tempdir().unwrap();
            let p = dir.path().join("r.trk");
            let rows: Vec<_> = rows.into_iter().map(|(x, y, w, h, s)| (BBox::new(x, y, w, h), s)).collect();
            write_results(&rows, &p).unwrap();
            prop_assert_eq!(read_results(&p).unwrap(), rows);
        }

        #[test]
        fn pgm_round_trip(bytes in proptest::collection::vec(any::<u8>(), 32 * 33)) {
            let f = Frame::new(32, 33, bytes.iter().map(|&b| dequantize(b)).collect(), 4).unwrap();
            let enc = encode_pgm(&f);
            let back = decode_pgm(&enc, Path::new("0004.pgm"), 4).unwrap();
            prop_assert_eq!(encode_pgm(&back), enc);
            prop_assert_eq!(back, f);
        }
    }
}
