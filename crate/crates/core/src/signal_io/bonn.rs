use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{check_uniform_length, Corpus, Segment, SetTag, BONN_SAMPLE_RATE_HZ, BONN_SEGMENT_LEN};
use crate::error::{Error, Result};

/// Parses one amplitude per line. Blank lines are skipped; LF and CRLF
/// endings are both accepted. `path` is only used in error messages.
pub fn parse_bonn_text(text: &str, path: &Path) -> Result<Vec<f64>> {
    let mut samples = Vec::with_capacity(BONN_SEGMENT_LEN + 1);
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let value: f64 = line.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            message: format!("`{line}` is not a number"),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                message: format!("`{line}` is not finite"),
            });
        }
        samples.push(value);
    }
    Ok(samples)
}

/// Loads a single Bonn text file. A 4097-sample file (as published) is
/// truncated to 4096.
pub fn load_bonn_file(path: &Path) -> Result<Segment> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut samples = parse_bonn_text(&text, path)?;
    if samples.len() == BONN_SEGMENT_LEN + 1 {
        samples.pop();
    }
    let source_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Segment::new(samples, BONN_SAMPLE_RATE_HZ, source_id).map_err(|e| match e {
        Error::Shape(msg) => Error::Shape(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Loads every regular file in `dir` (hidden files excluded), in
/// lexicographic file-name order. All segments must share one length.
pub fn load_bonn_dir(dir: &Path) -> Result<Vec<Segment>> {
    let mut files: Vec<PathBuf> = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let hidden = entry.file_name().to_string_lossy().starts_with('.');
        if !hidden && path.is_file() {
            files.push(path);
        }
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    let segments = files
        .iter()
        .map(|p| load_bonn_file(p))
        .collect::<Result<Vec<_>>>()?;
    check_uniform_length(&segments)?;
    Ok(segments)
}

/// Finds the directory holding `tag` under `root`. Both the set letter
/// (`A`) and the archive letter (`Z`) are accepted in either case.
pub fn resolve_set_dir(root: &Path, tag: SetTag) -> Option<PathBuf> {
    let names = [tag.letter(), tag.corpus_letter()];
    names
        .iter()
        .flat_map(|c| [c.to_ascii_uppercase(), c.to_ascii_lowercase()])
        .map(|c| root.join(c.to_string()))
        .find(|p| p.is_dir())
}

pub fn load_bonn_set(root: &Path, tag: SetTag) -> Result<Vec<Segment>> {
    let dir = resolve_set_dir(root, tag).ok_or_else(|| {
        Error::Config(format!(
            "set {tag} not found under {} (expected a `{}` or `{}` directory)",
            root.display(),
            tag.letter(),
            tag.corpus_letter()
        ))
    })?;
    load_bonn_dir(&dir)
}

/// Loads the requested sets from a corpus root and checks that every
/// segment across them has the same length.
pub fn load_bonn_corpus(root: &Path, sets: &[SetTag]) -> Result<Corpus> {
    let mut corpus = Corpus::new();
    for &tag in sets {
        corpus.insert(tag, load_bonn_set(root, tag)?);
    }
    check_uniform_length(corpus.values().flatten())?;
    Ok(corpus)
}

/// Writes a segment in Bonn text format. Integral samples are written as
/// integers, anything else with the shortest exact decimal form, so
/// [`load_bonn_file`] reproduces the samples bit for bit.
pub fn write_bonn_file(path: &Path, seg: &Segment) -> Result<()> {
    let mut out = String::with_capacity(seg.len() * 8);
    for &x in seg.samples() {
        if x.fract() == 0.0 && x.abs() < 1e15 {
            out.push_str(&format!("{}\n", x as i64));
        } else {
            out.push_str(&format!("{x}\n"));
        }
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use tempfile::tempdir;

    fn write_lines(path: &Path, n: usize) {
        let body: String = (0..n).map(|i| format!("{}\n", (i as i64 % 97) - 48)).collect();
        fs::write(path, body).unwrap();
    }

    #[test]
    fn published_4097_line_files_become_4096() {
        let dir = tempdir().unwrap();
        for i in (1..=3).rev() {
            write_lines(&dir.path().join(format!("Z{i:03}.txt")), 4097);
        }
        let segs = load_bonn_dir(dir.path()).unwrap();
        assert_eq!(segs.len(), 3);
        assert!(segs.iter().all(|s| s.len() == 4096));
        assert!(segs.iter().all(|s| s.sample_rate_hz() == BONN_SAMPLE_RATE_HZ));
        let ids: Vec<_> = segs.iter().map(|s| s.source_id().to_owned()).collect();
        assert_eq!(ids, ["Z001", "Z002", "Z003"]);
    }

    #[test]
    fn empty_directory_is_empty_corpus() {
        let dir = tempdir().unwrap();
        assert!(load_bonn_dir(dir.path()).unwrap().is_empty());
    }

    #[test]
    fn non_numeric_line_reports_line_number() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        fs::write(&path, "1\n2\nx\n").unwrap();
        match load_bonn_file(&path) {
            Err(Error::Parse { line, path: p, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(p, path);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn crlf_is_accepted() {
        let v = parse_bonn_text("1\r\n-2\r\n3.5\r\n", Path::new("x")).unwrap();
        assert_eq!(v, [1.0, -2.0, 3.5]);
    }

    #[test]
    fn mixed_lengths_fail_at_load() {
        let dir = tempdir().unwrap();
        write_lines(&dir.path().join("a.txt"), 4097);
        write_lines(&dir.path().join("b.txt"), 4000);
        assert!(matches!(load_bonn_dir(dir.path()), Err(Error::Shape(_))));
    }

    #[test]
    fn unreadable_file_names_the_file() {
        let err = load_bonn_file(Path::new("/nonexistent/F042.txt")).unwrap_err();
        assert!(err.to_string().contains("F042.txt"));
    }

    #[test]
    fn set_dirs_resolve_by_either_letter() {
        let dir = tempdir().unwrap();
        fs::create_dir(dir.path().join("Z")).unwrap();
        fs::create_dir(dir.path().join("s")).unwrap();
        write_lines(&dir.path().join("Z").join("Z001.txt"), 32);
        write_lines(&dir.path().join("s").join("S001.txt"), 32);
        let corpus = load_bonn_corpus(dir.path(), &[SetTag::A, SetTag::E]).unwrap();
        assert_eq!(corpus[&SetTag::A].len(), 1);
        assert_eq!(corpus[&SetTag::E].len(), 1);
        assert!(matches!(
            load_bonn_corpus(dir.path(), &[SetTag::B]),
            Err(Error::Config(_))
        ));
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(
            ints in proptest::collection::vec(-5000i32..5000, 16..64),
            reals in proptest::collection::vec(-1.0e4f64..1.0e4, 16..64),
        ) {
            let dir = tempdir().unwrap();
            for (name, xs) in [
                ("int.txt", ints.iter().map(|&i| i as f64).collect::<Vec<_>>()),
                ("real.txt", reals),
            ] {
                let seg = Segment::new(xs, BONN_SAMPLE_RATE_HZ, "x").unwrap();
                let path = dir.path().join(name);
                write_bonn_file(&path, &seg).unwrap();
                let back = load_bonn_file(&path).unwrap();
                prop_assert_eq!(back.samples(), seg.samples());
            }
        }
    }
}
