//! Newline-delimited feature dump: `x y score angle <64 hex digits>`.

use std::io::{self, BufRead, Write};

use super::{BinaryDescriptor, Feature, Keypoint};

pub fn write_features<W: Write>(mut out: W, features: &[Feature]) -> io::Result<()> {
    for f in features {
        let k = &f.keypoint;
        writeln!(out, "{} {} {} {} {}", k.x, k.y, k.score, k.angle, f.descriptor)?;
    }
    Ok(())
}

pub fn read_features<R: BufRead>(input: R) -> io::Result<Vec<Feature>> {
    let bad = |line: usize, what: &str| {
        io::Error::new(io::ErrorKind::InvalidData, format!("feature dump line {line}: {what}"))
    };
    let mut features = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(bad(i + 1, "expected 5 fields"));
        }
        let num = |s: &str| s.parse::<f32>().map_err(|_| bad(i + 1, "bad number"));
        features.push(Feature {
            keypoint: Keypoint {
                x: num(fields[0])?,
                y: num(fields[1])?,
                score: num(fields[2])?,
                angle: num(fields[3])?,
            },
            descriptor: fields[4]
                .parse::<BinaryDescriptor>()
                .map_err(|_| bad(i + 1, "bad descriptor"))?,
        });
    }
    Ok(features)
}
