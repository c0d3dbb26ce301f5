//! Space-time diagrams as binary PGM images and ASCII art.
//! Live cells are black (`0`) in the image and `#` in text.

use std::io::{self, Write};

use crate::ca::CaState;

/// P5 graymap, one image row per automaton state.
pub fn write_pgm<W: Write>(rows: &[CaState], mut out: W) -> io::Result<()> {
    let width = rows.first().map_or(0, CaState::width);
    if rows.iter().any(|r| r.width() != width) {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "rows differ in width"));
    }
    write!(out, "P5\n{} {}\n255\n", width, rows.len())?;
    let mut line = Vec::with_capacity(width);
    for row in rows {
        line.clear();
        line.extend((0..width).map(|i| if row.get(i) == 1 { 0u8 } else { 255u8 }));
        out.write_all(&line)?;
    }
    Ok(())
}

pub fn write_ascii<W: Write>(rows: &[CaState], mut out: W) -> io::Result<()> {
    for row in rows {
        writeln!(out, "{row}")?;
    }
    Ok(())
}

/// Parses a P5 image written by [`write_pgm`] back into cell rows.
pub fn read_pgm(bytes: &[u8]) -> io::Result<Vec<Vec<u8>>> {
    let bad = |msg: &str| io::Error::new(io::ErrorKind::InvalidData, msg.to_string());
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("header is not ASCII"))?);
    }
    if fields[0] != "P5" || fields[3] != "255" {
        return Err(bad("not an 8-bit P5 graymap"));
    }
    let width: usize = fields[1].parse().map_err(|_| bad("bad width"))?;
    let height: usize = fields[2].parse().map_err(|_| bad("bad height"))?;
    let data = &bytes[pos + 1..];
    if data.len() != width * height {
        return Err(bad("pixel count does not match header"));
    }
    Ok(data
        .chunks(width.max(1))
        .take(height)
        .map(|row| row.iter().map(|&px| u8::from(px == 0)).collect())
        .collect())
}
