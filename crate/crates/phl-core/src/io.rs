//! Binary field files.
//!
//! Layout: magic `"PHL1"`, `u32` dimension, `u32` sample count per axis,
//! `f64` half-width per axis, `u8` scalar kind (0 real / 1 complex), then the
//! samples as little-endian `f64` in row-major order (re/im interleaved when
//! complex).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Field, ScalarKind};
use crate::grid::GridSpec;

pub const MAGIC: &[u8; 4] = b"PHL1";

fn io_err<'a>(
    action: &'static str,
    path: &'a Path,
) -> impl FnOnce(std::io::Error) -> Error + 'a {
    move |source| Error::Io {
        action,
        path: path.to_path_buf(),
        source,
    }
}

fn format_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::BadFieldFile {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// Write a field to `path` in the binary layout above.
pub fn write_field(field: &Field, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err("create", path))?;
    let mut w = BufWriter::new(file);
    let spec = field.spec();
    let mut emit = |bytes: &[u8]| w.write_all(bytes).map_err(io_err("write", path));
    emit(MAGIC)?;
    emit(&(spec.dim() as u32).to_le_bytes())?;
    for a in 0..spec.dim() {
        emit(&(spec.samples(a) as u32).to_le_bytes())?;
    }
    for a in 0..spec.dim() {
        emit(&spec.half_width(a).to_le_bytes())?;
    }
    match field.kind() {
        ScalarKind::Real => {
            emit(&[0u8])?;
            for &v in field.as_real().expect("real field") {
                emit(&v.to_le_bytes())?;
            }
        }
        ScalarKind::Complex => {
            emit(&[1u8])?;
            for &z in field.as_complex().expect("complex field") {
                emit(&z.re.to_le_bytes())?;
                emit(&z.im.to_le_bytes())?;
            }
        }
    }
    w.flush().map_err(io_err("write", path))
}

/// Read a field written by [`write_field`].
pub fn read_field(path: &Path) -> Result<Field> {
    let file = File::open(path).map_err(io_err("open", path))?;
    let mut r = BufReader::new(file);

    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io_err("read", path))?;
    if &magic != MAGIC {
        return Err(format_err(path, "bad magic"));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf).map_err(io_err("read", path))?;
    let d = u32::from_le_bytes(u32buf) as usize;
    if d == 0 || d > 3 {
        return Err(format_err(path, format!("dimension {d} out of range")));
    }
    let mut n = Vec::with_capacity(d);
    for _ in 0..d {
        r.read_exact(&mut u32buf).map_err(io_err("read", path))?;
        n.push(u32::from_le_bytes(u32buf) as usize);
    }
    let mut f64buf = [0u8; 8];
    let mut l = Vec::with_capacity(d);
    for _ in 0..d {
        r.read_exact(&mut f64buf).map_err(io_err("read", path))?;
        l.push(f64::from_le_bytes(f64buf));
    }
    let spec = GridSpec::new(&n, &l)
        .map_err(|e| format_err(path, format!("bad grid header: {e}")))?;

    let mut kind = [0u8; 1];
    r.read_exact(&mut kind).map_err(io_err("read", path))?;
    let total = spec.len();
    let field = match kind[0] {
        0 => {
            let mut values = Vec::with_capacity(total);
            for _ in 0..total {
                r.read_exact(&mut f64buf).map_err(io_err("read", path))?;
                values.push(f64::from_le_bytes(f64buf));
            }
            Field::from_real(&spec, values)
                .map_err(|e| format_err(path, format!("bad samples: {e}")))?
        }
        1 => {
            let mut values = Vec::with_capacity(total);
            for _ in 0..total {
                r.read_exact(&mut f64buf).map_err(io_err("read", path))?;
                let re = f64::from_le_bytes(f64buf);
                r.read_exact(&mut f64buf).map_err(io_err("read", path))?;
                let im = f64::from_le_bytes(f64buf);
                values.push(Complex64::new(re, im));
            }
            Field::from_complex(&spec, values)
                .map_err(|e| format_err(path, format!("bad samples: {e}")))?
        }
        k => return Err(format_err(path, format!("unknown scalar kind {k}"))),
    };
    let mut trailing = [0u8; 1];
    match r.read(&mut trailing) {
        Ok(0) => Ok(field),
        Ok(_) => Err(format_err(path, "trailing bytes after samples")),
        Err(e) => Err(io_err("read", path)(e)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_field_round_trips_bit_exactly() {
        let spec = GridSpec::new(&[16, 32], &[1.0, 2.5]).unwrap();
        let f = Field::sample(&spec, |x| x[0] * 3.0 - x[1] * x[1]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.phl");
        write_field(&f, &path).unwrap();
        let g = read_field(&path).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn complex_field_round_trips_bit_exactly() {
        let spec = GridSpec::new(&[16], &[1.0]).unwrap();
        let values: Vec<Complex64> = (0..16)
            .map(|k| Complex64::new(k as f64 * 0.25, -(k as f64) * 0.5))
            .collect();
        let f = Field::from_complex(&spec, values).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.phl");
        write_field(&f, &path).unwrap();
        let g = read_field(&path).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.phl");
        std::fs::write(&path, b"NOPE....").unwrap();
        assert!(matches!(
            read_field(&path),
            Err(Error::BadFieldFile { .. })
        ));
    }
}
