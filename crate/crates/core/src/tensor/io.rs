//! Snapshot formats.
//!
//! Binary layout (all little-endian): `u64` order `d`, then `d` × `u64`
//! extents, then the entries first-index-fastest as interleaved `f64`
//! real/imaginary pairs.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::CTensor;
use crate::error::{Error, Result};
use crate::scalar::{widen_complex, Real};

pub fn write_binary<T: Real, W: Write>(t: &CTensor<T>, mut w: W) -> Result<()> {
    w.write_all(&(t.order() as u64).to_le_bytes())?;
    for &n in t.dims() {
        w.write_all(&(n as u64).to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(16 * t.len());
    for &z in t.as_slice() {
        let z = widen_complex(z);
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<CTensor<f64>> {
    let mut word = [0u8; 8];
    let mut next_u64 = |r: &mut R| -> Result<u64> {
        r.read_exact(&mut word)?;
        Ok(u64::from_le_bytes(word))
    };
    let order = next_u64(&mut r)? as usize;
    if order == 0 || order > 16 {
        return Err(Error::Domain(format!("implausible tensor order {order}")));
    }
    let dims = (0..order)
        .map(|_| next_u64(&mut r).map(|n| n as usize))
        .collect::<Result<Vec<_>>>()?;
    let len: usize = dims.iter().product();
    let mut bytes = vec![0u8; 16 * len];
    r.read_exact(&mut bytes)?;
    let data = bytes
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    CTensor::from_vec(&dims, data)
}

/// Writes `|u|` on the grid, one row per node, first index fastest.
///
/// Columns are `x1,…,xd,abs_u`; `coords[μ]` lists the nodes along direction μ.
pub fn write_abs_csv<T: Real, W: Write>(t: &CTensor<T>, coords: &[Vec<f64>], mut w: W) -> Result<()> {
    if coords.len() != t.order() || coords.iter().zip(t.dims()).any(|(c, &n)| c.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: t.dims().to_vec(),
            found: coords.iter().map(Vec::len).collect(),
        });
    }
    let mut header: Vec<String> = (1..=t.order()).map(|k| format!("x{k}")).collect();
    header.push("abs_u".into());
    writeln!(w, "{}", header.join(","))?;
    let mut idx = vec![0usize; t.order()];
    let mut line = String::new();
    for &z in t.as_slice() {
        line.clear();
        for (mu, &i) in idx.iter().enumerate() {
            line.push_str(&format!("{:.10e},", coords[mu][i]));
        }
        line.push_str(&format!("{:.10e}", widen_complex(z).norm()));
        writeln!(w, "{line}")?;
        for (i, n) in idx.iter_mut().zip(t.dims()) {
            *i += 1;
            if *i < *n {
                break;
            }
            *i = 0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_header_layout() {
        let t = CTensor::from_fn(&[2, 3], |i| Complex64::new(i[0] as f64, i[1] as f64));
        let mut buf = Vec::new();
        write_binary(&t, &mut buf).unwrap();
        assert_eq!(buf.len(), 8 * 3 + 16 * 6);
        assert_eq!(u64::from_le_bytes(buf[0..8].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(buf[16..24].try_into().unwrap()), 3);
        // second entry is (1, 0)
        assert_eq!(f64::from_le_bytes(buf[40..48].try_into().unwrap()), 1.0);
        assert_eq!(read_binary(&buf[..]).unwrap(), t);
    }

    #[test]
    fn truncated_binary_is_an_error() {
        let t = CTensor::<f64>::zeros(&[4, 4]);
        let mut buf = Vec::new();
        write_binary(&t, &mut buf).unwrap();
        assert!(read_binary(&buf[..buf.len() - 1]).is_err());
    }

    #[test]
    fn abs_csv_rows() {
        let t = CTensor::from_fn(&[2, 2], |i| Complex64::new(3.0 * i[0] as f64, 4.0 * i[1] as f64));
        let coords = vec![vec![-0.5, 0.5], vec![-1.0, 1.0]];
        let mut buf = Vec::new();
        write_abs_csv(&t, &coords, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x1,x2,abs_u");
        assert_eq!(lines.len(), 5);
        assert!(lines[4].ends_with("5.0000000000e0"));
        assert!(write_abs_csv(&t, &coords[..1], &mut Vec::new()).is_err());
    }
}
