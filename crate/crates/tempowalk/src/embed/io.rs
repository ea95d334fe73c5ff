//! Embedding text output and binary model checkpoints.

use std::io::{BufRead, Read, Write};

use crate::embed::{EmbeddingModel, Matrix, Real};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"TWKMODL\0";
const VERSION: u32 = 1;

/// `num_paragraph_tags dim` header, then `t x1 ... x_dim` rows with 9
/// significant digits.
pub fn write_embeddings_text<W: Write, F: Real>(model: &EmbeddingModel<F>, w: &mut W) -> Result<()> {
    write_matrix_text(&model.paragraphs, w)
}

/// Word vectors in the same format (`num_vertices dim` header).
pub fn write_word_vectors_text<W: Write, F: Real>(model: &EmbeddingModel<F>, w: &mut W) -> Result<()> {
    write_matrix_text(&model.words, w)
}

fn write_matrix_text<W: Write, F: Real>(m: &Matrix<F>, w: &mut W) -> Result<()> {
    writeln!(w, "{} {}", m.rows(), m.dim())?;
    let mut line = String::new();
    for r in 0..m.rows() {
        line.clear();
        line.push_str(&r.to_string());
        for x in m.row(r) {
            line.push(' ');
            line.push_str(&format!("{:.8e}", x));
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Read an embedding text file back as `(rows, dim, row-major data)`.
pub fn read_embeddings_text<R: BufRead>(r: R) -> Result<(usize, usize, Vec<f64>)> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Invalid("empty embedding file".into()))??;
    let mut parts = header.split_whitespace();
    let rows: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse { line: 1, msg: "bad header row count".into() })?;
    let dim: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse { line: 1, msg: "bad header dim".into() })?;

    let mut data = vec![0.0f64; rows * dim];
    let mut seen = vec![false; rows];
    for (lineno, line) in lines.enumerate() {
        let lineno = lineno + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let t: usize = fields
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse { line: lineno, msg: "bad row tag".into() })?;
        if t >= rows {
            return Err(Error::Parse { line: lineno, msg: format!("row tag {t} out of range") });
        }
        for k in 0..dim {
            let v: f64 = fields
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse { line: lineno, msg: format!("missing value {k}") })?;
            data[t * dim + k] = v;
        }
        if fields.next().is_some() {
            return Err(Error::Parse { line: lineno, msg: "trailing values".into() });
        }
        seen[t] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::Invalid(format!("embedding file is missing row {missing}")));
    }
    Ok((rows, dim, data))
}

/// Versioned binary checkpoint: magic, version, float width, dims, then the
/// paragraph, word and context matrices row-major in little-endian floats.
pub fn save_checkpoint<W: Write, F: Real>(model: &EmbeddingModel<F>, w: &mut W) -> Result<()> {
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(F::BYTES as u32).to_le_bytes());
    buf.extend_from_slice(&(model.num_paragraph_tags() as u64).to_le_bytes());
    buf.extend_from_slice(&(model.num_vertices() as u64).to_le_bytes());
    buf.extend_from_slice(&(model.dim() as u64).to_le_bytes());
    for m in [&model.paragraphs, &model.words, &model.contexts] {
        for x in m.data() {
            x.write_le(&mut buf);
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn load_checkpoint<R: Read, F: Real>(r: &mut R) -> Result<EmbeddingModel<F>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let need = |n: usize, at: usize| -> Result<()> {
        if bytes.len() < at + n {
            Err(Error::Invalid("checkpoint truncated".into()))
        } else {
            Ok(())
        }
    };
    need(MAGIC.len() + 8, 0)?;
    if &bytes[..8] != MAGIC {
        return Err(Error::Invalid("not a model checkpoint (bad magic)".into()));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(Error::Invalid(format!("unsupported checkpoint version {version}")));
    }
    let float_bytes = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    if float_bytes != F::BYTES {
        return Err(Error::Invalid(format!(
            "checkpoint holds {float_bytes}-byte floats, expected {}",
            F::BYTES
        )));
    }
    need(24, 16)?;
    let num_tags = u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize;
    let num_vertices = u64::from_le_bytes(bytes[24..32].try_into().unwrap()) as usize;
    let dim = u64::from_le_bytes(bytes[32..40].try_into().unwrap()) as usize;

    let mut at = 40usize;
    let mut read_matrix = |rows: usize| -> Result<Matrix<F>> {
        let n = rows * dim;
        need(n * F::BYTES, at)?;
        let data: Vec<F> = (0..n)
            .map(|i| F::from_le(&bytes[at + i * F::BYTES..at + (i + 1) * F::BYTES]))
            .collect();
        at += n * F::BYTES;
        Ok(Matrix::from_vec(rows, dim, data))
    };
    let paragraphs = read_matrix(num_tags)?;
    let words = read_matrix(num_vertices)?;
    let contexts = read_matrix(num_vertices)?;
    Ok(EmbeddingModel {
        paragraphs,
        words,
        contexts,
        noise_cumulative: Vec::new(),
        epoch_losses: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> EmbeddingModel<f32> {
        EmbeddingModel {
            paragraphs: Matrix::from_vec(2, 3, vec![1.0, -2.5, 3.25e-7, 0.5, 4.0, -1.0]),
            words: Matrix::from_vec(2, 3, vec![0.1; 6]),
            contexts: Matrix::from_vec(2, 3, vec![0.0; 6]),
            noise_cumulative: Vec::new(),
            epoch_losses: vec![1.0],
        }
    }

    #[test]
    fn text_round_trip_preserves_nine_digits() {
        let m = model();
        let mut out = Vec::new();
        write_embeddings_text(&m, &mut out).unwrap();
        let text = String::from_utf8(out.clone()).unwrap();
        assert!(text.starts_with("2 3\n"));
        assert!(text.contains("-2.50000000e0"), "nine significant digits: {text}");

        let (rows, dim, data) = read_embeddings_text(out.as_slice()).unwrap();
        assert_eq!((rows, dim), (2, 3));
        for (got, want) in data.iter().zip(m.paragraphs.data()) {
            assert!((got - *want as f64).abs() <= 1e-9 * want.abs().max(1.0) as f64);
        }
    }

    #[test]
    fn checkpoint_round_trip() {
        let m = model();
        let mut buf = Vec::new();
        save_checkpoint(&m, &mut buf).unwrap();
        let back: EmbeddingModel<f32> = load_checkpoint(&mut buf.as_slice()).unwrap();
        assert_eq!(back.paragraphs, m.paragraphs);
        assert_eq!(back.words, m.words);
        assert_eq!(back.contexts, m.contexts);

        // A 64-bit load of a 32-bit checkpoint is refused.
        let err = load_checkpoint::<_, f64>(&mut buf.as_slice());
        assert!(err.is_err());
    }

    #[test]
    fn corrupt_checkpoint_is_rejected() {
        let mut buf = Vec::new();
        save_checkpoint(&model(), &mut buf).unwrap();
        buf[0] = b'X';
        assert!(load_checkpoint::<_, f32>(&mut buf.as_slice()).is_err());
        let mut short = Vec::new();
        save_checkpoint(&model(), &mut short).unwrap();
        short.truncate(short.len() - 4);
        assert!(load_checkpoint::<_, f32>(&mut short.as_slice()).is_err());
    }
}
