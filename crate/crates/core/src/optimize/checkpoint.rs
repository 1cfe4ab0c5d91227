//! Versioned binary checkpoint: little-endian, length-prefixed.
//!
//! ```text
//! magic "SPCK" | version u32 | step u64 | digest [u8; 32] | points u64
//! per point: key u64 | n u32 | n × (len u32, utf-8 bytes) | n × logit f64 | n × m f64 | n × v f64
//! ```

use std::io::{Read, Write};

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use super::{DecisionPoint, Moments, PolicyParameters, Trainer};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"SPCK";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    /// SHA-256 of the run's canonical config text.
    pub config_digest: [u8; 32],
    pub trainer: Trainer,
}

pub fn write_checkpoint<W: Write>(out: &mut W, ckpt: &Checkpoint) -> Result<()> {
    let t = &ckpt.trainer;
    out.write_all(MAGIC)?;
    out.write_u32::<LE>(CHECKPOINT_VERSION)?;
    out.write_u64::<LE>(t.step)?;
    out.write_all(&ckpt.config_digest)?;
    out.write_u64::<LE>(t.params.len() as u64)?;
    for (&key, point) in t.params.iter() {
        out.write_u64::<LE>(key)?;
        out.write_u32::<LE>(point.vocab.len() as u32)?;
        for tok in &point.vocab {
            out.write_u32::<LE>(tok.len() as u32)?;
            out.write_all(tok.as_bytes())?;
        }
        let zeros = vec![0.0; point.logits.len()];
        let (m, v) = match t.moments.get(&key) {
            Some(mom) => (&mom.m, &mom.v),
            None => (&zeros, &zeros),
        };
        for x in point.logits.iter().chain(m).chain(v) {
            out.write_f64::<LE>(*x)?;
        }
    }
    Ok(())
}

fn read_f64s<R: Read>(input: &mut R, n: usize) -> Result<Vec<f64>> {
    (0..n).map(|_| Ok(input.read_f64::<LE>()?)).collect()
}

pub fn read_checkpoint<R: Read>(input: &mut R) -> Result<Checkpoint> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Checkpoint("not a checkpoint file".into()));
    }
    let version = input.read_u32::<LE>()?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::Checkpoint(format!("unsupported checkpoint version {version}")));
    }
    let step = input.read_u64::<LE>()?;
    let mut config_digest = [0u8; 32];
    input.read_exact(&mut config_digest)?;
    let count = input.read_u64::<LE>()?;
    let mut trainer = Trainer { step, ..Trainer::default() };
    let mut params = PolicyParameters::new();
    for _ in 0..count {
        let key = input.read_u64::<LE>()?;
        let n = input.read_u32::<LE>()? as usize;
        let mut vocab = Vec::with_capacity(n);
        for _ in 0..n {
            let len = input.read_u32::<LE>()? as usize;
            let mut buf = vec![0u8; len];
            input.read_exact(&mut buf)?;
            vocab.push(String::from_utf8(buf).map_err(|_| Error::Checkpoint("token is not utf-8".into()))?);
        }
        let logits = read_f64s(input, n)?;
        let m = read_f64s(input, n)?;
        let v = read_f64s(input, n)?;
        params.insert(key, DecisionPoint { vocab, logits });
        trainer.moments.insert(key, Moments { m, v });
    }
    trainer.params = params;
    Ok(Checkpoint { config_digest, trainer })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let mut trainer = Trainer { step: 7, ..Trainer::default() };
        trainer
            .params
            .insert(42, DecisionPoint { vocab: vec!["<PASS>".into(), "<BET>".into()], logits: vec![0.1, -1.0 / 3.0] });
        trainer.moments.insert(42, Moments { m: vec![1e-300, 2.0], v: vec![0.5, f64::MIN_POSITIVE] });
        let ckpt = Checkpoint { config_digest: [9; 32], trainer };
        let mut buf = Vec::new();
        write_checkpoint(&mut buf, &ckpt).unwrap();
        assert_eq!(read_checkpoint(&mut buf.as_slice()).unwrap(), ckpt);
        buf[0] = b'X';
        assert!(matches!(read_checkpoint(&mut buf.as_slice()), Err(Error::Checkpoint(_))));
    }
}
