//! Versioned binary checkpoint: layer shapes, parameters, optimizer state,
//! schedule position, and the resolved-config hash. Loading restores
//! bit-identical behavior.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::mlp::QNetwork;
use super::optim::{Adam, AdamConfig};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"FXLABCK\n";
const VERSION: u32 = 1;

/// Everything needed to resume or replay an agent deterministically.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub config_hash: u64,
    pub global_step: u64,
    pub dims: Vec<usize>,
    pub params: Vec<f64>,
    pub adam_step: u64,
    pub adam_m: Vec<f64>,
    pub adam_v: Vec<f64>,
}

impl Checkpoint {
    pub fn capture(net: &QNetwork, opt: &Adam, config_hash: u64, global_step: u64) -> Self {
        Checkpoint {
            config_hash,
            global_step,
            dims: net.dims().to_vec(),
            params: net.params().to_vec(),
            adam_step: opt.step,
            adam_m: opt.m.clone(),
            adam_v: opt.v.clone(),
        }
    }

    pub fn restore_network(&self) -> Result<QNetwork> {
        QNetwork::from_params(self.dims.clone(), self.params.clone())
    }

    pub fn restore_optimizer(&self, cfg: AdamConfig) -> Adam {
        Adam { cfg, step: self.adam_step, m: self.adam_m.clone(), v: self.adam_v.clone() }
    }
}

fn push_u32(buf: &mut Vec<u8>, v: u32) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn push_u64(buf: &mut Vec<u8>, v: u64) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn push_f64s(buf: &mut Vec<u8>, vs: &[f64]) {
    push_u64(buf, vs.len() as u64);
    for v in vs {
        buf.extend_from_slice(&v.to_le_bytes());
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::Data("truncated checkpoint file".into()));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64s(&mut self) -> Result<Vec<f64>> {
        let n = self.u64()? as usize;
        let raw = self.take(n * 8)?;
        Ok(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }
}

pub fn save_checkpoint(path: &Path, ckpt: &Checkpoint) -> Result<()> {
    let mut buf = Vec::with_capacity(ckpt.params.len() * 24 + 256);
    buf.extend_from_slice(MAGIC);
    push_u32(&mut buf, VERSION);
    push_u64(&mut buf, ckpt.config_hash);
    push_u64(&mut buf, ckpt.global_step);
    push_u64(&mut buf, ckpt.dims.len() as u64);
    for d in &ckpt.dims {
        push_u64(&mut buf, *d as u64);
    }
    push_f64s(&mut buf, &ckpt.params);
    push_u64(&mut buf, ckpt.adam_step);
    push_f64s(&mut buf, &ckpt.adam_m);
    push_f64s(&mut buf, &ckpt.adam_v);
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent.display().to_string(), e))?;
        }
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    f.write_all(&buf).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let bytes = fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut r = Reader { bytes: &bytes, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(Error::Data(format!("{} is not a checkpoint file", path.display())));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Data(format!("unsupported checkpoint version {version}")));
    }
    let config_hash = r.u64()?;
    let global_step = r.u64()?;
    let n_dims = r.u64()? as usize;
    let mut dims = Vec::with_capacity(n_dims);
    for _ in 0..n_dims {
        dims.push(r.u64()? as usize);
    }
    let params = r.f64s()?;
    let adam_step = r.u64()?;
    let adam_m = r.f64s()?;
    let adam_v = r.f64s()?;
    Ok(Checkpoint { config_hash, global_step, dims, params, adam_step, adam_m, adam_v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_pcg::Pcg64;

    #[test]
    fn roundtrip_is_bit_identical() {
        let mut rng = Pcg64::seed_from_u64(13);
        let net = QNetwork::new(7, &[5, 4], 3, &mut rng).unwrap();
        let mut opt = Adam::new(AdamConfig::default(), net.n_params());
        opt.step = 17;
        opt.m[3] = 0.123456789;
        opt.v[5] = 42.0e-9;
        let ckpt = Checkpoint::capture(&net, &opt, 0xdead_beef, 999);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("final.ckpt");
        save_checkpoint(&path, &ckpt).unwrap();
        let loaded = load_checkpoint(&path).unwrap();
        assert_eq!(loaded.config_hash, 0xdead_beef);
        assert_eq!(loaded.global_step, 999);
        assert_eq!(loaded.dims, net.dims());
        assert!(crate::util::bits_eq(&loaded.params, net.params()));
        assert!(crate::util::bits_eq(&loaded.adam_m, &opt.m));
        assert_eq!(loaded.adam_step, 17);
        // Restored network behaves identically.
        let restored = loaded.restore_network().unwrap();
        let x = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7];
        assert!(crate::util::bits_eq(
            &restored.forward(&x).unwrap(),
            &net.forward(&x).unwrap()
        ));
    }

    #[test]
    fn rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.ckpt");
        std::fs::write(&path, b"not a checkpoint").unwrap();
        assert!(load_checkpoint(&path).is_err());
    }
}
