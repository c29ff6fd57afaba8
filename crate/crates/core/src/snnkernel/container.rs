//! Flat binary container of named `f32` tensors.
//!
//! ```text
//! magic   "SNNT"          4 bytes
//! version u16 = 1
//! count   u32
//! count x { name_len u16, name (UTF-8), dtype u8 (0 = f32), ndim u8, dims u32 x ndim }
//! payloads, in table order, little-endian f32
//! ```

use std::io::{Read, Write};

use ndarray::{Array1, Array4};

use super::conv::ConvWeights;
use super::srb::SRBWeights;
use super::tdbn::TdBNParams;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MAGIC: &[u8; 4] = b"SNNT";
pub const VERSION: u16 = 1;
const DTYPE_F32: u8 = 0;

#[derive(Debug, Clone, PartialEq)]
pub struct NamedTensor {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<f32>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TensorContainer {
    pub tensors: Vec<NamedTensor>,
}

impl TensorContainer {
    pub fn push(&mut self, name: impl Into<String>, shape: Vec<usize>, data: Vec<f32>) -> Result<()> {
        let name = name.into();
        if shape.iter().product::<usize>() != data.len() {
            return Err(Error::ShapeMismatch(format!(
                "tensor {name}: shape {shape:?} vs {} values",
                data.len()
            )));
        }
        if self.get(&name).is_some() {
            return Err(Error::InvalidParam(format!("duplicate tensor {name}")));
        }
        self.tensors.push(NamedTensor { name, shape, data });
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&NamedTensor> {
        self.tensors.iter().find(|t| t.name == name)
    }

    fn require(&self, name: &str, rank: usize) -> Result<&NamedTensor> {
        let t = self
            .get(name)
            .ok_or_else(|| Error::format("tensor container", format!("missing tensor {name}")))?;
        if t.shape.len() != rank {
            return Err(Error::format(
                "tensor container",
                format!("{name} has rank {}, expected {rank}", t.shape.len()),
            ));
        }
        Ok(t)
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(MAGIC)?;
        out.write_all(&VERSION.to_le_bytes())?;
        out.write_all(&(self.tensors.len() as u32).to_le_bytes())?;
        for t in &self.tensors {
            let name = t.name.as_bytes();
            let len = u16::try_from(name.len()).map_err(|_| Error::InvalidParam("tensor name too long".into()))?;
            out.write_all(&len.to_le_bytes())?;
            out.write_all(name)?;
            out.write_all(&[DTYPE_F32, t.shape.len() as u8])?;
            for &d in &t.shape {
                out.write_all(&(d as u32).to_le_bytes())?;
            }
        }
        for t in &self.tensors {
            for v in &t.data {
                out.write_all(&v.to_le_bytes())?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn read<R: Read>(mut input: R) -> Result<Self> {
        let bad = |r: &str| Error::format("tensor container", r.to_string());
        let mut buf4 = [0u8; 4];
        let mut buf2 = [0u8; 2];
        let mut buf1 = [0u8; 1];
        input.read_exact(&mut buf4).map_err(|_| bad("truncated header"))?;
        if &buf4 != MAGIC {
            return Err(bad("bad magic"));
        }
        input.read_exact(&mut buf2).map_err(|_| bad("truncated header"))?;
        if u16::from_le_bytes(buf2) != VERSION {
            return Err(bad("unsupported version"));
        }
        input.read_exact(&mut buf4).map_err(|_| bad("truncated header"))?;
        let count = u32::from_le_bytes(buf4) as usize;
        let mut table = Vec::with_capacity(count.min(1024));
        for _ in 0..count {
            input.read_exact(&mut buf2).map_err(|_| bad("truncated table"))?;
            let mut name = vec![0u8; u16::from_le_bytes(buf2) as usize];
            input.read_exact(&mut name).map_err(|_| bad("truncated table"))?;
            let name = String::from_utf8(name).map_err(|_| bad("tensor name is not UTF-8"))?;
            input.read_exact(&mut buf1).map_err(|_| bad("truncated table"))?;
            if buf1[0] != DTYPE_F32 {
                return Err(bad("unsupported dtype"));
            }
            input.read_exact(&mut buf1).map_err(|_| bad("truncated table"))?;
            let mut shape = Vec::with_capacity(buf1[0] as usize);
            for _ in 0..buf1[0] {
                input.read_exact(&mut buf4).map_err(|_| bad("truncated table"))?;
                shape.push(u32::from_le_bytes(buf4) as usize);
            }
            table.push((name, shape));
        }
        let mut out = TensorContainer::default();
        for (name, shape) in table {
            let n: usize = shape.iter().product();
            let mut data = Vec::with_capacity(n);
            for _ in 0..n {
                input.read_exact(&mut buf4).map_err(|_| bad("truncated payload"))?;
                data.push(f32::from_le_bytes(buf4));
            }
            out.push(name, shape, data)?;
        }
        if input.read(&mut buf1)? != 0 {
            return Err(bad("trailing bytes"));
        }
        Ok(out)
    }
}

fn conv_to(c: &mut TensorContainer, prefix: &str, w: &ConvWeights<impl Real>) -> Result<()> {
    c.push(
        format!("{prefix}.weight"),
        w.weight.shape().to_vec(),
        w.weight.iter().map(|v| v.as_f64() as f32).collect(),
    )?;
    c.push(
        format!("{prefix}.bias"),
        vec![w.bias.len()],
        w.bias.iter().map(|v| v.as_f64() as f32).collect(),
    )
}

fn conv_from<S: Real>(c: &TensorContainer, prefix: &str) -> Result<ConvWeights<S>> {
    let w = c.require(&format!("{prefix}.weight"), 4)?;
    let b = c.require(&format!("{prefix}.bias"), 1)?;
    let s = &w.shape;
    let weight = Array4::from_shape_vec(
        (s[0], s[1], s[2], s[3]),
        w.data.iter().map(|&v| S::of(v as f64)).collect(),
    )
    .map_err(|e| Error::ShapeMismatch(e.to_string()))?;
    let bias = Array1::from_vec(b.data.iter().map(|&v| S::of(v as f64)).collect());
    let out = ConvWeights { weight, bias };
    out.validate()?;
    Ok(out)
}

fn scalar_from<S: Real>(c: &TensorContainer, name: &str) -> Result<S> {
    let t = c.require(name, 0)?;
    Ok(S::of(t.data[0] as f64))
}

fn vec_from<S: Real>(c: &TensorContainer, name: &str) -> Result<Vec<S>> {
    Ok(c.require(name, 1)?.data.iter().map(|&v| S::of(v as f64)).collect())
}

impl<S: Real> SRBWeights<S> {
    pub fn to_container(&self) -> Result<TensorContainer> {
        let mut c = TensorContainer::default();
        conv_to(&mut c, "scu1", &self.scu1)?;
        conv_to(&mut c, "scu2", &self.scu2)?;
        conv_to(&mut c, "shortcut", &self.shortcut)?;
        let f = |v: &S| v.as_f64() as f32;
        c.push("tdbn.alpha", vec![], vec![f(&self.tdbn.alpha)])?;
        c.push("tdbn.v_th", vec![], vec![f(&self.tdbn.v_th)])?;
        c.push("tdbn.epsilon", vec![], vec![f(&self.tdbn.epsilon)])?;
        c.push(
            "tdbn.lambda",
            vec![self.tdbn.lambda_k.len()],
            self.tdbn.lambda_k.iter().map(f).collect(),
        )?;
        c.push(
            "tdbn.beta",
            vec![self.tdbn.beta_k.len()],
            self.tdbn.beta_k.iter().map(f).collect(),
        )?;
        Ok(c)
    }

    pub fn from_container(c: &TensorContainer) -> Result<Self> {
        let w = Self {
            scu1: conv_from(c, "scu1")?,
            scu2: conv_from(c, "scu2")?,
            shortcut: conv_from(c, "shortcut")?,
            tdbn: TdBNParams {
                alpha: scalar_from(c, "tdbn.alpha")?,
                v_th: scalar_from(c, "tdbn.v_th")?,
                lambda_k: vec_from(c, "tdbn.lambda")?,
                beta_k: vec_from(c, "tdbn.beta")?,
                epsilon: scalar_from(c, "tdbn.epsilon")?,
            },
        };
        w.validate()?;
        Ok(w)
    }
}
