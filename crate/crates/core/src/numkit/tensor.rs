use std::fmt;

use crate::{Error, Result};

use super::gemm;

/// Dense row-major f64 array with up to three extents.
#[derive(Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl fmt::Debug for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tensor")
            .field("shape", &self.shape)
            .field("data", &self.data)
            .finish()
    }
}

fn check_rank(shape: &[usize]) -> Result<()> {
    if shape.is_empty() || shape.len() > 3 {
        return Err(Error::shape(format!(
            "tensors have 1 to 3 extents, got {shape:?}"
        )));
    }
    Ok(())
}

impl Tensor {
    pub fn zeros(shape: &[usize]) -> Self {
        assert!(
            !shape.is_empty() && shape.len() <= 3,
            "tensors have 1 to 3 extents"
        );
        Tensor {
            shape: shape.to_vec(),
            data: vec![0.0; shape.iter().product()],
        }
    }

    pub fn from_vec(shape: &[usize], data: Vec<f64>) -> Result<Self> {
        check_rank(shape)?;
        let expected: usize = shape.iter().product();
        if expected != data.len() {
            return Err(Error::shape(format!(
                "shape {shape:?} needs {expected} values, got {}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("tensor construction".into()));
        }
        Ok(Tensor {
            shape: shape.to_vec(),
            data,
        })
    }

    /// Builds a 2-D tensor from equal-length rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::shape("ragged rows"));
        }
        Tensor::from_vec(&[rows.len(), cols], rows.concat())
    }

    pub fn vector(data: Vec<f64>) -> Result<Self> {
        let n = data.len();
        Tensor::from_vec(&[n], data)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Leading extent.
    pub fn rows(&self) -> usize {
        self.shape[0]
    }

    /// Number of values per leading index.
    pub fn row_len(&self) -> usize {
        self.shape[1..].iter().product()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.row_len();
        &self.data[i * w..(i + 1) * w]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let w = self.row_len();
        &mut self.data[i * w..(i + 1) * w]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn ensure_finite(&self, what: &str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite(what.to_string()))
        }
    }

    pub fn fill(&mut self, value: f64) {
        self.data.iter_mut().for_each(|v| *v = value);
    }

    pub fn sum_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    fn same_shape(&self, other: &Tensor, op: &str) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::shape(format!(
                "{op}: {:?} vs {:?}",
                self.shape, other.shape
            )));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Tensor, op: &str, f: impl Fn(f64, f64) -> f64) -> Result<Tensor> {
        self.same_shape(other, op)?;
        let data: Vec<f64> = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        let out = Tensor {
            shape: self.shape.clone(),
            data,
        };
        out.ensure_finite(op)?;
        Ok(out)
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    /// Elementwise (Hadamard) product.
    pub fn hadamard(&self, other: &Tensor) -> Result<Tensor> {
        self.zip_with(other, "hadamard", |a, b| a * b)
    }

    pub fn scale(&self, factor: f64) -> Result<Tensor> {
        let out = self.map(|v| v * factor);
        out.ensure_finite("scale")?;
        Ok(out)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Tensor {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// In-place `self += other`.
    pub fn add_assign(&mut self, other: &Tensor) -> Result<()> {
        self.same_shape(other, "add_assign")?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(())
    }

    /// Concatenates along the leading extent; 1-D inputs concatenate as vectors.
    pub fn concat(parts: &[&Tensor]) -> Result<Tensor> {
        let first = parts
            .first()
            .ok_or_else(|| Error::shape("concat of nothing"))?;
        let tail = &first.shape[1..];
        let mut rows = 0;
        let mut data = Vec::new();
        for p in parts {
            if &p.shape[1..] != tail {
                return Err(Error::shape(format!(
                    "concat: trailing extents {:?} vs {:?}",
                    &p.shape[1..],
                    tail
                )));
            }
            rows += p.shape[0];
            data.extend_from_slice(&p.data);
        }
        let mut shape = vec![rows];
        shape.extend_from_slice(tail);
        Ok(Tensor { shape, data })
    }

    pub fn transpose(&self) -> Result<Tensor> {
        let (r, c) = self.dims2("transpose")?;
        let mut out = vec![0.0; r * c];
        for i in 0..r {
            for j in 0..c {
                out[j * r + i] = self.data[i * c + j];
            }
        }
        Ok(Tensor {
            shape: vec![c, r],
            data: out,
        })
    }

    pub(crate) fn dims2(&self, op: &str) -> Result<(usize, usize)> {
        match self.shape.as_slice() {
            [r, c] => Ok((*r, *c)),
            s => Err(Error::shape(format!("{op}: expected a matrix, got {s:?}"))),
        }
    }

    /// Matrix product; a 1-D left operand is treated as a single row.
    pub fn matmul(&self, rhs: &Tensor) -> Result<Tensor> {
        let (n, p) = match self.shape.as_slice() {
            [p] => (1, *p),
            [n, p] => (*n, *p),
            s => return Err(Error::shape(format!("matmul: lhs {s:?}"))),
        };
        let (p2, q) = rhs.dims2("matmul")?;
        if p != p2 {
            return Err(Error::shape(format!(
                "matmul: {:?} x {:?}",
                self.shape, rhs.shape
            )));
        }
        let mut out = vec![0.0; n * q];
        gemm::gemm_acc(&self.data, &rhs.data, &mut out, n, p, q);
        let shape = if self.shape.len() == 1 {
            vec![q]
        } else {
            vec![n, q]
        };
        let out = Tensor { shape, data: out };
        out.ensure_finite("matmul")?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_product_is_noop() {
        let a = Tensor::from_rows(&[vec![1.0, 2.0, 3.0], vec![-4.0, 5.5, 6.0]]).unwrap();
        let eye = Tensor::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert_eq!(a.matmul(&eye).unwrap(), a);
    }

    #[test]
    fn hadamard_and_concat() {
        let a = Tensor::vector(vec![1.0, -1.0]).unwrap();
        let b = Tensor::vector(vec![-1.0, -1.0]).unwrap();
        assert_eq!(a.hadamard(&b).unwrap().data(), &[-1.0, 1.0]);

        let c = Tensor::vector(vec![1.0]).unwrap();
        let d = Tensor::vector(vec![2.0, 3.0]).unwrap();
        assert_eq!(Tensor::concat(&[&c, &d]).unwrap().data(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn shape_errors() {
        let a = Tensor::zeros(&[2, 3]);
        let b = Tensor::zeros(&[3, 2]);
        assert!(matches!(a.add(&b), Err(Error::Shape(_))));
        assert!(matches!(a.matmul(&a), Err(Error::Shape(_))));
        assert!(Tensor::from_vec(&[2, 2], vec![0.0; 3]).is_err());
        assert!(Tensor::from_vec(&[1, 1, 1, 1], vec![0.0]).is_err());
    }

    #[test]
    fn non_finite_is_rejected() {
        assert!(matches!(
            Tensor::vector(vec![f64::NAN]),
            Err(Error::NonFinite(_))
        ));
        let big = Tensor::vector(vec![f64::MAX]).unwrap();
        assert!(matches!(big.add(&big), Err(Error::NonFinite(_))));
    }

    #[test]
    fn matmul_vector_times_matrix() {
        let x = Tensor::vector(vec![1.0, 2.0]).unwrap();
        let w = Tensor::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
        let y = x.matmul(&w).unwrap();
        assert_eq!(y.shape(), &[1]);
        assert_eq!(y.data(), &[3.0]);
    }

    #[test]
    fn transpose_round_trip() {
        let a = Tensor::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let t = a.transpose().unwrap();
        assert_eq!(t.shape(), &[3, 2]);
        assert_eq!(t.row(2), &[3.0, 6.0]);
        assert_eq!(t.transpose().unwrap(), a);
    }
}
