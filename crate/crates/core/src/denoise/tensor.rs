use super::DenoiseError;

/// Dense row-major array with an optional gradient buffer of the same size.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
    pub grad: Option<Vec<f64>>,
}

impl Tensor {
    pub fn zeros(shape: &[usize]) -> Self {
        Tensor { shape: shape.to_vec(), data: vec![0.0; shape.iter().product()], grad: None }
    }

    pub fn from_vec(shape: &[usize], data: Vec<f64>) -> Result<Self, DenoiseError> {
        let n: usize = shape.iter().product();
        if n != data.len() {
            return Err(DenoiseError::Shape(format!("shape {shape:?} needs {n} values, got {}", data.len())));
        }
        Ok(Tensor { shape: shape.to_vec(), data, grad: None })
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Sets the gradient buffer to zeros, allocating it if needed.
    pub fn zero_grad(&mut self) {
        match &mut self.grad {
            Some(g) => g.iter_mut().for_each(|v| *v = 0.0),
            None => self.grad = Some(vec![0.0; self.data.len()]),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_checked() {
        assert!(Tensor::from_vec(&[2, 3], vec![0.0; 6]).is_ok());
        assert!(matches!(Tensor::from_vec(&[2, 3], vec![0.0; 5]), Err(DenoiseError::Shape(_))));
        let mut t = Tensor::zeros(&[4]);
        t.zero_grad();
        assert_eq!(t.grad.as_ref().unwrap().len(), t.len());
    }
}
