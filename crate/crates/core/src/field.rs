use num_complex::Complex64;

/// Complex vertical field column `u(x, z_j)` at one range, ground first.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedField {
    pub range: f64,
    pub samples: Vec<Complex64>,
}

impl ReducedField {
    pub fn new(range: f64, samples: Vec<Complex64>) -> Self {
        Self { range, samples }
    }

    pub fn zeros(range: f64, n: usize) -> Self {
        Self::new(range, vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.samples)
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Which eigenbasis a spectrum is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// Odd about the ground; modes `1..N-1`.
    Sine,
    /// Even about the ground; modes `0..N-1`.
    Cosine,
}

/// Spectral coefficients of a [`ReducedField`].
///
/// For the sine basis `coefficients[j]` is mode `j` and entry 0 is unused
/// (always zero), so both bases index modes directly.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSpectrum {
    pub basis: Basis,
    pub coefficients: Vec<Complex64>,
}

pub fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖a - b‖₂ / ‖b‖₂`.
pub fn relative_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}
