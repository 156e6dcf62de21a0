//! Orthonormal DST-I / DCT-I pairs built on a complex FFT.
//!
//! The sine transform acts on the interior samples `1..N-1` with zeros
//! implied at `j = 0` and `j = N`; it is orthonormal and its own inverse.
//!
//! The cosine transform acts on all `N` stored samples with even reflection
//! at both ends. Its eigenvectors `cos(πmj/(N-1))` are orthogonal under the
//! trapezoid inner product (end samples weighted ½), so the field is scaled
//! by `√w_j` before the symmetric DCT-I. The pair is unitary from that
//! weighted norm (see [`cosine_norm`]) to the plain L2 norm of the
//! coefficients, and sampled cosines map to single coefficients.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{PeError, Result};
use crate::field::{Basis, FieldSpectrum, ReducedField};

/// FFT plans for one column length. Cheap to clone; plans are shared.
#[derive(Clone)]
pub struct Transformer {
    n: usize,
    sine_fft: Arc<dyn Fft<f64>>,
    cosine_fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Transformer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transformer").field("n", &self.n).finish()
    }
}

impl Transformer {
    pub fn new(n: usize) -> Self {
        assert!(n >= 4, "column length {n} too small");
        let mut planner = FftPlanner::new();
        Self { n, sine_fft: planner.plan_fft_forward(2 * n), cosine_fft: planner.plan_fft_forward(2 * (n - 1)) }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(PeError::LengthMismatch { expected: self.n, actual: len });
        }
        Ok(())
    }

    /// In-place orthonormal DST-I. `data[0]` is ignored on input and zeroed
    /// on output.
    pub fn dst_in_place(&self, data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let n = self.n;
        debug_assert_eq!(data.len(), n);
        scratch.clear();
        scratch.resize(2 * n, Complex64::new(0.0, 0.0));
        for j in 1..n {
            scratch[j] = data[j];
            scratch[2 * n - j] = -data[j];
        }
        self.sine_fft.process(scratch);
        // FFT of the odd extension is -2i·Σ u_j sin(πjm/N).
        let scale = Complex64::new(0.0, 0.5 * (2.0 / n as f64).sqrt());
        data[0] = Complex64::new(0.0, 0.0);
        for m in 1..n {
            data[m] = scratch[m] * scale;
        }
    }

    /// In-place orthonormal DCT-I over all `N` samples.
    pub fn dct_in_place(&self, data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let n = self.n;
        let l = n - 1;
        debug_assert_eq!(data.len(), n);
        scratch.clear();
        scratch.resize(2 * l, Complex64::new(0.0, 0.0));
        let sqrt2 = std::f64::consts::SQRT_2;
        scratch[0] = data[0] * sqrt2;
        scratch[l] = data[l] * sqrt2;
        for j in 1..l {
            scratch[j] = data[j];
            scratch[2 * l - j] = data[j];
        }
        self.cosine_fft.process(scratch);
        let scale = (2.0 / l as f64).sqrt() * 0.5;
        for m in 0..n {
            let c = if m == 0 || m == l { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 };
            data[m] = scratch[m] * (scale * c);
        }
    }

    /// Field to cosine coefficients: symmetric DCT-I of `√w·u`.
    pub fn cosine_forward_in_place(&self, data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let l = self.n - 1;
        data[0] *= FRAC_1_SQRT_2;
        data[l] *= FRAC_1_SQRT_2;
        self.dct_in_place(data, scratch);
    }

    /// Inverse of [`Transformer::cosine_forward_in_place`].
    pub fn cosine_inverse_in_place(&self, data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let l = self.n - 1;
        self.dct_in_place(data, scratch);
        data[0] *= SQRT_2;
        data[l] *= SQRT_2;
    }

    pub fn sine_transform(&self, field: &ReducedField) -> Result<FieldSpectrum> {
        self.check(field.len())?;
        let mut c = field.samples.clone();
        self.dst_in_place(&mut c, &mut Vec::new());
        Ok(FieldSpectrum { basis: Basis::Sine, coefficients: c })
    }

    pub fn inverse_sine_transform(&self, spec: &FieldSpectrum, range: f64) -> Result<ReducedField> {
        self.check(spec.coefficients.len())?;
        if spec.basis != Basis::Sine {
            return Err(PeError::Unsupported("expected a sine spectrum".into()));
        }
        let mut u = spec.coefficients.clone();
        self.dst_in_place(&mut u, &mut Vec::new());
        Ok(ReducedField::new(range, u))
    }

    pub fn cosine_transform(&self, field: &ReducedField) -> Result<FieldSpectrum> {
        self.check(field.len())?;
        let mut c = field.samples.clone();
        self.cosine_forward_in_place(&mut c, &mut Vec::new());
        Ok(FieldSpectrum { basis: Basis::Cosine, coefficients: c })
    }

    pub fn inverse_cosine_transform(&self, spec: &FieldSpectrum, range: f64) -> Result<ReducedField> {
        self.check(spec.coefficients.len())?;
        if spec.basis != Basis::Cosine {
            return Err(PeError::Unsupported("expected a cosine spectrum".into()));
        }
        let mut u = spec.coefficients.clone();
        self.cosine_inverse_in_place(&mut u, &mut Vec::new());
        Ok(ReducedField::new(range, u))
    }
}

/// Trapezoid-weighted L2 norm (end samples weighted ½), the norm the cosine
/// transform preserves.
pub fn cosine_norm(u: &[Complex64]) -> f64 {
    let n = u.len();
    let full: f64 = u.iter().map(|c| c.norm_sqr()).sum();
    (full - 0.5 * (u[0].norm_sqr() + u[n - 1].norm_sqr())).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{l2_norm, relative_l2};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Direct O(N²) sums, independent of the FFT route.
    fn dst_direct(u: &[Complex64]) -> Vec<Complex64> {
        let n = u.len();
        let s = (2.0 / n as f64).sqrt();
        (0..n)
            .map(|m| {
                if m == 0 {
                    return c(0.0);
                }
                (1..n).map(|j| u[j] * (PI * (j * m) as f64 / n as f64).sin()).sum::<Complex64>() * s
            })
            .collect()
    }

    fn dct_direct(u: &[Complex64]) -> Vec<Complex64> {
        let n = u.len();
        let l = n - 1;
        let w = |j: usize| if j == 0 || j == l { 0.5f64.sqrt() } else { 1.0 };
        (0..n)
            .map(|m| {
                (0..n).map(|j| u[j] * (w(j) * w(j) * (PI * (j * m) as f64 / l as f64).cos())).sum::<Complex64>()
                    * ((2.0 / l as f64).sqrt() * w(m))
            })
            .collect()
    }

    #[test]
    fn sine_eigenmode_has_single_coefficient() {
        let n = 64;
        let t = Transformer::new(n);
        let u: Vec<_> = (0..n).map(|j| c((PI * j as f64 / n as f64).sin())).collect();
        let s = t.sine_transform(&ReducedField::new(0.0, u)).unwrap();
        let peak = s.coefficients[1].norm();
        assert!(peak > 1.0);
        for (m, v) in s.coefficients.iter().enumerate() {
            if m != 1 {
                assert!(v.norm() < 1e-12 * peak, "mode {m}: {v}");
            }
        }
    }

    #[test]
    fn cosine_eigenmodes() {
        let n = 64;
        let t = Transformer::new(n);
        let constant = ReducedField::new(0.0, vec![c(1.0); n]);
        let s = t.cosine_transform(&constant).unwrap();
        for (m, v) in s.coefficients.iter().enumerate().skip(1) {
            assert!(v.norm() < 1e-12, "mode {m}: {v}");
        }
        assert!(s.coefficients[0].norm() > 1.0);

        let span = (n - 1) as f64;
        let u: Vec<_> = (0..n).map(|j| c((PI * j as f64 / span).cos())).collect();
        let s = t.cosine_transform(&ReducedField::new(0.0, u)).unwrap();
        for (m, v) in s.coefficients.iter().enumerate() {
            if m != 1 {
                assert!(v.norm() < 1e-12, "mode {m}: {v}");
            }
        }
    }

    #[test]
    fn fft_route_matches_direct_sums() {
        let n = 32;
        let t = Transformer::new(n);
        let u: Vec<_> = (0..n).map(|j| Complex64::new((j as f64 * 0.37).sin(), (j as f64 * 1.3).cos())).collect();
        let f = ReducedField::new(0.0, u.clone());
        let s = t.sine_transform(&f).unwrap().coefficients;
        let d = dst_direct(&u);
        assert!(relative_l2(&s, &d) < 1e-13);
        let s = t.cosine_transform(&f).unwrap().coefficients;
        let d = dct_direct(&u);
        assert!(relative_l2(&s, &d) < 1e-13);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let t = Transformer::new(64);
        let f = ReducedField::zeros(0.0, 32);
        assert!(matches!(t.sine_transform(&f), Err(PeError::LengthMismatch { .. })));
        assert!(t.cosine_transform(&f).is_err());
    }

    fn field_strategy(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
            .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
    }

    proptest! {
        #[test]
        fn sine_round_trip_and_unitary(mut u in field_strategy(64)) {
            u[0] = c(0.0);
            let t = Transformer::new(64);
            let f = ReducedField::new(0.0, u.clone());
            let s = t.sine_transform(&f).unwrap();
            prop_assert!((l2_norm(&s.coefficients) / l2_norm(&u) - 1.0).abs() < 1e-12);
            let back = t.inverse_sine_transform(&s, 0.0).unwrap();
            prop_assert!(relative_l2(&back.samples, &u) < 1e-12);
        }

        #[test]
        fn cosine_round_trip_and_unitary(u in field_strategy(64)) {
            let t = Transformer::new(64);
            let f = ReducedField::new(0.0, u.clone());
            let s = t.cosine_transform(&f).unwrap();
            prop_assert!((l2_norm(&s.coefficients) / cosine_norm(&u) - 1.0).abs() < 1e-12);
            let back = t.inverse_cosine_transform(&s, 0.0).unwrap();
            prop_assert!(relative_l2(&back.samples, &u) < 1e-12);
        }

        #[test]
        fn sine_is_linear(u in field_strategy(32), v in field_strategy(32), a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let t = Transformer::new(32);
            let mix: Vec<_> = u.iter().zip(&v).map(|(x, y)| x * a + y * b).collect();
            let su = t.sine_transform(&ReducedField::new(0.0, u)).unwrap().coefficients;
            let sv = t.sine_transform(&ReducedField::new(0.0, v)).unwrap().coefficients;
            let smix = t.sine_transform(&ReducedField::new(0.0, mix)).unwrap().coefficients;
            let expect: Vec<_> = su.iter().zip(&sv).map(|(x, y)| x * a + y * b).collect();
            let scale = l2_norm(&expect).max(1e-300);
            let err: f64 = smix.iter().zip(&expect).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(err <= 1e-12 * scale.max(1.0));
        }
    }
}
