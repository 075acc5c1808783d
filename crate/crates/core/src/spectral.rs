//! Fourier differentiation on periodic 2D lattices.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Angular wavenumbers for an `n`-point periodic axis of spacing `h`, in FFT order.
/// Odd `n` has no Nyquist bin; for even `n` the Nyquist bin is zeroed on odd derivatives.
pub fn wavenumbers(n: usize, h: f64) -> Vec<f64> {
    let period = n as f64 * h;
    (0..n)
        .map(|m| {
            let s = if m <= (n - 1) / 2 { m as f64 } else { m as f64 - n as f64 };
            2.0 * PI * s / period
        })
        .collect()
}

fn ik_power(k: f64, order: u32, nyquist: bool) -> Complex64 {
    if order == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if nyquist && order % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new(0.0, k).powu(order)
}

/// Plans and wavenumbers for a `nq x np` array stored row-major with q as the slow index.
pub struct Spectral2 {
    nq: usize,
    np: usize,
    fq: Arc<dyn Fft<f64>>,
    iq: Arc<dyn Fft<f64>>,
    fp: Arc<dyn Fft<f64>>,
    ip: Arc<dyn Fft<f64>>,
    kq: Vec<f64>,
    kp: Vec<f64>,
    scratch: Vec<Complex64>,
    transposed: Vec<Complex64>,
}

impl Spectral2 {
    pub fn new(nq: usize, np: usize, dq: f64, dp: f64) -> Self {
        let mut planner = FftPlanner::new();
        let fq = planner.plan_fft_forward(nq);
        let iq = planner.plan_fft_inverse(nq);
        let fp = planner.plan_fft_forward(np);
        let ip = planner.plan_fft_inverse(np);
        let scratch_len = [&fq, &iq, &fp, &ip].iter().map(|f| f.get_inplace_scratch_len()).max().unwrap_or(0);
        Spectral2 {
            nq,
            np,
            fq,
            iq,
            fp,
            ip,
            kq: wavenumbers(nq, dq),
            kp: wavenumbers(np, dp),
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            transposed: vec![Complex64::new(0.0, 0.0); nq * np],
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nq, self.np)
    }

    pub fn kq(&self) -> &[f64] {
        &self.kq
    }

    pub fn kp(&self) -> &[f64] {
        &self.kp
    }

    fn transform(&mut self, data: &mut [Complex64], forward: bool) {
        let (nq, np) = (self.nq, self.np);
        assert_eq!(data.len(), nq * np);
        let (along_p, along_q) = if forward { (&self.fp, &self.fq) } else { (&self.ip, &self.iq) };
        along_p.process_with_scratch(data, &mut self.scratch);
        for i in 0..nq {
            for j in 0..np {
                self.transposed[j * nq + i] = data[i * np + j];
            }
        }
        along_q.process_with_scratch(&mut self.transposed, &mut self.scratch);
        for j in 0..np {
            for i in 0..nq {
                data[i * np + j] = self.transposed[j * nq + i];
            }
        }
    }

    /// Unnormalised forward transform in place.
    pub fn forward(&mut self, data: &mut Array2<Complex64>) {
        let slice = data.as_slice_mut().expect("standard layout");
        self.transform(slice, true);
    }

    /// Inverse transform in place, including the `1/(nq*np)` factor.
    pub fn inverse(&mut self, data: &mut Array2<Complex64>) {
        let scale = 1.0 / (self.nq * self.np) as f64;
        let slice = data.as_slice_mut().expect("standard layout");
        self.transform(slice, false);
        for v in slice.iter_mut() {
            *v *= scale;
        }
    }

    /// Spectral multiplier of `d_q^a d_p^b`.
    pub fn multiplier(&self, a: u32, b: u32) -> Array2<Complex64> {
        let nyq_q = self.nq.is_multiple_of(2);
        let nyq_p = self.np.is_multiple_of(2);
        Array2::from_shape_fn((self.nq, self.np), |(i, j)| {
            let nq_bin = nyq_q && i == self.nq / 2;
            let np_bin = nyq_p && j == self.np / 2;
            ik_power(self.kq[i], a, nq_bin) * ik_power(self.kp[j], b, np_bin)
        })
    }

    /// `d_q^a d_p^b f` for a single field.
    pub fn derivative(&mut self, f: &Array2<Complex64>, a: u32, b: u32) -> Array2<Complex64> {
        let mut spec = f.clone();
        self.forward(&mut spec);
        spec *= &self.multiplier(a, b);
        self.inverse(&mut spec);
        spec
    }
}
