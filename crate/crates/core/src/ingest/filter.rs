use num_complex::Complex64;

use super::{BandpassSpec, Signal};
use crate::error::Result;

/// A second-order section `b(z)/a(z)` with `a[0] == 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sos {
    pub b: [f64; 3],
    pub a: [f64; 3],
}

impl Sos {
    fn response(&self, omega: f64) -> Complex64 {
        let z1 = Complex64::from_polar(1.0, -omega);
        let z2 = z1 * z1;
        (self.b[0] + z1 * self.b[1] + z2 * self.b[2]) / (self.a[0] + z1 * self.a[1] + z2 * self.a[2])
    }

    /// Direct-form II transposed state that a constant unit input holds.
    fn step_state(&self) -> ([f64; 2], f64) {
        let gain = (self.b[0] + self.b[1] + self.b[2]) / (self.a[0] + self.a[1] + self.a[2]);
        let z2 = self.b[2] - self.a[2] * gain;
        let z1 = self.b[1] - self.a[1] * gain + z2;
        ([z1, z2], gain)
    }
}

/// Butterworth band-pass realized as cascaded biquads via the bilinear
/// transform with frequency prewarping.
#[derive(Debug, Clone, PartialEq)]
pub struct ButterworthBandpass {
    sections: Vec<Sos>,
    sample_rate: f64,
    order: usize,
    zero_phase: bool,
}

impl ButterworthBandpass {
    pub fn design(spec: &BandpassSpec, sample_rate: f64) -> Result<Self> {
        spec.validate(sample_rate)?;
        let n = spec.filter_order;
        let fs2 = 2.0 * sample_rate;
        let warp = |f: f64| fs2 * (std::f64::consts::PI * f / sample_rate).tan();
        let (w1, w2) = (warp(spec.low_cut), warp(spec.high_cut));
        let w0 = (w1 * w2).sqrt();
        let bw = w2 - w1;

        let bilinear = |s: Complex64| (fs2 + s) / (fs2 - s);
        let lp_to_bp = |p: Complex64| {
            let half = p * (bw / 2.0);
            let root = (half * half - w0 * w0).sqrt();
            (half + root, half - root)
        };

        // pole pairs in the z-plane, one pair per section
        let mut pairs: Vec<(Complex64, Complex64)> = Vec::with_capacity(n);
        for k in 0..n {
            let theta = std::f64::consts::PI * (2 * k + n + 1) as f64 / (2 * n) as f64;
            let p = Complex64::from_polar(1.0, theta);
            if p.im > 1e-12 {
                let (s1, s2) = lp_to_bp(p);
                let (z1, z2) = (bilinear(s1), bilinear(s2));
                pairs.push((z1, z1.conj()));
                pairs.push((z2, z2.conj()));
            } else if p.im.abs() <= 1e-12 {
                let (s1, s2) = lp_to_bp(Complex64::new(p.re, 0.0));
                pairs.push((bilinear(s1), bilinear(s2)));
            }
        }

        // the analog band-pass has unit gain at w0, which maps here
        let center = 2.0 * (w0 / fs2).atan();
        let sections = pairs
            .into_iter()
            .map(|(p, q)| {
                let mut sos = Sos {
                    b: [1.0, 0.0, -1.0],
                    a: [1.0, -(p + q).re, (p * q).re],
                };
                let g = sos.response(center).norm();
                sos.b.iter_mut().for_each(|c| *c /= g);
                sos
            })
            .collect();

        Ok(ButterworthBandpass {
            sections,
            sample_rate,
            order: n,
            zero_phase: spec.zero_phase,
        })
    }

    pub fn sections(&self) -> &[Sos] {
        &self.sections
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    /// Complex response of a single forward pass at `freq` Hz.
    pub fn frequency_response(&self, freq: f64) -> Complex64 {
        let omega = 2.0 * std::f64::consts::PI * freq / self.sample_rate;
        self.sections.iter().map(|s| s.response(omega)).product()
    }

    /// One causal pass starting from an all-zero state.
    pub fn filter_forward(&self, input: &[f64]) -> Vec<f64> {
        let mut out = input.to_vec();
        for sos in &self.sections {
            run_section(sos, &mut out, [0.0, 0.0]);
        }
        out
    }

    /// Forward-backward filtering with odd reflection padding and
    /// steady-state initial conditions on both passes.
    pub fn filter_zero_phase(&self, input: &[f64]) -> Vec<f64> {
        let n = input.len();
        if n < 2 {
            return input.to_vec();
        }
        let pad = (3 * (2 * self.order + 1)).min(n - 1);
        let (first, last) = (input[0], input[n - 1]);
        let mut ext = Vec::with_capacity(n + 2 * pad);
        ext.extend((1..=pad).rev().map(|i| 2.0 * first - input[i]));
        ext.extend_from_slice(input);
        ext.extend((1..=pad).map(|i| 2.0 * last - input[n - 1 - i]));

        self.steady_pass(&mut ext);
        ext.reverse();
        self.steady_pass(&mut ext);
        ext.reverse();
        ext[pad..pad + n].to_vec()
    }

    fn steady_pass(&self, data: &mut [f64]) {
        let mut level = data[0];
        for sos in &self.sections {
            let (state, gain) = sos.step_state();
            run_section(sos, data, [state[0] * level, state[1] * level]);
            level *= gain;
        }
    }

    pub fn apply(&self, input: &[f64]) -> Vec<f64> {
        if self.zero_phase {
            self.filter_zero_phase(input)
        } else {
            self.filter_forward(input)
        }
    }
}

fn run_section(sos: &Sos, data: &mut [f64], mut z: [f64; 2]) {
    let [b0, b1, b2] = sos.b;
    let [_, a1, a2] = sos.a;
    for x in data.iter_mut() {
        let input = *x;
        let y = b0 * input + z[0];
        z[0] = b1 * input - a1 * y + z[1];
        z[1] = b2 * input - a2 * y;
        *x = y;
    }
}

/// Band-pass filters a signal, preserving its length, label and identifier.
pub fn bandpass(signal: &Signal, spec: &BandpassSpec) -> Result<Signal> {
    let filter = ButterworthBandpass::design(spec, signal.sample_rate())?;
    signal.with_samples(filter.apply(signal.samples()))
}
