//! Sparse raising maps between occupations, stored by source occupation.
//! Spin indices are interleaved: basis index `2 * occupation + spin`.

use crate::C64;

/// Real raising map acting as the identity on spin.
#[derive(Debug, Clone, Default)]
pub struct Ladder {
    ptr: Vec<usize>,
    target: Vec<u32>,
    value: Vec<f64>,
}

impl Ladder {
    pub(crate) fn new(sources: usize) -> Self {
        let mut ptr = Vec::with_capacity(sources + 1);
        ptr.push(0);
        Ladder {
            ptr,
            target: vec![],
            value: vec![],
        }
    }

    pub(crate) fn push(&mut self, _src: usize, tgt: usize, v: f64) {
        self.target.push(tgt as u32);
        self.value.push(v);
    }

    pub(crate) fn finish_source(&mut self) {
        self.ptr.push(self.target.len());
    }

    pub fn nnz(&self) -> usize {
        self.value.len()
    }

    pub fn sources(&self) -> usize {
        self.ptr.len() - 1
    }

    /// `y += s * A+ x`.
    pub fn raise(&self, s: f64, x: &[C64], y: &mut [C64]) {
        for src in 0..self.sources() {
            let (xu, xd) = (x[2 * src], x[2 * src + 1]);
            if xu == C64::new(0.0, 0.0) && xd == C64::new(0.0, 0.0) {
                continue;
            }
            for e in self.ptr[src]..self.ptr[src + 1] {
                let t = self.target[e] as usize;
                let v = s * self.value[e];
                y[2 * t] += xu * v;
                y[2 * t + 1] += xd * v;
            }
        }
    }

    /// `y += s * A- x` (the transpose).
    pub fn lower(&self, s: f64, x: &[C64], y: &mut [C64]) {
        for src in 0..self.sources() {
            let mut au = C64::new(0.0, 0.0);
            let mut ad = C64::new(0.0, 0.0);
            for e in self.ptr[src]..self.ptr[src + 1] {
                let t = self.target[e] as usize;
                au += x[2 * t] * self.value[e];
                ad += x[2 * t + 1] * self.value[e];
            }
            y[2 * src] += au * s;
            y[2 * src + 1] += ad * s;
        }
    }

    /// `acc[t] += sum_src |A+[t, src]|^2`: the diagonal of `A+ A-`.
    pub(crate) fn add_squared_column_sums(&self, acc: &mut [f64]) {
        for (t, v) in self.target.iter().zip(&self.value) {
            acc[*t as usize] += v * v;
        }
    }
}

/// Raising map with a 2x2 complex spin block per entry (row-major).
#[derive(Debug, Clone, Default)]
pub struct BlockLadder {
    ptr: Vec<usize>,
    target: Vec<u32>,
    block: Vec<[C64; 4]>,
}

impl BlockLadder {
    pub(crate) fn new(sources: usize) -> Self {
        let mut ptr = Vec::with_capacity(sources + 1);
        ptr.push(0);
        BlockLadder {
            ptr,
            target: vec![],
            block: vec![],
        }
    }

    pub(crate) fn push(&mut self, _src: usize, tgt: usize, b: [C64; 4]) {
        self.target.push(tgt as u32);
        self.block.push(b);
    }

    pub(crate) fn finish_source(&mut self) {
        self.ptr.push(self.target.len());
    }

    pub fn nnz(&self) -> usize {
        self.block.len()
    }

    pub fn sources(&self) -> usize {
        self.ptr.len() - 1
    }

    /// `y += s * L x`.
    pub fn raise(&self, s: f64, x: &[C64], y: &mut [C64]) {
        for src in 0..self.sources() {
            let (xu, xd) = (x[2 * src] * s, x[2 * src + 1] * s);
            for e in self.ptr[src]..self.ptr[src + 1] {
                let t = self.target[e] as usize;
                let b = &self.block[e];
                y[2 * t] += b[0] * xu + b[1] * xd;
                y[2 * t + 1] += b[2] * xu + b[3] * xd;
            }
        }
    }

    /// `y += s * (L + L^+) x` in one pass.
    pub fn apply_hermitian_sum(&self, s: f64, x: &[C64], y: &mut [C64]) {
        for src in 0..self.sources() {
            let (xu, xd) = (x[2 * src] * s, x[2 * src + 1] * s);
            let mut au = C64::new(0.0, 0.0);
            let mut ad = C64::new(0.0, 0.0);
            for e in self.ptr[src]..self.ptr[src + 1] {
                let t = self.target[e] as usize;
                let b = &self.block[e];
                y[2 * t] += b[0] * xu + b[1] * xd;
                y[2 * t + 1] += b[2] * xu + b[3] * xd;
                let (tu, td) = (x[2 * t], x[2 * t + 1]);
                au += b[0].conj() * tu + b[2].conj() * td;
                ad += b[1].conj() * tu + b[3].conj() * td;
            }
            y[2 * src] += au * s;
            y[2 * src + 1] += ad * s;
        }
    }
}
