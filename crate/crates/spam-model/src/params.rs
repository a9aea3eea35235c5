//! Named parameter storage shared by forward passes, the optimizer and
//! checkpoints. Registration order is fixed, so iteration, gradient
//! accumulation and serialization are all deterministic.

use rand::Rng;

use crate::mat::Mat;
use crate::real::Real;

/// Handle to one parameter tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamId(pub usize);

#[derive(Debug, Clone)]
pub struct ParamEntry<T> {
    pub name: String,
    pub value: Mat<T>,
    pub frozen: bool,
}

#[derive(Debug, Clone)]
pub struct ParamSet<T> {
    entries: Vec<ParamEntry<T>>,
}

impl<T: Real> ParamSet<T> {
    pub fn new() -> Self {
        ParamSet {
            entries: Vec::new(),
        }
    }

    pub fn register(&mut self, name: &str, value: Mat<T>, frozen: bool) -> ParamId {
        debug_assert!(
            !self.entries.iter().any(|e| e.name == name),
            "duplicate parameter {name}"
        );
        self.entries.push(ParamEntry {
            name: name.to_string(),
            value,
            frozen,
        });
        ParamId(self.entries.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ParamEntry<T>] {
        &self.entries
    }

    pub fn value(&self, id: ParamId) -> &Mat<T> {
        &self.entries[id.0].value
    }

    pub fn value_mut(&mut self, id: ParamId) -> &mut Mat<T> {
        &mut self.entries[id.0].value
    }

    pub fn id_of(&self, name: &str) -> Option<ParamId> {
        self.entries
            .iter()
            .position(|e| e.name == name)
            .map(ParamId)
    }

    /// Total count of scalar parameters.
    pub fn scalar_count(&self) -> usize {
        self.entries.iter().map(|e| e.value.data.len()).sum()
    }

    pub fn widen_f64(&self) -> ParamSet<f64> {
        ParamSet {
            entries: self
                .entries
                .iter()
                .map(|e| ParamEntry {
                    name: e.name.clone(),
                    value: e.value.to_f64(),
                    frozen: e.frozen,
                })
                .collect(),
        }
    }
}

impl<T: Real> Default for ParamSet<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Per-parameter gradient buffers, aligned with a `ParamSet`.
#[derive(Debug, Clone)]
pub struct Grads<T> {
    pub mats: Vec<Mat<T>>,
}

impl<T: Real> Grads<T> {
    pub fn zeros_like(params: &ParamSet<T>) -> Self {
        Grads {
            mats: params
                .entries()
                .iter()
                .map(|e| Mat::zeros(e.value.rows, e.value.cols))
                .collect(),
        }
    }

    pub fn zero(&mut self) {
        for m in &mut self.mats {
            for v in &mut m.data {
                *v = T::zero();
            }
        }
    }

    /// Global L2 norm over non-frozen parameters.
    pub fn global_norm(&self, params: &ParamSet<T>) -> f64 {
        let mut acc = 0.0f64;
        for (m, e) in self.mats.iter().zip(params.entries()) {
            if e.frozen {
                continue;
            }
            for v in &m.data {
                let x = v.to_f64c();
                acc += x * x;
            }
        }
        acc.sqrt()
    }
}

/// Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
pub fn linear_init<T: Real>(rng: &mut impl Rng, rows: usize, cols: usize) -> Mat<T> {
    let bound = 1.0 / (rows as f64).sqrt();
    Mat::from_fn(rows, cols, |_, _| {
        T::from_f64c(rng.gen_range(-bound..bound))
    })
}

/// Uniform init in [-scale, scale] for embedding tables.
pub fn table_init<T: Real>(rng: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> Mat<T> {
    Mat::from_fn(rows, cols, |_, _| {
        T::from_f64c(rng.gen_range(-scale..scale))
    })
}
