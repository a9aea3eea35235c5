//! Reverse-mode automatic differentiation over a linear tape.
//!
//! Each forward call appends one node holding its value and the
//! information backward needs. `backward` walks the tape once in
//! reverse, accumulating adjoints per node and gradients per parameter.
//! Node evaluation order is the construction order, so values and
//! gradients are bit-reproducible.

use crate::mat::{add_assign, dot, matmul, matmul_acc, matmul_nt, matmul_nt_acc, matmul_tn_acc, Mat};
use crate::params::{Grads, ParamId, ParamSet};
use crate::real::Real;

/// Handle to a tape node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

enum Op<T> {
    Input,
    Param(ParamId),
    MatMul(Var, Var),
    /// a * b^T
    MatMulNT(Var, Var),
    Add(Var, Var),
    Sub(Var, Var),
    MulElem(Var, Var),
    /// rows of `a` plus the single row of `v`
    AddRow(Var, Var),
    Scale(Var, T),
    Tanh(Var),
    SoftmaxRows(Var),
    LayerNorm {
        x: Var,
        gain: Var,
        bias: Var,
        eps: T,
    },
    MeanRows(Var),
    MeanAll(Var),
    RowSum(Var),
    L2NormalizeRows(Var),
    GatherRows {
        table: Var,
        ids: Vec<usize>,
    },
    SliceCols {
        x: Var,
        start: usize,
    },
    ConcatCols(Vec<Var>),
    Conv1dK3 {
        x: Var,
        w: Var,
        b: Var,
    },
    /// elementwise product with a constant (dropout masks, positive masks)
    MulConst(Var, Mat<T>),
    LogSumExpRows(Var),
    SqrtEps(Var, T),
    /// mean of elementwise Huber losses over masked entries of a column
    /// vector against constant targets
    HuberVec {
        pred: Var,
        targets: Mat<T>,
        mask: Vec<bool>,
        delta: T,
    },
}

struct Node<T> {
    value: Mat<T>,
    op: Op<T>,
}

pub struct Tape<T> {
    nodes: Vec<Node<T>>,
}

impl<T: Real> Tape<T> {
    pub fn new() -> Self {
        Tape { nodes: Vec::new() }
    }

    fn push(&mut self, value: Mat<T>, op: Op<T>) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    pub fn value(&self, v: Var) -> &Mat<T> {
        &self.nodes[v.0].value
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn input(&mut self, m: Mat<T>) -> Var {
        self.push(m, Op::Input)
    }

    pub fn param(&mut self, params: &ParamSet<T>, id: ParamId) -> Var {
        self.push(params.value(id).clone(), Op::Param(id))
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Var {
        let value = matmul(self.value(a), self.value(b));
        self.push(value, Op::MatMul(a, b))
    }

    pub fn matmul_nt(&mut self, a: Var, b: Var) -> Var {
        let value = matmul_nt(self.value(a), self.value(b));
        self.push(value, Op::MatMulNT(a, b))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        let (ma, mb) = (self.value(a), self.value(b));
        debug_assert_eq!((ma.rows, ma.cols), (mb.rows, mb.cols));
        let data = ma.data.iter().zip(&mb.data).map(|(&x, &y)| x + y).collect();
        let value = Mat::from_vec(ma.rows, ma.cols, data);
        self.push(value, Op::Add(a, b))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        let (ma, mb) = (self.value(a), self.value(b));
        debug_assert_eq!((ma.rows, ma.cols), (mb.rows, mb.cols));
        let data = ma.data.iter().zip(&mb.data).map(|(&x, &y)| x - y).collect();
        let value = Mat::from_vec(ma.rows, ma.cols, data);
        self.push(value, Op::Sub(a, b))
    }

    pub fn mul_elem(&mut self, a: Var, b: Var) -> Var {
        let (ma, mb) = (self.value(a), self.value(b));
        debug_assert_eq!((ma.rows, ma.cols), (mb.rows, mb.cols));
        let data = ma.data.iter().zip(&mb.data).map(|(&x, &y)| x * y).collect();
        let value = Mat::from_vec(ma.rows, ma.cols, data);
        self.push(value, Op::MulElem(a, b))
    }

    /// Broadcast-add a 1 x C row vector to every row.
    pub fn add_row(&mut self, a: Var, v: Var) -> Var {
        let (ma, mv) = (self.value(a), self.value(v));
        debug_assert_eq!(mv.rows, 1);
        debug_assert_eq!(ma.cols, mv.cols);
        let mut value = ma.clone();
        for i in 0..value.rows {
            for (o, &x) in value.row_mut(i).iter_mut().zip(&mv.data) {
                *o = *o + x;
            }
        }
        self.push(value, Op::AddRow(a, v))
    }

    pub fn scale(&mut self, a: Var, c: T) -> Var {
        let value = self.value(a).map(|v| v * c);
        self.push(value, Op::Scale(a, c))
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let value = self.value(a).map(|v| v.tanh());
        self.push(value, Op::Tanh(a))
    }

    pub fn softmax_rows(&mut self, a: Var) -> Var {
        let ma = self.value(a);
        let mut value = ma.clone();
        for i in 0..value.rows {
            let row = value.row_mut(i);
            let max = row.iter().cloned().fold(T::neg_infinity(), T::max);
            let mut sum = T::zero();
            for v in row.iter_mut() {
                *v = (*v - max).exp();
                sum = sum + *v;
            }
            for v in row.iter_mut() {
                *v = *v / sum;
            }
        }
        self.push(value, Op::SoftmaxRows(a))
    }

    /// Per-row layer normalization with learned gain and bias (1 x C each).
    pub fn layer_norm(&mut self, x: Var, gain: Var, bias: Var, eps: f64) -> Var {
        let eps = T::from_f64c(eps);
        let (mx, mg, mb) = (self.value(x), self.value(gain), self.value(bias));
        debug_assert_eq!(mg.rows, 1);
        debug_assert_eq!(mb.rows, 1);
        let cols = mx.cols;
        let inv_c = T::from_f64c(1.0 / cols as f64);
        let mut value = Mat::zeros(mx.rows, cols);
        for i in 0..mx.rows {
            let row = mx.row(i);
            let mut mean = T::zero();
            for &v in row {
                mean = mean + v;
            }
            mean = mean * inv_c;
            let mut var = T::zero();
            for &v in row {
                let d = v - mean;
                var = var + d * d;
            }
            var = var * inv_c;
            let inv_std = T::one() / (var + eps).sqrt();
            let out = value.row_mut(i);
            for j in 0..cols {
                let xhat = (row[j] - mean) * inv_std;
                out[j] = xhat * mg.data[j] + mb.data[j];
            }
        }
        self.push(value, Op::LayerNorm { x, gain, bias, eps })
    }

    pub fn mean_rows(&mut self, a: Var) -> Var {
        let ma = self.value(a);
        let n = T::from_f64c(ma.rows as f64);
        let mut value = Mat::zeros(1, ma.cols);
        for i in 0..ma.rows {
            for (o, &v) in value.row_mut(0).iter_mut().zip(ma.row(i)) {
                *o = *o + v;
            }
        }
        for v in &mut value.data {
            *v = *v / n;
        }
        self.push(value, Op::MeanRows(a))
    }

    pub fn mean_all(&mut self, a: Var) -> Var {
        let ma = self.value(a);
        let n = T::from_f64c((ma.rows * ma.cols) as f64);
        let mut sum = T::zero();
        for &v in &ma.data {
            sum = sum + v;
        }
        let value = Mat::from_vec(1, 1, vec![sum / n]);
        self.push(value, Op::MeanAll(a))
    }

    /// Sum across columns: R x C -> R x 1.
    pub fn row_sum(&mut self, a: Var) -> Var {
        let ma = self.value(a);
        let mut value = Mat::zeros(ma.rows, 1);
        for i in 0..ma.rows {
            let mut sum = T::zero();
            for &v in ma.row(i) {
                sum = sum + v;
            }
            value.data[i] = sum;
        }
        self.push(value, Op::RowSum(a))
    }

    /// L2-normalizes each row.
    pub fn l2_normalize_rows(&mut self, a: Var) -> Var {
        let ma = self.value(a);
        let mut value = ma.clone();
        for i in 0..value.rows {
            let row = value.row_mut(i);
            let norm = dot(row, row).sqrt();
            for v in row.iter_mut() {
                *v = *v / norm;
            }
        }
        self.push(value, Op::L2NormalizeRows(a))
    }

    pub fn gather_rows(&mut self, table: Var, ids: &[usize]) -> Var {
        let mt = self.value(table);
        let mut value = Mat::zeros(ids.len(), mt.cols);
        for (r, &id) in ids.iter().enumerate() {
            value.row_mut(r).copy_from_slice(mt.row(id));
        }
        self.push(
            value,
            Op::GatherRows {
                table,
                ids: ids.to_vec(),
            },
        )
    }

    pub fn slice_cols(&mut self, x: Var, start: usize, len: usize) -> Var {
        let mx = self.value(x);
        debug_assert!(start + len <= mx.cols);
        let mut value = Mat::zeros(mx.rows, len);
        for i in 0..mx.rows {
            value
                .row_mut(i)
                .copy_from_slice(&mx.row(i)[start..start + len]);
        }
        self.push(value, Op::SliceCols { x, start })
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Var {
        let rows = self.value(parts[0]).rows;
        let cols: usize = parts.iter().map(|&p| self.value(p).cols).sum();
        let mut value = Mat::zeros(rows, cols);
        let mut offset = 0;
        for &p in parts {
            let mp = self.value(p);
            debug_assert_eq!(mp.rows, rows);
            for i in 0..rows {
                value.row_mut(i)[offset..offset + mp.cols].copy_from_slice(mp.row(i));
            }
            offset += mp.cols;
        }
        self.push(value, Op::ConcatCols(parts.to_vec()))
    }

    /// Same-padded 1-D convolution over time with kernel 3.
    /// x: time x C_in, w: (3 * C_in) x C_out laid out [offset * C_in + c_in],
    /// b: 1 x C_out.
    pub fn conv1d_k3(&mut self, x: Var, w: Var, b: Var) -> Var {
        let (mx, mw, mb) = (self.value(x), self.value(w), self.value(b));
        let c_in = mx.cols;
        let c_out = mw.cols;
        debug_assert_eq!(mw.rows, 3 * c_in);
        debug_assert_eq!(mb.cols, c_out);
        let t_len = mx.rows;
        let mut value = Mat::zeros(t_len, c_out);
        for t in 0..t_len {
            let out = &mut value.data[t * c_out..(t + 1) * c_out];
            out.copy_from_slice(&mb.data);
            for (d, xt) in [t.checked_sub(1), Some(t), Some(t + 1)].iter().enumerate() {
                let Some(xt) = *xt else { continue };
                if xt >= t_len {
                    continue;
                }
                let xrow = mx.row(xt);
                for (cin, &xv) in xrow.iter().enumerate() {
                    let wrow = mw.row(d * c_in + cin);
                    for (o, &wv) in out.iter_mut().zip(wrow) {
                        *o = *o + xv * wv;
                    }
                }
            }
        }
        self.push(value, Op::Conv1dK3 { x, w, b })
    }

    /// Elementwise product with a constant matrix.
    pub fn mul_const(&mut self, a: Var, c: Mat<T>) -> Var {
        let ma = self.value(a);
        debug_assert_eq!((ma.rows, ma.cols), (c.rows, c.cols));
        let data = ma.data.iter().zip(&c.data).map(|(&x, &y)| x * y).collect();
        let value = Mat::from_vec(ma.rows, ma.cols, data);
        self.push(value, Op::MulConst(a, c))
    }

    pub fn logsumexp_rows(&mut self, a: Var) -> Var {
        let ma = self.value(a);
        let mut value = Mat::zeros(ma.rows, 1);
        for i in 0..ma.rows {
            let row = ma.row(i);
            let max = row.iter().cloned().fold(T::neg_infinity(), T::max);
            let mut sum = T::zero();
            for &v in row {
                sum = sum + (v - max).exp();
            }
            value.data[i] = max + sum.ln();
        }
        self.push(value, Op::LogSumExpRows(a))
    }

    pub fn sqrt_eps(&mut self, a: Var, eps: f64) -> Var {
        let eps = T::from_f64c(eps);
        let value = self.value(a).map(|v| (v + eps).sqrt());
        self.push(value, Op::SqrtEps(a, eps))
    }

    /// Mean Huber loss of masked entries of a column vector against
    /// constant targets. Returns 1 x 1; zero when the mask is empty.
    pub fn huber_vec(&mut self, pred: Var, targets: Mat<T>, mask: Vec<bool>, delta: f64) -> Var {
        let delta = T::from_f64c(delta);
        let mp = self.value(pred);
        debug_assert_eq!(mp.cols, 1);
        debug_assert_eq!(mp.rows, targets.rows);
        debug_assert_eq!(mp.rows, mask.len());
        let count = mask.iter().filter(|&&m| m).count();
        let mut sum = T::zero();
        for i in 0..mp.rows {
            if !mask[i] {
                continue;
            }
            let r = mp.data[i] - targets.data[i];
            let a = r.abs();
            let half = T::from_f64c(0.5);
            sum = sum
                + if a <= delta {
                    half * r * r
                } else {
                    delta * (a - half * delta)
                };
        }
        let value = if count == 0 {
            T::zero()
        } else {
            sum / T::from_f64c(count as f64)
        };
        self.push(
            Mat::from_vec(1, 1, vec![value]),
            Op::HuberVec {
                pred,
                targets,
                mask,
                delta,
            },
        )
    }

    /// Runs the reverse sweep from the given seed adjoints, accumulating
    /// parameter gradients into `grads`.
    pub fn backward(&self, seeds: &[(Var, Mat<T>)], grads: &mut Grads<T>) {
        self.backward_collect(seeds, grads, &[]);
    }

    /// Like `backward`, but also returns the adjoints of the requested
    /// nodes (used to chain a batch-level loss graph into per-item
    /// graphs).
    pub fn backward_collect(
        &self,
        seeds: &[(Var, Mat<T>)],
        grads: &mut Grads<T>,
        want: &[Var],
    ) -> Vec<Mat<T>> {
        let mut adjoints: Vec<Option<Mat<T>>> = (0..self.nodes.len()).map(|_| None).collect();
        for (var, seed) in seeds {
            let value = &self.nodes[var.0].value;
            debug_assert_eq!((seed.rows, seed.cols), (value.rows, value.cols));
            match &mut adjoints[var.0] {
                Some(a) => add_assign(a, seed),
                slot => *slot = Some(seed.clone()),
            }
        }

        let mut collected: Vec<Option<Mat<T>>> = vec![None; want.len()];
        for idx in (0..self.nodes.len()).rev() {
            let Some(grad) = adjoints[idx].take() else {
                continue;
            };
            for (slot, w) in collected.iter_mut().zip(want) {
                if w.0 == idx {
                    *slot = Some(grad.clone());
                }
            }
            match &self.nodes[idx].op {
                Op::Input => {}
                Op::Param(id) => add_assign(&mut grads.mats[id.0], &grad),
                Op::MatMul(a, b) => {
                    // dA += dC * B^T ; dB += A^T * dC
                    let db = {
                        let ma = &self.nodes[a.0].value;
                        let mut db = Mat::zeros(self.nodes[b.0].value.rows, grad.cols);
                        matmul_tn_acc(ma, &grad, &mut db);
                        db
                    };
                    let da = {
                        let mb = &self.nodes[b.0].value;
                        let mut da = Mat::zeros(self.nodes[a.0].value.rows, mb.rows);
                        matmul_nt_acc(&grad, mb, &mut da);
                        da
                    };
                    accumulate(&mut adjoints, *a, da);
                    accumulate(&mut adjoints, *b, db);
                }
                Op::MatMulNT(a, b) => {
                    // C = A * B^T: dA += dC * B ; dB += dC^T * A
                    let da = {
                        let mb = &self.nodes[b.0].value;
                        let mut da = Mat::zeros(grad.rows, mb.cols);
                        matmul_acc(&grad, mb, &mut da);
                        da
                    };
                    let db = {
                        let ma = &self.nodes[a.0].value;
                        let mut db = Mat::zeros(grad.cols, ma.cols);
                        matmul_tn_acc(&grad, ma, &mut db);
                        db
                    };
                    accumulate(&mut adjoints, *a, da);
                    accumulate(&mut adjoints, *b, db);
                }
                Op::Add(a, b) => {
                    accumulate(&mut adjoints, *a, grad.clone());
                    accumulate(&mut adjoints, *b, grad);
                }
                Op::Sub(a, b) => {
                    let neg = grad.map(|v| T::zero() - v);
                    accumulate(&mut adjoints, *a, grad);
                    accumulate(&mut adjoints, *b, neg);
                }
                Op::MulElem(a, b) => {
                    let da = {
                        let mb = &self.nodes[b.0].value;
                        elementwise_product(&grad, mb)
                    };
                    let db = {
                        let ma = &self.nodes[a.0].value;
                        elementwise_product(&grad, ma)
                    };
                    accumulate(&mut adjoints, *a, da);
                    accumulate(&mut adjoints, *b, db);
                }
                Op::AddRow(a, v) => {
                    let mut dv = Mat::zeros(1, grad.cols);
                    for i in 0..grad.rows {
                        for (o, &g) in dv.row_mut(0).iter_mut().zip(grad.row(i)) {
                            *o = *o + g;
                        }
                    }
                    accumulate(&mut adjoints, *a, grad);
                    accumulate(&mut adjoints, *v, dv);
                }
                Op::Scale(a, c) => {
                    let c = *c;
                    accumulate(&mut adjoints, *a, grad.map(|g| g * c));
                }
                Op::Tanh(a) => {
                    let y = &self.nodes[idx].value;
                    let data = grad
                        .data
                        .iter()
                        .zip(&y.data)
                        .map(|(&g, &yv)| g * (T::one() - yv * yv))
                        .collect();
                    accumulate(&mut adjoints, *a, Mat::from_vec(grad.rows, grad.cols, data));
                }
                Op::SoftmaxRows(a) => {
                    let y = &self.nodes[idx].value;
                    let mut da = Mat::zeros(grad.rows, grad.cols);
                    for i in 0..grad.rows {
                        let yrow = y.row(i);
                        let grow = grad.row(i);
                        let s = dot(grow, yrow);
                        for (o, (&g, &yv)) in
                            da.row_mut(i).iter_mut().zip(grow.iter().zip(yrow))
                        {
                            *o = yv * (g - s);
                        }
                    }
                    accumulate(&mut adjoints, *a, da);
                }
                Op::LayerNorm { x, gain, bias, eps } => {
                    let mx = &self.nodes[x.0].value;
                    let mg = &self.nodes[gain.0].value;
                    let cols = mx.cols;
                    let inv_c = T::from_f64c(1.0 / cols as f64);
                    let mut dx = Mat::zeros(mx.rows, cols);
                    let mut dgain = Mat::zeros(1, cols);
                    let mut dbias = Mat::zeros(1, cols);
                    for i in 0..mx.rows {
                        let row = mx.row(i);
                        let mut mean = T::zero();
                        for &v in row {
                            mean = mean + v;
                        }
                        mean = mean * inv_c;
                        let mut var = T::zero();
                        for &v in row {
                            let d = v - mean;
                            var = var + d * d;
                        }
                        var = var * inv_c;
                        let inv_std = T::one() / (var + *eps).sqrt();

                        let grow = grad.row(i);
                        // dy through the affine part
                        let mut sum_gxhat = T::zero();
                        let mut sum_g = T::zero();
                        let mut gxh: Vec<T> = Vec::with_capacity(cols);
                        for j in 0..cols {
                            let xhat = (row[j] - mean) * inv_std;
                            let gj = grow[j] * mg.data[j];
                            gxh.push(gj);
                            sum_g = sum_g + gj;
                            sum_gxhat = sum_gxhat + gj * xhat;
                            dgain.data[j] = dgain.data[j] + grow[j] * xhat;
                            dbias.data[j] = dbias.data[j] + grow[j];
                        }
                        let mean_g = sum_g * inv_c;
                        let mean_gxhat = sum_gxhat * inv_c;
                        for j in 0..cols {
                            let xhat = (row[j] - mean) * inv_std;
                            dx.row_mut(i)[j] = (gxh[j] - mean_g - xhat * mean_gxhat) * inv_std;
                        }
                    }
                    accumulate(&mut adjoints, *x, dx);
                    accumulate(&mut adjoints, *gain, dgain);
                    accumulate(&mut adjoints, *bias, dbias);
                }
                Op::MeanRows(a) => {
                    let rows = self.nodes[a.0].value.rows;
                    let inv = T::from_f64c(1.0 / rows as f64);
                    let mut da = Mat::zeros(rows, grad.cols);
                    for i in 0..rows {
                        for (o, &g) in da.row_mut(i).iter_mut().zip(grad.row(0)) {
                            *o = g * inv;
                        }
                    }
                    accumulate(&mut adjoints, *a, da);
                }
                Op::MeanAll(a) => {
                    let val = &self.nodes[a.0].value;
                    let inv = T::from_f64c(1.0 / (val.rows * val.cols) as f64);
                    let g = grad.scalar() * inv;
                    let da = Mat::from_vec(val.rows, val.cols, vec![g; val.rows * val.cols]);
                    accumulate(&mut adjoints, *a, da);
                }
                Op::RowSum(a) => {
                    let val = &self.nodes[a.0].value;
                    let mut da = Mat::zeros(val.rows, val.cols);
                    for i in 0..val.rows {
                        let g = grad.data[i];
                        for o in da.row_mut(i) {
                            *o = g;
                        }
                    }
                    accumulate(&mut adjoints, *a, da);
                }
                Op::L2NormalizeRows(a) => {
                    let mx = &self.nodes[a.0].value;
                    let y = &self.nodes[idx].value;
                    let mut da = Mat::zeros(mx.rows, mx.cols);
                    for i in 0..mx.rows {
                        let xrow = mx.row(i);
                        let norm = dot(xrow, xrow).sqrt();
                        let yrow = y.row(i);
                        let grow = grad.row(i);
                        let gy = dot(grow, yrow);
                        for j in 0..mx.cols {
                            da.row_mut(i)[j] = (grow[j] - yrow[j] * gy) / norm;
                        }
                    }
                    accumulate(&mut adjoints, *a, da);
                }
                Op::GatherRows { table, ids } => {
                    let mt = &self.nodes[table.0].value;
                    let mut dt = Mat::zeros(mt.rows, mt.cols);
                    for (r, &id) in ids.iter().enumerate() {
                        for (o, &g) in dt.row_mut(id).iter_mut().zip(grad.row(r)) {
                            *o = *o + g;
                        }
                    }
                    accumulate(&mut adjoints, *table, dt);
                }
                Op::SliceCols { x, start } => {
                    let mx = &self.nodes[x.0].value;
                    let mut dx = Mat::zeros(mx.rows, mx.cols);
                    for i in 0..grad.rows {
                        dx.row_mut(i)[*start..*start + grad.cols].copy_from_slice(grad.row(i));
                    }
                    accumulate(&mut adjoints, *x, dx);
                }
                Op::ConcatCols(parts) => {
                    let mut offset = 0;
                    for &p in parts {
                        let cols = self.nodes[p.0].value.cols;
                        let mut dp = Mat::zeros(grad.rows, cols);
                        for i in 0..grad.rows {
                            dp.row_mut(i)
                                .copy_from_slice(&grad.row(i)[offset..offset + cols]);
                        }
                        accumulate(&mut adjoints, p, dp);
                        offset += cols;
                    }
                }
                Op::Conv1dK3 { x, w, b } => {
                    let mx = &self.nodes[x.0].value;
                    let mw = &self.nodes[w.0].value;
                    let c_in = mx.cols;
                    let c_out = mw.cols;
                    let t_len = mx.rows;
                    let mut dx = Mat::zeros(t_len, c_in);
                    let mut dw = Mat::zeros(3 * c_in, c_out);
                    let mut db = Mat::zeros(1, c_out);
                    for t in 0..t_len {
                        let grow = grad.row(t);
                        for (o, &g) in db.row_mut(0).iter_mut().zip(grow) {
                            *o = *o + g;
                        }
                        for (d, xt) in [t.checked_sub(1), Some(t), Some(t + 1)].iter().enumerate()
                        {
                            let Some(xt) = *xt else { continue };
                            if xt >= t_len {
                                continue;
                            }
                            let xrow = mx.row(xt);
                            for cin in 0..c_in {
                                let wrow = mw.row(d * c_in + cin);
                                // dx[xt][cin] += dot(grow, wrow)
                                dx.row_mut(xt)[cin] = dx.row_mut(xt)[cin] + dot(grow, wrow);
                                // dw[d * c_in + cin] += x[xt][cin] * grow
                                let xv = xrow[cin];
                                for (o, &g) in dw.row_mut(d * c_in + cin).iter_mut().zip(grow) {
                                    *o = *o + xv * g;
                                }
                            }
                        }
                    }
                    accumulate(&mut adjoints, *x, dx);
                    accumulate(&mut adjoints, *w, dw);
                    accumulate(&mut adjoints, *b, db);
                }
                Op::MulConst(a, c) => {
                    accumulate(&mut adjoints, *a, elementwise_product(&grad, c));
                }
                Op::LogSumExpRows(a) => {
                    let mx = &self.nodes[a.0].value;
                    let mut da = Mat::zeros(mx.rows, mx.cols);
                    for i in 0..mx.rows {
                        let row = mx.row(i);
                        let max = row.iter().cloned().fold(T::neg_infinity(), T::max);
                        let mut sum = T::zero();
                        for &v in row {
                            sum = sum + (v - max).exp();
                        }
                        let g = grad.data[i];
                        for (o, &v) in da.row_mut(i).iter_mut().zip(row) {
                            *o = g * (v - max).exp() / sum;
                        }
                    }
                    accumulate(&mut adjoints, *a, da);
                }
                Op::SqrtEps(a, _) => {
                    let y = &self.nodes[idx].value;
                    let half = T::from_f64c(0.5);
                    let data = grad
                        .data
                        .iter()
                        .zip(&y.data)
                        .map(|(&g, &yv)| g * half / yv)
                        .collect();
                    accumulate(&mut adjoints, *a, Mat::from_vec(grad.rows, grad.cols, data));
                }
                Op::HuberVec {
                    pred,
                    targets,
                    mask,
                    delta,
                } => {
                    let mp = &self.nodes[pred.0].value;
                    let count = mask.iter().filter(|&&m| m).count();
                    let mut dp = Mat::zeros(mp.rows, 1);
                    if count > 0 {
                        let g = grad.scalar() / T::from_f64c(count as f64);
                        for i in 0..mp.rows {
                            if !mask[i] {
                                continue;
                            }
                            let r = mp.data[i] - targets.data[i];
                            dp.data[i] = g * if r.abs() <= *delta {
                                r
                            } else if r > T::zero() {
                                *delta
                            } else {
                                T::zero() - *delta
                            };
                        }
                    }
                    accumulate(&mut adjoints, *pred, dp);
                }
            }
        }

        collected
            .into_iter()
            .zip(want)
            .map(|(c, w)| {
                c.unwrap_or_else(|| {
                    let v = &self.nodes[w.0].value;
                    Mat::zeros(v.rows, v.cols)
                })
            })
            .collect()
    }
}

impl<T: Real> Default for Tape<T> {
    fn default() -> Self {
        Self::new()
    }
}

fn accumulate<T: Real>(adjoints: &mut [Option<Mat<T>>], var: Var, grad: Mat<T>) {
    match &mut adjoints[var.0] {
        Some(a) => add_assign(a, &grad),
        slot => *slot = Some(grad),
    }
}

fn elementwise_product<T: Real>(a: &Mat<T>, b: &Mat<T>) -> Mat<T> {
    debug_assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Mat::from_vec(
        a.rows,
        a.cols,
        a.data.iter().zip(&b.data).map(|(&x, &y)| x * y).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Central finite differences on every element of every registered
    /// parameter, against the analytic gradient of a scalar-valued
    /// graph.
    fn check_gradients(
        build: impl Fn(&mut Tape<f64>, &ParamSet<f64>, &[ParamId]) -> Var,
        shapes: &[(usize, usize)],
        seed: u64,
        tol: f64,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = ParamSet::new();
        let ids: Vec<ParamId> = shapes
            .iter()
            .enumerate()
            .map(|(i, &(r, c))| {
                let m = Mat::from_fn(r, c, |_, _| rng.gen_range(-0.9..0.9));
                params.register(&format!("p{i}"), m, false)
            })
            .collect();

        let mut tape = Tape::new();
        let out = build(&mut tape, &params, &ids);
        assert_eq!((tape.value(out).rows, tape.value(out).cols), (1, 1));
        let mut grads = Grads::zeros_like(&params);
        tape.backward(&[(out, Mat::from_vec(1, 1, vec![1.0]))], &mut grads);

        let h = 1e-5;
        for (pi, id) in ids.iter().enumerate() {
            let n = params.value(*id).data.len();
            for e in 0..n {
                let orig = params.value(*id).data[e];
                params.value_mut(*id).data[e] = orig + h;
                let mut t_plus = Tape::new();
                let up = build(&mut t_plus, &params, &ids);
                let f_plus = t_plus.value(up).scalar();
                params.value_mut(*id).data[e] = orig - h;
                let mut t_minus = Tape::new();
                let um = build(&mut t_minus, &params, &ids);
                let f_minus = t_minus.value(um).scalar();
                params.value_mut(*id).data[e] = orig;

                let fd = (f_plus - f_minus) / (2.0 * h);
                let an = grads.mats[pi].data[e];
                let denom = fd.abs().max(an.abs()).max(1e-6);
                assert!(
                    ((fd - an) / denom).abs() < tol,
                    "param {pi} elem {e}: fd {fd} vs analytic {an}"
                );
            }
        }
    }

    #[test]
    fn grad_matmul_chain() {
        check_gradients(
            |tape, params, ids| {
                let a = tape.param(params, ids[0]);
                let b = tape.param(params, ids[1]);
                let c = tape.matmul(a, b);
                let t = tape.tanh(c);
                tape.mean_all(t)
            },
            &[(3, 4), (4, 5)],
            1,
            1e-6,
        );
    }

    #[test]
    fn grad_matmul_nt_and_softmax() {
        check_gradients(
            |tape, params, ids| {
                let a = tape.param(params, ids[0]);
                let b = tape.param(params, ids[1]);
                let s = tape.matmul_nt(a, b);
                let sm = tape.softmax_rows(s);
                let lv = tape.logsumexp_rows(s);
                let joined = tape.matmul(sm, b);
                let m1 = tape.mean_all(joined);
                let m2 = tape.mean_all(lv);
                tape.add(m1, m2)
            },
            &[(3, 4), (5, 4)],
            2,
            1e-6,
        );
    }

    #[test]
    fn grad_layernorm_and_addrow() {
        check_gradients(
            |tape, params, ids| {
                let x = tape.param(params, ids[0]);
                let g = tape.param(params, ids[1]);
                let b = tape.param(params, ids[2]);
                let v = tape.param(params, ids[3]);
                let xr = tape.add_row(x, v);
                let ln = tape.layer_norm(xr, g, b, 1e-5);
                let t = tape.tanh(ln);
                tape.mean_all(t)
            },
            &[(4, 6), (1, 6), (1, 6), (1, 6)],
            3,
            1e-5,
        );
    }

    #[test]
    fn grad_conv_and_slices() {
        check_gradients(
            |tape, params, ids| {
                let x = tape.param(params, ids[0]);
                let w = tape.param(params, ids[1]);
                let b = tape.param(params, ids[2]);
                let y = tape.conv1d_k3(x, w, b);
                let t = tape.tanh(y);
                let left = tape.slice_cols(t, 0, 2);
                let right = tape.slice_cols(t, 2, 2);
                let swapped = tape.concat_cols(&[right, left]);
                tape.mean_all(swapped)
            },
            &[(5, 3), (9, 4), (1, 4)],
            4,
            1e-6,
        );
    }

    #[test]
    fn grad_normalize_gather_and_stats() {
        check_gradients(
            |tape, params, ids| {
                let table = tape.param(params, ids[0]);
                let g = tape.gather_rows(table, &[0, 2, 2, 1]);
                let m = tape.mean_rows(g);
                let sq = tape.mul_elem(g, g);
                let q = tape.mean_rows(sq);
                let mm = tape.mul_elem(m, m);
                let var = tape.sub(q, mm);
                let sd = tape.sqrt_eps(var, 1e-8);
                let stats = tape.concat_cols(&[m, sd]);
                let n = tape.l2_normalize_rows(stats);
                let rs = tape.row_sum(n);
                tape.mean_all(rs)
            },
            &[(4, 5)],
            5,
            1e-5,
        );
    }

    #[test]
    fn grad_huber_vec_and_masks() {
        check_gradients(
            |tape, params, ids| {
                let x = tape.param(params, ids[0]);
                let s = tape.row_sum(x);
                let targets = Mat::from_vec(4, 1, vec![0.3, -0.2, 4.0, 0.1]);
                let mask = vec![true, true, true, false];
                let h = tape.huber_vec(s, targets, mask, 1.0);
                let sc = tape.scale(h, 2.0);
                let dropmask = Mat::from_vec(4, 3, vec![1.0, 0.0, 2.0, 1.0, 1.0, 0.0, 2.0, 1.0, 1.0, 0.0, 2.0, 1.0]);
                let dropped = tape.mul_const(x, dropmask);
                let m = tape.mean_all(dropped);
                tape.add(sc, m)
            },
            &[(4, 3)],
            6,
            1e-6,
        );
    }

    #[test]
    fn softmax_single_column_is_exactly_one() {
        let mut tape: Tape<f64> = Tape::new();
        let x = tape.input(Mat::from_vec(3, 1, vec![-2.0, 0.0, 5.0]));
        let sm = tape.softmax_rows(x);
        assert_eq!(tape.value(sm).data, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn forward_values_are_deterministic() {
        let build = || {
            let mut tape: Tape<f32> = Tape::new();
            let x = tape.input(Mat::from_fn(8, 8, |i, j| ((i * 31 + j * 17) % 11) as f32 * 0.1));
            let sm = tape.softmax_rows(x);
            let ls = tape.logsumexp_rows(sm);
            let m = tape.mean_all(ls);
            tape.value(m).scalar()
        };
        assert_eq!(build().to_bits(), build().to_bits());
    }
}
