//! The partial-sum process
//! `W_n(t) = |n|^{-1/2} Σ_i λ(R_i ∩ ∏_q [0, n_q t_q]) X_i` on `[0,1]^d`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::FieldSample;
use crate::lattice::{self, for_each_index, LatticeArray, MultiIndex};

/// `W_n` for one field, with its prefix array cached.
#[derive(Clone, Debug)]
pub struct PartialSumProcess {
    field: LatticeArray,
    prefix: LatticeArray,
    sqrt_volume: f64,
}

impl From<&FieldSample> for PartialSumProcess {
    fn from(sample: &FieldSample) -> Self {
        PartialSumProcess::new(sample.values.clone())
    }
}

fn check_point(t: &[f64], d: usize) -> Result<()> {
    if t.len() != d {
        return Err(Error::InvalidInput(format!(
            "point has {} coordinates, expected {d}",
            t.len()
        )));
    }
    if let Some(x) = t.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::InvalidInput(format!("coordinate {x} outside [0, 1]")));
    }
    Ok(())
}

/// Splits `n t` into an integer part in `0..=n` and a fraction in `[0, 1)`,
/// snapping values within rounding distance of an integer.
#[inline]
fn split_scaled(n: usize, t: f64) -> (usize, f64) {
    let x = n as f64 * t;
    let r = x.round();
    if (x - r).abs() <= 1e-12 * r.max(1.0) {
        return (r as usize, 0.0);
    }
    let k = x.floor();
    (k as usize, x - k)
}

/// `λ(R_i ∩ ∏_q [0, n_q t_q]) = ∏_q clamp(n_q t_q - (i_q - 1), 0, 1)`.
pub fn overlap_volume(i: &MultiIndex, n: &MultiIndex, t: &[f64]) -> Result<f64> {
    if !i.precedes(n) {
        return Err(Error::InvalidInput(format!("cell {i:?} outside {n:?}")));
    }
    check_point(t, n.dim())?;
    Ok(i
        .coords()
        .iter()
        .zip(n.coords())
        .zip(t)
        .map(|((&iq, &nq), &tq)| (nq as f64 * tq - (iq as f64 - 1.0)).clamp(0.0, 1.0))
        .product())
}

/// Outcome of [`PartialSumProcess::lemma11_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma11Check {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl PartialSumProcess {
    pub fn new(field: LatticeArray) -> Self {
        let prefix = lattice::prefix_sum(&field);
        let sqrt_volume = (field.shape().volume() as f64).sqrt();
        PartialSumProcess {
            field,
            prefix,
            sqrt_volume,
        }
    }

    pub fn shape(&self) -> &MultiIndex {
        self.field.shape()
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn field(&self) -> &LatticeArray {
        &self.field
    }

    pub fn prefix(&self) -> &LatticeArray {
        &self.prefix
    }

    /// `W_n(t)`.
    ///
    /// `W_n` is the multilinear interpolation of `S_k / √|n|` on the grid
    /// `(k_q / n_q)`, so it is evaluated from the `2^d` surrounding prefix
    /// values. At grid points this is exactly `S_k / √|n|`.
    pub fn eval(&self, t: &[f64]) -> Result<f64> {
        check_point(t, self.dim())?;
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: &[f64]) -> f64 {
        let d = self.dim();
        let n = self.shape().coords();
        let mut base = [0usize; 8];
        let mut frac = [0f64; 8];
        let (mut base_v, mut frac_v);
        let (base, frac): (&mut [usize], &mut [f64]) = if d <= 8 {
            (&mut base[..d], &mut frac[..d])
        } else {
            base_v = vec![0; d];
            frac_v = vec![0.0; d];
            (&mut base_v, &mut frac_v)
        };
        for q in 0..d {
            let (k, f) = split_scaled(n[q], t[q]);
            base[q] = k;
            frac[q] = f;
        }
        let mut corner = vec![0usize; d];
        let mut total = 0.0;
        'corners: for mask in 0u32..(1u32 << d) {
            let mut w = 1.0;
            for q in 0..d {
                if mask & (1 << q) != 0 {
                    if frac[q] == 0.0 {
                        continue 'corners;
                    }
                    w *= frac[q];
                    corner[q] = base[q] + 1;
                } else {
                    w *= 1.0 - frac[q];
                    corner[q] = base[q];
                }
            }
            total += w * self.prefix.get_or_zero(&corner);
        }
        total / self.sqrt_volume
    }

    /// `W_n(t)` straight from the definition, summing `overlap · X_i` over the
    /// support box `i_q ≤ ⌈n_q t_q⌉`.
    pub fn eval_by_cells(&self, t: &[f64]) -> Result<f64> {
        check_point(t, self.dim())?;
        let n = self.shape().coords();
        let support: Vec<usize> = n
            .iter()
            .zip(t)
            .map(|(&nq, &tq)| {
                let (k, f) = split_scaled(nq, tq);
                if f > 0.0 {
                    k + 1
                } else {
                    k
                }
            })
            .collect();
        if support.contains(&0) {
            return Ok(0.0);
        }
        let mut total = 0.0;
        for_each_index(&support, |i| {
            let w: f64 = i
                .iter()
                .zip(n)
                .zip(t)
                .map(|((&iq, &nq), &tq)| (nq as f64 * tq - (iq as f64 - 1.0)).clamp(0.0, 1.0))
                .product();
            total += w * self.field.get(i);
        });
        Ok(total / self.sqrt_volume)
    }

    fn point_with(q: usize, t: f64, s: &[f64]) -> Vec<f64> {
        let mut p = Vec::with_capacity(s.len() + 1);
        p.extend_from_slice(&s[..q]);
        p.push(t);
        p.extend_from_slice(&s[q..]);
        p
    }

    /// `|W_n(…, t', …) - W_n(…, t, …)|` with `t, t'` in slot `q` (1-based) and
    /// `s` filling the remaining `d - 1` slots in order.
    pub fn delta_q(&self, q: usize, t: f64, t_prime: f64, s: &[f64]) -> Result<f64> {
        let d = self.dim();
        if q == 0 || q > d {
            return Err(Error::InvalidInput(format!("axis {q} outside 1..={d}")));
        }
        if s.len() + 1 != d {
            return Err(Error::InvalidInput(format!(
                "s has {} coordinates, expected {}",
                s.len(),
                d - 1
            )));
        }
        let a = self.eval(&Self::point_with(q - 1, t_prime, s))?;
        let b = self.eval(&Self::point_with(q - 1, t, s))?;
        Ok((a - b).abs())
    }

    /// Maximal inequality for directional increments along axis `q`.
    ///
    /// `lhs = sup_s √|n| Δ_n(t, t', s)` with the sup over the grid
    /// `s_ℓ ∈ {k/n_ℓ}`; `rhs` is `3^d 1{t'-t ≥ 1/n_q}` times the largest block
    /// sum over `i_q ∈ ([n_q t], [n_q t']]` and initial rectangles in the other
    /// axes, plus `3^d min{1, n_q (t'-t)}` times the largest single-slice
    /// initial-rectangle sum.
    pub fn lemma11_check(&self, q: usize, t: f64, t_prime: f64) -> Result<Lemma11Check> {
        let d = self.dim();
        if q == 0 || q > d {
            return Err(Error::InvalidInput(format!("axis {q} outside 1..={d}")));
        }
        if !(0.0..=1.0).contains(&t) || !(0.0..=1.0).contains(&t_prime) {
            return Err(Error::InvalidInput(format!("t={t}, t'={t_prime} outside [0,1]")));
        }
        if t >= t_prime {
            return Err(Error::InvalidRange(format!("need t < t', got t={t}, t'={t_prime}")));
        }
        let a = q - 1;
        let n = self.shape().coords();
        let nq = n[a];
        let others: Vec<usize> = (0..d).filter(|&l| l != a).collect();

        // lhs over the grid of the remaining axes; grid values include 0.
        let grid_shape: Vec<usize> = others.iter().map(|&l| n[l] + 1).collect();
        let mut lhs = 0.0f64;
        let mut s = vec![0.0; d - 1];
        if d == 1 {
            lhs = self.sqrt_volume * self.delta_q(q, t, t_prime, &s)?;
        } else {
            for_each_index(&grid_shape, |k| {
                for (j, (&kj, &l)) in k.iter().zip(&others).enumerate() {
                    s[j] = (kj - 1) as f64 / n[l] as f64;
                }
                let v = self.delta_q(q, t, t_prime, &s).expect("grid point in cube");
                lhs = lhs.max(self.sqrt_volume * v);
            });
        }

        let three_d = 3f64.powi(d as i32);
        let (lo_t, _) = split_scaled(nq, t);
        let (hi_t, _) = split_scaled(nq, t_prime);
        let other_shape: Vec<usize> = others.iter().map(|&l| n[l]).collect();
        let mut lo = vec![1usize; d];
        let mut hi = n.to_vec();
        let mut max_over_initial = |from: usize, to: usize| -> f64 {
            lo[a] = from;
            hi[a] = to;
            let mut m = 0.0f64;
            if d == 1 {
                m = lattice::rect_sum_unchecked(&self.prefix, &lo, &hi).abs();
            } else {
                for_each_index(&other_shape, |k| {
                    for (&kj, &l) in k.iter().zip(&others) {
                        hi[l] = kj;
                    }
                    m = m.max(lattice::rect_sum_unchecked(&self.prefix, &lo, &hi).abs());
                });
            }
            m
        };
        let block = if t_prime - t >= 1.0 / nq as f64 && hi_t > lo_t {
            max_over_initial(lo_t + 1, hi_t)
        } else {
            0.0
        };
        let mut slice_max = 0.0f64;
        for iq in 1..=nq {
            slice_max = slice_max.max(max_over_initial(iq, iq));
        }
        let indicator = if t_prime - t >= 1.0 / nq as f64 { 1.0 } else { 0.0 };
        let rhs = three_d * indicator * block
            + three_d * (nq as f64 * (t_prime - t)).min(1.0) * slice_max;
        Ok(Lemma11Check {
            lhs,
            rhs,
            holds: lhs <= rhs * (1.0 + 1e-12) + 1e-12,
        })
    }

    /// `max |W_n(t) - W_n(t')| / (√|n| ‖t - t'‖_∞ Σ_i |X_i|)` over the pairs.
    /// Coincident pairs are skipped; a zero field gives 0.
    ///
    /// The ratio is at most `max(1, Σ_q n_q / |n|)`, hence at most 1 once
    /// every `n_q ≥ 2`. With unit sides it can exceed 1: for `n = (1, 1)`,
    /// `W_n(t) = X t_1 t_2` moves by up to `2 ‖t - t'‖_∞ |X|`.
    pub fn lipschitz_ratio(&self, pairs: &[(Vec<f64>, Vec<f64>)]) -> Result<f64> {
        if pairs.is_empty() {
            return Err(Error::InvalidInput("no pairs supplied".into()));
        }
        let l1: f64 = self.field.values().iter().map(|x| x.abs()).sum();
        let mut ratio = 0.0f64;
        for (t, tp) in pairs {
            let dist = t
                .iter()
                .zip(tp)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            if dist == 0.0 {
                continue;
            }
            let diff = (self.eval(t)? - self.eval(tp)?).abs();
            if diff == 0.0 {
                continue;
            }
            ratio = ratio.max(diff / (self.sqrt_volume * dist * l1));
        }
        Ok(ratio)
    }
}
