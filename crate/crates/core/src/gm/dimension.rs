//! Limits of Dehn-twisted differentials on a surface cut into `C` blocks of
//! three disjoint curves, and the quadratic forms they produce.

use nalgebra::DMatrix;

use super::{CurveSystem, GmFunction, Multicurve, PolynomialForm, QdData};
use crate::error::{Error, Result};

const U_TOL: f64 = 1e-12;

fn check_alpha(c: usize, alpha: &[f64]) -> Result<()> {
    if c == 0 {
        return Err(Error::invalid("block count must be positive"));
    }
    if alpha.len() != 3 * c {
        return Err(Error::invalid(format!(
            "expected {} alpha entries, got {}",
            3 * c,
            alpha.len()
        )));
    }
    if alpha.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
        return Err(Error::invalid("alpha entries must be positive"));
    }
    let target = 1.0 / c as f64;
    for (k, block) in alpha.chunks(3).enumerate() {
        let s: f64 = block.iter().sum();
        if (s - target).abs() > U_TOL {
            return Err(Error::invalid(format!(
                "block {k} of alpha sums to {s}, expected {target}"
            )));
        }
    }
    Ok(())
}

/// `w_{3k+j} = 1 / (3C * (sum of the other two alphas in block k))`.
pub fn twist_weights(c: usize, alpha: &[f64]) -> Result<Vec<f64>> {
    check_alpha(c, alpha)?;
    let scale = 3.0 * c as f64;
    Ok(alpha
        .chunks(3)
        .flat_map(|b| (0..3).map(move |j| 1.0 / (scale * (b[(j + 1) % 3] + b[(j + 2) % 3]))))
        .collect())
}

/// `sum_{k,j} alpha_{3k+j} h_q(F_{k,j})` in the coordinates `x_i`, rescaled to
/// take the value 1 at `x = (1,...,1)`. `eta_i = i(V_i, H)`; `None` means `1/(3C)`.
pub fn xi_alpha(c: usize, alpha: &[f64], eta: Option<&[f64]>) -> Result<PolynomialForm> {
    let w = twist_weights(c, alpha)?;
    let n = 3 * c;
    let eta: Vec<f64> = match eta {
        Some(e) if e.len() == n && e.iter().all(|&v| v > 0.0) => e.to_vec(),
        Some(_) => return Err(Error::invalid(format!("eta needs {n} positive entries"))),
        None => vec![1.0 / n as f64; n],
    };
    let mut b = DMatrix::zeros(n, n);
    for k in 0..c {
        for j in 0..3 {
            let others: Vec<usize> = (0..3).filter(|&i| i != j).map(|i| 3 * k + i).collect();
            let s: f64 = others.iter().map(|&i| w[i] * eta[i]).sum();
            let a = alpha[3 * k + j];
            for &p in &others {
                for &q in &others {
                    b[(p, q)] += a * w[p] * w[q] * eta[p] * eta[q] / s;
                }
            }
        }
    }
    let total: f64 = b.iter().sum();
    b /= total;
    PolynomialForm::new(b, Some(eta))
}

/// Smallest max-norm distance between the coefficient matrices of any two alphas.
pub fn injectivity_scan(c: usize, alphas: &[Vec<f64>]) -> Result<f64> {
    let forms = alphas
        .iter()
        .map(|a| xi_alpha(c, a, None))
        .collect::<Result<Vec<_>>>()?;
    let mut best = f64::INFINITY;
    for i in 0..forms.len() {
        for j in i + 1..forms.len() {
            best = best.min(forms[i].distance(&forms[j]));
        }
    }
    Ok(best)
}

/// Curves `V_1..V_{3C}`, their twist partners `G_1..G_{3C}` and a horizontal `H`.
///
/// Within block `k`, `i(G_{3k+j}, V_{3k+i}) = 1` for `i != j`; the `V` are
/// pairwise disjoint, as are the `G`; `i(V_i, H) = eta_i`.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub blocks: usize,
    pub sys: CurveSystem,
    pub v: Vec<Multicurve>,
    pub g: Vec<Multicurve>,
    pub h: Multicurve,
    pub eta: Vec<f64>,
}

impl BlockSystem {
    pub fn new(blocks: usize, eta: Option<Vec<f64>>) -> Result<Self> {
        if blocks == 0 {
            return Err(Error::invalid("block count must be positive"));
        }
        let n = 3 * blocks;
        let eta = eta.unwrap_or_else(|| vec![1.0 / n as f64; n]);
        if eta.len() != n || eta.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::invalid(format!("eta needs {n} positive entries")));
        }
        let total = 2 * n + 1;
        let hi = 2 * n;
        let mut m = DMatrix::zeros(total, total);
        for k in 0..blocks {
            for j in 0..3 {
                for i in 0..3 {
                    if i != j {
                        m[(n + 3 * k + j, 3 * k + i)] = 1.0;
                        m[(3 * k + i, n + 3 * k + j)] = 1.0;
                    }
                }
            }
        }
        for i in 0..n {
            m[(i, hi)] = eta[i];
            m[(hi, i)] = eta[i];
        }
        let labels = (1..=n)
            .map(|i| format!("V{i}"))
            .chain((1..=n).map(|i| format!("G{i}")))
            .chain(std::iter::once("H".to_string()))
            .collect();
        let sys = CurveSystem::new(labels, m)?;
        let unit = |i: usize| {
            let mut w = vec![0.0; total];
            w[i] = 1.0;
            Multicurve::new(w)
        };
        Ok(Self {
            blocks,
            v: (0..n).map(unit).collect(),
            g: (n..2 * n).map(unit).collect(),
            h: unit(hi),
            sys,
            eta,
        })
    }

    /// `V(q) = sum V_i`, `H(q) = H`.
    pub fn qd(&self) -> QdData {
        QdData {
            components: self.v.clone(),
            horizontal: self.h.clone(),
        }
    }

    pub fn xi(&self, alpha: &[f64]) -> Result<GmFunction> {
        let form = xi_alpha(self.blocks, alpha, Some(&self.eta))?;
        Ok(GmFunction::Polynomial {
            sys: self.sys.clone(),
            form,
            variables: self.v.clone(),
        })
    }

    /// The closed surface has no proper arcs: one interior group, no boundary.
    pub fn minimal(&self) -> Result<GmFunction> {
        super::minimal_fn(
            &self.sys,
            &self.qd(),
            &[],
            &[self.qd().vertical(self.sys.len())],
        )
    }

    pub fn busemann(&self) -> Result<GmFunction> {
        super::busemann_fn(&self.sys, &self.qd())
    }
}
