//! Jump operator of `P = Σ_j A_j(ρ) D_ρ^j` across `ρ = 0`.
//!
//! With `H` the Heaviside function, `P(Hu) = H Pu + γ*Jγu` where `γu = (u, D_ρu, …)(0)` and
//! `γ*U = Σ_l D_ρ^l δ ⊗ U_l`. Each `D_ρ^j(Hu)` produces `-i Σ_k D_ρ^{j-1-k}δ ⊗ (D_ρ^k u)(0)`,
//! and the coefficient is moved past the derivatives of `δ` by
//! `A D^r δ = Σ_s C(r,s) ((-D)^{r-s} A)(0) D^s δ`, `(-D) = i d/dρ`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// `m × m` array of `N × N` blocks; `blocks[l][k]` maps the `k`-th data component to the
/// coefficient of `D_ρ^l δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpOperator {
    pub order: usize,
    pub system_size: usize,
    pub blocks: Vec<Vec<CMatrix<f64>>>,
}

impl JumpOperator {
    pub fn matrix(&self) -> CMatrix<f64> {
        let (m, n) = (self.order, self.system_size);
        let mut out = CMatrix::zeros(m * n, m * n);
        for l in 0..m {
            for k in 0..m {
                out.view_mut((l * n, k * n), (n, n)).copy_from(&self.blocks[l][k]);
            }
        }
        out
    }

    /// Differential order of entry `(l, k)` (0-based) as an operator along the boundary, or
    /// `None` for entries that vanish identically.
    pub fn entry_order(&self, l: usize, k: usize) -> Option<usize> {
        (self.order - 1).checked_sub(l + k)
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// `jets[j][r]` is the `ρ^r` Taylor coefficient of `A_j` at the collar; `jets.len() = m + 1`.
pub fn jump_operator(jets: &[Vec<CMatrix<f64>>]) -> Result<JumpOperator> {
    let m = jets.len().checked_sub(1).filter(|&m| m > 0).ok_or_else(|| Error::InvalidArgument("order 0".into()))?;
    let n = jets[m].first().map(|c| c.nrows()).ok_or_else(|| Error::InvalidArgument("empty leading jet".into()))?;
    let mut blocks = vec![vec![CMatrix::<f64>::zeros(n, n); m]; m];
    let i = Complex64::new(0.0, 1.0);
    for (j, jet) in jets.iter().enumerate() {
        for k in 0..j {
            let r = j - 1 - k;
            for s in 0..=r {
                let d = r - s;
                let Some(c) = jet.get(d) else { continue };
                // d-th derivative at 0 is d! times the Taylor coefficient
                let w = -i * binom(r, s) * i.powu(d as u32) * factorial(d);
                blocks[s][k] += c * w;
            }
        }
    }
    Ok(JumpOperator { order: m, system_size: n, blocks })
}
