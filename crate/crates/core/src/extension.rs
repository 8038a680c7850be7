//! Finite-dimensional model of augmentation, modification and invertible extension.
//!
//! An [`AbstractBVP`] lives on `C^n = C^p ⊕ C^q`, the plus side `X` (first block of the mask)
//! and the minus side `X⁻`. The boundary data map only sees `X`, and boundary data spaces are
//! those of the restriction `T_X` (the plus-plus block): extending `T` into `X⁻` never changes
//! them. With an all-plus mask this is the plain `γ(ker T)`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    direct_sum_check, gram_adjoint, identity, is_hermitian, is_positive_definite, null_space, orth_projector,
    orthonormal_basis, random_complex, scale, smallest_singular_value, CMatrix, SubspaceBasis,
};
use crate::scalar::Real;

fn rank_tol<T: Real>() -> T {
    T::tol(1e-8)
}

#[derive(Debug, Clone)]
pub struct AbstractBVP<T: Real> {
    pub t: CMatrix<T>,
    /// `d × n`; columns of minus-side coordinates must vanish.
    pub gamma: CMatrix<T>,
    pub gram: CMatrix<T>,
    /// `true` for coordinates on the plus side.
    pub plus: Vec<bool>,
}

impl<T: Real> AbstractBVP<T> {
    /// All coordinates on the plus side, Euclidean inner product.
    pub fn new(t: CMatrix<T>, gamma: CMatrix<T>) -> Result<Self> {
        let n = t.nrows();
        Self::with_sides(t, gamma, identity(n), vec![true; n])
    }

    pub fn with_sides(t: CMatrix<T>, gamma: CMatrix<T>, gram: CMatrix<T>, plus: Vec<bool>) -> Result<Self> {
        let n = t.nrows();
        if !t.is_square() || gamma.ncols() != n || gram.shape() != (n, n) || plus.len() != n {
            return Err(Error::DimensionMismatch("inconsistent boundary value problem".into()));
        }
        if !is_positive_definite(&gram) {
            return Err(Error::GramNotPD);
        }
        for (j, &p) in plus.iter().enumerate() {
            if !p && gamma.column(j).norm() != T::zero() {
                return Err(Error::InvalidArgument(format!("boundary map sees minus coordinate {j}")));
            }
        }
        if gamma.nrows() > 0 && orthonormal_basis(&gamma.transpose(), rank_tol()).ncols() != gamma.nrows() {
            return Err(Error::RankDeficient { ratio: 0.0 });
        }
        Ok(Self { t, gamma, gram, plus })
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    pub fn plus_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.plus[i]).collect()
    }

    pub fn minus_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| !self.plus[i]).collect()
    }

    /// Plus-plus block of `t`.
    pub fn restrict(&self, t: &CMatrix<T>) -> CMatrix<T> {
        let idx = self.plus_indices();
        t.select_rows(&idx).select_columns(&idx)
    }

    fn gamma_plus(&self) -> CMatrix<T> {
        self.gamma.select_columns(&self.plus_indices())
    }

    fn gram_plus(&self) -> CMatrix<T> {
        self.restrict(&self.gram)
    }

    fn embed_plus_square(&self, m: &CMatrix<T>) -> CMatrix<T> {
        let idx = self.plus_indices();
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out[(i, j)] = m[(a, b)];
            }
        }
        out
    }
}

/// `γ(ker T_X)`.
pub fn boundary_space<T: Real>(b: &AbstractBVP<T>) -> Result<SubspaceBasis<T>> {
    boundary_space_of(b, &b.t)
}

fn boundary_space_of<T: Real>(b: &AbstractBVP<T>, t: &CMatrix<T>) -> Result<SubspaceBasis<T>> {
    let ker = null_space(&b.restrict(t), rank_tol());
    let gamma = b.gamma_plus();
    // ker is orthonormal, so ‖γ‖ is the scale against which γ(ker) is measured
    SubspaceBasis::from_span_scaled(&(&gamma * ker), rank_tol(), crate::linalg::spectral_norm(&gamma))
}

/// Augmented operator `[[0, T*], [T, 0]]` of `T : C^c → C^r` with the structure maps.
#[derive(Debug, Clone)]
pub struct Augmentation<T: Real> {
    pub matrix: CMatrix<T>,
    /// `C^{c+r} → C^c`, first block.
    pub pi: CMatrix<T>,
    /// `C^{c+r} → C^r`, second block.
    pub pi_prime: CMatrix<T>,
    pub iota: CMatrix<T>,
    pub iota_prime: CMatrix<T>,
}

/// Augmentation with Euclidean inner products on both sides.
pub fn augment<T: Real>(t: &CMatrix<T>) -> Augmentation<T> {
    augment_with(t, &identity(t.ncols()), &identity(t.nrows())).expect("identity grams")
}

/// Augmentation with `T* = G_c^{-1} T^H G_r`.
pub fn augment_with<T: Real>(t: &CMatrix<T>, gram_domain: &CMatrix<T>, gram_range: &CMatrix<T>) -> Result<Augmentation<T>> {
    let (r, c) = t.shape();
    let tstar = crate::linalg::lu_solve(gram_domain, &(t.adjoint() * gram_range))?;
    let n = r + c;
    let mut m = CMatrix::zeros(n, n);
    m.view_mut((0, c), (c, r)).copy_from(&tstar);
    m.view_mut((c, 0), (r, c)).copy_from(t);
    let mut pi = CMatrix::zeros(c, n);
    pi.view_mut((0, 0), (c, c)).copy_from(&identity::<T>(c));
    let mut pi_prime = CMatrix::zeros(r, n);
    pi_prime.view_mut((0, c), (r, r)).copy_from(&identity::<T>(r));
    let iota = pi.adjoint();
    let iota_prime = pi_prime.adjoint();
    Ok(Augmentation { matrix: m, pi, pi_prime, iota, iota_prime })
}

#[derive(Debug, Clone)]
pub struct Modification<T: Real> {
    pub t_mod: CMatrix<T>,
    pub pi_sh: CMatrix<T>,
    /// Dimension of `ker T_X ∩ ker γ`.
    pub shadow_dim: usize,
}

/// Adds the gram-orthogonal projector onto the shadow space `ker T_X ∩ ker γ`.
pub fn modify_shadow<T: Real>(b: &AbstractBVP<T>) -> Result<Modification<T>> {
    let tx = b.restrict(&b.t);
    let stacked = crate::linalg::vstack(&tx, &b.gamma_plus())?;
    let shadow = null_space(&stacked, rank_tol());
    let n = b.dim();
    if shadow.ncols() == 0 {
        return Ok(Modification { t_mod: b.t.clone(), pi_sh: CMatrix::zeros(n, n), shadow_dim: 0 });
    }
    let sb = SubspaceBasis::new(shadow.clone(), rank_tol())?;
    let rg_t = SubspaceBasis::from_span(&tx, rank_tol())?;
    let overlap = if sb.dim() + rg_t.dim() > tx.nrows() {
        T::zero()
    } else if rg_t.dim() == 0 {
        T::one()
    } else {
        smallest_singular_value(&crate::linalg::hstack(&sb.orthonormal(), &rg_t.orthonormal())?)
    };
    if overlap <= rank_tol() {
        return Err(Error::SideConditionViolated { overlap: overlap.as_f64() });
    }
    let pi_x = orth_projector(&sb, &b.gram_plus())?.into_matrix();
    let pi_sh = b.embed_plus_square(&pi_x);
    Ok(Modification { t_mod: &b.t + &pi_sh, pi_sh, shadow_dim: shadow.ncols() })
}

/// `T + αΠ` with the smallest singular value as invertibility certificate.
pub fn perturb_real<T: Real>(t: &CMatrix<T>, pi: &CMatrix<T>, alpha: T) -> (CMatrix<T>, T) {
    let m = t + pi * Complex::new(alpha, T::zero());
    let s = smallest_singular_value(&m);
    (m, s)
}

/// `T + iαΠ` with the smallest singular value as invertibility certificate.
pub fn perturb_imag<T: Real>(t: &CMatrix<T>, pi: &CMatrix<T>, alpha: T) -> (CMatrix<T>, T) {
    let m = t + pi * Complex::new(T::zero(), alpha);
    let s = smallest_singular_value(&m);
    (m, s)
}

/// `W = χ² K` (entrywise cutoff), certified to satisfy `W ⊕ K^⊥ = C^n` for the gram inner
/// product.
pub fn complement_in_minus<T: Real>(k: &SubspaceBasis<T>, b: &AbstractBVP<T>, chi: &[T]) -> Result<SubspaceBasis<T>> {
    let n = b.dim();
    if chi.len() != n || k.ambient_dim() != n {
        return Err(Error::DimensionMismatch("cutoff length".into()));
    }
    if b.plus.iter().zip(chi).any(|(&p, &c)| p && c != T::zero()) {
        return Err(Error::InvalidArgument("cutoff must vanish on the plus side".into()));
    }
    if k.dim() == 0 {
        return Ok(SubspaceBasis::zero(n));
    }
    // condition (i): no kernel vector lives on the plus side alone
    let q = k.orthonormal();
    let minus_rows = q.select_rows(&b.minus_indices());
    if minus_rows.nrows() < q.ncols() || smallest_singular_value(&minus_rows) <= rank_tol() {
        return Err(Error::UCPViolated);
    }
    let mut w = k.basis().clone();
    for i in 0..n {
        let c2 = Complex::new(chi[i] * chi[i], T::zero());
        for j in 0..w.ncols() {
            w[(i, j)] *= c2;
        }
    }
    let w = SubspaceBasis::new(w, rank_tol()).map_err(|_| Error::UCPViolated)?;
    let perp = gram_complement(k, &b.gram);
    let report = direct_sum_check(&w, &perp, rank_tol())?;
    if !report.is_direct_sum {
        return Err(Error::NotComplementary { gap: report.gap.as_f64(), mu: None });
    }
    Ok(w)
}

/// `K^⊥` for `<u, v> = u^H G v`.
pub fn gram_complement<T: Real>(k: &SubspaceBasis<T>, gram: &CMatrix<T>) -> SubspaceBasis<T> {
    let n = k.ambient_dim();
    if k.dim() == 0 {
        return SubspaceBasis::from_span(&identity(n), rank_tol()).expect("identity span");
    }
    let c = k.basis().adjoint() * gram;
    SubspaceBasis::from_span(&null_space(&c, rank_tol()), rank_tol()).expect("orthonormal null space")
}

#[derive(Debug, Clone)]
pub struct InvertibleExtension<T: Real> {
    pub t_final: CMatrix<T>,
    pub pi_sh: CMatrix<T>,
    pub pi_comp: CMatrix<T>,
    pub min_sv: T,
}

/// Default cutoff: zero on the plus side, one on the minus side.
pub fn minus_indicator<T: Real>(b: &AbstractBVP<T>) -> Vec<T> {
    b.plus.iter().map(|&p| if p { T::zero() } else { T::one() }).collect()
}

/// `T + Π_sh + Π_comp`, invertible and with the boundary data space of `T`.
pub fn make_invertible<T: Real>(b: &AbstractBVP<T>) -> Result<InvertibleExtension<T>> {
    make_invertible_with(b, &minus_indicator(b))
}

pub fn make_invertible_with<T: Real>(b: &AbstractBVP<T>, chi: &[T]) -> Result<InvertibleExtension<T>> {
    let tol = rank_tol::<T>();
    let tstar = gram_adjoint(&b.t, &b.gram)?;
    if (&tstar - &b.t).norm() > tol * scale(&b.t) {
        return Err(Error::InvalidArgument("operator is not self-adjoint for the gram".into()));
    }
    let modif = modify_shadow(b)?;
    let n = b.dim();
    let k = SubspaceBasis::from_span(&null_space(&modif.t_mod, tol), tol)?;
    let pi_comp = if k.dim() == 0 {
        CMatrix::zeros(n, n)
    } else {
        let w = complement_in_minus(&k, b, chi)?;
        orth_projector(&w, &b.gram)?.into_matrix()
    };
    let t_final = &modif.t_mod + &pi_comp;
    let min_sv = smallest_singular_value(&t_final);
    if min_sv <= tol * scale(&t_final) {
        return Err(Error::NotInvertible);
    }
    Ok(InvertibleExtension { t_final, pi_sh: modif.pi_sh, pi_comp, min_sv })
}

/// True iff the plus/minus off-diagonal blocks of `op` vanish to tolerance.
pub fn restrict_check<T: Real>(op: &CMatrix<T>, plus: &[bool]) -> bool {
    let tol = T::tol(1e-10) * scale(op);
    let n = op.nrows();
    let mut off = T::zero();
    for i in 0..n {
        for j in 0..n {
            if plus[i] != plus[j] {
                off += op[(i, j)].norm_sqr();
            }
        }
    }
    off.sqrt() <= tol
}

/// Dimensions of a seeded self-adjoint instance: `p` plus and `q` minus coordinates, a shadow
/// space of dimension `r`, `e` further plus-side solutions seen by `γ`, a kernel of dimension
/// `k` for the modified operator and `d ≥ e` boundary rows.
#[derive(Debug, Clone, Copy)]
pub struct InstanceShape {
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub e: usize,
    pub k: usize,
    pub d: usize,
}

/// Seeded Hermitian instance with a prescribed shadow space and a kernel of `T + Π_sh` that is
/// seen on the minus side.
///
/// `T_X` has kernel `S ⊕ N` with `γ S = 0` and `γ` injective on `N`; the full `T + Π_S` has the
/// kernel spanned by `[X; Y]` with `Y` injective. The blocks are chosen so that `T + Π_S` is
/// Hermitian with exactly that kernel.
pub fn seeded_instance<T: Real>(shape: InstanceShape, seed: u64) -> Result<AbstractBVP<T>> {
    let InstanceShape { p, q, r, e, k, d } = shape;
    if r + e > p || k > q || d > p - r || d < e {
        return Err(Error::InvalidArgument(format!("infeasible instance shape {shape:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p + q;
    let v = orthonormal_basis(&random_complex::<T, _>(&mut rng, p, p), T::zero());
    let lambdas: Vec<T> = (0..p)
        .map(|i| if i < r + e { T::zero() } else { T::lit(rng.random_range(0.5..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 }) })
        .collect();
    let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(p, lambdas.iter().map(|&l| Complex::new(l, T::zero()))));
    let a0 = &v * diag * v.adjoint();
    let s = v.columns(0, r).into_owned();
    let pi_s = &s * s.adjoint();
    let a1 = &a0 + &pi_s;
    let x = random_complex::<T, _>(&mut rng, p, k);
    let y = random_complex::<T, _>(&mut rng, q, k);
    let (bm, cm) = if k == 0 {
        let b0 = random_complex::<T, _>(&mut rng, p, q);
        let c0 = random_complex::<T, _>(&mut rng, q, q);
        let c0 = (&c0 + c0.adjoint()) * Complex::new(T::lit(0.5), T::zero()) + identity::<T>(q) * Complex::new(T::lit(3.0), T::zero());
        (b0, c0)
    } else {
        let y_pinv = crate::linalg::lu_solve(&(y.adjoint() * &y), &y.adjoint())?;
        let proj_y = identity::<T>(q) - &y * &y_pinv;
        let b0 = random_complex::<T, _>(&mut rng, p, q);
        let bm = -(&a1 * &x) * &y_pinv + b0 * &proj_y;
        let z = -(bm.adjoint() * &x);
        let c0 = random_complex::<T, _>(&mut rng, q, q);
        let c0 = (&c0 + c0.adjoint()) * Complex::new(T::lit(0.5), T::zero());
        let cm = &z * &y_pinv + y_pinv.adjoint() * z.adjoint() - y_pinv.adjoint() * y.adjoint() * &z * &y_pinv
            + &proj_y * c0 * &proj_y;
        (bm, cm)
    };
    let mut t = CMatrix::zeros(n, n);
    t.view_mut((0, 0), (p, p)).copy_from(&a0);
    t.view_mut((0, p), (p, q)).copy_from(&bm);
    t.view_mut((p, 0), (q, p)).copy_from(&bm.adjoint());
    t.view_mut((p, p), (q, q)).copy_from(&cm);
    // symmetrize away rounding
    let t = (&t + t.adjoint()) * Complex::new(T::lit(0.5), T::zero());
    let g = random_complex::<T, _>(&mut rng, d, p) * (identity::<T>(p) - &pi_s);
    let mut gamma = CMatrix::zeros(d, n);
    gamma.view_mut((0, 0), (d, p)).copy_from(&g);
    let plus = (0..n).map(|i| i < p).collect();
    AbstractBVP::with_sides(t, gamma, identity(n), plus)
}

/// Seeded Hermitian `T` with kernel of dimension `kernel_dim`.
pub fn random_hermitian_with_kernel<T: Real, R: Rng>(rng: &mut R, n: usize, kernel_dim: usize) -> CMatrix<T> {
    let q = orthonormal_basis(&random_complex::<T, _>(rng, n, n), T::zero());
    let d: Vec<Complex<T>> = (0..n)
        .map(|i| {
            if i < kernel_dim {
                Complex::new(T::zero(), T::zero())
            } else {
                let mag = rng.random_range(0.5..2.0);
                Complex::new(T::lit(if rng.random_bool(0.5) { mag } else { -mag }), T::zero())
            }
        })
        .collect();
    let t = &q * CMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)) * q.adjoint();
    (&t + t.adjoint()) * Complex::new(T::lit(0.5), T::zero())
}

/// Hermitian check used by callers that build their own instances.
pub fn is_self_adjoint<T: Real>(t: &CMatrix<T>) -> bool {
    is_hermitian(t, T::tol(1e-12))
}

/// How `rg T` and `rg Π` sit inside the ambient space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeRelation {
    /// `rg T ⊕ rg Π = H`.
    DirectSum,
    /// `rg T + rg Π = H` with a nontrivial intersection.
    Sum,
    /// `rg T + rg Π ≠ H`.
    Deficient,
}

/// Classifies the ranges of `t` and `pi`; the second value is the smallest singular value of
/// the concatenated orthonormal range bases restricted to the relevant count.
pub fn range_relation<T: Real>(t: &CMatrix<T>, pi: &CMatrix<T>, margin: T) -> Result<(RangeRelation, T)> {
    let n = t.nrows();
    let rt = orthonormal_basis(t, margin);
    let rp = orthonormal_basis(pi, margin);
    let both = crate::linalg::hstack(&rt, &rp)?;
    let sv = crate::linalg::singular_values(&both);
    // the n-th singular value decides the sum, the last one directness
    let span_sv = if sv.len() >= n { sv[n - 1] } else { T::zero() };
    if span_sv <= margin {
        return Ok((RangeRelation::Deficient, span_sv));
    }
    if both.ncols() == n {
        Ok((RangeRelation::DirectSum, span_sv))
    } else {
        Ok((RangeRelation::Sum, span_sv))
    }
}

/// Gram-self-adjoint operator and gram-orthogonal projector with a prescribed range relation.
#[derive(Debug, Clone)]
pub struct LemmaInstance<T: Real> {
    pub t: CMatrix<T>,
    pub pi: CMatrix<T>,
    pub gram: CMatrix<T>,
    pub relation: RangeRelation,
}

fn random_gram<T: Real, R: Rng>(rng: &mut R, n: usize) -> CMatrix<T> {
    let a = random_complex::<T, _>(rng, n, n);
    let g = a.adjoint() * &a * Complex::new(T::lit(1.0 / n as f64), T::zero()) + identity::<T>(n);
    (&g + g.adjoint()) * Complex::new(T::lit(0.5), T::zero())
}

/// Seeded instance of dimension `n ≥ 2`. `T = G^{-1} H` with `H` Hermitian of kernel dimension
/// `k ≥ 1`, so `rg T` is the gram complement of `ker T`; `rg Π` is chosen generic of dimension
/// `k` (direct sum), generic of larger dimension (sum), or squeezed into `rg T` plus a
/// `(k-1)`-dimensional generic part (deficient).
pub fn lemma_instance<T: Real>(relation: RangeRelation, n: usize, seed: u64) -> Result<LemmaInstance<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument("lemma instances need n >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gram = random_gram::<T, _>(&mut rng, n);
    let k = rng.random_range(1..n);
    let h = random_hermitian_with_kernel::<T, _>(&mut rng, n, k);
    let t = crate::linalg::lu_solve(&gram, &h)?;
    let dim_pi = match relation {
        RangeRelation::DirectSum => k,
        RangeRelation::Sum => rng.random_range(k + 1..=n),
        RangeRelation::Deficient => k - 1 + rng.random_range(0..=(n - k).min(2)),
    };
    let u = match relation {
        RangeRelation::Deficient => {
            let r = dim_pi + 1 - k;
            let rot = orthonormal_basis(&random_complex::<T, _>(&mut rng, n - k, n - k), T::zero());
            let in_range = orthonormal_basis(&t, rank_tol()) * rot.columns(0, r);
            crate::linalg::hstack(&in_range, &random_complex::<T, _>(&mut rng, n, k - 1))?
        }
        _ => random_complex::<T, _>(&mut rng, n, dim_pi),
    };
    let pi = if u.ncols() == 0 {
        CMatrix::zeros(n, n)
    } else {
        orth_projector(&SubspaceBasis::from_span(&u, rank_tol())?, &gram)?.into_matrix()
    };
    Ok(LemmaInstance { t, pi, gram, relation })
}

/// The remark case `T = Π = I`.
pub fn identity_instance<T: Real>(n: usize) -> LemmaInstance<T> {
    LemmaInstance { t: identity(n), pi: identity(n), gram: identity(n), relation: RangeRelation::Sum }
}

/// Checks both parts of the inversion lemma on one instance: `(a)` for direct sums, `(b)` in
/// both directions. Returns whether the prediction held and the certificates of `T + Π` and
/// `T + iΠ`.
pub fn check_inversion_lemma<T: Real>(inst: &LemmaInstance<T>, margin: T) -> Result<(bool, T, T)> {
    let (rel, _) = range_relation(&inst.t, &inst.pi, margin)?;
    let (_, s_real) = perturb_real(&inst.t, &inst.pi, T::one());
    let (_, s_imag) = perturb_imag(&inst.t, &inst.pi, T::one());
    let ok = rel == inst.relation
        && match rel {
            RangeRelation::DirectSum => s_real > margin && s_imag > margin,
            RangeRelation::Sum => s_imag > margin,
            RangeRelation::Deficient => s_imag <= margin && s_real <= margin,
        };
    Ok((ok, s_real, s_imag))
}

/// Seeded kernel and cutoff for the complement lemma: `K` of dimension `k` seen on the minus
/// side, and a cutoff that is `1` on most minus coordinates and in `(0, 1)` on the rest.
pub fn complement_instance<T: Real>(p: usize, q: usize, k: usize, seed: u64) -> Result<(SubspaceBasis<T>, AbstractBVP<T>, Vec<T>)> {
    if k > q {
        return Err(Error::InvalidArgument("kernel larger than the minus side".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p + q;
    let gram = block_gram::<T, _>(&mut rng, p, q);
    let kb = SubspaceBasis::new(random_complex::<T, _>(&mut rng, n, k), rank_tol())?;
    let plus: Vec<bool> = (0..n).map(|i| i < p).collect();
    let chi = (0..n)
        .map(|i| if i < p { T::zero() } else if i < p + q / 2 { T::lit(rng.random_range(0.2..1.0)) } else { T::one() })
        .collect();
    let b = AbstractBVP::with_sides(CMatrix::zeros(n, n), CMatrix::zeros(0, n), gram, plus)?;
    Ok((kb, b, chi))
}

/// Gram that is block diagonal for the plus/minus split, as for an `L²` pairing.
fn block_gram<T: Real, R: Rng>(rng: &mut R, p: usize, q: usize) -> CMatrix<T> {
    crate::linalg::block_diag(&random_gram::<T, _>(rng, p), &random_gram::<T, _>(rng, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_real, projector_from_pair, subspace_distance};

    fn bvp(t: &[f64], n: usize, gamma: &[f64], d: usize) -> AbstractBVP<f64> {
        AbstractBVP::new(from_real(n, n, t), from_real(d, n, gamma)).unwrap()
    }

    #[test]
    fn boundary_space_examples() {
        let full = bvp(&[0.0; 4], 2, &[1.0, 0.0, 0.0, 1.0], 2);
        assert_eq!(boundary_space(&full).unwrap().dim(), 2);
        let inv = bvp(&[2.0, 1.0, 1.0, 2.0], 2, &[1.0, 0.0], 1);
        assert_eq!(boundary_space(&inv).unwrap().dim(), 0);
        let b = bvp(&[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0], 3, &[1.0, 0.0, 0.0], 1);
        let s = boundary_space(&b).unwrap();
        assert_eq!(s.dim(), 1);
        assert!((s.basis()[(0, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn augment_examples() {
        assert_eq!(augment(&CMatrix::<f64>::zeros(1, 1)).matrix, CMatrix::zeros(2, 2));
        let one = augment(&from_real::<f64>(1, 1, &[1.0]));
        assert_eq!(one.matrix, from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random_complex::<f64, _>(&mut rng, 3, 2);
        let a = augment(&t);
        assert!((&a.pi_prime * &a.matrix - &t * &a.pi).norm() < 1e-15);
        assert!((&a.matrix * &a.iota - &a.iota_prime * &t).norm() < 1e-15);
        assert!(is_self_adjoint(&a.matrix));
    }

    #[test]
    fn modification_examples() {
        let b = bvp(&[2.0, 1.0, 1.0, 3.0], 2, &[1.0, 0.0], 1);
        let m = modify_shadow(&b).unwrap();
        assert_eq!(m.pi_sh, CMatrix::zeros(2, 2));

        let b = bvp(&[0.0, 0.0, 0.0, 1.0], 2, &[0.0, 1.0], 1);
        let m = modify_shadow(&b).unwrap();
        assert!((m.t_mod.clone() - identity::<f64>(2)).norm() < 1e-14);
        assert_eq!(boundary_space(&b).unwrap().dim(), 0);
        let bm = AbstractBVP::new(m.t_mod, b.gamma.clone()).unwrap();
        assert_eq!(boundary_space(&bm).unwrap().dim(), 0);
    }

    #[test]
    fn designed_shadow_instance() {
        let shape = InstanceShape { p: 4, q: 2, r: 2, e: 1, k: 1, d: 1 };
        let b = seeded_instance::<f64>(shape, 17).unwrap();
        let m = modify_shadow(&b).unwrap();
        assert_eq!(m.shadow_dim, 2);
        let bm = AbstractBVP::with_sides(m.t_mod.clone(), b.gamma.clone(), b.gram.clone(), b.plus.clone()).unwrap();
        assert!(subspace_distance(&boundary_space(&b).unwrap(), &boundary_space(&bm).unwrap()) < 1e-10);
    }

    #[test]
    fn side_condition_detected() {
        // nilpotent T: the shadow e1 lies in rg T
        let t = from_real::<f64>(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let b = AbstractBVP::new(t, from_real(1, 2, &[0.0, 1.0])).unwrap();
        assert!(matches!(modify_shadow(&b), Err(Error::SideConditionViolated { .. })));
    }

    #[test]
    fn perturbation_examples() {
        let t = from_real::<f64>(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let pi = from_real::<f64>(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        assert!(perturb_real(&t, &pi, 1.0).1 > 0.5);
        assert!(perturb_imag(&t, &pi, 1.0).1 > 0.5);
        let id = identity::<f64>(3);
        assert!((perturb_imag(&id, &id, 1.0).1 - 2f64.sqrt()).abs() < 1e-14);
        let t3 = from_real::<f64>(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let pi3 = from_real::<f64>(3, 3, &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(perturb_imag(&t3, &pi3, 1.0).1 < 1e-14);
    }

    #[test]
    fn complement_examples() {
        let plus = vec![true, false];
        let b = AbstractBVP::with_sides(CMatrix::<f64>::zeros(2, 2), from_real(1, 2, &[1.0, 0.0]), identity(2), plus).unwrap();
        let chi = [0.0, 1.0];
        let k = SubspaceBasis::new(from_real(2, 1, &[0.0, 1.0]), 1e-8).unwrap();
        let w = complement_in_minus(&k, &b, &chi).unwrap();
        assert!(subspace_distance(&w, &k) < 1e-15);

        let k = SubspaceBasis::new(from_real(2, 1, &[1.0, 1.0]), 1e-8).unwrap();
        let w = complement_in_minus(&k, &b, &chi).unwrap();
        let want = SubspaceBasis::new(from_real(2, 1, &[0.0, 1.0]), 1e-8).unwrap();
        assert!(subspace_distance(&w, &want) < 1e-15);

        let k = SubspaceBasis::new(from_real(2, 1, &[1.0, 0.0]), 1e-8).unwrap();
        assert_eq!(complement_in_minus(&k, &b, &chi).unwrap_err(), Error::UCPViolated);
    }

    #[test]
    fn make_invertible_small_cases() {
        let b = bvp(&[2.0, 1.0, 1.0, 2.0], 2, &[1.0, 0.0], 1);
        let r = make_invertible(&b).unwrap();
        assert_eq!(r.pi_sh, CMatrix::zeros(2, 2));
        assert_eq!(r.pi_comp, CMatrix::zeros(2, 2));

        // T = 0 on C^2, γ = (1 0), coordinate 2 on the minus side: the kernel of T + Π_sh
        // contains e1, which lives on the plus side alone
        let b = AbstractBVP::with_sides(CMatrix::<f64>::zeros(2, 2), from_real(1, 2, &[1.0, 0.0]), identity(2), vec![true, false])
            .unwrap();
        assert_eq!(make_invertible(&b).unwrap_err(), Error::UCPViolated);
    }

    #[test]
    fn three_dimensional_trace_through() {
        // plus = {0, 1}, minus = {2}; T couples coordinate 1 to the minus side
        let t = from_real::<f64>(3, 3, &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        let b = AbstractBVP::with_sides(t, from_real(1, 3, &[1.0, 0.0, 0.0]), identity(3), vec![true, true, false]).unwrap();
        // T_X = 0, ker γ = span e2: shadow e2
        let m = modify_shadow(&b).unwrap();
        assert_eq!(m.shadow_dim, 1);
        assert!((m.pi_sh[(1, 1)].re - 1.0).abs() < 1e-14);
        // T + Π_sh = [[0,0,0],[0,1,1],[0,1,0]] has kernel e1, supported on the plus side
        assert_eq!(make_invertible(&b).unwrap_err(), Error::UCPViolated);

        // with T_{00} coupled to the minus side the kernel is seen there
        let t = from_real::<f64>(3, 3, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let b = AbstractBVP::with_sides(t, from_real(1, 3, &[1.0, 0.0, 0.0]), identity(3), vec![true, true, false]).unwrap();
        let r = make_invertible(&b).unwrap();
        assert!(r.min_sv > 0.1);
        assert!(restrict_check(&r.pi_comp, &b.plus));
        let fin = AbstractBVP::with_sides(r.t_final.clone(), b.gamma.clone(), b.gram.clone(), b.plus.clone()).unwrap();
        assert!(subspace_distance(&boundary_space(&b).unwrap(), &boundary_space(&fin).unwrap()) < 1e-12);
    }

    #[test]
    fn seeded_twelve_dimensional() {
        let shape = InstanceShape { p: 6, q: 6, r: 1, e: 2, k: 2, d: 3 };
        let b = seeded_instance::<f64>(shape, 2024).unwrap();
        let r = make_invertible(&b).unwrap();
        assert!(r.min_sv > 1e-6);
        let fin = AbstractBVP::with_sides(r.t_final.clone(), b.gamma.clone(), b.gram.clone(), b.plus.clone()).unwrap();
        assert!(subspace_distance(&boundary_space(&b).unwrap(), &boundary_space(&fin).unwrap()) < 1e-10);
        assert!(restrict_check(&r.pi_comp, &b.plus));
    }

    #[test]
    fn inversion_lemma_families() {
        for seed in 0..40 {
            for rel in [RangeRelation::DirectSum, RangeRelation::Sum, RangeRelation::Deficient] {
                let inst = lemma_instance::<f64>(rel, 2 + (seed as usize % 5), seed).unwrap();
                let (ok, sr, si) = check_inversion_lemma(&inst, 1e-8).unwrap();
                assert!(ok, "{rel:?} seed {seed}: {sr} {si}");
            }
        }
        let (ok, _, si) = check_inversion_lemma(&identity_instance::<f64>(3), 1e-8).unwrap();
        assert!(ok && (si - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn complement_lemma_instances() {
        for seed in 0..20 {
            let (k, b, chi) = complement_instance::<f64>(3, 4, 2, seed).unwrap();
            let w = complement_in_minus(&k, &b, &chi).unwrap();
            assert_eq!(w.dim(), 2);
        }
    }

    #[test]
    fn restrict_check_examples() {
        assert!(restrict_check(&from_real::<f64>(2, 2, &[1.0, 0.0, 0.0, 2.0]), &[true, false]));
        assert!(!restrict_check(&from_real::<f64>(2, 2, &[1.0, 1.0, 1.0, 1.0]), &[true, false]));
        let w = SubspaceBasis::new(from_real::<f64>(3, 1, &[0.0, 1.0, 2.0]), 1e-8).unwrap();
        let pi = orth_projector(&w, &identity(3)).unwrap();
        assert!(restrict_check(pi.matrix(), &[true, false, false]));
    }

    #[test]
    fn augmented_projector_restricts() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let t = random_complex::<f64, _>(&mut rng, 2, 3);
        let a = augment(&t);
        let bt = SubspaceBasis::from_span(&null_space(&t, 1e-8), 1e-8).unwrap();
        let bts = SubspaceBasis::from_span(&null_space(&t.adjoint(), 1e-8), 1e-8).unwrap();
        // boundary data = full values, γ = identity on each block
        let bbar = SubspaceBasis::from_span(&crate::linalg::block_diag(bt.basis(), bts.basis()), 1e-8).unwrap();
        let comp = gram_complement(&bbar, &identity(5));
        let cbar = projector_from_pair(&bbar, &comp).unwrap();
        let c = &a.pi * cbar.matrix() * &a.iota;
        assert!((&c * &c - &c).norm() < 1e-12);
        let rc = SubspaceBasis::from_span(&c, 1e-8).unwrap();
        assert!(subspace_distance(&rc, &bt) < 1e-12);
    }
}
