//! Numerical representations into U(n), SU(n), PU(n): relator checking,
//! lifting to the universal cover R x SU(n), the deck action on lifts, the
//! obstruction class of a surface-group representation, and canonical forms
//! for commuting unitary tuples.
//!
//! PU(n) elements are represented by unitary matrices compared up to a unit
//! scalar; no quotient data structure is used. All randomness is seeded and
//! deterministic.

use crate::presentation::{Presentation, Word};
use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use thiserror::Error;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

/// Default residual tolerance for all checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Eigenvalue-angle clustering threshold for the simultaneous
/// diagonalization.
const CLUSTER_TOL: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum MatrixRepError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix {index} is not unitary (residual {residual:.3e})")]
    NotUnitary { index: usize, residual: f64 },
    #[error("matrix {index} does not have determinant 1 (residual {residual:.3e})")]
    NotDetOne { index: usize, residual: f64 },
    #[error("presentation is not exponent-canceling; lifting is defined only there")]
    NotExponentCanceling,
    #[error("not a representation: relator {relator} has residual {residual:.3e}")]
    NotARepresentation { relator: usize, residual: f64 },
    #[error("deck assignment is not a homomorphism: relator {relator} has net sum {sum}")]
    NotAHomomorphism { relator: usize, sum: i64 },
    #[error("matrices do not commute (residual {residual:.3e})")]
    NotCommuting { residual: f64 },
    #[error("obstruction product is between classes: best class {best} at residual {residual:.3e}")]
    AmbiguousClass { best: usize, residual: f64 },
    #[error("ill-conditioned input: {0}")]
    IllConditioned(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    U(usize),
    SU(usize),
    PU(usize),
}

impl Target {
    pub fn n(&self) -> usize {
        match self {
            Target::U(n) | Target::SU(n) | Target::PU(n) => *n,
        }
    }
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Target::U(n) => write!(f, "U({n})"),
            Target::SU(n) => write!(f, "SU({n})"),
            Target::PU(n) => write!(f, "PU({n})"),
        }
    }
}

/// A tuple of unitary matrices, one per generator of an attached
/// presentation. For PU targets the matrices are unitary representatives of
/// their scalar classes.
#[derive(Debug, Clone)]
pub struct MatrixRep {
    pub target: Target,
    pub generators: Vec<String>,
    pub matrices: Vec<CMat>,
    pub tolerance: f64,
}

fn unitarity_residual(m: &CMat) -> f64 {
    let n = m.nrows();
    (m.adjoint() * m - CMat::identity(n, n)).norm()
}

impl MatrixRep {
    pub fn new(
        target: Target,
        generators: Vec<String>,
        matrices: Vec<CMat>,
        tolerance: f64,
    ) -> Result<Self, MatrixRepError> {
        if tolerance <= 0.0 {
            return Err(MatrixRepError::InvalidParameter("tolerance must be positive".into()));
        }
        if generators.len() != matrices.len() {
            return Err(MatrixRepError::ShapeMismatch(format!(
                "{} generator names but {} matrices",
                generators.len(),
                matrices.len()
            )));
        }
        let n = target.n();
        for (i, m) in matrices.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(MatrixRepError::ShapeMismatch(format!(
                    "matrix {i} is {}x{}, target is {target}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            let res = unitarity_residual(m);
            if res > tolerance * n as f64 {
                return Err(MatrixRepError::NotUnitary { index: i, residual: res });
            }
            if let Target::SU(_) = target {
                let res = (m.determinant() - C64::new(1.0, 0.0)).norm();
                if res > tolerance {
                    return Err(MatrixRepError::NotDetOne { index: i, residual: res });
                }
            }
        }
        Ok(MatrixRep { target, generators, matrices, tolerance })
    }

    pub fn n(&self) -> usize {
        self.target.n()
    }
}

/// Evaluate a word in the given matrices, using the adjoint as inverse
/// (exact for unitary letters).
pub fn evaluate_word(word: &Word, matrices: &[CMat], n: usize) -> CMat {
    let mut acc = CMat::identity(n, n);
    for &(g, e) in word.letters() {
        if e > 0 {
            acc *= &matrices[g];
        } else {
            acc *= matrices[g].adjoint();
        }
    }
    acc
}

/// The nearest unit scalar ζ with ‖M − ζI‖ minimal (unit phase of the
/// trace; falls back to 1 when the trace vanishes).
fn nearest_scalar(m: &CMat) -> C64 {
    let t = m.trace();
    if t.norm() < 1e-300 {
        C64::new(1.0, 0.0)
    } else {
        t / t.norm()
    }
}

/// Frobenius distance from M to the nearest unit-scalar multiple of the
/// identity, computed by direct subtraction (the closed-form
/// ‖M‖² − 2|tr M| + n cancels catastrophically near zero).
fn scalar_residual(m: &CMat) -> f64 {
    let n = m.nrows();
    (m - CMat::identity(n, n) * nearest_scalar(m)).norm()
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub passed: bool,
    pub residuals: Vec<f64>,
}

/// Verify each relator of `pres` within the representation's tolerance: in
/// U/SU targets the relator must evaluate to I, in PU to a unit scalar ζI.
pub fn check_representation(
    rep: &MatrixRep,
    pres: &Presentation,
) -> Result<CheckReport, MatrixRepError> {
    if rep.matrices.len() != pres.num_generators() {
        return Err(MatrixRepError::ShapeMismatch(format!(
            "{} matrices for {} generators",
            rep.matrices.len(),
            pres.num_generators()
        )));
    }
    let n = rep.n();
    let residuals: Vec<f64> = pres
        .relators()
        .iter()
        .map(|r| {
            let m = evaluate_word(r, &rep.matrices, n);
            match rep.target {
                Target::U(_) | Target::SU(_) => (&m - CMat::identity(n, n)).norm(),
                Target::PU(_) => scalar_residual(&m),
            }
        })
        .collect();
    let passed = residuals.iter().all(|&r| r <= rep.tolerance);
    Ok(CheckReport { passed, residuals })
}

/// A representation into the universal cover R x SU(n) of U(n): per
/// generator a real part x and an SU(n) part h, projecting to e^{ix} h.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedRep {
    pub real_parts: Vec<f64>,
    pub su_parts: Vec<CMat>,
}

impl LiftedRep {
    pub fn n(&self) -> usize {
        self.su_parts.first().map_or(0, |m| m.nrows())
    }

    /// Project back down to U(n): g = e^{ix} h per generator.
    pub fn project(&self) -> Vec<CMat> {
        self.real_parts
            .iter()
            .zip(&self.su_parts)
            .map(|(&x, h)| h * C64::new(0.0, x).exp())
            .collect()
    }

    /// Per-relator residuals in R x SU(n): |sum of real parts| and
    /// ‖product of SU parts − I‖.
    pub fn relator_residuals(&self, pres: &Presentation) -> Vec<(f64, f64)> {
        let n = self.n();
        pres.relators()
            .iter()
            .map(|r| {
                let real: f64 = r
                    .letters()
                    .iter()
                    .map(|&(g, e)| e as f64 * self.real_parts[g])
                    .sum();
                let su = evaluate_word(r, &self.su_parts, n);
                (real.abs(), (&su - CMat::identity(n, n)).norm())
            })
            .collect()
    }
}

/// Constructive lift to R x SU(n): x = Arg(det g)/n with the principal
/// branch Arg ∈ (−π, π], h = e^{−ix} g. Only defined for exponent-canceling
/// presentations (where the relators of the lift are again satisfied).
pub fn lift_to_universal_cover(
    rep: &MatrixRep,
    pres: &Presentation,
) -> Result<LiftedRep, MatrixRepError> {
    if matches!(rep.target, Target::PU(_)) {
        return Err(MatrixRepError::InvalidParameter(
            "lifting is defined for U(n)/SU(n) representations, not PU(n)".into(),
        ));
    }
    let (ec, _) = pres.is_exponent_canceling();
    if !ec {
        return Err(MatrixRepError::NotExponentCanceling);
    }
    let check = check_representation(rep, pres)?;
    if !check.passed {
        let (relator, &residual) = check
            .residuals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("at least one relator failed");
        return Err(MatrixRepError::NotARepresentation { relator, residual });
    }
    let n = rep.n();
    let mut real_parts = Vec::new();
    let mut su_parts = Vec::new();
    for g in &rep.matrices {
        let det = g.determinant();
        let x = det.arg() / n as f64; // Arg ∈ (−π, π]
        real_parts.push(x);
        su_parts.push(g * C64::new(0.0, -x).exp());
    }
    Ok(LiftedRep { real_parts, su_parts })
}

/// Act by the deck element φ: each generator's deck integer j acts as
/// (2πj/n, e^{−2πij/n} I), leaving the projection to U(n) unchanged. φ must
/// extend to a homomorphism: each relator's net φ-sum must vanish
/// (automatic for exponent-canceling presentations).
pub fn deck_act(
    phi: &[i64],
    lifted: &LiftedRep,
    pres: &Presentation,
) -> Result<LiftedRep, MatrixRepError> {
    if phi.len() != lifted.real_parts.len() || phi.len() != pres.num_generators() {
        return Err(MatrixRepError::ShapeMismatch(format!(
            "deck assignment has {} entries for {} generators",
            phi.len(),
            pres.num_generators()
        )));
    }
    for (i, r) in pres.relators().iter().enumerate() {
        let sum: i64 = r.letters().iter().map(|&(g, e)| e as i64 * phi[g]).sum();
        if sum != 0 {
            return Err(MatrixRepError::NotAHomomorphism { relator: i, sum });
        }
    }
    let n = lifted.n() as f64;
    Ok(LiftedRep {
        real_parts: lifted
            .real_parts
            .iter()
            .zip(phi)
            .map(|(&x, &j)| x + TAU * j as f64 / n)
            .collect(),
        su_parts: lifted
            .su_parts
            .iter()
            .zip(phi)
            .map(|(h, &j)| h * C64::new(0.0, -TAU * j as f64 / n).exp())
            .collect(),
    })
}

/// Obstruction class of a genus-g PU(n) representation: lift each
/// representative to SU(n) by dividing by an n-th root of its determinant,
/// form ∏ᵢ[ãᵢ, b̃ᵢ], and read off which root of unity ζ = e^{2πik/n} it is.
/// The class is independent of the branch choices and of conjugation.
pub fn obstruction_class(rep: &MatrixRep, genus: usize) -> Result<usize, MatrixRepError> {
    obstruction_class_with_branches(rep, genus, &vec![0; rep.matrices.len()])
}

/// Same, with an explicit n-th-root branch (0..n) per generator.
pub fn obstruction_class_with_branches(
    rep: &MatrixRep,
    genus: usize,
    branches: &[usize],
) -> Result<usize, MatrixRepError> {
    let n = match rep.target {
        Target::PU(n) if n >= 2 => n,
        Target::PU(_) => {
            return Err(MatrixRepError::InvalidParameter("need n ≥ 2".into()));
        }
        _ => {
            return Err(MatrixRepError::InvalidParameter(
                "obstruction class is defined for PU(n) representations".into(),
            ));
        }
    };
    if genus < 1 || rep.matrices.len() != 2 * genus || branches.len() != rep.matrices.len() {
        return Err(MatrixRepError::ShapeMismatch(format!(
            "genus {genus} needs {} matrices and branches, got {} and {}",
            2 * genus,
            rep.matrices.len(),
            branches.len()
        )));
    }
    let lifts: Vec<CMat> = rep
        .matrices
        .iter()
        .zip(branches)
        .map(|(m, &b)| {
            let det = m.determinant();
            // principal n-th root times the chosen extra root of unity
            let root = C64::new(0.0, det.arg() / n as f64 + TAU * b as f64 / n as f64).exp()
                * det.norm().powf(1.0 / n as f64);
            m / root
        })
        .collect();
    let dim = rep.n();
    let mut prod = CMat::identity(dim, dim);
    for pair in lifts.chunks(2) {
        let (a, b) = (&pair[0], &pair[1]);
        prod = prod * a * b * a.adjoint() * b.adjoint();
    }
    let res = scalar_residual(&prod);
    if res > rep.tolerance {
        return Err(MatrixRepError::NotARepresentation { relator: 0, residual: res });
    }
    let id = CMat::identity(dim, dim);
    let (best, best_res) = (0..n)
        .map(|k| {
            let zeta = C64::new(0.0, TAU * k as f64 / n as f64).exp();
            (k, (&prod - &id * zeta).norm())
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("n ≥ 2");
    if best_res > rep.tolerance {
        return Err(MatrixRepError::AmbiguousClass { best, residual: best_res });
    }
    Ok(best)
}

// --- simultaneous diagonalization -----------------------------------------

/// Hermitian and skew parts of a matrix, both Hermitian: A = H + iS.
fn hermitian_parts(a: &CMat) -> (CMat, CMat) {
    let ah = a.adjoint();
    let h = (a + &ah) * C64::new(0.5, 0.0);
    let s = (a - &ah) * C64::new(0.0, -0.5);
    (h, s)
}

fn select_columns(m: &CMat, idx: &[usize]) -> CMat {
    CMat::from_fn(m.nrows(), idx.len(), |i, j| m[(i, idx[j])])
}

fn set_columns(m: &mut CMat, idx: &[usize], cols: &CMat) {
    for (j, &target) in idx.iter().enumerate() {
        for i in 0..m.nrows() {
            m[(i, target)] = cols[(i, j)];
        }
    }
}

/// Group indices of `vals` into clusters of values within `tol` of their
/// neighbors (sorted, consecutive-gap grouping).
fn cluster_real(vals: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in idx {
        match clusters.last_mut() {
            Some(c) if (vals[i] - vals[*c.last().unwrap()]).abs() <= tol => c.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    clusters
}

/// Cluster unit-circle values by angle, merging across the 0/2π seam.
fn cluster_angles(vals: &[C64], tol: f64) -> Vec<Vec<usize>> {
    let angles: Vec<f64> = vals.iter().map(|v| v.arg().rem_euclid(TAU)).collect();
    let mut clusters = cluster_real(&angles, tol);
    if clusters.len() > 1 {
        let first = clusters.first().unwrap();
        let last = clusters.last().unwrap();
        let lo = angles[*first.first().unwrap()];
        let hi = angles[*last.last().unwrap()];
        if lo + TAU - hi <= tol {
            let merged = clusters.pop().unwrap();
            clusters[0].extend(merged);
        }
    }
    clusters
}

/// Eigendecomposition of a (near-)unitary matrix via its commuting Hermitian
/// and skew parts: diagonalize H = (A+A*)/2, then refine each degenerate
/// H-eigenspace with S = (A−A*)/(2i). Returns unit-circle eigenvalues and a
/// unitary Q of eigenvectors.
fn unitary_eigen(a: &CMat) -> (Vec<C64>, CMat) {
    let n = a.nrows();
    let (h, s) = hermitian_parts(a);
    let se = h.symmetric_eigen();
    let mut q = se.eigenvectors;
    let hvals: Vec<f64> = se.eigenvalues.iter().copied().collect();
    for cluster in cluster_real(&hvals, CLUSTER_TOL) {
        if cluster.len() < 2 {
            continue;
        }
        let qc = select_columns(&q, &cluster);
        let sc = (qc.adjoint() * &s * &qc).symmetric_eigen();
        set_columns(&mut q, &cluster, &(qc * sc.eigenvectors));
    }
    let d = q.adjoint() * a * &q;
    let vals = (0..n)
        .map(|j| {
            let v = d[(j, j)];
            if v.norm() > 0.0 {
                v / v.norm()
            } else {
                C64::new(1.0, 0.0)
            }
        })
        .collect();
    (vals, q)
}

fn offdiag_norm(m: &CMat) -> f64 {
    let mut sum = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                sum += m[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Simultaneous eigenvalues of a commuting pair of unitaries: n pairs
/// (αⱼ, βⱼ) on the unit circle realized by one unitary eigenbasis,
/// canonicalized by lexicographic angle sort.
pub fn simultaneous_eigenvalues(
    a: &CMat,
    b: &CMat,
    tol: f64,
) -> Result<Vec<(C64, C64)>, MatrixRepError> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(MatrixRepError::ShapeMismatch("need square matrices of equal size".into()));
    }
    let comm = (a * b - b * a).norm();
    if comm > tol {
        return Err(MatrixRepError::NotCommuting { residual: comm });
    }

    let verify_tol = tol.max(1e-8);
    // Stage 1: eigenbasis of A, refined per A-eigenspace by B.
    let (avals, mut q) = unitary_eigen(a);
    for cluster in cluster_angles(&avals, CLUSTER_TOL) {
        if cluster.len() < 2 {
            continue;
        }
        let qc = select_columns(&q, &cluster);
        let bc = qc.adjoint() * b * &qc;
        let (_, v) = unitary_eigen(&bc);
        set_columns(&mut q, &cluster, &(qc * v));
    }
    if offdiag_norm(&(q.adjoint() * a * &q)) > verify_tol
        || offdiag_norm(&(q.adjoint() * b * &q)) > verify_tol
    {
        // Fallback: a random Hermitian combination of the four commuting
        // Hermitian parts generically has simple spectrum and its eigenbasis
        // diagonalizes both.
        let (ha, sa) = hermitian_parts(a);
        let (hb, sb) = hermitian_parts(b);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut ok = false;
        for _ in 0..8 {
            let c: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let m = &ha * C64::new(c[0], 0.0)
                + &sa * C64::new(c[1], 0.0)
                + &hb * C64::new(c[2], 0.0)
                + &sb * C64::new(c[3], 0.0);
            let cand = m.symmetric_eigen().eigenvectors;
            if offdiag_norm(&(cand.adjoint() * a * &cand)) <= verify_tol
                && offdiag_norm(&(cand.adjoint() * b * &cand)) <= verify_tol
            {
                q = cand;
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(MatrixRepError::IllConditioned(
                "no common eigenbasis found within tolerance".into(),
            ));
        }
    }
    let da = q.adjoint() * a * &q;
    let db = q.adjoint() * b * &q;
    let mut pairs: Vec<(C64, C64)> = (0..n)
        .map(|j| {
            let norm1 = |v: C64| if v.norm() > 0.0 { v / v.norm() } else { C64::new(1.0, 0.0) };
            (norm1(da[(j, j)]), norm1(db[(j, j)]))
        })
        .collect();
    pairs.sort_by(|x, y| {
        let key = |p: &(C64, C64)| (p.0.arg().rem_euclid(TAU), p.1.arg().rem_euclid(TAU));
        let (ka, kb) = (key(x), key(y));
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    Ok(pairs)
}

// --- SU(2) trace invariant ------------------------------------------------

/// Trace coordinates of an SU(2) pair: (x, y, z) = (tr A, tr B, tr AB) and
/// κ = x² + y² + z² − xyz − 4, which vanishes exactly on commuting pairs.
pub fn su2_commuting_invariant(
    a: &CMat,
    b: &CMat,
    tol: f64,
) -> Result<(f64, f64, f64, f64), MatrixRepError> {
    if a.nrows() != 2 || a.ncols() != 2 || b.nrows() != 2 || b.ncols() != 2 {
        return Err(MatrixRepError::ShapeMismatch("need 2x2 matrices".into()));
    }
    for (i, m) in [a, b].into_iter().enumerate() {
        let res = unitarity_residual(m);
        if res > tol * 2.0 {
            return Err(MatrixRepError::NotUnitary { index: i, residual: res });
        }
        let res = (m.determinant() - C64::new(1.0, 0.0)).norm();
        if res > tol {
            return Err(MatrixRepError::NotDetOne { index: i, residual: res });
        }
    }
    let tx = a.trace();
    let ty = b.trace();
    let tz = (a * b).trace();
    // traces of SU(2) elements are real
    assert!(
        tx.im.abs() <= 100.0 * tol && ty.im.abs() <= 100.0 * tol && tz.im.abs() <= 100.0 * tol,
        "SU(2) traces must be real up to tolerance"
    );
    let (x, y, z) = (tx.re, ty.re, tz.re);
    let kappa = x * x + y * y + z * z - x * y * z - 4.0;
    Ok((x, y, z, kappa))
}

// --- seeded sampling ------------------------------------------------------

/// A standard complex Gaussian sample (Box–Muller).
fn complex_gaussian(rng: &mut impl Rng) -> C64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    C64::new(r * (TAU * u2).cos(), r * (TAU * u2).sin())
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of the R diagonal absorbed into Q.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-distributed special unitary: Haar unitary with the determinant
/// phase divided out of one column.
pub fn haar_special_unitary(n: usize, rng: &mut impl Rng) -> CMat {
    let mut q = haar_unitary(n, rng);
    let det = q.determinant();
    let phase = det / det.norm();
    for i in 0..n {
        q[(i, n - 1)] /= phase;
    }
    q
}

/// One tuple of `count` commuting matrices: shared Haar eigenbasis Q with
/// independent uniform diagonal unitaries (determinant corrected on the last
/// entry for SU targets). Returns the rep and the diagonals used.
pub fn random_commuting_tuple_with_diagonals(
    n: usize,
    count: usize,
    target: Target,
    rng: &mut impl Rng,
) -> Result<(MatrixRep, Vec<Vec<C64>>), MatrixRepError> {
    if n < 1 || count < 1 {
        return Err(MatrixRepError::InvalidParameter("need n ≥ 1 and count ≥ 1".into()));
    }
    match target {
        Target::U(m) | Target::SU(m) if m == n => {}
        _ => {
            return Err(MatrixRepError::InvalidParameter(format!(
                "target must be U({n}) or SU({n}), got {target}"
            )));
        }
    }
    let q = haar_unitary(n, rng);
    let mut matrices = Vec::new();
    let mut diagonals = Vec::new();
    for _ in 0..count {
        let mut diag: Vec<C64> =
            (0..n).map(|_| C64::new(0.0, rng.gen::<f64>() * TAU).exp()).collect();
        if matches!(target, Target::SU(_)) {
            let det: C64 = diag.iter().product();
            diag[n - 1] /= det / det.norm();
        }
        let d = CMat::from_fn(n, n, |i, j| if i == j { diag[i] } else { C64::new(0.0, 0.0) });
        matrices.push(&q * d * q.adjoint());
        diagonals.push(diag);
    }
    let names: Vec<String> = (0..count).map(|i| format!("g{}", i + 1)).collect();
    // construction guarantees unitarity; validate anyway
    let rep = MatrixRep::new(target, names, matrices, DEFAULT_TOL)?;
    Ok((rep, diagonals))
}

/// Seeded commuting tuple on the free-abelian presentation; deterministic
/// given (n, count, target, seed).
pub fn random_commuting_tuple(
    n: usize,
    count: usize,
    target: Target,
    seed: u64,
) -> Result<MatrixRep, MatrixRepError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_commuting_tuple_with_diagonals(n, count, target, &mut rng).map(|(rep, _)| rep)
}

/// SU(2) matrix of the rotation by `angle` about the unit vector `axis`
/// under the double cover SU(2) → SO(3): cos(θ/2)I − i sin(θ/2)(u·σ).
pub fn su2_from_axis_angle(axis: [f64; 3], angle: f64) -> CMat {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let [ux, uy, uz] = axis.map(|c| c / norm);
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    CMat::from_row_slice(
        2,
        2,
        &[
            C64::new(c, -s * uz),
            C64::new(-s * uy, -s * ux),
            C64::new(s * uy, -s * ux),
            C64::new(c, s * uz),
        ],
    )
}

fn random_unit_axis(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v = [complex_gaussian(rng).re, complex_gaussian(rng).re, complex_gaussian(rng).re];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-6 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// A random commuting pair in SO(3) ≅ PU(2), PU(2) representatives scrambled
/// by random unit scalars, plus its obstruction class by construction:
/// class 0 = two rotations about a common axis; class 1 = π-rotations about
/// orthogonal axes.
pub fn random_so3_commuting_pair(rng: &mut impl Rng) -> (MatrixRep, usize) {
    let class = usize::from(rng.gen::<bool>());
    let (a, b) = if class == 0 {
        let axis = random_unit_axis(rng);
        (
            su2_from_axis_angle(axis, rng.gen::<f64>() * TAU),
            su2_from_axis_angle(axis, rng.gen::<f64>() * TAU),
        )
    } else {
        let u = random_unit_axis(rng);
        // Gram–Schmidt a second axis orthogonal to u
        let v = loop {
            let w = random_unit_axis(rng);
            let dot = u[0] * w[0] + u[1] * w[1] + u[2] * w[2];
            let v = [w[0] - dot * u[0], w[1] - dot * u[1], w[2] - dot * u[2]];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n > 1e-6 {
                break [v[0] / n, v[1] / n, v[2] / n];
            }
        };
        (su2_from_axis_angle(u, PI), su2_from_axis_angle(v, PI))
    };
    // scramble the representatives by unit scalars: same PU(2) elements
    let a = a * C64::new(0.0, rng.gen::<f64>() * TAU).exp();
    let b = b * C64::new(0.0, rng.gen::<f64>() * TAU).exp();
    let rep = MatrixRep::new(Target::PU(2), vec!["a".into(), "b".into()], vec![a, b], DEFAULT_TOL)
        .expect("construction is unitary");
    (rep, class)
}

// --- JSON file format -----------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MatrixRepFile {
    target: String,
    n: usize,
    tolerance: f64,
    generators: Vec<String>,
    /// row-major: matrices[g][row][col] = [re, im]
    matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

impl MatrixRep {
    pub fn to_json(&self) -> String {
        let n = self.n();
        let file = MatrixRepFile {
            target: match self.target {
                Target::U(_) => "U",
                Target::SU(_) => "SU",
                Target::PU(_) => "PU",
            }
            .to_string(),
            n,
            tolerance: self.tolerance,
            generators: self.generators.clone(),
            matrices: self
                .matrices
                .iter()
                .map(|m| {
                    (0..n)
                        .map(|i| (0..n).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, MatrixRepError> {
        let file: MatrixRepFile = serde_json::from_str(text)
            .map_err(|e| MatrixRepError::InvalidParameter(format!("bad matrix file: {e}")))?;
        let target = match file.target.as_str() {
            "U" => Target::U(file.n),
            "SU" => Target::SU(file.n),
            "PU" => Target::PU(file.n),
            other => {
                return Err(MatrixRepError::InvalidParameter(format!(
                    "unknown target `{other}` (expected U, SU, or PU)"
                )));
            }
        };
        let matrices: Vec<CMat> = file
            .matrices
            .iter()
            .map(|rows| {
                if rows.len() != file.n || rows.iter().any(|r| r.len() != file.n) {
                    return Err(MatrixRepError::ShapeMismatch(format!(
                        "matrix entries do not form an {0}x{0} matrix",
                        file.n
                    )));
                }
                Ok(CMat::from_fn(file.n, file.n, |i, j| {
                    C64::new(rows[i][j][0], rows[i][j][1])
                }))
            })
            .collect::<Result<_, _>>()?;
        MatrixRep::new(target, file.generators, matrices, file.tolerance)
    }
}

#[derive(Serialize, Deserialize)]
struct LiftedRepFile {
    real_parts: Vec<f64>,
    su_parts: Vec<Vec<Vec<[f64; 2]>>>,
}

impl LiftedRep {
    pub fn to_json(&self) -> String {
        let n = self.n();
        let file = LiftedRepFile {
            real_parts: self.real_parts.clone(),
            su_parts: self
                .su_parts
                .iter()
                .map(|m| {
                    (0..n)
                        .map(|i| (0..n).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{standard_group, StandardGroup};

    fn diag2(a: C64, b: C64) -> CMat {
        CMat::from_row_slice(2, 2, &[a, C64::new(0.0, 0.0), C64::new(0.0, 0.0), b])
    }

    fn i_sigma_x() -> CMat {
        CMat::from_row_slice(
            2,
            2,
            &[C64::new(0.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
        )
    }

    fn i_sigma_y() -> CMat {
        CMat::from_row_slice(
            2,
            2,
            &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 0.0)],
        )
    }

    fn z2() -> Presentation {
        standard_group(&StandardGroup::FreeAbelian(2)).unwrap()
    }

    fn rep(target: Target, ms: Vec<CMat>) -> MatrixRep {
        let names = (0..ms.len()).map(|i| format!("g{i}")).collect();
        MatrixRep::new(target, names, ms, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn check_diag_pair() {
        let a = diag2(C64::new(1.0, 0.0), C64::new(0.0, 1.0));
        let b = diag2(C64::new(-1.0, 0.0), C64::new(0.0, -1.0));
        let r = check_representation(&rep(Target::U(2), vec![a, b]), &z2()).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn check_pauli_pair() {
        // [iσx, iσy] = −I: fails in SU(2), passes in PU(2).
        let su = rep(Target::SU(2), vec![i_sigma_x(), i_sigma_y()]);
        assert!(!check_representation(&su, &z2()).unwrap().passed);
        let pu = rep(Target::PU(2), vec![i_sigma_x(), i_sigma_y()]);
        assert!(check_representation(&pu, &z2()).unwrap().passed);
    }

    #[test]
    fn check_shape_mismatch() {
        let su = rep(Target::SU(2), vec![i_sigma_x()]);
        assert!(matches!(
            check_representation(&su, &z2()),
            Err(MatrixRepError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn lift_u1_principal_branch() {
        let g = CMat::from_row_slice(1, 1, &[C64::new(0.0, PI / 3.0).exp()]);
        let p = standard_group(&StandardGroup::Free(1)).unwrap();
        let lift = lift_to_universal_cover(&rep(Target::U(1), vec![g]), &p).unwrap();
        assert!((lift.real_parts[0] - PI / 3.0).abs() < 1e-14);
        assert!((lift.su_parts[0][(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn lift_round_trip_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = standard_group(&StandardGroup::Free(2)).unwrap();
        let ms = vec![haar_unitary(2, &mut rng), haar_unitary(2, &mut rng)];
        let r = rep(Target::U(2), ms.clone());
        let lift = lift_to_universal_cover(&r, &p).unwrap();
        for (orig, back) in ms.iter().zip(lift.project()) {
            assert!((orig - back).norm() <= 1e-12);
        }
    }

    #[test]
    fn lift_requires_exponent_canceling() {
        let p = crate::presentation::parse_presentation("gens a; rel a^2;").unwrap();
        let g = CMat::identity(2, 2);
        let err = lift_to_universal_cover(&rep(Target::U(2), vec![g]), &p).unwrap_err();
        assert!(matches!(err, MatrixRepError::NotExponentCanceling));
    }

    #[test]
    fn deck_action_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = z2();
        let (r, _) =
            random_commuting_tuple_with_diagonals(2, 2, Target::U(2), &mut rng).unwrap();
        let lift = lift_to_universal_cover(&r, &p).unwrap();

        // identity action
        let same = deck_act(&[0, 0], &lift, &p).unwrap();
        assert_eq!(same, lift);

        // projection invariance and real-part shift
        let acted = deck_act(&[1, 0], &lift, &p).unwrap();
        assert!((acted.real_parts[0] - lift.real_parts[0] - PI).abs() < 1e-14);
        for (x, y) in lift.project().iter().zip(acted.project()) {
            assert!((x - y).norm() <= 1e-14);
        }

        // action axiom: phi twice = 2 phi once
        let twice = deck_act(&[1, 0], &acted, &p).unwrap();
        let double = deck_act(&[2, 0], &lift, &p).unwrap();
        for (a, b) in twice.su_parts.iter().zip(&double.su_parts) {
            assert!((a - b).norm() <= 1e-14);
        }
    }

    #[test]
    fn deck_rejects_non_homomorphism() {
        // <a | a^2 relator replaced>: use surface-like relator with net sum
        let p = crate::presentation::parse_presentation("gens a b; rel a b a^-1;").unwrap();
        let lift = LiftedRep {
            real_parts: vec![0.0, 0.0],
            su_parts: vec![CMat::identity(2, 2), CMat::identity(2, 2)],
        };
        let err = deck_act(&[0, 1], &lift, &p).unwrap_err();
        assert!(matches!(err, MatrixRepError::NotAHomomorphism { sum: 1, .. }));
    }

    #[test]
    fn obstruction_trivial_rep() {
        let id = CMat::identity(2, 2);
        let r = rep(Target::PU(2), vec![id.clone(), id]);
        assert_eq!(obstruction_class(&r, 1).unwrap(), 0);
    }

    #[test]
    fn obstruction_pi_rotations() {
        // π-rotations about x and y: lifts anticommute, class 1.
        let a = su2_from_axis_angle([1.0, 0.0, 0.0], PI);
        let b = su2_from_axis_angle([0.0, 1.0, 0.0], PI);
        let r = rep(Target::PU(2), vec![a, b]);
        assert_eq!(obstruction_class(&r, 1).unwrap(), 1);
        // branch choice does not matter
        assert_eq!(obstruction_class_with_branches(&r, 1, &[1, 0]).unwrap(), 1);
        assert_eq!(obstruction_class_with_branches(&r, 1, &[1, 1]).unwrap(), 1);
    }

    #[test]
    fn obstruction_su_image_is_class_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // a genuine commuting SU(2) pair viewed in PU(2)
        let (su, _) =
            random_commuting_tuple_with_diagonals(2, 2, Target::SU(2), &mut rng).unwrap();
        let r = rep(Target::PU(2), su.matrices);
        assert_eq!(obstruction_class(&r, 1).unwrap(), 0);
    }

    #[test]
    fn obstruction_rejects_non_scalar() {
        // generic non-commuting pair: commutator not scalar
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = haar_unitary(3, &mut rng);
        let b = haar_unitary(3, &mut rng);
        let r = rep(Target::PU(3), vec![a, b]);
        assert!(matches!(
            obstruction_class(&r, 1),
            Err(MatrixRepError::NotARepresentation { .. })
        ));
    }

    #[test]
    fn simultaneous_diag_pair() {
        let a = diag2(C64::new(1.0, 0.0), C64::new(0.0, 1.0));
        let b = diag2(C64::new(-1.0, 0.0), C64::new(0.0, -1.0));
        let pairs = simultaneous_eigenvalues(&a, &b, 1e-9).unwrap();
        // sorted by angle of alpha: (1, −1) then (i, −i)
        assert!((pairs[0].0 - C64::new(1.0, 0.0)).norm() < 1e-10);
        assert!((pairs[0].1 - C64::new(-1.0, 0.0)).norm() < 1e-10);
        assert!((pairs[1].0 - C64::new(0.0, 1.0)).norm() < 1e-10);
        assert!((pairs[1].1 - C64::new(0.0, -1.0)).norm() < 1e-10);
    }

    #[test]
    fn simultaneous_conjugation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = diag2(C64::new(1.0, 0.0), C64::new(0.0, 1.0));
        let b = diag2(C64::new(-1.0, 0.0), C64::new(0.0, -1.0));
        let base = simultaneous_eigenvalues(&a, &b, 1e-9).unwrap();
        let u = haar_unitary(2, &mut rng);
        let conj = simultaneous_eigenvalues(
            &(&u * &a * u.adjoint()),
            &(&u * &b * u.adjoint()),
            1e-8,
        )
        .unwrap();
        for (p, q) in base.iter().zip(&conj) {
            assert!((p.0 - q.0).norm() < 1e-8 && (p.1 - q.1).norm() < 1e-8);
        }
    }

    #[test]
    fn simultaneous_degenerate_identity() {
        let a = CMat::identity(2, 2);
        let b = diag2(C64::new(1.0, 0.0), C64::new(-1.0, 0.0));
        let pairs = simultaneous_eigenvalues(&a, &b, 1e-9).unwrap();
        for (alpha, _) in &pairs {
            assert!((alpha - C64::new(1.0, 0.0)).norm() < 1e-10);
        }
        let betas: Vec<f64> = pairs.iter().map(|p| p.1.re).collect();
        assert!(betas.contains(&1.0) || betas.iter().any(|&x| (x - 1.0).abs() < 1e-10));
        assert!(betas.iter().any(|&x| (x + 1.0).abs() < 1e-10));
    }

    #[test]
    fn simultaneous_rejects_noncommuting() {
        let err = simultaneous_eigenvalues(&i_sigma_x(), &i_sigma_y(), 1e-9).unwrap_err();
        assert!(matches!(err, MatrixRepError::NotCommuting { .. }));
    }

    #[test]
    fn kappa_identity_pair() {
        let id = CMat::identity(2, 2);
        let (x, y, z, k) = su2_commuting_invariant(&id, &id, 1e-9).unwrap();
        assert_eq!((x, y, z), (2.0, 2.0, 2.0));
        assert!(k.abs() < 1e-12);
    }

    #[test]
    fn kappa_commuting_diagonal() {
        let a = diag2(C64::new(0.0, 0.7).exp(), C64::new(0.0, -0.7).exp());
        let b = diag2(C64::new(0.0, 1.9).exp(), C64::new(0.0, -1.9).exp());
        let (_, _, _, k) = su2_commuting_invariant(&a, &b, 1e-9).unwrap();
        assert!(k.abs() < 1e-12);
    }

    #[test]
    fn kappa_pauli_pair() {
        let (x, y, z, k) = su2_commuting_invariant(&i_sigma_x(), &i_sigma_y(), 1e-9).unwrap();
        assert!(x.abs() < 1e-12 && y.abs() < 1e-12 && z.abs() < 1e-12);
        assert!((k + 4.0).abs() < 1e-12);
    }

    #[test]
    fn kappa_rejects_non_su2() {
        let u = diag2(C64::new(1.0, 0.0), C64::new(0.0, 1.0)); // det = i
        let id = CMat::identity(2, 2);
        assert!(matches!(
            su2_commuting_invariant(&u, &id, 1e-9),
            Err(MatrixRepError::NotDetOne { .. })
        ));
    }

    #[test]
    fn random_tuple_is_deterministic_and_commutes() {
        let r1 = random_commuting_tuple(3, 2, Target::U(3), 42).unwrap();
        let r2 = random_commuting_tuple(3, 2, Target::U(3), 42).unwrap();
        for (a, b) in r1.matrices.iter().zip(&r2.matrices) {
            assert_eq!(a, b);
        }
        let comm = (&r1.matrices[0] * &r1.matrices[1] - &r1.matrices[1] * &r1.matrices[0]).norm();
        assert!(comm <= 1e-12);
        let p = z2();
        assert!(check_representation(&r1, &p).unwrap().passed);

        let su = random_commuting_tuple(3, 3, Target::SU(3), 1).unwrap();
        for m in &su.matrices {
            assert!((m.determinant() - C64::new(1.0, 0.0)).norm() <= 1e-12);
        }
    }

    #[test]
    fn so3_pairs_realize_both_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut seen = [false, false];
        for _ in 0..20 {
            let (r, class) = random_so3_commuting_pair(&mut rng);
            assert!(check_representation(&r, &z2()).unwrap().passed);
            assert_eq!(obstruction_class(&r, 1).unwrap(), class);
            seen[class] = true;
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn json_round_trip() {
        let r = random_commuting_tuple(2, 2, Target::U(2), 9).unwrap();
        let text = r.to_json();
        let back = MatrixRep::from_json(&text).unwrap();
        assert_eq!(back.target, r.target);
        assert_eq!(back.generators, r.generators);
        for (a, b) in r.matrices.iter().zip(&back.matrices) {
            assert!((a - b).norm() < 1e-15);
        }
    }
}
