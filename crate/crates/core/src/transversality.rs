//! Exact-rational verification of the Brascamp-Lieb transversality
//! inequalities for the tangent frames of a cubic's jet surface.
//!
//! At a point `xi = (t0, s0)` the surface has the frame
//!
//! ```text
//! n1 = (1, 0, phi_tt, phi_st, phi_t)      n3 = (0, 0, 1, 0, t0)
//! n2 = (0, 1, phi_ts, phi_ss, phi_s)      n4 = (0, 0, 0, 1, s0)
//! ```
//!
//! with `{n1, n2}` spanning the first-order tangent space (dimension 2) and
//! `{n1, .., n4}` the second-order one (dimension 4). For a subspace `V` of
//! `R^5`, the dimension of the orthogonal projection of `V` onto the span of
//! `{n_j}` equals the rank of the inner-product matrix `M[i][j] = <v_i, n_j>`
//! (a vector projects to zero iff it is orthogonal to every `n_j`), so
//! projection dimensions are exact integer ranks over the rationals.
//!
//! The almost-sure inequalities `dim V <= (5/d) dim proj(V)` hold for
//! non-degenerate forms; they are verified here by seeded sampling of random
//! subspaces and rational base points, which avoids the measure-zero
//! exceptional sets with probability one. Sampling cannot certify the
//! condition for *all* subspaces; certification is out of scope. The
//! [`degenerate_witness_search`] runs the other direction: on a degenerate
//! form it finds a concrete subspace breaking the inequality.

use std::collections::HashSet;
use std::hash::{Hash, Hasher};

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cubic::CubicForm;
use crate::rat::int;
use crate::{Error, Result, linalg};

/// Which tangent space the projection targets.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ProjectionOrder {
    /// First-order tangent space, span of `n1, n2` (d = 2).
    First,
    /// Second-order tangent space, span of `n1, .., n4` (d = 4).
    Second,
}

impl ProjectionOrder {
    /// Dimension of the target space.
    pub fn d(self) -> usize {
        match self {
            ProjectionOrder::First => 2,
            ProjectionOrder::Second => 4,
        }
    }

    pub fn from_iota(iota: u8) -> Result<Self> {
        match iota {
            1 => Ok(ProjectionOrder::First),
            2 => Ok(ProjectionOrder::Second),
            other => Err(Error::Invalid(format!("iota must be 1 or 2, got {other}"))),
        }
    }

    pub fn iota(self) -> u8 {
        match self {
            ProjectionOrder::First => 1,
            ProjectionOrder::Second => 2,
        }
    }
}

/// The exact tangent frame at a rational base point.
#[derive(Clone, Debug)]
pub struct TangentFrame {
    pub xi: (BigRational, BigRational),
    /// `n1, n2, n3, n4` in order.
    pub vectors: [Vec<BigRational>; 4],
}

/// Evaluates frames for one form without rebuilding its partials each time.
#[derive(Clone, Debug)]
pub struct FrameEvaluator {
    a: BigRational,
    b: BigRational,
    c: BigRational,
    d: BigRational,
}

impl FrameEvaluator {
    pub fn new(phi: &CubicForm) -> Self {
        Self {
            a: phi.a.clone(),
            b: phi.b.clone(),
            c: phi.c.clone(),
            d: phi.d.clone(),
        }
    }

    pub fn frame_at(&self, xi: &(BigRational, BigRational)) -> TangentFrame {
        let (t, s) = (&xi.0, &xi.1);
        let tt = t * t;
        let ts = t * s;
        let ss = s * s;
        let phi_t = int(3) * &self.a * &tt + int(2) * &self.b * &ts + &self.c * &ss;
        let phi_s = &self.b * &tt + int(2) * &self.c * &ts + int(3) * &self.d * &ss;
        let phi_tt = int(6) * &self.a * t + int(2) * &self.b * s;
        let phi_ts = int(2) * &self.b * t + int(2) * &self.c * s;
        let phi_ss = int(2) * &self.c * t + int(6) * &self.d * s;
        let zero = BigRational::zero;
        let one = BigRational::one;
        TangentFrame {
            xi: xi.clone(),
            vectors: [
                vec![one(), zero(), phi_tt.clone(), phi_ts.clone(), phi_t],
                vec![zero(), one(), phi_ts, phi_ss, phi_s],
                vec![zero(), zero(), one(), zero(), t.clone()],
                vec![zero(), zero(), zero(), one(), s.clone()],
            ],
        }
    }
}

/// The exact frame `n1..n4` at `xi`.
pub fn frame_at(phi: &CubicForm, xi: &(BigRational, BigRational)) -> TangentFrame {
    FrameEvaluator::new(phi).frame_at(xi)
}

/// A linear subspace of `R^5` given by an exact-rank basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    basis: Vec<Vec<BigRational>>,
}

impl Subspace {
    /// Validates that the rows are independent (exact rank = row count).
    pub fn new(basis: Vec<Vec<BigRational>>) -> Result<Self> {
        if basis.is_empty() || basis.len() > 5 {
            return Err(Error::Invalid(format!(
                "subspace needs 1..=5 basis vectors, got {}",
                basis.len()
            )));
        }
        if basis.iter().any(|row| row.len() != 5) {
            return Err(Error::Invalid("basis vectors must have length 5".into()));
        }
        if linalg::rank(&basis) != basis.len() {
            return Err(Error::Invalid(
                "basis vectors are linearly dependent".into(),
            ));
        }
        Ok(Self { basis })
    }

    pub fn from_int_rows(rows: &[[i64; 5]]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| int(v)).collect())
                .collect(),
        )
    }

    /// The standard basis vector `e_i` (zero-indexed), as a 1-dim subspace.
    pub fn standard(i: usize) -> Self {
        let mut row = vec![BigRational::zero(); 5];
        row[i] = BigRational::one();
        Self { basis: vec![row] }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<BigRational>] {
        &self.basis
    }

    /// Canonical reduced-row-echelon basis; equal iff the subspaces agree.
    pub fn canonical(&self) -> Vec<Vec<BigRational>> {
        linalg::rref(&self.basis)
    }
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Exact dimension of the projection of `V` onto the order-`iota` tangent
/// space at the frame's base point: the rank of the inner-product matrix
/// of the basis of `V` against `n1..n_d`.
pub fn projection_dim(v: &Subspace, frame: &TangentFrame, order: ProjectionOrder) -> usize {
    let d = order.d();
    let m: Vec<Vec<BigRational>> = v
        .basis
        .iter()
        .map(|row| (0..d).map(|j| dot(row, &frame.vectors[j])).collect())
        .collect();
    linalg::rank(&m)
}

/// `dim V <= (5/d) dim proj(V)` fails, in exact integer arithmetic.
fn violates(dim_v: usize, order: ProjectionOrder, proj_dim: usize) -> bool {
    dim_v * order.d() > 5 * proj_dim
}

// -------------------------------------------------------------------------
// seeded sampling

const TAG_GENERIC: u64 = 1;
const TAG_SQUARE: u64 = 2;
const TAG_BL: u64 = 3;
const TAG_WITNESS: u64 = 4;

/// Per-trial generator derived from `(seed, index, tag)`, so trials are
/// order-independent and runs are reproducible for any thread count.
fn trial_rng(seed: u64, index: u64, tag: u64) -> ChaCha8Rng {
    let mut bytes = [0u8; 32];
    bytes[0..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..16].copy_from_slice(&index.to_le_bytes());
    bytes[16..24].copy_from_slice(&tag.to_le_bytes());
    bytes[24..32].copy_from_slice(b"tvframe5");
    ChaCha8Rng::from_seed(bytes)
}

/// Denominator bound for sampled rational coordinates.
const XI_DEN: i64 = 10_000;
/// Entry bound for random subspace bases.
const BASIS_ENTRY: i64 = 9;

fn random_unit_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let den = rng.random_range(1..=XI_DEN);
    let num = rng.random_range(0..=den);
    crate::rat::rat(num, den)
}

fn random_xi(rng: &mut ChaCha8Rng) -> (BigRational, BigRational) {
    (random_unit_rational(rng), random_unit_rational(rng))
}

fn random_subspace(rng: &mut ChaCha8Rng, dim: usize) -> (Subspace, Vec<[i64; 5]>) {
    loop {
        let rows: Vec<[i64; 5]> = (0..dim)
            .map(|_| std::array::from_fn(|_| rng.random_range(-BASIS_ENTRY..=BASIS_ENTRY)))
            .collect();
        if let Ok(v) = Subspace::from_int_rows(&rows) {
            return (v, rows);
        }
    }
}

fn map_trials<T: Send, F: Fn(u32) -> T + Sync + Send>(trials: u32, f: F) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if rayon::current_num_threads() > 1 {
            return (0..trials).into_par_iter().map(f).collect();
        }
    }
    (0..trials).map(f).collect()
}

// -------------------------------------------------------------------------
// generic (single-point) dimension checks

/// One recorded failure of the dimension inequality.
#[derive(Clone, Debug)]
pub struct ViolationWitness {
    /// Integer basis of the violating subspace, as drawn.
    pub basis: Vec<[i64; 5]>,
    /// Base point(s) at which the projection was evaluated.
    pub points: Vec<(BigRational, BigRational)>,
    pub dim_v: usize,
    /// Projection dimension at each base point.
    pub proj_dims: Vec<usize>,
}

/// Outcome of a seeded sampling run.
#[derive(Clone, Debug)]
pub struct SampleReport {
    pub order: ProjectionOrder,
    /// Fixed subspace dimension, or `None` when trials cycle through 1..=4.
    pub dim_v: Option<usize>,
    pub trials: u32,
    pub violations: u32,
    pub witnesses: Vec<ViolationWitness>,
    pub seed: u64,
}

/// Samples `trials` independent pairs `(V, xi)` and checks the almost-sure
/// inequality `dim V <= (5/d) dim proj_xi(V)`.
///
/// A failing draw is re-tried once at a fresh `xi` (random rational points
/// collide with the measure-zero exceptional set essentially never, but a
/// collision is not a violation); only persistent failures are reported.
/// A nonzero violation count is a reportable outcome, not an error.
pub fn generic_dimension_check(
    phi: &CubicForm,
    dim_v: usize,
    order: ProjectionOrder,
    trials: u32,
    seed: u64,
) -> Result<SampleReport> {
    if !(1..=4).contains(&dim_v) {
        return Err(Error::Invalid(format!("dim V must be 1..=4, got {dim_v}")));
    }
    let eval = FrameEvaluator::new(phi);
    let outcomes = map_trials(trials, |t| {
        let mut rng = trial_rng(seed, u64::from(t), TAG_GENERIC);
        let (v, rows) = random_subspace(&mut rng, dim_v);
        let xi = random_xi(&mut rng);
        let pd = projection_dim(&v, &eval.frame_at(&xi), order);
        if !violates(dim_v, order, pd) {
            return None;
        }
        let xi2 = random_xi(&mut rng);
        let pd2 = projection_dim(&v, &eval.frame_at(&xi2), order);
        if !violates(dim_v, order, pd2) {
            return None;
        }
        Some(ViolationWitness {
            basis: rows,
            points: vec![xi, xi2],
            dim_v,
            proj_dims: vec![pd, pd2],
        })
    });
    let witnesses: Vec<ViolationWitness> = outcomes.into_iter().flatten().collect();
    Ok(SampleReport {
        order,
        dim_v: Some(dim_v),
        trials,
        violations: witnesses.len() as u32,
        witnesses,
        seed,
    })
}

/// Like [`generic_dimension_check`] with the subspace dimension cycling
/// through 1..=4 across trials.
pub fn generic_dimension_check_mixed(
    phi: &CubicForm,
    order: ProjectionOrder,
    trials: u32,
    seed: u64,
) -> Result<SampleReport> {
    let eval = FrameEvaluator::new(phi);
    let outcomes = map_trials(trials, |t| {
        let dim_v = 1 + (t as usize % 4);
        let mut rng = trial_rng(seed, u64::from(t), TAG_GENERIC);
        let (v, rows) = random_subspace(&mut rng, dim_v);
        let xi = random_xi(&mut rng);
        let pd = projection_dim(&v, &eval.frame_at(&xi), order);
        if !violates(dim_v, order, pd) {
            return None;
        }
        let xi2 = random_xi(&mut rng);
        let pd2 = projection_dim(&v, &eval.frame_at(&xi2), order);
        if !violates(dim_v, order, pd2) {
            return None;
        }
        Some(ViolationWitness {
            basis: rows,
            points: vec![xi, xi2],
            dim_v,
            proj_dims: vec![pd, pd2],
        })
    });
    let witnesses: Vec<ViolationWitness> = outcomes.into_iter().flatten().collect();
    Ok(SampleReport {
        order,
        dim_v: None,
        trials,
        violations: witnesses.len() as u32,
        witnesses,
        seed,
    })
}

// -------------------------------------------------------------------------
// multi-square condition

/// Checks that the square indices form a valid subset of the `K x K` dyadic
/// grid on `[0, 1]^2` and draws one seeded sample point inside each square.
fn sample_square_points(
    k: u32,
    squares: &[usize],
    seed: u64,
) -> Result<Vec<(BigRational, BigRational)>> {
    if k == 0 {
        return Err(Error::Invalid("grid parameter K must be positive".into()));
    }
    if squares.is_empty() {
        return Err(Error::Invalid("need at least one square".into()));
    }
    let total = (k as usize) * (k as usize);
    let mut seen = HashSet::new();
    for &idx in squares {
        if idx >= total {
            return Err(Error::SquareIndex { index: idx, k });
        }
        if !seen.insert(idx) {
            return Err(Error::DuplicateSquare(idx));
        }
    }
    Ok(squares
        .iter()
        .map(|&idx| {
            let mut rng = trial_rng(seed, idx as u64, TAG_SQUARE);
            let ix = (idx as u32) % k;
            let iy = (idx as u32) / k;
            let offset = |cell: u32, rng: &mut ChaCha8Rng| {
                // (cell + u) / k with u uniform rational in [0, 1]
                let u = random_unit_rational(rng);
                (int(i64::from(cell)) + u) / int(i64::from(k))
            };
            (offset(ix, &mut rng), offset(iy, &mut rng))
        })
        .collect())
}

/// Outcome of sampling the multi-square transversality condition.
#[derive(Clone, Debug)]
pub struct MultiSquareReport {
    pub order: ProjectionOrder,
    pub k: u32,
    pub squares: Vec<usize>,
    pub points: Vec<(BigRational, BigRational)>,
    pub trials: u32,
    pub violations: u32,
    pub witnesses: Vec<ViolationWitness>,
    pub seed: u64,
}

/// Samples random subspaces (dimensions cycling 1..=4) against one fixed
/// sample point per square and checks
/// `dim V <= (5 / (d m)) * sum_j dim proj_{xi_j}(V)` with `m` the number of
/// squares. Sampled verification only; quantifying over all subspaces is a
/// stated non-goal.
pub fn bl_condition_sample(
    phi: &CubicForm,
    k: u32,
    squares: &[usize],
    order: ProjectionOrder,
    trials: u32,
    seed: u64,
) -> Result<MultiSquareReport> {
    let points = sample_square_points(k, squares, seed)?;
    let eval = FrameEvaluator::new(phi);
    let frames: Vec<TangentFrame> = points.iter().map(|xi| eval.frame_at(xi)).collect();
    let m = squares.len();
    let outcomes = map_trials(trials, |t| {
        let dim_v = 1 + (t as usize % 4);
        let mut rng = trial_rng(seed, u64::from(t), TAG_BL);
        let (v, rows) = random_subspace(&mut rng, dim_v);
        let dims: Vec<usize> = frames
            .iter()
            .map(|f| projection_dim(&v, f, order))
            .collect();
        let total: usize = dims.iter().sum();
        if dim_v * order.d() * m <= 5 * total {
            return None;
        }
        Some(ViolationWitness {
            basis: rows,
            points: frames.iter().map(|f| f.xi.clone()).collect(),
            dim_v,
            proj_dims: dims,
        })
    });
    let witnesses: Vec<ViolationWitness> = outcomes.into_iter().flatten().collect();
    Ok(MultiSquareReport {
        order,
        k,
        squares: squares.to_vec(),
        points,
        trials,
        violations: witnesses.len() as u32,
        witnesses,
        seed,
    })
}

/// Evaluates the multi-square condition for one explicit subspace. Returns
/// whether the inequality holds and the per-square projection dimensions.
pub fn bl_condition_check_subspace(
    phi: &CubicForm,
    k: u32,
    squares: &[usize],
    order: ProjectionOrder,
    v: &Subspace,
    seed: u64,
) -> Result<(bool, Vec<usize>)> {
    let points = sample_square_points(k, squares, seed)?;
    let eval = FrameEvaluator::new(phi);
    let dims: Vec<usize> = points
        .iter()
        .map(|xi| projection_dim(v, &eval.frame_at(xi), order))
        .collect();
    let total: usize = dims.iter().sum();
    let ok = v.dim() * order.d() * squares.len() <= 5 * total;
    Ok((ok, dims))
}

// -------------------------------------------------------------------------
// witness search on degenerate forms

/// Candidate-subspace budget of [`degenerate_witness_search`].
pub const WITNESS_SEARCH_BUDGET: u64 = 2_000_000;

const WITNESS_CONFIRM_SAMPLES: usize = 20;
const WITNESS_CONFIRM_THRESHOLD: usize = 18; // 90%

/// Result of the witness search.
#[derive(Clone, Debug)]
pub enum WitnessSearch {
    /// A subspace violating the generic inequality at >= 90% of sampled
    /// base points.
    Witness {
        basis: Vec<[i64; 5]>,
        dim_v: usize,
        /// Violations among the confirmation samples.
        violating_samples: u32,
        samples: u32,
        /// Projection dimension at the first confirming point.
        proj_dim: usize,
        tested: u64,
    },
    /// Candidate space exhausted with no witness.
    NoneFound { tested: u64 },
    /// Budget ran out before the candidate space was exhausted.
    Inconclusive { tested: u64, budget: u64 },
}

/// Searches small-integer subspaces for one that breaks the generic
/// dimension inequality at (at least) 90% of sampled base points.
///
/// Candidates are spans of up to four distinct primitive vectors with at
/// most two nonzero entries bounded by `max_coeff`, deduplicated by reduced
/// row echelon form. For a non-degenerate form the search comes back empty
/// (the inequality is a theorem); every degenerate form `(mu t + nu s)^3`
/// yields a first-order witness such as `nu e3 - mu e4`.
pub fn degenerate_witness_search(
    phi: &CubicForm,
    order: ProjectionOrder,
    max_coeff: i64,
) -> WitnessSearch {
    degenerate_witness_search_with(phi, order, max_coeff, WITNESS_SEARCH_BUDGET, 0)
}

/// [`degenerate_witness_search`] with an explicit budget and seed.
pub fn degenerate_witness_search_with(
    phi: &CubicForm,
    order: ProjectionOrder,
    max_coeff: i64,
    budget: u64,
    seed: u64,
) -> WitnessSearch {
    let pool = candidate_pool(max_coeff.max(1));
    let eval = FrameEvaluator::new(phi);

    // one fixed filter point plus a fixed confirmation panel, all seeded
    let filter_frame = {
        let mut rng = trial_rng(seed, 0, TAG_WITNESS);
        eval.frame_at(&random_xi(&mut rng))
    };
    let confirm_frames: Vec<TangentFrame> = (1..=WITNESS_CONFIRM_SAMPLES as u64)
        .map(|i| {
            let mut rng = trial_rng(seed, i, TAG_WITNESS);
            eval.frame_at(&random_xi(&mut rng))
        })
        .collect();

    let mut seen: HashSet<(u64, u64)> = HashSet::new();
    let mut tested: u64 = 0;
    for k in 1..=4usize {
        if pool.len() < k {
            continue;
        }
        let mut combo = Combinations::new(pool.len(), k);
        while let Some(indices) = combo.next() {
            if tested == budget {
                return WitnessSearch::Inconclusive { tested, budget };
            }
            tested += 1;
            let rows: Vec<[i64; 5]> = indices.iter().map(|&i| pool[i]).collect();
            // cheap filter first: projection rank at the fixed point
            let rational_rows: Vec<Vec<BigRational>> = rows
                .iter()
                .map(|r| r.iter().map(|&v| int(v)).collect())
                .collect();
            let pd0 = inner_rank(&rational_rows, &filter_frame, order);
            if k * order.d() <= 5 * pd0 {
                continue;
            }
            // the nominal dimension might overcount; use the actual rank
            let dim_v = linalg::rank(&rational_rows);
            if dim_v == 0 || !violates(dim_v, order, pd0) {
                continue;
            }
            if !seen.insert(rref_fingerprint(&rational_rows)) {
                continue;
            }
            let mut hits = 0usize;
            for f in &confirm_frames {
                let pd = inner_rank(&rational_rows, f, order);
                if violates(dim_v, order, pd) {
                    hits += 1;
                }
            }
            if hits >= WITNESS_CONFIRM_THRESHOLD {
                return WitnessSearch::Witness {
                    basis: rows,
                    dim_v,
                    violating_samples: hits as u32,
                    samples: WITNESS_CONFIRM_SAMPLES as u32,
                    proj_dim: pd0,
                    tested,
                };
            }
        }
    }
    WitnessSearch::NoneFound { tested }
}

fn inner_rank(
    rows: &[Vec<BigRational>],
    frame: &TangentFrame,
    order: ProjectionOrder,
) -> usize {
    let d = order.d();
    let m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|row| (0..d).map(|j| dot(row, &frame.vectors[j])).collect())
        .collect();
    linalg::rank(&m)
}

fn rref_fingerprint(rows: &[Vec<BigRational>]) -> (u64, u64) {
    let canonical = linalg::rref(rows);
    let mut h1 = std::collections::hash_map::DefaultHasher::new();
    let mut h2 = std::collections::hash_map::DefaultHasher::new();
    0xA5u8.hash(&mut h1);
    0x5Au8.hash(&mut h2);
    for row in &canonical {
        for q in row {
            q.numer().hash(&mut h1);
            q.denom().hash(&mut h1);
            q.denom().hash(&mut h2);
            q.numer().hash(&mut h2);
        }
    }
    (h1.finish(), h2.finish())
}

/// Primitive vectors with at most two nonzero entries in
/// `[-max_coeff, max_coeff]`, first nonzero positive, in a fixed order:
/// standard basis vectors first, then coordinate pairs.
fn candidate_pool(max_coeff: i64) -> Vec<[i64; 5]> {
    let mut pool: Vec<[i64; 5]> = Vec::new();
    for i in 0..5 {
        let mut v = [0i64; 5];
        v[i] = 1;
        pool.push(v);
    }
    for i in 0..5 {
        for j in (i + 1)..5 {
            for a in 1..=max_coeff {
                for b in (-max_coeff..=max_coeff).filter(|&b| b != 0) {
                    if num_integer::gcd(a, b.abs()) != 1 {
                        continue;
                    }
                    let mut v = [0i64; 5];
                    v[i] = a;
                    v[j] = b;
                    pool.push(v);
                }
            }
        }
    }
    pool
}

/// Lexicographic k-subset enumerator over `0..n`.
struct Combinations {
    n: usize,
    idx: Vec<usize>,
    started: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            idx: (0..k).collect(),
            started: false,
        }
    }

    fn next(&mut self) -> Option<&[usize]> {
        if !self.started {
            self.started = true;
            return Some(&self.idx);
        }
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if self.idx[i] != i + self.n - k {
                break;
            }
        }
        self.idx[i] += 1;
        for j in (i + 1)..k {
            self.idx[j] = self.idx[j - 1] + 1;
        }
        Some(&self.idx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use std::str::FromStr;

    fn phi(spec: &str) -> CubicForm {
        CubicForm::from_str(spec).unwrap()
    }

    fn xi(t: (i64, i64), s: (i64, i64)) -> (BigRational, BigRational) {
        (rat(t.0, t.1), rat(s.0, s.1))
    }

    #[test]
    fn frame_examples() {
        let f = frame_at(&phi("1,0,0,1"), &xi((0, 1), (0, 1)));
        assert_eq!(f.vectors[0], linalg::from_int_rows(&[&[1, 0, 0, 0, 0]])[0]);
        assert_eq!(f.vectors[1], linalg::from_int_rows(&[&[0, 1, 0, 0, 0]])[0]);
        assert_eq!(f.vectors[2], linalg::from_int_rows(&[&[0, 0, 1, 0, 0]])[0]);
        assert_eq!(f.vectors[3], linalg::from_int_rows(&[&[0, 0, 0, 1, 0]])[0]);

        let f = frame_at(&phi("1,0,0,1"), &xi((1, 1), (0, 1)));
        assert_eq!(f.vectors[0], linalg::from_int_rows(&[&[1, 0, 6, 0, 3]])[0]);
        assert_eq!(f.vectors[1], linalg::from_int_rows(&[&[0, 1, 0, 0, 0]])[0]);

        let f = frame_at(&phi("0,1,0,0"), &xi((1, 1), (1, 1))); // t^2 s
        assert_eq!(f.vectors[0], linalg::from_int_rows(&[&[1, 0, 2, 2, 2]])[0]);
        assert_eq!(f.vectors[1], linalg::from_int_rows(&[&[0, 1, 2, 0, 1]])[0]);
    }

    #[test]
    fn frame_matches_polynomial_evaluation() {
        let form = phi("2,-1,3,5");
        let (pt, ps) = form.partials();
        let (ptt, pts, pss) = form.second_partials();
        let point = xi((3, 7), (2, 5));
        let f = frame_at(&form, &point);
        let at = [point.0.clone(), point.1.clone()];
        assert_eq!(f.vectors[0][2], ptt.eval(&at));
        assert_eq!(f.vectors[0][3], pts.eval(&at));
        assert_eq!(f.vectors[0][4], pt.eval(&at));
        assert_eq!(f.vectors[1][3], pss.eval(&at));
        assert_eq!(f.vectors[1][4], ps.eval(&at));
    }

    #[test]
    fn frame_vectors_always_independent() {
        for spec in ["1,0,0,1", "1,3,3,1", "0,0,0,0"] {
            let f = frame_at(&phi(spec), &xi((1, 3), (2, 7)));
            assert_eq!(linalg::rank(&f.vectors.to_vec()), 4);
            assert_eq!(linalg::rank(&f.vectors[..2].to_vec()), 2);
        }
    }

    #[test]
    fn projection_dim_examples() {
        let form = phi("1,0,0,1");
        let origin = frame_at(&form, &xi((0, 1), (0, 1)));
        let e1 = Subspace::standard(0);
        assert_eq!(projection_dim(&e1, &origin, ProjectionOrder::First), 1);

        let tail = Subspace::from_int_rows(&[
            [0, 0, 1, 0, 0],
            [0, 0, 0, 1, 0],
            [0, 0, 0, 0, 1],
        ])
        .unwrap();
        assert_eq!(projection_dim(&tail, &origin, ProjectionOrder::First), 0);
        assert_eq!(projection_dim(&tail, &origin, ProjectionOrder::Second), 2);
    }

    #[test]
    fn projection_dim_rank_bound_and_basis_invariance() {
        let form = phi("1,2,-1,3");
        let mut rng = trial_rng(7, 0, 99);
        for trial in 0..20u64 {
            let mut rng2 = trial_rng(11, trial, 98);
            let dim = 1 + (trial as usize % 4);
            let (v, rows) = random_subspace(&mut rng2, dim);
            let point = random_xi(&mut rng);
            let frame = frame_at(&form, &point);
            for order in [ProjectionOrder::First, ProjectionOrder::Second] {
                let pd = projection_dim(&v, &frame, order);
                assert!(pd <= dim.min(order.d()));

                // change of basis leaves the projection dimension fixed
                let t = loop {
                    let cand: Vec<Vec<BigRational>> = (0..dim)
                        .map(|_| {
                            (0..dim)
                                .map(|_| int(rng.random_range(-5i64..=5)))
                                .collect()
                        })
                        .collect();
                    if linalg::is_invertible(&cand) {
                        break cand;
                    }
                };
                let basis: Vec<Vec<BigRational>> = rows
                    .iter()
                    .map(|r| r.iter().map(|&x| int(x)).collect())
                    .collect();
                let changed = Subspace::new(linalg::mat_mul(&t, &basis)).unwrap();
                assert_eq!(projection_dim(&changed, &frame, order), pd);
            }
        }
    }

    #[test]
    fn generic_checks_pass_on_nondegenerate_forms() {
        for (dim_v, order) in [
            (3, ProjectionOrder::First),
            (4, ProjectionOrder::Second),
            (1, ProjectionOrder::Second),
        ] {
            let report =
                generic_dimension_check(&phi("1,0,0,1"), dim_v, order, 200, 42).unwrap();
            assert_eq!(report.violations, 0, "{dim_v} {order:?}");
        }
        let report =
            generic_dimension_check(&phi("0,1,1,0"), 4, ProjectionOrder::Second, 200, 43)
                .unwrap();
        assert_eq!(report.violations, 0);
    }

    #[test]
    fn generic_check_rejects_bad_dim() {
        assert!(generic_dimension_check(&phi("1,0,0,1"), 0, ProjectionOrder::First, 1, 0).is_err());
        assert!(generic_dimension_check(&phi("1,0,0,1"), 5, ProjectionOrder::First, 1, 0).is_err());
    }

    #[test]
    fn generic_check_is_seed_deterministic() {
        let a = generic_dimension_check_mixed(&phi("1,3,3,1"), ProjectionOrder::First, 64, 5)
            .unwrap();
        let b = generic_dimension_check_mixed(&phi("1,3,3,1"), ProjectionOrder::First, 64, 5)
            .unwrap();
        assert_eq!(a.violations, b.violations);
        assert_eq!(a.witnesses.len(), b.witnesses.len());
        for (x, y) in a.witnesses.iter().zip(b.witnesses.iter()) {
            assert_eq!(x.basis, y.basis);
            assert_eq!(x.points, y.points);
            assert_eq!(x.proj_dims, y.proj_dims);
        }
    }

    #[test]
    fn multi_square_all_sixteen() {
        let squares: Vec<usize> = (0..16).collect();
        let report = bl_condition_sample(
            &phi("1,0,0,1"),
            4,
            &squares,
            ProjectionOrder::First,
            100,
            7,
        )
        .unwrap();
        assert_eq!(report.violations, 0);
        assert_eq!(report.points.len(), 16);
        // each sampled point lies in its square
        for (idx, (t, s)) in squares.iter().zip(report.points.iter()) {
            let ix = (idx % 4) as i64;
            let iy = (idx / 4) as i64;
            assert!(rat(ix, 4) <= *t && *t <= rat(ix + 1, 4));
            assert!(rat(iy, 4) <= *s && *s <= rat(iy + 1, 4));
        }
    }

    #[test]
    fn single_square_dim_four_needs_full_projection() {
        // m = 1, dim V = 4, iota = 1: the inequality 4 <= (5/2) dim proj
        // forces dim proj = 2, which holds generically
        let report = bl_condition_sample(
            &phi("1,0,0,1"),
            4,
            &[5],
            ProjectionOrder::First,
            100,
            11,
        )
        .unwrap();
        assert_eq!(report.violations, 0);
    }

    #[test]
    fn degenerate_form_breaks_multi_square_condition() {
        let squares: Vec<usize> = (0..16).collect();
        let tail = Subspace::from_int_rows(&[
            [0, 0, 1, 0, 0],
            [0, 0, 0, 1, 0],
            [0, 0, 0, 0, 1],
        ])
        .unwrap();
        let (ok, dims) = bl_condition_check_subspace(
            &phi("1,3,3,1"),
            4,
            &squares,
            ProjectionOrder::First,
            &tail,
            3,
        )
        .unwrap();
        assert!(!ok);
        // the two frame columns coincide for (t+s)^3, so each rank is 1
        assert!(dims.iter().all(|&d| d == 1));

        // and the same subspace satisfies the condition on a sound form
        let (ok, _) = bl_condition_check_subspace(
            &phi("1,0,0,1"),
            4,
            &squares,
            ProjectionOrder::First,
            &tail,
            3,
        )
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn square_validation() {
        assert!(matches!(
            bl_condition_sample(&phi("1,0,0,1"), 4, &[3, 3], ProjectionOrder::First, 1, 0),
            Err(Error::DuplicateSquare(3))
        ));
        assert!(matches!(
            bl_condition_sample(&phi("1,0,0,1"), 4, &[16], ProjectionOrder::First, 1, 0),
            Err(Error::SquareIndex { .. })
        ));
    }

    #[test]
    fn witness_search_finds_degenerate_witnesses() {
        // phi = t^3, first order: e4 kills both frame columns
        match degenerate_witness_search(&phi("1,0,0,0"), ProjectionOrder::First, 2) {
            WitnessSearch::Witness { basis, dim_v, .. } => {
                assert_eq!(dim_v, 1);
                assert_eq!(basis, vec![[0, 0, 0, 1, 0]]);
            }
            other => panic!("expected witness, got {other:?}"),
        }
        // phi = (t+s)^3, second order: a four-dimensional witness exists
        match degenerate_witness_search(&phi("1,3,3,1"), ProjectionOrder::Second, 1) {
            WitnessSearch::Witness { dim_v, violating_samples, samples, .. } => {
                assert_eq!(dim_v, 4);
                assert_eq!(violating_samples, samples);
            }
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn witness_search_exhausts_nondegenerate_small_pool() {
        match degenerate_witness_search(&phi("1,0,0,1"), ProjectionOrder::First, 1) {
            WitnessSearch::NoneFound { tested } => {
                // 25 pool vectors: sum of C(25, k) for k = 1..=4
                assert_eq!(tested, 25 + 300 + 2300 + 12650);
            }
            other => panic!("expected none, got {other:?}"),
        }
    }

    #[test]
    fn witness_search_budget_reports_inconclusive() {
        match degenerate_witness_search_with(&phi("1,0,0,1"), ProjectionOrder::First, 2, 100, 0) {
            WitnessSearch::Inconclusive { tested, budget } => {
                assert_eq!(tested, 100);
                assert_eq!(budget, 100);
            }
            other => panic!("expected inconclusive, got {other:?}"),
        }
    }

    #[test]
    fn sampled_cubes_always_yield_first_order_witnesses() {
        let mut rng = trial_rng(2024, 0, 77);
        for _ in 0..6 {
            let (mu, nu) = loop {
                let mu = rng.random_range(-3i64..=3);
                let nu = rng.random_range(-3i64..=3);
                if (mu, nu) != (0, 0) {
                    break (mu, nu);
                }
            };
            let cube = CubicForm::from_ints(
                mu * mu * mu,
                3 * mu * mu * nu,
                3 * mu * nu * nu,
                nu * nu * nu,
            );
            assert!(cube.nondegeneracy_rank() < 2);
            match degenerate_witness_search(&cube, ProjectionOrder::First, 3) {
                WitnessSearch::Witness { .. } => {}
                other => panic!("no witness for ({mu},{nu}): {other:?}"),
            }
        }
    }

    #[test]
    fn combinations_enumerate_lexicographically() {
        let mut c = Combinations::new(4, 2);
        let mut all = Vec::new();
        while let Some(ix) = c.next() {
            all.push(ix.to_vec());
        }
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
    }
}
