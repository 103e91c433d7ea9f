//! Sparse representation tables and their additive convolution.

use std::collections::HashMap;
use std::collections::hash_map::Entry;
use std::hash::{BuildHasher, Hasher};

use num_bigint::BigUint;

use crate::cubic::CountingForm;
use crate::{Error, Result};

/// Number of hash shards per table. Fixed: table contents are independent of
/// the thread count, so this only affects lock granularity and memory layout.
pub const SHARD_COUNT: usize = 64;
const SHARD_SHIFT: u32 = 64 - 6;

/// How many pending inserts a worker buffers per output shard before taking
/// the shard lock (parallel driver only).
#[cfg(feature = "parallel")]
const FLUSH_LEN: usize = 4096;

#[inline]
fn mix64(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^= x >> 31;
    x
}

/// Stable hash used to route keys to shards. Independent of the map hasher
/// seed so shard routing does not correlate with bucket placement.
#[inline]
fn shard_of<const D: usize>(key: &[i64; D]) -> usize {
    let mut h = 0x243F_6A88_85A3_08D3u64;
    for &c in key {
        h = mix64(h ^ c as u64);
    }
    (h >> SHARD_SHIFT) as usize
}

/// Deterministic hasher for the shard-local maps (keys are short tuples of
/// integers; SipHash would dominate the convolution inner loop).
pub struct KeyHasher(u64);

impl Hasher for KeyHasher {
    #[inline]
    fn finish(&self) -> u64 {
        self.0
    }
    #[inline]
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = mix64(self.0 ^ u64::from(b));
        }
    }
    #[inline]
    fn write_u64(&mut self, v: u64) {
        self.0 = mix64(self.0 ^ v);
    }
    #[inline]
    fn write_i64(&mut self, v: i64) {
        self.write_u64(v as u64);
    }
    #[inline]
    fn write_usize(&mut self, v: usize) {
        self.write_u64(v as u64);
    }
}

#[derive(Clone, Copy, Default)]
pub struct BuildKeyHasher;

impl BuildHasher for BuildKeyHasher {
    type Hasher = KeyHasher;
    #[inline]
    fn build_hasher(&self) -> KeyHasher {
        KeyHasher(0x13198A2E_03707344)
    }
}

type Map<K, V> = HashMap<K, V, BuildKeyHasher>;

/// An exact count: 64-bit on the hot path, promoted to a big integer when a
/// checked add or multiply would overflow.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Count {
    Small(u64),
    Big(BigUint),
}

/// Exact accumulator: u128 fast path with spill into a big integer.
#[derive(Default)]
pub(crate) struct BigAccum {
    small: u128,
    big: BigUint,
}

impl BigAccum {
    pub fn add_u128(&mut self, v: u128) {
        match self.small.checked_add(v) {
            Some(s) => self.small = s,
            None => {
                self.big += self.small;
                self.small = v;
            }
        }
    }

    pub fn add_big(&mut self, v: &BigUint) {
        self.big += v;
    }

    pub fn finish(self) -> BigUint {
        self.big + self.small
    }
}

/// One hash shard. A key lives in exactly one of the two maps; `big` is
/// almost always empty.
#[derive(Clone, Default)]
struct Shard<const D: usize> {
    small: Map<[i64; D], u64>,
    big: Map<[i64; D], BigUint>,
}

impl<const D: usize> Shard<D> {
    #[inline]
    fn add_small(&mut self, key: [i64; D], v: u64) {
        if !self.big.is_empty() {
            if let Some(b) = self.big.get_mut(&key) {
                *b += v;
                return;
            }
        }
        match self.small.entry(key) {
            Entry::Occupied(mut e) => match e.get().checked_add(v) {
                Some(w) => *e.get_mut() = w,
                None => {
                    let cur = e.remove();
                    let total = BigUint::from(cur) + v;
                    self.big.insert(key, total);
                }
            },
            Entry::Vacant(e) => {
                e.insert(v);
            }
        }
    }

    fn add_big(&mut self, key: [i64; D], v: BigUint) {
        let mut total = v;
        if let Some(cur) = self.small.remove(&key) {
            total += cur;
        }
        match self.big.entry(key) {
            Entry::Occupied(mut e) => *e.get_mut() += total,
            Entry::Vacant(e) => {
                e.insert(total);
            }
        }
    }

    fn len(&self) -> usize {
        self.small.len() + self.big.len()
    }
}

/// Sparse exact-count map from lattice points to `r`-fold representation
/// counts. `D` is the key width: 5 for the `S` variant, 6 for `S'`.
///
/// Invariants: stored counts are strictly positive; the total mass is exactly
/// `(N+1)^(2r)`; every key lies inside the per-coordinate `bounds`.
#[derive(Clone)]
pub struct RepTable<const D: usize> {
    r: u32,
    n: u32,
    form: CountingForm,
    bounds: [(i64, i64); D],
    shards: Vec<Shard<D>>,
}

impl<const D: usize> RepTable<D> {
    fn empty(r: u32, n: u32, form: CountingForm, bounds: [(i64, i64); D]) -> Self {
        Self {
            r,
            n,
            form,
            bounds,
            shards: (0..SHARD_COUNT).map(|_| Shard::default()).collect(),
        }
    }

    /// Fold count `r` of the table.
    pub fn r(&self) -> u32 {
        self.r
    }

    /// Grid range bound `N`.
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn form(&self) -> &CountingForm {
        &self.form
    }

    pub fn dim(&self) -> usize {
        D
    }

    /// Inclusive per-coordinate key bounds.
    pub fn bounds(&self) -> &[(i64, i64); D] {
        &self.bounds
    }

    /// Number of distinct keys.
    pub fn len(&self) -> usize {
        self.shards.iter().map(Shard::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.shards.iter().all(|s| s.len() == 0)
    }

    pub fn get(&self, key: &[i64; D]) -> Option<BigUint> {
        let shard = &self.shards[shard_of(key)];
        if let Some(v) = shard.small.get(key) {
            return Some(BigUint::from(*v));
        }
        shard.big.get(key).cloned()
    }

    /// Total mass `sum_v R(v)`, exactly.
    pub fn mass(&self) -> BigUint {
        let mut acc = BigAccum::default();
        for shard in &self.shards {
            for v in shard.small.values() {
                acc.add_u128(u128::from(*v));
            }
            for v in shard.big.values() {
                acc.add_big(v);
            }
        }
        acc.finish()
    }

    /// Additive energy `sum_v R(v)^2`, exactly. This is the solution count of
    /// the system when `R` is the `r`-fold table.
    pub fn sum_of_squares(&self) -> BigUint {
        let mut acc = BigAccum::default();
        for shard in &self.shards {
            for v in shard.small.values() {
                let v = u128::from(*v);
                acc.add_u128(v * v);
            }
            for v in shard.big.values() {
                acc.add_big(&(v * v));
            }
        }
        acc.finish()
    }

    /// All entries in canonical (lexicographic key) order.
    pub fn sorted_entries(&self) -> Vec<([i64; D], BigUint)> {
        let mut out: Vec<([i64; D], BigUint)> = Vec::with_capacity(self.len());
        for shard in &self.shards {
            out.extend(shard.small.iter().map(|(k, v)| (*k, BigUint::from(*v))));
            out.extend(shard.big.iter().map(|(k, v)| (*k, v.clone())));
        }
        out.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        out
    }

    fn flat_entries(&self) -> Vec<([i64; D], Count)> {
        let mut out: Vec<([i64; D], Count)> = Vec::with_capacity(self.len());
        for shard in &self.shards {
            out.extend(shard.small.iter().map(|(k, v)| (*k, Count::Small(*v))));
            out.extend(
                shard
                    .big
                    .iter()
                    .map(|(k, v)| (*k, Count::Big(v.clone()))),
            );
        }
        out
    }

    /// The `r = 0` table `{0: 1}`: the identity element of [`convolve`].
    pub fn identity_like(other: &RepTable<D>) -> Self {
        let mut t = Self::empty(0, other.n, other.form, [(0, 0); D]);
        let key = [0i64; D];
        t.shards[shard_of(&key)].add_small(key, 1);
        t
    }

    /// Additive convolution `C(v) = sum_u A(u) B(v - u)`.
    ///
    /// Both tables must come from the same form, range, and variant; fold
    /// counts add and masses multiply. Coordinate bounds of the result are
    /// validated up front, so key sums cannot overflow.
    pub fn convolve(&self, other: &RepTable<D>) -> Result<RepTable<D>> {
        if self.form != other.form || self.n != other.n {
            return Err(Error::IncompatibleTables(format!(
                "form/range mismatch: ({}, N={}) vs ({}, N={})",
                self.form.as_cubic(),
                self.n,
                other.form.as_cubic(),
                other.n
            )));
        }
        let mut bounds = [(0i64, 0i64); D];
        for i in 0..D {
            bounds[i] = (
                self.bounds[i]
                    .0
                    .checked_add(other.bounds[i].0)
                    .ok_or(Error::CoordinateOverflow)?,
                self.bounds[i]
                    .1
                    .checked_add(other.bounds[i].1)
                    .ok_or(Error::CoordinateOverflow)?,
            );
        }
        let mut out = Self::empty(self.r + other.r, self.n, self.form, bounds);

        // flatten the smaller operand for the inner loop
        let (outer, inner) = if self.len() >= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let inner_flat = inner.flat_entries();
        drive_products(&outer.shards, &inner_flat, &bounds, &mut out.shards);

        debug_assert_eq!(out.mass(), self.mass() * other.mass());
        Ok(out)
    }

    /// Parallel-friendly bulk insert of unit counts, used by the base-table
    /// builders: `keys` yields chunks of work, each producing lattice keys.
    fn fill_units<I>(&mut self, chunks: Vec<I>)
    where
        I: Iterator<Item = [i64; D]> + Send,
    {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            if rayon::current_num_threads() > 1 {
                let locked: Vec<std::sync::Mutex<Shard<D>>> =
                    std::mem::take(&mut self.shards).into_iter().map(std::sync::Mutex::new).collect();
                chunks.into_par_iter().for_each(|it| {
                    let mut sink = BufSink::new(&locked);
                    for key in it {
                        sink.push_small(key, 1);
                    }
                    sink.flush_all();
                });
                self.shards = locked
                    .into_iter()
                    .map(|m| m.into_inner().expect("shard lock poisoned"))
                    .collect();
                return;
            }
        }
        for it in chunks {
            for key in it {
                self.shards[shard_of(&key)].add_small(key, 1);
            }
        }
    }

}

impl<const D: usize> std::fmt::Debug for RepTable<D> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RepTable")
            .field("r", &self.r)
            .field("n", &self.n)
            .field("form", &self.form)
            .field("dim", &D)
            .field("len", &self.len())
            .finish_non_exhaustive()
    }
}

impl<const D: usize> PartialEq for RepTable<D> {
    /// Entry-wise equality of the maps (metadata must match too).
    fn eq(&self, other: &Self) -> bool {
        if self.r != other.r
            || self.n != other.n
            || self.form != other.form
            || self.len() != other.len()
        {
            return false;
        }
        self.shards.iter().enumerate().all(|(i, shard)| {
            shard
                .small
                .iter()
                .all(|(k, v)| other.shards[i].small.get(k) == Some(v))
                && shard
                    .big
                    .iter()
                    .all(|(k, v)| other.shards[i].big.get(k) == Some(v))
        })
    }
}

impl RepTable<5> {
    /// One-fold table of the `S` embedding over `[0, n]^2`.
    ///
    /// The embedding is injective (its first two coordinates are `(x, y)`),
    /// so the table has exactly `(n+1)^2` keys, each with count 1.
    pub fn base_s(form: &CountingForm, n: u32) -> Result<Self> {
        check_range(n)?;
        let bounds = form.bounds_s(n);
        let mut t = Self::empty(1, n, *form, bounds);
        let f = *form;
        let chunks: Vec<_> = (0..=i64::from(n))
            .map(|x| (0..=i64::from(n)).map(move |y| f.embed_s(x, y)))
            .collect();
        t.fill_units(chunks);
        Ok(t)
    }
}

impl RepTable<6> {
    /// One-fold table of the `S'` (second-derivative) embedding.
    ///
    /// Injective, hence all counts 1, exactly when the form is
    /// non-degenerate; degenerate forms fold grid points together.
    pub fn base_s_prime(form: &CountingForm, n: u32) -> Result<Self> {
        check_range(n)?;
        let bounds = form.bounds_s_prime(n);
        let mut t = Self::empty(1, n, *form, bounds);
        let f = *form;
        let chunks: Vec<_> = (0..=i64::from(n))
            .map(|x| (0..=i64::from(n)).map(move |y| f.embed_s_prime(x, y)))
            .collect();
        t.fill_units(chunks);
        Ok(t)
    }
}

pub(crate) fn check_range(n: u32) -> Result<()> {
    if n > CountingForm::MAX_RANGE {
        return Err(Error::RangeBound {
            n,
            limit: CountingForm::MAX_RANGE,
        });
    }
    Ok(())
}

/// Emits all pairwise products of `outer` entries against the flattened
/// `inner` table into the output shards. Parallelises over the 64 input
/// shards when the `parallel` feature is active and the pool has more than
/// one thread; the output is identical either way because shard contents are
/// sums, which are order-independent.
fn drive_products<const D: usize>(
    outer: &[Shard<D>],
    inner: &[([i64; D], Count)],
    bounds: &[(i64, i64); D],
    out: &mut Vec<Shard<D>>,
) {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if rayon::current_num_threads() > 1 {
            let locked: Vec<std::sync::Mutex<Shard<D>>> =
                std::mem::take(out).into_iter().map(std::sync::Mutex::new).collect();
            outer.par_iter().for_each(|in_shard| {
                let mut sink = BufSink::new(&locked);
                emit_shard_products(in_shard, inner, bounds, &mut sink);
                sink.flush_all();
            });
            *out = locked
                .into_iter()
                .map(|m| m.into_inner().expect("shard lock poisoned"))
                .collect();
            return;
        }
    }
    let mut sink = DirectSink { shards: out };
    for in_shard in outer {
        emit_shard_products(in_shard, inner, bounds, &mut sink);
    }
}

fn emit_shard_products<const D: usize, S: ProductSink<D>>(
    in_shard: &Shard<D>,
    inner: &[([i64; D], Count)],
    bounds: &[(i64, i64); D],
    sink: &mut S,
) {
    let emit = |sink: &mut S, key: &[i64; D], count: &Count| {
        for (ik, ic) in inner {
            let mut out_key = *key;
            for (o, i) in out_key.iter_mut().zip(ik.iter()) {
                // in-range by the bounds check in `convolve`
                *o += *i;
            }
            debug_assert!(
                out_key
                    .iter()
                    .zip(bounds.iter())
                    .all(|(v, (lo, hi))| lo <= v && v <= hi),
                "convolution key escapes the validated bounds"
            );
            match (count, ic) {
                (Count::Small(a), Count::Small(b)) => {
                    let p = u128::from(*a) * u128::from(*b);
                    match u64::try_from(p) {
                        Ok(v) => sink.push_small(out_key, v),
                        Err(_) => sink.push_big(out_key, BigUint::from(p)),
                    }
                }
                (Count::Small(a), Count::Big(b)) | (Count::Big(b), Count::Small(a)) => {
                    sink.push_big(out_key, b * *a)
                }
                (Count::Big(a), Count::Big(b)) => sink.push_big(out_key, a * b),
            }
        }
    };
    for (k, v) in &in_shard.small {
        emit(sink, k, &Count::Small(*v));
    }
    for (k, v) in &in_shard.big {
        emit(sink, k, &Count::Big(v.clone()));
    }
}

trait ProductSink<const D: usize> {
    fn push_small(&mut self, key: [i64; D], v: u64);
    fn push_big(&mut self, key: [i64; D], v: BigUint);
}

struct DirectSink<'a, const D: usize> {
    shards: &'a mut Vec<Shard<D>>,
}

impl<const D: usize> ProductSink<D> for DirectSink<'_, D> {
    #[inline]
    fn push_small(&mut self, key: [i64; D], v: u64) {
        self.shards[shard_of(&key)].add_small(key, v);
    }
    fn push_big(&mut self, key: [i64; D], v: BigUint) {
        self.shards[shard_of(&key)].add_big(key, v);
    }
}

/// Buffered sink for the parallel driver: batches small counts per output
/// shard and applies a full batch under one lock acquisition.
#[cfg(feature = "parallel")]
struct BufSink<'a, const D: usize> {
    out: &'a [std::sync::Mutex<Shard<D>>],
    bufs: Vec<Vec<([i64; D], u64)>>,
}

#[cfg(feature = "parallel")]
impl<'a, const D: usize> BufSink<'a, D> {
    fn new(out: &'a [std::sync::Mutex<Shard<D>>]) -> Self {
        Self {
            out,
            bufs: (0..SHARD_COUNT).map(|_| Vec::new()).collect(),
        }
    }

    fn flush(&mut self, s: usize) {
        if self.bufs[s].is_empty() {
            return;
        }
        let mut shard = self.out[s].lock().expect("shard lock poisoned");
        for (key, v) in self.bufs[s].drain(..) {
            shard.add_small(key, v);
        }
    }

    fn flush_all(&mut self) {
        for s in 0..SHARD_COUNT {
            self.flush(s);
        }
    }
}

#[cfg(feature = "parallel")]
impl<const D: usize> ProductSink<D> for BufSink<'_, D> {
    #[inline]
    fn push_small(&mut self, key: [i64; D], v: u64) {
        let s = shard_of(&key);
        self.bufs[s].push((key, v));
        if self.bufs[s].len() >= FLUSH_LEN {
            self.flush(s);
        }
    }
    fn push_big(&mut self, key: [i64; D], v: BigUint) {
        let s = shard_of(&key);
        self.out[s]
            .lock()
            .expect("shard lock poisoned")
            .add_big(key, v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubic::CubicForm;
    use num_traits::One;

    fn cf(a: i64, b: i64, c: i64, d: i64) -> CountingForm {
        CubicForm::from_ints(a, b, c, d).counting().unwrap()
    }

    #[test]
    fn base_table_examples() {
        // any form, N = 1: four keys, each count 1
        let t = RepTable::base_s(&cf(2, -1, 0, 3), 1).unwrap();
        assert_eq!(t.len(), 4);
        assert!(t.sorted_entries().iter().all(|(_, c)| c.is_one()));

        // t^3 + s^3 at N = 0: single origin entry
        let t = RepTable::base_s(&cf(1, 0, 0, 1), 0).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.get(&[0, 0, 0, 0, 0]), Some(BigUint::one()));

        // mass invariant at N = 10
        let t = RepTable::base_s(&cf(1, 0, 0, 1), 10).unwrap();
        assert_eq!(t.mass(), BigUint::from(121u32));
        assert_eq!(t.len(), 121);
    }

    #[test]
    fn base_s_prime_degenerate_folds() {
        // phi = t^3 is degenerate: the S' embedding ignores y entirely
        let t = RepTable::base_s_prime(&cf(1, 0, 0, 0), 3).unwrap();
        assert_eq!(t.mass(), BigUint::from(16u32));
        assert_eq!(t.len(), 4);
        assert_eq!(t.get(&[0; 6]), Some(BigUint::from(4u32)));
    }

    #[test]
    fn convolve_identity_and_commutativity() {
        let a = RepTable::base_s(&cf(1, 0, 0, 1), 3).unwrap();
        let id = RepTable::identity_like(&a);
        assert_eq!(a.convolve(&id).unwrap(), a);

        let b = a.convolve(&a).unwrap();
        let c = {
            // exercise the asymmetric outer/inner choice with unequal sizes
            let ab = a.convolve(&b).unwrap();
            let ba = b.convolve(&a).unwrap();
            assert_eq!(ab, ba);
            ab
        };
        assert_eq!(c.r(), 3);
        assert_eq!(c.mass(), a.mass().pow(3));
    }

    #[test]
    fn convolve_rejects_mismatched_tables() {
        let a = RepTable::base_s(&cf(1, 0, 0, 1), 2).unwrap();
        let b = RepTable::base_s(&cf(1, 0, 0, 1), 3).unwrap();
        assert!(matches!(
            a.convolve(&b),
            Err(Error::IncompatibleTables(_))
        ));
        let c = RepTable::base_s(&cf(0, 1, 1, 0), 2).unwrap();
        assert!(a.convolve(&c).is_err());
    }

    #[test]
    fn count_promotes_past_u64() {
        let mut shard = Shard::<5>::default();
        let key = [1, 2, 3, 4, 5];
        shard.add_small(key, u64::MAX);
        shard.add_small(key, u64::MAX);
        shard.add_small(key, 2);
        let expect = (BigUint::from(u64::MAX) * 2u32) + 2u32;
        assert_eq!(shard.big.get(&key), Some(&expect));
        assert!(!shard.small.contains_key(&key));
        // a later small add lands on the promoted entry
        shard.add_small(key, 1);
        assert_eq!(shard.big.get(&key), Some(&(expect + 1u32)));
        assert_eq!(shard.len(), 1);
    }

    #[test]
    fn sorted_entries_are_lexicographic() {
        let t = RepTable::base_s(&cf(1, 2, -1, 3), 4).unwrap();
        let entries = t.sorted_entries();
        assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        assert_eq!(entries.len(), 25);
    }
}
