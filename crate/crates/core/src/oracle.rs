//! Interpolation-matrix ground truth over a prime field.
//!
//! Points are sampled on the complete intersection of `x0 x3 - x1 x2` with
//! a random second quadric, the vanishing conditions of the fat points are
//! written in the degree-`d` monomial basis, and the dimension of the
//! system is `binom(d + 3, 3) - 1 - rank`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binom, FatPointSystem};
use crate::error::{Error, Result};

pub const DEFAULT_PRIMES: [u64; 2] = [2_147_483_647, 2_147_483_629];

/// Arithmetic modulo a prime below 2^32.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        assert!((2..1 << 32).contains(&p), "prime {p} out of range");
        Self { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.p - a) % self.p
    }

    pub fn from_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(!a.is_multiple_of(self.p), "zero has no inverse");
        self.pow(a, self.p - 2)
    }

    /// Euler's criterion; zero counts as a square.
    pub fn is_square(&self, a: u64) -> bool {
        a.is_multiple_of(self.p) || self.p == 2 || self.pow(a, (self.p - 1) / 2) == 1
    }

    /// Tonelli-Shanks square root.
    pub fn sqrt(&self, a: u64) -> Option<u64> {
        let a = a % self.p;
        if a == 0 || self.p == 2 {
            return Some(a);
        }
        if !self.is_square(a) {
            return None;
        }
        let p = self.p;
        if p % 4 == 3 {
            return Some(self.pow(a, (p + 1) / 4));
        }
        let mut q = p - 1;
        let mut s = 0;
        while q.is_multiple_of(2) {
            q /= 2;
            s += 1;
        }
        let z = (2..p)
            .find(|&z| !self.is_square(z))
            .expect("non-residue exists");
        let mut m = s;
        let mut c = self.pow(z, q);
        let mut t = self.pow(a, q);
        let mut root = self.pow(a, q.div_ceil(2));
        while t != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2 != 1 {
                t2 = self.mul(t2, t2);
                i += 1;
            }
            let b = self.pow(c, 1 << (m - i - 1));
            m = i;
            c = self.mul(b, b);
            t = self.mul(t, c);
            root = self.mul(root, b);
        }
        Some(root)
    }
}

/// Quadric monomials `x_i x_j`, `i <= j`, in a fixed order.
const QUADRIC_MONOMIALS: [(usize, usize); 10] = [
    (0, 0),
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 1),
    (1, 2),
    (1, 3),
    (2, 2),
    (2, 3),
    (3, 3),
];

/// `x0 x3 - x1 x2`.
fn first_quadric(field: &PrimeField) -> [u64; 10] {
    let mut q = [0; 10];
    q[3] = 1;
    q[5] = field.neg(1);
    q
}

fn eval_quadric(field: &PrimeField, q: &[u64; 10], x: &[u64; 4]) -> u64 {
    QUADRIC_MONOMIALS
        .iter()
        .zip(q)
        .fold(0, |acc, (&(i, j), &c)| {
            field.add(acc, field.mul(c, field.mul(x[i], x[j])))
        })
}

fn quadric_gradient(field: &PrimeField, q: &[u64; 10], x: &[u64; 4]) -> [u64; 4] {
    let mut g = [0; 4];
    for (&(i, j), &c) in QUADRIC_MONOMIALS.iter().zip(q) {
        if i == j {
            g[i] = field.add(g[i], field.mul(field.mul(2, c), x[i]));
        } else {
            g[i] = field.add(g[i], field.mul(c, x[j]));
            g[j] = field.add(g[j], field.mul(c, x[i]));
        }
    }
    g
}

fn normalize_point(field: &PrimeField, x: [u64; 4]) -> Option<[u64; 4]> {
    let lead = x.iter().copied().find(|&c| c != 0)?;
    let inv = field.inv(lead);
    Some(x.map(|c| field.mul(c, inv)))
}

/// Sampled configuration: the curve `x0 x3 - x1 x2 = q2 = 0` and `r` points on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveInstance {
    pub prime: u64,
    pub second_quadric: [u64; 10],
    pub points: Vec<[u64; 4]>,
    pub seed: u64,
}

impl CurveInstance {
    pub fn field(&self) -> PrimeField {
        PrimeField::new(self.prime)
    }

    pub fn first_quadric(&self) -> [u64; 10] {
        first_quadric(&self.field())
    }

    pub fn lies_on_curve(&self, x: &[u64; 4]) -> bool {
        let f = self.field();
        eval_quadric(&f, &self.first_quadric(), x) == 0
            && eval_quadric(&f, &self.second_quadric, x) == 0
    }

    /// The 2x4 Jacobian of the two quadrics has rank 2 at `x`.
    pub fn is_smooth_at(&self, x: &[u64; 4]) -> bool {
        let f = self.field();
        let g1 = quadric_gradient(&f, &self.first_quadric(), x);
        let g2 = quadric_gradient(&f, &self.second_quadric, x);
        (0..4).any(|i| (i + 1..4).any(|j| f.sub(f.mul(g1[i], g2[j]), f.mul(g1[j], g2[i])) != 0))
    }

    pub fn check_invariants(&self) -> bool {
        let distinct = self
            .points
            .iter()
            .enumerate()
            .all(|(i, p)| self.points[..i].iter().all(|q| q != p));
        distinct
            && self
                .points
                .iter()
                .all(|p| self.lies_on_curve(p) && self.is_smooth_at(p))
    }
}

fn attempt_cap(r: usize) -> usize {
    64 * (r + 4)
}

/// Deterministic in `(p, r, seed)`.
///
/// Each attempt picks a line `(s u : s v : t u : t v)` of one ruling of the
/// first quadric, restricts the second quadric to it and keeps one root of
/// the resulting binary quadratic when it splits.
pub fn make_curve(p: u64, r: usize, seed: u64) -> Result<CurveInstance> {
    let field = PrimeField::new(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let second_quadric = loop {
        let q: [u64; 10] = std::array::from_fn(|_| rng.gen_range(0..p));
        // reject multiples of the first quadric (including zero)
        let is_multiple =
            (0..10).all(|k| k == 3 || k == 5 || q[k] == 0) && field.add(q[3], q[5]) == 0;
        if !is_multiple {
            break q;
        }
    };
    let mut curve = CurveInstance {
        prime: p,
        second_quadric,
        points: Vec::with_capacity(r),
        seed,
    };

    let cap = attempt_cap(r);
    let mut attempts = 0;
    while curve.points.len() < r {
        if attempts == cap {
            return Err(Error::CurveSampling {
                prime: p,
                seed,
                wanted: r,
                attempts,
            });
        }
        attempts += 1;
        let (s, t) = (rng.gen_range(0..p), rng.gen_range(0..p));
        let pick_second: bool = rng.gen();
        if s == 0 && t == 0 {
            continue;
        }
        let on_line = |u: u64, v: u64| {
            [
                field.mul(s, u),
                field.mul(s, v),
                field.mul(t, u),
                field.mul(t, v),
            ]
        };
        let q = &curve.second_quadric;
        let a = eval_quadric(&field, q, &on_line(1, 0));
        let c = eval_quadric(&field, q, &on_line(0, 1));
        let b = field.sub(field.sub(eval_quadric(&field, q, &on_line(1, 1)), a), c);
        if a == 0 && b == 0 && c == 0 {
            continue;
        }
        let disc = field.sub(field.mul(b, b), field.mul(4, field.mul(a, c)));
        let Some(root) = field.sqrt(disc) else {
            continue;
        };
        let sign_root = if pick_second { field.neg(root) } else { root };
        let (u, v) = if a != 0 {
            (field.sub(sign_root, b), field.mul(2, a))
        } else if pick_second || b == 0 {
            (1, 0)
        } else {
            (field.neg(c), b)
        };
        let Some(point) = normalize_point(&field, on_line(u, v)) else {
            continue;
        };
        if curve.lies_on_curve(&point)
            && curve.is_smooth_at(&point)
            && !curve.points.contains(&point)
        {
            curve.points.push(point);
        }
    }
    Ok(curve)
}

/// Exponent vectors of degree-`d` monomials in four variables, in
/// descending lexicographic order.
pub fn monomials(d: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(binom(d as i64 + 3, 3) as usize);
    for a in (0..=d).rev() {
        for b in (0..=d - a).rev() {
            for c in (0..=d - a - b).rev() {
                out.push([a, b, c, d - a - b - c]);
            }
        }
    }
    out
}

/// Dense matrix over `F_p`, row major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionMatrix {
    pub prime: u64,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<u64>,
}

impl ConditionMatrix {
    pub fn from_rows(prime: u64, cols: usize, rows: Vec<Vec<u64>>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols));
        Self {
            prime,
            rows: rows.len(),
            cols,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }
}

/// Derivative conditions for the fat points.
///
/// A point of multiplicity `m` contributes one row per multi-index `alpha`
/// with `|alpha| = m - 1`: the value of `d^alpha x^beta` at the point, for
/// every monomial `x^beta`. Lower-order derivatives vanish by the Euler
/// identity because `p > d`. Multiplicities above `d + 1` are capped at
/// `d + 1`, which already forces every coefficient to vanish.
pub fn condition_matrix(
    d: i64,
    curve: &CurveInstance,
    multiplicities: &[i64],
) -> Result<ConditionMatrix> {
    if d < 0 {
        return Err(Error::NegativeDegree(d));
    }
    if curve.prime <= d as u64 {
        return Err(Error::PrimeTooSmall {
            prime: curve.prime,
            degree: d,
        });
    }
    if multiplicities.len() > curve.points.len() {
        return Err(Error::PreconditionViolated(format!(
            "{} multiplicities for {} sampled points",
            multiplicities.len(),
            curve.points.len()
        )));
    }
    let field = curve.field();
    let d = d as usize;
    let basis = monomials(d);

    // falling[n][k] = n (n-1) ... (n-k+1) mod p
    let falling: Vec<Vec<u64>> = (0..=d as u64)
        .map(|n| {
            (0..=n)
                .scan(1u64, |acc, k| {
                    let out = *acc;
                    *acc = field.mul(*acc, n - k);
                    Some(out)
                })
                .collect()
        })
        .collect();

    let mut rows = Vec::new();
    for (point, &m) in curve.points.iter().zip(multiplicities) {
        if m <= 0 {
            continue;
        }
        let order = (m - 1).min(d as i64) as usize;
        let powers: Vec<Vec<u64>> = point
            .iter()
            .map(|&x| (0..=d as u64).map(|e| field.pow(x, e)).collect())
            .collect();
        for alpha in monomials(order) {
            let row = basis
                .iter()
                .map(|beta| {
                    (0..4).fold(1u64, |acc, i| {
                        if beta[i] < alpha[i] {
                            0
                        } else {
                            let coeff = falling[beta[i]][alpha[i]];
                            field.mul(acc, field.mul(coeff, powers[i][beta[i] - alpha[i]]))
                        }
                    })
                })
                .collect();
            rows.push(row);
        }
    }
    Ok(ConditionMatrix::from_rows(curve.prime, basis.len(), rows))
}

/// Rank over `F_p` by Gaussian elimination on a copy.
pub fn rank_mod_p(mat: &ConditionMatrix) -> usize {
    let field = PrimeField::new(mat.prime);
    let cols = mat.cols;
    let mut a = mat.entries.clone();
    let mut rank = 0;
    for col in 0..cols {
        if rank == mat.rows {
            break;
        }
        let Some(pivot) = (rank..mat.rows).find(|&i| a[i * cols + col] != 0) else {
            continue;
        };
        if pivot != rank {
            for j in 0..cols {
                a.swap(pivot * cols + j, rank * cols + j);
            }
        }
        let inv = field.inv(a[rank * cols + col]);
        for j in col..cols {
            a[rank * cols + j] = field.mul(a[rank * cols + j], inv);
        }
        for i in rank + 1..mat.rows {
            let factor = a[i * cols + col];
            if factor == 0 {
                continue;
            }
            for j in col..cols {
                let sub = field.mul(factor, a[rank * cols + j]);
                a[i * cols + j] = field.sub(a[i * cols + j], sub);
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub primes: Vec<u64>,
    pub seeds: Vec<u64>,
}

impl OracleConfig {
    pub fn new(primes: Vec<u64>, seeds: Vec<u64>) -> Self {
        Self { primes, seeds }
    }

    /// One prime, `trials` consecutive seeds starting at `seed`.
    pub fn single_prime(prime: u64, seed: u64, trials: usize) -> Self {
        Self::new(
            vec![prime],
            (0..trials as u64).map(|i| seed.wrapping_add(i)).collect(),
        )
    }
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self::single_prime(DEFAULT_PRIMES[0], 1, 3)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialResult {
    pub prime: u64,
    pub seed: u64,
    pub rank: usize,
    pub dim: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub dim: i64,
    pub trials: Vec<TrialResult>,
    pub stable: bool,
}

fn single_trial(sys: &FatPointSystem, prime: u64, seed: u64) -> Result<TrialResult> {
    let forms = binom(sys.degree + 3, 3);
    if sys.degree < 0 {
        return Ok(TrialResult {
            prime,
            seed,
            rank: 0,
            dim: -1,
        });
    }
    if prime <= sys.degree as u64 {
        return Err(Error::PrimeTooSmall {
            prime,
            degree: sys.degree,
        });
    }
    let curve = make_curve(prime, sys.r(), seed)?;
    let mat = condition_matrix(sys.degree, &curve, &sys.multiplicities)?;
    let rank = rank_mod_p(&mat);
    Ok(TrialResult {
        prime,
        seed,
        rank,
        dim: forms - 1 - rank as i64,
    })
}

/// Minimum over every `(prime, seed)` trial; `stable` iff all trials agree.
pub fn oracle_dimension(sys: &FatPointSystem, config: &OracleConfig) -> Result<OracleReport> {
    if config.primes.is_empty() || config.seeds.is_empty() {
        return Err(Error::Config(
            "oracle needs at least one prime and one seed".into(),
        ));
    }
    let sys = sys.normalize();
    let trials = config
        .primes
        .iter()
        .flat_map(|&p| config.seeds.iter().map(move |&s| (p, s)))
        .map(|(p, s)| single_trial(&sys, p, s))
        .collect::<Result<Vec<_>>>()?;
    let dim = trials
        .iter()
        .map(|t| t.dim)
        .min()
        .expect("at least one trial");
    let stable = trials.iter().all(|t| t.dim == dim);
    Ok(OracleReport {
        dim,
        trials,
        stable,
    })
}
