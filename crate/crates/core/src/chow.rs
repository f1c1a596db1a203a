//! Intersection numbers and Riemann-Roch on the blow-ups of P3 used by the
//! dimension formulas.
//!
//! Three ambients share one description:
//!
//! * `X`: P3 blown up at `r` points of the quartic curve,
//! * `Y_I`: `X` further blown up along the lines `l_i`, `i in I`,
//! * `Ỹ_I`: `Y_I` blown up along the strict transform `C` of the curve.
//!
//! The line `l_1` joins `p_2, p_3`; for `i >= 2`, `l_i` joins `p_1, p_i`.
//! Divisors are written in the basis `H, E_i, F_i (i in I), F`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::classification::Classification;
use crate::combinatorics::{binom, DefectVector, FatPointSystem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientSpace {
    r: usize,
    lines: BTreeSet<usize>,
    curve_blown: bool,
}

impl AmbientSpace {
    pub fn new(
        r: usize,
        lines: impl IntoIterator<Item = usize>,
        curve_blown: bool,
    ) -> Result<Self> {
        let lines: BTreeSet<usize> = lines.into_iter().collect();
        for &i in &lines {
            if i == 0 || i > r {
                return Err(Error::InvalidAmbient(format!(
                    "line index {i} outside 1..={r}"
                )));
            }
            if i == 1 && r < 3 {
                return Err(Error::InvalidAmbient(
                    "l_1 joins p_2 and p_3 and needs r >= 3".into(),
                ));
            }
        }
        Ok(Self {
            r,
            lines,
            curve_blown,
        })
    }

    /// `X`: points only.
    pub fn points(r: usize) -> Self {
        Self::new(r, [], false).expect("no lines")
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn lines(&self) -> &BTreeSet<usize> {
        &self.lines
    }

    pub fn curve_blown(&self) -> bool {
        self.curve_blown
    }

    /// `|I|`.
    pub fn a(&self) -> i64 {
        self.lines.len() as i64
    }

    /// 1 if `l_1` is blown up.
    pub fn epsilon(&self) -> i64 {
        i64::from(self.lines.contains(&1))
    }

    /// Points lying on `l_i`.
    fn line_points(i: usize) -> [usize; 2] {
        if i == 1 {
            [2, 3]
        } else {
            [1, i]
        }
    }

    fn dimension(&self) -> usize {
        1 + self.r + self.lines.len() + usize::from(self.curve_blown)
    }

    fn index(&self, g: Generator) -> usize {
        match g {
            Generator::H => 0,
            Generator::E(i) => i,
            Generator::F(i) => 1 + self.r + self.lines.range(..i).count(),
            Generator::C => 1 + self.r + self.lines.len(),
        }
    }

    /// Every non-vanishing triple product of generators, keyed by sorted
    /// basis indices. Monomials absent from the table are zero.
    pub fn intersection_table(&self) -> BTreeMap<[usize; 3], i64> {
        use Generator::*;
        let mut table = BTreeMap::new();
        let mut put = |a: Generator, b: Generator, c: Generator, value: i64| {
            let mut key = [self.index(a), self.index(b), self.index(c)];
            key.sort_unstable();
            table.insert(key, value);
        };
        put(H, H, H, 1);
        for i in 1..=self.r {
            put(E(i), E(i), E(i), 1);
        }
        for &i in &self.lines {
            put(H, F(i), F(i), -1);
            for p in Self::line_points(i) {
                put(E(p), F(i), F(i), -1);
            }
            put(F(i), F(i), F(i), 2);
        }
        if self.curve_blown {
            put(H, C, C, -4);
            for i in 1..=self.r {
                put(E(i), C, C, -1);
            }
            put(C, C, C, 2 * (self.r as i64 - 8));
        }
        table
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Generator {
    H,
    E(usize),
    F(usize),
    /// Exceptional divisor over the curve.
    C,
}

/// `dH - sum m_i E_i - sum t_i F_i - tF`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorClass {
    pub degree: i64,
    pub multiplicities: Vec<i64>,
    pub line_multiplicities: BTreeMap<usize, i64>,
    pub curve_multiplicity: i64,
}

impl DivisorClass {
    pub fn new(
        degree: i64,
        multiplicities: Vec<i64>,
        line_multiplicities: BTreeMap<usize, i64>,
        curve_multiplicity: i64,
    ) -> Self {
        Self {
            degree,
            multiplicities,
            line_multiplicities,
            curve_multiplicity,
        }
    }

    pub fn zero(amb: &AmbientSpace) -> Self {
        Self::new(
            0,
            vec![0; amb.r],
            amb.lines.iter().map(|&i| (i, 0)).collect(),
            0,
        )
    }

    pub fn from_system(sys: &FatPointSystem) -> Self {
        Self::new(sys.degree, sys.multiplicities.clone(), BTreeMap::new(), 0)
    }

    pub fn hyperplane(amb: &AmbientSpace) -> Self {
        let mut d = Self::zero(amb);
        d.degree = 1;
        d
    }

    /// The exceptional divisor `E_i` (coefficient `m_i = -1`).
    pub fn exceptional_point(amb: &AmbientSpace, i: usize) -> Self {
        let mut d = Self::zero(amb);
        d.multiplicities[i - 1] = -1;
        d
    }

    pub fn exceptional_line(amb: &AmbientSpace, i: usize) -> Self {
        let mut d = Self::zero(amb);
        d.line_multiplicities.insert(i, -1);
        d
    }

    pub fn exceptional_curve(amb: &AmbientSpace) -> Self {
        let mut d = Self::zero(amb);
        d.curve_multiplicity = -1;
        d
    }

    /// Checks the shape against `amb`, padding missing line entries with 0.
    fn fit(&self, amb: &AmbientSpace) -> Result<Self> {
        if self.multiplicities.len() != amb.r
            || self
                .line_multiplicities
                .keys()
                .any(|i| !amb.lines.contains(i))
            || (self.curve_multiplicity != 0 && !amb.curve_blown)
        {
            return Err(Error::AmbientMismatch);
        }
        let mut out = self.clone();
        for &i in &amb.lines {
            out.line_multiplicities.entry(i).or_insert(0);
        }
        Ok(out)
    }

    /// Coordinates in the generator basis (signs applied).
    fn coordinates(&self, amb: &AmbientSpace) -> Result<Vec<i64>> {
        let fitted = self.fit(amb)?;
        let mut v = vec![0; amb.dimension()];
        v[amb.index(Generator::H)] = fitted.degree;
        for (i, &m) in fitted.multiplicities.iter().enumerate() {
            v[amb.index(Generator::E(i + 1))] = -m;
        }
        for (&i, &t) in &fitted.line_multiplicities {
            v[amb.index(Generator::F(i))] = -t;
        }
        if amb.curve_blown {
            v[amb.index(Generator::C)] = -fitted.curve_multiplicity;
        }
        Ok(v)
    }

    fn combine(&self, other: &Self, a: i64, b: i64) -> Self {
        let r = self.multiplicities.len().max(other.multiplicities.len());
        let at = |v: &Vec<i64>, i: usize| v.get(i).copied().unwrap_or(0);
        let mut lines = self.line_multiplicities.clone();
        for t in lines.values_mut() {
            *t *= a;
        }
        for (&i, &t) in &other.line_multiplicities {
            *lines.entry(i).or_insert(0) += b * t;
        }
        Self::new(
            a * self.degree + b * other.degree,
            (0..r)
                .map(|i| a * at(&self.multiplicities, i) + b * at(&other.multiplicities, i))
                .collect(),
            lines,
            a * self.curve_multiplicity + b * other.curve_multiplicity,
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1, 1)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, 1, -1)
    }

    pub fn scale(&self, k: i64) -> Self {
        self.combine(self, k, 0)
    }
}

/// Trilinear intersection form.
pub fn triple_product(
    d1: &DivisorClass,
    d2: &DivisorClass,
    d3: &DivisorClass,
    amb: &AmbientSpace,
) -> Result<i64> {
    let (a, b, c) = (
        d1.coordinates(amb)?,
        d2.coordinates(amb)?,
        d3.coordinates(amb)?,
    );
    Ok(amb
        .intersection_table()
        .iter()
        .map(|(&[i, j, k], &value)| value * monomial_coefficient(&a, &b, &c, i, j, k))
        .sum())
}

/// Coefficient of the symmetric monomial `g_i g_j g_k` in `a * b * c`.
fn monomial_coefficient(a: &[i64], b: &[i64], c: &[i64], i: usize, j: usize, k: usize) -> i64 {
    let mut perms = vec![
        [i, j, k],
        [i, k, j],
        [j, i, k],
        [j, k, i],
        [k, i, j],
        [k, j, i],
    ];
    perms.sort_unstable();
    perms.dedup();
    perms.iter().map(|&[x, y, z]| a[x] * b[y] * c[z]).sum()
}

/// `-c_1`.
pub fn canonical_class(amb: &AmbientSpace) -> DivisorClass {
    DivisorClass::new(
        -4,
        vec![-2; amb.r],
        amb.lines.iter().map(|&i| (i, -1)).collect(),
        if amb.curve_blown { -1 } else { 0 },
    )
}

/// Codimension-2 class over `H^2, E_i^2, HF, E_i F`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoCycle {
    pub h2: i64,
    pub e2: Vec<i64>,
    pub hf: i64,
    pub ef: Vec<i64>,
}

impl TwoCycle {
    pub fn zero(r: usize) -> Self {
        Self {
            h2: 0,
            e2: vec![0; r],
            hf: 0,
            ef: vec![0; r],
        }
    }
}

pub fn second_chern(amb: &AmbientSpace) -> TwoCycle {
    let r = amb.r;
    let mut c2 = TwoCycle::zero(r);
    c2.h2 = 6;
    if !amb.lines.is_empty() {
        let a = amb.a();
        let eps = amb.epsilon();
        c2.h2 += a;
        c2.e2[0] += a;
        for &i in amb.lines.iter().filter(|&&i| i != 1) {
            c2.e2[i - 1] += 1;
        }
        if eps == 1 {
            c2.e2[1] += 1;
            c2.e2[2] += 1;
            c2.e2[0] -= 1;
        }
    }
    if amb.curve_blown {
        c2.h2 += 4;
        for i in 0..r {
            c2.e2[i] += 1;
            c2.ef[i] += 2;
        }
        c2.hf -= 4;
    }
    c2
}

/// `c . D`, expanding each basis 2-cycle as a product of two divisors.
pub fn pair(c: &TwoCycle, d: &DivisorClass, amb: &AmbientSpace) -> Result<i64> {
    if c.e2.len() != amb.r
        || c.ef.len() != amb.r
        || ((c.hf != 0 || c.ef.iter().any(|&x| x != 0)) && !amb.curve_blown)
    {
        return Err(Error::AmbientMismatch);
    }
    let h = DivisorClass::hyperplane(amb);
    let mut total = c.h2 * triple_product(&h, &h, d, amb)?;
    for i in 1..=amb.r {
        // E_i is the class with m_i = -1
        let e = DivisorClass::exceptional_point(amb, i);
        total += c.e2[i - 1] * triple_product(&e, &e, d, amb)?;
    }
    if amb.curve_blown {
        let f = DivisorClass::exceptional_curve(amb);
        total += c.hf * triple_product(&h, &f, d, amb)?;
        for i in 1..=amb.r {
            let e = DivisorClass::exceptional_point(amb, i);
            total += c.ef[i - 1] * triple_product(&e, &f, d, amb)?;
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerCharacteristic {
    pub chi: i64,
    /// `D (D - K) (2D - K) + c_2 . D`.
    pub bracket: i64,
    pub c2_dot_d: i64,
}

/// Riemann-Roch on a threefold: `chi = [D (D-K) (2D-K) + c_2 . D] / 12 + 1`.
pub fn euler_characteristic_parts(
    d: &DivisorClass,
    amb: &AmbientSpace,
) -> Result<EulerCharacteristic> {
    let k = canonical_class(amb);
    let cubic = triple_product(d, &d.sub(&k), &d.scale(2).sub(&k), amb)?;
    let c2_dot_d = pair(&second_chern(amb), d, amb)?;
    let bracket = cubic + c2_dot_d;
    if bracket % 12 != 0 {
        return Err(Error::Divisibility { bracket });
    }
    Ok(EulerCharacteristic {
        chi: bracket / 12 + 1,
        bracket,
        c2_dot_d,
    })
}

pub fn euler_characteristic(d: &DivisorClass, amb: &AmbientSpace) -> Result<i64> {
    Ok(euler_characteristic_parts(d, amb)?.chi)
}

fn with_lines(sys: &FatPointSystem, defects: &DefectVector) -> (AmbientSpace, DivisorClass) {
    let support = defects.support();
    let amb = AmbientSpace::new(sys.r(), support.iter().copied(), false)
        .expect("defect support is a valid line set");
    let mut d = DivisorClass::from_system(sys);
    d.line_multiplicities = support.iter().map(|&i| (i, defects.get(i))).collect();
    (amb, d)
}

/// Both sides of `chi_Y(L_Y) = chi_X(L_X) + sum binom(t_i + 1, 3)`, where
/// `Y` blows up the lines with `t_i > 0`.
pub fn chi_identity_case1(sys: &FatPointSystem, defects: &DefectVector) -> Result<(i64, i64)> {
    let (amb_y, d_y) = with_lines(sys, defects);
    let lhs = euler_characteristic(&d_y, &amb_y)?;
    let chi_x = euler_characteristic(
        &DivisorClass::from_system(sys),
        &AmbientSpace::points(sys.r()),
    )?;
    Ok((lhs, chi_x + defects.correction()))
}

/// Euler characteristics around the curve blow-up for a case-three system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveChi {
    /// `chi` on `Y_I` of `(d; m; {t_i})`.
    pub chi_y: i64,
    /// `chi` on `Ỹ_I` of `(d; m; {t_i}; t)`.
    pub chi_tilde: i64,
    /// `chi_tilde + (r - 8) binom(t + 1, 3) + y binom(t + 1, 2)` with `y = -n`.
    pub rhs: i64,
}

pub fn chi_identity_case3(sys: &FatPointSystem, cls: &Classification) -> Result<CurveChi> {
    let Classification::CaseThree { defects, t, n, .. } = cls else {
        return Err(Error::PreconditionViolated(format!(
            "curve identity needs a case-three classification, got {}",
            cls.tag()
        )));
    };
    let (amb_y, d_y) = with_lines(sys, defects);
    let chi_y = euler_characteristic(&d_y, &amb_y)?;
    let amb_tilde = AmbientSpace::new(sys.r(), amb_y.lines.iter().copied(), true)?;
    let mut d_tilde = d_y.clone();
    d_tilde.curve_multiplicity = *t;
    let chi_tilde = euler_characteristic(&d_tilde, &amb_tilde)?;
    let r = sys.r() as i64;
    let y = -n;
    Ok(CurveChi {
        chi_y,
        chi_tilde,
        rhs: chi_tilde + (r - 8) * binom(t + 1, 3) + y * binom(t + 1, 2),
    })
}
