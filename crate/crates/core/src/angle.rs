//! Exact angles in the ℚ-span of π and finitely many declared irrational atoms.
//!
//! An [`Angle`] is `pi·π + Σ cᵢ·atomᵢ` with arbitrary-precision rational
//! coefficients. Atoms are opaque positive reals whose numeric values live in
//! an [`AtomEnv`]; they are assumed independent of π and of each other, so an
//! angle is commensurable with π exactly when it has no atom terms.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::AngleError;

/// Parses `"p/q"`, `"p"` or `"-p/q"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<BigRational, AngleError> {
    let bad = || AngleError::BadRational(s.to_string());
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

pub(crate) fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Numeric values (radians) of the declared atoms.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AtomEnv {
    values: BTreeMap<String, f64>,
}

impl AtomEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_map(values: BTreeMap<String, f64>) -> Result<Self, AngleError> {
        let mut env = Self::new();
        for (k, v) in values {
            env.declare(&k, v)?;
        }
        Ok(env)
    }

    pub fn declare(&mut self, name: &str, value: f64) -> Result<(), AngleError> {
        if !(value.is_finite() && value > 0.0) {
            return Err(AngleError::BadAtomValue(name.to_string(), value));
        }
        if self.values.insert(name.to_string(), value).is_some() {
            return Err(AngleError::DuplicateAtom(name.to_string()));
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// An exact angle `pi·π + Σ coeff·atom`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Angle {
    pi: BigRational,
    atoms: BTreeMap<String, BigRational>,
}

impl Angle {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `(n/d)·π`.
    pub fn pi_frac(n: i64, d: i64) -> Self {
        Self::from_pi(ratio(n, d))
    }

    pub fn pi() -> Self {
        Self::pi_frac(1, 1)
    }

    pub fn from_pi(pi: BigRational) -> Self {
        Angle { pi, atoms: BTreeMap::new() }
    }

    /// `coeff·atom`.
    pub fn atom(name: &str, coeff: BigRational) -> Self {
        let mut a = Angle::zero();
        if !coeff.is_zero() {
            a.atoms.insert(name.to_string(), coeff);
        }
        a
    }

    pub fn pi_coeff(&self) -> &BigRational {
        &self.pi
    }

    pub fn atom_terms(&self) -> &BTreeMap<String, BigRational> {
        &self.atoms
    }

    pub fn atom_coeff(&self, name: &str) -> BigRational {
        self.atoms.get(name).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.pi.is_zero() && self.atoms.is_empty()
    }

    /// True iff the angle is a rational multiple of π.
    pub fn is_pi_commensurable(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Canonical representative modulo πℚ: drops the π part.
    pub fn mod_pi_rational(&self) -> Angle {
        Angle { pi: BigRational::zero(), atoms: self.atoms.clone() }
    }

    pub fn numeric(&self, env: &AtomEnv) -> Result<f64, AngleError> {
        let mut v = rational_to_f64(&self.pi) * PI;
        for (name, c) in &self.atoms {
            let x = env.get(name).ok_or_else(|| AngleError::UnknownAtom(name.clone()))?;
            v += rational_to_f64(c) * x;
        }
        Ok(v)
    }

    pub fn scale(&self, k: &BigRational) -> Angle {
        if k.is_zero() {
            return Angle::zero();
        }
        Angle {
            pi: &self.pi * k,
            atoms: self.atoms.iter().map(|(n, c)| (n.clone(), c * k)).collect(),
        }
    }

    /// Adds `k·π` for an integer `k`.
    pub fn add_pi_multiple(&self, k: i64) -> Angle {
        let mut out = self.clone();
        out.pi += BigRational::from_integer(BigInt::from(k));
        out
    }

    /// Exact sign-aware comparison. Exact when the difference is commensurable
    /// with π; otherwise decided by the numeric value of the difference.
    pub fn cmp_with(&self, other: &Angle, env: &AtomEnv) -> Ordering {
        let d = self - other;
        if d.is_pi_commensurable() {
            return d.pi.cmp(&BigRational::zero());
        }
        let v = d.numeric(env).unwrap_or(f64::NAN);
        v.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
    }

    /// Reduces the π coefficient modulo `m` (for `m > 0`) into `[0, m)`.
    pub fn pi_coeff_mod(&self, m: &BigRational) -> BigRational {
        let q = (&self.pi / m).floor();
        &self.pi - q * m
    }

    fn cleanup(&mut self) {
        self.atoms.retain(|_, c| !c.is_zero());
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Angle, AngleError> {
        let obj = v.as_object().ok_or_else(|| AngleError::BadLiteral(v.to_string()))?;
        for k in obj.keys() {
            if k != "pi" && k != "atoms" {
                return Err(AngleError::BadLiteral(v.to_string()));
            }
        }
        let pi = match obj.get("pi") {
            Some(serde_json::Value::String(s)) => parse_rational(s)?,
            Some(serde_json::Value::Number(n)) if n.is_i64() => {
                BigRational::from_integer(BigInt::from(n.as_i64().unwrap()))
            }
            None => BigRational::zero(),
            Some(other) => return Err(AngleError::BadLiteral(other.to_string())),
        };
        let mut a = Angle::from_pi(pi);
        if let Some(atoms) = obj.get("atoms") {
            let atoms = atoms.as_object().ok_or_else(|| AngleError::BadLiteral(atoms.to_string()))?;
            for (name, c) in atoms {
                let c = match c {
                    serde_json::Value::String(s) => parse_rational(s)?,
                    serde_json::Value::Number(n) if n.is_i64() => {
                        BigRational::from_integer(BigInt::from(n.as_i64().unwrap()))
                    }
                    other => return Err(AngleError::BadLiteral(other.to_string())),
                };
                a += Angle::atom(name, c);
            }
        }
        Ok(a)
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let n = if self.atoms.is_empty() { 1 } else { 2 };
        let mut m = s.serialize_map(Some(n))?;
        if !self.atoms.is_empty() {
            let atoms: BTreeMap<&str, String> =
                self.atoms.iter().map(|(k, v)| (k.as_str(), v.to_string())).collect();
            m.serialize_entry("atoms", &atoms)?;
        }
        m.serialize_entry("pi", &self.pi.to_string())?;
        m.end()
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        Angle::from_json(&v).map_err(de::Error::custom)
    }
}

fn fmt_term(f: &mut fmt::Formatter<'_>, c: &BigRational, sym: &str, first: bool) -> fmt::Result {
    let neg = c.is_negative();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else {
        write!(f, "{}", if neg { " - " } else { " + " })?;
    }
    let a = c.abs();
    if !a.numer().is_one() {
        write!(f, "{}", a.numer())?;
    }
    write!(f, "{sym}")?;
    if !a.denom().is_one() {
        write!(f, "/{}", a.denom())?;
    }
    Ok(())
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        if !self.pi.is_zero() {
            fmt_term(f, &self.pi, "π", true)?;
            first = false;
        }
        for (name, c) in &self.atoms {
            fmt_term(f, c, name, first)?;
            first = false;
        }
        Ok(())
    }
}

impl<'a> Add<&'a Angle> for &'a Angle {
    type Output = Angle;
    fn add(self, rhs: &Angle) -> Angle {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(mut self, rhs: Angle) -> Angle {
        self += &rhs;
        self
    }
}

impl Add<&Angle> for Angle {
    type Output = Angle;
    fn add(mut self, rhs: &Angle) -> Angle {
        self += rhs;
        self
    }
}

impl AddAssign<&Angle> for Angle {
    fn add_assign(&mut self, rhs: &Angle) {
        self.pi += &rhs.pi;
        for (name, c) in &rhs.atoms {
            *self.atoms.entry(name.clone()).or_insert_with(BigRational::zero) += c;
        }
        self.cleanup();
    }
}

impl AddAssign for Angle {
    fn add_assign(&mut self, rhs: Angle) {
        *self += &rhs;
    }
}

impl<'a> Sub<&'a Angle> for &'a Angle {
    type Output = Angle;
    fn sub(self, rhs: &Angle) -> Angle {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(mut self, rhs: Angle) -> Angle {
        self -= &rhs;
        self
    }
}

impl Sub<&Angle> for Angle {
    type Output = Angle;
    fn sub(mut self, rhs: &Angle) -> Angle {
        self -= rhs;
        self
    }
}

impl SubAssign<&Angle> for Angle {
    fn sub_assign(&mut self, rhs: &Angle) {
        self.pi -= &rhs.pi;
        for (name, c) in &rhs.atoms {
            *self.atoms.entry(name.clone()).or_insert_with(BigRational::zero) -= c;
        }
        self.cleanup();
    }
}

impl Neg for &Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle {
            pi: -&self.pi,
            atoms: self.atoms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        -&self
    }
}

impl Mul<i64> for &Angle {
    type Output = Angle;
    fn mul(self, k: i64) -> Angle {
        self.scale(&BigRational::from_integer(BigInt::from(k)))
    }
}

/// Least common multiple of the denominators of a set of rationals.
pub fn lcm_of_denominators<'a>(it: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    it.into_iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// An angle that is exact when available, always carrying its numeric value.
///
/// Directions produced by tracing from an exact launch stay exact because the
/// angle a straight line makes with successive triangle sides only changes by
/// exact corner angles; numeric launches stay numeric.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleValue {
    pub exact: Option<Angle>,
    pub value: f64,
}

impl AngleValue {
    pub fn exact(a: Angle, env: &AtomEnv) -> Result<Self, AngleError> {
        let value = a.numeric(env)?;
        Ok(AngleValue { exact: Some(a), value })
    }

    pub fn numeric(value: f64) -> Self {
        AngleValue { exact: None, value }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn add(&self, o: &AngleValue) -> AngleValue {
        AngleValue {
            exact: match (&self.exact, &o.exact) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            },
            value: self.value + o.value,
        }
    }

    pub fn sub(&self, o: &AngleValue) -> AngleValue {
        AngleValue {
            exact: match (&self.exact, &o.exact) {
                (Some(a), Some(b)) => Some(a - b),
                _ => None,
            },
            value: self.value - o.value,
        }
    }

    pub fn neg(&self) -> AngleValue {
        AngleValue { exact: self.exact.as_ref().map(|a| -a), value: -self.value }
    }

    /// Adds `k·π`; the numeric part is recomputed from the exact part when
    /// present so repeated wrapping does not drift.
    pub fn add_pi_multiple(&self, k: i64, env: &AtomEnv) -> AngleValue {
        match &self.exact {
            Some(a) => {
                let e = a.add_pi_multiple(k);
                let value = e.numeric(env).unwrap_or(self.value + k as f64 * PI);
                AngleValue { exact: Some(e), value }
            }
            None => AngleValue::numeric(self.value + k as f64 * PI),
        }
    }

    /// Wraps into `[0, 2π)` using the numeric value to pick the shift.
    pub fn wrap_two_pi(&self, env: &AtomEnv) -> AngleValue {
        let k = (self.value / (2.0 * PI)).floor() as i64;
        let mut out = if k != 0 { self.add_pi_multiple(-2 * k, env) } else { self.clone() };
        if out.value < 0.0 {
            out = out.add_pi_multiple(2, env);
        } else if out.value >= 2.0 * PI {
            out = out.add_pi_multiple(-2, env);
        }
        out
    }

    /// Comparison that is exact when both sides are exact.
    pub fn cmp_with(&self, o: &AngleValue, env: &AtomEnv, tol: f64) -> Ordering {
        if let (Some(a), Some(b)) = (&self.exact, &o.exact) {
            return a.cmp_with(b, env);
        }
        let d = self.value - o.value;
        if d.abs() <= tol {
            Ordering::Equal
        } else if d < 0.0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    pub fn min_with(self, o: AngleValue, env: &AtomEnv, tol: f64) -> AngleValue {
        if o.cmp_with(&self, env, tol) == Ordering::Less {
            o
        } else {
            self
        }
    }
}

impl Serialize for AngleValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("exact", &self.exact)?;
        m.serialize_entry("value", &self.value)?;
        m.end()
    }
}

impl fmt::Display for AngleValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(a) => write!(f, "{a}"),
            None => write!(f, "{}", self.value),
        }
    }
}
