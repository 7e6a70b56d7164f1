//! Trace-free symmetric 2-tensors, exact sphere moments, multivariate
//! polynomials, and the fourth-order boundary metric jet.

use std::collections::BTreeMap;

use num::rational::BigRational;
use num::{One, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::point::{Matrix, MAX_DIM};
use crate::quadrature::gamma_half;
use crate::scalars::{parse_rat, rat, rat_int, rat_to_f64, sphere_area, sphere_ratio, ExactScalar};

const FLOAT_TRACE_TOL: f64 = 1e-12;

/// Symmetric trace-free `n × n` tensor, stored densely.
///
/// Rational input keeps an exact copy; floating input is checked to
/// `1e-12`.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceFreePi {
    n: usize,
    entries: Vec<f64>,
    exact: Option<Vec<BigRational>>,
}

impl TraceFreePi {
    pub fn from_rational(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("pi must be a non-empty square array".into()));
        }
        let flat: Vec<BigRational> = rows.into_iter().flatten().collect();
        for i in 0..n {
            for j in 0..i {
                if flat[i * n + j] != flat[j * n + i] {
                    return Err(Error::InvalidInput(format!("pi is not symmetric at ({i},{j})")));
                }
            }
        }
        let tr: BigRational = (0..n).map(|i| flat[i * n + i].clone()).sum();
        if !tr.is_zero() {
            return Err(Error::InvalidInput(format!("pi has trace {tr}")));
        }
        Ok(Self {
            n,
            entries: flat.iter().map(rat_to_f64).collect(),
            exact: Some(flat),
        })
    }

    pub fn from_f64(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("pi must be a non-empty square array".into()));
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        if flat.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("pi has non-finite entries".into()));
        }
        let scale = flat.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            for j in 0..i {
                if (flat[i * n + j] - flat[j * n + i]).abs() > FLOAT_TRACE_TOL * scale {
                    return Err(Error::InvalidInput(format!("pi is not symmetric at ({i},{j})")));
                }
            }
        }
        let tr: f64 = (0..n).map(|i| flat[i * n + i]).sum();
        if tr.abs() > FLOAT_TRACE_TOL * scale {
            return Err(Error::InvalidInput(format!("pi has trace {tr:e}")));
        }
        Ok(Self {
            n,
            entries: flat,
            exact: None,
        })
    }

    /// Diagonal tensor from integer entries.
    pub fn diag(values: &[i64]) -> Result<Self> {
        let n = values.len();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { rat_int(values[i]) } else { BigRational::zero() })
                    .collect()
            })
            .collect();
        Self::from_rational(rows)
    }

    /// Zero-trace projection of an arbitrary symmetric float array.
    pub fn project_f64(mut rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        for i in 0..n {
            for j in 0..i {
                let m = 0.5 * (rows[i][j] + rows[j][i]);
                rows[i][j] = m;
                rows[j][i] = m;
            }
        }
        let tr: f64 = (0..n).map(|i| rows[i][i]).sum::<f64>() / n as f64;
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] -= tr;
        }
        Self::from_f64(rows)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn get_exact(&self, i: usize, j: usize) -> Option<&BigRational> {
        self.exact.as_ref().map(|e| &e[i * self.n + j])
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|v| *v == 0.0)
    }

    /// `π_ij π_ij`.
    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum()
    }

    pub fn norm_sq_exact(&self) -> Option<BigRational> {
        self.exact.as_ref().map(|e| e.iter().map(|v| v * v).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `π_ij y_i y_j`.
    pub fn quad_form(&self, y: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += self.entries[i * n + j] * y[j];
            }
            acc += y[i] * row;
        }
        acc
    }

    /// `π y`.
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.entries[i * n + j] * y[j]).sum())
            .collect()
    }

    /// `π²` as a dense row-major array.
    pub fn square(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n).map(|k| self.get(i, k) * self.get(k, j)).sum();
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|v| v * c).collect(),
            exact: None,
        }
    }
}

/// `2 / (n (n+2))`, the mean of `π_ij π_kl y_i y_j y_k y_l` over `S^{n-1}`
/// per unit `‖π‖²` for trace-free `π`.
pub fn quartic_factor(n: usize) -> BigRational {
    rat(2, (n * (n + 2)) as i64)
}

/// `π_ij π_kl ⨍ y_i y_j y_k y_l` over `S^{n-1}` as an exact rational.
pub fn quartic_contraction(pi: &TraceFreePi) -> Result<BigRational> {
    let norm = pi
        .norm_sq_exact()
        .ok_or_else(|| Error::InvalidInput("exact contraction needs a rational pi".into()))?;
    Ok(quartic_factor(pi.dim()) * norm)
}

pub fn quartic_contraction_f64(pi: &TraceFreePi) -> f64 {
    rat_to_f64(&quartic_factor(pi.dim())) * pi.norm_sq()
}

/// Brute-force sum over all index quadruples with exact sphere moments.
pub fn quartic_contraction_brute(pi: &TraceFreePi) -> f64 {
    let n = pi.dim();
    let mut acc = 0.0;
    let mut alpha = vec![0u32; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let w = pi.get(i, j) * pi.get(k, l);
                    if w == 0.0 {
                        continue;
                    }
                    alpha.iter_mut().for_each(|a| *a = 0);
                    for idx in [i, j, k, l] {
                        alpha[idx] += 1;
                    }
                    acc += w * rat_to_f64(&sphere_mean(&alpha));
                }
            }
        }
    }
    acc
}

fn double_factorial_odd(a: u32) -> BigRational {
    // (a-1)!! for even a
    let mut v = BigRational::one();
    let mut k = a as i64 - 1;
    while k > 1 {
        v *= rat_int(k);
        k -= 2;
    }
    v
}

/// Mean of `y^alpha` over the full sphere `S^{d-1}`, `d = alpha.len()`.
pub fn sphere_mean(alpha: &[u32]) -> BigRational {
    if alpha.iter().any(|a| a % 2 == 1) {
        return BigRational::zero();
    }
    let d = alpha.len() as i64;
    let num: BigRational = alpha.iter().map(|&a| double_factorial_odd(a)).product();
    let deg: u32 = alpha.iter().sum();
    let den: BigRational = (0..(deg / 2) as i64).map(|j| rat_int(d + 2 * j)).product();
    num / den
}

/// Exact sphere moment stored as `coeff · |S^unit|`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereMoment {
    pub alpha: Vec<u32>,
    pub hemisphere: bool,
    pub coeff: BigRational,
    /// `k` in the symbolic unit `|S^k|`.
    pub unit: u32,
}

impl SphereMoment {
    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.coeff) * sphere_area(self.unit).value
    }

    /// Closed value in `Q + Q*pi`, when the unit area is representable.
    pub fn exact(&self) -> Option<ExactScalar> {
        sphere_area(self.unit).exact.map(|a| a.scale(&self.coeff))
    }

    /// Coefficient with respect to `|S^unit|` for a neighbouring unit.
    pub fn in_unit(&self, unit: u32) -> Result<ExactScalar> {
        convert_unit(&ExactScalar::rational(self.coeff.clone()), self.unit, unit)
    }
}

/// Re-expresses `c · |S^from|` as a multiple of `|S^to|`.
pub fn convert_unit(c: &ExactScalar, from: u32, to: u32) -> Result<ExactScalar> {
    if from == to {
        return Ok(c.clone());
    }
    if from == to + 1 {
        return c.try_mul(&sphere_ratio(from));
    }
    if to == from + 1 {
        let r = sphere_ratio(to);
        if r.is_rational() {
            return Ok(c.scale(&(BigRational::one() / r.rat_part())));
        }
        if c.is_pure_pi() {
            return Ok(ExactScalar::rational(c.pi_part() / r.pi_part()));
        }
        return Err(Error::PiSquared);
    }
    Err(Error::InvalidInput(format!("no unit conversion |S^{from}| -> |S^{to}|")))
}

/// `∫ x^alpha dS` over the unit sphere `S^{N-1}` (or its `x_N ≥ 0` half),
/// `N = alpha.len() = dim`.
///
/// Full-sphere and even-`x_N` moments carry the unit `|S^{N-1}|`; odd-`x_N`
/// hemisphere moments carry `|S^{N-2}|`.
pub fn moment(alpha: &[u32], hemisphere: bool, dim: usize) -> Result<SphereMoment> {
    if alpha.len() != dim || dim < 2 {
        return Err(Error::InvalidInput(format!(
            "multi-index of length {} for dimension {dim}",
            alpha.len()
        )));
    }
    let big = (dim - 1) as u32;
    let (tang, last) = alpha.split_at(dim - 1);
    let k = last[0];
    if tang.iter().any(|a| a % 2 == 1) {
        return Ok(SphereMoment {
            alpha: alpha.to_vec(),
            hemisphere,
            coeff: BigRational::zero(),
            unit: big,
        });
    }
    if !hemisphere || k % 2 == 0 {
        let mut c = sphere_mean(alpha);
        if hemisphere {
            c /= rat_int(2);
        }
        return Ok(SphereMoment {
            alpha: alpha.to_vec(),
            hemisphere,
            coeff: c,
            unit: big,
        });
    }
    // x = (sin θ ω, cos θ): ∫_0^{π/2} cos^k sin^{m} dθ · ∫_{S^{N-2}} ω^tang
    let m = (dim - 2) as i64 + tang.iter().map(|&a| a as i64).sum::<i64>();
    let (ga, ea) = gamma_half(k as i64 + 1);
    let (gb, eb) = gamma_half(m + 1);
    let (gab, eab) = gamma_half(k as i64 + m + 2);
    debug_assert_eq!(ea + eb, eab);
    let theta = ga * gb / gab / rat_int(2);
    Ok(SphereMoment {
        alpha: alpha.to_vec(),
        hemisphere,
        coeff: theta * sphere_mean(tang),
        unit: big - 1,
    })
}

/// Multivariate polynomial with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly {
    vars: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl Poly {
    pub fn zero(vars: usize) -> Self {
        Self {
            vars,
            terms: BTreeMap::new(),
        }
    }

    /// `c · x^alpha`.
    pub fn monomial(vars: usize, alpha: Vec<u32>, c: BigRational) -> Self {
        assert_eq!(alpha.len(), vars);
        let mut p = Self::zero(vars);
        p.add_term(alpha, c);
        p
    }

    /// `c · x_{i1} x_{i2} ...`.
    pub fn from_indices(vars: usize, idx: &[usize], c: BigRational) -> Self {
        let mut alpha = vec![0; vars];
        for &i in idx {
            alpha[i] += 1;
        }
        Self::monomial(vars, alpha, c)
    }

    pub fn add_term(&mut self, alpha: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(alpha.clone()).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&alpha);
        }
    }

    pub fn add_assign(&mut self, o: &Poly) {
        for (a, c) in &o.terms {
            self.add_term(a.clone(), c.clone());
        }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        let mut out = Poly::zero(self.vars);
        for (a, v) in &self.terms {
            out.add_term(a.clone(), v * c);
        }
        out
    }

    /// `x_k · p`.
    pub fn times_var(&self, k: usize) -> Poly {
        let mut out = Poly::zero(self.vars);
        for (a, v) in &self.terms {
            let mut b = a.clone();
            b[k] += 1;
            out.add_term(b, v.clone());
        }
        out
    }

    pub fn derivative(&self, k: usize) -> Poly {
        let mut out = Poly::zero(self.vars);
        for (a, v) in &self.terms {
            if a[k] == 0 {
                continue;
            }
            let mut b = a.clone();
            b[k] -= 1;
            out.add_term(b, v * rat_int(a[k] as i64));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRational)> {
        self.terms.iter()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(a, c)| {
                rat_to_f64(c)
                    * a.iter()
                        .zip(x)
                        .map(|(&e, &xi)| xi.powi(e as i32))
                        .product::<f64>()
            })
            .sum()
    }

    /// Homogeneous part of the given total degree.
    pub fn homogeneous(&self, degree: u32) -> Poly {
        let mut out = Poly::zero(self.vars);
        for (a, c) in &self.terms {
            if a.iter().sum::<u32>() == degree {
                out.add_term(a.clone(), c.clone());
            }
        }
        out
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.terms.keys().map(|a| a.iter().sum()).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// `∫ p dS` over the upper unit hemisphere of `S^{vars-1}` in units of
    /// `|S^{vars-2}|`.
    pub fn hemisphere_integral(&self) -> Result<ExactScalar> {
        let unit = (self.vars - 2) as u32;
        let mut acc = ExactScalar::zero();
        for (a, c) in &self.terms {
            let m = moment(a, true, self.vars)?;
            acc += &m.in_unit(unit)?.scale(c);
        }
        Ok(acc)
    }
}

/// Dense rational tensor of a fixed shape.
#[derive(Clone, Debug, PartialEq)]
pub struct JetTensor {
    shape: Vec<usize>,
    data: Vec<BigRational>,
    data_f64: Vec<f64>,
}

impl JetTensor {
    pub fn zeros(shape: &[usize]) -> Self {
        let len = shape.iter().product();
        Self {
            shape: shape.to_vec(),
            data: vec![BigRational::zero(); len],
            data_f64: vec![0.0; len],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        idx.iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &s)| acc * s + i)
    }

    pub fn get(&self, idx: &[usize]) -> &BigRational {
        &self.data[self.offset(idx)]
    }

    pub fn get_f64(&self, idx: &[usize]) -> f64 {
        self.data_f64[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: BigRational) {
        let o = self.offset(idx);
        self.data_f64[o] = rat_to_f64(&v);
        self.data[o] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn scaled(&self, c: &BigRational) -> Self {
        let data: Vec<BigRational> = self.data.iter().map(|v| v * c).collect();
        Self {
            shape: self.shape.clone(),
            data_f64: data.iter().map(rat_to_f64).collect(),
            data,
        }
    }

    /// All multi-indices in row-major order.
    pub fn indices(&self) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for &s in &self.shape {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..s).map(move |i| {
                        let mut q = p.clone();
                        q.push(i);
                        q
                    })
                })
                .collect();
        }
        out
    }

    fn from_json(v: &Value, shape: &[usize], name: &str) -> Result<Self> {
        let mut t = Self::zeros(shape);
        fn walk(
            v: &Value,
            depth: usize,
            shape: &[usize],
            idx: &mut Vec<usize>,
            t: &mut JetTensor,
            name: &str,
        ) -> Result<()> {
            if depth == shape.len() {
                let r = match v {
                    Value::String(s) => parse_rat(s)?,
                    Value::Number(n) => {
                        if let Some(i) = n.as_i64() {
                            rat_int(i)
                        } else {
                            return Err(Error::Parse(format!(
                                "{name}: use integers or rational strings, got {n}"
                            )));
                        }
                    }
                    other => return Err(Error::Parse(format!("{name}: bad entry {other}"))),
                };
                t.set(idx, r);
                return Ok(());
            }
            let arr = v
                .as_array()
                .filter(|a| a.len() == shape[depth])
                .ok_or_else(|| {
                    Error::Parse(format!("{name}: expected array of length {} at depth {depth}", shape[depth]))
                })?;
            for (i, item) in arr.iter().enumerate() {
                idx.push(i);
                walk(item, depth + 1, shape, idx, t, name)?;
                idx.pop();
            }
            Ok(())
        }
        walk(v, 0, shape, &mut Vec::new(), &mut t, name)?;
        Ok(t)
    }

    fn to_json(&self) -> Value {
        fn build(t: &JetTensor, depth: usize, idx: &mut Vec<usize>) -> Value {
            if depth == t.shape.len() {
                return Value::String(t.get(idx).to_string());
            }
            Value::Array(
                (0..t.shape[depth])
                    .map(|i| {
                        idx.push(i);
                        let v = build(t, depth + 1, idx);
                        idx.pop();
                        v
                    })
                    .collect(),
            )
        }
        build(self, 0, &mut Vec::new())
    }
}

/// Tensors entering the fourth-order metric expansion in boundary Fermi
/// coordinates, all taken at the centre point. Indices run over the `n`
/// boundary directions; the normal direction is implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricJet {
    pub n: usize,
    /// Second fundamental form `II_ij`.
    pub sff: JetTensor,
    /// `II_ij,k`.
    pub sff_d1: JetTensor,
    /// `II_ij,kl`.
    pub sff_d2: JetTensor,
    /// Boundary curvature `R_ikjl[h]`.
    pub riem: JetTensor,
    /// `R_ikjl,m[h]`.
    pub riem_d: JetTensor,
    /// Normal curvature `R_iNjN[g]`.
    pub normal_curv: JetTensor,
    /// `R_iNjN,k[g]`.
    pub normal_curv_d: JetTensor,
    /// `R_iNjN,N[g]`.
    pub normal_curv_dn: JetTensor,
    pub conformal_normalized: bool,
}

const JET_KEYS: [(&str, usize); 8] = [
    ("second_fundamental_form", 2),
    ("sff_derivative", 3),
    ("sff_second_derivative", 4),
    ("boundary_riemann", 4),
    ("boundary_riemann_derivative", 5),
    ("normal_curvature", 2),
    ("normal_curvature_tangential_derivative", 3),
    ("normal_curvature_normal_derivative", 2),
];

impl MetricJet {
    pub fn zero(n: usize) -> Self {
        let t = |k: usize| JetTensor::zeros(&vec![n; k]);
        Self {
            n,
            sff: t(2),
            sff_d1: t(3),
            sff_d2: t(4),
            riem: t(4),
            riem_d: t(5),
            normal_curv: t(2),
            normal_curv_d: t(3),
            normal_curv_dn: t(2),
            conformal_normalized: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    fn tensors(&self) -> [&JetTensor; 8] {
        [
            &self.sff,
            &self.sff_d1,
            &self.sff_d2,
            &self.riem,
            &self.riem_d,
            &self.normal_curv,
            &self.normal_curv_d,
            &self.normal_curv_dn,
        ]
    }

    fn tensors_mut(&mut self) -> [&mut JetTensor; 8] {
        [
            &mut self.sff,
            &mut self.sff_d1,
            &mut self.sff_d2,
            &mut self.riem,
            &mut self.riem_d,
            &mut self.normal_curv,
            &mut self.normal_curv_d,
            &mut self.normal_curv_dn,
        ]
    }

    pub fn is_zero(&self) -> bool {
        self.tensors().iter().all(|t| t.is_zero())
    }

    /// Multiplies every tensor by `c`.
    pub fn scaled(&self, c: &BigRational) -> Self {
        let mut out = self.clone();
        for t in out.tensors_mut() {
            *t = t.scaled(c);
        }
        out
    }

    /// Parses `{"n": 4, "<tensor name>": nested arrays, ...}`; absent tensors
    /// are zero. Entries are integers or rational strings such as `"-3/7"`.
    pub fn from_json_str(s: &str, strict: bool) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let n = v
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing boundary dimension \"n\"".into()))? as usize;
        if !(2..=7).contains(&n) {
            return Err(Error::UnsupportedDimension(n + 1));
        }
        let mut jet = Self::zero(n);
        for ((key, rank), slot) in JET_KEYS.iter().zip(jet.tensors_mut()) {
            if let Some(t) = v.get(*key) {
                *slot = JetTensor::from_json(t, &vec![n; *rank], key)?;
            }
        }
        jet.conformal_normalized = v
            .get("conformal_normalized")
            .and_then(Value::as_bool)
            .unwrap_or(false);
        jet.validate(strict)?;
        Ok(jet)
    }

    pub fn to_json(&self) -> Value {
        let mut m = serde_json::Map::new();
        m.insert("n".into(), Value::from(self.n));
        for ((key, _), t) in JET_KEYS.iter().zip(self.tensors()) {
            if !t.is_zero() {
                m.insert((*key).into(), t.to_json());
            }
        }
        m.insert("conformal_normalized".into(), Value::Bool(self.conformal_normalized));
        Value::Object(m)
    }

    /// Index-symmetry checks; `strict` adds the Riemann symmetries and the
    /// first Bianchi identity. When the jet is flagged conformally
    /// normalized, the normalization constraints are enforced as well.
    pub fn validate(&self, strict: bool) -> Result<()> {
        let sym_ij = |t: &JetTensor, name: &str| -> Result<()> {
            for idx in t.indices() {
                let mut sw = idx.clone();
                sw.swap(0, 1);
                if t.get(&idx) != t.get(&sw) {
                    return Err(Error::InvalidInput(format!("{name} not symmetric in its first pair at {idx:?}")));
                }
            }
            Ok(())
        };
        sym_ij(&self.sff, "second fundamental form")?;
        sym_ij(&self.sff_d1, "sff derivative")?;
        sym_ij(&self.sff_d2, "sff second derivative")?;
        sym_ij(&self.normal_curv, "normal curvature")?;
        sym_ij(&self.normal_curv_d, "normal curvature derivative")?;
        sym_ij(&self.normal_curv_dn, "normal curvature normal derivative")?;
        if strict {
            for (t, name) in [(&self.riem, "boundary riemann"), (&self.riem_d, "riemann derivative")] {
                for idx in t.indices() {
                    let (i, k, j, l) = (idx[0], idx[1], idx[2], idx[3]);
                    let tail = &idx[4..];
                    let at = |a: usize, b: usize, c: usize, d: usize| {
                        let mut v = vec![a, b, c, d];
                        v.extend_from_slice(tail);
                        t.get(&v).clone()
                    };
                    let v = at(i, k, j, l);
                    let ok = v == -at(k, i, j, l)
                        && v == -at(i, k, l, j)
                        && v == at(j, l, i, k)
                        && (&v + &at(i, j, l, k) + at(i, l, k, j)).is_zero();
                    if !ok {
                        return Err(Error::InvalidInput(format!("{name} violates curvature symmetries at {idx:?}")));
                    }
                }
            }
        }
        if self.conformal_normalized {
            let v = self.conformal_violations();
            if !v.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "jet flagged conformal_normalized but violates: {}",
                    v.join("; ")
                )));
            }
        }
        Ok(())
    }

    /// Normalization constraints that fail, described in words.
    pub fn conformal_violations(&self) -> Vec<String> {
        let n = self.n;
        let mut out = Vec::new();
        let tr: BigRational = (0..n).map(|i| self.sff.get(&[i, i]).clone()).sum();
        if !tr.is_zero() {
            out.push(format!("mean curvature trace {tr}"));
        }
        for k in 0..n {
            let t: BigRational = (0..n).map(|i| self.sff_d1.get(&[i, i, k]).clone()).sum();
            if !t.is_zero() {
                out.push(format!("trace of sff derivative along {k} is {t}"));
            }
            let t: BigRational = (0..n).map(|i| self.normal_curv_d.get(&[i, i, k]).clone()).sum();
            if !t.is_zero() {
                out.push(format!("tangential derivative of normal Ricci along {k} is {t}"));
            }
            for l in 0..n {
                let t: BigRational = (0..n)
                    .map(|i| self.sff_d2.get(&[i, i, k, l]) + self.sff_d2.get(&[i, i, l, k]))
                    .sum();
                if !t.is_zero() {
                    out.push(format!("symmetrized second derivative of mean curvature ({k},{l})"));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let ric: BigRational = (0..n).map(|k| self.riem.get(&[i, k, j, k]).clone()).sum();
                if !ric.is_zero() {
                    out.push(format!("boundary Ricci ({i},{j}) is {ric}"));
                }
                for k in 0..n {
                    for l in 0..n {
                        for m in 0..n {
                            let s = self.riem_d.get(&[i, k, j, l, m])
                                + self.riem_d.get(&[i, k, j, m, l])
                                + self.riem_d.get(&[i, l, j, k, m])
                                + self.riem_d.get(&[i, l, j, m, k])
                                + self.riem_d.get(&[i, m, j, k, l])
                                + self.riem_d.get(&[i, m, j, l, k]);
                            if !s.is_zero() {
                                out.push(format!("symmetrized riemann derivative ({i},{k},{j},{l},{m})"));
                            }
                        }
                    }
                }
            }
        }
        let rnn: BigRational = (0..n).map(|i| self.normal_curv.get(&[i, i]).clone()).sum();
        let norm: BigRational = self.sff.data.iter().map(|v| v * v).sum();
        if rnn != -norm.clone() {
            out.push(format!("normal Ricci {rnn} differs from -|II|^2 = {}", -norm));
        }
        let t: BigRational = (0..n).map(|i| self.normal_curv_dn.get(&[i, i]).clone()).sum();
        if !t.is_zero() {
            out.push(format!("normal derivative of normal Ricci is {t}"));
        }
        out
    }

    /// Conformally normalized jet with flat boundary curvature whose other
    /// entries are drawn from `draw`, then projected onto the constraints.
    pub fn conformal_from_source<F: FnMut() -> BigRational>(n: usize, mut draw: F) -> Self {
        let mut jet = Self::zero(n);
        let sym_fill = |t: &mut JetTensor, draw: &mut F| {
            for idx in t.indices() {
                if idx[0] <= idx[1] {
                    let v = draw();
                    let mut sw = idx.clone();
                    sw.swap(0, 1);
                    t.set(&idx, v.clone());
                    t.set(&sw, v);
                }
            }
        };
        let detrace = |t: &mut JetTensor, target: &dyn Fn(&[usize]) -> BigRational| {
            let n = t.shape()[0];
            let tail_shape: Vec<usize> = t.shape()[2..].to_vec();
            let tails = JetTensor::zeros(&tail_shape).indices();
            for tail in tails {
                let at = |i: usize| {
                    let mut v = vec![i, i];
                    v.extend_from_slice(&tail);
                    v
                };
                let tr: BigRational = (0..n).map(|i| t.get(&at(i)).clone()).sum();
                let shift = (tr - target(&tail)) / rat_int(n as i64);
                for i in 0..n {
                    let idx = at(i);
                    let v = t.get(&idx) - &shift;
                    t.set(&idx, v);
                }
            }
        };
        let zero_target = |_: &[usize]| BigRational::zero();
        sym_fill(&mut jet.sff, &mut draw);
        detrace(&mut jet.sff, &zero_target);
        sym_fill(&mut jet.sff_d1, &mut draw);
        detrace(&mut jet.sff_d1, &zero_target);
        sym_fill(&mut jet.sff_d2, &mut draw);
        detrace(&mut jet.sff_d2, &zero_target);
        sym_fill(&mut jet.normal_curv, &mut draw);
        let norm: BigRational = jet.sff.data.iter().map(|v| v * v).sum();
        detrace(&mut jet.normal_curv, &|_| -norm.clone());
        sym_fill(&mut jet.normal_curv_d, &mut draw);
        detrace(&mut jet.normal_curv_d, &zero_target);
        sym_fill(&mut jet.normal_curv_dn, &mut draw);
        detrace(&mut jet.normal_curv_dn, &zero_target);
        jet.conformal_normalized = true;
        jet
    }

    /// Jet whose only nonzero tensor is `II_ij,kl` (symmetric in `ij` and in
    /// `kl`, trace-free in `ij`).
    pub fn sff_second_derivative_only(sff_d2: JetTensor) -> Result<Self> {
        let n = sff_d2.shape()[0];
        let mut jet = Self::zero(n);
        jet.sff_d2 = sff_d2;
        jet.conformal_normalized = true;
        jet.validate(false)?;
        Ok(jet)
    }

    /// `Σ_ij II_ij,ij`.
    pub fn sff_second_trace(&self) -> BigRational {
        let n = self.n;
        let mut acc = BigRational::zero();
        for i in 0..n {
            for j in 0..n {
                acc += self.sff_d2.get(&[i, j, i, j]);
            }
        }
        acc
    }
}

/// `A_ij` coefficients of a jet contracted once into `f64` arrays, one per
/// monomial type in `(x̄, x_N)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericJet {
    n: usize,
    t1: Vec<f64>,
    t2: Vec<f64>,
    t3: Vec<f64>,
    xt: Vec<f64>,
    xt2: Vec<f64>,
    xx: Vec<f64>,
    xxt: Vec<f64>,
    /// Empty when the boundary curvature derivative vanishes.
    xxx: Vec<f64>,
}

impl NumericJet {
    pub fn new(jet: &MetricJet) -> Self {
        let n = jet.n;
        let ii = |i: usize, j: usize| jet.sff.get_f64(&[i, j]);
        let rn = |i: usize, j: usize| jet.normal_curv.get_f64(&[i, j]);
        let n2 = n * n;
        let mut t1 = vec![0.0; n2];
        let mut t2 = vec![0.0; n2];
        let mut t3 = vec![0.0; n2];
        let mut xt = vec![0.0; n2 * n];
        let mut xt2 = vec![0.0; n2 * n];
        let mut xx = vec![0.0; n2 * n2];
        let mut xxt = vec![0.0; n2 * n2];
        let mut xxx = if jet.riem_d.is_zero() {
            Vec::new()
        } else {
            vec![0.0; n2 * n2 * n]
        };
        for i in 0..n {
            for j in 0..n {
                let ij = i * n + j;
                let mut iisq = 0.0;
                let mut sym_ir = 0.0;
                for s in 0..n {
                    iisq += ii(i, s) * ii(s, j);
                    sym_ir += 0.5 * (ii(i, s) * rn(j, s) + ii(j, s) * rn(i, s));
                }
                t1[ij] = -2.0 * ii(i, j);
                t2[ij] = -rn(i, j) + iisq;
                t3[ij] = (-2.0 * jet.normal_curv_dn.get_f64(&[i, j]) + 8.0 * sym_ir) / 6.0;
                for k in 0..n {
                    let mut sym_d = 0.0;
                    for s in 0..n {
                        sym_d += 0.5
                            * (jet.sff_d1.get_f64(&[i, s, k]) * ii(s, j) + jet.sff_d1.get_f64(&[j, s, k]) * ii(s, i));
                    }
                    xt[ij * n + k] = -2.0 * jet.sff_d1.get_f64(&[i, j, k]);
                    xt2[ij * n + k] = -jet.normal_curv_d.get_f64(&[i, j, k]) + 2.0 * sym_d;
                    for l in 0..n {
                        let mut sym_r = 0.0;
                        for s in 0..n {
                            sym_r += 0.5
                                * (jet.riem.get_f64(&[i, k, s, l]) * ii(s, j)
                                    + jet.riem.get_f64(&[j, k, s, l]) * ii(s, i));
                        }
                        let o = (ij * n + k) * n + l;
                        xx[o] = -jet.riem.get_f64(&[i, k, j, l]) / 3.0;
                        xxt[o] = -jet.sff_d2.get_f64(&[i, j, k, l]) + 2.0 / 3.0 * sym_r;
                        if !xxx.is_empty() {
                            for m in 0..n {
                                xxx[o * n + m] = -jet.riem_d.get_f64(&[i, k, j, l, m]) / 6.0;
                            }
                        }
                    }
                }
            }
        }
        Self {
            n,
            t1,
            t2,
            t3,
            xt,
            xt2,
            xx,
            xxt,
            xxx,
        }
    }

    /// `A_ij(x)` into the leading `n × n` block of `out`.
    pub fn a_into(&self, x: &[f64], out: &mut Matrix) {
        let n = self.n;
        let t = x[n];
        for i in 0..n {
            for j in 0..n {
                let ij = i * n + j;
                let mut a = (self.t1[ij] + (self.t2[ij] + self.t3[ij] * t) * t) * t;
                for k in 0..n {
                    let xk = x[k];
                    a += (self.xt[ij * n + k] + self.xt2[ij * n + k] * t) * xk * t;
                    for l in 0..n {
                        let o = (ij * n + k) * n + l;
                        let mut c = self.xx[o] + self.xxt[o] * t;
                        if !self.xxx.is_empty() {
                            for m in 0..n {
                                c += self.xxx[o * n + m] * x[m];
                            }
                        }
                        a += c * xk * x[l];
                    }
                }
                out[i][j] = a;
            }
        }
    }
}

/// `A_ij(x)` for `x ∈ R^N_+`, returned as an `N × N` matrix with vanishing
/// normal row and column.
pub fn metric_jet_a(jet: &MetricJet, x: &[f64]) -> Vec<Vec<f64>> {
    let n = jet.n;
    let big = n + 1;
    assert_eq!(x.len(), big);
    let mut m = [[0.0; MAX_DIM]; MAX_DIM];
    NumericJet::new(jet).a_into(x, &mut m);
    let mut out = vec![vec![0.0; big]; big];
    for i in 0..n {
        out[i][..n].copy_from_slice(&m[i][..n]);
    }
    out
}

/// Exact polynomial form of `A_ij` in the `N` half-space coordinates.
pub fn metric_jet_a_poly(jet: &MetricJet) -> Vec<Vec<Poly>> {
    let n = jet.n;
    let big = n + 1;
    let nn = n;
    let half = rat(1, 2);
    let mono = |idx: &[usize], c: BigRational| Poly::from_indices(big, idx, c);
    let mut out = vec![vec![Poly::zero(big); n]; n];
    for i in 0..n {
        for j in 0..n {
            let p = &mut out[i][j];
            let ii = |a: usize, b: usize| jet.sff.get(&[a, b]).clone();
            let rn = |a: usize, b: usize| jet.normal_curv.get(&[a, b]).clone();
            p.add_assign(&mono(&[nn], ii(i, j) * rat_int(-2)));
            let mut iisq = BigRational::zero();
            let mut sym_ir = BigRational::zero();
            for s in 0..n {
                iisq += ii(i, s) * ii(s, j);
                sym_ir += &half * (ii(i, s) * rn(j, s) + ii(j, s) * rn(i, s));
            }
            p.add_assign(&mono(&[nn, nn], -rn(i, j) + iisq));
            p.add_assign(&mono(
                &[nn, nn, nn],
                (jet.normal_curv_dn.get(&[i, j]) * rat_int(-2) + sym_ir * rat_int(8)) / rat_int(6),
            ));
            for k in 0..n {
                p.add_assign(&mono(&[k, nn], jet.sff_d1.get(&[i, j, k]) * rat_int(-2)));
                let mut sym_d = BigRational::zero();
                for s in 0..n {
                    sym_d += &half
                        * (jet.sff_d1.get(&[i, s, k]) * ii(s, j) + jet.sff_d1.get(&[j, s, k]) * ii(s, i));
                }
                p.add_assign(&mono(
                    &[k, nn, nn],
                    -jet.normal_curv_d.get(&[i, j, k]).clone() + sym_d * rat_int(2),
                ));
                for l in 0..n {
                    p.add_assign(&mono(&[k, l], jet.riem.get(&[i, k, j, l]) * rat(-1, 3)));
                    let mut sym_r = BigRational::zero();
                    for s in 0..n {
                        sym_r += &half
                            * (jet.riem.get(&[i, k, s, l]) * ii(s, j) + jet.riem.get(&[j, k, s, l]) * ii(s, i));
                    }
                    p.add_assign(&mono(
                        &[k, l, nn],
                        -jet.sff_d2.get(&[i, j, k, l]).clone() + sym_r * rat(2, 3),
                    ));
                    for m in 0..n {
                        p.add_assign(&mono(&[k, l, m], jet.riem_d.get(&[i, k, j, l, m]) * rat(-1, 6)));
                    }
                }
            }
        }
    }
    out
}

/// One homogeneous degree of the metric-jet flux
/// `∫ (ρ^{3-2N} x_i ∂_j A_ij − 2N ρ^{1-2N} x_i x_j A_ij) dS` over the upper
/// half of `|x| = ρ`, which scales as `ρ^{degree+2-N}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxDegree {
    pub degree: u32,
    pub rho_power: i32,
    /// Coefficient of `ρ^{rho_power} |S^{N-2}|`.
    pub coeff: ExactScalar,
}

/// Exact metric-jet flux split by polynomial degree.
pub fn jet_flux_exact(jet: &MetricJet) -> Result<Vec<FluxDegree>> {
    let n = jet.n;
    let big = n + 1;
    let a = metric_jet_a_poly(jet);
    let mut div_part = Poly::zero(big);
    let mut quad_part = Poly::zero(big);
    for i in 0..n {
        for j in 0..n {
            div_part.add_assign(&a[i][j].derivative(j).times_var(i));
            quad_part.add_assign(&a[i][j].times_var(i).times_var(j));
        }
    }
    let mut out = Vec::new();
    for d in 1..=3u32 {
        // x = ρ y: div part has degree d, quad part degree d + 2.
        let f = div_part.homogeneous(d);
        let g = quad_part.homogeneous(d + 2);
        let mut total = f.hemisphere_integral()?;
        total += &g.hemisphere_integral()?.scale(&rat_int(-2 * big as i64));
        out.push(FluxDegree {
            degree: d,
            rho_power: d as i32 + 2 - big as i32,
            coeff: total,
        });
    }
    Ok(out)
}

/// `2(N−3) / ((N−1)(N+1)(N+3))`: jet flux per unit `ρ^{5-N} |S^{N-2}| Σ II_ij,ij`
/// for jets carrying only `II_ij,kl`.
pub fn sff_second_flux_factor(dim: usize) -> BigRational {
    let big = dim as i64;
    rat(2 * (big - 3), (big - 1) * (big + 1) * (big + 3))
}

/// Floating value of the jet flux at radius `rho` (symbolic unit multiplied out).
pub fn jet_flux_value(parts: &[FluxDegree], rho: f64, dim: usize) -> f64 {
    let area = sphere_area((dim - 2) as u32).value;
    parts
        .iter()
        .map(|p| p.coeff.to_f64() * rho.powi(p.rho_power) * area)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat;

    #[test]
    fn moment_examples() {
        let m = moment(&[0, 0, 0], false, 3).unwrap();
        assert_eq!(m.exact().unwrap(), ExactScalar::pi_frac(4, 1));
        let m = moment(&[2, 0, 0, 0], false, 4).unwrap();
        assert_eq!((m.coeff.clone(), m.unit), (rat(1, 4), 3));
        assert!(moment(&[1, 2, 0, 0], true, 4).unwrap().coeff.is_zero());
        assert!(moment(&[2, 1, 0, 3], true, 4).unwrap().coeff.is_zero());
    }

    #[test]
    fn moment_unit_sphere_recursion() {
        for dim in 3..=6usize {
            for deg in 0..=4u32 {
                for alpha in all_alphas(dim, deg) {
                    for hemi in [false, true] {
                        let unit = (dim - 2) as u32;
                        let base = moment(&alpha, hemi, dim).unwrap().in_unit(unit).unwrap();
                        let mut sum = ExactScalar::zero();
                        for i in 0..dim {
                            let mut b = alpha.clone();
                            b[i] += 2;
                            sum += &moment(&b, hemi, dim).unwrap().in_unit(unit).unwrap();
                        }
                        assert_eq!(sum, base, "dim {dim} {alpha:?} hemi {hemi}");
                    }
                }
            }
        }
    }

    #[test]
    fn odd_hemisphere_moment_numeric() {
        // ∫_{S^2_+} z dS = π
        let m = moment(&[0, 0, 1], true, 3).unwrap();
        assert!((m.to_f64() - std::f64::consts::PI).abs() < 1e-14);
        // ∫_{S^3_+} x4 x1^2 dS = |S^2| * ∫ cos sin^4 dθ / 3 = 4π/15
        let m = moment(&[2, 0, 0, 1], true, 4).unwrap();
        assert!((m.to_f64() - 4.0 * std::f64::consts::PI / 15.0).abs() < 1e-14);
    }

    #[test]
    fn quartic_contraction_examples() {
        let pi = TraceFreePi::diag(&[1, 1, -1, -1]).unwrap();
        assert_eq!(quartic_contraction(&pi).unwrap(), rat(1, 3));
        let pi = TraceFreePi::diag(&[2, -1, -1, 0, 0]).unwrap();
        assert_eq!(quartic_contraction(&pi).unwrap(), rat(12, 35));
        assert!((quartic_contraction_brute(&pi) - 12.0 / 35.0).abs() < 1e-14);
        let pi = TraceFreePi::diag(&[0, 0, 0, 0]).unwrap();
        assert!(quartic_contraction(&pi).unwrap().is_zero());
    }

    #[test]
    fn pi_validation() {
        assert!(TraceFreePi::diag(&[1, 1, 1]).is_err());
        assert!(TraceFreePi::from_f64(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(TraceFreePi::from_f64(vec![vec![1.0, 0.5], vec![0.5, -1.0]]).is_ok());
    }

    #[test]
    fn jet_a_zero_cases() {
        let jet = MetricJet::conformal_from_source(4, {
            let mut k = 0i64;
            move || {
                k += 1;
                rat((k * 7) % 11 - 5, 3)
            }
        });
        jet.validate(true).unwrap();
        let a = metric_jet_a(&jet, &[0.0; 5]);
        assert!(a.iter().flatten().all(|v| *v == 0.0));
        let z = MetricJet::zero(4);
        let a = metric_jet_a(&z, &[0.3, -0.2, 0.1, 0.4, 0.5]);
        assert!(a.iter().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn jet_a_float_matches_poly() {
        let jet = MetricJet::conformal_from_source(3, {
            let mut k = 0i64;
            move || {
                k += 1;
                rat((k * 5) % 9 - 4, 2)
            }
        });
        let poly = metric_jet_a_poly(&jet);
        let x = [0.31, -0.47, 0.22, 0.6];
        let a = metric_jet_a(&jet, &x);
        for i in 0..3 {
            for j in 0..3 {
                assert!((a[i][j] - poly[i][j].eval(&x)).abs() < 1e-12);
                assert!((a[i][j] - a[j][i]).abs() < 1e-12);
            }
            assert_eq!(a[i][3], 0.0);
            assert_eq!(a[3][i], 0.0);
        }
    }

    #[test]
    fn sff_only_normal_line() {
        let mut jet = MetricJet::zero(2);
        jet.sff.set(&[0, 0], rat(1, 1));
        jet.sff.set(&[1, 1], rat(-1, 1));
        let t = 0.7;
        let a = metric_jet_a(&jet, &[0.0, 0.0, t]);
        assert!((a[0][0] - (-2.0 * t + t * t)).abs() < 1e-15);
        assert!((a[1][1] - (2.0 * t + t * t)).abs() < 1e-15);
    }

    #[test]
    fn flux_factor_for_second_derivative_jet() {
        for n in [3usize, 4, 5] {
            let big = n + 1;
            let mut t = JetTensor::zeros(&[n; 4]);
            let mut k = 0i64;
            for idx in t.indices() {
                if idx[0] <= idx[1] && idx[2] <= idx[3] {
                    k += 1;
                    let v = rat((k * 13) % 7 - 3, 1);
                    for a in [[idx[0], idx[1]], [idx[1], idx[0]]] {
                        for b in [[idx[2], idx[3]], [idx[3], idx[2]]] {
                            t.set(&[a[0], a[1], b[0], b[1]], v.clone());
                        }
                    }
                }
            }
            for kk in 0..n {
                for l in 0..n {
                    let tr: BigRational = (0..n).map(|i| t.get(&[i, i, kk, l]).clone()).sum();
                    for i in 0..n {
                        let v = t.get(&[i, i, kk, l]) - &tr / rat_int(n as i64);
                        t.set(&[i, i, kk, l], v);
                    }
                }
            }
            let jet = MetricJet::sff_second_derivative_only(t).unwrap();
            let parts = jet_flux_exact(&jet).unwrap();
            let cubic = &parts[2];
            assert_eq!(cubic.rho_power, 5 - big as i32);
            let expect = ExactScalar::rational(sff_second_flux_factor(big) * jet.sff_second_trace());
            assert_eq!(cubic.coeff, expect, "n = {n}");
            assert!(parts[0].coeff.is_zero() && parts[1].coeff.is_zero());
        }
        assert_eq!(sff_second_flux_factor(5), rat(1, 48));
    }

    fn all_alphas(n: usize, deg: u32) -> Vec<Vec<u32>> {
        if n == 0 {
            return if deg == 0 { vec![vec![]] } else { vec![] };
        }
        let mut out = Vec::new();
        for a in 0..=deg {
            for mut rest in all_alphas(n - 1, deg - a) {
                rest.insert(0, a);
                out.push(rest);
            }
        }
        out
    }
}
