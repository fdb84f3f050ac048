//! User-defined problems from a flat `key = value` file.
//!
//! Only a fixed catalog of parameterized families is accepted; there is no
//! expression parser. Equation indices start at 1.
//!
//! ```text
//! name        = my-problem
//! final_time  = 1
//! alpha       = power 0.816496580927726 -1 0.5443310539518174 0.333333333333333
//! beta        = poly 1 0.5
//! expansion   = enforce            # or `warn`
//! diffusion.1 = rational 2 0 -1    # c0 + sum_j c_j / (1 + s_j^2)
//! diffusion.2 = gaussian 0 1 1 0   # c0 + c1 exp(-sum_j w_j s_j^2)
//! bounds.2    = 1e-12 1
//! forcing.1   = 0.1 pow 1 inv 4    # repeatable: sum of coef * X(x) * S(t)
//! initial.1   = spline 0 0 0.2 1 0.5 0.5 1 0
//! initial.2   = poly 0 1 -1
//! ```
//!
//! Boundary families: `poly c0 c1 ...` (sum c_m t^m), `rational p0 p1 ... / q0 q1 ...`
//! and `power c0 c1 shift e` (c0 + c1 (t + shift)^e).
//! Diffusion families: `constant c`, `rational c0 c1 .. c_ne`, `gaussian c0 c1 w1 .. w_ne`.
//! Space factors: `one`, `pow p`, `gauss c` (exp(-c x^2)), `sin w`, `cos w`.
//! Time factors: `one`, `inv p` ((1+t)^-p), `exp c` (exp(-c t)), `pow p` (t^p).
//! Initial profiles: `poly c0 c1 ...` in x, or `spline x0 y0 x1 y1 ...` (natural cubic).

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryMotion, ExpansionPolicy};
use crate::problems::spec::{DiffusionLaw, Equation, ProblemSpec};
use crate::scalar::Real;
use crate::spline::NaturalCubicSpline;

type Entries = Vec<(usize, String, String)>;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Splits `key = value` lines, dropping blanks and `#` comments.
pub(crate) fn entries(text: &str) -> Result<Entries> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| parse_err(n + 1, format!("expected `key = value`, got `{line}`")))?;
        out.push((n + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn numbers(line: usize, words: &[&str]) -> Result<Vec<f64>> {
    words
        .iter()
        .map(|w| {
            w.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(line, format!("not a finite number: `{w}`")))
        })
        .collect()
}

struct Curve<T> {
    value: Arc<dyn Fn(T) -> T + Send + Sync>,
    derivative: Arc<dyn Fn(T) -> T + Send + Sync>,
}

fn poly_eval<T: Real>(c: &[T], t: T) -> T {
    c.iter().rev().fold(T::zero(), |acc, &v| acc * t + v)
}

fn poly_deriv<T: Real>(c: &[T]) -> Vec<T> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(m, &v)| v * T::from_count(m))
        .collect()
}

fn curve<T: Real>(line: usize, spec: &str) -> Result<Curve<T>> {
    let words: Vec<&str> = spec.split_whitespace().collect();
    let (family, rest) = words
        .split_first()
        .ok_or_else(|| parse_err(line, "empty boundary description"))?;
    match *family {
        "poly" => {
            let c: Vec<T> = numbers(line, rest)?.into_iter().map(T::lit).collect();
            if c.is_empty() {
                return Err(parse_err(line, "poly needs at least one coefficient"));
            }
            let d = poly_deriv(&c);
            Ok(Curve {
                value: Arc::new(move |t| poly_eval(&c, t)),
                derivative: Arc::new(move |t| poly_eval(&d, t)),
            })
        }
        "rational" => {
            let split = rest
                .iter()
                .position(|w| *w == "/")
                .ok_or_else(|| parse_err(line, "rational needs `p0 p1 ... / q0 q1 ...`"))?;
            let p: Vec<T> = numbers(line, &rest[..split])?
                .into_iter()
                .map(T::lit)
                .collect();
            let q: Vec<T> = numbers(line, &rest[split + 1..])?
                .into_iter()
                .map(T::lit)
                .collect();
            if p.is_empty() || q.is_empty() {
                return Err(parse_err(
                    line,
                    "rational needs coefficients on both sides of `/`",
                ));
            }
            let (dp, dq) = (poly_deriv(&p), poly_deriv(&q));
            let (p2, q2) = (p.clone(), q.clone());
            Ok(Curve {
                value: Arc::new(move |t| poly_eval(&p, t) / poly_eval(&q, t)),
                derivative: Arc::new(move |t| {
                    let den = poly_eval(&q2, t);
                    (poly_eval(&dp, t) * den - poly_eval(&p2, t) * poly_eval(&dq, t)) / (den * den)
                }),
            })
        }
        "power" => {
            let v = numbers(line, rest)?;
            if v.len() != 4 {
                return Err(parse_err(line, "power needs `c0 c1 shift exponent`"));
            }
            if !(v[2] > 0.0) {
                return Err(parse_err(line, "power shift must be positive"));
            }
            let [c0, c1, s, e] = [v[0], v[1], v[2], v[3]].map(T::lit);
            Ok(Curve {
                value: Arc::new(move |t| c0 + c1 * (t + s).powf(e)),
                derivative: Arc::new(move |t| c1 * e * (t + s).powf(e - T::one())),
            })
        }
        other => Err(parse_err(
            line,
            format!("unknown boundary family `{other}`"),
        )),
    }
}

fn diffusion<T: Real>(line: usize, spec: &str, ne: usize) -> Result<DiffusionLaw<T>> {
    let words: Vec<&str> = spec.split_whitespace().collect();
    let (family, rest) = words
        .split_first()
        .ok_or_else(|| parse_err(line, "empty diffusion description"))?;
    let v: Vec<T> = numbers(line, rest)?.into_iter().map(T::lit).collect();
    match *family {
        "constant" if v.len() == 1 => Ok(DiffusionLaw::constant(v[0])),
        "rational" if v.len() == ne + 1 => Ok(DiffusionLaw::new(move |s: &[T]| {
            s.iter()
                .zip(&v[1..])
                .fold(v[0], |acc, (&sj, &cj)| acc + cj / (T::one() + sj * sj))
        })),
        "gaussian" if v.len() == ne + 2 => Ok(DiffusionLaw::new(move |s: &[T]| {
            let q = s
                .iter()
                .zip(&v[2..])
                .fold(T::zero(), |acc, (&sj, &wj)| acc + wj * sj * sj);
            v[0] + v[1] * (-q).exp()
        })),
        "constant" | "rational" | "gaussian" => Err(parse_err(
            line,
            format!("wrong coefficient count for `{family}` with ne = {ne}"),
        )),
        other => Err(parse_err(
            line,
            format!("unknown diffusion family `{other}`"),
        )),
    }
}

type Factor<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

fn space_factor<T: Real>(line: usize, kind: &str, arg: Option<&str>) -> Result<(Factor<T>, usize)> {
    let num = |a: Option<&str>| -> Result<T> {
        let a = a.ok_or_else(|| parse_err(line, format!("`{kind}` needs an argument")))?;
        Ok(T::lit(numbers(line, &[a])?[0]))
    };
    Ok(match kind {
        "one" => (Arc::new(|_| T::one()), 1),
        "pow" => {
            let p = num(arg)?;
            (Arc::new(move |x: T| x.powf(p)), 2)
        }
        "gauss" => {
            let c = num(arg)?;
            (Arc::new(move |x: T| (-c * x * x).exp()), 2)
        }
        "sin" => {
            let w = num(arg)?;
            (Arc::new(move |x: T| (w * x).sin()), 2)
        }
        "cos" => {
            let w = num(arg)?;
            (Arc::new(move |x: T| (w * x).cos()), 2)
        }
        other => return Err(parse_err(line, format!("unknown space factor `{other}`"))),
    })
}

fn time_factor<T: Real>(line: usize, kind: &str, arg: Option<&str>) -> Result<(Factor<T>, usize)> {
    let num = |a: Option<&str>| -> Result<T> {
        let a = a.ok_or_else(|| parse_err(line, format!("`{kind}` needs an argument")))?;
        Ok(T::lit(numbers(line, &[a])?[0]))
    };
    Ok(match kind {
        "one" => (Arc::new(|_| T::one()), 1),
        "inv" => {
            let p = num(arg)?;
            (Arc::new(move |t: T| (T::one() + t).powf(-p)), 2)
        }
        "exp" => {
            let c = num(arg)?;
            (Arc::new(move |t: T| (-c * t).exp()), 2)
        }
        "pow" => {
            let p = num(arg)?;
            (Arc::new(move |t: T| t.powf(p)), 2)
        }
        other => return Err(parse_err(line, format!("unknown time factor `{other}`"))),
    })
}

/// `coef X-kind [arg] T-kind [arg]`.
fn forcing_term<T: Real>(line: usize, spec: &str) -> Result<Arc<dyn Fn(T, T) -> T + Send + Sync>> {
    let words: Vec<&str> = spec.split_whitespace().collect();
    if words.len() < 3 {
        return Err(parse_err(
            line,
            "forcing term needs `coef space-factor time-factor`",
        ));
    }
    let coef = T::lit(numbers(line, &words[..1])?[0]);
    let (x, used) = space_factor::<T>(line, words[1], words.get(2).copied())?;
    let at = 1 + used;
    let kind = words
        .get(at)
        .ok_or_else(|| parse_err(line, "missing time factor"))?;
    let (t, used_t) = time_factor::<T>(line, kind, words.get(at + 1).copied())?;
    if at + used_t != words.len() {
        return Err(parse_err(line, "trailing words in forcing term"));
    }
    Ok(Arc::new(move |xv, tv| coef * x(xv) * t(tv)))
}

fn initial<T: Real>(line: usize, spec: &str) -> Result<Arc<dyn Fn(T) -> T + Send + Sync>> {
    let words: Vec<&str> = spec.split_whitespace().collect();
    let (family, rest) = words
        .split_first()
        .ok_or_else(|| parse_err(line, "empty initial profile"))?;
    let v = numbers(line, rest)?;
    match *family {
        "poly" if !v.is_empty() => {
            let c: Vec<T> = v.into_iter().map(T::lit).collect();
            Ok(Arc::new(move |x| poly_eval(&c, x)))
        }
        "spline" if v.len() % 2 == 0 && !v.is_empty() => {
            let knots: Vec<(T, T)> = v.chunks(2).map(|p| (T::lit(p[0]), T::lit(p[1]))).collect();
            let s = NaturalCubicSpline::new(&knots).map_err(|e| parse_err(line, e.to_string()))?;
            Ok(Arc::new(move |x| s.eval(x)))
        }
        "poly" | "spline" => Err(parse_err(line, format!("bad argument list for `{family}`"))),
        other => Err(parse_err(
            line,
            format!("unknown initial profile `{other}`"),
        )),
    }
}

fn indexed(key: &str) -> Option<(&str, usize)> {
    let (base, idx) = key.split_once('.')?;
    idx.parse::<usize>()
        .ok()
        .filter(|&i| i >= 1)
        .map(|i| (base, i))
}

/// Parses a user problem file.
pub fn parse_problem<T: Real>(text: &str) -> Result<ProblemSpec<T>> {
    let entries = entries(text)?;
    let mut scalars: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    let mut per_eq: BTreeMap<(String, usize), Vec<(usize, &str)>> = BTreeMap::new();
    let mut ne = 0;
    for (line, key, value) in &entries {
        if let Some((base, i)) = indexed(key) {
            if !matches!(base, "diffusion" | "bounds" | "forcing" | "initial") {
                return Err(parse_err(*line, format!("unknown key `{key}`")));
            }
            ne = ne.max(i);
            per_eq
                .entry((base.to_string(), i))
                .or_default()
                .push((*line, value));
        } else {
            if !matches!(
                key.as_str(),
                "name" | "final_time" | "alpha" | "beta" | "expansion"
            ) {
                return Err(parse_err(*line, format!("unknown key `{key}`")));
            }
            if scalars.insert(key, (*line, value)).is_some() {
                return Err(parse_err(*line, format!("duplicate key `{key}`")));
            }
        }
    }
    let last_line = entries.last().map_or(1, |e| e.0);
    let required = |k: &str| {
        scalars
            .get(k)
            .copied()
            .ok_or_else(|| parse_err(last_line, format!("missing key `{k}`")))
    };
    let (tl, tv) = required("final_time")?;
    let final_time = numbers(tl, &[tv])?[0];
    let (al, av) = required("alpha")?;
    let (bl, bv) = required("beta")?;
    let alpha = curve::<T>(al, av)?;
    let beta = curve::<T>(bl, bv)?;
    let mut motion = BoundaryMotion::new(
        move |t| (alpha.value)(t),
        move |t| (beta.value)(t),
        move |t| (alpha.derivative)(t),
        move |t| (beta.derivative)(t),
        T::lit(final_time),
    )
    .map_err(|e| parse_err(tl, e.to_string()))?;
    if let Some((line, v)) = scalars.get("expansion") {
        motion = motion.with_policy(match *v {
            "enforce" => ExpansionPolicy::Enforce,
            "warn" => ExpansionPolicy::Warn,
            other => {
                return Err(parse_err(
                    *line,
                    format!("expansion must be enforce|warn, got `{other}`"),
                ))
            }
        });
    }
    if ne == 0 {
        return Err(parse_err(last_line, "no equations declared"));
    }

    let single = |base: &str, i: usize| -> Result<Option<(usize, &str)>> {
        match per_eq.get(&(base.to_string(), i)).map(|v| v.as_slice()) {
            None => Ok(None),
            Some([one]) => Ok(Some(*one)),
            Some(many) => Err(parse_err(many[1].0, format!("duplicate key `{base}.{i}`"))),
        }
    };
    let mut equations = Vec::with_capacity(ne);
    for i in 1..=ne {
        let (dl, dv) = single("diffusion", i)?
            .ok_or_else(|| parse_err(last_line, format!("missing key `diffusion.{i}`")))?;
        let mut law = diffusion::<T>(dl, dv, ne)?;
        if let Some((line, v)) = single("bounds", i)? {
            let b = numbers(line, &v.split_whitespace().collect::<Vec<_>>())?;
            if b.len() != 2 || !(b[0] > 0.0 && b[1] >= b[0]) {
                return Err(parse_err(
                    line,
                    "bounds need `lower upper` with 0 < lower <= upper",
                ));
            }
            law = law.with_bounds(T::lit(b[0]), T::lit(b[1]));
        }
        let (il, iv) = single("initial", i)?
            .ok_or_else(|| parse_err(last_line, format!("missing key `initial.{i}`")))?;
        let init = initial::<T>(il, iv)?;
        let terms = per_eq
            .get(&("forcing".to_string(), i))
            .map(|v| {
                v.iter()
                    .map(|&(l, s)| forcing_term::<T>(l, s))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?
            .unwrap_or_default();
        equations.push(Equation::new(
            law,
            move |x, t| terms.iter().fold(T::zero(), |acc, f| acc + f(x, t)),
            move |x| init(x),
        ));
    }
    let name = scalars.get("name").map_or("user", |v| v.1);
    ProblemSpec::new(name, motion, equations)
}
