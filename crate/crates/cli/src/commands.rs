use std::fmt;

use gale_core::betti;
use gale_core::geometry::{build_gale, theta_coords, verify_faces, verify_gale, verify_unimodular};
use gale_core::lattice::{certify_small_on, fiber_poincare, is_generic, theta1, top_components, FaceLattice, StanleyEngine, ThetaParam};
use gale_core::poly::g_from_h;
use gale_core::ringstr::compare_to_g;
use gale_core::{Budget, Error, IntPoly, MultMatrix, SubMultigraph};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::{Method, What};

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    /// Independent methods or checks disagree.
    Disagreement(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::InvalidInput(_) | Error::NotIntegral(_)) => 2,
            CliError::Core(Error::BudgetExceeded { .. }) => 3,
            CliError::Core(Error::NonGeneric(_)) => 4,
            CliError::Disagreement(_) => 5,
            CliError::Core(Error::Internal(_)) | CliError::Internal(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Disagreement(d) => write!(f, "cross-check failed\n{d}"),
            CliError::Internal(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type Res<T> = Result<T, CliError>;

pub struct Instance {
    pub r: MultMatrix,
    pub theta: Vec<i64>,
    pub budget: Budget,
}

impl Instance {
    pub fn new(k: usize, r: Option<Vec<u32>>, theta: Option<Vec<i64>>, budget: u64) -> Res<Self> {
        if k == 0 || k > 16 {
            return Err(Error::InvalidInput(format!("k must be between 1 and 16, got {k}")).into());
        }
        let upper = r.unwrap_or_else(|| vec![1; k * (k - 1) / 2]);
        let r = MultMatrix::from_upper(k, &upper)?;
        let theta = theta.unwrap_or_else(|| theta1(k));
        Ok(Instance { r, theta, budget: Budget(budget) })
    }

    fn param(&self) -> Res<ThetaParam> {
        let p = is_generic(&self.r, &self.theta)?;
        if !p.is_generic() {
            return Err(Error::NonGeneric(self.theta.clone()).into());
        }
        Ok(p)
    }

    pub fn header(&self) -> Value {
        json!({ "k": self.r.k(), "r": self.r.upper() })
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn with_instance(inst: &Instance, value: Value) -> Value {
    let mut map = match value {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    map.insert("instance".into(), inst.header());
    Value::Object(map)
}

fn disagreement(label: &str, results: &[(&str, IntPoly)]) -> Option<String> {
    let first = &results.first()?.1;
    if results.iter().all(|(_, p)| p == first) {
        return None;
    }
    let lines: Vec<String> = results.iter().map(|(m, p)| format!("  {label} by {m}: {p}")).collect();
    Some(lines.join("\n"))
}

pub fn compute(inst: &Instance, what: What, method: Method, verify: bool) -> Res<Value> {
    let r = &inst.r;
    let engine = StanleyEngine::new(inst.budget);
    let run_g = |m: Method| -> Res<IntPoly> {
        Ok(match m {
            Method::Graph => betti::g_poly(r, inst.budget)?,
            Method::Recursion => betti::g_poly_recursive(r),
            Method::Stanley => engine.g_instance(r)?,
            Method::All => unreachable!("expanded by the caller"),
        })
    };
    let run_h = |m: Method| -> Res<IntPoly> {
        Ok(match m {
            Method::Graph => betti::h_poly(r, inst.budget)?,
            Method::Recursion => betti::h_poly_recursive(r),
            Method::Stanley => engine.h_instance(r)?,
            Method::All => unreachable!("expanded by the caller"),
        })
    };
    let want_g = what != What::H;
    let want_h = what != What::G;
    let mut out = Map::new();
    if method != Method::All {
        if want_g {
            out.insert("g".into(), to_value(&run_g(method)?));
        }
        if want_h {
            out.insert("h".into(), to_value(&run_h(method)?));
        }
    } else {
        let names = [("graph", Method::Graph), ("recursion", Method::Recursion), ("stanley", Method::Stanley)];
        let mut methods = Map::new();
        let mut gs = Vec::new();
        let mut hs = Vec::new();
        for (name, m) in names {
            let mut entry = Map::new();
            if want_g {
                let g = run_g(m)?;
                entry.insert("g".into(), to_value(&g));
                gs.push((name, g));
            }
            if want_h {
                let h = run_h(m)?;
                entry.insert("h".into(), to_value(&h));
                hs.push((name, h));
            }
            methods.insert(name.into(), Value::Object(entry));
        }
        if want_g && want_h && r.k() >= 2 {
            let g = g_from_h(&hs[0].1, r.dim())?;
            methods.insert("g_from_h".into(), json!({ "g": to_value(&g) }));
            gs.push(("g_from_h", g));
        }
        let diffs: Vec<String> =
            [disagreement("g", &gs), disagreement("h", &hs)].into_iter().flatten().collect();
        if !diffs.is_empty() {
            return Err(CliError::Disagreement(diffs.join("\n")));
        }
        if let Some((_, g)) = gs.first() {
            out.insert("g".into(), to_value(g));
        }
        if let Some((_, h)) = hs.first() {
            out.insert("h".into(), to_value(h));
        }
        out.insert("methods".into(), Value::Object(methods));
        out.insert("agree".into(), Value::Bool(true));
    }
    if verify {
        out.insert("verification".into(), verification(inst, None, None)?);
    }
    Ok(with_instance(inst, Value::Object(out)))
}

fn f_vector_json(lat: &FaceLattice) -> Res<Value> {
    let counts = lat
        .f_vector()
        .iter()
        .map(|c| u64::try_from(c).map_err(|_| CliError::Internal("f-vector entry exceeds 64 bits".into())))
        .collect::<Res<Vec<u64>>>()?;
    Ok(to_value(&counts))
}

pub fn faces(inst: &Instance, verify: bool) -> Res<Value> {
    let lat = FaceLattice::enumerate(&inst.r, inst.budget)?;
    let faces = lat.faces();
    let order: Vec<[String; 2]> = lat.covers().into_iter().map(|(a, b)| [faces[a].id(), faces[b].id()]).collect();
    let mut out = Map::new();
    out.insert("faces".into(), to_value(&faces));
    out.insert("order".into(), to_value(&order));
    out.insert("f_vector".into(), f_vector_json(&lat)?);
    if verify {
        out.insert("verification".into(), verification(inst, Some(&lat), None)?);
    }
    Ok(with_instance(inst, Value::Object(out)))
}

pub fn fiber(inst: &Instance, face: Option<&str>, verify: bool) -> Res<Value> {
    let param = inst.param()?;
    let k = inst.r.k();
    let core = match face {
        Some(id) => SubMultigraph::from_key(k, id)?,
        None => SubMultigraph::empty(k),
    };
    let report = fiber_poincare(&inst.r, &core, &param, inst.budget)?;
    let mut out = Map::new();
    out.insert("theta".into(), to_value(&param));
    out.insert("report".into(), to_value(&report));
    if verify {
        out.insert("verification".into(), verification(inst, None, Some(&param))?);
    }
    Ok(with_instance(inst, Value::Object(out)))
}

pub fn certify(inst: &Instance, verify: bool) -> Res<Value> {
    let param = inst.param()?;
    let lat = FaceLattice::enumerate(&inst.r, inst.budget)?;
    let cert = certify_small_on(&lat, &param, inst.budget)?;
    let mut out = to_value(&cert);
    if verify {
        let v = verification(inst, Some(&lat), Some(&param))?;
        out.as_object_mut().expect("object").insert("verification".into(), v);
    }
    Ok(with_instance(inst, out))
}

pub fn components(inst: &Instance, verify: bool) -> Res<Value> {
    let param = inst.param()?;
    let top = top_components(&inst.r, &param, inst.budget)?;
    let mut out = to_value(&top);
    if verify {
        let v = verification(inst, None, Some(&param))?;
        out.as_object_mut().expect("object").insert("verification".into(), v);
    }
    Ok(with_instance(inst, out))
}

pub fn ring(inst: &Instance, verify: bool) -> Res<Value> {
    let rep = compare_to_g(&inst.r, inst.budget)?;
    if !rep.matches_g {
        let lines: Vec<String> = rep.diff().iter().map(|(d, x)| format!("  degree {d}: hilbert - g = {x}")).collect();
        return Err(CliError::Disagreement(format!(
            "hilbert {} vs g {}\n{}",
            rep.hilbert,
            rep.g,
            lines.join("\n")
        )));
    }
    let mut out = to_value(&rep);
    if verify {
        let v = verification(inst, None, None)?;
        out.as_object_mut().expect("object").insert("verification".into(), v);
    }
    Ok(with_instance(inst, out))
}

/// Independent checks through the explicit Gale dual. Any failed check is a
/// cross-check failure.
fn verification(inst: &Instance, lat: Option<&FaceLattice>, theta: Option<&ThetaParam>) -> Res<Value> {
    if inst.r.k() < 2 {
        return Ok(json!({ "skipped": "a single vertex has no roots" }));
    }
    let gd = build_gale(&inst.r)?;
    let mut out = Map::new();
    let gale = verify_gale(&gd, 100, 0);
    let unimodular = verify_unimodular(&gd);
    out.insert("gale".into(), Value::Bool(gale));
    out.insert("unimodular".into(), Value::Bool(unimodular));
    let mut failures = Vec::new();
    if !gale {
        failures.push("Gale dual check failed".to_string());
    }
    if !unimodular {
        failures.push("configuration is not unimodular".to_string());
    }
    if let Some(lat) = lat {
        let rep = verify_faces(&gd, lat, 100, 0)?;
        failures.extend(rep.failures.iter().cloned());
        out.insert("faces".into(), to_value(&rep));
    }
    if let Some(param) = theta {
        let mut positive = true;
        for tree in param.trees() {
            let edges: Vec<(usize, usize)> = tree.edges().collect();
            let coords = theta_coords(&gd, &edges, param.theta())?;
            positive &= coords.iter().all(|&c| c > 0);
        }
        if !positive {
            failures.push("a tree of the parameter has a nonpositive coordinate".into());
        }
        out.insert("theta_trees_positive".into(), Value::Bool(positive));
    }
    if !failures.is_empty() {
        return Err(CliError::Disagreement(failures.join("\n")));
    }
    Ok(Value::Object(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disagreements_exit_with_five() {
        let diff = disagreement("g", &[("graph", IntPoly::from_i64s(&[1, 2])), ("recursion", IntPoly::from_i64s(&[1, 3]))]);
        let err = CliError::Disagreement(diff.expect("results differ"));
        assert_eq!(err.exit_code(), 5);
        assert!(err.to_string().contains("g by recursion: 1 + 3t"));
        assert!(disagreement("h", &[("graph", IntPoly::one()), ("stanley", IntPoly::one())]).is_none());
    }

    #[test]
    fn error_exit_codes() {
        assert_eq!(CliError::from(Error::InvalidInput(String::new())).exit_code(), 2);
        assert_eq!(CliError::from(Error::BudgetExceeded { budget: 1 }).exit_code(), 3);
        assert_eq!(CliError::from(Error::NonGeneric(vec![0])).exit_code(), 4);
    }
}
