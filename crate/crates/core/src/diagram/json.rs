use std::collections::HashMap;
use std::sync::Arc;

use serde_json::{json, Value};

use super::{Component, Dart, Diagram, Signature, SkeletonKind};
use crate::error::{Error, Result};

impl Diagram {
    pub fn to_json(&self) -> Value {
        let skeleton: Vec<Value> = self
            .sig
            .comps()
            .iter()
            .zip(&self.attach)
            .map(|(c, legs)| json!({"kind": c.kind.name(), "label": c.label, "legs": legs}))
            .collect();
        let vertices: Vec<Value> =
            self.vertices.iter().enumerate().map(|(i, r)| json!({"id": i, "rot": r})).collect();
        let mut used: Vec<Dart> = self.attach.iter().flatten().copied().collect();
        used.extend(self.vertices.iter().flatten());
        used.sort_unstable();
        let edges: Vec<Value> = used
            .iter()
            .filter(|&&d| d < self.partner(d))
            .map(|&d| json!([d, self.partner(d)]))
            .collect();
        let mut v = json!({
            "degree": self.degree(),
            "skeleton": skeleton,
            "vertices": vertices,
            "edges": edges,
        });
        if self.loops > 0 {
            v["loops"] = json!(self.loops);
        }
        v
    }

    pub fn to_json_string(&self) -> String {
        self.to_json().to_string()
    }

    pub fn from_json(v: &Value) -> Result<Diagram> {
        let perr = |m: &str| Error::Parse(m.to_string());
        let obj = v.as_object().ok_or_else(|| perr("diagram must be an object"))?;
        // dart ids are renumbered by rank, so compact input keeps its numbering
        let mut all_ids: Vec<u64> = Vec::new();
        collect_ids(v, &mut all_ids);
        all_ids.sort_unstable();
        all_ids.dedup();
        let ids: HashMap<u64, Dart> = all_ids.iter().enumerate().map(|(i, &id)| (id, i as Dart)).collect();
        let intern = |raw: &Value| -> Result<Dart> {
            let id = raw.as_u64().ok_or_else(|| perr("dart ids must be non-negative integers"))?;
            Ok(ids[&id])
        };

        let skel = obj.get("skeleton").and_then(Value::as_array).ok_or_else(|| perr("missing skeleton"))?;
        let mut comps = Vec::new();
        let mut raw_legs = Vec::new();
        for c in skel {
            let kind = SkeletonKind::parse(c.get("kind").and_then(Value::as_str).ok_or_else(|| perr("missing kind"))?)?;
            let label = c.get("label").and_then(Value::as_str).ok_or_else(|| perr("missing label"))?;
            let legs = c.get("legs").and_then(Value::as_array).ok_or_else(|| perr("missing legs"))?;
            let mut ls = Vec::new();
            for l in legs {
                ls.push(intern(l)?);
            }
            comps.push(Component::new(kind, label));
            raw_legs.push((label.to_string(), ls));
        }
        let sig = Arc::new(Signature::new(comps)?);
        let mut attach = vec![Vec::new(); sig.len()];
        for (label, ls) in raw_legs {
            attach[sig.require(&label)?] = ls;
        }

        let mut vertices = Vec::new();
        let verts = obj.get("vertices").and_then(Value::as_array).ok_or_else(|| perr("missing vertices"))?;
        let mut keyed = Vec::new();
        for v in verts {
            let id = v.get("id").and_then(Value::as_u64).ok_or_else(|| perr("vertex id"))?;
            let rot = v.get("rot").and_then(Value::as_array).ok_or_else(|| perr("vertex rot"))?;
            if rot.len() != 3 {
                return Err(Error::Structure(format!("vertex {id} does not have 3 darts")));
            }
            keyed.push((id, [intern(&rot[0])?, intern(&rot[1])?, intern(&rot[2])?]));
        }
        keyed.sort_by_key(|k| k.0);
        if keyed.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Structure("repeated vertex id".into()));
        }
        vertices.extend(keyed.into_iter().map(|k| k.1));

        let edges = obj.get("edges").and_then(Value::as_array).ok_or_else(|| perr("missing edges"))?;
        let mut pairs = Vec::new();
        for e in edges {
            let e = e.as_array().filter(|e| e.len() == 2).ok_or_else(|| perr("edge must be a pair"))?;
            pairs.push((intern(&e[0])?, intern(&e[1])?));
        }
        let n = ids.len();
        let mut partner = vec![Dart::MAX; n];
        for (a, b) in pairs {
            if partner[a as usize] != Dart::MAX || partner[b as usize] != Dart::MAX {
                return Err(Error::Structure("dart in two edges".into()));
            }
            partner[a as usize] = b;
            partner[b as usize] = a;
        }
        if partner.contains(&Dart::MAX) {
            return Err(Error::Structure("dart without an edge".into()));
        }
        let loops = match obj.get("loops") {
            None => 0,
            Some(l) => l.as_u64().ok_or_else(|| perr("loops must be an integer"))? as u32,
        };
        let d = Diagram { sig, attach, vertices, partner, loops };
        d.validate()?;
        if let Some(deg) = obj.get("degree") {
            if deg.as_u64() != Some(d.degree() as u64) {
                return Err(Error::Structure(format!("stated degree {deg} does not match {}", d.degree())));
            }
        }
        Ok(d)
    }
}

fn collect_ids(v: &Value, out: &mut Vec<u64>) {
    let mut push = |x: &Value| {
        if let Some(n) = x.as_u64() {
            out.push(n);
        }
    };
    for c in v.get("skeleton").and_then(Value::as_array).into_iter().flatten() {
        c.get("legs").and_then(Value::as_array).into_iter().flatten().for_each(&mut push);
    }
    for c in v.get("vertices").and_then(Value::as_array).into_iter().flatten() {
        c.get("rot").and_then(Value::as_array).into_iter().flatten().for_each(&mut push);
    }
    for e in v.get("edges").and_then(Value::as_array).into_iter().flatten() {
        e.as_array().into_iter().flatten().for_each(&mut push);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{theta, wheel};

    #[test]
    fn round_trip() {
        for d in [wheel("x", 4), theta()] {
            let j = d.to_json();
            let back = Diagram::from_json(&j).unwrap();
            assert_eq!(back.to_json(), j);
        }
    }

    #[test]
    fn rejects_degree_mismatch() {
        let mut j = wheel("x", 2).to_json();
        j["degree"] = json!(3);
        assert!(Diagram::from_json(&j).is_err());
    }

    #[test]
    fn rejects_dangling_dart() {
        let j = json!({"degree": 1, "skeleton": [{"kind": "star", "label": "x", "legs": [0, 1]}],
                       "vertices": [], "edges": [[0, 2]]});
        assert!(Diagram::from_json(&j).is_err());
    }
}
