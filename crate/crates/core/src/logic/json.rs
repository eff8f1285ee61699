//! Stable JSON forms of syntax trees: `{"kind": ..., "children": [...]}`.
//! Concepts additionally have a shared form listing each distinct node once.

use serde_json::{json, Value};

use super::{Concept, Formula};
use crate::rational::format_rational;

fn kind(c: &Concept) -> &'static str {
    match c {
        Concept::Const(_) => "const",
        Concept::Atom(_) => "atom",
        Concept::TruncSub(..) => "trunc_sub",
        Concept::Neg(_) => "neg",
        Concept::And(..) => "and",
        Concept::Or(..) => "or",
        Concept::Dia(..) => "dia",
    }
}

fn attributes(c: &Concept, node: &mut serde_json::Map<String, Value>) {
    match c {
        Concept::Const(q) | Concept::TruncSub(_, q) => {
            node.insert("value".into(), json!(format_rational(q)));
        }
        Concept::Atom(a) => {
            node.insert("name".into(), json!(a));
        }
        Concept::Dia(r, _) => {
            node.insert("role".into(), json!(r));
        }
        _ => {}
    }
}

impl Concept {
    /// Tree form. Shared subterms are repeated; see [`Concept::to_shared_json`].
    pub fn to_json(&self) -> Value {
        let mut node = serde_json::Map::new();
        node.insert("kind".into(), json!(kind(self)));
        attributes(self, &mut node);
        let children: Vec<Value> = self.children().map(|c| c.to_json()).collect();
        if !children.is_empty() {
            node.insert("children".into(), Value::Array(children));
        }
        Value::Object(node)
    }

    /// Shared form: `{"nodes": [...], "root": id}` where children refer to
    /// node ids, so each distinct subterm appears once.
    pub fn to_shared_json(&self) -> Value {
        let dag = self.dag();
        let nodes: Vec<Value> = dag
            .nodes
            .iter()
            .enumerate()
            .map(|(id, c)| {
                let mut node = serde_json::Map::new();
                node.insert("id".into(), json!(id));
                node.insert("kind".into(), json!(kind(c)));
                attributes(c, &mut node);
                let children: Vec<usize> = c.children().map(|ch| dag.index_of(ch)).collect();
                if !children.is_empty() {
                    node.insert("children".into(), json!(children));
                }
                Value::Object(node)
            })
            .collect();
        json!({ "nodes": nodes, "root": dag.nodes.len() - 1 })
    }
}

impl Formula {
    pub fn to_json(&self) -> Value {
        match self {
            Formula::Const(q) => json!({"kind": "const", "value": format_rational(q)}),
            Formula::Atom(a, x) => json!({"kind": "atom", "name": a, "var": x}),
            Formula::Eq(x, y) => json!({"kind": "eq", "vars": [x, y]}),
            Formula::TruncSub(f, q) => {
                json!({"kind": "trunc_sub", "value": format_rational(q), "children": [f.to_json()]})
            }
            Formula::Neg(f) => json!({"kind": "neg", "children": [f.to_json()]}),
            Formula::And(l, r) => json!({"kind": "and", "children": [l.to_json(), r.to_json()]}),
            Formula::Exists(v, f) => json!({"kind": "exists", "var": v, "children": [f.to_json()]}),
            Formula::DiaBind(x, y, f) => {
                json!({"kind": "dia_bind", "at": x, "bound": y, "children": [f.to_json()]})
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::logic::{parse_concept, parse_formula, Concept};
    use serde_json::json;

    #[test]
    fn concept_tree_json() {
        let c = parse_concept("<r> (A - 1/4)").unwrap();
        assert_eq!(
            c.to_json(),
            json!({"kind": "dia", "role": "r", "children": [
                {"kind": "trunc_sub", "value": "1/4", "children": [{"kind": "atom", "name": "A"}]}
            ]})
        );
    }

    #[test]
    fn shared_json_lists_each_node_once() {
        let a = Concept::atom("A");
        let c = Concept::and(a.clone(), Concept::neg(a));
        let v = c.to_shared_json();
        assert_eq!(v["nodes"].as_array().unwrap().len(), 3);
        assert_eq!(v["root"], json!(2));
    }

    #[test]
    fn formula_json() {
        let f = parse_formula("P x y. x = y").unwrap();
        assert_eq!(
            f.to_json(),
            json!({"kind": "dia_bind", "at": "x", "bound": "y", "children": [{"kind": "eq", "vars": ["x", "y"]}]})
        );
    }
}
