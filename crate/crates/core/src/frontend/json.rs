//! JSON model documents.
//!
//! ```text
//! { "kind": "mc" | "mrm" | "ntmc" | "wts" | "dfa" | "nfa" | "rm" | "wmm",
//!   "alphabet": [symbol, ...], "states": [state, ...], "initial": state,
//!   "label":  { state: symbol }                         (mc, mrm, ntmc)
//!   "reward": { state: natural }                        (mrm)
//!   "bound":  natural                                   (rm)
//!   "trans":  { state: { succ: "num/den" } }            (mc, mrm: succ may be "*"; ntmc)
//!             { state: [[succ, symbol, weight], ...] }  (wts)
//!   "delta":  { state: { symbol: [state, flag] } }      (dfa)
//!             { state: { symbol: [[state, flag], ...] } }          (nfa)
//!             { state: { symbol: [state, weight] } }               (rm)
//!             { state: { symbol: [[state, flag, weight], ...] } }  (wmm) }
//! ```
//!
//! Emission writes object keys in sorted order and state lists in model
//! order, so `emit ∘ parse` is a canonicalization.

use std::collections::{BTreeMap, HashMap};

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::domains::{format_rational, parse_rational, Rational};
use crate::models::{
    Alphabet, Dfa, LabeledMc, MarkovRewardModel, Model, ModelError, Nfa, NonTerminatingMc, RewardMachine, Succ,
    WeightedMealy, WeightedTs, WmmEdge, WtsEdge, TARGET,
};
use crate::products::{
    AbsorbingProductMc, ProdSucc, ProductMc, ProductRewardMc, ProductSpace, ProductWts, ACCEPT_SINK, REJECT_SINK,
};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unknown model kind `{0}`")]
    UnknownKind(String),
    #[error("missing field `{0}`")]
    Missing(&'static str),
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn field_err(field: &str, message: impl Into<String>) -> JsonError {
    JsonError::Field { field: field.to_string(), message: message.into() }
}

struct Header {
    alphabet: Alphabet,
    states: Vec<String>,
    index: HashMap<String, usize>,
    initial: usize,
}

impl Header {
    fn state(&self, name: &str) -> Result<usize, JsonError> {
        self.index.get(name).copied().ok_or_else(|| JsonError::UnknownState(name.to_string()))
    }

    fn succ(&self, name: &str) -> Result<Succ, JsonError> {
        if name == TARGET {
            Ok(Succ::Target)
        } else {
            self.state(name).map(Succ::State)
        }
    }

    fn symbol(&self, name: &str) -> Result<usize, JsonError> {
        self.alphabet.index_of(name).ok_or_else(|| JsonError::UnknownSymbol(name.to_string()))
    }
}

fn string_list(doc: &Map<String, Value>, field: &'static str) -> Result<Vec<String>, JsonError> {
    let arr = doc.get(field).ok_or(JsonError::Missing(field))?;
    let arr = arr.as_array().ok_or_else(|| field_err(field, "expected an array of strings"))?;
    arr.iter()
        .map(|v| v.as_str().map(str::to_string).ok_or_else(|| field_err(field, "expected an array of strings")))
        .collect()
}

fn object<'a>(v: &'a Value, field: &str) -> Result<&'a Map<String, Value>, JsonError> {
    v.as_object().ok_or_else(|| field_err(field, "expected an object"))
}

fn natural(v: &Value, field: &str) -> Result<u64, JsonError> {
    v.as_u64().ok_or_else(|| field_err(field, "expected a natural number"))
}

fn flag(v: &Value, field: &str) -> Result<bool, JsonError> {
    v.as_bool().ok_or_else(|| field_err(field, "expected a boolean flag"))
}

fn probability(v: &Value, field: &str) -> Result<Rational, JsonError> {
    let s = v.as_str().ok_or_else(|| field_err(field, "probabilities are \"num/den\" strings"))?;
    parse_rational(s).map_err(|e| field_err(field, e.to_string()))
}

fn tuple<'a>(v: &'a Value, len: usize, field: &str) -> Result<&'a [Value], JsonError> {
    match v.as_array() {
        Some(a) if a.len() == len => Ok(a),
        _ => Err(field_err(field, format!("expected a {len}-element array"))),
    }
}

fn header(doc: &Map<String, Value>) -> Result<Header, JsonError> {
    let alphabet = Alphabet::new(string_list(doc, "alphabet")?)?;
    let states = string_list(doc, "states")?;
    let mut index = HashMap::new();
    for (i, s) in states.iter().enumerate() {
        if index.insert(s.clone(), i).is_some() {
            return Err(field_err("states", format!("duplicate state `{s}`")));
        }
    }
    let initial = doc.get("initial").ok_or(JsonError::Missing("initial"))?;
    let initial = initial.as_str().ok_or_else(|| field_err("initial", "expected a state name"))?;
    let initial = *index.get(initial).ok_or_else(|| JsonError::UnknownState(initial.to_string()))?;
    Ok(Header { alphabet, states, index, initial })
}

/// Per-state table: missing states get `default`.
fn per_state<T: Clone>(
    h: &Header,
    doc: &Map<String, Value>,
    field: &'static str,
    default: Option<T>,
    mut parse: impl FnMut(&Value) -> Result<T, JsonError>,
) -> Result<Vec<T>, JsonError> {
    let table = object(doc.get(field).ok_or(JsonError::Missing(field))?, field)?;
    let mut out: Vec<Option<T>> = vec![default; h.states.len()];
    for (name, v) in table {
        out[h.state(name)?] = Some(parse(v)?);
    }
    out.into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| field_err(field, format!("no entry for state `{}`", h.states[i]))))
        .collect()
}

/// Per-(state, symbol) table: missing entries get `None`.
fn per_symbol<T>(
    h: &Header,
    v: &Value,
    field: &str,
    mut parse: impl FnMut(&Value) -> Result<T, JsonError>,
) -> Result<Vec<Option<T>>, JsonError> {
    let mut row: Vec<Option<T>> = (0..h.alphabet.len()).map(|_| None).collect();
    for (sym, e) in object(v, field)? {
        row[h.symbol(sym)?] = Some(parse(e)?);
    }
    Ok(row)
}

fn parse_dist(h: &Header, v: &Value) -> Result<Vec<(Succ, Rational)>, JsonError> {
    object(v, "trans")?.iter().map(|(succ, p)| Ok((h.succ(succ)?, probability(p, "trans")?))).collect()
}

fn parse_chain(h: &Header, doc: &Map<String, Value>) -> Result<LabeledMc, JsonError> {
    let label = per_state(h, doc, "label", None, |v| {
        h.symbol(v.as_str().ok_or_else(|| field_err("label", "expected a symbol"))?)
    })?;
    let trans = per_state(h, doc, "trans", Some(Vec::new()), |v| parse_dist(h, v))?;
    Ok(LabeledMc::new(h.alphabet.clone(), h.states.clone(), label, trans, h.initial))
}

pub fn parse_model(text: &str) -> Result<Model, JsonError> {
    let value: Value = serde_json::from_str(text)?;
    parse_model_value(&value)
}

pub fn parse_model_value(value: &Value) -> Result<Model, JsonError> {
    let doc = object(value, "document")?;
    let kind = doc.get("kind").ok_or(JsonError::Missing("kind"))?;
    let kind = kind.as_str().ok_or_else(|| field_err("kind", "expected a string"))?;
    if !matches!(kind, "mc" | "mrm" | "ntmc" | "wts" | "dfa" | "nfa" | "rm" | "wmm") {
        return Err(JsonError::UnknownKind(kind.to_string()));
    }
    let h = header(doc)?;
    let model = match kind {
        "mc" => Model::Mc(parse_chain(&h, doc)?),
        "mrm" => {
            let chain = parse_chain(&h, doc)?;
            let reward = per_state(&h, doc, "reward", None, |v| natural(v, "reward"))?;
            Model::Mrm(MarkovRewardModel::new(chain, reward))
        }
        "ntmc" => {
            let label = per_state(&h, doc, "label", None, |v| {
                h.symbol(v.as_str().ok_or_else(|| field_err("label", "expected a symbol"))?)
            })?;
            let trans = per_state(&h, doc, "trans", Some(Vec::new()), |v| {
                object(v, "trans")?.iter().map(|(s, p)| Ok((h.state(s)?, probability(p, "trans")?))).collect()
            })?;
            Model::Ntmc(NonTerminatingMc::new(h.alphabet.clone(), h.states.clone(), label, trans, h.initial))
        }
        "wts" => {
            let trans = per_state(&h, doc, "trans", Some(Vec::new()), |v| {
                let arr = v.as_array().ok_or_else(|| field_err("trans", "expected an array of triples"))?;
                arr.iter()
                    .map(|t| {
                        let t = tuple(t, 3, "trans")?;
                        let succ = h.succ(t[0].as_str().ok_or_else(|| field_err("trans", "successor name"))?)?;
                        let symbol = h.symbol(t[1].as_str().ok_or_else(|| field_err("trans", "symbol name"))?)?;
                        Ok(WtsEdge { succ, symbol, weight: natural(&t[2], "trans")? })
                    })
                    .collect()
            })?;
            Model::Wts(WeightedTs::new(h.alphabet.clone(), h.states.clone(), trans, h.initial))
        }
        "dfa" => {
            let delta = per_state(&h, doc, "delta", Some(Vec::new()), |v| {
                per_symbol(&h, v, "delta", |e| {
                    let t = tuple(e, 2, "delta")?;
                    let y = h.state(t[0].as_str().ok_or_else(|| field_err("delta", "state name"))?)?;
                    Ok((y, flag(&t[1], "delta")?))
                })
            })?;
            let delta = delta
                .into_iter()
                .map(|row| if row.is_empty() { vec![None; h.alphabet.len()] } else { row })
                .collect();
            Model::Dfa(Dfa { alphabet: h.alphabet.clone(), states: h.states.clone(), delta, initial: h.initial })
        }
        "nfa" => {
            let delta = per_state(&h, doc, "delta", Some(Vec::new()), |v| {
                let row = per_symbol(&h, v, "delta", |e| {
                    let arr = e.as_array().ok_or_else(|| field_err("delta", "expected an array of pairs"))?;
                    arr.iter()
                        .map(|p| {
                            let t = tuple(p, 2, "delta")?;
                            let y = h.state(t[0].as_str().ok_or_else(|| field_err("delta", "state name"))?)?;
                            Ok((y, flag(&t[1], "delta")?))
                        })
                        .collect::<Result<Vec<_>, JsonError>>()
                })?;
                Ok(row.into_iter().map(Option::unwrap_or_default).collect())
            })?;
            let delta = pad_rows(delta, h.alphabet.len());
            Model::Nfa(Nfa::new(h.alphabet.clone(), h.states.clone(), delta, h.initial))
        }
        "rm" => {
            let bound = natural(doc.get("bound").ok_or(JsonError::Missing("bound"))?, "bound")?;
            let delta = per_state(&h, doc, "delta", Some(Vec::new()), |v| {
                per_symbol(&h, v, "delta", |e| {
                    let t = tuple(e, 2, "delta")?;
                    let y = h.state(t[0].as_str().ok_or_else(|| field_err("delta", "state name"))?)?;
                    Ok((y, natural(&t[1], "delta")?))
                })
            })?;
            let delta = delta
                .into_iter()
                .map(|row| if row.is_empty() { vec![None; h.alphabet.len()] } else { row })
                .collect();
            Model::Rm(RewardMachine {
                alphabet: h.alphabet.clone(),
                states: h.states.clone(),
                bound,
                delta,
                initial: h.initial,
            })
        }
        "wmm" => {
            let delta = per_state(&h, doc, "delta", Some(Vec::new()), |v| {
                let row = per_symbol(&h, v, "delta", |e| {
                    let arr = e.as_array().ok_or_else(|| field_err("delta", "expected an array of triples"))?;
                    arr.iter()
                        .map(|p| {
                            let t = tuple(p, 3, "delta")?;
                            let y = h.state(t[0].as_str().ok_or_else(|| field_err("delta", "state name"))?)?;
                            Ok(WmmEdge { target: y, accept: flag(&t[1], "delta")?, weight: natural(&t[2], "delta")? })
                        })
                        .collect::<Result<Vec<_>, JsonError>>()
                })?;
                Ok(row.into_iter().map(Option::unwrap_or_default).collect())
            })?;
            let delta = pad_rows(delta, h.alphabet.len());
            Model::Wmm(WeightedMealy::new(h.alphabet.clone(), h.states.clone(), delta, h.initial))
        }
        _ => unreachable!("kind checked above"),
    };
    Ok(model)
}

fn pad_rows<T>(rows: Vec<Vec<Vec<T>>>, width: usize) -> Vec<Vec<Vec<T>>> {
    rows.into_iter()
        .map(|mut row| {
            row.resize_with(width, Vec::new);
            row
        })
        .collect()
}

fn succ_name(states: &[String], s: &Succ) -> String {
    match s {
        Succ::State(i) => states[*i].clone(),
        Succ::Target => TARGET.to_string(),
    }
}

fn header_json(kind: &str, alphabet: &Alphabet, states: &[String], initial: usize) -> Map<String, Value> {
    let mut doc = Map::new();
    doc.insert("kind".into(), json!(kind));
    doc.insert("alphabet".into(), json!(alphabet.symbols()));
    doc.insert("states".into(), json!(states));
    doc.insert("initial".into(), json!(states[initial]));
    doc
}

fn chain_tables(c: &LabeledMc, doc: &mut Map<String, Value>) {
    let label: BTreeMap<&str, &str> =
        c.states.iter().zip(&c.label).map(|(s, &a)| (s.as_str(), c.alphabet.symbol(a))).collect();
    let trans: Map<String, Value> = c
        .states
        .iter()
        .zip(&c.trans)
        .map(|(s, row)| {
            let row: Map<String, Value> =
                row.iter().map(|(t, p)| (succ_name(&c.states, t), json!(format_rational(p)))).collect();
            (s.clone(), Value::Object(row))
        })
        .collect();
    doc.insert("label".into(), json!(label));
    doc.insert("trans".into(), Value::Object(trans));
}

pub fn emit_model_value(model: &Model) -> Value {
    let mut doc = header_json(model.kind(), model.alphabet(), model.states(), model.initial());
    match model {
        Model::Mc(c) => chain_tables(c, &mut doc),
        Model::Mrm(c) => {
            chain_tables(&c.chain, &mut doc);
            let reward: BTreeMap<&str, u64> =
                c.chain.states.iter().zip(&c.reward).map(|(s, &r)| (s.as_str(), r)).collect();
            doc.insert("reward".into(), json!(reward));
        }
        Model::Ntmc(c) => {
            let label: BTreeMap<&str, &str> =
                c.states.iter().zip(&c.label).map(|(s, &a)| (s.as_str(), c.alphabet.symbol(a))).collect();
            let trans: Map<String, Value> = c
                .states
                .iter()
                .zip(&c.trans)
                .map(|(s, row)| {
                    let row: Map<String, Value> =
                        row.iter().map(|(t, p)| (c.states[*t].clone(), json!(format_rational(p)))).collect();
                    (s.clone(), Value::Object(row))
                })
                .collect();
            doc.insert("label".into(), json!(label));
            doc.insert("trans".into(), Value::Object(trans));
        }
        Model::Wts(c) => {
            let trans: Map<String, Value> = c
                .states
                .iter()
                .zip(&c.trans)
                .map(|(s, row)| {
                    let row: Vec<Value> = row
                        .iter()
                        .map(|e| json!([succ_name(&c.states, &e.succ), c.alphabet.symbol(e.symbol), e.weight]))
                        .collect();
                    (s.clone(), Value::Array(row))
                })
                .collect();
            doc.insert("trans".into(), Value::Object(trans));
        }
        Model::Dfa(d) => {
            let delta = symbol_table(&d.states, &d.alphabet, &d.delta, |e| {
                e.map(|(y, b)| json!([d.states[y], b]))
            });
            doc.insert("delta".into(), delta);
        }
        Model::Nfa(d) => {
            let delta = symbol_table(&d.states, &d.alphabet, &d.delta, |set| {
                Some(Value::Array(set.iter().map(|(y, b)| json!([d.states[*y], b])).collect()))
            });
            doc.insert("delta".into(), delta);
        }
        Model::Rm(d) => {
            doc.insert("bound".into(), json!(d.bound));
            let delta = symbol_table(&d.states, &d.alphabet, &d.delta, |e| {
                e.map(|(y, j)| json!([d.states[y], j]))
            });
            doc.insert("delta".into(), delta);
        }
        Model::Wmm(d) => {
            let delta = symbol_table(&d.states, &d.alphabet, &d.delta, |set| {
                Some(Value::Array(
                    set.iter().map(|e| json!([d.states[e.target], e.accept, e.weight])).collect(),
                ))
            });
            doc.insert("delta".into(), delta);
        }
    }
    Value::Object(doc)
}

fn symbol_table<T: Clone>(
    states: &[String],
    alphabet: &Alphabet,
    delta: &[Vec<T>],
    mut render: impl FnMut(T) -> Option<Value>,
) -> Value {
    let table: Map<String, Value> = states
        .iter()
        .zip(delta)
        .map(|(s, row)| {
            let row: Map<String, Value> = row
                .iter()
                .enumerate()
                .filter_map(|(a, e)| render(e.clone()).map(|v| (alphabet.symbol(a).to_string(), v)))
                .collect();
            (s.clone(), Value::Object(row))
        })
        .collect();
    Value::Object(table)
}

pub fn emit_model(model: &Model) -> String {
    serde_json::to_string_pretty(&emit_model_value(model)).expect("JSON values always serialize")
}

fn prod_name(space: &ProductSpace, s: &ProdSucc) -> String {
    match s {
        ProdSucc::State(i) => space.names[*i].clone(),
        ProdSucc::Accept => ACCEPT_SINK.to_string(),
        ProdSucc::Reject => REJECT_SINK.to_string(),
    }
}

fn product_header(kind: &str, space: &ProductSpace, sinks: &[&str]) -> Map<String, Value> {
    let mut states: Vec<&str> = space.names.iter().map(String::as_str).collect();
    states.extend_from_slice(sinks);
    let mut doc = Map::new();
    doc.insert("kind".into(), json!(kind));
    doc.insert("states".into(), json!(states));
    doc.insert("initial".into(), json!(space.names[space.initial]));
    doc
}

fn prob_rows(space: &ProductSpace, rows: &[Vec<(ProdSucc, Rational)>]) -> Value {
    let table: Map<String, Value> = space
        .names
        .iter()
        .zip(rows)
        .map(|(s, row)| {
            let row: Map<String, Value> =
                row.iter().map(|(t, p)| (prod_name(space, t), json!(format_rational(p)))).collect();
            (s.clone(), Value::Object(row))
        })
        .collect();
    Value::Object(table)
}

pub fn emit_product_mc(p: &ProductMc) -> Value {
    let mut doc = product_header("product-mc", &p.space, &[ACCEPT_SINK, REJECT_SINK]);
    doc.insert("trans".into(), prob_rows(&p.space, &p.rows));
    Value::Object(doc)
}

pub fn emit_product_mrm(p: &ProductRewardMc) -> Value {
    let mut doc = product_header("product-mrm", &p.space, &[ACCEPT_SINK, REJECT_SINK]);
    doc.insert("trans".into(), prob_rows(&p.space, &p.rows));
    let reward: BTreeMap<&str, u64> =
        p.space.names.iter().zip(&p.step_reward).map(|(s, &r)| (s.as_str(), r)).collect();
    doc.insert("reward".into(), json!(reward));
    Value::Object(doc)
}

pub fn emit_product_absorbing(p: &AbsorbingProductMc) -> Value {
    let mut doc = product_header("product-absorbing", &p.space, &[ACCEPT_SINK]);
    doc.insert("trans".into(), prob_rows(&p.space, &p.rows));
    Value::Object(doc)
}

pub fn emit_product_wts(p: &ProductWts) -> Value {
    let mut doc = product_header("product-wts", &p.space, &[ACCEPT_SINK, REJECT_SINK]);
    let table: Map<String, Value> = p
        .space
        .names
        .iter()
        .zip(&p.rows)
        .map(|(s, row)| {
            let row: Vec<Value> = row.iter().map(|(t, m)| json!([prod_name(&p.space, t), m])).collect();
            (s.clone(), Value::Array(row))
        })
        .collect();
    doc.insert("trans".into(), Value::Object(table));
    Value::Object(doc)
}
