//! JSON file formats.
//!
//! Each artifact has a plain serde DTO and a pair of conversions to and from
//! the core types. Scalars are written as decimal strings (`"3"`, `"-1/2"`)
//! over the rationals and prime fields, and as coefficient arrays over
//! extension fields. Output is canonical: converting a value to JSON, back,
//! and to JSON again gives the same bytes.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, ensure, Context, Result};
use hadamard_core::abp::{Abp, LinearForm, NodeId};
use hadamard_core::cfg::{AcyclicCfg, Production, Symbol};
use hadamard_core::circuit::{Circuit, CircuitBuilder, Gate, GateId};
use hadamard_core::linalg::Matrix;
use hadamard_core::pit::{Digraph, PitMethod, PitVerdict, Witness};
use hadamard_core::poly::{CMonomial, CPoly, NcPoly, Word};
use hadamard_core::scalar::{parse_rational, Field, Rational, Scalar};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum FieldDto {
    Q,
    Fp {
        p: u64,
    },
    Fpk {
        p: u64,
        k: usize,
        /// Monic modulus, low-degree coefficient first. Defaults to the
        /// canonical one.
        #[serde(default)]
        modulus: Option<Vec<u64>>,
    },
}

impl FieldDto {
    pub fn from_field(f: &Field) -> FieldDto {
        match f {
            Field::Rationals => FieldDto::Q,
            Field::Prime(p) => FieldDto::Fp { p: *p },
            Field::Extension(e) => FieldDto::Fpk {
                p: e.p(),
                k: e.k(),
                modulus: Some(e.modulus().to_vec()),
            },
        }
    }

    pub fn to_field(&self) -> Result<Field> {
        Ok(match self {
            FieldDto::Q => Field::Rationals,
            FieldDto::Fp { p } => Field::prime(*p)?,
            FieldDto::Fpk { p, k, modulus: None } => Field::extension(*p, *k)?,
            FieldDto::Fpk { p, k, modulus: Some(m) } => {
                ensure!(
                    m.len() == k + 1,
                    "modulus of degree {} for k = {k}",
                    m.len().saturating_sub(1)
                );
                Field::extension_with_modulus(*p, m.clone())?
            }
        })
    }
}

/// Parses `q`, `fp:<p>` or `fpk:<p>:<k>`.
pub fn parse_field_spec(s: &str) -> Result<Field> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    let num = |t: &str| -> Result<u64> { t.parse().with_context(|| format!("bad number {t:?} in field {s:?}")) };
    Ok(match parts.as_slice() {
        [q] if q.eq_ignore_ascii_case("q") => Field::Rationals,
        [fp, p] if fp.eq_ignore_ascii_case("fp") => Field::prime(num(p)?)?,
        [fpk, p, k] if fpk.eq_ignore_ascii_case("fpk") => Field::extension(num(p)?, num(k)? as usize)?,
        _ => bail!("field must be q, fp:<p> or fpk:<p>:<k>, got {s:?}"),
    })
}

/// The field of an input file: the file's own descriptor, else the one from
/// the command line, else the rationals. A conflict between the two is an
/// error.
pub fn resolve_field(file: Option<&FieldDto>, flag: Option<&Field>) -> Result<Field> {
    match (file.map(FieldDto::to_field).transpose()?, flag) {
        (Some(a), Some(b)) if a != *b => bail!("file declares field {a} but --field is {b}"),
        (Some(a), _) => Ok(a),
        (None, Some(b)) => Ok(b.clone()),
        (None, None) => Ok(Field::Rationals),
    }
}

pub fn scalar_to_json(s: &Scalar) -> Value {
    match s {
        Scalar::Fpk(e) => Value::from(e.coeffs().to_vec()),
        _ => Value::String(s.to_string()),
    }
}

pub fn scalar_from_json(v: &Value, field: &Field) -> Result<Scalar> {
    match v {
        Value::String(s) => Ok(field.from_rational(&parse_rational(s)?)?),
        Value::Number(n) => {
            let i = n.as_i64().ok_or_else(|| anyhow!("coefficient {n} is not an integer"))?;
            Ok(field.from_i64(i))
        }
        Value::Array(items) => {
            let coeffs = items
                .iter()
                .map(|c| {
                    c.as_u64()
                        .ok_or_else(|| anyhow!("coefficient vector entry {c} is not a nonnegative integer"))
                })
                .collect::<Result<Vec<u64>>>()?;
            ensure!(
                matches!(field, Field::Extension(_)),
                "coefficient vector given for field {field}"
            );
            Ok(field.from_coeffs(&coeffs)?)
        }
        other => bail!("expected a scalar, got {other}"),
    }
}

fn rational_to_json(r: &Rational) -> Value {
    scalar_to_json(&Scalar::rational(r.clone()))
}

// ---------------------------------------------------------------- polynomials

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<u32>>,
    /// `[variable, exponent]` pairs, for commutative monomials that are not
    /// multilinear.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<[u32; 2]>>,
    pub coeff: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyDto {
    pub nvars: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldDto>,
    pub terms: Vec<TermDto>,
}

impl PolyDto {
    pub fn from_nc(f: &NcPoly) -> PolyDto {
        PolyDto {
            nvars: f.n_vars(),
            field: Some(FieldDto::from_field(f.field())),
            terms: f
                .terms()
                .iter()
                .map(|(w, c)| TermDto {
                    word: Some(w.0.clone()),
                    support: None,
                    exponents: None,
                    coeff: scalar_to_json(c),
                })
                .collect(),
        }
    }

    pub fn from_commutative(f: &CPoly) -> PolyDto {
        PolyDto {
            nvars: f.n_vars(),
            field: Some(FieldDto::from_field(f.field())),
            terms: f
                .terms()
                .iter()
                .map(|(m, c)| {
                    let (support, exponents) = if m.is_multilinear() {
                        (Some(m.support().collect()), None)
                    } else {
                        (None, Some(m.exponents().iter().map(|&(v, e)| [v, e]).collect()))
                    };
                    TermDto {
                        word: None,
                        support,
                        exponents,
                        coeff: scalar_to_json(c),
                    }
                })
                .collect(),
        }
    }

    pub fn is_commutative(&self) -> bool {
        self.terms.iter().any(|t| t.word.is_none())
    }

    pub fn to_nc(&self, flag: Option<&Field>) -> Result<NcPoly> {
        let field = resolve_field(self.field.as_ref(), flag)?;
        let terms = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| {
                ensure!(
                    t.support.is_none() && t.exponents.is_none(),
                    "term {i}: commutative monomial in a word polynomial"
                );
                let w = t.word.clone().ok_or_else(|| anyhow!("term {i} has no word"))?;
                Ok((Word(w), scalar_from_json(&t.coeff, &field)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NcPoly::from_terms(self.nvars, field, terms)?)
    }

    pub fn to_commutative(&self, flag: Option<&Field>) -> Result<CPoly> {
        let field = resolve_field(self.field.as_ref(), flag)?;
        let terms = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let m = match (&t.word, &t.support, &t.exponents) {
                    (None, Some(s), None) => CMonomial::from_support(s.iter().copied()),
                    (None, None, Some(e)) => CMonomial::from_exponents(e.iter().map(|&[v, k]| (v, k))),
                    _ => bail!("term {i} needs exactly one of support or exponents"),
                };
                Ok((m, scalar_from_json(&t.coeff, &field)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CPoly::from_terms(self.nvars, field, terms)?)
    }
}

// ----------------------------------------------------------------------- ABPs

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelDto {
    #[serde(rename = "const", default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<Value>,
    #[serde(default)]
    pub coeffs: BTreeMap<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDto {
    pub from: [usize; 2],
    pub to: [usize; 2],
    pub label: LabelDto,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbpDto {
    pub nvars: usize,
    pub layers: Vec<usize>,
    pub edges: Vec<EdgeDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldDto>,
}

impl AbpDto {
    pub fn from_abp(p: &Abp) -> AbpDto {
        let edges = p
            .edges()
            .iter()
            .map(|(k, label)| EdgeDto {
                from: [k.layer, k.from],
                to: [k.layer + 1, k.to],
                label: LabelDto {
                    constant: Some(scalar_to_json(label.constant_term())),
                    coeffs: label
                        .coeffs()
                        .iter()
                        .map(|(v, c)| (v.to_string(), scalar_to_json(c)))
                        .collect(),
                },
            })
            .collect();
        AbpDto {
            nvars: p.n_vars(),
            layers: p.layers().to_vec(),
            edges,
            field: Some(FieldDto::from_field(p.field())),
        }
    }

    pub fn to_abp(&self, flag: Option<&Field>) -> Result<Abp> {
        let field = resolve_field(self.field.as_ref(), flag)?;
        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            let constant = match &e.label.constant {
                Some(v) => scalar_from_json(v, &field).with_context(|| format!("edge {i}"))?,
                None => field.zero(),
            };
            let coeffs = e
                .label
                .coeffs
                .iter()
                .map(|(k, v)| {
                    let var: u32 = k.parse().with_context(|| format!("edge {i}: variable key {k:?}"))?;
                    Ok((var, scalar_from_json(v, &field).with_context(|| format!("edge {i}"))?))
                })
                .collect::<Result<Vec<_>>>()?;
            edges.push((
                NodeId::new(e.from[0], e.from[1]),
                NodeId::new(e.to[0], e.to[1]),
                LinearForm::new(constant, coeffs),
            ));
        }
        let abp = Abp::from_edges(self.nvars, field, self.layers.clone(), edges)?;
        abp.validate()?;
        Ok(abp)
    }
}

// ------------------------------------------------------------------- circuits

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
pub enum GateDto {
    In {
        var: u32,
    },
    Const {
        value: Value,
    },
    Add {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        l: Option<GateId>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<GateId>,
        /// Children of a gate with fan-in other than two.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        args: Option<Vec<GateId>>,
    },
    Mul {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        l: Option<GateId>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<GateId>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        args: Option<Vec<GateId>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitDto {
    pub nvars: usize,
    pub gates: Vec<GateDto>,
    pub output: GateId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldDto>,
}

fn children(g: usize, l: &Option<GateId>, r: &Option<GateId>, args: &Option<Vec<GateId>>) -> Result<Vec<GateId>> {
    match (l, r, args) {
        (Some(a), Some(b), None) => Ok(vec![*a, *b]),
        (None, None, Some(v)) => Ok(v.clone()),
        _ => bail!("gate {g}: give either both l and r, or args"),
    }
}

impl CircuitDto {
    pub fn from_circuit(c: &Circuit) -> CircuitDto {
        let gates = c
            .gates()
            .iter()
            .map(|g| match g {
                Gate::Input(v) => GateDto::In { var: *v },
                Gate::Const(s) => GateDto::Const {
                    value: scalar_to_json(s),
                },
                Gate::Add(a, b) => GateDto::Add {
                    l: Some(*a),
                    r: Some(*b),
                    args: None,
                },
                Gate::Mul(a, b) => GateDto::Mul {
                    l: Some(*a),
                    r: Some(*b),
                    args: None,
                },
            })
            .collect();
        CircuitDto {
            nvars: c.n_vars(),
            gates,
            output: c.output(),
            field: Some(FieldDto::from_field(c.field())),
        }
    }

    /// Builds the circuit. Gates with fan-in other than two are rejected
    /// unless `normalize_fanin` is set, in which case they are rewritten as
    /// chains of binary gates (products keep their left-to-right order; an
    /// empty sum is 0 and an empty product is 1).
    pub fn to_circuit(&self, flag: Option<&Field>, normalize_fanin: bool) -> Result<Circuit> {
        let field = resolve_field(self.field.as_ref(), flag)?;
        let mut b = CircuitBuilder::new(self.nvars, field.clone());
        let mut map: Vec<GateId> = Vec::with_capacity(self.gates.len());
        for (g, gate) in self.gates.iter().enumerate() {
            let lookup = |c: GateId| -> Result<GateId> {
                map.get(c)
                    .copied()
                    .ok_or_else(|| anyhow!("gate {g} refers to gate {c}, which is not earlier"))
            };
            let id = match gate {
                GateDto::In { var } => b.input(*var)?,
                GateDto::Const { value } => {
                    b.constant(scalar_from_json(value, &field).with_context(|| format!("gate {g}"))?)?
                }
                GateDto::Add { l, r, args } | GateDto::Mul { l, r, args } => {
                    let is_add = matches!(gate, GateDto::Add { .. });
                    let kids = children(g, l, r, args)?
                        .into_iter()
                        .map(lookup)
                        .collect::<Result<Vec<_>>>()?;
                    if kids.len() != 2 && !normalize_fanin {
                        bail!(
                            "gate {g} has fan-in {}; only binary gates are accepted (see --normalize-fanin)",
                            kids.len()
                        );
                    }
                    let folded = if is_add { b.sum(kids)? } else { b.product(kids)? };
                    match folded {
                        Some(id) => id,
                        None => b.constant(if is_add { field.zero() } else { field.one() })?,
                    }
                }
            };
            map.push(id);
        }
        let out = *map
            .get(self.output)
            .ok_or_else(|| anyhow!("output gate {} does not exist", self.output))?;
        let c = b.finish(out)?;
        c.validate()?;
        Ok(c)
    }
}

// ------------------------------------------------------------------- matrices

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDto {
    pub rows: usize,
    pub cols: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldDto>,
    pub entries: Vec<Value>,
}

impl MatrixDto {
    pub fn from_matrix(m: &Matrix) -> MatrixDto {
        MatrixDto {
            rows: m.rows(),
            cols: m.cols(),
            field: Some(FieldDto::from_field(m.field())),
            entries: m.entries().iter().map(scalar_to_json).collect(),
        }
    }

    pub fn to_matrix(&self, flag: Option<&Field>) -> Result<Matrix> {
        let field = resolve_field(self.field.as_ref(), flag)?;
        let entries = self
            .entries
            .iter()
            .map(|v| scalar_from_json(v, &field))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::new(self.rows, self.cols, field, entries)?)
    }
}

// --------------------------------------------------------------------- graphs

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDto {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    pub s: usize,
    pub t: usize,
}

impl GraphDto {
    pub fn from_graph(g: &Digraph) -> GraphDto {
        GraphDto {
            vertices: g.vertices,
            edges: g.edges.iter().map(|&(u, v)| [u, v]).collect(),
            s: g.s,
            t: g.t,
        }
    }

    pub fn to_graph(&self) -> Result<Digraph> {
        let g = Digraph {
            vertices: self.vertices,
            edges: self.edges.iter().map(|&[u, v]| (u, v)).collect(),
            s: self.s,
            t: self.t,
        };
        g.validate()?;
        Ok(g)
    }
}

// ------------------------------------------------------------------- grammars

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymbolDto {
    Nonterminal(String),
    Terminal { t: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductionDto {
    pub lhs: String,
    pub rhs: Vec<SymbolDto>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrammarDto {
    pub nonterminals: Vec<String>,
    pub terminals: usize,
    pub start: String,
    pub productions: Vec<ProductionDto>,
}

impl GrammarDto {
    pub fn from_cfg(g: &AcyclicCfg) -> GrammarDto {
        let names = g.nonterminals();
        GrammarDto {
            nonterminals: names.to_vec(),
            terminals: g.n_terminals(),
            start: names[g.start()].clone(),
            productions: g
                .productions()
                .iter()
                .map(|p| ProductionDto {
                    lhs: names[p.lhs].clone(),
                    rhs: p
                        .rhs
                        .iter()
                        .map(|s| match s {
                            Symbol::N(i) => SymbolDto::Nonterminal(names[*i].clone()),
                            Symbol::T(t) => SymbolDto::Terminal { t: *t },
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_cfg(&self) -> Result<AcyclicCfg> {
        let mut index = BTreeMap::new();
        for (i, n) in self.nonterminals.iter().enumerate() {
            ensure!(
                index.insert(n.as_str(), i).is_none(),
                "nonterminal {n:?} is declared twice"
            );
        }
        let find = |n: &str| {
            index
                .get(n)
                .copied()
                .ok_or_else(|| anyhow!("unknown nonterminal {n:?}"))
        };
        let productions = self
            .productions
            .iter()
            .map(|p| {
                let rhs = p
                    .rhs
                    .iter()
                    .map(|s| match s {
                        SymbolDto::Nonterminal(n) => find(n).map(Symbol::N),
                        SymbolDto::Terminal { t } => Ok(Symbol::T(*t)),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Production {
                    lhs: find(&p.lhs)?,
                    rhs,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AcyclicCfg::new(
            self.nonterminals.clone(),
            self.terminals,
            find(&self.start)?,
            productions,
        )?)
    }
}

// ------------------------------------------------------------------- verdicts

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WitnessDto {
    Word {
        word: Vec<u32>,
    },
    Point {
        point: Vec<Value>,
        value: Value,
        field: FieldDto,
    },
    LayeredPoint {
        layered_point: Vec<Vec<Value>>,
        value: Value,
        field: FieldDto,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictDto {
    pub is_zero: bool,
    pub method: String,
    pub witness: Option<WitnessDto>,
    pub trials: Option<u32>,
    /// Exact bound as a decimal fraction string.
    pub failure_bound: Option<Value>,
}

impl VerdictDto {
    pub fn from_verdict(v: &PitVerdict) -> VerdictDto {
        let witness = v.witness.as_ref().map(|w| match w {
            Witness::Word(w) => WitnessDto::Word { word: w.0.clone() },
            Witness::Point { point, value } => WitnessDto::Point {
                point: point.iter().map(scalar_to_json).collect(),
                value: scalar_to_json(value),
                field: FieldDto::from_field(&value.field()),
            },
            Witness::LayeredPoint { points, value } => WitnessDto::LayeredPoint {
                layered_point: points.iter().map(|p| p.iter().map(scalar_to_json).collect()).collect(),
                value: scalar_to_json(value),
                field: FieldDto::from_field(&value.field()),
            },
        });
        VerdictDto {
            is_zero: v.is_zero,
            method: v.method.name().to_string(),
            witness,
            trials: v.trials,
            failure_bound: v.failure_bound.as_ref().map(rational_to_json),
        }
    }

    pub fn to_verdict(&self) -> Result<PitVerdict> {
        let method = PitMethod::from_name(&self.method).ok_or_else(|| anyhow!("unknown method {:?}", self.method))?;
        let witness = match &self.witness {
            None => None,
            Some(WitnessDto::Word { word }) => Some(Witness::Word(Word(word.clone()))),
            Some(WitnessDto::Point { point, value, field }) => {
                let f = field.to_field()?;
                Some(Witness::Point {
                    point: point.iter().map(|v| scalar_from_json(v, &f)).collect::<Result<_>>()?,
                    value: scalar_from_json(value, &f)?,
                })
            }
            Some(WitnessDto::LayeredPoint {
                layered_point,
                value,
                field,
            }) => {
                let f = field.to_field()?;
                Some(Witness::LayeredPoint {
                    points: layered_point
                        .iter()
                        .map(|p| p.iter().map(|v| scalar_from_json(v, &f)).collect::<Result<_>>())
                        .collect::<Result<_>>()?,
                    value: scalar_from_json(value, &f)?,
                })
            }
        };
        let failure_bound = match &self.failure_bound {
            None => None,
            Some(Value::String(s)) => Some(parse_rational(s)?),
            Some(other) => bail!("failure_bound must be a fraction string, got {other}"),
        };
        Ok(PitVerdict {
            is_zero: self.is_zero,
            method,
            witness,
            trials: self.trials,
            failure_bound,
        })
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}
