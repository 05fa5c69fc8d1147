//! Noncommutative arithmetic circuits with binary gates.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Caps, Error, Result};
use crate::poly::NcPoly;
use crate::scalar::{Field, Scalar};

pub type GateId = usize;

/// A gate. `Mul(l, r)` computes `f_l * f_r` in that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gate {
    Input(u32),
    Const(Scalar),
    Add(GateId, GateId),
    Mul(GateId, GateId),
}

impl Gate {
    pub fn children(&self) -> Option<(GateId, GateId)> {
        match *self {
            Gate::Add(a, b) | Gate::Mul(a, b) => Some((a, b)),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CircuitSize {
    pub gates: usize,
    pub edges: usize,
}

/// Gates in topological order; every gate refers only to earlier gates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    n_vars: usize,
    field: Field,
    gates: Vec<Gate>,
    output: GateId,
}

/// Incremental construction of a [`Circuit`].
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    n_vars: usize,
    field: Field,
    gates: Vec<Gate>,
}

impl CircuitBuilder {
    pub fn new(n_vars: usize, field: Field) -> CircuitBuilder {
        CircuitBuilder {
            n_vars,
            field,
            gates: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<GateId> {
        check_gate(self.n_vars, &self.field, self.gates.len(), &gate)?;
        self.gates.push(gate);
        Ok(self.gates.len() - 1)
    }

    pub fn input(&mut self, var: u32) -> Result<GateId> {
        self.push(Gate::Input(var))
    }

    pub fn constant(&mut self, c: Scalar) -> Result<GateId> {
        self.push(Gate::Const(c))
    }

    pub fn add(&mut self, a: GateId, b: GateId) -> Result<GateId> {
        self.push(Gate::Add(a, b))
    }

    pub fn mul(&mut self, a: GateId, b: GateId) -> Result<GateId> {
        self.push(Gate::Mul(a, b))
    }

    /// Left-leaning chain of additions; `None` for an empty input.
    pub fn sum<I: IntoIterator<Item = GateId>>(&mut self, ids: I) -> Result<Option<GateId>> {
        let mut acc = None;
        for id in ids {
            acc = Some(match acc {
                None => id,
                Some(a) => self.add(a, id)?,
            });
        }
        Ok(acc)
    }

    /// Left-leaning chain of multiplications, in the given order.
    pub fn product<I: IntoIterator<Item = GateId>>(&mut self, ids: I) -> Result<Option<GateId>> {
        let mut acc = None;
        for id in ids {
            acc = Some(match acc {
                None => id,
                Some(a) => self.mul(a, id)?,
            });
        }
        Ok(acc)
    }

    pub fn finish(self, output: GateId) -> Result<Circuit> {
        Circuit::from_gates(self.n_vars, self.field, self.gates, output)
    }
}

fn check_gate(n_vars: usize, field: &Field, id: GateId, gate: &Gate) -> Result<()> {
    match gate {
        Gate::Input(v) if *v as usize >= n_vars => Err(Error::Validation(format!(
            "gate {id} reads x{v} but there are {n_vars} variables"
        ))),
        Gate::Const(c) if !field.contains(c) => {
            Err(Error::Validation(format!("gate {id}: constant {c} is not in {field}")))
        }
        Gate::Add(a, b) | Gate::Mul(a, b) if *a >= id || *b >= id => Err(Error::Validation(format!(
            "gate {id} refers to gate {} which does not precede it",
            (*a).max(*b)
        ))),
        _ => Ok(()),
    }
}

impl Circuit {
    pub fn from_gates(n_vars: usize, field: Field, gates: Vec<Gate>, output: GateId) -> Result<Circuit> {
        let c = Circuit {
            n_vars,
            field,
            gates,
            output,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gates.is_empty() {
            return Err(Error::Validation("circuit has no gates".into()));
        }
        for (id, g) in self.gates.iter().enumerate() {
            check_gate(self.n_vars, &self.field, id, g)?;
        }
        if self.output >= self.gates.len() {
            return Err(Error::Validation(format!("output gate {} does not exist", self.output)));
        }
        Ok(())
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> GateId {
        self.output
    }

    /// Formal degree of every gate: inputs 1, constants 0, sums the maximum
    /// and products the sum of their children.
    pub fn formal_degrees(&self) -> Vec<usize> {
        let mut deg: Vec<usize> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let d = match *g {
                Gate::Input(_) => 1,
                Gate::Const(_) => 0,
                Gate::Add(a, b) => deg[a].max(deg[b]),
                Gate::Mul(a, b) => deg[a].saturating_add(deg[b]),
            };
            deg.push(d);
        }
        deg
    }

    pub fn formal_degree(&self) -> usize {
        self.formal_degrees()[self.output]
    }

    /// Gate count and wire count (two per binary gate).
    pub fn size(&self) -> CircuitSize {
        CircuitSize {
            gates: self.gates.len(),
            edges: 2 * self.gates.iter().filter(|g| g.children().is_some()).count(),
        }
    }

    /// Flags gates the output depends on.
    fn live(&self, output: GateId) -> Vec<bool> {
        let mut live = vec![false; self.gates.len()];
        live[output] = true;
        for id in (0..=output).rev() {
            if live[id] {
                if let Some((a, b)) = self.gates[id].children() {
                    live[a] = true;
                    live[b] = true;
                }
            }
        }
        live
    }

    pub fn evaluate(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.n_vars {
            return Err(Error::ArityMismatch {
                expected: self.n_vars,
                found: point.len(),
            });
        }
        if point.iter().any(|v| !self.field.contains(v)) {
            return Err(Error::FieldMismatch);
        }
        let live = self.live(self.output);
        let mut vals: Vec<Option<Scalar>> = vec![None; self.output + 1];
        for id in 0..=self.output {
            if !live[id] {
                continue;
            }
            let v = match &self.gates[id] {
                Gate::Input(i) => point[*i as usize].clone(),
                Gate::Const(c) => c.clone(),
                Gate::Add(a, b) => vals[*a].as_ref().unwrap() + vals[*b].as_ref().unwrap(),
                Gate::Mul(a, b) => vals[*a].as_ref().unwrap() * vals[*b].as_ref().unwrap(),
            };
            vals[id] = Some(v);
        }
        Ok(vals[self.output].take().unwrap())
    }

    /// Polynomial computed at the output.
    pub fn expand(&self, caps: &Caps) -> Result<NcPoly> {
        self.expand_gate(self.output, caps)
    }

    /// Polynomial computed at gate `id`, expanding only the gates it uses.
    pub fn expand_gate(&self, id: GateId, caps: &Caps) -> Result<NcPoly> {
        if id >= self.gates.len() {
            return Err(Error::InvalidArgument(format!("gate {id} does not exist")));
        }
        let degrees = self.formal_degrees();
        caps.check_degree(degrees[id])?;
        let live = self.live(id);
        let mut polys: Vec<Option<NcPoly>> = vec![None; id + 1];
        for g in 0..=id {
            if !live[g] {
                continue;
            }
            let p = match &self.gates[g] {
                Gate::Input(v) => NcPoly::var(self.n_vars, self.field.clone(), *v),
                Gate::Const(c) => NcPoly::constant(self.n_vars, c.clone()),
                Gate::Add(a, b) => polys[*a].as_ref().unwrap().add(polys[*b].as_ref().unwrap())?,
                Gate::Mul(a, b) => polys[*a]
                    .as_ref()
                    .unwrap()
                    .mul_capped(polys[*b].as_ref().unwrap(), caps)?,
            };
            caps.check_terms(p.len())?;
            polys[g] = Some(p);
        }
        Ok(polys[id].take().unwrap())
    }

    /// True when no constant is negative. Zero constants are allowed; they
    /// vanish under [`Circuit::propagate_zeros`]. Only meaningful over the
    /// rationals.
    pub fn is_monotone(&self) -> Result<bool> {
        if self.field != Field::Rationals {
            return Err(Error::WrongField {
                expected: "Q",
                found: format!("{}", self.field),
            });
        }
        let live = self.live(self.output);
        Ok(self
            .gates
            .iter()
            .enumerate()
            .all(|(id, g)| !live[id] || !matches!(g, Gate::Const(c) if !c.is_zero() && !c.is_positive())))
    }

    /// Drops gates the output does not depend on. Returns the new circuit
    /// and, for each old gate, its new id.
    pub fn trim(&self) -> (Circuit, Vec<Option<GateId>>) {
        let live = self.live(self.output);
        let mut remap = vec![None; self.gates.len()];
        let mut gates = Vec::new();
        for (id, g) in self.gates.iter().enumerate() {
            if !live[id] {
                continue;
            }
            let ng = match *g {
                Gate::Add(a, b) => Gate::Add(remap[a].unwrap(), remap[b].unwrap()),
                Gate::Mul(a, b) => Gate::Mul(remap[a].unwrap(), remap[b].unwrap()),
                ref other => other.clone(),
            };
            remap[id] = Some(gates.len());
            gates.push(ng);
        }
        let output = remap[self.output].unwrap();
        (
            Circuit {
                n_vars: self.n_vars,
                field: self.field.clone(),
                gates,
                output,
            },
            remap,
        )
    }

    /// Eliminates zero constants: `0 + g = g`, `0 * g = g * 0 = 0`. The
    /// result either has no zero constant or is the single gate `Const(0)`.
    /// Unused gates are dropped.
    pub fn propagate_zeros(&self) -> Circuit {
        // Each old gate maps to a new gate, or None when it computes 0.
        let mut b = CircuitBuilder::new(self.n_vars, self.field.clone());
        let mut map: Vec<Option<GateId>> = Vec::with_capacity(self.gates.len());
        let live = self.live(self.output);
        for (id, g) in self.gates.iter().enumerate() {
            if !live[id] {
                map.push(None);
                continue;
            }
            let m = match *g {
                Gate::Input(v) => Some(b.input(v).unwrap()),
                Gate::Const(ref c) if c.is_zero() => None,
                Gate::Const(ref c) => Some(b.constant(c.clone()).unwrap()),
                Gate::Add(l, r) => match (map[l], map[r]) {
                    (None, x) | (x, None) => x,
                    (Some(x), Some(y)) => Some(b.add(x, y).unwrap()),
                },
                Gate::Mul(l, r) => match (map[l], map[r]) {
                    (Some(x), Some(y)) => Some(b.mul(x, y).unwrap()),
                    _ => None,
                },
            };
            map.push(m);
        }
        let out = match map[self.output] {
            Some(o) => o,
            None => b.constant(self.field.zero()).unwrap(),
        };
        b.finish(out).expect("rebuilt from a valid circuit").trim().0
    }
}

/// Per-gate polynomials of every gate, for tests that check gate semantics.
pub fn expand_all(c: &Circuit, caps: &Caps) -> Result<Vec<NcPoly>> {
    let mut polys: Vec<NcPoly> = Vec::with_capacity(c.gates.len());
    let degrees = c.formal_degrees();
    for (id, g) in c.gates.iter().enumerate() {
        caps.check_degree(degrees[id])?;
        let p = match g {
            Gate::Input(v) => NcPoly::var(c.n_vars, c.field.clone(), *v),
            Gate::Const(s) => NcPoly::constant(c.n_vars, s.clone()),
            Gate::Add(a, b) => polys[*a].add(&polys[*b])?,
            Gate::Mul(a, b) => polys[*a].mul_capped(&polys[*b], caps)?,
        };
        caps.check_terms(p.len())?;
        polys.push(p);
    }
    Ok(polys)
}
