use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::factorization::Factorization;
use crate::verify::{format_rational, parse_rational};
use crate::Rational;

/// One gate of a straight-line program. Operands refer to earlier gates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    /// Variable `x_{i+1}` (0-based index).
    Input(usize),
    Const(Rational),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
}

/// Arithmetic circuit over the rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Circuit {
    n_vars: usize,
    gates: Vec<Gate>,
    output: usize,
}

impl Circuit {
    pub fn new(n_vars: usize, gates: Vec<Gate>, output: usize) -> Result<Self> {
        if output >= gates.len() {
            return Err(Error::Format(format!("output gate {output} out of range")));
        }
        for (k, g) in gates.iter().enumerate() {
            match *g {
                Gate::Input(i) if i >= n_vars => {
                    return Err(Error::Format(format!(
                        "gate {k} reads x{} but arity is {n_vars}",
                        i + 1
                    )))
                }
                Gate::Add(l, r) | Gate::Sub(l, r) | Gate::Mul(l, r) if l >= k || r >= k => {
                    return Err(Error::Format(format!("gate {k} refers forward")))
                }
                _ => {}
            }
        }
        Ok(Self {
            n_vars,
            gates,
            output,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    /// Degree bound obtained by propagating degrees through the gates.
    pub fn formal_degree(&self) -> usize {
        let mut deg = vec![0usize; self.gates.len()];
        for (k, g) in self.gates.iter().enumerate() {
            deg[k] = match *g {
                Gate::Input(_) => 1,
                Gate::Const(_) => 0,
                Gate::Add(l, r) | Gate::Sub(l, r) => deg[l].max(deg[r]),
                Gate::Mul(l, r) => deg[l] + deg[r],
            };
        }
        deg[self.output]
    }

    fn check_arity(&self, point: &[Rational]) -> Result<()> {
        if point.len() != self.n_vars {
            return Err(Error::ArityMismatch {
                expected: self.n_vars,
                found: point.len(),
            });
        }
        Ok(())
    }

    fn forward(&self, point: &[Rational]) -> Vec<Rational> {
        let mut v: Vec<Rational> = Vec::with_capacity(self.output + 1);
        for g in &self.gates[..=self.output] {
            let val = match g {
                Gate::Input(i) => point[*i].clone(),
                Gate::Const(c) => c.clone(),
                Gate::Add(l, r) => &v[*l] + &v[*r],
                Gate::Sub(l, r) => &v[*l] - &v[*r],
                Gate::Mul(l, r) => &v[*l] * &v[*r],
            };
            v.push(val);
        }
        v
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        self.check_arity(point)?;
        Ok(self.forward(point).swap_remove(self.output))
    }

    /// All partial derivatives at `point` by reverse-mode accumulation.
    pub fn gradient(&self, point: &[Rational]) -> Result<Vec<Rational>> {
        Ok(self.gradient_counted(point)?.0)
    }

    /// Gradient together with the number of arithmetic operations spent
    /// (forward sweep plus adjoint updates).
    pub fn gradient_counted(&self, point: &[Rational]) -> Result<(Vec<Rational>, usize)> {
        self.check_arity(point)?;
        let v = self.forward(point);
        let mut ops = v.len();
        let mut adj = vec![Rational::zero(); v.len()];
        adj[self.output] = Rational::one();
        let mut grad = vec![Rational::zero(); self.n_vars];
        for k in (0..=self.output).rev() {
            if adj[k].is_zero() {
                continue;
            }
            let a = std::mem::take(&mut adj[k]);
            match self.gates[k] {
                Gate::Input(i) => {
                    grad[i] += a;
                    ops += 1;
                }
                Gate::Const(_) => {}
                Gate::Add(l, r) => {
                    adj[l] += &a;
                    adj[r] += a;
                    ops += 2;
                }
                Gate::Sub(l, r) => {
                    adj[l] += &a;
                    adj[r] -= a;
                    ops += 2;
                }
                Gate::Mul(l, r) => {
                    let dl = &a * &v[r];
                    let dr = &a * &v[l];
                    adj[l] += dl;
                    adj[r] += dr;
                    ops += 4;
                }
            }
        }
        Ok((grad, ops))
    }

    /// Circuit computing `lambda * prod l_i^{m_i}`.
    pub fn from_factorization(f: &Factorization) -> Self {
        let mut b = CircuitBuilder::new(f.n_vars());
        let mut acc = b.constant(f.lambda().clone());
        for (form, mult) in f.factors() {
            let mut lin: Option<usize> = None;
            for (i, c) in form.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let x = b.input(i);
                let term = if c.is_one() {
                    x
                } else {
                    let k = b.constant(c.clone());
                    b.mul(k, x)
                };
                lin = Some(match lin {
                    None => term,
                    Some(s) => b.add(s, term),
                });
            }
            let p = b.pow(lin.expect("nonzero form"), *mult as u64);
            acc = b.mul(acc, p);
        }
        b.finish(acc)
    }

    /// Line-oriented text form:
    ///
    /// ```text
    /// vars 2
    /// input 1      # gate 0 = x1
    /// input 2      # gate 1 = x2
    /// mul 0 1      # gate 2
    /// output 2
    /// ```
    ///
    /// Gates are numbered from 0 in order of appearance; `input` takes a
    /// 1-based variable index; `const` takes `p/q` or an integer.
    pub fn to_text(&self) -> String {
        let mut s = format!("vars {}\n", self.n_vars);
        for g in &self.gates {
            match g {
                Gate::Input(i) => writeln!(s, "input {}", i + 1),
                Gate::Const(c) => writeln!(s, "const {}", format_rational(c)),
                Gate::Add(l, r) => writeln!(s, "add {l} {r}"),
                Gate::Sub(l, r) => writeln!(s, "sub {l} {r}"),
                Gate::Mul(l, r) => writeln!(s, "mul {l} {r}"),
            }
            .unwrap();
        }
        writeln!(s, "output {}", self.output).unwrap();
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut n_vars = None;
        let mut output = None;
        let mut gates = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Format(format!("line {}: `{line}`", lineno + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            let idx = |k: usize| -> Result<usize> {
                fields.get(k).and_then(|f| f.parse().ok()).ok_or_else(bad)
            };
            match (fields[0], fields.len()) {
                ("vars", 2) => n_vars = Some(idx(1)?),
                ("output", 2) => output = Some(idx(1)?),
                ("input", 2) => {
                    let v = idx(1)?;
                    if v == 0 {
                        return Err(bad());
                    }
                    gates.push(Gate::Input(v - 1));
                }
                ("const", 2) => gates.push(Gate::Const(parse_rational(fields[1]).ok_or_else(bad)?)),
                ("add", 3) => gates.push(Gate::Add(idx(1)?, idx(2)?)),
                ("sub", 3) => gates.push(Gate::Sub(idx(1)?, idx(2)?)),
                ("mul", 3) => gates.push(Gate::Mul(idx(1)?, idx(2)?)),
                _ => return Err(bad()),
            }
        }
        let n_vars = n_vars.ok_or_else(|| Error::Format("missing `vars` line".into()))?;
        let output = output.ok_or_else(|| Error::Format("missing `output` line".into()))?;
        Self::new(n_vars, gates, output)
    }
}

/// Incremental circuit construction. Input gates are shared per variable.
#[derive(Debug)]
pub struct CircuitBuilder {
    n_vars: usize,
    gates: Vec<Gate>,
    inputs: Vec<Option<usize>>,
}

impl CircuitBuilder {
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            gates: Vec::new(),
            inputs: vec![None; n_vars],
        }
    }

    fn push(&mut self, g: Gate) -> usize {
        self.gates.push(g);
        self.gates.len() - 1
    }

    /// Grow the arity; used by the parser as new variables appear.
    pub(crate) fn ensure_vars(&mut self, n: usize) {
        if n > self.n_vars {
            self.n_vars = n;
            self.inputs.resize(n, None);
        }
    }

    pub fn input(&mut self, i: usize) -> usize {
        self.ensure_vars(i + 1);
        if let Some(k) = self.inputs[i] {
            return k;
        }
        let k = self.push(Gate::Input(i));
        self.inputs[i] = Some(k);
        k
    }

    pub fn constant(&mut self, c: Rational) -> usize {
        self.push(Gate::Const(c))
    }

    pub fn add(&mut self, l: usize, r: usize) -> usize {
        self.push(Gate::Add(l, r))
    }

    pub fn sub(&mut self, l: usize, r: usize) -> usize {
        self.push(Gate::Sub(l, r))
    }

    pub fn mul(&mut self, l: usize, r: usize) -> usize {
        self.push(Gate::Mul(l, r))
    }

    /// `base^e` by repeated squaring.
    pub fn pow(&mut self, base: usize, mut e: u64) -> usize {
        if e == 0 {
            return self.constant(Rational::one());
        }
        let mut acc: Option<usize> = None;
        let mut sq = base;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => sq,
                    Some(a) => self.mul(a, sq),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            sq = self.mul(sq, sq);
        }
        acc.unwrap()
    }

    pub fn finish(self, output: usize) -> Circuit {
        Circuit::new(self.n_vars, self.gates, output)
            .expect("builder produces well-formed circuits")
    }
}
