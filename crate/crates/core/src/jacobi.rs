//! Tree Jacobi diagrams with labeled legs modulo AS and IHX, and the map
//! `φ(D) = Σ_v X_{l(v)} ⊗ L_v(D)` into `H ⊗ L_k`.
//!
//! A diagram rooted at one of its legs is a binary bracket code: the edge
//! leaving a trivalent vertex towards the root is labeled `[a, b]`, where `a`
//! and `b` follow the incoming edge in the vertex's counterclockwise order.
//! Swapping `a` and `b` is an AS move and costs a sign.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{decompose, dk_kernel_basis, TensorElement};
use crate::linalg::{self, Q};
use crate::lyndon::{d_rank, LyndonWord};

/// Rooted binary bracket of leg labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Code {
    Leaf(usize),
    Node(Box<Code>, Box<Code>),
}

impl Code {
    pub fn node(a: Code, b: Code) -> Code {
        Code::Node(Box::new(a), Box::new(b))
    }

    pub fn leaves(&self) -> usize {
        match self {
            Code::Leaf(_) => 1,
            Code::Node(a, b) => a.leaves() + b.leaves(),
        }
    }

    /// Sorted children everywhere, with the sign of the swaps; `None` when
    /// some vertex has two identical branches (the diagram equals its negative).
    pub fn canonical(&self) -> Option<(Code, i32)> {
        match self {
            Code::Leaf(_) => Some((self.clone(), 1)),
            Code::Node(a, b) => {
                let (ca, sa) = a.canonical()?;
                let (cb, sb) = b.canonical()?;
                match ca.cmp(&cb) {
                    Ordering::Equal => None,
                    Ordering::Less => Some((Code::node(ca, cb), sa * sb)),
                    Ordering::Greater => Some((Code::node(cb, ca), -sa * sb)),
                }
            }
        }
    }

    /// Expansion of the bracket in the tensor algebra.
    pub fn tensor(&self, n: usize) -> TensorElement {
        match self {
            Code::Leaf(l) => TensorElement::monomial(n, vec![*l], Q::one()),
            Code::Node(a, b) => a.tensor(n).commutator(&b.tensor(n)),
        }
    }

    fn at(&self, path: &[bool]) -> &Code {
        match (path.split_first(), self) {
            (None, _) => self,
            (Some((&right, rest)), Code::Node(a, b)) => {
                if right {
                    b.at(rest)
                } else {
                    a.at(rest)
                }
            }
            (Some(_), Code::Leaf(_)) => unreachable!("path leaves the tree"),
        }
    }

    fn replace(&self, path: &[bool], new: Code) -> Code {
        match (path.split_first(), self) {
            (None, _) => new,
            (Some((&right, rest)), Code::Node(a, b)) => {
                if right {
                    Code::node((**a).clone(), b.replace(rest, new))
                } else {
                    Code::node(a.replace(rest, new), (**b).clone())
                }
            }
            (Some(_), Code::Leaf(_)) => unreachable!("path leaves the tree"),
        }
    }

    fn node_paths(&self, prefix: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
        if let Code::Node(a, b) = self {
            out.push(prefix.clone());
            prefix.push(false);
            a.node_paths(prefix, out);
            prefix.pop();
            prefix.push(true);
            b.node_paths(prefix, out);
            prefix.pop();
        }
    }

    pub fn parse(text: &str) -> Result<Code> {
        let chars: Vec<char> = text.chars().collect();
        let mut pos = 0;
        let c = parse_code(&chars, &mut pos)?;
        skip_ws(&chars, &mut pos);
        if pos != chars.len() {
            return Err(code_error(pos, format!("unexpected '{}'", chars[pos])));
        }
        Ok(c)
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Code::Leaf(l) => write!(f, "{l}"),
            Code::Node(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

fn code_error(pos: usize, message: String) -> Error {
    Error::Parse {
        line: 1,
        column: pos + 1,
        message,
    }
}

fn skip_ws(chars: &[char], pos: &mut usize) {
    while *pos < chars.len() && chars[*pos].is_whitespace() {
        *pos += 1;
    }
}

fn parse_code(chars: &[char], pos: &mut usize) -> Result<Code> {
    skip_ws(chars, pos);
    match chars.get(*pos) {
        Some('[') => {
            *pos += 1;
            let a = parse_code(chars, pos)?;
            skip_ws(chars, pos);
            if chars.get(*pos) != Some(&',') {
                return Err(code_error(*pos, "expected ','".into()));
            }
            *pos += 1;
            let b = parse_code(chars, pos)?;
            skip_ws(chars, pos);
            if chars.get(*pos) != Some(&']') {
                return Err(code_error(*pos, "expected ']'".into()));
            }
            *pos += 1;
            Ok(Code::node(a, b))
        }
        Some(c) if c.is_ascii_digit() => {
            let start = *pos;
            while *pos < chars.len() && chars[*pos].is_ascii_digit() {
                *pos += 1;
            }
            let s: String = chars[start..*pos].iter().collect();
            let l: usize = s
                .parse()
                .map_err(|_| code_error(start, format!("bad label '{s}'")))?;
            if l == 0 {
                return Err(code_error(start, "labels start at 1".into()));
            }
            Ok(Code::Leaf(l))
        }
        Some(c) => Err(code_error(*pos, format!("unexpected '{c}'"))),
        None => Err(code_error(*pos, "unexpected end of input".into())),
    }
}

/// Uni-trivalent tree; trivalent vertices list their neighbours in
/// counterclockwise order, legs carry a label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiDiagram {
    pub labels: Vec<Option<usize>>,
    pub adjacency: Vec<Vec<usize>>,
}

impl JacobiDiagram {
    pub fn new(labels: Vec<Option<usize>>, adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let v = labels.len();
        if v < 2 || adjacency.len() != v {
            return Err(Error::MalformedDiagram("need at least two vertices".into()));
        }
        let mut edges = 0;
        for (i, (l, adj)) in labels.iter().zip(&adjacency).enumerate() {
            match (l, adj.len()) {
                (Some(0), _) => return Err(Error::MalformedDiagram("labels start at 1".into())),
                (Some(_), 1) | (None, 3) => {}
                _ => {
                    return Err(Error::MalformedDiagram(format!(
                        "vertex {i} has degree {} (legs need a label and degree 1, inner vertices degree 3)",
                        adj.len()
                    )))
                }
            }
            for &j in adj {
                if j >= v || j == i || !adjacency[j].contains(&i) {
                    return Err(Error::MalformedDiagram(format!("bad edge {i}–{j}")));
                }
            }
            edges += adj.len();
        }
        if edges / 2 != v - 1 {
            return Err(Error::MalformedDiagram("graph is not a tree".into()));
        }
        let mut seen = vec![false; v];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &y in &adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::MalformedDiagram("graph is not connected".into()));
        }
        Ok(JacobiDiagram { labels, adjacency })
    }

    /// Diagram with a root leg labeled `root` attached to the tree of `code`.
    pub fn from_code(root: usize, code: &Code) -> Result<Self> {
        let mut labels = vec![Some(root)];
        let mut adjacency = vec![Vec::new()];
        fn grow(
            code: &Code,
            parent: usize,
            labels: &mut Vec<Option<usize>>,
            adj: &mut Vec<Vec<usize>>,
        ) {
            let me = labels.len();
            adj[parent].push(me);
            match code {
                Code::Leaf(l) => {
                    labels.push(Some(*l));
                    adj.push(vec![parent]);
                }
                Code::Node(a, b) => {
                    labels.push(None);
                    adj.push(vec![parent]);
                    grow(a, me, labels, adj);
                    grow(b, me, labels, adj);
                }
            }
        }
        grow(code, 0, &mut labels, &mut adjacency);
        Self::new(labels, adjacency)
    }

    /// Parse `v:1 | [[1,2],2]`.
    pub fn parse(text: &str) -> Result<Self> {
        let (root, code) = parse_rooted(text)?;
        Self::from_code(root, &code)
    }

    pub fn degree(&self) -> usize {
        self.labels.len() / 2
    }

    pub fn legs(&self) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&i| self.labels[i].is_some())
            .collect()
    }

    pub fn max_label(&self) -> usize {
        self.labels.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Bracket code of the tree seen from leg `v`; its value is `L_v(D)`.
    pub fn code_at(&self, v: usize) -> Code {
        let u = self.adjacency[v][0];
        self.rooted(u, v)
    }

    fn rooted(&self, u: usize, from: usize) -> Code {
        if let Some(l) = self.labels[u] {
            return Code::Leaf(l);
        }
        let adj = &self.adjacency[u];
        let p = adj.iter().position(|&x| x == from).expect("edge exists");
        Code::node(
            self.rooted(adj[(p + 1) % 3], u),
            self.rooted(adj[(p + 2) % 3], u),
        )
    }

    /// Canonical rooted form and the AS sign relating it to `self`, or `None`
    /// when AS forces the diagram to vanish.
    pub fn canonicalize(&self) -> Option<(CanonicalDiagram, i32)> {
        let mut forms: Vec<((usize, Code), i32)> = Vec::new();
        for v in self.legs() {
            let (c, s) = self.code_at(v).canonical()?;
            forms.push(((self.labels[v].expect("leg"), c), s));
        }
        forms.sort();
        // the same form reached with opposite signs: an orientation-reversing symmetry
        if forms
            .windows(2)
            .any(|w| w[0].0 == w[1].0 && w[0].1 != w[1].1)
        {
            return None;
        }
        let ((root, code), sign) = forms.swap_remove(0);
        Some((CanonicalDiagram { root, code }, sign))
    }

    /// `φ(D) = Σ_v X_{l(v)} ⊗ L_v(D)` with `L_v` in the Lyndon basis.
    pub fn phi(&self, n: usize) -> Result<BTreeMap<(usize, LyndonWord), Q>> {
        if self.max_label() > n {
            return Err(Error::GeneratorOutOfRange {
                index: self.max_label(),
                n,
            });
        }
        let mut out: BTreeMap<(usize, LyndonWord), Q> = BTreeMap::new();
        for v in self.legs() {
            let l = self.labels[v].expect("leg");
            for (w, c) in decompose(&self.code_at(v).tensor(n))? {
                let e = out.entry((l, w)).or_insert_with(Q::zero);
                *e += c;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }
}

fn parse_rooted(text: &str) -> Result<(usize, Code)> {
    let t = text.trim();
    let Some(rest) = t.strip_prefix("v:") else {
        return Err(code_error(0, "expected 'v:<label> | <code>'".into()));
    };
    let Some((root, code)) = rest.split_once('|') else {
        return Err(code_error(2, "expected '|'".into()));
    };
    let root: usize = root
        .trim()
        .parse()
        .map_err(|_| code_error(2, format!("bad root label '{}'", root.trim())))?;
    if root == 0 {
        return Err(code_error(2, "labels start at 1".into()));
    }
    let offset = t.len() - code.len();
    let code = Code::parse(code).map_err(|e| match e {
        Error::Parse {
            line,
            column,
            message,
        } => Error::Parse {
            line,
            column: column + offset,
            message,
        },
        other => other,
    })?;
    Ok((root, code))
}

/// Representative `(root label, sorted code)`, minimal over all legs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalDiagram {
    pub root: usize,
    pub code: Code,
}

impl CanonicalDiagram {
    pub fn degree(&self) -> usize {
        self.code.leaves()
    }

    pub fn diagram(&self) -> JacobiDiagram {
        JacobiDiagram::from_code(self.root, &self.code).expect("codes build trees")
    }
}

impl fmt::Display for CanonicalDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v:{} | {}", self.root, self.code)
    }
}

impl Serialize for CanonicalDiagram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Rational combination of canonical diagrams of one degree.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiagramSpaceElement {
    pub degree: usize,
    pub terms: BTreeMap<CanonicalDiagram, Q>,
}

impl DiagramSpaceElement {
    pub fn zero(degree: usize) -> Self {
        DiagramSpaceElement {
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// Adds `c · D`, canonicalizing `D` first.
    pub fn add_diagram(&mut self, d: &JacobiDiagram, c: &Q) {
        let Some((canon, sign)) = d.canonicalize() else {
            return;
        };
        let c = c * Q::from_integer(sign.into());
        match self.terms.entry(canon) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "degree": self.degree,
            "terms": self.terms.iter().map(|(d, c)| serde_json::json!({
                "diagram": d.to_string(),
                "coeff": c.to_string(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Sorted-children codes with `m` leaves labeled in `1..=n`, each once.
fn canonical_codes(n: usize, m: usize, memo: &mut HashMap<usize, Vec<Code>>) -> Vec<Code> {
    if let Some(c) = memo.get(&m) {
        return c.clone();
    }
    let out = if m == 1 {
        (1..=n).map(Code::Leaf).collect()
    } else {
        let mut out = Vec::new();
        for a in 1..=m / 2 {
            let left = canonical_codes(n, a, memo);
            let right = canonical_codes(n, m - a, memo);
            for l in &left {
                for r in &right {
                    match l.cmp(r) {
                        Ordering::Less => out.push(Code::node(l.clone(), r.clone())),
                        Ordering::Greater if a != m - a => {
                            out.push(Code::node(r.clone(), l.clone()))
                        }
                        _ => {}
                    }
                }
            }
        }
        out
    };
    memo.insert(m, out.clone());
    out
}

/// Spanning set of `C_k^t`, the IHX relations among it, and the quotient dimension.
#[derive(Debug, Clone)]
pub struct DiagramSpace {
    pub n: usize,
    pub k: usize,
    pub diagrams: Vec<CanonicalDiagram>,
    pub relations: Vec<Vec<Q>>,
    pub relation_rank: usize,
}

impl DiagramSpace {
    pub fn build(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyAlphabet);
        }
        if k == 0 {
            return Err(Error::Precondition(
                "diagram degree must be at least 1".into(),
            ));
        }
        let mut memo = HashMap::new();
        let codes = canonical_codes(n, k, &mut memo);
        let mut set = BTreeSet::new();
        for root in 1..=n {
            for code in &codes {
                let d = JacobiDiagram::from_code(root, code)?;
                if let Some((canon, _)) = d.canonicalize() {
                    set.insert(canon);
                }
            }
        }
        let diagrams: Vec<CanonicalDiagram> = set.into_iter().collect();
        let position: HashMap<&CanonicalDiagram, usize> =
            diagrams.iter().enumerate().map(|(i, d)| (d, i)).collect();
        let dim = diagrams.len();
        let mut relations: Vec<Vec<Q>> = diagrams
            .par_iter()
            .flat_map_iter(ihx_relations)
            .filter_map(|rel| {
                let mut row = vec![Q::zero(); dim];
                for (canon, c) in rel.terms {
                    row[position[&canon]] += c;
                }
                row.iter().any(|x| !x.is_zero()).then_some(row)
            })
            .collect();
        relations.sort();
        relations.dedup();
        let relation_rank = linalg::rank(&relations, dim);
        Ok(DiagramSpace {
            n,
            k,
            diagrams,
            relations,
            relation_rank,
        })
    }

    pub fn dimension(&self) -> usize {
        self.diagrams.len() - self.relation_rank
    }

    /// Coordinates of an element in the spanning set.
    pub fn coordinates(&self, e: &DiagramSpaceElement) -> Option<Vec<Q>> {
        let mut v = vec![Q::zero(); self.diagrams.len()];
        for (d, c) in &e.terms {
            let i = self.diagrams.binary_search(d).ok()?;
            v[i] = c.clone();
        }
        Some(v)
    }

    /// Whether the element vanishes modulo IHX.
    pub fn is_zero(&self, e: &DiagramSpaceElement) -> bool {
        let Some(v) = self.coordinates(e) else {
            return false;
        };
        if v.iter().all(|x| x.is_zero()) {
            return true;
        }
        let mut m = self.relations.clone();
        m.push(v);
        linalg::rank(&m, self.diagrams.len()) == self.relation_rank
    }

    /// Indices of spanning diagrams forming a basis of the quotient.
    pub fn basis(&self) -> Vec<usize> {
        let dim = self.diagrams.len();
        let units: Vec<Vec<Q>> = (0..dim)
            .map(|i| {
                let mut v = vec![Q::zero(); dim];
                v[i] = Q::one();
                v
            })
            .collect();
        linalg::extend_independent(&self.relations, &units, dim)
    }
}

/// `[[A,B],C] + [[B,C],A] + [[C,A],B]` at every internal edge of `d`.
fn ihx_relations(d: &CanonicalDiagram) -> Vec<DiagramSpaceElement> {
    let mut paths = Vec::new();
    d.code.node_paths(&mut Vec::new(), &mut paths);
    let mut out = Vec::new();
    for p in paths {
        let Code::Node(x, y) = d.code.at(&p) else {
            continue;
        };
        for (inner, other) in [(x, y), (y, x)] {
            let Code::Node(a, b) = inner.as_ref() else {
                continue;
            };
            let (a, b, c) = (a.as_ref(), b.as_ref(), other.as_ref());
            let mut rel = DiagramSpaceElement::zero(d.degree());
            for (p1, p2, p3) in [(a, b, c), (b, c, a), (c, a, b)] {
                let term = Code::node(Code::node(p1.clone(), p2.clone()), p3.clone());
                let code = d.code.replace(&p, term);
                let diagram = JacobiDiagram::from_code(d.root, &code).expect("valid");
                rel.add_diagram(&diagram, &Q::one());
            }
            out.push(rel);
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct DimensionReport {
    pub n: usize,
    pub k: usize,
    pub spanning_diagrams: usize,
    pub relation_rank: usize,
    pub dimension: usize,
    pub d_rank: String,
    pub matches_d_rank: bool,
    pub basis: Vec<CanonicalDiagram>,
    pub phi_rank: usize,
    pub phi_in_kernel: bool,
    pub phi_kills_relations: bool,
}

/// `dim C_k^t` and the checks that `φ` is an isomorphism onto `D_k(H)`.
pub fn ct_dimension(n: usize, k: usize) -> Result<DimensionReport> {
    let space = DiagramSpace::build(n, k)?;
    let kernel = dk_kernel_basis(n, k)?;
    let ncols = kernel.columns.len();
    let phi_vectors: Vec<Vec<Q>> = space
        .diagrams
        .par_iter()
        .map(|d| {
            let phi = d.diagram().phi(n)?;
            let mut v = vec![Q::zero(); ncols];
            for ((i, w), c) in phi {
                let col = kernel
                    .column_of(i, &w)
                    .ok_or_else(|| Error::Invalid(format!("φ left H ⊗ L_{k}: X_{i} ⊗ e({w})")))?;
                v[col] = c;
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let phi_in_kernel = phi_vectors
        .iter()
        .all(|v| kernel.apply(v).iter().all(|x| x.is_zero()));
    let phi_kills_relations = space.relations.iter().all(|rel| {
        (0..ncols).all(|c| {
            rel.iter()
                .zip(&phi_vectors)
                .filter(|(r, _)| !r.is_zero())
                .map(|(r, v)| r * &v[c])
                .sum::<Q>()
                .is_zero()
        })
    });
    let phi_rank = linalg::rank(&phi_vectors, ncols);
    let dimension = space.dimension();
    let d = d_rank(n as u64, k as u64);
    let basis = space
        .basis()
        .into_iter()
        .map(|i| space.diagrams[i].clone())
        .collect();
    Ok(DimensionReport {
        n,
        k,
        spanning_diagrams: space.diagrams.len(),
        relation_rank: space.relation_rank,
        dimension,
        matches_d_rank: d == dimension.into(),
        d_rank: d.to_string(),
        basis,
        phi_rank,
        phi_in_kernel,
        phi_kills_relations,
    })
}

/// `φ(D)` as JSON `{"X1 ⊗ e(122)": "2", …}` plus the kernel check.
pub fn phi_report(d: &JacobiDiagram, n: usize) -> Result<serde_json::Value> {
    let phi = d.phi(n)?;
    let k = d.degree();
    let kernel = dk_kernel_basis(n, k)?;
    let mut v = vec![Q::zero(); kernel.columns.len()];
    for ((i, w), c) in &phi {
        if let Some(col) = kernel.column_of(*i, w) {
            v[col] = c.clone();
        }
    }
    let in_kernel = kernel.apply(&v).iter().all(|x| x.is_zero());
    let canonical = d.canonicalize();
    Ok(serde_json::json!({
        "degree": k,
        "canonical": canonical.as_ref().map(|(c, _)| c.to_string()),
        "sign": canonical.as_ref().map(|(_, s)| *s),
        "legs": d.legs().iter().map(|&v| serde_json::json!({
            "label": d.labels[v],
            "L_v": d.code_at(v).to_string(),
        })).collect::<Vec<_>>(),
        "phi": phi.iter().map(|((i, w), c)| (format!("X{i} ⊗ e({w})"), serde_json::Value::String(c.to_string()))).collect::<serde_json::Map<_, _>>(),
        "in_kernel": in_kernel,
    }))
}

/// The caterpillar with end legs `1` and `2k+1` middle legs `2`, rooted at
/// the first end: `v:1 | [2,[2,…[2,1]…]]`.
pub fn palindromic_caterpillar(k: usize) -> Code {
    let mut code = Code::Leaf(1);
    for _ in 0..2 * k + 1 {
        code = Code::node(Code::Leaf(2), code);
    }
    code
}

#[derive(Debug, Clone, Serialize)]
pub struct PalindromicReport {
    pub k: usize,
    pub degree: usize,
    pub diagram: String,
    pub canonically_zero: bool,
    pub zero: bool,
}

/// Whether the palindromic caterpillar vanishes in `C^t` over the rationals.
pub fn palindromic_vanishing(k: usize) -> Result<PalindromicReport> {
    let code = palindromic_caterpillar(k);
    let d = JacobiDiagram::from_code(1, &code)?;
    report_vanishing(k, &d)
}

fn report_vanishing(k: usize, d: &JacobiDiagram) -> Result<PalindromicReport> {
    let degree = d.degree();
    let canonically_zero = d.canonicalize().is_none();
    let zero = canonically_zero || {
        let space = DiagramSpace::build(2, degree)?;
        let mut e = DiagramSpaceElement::zero(degree);
        e.add_diagram(d, &Q::one());
        space.is_zero(&e)
    };
    Ok(PalindromicReport {
        k,
        degree,
        diagram: format!("v:1 | {}", d.code_at(0)),
        canonically_zero,
        zero,
    })
}

/// Whether a diagram vanishes modulo AS and IHX.
pub fn diagram_vanishes(d: &JacobiDiagram) -> Result<bool> {
    if d.canonicalize().is_none() {
        return Ok(true);
    }
    let space = DiagramSpace::build(d.max_label().max(2), d.degree())?;
    let mut e = DiagramSpaceElement::zero(d.degree());
    e.add_diagram(d, &Q::one());
    Ok(space.is_zero(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(x: i64) -> Q {
        Q::from_integer(x.into())
    }

    /// The H-shaped degree-3 diagram: legs `v` (top left, label 1), `2`
    /// (bottom left), `1` (top right), `2` (bottom right).
    fn h_diagram() -> JacobiDiagram {
        // 0 = v, 1 = bottom-left 2, 2 = A, 3 = B, 4 = top-right 1, 5 = bottom-right 2
        JacobiDiagram::new(
            vec![Some(1), Some(2), None, None, Some(1), Some(2)],
            vec![
                vec![2],
                vec![2],
                vec![0, 1, 3],
                vec![4, 2, 5],
                vec![3],
                vec![3],
            ],
        )
        .unwrap()
    }

    #[test]
    fn figure_value_of_l_v() {
        let d = h_diagram();
        let lv = d.code_at(0);
        assert_eq!(lv.to_string(), "[2,[2,1]]");
        let expect = Code::parse("[[1,2],2]").unwrap().tensor(2);
        assert_eq!(lv.tensor(2), expect);
    }

    #[test]
    fn strut() {
        let d = JacobiDiagram::parse("v:1 | 2").unwrap();
        assert_eq!(d.degree(), 1);
        let (c, s) = d.canonicalize().unwrap();
        assert_eq!((c.to_string(), s), ("v:1 | 2".to_string(), 1));
        let phi = d.phi(2).unwrap();
        let one = LyndonWord::letter(1);
        let two = LyndonWord::letter(2);
        assert_eq!(phi.len(), 2);
        assert_eq!(phi[&(1, two)], q(1));
        assert_eq!(phi[&(2, one)], q(1));
    }

    #[test]
    fn as_swap_flips_sign() {
        let a = JacobiDiagram::parse("v:1 | [1,[2,2]]").unwrap();
        assert!(a.canonicalize().is_none());
        let a = JacobiDiagram::parse("v:1 | [2,[1,2]]").unwrap();
        let b = JacobiDiagram::parse("v:1 | [[1,2],2]").unwrap();
        let (ca, sa) = a.canonicalize().unwrap();
        let (cb, sb) = b.canonicalize().unwrap();
        assert_eq!(ca, cb);
        assert_eq!(sa, -sb);
        let (again, s2) = ca.diagram().canonicalize().unwrap();
        assert_eq!((again, s2), (ca.clone(), 1));
        let pa = a.phi(2).unwrap();
        let pb = b.phi(2).unwrap();
        for (key, c) in &pa {
            assert_eq!(pb[key], -c.clone());
        }
    }

    #[test]
    fn root_choice_does_not_matter() {
        let d = h_diagram();
        let (c, s) = d.canonicalize().unwrap();
        for v in d.legs() {
            let label = d.labels[v].unwrap();
            let other = JacobiDiagram::from_code(label, &d.code_at(v)).unwrap();
            assert_eq!(other.canonicalize().unwrap(), (c.clone(), s));
        }
    }

    #[test]
    fn phi_of_h_diagram() {
        let phi = h_diagram().phi(2).unwrap();
        let w122 = LyndonWord::new(vec![1, 2, 2]).unwrap();
        let w112 = LyndonWord::new(vec![1, 1, 2]).unwrap();
        assert_eq!(phi.len(), 2);
        assert_eq!(phi[&(1, w122)], q(2));
        assert_eq!(phi[&(2, w112)], q(2));
    }

    #[test]
    fn small_dimensions() {
        for (k, dim) in [(1, 3), (2, 0), (3, 1), (4, 0)] {
            let r = ct_dimension(2, k).unwrap();
            assert_eq!(r.dimension, dim, "k = {k}");
            assert!(r.matches_d_rank && r.phi_in_kernel && r.phi_kills_relations);
            assert_eq!(r.phi_rank, dim);
            assert_eq!(r.basis.len(), dim);
        }
        let r = ct_dimension(3, 2).unwrap();
        assert!(r.matches_d_rank);
    }

    #[test]
    fn palindromic_and_control() {
        for k in 0..2 {
            assert!(palindromic_vanishing(k).unwrap().zero);
        }
        let control = JacobiDiagram::parse("v:1 | [2,[2,1]]").unwrap();
        assert!(!diagram_vanishes(&control).unwrap());
    }

    #[test]
    fn parsing_errors() {
        assert!(matches!(Code::parse("[1,2"), Err(Error::Parse { .. })));
        match JacobiDiagram::parse("v:1 | [1,x]") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 10),
            other => panic!("{other:?}"),
        }
        assert!(JacobiDiagram::new(vec![Some(1), None], vec![vec![1], vec![0]]).is_err());
    }
}
