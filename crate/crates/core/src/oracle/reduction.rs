//! Partitioned subgraph isomorphism (PSI) reduces to embedding transitive
//! DAGs (SubTDAG), which reduces to WSP(=,!=,<).
//!
//! File formats, vertices 1-based, `#` comments:
//!
//! ```text
//! p psi <pattern_vertices> <host_vertices>
//! g <i> <j>          # pattern edge
//! h <x> <y>          # host edge
//! c <x> <i>          # host vertex x belongs to the class of pattern vertex i
//!
//! p std <d_vertices> <r_vertices> <distinguished>
//! d <u> <v>          # arc of D
//! r <u> <v>          # arc of R
//! w <i> <r> <d>...   # w_i = r, with target set W_{D,i} = {d...}
//! ```

use std::fmt::Write as _;

use crate::error::{OracleError, ParseError};
use crate::format::{content_lines, parse_count};
use crate::model::{Constraint, ConstraintKind, UserId, UserPoset, WorkflowInstance};
use crate::order::{is_transitive, BitMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiInstance {
    pub pattern_vertices: usize,
    /// Pairs `(i, j)` with `i < j`.
    pub pattern_edges: Vec<(usize, usize)>,
    pub host_vertices: usize,
    pub host_edges: Vec<(usize, usize)>,
    /// Pattern vertex whose class each host vertex belongs to.
    pub class: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubTdagInstance {
    pub d_vertices: usize,
    pub d_arcs: Vec<(usize, usize)>,
    pub r_vertices: usize,
    pub r_arcs: Vec<(usize, usize)>,
    /// The distinguished vertices `w_i` of `R`.
    pub w_r: Vec<usize>,
    /// Target set of each `w_i`, pairwise disjoint.
    pub w_d: Vec<Vec<usize>>,
}

fn adjacency(n: usize, edges: &[(usize, usize)], symmetric: bool) -> BitMatrix {
    let mut m = BitMatrix::new(n, n);
    for &(a, b) in edges {
        m.set(a, b);
        if symmetric {
            m.set(b, a);
        }
    }
    m
}

/// Subdivides every edge, pointing both halves at the new vertex.
fn subdivide(n: usize, edges: &[(usize, usize)]) -> (usize, Vec<(usize, usize)>) {
    let mut arcs = Vec::with_capacity(2 * edges.len());
    for (e, &(a, b)) in edges.iter().enumerate() {
        arcs.push((a, n + e));
        arcs.push((b, n + e));
    }
    (n + edges.len(), arcs)
}

pub fn reduce_psi_to_subtdag(psi: &PsiInstance) -> Result<SubTdagInstance, OracleError> {
    let l = psi.pattern_vertices;
    if let Some(v) = (0..l).find(|&v| !psi.pattern_edges.iter().any(|&(a, b)| a == v || b == v)) {
        return Err(OracleError::InvalidInput(format!(
            "pattern vertex {} is isolated",
            v + 1
        )));
    }
    let (r_vertices, r_arcs) = subdivide(l, &psi.pattern_edges);
    let (d_vertices, d_arcs) = subdivide(psi.host_vertices, &psi.host_edges);
    let mut w_d = vec![Vec::new(); l];
    for (x, &c) in psi.class.iter().enumerate() {
        w_d[c].push(x);
    }
    Ok(SubTdagInstance {
        d_vertices,
        d_arcs,
        r_vertices,
        r_arcs,
        w_r: (0..l).collect(),
        w_d,
    })
}

/// Users are the vertices of `D` (`d1..`), steps those of `R` (`r1..`).
/// Arcs of `R` become `<` constraints and non-adjacent pairs `!=`.
pub fn reduce_subtdag_to_wsp(st: &SubTdagInstance) -> Result<WorkflowInstance, OracleError> {
    if !is_transitive(st.d_vertices, &st.d_arcs) {
        return Err(OracleError::InvalidInput("D is not transitive".into()));
    }
    let arcs: Vec<(UserId, UserId)> = st
        .d_arcs
        .iter()
        .map(|&(a, b)| (UserId(a), UserId(b)))
        .collect();
    let users = UserPoset::from_arcs(st.d_vertices, &arcs)
        .map_err(|e| OracleError::InvalidInput(format!("D is not acyclic: {e}")))?;
    let everyone: Vec<UserId> = (0..st.d_vertices).map(UserId).collect();
    let mut auth = vec![everyone; st.r_vertices];
    for (&w, targets) in st.w_r.iter().zip(&st.w_d) {
        auth[w] = targets.iter().map(|&x| UserId(x)).collect();
    }
    let adj = adjacency(st.r_vertices, &st.r_arcs, true);
    let mut constraints: Vec<Constraint> = st
        .r_arcs
        .iter()
        .map(|&(a, b)| Constraint::new(ConstraintKind::Lt, a, b))
        .collect();
    for a in 0..st.r_vertices {
        for b in a + 1..st.r_vertices {
            if !adj.get(a, b) {
                constraints.push(Constraint::new(ConstraintKind::Neq, a, b));
            }
        }
    }
    let mut inst = WorkflowInstance::new(users, auth, constraints);
    inst.user_names = (1..=st.d_vertices).map(|i| format!("d{i}")).collect();
    inst.step_names = (1..=st.r_vertices).map(|i| format!("r{i}")).collect();
    Ok(inst)
}

struct Embed<'a> {
    /// Allowed images per source vertex.
    candidates: Vec<Vec<usize>>,
    /// Source arcs into earlier vertices: `(earlier, forward)`.
    back: Vec<Vec<(usize, bool)>>,
    target: &'a BitMatrix,
    image: Vec<usize>,
    used: Vec<bool>,
    nodes: u64,
    budget: u64,
}

impl Embed<'_> {
    fn dfs(&mut self, v: usize) -> Result<bool, OracleError> {
        if v == self.candidates.len() {
            return Ok(true);
        }
        for i in 0..self.candidates[v].len() {
            let x = self.candidates[v][i];
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(OracleError::BudgetExceeded(self.budget));
            }
            let ok = !self.used[x]
                && self.back[v].iter().all(|&(w, fwd)| {
                    let y = self.image[w];
                    if fwd {
                        self.target.get(y, x)
                    } else {
                        self.target.get(x, y)
                    }
                });
            if ok {
                self.used[x] = true;
                self.image.push(x);
                if self.dfs(v + 1)? {
                    return Ok(true);
                }
                self.image.pop();
                self.used[x] = false;
            }
        }
        Ok(false)
    }
}

fn embed(
    candidates: Vec<Vec<usize>>,
    arcs: &[(usize, usize)],
    target: &BitMatrix,
    budget: u64,
) -> Result<Option<Vec<usize>>, OracleError> {
    let mut back = vec![Vec::new(); candidates.len()];
    for &(a, b) in arcs {
        if a < b {
            back[b].push((a, true));
        } else {
            back[a].push((b, false));
        }
    }
    let mut e = Embed {
        candidates,
        back,
        target,
        image: Vec::new(),
        used: vec![false; target.rows()],
        nodes: 0,
        budget,
    };
    Ok(e.dfs(0)?.then_some(e.image))
}

/// A class-respecting edge-preserving injection of the pattern, if any.
pub fn brute_force_psi(psi: &PsiInstance, budget: u64) -> Result<Option<Vec<usize>>, OracleError> {
    let candidates = (0..psi.pattern_vertices)
        .map(|g| {
            (0..psi.host_vertices)
                .filter(|&x| psi.class[x] == g)
                .collect()
        })
        .collect();
    let host = adjacency(psi.host_vertices, &psi.host_edges, true);
    embed(candidates, &psi.pattern_edges, &host, budget)
}

/// An arc-preserving injection of `R` into `D` sending each `w_i` into its
/// target set, if any.
pub fn brute_force_subtdag(
    st: &SubTdagInstance,
    budget: u64,
) -> Result<Option<Vec<usize>>, OracleError> {
    let mut candidates: Vec<Vec<usize>> = vec![(0..st.d_vertices).collect(); st.r_vertices];
    for (&w, targets) in st.w_r.iter().zip(&st.w_d) {
        candidates[w] = targets.clone();
    }
    let d = adjacency(st.d_vertices, &st.d_arcs, false);
    embed(candidates, &st.r_arcs, &d, budget)
}

fn vertex(line: usize, tok: &str, n: usize) -> Result<usize, ParseError> {
    let v = parse_count(line, tok)?;
    if v == 0 || v > n {
        return Err(ParseError::syntax(
            line,
            format!("vertex {v} outside 1..={n}"),
        ));
    }
    Ok(v - 1)
}

fn header<'a>(
    lines: &mut impl Iterator<Item = (usize, Vec<&'a str>)>,
    tag: &str,
    counts: usize,
) -> Result<(usize, Vec<usize>), ParseError> {
    let (line, tokens) = lines
        .next()
        .ok_or_else(|| ParseError::syntax(1, format!("missing `p {tag}` header")))?;
    if tokens.len() != counts + 2 || tokens[0] != "p" || tokens[1] != tag {
        return Err(ParseError::syntax(
            line,
            format!("expected `p {tag}` header with {counts} counts"),
        ));
    }
    let values = tokens[2..]
        .iter()
        .map(|t| parse_count(line, t))
        .collect::<Result<_, _>>()?;
    Ok((line, values))
}

pub fn parse_psi(text: &str) -> Result<PsiInstance, OracleError> {
    let mut lines = content_lines(text);
    let (hline, counts) = header(&mut lines, "psi", 2)?;
    let (l, h) = (counts[0], counts[1]);
    let mut psi = PsiInstance {
        pattern_vertices: l,
        pattern_edges: Vec::new(),
        host_vertices: h,
        host_edges: Vec::new(),
        class: vec![usize::MAX; h],
    };
    for (line, t) in lines {
        if t.len() != 3 {
            return Err(ParseError::syntax(line, "expected a tag and two numbers").into());
        }
        match t[0] {
            "g" | "h" => {
                let n = if t[0] == "g" { l } else { h };
                let (a, b) = (vertex(line, t[1], n)?, vertex(line, t[2], n)?);
                if a == b {
                    return Err(ParseError::syntax(line, "self-loop").into());
                }
                let list = if t[0] == "g" {
                    &mut psi.pattern_edges
                } else {
                    &mut psi.host_edges
                };
                list.push((a.min(b), a.max(b)));
            }
            "c" => {
                let x = vertex(line, t[1], h)?;
                if psi.class[x] != usize::MAX {
                    return Err(ParseError::syntax(
                        line,
                        format!("host vertex {} classed twice", x + 1),
                    )
                    .into());
                }
                psi.class[x] = vertex(line, t[2], l)?;
            }
            other => {
                return Err(ParseError::syntax(line, format!("unknown line tag `{other}`")).into())
            }
        }
    }
    if let Some(x) = psi.class.iter().position(|&c| c == usize::MAX) {
        return Err(
            ParseError::syntax(hline, format!("host vertex {} has no class", x + 1)).into(),
        );
    }
    for list in [&mut psi.pattern_edges, &mut psi.host_edges] {
        list.sort_unstable();
        list.dedup();
    }
    Ok(psi)
}

pub fn write_psi(psi: &PsiInstance) -> String {
    let mut out = format!("p psi {} {}\n", psi.pattern_vertices, psi.host_vertices);
    for &(a, b) in &psi.pattern_edges {
        let _ = writeln!(out, "g {} {}", a + 1, b + 1);
    }
    for &(a, b) in &psi.host_edges {
        let _ = writeln!(out, "h {} {}", a + 1, b + 1);
    }
    for (x, &c) in psi.class.iter().enumerate() {
        let _ = writeln!(out, "c {} {}", x + 1, c + 1);
    }
    out
}

pub fn parse_subtdag(text: &str) -> Result<SubTdagInstance, OracleError> {
    let mut lines = content_lines(text);
    let (hline, counts) = header(&mut lines, "std", 3)?;
    let (nd, nr, nw) = (counts[0], counts[1], counts[2]);
    let mut st = SubTdagInstance {
        d_vertices: nd,
        d_arcs: Vec::new(),
        r_vertices: nr,
        r_arcs: Vec::new(),
        w_r: vec![usize::MAX; nw],
        w_d: vec![Vec::new(); nw],
    };
    for (line, t) in lines {
        match t[0] {
            "d" | "r" if t.len() == 3 => {
                let n = if t[0] == "d" { nd } else { nr };
                let arc = (vertex(line, t[1], n)?, vertex(line, t[2], n)?);
                if arc.0 == arc.1 {
                    return Err(ParseError::syntax(line, "self-loop").into());
                }
                if t[0] == "d" {
                    &mut st.d_arcs
                } else {
                    &mut st.r_arcs
                }
                .push(arc);
            }
            "w" if t.len() >= 3 => {
                let i = vertex(line, t[1], nw)?;
                if st.w_r[i] != usize::MAX {
                    return Err(
                        ParseError::syntax(line, format!("w_{} declared twice", i + 1)).into(),
                    );
                }
                st.w_r[i] = vertex(line, t[2], nr)?;
                st.w_d[i] = t[3..]
                    .iter()
                    .map(|x| vertex(line, x, nd))
                    .collect::<Result<_, _>>()?;
            }
            _ => {
                return Err(ParseError::syntax(
                    line,
                    format!("unrecognized line `{}`", t.join(" ")),
                )
                .into())
            }
        }
    }
    if let Some(i) = st.w_r.iter().position(|&w| w == usize::MAX) {
        return Err(ParseError::syntax(hline, format!("w_{} never declared", i + 1)).into());
    }
    let mut owner = vec![false; nd];
    for set in &st.w_d {
        for &x in set {
            if std::mem::replace(&mut owner[x], true) {
                return Err(OracleError::InvalidInput(format!(
                    "target sets share vertex {}",
                    x + 1
                )));
            }
        }
    }
    Ok(st)
}

pub fn write_subtdag(st: &SubTdagInstance) -> String {
    let mut out = format!(
        "p std {} {} {}\n",
        st.d_vertices,
        st.r_vertices,
        st.w_r.len()
    );
    for &(a, b) in &st.d_arcs {
        let _ = writeln!(out, "d {} {}", a + 1, b + 1);
    }
    for &(a, b) in &st.r_arcs {
        let _ = writeln!(out, "r {} {}", a + 1, b + 1);
    }
    for (i, (&w, set)) in st.w_r.iter().zip(&st.w_d).enumerate() {
        let _ = write!(out, "w {} {}", i + 1, w + 1);
        for x in set {
            let _ = write!(out, " {}", x + 1);
        }
        out.push('\n');
    }
    out
}
