//! k-clique-expressions and Steiner instances: parsing, validation,
//! realization into labeled graphs, and random instance generation.
//!
//! Instance file grammar (UTF-8, `#` starts a comment line):
//!
//! ```text
//! k <int>
//! terminals <name> ( <name> )*
//! budget <int>
//! expr <sexpr>
//! sexpr := (intro <label> <name>) | (union <sexpr> <sexpr>)
//!        | (relabel <i> <j> <sexpr>) | (join <i> <j> <sexpr>)
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pattern::Label;
use crate::Error;

/// One node of a clique-expression syntax tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprNode {
    Introduce { label: Label, name: String },
    Union { left: Box<ExprNode>, right: Box<ExprNode> },
    Relabel { from: Label, to: Label, child: Box<ExprNode> },
    Join { i: Label, j: Label, child: Box<ExprNode> },
}

/// Node counts per kind, in expression order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NodeCount {
    pub introduce: usize,
    pub union: usize,
    pub relabel: usize,
    pub join: usize,
}

impl NodeCount {
    pub fn total(&self) -> usize {
        self.introduce + self.union + self.relabel + self.join
    }
}

impl ExprNode {
    /// Visits the tree in post order (children before the node, left first),
    /// passing each node together with its post-order id.
    pub fn for_each_post_order<'a>(&'a self, f: &mut impl FnMut(&'a ExprNode, usize)) {
        fn walk<'a>(n: &'a ExprNode, next: &mut usize, f: &mut impl FnMut(&'a ExprNode, usize)) {
            match n {
                ExprNode::Introduce { .. } => {}
                ExprNode::Union { left, right } => {
                    walk(left, next, f);
                    walk(right, next, f);
                }
                ExprNode::Relabel { child, .. } | ExprNode::Join { child, .. } => {
                    walk(child, next, f);
                }
            }
            let id = *next;
            *next += 1;
            f(n, id);
        }
        let mut next = 0;
        walk(self, &mut next, f);
    }
}

/// Exact counts of each node kind.
pub fn node_count(expr: &ExprNode) -> NodeCount {
    let mut c = NodeCount::default();
    expr.for_each_post_order(&mut |n, _| match n {
        ExprNode::Introduce { .. } => c.introduce += 1,
        ExprNode::Union { .. } => c.union += 1,
        ExprNode::Relabel { .. } => c.relabel += 1,
        ExprNode::Join { .. } => c.join += 1,
    });
    c
}

/// The labeled graph a clique-expression realizes. Vertices carry dense ids
/// in introduction order; names are opaque strings.
#[derive(Clone, Debug)]
pub struct LabeledGraph {
    names: Vec<String>,
    labels: Vec<Label>,
    edges: BTreeSet<(usize, usize)>,
    index: HashMap<String, usize>,
}

impl LabeledGraph {
    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name_of(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn id_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn label_of(&self, v: usize) -> Label {
        self.labels[v]
    }

    /// Edges as ordered id pairs `(u, v)` with `u < v`.
    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.names.len()];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// Graph export format: a `vertices` header, one `edge` line per edge,
    /// one `label` line per vertex.
    pub fn export(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "vertices {}", self.names.len());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "edge {} {}", self.names[u], self.names[v]);
        }
        for v in 0..self.names.len() {
            let _ = writeln!(out, "label {} {}", self.names[v], self.labels[v].0);
        }
        out
    }
}

/// Evaluates a clique-expression into its labeled graph. Vertex sets of the
/// two sides of a union are disjoint by the unique-name invariant.
pub fn realize(expr: &ExprNode) -> LabeledGraph {
    let mut g = LabeledGraph {
        names: Vec::new(),
        labels: Vec::new(),
        edges: BTreeSet::new(),
        index: HashMap::new(),
    };
    // Evaluates the subtree and returns the vertex ids it introduced.
    fn eval(n: &ExprNode, g: &mut LabeledGraph) -> Vec<usize> {
        match n {
            ExprNode::Introduce { label, name } => {
                let id = g.names.len();
                g.names.push(name.clone());
                g.labels.push(*label);
                g.index.insert(name.clone(), id);
                vec![id]
            }
            ExprNode::Union { left, right } => {
                let mut vs = eval(left, g);
                vs.extend(eval(right, g));
                vs
            }
            ExprNode::Relabel { from, to, child } => {
                let vs = eval(child, g);
                for &v in &vs {
                    if g.labels[v] == *from {
                        g.labels[v] = *to;
                    }
                }
                vs
            }
            ExprNode::Join { i, j, child } => {
                let vs = eval(child, g);
                let with_i: Vec<usize> = vs.iter().copied().filter(|&v| g.labels[v] == *i).collect();
                let with_j: Vec<usize> = vs.iter().copied().filter(|&v| g.labels[v] == *j).collect();
                for &u in &with_i {
                    for &v in &with_j {
                        let (a, b) = if u < v { (u, v) } else { (v, u) };
                        g.edges.insert((a, b));
                    }
                }
                vs
            }
        }
    }
    eval(expr, &mut g);
    g
}

/// A Steiner instance: a k-clique-expression, a nonempty terminal set, and a
/// size budget.
#[derive(Clone, Debug)]
pub struct Instance {
    pub k: u32,
    pub expr: ExprNode,
    pub terminals: BTreeSet<String>,
    pub budget: usize,
}

impl Instance {
    /// Validates structure: label ranges, join label distinctness, unique
    /// vertex names, terminal membership, and budget bounds.
    pub fn validate(&self) -> Result<(), Error> {
        if self.k == 0 || self.k > 30 {
            return Err(Error::Invalid(format!("k must be in 1..=30, got {}", self.k)));
        }
        let mut names: BTreeSet<&str> = BTreeSet::new();
        let mut bad: Option<String> = None;
        let k = self.k;
        self.expr.for_each_post_order(&mut |n, _| {
            if bad.is_some() {
                return;
            }
            let check_label = |l: Label| l.0 >= 1 && l.0 <= k;
            match n {
                ExprNode::Introduce { label, name } => {
                    if !check_label(*label) {
                        bad = Some(format!("label {} out of range 1..={k}", label.0));
                    } else if !names.insert(name.as_str()) {
                        bad = Some(format!("duplicate vertex name {name:?}"));
                    }
                }
                ExprNode::Union { .. } => {}
                ExprNode::Relabel { from, to, .. } => {
                    if !check_label(*from) || !check_label(*to) {
                        bad = Some(format!("relabel {} {} out of range 1..={k}", from.0, to.0));
                    }
                }
                ExprNode::Join { i, j, .. } => {
                    if !check_label(*i) || !check_label(*j) {
                        bad = Some(format!("join {} {} out of range 1..={k}", i.0, j.0));
                    } else if i == j {
                        bad = Some(format!("join requires i != j, got {} {}", i.0, j.0));
                    }
                }
            }
        });
        if let Some(msg) = bad {
            return Err(Error::Invalid(msg));
        }
        if self.terminals.is_empty() {
            return Err(Error::Invalid("terminal set must be nonempty".into()));
        }
        for t in &self.terminals {
            if !names.contains(t.as_str()) {
                return Err(Error::Invalid(format!("unknown terminal {t:?}")));
            }
        }
        if self.budget < self.terminals.len() {
            return Err(Error::Invalid(format!(
                "budget {} is below the terminal count {}",
                self.budget,
                self.terminals.len()
            )));
        }
        if self.budget > names.len() {
            return Err(Error::Invalid(format!(
                "budget {} exceeds the vertex count {}",
                self.budget,
                names.len()
            )));
        }
        Ok(())
    }

    pub fn realize_graph(&self) -> LabeledGraph {
        realize(&self.expr)
    }

    /// Terminal vertex ids in the realized graph, ascending.
    pub fn terminal_ids(&self, g: &LabeledGraph) -> Vec<usize> {
        let mut ids: Vec<usize> =
            self.terminals.iter().map(|t| g.id_of(t).expect("validated terminal")).collect();
        ids.sort_unstable();
        ids
    }

    /// True when the expression exceeds the usual size assumptions (linear
    /// unions, about `n * k^2` unary operations). Such expressions are still
    /// accepted; the polynomial factors just grow.
    pub fn is_oversized(&self) -> bool {
        let c = node_count(&self.expr);
        let n = c.introduce.max(1);
        let kk = (self.k as usize).pow(2);
        c.union > 4 * n || c.relabel + c.join > 8 * n * kk + 16
    }

    /// Renders the instance in the file format; `parse_instance` round-trips.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "k {}", self.k);
        let terms: Vec<&str> = self.terminals.iter().map(|s| s.as_str()).collect();
        let _ = writeln!(out, "terminals {}", terms.join(" "));
        let _ = writeln!(out, "budget {}", self.budget);
        let _ = writeln!(out, "expr {}", render_sexpr(&self.expr));
        out
    }
}

fn render_sexpr(n: &ExprNode) -> String {
    match n {
        ExprNode::Introduce { label, name } => format!("(intro {} {})", label.0, name),
        ExprNode::Union { left, right } => {
            format!("(union {} {})", render_sexpr(left), render_sexpr(right))
        }
        ExprNode::Relabel { from, to, child } => {
            format!("(relabel {} {} {})", from.0, to.0, render_sexpr(child))
        }
        ExprNode::Join { i, j, child } => {
            format!("(join {} {} {})", i.0, j.0, render_sexpr(child))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Word(String),
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Lexer {
    fn new(text: &str, start_line: usize) -> Lexer {
        let mut toks = Vec::new();
        for (li, line) in text.lines().enumerate() {
            let line_no = start_line + li;
            let line = match line.find('#') {
                Some(h) => &line[..h],
                None => line,
            };
            let mut word = String::new();
            let mut word_col = 1;
            for (col, ch) in (1..).zip(line.chars()) {
                match ch {
                    '(' | ')' | ' ' | '\t' | '\r' => {
                        if !word.is_empty() {
                            toks.push((Tok::Word(std::mem::take(&mut word)), line_no, word_col));
                        }
                        if ch == '(' {
                            toks.push((Tok::LParen, line_no, col));
                        } else if ch == ')' {
                            toks.push((Tok::RParen, line_no, col));
                        }
                    }
                    _ => {
                        if word.is_empty() {
                            word_col = col;
                        }
                        word.push(ch);
                    }
                }
            }
            if !word.is_empty() {
                toks.push((Tok::Word(word), line_no, word_col));
            }
        }
        Lexer { toks, pos: 0 }
    }

    fn peek(&self) -> Option<&(Tok, usize, usize)> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<(Tok, usize, usize)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: &str) -> Error {
        match self.toks.get(self.pos.min(self.toks.len().saturating_sub(1))) {
            Some((_, line, col)) => Error::Parse { line: *line, col: *col, msg: msg.into() },
            None => Error::Parse { line: 1, col: 1, msg: msg.into() },
        }
    }
}

fn parse_sexpr(lx: &mut Lexer) -> Result<ExprNode, Error> {
    match lx.next() {
        Some((Tok::LParen, line, col)) => {
            let head = match lx.next() {
                Some((Tok::Word(w), _, _)) => w,
                _ => {
                    return Err(Error::Parse {
                        line,
                        col,
                        msg: "expected an operator after '('".into(),
                    })
                }
            };
            let node = match head.as_str() {
                "intro" => {
                    let label = parse_word_int(lx, "label")?;
                    let name = parse_name(lx)?;
                    ExprNode::Introduce { label: Label(label), name }
                }
                "union" => {
                    let left = parse_sexpr(lx)?;
                    let right = parse_sexpr(lx)?;
                    ExprNode::Union { left: Box::new(left), right: Box::new(right) }
                }
                "relabel" => {
                    let from = parse_word_int(lx, "label")?;
                    let to = parse_word_int(lx, "label")?;
                    let child = parse_sexpr(lx)?;
                    ExprNode::Relabel { from: Label(from), to: Label(to), child: Box::new(child) }
                }
                "join" => {
                    let i = parse_word_int(lx, "label")?;
                    let j = parse_word_int(lx, "label")?;
                    let child = parse_sexpr(lx)?;
                    ExprNode::Join { i: Label(i), j: Label(j), child: Box::new(child) }
                }
                other => {
                    return Err(Error::Parse {
                        line,
                        col,
                        msg: format!("unknown operator {other:?}"),
                    })
                }
            };
            match lx.next() {
                Some((Tok::RParen, _, _)) => Ok(node),
                _ => Err(lx.err("expected ')'")),
            }
        }
        _ => Err(lx.err("expected '('")),
    }
}

fn parse_word_int(lx: &mut Lexer, what: &str) -> Result<u32, Error> {
    match lx.next() {
        Some((Tok::Word(w), line, col)) => w.parse().map_err(|_| Error::Parse {
            line,
            col,
            msg: format!("expected a {what}, got {w:?}"),
        }),
        _ => Err(lx.err(&format!("expected a {what}"))),
    }
}

fn parse_name(lx: &mut Lexer) -> Result<String, Error> {
    match lx.next() {
        Some((Tok::Word(w), _, _)) => Ok(w),
        _ => Err(lx.err("expected a vertex name")),
    }
}

/// Parses and validates an instance file.
pub fn parse_instance(text: &str) -> Result<Instance, Error> {
    let mut k: Option<u32> = None;
    let mut terminals: Option<BTreeSet<String>> = None;
    let mut budget: Option<usize> = None;
    let mut expr: Option<ExprNode> = None;

    let mut lines = text.lines().enumerate().peekable();
    while let Some((li, raw)) = lines.next() {
        let line_no = li + 1;
        let line = match raw.find('#') {
            Some(h) => &raw[..h],
            None => raw,
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let (key, rest) = match trimmed.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (trimmed, ""),
        };
        match key {
            "k" => {
                k = Some(rest.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    col: 3,
                    msg: format!("invalid k value {rest:?}"),
                })?);
            }
            "terminals" => {
                let set: BTreeSet<String> =
                    rest.split_whitespace().map(str::to_owned).collect();
                terminals = Some(set);
            }
            "budget" => {
                budget = Some(rest.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    col: 8,
                    msg: format!("invalid budget value {rest:?}"),
                })?);
            }
            "expr" => {
                // The expression may continue over the remaining lines.
                let mut body = rest.to_string();
                for (_, cont) in lines.by_ref() {
                    body.push('\n');
                    body.push_str(cont);
                }
                let mut lx = Lexer::new(&body, line_no);
                let node = parse_sexpr(&mut lx)?;
                if let Some((_, line, col)) = lx.peek() {
                    return Err(Error::Parse {
                        line: *line,
                        col: *col,
                        msg: "trailing input after expression".into(),
                    });
                }
                expr = Some(node);
                break;
            }
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    col: 1,
                    msg: format!("unknown directive {other:?}"),
                });
            }
        }
    }

    let missing = |what: &str| Error::Parse {
        line: text.lines().count().max(1),
        col: 1,
        msg: format!("missing {what} line"),
    };
    let instance = Instance {
        k: k.ok_or_else(|| missing("k"))?,
        terminals: terminals.ok_or_else(|| missing("terminals"))?,
        budget: budget.ok_or_else(|| missing("budget"))?,
        expr: expr.ok_or_else(|| missing("expr"))?,
    };
    instance.validate()?;
    Ok(instance)
}

/// Tuning knobs for the random instance generator.
#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    /// Probability of wrapping a fresh union in a join (needs k >= 2).
    pub p_join: f64,
    /// Probability of wrapping a fresh union in a relabel.
    pub p_relabel: f64,
    /// Extra join wrappers applied at the root.
    pub root_joins: usize,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig { p_join: 0.65, p_relabel: 0.3, root_joins: 1 }
    }
}

/// Deterministic random instance: `n` vertices, labels in `1..=k`,
/// `terminal_count` terminals. Structural decisions consume a fixed number
/// of RNG draws independent of `k`, so equal seeds give structurally
/// identical instances across different `k`.
pub fn gen_random_instance(
    n: usize,
    k: u32,
    terminal_count: usize,
    seed: u64,
) -> Result<Instance, Error> {
    gen_random_instance_with(n, k, terminal_count, seed, GenConfig::default())
}

pub fn gen_random_instance_with(
    n: usize,
    k: u32,
    terminal_count: usize,
    seed: u64,
    cfg: GenConfig,
) -> Result<Instance, Error> {
    if n == 0 || terminal_count == 0 || terminal_count > n || k == 0 || k > 30 {
        return Err(Error::Invalid(format!(
            "infeasible generator parameters: n={n}, k={k}, terminals={terminal_count}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |m: u64| -> u64 { rng.next_u64() % m };

    let mut frags: Vec<ExprNode> = (0..n)
        .map(|v| ExprNode::Introduce {
            label: Label(1 + draw(k as u64) as u32),
            name: format!("v{v}"),
        })
        .collect();

    let rand_join = |node: ExprNode, draw: &mut dyn FnMut(u64) -> u64| -> ExprNode {
        let i = 1 + draw(k as u64) as u32;
        let j = 1 + (i as u64 % k as u64) as u32 + draw((k - 1) as u64) as u32;
        let j = if j > k { j - k } else { j };
        debug_assert_ne!(i, j);
        ExprNode::Join { i: Label(i), j: Label(j), child: Box::new(node) }
    };

    while frags.len() > 1 {
        let a = frags.swap_remove(draw(frags.len() as u64) as usize);
        let b = frags.swap_remove(draw(frags.len() as u64) as usize);
        let mut node = ExprNode::Union { left: Box::new(a), right: Box::new(b) };
        let roll_join = draw(1000) < (cfg.p_join * 1000.0) as u64;
        if roll_join && k >= 2 {
            node = rand_join(node, &mut draw);
        }
        let roll_relabel = draw(1000) < (cfg.p_relabel * 1000.0) as u64;
        if roll_relabel {
            let from = 1 + draw(k as u64) as u32;
            let to = 1 + draw(k as u64) as u32;
            node = ExprNode::Relabel {
                from: Label(from),
                to: Label(to),
                child: Box::new(node),
            };
        }
        frags.push(node);
    }
    let mut root = frags.pop().unwrap();
    if k >= 2 && n >= 2 {
        for _ in 0..cfg.root_joins {
            root = rand_join(root, &mut draw);
        }
    }

    // Partial Fisher-Yates for the terminal sample.
    let mut ids: Vec<usize> = (0..n).collect();
    for t in 0..terminal_count {
        let pick = t + draw((n - t) as u64) as usize;
        ids.swap(t, pick);
    }
    let terminals: BTreeSet<String> = ids[..terminal_count].iter().map(|v| format!("v{v}")).collect();
    let budget = terminal_count + draw((n - terminal_count + 1) as u64) as usize;

    let instance = Instance { k, expr: root, terminals, budget };
    instance.validate()?;
    Ok(instance)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_smallest_instance() {
        let inst = parse_instance("k 1\nterminals a\nbudget 1\nexpr (intro 1 a)").unwrap();
        assert_eq!(inst.k, 1);
        assert_eq!(inst.budget, 1);
        let g = inst.realize_graph();
        assert_eq!(g.vertex_count(), 1);
        assert!(g.edges().is_empty());
    }

    #[test]
    fn join_requires_distinct_labels() {
        let err = parse_instance("k 2\nterminals a\nbudget 1\nexpr (join 2 2 (intro 2 a))")
            .unwrap_err();
        assert!(err.to_string().contains("i != j"), "{err}");
    }

    #[test]
    fn two_vertex_join_realizes_an_edge() {
        let inst = parse_instance(
            "k 2\nterminals a b\nbudget 2\nexpr (join 1 2 (union (intro 1 a) (intro 2 b)))",
        )
        .unwrap();
        let g = inst.realize_graph();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edges().len(), 1);
        let (u, v) = *g.edges().iter().next().unwrap();
        assert_eq!((g.name_of(u), g.name_of(v)), ("a", "b"));
    }

    #[test]
    fn realize_examples() {
        let g = realize(&ExprNode::Introduce { label: Label(1), name: "a".into() });
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.label_of(0), Label(1));

        let relabeled = ExprNode::Relabel {
            from: Label(1),
            to: Label(2),
            child: Box::new(ExprNode::Introduce { label: Label(1), name: "a".into() }),
        };
        let g = realize(&relabeled);
        assert_eq!(g.label_of(0), Label(2));
        assert!(g.edges().is_empty());
    }

    #[test]
    fn node_counts() {
        let intro = ExprNode::Introduce { label: Label(1), name: "a".into() };
        assert_eq!(
            node_count(&intro),
            NodeCount { introduce: 1, union: 0, relabel: 0, join: 0 }
        );
        let inst = parse_instance(
            "k 2\nterminals a\nbudget 1\nexpr (join 1 2 (union (intro 1 a) (intro 2 b)))",
        )
        .unwrap();
        assert_eq!(
            node_count(&inst.expr),
            NodeCount { introduce: 2, union: 1, relabel: 0, join: 1 }
        );
        let mut chain = ExprNode::Introduce { label: Label(1), name: "a".into() };
        for _ in 0..5 {
            chain = ExprNode::Relabel { from: Label(1), to: Label(1), child: Box::new(chain) };
        }
        assert_eq!(
            node_count(&chain),
            NodeCount { introduce: 1, union: 0, relabel: 5, join: 0 }
        );
    }

    #[test]
    fn duplicate_names_rejected() {
        let err = parse_instance(
            "k 1\nterminals a\nbudget 1\nexpr (union (intro 1 a) (intro 1 a))",
        )
        .unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    #[test]
    fn unknown_terminal_rejected() {
        let err = parse_instance("k 1\nterminals z\nbudget 1\nexpr (intro 1 a)").unwrap_err();
        assert!(err.to_string().contains("unknown terminal"), "{err}");
    }

    #[test]
    fn label_out_of_range_rejected() {
        let err = parse_instance("k 1\nterminals a\nbudget 1\nexpr (intro 2 a)").unwrap_err();
        assert!(err.to_string().contains("out of range"), "{err}");
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_instance("k 1\nterminals a\nbudget 1\nexpr (intro 1").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn render_round_trips() {
        let inst = gen_random_instance(7, 3, 2, 42).unwrap();
        let text = inst.render();
        let again = parse_instance(&text).unwrap();
        assert_eq!(inst.k, again.k);
        assert_eq!(inst.terminals, again.terminals);
        assert_eq!(inst.budget, again.budget);
        assert_eq!(inst.expr, again.expr);
    }

    #[test]
    fn generator_is_deterministic_and_valid() {
        let a = gen_random_instance(5, 2, 2, 7).unwrap();
        let b = gen_random_instance(5, 2, 2, 7).unwrap();
        assert_eq!(a.expr, b.expr);
        assert_eq!(a.terminals, b.terminals);
        assert_eq!(a.budget, b.budget);
        assert_eq!(a.realize_graph().vertex_count(), 5);
        for seed in 0..40 {
            let inst = gen_random_instance(6, 3, 2, seed).unwrap();
            inst.validate().unwrap();
            let g = inst.realize_graph();
            assert_eq!(g.vertex_count(), 6);
            assert_eq!(g.vertex_count(), node_count(&inst.expr).introduce);
        }
    }

    #[test]
    fn generator_single_vertex() {
        let inst = gen_random_instance(1, 1, 1, 0).unwrap();
        assert_eq!(inst.budget, 1);
        assert!(matches!(inst.expr, ExprNode::Introduce { .. }));
        assert!(inst.terminals.contains("v0"));
    }

    #[test]
    fn generator_structure_is_k_independent() {
        for seed in 0..10 {
            let a = gen_random_instance(9, 8, 3, seed).unwrap();
            let b = gen_random_instance(9, 9, 3, seed).unwrap();
            assert_eq!(node_count(&a.expr), node_count(&b.expr));
            assert_eq!(a.terminals, b.terminals);
            assert_eq!(a.budget, b.budget);
        }
    }

    #[test]
    fn infeasible_generator_parameters() {
        assert!(gen_random_instance(0, 1, 1, 0).is_err());
        assert!(gen_random_instance(3, 1, 4, 0).is_err());
        assert!(gen_random_instance(3, 0, 1, 0).is_err());
    }
}
