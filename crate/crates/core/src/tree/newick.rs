//! Newick reading and writing.
//!
//! Internal node names carry event labels (`(a,b)Creat;`). Branch lengths
//! and bracketed comments are accepted and discarded. Names containing
//! Newick punctuation or whitespace are written single-quoted.

use alloc::string::String;
use alloc::vec::Vec;

use super::{Event, PhyloTree, TreeBuilder};
use crate::error::{Error, ParseErrorKind, Result};

const PUNCTUATION: &[char] = &['(', ')', ',', ':', ';', '[', ']', '\''];

impl PhyloTree {
    /// Parses exactly one `;`-terminated tree.
    pub fn from_newick(text: &str) -> Result<Self> {
        let mut p = Parser::new(text);
        let tree = p.tree()?;
        p.skip_blank()?;
        if let Some((off, c)) = p.peek() {
            return Err(Error::parse(off, ParseErrorKind::UnexpectedChar(c)));
        }
        Ok(tree)
    }

    /// Writes the tree as Newick with event labels as internal names.
    pub fn to_newick(&self) -> String {
        let mut out = String::with_capacity(self.len() * 4);
        write_subtree(self, self.root(), &mut out);
        out.push(';');
        out
    }
}

/// Parses every `;`-terminated tree in `text`, in order.
pub fn parse_forest(text: &str) -> Result<Vec<PhyloTree>> {
    let mut p = Parser::new(text);
    let mut trees = Vec::new();
    loop {
        p.skip_blank()?;
        if p.peek().is_none() {
            break;
        }
        trees.push(p.tree()?);
    }
    if trees.is_empty() {
        return Err(Error::parse(text.len(), ParseErrorKind::Empty));
    }
    Ok(trees)
}

fn needs_quotes(name: &str) -> bool {
    name.is_empty() || name.chars().any(|c| c.is_whitespace() || PUNCTUATION.contains(&c))
}

pub(crate) fn push_name(name: &str, out: &mut String) {
    if needs_quotes(name) {
        out.push('\'');
        for c in name.chars() {
            if c == '\'' {
                out.push('\'');
            }
            out.push(c);
        }
        out.push('\'');
    } else {
        out.push_str(name);
    }
}

fn write_subtree(t: &PhyloTree, x: super::NodeId, out: &mut String) {
    // Explicit stack: deep caterpillars would overflow a recursive writer.
    enum Step {
        Enter(super::NodeId),
        Comma,
        Close(Option<Event>),
    }
    let mut stack = alloc::vec![Step::Enter(x)];
    while let Some(step) = stack.pop() {
        match step {
            Step::Enter(y) => match t.children(y) {
                None => push_name(t.name(y).unwrap_or_default(), out),
                Some((l, r)) => {
                    out.push('(');
                    stack.push(Step::Close(t.label(y)));
                    stack.push(Step::Enter(r));
                    stack.push(Step::Comma);
                    stack.push(Step::Enter(l));
                }
            },
            Step::Comma => out.push(','),
            Step::Close(label) => {
                out.push(')');
                if let Some(e) = label {
                    out.push_str(e.as_str());
                }
            }
        }
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    after_comma: bool,
}

struct Group {
    open: usize,
    children: Vec<usize>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self { text, pos: 0, after_comma: false }
    }

    fn peek(&self) -> Option<(usize, char)> {
        self.text[self.pos..].chars().next().map(|c| (self.pos, c))
    }

    fn bump(&mut self) {
        if let Some((_, c)) = self.peek() {
            self.pos += c.len_utf8();
        }
    }

    /// Skips whitespace and `[...]` comments.
    fn skip_blank(&mut self) -> Result<()> {
        while let Some((off, c)) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '[' {
                match self.text[off..].find(']') {
                    Some(end) => self.pos = off + end + 1,
                    None => return Err(Error::parse(off, ParseErrorKind::Unbalanced)),
                }
            } else {
                break;
            }
        }
        Ok(())
    }

    /// Reads an optional (possibly quoted) name.
    fn name(&mut self) -> Result<Option<(usize, String)>> {
        self.skip_blank()?;
        let Some((start, c)) = self.peek() else { return Ok(None) };
        if c == '\'' {
            self.bump();
            let mut s = String::new();
            loop {
                match self.peek() {
                    None => return Err(Error::parse(start, ParseErrorKind::Unbalanced)),
                    Some((_, '\'')) => {
                        self.bump();
                        if let Some((_, '\'')) = self.peek() {
                            s.push('\'');
                            self.bump();
                        } else {
                            return Ok(Some((start, s)));
                        }
                    }
                    Some((_, ch)) => {
                        s.push(ch);
                        self.bump();
                    }
                }
            }
        }
        while let Some((_, ch)) = self.peek() {
            if ch.is_whitespace() || PUNCTUATION.contains(&ch) {
                break;
            }
            self.bump();
        }
        if self.pos == start {
            Ok(None)
        } else {
            Ok(Some((start, String::from(&self.text[start..self.pos]))))
        }
    }

    fn branch_length(&mut self) -> Result<()> {
        self.skip_blank()?;
        if let Some((_, ':')) = self.peek() {
            self.bump();
            self.skip_blank()?;
            let start = self.pos;
            while let Some((_, ch)) = self.peek() {
                if ch.is_ascii_digit() || matches!(ch, '.' | '-' | '+' | 'e' | 'E') {
                    self.bump();
                } else {
                    break;
                }
            }
            let s = &self.text[start..self.pos];
            if s.parse::<f64>().is_err() {
                return Err(Error::parse(start, ParseErrorKind::BadBranchLength(String::from(s))));
            }
        }
        Ok(())
    }

    fn tree(&mut self) -> Result<PhyloTree> {
        let mut b = TreeBuilder::new();
        let mut stack: Vec<Group> = Vec::new();
        let mut root: Option<usize> = None;
        // Leaf names already used, with their offsets, to report duplicates
        // at the right position.
        let mut names: alloc::collections::BTreeMap<String, usize> = Default::default();

        loop {
            self.skip_blank()?;
            let Some((off, c)) = self.peek() else {
                return Err(match stack.last() {
                    Some(g) => Error::parse(g.open, ParseErrorKind::Unbalanced),
                    None => Error::parse(self.text.len(), if root.is_some() {
                        ParseErrorKind::MissingTerminator
                    } else {
                        ParseErrorKind::Empty
                    }),
                });
            };
            // An item is expected at the start, after '(' and after ','.
            let expecting_item = root.is_none()
                && stack.last().is_none_or(|g| g.children.is_empty() || self.after_comma);
            if expecting_item {
                let item = match c {
                    '(' => {
                        self.bump();
                        stack.push(Group { open: off, children: Vec::new() });
                        self.after_comma = false;
                        continue;
                    }
                    ')' | ',' | ';' | ':' => {
                        return Err(Error::parse(off, ParseErrorKind::EmptyName));
                    }
                    _ => {
                        let (noff, name) = self.name()?.ok_or(Error::parse(off, ParseErrorKind::UnexpectedChar(c)))?;
                        if names.insert(name.clone(), noff).is_some() {
                            return Err(Error::parse(noff, ParseErrorKind::DuplicateLeaf(name)));
                        }
                        self.branch_length()?;
                        b.leaf(name)
                    }
                };
                self.place(item, &mut stack, &mut root);
                continue;
            }
            match c {
                ',' if !stack.is_empty() => {
                    self.bump();
                    self.after_comma = true;
                }
                ')' => {
                    self.bump();
                    let Some(g) = stack.pop() else {
                        return Err(Error::parse(off, ParseErrorKind::Unbalanced));
                    };
                    if g.children.len() != 2 {
                        return Err(Error::parse(g.open, ParseErrorKind::NonBinary { arity: g.children.len() }));
                    }
                    let label = match self.name()? {
                        None => None,
                        Some((loff, s)) => Some(s.parse::<Event>().map_err(|_| {
                            Error::parse(loff, ParseErrorKind::UnknownLabel(s.clone()))
                        })?),
                    };
                    self.branch_length()?;
                    let item = b.internal(g.children[0], g.children[1], label);
                    self.place(item, &mut stack, &mut root);
                }
                ';' => {
                    self.bump();
                    if let Some(g) = stack.last() {
                        return Err(Error::parse(g.open, ParseErrorKind::Unbalanced));
                    }
                    let root = root.expect("item placed before terminator");
                    return b.build(root);
                }
                _ => return Err(Error::parse(off, ParseErrorKind::UnexpectedChar(c))),
            }
        }
    }

    fn place(&mut self, item: usize, stack: &mut [Group], root: &mut Option<usize>) {
        self.after_comma = false;
        match stack.last_mut() {
            Some(g) => g.children.push(item),
            None => *root = Some(item),
        }
    }
}
