//! Tree-decomposition files:
//!
//! ```text
//! s td <num_bags> <max_bag_size> <num_vertices>
//! b <bag_id> <user_name>...
//! <bag_id> <bag_id>
//! ```
//!
//! Bag ids are 1-based. Vertices are referenced by user name.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{Bag, TreeDecomposition};
use crate::error::{ParseError, TdError};
use crate::format::{content_lines, parse_count};
use crate::model::UserId;

pub fn parse_td(text: &str, user_names: &[String]) -> Result<TreeDecomposition, TdError> {
    let names: HashMap<&str, usize> = user_names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let mut lines = content_lines(text);
    let Some((hline, header)) = lines.next() else {
        return Err(ParseError::syntax(1, "missing `s td` header").into());
    };
    if header.len() != 5 || header[0] != "s" || header[1] != "td" {
        return Err(ParseError::syntax(
            hline,
            "first line must be `s td <bags> <max_bag_size> <vertices>`",
        )
        .into());
    }
    let num_bags = parse_count(hline, header[2])?;
    let max_size = parse_count(hline, header[3])?;
    let num_vertices = parse_count(hline, header[4])?;
    if num_vertices != user_names.len() {
        return Err(ParseError::syntax(
            hline,
            format!(
                "decomposition covers {num_vertices} vertices, instance has {}",
                user_names.len()
            ),
        )
        .into());
    }
    let mut bags: Vec<Option<Bag>> = vec![None; num_bags];
    let mut edges = Vec::new();
    let bag_index = |line: usize, tok: &str| -> Result<usize, ParseError> {
        let id = parse_count(line, tok)?;
        if id == 0 || id > num_bags {
            return Err(ParseError::syntax(
                line,
                format!("bag id {id} outside 1..={num_bags}"),
            ));
        }
        Ok(id - 1)
    };
    for (line, tokens) in lines {
        if tokens[0] == "b" {
            if tokens.len() < 2 {
                return Err(ParseError::syntax(line, "bag line needs an id").into());
            }
            let i = bag_index(line, tokens[1])?;
            let mut users = Vec::new();
            for name in &tokens[2..] {
                let u = names.get(name).ok_or_else(|| ParseError::DanglingName {
                    line,
                    name: name.to_string(),
                })?;
                users.push(UserId(*u));
            }
            if users.len() > max_size {
                return Err(ParseError::syntax(
                    line,
                    format!("bag exceeds declared size {max_size}"),
                )
                .into());
            }
            if bags[i].replace(Bag::new(users)).is_some() {
                return Err(
                    ParseError::syntax(line, format!("bag {} declared twice", i + 1)).into(),
                );
            }
        } else if tokens.len() == 2 {
            edges.push((bag_index(line, tokens[0])?, bag_index(line, tokens[1])?));
        } else {
            return Err(ParseError::syntax(
                line,
                format!("unrecognized line `{}`", tokens.join(" ")),
            )
            .into());
        }
    }
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| {
            b.ok_or_else(|| ParseError::syntax(hline, format!("bag {} never declared", i + 1)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TreeDecomposition { bags, edges })
}

pub fn write_td(td: &TreeDecomposition, user_names: &[String]) -> String {
    let max = td.bags.iter().map(|b| b.len()).max().unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(out, "s td {} {} {}", td.bags.len(), max, user_names.len());
    for (i, b) in td.bags.iter().enumerate() {
        let _ = write!(out, "b {}", i + 1);
        for u in b.iter() {
            let _ = write!(out, " {}", user_names[u.0]);
        }
        out.push('\n');
    }
    for &(a, b) in &td.edges {
        let _ = writeln!(out, "{} {}", a + 1, b + 1);
    }
    out
}
