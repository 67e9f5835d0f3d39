//! Line-oriented instance files.
//!
//! ```text
//! p wsp <n_users> <k_steps>
//! u <user_name>                  # n_users lines, order fixes UserId
//! s <step_name>                  # k_steps lines, order fixes StepId
//! a <step_name> <user_name>...   # authorization list; absent step => empty list
//! o <user_lo> <user_hi>          # order arc: user_lo < user_hi
//! c eq|neq|lt <step1> <step2>
//! ```
//!
//! `#` starts a comment. Names match `[A-Za-z0-9_]+`.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::ParseError;
use crate::model::{Constraint, ConstraintKind, StepId, UserId, UserPoset, WorkflowInstance};

pub(crate) fn is_valid_name(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// Non-blank lines with comments stripped, paired with 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

pub(crate) fn parse_count(line: usize, tok: &str) -> Result<usize, ParseError> {
    tok.parse()
        .map_err(|_| ParseError::syntax(line, format!("expected a count, found `{tok}`")))
}

fn declare<'a>(
    line: usize,
    what: &str,
    tokens: &[&'a str],
    table: &mut HashMap<&'a str, usize>,
    names: &mut Vec<String>,
) -> Result<(), ParseError> {
    if tokens.len() != 2 {
        return Err(ParseError::syntax(
            line,
            format!("{what} declaration takes exactly one name"),
        ));
    }
    let name = tokens[1];
    if !is_valid_name(name) {
        return Err(ParseError::syntax(
            line,
            format!("invalid {what} name `{name}`"),
        ));
    }
    if table.insert(name, names.len()).is_some() {
        return Err(ParseError::syntax(
            line,
            format!("duplicate {what} name `{name}`"),
        ));
    }
    names.push(name.to_string());
    Ok(())
}

fn lookup(line: usize, table: &HashMap<&str, usize>, name: &str) -> Result<usize, ParseError> {
    table
        .get(name)
        .copied()
        .ok_or_else(|| ParseError::DanglingName {
            line,
            name: name.to_string(),
        })
}

pub fn parse_instance(text: &str) -> Result<WorkflowInstance, ParseError> {
    let lines: Vec<(usize, Vec<&str>)> = content_lines(text).collect();
    let Some((hline, header)) = lines.first() else {
        return Err(ParseError::syntax(1, "missing `p wsp` header"));
    };
    if header.len() != 4 || header[0] != "p" || header[1] != "wsp" {
        return Err(ParseError::syntax(
            *hline,
            "first line must be `p wsp <n_users> <k_steps>`",
        ));
    }
    let n = parse_count(*hline, header[2])?;
    let k = parse_count(*hline, header[3])?;

    let mut user_table = HashMap::new();
    let mut step_table = HashMap::new();
    let mut user_names = Vec::new();
    let mut step_names = Vec::new();
    for (line, tokens) in &lines[1..] {
        match tokens[0] {
            "u" => declare(*line, "user", tokens, &mut user_table, &mut user_names)?,
            "s" => declare(*line, "step", tokens, &mut step_table, &mut step_names)?,
            "a" | "o" | "c" => {}
            "p" => return Err(ParseError::syntax(*line, "repeated `p` line")),
            other => {
                return Err(ParseError::syntax(
                    *line,
                    format!("unknown line tag `{other}`"),
                ))
            }
        }
    }
    if user_names.len() != n {
        return Err(ParseError::syntax(
            *hline,
            format!("header declares {n} users, file lists {}", user_names.len()),
        ));
    }
    if step_names.len() != k {
        return Err(ParseError::syntax(
            *hline,
            format!("header declares {k} steps, file lists {}", step_names.len()),
        ));
    }

    let mut auth: Vec<Vec<UserId>> = vec![Vec::new(); k];
    let mut arcs = Vec::new();
    let mut constraints = Vec::new();
    for (line, tokens) in &lines[1..] {
        let line = *line;
        match tokens[0] {
            "a" => {
                if tokens.len() < 2 {
                    return Err(ParseError::syntax(
                        line,
                        "authorization line needs a step name",
                    ));
                }
                let s = lookup(line, &step_table, tokens[1])?;
                for name in &tokens[2..] {
                    auth[s].push(UserId(lookup(line, &user_table, name)?));
                }
            }
            "o" => {
                if tokens.len() != 3 {
                    return Err(ParseError::syntax(line, "order line takes two user names"));
                }
                let lo = lookup(line, &user_table, tokens[1])?;
                let hi = lookup(line, &user_table, tokens[2])?;
                arcs.push((UserId(lo), UserId(hi)));
            }
            "c" => {
                if tokens.len() != 4 {
                    return Err(ParseError::syntax(
                        line,
                        "constraint line is `c eq|neq|lt <step> <step>`",
                    ));
                }
                let kind = match tokens[1] {
                    "eq" => ConstraintKind::Eq,
                    "neq" => ConstraintKind::Neq,
                    "lt" => ConstraintKind::Lt,
                    other => {
                        return Err(ParseError::syntax(
                            line,
                            format!("unknown constraint kind `{other}`"),
                        ))
                    }
                };
                let s1 = lookup(line, &step_table, tokens[2])?;
                let s2 = lookup(line, &step_table, tokens[3])?;
                constraints.push(Constraint {
                    kind,
                    s1: StepId(s1),
                    s2: StepId(s2),
                });
            }
            _ => {}
        }
    }
    let users = UserPoset::from_arcs(n, &arcs).map_err(ParseError::CyclicOrder)?;
    let mut inst = WorkflowInstance::new(users, auth, constraints);
    inst.user_names = user_names;
    inst.step_names = step_names;
    Ok(inst)
}

/// Canonical text form; order arcs are written as the Hasse diagram.
pub fn serialize_instance(inst: &WorkflowInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p wsp {} {}", inst.num_users(), inst.num_steps());
    for u in &inst.user_names {
        let _ = writeln!(out, "u {u}");
    }
    for s in &inst.step_names {
        let _ = writeln!(out, "s {s}");
    }
    for (s, list) in inst.auth.iter().enumerate() {
        if list.is_empty() {
            continue;
        }
        out.push_str("a ");
        out.push_str(&inst.step_names[s]);
        for u in list {
            out.push(' ');
            out.push_str(&inst.user_names[u.0]);
        }
        out.push('\n');
    }
    for (lo, hi) in inst.users.cover_arcs() {
        let _ = writeln!(out, "o {} {}", inst.user_names[lo.0], inst.user_names[hi.0]);
    }
    for c in &inst.constraints {
        let _ = writeln!(
            out,
            "c {} {} {}",
            c.kind.keyword(),
            inst.step_names[c.s1.0],
            inst.step_names[c.s2.0]
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::Relation;

    const SMALL: &str = "\
p wsp 3 1
u Alice
u Bob
u Carol   # trailing comment
s Step
o Bob Alice
o Carol Alice
a Step Alice Bob Carol
";

    #[test]
    fn parses_small_hierarchy() {
        let inst = parse_instance(SMALL).unwrap();
        let [a, b, c] = ["Alice", "Bob", "Carol"].map(|n| inst.user_index(n).unwrap());
        assert!(inst.users.less(b, a));
        assert!(inst.users.less(c, a));
        assert_eq!(inst.users.relation(b, c), Relation::Inc);
        assert_eq!(inst.auth[0].len(), 3);
    }

    #[test]
    fn two_cycle_is_rejected() {
        let text = "p wsp 2 0\nu a\nu b\no a b\no b a\n";
        assert!(matches!(
            parse_instance(text),
            Err(ParseError::CyclicOrder(_))
        ));
    }

    #[test]
    fn dangling_names_report_line() {
        let text = "p wsp 1 1\nu a\ns x\n\na x zed\n";
        assert_eq!(
            parse_instance(text),
            Err(ParseError::DanglingName {
                line: 5,
                name: "zed".into()
            })
        );
    }

    #[test]
    fn syntax_errors() {
        let cases = [
            ("u a\np wsp 1 0\n", 1),
            ("p wsp 1 0\nu a\nq foo\n", 3),
            ("p wsp 1 0\nu a-b\n", 2),
            ("p wsp 2 0\nu a\n", 1),
            ("p wsp 1 2\nu a\ns x\ns y\nc le x y\n", 5),
            ("p wsp 1 0\nu a\nu a\n", 3),
        ];
        for (text, line) in cases {
            match parse_instance(text) {
                Err(ParseError::Syntax { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn serialization_is_canonical() {
        let text = "p wsp 3 2\nu x\nu y\nu z\ns s1\ns s2\no x y\no y z\no x z\na s1 z x\nc lt s1 s2\nc lt s1 s2\n";
        let inst = parse_instance(text).unwrap();
        let out = serialize_instance(&inst);
        assert_eq!(
            out,
            "p wsp 3 2\nu x\nu y\nu z\ns s1\ns s2\na s1 x z\no x y\no y z\nc lt s1 s2\n"
        );
        assert_eq!(parse_instance(&out).unwrap(), inst);
    }
}
