//! Parser for the set-description file format: one s-expression per file.
//!
//! Grammar:
//! `(interval 1/2^2 3/2^2)` | `(point 1/2^1)` | `(rational 1 3)` |
//! `(avoid 11)` | `(union e1 e2 ...)` | `(intersect e1 e2 ...)` |
//! `(escale)` | `(full)` | `(empty)`.

use crate::dyadic::{BinaryWord, DyadicRational};
use crate::error::Error;
use crate::treeset::SetDescription;

#[derive(Debug, PartialEq)]
enum Sexpr {
    Atom(String),
    List(Vec<Sexpr>),
}

fn tokenize(input: &str) -> Result<Vec<String>, Error> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in input.chars() {
        match c {
            '(' | ')' => {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
                tokens.push(c.to_string());
            }
            c if c.is_whitespace() => {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
            }
            c => current.push(c),
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    if tokens.is_empty() {
        return Err(Error::MalformedDescription("empty input".into()));
    }
    Ok(tokens)
}

fn parse_sexpr(tokens: &[String], pos: &mut usize) -> Result<Sexpr, Error> {
    let token = tokens
        .get(*pos)
        .ok_or_else(|| Error::MalformedDescription("unexpected end of input".into()))?;
    *pos += 1;
    match token.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos) {
                    Some(t) if t == ")" => {
                        *pos += 1;
                        return Ok(Sexpr::List(items));
                    }
                    Some(_) => items.push(parse_sexpr(tokens, pos)?),
                    None => {
                        return Err(Error::MalformedDescription("unbalanced parentheses".into()))
                    }
                }
            }
        }
        ")" => Err(Error::MalformedDescription("unexpected )".into())),
        atom => Ok(Sexpr::Atom(atom.to_string())),
    }
}

fn expect_atom(e: &Sexpr) -> Result<&str, Error> {
    match e {
        Sexpr::Atom(s) => Ok(s),
        Sexpr::List(_) => Err(Error::MalformedDescription("expected an atom".into())),
    }
}

fn to_description(e: &Sexpr) -> Result<SetDescription, Error> {
    let Sexpr::List(items) = e else {
        return Err(Error::MalformedDescription(
            "a description is a parenthesized form".into(),
        ));
    };
    let head = items
        .first()
        .ok_or_else(|| Error::MalformedDescription("empty form".into()))?;
    let head = expect_atom(head)?;
    let arity = |n: usize| -> Result<(), Error> {
        if items.len() - 1 == n {
            Ok(())
        } else {
            Err(Error::MalformedDescription(format!(
                "{head} takes {n} argument(s), got {}",
                items.len() - 1
            )))
        }
    };
    match head {
        "empty" => {
            arity(0)?;
            Ok(SetDescription::Empty)
        }
        "full" => {
            arity(0)?;
            Ok(SetDescription::Full)
        }
        "escale" => {
            arity(0)?;
            Ok(SetDescription::EScale)
        }
        "point" => {
            arity(1)?;
            let x: DyadicRational = expect_atom(&items[1])?.parse()?;
            Ok(SetDescription::Point(x))
        }
        "interval" => {
            arity(2)?;
            let lo: DyadicRational = expect_atom(&items[1])?.parse()?;
            let hi: DyadicRational = expect_atom(&items[2])?.parse()?;
            Ok(SetDescription::Interval(lo, hi))
        }
        "rational" => {
            arity(2)?;
            let parse_int = |s: &str| -> Result<u64, Error> {
                s.parse().map_err(|_| {
                    Error::MalformedDescription(format!("expected an integer, got {s:?}"))
                })
            };
            let p = parse_int(expect_atom(&items[1])?)?;
            let q = parse_int(expect_atom(&items[2])?)?;
            Ok(SetDescription::Rational(p, q))
        }
        "avoid" => {
            arity(1)?;
            let pattern: BinaryWord = expect_atom(&items[1])?.parse()?;
            Ok(SetDescription::Avoid(pattern))
        }
        "union" | "intersect" => {
            let operands: Result<Vec<_>, _> = items[1..].iter().map(to_description).collect();
            let operands = operands?;
            if operands.is_empty() {
                return Err(Error::MalformedDescription(format!(
                    "{head} needs at least one operand"
                )));
            }
            Ok(if head == "union" {
                SetDescription::Union(operands)
            } else {
                SetDescription::Intersect(operands)
            })
        }
        other => Err(Error::MalformedDescription(format!(
            "unknown form {other:?}"
        ))),
    }
}

/// Parses one set description; trailing input is rejected.
pub fn parse_description(input: &str) -> Result<SetDescription, Error> {
    let tokens = tokenize(input)?;
    let mut pos = 0;
    let expr = parse_sexpr(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(Error::MalformedDescription(format!(
            "trailing input after the first expression: {:?}",
            tokens[pos]
        )));
    }
    let desc = to_description(&expr)?;
    desc.validate()?;
    Ok(desc)
}
