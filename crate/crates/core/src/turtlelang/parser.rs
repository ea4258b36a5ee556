use std::fmt;

use super::ast::{kind, Ast, AstNode};

/// Malformed program text. Positions are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at {line}:{column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

const KEYWORDS: &[&str] =
    &["to", "end", "pendown", "move", "turn", "repeat", "set", "change", "ask", "call"];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Param(String),
    Int(String),
    Str(String),
    Open,
    Close,
    Plus,
    Star,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Param(p) => write!(f, "`:{p}`"),
            Tok::Int(i) => write!(f, "`{i}`"),
            Tok::Str(s) => write!(f, "string {s}"),
            Tok::Open => f.write_str("`[`"),
            Tok::Close => f.write_str("`]`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Star => f.write_str("`*`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_int(s: &str) -> bool {
    let digits = s.strip_prefix('-').unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

fn lex(src: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let mut out = Vec::new();
    for (lineno, line) in src.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let err = |message: String| SyntaxError { line: lineno + 1, column, message };
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c == '#' {
                break;
            }
            let start = i;
            let tok = match c {
                '[' => {
                    i += 1;
                    Tok::Open
                }
                ']' => {
                    i += 1;
                    Tok::Close
                }
                '+' => {
                    i += 1;
                    Tok::Plus
                }
                '*' => {
                    i += 1;
                    Tok::Star
                }
                '"' => {
                    let close = chars[i + 1..].iter().position(|&ch| ch == '"');
                    let Some(close) = close else {
                        return Err(err("unterminated string".into()));
                    };
                    let text: String = chars[i..i + close + 2].iter().collect();
                    i += close + 2;
                    Tok::Str(text)
                }
                _ => {
                    while i < chars.len()
                        && !chars[i].is_whitespace()
                        && !matches!(chars[i], '[' | ']' | '+' | '*' | '#' | '"')
                    {
                        i += 1;
                    }
                    let word: String = chars[start..i].iter().collect();
                    if let Some(p) = word.strip_prefix(':') {
                        if !is_ident(p) {
                            return Err(err(format!("invalid parameter `{word}`")));
                        }
                        Tok::Param(p.to_string())
                    } else if is_int(&word) {
                        Tok::Int(word)
                    } else if is_ident(&word) {
                        Tok::Word(word)
                    } else {
                        return Err(err(format!("invalid token `{word}`")));
                    }
                }
            };
            out.push(Spanned { tok, line: lineno + 1, column: start + 1 });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    eof: (usize, usize),
}

/// Where a statement list ends.
#[derive(Clone, Copy)]
enum Closer {
    Eof,
    End { line: usize, column: usize },
    Bracket { line: usize, column: usize },
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn error_at(&self, at: Option<&Spanned>, message: String) -> SyntaxError {
        let (line, column) = at.map(|s| (s.line, s.column)).unwrap_or(self.eof);
        SyntaxError { line, column, message }
    }

    fn program(&mut self) -> Result<AstNode, SyntaxError> {
        let items = self.stmts(Closer::Eof, true)?;
        Ok(AstNode::new(kind::PROGRAM, items))
    }

    fn stmts(&mut self, closer: Closer, top_level: bool) -> Result<Vec<AstNode>, SyntaxError> {
        let mut items = Vec::new();
        loop {
            let Some(next) = self.peek() else {
                return match closer {
                    Closer::Eof => Ok(items),
                    Closer::End { line, column } => Err(self.error_at(
                        None,
                        format!("missing `end` for procedure started at {line}:{column}"),
                    )),
                    Closer::Bracket { line, column } => Err(self.error_at(
                        None,
                        format!("unclosed `[` opened at {line}:{column}"),
                    )),
                };
            };
            match (&next.tok, closer) {
                (Tok::Close, Closer::Bracket { .. }) => {
                    self.pos += 1;
                    return Ok(items);
                }
                (Tok::Word(w), Closer::End { .. }) if w == "end" => {
                    self.pos += 1;
                    return Ok(items);
                }
                (Tok::Word(w), Closer::Bracket { line, column }) if w == "end" => {
                    return Err(self.error_at(
                        Some(next),
                        format!("unclosed `[` opened at {line}:{column}"),
                    ));
                }
                (Tok::Word(w), _) if w == "to" => {
                    if !top_level {
                        return Err(self.error_at(
                            Some(next),
                            "procedure definitions are only allowed at top level".into(),
                        ));
                    }
                    items.push(self.proc_def()?);
                }
                _ => items.push(self.stmt()?),
            }
        }
    }

    fn proc_def(&mut self) -> Result<AstNode, SyntaxError> {
        let to = self.bump().expect("peeked");
        let name = self.name("procedure name")?;
        let mut children = vec![AstNode::wrap(kind::NAME, name)];
        while let Some(Spanned { tok: Tok::Param(p), .. }) = self.peek() {
            children.push(AstNode::wrap(kind::PARAM, p.clone()));
            self.pos += 1;
        }
        let body = self.stmts(Closer::End { line: to.line, column: to.column }, false)?;
        children.push(AstNode::new(kind::BODY, body));
        Ok(AstNode::new(kind::PROC_DEF, children))
    }

    fn name(&mut self, what: &str) -> Result<String, SyntaxError> {
        match self.bump() {
            Some(Spanned { tok: Tok::Word(w), .. }) if !KEYWORDS.contains(&w.as_str()) => Ok(w),
            other => {
                let found = other.as_ref().map_or("end of input".to_string(), |s| s.tok.to_string());
                Err(self.error_at(other.as_ref(), format!("expected {what}, found {found}")))
            }
        }
    }

    fn stmt(&mut self) -> Result<AstNode, SyntaxError> {
        let head = self.bump().expect("caller peeked");
        let Tok::Word(word) = &head.tok else {
            return Err(self.error_at(Some(&head), format!("expected a statement, found {}", head.tok)));
        };
        let node = match word.as_str() {
            "pendown" => AstNode::leaf(kind::PEN_DOWN),
            "move" => AstNode::new(kind::MOVE, vec![self.expr()?]),
            "turn" => AstNode::new(kind::TURN, vec![self.expr()?]),
            "repeat" => {
                let count = self.expr()?;
                match self.bump() {
                    Some(Spanned { tok: Tok::Open, line, column }) => {
                        let body = self.stmts(Closer::Bracket { line, column }, false)?;
                        AstNode::new(kind::REPEAT, vec![count, AstNode::new(kind::BLOCK, body)])
                    }
                    other => {
                        return Err(self.error_at(other.as_ref(), "expected `[` after repeat count".into()))
                    }
                }
            }
            "set" | "change" => {
                let name = self.name("variable name")?;
                let value = self.expr()?;
                let k = if word == "set" { kind::SET } else { kind::CHANGE };
                AstNode::new(k, vec![AstNode::wrap(kind::NAME, name), value])
            }
            "ask" => {
                let prompt = match self.bump() {
                    Some(Spanned { tok: Tok::Str(s), .. }) => s,
                    other => return Err(self.error_at(other.as_ref(), "expected a quoted prompt".into())),
                };
                let name = self.name("variable name")?;
                AstNode::new(kind::ASK, vec![AstNode::wrap(kind::STR, prompt), AstNode::wrap(kind::NAME, name)])
            }
            "call" => {
                let name = self.name("procedure name")?;
                let mut children = vec![AstNode::wrap(kind::NAME, name)];
                while self.starts_expr() {
                    children.push(self.expr()?);
                }
                AstNode::new(kind::CALL, children)
            }
            "end" => return Err(self.error_at(Some(&head), "`end` without a procedure".into())),
            other => return Err(self.error_at(Some(&head), format!("unknown keyword `{other}`"))),
        };
        Ok(node)
    }

    fn starts_expr(&self) -> bool {
        match self.peek().map(|s| &s.tok) {
            Some(Tok::Int(_) | Tok::Param(_)) => true,
            Some(Tok::Word(w)) => !KEYWORDS.contains(&w.as_str()),
            _ => false,
        }
    }

    fn expr(&mut self) -> Result<AstNode, SyntaxError> {
        let mut lhs = self.term()?;
        while matches!(self.peek(), Some(Spanned { tok: Tok::Plus, .. })) {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = AstNode::new(kind::ADD, vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<AstNode, SyntaxError> {
        let mut lhs = self.atom()?;
        while matches!(self.peek(), Some(Spanned { tok: Tok::Star, .. })) {
            self.pos += 1;
            let rhs = self.atom()?;
            lhs = AstNode::new(kind::MUL, vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<AstNode, SyntaxError> {
        let tok = self.bump();
        match tok.as_ref().map(|s| &s.tok) {
            Some(Tok::Int(i)) => Ok(AstNode::wrap(kind::LIT, i.clone())),
            Some(Tok::Param(p)) => Ok(AstNode::wrap(kind::PARAM_REF, p.clone())),
            Some(Tok::Word(w)) if !KEYWORDS.contains(&w.as_str()) => Ok(AstNode::wrap(kind::VAR, w.clone())),
            Some(t) => Err(self.error_at(tok.as_ref(), format!("expected an expression, found {t}"))),
            None => Err(self.error_at(None, "expected an expression, found end of input".into())),
        }
    }
}

/// Parses turtle source into its [`Ast`].
pub fn parse(source: &str) -> Result<Ast, SyntaxError> {
    let toks = lex(source)?;
    let last_line = source.lines().count().max(1);
    let last_col = source.lines().last().map_or(0, |l| l.chars().count()) + 1;
    let mut parser = Parser { toks, pos: 0, eof: (last_line, last_col) };
    parser.program().map(Ast::new)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ast(src: &str) -> String {
        parse(src).unwrap().to_string()
    }

    #[test]
    fn single_pendown() {
        assert_eq!(ast("pendown"), "Program(PenDown)");
    }

    #[test]
    fn spiral_procedure() {
        assert_eq!(
            ast("to spiral :n pendown repeat :n [ move 10 turn 90 ] end"),
            "Program(ProcDef(Name(spiral), Param(n), Body(PenDown, Repeat(ParamRef(n), \
             Block(Move(Lit(10)), Turn(Lit(90)))))))"
        );
    }

    #[test]
    fn empty_program() {
        assert_eq!(ast(""), "Program");
        assert_eq!(ast("  # only a comment\n"), "Program");
    }

    #[test]
    fn expressions_respect_precedence() {
        assert_eq!(ast("move 1 + 2 * :x + len"), "Program(Move(Add(Add(Lit(1), Mul(Lit(2), ParamRef(x))), Var(len))))");
    }

    #[test]
    fn other_statements() {
        assert_eq!(
            ast("ask \"how many?\" rot\nset len 3 # side\nchange len -1\ncall spiral rot 2"),
            "Program(Ask(Str(\"how many?\"), Name(rot)), Set(Name(len), Lit(3)), \
             Change(Name(len), Lit(-1)), Call(Name(spiral), Var(rot), Lit(2)))"
        );
    }

    #[test]
    fn brackets_need_no_spaces() {
        assert_eq!(ast("repeat 2 [move 1]"), ast("repeat 2 [ move 1 ]"));
    }

    #[test]
    fn unclosed_block() {
        let e = parse("repeat 4 [ move 10").unwrap_err();
        assert!(e.message.contains("unclosed `[`"), "{e}");
        assert_eq!(e.line, 1);
    }

    #[test]
    fn unknown_keyword() {
        let e = parse("pendown\n  forward 10").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(e.message.contains("unknown keyword `forward`"));
    }

    #[test]
    fn missing_end() {
        let e = parse("to sq :n\n move :n").unwrap_err();
        assert!(e.message.contains("missing `end`"), "{e}");
    }

    #[test]
    fn end_inside_block_is_unclosed_bracket() {
        let e = parse("to f repeat 2 [ move 1 end").unwrap_err();
        assert!(e.message.contains("unclosed `[`"), "{e}");
    }

    #[test]
    fn nested_procedure_rejected() {
        assert!(parse("to f to g end end").is_err());
    }

    #[test]
    fn stray_tokens_rejected() {
        assert!(parse("]").is_err());
        assert!(parse("end").is_err());
        assert!(parse("move").is_err());
        assert!(parse("move +").is_err());
        assert!(parse("ask rot").is_err());
        assert!(parse("ask \"x").is_err());
        assert!(parse("set 3 4").is_err());
        assert!(parse("move 1$").is_err());
    }

    #[test]
    fn source_printer_round_trips() {
        let src = "to spiral :n\n  pendown\n  set len 5\n  repeat :n * 2 + 1 [\n    move len\n    turn 90\n    change len 5\n  ]\nend\nask \"n?\" k\ncall spiral k 3\n";
        let tree = parse(src).unwrap();
        assert_eq!(tree.to_source(), src);
        assert_eq!(parse(&tree.to_source()).unwrap(), tree);
    }
}
