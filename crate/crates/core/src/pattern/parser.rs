use super::lexer::{tokenize, Tok, Token};
use super::{
    is_valid_label, Attr, AttrTest, Direction, NodeConstraint, PatternAst, PatternError, PatternErrorKind, RelationOp,
    MAX_DEPTH,
};

/// Parses pattern source into an AST rooted at the anchor node.
pub fn parse_pattern(source: &str) -> Result<PatternAst, PatternError> {
    let tokens = tokenize(source)?;
    if tokens.is_empty() {
        return Err(PatternError::new(0, PatternErrorKind::Empty));
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        end: source.len(),
    };
    let ast = p.pattern(0)?;
    if let Some(t) = p.peek() {
        let kind = if t.tok == Tok::RParen {
            PatternErrorKind::Unbalanced(')')
        } else {
            PatternErrorKind::Trailing
        };
        return Err(PatternError::new(t.offset, kind));
    }
    Ok(ast)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

fn describe(tok: Option<&Token>) -> String {
    match tok.map(|t| &t.tok) {
        None => "end of input".into(),
        Some(Tok::LBrace) => "'{'".into(),
        Some(Tok::RBrace) => "'}'".into(),
        Some(Tok::LParen) => "'('".into(),
        Some(Tok::RParen) => "')'".into(),
        Some(Tok::Lt) => "'<'".into(),
        Some(Tok::Gt) => "'>'".into(),
        Some(Tok::Colon) => "':'".into(),
        Some(Tok::Comma) => "','".into(),
        Some(Tok::Ident(s)) => format!("{s:?}"),
        Some(Tok::Regex(_)) => "regex".into(),
    }
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expected(&self, expected: &'static str) -> PatternError {
        PatternError::new(
            self.offset(),
            PatternErrorKind::Expected {
                expected,
                found: describe(self.peek()),
            },
        )
    }

    fn pattern(&mut self, depth: usize) -> Result<PatternAst, PatternError> {
        if depth > MAX_DEPTH {
            return Err(PatternError::new(self.offset(), PatternErrorKind::TooDeep));
        }
        let node = self.node()?;
        let mut ast = PatternAst::leaf(node);
        while let Some(direction) = self.peek().and_then(|t| match t.tok {
            Tok::Lt => Some(Direction::DependentOf),
            Tok::Gt => Some(Direction::GovernorOf),
            _ => None,
        }) {
            self.bump();
            let label = self.label()?;
            let target = self.target(depth + 1)?;
            ast.children.push((RelationOp { direction, label }, target));
        }
        Ok(ast)
    }

    fn target(&mut self, depth: usize) -> Result<PatternAst, PatternError> {
        match self.peek().map(|t| &t.tok) {
            Some(Tok::LParen) => {
                let open = self.bump().expect("peeked").offset;
                if depth > MAX_DEPTH {
                    return Err(PatternError::new(open, PatternErrorKind::TooDeep));
                }
                let inner = self.pattern(depth)?;
                match self.peek().map(|t| &t.tok) {
                    Some(Tok::RParen) => {
                        self.bump();
                        Ok(inner)
                    }
                    None => Err(PatternError::new(open, PatternErrorKind::Unbalanced('('))),
                    Some(_) => Err(self.expected("')'")),
                }
            }
            Some(Tok::LBrace) => self.pattern(depth),
            _ => Err(self.expected("node or '('")),
        }
    }

    fn label(&mut self) -> Result<Option<String>, PatternError> {
        let Some(Token {
            tok: Tok::Ident(first),
            offset,
        }) = self.peek().cloned()
        else {
            return Ok(None);
        };
        self.bump();
        let mut label = first;
        if matches!(self.peek().map(|t| &t.tok), Some(Tok::Colon)) {
            self.bump();
            match self.bump() {
                Some(Token {
                    tok: Tok::Ident(second),
                    ..
                }) => {
                    label.push(':');
                    label.push_str(&second);
                }
                _ => {
                    label.push(':');
                    return Err(PatternError::new(offset, PatternErrorKind::BadLabel(label)));
                }
            }
        }
        if !is_valid_label(&label) {
            return Err(PatternError::new(offset, PatternErrorKind::BadLabel(label)));
        }
        Ok(Some(label))
    }

    fn node(&mut self) -> Result<NodeConstraint, PatternError> {
        let open = match self.peek().map(|t| &t.tok) {
            Some(Tok::LBrace) => self.bump().expect("peeked").offset,
            _ => return Err(self.expected("'{'")),
        };
        let mut node = NodeConstraint::wildcard();
        if matches!(self.peek().map(|t| &t.tok), Some(Tok::RBrace)) {
            self.bump();
            return Ok(node);
        }
        loop {
            let (name, at) = match self.bump() {
                Some(Token {
                    tok: Tok::Ident(name),
                    offset,
                }) => (name, offset),
                None => return Err(PatternError::new(open, PatternErrorKind::Unbalanced('{'))),
                Some(_) => {
                    self.pos -= 1;
                    return Err(self.expected("attribute name"));
                }
            };
            let attr = Attr::from_name(&name)
                .ok_or_else(|| PatternError::new(at, PatternErrorKind::UnknownAttribute(name)))?;
            if node.tests.iter().any(|t| t.attr == attr) {
                return Err(PatternError::new(at, PatternErrorKind::DuplicateAttribute(attr)));
            }
            match self.bump().map(|t| t.tok) {
                Some(Tok::Colon) => {}
                None => return Err(PatternError::new(open, PatternErrorKind::Unbalanced('{'))),
                Some(_) => {
                    self.pos -= 1;
                    return Err(self.expected("':'"));
                }
            }
            let (body, at) = match self.bump() {
                Some(Token {
                    tok: Tok::Regex(body),
                    offset,
                }) => (body, offset),
                None => return Err(PatternError::new(open, PatternErrorKind::Unbalanced('{'))),
                Some(_) => {
                    self.pos -= 1;
                    return Err(self.expected("/regex/"));
                }
            };
            let test = AttrTest::new(attr, body).map_err(|kind| PatternError::new(at, kind))?;
            node.tests.push(test);
            match self.bump().map(|t| t.tok) {
                Some(Tok::Comma) => continue,
                Some(Tok::RBrace) => return Ok(node),
                None => return Err(PatternError::new(open, PatternErrorKind::Unbalanced('{'))),
                Some(_) => {
                    self.pos -= 1;
                    return Err(self.expected("',' or '}'"));
                }
            }
        }
    }
}
