use super::ast::{default_type, typing, Binder, Connective, Formula, SurfaceType};
use super::lexer::{tokenize, Token, TokenKind};
use super::theory::{ConstDecl, Definition, Statement, Theory};
use super::{ErrorKind, SourceError};
use crate::embed::{FrameClass, PredicateMode, QuantMode};
use crate::kernel::model::{ACCESS, EXISTS};

const RESERVED: &[&str] = &[
    "theory", "logic", "quant", "predicates", "const", "def", "axiom", "conjecture", "all", "ex", "box", "dia", "top", "bot",
];

/// Names a formula may refer to besides its own bound variables.
#[derive(Debug, Clone, Default)]
pub struct DeclContext {
    pub consts: Vec<ConstDecl>,
    pub defs: Vec<Definition>,
    /// Free variables allowed in the formula.
    pub free: Vec<(String, SurfaceType)>,
}

impl DeclContext {
    pub fn of(theory: &Theory) -> Self {
        Self {
            consts: theory.consts.clone(),
            defs: theory.defs.clone(),
            free: Vec::new(),
        }
    }

    pub fn with_free(mut self, name: impl Into<String>, ty: SurfaceType) -> Self {
        self.free.push((name.into(), ty));
        self
    }

    fn symbol_type(&self, name: &str) -> Option<SurfaceType> {
        self.consts
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.ty.clone())
            .or_else(|| self.defs.iter().find(|d| d.name == name).map(|d| d.ty.clone()))
    }
}

/// Parses a whole theory file.
pub fn parse_theory(text: &str) -> Result<Theory, SourceError> {
    let mut p = Parser::new(text, DeclContext::default())?;
    p.theory()
}

/// Parses a formula of type `wo` in the given declaration context.
pub fn parse_formula(text: &str, ctx: &DeclContext) -> Result<Formula, SourceError> {
    let mut p = Parser::new(text, ctx.clone())?;
    let start = p.peek().clone();
    let (f, ty) = p.formula()?;
    p.expect_eof()?;
    typing::expect_prop("a standalone formula", &ty).map_err(|m| p.sort_error(&start, m))?;
    Ok(f)
}

/// Parses a term of any surface type.
pub fn parse_term(text: &str, ctx: &DeclContext) -> Result<(Formula, SurfaceType), SourceError> {
    let mut p = Parser::new(text, ctx.clone())?;
    let out = p.formula()?;
    p.expect_eof()?;
    Ok(out)
}

/// Parses a surface type such as `(i>wo)>wo`.
pub fn parse_type(text: &str) -> Result<SurfaceType, SourceError> {
    let mut p = Parser::new(text, DeclContext::default())?;
    let ty = p.ty()?;
    p.expect_eof()?;
    Ok(ty)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    ctx: DeclContext,
    scope: Vec<(String, SurfaceType)>,
    defining: Option<String>,
}

type Typed = (Formula, SurfaceType);

impl Parser {
    fn new(text: &str, ctx: DeclContext) -> Result<Self, SourceError> {
        Ok(Self {
            tokens: tokenize(text)?,
            pos: 0,
            ctx,
            scope: Vec::new(),
            defining: None,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(s) if s == kw)
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek().kind == *kind
    }

    fn error_here(&self, message: impl Into<String>, expected: &[&str]) -> SourceError {
        let t = self.peek();
        SourceError::syntax(
            t.line,
            t.column,
            format!("{}, found {}", message.into(), t.kind.describe()),
            expected.iter().map(|s| s.to_string()).collect(),
        )
    }

    fn sort_error(&self, at: &Token, message: String) -> SourceError {
        SourceError {
            line: at.line,
            column: at.column,
            message,
            expected: vec![],
            kind: ErrorKind::Sort,
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Token, SourceError> {
        if self.at(&kind) {
            Ok(self.advance())
        } else {
            Err(self.error_here(format!("expected {}", kind.describe()), &[&kind.describe()]))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<Token, SourceError> {
        if self.at_keyword(kw) {
            Ok(self.advance())
        } else {
            Err(self.error_here(format!("expected `{kw}`"), &[&format!("`{kw}`")]))
        }
    }

    fn expect_eof(&mut self) -> Result<(), SourceError> {
        if self.at(&TokenKind::Eof) {
            Ok(())
        } else {
            Err(self.error_here("unexpected trailing input", &["end of input"]))
        }
    }

    fn name(&mut self, what: &str) -> Result<(String, Token), SourceError> {
        let tok = self.peek().clone();
        match &tok.kind {
            TokenKind::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                let s = s.clone();
                self.advance();
                Ok((s, tok))
            }
            _ => Err(self.error_here(format!("expected {what}"), &["identifier"])),
        }
    }

    // ---- theory level -------------------------------------------------

    fn theory(&mut self) -> Result<Theory, SourceError> {
        self.expect_keyword("theory")?;
        let (name, _) = self.name("a theory name")?;
        let mut logic = FrameClass::K;
        let mut quant = QuantMode::Possibilist;
        if self.at_keyword("logic") {
            self.advance();
            let tok = self.peek().clone();
            let (s, _) = self.name("a logic (K, KT, KB, S5)")?;
            logic = s
                .parse()
                .map_err(|m: String| SourceError::syntax(tok.line, tok.column, m, vec!["K".into(), "KT".into(), "KB".into(), "S5".into()]))?;
        }
        if self.at_keyword("quant") {
            self.advance();
            let tok = self.peek().clone();
            let (s, _) = self.name("a quantifier mode")?;
            quant = s.parse().map_err(|m: String| {
                SourceError::syntax(tok.line, tok.column, m, vec!["possibilist".into(), "actualist".into()])
            })?;
        }
        let mut predicates = PredicateMode::Rigid;
        if self.at_keyword("predicates") {
            self.advance();
            let tok = self.peek().clone();
            let (s, _) = self.name("a predicate mode")?;
            predicates = s.parse().map_err(|m: String| {
                SourceError::syntax(tok.line, tok.column, m, vec!["rigid".into(), "flexible".into()])
            })?;
        }
        let mut theory = Theory {
            name,
            logic,
            quant,
            predicates,
            consts: vec![],
            defs: vec![],
            axioms: vec![],
            conjectures: vec![],
        };
        loop {
            if self.at(&TokenKind::Eof) {
                break;
            } else if self.at_keyword("const") {
                self.advance();
                let (name, tok) = self.name("a constant name")?;
                self.check_symbol_free(&name, &tok)?;
                self.expect(TokenKind::Colon)?;
                let ty = self.ty()?;
                let decl = ConstDecl { name, ty };
                self.ctx.consts.push(decl.clone());
                theory.consts.push(decl);
            } else if self.at_keyword("def") {
                self.advance();
                let def = self.definition()?;
                self.ctx.defs.push(def.clone());
                theory.defs.push(def);
            } else if self.at_keyword("axiom") || self.at_keyword("conjecture") {
                let is_axiom = self.at_keyword("axiom");
                self.advance();
                let (name, tok) = self.name("a statement name")?;
                if theory.statement(&name).is_some() {
                    return Err(SourceError::duplicate(&tok, &name));
                }
                self.expect(TokenKind::Colon)?;
                let start = self.peek().clone();
                let (formula, ty) = self.formula()?;
                typing::expect_prop("a statement", &ty).map_err(|m| self.sort_error(&start, m))?;
                let st = Statement { name, formula };
                if is_axiom {
                    theory.axioms.push(st);
                } else {
                    theory.conjectures.push(st);
                }
            } else {
                return Err(self.error_here(
                    "expected a declaration",
                    &["`const`", "`def`", "`axiom`", "`conjecture`", "end of input"],
                ));
            }
        }
        Ok(theory)
    }

    fn check_symbol_free(&self, name: &str, tok: &Token) -> Result<(), SourceError> {
        if name == ACCESS || name == EXISTS {
            return Err(SourceError {
                line: tok.line,
                column: tok.column,
                message: format!("`{name}` is reserved for the accessibility/existence relation"),
                expected: vec![],
                kind: ErrorKind::DuplicateName,
            });
        }
        if self.ctx.symbol_type(name).is_some() {
            return Err(SourceError::duplicate(tok, name));
        }
        Ok(())
    }

    fn definition(&mut self) -> Result<Definition, SourceError> {
        let (name, tok) = self.name("a definition name")?;
        self.check_symbol_free(&name, &tok)?;
        let mut params = Vec::new();
        while !self.at(&TokenKind::Define) {
            let b = if self.at(&TokenKind::LParen) {
                self.advance();
                let (n, _) = self.name("a parameter name")?;
                self.expect(TokenKind::Colon)?;
                let ty = self.ty()?;
                self.expect(TokenKind::RParen)?;
                Binder::new(n, ty)
            } else {
                let (n, ntok) = self.name("a parameter or `:=`")?;
                let ty = default_type(&n).ok_or_else(|| Self::needs_annotation(&ntok, &n))?;
                Binder::new(n, ty)
            };
            params.push(b);
        }
        self.expect(TokenKind::Define)?;
        self.defining = Some(name.clone());
        self.scope = params.iter().map(|b| (b.name.clone(), b.ty.clone())).collect();
        let body = self.formula();
        self.scope.clear();
        self.defining = None;
        let (body, body_ty) = body?;
        let ty = params
            .iter()
            .rev()
            .fold(body_ty, |acc, b| SurfaceType::arrow(b.ty.clone(), acc));
        Ok(Definition { name, params, body, ty })
    }

    fn needs_annotation(tok: &Token, name: &str) -> SourceError {
        SourceError::syntax(
            tok.line,
            tok.column,
            format!("variable `{name}` has no default type; annotate it as `{name}:type`"),
            vec!["`:`".into()],
        )
    }

    // ---- types ----------------------------------------------------------

    fn ty(&mut self) -> Result<SurfaceType, SourceError> {
        let lhs = self.ty_atom()?;
        if self.at(&TokenKind::Gt) {
            self.advance();
            let rhs = self.ty()?;
            Ok(SurfaceType::arrow(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn ty_atom(&mut self) -> Result<SurfaceType, SourceError> {
        if self.at(&TokenKind::LParen) {
            self.advance();
            let t = self.ty()?;
            self.expect(TokenKind::RParen)?;
            return Ok(t);
        }
        let expected = ["`i`", "`wo`", "`coll`", "`(`"];
        match &self.peek().kind {
            TokenKind::Ident(s) if s == "i" => {
                self.advance();
                Ok(SurfaceType::Indiv)
            }
            TokenKind::Ident(s) if s == "wo" => {
                self.advance();
                Ok(SurfaceType::Prop)
            }
            TokenKind::Ident(s) if s == "coll" => {
                self.advance();
                Ok(SurfaceType::collection())
            }
            _ => Err(self.error_here("expected a type", &expected)),
        }
    }

    // ---- formulas -------------------------------------------------------

    fn formula(&mut self) -> Result<Typed, SourceError> {
        self.iff()
    }

    fn connective(&self, c: Connective, op: &Token, a: Typed, b: Typed) -> Result<Typed, SourceError> {
        for side in [&a.1, &b.1] {
            typing::expect_prop(&format!("`{}`", c.symbol()), side).map_err(|m| self.sort_error(op, m))?;
        }
        Ok((Formula::binary(c, a.0, b.0), SurfaceType::Prop))
    }

    fn iff(&mut self) -> Result<Typed, SourceError> {
        let lhs = self.imp()?;
        if self.at(&TokenKind::DoubleArrow) {
            let op = self.advance();
            let rhs = self.iff()?;
            return self.connective(Connective::Iff, &op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Typed, SourceError> {
        let lhs = self.or()?;
        if self.at(&TokenKind::Arrow) {
            let op = self.advance();
            let rhs = self.imp()?;
            return self.connective(Connective::Implies, &op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Typed, SourceError> {
        let mut lhs = self.and()?;
        while self.at(&TokenKind::Bar) {
            let op = self.advance();
            let rhs = self.and()?;
            lhs = self.connective(Connective::Or, &op, lhs, rhs)?;
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Typed, SourceError> {
        let mut lhs = self.unary()?;
        while self.at(&TokenKind::Amp) {
            let op = self.advance();
            let rhs = self.unary()?;
            lhs = self.connective(Connective::And, &op, lhs, rhs)?;
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Typed, SourceError> {
        let tok = self.peek().clone();
        let wrap: fn(Formula) -> Formula = match &tok.kind {
            TokenKind::Tilde => Formula::not,
            TokenKind::Ident(s) if s == "box" => Formula::nec,
            TokenKind::Ident(s) if s == "dia" => Formula::poss,
            TokenKind::Ident(s) if s == "all" || s == "ex" => return self.binder(),
            TokenKind::Backslash => return self.binder(),
            _ => return self.equality(),
        };
        self.advance();
        let (f, ty) = self.unary()?;
        let what = match &tok.kind {
            TokenKind::Tilde => "`~`".to_string(),
            TokenKind::Ident(s) => format!("`{s}`"),
            _ => unreachable!(),
        };
        typing::expect_prop(&what, &ty).map_err(|m| self.sort_error(&tok, m))?;
        Ok((wrap(f), SurfaceType::Prop))
    }

    fn binder(&mut self) -> Result<Typed, SourceError> {
        let tok = self.advance();
        let (name, ntok) = self.name("a bound variable")?;
        let ty = if self.at(&TokenKind::Colon) {
            self.advance();
            self.ty()?
        } else {
            default_type(&name).ok_or_else(|| Self::needs_annotation(&ntok, &name))?
        };
        self.expect(TokenKind::Dot)?;
        self.scope.push((name.clone(), ty.clone()));
        let body = self.formula();
        self.scope.pop();
        let (body, body_ty) = body?;
        let b = Binder::new(name, ty.clone());
        match &tok.kind {
            TokenKind::Backslash => Ok((Formula::lam(b, body), SurfaceType::arrow(ty, body_ty))),
            TokenKind::Ident(q) => {
                typing::expect_prop(&format!("`{q}`"), &body_ty).map_err(|m| self.sort_error(&tok, m))?;
                let f = if q == "all" { Formula::forall(b, body) } else { Formula::exists(b, body) };
                Ok((f, SurfaceType::Prop))
            }
            _ => unreachable!(),
        }
    }

    fn equality(&mut self) -> Result<Typed, SourceError> {
        let lhs = self.application()?;
        if self.at(&TokenKind::Eq) || self.at(&TokenKind::Neq) {
            let op = self.advance();
            let rhs = self.application()?;
            typing::equality(&lhs.1, &rhs.1).map_err(|m| self.sort_error(&op, m))?;
            let f = if op.kind == TokenKind::Eq {
                Formula::eq(lhs.0, rhs.0)
            } else {
                Formula::neq(lhs.0, rhs.0)
            };
            return Ok((f, SurfaceType::Prop));
        }
        Ok(lhs)
    }

    fn starts_atom(&self) -> bool {
        match &self.peek().kind {
            TokenKind::LParen => true,
            TokenKind::Ident(s) => s == "top" || s == "bot" || !RESERVED.contains(&s.as_str()),
            _ => false,
        }
    }

    fn application(&mut self) -> Result<Typed, SourceError> {
        let head_tok = self.peek().clone();
        let (mut f, mut ty) = self.atom()?;
        while self.starts_atom() {
            let (a, aty) = self.atom()?;
            ty = typing::application(&ty, &aty).map_err(|m| self.sort_error(&head_tok, m))?;
            f = Formula::app(f, a);
        }
        Ok((f, ty))
    }

    fn atom(&mut self) -> Result<Typed, SourceError> {
        let tok = self.peek().clone();
        match &tok.kind {
            TokenKind::LParen => {
                self.advance();
                let inner = self.formula()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            TokenKind::Ident(s) if s == "top" => {
                self.advance();
                Ok((Formula::Top, SurfaceType::Prop))
            }
            TokenKind::Ident(s) if s == "bot" => {
                self.advance();
                Ok((Formula::Bot, SurfaceType::Prop))
            }
            TokenKind::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                let s = s.clone();
                self.advance();
                self.resolve(&s, &tok)
            }
            _ => Err(self.error_here(
                "expected a formula",
                &["identifier", "`top`", "`bot`", "`(`", "`~`", "`box`", "`dia`", "`all`", "`ex`", "`\\`"],
            )),
        }
    }

    fn resolve(&self, name: &str, tok: &Token) -> Result<Typed, SourceError> {
        if let Some((_, ty)) = self.scope.iter().rev().find(|(n, _)| n == name) {
            return Ok((Formula::var(name), ty.clone()));
        }
        if let Some((_, ty)) = self.ctx.free.iter().find(|(n, _)| n == name) {
            return Ok((Formula::var(name), ty.clone()));
        }
        if let Some(ty) = self.ctx.symbol_type(name) {
            return Ok((Formula::sym(name), ty));
        }
        if self.defining.as_deref() == Some(name) {
            return Err(SourceError {
                line: tok.line,
                column: tok.column,
                message: format!("definition `{name}` refers to itself"),
                expected: vec![],
                kind: ErrorKind::RecursiveDefinition,
            });
        }
        Err(SourceError {
            line: tok.line,
            column: tok.column,
            message: format!("unknown name `{name}`"),
            expected: vec![],
            kind: ErrorKind::UnboundName,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Quantifier;

    fn scott_ctx() -> DeclContext {
        let t = parse_theory(
            "theory t const P : (i>wo)>wo
             def G x := all ph. P ph -> ph x",
        )
        .unwrap();
        DeclContext::of(&t)
    }

    #[test]
    fn one_line_theory() {
        let t = parse_theory(
            r"theory t logic K quant possibilist const P : (i>wo)>wo axiom a1 : ~ P (\x. ~ (x = x))",
        )
        .unwrap();
        assert_eq!(t.axioms.len(), 1);
        assert_eq!(t.logic, FrameClass::K);
        let x = Binder::new("x", SurfaceType::Indiv);
        let expected = Formula::not(Formula::app(
            Formula::sym("P"),
            Formula::lam(x, Formula::not(Formula::eq(Formula::var("x"), Formula::var("x")))),
        ));
        assert_eq!(t.axioms[0].formula, expected);
    }

    #[test]
    fn empty_input_fails_at_origin() {
        let e = parse_theory("").unwrap_err();
        assert_eq!((e.line, e.column), (1, 1));
        assert!(e.expected.contains(&"`theory`".to_string()));
    }

    #[test]
    fn undeclared_name_in_definition() {
        let e = parse_theory("theory t\nconst P : (i>wo)>wo\ndef G x := Q x").unwrap_err();
        assert_eq!(e.kind, ErrorKind::UnboundName);
        assert!(e.message.contains('Q'));
        assert_eq!((e.line, e.column), (3, 12));
    }

    #[test]
    fn recursive_and_duplicate_names() {
        let e = parse_theory("theory t def D := ~ D").unwrap_err();
        assert_eq!(e.kind, ErrorKind::RecursiveDefinition);
        let e = parse_theory("theory t const P : wo const P : i").unwrap_err();
        assert_eq!(e.kind, ErrorKind::DuplicateName);
        let e = parse_theory("theory t axiom A : top conjecture A : bot").unwrap_err();
        assert_eq!(e.kind, ErrorKind::DuplicateName);
        let e = parse_theory("theory t const R : wo").unwrap_err();
        assert_eq!(e.kind, ErrorKind::DuplicateName);
    }

    #[test]
    fn modal_prefixes() {
        let ctx = scott_ctx();
        let f = parse_formula("box (ex x. G x)", &ctx).unwrap();
        let body = Formula::exists(
            Binder::new("x", SurfaceType::Indiv),
            Formula::app(Formula::sym("G"), Formula::var("x")),
        );
        assert_eq!(f, Formula::nec(body.clone()));
        assert_eq!(parse_formula("dia (ex x. G x)", &ctx).unwrap(), Formula::poss(body));
    }

    #[test]
    fn lemma_one_shape() {
        let ctx = scott_ctx();
        let f = parse_formula(r"all ph. (P ph & ~(ex x. ph x)) -> P (\x. ~(x = x))", &ctx).unwrap();
        let ph = || Formula::var("ph");
        let x = || Formula::var("x");
        let expected = Formula::forall(
            Binder::new("ph", SurfaceType::property()),
            Formula::implies(
                Formula::and(
                    Formula::app(Formula::sym("P"), ph()),
                    Formula::not(Formula::exists(Binder::new("x", SurfaceType::Indiv), Formula::app(ph(), x()))),
                ),
                Formula::app(
                    Formula::sym("P"),
                    Formula::lam(Binder::new("x", SurfaceType::Indiv), Formula::not(Formula::eq(x(), x()))),
                ),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn precedence() {
        let ctx = DeclContext::default()
            .with_free("a", SurfaceType::Prop)
            .with_free("b", SurfaceType::Prop)
            .with_free("c", SurfaceType::Prop);
        let v = Formula::var;
        assert_eq!(
            parse_formula("~ a & b | c -> a <-> b", &ctx).unwrap(),
            Formula::iff(
                Formula::implies(Formula::or(Formula::and(Formula::not(v("a")), v("b")), v("c")), v("a")),
                v("b")
            )
        );
        assert_eq!(
            parse_formula("a -> b -> c", &ctx).unwrap(),
            Formula::implies(v("a"), Formula::implies(v("b"), v("c")))
        );
        assert_eq!(
            parse_formula("a & all s. s -> b", &ctx).unwrap(),
            Formula::and(
                v("a"),
                Formula::forall(Binder::new("s", SurfaceType::Prop), Formula::implies(v("s"), v("b")))
            )
        );
    }

    #[test]
    fn sort_errors_have_locations() {
        let ctx = scott_ctx();
        let e = parse_formula("box G", &ctx).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Sort);
        assert_eq!((e.line, e.column), (1, 1));
        let e = parse_formula("P (\\x. x)", &ctx).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Sort);
    }

    #[test]
    fn annotations() {
        let f = parse_formula("all q:wo. q -> box q", &DeclContext::default()).unwrap();
        assert!(matches!(f, Formula::Quant(Quantifier::Forall, Binder { ref ty, .. }, _) if *ty == SurfaceType::Prop));
        let e = parse_formula("all q. q", &DeclContext::default()).unwrap_err();
        assert!(e.message.contains("annotate"));
        assert_eq!(parse_type("coll").unwrap(), SurfaceType::collection());
        assert_eq!(parse_type("i>i>wo").unwrap(), SurfaceType::arrow(SurfaceType::Indiv, SurfaceType::property()));
    }

    #[test]
    fn trailing_garbage() {
        assert!(parse_formula("top )", &DeclContext::default()).is_err());
    }
}
