//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr    := term (('+'|'-') term)*
//! term    := factor (('*'|'/') factor)*
//! factor  := '-' factor | atom ('^' ['-'] integer)?
//! atom    := 'z' | number | 'i' | '(' literal ')' | '(' expr ')'
//!          | func '(' expr ')' | builtin
//! func    := exp | log | sin | cos | tan | sqrt
//! builtin := koebe | identity | mobius(lit, lit, lit, lit) | tan_scaled(lit)
//!          | koebe_shear(lit)
//!          | compose(expr, expr)
//! literal := ['-'] real [('+'|'-') imag] | ['-'] imag
//! ```
//!
//! A number immediately followed by `i` is imaginary (`2i`, `0.5i`).

use num_complex::Complex64;

use super::{Builtin, Expr, Func};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        let start = i;
        let single = match ch {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, offset: start });
            i += 1;
            continue;
        }
        if ch.is_ascii_digit() || ch == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent part, only when followed by digits
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lexeme = &text[start..i];
            let value: f64 = lexeme.parse().map_err(|_| Error::Syntax {
                offset: start,
                message: format!("malformed number `{lexeme}`"),
            })?;
            let imaginary = i < bytes.len()
                && bytes[i] == b'i'
                && !bytes.get(i + 1).is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_');
            if imaginary {
                i += 1;
                out.push(Token { tok: Tok::Imag(value), offset: start });
            } else {
                out.push(Token { tok: Tok::Num(value), offset: start });
            }
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(text[start..i].to_string()), offset: start });
            continue;
        }
        let bad = text[start..].chars().next().unwrap_or('?');
        return Err(Error::Syntax { offset: start, message: format!("unexpected character `{bad}`") });
    }
    out.push(Token { tok: Tok::End, offset: text.len() });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let idx = (self.pos + k).min(self.tokens.len() - 1);
        &self.tokens[idx].tok
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].offset
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { offset: self.offset(), message: message.into() })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = lhs + self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    lhs = lhs - self.term()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = lhs * self.factor()?;
                }
                Tok::Slash => {
                    self.bump();
                    lhs = lhs / self.factor()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-self.factor()?);
        }
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let negative = if *self.peek() == Tok::Minus {
                self.bump();
                true
            } else {
                false
            };
            let n = match self.peek() {
                Tok::Num(v) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => *v as i32,
                _ => return self.error("expected integer exponent"),
            };
            self.bump();
            return Ok(base.powi(if negative { -n } else { n }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let offset = self.offset();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::real(v)),
            Tok::Imag(v) => Ok(Expr::Const(Complex64::new(0.0, v))),
            Tok::LParen => {
                let save = self.pos;
                if let Ok(c) = self.literal() {
                    if *self.peek() == Tok::RParen {
                        self.bump();
                        return Ok(Expr::Const(c));
                    }
                }
                self.pos = save;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => self.named(&name, offset),
            Tok::End => {
                self.pos = self.tokens.len() - 1;
                Err(Error::Syntax { offset, message: "unexpected end of input".into() })
            }
            other => Err(Error::Syntax { offset, message: format!("unexpected token {other:?}") }),
        }
    }

    /// `'(' literal ')'` with a real literal.
    fn real_argument(&mut self, name: &str) -> Result<f64> {
        self.expect(Tok::LParen, "`(`")?;
        let at = self.offset();
        let c = self.literal()?;
        self.expect(Tok::RParen, "`)`")?;
        if c.im != 0.0 {
            return Err(Error::Syntax { offset: at, message: format!("{name} needs a real constant") });
        }
        Ok(c.re)
    }

    fn named(&mut self, name: &str, offset: usize) -> Result<Expr> {
        match name {
            "z" => return Ok(Expr::Var),
            "i" => return Ok(Expr::Const(Complex64::new(0.0, 1.0))),
            "koebe" => return Ok(Expr::koebe()),
            "identity" => return Ok(Expr::identity()),
            _ => {}
        }
        if let Some(func) = Func::from_name(name) {
            self.expect(Tok::LParen, "`(`")?;
            let arg = self.expr()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(Expr::func(func, arg));
        }
        match name {
            "mobius" => {
                self.expect(Tok::LParen, "`(`")?;
                let mut args = [Complex64::new(0.0, 0.0); 4];
                for (k, slot) in args.iter_mut().enumerate() {
                    if k > 0 {
                        self.expect(Tok::Comma, "`,`")?;
                    }
                    *slot = self.literal()?;
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::Builtin(Builtin::mobius(args[0], args[1], args[2], args[3])?))
            }
            "tan_scaled" => Ok(Expr::Builtin(Builtin::tan_scaled(self.real_argument(name)?)?)),
            "koebe_shear" => Ok(Expr::Builtin(Builtin::koebe_shear(self.real_argument(name)?)?)),
            "compose" => {
                self.expect(Tok::LParen, "`(`")?;
                let outer = self.expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::compose(outer, inner))
            }
            _ => Err(Error::UnknownIdentifier { name: name.to_string(), offset }),
        }
    }

    fn signed_part(&mut self) -> Result<Option<(f64, bool)>> {
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let sign = if negative { -1.0 } else { 1.0 };
        let part = match self.peek().clone() {
            Tok::Num(v) => Some((sign * v, false)),
            Tok::Imag(v) => Some((sign * v, true)),
            Tok::Ident(ref s) if s == "i" => Some((sign, true)),
            _ => None,
        };
        if part.is_some() {
            self.bump();
        }
        Ok(part)
    }

    fn literal(&mut self) -> Result<Complex64> {
        let Some((first, first_imag)) = self.signed_part()? else {
            return self.error("expected numeric literal");
        };
        if first_imag {
            return Ok(Complex64::new(0.0, first));
        }
        let negative = match self.peek() {
            Tok::Plus => false,
            Tok::Minus => true,
            _ => return Ok(Complex64::new(first, 0.0)),
        };
        let imag = match self.peek_at(1) {
            Tok::Imag(v) => *v,
            Tok::Ident(s) if s == "i" => 1.0,
            _ => return Ok(Complex64::new(first, 0.0)),
        };
        self.bump();
        self.bump();
        Ok(Complex64::new(first, if negative { -imag } else { imag }))
    }
}

/// Parses an expression in the variable `z`.
pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { tokens: lex(text)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.error("unexpected trailing input");
    }
    Ok(e)
}

/// Parses a bare complex literal such as `0.3+0.1i`, `-2`, `i`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let mut p = Parser { tokens: lex(text)?, pos: 0 };
    let c = p.literal()?;
    if *p.peek() != Tok::End {
        return p.error("unexpected trailing input");
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::format_complex;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bare_variable() {
        assert_eq!(parse("z").unwrap(), Expr::Var);
    }

    #[test]
    fn unterminated_call_reports_offset() {
        assert_eq!(
            parse("tan("),
            Err(Error::Syntax { offset: 4, message: "unexpected end of input".into() })
        );
    }

    #[test]
    fn unknown_identifier() {
        assert_eq!(
            parse("z + w"),
            Err(Error::UnknownIdentifier { name: "w".into(), offset: 4 })
        );
    }

    #[test]
    fn degenerate_mobius_is_a_parse_error() {
        assert_eq!(parse("mobius(1, 2, 2, 4)"), Err(Error::DegenerateMobius));
    }

    #[test]
    fn precedence_and_unary_minus() {
        let e = parse("-z^2 + 3*z").unwrap();
        let want = -(Expr::Var.powi(2)) + Expr::real(3.0) * Expr::Var;
        assert_eq!(e, want);
    }

    #[test]
    fn literal_forms() {
        assert_eq!(parse_complex("0.3+0.1i").unwrap(), c(0.3, 0.1));
        assert_eq!(parse_complex("-1-i").unwrap(), c(-1.0, -1.0));
        assert_eq!(parse_complex("-2.5i").unwrap(), c(0.0, -2.5));
        assert_eq!(parse_complex("1e-3").unwrap(), c(1e-3, 0.0));
        assert!(parse_complex("1+").is_err());
        assert_eq!(parse("(1+2i)").unwrap(), Expr::Const(c(1.0, 2.0)));
        // outside parentheses the same text is a sum
        assert_eq!(parse("1+2i").unwrap(), Expr::real(1.0) + Expr::Const(c(0.0, 2.0)));
    }

    #[test]
    fn builtins_parse() {
        assert_eq!(parse("koebe").unwrap(), Expr::koebe());
        assert_eq!(parse("tan_scaled(10)").unwrap(), Expr::tan_scaled(10.0).unwrap());
        assert_eq!(
            parse("mobius(1, 0.5, 0.5, 1)").unwrap(),
            Expr::mobius(c(1.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(1.0, 0.0)).unwrap()
        );
        assert!(parse("tan_scaled(1+i)").is_err());
        assert!(parse("tan_scaled(-1)").is_err());
    }

    #[test]
    fn koebe_text_agrees_with_builtin_at_random_points() {
        let text = parse("z/(1-z)^2").unwrap();
        let builtin = Expr::koebe();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let r = 0.95 * rng.random::<f64>().sqrt();
            let th = rng.random::<f64>() * std::f64::consts::TAU;
            let z = Complex64::from_polar(r, th);
            let a = text.eval_jet(z, 3).unwrap();
            let b = builtin.eval_jet(z, 3).unwrap();
            for k in 0..=3 {
                let scale = b.coeffs()[k].norm().max(1.0);
                assert!((a.coeffs()[k] - b.coeffs()[k]).norm() <= 1e-12 * scale);
            }
        }
    }

    fn corpus() -> Vec<&'static str> {
        vec![
            "z",
            "koebe",
            "identity",
            "z/(1-z)^2",
            "tan_scaled(200)",
            "tan_scaled(4.934802200544679)",
            "koebe_shear(1.5)",
            "mobius(1, 2, 3, 4)",
            "mobius(0.3+0.1i, -2i, 1, 1-0.5i)",
            "exp(z) + log(1 + z)",
            "sin(z)*cos(z) - tan(z/2)",
            "sqrt(1 - z^2)",
            "-z^3",
            "(-z)^3",
            "(z^2)^3",
            "z^-2 + 1",
            "--z",
            "(1+2i)*z",
            "(-1)*z - (-2.5i)",
            "i*z",
            "2i + 3",
            "compose(koebe, mobius(1, 0.5, 0.5, 1))",
            "compose(exp(z), z^2/2 + z)",
            "exp(0.5*log(1 + z))",
            "1/(1 - z)",
            "z/(1 + z)^2 - z",
            "cos(z)^2 + sin(z)^2",
            "tan(z) / z",
            "0.1 + 0.2*z + 0.3*z^2 + 0.4*z^3",
            "log(2 - z) * sqrt(3 + z)",
            "((z))",
        ]
    }

    #[test]
    fn corpus_round_trips() {
        let list = corpus();
        assert_eq!(list.len(), 31);
        for text in list {
            let tree = parse(text).unwrap();
            let printed = tree.to_string();
            let again = parse(&printed).unwrap_or_else(|e| panic!("{printed}: {e}"));
            assert_eq!(again, tree, "{text} -> {printed}");
        }
    }

    fn arb_complex() -> impl Strategy<Value = Complex64> {
        let part = prop_oneof![Just(0.0), -1e3..1e3f64, (-20i32..20).prop_map(|k| k as f64)];
        (part.clone(), part).prop_map(|(re, im)| Complex64::new(re, im))
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            Just(Expr::Var),
            arb_complex().prop_map(Expr::Const),
            Just(Expr::koebe()),
            Just(Expr::identity()),
            (0.1..500.0f64).prop_map(|c| Expr::tan_scaled(c).unwrap()),
            (arb_complex(), arb_complex()).prop_filter_map("degenerate", |(a, b)| {
                Expr::mobius(a, b, Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0)).ok()
            }),
        ];
        leaf.prop_recursive(5, 40, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a / b),
                inner.clone().prop_map(|a| -a),
                (inner.clone(), -4i32..5).prop_map(|(a, n)| a.powi(n)),
                (inner.clone(), 0usize..6).prop_map(|(a, k)| {
                    let f = [Func::Exp, Func::Log, Func::Sin, Func::Cos, Func::Tan, Func::Sqrt][k];
                    Expr::func(f, a)
                }),
                (inner.clone(), inner).prop_map(|(a, b)| Expr::compose(a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_then_parse_is_identity(tree in arb_expr()) {
            let printed = tree.to_string();
            let again = parse(&printed);
            prop_assert_eq!(again, Ok(tree), "{}", printed);
        }

        #[test]
        fn complex_literal_round_trip(cv in arb_complex()) {
            prop_assert_eq!(parse_complex(&format_complex(cv)), Ok(cv));
        }
    }
}
