//! Recursive-descent parser for the SQL dialect. It produces an AST with
//! unresolved column references; names are checked by `resolve`.

use super::ast::*;
use super::error::SqlError;
use super::lexer::{tokenize, Token, TokenKind};
use crate::schema::normalize_ident;
use crate::value::Value;

const RESERVED: &[&str] = &[
    "all", "and", "as", "asc", "between", "by", "case", "cross", "desc", "distinct", "else", "end",
    "except", "exists", "from", "full", "group", "having", "in", "inner", "intersect", "is", "join",
    "left", "like", "limit", "natural", "not", "null", "offset", "on", "or", "order", "outer",
    "over", "right", "select", "then", "union", "using", "when", "where", "window", "with",
];

fn is_reserved(word: &str) -> bool {
    RESERVED.iter().any(|r| r.eq_ignore_ascii_case(word))
}

/// Parses one statement (optionally `;`-terminated) without consulting a
/// schema.
pub fn parse_statement(text: &str) -> Result<Query, SqlError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let first = p.peek().clone();
    if first.is_word("with") {
        return Err(SqlError::unsupported("common table expression"));
    }
    for stmt in ["insert", "update", "delete", "create", "drop", "alter", "replace"] {
        if first.is_word(stmt) {
            return Err(SqlError::unsupported(format!(
                "{} statement",
                stmt.to_ascii_uppercase()
            )));
        }
    }
    let query = p.parse_compound()?;
    if p.peek().kind == TokenKind::Semicolon {
        p.pos += 1;
    }
    if p.peek().kind != TokenKind::Eof {
        return Err(p.error("expected end of statement"));
    }
    Ok(query)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &Token {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: &str) -> SqlError {
        let t = self.peek();
        SqlError::Syntax {
            position: t.position,
            token: if t.kind == TokenKind::Eof {
                "<end>".to_string()
            } else {
                t.text.clone()
            },
            message: message.to_string(),
        }
    }

    fn at_word(&self, kw: &str) -> bool {
        self.peek().is_word(kw)
    }

    fn eat_word(&mut self, kw: &str) -> bool {
        if self.at_word(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_word(&mut self, kw: &str) -> Result<(), SqlError> {
        if self.eat_word(kw) {
            Ok(())
        } else {
            Err(self.error(&format!("expected {}", kw.to_ascii_uppercase())))
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if &self.peek().kind == kind {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: &TokenKind, what: &str) -> Result<(), SqlError> {
        if self.eat(kind) {
            Ok(())
        } else {
            Err(self.error(&format!("expected {what}")))
        }
    }

    /// A non-reserved identifier, lowercased.
    fn identifier(&mut self, what: &str) -> Result<String, SqlError> {
        match &self.peek().kind {
            TokenKind::Word(w) if !is_reserved(w) => {
                let w = normalize_ident(w);
                self.pos += 1;
                Ok(w)
            }
            _ => Err(self.error(&format!("expected {what}"))),
        }
    }

    fn parse_compound(&mut self) -> Result<Query, SqlError> {
        let mut query = Query::Select(Box::new(self.parse_block()?));
        loop {
            let op = if self.at_word("union") {
                SetOpKind::Union
            } else if self.at_word("intersect") {
                SetOpKind::Intersect
            } else if self.at_word("except") {
                SetOpKind::Except
            } else {
                break;
            };
            self.pos += 1;
            if self.at_word("all") {
                return Err(SqlError::unsupported(format!("{} ALL", op.keyword())));
            }
            let right = Query::Select(Box::new(self.parse_block()?));
            query = Query::SetOp {
                op,
                left: Box::new(query),
                right: Box::new(right),
            };
        }
        if let Query::SetOp { .. } = query {
            if has_block_order_or_limit(&query) {
                return Err(SqlError::unsupported("ORDER BY or LIMIT on a compound query"));
            }
        }
        Ok(query)
    }

    fn parse_block(&mut self) -> Result<Select, SqlError> {
        if self.peek().kind == TokenKind::LParen {
            return Err(SqlError::unsupported("parenthesized compound operand"));
        }
        self.expect_word("select")?;
        let distinct = self.eat_word("distinct");
        if !distinct {
            self.eat_word("all");
        }
        let mut items = vec![self.parse_select_item()?];
        while self.eat(&TokenKind::Comma) {
            items.push(self.parse_select_item()?);
        }
        if !self.at_word("from") {
            if matches!(self.peek().kind, TokenKind::Eof | TokenKind::Semicolon | TokenKind::RParen) {
                return Err(SqlError::unsupported("SELECT without FROM"));
            }
            return Err(self.error("expected FROM"));
        }
        self.pos += 1;
        let from = self.parse_table_ref()?;
        let mut joins = Vec::new();
        loop {
            if self.eat(&TokenKind::Comma) {
                joins.push(Join {
                    table: self.parse_table_ref()?,
                    on: None,
                });
                continue;
            }
            if self.at_word("left") || self.at_word("right") || self.at_word("full") || self.at_word("outer") {
                return Err(SqlError::unsupported("outer join"));
            }
            if self.at_word("natural") {
                return Err(SqlError::unsupported("natural join"));
            }
            let cross = self.eat_word("cross");
            let inner = !cross && self.eat_word("inner");
            if !self.eat_word("join") {
                if cross || inner {
                    return Err(self.error("expected JOIN"));
                }
                break;
            }
            let table = self.parse_table_ref()?;
            let on = if self.eat_word("on") {
                Some(self.parse_or()?)
            } else if self.at_word("using") {
                return Err(SqlError::unsupported("JOIN ... USING"));
            } else {
                None
            };
            joins.push(Join { table, on });
        }
        let where_clause = if self.eat_word("where") {
            Some(self.parse_or()?)
        } else {
            None
        };
        let mut group_by = Vec::new();
        if self.eat_word("group") {
            self.expect_word("by")?;
            loop {
                match self.parse_additive()? {
                    Expr::Column(c) => group_by.push(c),
                    _ => return Err(SqlError::unsupported("GROUP BY on an expression")),
                }
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        let having = if self.eat_word("having") {
            Some(self.parse_or()?)
        } else {
            None
        };
        let mut order_by = Vec::new();
        if self.eat_word("order") {
            self.expect_word("by")?;
            loop {
                let expr = self.parse_additive()?;
                let direction = if self.eat_word("desc") {
                    Direction::Desc
                } else {
                    self.eat_word("asc");
                    Direction::Asc
                };
                if self.at_word("nulls") {
                    return Err(SqlError::unsupported("NULLS FIRST/LAST"));
                }
                order_by.push(OrderItem { expr, direction });
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        let limit = if self.eat_word("limit") {
            let t = self.advance();
            let n = match &t.kind {
                TokenKind::Integer(text) => text.parse::<u64>().ok(),
                _ => None,
            };
            let Some(n) = n else {
                self.pos -= 1;
                return Err(self.error("expected a non-negative integer after LIMIT"));
            };
            if n == 0 {
                return Err(SqlError::unsupported("LIMIT 0"));
            }
            if self.at_word("offset") || self.peek().kind == TokenKind::Comma {
                return Err(SqlError::unsupported("OFFSET"));
            }
            Some(n)
        } else {
            None
        };
        if self.at_word("offset") {
            return Err(SqlError::unsupported("OFFSET"));
        }
        if self.at_word("window") {
            return Err(SqlError::unsupported("window function"));
        }
        Ok(Select {
            distinct,
            items,
            from,
            joins,
            where_clause,
            group_by,
            having,
            order_by,
            limit,
        })
    }

    fn parse_table_ref(&mut self) -> Result<TableRef, SqlError> {
        if self.peek().kind == TokenKind::LParen {
            return Err(SqlError::unsupported("subquery in FROM"));
        }
        let table = self.identifier("table name")?;
        if self.peek().kind == TokenKind::LParen {
            return Err(SqlError::unsupported("table-valued function"));
        }
        let alias = self.parse_alias()?;
        Ok(TableRef { table, alias })
    }

    fn parse_alias(&mut self) -> Result<Option<String>, SqlError> {
        if self.eat_word("as") {
            return Ok(Some(self.identifier("alias")?));
        }
        match &self.peek().kind {
            TokenKind::Word(w) if !is_reserved(w) => {
                let w = normalize_ident(w);
                self.pos += 1;
                Ok(Some(w))
            }
            TokenKind::Str(_) => Err(SqlError::unsupported("string alias")),
            _ => Ok(None),
        }
    }

    fn parse_select_item(&mut self) -> Result<SelectItem, SqlError> {
        if self.eat(&TokenKind::Star) {
            return Ok(SelectItem {
                expr: Expr::Wildcard(None),
                alias: None,
            });
        }
        if let TokenKind::Word(w) = &self.peek().kind {
            if !is_reserved(w)
                && self.peek_at(1).kind == TokenKind::Dot
                && self.peek_at(2).kind == TokenKind::Star
            {
                let q = normalize_ident(w);
                self.pos += 3;
                return Ok(SelectItem {
                    expr: Expr::Wildcard(Some(q)),
                    alias: None,
                });
            }
        }
        let expr = self.parse_or()?;
        let alias = self.parse_alias()?;
        Ok(SelectItem { expr, alias })
    }

    fn parse_or(&mut self) -> Result<Expr, SqlError> {
        let mut left = self.parse_and()?;
        while self.eat_word("or") {
            let right = self.parse_and()?;
            left = Expr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_and(&mut self) -> Result<Expr, SqlError> {
        let mut left = self.parse_not()?;
        while self.eat_word("and") {
            let right = self.parse_not()?;
            left = Expr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_not(&mut self) -> Result<Expr, SqlError> {
        if self.at_word("not") {
            if self.peek_at(1).is_word("exists") {
                return Err(SqlError::unsupported("EXISTS"));
            }
            return Err(SqlError::unsupported("NOT"));
        }
        self.parse_predicate()
    }

    fn parse_predicate(&mut self) -> Result<Expr, SqlError> {
        let left = self.parse_additive()?;
        let op = match self.peek().kind {
            TokenKind::Eq => Some(CmpOp::Eq),
            TokenKind::Ne => Some(CmpOp::Ne),
            TokenKind::Lt => Some(CmpOp::Lt),
            TokenKind::Le => Some(CmpOp::Le),
            TokenKind::Gt => Some(CmpOp::Gt),
            TokenKind::Ge => Some(CmpOp::Ge),
            _ => None,
        };
        if let Some(op) = op {
            self.pos += 1;
            let right = self.parse_additive()?;
            return Ok(Expr::Compare {
                op,
                left: Box::new(left),
                right: Box::new(right),
            });
        }
        if self.eat_word("between") {
            let low = self.parse_additive()?;
            self.expect_word("and")?;
            let high = self.parse_additive()?;
            return Ok(Expr::Between {
                expr: Box::new(left),
                low: Box::new(low),
                high: Box::new(high),
            });
        }
        if self.at_word("not") {
            let next = self.peek_at(1);
            if next.is_word("in") {
                self.pos += 2;
                return self.parse_in(left, true);
            }
            if next.is_word("like") {
                return Err(SqlError::unsupported("NOT LIKE"));
            }
            if next.is_word("between") {
                return Err(SqlError::unsupported("NOT BETWEEN"));
            }
            return Err(SqlError::unsupported("NOT"));
        }
        if self.eat_word("in") {
            return self.parse_in(left, false);
        }
        if self.eat_word("like") {
            let pattern = match &self.peek().kind {
                TokenKind::Str(s) => s.clone(),
                _ => return Err(SqlError::unsupported("non-literal LIKE pattern")),
            };
            self.pos += 1;
            if self.at_word("escape") {
                return Err(SqlError::unsupported("LIKE ... ESCAPE"));
            }
            return Ok(Expr::Like {
                expr: Box::new(left),
                pattern,
            });
        }
        if self.at_word("is") {
            return Err(SqlError::unsupported("IS NULL"));
        }
        if self.at_word("glob") || self.at_word("regexp") || self.at_word("match") {
            let kw = self.peek().text.to_ascii_uppercase();
            return Err(SqlError::unsupported(kw));
        }
        Ok(left)
    }

    fn parse_in(&mut self, left: Expr, negated: bool) -> Result<Expr, SqlError> {
        self.expect(&TokenKind::LParen, "'(' after IN")?;
        if self.at_word("select") {
            let query = self.parse_compound()?;
            self.expect(&TokenKind::RParen, "')'")?;
            return Ok(Expr::InSubquery {
                expr: Box::new(left),
                query: Box::new(query),
                negated,
            });
        }
        let mut list = Vec::new();
        loop {
            match self.parse_additive()? {
                Expr::Literal(v) => list.push(v),
                _ => return Err(SqlError::unsupported("non-literal IN list")),
            }
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        self.expect(&TokenKind::RParen, "')'")?;
        Ok(Expr::InList {
            expr: Box::new(left),
            list,
            negated,
        })
    }

    fn parse_additive(&mut self) -> Result<Expr, SqlError> {
        let mut left = self.parse_multiplicative()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Plus => ArithOp::Add,
                TokenKind::Minus => ArithOp::Sub,
                TokenKind::Concat => return Err(SqlError::unsupported("string concatenation")),
                _ => break,
            };
            self.pos += 1;
            let right = self.parse_multiplicative()?;
            left = Expr::Arith {
                op,
                left: Box::new(left),
                right: Box::new(right),
            };
        }
        Ok(left)
    }

    fn parse_multiplicative(&mut self) -> Result<Expr, SqlError> {
        let mut left = self.parse_unary()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Star => ArithOp::Mul,
                TokenKind::Slash => ArithOp::Div,
                TokenKind::Percent => return Err(SqlError::unsupported("modulo")),
                _ => break,
            };
            self.pos += 1;
            let right = self.parse_unary()?;
            left = Expr::Arith {
                op,
                left: Box::new(left),
                right: Box::new(right),
            };
        }
        Ok(left)
    }

    fn parse_unary(&mut self) -> Result<Expr, SqlError> {
        if self.peek().kind == TokenKind::Minus {
            let next = self.peek_at(1).clone();
            match &next.kind {
                TokenKind::Integer(text) => {
                    self.pos += 2;
                    let v = format!("-{text}").parse::<i64>().map_err(|_| SqlError::Syntax {
                        position: next.position,
                        token: next.text.clone(),
                        message: "integer out of range".into(),
                    })?;
                    return self.postfix(Expr::Literal(Value::Integer(v)));
                }
                TokenKind::Real(r) => {
                    self.pos += 2;
                    return self.postfix(Expr::Literal(Value::Real(-r)));
                }
                _ => return Err(SqlError::unsupported("unary minus")),
            }
        }
        if self.peek().kind == TokenKind::Plus {
            self.pos += 1;
        }
        self.parse_primary()
    }

    fn parse_primary(&mut self) -> Result<Expr, SqlError> {
        let token = self.peek().clone();
        let expr = match &token.kind {
            TokenKind::Integer(text) => {
                self.pos += 1;
                let v = text.parse::<i64>().map_err(|_| SqlError::Syntax {
                    position: token.position,
                    token: token.text.clone(),
                    message: "integer out of range".into(),
                })?;
                Expr::Literal(Value::Integer(v))
            }
            TokenKind::Real(r) => {
                self.pos += 1;
                Expr::Literal(Value::Real(*r))
            }
            TokenKind::Str(s) => {
                self.pos += 1;
                Expr::Literal(Value::Text(s.clone()))
            }
            TokenKind::LParen => {
                self.pos += 1;
                if self.at_word("select") {
                    let q = self.parse_compound()?;
                    self.expect(&TokenKind::RParen, "')'")?;
                    Expr::Subquery(Box::new(q))
                } else {
                    let e = self.parse_or()?;
                    if self.peek().kind == TokenKind::Comma {
                        return Err(SqlError::unsupported("row value"));
                    }
                    self.expect(&TokenKind::RParen, "')'")?;
                    e
                }
            }
            TokenKind::Word(w) => {
                let lower = w.to_ascii_lowercase();
                match lower.as_str() {
                    "true" | "false" => {
                        self.pos += 1;
                        Expr::Literal(Value::Boolean(lower == "true"))
                    }
                    "null" => return Err(SqlError::unsupported("NULL literal")),
                    "case" => return Err(SqlError::unsupported("CASE expression")),
                    "exists" => return Err(SqlError::unsupported("EXISTS")),
                    "cast" => return Err(SqlError::unsupported("CAST")),
                    _ if self.peek_at(1).kind == TokenKind::LParen && !is_reserved(&lower) => {
                        self.parse_call(&lower)?
                    }
                    _ if is_reserved(&lower) => return Err(self.error("expected an expression")),
                    _ => {
                        self.pos += 1;
                        let name = normalize_ident(w);
                        if self.peek().kind == TokenKind::Dot {
                            self.pos += 1;
                            let column = self.identifier("column name")?;
                            Expr::Column(ColumnRef::unresolved(Some(name), column))
                        } else {
                            Expr::Column(ColumnRef::unresolved(None, name))
                        }
                    }
                }
            }
            _ => return Err(self.error("expected an expression")),
        };
        self.postfix(expr)
    }

    fn postfix(&mut self, expr: Expr) -> Result<Expr, SqlError> {
        if self.at_word("over") {
            return Err(SqlError::unsupported("window function"));
        }
        if self.at_word("collate") {
            return Err(SqlError::unsupported("COLLATE"));
        }
        Ok(expr)
    }

    fn parse_call(&mut self, name: &str) -> Result<Expr, SqlError> {
        let Some(func) = AggFunc::from_name(name) else {
            return Err(SqlError::unsupported(format!("function {name}()")));
        };
        self.pos += 2;
        if self.at_word("distinct") {
            return Err(SqlError::unsupported("DISTINCT inside aggregate"));
        }
        let arg = if self.eat(&TokenKind::Star) {
            if func != AggFunc::Count {
                self.pos -= 1;
                return Err(self.error("only count accepts '*'"));
            }
            AggArg::Star
        } else {
            AggArg::Expr(Box::new(self.parse_additive()?))
        };
        if self.peek().kind == TokenKind::Comma {
            return Err(SqlError::unsupported(format!("{name}() with several arguments")));
        }
        self.expect(&TokenKind::RParen, "')'")?;
        if self.at_word("filter") {
            return Err(SqlError::unsupported("aggregate FILTER clause"));
        }
        Ok(Expr::Aggregate { func, arg })
    }
}

fn has_block_order_or_limit(q: &Query) -> bool {
    match q {
        Query::Select(s) => !s.order_by.is_empty() || s.limit.is_some(),
        Query::SetOp { left, right, .. } => {
            has_block_order_or_limit(left) || has_block_order_or_limit(right)
        }
    }
}
