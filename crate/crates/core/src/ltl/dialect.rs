use super::Formula;

/// Which of the two accepted spellings an operator is written with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Spelling {
    #[default]
    Primary,
    Alternate,
}

/// Output spelling for every operator that has more than one.
///
/// `X`, `U`, `->` and `<->` have a single spelling. The parser accepts every
/// spelling regardless of the dialect used to print a formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Dialect {
    /// `!` or `~`
    pub not: Spelling,
    /// `&` or `&&`
    pub and: Spelling,
    /// `|` or `||`
    pub or: Spelling,
    /// `R` or `V`
    pub release: Spelling,
    /// `G` or `[]`
    pub globally: Spelling,
    /// `F` or `<>`
    pub finally: Spelling,
    /// `true` or `TRUE`
    pub truth: Spelling,
    /// `false` or `FALSE`
    pub falsity: Spelling,
}

impl Dialect {
    /// `! & | R G F true false`
    pub const PRIMARY: Dialect = Dialect::uniform(Spelling::Primary);
    /// `~ && || V [] <> TRUE FALSE`
    pub const ALTERNATE: Dialect = Dialect::uniform(Spelling::Alternate);

    pub const fn uniform(s: Spelling) -> Self {
        Dialect {
            not: s,
            and: s,
            or: s,
            release: s,
            globally: s,
            finally: s,
            truth: s,
            falsity: s,
        }
    }

    /// All 256 combinations of per-operator spellings.
    pub fn all() -> impl Iterator<Item = Dialect> {
        (0u16..256).map(|bits| {
            let pick = |i: u16| {
                if bits & (1 << i) == 0 {
                    Spelling::Primary
                } else {
                    Spelling::Alternate
                }
            };
            Dialect {
                not: pick(0),
                and: pick(1),
                or: pick(2),
                release: pick(3),
                globally: pick(4),
                finally: pick(5),
                truth: pick(6),
                falsity: pick(7),
            }
        })
    }

    fn pick(s: Spelling, primary: &'static str, alternate: &'static str) -> &'static str {
        match s {
            Spelling::Primary => primary,
            Spelling::Alternate => alternate,
        }
    }

    pub fn not_symbol(&self) -> &'static str {
        Self::pick(self.not, "!", "~")
    }

    pub fn and_symbol(&self) -> &'static str {
        Self::pick(self.and, "&", "&&")
    }

    pub fn or_symbol(&self) -> &'static str {
        Self::pick(self.or, "|", "||")
    }

    pub fn release_symbol(&self) -> &'static str {
        Self::pick(self.release, "R", "V")
    }

    pub fn globally_symbol(&self) -> &'static str {
        Self::pick(self.globally, "G", "[]")
    }

    pub fn finally_symbol(&self) -> &'static str {
        Self::pick(self.finally, "F", "<>")
    }

    pub fn true_symbol(&self) -> &'static str {
        Self::pick(self.truth, "true", "TRUE")
    }

    pub fn false_symbol(&self) -> &'static str {
        Self::pick(self.falsity, "false", "FALSE")
    }
}

/// Prints `f` fully parenthesized using the spellings chosen by `dialect`.
pub fn render(f: &Formula, dialect: &Dialect) -> String {
    let mut out = String::new();
    write_formula(&mut out, f, dialect);
    out
}

fn write_formula(out: &mut String, f: &Formula, d: &Dialect) {
    use Formula::*;
    let unary = |out: &mut String, op: &str, inner: &Formula| {
        out.push('(');
        out.push_str(op);
        out.push(' ');
        write_formula(out, inner, d);
        out.push(')');
    };
    let binary = |out: &mut String, op: &str, l: &Formula, r: &Formula| {
        out.push('(');
        write_formula(out, l, d);
        out.push(' ');
        out.push_str(op);
        out.push(' ');
        write_formula(out, r, d);
        out.push(')');
    };
    match f {
        True => out.push_str(d.true_symbol()),
        False => out.push_str(d.false_symbol()),
        Prop(p) => out.push_str(p),
        Not(g) => unary(out, d.not_symbol(), g),
        Next(g) => unary(out, "X", g),
        Globally(g) => unary(out, d.globally_symbol(), g),
        Finally(g) => unary(out, d.finally_symbol(), g),
        And(l, r) => binary(out, d.and_symbol(), l, r),
        Or(l, r) => binary(out, d.or_symbol(), l, r),
        Implies(l, r) => binary(out, "->", l, r),
        Iff(l, r) => binary(out, "<->", l, r),
        Until(l, r) => binary(out, "U", l, r),
        Release(l, r) => binary(out, d.release_symbol(), l, r),
    }
}
