use super::{DistExpr, Factor};
use crate::admg::{VarId, VarSet, MAX_VARS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Text,
    Latex,
}

/// Human-readable formula for `e`, naming variables by `names` (indexed by
/// `VarId`). Summation variables are primed inside their sum; nested sums
/// are merged into one.
pub fn render(e: &DistExpr, names: &[String], style: Style) -> String {
    let mut r = Renderer {
        names,
        style,
        primes: [0; MAX_VARS],
    };
    r.marg(e, e.scope())
}

struct Renderer<'a> {
    names: &'a [String],
    style: Style,
    primes: [u8; MAX_VARS],
}

impl Renderer<'_> {
    fn var(&self, v: VarId) -> String {
        let name = self.names[v.0].to_lowercase();
        let ticks = "'".repeat(self.primes[v.0] as usize);
        match self.style {
            Style::Text => format!("{name}{ticks}"),
            Style::Latex => {
                let split = name.trim_end_matches(|c: char| c.is_ascii_digit()).len();
                let (stem, digits) = name.split_at(split);
                if digits.is_empty() || stem.is_empty() {
                    format!("{name}{ticks}")
                } else {
                    format!("{stem}_{{{digits}}}{ticks}")
                }
            }
        }
    }

    fn list(&self, s: VarSet) -> String {
        s.iter().map(|v| self.var(v)).collect::<Vec<_>>().join(",")
    }

    fn sigma(&self, s: VarSet) -> String {
        let vars = self.list(s);
        match self.style {
            Style::Text if s.len() == 1 => format!("Σ_{vars} "),
            Style::Text => format!("Σ_{{{vars}}} "),
            Style::Latex => format!("\\sum_{{{vars}}} "),
        }
    }

    /// `Σ_{scope ∖ keep} e`.
    fn marg(&mut self, e: &DistExpr, keep: VarSet) -> String {
        match e {
            DistExpr::Marginal { child, .. } => self.marg(child, keep),
            _ => {
                let summed = e.scope().difference(keep);
                if summed.is_empty() {
                    return self.body(e);
                }
                self.bump(summed, 1);
                let out = format!("{}{}", self.sigma(summed), self.body(e));
                self.bump(summed, -1);
                out
            }
        }
    }

    fn bump(&mut self, s: VarSet, by: i8) {
        for v in s.iter() {
            self.primes[v.0] = self.primes[v.0].wrapping_add_signed(by);
        }
    }

    fn body(&mut self, e: &DistExpr) -> String {
        match e {
            DistExpr::Base { vars } => format!("P({})", self.list(*vars)),
            DistExpr::Marginal { .. } => self.marg(e, e.scope()),
            DistExpr::ChainProduct { child, factors, .. } => {
                let parts: Vec<String> = factors.iter().map(|f| self.conditional(child, f)).collect();
                match self.style {
                    Style::Text => parts.join(""),
                    Style::Latex => parts.join(" "),
                }
            }
            DistExpr::Product { children } => {
                let parts: Vec<String> = children
                    .iter()
                    .map(|c| {
                        let s = self.marg(c, c.scope());
                        let summed = s.starts_with('Σ') || s.starts_with("\\sum");
                        if summed {
                            format!("({s})")
                        } else {
                            s
                        }
                    })
                    .collect();
                match self.style {
                    Style::Text => parts.join(" · "),
                    Style::Latex => parts.join(" \\cdot "),
                }
            }
        }
    }

    fn conditional(&mut self, child: &DistExpr, f: &Factor) -> String {
        if is_base_marginal(child) {
            let bar = match self.style {
                Style::Text => "|",
                Style::Latex => " \\mid ",
            };
            return if f.given.is_empty() {
                format!("P[{}]", self.var(f.var))
            } else {
                format!("P[{}{bar}{}]", self.var(f.var), self.list(f.given))
            };
        }
        let num = self.marg(child, f.given.with(f.var));
        let den = self.marg(child, f.given);
        match self.style {
            Style::Text => format!("({num})/({den})"),
            Style::Latex => format!("\\frac{{{num}}}{{{den}}}"),
        }
    }
}

fn is_base_marginal(e: &DistExpr) -> bool {
    match e {
        DistExpr::Base { .. } => true,
        DistExpr::Marginal { child, .. } => is_base_marginal(child),
        _ => false,
    }
}
