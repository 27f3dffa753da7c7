//! ILP export in the textual LP file format, plus a small reader for the
//! subset of the format the writers emit.
//!
//! Variables: `x<l>` (item `l` picked), `y<j>` (user `j` covered) for
//! coverage, `y<j>_<l>` (user `j` served by item `l`) for facility location,
//! and the continuous `w` for the robust (maximin) objective.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::oracle::GroupUtilityOracle;
use crate::problems::{BenefitMatrix, CoverageInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IlpMode {
    /// Maximize the average utility.
    Utility,
    /// Maximize the minimum group average through `w`.
    Robust,
    /// Utility objective plus per-group rows `>= tau * opt_g`.
    Bsm,
}

const TERMS_PER_LINE: usize = 8;

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros removed.
pub fn format_coef(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    } else {
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

struct LpWriter {
    out: String,
}

impl LpWriter {
    fn new(comment: &str) -> Self {
        Self {
            out: format!("\\ {comment}\n"),
        }
    }

    fn line(&mut self, s: &str) {
        self.out.push_str(s);
        self.out.push('\n');
    }

    /// Writes ` name: expr [op rhs]`, wrapping long expressions.
    fn row(&mut self, name: &str, terms: &[(f64, String)], tail: Option<(&str, f64)>) {
        let _ = write!(self.out, " {name}:");
        if terms.is_empty() {
            self.out.push_str(" 0 x0");
        }
        for (i, (coef, var)) in terms.iter().enumerate() {
            if i > 0 && i % TERMS_PER_LINE == 0 {
                self.out.push_str("\n  ");
            }
            let sign = if *coef < 0.0 { '-' } else { '+' };
            let mag = coef.abs();
            if i == 0 && sign == '+' {
                self.out.push(' ');
            } else {
                let _ = write!(self.out, " {sign} ");
            }
            if mag != 1.0 {
                let _ = write!(self.out, "{} ", format_coef(mag));
            }
            self.out.push_str(var);
        }
        if let Some((op, rhs)) = tail {
            let _ = write!(self.out, " {op} {}", format_coef(rhs));
        }
        self.out.push('\n');
    }

    fn binaries(&mut self, vars: &[String]) {
        self.line("Binary");
        for chunk in vars.chunks(16) {
            self.line(&format!(" {}", chunk.join(" ")));
        }
    }

    fn finish(mut self) -> String {
        self.line("End");
        self.out
    }
}

fn check_mode(mode: IlpMode, k: usize, n: usize, tau: f64, optg: Option<f64>) -> Result<Option<f64>> {
    if n == 0 {
        return Err(Error::param("instance has no items"));
    }
    if k == 0 {
        return Err(Error::InvalidBudget { k, n });
    }
    match mode {
        IlpMode::Bsm => {
            if !(0.0..=1.0).contains(&tau) {
                return Err(Error::param(format!("tau = {tau} outside [0, 1]")));
            }
            match optg {
                Some(g) if g.is_finite() && g >= 0.0 => Ok(Some(tau * g)),
                Some(g) => Err(Error::param(format!("opt_g = {g} must be finite and >= 0"))),
                None => Err(Error::param("bsm mode requires opt_g")),
            }
        }
        _ => Ok(None),
    }
}

/// Maximum-coverage ILP (utility, robust, or balanced variant).
pub fn export_ilp_mc(
    instance: &CoverageInstance,
    k: usize,
    tau: f64,
    optg: Option<f64>,
    mode: IlpMode,
) -> Result<String> {
    let n = instance.num_items();
    let fair_rhs = check_mode(mode, k, n, tau, optg)?;
    let pop = instance.population();
    let m = pop.num_users();
    let c = pop.num_groups();

    let mut covering: Vec<Vec<usize>> = vec![Vec::new(); m];
    for l in 0..n {
        for u in instance.set(l) {
            covering[u].push(l);
        }
    }
    let y = |j: usize| format!("y{j}");
    let x = |l: usize| format!("x{l}");
    let group_terms = |i: usize| -> Vec<(f64, String)> {
        let w = 1.0 / pop.group_size(i) as f64;
        pop.members(i).map(|j| (w, y(j))).collect()
    };

    let mut lp = LpWriter::new(&format!(
        "maximum coverage, mode {mode:?}, k = {k}, n = {n}, m = {m}, c = {c}"
    ));
    lp.line("Maximize");
    match mode {
        IlpMode::Robust => lp.row("obj", &[(1.0, "w".into())], None),
        _ => {
            let w = 1.0 / m as f64;
            lp.row("obj", &(0..m).map(|j| (w, y(j))).collect::<Vec<_>>(), None)
        }
    }
    lp.line("Subject To");
    lp.row("card", &(0..n).map(|l| (1.0, x(l))).collect::<Vec<_>>(), Some(("<=", k as f64)));
    for (j, items) in covering.iter().enumerate() {
        let mut terms: Vec<(f64, String)> = items.iter().map(|&l| (1.0, x(l))).collect();
        terms.push((-1.0, y(j)));
        lp.row(&format!("cover_{j}"), &terms, Some((">=", 0.0)));
    }
    for i in 0..c {
        let mut terms = group_terms(i);
        match (mode, fair_rhs) {
            (IlpMode::Robust, _) => {
                terms.push((-1.0, "w".into()));
                lp.row(&format!("group_{i}"), &terms, Some((">=", 0.0)));
            }
            (IlpMode::Bsm, Some(rhs)) => lp.row(&format!("fair_{i}"), &terms, Some((">=", rhs))),
            _ => {}
        }
    }
    if mode == IlpMode::Robust {
        lp.line("Bounds");
        lp.line(" w >= 0");
    }
    let vars: Vec<String> = (0..n).map(x).chain((0..m).map(y)).collect();
    lp.binaries(&vars);
    Ok(lp.finish())
}

/// Facility-location ILP (utility, robust, or balanced variant).
pub fn export_ilp_fl(
    matrix: &BenefitMatrix,
    k: usize,
    tau: f64,
    optg: Option<f64>,
    mode: IlpMode,
) -> Result<String> {
    let n = matrix.num_items();
    let fair_rhs = check_mode(mode, k, n, tau, optg)?;
    let pop = matrix.population();
    let m = pop.num_users();
    let c = pop.num_groups();
    let y = |j: usize, l: usize| format!("y{j}_{l}");
    let x = |l: usize| format!("x{l}");
    let group_terms = |i: usize| -> Vec<(f64, String)> {
        let mi = pop.group_size(i) as f64;
        pop.members(i)
            .flat_map(|j| (0..n).map(move |l| (j, l)))
            .map(|(j, l)| (matrix.benefit(j, l) / mi, y(j, l)))
            .collect()
    };

    let mut lp = LpWriter::new(&format!(
        "facility location, mode {mode:?}, k = {k}, n = {n}, m = {m}, c = {c}"
    ));
    lp.line("Maximize");
    match mode {
        IlpMode::Robust => lp.row("obj", &[(1.0, "w".into())], None),
        _ => {
            let terms: Vec<(f64, String)> = (0..m)
                .flat_map(|j| (0..n).map(move |l| (j, l)))
                .map(|(j, l)| (matrix.benefit(j, l) / m as f64, y(j, l)))
                .collect();
            lp.row("obj", &terms, None)
        }
    }
    lp.line("Subject To");
    lp.row("card", &(0..n).map(|l| (1.0, x(l))).collect::<Vec<_>>(), Some(("<=", k as f64)));
    for j in 0..m {
        let terms: Vec<(f64, String)> = (0..n).map(|l| (1.0, y(j, l))).collect();
        lp.row(&format!("assign_{j}"), &terms, Some(("<=", 1.0)));
    }
    for j in 0..m {
        for l in 0..n {
            lp.row(
                &format!("link_{j}_{l}"),
                &[(1.0, y(j, l)), (-1.0, x(l))],
                Some(("<=", 0.0)),
            );
        }
    }
    for i in 0..c {
        let mut terms = group_terms(i);
        match (mode, fair_rhs) {
            (IlpMode::Robust, _) => {
                terms.push((-1.0, "w".into()));
                lp.row(&format!("group_{i}"), &terms, Some((">=", 0.0)));
            }
            (IlpMode::Bsm, Some(rhs)) => lp.row(&format!("fair_{i}"), &terms, Some((">=", rhs))),
            _ => {}
        }
    }
    if mode == IlpMode::Robust {
        lp.line("Bounds");
        lp.line(" w >= 0");
    }
    let vars: Vec<String> = (0..n)
        .map(x)
        .chain((0..m).flat_map(|j| (0..n).map(move |l| y(j, l))))
        .collect();
    lp.binaries(&vars);
    Ok(lp.finish())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub name: String,
    pub terms: Vec<(String, f64)>,
    pub op: String,
    pub rhs: f64,
}

/// Parsed LP file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LpModel {
    pub maximize: bool,
    pub objective: Vec<(String, f64)>,
    pub rows: Vec<LpRow>,
    pub bounds: Vec<String>,
    pub binaries: Vec<String>,
}

impl LpModel {
    pub fn row(&self, name: &str) -> Option<&LpRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// Every variable mentioned in the objective, rows or binary section.
    pub fn variables(&self) -> Vec<String> {
        let mut vars: Vec<String> = self
            .objective
            .iter()
            .chain(self.rows.iter().flat_map(|r| &r.terms))
            .map(|(v, _)| v.clone())
            .chain(self.binaries.iter().cloned())
            .collect();
        vars.sort();
        vars.dedup();
        vars
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Objective,
    Constraints,
    Bounds,
    Binary,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: "<lp>".into(),
        line,
        msg: msg.into(),
    }
}

type ParsedRow = (String, Vec<(String, f64)>, Option<(String, f64)>);

/// Parses `name: <expr> [op rhs]` where tokens are whitespace separated.
fn parse_row(text: &str, line: usize) -> Result<ParsedRow> {
    let (name, body) = text
        .split_once(':')
        .ok_or_else(|| parse_err(line, "row without a name"))?;
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    let mut tokens = body.split_whitespace();
    let mut tail = None;
    while let Some(tok) = tokens.next() {
        match tok {
            "+" => sign = 1.0,
            "-" => sign = -1.0,
            "<=" | ">=" | "=" => {
                let rhs = tokens
                    .next()
                    .ok_or_else(|| parse_err(line, "missing right-hand side"))?
                    .parse::<f64>()
                    .map_err(|e| parse_err(line, e.to_string()))?;
                tail = Some((tok.to_string(), rhs));
            }
            _ => {
                if let Ok(v) = tok.parse::<f64>() {
                    coef = Some(v);
                } else {
                    terms.push((tok.to_string(), sign * coef.unwrap_or(1.0)));
                    sign = 1.0;
                    coef = None;
                }
            }
        }
    }
    Ok((name.trim().to_string(), terms, tail))
}

/// Reads the LP dialect produced by [`export_ilp_mc`] / [`export_ilp_fl`].
pub fn parse_lp(text: &str) -> Result<LpModel> {
    let mut model = LpModel::default();
    let mut section = Section::None;
    // Rows may continue on following lines; collect logical rows first.
    let mut pending: Option<(usize, String)> = None;
    let mut logical: Vec<(Section, usize, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        let header = match line.to_ascii_lowercase().as_str() {
            "maximize" | "maximum" | "max" => Some((Section::Objective, true)),
            "minimize" | "minimum" | "min" => Some((Section::Objective, false)),
            "subject to" | "st" | "s.t." => Some((Section::Constraints, model.maximize)),
            "bounds" => Some((Section::Bounds, model.maximize)),
            "binary" | "binaries" | "bin" => Some((Section::Binary, model.maximize)),
            "end" => Some((Section::None, model.maximize)),
            _ => None,
        };
        if let Some((next, maximize)) = header {
            if let Some((l, text)) = pending.take() {
                logical.push((section, l, text));
            }
            if next == Section::Objective {
                model.maximize = maximize;
            }
            section = next;
            continue;
        }
        match section {
            Section::Objective | Section::Constraints => {
                let starts_row = line
                    .split_once(':')
                    .is_some_and(|(name, _)| !name.contains(char::is_whitespace));
                if starts_row {
                    if let Some((l, text)) = pending.take() {
                        logical.push((section, l, text));
                    }
                    pending = Some((lineno, line.to_string()));
                } else if let Some((_, text)) = pending.as_mut() {
                    text.push(' ');
                    text.push_str(line);
                } else {
                    return Err(parse_err(lineno, "continuation without a row"));
                }
            }
            Section::Bounds => model.bounds.push(line.to_string()),
            Section::Binary => model
                .binaries
                .extend(line.split_whitespace().map(str::to_string)),
            Section::None => return Err(parse_err(lineno, format!("unexpected `{line}`"))),
        }
    }
    if let Some((l, text)) = pending.take() {
        logical.push((section, l, text));
    }

    for (sec, lineno, text) in logical {
        let (name, terms, tail) = parse_row(&text, lineno)?;
        match sec {
            Section::Objective => model.objective = terms,
            Section::Constraints => {
                let (op, rhs) = tail.ok_or_else(|| parse_err(lineno, "constraint without a sense"))?;
                model.rows.push(LpRow { name, terms, op, rhs });
            }
            _ => unreachable!(),
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_format() {
        assert_eq!(format_coef(1.0 / 12.0), "0.083333333333333329");
        assert_eq!(format_coef(1.0 / 9.0), "0.1111111111111111");
        assert_eq!(format_coef(2.0), "2");
        assert_eq!(format_coef(0.0), "0");
        assert_eq!(format_coef(1e-7), "9.9999999999999995e-08");
        assert_eq!(format_coef(1.5e20), "1.5e+20");
        for x in [1.0 / 3.0, 0.1, 123.456, 1e-9 / 7.0, std::f64::consts::E] {
            assert_eq!(format_coef(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn parses_continuations() {
        let text = "\\ c\nMaximize\n obj: 0.5 a + b\n  - 2 c\nSubject To\n r1: a + b <= 1\n r2: a\n  - c >= 0.25\nBinary\n a b\n c\nEnd\n";
        let m = parse_lp(text).unwrap();
        assert!(m.maximize);
        assert_eq!(m.objective, vec![("a".into(), 0.5), ("b".into(), 1.0), ("c".into(), -2.0)]);
        assert_eq!(m.rows.len(), 2);
        assert_eq!(m.row("r2").unwrap().terms, vec![("a".into(), 1.0), ("c".into(), -1.0)]);
        assert_eq!(m.row("r2").unwrap().rhs, 0.25);
        assert_eq!(m.binaries, vec!["a", "b", "c"]);
    }
}
