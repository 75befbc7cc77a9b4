use super::{EvalError, EvalResult, MeanStd};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// SR/CR/TR of one method in one world (or overall).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Cell {
    pub sr: MeanStd,
    pub cr: MeanStd,
    pub tr: MeanStd,
    /// Number of results (seeds) folded into the cell.
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub method: String,
    pub worlds: Vec<Cell>,
    pub overall: Cell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub worlds: Vec<String>,
    pub rows: Vec<ComparisonRow>,
}

fn fold(results: &[&EvalResult]) -> Cell {
    if let [one] = results {
        return Cell { sr: one.sr, cr: one.cr, tr: one.tr, n: 1 };
    }
    // several seeds: spread is taken across their trial means
    let of = |f: fn(&EvalResult) -> f64| MeanStd::of(&results.iter().map(|r| f(r)).collect::<Vec<_>>());
    Cell { sr: of(|r| r.sr.mean), cr: of(|r| r.cr.mean), tr: of(|r| r.tr.mean), n: results.len() }
}

fn mean_cell(cells: &[Cell]) -> Cell {
    let n = cells.len() as f64;
    let avg = |f: fn(&Cell) -> MeanStd| MeanStd {
        mean: cells.iter().map(|c| f(c).mean).sum::<f64>() / n,
        std: cells.iter().map(|c| f(c).std).sum::<f64>() / n,
    };
    Cell { sr: avg(|c| c.sr), cr: avg(|c| c.cr), tr: avg(|c| c.tr), n: cells.iter().map(|c| c.n).min().unwrap_or(0) }
}

/// Groups results by method and world, in first-seen order. Every method
/// must cover every world, and all results for a world must share a suite.
/// The overall column is the arithmetic mean of the per-world columns.
pub fn compare(results: &[EvalResult]) -> Result<Comparison, EvalError> {
    if results.is_empty() {
        return Err(EvalError::Config("nothing to compare".into()));
    }
    let mut worlds: Vec<(String, String)> = Vec::new();
    let mut methods: Vec<String> = Vec::new();
    for r in results {
        match worlds.iter().find(|(w, _)| *w == r.world) {
            Some((_, digest)) if *digest != r.suite_digest => {
                return Err(EvalError::Protocol(format!("{} in {} was evaluated on a different suite", r.method, r.world)));
            }
            Some(_) => {}
            None => worlds.push((r.world.clone(), r.suite_digest.clone())),
        }
        if !methods.contains(&r.method) {
            methods.push(r.method.clone());
        }
    }
    let mut rows = Vec::with_capacity(methods.len());
    for m in &methods {
        let mut cells = Vec::with_capacity(worlds.len());
        for (w, _) in &worlds {
            let group: Vec<&EvalResult> = results.iter().filter(|r| &r.method == m && &r.world == w).collect();
            if group.is_empty() {
                return Err(EvalError::Protocol(format!("{m} has no result for {w}")));
            }
            cells.push(fold(&group));
        }
        rows.push(ComparisonRow { method: m.clone(), overall: mean_cell(&cells), worlds: cells });
    }
    Ok(Comparison { worlds: worlds.into_iter().map(|(w, _)| w).collect(), rows })
}

impl Comparison {
    pub fn row(&self, method: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.method == method)
    }

    pub fn world_index(&self, world: &str) -> Option<usize> {
        self.worlds.iter().position(|w| w == world)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,world,sr,sr_std,cr,cr_std,tr,tr_std,n\n");
        for row in &self.rows {
            let named = self.worlds.iter().map(String::as_str).zip(&row.worlds).chain(std::iter::once(("overall", &row.overall)));
            for (w, c) in named {
                let _ = writeln!(
                    out,
                    "{},{w},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{}",
                    row.method, c.sr.mean, c.sr.std, c.cr.mean, c.cr.std, c.tr.mean, c.tr.std, c.n
                );
            }
        }
        out
    }

    /// Fixed-width table: one line per method, `SR/CR/TR` per world.
    pub fn to_text(&self) -> String {
        let cell = |c: &Cell| format!("{:6.2}±{:<5.2} {:6.2}±{:<5.2} {:6.2}±{:<5.2}", c.sr.mean, c.sr.std, c.cr.mean, c.cr.std, c.tr.mean, c.tr.std);
        let width = cell(&Cell::default()).chars().count();
        let name_w = self.rows.iter().map(|r| r.method.len()).max().unwrap_or(6).max(6);
        let mut out = format!("{:name_w$}", "method");
        for w in self.worlds.iter().map(String::as_str).chain(["overall"]) {
            let _ = write!(out, " | {w:^width$}");
        }
        out.push('\n');
        let _ = write!(out, "{:name_w$}", "");
        let sub = format!("{:^12} {:^12} {:^12}", "SR", "CR", "TR");
        for _ in 0..=self.worlds.len() {
            let _ = write!(out, " | {sub:^width$}");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{:name_w$}", row.method);
            for c in row.worlds.iter().chain([&row.overall]) {
                let _ = write!(out, " | {}", cell(c));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{EvalOptions, TrialSummary};

    fn result(method: &str, world: &str, sr: f64, cr: f64) -> EvalResult {
        let m = |v| MeanStd { mean: v, std: 0.0 };
        EvalResult {
            method: method.into(),
            world: world.into(),
            suite_digest: format!("suite-{world}"),
            options: EvalOptions::default(),
            trials: vec![TrialSummary { outcomes: vec![], sr, cr, tr: 100.0 - sr - cr }],
            sr: m(sr),
            cr: m(cr),
            tr: m(100.0 - sr - cr),
            rollouts: vec![],
        }
    }

    #[test]
    fn overall_is_the_mean_of_worlds() {
        let rs = [result("IQL-CA", "a", 94.0, 4.0), result("IQL-CA", "b", 88.0, 8.0), result("IQL-CA", "c", 74.0, 20.0)];
        let t = compare(&rs).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert!((t.rows[0].overall.sr.mean - 85.333_333).abs() < 1e-4);
        let c = &t.rows[0].overall;
        assert!((c.sr.mean + c.cr.mean + c.tr.mean - 100.0).abs() < 1e-9);
        assert_eq!(t.to_csv().lines().count(), 1 + 4);
        assert_eq!(t.to_text().lines().count(), 3);
    }

    #[test]
    fn suite_mismatch_is_a_protocol_error() {
        let mut b = result("BC", "a", 90.0, 5.0);
        b.suite_digest = "other".into();
        assert!(matches!(compare(&[result("IQL-CA", "a", 94.0, 4.0), b]), Err(EvalError::Protocol(_))));
        assert!(matches!(compare(&[result("IQL-CA", "a", 94.0, 4.0), result("BC", "b", 1.0, 1.0)]), Err(EvalError::Protocol(_))));
    }

    #[test]
    fn seeds_fold_into_one_cell() {
        let t = compare(&[result("BC", "a", 90.0, 10.0), result("BC", "a", 80.0, 20.0)]).unwrap();
        let c = t.rows[0].worlds[0];
        assert_eq!((c.sr.mean, c.sr.std, c.n), (85.0, 5.0, 2));
    }
}
