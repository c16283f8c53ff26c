//! Regenerates the published hard-square tables and the cross-arity chain, cell by cell,
//! against embedded expected values at their printed precision.

use rand::SeedableRng;
use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::counts::{exact_total, ExactCap, GoldenCountState};
use crate::enumeration::{enumerate_pattern, Pattern};
use crate::error::{Error, Result};
use crate::matrix::TransitionMatrix;
use crate::numerics::{parse_rational, Interval};
use crate::strip::{cross_dim_chain_with, dim_increase_check_with, general_strip_sequence_with, golden_1d_entropy, strip_sequence_with};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellStatus {
    Pass,
    Fail,
    /// The expected value is a known misprint; the computed value is reported next to it.
    Erratum,
}

impl CellStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CellStatus::Pass => "PASS",
            CellStatus::Fail => "FAIL",
            CellStatus::Erratum => "ERRATUM",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub section: &'static str,
    pub label: String,
    pub expected: String,
    pub computed: String,
    pub status: CellStatus,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ReproReport {
    pub cells: Vec<Cell>,
}

impl ReproReport {
    pub fn passed(&self) -> bool {
        self.cells.iter().all(|c| c.status != CellStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| c.status == CellStatus::Fail)
    }

    pub fn section(&self, name: &str) -> impl Iterator<Item = &Cell> + '_ {
        let name = name.to_string();
        self.cells.iter().filter(move |c| c.section == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DigitMatch {
    Rounded,
    Truncated,
}

/// Whether every point of `x` rounds (or else truncates) to the decimal `printed`,
/// taken at the number of digits written after its point.
pub fn decimal_match(x: &Interval, printed: &str) -> Result<Option<DigitMatch>> {
    let p = parse_rational(printed)?;
    let digits = printed.split_once('.').map_or(0, |(_, f)| f.len());
    let ulp = Rational::from((1, Integer::from(10).pow(digits as u32)));
    let lo = x
        .lo()
        .to_rational()
        .ok_or_else(|| Error::arg("enclosure endpoint is not finite"))?;
    let hi = x
        .hi()
        .to_rational()
        .ok_or_else(|| Error::arg("enclosure endpoint is not finite"))?;
    let half = Rational::from(&ulp / 2u32);
    let (rlo, rhi) = (Rational::from(&p - &half), Rational::from(&p + &half));
    if lo >= rlo && hi < rhi {
        return Ok(Some(DigitMatch::Rounded));
    }
    let thi = Rational::from(&p + &ulp);
    if lo >= p && hi < thi {
        return Ok(Some(DigitMatch::Truncated));
    }
    Ok(None)
}

fn show(x: &Interval) -> String {
    format!("{:.10}", x.mid_f64())
}

fn show_q(q: &Rational) -> String {
    format!("{:.10}", q.to_f64())
}

fn exact_cell(section: &'static str, label: String, expected: &str, got: &Integer) -> Cell {
    Cell {
        section,
        label,
        expected: expected.to_string(),
        computed: got.to_string(),
        status: if expected.parse::<Integer>().ok().as_ref() == Some(got) {
            CellStatus::Pass
        } else {
            CellStatus::Fail
        },
    }
}

fn rounded_cell(section: &'static str, label: String, expected: &str, x: &Interval, allow_trunc: bool) -> Result<Cell> {
    let m = decimal_match(x, expected)?;
    let ok = match m {
        Some(DigitMatch::Rounded) => true,
        Some(DigitMatch::Truncated) => allow_trunc,
        None => false,
    };
    Ok(Cell {
        section,
        label,
        expected: expected.to_string(),
        computed: show(x),
        status: if ok { CellStatus::Pass } else { CellStatus::Fail },
    })
}

const TABLE_B: [&str; 5] = ["2", "5", "41", "2306", "8143397"];
const TABLE_B0: [&str; 5] = ["1", "4", "25", "1681", "5317636"];
const TABLE_R: [&str; 5] = [".5", ".8", ".6098", ".729", ".653"];
const TABLE_UPPER: [&str; 5] = [".693", ".536", ".531", ".516", ".513"];
const TABLE_HALF: [&str; 5] = [".347", ".402", ".465", ".484", ".497"];
const TABLE_H: [&str; 5] = [".5025", ".5078", ".50866", ".50885", ".508889"];
/// Known misprint: `log 41 / 8 = 0.46419...`.
const HALF_ERRATUM_ROW: usize = 3;

/// Widest enclosure accepted for a strip value in the table.
pub const TABLE_H_WIDTH: f64 = 1e-6;

/// The strip table for `k = 2`, rows `n = 1..5`.
pub fn reproduce_table(prec: u32) -> Result<Vec<Cell>> {
    let strips = strip_sequence_with(2, 5, prec, ExactCap::default())?;
    let mut cells = Vec::new();
    for n in 1..=5usize {
        let s = GoldenCountState::at_level(2, n as i64 - 1)?;
        let b = s.total();
        cells.push(exact_cell("table", format!("n={n} B"), TABLE_B[n - 1], &b));
        cells.push(exact_cell("table", format!("n={n} B(0)"), TABLE_B0[n - 1], s.b0()));
        let r = s.ratio();
        let ri = Interval::from_rational(&r, prec);
        let mut rc = rounded_cell("table", format!("n={n} r"), TABLE_R[n - 1], &ri, false)?;
        rc.computed = show_q(&r);
        cells.push(rc);
        let log_b = Interval::from_integer(&b, prec).ln()?;
        let upper = log_b.div_integer(&Integer::from((1u32 << n) - 1));
        cells.push(rounded_cell("table", format!("n={n} logB/(2^n-1)"), TABLE_UPPER[n - 1], &upper, false)?);
        let half = log_b.div_integer(&Integer::from(1u32 << n));
        let mut hc = rounded_cell("table", format!("n={n} logB/2^n"), TABLE_HALF[n - 1], &half, false)?;
        if n == HALF_ERRATUM_ROW && hc.status == CellStatus::Fail {
            hc.status = CellStatus::Erratum;
        }
        cells.push(hc);
        let h = &strips[n].h;
        let mut c = rounded_cell("table", format!("n={n} h"), TABLE_H[n - 1], h, false)?;
        if h.width_f64() >= TABLE_H_WIDTH {
            c.status = CellStatus::Fail;
        }
        cells.push(c);
    }
    Ok(cells)
}

/// `(k, m, n)` for each certified step `h^(k) < h^(k+1)`.
pub const CHAIN_STEPS: [(u32, u32, u32); 5] = [(1, 0, 1), (2, 5, 4), (3, 2, 4), (4, 2, 4), (5, 2, 4)];

/// The cross-arity chain `h^(1) < ... < h^(6)` and its printed waypoints.
pub fn reproduce_chain(prec: u32) -> Result<Vec<Cell>> {
    let mut cells = Vec::new();
    let mut push_step = |k: u32, m: u32, n: u32| -> Result<()> {
        let (status, computed) = match cross_dim_chain_with(k, m, n, prec) {
            Ok(v) => (CellStatus::Pass, format!("{} < {}", show(&v.upper), show(&v.lower))),
            Err(e @ (Error::Inconclusive(_) | Error::CertificateFailed(_))) => (CellStatus::Fail, e.to_string()),
            Err(e) => return Err(e),
        };
        cells.push(Cell {
            section: "chain",
            label: format!("h^({k}) < h^({})", k + 1),
            expected: "certified".into(),
            computed,
            status,
        });
        Ok(())
    };
    for (k, m, n) in CHAIN_STEPS {
        push_step(k, m, n)?;
    }
    let strip = |k: u32, n: u32| -> Result<Interval> { Ok(strip_sequence_with(k, n, prec, ExactCap::default())?[n as usize].h.clone()) };
    let upper = |k: u32, m: i64| -> Result<Interval> { GoldenCountState::at_level(k, m)?.entropy_upper_bound(prec) };
    let waypoints: Vec<(&str, String, Interval)> = vec![
        (".481", "log γ".into(), golden_1d_entropy(prec)),
        (".509", "h_5^(2)".into(), strip(2, 5)?),
        (".536", "h_4^(3)".into(), strip(3, 4)?),
        (".548", "log B_2^(3) / 13".into(), upper(3, 2)?),
        (".561", "h_4^(4)".into(), strip(4, 4)?),
        (".567", "log B_2^(4) / 21".into(), upper(4, 2)?),
        (".58", "h_4^(5)".into(), strip(5, 4)?),
        (".5839", "log B_2^(5) / 31".into(), upper(5, 2)?),
        (".5952", "h_4^(6)".into(), strip(6, 4)?),
    ];
    for (printed, label, x) in waypoints {
        cells.push(rounded_cell("chain", label, printed, &x, true)?);
    }
    Ok(cells)
}

/// Cells outside the published tables: the `k = 6` estimate, full-shift rows and
/// brute-force checks on seeded random matrices.
pub fn reproduce_extras(prec: u32, seed: u64) -> Result<Vec<Cell>> {
    let mut cells = Vec::new();
    let dim = dim_increase_check_with(6, prec);
    match dim {
        Ok(v) => {
            cells.push(rounded_cell("extras", "k=6 lhs".into(), "2.6611", &v.lhs, false)?);
            cells.push(rounded_cell("extras", "k=6 rhs".into(), "2.16633", &v.rhs, false)?);
        }
        Err(e @ Error::Inconclusive(_)) => cells.push(Cell {
            section: "extras",
            label: "k=6 estimate".into(),
            expected: "certified".into(),
            computed: e.to_string(),
            status: CellStatus::Fail,
        }),
        Err(e) => return Err(e),
    }
    let full = TransitionMatrix::full(2)?;
    let l2 = Interval::ln2(prec);
    for s in general_strip_sequence_with(&full, 2, 5, prec, ExactCap::default())? {
        let ok = s.h.overlaps(&l2) && s.h.width_f64() < 1e-10;
        cells.push(Cell {
            section: "extras",
            label: format!("full shift h_{}", s.n),
            expected: "log 2".into(),
            computed: show(&s.h),
            status: if ok { CellStatus::Pass } else { CellStatus::Fail },
        });
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for i in 0..3 {
        let m = TransitionMatrix::random_irreducible(3, &mut rng)?;
        for n in 0..=2u32 {
            let brute = enumerate_pattern(&m, &Pattern::ball(2, n)?)?.count;
            let rec = exact_total(&m, 2, n)?;
            cells.push(exact_cell("extras", format!("random matrix {i} p({n})"), &rec.to_string(), &brute));
        }
    }
    Ok(cells)
}

pub fn reproduce_all(prec: u32, seed: u64) -> Result<ReproReport> {
    let mut cells = reproduce_table(prec)?;
    cells.extend(reproduce_chain(prec)?);
    cells.extend(reproduce_extras(prec, seed)?);
    Ok(ReproReport { cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 128;

    #[test]
    fn digit_matching() {
        let x = Interval::parse("0.53699", P).unwrap();
        assert_eq!(decimal_match(&x, ".536").unwrap(), Some(DigitMatch::Truncated));
        assert_eq!(decimal_match(&x, ".537").unwrap(), Some(DigitMatch::Rounded));
        assert_eq!(decimal_match(&x, ".54").unwrap(), Some(DigitMatch::Rounded));
        assert_eq!(decimal_match(&x, ".535").unwrap(), None);
    }

    #[test]
    fn table_cells() {
        let cells = reproduce_table(P).unwrap();
        assert_eq!(cells.len(), 30);
        let bad: Vec<_> = cells.iter().filter(|c| c.status != CellStatus::Pass).collect();
        assert_eq!(bad.len(), 1, "{bad:?}");
        assert_eq!(bad[0].status, CellStatus::Erratum);
        assert_eq!(bad[0].label, "n=3 logB/2^n");
    }

    #[test]
    fn chain_cells() {
        let cells = reproduce_chain(P).unwrap();
        assert_eq!(cells.len(), 14);
        assert!(cells.iter().all(|c| c.status == CellStatus::Pass), "{cells:?}");
    }

    #[test]
    fn extras_and_report() {
        let r = reproduce_all(P, 2024).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r.section("extras").count(), 2 + 5 + 9);
    }
}
