//! The table catalog: each entry is regenerated from the algorithms and
//! compared byte-for-byte with a fixture transcribed by hand.

use beatty_core::mesalg::{golden_c_rule, mes_from_defining, run_mes, run_mex, GapSequence, SelfGeneratingRun};
use beatty_core::sequences::BeattySeq;
use beatty_core::QuadExpr;

use crate::render::{numbered, set, Align, Grid};
use crate::CliError;

pub struct TableSpec {
    pub name: &'static str,
    pub fixture: &'static str,
    render: fn() -> Result<String, CliError>,
}

impl TableSpec {
    pub fn render(&self) -> Result<String, CliError> {
        (self.render)()
    }
}

pub const CATALOG: [TableSpec; 6] = [
    TableSpec {
        name: "t1-mex-golden",
        fixture: include_str!("../fixtures/t1-mex-golden.txt"),
        render: mex_golden,
    },
    TableSpec {
        name: "t2-mes-golden",
        fixture: include_str!("../fixtures/t2-mes-golden.txt"),
        render: mes_golden,
    },
    TableSpec {
        name: "t3-partial",
        fixture: include_str!("../fixtures/t3-partial.txt"),
        render: || partial(1),
    },
    TableSpec {
        name: "t4-partial",
        fixture: include_str!("../fixtures/t4-partial.txt"),
        render: || partial(3),
    },
    TableSpec {
        name: "t5-full-golden",
        fixture: include_str!("../fixtures/t5-full-golden.txt"),
        render: full_golden,
    },
    TableSpec {
        name: "t-sqrt13",
        fixture: include_str!("../fixtures/t-sqrt13.txt"),
        render: sqrt13,
    },
];

pub fn lookup(name: &str) -> Option<&'static TableSpec> {
    CATALOG.iter().find(|t| t.name == name)
}

const SET_HEADERS: [&str; 2] = ["A_n={a_k:k≤n}", "B_n={b_k:k≤n}"];

fn mex_golden() -> Result<String, CliError> {
    let run = run_mex(&GapSequence::Linear(1), 5)?;
    let mut grid = Grid::new(vec![Align::Left; 4]);
    grid.push(["a_n=mex(A_{n-1}∪B_{n-1})", "b_n=a_n+n", SET_HEADERS[0], SET_HEADERS[1]]);
    for (i, row) in run.rows().enumerate() {
        let n = row.n;
        grid.push([
            format!("a_{n}={}", row.a),
            format!("b_{n}={}+{n}={}", row.a, row.b),
            format!("A_{n}={}", set(&run.a[..=i])),
            format!("B_{n}={}", set(&run.b[..=i])),
        ]);
    }
    Ok(grid.render())
}

fn mes_golden() -> Result<String, CliError> {
    let c = golden_c_rule(17);
    let skips: Vec<i64> = c.iter().map(|&v| v as i64).collect();
    let run = run_mes(&skips, 8)?;
    let shown: Vec<String> = c.iter().map(u64::to_string).collect();
    let mut out = format!("C={{{},...}}\n", shown.join(","));
    out.push_str("a_n=mex(A_{n-1}∪B_{n-1})\n");
    out.push_str("b_n=mex_{c_n}(A_n∪B_{n-1})\n");
    let mut grid = Grid::new(vec![Align::Left; 4]);
    grid.push(["a_n", "b_n", SET_HEADERS[0], SET_HEADERS[1]]);
    for (i, row) in run.rows().enumerate() {
        let n = row.n;
        grid.push([
            format!("a_{n}={}", row.a),
            format!("b_{n}=mex_{}={}", c[i], row.b),
            format!("A_{n}={}", set(&run.a[..=i])),
            format!("B_{n}={}", set(&run.b[..=i])),
        ]);
    }
    out.push_str(&grid.render());
    Ok(out)
}

/// Golden-rule state after `steps` steps: the `A`, `B` rows placed so far
/// and every `C` value already settled.
fn partial(steps: usize) -> Result<String, CliError> {
    let mut sg = SelfGeneratingRun::new(2);
    for _ in 0..steps {
        sg.step()?;
    }
    let run = sg.run();
    let rows: Vec<Vec<String>> = sg
        .skips()
        .iter()
        .enumerate()
        .map(|(i, c)| match (run.a.get(i), run.b.get(i)) {
            (Some(a), Some(b)) => vec![a.to_string(), b.to_string(), c.to_string()],
            _ => vec![String::new(), String::new(), c.to_string()],
        })
        .collect();
    Ok(numbered(&["A", "B", "C"], &rows))
}

fn full_golden() -> Result<String, CliError> {
    let mut sg = SelfGeneratingRun::new(2);
    for _ in 0..12 {
        sg.step()?;
    }
    let run = sg.run();
    let rows: Vec<Vec<String>> = run
        .rows()
        .map(|r| vec![r.a.to_string(), r.b.to_string(), sg.skips()[r.n - 1].to_string()])
        .collect();
    Ok(numbered(&["A", "B", "C"], &rows))
}

fn sqrt13() -> Result<String, CliError> {
    let defining = BeattySeq::new(QuadExpr::make(0, 1, 13u64, 2)?)?;
    let run = mes_from_defining(&defining, 3, 12)?;
    let d = defining.prefix(12);
    let rows: Vec<Vec<String>> = run
        .rows()
        .map(|r| [r.a, r.b, r.c, r.r, d[r.n - 1]].iter().map(u64::to_string).collect())
        .collect();
    Ok(numbered(&["A", "B", "C", "R", "D"], &rows))
}

/// First line where `got` and `want` differ, 1-based.
pub fn first_difference(got: &str, want: &str) -> Option<usize> {
    if got == want {
        return None;
    }
    let mut g = got.split_inclusive('\n');
    let mut w = want.split_inclusive('\n');
    let mut line = 1;
    loop {
        match (g.next(), w.next()) {
            (Some(x), Some(y)) if x == y => line += 1,
            _ => return Some(line),
        }
    }
}
