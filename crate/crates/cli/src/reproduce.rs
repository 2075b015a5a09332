//! The table of reference values checked by `multischmidt reproduce`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;

use multischmidt::states::{ghz_state, w_state};
use multischmidt::{
    generalized_eof, local_rank_vector, pure_schmidt_coefficients, pure_schmidt_number,
    PureState, Settings,
};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub quantity: String,
    pub expected: String,
    pub computed: String,
    pub tolerance: String,
    pub pass: bool,
}

fn fmt_set(values: &[f64]) -> String {
    let v: Vec<String> = values.iter().map(|x| format!("{x:.6}")).collect();
    format!("{{{}}}", v.join(", "))
}

fn value_row(name: &str, psi: &PureState, expected: usize, settings: &Settings) -> Row {
    let (computed, pass) = match pure_schmidt_number(psi, settings) {
        Ok(r) => (r.to_string(), r.exact && r.lo == expected),
        Err(e) => (format!("error: {e}"), false),
    };
    Row {
        quantity: format!("R({name})"),
        expected: expected.to_string(),
        computed,
        tolerance: "exact".into(),
        pass,
    }
}

fn ranks_row(name: &str, psi: &PureState, expected: &[usize], settings: &Settings) -> Row {
    let (computed, pass) = match local_rank_vector(psi, settings.rank_tol) {
        Ok(r) => (format!("{r:?}"), r == expected),
        Err(e) => (format!("error: {e}"), false),
    };
    Row {
        quantity: format!("local ranks({name})"),
        expected: format!("{expected:?}"),
        computed,
        tolerance: "exact".into(),
        pass,
    }
}

fn coefficient_rows(name: &str, psi: &PureState, expected: &[f64], settings: &Settings) -> [Row; 2] {
    let mut want = expected.to_vec();
    want.sort_by(|a, b| b.total_cmp(a));
    let eof_want: f64 = want.iter().map(|e| e * e).map(|p| -p * p.log2()).sum();
    match pure_schmidt_coefficients(psi, settings) {
        Ok(c) => {
            let same = c.values.len() == want.len()
                && c.values.iter().zip(&want).all(|(a, b)| (a - b).abs() <= 1e-6);
            let eof = generalized_eof(&c);
            [
                Row {
                    quantity: format!("coefficients({name})"),
                    expected: fmt_set(&want),
                    computed: fmt_set(&c.values),
                    tolerance: "1e-6 each".into(),
                    pass: same,
                },
                Row {
                    quantity: format!("EoF({name})"),
                    expected: format!("{eof_want:.9}"),
                    computed: format!("{eof:.9}"),
                    tolerance: "1e-6".into(),
                    pass: (eof - eof_want).abs() <= 1e-6,
                },
            ]
        }
        Err(e) => {
            let fail = |q: &str, exp: String| Row {
                quantity: format!("{q}({name})"),
                expected: exp,
                computed: format!("error: {e}"),
                tolerance: "-".into(),
                pass: false,
            };
            [fail("coefficients", fmt_set(&want)), fail("EoF", format!("{eof_want:.9}"))]
        }
    }
}

/// Computes every row.
pub fn run(settings: &Settings) -> Vec<Row> {
    let w3 = w_state(3).expect("valid");
    let g3 = ghz_state(3, 2).expect("valid");
    let mut rows = vec![
        value_row("W_3", &w3, 4, settings),
        value_row("GHZ_3", &g3, 3, settings),
    ];
    for m in [4, 5] {
        rows.push(value_row(&format!("W_{m}"), &w_state(m).expect("valid"), 2 * (m - 1), settings));
    }
    for m in [4, 5] {
        rows.push(value_row(&format!("GHZ_{m}"), &ghz_state(m, 2).expect("valid"), 3, settings));
    }
    rows.push(value_row("GHZ_3^(3)", &ghz_state(3, 3).expect("valid"), 4, settings));
    rows.push(ranks_row("W_3", &w3, &[2, 2, 2], settings));
    rows.push(ranks_row("GHZ_3", &g3, &[2, 2, 2], settings));
    rows.extend(coefficient_rows(
        "W_3",
        &w3,
        &[1.0 / 3f64.sqrt(), 1.0 / 6f64.sqrt(), 0.5, 0.5],
        settings,
    ));
    rows.extend(coefficient_rows("GHZ_3", &g3, &[0.5, 0.5, FRAC_1_SQRT_2], settings));
    rows
}

pub fn render(rows: &[Row]) -> String {
    let w0 = rows.iter().map(|r| r.quantity.len()).max().unwrap_or(8).max(8);
    let w1 = rows.iter().map(|r| r.expected.len()).max().unwrap_or(8).max(8);
    let w2 = rows.iter().map(|r| r.computed.len()).max().unwrap_or(8).max(8);
    let mut out = String::new();
    let _ = writeln!(out, "{:<w0$}  {:<w1$}  {:<w2$}  {:<10}  verdict", "quantity", "expected", "computed", "tolerance");
    for r in rows {
        let _ = writeln!(
            out,
            "{:<w0$}  {:<w1$}  {:<w2$}  {:<10}  {}",
            r.quantity,
            r.expected,
            r.computed,
            r.tolerance,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    out
}
