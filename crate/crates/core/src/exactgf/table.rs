use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{pnk_exact, XSeries};
use crate::numcore::{rat_to_decimal, Rational};
use crate::{Error, Result};

/// Significant digits in the JSON decimal rendering.
pub const JSON_DIGITS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    GeneratingFunction,
    BruteForce,
}

/// Exact CDF row `p_n(0), ..., p_n(n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistTable {
    n: usize,
    cdf: Vec<Rational>,
    provenance: Provenance,
}

impl DistTable {
    /// Validates every table invariant; a failure means an arithmetic bug
    /// upstream.
    pub fn new(n: usize, cdf: Vec<Rational>, provenance: Provenance) -> Result<Self> {
        let bad = |what: String| Err(Error::Invariant(format!("row n={n}: {what}")));
        if cdf.len() != n + 1 {
            return bad(format!("expected {} entries, got {}", n + 1, cdf.len()));
        }
        if !cdf[n].is_one() {
            return bad(format!("p_n(n) = {} != 1", cdf[n]));
        }
        if n >= 1 && !cdf[0].is_zero() {
            return bad(format!("p_n(0) = {} != 0", cdf[0]));
        }
        for (k, p) in cdf.iter().enumerate() {
            if p.is_negative() || *p > Rational::one() {
                return bad(format!("p_n({k}) = {p} outside [0, 1]"));
            }
            if k > 0 && *p < cdf[k - 1] {
                return bad(format!("decreasing at k={k}"));
            }
        }
        Ok(Self { n, cdf, provenance })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cdf(&self) -> &[Rational] {
        &self.cdf
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// `Pr(as_n = k)` for `k = 0..=n`.
    pub fn pmf(&self) -> Vec<Rational> {
        self.cdf
            .iter()
            .enumerate()
            .map(|(k, p)| if k == 0 { p.clone() } else { p - &self.cdf[k - 1] })
            .collect()
    }

    /// `(mean, variance)` as exact rationals.
    pub fn moments(&self) -> (Rational, Rational) {
        let pmf = self.pmf();
        let mut m1 = Rational::zero();
        let mut m2 = Rational::zero();
        for (k, p) in pmf.iter().enumerate() {
            let k = Rational::from_integer(BigInt::from(k));
            m1 += &k * p;
            m2 += &k * &k * p;
        }
        let var = &m2 - &m1 * &m1;
        (m1, var)
    }

    /// CSV with header `n,k,p_num,p_den`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,k,p_num,p_den\n");
        for (k, p) in self.cdf.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{}", self.n, k, p.numer(), p.denom());
        }
        out
    }

    pub fn from_csv(text: &str, provenance: Provenance) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["n", "k", "p_num", "p_den"] {
            return Err(Error::InvalidInput(format!("unexpected CSV header {headers:?}")));
        }
        let mut n_seen = None;
        let mut cdf = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let field = |i: usize| rec.get(i).unwrap_or("");
            let parse_err = |what: &str| Error::InvalidInput(format!("bad {what} in CSV row {rec:?}"));
            let n: usize = field(0).parse().map_err(|_| parse_err("n"))?;
            let k: usize = field(1).parse().map_err(|_| parse_err("k"))?;
            let num: BigInt = field(2).parse().map_err(|_| parse_err("p_num"))?;
            let den: BigInt = field(3).parse().map_err(|_| parse_err("p_den"))?;
            if *n_seen.get_or_insert(n) != n || k != cdf.len() || den.is_zero() {
                return Err(parse_err("row order"));
            }
            cdf.push(Rational::new(num, den));
        }
        let n = n_seen.ok_or_else(|| Error::InvalidInput("empty CSV table".into()))?;
        Self::new(n, cdf, provenance)
    }

    /// Human-readable mirror: exact fractions plus 30-digit decimals.
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Row {
            k: usize,
            p_num: String,
            p_den: String,
            p: String,
        }
        #[derive(Serialize)]
        struct Doc {
            n: usize,
            provenance: Provenance,
            rows: Vec<Row>,
        }
        let doc = Doc {
            n: self.n,
            provenance: self.provenance,
            rows: self
                .cdf
                .iter()
                .enumerate()
                .map(|(k, p)| Row {
                    k,
                    p_num: p.numer().to_string(),
                    p_den: p.denom().to_string(),
                    p: rat_to_decimal(p, JSON_DIGITS),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }
}

/// Row `n` of the series as a validated table.
pub fn dist_table(series: &XSeries, n: usize) -> Result<DistTable> {
    if n > series.n_max() || n > series.d_max() {
        return Err(Error::OutOfTruncation {
            n,
            k: n as i64,
            need_n: n,
            need_d: n,
        });
    }
    let cdf = (0..=n)
        .map(|k| pnk_exact(series, n, k as i64))
        .collect::<Result<Vec<_>>>()?;
    DistTable::new(n, cdf, Provenance::GeneratingFunction)
}

pub fn exact_moments(table: &DistTable) -> (Rational, Rational) {
    table.moments()
}
