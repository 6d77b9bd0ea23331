//! Plain-text serialization: `smc v1` instances, `matching v1` weight
//! matrices, `bvn v1` supports and `certificate v1` stability certificates.
//! Rationals are always written in canonical reduced form with `/1`
//! omitted, so write-then-parse round-trips are bit-exact.

use std::io::Read;
use std::str::FromStr;

use num_traits::Zero;

use crate::decompose::BvnSupport;
use crate::error::{Error, Result};
use crate::instance::{AgentLabels, FractionalMatching, IntegralMatching, Rat, SmcInstance};
use crate::lp::{CertificateKind, SolveCertificate, ThresholdVector};

fn parse_rat(token: &str, line: usize) -> Result<Rat> {
    let value = Rat::from_str(token).map_err(|e| Error::Parse {
        line,
        msg: format!("bad rational '{token}': {e}"),
    })?;
    if value < Rat::zero() {
        return Err(Error::Parse {
            line,
            msg: format!("negative value '{token}'"),
        });
    }
    Ok(value)
}

fn parse_rat_row(text: &str, line: usize, n: usize) -> Result<Vec<Rat>> {
    let row: Vec<&str> = text.split_whitespace().collect();
    if row.len() != n {
        return Err(Error::Parse {
            line,
            msg: format!("expected {n} entries, found {}", row.len()),
        });
    }
    row.into_iter().map(|t| parse_rat(t, line)).collect()
}

/// Line iterator that skips comments and blank lines but remembers the
/// 1-based line number of whatever it yields.
struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
        }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (idx, raw) in self.inner.by_ref() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            return Some((idx + 1, line));
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.next().ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("unexpected end of input, expected {what}"),
        })
    }
}

fn expect_header(lines: &mut Lines, header: &str) -> Result<usize> {
    let (ln, text) = lines.expect(header)?;
    if text != header {
        return Err(Error::Parse {
            line: ln,
            msg: format!("expected '{header}', found '{text}'"),
        });
    }
    Ok(ln)
}

fn parse_n(lines: &mut Lines) -> Result<usize> {
    let (ln, text) = lines.expect("n=<int>")?;
    let rest = text.strip_prefix("n=").ok_or_else(|| Error::Parse {
        line: ln,
        msg: format!("expected 'n=<int>', found '{text}'"),
    })?;
    let n: usize = rest.trim().parse().map_err(|e| Error::Parse {
        line: ln,
        msg: format!("bad size '{rest}': {e}"),
    })?;
    if n == 0 {
        return Err(Error::Parse {
            line: ln,
            msg: "n must be at least 1".into(),
        });
    }
    Ok(n)
}

fn parse_matrix(lines: &mut Lines, n: usize) -> Result<Vec<Vec<Rat>>> {
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, text) = lines.expect("matrix row")?;
        rows.push(parse_rat_row(text, ln, n)?);
    }
    Ok(rows)
}

/// Parses the `smc v1` instance format:
///
/// ```text
/// # optional comments
/// n=<int>
/// U=
/// <n rows of n rationals>
/// V=
/// <n rows of n rationals>
/// labels=            (optional)
/// <n man names, then n woman names, one per line>
/// ```
pub fn parse_instance(text: &str) -> Result<SmcInstance> {
    let mut lines = Lines::new(text);
    let n = parse_n(&mut lines)?;
    expect_header(&mut lines, "U=")?;
    let u = parse_matrix(&mut lines, n)?;
    expect_header(&mut lines, "V=")?;
    let v = parse_matrix(&mut lines, n)?;
    let mut labels = None;
    if let Some((ln, text)) = lines.next() {
        if text != "labels=" {
            return Err(Error::Parse {
                line: ln,
                msg: format!("expected 'labels=' or end of file, found '{text}'"),
            });
        }
        let mut names = Vec::with_capacity(2 * n);
        for _ in 0..2 * n {
            let (_, name) = lines.expect("agent label")?;
            names.push(name.to_string());
        }
        let women = names.split_off(n);
        labels = Some(AgentLabels { men: names, women });
    }
    match labels {
        Some(l) => SmcInstance::with_labels(u, v, l),
        None => SmcInstance::new(u, v),
    }
}

/// Reads an instance from a byte stream (UTF-8 text).
pub fn load_instance<R: Read>(mut reader: R) -> Result<SmcInstance> {
    let mut text = String::new();
    reader.read_to_string(&mut text).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("read failed: {e}"),
    })?;
    parse_instance(&text)
}

fn push_matrix(out: &mut String, m: &[Vec<Rat>]) {
    for row in m {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
}

pub fn write_instance(inst: &SmcInstance) -> String {
    let mut out = String::new();
    out.push_str(&format!("n={}\n", inst.n()));
    out.push_str("U=\n");
    push_matrix(&mut out, inst.u_matrix());
    out.push_str("V=\n");
    push_matrix(&mut out, inst.v_matrix());
    if let Some(labels) = inst.labels() {
        out.push_str("labels=\n");
        for name in labels.men.iter().chain(labels.women.iter()) {
            out.push_str(name);
            out.push('\n');
        }
    }
    out
}

/// Parses the `matching v1` format: header line, `n=<int>`, then n rows of
/// n rationals.
pub fn parse_matching(text: &str) -> Result<FractionalMatching> {
    let mut lines = Lines::new(text);
    expect_header(&mut lines, "matching v1")?;
    let n = parse_n(&mut lines)?;
    let weights = parse_matrix(&mut lines, n)?;
    FractionalMatching::new(weights)
}

pub fn write_matching(mu: &FractionalMatching) -> String {
    let mut out = String::from("matching v1\n");
    out.push_str(&format!("n={}\n", mu.n()));
    push_matrix(&mut out, mu.weights());
    out
}

pub fn write_bvn(support: &BvnSupport) -> String {
    let mut out = String::from("bvn v1\n");
    for (lambda, matching) in support.terms() {
        let pairs: Vec<String> = matching
            .pairs()
            .iter()
            .map(|(m, w)| format!("({m},{w})"))
            .collect();
        out.push_str(&format!("lambda={} pairs={}\n", lambda, pairs.join(";")));
    }
    out
}

pub fn parse_bvn(text: &str) -> Result<BvnSupport> {
    let mut lines = Lines::new(text);
    expect_header(&mut lines, "bvn v1")?;
    let mut terms = Vec::new();
    while let Some((ln, text)) = lines.next() {
        let (lambda_part, pairs_part) = text.split_once(' ').ok_or_else(|| Error::Parse {
            line: ln,
            msg: "expected 'lambda=... pairs=...'".into(),
        })?;
        let lambda = parse_rat(
            lambda_part
                .strip_prefix("lambda=")
                .ok_or_else(|| Error::Parse {
                    line: ln,
                    msg: "term must start with 'lambda='".into(),
                })?,
            ln,
        )?;
        let pairs_text = pairs_part
            .strip_prefix("pairs=")
            .ok_or_else(|| Error::Parse {
                line: ln,
                msg: "missing 'pairs=' list".into(),
            })?;
        let mut pairs = Vec::new();
        for chunk in pairs_text.split(';').filter(|c| !c.is_empty()) {
            let inner = chunk
                .strip_prefix('(')
                .and_then(|c| c.strip_suffix(')'))
                .ok_or_else(|| Error::Parse {
                    line: ln,
                    msg: format!("bad pair '{chunk}'"),
                })?;
            let (a, b) = inner.split_once(',').ok_or_else(|| Error::Parse {
                line: ln,
                msg: format!("bad pair '{chunk}'"),
            })?;
            let m = a.parse().map_err(|e| Error::Parse {
                line: ln,
                msg: format!("{e}"),
            })?;
            let w = b.parse().map_err(|e| Error::Parse {
                line: ln,
                msg: format!("{e}"),
            })?;
            pairs.push((m, w));
        }
        terms.push((lambda, IntegralMatching::new(pairs)?));
    }
    Ok(BvnSupport::from_terms(terms))
}

pub fn write_certificate(cert: &SolveCertificate) -> String {
    let mut out = String::from("certificate v1\n");
    out.push_str(&format!("eps={}\n", cert.epsilon));
    match &cert.kind {
        CertificateKind::Thresholds(t) => {
            out.push_str("kind=threshold\n");
            let men: Vec<String> = t.men.iter().map(|x| x.to_string()).collect();
            let women: Vec<String> = t.women.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("theta_men={}\n", men.join(" ")));
            out.push_str(&format!("theta_women={}\n", women.join(" ")));
        }
        CertificateKind::YAssignment(y) => {
            out.push_str("kind=y\n");
            for row in y {
                let cells: Vec<&str> = row.iter().map(|b| if *b { "1" } else { "0" }).collect();
                out.push_str(&cells.join(" "));
                out.push('\n');
            }
        }
    }
    out
}

pub fn parse_certificate(text: &str) -> Result<SolveCertificate> {
    let mut lines = Lines::new(text);
    expect_header(&mut lines, "certificate v1")?;
    let (ln, eps_line) = lines.expect("eps=<rational>")?;
    let epsilon = parse_rat(
        eps_line.strip_prefix("eps=").ok_or_else(|| Error::Parse {
            line: ln,
            msg: "expected 'eps='".into(),
        })?,
        ln,
    )?;
    let (ln, kind_line) = lines.expect("kind=")?;
    match kind_line {
        "kind=threshold" => {
            let (ln_m, men_line) = lines.expect("theta_men=")?;
            let men_text = men_line
                .strip_prefix("theta_men=")
                .ok_or_else(|| Error::Parse {
                    line: ln_m,
                    msg: "expected 'theta_men='".into(),
                })?;
            let men: Result<Vec<Rat>> = men_text
                .split_whitespace()
                .map(|t| parse_rat(t, ln_m))
                .collect();
            let (ln_w, women_line) = lines.expect("theta_women=")?;
            let women_text =
                women_line
                    .strip_prefix("theta_women=")
                    .ok_or_else(|| Error::Parse {
                        line: ln_w,
                        msg: "expected 'theta_women='".into(),
                    })?;
            let women: Result<Vec<Rat>> = women_text
                .split_whitespace()
                .map(|t| parse_rat(t, ln_w))
                .collect();
            Ok(SolveCertificate {
                epsilon,
                kind: CertificateKind::Thresholds(ThresholdVector {
                    men: men?,
                    women: women?,
                }),
            })
        }
        "kind=y" => {
            let mut rows = Vec::new();
            while let Some((ln_y, row)) = lines.next() {
                let bits: Result<Vec<bool>> = row
                    .split_whitespace()
                    .map(|t| match t {
                        "0" => Ok(false),
                        "1" => Ok(true),
                        _ => Err(Error::Parse {
                            line: ln_y,
                            msg: format!("bad bit '{t}'"),
                        }),
                    })
                    .collect();
                rows.push(bits?);
            }
            Ok(SolveCertificate {
                epsilon,
                kind: CertificateKind::YAssignment(rows),
            })
        }
        other => Err(Error::Parse {
            line: ln,
            msg: format!("unknown certificate kind '{other}'"),
        }),
    }
}
