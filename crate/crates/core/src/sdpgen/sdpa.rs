//! SDPA-sparse (.dat-s) writer and reader.
//!
//! The assembled program is
//!
//! ```text
//!   maximize    F_0 . Y
//!   subject to  F_k . Y = c_k   (k = 1..m),   Y in product of PSD blocks
//! ```
//!
//! which is exactly the dual side of the SDPA standard form, so the file
//! carries c on the objective line (line 4), our objective matrix as the
//! constant matrix (matno 0), and one constraint matrix per row. Diagonal
//! blocks are written with negative sizes. Entries are upper-triangular,
//! deterministic order, scientific notation with a configurable number of
//! significant digits (default 40). Solvers report the programs value from
//! both sides; the Y-feasible (dual) side is the safe lower bound.

use super::{SdpGenError, SdpProblem};
use crate::scalar::Scalar;
use crate::sosmodel::{BlockKind, Row, VarId};
use std::io::Write;

pub const DEFAULT_DIGITS: usize = 40;

/// Serializes the problem in SDPA-sparse format.
pub fn emit_sdpa_sparse(problem: &SdpProblem, digits: usize) -> String {
    let mut out = String::new();
    out.push_str(&format!("{}\n", problem.rows.len()));
    out.push_str(&format!("{}\n", problem.blocks.len()));
    let sizes: Vec<String> = problem
        .blocks
        .iter()
        .map(|(_, size, kind)| match kind {
            BlockKind::Psd => format!("{}", size),
            BlockKind::Diagonal => format!("-{}", size),
        })
        .collect();
    out.push_str(&sizes.join(" "));
    out.push('\n');
    let c: Vec<String> = problem.rows.iter().map(|r| r.rhs.to_sci_string(digits)).collect();
    out.push_str(&c.join(" "));
    out.push('\n');
    let emit_entries = |matno: usize, entries: &[(VarId, Scalar)], out: &mut String| {
        let mut sorted: Vec<&(VarId, Scalar)> = entries.iter().collect();
        sorted.sort_by_key(|(v, _)| *v);
        for (v, val) in sorted {
            out.push_str(&format!(
                "{} {} {} {} {}\n",
                matno,
                v.block + 1,
                v.i + 1,
                v.j + 1,
                val.to_sci_string(digits)
            ));
        }
    };
    emit_entries(0, &problem.objective, &mut out);
    for (k, row) in problem.rows.iter().enumerate() {
        emit_entries(k + 1, &row.entries, &mut out);
    }
    out
}

pub fn write_sdpa_sparse(
    problem: &SdpProblem,
    path: &std::path::Path,
    digits: usize,
) -> Result<(), SdpGenError> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(emit_sdpa_sparse(problem, digits).as_bytes())?;
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum SdpaParseError {
    #[error("missing line {0}")]
    MissingLine(&'static str),
    #[error("malformed number: {0}")]
    BadNumber(String),
    #[error("entry outside declared block: {0:?}")]
    EntryOutOfRange(String),
}

/// Parses SDPA-sparse text back into a problem (block names synthesized).
/// Values are read at the given precision.
pub fn parse_sdpa_sparse(text: &str, prec: u32) -> Result<SdpProblem, SdpaParseError> {
    let mut lines = text
        .lines()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty() && !l.starts_with('*') && !l.starts_with('"'));
    let m: usize = next_number(lines.next().ok_or(SdpaParseError::MissingLine("mDim"))?)?;
    let nblocks: usize =
        next_number(lines.next().ok_or(SdpaParseError::MissingLine("nBlock"))?)?;
    let sizes_line = lines.next().ok_or(SdpaParseError::MissingLine("blockStruct"))?;
    let mut blocks = Vec::new();
    for (k, tok) in sizes_line
        .split(|c: char| c.is_whitespace() || c == ',' || c == '(' || c == ')' || c == '{' || c == '}')
        .filter(|t| !t.is_empty())
        .enumerate()
    {
        let v: i64 = tok.parse().map_err(|_| SdpaParseError::BadNumber(tok.into()))?;
        let (size, kind) = if v < 0 {
            ((-v) as usize, BlockKind::Diagonal)
        } else {
            (v as usize, BlockKind::Psd)
        };
        blocks.push((format!("b{}", k + 1), size, kind));
    }
    assert_eq!(blocks.len(), nblocks);
    let mut rows: Vec<Row> = Vec::new();
    if m > 0 {
        let c_line = lines.next().ok_or(SdpaParseError::MissingLine("objective"))?;
        for tok in c_line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
        {
            let v: f64 = tok.parse().map_err(|_| SdpaParseError::BadNumber(tok.into()))?;
            rows.push(Row { entries: Vec::new(), rhs: Scalar::from_f64(v, prec) });
        }
        assert_eq!(rows.len(), m);
    }
    let mut objective = Vec::new();
    for line in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 5 {
            return Err(SdpaParseError::BadNumber(line.into()));
        }
        let matno: usize = next_number(toks[0])?;
        let block: usize = next_number(toks[1])?;
        let i: usize = next_number(toks[2])?;
        let j: usize = next_number(toks[3])?;
        let v: f64 = toks[4]
            .parse()
            .map_err(|_| SdpaParseError::BadNumber(toks[4].into()))?;
        if block == 0 || block > blocks.len() {
            return Err(SdpaParseError::EntryOutOfRange(line.into()));
        }
        let size = blocks[block - 1].1;
        if i == 0 || j == 0 || i > size || j > size || i > j {
            return Err(SdpaParseError::EntryOutOfRange(line.into()));
        }
        let var = VarId { block: block - 1, i: i - 1, j: j - 1 };
        let val = Scalar::from_f64(v, prec);
        if matno == 0 {
            objective.push((var, val));
        } else if matno <= rows.len() {
            rows[matno - 1].entries.push((var, val));
        } else {
            return Err(SdpaParseError::EntryOutOfRange(line.into()));
        }
    }
    Ok(SdpProblem { prec, blocks, rows, objective })
}

fn next_number<T: std::str::FromStr>(tok: &str) -> Result<T, SdpaParseError> {
    tok.split_whitespace()
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| SdpaParseError::BadNumber(tok.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::DEFAULT_PRECISION as P;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_problem_emits_header_only() {
        let p = SdpProblem { prec: P, blocks: vec![], rows: vec![], objective: vec![] };
        let s = emit_sdpa_sparse(&p, 10);
        assert_eq!(s, "0\n0\n\n\n");
    }

    #[test]
    fn golden_tiny_file() {
        // min x s.t. x >= 1 over a single 1x1 block: both sides value 1
        let p = SdpProblem {
            prec: P,
            blocks: vec![("x".into(), 1, BlockKind::Psd)],
            rows: vec![Row {
                entries: vec![(VarId { block: 0, i: 0, j: 0 }, Scalar::one(P))],
                rhs: Scalar::one(P),
            }],
            objective: vec![(VarId { block: 0, i: 0, j: 0 }, Scalar::one(P))],
        };
        let got = emit_sdpa_sparse(&p, 3);
        let want = "1\n1\n1\n1.00e0\n0 1 1 1 1.00e0\n1 1 1 1 1.00e0\n";
        assert_eq!(got, want);
    }

    #[test]
    fn round_trip_random_problems() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let nblocks = rng.gen_range(1..4usize);
            let blocks: Vec<(String, usize, BlockKind)> = (0..nblocks)
                .map(|k| {
                    let size = rng.gen_range(1..4usize);
                    let kind = if rng.gen_bool(0.3) { BlockKind::Diagonal } else { BlockKind::Psd };
                    (format!("b{}", k + 1), size, kind)
                })
                .collect();
            let rand_entries = |rng: &mut ChaCha8Rng| {
                let mut entries = Vec::new();
                for (b, (_, size, kind)) in blocks.iter().enumerate() {
                    for i in 0..*size {
                        for j in i..*size {
                            if *kind == BlockKind::Diagonal && i != j {
                                continue;
                            }
                            if rng.gen_bool(0.5) {
                                let v = (rng.gen::<f64>() - 0.5) * 10.0;
                                entries.push((VarId { block: b, i, j }, Scalar::from_f64(v, P)));
                            }
                        }
                    }
                }
                entries
            };
            let m = rng.gen_range(0..4usize);
            let rows: Vec<Row> = (0..m)
                .map(|_| Row {
                    entries: rand_entries(&mut rng),
                    rhs: Scalar::from_f64(rng.gen::<f64>(), P),
                })
                .collect();
            let objective = rand_entries(&mut rng);
            let p = SdpProblem { prec: P, blocks, rows, objective };
            let text = emit_sdpa_sparse(&p, 40);
            let q = parse_sdpa_sparse(&text, P).unwrap();
            assert_eq!(emit_sdpa_sparse(&q, 40), text);
        }
    }

    #[test]
    fn emission_is_deterministic() {
        let p = SdpProblem {
            prec: P,
            blocks: vec![("b".into(), 2, BlockKind::Psd)],
            rows: vec![Row {
                entries: vec![
                    (VarId { block: 0, i: 1, j: 1 }, Scalar::from_f64(2.0, P)),
                    (VarId { block: 0, i: 0, j: 1 }, Scalar::from_f64(-1.0, P)),
                ],
                rhs: Scalar::zero(P),
            }],
            objective: vec![],
        };
        let a = emit_sdpa_sparse(&p, 40);
        let b = emit_sdpa_sparse(&p, 40);
        assert_eq!(a, b);
        // entries sorted by (block, i, j)
        let lines: Vec<&str> = a.lines().collect();
        assert!(lines[4].starts_with("1 1 1 2"));
        assert!(lines[5].starts_with("1 1 2 2"));
    }
}
