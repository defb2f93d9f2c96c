//! CSV import/export. Floats are written with 17 significant digits so that
//! every value round-trips exactly; `#` lines carry metadata such as
//! `# period=L`.

use crate::error::{Error, Result};
use crate::gabor::GaborSweepRow;
use crate::pointsets::MultiSet;
use crate::sampling::{Model, SamplingOperator};
use crate::sis::CoeffSeq;
use crate::zeros::ZeroReport;
use num_complex::Complex64;
use std::io::{Read, Write};

/// `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `# comment` lines, a header and the rows.
pub fn write_csv<W, I>(w: &mut W, comments: &[String], header: &[&str], rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = Vec<String>>,
{
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(header)?;
    for r in rows {
        out.write_record(&r)?;
    }
    out.flush()?;
    Ok(())
}

/// A parsed table: `key=value` metadata from `#` lines plus records with
/// their source line numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<(usize, Vec<String>)>,
}

impl Table {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse { line: 1, msg: format!("missing column `{name}`") })
    }
}

pub fn read_table<R: Read>(mut r: R) -> Result<Table> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let mut meta = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.trim_start().strip_prefix('#') {
            for tok in rest.split_whitespace() {
                if let Some((k, v)) = tok.split_once('=') {
                    meta.push((k.to_string(), v.to_string()));
                }
            }
        }
    }
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        rows.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(Table { meta, header, rows })
}

pub(crate) fn parse_field<T: std::str::FromStr>(line: usize, field: &str, what: &str) -> Result<T> {
    field.parse().map_err(|_| Error::Parse { line, msg: format!("bad {what} `{field}`") })
}

fn cell(line: usize, row: &[String], i: usize) -> Result<&str> {
    row.get(i)
        .map(String::as_str)
        .ok_or_else(|| Error::Parse { line, msg: format!("missing field {}", i + 1) })
}

fn period_meta(t: &Table) -> Result<Option<f64>> {
    t.meta("period").map(|v| parse_field(1, v, "period")).transpose()
}

/// `lambda,mult` rows, optionally preceded by `# period=L`.
pub fn write_multiset<W: Write>(w: &mut W, ms: &MultiSet, comments: &[String]) -> Result<()> {
    let mut c = comments.to_vec();
    if let Some(l) = ms.period() {
        c.push(format!("period={}", fmt_f64(l)));
    }
    write_csv(w, &c, &["lambda", "mult"], ms.iter().map(|(p, m)| vec![fmt_f64(p), m.to_string()]))
}

pub fn read_multiset<R: Read>(r: R) -> Result<MultiSet> {
    let t = read_table(r)?;
    let (ci, cm) = (t.column("lambda")?, t.column("mult").ok());
    let mut pairs = Vec::with_capacity(t.rows.len());
    for (line, row) in &t.rows {
        let p: f64 = parse_field(*line, cell(*line, row, ci)?, "point")?;
        let m: usize = match cm {
            Some(i) => parse_field(*line, cell(*line, row, i)?, "multiplicity")?,
            None => 1,
        };
        pairs.push((p, m));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (points, mults) = pairs.into_iter().unzip();
    match period_meta(&t)? {
        Some(l) => MultiSet::periodic(points, mults, l),
        None => MultiSet::new(points, mults),
    }
}

/// `k,re` (real) or `k,re,im` rows; periodic sequences carry `# period=L`.
pub fn write_coeffs<W: Write>(w: &mut W, c: &CoeffSeq, comments: &[String]) -> Result<()> {
    let mut cm = comments.to_vec();
    if let Some(l) = c.period() {
        cm.push(format!("period={l}"));
    }
    if c.is_real() {
        write_csv(w, &cm, &["k", "re"], c.terms().map(|(k, v)| vec![k.to_string(), fmt_f64(v.re)]))
    } else {
        write_csv(
            w,
            &cm,
            &["k", "re", "im"],
            c.terms().map(|(k, v)| vec![k.to_string(), fmt_f64(v.re), fmt_f64(v.im)]),
        )
    }
}

pub fn read_coeffs<R: Read>(r: R) -> Result<CoeffSeq> {
    let t = read_table(r)?;
    let (ck, cr, ci) = (t.column("k")?, t.column("re")?, t.column("im").ok());
    let mut terms = Vec::with_capacity(t.rows.len());
    for (line, row) in &t.rows {
        let k: i64 = parse_field(*line, cell(*line, row, ck)?, "index")?;
        let re: f64 = parse_field(*line, cell(*line, row, cr)?, "real part")?;
        let im: f64 = match ci {
            Some(i) => parse_field(*line, cell(*line, row, i)?, "imaginary part")?,
            None => 0.0,
        };
        terms.push((*line, k, Complex64::new(re, im)));
    }
    if terms.is_empty() {
        return Err(Error::Parse { line: 1, msg: "no coefficients".into() });
    }
    terms.sort_by_key(|t| t.1);
    let offset = terms[0].1;
    for (i, (line, k, _)) in terms.iter().enumerate() {
        if *k != offset + i as i64 {
            return Err(Error::Parse { line: *line, msg: format!("indices must be consecutive, found {k}") });
        }
    }
    let values = terms.into_iter().map(|t| t.2).collect::<Vec<_>>();
    match t.meta("period") {
        Some(v) => {
            let l: usize = parse_field(1, v, "integer period")?;
            if offset != 0 || values.len() != l {
                return Err(Error::Parse { line: 1, msg: format!("periodic coefficients need k = 0..{l}") });
            }
            CoeffSeq::periodic(values)
        }
        None => CoeffSeq::finite(offset, values),
    }
}

/// Dense matrix as CSV (one row per sample) plus a JSON sidecar describing
/// the row labels `(lambda, j)`, the column indices and the model.
pub fn write_operator<W: Write, S: Write>(op: &SamplingOperator, matrix: &mut W, sidecar: &mut S) -> Result<()> {
    let header: Vec<String> = op.cols.iter().map(|k| format!("k{k}")).collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = op.matrix.row_iter().map(|r| r.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>());
    write_csv(matrix, &[], &header_refs, rows)?;
    let model = match op.model {
        Model::Periodic { period } => format!("{{\"kind\": \"periodic\", \"period\": {period}}}"),
        Model::Truncated { k_pad } => format!("{{\"kind\": \"truncated\", \"k_pad\": {k_pad}}}"),
    };
    let rows: Vec<String> = op.rows.iter().map(|(l, j)| format!("[{}, {j}]", fmt_f64(*l))).collect();
    let cols: Vec<String> = op.cols.iter().map(i64::to_string).collect();
    writeln!(
        sidecar,
        "{{\n  \"model\": {model},\n  \"rows\": [{}],\n  \"cols\": [{}]\n}}",
        rows.join(", "),
        cols.join(", ")
    )?;
    Ok(())
}

/// `lambda,j,value` rows aligned with the operator rows.
pub fn write_samples<W: Write>(w: &mut W, rows: &[(f64, usize)], values: &[f64], comments: &[String]) -> Result<()> {
    if rows.len() != values.len() {
        return Err(Error::DimensionMismatch { expected: rows.len(), got: values.len() });
    }
    write_csv(
        w,
        comments,
        &["lambda", "j", "value"],
        rows.iter().zip(values).map(|((l, j), v)| vec![fmt_f64(*l), j.to_string(), fmt_f64(*v)]),
    )
}

pub fn read_samples<R: Read>(r: R) -> Result<Vec<((f64, usize), f64)>> {
    let t = read_table(r)?;
    let (cl, cj, cv) = (t.column("lambda")?, t.column("j")?, t.column("value")?);
    t.rows
        .iter()
        .map(|(line, row)| {
            Ok((
                (
                    parse_field(*line, cell(*line, row, cl)?, "point")?,
                    parse_field(*line, cell(*line, row, cj)?, "derivative order")?,
                ),
                parse_field(*line, cell(*line, row, cv)?, "value")?,
            ))
        })
        .collect()
}

/// `r,n_z,n_p` rows.
pub fn write_zero_report<W: Write>(w: &mut W, rep: &ZeroReport, comments: &[String]) -> Result<()> {
    let rows = rep
        .radii
        .iter()
        .zip(rep.n_z.iter().zip(&rep.n_p))
        .map(|(r, (z, p))| vec![fmt_f64(*r), z.to_string(), p.to_string()]);
    write_csv(w, comments, &["r", "n_z", "n_p"], rows)
}

/// Plain-text summary of a Jensen audit.
pub fn zero_report_summary(rep: &ZeroReport) -> String {
    format!(
        "R = {}\nzeros located = {}\npoles inside = {}\norder at origin = {}\nlhs = {}\nrhs = {}\ngap = {}\nrelative gap = {}\n",
        fmt_f64(rep.radius),
        rep.zeros.iter().map(|z| z.1).sum::<usize>(),
        rep.poles.len(),
        rep.order_at_origin,
        fmt_f64(rep.lhs),
        fmt_f64(rep.rhs),
        fmt_f64(rep.gap()),
        fmt_f64(rep.relative_gap())
    )
}

/// `alpha,density,x_min,lower,upper` rows.
pub fn write_gabor_sweep<W: Write>(w: &mut W, rows: &[GaborSweepRow], comments: &[String]) -> Result<()> {
    write_csv(
        w,
        comments,
        &["alpha", "density", "x_min", "lower", "upper"],
        rows.iter().map(|r| vec![fmt_f64(r.alpha), fmt_f64(r.density), fmt_f64(r.x_min), fmt_f64(r.lower), fmt_f64(r.upper)]),
    )
}
