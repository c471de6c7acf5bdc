use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::run::{ResultRow, Verdict};
use crate::analytic::{diversity_slope, efficiency};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "snr_db,mode,N,K,M,per_analytic,per_sim,ci_low,ci_high,trials,seed";

pub const CSV_FILE: &str = "results.csv";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const GNUPLOT_FILE: &str = "plot.gp";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReportOptions {
    pub gnuplot: bool,
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn csv_string(rows: &[ResultRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::Config(vec![format!(
            "unexpected CSV header {:?}, want {CSV_HEADER:?}",
            header.join(",")
        )]));
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn load_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(f)
}

/// Rows grouped by curve id, in order of first appearance.
pub fn curves(rows: &[ResultRow]) -> Vec<(String, Vec<&ResultRow>)> {
    let mut out: Vec<(String, Vec<&ResultRow>)> = Vec::new();
    for r in rows {
        let id = r.curve_id();
        match out.iter_mut().find(|(c, _)| *c == id) {
            Some((_, v)) => v.push(r),
            None => out.push((id, vec![r])),
        }
    }
    out
}

/// `(snr_db, per)` pairs of a curve, preferring analytic values.
pub fn curve_points(rows: &[&ResultRow]) -> Vec<(f64, f64)> {
    rows.iter()
        .filter_map(|r| r.per_analytic.or(r.per_sim).map(|p| (r.snr_db, p)))
        .collect()
}

/// Plain-text summary: per-curve efficiency and slope, then every row whose
/// analytic value falls outside the simulated interval.
pub fn summary(rows: &[ResultRow]) -> Result<String> {
    let mut s = String::new();
    writeln!(s, "curves").unwrap();
    writeln!(
        s,
        "{:<16} {:>4} {:>4} {:>5} {:>4} {:>8} {:>9} {:>6} {:>8}",
        "curve", "mode", "N", "K", "M", "FR", "eta", "points", "slope"
    )
    .unwrap();
    for (id, rs) in curves(rows) {
        let r0 = rs[0];
        let eff = efficiency(r0.m, r0.n)?;
        let pts: Vec<_> = curve_points(&rs)
            .into_iter()
            .filter(|(_, p)| *p > 0.0)
            .collect();
        let slope = diversity_slope(&pts)
            .map(|x| format!("{x:.3}"))
            .unwrap_or_else(|_| "-".to_owned());
        writeln!(
            s,
            "{:<16} {:>4} {:>4} {:>5} {:>4} {:>8.6} {:>9.7} {:>6} {:>8}",
            id,
            r0.mode,
            r0.n,
            r0.k,
            r0.m,
            eff.forwarding_rate,
            eff.eta,
            rs.len(),
            slope
        )
        .unwrap();
    }

    let compared: Vec<_> = rows
        .iter()
        .filter_map(|r| r.verdict().map(|v| (r, v)))
        .collect();
    if !compared.is_empty() {
        let flagged: Vec<_> = compared.iter().filter(|(r, _)| r.outside_ci()).collect();
        let failed = compared.iter().filter(|(_, v)| !v.passed()).count();
        writeln!(s).unwrap();
        writeln!(
            s,
            "agreement: {} rows compared, {} outside simulated 95% CI, {} failing",
            compared.len(),
            flagged.len(),
            failed
        )
        .unwrap();
        for (r, v) in flagged {
            writeln!(
                s,
                "  [outside-ci] {} @ {} dB: analytic {:.4e}, sim {:.4e} [{:.4e}, {:.4e}], rel {:.1}% {}",
                r.curve_id(),
                r.snr_db,
                r.per_analytic.unwrap_or(f64::NAN),
                r.per_sim.unwrap_or(f64::NAN),
                r.ci_low.unwrap_or(f64::NAN),
                r.ci_high.unwrap_or(f64::NAN),
                100.0 * r.relative_error().unwrap_or(f64::NAN),
                v.label()
            )
            .unwrap();
        }
    }
    Ok(s)
}

fn gnuplot_script(rows: &[ResultRow]) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\nset logscale y\nset key outside\n");
    s.push_str("set xlabel 'SNR (dB)'\nset ylabel 'PER'\nset format y '10^{%L}'\n");
    let mut plots = Vec::new();
    for (id, rs) in curves(rows) {
        let r = rs[0];
        let sel = format!(
            "(strcol(2) eq '{}' && $3=={} && $4=={} && $5=={} ? $1 : NaN)",
            r.mode, r.n, r.k, r.m
        );
        if rs.iter().any(|r| r.per_analytic.is_some()) {
            plots.push(format!(
                "'{CSV_FILE}' every ::1 using {sel}:6 with lines title '{id}'"
            ));
        }
        if rs.iter().any(|r| r.per_sim.is_some()) {
            plots.push(format!(
                "'{CSV_FILE}' every ::1 using {sel}:7:8:9 with yerrorbars title '{id} sim'"
            ));
        }
    }
    s.push_str("plot ");
    s.push_str(&plots.join(", \\\n     "));
    s.push('\n');
    s
}

/// Writes the CSV, the summary and optionally a gnuplot script into `dir`.
pub fn emit_report(rows: &[ResultRow], dir: &Path, opts: ReportOptions) -> Result<Vec<PathBuf>> {
    if rows.is_empty() {
        return Err(Error::Config(vec!["no rows to report".to_owned()]));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: &str, body: &str| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    put(CSV_FILE, &csv_string(rows)?)?;
    put(SUMMARY_FILE, &summary(rows)?)?;
    if opts.gnuplot {
        put(GNUPLOT_FILE, &gnuplot_script(rows))?;
    }
    Ok(written)
}

/// Whether any compared row fails both the CI and the relative tolerance.
pub fn any_disagreement(rows: &[ResultRow]) -> bool {
    rows.iter().any(|r| r.verdict() == Some(Verdict::Disagree))
}
