//! Flat-file artifacts: construction tables as JSON, the line class as a
//! Plücker table in CSV or JSON, verification reports as JSON.
//!
//! Exports are deterministic byte-for-byte for a fixed configuration: all
//! orderings come from the models' sorted storage, and every field element
//! is written in both discrete-log and coefficient form so the tables can
//! be re-read under a different basis convention.

use crate::construction::{ConstructionModel, LineClassModel};
use crate::error::Result;
use crate::field::{Fe, FieldCtx, ONE, ZERO};
use crate::quadric::{canonicalize_vec, KleinMap, PluckerLine};
use crate::verify::Report;
use serde::Serialize;
use std::collections::HashMap;
use std::io::Write;

/// One field element in both exchange forms: discrete log to the recorded
/// primitive element (absent for zero), and little-endian coefficients
/// over the prime field.
#[derive(Serialize)]
pub struct ElementForm {
    pub dlog: Option<u32>,
    pub coeffs: Vec<u32>,
}

pub fn element_form(ctx: &FieldCtx, a: Fe) -> ElementForm {
    ElementForm {
        dlog: a.dlog(),
        coeffs: ctx.poly_coeffs(a),
    }
}

fn pair_form(ctx: &FieldCtx, pair: (Fe, Fe)) -> [ElementForm; 2] {
    [element_form(ctx, pair.0), element_form(ctx, pair.1)]
}

/// Labels the subfield F_q by packed base-p coordinates with respect to
/// the power basis of the subfield generator g = w^(q^2+q+1): zero maps
/// to 0, and for q = p the label is the ordinary residue.
pub struct FqEncoder {
    labels: HashMap<Fe, u32>,
}

impl FqEncoder {
    pub fn new(ctx: &FieldCtx) -> FqEncoder {
        let g = ctx.from_w_pow(ctx.big_n());
        let mut pows = vec![ONE];
        for _ in 1..ctx.n() {
            pows.push(ctx.mul(*pows.last().unwrap(), g));
        }
        let mut labels = HashMap::new();
        for code in 0..ctx.q() {
            let mut digits = code;
            let mut acc = ZERO;
            for &pw in &pows {
                acc = ctx.add(acc, ctx.mul(ctx.scalar(digits % ctx.p()), pw));
                digits /= ctx.p();
            }
            labels.insert(acc, code);
        }
        // the power basis really spans the subfield
        assert_eq!(labels.len(), ctx.q() as usize);
        FqEncoder { labels }
    }

    pub fn encode(&self, a: Fe) -> u32 {
        self.labels[&a]
    }
}

/// The construction tables: seed set, cube-root selectors, and the cone
/// as orbit representatives plus the full projective point list.
#[derive(Serialize)]
pub struct ConstructionExport {
    pub p: u32,
    pub n: u32,
    pub q: u32,
    pub modulus: Vec<u32>,
    pub subfield_generator: ElementForm,
    pub x_param: u32,
    pub seed_set: Vec<ElementForm>,
    pub selectors: Vec<SelectorExport>,
    pub orbit_reps: Vec<ElementForm>,
    pub points: Vec<[ElementForm; 2]>,
}

#[derive(Serialize)]
pub struct SelectorExport {
    pub base: ElementForm,
    pub cube_roots: Vec<ElementForm>,
}

impl ConstructionExport {
    pub fn new(model: &ConstructionModel, lc: &LineClassModel) -> ConstructionExport {
        let ctx = model.ctx();
        ConstructionExport {
            p: ctx.p(),
            n: ctx.n(),
            q: ctx.q(),
            modulus: ctx.modulus().to_vec(),
            subfield_generator: element_form(ctx, ctx.from_w_pow(ctx.big_n())),
            x_param: lc.x_param(),
            seed_set: model
                .orbit_seeds()
                .iter()
                .map(|&e| element_form(ctx, e))
                .collect(),
            selectors: model
                .selectors()
                .iter()
                .map(|(base, roots)| SelectorExport {
                    base: element_form(ctx, *base),
                    cube_roots: roots.iter().map(|&r| element_form(ctx, r)).collect(),
                })
                .collect(),
            orbit_reps: lc
                .orbit_reps()
                .iter()
                .map(|&r| element_form(ctx, r))
                .collect(),
            points: lc.points().iter().map(|&p| pair_form(ctx, p)).collect(),
        }
    }
}

/// One line of the class: six Plücker coordinates in the fixed column
/// order and two canonical spanning points of PG(3,q), all cells in the
/// `FqEncoder` labeling.
#[derive(Serialize)]
pub struct LineRow {
    pub plucker: [u32; 6],
    pub point1: [u32; 4],
    pub point2: [u32; 4],
}

/// The full line-class table plus everything needed to reproduce it: the
/// field description and the Witt basis fixing the isometry.
#[derive(Serialize)]
pub struct LineTableExport {
    pub p: u32,
    pub n: u32,
    pub q: u32,
    pub x_param: u32,
    pub modulus: Vec<u32>,
    pub cell_encoding: String,
    pub witt_basis: Vec<[ElementForm; 2]>,
    pub rows: Vec<LineRow>,
}

impl LineTableExport {
    pub fn new(ctx: &FieldCtx, lc: &LineClassModel, km: &KleinMap) -> Result<LineTableExport> {
        let enc = FqEncoder::new(ctx);
        let mut rows = Vec::with_capacity(lc.len());
        for &pt in lc.points() {
            rows.push(line_row(ctx, km, &enc, pt)?);
        }
        Ok(LineTableExport {
            p: ctx.p(),
            n: ctx.n(),
            q: ctx.q(),
            x_param: lc.x_param(),
            modulus: ctx.modulus().to_vec(),
            cell_encoding: CELL_ENCODING_NOTE.to_string(),
            witt_basis: km.witt_basis().iter().map(|&b| pair_form(ctx, b)).collect(),
            rows,
        })
    }
}

const CELL_ENCODING_NOTE: &str =
    "base-p packed coordinates over powers of g = w^(q^2+q+1); 0 denotes zero";

fn line_row(ctx: &FieldCtx, km: &KleinMap, enc: &FqEncoder, pt: (Fe, Fe)) -> Result<LineRow> {
    let line: PluckerLine = km.line_of(ctx, pt)?;
    let (s1, s2) = line.span;
    let (s1, s2) = (canonicalize_vec(ctx, &s1), canonicalize_vec(ctx, &s2));
    Ok(LineRow {
        plucker: line.coords.map(|c| enc.encode(c)),
        point1: s1.map(|c| enc.encode(c)),
        point2: s2.map(|c| enc.encode(c)),
    })
}

fn dlog_label(form: &ElementForm) -> String {
    match form.dlog {
        None => "-".to_string(),
        Some(j) => j.to_string(),
    }
}

/// CSV with a '#' header block recording the field, the isometry, and the
/// cell encoding, then one row per line of the class.
pub fn write_line_table_csv<W: Write>(out: &mut W, table: &LineTableExport) -> Result<()> {
    writeln!(out, "# Cameron-Liebler line class, x = {}", table.x_param)?;
    let modulus: Vec<String> = table.modulus.iter().map(|c| c.to_string()).collect();
    writeln!(
        out,
        "# field: p={} n={} q={}; F_q^3 = F_p[t]/({}), little-endian, w = t primitive",
        table.p,
        table.n,
        table.q,
        modulus.join(",")
    )?;
    writeln!(out, "# cells: {}", table.cell_encoding)?;
    let basis: Vec<String> = table
        .witt_basis
        .iter()
        .map(|[x, y]| format!("({},{})", dlog_label(x), dlog_label(y)))
        .collect();
    writeln!(
        out,
        "# isometry: Witt basis e1,f1,e2,f2,e3,f3 as (dlog,dlog) pairs over w, '-' for zero: {}",
        basis.join(" ")
    )?;
    writeln!(
        out,
        "p01,p02,p03,p23,p31,p12,pt1_0,pt1_1,pt1_2,pt1_3,pt2_0,pt2_1,pt2_2,pt2_3"
    )?;
    for row in &table.rows {
        let mut cells = Vec::with_capacity(14);
        cells.extend(row.plucker.iter().map(|c| c.to_string()));
        cells.extend(row.point1.iter().map(|c| c.to_string()));
        cells.extend(row.point2.iter().map(|c| c.to_string()));
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

pub fn write_json<W: Write, T: Serialize>(out: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

pub fn write_reports_json<W: Write>(out: &mut W, reports: &[Report]) -> Result<()> {
    write_json(out, &reports)
}
