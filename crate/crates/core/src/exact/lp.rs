use std::fmt::{self, Write as _};

use crate::model::{Instance, Variant};

use super::ExactError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
}

/// One linear constraint `sum coef * var (<=|=) rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub name: String,
    pub terms: Vec<(i64, String)>,
    pub sense: Sense,
    pub rhs: i64,
}

/// Minimize `y` over integral arc variables: one robust row per scenario,
/// one conservation row per vertex, arc bounds `0 <= x <= u`, `y` free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearizedModel {
    /// Arc variables in arc order, then `y`.
    pub variables: Vec<String>,
    pub robust_rows: Vec<Row>,
    pub conservation_rows: Vec<Row>,
    /// Upper bound per arc variable.
    pub upper_bounds: Vec<i64>,
}

const OBJECTIVE_VAR: &str = "y";
const TERMS_PER_LINE: usize = 8;

fn arc_var(tail: usize, head: usize) -> String {
    format!("x_{}_{}", tail + 1, head + 1)
}

impl LinearizedModel {
    /// Builds the model for `variant`. The deviation model needs the
    /// per-scenario optima `z`, which shift the robust right-hand sides.
    pub fn build(instance: &Instance, variant: Variant, optima: Option<&[i64]>) -> Result<Self, ExactError> {
        let net = instance.network();
        let k = instance.scenario_count();
        let shift: Vec<i64> = match variant {
            Variant::Absolute => vec![0; k],
            Variant::Deviation => match optima {
                Some(z) if z.len() == k => z.to_vec(),
                other => return Err(ExactError::MissingOptima { expected: k, got: other.map_or(0, <[i64]>::len) }),
            },
        };
        let arc_vars: Vec<String> = net.arcs().iter().map(|a| arc_var(a.tail, a.head)).collect();
        let robust_rows = instance
            .scenarios()
            .iter()
            .zip(&shift)
            .enumerate()
            .map(|(s, (costs, &z))| {
                let mut terms: Vec<(i64, String)> =
                    costs.iter().zip(&arc_vars).filter(|(c, _)| **c != 0).map(|(c, v)| (*c, v.clone())).collect();
                terms.push((-1, OBJECTIVE_VAR.to_string()));
                Row { name: format!("robust_{}", s + 1), terms, sense: Sense::Le, rhs: z }
            })
            .collect();
        let conservation_rows = (0..net.vertex_count())
            .map(|v| {
                let out = net.out_arcs(v).iter().map(|&a| (1, arc_vars[a].clone()));
                let inn = net.in_arcs(v).iter().map(|&a| (-1, arc_vars[a].clone()));
                Row {
                    name: format!("flow_{}", v + 1),
                    terms: out.chain(inn).collect(),
                    sense: Sense::Eq,
                    rhs: net.supply(v, instance.flow_value()),
                }
            })
            .collect();
        let upper_bounds = net.arcs().iter().map(|a| a.capacity).collect();
        let mut variables = arc_vars;
        variables.push(OBJECTIVE_VAR.to_string());
        Ok(Self { variables, robust_rows, conservation_rows, upper_bounds })
    }

    pub fn variable_count(&self) -> usize {
        self.variables.len()
    }

    fn arc_variables(&self) -> &[String] {
        &self.variables[..self.variables.len() - 1]
    }
}

fn write_row(out: &mut String, row: &Row) -> fmt::Result {
    write!(out, " {}:", row.name)?;
    if row.terms.is_empty() {
        // LP format rejects empty rows
        write!(out, " 0 {OBJECTIVE_VAR}")?;
    }
    for (i, (coef, var)) in row.terms.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if *coef < 0 {
            "-"
        } else if i == 0 {
            ""
        } else {
            "+"
        };
        let magnitude = coef.abs();
        let lead = if sign.is_empty() { "" } else { " " };
        if magnitude == 1 {
            write!(out, " {sign}{lead}{var}")?;
        } else {
            write!(out, " {sign}{lead}{magnitude} {var}")?;
        }
    }
    let op = match row.sense {
        Sense::Le => "<=",
        Sense::Eq => "=",
    };
    writeln!(out, " {op} {}", row.rhs)
}

impl fmt::Display for LinearizedModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        out.push_str("Minimize\n obj: y\nSubject To\n");
        for row in self.robust_rows.iter().chain(&self.conservation_rows) {
            write_row(&mut out, row)?;
        }
        out.push_str("Bounds\n");
        for (var, u) in self.arc_variables().iter().zip(&self.upper_bounds) {
            writeln!(out, " 0 <= {var} <= {u}")?;
        }
        writeln!(out, " {OBJECTIVE_VAR} free")?;
        out.push_str("Generals\n");
        for chunk in self.arc_variables().chunks(TERMS_PER_LINE) {
            writeln!(out, " {}", chunk.join(" "))?;
        }
        out.push_str("End\n");
        f.write_str(&out)
    }
}

/// LP-format text of the linearized robust model.
pub fn export_lp(instance: &Instance, variant: Variant, optima: Option<&[i64]>) -> Result<String, ExactError> {
    Ok(LinearizedModel::build(instance, variant, optima)?.to_string())
}
