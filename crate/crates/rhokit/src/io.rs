//! JSON file formats for kernels and symmetry generators.
//!
//! Complex numbers are encoded as two-element arrays `[re, im]`; matrices as
//! row-major nested arrays of those pairs.
//!
//! Kernel files hold a single object:
//!
//! ```json
//! { "dim": 2, "form": "choi", "data": [[[1.0, 0.0], ...], ...] }
//! ```
//!
//! with `form` one of `"choi"`, `"transfer"` (both: a d²×d² matrix), or
//! `"kraus"` (a list of d×d matrices). Loading converts to the choi layout.
//!
//! Generator files hold the per-direction data of a continuous symmetry:
//!
//! ```json
//! {
//!   "dim": 2, "r_dim": 1,
//!   "T": [[[..]]],
//!   "structure_constants": [[[0.0]]],
//!   "noise": [[{ "delta": 1.0, "u": [[..]] }]]
//! }
//! ```
//!
//! where `T` lists one Hermitian matrix per direction,
//! `structure_constants` is the r³ nested real array `C[r][s][t]`, and
//! `noise` lists, for each unit direction, its `(delta, u)` terms.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::channels::{kraus_kernel, Kernel};
use crate::error::{Error, Result};
use crate::generators::{NoiseTerm, StructureConstants, SymmetryGenerator, TableNoise};
use crate::linalg::CMatrix;

fn parse_err(context: &str, detail: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{context}: {detail}"))
}

fn parse_complex(value: &Value, context: &str) -> Result<Complex64> {
    let pair = value
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| parse_err(context, "expected a [re, im] pair"))?;
    let re = pair[0]
        .as_f64()
        .ok_or_else(|| parse_err(context, "real part is not a number"))?;
    let im = pair[1]
        .as_f64()
        .ok_or_else(|| parse_err(context, "imaginary part is not a number"))?;
    Ok(Complex64::new(re, im))
}

fn parse_matrix(value: &Value, rows: usize, cols: usize, context: &str) -> Result<CMatrix> {
    let outer = value
        .as_array()
        .ok_or_else(|| parse_err(context, "expected a nested array"))?;
    if outer.len() != rows {
        return Err(parse_err(
            context,
            format!("expected {rows} rows, found {}", outer.len()),
        ));
    }
    let mut m = CMatrix::zeros(rows, cols);
    for (i, row) in outer.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| parse_err(context, format!("row {i} is not an array")))?;
        if row.len() != cols {
            return Err(parse_err(
                context,
                format!("row {i}: expected {cols} entries, found {}", row.len()),
            ));
        }
        for (j, entry) in row.iter().enumerate() {
            m[(i, j)] = parse_complex(entry, &format!("{context}[{i}][{j}]"))?;
        }
    }
    Ok(m)
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn matrix_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| complex_json(m[(i, j)])).collect()))
            .collect(),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelFile {
    dim: usize,
    form: String,
    data: Value,
}

/// Parse a kernel from JSON text.
pub fn load_kernel_str(text: &str) -> Result<Kernel> {
    let file: KernelFile = serde_json::from_str(text).map_err(|e| parse_err("kernel file", e))?;
    let d = file.dim;
    if d == 0 {
        return Err(parse_err("kernel file", "dim must be positive"));
    }
    match file.form.as_str() {
        "choi" => Kernel::from_choi(d, parse_matrix(&file.data, d * d, d * d, "data")?),
        "transfer" => Kernel::from_transfer(d, parse_matrix(&file.data, d * d, d * d, "data")?),
        "kraus" => {
            let list = file
                .data
                .as_array()
                .ok_or_else(|| parse_err("data", "expected a list of matrices"))?;
            if list.is_empty() {
                return Err(parse_err("data", "empty operator list"));
            }
            let ops = list
                .iter()
                .enumerate()
                .map(|(k, m)| parse_matrix(m, d, d, &format!("data[{k}]")))
                .collect::<Result<Vec<_>>>()?;
            kraus_kernel(&ops)
        }
        other => Err(parse_err("form", format!("unknown kernel form {other:?}"))),
    }
}

/// Load a kernel file from disk.
pub fn load_kernel(path: &Path) -> Result<Kernel> {
    let text = fs::read_to_string(path).map_err(|e| parse_err(&path.display().to_string(), e))?;
    load_kernel_str(&text)
}

/// Serialize a kernel in the requested form (`"choi"` or `"transfer"`).
pub fn kernel_to_json(kernel: &Kernel, form: &str) -> Result<String> {
    let data = match form {
        "choi" => matrix_json(kernel.choi()),
        "transfer" => matrix_json(&kernel.transfer()),
        other => {
            return Err(Error::InvalidInput(format!(
                "cannot serialize kernel form {other:?}"
            )))
        }
    };
    let doc = json!({ "dim": kernel.dim(), "form": form, "data": data });
    serde_json::to_string_pretty(&doc).map_err(|e| parse_err("kernel serialization", e))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorFile {
    dim: usize,
    r_dim: usize,
    #[serde(rename = "T")]
    t: Vec<Value>,
    structure_constants: Value,
    noise: Vec<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseTermFile {
    delta: f64,
    u: Value,
}

fn parse_constants(value: &Value, r_dim: usize) -> Result<Vec<f64>> {
    let context = "structure_constants";
    let level_r = value
        .as_array()
        .filter(|a| a.len() == r_dim)
        .ok_or_else(|| parse_err(context, format!("expected {r_dim} outer entries")))?;
    let mut out = Vec::with_capacity(r_dim * r_dim * r_dim);
    for (r, level_s) in level_r.iter().enumerate() {
        let level_s = level_s
            .as_array()
            .filter(|a| a.len() == r_dim)
            .ok_or_else(|| parse_err(context, format!("bad shape at [{r}]")))?;
        for (s, level_t) in level_s.iter().enumerate() {
            let level_t = level_t
                .as_array()
                .filter(|a| a.len() == r_dim)
                .ok_or_else(|| parse_err(context, format!("bad shape at [{r}][{s}]")))?;
            for (t, entry) in level_t.iter().enumerate() {
                out.push(entry.as_f64().ok_or_else(|| {
                    parse_err(context, format!("[{r}][{s}][{t}] is not a number"))
                })?);
            }
        }
    }
    Ok(out)
}

/// Parse a symmetry generator from JSON text. The structure constants and
/// the matrices are validated on construction.
pub fn load_generator_str(text: &str) -> Result<SymmetryGenerator> {
    let file: GeneratorFile =
        serde_json::from_str(text).map_err(|e| parse_err("generator file", e))?;
    let d = file.dim;
    if d == 0 || file.r_dim == 0 {
        return Err(parse_err(
            "generator file",
            "dim and r_dim must be positive",
        ));
    }
    if file.t.len() != file.r_dim {
        return Err(parse_err(
            "T",
            format!("expected {} matrices, found {}", file.r_dim, file.t.len()),
        ));
    }
    if file.noise.len() != file.r_dim {
        return Err(parse_err(
            "noise",
            format!(
                "expected {} direction entries, found {}",
                file.r_dim,
                file.noise.len()
            ),
        ));
    }
    let t = file
        .t
        .iter()
        .enumerate()
        .map(|(r, m)| parse_matrix(m, d, d, &format!("T[{r}]")))
        .collect::<Result<Vec<_>>>()?;
    let sc = StructureConstants::new(
        file.r_dim,
        parse_constants(&file.structure_constants, file.r_dim)?,
    )?;
    let mut per_direction = Vec::with_capacity(file.r_dim);
    for (r, terms) in file.noise.iter().enumerate() {
        let terms = terms
            .as_array()
            .ok_or_else(|| parse_err(&format!("noise[{r}]"), "expected a list of terms"))?;
        let mut parsed = Vec::with_capacity(terms.len());
        for (a, term) in terms.iter().enumerate() {
            let term: NoiseTermFile = serde_json::from_value(term.clone())
                .map_err(|e| parse_err(&format!("noise[{r}][{a}]"), e))?;
            parsed.push(NoiseTerm {
                delta: term.delta,
                u: parse_matrix(&term.u, d, d, &format!("noise[{r}][{a}].u"))?,
            });
        }
        per_direction.push(parsed);
    }
    SymmetryGenerator::new(t, sc, Arc::new(TableNoise::new(per_direction)))
}

/// Load a generator file from disk.
pub fn load_generator(path: &Path) -> Result<SymmetryGenerator> {
    let text = fs::read_to_string(path).map_err(|e| parse_err(&path.display().to_string(), e))?;
    load_generator_str(&text)
}

/// Serialize a symmetry generator, sampling its noise model at the unit
/// directions.
pub fn generator_to_json(g: &SymmetryGenerator) -> Result<String> {
    let r_dim = g.r_dim();
    let constants: Vec<Vec<Vec<f64>>> = (0..r_dim)
        .map(|r| {
            (0..r_dim)
                .map(|s| {
                    (0..r_dim)
                        .map(|t| g.structure_constants().get(r, s, t))
                        .collect()
                })
                .collect()
        })
        .collect();
    let noise: Vec<Value> = (0..r_dim)
        .map(|r| {
            let mut e = vec![0.0; r_dim];
            e[r] = 1.0;
            Value::Array(
                g.noise_terms(&e)
                    .iter()
                    .map(|term| json!({ "delta": term.delta, "u": matrix_json(&term.u) }))
                    .collect(),
            )
        })
        .collect();
    let doc = json!({
        "dim": g.dim(),
        "r_dim": r_dim,
        "T": g.t().iter().map(matrix_json).collect::<Vec<_>>(),
        "structure_constants": constants,
        "noise": noise,
    });
    serde_json::to_string_pretty(&doc).map_err(|e| parse_err("generator serialization", e))
}
