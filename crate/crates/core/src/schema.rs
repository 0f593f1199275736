//! The JSON instance format.
//!
//! Every file carries a mandatory `"schema_version"` and a `"kind"`
//! discriminator; tensors are flat row-major arrays so nested-array shape
//! ambiguity never arises. Loading happens in three stages with distinct
//! error classes: text that is not JSON at all (parse error), JSON that does
//! not match the documented shape or declares mismatched tensor lengths
//! (schema error, reported with the offending field name), and well-shaped
//! data that violates a domain invariant (invariant error).
//!
//! Kinds:
//!
//! * `"instance"` — `sizes {a, c, g, k, w}` plus `strength_tensor`,
//!   `test_tensor`, `mix_tensor`; optional `exponents {p?, q, s}`, optional
//!   `family` (list of `{weight, a, c, g}`), optional
//!   `ball {dim, vertices, coeff}`.
//! * `"two_layer"` — `sizes {a, b, c, c1, g, k, w}`, `map`, and the seven
//!   layer tensors.
//! * `"multilinear"` — factored `sizes`, one test kernel and exponent per
//!   `G` factor, and the joint mix tensor.
//! * `"linear_map"` — operator `matrix` plus `domain_net` / `codomain_net`
//!   functionals and optional `probes`.
//! * `"lipschitz_map"` — metric matrices, a point `map`, and optional nets
//!   (defaulting to the distance-function nets).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::adapters::{distance_net, LinearOperatorSpec, LipschitzMapSpec};
use crate::mixing::{SeminormBallModel, TwoLayerInstance};
use crate::multilinear::MultilinearInstance;
use crate::{
    Error, ExponentParams, FamilyItem, Instance, Result, WeightedFamily,
};

pub const SCHEMA_VERSION: &str = "1";

/// Any object the CLI can load.
#[derive(Debug, Clone)]
pub enum LoadedSpec {
    Instance {
        instance: Instance,
        exponents: Option<ExponentParams>,
        family: Option<WeightedFamily>,
        ball: Option<SeminormBallModel>,
    },
    TwoLayer(TwoLayerInstance),
    Multilinear(MultilinearInstance),
    Linear(LinearOperatorSpec),
    Lipschitz(LipschitzMapSpec),
}

#[derive(Debug, Deserialize)]
struct RawFile {
    schema_version: String,
    kind: String,
    #[serde(flatten)]
    rest: serde_json::Value,
}

#[derive(Debug, Deserialize, Serialize)]
struct RawExponents {
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    q: f64,
    s: f64,
}

#[derive(Debug, Deserialize, Serialize)]
struct RawFamilyItem {
    weight: f64,
    a: usize,
    c: usize,
    g: usize,
}

#[derive(Debug, Deserialize)]
struct RawBall {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    coeff: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
struct RawInstanceSizes {
    a: usize,
    c: usize,
    g: usize,
    k: usize,
    w: usize,
}

#[derive(Debug, Deserialize)]
struct RawInstance {
    sizes: RawInstanceSizes,
    strength_tensor: Vec<f64>,
    test_tensor: Vec<f64>,
    mix_tensor: Vec<f64>,
    exponents: Option<RawExponents>,
    family: Option<Vec<RawFamilyItem>>,
    ball: Option<RawBall>,
}

#[derive(Debug, Deserialize)]
struct RawTwoLayerSizes {
    a: usize,
    b: usize,
    c: usize,
    c1: usize,
    g: usize,
    k: usize,
    w: usize,
}

#[derive(Debug, Deserialize)]
struct RawTwoLayer {
    sizes: RawTwoLayerSizes,
    map: Vec<usize>,
    strength_outer: Vec<f64>,
    test_outer: Vec<f64>,
    strength_composed: Vec<f64>,
    test_inner: Vec<f64>,
    mix_inner: Vec<f64>,
    mix_outer: Vec<f64>,
    mix_composed: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct RawMultilinearSizes {
    a_factors: Vec<usize>,
    c_factors: Vec<usize>,
    g_factors: Vec<usize>,
    k_points: Vec<usize>,
    w: usize,
}

#[derive(Debug, Deserialize)]
struct RawMultilinear {
    sizes: RawMultilinearSizes,
    test_kernels: Vec<Vec<f64>>,
    mix_tensor: Vec<f64>,
    test_exponents: Vec<f64>,
    exponents: RawExponents,
}

#[derive(Debug, Deserialize)]
struct RawLinear {
    matrix: Vec<Vec<f64>>,
    domain_net: Vec<Vec<f64>>,
    codomain_net: Vec<Vec<f64>>,
    probes: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
struct RawLipschitz {
    domain_metric: Vec<Vec<f64>>,
    codomain_metric: Vec<Vec<f64>>,
    map: Vec<usize>,
    domain_net: Option<Vec<Vec<f64>>>,
    codomain_net: Option<Vec<Vec<f64>>>,
}

fn schema_err(field: &str, message: impl Into<String>) -> Error {
    Error::Schema { field: field.into(), message: message.into() }
}

fn expect_len(field: &str, data: &[f64], expected: usize) -> Result<()> {
    if data.len() != expected {
        return Err(schema_err(
            field,
            format!("length {} does not match the declared sizes (expected {expected})", data.len()),
        ));
    }
    Ok(())
}

fn typed<T: for<'de> Deserialize<'de>>(kind: &str, rest: serde_json::Value) -> Result<T> {
    serde_json::from_value(rest).map_err(|err| schema_err(kind, err.to_string()))
}

fn exponents_from_raw(raw: &RawExponents) -> Result<ExponentParams> {
    match raw.p {
        Some(p) => ExponentParams::new(p, raw.q, raw.s),
        None => ExponentParams::qs(raw.q, raw.s),
    }
}

/// Parses one spec file from text. See the module docs for the stages and
/// their error classes.
pub fn load_spec_from_str(text: &str) -> Result<LoadedSpec> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|err| Error::Parse(err.to_string()))?;
    let raw: RawFile =
        serde_json::from_value(value).map_err(|err| schema_err("<root>", err.to_string()))?;
    if raw.schema_version != SCHEMA_VERSION {
        return Err(schema_err(
            "schema_version",
            format!("unsupported version `{}`, expected `{SCHEMA_VERSION}`", raw.schema_version),
        ));
    }
    match raw.kind.as_str() {
        "instance" => {
            let data: RawInstance = typed("instance", raw.rest)?;
            let sizes = &data.sizes;
            let probes = sizes.a * sizes.c * sizes.g;
            expect_len("strength_tensor", &data.strength_tensor, probes)?;
            expect_len("test_tensor", &data.test_tensor, probes * sizes.k)?;
            expect_len("mix_tensor", &data.mix_tensor, probes * sizes.w)?;
            let instance = Instance::new(
                (sizes.a, sizes.c, sizes.g, sizes.k, sizes.w),
                data.strength_tensor,
                data.test_tensor,
                data.mix_tensor,
            )?;
            let exponents = data.exponents.as_ref().map(exponents_from_raw).transpose()?;
            let family = data
                .family
                .map(|items| {
                    let items: Vec<FamilyItem> = items
                        .into_iter()
                        .map(|it| FamilyItem { weight: it.weight, a: it.a, c: it.c, g: it.g })
                        .collect();
                    let fam = WeightedFamily::new(items)?;
                    fam.validate_against(&instance)?;
                    Ok::<_, Error>(fam)
                })
                .transpose()?;
            let ball = data
                .ball
                .map(|b| SeminormBallModel::new(b.dim, b.vertices, b.coeff))
                .transpose()?;
            if let Some(ball) = &ball {
                ball.matches_instance(&instance)?;
            }
            Ok(LoadedSpec::Instance { instance, exponents, family, ball })
        }
        "two_layer" => {
            let data: RawTwoLayer = typed("two_layer", raw.rest)?;
            let s = &data.sizes;
            let outer = s.b * s.c1 * s.g;
            let inner = s.a * s.c * s.g;
            expect_len("strength_outer", &data.strength_outer, outer)?;
            expect_len("test_outer", &data.test_outer, outer * s.w)?;
            expect_len("strength_composed", &data.strength_composed, inner)?;
            expect_len("test_inner", &data.test_inner, inner * s.k)?;
            expect_len("mix_inner", &data.mix_inner, inner * s.w)?;
            expect_len("mix_outer", &data.mix_outer, s.b * s.c * s.g * s.w)?;
            expect_len("mix_composed", &data.mix_composed, inner * s.w)?;
            if data.map.len() != s.a {
                return Err(schema_err("map", format!("{} entries for {} points", data.map.len(), s.a)));
            }
            Ok(LoadedSpec::TwoLayer(TwoLayerInstance::new(
                (s.a, s.b, s.c, s.c1, s.g, s.k, s.w),
                data.map,
                data.strength_outer,
                data.test_outer,
                data.strength_composed,
                data.test_inner,
                data.mix_inner,
                data.mix_outer,
                data.mix_composed,
            )?))
        }
        "multilinear" => {
            let data: RawMultilinear = typed("multilinear", raw.rest)?;
            let s = &data.sizes;
            let joint_a: usize = s.a_factors.iter().product();
            let joint_c: usize = s.c_factors.iter().product();
            let joint_g: usize = s.g_factors.iter().product();
            if data.test_kernels.len() != s.g_factors.len() {
                return Err(schema_err(
                    "test_kernels",
                    format!(
                        "{} kernels for {} G factors",
                        data.test_kernels.len(),
                        s.g_factors.len()
                    ),
                ));
            }
            if s.k_points.len() != s.g_factors.len() {
                return Err(schema_err(
                    "sizes.k_points",
                    format!("{} point sets for {} G factors", s.k_points.len(), s.g_factors.len()),
                ));
            }
            for (idx, kernel) in data.test_kernels.iter().enumerate() {
                let expected = joint_a * joint_c * s.g_factors[idx] * s.k_points[idx];
                if kernel.len() != expected {
                    return Err(schema_err(
                        "test_kernels",
                        format!("kernel {idx} has length {}, expected {expected}", kernel.len()),
                    ));
                }
            }
            expect_len("mix_tensor", &data.mix_tensor, joint_a * joint_c * joint_g * s.w)?;
            let exponents = exponents_from_raw(&data.exponents)?;
            Ok(LoadedSpec::Multilinear(MultilinearInstance::new(
                s.a_factors.clone(),
                s.c_factors.clone(),
                s.g_factors.clone(),
                s.k_points.clone(),
                s.w,
                data.test_kernels,
                data.mix_tensor,
                data.test_exponents,
                exponents,
            )?))
        }
        "linear_map" => {
            let data: RawLinear = typed("linear_map", raw.rest)?;
            Ok(LoadedSpec::Linear(LinearOperatorSpec::new(
                data.matrix,
                data.domain_net,
                data.codomain_net,
                data.probes,
            )?))
        }
        "lipschitz_map" => {
            let data: RawLipschitz = typed("lipschitz_map", raw.rest)?;
            let domain_net =
                data.domain_net.unwrap_or_else(|| distance_net(&data.domain_metric));
            let codomain_net =
                data.codomain_net.unwrap_or_else(|| distance_net(&data.codomain_metric));
            Ok(LoadedSpec::Lipschitz(LipschitzMapSpec::new(
                data.domain_metric,
                data.codomain_metric,
                data.map,
                domain_net,
                codomain_net,
            )?))
        }
        other => Err(schema_err("kind", format!("unknown kind `{other}`"))),
    }
}

/// Loads a spec file from disk.
pub fn load_spec(path: &Path) -> Result<LoadedSpec> {
    let text = std::fs::read_to_string(path)?;
    load_spec_from_str(&text)
}

/// Serializes an instance (with optional exponents and family) back to the
/// file format.
pub fn instance_to_json(
    inst: &Instance,
    exponents: Option<&ExponentParams>,
    family: Option<&WeightedFamily>,
) -> serde_json::Value {
    let mut object = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "kind": "instance",
        "sizes": {
            "a": inst.n_a,
            "c": inst.n_c,
            "g": inst.n_g,
            "k": inst.n_k,
            "w": inst.n_w,
        },
        "strength_tensor": inst.strength_raw(),
        "test_tensor": inst.test_raw(),
        "mix_tensor": inst.mix_raw(),
    });
    if let Some(e) = exponents {
        object["exponents"] = serde_json::json!({"p": e.p(), "q": e.q(), "s": e.s()});
    }
    if let Some(fam) = family {
        object["family"] = serde_json::Value::Array(
            fam.items()
                .iter()
                .map(|it| {
                    serde_json::json!({"weight": it.weight, "a": it.a, "c": it.c, "g": it.g})
                })
                .collect(),
        );
    }
    object
}

/// Serializes a two-layer instance to the file format (used for
/// counterexample artifacts).
pub fn two_layer_to_json(two: &TwoLayerInstance) -> serde_json::Value {
    serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "kind": "two_layer",
        "sizes": {
            "a": two.n_a,
            "b": two.n_b,
            "c": two.n_c,
            "c1": two.n_c1,
            "g": two.n_g,
            "k": two.n_k,
            "w": two.n_w,
        },
        "map": two.map,
        "strength_outer": two.strength_outer,
        "test_outer": two.test_outer,
        "strength_composed": two.strength_composed,
        "test_inner": two.test_inner,
        "mix_inner": two.mix_inner,
        "mix_outer": two.mix_outer,
        "mix_composed": two.mix_composed,
    })
}

/// Writes an instance to disk in the file format.
pub fn save_instance(
    path: &Path,
    inst: &Instance,
    exponents: Option<&ExponentParams>,
    family: Option<&WeightedFamily>,
) -> Result<()> {
    let value = instance_to_json(inst, exponents, family);
    let text = serde_json::to_string_pretty(&value).map_err(|err| Error::Parse(err.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}
