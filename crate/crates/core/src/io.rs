//! JSON interchange for curves, divisors and pairing results.
//!
//! Integers are decimal strings.  A field element is either a single string
//! (an element of the prime field) or an array of strings, its coordinates on
//! the flat basis `1, t, t^2, ...` of the field it lives in.  Parse failures
//! carry the JSON pointer of the offending value.

use num_bigint::BigUint;
use serde_json::{json, Map, Value};

use crate::curve::{extension_of, CurveParams};
use crate::error::{Error, Result};
use crate::field::{Field, FieldDescriptor, FieldElement, FieldEmbedding};
use crate::jacobian::ReducedDivisor;
use crate::pairings::{PairingContext, PairingOutput};
use crate::poly::Poly;

/// A curve together with an optional subgroup order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSpec {
    pub curve: CurveParams,
    pub r: Option<u64>,
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::parse("", format!("invalid JSON: {e}")))
}

fn field_of<'a>(obj: &'a Map<String, Value>, ptr: &str, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::parse(format!("{ptr}/{key}"), "missing field"))
}

fn as_object<'a>(v: &'a Value, ptr: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::parse(ptr, "expected an object"))
}

fn as_array<'a>(v: &'a Value, ptr: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::parse(ptr, "expected an array"))
}

fn as_usize(v: &Value, ptr: &str) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| Error::parse(ptr, "expected a non-negative integer"))
}

/// A decimal string, or a JSON integer for convenience.
fn as_biguint(v: &Value, ptr: &str) -> Result<BigUint> {
    match v {
        Value::String(s) => s
            .trim()
            .parse::<BigUint>()
            .map_err(|_| Error::parse(ptr, format!("'{s}' is not a non-negative decimal integer"))),
        Value::Number(n) => n
            .as_u64()
            .map(BigUint::from)
            .ok_or_else(|| Error::parse(ptr, "expected a non-negative integer")),
        _ => Err(Error::parse(ptr, "expected a decimal string")),
    }
}

fn as_u64(v: &Value, ptr: &str) -> Result<u64> {
    let n = as_biguint(v, ptr)?;
    u64::try_from(&n).map_err(|_| Error::parse(ptr, "integer too large"))
}

pub fn element_to_json(e: &FieldElement) -> Value {
    match e.as_prime_subfield() {
        Some(c) if e.field().degree() == 1 => Value::String(c.to_string()),
        _ => Value::Array(e.coeffs().iter().map(|c| Value::String(c.to_string())).collect()),
    }
}

pub fn element_from_json(field: &Field, v: &Value, ptr: &str) -> Result<FieldElement> {
    let p = BigUint::from(field.characteristic());
    match v {
        Value::Array(items) => {
            let coeffs = items
                .iter()
                .enumerate()
                .map(|(i, c)| as_biguint(c, &format!("{ptr}/{i}")).map(|n| u64::try_from(n % &p).expect("reduced")))
                .collect::<Result<Vec<u64>>>()?;
            FieldElement::from_coeffs(field, &coeffs).map_err(|e| Error::parse(ptr, e.to_string()))
        }
        _ => Ok(FieldElement::from_biguint(field, &(as_biguint(v, ptr)? % &p))),
    }
}

pub fn poly_to_json(p: &Poly) -> Value {
    Value::Array(p.coeffs().iter().map(element_to_json).collect())
}

pub fn poly_from_json(field: &Field, v: &Value, ptr: &str) -> Result<Poly> {
    let coeffs = as_array(v, ptr)?
        .iter()
        .enumerate()
        .map(|(i, c)| element_from_json(field, c, &format!("{ptr}/{i}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Poly::new(field, coeffs))
}

pub fn curve_to_json(c: &CurveParams, r: Option<u64>) -> Value {
    let field = c.field();
    let mut obj = Map::new();
    obj.insert("p".into(), Value::String(field.characteristic().to_string()));
    obj.insert("base_degree".into(), json!(field.degree()));
    if let Some(m) = field.modulus() {
        obj.insert("base_modulus".into(), json!(m));
    }
    obj.insert("genus".into(), json!(c.genus));
    obj.insert("H".into(), poly_to_json(&c.h));
    obj.insert("F".into(), poly_to_json(&c.f));
    if let Some(r) = r {
        obj.insert("r".into(), Value::String(r.to_string()));
    }
    Value::Object(obj)
}

pub fn curve_from_json(v: &Value) -> Result<CurveSpec> {
    let obj = as_object(v, "")?;
    let p = as_u64(field_of(obj, "", "p")?, "/p")?;
    let degree = match obj.get("base_degree") {
        Some(d) => as_usize(d, "/base_degree")?,
        None => 1,
    };
    let field = match (degree, obj.get("base_modulus")) {
        (0, _) => return Err(Error::parse("/base_degree", "must be at least 1")),
        (1, None) => FieldDescriptor::prime(p),
        (_, None) => return Err(Error::parse("/base_modulus", "required when base_degree > 1")),
        (_, Some(m)) => {
            let m = as_array(m, "/base_modulus")?
                .iter()
                .enumerate()
                .map(|(i, c)| as_u64(c, &format!("/base_modulus/{i}")))
                .collect::<Result<Vec<u64>>>()?;
            if m.len() != degree + 1 {
                return Err(Error::parse("/base_modulus", format!("expected {} coefficients", degree + 1)));
            }
            FieldDescriptor::with_modulus(p, &m).map_err(|e| Error::parse("/base_modulus", e.to_string()))
        }
    }
    .map_err(|e| match e {
        Error::Parse { .. } => e,
        other => Error::parse("/p", other.to_string()),
    })?;
    let genus = as_usize(field_of(obj, "", "genus")?, "/genus")?;
    let h = match obj.get("H") {
        Some(h) => poly_from_json(&field, h, "/H")?,
        None => Poly::zero(&field),
    };
    let f = poly_from_json(&field, field_of(obj, "", "F")?, "/F")?;
    let curve = CurveParams::new(genus, h, f).map_err(|e| {
        let ptr = match e {
            Error::DegreeOutOfRange(ref m) if m.contains("genus") => "/genus",
            Error::DegreeOutOfRange(ref m) if m.contains('H') => "/H",
            _ => "/F",
        };
        Error::parse(ptr, e.to_string())
    })?;
    let r = obj.get("r").map(|r| as_u64(r, "/r")).transpose()?;
    Ok(CurveSpec { curve, r })
}

/// The smallest `e | k` with the divisor defined over `F_{q^e}`, and its
/// coordinates there.
pub fn divisor_to_json(ctx: &PairingContext, d: &ReducedDivisor) -> Result<Value> {
    for e in (1..=ctx.k).filter(|e| ctx.k.is_multiple_of(*e)) {
        let (small, emb) = ext_field(ctx, e)?;
        let down = |p: &Poly| -> Option<Poly> {
            let c = p.coeffs().iter().map(|c| emb.preimage(c)).collect::<Option<Vec<_>>>()?;
            Some(Poly::new(&small, c))
        };
        if let (Some(u), Some(v)) = (down(&d.u), down(&d.v)) {
            return Ok(json!({
                "u": flat_poly(&u),
                "v": flat_poly(&v),
                "ext_degree": e,
            }));
        }
    }
    Err(Error::InvariantViolation("divisor is not defined over F_{q^k}".into()))
}

fn flat_poly(p: &Poly) -> Value {
    Value::Array(
        p.coeffs()
            .iter()
            .map(|c| Value::Array(c.coeffs().iter().map(|x| Value::String(x.to_string())).collect()))
            .collect(),
    )
}

fn ext_field(ctx: &PairingContext, e: usize) -> Result<(Field, FieldEmbedding)> {
    let (small, _) = extension_of(ctx.curve.field(), e)?;
    let emb = FieldEmbedding::new(&small, &ctx.pairing_field)?;
    Ok((small, emb))
}

/// Parses a divisor over `F_{q^e}` (`e = ext_degree`, which must divide `k`)
/// and returns it over `F_{q^k}`, after checking the Mumford conditions.
pub fn divisor_from_json(ctx: &PairingContext, v: &Value) -> Result<ReducedDivisor> {
    let obj = as_object(v, "")?;
    let e = match obj.get("ext_degree") {
        Some(e) => as_usize(e, "/ext_degree")?,
        None => 1,
    };
    if e == 0 || !ctx.k.is_multiple_of(e) {
        return Err(Error::parse(
            "/ext_degree",
            format!("ext_degree {e} does not divide the embedding degree {}", ctx.k),
        ));
    }
    let (small, emb) = ext_field(ctx, e)?;
    let u = poly_from_json(&small, field_of(obj, "", "u")?, "/u")?;
    let v = poly_from_json(&small, field_of(obj, "", "v")?, "/v")?;
    if !u.is_monic() {
        return Err(Error::parse("/u", "invariant (1): u must be monic"));
    }
    if v.degree() >= u.degree() || u.degree() > ctx.curve.genus as i64 {
        return Err(Error::parse("/v", "invariant (2): deg v < deg u <= g"));
    }
    let d = ReducedDivisor { u, v }.embed(&emb);
    d.validate(&ctx.curve_k)
        .map_err(|_| Error::parse("/v", "invariant (3): u must divide v^2 + h v - F"))?;
    Ok(d)
}

pub fn pairing_output_to_json(out: &PairingOutput) -> Value {
    json!({
        "value": Value::Array(out.value.coeffs().iter().map(|c| Value::String(c.to_string())).collect()),
        "pairing": out.pairing,
        "loop_bits": out.loop_bits,
        "final_exp": out.final_exp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> PairingContext {
        let field = FieldDescriptor::prime(7).unwrap();
        let curve = CurveParams::with_f(&field, 2, &[6, 0, 0, 1, 0, 1]).unwrap();
        PairingContext::new(&curve, 43).unwrap()
    }

    #[test]
    fn curve_round_trip() {
        let c = ctx();
        let json = curve_to_json(&c.curve, Some(43));
        let back = curve_from_json(&json).unwrap();
        assert_eq!(back.curve, c.curve);
        assert_eq!(back.r, Some(43));
        let ext = FieldDescriptor::with_modulus(7, &[4, 0, 1]).unwrap();
        let h = Poly::new(&ext, vec![FieldElement::zero(&ext), FieldElement::generator(&ext)]);
        let curve = (1..7)
            .find_map(|c| CurveParams::new(2, h.clone(), Poly::from_i64s(&ext, &[c, 1, 0, 0, 0, 1])).ok())
            .unwrap();
        assert_eq!(curve_from_json(&curve_to_json(&curve, None)).unwrap().curve, curve);
    }

    #[test]
    fn curve_errors_name_the_field() {
        let pointer = |text: &str| match curve_from_json(&parse_json(text).unwrap()) {
            Err(Error::Parse { pointer, .. }) => pointer,
            other => panic!("{other:?}"),
        };
        assert_eq!(pointer(r#"{"genus":2,"F":["1","0","0","0","0","1"]}"#), "/p");
        assert_eq!(pointer(r#"{"p":"7x","genus":2,"F":[]}"#), "/p");
        assert_eq!(pointer(r#"{"p":"8","genus":2,"F":["1","0","0","0","0","1"]}"#), "/p");
        assert_eq!(pointer(r#"{"p":"7","genus":2,"F":["1","0","0","0","0","2"]}"#), "/F");
        assert_eq!(pointer(r#"{"p":"7","genus":2,"F":["1","0",{},"0","0","1"]}"#), "/F/2");
        assert_eq!(pointer(r#"{"p":"7","genus":"two","F":[]}"#), "/genus");
        assert!(matches!(parse_json("{"), Err(Error::Parse { .. })));
    }

    #[test]
    fn divisor_round_trip() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in [c.sample_g1(&mut rng).unwrap(), c.sample_g2(&mut rng).unwrap()] {
            let json = divisor_to_json(&c, &d).unwrap();
            assert_eq!(divisor_from_json(&c, &json).unwrap(), d);
        }
        let g1 = divisor_to_json(&c, &c.sample_g1(&mut rng).unwrap()).unwrap();
        assert_eq!(g1["ext_degree"], 1);
    }

    #[test]
    fn divisor_errors() {
        let c = ctx();
        let err = |text: &str| divisor_from_json(&c, &parse_json(text).unwrap()).unwrap_err();
        assert_eq!(
            err(r#"{"u":["1","2"],"v":["3"],"ext_degree":4}"#),
            Error::parse("/ext_degree", "ext_degree 4 does not divide the embedding degree 6")
        );
        match err(r#"{"u":["1","2"],"v":["3"],"ext_degree":1}"#) {
            Error::Parse { pointer, message } => {
                assert_eq!(pointer, "/u");
                assert!(message.contains("invariant (1)"));
            }
            other => panic!("{other:?}"),
        }
        match err(r#"{"u":["1","1"],"v":["3"],"ext_degree":1}"#) {
            Error::Parse { message, .. } => assert!(message.contains("invariant (3)")),
            other => panic!("{other:?}"),
        }
    }
}
