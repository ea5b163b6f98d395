//! Component equality and the sub-vector relation.

use super::schema::DomainSchema;
use super::value::{CaseVector, Value};
use crate::error::Result;
use crate::scalar::Scalar;

/// Two components are equal when their names match and their values intersect.
pub fn components_equal<T: Scalar>(
    a: (&str, &Value<T>),
    b: (&str, &Value<T>),
    schema: &DomainSchema<T>,
) -> Result<bool> {
    schema.check_value(a.0, a.1)?;
    schema.check_value(b.0, b.1)?;
    Ok(a.0 == b.0 && a.1.intersects(b.1))
}

/// `y` is a sub-vector of `x` when each component of `y` has an equal component in `x`.
pub fn is_subvector<T: Scalar>(
    y: &CaseVector<T>,
    x: &CaseVector<T>,
    schema: &DomainSchema<T>,
) -> Result<bool> {
    schema.check_vector(y)?;
    schema.check_vector(x)?;
    Ok(y.is_subvector_of(x))
}
