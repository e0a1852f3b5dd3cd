use num_bigint::BigInt;
use serde::Serialize;

use super::MultiPoly;
use crate::numeric::is_power_of_two;

/// Denominator summary of a polynomial's coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DenomProfile {
    #[serde(serialize_with = "crate::report::big_as_string")]
    pub lcm_denominator: BigInt,
    pub two_adic_only: bool,
    /// Largest power of 2 dividing any coefficient denominator.
    pub max_neg_v2: u64,
}

impl MultiPoly {
    pub fn denom_profile(&self) -> DenomProfile {
        let lcm = self.lcm_denominator();
        DenomProfile {
            two_adic_only: is_power_of_two(&lcm),
            max_neg_v2: lcm.trailing_zeros().unwrap_or(0),
            lcm_denominator: lcm,
        }
    }
}
