//! Integrality reports for recurrence specifications.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::numeric::{lcm_upto, Rational};
use crate::report::{render_csv, render_table};
use crate::speclang::{run_spec, to_odd_form, EvenPart, OddFormAnalysis, RecurrenceSpec};

/// Which analysis was applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    /// Leading coefficient `n`; odd-form analysis applies.
    OddForm,
    /// Leading coefficient `n^k` with `k > 1`; integrality is only observed.
    Plain,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermProfile {
    pub n: usize,
    #[serde(serialize_with = "crate::report::big_as_string")]
    pub lcm_denominator: BigInt,
    pub two_adic_only: bool,
    pub v2_defect: u64,
    pub dn_scaled_integral: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub in_z: bool,
    pub first_non_integral: Option<usize>,
    pub in_z_half: bool,
    pub first_non_two_adic: Option<usize>,
    pub dn_scaled_integral: bool,
    pub first_dn_failure: Option<usize>,
}

/// Key order in serialized form is the field order below.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntegralityReport {
    pub spec_sha256: String,
    pub seq: String,
    pub ring: Vec<String>,
    pub n_checked: usize,
    pub pipeline: Pipeline,
    pub lead_power: u32,
    pub theorem2_applicable: bool,
    pub odd_form: Vec<String>,
    pub offenders: Vec<EvenPart>,
    /// Indices `i` whose shifted coefficient is not over the integers.
    pub non_integral: Vec<usize>,
    pub flags: Flags,
    /// Set when the odd-form analysis applies but some term has a
    /// denominator that is not a power of 2.
    pub critical: bool,
    pub v2_defects: Vec<u64>,
    pub terms: Vec<TermProfile>,
}

/// Hex SHA-256 of the canonical spec text.
pub fn spec_hash(spec: &RecurrenceSpec) -> String {
    hex::encode(Sha256::digest(spec.canonical().as_bytes()))
}

/// Runs `spec` to `N` and profiles every term.
pub fn certify(spec: &RecurrenceSpec, n_max: usize) -> IntegralityReport {
    let seq = run_spec(spec, n_max);
    let (pipeline, shifted, offenders) = match to_odd_form(spec) {
        OddFormAnalysis::Odd(f) => (Pipeline::OddForm, f.polys, Vec::new()),
        OddFormAnalysis::NotOdd { shifted, offenders } => (Pipeline::OddForm, shifted, offenders),
        OddFormAnalysis::NotApplicable { .. } => (Pipeline::Plain, Vec::new(), Vec::new()),
    };
    let non_integral: Vec<usize> = shifted
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.coeffs().iter().all(|c| c.is_integral()))
        .map(|(i, _)| i + 1)
        .collect();
    let applicable = pipeline == Pipeline::OddForm && offenders.is_empty() && non_integral.is_empty();
    let odd_form = shifted.iter().map(ToString::to_string).collect();

    let mut terms = Vec::with_capacity(seq.len());
    let mut dn = BigInt::one();
    for (n, t) in seq.terms.iter().enumerate() {
        if n > 0 {
            dn = num_integer::Integer::lcm(&dn, &BigInt::from(n));
        }
        debug_assert_eq!(dn, lcm_upto(n as u64));
        let prof = t.denom_profile();
        let scaled = t.scale(&Rational::from_integer(dn.clone()));
        terms.push(TermProfile {
            n,
            two_adic_only: prof.two_adic_only,
            v2_defect: prof.max_neg_v2,
            dn_scaled_integral: scaled.is_integral(),
            lcm_denominator: prof.lcm_denominator,
        });
    }
    let first = |pred: &dyn Fn(&TermProfile) -> bool| terms.iter().find(|t| !pred(t)).map(|t| t.n);
    let first_non_integral = first(&|t| t.lcm_denominator.is_one());
    let first_non_two_adic = first(&|t| t.two_adic_only);
    let first_dn_failure = first(&|t| t.dn_scaled_integral);
    let flags = Flags {
        in_z: first_non_integral.is_none(),
        first_non_integral,
        in_z_half: first_non_two_adic.is_none(),
        first_non_two_adic,
        dn_scaled_integral: first_dn_failure.is_none(),
        first_dn_failure,
    };

    IntegralityReport {
        spec_sha256: spec_hash(spec),
        seq: spec.seq().to_string(),
        ring: spec.ring().names().to_vec(),
        n_checked: n_max,
        pipeline,
        lead_power: spec.lead_power(),
        theorem2_applicable: applicable,
        odd_form,
        offenders,
        non_integral,
        critical: applicable && !flags.in_z_half,
        flags,
        v2_defects: terms.iter().map(|t| t.v2_defect).collect(),
        terms,
    }
}

impl IntegralityReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.terms
            .iter()
            .map(|t| {
                let mut flags = Vec::new();
                if t.lcm_denominator.is_one() {
                    flags.push("Z");
                } else if t.two_adic_only {
                    flags.push("Z[1/2]");
                }
                if t.dn_scaled_integral {
                    flags.push("dn");
                }
                vec![
                    t.n.to_string(),
                    t.lcm_denominator.to_string(),
                    t.v2_defect.to_string(),
                    flags.join(" "),
                ]
            })
            .collect()
    }

    const HEADER: [&'static str; 4] = ["n", "denominator", "v2_defect", "flags"];

    pub fn to_csv(&self) -> String {
        render_csv(&Self::HEADER, &self.rows())
    }

    /// Summary lines followed by the per-term table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("spec           {}\n", self.spec_sha256));
        out.push_str(&format!("sequence       {} over [{}]\n", self.seq, self.ring.join(", ")));
        out.push_str(&format!("terms checked  0..={}\n", self.n_checked));
        let pipeline = match self.pipeline {
            Pipeline::OddForm => "odd-form".to_string(),
            Pipeline::Plain => format!("plain (leading n^{})", self.lead_power),
        };
        out.push_str(&format!("pipeline       {pipeline}\n"));
        out.push_str(&format!("odd form       {}\n", yes_no(self.theorem2_applicable)));
        for p in &self.offenders {
            out.push_str(&format!("  p{} even part  {}\n", p.index, p.even_part));
        }
        let at = |v: Option<usize>| v.map(|n| format!(" (fails at n = {n})")).unwrap_or_default();
        out.push_str(&format!("in Z            {}{}\n", yes_no(self.flags.in_z), at(self.flags.first_non_integral)));
        out.push_str(&format!("in Z[1/2]       {}{}\n", yes_no(self.flags.in_z_half), at(self.flags.first_non_two_adic)));
        out.push_str(&format!("d_n scaled in Z {}{}\n", yes_no(self.flags.dn_scaled_integral), at(self.flags.first_dn_failure)));
        if self.critical {
            out.push_str("CRITICAL       odd form holds but a denominator is not a power of 2\n");
        }
        out.push('\n');
        out.push_str(&render_table(&Self::HEADER, &self.rows()));
        out
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
