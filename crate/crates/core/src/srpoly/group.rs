use std::fmt;

use serde::Serialize;

use super::classify::{classify, SrClass};
use super::compose::compose;
use super::PolyMap;
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Groups of invertible subresonant self-maps of a weighted space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Group {
    /// Subresonant with invertible linear part.
    #[serde(rename = "SR")]
    Sr,
    /// `x + p(x)` with `p` strictly subresonant.
    #[serde(rename = "SSR")]
    Ssr,
    /// `x + p(x)` with `p` subresonant and weight-decreasing linear part.
    #[serde(rename = "STAR")]
    Star,
}

impl Group {
    fn name(self) -> &'static str {
        match self {
            Group::Sr => "G^SR",
            Group::Ssr => "G^SSR",
            Group::Star => "G^*",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn violation(group: Group, detail: String) -> Error {
    Error::MembershipViolation {
        group: group.name(),
        detail,
    }
}

/// Describes the heaviest term of `p`, used in violation reports.
fn worst_term(p: &PolyMap) -> String {
    match p.terms().max_by_key(|(j, a, _)| p.term_weight(*j, a)) {
        Some((j, a, c)) => format!(
            "term {c:+e} * x^{a} in coordinate {} has weight {}",
            j + 1,
            p.term_weight(j, a)
        ),
        None => "zero map".into(),
    }
}

/// Checks that `f` belongs to `group`, reporting the offending term otherwise.
pub fn check_membership(f: &PolyMap, group: Group) -> Result<()> {
    let tol = Tolerances::default();
    if f.src() != f.tgt() {
        return Err(violation(group, format!("not a self-map: {} -> {}", f.src(), f.tgt())));
    }
    match group {
        Group::Sr => {
            if classify(f).class == SrClass::NotSubresonant {
                return Err(violation(group, worst_term(f)));
            }
            let det = f.linear_part().determinant();
            if det.abs() < tol.singular {
                return Err(violation(group, format!("linear part is singular (det = {det:e})")));
            }
        }
        Group::Ssr | Group::Star => {
            let p = f.sub(&PolyMap::identity(f.src()))?.prune(tol.drop);
            let needed = if group == Group::Ssr { SrClass::StrictlySubresonant } else { SrClass::Star };
            let got = classify(&p).class;
            if !got.is_within(needed) {
                let detail = if group == Group::Star && got == SrClass::Subresonant {
                    let lin = p.filter(|j, a| a.degree() == 1 && p.term_weight(j, a) >= num_traits::Zero::zero());
                    format!("f - id is {got}: {}", worst_term(&lin))
                } else {
                    format!("f - id is {got}: {}", worst_term(&p))
                };
                return Err(violation(group, detail));
            }
        }
    }
    Ok(())
}

/// `f o g` inside `group`; both inputs and the result are membership-checked.
pub fn group_op(f: &PolyMap, g: &PolyMap, group: Group) -> Result<PolyMap> {
    check_membership(f, group)?;
    check_membership(g, group)?;
    let h = compose(f, g)?;
    check_membership(&h, group)?;
    Ok(h)
}
