//! Hypothesis-checked dispatch: covering structure groups, pi1 and pi0 of
//! moduli spaces, and stable-range facts, for Hom(Γ, G) and the character
//! variety 𝔛_Γ(G).
//!
//! "Unknown" is a first-class outcome here. Every known value carries one or
//! more citations into the bundled result table; when a hypothesis gate
//! fails the report names it instead of guessing (the PSU(2) example shows
//! the naive extension is actually false, not merely unproven).

use crate::liegroup::{Field, ReductiveDescriptor};
use crate::presentation::Presentation;
use crate::zmodule::{hom_group, FgAbelianGroup};
use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TheoremError {
    #[error("hypothesis not met: {reason} (see {})", citation.label)]
    HypothesisNotMet { reason: String, citation: Citation },
    #[error("class tag {tag} contradicts the presentation: {reason}")]
    ClassMismatch { tag: GammaClass, reason: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// One entry of the bundled result table: a result label and a short
/// verbatim anchor identifying the statement being invoked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Citation {
    pub label: &'static str,
    pub anchor: &'static str,
}

pub mod citations {
    use super::Citation;

    pub const COVERING: Citation = Citation {
        label: "Theorem 3.4",
        anchor: "normal covering maps with structure group Hom(Γ, ker(p))",
    };
    pub const SURJECTIVE: Citation =
        Citation { label: "Proposition 4.2", anchor: "are always surjective" };
    pub const FREE_PI1: Citation =
        Citation { label: "Corollary 4.4", anchor: "π1(𝔛_Γ(G)) ≅ π1(G)^r" };
    pub const FREE_ABELIAN_ORTH: Citation =
        Citation { label: "Corollary 4.6", anchor: "that r ⩾ 3 and DG is orthogonal-free" };
    pub const FREE_ABELIAN_LOW_RANK: Citation =
        Citation { label: "Corollary 4.6", anchor: "that r=1,2 and π1(G) is torsion-free" };
    pub const SURFACE_COMPLEX: Citation =
        Citation { label: "Corollary 4.9", anchor: "π1(𝔛_{Γ^g}(G)) ≅ π1(G)^{2g}" };
    pub const SURFACE_COMPACT_UN: Citation =
        Citation { label: "Corollary 4.10", anchor: "𝔛_{Γ^g}(SU(n)) is simply connected" };
    pub const PSU2_COUNTEREXAMPLE: Citation =
        Citation { label: "Example 3.11", anchor: "this is impossible" };
    pub const HL_PI0: Citation = Citation {
        label: "Equation (HL)",
        anchor: "π0(Hom(Γ^g,G)) ≅ π0(𝔛_{Γ^g}(G)) ≅ π1(DG)",
    };
    pub const APPENDIX_PI0: Citation =
        Citation { label: "Appendix proposition", anchor: "π0(Hom(π1(Σ),G)) ≅ π1(DG)" };
    pub const STABLE_U: Citation =
        Citation { label: "Theorem 5.1", anchor: "(S¹)^{2g} × ℂP^∞" };
    pub const STABLE_SU: Citation =
        Citation { label: "Theorem 5.2", anchor: "𝔛_{Γ^g}(SU) ≃ ℂP^∞" };
    pub const STABLE_GL: Citation =
        Citation { label: "Section 5", anchor: "π1(𝔛_{Γ^g}(GL)) ≅ ℤ^{2g}" };
    pub const TORSION_REMARK: Citation =
        Citation { label: "Remark 2.4", anchor: "the torsion subgroup of π1(G)" };
    pub const HOM_FREE: Citation =
        Citation { label: "Section 3", anchor: "embed Hom(Γ,G) ⊂ Hom(F_r,G) ≅ G^r" };
    pub const ZR_CONNECTED: Citation = Citation {
        label: "Section 4.2",
        anchor: "Hom(ℤ^r, H) is path-connected",
    };
    pub const REAL_REDUCTIVE_FREE: Citation = Citation {
        label: "Corollary 4.5",
        anchor: "connected real reductive Lie group with π1(G) torsion-free",
    };
    pub const REAL_REDUCTIVE_ABELIAN: Citation = Citation {
        label: "Corollary 4.8",
        anchor: "DK is orthogonal-free, or that r=1,2 and π1(K) is torsion-free",
    };

    /// The complete table; reports only ever cite entries listed here.
    pub const ALL: &[Citation] = &[
        COVERING,
        SURJECTIVE,
        FREE_PI1,
        FREE_ABELIAN_ORTH,
        FREE_ABELIAN_LOW_RANK,
        SURFACE_COMPLEX,
        SURFACE_COMPACT_UN,
        PSU2_COUNTEREXAMPLE,
        HL_PI0,
        APPENDIX_PI0,
        STABLE_U,
        STABLE_SU,
        STABLE_GL,
        TORSION_REMARK,
        HOM_FREE,
        ZR_CONNECTED,
        REAL_REDUCTIVE_FREE,
        REAL_REDUCTIVE_ABELIAN,
    ];
}

/// The class of Γ used by the dispatch; arbitrary presentations must be
/// tagged by the caller (deciding freeness of an abstract group from an
/// arbitrary presentation is undecidable).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaClass {
    Free { rank: usize },
    FreeAbelian { rank: usize },
    Surface { genus: usize },
    Other,
}

impl std::fmt::Display for GammaClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GammaClass::Free { rank } => write!(f, "free {rank}"),
            GammaClass::FreeAbelian { rank } => write!(f, "free_abelian {rank}"),
            GammaClass::Surface { genus } => write!(f, "surface {genus}"),
            GammaClass::Other => write!(f, "other"),
        }
    }
}

/// Recognize the standard shapes emitted by `standard_group`.
pub fn detect_class(p: &Presentation) -> GammaClass {
    if p.is_free() {
        return GammaClass::Free { rank: p.num_generators() };
    }
    if let Some(r) = p.standard_free_abelian_rank() {
        return GammaClass::FreeAbelian { rank: r };
    }
    if let Some(g) = p.standard_surface_genus() {
        return GammaClass::Surface { genus: g };
    }
    GammaClass::Other
}

/// Check a caller-supplied tag against the presentation's shape.
pub fn check_class(p: &Presentation, tag: GammaClass) -> Result<GammaClass, TheoremError> {
    let mismatch = |reason: String| TheoremError::ClassMismatch { tag, reason };
    match tag {
        GammaClass::Other => Ok(tag),
        GammaClass::Free { rank } => {
            if p.is_free() && p.num_generators() == rank {
                Ok(tag)
            } else {
                Err(mismatch(format!(
                    "expected the free presentation on {rank} generators with no relators"
                )))
            }
        }
        GammaClass::FreeAbelian { rank } => match p.standard_free_abelian_rank() {
            Some(r) if r == rank => Ok(tag),
            _ => Err(mismatch(format!(
                "expected the standard free-abelian presentation of rank {rank}"
            ))),
        },
        GammaClass::Surface { genus } => match p.standard_surface_genus() {
            // genus 1 and free_abelian 2 share the presentation <a, b | [a,b]>
            Some(g) if g == genus => Ok(tag),
            None if genus == 1 && p.standard_free_abelian_rank() == Some(2) => Ok(tag),
            _ => Err(mismatch(format!(
                "expected the standard genus-{genus} surface presentation"
            ))),
        },
    }
}

/// A value the dispatch either knows (with citations) or refuses to state.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Knowledge<T> {
    Known { value: T, citations: Vec<Citation> },
    Unknown { reason: String },
}

impl<T> Knowledge<T> {
    pub fn known(value: T, citations: Vec<Citation>) -> Self {
        assert!(!citations.is_empty(), "known values must carry a citation");
        Knowledge::Known { value, citations }
    }

    pub fn value(&self) -> Option<&T> {
        match self {
            Knowledge::Known { value, .. } => Some(value),
            Knowledge::Unknown { .. } => None,
        }
    }

    pub fn is_known(&self) -> bool {
        matches!(self, Knowledge::Known { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringInfo {
    pub deck: FgAbelianGroup,
    pub surjective: bool,
    pub citations: Vec<Citation>,
    pub notes: Vec<String>,
}

/// Aggregated answer for one (Γ, G) query.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantReport {
    pub presentation: String,
    pub class: GammaClass,
    pub group: String,
    pub pi1_group: FgAbelianGroup,
    pub pi0_hom: Knowledge<String>,
    pub pi0_moduli: Knowledge<String>,
    pub pi1_moduli: Knowledge<FgAbelianGroup>,
    pub covering: Option<CoveringInfo>,
    /// Hypothesis gates that actually failed (drives the caller's
    /// "refused for cause" exit path).
    pub hypothesis_failures: Vec<String>,
    pub notes: Vec<String>,
}

/// Theorem 3.4 + Proposition 4.2: deck group and surjectivity of the induced
/// covering for a caller-chosen intermediate cover with kernel
/// `cover_kernel` ⩽ π1(G).
pub fn covering_structure_group(
    gamma: &Presentation,
    cover_kernel: &FgAbelianGroup,
    g: &ReductiveDescriptor,
) -> Result<(FgAbelianGroup, bool), TheoremError> {
    if !g.pi1_is_torsion_free() {
        return Err(TheoremError::HypothesisNotMet {
            reason: format!(
                "π1(G) has torsion subgroup {}; the covering conclusion can genuinely fail there",
                g.pi1_derived()
            ),
            citation: citations::PSU2_COUNTEREXAMPLE,
        });
    }
    // π1(G) is torsion-free here, so its subgroups are the free abelian
    // groups of rank ≤ free_rank(π1(G)).
    if !cover_kernel.torsion().is_empty() || cover_kernel.free_rank() > g.pi1().free_rank() {
        return Err(TheoremError::InvalidParameter(format!(
            "cover kernel {cover_kernel} is not a subgroup of π1(G) = {}",
            g.pi1()
        )));
    }
    let deck = hom_group(&gamma.abelianization(), cover_kernel);
    let (surjective, _) = gamma.is_exponent_canceling();
    Ok((deck, surjective))
}

fn power_knowledge(
    base: &FgAbelianGroup,
    copies: usize,
    citations: Vec<Citation>,
) -> Knowledge<FgAbelianGroup> {
    Knowledge::known(base.power(copies), citations)
}

/// pi1(𝔛_Γ(G)) under the matching hypothesis gate, or unknown naming the
/// failed hypothesis.
pub fn pi1_moduli(
    gamma: &Presentation,
    tag: GammaClass,
    g: &ReductiveDescriptor,
) -> Result<Knowledge<FgAbelianGroup>, TheoremError> {
    let class = check_class(gamma, tag)?;
    let pi1 = g.pi1();
    Ok(match class {
        GammaClass::Free { rank } => {
            if g.pi1_is_torsion_free() {
                power_knowledge(&pi1, rank, vec![citations::FREE_PI1])
            } else {
                Knowledge::Unknown {
                    reason: format!("π1(G) = {pi1} has torsion; the free-group result needs it torsion-free"),
                }
            }
        }
        GammaClass::FreeAbelian { rank } => {
            if rank >= 3 && g.is_orthogonal_free() {
                power_knowledge(&pi1, rank, vec![citations::FREE_ABELIAN_ORTH])
            } else if rank <= 2 && g.pi1_is_torsion_free() {
                power_knowledge(&pi1, rank, vec![citations::FREE_ABELIAN_LOW_RANK])
            } else if rank >= 3 {
                Knowledge::Unknown {
                    reason: "DG is not orthogonal-free, required for rank ≥ 3".into(),
                }
            } else {
                Knowledge::Unknown {
                    reason: format!("π1(G) = {pi1} has torsion; rank ≤ 2 needs it torsion-free"),
                }
            }
        }
        GammaClass::Surface { genus } => match g.field() {
            Field::Complex if g.pi1_is_torsion_free() => {
                power_knowledge(&pi1, 2 * genus, vec![citations::SURFACE_COMPLEX])
            }
            Field::Complex => Knowledge::Unknown {
                reason: format!("π1(G) = {pi1} has torsion; the complex surface result needs it torsion-free"),
            },
            Field::Compact => {
                if g.unitary_rank().is_some() || g.special_unitary_rank().is_some() {
                    power_knowledge(&pi1, 2 * genus, vec![citations::SURFACE_COMPACT_UN])
                } else {
                    Knowledge::Unknown {
                        reason: "compact surface case is established only for U(n) and SU(n)".into(),
                    }
                }
            }
        },
        GammaClass::Other => Knowledge::Unknown {
            reason: "no result applies to presentations outside the free / free-abelian / surface classes".into(),
        },
    })
}

/// π0 of Hom(Γ^g, G): |π1(DG)| in the compact (g ≥ 1) and complex (g ≥ 2)
/// cases; unknown for complex genus 1.
pub fn pi0_surface_rep_space(
    genus: usize,
    g: &ReductiveDescriptor,
) -> Result<Knowledge<BigUint>, TheoremError> {
    if genus < 1 {
        return Err(TheoremError::InvalidParameter("genus must be ≥ 1".into()));
    }
    let count = g
        .pi1_derived()
        .cardinality()
        .expect("pi1 of the derived subgroup is finite");
    Ok(match g.field() {
        Field::Compact => Knowledge::known(count, vec![citations::HL_PI0]),
        Field::Complex if genus >= 2 => Knowledge::known(count, vec![citations::APPENDIX_PI0]),
        Field::Complex => Knowledge::Unknown {
            reason: "π0 for complex reductive targets is not stated at genus 1".into(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StableTarget {
    SU,
    U,
    GL,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StableModuliFacts {
    pub target: StableTarget,
    pub genus: usize,
    pub pi1: Knowledge<FgAbelianGroup>,
    pub pi2: Knowledge<FgAbelianGroup>,
    /// Description of the higher homotopy groups, when known.
    pub higher: Knowledge<String>,
    pub homotopy_type: Option<String>,
}

/// Known homotopy of the rank-stable moduli spaces; pure lookup.
pub fn stable_moduli_facts(
    target: StableTarget,
    genus: usize,
) -> Result<StableModuliFacts, TheoremError> {
    if genus < 1 {
        return Err(TheoremError::InvalidParameter("genus must be ≥ 1".into()));
    }
    let z = FgAbelianGroup::free(1);
    let z2g = FgAbelianGroup::free(2 * genus);
    Ok(match target {
        StableTarget::SU => StableModuliFacts {
            target,
            genus,
            pi1: Knowledge::known(FgAbelianGroup::trivial(), vec![citations::STABLE_SU]),
            pi2: Knowledge::known(z, vec![citations::STABLE_SU]),
            higher: Knowledge::known("trivial (K(ℤ,2))".into(), vec![citations::STABLE_SU]),
            homotopy_type: Some("ℂP^∞".into()),
        },
        StableTarget::U => StableModuliFacts {
            target,
            genus,
            pi1: Knowledge::known(z2g, vec![citations::STABLE_U]),
            pi2: Knowledge::known(z, vec![citations::STABLE_U]),
            higher: Knowledge::known("trivial".into(), vec![citations::STABLE_U]),
            homotopy_type: Some(format!("(S¹)^{} × ℂP^∞", 2 * genus)),
        },
        StableTarget::GL => StableModuliFacts {
            target,
            genus,
            pi1: Knowledge::known(z2g, vec![citations::STABLE_GL]),
            pi2: Knowledge::Unknown { reason: "not stated for GL".into() },
            higher: Knowledge::Unknown { reason: "not stated for GL".into() },
            homotopy_type: None,
        },
    })
}

/// Assemble the full report for one query. The universal cover (kernel
/// π1(G)) is used for the covering field.
pub fn analyze(
    gamma: &Presentation,
    tag: Option<GammaClass>,
    g: &ReductiveDescriptor,
    group_name: &str,
) -> Result<InvariantReport, TheoremError> {
    let class = match tag {
        Some(t) => check_class(gamma, t)?,
        None => detect_class(gamma),
    };
    let pi1_group = g.pi1();
    let mut failures = Vec::new();
    let mut notes = Vec::new();

    let pi1_mod = pi1_moduli(gamma, class, g)?;
    if let Knowledge::Unknown { reason } = &pi1_mod {
        failures.push(format!("π1(moduli): {reason}"));
    }

    let (pi0_hom, pi0_moduli) = pi0_fields(class, g, &mut failures, &mut notes);

    let covering = match covering_structure_group(gamma, &pi1_group.clone(), g) {
        Ok((deck, surjective)) => {
            let mut cites = vec![citations::COVERING];
            let mut cnotes = Vec::new();
            if surjective {
                cites.push(citations::SURJECTIVE);
            } else {
                cnotes.push(
                    "presentation is not exponent-canceling; surjectivity unknown, reported as false"
                        .to_string(),
                );
            }
            Some(CoveringInfo { deck, surjective, citations: cites, notes: cnotes })
        }
        Err(TheoremError::HypothesisNotMet { reason, citation }) => {
            failures.push(format!("covering: {reason} [{}]", citation.label));
            None
        }
        Err(e) => return Err(e),
    };

    if matches!(class, GammaClass::Free { .. } | GammaClass::FreeAbelian { .. }) {
        notes.push(format!(
            "also valid for real reductive G with this maximal compact [{}]",
            if matches!(class, GammaClass::Free { .. }) {
                citations::REAL_REDUCTIVE_FREE.label
            } else {
                citations::REAL_REDUCTIVE_ABELIAN.label
            }
        ));
    }

    Ok(InvariantReport {
        presentation: gamma.to_string(),
        class,
        group: group_name.to_string(),
        pi1_group,
        pi0_hom,
        pi0_moduli,
        pi1_moduli: pi1_mod,
        covering,
        hypothesis_failures: failures,
        notes,
    })
}

fn pi0_fields(
    class: GammaClass,
    g: &ReductiveDescriptor,
    failures: &mut Vec<String>,
    notes: &mut Vec<String>,
) -> (Knowledge<String>, Knowledge<String>) {
    match class {
        GammaClass::Free { .. } => {
            // Hom(F_r, G) ≅ G^r is connected, and so is its quotient.
            let one = Knowledge::known("1".to_string(), vec![citations::HOM_FREE]);
            (one.clone(), one)
        }
        GammaClass::FreeAbelian { rank } => {
            let connected = rank == 1
                || (rank >= 3 && g.is_orthogonal_free())
                || (rank == 2 && g.pi1_is_torsion_free());
            if connected {
                let one = Knowledge::known(
                    "1".to_string(),
                    vec![citations::ZR_CONNECTED, citations::FREE_ABELIAN_ORTH],
                );
                (one.clone(), one)
            } else {
                let reason = if rank >= 3 {
                    "connectivity of Hom(ℤ^r, G) needs DG orthogonal-free for r ≥ 3"
                } else {
                    "connectivity of Hom(ℤ², G) needs π1(G) torsion-free"
                };
                failures.push(format!("π0: {reason}"));
                (
                    Knowledge::Unknown { reason: reason.into() },
                    Knowledge::Unknown { reason: reason.into() },
                )
            }
        }
        GammaClass::Surface { genus } => {
            let hom = pi0_surface_rep_space(genus, g)
                .expect("genus ≥ 1 by construction")
                ;
            let hom = match hom {
                Knowledge::Known { value, citations } => {
                    Knowledge::Known { value: value.to_string(), citations }
                }
                Knowledge::Unknown { reason } => {
                    failures.push(format!("π0(Hom): {reason}"));
                    Knowledge::Unknown { reason }
                }
            };
            let moduli = match (&hom, g.field()) {
                (Knowledge::Known { value, .. }, Field::Compact) => {
                    Knowledge::known(value.clone(), vec![citations::HL_PI0])
                }
                (Knowledge::Known { .. }, Field::Complex) => {
                    notes.push(
                        "π0 of the complex surface moduli space is not stated; only Hom is covered"
                            .to_string(),
                    );
                    Knowledge::Unknown {
                        reason: "π0 of the moduli space is stated only in the compact case".into(),
                    }
                }
                (Knowledge::Unknown { reason }, _) => Knowledge::Unknown { reason: reason.clone() },
            };
            (hom, moduli)
        }
        GammaClass::Other => {
            let u = Knowledge::Unknown {
                reason: "no π0 result applies outside the standard classes".to_string(),
            };
            (u.clone(), u)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liegroup::NamedGroup;
    use crate::presentation::{standard_group, StandardGroup};

    fn desc(g: NamedGroup) -> ReductiveDescriptor {
        g.descriptor().unwrap()
    }

    #[test]
    fn covering_surface_u_n() {
        let gamma = standard_group(&StandardGroup::Surface(2)).unwrap();
        let (deck, surjective) =
            covering_structure_group(&gamma, &FgAbelianGroup::free(1), &desc(NamedGroup::U(3)))
                .unwrap();
        assert_eq!(deck, FgAbelianGroup::free(4));
        assert!(surjective);
    }

    #[test]
    fn covering_psu2_refused() {
        let gamma = standard_group(&StandardGroup::Free(2)).unwrap();
        let err = covering_structure_group(
            &gamma,
            &FgAbelianGroup::trivial(),
            &desc(NamedGroup::PSU(2)),
        )
        .unwrap_err();
        match err {
            TheoremError::HypothesisNotMet { citation, .. } => {
                assert_eq!(citation.label, "Example 3.11");
                assert!(citations::ALL.contains(&citation));
            }
            other => panic!("expected HypothesisNotMet, got {other:?}"),
        }
    }

    #[test]
    fn covering_trivial_relator_group() {
        // <a | a> is the trivial group; deck group is trivial and the
        // relator `a` is not exponent-canceling.
        let gamma = crate::presentation::parse_presentation("gens a; rel a;").unwrap();
        let (deck, surjective) =
            covering_structure_group(&gamma, &FgAbelianGroup::free(1), &desc(NamedGroup::U(2)))
                .unwrap();
        assert!(deck.is_trivial());
        assert!(!surjective);
    }

    #[test]
    fn pi1_moduli_free_u_n() {
        for r in 1..=4 {
            let gamma = standard_group(&StandardGroup::Free(r)).unwrap();
            let k = pi1_moduli(&gamma, GammaClass::Free { rank: r }, &desc(NamedGroup::U(3)))
                .unwrap();
            assert_eq!(k.value(), Some(&FgAbelianGroup::free(r)));
        }
    }

    #[test]
    fn pi1_moduli_surface_gl() {
        for g in 1..=3 {
            let gamma = standard_group(&StandardGroup::Surface(g)).unwrap();
            let k = pi1_moduli(&gamma, GammaClass::Surface { genus: g }, &desc(NamedGroup::GL(2)))
                .unwrap();
            assert_eq!(k.value(), Some(&FgAbelianGroup::free(2 * g)));
        }
    }

    #[test]
    fn pi1_moduli_z3_type_b_unknown() {
        let gamma = standard_group(&StandardGroup::FreeAbelian(3)).unwrap();
        let b3 = ReductiveDescriptor::new(
            crate::liegroup::Field::Compact,
            0,
            vec![crate::liegroup::SimpleType::new(crate::liegroup::Family::B, 3).unwrap()],
            vec![],
        )
        .unwrap();
        let k = pi1_moduli(&gamma, GammaClass::FreeAbelian { rank: 3 }, &b3).unwrap();
        assert!(!k.is_known());
    }

    #[test]
    fn pi1_moduli_z2_su2_trivial() {
        let gamma = standard_group(&StandardGroup::FreeAbelian(2)).unwrap();
        let k = pi1_moduli(&gamma, GammaClass::FreeAbelian { rank: 2 }, &desc(NamedGroup::SU(2)))
            .unwrap();
        assert_eq!(k.value(), Some(&FgAbelianGroup::trivial()));
    }

    #[test]
    fn pi1_moduli_class_mismatch() {
        let gamma = standard_group(&StandardGroup::Free(2)).unwrap();
        let err = pi1_moduli(&gamma, GammaClass::Surface { genus: 2 }, &desc(NamedGroup::U(2)))
            .unwrap_err();
        assert!(matches!(err, TheoremError::ClassMismatch { .. }));
    }

    #[test]
    fn pi0_surface_examples() {
        use num_bigint::BigUint;
        let two = pi0_surface_rep_space(2, &desc(NamedGroup::PSU(2))).unwrap();
        assert_eq!(two.value(), Some(&BigUint::from(2u32)));
        for g in 1..=3 {
            let one = pi0_surface_rep_space(g, &desc(NamedGroup::SU(3))).unwrap();
            assert_eq!(one.value(), Some(&BigUint::from(1u32)));
        }
        let three = pi0_surface_rep_space(2, &desc(NamedGroup::PGL(3))).unwrap();
        assert_eq!(three.value(), Some(&BigUint::from(3u32)));
        // complex genus 1: no statement
        assert!(!pi0_surface_rep_space(1, &desc(NamedGroup::PGL(3))).unwrap().is_known());
        assert!(pi0_surface_rep_space(0, &desc(NamedGroup::SU(2))).is_err());
    }

    #[test]
    fn stable_facts() {
        let su = stable_moduli_facts(StableTarget::SU, 3).unwrap();
        assert_eq!(su.pi2.value(), Some(&FgAbelianGroup::free(1)));
        assert_eq!(su.pi1.value(), Some(&FgAbelianGroup::trivial()));
        let u = stable_moduli_facts(StableTarget::U, 1).unwrap();
        assert_eq!(u.pi1.value(), Some(&FgAbelianGroup::free(2)));
        let gl = stable_moduli_facts(StableTarget::GL, 2).unwrap();
        assert_eq!(gl.pi1.value(), Some(&FgAbelianGroup::free(4)));
        assert!(!gl.pi2.is_known());
    }

    #[test]
    fn report_consistency_free_case() {
        // The free-group answer must equal the deck group of the universal
        // cover: Hom(Z^r, pi1(G)).
        for r in 1..=3 {
            let gamma = standard_group(&StandardGroup::Free(r)).unwrap();
            for g in [NamedGroup::U(2), NamedGroup::GL(3), NamedGroup::Torus(2)] {
                let d = desc(g);
                let k = pi1_moduli(&gamma, GammaClass::Free { rank: r }, &d).unwrap();
                assert_eq!(
                    k.value().unwrap(),
                    &hom_group(&FgAbelianGroup::free(r), &d.pi1())
                );
            }
        }
    }

    #[test]
    fn report_psu2_exit_path() {
        let gamma = standard_group(&StandardGroup::Free(2)).unwrap();
        let report = analyze(&gamma, None, &desc(NamedGroup::PSU(2)), "PSU 2").unwrap();
        assert!(report.covering.is_none());
        assert!(!report.pi1_moduli.is_known());
        assert!(!report.hypothesis_failures.is_empty());
        // but the report is still emitted and serializable
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("Example 3.11") || json.contains("hypothesis_failures"));
    }

    #[test]
    fn report_all_known_for_good_inputs() {
        let gamma = standard_group(&StandardGroup::Surface(2)).unwrap();
        let report = analyze(&gamma, None, &desc(NamedGroup::U(3)), "U 3").unwrap();
        assert!(report.hypothesis_failures.is_empty());
        assert_eq!(report.pi1_moduli.value(), Some(&FgAbelianGroup::free(4)));
        assert_eq!(report.pi0_hom.value(), Some(&"1".to_string()));
        assert_eq!(report.pi0_moduli.value(), Some(&"1".to_string()));
        assert!(report.covering.as_ref().unwrap().surjective);
    }

    #[test]
    fn known_fields_cite_the_bundled_table() {
        let gamma = standard_group(&StandardGroup::Surface(2)).unwrap();
        for g in [NamedGroup::U(3), NamedGroup::PGL(2), NamedGroup::SU(2)] {
            let report = analyze(&gamma, None, &desc(g), "g").unwrap();
            for k in [&report.pi0_hom, &report.pi0_moduli] {
                if let Knowledge::Known { citations: cs, .. } = k {
                    assert!(!cs.is_empty());
                    assert!(cs.iter().all(|c| citations::ALL.contains(c)));
                }
            }
            if let Knowledge::Known { citations: cs, .. } = &report.pi1_moduli {
                assert!(cs.iter().all(|c| citations::ALL.contains(c)));
            }
        }
    }
}
