//! Ping-pong certificates, the ε-transverse position test and a brute-force
//! relator search.
//!
//! Inclusions are decided from arc endpoints: an orientation-preserving
//! homeomorphism sends an arc to the arc between the endpoint images, so no
//! sampling is involved.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circle::{arc_gap, dist, inclusion_slack, neighborhood, Arc, CirclePoint};
use crate::maps::{CircleMap, GeneratorSystem, Letter, MoebiusMap};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PingPongError {
    #[error("candidate radius {0} must lie in (0, 1/4)")]
    RadiusOutOfRange(f64),
}

/// Arc endpoints as written to JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcRecord {
    pub start: f64,
    pub end: f64,
    pub length: f64,
}

impl From<Arc> for ArcRecord {
    fn from(a: Arc) -> Self {
        ArcRecord {
            start: a.start().value(),
            end: a.end().value(),
            length: a.length(),
        }
    }
}

/// Slack of each condition. Disjointness margins are cyclic gaps (zero for
/// touching arcs); inclusion margins are the room left inside `V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    /// Gap between `U_f` and `V_f`.
    pub own_f: f64,
    /// Gap between `U_g` and `V_g`.
    pub own_g: f64,
    /// Smallest gap between an `f` arc and a `g` arc.
    pub cross: f64,
    /// Slack of `f(S^1 - U_f) ⊆ V_f`.
    pub f_inclusion: f64,
    /// Slack of `g(S^1 - U_g) ⊆ V_g`.
    pub g_inclusion: f64,
}

impl Margins {
    pub fn min(&self) -> f64 {
        self.own_f
            .min(self.own_g)
            .min(self.cross)
            .min(self.f_inclusion)
            .min(self.g_inclusion)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PingPongCertificate {
    pub u_f: Arc,
    pub v_f: Arc,
    pub u_g: Arc,
    pub v_g: Arc,
    pub verified: bool,
    pub margins: Margins,
}

/// JSON form of a certificate: endpoints, margins and verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub u_f: ArcRecord,
    pub v_f: ArcRecord,
    pub u_g: ArcRecord,
    pub v_g: ArcRecord,
    pub verified: bool,
    pub margins: Margins,
}

impl From<&PingPongCertificate> for CertificateRecord {
    fn from(c: &PingPongCertificate) -> Self {
        CertificateRecord {
            u_f: c.u_f.into(),
            v_f: c.v_f.into(),
            u_g: c.u_g.into(),
            v_g: c.v_g.into(),
            verified: c.verified,
            margins: c.margins,
        }
    }
}

/// Slack of `f(S^1 - U) ⊆ V`: the closed image of the closed complement
/// must sit strictly inside the open arc `V`.
pub fn inclusion_margin(f: &CircleMap, u: &Arc, v: &Arc) -> f64 {
    if !u.is_proper() || !v.is_proper() {
        return -1.0;
    }
    let image = f.image_arc(&u.complement());
    if image.is_full() {
        return -1.0;
    }
    inclusion_slack(v, &image)
}

/// Check the ping-pong conditions for `(f, g)` on the given arcs.
pub fn check_certificate(
    f: &CircleMap,
    g: &CircleMap,
    u_f: Arc,
    v_f: Arc,
    u_g: Arc,
    v_g: Arc,
) -> PingPongCertificate {
    let cross = [
        arc_gap(&u_f, &u_g),
        arc_gap(&u_f, &v_g),
        arc_gap(&v_f, &u_g),
        arc_gap(&v_f, &v_g),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    let margins = Margins {
        own_f: arc_gap(&u_f, &v_f),
        own_g: arc_gap(&u_g, &v_g),
        cross,
        f_inclusion: inclusion_margin(f, &u_f, &v_f),
        g_inclusion: inclusion_margin(g, &u_g, &v_g),
    };
    let proper = [u_f, v_f, u_g, v_g].iter().all(Arc::is_proper);
    let verified = proper
        && margins.own_f >= 0.0
        && margins.own_g >= 0.0
        && margins.cross >= 0.0
        && margins.f_inclusion > 0.0
        && margins.g_inclusion > 0.0;
    PingPongCertificate {
        u_f,
        v_f,
        u_g,
        v_g,
        verified,
        margins,
    }
}

impl PingPongCertificate {
    /// Recompute the verdict for the same maps; true iff bit-identical.
    pub fn reverify(&self, f: &CircleMap, g: &CircleMap) -> bool {
        check_certificate(f, g, self.u_f, self.v_f, self.u_g, self.v_g) == *self
    }

    pub fn record(&self) -> CertificateRecord {
        self.into()
    }
}

/// `U = B(sigma_hat, radius)` and `V = B(f(attractor_base), radius)` for a
/// walk map `f`.
pub fn walk_candidate_arcs(
    f: &CircleMap,
    sigma_hat: CirclePoint,
    attractor_base: CirclePoint,
    radius: f64,
) -> Result<(Arc, Arc), PingPongError> {
    if !(radius > 0.0 && radius < 0.25) {
        return Err(PingPongError::RadiusOutOfRange(radius));
    }
    let u = neighborhood(sigma_hat, radius).expect("positive radius");
    let v = neighborhood(f.eval(attractor_base), radius).expect("positive radius");
    Ok((u, v))
}

/// Attractor and repulsor balls of two walks at time `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransverseWitness {
    pub n: usize,
    pub eps: f64,
    /// `I_ω, I_ω′, J_ω, J_ω′`.
    pub arcs: [Arc; 4],
    pub transverse: bool,
}

pub fn transverse_test(arcs: [Arc; 4], n: usize, eps: f64) -> TransverseWitness {
    TransverseWitness {
        n,
        eps,
        arcs,
        transverse: crate::circle::arcs_pairwise_disjoint(&arcs),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelatorResult {
    pub found: bool,
    pub word: Option<Vec<Letter>>,
    pub spelled: Option<String>,
    /// Words below tolerance at the base probes that failed the recheck.
    pub flagged: Vec<String>,
    pub words_checked: usize,
}

/// Search reduced words over `{f, f^-1, g, g^-1}` by increasing length, in
/// lexicographic order within a length, for one acting as the identity on
/// `probes` equally spaced points (max displacement below `tol`). A hit is
/// rechecked on ten times as many probes before it is reported.
pub fn relator_search(f: &CircleMap, g: &CircleMap, max_len: usize, probes: usize, tol: f64) -> RelatorResult {
    let system = GeneratorSystem::new(vec![("f".into(), f.clone()), ("g".into(), g.clone())]);
    let alphabet = [
        Letter::new(0, false),
        Letter::new(0, true),
        Letter::new(1, false),
        Letter::new(1, true),
    ];
    let base = probe_grid(probes.max(1));
    let fine = probe_grid(10 * probes.max(1));
    let matrices = match (f.as_moebius(), g.as_moebius()) {
        (Some(a), Some(b)) => Some([*a, a.inverse(), *b, b.inverse()]),
        _ => None,
    };
    let mut search = Search {
        system: &system,
        alphabet: &alphabet,
        matrices,
        base,
        fine,
        tol,
        flagged: Vec::new(),
        checked: 0,
        word: Vec::new(),
    };
    for len in 1..=max_len {
        if let Some(w) = search.dfs(len, MoebiusMap::identity()) {
            let spelled = system.spell(&w).to_string();
            return RelatorResult {
                found: true,
                word: Some(w),
                spelled: Some(spelled),
                flagged: search.flagged,
                words_checked: search.checked,
            };
        }
    }
    RelatorResult {
        found: false,
        word: None,
        spelled: None,
        flagged: search.flagged,
        words_checked: search.checked,
    }
}

fn probe_grid(k: usize) -> Vec<CirclePoint> {
    (0..k).map(|i| CirclePoint::new(i as f64 / k as f64)).collect()
}

struct Search<'a> {
    system: &'a GeneratorSystem,
    alphabet: &'a [Letter; 4],
    matrices: Option<[MoebiusMap; 4]>,
    base: Vec<CirclePoint>,
    fine: Vec<CirclePoint>,
    tol: f64,
    flagged: Vec<String>,
    checked: usize,
    word: Vec<Letter>,
}

impl Search<'_> {
    fn dfs(&mut self, remaining: usize, prefix: MoebiusMap) -> Option<Vec<Letter>> {
        if remaining == 0 {
            self.checked += 1;
            if self.displacement(&prefix, false) < self.tol {
                if self.displacement(&prefix, true) < self.tol {
                    return Some(self.word.clone());
                }
                self.flagged.push(self.system.spell(&self.word).to_string());
            }
            return None;
        }
        for (i, &l) in self.alphabet.iter().enumerate() {
            if self.word.last() == Some(&l.inverted()) {
                continue;
            }
            let next = match &self.matrices {
                Some(m) => prefix.compose(&m[i]),
                None => prefix,
            };
            self.word.push(l);
            let hit = self.dfs(remaining - 1, next);
            self.word.pop();
            if hit.is_some() {
                return hit;
            }
        }
        None
    }

    /// Max displacement over the probes; stops at the first probe moved by
    /// at least `tol`.
    fn displacement(&self, product: &MoebiusMap, fine: bool) -> f64 {
        let probes = if fine { &self.fine } else { &self.base };
        let mut worst: f64 = 0.0;
        for &x in probes {
            let y = if self.matrices.is_some() {
                product.eval(x)
            } else {
                self.system.eval_word(&self.word, x)
            };
            worst = worst.max(dist(x, y));
            if worst >= self.tol {
                break;
            }
        }
        worst
    }
}
