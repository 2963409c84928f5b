//! Augmented hierarchies at complexity four.
//!
//! The main geodesic is the canonical Farey geodesic between the two base
//! curves. Every vertex `vᵢ` of it cuts the surface into the annulus about
//! `vᵢ`, which supports a geodesic in the horoball over that annulus
//! running from the projection of `vᵢ₋₁` (or of the initial marking) to
//! the projection of `vᵢ₊₁` (or of the terminal marking).
//!
//! Positions on geodesics are absolute indices. A truncated hierarchy
//! keeps the indices of the hierarchy it was cut from, so slices of the
//! original resolution remain valid slices of the truncation.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::farey::{
    adjacent, annular_coordinate, farey_distance, farey_geodesic, transversal_with_coordinate, Slope, SurfaceKind,
};
use crate::horoball::{horo_distance_z, horo_geodesic_z, is_horo_edge, HoroParams, HoroPoint};
use crate::marking::{annular_projection_distance, bfs_distance, project_to_annulus, AugmentedMarking};

/// A component domain: the whole surface or the annulus about a curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Domain {
    WholeSurface,
    Annulus(Slope),
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::WholeSurface => write!(f, "S"),
            Domain::Annulus(a) => write!(f, "A({a})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Vertices {
    Curve(Vec<Slope>),
    Horo(Vec<HoroPoint>),
}

impl Vertices {
    pub fn len(&self) -> usize {
        match self {
            Vertices::Curve(v) => v.len(),
            Vertices::Horo(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Initial or terminal data of a geodesic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndData {
    /// A full augmented marking (main geodesic).
    Marking(AugmentedMarking),
    /// The restriction of an end marking to an annulus.
    Restriction { marking: AugmentedMarking, point: HoroPoint },
    /// The projection of the neighbouring main-geodesic vertex.
    Neighbor { vertex: Slope, point: HoroPoint },
}

impl EndData {
    pub fn point(&self) -> Option<&HoroPoint> {
        match self {
            EndData::Marking(_) => None,
            EndData::Restriction { point, .. } | EndData::Neighbor { point, .. } => Some(point),
        }
    }

    /// Restriction to the annulus about `alpha`.
    pub fn restrict(&self, alpha: Slope) -> Option<HoroPoint> {
        match self {
            EndData::Marking(m) => Some(project_to_annulus(m, alpha)),
            EndData::Restriction { marking, point } => (marking.base == alpha).then(|| point.clone()),
            EndData::Neighbor { vertex, point } => {
                (annular_coordinate(alpha, *vertex).ok()? == point.x.to_i128()?).then(|| point.clone())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TightGeodesic {
    pub domain: Domain,
    /// Absolute index of the first vertex.
    pub start: usize,
    pub vertices: Vertices,
    pub initial: EndData,
    pub terminal: EndData,
}

impl TightGeodesic {
    pub fn positions(&self) -> Range<usize> {
        self.start..self.start + self.vertices.len()
    }

    pub fn first(&self) -> usize {
        self.start
    }

    pub fn last(&self) -> usize {
        self.start + self.vertices.len() - 1
    }

    /// Edge length.
    pub fn size(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn curve(&self, pos: usize) -> Option<Slope> {
        match &self.vertices {
            Vertices::Curve(v) => v.get(pos.checked_sub(self.start)?).copied(),
            Vertices::Horo(_) => None,
        }
    }

    pub fn point(&self, pos: usize) -> Option<&HoroPoint> {
        match &self.vertices {
            Vertices::Horo(v) => v.get(pos.checked_sub(self.start)?),
            Vertices::Curve(_) => None,
        }
    }
}

/// `backward ↙ annulus ↘ forward`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub backward: Domain,
    pub geodesic: Domain,
    pub forward: Domain,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentedHierarchy {
    pub kind: SurfaceKind,
    pub params: HoroParams,
    pub main: TightGeodesic,
    /// One annular geodesic per main vertex, in main order.
    pub annular: Vec<TightGeodesic>,
    pub links: Vec<Link>,
}

fn neighbor_point(alpha: Slope, vertex: Slope) -> HoroPoint {
    HoroPoint::new(annular_coordinate(alpha, vertex).expect("distinct main vertices"), 0)
}

fn annular_geodesic(alpha: Slope, initial: EndData, terminal: EndData, params: HoroParams) -> TightGeodesic {
    let a = initial.point().expect("annular end data carries a point").clone();
    let b = terminal.point().expect("annular end data carries a point").clone();
    TightGeodesic {
        domain: Domain::Annulus(alpha),
        start: 0,
        vertices: Vertices::Horo(horo_geodesic_z(&a, &b, params)),
        initial,
        terminal,
    }
}

fn link_for(alpha: Slope) -> Link {
    Link {
        backward: Domain::WholeSurface,
        geodesic: Domain::Annulus(alpha),
        forward: Domain::WholeSurface,
    }
}

/// Builds the hierarchy between two markings.
pub fn build_hierarchy(m1: &AugmentedMarking, m2: &AugmentedMarking, params: HoroParams) -> Result<AugmentedHierarchy> {
    if m1.kind != m2.kind {
        return Err(Error::InvalidMarking("markings live on different surfaces".into()));
    }
    let path = farey_geodesic(m1.base, m2.base);
    let last = path.len() - 1;
    let mut annular = Vec::with_capacity(path.len());
    for (i, &alpha) in path.iter().enumerate() {
        let initial = if i == 0 {
            EndData::Restriction {
                marking: *m1,
                point: project_to_annulus(m1, alpha),
            }
        } else {
            EndData::Neighbor {
                vertex: path[i - 1],
                point: neighbor_point(alpha, path[i - 1]),
            }
        };
        let terminal = if i == last {
            EndData::Restriction {
                marking: *m2,
                point: project_to_annulus(m2, alpha),
            }
        } else {
            EndData::Neighbor {
                vertex: path[i + 1],
                point: neighbor_point(alpha, path[i + 1]),
            }
        };
        annular.push(annular_geodesic(alpha, initial, terminal, params));
    }
    let links = path.iter().map(|a| link_for(*a)).collect();
    Ok(AugmentedHierarchy {
        kind: m1.kind,
        params,
        main: TightGeodesic {
            domain: Domain::WholeSurface,
            start: 0,
            vertices: Vertices::Curve(path),
            initial: EndData::Marking(*m1),
            terminal: EndData::Marking(*m2),
        },
        annular,
        links,
    })
}

impl AugmentedHierarchy {
    pub fn initial_marking(&self) -> AugmentedMarking {
        match &self.main.initial {
            EndData::Marking(m) => *m,
            _ => unreachable!("main geodesic ends are markings"),
        }
    }

    pub fn terminal_marking(&self) -> AugmentedMarking {
        match &self.main.terminal {
            EndData::Marking(m) => *m,
            _ => unreachable!("main geodesic ends are markings"),
        }
    }

    pub fn main_vertex(&self, i: usize) -> Option<Slope> {
        self.main.curve(i)
    }

    /// Main index of the vertex `alpha`, if it is one.
    pub fn main_index(&self, alpha: Slope) -> Option<usize> {
        self.main.positions().find(|&i| self.main.curve(i) == Some(alpha))
    }

    pub fn annular_at(&self, main_index: usize) -> Option<&TightGeodesic> {
        self.annular.get(main_index.checked_sub(self.main.start)?)
    }

    pub fn geodesic(&self, dom: Domain) -> Option<&TightGeodesic> {
        match dom {
            Domain::WholeSurface => Some(&self.main),
            Domain::Annulus(a) => self.annular.iter().find(|g| g.domain == dom).filter(|_| self.main_index(a).is_some()),
        }
    }

    /// All geodesics, main first.
    pub fn geodesics(&self) -> impl Iterator<Item = &TightGeodesic> {
        std::iter::once(&self.main).chain(self.annular.iter())
    }
}

/// `|H|`: the sum of edge lengths of all geodesics.
pub fn total_size(h: &AugmentedHierarchy) -> usize {
    h.geodesics().map(|g| g.size()).sum()
}

/// Positions of `on` whose vertices are disjoint from `dom`.
///
/// Distinct slopes always intersect at this complexity, so the footprint
/// of an annulus is the set of its occurrences as a vertex.
pub fn footprint(h: &AugmentedHierarchy, on: Domain, dom: Domain) -> Result<Vec<usize>> {
    match (on, dom) {
        (Domain::WholeSurface, Domain::Annulus(alpha)) => Ok(h.main_index(alpha).into_iter().collect()),
        _ => Err(Error::NotNested(format!("{dom} in {on}"))),
    }
}

/// Backward and forward sequences of a domain.
pub fn sigma_sequences(h: &AugmentedHierarchy, dom: Domain) -> (Vec<Domain>, Vec<Domain>) {
    let mut backward = Vec::new();
    let mut forward = Vec::new();
    match dom {
        Domain::WholeSurface => {
            backward.push(Domain::WholeSurface);
            forward.push(Domain::WholeSurface);
        }
        Domain::Annulus(alpha) => {
            if h.main.initial.restrict(alpha).is_some() {
                backward.push(Domain::WholeSurface);
            }
            if h.main.terminal.restrict(alpha).is_some() {
                forward.push(Domain::WholeSurface);
            }
            if let Some(g) = h.geodesic(dom) {
                if g.initial.restrict(alpha).is_some() {
                    backward.push(dom);
                }
                if g.terminal.restrict(alpha).is_some() {
                    forward.insert(0, dom);
                }
            }
        }
    }
    (backward, forward)
}

/// `g₁ ≺_t g₂`, compared through footprints on the main geodesic.
pub fn time_order(h: &AugmentedHierarchy, g1: Domain, g2: Domain) -> Option<Ordering> {
    let idx = |d: Domain| match d {
        Domain::Annulus(a) => h.geodesic(d).and(h.main_index(a)),
        Domain::WholeSurface => None,
    };
    let (i, j) = (idx(g1)?, idx(g2)?);
    match i.cmp(&j) {
        Ordering::Equal => None,
        o => Some(o),
    }
}

/// A position on a geodesic, with the end data as sentinels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Position {
    Initial,
    Vertex(usize),
    Terminal,
}

impl Position {
    fn key(self) -> i64 {
        match self {
            Position::Initial => i64::MIN,
            Position::Vertex(i) => i as i64,
            Position::Terminal => i64::MAX,
        }
    }
}

fn pointed_precedes(h: &AugmentedHierarchy, a: (Domain, Position), b: (Domain, Position)) -> bool {
    let idx = |d: Domain| match d {
        Domain::Annulus(alpha) => h.main_index(alpha).map(|i| i as i64),
        Domain::WholeSurface => None,
    };
    match (a.0, b.0) {
        (x, z) if x == z => a.1.key() < b.1.key(),
        (Domain::Annulus(_), Domain::Annulus(_)) => matches!((idx(a.0), idx(b.0)), (Some(i), Some(j)) if i < j),
        (Domain::Annulus(_), Domain::WholeSurface) => idx(a.0).is_some_and(|i| i < b.1.key()),
        (Domain::WholeSurface, Domain::Annulus(_)) => idx(b.0).is_some_and(|j| a.1.key() < j),
        _ => unreachable!(),
    }
}

fn valid_pointed(h: &AugmentedHierarchy, p: (Domain, Position)) -> bool {
    match (h.geodesic(p.0), p.1) {
        (Some(g), Position::Vertex(i)) => g.positions().contains(&i),
        (Some(_), _) => true,
        (None, _) => false,
    }
}

/// `≺_p` on pointed geodesics.
pub fn pointed_order(h: &AugmentedHierarchy, a: (Domain, Position), b: (Domain, Position)) -> Option<Ordering> {
    if !valid_pointed(h, a) || !valid_pointed(h, b) {
        return None;
    }
    if pointed_precedes(h, a, b) {
        Some(Ordering::Less)
    } else if pointed_precedes(h, b, a) {
        Some(Ordering::Greater)
    } else {
        None
    }
}

/// A slice: at most one position per geodesic, with a distinguished bottom pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slice {
    pub bottom: (Domain, usize),
    /// All pairs including the bottom, sorted by domain.
    pub pairs: Vec<(Domain, usize)>,
}

impl Slice {
    pub fn new(bottom: (Domain, usize), mut pairs: Vec<(Domain, usize)>) -> Slice {
        if !pairs.contains(&bottom) {
            pairs.push(bottom);
        }
        pairs.sort_by_key(|p| (p.0 != Domain::WholeSurface, p.0, p.1));
        Slice { bottom, pairs }
    }

    pub fn contains(&self, pair: &(Domain, usize)) -> bool {
        self.pairs.contains(pair)
    }

    pub fn position(&self, dom: Domain) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == dom).map(|p| p.1)
    }
}

impl fmt::Display for Slice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(d, i)| format!("{d}@{i}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// `≺_s` on complete slices.
pub fn slice_precedes(h: &AugmentedHierarchy, s1: &Slice, s2: &Slice) -> bool {
    s1 != s2
        && s1.pairs.iter().all(|p| {
            s2.contains(p)
                || s2.pairs.iter().any(|q| {
                    pointed_precedes(h, (p.0, Position::Vertex(p.1)), (q.0, Position::Vertex(q.1)))
                })
        })
}

pub fn slice_order(h: &AugmentedHierarchy, s1: &Slice, s2: &Slice) -> Option<Ordering> {
    if slice_precedes(h, s1, s2) {
        Some(Ordering::Less)
    } else if slice_precedes(h, s2, s1) {
        Some(Ordering::Greater)
    } else {
        None
    }
}

fn complete_slice(h: &AugmentedHierarchy, main_index: usize, annular_pos: usize) -> Slice {
    let alpha = h.main_vertex(main_index).expect("main index in range");
    Slice::new(
        (Domain::WholeSurface, main_index),
        vec![(Domain::Annulus(alpha), annular_pos)],
    )
}

pub fn initial_slice(h: &AugmentedHierarchy) -> Slice {
    let i = h.main.first();
    complete_slice(h, i, h.annular_at(i).expect("annulus over first vertex").first())
}

pub fn terminal_slice(h: &AugmentedHierarchy) -> Slice {
    let i = h.main.last();
    complete_slice(h, i, h.annular_at(i).expect("annulus over last vertex").last())
}

/// Checks (S1)–(S3), and (S4) when `complete` is set.
pub fn validate_slice(h: &AugmentedHierarchy, s: &Slice, complete: bool) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidSlice(format!("{s}: {msg}")));
    let mut seen = BTreeSet::new();
    for (d, i) in &s.pairs {
        if !seen.insert(*d) {
            return bad(format!("{d} appears twice"));
        }
        match h.geodesic(*d) {
            Some(g) if g.positions().contains(i) => {}
            _ => return bad(format!("{d}@{i} is not a position of the hierarchy")),
        }
    }
    if !s.contains(&s.bottom) {
        return bad("bottom pair missing".into());
    }
    for (d, _) in &s.pairs {
        if (*d, s.position(*d).unwrap()) == s.bottom {
            continue;
        }
        if let Domain::Annulus(alpha) = d {
            let parent = s.pairs.iter().any(|(x, i)| *x == Domain::WholeSurface && h.main_vertex(*i) == Some(*alpha));
            if !parent {
                return bad(format!("{d} is not a component domain of any pair"));
            }
        } else {
            return bad("the whole surface is only allowed as bottom".into());
        }
    }
    if complete {
        for (d, i) in &s.pairs {
            if *d == Domain::WholeSurface {
                let alpha = h.main_vertex(*i).unwrap();
                if s.position(Domain::Annulus(alpha)).is_none() {
                    return bad(format!("component domain A({alpha}) is unrepresented"));
                }
            }
        }
        if s.bottom.0 != Domain::WholeSurface {
            return bad("complete slices have bottom on the main geodesic".into());
        }
    }
    Ok(())
}

/// The transition slices for the step from `v` to `v + 1` along `g`.
pub fn transition_slices(h: &AugmentedHierarchy, g: Domain, v: usize) -> Result<(Slice, Slice)> {
    let geo = h.geodesic(g).ok_or_else(|| Error::InvalidIndex(format!("{g} supports no geodesic")))?;
    if !geo.positions().contains(&v) || v == geo.last() {
        return Err(Error::InvalidIndex(format!("{g}@{v} has no successor")));
    }
    match g {
        Domain::Annulus(_) => Ok((Slice::new((g, v), vec![]), Slice::new((g, v + 1), vec![]))),
        Domain::WholeSurface => {
            let a = h.main_vertex(v).unwrap();
            let b = h.main_vertex(v + 1).unwrap();
            let ga = h.annular_at(v).unwrap();
            let gb = h.annular_at(v + 1).unwrap();
            Ok((
                Slice::new((g, v), vec![(Domain::Annulus(a), ga.last())]),
                Slice::new((g, v + 1), vec![(Domain::Annulus(b), gb.first())]),
            ))
        }
    }
}

/// One forward step along a geodesic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceMove {
    pub geodesic: Domain,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub slices: Vec<Slice>,
    pub moves: Vec<SliceMove>,
}

impl Resolution {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }
}

fn minus(a: &Slice, b: &Slice) -> Vec<(Domain, usize)> {
    a.pairs.iter().filter(|p| !b.contains(p)).copied().collect()
}

/// Whether `t2` follows `t1` by the forward elementary move `mv`.
pub fn is_forward_move(h: &AugmentedHierarchy, t1: &Slice, t2: &Slice, mv: &SliceMove) -> bool {
    if mv.to != mv.from + 1 {
        return false;
    }
    let Ok((sigma, sigma_prime)) = transition_slices(h, mv.geodesic, mv.from) else {
        return false;
    };
    sigma.pairs.iter().all(|p| t1.contains(p))
        && sigma_prime.pairs.iter().all(|p| t2.contains(p))
        && minus(t1, &sigma) == minus(t2, &sigma_prime)
}

/// Sweeps the hierarchy from its initial to its terminal slice.
///
/// The annular geodesic over the current main vertex is run to its end
/// before the main geodesic advances.
pub fn resolve(h: &AugmentedHierarchy) -> Resolution {
    let mut slices = vec![initial_slice(h)];
    let mut moves = Vec::new();
    for i in h.main.positions() {
        let g = h.annular_at(i).expect("annulus over main vertex");
        for k in g.first()..g.last() {
            moves.push(SliceMove {
                geodesic: g.domain,
                from: k,
                to: k + 1,
            });
            slices.push(complete_slice(h, i, k + 1));
        }
        if i < h.main.last() {
            moves.push(SliceMove {
                geodesic: Domain::WholeSurface,
                from: i,
                to: i + 1,
            });
            slices.push(complete_slice(h, i + 1, h.annular_at(i + 1).unwrap().first()));
        }
    }
    Resolution { slices, moves }
}

/// The augmented marking of a complete slice.
pub fn compatible_marking(h: &AugmentedHierarchy, s: &Slice) -> Result<AugmentedMarking> {
    validate_slice(h, s, true)?;
    let i = s.bottom.1;
    let alpha = h.main_vertex(i).unwrap();
    let k = s.position(Domain::Annulus(alpha)).unwrap();
    let pt = h.annular_at(i).unwrap().point(k).unwrap();
    let x = pt.x.to_i128().ok_or(Error::Overflow)?;
    AugmentedMarking::new(h.kind, alpha, transversal_with_coordinate(alpha, x)?, pt.n)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchyPath {
    pub markings: Vec<AugmentedMarking>,
}

pub fn path_of(h: &AugmentedHierarchy, res: &Resolution) -> Result<HierarchyPath> {
    let markings = res.slices.iter().map(|s| compatible_marking(h, s)).collect::<Result<_>>()?;
    Ok(HierarchyPath { markings })
}

pub fn hierarchy_path(m1: &AugmentedMarking, m2: &AugmentedMarking, params: HoroParams) -> Result<HierarchyPath> {
    let h = build_hierarchy(m1, m2, params)?;
    path_of(&h, &resolve(&h))
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidSlice(msg()))
    }
}

fn validate_annular_end(alpha: Slope, data: &EndData, at_end: Option<&AugmentedMarking>, neighbor: Option<Slope>) -> Result<()> {
    match (data, at_end, neighbor) {
        (EndData::Restriction { marking, point }, Some(m), _) => {
            check(marking == m, || format!("A({alpha}) end marking differs from the main geodesic's"))?;
            check(m.base == alpha, || format!("A({alpha}) restricted from a marking with base {}", m.base))?;
            check(*point == project_to_annulus(m, alpha), || format!("A({alpha}) restriction point is wrong"))
        }
        (EndData::Neighbor { vertex, point }, None, Some(v)) => {
            check(*vertex == v, || format!("A({alpha}) neighbour data names {vertex}, expected {v}"))?;
            check(*point == neighbor_point(alpha, v), || format!("A({alpha}) neighbour projection is wrong"))
        }
        _ => Err(Error::InvalidSlice(format!("A({alpha}) has end data of the wrong kind"))),
    }
}

/// Checks the main geodesic, the annular geodesics, their end data and
/// subordinacy links, and the structure of the backward/forward sequences.
pub fn validate_hierarchy(h: &AugmentedHierarchy) -> Result<()> {
    let Vertices::Curve(path) = &h.main.vertices else {
        return Err(Error::InvalidSlice("main geodesic must consist of curves".into()));
    };
    check(!path.is_empty(), || "empty main geodesic".into())?;
    check(h.main.domain == Domain::WholeSurface, || "main geodesic must live on the whole surface".into())?;
    check(path.windows(2).all(|w| adjacent(w[0], w[1])), || "main geodesic has a non-edge".into())?;
    check(
        farey_distance(path[0], *path.last().unwrap()) as usize == path.len() - 1,
        || "main geodesic is not a geodesic".into(),
    )?;
    let (EndData::Marking(m1), EndData::Marking(m2)) = (&h.main.initial, &h.main.terminal) else {
        return Err(Error::InvalidSlice("main end data must be markings".into()));
    };
    check(m1.base == path[0] && m2.base == *path.last().unwrap(), || "main ends do not match its end markings".into())?;
    check(h.annular.len() == path.len(), || "one annular geodesic per main vertex is required".into())?;
    check(h.links.len() == path.len(), || "one link per annular geodesic is required".into())?;
    for (k, (g, alpha)) in h.annular.iter().zip(path).enumerate() {
        let i = h.main.start + k;
        check(g.domain == Domain::Annulus(*alpha), || format!("annular geodesic {k} is not over {alpha}"))?;
        check(h.links[k] == link_for(*alpha), || format!("link {k} is wrong"))?;
        let Vertices::Horo(pts) = &g.vertices else {
            return Err(Error::InvalidSlice(format!("A({alpha}) must consist of horoball points")));
        };
        check(!pts.is_empty(), || format!("A({alpha}) is empty"))?;
        check(pts.windows(2).all(|w| is_horo_edge(&w[0], &w[1], h.params)), || format!("A({alpha}) has a non-edge"))?;
        let (a, b) = (&pts[0], pts.last().unwrap());
        check(horo_distance_z(a, b, h.params) as usize == pts.len() - 1, || format!("A({alpha}) is not a geodesic"))?;
        check(g.initial.point() == Some(a), || format!("A({alpha}) does not start at its initial data"))?;
        check(g.terminal.point() == Some(b), || format!("A({alpha}) does not end at its terminal data"))?;
        let first = i == h.main.first();
        let last = i == h.main.last();
        validate_annular_end(*alpha, &g.initial, first.then_some(m1), (!first).then(|| path[k - 1]))?;
        validate_annular_end(*alpha, &g.terminal, last.then_some(m2), (!last).then(|| path[k + 1]))?;
    }
    for (k, alpha) in path.iter().enumerate() {
        check(!path[k + 1..].contains(alpha), || format!("{alpha} supports two geodesics"))?;
        let dom = Domain::Annulus(*alpha);
        let (back, fwd) = sigma_sequences(h, dom);
        check(back.last() == Some(&dom) && fwd.first() == Some(&dom), || format!("sequences of {dom} do not meet at its geodesic"))?;
        check(back.first() == Some(&Domain::WholeSurface) || k == 0, || format!("backward sequence of {dom} misses the main geodesic"))?;
    }
    Ok(())
}

/// Checks that `res` sweeps `h` by forward elementary moves.
pub fn validate_resolution(h: &AugmentedHierarchy, res: &Resolution) -> Result<()> {
    check(res.slices.len() == res.moves.len() + 1, || "slice and move counts disagree".into())?;
    for s in &res.slices {
        validate_slice(h, s, true)?;
    }
    check(res.slices.first() == Some(&initial_slice(h)), || "resolution does not start at the initial slice".into())?;
    check(res.slices.last() == Some(&terminal_slice(h)), || "resolution does not end at the terminal slice".into())?;
    for (k, mv) in res.moves.iter().enumerate() {
        check(is_forward_move(h, &res.slices[k], &res.slices[k + 1], mv), || format!("step {k} is not a forward elementary move"))?;
        check(slice_precedes(h, &res.slices[k], &res.slices[k + 1]), || format!("step {k} does not increase the slice order"))?;
    }
    check(res.len() <= total_size(h), || "resolution is longer than the hierarchy".into())
}

/// Cuts `h` down to the part swept by `res` between slices `i` and `j`.
pub fn truncate(h: &AugmentedHierarchy, res: &Resolution, i: usize, j: usize) -> Result<AugmentedHierarchy> {
    if i > j || j >= res.slices.len() {
        return Err(Error::InvalidIndex(format!("cannot truncate to [{i}, {j}] of {} slices", res.slices.len())));
    }
    let (si, sj) = (&res.slices[i], &res.slices[j]);
    let (mu_i, mu_j) = (compatible_marking(h, si)?, compatible_marking(h, sj)?);
    let (a, b) = (si.bottom.1, sj.bottom.1);
    let pa = si.position(Domain::Annulus(mu_i.base)).unwrap();
    let pb = sj.position(Domain::Annulus(mu_j.base)).unwrap();
    let Vertices::Curve(path) = &h.main.vertices else { unreachable!() };
    let main = TightGeodesic {
        domain: Domain::WholeSurface,
        start: a,
        vertices: Vertices::Curve(path[a - h.main.start..=b - h.main.start].to_vec()),
        initial: EndData::Marking(mu_i),
        terminal: EndData::Marking(mu_j),
    };
    let mut annular = Vec::new();
    for k in a..=b {
        let g = h.annular_at(k).unwrap();
        let Vertices::Horo(pts) = &g.vertices else { unreachable!() };
        let lo = if k == a { pa } else { g.first() };
        let hi = if k == b { pb } else { g.last() };
        let point = |p: usize| pts[p - g.start].clone();
        annular.push(TightGeodesic {
            domain: g.domain,
            start: lo,
            vertices: Vertices::Horo(pts[lo - g.start..=hi - g.start].to_vec()),
            initial: if k == a {
                EndData::Restriction { marking: mu_i, point: point(lo) }
            } else {
                g.initial.clone()
            },
            terminal: if k == b {
                EndData::Restriction { marking: mu_j, point: point(hi) }
            } else {
                g.terminal.clone()
            },
        });
    }
    let links = path[a - h.main.start..=b - h.main.start].iter().map(|s| link_for(*s)).collect();
    Ok(AugmentedHierarchy {
        kind: h.kind,
        params: h.params,
        main,
        annular,
        links,
    })
}

/// The slices of `res` restricted to `[i, j]`.
pub fn restrict_resolution(res: &Resolution, i: usize, j: usize) -> Resolution {
    Resolution {
        slices: res.slices[i..=j].to_vec(),
        moves: res.moves[i..j].to_vec(),
    }
}

/// Slice indices during which the geodesic over `dom` is traversed.
pub fn active_segment(res: &Resolution, h: &AugmentedHierarchy, dom: Domain) -> Option<(usize, usize)> {
    let g = h.geodesic(dom)?;
    if dom == Domain::WholeSurface {
        return Some((0, res.slices.len() - 1));
    }
    let first = res.slices.iter().position(|s| s.contains(&(dom, g.first())))?;
    let last = res.slices.iter().rposition(|s| s.contains(&(dom, g.last())))?;
    Some((first, last))
}

/// Largest distance between consecutive markings of a hierarchy path.
pub fn max_step(path: &HierarchyPath, params: HoroParams, cap: u32) -> Option<u32> {
    path.markings
        .windows(2)
        .map(|w| bfs_distance(&w[0], &w[1], params, cap, None))
        .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
}

/// Domains whose projection distance exceeds `k`, with that distance.
///
/// Annuli are searched among the main-geodesic vertices and their Farey
/// neighbours whose twist coordinate lies within `window` of a projected
/// endpoint.
pub fn large_links(m1: &AugmentedMarking, m2: &AugmentedMarking, k: u64, params: HoroParams) -> Vec<(Domain, u64)> {
    const WINDOW: i128 = 4;
    let mut out = Vec::new();
    let df = farey_distance(m1.base, m2.base) as u64;
    if df > k {
        out.push((Domain::WholeSurface, df));
    }
    let path = farey_geodesic(m1.base, m2.base);
    let mut candidates: BTreeSet<Slope> = path.iter().copied().collect();
    for v in &path {
        for m in [m1, m2] {
            if m.base == *v {
                continue;
            }
            let c = annular_coordinate(*v, m.base).unwrap();
            for off in -WINDOW..=WINDOW {
                if let Ok(s) = transversal_with_coordinate(*v, c + off) {
                    candidates.insert(s);
                }
            }
        }
    }
    for alpha in candidates {
        let d = annular_projection_distance(m1, m2, alpha, params);
        if d > k {
            out.push((Domain::Annulus(alpha), d));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::farey::{act, twist_about};

    const B2: HoroParams = HoroParams { base_b: 2 };

    fn s(p: i64, q: i64) -> Slope {
        Slope::new(p, q).unwrap()
    }

    fn mk(b: Slope, t: Slope, d: u32) -> AugmentedMarking {
        AugmentedMarking::new(SurfaceKind::OncePuncturedTorus, b, t, d).unwrap()
    }

    #[test]
    fn same_base_is_vertical() {
        let m1 = mk(s(0, 1), Slope::INFINITY, 0);
        let m2 = mk(s(0, 1), Slope::INFINITY, 4);
        let h = build_hierarchy(&m1, &m2, B2).unwrap();
        validate_hierarchy(&h).unwrap();
        assert_eq!(h.main.vertices.len(), 1);
        assert_eq!(h.annular[0].size(), 4);
        assert_eq!(total_size(&h), 4);
        let res = resolve(&h);
        assert_eq!(res.len(), 4);
        validate_resolution(&h, &res).unwrap();
        let path = path_of(&h, &res).unwrap();
        assert_eq!(path.markings.iter().map(|m| m.d).collect::<Vec<_>>(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn adjacent_bases() {
        let m1 = mk(s(0, 1), Slope::INFINITY, 0);
        let m2 = mk(Slope::INFINITY, s(0, 1), 0);
        let h = build_hierarchy(&m1, &m2, B2).unwrap();
        validate_hierarchy(&h).unwrap();
        assert_eq!(h.main.vertices, Vertices::Curve(vec![s(0, 1), Slope::INFINITY]));
        assert_eq!(total_size(&h), 1);
        let res = resolve(&h);
        assert_eq!(res.len(), 1);
        assert_eq!(compatible_marking(&h, &initial_slice(&h)).unwrap(), m1);
        assert_eq!(compatible_marking(&h, &terminal_slice(&h)).unwrap(), m2);
    }

    #[test]
    fn interior_annuli_span_neighbor_projections() {
        let m1 = AugmentedMarking::standard(s(0, 1), 0);
        let m2 = AugmentedMarking::standard(s(5, 8), 0);
        let h = build_hierarchy(&m1, &m2, B2).unwrap();
        validate_hierarchy(&h).unwrap();
        let Vertices::Curve(path) = &h.main.vertices else { panic!() };
        for i in 1..path.len() - 1 {
            let a = neighbor_point(path[i], path[i - 1]);
            let b = neighbor_point(path[i], path[i + 1]);
            assert_eq!(h.annular[i].size() as u64, horo_distance_z(&a, &b, B2));
        }
    }

    #[test]
    fn orders_on_a_small_hierarchy() {
        let m1 = AugmentedMarking::standard(Slope::INFINITY, 1);
        let m2 = mk(s(3, 7), s(1, 2), 2);
        let h = build_hierarchy(&m1, &m2, B2).unwrap();
        let res = resolve(&h);
        validate_resolution(&h, &res).unwrap();
        let first = initial_slice(&h);
        let last = terminal_slice(&h);
        assert_eq!(slice_order(&h, &first, &last), Some(Ordering::Less));
        assert_eq!(slice_order(&h, &first, &first), None);
        let a0 = h.annular[0].domain;
        let a1 = h.annular[1].domain;
        assert_eq!(time_order(&h, a0, a1), Some(Ordering::Less));
        assert_eq!(time_order(&h, a0, a0), None);
        assert_eq!(
            pointed_order(&h, (Domain::WholeSurface, Position::Vertex(0)), (a1, Position::Initial)),
            Some(Ordering::Less)
        );
    }

    #[test]
    fn footprints() {
        let m1 = AugmentedMarking::standard(s(0, 1), 0);
        let m2 = AugmentedMarking::standard(s(2, 5), 0);
        let h = build_hierarchy(&m1, &m2, B2).unwrap();
        let Vertices::Curve(path) = h.main.vertices.clone() else { panic!() };
        for (i, v) in path.iter().enumerate() {
            assert_eq!(footprint(&h, Domain::WholeSurface, Domain::Annulus(*v)).unwrap(), vec![i]);
        }
        assert!(footprint(&h, Domain::WholeSurface, Domain::Annulus(s(7, 3))).unwrap().is_empty());
        assert!(footprint(&h, Domain::Annulus(path[0]), Domain::Annulus(path[0])).is_err());
    }

    #[test]
    fn sigma_structure() {
        let m1 = AugmentedMarking::standard(s(0, 1), 0);
        let m2 = AugmentedMarking::standard(s(2, 5), 3);
        let h = build_hierarchy(&m1, &m2, B2).unwrap();
        assert_eq!(
            sigma_sequences(&h, Domain::WholeSurface),
            (vec![Domain::WholeSurface], vec![Domain::WholeSurface])
        );
        let dom = h.annular[1].domain;
        let (back, fwd) = sigma_sequences(&h, dom);
        assert_eq!(back.last(), Some(&dom));
        assert_eq!(fwd.first(), Some(&dom));
        let (back, fwd) = sigma_sequences(&h, Domain::Annulus(s(9, 4)));
        assert_eq!((back, fwd), (vec![Domain::WholeSurface], vec![Domain::WholeSurface]));
    }

    #[test]
    fn truncation_round_trip() {
        let m1 = AugmentedMarking::standard(s(0, 1), 2);
        let t = act(&twist_about(s(3, 4), 5), s(1, 1));
        let m2 = mk(s(3, 4), t, 1);
        let h = build_hierarchy(&m1, &m2, B2).unwrap();
        let res = resolve(&h);
        let n = res.slices.len() - 1;
        let full = truncate(&h, &res, 0, n).unwrap();
        assert_eq!(full, h);
        let point = truncate(&h, &res, 3, 3).unwrap();
        validate_hierarchy(&point).unwrap();
        assert_eq!(total_size(&point), 0);
        for (i, j) in [(1, n - 1), (2, 5), (0, 4)] {
            let cut = truncate(&h, &res, i, j).unwrap();
            validate_hierarchy(&cut).unwrap();
            validate_resolution(&cut, &restrict_resolution(&res, i, j)).unwrap();
        }
        assert!(truncate(&h, &res, 4, 2).is_err());
        assert!(truncate(&h, &res, 0, n + 1).is_err());
    }

    #[test]
    fn transition_errors_at_terminal_vertex() {
        let m = AugmentedMarking::standard(s(0, 1), 0);
        let h = build_hierarchy(&m, &AugmentedMarking::standard(s(1, 1), 0), B2).unwrap();
        assert!(transition_slices(&h, Domain::WholeSurface, 1).is_err());
        assert!(transition_slices(&h, Domain::WholeSurface, 0).is_ok());
    }

    #[test]
    fn active_segments() {
        let m1 = AugmentedMarking::standard(s(0, 1), 0);
        let m2 = AugmentedMarking::standard(s(2, 5), 2);
        let h = build_hierarchy(&m1, &m2, B2).unwrap();
        let res = resolve(&h);
        assert_eq!(active_segment(&res, &h, Domain::WholeSurface), Some((0, res.slices.len() - 1)));
        assert_eq!(active_segment(&res, &h, Domain::Annulus(s(9, 4))), None);
        let (a, b) = active_segment(&res, &h, h.annular[1].domain).unwrap();
        assert!(a <= b);
    }

    #[test]
    fn large_links_of_a_deep_twist() {
        let m1 = AugmentedMarking::standard(s(0, 1), 0);
        let m2 = mk(s(0, 1), act(&twist_about(s(0, 1), 1 << 20), Slope::INFINITY), 0);
        let links = large_links(&m1, &m2, 12, B2);
        assert_eq!(links.len(), 1);
        assert_eq!(links[0].0, Domain::Annulus(s(0, 1)));
        assert!(large_links(&m1, &m1, 1, B2).is_empty());
    }
}
