//! Ground-truth Monte Carlo simulator: samples full 3D scenes (Poisson
//! APs, Boolean wall segments, rectangular human screens, sectored beams)
//! and estimates coverage and hitting probabilities empirically.
//!
//! Trials are independent snapshots; each runs on its own counter-derived
//! RNG stream so estimates are reproducible bit-for-bit regardless of the
//! worker count.

use crate::antenna::{wrap_angle, AntennaPattern, Boresight};
use crate::propagation::{received_power, LinkBudget, Lobe};
use crate::scenario::{Environment, Scenario, ScenarioError, WallLengthLaw};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("x00 = {x00} m outside the room (half-diagonal {limit:.3} m)")]
    X00OutsideRoom { x00: f64, limit: f64 },
    #[error("association rejection exhausted after {attempts} draws")]
    AssociationExhausted { attempts: u32 },
    #[error("wall-process rejection for the serving link exhausted")]
    ServingConditioningExhausted,
}

const ASSOCIATION_ATTEMPTS: u32 = 1000;

/// 2D point in the horizontal plane (user at the origin).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    fn dist(self, o: Point) -> f64 {
        ((self.x - o.x).powi(2) + (self.y - o.y).powi(2)).sqrt()
    }
}

/// Wall segment (axis-aligned by construction of the Boolean model).
#[derive(Debug, Clone, Copy)]
pub struct Wall {
    pub a: Point,
    pub b: Point,
}

/// Absorbing rectangular screen: center, footprint orientation and
/// half-widths.
#[derive(Debug, Clone, Copy)]
pub struct HumanScreen {
    pub center: Point,
    pub cos_o: f64,
    pub sin_o: f64,
    pub half_w1: f64,
    pub half_w2: f64,
}

/// Interfering AP with its associated UE.
#[derive(Debug, Clone, Copy)]
pub struct Interferer {
    pub ap: Point,
    pub ue: Point,
}

/// One sampled snapshot of the network around the typical user.
#[derive(Debug, Clone)]
pub struct Scene {
    pub x00: f64,
    pub serving_azimuth: f64,
    pub serving_ap: Point,
    pub interferers: Vec<Interferer>,
    pub walls: Vec<Wall>,
    pub humans: Vec<HumanScreen>,
}

impl Scene {
    /// The typical user's boresight (towards the serving AP, tilted up).
    pub fn user_boresight(&self, hbar: f64) -> Boresight {
        Boresight::new(self.serving_azimuth, hbar.atan2(self.x00))
    }
}

/// Monte Carlo estimate with a 95% normal-approximation confidence
/// half-width.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub mean: f64,
    pub trials: u64,
    pub ci95_half_width: f64,
    pub rejected_associations: u64,
}

impl Estimate {
    fn from_counts(successes: u64, valid: u64, rejected: u64) -> Self {
        let mean = if valid == 0 {
            0.0
        } else {
            successes as f64 / valid as f64
        };
        let half = if valid == 0 {
            0.0
        } else {
            1.96 * (mean * (1.0 - mean) / valid as f64).sqrt()
        };
        Estimate {
            mean,
            trials: valid,
            ci95_half_width: half,
            rejected_associations: rejected,
        }
    }
}

// ---------------------------------------------------------------------------
// Geometric predicates
// ---------------------------------------------------------------------------

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Inclusive segment intersection (proper crossings, endpoint touches and
/// collinear overlap all count).
pub fn segments_intersect(p1: Point, q1: Point, p2: Point, q2: Point) -> bool {
    let d1 = cross(p2, q2, p1);
    let d2 = cross(p2, q2, q1);
    let d3 = cross(p1, q1, p2);
    let d4 = cross(p1, q1, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(p2, q2, p1))
        || (d2 == 0.0 && on_segment(p2, q2, q1))
        || (d3 == 0.0 && on_segment(p1, q1, p2))
        || (d4 == 0.0 && on_segment(p1, q1, q2))
}

/// True when any wall crosses the 2D projection of a link (walls are
/// AP-height, so crossing the projection blocks the link outright).
pub fn is_wall_blocked(walls: &[Wall], a: Point, b: Point) -> bool {
    walls.iter().any(|w| segments_intersect(w.a, w.b, a, b))
}

impl HumanScreen {
    /// Segment-vs-oriented-rectangle test in the screen's frame (slab
    /// clipping, inclusive boundaries).
    fn intersects(&self, a: Point, b: Point) -> bool {
        let to_local = |p: Point| {
            let dx = p.x - self.center.x;
            let dy = p.y - self.center.y;
            (
                dx * self.cos_o + dy * self.sin_o,
                -dx * self.sin_o + dy * self.cos_o,
            )
        };
        let (ax, ay) = to_local(a);
        let (bx, by) = to_local(b);
        let (dx, dy) = (bx - ax, by - ay);
        let mut t0 = 0.0f64;
        let mut t1 = 1.0f64;
        for (p0, d0, h) in [(ax, dx, self.half_w1), (ay, dy, self.half_w2)] {
            if d0 == 0.0 {
                if p0 < -h || p0 > h {
                    return false;
                }
            } else {
                let inv = 1.0 / d0;
                let (ta, tb) = ((-h - p0) * inv, (h - p0) * inv);
                let (ta, tb) = if ta <= tb { (ta, tb) } else { (tb, ta) };
                t0 = t0.max(ta);
                t1 = t1.min(tb);
                if t0 > t1 {
                    return false;
                }
            }
        }
        true
    }
}

/// True when any screen cuts the low portion of the UE-to-AP ray: only the
/// first `height_frac` of the projection (from the UE end) sits below the
/// blocker height.
pub fn is_human_blocked(
    humans: &[HumanScreen],
    ue: Point,
    ap: Point,
    height_frac: f64,
) -> bool {
    let cut = Point::new(
        ue.x + height_frac * (ap.x - ue.x),
        ue.y + height_frac * (ap.y - ue.y),
    );
    humans.iter().any(|h| h.intersects(ue, cut))
}

/// Self-blockage: the zone of width `omega` centered opposite the serving
/// direction.
pub fn in_self_blockage(theta_i: f64, theta00: f64, omega: f64) -> bool {
    wrap_angle(theta_i - (theta00 + std::f64::consts::PI)).abs() <= omega / 2.0
}

// ---------------------------------------------------------------------------
// Scene-scale indexes (rebuilt per trial, reused across trials)
// ---------------------------------------------------------------------------

/// Axis-aligned walls split by orientation and sorted by their fixed
/// coordinate; a query segment only meets walls whose line it straddles.
#[derive(Default)]
struct WallIndex {
    /// (y, x_lo, x_hi) sorted by y
    horiz: Vec<(f64, f64, f64)>,
    /// (x, y_lo, y_hi) sorted by x
    vert: Vec<(f64, f64, f64)>,
}

impl WallIndex {
    fn build(&mut self, walls: &[Wall]) {
        self.horiz.clear();
        self.vert.clear();
        for w in walls {
            if w.a.y == w.b.y {
                self.horiz
                    .push((w.a.y, w.a.x.min(w.b.x), w.a.x.max(w.b.x)));
            } else {
                self.vert.push((w.a.x, w.a.y.min(w.b.y), w.a.y.max(w.b.y)));
            }
        }
        self.horiz.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        self.vert.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    }

    fn blocked(&self, a: Point, b: Point) -> bool {
        band_crossing(&self.horiz, a.y, b.y, a.x, b.x) || band_crossing(&self.vert, a.x, b.x, a.y, b.y)
    }
}

/// Walls with fixed coordinate `c` in `[p_lo, p_hi]` (the segment's span on
/// that axis) are crossing candidates; the crossing point on the other axis
/// must land inside the wall extent.
fn band_crossing(sorted: &[(f64, f64, f64)], pa: f64, pb: f64, qa: f64, qb: f64) -> bool {
    let (lo, hi) = if pa <= pb { (pa, pb) } else { (pb, pa) };
    let start = sorted.partition_point(|w| w.0 < lo);
    for &(c, w_lo, w_hi) in &sorted[start..] {
        if c > hi {
            break;
        }
        let da = pa - c;
        let db = pb - c;
        if da == 0.0 && db == 0.0 {
            // collinear: inclusive interval overlap
            if qa.min(qb) <= w_hi && qa.max(qb) >= w_lo {
                return true;
            }
        } else {
            let t = da / (da - db);
            let q = qa + t * (qb - qa);
            if q >= w_lo && q <= w_hi {
                return true;
            }
        }
    }
    false
}

/// Uniform grid over screen centers; queries walk the cells overlapping the
/// (inflated) segment bounding box.
struct HumanGrid {
    cell: f64,
    ox: f64,
    oy: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>,
    /// Largest screen half-diagonal, the query inflation radius.
    reach: f64,
}

impl HumanGrid {
    fn new() -> Self {
        Self {
            cell: 5.0,
            ox: 0.0,
            oy: 0.0,
            nx: 0,
            ny: 0,
            cells: Vec::new(),
            reach: 0.0,
        }
    }

    fn build(&mut self, humans: &[HumanScreen], half_l1: f64, half_l2: f64) {
        self.ox = -half_l1;
        self.oy = -half_l2;
        let nx = ((2.0 * half_l1 / self.cell).ceil() as usize).max(1);
        let ny = ((2.0 * half_l2 / self.cell).ceil() as usize).max(1);
        if nx != self.nx || ny != self.ny {
            self.nx = nx;
            self.ny = ny;
            self.cells = vec![Vec::new(); nx * ny];
        } else {
            for c in &mut self.cells {
                c.clear();
            }
        }
        self.reach = 0.0;
        for (i, h) in humans.iter().enumerate() {
            self.reach = self.reach.max(h.half_w1.hypot(h.half_w2));
            let cx = (((h.center.x - self.ox) / self.cell) as isize).clamp(0, nx as isize - 1);
            let cy = (((h.center.y - self.oy) / self.cell) as isize).clamp(0, ny as isize - 1);
            self.cells[cy as usize * nx + cx as usize].push(i as u32);
        }
    }

    fn blocked(&self, humans: &[HumanScreen], a: Point, b: Point) -> bool {
        if humans.is_empty() {
            return false;
        }
        let r = self.reach;
        let x_lo = a.x.min(b.x) - r;
        let x_hi = a.x.max(b.x) + r;
        let y_lo = a.y.min(b.y) - r;
        let y_hi = a.y.max(b.y) + r;
        let ix0 = (((x_lo - self.ox) / self.cell).floor() as isize).clamp(0, self.nx as isize - 1);
        let ix1 = (((x_hi - self.ox) / self.cell).floor() as isize).clamp(0, self.nx as isize - 1);
        let iy0 = (((y_lo - self.oy) / self.cell).floor() as isize).clamp(0, self.ny as isize - 1);
        let iy1 = (((y_hi - self.oy) / self.cell).floor() as isize).clamp(0, self.ny as isize - 1);
        for iy in iy0..=iy1 {
            for ix in ix0..=ix1 {
                for &id in &self.cells[iy as usize * self.nx + ix as usize] {
                    if humans[id as usize].intersects(a, b) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

// ---------------------------------------------------------------------------
// Simulation context and trial machinery
// ---------------------------------------------------------------------------

/// Scenario-derived constants shared by every trial.
struct SimContext {
    env: Environment,
    hbar: f64,
    height_frac: f64,
    r_t: f64,
    budget: LinkBudget,
    ap_pattern: AntennaPattern,
    ue_pattern: AntennaPattern,
    omega: f64,
    half_l1: f64,
    half_l2: f64,
    ap_mean: f64,
    human_mean: f64,
    wall_mean: f64,
    wall_len_mean: f64,
    wall_law: WallLengthLaw,
    blocker_half_w1: f64,
    blocker_half_w2: f64,
    human_density: f64,
    wall_density: f64,
}

impl SimContext {
    fn new(s: &Scenario, env: Environment) -> Result<Self, ScenarioError> {
        let d = s.derive()?;
        let area = s.network.room_length * s.network.room_width;
        let wall_density = match env {
            Environment::TypicalIndoor => s.blockage.wall_density,
            Environment::OpenOffice => 0.0,
        };
        Ok(Self {
            env,
            hbar: d.hbar,
            height_frac: (s.blockage.blocker_height - s.network.ue_height) / d.hbar,
            r_t: d.r_t,
            budget: d.budget,
            ap_pattern: s.ap_pattern()?,
            ue_pattern: s.ue_pattern()?,
            omega: s.blockage.self_block_angle,
            half_l1: s.network.room_length / 2.0,
            half_l2: s.network.room_width / 2.0,
            ap_mean: s.network.ap_density * area,
            human_mean: s.blockage.blocker_density * area,
            wall_mean: wall_density * area,
            wall_len_mean: s.blockage.wall_mean_length,
            wall_law: s.blockage.wall_length_law,
            blocker_half_w1: s.blockage.blocker_w1 / 2.0,
            blocker_half_w2: s.blockage.blocker_w2 / 2.0,
            human_density: s.blockage.blocker_density,
            wall_density,
        })
    }

    fn half_diagonal(&self) -> f64 {
        self.half_l1.hypot(self.half_l2)
    }
}

fn poisson_count(mean: f64, rng: &mut ChaCha8Rng) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive mean").sample(rng) as usize
}

fn uniform_in_room(ctx: &SimContext, rng: &mut ChaCha8Rng) -> Point {
    Point::new(
        (rng.random::<f64>() - 0.5) * 2.0 * ctx.half_l1,
        (rng.random::<f64>() - 0.5) * 2.0 * ctx.half_l2,
    )
}

fn sample_humans(ctx: &SimContext, rng: &mut ChaCha8Rng, out: &mut Vec<HumanScreen>) {
    out.clear();
    let n = poisson_count(ctx.human_mean, rng);
    out.reserve(n);
    for _ in 0..n {
        let center = uniform_in_room(ctx, rng);
        let o = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
        out.push(HumanScreen {
            center,
            cos_o: o.cos(),
            sin_o: o.sin(),
            half_w1: ctx.blocker_half_w1,
            half_w2: ctx.blocker_half_w2,
        });
    }
}

fn sample_walls(ctx: &SimContext, rng: &mut ChaCha8Rng, out: &mut Vec<Wall>) {
    out.clear();
    let n = poisson_count(ctx.wall_mean, rng);
    out.reserve(n);
    for _ in 0..n {
        let center = uniform_in_room(ctx, rng);
        let horizontal = rng.random::<f64>() < 0.5;
        let len = match ctx.wall_law {
            WallLengthLaw::Fixed => ctx.wall_len_mean,
            WallLengthLaw::Exponential => {
                -ctx.wall_len_mean * (1.0 - rng.random::<f64>()).ln()
            }
        };
        let h = len / 2.0;
        let (a, b) = if horizontal {
            (
                Point::new(center.x - h, center.y),
                Point::new(center.x + h, center.y),
            )
        } else {
            (
                Point::new(center.x, center.y - h),
                Point::new(center.x, center.y + h),
            )
        };
        out.push(Wall { a, b });
    }
}

/// Walls conditioned on a clear serving link by resampling the whole
/// process (deleting offenders would bias wall statistics near the user).
fn sample_walls_conditioned(
    ctx: &SimContext,
    rng: &mut ChaCha8Rng,
    serving: Option<(Point, Point)>,
    walls: &mut Vec<Wall>,
    index: &mut WallIndex,
) -> Result<(), SimError> {
    for _ in 0..100_000u32 {
        sample_walls(ctx, rng, walls);
        index.build(walls);
        match serving {
            Some((a, b)) if index.blocked(a, b) => continue,
            _ => return Ok(()),
        }
    }
    Err(SimError::ServingConditioningExhausted)
}

/// UE drawn uniformly in the association disk, redrawn until its link to
/// the AP is wall-clear (typical indoor).
fn associate_ue(
    ctx: &SimContext,
    rng: &mut ChaCha8Rng,
    ap: Point,
    index: &WallIndex,
) -> Result<Point, SimError> {
    for _ in 0..ASSOCIATION_ATTEMPTS {
        let r = ctx.r_t * rng.random::<f64>().sqrt();
        let ang = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
        let ue = Point::new(ap.x + r * ang.cos(), ap.y + r * ang.sin());
        if ctx.env == Environment::OpenOffice || !index.blocked(ap, ue) {
            return Ok(ue);
        }
    }
    Err(SimError::AssociationExhausted {
        attempts: ASSOCIATION_ATTEMPTS,
    })
}

/// Sample one full scene: serving AP at distance `x00` with uniform
/// azimuth, Poisson interferers, walls conditioned on a clear serving link,
/// humans, and a wall-clear associated UE for every interferer.
pub fn sample_scene(
    s: &Scenario,
    env: Environment,
    x00: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Scene, SimError> {
    let ctx = SimContext::new(s, env)?;
    let limit = ctx.half_diagonal();
    if x00 > limit {
        return Err(SimError::X00OutsideRoom { x00, limit });
    }
    let mut walls = Vec::new();
    let mut humans = Vec::new();
    let mut index = WallIndex::default();

    let theta00 = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
    let serving_ap = Point::new(x00 * theta00.cos(), x00 * theta00.sin());
    sample_humans(&ctx, rng, &mut humans);
    sample_walls_conditioned(
        &ctx,
        rng,
        Some((Point::new(0.0, 0.0), serving_ap)),
        &mut walls,
        &mut index,
    )?;

    let n_aps = poisson_count(ctx.ap_mean, rng);
    let mut interferers = Vec::with_capacity(n_aps);
    for _ in 0..n_aps {
        let ap = uniform_in_room(&ctx, rng);
        let ue = associate_ue(&ctx, rng, ap, &index)?;
        interferers.push(Interferer { ap, ue });
    }
    Ok(Scene {
        x00,
        serving_azimuth: theta00,
        serving_ap,
        interferers,
        walls,
        humans,
    })
}

/// Interference power contributed by one unblocked interferer, selecting
/// main/side lobes on both ends from the actual beam geometry.
fn interferer_power(
    ctx: &SimContext,
    ap: Point,
    ue: Point,
    user_bore: Boresight,
    x_i0: f64,
    theta_i: f64,
) -> f64 {
    let origin = Point::new(0.0, 0.0);
    // interferer's boresight: down towards its own UE
    let x_ii = ap.dist(ue);
    let ap_bore = Boresight::new(
        (ue.y - ap.y).atan2(ue.x - ap.x),
        -ctx.hbar.atan2(x_ii),
    );
    // direction from the interferer to the typical user
    let to_user = Boresight::new(
        (origin.y - ap.y).atan2(origin.x - ap.x),
        -ctx.hbar.atan2(x_i0),
    );
    let kappa = if ctx.ap_pattern.contains(ap_bore, to_user) {
        Lobe::Main
    } else {
        Lobe::Side
    };
    // direction from the user to the interferer
    let to_ap = Boresight::new(theta_i, ctx.hbar.atan2(x_i0));
    let iota = if ctx.ue_pattern.contains(user_bore, to_ap) {
        Lobe::Main
    } else {
        Lobe::Side
    };
    received_power(x_i0, kappa, iota, &ctx.budget, ctx.hbar)
}

/// SINR of a sampled scene plus the serving link's human-LoS flag (walls
/// are excluded from the serving link by construction and self-blockage
/// never applies to it).
pub fn sinr(scene: &Scene, s: &Scenario, env: Environment) -> Result<(f64, bool), SimError> {
    let ctx = SimContext::new(s, env)?;
    let origin = Point::new(0.0, 0.0);
    let serving_los = !is_human_blocked(
        &scene.humans,
        origin,
        scene.serving_ap,
        ctx.height_frac,
    );
    let user_bore = scene.user_boresight(ctx.hbar);
    let mut interference = 0.0;
    for i in &scene.interferers {
        let x_i0 = i.ap.dist(origin);
        let theta_i = i.ap.y.atan2(i.ap.x);
        if in_self_blockage(theta_i, scene.serving_azimuth, ctx.omega) {
            continue;
        }
        if is_wall_blocked(&scene.walls, origin, i.ap) {
            continue;
        }
        if is_human_blocked(&scene.humans, origin, i.ap, ctx.height_frac) {
            continue;
        }
        interference += interferer_power(&ctx, i.ap, i.ue, user_bore, x_i0, theta_i);
    }
    let desired = received_power(scene.x00, Lobe::Main, Lobe::Main, &ctx.budget, ctx.hbar);
    Ok((
        desired / (ctx.budget.noise_power + interference),
        serving_los,
    ))
}

/// Per-worker scratch buffers reused across trials.
struct Workspace {
    walls: Vec<Wall>,
    humans: Vec<HumanScreen>,
    wall_index: WallIndex,
    human_grid: HumanGrid,
}

impl Workspace {
    fn new() -> Self {
        Self {
            walls: Vec::new(),
            humans: Vec::new(),
            wall_index: WallIndex::default(),
            human_grid: HumanGrid::new(),
        }
    }
}

enum TrialOutcome {
    Success,
    Failure,
    Rejected,
}

/// Fused coverage trial: identical sampling order to [`sample_scene`], but
/// interferer UEs are only associated once their AP survives the blockage
/// and self-blockage filters (associations of blocked APs cannot influence
/// the SINR).
fn coverage_trial(ctx: &SimContext, x00: f64, rng: &mut ChaCha8Rng, ws: &mut Workspace) -> TrialOutcome {
    let origin = Point::new(0.0, 0.0);
    let theta00 = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
    let serving_ap = Point::new(x00 * theta00.cos(), x00 * theta00.sin());
    sample_humans(ctx, rng, &mut ws.humans);
    ws.human_grid.build(&ws.humans, ctx.half_l1, ctx.half_l2);
    if sample_walls_conditioned(
        ctx,
        rng,
        Some((origin, serving_ap)),
        &mut ws.walls,
        &mut ws.wall_index,
    )
    .is_err()
    {
        return TrialOutcome::Rejected;
    }

    let serving_los = !ws
        .human_grid
        .blocked(&ws.humans, origin, cut_point(origin, serving_ap, ctx.height_frac));

    let user_bore = Boresight::new(theta00, ctx.hbar.atan2(x00));
    let desired = received_power(x00, Lobe::Main, Lobe::Main, &ctx.budget, ctx.hbar);
    let threshold = ctx.budget.sinr_threshold;
    let mut interference = 0.0;

    let n_aps = poisson_count(ctx.ap_mean, rng);
    for _ in 0..n_aps {
        let ap = uniform_in_room(ctx, rng);
        let x_i0 = ap.dist(origin);
        let theta_i = ap.y.atan2(ap.x);
        if in_self_blockage(theta_i, theta00, ctx.omega) {
            continue;
        }
        if ws.wall_index.blocked(origin, ap) {
            continue;
        }
        if ws
            .human_grid
            .blocked(&ws.humans, origin, cut_point(origin, ap, ctx.height_frac))
        {
            continue;
        }
        match associate_ue(ctx, rng, ap, &ws.wall_index) {
            Ok(ue) => interference += interferer_power(ctx, ap, ue, user_bore, x_i0, theta_i),
            Err(_) => return TrialOutcome::Rejected,
        }
    }

    let sinr = desired / (ctx.budget.noise_power + interference);
    if serving_los && sinr >= threshold {
        TrialOutcome::Success
    } else {
        TrialOutcome::Failure
    }
}

fn cut_point(ue: Point, ap: Point, frac: f64) -> Point {
    Point::new(ue.x + frac * (ap.x - ue.x), ue.y + frac * (ap.y - ue.y))
}

fn run_trials<F>(trials: u64, seed: u64, trial: F) -> (u64, u64, u64)
where
    F: Fn(&mut ChaCha8Rng, &mut Workspace) -> TrialOutcome + Sync,
{
    let base = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .into_par_iter()
        .with_min_len(256)
        .map_init(Workspace::new, |ws, t| {
            let mut rng = base.clone();
            rng.set_stream(t);
            match trial(&mut rng, ws) {
                TrialOutcome::Success => (1u64, 1u64, 0u64),
                TrialOutcome::Failure => (0, 1, 0),
                TrialOutcome::Rejected => (0, 0, 1),
            }
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2))
}

/// Empirical coverage probability: fraction of independent snapshots whose
/// serving link is human-LoS and whose SINR meets the threshold.
pub fn estimate_coverage(
    s: &Scenario,
    env: Environment,
    x00: f64,
    trials: u64,
    seed: u64,
) -> Result<Estimate, SimError> {
    let ctx = SimContext::new(s, env)?;
    let limit = ctx.half_diagonal();
    if x00 > limit {
        return Err(SimError::X00OutsideRoom { x00, limit });
    }
    let (succ, valid, rejected) =
        run_trials(trials, seed, |rng, ws| coverage_trial(&ctx, x00, rng, ws));
    Ok(Estimate::from_counts(succ, valid, rejected))
}

/// Alias used by the sweep driver.
pub fn estimate_coverage_with_model(
    s: &Scenario,
    env: Environment,
    x00: f64,
    trials: u64,
    seed: u64,
) -> Result<Estimate, SimError> {
    estimate_coverage(s, env, x00, trials, seed)
}

/// Empirical hitting probability: a fresh interferer at horizontal distance
/// `x_i0` (uniform azimuth), its UE drawn per the association rule, has the
/// user inside both main-lobe extents.
pub fn estimate_hitting(
    s: &Scenario,
    env: Environment,
    x_i0: f64,
    trials: u64,
    seed: u64,
) -> Result<Estimate, SimError> {
    let ctx = SimContext::new(s, env)?;
    let (succ, valid, rejected) = run_trials(trials, seed, |rng, ws| {
        let origin = Point::new(0.0, 0.0);
        if sample_walls_conditioned(&ctx, rng, None, &mut ws.walls, &mut ws.wall_index).is_err() {
            return TrialOutcome::Rejected;
        }
        let ang = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
        let ap = Point::new(x_i0 * ang.cos(), x_i0 * ang.sin());
        let ue = match associate_ue(&ctx, rng, ap, &ws.wall_index) {
            Ok(ue) => ue,
            Err(_) => return TrialOutcome::Rejected,
        };
        let x_ii = ap.dist(ue);
        let ap_bore = Boresight::new((ue.y - ap.y).atan2(ue.x - ap.x), -ctx.hbar.atan2(x_ii));
        let to_user = Boresight::new(
            (origin.y - ap.y).atan2(origin.x - ap.x),
            -ctx.hbar.atan2(x_i0),
        );
        if ctx.ap_pattern.contains(ap_bore, to_user) {
            TrialOutcome::Success
        } else {
            TrialOutcome::Failure
        }
    });
    Ok(Estimate::from_counts(succ, valid, rejected))
}
