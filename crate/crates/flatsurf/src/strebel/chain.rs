//! The packaged genus-2 chain-type maximal Jenkins-Strebel surface: three
//! horizontal cylinders joined by two theta-graph junctions.
//!
//! Junction 1 joins C1-top, C1-bottom and C2-top through graph edges
//! u (length l2/2, a top-top flip), v (length l1 - l2/2, a top-bottom
//! translation) and w (= u in length, bottom-top translation); junction 2
//! mirrors this with C3 and C2-bottom. Each junction carries two cone
//! points of angle 3pi, so the four zeros are simple... of order one.
//! Requires l2 < 2*l1 and l2 < 2*l3.
//!
//! The chain pants structure makes alpha_1 and alpha_3 bound a one-handled
//! pants on both sides (their duals cross once); alpha_2 separates, so its
//! dual is forced to cross twice.

use crate::geodesic::curve::CurveClass;
use crate::geom::trace::{trace_line_closed, trace_polyline_closed, PolyStep};
use crate::geom::triangulation::{triangulate, Triangulation};
use crate::geom::Vec2;
use crate::lamination::dt::{DtVector, PantsStructure};
use crate::lamination::realize::{DtRealizer, Realized};
use crate::num::{rat, rat_to_f64, Rat};
use crate::strebel::spec::{build_strebel, StrebelError, StrebelSpec, StrebelSurface};
use num_traits::{Signed, ToPrimitive, Zero};

pub struct ChainSurface {
    pub st: StrebelSurface,
    pub tri: Triangulation,
    pub l: [Rat; 3],
    pub h: [Rat; 3],
    /// Junction arc lengths: u1 = w1 = l2/2, v1 = l1 - l2/2; mirrored.
    pub u1: Rat,
    pub v1: Rat,
    pub u2: Rat,
    pub v2: Rat,
    pub alpha: Vec<CurveClass>,
    pub beta: Vec<CurveClass>,
    /// Declared crossing numbers i(beta_j, alpha_j).
    pub beta_crossings: [u64; 3],
    /// Collar inset used by strand routing.
    pub delta: Rat,
}

fn pair_i64(x: &Rat) -> [i64; 2] {
    [
        x.numer().to_i64().expect("small rational"),
        x.denom().to_i64().expect("small rational"),
    ]
}

impl ChainSurface {
    pub fn spec(l: &[Rat; 3], h: &[Rat; 3]) -> StrebelSpec {
        let two = Rat::from_integer(2.into());
        let u1 = &l[1] / &two;
        let v1 = &l[0] - &u1;
        let u2 = &l[1] / &two;
        let v2 = &l[2] - &u2;
        let dims = |j: usize| {
            let lp = pair_i64(&l[j]);
            let hp = pair_i64(&h[j]);
            [lp[0], lp[1], hp[0], hp[1]]
        };
        // Circles: 0 C1bot, 1 C1top, 2 C2bot, 3 C2top, 4 C3bot, 5 C3top.
        StrebelSpec {
            cylinders: vec![dims(0), dims(1), dims(2)],
            cuts: vec![
                vec![pair_i64(&v1)],
                vec![pair_i64(&u1)],
                vec![pair_i64(&u2)],
                vec![pair_i64(&u1)],
                vec![pair_i64(&v2)],
                vec![pair_i64(&u2)],
            ],
            pairing: vec![
                [[1, 0], [3, 1]], // u: C1top[0,u1] ~ C2top[u1,l2], flip
                [[1, 1], [0, 0]], // v: C1top[u1,l1] ~ C1bot[0,v1], translation
                [[0, 1], [3, 0]], // w: C1bot[v1,l1] ~ C2top[0,u1], translation
                [[5, 0], [2, 1]], // u': C3top[0,u2] ~ C2bot[u2,l2], translation
                [[5, 1], [4, 0]], // v': C3top[u2,l3] ~ C3bot[0,v2], translation
                [[4, 1], [2, 0]], // w': C3bot[v2,l3] ~ C2bot[0,u2], flip
            ],
            genus: 2,
        }
    }

    pub fn new(l: [Rat; 3], h: [Rat; 3]) -> Result<ChainSurface, StrebelError> {
        let two = Rat::from_integer(2.into());
        assert!(
            l[1] < &two * &l[0] && l[1] < &two * &l[2],
            "chain pattern needs l2 < 2*l1 and l2 < 2*l3"
        );
        let spec = Self::spec(&l, &h);
        let st = build_strebel(&spec)?;
        let tri = triangulate(&st.surface);
        let u1 = &l[1] / &two;
        let v1 = &l[0] - &u1;
        let u2 = &l[1] / &two;
        let v2 = &l[2] - &u2;
        let hmin = h.iter().fold(h[0].clone(), |a, b| a.min(b.clone()));
        let delta = &hmin / Rat::from_integer(32.into());

        let east = Vec2::new(Rat::from_integer(1.into()), Rat::zero());
        let alpha: Vec<CurveClass> = (0..3)
            .map(|j| {
                let x = &l[j] / Rat::from_integer(17.into());
                let y = &h[j] / &two;
                let (poly, pt) = st.point_in_cylinder(j, &x, &y);
                trace_line_closed(&tri, poly, &pt, &east).expect("core line closes")
            })
            .collect();

        let mut me = ChainSurface {
            st,
            tri,
            l,
            h,
            u1,
            v1,
            u2,
            v2,
            alpha,
            beta: Vec::new(),
            beta_crossings: [1, 2, 1],
            delta,
        };
        me.beta = me.build_duals();
        Ok(me)
    }

    /// Waypoint in cylinder coordinates (x taken mod l_j, y in [0, h_j]).
    pub fn wp(&self, cyl: usize, x: &Rat, y: &Rat) -> PolyStep {
        let lj = &self.l[cyl];
        let mut xm = x.clone();
        while xm.is_negative() {
            xm += lj;
        }
        while xm >= *lj {
            xm -= lj;
        }
        let (poly, pt) = self.st.point_in_cylinder(cyl, &xm, y);
        PolyStep::Point(poly, pt)
    }

    /// Public wrapper over `emit_run` for tests and family builders.
    pub fn emit_run_pub(
        &self,
        out: &mut Vec<PolyStep>,
        cyl: usize,
        x0: &Rat,
        y0: &Rat,
        x1: &Rat,
        y1: &Rat,
    ) {
        self.emit_run(out, cyl, x0, y0, x1, y1);
    }

    /// Straight run inside one cylinder from (x0, y0) to (x1, y1), x1
    /// unwrapped. Emits jump steps at every polygon seam crossed. The
    /// starting point is NOT emitted.
    fn emit_run(
        &self,
        out: &mut Vec<PolyStep>,
        cyl: usize,
        x0: &Rat,
        y0: &Rat,
        x1: &Rat,
        y1: &Rat,
    ) {
        let lj = &self.l[cyl];
        let mut seams: Vec<Rat> = self.st.charts[2 * cyl]
            .intervals
            .iter()
            .map(|(a, _b, _p, _e)| a.clone())
            .collect();
        seams.push(lj.clone());
        let mut cuts: Vec<Rat> = Vec::new();
        if x1 != x0 {
            let ascending = x1 > x0;
            let (lo, hi) = if ascending {
                (x0.clone(), x1.clone())
            } else {
                (x1.clone(), x0.clone())
            };
            let kmin = (&lo / lj).floor() - Rat::from_integer(1.into());
            let kmax = (&hi / lj).ceil() + Rat::from_integer(1.into());
            let mut k = kmin;
            while k <= kmax {
                for s in &seams {
                    let pos = s + &(&k * lj);
                    if pos > lo && pos < hi {
                        cuts.push(pos);
                    }
                }
                k += Rat::from_integer(1.into());
            }
            cuts.sort();
            cuts.dedup();
            if !ascending {
                cuts.reverse();
            }
        }
        let dy = y1 - y0;
        let dx = x1 - x0;
        for c in cuts {
            let t = (&c - x0) / &dx;
            let y = y0 + &(&dy * &t);
            out.push(self.wp_side(jcyl(cyl), &c, &y, dx.is_positive()));
            out.push(PolyStep::Jump);
            out.push(self.wp_side(jcyl(cyl), &c, &y, !dx.is_positive()));
        }
        out.push(self.wp(cyl, x1, y1));
    }

    /// Waypoint on a seam: `left_piece = true` gives the piece whose right
    /// edge is the seam.
    fn wp_side(&self, cyl: usize, x: &Rat, y: &Rat, left_piece: bool) -> PolyStep {
        let lj = &self.l[cyl];
        let mut xm = x.clone();
        while xm.is_negative() {
            xm += lj;
        }
        while xm >= *lj {
            xm -= lj;
        }
        for (a, b, id, _e) in &self.st.charts[2 * cyl].intervals {
            if left_piece && *b == xm {
                return PolyStep::Point(*id, Vec2::new(b - a, y.clone()));
            }
            if !left_piece && *a == xm {
                return PolyStep::Point(*id, Vec2::new(Rat::zero(), y.clone()));
            }
        }
        if left_piece && xm.is_zero() {
            for (a, b, id, _e) in &self.st.charts[2 * cyl].intervals {
                if *b == *lj {
                    return PolyStep::Point(*id, Vec2::new(b - a, y.clone()));
                }
            }
        }
        panic!("seam position not found");
    }

    fn build_duals(&self) -> Vec<CurveClass> {
        let d = &self.delta;
        let l = &self.l;
        let mut duals = Vec::new();
        {
            // beta_1: once through C1 via the v-window (x -> x - u1).
            let xb = &self.u1 + &(&self.v1 * &rat(2, 3));
            let xa = &self.u1 + &(&self.v1 * &rat(1, 2));
            let mut steps = Vec::new();
            steps.push(self.wp(0, &xa, d));
            self.emit_run(&mut steps, 0, &xa, d, &xb, &self.h[0]);
            steps.push(PolyStep::Jump);
            let xr = &xb - &self.u1;
            steps.push(self.wp(0, &xr, &Rat::zero()));
            self.emit_run(&mut steps, 0, &xr, &Rat::zero(), &xa, d);
            duals.push(trace_polyline_closed(&self.tri, &steps).expect("beta1"));
        }
        {
            // beta_2: twice through C2. Each junction passage goes around
            // the handle through all three windows (u, v, w), which is what
            // makes it essential; a plain dip into a collar bounds a disk.
            let u1 = &self.u1;
            let v1 = &self.v1;
            let u2 = &self.u2;
            let v2 = &self.v2;
            let dep = d.clone();
            // Junction-1 passage parameters.
            let f = u1 * &rat(5, 7); // u-window foot on C1top
            let a = u1 + &(v1 * &rat(4, 7)); // v-window position
            let b = v1 + &(u1 * &rat(2, 7)); // w-window position (lower half)
            // Junction-2 passage parameters.
            let f2 = u2 * &rat(5, 7);
            let a2 = u2 + &(v2 * &rat(4, 7));
            let b2 = v2 + &(u2 * &rat(2, 7));

            let mut steps = Vec::new();
            // Start on C2top at the u-image of f, heading into C1.
            steps.push(self.wp(1, &(&l[1] - &f), &self.h[1]));
            steps.push(PolyStep::Jump);
            steps.push(self.wp(0, &f, &self.h[0]));
            let hi1 = &self.h[0] - &dep;
            self.emit_run(&mut steps, 0, &f, &self.h[0], &f, &hi1);
            self.emit_run(&mut steps, 0, &f, &hi1, &a, &hi1);
            self.emit_run(&mut steps, 0, &a, &hi1, &a, &self.h[0]);
            steps.push(PolyStep::Jump);
            let av = &a - u1;
            steps.push(self.wp(0, &av, &Rat::zero()));
            self.emit_run(&mut steps, 0, &av, &Rat::zero(), &av, &dep);
            self.emit_run(&mut steps, 0, &av, &dep, &b, &dep);
            self.emit_run(&mut steps, 0, &b, &dep, &b, &Rat::zero());
            steps.push(PolyStep::Jump);
            // w-jump: C1bot(b) ~ C2top(b - v1). Descend through C2 (first
            // core crossing) to a u'-image position on C2bot.
            let top2 = &b - v1;
            steps.push(self.wp(1, &top2, &self.h[1]));
            let zeta = &f2 + u2; // C2bot coordinate in the u'-image zone
            self.emit_run(&mut steps, 1, &top2, &self.h[1], &zeta, &Rat::zero());
            steps.push(PolyStep::Jump);
            // u'-jump: C2bot(s + u2) ~ C3top(s). Go around junction 2.
            steps.push(self.wp(2, &f2, &self.h[2]));
            let hi3 = &self.h[2] - &dep;
            self.emit_run(&mut steps, 2, &f2, &self.h[2], &f2, &hi3);
            self.emit_run(&mut steps, 2, &f2, &hi3, &a2, &hi3);
            self.emit_run(&mut steps, 2, &a2, &hi3, &a2, &self.h[2]);
            steps.push(PolyStep::Jump);
            let av2 = &a2 - u2;
            steps.push(self.wp(2, &av2, &Rat::zero()));
            self.emit_run(&mut steps, 2, &av2, &Rat::zero(), &av2, &dep);
            self.emit_run(&mut steps, 2, &av2, &dep, &b2, &dep);
            self.emit_run(&mut steps, 2, &b2, &dep, &b2, &Rat::zero());
            steps.push(PolyStep::Jump);
            // w'-jump: C3bot(y) ~ C2bot(u2 - (y - v2)). Ascend through C2
            // (second core crossing) back to the start.
            let bot2 = u2 - &(&b2 - v2);
            steps.push(self.wp(1, &bot2, &Rat::zero()));
            self.emit_run(&mut steps, 1, &bot2, &Rat::zero(), &(&l[1] - &f), &self.h[1]);
            duals.push(trace_polyline_closed(&self.tri, &steps).expect("beta2"));
        }
        {
            // beta_3: once through C3 via the v'-window (x -> x - u2).
            let xb = &self.u2 + &(&self.v2 * &rat(2, 3));
            let xa = &self.u2 + &(&self.v2 * &rat(1, 2));
            let mut steps = Vec::new();
            steps.push(self.wp(2, &xa, d));
            self.emit_run(&mut steps, 2, &xa, d, &xb, &self.h[2]);
            steps.push(PolyStep::Jump);
            let xr = &xb - &self.u2;
            steps.push(self.wp(2, &xr, &Rat::zero()));
            self.emit_run(&mut steps, 2, &xr, &Rat::zero(), &xa, d);
            duals.push(trace_polyline_closed(&self.tri, &steps).expect("beta3"));
        }
        duals
    }

    /// Polygons belonging to cylinder j.
    pub fn cylinder_polys(&self, j: usize) -> Vec<usize> {
        self.st
            .poly_cyl
            .iter()
            .enumerate()
            .filter(|(_, (c, _))| *c == j)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn area(&self) -> Rat {
        self.st.area()
    }
}

fn jcyl(c: usize) -> usize {
    c
}

/// Port: a chord endpoint on a circle, linked to a junction connector.
#[derive(Clone, Debug)]
struct Port {
    pos: Rat,
    conn: usize,
}

#[derive(Clone, Debug)]
enum Connector {
    /// Direct gluing pass between the two ports.
    Pass,
    /// A route around one junction through its three windows: enter from
    /// the middle cylinder, hop along the handle cylinder's top collar from
    /// the u-window foot `f` to the v-window position `a`, pass to the
    /// bottom circle, hop (wrapping leftward) to the w-window position `b`,
    /// and return to the middle cylinder. `junction` is 0 for the C1 side
    /// and 1 for the C3 side.
    CcRoute {
        junction: usize,
        f: Rat,
        a: Rat,
        b: Rat,
        top_depth: Rat,
        bot_height: Rat,
    },
}

fn spread(a: &Rat, b: &Rat, k: usize) -> Vec<Rat> {
    let len = b - a;
    (0..k)
        .map(|i| a + &(&len * &Rat::new((2 * i as i64 + 1).into(), (2 * k as i64).into())))
        .collect()
}

struct Layout {
    ac: Vec<Rat>,
    /// Per CC arc: (f, a, b, top_depth, bot_height). Nesting: f and b
    /// increase with the index, a and top_depth decrease, bot_height
    /// increases; the lower hop runs rightward from a-u to b without
    /// wrapping.
    cc: Vec<(Rat, Rat, Rat, Rat, Rat)>,
    ab: Vec<Rat>,
    bc: Vec<Rat>,
}

fn layout_junction(u: &Rat, v: &Rat, m: usize, cc: usize, ab: usize, delta: &Rat) -> Layout {
    let two = Rat::from_integer(2.into());
    let half_u = u / &two;
    let ac = spread(&Rat::zero(), &half_u, m);
    let mut cc_list = Vec::new();
    for i in 0..cc {
        let t = Rat::new((2 * i as i64 + 1).into(), (2 * cc as i64).into());
        let f = &half_u + &(&half_u * &t);
        let a = u + &(v * &Rat::new((2 * (cc - i) as i64 - 1).into(), (2 * cc as i64).into()));
        let b = v + &(&half_u * &t);
        let top_depth = delta * &Rat::new(((cc - i) as i64).into(), (cc as i64 + 1).into());
        let bot_height = delta * &Rat::new((i as i64 + 1).into(), (cc as i64 + 1).into());
        cc_list.push((f, a, b, top_depth, bot_height));
    }
    Layout {
        ac,
        cc: cc_list,
        // BC passes sit in the upper half of the w-window, clear of the
        // CC lower hops.
        ab: spread(u, &(u + v), ab),
        bc: spread(&(v + &half_u), &(v + u), m),
    }
}

impl DtRealizer for ChainSurface {
    fn pants(&self) -> PantsStructure {
        PantsStructure::genus2_chain()
    }

    fn tri(&self) -> &Triangulation {
        &self.tri
    }

    fn alpha_words(&self) -> &[CurveClass] {
        &self.alpha
    }

    fn alpha_lengths(&self) -> Vec<Rat> {
        self.l.to_vec()
    }

    fn crossing_weights(&self) -> Vec<Rat> {
        self.h.to_vec()
    }

    fn area(&self) -> Rat {
        self.st.area()
    }

    fn pl_bounds(&self, dt: &DtVector) -> (f64, f64) {
        // Cheap closed form mirroring realize_dt's PL construction: chord
        // shears from the sorted window positions plus connector overhead.
        let n = [
            dt.pairs[0].0 as usize,
            dt.pairs[1].0 as usize,
            dt.pairs[2].0 as usize,
        ];
        let m1 = (n[1] / 2).min(n[0]);
        let cc1 = n[1] / 2 - m1;
        let ab1 = n[0] - m1;
        let m2 = (n[1] / 2).min(n[2]);
        let cc2 = n[1] / 2 - m2;
        let ab2 = n[2] - m2;
        let j1 = layout_junction(&self.u1, &self.v1, m1, cc1, ab1, &self.delta);
        let j2 = layout_junction(&self.u2, &self.v2, m2, cc2, ab2, &self.delta);
        let mut circles: Vec<Vec<Rat>> = vec![Vec::new(); 6];
        for q in &j1.ac {
            circles[1].push(q.clone());
            circles[3].push(&self.l[1] - q);
        }
        for (f, _a, b, _dt, _bh) in &j1.cc {
            circles[3].push(&self.l[1] - f);
            circles[3].push(b - &self.v1);
        }
        for p in &j1.ab {
            circles[1].push(p.clone());
            circles[0].push(p - &self.u1);
        }
        for r in &j1.bc {
            circles[0].push(r.clone());
            circles[3].push(r - &self.v1);
        }
        for q in &j2.ac {
            circles[5].push(q.clone());
            circles[2].push(q + &self.u2);
        }
        for (f, _a, b, _dt, _bh) in &j2.cc {
            circles[2].push(f + &self.u2);
            circles[2].push(&self.u2 - &(b - &self.v2));
        }
        for p in &j2.ab {
            circles[5].push(p.clone());
            circles[4].push(p - &self.u2);
        }
        for r in &j2.bc {
            circles[4].push(r.clone());
            circles[2].push(&self.u2 - &(r - &self.v2));
        }
        let mut pl = 0.0f64;
        let two = Rat::from_integer(2.into());
        for j in 0..3 {
            let mut bots = circles[2 * j].clone();
            let mut tops = circles[2 * j + 1].clone();
            bots.sort();
            tops.sort();
            let nj = n[j];
            debug_assert_eq!(bots.len(), nj);
            debug_assert_eq!(tops.len(), nj);
            if nj == 0 {
                continue;
            }
            let (q, r) = DtVector::twist_split(dt.pairs[j].1, nj as u32);
            let mid = &self.h[j] - &(&self.delta * &two);
            for (i, b) in bots.iter().enumerate() {
                let k = (i + r as usize) % nj;
                let carry = if i + (r as usize) >= nj { 1i64 } else { 0 };
                let wraps = q + carry;
                let shear =
                    &(&tops[k] + &(&self.l[j] * &Rat::from_integer(wraps.into()))) - b;
                let sq = &mid * &mid + &shear * &shear;
                pl += 2.0 * rat_to_f64(&self.delta) + rat_to_f64(&sq).sqrt();
            }
        }
        for (jn, u) in [(&j1, &self.u1), (&j2, &self.u2)] {
            for (f, a, b, dt_, bh) in &jn.cc {
                let upper = a - f;
                let lower = b - &(a - u);
                pl += rat_to_f64(&upper)
                    + rat_to_f64(&lower)
                    + 2.0 * rat_to_f64(dt_)
                    + 2.0 * rat_to_f64(bh);
            }
        }
        let mut lb = 0.0f64;
        for j in 0..3 {
            let (nj, tj) = dt.pairs[j];
            let cross = nj as f64 * rat_to_f64(&self.h[j]);
            let twist =
                ((tj.unsigned_abs() as f64) - 2.0 * nj as f64).max(0.0) * rat_to_f64(&self.l[j]);
            lb += (cross * cross + twist * twist).sqrt();
            if nj == 0 && tj > 0 {
                pl += tj as f64 * rat_to_f64(&self.l[j]);
            }
        }
        (lb, pl)
    }

    fn realize_dt(&self, dt: &DtVector) -> Realized {
        let n = [
            dt.pairs[0].0 as usize,
            dt.pairs[1].0 as usize,
            dt.pairs[2].0 as usize,
        ];
        let m1 = (n[1] / 2).min(n[0]);
        let cc1 = n[1] / 2 - m1;
        let ab1 = n[0] - m1;
        let m2 = (n[1] / 2).min(n[2]);
        let cc2 = n[1] / 2 - m2;
        let ab2 = n[2] - m2;
        let j1 = layout_junction(&self.u1, &self.v1, m1, cc1, ab1, &self.delta);
        let j2 = layout_junction(&self.u2, &self.v2, m2, cc2, ab2, &self.delta);

        let mut connectors: Vec<Connector> = Vec::new();
        // Circles: 0 C1bot, 1 C1top, 2 C2bot, 3 C2top, 4 C3bot, 5 C3top.
        let mut ports: Vec<Vec<Port>> = vec![Vec::new(); 6];
        {
            let mut link =
                |c1: usize, p1: Rat, c2: usize, p2: Rat, conn: Connector, cs: &mut Vec<Connector>| {
                    let id = cs.len();
                    ports[c1].push(Port {
                        pos: p1,
                        conn: id,
                    });
                    ports[c2].push(Port {
                        pos: p2,
                        conn: id,
                    });
                    cs.push(conn);
                };
            for q in &j1.ac {
                link(1, q.clone(), 3, &self.l[1] - q, Connector::Pass, &mut connectors);
            }
            for (f, a, b, dt_, bh) in &j1.cc {
                // Ports on C2top: the u-image of f and the w-image of b.
                link(
                    3,
                    &self.l[1] - f,
                    3,
                    b - &self.v1,
                    Connector::CcRoute {
                        junction: 0,
                        f: f.clone(),
                        a: a.clone(),
                        b: b.clone(),
                        top_depth: dt_.clone(),
                        bot_height: bh.clone(),
                    },
                    &mut connectors,
                );
            }
            for p in &j1.ab {
                link(1, p.clone(), 0, p - &self.u1, Connector::Pass, &mut connectors);
            }
            for r in &j1.bc {
                link(0, r.clone(), 3, r - &self.v1, Connector::Pass, &mut connectors);
            }
            for q in &j2.ac {
                link(5, q.clone(), 2, q + &self.u2, Connector::Pass, &mut connectors);
            }
            for (f, a, b, dt_, bh) in &j2.cc {
                // Ports on C2bot: the u'-image of f and the w'-image of b.
                link(
                    2,
                    f + &self.u2,
                    2,
                    &self.u2 - &(b - &self.v2),
                    Connector::CcRoute {
                        junction: 1,
                        f: f.clone(),
                        a: a.clone(),
                        b: b.clone(),
                        top_depth: dt_.clone(),
                        bot_height: bh.clone(),
                    },
                    &mut connectors,
                );
            }
            for p in &j2.ab {
                link(5, p.clone(), 4, p - &self.u2, Connector::Pass, &mut connectors);
            }
            for r in &j2.bc {
                link(
                    4,
                    r.clone(),
                    2,
                    &self.u2 - &(r - &self.v2),
                    Connector::Pass,
                    &mut connectors,
                );
            }
        }

        assemble_strands(self, dt, &n, ports, connectors)
    }
}

/// Chord through a cylinder.
#[derive(Clone, Debug)]
struct Chord {
    cyl: usize,
    x_bot: Rat,
    /// Unwrapped top coordinate (shear = x_top_unwrapped - x_bot).
    x_top_unwrapped: Rat,
    bot_conn: usize,
    top_conn: usize,
}

fn assemble_strands(
    cs: &ChainSurface,
    dt: &DtVector,
    n: &[usize; 3],
    ports: Vec<Vec<Port>>,
    connectors: Vec<Connector>,
) -> Realized {
    // Chords per cylinder from sorted ports plus the twist shift.
    let mut chords: Vec<Chord> = Vec::new();
    // connector end bookkeeping: for each connector, the chord ends attached.
    let mut conn_ends: Vec<Vec<usize>> = vec![Vec::new(); connectors.len()];
    for j in 0..3 {
        let mut bots = ports[2 * j].clone();
        let mut tops = ports[2 * j + 1].clone();
        bots.sort_by(|a, b| a.pos.cmp(&b.pos));
        tops.sort_by(|a, b| a.pos.cmp(&b.pos));
        assert_eq!(bots.len(), n[j]);
        assert_eq!(tops.len(), n[j]);
        if n[j] == 0 {
            continue;
        }
        let (q, r) = DtVector::twist_split(dt.pairs[j].1, n[j] as u32);
        for (i, b) in bots.iter().enumerate() {
            let k = (i + r as usize) % n[j];
            let carry = if i + (r as usize) >= n[j] { 1i64 } else { 0 };
            let wraps = q + carry;
            let top = &tops[k];
            let x_top_unwrapped =
                &top.pos + &(&cs.l[j] * &Rat::from_integer(wraps.into()));
            let chord_id = chords.len();
            chords.push(Chord {
                cyl: j,
                x_bot: b.pos.clone(),
                x_top_unwrapped,
                bot_conn: b.conn,
                top_conn: top.conn,
            });
            conn_ends[b.conn].push(2 * chord_id);
            conn_ends[top.conn].push(2 * chord_id + 1);
        }
    }
    for ends in &conn_ends {
        assert_eq!(ends.len(), 2, "every connector joins exactly two chord ends");
    }

    // PL length and the rigorous lower bound.
    let mut pl = 0.0f64;
    let two = Rat::from_integer(2.into());
    for ch in &chords {
        let h = &cs.h[ch.cyl];
        let shear = &ch.x_top_unwrapped - &ch.x_bot;
        let mid = h - &(&cs.delta * &two);
        let sq = &mid * &mid + &shear * &shear;
        pl += 2.0 * rat_to_f64(&cs.delta) + rat_to_f64(&sq).sqrt();
    }
    for c in &connectors {
        if let Connector::CcRoute {
            junction,
            f,
            a,
            b,
            top_depth,
            bot_height,
        } = c
        {
            let u = if *junction == 0 { &cs.u1 } else { &cs.u2 };
            // Two hops plus four collar legs.
            let upper = a - f;
            let lower = b - &(a - u);
            pl += rat_to_f64(&upper)
                + rat_to_f64(&lower)
                + 2.0 * rat_to_f64(top_depth)
                + 2.0 * rat_to_f64(bot_height);
        }
    }
    let mut lb = 0.0f64;
    for j in 0..3 {
        let (nj, tj) = dt.pairs[j];
        let cross_cost = nj as f64 * rat_to_f64(&cs.h[j]);
        let twist_cost =
            ((tj.unsigned_abs() as f64) - 2.0 * nj as f64).max(0.0) * rat_to_f64(&cs.l[j]);
        lb += cross_cost.max(twist_cost);
        if nj == 0 && tj > 0 {
            pl += tj as f64 * rat_to_f64(&cs.l[j]);
        }
    }

    // Walk closed strands.
    let mut visited = vec![false; chords.len()];
    let mut strands: Vec<Vec<PolyStep>> = Vec::new();
    for start in 0..chords.len() {
        if visited[start] {
            continue;
        }
        let mut steps: Vec<PolyStep> = Vec::new();
        let mut cur = start;
        let mut upward = true;
        let first_point = {
            let ch = &chords[start];
            cs.wp(ch.cyl, &ch.x_bot, &Rat::zero())
        };
        steps.push(first_point.clone());
        loop {
            visited[cur] = true;
            let ch = &chords[cur];
            let h = &cs.h[ch.cyl];
            let d = &cs.delta;
            // Emit the chord (start point already present).
            if upward {
                cs.emit_run(&mut steps, ch.cyl, &ch.x_bot, &Rat::zero(), &ch.x_bot, d);
                cs.emit_run(
                    &mut steps,
                    ch.cyl,
                    &ch.x_bot,
                    d,
                    &ch.x_top_unwrapped,
                    &(h - d),
                );
                let xt = ch.x_top_unwrapped.clone();
                cs.emit_run(&mut steps, ch.cyl, &xt, &(h - d), &xt, h);
            } else {
                let xt = ch.x_top_unwrapped.clone();
                cs.emit_run(&mut steps, ch.cyl, &xt, h, &xt, &(h - d));
                cs.emit_run(&mut steps, ch.cyl, &xt, &(h - d), &ch.x_bot, d);
                cs.emit_run(&mut steps, ch.cyl, &ch.x_bot, d, &ch.x_bot, &Rat::zero());
            }
            // Cross the connector at the arrival end.
            let conn_id = if upward { ch.top_conn } else { ch.bot_conn };
            let my_end = 2 * cur + if upward { 1 } else { 0 };
            let other_end = *conn_ends[conn_id]
                .iter()
                .find(|&&e| e != my_end)
                .expect("connector partner");
            let next_chord = other_end / 2;
            let enter_at_top = other_end % 2 == 1;
            match &connectors[conn_id] {
                Connector::Pass => {
                    steps.push(PolyStep::Jump);
                    let nch = &chords[next_chord];
                    let p = if enter_at_top {
                        cs.wp(nch.cyl, &nch.x_top_unwrapped, &cs.h[nch.cyl])
                    } else {
                        cs.wp(nch.cyl, &nch.x_bot, &Rat::zero())
                    };
                    steps.push(p);
                }
                Connector::CcRoute {
                    junction,
                    f,
                    a,
                    b,
                    top_depth,
                    bot_height,
                } => {
                    let ch_here = &chords[cur];
                    let my_pos = {
                        let lj = &cs.l[ch_here.cyl];
                        let mut xm = if upward {
                            ch_here.x_top_unwrapped.clone()
                        } else {
                            ch_here.x_bot.clone()
                        };
                        while xm.is_negative() {
                            xm += lj;
                        }
                        while xm >= *lj {
                            xm -= lj;
                        }
                        xm
                    };
                    let (hcyl, u) = if *junction == 0 {
                        (0usize, &cs.u1)
                    } else {
                        (2usize, &cs.u2)
                    };
                    let f_port = if *junction == 0 {
                        &cs.l[1] - f
                    } else {
                        f + &cs.u2
                    };
                    let forward = my_pos == f_port;
                    let hj = &cs.h[hcyl];
                    let hi = hj - top_depth;
                    let av = a - u;
                    steps.push(PolyStep::Jump);
                    if forward {
                        steps.push(cs.wp(hcyl, f, hj));
                        cs.emit_run(&mut steps, hcyl, f, hj, f, &hi);
                        cs.emit_run(&mut steps, hcyl, f, &hi, a, &hi);
                        cs.emit_run(&mut steps, hcyl, a, &hi, a, hj);
                        steps.push(PolyStep::Jump);
                        steps.push(cs.wp(hcyl, &av, &Rat::zero()));
                        cs.emit_run(&mut steps, hcyl, &av, &Rat::zero(), &av, bot_height);
                        cs.emit_run(&mut steps, hcyl, &av, bot_height, b, bot_height);
                        cs.emit_run(&mut steps, hcyl, b, bot_height, b, &Rat::zero());
                    } else {
                        steps.push(cs.wp(hcyl, b, &Rat::zero()));
                        cs.emit_run(&mut steps, hcyl, b, &Rat::zero(), b, bot_height);
                        cs.emit_run(&mut steps, hcyl, b, bot_height, &av, bot_height);
                        cs.emit_run(&mut steps, hcyl, &av, bot_height, &av, &Rat::zero());
                        steps.push(PolyStep::Jump);
                        steps.push(cs.wp(hcyl, a, hj));
                        cs.emit_run(&mut steps, hcyl, a, hj, a, &hi);
                        cs.emit_run(&mut steps, hcyl, a, &hi, f, &hi);
                        cs.emit_run(&mut steps, hcyl, f, &hi, f, hj);
                    }
                    steps.push(PolyStep::Jump);
                    let nch = &chords[next_chord];
                    let p = if enter_at_top {
                        cs.wp(nch.cyl, &nch.x_top_unwrapped, &cs.h[nch.cyl])
                    } else {
                        cs.wp(nch.cyl, &nch.x_bot, &Rat::zero())
                    };
                    steps.push(p);
                }
            }
            cur = next_chord;
            upward = !enter_at_top;
            if cur == start && upward {
                // Close the loop: the walk is back at the starting bottom.
                break;
            }
            debug_assert!(
                !(visited[cur] && !(cur == start && upward)) || !visited[cur],
                "strand revisits a chord without closing"
            );
        }
        // The final emitted point is the start chord's bottom again.
        if steps.last() != Some(&first_point) {
            steps.push(first_point);
        }
        strands.push(steps);
    }

    let mut parallel = Vec::new();
    for j in 0..3 {
        let (nj, tj) = dt.pairs[j];
        if nj == 0 && tj > 0 {
            parallel.push((j, tj as u64));
        }
    }

    Realized {
        strands,
        parallel,
        pl_length: pl,
        lower_bound: lb,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::cylinder::detect_cylinder;
    use crate::geodesic::intersect::geometric_intersection;
    use crate::geodesic::tighten::Tightener;

    fn reference() -> ChainSurface {
        // l = (1, 1, 1), h = (1, 1, 1): unit squares everywhere.
        ChainSurface::new(
            [rat(1, 1), rat(1, 1), rat(1, 1)],
            [rat(1, 1), rat(1, 1), rat(1, 1)],
        )
        .unwrap()
    }

    #[test]
    fn chain_surface_valid() {
        let c = reference();
        assert_eq!(c.st.surface.genus, 2);
        assert_eq!(c.area(), rat(3, 1));
        // Four cone points of angle 3pi.
        assert_eq!(c.st.surface.vertex_classes.len(), 4);
        assert!(c
            .st
            .surface
            .vertex_classes
            .iter()
            .all(|v| v.angle_pi == 3));
    }

    #[test]
    fn cores_recover_spec_dimensions() {
        let c = reference();
        let tn = Tightener::new(&c.tri);
        for j in 0..3 {
            let rep = tn.tighten(&c.alpha[j]).unwrap();
            assert!(rep.is_cylinder_core, "alpha_{j} must be a core");
            let cyl = detect_cylinder(&c.tri, &rep).unwrap();
            assert_eq!(cyl.circumference_sq, &c.l[j] * &c.l[j]);
            assert_eq!(cyl.mass, &c.l[j] * &c.h[j]);
        }
    }

    #[test]
    fn alphas_disjoint_and_duals_cross_as_declared() {
        let c = reference();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 0 } else { 0 };
                assert_eq!(
                    geometric_intersection(&c.tri, &c.alpha[i], &c.alpha[j]).unwrap(),
                    expect
                );
            }
        }
        for j in 0..3 {
            for k in 0..3 {
                let expect = if j == k { c.beta_crossings[j] } else { 0 };
                assert_eq!(
                    geometric_intersection(&c.tri, &c.beta[j], &c.alpha[k]).unwrap(),
                    expect,
                    "i(beta_{j}, alpha_{k})"
                );
            }
        }
    }

    #[test]
    fn realize_simple_vectors() {
        use crate::lamination::realize::{flat_length_dt, realize};
        let c = reference();
        // Pure pants curves.
        let mc = realize(&c, &DtVector::new(vec![(0, 2), (0, 0), (0, 0)])).unwrap();
        assert_eq!(mc.components.len(), 1);
        assert_eq!(mc.components[0].1, 2);
        // A (2,0,0) curve crossing alpha_1 twice.
        let len = flat_length_dt(&c, &DtVector::new(vec![(2, 0), (0, 0), (0, 0)])).unwrap();
        assert!(len >= 2.0 - 1e-9, "two crossings cost at least 2 h_1: {len}");
        // Crossing the separating curve needs even n_2.
        let len2 = flat_length_dt(&c, &DtVector::new(vec![(0, 0), (2, 0), (0, 0)])).unwrap();
        assert!(len2 >= 2.0 - 1e-9);
    }
}
