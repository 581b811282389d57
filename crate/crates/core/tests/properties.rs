//! Property tests for the geometry, the coreset guarantees and the derived
//! queries. Reference values come from plain scans written here.

use hypercoreset::coreset::{ConePartition, REGIME_THRESHOLD};
use hypercoreset::sampling::{self, Generator};
use hypercoreset::validation::ISOMETRY_RADIUS;
use hypercoreset::{
    angle_at_origin, bichromatic_farthest_approx, build_coreset, center_approx, diameter_approx, diameter_exact,
    dist_h, farthest_approx, farthest_exact, geodesic_point, gromov_product, midpoint, mst_max_approx, mst_max_exact,
    BallPoint, Coreset, PointSet, Regime, Translation,
};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

/// Arcosh form on raw coordinates, independent of the crate.
fn arcosh_dist(u: &[f64], v: &[f64]) -> f64 {
    let sq = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>();
    let diff: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
    (1.0 + 2.0 * diff / ((1.0 - sq(u)) * (1.0 - sq(v)))).acosh()
}

fn farthest_scan(points: &PointSet, q: &BallPoint) -> f64 {
    points.iter().map(|p| dist_h(q, p)).fold(0.0, f64::max)
}

fn kruskal_max_weight(points: &PointSet) -> f64 {
    let n = points.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((dist_h(points.get(i), points.get(j)), i, j));
        }
    }
    edges.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut total = 0.0;
    for (w, i, j) in edges {
        let (a, b) = (root(&mut parent, i), root(&mut parent, j));
        if a != b {
            parent[a] = b;
            total += w;
        }
    }
    total
}

fn band_margin(value: f64, exact: f64, eps: f64) -> f64 {
    (value - (exact - eps).max((1.0 - eps) * exact)).min(exact - value)
}

fn point(dim: usize, r_max: f64) -> impl Strategy<Value = BallPoint> {
    (prop::collection::vec(-1.0f64..1.0, dim), 0.0..r_max).prop_map(|(dir, r)| {
        if dir.iter().all(|&x| x == 0.0) {
            BallPoint::origin(dir.len())
        } else {
            BallPoint::from_polar(&dir, r).expect("radius in range")
        }
    })
}

fn triple(r_max: f64) -> impl Strategy<Value = (BallPoint, BallPoint, BallPoint)> {
    (2usize..=4).prop_flat_map(move |d| (point(d, r_max), point(d, r_max), point(d, r_max)))
}

fn generator() -> impl Strategy<Value = Generator> {
    prop::sample::select(Generator::ALL.to_vec())
}

#[derive(Debug, Clone)]
struct Instance {
    points: PointSet,
    eps: f64,
    seed: u64,
}

fn instance(min_n: usize, max_n: usize) -> impl Strategy<Value = Instance> {
    (
        generator(),
        min_n..max_n,
        2usize..=3,
        0.5f64..20.0,
        any::<u64>(),
        0.05f64..0.95,
    )
        .prop_map(|(g, n, dim, radius, seed, eps)| Instance {
            points: sampling::generate(g, n, dim, radius, seed).expect("generator"),
            eps,
            seed,
        })
}

fn queries(inst: &Instance, count: usize) -> Vec<BallPoint> {
    let mut rng = sampling::seeded_rng(inst.seed ^ 0x9e37_79b9);
    let mut qs: Vec<BallPoint> = (0..count)
        .map(|_| sampling::random_point(&mut rng, inst.points.dim(), 25.0))
        .collect();
    qs.extend(inst.points.iter().take(count).cloned());
    qs
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn distance_is_a_metric((u, v, w) in triple(20.0)) {
        prop_assert_eq!(dist_h(&u, &v).to_bits(), dist_h(&v, &u).to_bits());
        prop_assert_eq!(dist_h(&u, &u), 0.0);
        prop_assert!(dist_h(&u, &v) >= 0.0);
        let (a, b, c) = (dist_h(&u, &v), dist_h(&v, &w), dist_h(&u, &w));
        prop_assert!(c <= a + b + TOL * (1.0 + a + b));
    }

    #[test]
    fn distance_matches_arcosh((u, v, _) in triple(10.0)) {
        let d = dist_h(&u, &v);
        let r = arcosh_dist(u.coords(), v.coords());
        // arcosh loses digits near zero, so compare on a relative scale
        prop_assert!((d - r).abs() <= 1e-7 * d.max(1e-3), "{} vs {}", d, r);
    }

    #[test]
    fn translations_are_isometries((h, u, v) in triple(ISOMETRY_RADIUS / 2.0)) {
        let t = Translation::forward(h.clone());
        let (tu, tv) = (t.apply(&u).unwrap(), t.apply(&v).unwrap());
        prop_assert!((dist_h(&tu, &tv) - dist_h(&u, &v)).abs() <= 1e-10 * dist_h(&u, &v).max(1.0));
        prop_assert!(dist_h(&t.apply(&BallPoint::origin(h.dim())).unwrap(), &h) <= 1e-10);
        let back = t.reversed().apply(&tu).unwrap();
        prop_assert!(dist_h(&back, &u) <= 1e-9);
    }

    #[test]
    fn geodesic_points_split_the_length((a, b, _) in triple(15.0), s in 0.0f64..1.0) {
        let d = dist_h(&a, &b);
        let m = geodesic_point(&a, &b, s * d).unwrap();
        prop_assert!((dist_h(&a, &m) + dist_h(&m, &b) - d).abs() <= TOL * d.max(1.0));
        prop_assert!((dist_h(&a, &m) - s * d).abs() <= TOL * d.max(1.0));
        let mid = midpoint(&a, &b).unwrap();
        prop_assert!((dist_h(&a, &mid) - dist_h(&mid, &b)).abs() <= TOL * d.max(1.0));
    }

    #[test]
    fn gromov_product_is_nonnegative_and_symmetric((u, v, t) in triple(20.0)) {
        let g = gromov_product(&u, &v, &t);
        prop_assert!(g >= -TOL * (1.0 + dist_h(&u, &t) + dist_h(&v, &t)));
        prop_assert_eq!(g.to_bits(), gromov_product(&v, &u, &t).to_bits());
    }

    #[test]
    fn cones_have_small_angular_diameter(
        dim in 2usize..=4,
        diam in 0.01f64..1.5,
        u in prop::collection::vec(-1.0f64..1.0, 4),
        v in prop::collection::vec(-1.0f64..1.0, 4),
        scale in 1e-6f64..1e3,
    ) {
        let cones = ConePartition::new(dim, diam).unwrap();
        let (u, v) = (&u[..dim], &v[..dim]);
        prop_assume!(u.iter().any(|&x| x != 0.0) && v.iter().any(|&x| x != 0.0));
        let cu = cones.cone_of(u).unwrap();
        let scaled: Vec<f64> = u.iter().map(|x| x * scale).collect();
        prop_assert_eq!(&cones.cone_of(&scaled).unwrap(), &cu);
        if cu == cones.cone_of(v).unwrap() {
            let bp = |x: &[f64]| {
                let n = x.iter().map(|a| a * a).sum::<f64>().sqrt();
                BallPoint::new(x.iter().map(|a| 0.5 * a / n).collect()).unwrap()
            };
            prop_assert!(angle_at_origin(&bp(u), &bp(v)).unwrap() <= diam + 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(160))]

    #[test]
    fn coreset_meets_both_bounds(inst in instance(1, 400)) {
        let c = build_coreset(&inst.points, inst.eps).unwrap();
        for q in queries(&inst, 40) {
            let exact = farthest_scan(&inst.points, &q);
            let approx = farthest_approx(&c, &q).unwrap().distance;
            prop_assert!(band_margin(approx, exact, inst.eps) >= -TOL, "{} vs {}", approx, exact);
        }
    }

    #[test]
    fn coreset_is_a_sorted_subset(inst in instance(1, 400)) {
        let c = build_coreset(&inst.points, inst.eps).unwrap();
        let idx = c.indices();
        prop_assert!(!idx.is_empty() && idx.len() <= inst.points.len());
        prop_assert!(idx.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(idx.iter().all(|&i| i < inst.points.len()));
        let again = build_coreset(&inst.points, inst.eps).unwrap();
        prop_assert_eq!(again.indices(), idx);
        let back = Coreset::from_record(&inst.points, &c.record()).unwrap();
        prop_assert_eq!(back.indices(), idx);
    }

    #[test]
    fn regime_follows_first_eccentricity(inst in instance(1, 300)) {
        let c = build_coreset(&inst.points, inst.eps).unwrap();
        let delta1 = farthest_scan(&inst.points, inst.points.get(0));
        prop_assert_eq!(c.delta1(), delta1);
        let expected = if delta1 <= REGIME_THRESHOLD { Regime::SmallDiameter } else { Regime::LargeDiameter };
        prop_assert_eq!(c.regime(), expected);
        // every query is at least half the first eccentricity from its farthest point
        for q in queries(&inst, 10) {
            prop_assert!(farthest_scan(&inst.points, &q) >= delta1 / 2.0 - TOL * delta1.max(1.0));
        }
    }

    #[test]
    fn farthest_answers_are_members(inst in instance(1, 300)) {
        let c = build_coreset(&inst.points, inst.eps).unwrap();
        for q in queries(&inst, 10) {
            let e = farthest_exact(&inst.points, &q).unwrap();
            prop_assert_eq!(e.distance, farthest_scan(&inst.points, &q));
            prop_assert_eq!(e.distance, dist_h(&q, inst.points.get(e.index)));
            let a = farthest_approx(&c, &q).unwrap();
            prop_assert!(c.indices().binary_search(&a.index).is_ok());
            prop_assert!(a.distance <= e.distance);
        }
    }

    #[test]
    fn diameter_and_center_stay_in_band(inst in instance(2, 250)) {
        let exact = diameter_exact(&inst.points).unwrap().distance;
        let d = diameter_approx(&inst.points, inst.eps).unwrap();
        prop_assert!(band_margin(d.distance, exact, inst.eps) >= -TOL);
        prop_assert_eq!(d.distance, dist_h(inst.points.get(d.i), inst.points.get(d.j)));
        let radius = (0..inst.points.len())
            .map(|i| farthest_scan(&inst.points, inst.points.get(i)))
            .fold(f64::INFINITY, f64::min);
        let c = center_approx(&inst.points, inst.eps).unwrap();
        prop_assert!(band_margin(c.radius, radius, inst.eps) >= -TOL, "{} vs {}", c.radius, radius);
    }

    #[test]
    fn bichromatic_with_itself_is_the_diameter(inst in instance(2, 200)) {
        let exact = diameter_exact(&inst.points).unwrap().distance;
        let b = bichromatic_farthest_approx(&inst.points, &inst.points, inst.eps).unwrap();
        prop_assert!(band_margin(b.distance, exact, inst.eps) >= -TOL);
    }

    #[test]
    fn mst_oracles_agree_and_approx_is_in_band(inst in instance(2, 150)) {
        let exact = mst_max_exact(&inst.points).unwrap();
        let k = kruskal_max_weight(&inst.points);
        prop_assert!(exact.is_spanning_tree(inst.points.len()));
        prop_assert!((exact.total_weight - k).abs() <= TOL * k.max(1.0));
        let approx = mst_max_approx(&inst.points, inst.eps).unwrap();
        prop_assert!(approx.is_spanning_tree(inst.points.len()));
        prop_assert!(approx.total_weight <= k + TOL * k.max(1.0));
        prop_assert!(approx.total_weight >= (1.0 - inst.eps) * k - TOL * k.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn singletons_are_exact(u in point(3, 20.0), v in point(3, 20.0), eps in 0.05f64..0.95) {
        let red = PointSet::new(3, vec![u.clone()]).unwrap();
        let blue = PointSet::new(3, vec![v.clone()]).unwrap();
        let b = bichromatic_farthest_approx(&red, &blue, eps).unwrap();
        prop_assert_eq!((b.i, b.j), (0, 0));
        prop_assert_eq!(b.distance, dist_h(&u, &v));
        let c = build_coreset(&red, eps).unwrap();
        prop_assert_eq!(c.indices(), &[0]);
    }

    #[test]
    fn copies_keep_one_representative(u in point(2, 20.0), n in 1usize..50, eps in 0.05f64..0.95) {
        let ps = PointSet::new(2, vec![u; n]).unwrap();
        let c = build_coreset(&ps, eps).unwrap();
        prop_assert_eq!(c.indices(), &[0]);
    }

    #[test]
    fn antipodal_pairs_are_kept(dir in prop::collection::vec(-1.0f64..1.0, 3), r in 0.5f64..20.0, eps in 0.05f64..0.95) {
        prop_assume!(dir.iter().any(|&x| x != 0.0));
        let u = BallPoint::from_polar(&dir, r).unwrap();
        let ps = PointSet::new(3, vec![u.clone(), u.negated()]).unwrap();
        let c = build_coreset(&ps, eps).unwrap();
        prop_assert_eq!(c.indices(), &[0, 1]);
        prop_assert_eq!(farthest_approx(&c, &u).unwrap().index, 1);
    }

    #[test]
    fn center_of_a_circle(r in 0.5f64..15.0, phase in 0.0f64..std::f64::consts::TAU, eps in 0.05f64..0.95) {
        let pts: Vec<BallPoint> = (0..3)
            .map(|k| {
                let a = phase + k as f64 * std::f64::consts::TAU / 3.0;
                BallPoint::from_polar(&[a.cos(), a.sin()], r).unwrap()
            })
            .collect();
        let side = dist_h(&pts[0], &pts[1]);
        let ps = PointSet::new(2, pts).unwrap();
        let c = center_approx(&ps, eps).unwrap();
        // the optimal center among the inputs has radius equal to the side
        prop_assert!(band_margin(c.radius, side, eps) >= -1e-8 * side.max(1.0));
    }
}
