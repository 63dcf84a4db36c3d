use super::*;
use crate::geometry::PointCloud;
use approx::assert_relative_eq;

/// Hull area by gift wrapping and the shoelace formula.
fn shoelace_hull_area(pts: &[[f64; 2]]) -> f64 {
    let start = (0..pts.len())
        .min_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0]).then(pts[a][1].total_cmp(&pts[b][1])))
        .unwrap();
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let d2 = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
    let mut chain = vec![start];
    let mut cur = start;
    loop {
        let mut next = (cur + 1) % pts.len();
        for k in 0..pts.len() {
            let c = cross(pts[cur], pts[next], pts[k]);
            if c < 0.0 || (c == 0.0 && d2(pts[cur], pts[k]) > d2(pts[cur], pts[next])) {
                next = k;
            }
        }
        if next == start {
            break;
        }
        chain.push(next);
        cur = next;
    }
    let mut area = 0.0;
    for k in 0..chain.len() {
        let (a, b) = (pts[chain[k]], pts[chain[(k + 1) % chain.len()]]);
        area += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * area.abs()
}

fn without(pts: &[[f64; 2]], drop: &[usize]) -> Vec<[f64; 2]> {
    pts.iter().enumerate().filter(|(i, _)| !drop.contains(i)).map(|(_, p)| *p).collect()
}

fn config<'a>(body: &'a ConvexBody, pts: &[[f64; 2]]) -> PointConfiguration<'a> {
    PointConfiguration::new(PointCloud::from_rows(2, pts).unwrap(), body).unwrap()
}

#[test]
fn functional_basics() {
    for n in 2..=5 {
        let body = ConvexBody::ball(n, 2.0).unwrap();
        let mut c = PointCloud::new(n);
        c.push(&vec![0.0; n]);
        for k in 0..n {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            c.push(&e);
        }
        let cfg = PointConfiguration::new(c.clone(), &body).unwrap();
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        assert_relative_eq!(functional_f(&cfg, n, &[]).unwrap(), 1.0 / fact, max_relative = 1e-12);
        let mut inner = c.clone();
        inner.push(&vec![0.1; n]);
        let cfg2 = PointConfiguration::new(inner, &body).unwrap();
        assert_eq!(functional_f(&cfg2, n, &[]).unwrap(), functional_f(&cfg, n, &[]).unwrap());
    }
    let body = ConvexBody::unit_ball(3);
    let mut rng = SeedTree::new(41).stream("stein", 0, 0);
    let cfg = PointConfiguration::sample(&body, 60, &mut rng).unwrap();
    let subs = draw_subspaces(3, 1, 16, &mut rng).unwrap();
    let perm: Vec<usize> = (0..60).rev().collect();
    let shuffled = PointConfiguration::new(cfg.points().select(&perm), &body).unwrap();
    for j in 1..=3 {
        let s = if j == 1 { &subs[..] } else { &[] };
        let a = functional_f(&cfg, j, s).unwrap();
        let b = functional_f(&shuffled, j, s).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }
    assert!(functional_f(&cfg, 1, &[]).is_err());
}

#[test]
fn configuration_checks() {
    let body = ConvexBody::unit_ball(2);
    assert!(PointConfiguration::new(PointCloud::from_rows(2, &[[0.0, 0.0], [0.1, 0.0]]).unwrap(), &body).is_err());
    let outside = PointCloud::from_rows(2, &[[0.0, 0.0], [0.1, 0.0], [0.0, 0.1], [1.5, 0.0]]).unwrap();
    assert!(PointConfiguration::new(outside, &body).is_err());
}

#[test]
fn far_vertex_first_difference() {
    let body = ConvexBody::ball(2, 3.0).unwrap();
    let pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, 0.0]];
    let cfg = config(&body, &pts);
    let expected = shoelace_hull_area(&pts) - shoelace_hull_area(&without(&pts, &[4]));
    assert_relative_eq!(expected, 0.5, max_relative = 1e-14);
    assert_relative_eq!(first_difference(&cfg, 4, 2, &[]).unwrap(), 0.5, max_relative = 1e-12);
    // (1,0) lies on an edge once (2,0) is present
    assert_eq!(first_difference(&cfg, 1, 2, &[]).unwrap(), 0.0);
}

#[test]
fn shoelace_second_difference() {
    let body = ConvexBody::ball(2, 3.0).unwrap();
    let pts = [[0.0, 0.0], [2.0, 0.2], [1.7, 1.6], [0.3, 1.9], [-0.4, 0.9]];
    let cfg = config(&body, &pts);
    let area = |drop: &[usize]| shoelace_hull_area(&without(&pts, drop));
    for i1 in 0..5 {
        for i2 in 0..5 {
            if i1 == i2 {
                assert!(second_difference(&cfg, i1, i2, 2, &[]).is_err());
                continue;
            }
            let oracle = area(&[]) - area(&[i1]) - area(&[i2]) + area(&[i1, i2]);
            let got = second_difference(&cfg, i1, i2, 2, &[]).unwrap();
            assert!((got - oracle).abs() < 1e-12, "{i1},{i2}: {got} vs {oracle}");
            assert_eq!(got, second_difference(&cfg, i2, i1, 2, &[]).unwrap());
        }
    }
}

#[test]
fn difference_identities_on_random_configurations() {
    let body = ConvexBody::unit_ball(2);
    let mut rng = SeedTree::new(42).stream("stein", 1, 0);
    for _ in 0..20 {
        let cfg = PointConfiguration::sample(&body, 25, &mut rng).unwrap();
        for i in 0..25 {
            let d = first_difference(&cfg, i, 2, &[]).unwrap();
            assert!(d >= 0.0);
            let rest = convex_hull(&cfg.points().without(&[i])).unwrap();
            let inside = rest.contains(cfg.points().point(i));
            assert_eq!(d == 0.0 || d.abs() < 1e-14, inside, "point {i}");
        }
        for (i1, i2) in [(0, 1), (3, 7), (10, 24)] {
            let lhs = second_difference(&cfg, i1, i2, 2, &[]).unwrap();
            let reduced = PointConfiguration::new(cfg.points().without(&[i2]), &body).unwrap();
            let shifted = if i1 > i2 { i1 - 1 } else { i1 };
            let rhs = first_difference(&cfg, i1, 2, &[]).unwrap() - first_difference(&reduced, shifted, 2, &[]).unwrap();
            assert!((lhs - rhs).abs() < 1e-9);
        }
    }
}

#[test]
fn recombination() {
    let body = ConvexBody::unit_ball(2);
    let mut rng = SeedTree::new(43).stream("stein", 2, 0);
    let t = RecombinationTriple::sample(&body, 12, &mut rng).unwrap();
    let z = recombine(&t, &[0; 12]).unwrap();
    assert_eq!(z.points().as_flat(), t.x.points().as_flat());
    let z = recombine(&t, &[1; 12]).unwrap();
    assert_eq!(z.points().as_flat(), t.x_prime.points().as_flat());
    let sel: Vec<u8> = (0..12).map(|i| (i % 3) as u8).collect();
    let z = recombine(&t, &sel).unwrap();
    for (i, &s) in sel.iter().enumerate() {
        assert_eq!(z.points().point(i), t.source(s).points().point(i));
    }
    assert!(recombine(&t, &[0; 11]).is_err());
    assert!(recombine(&t, &[3; 12]).is_err());
}

fn check_profile_against_brute_force(n: usize, j: usize, subs: Vec<Subspace>, seed: u64, count: usize) {
    let body = ConvexBody::unit_ball(n);
    let f = Functional::new(n, j, subs.clone()).unwrap();
    let mut rng = SeedTree::new(seed).stream("profile", n as u64, j as u64);
    for _ in 0..3 {
        let cfg = PointConfiguration::sample(&body, count, &mut rng).unwrap();
        let prof = DifferenceProfile::compute(cfg.points(), &f).unwrap();
        assert_relative_eq!(prof.value, functional_f(&cfg, j, &subs).unwrap(), max_relative = 1e-12);
        let dense = prof.dense_first();
        for i in 0..count {
            let brute = first_difference(&cfg, i, j, &subs).unwrap();
            assert!((dense[i] - brute).abs() < 1e-12, "D_{i}: {} vs {brute}", dense[i]);
        }
        let mut found = std::collections::HashMap::new();
        for &(a, b, d) in &prof.second {
            assert!(a < b);
            found.insert((a, b), d);
        }
        for a in 0..count {
            for b in a + 1..count {
                let brute = second_difference(&cfg, a, b, j, &subs).unwrap();
                let got = found.get(&(a, b)).copied().unwrap_or(0.0);
                assert!((got - brute).abs() < 1e-11, "n={n} j={j} D_{a},{b}: {got} vs {brute}");
            }
        }
    }
}

#[test]
fn profile_matches_brute_force_planar() {
    check_profile_against_brute_force(2, 2, vec![], 44, 40);
    check_profile_against_brute_force(2, 1, vec![], 45, 40);
}

#[test]
fn profile_matches_brute_force_spatial() {
    check_profile_against_brute_force(3, 3, vec![], 46, 30);
    check_profile_against_brute_force(3, 2, vec![], 47, 30);
    let mut rng = SeedTree::new(48).stream("subs", 0, 0);
    let subs = draw_subspaces(3, 1, 12, &mut rng).unwrap();
    check_profile_against_brute_force(3, 1, subs, 49, 25);
}

#[test]
fn first_only_profile() {
    let body = ConvexBody::unit_ball(2);
    let f = Functional::new(2, 2, vec![]).unwrap();
    let mut rng = SeedTree::new(50).stream("profile", 0, 0);
    let pts = body.sample_cloud(&mut rng, 500);
    let full = DifferenceProfile::compute(&pts, &f).unwrap();
    let light = DifferenceProfile::first_only(&pts, &f).unwrap();
    assert_eq!(full.first, light.first);
    assert!(light.second.is_empty());
    assert!(!full.second.is_empty());
    assert!(full.mean_power(1) > 0.0);
}

#[test]
fn pattern_enumeration() {
    let p3 = pure_patterns(3);
    assert_eq!(p3.len(), 5);
    assert_eq!(pure_patterns(4).len(), 14);
    assert!(p3.iter().all(|p| p.roles[0] == 0));
    let labels: HashSet<_> = p3.iter().map(|p| p.label.clone()).collect();
    assert!(labels.contains("XXX") && labels.contains("XPT"));
}

#[test]
fn index_averaged_terms_match_direct_sums() {
    let body = ConvexBody::unit_ball(2);
    let f = Functional::new(2, 2, vec![]).unwrap();
    let mut rng = SeedTree::new(51).stream("terms", 0, 0);
    let count = 30;
    let ps: Vec<DifferenceProfile> = (0..3)
        .map(|_| DifferenceProfile::compute(&body.sample_cloud(&mut rng, count), &f).unwrap())
        .collect();
    let ind = |p: &DifferenceProfile, a: usize, b: usize| {
        p.second.iter().any(|&(x, y, _)| (x, y) == (a.min(b), a.max(b))) as u8 as f64
    };
    let d: Vec<Vec<f64>> = ps.iter().map(DifferenceProfile::dense_first).collect();
    let (mut s2, mut s1) = (0.0, 0.0);
    for a in 0..count {
        for b in 0..count {
            if a == b {
                continue;
            }
            s2 += ind(&ps[0], a, b) * (d[1][a] * d[2][b]).powi(2);
            for c in 0..count {
                if c != a && c != b {
                    s1 += ind(&ps[0], a, b) * ind(&ps[1], a, c) * (d[2][b] * d[0][c]).powi(2);
                }
            }
        }
    }
    let nf = count as f64;
    let g2 = gamma2_term(&ps[0], &d[1], &d[2]);
    assert_relative_eq!(g2, s2 / (nf * (nf - 1.0)), max_relative = 1e-12);
    let g1 = gamma1_term(&ps[0].adjacency(), &ps[1].adjacency(), &d[2], &d[0]);
    assert_relative_eq!(g1, s1 / (nf * (nf - 1.0) * (nf - 2.0)), max_relative = 1e-12);
}

#[test]
fn bound_formula() {
    let zero = GammaEstimates {
        gamma1: 0.0,
        gamma2: 0.0,
        gamma3: 0.0,
        gamma4: 0.0,
        std_errors: [0.0; 4],
        num_mc: 2,
        sup_patterns: [String::new(), String::new()],
    };
    assert_eq!(normal_approximation_bound(&zero, 1.0, 100).unwrap().total, 0.0);
    let g = GammaEstimates { gamma4: 1.0, ..zero.clone() };
    let b = normal_approximation_bound(&g, 1.0, 4).unwrap();
    assert_eq!(b.total, 4.0);
    assert_eq!(b.terms, [0.0, 0.0, 0.0, 4.0]);
    assert!(normal_approximation_bound(&g, 0.0, 4).is_err());
    assert!(normal_approximation_bound(&g, -1.0, 4).is_err());
}

#[test]
fn gamma_estimates_are_finite_and_deterministic() {
    let body = ConvexBody::unit_ball(2);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let mut rng = SeedTree::new(52).stream("gamma-test", 0, 0);
            estimate_gammas_with(&body, 2, 60, 12, &GammaOptions::default(), &mut rng).unwrap()
        })
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a.gammas, b.gammas);
    assert_eq!(a.values, b.values);
    let g = &a.gammas;
    for v in [g.gamma1, g.gamma2, g.gamma3, g.gamma4] {
        assert!(v.is_finite() && v >= 0.0);
    }
    assert!(g.gamma2 > 0.0 && g.gamma4 > 0.0);
    assert_eq!(a.values.len(), 36);
    assert_relative_eq!(a.d1_moments[2], g.gamma4, max_relative = 1e-12);
    let mut rng = SeedTree::new(53).stream("gamma-test", 1, 0);
    assert!(estimate_gammas(&body, 2, 4, 10, &mut rng).is_err());
    assert!(estimate_gammas(&body, 2, 50, 1, &mut rng).is_err());
}
