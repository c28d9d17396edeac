//! The regularized hypersingular operators against the traction of the
//! double-layer potential, computed by finite differences off the curve and
//! polynomially extrapolated onto it.

use arcwave::geometry::{discretize, preset_geometry, Grid, Point, Preset};
use arcwave::material::Material;
use arcwave::operators::to_flat;
use arcwave::scattering::{near_field, OperatorCache, Representation};
use num_complex::Complex64 as c64;

fn traction_limit(m: &Material, grid: &Grid, dens: &[c64], xi: Point, nu: Point) -> [c64; 2] {
    let h = 1e-4;
    let u = |x: Point| near_field(m, grid, dens, Representation::DoubleLayer, &[x]).unwrap()[0];
    let ds: Vec<f64> = (0..8).map(|k| 0.08 + 0.02 * k as f64).collect();
    let tr: Vec<[c64; 2]> = ds
        .iter()
        .map(|d| {
            let x = [xi[0] + d * nu[0], xi[1] + d * nu[1]];
            let mut g = [[c64::new(0.0, 0.0); 2]; 2];
            for k in 0..2 {
                let (mut a, mut b) = (x, x);
                a[k] += h;
                b[k] -= h;
                let (ua, ub) = (u(a), u(b));
                for c in 0..2 {
                    g[c][k] = (ua[c] - ub[c]) / (2.0 * h);
                }
            }
            let div = g[0][0] + g[1][1];
            [0, 1].map(|c| {
                m.lambda * div * nu[c] + m.mu * ((g[c][0] + g[0][c]) * nu[0] + (g[c][1] + g[1][c]) * nu[1])
            })
        })
        .collect();
    [0, 1].map(|c| {
        let mut v = c64::new(0.0, 0.0);
        for a in 0..ds.len() {
            let l: f64 = (0..ds.len()).filter(|&b| b != a).map(|b| -ds[b] / (ds[a] - ds[b])).product();
            v += tr[a][c] * l;
        }
        v
    })
}

fn check(got: [c64; 2], want: [c64; 2], tol: f64) {
    let scale = want[0].norm().max(want[1].norm());
    for c in 0..2 {
        assert!((got[c] - want[c]).norm() <= tol * scale, "{got:?} vs {want:?}");
    }
}

#[test]
fn closed_n_is_traction_of_double_layer() {
    let m = Material::new(2.0, 1.0, 1.0, 3.0).unwrap();
    let geo = preset_geometry(Preset::Circle { r: 1.0 }).unwrap();
    let psi = |s: f64| [c64::new(s.cos(), 0.3), c64::new((2.0 * s).sin(), -0.2 * s.cos())];
    let dens = |g: &Grid| match g {
        Grid::Closed(p) => to_flat(&p.s.iter().map(|&s| psi(s)).collect::<Vec<_>>()),
        Grid::Open(_) => unreachable!(),
    };
    let coarse = discretize(&geo, 32).unwrap();
    let fine = discretize(&geo, 400).unwrap();
    let nv = OperatorCache::new(m, coarse.clone()).hypersingular(false).unwrap().apply(&dens(&coarse));
    let Grid::Closed(pc) = &coarse else { unreachable!() };
    for i in [0, 5, 40] {
        let want = traction_limit(&m, &fine, &dens(&fine), pc.points[i], pc.normal[i]);
        check([nv[i], nv[64 + i]], want, 1e-4);
    }
}

#[test]
fn open_nw_is_traction_of_weighted_double_layer() {
    let m = Material::new(2.0, 1.0, 1.0, 3.0).unwrap();
    let geo = preset_geometry(Preset::Spiral).unwrap();
    let beta = |t: f64| [c64::new(t.cos(), 0.3 * t), c64::new((2.0 * t).sin(), -0.2)];
    let dens = |g: &Grid| match g {
        Grid::Open(p) => to_flat(&p.t.iter().map(|&t| beta(t)).collect::<Vec<_>>()),
        Grid::Closed(_) => unreachable!(),
    };
    let coarse = discretize(&geo, 48).unwrap();
    let fine = discretize(&geo, 1600).unwrap();
    let nv = OperatorCache::new(m, coarse.clone()).hypersingular(false).unwrap().apply(&dens(&coarse));
    let Grid::Open(pc) = &coarse else { unreachable!() };
    for i in [10, 24, 30] {
        let want = traction_limit(&m, &fine, &dens(&fine), pc.points[i], pc.normal[i]);
        check([nv[i], nv[48 + i]], want, 1e-4);
    }
}
