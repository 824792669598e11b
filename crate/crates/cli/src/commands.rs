//! One handler per subcommand. Each returns a [`Report`]; numeric failures
//! carry the name of the module whose contract was violated.

use anyhow::{Context, Result};
use schwarzkit::check::Check;
use schwarzkit::expr::format_complex;
use schwarzkit::geometry::{disk_samples, geodesic_rectangle, hyp_dist, pseudo_disk, rectangle_count, rho};
use schwarzkit::harmonic::{
    harmonic_norm_estimate, harmonic_preimages, harmonic_schwarzian, lift, lift_criterion_value, shear_koebe,
    shear_koebe_schwarzian_closed_form, HarmonicMap, PreimageGrid, CONFORMALITY_TOL,
};
use schwarzkit::norm::{GridSpec, NormEstimate};
use schwarzkit::ode::{
    disconjugacy_check, find_zeros, integrate_segment, legendre_lower_bound, legendre_lower_bound_with_ode,
    lemma1_residual, SegmentPath, SegmentSolution, LEMMA1_TOL,
};
use schwarzkit::schwarzian::{nehari_check, schwarzian, schwarzian_norm_estimate, NEHARI_SLACK};
use schwarzkit::valence::{
    count_valence, empirical_band, integral_estimates, packing_check, sweep, sweep_csv, tan_zero_census,
    theorem2_breakdown, valence_bound_const,
};
use schwarzkit::verify::run_all;

use crate::args::{
    GeomCmd, GridArgs, Group, HarmonicCmd, MapArgs, OdeCmd, SchwCmd, SegmentArgs, ValenceCmd, VerifyCmd,
};
use crate::report::{check_line, cx, cx_list, Report};

const SCHWARZIAN: &str = "schwarzian-analytic contract";
const GEOMETRY: &str = "disk-geometry contract";
const ODE: &str = "ode-sturm contract";
const VALENCE: &str = "valence-bounds contract";
const HARMONIC: &str = "harmonic-schwarzian contract";

pub fn run(group: Group, seed: u64) -> Result<Report> {
    match group {
        Group::Schw(cmd) => schw(cmd, seed),
        Group::Geom(cmd) => geom(cmd),
        Group::Ode(cmd) => ode(cmd, seed),
        Group::Valence(cmd) => valence(cmd),
        Group::Harmonic(cmd) => harmonic(cmd),
        Group::Verify(cmd) => verify(cmd, seed),
    }
}

fn grid_spec(g: &GridArgs) -> GridSpec {
    GridSpec { refine: !g.no_refine, ..GridSpec::new(g.radial, g.angular) }
}

fn grid_inputs(r: &mut Report, g: &GridArgs) {
    r.input("radial", g.radial).input("angular", g.angular).input("refine", !g.no_refine);
}

fn norm_values(r: &mut Report, est: &NormEstimate) {
    r.headline(est.lower_bound.to_string())
        .value("lower_bound", est.lower_bound)
        .value("attaining_point", cx(est.attaining_point))
        .value("grid_resolution", est.grid_resolution)
        .value("refined", est.refined)
        .value("skipped", est.skipped);
}

fn schw(cmd: SchwCmd, seed: u64) -> Result<Report> {
    match cmd {
        SchwCmd::Eval { f, z } => {
            let s = schwarzian(&f, z).context(SCHWARZIAN)?;
            let mut r = Report::new("schw eval");
            r.input("f", f.to_string()).input("z", cx(z));
            r.headline(format_complex(s)).value("schwarzian", cx(s));
            Ok(r)
        }
        SchwCmd::Norm { f, grid } => {
            let est = schwarzian_norm_estimate(&f, &grid_spec(&grid)).context(SCHWARZIAN)?;
            let mut r = Report::new("schw norm");
            r.input("f", f.to_string());
            grid_inputs(&mut r, &grid);
            norm_values(&mut r, &est);
            Ok(r)
        }
        SchwCmd::NehariCheck { f, profile, samples, radius } => {
            let points = disk_samples(samples, radius, seed).context(GEOMETRY)?;
            let rep = nehari_check(&f, profile, &points).context(SCHWARZIAN)?;
            let mut r = Report::new("schw nehari-check");
            r.input("f", f.to_string())
                .input("profile", profile.name())
                .input("samples", samples)
                .input("radius", radius)
                .input("seed", seed);
            r.headline(rep.worst_ratio.to_string())
                .value("worst_ratio", rep.worst_ratio)
                .value("worst_point", rep.worst_point.map_or(serde_json::Value::Null, cx))
                .value("evaluated", rep.evaluated)
                .value("failures", rep.failures.len());
            r.check(Check::at_most("max |Sf|/(2p(|z|))", rep.worst_ratio, 1.0, NEHARI_SLACK));
            r.check(Check::near("samples evaluated", rep.evaluated as f64, samples as f64, 0.0));
            Ok(r)
        }
    }
}

fn geom(cmd: GeomCmd) -> Result<Report> {
    match cmd {
        GeomCmd::Rho { a, b } => {
            let d = rho(a, b).context(GEOMETRY)?;
            let h = hyp_dist(a, b).context(GEOMETRY)?;
            let mut r = Report::new("geom rho");
            r.input("a", cx(a)).input("b", cx(b));
            r.headline(d.to_string()).value("rho", d).value("hyperbolic_distance", h);
            Ok(r)
        }
        GeomCmd::Disk { alpha, r: radius } => {
            let disk = pseudo_disk(alpha, radius).context(GEOMETRY)?;
            let worst = (0..64)
                .map(|k| disk.boundary_point(std::f64::consts::TAU * k as f64 / 64.0))
                .map(|z| rho(z, alpha).map(|d| (d - radius).abs()))
                .collect::<schwarzkit::Result<Vec<_>>>()
                .context(GEOMETRY)?
                .into_iter()
                .fold(0.0f64, f64::max);
            let mut r = Report::new("geom disk");
            r.input("alpha", cx(alpha)).input("r", radius);
            r.headline(format!("center {} radius {}", format_complex(disk.euclidean_center), disk.euclidean_radius))
                .value("euclidean_center", cx(disk.euclidean_center))
                .value("euclidean_radius", disk.euclidean_radius);
            r.check(Check::at_most("boundary |ρ - r|", worst, 0.0, 1e-10));
            Ok(r)
        }
        GeomCmd::Rectangles { c } => {
            let spec = geodesic_rectangle(c).context(GEOMETRY)?;
            let count = rectangle_count(c).context(GEOMETRY)?;
            let (modulus_res, symmetry_res) = spec.tangency_residuals();
            let mut r = Report::new("geom rectangles");
            r.input("C", c);
            r.headline(count.count.to_string())
                .value("rectangle_count", count.count)
                .value("fallback", count.fallback)
                .value("R", spec.r)
                .value("R1", spec.r1)
                .value("y", spec.y)
                .value("half_angle", spec.half_angle)
                .value("half_angle_closed_form", spec.half_angle_closed_form());
            r.check(Check::near("y² against 2C/(6C-1)", spec.y * spec.y, 2.0 * c / (6.0 * c - 1.0), 1e-12))
                .check(Check::at_least("5C·half_angle", 5.0 * c * spec.half_angle, 1.0, 0.0))
                .check(Check::at_most("| |T(iy)| - R |", modulus_res, 0.0, 1e-12))
                .check(Check::at_most("|arg T(iy) + arg T(-iy)|", symmetry_res, 0.0, 1e-12));
            Ok(r)
        }
    }
}

fn solve(args: &SegmentArgs) -> Result<SegmentSolution> {
    let path = SegmentPath::new(args.from, args.to).context(ODE)?;
    integrate_segment(&args.psi, path, args.u0, args.du0, args.steps).context(ODE)
}

fn segment_inputs(r: &mut Report, args: &SegmentArgs) {
    r.input("psi", args.psi.to_string())
        .input("from", cx(args.from))
        .input("to", cx(args.to))
        .input("u0", cx(args.u0))
        .input("du0", cx(args.du0))
        .input("steps", args.steps);
}

fn ode(cmd: OdeCmd, seed: u64) -> Result<Report> {
    match cmd {
        OdeCmd::Segment(args) => {
            let sol = solve(&args)?;
            let zeros = find_zeros(&sol).context(ODE)?;
            let mut r = Report::new("ode segment");
            segment_inputs(&mut r, &args);
            let end = sol.u.len() - 1;
            r.headline(zeros.count.to_string())
                .value("zero_count", zeros.count)
                .value("zeros", zeros.zeros.clone())
                .value("min_gap", zeros.min_gap)
                .value("length", sol.path.length())
                .value("u_end", cx(sol.u[end]))
                .value("du_end", cx(sol.du[end]))
                .value("residual_estimate", sol.residual_estimate);
            Ok(r)
        }
        OdeCmd::Lemma1(args) => {
            let sol = solve(&args)?;
            let rep = lemma1_residual(&sol, &args.psi).context(ODE)?;
            let mut r = Report::new("ode lemma1");
            segment_inputs(&mut r, &args);
            r.headline(rep.min_residual.to_string())
                .value("min_residual", rep.min_residual)
                .value("scale", rep.scale)
                .value("tested", rep.tested)
                .value("skipped", rep.skipped);
            r.check(Check::at_least("min (v'' + |ψ|v)", rep.min_residual, 0.0, LEMMA1_TOL * rep.scale));
            Ok(r)
        }
        OdeCmd::Legendre { n, ode } => {
            let rep = if ode { legendre_lower_bound_with_ode(n) } else { legendre_lower_bound(n) }.context(ODE)?;
            let mut r = Report::new("ode legendre");
            r.input("n", n).input("ode", ode);
            r.headline(rep.record.count.to_string())
                .value("zero_count", rep.record.count)
                .value("zeros", rep.record.zeros.clone())
                .value("min_gap", rep.record.min_gap)
                .value("expected", rep.expected)
                .value("C", (n * (n + 1)) as f64);
            r.check(Check::near("zeros of (1-x²)P_n'", rep.record.count as f64, rep.expected as f64, 0.0));
            if let Some(changes) = rep.ode_sign_changes {
                r.value("ode_sign_changes", changes);
                r.check(Check::at_least("sign changes of the integrated solution", changes as f64, rep.expected as f64, 0.0));
            }
            Ok(r)
        }
        OdeCmd::Disconjugacy { profile, trials } => {
            let rep = disconjugacy_check(profile, trials, seed).context(ODE)?;
            let mut r = Report::new("ode disconjugacy");
            r.input("profile", profile.name()).input("trials", trials).input("seed", seed);
            r.headline(rep.max_zeros.to_string())
                .value("max_zeros", rep.max_zeros)
                .value("zero_counts", rep.zero_counts.clone());
            r.check(Check::at_most("zeros per solution", rep.max_zeros as f64, 1.0, 0.0));
            Ok(r)
        }
    }
}

fn valence(cmd: ValenceCmd) -> Result<Report> {
    match cmd {
        ValenceCmd::Count { f, w, r: radius, nodes, c } => {
            let rep = count_valence(&f, w, radius, nodes).context(VALENCE)?;
            let mut r = Report::new("valence count");
            r.input("f", f.to_string()).input("w", cx(w)).input("r", radius).input("nodes", nodes);
            r.headline(rep.count.to_string())
                .value("count", rep.count)
                .value("preimages", cx_list(&rep.preimages))
                .value("multiplicities", rep.multiplicities.clone())
                .value("poles", cx_list(&rep.poles))
                .value("min_separation", rep.min_separation)
                .value("winding", rep.winding)
                .value("winding_residual", rep.winding_residual);
            if let Some(c) = c {
                r.input("C", c);
                let pack = packing_check(&rep, c).context(VALENCE)?;
                r.value("separation_bound", pack.separation_bound).value("valence_bound", pack.valence_bound);
                r.check(Check::holds("preimages π√(2/C)-separated", pack.separation_ok))
                    .check(Check::at_most("count", rep.count as f64, pack.valence_bound, 0.0));
            }
            Ok(r)
        }
        ValenceCmd::Bound { c } => {
            let b = valence_bound_const(c).context(VALENCE)?;
            let mut r = Report::new("valence bound");
            r.input("C", c);
            r.headline(b.cap.to_string()).value("bound", b.value).value("cap", b.cap);
            Ok(r)
        }
        ValenceCmd::TanCensus { c } => {
            let t = tan_zero_census(c).context(VALENCE)?;
            let mut r = Report::new("valence tan-census");
            r.input("C", c);
            r.headline(t.report.count.to_string())
                .value("count", t.report.count)
                .value("zeros", t.report.preimages.iter().map(|z| z.re).collect::<Vec<_>>())
                .value("spacing", t.spacing)
                .value("min_separation", t.report.min_separation)
                .value("lower_envelope", t.lower_envelope)
                .value("bound", t.bound.value)
                .value("cap", t.bound.cap);
            r.check(Check::at_least("count against √(2C)/π - 1", t.report.count as f64, t.lower_envelope, 0.0))
                .check(Check::at_most("count against the valence bound", t.report.count as f64, t.bound.value, 0.0));
            Ok(r)
        }
        ValenceCmd::Breakdown { c } => {
            let b = theorem2_breakdown(c).context(VALENCE)?;
            let ints = integral_estimates(c).context(VALENCE)?;
            let mut r = Report::new("valence breakdown");
            r.input("C", c);
            r.headline(b.total.to_string())
                .record("breakdown", &b)
                .record("integrals", &ints)
                .value("total", b.total);
            r.check(Check::at_most("max |φ(r_{k-1})d_k - 1|", b.phi_d_residual, 0.0, 1e-10))
                .check(Check::at_most("Σ N_k against 1.01·2π∫φ²", b.inner_sum as f64, 1.01 * (b.quadrature_envelope - 1.0), 0.0))
                .check(Check::at_most("I1 against (2C/π²)log(16C)", ints.i1, ints.i1_bound, 1e-6))
                .check(Check::at_most("I2 against 2/(1-R²)", ints.i2, ints.i2_bound, 0.0))
                .check(Check::holds("I3 finite", ints.i3_finite));
            Ok(r)
        }
        ValenceCmd::Sweep { c_min, c_max, points } => {
            anyhow::ensure!(
                c_min > 2.0 && c_max >= c_min && points >= 1,
                "{VALENCE}: sweep needs 2 < c-min ≤ c-max and at least one point"
            );
            let cs: Vec<f64> = if points == 1 {
                vec![c_min]
            } else {
                let ratio = (c_max / c_min).ln() / (points - 1) as f64;
                (0..points).map(|k| if k + 1 == points { c_max } else { c_min * (ratio * k as f64).exp() }).collect()
            };
            let rows = sweep(&cs).context(VALENCE)?;
            let band = empirical_band(&rows);
            let mut r = Report::new("valence sweep");
            r.input("c_min", c_min).input("c_max", c_max).input("points", points);
            r.record("rows", &rows)
                .value("band_min", band.min)
                .value("band_max", band.max)
                .value("a_empirical", band.a_empirical);
            r.check(Check::holds("total/(C ln C) finite and positive", band.all_finite_positive));
            r.csv = Some(sweep_csv(&rows));
            Ok(r)
        }
    }
}

fn harmonic_map(m: &MapArgs) -> HarmonicMap {
    HarmonicMap::new(m.h.clone(), m.q.clone())
}

fn map_inputs(r: &mut Report, m: &MapArgs) {
    r.input("h", m.h.to_string()).input("q", m.q.to_string());
}

fn harmonic(cmd: HarmonicCmd) -> Result<Report> {
    match cmd {
        HarmonicCmd::Schwarzian { map, z } => {
            let s = harmonic_schwarzian(&harmonic_map(&map), z).context(HARMONIC)?;
            let mut r = Report::new("harmonic schwarzian");
            map_inputs(&mut r, &map);
            r.input("z", cx(z));
            r.headline(format_complex(s)).value("schwarzian", cx(s));
            Ok(r)
        }
        HarmonicCmd::Norm { map, grid } => {
            let est = harmonic_norm_estimate(&harmonic_map(&map), &grid_spec(&grid)).context(HARMONIC)?;
            let mut r = Report::new("harmonic norm");
            map_inputs(&mut r, &map);
            grid_inputs(&mut r, &grid);
            norm_values(&mut r, &est);
            Ok(r)
        }
        HarmonicCmd::Shear { theta, z } => {
            let m = shear_koebe(theta).context(HARMONIC)?;
            let mut r = Report::new("harmonic shear");
            r.input("theta", theta);
            r.value("h", m.h.to_string()).value("q", m.q.to_string());
            r.headline(format!("h = {}, q = {}", m.h, m.q));
            if let Some(z) = z {
                r.input("z", cx(z));
                let s = harmonic_schwarzian(&m, z).context(HARMONIC)?;
                let f = m.f(z).context(HARMONIC)?;
                r.headline(format_complex(s)).value("schwarzian", cx(s)).value("f", cx(f));
                if theta == 0.0 {
                    let want = shear_koebe_schwarzian_closed_form(z);
                    r.check(Check::at_most("|Sf - closed form|", (s - want).norm(), 0.0, 1e-8 * want.norm().max(1.0)));
                }
            }
            Ok(r)
        }
        HarmonicCmd::Lift { map, z } => {
            let s = lift(&harmonic_map(&map), z).context(HARMONIC)?;
            let mut r = Report::new("harmonic lift");
            map_inputs(&mut r, &map);
            r.input("z", cx(z));
            r.headline(format!("{} {} {}", s.coords[0], s.coords[1], s.coords[2]))
                .value("coords", s.coords.to_vec())
                .value("conformal_factor", s.conformal_factor)
                .value("curvature_density", s.curvature_density)
                .value("conformality_residual", s.conformality_residual);
            r.check(Check::at_most("conformality residual", s.conformality_residual, 0.0, CONFORMALITY_TOL));
            Ok(r)
        }
        HarmonicCmd::Criterion { map, z, c } => {
            let v = lift_criterion_value(&harmonic_map(&map), z).context(HARMONIC)?;
            let mut r = Report::new("harmonic criterion");
            map_inputs(&mut r, &map);
            r.input("z", cx(z));
            r.headline(v.to_string()).value("criterion", v);
            if let Some(c) = c {
                r.input("C", c);
                r.check(Check::at_most("|Sf| + e^{2σ}|K|", v, c, 0.0));
            }
            Ok(r)
        }
        HarmonicCmd::Preimages { map, w, c, radial, angular, radius } => {
            let grid = PreimageGrid { radial, angular, radius };
            let rep = harmonic_preimages(&harmonic_map(&map), w, &grid, c).context(HARMONIC)?;
            let mut r = Report::new("harmonic preimages");
            map_inputs(&mut r, &map);
            r.input("w", cx(w)).input("radial", radial).input("angular", angular).input("radius", radius);
            r.headline(rep.report.count.to_string())
                .value("count", rep.report.count)
                .value("preimages", cx_list(&rep.report.preimages))
                .value("min_separation", rep.report.min_separation)
                .value("dropped_seeds", rep.dropped);
            if let (Some(c), Some(ok), Some(bound)) = (c, rep.separation_ok, rep.separation_bound) {
                r.input("C", c);
                r.value("separation_bound", bound);
                r.check(Check::holds("preimages π√(2/C)-separated", ok));
            }
            Ok(r)
        }
    }
}

fn verify(cmd: VerifyCmd, seed: u64) -> Result<Report> {
    match cmd {
        VerifyCmd::All => {
            let outcomes = run_all(seed).context("acceptance suite")?;
            let mut r = Report::new("verify all");
            r.input("seed", seed);
            r.list_checks = false;
            let mut table = String::new();
            for o in &outcomes {
                let status = if o.pass() { "PASS" } else { "FAIL" };
                table.push_str(&format!("[{status}] criterion {}: {} ({} checks)\n", o.id, o.title, o.checks.len()));
                for c in o.checks.iter().filter(|c| !c.pass) {
                    table.push_str(&format!("    {}\n", check_line(c)));
                }
                r.value(&format!("criterion_{}", o.id), o.pass());
                for c in &o.checks {
                    let mut c = c.clone();
                    c.name = format!("criterion {}: {}", o.id, c.name);
                    r.check(c);
                }
            }
            let passed = outcomes.iter().filter(|o| o.pass()).count();
            table.push_str(&format!("{passed}/{} criteria passed", outcomes.len()));
            r.headline(table);
            // the table already lists every verdict
            r.values.clear();
            Ok(r)
        }
    }
}
