use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use hypconv::counterexample::{compute_epsilons, verify_drop_gap, verify_incidences, DropGapParams};
use hypconv::fmt::fmt_num;
use hypconv::io::{parse_inline, read_cloud, read_function, write_cloud, write_function, write_slice, CsvPoint};
use hypconv::separator::{
    build_separator, check_sep2, verify_separator, Sep2Params, SeparatorParams, VerifyParams,
};
use hypconv::spaces::checks::run_suite;
use hypconv::{
    from_klein, kantorovich_hull, slice as slice_cloud, to_klein, EPoint, Euclidean, GeodesicSpace, HPoint,
    HullParams, HyperbolicPlane, KleinPoint, PointCloud, SlicePlane, VerticalExtension,
};
use serde_json::json;

use crate::{
    AxiomsArgs, BaseSpaceId, ConvertArgs, CounterexampleArgs, Failure, HullArgs, Model, SeparateArgs, SliceArgs,
    SpaceId,
};

/// Runs `$body` with `$s` bound to the space named by `$id`.
macro_rules! with_space {
    ($id:expr, $s:ident => $body:expr) => {
        match $id {
            SpaceId::E1 => {
                let $s = Euclidean::<1>;
                $body
            }
            SpaceId::E2 => {
                let $s = Euclidean::<2>;
                $body
            }
            SpaceId::E3 => {
                let $s = Euclidean::<3>;
                $body
            }
            SpaceId::H2 => {
                let $s = HyperbolicPlane;
                $body
            }
            SpaceId::H2xr => {
                let $s = VerticalExtension::new(HyperbolicPlane);
                $body
            }
            SpaceId::E2xr => {
                let $s = VerticalExtension::new(Euclidean::<2>);
                $body
            }
        }
    };
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

/// Writes with `emit` to `path`, or to stdout when no path is given.
fn output(path: Option<&Path>, emit: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            emit(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            emit(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), Failure> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Failure::Config(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<(), Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::Config(format!("--{name} must be positive, got {v}")))
    }
}

pub fn hull(args: &HullArgs) -> Result<(), Failure> {
    positive("res", args.res)?;
    with_space!(args.space, space => hull_in(&space, args))
}

fn hull_in<S>(space: &S, args: &HullArgs) -> Result<(), Failure>
where
    S: GeodesicSpace,
    S::Point: CsvPoint,
{
    let seeds: Vec<S::Point> = match (&args.seeds, &args.seeds_file) {
        (Some(text), _) => parse_inline(text)?,
        (None, Some(path)) => read_cloud::<S::Point, _>(open(path)?)?.points().to_vec(),
        (None, None) => return Err(Failure::Config("give --seeds or --seeds-file".into())),
    };
    let mut params = HullParams::new(args.iterations, args.res)
        .with_max_points(args.max_points)
        .with_witnesses(args.witnesses);
    if let Some(tol) = args.dedup_tol {
        params = params.with_dedup_tol(tol);
    }
    let start = Instant::now();
    let cloud = kantorovich_hull(space, &seeds, &params)?;
    let elapsed = start.elapsed();
    output(args.out.as_deref(), |w| write_cloud(w, &cloud))?;

    let mut summary = format!(
        "{}: {} points; cloud size per pass {:?}; dedup {}; {:.3} s",
        space.id(),
        cloud.len(),
        cloud.pass_sizes(),
        fmt_num(params.dedup_tol),
        elapsed.as_secs_f64()
    );
    if args.witnesses {
        summary.push_str(&format!("\nwitness sizes: {:?}", cloud.witness_histogram()?));
    }
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

pub fn slice(args: &SliceArgs) -> Result<(), Failure> {
    if !(args.plane_tol >= 0.0) {
        return Err(Failure::Config("--plane-tol must be non-negative".into()));
    }
    let plane_points: Vec<HPoint> = parse_inline(&args.plane)?;
    let [a, b] = plane_points[..] else {
        return Err(Failure::Config(format!("--plane needs two points, got {}", plane_points.len())));
    };
    let plane = SlicePlane::through(&a, &b).map_err(|e| Failure::Config(format!("bad plane: {e}")))?;
    let cloud: PointCloud<EPoint<HPoint>> = read_cloud(open(&args.cloud)?)?;
    let rows = slice_cloud(cloud.points(), &plane, args.plane_tol);
    output(args.out.as_deref(), |w| write_slice(w, &rows))?;
    let summary = format!("{} of {} points within {} of the plane", rows.len(), cloud.len(), fmt_num(args.plane_tol));
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

pub fn counterexample(args: &CounterexampleArgs) -> Result<(), Failure> {
    positive("res", args.res)?;
    positive("incidence-tol", args.incidence_tol)?;
    let incidences = verify_incidences(args.incidence_tol)?;
    print!("{incidences}");
    let epsilons = compute_epsilons()?;
    print!("{epsilons}");

    let mut params = DropGapParams::new(args.iterations, args.res, args.delta);
    params.window = args.window;
    params.margin = args.margin;
    params.max_points = args.max_points;
    if let Some(tol) = args.dedup_tol {
        params.dedup_tol = tol;
    }
    let gap = verify_drop_gap(&params)?;
    print!("{gap}");

    let passed = incidences.passed() && epsilons.passed() && gap.passed();
    println!("{}", if passed { "counterexample verified" } else { "counterexample NOT verified" });
    if let Some(path) = &args.report {
        let record = json!({
            "seed": args.seed,
            "parameters": params,
            "incidences": incidences,
            "epsilons": epsilons,
            "drop_gap": gap,
            "passed": passed,
        });
        write_json(path, &record)?;
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Assertion("see the FAIL lines above".into()))
    }
}

pub fn separate(args: &SeparateArgs) -> Result<(), Failure> {
    positive("res", args.res)?;
    positive("snap", args.snap)?;
    match args.space {
        BaseSpaceId::E1 => separate_in(&Euclidean::<1>, args),
        BaseSpaceId::E2 => separate_in(&Euclidean::<2>, args),
        BaseSpaceId::E3 => separate_in(&Euclidean::<3>, args),
        BaseSpaceId::H2 => separate_in(&HyperbolicPlane, args),
    }
}

fn separate_in<S>(space: &S, args: &SeparateArgs) -> Result<(), Failure>
where
    S: GeodesicSpace + Clone,
    S::Point: CsvPoint,
{
    let f = read_function(space, open(&args.f)?)?;
    let g = read_function(space, open(&args.g)?)?;
    if f.domain() != g.domain() {
        return Err(Failure::Config("f and g must list the same domain points in the same order".into()));
    }
    let mut params = SeparatorParams::new(args.iterations, args.res, args.snap);
    params.max_points = args.max_points;
    if let Some(tol) = args.dedup_tol {
        params.dedup_tol = tol;
    }
    let result = build_separator(space, &g, &params)?;
    let verify = VerifyParams { pairs: args.pairs, t_steps: args.t_steps, seed: args.seed, tol: args.tol };
    let report = verify_separator(space, &f, &g, &result, &verify)?;
    let sep2 = if args.sep2_tuples > 0 {
        Some(check_sep2(space, &f, &g, &Sep2Params::new(args.sep2_tuples, args.t_steps, args.seed, args.tol))?)
    } else {
        None
    };
    output(args.phi_out.as_deref(), |w| write_function(w, &result.phi))?;

    let mut lines = vec![
        format!("{}: {} domain points, hull cloud {} points", space.id(), g.len(), result.hull_cloud.len()),
        format!(
            "f <= phi + tol fails at {} points, phi <= g + tol fails at {} points",
            report.below_f.len(),
            report.above_g.len()
        ),
        format!(
            "convexity: {} violations, max excess {}, snapping radius {}",
            report.convexity.len(),
            fmt_num(report.max_convexity_excess),
            fmt_num(report.max_snap_radius)
        ),
    ];
    if !result.fallback.is_empty() || !result.clamped.is_empty() {
        lines.push(format!(
            "phi used the nearest-height fallback at {} points and was clamped at {}",
            result.fallback.len(),
            result.clamped.len()
        ));
    }
    if let Some(s) = &sep2 {
        lines.push(format!(
            "sep2 falsifier: {} violations over {} tuples, snapping radius {}",
            s.violations.len(),
            s.tuples,
            fmt_num(s.max_snap_radius)
        ));
    }
    let passed = report.passed() && sep2.as_ref().is_none_or(|s| s.passed());
    lines.push(if passed { "separator verified".into() } else { "separator NOT verified".into() });
    let text = lines.join("\n");
    if args.phi_out.is_some() {
        println!("{text}");
    } else {
        eprintln!("{text}");
    }
    if let Some(path) = &args.report {
        let record = json!({
            "space": space.id(),
            "seed": args.seed,
            "parameters": params,
            "verify": verify,
            "report": report,
            "fallback": result.fallback,
            "clamped": result.clamped,
            "sep2": sep2,
            "passed": passed,
        });
        write_json(path, &record)?;
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Assertion("separator verification failed".into()))
    }
}

pub fn axioms(args: &AxiomsArgs) -> Result<(), Failure> {
    positive("tol", args.tol)?;
    if args.samples == 0 {
        return Err(Failure::Config("--samples must be positive".into()));
    }
    let reports = with_space!(args.space, space => run_suite(&space, args.samples, args.seed, args.tol))?;
    for r in &reports {
        println!("{r}");
    }
    if let Some(path) = &args.report {
        let value = serde_json::to_value(&reports).map_err(|e| Failure::Config(e.to_string()))?;
        write_json(path, &value)?;
    }
    let failed: usize = reports.iter().map(|r| r.violations.len()).sum();
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Assertion(format!("{failed} axiom violations")))
    }
}

fn read_pairs(path: &Path) -> Result<Vec<(f64, f64)>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let body: String = text.lines().skip(1).filter(|l| !l.trim().is_empty()).collect::<Vec<_>>().join(";");
    let pts: Vec<[f64; 2]> = parse_inline(&body)?;
    Ok(pts.into_iter().map(|p| (p[0], p[1])).collect())
}

pub fn convert(args: &ConvertArgs) -> Result<(), Failure> {
    let pairs: Vec<(f64, f64)> = match (&args.points, &args.input) {
        (Some(text), _) => parse_inline::<[f64; 2]>(text)?.into_iter().map(|p| (p[0], p[1])).collect(),
        (None, Some(path)) => read_pairs(path)?,
        (None, None) => return Err(Failure::Config("give --points or --input".into())),
    };
    let (header, mapped) = match args.to {
        Model::Klein => {
            let out = pairs
                .iter()
                .map(|&(x, y)| to_klein(&HPoint::new(x, y)?).map(|k| (k.u, k.v)))
                .collect::<Result<Vec<_>, _>>()?;
            ("u,v", out)
        }
        Model::HalfPlane => {
            let out = pairs
                .iter()
                .map(|&(u, v)| from_klein(&KleinPoint::new(u, v)?).map(|p| (p.x, p.y)))
                .collect::<Result<Vec<_>, _>>()?;
            ("x,y", out)
        }
    };
    output(args.out.as_deref(), |w| {
        writeln!(w, "{header}")?;
        for (a, b) in &mapped {
            writeln!(w, "{},{}", fmt_num(*a), fmt_num(*b))?;
        }
        Ok(())
    })
}
