//! Golden-file tests: every subcommand's stdout is pinned byte-for-byte,
//! and running twice must produce identical output. Regenerate the pinned
//! files with `BLESS=1 cargo test -p wdc-cli --test golden`.

use std::fs;
use std::path::{Path, PathBuf};

use wdc::aura::square_aura;
use wdc::planar::{OpenSectorSpec, PlanarLocalModel};
use wdc::schema;

fn fixtures() -> PathBuf {
    static ONCE: std::sync::OnceLock<PathBuf> = std::sync::OnceLock::new();
    ONCE.get_or_init(build_fixtures).clone()
}

fn build_fixtures() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("fixtures");
    fs::create_dir_all(&dir).unwrap();

    let square = wdc::topology::shapes::square();
    fs::write(dir.join("square.json"), schema::dc_to_json(&square)).unwrap();
    let annulus = wdc::topology::shapes::square_annulus();
    fs::write(dir.join("annulus.json"), schema::dc_to_json(&annulus)).unwrap();
    let a = square_aura(&[-3.0, 0.0], 1.0);
    let b = square_aura(&[3.0, 0.0], 1.0);
    fs::write(dir.join("square_a.json"), schema::dc_to_json(&a)).unwrap();
    fs::write(dir.join("square_b.json"), schema::dc_to_json(&b)).unwrap();
    let halfplane = wdc::dc::max_of(&[
        wdc::dc::DCFunction::affine(wdc::dc::AffineMap::new(vec![0.0, 1.0], 0.0)),
        wdc::dc::DCFunction::constant(2, 0.0),
    ])
    .unwrap();
    fs::write(dir.join("halfplane.json"), schema::dc_to_json(&halfplane)).unwrap();
    let point = wdc::dc::sup_norm(2);
    fs::write(dir.join("point.json"), schema::dc_to_json(&point)).unwrap();

    let quadrants = PlanarLocalModel::ComplementOf {
        base: vec![0.0, 0.0],
        sectors: vec![
            OpenSectorSpec {
                rotation: std::f64::consts::FRAC_PI_4,
                radius: 1.0,
                boundary: wdc::dc::abs_1d(),
            },
            OpenSectorSpec {
                rotation: std::f64::consts::FRAC_PI_4 + std::f64::consts::PI,
                radius: 1.0,
                boundary: wdc::dc::abs_1d(),
            },
        ],
    };
    fs::write(dir.join("quadrants.json"), schema::model_to_json(&quadrants)).unwrap();
    let germ = wdc::planar::model_to_germ(&quadrants).unwrap();
    fs::write(dir.join("quadrants_germ.json"), schema::germ_to_json(&germ)).unwrap();

    let mut curve = String::from("x,y\n");
    for i in 0..15 {
        let s = i as f64 / 14.0;
        let y = 0.3 - 0.6 * s;
        let bulge = 0.1 * (std::f64::consts::PI * s).sin();
        curve.push_str(&format!("{},{}\n", 1.0 + bulge, y));
    }
    fs::write(dir.join("curve.csv"), curve).unwrap();
    dir
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

fn check(name: &str, args: &[&str], want_code: i32) {
    let fix = fixtures();
    let expand = |s: &str| s.replace("$F", fix.to_str().unwrap());
    let argv: Vec<String> =
        std::iter::once("wdc".to_string()).chain(args.iter().map(|a| expand(a))).collect();
    let (code, out) = wdc_cli::execute(argv.clone());
    let (code2, out2) = wdc_cli::execute(argv);
    assert_eq!(out, out2, "{name}: output differs between runs");
    assert_eq!(code, code2);
    assert_eq!(code, want_code, "{name}: exit code {code}, output:\n{out}");
    let path = golden_dir().join(format!("{name}.txt"));
    if std::env::var("BLESS").is_ok() {
        fs::create_dir_all(golden_dir()).unwrap();
        fs::write(&path, &out).unwrap();
    } else {
        let want = fs::read_to_string(&path)
            .unwrap_or_else(|_| panic!("{name}: missing golden file {path:?}"));
        assert_eq!(out, want, "{name}: output drifted from the golden file");
    }
}

#[test]
fn golden_eval() {
    check("eval", &["eval", "--fn", "$F/square.json", "--point", "2,0"], 0);
}

#[test]
fn golden_subdiff() {
    check(
        "subdiff",
        &["subdiff", "--fn", "$F/square.json", "--point", "1,1", "--mode", "clarke"],
        0,
    );
}

#[test]
fn golden_check_aura() {
    check("check-aura", &["check-aura", "--fn", "$F/square.json", "--level", "0", "--eps", "0.5"], 0);
}

#[test]
fn golden_check_aura_unbounded() {
    check(
        "check-aura-unbounded",
        &["check-aura", "--fn", "$F/halfplane.json", "--level", "0"],
        2,
    );
}

#[test]
fn golden_sum_aura() {
    check(
        "sum-aura",
        &["sum-aura", "--fn", "$F/square_a.json", "--gn", "$F/square_b.json"],
        0,
    );
}

#[test]
fn golden_sum_aura_touch() {
    // a thin-set aura touches itself: refusal with a witness, exit 3
    check(
        "sum-aura-touch",
        &["sum-aura", "--fn", "$F/point.json", "--gn", "$F/point.json", "--box", "-2,-2,2,2"],
        3,
    );
}

#[test]
fn golden_retract() {
    check(
        "retract",
        &["retract", "--fn", "$F/square.json", "--start", "2,0", "--eps", "0.7"],
        0,
    );
}

#[test]
fn golden_boundary_path() {
    check(
        "boundary-path",
        &["boundary-path", "--fn", "$F/square.json", "--curve", "$F/curve.csv", "--eps", "0.7"],
        0,
    );
}

#[test]
fn golden_euler_degree() {
    check(
        "euler-degree",
        &["euler", "--fn", "$F/annulus.json", "--level", "0.25", "--method", "degree", "--grid", "0.08"],
        0,
    );
}

#[test]
fn golden_euler_cubical() {
    check(
        "euler-cubical",
        &["euler", "--fn", "$F/square.json", "--level", "0.25", "--method", "cubical", "--grid", "0.05"],
        0,
    );
}

#[test]
fn golden_level() {
    check(
        "level",
        &["level", "--fn", "$F/annulus.json", "--level", "0.25", "--grid", "0.08"],
        0,
    );
}

#[test]
fn golden_classify() {
    check(
        "classify",
        &["classify", "--model", "$F/quadrants.json", "--direction", "0,1"],
        0,
    );
}

#[test]
fn golden_characterize() {
    check("characterize", &["characterize", "--germ", "$F/quadrants_germ.json"], 0);
}

#[test]
fn golden_sector_aura() {
    check("sector-aura", &["sector-aura", "--model", "$F/quadrants.json"], 0);
}

#[test]
fn golden_singular() {
    check(
        "singular",
        &["singular", "--fn", "$F/square.json", "--part", "g", "--eps", "0.5", "--box", "-2,-2,2,2"],
        0,
    );
}

#[test]
fn golden_zero_cover() {
    check(
        "zero-cover",
        &["zero-cover", "--fn", "$F/square.json", "--eps", "0.5", "--box", "-3,-3,3,3"],
        0,
    );
}

#[test]
fn golden_boundary_cover() {
    check(
        "boundary-cover",
        &["boundary-cover", "--fn", "$F/square.json", "--box", "-3,-3,3,3"],
        0,
    );
}

#[test]
fn golden_fractal_gen() {
    check("fractal-gen", &["fractal-gen", "--alpha-deg", "18", "--depth", "4"], 0);
}

#[test]
fn golden_fractal_check() {
    check(
        "fractal-check",
        &["fractal-check", "--alpha-deg", "18", "--depth", "6", "--grid", "0.02", "--shell", "0.05,0.2"],
        0,
    );
}

#[test]
fn golden_fractal_dim() {
    check("fractal-dim", &["fractal-dim", "--alpha-deg", "18"], 0);
}

#[test]
fn threads_flag_is_output_invariant() {
    let argv = |threads: Option<&str>| {
        let mut v = vec![
            "wdc".to_string(),
            "fractal-check".to_string(),
            "--alpha-deg".into(),
            "18".into(),
            "--depth".into(),
            "6".into(),
            "--grid".into(),
            "0.02".into(),
            "--shell".into(),
            "0.05,0.2".into(),
        ];
        if let Some(t) = threads {
            v.push("--threads".into());
            v.push(t.into());
        }
        v
    };
    let (c1, o1) = wdc_cli::execute(argv(None));
    let (c2, o2) = wdc_cli::execute(argv(Some("2")));
    let (c3, o3) = wdc_cli::execute(argv(Some("1")));
    assert_eq!(c1, 0);
    assert_eq!((c1, &o1), (c2, &o2));
    assert_eq!((c1, &o1), (c3, &o3));
}

#[test]
fn svg_exports_render() {
    let fix = fixtures();
    let svg_path = fix.join("trace.svg");
    let (code, _) = wdc_cli::execute([
        "wdc",
        "retract",
        "--fn",
        fix.join("square.json").to_str().unwrap(),
        "--start",
        "2,0",
        "--eps",
        "0.7",
        "--out",
        svg_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let svg = fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));

    let sector_svg = fix.join("sectors.svg");
    let (code, _) = wdc_cli::execute([
        "wdc",
        "sector-aura",
        "--model",
        fix.join("quadrants.json").to_str().unwrap(),
        "--svg",
        sector_svg.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(fs::read_to_string(&sector_svg).unwrap().contains("polyline"));
}

#[test]
fn sidecar_roundtrips() {
    // --out sidecars parse back through the schema layer
    let fix = fixtures();
    let out = fix.join("margin_report.json");
    let (code, _) = wdc_cli::execute([
        "wdc",
        "check-aura",
        "--fn",
        fix.join("square.json").to_str().unwrap(),
        "--level",
        "0",
        "--eps",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&out).unwrap();
    let report: wdc::aura::AuraReport = schema::report_from_json(&text, "aura").unwrap();
    assert!((report.margin - 0.5f64.sqrt()).abs() < 1e-12);
}
