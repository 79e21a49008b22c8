mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hermite_g1::continuity::measure_normal_deviation_along_boundary;
use hermite_g1::io::{load_network_json, parse_obj, save_network_json, NetworkInput};
use hermite_g1::mesh::{edge_topology, tessellate_network, weld, WELD_TOL};
use hermite_g1::network::{build_network, CornerRecord, NetworkOptions, NormalSource};
use hermite_g1::{demo_cube, ExecutionMode, TriangleMesh, Vec3};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hermite-g1"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn cube_json() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/cube.json")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_input(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// Five quads around a valence-5 centre, lifted into a shallow dome.
fn pentagon_star() -> NetworkInput {
    let mut corners = vec![CornerRecord::new(Vec3::new(0.0, 0.0, 0.6))];
    for i in 0..5 {
        let a = i as f64 * std::f64::consts::TAU / 5.0;
        let h = a + std::f64::consts::TAU / 10.0;
        corners.push(CornerRecord::new(Vec3::new(a.cos(), a.sin(), 0.3)));
        corners.push(CornerRecord::new(Vec3::new(
            1.6 * h.cos(),
            1.6 * h.sin(),
            0.0,
        )));
    }
    let spoke = |i: usize| 1 + 2 * (i % 5);
    let faces = (0..5)
        .map(|i| [0, spoke(i), spoke(i) + 1, spoke(i + 1)])
        .collect();
    NetworkInput {
        corners,
        faces,
        options: NetworkOptions::default(),
    }
}

#[test]
fn demo_cube_cli_counts_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.obj");
    let b = dir.path().join("b.obj");
    let out = run(&["demo-cube", "--out", a.to_str().unwrap(), "--res", "16"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("invariants: PASS"));
    assert!(stdout.contains("sphericity"));

    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(
        text.lines().filter(|l| l.starts_with("v ")).count(),
        6 * 17 * 17
    );
    assert_eq!(
        text.lines().filter(|l| l.starts_with("vn ")).count(),
        6 * 17 * 17
    );
    assert_eq!(
        text.lines().filter(|l| l.starts_with("f ")).count(),
        6 * 2 * 16 * 16
    );

    let out = run(&[
        "--parallel",
        "demo-cube",
        "--out",
        b.to_str().unwrap(),
        "--res",
        "16",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn demo_cube_welded_and_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.obj");
    let out = run(&[
        "--json-report",
        "demo-cube",
        "--out",
        path.to_str().unwrap(),
        "--res",
        "15",
        "--weld",
        "--twist",
        "adini",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["report"]["passed"], true);
    assert_eq!(report["topology"]["boundary_edges"], 0);
    assert_eq!(
        report["sphericity"]["mid_face_rel_deviation"]
            .as_array()
            .unwrap()
            .len(),
        6
    );

    let mesh = parse_obj(&std::fs::read_to_string(&path).unwrap()).unwrap();
    // 6 face interiors, 12 edge interiors, 8 corners
    assert_eq!(mesh.vertices.len(), 6 * 14 * 14 + 12 * 14 + 8);
    assert!(edge_topology(&mesh).is_watertight());
}

#[test]
fn verify_shipped_cube() {
    let out = run(&["verify", "--in", cube_json().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        stdout.lines().filter(|l| l.starts_with("corner")).count(),
        8
    );
    assert_eq!(stdout.lines().filter(|l| l.starts_with("edge")).count(), 12);
}

#[test]
fn shipped_cube_matches_demo() {
    let input = load_network_json(&cube_json()).unwrap();
    let net = input.build().unwrap();
    let demo = demo_cube(1.0);
    assert_eq!(net.corners(), demo.corners());
    assert_eq!(net.faces(), demo.faces());
    assert_eq!(input.options.normal_source, NormalSource::Prescribed);
    let a = net.solve(&input.options).unwrap();
    let b = demo.solve(&NetworkOptions::default()).unwrap();
    assert_eq!(a.patches, b.patches);
}

#[test]
fn eval_reproduces_corner() {
    let out = run(&[
        "--json-report",
        "eval",
        "--in",
        cube_json().to_str().unwrap(),
        "--face",
        "0",
        "--u",
        "0",
        "--v",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let pos: Vec<f64> = serde_json::from_value(v["position"].clone()).unwrap();
    assert_eq!(pos, vec![-1.0, -1.0, -1.0]);
    let n: Vec<f64> = serde_json::from_value(v["normal"].clone()).unwrap();
    let expect = -1.0 / 3f64.sqrt();
    assert!(n.iter().all(|c| (c - expect).abs() < 1e-15));

    let out = run(&[
        "eval",
        "--in",
        cube_json().to_str().unwrap(),
        "--face",
        "6",
        "--u",
        "0",
        "--v",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error[usage]:"));
}

#[test]
fn input_errors_exit_2_with_category() {
    let dir = tempfile::tempdir().unwrap();
    let quad = r#"{"corners": [{"position": [0,0,0]}, {"position": [1,0,0]}, {"position": [1,1,0]}, {"position": [0,1,0]}], "faces": FACES}"#;
    let cases = [
        ("schema", quad.replace("FACES", "[[0, 1, 2]]")),
        ("parse", quad.replace("FACES", "[[0, 1, 2, 3]")),
        ("network", quad.replace("FACES", "[[0, 1, 2, 4]]")),
    ];
    for (category, text) in cases {
        let p = write_input(dir.path(), &format!("{category}.json"), &text);
        let out = run(&["verify", "--in", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{category}");
        let err = stderr(&out);
        assert!(err.starts_with(&format!("error[{category}]:")), "{err}");
        assert_eq!(err.lines().count(), 1);
    }
    let out = run(&[
        "verify",
        "--in",
        dir.path().join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error[io]:"));

    // prescribed policy without normals fails while solving
    let text = quad.replace(
        "FACES",
        r#"[[0, 1, 2, 3]], "options": {"normal_policy": "prescribed"}"#,
    );
    let p = write_input(dir.path(), "solve.json", &text);
    let out = run(&["verify", "--in", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error[solve]:"));
}

#[test]
fn solve_exports_reimportable_obj() {
    let dir = tempfile::tempdir().unwrap();
    let input = pentagon_star();
    let json = dir.path().join("star.json");
    save_network_json(&input, &json).unwrap();
    let obj = dir.path().join("star.obj");
    let out = run(&[
        "solve",
        "--in",
        json.to_str().unwrap(),
        "--out",
        obj.to_str().unwrap(),
        "--res",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let mesh = parse_obj(&std::fs::read_to_string(&obj).unwrap()).unwrap();
    assert_eq!(mesh.vertices.len(), 5 * 49);
    assert_eq!(mesh.triangles.len(), 5 * 72);
    mesh.validate().unwrap();

    let solved = input.build().unwrap().solve(&input.options).unwrap();
    let tess = tessellate_network(&solved, 6, ExecutionMode::Sequential).unwrap();
    let expected = TriangleMesh::merged(tess.iter().map(|t| &t.mesh));
    assert_eq!(mesh.triangles, expected.triangles);
    for (got, want) in mesh.vertices.iter().zip(&expected.vertices) {
        for k in 0..3 {
            // nine significant digits
            assert!(
                (got[k] - want[k]).abs() <= 5e-9 * want[k].abs().max(1e-300) + 1e-300,
                "{got} vs {want}"
            );
        }
    }

    let out = run(&["verify", "--in", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn valence_five_star() {
    let input = pentagon_star();
    let net = input.build().unwrap();
    assert_eq!(net.valence(0), 5);
    assert_eq!(net.shared_edges().count(), 5);
    assert!(net
        .shared_edges()
        .all(|e| e.consistently_oriented() == Some(true)));
    for options in [
        NetworkOptions::default(),
        NetworkOptions {
            normal_source: NormalSource::FirstSlot,
            ..Default::default()
        },
        NetworkOptions {
            rescale: true,
            twist: hermite_g1::TwistPolicy::Adini,
            ..Default::default()
        },
    ] {
        let solved = net.solve(&options).unwrap();
        let report = solved.verify(33, ExecutionMode::Parallel);
        assert!(report.passed, "{report:?}");
        let centre = report.corners.iter().find(|c| c.corner == 0).unwrap();
        assert_eq!(centre.residuals.slots.len(), 5);

        let tess = tessellate_network(&solved, 8, ExecutionMode::Parallel).unwrap();
        let welded = weld(
            &TriangleMesh::merged(tess.iter().map(|t| &t.mesh)),
            WELD_TOL,
        );
        let topo = edge_topology(&welded);
        assert_eq!(topo.boundary_edges, 10 * 8);
        assert_eq!(topo.non_manifold_edges + topo.inconsistent_edges, 0);
    }
}

#[test]
fn cube_normal_deviation_vanishes_at_corners_only() {
    let solved = demo_cube(1.0).solve(&NetworkOptions::default()).unwrap();
    for e in solved.network.shared_edges() {
        let (a, b) = (e.uses[0], e.uses[1]);
        let r = measure_normal_deviation_along_boundary(
            &solved.patches[a.face],
            a.side,
            &solved.patches[b.face],
            b.side,
            e.reversed().unwrap(),
            17,
        );
        assert!(r.degenerate.is_empty());
        let (first, last) = (r.angles[0], r.angles[16]);
        assert!(first.1 <= 1e-10 && last.1 <= 1e-10, "{first:?} {last:?}");
        assert!(r.angles[8].1 > 1e-3, "mid-edge angle {}", r.angles[8].1);
    }
}

#[test]
fn two_quads_from_json() {
    let corners = [
        (0.0, 0.0),
        (1.0, 0.0),
        (2.0, 0.0),
        (0.0, 1.0),
        (1.0, 1.0),
        (2.0, 1.0),
    ]
    .map(|(x, y)| CornerRecord::new(Vec3::new(x, y, 0.0)))
    .to_vec();
    // second face starts on the far side, so the shared side runs backwards
    let net = build_network(corners, vec![[0, 1, 4, 3], [5, 4, 1, 2]]).unwrap();
    let shared: Vec<_> = net.shared_edges().collect();
    assert_eq!(shared.len(), 1);
    assert_eq!(shared[0].reversed(), Some(true));
    let report = net
        .solve(&NetworkOptions::default())
        .unwrap()
        .verify(33, ExecutionMode::Sequential);
    assert!(report.passed);
    assert!(report.edges[0].c0_gap <= 1e-12);
    assert!(report.edges[0].max_normal_angle <= 1e-10);
}
