//! Deterministic scenes, queries and runs used by the tests, the benchmark
//! command and the FFI examples.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fol::{normalize, parse_query, Atom, ConjunctiveQuery, Variable};
use crate::geometry::{GsdMetadata, OrientedBox};
use crate::inference::Scene;
use crate::retrieval::{Corpus, GroundTruth, RankedEntry, RankedRun};
use crate::vocab::Vocabulary;

/// Camera parameters of the quadcopter flood imagery.
pub const FLOOD_CAMERA: GsdMetadata = GsdMetadata::Camera {
    flight_altitude_m: 60.96,
    sensor_width_mm: 6.16,
    sensor_height_mm: 4.55,
    focal_length_mm: 5.0,
    image_width_px: 4000.0,
    image_height_px: 3000.0,
};

/// Four planes with confidences .90/.85/.70/.70 at x = 50/90/40/80.
pub fn plane_scene() -> Scene {
    let mut s = Scene::new("planes");
    for (c, x) in [(0.90, 50.0), (0.85, 90.0), (0.70, 40.0), (0.70, 80.0)] {
        s.push("plane", c, OrientedBox::axis_aligned(x, 100.0, 12.0, 12.0));
    }
    s
}

pub fn plane_query() -> ConjunctiveQuery {
    normalize(&parse_query("plane(A) AND plane(B) AND left_of(A, B)").unwrap(), &Vocabulary::dota()).unwrap()
}

/// 100 detections: 10 bridges, 5 storage tanks, 10 ships, 4 harbors, one
/// each of roundabout, tennis court and swimming pool, and 68 others.
pub fn hypothesis_scene() -> Scene {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut labels: Vec<&str> = Vec::new();
    for (label, n) in [
        ("bridge", 10),
        ("storage_tank", 5),
        ("ship", 10),
        ("harbor", 4),
        ("roundabout", 1),
        ("tennis_court", 1),
        ("swimming_pool", 1),
        ("car", 30),
        ("truck", 20),
        ("plane", 10),
        ("vehicle", 8),
    ] {
        labels.extend(std::iter::repeat_n(label, n));
    }
    let mut s = Scene::new("hundred");
    for (i, label) in labels.into_iter().enumerate() {
        let (gx, gy) = ((i % 10) as f64, (i / 10) as f64);
        let obb = OrientedBox::new(gx * 60.0 + 30.0, gy * 60.0 + 30.0, 20.0, 12.0, rng.random_range(-PI..PI)).unwrap();
        s.push(label, rng.random_range(0.3..1.0), obb);
    }
    s
}

/// Ten variables in three clause groups with candidate products 10x5x1,
/// 10x10x10x1 and 4x4x1 on [`hypothesis_scene`].
pub fn hypothesis_query() -> ConjunctiveQuery {
    let text = "bridge(a) AND storage_tank(b) AND roundabout(c) AND left_of(a, b) AND is_close(b, c) AND \
                ship(d) AND ship(e) AND ship(f) AND tennis_court(g) AND is_close(d, e) AND is_close(e, f) AND is_close(f, g) AND \
                harbor(h) AND harbor(i) AND swimming_pool(j) AND is_close(h, i) AND is_close(i, j)";
    normalize(&parse_query(text).unwrap(), &Vocabulary::dota()).unwrap()
}

const RANDOM_CLASSES: [&str; 3] = ["ship", "car", "plane"];
const RANDOM_RELATIONS: [&str; 16] = [
    "is_close", "left_of", "right_of", "is_above", "is_below", "is_different", "facing_same", "facing_opposite", "DC",
    "EC", "PO", "TPP", "NTPP", "EQ", "TPPI", "NTPPI",
];

/// A scene of up to `max_detections` boxes on a coarse grid, so that ties,
/// touching boxes and containment occur often.
pub fn random_scene(rng: &mut impl Rng, id: &str, max_detections: usize) -> Scene {
    let mut s = Scene::new(id).with_gsd(GsdMetadata::Direct { gsd_w_m_per_px: 0.1, gsd_h_m_per_px: 0.12 });
    let n = rng.random_range(0..=max_detections);
    for _ in 0..n {
        let cx = rng.random_range(0..=12) as f64 * 5.0;
        let cy = rng.random_range(0..=12) as f64 * 5.0;
        let w = [4.0, 10.0, 20.0][rng.random_range(0..3)];
        let h = [4.0, 10.0, 20.0][rng.random_range(0..3)];
        let theta = match rng.random_range(0..3) {
            0 => 0.0,
            1 => PI / 2.0,
            _ => rng.random_range(-PI..PI),
        };
        let label = RANDOM_CLASSES[rng.random_range(0..RANDOM_CLASSES.len())];
        let conf = (rng.random_range(0..=20) as f64) / 20.0;
        s.push(label, conf, OrientedBox::new(cx, cy, w, h, theta).unwrap());
    }
    s
}

/// A normalized query with up to `max_vars` variables and `max_atoms` atoms
/// mixing directional, closeness, orientation, topological, metric and
/// isolation atoms.
pub fn random_query(rng: &mut impl Rng, max_vars: usize, max_atoms: usize) -> ConjunctiveQuery {
    let m = rng.random_range(1..=max_vars.min(max_atoms));
    let vars: Vec<String> = (0..m).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let mut atoms: Vec<Atom> = vars
        .iter()
        .map(|v| Atom::unary(RANDOM_CLASSES[rng.random_range(0..RANDOM_CLASSES.len())], v))
        .collect();
    let extra = rng.random_range(0..=max_atoms - m);
    for _ in 0..extra {
        let a = &vars[rng.random_range(0..m)];
        let b = &vars[rng.random_range(0..m)];
        let atom = match rng.random_range(0..10) {
            0 => Atom::Isolated { var: Variable::new(a) },
            1 => Atom::metric("is_square_meters", &[a], rng.random_range(1..=8) as f64),
            2 if a != b => Atom::metric("is_close_meters", &[a, b], rng.random_range(1..=6) as f64),
            _ if a != b => Atom::binary(RANDOM_RELATIONS[rng.random_range(0..RANDOM_RELATIONS.len())], a, b),
            _ => continue,
        };
        if !atoms.contains(&atom) {
            atoms.push(atom);
        }
    }
    normalize(&ConjunctiveQuery::new(atoms).unwrap(), &Vocabulary::dota()).unwrap()
}

/// Seeded pairs of random scenes and queries.
pub fn random_instances(seed: u64, count: usize) -> Vec<(Scene, ConjunctiveQuery)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let scene = random_scene(&mut rng, &format!("r{i}"), 6);
            let query = random_query(&mut rng, 4, 5);
            (scene, query)
        })
        .collect()
}

/// Twenty flood scenes. `flood_pos_*` have a building whose box shares an
/// edge with a flooded-road box; `flood_neg_*` do not.
pub fn flood_corpus() -> Corpus {
    let mut scenes = Vec::new();
    for i in 0..10 {
        let mut s = Scene::new(format!("flood_pos_{i:02}")).with_gsd(FLOOD_CAMERA);
        let (bw, bh) = (200.0 + 10.0 * i as f64, 150.0);
        s.push("building", 0.6 + 0.03 * i as f64, OrientedBox::axis_aligned(1000.0, 1000.0, bw, bh));
        let (rw, rh) = (400.0, 120.0 + 20.0 * i as f64);
        // road directly below the building, touching its bottom edge
        s.push("road_flooded", 0.7, OrientedBox::axis_aligned(1000.0, 1000.0 + bh / 2.0 + rh / 2.0, rw, rh));
        s.push("road_flooded", 0.5, OrientedBox::axis_aligned(3000.0, 2500.0, 300.0 + 5.0 * i as f64, 80.0));
        scenes.push(s);
    }
    for i in 0..10 {
        let mut s = Scene::new(format!("flood_neg_{i:02}")).with_gsd(FLOOD_CAMERA);
        s.push("building", 0.95, OrientedBox::axis_aligned(1000.0, 1000.0, 200.0, 150.0));
        match i % 3 {
            // road far away
            0 => {
                s.push("road_flooded", 0.9, OrientedBox::axis_aligned(2500.0, 2000.0, 400.0, 100.0 + 10.0 * i as f64));
            }
            // road overlapping the building
            1 => {
                s.push("road_flooded", 0.9, OrientedBox::axis_aligned(1050.0, 1000.0, 400.0, 100.0 + 10.0 * i as f64));
            }
            // no flooded road at all
            _ => {
                s.push("building", 0.9, OrientedBox::axis_aligned(1000.0, 1075.0 + 60.0, 200.0, 120.0));
            }
        }
        scenes.push(s);
    }
    Corpus::from_scenes(scenes).unwrap()
}

pub fn flood_query() -> ConjunctiveQuery {
    normalize(
        &parse_query("building(a) AND road_flooded(b) AND externally_connected(a, b)").unwrap(),
        &Vocabulary::flood(),
    )
    .unwrap()
}

fn run(query_id: &str, ids: &[&str]) -> RankedRun {
    let n = ids.len() as f64;
    RankedRun {
        query_id: query_id.into(),
        query: "ship(a)".into(),
        level: None,
        floor: 0.05,
        ranking: ids
            .iter()
            .enumerate()
            .map(|(i, id)| RankedEntry { image_id: id.to_string(), probability: (n - i as f64) / n })
            .collect(),
        witnesses: BTreeMap::new(),
    }
}

fn set(ids: &[&str]) -> BTreeSet<String> {
    ids.iter().map(|s| s.to_string()).collect()
}

/// Three queries over ten images `i0..i9`, at levels 1, 2 and 3.
pub fn metrics_runs() -> (Vec<RankedRun>, GroundTruth) {
    let runs = vec![
        run("q1", &["i0", "i1", "i5", "i2", "i3", "i4", "i6", "i7", "i8", "i9"]),
        run("q2", &["i0", "i1", "i2", "i3", "i5", "i6", "i4", "i7", "i8", "i9"]),
        run("q3", &["i1", "i7", "i8", "i0", "i2", "i3", "i4", "i5", "i6", "i9"]),
    ];
    let gt = GroundTruth {
        relevant: BTreeMap::from([
            ("q1".to_string(), set(&["i0", "i1", "i2", "i3", "i9"])),
            ("q2".to_string(), set(&["i4"])),
            ("q3".to_string(), set(&["i7", "i8"])),
        ]),
        complexity_level: BTreeMap::from([("q1".to_string(), 1), ("q2".to_string(), 2), ("q3".to_string(), 3)]),
    };
    (runs, gt)
}

pub fn rrqc_levels() -> BTreeMap<u8, f64> {
    BTreeMap::from([(1, 0.5), (2, 0.4), (3, 0.3), (4, 0.2), (5, 0.1)])
}

/// Ten easy images (no difficult objects) of which nine are retrieved first
/// for their query, and five hard images of which three are.
pub fn rriu_fixture() -> (Vec<RankedRun>, GroundTruth, Corpus) {
    let mut scenes = Vec::new();
    let mut ids = Vec::new();
    for (prefix, n, hard) in [("easy", 10, 0u8), ("hard", 5, 1u8)] {
        for i in 0..n {
            let id = format!("{prefix}{i}");
            let mut s = Scene::new(id.clone());
            for j in 0..2 {
                let k = s.push("car", 0.9, OrientedBox::axis_aligned(j as f64 * 50.0, 0.0, 10.0, 5.0));
                s.detections[k].difficulty = hard;
            }
            scenes.push(s);
            ids.push(id);
        }
    }
    let missed: BTreeSet<&str> = ["easy9", "hard3", "hard4"].into();
    let mut runs = Vec::new();
    let mut gt = GroundTruth::default();
    for (n, id) in ids.iter().enumerate() {
        let qid = format!("q{n:02}");
        let mut order: Vec<&str> = ids.iter().map(String::as_str).filter(|x| x != id).collect();
        if missed.contains(id.as_str()) {
            order.push(id);
        } else {
            order.insert(0, id);
        }
        runs.push(run(&qid, &order));
        gt.relevant.insert(qid.clone(), set(&[id]));
        gt.complexity_level.insert(qid, 1);
    }
    (runs, gt, Corpus::from_scenes(scenes).unwrap())
}
