use criterion::{black_box, criterion_group, criterion_main, Criterion};
use mosearch::candidates::dbscan;
use mosearch::harness::{generate_scenario, GeneratorSpec};
use mosearch::nav::shortest_path;
use mosearch::planner::{plan, ActionKind};
use mosearch::{run_episode, AgentKind, AgentParams, CandidateSet, Cell, PlanAction, PlannerModel, Scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn scenario() -> Scenario {
    generate_scenario(&GeneratorSpec::default(), 2024, 0).unwrap()
}

fn raycast(c: &mut Criterion) {
    let s = scenario();
    c.bench_function("raycast/default sensor", |b| {
        b.iter(|| mosearch::sim::cast(black_box(&s.truth), &s.sensor, &s.robot_start))
    });
}

fn clustering(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let points: Vec<[f64; 2]> = (0..400)
        .map(|_| [rng.gen_range(0.0..40.0), rng.gen_range(0.0..40.0)])
        .collect();
    c.bench_function("dbscan/400 points", |b| b.iter(|| dbscan(black_box(&points), 3.0, 4)));
}

fn path(c: &mut Criterion) {
    let s = scenario();
    let free: Vec<Cell> = s.shape.cells().filter(|&c| s.truth.is_free(c)).collect();
    let (from, to) = (free[0], free[free.len() - 1]);
    c.bench_function("astar/corner to corner", |b| {
        b.iter(|| shortest_path(black_box(&s.truth), from, to, false))
    });
}

fn planning(c: &mut Criterion) {
    let points: Vec<Cell> = (0..6).map(|i| Cell::new(4 + 5 * i, 3 + 4 * (i % 3))).collect();
    let probs = vec![1.0 / 6.0; 6];
    let frontier = Some(Cell::new(30, 30));
    let belief = CandidateSet {
        points: points.clone(),
        probs,
        frontier,
    };
    let mut actions: Vec<PlanAction> = points
        .iter()
        .map(|&goal| PlanAction {
            goal,
            kind: ActionKind::Candidate,
        })
        .collect();
    actions.push(PlanAction {
        goal: Cell::new(30, 30),
        kind: ActionKind::Frontier,
    });
    let model = PlannerModel::default();
    c.bench_function("pouct/500 simulations", |b| {
        b.iter(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            plan(&belief, Cell::new(10, 10), &actions, &model, 0.5, &mut rng)
        })
    });
}

fn episode(c: &mut Criterion) {
    let s = scenario();
    let params = AgentParams::default();
    let mut group = c.benchmark_group("episode");
    group.sample_size(10);
    for kind in [AgentKind::Ovamos, AgentKind::GreedyMulti] {
        group.bench_function(kind.name(), |b| b.iter(|| run_episode(&s, kind, &params)));
    }
    group.finish();
}

criterion_group!(benches, raycast, clustering, path, planning, episode);
criterion_main!(benches);
