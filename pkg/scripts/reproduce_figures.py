from pathlib import Path

from greedcert import config, experiments, store

OUT = Path(__file__).parent.parent / "results"
OUT.mkdir(exist_ok=True)

k = config.DEFAULT_K
print('Writing decay curves...')
curve = experiments.decay_constraint_curve(k, [1 / (2 * k), 1 / (2 * k - 1), 1 / (k + 1), 1 / k])
curve.to_csv(OUT / 'decay_curve.csv', index=False, lineterminator='\n')
print('Curve rows:', len(curve))

print('Running probability experiment (k=%d, %d trials)...' % (k, config.DEFAULT_TRIALS))
grid = experiments.default_grid()
specs = [experiments.DistributionSpec(f) for f in experiments.FAMILY_ORDER]
result = experiments.run_experiment(k, grid, config.DEFAULT_TRIALS, seed=0, specs=specs)
experiments.emit_csv(result, OUT / 'probabilities.csv')
manifest = experiments.build_manifest(k, grid, config.DEFAULT_TRIALS, 0, specs)
experiments.write_manifest(manifest, OUT / 'probabilities.json')
print('Probability rows:', len(result.rows))

run_id = store.save_experiment(result, manifest)
print('Saved run', run_id, 'to', config.get_store_path())
