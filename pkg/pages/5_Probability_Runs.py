"""
Probability Runs

- Runs the decay-condition probability experiment for chosen families
- Saves runs to the SQLite store and lists earlier runs for download
"""

import streamlit as st

from greedcert import config, experiments, store
from greedcert.errors import GreedCertError
from greedcert.ui import add_logo, csv_download, load_css

load_css()
add_logo()

st.title("Probability of meeting the decay condition")

with st.form("experiment"):
    k = st.number_input("k", min_value=1, max_value=32, value=config.DEFAULT_K)
    trials = st.number_input("Trials per grid point", min_value=1, value=config.DEFAULT_TRIALS)
    grid_points = st.number_input("Grid points in (0, 1]", min_value=1, value=config.DEFAULT_GRID_POINTS)
    seed = st.number_input("Seed", min_value=0, value=0)
    families = st.multiselect("Families", [f.value for f in experiments.FAMILY_ORDER],
                              default=[f.value for f in experiments.FAMILY_ORDER])
    save = st.checkbox("Save to run store", value=True)
    submitted = st.form_submit_button("Run")

if submitted:
    specs = [experiments.DistributionSpec(experiments.Family(f)) for f in families]
    grid = experiments.default_grid(int(grid_points))
    with st.spinner("Sampling..."):
        result = experiments.run_experiment(int(k), grid, int(trials), int(seed), specs)
    frame = result.to_frame()
    st.dataframe(frame.pivot(index="k_mu", columns="distribution", values="probability"))
    csv_download(frame, "probabilities.csv")
    if save:
        try:
            manifest = experiments.build_manifest(int(k), grid, int(trials), int(seed), specs)
            run_id = store.save_experiment(result, manifest)
            st.success(f"Saved as run {run_id}")
        except GreedCertError as e:
            st.error(f"Could not save run: {e}")

# Stored runs
st.markdown("---")
st.subheader("Stored runs")

try:
    runs = store.list_runs(limit=50)
except GreedCertError as e:
    st.warning(f"Run store unavailable: {e}")
    runs = []

if runs:
    for run in runs:
        manifest = run["manifest"]
        with st.expander(f"Run {run['id']}: k={run['k']}, {manifest.get('trials')} trials, "
                         f"seed {manifest.get('seed')} ({run['created_at']})"):
            loaded = store.load_run(run["id"]).to_frame()
            st.dataframe(loaded)
            csv_download(loaded, f"run_{run['id']}.csv")
else:
    st.info("No runs stored yet.")
