"""
Adversarial

Builds the equiangular worst-case dictionary, checks the exact projected
correlations and replays both converse demonstrations.
"""

import pandas as pd
import streamlit as st

from greedcert import adversarial, config
from greedcert.errors import ConstructionFailed, GreedCertError
from greedcert.solvers import Variant
from greedcert.ui import add_logo, csv_download, load_css, status_badge

load_css()
add_logo()

st.title("Adversarial instances")

st.sidebar.header("Instance")
k = int(st.sidebar.number_input("k", min_value=1, max_value=12, value=3))
variant = Variant(st.sidebar.selectbox("Variant", [v.value for v in Variant]))


def steps_frame(report):
    rows = []
    for step in report.steps:
        rows.append({
            "g": step["g"],
            "active_set": ", ".join(str(i) for i in step["active_set"]),
            "tie_set": ", ".join(str(i) for i in step["tie_set"]),
            "scores": ", ".join(f"{i}: {s:.6g}" for i, s in step["scores"].items()),
        })
    return pd.DataFrame(rows)


# -----------------------------
# Exact correlations
# -----------------------------
st.subheader("Projected correlations")
mu = st.number_input("mu", min_value=0.001, max_value=1.0 / k, value=1.0 / k, format="%.6f")
try:
    instance = adversarial.build_dictionary(k, float(mu))
    rows = [adversarial.verify_lemma5(instance, range(g), variant) for g in range(k)]
    st.dataframe(pd.DataFrame(rows))
    with st.expander("Dictionary"):
        atoms = pd.DataFrame(instance.dictionary.atoms)
        st.dataframe(atoms)
        csv_download(atoms, "adversarial_dictionary.csv", "Download dictionary CSV")
except GreedCertError as e:
    st.error(str(e))

# -----------------------------
# Converse demonstrations
# -----------------------------
st.markdown("---")
st.subheader("Ties at the boundary")
mode = st.radio("Construction", ["mu = 1/k, any coefficients", "mu = 1/(2k-j), x^(j)"])
j = None
slack = config.DEFAULT_SLACK
if mode.startswith("mu = 1/(2k"):
    if k < 2:
        st.info("This construction needs k >= 2.")
        st.stop()
    j = int(st.number_input("j", min_value=1, max_value=k - 1, value=k - 1))
    slack = st.number_input("slack", min_value=1.01, value=config.DEFAULT_SLACK)

if st.button("Replay"):
    try:
        if j is None:
            report = adversarial.demonstrate_converse_k(k, variant=variant)
        else:
            report = adversarial.demonstrate_converse_j(k, j, float(slack), variant)
    except ConstructionFailed as e:
        status_badge("no tie", "fail")
        st.error(str(e))
    else:
        status_badge(report.verdict, "boundary")
        st.write(f"mu = {report.mu:.6f}, projected correlation deviation {report.max_lemma5_deviation:.2e}")
        st.dataframe(steps_frame(report))
