"""
greedcert explorer: landing page
"""

import streamlit as st

from greedcert import config
from greedcert.certificates import certify_uniform
from greedcert.ui import add_logo, custom_card, load_css, status_badge, verdict_status

# -----------------------------
# Setup
# -----------------------------

st.set_page_config(
    page_title="greedcert explorer",
    layout="wide",
    initial_sidebar_state="expanded"
)

load_css()
add_logo()

PAGES = [
    ("Solver Trace", "Run OMP or OLS on a CSV dictionary and inspect every selection with its tie set."),
    ("Certificates", "Evaluate every coherence-and-decay certificate for a signal profile."),
    ("Adversarial", "Replay the equiangular constructions on which the conditions are tight."),
    ("Decay Curves", "Decay factors per (mu, i), downloadable as plot-ready CSV."),
    ("Probability Runs", "How often random coefficients meet the decay condition, with stored run history."),
]

# -----------------------------
# UI Layout
# -----------------------------

st.title("greedcert explorer")
st.write(
    "Orthogonal Matching Pursuit and Orthogonal Least Squares recover a k-sparse support "
    "when the dictionary coherence is small enough. The uniform budget mu < 1/(2k-1) "
    "ignores the coefficients; the decay-aware certificates trade coherence for decay."
)

with st.sidebar:
    st.header("Quick check")
    k = st.number_input("k", min_value=1, max_value=64, value=config.DEFAULT_K)
    mu = st.number_input("mu", min_value=0.0, max_value=1.0, value=0.1, step=0.01, format="%.4f")

col1, col2 = st.columns([2, 1])

with col1:
    st.subheader("Pages")
    for name, blurb in PAGES:
        custom_card(f"<b>{name}</b><br/>{blurb}")

with col2:
    st.subheader("Uniform budget")
    verdict = certify_uniform(int(k), float(mu))
    st.write(f"1/(2k-1) = {verdict.mu_star:.6f}")
    status_badge(verdict_status(verdict), verdict_status(verdict))

st.markdown("---")
st.caption(f"greedcert {config.TOOL_VERSION}. Browse the sections using the pages menu in the sidebar.")
