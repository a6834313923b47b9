"""
Certificates

Evaluates every recovery certificate for a head profile and shows the
lemma-level quantities next to the verdicts.
"""

import pandas as pd
import streamlit as st

from greedcert.certificates import SignalProfile, certify_all
from greedcert.errors import GreedCertError
from greedcert.solvers import Variant
from greedcert.ui import add_logo, csv_download, load_css, report_frame, status_badge, verdict_status

load_css()
add_logo()

st.title("Certificates")

with st.form("profile"):
    col1, col2 = st.columns(2)
    with col1:
        k = st.number_input("k", min_value=1, max_value=64, value=3)
        mu = st.number_input("mu", min_value=0.0, max_value=1.0, value=0.2, format="%.6f")
        head = st.text_input("Head magnitudes (largest first)", value="9,3,1")
        variant = st.selectbox("Variant", [v.value for v in Variant])
    with col2:
        eps = st.number_input("Noise budget", min_value=0.0, value=0.0, format="%.4f")
        tail = st.number_input("Tail l1 norm", min_value=0.0, value=0.0, format="%.4f")
        g = st.number_input("Atoms already selected (g)", min_value=0, value=0)
        p = st.number_input("p (0 = default)", min_value=0, value=0)
    submitted = st.form_submit_button("Evaluate")

if submitted:
    try:
        profile = SignalProfile.from_values([float(v) for v in head.split(",")], k=int(k), tail_l1=tail,
                                            noise_budget=eps, selected_prefix=int(g))
        report = certify_all(profile, float(mu), Variant(variant), p=int(p) or None)
    except (GreedCertError, ValueError) as e:
        st.error(f"Invalid profile: {e}")
    else:
        frame = report_frame(report)
        for tid, verdict in report.verdicts.items():
            cols = st.columns([1, 3])
            with cols[0]:
                status_badge(tid, verdict_status(verdict))
            with cols[1]:
                st.write(verdict.reason or "all inequalities hold strictly")
        st.dataframe(frame)
        csv_download(frame, "certificates.csv")

        st.subheader("Quantities")
        q = report.quantities
        st.dataframe(pd.DataFrame({"g": range(int(k)), "alpha_g": q["alpha_g"], "mu_g": q["mu_g"]}))
        st.write(f"gamma_k = {q['gamma_k']}, rho = {q['rho']:.6f}")
        if q["mu_i_star"]:
            st.dataframe(pd.DataFrame({"i": range(1, len(q["mu_i_star"]) + 1), "mu_i_star": q["mu_i_star"]}))
