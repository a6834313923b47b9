"""
Solver Trace

- Upload a header-less CSV dictionary and a data vector, or use the adversarial instance
- Runs OMP or OLS and lists every step with its tie set and residual
"""

import io

import numpy as np
import pandas as pd
import streamlit as st

from greedcert import adversarial, config
from greedcert.errors import GreedCertError
from greedcert.linalg import normalize_columns
from greedcert.solvers import SolverConfig, TiePolicy, Variant, coefficients, run_oxx
from greedcert.ui import add_logo, csv_download, load_css, trace_frame

load_css()
add_logo()

st.title("Solver Trace")
st.write("Run OMP or OLS and inspect every selection.")

# Sidebar settings
st.sidebar.header("Solver")
variant = st.sidebar.selectbox("Variant", [v.value for v in Variant])
policy = st.sidebar.selectbox("Tie policy", [p.value for p in TiePolicy])
tie_tol = st.sidebar.number_input("Tie tolerance", value=config.TIE_TOL, format="%.1e")

source = st.radio("Dictionary", ["Adversarial instance", "Upload CSV"], horizontal=True)


def read_csv_upload(upload):
    return pd.read_csv(io.BytesIO(upload.getvalue()), header=None).to_numpy(dtype=float)


d = None
y = None
iterations = 1
if source == "Adversarial instance":
    k = st.number_input("k", min_value=1, max_value=12, value=3)
    mu = st.number_input("mu", min_value=0.001, max_value=1.0, value=0.25, format="%.4f")
    coeffs = st.text_input("Coefficients on atoms 0..k-1", value=",".join(str(k - i) for i in range(k)))
    try:
        instance = adversarial.build_dictionary(int(k), float(mu))
        x = np.zeros(int(k) + 1)
        x[: int(k)] = [float(v) for v in coeffs.split(",")]
        d = instance.dictionary
        y = d.atoms @ x
        iterations = int(k)
    except (GreedCertError, ValueError) as e:
        st.error(f"Could not build the instance: {e}")
else:
    dict_file = st.file_uploader("Dictionary CSV (columns are atoms)", type="csv")
    y_file = st.file_uploader("Data vector CSV", type="csv")
    if dict_file and y_file:
        try:
            d = normalize_columns(read_csv_upload(dict_file))
            y = read_csv_upload(y_file).reshape(-1)
        except (GreedCertError, ValueError) as e:
            st.error(f"Could not read the inputs: {e}")
    if d is not None:
        iterations = st.number_input("Iterations", min_value=1, max_value=min(d.m, d.n), value=1)

if d is not None and y is not None:
    try:
        trace = run_oxx(d, y, SolverConfig(Variant(variant), int(iterations), float(tie_tol), TiePolicy(policy)))
    except GreedCertError as e:
        st.error(str(e))
    else:
        st.write(f"Coherence: **{d.coherence:.6f}**, stop reason: **{trace.stop_reason}**")
        frame = trace_frame(trace)
        st.dataframe(frame)
        csv_download(frame, "trace.csv", "Download trace CSV")
        with st.expander("Least-squares coefficients on the selected atoms"):
            x_hat = coefficients(d, y, trace.final_active_set)
            st.dataframe(pd.DataFrame({"atom": range(d.n), "coefficient": x_hat}))
