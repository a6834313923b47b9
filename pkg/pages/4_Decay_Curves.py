"""
Decay Curves

Decay factor 2mu(k-i)/(1-i mu) for i = 1..k-1 at several coherences.
"""

import streamlit as st

from greedcert import config
from greedcert.errors import GreedCertError
from greedcert.experiments import decay_constraint_curve, landmark_coherences
from greedcert.ui import add_logo, csv_download, load_css

load_css()
add_logo()

st.title("Decay constraint curves")
st.write("A sorted coefficient vector meets the noiseless decay condition when every ratio "
         "|x_i| / |x_{i+1}| exceeds the factor listed for its position.")

k = int(st.number_input("k", min_value=2, max_value=64, value=config.DEFAULT_K))
mus = st.text_input("Coherences", value=landmark_coherences(k))

try:
    frame = decay_constraint_curve(k, [float(v) for v in mus.split(",") if v.strip()])
except (GreedCertError, ValueError) as e:
    st.error(str(e))
else:
    st.dataframe(frame.pivot(index="i", columns="mu", values="factor"))
    csv_download(frame, "decay_curve.csv")
