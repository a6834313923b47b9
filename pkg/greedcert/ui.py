"""
Shared utilities for the explorer pages: styles, cards, badges and tables
"""

from pathlib import Path
from typing import Optional

import pandas as pd
import streamlit as st

from greedcert.certificates import CertificateReport, Verdict
from greedcert.solvers import RunTrace

STYLES = Path(__file__).parent.parent / "styles" / "main.css"


def load_css(css_file: Optional[Path] = None):
    """Load and inject custom CSS"""
    with open(css_file or STYLES) as f:
        st.markdown(f'<style>{f.read()}</style>', unsafe_allow_html=True)


def custom_card(content):
    """Render content in a custom styled card"""
    return st.markdown(f'''
        <div class="greedcert-card">
            {content}
        </div>
    ''', unsafe_allow_html=True)


def verdict_status(verdict: Verdict) -> str:
    if verdict.passed:
        return "pass"
    return "boundary" if verdict.boundary else "fail"


def status_badge(text, status):
    """Render a colored pass / fail / boundary badge"""
    status_class = {
        "pass": "status-pass",
        "fail": "status-fail",
        "boundary": "status-boundary",
    }.get(status.lower(), "")
    return st.markdown(f'''
        <span class="status-badge {status_class}">
            {text}
        </span>
    ''', unsafe_allow_html=True)


def add_logo():
    """Add a small brand block in the sidebar"""
    st.sidebar.markdown('''
        <div style="text-align: center; margin-bottom: 20px;">
            <h3>greedcert</h3>
            <p style="color: #666;">OMP / OLS recovery certificates</p>
        </div>
    ''', unsafe_allow_html=True)


def report_frame(report: CertificateReport) -> pd.DataFrame:
    """One row per certificate id."""
    records = []
    for tid, verdict in report.verdicts.items():
        records.append({
            "certificate": tid,
            "status": verdict_status(verdict),
            "binding_index": verdict.binding_index,
            "mu_star": verdict.mu_star,
            "branch": verdict.branch,
            "reason": verdict.reason,
        })
    return pd.DataFrame.from_records(records)


def trace_frame(trace: RunTrace) -> pd.DataFrame:
    """One row per iteration: selection, ties, residual and the best scores."""
    records = []
    for step in trace.steps:
        ranked = sorted(step.scores.items(), key=lambda item: -item[1])[:3]
        records.append({
            "g": step.iteration,
            "selected": step.selected,
            "tie_set": ", ".join(str(i) for i in step.tie_set),
            "residual_norm": step.residual_norm,
            "top_scores": ", ".join(f"{i}: {s:.4g}" for i, s in ranked),
        })
    return pd.DataFrame.from_records(records)


def csv_download(frame: pd.DataFrame, file_name: str, label: str = "Download CSV"):
    csv = frame.to_csv(index=False).encode('utf-8')
    st.download_button(label, data=csv, file_name=file_name, mime='text/csv')
