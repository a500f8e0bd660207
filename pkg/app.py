import glob
import os

import pandas as pd
import streamlit as st
from dotenv import load_dotenv

from experiments.metrics import aggregate, fuel_reduction, read_results

load_dotenv()
output_dir = os.getenv("MAMT_OUTPUT_DIR", "results")

HEAD_GREEN = "#8fd694"
FOLLOWER_GREEN = "#1b5e20"

# Configure the page
st.set_page_config(
    page_title="Maze Traversal Sweeps",
    page_icon="🧭",
    layout="wide",
)

st.markdown(
    f"""
    <style>
    .main-title {{
        font-size: 3rem;
        font-weight: 300;
        margin: 0;
        text-align: center;
        color: {FOLLOWER_GREEN};
    }}
    .stButton > button {{
        background-color: {HEAD_GREEN};
        border-radius: 4px;
        border: none;
    }}
    </style>
    """,
    unsafe_allow_html=True,
)

st.markdown('<h1 class="main-title">Maze Traversal Sweeps</h1>', unsafe_allow_html=True)

# Sidebar - pick a finished sweep
with st.sidebar:
    st.markdown("### How to Use")
    st.markdown("""Run a sweep first, then explore it here:

- `python cli.py batch --config data/sweeps/reference.cfg`
- pick the CSV below
- filter by maze size, strategy and solver
                """)
    found = sorted(glob.glob(os.path.join(output_dir, "*.csv")))
    uploaded = st.file_uploader("Or upload a sweep CSV", type="csv")
    chosen = st.selectbox("Sweep CSV", found) if found else None


@st.cache_data
def load(path_or_buffer):
    if isinstance(path_or_buffer, str):
        return read_results(path_or_buffer)
    return pd.read_csv(path_or_buffer)


if uploaded is not None:
    results = load(uploaded)
elif chosen:
    results = load(chosen)
else:
    results = None

if results is None:
    st.warning(f"No sweep CSV found in {output_dir}/. Run a batch or upload a file to continue.")
else:
    summary = aggregate(results)
    summary["maze"] = summary["maze_w"].astype(str) + "x" + summary["maze_h"].astype(str)

    col1, col2, col3 = st.columns(3)
    mazes = col1.multiselect("Maze size", sorted(summary["maze"].unique()), default=sorted(summary["maze"].unique()))
    strategies = col2.multiselect("Strategy", sorted(summary["strategy"].unique()),
                                  default=sorted(summary["strategy"].unique()))
    solvers = col3.multiselect("Solver", sorted(summary["solver"].unique()), default=sorted(summary["solver"].unique()))
    view = summary[summary["maze"].isin(mazes) & summary["strategy"].isin(strategies) & summary["solver"].isin(solvers)]

    st.markdown("### Summary")
    st.dataframe(view, use_container_width=True)

    for metric, title in (("makespan_median", "Median makespan"), ("avg_fuel_median", "Median average fuel")):
        st.markdown(f"### {title}")
        for maze in mazes:
            panel = view[view["maze"] == maze]
            if panel.empty:
                continue
            chart = panel.assign(line=panel["strategy"] + "/" + panel["solver"]).pivot_table(
                index="n", columns="line", values=metric
            )
            st.caption(f"{maze} (optimal path median {panel['optimal_d_median'].median():g})")
            st.line_chart(chart)

    report = fuel_reduction(summary)
    if report["vs_single_agent"] is not None:
        st.info(f"Fuel reduction at n={report['largest_n']} versus n=1: {report['vs_single_agent']:.1%}")
    if report["vs_naive"] is not None:
        st.info(f"Fuel reduction at n={report['largest_n']} versus naive: {report['vs_naive']:.1%}")
