"""Shared plumbing for the demo scripts: headless backend and output folder."""

import os
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

OUT = Path(os.environ.get("SELFCONTRACT_DEMO_OUT", "demo_output"))
OUT.mkdir(parents=True, exist_ok=True)


def save(fig, name):
    path = OUT / name
    fig.savefig(path, metadata={"Date": None} if path.suffix == ".svg" else None)
    print(f"saved {path}")
