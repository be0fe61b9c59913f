"""Sensitivity of the detected site probabilities to the Fock cutoff.

For each closed-system preset, compare n_max = 15 against larger cutoffs over
0-1 ms and print the worst change in any detected-window probability.
"""
from dataclasses import replace

import numpy as np

from abcage import analysis
from abcage.cli import simulate
from abcage.config import PRESET_NAMES, preset


def worst_change(name, n_ref=15, n_big=20):
    cfg = preset(name, mode="ion")
    cfg = replace(cfg, noise=None)
    tabs = []
    for n in (n_ref, n_big):
        c = replace(cfg, ion=replace(cfg.ion, n_max=n))
        tabs.append(analysis.probability_table(simulate(c), c.ion.n_detect)[:, :-1])
    return float(np.max(np.abs(tabs[0] - tabs[1])))


if __name__ == "__main__":
    for name in PRESET_NAMES:
        print(f"{name}: 15->20 {worst_change(name):.3e}   20->30 {worst_change(name, 20, 30):.3e}")
