"""Run every figure preset and write CSV, report and heatmap to results/."""
import sys

from abcage.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "results"
    sys.exit(main(["run", "--sweep", "fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b",
                   "--out", out, "--svg"]))
