"""A small experiment grid through the command-line driver, then the figures."""

import tempfile
from pathlib import Path

from weakstrong import cli

CONFIG = """
[datasets]
presets = classA, classC
n_recordings = 40

[experiment]
budgets = 3, 5, 7, 9
betas = 0, 0.2
n_seeds = 2
"""

out = Path(tempfile.mkdtemp(prefix="weakstrong-"))
(out / "exp.cfg").write_text(CONFIG)

cli.main(["generate", "--config", str(out / "exp.cfg"), "--out", str(out)])
cli.main(["run", "--config", str(out / "exp.cfg"), "--out", str(out)])
cli.main(["report", "--out", str(out), "--budget", "7"])
cli.main(["report", "--out", str(out), "--budget", "7", "--beta", "0.2"])
cli.main(["plot", "--out", str(out), "--dataset", "classA", "--recording", "rec0002"])

print("results:", out / "results.csv")
for p in sorted((out / "figures").glob("*.svg")):
    print("figure:", p)
