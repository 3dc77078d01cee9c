"""Capacity-bound curves I1, I2, I3 on a log-spaced photon-number grid (CSV to stdout)."""
import csv
import sys

import numpy as np

from adaptive_homodyne.information import bound_curves

writer = csv.writer(sys.stdout, lineterminator="\n")
writer.writerow(["n", "I1", "I2", "I3"])
for row in bound_curves(np.logspace(-2, 2, 200)):
    writer.writerow([repr(v) for v in row])
