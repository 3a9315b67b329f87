"""One-off pilot fixing the thresholds for the random-permutation check.

Run once; the output file is committed and read by the acceptance test,
which uses a different seed. Threshold rule (chosen before the run):
pilot fraction minus three binomial standard errors, floored to 0.01.
"""

import json
import math
import sys
from pathlib import Path

from permpat.partitions import random_permutation_stats

K, SAMPLES, PILOT_SEED = 12, 2000, 1729


def threshold(p: float, n: int) -> float:
    return math.floor((p - 3 * math.sqrt(p * (1 - p) / n)) * 100) / 100


def main(out: str) -> None:
    st = random_permutation_stats(K, SAMPLES, PILOT_SEED)
    p3, p2 = st.frac_d_ge_k_minus_3, st.frac_d_ge_k_minus_2
    record = {
        "k": K,
        "samples": SAMPLES,
        "pilot_seed": PILOT_SEED,
        "frac_d_ge_k_minus_3": p3,
        "frac_d_ge_k_minus_2": p2,
        "threshold_d_ge_k_minus_3": threshold(p3, SAMPLES),
        "threshold_d_ge_k_minus_2": threshold(p2, SAMPLES),
        "rule": "pilot fraction minus 3 binomial standard errors, floored to 0.01",
    }
    Path(out).write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")
    print(json.dumps(record, sort_keys=True))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "pilot/entangling_k12.json")
