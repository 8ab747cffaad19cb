"""Sort the bundled presets into Douglas, Berwald and Landsberg classes.

Each preset is sampled at random points; a class is reported when the scaled
sup norm of the tensor stays below 1e-9 everywhere.

    python3 demos/douglas_classes.py [--samples N]
"""

import argparse

from warpfinsler import families as fam
from warpfinsler.campaign import CampaignSpec, cmd_verify


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=50)
    args = parser.parse_args()

    print(f"{'preset':<12} {'douglas':>10} {'berwald':>10} {'landsberg':>10}")
    for name in fam.PRESET_NAMES:
        spec = CampaignSpec(family={"preset": name}, samples=args.samples,
                            checks=("douglas", "berwald", "landsberg"))
        report = cmd_verify(spec)
        cells = [f"{c['sup_norm']:10.1e}" + ("*" if c["pass"] else " ") for c in report.checks]
        print(f"{name:<12} " + " ".join(cells))
    print("* = vanishes to 1e-9 on every sample")


if __name__ == "__main__":
    main()
