#!/usr/bin/env python3
"""Regenerate the bundled desk-scale datasets in data/.

iris.csv is the classic measured dataset (via scikit-learn). The *_sample
files are small synthetic stand-ins for the real UCI tables: same column
layout and value ranges, target generated from a plausible closed-form
surrogate plus noise, so the repository stays self-contained. Fetch the
real tables with data/fetch_real_data.sh when you want them.
"""

import argparse
import csv
import math
import os
import random


def write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def make_iris(out_dir):
    from sklearn.datasets import load_iris

    iris = load_iris()
    rows = [
        [f"{v:.1f}" for v in x] + [str(label)]
        for x, label in zip(iris.data, iris.target)
    ]
    write_csv(
        os.path.join(out_dir, "iris.csv"),
        ["sepal_length", "sepal_width", "petal_length", "petal_width", "label"],
        rows,
    )


def make_airfoil(out_dir, n=300):
    # Columns mirror the UCI airfoil self-noise table. The surrogate keeps
    # the dominant effect log-frequency shaped so a linear fit on raw
    # features leaves visible structure on the table.
    rng = random.Random(20240817)
    rows = []
    velocities = [31.7, 39.6, 55.5, 71.3]
    for _ in range(n):
        freq = math.exp(rng.uniform(math.log(200.0), math.log(20000.0)))
        angle = rng.uniform(0.0, 12.0)
        chord = rng.choice([0.0254, 0.0508, 0.1016, 0.1524, 0.2286, 0.3048])
        vel = rng.choice(velocities)
        thick = 0.0004 + 0.004 * (angle / 12.0) ** 1.5 + rng.uniform(0.0, 0.0008)
        spl = (
            127.0
            - 9.0 * math.log(freq / 1000.0)
            - 0.6 * angle
            + 0.05 * vel
            - 35.0 * chord
            - 250.0 * thick
            + rng.gauss(0.0, 0.4)
        )
        rows.append(
            [
                f"{freq:.1f}",
                f"{angle:.2f}",
                f"{chord:.4f}",
                f"{vel:.1f}",
                f"{thick:.6f}",
                f"{spl:.3f}",
            ]
        )
    write_csv(
        os.path.join(out_dir, "airfoil_sample.csv"),
        ["frequency_hz", "angle_deg", "chord_m", "velocity_ms", "thickness_m", "spl_db"],
        rows,
    )


def make_boston_rm(out_dir, n=120):
    # Average rooms vs median home value, shaped like the classic housing
    # table's RM column: strong positive linear trend with scatter.
    rng = random.Random(20240818)
    rows = []
    for _ in range(n):
        rm = rng.uniform(3.9, 8.7)
        medv = 9.1 * rm - 34.67 + rng.gauss(0.0, 2.2)
        medv = min(50.0, max(5.0, medv))
        rows.append([f"{rm:.3f}", f"{medv:.2f}"])
    write_csv(os.path.join(out_dir, "boston_rm_sample.csv"), ["rm", "medv"], rows)


def make_climate(out_dir, start=1950, years=72):
    # Yearly mean temperature anomaly with a mild accelerating trend; rows
    # are in time order so the chronological split mode has something real
    # to cut.
    rng = random.Random(20240819)
    rows = []
    for i in range(years):
        year = start + i
        t = i / (years - 1)
        anomaly = -0.12 + 1.05 * t * t + 0.35 * t + rng.gauss(0.0, 0.08)
        rows.append([str(year), f"{anomaly:.3f}"])
    write_csv(os.path.join(out_dir, "climate_sample.csv"), ["year", "anomaly_c"], rows)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    make_iris(args.out)
    make_airfoil(args.out)
    make_boston_rm(args.out)
    make_climate(args.out)


if __name__ == "__main__":
    main()
