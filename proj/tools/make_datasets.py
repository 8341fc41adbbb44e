#!/usr/bin/env python3
"""Builds the CSV files under data/.

iris and wine are exported from scikit-learn's bundled copies. The other
files are deterministic synthetic stand-ins that mimic the shape (instance
count, attribute count and kinds, class balance) and approximate nearest-
neighbor difficulty of the correspondingly named UCI datasets, which are not
redistributable from this environment. Re-running the script reproduces the
files byte for byte.

Usage: python3 tools/make_datasets.py [--calibrate] [outdir]
"""

import sys
import numpy as np


def fmt(v):
    if float(v).is_integer():
        return str(int(v))
    return format(float(v), ".6g")


def write_csv(path, header, rows, labels):
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for row, lab in zip(rows, labels):
            f.write(",".join(fmt(v) for v in row) + "," + lab + "\n")
    print(f"wrote {path} ({len(rows)} rows, {len(header) - 1} attrs)")


def export_sklearn(outdir):
    from sklearn.datasets import load_iris, load_wine

    iris = load_iris()
    header = ["sepal_length", "sepal_width", "petal_length", "petal_width", "species"]
    labels = [iris.target_names[t] for t in iris.target]
    write_csv(f"{outdir}/iris.csv", header, iris.data, labels)

    wine = load_wine()
    header = [n.replace("/", "_") for n in wine.feature_names] + ["cultivar"]
    labels = [f"class_{t}" for t in wine.target]
    write_csv(f"{outdir}/wine.csv", header, wine.data, labels)


class Synth:
    """Two-class Gaussian mixture with informative and noise attributes."""

    def __init__(self, name, n, n_pos_frac, attrs, label_names, seed):
        # attrs: list of (kind, shift, scale, lo, hi); kind in {real, int}
        # shift is the class-1 mean offset in units of scale.
        self.name = name
        self.n = n
        self.n_pos_frac = n_pos_frac
        self.attrs = attrs
        self.label_names = label_names
        self.seed = seed

    def generate(self):
        rng = np.random.default_rng(self.seed)
        n_pos = int(round(self.n * self.n_pos_frac))
        y = np.array([1] * n_pos + [0] * (self.n - n_pos))
        rng.shuffle(y)
        cols = []
        for (kind, shift, scale, lo, hi) in self.attrs:
            center = (lo + hi) / 2.0
            x = center + rng.normal(0.0, scale, self.n) + shift * scale * (y - 0.5)
            x = np.clip(x, lo, hi)
            if kind == "int":
                x = np.rint(x)
            cols.append(x)
        x = np.column_stack(cols)
        labels = [self.label_names[t] for t in y]
        return x, labels, y


def stand_ins():
    mk = Synth
    out = []

    # 683 x 9 integer attributes in 1..10, ~65% negative.
    out.append(mk("wbcd", 683, 0.35,
                  [("int", s, 1.9, 1, 10) for s in
                   [1.45, 1.30, 1.40, 1.15, 1.00, 1.50, 1.20, 1.10, 0.65]],
                  ["benign", "malignant"], seed=20240001))

    # 270 x 13 (12 integer + 1 real), moderate overlap.
    heart_attrs = [("int", 0.9, 9.0, 29, 77),   # age-like
                   ("int", 0.8, 0.45, 0, 1),    # binary
                   ("int", 1.0, 0.95, 1, 4),    # ordinal
                   ("int", 0.45, 17.0, 94, 200),
                   ("real", 0.4, 51.0, 126, 564),
                   ("int", 0.0, 0.35, 0, 1),
                   ("int", 0.55, 0.99, 0, 2),
                   ("int", 0.9, 22.0, 71, 202),
                   ("int", 0.95, 0.46, 0, 1),
                   ("int", 1.05, 1.1, 0, 6),
                   ("int", 0.75, 0.61, 1, 3),
                   ("int", 1.15, 0.93, 0, 3),
                   ("int", 0.95, 1.9, 3, 7)]
    out.append(mk("heart", 270, 0.444, heart_attrs, ["absent", "present"], seed=20240002))

    # 151 x 6 integer attributes, weak signal.
    out.append(mk("teaching", 151, 0.50,
                  [("int", 0.50, 1.0, 1, 5), ("int", 0.42, 7.0, 1, 26),
                   ("int", 0.0, 0.8, 1, 3), ("int", 0.30, 0.5, 0, 1),
                   ("int", 0.0, 13.0, 3, 66), ("int", 0.36, 1.1, 1, 5)],
                  ["low", "high"], seed=20240003))

    # 351 x 33 (32 real + 1 integer), a third of the attributes informative.
    iono_attrs = [("int", 0.45, 0.45, 0, 1)]
    for j in range(32):
        shift = 0.72 if j < 11 else 0.0
        iono_attrs.append(("real", shift, 0.45, -1, 1))
    out.append(mk("iono", 351, 0.36, iono_attrs, ["good", "bad"], seed=20240004))

    # 768 x 8 real attributes, substantial overlap.
    pima_attrs = [("real", 0.44, 3.2, 0, 17), ("real", 0.76, 30.0, 44, 199),
                  ("real", 0.20, 19.0, 24, 122), ("real", 0.24, 15.0, 7, 99),
                  ("real", 0.36, 100.0, 14, 846), ("real", 0.48, 7.5, 18, 67),
                  ("real", 0.32, 0.33, 0.08, 2.42), ("real", 0.44, 11.0, 21, 81)],
    out.append(mk("pima", 768, 0.349, pima_attrs[0], ["neg", "pos"], seed=20240005))

    # 345 x 6 (5 integer + 1 real), barely separable.
    out.append(mk("bupa", 345, 0.42,
                  [("int", 0.15, 4.4, 65, 103), ("int", 0.24, 18.0, 23, 138),
                   ("int", 0.32, 19.0, 4, 155), ("int", 0.36, 10.0, 5, 82),
                   ("int", 0.26, 33.0, 5, 297), ("real", 0.36, 3.3, 0.5, 20)],
                  ["c1", "c2"], seed=20240006))
    return out


def calibrate(outdir):
    from sklearn.model_selection import cross_val_score, StratifiedKFold
    from sklearn.neighbors import KNeighborsClassifier
    from sklearn.preprocessing import StandardScaler
    from sklearn.pipeline import make_pipeline

    for synth in stand_ins():
        x, _, y = synth.generate()
        best = 0.0
        for k in (1, 3, 5, 9, 15, 25):
            clf = make_pipeline(StandardScaler(), KNeighborsClassifier(n_neighbors=k))
            cv = StratifiedKFold(10, shuffle=True, random_state=0)
            acc = cross_val_score(clf, x, y, cv=cv).mean()
            best = max(best, acc)
        print(f"{synth.name}: best std-kNN 10-fold accuracy = {best:.4f}")


def main():
    args = [a for a in sys.argv[1:] if not a.startswith("--")]
    outdir = args[0] if args else "data"
    if "--calibrate" in sys.argv:
        calibrate(outdir)
        return
    export_sklearn(outdir)
    for synth in stand_ins():
        x, labels, _ = synth.generate()
        header = [f"a{j + 1}" for j in range(x.shape[1])] + ["class"]
        write_csv(f"{outdir}/{synth.name}.csv", header, x, labels)


if __name__ == "__main__":
    main()
