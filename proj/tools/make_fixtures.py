#!/usr/bin/env python3
"""Regenerates the CSV fixtures under fixtures/.

The committed CSVs are the source of truth for the test suites; this script
only documents how they were produced. Each fixture is written three times:
<name>.csv (all rows), <name>_train.csv and <name>_test.csv (stratified
70/30 split, fixed seed).
"""

import pathlib

import numpy as np
from sklearn import datasets
from sklearn.model_selection import train_test_split

OUT = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def write_csv(path, X, y, feature_names):
    with open(path, "w", newline="\n") as f:
        f.write(",".join(list(feature_names) + ["class"]) + "\n")
        for row, label in zip(X, y):
            f.write(",".join(f"{v:.10g}" for v in row) + f",{label}\n")


def emit(name, X, y, feature_names, split=True):
    write_csv(OUT / f"{name}.csv", X, y, feature_names)
    if not split:
        return
    Xtr, Xte, ytr, yte = train_test_split(
        X, y, test_size=0.3, random_state=0, stratify=y)
    write_csv(OUT / f"{name}_train.csv", Xtr, ytr, feature_names)
    write_csv(OUT / f"{name}_test.csv", Xte, yte, feature_names)


def sklearn_fixture(loader, name):
    d = loader()
    names = [f"f{i}" for i in range(d.data.shape[1])]
    labels = np.asarray(d.target_names)[d.target]
    emit(name, d.data, labels, names)


def rotated_gaussians(rng, n_per_class=300, dim=6):
    # Elongated Gaussians whose boundary is oblique to every axis.
    q, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    scales = np.array([3.0, 3.0, 1.0, 1.0, 0.5, 0.5])[:dim]
    cov = q @ np.diag(scales ** 2) @ q.T
    u = np.ones(dim) / np.sqrt(dim)
    mu = 1.1 * u
    a = rng.multivariate_normal(mu, cov, n_per_class)
    b = rng.multivariate_normal(-mu, cov, n_per_class)
    X = np.vstack([a, b])
    y = np.array(["pos"] * n_per_class + ["neg"] * n_per_class)
    perm = rng.permutation(len(y))
    emit("oblique", X[perm], y[perm], [f"x{i}" for i in range(dim)])


def main():
    OUT.mkdir(exist_ok=True)
    rng = np.random.default_rng(20211016)

    sklearn_fixture(datasets.load_iris, "iris")
    sklearn_fixture(datasets.load_wine, "wine")
    sklearn_fixture(datasets.load_breast_cancer, "breast_cancer")

    rotated_gaussians(rng)

    X, y = datasets.make_classification(
        n_samples=800, n_features=10, n_informative=6, n_redundant=2,
        n_classes=4, n_clusters_per_class=1, class_sep=1.2, random_state=7)
    emit("multiclass", X, np.array([f"c{k}" for k in y]),
         [f"v{i}" for i in range(X.shape[1])])

    X, y = datasets.make_moons(n_samples=500, noise=0.25, random_state=3)
    X = np.hstack([X, rng.normal(size=(len(y), 2))])
    emit("moons", X, np.array(["upper", "lower"])[y],
         ["m0", "m1", "noise0", "noise1"])

    # Tiny linearly separable set used by the CLI tests.
    sep_rng = np.random.default_rng(5)
    a = sep_rng.uniform(0.0, 1.0, size=(20, 2))
    b = sep_rng.uniform(0.0, 1.0, size=(20, 2)) + np.array([2.0, 2.0])
    X = np.vstack([a, b])
    y = np.array(["a"] * 20 + ["b"] * 20)
    emit("sep", X, y, ["x", "y"], split=False)


if __name__ == "__main__":
    main()
