"""Brute-force reference computations, independent of the library code paths."""

import itertools
import math

import numpy as np


def all_permutations(l):
    return list(itertools.permutations(range(l)))


def brute_delta(X, Y):
    """min over all l! row permutations of ||X - P Y||, plus the minimizing images."""
    X, Y = np.asarray(X, float), np.asarray(Y, float)
    best, arg = math.inf, []
    for perm in all_permutations(X.shape[0]):
        d = float(np.linalg.norm(X - Y[list(perm)]))
        if d < best - 1e-12:
            best, arg = d, [perm]
        elif abs(d - best) <= 1e-12:
            arg.append(perm)
    return best, arg


def brute_alpha(Z, transpositions_only=False):
    """min over non-identity permutations (or transpositions) of ||Z - P Z||."""
    Z = np.asarray(Z, float)
    l = Z.shape[0]
    best = math.inf
    for perm in all_permutations(l):
        moved = sum(p != i for i, p in enumerate(perm))
        if moved == 0 or (transpositions_only and moved != 2):
            continue
        best = min(best, float(np.linalg.norm(Z - Z[list(perm)])))
    return best


def brute_frechet(samples, Z):
    return float(np.mean([brute_delta(X, Z)[0] ** 2 for X in samples]))


def brute_mean_value(samples):
    """Global minimum of the Fréchet function over every alignment tuple, no pinning."""
    samples = [np.asarray(X, float) for X in samples]
    perms = all_permutations(samples[0].shape[0])
    best = math.inf
    for combo in itertools.product(perms, repeat=len(samples)):
        reps = [X[list(p)] for X, p in zip(samples, combo)]
        M = np.mean(reps, axis=0)
        best = min(best, float(np.mean([np.sum((R - M) ** 2) for R in reps])))
    return best


def random_soft(rng, l, m):
    X = rng.random((l, m)) ** 2
    return X / X.sum(axis=0, keepdims=True)


def random_hard_labels(rng, l, m):
    return rng.integers(0, l, size=m)


def random_matrix(rng, l, m, hard):
    if hard:
        X = np.zeros((l, m))
        X[random_hard_labels(rng, l, m), np.arange(m)] = 1.0
        return X
    return random_soft(rng, l, m)
