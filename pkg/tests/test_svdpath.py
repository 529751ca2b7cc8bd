import numpy as np
import pytest

from condgeo.errors import ClusterCollisionError, InputError, NotNearUnitaryError
from condgeo.matcore import random_unitary
from condgeo.strata import signature
from condgeo.svdpath import PathSpec, StepControl, retract_unitary, track_svd, unitary_drift

from helpers import cluster_means, stratum_path


def test_diagonal_path_keeps_identity_frames():
    path = PathSpec(lambda t: np.diag([2.0 + t, 1.0]), lambda t: np.diag([1.0, 0.0]))
    tr = track_svd(path, signature(1, 1), StepControl(steps=20))
    for i, t in enumerate(tr.times):
        assert np.allclose(np.abs(tr.U[i]), np.eye(2), atol=1e-12)
        assert np.allclose(tr.sigma_distinct[i], [2 + t, 1], atol=1e-12)


def test_rotation_path_rotates_left_frame():
    def R(t):
        return np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])

    D = np.diag([2.0, 1.0])
    path = PathSpec(lambda t: R(t) @ D, lambda t: R(t + np.pi / 2) @ D)
    tr = track_svd(path, signature(1, 1), StepControl(steps=40))
    for i, t in enumerate(tr.times):
        # columns agree up to a sign per cluster
        M = tr.U[i].T @ R(t) @ tr.U[0]
        assert np.allclose(np.abs(M), np.eye(2), atol=1e-9)
        assert np.allclose(tr.sigma_distinct[i], [2, 1], atol=1e-10)


def test_random_path_reconstruction():
    rng = np.random.default_rng(8)
    path = stratum_path(rng, (1, 1, 1), 4, "real")
    tr = track_svd(path, signature(1, 1, 1), StepControl(steps=100))
    for i, t in enumerate(tr.times):
        assert np.linalg.norm(tr.reconstruct(i) - path(t)) <= 1e-8 * np.linalg.norm(path(t))
    assert np.max(tr.unitary_drift) <= 1e-8


def test_path_from_samples_uses_spline():
    t = np.linspace(0, 1, 9)
    nodes = np.array([np.diag([3.0 + s, 1.0 + s * s]) for s in t])
    path = PathSpec(times=t, nodes=nodes)
    assert np.allclose(path(0.5), np.diag([3.5, 1.25]))
    tr = track_svd(path, signature(1, 1), StepControl(steps=10))
    assert np.allclose(tr.sigma_distinct[-1], [4.0, 2.0])


def test_diagonal_blocks_are_skew():
    rng = np.random.default_rng(9)
    path = stratum_path(rng, (2, 1), 3, "complex")
    from condgeo.svdpath import SVDTracker

    trk = SVDTracker(signature(2, 1))
    U, V, s = trk.initial_state(path)
    Ab, Bb, _ = trk.rates(U, V, s, path.derivative(0.0))
    for sl in signature(2, 1).blocks():
        assert np.linalg.norm(Ab[sl, sl] + Ab[sl, sl].conj().T) <= 1e-10
        assert np.linalg.norm(Bb[sl, sl] + Bb[sl, sl].conj().T) <= 1e-10


def test_sigma_dot_matches_finite_differences():
    rng = np.random.default_rng(10)
    parts = (2, 1)
    path = stratum_path(rng, parts, 4, "complex")
    tr = track_svd(path, signature(*parts), StepControl(steps=50))
    h = 1e-5
    for i, t in enumerate(tr.times):
        fd = (cluster_means(path(t + h), parts) - cluster_means(path(t - h), parts)) / (2 * h)
        assert np.max(np.abs(fd - tr.sigma_dot[i])) <= 1e-6


def test_round_trip_returns_to_start():
    rng = np.random.default_rng(11)
    sig = signature(1, 1)
    path = stratum_path(rng, (1, 1), 3, "complex")
    fwd = track_svd(path, sig, StepControl(steps=60))
    back = track_svd(path.reversed(), sig, StepControl(steps=60),
                     state=(fwd.U[-1], fwd.V[-1], fwd.sigma_distinct[-1]))
    assert np.linalg.norm(back.U[-1] - fwd.U[0]) <= 1e-7
    assert np.linalg.norm(back.V[-1] - fwd.V[0]) <= 1e-7
    assert np.max(np.abs(back.sigma_distinct[-1] - fwd.sigma_distinct[0])) <= 1e-7


def test_collision_is_reported():
    # sigma values 2 - t and 1 meet at t = 1
    path = PathSpec(lambda t: np.diag([2.0 - t, 1.0]), lambda t: np.diag([-1.0, 0.0]), 0.0, 1.2)
    with pytest.raises(ClusterCollisionError) as exc:
        track_svd(path, signature(1, 1), StepControl(steps=60))
    assert exc.value.time is not None and 0.8 < exc.value.time <= 1.0


def test_wrong_signature_rejected():
    path = PathSpec(lambda t: np.diag([2.0, 1.0]), lambda t: np.zeros((2, 2)))
    with pytest.raises(InputError):
        track_svd(path, signature(2), StepControl(steps=4))


def test_retract_unitary_examples():
    rng = np.random.default_rng(12)
    for field in ("real", "complex"):
        U = random_unitary(rng, 4, field)
        assert np.allclose(retract_unitary(U), U, atol=1e-14)
        assert np.linalg.norm(retract_unitary(1.001 * U) - U) <= 1e-12
        E = rng.standard_normal((4, 4))
        W = retract_unitary(U + 1e-4 * E / np.linalg.norm(E))
        assert unitary_drift(W) <= 1e-14
    with pytest.raises(NotNearUnitaryError):
        retract_unitary(3 * np.eye(2))
