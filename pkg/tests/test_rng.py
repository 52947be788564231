import numpy as np

from rootshell.services.rng import haar_orthogonal, run_blocks, stream


def _moments(rng, count):
    x = rng.standard_normal(count)
    return np.array([x.sum(), (x ** 2).sum()])


def test_blocks_are_independent_of_threads():
    samples = 3 * 4096 + 17
    single = run_blocks(_moments, samples, seed=11, threads=1)
    pooled = run_blocks(_moments, samples, seed=11, threads=4)
    assert np.array_equal(single, pooled)


def test_seed_changes_the_stream():
    a = run_blocks(_moments, 1000, seed=1)
    b = run_blocks(_moments, 1000, seed=2)
    assert not np.array_equal(a, b)
    assert np.array_equal(stream(3, 2).random(4), stream(3, 2).random(4))


def test_haar_orthogonal():
    q = haar_orthogonal(stream(0), 3, 100)
    assert q.shape == (100, 3, 3)
    eye = np.broadcast_to(np.eye(3), q.shape)
    assert np.allclose(q @ np.transpose(q, (0, 2, 1)), eye)
    assert np.allclose(np.linalg.det(q), 1.0)
