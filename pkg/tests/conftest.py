import numpy as np
import pytest

from dcsbm.graph import Graph


def random_graph(rng, n, p, loops=True):
    """Erdos-Renyi style test graph, optionally with self-loops."""
    A = np.triu(rng.random((n, n)) < p, k=0 if loops else 1)
    src, dst = np.nonzero(A)
    return Graph.from_edges(n, src, dst)


@pytest.fixture
def path3():
    # 0 - 1 - 2
    return Graph.from_edges(3, [0, 1], [1, 2])


@pytest.fixture
def two_triangles():
    # triangles {0,1,2} and {3,4,5} joined by the bridge 2-3
    src = [0, 0, 1, 3, 3, 4, 2]
    dst = [1, 2, 2, 4, 5, 5, 3]
    return Graph.from_edges(6, src, dst)


def exhaustive_max(g, K, kind):
    """Best criterion value over all K**n labellings (small n only)."""
    import itertools

    from dcsbm.criteria import evaluate
    from dcsbm.graph import block_stats

    best = -np.inf
    # fixing node 0 to label 0 removes label-permutation copies
    for rest in itertools.product(range(K), repeat=g.n - 1):
        labels = np.array((0,) + rest)
        best = max(best, evaluate(kind, block_stats(g, labels, K)))
    return best


# -- acceptance report -----------------------------------------------------------

_ACCEPTANCE: dict[int, str] = {}


class CriterionCheck:
    """Collects named checks for one acceptance criterion."""

    def __init__(self, number: int, title: str):
        self.number = number
        self.title = title
        self.results: list[tuple[str, bool]] = []

    def check(self, name: str, ok) -> None:
        self.results.append((name, bool(ok)))

    @property
    def passed(self) -> bool:
        return bool(self.results) and all(ok for _, ok in self.results)

    def failures(self) -> list[str]:
        return [name for name, ok in self.results if not ok]


@pytest.fixture
def acceptance():
    """Yield a factory of criterion checkers; results go to the terminal summary."""
    import contextlib

    @contextlib.contextmanager
    def criterion(number: int, title: str):
        c = CriterionCheck(number, title)
        try:
            yield c
        except pytest.skip.Exception as exc:
            _ACCEPTANCE[number] = f"SKIP  {number}. {title} ({exc.msg})"
            raise
        except BaseException as exc:
            _ACCEPTANCE[number] = f"FAIL  {number}. {title} (error: {exc!r})"
            raise
        detail = "; ".join(name for name, _ in c.results)
        if c.passed:
            _ACCEPTANCE[number] = f"PASS  {number}. {title} [{detail}]"
        else:
            _ACCEPTANCE[number] = f"FAIL  {number}. {title} [failed: {'; '.join(c.failures())}]"
        print(_ACCEPTANCE[number])
        assert c.passed, c.failures()

    return criterion


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])
