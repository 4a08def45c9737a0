import time

SESSION_START = time.perf_counter()


def pytest_collection_modifyitems(session, config, items):
    # Acceptance gates run last so the suite-budget criterion sees the
    # whole run.
    items.sort(key=lambda item: item.path.name == "test_acceptance.py")


def session_elapsed() -> float:
    return time.perf_counter() - SESSION_START


def brute_min_cover_value(family, mu, nu):
    """Exhaustive cover oracle: every subset of X, columns forced minimally.

    For a fixed row set a, the cheapest completion is exactly the columns
    hit by uncovered rows (weights are nonnegative), so scanning all 2^|X|
    row subsets enumerates a superset of the optimal covers.
    """
    h = family.union_matrix()
    nx, ny = family.nx, family.ny
    best = None
    for bits in range(1 << nx):
        in_a = [(bits >> i) & 1 for i in range(nx)]
        forced = [False] * ny
        for i in range(nx):
            if in_a[i]:
                continue
            for j in range(ny):
                if h[i][j]:
                    forced[j] = True
        value = sum(m for m, x in zip(mu, in_a) if x) + sum(
            m for m, x in zip(nu, forced) if x
        )
        if best is None or value < best:
            best = value
    return best
