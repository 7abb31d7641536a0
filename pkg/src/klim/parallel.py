"""Order-preserving map over a process pool; ``jobs <= 1`` runs inline."""

from concurrent.futures import ProcessPoolExecutor


def pmap(fn, items, jobs=1):
    items = list(items)
    if jobs is None or jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))
