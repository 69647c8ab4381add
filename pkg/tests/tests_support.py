"""Small deterministic sample objects shared by several test modules."""

from rainbow_embed.colouring import explicit_colouring


def explicit_sample(n=12, k=2, seed=6):
    """A fixed explicit locally-2-bounded colouring built from the random
    generator's edge list, re-entered through the explicit factory so the
    table code path is exercised."""
    from rainbow_embed.colouring import random_locally_k_bounded

    base = random_locally_k_bounded(n, k, seed)
    edges = [
        (u, v, int(base.colour_of(u, v))) for u in range(n) for v in range(u + 1, n)
    ]
    return explicit_colouring(n, k, edges)
