"""Command-line entry point.

Exit codes: 0 success, 2 validated failure (embedding retries exhausted,
verifier found a violation), 1 usage or input error.  All randomness
flows from --seed through named substreams, and every JSON output embeds
a run manifest sufficient to replay it.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import __version__, kernels
from .apps import (
    DoubleCover,
    HarmoniousLabelling,
    TreePacking,
    harmonious_label,
    harmonious_label_smallest,
    odc_construct,
    ringel_pack,
)
from .checks import check_harmonious, check_odc, check_packing, check_rainbow_embedding
from .colouring import GroupSpec, colouring_from_json, colouring_from_spec
from .errors import EmbedFailure, RainbowError
from .pipeline import PipelineConfig, RainbowEmbedding, embed_tree
from .stats import (
    stat_colour_diversity,
    stat_colour_multiplicity,
    stat_colour_neighbourhood,
    stat_edge_density,
)
from .trees import Tree, random_tree


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def _digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        h.update(f.read())
    return h.hexdigest()


def _load_colouring(arg, digests):
    if os.path.exists(arg):
        digests[arg] = _digest(arg)
        with open(arg) as f:
            return colouring_from_json(json.load(f))
    return colouring_from_spec(arg)


def _load_tree(arg, digests):
    if os.path.exists(arg):
        digests[arg] = _digest(arg)
        with open(arg) as f:
            return Tree.from_text(f.read())
    parts = arg.split(":")
    name, nums = parts[0], [int(x) for x in parts[1:]]
    if name == "random":
        return random_tree(nums[0], nums[1] if len(nums) > 1 else 0)
    if name == "path":
        n = nums[0]
        return Tree(n, [(i, i + 1) for i in range(n - 1)])
    if name == "star":
        n = nums[0]
        return Tree(n, [(0, i) for i in range(1, n)])
    raise RainbowError(f"unknown tree spec {arg!r}")


def _parse_group(arg):
    parts = arg.split(":")
    if parts[0] in ("z", "zsum", "cyclic"):
        return GroupSpec("cyclic", int(parts[1]))
    if parts[0] in ("z2", "z2k", "elementary_two"):
        return GroupSpec("elementary_two", int(parts[1]))
    raise RainbowError(f"unknown group spec {arg!r}")


def _manifest(subcommand, args, digests, t0):
    cfg = {k: v for k, v in vars(args).items() if k != "func" and v is not None}
    return {
        "subcommand": subcommand,
        "config": cfg,
        "input_digests": digests,
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "wall_time": round(time.time() - t0, 3),
    }


def _emit(payload, args, manifest):
    payload["manifest"] = manifest
    text = json.dumps(payload, indent=2, sort_keys=True)
    if getattr(args, "out", None):
        with open(args.out, "w") as f:
            f.write(text + "\n")
    else:
        print(text)


def _tree_json(T):
    return {"n": T.n, "edges": [list(e) for e in T.edges]}


def _write_dot(path, T, vmap, colours=None):
    lines = ["graph embedding {"]
    for i, (u, v) in enumerate(T.edges):
        label = f' [label="{colours[i]}"]' if colours else ""
        lines.append(f"  {vmap[u]} -- {vmap[v]}{label};")
    lines.append("}")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


# -- subcommands --------------------------------------------------------


def _cmd_gen(args):
    t0, digests = time.time(), {}
    payload = {}
    if args.tree:
        T = _load_tree(args.tree, digests)
        payload["tree"] = _tree_json(T)
        payload["tree_text"] = T.to_text()
    if args.colouring:
        col = _load_colouring(args.colouring, digests)
        payload["colouring"] = col.to_json()
    if not payload:
        raise RainbowError("gen needs --tree and/or --colouring")
    _emit(payload, args, _manifest("gen", args, digests, t0))
    return 0


def _cmd_embed(args):
    t0, digests = time.time(), {}
    col = _load_colouring(args.colouring, digests)
    T = _load_tree(args.tree, digests)
    config = PipelineConfig(
        epsilon=args.epsilon, seed=args.seed, retries=args.retries,
        mu=args.mu, p0=args.p0,
    )
    out = embed_tree(col, T, config, strict=False)
    payload = {
        "tree": _tree_json(T),
        "colouring": col.to_json(),
        "success": out.success,
        "proven_absent": out.proven_absent,
        "trace": out.trace,
    }
    if out.success:
        payload["embedding"] = {
            "vertex_map": out.embedding.vertex_map,
            "colours": out.embedding.colours,
        }
        payload["validation"] = check_rainbow_embedding(out.embedding, col, T).to_json()
        if args.dot:
            _write_dot(args.dot, T, out.embedding.vertex_map, out.embedding.colours)
    _emit(payload, args, _manifest("embed", args, digests, t0))
    return 0 if out.success else 2


def _cmd_pack(args):
    t0, digests = time.time(), {}
    T = _load_tree(args.tree, digests)
    config = PipelineConfig(epsilon=args.epsilon, seed=args.seed, retries=args.retries)
    try:
        packing = ringel_pack(T, args.epsilon, config, exact=args.exact)
    except EmbedFailure as exc:
        _emit({"success": False, "trace": exc.trace}, args, _manifest("pack", args, digests, t0))
        return 2
    payload = {
        "tree": _tree_json(T),
        "N": packing.N,
        "copies": packing.copies,
        "perfect": packing.perfect,
        "success": True,
        "validation": check_packing(packing, require_perfect=packing.perfect).to_json(),
    }
    if args.dot:
        _write_dot(args.dot, T, packing.copies[0])
    _emit(payload, args, _manifest("pack", args, digests, t0))
    return 0


def _cmd_label(args):
    t0, digests = time.time(), {}
    T = _load_tree(args.tree, digests)
    config = PipelineConfig(seed=args.seed, retries=args.retries)
    try:
        if args.group == "smallest":
            lab = harmonious_label_smallest(T, config)
        else:
            lab = harmonious_label(T, _parse_group(args.group), config)
    except EmbedFailure as exc:
        _emit({"success": False, "trace": exc.trace}, args, _manifest("label", args, digests, t0))
        return 2
    payload = {
        "tree": _tree_json(T),
        "group": {"kind": lab.group.kind, "param": lab.group.param},
        "labels": lab.labels,
        "success": True,
        "validation": check_harmonious(lab, T).to_json(),
    }
    _emit(payload, args, _manifest("label", args, digests, t0))
    return 0


def _cmd_odc(args):
    t0, digests = time.time(), {}
    T = _load_tree(args.tree, digests)
    config = PipelineConfig(seed=args.seed, retries=args.retries)
    try:
        cover = odc_construct(T, args.k, config)
    except EmbedFailure as exc:
        _emit({"success": False, "trace": exc.trace}, args, _manifest("odc", args, digests, t0))
        return 2
    payload = {
        "tree": _tree_json(T),
        "k": cover.k,
        "copies": cover.copies,
        "success": True,
        "validation": check_odc(cover).to_json(),
    }
    _emit(payload, args, _manifest("odc", args, digests, t0))
    return 0


def _cmd_verify(args):
    t0, digests = time.time(), {}
    kinds = [("embedding", args.embedding), ("packing", args.packing),
             ("odc", args.odc), ("label", args.label)]
    given = [(k, p) for k, p in kinds if p]
    if len(given) != 1:
        raise RainbowError("verify needs exactly one of --embedding/--packing/--odc/--label")
    kind, path = given[0]
    digests[path] = _digest(path)
    with open(path) as f:
        obj = json.load(f)
    T = Tree(obj["tree"]["n"], [tuple(e) for e in obj["tree"]["edges"]])
    if kind == "embedding":
        col = (
            _load_colouring(args.colouring, digests)
            if args.colouring
            else colouring_from_json(obj["colouring"])
        )
        emb = obj["embedding"]
        colours = emb.get("colours") or [
            col.colour_of(emb["vertex_map"][u], emb["vertex_map"][v]) for u, v in T.edges
        ]
        res = check_rainbow_embedding(RainbowEmbedding(emb["vertex_map"], colours), col, T)
    elif kind == "packing":
        res = check_packing(
            TreePacking(T, obj["N"], obj["copies"]), require_perfect=obj.get("perfect", False)
        )
    elif kind == "odc":
        res = check_odc(DoubleCover(T, obj["k"], obj["copies"]))
    else:
        g = obj["group"]
        res = check_harmonious(HarmoniousLabelling(T, GroupSpec(g["kind"], g["param"]), obj["labels"]), T)
    _emit({"kind": kind, "result": res.to_json()}, args, _manifest("verify", args, digests, t0))
    return 0 if res.ok else 2


_LEMMAS = {
    "edge_density": lambda col, a: stat_edge_density(
        col, a.p, a.a_size, a.b_size if a.b_size > 0 else a.a_size,
        a.trials, a.seed, epsilon=a.epsilon,
    ),
    "multiplicity": lambda col, a: stat_colour_multiplicity(
        col, a.p, a.a_size, a.trials, a.seed, epsilon=a.epsilon
    ),
    "diversity": lambda col, a: stat_colour_diversity(
        col, a.p, a.a_size, a.trials, a.seed,
        b_size=a.b_size if a.b_size > 0 else None, epsilon=a.epsilon,
    ),
    "neighbourhood": lambda col, a: stat_colour_neighbourhood(
        col, a.p, a.q, a.trials, a.seed
    ),
}


def _cmd_stats(args):
    t0, digests = time.time(), {}
    col = _load_colouring(args.colouring, digests)
    summary = _LEMMAS[args.lemma](col, args)
    _emit({"summary": summary.to_json()}, args, _manifest("stats", args, digests, t0))
    return 0


def _cmd_bench(args):
    t0, digests = time.time(), {}
    col = _load_colouring(args.colouring, digests)
    n = col.n
    rng = np.random.default_rng(args.seed)
    A = np.sort(rng.choice(n, size=min(n // 4, 500), replace=False)).astype(np.int64)
    X = np.asarray(sorted(set(range(n)) - set(A.tolist())), dtype=np.int64)
    spec = col.kernel_spec()
    results = {}
    for name in ("fast", "pure"):
        try:
            backend = kernels.get_backend(name)
        except (RainbowError, ImportError, ValueError):
            results[name] = None
            continue
        start = time.perf_counter()
        for _ in range(args.repeat):
            for v in A[:64]:
                backend.colour_block(*spec, int(v), X)
            cmask = np.ones(col.n_colours, dtype=bool)
            vfree = np.zeros(n, dtype=bool)
            vfree[X] = True
            backend.greedy_matching(*spec, A, X, cmask.copy(), vfree.copy())
        results[name] = round(time.perf_counter() - start, 6)
    payload = {"backend_default": kernels.BACKEND, "seconds": results}
    if results.get("fast") and results.get("pure"):
        payload["speedup"] = round(results["pure"] / results["fast"], 2)
    _emit(payload, args, _manifest("bench", args, digests, t0))
    return 0


# -- argument wiring ----------------------------------------------------


def _build_parser():
    p = _Parser(prog="rainbow-embed", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="write JSON output here instead of stdout")
        sp.add_argument("--jobs", type=int, default=1)

    sp = sub.add_parser("gen", help="materialize tree/colouring specs as JSON")
    sp.add_argument("--tree")
    sp.add_argument("--colouring")
    common(sp)
    sp.set_defaults(func=_cmd_gen)

    sp = sub.add_parser("embed", help="rainbow-embed a tree in a coloured host")
    sp.add_argument("--colouring", required=True)
    sp.add_argument("--tree", required=True)
    sp.add_argument("--epsilon", type=float, default=0.2)
    sp.add_argument("--mu", type=float, default=0.02)
    sp.add_argument("--p0", type=float, default=None)
    sp.add_argument("--retries", type=int, default=10)
    sp.add_argument("--dot", help="also export the embedding as DOT")
    common(sp)
    sp.set_defaults(func=_cmd_embed)

    sp = sub.add_parser("pack", help="cyclic tree packing into K_{2l+1}")
    sp.add_argument("--tree", required=True)
    sp.add_argument("--epsilon", type=float, default=0.2)
    sp.add_argument("--exact", action="store_true", help="host K_{2t-1}, perfect decomposition")
    sp.add_argument("--retries", type=int, default=10)
    sp.add_argument("--dot")
    common(sp)
    sp.set_defaults(func=_cmd_pack)

    sp = sub.add_parser("label", help="harmonious labelling from a rainbow copy")
    sp.add_argument("--tree", required=True)
    sp.add_argument("--group", required=True, help="z:<m>, z2k:<k>, or 'smallest'")
    sp.add_argument("--retries", type=int, default=10)
    common(sp)
    sp.set_defaults(func=_cmd_label)

    sp = sub.add_parser("odc", help="orthogonal double cover by xor translates")
    sp.add_argument("--tree", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--retries", type=int, default=10)
    common(sp)
    sp.set_defaults(func=_cmd_odc)

    sp = sub.add_parser("verify", help="re-validate a JSON output file")
    sp.add_argument("--embedding")
    sp.add_argument("--packing")
    sp.add_argument("--odc")
    sp.add_argument("--label")
    sp.add_argument("--colouring")
    common(sp)
    sp.set_defaults(func=_cmd_verify)

    sp = sub.add_parser("stats", help="Monte-Carlo pseudorandomness checks")
    sp.add_argument("--lemma", required=True, choices=sorted(_LEMMAS))
    sp.add_argument("--colouring", required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--q", type=float, default=0.3)
    sp.add_argument("--a-size", type=int, default=100)
    sp.add_argument("--b-size", type=int, default=0)
    sp.add_argument("--trials", type=int, default=30)
    sp.add_argument("--epsilon", type=float, default=0.1)
    common(sp)
    sp.set_defaults(func=_cmd_stats)

    sp = sub.add_parser("bench", help="compare compiled and pure kernels")
    sp.add_argument("--colouring", default="zsum:2000")
    sp.add_argument("--repeat", type=int, default=5)
    common(sp)
    sp.set_defaults(func=_cmd_bench)
    return p


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 1
    try:
        return args.func(args)
    except (RainbowError, OSError, json.JSONDecodeError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
