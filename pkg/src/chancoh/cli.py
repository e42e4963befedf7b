"""Command-line front end.

Subcommands: ``analyze`` (monotone report for a channel file), ``sweep-rotation``
(CSV over a grid of rotation angles), ``diamond`` (distance between two channel
files), ``verify`` (randomized invariant batteries).

Exit codes: 0 ok, 1 invariant violation, 2 input error, 3 numerical failure.
All output is deterministic for fixed flags and seed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import channel, coherence, linalg, monotones, sdp

DIAGNOSTICS_FILE = "chancoh_verify_diagnostics.json"


def _load_channel(path: str) -> channel.QChannel:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return channel.channel_from_json_dict(doc)


def _fmt(value: float, places: int) -> str:
    out = f"{value:.{places}f}"
    return out[1:] if out.startswith("-0.") and float(out) == 0.0 else out


def _witness_json(state: channel.QState):
    return [[[float(x.real), float(x.imag)] for x in row] for row in state.matrix]


def _search_config(args) -> monotones.SearchConfig:
    return monotones.SearchConfig(
        ancilla_dim=args.ancilla_dim, restarts=args.restarts,
        step_tolerance=args.tolerance, rng_seed=args.seed)


def cmd_analyze(args) -> int:
    try:
        chan = _load_channel(args.channel)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    cfg = _search_config(args)
    try:
        report = monotones.analyze(chan, cfg)
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    fields = [
        ("c_r_i", report.c_r_i),
        ("c_r_b_lower", report.c_r_b_lower),
        ("c_max", report.c_max),
        ("distill_parallel", report.distill_parallel),
        ("distill_iterative_lower", report.distill_iterative_lower),
        ("irreversibility_gap_lower", report.irreversibility_gap_lower),
    ]
    if not all(math.isfinite(v) for _, v in fields):
        print("error: non-finite value in report", file=sys.stderr)
        return 3
    for name, value in fields[:3]:
        print(f"{name}: {_fmt(value, 6)}")
    print(f"dilute_interval: [{_fmt(report.dilute_interval[0], 6)}, "
          f"{_fmt(report.dilute_interval[1], 6)}]")
    for name, value in fields[3:]:
        print(f"{name}: {_fmt(value, 6)}")
    print(f"ancilla_dim: {report.ancilla_dim}")
    if args.out:
        doc = {
            "channel_file": args.channel,
            "search_config": {
                "ancilla_dim": report.ancilla_dim,
                "restarts": cfg.restarts,
                "max_ascent_steps": cfg.max_ascent_steps,
                "step_tolerance": cfg.step_tolerance,
                "rng_seed": cfg.rng_seed,
            },
            "report": {
                "c_r_i": report.c_r_i,
                "c_r_b_lower": report.c_r_b_lower,
                "c_max": report.c_max,
                "distill_parallel": report.distill_parallel,
                "distill_iterative_lower": report.distill_iterative_lower,
                "dilute_interval": list(report.dilute_interval),
                "irreversibility_gap_lower": report.irreversibility_gap_lower,
                "c_r_b_witness": _witness_json(report.c_r_b_witness),
            },
        }
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def cmd_sweep_rotation(args) -> int:
    if args.steps < 2:
        print("error: need at least 2 steps", file=sys.stderr)
        return 2
    if not args.theta_max > args.theta_min:
        print("error: theta-max must exceed theta-min", file=sys.stderr)
        return 2
    cfg = _search_config(args)
    thetas = np.linspace(args.theta_min, args.theta_max, args.steps)
    lines = ["theta,c_r_i,c_r_b_lower,gap"]
    try:
        for theta in thetas:
            chan = channel.rotation_unitary(float(theta))
            gen = monotones.c_r_i(chan)
            boost, _ = monotones.c_r_b_lower(chan, cfg)
            gap = boost - gen
            row = [float(theta), gen, boost, gap]
            if not all(math.isfinite(v) for v in row):
                print(f"error: non-finite value at theta={theta}", file=sys.stderr)
                return 3
            lines.append(",".join(_fmt(v, 8) for v in row))
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return 0


def cmd_diamond(args) -> int:
    try:
        chan_a = _load_channel(args.channel_a)
        chan_b = _load_channel(args.channel_b)
        if (chan_a.dim_in, chan_a.dim_out) != (chan_b.dim_in, chan_b.dim_out):
            raise ValueError("channels have mismatched dimensions")
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        dist = monotones.diamond_distance(chan_a, chan_b)
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(_fmt(dist, 8))
    return 0


class _Battery:
    """Collects invariant checks and remembers the worst violation."""

    def __init__(self):
        self.suites = []
        self.worst = None

    def run(self, name: str, checks):
        violations = 0
        total = 0
        for desc, margin in checks:
            total += 1
            if margin > 0:
                violations += 1
                if self.worst is None or margin > self.worst["margin"]:
                    self.worst = {"suite": name, "check": desc,
                                  "margin": float(margin)}
        self.suites.append((name, violations, total))
        return violations


def _suite_linalg(rng, count):
    for _ in range(count):
        d = int(rng.integers(2, 9))
        h = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        h = 0.5 * (h + h.conj().T)
        eig = linalg.herm_eig(h)
        rec = (eig.eigenvectors * eig.eigenvalues) @ eig.eigenvectors.conj().T
        yield ("herm_eig reconstruction",
               float(np.max(np.abs(rec - h))) - 1e-10)
        unit = eig.eigenvectors.conj().T @ eig.eigenvectors - np.eye(d)
        yield ("herm_eig orthonormality", float(np.max(np.abs(unit))) - 1e-10)
        yield ("herm_eig ascending",
               float(np.max(np.diff(eig.eigenvalues) * -1, initial=-1.0)))
        m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        yield ("trace_norm dominates trace",
               float(abs(np.trace(m))) - linalg.trace_norm(m))
        rho = channel.random_state(4, rng).matrix
        red = linalg.partial_trace(rho, [2, 2], keep={0})
        yield ("partial_trace preserves trace",
               float(abs(red.trace() - rho.trace())) - 1e-12)


def _suite_channel(rng, count):
    for _ in range(count):
        d_in = int(rng.integers(2, 4))
        d_out = int(rng.integers(2, 4))
        chan = channel.random_channel(d_in, d_out, 2, rng)
        back = channel.from_choi(chan.choi, d_in, d_out)
        rho = channel.random_state(d_in, rng)
        diff = channel.apply(chan, rho).matrix - channel.apply(back, rho).matrix
        yield ("choi/kraus round trip", float(np.max(np.abs(diff))) - 1e-9)
        other = channel.random_channel(d_in, d_in, 2, rng)
        comp = channel.compose(chan, other)
        gram = sum(k.conj().T @ k for k in comp.kraus)
        yield ("compose trace preserving",
               float(np.max(np.abs(gram - np.eye(d_in)))) - 1e-9)
        pre = coherence.sample_free_channel(2, int(rng.integers(2 ** 31)))
        post = coherence.sample_free_channel(2, int(rng.integers(2 ** 31)))
        mio = coherence.sample_free_channel(2, int(rng.integers(2 ** 31)))
        lam = channel.superop_apply(channel.FreeSuperOp(pre, post, 1), mio)
        yield ("superop keeps MIO closed",
               0.0 if coherence.is_mio(lam, 1e-9) else 1.0)


def _suite_coherence(rng, count, mono_tol):
    for _ in range(count):
        d = int(rng.integers(2, 5))
        rho = channel.random_state(d, rng)
        yield ("c_r nonnegative", -coherence.c_r(rho) - 1e-12)
        yield ("rel_entropy to dephased equals c_r",
               abs(coherence.rel_entropy(rho, coherence.dephase(rho))
                   - coherence.c_r(rho)) - 1e-10)
        free = coherence.sample_free_channel(d, int(rng.integers(2 ** 31)))
        yield ("c_r monotone under free channels",
               coherence.c_r(channel.apply(free, rho)) - coherence.c_r(rho)
               - mono_tol)
        sig = channel.random_state(int(rng.integers(2, 4)), rng)
        yield ("c_r additive on products",
               abs(coherence.c_r(channel.QState(np.kron(rho.matrix, sig.matrix)))
                   - coherence.c_r(rho) - coherence.c_r(sig)) - 1e-9)


def _suite_sdp(rng, count):
    for _ in range(count):
        n, m = 4, 3
        basis = np.linalg.qr(rng.standard_normal((n, n)))[0]
        lam = np.concatenate([rng.random(2) + 0.5, np.zeros(n - 2)])
        mu = np.concatenate([np.zeros(2), rng.random(n - 2) + 0.5])
        xstar = (basis * lam) @ basis.T
        sstar = (basis * mu) @ basis.T
        amats = [0.5 * (a + a.T) for a in rng.standard_normal((m, n, n))]
        ystar = rng.standard_normal(m)
        cmat = sum(y * a for y, a in zip(ystar, amats)) + sstar
        problem = sdp.SdpProblem(
            blocks=[n], objective={0: cmat},
            equality_constraints=[({0: a}, float(np.vdot(a, xstar).real))
                                  for a in amats])
        sol = sdp.solve(problem)
        target = float(np.vdot(cmat, xstar).real)
        yield ("planted optimum recovered",
               abs(sol.primal_value - target) / (1 + abs(target)) - 1e-6)
        yield ("planted status optimal", 0.0 if sol.status == "optimal" else 1.0)
        h = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        h = 0.5 * (h + h.conj().T)
        emb = sdp.complex_to_real_embedding(h)
        yield ("embedding round trip",
               float(np.max(np.abs(sdp.real_embedding_to_complex(emb) - h))))
        spec_pair = np.sort(np.concatenate([np.linalg.eigvalsh(h)] * 2))
        yield ("embedding doubles spectrum",
               float(np.max(np.abs(np.linalg.eigvalsh(emb) - spec_pair))) - 1e-10)


def _suite_monotones(rng, count, seed):
    for _ in range(max(2, count // 4)):
        a = channel.random_channel(2, 2, 2, rng)
        b = channel.random_channel(2, 2, 2, rng)
        yield ("c_r_i additive under tensor",
               abs(monotones.c_r_i(channel.tensor(a, b))
                   - monotones.c_r_i(a) - monotones.c_r_i(b)) - 1e-8)
        yield ("c_r_i below c_max",
               monotones.c_r_i(a) - monotones.c_max(a) - 1e-6)
    for _ in range(max(2, count // 4)):
        mio = coherence.sample_free_channel(2, int(rng.integers(2 ** 31)))
        yield ("c_max vanishes on MIO", abs(monotones.c_max(mio)) - 1e-6)
        yield ("MIO consistency of c_r_i",
               abs(monotones.c_r_i(mio)) - 1e-8)
    rot = channel.rotation_unitary(np.pi / 10)
    yield ("c_max subadditive over two copies",
           monotones.c_max_tensor(rot, 2) - monotones.c_max(rot) - 1e-6)
    battery = monotones.verify_monotonicity(rot, max(2, count // 2), seed)
    yield ("monotonicity battery on c_r_i",
           float(battery.violations_c_r_i))
    yield ("monotonicity battery on c_r_b search",
           float(battery.violations_c_r_b))
    for eps in (1e-3, 1e-2):
        for _ in range(max(1, count // 8)):
            base = channel.random_channel(2, 2, 2, rng)
            mixed = channel.mix_channels(
                [base, channel.constant_channel(
                    channel.QState(np.eye(2) / 2), dim_in=2)], [0.4, 0.6])
            deph = channel.compose(channel.dephasing_channel(2), mixed)
            full = monotones.diamond_distance(mixed, deph)
            t = min(1.0, eps / max(full, 1e-9))
            nearby = channel.mix_channels([mixed, deph], [1 - t, t])
            dist = monotones.diamond_distance(mixed, nearby)
            yield ("c_r_i continuity in diamond distance",
                   abs(monotones.c_r_i(mixed) - monotones.c_r_i(nearby))
                   - 4 * dist * np.log2(2) - 1e-6)


def cmd_verify(args) -> int:
    count = max(1, args.trials)
    mono_tol = 1e-8 if args.corrupt_tolerance is None else args.corrupt_tolerance
    battery = _Battery()
    rng = np.random.default_rng(args.seed)
    try:
        battery.run("linalg", _suite_linalg(rng, count))
        battery.run("channel", _suite_channel(rng, count))
        battery.run("coherence", _suite_coherence(rng, count, mono_tol))
        battery.run("sdp", _suite_sdp(rng, count))
        battery.run("monotones", _suite_monotones(rng, count, args.seed))
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    total_violations = 0
    for name, violations, total in battery.suites:
        total_violations += violations
        print(f"{name}: {total - violations}/{total} checks ok")
    if total_violations:
        with open(DIAGNOSTICS_FILE, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(battery.worst, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"{total_violations} violation(s); worst case written to "
              f"{DIAGNOSTICS_FILE}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chancoh",
        description="Coherence monotones of quantum channels")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_search_flags(p):
        p.add_argument("--ancilla-dim", type=int, default=None,
                       help="ancilla dimension for the boost search "
                            "(default: channel input dim)")
        p.add_argument("--restarts", type=int, default=64,
                       help="random restarts for the boost search")
        p.add_argument("--seed", type=int, default=0, help="RNG seed")
        p.add_argument("--tolerance", type=float, default=1e-9,
                       help="ascent step tolerance")

    p_an = sub.add_parser("analyze", help="monotone report for a channel file")
    p_an.add_argument("channel", help="channel JSON file")
    add_search_flags(p_an)
    p_an.add_argument("--out", default=None, help="write a JSON report here")
    p_an.set_defaults(func=cmd_analyze)

    p_sw = sub.add_parser("sweep-rotation",
                          help="CSV sweep of rotation channels")
    p_sw.add_argument("--theta-min", type=float, default=0.0)
    p_sw.add_argument("--theta-max", type=float, default=math.pi / 4)
    p_sw.add_argument("--steps", type=int, default=50)
    add_search_flags(p_sw)
    p_sw.add_argument("--out", required=True, help="output CSV path")
    p_sw.set_defaults(func=cmd_sweep_rotation)

    p_di = sub.add_parser("diamond",
                          help="diamond distance between two channel files")
    p_di.add_argument("channel_a")
    p_di.add_argument("channel_b")
    p_di.set_defaults(func=cmd_diamond)

    p_ve = sub.add_parser("verify", help="run the randomized invariant batteries")
    p_ve.add_argument("--seed", type=int, default=0)
    p_ve.add_argument("--trials", type=int, default=20,
                      help="sample count per battery")
    p_ve.add_argument("--corrupt-tolerance", type=float, default=None,
                      help="test hook: override the monotonicity tolerance "
                           "(negative values force a failing battery)")
    p_ve.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
