"""Command-line front end.

Subcommands::

    posforms analyze  INPUT            full positivity report for a form or matrix
    posforms family   J K              classification table of the Omega_a family
    posforms pair     OMEGA THETA      wedge pairing (exit code 3 when negative)
    posforms reduce   INPUT            hyperplane split and transfer checks
    posforms certify-strong INPUT      strong-positivity certificate search

INPUT is a path to a form or matrix JSON literal, or ``-`` for stdin.
Exit codes: 0 success, 2 invalid input, 3 negative pairing, 4 internal
inconsistency (a report contradicting the cone inclusions).
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction

import numpy as np

from . import exact as ex
from . import serialization as ser
from .exterior import Form, Frame, is_real
from .quadratic import NotHermitianError, NotRealError, eigen, form_from_matrix, gram_matrix, \
    hermitian_positivity
from .reduction import check_positivity_transfer, coordinate_frames, split
from .strong import (NNLSConfig, RefuteConfig, certify_strong_by_duality, nnls_decompose, pair,
                     refute_strong, strong_verdict)
from .verdicts import Status
from .weak import (WeakConfig, family_verdict_from_abs2, omega_family, screen, weak_verdict)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NEGATIVE_PAIRING = 3
EXIT_INCONSISTENT = 4

CHECK, CROSS = "✓", "✗"


class InvalidInput(Exception):
    pass


class Inconsistency(Exception):
    pass


# input -------------------------------------------------------------------


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise InvalidInput(f"cannot read {path}: {err.strerror}") from err


def load_form(path: str, exact: bool) -> tuple[Form, dict]:
    """Parse a form or matrix literal into a Form; returns the form and the parsed JSON."""
    try:
        obj = ser.loads(_read(path), exact=exact)
        kind, value = ser.load_input(obj, exact=exact)
        form = form_from_matrix(value) if kind == "matrix" else value
    except (ValueError, TypeError) as err:
        raise InvalidInput(str(err)) from err
    return form, obj


def _parse_vector(text: str, exact: bool, name: str) -> np.ndarray:
    try:
        obj = ser.loads(text, exact=exact)
        if not isinstance(obj, list):
            raise ser.SchemaError(f"{name} must be a JSON list")
        vals = [ser.scalar_from_json(x if isinstance(x, dict) else {"re": x, "im": 0}, exact)
                for x in obj]
    except ValueError as err:
        raise InvalidInput(f"{name}: {err}") from err
    return ex.to_exact_array(vals) if exact else np.array(vals, dtype=complex)


def _rationals(text: str) -> list[Fraction]:
    if not text.strip():
        return []
    try:
        return [Fraction(t.strip()) for t in text.split(",")]
    except ValueError as err:
        raise InvalidInput(f"bad list {text!r}: {err}") from err


# consistency -------------------------------------------------------------


def _positive(v) -> bool:
    return v is not None and v.status in (Status.CERTIFIED, Status.NUMERICALLY_POSITIVE)


def _negative(v) -> bool:
    return v is not None and v.status is Status.REFUTED


def check_inclusions(verdicts: dict) -> list[str]:
    """Contradictions with strong ⊂ Hermitian ⊂ weak and strict ⊂ non-strict."""
    order = ["strong", "hermitian", "weak"]
    problems = []
    for strict in (False, True):
        for i, inner in enumerate(order):
            for outer in order[i + 1:]:
                a, b = verdicts.get((inner, strict)), verdicts.get((outer, strict))
                if _positive(a) and _negative(b):
                    problems.append(f"{inner}{' strict' if strict else ''} holds but "
                                    f"{outer}{' strict' if strict else ''} is refuted")
    for cone in order:
        a, b = verdicts.get((cone, True)), verdicts.get((cone, False))
        if _positive(a) and _negative(b):
            problems.append(f"strict {cone} holds but {cone} is refuted")
    return problems


# output ------------------------------------------------------------------


def _verdict_json(v) -> dict | None:
    if v is None:
        return None
    out = {"cone": v.cone, "strict": v.strict, "status": v.status.value,
           "provenance": v.provenance, "value": v.value}
    if v.witness is not None:
        out["witness"] = v.witness
    if "restriction_value" in v.details:
        out["restriction_value"] = v.details["restriction_value"]
    return ser.to_plain(out)


def _emit(report: dict, args, text_fn) -> None:
    if args.json:
        sys.stdout.write(ser.dumps(report) + "\n")
    else:
        sys.stdout.write(text_fn(report))


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


# analyze -----------------------------------------------------------------


def _weak_config(args, strict: bool) -> WeakConfig:
    return WeakConfig(starts=args.starts, seed=args.seed, maxiter=args.maxiter, tol=args.tol,
                      strict=strict)


def cmd_analyze(args) -> int:
    t0 = time.perf_counter()
    form, obj = load_form(args.input, args.exact)
    real = is_real(form)
    report = {"input": ser.to_plain(obj), "exact": form.exact, "real": real,
              "config": _config(args)}
    if not real:
        raise InvalidInput("form is not real")
    if form.p != form.q:
        raise InvalidInput(f"positivity needs a (p,p)-form, got ({form.p},{form.q})")
    A = gram_matrix(form)
    dec = eigen(A, args.tol)
    report["eigenvalues"] = dec.eigenvalues
    report["rank"] = dec.rank
    report["signature"] = list(dec.signature)
    verdicts = {}
    for strict in (False, True):
        verdicts[("hermitian", strict)] = hermitian_positivity(form, strict=strict, tol=args.tol)
    c4 = (form.n, form.p) == (4, 2)
    certificate = None
    if c4:
        report["screen"] = {"nonstrict": _screen_json(screen(A, False, args.tol)),
                            "strict": _screen_json(screen(A, True, args.tol))}
        for strict in (False, True):
            verdicts[("weak", strict)] = weak_verdict(form, _weak_config(args, strict))
        refute = RefuteConfig(samples=args.samples, seed=args.seed)
        decompose = NNLSConfig(samples=args.samples, seed=args.seed)
        verdicts[("strong", False)], certificate = strong_verdict(form, False, refute, decompose)
        verdicts[("strong", True)], _ = strong_verdict(form, True, refute, decompose)
    problems = check_inclusions(verdicts)
    if problems:
        raise Inconsistency("; ".join(problems))
    report["verdicts"] = {("strict_" if s else "") + c: _verdict_json(v)
                          for (c, s), v in sorted(verdicts.items(), key=lambda kv: (kv[0][1], kv[0][0]))}
    if certificate is not None:
        report["strong_certificate"] = _certificate_json(certificate)
    if args.reduce:
        report["reductions"] = _transfers(form, args)
    if args.timing:
        report["timing_seconds"] = time.perf_counter() - t0

    def text(r):
        lines = [f"form on C^{form.n}, bidegree ({form.p},{form.p}), "
                 f"{'exact' if form.exact else 'float'}, real: {r['real']}",
                 "eigenvalues: " + ", ".join(_fmt(float(x)) for x in r["eigenvalues"]),
                 f"rank: {r['rank']}  signature (+,-,0): {tuple(r['signature'])}"]
        if "screen" in r:
            for key in ("nonstrict", "strict"):
                s = r["screen"][key]
                failed = [c["number"] for c in s["checks"] if not c["passed"]]
                lines.append(f"screen ({key}): {'pass' if not failed else 'fail ' + str(failed)}")
        for name, v in r["verdicts"].items():
            val = "" if v["value"] is None else f"  value={_fmt(v['value'])}"
            lines.append(f"{name:18s} {v['status']:21s} {v['provenance']}{val}")
        if "strong_certificate" in r:
            lines.append(f"strong certificate: {r['strong_certificate']['kind']}")
        for red in r.get("reductions", []):
            lines.append(f"transfer frame e{red['frame']} ({red['cls']}): "
                         f"{'pass' if red['passed'] else 'FAIL'}{' (vacuous)' if red['vacuous'] else ''}")
        if "timing_seconds" in r:
            lines.append(f"time: {r['timing_seconds']:.2f} s")
        return "\n".join(lines) + "\n"

    _emit(report, args, text)
    return EXIT_OK


def _screen_json(rep) -> dict:
    return {"strict": rep.strict, "passed": rep.passed,
            "checks": [{"number": c.number, "name": c.name, "passed": c.passed,
                        "violations": ser.to_plain(c.violations),
                        "tight": [ser.to_plain(e["indices"]) for e in c.entries if e["tight"]]}
                       for c in rep.checks]}


def _certificate_json(cert) -> dict:
    payload = {k: v for k, v in cert.payload.items()
               if k not in ("generator_matrices", "witness_matrix", "reconstruction")}
    return ser.to_plain({"kind": cert.kind, "strict": cert.strict, **payload})


def _transfers(form: Form, args) -> list[dict]:
    out = []
    classes = ["hermitian"] + (["weak"] if (form.n, form.p) == (4, 2) else [])
    for j, frame in enumerate(coordinate_frames(form.n, exact=form.exact), start=1):
        for cls in classes:
            r = check_positivity_transfer(form, frame, cls=cls, tol=args.tol)
            out.append({"frame": j, "cls": cls, "precondition": r.precondition,
                        "vacuous": r.vacuous, "passed": r.passed,
                        "xi_eigenvalues": r.xi_eigenvalues, "theta_eigenvalues": r.theta_eigenvalues})
    return out


def _config(args) -> dict:
    keys = ("tol", "starts", "seed", "maxiter", "samples", "exact")
    return {k: getattr(args, k) for k in keys if hasattr(args, k)}


# family ------------------------------------------------------------------

ROW_LABELS = {(-1,): "|a|<1", (0,): "|a|=1", (1, -1): "1<|a|<2", (1, 0): "|a|=2", (1, 1): "|a|>2"}


def _row_label(j: int, k: int, m2: Fraction) -> str:
    def cmp(x, y):
        return (x > y) - (x < y)
    c1 = cmp(m2, 1)
    if j + k != 7 or c1 <= 0:
        return ROW_LABELS[(c1,)] if c1 <= 0 else "|a|>1"
    return ROW_LABELS[(1, cmp(m2, 4))]


def _phase_value(frac: Fraction) -> complex:
    """e^{i pi frac}, exact on multiples of 1/2."""
    if (2 * frac).denominator == 1:
        return complex(1j ** int(2 * frac % 4))
    return complex(np.exp(1j * np.pi * float(frac)))


def _numeric_row(j: int, k: int, a: complex, args) -> dict:
    om = omega_family(j, k, a)
    out = {}
    for strict in (False, True):
        s = "strict_" if strict else ""
        out[s + "weak"] = weak_verdict(om, _weak_config(args, strict)).status.value
        out[s + "hermitian"] = hermitian_positivity(om, strict=strict, tol=args.tol).status.value
        out[s + "strong"] = strong_verdict(
            om, strict, RefuteConfig(samples=0, seed=args.seed),
            NNLSConfig(samples=args.samples, seed=args.seed))[0].status.value
    return out


COLUMNS = ("weak", "strict_weak", "hermitian", "strict_hermitian", "strong", "strict_strong")


def numeric_disagreements(exact_row: dict, numeric: dict) -> list[str]:
    """Columns where a numerical status contradicts the exact verdict."""
    bad = []
    for col in COLUMNS:
        st = numeric[col]
        if exact_row[col] and st == Status.REFUTED.value:
            bad.append(col)
        if not exact_row[col] and st in (Status.CERTIFIED.value, Status.NUMERICALLY_POSITIVE.value):
            bad.append(col)
    for col in ("weak", "strict_weak"):
        if not exact_row[col] and numeric[col] != Status.REFUTED.value:
            bad.append(col)
    return sorted(set(bad), key=COLUMNS.index)


def cmd_family(args) -> int:
    j, k = args.j, args.k
    if not (1 <= j < k <= 6):
        raise InvalidInput(f"need 1 <= J < K <= 6, got {j} {k}")
    moduli = _rationals(args.moduli)
    phases = _rationals(args.phases)
    if any(m < 0 for m in moduli):
        raise InvalidInput("moduli must be nonnegative")
    rows = []
    disagreements = 0
    for m in moduli:
        for ph in phases:
            verdict = family_verdict_from_abs2(j, k, m * m)
            row = {"modulus": m, "phase_over_pi": ph, "label": _row_label(j, k, m * m),
                   **dict(zip(COLUMNS, verdict.as_tuple()))}
            if args.numeric:
                a = float(m) * _phase_value(ph)
                num = _numeric_row(j, k, a, args)
                row["numeric"] = num
                row["disagreements"] = numeric_disagreements(row, num)
                disagreements += bool(row["disagreements"])
            rows.append(row)
    report = {"j": j, "k": k, "antidiagonal": j + k == 7, "rows": rows, "config": _config(args)}

    def text(r):
        head = ["a", "class"] + list(COLUMNS)
        lines = ["  ".join(f"{h:>16s}" if i == 0 else f"{h:>8s}" if i == 1 else h for i, h in enumerate(head))]
        for row in r["rows"]:
            a = f"{row['modulus']}*e^(i pi {row['phase_over_pi']})"
            cells = [f"{a:>16s}", f"{row['label']:>8s}"]
            cells += [(CHECK if row[c] else CROSS).center(len(c)) for c in COLUMNS]
            line = "  ".join(cells)
            if row.get("disagreements"):
                line += "  numeric disagreement: " + ", ".join(row["disagreements"])
            lines.append(line)
        return "\n".join(lines) + "\n"

    _emit(report, args, text)
    return EXIT_INCONSISTENT if disagreements else EXIT_OK


# pair --------------------------------------------------------------------


def cmd_pair(args) -> int:
    om, _ = load_form(args.omega, args.exact)
    th, _ = load_form(args.theta, args.exact)
    try:
        value = pair(om, th)
    except ValueError as err:
        raise InvalidInput(str(err)) from err
    negative = value < 0 if isinstance(value, Fraction) else value < -args.tol
    report = {"pair": value, "negative": bool(negative)}
    _emit(report, args, lambda r: f"pair = {ser.to_plain(value)}\n")
    return EXIT_NEGATIVE_PAIRING if negative else EXIT_OK


# reduce ------------------------------------------------------------------


def _frame_from_args(args, n: int, exact: bool) -> Frame:
    if args.frame is not None:
        if not 1 <= args.frame <= n:
            raise InvalidInput(f"coordinate frame index must be in 1..{n}")
        return Frame.coordinate(args.frame, n, exact=exact)
    if args.v0 is None:
        raise InvalidInput("give --frame J or --v0 (and optionally --alpha)")
    v0 = _parse_vector(args.v0, exact, "--v0")
    if len(v0) != n:
        raise InvalidInput(f"--v0 has length {len(v0)}, expected {n}")
    try:
        if args.alpha is None:
            return Frame.from_vector(v0)
        alpha = _parse_vector(args.alpha, exact, "--alpha")
        if len(alpha) != n:
            raise InvalidInput(f"--alpha has length {len(alpha)}, expected {n}")
        if args.normalize:
            value = sum((x * y for x, y in zip(alpha, v0)), ex.unit(exact) * 0)
            if ex.is_zero(value) or abs(complex(value)) < 1e-14:
                raise InvalidInput("degenerate frame: alpha(v0) = 0")
            alpha = alpha / value
        return Frame(v0, alpha)
    except ValueError as err:
        raise InvalidInput(f"degenerate frame: {err}") from err


def cmd_reduce(args) -> int:
    form, _ = load_form(args.input, args.exact)
    if not is_real(form) or form.p != form.q:
        raise InvalidInput("reduce needs a real (p,p)-form")
    frame = _frame_from_args(args, form.n, form.exact)
    s = split(form, frame)
    rec = s.reconstruct()
    exact_ok = rec == form if form.exact else rec.allclose(form, 1e-13)
    classes = ["hermitian"] + (["weak"] if (form.n, form.p) == (4, 2) else [])
    transfers = []
    for cls in classes:
        r = check_positivity_transfer(form, frame, cls=cls, tol=args.tol)
        transfers.append(ser.to_plain(r))
    report = {"frame": {"v0": frame.v0, "alpha": frame.alpha}, "xi": s.xi_h, "eta": s.eta_h,
              "eta_bar": s.zeta_h, "theta": s.theta_h, "eta_is_zero": s.eta_is_zero,
              "reconstruction_ok": bool(exact_ok), "transfers": transfers}
    report = ser.to_plain(report)

    def text(r):
        lines = [f"Xi terms: {len(r['xi']['terms'])}, eta terms: {len(r['eta']['terms'])}, "
                 f"theta terms: {len(r['theta']['terms'])}",
                 f"reconstruction exact: {r['reconstruction_ok']}"]
        for t in r["transfers"]:
            lines.append(f"transfer ({t['cls']}): precondition {t['precondition']}, "
                         f"{'pass' if t['passed'] else 'FAIL'}{' (vacuous)' if t['vacuous'] else ''}")
        return "\n".join(lines) + "\n"

    _emit(report, args, text)
    return EXIT_OK


# certify-strong ----------------------------------------------------------


def cmd_certify_strong(args) -> int:
    form, _ = load_form(args.input, args.exact)
    if (form.n, form.p, form.q) != (4, 2, 2):
        raise InvalidInput("certify-strong needs a (2,2)-form on C^4")
    if not is_real(form):
        raise InvalidInput("form is not real")
    dual = certify_strong_by_duality(form)
    ref = refute_strong(form, RefuteConfig(samples=args.samples, seed=args.seed, tol=args.tol))
    dec = None
    if dual is None and ref is None:
        dec = nnls_decompose(form, NNLSConfig(samples=args.samples, seed=args.seed))
    if (dual is not None or dec is not None) and ref is not None:
        raise Inconsistency("form both certified and refuted as strongly positive")
    chosen = dual or ref or dec
    report = {"certificate": None if chosen is None else _certificate_json(chosen),
              "result": "inconclusive" if chosen is None else
              ("refuted" if chosen is ref else "certified"),
              "config": _config(args)}

    def text(r):
        c = r["certificate"]
        if c is None:
            return "strong positivity: inconclusive\n"
        extra = f", pair={_fmt(c['pair'])}" if "pair" in c else ""
        extra += f", residual={_fmt(c['residual'])}" if "residual" in c else ""
        return f"strong positivity: {r['result']} ({c['kind']}{', strict' if c['strict'] else ''}{extra})\n"

    _emit(report, args, text)
    return EXIT_OK


# parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="posforms", description=__doc__.split("\n")[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9, help="Numerical tolerance.")
    common.add_argument("--starts", type=int, default=200, help="Multistart count for weak tests.")
    common.add_argument("--seed", type=int, default=0, help="Seed for all randomized steps.")
    common.add_argument("--maxiter", type=int, default=500, help="Iterations per start.")
    common.add_argument("--samples", type=int, default=2000, help="Sampled decomposables.")
    common.add_argument("--exact", action="store_true", help="Rational (exact) arithmetic.")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="Emit JSON.")
    fmt.add_argument("--text", dest="json", action="store_false", help="Emit text (default).")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="Full positivity report.")
    p.add_argument("input")
    p.add_argument("--reduce", action="store_true", help="Add coordinate-frame transfer checks.")
    p.add_argument("--timing", action="store_true", help="Include wall time in the report.")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("family", parents=[common], help="Omega_a classification table.")
    p.add_argument("j", type=int)
    p.add_argument("k", type=int)
    p.add_argument("--moduli", default="1/2,1,3/2,2,5/2", help="Comma-separated |a| values.")
    p.add_argument("--phases", default="0,1/2,1/4", help="Comma-separated arg(a)/pi values.")
    p.add_argument("--numeric", action="store_true", help="Also run the numerical pipeline.")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("pair", parents=[common], help="Wedge pairing of two forms.")
    p.add_argument("omega")
    p.add_argument("theta")
    p.set_defaults(func=cmd_pair)

    p = sub.add_parser("reduce", parents=[common], help="Hyperplane split report.")
    p.add_argument("input")
    p.add_argument("--frame", type=int, help="Coordinate frame v0 = e_J, alpha = omega^J.")
    p.add_argument("--v0", help="JSON list for v0.")
    p.add_argument("--alpha", help="JSON list for alpha (default conj(v0)/|v0|^2).")
    p.add_argument("--normalize", action="store_true", help="Rescale alpha so alpha(v0) = 1.")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("certify-strong", parents=[common], help="Strong positivity certificate.")
    p.add_argument("input")
    p.set_defaults(func=cmd_certify_strong)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInput, NotRealError, NotHermitianError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    except Inconsistency as err:
        print(f"internal inconsistency: {err}", file=sys.stderr)
        return EXIT_INCONSISTENT


if __name__ == "__main__":
    sys.exit(main())
