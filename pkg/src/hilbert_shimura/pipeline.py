"""Run configuration, the lazily built worked example, and its checks.

Each check returns a ``CheckResult``; ``verify_example`` runs them in order
and keeps going after a failure.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Callable

from .brandt import (
    ClassSet,
    class_set,
    cusp_eigenvectors,
    good_primes,
    hecke_matrix,
    is_equivalent,
    is_self_adjoint,
    order_level,
    p_neighbors,
    prime_hecke_matrices,
)
from .errors import ConfigError, HilbertShimuraError
from .halfint import (
    ThetaEngine,
    ThetaTable,
    half_hecke,
    kohnen_admissible,
    theta_of,
    xi_range,
)
from .lattice import enumerate_short, naive_enumerate
from .numfield import FieldElement, PrimeIdeal, QuadraticField, epsilon_xi, parse_element
from .quatalg import QuaternionAlgebra, QuaternionLattice, load_order_fixture
from .shimlift import (
    EllipticCurve,
    IdealSeries,
    ZeroReport,
    classify_zeros,
    curve_ap,
    lift_of_vector,
    level_check,
    newform_coeffs,
    odd_proportional,
    waldspurger_factor,
)

FIXTURE_DIR = Path(__file__).parent / "fixtures"
DEFAULT_CONFIG = FIXTURE_DIR / "qsqrt5.json"


@dataclass
class RunConfig:
    D: int = 5
    algebra: tuple[int, int] = (-1, -1)
    order: str = str(FIXTURE_DIR / "qsqrt5_R.json")
    ideal: str | None = str(FIXTURE_DIR / "qsqrt5_I.json")
    curve: str = str(FIXTURE_DIR / "qsqrt5_E.json")
    trace_bound: int = 100
    norm_bound: int = 200
    prime_norm_bound: int = 60
    prime_norms: list[int] | None = None
    theta_check_trace_bound: int = 40
    theta_check_prime_norms: list[int] = field(default_factory=lambda: [9, 11])
    out: str = "artifacts"
    workers: int = 1
    seed: int = 0
    expected: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        data = asdict(self)
        data["algebra"] = list(self.algebra)
        return data


_INT_FIELDS = ("D", "trace_bound", "norm_bound", "prime_norm_bound", "theta_check_trace_bound", "workers", "seed")


def load_config(path: str | Path | None = None, **overrides) -> RunConfig:
    """Read a JSON config; fixture paths are resolved relative to the file."""
    path = Path(path) if path is not None else DEFAULT_CONFIG
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(data) - known - {"description"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    data.pop("description", None)
    base = path.parent
    for key in ("order", "ideal", "curve"):
        if data.get(key):
            p = Path(data[key])
            data[key] = str(p if p.is_absolute() else base / p)
    data.update({k: v for k, v in overrides.items() if v is not None})
    for key in _INT_FIELDS:
        if key in data and not isinstance(data[key], int):
            raise ConfigError(f"{key} must be an integer")
    if "algebra" in data:
        alg = data["algebra"]
        if not (isinstance(alg, (list, tuple)) and len(alg) == 2 and all(isinstance(x, int) for x in alg)):
            raise ConfigError("algebra must be a pair of integers [a, b]")
        if not (alg[0] < 0 and alg[1] < 0):
            raise ConfigError("algebra (a, b) must be totally definite: a, b < 0")
        data["algebra"] = tuple(alg)
    cfg = RunConfig(**data)
    for key in ("order", "curve"):
        if not Path(getattr(cfg, key)).exists():
            raise ConfigError(f"{key} fixture not found: {getattr(cfg, key)}")
    if cfg.trace_bound < 0 or cfg.norm_bound < 1 or cfg.workers < 1:
        raise ConfigError("bounds must be nonnegative and workers at least 1")
    return cfg


class Example:
    """The worked example, built on demand and cached."""

    def __init__(self, cfg: RunConfig | None = None):
        self.cfg = cfg or load_config()
        try:
            self.K = QuadraticField(self.cfg.D)
            self.algebra = QuaternionAlgebra(self.K, *self.cfg.algebra)
        except (ValueError, AssertionError) as exc:
            raise ConfigError(f"bad field or algebra: {exc}")
        self._matrices: dict = {}

    @cached_property
    def R(self) -> QuaternionLattice:
        return load_order_fixture(self.cfg.order, self.algebra)

    @cached_property
    def I(self) -> QuaternionLattice | None:
        return load_order_fixture(self.cfg.ideal, self.algebra) if self.cfg.ideal else None

    @cached_property
    def S(self) -> ClassSet:
        return class_set(self.R)

    @cached_property
    def level(self):
        return order_level(self.R)

    @cached_property
    def curve(self) -> EllipticCurve:
        return EllipticCurve.load(self.cfg.curve, self.cfg.D)

    @cached_property
    def engine(self) -> ThetaEngine:
        return ThetaEngine(self.S, self.cfg.trace_bound)

    @cached_property
    def newform(self) -> IdealSeries:
        return newform_coeffs(self.curve, bound=self.cfg.norm_bound)

    def primes_of_norms(self, norms) -> list[PrimeIdeal]:
        want = set(norms)
        return [P for P in self.K.primes_up_to(max(want)) if P.norm in want] if want else []

    def good_primes(self, bound: int) -> list[PrimeIdeal]:
        return good_primes(self.level, bound=bound)

    def matrices(self, primes) -> dict:
        todo = [P for P in primes if P not in self._matrices]
        for P, T in zip(todo, prime_hecke_matrices(self.S, todo, self.cfg.workers)):
            self._matrices[P] = T
        return {P: self._matrices[P] for P in primes}

    @cached_property
    def cusp_vector(self):
        """v = [R] - [I_1] as a class vector (the cusp form of the example)."""
        return self.S.vector([1, -1] + [0] * (len(self.S) - 2))

    def theta(self, v, T: int, ideals=None, xis=None) -> ThetaTable:
        return theta_of(v, T, ideals=ideals, engine=self.engine, xis=xis)

    @cached_property
    def class_tables(self) -> list[ThetaTable]:
        T = self.cfg.trace_bound
        return [self.theta(self.S.basis_vector(i), T) for i in range(len(self.S))]

    def zero_report(self, T: int | None = None) -> ZeroReport:
        T = self.cfg.trace_bound if T is None else T
        fR, fI = self.class_tables[:2]
        return classify_zeros(fR, fI, T)

    def first_lift_xi(self, T: int = 40) -> FieldElement:
        """Least admissible xi (by trace, then coordinates) with lambda(xi, O) != 0."""
        O = self.K.unit_ideal
        f = self.theta(self.cusp_vector, T)
        for xi in f.xis():
            if xi and kohnen_admissible(xi) and f.value(xi, O):
                return xi
        raise HilbertShimuraError("no admissible xi with a nonzero coefficient in range")

    def lift(self, xi: FieldElement, dyadic: str = "zero") -> IdealSeries:
        return lift_of_vector(self.cusp_vector, xi, self.cfg.norm_bound, self.engine, dyadic=dyadic)


# -- checks -------------------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    ok: bool
    expected: object = None
    actual: object = None
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.ok else 'FAIL'}] {self.name} ({self.seconds:.1f}s) {self.detail}".rstrip()

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "expected": _jsonable(self.expected),
                "actual": _jsonable(self.actual), "detail": self.detail}


def _jsonable(x):
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set)):
        items = [_jsonable(v) for v in x]
        return sorted(items, key=str) if isinstance(x, set) else items
    return str(x)


def _timed(name: str, fn: Callable[[], tuple]) -> CheckResult:
    t = time.time()
    try:
        ok, expected, actual, detail = fn()
    except HilbertShimuraError as exc:
        ok, expected, actual, detail = False, None, None, f"{type(exc).__name__}: {exc}"
    return CheckResult(name, bool(ok), expected, actual, detail, time.time() - t)


def check_class_number(ex: Example) -> CheckResult:
    def run():
        S = ex.S
        expected = ex.cfg.expected.get("class_number", 2)
        equiv = ex.I is not None and len(S) > 1 and is_equivalent(S.reps[1], ex.I)
        return len(S) == expected and equiv, expected, len(S), f"second class equivalent to fixture I: {equiv}"

    return _timed("class number", run)


def check_neighbor_counts(ex: Example, norms=(4, 5, 9, 11)) -> CheckResult:
    def run():
        bad = []
        for P in ex.primes_of_norms(norms):
            for i in range(len(ex.S)):
                if len(ex.S.neighbors(i, P)) != P.norm + 1:
                    bad.append((str(P), i))
            sums = ex.matrices([P])[P].column_sums()
            if sums != [P.norm + 1] * len(ex.S):
                bad.append((str(P), sums))
        return not bad, [], bad, f"norms {list(norms)}"

    return _timed("neighbor counts and column sums", run)


def check_hecke_relations(ex: Example) -> CheckResult:
    def run():
        K, S = ex.K, ex.S
        n = len(S)
        eye = [[int(i == j) for j in range(n)] for i in range(n)]
        T2 = hecke_matrix(S, K.ideal(2))
        T3 = hecke_matrix(S, K.ideal(3))
        T9 = hecke_matrix(S, K.ideal(9), method="direct")
        T6 = hecke_matrix(S, K.ideal(6), method="direct")
        r1 = [list(r) for r in (T3 @ T3).matrix] == [[T9.matrix[i][j] + 9 * eye[i][j] for j in range(n)] for i in range(n)]
        r2 = (T2 @ T3).matrix == T6.matrix
        mats = list(ex.matrices(ex.good_primes(ex.cfg.prime_norm_bound)).values()) + [T6, T9]
        comm = all((A @ B).matrix == (B @ A).matrix for A in mats for B in mats)
        adj = all(is_self_adjoint(S, T) for T in mats)
        detail = f"T3^2=T9+9: {r1}, T2T3=T6: {r2}, commute: {comm}, adjoint: {adj}"
        return r1 and r2 and comm and adj, True, [r1, r2, comm, adj], detail

    return _timed("Hecke relations", run)


def check_duality(ex: Example, bound: int = 11) -> CheckResult:
    def run():
        bad = 0
        total = 0
        for P in ex.good_primes(bound):
            pi = P.generator
            for i in range(len(ex.S)):
                I = ex.S.reps[i]
                piI = I.scale(pi)
                for J in ex.S.neighbors(i, P):
                    total += 1
                    back = p_neighbors(J, P, ex.S.order)
                    if sum(1 for X in back if X == piI) != 1:
                        bad += 1
        return bad == 0, 0, bad, f"{total} neighbor pairs checked"

    return _timed("neighbor duality", run)


def check_eigenvalues(ex: Example) -> CheckResult:
    def run():
        primes = ex.good_primes(ex.cfg.prime_norm_bound)
        eig = cusp_eigenvectors(ex.S, primes, ex.matrices(primes))
        if len(eig) != 1:
            return False, 1, len(eig), "cusp space is not one-dimensional"
        v, lam = eig[0]
        aps = {P: curve_ap(ex.curve, P) for P in primes}
        vec_ok = list(v.coeffs) == list(ex.cusp_vector.coeffs)
        mism = {str(P): (lam[P], aps[P]) for P in primes if lam[P] != aps[P]}
        detail = f"{len(primes)} primes, eigenvector {v.to_json()}"
        return vec_ok and not mism, {str(P): a for P, a in aps.items()}, {str(P): x for P, x in lam.items()}, detail

    return _timed("cusp eigenvalues vs point counts", run)


def check_theta_linearity(ex: Example) -> CheckResult:
    def run():
        T = ex.cfg.theta_check_trace_bound
        O = ex.K.unit_ideal
        xs = [FieldElement(0, 0, ex.K.D)] + [x for x in xi_range(T, ex.K.D, False) if kohnen_admissible(x)]
        bad = []
        for P in ex.primes_of_norms(ex.cfg.theta_check_prime_norms):
            Tp = ex.matrices([P])[P]
            for i in range(len(ex.S)):
                v = ex.S.basis_vector(i)
                f = ex.theta(v, T, ideals=[O, P.ideal, P.ideal.inverse()], xis=xs)
                lhs = half_hecke(f, P)
                rhs = ex.theta(Tp.apply(v), T, xis=xs)
                bad += [(str(P), i, str(x)) for x in xs if lhs.value(x, O) != rhs.value(x, O)]
        return not bad, [], bad, f"{len(xs)} xi per prime and class"

    return _timed("theta linearity", run)


def check_coefficient_laws(ex: Example, T: int | None = None, scale_bound: int | None = None) -> CheckResult:
    """Kohnen plus-space vanishing, support, and scaling against literal lattices."""

    def run():
        K, O = ex.K, ex.K.unit_ideal
        Tb = ex.cfg.trace_bound if T is None else T
        sb = Tb if scale_bound is None else scale_bound
        xs = xi_range(Tb, K.D, False)
        kohnen_bad = [(i, str(x)) for i, f in enumerate(ex.class_tables) for x in xs
                      if x.trace() <= Tb and not kohnen_admissible(x) and f.value(x, O)]
        support_bad = []
        scale_bad = []
        checked = 0
        primes = ex.primes_of_norms([4, 5, 9, 11])
        for i, L in enumerate(ex.engine.lattices):
            for P in primes:
                # a = P^-1: the literal lattice a^-1 L = pi L only takes values in pi^2 O
                table = L.scaled(P.generator).value_table(Tb)
                support_bad += [(i, str(P), str(x)) for x in table if not (x / P.generator ** 2).is_integral()]
            for P in primes[:2]:
                g = P.generator
                literal = L.scaled(g.inverse())
                for x in xs:
                    if x.trace() > sb or not kohnen_admissible(x):
                        continue
                    # lambda(x b^2, O) = N(b) lambda(x, b) with lambda(x, b) counted on b^-1 L
                    lhs = ex.engine.count(i, g * g * x)
                    rhs = literal.count_representations(x)
                    checked += 1
                    if lhs != rhs:
                        scale_bad.append((i, str(P), str(x)))
        ok = not (kohnen_bad or support_bad or scale_bad)
        detail = f"kohnen {len(kohnen_bad)}, support {len(support_bad)}, scaling {len(scale_bad)} of {checked} bad"
        return ok, [0, 0, 0], [len(kohnen_bad), len(support_bad), len(scale_bad)], detail

    return _timed("Kohnen, support and scaling laws", run)


def check_zeros(ex: Example) -> CheckResult:
    def run():
        rep = ex.zero_report()
        want = {parse_element(s, ex.K.D) for s in ex.cfg.expected.get("nontrivial_zeros", [])}
        got = set(rep.nontrivial)
        bad = [P for P, _ in _level_primes(ex)]
        c = bad[0]
        a_bad = ex.curve.bad_coefficients
        trivial_eps = all(epsilon_xi(x, c) == -1 for x in rep.trivial)
        nontrivial_eps = all(epsilon_xi(x, c) == 1 for x in rep.nontrivial)
        wald = all(waldspurger_factor(x, ex.curve, a_bad) == -2 for x in rep.nontrivial)
        wald0 = all(waldspurger_factor(x, ex.curve, a_bad) == 0 for x in rep.trivial)
        # the converse: eps = -1 forces a trivial zero
        from .shimlift import fundamental_admissible
        minus = {x for x in fundamental_admissible(rep.T, ex.K.D) if epsilon_xi(x, c) == -1}
        converse = minus == set(rep.trivial)
        ok = got == want and trivial_eps and nontrivial_eps and wald and wald0 and converse
        detail = (f"{len(rep.trivial)} trivial, {len(rep.nontrivial)} nontrivial, {rep.nonzero_count} nonzero; "
                  f"eps checks {trivial_eps and nontrivial_eps and converse}, Waldspurger factors {wald and wald0}")
        return ok, sorted(map(str, want)), sorted(map(str, got)), detail

    return _timed("zero classification", run)


def _level_primes(ex: Example):
    from .numfield import factor_ideal

    return factor_ideal(ex.level)


def check_lift(ex: Example) -> CheckResult:
    def run():
        xi = ex.first_lift_xi()
        lift = ex.lift(xi)
        alpha, residual = level_check(lift, ex.newform)
        odd_bad = odd_proportional(lift, ex.newform, alpha)
        _, residual_split = level_check(ex.lift(xi, dyadic="split"), ex.newform)
        detail = (f"xi={xi}, alpha={alpha}, odd mismatches {len(odd_bad)}, even residual {residual} "
                  f"(dyadic eps at 2: {residual_split})")
        return alpha != 0 and not odd_bad, 0, len(odd_bad), detail

    return _timed("lift proportionality", run)


def random_unimodular(n: int, rng: random.Random, steps: int = 30) -> list[list[int]]:
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-2, -1, 1, 2])
        U[i] = [a + c * b for a, b in zip(U[i], U[j])]
        if rng.random() < 0.2:
            U[i], U[j] = U[j], U[i]
    return U


def check_enumeration(ex: Example, T: int = 60, trials: int = 20) -> CheckResult:
    def run():
        bad = []
        for i, L in enumerate(ex.engine.lattices):
            fp = {sv.vector for sv in enumerate_short(L.gram, T)}
            naive = {sv.vector for sv in naive_enumerate(L.gram, T)}
            if fp != naive:
                bad.append((i, "naive"))
            rng = random.Random(ex.cfg.seed + i)
            for _ in range(trials):
                U = random_unimodular(6, rng)
                G2 = L.gram.transform(U)
                back = set()
                for sv in enumerate_short(G2, T):
                    v = [sum(sv.vector[k] * U[k][c] for k in range(6)) for c in range(6)]
                    back.add(_canonical(v))
                if back != fp:
                    bad.append((i, "lll"))
        return not bad, [], bad, f"Tr <= {T}, {trials} unimodular trials per class"

    return _timed("enumeration cross-check", run)


def _canonical(v):
    for a in v:
        if a:
            return tuple(v) if a > 0 else tuple(-b for b in v)
    return tuple(v)


def check_nonvanishing(ex: Example) -> CheckResult:
    def run():
        O = ex.K.unit_ideal
        fR, fI = ex.class_tables[:2]
        nz = [x for x in fR.xis() if x and fR.value(x, O) != fI.value(x, O)]
        return bool(nz), True, len(nz), f"first nonzero at {nz[0]}" if nz else "theta(v) vanishes in range"

    return _timed("theta([R]-[I]) nonzero", run)


CHECKS = [
    ("class_number", check_class_number),
    ("neighbor_counts", check_neighbor_counts),
    ("hecke_relations", check_hecke_relations),
    ("duality", check_duality),
    ("eigenvalues", check_eigenvalues),
    ("theta_linearity", check_theta_linearity),
    ("coefficient_laws", check_coefficient_laws),
    ("zeros", check_zeros),
    ("lift", check_lift),
    ("enumeration", check_enumeration),
    ("nonvanishing", check_nonvanishing),
]


def verify_example(cfg: RunConfig | None = None, log: Callable[[str], None] | None = None) -> dict:
    """Run every check; the report lists expected and actual values per item."""
    ex = Example(cfg)
    results = []
    for key, fn in CHECKS:
        res = fn(ex)
        results.append(res)
        if log:
            log(res.line())
    return {
        "ok": all(r.ok for r in results),
        "class_number": len(ex.S),
        "checks": {key: r.to_json() for (key, _), r in zip(CHECKS, results)},
    }
