"""Named verification suites over registered field and parameter matrices."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

from . import checks, spaces
from .errors import ContractError
from .fields import (
    bump_field,
    const_field,
    gaussian_field,
    indicator_field,
    logpower_weight,
    make_example1_field,
    power_field,
    power_weight,
)
from .metric import BetaParams
from .quadrature import QuadratureConfig
from .report import VerificationEntry, VerificationReport


@dataclass(frozen=True)
class SuiteConfig:
    """Everything that determines a report; ``workers`` only affects speed."""

    seed: int = 0
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    ladder_J: int = 16
    metric_triples: int = 100_000
    mc_samples: int = 1_000_000
    lemma4_points: int = 100
    example_J: int = 40
    example_eps: float = 0.25
    example_convention: str = "paper-literal"
    workers: int = 1

    @property
    def cfg(self) -> QuadratureConfig:
        return replace(self.quadrature, seed=self.seed)

    def as_dict(self) -> dict:
        d = asdict(self)
        d.pop("workers")
        d["quadrature"] = self.cfg.as_dict()
        return d


Task = Callable[[], list[VerificationEntry]]


def _one(fn, *args, **kw) -> Task:
    return lambda: [fn(*args, **kw)]


def _many(fn, *args, **kw) -> Task:
    return lambda: list(fn(*args, **kw))


ISO2 = BetaParams.isotropic(2)
ANISO2 = BetaParams((1.0, 1.5))
LEMMA1_PARAMS = ((1.5, 1.75), (1.8, 1.5))


def _lemma_fields(bp: BetaParams):
    return (
        ("const", const_field(bp, half_width=0.5)),
        ("gaussian", gaussian_field(bp)),
        ("power", power_field(bp, 0.25)),
    )


def _tag(bp: BetaParams) -> str:
    return "iso" if bp.is_isotropic else ",".join(f"{b:g}" for b in bp.beta)


# -- suite builders: each returns the task list of one suite --------------------


def _metric_axioms(c: SuiteConfig) -> list[Task]:
    tasks = [_many(checks.check_metric_axioms, c.metric_triples, seed=c.seed)]
    for bp in (BetaParams((1.0, 1.0)), ANISO2):
        tasks.append(_many(checks.check_jacobian_mc, bp, c.mc_samples, c.seed, c.cfg))
    return tasks


def _isotropic_reduction(c: SuiteConfig) -> list[Task]:
    return [_many(checks.check_isotropic_reduction, J=10, cfg=c.cfg, seed=c.seed)]


def _lemma1(c: SuiteConfig) -> list[Task]:
    tasks = []
    for bp in (ISO2, ANISO2):
        for name, f in _lemma_fields(bp):
            for p, lam in LEMMA1_PARAMS:
                cid = f"lemma1[{_tag(bp)},{name},p={p:g},lambda={lam:g}]"
                tasks.append(lambda f=f, p=p, lam=lam, bp=bp, cid=cid: [
                    spaces.check_lemma1(f, p, lam, bp, J=c.ladder_J, cfg=c.cfg, claim_id=cid)[0]])
    for name, f in (("const", const_field(ISO2, half_width=0.5)), ("power", power_field(ISO2, 0.25))):
        tasks.append(_one(spaces.check_lemma1_converse, f, 1.5, None, ISO2, J=c.ladder_J, cfg=c.cfg,
                          r_max=0.5 if name == "const" else 1.0, claim_id=f"lemma1.converse[iso,{name}]"))
    return tasks


def _lemma2(c: SuiteConfig) -> list[Task]:
    tasks = []
    for bp in (ISO2, ANISO2):
        for name, f in _lemma_fields(bp):
            for p, _ in LEMMA1_PARAMS:
                closed = 2.0 ** (bp.n - bp.kernel_exponent(p)) if name == "const" else None
                tasks.append(_one(checks.check_lemma2, f, p, bp, J=c.ladder_J, cfg=c.cfg, closed_form=closed,
                                  claim_id=f"lemma2[{_tag(bp)},{name},p={p:g}]"))
    return tasks


def _lemma3(c: SuiteConfig) -> list[Task]:
    tasks = []
    for bp in (ISO2, ANISO2):
        for name, f in _lemma_fields(bp):
            for p, _ in LEMMA1_PARAMS:
                tasks.append(_one(checks.check_lemma3, f, p, 0.5, bp, J=c.ladder_J, cfg=c.cfg,
                                  claim_id=f"lemma3[{_tag(bp)},{name},p={p:g}]"))
    return tasks


def _coarse3d(cfg: QuadratureConfig) -> QuadratureConfig:
    return replace(cfg, angular_order=min(cfg.angular_order, 12), radial_order=min(cfg.radial_order, 32))


def _theorem1(c: SuiteConfig) -> list[Task]:
    bp3 = BetaParams.isotropic(3)
    return [
        _many(checks.check_growth_function, power_weight(1.0), 0.5, 1.5, ISO2, I_phi=3.0, norm_p=2.0),
        _many(checks.check_theorem1, bump_field(ISO2), const_field(ISO2), power_weight(1.0), 0.5, 1.5, 1.0, ISO2,
              cfg=c.cfg, J=c.ladder_J, fubini=True, claim_id="theorem1[iso,bump,V=1]"),
        _many(checks.check_theorem1, bump_field(bp3), make_example1_field(bp3), logpower_weight(1.0), 0.5, 2.0, 1.0,
              bp3, cfg=_coarse3d(c.cfg), J=c.ladder_J, claim_id="theorem1[iso3,bump,V=example1]"),
    ]


def _lemma4(c: SuiteConfig) -> list[Task]:
    tasks = [
        _one(checks.check_lemma4, bump_field(bp), 2.0, power_weight(0.5), bp, n_points=c.lemma4_points, cfg=c.cfg,
             claim_id=f"lemma4[{_tag(bp)},bump]")
        for bp in (ISO2, BetaParams((1.0, 1.0)))
    ]
    x = [[0.1, 0.1]]
    tasks.append(_one(checks.check_lemma4, indicator_field(ISO2, 0.5, (0.1, 0.1)), 2.0, power_weight(1.0), ISO2,
                      xs=x, cfg=c.cfg, claim_id="lemma4[iso,equality]"))
    return tasks


def _corollary1(c: SuiteConfig) -> list[Task]:
    bp3 = BetaParams.isotropic(3)
    return [
        _one(checks.check_sobolev_pointwise, bump_field(ISO2), ISO2, cfg=c.cfg, claim_id="sobolev[iso]"),
        _one(checks.check_corollary1, bump_field(ISO2), const_field(ISO2), power_weight(1.0), 0.5, 1.5, 1.0, ISO2,
             cfg=c.cfg, J=c.ladder_J, claim_id="corollary1[iso,bump,V=1]"),
        _one(checks.check_corollary1, bump_field(bp3), make_example1_field(bp3), logpower_weight(1.0), 0.5, 2.0, 1.0,
             bp3, cfg=_coarse3d(c.cfg), J=c.ladder_J, claim_id="corollary1[iso3,bump,V=example1]"),
    ]


def _proposition1(c: SuiteConfig) -> list[Task]:
    bp3 = BetaParams.isotropic(3)
    return [
        _one(checks.check_proposition1, bump_field(ISO2), const_field(ISO2), 0.5, 1.5, 1.0, ISO2,
             cfg=c.cfg, J=c.ladder_J, claim_id="proposition1[iso,bump,V=1]"),
        _one(checks.check_proposition1, bump_field(bp3), make_example1_field(bp3), 0.5, 2.0, 1.0, bp3,
             cfg=_coarse3d(c.cfg), J=c.ladder_J, claim_id="proposition1[iso3,bump,V=example1]"),
    ]


def _example1(c: SuiteConfig) -> list[Task]:
    return [lambda: run_example1(None, c)]


# suite id -> (builder, the check_* operations it dispatches to)
SUITES: dict[str, tuple[Callable[[SuiteConfig], list[Task]], tuple[Callable, ...]]] = {
    "metric-axioms": (_metric_axioms, (checks.check_metric_axioms, checks.check_jacobian_mc)),
    "lemma1": (_lemma1, (spaces.check_lemma1, spaces.check_lemma1_converse)),
    "lemma2": (_lemma2, (checks.check_lemma2,)),
    "lemma3": (_lemma3, (checks.check_lemma3,)),
    "theorem1": (_theorem1, (checks.check_growth_function, checks.check_theorem1)),
    "lemma4": (_lemma4, (checks.check_lemma4,)),
    "corollary1": (_corollary1, (checks.check_sobolev_pointwise, checks.check_corollary1)),
    "proposition1": (_proposition1, (checks.check_proposition1,)),
    "example1": (_example1, (checks.check_example1,)),
    "isotropic-reduction": (_isotropic_reduction, (checks.check_isotropic_reduction,)),
}
SUITE_IDS = tuple(SUITES) + ("all",)


def run_example1(bp: BetaParams | None = None, config: SuiteConfig | None = None) -> list[VerificationEntry]:
    """Entries example1.i, example1.ii, example1.iii (and the recorded lambda = n - 2 endpoint)."""
    c = config or SuiteConfig()
    bp = bp or BetaParams.isotropic(2)
    return checks.check_example1(bp, c.cfg, J=c.example_J, eps=c.example_eps, convention=c.example_convention)


def _timed(task: Task) -> list[VerificationEntry]:
    t0 = time.perf_counter()
    entries = task()
    dt = (time.perf_counter() - t0) / max(len(entries), 1)
    for e in entries:
        e.runtime = dt
    return entries


def run_suite(suite_id: str, config: SuiteConfig | None = None) -> VerificationReport:
    """Run one named suite (or ``all``); entries are ordered by claim id."""
    c = config or SuiteConfig()
    if suite_id not in SUITE_IDS:
        raise ContractError(f"unknown suite {suite_id!r}; choose from {', '.join(SUITE_IDS)}")
    ids = list(SUITES) if suite_id == "all" else [suite_id]
    tasks = [t for sid in ids for t in SUITES[sid][0](c)]
    report = VerificationReport(suite_id, c.as_dict())
    if c.workers > 1:
        with ThreadPoolExecutor(c.workers) as pool:
            results = list(pool.map(_timed, tasks))
    else:
        results = [_timed(t) for t in tasks]
    for entries in results:
        for e in entries:
            e.seed = c.seed
        report.extend(entries)
    return report


def registered_checks() -> dict[str, list[str]]:
    """check_* name -> suites referencing it (the completeness meta-test wants exactly one each)."""
    out: dict[str, list[str]] = {}
    for sid, (_, fns) in SUITES.items():
        for fn in fns:
            out.setdefault(fn.__name__, []).append(sid)
    return out


def all_check_operations() -> list[str]:
    names = set()
    for mod in (checks, spaces):
        names.update(k for k, v in vars(mod).items() if k.startswith("check_") and callable(v))
    return sorted(names)


__all__ = [
    "SUITES",
    "SUITE_IDS",
    "SuiteConfig",
    "all_check_operations",
    "registered_checks",
    "run_example1",
    "run_suite",
]
