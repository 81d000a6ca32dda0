"""Rank-one constructions: cutting counts, spacer vectors, heights, presets.

A construction is the finite data (m_k, (a_j^(k))_{j=1..m_k})_{k<K}: at stage
k the current tower is cut into m_k columns and a_j^(k) spacer levels are
stacked above the j-th column.  Heights follow
h_{k+1} = m_k h_k + sum_j a_j^(k) with h_0 = 1.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import (
    BadParams,
    CutTooSmall,
    EmptyConstruction,
    NegativeSpacer,
    OverflowLimit,
    SpacerShapeError,
    StageOutOfRange,
    UnknownPreset,
)

INT128_MAX = (1 << 127) - 1
DEFAULT_STAGE_CAP = 24

PRESET_NAMES = ("chacon", "constant", "staircase", "ornstein-random", "power-growth")


class ZeroSpacers:
    """Compact all-zero spacer vector; lets presets with large cut counts
    (power-growth runs to K = 10^4 stages) avoid materializing tuples."""

    __slots__ = ("n",)

    def __init__(self, n: int):
        self.n = n

    def __len__(self):
        return self.n

    def __iter__(self):
        return iter((0,) * 0) if self.n == 0 else _zero_iter(self.n)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return ZeroSpacers(len(range(*i.indices(self.n))))
        if -self.n <= i < self.n:
            return 0
        raise IndexError(i)

    def __eq__(self, other):
        try:
            return len(other) == self.n and not any(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(("zeros", self.n))

    def __repr__(self):
        return f"ZeroSpacers({self.n})"


def _zero_iter(n):
    for _ in range(n):
        yield 0


def _spacer_sum(spacers) -> int:
    return 0 if isinstance(spacers, ZeroSpacers) else sum(spacers)


@dataclass(frozen=True)
class StageSpec:
    """One cutting stage: cut count m >= 2 and m nonnegative spacer counts."""

    m: int
    spacers: tuple

    def check(self, k: int = -1) -> None:
        where = f" at stage {k}" if k >= 0 else ""
        if self.m < 2:
            raise CutTooSmall(f"cut count m={self.m}{where}, need m >= 2")
        if len(self.spacers) != self.m:
            raise SpacerShapeError(
                f"spacer vector has length {len(self.spacers)}, expected m={self.m}{where}"
            )
        if isinstance(self.spacers, ZeroSpacers):
            return
        for a in self.spacers:
            if a < 0:
                raise NegativeSpacer(f"negative spacer {a}{where}")


@dataclass(frozen=True)
class GeneratorRule:
    type: str
    params: dict = field(default_factory=dict)
    seed: int = 0


@dataclass(frozen=True)
class RankOneConstruction:
    name: str
    stages: tuple
    generator: Optional[GeneratorRule] = None
    stage_cap: int = DEFAULT_STAGE_CAP
    explicit_count: int = 0  # leading stages that override the generator

    def stage(self, k: int) -> StageSpec:
        if k < 0 or k >= len(self.stages):
            raise StageOutOfRange(
                f"stage {k} out of range (have {len(self.stages)} stages)"
            )
        return self.stages[k]

    @property
    def num_stages(self) -> int:
        return len(self.stages)

    def to_config(self) -> dict:
        gen = None
        if self.generator is not None:
            gen = {
                "type": self.generator.type,
                "params": dict(self.generator.params),
                "seed": int(self.generator.seed),
            }
        if gen is not None:
            # generator-derived stages are regenerated on load; only
            # explicit overrides are serialized
            stage_list = [
                {"m": s.m, "spacers": [int(a) for a in s.spacers]}
                for s in self.stages[: self.explicit_count]
            ]
        else:
            stage_list = [
                {"m": s.m, "spacers": [int(a) for a in s.spacers]} for s in self.stages
            ]
        return {
            "name": self.name,
            "generator": gen,
            "stages": stage_list,
            "stage_cap": self.stage_cap,
        }


@dataclass(frozen=True)
class HeightTable:
    heights: tuple  # h_0..h_K
    cut_products: tuple  # prod_{i<k} m_i for k = 0..K
    overflow_flag: bool


@dataclass(frozen=True)
class TotalMeasure:
    partial: Fraction
    partial_float: float
    partials: tuple  # Fraction per stage 0..K
    verdict: str  # converging | diverging | undetermined


def validate(construction: RankOneConstruction) -> RankOneConstruction:
    """Check every stage invariant; raises on the first violation."""
    if construction.num_stages == 0:
        raise EmptyConstruction("construction has no stages")
    for k, s in enumerate(construction.stages):
        s.check(k)
    return construction


def heights(construction: RankOneConstruction, K: int) -> HeightTable:
    """Height table h_0..h_K (h_0 = 1), with 128-bit overflow checking.

    On overflow the table is truncated at the last representable height and
    the flag is set; no wraparound ever occurs (python ints are exact, the
    flag marks departure from the checked range).
    """
    if K > construction.num_stages:
        raise StageOutOfRange(
            f"K={K} exceeds available stages ({construction.num_stages})"
        )
    hs = [1]
    cps = [1]
    overflow = False
    for k in range(K):
        s = construction.stage(k)
        h_next = s.m * hs[-1] + _spacer_sum(s.spacers)
        if h_next > INT128_MAX:
            overflow = True
            break
        hs.append(h_next)
        cps.append(cps[-1] * s.m)
    return HeightTable(tuple(hs), tuple(cps), overflow)


def cumulative_spacers(construction: RankOneConstruction, k: int):
    """Partial spacer sums s(k,0)=0, s(k,j)=a_1+...+a_j for j < m_k."""
    s = construction.stage(k)
    if isinstance(s.spacers, ZeroSpacers):
        return (0,) * s.m
    out = [0]
    for a in s.spacers[: s.m - 1]:
        out.append(out[-1] + a)
    return tuple(out)


def total_measure(
    construction: RankOneConstruction,
    K: int,
    rel_tol: float = 1e-6,
    growth_floor: float = 0.05,
) -> TotalMeasure:
    """Partial total-measure values h_k / prod_{i<k} m_i for k <= K.

    The partials are nondecreasing (spacers only add mass).  The verdict
    classifies the trend of the last increment: below rel_tol of the current
    value is "converging", above the absolute growth_floor is "diverging",
    anything in between "undetermined".
    """
    table = heights(construction, K)
    if table.overflow_flag:
        raise OverflowLimit(f"heights overflow 128 bits before stage {K}")
    partials = tuple(
        Fraction(h, cp) for h, cp in zip(table.heights, table.cut_products)
    )
    if len(partials) == 1:
        verdict = "converging"
    else:
        inc = float(partials[-1] - partials[-2])
        if inc <= rel_tol * float(partials[-1]):
            verdict = "converging"
        elif inc >= growth_floor:
            verdict = "diverging"
        else:
            verdict = "undetermined"
    return TotalMeasure(partials[-1], float(partials[-1]), partials, verdict)


def _draw_uniform(bits, high: int) -> int:
    """Uniform integer in [0, high] from two 64-bit counter-based draws.

    The 128-bit value is reduced mod high+1; the modulo bias is below
    2^-100 for any high < 2^127 and the algorithm is frozen for
    reproducibility.
    """
    u = (int(bits[0]) << 64) | int(bits[1])
    return u % (high + 1)


def preset(
    name: str,
    params: Optional[dict] = None,
    seed: int = 0,
    stage_cap: int = DEFAULT_STAGE_CAP,
) -> RankOneConstruction:
    """Materialize a named construction family.

    chacon          m=3, spacers (0,1,0) every stage.
    constant        constant m (param "m", default 2), zero spacers.
    staircase       constant m (param "m", default 2), spacers (0,1,...,m-1).
    ornstein-random constant m (param "m", default 4), spacers drawn
                    uniformly from [0, h_k] per column (counter-based
                    generator keyed by the 64-bit seed).
    power-growth    m_j = max(2, floor((j+2)**beta)) (param "beta", default
                    1.0), zero spacers.
    """
    params = dict(params or {})
    if stage_cap < 1:
        raise BadParams("stage_cap must be >= 1")
    stages = []
    if name == "chacon":
        stages = [StageSpec(3, (0, 1, 0))] * stage_cap
        gen = GeneratorRule("chacon")
    elif name == "constant":
        m = int(params.get("m", 2))
        if m < 2:
            raise BadParams(f"constant preset needs m >= 2, got {m}")
        stages = [StageSpec(m, ZeroSpacers(m))] * stage_cap
        gen = GeneratorRule("constant", {"m": m})
    elif name == "staircase":
        m = int(params.get("m", 2))
        if m < 2:
            raise BadParams(f"staircase preset needs m >= 2, got {m}")
        stages = [StageSpec(m, tuple(range(m)))] * stage_cap
        gen = GeneratorRule("staircase", {"m": m})
    elif name == "ornstein-random":
        m = int(params.get("m", 4))
        if m < 2:
            raise BadParams(f"ornstein-random preset needs m >= 2, got {m}")
        rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
        h = 1
        for _ in range(stage_cap):
            draws = rng.integers(0, 1 << 63, size=(m, 2), dtype=np.uint64)
            spacers = tuple(_draw_uniform(draws[j], h) for j in range(m))
            stages.append(StageSpec(m, spacers))
            h = m * h + sum(spacers)
        gen = GeneratorRule("ornstein-random", {"m": m}, seed)
    elif name == "power-growth":
        beta = float(params.get("beta", 1.0))
        if beta <= 0:
            raise BadParams(f"power-growth preset needs beta > 0, got {beta}")
        for j in range(stage_cap):
            m = max(2, int((j + 2) ** beta))
            stages.append(StageSpec(m, ZeroSpacers(m)))
        gen = GeneratorRule("power-growth", {"beta": beta})
    else:
        raise UnknownPreset(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    return validate(
        RankOneConstruction(name, tuple(stages), generator=gen, stage_cap=stage_cap)
    )


def random_construction(
    rng: np.random.Generator,
    max_stages: int = 6,
    m_range=(2, 5),
    spacer_cap_from_height: bool = True,
) -> RankOneConstruction:
    """Random construction for property tests: K in [1, max_stages], each
    m_k uniform in m_range, spacers uniform in [0, h_k]."""
    K = int(rng.integers(1, max_stages + 1))
    stages = []
    h = 1
    for _ in range(K):
        m = int(rng.integers(m_range[0], m_range[1] + 1))
        cap = h if spacer_cap_from_height else 1
        spacers = tuple(int(x) for x in rng.integers(0, cap + 1, size=m))
        stages.append(StageSpec(m, spacers))
        h = m * h + sum(spacers)
    return RankOneConstruction("random", tuple(stages))


def from_config(cfg: dict) -> RankOneConstruction:
    """Build a construction from the JSON config schema.

    Schema: {"name": str, "generator": {"type","params","seed"}|null,
    "stages": [{"m","spacers"}], "stage_cap": int}.  Explicit stages
    override the generator's output for the listed indices.
    """
    name = cfg.get("name", "unnamed")
    stage_cap = int(cfg.get("stage_cap", DEFAULT_STAGE_CAP))
    gen_cfg = cfg.get("generator")
    explicit = [
        StageSpec(int(s["m"]), tuple(int(a) for a in s["spacers"]))
        for s in cfg.get("stages", [])
    ]
    if gen_cfg:
        base = preset(
            gen_cfg["type"],
            gen_cfg.get("params"),
            int(gen_cfg.get("seed", 0)),
            stage_cap,
        )
        stages = list(base.stages)
        for i, s in enumerate(explicit):
            if i < len(stages):
                stages[i] = s
            else:
                stages.append(s)
        gen = base.generator
        explicit_count = len(explicit)
    else:
        stages = explicit
        gen = None
        explicit_count = 0
    return validate(
        RankOneConstruction(
            name,
            tuple(stages),
            generator=gen,
            stage_cap=stage_cap,
            explicit_count=explicit_count,
        )
    )


def load_config(path) -> RankOneConstruction:
    with open(path) as fh:
        return from_config(json.load(fh))
