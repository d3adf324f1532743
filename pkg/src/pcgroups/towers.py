"""Finite congruence quotients of explicit pro-p groups, and the checks run on them.

Families:

* ``abelian``   Z_p^d
* ``scalar``    <y> x| Z_p^(d-1), y acting as sign * (1 + p^s)
* ``maxclass3`` <w> x| Z_3[omega], w of order 3 acting by omega
* ``hered``     <b> A, A a product of cyclic p-groups, b acting by 1 + p^s

Level n of a torsion-free family is G / <y^(p^n), p^n A>.  For ``maxclass3``
it is <w> x| B / pi^(2n) B, of order 3^(2n+1).  Generators are listed level by
level, so the kernel of G_n -> G_j is spanned by a tail of the generator list.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from . import subgroups as sg
from .limits import BudgetExceeded, check_cap
from .pcp import Element, PcGroup, PcPresentation, Word

FAMILIES = ("abelian", "scalar", "maxclass3", "hered")
QUOTIENT_NOTE = "level-n quotient is G / <y^(p^n), p^n A>, not G / U^(p^n)"


class TowerSpecError(ValueError):
    pass


@dataclass(frozen=True)
class TowerSpec:
    family: str
    p: int
    n: int
    d: int = 0
    s: int | None = None  # None means s = infinity, the trivial action
    sign: int = 1
    exponents: tuple[int, ...] = ()  # hered only: torsion type of A

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise TowerSpecError(f"unknown family {self.family!r}")
        if self.n < 1:
            raise TowerSpecError("level n must be >= 1")
        if self.family == "maxclass3":
            if self.p != 3:
                raise TowerSpecError("maxclass3 requires p = 3")
            return
        if self.sign not in (1, -1):
            raise TowerSpecError("sign must be + or -")
        if self.family == "scalar":
            if self.d < 2:
                raise TowerSpecError("scalar family needs d >= 2")
            if self.s is not None and self.s < 1:
                raise TowerSpecError("s must be >= 1")
        if self.family == "abelian" and self.d < 1:
            raise TowerSpecError("abelian family needs d >= 1")
        if self.family == "hered":
            if not self.exponents or min(self.exponents) < 1:
                raise TowerSpecError("hered family needs a list of positive exponents")
            if self.s is not None and self.s < 1:
                raise TowerSpecError("s must be >= 1")
            if self.s is not None and self.n + self.s < max(self.exponents):
                raise TowerSpecError("b^(p^n) must act trivially: need n + s >= max exponent")
        if self.p == 2:
            if self.sign == 1 and self.s is not None and self.s < 2:
                raise TowerSpecError("p = 2 needs s >= 2 or sign -")
        elif self.sign == -1:
            raise TowerSpecError("sign - is only meaningful for p = 2")

    @classmethod
    def parse(cls, text: str) -> "TowerSpec":
        """``[tower] family:p:d:s:sign:n``; unused fields are ``-``.

        For ``hered`` the d field is a comma list of exponents of A.
        """
        text = text.strip()
        if text.startswith("tower"):
            text = text[len("tower"):].strip()
        parts = text.split(":")
        if len(parts) != 6:
            raise TowerSpecError(f"expected family:p:d:s:sign:n, got {text!r}")
        fam, p, d, s, sign, n = parts
        try:
            p_, n_ = int(p), int(n)
            exps: tuple[int, ...] = ()
            d_ = 0
            if fam == "hered":
                exps = tuple(int(t) for t in d.split(","))
            elif d != "-":
                d_ = int(d)
            s_ = None if s in ("-", "inf") else int(s)
        except ValueError as exc:
            raise TowerSpecError(f"bad tower spec {text!r}: {exc}") from None
        if sign not in ("+", "-"):
            raise TowerSpecError(f"sign must be + or -, got {sign!r}")
        if fam == "maxclass3":
            d_ = 2
        return cls(fam, p_, n_, d_, s_, 1 if sign == "+" else -1, exps)

    def format(self) -> str:
        d = ",".join(map(str, self.exponents)) if self.family == "hered" else (
            "-" if self.family == "maxclass3" else str(self.d))
        s = "-" if self.s is None or self.family in ("abelian", "maxclass3") else str(self.s)
        sign = "+" if self.sign == 1 else "-"
        return f"tower {self.family}:{self.p}:{d}:{s}:{sign}:{self.n}"

    def at_level(self, n: int) -> "TowerSpec":
        return TowerSpec(self.family, self.p, n, self.d, self.s, self.sign, self.exponents)

    @property
    def torsion_free(self) -> bool:
        return self.family in ("abelian", "scalar")

    @property
    def uniform_family(self) -> bool:
        """Torsion-free with powerful quotients; the -1 action at p = 2 is not."""
        return self.torsion_free and self.sign == 1

    @property
    def dim(self) -> int:
        if self.family == "maxclass3":
            return 2
        if self.family == "hered":
            return 1 + len(self.exponents)
        return self.d

    @property
    def family_d(self) -> int:
        return self.dim


# ---------------------------------------------------------------- presentations


def _digits(x: int, p: int, length: int) -> list[int]:
    out = []
    for _ in range(length):
        out.append(x % p)
        x //= p
    return out


def _word(items: dict[int, int]) -> Word:
    return tuple(sorted((g, e) for g, e in items.items() if e))


@dataclass
class _Layout:
    """Chains of generators; chain c has length lengths[c], ordered level-major."""

    lengths: list[int]
    index: dict[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        k = 1
        for level in range(max(self.lengths)):
            for c, ln in enumerate(self.lengths):
                if level < ln:
                    self.index[(c, level)] = k
                    k += 1

    @property
    def n(self) -> int:
        return len(self.index)

    def chain_word(self, c: int, x: int, p: int) -> dict[int, int]:
        """a_c^x as exponents over the chain generators a_c^(p^t)."""
        ln = self.lengths[c]
        x %= p**ln
        return {self.index[(c, t)]: e for t, e in enumerate(_digits(x, p, ln)) if e}


def _cyclic_action_presentation(p: int, top_len: int, chain_lens: list[int],
                                lam: int, name: str) -> PcPresentation:
    """<y> A with y of order p^top_len acting on each cyclic factor by lam.

    top_len = 0 gives the abelian group A.  Chain 0 is y when top_len > 0.
    """
    lens = ([top_len] if top_len else []) + list(chain_lens)
    L = _Layout(lens)
    first = 1 if top_len else 0
    pows: dict[int, Word] = {}
    comms: dict[tuple[int, int], Word] = {}
    for (c, t), g in L.index.items():
        if t + 1 < lens[c]:
            pows[g] = ((L.index[(c, t + 1)], 1),)
    if top_len:
        for ell in range(top_len):
            yg = L.index[(0, ell)]
            for c in range(first, len(lens)):
                mod = p ** lens[c]
                factor = (pow(lam, p**ell, mod) - 1) % mod
                for m in range(lens[c]):
                    ag = L.index[(c, m)]
                    # [a, y] = a^(lam^(p^ell) - 1), and [y, a] is its inverse
                    x = p**m * factor
                    if ag > yg:
                        w = L.chain_word(c, x, p)
                        if w:
                            comms[(ag, yg)] = _word(w)
                    else:
                        w = L.chain_word(c, -x, p)
                        if w:
                            comms[(yg, ag)] = _word(w)
    return PcPresentation(p, L.n, pows, comms, name)


# Z[omega] arithmetic on pairs (a, b) = a + b*omega, omega^2 = -1 - omega


def _zw_mul(u, v):
    a, b = u
    c, d = v
    return (a * c - b * d, a * d + b * c - b * d)


_PI = (-1, 1)
_PI_BAR = (-2, -1)  # omega^2 - 1


def _pi_digits(beta: tuple[int, int], length: int) -> list[int]:
    """Digits c_t in {0,1,2} with beta = sum c_t pi^t mod pi^length."""
    out = []
    for _ in range(length):
        c = (beta[0] + beta[1]) % 3  # beta mod pi, since omega = 1 mod pi
        out.append(c)
        beta = (beta[0] - c, beta[1])
        num = _zw_mul(beta, _PI_BAR)  # beta / pi = beta * pi_bar / 3
        assert num[0] % 3 == 0 and num[1] % 3 == 0
        beta = (num[0] // 3, num[1] // 3)
    return out


def _maxclass3_presentation(n: int, name: str) -> PcPresentation:
    """Generators w, b_0 .. b_(2n-1) with b_t = pi^t in B / pi^(2n) B."""
    length = 2 * n
    pows: dict[int, Word] = {}
    comms: dict[tuple[int, int], Word] = {}
    pi_t = (1, 0)
    for t in range(length):
        g = t + 2
        three_pi_t = (3 * pi_t[0], 3 * pi_t[1])
        digs = _pi_digits(three_pi_t, length)
        w = _word({u + 2: e for u, e in enumerate(digs)})
        if w:
            pows[g] = w
        if t + 1 < length:
            # w^-1 b w = omega b, so [b_t, w] = (omega - 1) pi^t = b_(t+1)
            comms[(g, 1)] = ((g + 1, 1),)
        pi_t = _zw_mul(pi_t, _PI)
    return PcPresentation(3, length + 1, pows, comms, name)


def presentation(spec: TowerSpec) -> PcPresentation:
    name = spec.format().split(" ", 1)[1]
    p, n = spec.p, spec.n
    if spec.family == "maxclass3":
        return _maxclass3_presentation(n, name)
    lam = 1 if spec.s is None else 1 + p**spec.s
    lam *= spec.sign
    if spec.family == "abelian":
        return _cyclic_action_presentation(p, 0, [n] * spec.d, 1, name)
    if spec.family == "scalar":
        return _cyclic_action_presentation(p, n, [n] * (spec.d - 1), lam, name)
    return _cyclic_action_presentation(p, n, list(spec.exponents), lam, name)


# ---------------------------------------------------------------- quotients


@dataclass(frozen=True)
class TowerQuotient:
    spec: TowerSpec
    group: PcGroup
    marked: sg.Subgroup
    generator: Element
    level_of: tuple[int, ...]  # level of each pc generator

    @property
    def n(self) -> int:
        return self.spec.n

    def kernel_to(self, j: int) -> sg.Subgroup:
        """Kernel of G_n -> G_j: the generators of level >= j."""
        G = self.group
        gens = [G.gen(i + 1) for i, lv in enumerate(self.level_of) if lv >= j]
        return sg.subgroup_closure(G, gens)

    @cached_property
    def power_layer(self) -> sg.Subgroup:
        return self.kernel_to(self.n - 1)


def build_tower(spec: TowerSpec) -> TowerQuotient:
    pres = presentation(spec)
    check_cap(pres.p**pres.n)
    G = PcGroup(pres)
    p = spec.p
    if spec.family == "maxclass3":
        levels = (0,) + tuple(t // 2 for t in range(2 * spec.n))
        marked = sg.subgroup_closure(G, G.gens[1:])
        return TowerQuotient(spec, G, marked, G.gen(1), levels)
    lens = ([spec.n] if spec.family != "abelian" else []) + (
        list(spec.exponents) if spec.family == "hered"
        else [spec.n] * (spec.d - (0 if spec.family == "abelian" else 1)))
    L = _Layout(lens)
    levels = tuple(t for (_c, t), _g in sorted(L.index.items(), key=lambda kv: kv[1]))
    first = G.gen(1)
    # drop generators of chain 0 other than its top: they are powers of gen 1
    chain0 = {g for (c, _t), g in L.index.items() if c == 0}
    rest = [G.gen(g) for g in range(1, G.n + 1) if g not in chain0]
    marked = sg.subgroup_closure(G, [G.power(first, p)] + rest)
    return TowerQuotient(spec, G, marked, first, levels)


# ---------------------------------------------------------------- checks


@dataclass(frozen=True)
class CheckResult:
    check: str
    tower: str
    status: str  # pass, fail, expected-negative, skipped
    detail: dict

    @property
    def ok(self) -> bool:
        return self.status in ("pass", "expected-negative", "skipped")


def _negative_or_fail(expect_negative: bool, holds: bool) -> str:
    # a torsion family lacks the hypothesis; holding anyway contradicts nothing
    if holds:
        return "pass"
    return "expected-negative" if expect_negative else "fail"


def coherence_check(spec: TowerSpec) -> CheckResult:
    """G_(n+1) -> G_n by truncation of exponent vectors is a homomorphism
    with kernel of order p^dim (torsion-free families; for the others the
    kernel order is reported)."""
    lo, hi = build_tower(spec), build_tower(spec.at_level(spec.n + 1))
    G, H = lo.group, hi.group
    m = G.n

    def trunc(x):
        return x[:m]

    ok = True
    for i in range(1, H.n + 1):
        gi = H.gen(i)
        if trunc(H.power(gi, H.p)) != G.power(trunc(gi), G.p):
            ok = False
        for j in range(i + 1, H.n + 1):
            gj = H.gen(j)
            if trunc(H.commutator(gj, gi)) != G.commutator(trunc(gj), trunc(gi)):
                ok = False
    kernel_log = H.n - m
    holds = ok and (kernel_log == spec.dim or not spec.torsion_free)
    return CheckResult("coherence", spec.format(), "pass" if holds else "fail",
                       {"homomorphism": ok, "kernel_log": kernel_log, "dim": spec.dim})


def omega1_tower_check(spec: TowerSpec, n_max: int) -> list[CheckResult]:
    """Omega_1(G_n) = ker(G_n -> G_(n-1)), of order p^dim, for 2 <= n <= n_max."""
    out = []
    negative = not spec.torsion_free
    if spec.sign == -1:
        return [CheckResult("omega1-tower", spec.format(), "skipped",
                            {"reason": "scalar action -1 at p = 2 is out of scope"})]
    for n in range(2, n_max + 1):
        q = build_tower(spec.at_level(n))
        om = sg.omega1(q.group)
        layer = q.power_layer
        holds = om == layer and om.log_order == spec.dim
        out.append(CheckResult(
            "omega1-tower", q.spec.format(), _negative_or_fail(negative, holds),
            {"level": n, "omega1_log": om.log_order, "layer_log": layer.log_order,
             "dim": spec.dim, "quotient": QUOTIENT_NOTE},
        ))
    return out


def coset_power_check(q: TowerQuotient, sample: int = 200) -> CheckResult:
    """{(xu)^p : u in N} = x^p N^p for each coset xN, and |G^{p}| = |G| / p^dim."""
    G, N, p = q.group, q.marked, q.spec.p
    if not sg.is_powerful(N):
        return CheckResult("coset-power", q.spec.format(), "skipped",
                           {"reason": "marked subgroup is not powerful"})
    Np = sg.agemo(N)
    reps = list(N.transversal())
    exhaustive = len(reps) <= sample
    if not exhaustive:
        reps = reps[:sample]
    n_elems = N.elements()
    failures = []
    for x in reps:
        got = {G.power(G.multiply(x, u), p) for u in n_elems}
        xp = G.power(x, p)
        want = {G.multiply(xp, v) for v in Np.elements()}
        if got != want:
            failures.append(x)
    image = sg.pth_power_image_size(G)
    expected_image = G.order // p**q.spec.dim
    image_ok = q.n < 2 or image == expected_image
    holds = not failures and image_ok
    return CheckResult(
        "coset-power", q.spec.format(), _negative_or_fail(not q.spec.uniform_family, holds),
        {"cosets": len(reps), "exhaustive": exhaustive, "failing_cosets": len(failures),
         "power_image": image, "expected_power_image": expected_image,
         "quotient": QUOTIENT_NOTE},
    )


def lemma25_check(q: TowerQuotient, z: Element | None = None) -> CheckResult:
    """Some power of z lies in N minus N^p (z outside N)."""
    G, N = q.group, q.marked
    z = q.generator if z is None else z
    if z in N:
        raise ValueError("z must lie outside the marked subgroup")
    Np = sg.agemo(N)
    witness = None
    x = z
    for e in range(1, G.element_order(z) + 1):
        if x in N and x not in Np:
            witness = e
            break
        x = G.multiply(x, z)
    holds = witness is not None
    return CheckResult("lemma25", q.spec.format(), _negative_or_fail(not q.spec.uniform_family, holds),
                       {"witness_exponent": witness, "z": list(z)})


def constant_d_check(q: TowerQuotient, max_index_exp: int) -> CheckResult:
    """d(H) for every H of index <= p^j containing ker(G_n -> G_j)."""
    j = max_index_exp
    if j > q.n - 2:
        raise ValueError(f"need j <= n - 2 (j={j}, n={q.n})")
    marker = q.kernel_to(j)
    spectrum: dict[int, int] = {}
    count = 0
    for H in sg.all_subgroups(q.group, containing=marker, max_index_exp=j):
        count += 1
        d = sg.min_generators(H)
        spectrum[d] = spectrum.get(d, 0) + 1
    holds = set(spectrum) == {q.spec.family_d}
    return CheckResult("constant-d", q.spec.format(), "pass" if holds else "fail",
                       {"subgroups": count, "d_spectrum": {str(k): v for k, v in sorted(spectrum.items())},
                        "family_d": q.spec.family_d, "max_index_exp": j})


def hereditary_check(q: TowerQuotient) -> CheckResult:
    G = q.group
    if G.n > 6:
        raise BudgetExceeded("hereditary check limited to order p^6")
    verdict = sg.is_hereditarily_powerful(G)
    expect = q.spec.family != "maxclass3" and not (q.spec.p == 2 and q.spec.sign == -1)
    if verdict is None:
        status = "skipped"
    elif expect:
        status = "pass" if verdict else "fail"
    else:
        status = "expected-negative" if not verdict else "fail"
    return CheckResult("hereditary", q.spec.format(), status, {"hereditarily_powerful": verdict})


def profile_check(q: TowerQuotient) -> CheckResult:
    """Powerful quotients have non-increasing d-profile; torsion-free powerful
    ones have constant P-series index p^dim."""
    G = q.group
    powerful = sg.is_powerful(G)
    d_ok = sg.d_profile(G).non_increasing
    idx = sg.lower_central_p_series(G).indices
    uniform = all(i == q.spec.dim for i in idx if i) and sg.uniform_segment(G)
    detail = {"powerful": powerful, "p_series_indices": list(idx),
              "d": sg.min_generators(G), "non_increasing": d_ok, "uniform_segment": uniform}
    if not powerful:
        status = "expected-negative" if q.spec.family == "maxclass3" or q.spec.sign == -1 else "fail"
    elif q.spec.torsion_free:
        status = "pass" if d_ok and uniform else "fail"
    else:
        status = "pass" if d_ok else "fail"
    return CheckResult("d-profile", q.spec.format(), status, detail)


def d_stability_check(q: TowerQuotient) -> CheckResult:
    d = sg.min_generators(q.group)
    return CheckResult("d-stability", q.spec.format(),
                       "pass" if d == q.spec.family_d else "fail",
                       {"d": d, "family_d": q.spec.family_d})


CHECKS = ("coherence", "omega1", "coset", "lemma25", "constant-d", "hereditary", "profile", "d")


def run_checks(spec: TowerSpec, checks=CHECKS) -> list[CheckResult]:
    """Run the named checks with defaults suited to the level of ``spec``."""
    q = build_tower(spec)
    out: list[CheckResult] = []
    for name in checks:
        try:
            if name == "coherence":
                out.append(coherence_check(spec))
            elif name == "omega1":
                out.extend(omega1_tower_check(spec, spec.n) if spec.n >= 2 else [])
            elif name == "coset":
                out.append(coset_power_check(q))
            elif name == "lemma25":
                out.append(lemma25_check(q))
            elif name == "constant-d":
                if spec.n < 3:
                    out.append(CheckResult("constant-d", spec.format(), "skipped",
                                           {"reason": "needs n >= 3"}))
                else:
                    out.append(constant_d_check(q, min(2, spec.n - 2)))
            elif name == "hereditary":
                if q.group.n > 6:
                    out.append(CheckResult("hereditary", spec.format(), "skipped",
                                           {"reason": "order above p^6"}))
                else:
                    out.append(hereditary_check(q))
            elif name == "profile":
                out.append(profile_check(q))
            elif name == "d":
                out.append(d_stability_check(q))
            else:
                raise ValueError(f"unknown check {name!r}")
        except BudgetExceeded as exc:
            out.append(CheckResult(name, spec.format(), "skipped", {"reason": str(exc)}))
    return out
