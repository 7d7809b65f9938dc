"""Code parameters, their validation, and the closed-form bounds."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from math import comb

THEOREMS = ("T1", "T2")


class ParamError(ValueError):
    """Invalid parameter set; ``code`` names the violated invariant."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass(frozen=True)
class CodeParams:
    n: int
    k: int
    u: int
    d_bar: int
    theorem: str
    n_bar: int
    k_bar: int
    v: int
    s: int
    r: int
    r_bar: int
    group: int
    ntilde: int
    l: int
    l_bar: int
    parent_n_bar: int
    h_max: int

    @property
    def shortened(self) -> bool:
        return self.parent_n_bar > self.n_bar

    @property
    def base_h(self) -> int:
        """Failures repairable from exactly d_bar helper racks."""
        return self.u - self.v

    def rack_position(self, rack: int) -> tuple[int, int]:
        """(group digit a, in-group position b) of a rack."""
        return divmod(rack, self.group)

    def folded_height(self, w: int) -> int:
        return self.r_bar if w < self.u - self.v else self.r_bar - 1

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "u": self.u, "d_bar": self.d_bar, "theorem": self.theorem}

    def describe(self) -> dict:
        return asdict(self)


def derive(n: int, k: int, u: int, d_bar: int, theorem: str = "T1") -> CodeParams:
    for name, val in (("n", n), ("k", k), ("u", u), ("d_bar", d_bar)):
        if not isinstance(val, int) or isinstance(val, bool):
            raise ParamError("not_integer", f"{name} must be an integer")
    if theorem not in THEOREMS:
        raise ParamError("theorem", f"theorem must be one of {THEOREMS}, got {theorem!r}")
    if n < 2 or k < 1 or k >= n:
        raise ParamError("k_range", f"need 1 <= k < n, got n={n}, k={k}")
    if u < 1:
        raise ParamError("u_range", "u must be at least 1")
    if u > n - k:
        raise ParamError("u_gt_r", f"u > n-k ({u} > {n - k})")
    if u > k:
        raise ParamError("u_gt_k", f"u > k ({u} > {k})")
    if n % u:
        raise ParamError("u_divides_n", f"u must divide n ({u} does not divide {n})")
    n_bar = n // u
    k_bar, v = divmod(k, u)
    if not k_bar <= d_bar <= n_bar - 1:
        raise ParamError(
            "d_bar_range", f"need k_bar <= d_bar <= n_bar-1, got d_bar={d_bar} with k_bar={k_bar}, n_bar={n_bar}"
        )
    s = d_bar - k_bar + 1
    r = n - k
    r_bar = n_bar - k_bar
    group = s if theorem == "T1" else s + 1
    ntilde = -(-n_bar // group)
    l = s ** ntilde
    return CodeParams(
        n=n, k=k, u=u, d_bar=d_bar, theorem=theorem,
        n_bar=n_bar, k_bar=k_bar, v=v, s=s, r=r, r_bar=r_bar,
        group=group, ntilde=ntilde, l=l, l_bar=l // s,
        parent_n_bar=group * ntilde, h_max=min(u, s * u - v),
    )


def params_from_json(spec: dict) -> CodeParams:
    return derive(int(spec["n"]), int(spec["k"]), int(spec["u"]), int(spec["d_bar"]), spec.get("theorem", "T1"))


def omega(s: int, u: int) -> int:
    total = 0
    for t in range(1, s + 1):
        for delta in range(t, u * t + 1):
            total += (
                comb(s - 1, t - 1) * comb(u * t, delta) * comb(delta - 1, t - 1)
                * (delta - t + 1) * (delta + t - 2)
            )
    return total // 2


def _pow2_term(s: int) -> int:
    # (s-1) 2^(s-2), which vanishes at s = 1
    return (s - 1) * 2 ** (s - 2) if s >= 2 else 0


def field_threshold(p: CodeParams) -> int:
    if p.theorem == "T1":
        return p.n * p.s + p.u * (omega(p.s, p.u) + _pow2_term(p.s))
    return p.n * p.s + p.u * (omega(p.s + 1, p.u) + p.s * 2 ** (p.s - 1))


def _check_h(p: CodeParams, h: int) -> None:
    if not 1 <= h <= p.h_max:
        raise ParamError("h_range", f"need 1 <= h <= {p.h_max}, got {h}")


def bandwidth_bound(p: CodeParams, h: int) -> int:
    _check_h(p, h)
    return p.d_bar * h * p.l // p.s


def access_bound(p: CodeParams, h: int) -> Fraction:
    _check_h(p, h)
    return Fraction(p.d_bar * h * p.u * p.l, p.s * (p.u - p.v))
