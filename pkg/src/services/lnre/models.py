"""LNRE type-density models: Zipf-Mandelbrot, finite Zipf-Mandelbrot and GIGP.

Every model describes a population of types through a density g(pi) over
occurrence probabilities with sum-to-one mass, int pi * g(pi) dpi = 1. Token
counts follow the Poisson sampling scheme, so expectations, variances and
covariances of V and V(m) reduce to integrals of g that have closed forms in
incomplete gamma functions (ZM, fZM) or modified Bessel functions (GIGP).
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, ClassVar, Optional, Type

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import comb, expit, gammainc, gammaincc, gammaln, kve, logit

from src.core.constants import FIT_STARTS, QUADRATURE_RTOL
from src.core.types import ModelFamily
from src.core.validators import ArgumentError, NumericError, require_positive
from src.services.diversity import FrequencySpectrum

# Scale search bracket, on the log scale, used to seed the simplex starts.
_SCALE_BRACKET = (-40.0, 20.0)
_FZM_LOWER_RATIO = 1e-6


@dataclass(frozen=True)
class FitRecord:
    chisq: float
    df: int
    p: Optional[float]


@dataclass(frozen=True)
class ExpectedSpectrum:
    """Real-valued spectrum E[V(m,N)], m = 1..len(values); usable as fitting input."""

    N: float
    V: float
    values: tuple[float, ...]

    def vm(self, m: int) -> float:
        return self.values[m - 1] if 1 <= m <= len(self.values) else 0.0


def _check_N(N: float) -> float:
    if not N >= 0 or not math.isfinite(N):
        raise ArgumentError(f"N must be a finite value >= 0 (got {N})")
    return float(N)


def _finite(value: float, what: str, model: "LnreModel", N: float) -> float:
    if not math.isfinite(value):
        raise NumericError(f"{what} is not finite", {"family": str(model.family), "params": model.params, "N": N})
    return float(value)


def _gammainc_between(s: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """P(s, hi) - P(s, lo) for the regularized lower incomplete gamma, using the tail that avoids cancellation."""
    p_lo = gammainc(s, lo)
    return np.where(p_lo > 0.5, gammaincc(s, lo) - gammaincc(s, hi), gammainc(s, hi) - p_lo)


@dataclass(frozen=True, kw_only=True)
class LnreModel(ABC):
    """A parametric type-density model; ``N`` and ``fit`` are set once fitted."""

    N: Optional[float] = None
    fit: Optional[FitRecord] = None

    family: ClassVar[ModelFamily]
    parameter_names: ClassVar[tuple[str, ...]]

    def __post_init__(self):
        for name in self.parameter_names:
            if not math.isfinite(getattr(self, name)):
                raise ArgumentError(f"{self.family.label} parameter {name} must be finite")
        self._validate()

    # -- family specifics ------------------------------------------------

    @abstractmethod
    def _validate(self) -> None: ...

    @abstractmethod
    def expected_vocabulary(self, N: float) -> float:
        """E[V(N)] = int (1 - exp(-N pi)) g(pi) dpi."""

    @abstractmethod
    def expected_spectrum_array(self, N: float, m_max: int) -> np.ndarray:
        """E[V(m,N)] for m = 1..m_max."""

    @abstractmethod
    def population_size(self) -> float:
        """Expected total number of types S (inf when unbounded)."""

    @abstractmethod
    def type_density(self, pi: Any) -> Any:
        """g(pi), vectorised."""

    @abstractmethod
    def log_support(self) -> tuple[float, float]:
        """Bounds of log(pi) outside which the density is negligible."""

    @abstractmethod
    def max_probability(self) -> float: ...

    @abstractmethod
    def free_parameters(self) -> np.ndarray:
        """Unconstrained coordinates used by the simplex search."""

    @classmethod
    @abstractmethod
    def from_free(cls, x: np.ndarray) -> "LnreModel": ...

    @classmethod
    @abstractmethod
    def start_points(cls, N: float, V: float) -> list["LnreModel"]:
        """Deterministic multi-start grid, each start scaled so that E[V(N)] matches V."""

    # -- shared behaviour ------------------------------------------------

    @property
    def params(self) -> dict[str, float]:
        return {name: float(getattr(self, name)) for name in self.parameter_names}

    def expected_spectrum(self, m: int, N: float) -> float:
        require_positive("m", m)
        return float(self.expected_spectrum_array(N, m)[m - 1])

    def variance_vocabulary(self, N: float) -> float:
        """Var[V(N)] = E[V(2N)] - E[V(N)]."""
        N = _check_N(N)
        if N == 0:
            return 0.0
        return max(0.0, self.expected_vocabulary(2 * N) - self.expected_vocabulary(N))

    def variance_spectrum(self, m: int, N: float) -> float:
        """Var[V(m,N)] = E[V(m,N)] - C(2m,m) 4^-m E[V(2m,2N)]."""
        require_positive("m", m)
        N = _check_N(N)
        if N == 0:
            return 0.0
        doubled = self.expected_spectrum_array(2 * N, 2 * m)[2 * m - 1]
        return max(0.0, self.expected_spectrum(m, N) - comb(2 * m, m) * 0.25**m * doubled)

    def covariance_matrix(self, N: float, m_max: int) -> np.ndarray:
        """Covariance of (V, V1, ..., V_m_max) at sample size N."""
        N = _check_N(N)
        m = np.arange(1, m_max + 1)
        cov = np.zeros((m_max + 1, m_max + 1))
        if N == 0:
            return cov
        doubled = self.expected_spectrum_array(2 * N, 2 * m_max)
        mm, kk = np.meshgrid(m, m, indexing="ij")
        total = mm + kk
        cov[0, 0] = self.expected_vocabulary(2 * N) - self.expected_vocabulary(N)
        cov[0, 1:] = cov[1:, 0] = doubled[m - 1] * 0.5**m
        inner = -comb(total, mm) * 0.5**total * doubled[total - 1]
        inner[np.diag_indices(m_max)] += self.expected_spectrum_array(N, m_max)
        cov[1:, 1:] = inner
        return cov

    def expected_frequency_spectrum(self, N: float, m_max: int = 50) -> ExpectedSpectrum:
        values = self.expected_spectrum_array(N, m_max)
        return ExpectedSpectrum(N=float(N), V=self.expected_vocabulary(N), values=tuple(float(v) for v in values))

    def simulate_spectrum(self, N: int, seed: int = 0) -> FrequencySpectrum:
        """Draw a spectrum under the Poisson sampling scheme: V(m) ~ Poisson(E[V(m,N)]) independently."""
        require_positive("N", N)
        m_max = int(min(N, math.ceil(1.5 * N * self.max_probability()) + 50))
        expected = np.clip(self.expected_spectrum_array(N, m_max), 0.0, None)
        counts = np.random.default_rng(seed).poisson(expected)
        classes = {m: int(v) for m, v in enumerate(counts, 1) if v}
        return FrequencySpectrum(
            N=sum(m * v for m, v in classes.items()), V=sum(classes.values()), spectrum=classes
        )

    def probability_mass(self) -> float:
        """int pi g(pi) dpi by quadrature; 1 for a well-formed model."""
        return integrate_density(self, lambda pi: pi)

    def to_dict(self) -> dict[str, Any]:
        S = self.population_size()
        return {
            "family": str(self.family),
            "params": self.params,
            "N": self.N,
            "S": S if math.isfinite(S) else None,
            "chisq": self.fit.chisq if self.fit else None,
            "df": self.fit.df if self.fit else None,
            "p": self.fit.p if self.fit else None,
        }

    @staticmethod
    def from_dict(data: dict[str, Any]) -> "LnreModel":
        try:
            model_cls = MODEL_FAMILIES[ModelFamily(data["family"])]
            fit = None
            if data.get("chisq") is not None:
                fit = FitRecord(chisq=float(data["chisq"]), df=int(data["df"]), p=data.get("p"))
            return model_cls(N=data.get("N"), fit=fit, **{k: float(v) for k, v in data["params"].items()})
        except (KeyError, TypeError, ValueError) as e:
            raise ArgumentError(f"invalid model description: {e}") from e


def integrate_density(model: LnreModel, integrand: Callable[[float], float]) -> float:
    """int integrand(pi) g(pi) dpi by adaptive quadrature over log(pi)."""
    lo, hi = model.log_support()

    def on_log_scale(u: float) -> float:
        pi = math.exp(u)
        return integrand(pi) * float(model.type_density(pi)) * pi

    result = quad(on_log_scale, lo, hi, epsrel=QUADRATURE_RTOL, limit=500, full_output=1)
    value, abserr = result[0], result[1]
    if len(result) > 3 or not math.isfinite(value):
        raise NumericError(
            "quadrature did not converge",
            {"family": str(model.family), "params": model.params, "estimate": value, "abserr": abserr},
        )
    return float(value)


def _solve_scale(
    make: Callable[[float], LnreModel], N: float, V: float, bracket: tuple[float, float] = _SCALE_BRACKET
) -> LnreModel:
    """Pick the scale parameter (searched on the log scale) whose E[V(N)] equals V."""

    def gap(u: float) -> float:
        return make(math.exp(u)).expected_vocabulary(N) - V

    lo, hi = bracket
    f_lo, f_hi = gap(lo), gap(hi)
    if f_lo * f_hi > 0:
        return make(math.exp(lo if abs(f_lo) < abs(f_hi) else hi))
    return make(math.exp(brentq(gap, lo, hi, xtol=1e-10)))


# ---------------------------------------------------------------------------
# Zipf-Mandelbrot
# ---------------------------------------------------------------------------


@dataclass(frozen=True, kw_only=True)
class ZipfMandelbrot(LnreModel):
    """g(pi) = C pi^(-alpha-1) on (0, B], C = (1 - alpha) / B^(1 - alpha). Infinite population."""

    alpha: float
    B: float

    family: ClassVar[ModelFamily] = ModelFamily.ZM
    parameter_names: ClassVar[tuple[str, ...]] = ("alpha", "B")

    def _validate(self) -> None:
        if not 0 < self.alpha < 1:
            raise ArgumentError(f"ZM alpha must lie in (0, 1) (got {self.alpha})")
        if not self.B > 0:
            raise ArgumentError(f"ZM B must be > 0 (got {self.B})")

    @property
    def C(self) -> float:
        return (1 - self.alpha) / self.B ** (1 - self.alpha)

    def expected_vocabulary(self, N: float) -> float:
        N = _check_N(N)
        if N == 0:
            return 0.0
        a, B = self.alpha, self.B
        lower = gammainc(1 - a, N * B) * math.exp(gammaln(1 - a))
        value = self.C / a * (N**a * lower + math.expm1(-N * B) * B**-a)
        return _finite(value, "E[V]", self, N)

    def expected_spectrum_array(self, N: float, m_max: int) -> np.ndarray:
        N = _check_N(N)
        m = np.arange(1, m_max + 1, dtype=float)
        if N == 0:
            return np.zeros(m_max)
        s = m - self.alpha
        with np.errstate(divide="ignore"):
            log_prefactor = math.log(self.C) + self.alpha * math.log(N) + gammaln(s) - gammaln(m + 1)
            log_terms = log_prefactor + np.log(gammainc(s, N * self.B))
        return np.exp(log_terms)

    def population_size(self) -> float:
        return math.inf

    def type_density(self, pi: Any) -> Any:
        pi = np.asarray(pi, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where((pi > 0) & (pi <= self.B), self.C * pi ** (-self.alpha - 1), 0.0)

    def log_support(self) -> tuple[float, float]:
        upper = math.log(self.B)
        return upper - min(40.0 / (1 - self.alpha), 700.0), upper

    def max_probability(self) -> float:
        return self.B

    def free_parameters(self) -> np.ndarray:
        return np.array([logit(self.alpha), math.log(self.B)])

    @classmethod
    def from_free(cls, x: np.ndarray) -> "ZipfMandelbrot":
        return cls(alpha=float(expit(x[0])), B=math.exp(x[1]))

    @classmethod
    def start_points(cls, N: float, V: float) -> list[LnreModel]:
        return [_solve_scale(lambda B, a=a: cls(alpha=a, B=B), N, V) for a in np.linspace(0.2, 0.9, FIT_STARTS)]


# ---------------------------------------------------------------------------
# finite Zipf-Mandelbrot
# ---------------------------------------------------------------------------


@dataclass(frozen=True, kw_only=True)
class FiniteZipfMandelbrot(LnreModel):
    """g(pi) = C pi^(-alpha-1) on [A, B], C = (1 - alpha) / (B^(1 - alpha) - A^(1 - alpha))."""

    alpha: float
    A: float
    B: float

    family: ClassVar[ModelFamily] = ModelFamily.FZM
    parameter_names: ClassVar[tuple[str, ...]] = ("alpha", "A", "B")

    def _validate(self) -> None:
        if not 0 < self.alpha < 1:
            raise ArgumentError(f"fZM alpha must lie in (0, 1) (got {self.alpha})")
        if not 0 < self.A < self.B:
            raise ArgumentError(f"fZM cutoffs must satisfy 0 < A < B (got A={self.A}, B={self.B})")

    @property
    def C(self) -> float:
        s = 1 - self.alpha
        return s / (self.B**s - self.A**s)

    def expected_vocabulary(self, N: float) -> float:
        N = _check_N(N)
        if N == 0:
            return 0.0
        a, A, B, C = self.alpha, self.A, self.B, self.C
        boundary = -math.expm1(-N * A) * A**-a + math.expm1(-N * B) * B**-a
        inner = N**a * math.exp(gammaln(1 - a)) * float(_gammainc_between(1 - a, N * A, N * B))
        return _finite(C / a * (boundary + inner), "E[V]", self, N)

    def expected_spectrum_array(self, N: float, m_max: int) -> np.ndarray:
        N = _check_N(N)
        m = np.arange(1, m_max + 1, dtype=float)
        if N == 0:
            return np.zeros(m_max)
        s = m - self.alpha
        prefactor = np.exp(math.log(self.C) + self.alpha * math.log(N) + gammaln(s) - gammaln(m + 1))
        return prefactor * np.clip(_gammainc_between(s, N * self.A, N * self.B), 0.0, None)

    def population_size(self) -> float:
        a = self.alpha
        return self.C * (self.A**-a - self.B**-a) / a

    def type_density(self, pi: Any) -> Any:
        pi = np.asarray(pi, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where((pi >= self.A) & (pi <= self.B), self.C * pi ** (-self.alpha - 1), 0.0)

    def log_support(self) -> tuple[float, float]:
        return math.log(self.A), math.log(self.B)

    def max_probability(self) -> float:
        return self.B

    def free_parameters(self) -> np.ndarray:
        return np.array([logit(self.alpha), math.log(self.A), math.log(self.B - self.A)])

    @classmethod
    def from_free(cls, x: np.ndarray) -> "FiniteZipfMandelbrot":
        A = math.exp(x[1])
        return cls(alpha=float(expit(x[0])), A=A, B=A + math.exp(x[2]))

    @classmethod
    def start_points(cls, N: float, V: float) -> list[LnreModel]:
        return [
            _solve_scale(lambda B, a=a: cls(alpha=a, A=B * _FZM_LOWER_RATIO, B=B), N, V)
            for a in np.linspace(0.2, 0.9, FIT_STARTS)
        ]


# ---------------------------------------------------------------------------
# generalized inverse Gauss-Poisson
# ---------------------------------------------------------------------------


@dataclass(frozen=True, kw_only=True)
class GeneralizedInverseGaussPoisson(LnreModel):
    """Sichel's GIGP: g(pi) = K pi^(gamma-1) exp(-pi/C - B^2 C / (4 pi)).

    K = (2 / (B C))^(gamma+1) / (2 K_(gamma+1)(B)) normalises the probability
    mass. Bessel functions are evaluated exponentially scaled (``kve``) and
    the spectrum uses upward recurrence in the order.
    """

    gamma: float
    B: float
    C: float

    family: ClassVar[ModelFamily] = ModelFamily.GIGP
    parameter_names: ClassVar[tuple[str, ...]] = ("gamma", "B", "C")

    def _validate(self) -> None:
        if not -1 < self.gamma < 0:
            raise ArgumentError(f"GIGP gamma must lie in (-1, 0) (got {self.gamma})")
        if not self.B > 0 or not self.C > 0:
            raise ArgumentError(f"GIGP B and C must be > 0 (got B={self.B}, C={self.C})")

    def _tail(self, N: float) -> tuple[float, float, float]:
        w = 1 + self.C * N
        return w, self.B * math.sqrt(w), self.B * self.C * N / (2 * math.sqrt(w))

    def population_size(self) -> float:
        b, c, g = self.B, self.C, self.gamma
        return 2 / (b * c) * kve(g, b) / kve(g + 1, b)

    def expected_vocabulary(self, N: float) -> float:
        N = _check_N(N)
        if N == 0:
            return 0.0
        b, c, g = self.B, self.C, self.gamma
        w, z, _ = self._tail(N)
        unseen = 2 / (b * c) * w ** (-g / 2) * kve(g, z) * math.exp(b - z) / kve(g + 1, b)
        return _finite(self.population_size() - unseen, "E[V]", self, N)

    def expected_spectrum_array(self, N: float, m_max: int) -> np.ndarray:
        N = _check_N(N)
        if N == 0:
            return np.zeros(m_max)
        b, c, g = self.B, self.C, self.gamma
        w, z, x = self._tail(N)
        shift = math.exp(b - z)
        # t[m] = x^m / m! * K_(m+gamma)(z) * e^b
        t = np.empty(m_max + 1)
        t[0] = kve(g, z) * shift
        if m_max >= 1:
            t[1] = x * kve(g + 1, z) * shift
        for m in range(1, m_max):
            t[m + 1] = x * x / (m * (m + 1)) * t[m - 1] + x * 2 * (m + g) / (z * (m + 1)) * t[m]
        values = 2 / (b * c) * w ** (-g / 2) / kve(g + 1, b) * t[1:]
        if not np.all(np.isfinite(values)):
            raise NumericError("GIGP spectrum recurrence overflowed", {"params": self.params, "N": N})
        return values

    def type_density(self, pi: Any) -> Any:
        pi = np.asarray(pi, dtype=float)
        b, c, g = self.B, self.C, self.gamma
        log_norm = (g + 1) * math.log(2 / (b * c)) - math.log(2) - math.log(kve(g + 1, b)) + b
        with np.errstate(divide="ignore", invalid="ignore"):
            safe = np.where(pi > 0, pi, 1.0)
            log_g = log_norm + (g - 1) * np.log(safe) - safe / c - b * b * c / (4 * safe)
            return np.where(pi > 0, np.exp(log_g), 0.0)

    def log_support(self) -> tuple[float, float]:
        return math.log(self.B * self.B * self.C / 240.0), math.log(60.0 * self.C)

    def max_probability(self) -> float:
        return min(1.0, 20.0 * self.C)

    def free_parameters(self) -> np.ndarray:
        return np.array([logit(-self.gamma), math.log(self.B), math.log(self.C)])

    @classmethod
    def from_free(cls, x: np.ndarray) -> "GeneralizedInverseGaussPoisson":
        return cls(gamma=-float(expit(x[0])), B=math.exp(x[1]), C=math.exp(x[2]))

    @classmethod
    def start_points(cls, N: float, V: float) -> list[LnreModel]:
        grid = zip(np.linspace(-0.9, -0.1, FIT_STARTS), np.geomspace(1e-4, 1e-1, FIT_STARTS))
        bracket = (math.log(1e-2 / max(N, 1.0)), _SCALE_BRACKET[1])
        return [_solve_scale(lambda c, g=g, b=b: cls(gamma=g, B=b, C=c), N, V, bracket) for g, b in grid]


MODEL_FAMILIES: dict[ModelFamily, Type[LnreModel]] = {
    ModelFamily.ZM: ZipfMandelbrot,
    ModelFamily.FZM: FiniteZipfMandelbrot,
    ModelFamily.GIGP: GeneralizedInverseGaussPoisson,
}
