"""Objective bundles, Riemannian derivative conversions, and the builtin
problem catalog.

An Objective carries the ambient value/gradient/Hessian callables plus
the manifold it lives on.  ``riemannian_grad`` and ``riemannian_hess``
convert the ambient derivatives to the manifold ones; on the flat
backends they are the identity, on the sphere they apply the tangent
projection and the symmetric projected-Hessian construction.
"""

import dataclasses

import numpy as np

from .linalg import SymMatrix
from .manifold import Euclidean, NotOnManifold, OpenSubset, Sphere, open_ball

LIPSCHITZ_SAFETY = 1.5
LIPSCHITZ_SAMPLES = 8
LIPSCHITZ_FLOOR = 1e-12


@dataclasses.dataclass(frozen=True)
class Objective:
    """Callable bundle for one optimization problem.

    value_fn, grad_fn and hess_fn take an ambient point and return the
    scalar value, the ambient gradient and the ambient Hessian (as a
    SymMatrix or anything SymMatrix accepts).  lipschitz_fn, when
    present, returns a local upper bound for the Hessian spectral norm
    on the retraction ball around the point; the evaluation-free line
    search needs it.
    """

    value_fn: object
    grad_fn: object
    hess_fn: object
    domain: object
    lipschitz_fn: object = None
    name: str = ""

    def value(self, x):
        return float(self.value_fn(np.asarray(x, dtype=float)))

    def grad(self, x):
        return np.asarray(self.grad_fn(np.asarray(x, dtype=float)), dtype=float)

    def hess(self, x):
        H = self.hess_fn(np.asarray(x, dtype=float))
        if not isinstance(H, SymMatrix):
            H = SymMatrix(H)
        return H


class QuadraticForm:
    """f(x) = <Ax, x>/2 for a symmetric A; derivatives are exact."""

    def __init__(self, A):
        if not isinstance(A, SymMatrix):
            A = SymMatrix(A)
        self.A = A

    def value(self, x):
        return 0.5 * float(x @ self.A.entries @ x)

    def grad(self, x):
        return self.A.entries @ x

    def hess(self, x):
        return self.A

    def to_objective(self, domain, name=""):
        # The Hessian is constant, so the exact spectral norm is a valid
        # local Lipschitz bound everywhere.
        lip = float(np.linalg.norm(self.A.entries, 2))
        return Objective(
            value_fn=self.value,
            grad_fn=self.grad,
            hess_fn=self.hess,
            domain=domain,
            lipschitz_fn=lambda x, _lip=lip: _lip,
            name=name,
        )


def negate(obj, name=""):
    """The objective -f on the same domain."""
    return Objective(
        value_fn=lambda x: -obj.value(x),
        grad_fn=lambda x: -obj.grad(x),
        hess_fn=lambda x: SymMatrix(-obj.hess(x).entries),
        domain=obj.domain,
        lipschitz_fn=obj.lipschitz_fn,
        name=name or ("neg_" + obj.name),
    )


def riemannian_grad(obj, x):
    """Gradient in the manifold metric, as an ambient tangent vector."""
    x = np.asarray(x, dtype=float)
    if not obj.domain.contains(x):
        raise NotOnManifold("point is outside the objective's domain")
    g = obj.grad(x)
    if isinstance(obj.domain, Sphere):
        return obj.domain.tangent_project(x, g)
    return g


def riemannian_hess(obj, x):
    """Hessian in the manifold metric as a symmetric ambient matrix.

    On the sphere the tangent Hessian H[v] = P(grad^2 f)v - <grad f, x>v
    is extended to ambient vectors by precomposing with the tangent
    projection P = I - x x^T, which keeps the matrix symmetric and puts
    the normal direction in its kernel.  Flat backends return the
    ambient Hessian unchanged.
    """
    x = np.asarray(x, dtype=float)
    if not obj.domain.contains(x):
        raise NotOnManifold("point is outside the objective's domain")
    H = obj.hess(x)
    if not isinstance(obj.domain, Sphere):
        return H
    G = obj.grad(x)
    P = np.eye(len(x)) - np.outer(x, x)
    B = P @ (H.entries - (G @ x) * np.eye(len(x))) @ P
    return SymMatrix(0.5 * (B + B.T))


def fd_gradient(obj, x, h=1e-6):
    """Central-difference gradient, used as a test oracle."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (obj.value(x + e) - obj.value(x - e)) / (2.0 * h)
    return g


def default_lipschitz(hess_fn, domain):
    """Sampled local bound on the Hessian spectral norm.

    Evaluates the Hessian at the point itself and at a few axis offsets
    inside the retraction ball, takes the largest spectral norm, and
    multiplies by a safety factor.  Callers with a closed-form bound
    should supply their own function instead.
    """

    def L(x):
        x = np.asarray(x, dtype=float)
        d = min(domain.radius(x), 1.0)
        pts = [x]
        for scale in (0.45, 0.9):
            for i in range(x.size):
                for sign in (1.0, -1.0):
                    pts.append(x + sign * scale * d * _axis(x.size, i))
        pts = pts[:LIPSCHITZ_SAMPLES]
        if isinstance(domain, Sphere):
            pts = [p / np.linalg.norm(p) for p in pts if np.linalg.norm(p) > 0]
        best = LIPSCHITZ_FLOOR
        for p in pts:
            H = hess_fn(p)
            entries = H.entries if isinstance(H, SymMatrix) else np.asarray(H)
            best = max(best, float(np.linalg.norm(entries, 2)))
        return LIPSCHITZ_SAFETY * best

    return L


def _axis(m, i):
    e = np.zeros(m)
    e[i] = 1.0
    return e


@dataclasses.dataclass(frozen=True)
class Problem:
    """Catalog entry: objective with its initial point and a sampler of
    derivative-check points that keeps clear of the singular set."""

    objective: object
    x0: np.ndarray
    sample_point: object


def _punctured_line():
    return OpenSubset(
        1,
        radius_fn=lambda t: abs(t[0]),
        member_fn=lambda t: t[0] != 0.0,
    )


def _abs_power(p):
    # f(t) = |t|^p on the punctured line, derivatives piecewise exact.
    def value(t):
        return abs(t[0]) ** p

    def grad(t):
        return np.array([p * np.sign(t[0]) * abs(t[0]) ** (p - 1.0)])

    def hess(t):
        return SymMatrix([[p * (p - 1.0) * abs(t[0]) ** (p - 2.0)]])

    return value, grad, hess


def _sample_line(rng, lo=0.5, hi=3.0):
    t = rng.uniform(lo, hi) * rng.choice([-1.0, 1.0])
    return np.array([t])


def _sample_ball(m, rng, rmax=0.7):
    u = rng.standard_normal(m)
    u /= np.linalg.norm(u)
    return rng.uniform(0.1, rmax) * u


def _sample_sphere(m, rng):
    u = rng.standard_normal(m)
    return u / np.linalg.norm(u)


def builtin_problems():
    """The twelve benchmark configurations addressable by string id."""
    problems = {}

    def add(name, objective, x0, sample_point, attach_default_lipschitz=True):
        if attach_default_lipschitz and objective.lipschitz_fn is None:
            objective = dataclasses.replace(
                objective,
                lipschitz_fn=default_lipschitz(objective.hess, objective.domain),
            )
        problems[name] = Problem(
            objective=objective,
            x0=np.asarray(x0, dtype=float),
            sample_point=sample_point,
        )

    # 1-d power kinks on the punctured line.
    for name, p in (("example1", 1.3), ("example2", 0.3)):
        value, grad, hess = _abs_power(p)
        add(
            name,
            Objective(value, grad, hess, _punctured_line(), name=name),
            [1.00001188],
            _sample_line,
        )

    # Infinitely flat wall at the origin.
    def flat_value(t):
        return float(np.exp(-1.0 / t[0] ** 2))

    def flat_grad(t):
        return np.array([np.exp(-1.0 / t[0] ** 2) * 2.0 / t[0] ** 3])

    def flat_hess(t):
        w = np.exp(-1.0 / t[0] ** 2)
        return SymMatrix([[w * (4.0 / t[0] ** 6 - 6.0 / t[0] ** 4)]])

    add(
        "example3",
        Objective(flat_value, flat_grad, flat_hess, _punctured_line(), name="example3"),
        [3.0],
        lambda rng: _sample_line(rng, 0.6, 3.0),
    )

    # Oscillatory product with critical points accumulating at the axes.
    def osc_value(z):
        x, y = z
        return float(x**3 * np.sin(1.0 / x) + y**3 * np.sin(1.0 / y))

    def osc_grad(z):
        x, y = z
        return np.array(
            [
                3.0 * x**2 * np.sin(1.0 / x) - x * np.cos(1.0 / x),
                3.0 * y**2 * np.sin(1.0 / y) - y * np.cos(1.0 / y),
            ]
        )

    def osc_hess(z):
        x, y = z
        dxx = 6.0 * x * np.sin(1.0 / x) - 4.0 * np.cos(1.0 / x) - np.sin(1.0 / x) / x
        dyy = 6.0 * y * np.sin(1.0 / y) - 4.0 * np.cos(1.0 / y) - np.sin(1.0 / y) / y
        return SymMatrix(np.diag([dxx, dyy]))

    add(
        "example4",
        Objective(
            osc_value,
            osc_grad,
            osc_hess,
            OpenSubset(
                2,
                radius_fn=lambda z: min(abs(z[0]), abs(z[1])),
                member_fn=lambda z: z[0] != 0.0 and z[1] != 0.0,
            ),
            name="example4",
        ),
        [-0.99998925, 2.00001188],
        lambda rng: np.array(
            [
                rng.uniform(0.5, 2.0) * rng.choice([-1.0, 1.0]),
                rng.uniform(0.5, 2.0) * rng.choice([-1.0, 1.0]),
            ]
        ),
    )

    # Kinked valley; the Hessian is exactly singular wherever it exists.
    def valley_value(z):
        x, y = z
        return float(100.0 * (y - abs(x)) ** 2 + abs(1.0 - x))

    def valley_grad(z):
        x, y = z
        return np.array(
            [
                -200.0 * (y - abs(x)) * np.sign(x) - np.sign(1.0 - x),
                200.0 * (y - abs(x)),
            ]
        )

    def valley_hess(z):
        s = np.sign(z[0])
        return SymMatrix([[200.0, -200.0 * s], [-200.0 * s, 200.0]])

    add(
        "example5",
        Objective(
            valley_value,
            valley_grad,
            valley_hess,
            OpenSubset(
                2,
                radius_fn=lambda z: min(abs(z[0]), abs(1.0 - z[0])),
                member_fn=lambda z: z[0] != 0.0 and z[0] != 1.0,
            ),
            name="example5",
        ),
        [0.55134554, -0.75134554],
        lambda rng: np.array(
            [
                rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 0.9),
                rng.uniform(-1.0, 1.0),
            ]
        ),
    )

    # Piecewise-linear slope with no critical point at all.
    add(
        "example6",
        Objective(
            lambda z: float(5.0 * abs(z[0]) + z[1]),
            lambda z: np.array([5.0 * np.sign(z[0]), 1.0]),
            lambda z: SymMatrix(np.zeros((2, 2))),
            OpenSubset(
                2,
                radius_fn=lambda z: abs(z[0]),
                member_fn=lambda z: z[0] != 0.0,
            ),
            name="example6",
        ),
        [-0.99998925, 2.00001188],
        lambda rng: np.array(
            [
                rng.uniform(0.5, 2.0) * rng.choice([-1.0, 1.0]),
                rng.uniform(-2.0, 2.0),
            ]
        ),
    )

    # Indefinite quadratics on the open unit ball and the sphere.
    A7 = SymMatrix([[2.0, 4.0], [4.0, 2.0]])
    A8 = SymMatrix(
        [
            [-23.0, -61.0, 40.0],
            [-61.0, -39.5, 155.0],
            [40.0, 155.0, -50.0],
        ]
    )

    q7 = QuadraticForm(A7)
    q8 = QuadraticForm(A8)

    add(
        "example7",
        q7.to_objective(open_ball(2), name="example7"),
        [0.1, 0.2],
        lambda rng: _sample_ball(2, rng),
        attach_default_lipschitz=False,
    )
    add(
        "example8",
        q8.to_objective(open_ball(3), name="example8"),
        [1.188e-05, 2.188e-05, 3.188e-05],
        lambda rng: _sample_ball(3, rng),
        attach_default_lipschitz=False,
    )
    add(
        "example9",
        negate(problems["example8"].objective, name="example9"),
        [1.188e-05, 2.188e-05, 3.188e-05],
        lambda rng: _sample_ball(3, rng),
        attach_default_lipschitz=False,
    )

    # Printed to eight digits, so renormalize to pass sphere membership.
    def _unit(v):
        v = np.asarray(v, dtype=float)
        return v / np.linalg.norm(v)

    sphere_x0_2 = _unit([0.4472136, 0.89442719])
    sphere_x0_3 = _unit([0.29369586, 0.54091459, 0.78813333])
    add(
        "example7p",
        q7.to_objective(Sphere(2), name="example7p"),
        sphere_x0_2,
        lambda rng: _sample_sphere(2, rng),
        attach_default_lipschitz=False,
    )
    add(
        "example8p",
        q8.to_objective(Sphere(3), name="example8p"),
        sphere_x0_3,
        lambda rng: _sample_sphere(3, rng),
        attach_default_lipschitz=False,
    )
    add(
        "example9p",
        negate(problems["example8p"].objective, name="example9p"),
        sphere_x0_3,
        lambda rng: _sample_sphere(3, rng),
        attach_default_lipschitz=False,
    )

    return problems
