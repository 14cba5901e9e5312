"""Discrete variational mechanics on groupoids and matched-pair groups.

The primitive object is the two-arrow junction residual: pair the
differential of the Lagrangian with the left invariant extension at the
incoming arrow and the right invariant extension at the outgoing one, over a
basis of the algebroid fiber at the junction.  Longer trajectories are solved
junction by junction, and every solve is cross-checked against the
brute-force variational derivative of the action sum.
"""
from __future__ import annotations

import numpy as np

from .algebroid import (
    AlgebroidVector,
    act_on_fiber_g,
    act_on_fiber_h,
    dagger_on_g,
    dagger_on_h,
    left_invariant,
    right_invariant,
)
from .errors import NoConvergence, NotComposable, TagError
from .groupoids import (
    COMPOSE_TOL,
    ActionGroupoid,
    GroupGroupoid,
    Groupoid,
    MatchedPairGroupoid,
)
from .errors import SingularJacobian
from .matched_group import MatchedPairGroup
from .numerics import (
    COND_LIMIT,
    DEFAULT_TOL,
    Tolerances,
    fd_gradient,
    fd_jacobian,
    newton_solve,
)


class DiscreteLagrangian:
    """Real function on the arrows of a groupoid, with an optional closed
    gradient; falls back to finite differences."""

    def __init__(self, evaluate, gradient=None, name="L"):
        self.evaluate = evaluate
        self._gradient = gradient
        self.name = name

    def __call__(self, x):
        return float(self.evaluate(np.asarray(x, dtype=float)))

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        if self._gradient is not None:
            return np.asarray(self._gradient(x), dtype=float)
        return fd_gradient(self.evaluate, x)


class Trajectory:
    """Ordered arrows with adjacent sources and targets glued to 1e-9."""

    def __init__(self, desc: Groupoid, arrows, residual_norms=None,
                 tol=COMPOSE_TOL):
        self.desc = desc
        self.arrows = [desc.check(a) for a in arrows]
        self.gaps = [desc.composability_gap(a, b)
                     for a, b in zip(self.arrows, self.arrows[1:])]
        for a, b, gap in zip(self.arrows, self.arrows[1:], self.gaps):
            if gap > tol:
                raise NotComposable(desc.beta(a), desc.alpha(b))
        self.residual_norms = residual_norms

    def __len__(self):
        return len(self.arrows)

    def __iter__(self):
        return iter(self.arrows)


class MomentumRecord:
    def __init__(self, k, mu, nu=None):
        self.k = k
        self.mu = np.asarray(mu, dtype=float)
        self.nu = None if nu is None else np.asarray(nu, dtype=float)

    def __repr__(self):
        if self.nu is None:
            return "MomentumRecord(k=%d, mu=%s)" % (self.k, self.mu)
        return "MomentumRecord(k=%d, mu=%s, nu=%s)" % (self.k, self.mu,
                                                       self.nu)


def action_sum(L: DiscreteLagrangian, traj: Trajectory):
    return float(sum(L(a) for a in traj.arrows))


# ---------------------------------------------------------------------------
# junction residuals
# ---------------------------------------------------------------------------

def del_residual(desc: Groupoid, L: DiscreteLagrangian, gk, gk1,
                 tol=COMPOSE_TOL):
    """Vector of <dL, left E_i at g_k> - <dL, right E_i at g_{k+1}> over the
    fiber-chart basis at the junction; zero iff the discrete Euler-Lagrange
    condition holds there."""
    gk = desc.check(gk)
    gk1 = desc.check(gk1)
    if desc.composability_gap(gk, gk1) > tol:
        raise NotComposable(desc.beta(gk), desc.alpha(gk1))
    b = desc.beta(gk)
    dk = L.gradient(gk)
    dk1 = L.gradient(gk1)
    out = np.empty(desc.fiber_dim)
    for i, e in enumerate(np.eye(desc.fiber_dim)):
        X = AlgebroidVector(desc, b, e)
        out[i] = float(dk @ left_invariant(desc, X, gk)
                       - dk1 @ right_invariant(desc, X, gk1))
    return out


def del_residual_matched(md: MatchedPairGroupoid, L: DiscreteLagrangian,
                         xk, xk1, tol=COMPOSE_TOL):
    """Junction residual of a matched-pair groupoid assembled term by term
    from the induced actions and the single-factor invariant fields.

    For a fiber direction (X, Y) at the junction the six contributions are
    the left field of h_k |> X at g_k, minus the right field of X at
    g_{k+1}, plus Y^dagger(g_{k+1}), plus X^dagger(h_k), plus the left field
    of Y at h_k, minus the right field of Y <| g_{k+1} at h_{k+1}.
    """
    xk = md.check(xk)
    xk1 = md.check(xk1)
    if md.composability_gap(xk, xk1) > tol:
        raise NotComposable(md.beta(xk), md.alpha(xk1))
    gk, hk = md.split(xk)
    gk1, hk1 = md.split(xk1)
    b = md.beta(xk)
    nG = md.Gd.arrow_dim
    dk = L.gradient(xk)
    dk1 = L.gradient(xk1)
    d1k, d2k = dk[:nG], dk[nG:]
    d1k1, d2k1 = dk1[:nG], dk1[nG:]
    out = np.empty(md.fiber_dim)
    for i, e in enumerate(np.eye(md.Gd.fiber_dim)):
        X = AlgebroidVector(md.Gd, b, e)
        out[i] = float(
            d1k @ left_invariant(md.Gd, act_on_fiber_g(md, hk, X), gk)
            - d1k1 @ right_invariant(md.Gd, X, gk1)
            + d2k @ dagger_on_h(md, X, hk))
    for j, e in enumerate(np.eye(md.Hd.fiber_dim)):
        Y = AlgebroidVector(md.Hd, b, e)
        out[md.Gd.fiber_dim + j] = float(
            d1k1 @ dagger_on_g(md, Y, gk1)
            + d2k @ left_invariant(md.Hd, Y, hk)
            - d2k1 @ right_invariant(md.Hd, act_on_fiber_h(md, Y, gk1), hk1))
    return out


# ---------------------------------------------------------------------------
# matched-pair groups: momentum form of the residual
# ---------------------------------------------------------------------------

MATCHED_GROUP_FORMS = ("full", "generic", "right-trivial", "left-trivial",
                       "both-trivial", "fields")


def matched_group_momenta(mp: MatchedPairGroup, L: DiscreteLagrangian, u):
    """(mu, nu): the right-translated partial differentials of L at u."""
    g, h = mp.split(u)
    d = L.gradient(u)
    d1, d2 = d[: mp.G.coord_dim], d[mp.G.coord_dim:]
    mu = mp.G.cotangent_to_algebra("right", g, d1)
    nu = mp.H.cotangent_to_algebra("right", h, d2)
    return mu, nu


def del_residual_matched_group(mp: MatchedPairGroup, L: DiscreteLagrangian,
                               uk, uk1, form="full"):
    """Momentum form of the matched-group junction residual.

    The xi block is the transported-and-forced momentum mismatch in g*, the
    eta block the same in h*:

        xi:  (Ad*_{g_k^{-1}} mu_k) <|* h_k + a*_{h_k} d2L_k - mu_{k+1}
        eta: Ad*_{h_k^{-1}} nu_k - b*_{g_{k+1}} d1L_{k+1}
             - g_{k+1} |>* nu_{k+1}

    The degenerate forms drop the terms that vanish when one or both of the
    mutual actions are trivial; "fields" assembles the same residual by
    pairing dL with the invariant vector fields instead.
    """
    if form not in MATCHED_GROUP_FORMS:
        raise TagError("unknown residual form %r" % (form,))
    uk = mp.check(uk)
    uk1 = mp.check(uk1)
    if form == "fields":
        return _matched_group_fields_residual(mp, L, uk, uk1)
    gk, hk = mp.split(uk)
    gk1, hk1 = mp.split(uk1)
    dk = L.gradient(uk)
    dk1 = L.gradient(uk1)
    d2k = dk[mp.G.coord_dim:]
    d1k1 = dk1[: mp.G.coord_dim]
    mu_k, nu_k = matched_group_momenta(mp, L, uk)
    mu_k1, nu_k1 = matched_group_momenta(mp, L, uk1)

    mu_t = mp.G.coAd(gk, mu_k)
    nu_t = mp.H.coAd(hk, nu_k)
    if form == "full":
        xi_part = mp.tr_star(mu_t, hk) + mp.a_star(hk, d2k) - mu_k1
        eta_part = nu_t - mp.b_star(gk1, d1k1) - mp.g_star(gk1, nu_k1)
    elif form == "generic":
        # same formula with all transposes rebuilt from finite differences
        # of the raw actions; independent of any closed-form overrides
        xi_part = (mp.tr_star_generic(mu_t, hk)
                   + mp.a_star_generic(hk, d2k) - mu_k1)
        eta_part = (nu_t - mp.b_star_generic(gk1, d1k1)
                    - mp.g_star_generic(gk1, nu_k1))
    elif form == "right-trivial":
        xi_part = mp.tr_star(mu_t, hk) - mu_k1
        eta_part = nu_t - mp.b_star(gk1, d1k1) - nu_k1
    elif form == "left-trivial":
        xi_part = mu_t + mp.a_star(hk, d2k) - mu_k1
        eta_part = nu_t - mp.g_star(gk1, nu_k1)
    else:
        xi_part = mu_t - mu_k1
        eta_part = nu_t - nu_k1
    return np.concatenate([xi_part, eta_part])


def _matched_group_fields_residual(mp, L, uk, uk1):
    dk = L.gradient(uk)
    dk1 = L.gradient(uk1)
    out = np.empty(mp.dim)
    for i, w in enumerate(np.eye(mp.dim)):
        out[i] = float(dk @ mp.left_field(uk, w)
                       - dk1 @ mp.right_field(uk1, w))
    return out


# ---------------------------------------------------------------------------
# implicit stepping
# ---------------------------------------------------------------------------

def del_step(desc: Groupoid, L: DiscreteLagrangian, gk, guess=None,
             tol: Tolerances = DEFAULT_TOL):
    """Solve the junction residual for the next arrow in the source fiber at
    beta(g_k).  The warm start transports the previous arrow to the new
    fiber (constant-velocity guess) unless an explicit guess arrow is given."""
    gk = desc.check(gk)
    b = desc.beta(gk)
    if guess is None:
        z0 = desc.arrow_coords(gk)
    else:
        z0 = desc.arrow_coords(desc.check(guess))

    def F(z):
        return del_residual(desc, L, gk, desc.fiber_elem(b, z))

    J0 = fd_jacobian(F, z0, tol.fd_step)
    if not np.all(np.isfinite(J0)) or np.linalg.cond(J0) > COND_LIMIT:
        raise SingularJacobian("degenerate Lagrangian: junction residual "
                               "Jacobian condition estimate exceeds limit")
    z = newton_solve(F, z0, tol)
    return desc.fiber_elem(b, np.atleast_1d(z))


def solve_trajectory(desc: Groupoid, L: DiscreteLagrangian, g1, n_steps,
                     tol: Tolerances = DEFAULT_TOL, validate=True):
    """March the junction solve forward from g1 for n_steps arrows total;
    the result is oracle-validated before being returned."""
    arrows = [desc.check(g1)]
    norms = []
    for _ in range(n_steps - 1):
        nxt = del_step(desc, L, arrows[-1], tol=tol)
        norms.append(float(np.linalg.norm(
            del_residual(desc, L, arrows[-1], nxt), np.inf)))
        arrows.append(nxt)
    traj = Trajectory(desc, arrows, residual_norms=norms)
    if validate and len(arrows) > 1:
        defect = variational_oracle(desc, L, traj)
        if defect > 1e-6:
            raise NoConvergence(
                "solved trajectory fails the variational check (%.3e)"
                % defect, residual_norm=defect)
    return traj


def del_step_matched_group(mp: MatchedPairGroup, L: DiscreteLagrangian, uk,
                           guess=None, form="full",
                           tol: Tolerances = DEFAULT_TOL):
    """Implicit step of the matched-group recursion in exponential
    coordinates, warm-started at the previous increment."""
    uk = mp.check(uk)
    z0 = mp.log(uk if guess is None else mp.check(guess))

    def F(z):
        return del_residual_matched_group(mp, L, uk, mp.exp(z), form=form)

    z = newton_solve(F, z0, tol)
    return mp.exp(np.atleast_1d(z))


def solve_matched_group_trajectory(mp, L, u1, n_steps, form="full",
                                   tol: Tolerances = DEFAULT_TOL):
    arrows = [mp.check(u1)]
    norms = []
    for _ in range(n_steps - 1):
        nxt = del_step_matched_group(mp, L, arrows[-1], form=form, tol=tol)
        norms.append(float(np.linalg.norm(
            del_residual_matched_group(mp, L, arrows[-1], nxt, form=form),
            np.inf)))
        arrows.append(nxt)
    return arrows, norms


# ---------------------------------------------------------------------------
# momentum evolution
# ---------------------------------------------------------------------------

def momentum_evolution(desc, L: DiscreteLagrangian, traj: Trajectory):
    """Momentum records mu_k along a trajectory and the maximum defect of the
    transport recursion mu_{k+1} = Ad*-transport of mu_k (+ forcing on an
    action groupoid)."""
    if isinstance(desc, GroupGroupoid):
        G = desc.G
        records = []
        for k, g in enumerate(traj.arrows):
            d = L.gradient(g)
            records.append(MomentumRecord(k, G.cotangent_to_algebra(
                "right", g, d)))
        defect = 0.0
        for k in range(len(records) - 1):
            gap = records[k + 1].mu - G.coAd(traj.arrows[k], records[k].mu)
            defect = max(defect, float(np.max(np.abs(gap))))
        return records, defect
    if isinstance(desc, ActionGroupoid):
        G = desc.G
        records = []
        for k, x in enumerate(traj.arrows):
            _, g = desc.split(x)
            d = L.gradient(x)
            records.append(MomentumRecord(k, G.cotangent_to_algebra(
                "right", g, d[desc.M.dim:])))
        defect = 0.0
        for k in range(len(records) - 1):
            forcing = _orbit_forcing(desc, L, traj.arrows[k],
                                     traj.arrows[k + 1])
            gap = (records[k + 1].mu
                   - G.coAd(desc.split(traj.arrows[k])[1], records[k].mu)
                   - forcing)
            defect = max(defect, float(np.max(np.abs(gap))))
        return records, defect
    raise TagError("momentum evolution needs a group or action-groupoid "
                   "descriptor, got %s" % desc.name)


def _orbit_forcing(desc: ActionGroupoid, L, xk, xk1):
    """Differential at the identity of xi -> L(m_{k+1} . exp(xi), g_{k+1}):
    the position-dependence of L fed back through the orbit map."""
    m1 = desc.beta(xk)
    _, g1 = desc.split(xk1)

    def f(xi):
        m = np.atleast_1d(np.asarray(desc.action(m1, desc.G.exp(xi)),
                                     dtype=float))
        return L(np.concatenate([m, g1]))

    return fd_gradient(f, np.zeros(desc.G.dim))


def matched_group_momentum_records(mp: MatchedPairGroup, L, arrows):
    return [MomentumRecord(k, *matched_group_momenta(mp, L, u))
            for k, u in enumerate(arrows)]


# ---------------------------------------------------------------------------
# brute-force variational oracle
# ---------------------------------------------------------------------------

def oracle_directional(desc: Groupoid, L: DiscreteLagrangian, gk, gk1,
                       X: AlgebroidVector):
    """Directional derivative of L(g_k c(t)) + L(c(t)^{-1} g_{k+1}) at t = 0
    for the fiber curve c tangent to X: the product-preserving variation of
    the two arrows meeting at the junction."""
    from .numerics import fd_directional

    b = desc.beta(gk)

    def f(t):
        c = desc.fiber_elem(b, float(t[0]) * X.z)
        return L(desc.mul(gk, c)) + L(desc.mul(desc.inv(c), gk1))

    return fd_directional(f, np.zeros(1), np.ones(1))


def variational_oracle(desc: Groupoid, L: DiscreteLagrangian,
                       traj: Trajectory, directions=None):
    """Max absolute directional derivative of the action sum over
    product-preserving variations at the interior junctions.  A discrete
    Euler-Lagrange solution must push this below 1e-6."""
    worst = 0.0
    for k in range(len(traj.arrows) - 1):
        gk, gk1 = traj.arrows[k], traj.arrows[k + 1]
        b = desc.beta(gk)
        if directions is None:
            dirs = [AlgebroidVector(desc, b, e)
                    for e in np.eye(desc.fiber_dim)]
        else:
            dirs = [X for X in directions
                    if np.allclose(X.b, b, atol=1e-9)]
        for X in dirs:
            worst = max(worst, abs(oracle_directional(desc, L, gk, gk1, X)))
    return worst
