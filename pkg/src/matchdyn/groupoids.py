"""Lie groupoids over flat base charts: the four standard constructions
(group, pair, action, trivial) and the matched-pair groupoid built from two
groupoids acting on each other.

An arrow is a flat numpy array; each descriptor knows how to read it.  Every
descriptor also carries a fiber chart: ``fiber_elem(b, z)`` parameterizes the
arrows with source b near the unit arrow, with ``fiber_elem(b, 0)`` the unit
and ``d/dz`` spanning the kernel of the source map's tangent.  That chart is
what solvers differentiate and solve over.
"""
from __future__ import annotations

import numpy as np

from .errors import DomainError, MatchedAxiomError, NotComposable
from .groups import Circle, Group, rot2
from .numerics import fd_curve

COMPOSE_TOL = 1e-9


class Chart:
    """Flat R^n base chart with an optional validity predicate."""

    def __init__(self, dim, valid=None, name="chart"):
        self.dim = dim
        self.valid = valid
        self.name = name

    def check(self, m):
        m = np.atleast_1d(np.asarray(m, dtype=float))
        if m.size != self.dim:
            raise DomainError("base point has size %d, expected %d"
                              % (m.size, self.dim))
        if self.valid is not None and not self.valid(m):
            raise DomainError("base point %s outside chart" % m)
        return m

    def random(self, rng, sigma=1.0):
        return sigma * rng.standard_normal(self.dim)


POINT = Chart(0, name="point")


class Groupoid:
    """Groupoid descriptor over a base chart."""

    name = "groupoid"
    base: Chart
    arrow_dim = 0
    fiber_dim = 0

    # -- required structure maps ---------------------------------------------

    def alpha(self, x):
        raise NotImplementedError

    def beta(self, x):
        raise NotImplementedError

    def eps(self, b):
        raise NotImplementedError

    def mul(self, x, y):
        """Partial multiplication; assumes beta(x) = alpha(y)."""
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def fiber_elem(self, b, z):
        """Chart of the source fiber through eps(b); fiber_elem(b, 0) = eps(b)."""
        raise NotImplementedError

    def arrow_coords(self, x):
        """Fiber-chart coordinates of x within the source fiber of alpha(x);
        inverse of fiber_elem(alpha(x), .) where defined."""
        raise NotImplementedError

    def check(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.size != self.arrow_dim:
            raise DomainError("arrow has size %d, expected %d"
                              % (x.size, self.arrow_dim))
        return x

    # -- derived -------------------------------------------------------------

    def composability_gap(self, x, y):
        if self.base.dim == 0:
            return 0.0
        return float(np.max(np.abs(self.beta(x) - self.alpha(y))))

    def fiber_tangent_matrix(self, b):
        """arrow_dim x fiber_dim matrix spanning A_b = ker T alpha at eps(b)."""
        cols = [
            fd_curve(lambda t, e=e: self.fiber_elem(b, t * e))
            for e in np.eye(self.fiber_dim)
        ]
        return np.column_stack(cols)

    def fiber_coords(self, b, v):
        """Fiber-chart coordinates of an ambient tangent vector at eps(b)."""
        E = self.fiber_tangent_matrix(b)
        sol, *_ = np.linalg.lstsq(E, np.asarray(v, dtype=float), rcond=None)
        return sol

    def random_base(self, rng, sigma=1.0):
        return self.base.random(rng, sigma)

    def random_arrow(self, rng, sigma=0.7):
        b = self.random_base(rng, sigma)
        return self.fiber_elem(b, sigma * rng.standard_normal(self.fiber_dim))

    def random_with_source(self, b, rng, sigma=0.7):
        return self.fiber_elem(b, sigma * rng.standard_normal(self.fiber_dim))

    def axiom_report(self, rng, n_samples=50):
        """Max deviation of the groupoid axioms over random composable data."""
        dev = {
            "source_target_of_product": 0.0,
            "associativity": 0.0,
            "unit_source_target": 0.0,
            "unit_laws": 0.0,
            "inverse_source_target": 0.0,
            "inverse_laws": 0.0,
        }

        def upd(key, a, b):
            a = np.atleast_1d(np.asarray(a, dtype=float))
            b = np.atleast_1d(np.asarray(b, dtype=float))
            if a.size or b.size:
                dev[key] = max(dev[key], float(np.max(np.abs(a - b))))

        for _ in range(n_samples):
            x = self.random_arrow(rng)
            y = self.random_with_source(self.beta(x), rng)
            z = self.random_with_source(self.beta(y), rng)
            xy = self.mul(x, y)
            upd("source_target_of_product", self.alpha(xy), self.alpha(x))
            upd("source_target_of_product", self.beta(xy), self.beta(y))
            upd("associativity", self.mul(xy, z), self.mul(x, self.mul(y, z)))
            b = self.random_base(rng)
            ub = self.eps(b)
            upd("unit_source_target", self.alpha(ub), b)
            upd("unit_source_target", self.beta(ub), b)
            upd("unit_laws", self.mul(x, self.eps(self.beta(x))), x)
            upd("unit_laws", self.mul(self.eps(self.alpha(x)), x), x)
            xi = self.inv(x)
            upd("inverse_source_target", self.alpha(xi), self.beta(x))
            upd("inverse_source_target", self.beta(xi), self.alpha(x))
            upd("inverse_laws", self.mul(xi, x), self.eps(self.beta(x)))
            upd("inverse_laws", self.mul(x, xi), self.eps(self.alpha(x)))
        return dev


def compose(desc, x, y, tol=COMPOSE_TOL):
    """Product of two arrows, rejecting pairs whose target/source gap
    exceeds tol."""
    gap = desc.composability_gap(x, y)
    if gap > tol:
        raise NotComposable(desc.beta(x), desc.alpha(y))
    return desc.mul(x, y)


# ---------------------------------------------------------------------------
# concrete descriptors
# ---------------------------------------------------------------------------

class GroupGroupoid(Groupoid):
    """A group seen as a groupoid over a single point."""

    def __init__(self, G: Group):
        self.G = G
        self.base = POINT
        self.arrow_dim = G.coord_dim
        self.fiber_dim = G.dim
        self.name = "group_%s" % G.name

    def alpha(self, x):
        return np.zeros(0)

    def beta(self, x):
        return np.zeros(0)

    def eps(self, b):
        return self.G.identity()

    def mul(self, x, y):
        return self.G.mul(x, y)

    def inv(self, x):
        return self.G.inv(x)

    def fiber_elem(self, b, z):
        return self.G.exp(z)

    def arrow_coords(self, x):
        return self.G.log(x)


class PairGroupoid(Groupoid):
    """M x M with arrows (m, m') glued along matching middle points."""

    def __init__(self, M: Chart):
        self.M = M
        self.base = M
        self.arrow_dim = 2 * M.dim
        self.fiber_dim = M.dim
        self.name = "pair_%s" % M.name

    def alpha(self, x):
        return np.asarray(x, dtype=float)[: self.M.dim]

    def beta(self, x):
        return np.asarray(x, dtype=float)[self.M.dim:]

    def eps(self, b):
        b = self.M.check(b)
        return np.concatenate([b, b])

    def mul(self, x, y):
        return np.concatenate([self.alpha(x), self.beta(y)])

    def inv(self, x):
        return np.concatenate([self.beta(x), self.alpha(x)])

    def fiber_elem(self, b, z):
        b = self.M.check(b)
        return np.concatenate([b, b + np.asarray(z, dtype=float)])

    def arrow_coords(self, x):
        return self.beta(x) - self.alpha(x)


class ActionGroupoid(Groupoid):
    """M x G for a right G-action on M; target of (m, g) is m acted on by g."""

    def __init__(self, M: Chart, G: Group, action):
        self.M = M
        self.G = G
        self.action = action
        self.base = M
        self.arrow_dim = M.dim + G.coord_dim
        self.fiber_dim = G.dim
        self.name = "action_%s_%s" % (M.name, G.name)

    def split(self, x):
        x = np.asarray(x, dtype=float)
        return x[: self.M.dim], x[self.M.dim:]

    def alpha(self, x):
        return self.split(x)[0]

    def beta(self, x):
        m, g = self.split(x)
        return np.atleast_1d(np.asarray(self.action(m, g), dtype=float))

    def eps(self, b):
        return np.concatenate([self.M.check(b), self.G.identity()])

    def mul(self, x, y):
        m, g = self.split(x)
        _, g2 = self.split(y)
        return np.concatenate([m, self.G.mul(g, g2)])

    def inv(self, x):
        m, g = self.split(x)
        return np.concatenate([self.beta(x), self.G.inv(g)])

    def fiber_elem(self, b, z):
        return np.concatenate([self.M.check(b), self.G.exp(z)])

    def arrow_coords(self, x):
        return self.G.log(self.split(x)[1])


class TrivialGroupoid(Groupoid):
    """M x G x M with product (m, g, m')(m', g', n') = (m, gg', n')."""

    def __init__(self, M: Chart, G: Group):
        self.M = M
        self.G = G
        self.base = M
        self.arrow_dim = 2 * M.dim + G.coord_dim
        self.fiber_dim = G.dim + M.dim
        self.name = "trivial_%s_%s" % (M.name, G.name)

    def split(self, x):
        x = np.asarray(x, dtype=float)
        n = self.M.dim
        return x[:n], x[n:n + self.G.coord_dim], x[n + self.G.coord_dim:]

    def alpha(self, x):
        return self.split(x)[0]

    def beta(self, x):
        return self.split(x)[2]

    def eps(self, b):
        b = self.M.check(b)
        return np.concatenate([b, self.G.identity(), b])

    def mul(self, x, y):
        m, g, _ = self.split(x)
        _, g2, n2 = self.split(y)
        return np.concatenate([m, self.G.mul(g, g2), n2])

    def inv(self, x):
        m, g, n = self.split(x)
        return np.concatenate([n, self.G.inv(g), m])

    def fiber_elem(self, b, z):
        b = self.M.check(b)
        z = np.asarray(z, dtype=float)
        return np.concatenate([b, self.G.exp(z[: self.G.dim]),
                               b + z[self.G.dim:]])

    def arrow_coords(self, x):
        m, g, n = self.split(x)
        return np.concatenate([self.G.log(g), n - m])


class MatchedPairGroupoid(Groupoid):
    """Groupoid on pairs (g, h) with beta_G(g) = alpha_H(h), multiplied
    through the mutual actions:

        (g, h)(g', h') = (g (h |> g'), (h <| g') h').

    The fiber chart realizes the sum-to-matched identification: coordinates
    (zG, zH) map to (g_z, fiber_H(beta_G(g_z), zH)), so the G summand enters
    with its target-corrected H component and the H summand sits at fixed g.
    """

    def __init__(self, Gd: Groupoid, Hd: Groupoid, act_on_g, act_on_h,
                 name=None):
        if Gd.base.dim != Hd.base.dim:
            raise DomainError("factor groupoids live over different bases")
        self.Gd = Gd
        self.Hd = Hd
        self.act_on_g = act_on_g
        self.act_on_h = act_on_h
        self.base = Gd.base
        self.arrow_dim = Gd.arrow_dim + Hd.arrow_dim
        self.fiber_dim = Gd.fiber_dim + Hd.fiber_dim
        self.name = name or ("%s_bowtie_%s" % (Gd.name, Hd.name))

    def split(self, x):
        x = np.asarray(x, dtype=float)
        return x[: self.Gd.arrow_dim], x[self.Gd.arrow_dim:]

    def join(self, g, h):
        return np.concatenate([np.atleast_1d(g), np.atleast_1d(h)])

    def split_fiber(self, z):
        z = np.asarray(z, dtype=float)
        return z[: self.Gd.fiber_dim], z[self.Gd.fiber_dim:]

    def alpha(self, x):
        return self.Gd.alpha(self.split(x)[0])

    def beta(self, x):
        return self.Hd.beta(self.split(x)[1])

    def eps(self, b):
        return self.join(self.Gd.eps(b), self.Hd.eps(b))

    def mul(self, x, y):
        g, h = self.split(x)
        g2, h2 = self.split(y)
        return self.join(
            self.Gd.mul(g, self.act_on_g(h, g2)),
            self.Hd.mul(self.act_on_h(h, g2), h2),
        )

    def inv(self, x):
        g, h = self.split(x)
        gi = self.Gd.inv(g)
        hi = self.Hd.inv(h)
        return self.join(self.act_on_g(hi, gi), self.act_on_h(hi, gi))

    def fiber_elem(self, b, z):
        zg, zh = self.split_fiber(z)
        gz = self.Gd.fiber_elem(b, zg)
        return self.join(gz, self.Hd.fiber_elem(self.Gd.beta(gz), zh))

    def arrow_coords(self, x):
        g, h = self.split(x)
        return np.concatenate([self.Gd.arrow_coords(g),
                               self.Hd.arrow_coords(h)])

    def matched_axiom_report(self, rng, n_samples=50):
        """Max deviation of the nine mutual-action compatibility conditions
        plus the identity-arrow action identities."""
        Gd, Hd = self.Gd, self.Hd
        dev = {
            "i_source_of_left_action": 0.0,
            "ii_left_action_compose": 0.0,
            "iii_left_action_unit": 0.0,
            "iv_target_of_right_action": 0.0,
            "v_right_action_compose": 0.0,
            "vi_right_action_unit": 0.0,
            "vii_target_source_exchange": 0.0,
            "viii_left_action_cocycle": 0.0,
            "ix_right_action_cocycle": 0.0,
            "act_units_map_to_units": 0.0,
            "act2_units_act_trivially": 0.0,
        }

        def upd(key, a, b):
            dev[key] = max(dev[key], float(np.max(np.abs(
                np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))))

        for _ in range(n_samples):
            h = Hd.random_arrow(rng)
            g1 = Gd.random_with_source(Hd.beta(h), rng)
            g2 = Gd.random_with_source(Gd.beta(g1), rng)
            h2 = Hd.random_with_source(Hd.beta(h), rng)
            hp = Hd.random_with_source(Hd.alpha(h), rng)
            hp = Hd.inv(hp)  # arrow with target alpha(h)

            upd("i_source_of_left_action",
                Gd.alpha(self.act_on_g(h, g1)), Hd.alpha(h))
            upd("ii_left_action_compose",
                self.act_on_g(Hd.mul(hp, h), g1),
                self.act_on_g(hp, self.act_on_g(h, g1)))
            upd("iii_left_action_unit",
                self.act_on_g(Hd.eps(Gd.alpha(g1)), g1), g1)
            upd("iv_target_of_right_action",
                Hd.beta(self.act_on_h(h, g1)), Gd.beta(g1))
            upd("v_right_action_compose",
                self.act_on_h(h, Gd.mul(g1, g2)),
                self.act_on_h(self.act_on_h(h, g1), g2))
            upd("vi_right_action_unit",
                self.act_on_h(h, Gd.eps(Hd.beta(h))), h)
            upd("vii_target_source_exchange",
                Gd.beta(self.act_on_g(h, g1)),
                Hd.alpha(self.act_on_h(h, g1)))
            upd("viii_left_action_cocycle",
                self.act_on_g(h, Gd.mul(g1, g2)),
                Gd.mul(self.act_on_g(h, g1),
                       self.act_on_g(self.act_on_h(h, g1), g2)))
            upd("ix_right_action_cocycle",
                self.act_on_h(Hd.mul(hp, h), g1),
                Hd.mul(self.act_on_h(hp, self.act_on_g(h, g1)),
                       self.act_on_h(h, g1)))
            upd("act_units_map_to_units",
                self.act_on_g(h, Gd.eps(Hd.beta(h))), Gd.eps(Hd.alpha(h)))
            upd("act_units_map_to_units",
                self.act_on_h(Hd.eps(Gd.alpha(g1)), g1),
                Hd.eps(Gd.beta(g1)))
            upd("act2_units_act_trivially",
                self.act_on_g(Hd.eps(Gd.alpha(g1)), g1), g1)
            upd("act2_units_act_trivially",
                self.act_on_h(h, Gd.eps(Hd.beta(h))), h)
        return dev

    def matched_axiom_check(self, rng, n_samples=50, tol=1e-8):
        report = self.matched_axiom_report(rng, n_samples)
        for key, val in report.items():
            if val > tol:
                raise MatchedAxiomError(key, val)
        return report


def axiom_check_matched(Gd, Hd, act_on_g, act_on_h, rng, n_samples=50):
    """Compatibility report for a candidate matched pair of groupoids
    without committing to the product descriptor."""
    return MatchedPairGroupoid(Gd, Hd, act_on_g, act_on_h)\
        .matched_axiom_report(rng, n_samples)


def groupoid_action_check(desc, f, action, sampler, rng, n_samples=50,
                          side="right"):
    """Check that `action` is a groupoid action of desc on the map f.

    sampler(rng) must yield points p of the acted-on space; arrows are drawn
    with the matching source (right action) or target (left action).
    Reports max violations of the moment-map condition, the mixed
    associativity, and the unit law.
    """
    dev = {"moment_map": 0.0, "mixed_associativity": 0.0, "unit_law": 0.0}

    def upd(key, a, b):
        dev[key] = max(dev[key], float(np.max(np.abs(
            np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))))

    for _ in range(n_samples):
        p = sampler(rng)
        if side == "right":
            g = desc.random_with_source(f(p), rng)
            g2 = desc.random_with_source(desc.beta(g), rng)
            upd("moment_map", f(action(p, g)), desc.beta(g))
            upd("mixed_associativity",
                action(action(p, g), g2), action(p, desc.mul(g, g2)))
            upd("unit_law", action(p, desc.eps(f(p))), p)
        else:
            h = desc.inv(desc.random_with_source(f(p), rng))
            h2 = desc.inv(desc.random_with_source(desc.alpha(h), rng))
            upd("moment_map", f(action(h, p)), desc.alpha(h))
            upd("mixed_associativity",
                action(h2, action(h, p)), action(desc.mul(h2, h), p))
            upd("unit_law", action(desc.eps(f(p)), p), p)
    return dev


# ---------------------------------------------------------------------------
# the trivial-groupoid decomposition
# ---------------------------------------------------------------------------

def make_pair_groupoid(M):
    return PairGroupoid(M)


def make_action_groupoid(M, G, action):
    return ActionGroupoid(M, G, action)


def make_trivial_groupoid(M, G):
    return TrivialGroupoid(M, G)


def group_as_groupoid(G):
    return GroupGroupoid(G)


class TrivialDecomposition:
    """The trivial groupoid M x G x M alongside its matched-pair
    presentation (M x G) bowtie (M x M), with the identification map.

    The pair groupoid acts on the action groupoid by replacing the base
    point, (m', m) |> (m, g) = (m', g); the action groupoid pushes the pair
    groupoid along the orbit, (m', m) <| (m, g) = (m' g, m g).
    """

    def __init__(self, M: Chart, G: Group, action):
        self.M = M
        self.G = G
        self.action = action
        self.trivial = TrivialGroupoid(M, G)
        self.actiond = ActionGroupoid(M, G, action)
        self.paird = PairGroupoid(M)
        self.matched = MatchedPairGroupoid(
            self.actiond, self.paird,
            act_on_g=self._act_on_g, act_on_h=self._act_on_h,
            name="triv_%s_%s" % (M.name, G.name),
        )

    def _act_on_g(self, h, g):
        # (m', m) |> (m, g) = (m', g)
        mprime = self.paird.alpha(h)
        _, gg = self.actiond.split(g)
        return np.concatenate([mprime, gg])

    def _act_on_h(self, h, g):
        # (m', m) |> (m, g) lands at (m' g, m g)
        mprime = self.paird.alpha(h)
        m2 = self.paird.beta(h)
        _, gg = self.actiond.split(g)
        a = np.atleast_1d(np.asarray(self.action(mprime, gg), dtype=float))
        b = np.atleast_1d(np.asarray(self.action(m2, gg), dtype=float))
        return np.concatenate([a, b])

    def phi(self, x):
        """(m, g, n) -> ((m, g), (mg, n))."""
        m, g, n = self.trivial.split(self.trivial.check(x))
        mg = self.actiond.beta(np.concatenate([m, g]))
        return np.concatenate([m, g, mg, n])

    def phi_inv(self, y):
        """Drop the redundant middle point of a matched arrow."""
        garr, harr = self.matched.split(y)
        m, g = self.actiond.split(garr)
        n = self.paird.beta(harr)
        return np.concatenate([m, g, n])


def default_trivial_decomposition():
    """The desk-scale instance: M = R^2 with SO(2) rotating it."""
    M = Chart(2, name="r2")
    G = Circle()
    action = lambda m, g: rot2(float(np.atleast_1d(g)[0])) @ np.asarray(m)
    return TrivialDecomposition(M, G, action)
