"""Quasi-static Coulomb contact resolution for one motion step.

Given a set of candidate contact points between the object and the (already
moved) finger surfaces, the solver finds the object twist (dx, dy, dyaw)
that is in static force balance under penalty normal forces and Coulomb
friction. Each contact point is hypothesized to separate, stick, or slide in
either tangential direction; for every hypothesis combination the resulting
linear system is solved and checked for consistency:

  * closed contacts must not open (non-negative penalty force),
  * sticking contacts stay inside the friction cone,
  * sliding contacts carry exactly the cone-edge force opposing the slip,
  * separating contacts are force-free and not penetrating.

When several hypotheses survive, the twist with the smallest weighted norm
wins (rotation weighted by a characteristic length); remaining ties break on
a fixed hypothesis order, which keeps the solver deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import DegenerateConfigurationError, JamError

GAP_TOL = 1e-9       # mm
FORCE_TOL = 1e-9     # N
SLIP_TOL = 1e-12     # mm
NORM_TIE_TOL = 1e-12


class RowMode(IntEnum):
    """Hypothesized behavior of one contact point (order fixes tie-breaks)."""

    SEPARATE = 0
    STICK = 1
    SLIDE_POS = 2
    SLIDE_NEG = 3


@dataclass(frozen=True)
class ContactRow:
    """One contact point prepared for the solver.

    ``gap`` is the signed normal gap after the finger motion with the object
    held still; ``tangent_motion`` is the tangential displacement of the
    surface material point over the step, so friction can oppose the true
    relative slip.
    """

    point: np.ndarray        # (2,) world mm
    normal: np.ndarray       # (2,) unit, pointing into the object
    gap: float               # mm, negative = penetrating
    mu: float
    tangent_motion: float = 0.0   # mm along the tangent (perp of normal)
    finger: str = ""
    face_label: str = ""
    classification: str = ""
    contact_id: int = -1


@dataclass
class TwistSolution:
    """Accepted step motion with its contact modes and forces."""

    displacement: np.ndarray        # (2,) mm
    rotation: float                 # rad
    modes: tuple[RowMode, ...]
    normal_force: np.ndarray        # (m,) N
    tangent_force: np.ndarray       # (m,) N
    new_gap: np.ndarray             # (m,) mm, linearized post-step gaps
    slip: np.ndarray                # (m,) mm relative tangential motion
    scaled_norm: float
    consistent_count: int

    @property
    def twist(self) -> np.ndarray:
        return np.array([self.displacement[0], self.displacement[1], self.rotation])


def _zero_solution(m: int = 0) -> TwistSolution:
    z = np.zeros(m)
    return TwistSolution(displacement=np.zeros(2), rotation=0.0, modes=(),
                         normal_force=z, tangent_force=z, new_gap=z, slip=z,
                         scaled_norm=0.0, consistent_count=1)


def resolve_twist(rows: list[ContactRow], *, stiffness: float,
                  char_len: float, center: np.ndarray,
                  max_norm: float | None = None) -> TwistSolution:
    """Resolve the object twist for one step.

    ``max_norm`` optionally rejects solutions whose weighted twist exceeds
    the scale on which the per-step linearization is trustworthy (large
    force-free "escape" twists are artifacts, not motion).

    Raises JamError when no hypothesis is consistent and
    DegenerateConfigurationError when the inputs are unusable.
    """
    m = len(rows)
    if m == 0:
        return _zero_solution()
    if stiffness <= 0 or char_len <= 0:
        raise DegenerateConfigurationError("stiffness and characteristic length must be positive")

    normals = np.array([r.normal for r in rows], dtype=float)
    lengths = np.linalg.norm(normals, axis=1)
    if not np.all(np.isfinite(normals)) or np.any(np.abs(lengths - 1.0) > 1e-6):
        raise DegenerateConfigurationError("contact normals must be finite unit vectors")
    points = np.array([r.point for r in rows], dtype=float)
    gaps = np.array([r.gap for r in rows], dtype=float)
    mus = np.array([r.mu for r in rows], dtype=float)
    surf_t = np.array([r.tangent_motion for r in rows], dtype=float)
    if np.any(mus <= 0):
        raise DegenerateConfigurationError("friction coefficients must be positive")

    tangents = np.stack([-normals[:, 1], normals[:, 0]], axis=1)
    rel = points - np.asarray(center, dtype=float)
    cross_rn = rel[:, 0] * normals[:, 1] - rel[:, 1] * normals[:, 0]
    cross_rt = rel[:, 0] * tangents[:, 1] - rel[:, 1] * tangents[:, 0]

    # Twist variable z = (dx, dy, dyaw * char_len); rows of jn/jt give the
    # normal gap rate and tangential slip rate per unit twist.
    jn = np.column_stack([normals, cross_rn / char_len])
    jt = np.column_stack([tangents, cross_rt / char_len])

    k = stiffness
    # Balance-direction vectors per closed-mode variant: stick leaves the
    # tangential force as an unknown; slide ties it to the normal force.
    # D[v, i] is the (force_x, force_y, moment/char_len) direction carrying
    # the penalty normal force of row i under variant v.
    tau = np.stack([np.zeros(m), -mus, mus])                # stick, slide+, slide-
    D = np.empty((3, m, 3))
    for v in range(3):
        D[v, :, 0] = normals[:, 0] + tau[v] * tangents[:, 0]
        D[v, :, 1] = normals[:, 1] + tau[v] * tangents[:, 1]
        D[v, :, 2] = (cross_rn + tau[v] * cross_rt) / char_len
    # Per-row per-variant contributions to the 3x3 balance block and rhs:
    # f_n = -k (g + jn z)  =>  A_zz += -k D (x) jn,  b += k g D.
    M_var = -k * np.einsum("vid,ie->vide", D, jn)           # (3, m, 3, 3)
    b_var = k * gaps[None, :, None] * D                     # (3, m, 3)
    E_cols = np.column_stack([tangents, cross_rt / char_len])  # stick force dirs

    force_scale = max(1.0, k * float(np.max(np.abs(gaps))),
                      k * float(np.max(np.abs(surf_t))))
    residual_tol = 1e-7 * force_scale

    # Non-stick rows range over SEPARATE / SLIDE_POS / SLIDE_NEG; the mode
    # arrays below map that 3-way choice onto matrix/rhs variants
    # (SEPARATE contributes nothing).
    choice_modes = (RowMode.SEPARATE, RowMode.SLIDE_POS, RowMode.SLIDE_NEG)
    choice_variant = {RowMode.SLIDE_POS: 1, RowMode.SLIDE_NEG: 2}

    best = None              # (norm, order_key, data)
    consistent_total = 0
    any_solved = False

    indices = list(range(m))
    for stick_mask in range(1 << m):
        stick = [i for i in indices if stick_mask >> i & 1]
        free = [i for i in indices if not stick_mask >> i & 1]
        s = len(stick)
        n_unk = 3 + s
        combos = list(itertools.product(range(3), repeat=len(free)))
        H = len(combos)
        A = np.zeros((H, n_unk, n_unk))
        b = np.zeros((H, n_unk))
        base_A = np.zeros((3, 3))
        base_b = np.zeros(3)
        for i in stick:
            base_A += M_var[0, i]
            base_b += b_var[0, i]
        A[:, :3, :3] = base_A
        b[:, :3] = base_b
        if free:
            combo_arr = np.array(combos)                    # (H, |free|)
            for idx, i in enumerate(free):
                choice = combo_arr[:, idx]
                for v in (1, 2):
                    sel = choice == v
                    if np.any(sel):
                        A[sel, :3, :3] += M_var[v, i]
                        b[sel, :3] += b_var[v, i]
        for j, i in enumerate(stick):
            A[:, :3, 3 + j] = E_cols[i]
            A[:, 3 + j, :3] = jt[i]
            b[:, 3 + j] = surf_t[i]

        # Min-norm least squares handles singular hypotheses (e.g. the
        # all-separate case, whose system is 0 = 0) gracefully.
        sol = np.einsum("hij,hj->hi", np.linalg.pinv(A), b)
        residual = np.linalg.norm(np.einsum("hij,hj->hi", A, sol) - b, axis=1)
        solved = residual <= residual_tol
        if not np.any(solved):
            continue
        any_solved = True

        z = sol[:, :3]
        G = gaps[None, :] + z @ jn.T                        # (H, m)
        slip = z @ jt.T - surf_t[None, :]
        f_n = np.zeros((H, m))
        f_t = np.zeros((H, m))

        mode_grid = np.empty((H, m), dtype=np.int8)
        mode_lookup = np.array([int(c) for c in choice_modes], dtype=np.int8)
        for j, i in enumerate(stick):
            mode_grid[:, i] = RowMode.STICK
            f_t[:, i] = sol[:, 3 + j]
        if free:
            for idx, i in enumerate(free):
                mode_grid[:, i] = mode_lookup[combo_arr[:, idx]]

        closed = mode_grid != RowMode.SEPARATE
        f_n[closed] = (-k * G)[closed]
        sliding_pos = mode_grid == RowMode.SLIDE_POS
        sliding_neg = mode_grid == RowMode.SLIDE_NEG
        f_t[sliding_pos] = (-mus[None, :] * f_n)[sliding_pos]
        f_t[sliding_neg] = (mus[None, :] * f_n)[sliding_neg]

        ok = solved.copy()
        ok &= np.all(np.where(closed, G <= GAP_TOL, G >= -GAP_TOL), axis=1)
        ok &= np.all(f_n >= -FORCE_TOL, axis=1)
        sticking = mode_grid == RowMode.STICK
        cone = np.abs(f_t) <= mus[None, :] * f_n + FORCE_TOL
        ok &= np.all(np.where(sticking, cone, True), axis=1)
        ok &= np.all(np.where(sliding_pos, slip >= -SLIP_TOL, True), axis=1)
        ok &= np.all(np.where(sliding_neg, slip <= SLIP_TOL, True), axis=1)

        if max_norm is not None:
            ok &= np.linalg.norm(z, axis=1) <= max_norm
        idxs = np.nonzero(ok)[0]
        consistent_total += len(idxs)
        place = 4 ** np.arange(m)
        for h in idxs:
            cand = (float(np.linalg.norm(z[h])), int(mode_grid[h] @ place), h,
                    z[h].copy(), tuple(RowMode(v) for v in mode_grid[h]),
                    f_n[h].copy(), f_t[h].copy(), G[h].copy(), slip[h].copy())
            if best is None or cand[0] < best[0] - NORM_TIE_TOL or (
                    abs(cand[0] - best[0]) <= NORM_TIE_TOL and cand[1] < best[1]):
                best = cand

    if best is None:
        if any_solved:
            raise JamError("no consistent contact-mode hypothesis",
                           details={"rows": len(rows),
                                    "gaps": gaps.tolist()})
        raise DegenerateConfigurationError(
            "contact system unsolvable for every hypothesis")

    norm, _, _, z, modes, f_n, f_t, G, slip = best
    return TwistSolution(displacement=z[:2],
                         rotation=float(z[2] / char_len),
                         modes=modes,
                         normal_force=f_n, tangent_force=f_t,
                         new_gap=G, slip=slip,
                         scaled_norm=float(norm),
                         consistent_count=consistent_total)
