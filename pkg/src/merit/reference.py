"""Published reference grid of optimal design parameters.

The canonical published table of optimal ``(n, m_T, m_E)`` for two- and
three-dose trials at toxicity rates ``(phi_t0, phi_t1) = (0.4, 0.2)``,
four efficacy rate pairs, target type I error 0.1/0.2/0.3, target power
0.6/0.7/0.8, both generalized power kinds, and latent correlation 0.5.
Those published values were derived by Monte Carlo evaluation, so exact
recomputation may differ by one patient in occasional cells; the
``table2`` CLI subcommand reports the comparison.
"""

from __future__ import annotations

from .oc import Boundary

REFERENCE_TOX_RATES = (0.4, 0.2)
REFERENCE_EFF_PAIRS = ((0.1, 0.3), (0.2, 0.4), (0.3, 0.5), (0.4, 0.6))
REFERENCE_ALPHAS = (0.1, 0.2, 0.3)
REFERENCE_BETAS = (0.6, 0.7, 0.8)
REFERENCE_RHO = 0.5

# Per (phi_e0, phi_e1) -> J -> beta_star: six (n, m_t, m_e) triples in the
# order kind I at alpha* 0.1/0.2/0.3 then kind II at alpha* 0.1/0.2/0.3.
_ROWS = {
    (0.1, 0.3): {
        2: {
            0.6: ((26, 7, 6), (23, 6, 5), (21, 6, 4), (25, 6, 5), (18, 5, 4), (13, 4, 3)),
            0.7: ((33, 9, 7), (30, 8, 6), (27, 8, 5), (33, 8, 6), (24, 7, 5), (19, 6, 4)),
            0.8: ((44, 12, 8), (39, 11, 7), (39, 11, 7), (39, 11, 8), (30, 8, 5), (25, 7, 4)),
        },
        3: {
            0.6: ((33, 8, 6), (28, 8, 6), (27, 8, 5), (27, 7, 6), (18, 5, 4), (14, 4, 3)),
            0.7: ((40, 11, 8), (35, 10, 7), (35, 10, 7), (33, 9, 7), (25, 7, 5), (20, 6, 4)),
            0.8: ((47, 13, 9), (47, 13, 9), (47, 13, 9), (40, 11, 8), (31, 9, 6), (26, 8, 5)),
        },
    },
    (0.2, 0.4): {
        2: {
            0.6: ((30, 8, 10), (25, 7, 8), (23, 7, 7), (26, 7, 9), (18, 5, 6), (18, 5, 6)),
            0.7: ((38, 10, 12), (33, 9, 10), (31, 9, 9), (34, 9, 11), (25, 7, 8), (20, 6, 6)),
            0.8: ((47, 13, 14), (44, 13, 13), (44, 13, 13), (45, 12, 14), (35, 10, 10), (24, 7, 7)),
        },
        3: {
            0.6: ((34, 9, 11), (32, 9, 10), (31, 9, 9), (27, 7, 9), (19, 5, 6), (18, 5, 6)),
            0.7: ((44, 12, 14), (41, 12, 12), (41, 12, 12), (36, 10, 12), (26, 7, 8), (23, 7, 7)),
            0.8: ((55, 16, 17), (55, 16, 16), (55, 16, 16), (47, 13, 15), (37, 11, 11), (24, 7, 7)),
        },
    },
    (0.3, 0.5): {
        2: {
            0.6: ((30, 8, 13), (28, 8, 12), (25, 7, 10), (28, 7, 12), (19, 5, 8), (14, 4, 6)),
            0.7: ((40, 11, 17), (34, 10, 14), (33, 10, 13), (37, 10, 16), (28, 8, 12), (22, 6, 9)),
            0.8: ((53, 15, 22), (48, 14, 19), (46, 14, 18), (44, 12, 18), (34, 10, 14), (28, 8, 11)),
        },
        3: {
            0.6: ((37, 10, 16), (34, 9, 14), (34, 10, 13), (34, 9, 15), (19, 5, 8), (19, 5, 8)),
            0.7: ((47, 13, 20), (44, 13, 18), (44, 13, 17), (38, 10, 16), (29, 8, 12), (24, 7, 10)),
            0.8: ((57, 16, 23), (57, 16, 23), (57, 16, 23), (49, 13, 20), (35, 10, 14), (28, 8, 11)),
        },
    },
    (0.4, 0.6): {
        2: {
            0.6: ((34, 9, 18), (25, 7, 13), (24, 7, 12), (28, 7, 15), (19, 5, 10), (16, 4, 8)),
            0.7: ((43, 12, 23), (35, 10, 18), (34, 10, 17), (38, 10, 20), (25, 7, 13), (18, 5, 9)),
            0.8: ((52, 15, 27), (50, 15, 25), (49, 15, 24), (46, 13, 24), (32, 9, 16), (29, 8, 14)),
        },
        3: {
            0.6: ((38, 10, 20), (35, 10, 18), (34, 10, 17), (32, 8, 17), (23, 6, 12), (17, 5, 9)),
            0.7: ((46, 13, 24), (44, 13, 22), (44, 13, 22), (39, 11, 21), (29, 8, 15), (22, 6, 11)),
            0.8: ((59, 17, 30), (59, 17, 30), (59, 17, 30), (46, 13, 24), (36, 10, 18), (29, 8, 14)),
        },
    },
}


def _flatten() -> dict[tuple[float, float, int, int, float, float], Boundary]:
    kinds_alphas = [(k, a) for k in (1, 2) for a in REFERENCE_ALPHAS]
    out = {}
    for (pe0, pe1), by_j in _ROWS.items():
        for J, by_beta in by_j.items():
            for beta, triples in by_beta.items():
                for (kind, alpha), (n, m_t, m_e) in zip(kinds_alphas, triples):
                    out[(pe0, pe1, J, kind, alpha, beta)] = Boundary(n, m_t, m_e)
    return out


PUBLISHED_DESIGNS = _flatten()


def published_design(
    phi_e0: float, phi_e1: float, J: int, kind: int, alpha_star: float, beta_star: float
) -> Boundary:
    """Published optimal boundary for one cell of the reference grid."""
    key = (phi_e0, phi_e1, J, kind, alpha_star, beta_star)
    try:
        return PUBLISHED_DESIGNS[key]
    except KeyError:
        raise KeyError(f"no published design for {key}") from None
