"""Hot resampling kernel with a compiled core and a numpy fallback.

Both backends implement the same draw-order contract against the caller's
``numpy.random.Generator`` and are bit-for-bit interchangeable; which one runs
therefore never affects results, only speed.

Contract for ``resample_counts(mu, n_pubs, n_4star, sigma2_eps,
log_threshold, rng, max_rounds)``:

1. Publications are indexed ``0 .. n_pubs-1``; the first ``n_4star`` are
   conditioned on having been awarded 4*, the rest on not.
2. Latent log-values are drawn by batched rejection.  Each round, with ``m``
   publications still unresolved (in index order): draw ``m`` standard
   normals ``z_v``, then ``m`` standard normals ``z_e``.  Publication ``j``
   resolves when ``(mu + z_v) + (-sigma2_eps/2 + sqrt(sigma2_eps) * z_e) >
   log_threshold`` matches its condition, keeping ``mu + z_v`` as its
   log-value.  More than ``max_rounds`` rounds raises RuntimeError.
3. Re-review: draw ``n_pubs`` standard normals ``z`` in index order and count
   publications with ``log_v + (-sigma2_eps/2 + sqrt(sigma2_eps) * z) >
   log_threshold``.  That count is returned.

All arithmetic is in log space with IEEE add/mul only (no per-element
transcendentals), which keeps compiled and fallback results identical to the
last bit.  ``Generator.standard_normal(size=m)`` consumes the underlying bit
stream exactly like ``m`` scalar draws, so the batched fallback and the
scalar compiled loop see the same variates.

Backend selection: the compiled extension when importable, else the numpy
fallback.  Set ``REFAGREE_BACKEND`` to ``c`` or ``python`` to force one.
"""

from __future__ import annotations

import os

from . import _resample_py

try:
    from . import _resample as _resample_c
except ImportError:  # extension not built; fall back to numpy
    _resample_c = None

BACKENDS = {"python": _resample_py.resample_counts}
if _resample_c is not None:
    BACKENDS["c"] = _resample_c.resample_counts


def _select_backend() -> str:
    choice = os.environ.get("REFAGREE_BACKEND", "auto").lower()
    if choice == "auto":
        return "c" if "c" in BACKENDS else "python"
    if choice not in BACKENDS:
        raise RuntimeError(
            f"REFAGREE_BACKEND={choice!r} not available; "
            f"choose one of {sorted(BACKENDS)} or 'auto'"
        )
    return choice


BACKEND_NAME = _select_backend()
resample_counts = BACKENDS[BACKEND_NAME]
