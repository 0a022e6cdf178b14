"""Where to nucleate: extrema of g(y) = dZ(x_S, y)/dnu * dZ(y_R, y)/dnu on the boundary."""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.signal

from zaremba.field.green import ZarembaField, eval_field, interpolate_boundary, site_function
from zaremba.types import FloatArray
from zaremba.utils.inflect import count

FLAT_TOLERANCE = 1e-14


class SiteError(Exception):
    """The site function has no usable extremum."""

    pass


@dataclass(frozen=True)
class Site:
    """A nucleation site on the boundary."""

    s: float
    """Arclength coordinate"""

    point: complex
    g: float
    """Site function at s"""

    def theta(self, center: complex = 0j) -> float:
        """Polar angle of the point about center, in units of pi, in [0, 2)."""
        return float(np.mod(np.angle(self.point - center) / np.pi, 2.0))


@dataclass(frozen=True)
class _SiteFunction:
    field: ZarembaField
    g: FloatArray
    s: FloatArray
    """Node arclengths, ascending"""

    h: FloatArray
    """g in the same order, signed so that the wanted extremum is a minimum"""

    z: float


def _site_function(field_source: ZarembaField, field_receiver: ZarembaField) -> _SiteFunction:
    g = site_function(field_source, field_receiver)
    spread = float(np.ptp(g))
    if spread < FLAT_TOLERANCE:
        raise SiteError(f"The site function is flat (spread {spread:.1e}); there is no nucleation site")
    z = float(eval_field(field_source, field_receiver.source)[0])
    order = np.argsort(field_source.mesh.arclength)
    # Z >= 0 wants the minimum of g, Z < 0 the maximum
    signed = g if z >= 0 else -g
    return _SiteFunction(
        field=field_source, g=g, s=field_source.mesh.arclength[order], h=signed[order], z=z
    )


def _vertex(s: FloatArray, h: FloatArray) -> float:
    """
    Abscissa of the parabola through three points, clamped to their span.

    >>> round(_vertex(np.array([0.0, 1.0, 2.0]), np.array([1.0, 0.0, 1.0])), 12)
    1.0
    >>> round(_vertex(np.array([0.0, 1.0, 2.0]), np.array([2.0, 0.0, 1.0])), 12)
    1.166666666667
    """
    left, right = s[1] - s[0], s[1] - s[2]
    numerator = left**2 * (h[1] - h[2]) - right**2 * (h[1] - h[0])
    denominator = left * (h[1] - h[2]) - right * (h[1] - h[0])
    if denominator == 0:
        return float(s[1])
    return float(np.clip(s[1] - 0.5 * numerator / denominator, s[0], s[2]))


def _refine(function: _SiteFunction, i: int) -> Site:
    mesh = function.field.mesh
    curve = mesh.partition.curve
    n = len(function.s)
    neighbours = np.array([i - 1, i, i + 1])
    # unwrap the arclength across s = 0
    s = function.s[neighbours % n] + curve.length * np.floor_divide(neighbours, n)
    site_s = float(np.mod(_vertex(s, function.h[neighbours % n]), curve.length))
    point = complex(curve.gamma(curve.parameter_at(site_s)))
    g = float(interpolate_boundary(mesh, function.g, site_s).real)
    return Site(s=site_s, point=point, g=g)


def nucleation_site(field_source: ZarembaField, field_receiver: ZarembaField) -> Site:
    """
    The boundary point where a short Neumann arc changes Z(x_S, y_R) most in
    the direction of its sign: the global minimum of g when Z >= 0, the global
    maximum otherwise.

    Both fields must be solved at the same k on the same mesh. The best node is
    refined by a parabola through it and its two neighbours.

    Raises:
        SiteError: If the site function is flat
    """
    function = _site_function(field_source, field_receiver)
    site = _refine(function, int(np.argmin(function.h)))
    logging.debug(
        f"Nucleation site at s={site.s:.8f}, point ({site.point.real:.6f}, {site.point.imag:.6f}), "
        f"g={site.g:.6e} with Z={function.z:.6e}"
    )
    return site


def nucleation_sites(field_source: ZarembaField, field_receiver: ZarembaField, count_: int) -> list[Site]:
    """
    The count_ strongest local extrema of the site function, strongest first.

    With count_ == 1 this is nucleation_site.

    Raises:
        SiteError: If the site function is flat or has fewer local extrema
    """
    if count_ == 1:
        return [nucleation_site(field_source, field_receiver)]
    function = _site_function(field_source, field_receiver)
    n = len(function.h)
    # pad periodically so an extremum next to s = 0 is still a peak
    padded = np.concatenate([function.h[-1:], function.h, function.h[:1]])
    peaks, _ = scipy.signal.find_peaks(-padded)
    peaks = [int(p) - 1 for p in peaks if 1 <= p <= n]
    if len(peaks) < count_:
        raise SiteError(
            f"The site function has {count('local extremum', len(peaks))}, "
            f"{count_} nucleation sites were asked for"
        )
    strongest = sorted(peaks, key=lambda i: function.h[i])[:count_]
    sites = [_refine(function, i) for i in strongest]
    logging.debug(f"Nucleation sites at s={[round(site.s, 8) for site in sites]}")
    return sites
