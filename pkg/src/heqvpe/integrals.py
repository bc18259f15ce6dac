"""Molecular electron integrals: FCIDUMP-style I/O, validation and spin expansion.

Two-electron integrals are stored in physicist order ``v[p, q, r, s] = <pq|rs>``,
i.e. electron 1 occupies ``p`` and ``r``, electron 2 occupies ``q`` and ``s``.
Indices in files are 1-based; arrays are 0-based.

File layout::

    # comment
    &FCI NORB=2 NELEC=2 E_CORE=0.0
    <value> p q r s     two-electron when p, q, r, s > 0
    <value> p q 0 0     one-electron
    <value> 0 0 0 0     core energy (overrides the header)

``<value>`` may be a plain float, ``(x)`` or a complex ``(re,im)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import BoundsError, ParseError, ValidationError

SYMMETRY_TOL = 1e-12

BUNDLED = {
    "he-sto3g": "he_sto3g.fcidump",
    "he-631g": "he_631g.fcidump",
}

_HEADER_KEY = re.compile(r"([A-Za-z_0-9]+)\s*=\s*([^\s,]+)")


@dataclass(frozen=True)
class MolecularIntegrals:
    """Spatial-orbital integrals in Hartree."""

    n_orbitals: int
    h: np.ndarray
    v: np.ndarray
    e_core: float = 0.0
    n_electrons: int = 2

    def __post_init__(self):
        m = self.n_orbitals
        if m < 1:
            raise ValidationError("n_orbitals must be positive")
        if self.n_electrons < 1:
            raise ValidationError("n_electrons must be positive")
        if self.h.shape != (m, m) or self.v.shape != (m, m, m, m):
            raise ValidationError(
                f"tensor shapes {self.h.shape}, {self.v.shape} do not match n_orbitals={m}"
            )
        if self.n_electrons > 2 * m:
            raise ValidationError(
                f"n_electrons={self.n_electrons} exceeds 2*n_orbitals={2 * m}"
            )
        check_symmetries(self.h, self.v)

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.h) or np.iscomplexobj(self.v)


@dataclass(frozen=True)
class SpinOrbitalIntegrals:
    """Integrals over ``2M`` spin orbitals; spatial ``i`` -> ``2i`` (up), ``2i+1`` (down)."""

    n_spin_orbitals: int
    h: np.ndarray
    v: np.ndarray
    e_core: float = 0.0
    n_electrons: int = 2


def check_symmetries(h, v, tol=SYMMETRY_TOL):
    """Raise ValidationError if hermiticity or the <pq|rs> symmetries fail."""
    if np.max(np.abs(h - h.conj().T), initial=0.0) > tol:
        raise ValidationError("one-electron integrals violate hermiticity h_pq = conj(h_qp)")
    # v_pqrs = conj(v_srqp)
    if np.max(np.abs(v - v.transpose(3, 2, 1, 0).conj()), initial=0.0) > tol:
        raise ValidationError(
            "two-electron integrals violate hermiticity v_pqrs = conj(v_srqp)"
        )
    # v_pqrs = v_qpsr
    if np.max(np.abs(v - v.transpose(1, 0, 3, 2)), initial=0.0) > tol:
        raise ValidationError(
            "two-electron integrals violate particle exchange v_pqrs = v_qpsr"
        )


def _parse_value(token, lineno, path):
    token = token.strip()
    try:
        if token.startswith("(") and token.endswith(")"):
            inner = token[1:-1]
            if "," in inner:
                re_part, im_part = inner.split(",", 1)
                return complex(float(re_part), float(im_part))
            return float(inner)
        return float(token)
    except ValueError:
        raise ParseError(f"cannot parse value {token!r}", lineno, path) from None


def _parse_header(line, lineno, path):
    fields = {k.upper(): val for k, val in _HEADER_KEY.findall(line)}
    try:
        norb = int(fields["NORB"])
        nelec = int(fields["NELEC"])
    except KeyError as exc:
        raise ParseError(f"header missing {exc.args[0]}", lineno, path) from None
    except ValueError:
        raise ParseError("header NORB/NELEC must be integers", lineno, path) from None
    try:
        e_core = float(fields.get("E_CORE", 0.0))
    except ValueError:
        raise ParseError("header E_CORE must be a float", lineno, path) from None
    if norb < 1:
        raise ParseError("NORB must be positive", lineno, path)
    return norb, nelec, e_core


def parse_integrals(text: str, path=None) -> MolecularIntegrals:
    """Parse integral-file text; see the module docstring for the format."""
    header = None
    h = v = None
    e_core = 0.0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            if not line.upper().startswith("&FCI"):
                raise ParseError("expected '&FCI' header line", lineno, path)
            header = _parse_header(line, lineno, path)
            norb, nelec, e_core = header
            h = np.zeros((norb, norb), dtype=complex)
            v = np.zeros((norb,) * 4, dtype=complex)
            continue
        if line.upper().startswith("&END") or line == "/":
            continue
        # Complex values may contain a space after the comma.
        match = re.match(r"^(\([^)]*\)|\S+)\s+(.*)$", line)
        if match is None:
            raise ParseError(f"malformed line {raw!r}", lineno, path)
        value = _parse_value(match.group(1), lineno, path)
        idx_tokens = match.group(2).split()
        if len(idx_tokens) != 4:
            raise ParseError(f"expected 4 indices, got {len(idx_tokens)}", lineno, path)
        try:
            p, q, r, s = (int(t) for t in idx_tokens)
        except ValueError:
            raise ParseError(f"non-integer index in {raw!r}", lineno, path) from None
        norb = header[0]
        if any(i < 0 or i > norb for i in (p, q, r, s)):
            raise BoundsError(
                f"{path + ':' if path else ''}{lineno}: index out of range 0..{norb} in {raw.strip()!r}"
            )
        if p == q == r == s == 0:
            if isinstance(value, complex) and value.imag != 0:
                raise ParseError("core energy must be real", lineno, path)
            e_core = float(value.real if isinstance(value, complex) else value)
        elif r == 0 and s == 0 and p > 0 and q > 0:
            h[p - 1, q - 1] = value
        elif min(p, q, r, s) > 0:
            v[p - 1, q - 1, r - 1, s - 1] = value
        else:
            raise ParseError(f"index pattern {p} {q} {r} {s} is not one- or two-electron", lineno, path)
    if header is None:
        raise ParseError("missing '&FCI' header", None, path)
    norb, nelec, _ = header
    if not (np.any(h.imag) or np.any(v.imag)):
        h, v = h.real.copy(), v.real.copy()
    return MolecularIntegrals(norb, h, v, e_core, nelec)


def load_integrals(path) -> MolecularIntegrals:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise FileNotFoundError(f"integral file not found: {path}") from None
    return parse_integrals(text, str(path))


def _format_value(x) -> str:
    if isinstance(x, complex) or np.iscomplexobj(x):
        x = complex(x)
        return f"({x.real!r},{x.imag!r})"
    return repr(float(x))


def dumps_integrals(mi: MolecularIntegrals, comment: str | None = None) -> str:
    """Serialize every nonzero entry; values use ``repr`` so a reload is bit-exact."""
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"&FCI NORB={mi.n_orbitals} NELEC={mi.n_electrons} E_CORE={mi.e_core!r}")
    cplx = mi.is_complex
    for idx in np.ndindex(*mi.v.shape):
        val = mi.v[idx]
        if val != 0:
            val = complex(val) if cplx else float(np.real(val))
            lines.append(f"{_format_value(val)} " + " ".join(str(i + 1) for i in idx))
    for p, q in np.ndindex(*mi.h.shape):
        val = mi.h[p, q]
        if val != 0:
            val = complex(val) if cplx else float(np.real(val))
            lines.append(f"{_format_value(val)} {p + 1} {q + 1} 0 0")
    return "\n".join(lines) + "\n"


def save_integrals(mi: MolecularIntegrals, path, comment=None):
    Path(path).write_text(dumps_integrals(mi, comment))


def bundled_path(name: str) -> Path:
    """Path of a bundled dataset (``he-sto3g`` or ``he-631g``)."""
    try:
        fname = BUNDLED[name]
    except KeyError:
        raise KeyError(f"unknown bundled dataset {name!r}; choose from {sorted(BUNDLED)}") from None
    return Path(str(resources.files("heqvpe") / "data" / fname))


def load_bundled(name: str) -> MolecularIntegrals:
    return load_integrals(bundled_path(name))


def expand_to_spin_orbitals(mi: MolecularIntegrals) -> SpinOrbitalIntegrals:
    """Interleaved spin expansion with spin-conservation deltas.

    ``v_so[P, Q, R, S]`` is nonzero only when spin(P) == spin(R) and
    spin(Q) == spin(S), matching the physicist ordering.
    """
    m = mi.n_orbitals
    n = 2 * m
    dtype = complex if mi.is_complex else float
    h = np.zeros((n, n), dtype=dtype)
    v = np.zeros((n,) * 4, dtype=dtype)
    for sigma in (0, 1):
        h[sigma::2, sigma::2] = mi.h
        for tau in (0, 1):
            v[sigma::2, tau::2, sigma::2, tau::2] = mi.v
    return SpinOrbitalIntegrals(n, h, v, mi.e_core, mi.n_electrons)
