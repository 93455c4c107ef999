"""Brute-force references that share no code with the package's propagation paths."""

import numpy as np

BS = np.array([[1, 1j], [1j, 1]]) / np.sqrt(2)


def stage_matrix(l, n, k, rot_err=0.0, phase_err=0.0, sort_value=None):
    """Full 2x2 MZ transfer matrix; row 0 is the offset port, row 1 the keep (cross) port."""
    v = l if sort_value is None else sort_value
    alpha = np.pi / 2**n
    arms = np.diag([np.exp(1j * v * (alpha + rot_err)), np.exp(1j * (k * alpha + phase_err))])
    return BS @ arms @ BS


def stage_out(l, n, k, rot_err=0.0, phase_err=0.0, amp=1.0, sort_value=None):
    """(keep, offset) amplitudes for light entering the first input port."""
    out = stage_matrix(l, n, k, rot_err, phase_err, sort_value) @ np.array([amp, 0])
    return out[1], out[0]


def port_amplitudes(l, depth, errors=None, sort_value=None):
    """Amplitude at each port r by multiplying stage responses along the root-to-r path.

    The stage at level n on the path to r has residue r mod 2**n and sends r to
    its keep port when bit n of r is 0.
    """
    errors = errors or {}
    amps = np.zeros(2**depth, dtype=complex)
    for r in range(2**depth):
        a = 1.0 + 0j
        for n in range(depth):
            k = r % 2**n
            keep, off = stage_out(l, n, k, *errors.get((n, k), (0.0, 0.0)), sort_value=sort_value)
            a *= off if (r >> n) & 1 else keep
        amps[r] = a
    return amps
