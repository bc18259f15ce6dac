"""Regenerate the bundled He integral files (requires pyscf, not a package dependency).

    python scripts/make_he_integrals.py src/heqvpe/data
"""

import sys
from pathlib import Path

import numpy as np
from pyscf import ao2mo, gto, scf

from heqvpe.integrals import MolecularIntegrals, save_integrals

OUTPUTS = {"sto-3g": "he_sto3g.fcidump", "6-31g": "he_631g.fcidump"}


def he_integrals(basis):
    mol = gto.M(atom="He 0 0 0", basis=basis, verbose=0)
    mf = scf.RHF(mol).run()
    c = mf.mo_coeff
    n = c.shape[1]
    h = c.T @ mf.get_hcore() @ c
    chem = ao2mo.restore(1, ao2mo.kernel(mol, c), n)
    v = chem.transpose(0, 2, 1, 3)
    # Symmetrize away ~1e-16 transformation noise so partners are bit-equal.
    h = 0.5 * (h + h.T)
    v = (v + v.transpose(1, 0, 3, 2) + v.transpose(3, 2, 1, 0) + v.transpose(2, 3, 0, 1)) / 4
    return MolecularIntegrals(n, h, v, 0.0, 2), mf.e_tot


def main(outdir):
    outdir = Path(outdir)
    for basis, fname in OUTPUTS.items():
        mi, e_hf = he_integrals(basis)
        comment = (
            f"He atom, {basis} basis, RHF molecular orbitals (pyscf).\n"
            f"Two-electron values are <pq|rs> (physicist order). E_RHF = {e_hf:.10f} Ha"
        )
        save_integrals(mi, outdir / fname, comment)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parents[1] / "src/heqvpe/data")
